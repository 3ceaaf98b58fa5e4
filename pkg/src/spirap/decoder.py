"""Beam-search ("bubble") decoder over the spinal chunk tree.

Each decode attempt gets one SlotEvidence per pass.  The per-slot cost of a
candidate prefix of depth d is, with r the received samples and x the
candidate's hypothesized symbols for that pass:

  estimated-phase:  sum_{j<=d} (|r_j|^2 + g^2 |x_j|^2) - 2 g |C(d)|,
                    C(d) = sum_{j<=d} r_j conj(x_j),  g the gain magnitude
  genie:            sum_{j<=d} |r_j - alpha x_j|^2    with the true alpha

The estimated-phase form equals min over theta of sum |r_j - g e^{j theta}
x_j|^2, i.e. the coherent cost at the best-fitting phase angle(C).  Candidate
ranking per depth keeps the B lowest costs, ties broken by lexicographically
smaller message prefix.  A slot with g = 0 contributes the same constant to
every candidate, so empty or pre-start slots drop out of the ranking
automatically.
"""

from dataclasses import dataclass, field

import numba
import numpy as np

from .hashing import CHUNK_TWEAK, MASK64, PASS_TWEAK, spine_step
from . import spinal
from .spinal import SpinalParams

_U = np.uint64
_M1 = _U(0xBF58476D1CE4E5B9)
_M2 = _U(0x94D049BB133111EB)


@dataclass
class SlotEvidence:
    """Received (residual) samples of one slot attributed to a stream.

    pass_index is the absolute slot number: transmitters key their symbol
    bits by the shared slot counter, so the receiver never needs to learn
    how many passes it missed before anchoring on a stream.
    """

    samples: np.ndarray
    pass_index: int
    mode: str = "estimated"          # "estimated" or "genie"
    gain_magnitude: float = 1.0
    genie_alpha: complex = 0.0 + 0.0j


@dataclass
class DecodeResult:
    message_bits: np.ndarray
    success: bool
    phases: np.ndarray   # per-slot angle of sum r conj(x) on the winning path
    cost: float


@numba.njit(inline="always")
def _mix64(x):
    x ^= x >> _U(30)
    x *= _M1
    x ^= x >> _U(27)
    x *= _M2
    x ^= x >> _U(31)
    return x


@numba.njit(cache=True, fastmath=True)
def _score_children(spines, corr_re, corr_im, xen, cost0, chunk_keys, pass_keys,
                    r_re, r_im, gains, a_re, a_im, genie, cmask,
                    table_re, table_im, scores):
    """Cost of every (parent, chunk) child at the current depth."""
    W = spines.shape[0]
    K = chunk_keys.shape[0]
    P = pass_keys.shape[0]
    for b in range(W):
        for v in range(K):
            s = _mix64(spines[b] ^ chunk_keys[v])
            total = cost0[b]
            for p in range(P):
                w = _mix64(s ^ pass_keys[p])
                xi = np.int64(w & cmask)
                xr = table_re[xi]
                xq = table_im[xi]
                if genie:
                    er = r_re[p] - (a_re[p] * xr - a_im[p] * xq)
                    ei = r_im[p] - (a_re[p] * xq + a_im[p] * xr)
                    total += er * er + ei * ei
                else:
                    cr = corr_re[b, p] + r_re[p] * xr + r_im[p] * xq
                    ci = corr_im[b, p] + r_im[p] * xr - r_re[p] * xq
                    e = xen[b, p] + xr * xr + xq * xq
                    g = gains[p]
                    total += g * g * e - 2.0 * g * np.sqrt(cr * cr + ci * ci)
            scores[b * K + v] = total


@numba.njit(cache=True, fastmath=True)
def _rebuild_selected(spines, corr_re, corr_im, xen, cost0, sel_parent, sel_chunk,
                      chunk_keys, pass_keys, r_re, r_im, a_re, a_im, genie, cmask,
                      table_re, table_im,
                      out_spines, out_corr_re, out_corr_im, out_xen, out_cost):
    """Recompute full beam state for the children that survived selection."""
    P = pass_keys.shape[0]
    for n in range(sel_parent.shape[0]):
        b = sel_parent[n]
        s = _mix64(spines[b] ^ chunk_keys[sel_chunk[n]])
        out_spines[n] = s
        acc = cost0[b]
        for p in range(P):
            w = _mix64(s ^ pass_keys[p])
            xi = np.int64(w & cmask)
            xr = table_re[xi]
            xq = table_im[xi]
            if genie:
                er = r_re[p] - (a_re[p] * xr - a_im[p] * xq)
                ei = r_im[p] - (a_re[p] * xq + a_im[p] * xr)
                acc += er * er + ei * ei
            out_corr_re[n, p] = corr_re[b, p] + r_re[p] * xr + r_im[p] * xq
            out_corr_im[n, p] = corr_im[b, p] + r_im[p] * xr - r_re[p] * xq
            out_xen[n, p] = xen[b, p] + xr * xr + xq * xq
        out_cost[n] = acc


def _select_beam(scores: np.ndarray, width: int):
    """Indices of the `width` lowest scores, ties to the smaller index.

    Returned ascending, which preserves lexicographic prefix order of the
    beam because parents are themselves kept in prefix order.
    """
    n = scores.shape[0]
    if n <= width:
        return np.arange(n)
    kth = np.partition(scores, width - 1)[width - 1]
    cand = np.flatnonzero(scores <= kth)
    if cand.size > width:
        order = np.lexsort((cand, scores[cand]))
        cand = np.sort(cand[order[:width]])
    return cand


def bubble_decode(evidence_list: list[SlotEvidence], params: SpinalParams) -> DecodeResult:
    """Run the beam search over all chunks and CRC-check the best leaf."""
    if not evidence_list:
        raise ValueError("need at least one pass of evidence")
    mode = evidence_list[0].mode
    if any(ev.mode != mode for ev in evidence_list):
        raise ValueError("all evidence slots must share one estimator mode")
    genie = mode == "genie"
    L, K, P = params.L, 1 << params.k, len(evidence_list)
    for ev in evidence_list:
        if ev.samples.shape[0] < L:
            raise ValueError("evidence slot shorter than symbols per pass")

    table = spinal.constellation_table(params.c)
    table_re = np.ascontiguousarray(table.real)
    table_im = np.ascontiguousarray(table.imag)
    cmask = _U((1 << params.c) - 1)
    chunk_keys = (np.arange(1, K + 1, dtype=np.uint64) * _U(CHUNK_TWEAK))
    pass_keys = np.array(
        [((ev.pass_index + 1) * PASS_TWEAK) & MASK64 for ev in evidence_list],
        dtype=np.uint64)

    r = np.stack([np.asarray(ev.samples[:L], dtype=np.complex128)
                  for ev in evidence_list])          # [P, L]
    r_re = np.ascontiguousarray(r.real)
    r_im = np.ascontiguousarray(r.imag)
    gains = np.array([max(0.0, float(ev.gain_magnitude)) for ev in evidence_list])
    alphas = np.array([complex(ev.genie_alpha) for ev in evidence_list])
    a_re = np.ascontiguousarray(alphas.real)
    a_im = np.ascontiguousarray(alphas.imag)

    # beam state, kept in lexicographic prefix order
    spines = np.zeros(1, dtype=np.uint64)
    corr_re = np.zeros((1, P))
    corr_im = np.zeros((1, P))
    xen = np.zeros((1, P))
    cost0 = np.zeros(1)
    links = []

    for d in range(L):
        W = spines.shape[0]
        scores = np.empty(W * K)
        _score_children(spines, corr_re, corr_im, xen, cost0, chunk_keys,
                        pass_keys, r_re[:, d], r_im[:, d], gains, a_re, a_im,
                        genie, cmask, table_re, table_im, scores)
        sel = _select_beam(scores, params.B) if d < L - 1 else _select_beam(scores, 1)
        parent = (sel // K).astype(np.int64)
        chunk = (sel % K).astype(np.int64)
        links.append(chunk if d == 0 else (parent, chunk))

        n_sel = sel.shape[0]
        new_spines = np.empty(n_sel, dtype=np.uint64)
        new_corr_re = np.empty((n_sel, P))
        new_corr_im = np.empty((n_sel, P))
        new_xen = np.empty((n_sel, P))
        new_cost = np.empty(n_sel)
        _rebuild_selected(spines, corr_re, corr_im, xen, cost0, parent, chunk,
                          chunk_keys, pass_keys, r_re[:, d], r_im[:, d],
                          a_re, a_im, genie, cmask, table_re, table_im,
                          new_spines, new_corr_re, new_corr_im, new_xen, new_cost)
        spines, corr_re, corr_im, xen, cost0 = (
            new_spines, new_corr_re, new_corr_im, new_xen, new_cost)
        if d == L - 1:
            final_score = scores[sel[0]]

    # backtrack the single surviving leaf
    chunks = np.empty(L, dtype=np.int64)
    idx = 0
    for d in range(L - 1, -1, -1):
        if d == 0:
            chunks[0] = links[0][idx]
        else:
            parent, chunk = links[d]
            chunks[d] = chunk[idx]
            idx = parent[idx]
    bits = _chunks_to_bits(chunks, params.k)

    if not genie:
        # ranking dropped the constant sum |r|^2 prefix; restore it so the
        # reported cost is the actual phase-marginalized Euclidean distance
        final_score += float(np.sum(np.abs(r) ** 2))
    phases = np.angle(corr_re[0] + 1j * corr_im[0])
    return DecodeResult(
        message_bits=bits,
        success=spinal.crc_check(bits, params) if params.n_total > spinal.CRC_BITS else False,
        phases=phases,
        cost=float(final_score),
    )


def _chunks_to_bits(chunks: np.ndarray, k: int) -> np.ndarray:
    bits = np.empty(chunks.size * k, dtype=np.uint8)
    for i, ch in enumerate(chunks):
        for j in range(k):
            bits[i * k + j] = (int(ch) >> (k - 1 - j)) & 1
    return bits


# ---------------------------------------------------------------------------
# Reference (scalar) candidate path, used by tests and small-scale analysis
# ---------------------------------------------------------------------------

@dataclass
class CandidatePath:
    """Explicit decode hypothesis: chunk prefix plus its running terms."""

    params: SpinalParams
    chunks: tuple = ()
    spine: int = 0

    @property
    def depth(self) -> int:
        return len(self.chunks)

    def child(self, chunk: int) -> "CandidatePath":
        return CandidatePath(self.params, self.chunks + (chunk,),
                             spine_step(self.spine, chunk))

    def symbols(self, pass_index: int) -> np.ndarray:
        """Hypothesized symbols of this prefix for one pass."""
        out = np.empty(self.depth, dtype=np.complex128)
        s = 0
        for i, ch in enumerate(self.chunks):
            s = spine_step(s, ch)
            out[i] = spinal.pass_symbol(s, pass_index, self.params.c)
        return out


def slot_cost(path: CandidatePath, evidence: SlotEvidence, depth: int) -> float:
    """One slot's cost contribution for a candidate prefix of given depth."""
    if depth > path.depth or depth > evidence.samples.shape[0]:
        raise ValueError("depth exceeds available symbols")
    x = path.symbols(evidence.pass_index)[:depth]
    r = np.asarray(evidence.samples[:depth], dtype=np.complex128)
    if evidence.mode == "genie":
        return float(np.sum(np.abs(r - evidence.genie_alpha * x) ** 2))
    g = max(0.0, float(evidence.gain_magnitude))
    corr = np.sum(r * np.conj(x))
    return float(np.sum(np.abs(r) ** 2) + g * g * np.sum(np.abs(x) ** 2)
                 - 2.0 * g * np.abs(corr))


def path_cost(chunks, evidence_list: list[SlotEvidence], params: SpinalParams) -> float:
    """Total cost of a full-depth path: sum of slot_cost over all evidence."""
    path = CandidatePath(params)
    for ch in chunks:
        path = path.child(int(ch))
    return sum(slot_cost(path, ev, path.depth) for ev in evidence_list)
