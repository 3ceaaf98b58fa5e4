"""Receiver engine: activity detection, stream tracking, SIC decode loop.

The receiver never sees headers.  It watches per-slot sample variance against
a calibrated threshold, anchors a stream hypothesis at the first crossing,
and from then on tries to decode the residual from the anchor slot through
the current slot.  On a CRC-verified decode it regenerates the stream's
symbols, least-squares fits a complex gain per slot, subtracts, and re-scans
the cleaned residual for the next stream's start.  Transmit side: every idle
user starts a packet per slot with probability gamma and then sends one pass
per slot until acknowledged or timed out.

Symbol bits are keyed by the absolute slot counter shared through slot
synchronization, so a mis-anchored start costs only wasted evidence slots
(their estimated gain is near zero, which drops them out of the decode
ranking) rather than a misaligned hypothesis.
"""

from collections import Counter
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np
from scipy import stats

from . import spinal as sp
from .channel import ChannelConfig, SlotChannel
from .decoder import SlotEvidence, bubble_decode
from .spinal import SpinalParams


class EstimatorMode(Enum):
    GENIE = "genie"            # true complex gain per slot
    PHASE_ONLY = "phase_only"  # true magnitude, decode-side phase estimate
    FULL = "full"              # variance-based magnitude + phase estimate


@dataclass
class DetectorConfig:
    start_threshold: float     # power offset above N0, linear
    no_signal_th: int = 2      # quiet slots tolerated before clearing
    target_fa: float = 0.01

    def __post_init__(self):
        if self.start_threshold <= 0:
            raise ValueError("start_threshold must be > 0")
        if self.no_signal_th < 1:
            raise ValueError("no_signal_th must be >= 1")


@dataclass
class TrafficConfig:
    gamma: float = 1.0
    num_users: int = 1
    max_passes: int = 32
    retransmit_on_timeout: bool = False

    def __post_init__(self):
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError("gamma must be in [0, 1]")


@dataclass
class StreamTracker:
    start_timeslot: int
    tracker_id: int
    decoded: bool = False
    attempts_this_slot: int = 0

    def passes_accumulated(self, slot: int) -> int:
        return slot - self.start_timeslot + 1


@dataclass
class RunMetrics:
    slots: int
    m: int
    delivered_bits: int
    per_user_bits: list
    delivered_packets: int
    lost_packets: int
    passes_hist: Counter
    delivered_bits_by_slot: np.ndarray
    events: list | None = None
    packets: list = field(default_factory=list)  # (user, start, end, delivered)

    @property
    def aggregate_rate(self) -> float:
        return self.delivered_bits / (self.slots * self.m) if self.slots else 0.0

    @property
    def per_user_rate(self) -> list:
        return [b / (self.slots * self.m) for b in self.per_user_bits]

    @property
    def loss_rate(self) -> float:
        total = self.delivered_packets + self.lost_packets
        return self.lost_packets / total if total else 0.0

    @property
    def mean_passes(self) -> float:
        n = sum(self.passes_hist.values())
        return (sum(p * c for p, c in self.passes_hist.items()) / n) if n else 0.0


# ---------------------------------------------------------------------------
# Detection and estimation primitives
# ---------------------------------------------------------------------------

def calibrate_threshold(m: int, n0: float, target_fa: float) -> float:
    """Offset T with P(var of m noise-only samples > N0 + T) = target_fa.

    The mean-removed biased sample variance of m complex Gaussians is
    N0 * chi2(2m-2) / (2m), so T comes from the chi-square quantile.
    """
    if m < 2:
        raise ValueError("need m >= 2 samples")
    if not 0.0 < target_fa <= 0.5:
        raise ValueError("target_fa must be in (0, 0.5]")
    q = stats.chi2.ppf(1.0 - target_fa, 2 * m - 2)
    return n0 * (q / (2 * m) - 1.0)


def detect_activity(samples: np.ndarray, n0: float, start_threshold: float) -> bool:
    """Energy detector on one slot: sample variance above N0 + threshold."""
    return float(np.var(samples)) > n0 + start_threshold


def estimate_gain_magnitude(samples: np.ndarray, n0: float) -> float:
    """Blind magnitude estimate sqrt(max(0, var(r) - N0)); unit symbol energy."""
    return float(np.sqrt(max(0.0, float(np.var(samples)) - n0)))


def ls_gain_refine(symbols_by_slot: list, observations_by_slot: list) -> np.ndarray:
    """Per-slot least-squares complex gain fit after a successful decode."""
    gains = np.empty(len(symbols_by_slot), dtype=np.complex128)
    for i, (x, r) in enumerate(zip(symbols_by_slot, observations_by_slot)):
        en = float(np.sum(np.abs(x) ** 2))
        if en == 0.0:
            raise ValueError("all-zero symbol slot has no least-squares fit")
        gains[i] = np.sum(np.conj(x) * r) / en
    return gains


def subtract_stream(residuals: dict, slots: list, gains: np.ndarray,
                    passes: list) -> None:
    """residual_i -= gain_i * x_i over the given slot range, in place."""
    if not (len(slots) == len(gains) == len(passes)):
        raise ValueError("slot range, gains and passes must align")
    for t, g, x in zip(slots, gains, passes):
        residuals[t] = residuals[t] - g * x


def rescan_start(residuals: dict, from_slot: int, to_slot: int, n0: float,
                 start_threshold: float):
    """First slot in [from_slot, to_slot] whose residual crosses the threshold."""
    for t in range(from_slot, to_slot + 1):
        if t in residuals and detect_activity(residuals[t], n0, start_threshold):
            return t
    return None


def generate_traffic(cfg: TrafficConfig, idle: np.ndarray,
                     rng: np.random.Generator) -> np.ndarray:
    """Per-user start decisions for one slot: idle users fire w.p. gamma."""
    draws = rng.random(cfg.num_users) < cfg.gamma
    return np.asarray(idle, dtype=bool) & draws


# ---------------------------------------------------------------------------
# The receiver engine
# ---------------------------------------------------------------------------

@dataclass
class GenieStream:
    """Ground-truth view of one in-flight transmission (ablation modes)."""

    user: int
    start_slot: int
    alphas: np.ndarray   # full per-slot gain row for this user


@dataclass
class DecodedStream:
    message_bits: np.ndarray
    start_slot: int
    slot: int
    genie_user: int | None = None


class SicEngine:
    """Sequential decode-and-subtract receiver over a growing residual buffer."""

    def __init__(self, params: SpinalParams, n0: float, detector: DetectorConfig,
                 mode: EstimatorMode = EstimatorMode.FULL, max_passes: int = 32,
                 capacity_gate: bool = True, genie_windows: bool | None = None,
                 collect_events: bool = False):
        self.params = params
        self.n0 = n0
        self.detector = detector
        self.mode = mode
        self.max_passes = max_passes
        self.capacity_gate = capacity_gate
        # ablation modes know the true stream windows; FULL can opt in for
        # scheduled (known-start) operation
        self.genie_windows = (mode != EstimatorMode.FULL
                              if genie_windows is None else genie_windows)
        self.residuals: dict[int, np.ndarray] = {}
        self.tracker: StreamTracker | None = None
        self.no_signal_cnt = 0
        self._next_tracker_id = 0
        self.events: list | None = [] if collect_events else None

    # -- bookkeeping helpers ------------------------------------------------

    def _log(self, slot: int, kind: str, user: int = -1, tracker: int = -1):
        if self.events is not None:
            self.events.append((slot, kind, user, tracker))

    def _new_tracker(self, slot: int) -> StreamTracker:
        t = StreamTracker(start_timeslot=slot, tracker_id=self._next_tracker_id)
        self._next_tracker_id += 1
        return t

    def _trim_buffer(self, keep_from: int):
        for t in [t for t in self.residuals if t < keep_from]:
            del self.residuals[t]

    # -- evidence construction ----------------------------------------------

    def _window_gate(self, window: list, gains: np.ndarray) -> bool:
        """Skip decode attempts that even an interference-free channel with
        these gains could not support (optimistic capacity short of n_total)."""
        if not self.capacity_gate:
            return True
        snr = (gains ** 2) / self.n0
        cap = self.params.m * float(np.sum(np.log2(1.0 + snr)))
        return cap >= self.params.n_total

    def _blind_evidence(self, start: int, slot: int):
        window = list(range(start, slot + 1))
        gains = np.array([estimate_gain_magnitude(self.residuals[t], self.n0)
                          for t in window])
        evidence = [SlotEvidence(samples=self.residuals[t], pass_index=t,
                                 mode="estimated", gain_magnitude=g)
                    for t, g in zip(window, gains)]
        return window, gains, evidence

    def _stream_evidence(self, stream: GenieStream, slot: int):
        first = max(stream.start_slot, min(self.residuals) if self.residuals else stream.start_slot)
        window = [t for t in range(first, slot + 1) if t in self.residuals]
        gains = np.abs(stream.alphas[window])
        if self.mode == EstimatorMode.GENIE:
            evidence = [SlotEvidence(samples=self.residuals[t], pass_index=t,
                                     mode="genie", genie_alpha=stream.alphas[t])
                        for t in window]
        else:
            evidence = [SlotEvidence(samples=self.residuals[t], pass_index=t,
                                     mode="estimated", gain_magnitude=g)
                        for t, g in zip(window, gains)]
        return window, gains, evidence

    # -- subtraction ---------------------------------------------------------

    def _subtract(self, bits: np.ndarray, window: list, slot: int,
                  genie_stream: GenieStream | None):
        cw = sp.encode_spine(bits, self.params)
        passes = [sp.generate_pass(cw, t, self.params).symbols for t in window]
        if genie_stream is not None and self.mode == EstimatorMode.GENIE:
            gains = genie_stream.alphas[window]
        else:
            gains = ls_gain_refine(passes, [self.residuals[t] for t in window])
        subtract_stream(self.residuals, window, gains, passes)
        self._log(slot, "SUBTRACT",
                  genie_stream.user if genie_stream else -1,
                  self.tracker.tracker_id if self.tracker else -1)

    # -- per-slot processing -------------------------------------------------

    def process_slot(self, slot: int, obs: np.ndarray,
                     genie_streams: list[GenieStream] | None = None,
                     truth_active: bool | None = None) -> list[DecodedStream]:
        self.residuals[slot] = np.array(obs, dtype=np.complex128, copy=True)

        # start flag update with no-signal hysteresis
        if detect_activity(obs, self.n0, self.detector.start_threshold):
            self.no_signal_cnt = 0
            if self.tracker is None:
                self.tracker = self._new_tracker(slot)
                kind = "FALSE_ALARM" if truth_active is False else "START"
                self._log(slot, kind, tracker=self.tracker.tracker_id)
        else:
            self.no_signal_cnt += 1
            if self.no_signal_cnt > self.detector.no_signal_th and self.tracker is not None:
                self.tracker = None
                self._trim_buffer(slot + 1)

        if self.genie_windows:
            decoded = self._process_genie(slot, genie_streams or [])
        else:
            decoded = self._process_blind(slot)
            self._trim_buffer(self.tracker.start_timeslot
                              if self.tracker else slot + 1)
        return decoded

    def _process_blind(self, slot: int) -> list[DecodedStream]:
        decoded: list[DecodedStream] = []
        attempts = 0
        hypotheses = 1
        while self.tracker is not None:
            if attempts >= min(8, hypotheses + 2):
                break
            start = self.tracker.start_timeslot
            # a hypothesis window longer than any transmission can span is
            # stale; re-anchor past it
            if slot - start + 1 > self.max_passes:
                new_start = rescan_start(self.residuals, start + 1, slot,
                                         self.n0, self.detector.start_threshold)
                self.tracker = self._new_tracker(new_start) if new_start is not None else None
                if self.tracker is None:
                    break
                continue
            window, gains, evidence = self._blind_evidence(start, slot)
            if not self._window_gate(window, gains):
                break
            attempts += 1
            self.tracker.attempts_this_slot = attempts
            result = bubble_decode(evidence, self.params)
            if not result.success:
                break
            self._log(slot, "DECODE", tracker=self.tracker.tracker_id)
            self._subtract(result.message_bits, window, slot, None)
            decoded.append(DecodedStream(result.message_bits, start, slot))
            self.tracker.decoded = True
            hypotheses += 1
            new_start = rescan_start(self.residuals, start, slot, self.n0,
                                     self.detector.start_threshold)
            self.tracker = self._new_tracker(new_start) if new_start is not None else None
        return decoded

    def _process_genie(self, slot: int,
                       streams: list[GenieStream]) -> list[DecodedStream]:
        decoded: list[DecodedStream] = []
        in_flight = list(streams)
        pending = sorted(streams, key=lambda s: -abs(s.alphas[slot]) ** 2)
        attempts = 0
        while pending:
            if attempts >= min(8, len(streams) + 2):
                break
            stream = pending[0]
            window, gains, evidence = self._stream_evidence(stream, slot)
            if not window or not self._window_gate(window, gains):
                pending.pop(0)   # not decodable yet; revisit next slot
                continue
            attempts += 1
            result = bubble_decode(evidence, self.params)
            if not result.success:
                break
            self._log(slot, "DECODE", user=stream.user)
            self._subtract(result.message_bits, window, slot, stream)
            decoded.append(DecodedStream(result.message_bits, stream.start_slot,
                                         slot, genie_user=stream.user))
            pending.pop(0)
            in_flight.remove(stream)
            pending.sort(key=lambda s: -abs(s.alphas[slot]) ** 2)
        if in_flight:
            self._trim_buffer(min(s.start_slot for s in in_flight))
        else:
            self._trim_buffer(slot + 1)
        return decoded


# ---------------------------------------------------------------------------
# Closed-loop simulation
# ---------------------------------------------------------------------------

@dataclass
class _UserState:
    idle: bool = True
    start_slot: int = -1
    message_bits: np.ndarray | None = None
    codeword: sp.Codeword | None = None
    pending_retransmit: np.ndarray | None = None


def simulate_run(params: SpinalParams, channel_cfg: ChannelConfig,
                 traffic: TrafficConfig, mode: EstimatorMode, num_slots: int,
                 seed: int, detector: DetectorConfig | None = None,
                 genie_start: bool = False, capacity_gate: bool = True,
                 collect_events: bool = False) -> RunMetrics:
    """Run the full transmit/channel/receive loop for num_slots slots."""
    if channel_cfg.num_users != traffic.num_users:
        raise ValueError("channel powers and traffic user count must agree")
    if detector is None:
        detector = DetectorConfig(
            start_threshold=calibrate_threshold(params.m, channel_cfg.N0, 0.01))
    channel = SlotChannel(config=channel_cfg, num_slots=num_slots, m=params.m)
    engine = SicEngine(params, channel_cfg.N0, detector, mode=mode,
                       max_passes=traffic.max_passes, capacity_gate=capacity_gate,
                       genie_windows=(genie_start or mode != EstimatorMode.FULL),
                       collect_events=collect_events)
    traffic_rng = np.random.default_rng([seed & 0xFFFFFFFF, 0x7AFF])
    payload_rng = np.random.default_rng([seed & 0xFFFFFFFF, 0xBA10])

    users = [_UserState() for _ in range(traffic.num_users)]
    delivered_bits = 0
    per_user_bits = [0] * traffic.num_users
    delivered_packets = 0
    lost_packets = 0
    passes_hist: Counter = Counter()
    bits_by_slot = np.zeros(num_slots, dtype=np.int64)
    packets: list = []

    for slot in range(num_slots):
        idle = np.array([u.idle for u in users])
        starts = generate_traffic(traffic, idle, traffic_rng)
        for n, u in enumerate(users):
            if starts[n]:
                if u.pending_retransmit is not None:
                    u.message_bits = u.pending_retransmit
                    u.pending_retransmit = None
                else:
                    u.message_bits = sp.crc_attach(
                        sp.random_payload(params, payload_rng), params)
                u.codeword = sp.encode_spine(u.message_bits, params)
                u.start_slot = slot
                u.idle = False

        transmissions = [(n, sp.generate_pass(u.codeword, slot, params).symbols)
                         for n, u in enumerate(users) if not u.idle]
        obs = channel.observe(slot, transmissions)

        genie_streams = None
        if engine.genie_windows:
            genie_streams = [GenieStream(user=n, start_slot=users[n].start_slot,
                                         alphas=channel.alphas[n])
                             for n, _ in transmissions]
        decoded = engine.process_slot(
            slot, obs, genie_streams=genie_streams,
            truth_active=bool(transmissions))

        for d in decoded:
            for n, u in enumerate(users):
                if not u.idle and np.array_equal(u.message_bits, d.message_bits):
                    u.idle = True
                    delivered_bits += params.payload_bits
                    per_user_bits[n] += params.payload_bits
                    delivered_packets += 1
                    passes = slot - u.start_slot + 1
                    passes_hist[passes] += 1
                    bits_by_slot[slot] += params.payload_bits
                    packets.append((n, u.start_slot, slot, True))
                    if engine.events is not None:
                        engine.events.append((slot, "ACK", n, -1))
                    break

        for n, u in enumerate(users):
            if not u.idle and slot - u.start_slot + 1 >= traffic.max_passes:
                u.idle = True
                lost_packets += 1
                packets.append((n, u.start_slot, slot, False))
                if traffic.retransmit_on_timeout:
                    u.pending_retransmit = u.message_bits
                if engine.events is not None:
                    engine.events.append((slot, "TIMEOUT", n, -1))

    return RunMetrics(slots=num_slots, m=params.m, delivered_bits=delivered_bits,
                      per_user_bits=per_user_bits,
                      delivered_packets=delivered_packets,
                      lost_packets=lost_packets, passes_hist=passes_hist,
                      delivered_bits_by_slot=bits_by_slot,
                      events=engine.events, packets=packets)


def run_tdma_baseline(params: SpinalParams, channel_cfg: ChannelConfig,
                      mode: EstimatorMode, num_slots: int, seed: int,
                      gamma: float = 1.0, max_passes: int = 32,
                      capacity_gate: bool = True) -> RunMetrics:
    """Independent single-user reference: each user gets the channel alone.

    Scheduled access means the receiver knows every start slot, so there is
    no detection machinery at all: accumulate passes, attempt a decode after
    each one, acknowledge on CRC success.  The aggregate rate over all users
    equals the mean of the individual rates (each user owns 1/N of the time
    at its own power, and rates are per-symbol).
    """
    delivered_bits = 0
    per_user_bits = []
    delivered_packets = 0
    lost_packets = 0
    passes_hist: Counter = Counter()
    bits_by_slot = np.zeros(num_slots, dtype=np.int64)

    for user in range(channel_cfg.num_users):
        cfg1 = replace(channel_cfg, powers=(channel_cfg.powers[user],),
                       seed=channel_cfg.seed + 7919 * user)
        channel = SlotChannel(config=cfg1, num_slots=num_slots, m=params.m)
        payload_rng = np.random.default_rng([seed & 0xFFFFFFFF, 0x7D3A, user])
        traffic_rng = np.random.default_rng([seed & 0xFFFFFFFF, 0x7D3B, user])
        n0 = channel_cfg.N0
        user_bits = 0

        state = _UserState()
        evidence: list[SlotEvidence] = []
        for slot in range(num_slots):
            if state.idle:
                if traffic_rng.random() < gamma:
                    state.message_bits = sp.crc_attach(
                        sp.random_payload(params, payload_rng), params)
                    state.codeword = sp.encode_spine(state.message_bits, params)
                    state.start_slot = slot
                    state.idle = False
                    evidence = []
                else:
                    channel.observe(slot, [])  # keep the noise stream aligned
                    continue
            x = sp.generate_pass(state.codeword, slot, params).symbols
            r = channel.observe(slot, [(0, x)])
            alpha = channel.alphas[0, slot]
            if mode == EstimatorMode.GENIE:
                evidence.append(SlotEvidence(samples=r, pass_index=slot,
                                             mode="genie", genie_alpha=alpha))
                gains = None
            elif mode == EstimatorMode.PHASE_ONLY:
                evidence.append(SlotEvidence(samples=r, pass_index=slot,
                                             mode="estimated",
                                             gain_magnitude=abs(alpha)))
            else:
                evidence.append(SlotEvidence(samples=r, pass_index=slot,
                                             mode="estimated",
                                             gain_magnitude=estimate_gain_magnitude(r, n0)))

            passes = slot - state.start_slot + 1
            gmags = np.array([ev.gain_magnitude if ev.mode == "estimated"
                              else abs(ev.genie_alpha) for ev in evidence])
            cap = params.m * float(np.sum(np.log2(1.0 + gmags ** 2 / n0)))
            if not capacity_gate or cap >= params.n_total:
                result = bubble_decode(evidence, params)
                if result.success and np.array_equal(result.message_bits,
                                                     state.message_bits):
                    user_bits += params.payload_bits
                    delivered_packets += 1
                    passes_hist[passes] += 1
                    bits_by_slot[slot] += params.payload_bits
                    state.idle = True
                    continue
            if passes >= max_passes:
                lost_packets += 1
                state.idle = True

        per_user_bits.append(user_bits)
        delivered_bits += user_bits

    return RunMetrics(slots=num_slots * channel_cfg.num_users, m=params.m,
                      delivered_bits=delivered_bits, per_user_bits=per_user_bits,
                      delivered_packets=delivered_packets,
                      lost_packets=lost_packets, passes_hist=passes_hist,
                      delivered_bits_by_slot=bits_by_slot, events=None)
