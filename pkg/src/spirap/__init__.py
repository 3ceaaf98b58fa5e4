"""Link-level simulator for an uplink random-access protocol that resolves
collisions by successive interference cancellation over a rateless spinal
code."""

from .bounds import BoundInputs, mud_bound, spirap_bound, tdma_bound
from .channel import ChannelConfig, SlotChannel, gen_fading, superpose
from .decoder import (CandidatePath, DecodeResult, SlotEvidence, bubble_decode,
                      path_cost, slot_cost)
from .harness import (PRESETS, ResultRow, Scenario, emit_results, preset,
                      run_scenario)
from .protocol import (DetectorConfig, EstimatorMode, RunMetrics, SicEngine,
                       StreamTracker, TrafficConfig, calibrate_threshold,
                       detect_activity, estimate_gain_magnitude,
                       generate_traffic, ls_gain_refine, rescan_start,
                       run_tdma_baseline, simulate_run, subtract_stream)
from .spinal import (Codeword, Pass, SpinalParams, crc_attach, crc_check,
                     encode_spine, generate_pass, map_symbol)

__version__ = "0.1.0"
