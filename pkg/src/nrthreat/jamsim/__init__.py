"""Link-level jamming simulation: QPSK, polar SC decoding, sync-signal detection."""

from .channel import JammerKind, JammerSpec, awgn_and_jam, effective_sinr_db, jam_mask
from .link import (
    LinkConfig,
    SweepPoint,
    crossing_db,
    dos_threshold,
    failure_curve,
    simulate_ber,
    simulate_bler,
    simulate_pss_detection,
    simulate_sss_detection,
    sweep_range,
    threshold_from_curve,
)
from .modem import qpsk_hard, qpsk_llr, qpsk_modulate, qpsk_theoretical_ber
from .polar import PolarCode, bhattacharyya_frozen_set, polar_decode_sc, polar_encode

__all__ = [
    "JammerKind", "JammerSpec", "awgn_and_jam", "effective_sinr_db", "jam_mask",
    "LinkConfig", "SweepPoint", "crossing_db", "dos_threshold", "failure_curve",
    "simulate_ber", "simulate_bler", "simulate_pss_detection", "simulate_sss_detection",
    "sweep_range", "threshold_from_curve",
    "qpsk_hard", "qpsk_llr", "qpsk_modulate", "qpsk_theoretical_ber",
    "PolarCode", "bhattacharyya_frozen_set", "polar_decode_sc", "polar_encode",
]
