"""Transition-aware phase-shift design for liquid-crystal RIS.

Deterministic simulator and optimizer for TDMA downlinks assisted by a
reconfigurable intelligent surface built from slow liquid-crystal cells:
models the LC switching dynamics, the Rician geometry channels, the
rank-one SNR form, the transition-cost phase optimizer, and the effective
rate of the switching TDMA cycle.
"""

__version__ = "0.1.0"

from .lc_dynamics import (  # noqa: F401
    LcParams,
    TransitionSchedule,
    max_phase_from_physics,
    phase_from_voltage,
    plan_switch,
    switched_phase_at,
    transition_phase,
    voltage_from_phase,
)
