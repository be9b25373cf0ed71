"""Liquid-crystal phase-shifter response model.

A biased LC cell imposes a phase shift set by the bias voltage through a
static, monotone voltage-phase curve.  After a voltage step the phase settles
exponentially: fast when the electric field drives the directors (rise, time
constant ``tau_plus``), slow when only elastic relaxation acts (decay,
``tau_minus``).  Reconfiguration between arbitrary phase pairs is accelerated
by over/undershoot: drive the cell toward an extreme state (max drive while
rising, zero drive while falling) and release to the holding voltage at the
instant the trajectory crosses the desired phase, which it then holds exactly.

Phases are clamped to ``[phase_clamp_eps, omega_max - phase_clamp_eps]`` so
release times stay finite: a decay toward the fully relaxed state (phase 0)
reaches any positive phase in finite time, but would take forever to reach 0
itself.
"""

from dataclasses import dataclass, field

import numpy as np

from .units import SPEED_OF_LIGHT

TWO_PI = 2.0 * np.pi


def _default_voltage_curve(omega_max):
    # Placeholder breakpoints for a nematic cell: threshold ~1 V, knee, ~10 V
    # saturation.  Real curves are device-specific and supplied via config.
    return ((1.0, 0.0), (3.0, 0.7 * omega_max), (10.0, omega_max))


@dataclass(frozen=True)
class LcParams:
    """Static curve and switching time constants of one LC unit cell."""

    tau_plus: float = 0.005     # s, rise (field-driven)
    tau_minus: float = 0.024    # s, decay (elastic relaxation)
    omega_max: float = TWO_PI   # rad, full phase range of the cell
    phase_clamp_eps: float = 1e-3  # rad, distance kept from {0, omega_max}
    voltage_curve: tuple = None    # ((volts, rad), ...), monotone

    def __post_init__(self):
        if not (self.tau_plus > 0.0 and self.tau_minus > 0.0):
            raise ValueError("time constants must be positive")
        if not self.tau_minus > self.tau_plus:
            raise ValueError("decay must be slower than rise (tau_minus > tau_plus)")
        if not self.omega_max > 0.0:
            raise ValueError("omega_max must be positive")
        if not 0.0 < self.phase_clamp_eps < 0.5 * self.omega_max:
            raise ValueError("phase_clamp_eps must lie in (0, omega_max/2)")
        curve = self.voltage_curve
        if curve is None:
            curve = _default_voltage_curve(self.omega_max)
        curve = tuple((float(v), float(w)) for v, w in curve)
        volts = np.array([v for v, _ in curve])
        phases = np.array([w for _, w in curve])
        if len(curve) < 2 or np.any(np.diff(volts) <= 0.0):
            raise ValueError("voltage_curve needs >= 2 strictly increasing voltages")
        if np.any(np.diff(phases) < 0.0):
            raise ValueError("voltage_curve phases must be nondecreasing")
        if phases[0] != 0.0 or phases[-1] != self.omega_max:
            raise ValueError("voltage_curve must start at phase 0 and end at omega_max")
        object.__setattr__(self, "voltage_curve", curve)

    @property
    def clamp_lo(self):
        return self.phase_clamp_eps

    @property
    def clamp_hi(self):
        return self.omega_max - self.phase_clamp_eps


@dataclass(frozen=True)
class TransitionSchedule:
    """Per-element over/undershoot plan for one reconfiguration.

    While ``t < release_time`` the element relaxes from ``start_phase`` toward
    ``forcing_target`` (omega_max when rising, 0 when falling); at the release
    instant it crosses ``hold_phase`` exactly and holds it afterwards.
    """

    direction: np.ndarray       # +1 rising (includes no-move), -1 falling
    forcing_target: np.ndarray  # rad, drive endpoint before release
    release_time: np.ndarray    # s
    hold_phase: np.ndarray      # rad, desired phase, held after release
    start_phase: np.ndarray     # rad
    clamped: np.ndarray = field(default=None)  # bool mask, inputs that were clamped

    @property
    def max_release_time(self):
        return float(np.max(self.release_time)) if self.release_time.size else 0.0


def max_phase_from_physics(cell_thickness_m, carrier_freq_hz, n_parallel, n_perp):
    """Maximum one-pass phase swing 2*pi*l*(n_par - n_perp)*f/c of a cell."""
    if cell_thickness_m <= 0.0 or carrier_freq_hz <= 0.0:
        raise ValueError("thickness and frequency must be positive")
    if n_parallel < n_perp or n_perp <= 0.0:
        raise ValueError("need n_parallel >= n_perp > 0")
    return TWO_PI * cell_thickness_m * (n_parallel - n_perp) * carrier_freq_hz / SPEED_OF_LIGHT


def _curve_arrays(params):
    pts = np.asarray(params.voltage_curve, dtype=float)
    return pts[:, 0], pts[:, 1]


def phase_from_voltage(params, volts):
    """Static phase for a bias voltage; saturates outside the curve ends."""
    v_pts, w_pts = _curve_arrays(params)
    out = np.interp(volts, v_pts, w_pts)
    return float(out) if np.isscalar(volts) else out


def voltage_from_phase(params, omega):
    """Inverse of the static curve (exact on strictly increasing segments)."""
    om = np.asarray(omega, dtype=float)
    if np.any(om < 0.0) or np.any(om > params.omega_max):
        raise ValueError("phase outside [0, omega_max]")
    v_pts, w_pts = _curve_arrays(params)
    out = np.interp(om, w_pts, v_pts)
    return float(out) if np.isscalar(omega) else out


def transition_phase(params, t, omega_start, omega_target):
    """Phase at time t after stepping the bias from omega_start's to omega_target's.

    Exponential settling toward the commanded phase; the time constant is
    tau_plus when rising (omega_target >= omega_start), tau_minus when falling.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0.0):
        raise ValueError("t must be >= 0")
    for w in (omega_start, omega_target):
        if not 0.0 <= w <= params.omega_max:
            raise ValueError("phases must lie in [0, omega_max]")
    tau = params.tau_plus if omega_target >= omega_start else params.tau_minus
    out = omega_target + (omega_start - omega_target) * np.exp(-t / tau)
    return float(out) if out.ndim == 0 else out


def plan_switch(params, omega_start, omega_desired):
    """Over/undershoot schedule taking each element from start to desired phase.

    Rising elements (desired >= start) are driven toward omega_max and released
    after ``tau_plus * ln((omega_max - w0)/(omega_max - wd))``; falling ones
    relax toward 0 and are released after ``tau_minus * ln(w0/wd)``.  Desired
    and start phases are clamped into [eps, omega_max - eps] (mask recorded in
    the schedule) so both logs stay finite.
    """
    w0 = np.atleast_1d(np.asarray(omega_start, dtype=float)).copy()
    wd = np.atleast_1d(np.asarray(omega_desired, dtype=float)).copy()
    if w0.shape != wd.shape or w0.ndim != 1:
        raise ValueError("start/desired must be 1-D vectors of equal length")
    if not (np.all(np.isfinite(w0)) and np.all(np.isfinite(wd))):
        raise ValueError("phases must be finite")
    if np.any(w0 < 0.0) or np.any(w0 > params.omega_max) \
            or np.any(wd < 0.0) or np.any(wd > params.omega_max):
        raise ValueError("phases must lie in [0, omega_max]")

    lo, hi = params.clamp_lo, params.clamp_hi
    clamped = (w0 < lo) | (w0 > hi) | (wd < lo) | (wd > hi)
    w0 = np.clip(w0, lo, hi)
    wd = np.clip(wd, lo, hi)

    rising = wd >= w0
    direction = np.where(rising, 1, -1).astype(np.int8)
    forcing = np.where(rising, params.omega_max, 0.0)
    t_rel = np.empty_like(w0)
    t_rel[rising] = params.tau_plus * np.log(
        (params.omega_max - w0[rising]) / (params.omega_max - wd[rising]))
    t_rel[~rising] = params.tau_minus * np.log(w0[~rising] / wd[~rising])
    return TransitionSchedule(
        direction=direction,
        forcing_target=forcing,
        release_time=t_rel,
        hold_phase=wd,
        start_phase=w0,
        clamped=clamped,
    )


def switched_phase_at(schedule, params, t):
    """Element phases at time(s) t >= 0 under a TransitionSchedule.

    Scalar t gives an (N,) vector; an array of shape (T,) gives (T, N).
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0.0):
        raise ValueError("t must be >= 0")
    tq = t[..., np.newaxis] if t.ndim else t
    tau = np.where(schedule.direction > 0, params.tau_plus, params.tau_minus)
    en_route = schedule.forcing_target \
        + (schedule.start_phase - schedule.forcing_target) * np.exp(-tq / tau)
    return np.where(tq < schedule.release_time, en_route, schedule.hold_phase)
