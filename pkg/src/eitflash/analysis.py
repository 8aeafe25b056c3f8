"""Derived quantities: flash amplitudes, fringe scans and maps, fits, delays.

Every ``I(0+)`` here is the transmitted intensity a hundredth of a flash time
after a falling edge (see :func:`eitflash.propagate.zero_plus`).
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import (
    DomainError,
    EitflashError,
    FitError,
    NoMaximumError,
    ThresholdError,
)
from .medium import MediumParams, delta_pi, flash_time_scale, group_delay
from .propagate import (
    FieldTrace,
    periodic_amplitude,
    sample_trace,
    steady_state,
    transmit_sample,
    zero_plus,
)
from .pulse import PulseKind, PulseSpec

__all__ = [
    "FringeScan",
    "FringeMap",
    "ModulationMap",
    "FlashMetrics",
    "SweepError",
    "schedule_sweep",
    "default_workers",
    "flash_amplitude",
    "fringe_scan",
    "first_fringe_maximum",
    "first_local_maximum",
    "fringe_metrics",
    "fringe_map_vs_b0",
    "flash_decay_trace",
    "fit_flash_decay",
    "measure_group_delay",
    "modulation_map",
    "contrast_curve",
    "fast_regime_closed_form",
    "doppler_fringe_scan",
]

I0PLUS_CEILING = 4.01


# -- sweeps -----------------------------------------------------------------


class SweepError(EitflashError, RuntimeError):
    """A sweep task failed; ``index`` is its position in the task list."""

    def __init__(self, index, cause):
        super().__init__(f"sweep task {index} failed: {cause!r}")
        self.index = index
        self.cause = cause


def default_workers() -> int:
    """Worker count from ``EITFLASH_WORKERS`` (default 1)."""
    raw = os.environ.get("EITFLASH_WORKERS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise DomainError(f"EITFLASH_WORKERS must be an integer, got {raw!r}") from None
    if n < 1:
        raise DomainError("EITFLASH_WORKERS must be >= 1")
    return n


def _run_task(item):
    index, func, args = item
    try:
        return index, func(*args), None
    except Exception as exc:  # reported back to the parent with its index
        return index, None, exc


def schedule_sweep(func: Callable, arg_list: Sequence[tuple], workers: Optional[int] = None) -> list:
    """Evaluate ``func(*args)`` for every entry of ``arg_list``.

    Results come back in input order whatever the worker count, and each task
    runs the same code path, so the output does not depend on ``workers``.
    ``func`` must be picklable (a module-level function) when ``workers > 1``.

    Raises
    ------
    SweepError
        For the first failing task, carrying its index.
    """
    workers = default_workers() if workers is None else int(workers)
    if workers < 1:
        raise DomainError("workers must be >= 1")
    items = [(i, func, tuple(args)) for i, args in enumerate(arg_list)]
    if workers == 1 or len(items) < 2:
        outcomes = map(_run_task, items)
        results = list(outcomes)
    else:
        chunk = max(1, len(items) // (4 * workers))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_task, items, chunksize=chunk))
    out = []
    for index, value, exc in results:
        if exc is not None:
            raise SweepError(index, exc) from exc
        out.append(value)
    return out


# -- result types -----------------------------------------------------------


@dataclass(frozen=True)
class FringeScan:
    """``I(0+)`` against probe detuning for one medium and pulse."""

    detunings: np.ndarray
    i0plus: np.ndarray
    medium: MediumParams
    pulse: PulseSpec

    def __post_init__(self):
        d = np.array(self.detunings, dtype=float)
        v = np.array(self.i0plus, dtype=float)
        if d.shape != v.shape or d.ndim != 1:
            raise DomainError("detunings and i0plus must be 1-D arrays of equal length")
        if np.any(np.diff(d) <= 0):
            raise DomainError("detunings must be strictly increasing")
        for a in (d, v):
            a.setflags(write=False)
        object.__setattr__(self, "detunings", d)
        object.__setattr__(self, "i0plus", v)

    @property
    def normalized(self) -> np.ndarray:
        """Detunings in units of ``delta_pi`` (three-level media only)."""
        return self.detunings / delta_pi(self.medium)


@dataclass(frozen=True)
class FringeMap:
    """Stack of fringe scans sharing one detuning grid, one row per ``b0``."""

    b0: np.ndarray
    detunings: np.ndarray
    values: np.ndarray
    rows: Tuple[FringeScan, ...] = field(repr=False, default=())


@dataclass(frozen=True)
class ModulationMap:
    """``I(0+)`` under periodic square drive; rows are periods."""

    periods: np.ndarray
    detunings: np.ndarray
    values: np.ndarray
    medium: MediumParams

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != (len(self.periods), len(self.detunings)):
            raise DomainError("modulation map must be rectangular and complete")
        object.__setattr__(self, "values", values)

    def row(self, i) -> FringeScan:
        pulse = PulseSpec(PulseKind.PERIODIC_SQUARE, period=float(self.periods[i]))
        return FringeScan(self.detunings, self.values[i], self.medium, pulse)


@dataclass(frozen=True)
class FlashMetrics:
    """Summary of a fringe scan.

    ``contrast = (i_max - i_min) / (i_max + i_min)`` with ``i_max`` the first
    local maximum for increasing ``|delta_p|`` and ``i_min`` the value at
    resonance.  A scan without a local maximum has ``i_max = i_min`` and zero
    contrast.
    """

    i0plus: float
    i_max: float
    i_min: float
    contrast: float
    delta_max: float = math.nan
    tau_f_fit: float = math.nan

    @property
    def prominence(self) -> float:
        return self.i_max - self.i_min


# -- flash amplitude ----------------------------------------------------------


def flash_amplitude(medium: MediumParams, pulse: PulseSpec, rtol: float = 1e-8) -> float:
    """``I(0+)`` at the (last) falling edge of ``pulse``."""
    if not pulse.has_falling_edge:
        raise DomainError("flash amplitude needs a pulse with a falling edge")
    t = zero_plus(pulse, medium)
    if pulse.kind is PulseKind.PERIODIC_SQUARE:
        value = periodic_amplitude(pulse, medium, t)
    else:
        value = transmit_sample(pulse, medium, t, rtol)
    return float(abs(value) ** 2)


def _flash_task(medium, pulse, delta_p):
    return flash_amplitude(medium, pulse.with_detuning(delta_p))


def fringe_scan(
    medium: MediumParams,
    pulse: Optional[PulseSpec] = None,
    detunings: Iterable[float] = (),
    workers: Optional[int] = None,
    check_range: bool = True,
) -> FringeScan:
    """``I(0+)`` on a grid of probe detunings.

    The default pulse is a step-off, the limit of an arbitrarily long square
    pulse that has reached the steady state.
    """
    pulse = pulse or PulseSpec(PulseKind.STEP_OFF)
    grid = np.asarray(list(detunings), dtype=float)
    if grid.size < 2:
        raise DomainError("sweep counts >= 2")
    if check_range and medium.is_three_level:
        limit = 10 * delta_pi(medium) * (1 + 1e-9)
        if np.max(np.abs(grid)) > limit:
            raise DomainError("fringe scans are limited to |delta_p| <= 10 delta_pi")
    values = schedule_sweep(_flash_task, [(medium, pulse, d) for d in grid], workers)
    return FringeScan(grid, np.array(values), medium, pulse)


def first_local_maximum(values: Sequence[float], start: int = 0, rtol: float = 1e-6) -> int:
    """Index of the first interior local maximum at or after ``start``.

    Steps smaller than ``rtol`` times the largest value count as flat, so
    quadrature noise on a featureless scan does not produce a maximum.
    Plateaus count once, at their first sample.
    """
    v = np.asarray(values, dtype=float)
    floor = rtol * float(np.max(np.abs(v))) if v.size else 0.0
    for k in range(max(start, 1), len(v) - 1):
        if v[k] - v[k - 1] > floor:
            j = k
            while j + 1 < len(v) and abs(v[j + 1] - v[k]) <= floor:
                j += 1
            if j + 1 < len(v) and v[k] - v[j + 1] > floor:
                return k
    raise NoMaximumError("fringe scan has no local maximum")


def _one_sided(scan: FringeScan, sign: float):
    d, v = scan.detunings, scan.i0plus
    if sign > 0:
        keep = d >= 0
        return d[keep], v[keep]
    keep = d <= 0
    return -d[keep][::-1], v[keep][::-1]


def fringe_metrics(scan: FringeScan, sign: float = 1.0) -> FlashMetrics:
    """First maximum, resonance value and contrast on one side of resonance.

    ``sign`` selects positive (``+1``) or negative (``-1``) detunings.  If the
    grid does not contain ``delta_p = 0`` the sample closest to it is used.
    """
    d, v = _one_sided(scan, sign)
    if len(d) < 3:
        raise NoMaximumError("need at least three detunings on one side of resonance")
    i_min = float(v[0])
    try:
        k = first_local_maximum(v)
    except NoMaximumError:
        return FlashMetrics(i_min, i_min, i_min, 0.0)
    i_max = float(v[k])
    total = i_max + i_min
    contrast = (i_max - i_min) / total if total > 0 else 0.0
    return FlashMetrics(i_min, i_max, i_min, contrast, float(sign * d[k]))


def first_fringe_maximum(
    medium: MediumParams,
    pulse: Optional[PulseSpec] = None,
    step: Optional[float] = None,
    max_detuning: Optional[float] = None,
    xtol: float = 1e-4,
) -> Tuple[float, float]:
    """Locate the first fringe maximum of ``I(0+)`` for ``delta_p > 0``.

    A coarse walk in steps of ``delta_pi / 20`` brackets the first rise-then-fall;
    bounded Brent refinement (golden section with parabolic steps) then polishes
    it to ``xtol * delta_pi``.

    Returns
    -------
    delta_max, i_max : float
    """
    pulse = pulse or PulseSpec(PulseKind.STEP_OFF)
    dpi = delta_pi(medium)
    step = dpi / 20 if step is None else float(step)
    max_detuning = 10 * dpi if max_detuning is None else float(max_detuning)

    def intensity(d):
        return flash_amplitude(medium, pulse.with_detuning(d))

    xs = [0.0, step]
    ys = [intensity(0.0), intensity(step)]
    while True:
        x = xs[-1] + step
        if x > max_detuning:
            raise NoMaximumError(f"no fringe maximum below delta_p={max_detuning:g}")
        xs.append(x)
        ys.append(intensity(x))
        if ys[-2] > ys[-3] and ys[-2] > ys[-1]:
            break
    res = minimize_scalar(
        lambda d: -intensity(d),
        bounds=(xs[-3], xs[-1]),
        method="bounded",
        options={"xatol": xtol * dpi},
    )
    best = max((-res.fun, res.x), (ys[-2], xs[-2]))
    return float(best[1]), float(best[0])


def fringe_map_vs_b0(
    medium: MediumParams,
    b0_values: Iterable[float],
    detunings: Iterable[float],
    pulse: Optional[PulseSpec] = None,
    normalized: bool = False,
    workers: Optional[int] = None,
) -> FringeMap:
    """Fringe scans for several optical depths.

    With ``normalized=True`` the detuning grid is in units of ``delta_pi(b0)``
    of each row, so the rows share the first-fringe position.
    """
    b0_values = np.asarray(list(b0_values), dtype=float)
    grid = np.asarray(list(detunings), dtype=float)
    if b0_values.size < 2 or grid.size < 2:
        raise DomainError("sweep counts >= 2")
    pulse = pulse or PulseSpec(PulseKind.STEP_OFF)
    media = [medium.replace(b0=float(b)) for b in b0_values]
    tasks = []
    for m in media:
        row = grid * delta_pi(m) if normalized else grid
        tasks.extend((m, pulse, d) for d in row)
    flat = schedule_sweep(_flash_task, tasks, workers)
    values = np.array(flat).reshape(len(media), len(grid))
    rows = tuple(
        FringeScan(grid * delta_pi(m) if normalized else grid, values[i], m, pulse)
        for i, m in enumerate(media)
    )
    return FringeMap(b0_values, grid, values, rows)


# -- fits -------------------------------------------------------------------


def flash_decay_trace(medium: MediumParams, delta_p: float = 0.0, n: int = 64,
                      window: Optional[Tuple[float, float]] = None) -> FieldTrace:
    """Step-off trace sampled densely across the default decay-fit window."""
    tau_f = flash_time_scale(medium)
    lo, hi = window if window is not None else (tau_f / 10, 3 * tau_f)
    pulse = PulseSpec(PulseKind.STEP_OFF, delta_p=delta_p)
    return sample_trace(pulse, medium, lo, (hi - lo) / (n - 1), n)


def fit_flash_decay(trace: FieldTrace, window: Optional[Tuple[float, float]] = None,
                    max_residual: float = 0.5) -> float:
    """Intensity decay time from a straight-line fit of ``ln I`` after extinction.

    Parameters
    ----------
    trace : FieldTrace
        Trace covering the window after the falling edge.
    window : (float, float), optional
        Fit window relative to the falling edge; default
        ``(tau_f / 10, 3 tau_f)`` with ``tau_f = 1 / b0``.
    max_residual : float
        Largest acceptable RMS residual of ``ln I``.

    Raises
    ------
    FitError
        On too few points, a non-negative slope or a poor fit.
    """
    if trace.medium is None:
        raise FitError("trace carries no medium")
    tau_f = flash_time_scale(trace.medium)
    lo, hi = window if window is not None else (tau_f / 10, 3 * tau_f)
    edge = trace.pulse.switch_time
    t = trace.times - edge
    eps = 1e-9 * max(1.0, abs(hi))
    keep = (t >= lo - eps) & (t <= hi + eps)
    intensity = trace.intensity[keep]
    t = t[keep]
    if t.size < 3:
        raise FitError(f"only {t.size} samples inside the fit window")
    if np.any(intensity <= 0):
        raise FitError("intensity vanishes inside the fit window")
    y = np.log(intensity)
    slope, intercept = np.polyfit(t, y, 1)
    if not slope < 0:
        raise FitError(f"non-negative decay slope {slope:g}")
    rms = float(np.sqrt(np.mean((y - (slope * t + intercept)) ** 2)))
    if rms > max_residual:
        raise FitError(f"ln I residual {rms:.3g} exceeds {max_residual:g}")
    return float(-1.0 / slope)


def _crossing(t, y, level):
    """First time ``y`` reaches ``level``, by linear interpolation."""
    above = np.nonzero(y >= level)[0]
    if above.size == 0:
        return None
    j = int(above[0])
    if j == 0:
        return float(t[0])
    frac = (level - y[j - 1]) / (y[j] - y[j - 1])
    return float(t[j - 1] + frac * (t[j] - t[j - 1]))


def measure_group_delay(trace: FieldTrace, method: str = "half_amplitude") -> float:
    """Slow-light delay of the rise after probe ignition.

    Samples earlier than ``20 tau_f`` after the rising edge are ignored, which
    removes the precursor spike.

    Parameters
    ----------
    method : {"half_amplitude", "e_fold", "centroid"}
        ``half_amplitude``: first time ``|E|`` reaches half its steady value
        (``I = I_ss / 4``), the midpoint of a dispersively broadened step.
        ``e_fold``: first time ``I`` reaches ``(1 - 1/e) I_ss``.
        ``centroid``: mean time of ``dI/dt`` over the rise.

    Raises
    ------
    ThresholdError
        If the steady transmission is below 0.1 or the level is never reached.
    """
    pulse, medium = trace.pulse, trace.medium
    rise = pulse.rise_time
    if rise is None or medium is None:
        raise DomainError("group delay needs a trace with a rising edge")
    i_ss = abs(steady_state(medium, pulse.delta_p)) ** 2
    if i_ss < 0.1:
        raise ThresholdError(f"steady transmission {i_ss:.3g} below 0.1")
    t = trace.times
    end = pulse.switch_time if pulse.has_falling_edge else math.inf
    keep = (t >= rise + 20 * flash_time_scale(medium)) & (t < end)
    t, intensity = t[keep], trace.intensity[keep]
    if t.size < 2:
        raise ThresholdError("trace does not cover the rise")
    if method == "half_amplitude":
        hit = _crossing(t, intensity, 0.25 * i_ss)
    elif method == "e_fold":
        hit = _crossing(t, intensity, (1 - math.exp(-1)) * i_ss)
    elif method == "centroid":
        rate = np.clip(np.gradient(intensity, t), 0, None)
        area = np.trapezoid(rate, t)
        hit = float(np.trapezoid(rate * t, t) / area) if area > 0 else None
    else:
        raise DomainError(f"unknown delay estimator {method!r}")
    if hit is None:
        raise ThresholdError("transmission never reaches the delay threshold")
    return hit - rise


# -- periodic drive -------------------------------------------------------------


def _periodic_task(medium, period, delta_p):
    pulse = PulseSpec(PulseKind.PERIODIC_SQUARE, delta_p=delta_p, period=period)
    return flash_amplitude(medium, pulse)


def modulation_map(
    medium: MediumParams,
    periods: Iterable[float],
    detunings: Iterable[float],
    workers: Optional[int] = None,
) -> ModulationMap:
    """``I(0+)`` under periodic square modulation on a (period, detuning) grid."""
    periods = np.asarray(list(periods), dtype=float)
    grid = np.asarray(list(detunings), dtype=float)
    if periods.size < 2 or grid.size < 2:
        raise DomainError("sweep counts >= 2")
    tasks = [(medium, float(T), float(d)) for T in periods for d in grid]
    flat = schedule_sweep(_periodic_task, tasks, workers)
    return ModulationMap(periods, grid, np.array(flat).reshape(len(periods), len(grid)), medium)


def contrast_curve(mmap: ModulationMap, sign: float = 1.0):
    """Per-period first-fringe maximum and contrast.

    Returns
    -------
    i_max, contrast : ndarray

    Raises
    ------
    NoMaximumError
        If a row has no local maximum.
    """
    i_max, contrast = [], []
    for i, period in enumerate(mmap.periods):
        d, v = _one_sided(mmap.row(i), sign)
        try:
            k = first_local_maximum(v)
        except NoMaximumError:
            raise NoMaximumError(f"no fringe maximum in the row T={period:g}") from None
        top, bottom = float(v[k]), float(v[0])
        i_max.append(top)
        contrast.append((top - bottom) / (top + bottom))
    return np.array(i_max), np.array(contrast)


def fast_regime_closed_form(medium: MediumParams, delta_p: float, t, pulse: PulseSpec):
    """``|E_i(t) + (exp(i phi_EIT) - 1) / 2|**2`` with ``phi_EIT = delta_p tau_EIT``.

    Valid when the modulation period is shorter than the flash time, so every
    sideband misses the medium while the carrier sees the EIT phase.

    Raises
    ------
    DomainError
        If ``pulse.period >= tau_f``.
    """
    from .pulse import incident_amplitude

    if pulse.kind is not PulseKind.PERIODIC_SQUARE:
        raise DomainError("closed form applies to periodic_square drive")
    tau_f = flash_time_scale(medium)
    if not pulse.period < tau_f:
        raise DomainError(f"fast regime needs T < tau_f = {tau_f:g}, got T={pulse.period:g}")
    phi = delta_p * group_delay(medium)
    e = incident_amplitude(pulse, t) + 0.5 * (np.exp(1j * phi) - 1.0)
    return (np.abs(e) ** 2)[()]


# -- Doppler ------------------------------------------------------------------


def doppler_fringe_scan(
    medium: MediumParams,
    temperatures: Iterable[float],
    detunings: Iterable[float],
    pulse: Optional[PulseSpec] = None,
    workers: Optional[int] = None,
) -> List[FringeScan]:
    """One fringe scan per temperature, with Doppler-averaged response."""
    temps = [float(T) for T in temperatures]
    if not temps:
        raise DomainError("sweep counts >= 2")
    grid = np.asarray(list(detunings), dtype=float)
    pulse = pulse or PulseSpec(PulseKind.STEP_OFF)
    media = [medium.replace(temperature=T) for T in temps]
    tasks = [(m, pulse, float(d)) for m in media for d in grid]
    flat = schedule_sweep(_flash_task, tasks, workers)
    values = np.array(flat).reshape(len(media), len(grid))
    return [FringeScan(grid, values[i], m, pulse) for i, m in enumerate(media)]
