"""Synchronization metrics for oscillating expectation traces.

The working definitions: two traces are strictly synchronized when their
per-period peak amplitudes agree within amp_tol and their zero crossings
line up within phase_tol radians, for a run of consecutive periods.  The
transient time is where the first such run starts.  Traces that lock in
phase but keep unequal amplitudes (or vice versa) are reported with the
individual metrics so the caller can apply a looser notion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SyncTolerances:
    phase_tol: float = 0.05  # rad
    amp_tol: float = 0.05  # relative amplitude mismatch
    consecutive_periods: int = 5


@dataclass(frozen=True)
class SyncReport:
    transient_time: float  # s; inf when never synchronized
    phase_lag: float  # rad, post-transient
    amplitude_ratio: float  # DOF2 / DOF1 peak, post-transient
    steady_amplitudes: tuple[float, ...]
    decay_rate: float  # 1/s, envelope fit; 0 below resolution
    strict_sync: bool


def peak_envelope(trace, times) -> np.ndarray:
    """Local maxima of |trace| with three-point quadratic refinement.

    Returns an array of (t_peak, amplitude) rows.
    """
    y = np.abs(np.asarray(trace, dtype=float))
    t = np.asarray(times, dtype=float)
    if y.size < 3:
        raise ValueError("trace too short for peak detection")
    if y.max() == 0.0:
        raise ValueError("trace has no oscillation")
    idx = np.where((y[1:-1] > y[:-2]) & (y[1:-1] >= y[2:]))[0] + 1
    if idx.size == 0:
        raise ValueError("trace has no oscillation")
    peaks = np.empty((idx.size, 2))
    for row, i in enumerate(idx):
        peaks[row] = _refine_peak(y, t, i)
    return peaks


def _refine_peak(y: np.ndarray, t: np.ndarray, i: int) -> tuple[float, float]:
    ym, y0, yp = y[i - 1], y[i], y[i + 1]
    denom = ym - 2.0 * y0 + yp
    if denom >= 0.0:
        return t[i], y0
    delta = 0.5 * (ym - yp) / denom
    dt = 0.5 * (t[i + 1] - t[i - 1])
    return t[i] + delta * dt, y0 - 0.25 * (ym - yp) * delta


def upward_crossings(trace, times) -> np.ndarray:
    """Times where the trace crosses zero going up (linear interpolation)."""
    y = np.asarray(trace, dtype=float)
    t = np.asarray(times, dtype=float)
    idx = np.where((y[:-1] < 0.0) & (y[1:] >= 0.0))[0]
    return t[idx] - y[idx] * (t[idx + 1] - t[idx]) / (y[idx + 1] - y[idx])


def _circular_mean(angles: np.ndarray) -> float:
    return float(np.angle(np.mean(np.exp(1j * angles))))


def phase_lag(trace_a, trace_b, times, window=None) -> float:
    """Mean zero-crossing offset of b behind a, in radians, wrapped to (-pi, pi].

    window is an optional (t_lo, t_hi) restriction.  The period is taken
    from the spacing of a's crossings; offsets are combined as a circular
    mean so antiphase traces come out at pi rather than cancelling.
    """
    t = np.asarray(times, dtype=float)
    if window is not None:
        mask = (t >= window[0]) & (t <= window[1])
        trace_a, trace_b, t = np.asarray(trace_a)[mask], np.asarray(trace_b)[mask], t[mask]
    ca = upward_crossings(trace_a, t)
    cb = upward_crossings(trace_b, t)
    if ca.size < 2 or cb.size < 1:
        raise ValueError("not enough zero crossings in window")
    period = float(np.median(np.diff(ca)))
    offsets = np.array([cb[np.argmin(np.abs(cb - tc))] - tc for tc in ca])
    angles = 2.0 * math.pi * offsets / period
    lag = _circular_mean(angles)
    if lag <= -math.pi:
        lag += 2.0 * math.pi
    return lag


def fit_decay(envelope) -> float:
    """Exponential decay rate of an envelope, by least squares on log amplitude.

    Returns 0 when the fitted rate is below the resolution 1/(100 t_span).
    """
    env = np.asarray(envelope, dtype=float)
    if env.ndim != 2 or env.shape[0] < 5:
        raise ValueError("need at least 5 envelope points")
    t, amp = env[:, 0], env[:, 1]
    if np.any(amp <= 0.0):
        raise ValueError("envelope amplitudes must be positive")
    slope = np.polyfit(t, np.log(amp), 1)[0]
    rate = -float(slope)
    t_span = t[-1] - t[0]
    if t_span <= 0 or abs(rate) < 1.0 / (100.0 * t_span):
        return 0.0
    return rate


def _window_amplitude(y: np.ndarray, t: np.ndarray, lo: int, hi: int) -> float:
    """Peak of |y| on samples [lo, hi), refined when the max is interior."""
    seg = np.abs(y[lo:hi])
    i = int(np.argmax(seg)) + lo
    if 0 < i < y.size - 1:
        return _refine_peak(np.abs(y), t, i)[1]
    return float(np.abs(y[i]))


def sync_report(series, pair=(1, 2), tolerances: SyncTolerances | None = None) -> SyncReport:
    """Per-period synchronization metrics between two DOFs of a TimeSeries.

    Periods are windows of the series' reference period t_ref.  The
    transient time is the start of the first run of
    tolerances.consecutive_periods windows in which both the amplitude
    and phase conditions hold; if no such run exists, transient_time is
    inf and metrics are reported over the second half of the series.
    """
    tol = tolerances or SyncTolerances()
    k1, k2 = pair
    y1 = series.q[:, k1 - 1]
    y2 = series.q[:, k2 - 1]
    t = series.times
    period = series.t_ref
    if period <= 0:
        raise ValueError("series has no reference period")
    n_win = int(t[-1] / period)
    if n_win < tol.consecutive_periods:
        raise ValueError(
            f"series too short: {n_win} full periods, need {tol.consecutive_periods}"
        )

    edges = np.searchsorted(t, np.arange(n_win + 1) * period)
    amp1 = np.empty(n_win)
    amp2 = np.empty(n_win)
    for m in range(n_win):
        lo, hi = edges[m], max(edges[m + 1], edges[m] + 2)
        amp1[m] = _window_amplitude(y1, t, lo, hi)
        amp2[m] = _window_amplitude(y2, t, lo, hi)

    ca = upward_crossings(y1, t)
    cb = upward_crossings(y2, t)
    phases = np.full(n_win, np.nan)
    if ca.size and cb.size:
        offsets = np.array([cb[np.argmin(np.abs(cb - tc))] - tc for tc in ca])
        angles = 2.0 * math.pi * offsets / period
        win_of = np.minimum((ca / period).astype(int), n_win - 1)
        for m in range(n_win):
            sel = win_of == m
            if np.any(sel):
                phases[m] = _circular_mean(angles[sel])
        # a window misses a crossing when the oscillation runs slightly
        # longer than t_ref; the offset varies slowly, so borrow the
        # nearest measured one rather than breaking the run
        have = np.where(~np.isnan(phases))[0]
        if have.size:
            for m in np.where(np.isnan(phases))[0]:
                phases[m] = phases[have[np.argmin(np.abs(have - m))]]

    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(amp1 > 0, amp2 / amp1, np.inf)
    good = (np.abs(ratio - 1.0) <= tol.amp_tol) & (np.abs(phases) <= tol.phase_tol)

    start = None
    run = 0
    for m in range(n_win):
        run = run + 1 if good[m] else 0
        if run == tol.consecutive_periods:
            start = m - tol.consecutive_periods + 1
            break
    synced = start is not None
    report_from = start if synced else n_win // 2
    sel = slice(report_from, n_win)

    amps = (float(np.mean(amp1[sel])), float(np.mean(amp2[sel])))
    sel_phases = phases[sel][~np.isnan(phases[sel])]
    lag = _circular_mean(sel_phases) if sel_phases.size else math.nan
    centers = (np.arange(n_win) + 0.5) * period
    try:
        decay = fit_decay(np.column_stack([centers[sel], amp1[sel]]))
    except ValueError:
        decay = 0.0
    return SyncReport(
        transient_time=start * period if synced else math.inf,
        phase_lag=lag,
        amplitude_ratio=float(np.mean(ratio[sel])),
        steady_amplitudes=amps,
        decay_rate=decay,
        strict_sync=synced,
    )
