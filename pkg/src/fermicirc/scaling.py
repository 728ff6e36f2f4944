"""Asymptotic fits and single-parameter data collapse.

The collapse rescales each curve's x axis by a per-curve factor and measures
the squared vertical distance of all points to a monotone piecewise-linear
master curve, rebuilt from the pooled points at every trial.  Coordinate
descent over log factors with a fixed sweep order keeps the result
deterministic; the first curve's factor is pinned to 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .errors import CollapseInfeasible, InvalidInput, NoDecay, NotMetallic


@dataclass
class CollapseResult:
    factors: Dict[float, float]
    master: np.ndarray  # rows (u, y) sorted by u
    residual: float     # rms vertical deviation from the master curve
    increasing: bool


def _pava(y: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Pool-adjacent-violators: weighted least-squares monotone (nondecreasing) fit."""
    vals = y.astype(float).copy()
    wts = w.astype(float).copy()
    # blocks as (value, weight, count)
    values: List[float] = []
    weights: List[float] = []
    counts: List[int] = []
    for v, wt in zip(vals, wts):
        values.append(v)
        weights.append(wt)
        counts.append(1)
        while len(values) > 1 and values[-2] > values[-1]:
            v2, w2, c2 = values.pop(), weights.pop(), counts.pop()
            v1, w1, c1 = values.pop(), weights.pop(), counts.pop()
            values.append((v1 * w1 + v2 * w2) / (w1 + w2))
            weights.append(w1 + w2)
            counts.append(c1 + c2)
    out = np.empty_like(vals)
    pos = 0
    for v, c in zip(values, counts):
        out[pos:pos + c] = v
        pos += c
    return out


def _master_residual(xs, ys, ws, log_factors, curve_ids, increasing, n_knots=None):
    """Distance of rescaled points to a monotone piecewise-linear master.

    The master lives on a fixed grid of log-u knots (weighted bin means made
    monotone by pool-adjacent-violators, linearly interpolated).  Using fewer
    knots than points is essential: interpolating every pooled point would
    fit any jointly-monotone interleaving exactly and leave the scale
    factors undetermined over a whole plateau.
    """
    u = xs / np.exp(log_factors[curve_ids])
    lu = np.log(u)
    order = np.argsort(lu, kind="stable")
    lo, yo, wo = lu[order], ys[order], ws[order]
    if n_knots is None:
        n_knots = int(min(12, max(4, len(lo) // 2)))
    edges = np.linspace(lo[0], lo[-1], n_knots + 1)
    idx = np.clip(np.searchsorted(edges, lo, side="right") - 1, 0, n_knots - 1)
    knot_u, knot_y, knot_w = [], [], []
    for j in range(n_knots):
        mask = idx == j
        if not mask.any():
            continue
        wj = wo[mask]
        knot_u.append(np.average(lo[mask], weights=wj))
        knot_y.append(np.average(yo[mask], weights=wj))
        knot_w.append(wj.sum())
    knot_y = np.asarray(knot_y)
    knot_w = np.asarray(knot_w)
    fit_knots = _pava(knot_y if increasing else -knot_y, knot_w)
    if not increasing:
        fit_knots = -fit_knots
    master = np.interp(lo, knot_u, fit_knots)
    resid = float(np.sqrt(np.average((yo - master) ** 2, weights=wo)))
    return resid, np.exp(lo), master


def collapse(curves: Sequence[Tuple[float, Sequence[float], Sequence[float], Sequence[float]]],
             sweeps: int = 8, grid: int = 13, span: float = 1.5) -> CollapseResult:
    """Collapse curves (param, x, y, yerr) onto one monotone master curve.

    Factors are defined up to a common scale; the first curve is the
    reference with factor exactly 1.  Points with yerr <= 0 get unit weight.
    """
    if len(curves) < 1:
        raise InvalidInput("no curves")
    for _p, x, y, _e in curves:
        if len(x) < 3 or len(x) != len(y):
            raise InvalidInput("each curve needs >= 3 (x, y) points")
    for (p1, _x1, y1, _e1), (p2, _x2, y2, _e2) in zip(curves, curves[1:]):
        lo = max(min(y1), min(y2))
        hi = min(max(y1), max(y2))
        if lo > hi:
            raise CollapseInfeasible(f"curves {p1} and {p2} have disjoint y ranges")

    if len(curves) == 1:
        param, x, y, _e = curves[0]
        order = np.argsort(np.asarray(x, dtype=float))
        master = np.column_stack([np.asarray(x, float)[order],
                                  np.asarray(y, float)[order]])
        return CollapseResult({param: 1.0}, master, 0.0,
                              bool(master[-1, 1] >= master[0, 1]))

    xs = np.concatenate([np.asarray(c[1], dtype=float) for c in curves])
    ys = np.concatenate([np.asarray(c[2], dtype=float) for c in curves])
    errs = np.concatenate([np.asarray(c[3], dtype=float) for c in curves])
    ws = np.where(errs > 0, 1.0 / np.maximum(errs, 1e-30) ** 2, 1.0)
    curve_ids = np.concatenate([np.full(len(c[1]), k) for k, c in enumerate(curves)])

    logf = np.zeros(len(curves))
    # master orientation from the pooled trend at unit factors
    rup, _, _ = _master_residual(xs, ys, ws, logf, curve_ids, True)
    rdn, _, _ = _master_residual(xs, ys, ws, logf, curve_ids, False)
    increasing = rup <= rdn

    if len(curves) > 1:
        best, _, _ = _master_residual(xs, ys, ws, logf, curve_ids, increasing)
        width = span
        for _ in range(sweeps):
            improved = False
            for k in range(1, len(curves)):
                center = logf[k]
                cands = center + np.linspace(-width, width, grid)
                for cand in cands:
                    logf[k] = cand
                    r, _, _ = _master_residual(xs, ys, ws, logf, curve_ids, increasing)
                    if r < best - 1e-15:
                        best, improved = r, True
                        center = cand
                logf[k] = center
            width /= 2.0
            if not improved and width < 1e-4:
                break

    residual, u_sorted, fit = _master_residual(xs, ys, ws, logf, curve_ids, increasing)
    factors = {c[0]: float(np.exp(lf)) for c, lf in zip(curves, logf)}
    master = np.column_stack([u_sorted, fit])
    return CollapseResult(factors, master, residual, increasing)


def _line_fit(x: np.ndarray, y: np.ndarray) -> Tuple[float, float, float]:
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss = np.sum((y - y.mean()) ** 2)
    r2 = 1.0 - np.sum(resid**2) / ss if ss > 0 else 1.0
    return float(slope), float(intercept), float(r2)


def fit_log_conductance(points: Sequence[Tuple[float, float]]) -> Tuple[float, float, float]:
    """(prefactor, offset, R^2) of g = prefactor ln L + offset; metallic data only."""
    if len(points) < 4:
        raise InvalidInput(f"need >= 4 points, got {len(points)}")
    L = np.array([p[0] for p in points], dtype=float)
    g = np.array([p[1] for p in points], dtype=float)
    slope, intercept, r2 = _line_fit(np.log(L), g)
    if slope <= 0:
        raise NotMetallic(f"g vs ln L slope {slope:.3g} <= 0")
    return slope, intercept, r2


def fit_zero_mode_decay(points: Sequence[Tuple[float, float]]) -> Tuple[float, float]:
    """(c, R^2) of lambda_0 = const * exp(-M / c)."""
    if len(points) < 3:
        raise InvalidInput(f"need >= 3 points, got {len(points)}")
    if any(lam <= 0 for _m, lam in points):
        raise InvalidInput("zero-mode values must be positive")
    M = np.array([p[0] for p in points], dtype=float)
    y = np.log([p[1] for p in points])
    slope, _intercept, r2 = _line_fit(M, y)
    if slope >= 0:
        raise NoDecay(f"ln lambda_0 slope {slope:.3g} >= 0")
    return float(-1.0 / slope), r2


def crossing_estimate(values: Sequence[float], slopes: Sequence[float]) -> float:
    """Zero crossing of slope(value) by linear interpolation between sign changes."""
    v = np.asarray(values, dtype=float)
    s = np.asarray(slopes, dtype=float)
    order = np.argsort(v)
    v, s = v[order], s[order]
    for k in range(len(v) - 1):
        if s[k] == 0:
            return float(v[k])
        if s[k] < 0 <= s[k + 1]:
            frac = -s[k] / (s[k + 1] - s[k])
            return float(v[k] + frac * (v[k + 1] - v[k]))
    raise InvalidInput("no sign change in slope series")
