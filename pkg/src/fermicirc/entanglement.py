"""Entanglement spectra, entropies, zero modes and correlation profiles.

A contiguous block of sites keeps its Majorana-index submatrix of C; the
singular values of that submatrix, paired down to one value per site, form
the single-particle entanglement spectrum lambda_r in [0, 1].  The half cut
splits the ring at columns M/2 and M (sites 1..M/2 against the rest).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from .errors import InvalidInput
from .gaussian import CorrelationMatrix

_CLAMP_TOL = 1e-9


@dataclass
class EntanglementSpectrum:
    """Sorted single-particle entanglement levels, one per site of the region."""

    lambdas: np.ndarray


def reduce(cm: CorrelationMatrix, region: Tuple[int, int]) -> np.ndarray:
    """Principal submatrix of C on sites [first, last] (1-based, inclusive)."""
    first, last = region
    if not (1 <= first <= last <= cm.M):
        raise InvalidInput(f"region {region} outside [1, {cm.M}]")
    idx = np.arange(2 * (first - 1), 2 * last)
    return cm.C[np.ix_(idx, idx)]


def spectrum(C_A: np.ndarray) -> EntanglementSpectrum:
    """lambda_r = paired singular values of C_A, clamped to [0, 1], ascending."""
    defect = np.abs(C_A + C_A.T).max()
    if defect > 1e-8:
        raise InvalidInput(f"asymmetry {defect:.2e} beyond 1e-8")
    n = C_A.shape[0] // 2
    evals = np.linalg.eigvalsh(1j * (C_A - C_A.T) / 2.0)
    lam = np.sort(evals)[n:]  # +-lambda pairs; keep the non-negative half
    if lam.size and (lam.min() < -_CLAMP_TOL or lam.max() > 1 + _CLAMP_TOL):
        raise InvalidInput(f"entanglement levels outside [0,1]: [{lam.min()}, {lam.max()}]")
    return EntanglementSpectrum(np.clip(lam, 0.0, 1.0))


def entropy(spec: EntanglementSpectrum) -> float:
    """S = sum_r h((1-l)/2) + h((1+l)/2) with h(x) = -x ln x, in nats."""
    lam = spec.lambdas
    p = np.concatenate([(1.0 - lam) / 2.0, (1.0 + lam) / 2.0])
    p = p[p > 0.0]
    return float(-(p * np.log(p)).sum())


def zero_mode_and_gap(spec: EntanglementSpectrum) -> Tuple[float, float]:
    """(lambda_0, lambda_1): smallest and second-smallest entanglement levels."""
    if spec.lambdas.size < 2:
        raise InvalidInput("need at least two levels")
    return float(spec.lambdas[0]), float(spec.lambdas[1])


def half_cut_spectrum(cm: CorrelationMatrix) -> EntanglementSpectrum:
    return spectrum(reduce(cm, (1, cm.M // 2)))


def half_cut_entropy(cm: CorrelationMatrix) -> float:
    return entropy(half_cut_spectrum(cm))


def correlation_profile(cm: CorrelationMatrix) -> List[Tuple[int, float]]:
    """Mean |C_ab| over Majorana pairs at ring distance d, for d in [2, M].

    Distances are min(|a-b|, 2M - |a-b|) on the ring of 2M Majorana indices.
    """
    n = 2 * cm.M
    absC = np.abs(cm.C)
    idx = np.arange(n)
    sep = np.abs(idx[:, None] - idx[None, :])
    dist = np.minimum(sep, n - sep)
    out = []
    for d in range(2, cm.M + 1):
        mask = dist == d
        out.append((d, float(absC[mask].mean())))
    return out


def profile_decay_fit(profile, d_min: int, d_max: int,
                      floor: float = 1e-14) -> Tuple[float, float]:
    """Least-squares exponential fit over d in [d_min, d_max].

    Returns (decay length, R^2 of ln profile vs d); length is negative when
    the profile grows.
    """
    pts = [(d, v) for d, v in profile if d_min <= d <= d_max and v > floor]
    if len(pts) < 3:
        raise InvalidInput("too few usable profile points")
    d = np.array([p[0] for p in pts], dtype=float)
    y = np.log([p[1] for p in pts])
    slope, intercept = np.polyfit(d, y, 1)
    resid = y - (slope * d + intercept)
    ss = np.sum((y - y.mean()) ** 2)
    r2 = 1.0 - np.sum(resid**2) / ss if ss > 0 else 1.0
    length = np.inf if slope == 0 else -1.0 / slope
    return float(length), float(r2)


def profile_power_fit(profile, d_min: int, d_max: int,
                      floor: float = 1e-14) -> Tuple[float, float]:
    """Power-law fit ln profile vs ln d over the same window; returns (power, R^2)."""
    pts = [(d, v) for d, v in profile if d_min <= d <= d_max and v > floor]
    if len(pts) < 3:
        raise InvalidInput("too few usable profile points")
    x = np.log([p[0] for p in pts])
    y = np.log([p[1] for p in pts])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss = np.sum((y - y.mean()) ** 2)
    r2 = 1.0 - np.sum(resid**2) / ss if ss > 0 else 1.0
    return float(slope), float(r2)
