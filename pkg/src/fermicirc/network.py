"""Scattering-network view of the single-particle transfer matrix.

Layers of 2x2 gate blocks form a 2D network of scattering junctions.  In a
phase-rotated, mover-sorted basis every current-conserving slab is a real
transfer matrix; slabs are converted to scattering matrices and composed
with the Redheffer star product, which stays bounded where the raw transfer
product overflows.  Real couplings conserve current layer by layer; complex
couplings need an even number of two-body layers per slab (four circuit
layers), with modes co-propagating in site-alternating pairs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg as sla

from ._threads import single_threaded_blas
from .circuits import GateSchedule, PARTITION, PBC, APBC, build_schedule
from .disorder import CouplingField
from .errors import (IndeterminateInvariant, InvalidInput, NotLocalized,
                     NumericalInstability)

_UNITARITY_TOL = 1e-6


@dataclass
class ScatteringState:
    """Composed scattering matrix in transmission-reflection grading.

    Blocks follow S = [[R, T'], [T, R']]: R reflects at the input end,
    T transmits across, R' reflects at the far end.
    """

    R: np.ndarray
    Tp: np.ndarray
    T: np.ndarray
    Rp: np.ndarray
    M: int
    composed_layers: int
    unitarity_defect: float

    def s_matrix(self) -> np.ndarray:
        return np.block([[self.R, self.Tp], [self.T, self.Rp]])


@dataclass
class QuasienergySpectrum:
    """Non-negative quasienergies (per unit length) plus the signed smallest one."""

    eps: np.ndarray
    eps0_signed: float
    L: int


def network_basis(M: int, complex_couplings: bool):
    """Mover split and phase rotation making slab transfer matrices real.

    Returns (plus, minus, phase): 0-based Majorana indices of forward /
    backward movers and the diagonal phase vector.  Real couplings pair
    counter-propagating movers within a site (odd/even Majorana index);
    complex couplings co-propagate both Majoranas of a site, with the
    direction alternating from site to site (hence M must be even).
    """
    if complex_couplings:
        plus, minus = [], []
        for site in range(1, M + 1):
            (plus if site % 2 == 1 else minus).extend([2 * site - 2, 2 * site - 1])
    else:
        plus = [2 * i for i in range(M)]
        minus = [2 * i + 1 for i in range(M)]
    phase = np.zeros(2 * M, dtype=complex)
    phase[plus] = np.exp(1j * np.pi / 4)
    phase[minus] = np.exp(-1j * np.pi / 4)
    return np.array(plus), np.array(minus), phase


def _apply_layer_rows(T: np.ndarray, gates, phase: np.ndarray) -> None:
    """Left-multiply T in place by a layer of rotated 2x2 blocks (row-pair update)."""
    for g in gates:
        a, b = g.a - 1, g.b - 1
        c, s = np.cosh(2 * g.z), np.sinh(2 * g.z)
        # rotated block: diag(phase) t diag(phase*) on (a, b)
        blk = np.array([[c, 1j * s * phase[a] * phase[b].conjugate()],
                        [-1j * s * phase[b] * phase[a].conjugate(), c]])
        rows = np.vstack([T[a], T[b]])
        T[a] = blk[0, 0] * rows[0] + blk[0, 1] * rows[1]
        T[b] = blk[1, 0] * rows[0] + blk[1, 1] * rows[1]


def _slabs(schedule: GateSchedule):
    """Group layers into current-conserving slabs (two V-layers each for
    complex couplings, at most two time steps otherwise)."""
    groups: List[List] = []
    current: List = []
    v_count = 0
    layers = list(schedule.layers())
    for idx, (kind, _step, gates) in enumerate(layers):
        current.append((kind, gates))
        v_count += kind == "V"
        nxt = layers[idx + 1][0] if idx + 1 < len(layers) else None
        if v_count == 2 and (nxt == "V" or nxt is None):
            groups.append(current)
            current, v_count = [], 0
    if current:
        if schedule.complex_couplings and v_count % 2 == 1:
            raise NumericalInstability(
                "complex couplings need an even number of V-layers "
                f"(got a trailing slab with {v_count})")
        groups.append(current)
    return groups


def _slab_transfer(M: int, slab, plus, minus, phase) -> np.ndarray:
    T = np.eye(2 * M, dtype=complex)
    for _kind, gates in slab:
        _apply_layer_rows(T, gates, phase)
    order = np.concatenate([plus, minus])
    T = T[np.ix_(order, order)]
    imag = np.abs(T.imag).max()
    if imag > 1e-9:
        raise NumericalInstability(f"slab transfer not real (imag {imag:.2e})")
    return T.real


def _transfer_to_s(Mt: np.ndarray):
    n = Mt.shape[0] // 2
    m11, m12 = Mt[:n, :n], Mt[:n, n:]
    m21, m22 = Mt[n:, :n], Mt[n:, n:]
    tp = np.linalg.solve(m22, np.eye(n))
    r = -np.linalg.solve(m22, m21)
    rp = np.linalg.solve(m22.T, m12.T).T
    t = m11 + m12 @ np.linalg.solve(m22, -m21)
    return r, tp, t, rp


def _star(S1, S2):
    """Compose scattering matrices; S1 is traversed first."""
    r1, t1p, t1, r1p = S1
    r2, t2p, t2, r2p = S2
    n = r1.shape[0]
    eye = np.eye(n)
    g1 = np.linalg.solve(eye - r1p @ r2, np.column_stack([t1, r1p @ t2p]))
    G_t1, G_r1p_t2p = g1[:, :n], g1[:, n:]
    t = t2 @ G_t1
    r = r1 + t1p @ (r2 @ G_t1)
    tp = t1p @ np.linalg.solve(eye - r2 @ r1p, t2p)
    rp = r2p + t2 @ G_r1p_t2p
    return r, tp, t, rp


def compose_network(schedule: GateSchedule) -> ScatteringState:
    """Stable slab-by-slab composition of the whole schedule into one S matrix."""
    M = schedule.M
    plus, minus, phase = network_basis(M, schedule.complex_couplings)
    S = None
    n_layers = 0
    with single_threaded_blas():
        for slab in _slabs(schedule):
            T = _slab_transfer(M, slab, plus, minus, phase)
            Snew = _transfer_to_s(T)
            S = Snew if S is None else _star(S, Snew)
            n_layers += len(slab)
    if S is None:
        raise InvalidInput("empty schedule")
    r, tp, t, rp = S
    full = np.block([[r, tp], [t, rp]])
    defect = float(np.abs(full @ full.T - np.eye(2 * M)).max())
    if defect > _UNITARITY_TOL:
        raise NumericalInstability(f"unitarity defect {defect:.2e}")
    return ScatteringState(r, tp, t, rp, M, n_layers, defect)


def dense_transfer(schedule: GateSchedule) -> np.ndarray:
    """Full transfer product in the network basis; small L only (it overflows)."""
    M = schedule.M
    plus, minus, phase = network_basis(M, schedule.complex_couplings)
    T = np.eye(2 * M, dtype=complex)
    for _kind, _step, gates in schedule.layers():
        _apply_layer_rows(T, gates, phase)
    order = np.concatenate([plus, minus])
    return T[np.ix_(order, order)]


def conductivity(state: ScatteringState, L: int, M: int) -> float:
    """Dimensionless per-realization conductivity (L/M) tr(T^dag T)."""
    return float(L / M * np.trace(state.T.T @ state.T))


def quasienergies(schedule: GateSchedule,
                  state: Optional[ScatteringState] = None) -> QuasienergySpectrum:
    """Quasienergies from cosh^2(L eps_j) = 1 / eig(T^dag T), L-normalized.

    The smallest one receives the sign (-1)^M sgn det(R), which distinguishes
    the two insulating phases.
    """
    if state is None:
        state = compose_network(schedule)
    L = schedule.L
    w = np.linalg.eigvalsh(state.T.T @ state.T)
    if w[0] <= -1e-12:
        raise NumericalInstability(f"T^dag T eigenvalue {w[0]:.2e} <= 0")
    w = np.clip(w, np.finfo(float).tiny, 1.0)
    Leps = np.arccosh(1.0 / np.sqrt(w))
    eps = np.sort(Leps) / L
    sign_r, _ = np.linalg.slogdet(state.R)
    eps0 = float(eps[0] * ((-1.0) ** schedule.M) * (sign_r if sign_r != 0 else 1.0))
    return QuasienergySpectrum(eps, eps0, L)


def polar_factors(state: ScatteringState):
    """Polar pieces (u, u', v, v', tanh D, sech D) of the transfer matrix.

    Extracted from the orthogonal S via a cosine-sine decomposition; the
    smallest channel's sign is flipped if needed so det(u) det(u') = +1
    (which also fixes det(v) det(v') = +1).  tanh/sech are returned instead
    of D itself so saturated channels stay representable.
    """
    M = state.M
    full = state.s_matrix()
    u1, cs, v1h = sla.cossin(full, p=M, q=M)
    U1, U2 = u1[:M, :M], u1[M:, M:]
    V1H, V2H = v1h[:M, :M], v1h[M:, M:]
    tanh_d = np.diag(cs[:M, :M]).copy()
    sech_d = np.diag(cs[M:, :M]).copy()
    u, up, v, vp = -U1, V1H.copy(), U2, V2H.copy()
    det_uu = np.linalg.det(u) * np.linalg.det(up)
    if det_uu < 0:
        j0 = int(np.argmin(tanh_d))  # smallest quasienergy channel
        tanh_d[j0] *= -1.0
        u[:, j0] *= -1.0
        vp[j0, :] *= -1.0
    return u, up, v, vp, tanh_d, sech_d


def topological_invariant(field: CouplingField, L_inv: Optional[int] = None,
                          gap_threshold: float = 2.0, q: int = 0) -> dict:
    """sgn[det(R'_pbc R'_apbc)] over one disorder realization.

    ``gapped`` reports whether min_j L eps_j exceeds ``gap_threshold`` for
    both boundary conditions; the invariant is meaningful only when it does.
    """
    if L_inv is not None and L_inv != field.L:
        raise InvalidInput(f"field has L={field.L}, requested L_inv={L_inv}")
    out = {"I_sample": None, "gapped": None}
    signs = {}
    leps_min = []
    for bc in (PBC, APBC):
        schedule = build_schedule(field, bc=bc, q=q, ordering=PARTITION)
        state = compose_network(schedule)
        sign, logdet = np.linalg.slogdet(state.Rp)
        if sign == 0 or logdet < np.log(1e-12):
            raise IndeterminateInvariant(f"|det R'| too small at bc={bc}")
        signs[bc] = sign
        spec = quasienergies(schedule, state)
        leps_min.append(spec.eps[0] * schedule.L)
        out[f"g_{bc}"] = conductivity(state, schedule.L, field.M)
    out["detRp_pbc_sign"] = int(signs[PBC])
    out["detRp_apbc_sign"] = int(signs[APBC])
    out["I_sample"] = int(signs[PBC] * signs[APBC])
    out["eps_min"] = float(min(leps_min) / field.L)
    out["gapped"] = bool(min(leps_min) > gap_threshold)
    return out


def localization_length(g_series: Sequence[Tuple[float, float]]) -> Tuple[float, float]:
    """xi from ln g = const - 2 L / xi; returns (xi, R^2).

    Meaningful in the insulating regime (g < 1); a non-decaying series
    raises NotLocalized.
    """
    pts = [(L, g) for L, g in g_series if g > 0]
    if len(pts) < 4:
        raise InvalidInput(f"need >= 4 positive points, got {len(pts)}")
    L = np.array([p[0] for p in pts], dtype=float)
    y = np.log([p[1] for p in pts])
    slope, intercept = np.polyfit(L, y, 1)
    resid = y - (slope * L + intercept)
    ss_tot = np.sum((y - y.mean()) ** 2)
    r2 = 1.0 - np.sum(resid**2) / ss_tot if ss_tot > 0 else 1.0
    if slope >= 0:
        raise NotLocalized(f"ln g slope {slope:.3g} >= 0")
    return float(-2.0 / slope), float(r2)
