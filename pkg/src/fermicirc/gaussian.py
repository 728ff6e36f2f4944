"""Gaussian-state evolution through correlation-matrix updates.

A pure Gaussian state of 2M Majorana modes is a real antisymmetric C with
C^2 = -1.  A gate exp(i z gamma_a gamma_b) updates

    C' = B (1 - C A)^{-1} C B^T + A

with A, B identity outside the gate's 2x2 sector.  Layers of commuting
gates share one block-diagonal (A, B) pair and are applied in a single
update.  Sign conventions (occupied/empty blocks, parity as a Pfaffian
sign) are frozen against the dense many-body reference in oracle.py.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg as sla

from ._threads import single_threaded_blas
from .circuits import Gate, GateSchedule
from .errors import IndeterminateParity, InvalidInput, SingularUpdate

# Under C_jk = (i/2) tr(rho [gamma_j, gamma_k]) and the Jordan-Wigner strings
# of oracle.py, an EMPTY mode carries the block -[[0,1],[-1,0]] and an
# occupied one +[[0,1],[-1,0]]; <P> = (-1)^M Pf(C).
EMPTY_SIGN = -1.0
OCCUPIED_SIGN = +1.0

VACUUM = "vacuum"
HALF_FILLED_RANDOM = "half_filled_random"
OCCUPATIONS = "occupations"

_RCOND_FLOOR = 1e-12  # cond(1 - CA) above 1e12 signals an orthogonal post-selection


@dataclass
class CorrelationMatrix:
    """2M x 2M real antisymmetric correlation matrix of a Gaussian state."""

    C: np.ndarray
    M: int

    def copy(self) -> "CorrelationMatrix":
        return CorrelationMatrix(self.C.copy(), self.M)

    def antisymmetry_defect(self) -> float:
        return float(np.abs(self.C + self.C.T).max())

    def purity_defect(self) -> float:
        return float(np.abs(self.C @ self.C.T - np.eye(2 * self.M)).max())

    def validate(self, tol_anti: float = 1e-10, tol_purity: float = 1e-8) -> None:
        if self.C.shape != (2 * self.M, 2 * self.M):
            raise InvalidInput(f"shape {self.C.shape} != {(2 * self.M,) * 2}")
        if self.antisymmetry_defect() > tol_anti:
            raise InvalidInput("correlation matrix not antisymmetric")
        if self.purity_defect() > tol_purity:
            raise InvalidInput("correlation matrix not pure")


@dataclass
class EvolutionReport:
    C_final: CorrelationMatrix
    layers_applied: int
    converged: bool
    entropy_trace: List[Tuple[int, float]]
    parity: int


def initial_state(kind: str, M: int, seed: Optional[int] = None,
                  occupations: Optional[Sequence[int]] = None) -> CorrelationMatrix:
    """Block-diagonal product state: vacuum, random half filling, or explicit n_j."""
    if kind == VACUUM:
        occ = [0] * M
    elif kind == HALF_FILLED_RANDOM:
        if M % 2 != 0:
            raise InvalidInput("half filling needs even M")
        rng = np.random.Generator(np.random.Philox(key=(0 if seed is None else seed) % (1 << 64)))
        occ = np.zeros(M, dtype=int)
        occ[rng.permutation(M)[: M // 2]] = 1
    elif kind == OCCUPATIONS:
        if occupations is None or len(occupations) != M:
            raise InvalidInput(f"need {M} occupations")
        occ = list(occupations)
    else:
        raise InvalidInput(f"unknown initial state kind {kind!r}")
    C = np.zeros((2 * M, 2 * M))
    for j, n in enumerate(occ):
        s = OCCUPIED_SIGN if n else EMPTY_SIGN
        C[2 * j, 2 * j + 1] = s
        C[2 * j + 1, 2 * j] = -s
    return CorrelationMatrix(C, M)


def half_filled_occupations(M: int, seed: int) -> np.ndarray:
    """The occupation vector initial_state(HALF_FILLED_RANDOM, M, seed) uses."""
    rng = np.random.Generator(np.random.Philox(key=seed % (1 << 64)))
    occ = np.zeros(M, dtype=int)
    occ[rng.permutation(M)[: M // 2]] = 1
    return occ


def gate_blocks(z: complex) -> Tuple[np.ndarray, np.ndarray]:
    """2x2 blocks (A, B) of the update for exp(i z gamma_a gamma_b); both real."""
    a = np.tanh(2.0 * z.real)
    A = np.array([[0.0, a], [-a, 0.0]])
    c, s = np.cos(2.0 * z.imag), np.sin(2.0 * z.imag)
    B = np.array([[c, -s], [s, c]]) / np.cosh(2.0 * z.real)
    return A, B


def _layer_AB(M: int, gates: Sequence[Gate]) -> Tuple[np.ndarray, np.ndarray]:
    A = np.zeros((2 * M, 2 * M))
    B = np.eye(2 * M)
    for g in gates:
        Ab, Bb = gate_blocks(g.z)
        idx = np.array([g.a - 1, g.b - 1])
        A[np.ix_(idx, idx)] = Ab
        B[np.ix_(idx, idx)] = Bb
    return A, B


def _update(C: np.ndarray, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Apply C' = B (1 - C A)^{-1} C B^T + A, guarding the solve's conditioning."""
    n = C.shape[0]
    K = np.eye(n) - C @ A
    anorm = np.linalg.norm(K, 1)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", sla.LinAlgWarning)  # rcond guard below
        lu, piv = sla.lu_factor(K, check_finite=False)
    rcond, info = sla.lapack.dgecon(lu, anorm)
    if info != 0 or rcond < _RCOND_FLOOR:
        raise SingularUpdate(f"1 - CA nearly singular (rcond={rcond:.2e})")
    mid = sla.lu_solve((lu, piv), C, check_finite=False)
    out = B @ mid @ B.T + A
    return 0.5 * (out - out.T)


def apply_gate(cm: CorrelationMatrix, gate: Gate) -> CorrelationMatrix:
    """Single-gate update (layer updates are preferred for speed)."""
    A, B = _layer_AB(cm.M, [gate])
    return CorrelationMatrix(_update(cm.C, A, B), cm.M)


def apply_gates_tanh(C: np.ndarray, pairs: Sequence[Tuple[int, int]],
                     tanh_vals: Sequence[float], sech_vals: Sequence[float]) -> np.ndarray:
    """Update for commuting real-z gates given (tanh 2Re z, sech 2Re z) directly.

    Used by the polar-decomposition fast path where the hyperbolic functions
    are known without forming z (avoids artanh overflow on saturated channels).
    Pairs are 0-based and disjoint.
    """
    n = C.shape[0]
    A = np.zeros((n, n))
    B = np.eye(n)
    for (a, b), t, s in zip(pairs, tanh_vals, sech_vals):
        A[a, b], A[b, a] = t, -t
        B[a, a] = B[b, b] = s
    return _update(C, A, B)


def _purify(C: np.ndarray) -> np.ndarray:
    """One Newton step of the matrix sign iteration, C <- (C - C^{-1}) / 2.

    A pure C is antisymmetric orthogonal (C^{-1} = -C), a fixed point of the
    step; off-manifold float noise contracts quadratically.  The strongly
    non-unitary layer updates amplify such noise geometrically (by roughly
    cond(1 - CA) per layer), so re-antisymmetrization alone cannot hold the
    purity tolerance over long schedules.
    """
    C = 0.5 * (C - np.linalg.inv(C))
    return 0.5 * (C - C.T)


def purify(cm: CorrelationMatrix) -> CorrelationMatrix:
    """Project back onto the pure-state manifold (for long apply_gate chains)."""
    return CorrelationMatrix(_purify(cm.C), cm.M)


def evolve(C0: CorrelationMatrix, schedule: GateSchedule, tol_conv: float = 1e-6,
           L_max: Optional[int] = None, record_every: Optional[int] = None,
           check_purity: bool = True, purity_tol: float = 1e-8) -> EvolutionReport:
    """Apply the schedule layer by layer, tracking the half-cut entropy.

    The entropy is recorded every ``record_every`` layers (default M); the
    run stops early once the last five recordings agree pairwise within
    ``tol_conv``, and in any case after min(L, L_max) time steps.
    """
    from .entanglement import half_cut_entropy  # local import, no cycle at module load

    if schedule.M != C0.M:
        raise InvalidInput("schedule geometry does not match state")
    M = schedule.M
    record_every = M if record_every is None else record_every
    max_steps = schedule.L if L_max is None else min(schedule.L, L_max)
    C = C0.C.copy()
    parity0 = parity(C0)
    trace: List[Tuple[int, float]] = []
    layers_applied = 0
    converged = False
    with single_threaded_blas():
        for kind, step, gates in schedule.layers():
            if step > max_steps:
                break
            A, B = _layer_AB(M, gates)
            C = _purify(_update(C, A, B))
            layers_applied += 1
            if check_purity:
                defect = np.abs(C @ C.T - np.eye(2 * M)).max()
                if defect > purity_tol:
                    raise SingularUpdate(
                        f"purity defect {defect:.2e} after layer {layers_applied}")
            if layers_applied % record_every == 0:
                cm = CorrelationMatrix(C, M)
                trace.append((layers_applied, half_cut_entropy(cm)))
                # tol_conv = inf disables the early stop entirely
                if len(trace) >= 5 and np.isfinite(tol_conv):
                    window = [s for _, s in trace[-5:]]
                    if max(window) - min(window) < tol_conv:
                        converged = True
                        break
    cm = CorrelationMatrix(C, M)
    return EvolutionReport(cm, layers_applied, converged, trace, parity0)


def _split_layers(schedule: GateSchedule):
    """Layer groups split into (fast-path prefix, leftover layers)."""
    groups = list(schedule.layers())
    if not schedule.complex_couplings:
        return groups, []
    n_pre = 4 * (len(groups) // 4)  # four-layer groups have two V-layers each
    return groups[:n_pre], groups[n_pre:]


def _prefix_schedule(schedule: GateSchedule, groups) -> GateSchedule:
    gates = [g for _kind, _step, layer_gates in groups for g in layer_gates]
    sub = GateSchedule(schedule.M, schedule.L, schedule.bc, schedule.q,
                       schedule.ordering, schedule.complex_couplings, gates)
    return sub


def fast_evolve(schedule: GateSchedule, C0: CorrelationMatrix) -> CorrelationMatrix:
    """Three-step evolution through the polar pieces of the transfer matrix.

    The single-particle transfer matrix factorizes into an orthogonal
    rotation, a hyperbolic stretch acting pairwise on transmission channels,
    and a second rotation; each factor is a Gaussian map on C.  The pieces
    come from the stably composed scattering matrix via a cosine-sine
    decomposition, so long gapped schedules stay well conditioned.  Complex
    couplings are current-conserving in four-layer groups only; leftover
    layers are applied with the ordinary layer update.  If the composition
    or decomposition fails, falls back to layered evolution with a warning.
    """
    from .network import compose_network, network_basis, polar_factors

    if schedule.M != C0.M:
        raise InvalidInput("schedule geometry does not match state")
    M = schedule.M
    prefix, rest = _split_layers(schedule)
    C = C0.C.copy()
    if prefix:
        try:
            state = compose_network(_prefix_schedule(schedule, prefix))
            u, up, v, vp, tanh_d, sech_d = polar_factors(state)
            plus, minus, _ = network_basis(M, schedule.complex_couplings)
            order = np.concatenate([plus, minus])
            zeros = np.zeros((M, M))
            O_u = np.empty((2 * M, 2 * M))
            O_u[np.ix_(order, order)] = np.block([[up, zeros], [zeros, u.T]])
            O_v = np.empty((2 * M, 2 * M))
            O_v[np.ix_(order, order)] = np.block([[v, zeros], [zeros, vp.T]])
            pairs = list(zip(plus.tolist(), minus.tolist()))
            Cf = O_u @ C @ O_u.T
            # fully saturated channels turn the stretch into a hard projection;
            # a wrong-parity state is orthogonal to it and trips SingularUpdate
            Cf = apply_gates_tanh(Cf, pairs, -tanh_d, sech_d)
            Cf = O_v @ Cf @ O_v.T
            C = _purify(0.5 * (Cf - Cf.T))
        except Exception as exc:  # noqa: BLE001  - any failure falls back
            warnings.warn(f"fast path failed ({exc}); falling back to layered evolution")
            rest = prefix + rest
    for _kind, _step, gates in rest:
        A, B = _layer_AB(M, gates)
        C = _purify(_update(C, A, B))
    return CorrelationMatrix(C, M)


def parity(cm: CorrelationMatrix) -> int:
    """Fermion parity <P> = (-1)^M sgn Pf(C); exact +-1 for pure states."""
    pf = pfaffian_sign(cm.C)
    return int(round((-1.0) ** cm.M * pf))


def pfaffian_sign(A: np.ndarray, tol: float = 1e-10) -> float:
    """Sign of the Pfaffian of a real antisymmetric matrix via its real Schur form."""
    n = A.shape[0]
    if n % 2 != 0:
        return 0.0
    T, Q = sla.schur(A, output="real")
    # antisymmetric + quasi-triangular => block diagonal with 2x2 blocks
    off = np.abs(T[range(0, n, 2), range(0, n, 2)]).max() if n else 0.0
    pf = np.prod(np.sign(T[range(0, n, 2), range(1, n, 2)]))
    sign_q = np.sign(np.linalg.det(Q))
    mags = np.abs(T[range(0, n, 2), range(1, n, 2)])
    if mags.min() < tol or off > tol:
        raise IndeterminateParity(f"|Pf| block magnitude {mags.min():.2e} below {tol}")
    return float(pf * sign_q)
