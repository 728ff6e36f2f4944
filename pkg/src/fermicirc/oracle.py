"""Brute-force many-body reference for small systems (M <= 6).

Majorana operators are built as explicit 2^M x 2^M matrices through the
Jordan-Wigner strings gamma_{2i-1} = (prod_{k<i} X_k) Z_i and
gamma_{2i} = -(prod_{k<i} X_k) Y_i, gates act on the full state vector,
and correlation matrices are evaluated entry by entry.  Everything here is
independent of the Gaussian fast path and exists to pin its conventions.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Sequence

import numpy as np

from .circuits import GateSchedule
from .errors import InvalidInput, RefusedScale

MAX_SITES = 6

_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_I = np.eye(2, dtype=complex)


def _kron_chain(ops) -> np.ndarray:
    out = np.array([[1.0 + 0j]])
    for op in ops:
        out = np.kron(out, op)
    return out


@lru_cache(maxsize=8)
def majorana_matrices(M: int):
    """gamma_1 ... gamma_2M as dense matrices (tuple, 0-based index j = gamma_{j+1})."""
    if M > MAX_SITES:
        raise RefusedScale(f"M={M} exceeds dense cap {MAX_SITES}")
    gams = []
    for i in range(1, M + 1):
        pre = [_X] * (i - 1)
        post = [_I] * (M - i)
        gams.append(_kron_chain(pre + [_Z] + post))
        gams.append(-_kron_chain(pre + [_Y] + post))
    return tuple(gams)


def occupation_vector(occupations: Sequence[int], M: int) -> np.ndarray:
    """Product state with n_j in {0, 1} for fermions c_j = (g_{2j-1} + i g_{2j})/2.

    The mode vacuum is the X = +1 spin state; occupation flips it to X = -1.
    """
    if len(occupations) != M:
        raise InvalidInput(f"need {M} occupations, got {len(occupations)}")
    plus = np.array([1.0, 1.0]) / np.sqrt(2)
    minus = np.array([1.0, -1.0]) / np.sqrt(2)
    return _kron_chain([minus if n else plus for n in occupations]).ravel()


def gate_operator(M: int, a: int, b: int, z: complex) -> np.ndarray:
    """exp(i z gamma_a gamma_b) via the closed form cosh(z) + i sinh(z) g_a g_b."""
    g = majorana_matrices(M)
    gg = g[a - 1] @ g[b - 1]
    return np.cosh(z) * np.eye(2**M) + 1j * np.sinh(z) * gg


def evolve_state(schedule: GateSchedule, occupations: Sequence[int]) -> np.ndarray:
    """Apply every gate of the schedule to the product state, renormalizing."""
    if schedule.M > MAX_SITES:
        raise RefusedScale(f"M={schedule.M} exceeds dense cap {MAX_SITES}")
    psi = occupation_vector(occupations, schedule.M)
    for g in schedule.gates:
        psi = gate_operator(schedule.M, g.a, g.b, g.z) @ psi
        norm = np.linalg.norm(psi)
        if norm < 1e-300:
            raise InvalidInput("state annihilated by schedule")
        psi = psi / norm
    return psi


def correlation_from_state(psi: np.ndarray, M: int) -> np.ndarray:
    """C_jk = (i/2) <[gamma_j, gamma_k]> evaluated exactly."""
    psi = psi / np.linalg.norm(psi)
    g = majorana_matrices(M)
    C = np.zeros((2 * M, 2 * M))
    for j in range(2 * M):
        gj_psi = g[j] @ psi
        for k in range(j + 1, 2 * M):
            # <g_j g_k> is purely imaginary off the diagonal, so i<g_j g_k> is real
            C[j, k] = np.real(1j * np.vdot(gj_psi, g[k] @ psi))
            C[k, j] = -C[j, k]
    return C


def dense_oracle(schedule: GateSchedule, occupations: Sequence[int]) -> np.ndarray:
    """Correlation matrix of the schedule applied to a product state."""
    psi = evolve_state(schedule, occupations)
    return correlation_from_state(psi, schedule.M)


def dense_parity(schedule: GateSchedule, occupations: Sequence[int]) -> float:
    """<P> with P = (-i)^M gamma_1 ... gamma_2M (equals the X-string expectation)."""
    psi = evolve_state(schedule, occupations)
    M = schedule.M
    P = np.eye(2**M, dtype=complex)
    for g in majorana_matrices(M):
        P = P @ g
    val = np.vdot(psi, ((-1j) ** M) * (P @ psi))
    return float(val.real)


def reduced_density_spectrum(psi: np.ndarray, M: int, n_sites: int) -> np.ndarray:
    """Eigenvalues of the reduced density matrix on the first n_sites sites."""
    psi = psi / np.linalg.norm(psi)
    mat = psi.reshape(2**n_sites, 2 ** (M - n_sites))
    rho = mat @ mat.conj().T
    return np.sort(np.linalg.eigvalsh(rho))
