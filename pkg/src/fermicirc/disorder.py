"""Disordered Ising couplings: bond-sign realizations and layer parameters.

Couplings live on a cylinder of circumference M (sites) and length L
(transfer layers).  Horizontal bonds carry signs ``eta_h`` and feed the
one-body layer parameters, vertical bonds carry ``eta_v`` and feed the
two-body ones.  Signs are -1 with probability p, independently per bond.
"""

from __future__ import annotations

import base64
import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DivergentCoupling, InvalidGeometry, InvalidInput

INCOHERENT = "incoherent"
COHERENT = "coherent"


@dataclass(frozen=True)
class ErrorModel:
    """Bond-flip probability p plus, for coherent errors, the rotation angle phi."""

    kind: str
    p: float
    phi: Optional[float] = None

    def __post_init__(self):
        if self.kind not in (INCOHERENT, COHERENT):
            raise InvalidInput(f"unknown error-model kind {self.kind!r}")
        if not 0.0 <= self.p <= 1.0:
            raise InvalidInput(f"p={self.p} outside [0, 1]")
        if self.kind == COHERENT:
            if self.phi is None or not 0.0 <= self.phi <= np.pi / 4:
                raise InvalidInput(f"phi={self.phi} outside [0, pi/4]")
        elif self.phi is not None:
            raise InvalidInput("incoherent model carries no phi")

    @classmethod
    def incoherent(cls, p: float) -> "ErrorModel":
        return cls(INCOHERENT, p)

    @classmethod
    def coherent(cls, phi: float, p: float) -> "ErrorModel":
        return cls(COHERENT, p, phi)

    @classmethod
    def coherent_twirl(cls, phi: float) -> "ErrorModel":
        """Coherent model on the partial-twirl line p = sin^2(phi)."""
        return cls(COHERENT, float(np.sin(phi) ** 2), phi)

    def sweep_value(self) -> float:
        """The natural sweep parameter: p when incoherent, phi when coherent."""
        return self.p if self.kind == INCOHERENT else self.phi

    def to_dict(self) -> dict:
        return {"kind": self.kind, "p": self.p, "phi": self.phi}

    @classmethod
    def from_dict(cls, d: dict) -> "ErrorModel":
        return cls(d["kind"], d["p"], d.get("phi"))


@dataclass(frozen=True)
class Coupling:
    """Ising coupling constant; purely real for incoherent errors."""

    J: complex
    kind: str

    @property
    def is_complex(self) -> bool:
        return self.kind == COHERENT


def real_coupling(p: float) -> Coupling:
    """J = (1/2) ln((1-p)/p), the coupling tied to bit-flip probability p."""
    if not 0.0 < p < 1.0:
        raise DivergentCoupling(f"J diverges at p={p}")
    return Coupling(complex(0.5 * np.log((1.0 - p) / p)), INCOHERENT)


def complex_coupling(phi: float) -> Coupling:
    """J = -(1/2) log(i tan(phi)) = -(1/2) ln tan(phi) - i pi/4."""
    if not 0.0 < phi <= np.pi / 4:
        raise DivergentCoupling(f"J diverges at phi={phi}")
    return Coupling(complex(-0.5 * np.log(np.tan(phi)), -np.pi / 4), COHERENT)


def coupling_for(model: ErrorModel) -> Coupling:
    if model.kind == INCOHERENT:
        return real_coupling(model.p)
    return complex_coupling(model.phi)


@dataclass
class CouplingField:
    """One disorder realization: +-1 bond-sign grids plus the coupling constant.

    ``eta_h[n, i]`` and ``eta_v[n, i]`` are the horizontal/vertical bond signs
    of layer n (0-based internally) at site i.
    """

    M: int
    L: int
    eta_h: np.ndarray
    eta_v: np.ndarray
    coupling: Coupling
    model: ErrorModel
    seed: int

    def __post_init__(self):
        for grid in (self.eta_h, self.eta_v):
            if grid.shape != (self.L, self.M):
                raise InvalidInput(f"grid shape {grid.shape} != ({self.L}, {self.M})")
            if not np.isin(grid, (-1, 1)).all():
                raise InvalidInput("bond signs must be +-1")

    def to_json(self) -> str:
        return json.dumps(
            {
                "M": self.M,
                "L": self.L,
                "seed": self.seed,
                "model": self.model.to_dict(),
                "eta_h": _pack_signs(self.eta_h),
                "eta_v": _pack_signs(self.eta_v),
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "CouplingField":
        d = json.loads(text)
        model = ErrorModel.from_dict(d["model"])
        return cls(
            M=d["M"],
            L=d["L"],
            eta_h=_unpack_signs(d["eta_h"], d["L"], d["M"]),
            eta_v=_unpack_signs(d["eta_v"], d["L"], d["M"]),
            coupling=coupling_for(model),
            model=model,
            seed=d["seed"],
        )


def _pack_signs(grid: np.ndarray) -> str:
    # bit i of row n is the sign of bond (n, i): 0 -> +1, 1 -> -1
    bits = (grid < 0).astype(np.uint8)
    return base64.b64encode(np.packbits(bits, axis=None).tobytes()).decode("ascii")


def _unpack_signs(blob: str, L: int, M: int) -> np.ndarray:
    raw = np.frombuffer(base64.b64decode(blob), dtype=np.uint8)
    bits = np.unpackbits(raw, count=L * M).reshape(L, M)
    return np.where(bits == 1, -1, 1).astype(np.int8)


def sample_field(model: ErrorModel, M: int, L: int, seed: int) -> CouplingField:
    """Draw an i.i.d. bond-sign realization, deterministically from ``seed``.

    A counter-based Philox stream keyed by ``seed`` fills the h-grid and then
    the v-grid in row-major order, so the result is independent of caller
    evaluation order and safe to produce from parallel workers.
    """
    if M % 2 != 0 or M < 2:
        raise InvalidGeometry(f"M={M} must be even (half cut, mover grading)")
    return _sample_field_any_M(model, M, L, seed)


def _sample_field_any_M(model: ErrorModel, M: int, L: int, seed: int) -> CouplingField:
    """sample_field without the even-M requirement.

    Pure state evolution and the dense cross-checks are well defined at odd
    M; only half-cut bipartitions and the network mover grading need it even.
    """
    if L < 1:
        raise InvalidGeometry(f"L={L} must be >= 1")
    rng = np.random.Generator(np.random.Philox(key=seed % (1 << 64)))
    flips = rng.random(size=(2, L, M)) < model.p
    eta = np.where(flips, -1, 1).astype(np.int8)
    return CouplingField(
        M=M,
        L=L,
        eta_h=eta[0],
        eta_v=eta[1],
        coupling=coupling_for(model),
        model=model,
        seed=seed,
    )


def layer_parameters(field: CouplingField, n: int):
    """Couplings (kappa, kappa_tilde) of layer n (1-based), as complex arrays.

    kappa_i = J * eta_v[n, i].  For real J, kappa_tilde_i = -(1/2) ln tanh(J)
    on eta_h = +1 bonds; a flipped bond adds +i pi/2 (fixed branch of the log
    of a negative argument; the opposite branch differs only by an overall
    phase of the layer operator).  For complex J, kappa_tilde is purely
    imaginary: i (phi - (1 - eta_h) pi/4).
    """
    if not 1 <= n <= field.L:
        raise InvalidInput(f"layer index {n} outside [1, {field.L}]")
    eta_h = field.eta_h[n - 1].astype(np.float64)
    eta_v = field.eta_v[n - 1].astype(np.float64)
    J = field.coupling.J
    kappa = J * eta_v
    if field.coupling.is_complex:
        phi = field.model.phi
        kappa_tilde = 1j * (phi - (1.0 - eta_h) * np.pi / 4)
    else:
        x = np.tanh(J.real * eta_h)
        kappa_tilde = -0.5 * np.log(np.abs(x)) + np.where(x < 0, 0.5j * np.pi, 0.0)
    return kappa.astype(np.complex128), kappa_tilde.astype(np.complex128)
