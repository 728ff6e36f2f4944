"""Compile a coupling-field realization into an ordered two-Majorana gate schedule.

Gates follow the convention ``T = exp(i z gamma_a gamma_b)`` with 1-based
Majorana indices a, b in [1, 2M].  One-body Ising terms become H-gates on
pairs (2i-1, 2i) with z = -kappa_tilde, two-body terms become V-gates on
pairs (2i, 2i+1) with z = -kappa; the wrap-around V-gate sits on (2M, 1)
and flips sign under antiperiodic boundary conditions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from typing import Iterator, List, Tuple

import numpy as np

from .disorder import CouplingField, layer_parameters
from .errors import InvalidInput

PBC = "pbc"
APBC = "apbc"
EVOLUTION = "evolution"
PARTITION = "partition"

GATE_H = "H"
GATE_V = "V"
GATE_VB = "Vboundary"


@dataclass(frozen=True)
class Gate:
    """exp(i z gamma_a gamma_b) placed in a layer; a, b are 1-based."""

    a: int
    b: int
    z: complex
    layer: int
    kind: str


@dataclass
class GateSchedule:
    """Ordered gate list; list order is application order (earliest first)."""

    M: int
    L: int
    bc: str
    q: int
    ordering: str
    complex_couplings: bool
    gates: List[Gate] = dc_field(default_factory=list)

    def layers(self) -> Iterator[Tuple[str, int, List[Gate]]]:
        """Yield (kind, layer, gates) groups in application order."""
        group: List[Gate] = []
        for g in self.gates:
            if group and (g.kind[0] != group[0].kind[0] or g.layer != group[0].layer):
                yield group[0].kind[0], group[0].layer, group
                group = []
            group.append(g)
        if group:
            yield group[0].kind[0], group[0].layer, group

    @property
    def n_layers(self) -> int:
        return 2 * self.L - (1 if self.ordering == PARTITION else 0)

    def to_json(self) -> str:
        return json.dumps(
            {
                "M": self.M,
                "L": self.L,
                "bc": self.bc,
                "q": self.q,
                "ordering": self.ordering,
                "complex_couplings": self.complex_couplings,
                "gates": [
                    {"layer": g.layer, "kind": g.kind, "a": g.a, "b": g.b,
                     "re_z": g.z.real, "im_z": g.z.imag}
                    for g in self.gates
                ],
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "GateSchedule":
        d = json.loads(text)
        gates = [
            Gate(g["a"], g["b"], complex(g["re_z"], g["im_z"]), g["layer"], g["kind"])
            for g in d["gates"]
        ]
        return cls(d["M"], d["L"], d["bc"], d["q"], d["ordering"],
                   d["complex_couplings"], gates)


def build_schedule(field: CouplingField, bc: str = PBC, q: int = 0,
                   ordering: str = EVOLUTION) -> GateSchedule:
    """Compile a field into layers V_1 H_1 V_2 H_2 ... (earliest first).

    ``ordering="partition"`` drops the trailing H-layer.  q = 1 flips the
    column of vertical bond signs at the boundary site before parameter
    extraction, which turns pbc into apbc and vice versa.
    """
    if bc not in (PBC, APBC):
        raise InvalidInput(f"bc must be '{PBC}' or '{APBC}'")
    if q not in (0, 1):
        raise InvalidInput("q must be 0 or 1")
    if ordering not in (EVOLUTION, PARTITION):
        raise InvalidInput(f"unknown ordering {ordering!r}")
    M = field.M
    if q == 1:
        field = CouplingField(
            M=M, L=field.L, eta_h=field.eta_h,
            eta_v=np.concatenate([field.eta_v[:, :-1], -field.eta_v[:, -1:]], axis=1),
            coupling=field.coupling, model=field.model, seed=field.seed,
        )
    bsign = -1.0 if bc == APBC else 1.0
    gates: List[Gate] = []
    for n in range(1, field.L + 1):
        kappa, kappa_tilde = layer_parameters(field, n)
        for i in range(1, M):
            gates.append(Gate(2 * i, 2 * i + 1, -kappa[i - 1], n, GATE_V))
        gates.append(Gate(2 * M, 1, -bsign * kappa[M - 1], n, GATE_VB))
        if ordering == PARTITION and n == field.L:
            break
        for i in range(1, M + 1):
            gates.append(Gate(2 * i - 1, 2 * i, -kappa_tilde[i - 1], n, GATE_H))
    return GateSchedule(M, field.L, bc, q, ordering,
                        field.coupling.is_complex, gates)


def single_particle_block(z: complex) -> np.ndarray:
    """Adjoint action of exp(i z gamma_a gamma_b) on (gamma_a, gamma_b).

    Equals exp(-2 z Y) with Y the second Pauli matrix, so a gate of strength
    kappa (z = -kappa) maps to exp(2 kappa Y).
    """
    c, s = np.cosh(2 * z), np.sinh(2 * z)
    return np.array([[c, 1j * s], [-1j * s, c]])


def single_particle_blocks(schedule: GateSchedule):
    """(a, b, 2x2 block) per gate, in application order; a, b 1-based."""
    return [(g.a, g.b, single_particle_block(g.z)) for g in schedule.gates]
