"""Free-fermion hybrid circuits from disordered Ising couplings.

Simulation of (1+1)D Majorana circuits built from random-bond Ising
transfer matrices (with real couplings for bit-flip disorder and complex
couplings for coherent rotations), their long-time Gaussian states and
entanglement phases, and the dual 2D class-D scattering networks with
their transport and topological invariants.
"""

from .circuits import (APBC, EVOLUTION, PARTITION, PBC, Gate, GateSchedule,
                       build_schedule, single_particle_blocks)
from .disorder import (COHERENT, INCOHERENT, Coupling, CouplingField,
                       ErrorModel, complex_coupling, layer_parameters,
                       real_coupling, sample_field)
from .ensemble import EnsembleRecord, ScanSpec, resume, run_scan
from .entanglement import (EntanglementSpectrum, correlation_profile, entropy,
                           half_cut_entropy, half_cut_spectrum, reduce,
                           spectrum, zero_mode_and_gap)
from .gaussian import (CorrelationMatrix, EvolutionReport, apply_gate, evolve,
                       fast_evolve, gate_blocks, initial_state, parity,
                       pfaffian_sign)
from .network import (QuasienergySpectrum, ScatteringState, compose_network,
                      conductivity, localization_length, quasienergies,
                      topological_invariant)
from .oracle import dense_oracle, dense_parity
from .scaling import (CollapseResult, collapse, crossing_estimate,
                      fit_log_conductance, fit_zero_mode_decay)

__version__ = "0.1.0"

__all__ = [
    "APBC", "COHERENT", "CollapseResult", "CorrelationMatrix", "Coupling",
    "CouplingField", "EVOLUTION", "EnsembleRecord", "EntanglementSpectrum",
    "ErrorModel", "EvolutionReport", "Gate", "GateSchedule", "INCOHERENT",
    "PARTITION", "PBC", "QuasienergySpectrum", "ScanSpec", "ScatteringState",
    "apply_gate", "build_schedule", "collapse", "complex_coupling",
    "compose_network", "conductivity", "correlation_profile",
    "crossing_estimate", "dense_oracle", "dense_parity", "entropy", "evolve",
    "fast_evolve", "fit_log_conductance", "fit_zero_mode_decay", "gate_blocks",
    "half_cut_entropy", "half_cut_spectrum", "initial_state",
    "layer_parameters", "localization_length", "parity", "pfaffian_sign",
    "quasienergies", "real_coupling", "reduce", "resume", "run_scan",
    "sample_field", "single_particle_blocks", "spectrum",
    "topological_invariant", "zero_mode_and_gap",
]
