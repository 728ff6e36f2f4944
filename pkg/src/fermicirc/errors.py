"""Exception types raised across the package."""


class FermicircError(Exception):
    """Base class for all package errors."""


class DivergentCoupling(FermicircError):
    """Coupling constant is infinite for the requested parameters."""


class InvalidGeometry(FermicircError):
    """Lattice dimensions violate a geometric precondition."""


class InvalidInput(FermicircError):
    """Malformed argument (wrong length, asymmetry beyond tolerance, ...)."""


class SingularUpdate(FermicircError):
    """Correlation-matrix update hit an (almost) exactly orthogonal post-selection."""


class IndeterminateParity(FermicircError):
    """Pfaffian magnitude too small to assign a parity sign."""


class RefusedScale(FermicircError):
    """Dense many-body computation requested beyond its size cap."""


class NumericalInstability(FermicircError):
    """Scattering composition lost unitarity / produced unusable spectra."""


class IndeterminateInvariant(FermicircError):
    """|det R'| too small to assign a sign to the topological invariant."""


class NotLocalized(FermicircError):
    """Conductance series does not decay; no localization length."""


class NotMetallic(FermicircError):
    """Conductance series does not grow with ln L; no metallic fit."""


class NoDecay(FermicircError):
    """Zero-mode series does not decay with system size."""


class CollapseInfeasible(FermicircError):
    """Curves have no overlap in y; no single-parameter collapse exists."""


class RefusedResume(FermicircError):
    """Checkpoint does not match the requested scan (or is corrupt)."""


class PointFailed(FermicircError):
    """Every realization at a sweep point was dropped."""
