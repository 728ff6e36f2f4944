import numpy as np
import pytest

from fermicirc import ErrorModel, build_schedule
from fermicirc.circuits import EVOLUTION, PARTITION, PBC, APBC
from fermicirc.disorder import _sample_field_any_M as make_field


def random_schedule(rng, M=None, min_steps=6, max_steps=10, p=0.3):
    """Random schedule mixing both coupling types, boundary and ordering toggles."""
    M = M or int(rng.choice([2, 3, 4]))
    if rng.random() < 0.5:
        model = ErrorModel.incoherent(p)
    else:
        model = ErrorModel.coherent_twirl(float(rng.uniform(0.03, 0.22)) * np.pi)
    L = int(rng.integers(min_steps, max_steps + 1))
    field = make_field(model, M, L, int(rng.integers(0, 2**32)))
    return build_schedule(
        field,
        bc=PBC if rng.random() < 0.5 else APBC,
        q=int(rng.integers(0, 2)),
        ordering=EVOLUTION if rng.random() < 0.5 else PARTITION,
    )


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
