"""Desk-scale figure presets: reduced sizes and ensembles for minutes-long runs.

The bundled presets shrink circumferences to M <= 80 and ensembles to
N <= 200, so phase boundaries come out with widened tolerances compared to
production-scale scans.
"""

from __future__ import annotations

import numpy as np

from .disorder import COHERENT, INCOHERENT
from .ensemble import (ScanSpec, TASK_CONDUCTIVITY, TASK_ENTANGLEMENT,
                       TASK_INVARIANT)

PI = float(np.pi)


def _phis(*multiples):
    return [m * PI for m in multiples]


def fig4_specs(base_seed=20_240):
    """Bit-flip line entanglement scan: spectrum edge and half-cut entropy vs p."""
    return {
        "entanglement": ScanSpec(
            task=TASK_ENTANGLEMENT, model_kind=INCOHERENT,
            values=[0.02, 0.04, 0.06, 0.08, 0.10, 0.1093, 0.12, 0.14,
                    0.18, 0.24, 0.30, 0.40],
            M_values=[20, 32, 40], realizations=32, base_seed=base_seed,
        ),
    }


def fig5_specs(base_seed=20_250):
    """Twirl-line conductivity vs length on wide cylinders (M = 5L)."""
    return {
        "conductivity": ScanSpec(
            task=TASK_CONDUCTIVITY, model_kind=COHERENT,
            values=_phis(0.05, 0.06, 0.07, 0.08, 0.09, 0.095, 0.105,
                         0.12, 0.15, 0.2),
            M_values=[40, 60, 80, 100, 120, 140, 160],
            aspect="M=5L", realizations=100, base_seed=base_seed,
        ),
    }


def fig6_specs(base_seed=20_260):
    """Twirl-line entanglement scan across the coherent transition."""
    return {
        "entanglement": ScanSpec(
            task=TASK_ENTANGLEMENT, model_kind=COHERENT,
            values=_phis(0.02, 0.04, 0.06, 0.08, 0.095, 0.11, 0.13,
                         0.15, 0.18),
            M_values=[20, 32, 40], realizations=32, base_seed=base_seed,
        ),
    }


def fig7_specs(base_seed=20_270):
    """Logarithmic-phase entropy growth plus the insulating zero-mode decay."""
    return {
        "entanglement": ScanSpec(
            task=TASK_ENTANGLEMENT, model_kind=COHERENT,
            values=_phis(0.12, 0.15, 0.18),
            M_values=[20, 40, 60, 80], realizations=32, base_seed=base_seed,
        ),
        "zeromode": ScanSpec(
            task=TASK_ENTANGLEMENT, model_kind=COHERENT,
            values=_phis(0.03, 0.05, 0.07),
            M_values=[20, 40, 60, 80], realizations=32, base_seed=base_seed + 1,
        ),
    }


def figB_specs(base_seed=20_250):
    """Raw (unscaled) conductivity tables; same grid as the collapsed figure."""
    return fig5_specs(base_seed)


FIGURES = {
    "fig4": fig4_specs,
    "fig5": fig5_specs,
    "fig6": fig6_specs,
    "fig7": fig7_specs,
    "figB": figB_specs,
}


def invariant_map_spec(base_seed=20_280):
    """Invariant sampling on both sides of the bit-flip threshold."""
    return ScanSpec(
        task=TASK_INVARIANT, model_kind=INCOHERENT,
        values=[0.02, 0.06, 0.30, 0.40],
        M_values=[16], L_values=[80], realizations=64, base_seed=base_seed,
    )
