import numpy as np
import pytest

from conftest import random_schedule
from fermicirc import (ErrorModel, build_schedule, correlation_profile,
                       entropy, evolve, initial_state, reduce, sample_field,
                       spectrum, zero_mode_and_gap)
from fermicirc.entanglement import (EntanglementSpectrum, half_cut_entropy,
                                    half_cut_spectrum, profile_decay_fit)
from fermicirc.errors import InvalidInput
from fermicirc.gaussian import OCCUPATIONS, VACUUM, _layer_AB
from fermicirc.oracle import evolve_state, reduced_density_spectrum

ENTROPY_HALF = 0.562335144618808350288030315224  # S of a single lambda = 0.5 level
OMEGA = np.array([[0.0, 1.0], [-1.0, 0.0]])


def random_state(rng, M, steps=8):
    sched = random_schedule(rng, M=M, min_steps=steps, max_steps=steps)
    occ = [int(b) for b in rng.integers(0, 2, size=M)]
    rep = evolve(initial_state(OCCUPATIONS, M, occupations=occ), sched,
                 tol_conv=float("inf"))
    return rep.C_final, sched, occ


class TestReduce:
    def test_full_region_is_identity_map(self):
        C = initial_state(VACUUM, 4)
        assert (reduce(C, (1, 4)) == C.C).all()

    def test_single_site_of_vacuum(self):
        C = initial_state(VACUUM, 4)
        assert np.allclose(reduce(C, (2, 2)), -OMEGA)

    def test_region_bounds(self):
        C = initial_state(VACUUM, 4)
        with pytest.raises(InvalidInput):
            reduce(C, (0, 2))
        with pytest.raises(InvalidInput):
            reduce(C, (3, 5))


class TestSpectrum:
    def test_canonical_block(self):
        lam = 0.73
        spec = spectrum(lam * OMEGA)
        assert np.allclose(spec.lambdas, [lam])

    def test_product_state_half_cut_all_ones(self):
        spec = half_cut_spectrum(initial_state(VACUUM, 6))
        assert np.allclose(spec.lambdas, 1.0)

    def test_asymmetry_rejected(self):
        with pytest.raises(InvalidInput):
            spectrum(np.array([[0.0, 0.5], [-0.4, 0.0]]))

    def test_complement_spectra_agree(self, rng):
        for _ in range(5):
            C, _s, _o = random_state(rng, 6)
            a = spectrum(reduce(C, (1, 3))).lambdas
            b = spectrum(reduce(C, (4, 6))).lambdas
            assert np.abs(np.sort(a) - np.sort(b)).max() < 1e-9

    def test_matches_many_body_reduced_spectrum(self, rng):
        # lambda_r reproduce the exact reduced-density-matrix eigenvalues
        # through prod_r (1 +- lambda_r)/2
        for _ in range(3):
            C, sched, occ = random_state(rng, 6)
            lam = half_cut_spectrum(C).lambdas
            probs = np.ones(1)
            for l in lam:
                probs = np.concatenate([probs * (1 - l) / 2, probs * (1 + l) / 2])
            psi = evolve_state(sched, occ)
            rho_spec = reduced_density_spectrum(psi, 6, 3)
            assert np.abs(np.sort(probs) - np.sort(rho_spec)).max() < 1e-8

    def test_invariant_under_local_rotations(self, rng):
        # unitary gates acting wholly inside or outside the region leave
        # the half-cut spectrum unchanged
        from fermicirc.circuits import Gate
        C, _s, _o = random_state(rng, 6)
        base = half_cut_spectrum(C).lambdas
        for (a, b) in [(1, 2), (3, 6), (7, 10), (11, 12)]:
            _A, B = _layer_AB(6, [Gate(a, b, 1j * 0.37, 1, "H")])
            rotated = type(C)(B @ C.C @ B.T, 6)
            assert np.abs(half_cut_spectrum(rotated).lambdas - base).max() < 1e-9


class TestEntropy:
    def test_unentangled(self):
        assert entropy(EntanglementSpectrum(np.array([1.0, 1.0]))) == 0.0

    def test_maximally_mixed_mode(self):
        assert abs(entropy(EntanglementSpectrum(np.array([0.0]))) - np.log(2)) < 1e-15

    def test_frozen_half_level(self):
        assert abs(entropy(EntanglementSpectrum(np.array([0.5]))) - ENTROPY_HALF) < 1e-15

    def test_additive_over_levels(self, rng):
        lams = rng.uniform(0, 1, size=5)
        total = entropy(EntanglementSpectrum(np.sort(lams)))
        parts = sum(entropy(EntanglementSpectrum(np.array([l]))) for l in lams)
        assert abs(total - parts) < 1e-12

    def test_complementarity(self, rng):
        for _ in range(5):
            C, _s, _o = random_state(rng, 4)
            s_in = entropy(spectrum(reduce(C, (1, 2))))
            s_out = entropy(spectrum(reduce(C, (3, 4))))
            assert abs(s_in - s_out) < 1e-8

    def test_zero_mode_floor(self, rng):
        # each near-zero level contributes at least about ln 2
        for _ in range(5):
            C, _s, _o = random_state(rng, 6)
            spec = half_cut_spectrum(C)
            n_zero = int((spec.lambdas < 1e-6).sum())
            assert entropy(spec) >= np.log(2) * n_zero - 1e-6


class TestZeroModeAndGap:
    def test_ordering(self):
        lam0, lam1 = zero_mode_and_gap(EntanglementSpectrum(np.array([0.0, 0.9, 1.0])))
        assert (lam0, lam1) == (0.0, 0.9)

    def test_needs_two_levels(self):
        with pytest.raises(InvalidInput):
            zero_mode_and_gap(EntanglementSpectrum(np.array([0.5])))


class TestCorrelationProfile:
    def test_product_state_is_flat_zero(self):
        prof = correlation_profile(initial_state(VACUUM, 8))
        assert max(v for _d, v in prof) < 1e-15

    def test_distances_on_ring(self):
        prof = correlation_profile(initial_state(VACUUM, 8))
        assert [d for d, _v in prof] == list(range(2, 9))

    def test_insulating_state_decays_exponentially(self):
        # converged ordered-phase state: ln(profile) vs d is linear with
        # negative slope; even distances vanish identically (Majorana
        # sublattice structure), the fit runs over the odd ones
        field = sample_field(ErrorModel.incoherent(0.05), 16, 80, seed=21)
        sched = build_schedule(field)
        occ = [1, 0] * 8
        occ[0] = 0  # odd parity hosts the ground state deep in the ordered phase
        occ[1] = 1
        rep = evolve(initial_state(OCCUPATIONS, 16, occupations=occ), sched,
                     tol_conv=float("inf"))
        prof = correlation_profile(rep.C_final)
        length, r2 = profile_decay_fit(prof, 4, 11)
        assert length > 0 and r2 > 0.9
