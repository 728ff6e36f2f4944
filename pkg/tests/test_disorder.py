import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fermicirc import (COHERENT, INCOHERENT, CouplingField, ErrorModel,
                       complex_coupling, layer_parameters, real_coupling,
                       sample_field)
from fermicirc.errors import DivergentCoupling, InvalidGeometry, InvalidInput

# frozen closed-form values (30-digit evaluation of the defining formulas)
J_AT_THRESHOLD = 1.04895563762766546660894036081      # (1/2) ln((1-p)/p), p=0.1093
RE_J_COHERENT = 0.589412229652506792952516051117      # -(1/2) ln tan(0.095 pi)
KTILDE_J1 = 0.136170734455915776708187478229          # -(1/2) ln tanh(1)


class TestRealCoupling:
    def test_symmetric_point(self):
        assert real_coupling(0.5).J == 0

    def test_threshold_value(self):
        assert abs(real_coupling(0.1093).J - J_AT_THRESHOLD) < 1e-14

    @pytest.mark.parametrize("p", [0.0, 1.0])
    def test_divergent(self, p):
        with pytest.raises(DivergentCoupling):
            real_coupling(p)

    def test_real_and_positive_below_half(self):
        J = real_coupling(0.1).J
        assert J.imag == 0 and J.real > 0

    @given(st.floats(min_value=1e-6, max_value=1 - 1e-6))
    @settings(max_examples=50, deadline=None)
    def test_inverts_flip_ratio(self, p):
        J = real_coupling(p).J
        assert abs(np.exp(2 * J) * p / (1 - p) - 1) < 1e-12


class TestComplexCoupling:
    def test_quarter_pi(self):
        J = complex_coupling(np.pi / 4).J
        assert abs(J - (-1j * np.pi / 4)) < 1e-15

    def test_frozen_value(self):
        J = complex_coupling(0.095 * np.pi).J
        assert abs(J.real - RE_J_COHERENT) < 1e-14
        assert abs(J.imag + np.pi / 4) < 1e-15

    def test_divergent(self):
        with pytest.raises(DivergentCoupling):
            complex_coupling(0.0)

    @given(st.floats(min_value=1e-4, max_value=np.pi / 4))
    @settings(max_examples=50, deadline=None)
    def test_inverts_tan(self, phi):
        J = complex_coupling(phi).J
        assert abs(np.exp(-2 * J) - 1j * np.tan(phi)) < 1e-10


class TestSampleField:
    def test_all_plus_at_p0(self):
        field = sample_field(ErrorModel.coherent(0.1, p=0.0), 8, 10, seed=3)
        assert (field.eta_h == 1).all() and (field.eta_v == 1).all()

    def test_all_minus_at_p1(self):
        field = sample_field(ErrorModel.coherent(0.1, p=1.0), 8, 10, seed=3)
        assert (field.eta_h == -1).all() and (field.eta_v == -1).all()

    def test_half_probability_frequency(self):
        # 10^6 bonds; binomial 3 sigma = 0.0015
        field = sample_field(ErrorModel.incoherent(0.5), 100, 5000, seed=7)
        frac = np.mean(np.concatenate([field.eta_h, field.eta_v]) == -1)
        assert abs(frac - 0.5) < 0.0015

    @pytest.mark.parametrize("p", [0.1, 0.3, 0.5])
    def test_frequency_within_4_sigma(self, p):
        field = sample_field(ErrorModel.incoherent(p), 50, 1200, seed=11)
        n = field.eta_h.size + field.eta_v.size
        assert n >= 1e5
        frac = np.mean(np.concatenate([field.eta_h, field.eta_v]) == -1)
        assert abs(frac - p) < 4 * np.sqrt(p * (1 - p) / n)

    def test_bitwise_reproducible(self):
        a = sample_field(ErrorModel.incoherent(0.3), 10, 20, seed=99)
        b = sample_field(ErrorModel.incoherent(0.3), 10, 20, seed=99)
        assert (a.eta_h == b.eta_h).all() and (a.eta_v == b.eta_v).all()

    def test_seed_changes_grids(self):
        a = sample_field(ErrorModel.incoherent(0.3), 10, 20, seed=99)
        b = sample_field(ErrorModel.incoherent(0.3), 10, 20, seed=100)
        assert (a.eta_h != b.eta_h).any()

    def test_odd_M_rejected(self):
        with pytest.raises(InvalidGeometry):
            sample_field(ErrorModel.incoherent(0.3), 7, 5, seed=0)

    def test_json_roundtrip(self):
        field = sample_field(ErrorModel.coherent_twirl(0.08 * np.pi), 6, 9, seed=4)
        back = CouplingField.from_json(field.to_json())
        assert (back.eta_h == field.eta_h).all()
        assert (back.eta_v == field.eta_v).all()
        assert back.coupling.J == field.coupling.J
        assert back.model == field.model


class TestErrorModel:
    def test_twirl_line(self):
        m = ErrorModel.coherent_twirl(0.05 * np.pi)
        assert abs(m.p - np.sin(0.05 * np.pi) ** 2) < 1e-15

    def test_incoherent_carries_no_phi(self):
        with pytest.raises(InvalidInput):
            ErrorModel(INCOHERENT, 0.1, 0.3)

    def test_domains(self):
        with pytest.raises(InvalidInput):
            ErrorModel.incoherent(1.2)
        with pytest.raises(InvalidInput):
            ErrorModel.coherent(np.pi / 3, 0.1)


class TestLayerParameters:
    def test_real_plus_branch(self):
        from fermicirc.disorder import Coupling
        eta = np.ones((3, 4), dtype=np.int8)
        field = CouplingField(4, 3, eta, eta, Coupling(1.0 + 0j, INCOHERENT),
                              ErrorModel.incoherent(0.3), 0)
        kappa, kt = layer_parameters(field, 1)
        assert np.allclose(kappa, 1.0)
        assert np.allclose(kt, KTILDE_J1)
        assert np.abs(kt.imag).max() == 0

    def test_real_minus_branch(self):
        from fermicirc.disorder import Coupling
        eta = np.ones((2, 4), dtype=np.int8)
        eta_h = eta.copy()
        eta_h[0, 2] = -1
        field = CouplingField(4, 2, eta_h, eta, Coupling(1.0 + 0j, INCOHERENT),
                              ErrorModel.incoherent(0.3), 0)
        _, kt = layer_parameters(field, 1)
        assert abs(kt[2] - (KTILDE_J1 + 0.5j * np.pi)) < 1e-14
        assert abs(kt[1] - KTILDE_J1) < 1e-14

    def test_complex_purely_imaginary(self):
        phi = 0.1 * np.pi
        field = sample_field(ErrorModel.coherent(phi, p=0.5), 20, 10, seed=2)
        for n in (1, 5, 10):
            _, kt = layer_parameters(field, n)
            assert np.abs(kt.real).max() == 0
            expected = np.where(field.eta_h[n - 1] == 1, phi, phi - np.pi / 2)
            assert np.allclose(kt.imag, expected)

    def test_layer_bounds(self):
        field = sample_field(ErrorModel.incoherent(0.2), 4, 3, seed=1)
        with pytest.raises(InvalidInput):
            layer_parameters(field, 0)
        with pytest.raises(InvalidInput):
            layer_parameters(field, 4)
