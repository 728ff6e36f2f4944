import numpy as np
import pytest

from fermicirc import (ErrorModel, GateSchedule, build_schedule, sample_field,
                       single_particle_blocks)
from fermicirc.circuits import (APBC, EVOLUTION, GATE_H, GATE_V, GATE_VB,
                                PARTITION, PBC, single_particle_block)

Z2 = np.diag([1.0, -1.0])


def small_field(model=None, M=4, L=3, seed=5):
    model = model or ErrorModel.incoherent(0.3)
    return sample_field(model, M, L, seed)


class TestBuildSchedule:
    def test_gate_count_and_layout(self):
        sched = build_schedule(small_field(), ordering=EVOLUTION)
        assert len(sched.gates) == 2 * 3 * 4  # 2L layers of M gates
        kinds = [kind for kind, _n, _g in sched.layers()]
        assert kinds == ["V", "H"] * 3
        for _kind, _n, gates in sched.layers():
            assert len(gates) == 4

    def test_pair_assignments(self):
        sched = build_schedule(small_field())
        for g in sched.gates:
            if g.kind == GATE_H:
                assert (g.a, g.b) == (g.a, g.a + 1) and g.a % 2 == 1
            elif g.kind == GATE_V:
                assert (g.a, g.b) == (g.a, g.a + 1) and g.a % 2 == 0
            else:
                assert (g.a, g.b) == (2 * sched.M, 1)

    def test_partition_drops_final_h_layer(self):
        ev = build_schedule(small_field(), ordering=EVOLUTION)
        pa = build_schedule(small_field(), ordering=PARTITION)
        assert len(ev.gates) - len(pa.gates) == 4
        assert ev.n_layers == 6 and pa.n_layers == 5
        # gate multisets agree on every shared layer
        for (ke, ne, ge), (kp, np_, gp) in zip(ev.layers(), pa.layers()):
            assert (ke, ne) == (kp, np_)
            assert [(g.a, g.b, g.z) for g in ge] == [(g.a, g.b, g.z) for g in gp]

    def test_bc_toggle_touches_only_boundary_strengths(self):
        pbc = build_schedule(small_field(), bc=PBC)
        apbc = build_schedule(small_field(), bc=APBC)
        for g1, g2 in zip(pbc.gates, apbc.gates):
            if g1.kind == GATE_VB:
                assert g2.z == -g1.z
            else:
                assert g2.z == g1.z

    def test_q_flips_boundary_column(self):
        field = small_field()
        q0 = build_schedule(field, q=0)
        q1 = build_schedule(field, q=1)
        for g1, g2 in zip(q0.gates, q1.gates):
            if g1.kind == GATE_VB:
                assert g2.z == -g1.z
            else:
                assert g2.z == g1.z

    def test_deterministic(self):
        a = build_schedule(small_field())
        b = build_schedule(small_field())
        assert a.gates == b.gates

    def test_json_roundtrip(self):
        sched = build_schedule(small_field(ErrorModel.coherent_twirl(0.1 * np.pi)))
        back = GateSchedule.from_json(sched.to_json())
        assert back.gates == sched.gates
        assert back.complex_couplings and back.bc == sched.bc


class TestSingleParticleBlocks:
    def test_zero_strength_is_identity(self):
        assert np.allclose(single_particle_block(0.0), np.eye(2))

    def test_real_strength_pseudo_unitary(self, rng):
        for _ in range(20):
            z = complex(rng.normal())
            t = single_particle_block(z)
            err = np.abs(Z2 @ np.linalg.inv(t) @ Z2 - t.conj().T).max()
            assert err / np.abs(t).max() < 1e-12

    def test_complex_h_gates_unitary(self):
        field = small_field(ErrorModel.coherent_twirl(0.08 * np.pi))
        sched = build_schedule(field)
        for g in sched.gates:
            if g.kind == GATE_H:
                t = single_particle_block(g.z)
                assert np.abs(t.conj().T @ t - np.eye(2)).max() < 1e-12

    def test_complex_v_gates_swap_pseudo_unitary(self):
        # X v is pseudo-unitary: Z (Xv)^dag Z = (Xv)^{-1}
        X = np.array([[0.0, 1.0], [1.0, 0.0]])
        field = small_field(ErrorModel.coherent_twirl(0.12 * np.pi))
        sched = build_schedule(field)
        for g in sched.gates:
            if g.kind in (GATE_V, GATE_VB):
                v = single_particle_block(g.z)
                xv = X @ v
                assert np.abs(Z2 @ xv.conj().T @ Z2 - np.linalg.inv(xv)).max() < 1e-11

    def test_blocks_follow_gate_order(self):
        sched = build_schedule(small_field())
        blocks = single_particle_blocks(sched)
        assert len(blocks) == len(sched.gates)
        a, b, t = blocks[0]
        assert (a, b) == (sched.gates[0].a, sched.gates[0].b)
        assert np.allclose(t, single_particle_block(sched.gates[0].z))
