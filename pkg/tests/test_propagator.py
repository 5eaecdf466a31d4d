import numpy as np
import pytest

from fiberbb.fock import FockOperator, op_distance
from fiberbb.hamiltonian import BathMode, FiberModel, build_bilinear, build_segment
from fiberbb.monomials import EIGHT_STEP, OMEGA12, OMEGA1234
from fiberbb.propagator import (
    evolve,
    ideal_transport,
    inhomogeneous_decay,
    lamb_shift_check,
    lamb_shift_generator,
    pair_cancellation_residual,
    propagator,
    qubit_state,
    scaling_order,
)


def fiber(n=8, tau=0.1, g=0.1, w2=1.05, **kw):
    return FiberModel(n, tau, 1.0, 1.0, w2, (BathMode(0.7),), **kw).with_coupling(g, 0.8 * g)


class TestEvolve:
    def test_uncoupled_is_perfect(self):
        m = fiber(g=0.0)
        for controls in (None, OMEGA12, OMEGA1234):
            r = evolve(m, controls)
            assert r.fidelity == pytest.approx(1.0, abs=1e-10)
            assert r.purity == pytest.approx(1.0, abs=1e-10)

    def test_unitary_and_bounds(self):
        m = fiber(epsilon=0.01)
        r = evolve(m, OMEGA12, draw=1)
        assert abs(np.linalg.norm(r.unitary.matrix, 2) - 1) < 1e-10
        assert 0 <= r.fidelity <= 1 + 1e-10
        assert 0.5 - 1e-10 <= r.purity <= 1 + 1e-10

    def test_coherence_decays_without_control(self):
        prev = 0.5 + 1e-12
        for n in (2, 4, 6, 8):
            c = evolve(fiber(n=n, tau=0.1, g=0.3), None).coherence
            assert c < prev
            prev = c

    @pytest.mark.parametrize("g,tau", [(0.05, 0.1), (0.2, 0.1), (0.5, 0.2), (1.0, 0.1)])
    def test_bb_never_worse(self, g, tau):
        m = fiber(n=16, tau=tau, g=g)
        assert evolve(m, OMEGA12).fidelity >= evolve(m, None).fidelity

    def test_bb_ten_times_better(self):
        m = fiber(n=16, tau=0.1, g=0.3)
        off = 1 - evolve(m, None).fidelity
        on = 1 - evolve(m, OMEGA12).fidelity
        assert on <= 0.1 * off

    def test_thermal_bath_initial_state(self):
        m = fiber()
        st = qubit_state(m, bath_occupation=0.2)
        assert st.is_density
        r = evolve(m, OMEGA12, st)
        assert 0 < r.fidelity <= 1 + 1e-10

    def test_diagnostics(self):
        r = evolve(fiber(n=4), OMEGA12, diagnostics=True)
        assert [d["segment"] for d in r.diagnostics] == [1, 2, 3, 4]

    def test_rejects_bad_inputs(self):
        m = fiber()
        with pytest.raises(ValueError):
            evolve(m, OMEGA12, qubit_state(fiber(dim_per_mode=3)))
        with pytest.raises(ValueError):
            evolve(m, OMEGA12, extra=FockOperator(m.space, np.triu(np.ones((m.space.dim,) * 2))))
        with pytest.raises(ValueError):
            evolve(fiber(n=6), OMEGA1234)


class TestPairResidual:
    def test_zero_without_coupling(self):
        seg = build_segment(fiber(g=0.0))
        assert pair_cancellation_residual(seg, 0.1) < 1e-12

    def test_second_order(self):
        seg = build_segment(fiber(g=0.01))
        taus = [1e-2, 5e-3, 2.5e-3]
        r = [pair_cancellation_residual(seg, t) for t in taus]
        slope = np.polyfit(np.log(taus), np.log(r), 1)[0]
        assert slope == pytest.approx(2.0, abs=0.05)

    def test_leading_term_matches_commutator(self):
        # e^{-iH t} Pi e^{-iH t} Pi = e^{-i(H0+V)t} e^{-i(H0-V)t} ~ e^{-2iH0 t - t^2 [H0+V, H0-V]/2}
        m = fiber(g=0.01)
        seg = build_segment(m)
        tau = 1e-3
        c = seg.H0.matrix @ seg.HIl.matrix - seg.HIl.matrix @ seg.H0.matrix
        predicted = tau ** 2 * np.linalg.norm(c, 2)
        assert pair_cancellation_residual(seg, tau) == pytest.approx(predicted, rel=0.02)


class TestScaling:
    def test_first_order_with_bb(self):
        m = fiber(n=8, tau=0.2, g=0.1)
        fit = scaling_order(m, OMEGA12, [0.2, 0.1, 0.05, 0.025], total_time=1.6)
        assert fit.order == pytest.approx(1.0, abs=0.15)

    def test_flat_without_bb(self):
        m = fiber(n=8, tau=0.2, g=0.1)
        fit = scaling_order(m, None, [0.2, 0.1, 0.05, 0.025], total_time=1.6)
        assert fit.order < 0.3

    def test_degenerate_fit(self):
        fit = scaling_order(fiber(g=0.0), OMEGA12, [0.2, 0.1], total_time=0.8)
        assert fit.degenerate

    def test_eight_step_degenerate_first_order(self):
        errs = []
        for tau in (0.1, 0.05, 0.025):
            m = FiberModel(int(round(1.6 / tau)), tau, 1.0, 1.0, 1.0, (BathMode(0.7),),
                           degenerate=True).with_coupling(0.1, 0.07)
            extra = build_bilinear(m, "A", [0.05, 0.05, 0.03, 0.03, 0.02, 0.02]) + build_bilinear(m, "B", [0.04, 0.04])
            errs.append(op_distance(propagator(m, EIGHT_STEP, extra), ideal_transport(m), phase_invariant=True))
        assert errs[0] / errs[1] == pytest.approx(2.0, rel=0.1)
        assert errs[1] / errs[2] == pytest.approx(2.0, rel=0.1)


class TestLambShift:
    def test_generator_hermitian(self):
        rep = lamb_shift_check(fiber(g=0.05), tau=0.05)
        assert rep.hermiticity_residual < 1e-12
        assert rep.purity_change < 1e-8

    def test_zero_coupling(self):
        assert lamb_shift_generator(fiber(g=0.0)).norm() == 0

    def test_correction_improves_pair(self):
        rep = lamb_shift_check(fiber(g=0.05), tau=0.01)
        assert rep.pair_residual_corrected < 0.1 * rep.pair_residual_plain


class TestInhomogeneous:
    def test_zero_epsilon(self):
        d = inhomogeneous_decay(fiber(), OMEGA12, 10)
        assert d.mean == 1.0 and d.stderr == 0.0

    def test_ordering_in_epsilon(self):
        est = [inhomogeneous_decay(fiber(epsilon=e), OMEGA12, 30) for e in (1e-3, 3e-3, 1e-2)]
        for a, b in zip(est, est[1:]):
            assert a.mean - b.mean > 3 * np.hypot(a.stderr, b.stderr)

    def test_longer_fiber_decays_more(self):
        a = inhomogeneous_decay(fiber(n=8, epsilon=1e-2), OMEGA12, 30)
        b = inhomogeneous_decay(fiber(n=16, epsilon=1e-2), OMEGA12, 30)
        assert a.mean - b.mean > 3 * np.hypot(a.stderr, b.stderr)

    def test_reproducible(self):
        m = fiber(epsilon=1e-2, seed=9)
        assert inhomogeneous_decay(m, OMEGA12, 5).samples == inhomogeneous_decay(m, OMEGA12, 5).samples
