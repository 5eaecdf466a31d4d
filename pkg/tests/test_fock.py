import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fiberbb.fock import (
    FockError,
    FockOperator,
    FockSpace,
    FockState,
    annihilation,
    creation,
    matrix_exponential,
    number,
    op_distance,
    partial_trace,
    phase_rotation,
)

PHIS = [np.pi / 4, np.pi / 2, np.pi, 3 * np.pi / 2]


def random_density(space, rng):
    a = rng.standard_normal((space.dim, space.dim)) + 1j * rng.standard_normal((space.dim, space.dim))
    rho = a @ a.conj().T
    return FockState(space, rho / np.trace(rho))


def random_unitary(n, rng):
    q, r = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


class TestSpace:
    def test_dimension_and_ordering(self):
        sp = FockSpace(3, 4)
        assert sp.dim == 64
        # mode 0 slowest-varying
        assert sp.index((1, 0, 0)) == 16
        assert sp.index((0, 0, 1)) == 1
        assert sp.occupations(sp.index((2, 3, 1))) == (2, 3, 1)

    def test_dimension_cap(self):
        FockSpace(6, 4)
        with pytest.raises(FockError):
            FockSpace(7, 4)

    def test_embed_matches_kron(self):
        sp = FockSpace(2, 3)
        single = np.arange(9).reshape(3, 3).astype(complex)
        assert np.array_equal(sp.embed(single, 0), np.kron(single, np.eye(3)))
        assert np.array_equal(sp.embed(single, 1), np.kron(np.eye(3), single))


class TestLadder:
    def test_vacuum_annihilation(self):
        sp = FockSpace(1, 2)
        v = annihilation(sp, 0).matrix @ sp.vacuum().data
        assert np.allclose(v, 0)

    def test_superdiagonal_entries(self):
        b = annihilation(FockSpace(1, 4), 0).matrix
        assert np.allclose(np.diag(b, 1), np.sqrt([1, 2, 3]))
        assert np.count_nonzero(b) == 3

    def test_number_on_other_mode(self):
        sp = FockSpace(2, 3)
        state = creation(sp, 1).matrix @ sp.vacuum().data
        assert np.allclose(number(sp, 0).matrix @ state, 0 * state)

    def test_number_spectrum(self):
        assert np.allclose(number(FockSpace(1, 2), 0).matrix, np.diag([0, 1]))
        assert np.allclose(number(FockSpace(1, 4), 0).matrix, np.diag([0, 1, 2, 3]))

    def test_creation_is_adjoint(self):
        sp = FockSpace(2, 4)
        for m in range(2):
            assert np.array_equal(creation(sp, m).matrix, annihilation(sp, m).matrix.conj().T)

    def test_commutator_edge(self):
        sp = FockSpace(1, 4)
        b, bd = annihilation(sp, 0), creation(sp, 0)
        comm = (bd @ b - b @ bd).matrix
        # -1 away from the truncation edge, +3 on |3>
        assert np.allclose(comm[:3, :3], -np.eye(3))
        assert not np.isclose(comm[3, 3], -1)

    def test_bad_mode(self):
        with pytest.raises(FockError):
            annihilation(FockSpace(2, 3), 2)


class TestConjugation:
    @pytest.mark.parametrize("phi", PHIS)
    def test_single_mode_phases(self, phi):
        sp = FockSpace(1, 4)
        u = phase_rotation(sp, [phi])
        b, bd = annihilation(sp, 0), creation(sp, 0)
        assert np.abs((u @ bd @ u.dag()).matrix - np.exp(1j * phi) * bd.matrix).max() < 1e-12
        assert np.abs((u @ b @ u.dag()).matrix - np.exp(-1j * phi) * b.matrix).max() < 1e-12
        bd2 = bd @ bd
        assert np.abs((u @ bd2 @ u.dag()).matrix - np.exp(2j * phi) * bd2.matrix).max() < 1e-12

    def test_exponential_of_number(self):
        n = number(FockSpace(1, 4), 0)
        u = matrix_exponential(n, 1j * np.pi)
        assert np.allclose(u.matrix, np.diag([1, -1, 1, -1]), atol=1e-14)
        assert u.is_unitary()

    def test_zero_scale(self):
        rng = np.random.default_rng(1)
        sp = FockSpace(2, 3)
        a = FockOperator(sp, rng.standard_normal((9, 9)))
        assert np.allclose(matrix_exponential(a, 0).matrix, np.eye(9))

    def test_general_path_agrees(self):
        rng = np.random.default_rng(2)
        sp = FockSpace(1, 4)
        m = rng.standard_normal((4, 4)) * 0.3
        e = matrix_exponential(FockOperator(sp, m), 1.0).matrix
        # series oracle
        acc, term = np.eye(4, dtype=complex), np.eye(4, dtype=complex)
        for k in range(1, 40):
            term = term @ m / k
            acc = acc + term
        assert np.allclose(e, acc, rtol=1e-12, atol=1e-13)

    def test_nonfinite_rejected(self):
        sp = FockSpace(1, 2)
        with pytest.raises((FockError, ValueError)):
            matrix_exponential(FockOperator(sp, np.array([[np.nan, 0], [0, 1]])), 1.0)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 10_000), st.floats(-5, 5))
    def test_unitary_exponential(self, seed, t):
        rng = np.random.default_rng(seed)
        sp = FockSpace(2, 3)
        a = rng.standard_normal((9, 9)) + 1j * rng.standard_normal((9, 9))
        h = FockOperator(sp, a + a.conj().T, hermitian=True)
        u = matrix_exponential(h, -1j * t)
        assert abs(np.linalg.norm(u.matrix, 2) - 1) < 1e-10
        assert np.allclose(np.linalg.svd(u.matrix, compute_uv=False), 1, atol=1e-10)


class TestOperatorFlags:
    def test_hermitian_flag_checked(self):
        sp = FockSpace(1, 2)
        with pytest.raises(FockError):
            FockOperator(sp, np.array([[0, 1], [0, 0]]), hermitian=True)

    def test_shape_checked(self):
        with pytest.raises(FockError):
            FockOperator(FockSpace(1, 3), np.eye(2))


class TestStates:
    def test_normalization_enforced(self):
        sp = FockSpace(1, 2)
        with pytest.raises(FockError):
            FockState(sp, np.array([1.0, 1.0]))
        with pytest.raises(FockError):
            FockState(sp, np.eye(2))

    def test_product_state_trace(self):
        rng = np.random.default_rng(3)
        a, b = FockSpace(1, 3), FockSpace(1, 3)
        ra, rb = random_density(a, rng), random_density(b, rng)
        full = FockState(FockSpace(2, 3), np.kron(ra.data, rb.data))
        assert np.allclose(partial_trace(full, [0]).data, ra.data, atol=1e-14)
        assert np.allclose(partial_trace(full, [1]).data, rb.data, atol=1e-14)

    def test_bell_pair_reduces_to_mixed(self):
        sp = FockSpace(2, 2)
        v = np.zeros(4, dtype=complex)
        v[sp.index((0, 0))] = v[sp.index((1, 1))] = 1 / np.sqrt(2)
        red = partial_trace(FockState(sp, v).to_density(), [0])
        assert np.allclose(red.data, np.eye(2) / 2)

    def test_vector_rejected(self):
        sp = FockSpace(2, 2)
        with pytest.raises(FockError):
            partial_trace(sp.vacuum(), [0])

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 10_000), st.sets(st.integers(0, 2), min_size=1))
    def test_trace_and_positivity(self, seed, keep):
        sp = FockSpace(3, 2)
        rho = random_density(sp, np.random.default_rng(seed))
        red = partial_trace(rho, keep)
        assert abs(np.trace(red.data) - 1) < 1e-12
        assert np.linalg.eigvalsh(red.data).min() > -1e-10


class TestDistance:
    def test_self_distance(self):
        u = phase_rotation(FockSpace(2, 3), [0.3, 0.7])
        assert op_distance(u, u) == 0.0

    def test_global_phase(self):
        sp = FockSpace(2, 2)
        i = sp.identity()
        assert op_distance(i, i * np.exp(0.4j), phase_invariant=True) < 1e-12
        assert op_distance(i, i * np.exp(0.4j)) > 0.3

    def test_phase_invariant_matches_brute_force(self):
        rng = np.random.default_rng(5)
        sp = FockSpace(1, 4)
        a = FockOperator(sp, random_unitary(4, rng))
        b = FockOperator(sp, random_unitary(4, rng))
        phis = np.linspace(0, 2 * np.pi, 20001)
        brute = min(np.linalg.norm(a.matrix - np.exp(1j * p) * b.matrix, 2) for p in phis[::20])
        assert op_distance(a, b, phase_invariant=True) <= brute + 1e-9
        assert op_distance(a, b, phase_invariant=True) >= brute - 1e-2

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 10_000))
    def test_triangle_inequality(self, seed):
        rng = np.random.default_rng(seed)
        sp = FockSpace(1, 3)
        a, b, c = (FockOperator(sp, rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))) for _ in range(3))
        assert op_distance(a, c) <= op_distance(a, b) + op_distance(b, c) + 1e-12
