import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import blindgraph as bg
from blindgraph.errors import DimensionMismatch, NonDiagonalizable
from blindgraph.spectral import directed_cycle_matrix, spectrum_of

from conftest import cycle_spectrum, er_spectrum


def circular_convolution(h, x):
    N = len(x)
    hp = np.zeros(N)
    hp[: len(h)] = h
    return np.array([sum(hp[k] * x[(i - k) % N] for k in range(N)) for i in range(N)])


class TestBuildShift:
    def test_directed_cycle_eigenvalues_are_roots_of_unity(self):
        spec = cycle_spectrum(4)
        expected = {1, 1j, -1, -1j}
        got = {complex(np.round(v.real, 12), np.round(v.imag, 12)) for v in spec.eigvals}
        assert got == expected
        spec.check()

    def test_directed_cycle_matches_numerical_eig(self):
        spec = cycle_spectrum(8)
        S = directed_cycle_matrix(8)
        assert np.allclose(spec.shift, S)
        assert np.linalg.norm(S @ spec.eigvecs - spec.eigvecs * spec.eigvals) < 1e-12

    def test_path_adjacency(self):
        spec = bg.build_shift(bg.Graph(2, ((0, 1),)))
        assert np.allclose(sorted(spec.eigvals.real), [-1, 1])
        assert spec.normal

    def test_er_normal_and_unitary(self, er50):
        assert er50.normal
        assert np.linalg.norm(er50.u_analysis - er50.eigvecs.conj().T) < 1e-8 * 50
        er50.check()

    def test_eigenvalue_ordering(self, er50):
        lam = er50.eigvals.real
        assert np.all(np.diff(lam) <= 1e-12)

    def test_laplacian(self):
        g = bg.Graph(3, ((0, 1), (1, 2)))
        spec = bg.build_shift(g, "laplacian")
        assert np.allclose(sorted(spec.eigvals.real), [0, 1, 3])

    def test_laplacian_rejects_directed(self):
        with pytest.raises(ValueError):
            bg.build_shift(bg.Graph(3, ((0, 1),), directed=True), "laplacian")

    def test_directed_nonnormal_general_path(self, rng):
        A = np.triu(rng.random((6, 6)), 1) + np.diag(np.arange(6.0))
        spec = bg.build_shift(bg.Graph(6), "custom", matrix=A)
        assert not spec.normal
        assert np.linalg.norm(spec.u_analysis @ spec.eigvecs - np.eye(6)) < 1e-8 * 6

    def test_defective_shift_rejected(self):
        J = np.array([[0.0, 1.0], [0.0, 0.0]])
        with pytest.raises(NonDiagonalizable):
            spectrum_of(J)

    def test_rescale_unit_radius(self, er50):
        g = bg.experiments.gen_graph("er", 0, n=50, p=0.1)
        spec = bg.build_shift(g, rescale=True)
        assert np.isclose(np.max(np.abs(spec.eigvals)), 1.0)
        spec.check()

    def test_normal_nonsymmetric_uses_unitary_basis(self):
        # circulant with weights is normal but not symmetric
        S = directed_cycle_matrix(5) * 2.0 + directed_cycle_matrix(5).T * 0.5
        spec = spectrum_of(S)
        assert spec.normal
        assert np.linalg.norm(spec.u_analysis - spec.eigvecs.conj().T) < 1e-10


class TestFilterBasis:
    def test_cycle_unit_modulus(self):
        basis = bg.build_filter_basis(cycle_spectrum(8), 3)
        assert np.allclose(np.abs(basis.psi), 1.0)

    def test_length_one(self, er50):
        basis = bg.build_filter_basis(er50, 1)
        assert np.allclose(basis.psi, 1.0)
        assert np.allclose(np.abs(basis.psi_orth), 1 / np.sqrt(50))

    def test_star_graph_rank_deficiency(self):
        star = bg.Graph(5, tuple((0, j) for j in range(1, 5)))
        spec = bg.build_shift(star)
        with pytest.warns(RuntimeWarning):
            basis = bg.build_filter_basis(spec, 4)
        assert basis.rank_deficient
        # oracle: eigenvalues are {2, 0, 0, 0, -2}, only 3 distinct rows
        assert np.linalg.matrix_rank(np.vander(np.array([2.0, 0, 0, 0, -2]), 4)) == 3
        assert not bg.build_filter_basis(spec, 3).rank_deficient

    def test_invariants(self, er50):
        b = bg.build_filter_basis(er50, 4)
        assert np.linalg.norm(b.psi_orth.conj().T @ b.psi_orth - np.eye(4)) < 1e-10
        assert np.linalg.norm(b.psi - (b.psi_orth * b.sigma) @ b.r_factor.conj().T) < 1e-8 * np.linalg.norm(b.psi)

    def test_bad_length(self, er50):
        with pytest.raises(ValueError):
            bg.build_filter_basis(er50, 0)
        with pytest.raises(ValueError):
            bg.build_filter_basis(er50, 51)

    def test_cayley_hamilton_full_rank(self):
        spec = cycle_spectrum(7)
        basis = bg.build_filter_basis(spec, 7)
        assert np.linalg.matrix_rank(basis.psi) == 7


class TestTransforms:
    def test_impulse_on_cycle(self):
        spec = cycle_spectrum(8)
        x = np.zeros(8)
        x[0] = 1
        assert np.allclose(bg.gft(spec, x), np.ones(8) / np.sqrt(8))

    def test_zero(self, er50):
        assert np.allclose(bg.gft(er50, np.zeros(50)), 0)

    def test_parseval_symmetric(self, er50, rng):
        x = rng.standard_normal(50)
        assert np.isclose(np.linalg.norm(bg.gft(er50, x)), np.linalg.norm(x), rtol=1e-12)

    def test_roundtrip(self, er50, rng):
        x = rng.standard_normal(50)
        assert np.linalg.norm(bg.igft(er50, bg.gft(er50, x)) - x) <= 1e-10 * np.linalg.norm(x)

    def test_dimension_mismatch(self, er50):
        with pytest.raises(DimensionMismatch):
            bg.gft(er50, np.zeros(3))


class TestApplyFilter:
    def test_identity_filter(self, er50, rng):
        x = rng.standard_normal(50)
        assert np.allclose(bg.apply_filter(er50, [1.0], x), x)

    def test_cycle_shift(self, rng):
        spec = cycle_spectrum(8)
        x = rng.standard_normal(8)
        assert np.allclose(bg.apply_filter(spec, [0.0, 1.0], x), np.roll(x, 1))
        assert np.allclose(bg.apply_filter(spec, [0.0, 1.0], x, "frequency"), np.roll(x, 1))

    def test_cycle_circular_convolution(self, rng):
        spec = cycle_spectrum(8)
        h, x = rng.standard_normal(4), rng.standard_normal(8)
        y_ref = circular_convolution(h, x)
        for mode in ("vertex", "frequency"):
            assert np.allclose(bg.apply_filter(spec, h, x, mode), y_ref, rtol=1e-10, atol=1e-12)

    def test_mode_equivalence_many(self, rng):
        for trial in range(200):
            kind = trial % 3
            if kind == 0:
                spec = er_spectrum(20, 0.2, seed=trial)
            elif kind == 1:
                spec = cycle_spectrum(12)
            else:
                A = rng.random((10, 10))
                np.fill_diagonal(A, 0)
                spec = bg.build_shift(bg.Graph(10), "custom", matrix=A / max(1, np.abs(np.linalg.eigvals(A)).max()))
            L = int(rng.integers(1, 7))
            h, x = rng.standard_normal(L), rng.standard_normal(spec.n)
            yv = bg.apply_filter(spec, h, x, "vertex")
            yf = bg.apply_filter(spec, h, x, "frequency")
            assert np.linalg.norm(yv - yf) <= 1e-9 * max(np.linalg.norm(yv), 1e-300)
            # convolution theorem in the frequency domain
            yhat = bg.gft(spec, yv)
            pred = bg.frequency_response(spec, h) * bg.gft(spec, x)
            assert np.allclose(yhat, pred, rtol=1e-9, atol=1e-9 * np.abs(pred).max())


class TestDiffusion:
    def test_zero_steps(self, er50, rng):
        x = rng.standard_normal(50)
        out = bg.simulate_diffusion(er50, x, 0)
        assert len(out) == 1 and np.array_equal(out[0], x)

    def test_identity_shift(self, rng):
        spec = bg.build_shift(bg.Graph(4), "custom", matrix=np.eye(4))
        x = rng.standard_normal(4)
        assert all(np.allclose(v, x) for v in bg.simulate_diffusion(spec, x, 5))

    def test_walk_counts(self):
        g = bg.experiments.gen_graph("er", 3, n=15, p=0.3)
        spec = bg.build_shift(g)
        A = g.adjacency()
        k = 4
        x0 = np.zeros(15)
        x0[k] = 1
        out = bg.simulate_diffusion(spec, x0, 3)
        # brute-force enumeration of length-3 walks ending at each node
        counts = np.zeros(15)
        for a in range(15):
            for b in range(15):
                for c in range(15):
                    counts[c] += A[a, k] * A[b, a] * A[c, b]
        assert np.array_equal(out[3], counts)


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=2, max_value=30), st.integers(min_value=0, max_value=10_000))
def test_spectrum_invariants_property(n, seed):
    spec = er_spectrum(n, 0.3, seed=seed)
    spec.check()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        b = bg.build_filter_basis(spec, min(3, n))
    assert np.linalg.norm(b.psi_orth.conj().T @ b.psi_orth - np.eye(b.L)) < 1e-10
