import warnings

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import blindgraph as bg
from blindgraph.errors import NotNormal, TooLarge
from blindgraph.theory import (coherence_profile, recovery_alpha, recovery_probability, rho, rho_bruteforce, spark,
                               support_family, theorem1_bound)

from conftest import cycle_spectrum, er_spectrum


def dft(N):
    n = np.arange(N)
    return np.exp(-2j * np.pi * np.outer(n, n) / N)


class TestRho:
    @pytest.mark.parametrize("N", [4, 7, 16])
    def test_dft(self, N):
        for k in range(1, N + 1):
            assert np.isclose(rho(dft(N), k), k)

    def test_identity(self):
        assert all(rho(np.eye(5), k) == 1 for k in range(1, 6))

    def test_bruteforce_oracle(self, rng):
        for _ in range(50):
            n, m = rng.integers(1, 9, size=2)
            A = rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))
            for k in range(1, m + 1):
                assert np.isclose(rho(A, k), rho_bruteforce(A, k), rtol=1e-12)

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            rho(np.eye(3), 0)
        with pytest.raises(ValueError):
            rho(np.eye(3), 4)


class TestCoherence:
    @pytest.mark.parametrize("N", [4, 8, 16, 32, 50, 64])
    def test_cycle_equalities(self, N):
        spec = cycle_spectrum(N)
        for L in (1, 2, 3):
            prof = coherence_profile(spec, bg.build_filter_basis(spec, L), K=min(N, 10))
            for S in prof.rho_u:
                assert abs(prof.rho_u[S] - S) <= 1e-9
            assert abs(prof.rho_psi[L] - L / N) <= 1e-9

    def test_er_bounds(self, er50):
        prof = coherence_profile(er50, bg.build_filter_basis(er50, 3), K=10)
        for S in range(1, 11):
            assert S - 1e-9 <= prof.rho_u[S] <= S * prof.rho_u[1] + 1e-9
        for L in range(1, 4):
            assert L / 50 - 1e-12 <= prof.rho_psi[L] <= L * prof.rho_psi[1] + 1e-12

    def test_tables_nondecreasing(self, er50):
        prof = coherence_profile(er50, bg.build_filter_basis(er50, 4), K=20)
        ru = [prof.rho_u[k] for k in sorted(prof.rho_u)]
        rp = [prof.rho_psi[k] for k in sorted(prof.rho_psi)]
        assert np.all(np.diff(ru) >= -1e-12) and np.all(np.diff(rp) >= -1e-12)

    def test_normalizations(self, er50):
        prof = coherence_profile(er50, bg.build_filter_basis(er50, 3))
        assert np.allclose(prof.u_scaled.conj().T @ prof.u_scaled, 50 * np.eye(50), atol=1e-8)
        assert np.allclose(prof.psi_used.conj().T @ prof.psi_used, np.eye(3), atol=1e-10)

    def test_not_normal(self):
        A = np.triu(np.arange(1.0, 17).reshape(4, 4), 1) + np.diag([1.0, 2, 3, 4])
        spec = bg.build_shift(bg.Graph(4), "custom", matrix=A)
        with pytest.raises(NotNormal):
            coherence_profile(spec, bg.build_filter_basis(spec, 2))

    def test_csv(self, tmp_path):
        spec = cycle_spectrum(8)
        prof = coherence_profile(spec, bg.build_filter_basis(spec, 2), K=3)
        p = tmp_path / "rho.csv"
        prof.to_csv(p)
        lines = p.read_text().splitlines()
        assert lines[0] == "k,rho_u,rho_psi" and len(lines) == 4
        assert lines[3].endswith(",")  # k = 3 has no rho_psi entry


class TestBound:
    def test_alpha1_below_alpha(self, rng):
        for seed in range(100):
            n = int(rng.integers(10, 40))
            spec = er_spectrum(n, float(rng.uniform(0.1, 0.5)), seed=seed)
            S, L = int(rng.integers(1, 5)), int(rng.integers(1, 4))
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                prof = coherence_profile(spec, bg.build_filter_basis(spec, L), K=S)
            b = theorem1_bound(prof, S, L, n)
            assert b.alpha1 <= b.alpha

    def test_alpha_decreases_with_coherence(self):
        spec = cycle_spectrum(50)
        prof = coherence_profile(spec, bg.build_filter_basis(spec, 3), K=3)
        r = prof.rho_u, prof.rho_psi
        a0, *_ = recovery_alpha(r[0][1], r[1][1], r[0][3], r[1][3], 3, 3, 50)
        a1, *_ = recovery_alpha(r[0][1], r[1][1], 2 * r[0][3], r[1][3], 3, 3, 50)
        a2, *_ = recovery_alpha(r[0][1], r[1][1], r[0][3], 2 * r[1][3], 3, 3, 50)
        assert a1 < a0 and a2 < a0

    def test_alpha_monotone_in_S_and_L(self):
        base = dict(rho_u1=1.0, rho_psi1=0.02, rho_us=3.0, rho_psil=0.06, S=3, L=3, N=50)
        a = recovery_alpha(**base)[0]
        assert recovery_alpha(**{**base, "S": 4})[0] < a
        assert recovery_alpha(**{**base, "L": 4})[0] < a

    def test_gamma(self):
        _, _, g = recovery_alpha(1, 1, 1, 1, 1, 1, 10)
        assert np.isclose(g, np.sqrt(2 * 10 * (np.log(20) + 1) + 1))

    def test_alpha_formula_oracle(self):
        ru1, rp1, rus, rpl, S, L, N = 1.3, 0.05, 3.2, 0.11, 3, 2, 40
        mp = mpmath.mp
        mp.dps = 30
        gamma = mpmath.sqrt(2 * N * (mpmath.log(2 * L * N) + 1) + 1)
        logs = mpmath.log(4 * gamma * mpmath.sqrt(2 * L * S)) * mpmath.log(2 * S * N ** 2)
        c = mpmath.mpf(ru1) * rp1 * L * S / (mpmath.mpf(rus) * rpl)
        ref = 3 * mpmath.log(2) / (120 * c + 8 * mpmath.sqrt(c)) / (mpmath.mpf(rus) * rpl * logs)
        ref1 = (3 * mpmath.log(2) / 128) / (L * S * mpmath.mpf(rus) * rpl * logs)
        a, a1, _ = recovery_alpha(ru1, rp1, rus, rpl, S, L, N)
        assert abs(a - float(ref)) <= 1e-12 * abs(float(ref))
        assert abs(a1 - float(ref1)) <= 1e-12 * abs(float(ref1))

    @pytest.mark.parametrize("alpha,N", [(1.5, 50), (2.0, 10), (1.01, 1000), (3.7, 66), (1.0, 50),
                                         (0.5, 50), (1.2, 34), (5.0, 2), (1.0001, 10 ** 6), (2.5, 128)])
    def test_p_rec_twenty_digits(self, alpha, N):
        mpmath.mp.dps = 20
        ref = 1 - mpmath.power(N, 1 - mpmath.mpf(alpha))
        ref = min(mpmath.mpf(1), max(mpmath.mpf(0), ref))
        assert abs(recovery_probability(alpha, N) - float(ref)) <= 1e-15

    def test_not_applicable_flag(self):
        spec = cycle_spectrum(50)
        prof = coherence_profile(spec, bg.build_filter_basis(spec, 3), K=3)
        b = theorem1_bound(prof, 3, 3, 50)
        # the bound is loose at desk scale
        assert b.alpha < 1 and not b.applicable and b.p_rec_lower == 0.0

    def test_profile_coverage(self):
        spec = cycle_spectrum(8)
        prof = coherence_profile(spec, bg.build_filter_basis(spec, 2), K=2)
        with pytest.raises(ValueError):
            theorem1_bound(prof, 3, 2, 8)


class TestSpark:
    def test_identity(self):
        assert spark(np.eye(3)) == 4

    def test_duplicate(self):
        e1, e2 = np.eye(3)[:, 0], np.eye(3)[:, 1]
        assert spark(np.column_stack([e1, e1, e2])) == 2

    def test_zero_column(self):
        assert spark(np.column_stack([np.ones(3), np.zeros(3)])) == 1

    def test_generic(self, rng):
        for _ in range(5):
            assert spark(rng.standard_normal((4, 6))) == 5

    def test_too_large(self):
        with pytest.raises(TooLarge):
            spark(np.zeros((2, 21)))


class TestIdentifiability:
    def test_support_families(self):
        assert support_family(6, 2, "adjacent") == [(0, 1), (0, 5), (1, 2), (2, 3), (3, 4), (4, 5)]
        assert support_family(6, 3, "equally_spaced") == [(0, 2, 4), (1, 3, 5)]
        assert len(support_family(6, 2)) == 15

    def test_cycle_rule_adjacent(self):
        spec = cycle_spectrum(6)
        for L in range(1, 5):
            for S in range(1, 5):
                res = bg.check_identifiability(spec, L, S, "adjacent")
                assert bool(res) == (6 > L + S - 2), (L, S)

    def test_equally_spaced_periodic_counterexample(self):
        # x on {0, 2, 4} has a 3-periodic DFT, so it can vanish on 4 of 6
        # frequencies; the 2 left carry eigenvalues w and -w
        spec = cycle_spectrum(6)
        res = bg.check_identifiability(spec, 3, 3, "equally_spaced")
        assert not res and res.min_distinct == 2
        assert bg.check_identifiability(spec, 2, 3, "equally_spaced")
        x = np.array([1.0, 0, 1, 0, 1, 0])
        assert np.array_equal(np.abs(np.fft.fft(x)) > 1e-9, [1, 0, 0, 1, 0, 0])
        # two filters agreeing at eigenvalues +1 and -1 give the same output
        h1, h2 = np.array([1.0, 0.5, 0.0]), np.array([0.0, 0.5, 1.0])
        assert np.allclose(bg.apply_filter(spec, h1, x), bg.apply_filter(spec, h2, x))

    def test_boundary_witness(self):
        res = bg.check_identifiability(cycle_spectrum(6), 4, 4, "adjacent")
        assert not res and res.witness_rows is not None and len(res.witness_support) == 4

    def test_L1_always(self):
        spec = er_spectrum(8, 0.5, seed=2)
        assert bg.check_identifiability(spec, 1, 2)

    def test_too_large(self):
        with pytest.raises(TooLarge):
            bg.check_identifiability(cycle_spectrum(13), 2, 2)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.integers(0, 10 ** 6))
def test_rho_oracle_property(n, m, seed):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))
    vals = [rho(A, k) for k in range(1, m + 1)]
    assert np.all(np.diff(vals) >= -1e-12)
    for k, v in enumerate(vals, 1):
        assert np.isclose(v, rho_bruteforce(A, k))
