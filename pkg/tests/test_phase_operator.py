import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wigner_oscillator.errors import ConvergenceError
from wigner_oscillator.phase_operator import (
    PI_SQ_OVER_3,
    FockMatrix,
    g_coefficient,
    phi_matrix,
    phi_spectrum,
    phi_squared_diagonal,
    phi_squared_weyl_radial_average,
)
from wigner_oscillator.weyl import laguerre


def g_oracle(m, n):
    lo, hi = min(m, n), max(m, n)
    s = 0.5 if lo % 2 == 0 else 1.0
    log = -0.5 * (hi - lo) * math.log(2) + math.lgamma(lo / 2 + s) - math.lgamma(hi / 2 + s) + 0.5 * (math.lgamma(hi + 1) - math.lgamma(lo + 1))
    return math.exp(log)


class TestG:
    def test_examples(self):
        assert g_coefficient(0, 0) == 1.0
        assert g_coefficient(0, 1) == pytest.approx(math.sqrt(math.pi / 2), rel=1e-15)
        assert abs(g_coefficient(200, 201) - 1.0) < 2e-3

    @given(st.integers(0, 500), st.integers(0, 500))
    def test_symmetric_exactly(self, m, n):
        assert g_coefficient(m, n) == g_coefficient(n, m)

    @given(st.integers(0, 300), st.integers(0, 300))
    def test_matches_lgamma_oracle(self, m, n):
        assert g_coefficient(m, n) == pytest.approx(g_oracle(m, n), rel=1e-11)

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            g_coefficient(-1, 2)


class TestPhiMatrix:
    def test_dim_two(self):
        mat = phi_matrix(2)
        assert mat.entries[0, 1] == pytest.approx(math.sqrt(math.pi / 2), abs=1e-15)
        assert mat.entries[0, 1].imag == 0.0
        np.testing.assert_allclose(phi_spectrum(2).eigenvalues, [-math.sqrt(math.pi / 2), math.sqrt(math.pi / 2)], atol=1e-14)

    @pytest.mark.parametrize("dim", [1, 2, 7, 64, 400])
    def test_hermitian_and_zero_diagonal(self, dim):
        mat = phi_matrix(dim)
        assert mat.hermiticity_error() <= 1e-12
        assert np.all(np.diag(mat.entries) == 0)

    def test_parity_structure(self):
        e = phi_matrix(12).entries
        for m in range(12):
            for n in range(12):
                if m != n and (m - n) % 2:
                    assert e[m, n].imag == 0
                elif m != n:
                    assert e[m, n].real == 0

    def test_entries_read_only(self):
        with pytest.raises(ValueError):
            phi_matrix(3).entries[0, 1] = 0

    def test_fock_matrix_flags_non_hermitian(self):
        with pytest.raises(ValueError):
            FockMatrix(np.array([[0, 1], [2, 0]]), hermitian=True)
        with pytest.raises(ValueError):
            FockMatrix(np.zeros((2, 3)))

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            phi_matrix(0)


class TestSpectrum:
    def test_dim_two_spread(self):
        assert phi_spectrum(2).spread == pytest.approx(2 * math.sqrt(math.pi / 2), rel=1e-14)

    def test_dim_one_rejected(self):
        with pytest.raises(ValueError):
            phi_spectrum(1)

    def test_monotone_bounded_spread(self):
        dims = [25, 50, 100, 200, 300, 400]
        reports = [phi_spectrum(d) for d in dims]
        spreads = [r.spread for r in reports]
        assert all(b >= a for a, b in zip(spreads, spreads[1:]))
        assert spreads[-1] < 2 * math.pi
        for rep in reports:
            assert np.all(np.diff(rep.eigenvalues) >= 0)
            assert rep.eigenvalues[0] > -1.5 * math.pi and rep.eigenvalues[-1] < 1.5 * math.pi
            assert rep.eigenvalues[0] >= -math.pi - 0.05 and rep.eigenvalues[-1] <= math.pi + 0.05

    def test_symmetric_about_zero(self):
        ev = phi_spectrum(60).eigenvalues
        np.testing.assert_allclose(ev, -ev[::-1], atol=1e-12)


class TestPhiSquaredDiagonal:
    def test_first_term(self):
        d = phi_squared_diagonal(0, tail_terms=1, tol=math.inf)
        assert d.value == pytest.approx(math.pi / 2, rel=1e-15)

    def test_tail_too_large_reported(self):
        with pytest.raises(ConvergenceError):
            phi_squared_diagonal(0, tail_terms=1)

    def test_large_m_near_uniform_value(self):
        d = phi_squared_diagonal(200)
        assert abs(d.estimate - PI_SQ_OVER_3) < 0.01 * PI_SQ_OVER_3

    @pytest.mark.parametrize("m", [0, 1, 5, 20])
    def test_sum_of_squares_of_matrix(self, m):
        dim = 300
        phi = phi_matrix(dim).entries
        square = (phi @ phi)[m, m]
        assert square.imag == pytest.approx(0.0, abs=1e-12)
        truncated = phi_squared_diagonal(m, tail_terms=dim - 1 - m, tol=math.inf)
        assert square.real == pytest.approx(truncated.value, rel=1e-12)
        full = phi_squared_diagonal(m)
        assert 0 <= full.estimate
        # the matrix misses exactly the tail that the truncated estimate adds back
        assert abs(square.real + truncated.tail_bound - full.estimate) <= 0.1 * truncated.tail_bound

    def test_tail_bound_is_accurate(self):
        coarse = phi_squared_diagonal(0, tail_terms=5000)
        fine = phi_squared_diagonal(0, tail_terms=80000)
        assert abs(coarse.estimate - fine.estimate) < 0.1 * coarse.tail_bound

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            phi_squared_diagonal(-1)
        with pytest.raises(ValueError):
            phi_squared_diagonal(0, tail_terms=0)


class TestRadialAverage:
    def test_large_radius(self):
        avg = phi_squared_weyl_radial_average(8.0, dim=128)
        assert abs(avg.value - PI_SQ_OVER_3) < 1e-3
        deeper = phi_squared_weyl_radial_average(8.0, dim=256)
        assert abs(avg.value - deeper.value) < 1e-3

    def test_origin_is_cesaro_mean_of_signed_series(self):
        from wigner_oscillator.phase_operator import phi_squared_diagonals

        d = phi_squared_diagonals(128) - PI_SQ_OVER_3
        terms = 2 * d * (-1.0) ** np.arange(128) * np.array([laguerre(m, 0, 0.0) for m in range(128)])
        expected = PI_SQ_OVER_3 + np.cumsum(terms)[-16:].mean()
        avg = phi_squared_weyl_radial_average(0.0, dim=128)
        assert avg.value == pytest.approx(expected, rel=1e-12)
        # at the origin every term has the same sign and decays slower than 1/m
        assert np.all(terms > 0)
        assert not avg.converged

    def test_vectorized(self):
        r = np.array([0.5, 3.0, 8.0])
        vec = phi_squared_weyl_radial_average(r, dim=64)
        for k, rk in enumerate(r):
            assert vec.value[k] == pytest.approx(phi_squared_weyl_radial_average(rk, dim=64).value, rel=1e-13)

    def test_rejects_negative_radius(self):
        with pytest.raises(ValueError):
            phi_squared_weyl_radial_average(-1.0)
