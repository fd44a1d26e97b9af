import numpy as np
import pytest

from qmetastable import BathCorrelation, BathParams, build_rate_matrix, kernel, validate_regime
from qmetastable.dvr import DvrBasis

import oracles

POINTS = [(1.0, 0.352), (0.3, 0.2), (2.2, 0.55)]


@pytest.fixture(scope="module")
def rm_mid(dvr1):
    return build_rate_matrix(dvr1, BathParams(1.0, 0.352))


@pytest.mark.parametrize("gamma,T", POINTS)
def test_against_real_time_oracle(dvr1, gamma, T):
    rm = build_rate_matrix(dvr1, BathParams(gamma, T))
    h, q = dvr1.hamiltonian, dvr1.q_points
    checked = 0
    for mu in range(dvr1.size):
        for nu in range(dvr1.size):
            if mu == nu:
                continue
            g = rm.gamma_matrix[mu, nu]
            # the real-time integral cannot resolve rates far below its integrand scale
            if abs(g) < 1e-6 * 2 * h[mu, nu] ** 2:
                continue
            ref = oracles.real_time_rate(h[mu, nu], (q[mu] - q[nu]) ** 2, h[nu, nu] - h[mu, mu], gamma, T, 50.0)
            assert g == pytest.approx(ref, rel=1e-8)
            checked += 1
    assert checked >= 8


def test_kernel_integrates_to_rate(dvr1, rm_mid):
    from scipy.integrate import quad

    val = sum(
        quad(lambda t: kernel(dvr1, BathParams(1.0, 0.352), 3, 4, t), a, a + 1.0, limit=200)[0]
        for a in np.arange(0.0, 60.0, 1.0)
    )
    assert val == pytest.approx(rm_mid.gamma_matrix[3, 4], rel=1e-7)


def test_columns_sum_to_zero(rm_mid):
    assert np.allclose(rm_mid.gamma_matrix.sum(axis=0), 0.0, atol=1e-15)


def test_nonnegative_off_diagonal(rm_mid):
    off = rm_mid.gamma_matrix[~np.eye(rm_mid.size, dtype=bool)]
    assert np.all(off >= 0)
    assert rm_mid.flags == ()


@pytest.mark.parametrize("gamma,T", POINTS)
def test_detailed_balance(dvr1, gamma, T):
    g = build_rate_matrix(dvr1, BathParams(gamma, T)).gamma_matrix
    e = dvr1.dvr_energies
    for mu in range(dvr1.size):
        for nu in range(mu + 1, dvr1.size):
            if g[mu, nu] > 0 and g[nu, mu] > 0:
                assert np.log(g[mu, nu] / g[nu, mu]) == pytest.approx((e[nu] - e[mu]) / T, abs=1e-9)


def test_boltzmann_stationary(dvr1, rm_mid):
    e = dvr1.dvr_energies
    w = np.exp(-(e - e.min()) / 0.352)
    assert np.allclose(rm_mid.stationary(), w / w.sum(), atol=1e-10)


def test_eigenvalues_sorted(rm_mid):
    lam = rm_mid.eigenvalues
    assert abs(lam[0]) < 1e-12
    assert np.all(lam.real[1:] < 0)
    assert np.all(np.diff(lam.real) <= 0)


def test_far_pair_damped_monotonically(dvr1):
    # the longest-distance pair is suppressed ever more strongly by friction
    rates = [build_rate_matrix(dvr1, BathParams(g, 0.352)).gamma_matrix[0, 5] for g in (0.5, 1.0, 1.5, 2.0)]
    assert all(a > b for a, b in zip(rates, rates[1:]))


def test_two_state_symmetry():
    h = np.array([[0.0, 0.1], [0.1, 0.0]])
    basis = DvrBasis(np.array([-1.0, 1.0]), np.eye(2), np.zeros(2), h, 1, 0)
    g = build_rate_matrix(basis, BathParams(0.8, 0.3)).gamma_matrix
    assert g[0, 1] == pytest.approx(g[1, 0], rel=1e-14)
    assert g[0, 1] > 0


def test_shared_correlation_object(dvr1, rm_mid):
    rm = build_rate_matrix(dvr1, BathCorrelation(BathParams(1.0, 0.352)))
    assert np.array_equal(rm.gamma_matrix, rm_mid.gamma_matrix)


def test_regime_validation():
    assert validate_regime(BathParams(1.5, 0.3)).ok
    assert validate_regime(BathParams(1.5, 0.05)).codes() == ("low_temperature",)
    assert validate_regime(BathParams(0.4, 0.3)).codes() == ("weak_damping",)
