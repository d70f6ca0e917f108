import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from binexpand import (Beta, DomainError, PiecewiseConstant, Trapezoidal, Uniform,
                       bit_marginal, independence_check, joint_probability, statistics)
from binexpand.exact import BitStatistics

from oracles import cell_bits, enumerate_statistics, midpoint, piecewise_cell_masses

STEP = PiecewiseConstant([0.0, 0.5, 1.0], [0.5, 1.5])

# midpoint oracle: int_{3/4}^1 6x(1-x) dx
BETA22_JOINT12 = 0.15625
BETA22_RHO12 = 4.0 * (BETA22_JOINT12 - 0.25)


def test_frozen_beta22_values():
    assert midpoint(lambda x: 6 * x * (1 - x), 0.75, 1.0) == pytest.approx(BETA22_JOINT12, abs=1e-11)
    assert BETA22_RHO12 == -0.375


@pytest.mark.parametrize("model, i, expected", [
    (STEP, 1, 0.75),
    (STEP, 2, 0.5),
    (STEP, 3, 0.5),
    (Trapezoidal(3 / 8, 5 / 8), 1, 0.5),
    (Trapezoidal(3 / 8, 5 / 8), 2, 0.5),
])
def test_bit_marginal_examples(model, i, expected):
    assert bit_marginal(model, i) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("i", range(1, 21))
def test_uniform_marginals_are_half(i):
    assert bit_marginal(Uniform(), i) == 0.5


@pytest.mark.parametrize("model, i, j, bi, bj, expected", [
    (STEP, 1, 2, 1, 1, 0.375),
    (STEP, 1, 2, 0, 1, 0.125),
    (STEP, 1, 3, 1, 0, 0.375),
    (STEP, 2, 3, 0, 0, 0.25),
    (Uniform(), 3, 7, 1, 1, 0.25),
    (Uniform(), 5, 1, 0, 1, 0.25),
    (Beta(2, 2), 1, 2, 1, 1, BETA22_JOINT12),
])
def test_joint_probability_examples(model, i, j, bi, bj, expected):
    assert joint_probability(model, i, j, bi, bj) == pytest.approx(expected, abs=1e-12)


def test_joint_probability_matches_displayed_integrals():
    # three-bit joints written out as integrals over explicit intervals
    m = Beta(3.5, 1.7)
    F = m.cdf
    assert joint_probability(m, 1, 2) == pytest.approx(1 - F(0.75), abs=1e-14)
    assert joint_probability(m, 1, 3) == pytest.approx(F(0.75) - F(0.625) + 1 - F(0.875), abs=1e-14)
    assert joint_probability(m, 2, 3) == pytest.approx(F(0.5) - F(0.375) + 1 - F(0.875), abs=1e-14)


@pytest.mark.parametrize("args", [(1, 1), (0, 2), (2, 53), (1.5, 2)])
def test_joint_probability_domain(args):
    with pytest.raises(DomainError):
        joint_probability(Uniform(), *args)
    with pytest.raises(DomainError):
        joint_probability(Uniform(), 1, 2, 2, 0)


def test_bit_marginal_domain():
    for i in (0, 53):
        with pytest.raises(DomainError):
            bit_marginal(Uniform(), i)


def test_statistics_uniform():
    s = statistics(Uniform(), 3)
    assert np.all(s.marginals == 0.5)
    off = ~np.eye(3, dtype=bool)
    assert np.all(s.correlation[off] == 0.0)
    assert s.source == "exact" and s.undefined == ()


def test_statistics_beta22():
    s = statistics(Beta(2, 2), 2)
    assert s.rho(1, 2) == pytest.approx(BETA22_RHO12, abs=1e-12)
    assert s.cov(1, 2) == pytest.approx(BETA22_JOINT12 - 0.25, abs=1e-12)


def test_statistics_eq7():
    s = statistics(STEP, 3)
    assert s.marginals == pytest.approx([0.75, 0.5, 0.5], abs=1e-15)
    off = ~np.eye(3, dtype=bool)
    assert np.max(np.abs(s.correlation[off])) < 1e-12


@pytest.mark.parametrize("model, n, tol, expected", [
    (Uniform(), 4, 1e-9, []),
    (STEP, 3, 1e-9, []),
])
def test_independence_check_examples(model, n, tol, expected):
    assert independence_check(statistics(model, n), tol) == expected


def test_independence_check_beta22():
    [(i, j, dev)] = independence_check(statistics(Beta(2, 2), 2), 1e-3)
    assert (i, j) == (1, 2)
    assert dev == pytest.approx(abs(BETA22_JOINT12 - 0.25), abs=1e-12)


def test_independence_check_rejects_empirical():
    s = BitStatistics.from_moments([0.5, 0.5], [[0.5, 0.25], [0.25, 0.5]], source="empirical")
    with pytest.raises(DomainError):
        independence_check(s, 1e-3)


def test_degenerate_marginal_flags_undefined_correlation():
    # all mass in [0, 1/2): bit 1 is always 0
    m = PiecewiseConstant([0.0, 0.5, 1.0], [2.0, 0.0])
    s = statistics(m, 3)
    assert s.p(1) == 0.0
    assert s.undefined == (1,)
    assert np.all(np.isnan(s.correlation[0])) and np.all(np.isnan(s.correlation[:, 0]))
    assert s.rho(2, 3) == pytest.approx(0.0, abs=1e-12)
    assert "undefined" in s.format()


# ---------------------------------------------------------------- invariants

def _random_piecewise(rng, symmetric=False, pieces=None):
    k = pieces or int(rng.integers(1, 9))
    if symmetric:
        half = np.sort(rng.uniform(0.0, 0.5, size=k))
        b = np.unique(np.concatenate([[0.0], half, 1.0 - half[::-1], [1.0]]))
        h = rng.uniform(0.05, 3.0, size=b.size - 1)
        h = 0.5 * (h + h[::-1])
    else:
        b = np.unique(np.concatenate([[0.0], rng.uniform(0.0, 1.0, size=k), [1.0]]))
        h = rng.uniform(0.05, 3.0, size=b.size - 1)
    return PiecewiseConstant.from_weights(b, h)


def _models(seed):
    rng = np.random.default_rng(seed)
    a, b = rng.uniform(0.1, 20.0, size=2)
    c = rng.uniform(0.0, 1.0)
    return [Beta(a, b), Trapezoidal(c, rng.uniform(c, 1.0)), _random_piecewise(rng)]


@settings(deadline=None, max_examples=30)
@given(st.integers(0, 2 ** 32 - 1))
def test_statistics_invariants(seed):
    for model in _models(seed):
        s = statistics(model, 5)
        p = s.marginals
        assert np.all((p >= 0) & (p <= 1))
        for i, j in s.pairs():
            pij = s.joint[i - 1, j - 1]
            assert max(0.0, p[i - 1] + p[j - 1] - 1) - 1e-12 <= pij <= min(p[i - 1], p[j - 1]) + 1e-12
            assert s.covariance[i - 1, j - 1] == pytest.approx(pij - p[i - 1] * p[j - 1], abs=1e-15)
            # complementarity
            assert (joint_probability(model, i, j, 1, 1) + joint_probability(model, i, j, 1, 0)
                    == pytest.approx(bit_marginal(model, i), abs=1e-9))
        finite = s.correlation[np.isfinite(s.correlation)]
        assert np.all(np.abs(finite) <= 1.0)
        assert np.allclose(s.correlation, s.correlation.T, equal_nan=True)
        assert np.allclose(np.diag(s.correlation), 1.0)


@settings(deadline=None, max_examples=30)
@given(st.floats(0.1, 20.0), st.floats(0.0, 0.5))
def test_symmetric_models_have_fair_bits_and_rho_is_four_cov(alpha, delta):
    for model in (Beta(alpha, alpha), Trapezoidal.symmetric(delta)):
        assert model.is_symmetric()
        s = statistics(model, 6)
        assert np.max(np.abs(s.marginals - 0.5)) <= 1e-8
        off = ~np.eye(6, dtype=bool)
        assert np.allclose(s.correlation[off], 4.0 * s.covariance[off], atol=1e-7)


@settings(deadline=None, max_examples=30)
@given(st.integers(0, 2 ** 32 - 1))
def test_random_asymmetric_models_have_an_unfair_bit(seed):
    model = _random_piecewise(np.random.default_rng(seed))
    if model.is_symmetric():
        return
    dev = max(abs(bit_marginal(model, i) - 0.5) for i in range(1, 11))
    assert dev > 1e-8


def test_asymmetric_density_with_fair_bits_exists():
    """Fair bits do not force a symmetric density.

    f = 1 + r1 r2 r3 / 2, with r_k = +-1 the sign attached to bit k, is
    antisymmetric around 1/2 in its perturbation (reflection flips all three
    bits), yet every bit marginal is exactly 1/2. Random asymmetric models
    avoid this set, which is why the search above succeeds.
    """
    bits = cell_bits(3).astype(int)
    signs = np.prod(1 - 2 * bits, axis=1)
    m = PiecewiseConstant(np.arange(9) / 8, 1 + 0.5 * signs)
    assert not m.is_symmetric()
    assert all(bit_marginal(m, i) == pytest.approx(0.5, abs=1e-15) for i in range(1, 13))


@pytest.mark.parametrize("n", [2, 5, 8])
def test_uniform_pairwise_factorisation(n):
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            for bi in (0, 1):
                for bj in (0, 1):
                    assert joint_probability(Uniform(), i, j, bi, bj) == pytest.approx(0.25, abs=1e-12)


def test_uniform_full_mutual_independence_by_enumeration():
    n = 8
    masses = piecewise_cell_masses([0.0, 1.0], [1.0], n)
    assert np.allclose(masses, 2.0 ** -n, atol=1e-15)


@pytest.mark.parametrize("seed", range(10))
def test_interval_statistics_match_cell_enumeration(seed):
    rng = np.random.default_rng(1000 + seed)
    model = _random_piecewise(rng)
    n = int(rng.integers(1, 11))
    s = statistics(model, n)
    p, joint, corr = enumerate_statistics(
        piecewise_cell_masses(model.breakpoints, model.densities, n), n)
    assert np.max(np.abs(s.marginals - p)) <= 1e-12
    assert np.max(np.abs(s.joint - joint)) <= 1e-12
    assert np.max(np.abs(s.correlation - corr)) <= 1e-12


def test_format_is_aligned_text():
    text = statistics(STEP, 3).format()
    assert "correlation" in text and "0.75" in text
    widths = {len(line) for line in text.splitlines() if line.startswith(("B1", "B2", "B3"))}
    assert len(widths) == 1


def test_enumeration_cap():
    # interval lists are materialised up to bit 26; deeper bits are refused, not approximated
    assert joint_probability(Uniform(), 1, 20) == 0.25
    for call in (lambda: bit_marginal(Uniform(), 27), lambda: joint_probability(Uniform(), 1, 40)):
        with pytest.raises(DomainError):
            call()
