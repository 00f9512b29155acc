import math

import numpy as np
import pytest

from sweepsim.model import reference_params
from sweepsim.oracles import (
    BDWalkParams, bd_hitting_prob, check_geometric_compound, expected_upcrossings,
    geometric_compound_pmf, moran_birth_count, sum_integral_residual, sum_integral_residuals,
)


def brute_hitting(b, d, i, j, k):
    """Solve the absorption equations on the interior states directly."""
    n = k - i - 1
    if j in (i, k):
        return float(j == k)
    M = np.zeros((n, n))
    rhs = np.zeros(n)
    up, down = b / (b + d), d / (b + d)
    for row, x in enumerate(range(i + 1, k)):
        M[row, row] = 1.0
        if x + 1 == k:
            rhs[row] += up
        else:
            M[row, row + 1] -= up
        if x - 1 != i:
            M[row, row - 1] -= down
    return float(np.linalg.solve(M, rhs)[j - i - 1])


def test_hitting_boundaries():
    assert bd_hitting_prob(BDWalkParams(2, 1, 0, 0, 5)) == 0
    assert bd_hitting_prob(BDWalkParams(2, 1, 0, 5, 5)) == 1


def test_hitting_small_cases():
    assert bd_hitting_prob(BDWalkParams(2, 1, 0, 1, 3)) == pytest.approx(4 / 7, rel=1e-14)
    assert bd_hitting_prob(BDWalkParams(1, 1, 0, 1, 4)) == 0.25


@pytest.mark.parametrize("ratio", [0.25, 0.5, 2, 4])
def test_hitting_matches_linear_solve(ratio):
    b, d = ratio, 1.0
    worst = 0.0
    for i in (0, 3):
        for k in range(i + 1, i + 31):
            for j in range(i, k + 1):
                w = BDWalkParams(b, d, i, j, k)
                worst = max(worst, abs(bd_hitting_prob(w) - brute_hitting(b, d, i, j, k)))
    assert worst <= 1e-10


def test_hitting_rejects_bad_input():
    with pytest.raises(ValueError):
        BDWalkParams(1, 1, 0, 5, 3)
    with pytest.raises(ValueError):
        BDWalkParams(0, 1, 0, 1, 3)


def test_geometric_compound_cases():
    assert geometric_compound_pmf(1, 1, 1) == 1
    assert geometric_compound_pmf(1, 1, 2) == 0
    assert geometric_compound_pmf(0.5, 0.5, 1) == pytest.approx(0.25)


def test_geometric_compound_grid():
    grid = np.round(np.arange(0.1, 1.0, 0.1), 10)
    worst = max(check_geometric_compound(pa, pb, 200) for pa in grid for pb in grid)
    assert worst <= 1e-10


def test_sum_integral_residual_empty():
    assert sum_integral_residual(1.3, 1000, 1) == 0
    assert sum_integral_residuals(-0.5, 1000)[0] == 0


def test_harmonic_versus_log():
    r = sum_integral_residuals(0.0, 1000)
    assert np.abs(r).max() <= 1
    assert r[-1] == pytest.approx(sum_integral_residual(0.0, 1000, 1000), abs=1e-9)


def test_residual_bounded_independently_of_N():
    worst = {N: max(np.abs(sum_integral_residuals(c, N)).max() for c in np.linspace(-2, 2, 9))
             for N in (10 ** 3, 10 ** 6)}
    assert worst[10 ** 6] <= 1.5 * worst[10 ** 3] + 0.1
    assert max(worst.values()) < 5


def test_expected_upcrossings():
    assert expected_upcrossings(1 / 3, 100, 10) == pytest.approx(2.96532, abs=1e-5)
    assert expected_upcrossings(0.2, 10 ** 4, 500) == pytest.approx(5.0)
    assert expected_upcrossings(1 / 3, 1000, 999) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        expected_upcrossings(1 / 3, 100, 100)


def test_moran_birth_count_poisson():
    p = reference_params(K=1000)
    res = moran_birth_count(p, 0, 1.0, seed=3)  # rate 2 * 1.5 * 1000
    assert abs(res.count - 3000) <= 4 * math.sqrt(3000)
    counts = [moran_birth_count(p, 1, 1.0, seed=s).count for s in range(5)]
    lam = 3 * 2.5 * 1000
    assert abs(np.mean(counts) - lam) <= 4 * math.sqrt(lam / 5)


def test_moran_without_recombination_copies_pairs():
    p = reference_params(K=200)
    res = moran_birth_count(p, 0, 2.0, seed=1)
    np.testing.assert_array_equal(res.label1, res.label2)
    assert len(np.unique(res.label1)) < len(res.label1)


def test_moran_with_recombination_mixes():
    p = reference_params(K=200, r2=0.5)
    res = moran_birth_count(p, 0, 2.0, seed=1)
    assert (res.label1 != res.label2).any()
