"""Chain polynomials, the partition oracle, and the reversal identity."""

import itertools
from fractions import Fraction
from functools import lru_cache

import pytest

from qmaass.agpolys import (
    PartitionConstraint,
    ag_generating,
    ag_polynomial,
    ag_polynomial_sweep,
    verify_ag_relation,
)
from qmaass.series import INF, QSeries, QSeriesError

# --------------------------------------------------------------------- oracles


@lru_cache(maxsize=None)
def _oracle_binomial(top: int, bottom: int):
    """Gaussian binomial as an exponent->coeff dict via the Pascal recursion
    [m, j] = [m-1, j-1] + q^j * [m-1, j]  (independent of the library route)."""
    if bottom < 0 or bottom > top:
        return {}
    if bottom == 0 or bottom == top:
        return {0: 1}
    out = dict(_oracle_binomial(top - 1, bottom - 1))
    for e, c in _oracle_binomial(top - 1, bottom).items():
        out[e + bottom] = out.get(e + bottom, 0) + c
    return {e: c for e, c in out.items() if c}


def oracle_chain_poly(k: int, ell: int, b: int, n: int) -> dict:
    """Brute-force chain sum with dict polynomial arithmetic."""
    if k == 1:
        return {0: 1}
    total: dict = {}
    for chain in itertools.product(range(n + 1), repeat=k - 1):
        if any(chain[i] > chain[i + 1] for i in range(k - 2)):
            continue
        values = list(chain) + [n]
        poly = {0: 1}
        weight = sum(v * v + (1 - b) * v for v in chain)
        poly = {weight: 1}
        dead = False
        for j in range(1, k):
            g = -b * j + sum(2 * values[r - 1] + (1 if r < ell else 0) for r in range(1, j + 1))
            if g < 0:
                dead = True
                break
            bottom = values[j] - values[j - 1]
            factor = _oracle_binomial(bottom + g, bottom)
            new = {}
            for e1, c1 in poly.items():
                for e2, c2 in factor.items():
                    new[e1 + e2] = new.get(e1 + e2, 0) + c1 * c2
            poly = new
        if dead:
            continue
        for e, c in poly.items():
            total[e] = total.get(e, 0) + c
    return {e: c for e, c in total.items() if c}


def oracle_partition_counts(c: PartitionConstraint, size: int) -> list:
    """Filtered product over whole frequency vectors (no DP factorization)."""
    npos = c.part_bound - 1
    counts = [0] * size
    if npos == 0:
        if size > 0:
            counts[0] = 1
        return counts
    ranges = [range(0, (size - 1) // j + 1) for j in range(1, npos + 1)]
    for fvec in itertools.product(*ranges):
        if fvec[0] >= c.first_freq_bound:
            continue
        if fvec[-1] >= c.last_freq_bound:
            continue
        if any(fvec[i] + fvec[i + 1] > c.pair_sum_max for i in range(npos - 1)):
            continue
        w = sum((i + 1) * f for i, f in enumerate(fvec))
        if w < size:
            counts[w] += 1
    return counts


# ---------------------------------------------------------------- chain values


def test_single_level_is_constant_one():
    for b in (0, 1):
        for n in range(31):
            assert ag_polynomial(1, 1, b, n) == QSeries.one()


def test_hand_expanded_value():
    # k=2, ell=1, b=1, n=1: the chain (0,) has g_1 = -1 (dead) and the
    # chain (1,) contributes q^1 * binom(1,0) = q.
    assert ag_polynomial(2, 1, 1, 1) == QSeries.monomial(1, 1)


def test_top_value_zero():
    for k in (1, 2, 3, 4):
        for ell in range(1, k + 1):
            assert ag_polynomial(k, ell, 0, 0) == QSeries.one()
            expected = QSeries.one() if ell == k else QSeries.zero()
            assert ag_polynomial(k, ell, 1, 0) == expected


def test_matches_bruteforce_oracle():
    for k in (2, 3):
        for ell in range(1, k + 1):
            for b in (0, 1):
                for n in range(6):
                    got = ag_polynomial(k, ell, b, n)
                    want = oracle_chain_poly(k, ell, b, n)
                    assert dict((int(e), c) for e, c in got.terms()) == want, (k, ell, b, n)


def test_truncated_matches_full():
    full = ag_polynomial(3, 2, 0, 5)
    cut = ag_polynomial(3, 2, 0, 5, trunc=12)
    assert cut == full.truncate(12)


def test_nonnegative_coefficients_without_linear_weight():
    for k in (2, 3):
        for ell in range(1, k + 1):
            for n in range(11):
                poly = ag_polynomial(k, ell, 0, n)
                assert all(c > 0 for _, c in poly.terms()), (k, ell, n)


def test_parameter_validation():
    with pytest.raises(QSeriesError):
        ag_polynomial(0, 1, 0, 1)
    with pytest.raises(QSeriesError):
        ag_polynomial(2, 3, 0, 1)
    with pytest.raises(QSeriesError):
        ag_polynomial(2, 0, 0, 1)
    with pytest.raises(QSeriesError):
        ag_polynomial(2, 1, 2, 1)
    with pytest.raises(QSeriesError):
        ag_polynomial(2, 1, 0, -1)


# ---------------------------------------------------------------------- sweep


def test_sweep_matches_direct_evaluation():
    trunc = 30
    for k in (1, 2, 3):
        for ell in range(1, k + 1):
            for b in (0, 1):
                sweep = ag_polynomial_sweep(k, ell, b, trunc)
                for n, poly in itertools.islice(sweep, 11):
                    assert poly == ag_polynomial(k, ell, b, n, trunc=trunc), (k, ell, b, n)


def test_sweep_deep_consistency_spot():
    # Larger n where the frozen-chain path is exercised (n past trunc).
    trunc = 12
    sweep = ag_polynomial_sweep(2, 1, 0, trunc)
    values = {n: poly for n, poly in itertools.islice(sweep, 26)}
    for n in (15, 20, 25):
        assert values[n] == ag_polynomial(2, 1, 0, n, trunc=trunc)


def test_sweep_requires_finite_truncation():
    with pytest.raises(QSeriesError):
        next(ag_polynomial_sweep(2, 1, 0, INF))


# ------------------------------------------------------------------ partitions


def test_partition_trivial_cases():
    assert ag_generating(PartitionConstraint(1, 1, 2, 2), 10) == QSeries.zero(10) + QSeries.one(10)
    # part_bound 1: only the empty partition
    assert ag_generating(PartitionConstraint(5, 5, 5, 1), 10) == QSeries.one(10)


def test_partition_first_freq_bound_one_blocks_all_ones():
    # parts in {1}, f_1 < 1: only the empty partition survives
    series = ag_generating(PartitionConstraint(3, 1, 4, 2), 15)
    assert series == QSeries.one(15)


def test_partition_unconstrained_matches_bounded_parts_product():
    # Slack bounds: partitions into parts < 6.
    trunc = 25
    series = ag_generating(PartitionConstraint(10**6, 10**6, 10**6, 6), trunc)
    product = QSeries.one(trunc)
    for j in range(1, 6):
        product = product * QSeries.from_terms([(0, 1), (j, -1)], trunc)
    assert series == product.inverse().truncate(trunc)


def test_partition_matches_bruteforce_oracle():
    size = 14
    cases = [
        PartitionConstraint(2, 1, 3, 4),
        PartitionConstraint(1, 2, 2, 5),
        PartitionConstraint(3, 3, 1, 4),
        PartitionConstraint(2, 2, 2, 3),
        PartitionConstraint(4, 2, 3, 2),
    ]
    for constraint in cases:
        series = ag_generating(constraint, size)
        want = oracle_partition_counts(constraint, size)
        got = [series.coeff(e) for e in range(size)]
        assert got == want, constraint


def test_partition_validation():
    with pytest.raises(QSeriesError):
        PartitionConstraint(0, 1, 1, 1)
    with pytest.raises(QSeriesError):
        PartitionConstraint(1, 1, 1, 0)
    with pytest.raises(QSeriesError):
        ag_generating(PartitionConstraint(1, 1, 1, 2), INF)


# ------------------------------------------------------------------- reversal


def test_reversal_hand_case():
    report = verify_ag_relation(2, 1, 1, 1)
    assert report.ok
    assert report.params == {"k": 2, "ell": 1, "b": 1, "n": 1}


def test_reversal_top_zero():
    assert verify_ag_relation(2, 1, 0, 0).ok
    assert verify_ag_relation(3, 2, 0, 0).ok


def test_reversal_small_sweep():
    for k in (2, 3):
        for ell in range(1, k + 1):
            for b in (0, 1):
                for n in range(5):
                    if b == 1 and n == 0:
                        continue
                    assert verify_ag_relation(k, ell, b, n).ok, (k, ell, b, n)


def test_reversal_rejects_degenerate_corners():
    with pytest.raises(QSeriesError):
        verify_ag_relation(1, 1, 0, 3)
    with pytest.raises(QSeriesError):
        verify_ag_relation(2, 1, 1, 0)


def test_reversal_degree_matches_shift():
    # The reversal exponent equals the polynomial degree whenever the
    # polynomial is nonzero (so no negative exponents appear on the left).
    for k in (2, 3):
        for n in range(1, 5):
            poly = ag_polynomial(k, 1, 0, n)
            assert poly.degree() == Fraction((k - 1) * n * (n + 1))
