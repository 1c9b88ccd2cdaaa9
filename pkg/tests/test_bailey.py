"""Bailey pairs: defining relation, explicit pairs, limit identities."""

import random

import pytest

from qmaass.bailey import (
    BaileyPair,
    definition_right_side,
    pair_relative_one,
    pair_relative_q,
    quadratic_shift,
    synthetic_pair,
    unit_pair,
    verify_limiting_identity,
    verify_pair,
)
from qmaass.families import family_series
from qmaass.series import QSeries, QSeriesError, pochhammer

# ------------------------------------------------------------ quadratic shift


def test_quadratic_shift_values():
    # ((2k+1) nu^2 + (2k-2l+1) nu)/2 at k = l = 1: nu=1 -> 2, nu=-1 -> 1.
    assert quadratic_shift(1, 1, 0) == 0
    assert quadratic_shift(1, 1, 1) == 2
    assert quadratic_shift(1, 1, -1) == 1
    # k=3, l=2, nu=-4: (7*16 + 3*(-4))/2 = (112 - 12)/2 = 50.
    assert quadratic_shift(3, 2, -4) == 50


def test_quadratic_shift_always_integral():
    for k in range(1, 6):
        for ell in range(1, k + 1):
            for nu in range(-8, 9):
                assert isinstance(quadratic_shift(k, ell, nu), int)


# -------------------------------------------------------------- explicit pairs


def test_pair_one_alpha_frozen():
    # Hand expansion at k = l = 1, n = 1:
    # -q(1 - q^2)(-q^{-1} + 1) = (1-q)(1-q^2) = 1 - q - q^2 + q^3.
    pair = pair_relative_one(1, 1)
    assert pair.alpha(1, 10) == QSeries.from_dense([1, -1, -1, 1], trunc=10)


def test_pair_q_alpha_frozen():
    # Hand expansion at k = l = 1, n = 1:
    # (1+q+q^2)(q^3 - q^2 - q) = -q - 2q^2 - q^3 + q^5.
    pair = pair_relative_q(1, 1)
    want = QSeries.from_terms([(1, -1), (2, -2), (3, -1), (5, 1)], trunc=10)
    assert pair.alpha(1, 10) == want


def test_pair_one_vanishing_at_zero():
    pair = pair_relative_one(2, 1)
    assert pair.alpha(0, 10).is_zero()
    assert pair.beta(0, 10).is_zero()


def test_pair_q_at_zero():
    pair = pair_relative_q(2, 1)
    assert pair.alpha(0, 10) == QSeries.one(10)
    assert pair.beta(0, 10) == QSeries.one(10)


def test_pair_alpha_integer_exponents():
    for maker in (pair_relative_one, pair_relative_q):
        for k in (1, 2, 3):
            for ell in range(1, k + 1):
                pair = maker(k, ell)
                for n in range(5):
                    assert pair.alpha(n, 50).denom == 1


def test_pair_parameter_validation():
    with pytest.raises(QSeriesError):
        pair_relative_one(1, 2)
    with pytest.raises(QSeriesError):
        pair_relative_q(0, 0)


# ----------------------------------------------------------- defining relation


def test_unit_pair_beta_formula():
    pair = unit_pair("one")
    want = (pochhammer("q", 3, 30) * pochhammer("q", 3, 30)).inverse()
    assert pair.beta(3, 30) == want.truncate(30)
    pair_q = unit_pair("q")
    want_q = (pochhammer("q", 2, 30) * pochhammer("q2;q", 2, 30)).inverse()
    assert pair_q.beta(2, 30) == want_q.truncate(30)


def test_verify_unit_pairs():
    for relative in ("one", "q"):
        report = verify_pair(unit_pair(relative), 8, 40)
        assert report.ok, report.to_json_dict()


def test_verify_chain_pairs_small():
    for maker in (pair_relative_one, pair_relative_q):
        for k in (1, 2):
            for ell in range(1, k + 1):
                report = verify_pair(maker(k, ell), 6, 40)
                assert report.ok, report.to_json_dict()


def test_verify_pair_negative_control():
    base = pair_relative_q(1, 1)

    def bad_beta(n, trunc):
        out = base.beta(n, trunc)
        if n == 1:
            out = out + QSeries.monomial(1, 1, trunc)
        return out

    corrupted = BaileyPair(relative="q", alpha=base.alpha, beta=bad_beta)
    report = verify_pair(corrupted, 4, 30)
    assert not report.ok
    assert report.to_json_dict()["n"] == 1
    assert "first_mismatch_exponent" in report.to_json_dict()


# ------------------------------------------------------------ limit identities


def test_limit_identities_chain_pairs():
    for k in (1, 2):
        for ell in range(1, k + 1):
            pair1 = pair_relative_one(k, ell)
            pairq = pair_relative_q(k, ell)
            for kind in ("gauss", "even"):
                r1 = verify_limiting_identity(pair1, "one", kind, 30)
                assert r1.ok, r1.to_json_dict()
                rq = verify_limiting_identity(pairq, "q", kind, 30)
                assert rq.ok, rq.to_json_dict()


def test_limit_identity_relative_mismatch():
    pair = pair_relative_one(1, 1)
    with pytest.raises(QSeriesError):
        verify_limiting_identity(pair, "q", "gauss", 20)
    with pytest.raises(QSeriesError):
        verify_limiting_identity(pair, "one", "triangular", 20)
    with pytest.raises(QSeriesError):
        verify_limiting_identity(pair, "unit", "gauss", 20)


def test_limit_identities_fixed_synthetic():
    rng = random.Random(7)
    pair_one = synthetic_pair("one", rng)
    pair_q = synthetic_pair("q", rng)
    for kind in ("gauss", "even"):
        assert verify_limiting_identity(pair_one, "one", kind, 40).ok
        assert verify_limiting_identity(pair_q, "q", kind, 40).ok


def test_limit_identities_random_sweep():
    rng = random.Random(20260823)
    for trial in range(10):
        for relative in ("one", "q"):
            pair = synthetic_pair(relative, rng)
            assert verify_pair(pair, 6, 30).ok, pair.label
            for kind in ("gauss", "even"):
                report = verify_limiting_identity(pair, relative, kind, 30)
                assert report.ok, (pair.label, kind, report.to_json_dict())


def test_synthetic_relative_one_support_excludes_zero():
    rng = random.Random(5)
    for _ in range(20):
        pair = synthetic_pair("one", rng)
        assert pair.alpha(0, 10).is_zero()
        assert pair.beta(0, 10).is_zero()


def test_gauss_identity_left_side_is_family_one():
    # The triangular-weight sum over beta_n of the relative-q chain pair is
    # exactly the first series family.
    k, ell = 2, 1
    trunc = 25
    pair = pair_relative_q(k, ell)
    total = QSeries.zero(trunc)
    n = 0
    while n * (n + 1) // 2 < trunc:
        term = pochhammer("q", n, trunc) * pair.beta(n, trunc)
        term = term.shift(n * (n + 1) // 2).truncate(trunc)
        total = total + (-term if n % 2 else term)
        n += 1
    assert total == family_series(1, k, ell, trunc)


def test_definition_right_side_unit():
    pair = unit_pair("one")
    rhs = definition_right_side(pair, 2, 20)
    want = (pochhammer("q", 2, 20) * pochhammer("q", 2, 20)).inverse()
    assert rhs == want.truncate(20)
