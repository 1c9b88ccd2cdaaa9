"""Bailey-pair machinery.

A Bailey pair relative to ``a`` (here ``a`` is 1 or ``q``) is a pair of
sequences ``(alpha_n, beta_n)`` of q-series tied together by

    beta_n = sum_{m=0}^{n} alpha_m / ((q;q)_{n-m} (a q; q)_{n+m}).

This module provides the defining-relation verifier, the two explicit
pairs built from the chain polynomials of :mod:`qmaass.agpolys`, random
finite-support pairs for property testing, and truncation-level
verification of the four limit identities obtained by summing a pair
against classical weight sequences.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable

from .agpolys import ag_polynomial
from .reports import CheckReport, _exact_str
from .series import (
    INF,
    QSeries,
    QSeriesError,
    divide_one_minus_power,
    pochhammer,
    stabilized_sum,
)

RELATIVES = ("one", "q")
IDENTITY_KINDS = ("gauss", "even")

#: Pochhammer flavour of the second denominator factor (a q; q)_m.
_SECOND_FACTOR = {"one": "q", "q": "q2;q"}


def quadratic_shift(k: int, ell: int, nu: int) -> int:
    """Integer value of ((2k+1) nu^2 + (2k - 2 ell + 1) nu) / 2.

    The numerator is always even because nu^2 and nu share parity, so the
    shift is an exact integer; a non-integer value signals corrupted input.
    """
    num = (2 * k + 1) * nu * nu + (2 * k - 2 * ell + 1) * nu
    if num % 2:
        raise QSeriesError("quadratic exponent shift must be an integer")
    return num // 2


def _validate_pair_params(k, ell) -> None:
    if not (isinstance(k, int) and isinstance(ell, int)):
        raise QSeriesError("chain-pair parameters must be integers")
    if not 1 <= ell <= k:
        raise QSeriesError("chain-pair parameters need 1 <= ell <= k")


def _require_finite(trunc) -> Fraction:
    if trunc is INF:
        raise QSeriesError("this operation needs a finite truncation order")
    return Fraction(trunc)


@dataclass(frozen=True)
class BaileyPair:
    """A Bailey pair: its relative parameter and the two sequences.

    ``alpha`` and ``beta`` map ``(n, trunc)`` to a :class:`QSeries`; they
    must be cheap to call repeatedly (the built-in constructors memoize).
    """

    relative: str
    alpha: Callable[[int, object], QSeries]
    beta: Callable[[int, object], QSeries]
    label: str = ""

    def __post_init__(self) -> None:
        if self.relative not in RELATIVES:
            raise QSeriesError(
                f"relative must be one of {RELATIVES}, got {self.relative!r}"
            )


@lru_cache(maxsize=None)
def _inverse_pochhammer(kind: str, m: int, trunc) -> QSeries:
    return pochhammer(kind, m, trunc).inverse().truncate(trunc)


def definition_right_side(pair: BaileyPair, n: int, trunc) -> QSeries:
    """The defining-relation right side sum_{m<=n} alpha_m / (...)."""
    t = _require_finite(trunc)
    second = _SECOND_FACTOR[pair.relative]
    total = QSeries.zero(t)
    for m in range(n + 1):
        term = pair.alpha(m, t)
        if term.is_zero():
            continue
        term = term * _inverse_pochhammer("q", n - m, t)
        term = term * _inverse_pochhammer(second, n + m, t)
        total = total + term
    return total.truncate(t)


def verify_pair(pair: BaileyPair, n_max: int, trunc) -> CheckReport:
    """Check the defining relation for every n <= n_max below trunc."""
    t = _require_finite(trunc)
    params = {
        "relative": pair.relative,
        "label": pair.label,
        "n_max": n_max,
        "trunc": _exact_str(t),
    }
    for n in range(n_max + 1):
        lhs = pair.beta(n, t)
        rhs = definition_right_side(pair, n, t)
        bad = lhs.first_mismatch(rhs)
        if bad is not None:
            return CheckReport(
                check="bailey_pair_definition",
                params=params,
                status="fail",
                details={
                    "n": n,
                    "first_mismatch_exponent": _exact_str(bad),
                    "beta_coeff": _exact_str(lhs.coeff(bad)),
                    "definition_coeff": _exact_str(rhs.coeff(bad)),
                },
            )
    return CheckReport(
        check="bailey_pair_definition", params=params, status="pass", details={}
    )


# ------------------------------------------------------------- explicit pairs


def pair_relative_one(k: int, ell: int) -> BaileyPair:
    """The chain-polynomial Bailey pair relative to 1.

    ``beta_n`` is the chain polynomial with offset 1 (zero at n = 0) and
    ``alpha_n`` is an explicit signed lattice polynomial; the factor
    (1 - q^{2n}) makes ``alpha_0`` vanish as well.
    """
    _validate_pair_params(k, ell)

    @lru_cache(maxsize=None)
    def alpha(n: int, trunc) -> QSeries:
        if n == 0:
            return QSeries.zero(trunc)
        base = (k + 1) * n * n - n
        terms = []
        for nu in range(-n, n):
            sign = -1 if nu % 2 else 1
            e = base - quadratic_shift(k, ell, nu)
            terms.append((e, -sign))
            terms.append((e + 2 * n, sign))
        return QSeries.from_terms(terms, trunc)

    @lru_cache(maxsize=None)
    def beta(n: int, trunc) -> QSeries:
        if n == 0:
            return QSeries.zero(trunc)
        return ag_polynomial(k, ell, 1, n, trunc)

    return BaileyPair(
        relative="one",
        alpha=alpha,
        beta=beta,
        label=f"chain(k={k},ell={ell},relative=one)",
    )


def pair_relative_q(k: int, ell: int) -> BaileyPair:
    """The chain-polynomial Bailey pair relative to q.

    ``beta_n`` is the chain polynomial with offset 0 and ``alpha_n``
    carries the geometric prefactor (1 - q^{2n+1})/(1 - q), expanded as
    the exact polynomial 1 + q + ... + q^{2n}.
    """
    _validate_pair_params(k, ell)

    @lru_cache(maxsize=None)
    def alpha(n: int, trunc) -> QSeries:
        base = (k + 1) * n * n + k * n
        terms = []
        for nu in range(-n, n + 1):
            sign = -1 if nu % 2 else 1
            terms.append((base - quadratic_shift(k, ell, nu), sign))
        lattice = QSeries.from_terms(terms, INF)
        prefactor = QSeries.from_dense([1] * (2 * n + 1), INF)
        return (lattice * prefactor).truncate(trunc)

    @lru_cache(maxsize=None)
    def beta(n: int, trunc) -> QSeries:
        return ag_polynomial(k, ell, 0, n, trunc)

    return BaileyPair(
        relative="q",
        alpha=alpha,
        beta=beta,
        label=f"chain(k={k},ell={ell},relative=q)",
    )


def unit_pair(relative: str) -> BaileyPair:
    """The pair with alpha = (1, 0, 0, ...) and beta_n forced by the relation."""
    if relative not in RELATIVES:
        raise QSeriesError(f"relative must be one of {RELATIVES}")
    second = _SECOND_FACTOR[relative]

    def alpha(n: int, trunc) -> QSeries:
        if n == 0:
            return QSeries.one(trunc)
        return QSeries.zero(trunc)

    @lru_cache(maxsize=None)
    def beta(n: int, trunc) -> QSeries:
        out = _inverse_pochhammer("q", n, trunc) * _inverse_pochhammer(
            second, n, trunc
        )
        return out.truncate(trunc)

    return BaileyPair(
        relative=relative, alpha=alpha, beta=beta, label=f"unit({relative})"
    )


def synthetic_pair(
    relative: str,
    rng,
    max_support: int = 5,
    index_range: int = 8,
    coeff_bound: int = 9,
) -> BaileyPair:
    """A random pair: finite-support integer alpha, beta from the relation.

    For relative 1 the support excludes index 0, keeping alpha_0 = beta_0 = 0;
    the limit identities that sum from n = 1 silently ignore the 0-index
    entries on one side only, so nonzero 0-index entries would break them.
    """
    if relative not in RELATIVES:
        raise QSeriesError(f"relative must be one of {RELATIVES}")
    lowest = 1 if relative == "one" else 0
    indices = rng.sample(
        range(lowest, index_range), rng.randint(1, max_support)
    )
    support = {}
    for i in indices:
        value = 0
        while value == 0:
            value = rng.randint(-coeff_bound, coeff_bound)
        support[i] = value

    def alpha(n: int, trunc) -> QSeries:
        return QSeries.monomial(support.get(n, 0), 0, trunc)

    placeholder = BaileyPair(
        relative=relative, alpha=alpha, beta=alpha, label="_partial"
    )

    @lru_cache(maxsize=None)
    def beta(n: int, trunc) -> QSeries:
        return definition_right_side(placeholder, n, trunc)

    label = "synthetic({},{})".format(
        relative, ",".join(f"{i}:{support[i]}" for i in sorted(support))
    )
    return BaileyPair(relative=relative, alpha=alpha, beta=beta, label=label)


# ------------------------------------------------------------ limit identities


def _triangle(n: int) -> int:
    return n * (n + 1) // 2


def _sum_weighted_terms(term_at, weight_min, trunc, n_cap: int = 4000) -> QSeries:
    """Plain sum of term_at(i), cut off where the decaying weight closes it.

    ``weight_min(i)`` is a provable lower bound for the order contributed by
    the weight sequence alone; summation stops once it reaches trunc.  Two
    probe terms past the cutoff guard against sequences that violate the
    nonnegative-order assumption the cutoff relies on.
    """
    total = QSeries.zero(trunc)
    i = 0
    while weight_min(i) < trunc:
        total = total + term_at(i)
        i += 1
        if i > n_cap:
            raise QSeriesError(
                "limit-identity sum did not close below the truncation order"
            )
    for probe in (i, i + 1):
        lo = term_at(probe).min_order()
        if lo is not None and lo < trunc:
            raise QSeriesError(
                "limit-identity term re-entered below trunc past the cutoff"
            )
    return total.truncate(trunc)


def verify_limiting_identity(
    pair: BaileyPair,
    relative: str,
    kind: str,
    trunc,
    n_bound: int = 600,
) -> CheckReport:
    """Verify one of the four limit identities on a pair, below trunc.

    The identity is selected by ``(relative, kind)``: ``gauss`` weights carry
    the triangular power q^{n(n+1)/2}; ``even`` weights use (q^2;q^2)
    Pochhammers.  ``relative`` must match the pair's own relative parameter.
    The ``even`` identity for relative q has no decaying weight on either
    side, so both sides are summed with stabilized averaging.
    """
    if relative not in RELATIVES:
        raise QSeriesError(f"relative must be one of {RELATIVES}")
    if kind not in IDENTITY_KINDS:
        raise QSeriesError(f"kind must be one of {IDENTITY_KINDS}")
    if pair.relative != relative:
        raise QSeriesError(
            f"pair is relative {pair.relative!r} but the requested "
            f"identity needs relative {relative!r}"
        )
    t = _require_finite(trunc)
    params = {
        "relative": relative,
        "kind": kind,
        "label": pair.label,
        "trunc": _exact_str(t),
    }

    if relative == "one":
        if kind == "gauss":
            weight = lambda i: _triangle(i + 1)  # noqa: E731

            def lhs_at(i: int) -> QSeries:
                n = i + 1
                term = pochhammer("q", n - 1, t) * pair.beta(n, t)
                term = term.shift(_triangle(n)).truncate(t)
                return -term if n % 2 else term

            def rhs_at(i: int) -> QSeries:
                n = i + 1
                term = pair.alpha(n, t).shift(_triangle(n)).truncate(t)
                term = divide_one_minus_power(term, n)
                return -term if n % 2 else term

        else:
            weight = lambda i: i + 1  # noqa: E731

            def lhs_at(i: int) -> QSeries:
                n = i + 1
                term = pochhammer("q2", n - 1, t) * pair.beta(n, t)
                term = term.shift(n).truncate(t)
                return -term if n % 2 else term

            def rhs_at(i: int) -> QSeries:
                n = i + 1
                term = pair.alpha(n, t).shift(n).truncate(t)
                term = divide_one_minus_power(term, 2 * n)
                return -term if n % 2 else term

        lhs = _sum_weighted_terms(lhs_at, weight, t)
        rhs = _sum_weighted_terms(rhs_at, weight, t)
    elif kind == "gauss":

        def lhs_at(n: int) -> QSeries:
            term = pochhammer("q", n, t) * pair.beta(n, t)
            term = term.shift(_triangle(n)).truncate(t)
            return -term if n % 2 else term

        def rhs_at(n: int) -> QSeries:
            term = pair.alpha(n, t).shift(_triangle(n)).truncate(t)
            return -term if n % 2 else term

        lhs = _sum_weighted_terms(lhs_at, _triangle, t)
        rhs = (QSeries.one(t) - QSeries.monomial(1, 1, t)) * _sum_weighted_terms(
            rhs_at, _triangle, t
        )
        rhs = rhs.truncate(t)
    else:

        def lhs_at(n: int) -> QSeries:
            term = pochhammer("q2", n, t) * pair.beta(n, t)
            return -term.truncate(t) if n % 2 else term.truncate(t)

        def rhs_at(n: int) -> QSeries:
            term = pair.alpha(n, t).truncate(t)
            return -term if n % 2 else term

        lhs = stabilized_sum(lhs_at, t, n_bound=n_bound)
        rhs = stabilized_sum(rhs_at, t, n_bound=n_bound)
        one_minus_q = QSeries.one(t) - QSeries.monomial(1, 1, t)
        rhs = (one_minus_q * rhs).truncate(t).scale(Fraction(1, 2))

    lhs = lhs.truncate(t)
    bad = lhs.first_mismatch(rhs)
    if bad is None:
        return CheckReport(
            check="bailey_limit_identity", params=params, status="pass", details={}
        )
    return CheckReport(
        check="bailey_limit_identity",
        params=params,
        status="fail",
        details={
            "first_mismatch_exponent": _exact_str(bad),
            "lhs_coeff": _exact_str(lhs.coeff(bad)),
            "rhs_coeff": _exact_str(rhs.coeff(bad)),
        },
    )
