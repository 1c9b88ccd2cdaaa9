"""The four chain-weighted series families and their companion series.

Everything here is exact: truncated integer-coefficient series, integer
coefficient tables, and cyclotomic root-of-unity values.

* :func:`family_series` builds the four families from their defining sums
  over the chain polynomials — alternating Pochhammer-weighted sums, with
  certified even/odd averaging for the conditionally convergent family 2.
* :func:`sigma_series` / :func:`sigma_star_series` give the two classical
  partial-theta companions in all their representations, plus fast integer
  coefficient tables for large ranges.
* :func:`negative_part_series` enumerates the experimental companion sum
  whose printed region produces anomalous terms; those are quarantined in a
  diagnostics structure, never silently dropped.
* :func:`kz_root_value`, :func:`u_root_value`, :func:`verify_kz_duality`
  evaluate the Kontsevich-Zagier-type finite sums at roots of unity and
  check the duality between them; :func:`u_laurent_table` keeps the
  two-variable deformation symbolic in its second variable.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .agpolys import ag_polynomial, ag_polynomial_sweep
from .cyclotomic import CycNumber, root_of_unity_value
from .reports import CheckReport, report_from_condition
from .series import (
    INF,
    QSeries,
    QSeriesError,
    dense_int_coeffs,
    gaussian_binomial,
    pochhammer,
    stabilized_sum,
)

__all__ = [
    "family_series",
    "kz_root_value",
    "negative_part_series",
    "sigma_coefficients",
    "sigma_series",
    "sigma_star_coefficients",
    "sigma_star_series",
    "u_laurent_table",
    "u_root_value",
    "verify_kz_duality",
]

SIGMA_REPS = ("pochhammer", "alternating", "averaged", "indefinite")
SIGMA_STAR_REPS = ("odd-pochhammer", "alternating")


def _validate_family(j: int, k: int, ell: int) -> None:
    if j not in (1, 2, 3, 4):
        raise QSeriesError(f"family index must be in 1..4, got {j!r}")
    if not (isinstance(k, int) and k >= 1):
        raise QSeriesError(f"k must be a positive integer, got {k!r}")
    if not (isinstance(ell, int) and 1 <= ell <= k):
        raise QSeriesError(f"ell must satisfy 1 <= ell <= k, got {ell!r}")


def _require_finite(trunc):
    if trunc is INF:
        raise QSeriesError("this expansion needs a finite truncation")
    return trunc if isinstance(trunc, Fraction) else Fraction(trunc)


def _int_slots(trunc) -> int:
    return max(0, math.ceil(trunc))


def _int_mul(x: QSeries, y: QSeries) -> QSeries:
    """Product fast path: dense integer convolution when both operands are
    plain integer polynomials; falls back to the exact sparse product."""
    trunc = min(x.trunc, y.trunc)
    if trunc is INF or x.is_zero() or y.is_zero():
        return x * y
    if x.denom != 1 or y.denom != 1:
        return x * y
    if (x.min_order() or 0) < 0 or (y.min_order() or 0) < 0:
        return x * y
    size = _int_slots(trunc)
    if size <= 0:
        return x * y
    try:
        a = dense_int_coeffs(x, size)
        b = dense_int_coeffs(y, size)
    except QSeriesError:
        return x * y
    ints = all(isinstance(c, int) for c in a) and all(isinstance(c, int) for c in b)
    if not ints:
        aa, bb = [], []
        for row, out in ((a, aa), (b, bb)):
            for c in row:
                f = Fraction(c)
                if f.denominator != 1:
                    return x * y
                out.append(f.numerator)
        a, b = aa, bb
    amax = max(abs(c) for c in a)
    bmax = max(abs(c) for c in b)
    if amax and bmax and amax * bmax * size >= 2**62:
        return x * y
    conv = np.convolve(np.array(a, dtype=np.int64), np.array(b, dtype=np.int64))
    return QSeries.from_dense([int(v) for v in conv[:size]], trunc)


# ------------------------------------------------------------- the 4 families


def family_series(j: int, k: int, ell: int, trunc) -> QSeries:
    """Exact expansion of family ``j`` with parameters ``(k, ell)``.

    Families 1 and 2 weight the ``b = 0`` chain polynomials, families 3 and
    4 the ``b = 1`` ones:

    * ``j = 1``: sum over n >= 0 of (q)_n (-1)^n q^(n(n+1)/2) H_n,
    * ``j = 2``: sum over n >= 0 of (q^2;q^2)_n (-1)^n H_n, which converges
      only through even/odd averaging of partial sums; the averaging runs
      under a certified tail bound (order >= 2N at step N) that is checked
      against every observed increment,
    * ``j = 3``: sum over n >= 1 of (q)_(n-1) (-1)^n q^(n(n+1)/2) H_n,
    * ``j = 4``: sum over n >= 1 of (-1;q)_n (q)_(n-1) (-q)^n H_n, where the
      double Pochhammer prefactor is updated by U_(n+1) = U_n (1 - q^(2n)).
    """
    _validate_family(j, k, ell)
    t = _require_finite(trunc)
    size = _int_slots(t)
    if size <= 0:
        return QSeries.zero(t)
    b = 0 if j in (1, 2) else 1
    sweep = ag_polynomial_sweep(k, ell, b, t)

    if j == 1:
        total = QSeries.zero(t)
        for n, h in sweep:
            e = n * (n + 1) // 2
            if e >= t:
                break
            term = _int_mul(pochhammer("q", n, t), h).shift(e)
            total = total + (term if n % 2 == 0 else -term)
        return total

    if j == 2:
        cache: list[QSeries] = []

        def term_at(i: int) -> QSeries:
            while len(cache) <= i:
                n, h = next(sweep)
                piece = _int_mul(pochhammer("q2", n, t), h)
                cache.append(piece if n % 2 == 0 else -piece)
            return cache[i]

        return stabilized_sum(
            term_at, t, n_bound=2 * size + 8, tail_order=lambda n: 2 * n
        )

    if j == 3:
        total = QSeries.zero(t)
        for n, h in sweep:
            if n == 0:
                continue
            e = n * (n + 1) // 2
            if e >= t:
                break
            term = _int_mul(pochhammer("q", n - 1, t), h).shift(e)
            total = total + (-term if n % 2 else term)
        return total

    # j == 4
    total = QSeries.zero(t)
    u = None  # (-1;q)_n (q)_(n-1), built by the one-factor recurrence
    for n, h in sweep:
        if n == 0:
            continue
        if n >= t:
            break
        if u is None:
            u = QSeries.monomial(2, 0, t)  # n = 1 value
        else:
            u = u - u.shift(2 * (n - 1))  # multiply by (1 - q^(2(n-1)))
        term = _int_mul(u, h).shift(n)
        total = total + (-term if n % 2 else term)
    return total


# ------------------------------------------------------- classical companions


def sigma_series(rep: str, trunc) -> QSeries:
    """One of the four representations of the first classical companion.

    ``pochhammer``   sum over n >= 0 of q^(n(n+1)/2) / (-q;q)_n,
    ``alternating``  1 + sum over n >= 0 of (-1)^n q^(n+1) (q;q)_n,
    ``averaged``     2 * averaged partial sums of (-1)^n (q;q)_n,
    ``indefinite``   sum over n >= 0, |v| <= n of
                     (-1)^(n+v) q^(n(3n+1)/2 - v^2) (1 - q^(2n+1)).

    All four agree coefficient-for-coefficient below ``trunc``.
    """
    t = _require_finite(trunc)
    size = _int_slots(t)
    if size <= 0:
        return QSeries.zero(t)
    if rep == "pochhammer":
        total = QSeries.zero(t)
        for n in itertools.count(0):
            e = n * (n + 1) // 2
            if e >= t:
                break
            total = total + pochhammer("-q", n, t).inverse().truncate(t).shift(e)
        return total
    if rep == "alternating":
        total = QSeries.one(t)
        for n in itertools.count(0):
            if n + 1 >= t:
                break
            term = pochhammer("q", n, t).shift(n + 1)
            total = total + (-term if n % 2 else term)
        return total
    if rep == "averaged":
        def term_at(i: int) -> QSeries:
            p = pochhammer("q", i, t)
            return -p if i % 2 else p

        return stabilized_sum(
            term_at, t, n_bound=2 * size + 8, tail_order=lambda n: 2 * n
        ).scale(2)
    if rep == "indefinite":
        return QSeries.from_dense(sigma_coefficients(size - 1), t)
    raise QSeriesError(f"unknown representation {rep!r}; expected one of {SIGMA_REPS}")


def sigma_coefficients(n_max: int) -> list:
    """Integer coefficients 0..n_max via the indefinite double sum (fast)."""
    if n_max < 0:
        raise QSeriesError("n_max must be nonnegative")
    size = n_max + 1
    out = [0] * size
    for n in itertools.count(0):
        if n * (n + 1) // 2 >= size:
            break
        base = n * (3 * n + 1) // 2
        for nu in range(-n, n + 1):
            e = base - nu * nu
            sgn = -1 if (n + nu) % 2 else 1
            if e < size:
                out[e] += sgn
            e2 = e + 2 * n + 1
            if e2 < size:
                out[e2] -= sgn
    return out


def sigma_star_series(rep: str, trunc) -> QSeries:
    """One of the two representations of the second classical companion.

    ``odd-pochhammer``  2 * sum over n >= 1 of (-1)^n q^(n^2) / (q;q^2)_n,
    ``alternating``     -2 * sum over n >= 0 of q^(n+1) (q^2;q^2)_n.

    Both agree below ``trunc``; the leading term is -2q.
    """
    t = _require_finite(trunc)
    size = _int_slots(t)
    if size <= 0:
        return QSeries.zero(t)
    if rep == "odd-pochhammer":
        total = QSeries.zero(t)
        for n in itertools.count(1):
            e = n * n
            if e >= t:
                break
            term = pochhammer("q;q2", n, t).inverse().truncate(t).shift(e)
            total = total + (-term if n % 2 else term)
        return total.scale(2)
    if rep == "alternating":
        return QSeries.from_dense(sigma_star_coefficients(size - 1), t)
    raise QSeriesError(
        f"unknown representation {rep!r}; expected one of {SIGMA_STAR_REPS}"
    )


def sigma_star_coefficients(n_max: int) -> list:
    """Integer coefficients 0..n_max by dense accumulation of the
    alternating representation (running product updated in place)."""
    if n_max < 0:
        raise QSeriesError("n_max must be nonnegative")
    size = n_max + 1
    poly = [0] * size
    if size > 0:
        poly[0] = 1  # running (q^2;q^2)_n, starting at n = 0
    out = [0] * size
    for n in itertools.count(0):
        shift = n + 1
        if shift >= size:
            break
        for e in range(size - shift):
            if poly[e]:
                out[e + shift] -= 2 * poly[e]
        stride = 2 * (n + 1)
        for e in range(size - 1, stride - 1, -1):
            poly[e] -= poly[e - stride]
    return out


# ------------------------------------------------- experimental negative part


def negative_part_series(
    M: int,
    ell: int,
    trunc,
    region: str = "printed",
    nu_window: tuple | None = None,
):
    """Experimental companion sum over a two-variable lattice region.

    With ``X = 2(M+1)n + M - 1`` and ``Y = 2(M-1)v + M - 1 - 2*ell``, each
    admitted pair ``(n, v)`` contributes ``(-1)^(n+v)`` at exponent
    ``((M+1) Y^2 - (M-1) X^2) / (8 (M+1) (M-1))``.

    ``region`` selects the admission rule:

    * ``"printed"`` — ``|(M+1)n + M-1| < 2 |(M-1)v + M-1-2*ell|``, taken
      literally.  This region contains points with non-positive exponent
      (collected into the diagnostics, never added to the series) and also
      meets every exponent window at arbitrarily large ``|v|``, so a finite
      ``v`` window is required to make the enumeration terminate; enlarging
      the window may add terms.  The data is experimental.
    * ``"cone"`` — ``|X| < |Y|``.  Inside the cone the exponent is at least
      ``Y^2 / (4 (M^2-1))``, so enumeration below ``trunc`` is complete and
      no window is needed; every exponent is positive.

    Returns ``(series, diagnostics)`` where diagnostics record the region,
    the ``v`` window used, the anomalous (non-positive exponent) terms, and
    the count of terms at or above ``trunc``.
    """
    if not (isinstance(M, int) and M >= 2):
        raise QSeriesError(f"M must be an integer >= 2, got {M!r}")
    if not (isinstance(ell, int) and ell >= 1):
        raise QSeriesError(f"ell must be a positive integer, got {ell!r}")
    if region not in ("printed", "cone"):
        raise QSeriesError(f"region must be 'printed' or 'cone', got {region!r}")
    t = _require_finite(trunc)
    denom = 8 * (M + 1) * (M - 1)
    c = M - 1 - 2 * ell

    if nu_window is None:
        # |Y| <= y_bound covers every in-cone term below trunc; the printed
        # region gets a doubled window so near-cone anomalies are surfaced.
        budget = max(1, math.ceil(t))
        y_bound = math.isqrt(4 * (M * M - 1) * budget) + 2 * (M - 1)
        if region == "printed":
            y_bound *= 2
        lo = math.ceil(Fraction(-y_bound - c, 2 * (M - 1)))
        hi = math.floor(Fraction(y_bound - c, 2 * (M - 1)))
    else:
        lo, hi = nu_window
        if lo > hi:
            raise QSeriesError("empty v window")

    coeffs: dict[Fraction, int] = {}
    anomalies = []
    dropped_high = 0
    kept = 0
    for nu in range(lo, hi + 1):
        y = 2 * (M - 1) * nu + c
        if region == "printed":
            radius = abs(y + c)  # equals 2 |(M-1) v + M-1-2*ell|
            # |(M+1) n + (M-1)| < radius
            span = radius - (M - 1)
            n_lo = math.ceil(Fraction(-radius - (M - 1), M + 1))
            n_hi = math.floor(Fraction(span, M + 1))
            candidates = range(n_lo, n_hi + 1)
            admitted = (
                n for n in candidates if abs((M + 1) * n + M - 1) < radius
            )
        else:
            n_lo = math.ceil(Fraction(-abs(y) - (M - 1), 2 * (M + 1)))
            n_hi = math.floor(Fraction(abs(y) - (M - 1), 2 * (M + 1)))
            admitted = (
                n
                for n in range(n_lo, n_hi + 1)
                if abs(2 * (M + 1) * n + M - 1) < abs(y)
            )
        for n in admitted:
            x = 2 * (M + 1) * n + M - 1
            e_num = (M + 1) * y * y - (M - 1) * x * x
            exponent = Fraction(e_num, denom)
            sign = -1 if (n + nu) % 2 else 1
            if exponent <= 0:
                anomalies.append({"n": n, "nu": nu, "exponent": exponent})
            elif exponent < t:
                kept += 1
                coeffs[exponent] = coeffs.get(exponent, 0) + sign
            else:
                dropped_high += 1
    series = QSeries.from_terms(coeffs.items(), t)
    diagnostics = {
        "region": region,
        "nu_window": (lo, hi),
        "anomalous_terms": anomalies,
        "dropped_above_trunc": dropped_high,
        "terms_in_series": kept,
    }
    return series, diagnostics


# ----------------------------------------------- root-of-unity finite sums


@lru_cache(maxsize=None)
def _chain_poly_exact(k: int, ell: int, b: int, n: int) -> QSeries:
    return ag_polynomial(k, ell, b, n)


@lru_cache(maxsize=None)
def _binomial_at_root(top: int, bottom: int, N: int, power: int) -> CycNumber:
    return root_of_unity_value(gaussian_binomial(top, bottom), N, power)


@lru_cache(maxsize=None)
def _pochhammer_at_root(n: int, N: int, power: int) -> CycNumber:
    return root_of_unity_value(pochhammer("q", n, INF), N, power)


def kz_root_value(k: int, ell: int, N: int) -> CycNumber:
    """Exact value at the primitive N-th root of unity of the finite sum

        q^k * sum over (n_1,...,n_k) >= 0 of
            (q)_(n_k) q^(n_1^2+...+n_(k-1)^2 + n_ell+...+n_(k-1))
            * prod_(j=1..k-1) binom(n_(j+1) + [j == ell-1], n_j).

    The Pochhammer factor kills n_k >= N and the binomials force
    n_j <= n_(j+1) + 1, so the sum is finite.
    """
    _validate_family(1, k, ell)
    if not (isinstance(N, int) and N >= 1):
        raise QSeriesError(f"N must be a positive integer, got {N!r}")
    total = CycNumber.from_rational(N, 0)

    def descend(j: int, upper: int, values: list) -> None:
        """Choose n_j for j = k-1 down to 1; values collects n_k..n_(j+1)."""
        nonlocal total
        if j == 0:
            chain = list(reversed(values))  # n_1, ..., n_k
            n_k = chain[-1]
            exponent = k + sum(v * v for v in chain[:-1]) + sum(chain[ell - 1 : k - 1])
            value = _pochhammer_at_root(n_k, N, 1) * CycNumber.zeta(N, exponent % N)
            for idx in range(k - 1):
                top = chain[idx + 1] + (1 if idx + 1 == ell - 1 else 0)
                value = value * _binomial_at_root(top, chain[idx], N, 1)
            total = total + value
            return
        bump = 1 if j == ell - 1 else 0
        for v in range(0, upper + bump + 1):
            descend(j - 1, v, values + [v])

    for n_k in range(0, N):
        descend(k - 1, n_k, [n_k])
    return total


def u_root_value(k: int, ell: int, N: int) -> CycNumber:
    """Exact value of the dual finite sum at the inverse root ``q = zeta_N^(-1)``:

        q^(-k) * sum over n >= 1 of q^n (q)_(n-1)^2 H_n(k, ell; b=1),

    which terminates because (q)_(n-1) vanishes at roots of unity for
    n - 1 >= N.
    """
    _validate_family(1, k, ell)
    if not (isinstance(N, int) and N >= 1):
        raise QSeriesError(f"N must be a positive integer, got {N!r}")
    power = (N - 1) % N  # q = zeta^-1
    total = CycNumber.from_rational(N, 0)
    for n in range(1, N + 1):
        poch = _pochhammer_at_root(n - 1, N, power)
        if poch.is_zero():
            continue
        h = root_of_unity_value(_chain_poly_exact(k, ell, 1, n), N, power)
        qn = CycNumber.zeta(N, (power * n) % N)
        total = total + poch * poch * h * qn
    return CycNumber.zeta(N, k % N) * total  # q^(-k) = zeta^k


def verify_kz_duality(k: int, ell: int, N: int) -> CheckReport:
    """The root-of-unity value of the forward sum equals the dual sum's."""
    lhs = kz_root_value(k, ell, N)
    rhs = u_root_value(k, ell, N)
    return report_from_condition(
        "kz_duality",
        {"k": k, "ell": ell, "N": N},
        lhs == rhs,
        {"lhs": lhs.to_json_dict(), "rhs": rhs.to_json_dict()},
    )


def u_laurent_table(k: int, ell: int, trunc) -> dict:
    """Two-variable deformation kept symbolic in its second variable ``x``:

        sum over n >= 0 of q^n (-x;q)_n (-q/x;q)_n H_n(k, ell; b=0)

    returned as a map (power of x) -> exact q-series.  The specialization
    x = -1 collapses every n >= 1 term (the factor (1 - 1) appears), so the
    table preserves the full data instead of evaluating there.
    """
    _validate_family(1, k, ell)
    t = _require_finite(trunc)
    table: dict[int, QSeries] = {0: QSeries.one(t)}
    for n in itertools.count(1):
        if n >= t:
            break
        term: dict[int, QSeries] = {0: _chain_poly_exact(k, ell, 0, n).shift(n).truncate(t)}
        factors = [(1, i) for i in range(n)] + [(-1, i + 1) for i in range(n)]
        for xstep, qexp in factors:
            new: dict[int, QSeries] = dict(term)
            for p, s in term.items():
                key = p + xstep
                extra = s.shift(qexp).truncate(t)
                new[key] = new[key] + extra if key in new else extra
            term = new
        for p, s in term.items():
            table[p] = table[p] + s if p in table else s
    return {p: s.truncate(t) for p, s in table.items() if not s.is_zero()}
