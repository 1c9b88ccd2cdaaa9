"""Exact sparse q-series with rational exponents and explicit truncation.

A :class:`QSeries` stores finitely many terms ``c * q^(m/denom)`` with integer
numerators ``m`` over one shared positive denominator, together with a
truncation threshold ``trunc``: the series is known exactly for all exponents
strictly below ``trunc``, and terms at or above ``trunc`` are discarded.
Coefficients may be ``int``, ``Fraction``, or any ring element supporting
``+``, ``-``, ``*`` and equality with ``0`` (cyclotomic numbers in
particular).  Rescaling ``(m, denom) -> (m*t, denom*t)`` never changes the
series; equality compares the canonical (gcd-reduced) form.

``trunc`` may be ``math.inf`` for series that are exact polynomials (needed
when a polynomial must be reversed coefficient-by-coefficient).
"""

from __future__ import annotations

import json
import math
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Sequence

INF = math.inf

_EXPONENT = int | Fraction


class QSeriesError(ValueError):
    """Raised for invalid q-series operations."""


class StabilizationError(QSeriesError):
    """Raised when an averaged partial-sum scheme fails to settle.

    ``first_unstable_exponent`` records the lowest exponent still changing
    when the term budget ran out.
    """

    def __init__(self, message: str, first_unstable_exponent: Fraction | None = None):
        super().__init__(message)
        self.first_unstable_exponent = first_unstable_exponent


def _is_zero(c) -> bool:
    return c == 0


def _clean(c):
    """Normalize a coefficient: rationals with denominator 1 become ints."""
    if isinstance(c, Fraction) and c.denominator == 1:
        return int(c)
    return c


def _strict_int_bound(t):
    """Smallest integer b such that  m < t  <=>  m < b  for integers m."""
    if t == INF:
        return None
    if isinstance(t, float):
        t = Fraction(t)
    if t.denominator == 1:
        return t.numerator
    return math.ceil(t)


class QSeries:
    __slots__ = ("denom", "trunc", "_coeffs")

    def __init__(self, coeffs: dict[int, object], denom: int = 1, trunc=INF):
        if denom <= 0:
            raise QSeriesError("denominator must be positive")
        if isinstance(trunc, float):
            # canonicalize +inf produced by arithmetic back to the singleton
            if math.isinf(trunc) and trunc > 0:
                trunc = INF
            else:
                raise QSeriesError("trunc must be rational or infinite")
        elif not isinstance(trunc, (int, Fraction)):
            raise QSeriesError("trunc must be rational or infinite")
        bound = None if trunc is INF else trunc * denom
        clean: dict[int, object] = {}
        for m, c in coeffs.items():
            if bound is not None and m >= bound:
                continue
            c = _clean(c)
            if not _is_zero(c):
                clean[m] = c
        self.denom = denom
        self.trunc = Fraction(trunc) if isinstance(trunc, int) else trunc
        self._coeffs = clean

    # ------------------------------------------------------------------ build
    @classmethod
    def zero(cls, trunc=INF, denom: int = 1) -> "QSeries":
        return cls({}, denom, trunc)

    @classmethod
    def one(cls, trunc=INF) -> "QSeries":
        return cls({0: 1}, 1, trunc)

    @classmethod
    def monomial(cls, coeff, exponent: _EXPONENT, trunc=INF) -> "QSeries":
        e = Fraction(exponent)
        return cls({e.numerator: coeff}, e.denominator, trunc)

    @classmethod
    def from_terms(cls, terms: Iterable[tuple[_EXPONENT, object]], trunc=INF) -> "QSeries":
        """Build from (exponent, coefficient) pairs; repeated exponents add."""
        exps = [(Fraction(e), c) for e, c in terms]
        denom = math.lcm(*(e.denominator for e, _ in exps)) if exps else 1
        coeffs: dict[int, object] = {}
        for e, c in exps:
            m = e.numerator * (denom // e.denominator)
            coeffs[m] = coeffs.get(m, 0) + c
        return cls(coeffs, denom, trunc)

    @classmethod
    def from_dense(cls, coeffs: Sequence, trunc=INF) -> "QSeries":
        """Build from a dense list indexed by integer exponent."""
        return cls({i: c for i, c in enumerate(coeffs)}, 1, trunc)

    # ------------------------------------------------------------------ views
    def terms(self) -> Iterator[tuple[Fraction, object]]:
        """Yield (exponent, coefficient) pairs in increasing exponent order."""
        for m in sorted(self._coeffs):
            yield Fraction(m, self.denom), self._coeffs[m]

    def coeff(self, exponent: _EXPONENT):
        e = Fraction(exponent)
        if self.denom % e.denominator != 0:
            return 0
        return self._coeffs.get(e.numerator * (self.denom // e.denominator), 0)

    def min_order(self) -> Fraction | None:
        """Lowest stored exponent, or None for the (truncated) zero series."""
        if not self._coeffs:
            return None
        return Fraction(min(self._coeffs), self.denom)

    def is_zero(self) -> bool:
        return not self._coeffs

    def num_terms(self) -> int:
        return len(self._coeffs)

    def degree(self) -> Fraction | None:
        if not self._coeffs:
            return None
        return Fraction(max(self._coeffs), self.denom)

    def coefficients_are_rational(self) -> bool:
        return all(isinstance(c, (int, Fraction)) for c in self._coeffs.values())

    # -------------------------------------------------------------- normalize
    def normalized(self) -> "QSeries":
        """Canonical form: shared denominator reduced by the overall gcd."""
        if not self._coeffs:
            if self.denom == 1:
                return self
            return QSeries({}, 1, self.trunc)
        g = math.gcd(self.denom, *self._coeffs.keys())
        if g == 1:
            return self
        return QSeries(
            {m // g: c for m, c in self._coeffs.items()}, self.denom // g, self.trunc
        )

    def _rescaled(self, denom: int) -> dict[int, object]:
        f = denom // self.denom
        if f == 1:
            return self._coeffs
        return {m * f: c for m, c in self._coeffs.items()}

    # ------------------------------------------------------------- arithmetic
    def __eq__(self, other) -> bool:
        if not isinstance(other, QSeries):
            return NotImplemented
        a, b = self.normalized(), other.normalized()
        return a.denom == b.denom and a.trunc == b.trunc and a._coeffs == b._coeffs

    __hash__ = None

    def __neg__(self) -> "QSeries":
        return QSeries({m: -c for m, c in self._coeffs.items()}, self.denom, self.trunc)

    def _combined_trunc_add(self, other) -> Fraction:
        return min(self.trunc, other.trunc)

    def __add__(self, other) -> "QSeries":
        if not isinstance(other, QSeries):
            return NotImplemented
        denom = math.lcm(self.denom, other.denom)
        out = dict(self._rescaled(denom))
        for m, c in other._rescaled(denom).items():
            out[m] = out.get(m, 0) + c
        return QSeries(out, denom, self._combined_trunc_add(other))

    def __sub__(self, other) -> "QSeries":
        if not isinstance(other, QSeries):
            return NotImplemented
        return self + (-other)

    def scale(self, c) -> "QSeries":
        """Multiply every coefficient by a scalar ring element."""
        if _is_zero(c):
            return QSeries({}, 1, self.trunc)
        return QSeries({m: c * v for m, v in self._coeffs.items()}, self.denom, self.trunc)

    def _mul_trunc(self, other) -> Fraction:
        # With x = a + O(q^tx) and y = b + O(q^ty),
        #   xy = ab + a*O(q^ty) + b*O(q^tx) + O(q^(tx+ty)),
        # so the product is exact below the smallest of tx+ty and the two
        # known-part cross orders; a cross term exists only when that known
        # part is nonempty, and its order is capped at 0 to stay conservative.
        candidates = [self.trunc + other.trunc]
        ox = self.min_order()
        oy = other.min_order()
        if oy is not None:
            candidates.append(self.trunc + min(oy, 0))
        if ox is not None:
            candidates.append(other.trunc + min(ox, 0))
        return min(candidates)

    def __mul__(self, other) -> "QSeries":
        if not isinstance(other, QSeries):
            if isinstance(other, (int, Fraction)) or hasattr(other, "order"):
                return self.scale(other)
            return NotImplemented
        denom = math.lcm(self.denom, other.denom)
        xa = self._rescaled(denom)
        xb = other._rescaled(denom)
        if len(xa) > len(xb):
            xa, xb = xb, xa
        trunc = self._mul_trunc(other)
        bound = _strict_int_bound(None if trunc is INF else trunc * denom)
        out: dict[int, object] = {}
        items_b = list(xb.items())
        for m1, c1 in xa.items():
            for m2, c2 in items_b:
                m = m1 + m2
                if bound is not None and m >= bound:
                    continue
                v = c1 * c2
                if m in out:
                    out[m] = out[m] + v
                else:
                    out[m] = v
        return QSeries(out, denom, trunc)

    __rmul__ = __mul__

    def shift(self, exponent: _EXPONENT) -> "QSeries":
        """Multiply by the exact monomial q^exponent (truncation shifts too)."""
        e = Fraction(exponent)
        denom = math.lcm(self.denom, e.denominator)
        off = e.numerator * (denom // e.denominator)
        coeffs = {m + off: c for m, c in self._rescaled(denom).items()}
        trunc = self.trunc if self.trunc is INF else self.trunc + e
        return QSeries(coeffs, denom, trunc)

    def truncate(self, trunc) -> "QSeries":
        t = min(self.trunc, Fraction(trunc) if isinstance(trunc, int) else trunc)
        return QSeries(self._coeffs, self.denom, t)

    def inverse(self) -> "QSeries":
        """Multiplicative inverse as a (Laurent) series.

        Requires a nonzero lowest-order coefficient that is invertible
        (any nonzero rational; cyclotomic units via their field inverse).
        If the series has order o and is exact below T, the inverse is exact
        below T - 2*o.
        """
        if not self._coeffs:
            raise QSeriesError("cannot invert: series is zero below its truncation")
        m0 = min(self._coeffs)
        c0 = self._coeffs[m0]
        if isinstance(c0, int):
            inv_c0 = c0 if c0 in (1, -1) else Fraction(1, c0)
        elif isinstance(c0, Fraction):
            inv_c0 = 1 / c0
        else:
            try:
                inv_c0 = c0.inverse()
            except AttributeError:  # pragma: no cover - exotic rings
                raise QSeriesError("leading coefficient is not invertible")
        denom = self.denom
        o = Fraction(m0, denom)
        if self.trunc is INF:
            # An exact polynomial still inverts to an honest infinite series;
            # pick a generous default window beyond the polynomial degree.
            raise QSeriesError("inverse of an untruncated series needs a finite trunc")
        t_unit = self.trunc - o
        size = _strict_int_bound(t_unit * denom)
        if size is None or size <= 0:
            return QSeries({}, 1, self.trunc - 2 * o)
        unit = {m - m0: c for m, c in self._coeffs.items()}
        inv = [0] * size
        inv[0] = inv_c0
        unit_items = [(m, c) for m, c in unit.items() if m != 0]
        for m, c in unit_items:
            if m < 0:
                raise QSeriesError("internal: unit part has negative exponents")
        for e in range(1, size):
            acc = 0
            for m, c in unit_items:
                if m > e:
                    continue
                v = inv[e - m]
                if not _is_zero(v):
                    acc = acc + c * v
            if not _is_zero(acc):
                inv[e] = -acc * inv_c0 if not isinstance(acc, (int, Fraction)) else _clean(-acc * inv_c0)
        out = {e - m0: c for e, c in enumerate(inv) if not _is_zero(c)}
        return QSeries(out, denom, self.trunc - 2 * o)

    def compose_power(self, c: _EXPONENT) -> "QSeries":
        """Substitute q -> q^c for a positive rational c (exponents scale by c)."""
        c = Fraction(c)
        if c <= 0:
            raise QSeriesError("compose_power requires a positive rational power")
        denom = self.denom * c.denominator
        coeffs = {m * c.numerator: v for m, v in self._coeffs.items()}
        trunc = self.trunc if self.trunc is INF else self.trunc * c
        return QSeries(coeffs, denom, trunc).normalized()

    def negate_variable(self) -> "QSeries":
        """Substitute q -> -q; defined only for integer-exponent series."""
        s = self.normalized()
        if s.denom != 1:
            raise QSeriesError("negate_variable requires integer exponents")
        return QSeries(
            {m: c if m % 2 == 0 else -c for m, c in s._coeffs.items()}, 1, s.trunc
        )

    def map_coefficients(self, fn: Callable) -> "QSeries":
        return QSeries({m: fn(c) for m, c in self._coeffs.items()}, self.denom, self.trunc)

    # ------------------------------------------------------------- comparison
    def first_mismatch(self, other: "QSeries", up_to=None) -> Fraction | None:
        """Lowest exponent below min(truncs, up_to) where coefficients differ."""
        window = min(self.trunc, other.trunc)
        if up_to is not None:
            window = min(window, Fraction(up_to) if isinstance(up_to, int) else up_to)
        denom = math.lcm(self.denom, other.denom)
        xa = self._rescaled(denom)
        xb = other._rescaled(denom)
        bound = _strict_int_bound(None if window is INF else window * denom)
        bad = None
        for m in set(xa) | set(xb):
            if bound is not None and m >= bound:
                continue
            if xa.get(m, 0) != xb.get(m, 0):
                if bad is None or m < bad:
                    bad = m
        return None if bad is None else Fraction(m := bad, denom)

    def agrees(self, other: "QSeries", up_to=None) -> bool:
        return self.first_mismatch(other, up_to) is None

    # ---------------------------------------------------------------- display
    def __repr__(self) -> str:  # pragma: no cover - cosmetic
        parts = []
        for e, c in list(self.terms())[:8]:
            parts.append(f"{c}*q^({e})" if e else f"{c}")
        body = " + ".join(parts) if parts else "0"
        if self.num_terms() > 8:
            body += " + ..."
        tail = "" if self.trunc is INF else f" + O(q^{self.trunc})"
        return f"QSeries({body}{tail})"


# ---------------------------------------------------------------------- utils

def dense_int_coeffs(series: QSeries, size: int) -> list:
    """Dense coefficient list for an integer-exponent, nonnegative-order series."""
    s = series.normalized()
    if s.denom != 1:
        raise QSeriesError("dense view requires integer exponents")
    out = [0] * size
    for m, c in s._coeffs.items():
        if m < 0:
            raise QSeriesError("dense view requires nonnegative exponents")
        if m < size:
            out[m] = c
    return out


def divide_one_minus_power(series: QSeries, s: int) -> QSeries:
    """Exact division by (1 - q^s) for integer s >= 1 (truncated ascending)."""
    if s < 1:
        raise QSeriesError("divisor exponent must be a positive integer")
    x = series.normalized()
    if x.denom != 1:
        raise QSeriesError("division helper requires integer exponents")
    if x.trunc is INF:
        raise QSeriesError("division by (1 - q^s) needs a finite trunc")
    size = _strict_int_bound(x.trunc)
    if size is None or size <= 0:
        return QSeries({}, 1, x.trunc)
    lo = x.min_order()
    if lo is not None and lo < 0:
        raise QSeriesError("division helper requires nonnegative order")
    out = [0] * size
    for m, c in x._coeffs.items():
        if 0 <= m < size:
            out[m] = c
    for e in range(s, size):
        prev = out[e - s]
        if not _is_zero(prev):
            out[e] = out[e] + prev
    return QSeries({e: c for e, c in enumerate(out) if not _is_zero(c)}, 1, x.trunc)


# ----------------------------------------------------------------- pochhammer

_POCH_NAMES = {
    "q": (1, Fraction(1), 1),        # (q; q)_n
    "q2": (1, Fraction(2), 2),       # (q^2; q^2)_n
    "-q": (-1, Fraction(1), 1),      # (-q; q)_n
    "-1": (-1, Fraction(0), 1),      # (-1; q)_n
    "q;q2": (1, Fraction(1), 2),     # (q; q^2)_n
    "q2;q": (1, Fraction(2), 1),     # (q^2; q)_n
}

_poch_cache: dict[tuple, QSeries] = {}


def pochhammer(kind, n: int, trunc) -> QSeries:
    """Finite q-Pochhammer product of n factors.

    ``kind`` is one of the named strings in ``_POCH_NAMES`` or an explicit
    triple ``(coeff, exponent, step)`` describing factors
    ``(1 - coeff * q^(exponent + step*i))`` for i = 0..n-1.  The named kinds
    cover (q;q)_n, (q^2;q^2)_n, (-q;q)_n, (-1;q)_n, (q;q^2)_n and (q^2;q)_n;
    monomial arguments +/- q^j use explicit triples.
    """
    if n < 0:
        raise QSeriesError("pochhammer length must be nonnegative")
    if isinstance(kind, str):
        try:
            spec = _POCH_NAMES[kind]
        except KeyError:
            raise QSeriesError(f"unknown pochhammer kind {kind!r}")
    else:
        coeff, exponent, step = kind
        spec = (coeff, Fraction(exponent), int(step))
        if spec[2] <= 0:
            raise QSeriesError("pochhammer step must be positive")
    t = Fraction(trunc) if isinstance(trunc, int) else trunc
    key = (spec, n, t)
    hit = _poch_cache.get(key)
    if hit is not None:
        return hit
    coeff, exponent, step = spec
    # Build incrementally so all prefixes land in the cache.
    base_key = (spec, 0, t)
    acc = _poch_cache.get(base_key)
    start = 0
    if acc is None:
        acc = QSeries.one(t)
        _poch_cache[base_key] = acc
    for i in range(n - 1, -1, -1):
        prev = _poch_cache.get((spec, i, t))
        if prev is not None:
            acc, start = prev, i
            break
    for i in range(start, n):
        factor_exp = exponent + step * i
        if t is not INF and factor_exp >= t:
            factor = QSeries.one(t)
        else:
            factor = QSeries.from_terms([(0, 1), (factor_exp, -coeff)], t)
        acc = acc * factor
        _poch_cache[(spec, i + 1, t)] = acc
    return acc


# ----------------------------------------------------------- gaussian binomial

_gauss_cache: dict[tuple[int, int], tuple] = {}


def gaussian_binomial(n: int, k: int, trunc=INF) -> QSeries:
    """Gaussian binomial coefficient [n choose k]_q as an exact polynomial.

    Zero whenever the pair (n, k) falls outside 0 <= k <= n (including
    negative top entries).  Computed by multiplying the k numerator factors
    (1 - q^(n-k+i)) and dividing synthetically by each (1 - q^i).
    """
    t = Fraction(trunc) if isinstance(trunc, int) else trunc
    if k < 0 or n < 0 or k > n:
        return QSeries.zero(t)
    k = min(k, n - k)
    key = (n, k)
    coeffs = _gauss_cache.get(key)
    if coeffs is None:
        deg = k * (n - k)
        arr = [0] * (deg + 1)
        arr[0] = 1
        top = 0
        for i in range(1, k + 1):
            s = n - k + i
            # multiply by (1 - q^s)
            top += s
            for e in range(min(top, deg), s - 1, -1):
                arr[e] -= arr[e - s]
            # divide by (1 - q^i)
            for e in range(i, deg + 1):
                arr[e] += arr[e - i]
        coeffs = tuple(arr)
        _gauss_cache[key] = coeffs
    return QSeries({e: c for e, c in enumerate(coeffs) if c}, 1, t)


# ------------------------------------------------------------- stabilized sum

def stabilized_sum(
    terms,
    trunc,
    n_bound: int = 600,
    tail_order: Callable[[int], _EXPONENT] | None = None,
    settle: int = 4,
) -> QSeries:
    """Averaged partial sums (S_{2N} + S_{2N+1})/2 of a term sequence.

    For alternating sequences whose raw partial sums oscillate forever in
    low-order coefficients, the even/odd average settles; this returns its
    common value once every coefficient below ``trunc`` has stopped moving.

    ``tail_order`` (optional) must be a certified lower bound: for every
    m >= N, the averaged increment A_m - A_{m-1} has q-order at least
    ``tail_order(N)``.  When supplied, the sum stops as soon as the bound
    clears ``trunc`` and every observed increment is checked against its
    promise (a violation is a hard error, since it would falsify the bound).
    Without it the engine settles observationally: ``settle`` consecutive
    increments must vanish identically below ``trunc`` before it stops, and
    exhausting ``n_bound`` terms raises :class:`StabilizationError` carrying
    the first unstable exponent.
    """
    t = Fraction(trunc) if isinstance(trunc, int) else trunc
    if callable(terms):
        term_at = terms
        limit = n_bound
    else:
        seq = list(terms)
        term_at = lambda i: seq[i]  # noqa: E731
        limit = min(n_bound, len(seq) - 1)
    if limit < 1:
        raise StabilizationError("need at least two terms to average")

    def trimmed(i: int) -> QSeries:
        return term_at(i).truncate(t)

    acc = trimmed(0) + trimmed(1).scale(Fraction(1, 2))
    streak = 0
    last_unstable: Fraction | None = None
    n_idx = 1
    while True:
        hi = 2 * n_idx + 1
        if hi > limit:
            if tail_order is not None:
                raise StabilizationError(
                    "term budget exhausted before the certified tail bound cleared trunc",
                    last_unstable,
                )
            raise StabilizationError(
                "no stabilization within the term budget", last_unstable
            )
        half = Fraction(1, 2)
        delta = (
            trimmed(hi - 2).scale(half)
            + trimmed(hi - 1)
            + trimmed(hi).scale(half)
        )
        acc = acc + delta
        o = delta.min_order()
        if tail_order is not None:
            promised = Fraction(tail_order(n_idx))
            if o is not None and o < promised:
                raise QSeriesError(
                    f"stabilized_sum: certified tail order {promised} violated at "
                    f"step {n_idx} (observed order {o})"
                )
            if Fraction(tail_order(n_idx + 1)) >= t:
                break
        else:
            if o is None or o >= t:
                streak += 1
                if streak >= settle:
                    break
            else:
                streak = 0
                last_unstable = o
        n_idx += 1
    return acc.truncate(t)


# -------------------------------------------------------------- serialization

def _rat_str(c) -> str:
    f = Fraction(c)
    return f"{f.numerator}/{f.denominator}"


def _rat_parse(s: str):
    if "/" in s:
        p, q = s.split("/")
        return _clean(Fraction(int(p), int(q)))
    return int(s)


def series_to_json_dict(series: QSeries) -> dict:
    """JSON form with exact rational coefficient strings.

    Only rational-coefficient series serialize; ``trunc`` = infinity is
    encoded as null numerator/denominator.
    """
    if not series.coefficients_are_rational():
        raise QSeriesError("JSON serialization requires rational coefficients")
    s = series.normalized()
    if s.trunc is INF:
        tn, td = None, None
    else:
        tn, td = s.trunc.numerator, s.trunc.denominator
    return {
        "denom": s.denom,
        "trunc_num": tn,
        "trunc_den": td,
        "terms": [[m, _rat_str(s._coeffs[m])] for m in sorted(s._coeffs)],
    }


def series_from_json_dict(data: dict) -> QSeries:
    if data.get("trunc_num") is None:
        trunc = INF
    else:
        trunc = Fraction(data["trunc_num"], data["trunc_den"])
    return QSeries(
        {int(m): _rat_parse(c) for m, c in data["terms"]}, int(data["denom"]), trunc
    )


def series_to_json(series: QSeries) -> str:
    return json.dumps(series_to_json_dict(series))


def series_from_json(text: str) -> QSeries:
    return series_from_json_dict(json.loads(text))


def series_to_csv_rows(series: QSeries) -> list[tuple[int, int, str]]:
    """Rows (exponent_num, exponent_den, coefficient) with reduced exponents."""
    if not series.coefficients_are_rational():
        raise QSeriesError("CSV serialization requires rational coefficients")
    rows = []
    for e, c in series.terms():
        rows.append((e.numerator, e.denominator, _rat_str(c)))
    return rows


def series_from_csv_rows(rows: Iterable[Sequence], trunc=INF) -> QSeries:
    terms = [(Fraction(int(r[0]), int(r[1])), _rat_parse(r[2])) for r in rows]
    return QSeries.from_terms(terms, trunc)


def clear_caches() -> None:
    _poch_cache.clear()
    _gauss_cache.clear()
