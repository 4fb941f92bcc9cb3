"""Exact zeta functions: power series, rational reconstruction, special values.

Everything here is exact; there is no floating point in this module.
Polynomials are tuples of :class:`~fractions.Fraction`, lowest degree first,
with trailing zeros trimmed.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, lcm
from typing import Iterable, Mapping, Sequence

from .errors import (
    InsufficientOrder,
    NonIntegralSeries,
    NotStabilized,
    ZeroFunction,
    ZeroInput,
)

Poly = tuple  # tuple[Fraction, ...]


def poly(coeffs: Iterable) -> Poly:
    out = [Fraction(c) for c in coeffs]
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


def poly_add(a: Poly, b: Poly) -> Poly:
    n = max(len(a), len(b))
    return poly((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n))


def poly_scale(a: Poly, c) -> Poly:
    return poly(x * c for x in a)


def poly_sub(a: Poly, b: Poly) -> Poly:
    return poly_add(a, poly_scale(b, -1))


def poly_mul(a: Poly, b: Poly) -> Poly:
    if not a or not b:
        return ()
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return poly(out)


def poly_divmod(a: Poly, b: Poly) -> tuple[Poly, Poly]:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(a)
    quot = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    for i in range(len(a) - len(b), -1, -1):
        c = a[i + len(b) - 1] / b[-1]
        quot[i] = c
        for j, y in enumerate(b):
            a[i + j] -= c * y
    return poly(quot), poly(a[: len(b) - 1])


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd over Q."""
    a, b = poly(a), poly(b)
    while b:
        a, b = b, poly_divmod(a, b)[1]
    return poly_scale(a, 1 / a[-1]) if a else ()


def poly_eval(a: Poly, t) -> Fraction:
    acc = Fraction(0)
    for c in reversed(a):
        acc = acc * t + c
    return acc


def poly_compose_power(a: Poly, e: int) -> Poly:
    """a(t^e)."""
    out = [Fraction(0)] * ((len(a) - 1) * e + 1 if a else 0)
    for i, c in enumerate(a):
        out[i * e] = c
    return poly(out)


def fmt_rational(x) -> str:
    """Serialise a rational as ``"num/den"`` in lowest terms, den > 0."""
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(s) -> Fraction:
    return Fraction(s) if not isinstance(s, str) else Fraction(s.strip())


# --- power series -----------------------------------------------------------

@dataclass(frozen=True)
class PowerSeriesQ:
    """c_0 + c_1 t + ... + c_m t^m + O(t^{m+1})."""

    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(Fraction(c) for c in self.coeffs))
        if not self.coeffs:
            raise ValueError("power series needs at least one coefficient")

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, i):
        return self.coeffs[i]

    def truncate(self, m: int) -> "PowerSeriesQ":
        return PowerSeriesQ(self.coeffs[: m + 1])

    def __mul__(self, other: "PowerSeriesQ") -> "PowerSeriesQ":
        m = min(self.order, other.order)
        a, b = self.coeffs, other.coeffs
        return PowerSeriesQ(tuple(sum(a[i] * b[n - i] for i in range(n + 1)) for n in range(m + 1)))

    def inverse(self) -> "PowerSeriesQ":
        a = self.coeffs
        if a[0] == 0:
            raise ZeroDivisionError("series with zero constant term is not invertible")
        out = [1 / a[0]]
        for n in range(1, len(a)):
            out.append(-sum(a[i] * out[n - i] for i in range(1, n + 1)) / a[0])
        return PowerSeriesQ(tuple(out))

    def __truediv__(self, other):
        return self * other.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = PowerSeriesQ((Fraction(1),) + (Fraction(0),) * self.order)
        for _ in range(k):
            out = out * self
        return out

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs)


def series_of(num: Poly, den: Poly, m: int) -> PowerSeriesQ:
    """Expansion of num/den to order m; den(0) must be nonzero."""
    pad = lambda a: tuple(a[: m + 1]) + (Fraction(0),) * max(0, m + 1 - len(a))  # noqa: E731
    return PowerSeriesQ(pad(num) or (Fraction(0),) * (m + 1)) / PowerSeriesQ(pad(den))


def zeta_series(counts: Sequence[int]) -> PowerSeriesQ:
    """Z(t) = exp(sum_n N_n t^n / n) to order len(counts).

    Uses n z_n = sum_{k=1}^n N_k z_{n-k}, which follows from Z'/Z = sum N_n t^{n-1}.
    """
    if not counts:
        raise ValueError("need at least one count")
    if any(c < 0 for c in counts):
        raise ValueError("point counts must be non-negative")
    z = [Fraction(1)]
    for n in range(1, len(counts) + 1):
        z.append(sum(counts[k - 1] * z[n - k] for k in range(1, n + 1)) / n)
    series = PowerSeriesQ(tuple(z))
    if not series.is_integral():
        bad = next(i for i, c in enumerate(z) if c.denominator != 1)
        raise NonIntegralSeries(f"coefficient {bad} of exp(sum N_n t^n/n) is {z[bad]}")
    return series


def euler_product_check(census: Mapping[int, int], m: int) -> PowerSeriesQ:
    """prod_d (1 - t^d)^(-a_d) expanded to order m."""
    out = [Fraction(0)] * (m + 1)
    out[0] = Fraction(1)
    for d, a in sorted(census.items()):
        if d > m or a == 0:
            continue
        # (1 - t^d)^(-a) = sum_j C(a + j - 1, j) t^{dj}
        factor = [0] * (m + 1)
        for j in range(m // d + 1):
            factor[d * j] = comb(a + j - 1, j)
        out = [sum(out[i] * factor[n - i] for i in range(n + 1)) for n in range(m + 1)]
    return PowerSeriesQ(tuple(out))


# --- rational functions -----------------------------------------------------

@dataclass(frozen=True)
class RationalFunctionQ:
    """num/den in lowest terms with den(0) = 1.

    This normalisation is unique, so ``==`` is exact equality of functions.
    For rational functions whose expansion has integer coefficients (every
    zeta function) both polynomials then have integer coefficients.
    """

    num: Poly
    den: Poly

    @classmethod
    def make(cls, num, den) -> "RationalFunctionQ":
        num, den = poly(num), poly(den)
        if not den:
            raise ZeroDivisionError("zero denominator")
        if not num:
            return cls((), (Fraction(1),))
        g = poly_gcd(num, den)
        if len(g) > 1:
            num, den = poly_divmod(num, g)[0], poly_divmod(den, g)[0]
        if den[0] == 0:
            raise ValueError("rational function has a pole at t = 0")
        c = den[0]
        return cls(poly_scale(num, 1 / c), poly_scale(den, 1 / c))

    @classmethod
    def one(cls):
        return cls.make((1,), (1,))

    def series(self, m: int) -> PowerSeriesQ:
        return series_of(self.num, self.den, m)

    def __mul__(self, other):
        return RationalFunctionQ.make(poly_mul(self.num, other.num), poly_mul(self.den, other.den))

    def __truediv__(self, other):
        if not other.num:
            raise ZeroDivisionError("division by the zero function")
        return RationalFunctionQ.make(poly_mul(self.num, other.den), poly_mul(self.den, other.num))

    def __pow__(self, k: int):
        if k < 0:
            return RationalFunctionQ.make(self.den, self.num) ** (-k)
        out = RationalFunctionQ.one()
        for _ in range(k):
            out = out * self
        return out

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.num + self.den)

    def to_json(self) -> dict:
        return {"num": [fmt_rational(c) for c in self.num], "den": [fmt_rational(c) for c in self.den]}

    @classmethod
    def from_json(cls, data) -> "RationalFunctionQ":
        return cls.make([parse_rational(c) for c in data["num"]], [parse_rational(c) for c in data["den"]])

    def __str__(self):
        def show(a):
            terms = []
            for i, c in enumerate(a):
                if c:
                    mono = "" if i == 0 else ("t" if i == 1 else f"t^{i}")
                    coef = str(c) if (mono == "" or c not in (1, -1)) else ("-" if c == -1 else "")
                    terms.append(f"{coef}{'*' if coef not in ('', '-') and mono else ''}{mono}")
            return " + ".join(terms).replace("+ -", "- ") or "0"
        return f"({show(self.num)}) / ({show(self.den)})"


def berlekamp_massey(seq: Sequence[Fraction]) -> tuple[Poly, int]:
    """Shortest connection polynomial C (C(0) = 1) and its length L over Q."""
    C, B = [Fraction(1)], [Fraction(1)]
    L, shift, b = 0, 1, Fraction(1)
    for n, s in enumerate(seq):
        d = s + sum(C[i] * seq[n - i] for i in range(1, min(L, len(C) - 1) + 1))
        if d == 0:
            shift += 1
            continue
        coef = d / b
        T = list(C)
        C = C + [Fraction(0)] * max(0, len(B) + shift - len(C))
        for i, x in enumerate(B):
            C[i + shift] -= coef * x
        if 2 * L <= n:
            L, B, b, shift = n + 1 - L, T, d, 1
        else:
            shift += 1
    return poly(C), L


def _solve(rows: list[list[Fraction]], rhs: list[Fraction], nvars: int):
    """A particular solution of rows @ x = rhs over Q, or None."""
    M = [list(r) + [b] for r, b in zip(rows, rhs)]
    pivots = []
    r = 0
    for c in range(nvars):
        piv = next((i for i in range(r, len(M)) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = 1 / M[r][c]
        M[r] = [x * inv for x in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [x - f * y for x, y in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
    if any(row[-1] != 0 for row in M[r:]):
        return None
    x = [Fraction(0)] * nvars
    for i, c in enumerate(pivots):
        x[c] = M[i][-1]
    return x


def pade(series: PowerSeriesQ, deg_num: int, deg_den: int) -> RationalFunctionQ | None:
    """Solve den * series = num + O(t^{m+1}) with the given degree bounds.

    Every coefficient of t^k, deg_num < k <= m, of den * series must vanish;
    returns None when no denominator with den(0) = 1 does that.
    """
    c = series.coeffs
    m = series.order
    rows, rhs = [], []
    for k in range(deg_num + 1, m + 1):
        # sum_{j=0}^{dd} den_j c_{k-j} = 0 with den_0 = 1
        rows.append([c[k - j] if k - j >= 0 else Fraction(0) for j in range(1, deg_den + 1)])
        rhs.append(-c[k])
    sol = _solve(rows, rhs, deg_den)
    if sol is None:
        return None
    den = (Fraction(1),) + tuple(sol)
    num = [sum(den[j] * c[k - j] for j in range(0, min(k, deg_den) + 1)) for k in range(deg_num + 1)]
    return RationalFunctionQ.make(num, den)


def reconstruct_rational(series: PowerSeriesQ, bound: tuple[int, int] | None = None,
                         guard: int = 2) -> RationalFunctionQ:
    """Rational function whose expansion matches ``series`` to full order.

    With ``bound = (deg_num, deg_den)`` a single Pade system is solved, needing
    order >= deg_num + deg_den + guard.  Without a bound the minimal linear
    recurrence (Berlekamp-Massey over Q) is used when at least ``guard``
    coefficients beyond the 2L that determine it confirm it; otherwise Pade
    systems with deg_num + deg_den <= order - guard are tried in order of
    increasing total degree.
    """
    if guard < 2:
        raise ValueError("guard must be at least 2")
    m = series.order
    if bound is not None:
        dn, dd = bound
        if m < dn + dd + guard:
            raise InsufficientOrder(f"order {m} cannot support bound {bound} with guard {guard}")
        result = pade(series, dn, dd)
        if result is None or result.series(m) != series:
            raise NotStabilized(f"no rational function of degrees {bound} fits")
        return result

    C, L = berlekamp_massey(series.coeffs)
    if 2 * L + guard <= m + 1:
        prod = poly_mul(C, series.coeffs)
        result = RationalFunctionQ.make(prod[:L], C)
        if result.series(m) == series:
            return result
    for total in range(0, m - guard + 1):
        for dd in range(total + 1):
            result = pade(series, total - dd, dd)
            if result is not None and result.series(m) == series:
                return result
    raise NotStabilized(f"no recurrence stable over {guard} extra coefficients in order {m}")


# --- special values -----------------------------------------------------------

@dataclass(frozen=True)
class LaurentData:
    """Z(t) = leading * (t - point)^order * (1 + O(t - point))."""

    point: Fraction
    order: int
    leading: Fraction

    @property
    def reciprocal_leading(self) -> Fraction:
        """Leading coefficient in the parameter (1 - t/point) instead of (t - point)."""
        return self.leading * (-self.point) ** self.order

    def to_json(self) -> dict:
        return {
            "point": fmt_rational(self.point),
            "order": self.order,
            "leading": fmt_rational(self.leading),
            "leading_in_1_minus_t_over_point": fmt_rational(self.reciprocal_leading),
        }


def _divide_out_root(a: Poly, t0: Fraction) -> tuple[Poly, int]:
    """Strip (t - t0) from a as often as it divides; return (rest, multiplicity)."""
    mult = 0
    while a:
        # synthetic division
        quot = [Fraction(0)] * (len(a) - 1)
        acc = Fraction(0)
        for i in range(len(a) - 1, 0, -1):
            acc = acc * t0 + a[i]
            quot[i - 1] = acc
        rem = acc * t0 + a[0]
        if rem != 0:
            break
        a = poly(quot)
        mult += 1
    return a, mult


def special_value(Z: RationalFunctionQ, q: int, r: int) -> LaurentData:
    """Leading Laurent coefficient of Z at t = q^(-r)."""
    if not Z.num:
        raise ZeroFunction("zeta function is identically zero")
    t0 = Fraction(q) ** (-r)
    num, a = _divide_out_root(Z.num, t0)
    den, b = _divide_out_root(Z.den, t0)
    return LaurentData(t0, a - b, poly_eval(num, t0) / poly_eval(den, t0))


def base_change(Z: RationalFunctionQ, e: int) -> RationalFunctionQ:
    """Z(t^e): the zeta function over F_q of a variety given over F_{q^e}."""
    if e < 1:
        raise ValueError("degree must be positive")
    return RationalFunctionQ.make(poly_compose_power(Z.num, e), poly_compose_power(Z.den, e))


def p_valuation(x, p: int) -> int:
    x = Fraction(x)
    if x == 0:
        raise ZeroInput("valuation of zero")
    v = 0
    n, d = abs(x.numerator), x.denominator
    while n % p == 0:
        n //= p
        v += 1
    while d % p == 0:
        d //= p
        v -= 1
    return v


def strip_sign_ppower(x, p: int) -> Fraction:
    """|x| with every factor of p removed."""
    x = Fraction(x)
    if x == 0:
        raise ZeroInput("cannot strip sign from zero")
    return abs(x) / Fraction(p) ** p_valuation(x, p)


def zeta_from_counts(counts: Sequence[int], bound=None, guard: int = 2) -> RationalFunctionQ:
    return reconstruct_rational(zeta_series(counts), bound=bound, guard=guard)


def integer_denominator(Z: RationalFunctionQ) -> int:
    """lcm of coefficient denominators (1 for zeta functions)."""
    return lcm(*(c.denominator for c in Z.num + Z.den))
