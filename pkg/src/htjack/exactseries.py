"""Exact truncated formal power series over the rationals.

Everything in this module is exact: coefficients are `fractions.Fraction`
and no operation ever rounds.  A series is tagged with the basis it is
expanded in:

* ``T_POWERS``     f(t) = sum_n a_n t^n / n!   (the stored coefficients are
  the exponential-generating a_n, *not* a_n/n!),
* ``Z_POWERS``     f(z) = sum_n b_n z^n,
* ``ZINV_POWERS``  f(z) = sum_n b_n z^-n,
* ``RAISING_INV``  f(z) = sum_n b_n / z^{up n}, where
  z^{up n} = z(z+1)...(z+n-1) is the raising factorial.

Storing exponential-generating coefficients makes the formal Laplace
transform sum_n a_n t^n/n!  ->  sum_n a_n z^{-n-1} a pure index shift.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial

ZERO = Fraction(0)
ONE = Fraction(1)

DEFAULT_ORDER = 12


class Basis(enum.Enum):
    T_POWERS = "t_powers"
    Z_POWERS = "z_powers"
    ZINV_POWERS = "zinv_powers"
    RAISING_INV = "raising_inv"


def raising_factorial(g, n: int) -> Fraction:
    """g^{up n} = g (g+1) ... (g+n-1), exactly."""
    g = Fraction(g)
    out = ONE
    for i in range(n):
        out *= g + i
    return out


def parse_rational(text) -> Fraction:
    """Parse 'p/q' or a decimal literal into an exact Fraction."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    return Fraction(str(text).strip())


def rational_str(q) -> str:
    """Serialize a rational as 'p/q', or 'p' when the denominator is 1."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class TruncatedSeries:
    """Truncated series: coefficients for indices 0..order in `basis`."""

    basis: Basis
    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(Fraction(c) for c in self.coeffs))
        if len(self.coeffs) == 0:
            raise ValueError("series needs at least the constant coefficient")

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def from_coeffs(cls, basis: Basis, coeffs, order: int | None = None) -> "TruncatedSeries":
        cs = [Fraction(c) for c in coeffs]
        if order is not None:
            cs = cs[: order + 1] + [ZERO] * max(0, order + 1 - len(cs))
        return cls(basis, tuple(cs))

    @classmethod
    def zero(cls, basis: Basis, order: int) -> "TruncatedSeries":
        return cls(basis, (ZERO,) * (order + 1))

    @classmethod
    def one(cls, basis: Basis, order: int) -> "TruncatedSeries":
        return cls(basis, (ONE,) + (ZERO,) * order)

    def coeff(self, n: int) -> Fraction:
        return self.coeffs[n] if 0 <= n <= self.order else ZERO

    def truncate(self, order: int) -> "TruncatedSeries":
        return TruncatedSeries.from_coeffs(self.basis, self.coeffs, order)

    def _check_same(self, other: "TruncatedSeries") -> int:
        if self.basis is not other.basis:
            raise ValueError(f"basis mismatch: {self.basis} vs {other.basis}")
        return min(self.order, other.order)

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        k = self._check_same(other)
        return TruncatedSeries(
            self.basis, tuple(self.coeffs[n] + other.coeffs[n] for n in range(k + 1))
        )

    def __sub__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        k = self._check_same(other)
        return TruncatedSeries(
            self.basis, tuple(self.coeffs[n] - other.coeffs[n] for n in range(k + 1))
        )

    def __neg__(self) -> "TruncatedSeries":
        return TruncatedSeries(self.basis, tuple(-c for c in self.coeffs))

    def scale(self, r) -> "TruncatedSeries":
        r = Fraction(r)
        return TruncatedSeries(self.basis, tuple(r * c for c in self.coeffs))

    def __mul__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        k = self._check_same(other)
        if self.basis is Basis.RAISING_INV:
            raise ValueError("no direct multiplication in the inverse raising-factorial basis")
        if self.basis is Basis.T_POWERS:
            # exponential-generating coefficients multiply by binomial convolution
            cs = [
                sum(comb(n, j) * self.coeffs[j] * other.coeffs[n - j] for j in range(n + 1))
                for n in range(k + 1)
            ]
        else:
            cs = [
                sum(self.coeffs[j] * other.coeffs[n - j] for j in range(n + 1))
                for n in range(k + 1)
            ]
        return TruncatedSeries(self.basis, tuple(cs))

    # -- ordinary-coefficient view (used internally by exp/log/div) --------

    def ordinary(self) -> list:
        if self.basis is Basis.T_POWERS:
            return [c / factorial(n) for n, c in enumerate(self.coeffs)]
        return list(self.coeffs)

    @classmethod
    def from_ordinary(cls, basis: Basis, ordinary) -> "TruncatedSeries":
        if basis is Basis.T_POWERS:
            return cls(basis, tuple(c * factorial(n) for n, c in enumerate(ordinary)))
        return cls(basis, tuple(ordinary))

    def to_json(self) -> dict:
        return {
            "basis": self.basis.value,
            "order": self.order,
            "coeffs": [rational_str(c) for c in self.coeffs],
        }

    @classmethod
    def from_json(cls, data) -> "TruncatedSeries":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(Basis(data["basis"]), tuple(parse_rational(c) for c in data["coeffs"]))


# ---------------------------------------------------------------------------
# exp / log / division
# ---------------------------------------------------------------------------


def _exp_ordinary(f: list) -> list:
    # g = exp(f), f_0 = 0:  n g_n = sum_{k=1}^n k f_k g_{n-k}
    n = len(f) - 1
    g = [ONE] + [ZERO] * n
    for m in range(1, n + 1):
        g[m] = sum((k * f[k] * g[m - k] for k in range(1, m + 1)), ZERO) / m
    return g


def _log_ordinary(g: list) -> list:
    # f = log(g), g_0 = 1:  f_n = g_n - (1/n) sum_{k=1}^{n-1} k f_k g_{n-k}
    n = len(g) - 1
    f = [ZERO] * (n + 1)
    for m in range(1, n + 1):
        f[m] = g[m] - sum((k * f[k] * g[m - k] for k in range(1, m)), ZERO) / m
    return f


def _div_ordinary(num: list, den: list) -> list:
    if den[0] == 0:
        raise ValueError("division requires a unit constant term")
    n = min(len(num), len(den)) - 1
    q = [ZERO] * (n + 1)
    for m in range(n + 1):
        q[m] = (num[m] - sum((den[k] * q[m - k] for k in range(1, m + 1)), ZERO)) / den[0]
    return q


def series_exp(s: TruncatedSeries) -> TruncatedSeries:
    """exp of a series with vanishing constant coefficient (T or Z or ZINV)."""
    if s.basis is Basis.RAISING_INV:
        raise ValueError("exp is not defined in the inverse raising-factorial basis")
    if s.coeff(0) != 0:
        raise ValueError("series_exp requires a vanishing constant coefficient")
    return TruncatedSeries.from_ordinary(s.basis, _exp_ordinary(s.ordinary()))


def series_log(s: TruncatedSeries) -> TruncatedSeries:
    """log of a series with constant coefficient 1; inverse of series_exp."""
    if s.basis is Basis.RAISING_INV:
        raise ValueError("log is not defined in the inverse raising-factorial basis")
    if s.coeff(0) != 1:
        raise ValueError("series_log requires constant coefficient 1")
    return TruncatedSeries.from_ordinary(s.basis, _log_ordinary(s.ordinary()))


def series_div(num: TruncatedSeries, den: TruncatedSeries) -> TruncatedSeries:
    """num/den for a divisor with nonzero constant term (same basis)."""
    k = num._check_same(den)
    return TruncatedSeries.from_ordinary(
        num.basis, _div_ordinary(num.truncate(k).ordinary(), den.truncate(k).ordinary())
    )


def shifted_divide(num: TruncatedSeries, den: TruncatedSeries) -> TruncatedSeries:
    """num/den where den vanishes at the origin to some order v.

    Cancels the common power t^v first (num must vanish at least to the same
    order), then divides.  The result has truncation order reduced by v.
    """
    k = num._check_same(den)
    nc, dc = num.truncate(k).ordinary(), den.truncate(k).ordinary()
    v = next((i for i, c in enumerate(dc) if c != 0), None)
    if v is None:
        raise ZeroDivisionError("division by the zero series")
    if any(c != 0 for c in nc[:v]):
        raise ValueError(f"numerator must vanish to order {v} for the shifted divide")
    return TruncatedSeries.from_ordinary(num.basis, _div_ordinary(nc[v:], dc[v:]))


# ---------------------------------------------------------------------------
# formal Laplace transform and friends
# ---------------------------------------------------------------------------


def formal_laplace(f: TruncatedSeries) -> TruncatedSeries:
    """sum a_n t^n/n!  ->  sum a_n z^{-n-1}; raises the order by one."""
    if f.basis is not Basis.T_POWERS:
        raise ValueError("formal_laplace acts on T_POWERS series")
    return TruncatedSeries(Basis.ZINV_POWERS, (ZERO,) + f.coeffs)


def formal_laplace_inv(g: TruncatedSeries) -> TruncatedSeries:
    """Inverse of formal_laplace; input must have no z^0 coefficient."""
    if g.basis is not Basis.ZINV_POWERS:
        raise ValueError("formal_laplace_inv acts on ZINV_POWERS series")
    if g.coeff(0) != 0:
        raise ValueError("formal_laplace_inv requires a vanishing constant coefficient")
    if g.order < 1:
        raise ValueError("series too short to invert")
    return TruncatedSeries(Basis.T_POWERS, g.coeffs[1:])


_BERNOULLI_CACHE = [ONE]


def bernoulli(n: int) -> Fraction:
    """Bernoulli number B_n (convention B_1 = -1/2), exactly."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    while len(_BERNOULLI_CACHE) <= n:
        m = len(_BERNOULLI_CACHE)
        s = sum(comb(m + 1, j) * _BERNOULLI_CACHE[j] for j in range(m))
        _BERNOULLI_CACHE.append(-s / Fraction(m + 1))
    return _BERNOULLI_CACHE[n]


def bernoulli_kernel(order: int) -> TruncatedSeries:
    """t/(1 - e^{-t}) = sum_m (-1)^m B_m t^m / m!  as a T_POWERS series."""
    return TruncatedSeries(
        Basis.T_POWERS, tuple((-1) ** m * bernoulli(m) for m in range(order + 1))
    )


def exp_series(rate, order: int) -> TruncatedSeries:
    """e^{rate*t} as a T_POWERS series (a_n = rate^n)."""
    rate = Fraction(rate)
    return TruncatedSeries(Basis.T_POWERS, tuple(rate**n for n in range(order + 1)))


# ---------------------------------------------------------------------------
# basis conversions
# ---------------------------------------------------------------------------


def _raising_inv_expansion(n: int, order: int) -> list:
    """Coefficients of 1/z^{up n} as a series in z^{-1}, up to z^{-order}."""
    # 1/z^{up n} = z^{-n} * prod_{i=1}^{n-1} (1 + i/z)^{-1}
    out = [ZERO] * (order + 1)
    if n > order:
        return out
    cur = [ONE] + [ZERO] * (order - n)  # series in u = 1/z, truncated
    for i in range(1, n):
        # multiply by (1 + i u)^{-1} = sum_j (-i)^j u^j
        nxt = [ZERO] * len(cur)
        for j in range(len(cur)):
            acc = ZERO
            p = ONE
            for m in range(j, -1, -1):
                acc += cur[m] * p
                p *= -i
            nxt[j] = acc
        cur = nxt
    for j, c in enumerate(cur):
        out[n + j] = c
    return out


def raising_inv_to_zinv(s: TruncatedSeries, order: int | None = None) -> TruncatedSeries:
    """Re-expand sum b_n / z^{up n} as a series in z^{-1}."""
    if s.basis is not Basis.RAISING_INV:
        raise ValueError("expected a RAISING_INV series")
    if order is None:
        order = s.order
    out = [ZERO] * (order + 1)
    out[0] = s.coeff(0)
    for n in range(1, min(s.order, order) + 1):
        b = s.coeff(n)
        if b == 0:
            continue
        for j, c in enumerate(_raising_inv_expansion(n, order)):
            out[j] += b * c
    return TruncatedSeries(Basis.ZINV_POWERS, tuple(out))


def zinv_to_raising_inv(s: TruncatedSeries) -> TruncatedSeries:
    """Inverse conversion, by triangular elimination (1/z^{up n} = z^{-n} + higher)."""
    if s.basis is not Basis.ZINV_POWERS:
        raise ValueError("expected a ZINV_POWERS series")
    order = s.order
    residual = list(s.coeffs)
    out = [ZERO] * (order + 1)
    out[0] = residual[0]
    residual[0] = ZERO
    for n in range(1, order + 1):
        b = residual[n]
        out[n] = b
        if b == 0:
            continue
        for j, c in enumerate(_raising_inv_expansion(n, order)):
            residual[j] -= b * c
    if any(residual):
        raise AssertionError("triangular elimination left a nonzero residual")
    return TruncatedSeries(Basis.RAISING_INV, tuple(out))


def zinv_shift(s: TruncatedSeries, x) -> TruncatedSeries:
    """Re-expand f(z + x) for a series f in z^{-1}, truncated at the same order.

    Uses (z+x)^{-n} = sum_j binom(n+j-1, j) (-x)^j z^{-n-j}.
    """
    if s.basis is not Basis.ZINV_POWERS:
        raise ValueError("expected a ZINV_POWERS series")
    x = Fraction(x)
    order = s.order
    out = [ZERO] * (order + 1)
    out[0] = s.coeff(0)
    for n in range(1, order + 1):
        a = s.coeff(n)
        if a == 0:
            continue
        p = ONE
        for j in range(order - n + 1):
            out[n + j] += a * comb(n + j - 1, j) * p
            p *= -x
    return TruncatedSeries(Basis.ZINV_POWERS, tuple(out))
