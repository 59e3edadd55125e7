"""Functional-equation route between cumulants and moments.

Two formal identities tie the cumulant sequence (kappa_n), an auxiliary
sequence (c_n), and the moment sequence (m_n) together:

    exp(sum kappa_n z^n / n) = 1 + sum c_n z^n / gamma^{up n}

and, writing A(z) = 1 + sum (-1)^n c_n / z^{up n} and M(s) = 1 + sum m_n
s^n/n! for the moment generating function,

    log A(z) = Laplace{ (gamma M(-t) - (e^{gamma t}-1)/t) / (1 - e^{-t}) }(z).

The second identity is implemented twice: the compact logarithmic form above
(production route, one shifted series division), and the verbatim form whose
kernel is the Bernoulli generating function t/(1-e^{-t}) (cross-check route).
Both are exact in rational arithmetic and must agree coefficient by
coefficient.

Everything here is an exact computation; the Lukasiewicz-path formula in
`cumulants` is the independent ground-truth oracle for the same map.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from .cumulants import CumulantVector, MomentVector, moments_from_cumulants
from .exactseries import (
    Basis,
    TruncatedSeries,
    bernoulli_kernel,
    exp_series,
    formal_laplace,
    formal_laplace_inv,
    raising_factorial,
    raising_inv_to_zinv,
    rational_str,
    series_div,
    series_exp,
    series_log,
    shifted_divide,
    zinv_to_raising_inv,
)

ZERO = Fraction(0)
ONE = Fraction(1)


class Family(enum.Enum):
    PLANCH = "planch"
    ALPHA = "alpha"
    BETA = "beta"


@dataclass(frozen=True)
class EnsembleSpec:
    """Family tag plus the exact parameters that define a pure Jack limit."""

    family: Family
    gamma: Fraction
    eta: Fraction | None = None  # planch, alpha
    c: Fraction | None = None  # alpha, beta
    M: int | None = None  # beta

    def __post_init__(self):
        object.__setattr__(self, "gamma", Fraction(self.gamma))
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")
        if self.eta is not None:
            object.__setattr__(self, "eta", Fraction(self.eta))
        if self.c is not None:
            object.__setattr__(self, "c", Fraction(self.c))
        if self.family is Family.PLANCH:
            self._need(eta=True, c=False, M=False)
            if self.eta <= 0:
                raise ValueError("eta must be positive")
        elif self.family is Family.ALPHA:
            self._need(eta=True, c=True, M=False)
            if self.eta <= 0:
                raise ValueError("eta must be positive")
            if not 0 < self.c < 1:
                raise ValueError("c must lie in (0, 1)")
        else:
            self._need(eta=False, c=True, M=True)
            if not 0 < self.c < 1:
                raise ValueError("c must lie in (0, 1)")
            if self.M < 1:
                raise ValueError("M must be a positive integer")

    def _need(self, eta, c, M):
        for name, wanted in (("eta", eta), ("c", c), ("M", M)):
            present = getattr(self, name) is not None
            if present and not wanted:
                raise ValueError(f"{name} is not a parameter of the {self.family.value} family")
            if wanted and not present:
                raise ValueError(f"the {self.family.value} family requires {name}")

    def label(self) -> str:
        parts = [f"gamma={rational_str(self.gamma)}"]
        if self.eta is not None:
            parts.append(f"eta={rational_str(self.eta)}")
        if self.c is not None:
            parts.append(f"c={rational_str(self.c)}")
        if self.M is not None:
            parts.append(f"M={self.M}")
        return f"{self.family.value}({', '.join(parts)})"

    def to_json(self) -> dict:
        out = {"family": self.family.value, "gamma": rational_str(self.gamma)}
        if self.eta is not None:
            out["eta"] = rational_str(self.eta)
        if self.c is not None:
            out["c"] = rational_str(self.c)
        if self.M is not None:
            out["M"] = self.M
        return out


@dataclass(frozen=True)
class CSequence:
    c: tuple

    def __post_init__(self):
        object.__setattr__(self, "c", tuple(Fraction(x) for x in self.c))


def family_cumulants(spec: EnsembleSpec, n_max: int) -> CumulantVector:
    """Closed-form cumulants of the three pure Jack limits."""
    if spec.family is Family.PLANCH:
        kappa = (spec.eta,) + (ZERO,) * (n_max - 1)
    elif spec.family is Family.ALPHA:
        r = spec.c / (1 - spec.c)
        kappa = tuple(spec.eta * r**n for n in range(1, n_max + 1))
    else:
        kappa = tuple((-1) ** (n - 1) * spec.M * spec.c**n for n in range(1, n_max + 1))
    return CumulantVector(spec.gamma, kappa)


def kappa_to_c(kv: CumulantVector, K: int) -> CSequence:
    """c_n = gamma^{up n} [z^n] exp(sum kappa_k z^k / k)."""
    if len(kv.kappa) < K:
        raise ValueError("kappa list shorter than K")
    f = TruncatedSeries(
        Basis.Z_POWERS, (ZERO,) + tuple(kv.kappa[k - 1] / k for k in range(1, K + 1))
    )
    e = series_exp(f)
    return CSequence(tuple(raising_factorial(kv.gamma, n) * e.coeff(n) for n in range(1, K + 1)))


def c_to_kappa(cs: CSequence, gamma, K: int | None = None) -> CumulantVector:
    """Exact inverse of kappa_to_c: kappa_n = n [z^n] log(1 + sum c_k z^k/gamma^{up k})."""
    gamma = Fraction(gamma)
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    if K is None:
        K = len(cs.c)
    e = TruncatedSeries(
        Basis.Z_POWERS,
        (ONE,) + tuple(cs.c[n - 1] / raising_factorial(gamma, n) for n in range(1, K + 1)),
    )
    lg = series_log(e)
    return CumulantVector(gamma, tuple(n * lg.coeff(n) for n in range(1, K + 1)))


def _alternating_raising_series(cs: CSequence, K: int) -> TruncatedSeries:
    """A = 1 + sum (-1)^n c_n / z^{up n}, in the inverse raising-factorial basis."""
    coeffs = [ONE] + [ZERO] * K
    for n in range(1, min(K, len(cs.c)) + 1):
        coeffs[n] = (-1) ** n * cs.c[n - 1]
    return TruncatedSeries(Basis.RAISING_INV, tuple(coeffs))


def _egf_exp_minus_one_over_t(rate, order: int) -> TruncatedSeries:
    """(e^{rate t} - 1)/t as a T_POWERS series of the given truncation order."""
    num = exp_series(rate, order + 1) - TruncatedSeries.one(Basis.T_POWERS, order + 1)
    t = TruncatedSeries(Basis.T_POWERS, (ZERO, ONE) + (ZERO,) * order)
    return shifted_divide(num, t)


def c_to_m(cs: CSequence, gamma, lmax: int) -> MomentVector:
    """Moments from the c-sequence via the compact logarithmic form."""
    gamma = Fraction(gamma)
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    zorder = lmax + 1
    a = raising_inv_to_zinv(_alternating_raising_series(cs, lmax), order=zorder)
    g = formal_laplace_inv(series_log(a))  # order lmax
    one_minus_emt = TruncatedSeries.one(Basis.T_POWERS, lmax) - exp_series(-1, lmax)
    rhs = _egf_exp_minus_one_over_t(gamma, lmax) + g * one_minus_emt
    m_of_minus_t = rhs.scale(ONE / gamma)  # gamma M(-t) = (e^{gamma t}-1)/t + g (1-e^{-t})
    assert m_of_minus_t.coeff(0) == 1
    return MomentVector(tuple((-1) ** n * m_of_minus_t.coeff(n) for n in range(1, lmax + 1)))


def c_to_m_bernoulli(cs: CSequence, gamma, lmax: int) -> MomentVector:
    """Moments via the verbatim Bernoulli-kernel encoding (cross-check route).

    log A = gamma * Laplace{ t/(1-e^{-t}) * S(t) }(z) with
    S(t) = sum_{n>=1} ((-1)^n m_n/n! - gamma^n/(n+1)!) t^{n-1}.
    """
    gamma = Fraction(gamma)
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    zorder = lmax + 1
    a = raising_inv_to_zinv(_alternating_raising_series(cs, lmax), order=zorder)
    g = formal_laplace_inv(series_log(a))  # = gamma * kernel * S, order lmax
    s = series_div(g.scale(ONE / gamma), bernoulli_kernel(lmax))
    s_ord = s.ordinary()
    m = []
    for n in range(1, lmax + 1):
        m.append((-1) ** n * factorial(n) * (s_ord[n - 1] + gamma**n / factorial(n + 1)))
    return MomentVector(tuple(m))


def m_to_c(mv: MomentVector, gamma, K: int | None = None) -> CSequence:
    """Exact inverse of c_to_m (triangular solve at series level)."""
    gamma = Fraction(gamma)
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    if K is None:
        K = len(mv.m)
    if len(mv.m) < K:
        raise ValueError("moment list shorter than K")
    m_of_minus_t = TruncatedSeries(
        Basis.T_POWERS, (ONE,) + tuple((-1) ** n * mv.m[n - 1] for n in range(1, K + 1))
    )
    h = m_of_minus_t.scale(gamma) - _egf_exp_minus_one_over_t(gamma, K)
    if h.coeff(0) != 0:
        raise AssertionError("gamma M(0) - gamma must vanish")
    one_minus_emt = TruncatedSeries.one(Basis.T_POWERS, K) - exp_series(-1, K)
    g = shifted_divide(h, one_minus_emt)  # order K-1
    a = series_exp(formal_laplace(g))  # ZINV, order K
    b = zinv_to_raising_inv(a)
    return CSequence(tuple((-1) ** n * b.coeff(n) for n in range(1, K + 1)))


def moments_via_transform(kv: CumulantVector, lmax: int) -> MomentVector:
    return c_to_m(kappa_to_c(kv, lmax), kv.gamma, lmax)


@dataclass(frozen=True)
class EquivalenceRow:
    ell: int
    paths: Fraction
    transform: Fraction

    @property
    def equal(self) -> bool:
        return self.paths == self.transform


@dataclass(frozen=True)
class EquivalenceReport:
    gamma: Fraction
    lmax: int
    rows: tuple

    @property
    def ok(self) -> bool:
        return all(r.equal for r in self.rows)

    def first_mismatch(self) -> EquivalenceRow | None:
        return next((r for r in self.rows if not r.equal), None)

    def to_json(self) -> dict:
        return {
            "gamma": rational_str(self.gamma),
            "lmax": self.lmax,
            "ok": self.ok,
            "results": [
                {
                    "ell": r.ell,
                    "paths": rational_str(r.paths),
                    "transform": rational_str(r.transform),
                    "equal": r.equal,
                }
                for r in self.rows
            ],
        }


def equivalence_check(kv: CumulantVector, lmax: int) -> EquivalenceReport:
    """Exact comparison of the path-formula and functional-equation moments."""
    mp = moments_from_cumulants(kv, lmax)
    mt = moments_via_transform(kv, lmax)
    rows = tuple(
        EquivalenceRow(ell, mp.m[ell - 1], mt.m[ell - 1]) for ell in range(1, lmax + 1)
    )
    return EquivalenceReport(kv.gamma, lmax, rows)
