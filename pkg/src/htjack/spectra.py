"""Characteristic entire functions, their real roots, and Jacobi spectra.

Three families of symmetric tridiagonal (Jacobi) operators are built from
closed-form entry rules; their spectra coincide with the real zero sets of
companion entire functions assembled from hypergeometric series divided by
the gamma function.  The zeros interlace on a unit-gap grid, which is what
crystallizes the limit densities downstream.

Numerical strategy: the entire functions are summed in a pole-free form
(each term carries 1/Gamma(z+n) rather than a 1/Gamma(z) prefactor, so
nothing blows up near nonpositive-integer arguments); terms are accumulated
in sign/log-magnitude form to survive the factorial-scale dynamic range at
large negative z.  Roots are isolated by a sign-change scan (the unit-gap
interlacing guarantees at most one root per scan cell) and polished by
bisection.  Eigenvalues of truncations come from LAPACK's Sturm-sequence
bisection (`eigvalsh_tridiagonal` with index selection).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.linalg import eigvalsh_tridiagonal

from .errors import BracketError, ComputationError
from .exactseries import raising_factorial
from .rtransform import EnsembleSpec, Family

LOG_EPS = 60.0  # terms this far (in log) below the running max are negligible


def _sign(x: float) -> float:
    return math.copysign(1.0, x) if x != 0.0 else 0.0


def rgamma_signlog(x: float):
    """1/Gamma(x) as (sign, log magnitude); sign 0 at nonpositive integers."""
    if x > 0.5:
        return 1.0, -math.lgamma(x)
    if x == math.floor(x):
        return 0.0, -math.inf
    # reflection: 1/Gamma(x) = Gamma(1-x) sin(pi x) / pi, with the sine taken
    # on the reduced argument to keep accuracy near large negative x
    r = x - round(x)
    s = math.sin(math.pi * r)
    if round(x) % 2 != 0:
        s = -s
    return _sign(s), math.lgamma(1.0 - x) + math.log(abs(s)) - math.log(math.pi)


def rgamma(x: float) -> float:
    s, lg = rgamma_signlog(x)
    return s * math.exp(lg) if s != 0.0 else 0.0


# ---------------------------------------------------------------------------
# hypergeometric series
# ---------------------------------------------------------------------------


def _is_nonpositive_int(x: float) -> bool:
    return x <= 0 and x == math.floor(x)


def hyp1f1(a: float, b: float, x: float, max_terms: int = 10_000) -> float:
    """Confluent hypergeometric series, summed to stagnation."""
    if _is_nonpositive_int(b) and not (_is_nonpositive_int(a) and a > b):
        raise ValueError(f"series pole: b = {b} is a nonpositive integer")
    term = 1.0
    terms = [term]
    for n in range(max_terms):
        term *= (a + n) / (b + n) * x / (n + 1)
        if _is_nonpositive_int(a) and n >= -a:
            term = 0.0
        terms.append(term)
        if term == 0.0 or (n > abs(x) and abs(term) < 1e-18 * max(map(abs, terms))):
            break
    return math.fsum(terms)


def hyp2f1(a: float, b: float, c_arg: float, x: float, max_terms: int = 100_000) -> float:
    """Gauss hypergeometric series: terminating sums exactly, else |x| < 1."""
    terminating = _is_nonpositive_int(a) or _is_nonpositive_int(b)
    if terminating:
        n_stop = int(-(a if _is_nonpositive_int(a) else b))
        if _is_nonpositive_int(a) and _is_nonpositive_int(b):
            n_stop = int(min(-a, -b))
        if _is_nonpositive_int(c_arg) and -c_arg < n_stop:
            raise ValueError("series pole inside the terminating range")
        term, terms = 1.0, [1.0]
        for n in range(n_stop):
            term *= (a + n) * (b + n) / (c_arg + n) * x / (n + 1)
            terms.append(term)
        return math.fsum(terms)
    if _is_nonpositive_int(c_arg):
        raise ValueError(f"series pole: c = {c_arg} is a nonpositive integer")
    if abs(x) >= 1:
        raise ValueError("non-terminating series requires |x| < 1")
    term, terms = 1.0, [1.0]
    for n in range(max_terms):
        term *= (a + n) * (b + n) / (c_arg + n) * x / (n + 1)
        terms.append(term)
        if abs(term) < 1e-18 * max(map(abs, terms)) and n > 10:
            break
    return math.fsum(terms)


# ---------------------------------------------------------------------------
# characteristic entire functions (pole-free sums)
# ---------------------------------------------------------------------------


def _signlog_sum(parts) -> float:
    """Sum of sign/log terms, rescaled by the max log to avoid overflow."""
    finite = [(s, lg) for s, lg in parts if s != 0.0]
    if not finite:
        return 0.0
    top = max(lg for _, lg in finite)
    acc = math.fsum(s * math.exp(lg - top) for s, lg in finite)
    if top > 700.0:  # preserve the sign even if the true value overflows
        return math.copysign(math.inf, acc) if acc != 0.0 else 0.0
    return acc * math.exp(top)


def beta_charpoly_coeffs(gamma, c, M: int) -> list:
    """Exact monic coefficients (descending powers) of the degree-M polynomial.

    sum_{n=0}^{M} (-M)^{up n} gamma^{up n} c^n / n! * (z+n)(z+n+1)...(z+M-1).
    """
    gamma, c = Fraction(gamma), Fraction(c)
    coeffs = [Fraction(0)] * (M + 1)

    def add_poly(scale, roots_from, roots_to):
        # scale * prod_{j=roots_from}^{roots_to-1} (z + j), accumulated into coeffs
        poly = [scale]
        for j in range(roots_from, roots_to):
            poly = [Fraction(0)] + poly
            for i in range(len(poly) - 1):
                poly[i] += poly[i + 1] * j
        for i, v in enumerate(poly):  # poly[i] multiplies z^i
            coeffs[M - i] += v

    for n in range(M + 1):
        w = (
            raising_factorial(-M, n)
            * raising_factorial(gamma, n)
            * c**n
            / math.factorial(n)
        )
        if w != 0:
            add_poly(w, n, M)
    assert coeffs[0] == 1, "the polynomial must be monic"
    return coeffs


def char_fn(spec: EnsembleSpec, z: float) -> float:
    """Entire characteristic function of the family, evaluated at real z."""
    gamma = float(spec.gamma)
    if spec.family is Family.BETA:
        coeffs = [float(c) for c in beta_charpoly_coeffs(spec.gamma, spec.c, spec.M)]
        acc = 0.0
        for c in coeffs:
            acc = acc * z + c
        return acc

    parts = []
    if spec.family is Family.PLANCH:
        eta = float(spec.eta)
        # term_n = gamma^{up n} (-eta)^n / n! * 1/Gamma(z+n)
        sign_a, log_a = 1.0, 0.0
        n = 0
        best = -math.inf
        while True:
            sg, lg = rgamma_signlog(z + n)
            s, l = sign_a * sg, log_a + lg
            parts.append((s, l))
            if s != 0.0:
                best = max(best, l)
            done_region = z + n > 2.0
            if done_region and (s == 0.0 or l < best - LOG_EPS):
                break
            if n > abs(z) + 80 * (1 + eta) + 400:
                break
            sign_a *= -1.0
            log_a += math.log(gamma + n) + math.log(eta) - math.log(n + 1)
            n += 1
        return _signlog_sum(parts)

    # alpha family, first displayed form:
    # (1-c)^gamma * sum_n gamma^{up n} (z-eta)^{up n} c^n / n! * 1/Gamma(z+n)
    eta, c = float(spec.eta), float(spec.c)
    return _alpha_polefree(gamma, eta, c, z)


def _alpha_polefree(a_param: float, shift: float, c: float, z: float) -> float:
    """(1-c)^a * sum_n a^{up n} (z-shift)^{up n} c^n / n! / Gamma(z+n)."""
    log_pref = a_param * math.log1p(-c)
    sign_r, log_r = 1.0, 0.0  # running (z-shift)^{up n} * a^{up n} c^n / n!
    parts = []
    best = -math.inf
    n = 0
    while True:
        sg, lg = rgamma_signlog(z + n)
        s, l = sign_r * sg, log_r + lg + log_pref
        parts.append((s, l))
        if s != 0.0:
            best = max(best, l)
        if z + n > 2.0 and (l < best - LOG_EPS or sign_r == 0.0):
            break
        if n > abs(z) + 120.0 / max(1e-9, -math.log(c)) + 400:
            break
        f = z - shift + n
        if f == 0.0:
            sign_r = 0.0
        else:
            sign_r *= _sign(f)
            log_r += math.log(abs(f))
        log_r += math.log(a_param + n) + math.log(c) - math.log(n + 1)
        n += 1
    return _signlog_sum(parts)


def char_fn_alpha_alt(spec: EnsembleSpec, z: float) -> float:
    """Second displayed form of the alpha function (role of gamma and eta swapped)."""
    if spec.family is not Family.ALPHA:
        raise ValueError("only the alpha family has the swapped form")
    return _alpha_polefree(float(spec.eta), float(spec.gamma), float(spec.c), z)


# ---------------------------------------------------------------------------
# Jacobi operators
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class JacobiOperator:
    """Rule-generated symmetric tridiagonal operator for one family."""

    spec: EnsembleSpec
    finite_size: int | None = None

    def __post_init__(self):
        if self.spec.family is Family.BETA:
            object.__setattr__(self, "finite_size", self.spec.M)

    def diag(self, i: int) -> float:
        s = self.spec
        gamma = float(s.gamma)
        if s.family is Family.PLANCH:
            return 1.0 - float(s.eta) - i
        if s.family is Family.ALPHA:
            # constant term per the contiguous-relation derivation,
            # (1 - i(1+c) - c(gamma+eta))/(1-c); the eigenvalues then match
            # the zero set of the characteristic function (verified to 1e-12)
            c = float(s.c)
            return (1.0 - i * (1 + c) - c * (gamma + float(s.eta))) / (1 - c)
        c = float(s.c)
        return s.M * (c - 1) + c * (gamma + 1) + i * (1 - 2 * c)

    def offdiag(self, i: int) -> float:
        s = self.spec
        gamma = float(s.gamma)
        if s.family is Family.PLANCH:
            return -math.sqrt(float(s.eta) * (gamma + i))
        if s.family is Family.ALPHA:
            c = float(s.c)
            return math.sqrt((i + gamma) * (i + float(s.eta)) / c) * c / (1 - c)
        c = float(s.c)
        return math.sqrt(c * (1 - c) * i * (gamma + s.M - i))

    def truncation(self, size: int):
        """(diagonal, offdiagonal) arrays of the size x size leading submatrix."""
        if size < 1:
            raise ValueError("size must be >= 1")
        if self.finite_size is not None and size != self.finite_size:
            raise ValueError(f"this operator is exactly {self.finite_size} x {self.finite_size}")
        d = np.array([self.diag(i) for i in range(1, size + 1)])
        e = np.array([self.offdiag(i) for i in range(1, size)])
        return d, e


def truncated_eigs(op: JacobiOperator, size: int, count: int | None = None) -> np.ndarray:
    """Eigenvalues of the truncation, sorted decreasing (top `count` if given).

    LAPACK stebz: bisection on Sturm sequences with inertia-certified
    brackets, absolute tolerance at the 1e-12 * scale level.
    """
    d, e = op.truncation(size)
    if size == 1:
        return d.copy()
    if count is None or count >= size:
        w = eigvalsh_tridiagonal(d, e, select="i", select_range=(0, size - 1))
    else:
        w = eigvalsh_tridiagonal(d, e, select="i", select_range=(size - count, size - 1))
    return w[::-1].copy()


# ---------------------------------------------------------------------------
# root finding
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RootList:
    """Strictly decreasing real zeros, with the interlacing facts validated."""

    spec: EnsembleSpec
    roots: tuple
    tol: float
    asymptotics_conjectural: bool = False

    def __post_init__(self):
        self.validate()

    def validate(self):
        r = self.roots
        slack = 10 * self.tol
        for a, b in zip(r, r[1:]):
            if not a > b:
                raise ComputationError("roots are not strictly decreasing", {"roots": r})
            if a - b < 1 - slack:
                raise ComputationError(
                    f"unit-gap interlacing violated: {a} - {b} < 1", {"roots": r}
                )
        if r:
            # gamma bounds the leading root for all three families (the first
            # density interval [-gamma, -l_1] must not be inverted)
            bound = float(self.spec.gamma)
            if r[0] > bound + slack:
                raise ComputationError(
                    f"leading root {r[0]} exceeds the bound {bound}", {"roots": r}
                )


def _bisect(f, lo: float, hi: float, flo: float, fhi: float, tol: float) -> float:
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (flo < 0) != (fm < 0):
            hi, fhi = mid, fm
        else:
            lo, flo = mid, fm
    return 0.5 * (lo + hi)


def find_roots(spec: EnsembleSpec, count: int, tol: float = 1e-12) -> RootList:
    """The `count` largest real zeros of the family's characteristic function."""
    if count < 1:
        raise ValueError("count must be >= 1")
    if spec.family is Family.BETA:
        if count > spec.M:
            raise ValueError(f"the beta function has exactly M = {spec.M} roots")
        eigs = truncated_eigs(JacobiOperator(spec), spec.M)
        coeffs = [float(x) for x in beta_charpoly_coeffs(spec.gamma, spec.c, spec.M)]
        dcoeffs = [c * (spec.M - i) for i, c in enumerate(coeffs[:-1])]

        def horner(cs, z):
            acc = 0.0
            for c in cs:
                acc = acc * z + c
            return acc

        polished = []
        for r in eigs:
            z = float(r)
            for _ in range(3):  # Newton cleanup on the exact-coefficient polynomial
                dp = horner(dcoeffs, z)
                if dp == 0.0:
                    break
                step = horner(coeffs, z) / dp
                z -= step
                if abs(step) < abs(z) * 1e-15 + 1e-300:
                    break
            polished.append(z)
        return RootList(spec, tuple(polished[:count]), tol)

    f = lambda z: char_fn(spec, z)
    gamma = float(spec.gamma)
    # roots sit near the unit grid 1-k for both infinite families
    lo_end = 1.0 - count - 1.5
    hi_end = gamma + 1.0
    step = 0.25  # gaps >= 1 guarantee at most one root per cell
    brackets = []
    x0, f0 = hi_end, f(hi_end)
    trace = []
    x = hi_end
    while x > lo_end and len(brackets) < count:
        x1 = x - step
        f1 = f(x1)
        trace.append((x1, f1))
        if f1 == 0.0:
            brackets.append((x1, x1, 0.0, 0.0))
        elif (f0 < 0) != (f1 < 0):
            brackets.append((x1, x, f1, f0))
        x, f0 = x1, f1
    if len(brackets) < count:
        raise BracketError(
            f"found only {len(brackets)} sign changes for {count} requested roots",
            {"scan": trace[-20:], "family": spec.family.value},
        )
    roots = []
    for lo, hi, flo, fhi in brackets:
        roots.append(lo if lo == hi else _bisect(f, lo, hi, flo, fhi, tol))
    conjectural = spec.family is Family.ALPHA and spec.gamma != spec.eta
    return RootList(spec, tuple(roots), tol, asymptotics_conjectural=conjectural)


# ---------------------------------------------------------------------------
# spectrum vs roots
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AgreementReport:
    spec_json: dict
    count: int
    sizes: tuple
    deviations: tuple  # max |root_k - eig_k| over k < count, per size
    decay_ok: bool
    coefficient_rel_err: float | None = None  # beta only
    roots: tuple = ()
    notes: tuple = ()

    @property
    def final_deviation(self) -> float:
        return self.deviations[-1]

    def to_json(self) -> dict:
        out = {
            "spec": self.spec_json,
            "count": self.count,
            "sizes": list(self.sizes),
            "max_deviation": list(self.deviations),
            "decay_ok": self.decay_ok,
            "notes": list(self.notes),
        }
        if self.coefficient_rel_err is not None:
            out["charpoly_rel_err"] = self.coefficient_rel_err
        return out


NOISE_FLOOR = 1e-9  # deviations below this are rounding, not truncation, error


def spectrum_root_agreement(
    spec: EnsembleSpec, count: int, trunc_sizes=None, tol: float = 1e-12
) -> AgreementReport:
    """Compare bisected roots with truncated-operator eigenvalues."""
    op = JacobiOperator(spec)
    notes = []
    if spec.family is Family.BETA:
        rl = find_roots(spec, spec.M, tol)
        eigs = truncated_eigs(op, spec.M)
        dev = float(np.max(np.abs(np.array(rl.roots) - eigs)))
        exact = np.array([float(c) for c in beta_charpoly_coeffs(spec.gamma, spec.c, spec.M)])
        from_roots = np.poly(np.array(rl.roots))
        scale = np.maximum(np.abs(exact), 1.0)
        rel = float(np.max(np.abs(from_roots - exact) / scale))
        return AgreementReport(
            spec.to_json(), spec.M, (spec.M,), (dev,), True, rel, rl.roots, tuple(notes)
        )

    sizes = tuple(trunc_sizes or (500, 1000, 2000, 4000))
    rl = find_roots(spec, count, tol)
    target = np.array(rl.roots)
    devs = []
    for size in sizes:
        eigs = truncated_eigs(op, size, count=count)
        devs.append(float(np.max(np.abs(eigs[:count] - target))))
    decay_ok = all(
        b <= a or b < NOISE_FLOOR for a, b in zip(devs, devs[1:])
    )
    if not decay_ok:
        notes.append("deviation did not decrease along the truncation ladder")
    if rl.asymptotics_conjectural:
        notes.append("asymptotics-conjectural: alpha family with gamma != eta")
    return AgreementReport(
        spec.to_json(), count, sizes, tuple(devs), decay_ok, None, rl.roots, tuple(notes)
    )
