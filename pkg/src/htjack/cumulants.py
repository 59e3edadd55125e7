"""Lukasiewicz-path moment formula and its triangular inversion.

A Lukasiewicz path of length ``l`` takes unit horizontal steps with vertical
displacements in {-1, 0, 1, 2, ...}, starts and ends at height 0, and never
dips below the axis.  The moment of order ``l`` of the high-temperature limit
measure is a weighted sum over all such paths: horizontal steps at positive
height i carry (kappa_1 + i), up-steps of size j carry (kappa_j +
kappa_{j+1}), down-steps leaving height j carry (j + gamma), and the
horizontal steps at height 0 contribute through the divided difference
(f(x) - f(x - gamma))/gamma of a pure power, evaluated at kappa_1.

The map kappa -> m is triangular: the only length-l path touching kappa_l is
the single maximal up-step path, with weight (kappa_{l-1} + kappa_l) *
(gamma+1)^{up (l-1)}, which is what makes the exact inversion below possible.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import ResourceLimitError
from .exactseries import raising_factorial

MAX_PATH_LENGTH = 14  # C_14 ~ 2.7M paths; longer moments go through the transform


@dataclass(frozen=True)
class LukasiewiczPath:
    """Step displacements; -1 down, 0 horizontal, j >= 1 up by j."""

    steps: tuple

    def __post_init__(self):
        h = 0
        for s in self.steps:
            if s < -1:
                raise ValueError("displacements must be >= -1")
            h += s
            if h < 0:
                raise ValueError("path dips below the axis")
        if h != 0:
            raise ValueError("path must end at height 0")

    def __len__(self):
        return len(self.steps)

    def stats(self) -> "PathStats":
        horiz0 = 0
        horiz_up = {}
        ups = {}
        downs = {}
        h = 0
        for s in self.steps:
            if s == 0:
                if h == 0:
                    horiz0 += 1
                else:
                    horiz_up[h] = horiz_up.get(h, 0) + 1
            elif s == -1:
                downs[h] = downs.get(h, 0) + 1
            else:
                ups[s] = ups.get(s, 0) + 1
            h += s
        return PathStats(
            horiz_at_zero=horiz0,
            horiz_above=tuple(sorted(horiz_up.items())),
            up_sizes=tuple(sorted(ups.items())),
            down_from=tuple(sorted(downs.items())),
        )


@dataclass(frozen=True)
class PathStats:
    """Step counts sufficient to evaluate a path weight."""

    horiz_at_zero: int
    horiz_above: tuple  # ((height, count), ...)
    up_sizes: tuple  # ((size, count), ...)
    down_from: tuple  # ((height, count), ...)

    @property
    def max_up(self) -> int:
        return self.up_sizes[-1][0] if self.up_sizes else 0


@dataclass(frozen=True)
class CumulantVector:
    gamma: Fraction
    kappa: tuple

    def __post_init__(self):
        object.__setattr__(self, "gamma", Fraction(self.gamma))
        object.__setattr__(self, "kappa", tuple(Fraction(k) for k in self.kappa))
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")

    def padded(self, n: int) -> tuple:
        return self.kappa + (Fraction(0),) * max(0, n - len(self.kappa))


@dataclass(frozen=True)
class MomentVector:
    m: tuple  # m_1..m_L; m_0 is implicitly 1

    def __post_init__(self):
        object.__setattr__(self, "m", tuple(Fraction(x) for x in self.m))


_PATH_CACHE: dict = {}
_STATS_CACHE: dict = {}


def iter_paths(length: int, max_length: int = MAX_PATH_LENGTH):
    """Yield every Lukasiewicz path of the given length as a step tuple."""
    if length < 1:
        raise ValueError("length must be >= 1")
    if length > max_length:
        raise ResourceLimitError(
            f"path enumeration capped at length {max_length} (requested {length})"
        )

    def extend(prefix, height, remaining):
        if remaining == 0:
            if height == 0:
                yield tuple(prefix)
            return
        # the path must be able to return to 0: height <= remaining after the step
        lo = -1 if height > 0 else 0
        for s in range(lo, remaining - height):
            prefix.append(s)
            yield from extend(prefix, height + s, remaining - 1)
            prefix.pop()

    yield from extend([], 0, length)


def enumerate_paths(length: int, max_length: int = MAX_PATH_LENGTH) -> list:
    """All Lukasiewicz paths of the given length, as step tuples."""
    if length not in _PATH_CACHE:
        _PATH_CACHE[length] = list(iter_paths(length, max_length))
    return _PATH_CACHE[length]


def _stats_key(steps) -> tuple:
    h0 = 0
    hu: dict = {}
    up: dict = {}
    dn: dict = {}
    h = 0
    for s in steps:
        if s == 0:
            if h:
                hu[h] = hu.get(h, 0) + 1
            else:
                h0 += 1
        elif s == -1:
            dn[h] = dn.get(h, 0) + 1
        else:
            up[s] = up.get(s, 0) + 1
        h += s
    return (h0, tuple(sorted(hu.items())), tuple(sorted(up.items())), tuple(sorted(dn.items())))


def path_stats(length: int, max_length: int = MAX_PATH_LENGTH) -> list:
    """Deduplicated (PathStats, multiplicity) pairs over all paths of a length.

    Many paths share step statistics, and the weight depends only on those,
    so the moment sums run over distinct statistics with multiplicities.
    """
    if length not in _STATS_CACHE:
        counter: dict = {}
        for steps in iter_paths(length, max_length):
            key = _stats_key(steps)
            counter[key] = counter.get(key, 0) + 1
        _STATS_CACHE[length] = [(PathStats(*key), mult) for key, mult in counter.items()]
    return _STATS_CACHE[length]


def divided_difference_power(power: int, at, gamma) -> Fraction:
    """(x^power - (x-gamma)^power)/gamma evaluated at ``at``, exactly."""
    at, gamma = Fraction(at), Fraction(gamma)
    return (at**power - (at - gamma) ** power) / gamma


def _weight_from_stats(st: PathStats, gamma: Fraction, kappa: tuple) -> Fraction:
    k1 = kappa[0]
    h0 = st.horiz_at_zero
    w = divided_difference_power(1 + h0, k1, gamma) / (1 + h0)
    for height, count in st.horiz_above:
        w *= (k1 + height) ** count
    for size, count in st.up_sizes:
        w *= (kappa[size - 1] + kappa[size]) ** count
    for height, count in st.down_from:
        w *= (height + gamma) ** count
    return w


def path_weight(path: LukasiewiczPath, kv: CumulantVector) -> Fraction:
    """Contribution of one path to the moment of order len(path)."""
    st = path.stats()
    need = st.max_up + 1 if st.up_sizes else 1
    if len(kv.kappa) < need:
        raise ValueError(f"need kappa_1..kappa_{need}, got {len(kv.kappa)}")
    return _weight_from_stats(st, kv.gamma, kv.kappa)


def moments_from_cumulants(
    kv: CumulantVector, lmax: int, max_length: int = MAX_PATH_LENGTH
) -> MomentVector:
    """m_l = sum of path weights over all paths of length l, for l = 1..lmax."""
    if len(kv.kappa) < lmax:
        raise ValueError("kappa list shorter than lmax")
    kappa = kv.padded(lmax + 1)
    out = []
    for ell in range(1, lmax + 1):
        total = Fraction(0)
        for st, mult in path_stats(ell, max_length):
            total += mult * _weight_from_stats(st, kv.gamma, kappa)
        out.append(total)
    return MomentVector(tuple(out))


def cumulants_from_moments(
    mv: MomentVector, gamma, lmax: int | None = None, max_length: int = MAX_PATH_LENGTH
) -> CumulantVector:
    """Exact triangular inversion of moments_from_cumulants."""
    gamma = Fraction(gamma)
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    if lmax is None:
        lmax = len(mv.m)
    if len(mv.m) < lmax:
        raise ValueError("moment list shorter than lmax")
    kappa: list = []
    for ell in range(1, lmax + 1):
        # with kappa_ell = 0 the path sum misses exactly (gamma+1)^{up(ell-1)} kappa_ell
        trial = tuple(kappa) + (Fraction(0),) * (ell + 1 - len(kappa))
        partial = Fraction(0)
        for st, mult in path_stats(ell, max_length):
            partial += mult * _weight_from_stats(st, gamma, trial)
        kappa.append((mv.m[ell - 1] - partial) / raising_factorial(gamma + 1, ell - 1))
    return CumulantVector(gamma, tuple(kappa))
