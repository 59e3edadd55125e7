"""Crystallized limit densities: uniform height 1/gamma on unit-gap intervals.

Every limit density here is a finite or truncated-infinite union of disjoint
closed intervals carrying constant density 1/gamma, with consecutive
intervals separated by gaps of exactly 1 (interval endpoints are 1 - l_k and
-l_{k+1} for the root list l of the family's characteristic function).

For the infinite families the interval lengths decay superpolynomially, so
the construction truncates once the remaining tail mass --- which telescopes
to (l_K - (1-K))/gamma for the last consumed root --- is negligible; that
tail is recorded in ``truncation_residual`` rather than dropped silently.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import ComputationError
from .rtransform import EnsembleSpec, Family
from .spectra import RootList


@dataclass(frozen=True)
class CrystalDensity:
    gamma: float
    intervals: tuple  # ((a, b), ...) disjoint, sorted, b - a >= 0
    truncation_residual: float = 0.0
    dropped_degenerate: int = 0

    def __post_init__(self):
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")
        prev_end = -math.inf
        for a, b in self.intervals:
            if b < a:
                raise ComputationError(f"inverted interval [{a}, {b}]", {"intervals": self.intervals})
            if a < prev_end:
                raise ComputationError("intervals overlap", {"intervals": self.intervals})
            prev_end = b

    def mass(self) -> float:
        return sum(b - a for a, b in self.intervals) / self.gamma

    def support_radius(self) -> float:
        return max(max(abs(a), abs(b)) for a, b in self.intervals)

    def cdf(self, x: float) -> float:
        acc = 0.0
        for a, b in self.intervals:
            if x <= a:
                break
            acc += min(x, b) - a
        return acc / self.gamma

    def pdf(self, x: float) -> float:
        for a, b in self.intervals:
            if a <= x <= b:
                return 1.0 / self.gamma
        return 0.0

    def moment(self, n: int) -> float:
        return math.fsum(
            (b ** (n + 1) - a ** (n + 1)) / (self.gamma * (n + 1)) for a, b in self.intervals
        )

    def charfn(self, t: float) -> complex:
        if t == 0.0:
            return complex(self.mass())
        acc = 0j
        for a, b in self.intervals:
            acc += cmath.exp(1j * t * b) - cmath.exp(1j * t * a)
        return acc / (1j * self.gamma * t)

    def to_json(self) -> dict:
        return {
            "gamma": self.gamma,
            "intervals": [[a, b] for a, b in self.intervals],
            "residual": self.truncation_residual,
        }

    @classmethod
    def from_json(cls, data) -> "CrystalDensity":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(
            gamma=float(data["gamma"]),
            intervals=tuple((float(a), float(b)) for a, b in data["intervals"]),
            truncation_residual=float(data.get("residual", 0.0)),
        )


def build_density(spec: EnsembleSpec, roots: RootList, mass_tol: float = 1e-8) -> CrystalDensity:
    """Assemble the family's crystal density from its root list.

    Both infinite families: [-gamma, -l_1], then [1-l_k, -l_{k+1}].  The
    finite (beta) family additionally closes with the terminal interval
    [1-l_M, M] that restores unit mass.
    """
    gamma = float(spec.gamma)
    ls = list(roots.roots)
    if not ls:
        raise ValueError("empty root list")
    tol = roots.tol

    raw = [(-gamma, -ls[0])]
    dropped = 0
    residual = 0.0

    if spec.family is Family.BETA:
        if len(ls) != spec.M:
            raise ValueError(f"the beta construction needs exactly M = {spec.M} roots")
        for k in range(spec.M - 1):
            raw.append((1 - ls[k], -ls[k + 1]))
        raw.append((1 - ls[spec.M - 1], float(spec.M)))
    else:
        # consume roots until the remaining tail mass is negligible; the tail
        # telescopes to (l_K - (1 - K))/gamma for the last consumed root, and
        # the recorded residual is a factor-2 bound on it (the acceptance
        # budget residual*radius^n needs the bound to also cover the
        # radius-weighted tail, whose geometric sum exceeds the plain tail
        # mass by a bounded factor)
        done = False
        for k in range(len(ls) - 1):
            gap_excess = ls[k] - ls[k + 1] - 1.0  # length of the next interval
            cum = sum(b - a for a, b in raw) / gamma
            tail = (ls[k] - (1 - (k + 1))) / gamma
            if gap_excess < mass_tol / 10 and cum >= 1 - mass_tol / 2 and tail <= mass_tol / 2:
                residual = 2 * tail
                done = True
                break
            raw.append((1 - ls[k], -ls[k + 1]))
        if not done:
            k_last = len(ls) - 1
            tail = (ls[k_last] - (1 - (k_last + 1))) / gamma
            residual = 2 * tail
            if not -mass_tol <= residual <= mass_tol:
                raise ComputationError(
                    "root list too short: residual tail mass exceeds the tolerance",
                    {
                        "residual": residual,
                        "mass_tol": mass_tol,
                        "interval_masses": [(b - a) / gamma for a, b in raw],
                    },
                )

    intervals = []
    for a, b in raw:
        if b < a - 10 * tol:
            raise ComputationError(
                f"interlacing violation produced the inverted interval [{a}, {b}]",
                {"interval_masses": [(bb - aa) / gamma for aa, bb in raw]},
            )
        if b - a <= 10 * tol:
            dropped += 1
            continue
        intervals.append((a, b))

    density = CrystalDensity(gamma, tuple(intervals), max(residual, 0.0), dropped)
    total = density.mass() + density.truncation_residual
    if abs(total - 1.0) > mass_tol + 20 * tol:
        raise ComputationError(
            f"mass check failed: intervals + residual = {total}",
            {"interval_masses": [(b - a) / gamma for a, b in density.intervals]},
        )
    return density


def ks_distance(density: CrystalDensity, samples) -> float:
    """Sup distance between the empirical CDF and the density's CDF."""
    xs = np.sort(np.asarray(samples, dtype=float))
    n = xs.size
    if n == 0:
        raise ValueError("need at least one sample")
    cdf = np.array([density.cdf(x) for x in xs])
    upper = np.abs(np.arange(1, n + 1) / n - cdf)
    lower = np.abs(np.arange(0, n) / n - cdf)
    return float(np.max(np.maximum(upper, lower)))


def density_grid(density: CrystalDensity, points: int = 2001, pad: float = 0.5):
    """(x, f(x)) arrays on a uniform grid spanning the support (for plotting/CSV)."""
    lo = density.intervals[0][0] - pad
    hi = density.intervals[-1][1] + pad
    xs = np.linspace(lo, hi, points)
    fs = np.array([density.pdf(x) for x in xs])
    return xs, fs
