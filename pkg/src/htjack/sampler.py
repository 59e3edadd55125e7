"""Metropolis sampling of pure Jack measures on partitions.

The state is a partition with at most N rows; proposals add or remove a
single box at a corner, chosen uniformly among all legal corner moves, with
the usual asymmetric-proposal correction (ratio of corner counts).  Weight
ratios are evaluated incrementally: adding/removing a box at (r, c) only
changes the hook factors of the boxes in row r and column c, which is an
O(row length + column height) update (vectorized over the column, the long
direction at high temperature).

The partition is kept in three synchronized views: row lengths (numpy),
column heights (numpy), and (value, multiplicity) blocks.  The blocks give
O(#blocks) corner enumeration and O(1) updates; the arrays feed the
vectorized weight deltas.

Weights follow the explicit product formulas of the pure Plancherel and
pure alpha Jack measures; the normalizing constants cancel in ratios, so
the chain never needs them (they are kept anyway so the cached value is a
true log-probability).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .rtransform import EnsembleSpec, Family

DRIFT_CHECK_EVERY = 10_000  # accepted moves between full-weight revalidations


# ---------------------------------------------------------------------------
# weights
# ---------------------------------------------------------------------------


def _conjugate(lam) -> list:
    lam = [p for p in lam if p > 0]
    if not lam:
        return []
    conj = [0] * lam[0]
    for p in lam:
        for j in range(p):
            conj[j] += 1
    return conj


def _alpha_levels(eta: float, theta: float) -> int:
    # floor(eta/theta), robust to the ratio being an exact integer in floats
    return int(math.floor(eta / theta + 1e-12))


def _max_rows(spec: EnsembleSpec, N: int, theta: float) -> int:
    if spec.family is Family.ALPHA:
        return min(N, _alpha_levels(float(spec.eta), theta))
    return N


def log_weight(lam, spec: EnsembleSpec, N: int, theta: float) -> float:
    """Log of the pure Jack measure weight of the partition (full recompute)."""
    lam = [int(p) for p in lam if p > 0]
    if any(a < b for a, b in zip(lam, lam[1:])):
        raise ValueError("not a partition")
    if len(lam) > _max_rows(spec, N, theta):
        return -math.inf
    conj = _conjugate(lam)
    size = sum(lam)
    if spec.family is Family.PLANCH:
        eta = float(spec.eta)
        out = -N * eta + size * math.log(eta)
        extra_content = None
    elif spec.family is Family.ALPHA:
        eta, c = float(spec.eta), float(spec.c)
        E = _alpha_levels(eta, theta)
        out = N * theta * E * math.log1p(-c) + size * math.log(c)
        extra_content = E * theta
    else:
        raise ValueError("sampling is implemented for the planch and alpha families")
    Ntheta = N * theta
    for i, p in enumerate(lam, start=1):
        for j in range(1, p + 1):
            content = (j - 1) - theta * (i - 1)
            out += math.log(Ntheta + content)
            if extra_content is not None:
                out += math.log(extra_content + content)
            x = (p - j) + theta * (conj[j - 1] - i)
            out -= math.log(x + theta) + math.log(x + 1.0)
    return out


def planch_box_product_exact(lam, N: int, theta) -> Fraction:
    """The rational box-product factor of the Plancherel weight.

    The full weight is e^{-N eta} * eta^{|lam|} * (this product); for N = 1
    it telescopes to 1/k!, which is the Poisson degeneration.
    """
    theta = Fraction(theta)
    lam = [int(p) for p in lam if p > 0]
    conj = _conjugate(lam)
    out = Fraction(1)
    for i, p in enumerate(lam, start=1):
        for j in range(1, p + 1):
            num = N * theta + (j - 1) - theta * (i - 1)
            x = (p - j) + theta * (conj[j - 1] - i)
            out *= num / ((x + theta) * (x + 1))
    return out


# ---------------------------------------------------------------------------
# corner moves (pure helper, used by the chain and by brute-force tests)
# ---------------------------------------------------------------------------


def partition_moves(lam, max_rows: int) -> list:
    """All single-box add/remove results, as sorted partition tuples."""
    lam = tuple(int(p) for p in lam if p > 0)
    out = []
    n = len(lam)
    for r in range(1, n + 2):  # add to row r
        if r > max_rows:
            continue
        cur = lam[r - 1] if r <= n else 0
        above = lam[r - 2] if r >= 2 else None
        if above is not None and above < cur + 1:
            continue
        if r == n + 1 and cur != 0:
            continue
        new = list(lam) + [0] * (1 if r == n + 1 else 0)
        new[r - 1] += 1
        out.append(tuple(p for p in new if p > 0))
    for r in range(1, n + 1):  # remove from row r
        below = lam[r] if r < n else 0
        if lam[r - 1] - 1 >= below:
            new = list(lam)
            new[r - 1] -= 1
            out.append(tuple(p for p in new if p > 0))
    return out


def acceptance_probability(logw_from: float, logw_to: float, n_from: int, n_to: int) -> float:
    """Metropolis-Hastings acceptance for uniform corner proposals."""
    if logw_to == -math.inf:
        return 0.0
    log_alpha = logw_to - logw_from + math.log(n_from) - math.log(n_to)
    return 1.0 if log_alpha >= 0 else math.exp(log_alpha)


# ---------------------------------------------------------------------------
# the chain
# ---------------------------------------------------------------------------


@dataclass
class ChainDiagnostics:
    chain: int
    steps: int = 0
    accepted: int = 0
    max_drift: float = 0.0
    logw_trace: list = field(default_factory=list)

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.steps if self.steps else 0.0


class PartitionChain:
    """Single Metropolis chain over partitions with at most N rows."""

    def __init__(self, spec: EnsembleSpec, N: int, theta: float, rng, chain_index: int = 0):
        if spec.family is Family.BETA:
            raise ValueError("sampling is implemented for the planch and alpha families")
        self.spec = spec
        self.N = N
        self.theta = float(theta)
        self.rng = rng
        self.max_rows = _max_rows(spec, N, self.theta)
        if self.max_rows < 1:
            raise ValueError("the row cap is zero: eta/theta too small")

        self.lam = np.zeros(N, dtype=np.int64)
        self._conj_cap = 64
        self.conj = np.zeros(self._conj_cap, dtype=np.int64)
        self.blocks: list = []  # [value, multiplicity], decreasing values
        self.nrows = 0
        self.size = 0
        self._arange = np.arange(max(N, self._conj_cap) + 1, dtype=np.int64)

        self.Ntheta = N * self.theta
        if spec.family is Family.PLANCH:
            self._log_box = math.log(float(spec.eta))
            self._extra_content = None
        else:
            self._log_box = math.log(float(spec.c))
            self._extra_content = int(float(spec.eta) / self.theta) * self.theta
        self._log_theta = math.log(self.theta)

        self.logw = log_weight([], spec, N, self.theta)
        self.diag = ChainDiagnostics(chain_index)
        self._since_check = 0

    # -- move bookkeeping ---------------------------------------------------

    def n_moves(self, blocks=None, nrows=None) -> int:
        blocks = self.blocks if blocks is None else blocks
        nrows = self.nrows if nrows is None else nrows
        return 2 * len(blocks) + (1 if nrows < self.max_rows else 0)

    def _move_of_index(self, u: int):
        """Map a uniform index to (is_add, row, col, block_idx)."""
        nb = len(self.blocks)
        can_new = self.nrows < self.max_rows
        if u < nb:  # add at first row of block u
            row = 1 + sum(b[1] for b in self.blocks[:u])
            return True, row, self.blocks[u][0] + 1, u
        u -= nb
        if can_new and u == 0:  # add a new row of length 1
            return True, self.nrows + 1, 1, None
        if can_new:
            u -= 1
        row = sum(b[1] for b in self.blocks[: u + 1])
        return False, row, self.blocks[u][0], u

    @staticmethod
    def _apply_to_blocks(blocks: list, is_add: bool, block_idx, value: int):
        if is_add and block_idx is None:  # new row of length 1
            if blocks and blocks[-1][0] == 1:
                blocks[-1][1] += 1
            else:
                blocks.append([1, 1])
            return
        b = block_idx
        v, m = blocks[b]
        if is_add:
            if b > 0 and blocks[b - 1][0] == v + 1:
                blocks[b - 1][1] += 1
                blocks[b][1] -= 1
                if blocks[b][1] == 0:
                    del blocks[b]
            elif m == 1:
                blocks[b][0] += 1
            else:
                blocks[b][1] -= 1
                blocks.insert(b, [v + 1, 1])
        else:
            if v == 1:
                blocks[b][1] -= 1
                if blocks[b][1] == 0:
                    del blocks[b]
            elif b < len(blocks) - 1 and blocks[b + 1][0] == v - 1:
                blocks[b + 1][1] += 1
                blocks[b][1] -= 1
                if blocks[b][1] == 0:
                    del blocks[b]
            elif m == 1:
                blocks[b][0] -= 1
            else:
                blocks[b][1] -= 1
                blocks.insert(b + 1, [v - 1, 1])

    def partition(self) -> tuple:
        return tuple(int(p) for p in self.lam[: self.nrows])

    # -- weight deltas -------------------------------------------------------

    def _content_terms(self, row: int, col: int) -> float:
        content = (col - 1) - self.theta * (row - 1)
        out = math.log(self.Ntheta + content)
        if self._extra_content is not None:
            out += math.log(self._extra_content + content)
        return out

    def _delta_add(self, row: int, col: int) -> float:
        # the hook factors sit in the denominator of the weight, so growing a
        # hook by one box divides the weight by the enlarged factors
        th = self.theta
        delta = self._log_box + self._content_terms(row, col) - self._log_theta
        p = int(self.lam[row - 1])  # current row length (col == p + 1)
        if p:
            legs = self.conj[:p] - row
            x = (p - self._arange[1 : p + 1]) + th * legs  # arm + theta*leg per box
            delta += float(np.log((x + th) * (x + 1) / ((x + 1 + th) * (x + 2))).sum())
        if row > 1:
            arms = self.lam[: row - 1] - col
            y = arms + th * (row - 1 - self._arange[1:row])
            delta += float(np.log((y + th) * (y + 1) / ((y + 2 * th) * (y + 1 + th))).sum())
        return delta

    def _delta_remove(self, row: int, col: int) -> float:
        th = self.theta
        delta = -self._log_box - self._content_terms(row, col) + self._log_theta
        p = int(self.lam[row - 1]) - 1  # row length after removal
        if p:
            legs = self.conj[:p] - row
            x = (p - self._arange[1 : p + 1]) + th * legs
            delta += float(np.log((x + 1 + th) * (x + 2) / ((x + th) * (x + 1))).sum())
        if row > 1:
            arms = self.lam[: row - 1] - col
            y = arms + th * (row - 1 - self._arange[1:row])
            delta += float(np.log((y + 2 * th) * (y + 1 + th) / ((y + th) * (y + 1))).sum())
        return delta

    # -- stepping -------------------------------------------------------------

    def step(self, u_move: float, u_accept: float) -> bool:
        n = self.n_moves()
        if n == 0:
            return False
        is_add, row, col, block_idx = self._move_of_index(int(u_move * n))
        if is_add:
            delta = self._delta_add(row, col)
        else:
            delta = self._delta_remove(row, col)
        trial = [b.copy() for b in self.blocks]
        self._apply_to_blocks(trial, is_add, block_idx, col)
        nrows_after = self.nrows + (1 if (is_add and block_idx is None) else 0)
        if not is_add and col == 1 and int(self.lam[row - 1]) == 1:
            nrows_after = self.nrows - 1
        n_after = self.n_moves(trial, nrows_after)
        log_alpha = delta + math.log(n) - math.log(n_after)
        if u_accept > 0.0 and math.log(u_accept) >= log_alpha:
            return False

        # commit
        self.blocks = trial
        self.nrows = nrows_after
        if is_add:
            self.lam[row - 1] += 1
            if col >= self._conj_cap:
                self._grow_conj(col + 1)
            self.conj[col - 1] += 1
            self.size += 1
        else:
            self.lam[row - 1] -= 1
            self.conj[col - 1] -= 1
            self.size -= 1
        self.logw += delta
        self.diag.accepted += 1
        self._since_check += 1
        if self._since_check >= DRIFT_CHECK_EVERY:
            self._since_check = 0
            full = log_weight(self.partition(), self.spec, self.N, self.theta)
            self.diag.max_drift = max(self.diag.max_drift, abs(full - self.logw))
            self.logw = full
        return True

    def _grow_conj(self, need: int):
        while self._conj_cap < need:
            self._conj_cap *= 2
        grown = np.zeros(self._conj_cap, dtype=np.int64)
        grown[: self.conj.size] = self.conj
        self.conj = grown
        if self._arange.size < self._conj_cap + 1:
            self._arange = np.arange(self._conj_cap + 1, dtype=np.int64)

    def positions(self) -> np.ndarray:
        """Shifted particle positions lam_i - (i-1) theta, all N of them."""
        return self.lam.astype(np.float64) - self.theta * self._arange[: self.N]


@dataclass(frozen=True)
class ChainConfig:
    spec: EnsembleSpec
    N: int
    sweeps: int
    theta: float | None = None  # defaults to gamma/N
    burn_in: int | None = None  # defaults to sweeps // 5
    thin: int = 100
    seed: int = 0
    chains: int = 4

    def resolved_theta(self) -> float:
        return float(self.spec.gamma) / self.N if self.theta is None else float(self.theta)

    def resolved_burn_in(self) -> int:
        b = self.sweeps // 5 if self.burn_in is None else self.burn_in
        if b >= self.sweeps:
            raise ValueError("burn_in must be smaller than sweeps")
        return b

    def to_json(self) -> dict:
        return {
            "spec": self.spec.to_json(),
            "N": self.N,
            "sweeps": self.sweeps,
            "theta": self.resolved_theta(),
            "burn_in": self.resolved_burn_in(),
            "thin": self.thin,
            "seed": self.seed,
            "chains": self.chains,
        }


@dataclass
class SampleResult:
    config: ChainConfig
    positions: np.ndarray  # pooled shifted positions
    records: list  # (chain, sweep, positions-array) snapshots
    diagnostics: list


def _run_one_chain(config: ChainConfig, chain_index: int):
    rng = np.random.default_rng([config.seed, chain_index])
    chain = PartitionChain(
        config.spec, config.N, config.resolved_theta(), rng, chain_index
    )
    burn = config.resolved_burn_in()
    records = []
    BATCH = 4096
    u_move = u_acc = None
    filled = 0
    for sweep in range(config.sweeps):
        if filled == 0:
            u_move = rng.random(BATCH)
            u_acc = rng.random(BATCH)
            filled = BATCH
        i = BATCH - filled
        filled -= 1
        chain.step(u_move[i], u_acc[i])
        chain.diag.steps += 1
        if sweep >= burn and (sweep - burn) % config.thin == 0:
            records.append((chain_index, sweep, chain.positions()))
        if sweep % 50_000 == 0:
            chain.diag.logw_trace.append((sweep, chain.logw))
    return records, chain.diag


def mcmc_run(config: ChainConfig, threads: int = 1) -> SampleResult:
    """Run the configured chains and pool the retained shifted positions.

    Chains use independent streams seeded by (seed, chain index), so the
    output is reproducible for a fixed config regardless of `threads`.
    """
    results = []
    if threads > 1 and config.chains > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=min(threads, config.chains)) as pool:
            futures = [pool.submit(_run_one_chain, config, k) for k in range(config.chains)]
            results = [f.result() for f in futures]
    else:
        results = [_run_one_chain(config, k) for k in range(config.chains)]

    records = []
    diagnostics = []
    for recs, diag in results:
        records.extend(recs)
        diagnostics.append(diag)
    if records:
        pooled = np.concatenate([r[2] for r in records])
    else:
        pooled = np.empty(0)
    return SampleResult(config, pooled, records, diagnostics)


def histogram(samples, bin_width: float):
    """Deterministic binning anchored at 0: bin k covers [k*w, (k+1)*w)."""
    if bin_width <= 0:
        raise ValueError("bin_width must be positive")
    xs = np.asarray(samples, dtype=float)
    if xs.size == 0:
        return np.empty(0), np.empty(0, dtype=np.int64)
    idx = np.floor(xs / bin_width).astype(np.int64)
    lo, hi = idx.min(), idx.max()
    counts = np.bincount(idx - lo, minlength=hi - lo + 1)
    lefts = (np.arange(lo, hi + 1)) * bin_width
    return lefts, counts
