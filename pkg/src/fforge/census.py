"""Experiment drivers: the free-tree FED census, rose-tree sweeps, threshold
tables, and the growth/shrink and bounded-flip probes.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from decimal import ROUND_HALF_UP, Decimal
from typing import Iterable, Optional

import numpy as np

from .enumeration import ShardSpec, decode, free_trees, free_trees_shard, parents
from .errors import BadParam
from .jacobi import jacobi_eigh_batch
from .rose import Prediction, asymptotic_ratio, predict_fed_rose, r_of_s, threshold_f
from .spectral import (
    DEFAULT_TOL,
    ExtremaRule,
    FiedlerReport,
    Policy,
    Tolerances,
    check_fed,
    eigen_symmetric,
    fed_from_spectrum,
    fiedler,
    laplacian,
    laplacian_stack,
)
from .tree import add_pendant, build_rose, canonical_code, read_edge_list, remove_leaf

log = logging.getLogger(__name__)

# n -> (free trees, trees violating FED)
TABLE1 = {
    11: (235, 0),
    12: (551, 1),
    13: (1301, 5),
    14: (3159, 21),
    15: (7741, 72),
    16: (19320, 240),
    17: (48629, 757),
    18: (123867, 2331),
    19: (317955, 7012),
    20: (823065, 20807),
}

CHUNK = 4096


def _default_threads() -> int:
    env = os.environ.get("FFORGE_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


@dataclass(frozen=True)
class Config:
    policy: Policy = Policy.PROJECTION
    shards: int = 1
    tol: Tolerances = DEFAULT_TOL
    extrema: ExtremaRule = ExtremaRule.SET
    threads: int = field(default_factory=_default_threads)
    # rose trees above this many vertices are not eigensolved in table drivers
    max_vertices: int = 200


@dataclass(frozen=True)
class Violator:
    code: bytes
    multiplicity: int
    path: str
    reason: str

    def to_dict(self) -> dict:
        return {"code": self.code.decode(), "multiplicity": self.multiplicity,
                "path": self.path, "reason": self.reason}


@dataclass(frozen=True)
class CensusRow:
    n: int
    trees: int
    violations: int
    policy: Policy
    degenerate: int = 0
    degenerate_violations: int = 0
    violators: tuple[Violator, ...] = ()

    @property
    def ratio_percent(self) -> Decimal:
        """Violation percentage rounded half-up to two decimals (display only)."""
        exact = Fraction(100 * self.violations, self.trees)
        return (Decimal(exact.numerator) / Decimal(exact.denominator)).quantize(
            Decimal("0.01"), rounding=ROUND_HALF_UP)

    @property
    def violator_codes(self) -> list[bytes]:
        return [v.code for v in self.violators]

    @property
    def strict_violations(self) -> int:
        """Tally had every degenerate tree been counted as a violation."""
        return self.violations - self.degenerate_violations + self.degenerate


def _census_shard(n: int, index: int, count: int, policy: Policy, tol: Tolerances,
                  extrema: ExtremaRule) -> tuple[int, int, int, list[Violator]]:
    trees = degenerate = degenerate_bad = 0
    violators: list[Violator] = []
    seqs = free_trees_shard(n, ShardSpec(index, count))
    while True:
        chunk = [s for _, s in zip(range(CHUNK), seqs)]
        if not chunk:
            break
        par = np.array([parents(s) for s in chunk], dtype=np.int64)
        values, vectors = jacobi_eigh_batch(laplacian_stack(par))
        for b, seq in enumerate(chunk):
            tree = decode(seq)
            mult, verdict = fed_from_spectrum(tree, values[b], vectors[b], policy, tol, extrema)
            if mult > 1:
                degenerate += 1
            if not verdict.satisfied:
                if mult > 1:
                    degenerate_bad += 1
                violators.append(Violator(canonical_code(tree), mult, verdict.path,
                                          verdict.reason.value))
        trees += len(chunk)
    return trees, degenerate, degenerate_bad, violators


def run_census(n: int, config: Config = Config()) -> CensusRow:
    """Check FED on every free tree with ``n`` vertices."""
    if not 4 <= n <= 24:
        raise BadParam(f"census supports 4 <= n <= 24, got {n}")
    if config.shards < 1:
        raise BadParam("shards must be >= 1")
    args = [(n, k, config.shards, config.policy, config.tol, config.extrema)
            for k in range(config.shards)]
    workers = min(config.shards, config.threads)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_census_shard, *zip(*args)))
    else:
        parts = [_census_shard(*a) for a in args]
    trees = sum(p[0] for p in parts)
    violators = sorted((v for p in parts for v in p[3]), key=lambda v: v.code)
    row = CensusRow(
        n=n,
        trees=trees,
        violations=len(violators),
        policy=config.policy,
        degenerate=sum(p[1] for p in parts),
        degenerate_violations=sum(p[2] for p in parts),
        violators=tuple(violators),
    )
    log.info("census n=%d: %d trees, %d violations (%d degenerate trees)",
             n, row.trees, row.violations, row.degenerate)
    return row


def verify_census(row: CensusRow) -> Optional[str]:
    """Mismatch message against the reference table, or None when it agrees."""
    expected = TABLE1.get(row.n)
    if expected is None:
        return None
    if (row.trees, row.violations) != expected:
        return (f"n={row.n}: got ({row.trees}, {row.violations}), "
                f"expected {expected}")
    return None


@dataclass(frozen=True)
class RoseSweepRow:
    s: int
    t: int
    p: int
    alpha_numeric: float
    alpha_analytic: float
    fed_numeric: bool
    fed_predicted: Prediction

    @property
    def agreement(self) -> bool:
        if self.fed_predicted is Prediction.INDETERMINATE:
            return True
        return (self.fed_predicted is Prediction.FED_TRUE) == self.fed_numeric


def _rose_fed(s: int, t: int, p: int, config: Config) -> tuple[float, bool]:
    tree = build_rose((s, t, p))
    eig = eigen_symmetric(laplacian(tree))
    _, verdict = fed_from_spectrum(tree, eig.values, eig.vectors, config.policy,
                                   config.tol, config.extrema)
    return float(eig.values[1]), verdict.satisfied


def run_rose_sweep(s_range: Iterable[int], t_range: Iterable[int], p_range: Iterable[int],
                   config: Config = Config()) -> list[RoseSweepRow]:
    rows = []
    t_range, p_range = list(t_range), list(p_range)
    for s in s_range:
        for t in t_range:
            for p in p_range:
                alpha_num, fed = _rose_fed(s, t, p, config)
                pred = predict_fed_rose(s, t, p)
                rows.append(RoseSweepRow(s, t, p, alpha_num, pred.alpha_analytic, fed,
                                         pred.prediction))
    return rows


def empirical_flip(s: int, t: int, p_max: int, config: Config = Config()) -> Optional[int]:
    """Largest p in ``[0, p_max)`` with R(s, t, p) FED-true, by bisection on p.

    Assumes FED is true up to the flip and false after it.  Returns None if
    R(s, t, 0) already fails or R(s, t, p_max) still passes.
    """
    fed = lambda p: _rose_fed(s, t, p, config)[1]  # noqa: E731
    lo, hi = 0, p_max
    if not fed(lo) or fed(hi):
        return None
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if fed(mid):
            lo = mid
        else:
            hi = mid
    return lo


@dataclass(frozen=True)
class ThresholdRow:
    s: int
    r_s: float
    f_ss: float
    floor_f: int
    empirical_flip: Optional[int]
    asymptotic_ratio: float


def run_threshold_table(s_range: Iterable[int], config: Config = Config()) -> list[ThresholdRow]:
    rows = []
    for s in s_range:
        if s < 3:
            raise BadParam(f"threshold table needs s >= 3, got {s}")
        f = threshold_f(s)
        p_max = 2 * math.ceil(f) + 2
        flip = None
        if 2 * s + 2 + p_max <= config.max_vertices:
            flip = empirical_flip(s, s, p_max, config)
        rows.append(ThresholdRow(s, r_of_s(s), f, math.floor(f), flip, asymptotic_ratio(s)))
    return rows


@dataclass(frozen=True)
class SuptestRow:
    s: int
    t: int
    flip: Optional[int]
    lower: float  # f(s,s) - 1
    upper: float  # f(t+2,t+2)

    @property
    def within_bounds(self) -> Optional[bool]:
        if self.flip is None:
            return None
        return math.floor(self.lower) <= self.flip <= math.ceil(self.upper)


@dataclass(frozen=True)
class SuptestReport:
    s: int
    rows: tuple[SuptestRow, ...]
    remark_bound: int  # s(s+1)/2 - 2

    @property
    def max_flip(self) -> Optional[int]:
        flips = [r.flip for r in self.rows if r.flip is not None]
        return max(flips) if flips else None

    @property
    def remark_bound_holds(self) -> Optional[bool]:
        m = self.max_flip
        return None if m is None else m <= self.remark_bound


def run_suptest(s: int, t_max: int, p_probe: int, config: Config = Config()) -> SuptestReport:
    """Empirical FED flip point of R(s, t, .) for t = s+1..t_max."""
    if s < 3:
        raise BadParam(f"suptest needs s >= 3, got {s}")
    rows = []
    for t in range(s + 1, t_max + 1):
        flip = empirical_flip(s, t, p_probe, config)
        rows.append(SuptestRow(s, t, flip, threshold_f(s) - 1.0, threshold_f(t + 2)))
    return SuptestReport(s, tuple(rows), s * (s + 1) // 2 - 2)


@dataclass(frozen=True)
class Counterexample:
    direction: str  # "grow" or "shrink"
    n: int
    code: bytes
    vertex: int

    def to_dict(self) -> dict:
        return {"direction": self.direction, "n": self.n, "code": self.code.decode(),
                "vertex": self.vertex}


@dataclass(frozen=True)
class GrowthReport:
    n_max: int
    examined: int
    grow_checks: int
    shrink_checks: int
    counterexamples: tuple[Counterexample, ...]


def run_conjecture_growth(n_max: int, config: Config = Config()) -> GrowthReport:
    """Probe both growth/shrink conjectures on every simple-spectrum tree up to ``n_max``.

    grow: a FED tree stays FED after a pendant vertex is added at an extremal vertex.
    shrink: a non-FED tree stays non-FED after an extremal leaf is deleted.
    """
    if not 3 <= n_max <= 14:
        raise BadParam(f"conjecture probe supports 3 <= n_max <= 14, got {n_max}")
    examined = grows = shrinks = 0
    found: list[Counterexample] = []
    for n in range(3, n_max + 1):
        for seq in free_trees(n):
            tree = decode(seq)
            report = fiedler(tree, config.policy, config.tol, config.extrema)
            if report.multiplicity > 1:
                continue
            examined += 1
            extremal = sorted(report.argmin_set | report.argmax_set)
            if report.fed.satisfied:
                for v in extremal:
                    grows += 1
                    if not check_fed(add_pendant(tree, v), config.policy, config.tol,
                                     config.extrema).satisfied:
                        found.append(Counterexample("grow", n, canonical_code(tree), v))
            else:
                for v in extremal:
                    if tree.degree(v) != 1:
                        continue
                    shrinks += 1
                    if check_fed(remove_leaf(tree, v), config.policy, config.tol,
                                 config.extrema).satisfied:
                        found.append(Counterexample("shrink", n, canonical_code(tree), v))
    found.sort(key=lambda c: (c.n, c.code, c.direction, c.vertex))
    return GrowthReport(n_max, examined, grows, shrinks, tuple(found))


def analyze_file(path, config: Config = Config()) -> FiedlerReport:
    tree = read_edge_list(path)
    return fiedler(tree, config.policy, config.tol, config.extrema)


__all__ = [
    "TABLE1", "Config", "CensusRow", "Violator", "run_census", "verify_census",
    "RoseSweepRow", "run_rose_sweep", "empirical_flip", "ThresholdRow",
    "run_threshold_table", "SuptestRow", "SuptestReport", "run_suptest",
    "Counterexample", "GrowthReport", "run_conjecture_growth", "analyze_file",
]
