"""Random-state sweeps testing the centre-bound conjecture at desk scale.

A sweep samples Ginibre random states (mixed ranks), computes per state
the CHSH/F3 maxima and both ellipsoid centre magnitudes via the hot
kernels, bins running maxima against centre magnitude, and records any
sample that violates the conjectured bounds. A violation would falsify
the conjecture, so it is first-class data: the full state is serialised
rather than discarded.

Sampling is partitioned into fixed-size chunks, one deterministic RNG
stream per chunk; merging uses only associative max/sum reductions, so
results are independent of worker count and scheduling.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .criteria import Thresholds
from .errors import DomainError
from .kernels import DEGENERACY_TOL, sweep_stats
from .states import SeededRng

VIOLATION_TOL = 1e-9

DEFAULT_RANK_MIX = (0.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0)


def chsh_bound_vec(c: np.ndarray) -> np.ndarray:
    """Vectorised :func:`hqc.criteria.conjecture_bound_chsh` (clipped domain)."""
    return np.maximum(np.sqrt(2.0 * (1.0 - np.clip(c, 0.0, 1.0))), 1.0)


@dataclass(frozen=True)
class SweepConfig:
    """Parameters of one sweep; results are a pure function of this value.

    ``rank_mix`` gives sampling weights for Ginibre ranks 1..4. Rank 1
    (pure states) is excluded by default because pure-state marginals are
    frequently near-pure, flooding the degenerate-ellipsoid path; pass a
    nonzero weight to re-enable it.
    """

    n: int
    seed: int = 0
    rank_mix: tuple[float, float, float, float] = DEFAULT_RANK_MIX
    bins: int = 200
    workers: int = 1
    chunk_size: int = 65536
    degeneracy_tol: float = DEGENERACY_TOL
    violation_tol: float = VIOLATION_TOL
    thresholds: Thresholds = field(default_factory=Thresholds)

    def __post_init__(self) -> None:
        if self.n < 0:
            raise DomainError(f"n must be >= 0, got {self.n}")
        if self.bins < 1:
            raise DomainError(f"bins must be >= 1, got {self.bins}")
        if self.workers < 1:
            raise DomainError(f"workers must be >= 1, got {self.workers}")
        if self.chunk_size < 1:
            raise DomainError(f"chunk_size must be >= 1, got {self.chunk_size}")
        mix = np.asarray(self.rank_mix, dtype=float)
        if mix.shape != (4,) or mix.min() < 0 or mix.sum() <= 0:
            raise DomainError(f"rank_mix must be 4 nonnegative weights with positive sum, got {self.rank_mix}")


@dataclass(frozen=True)
class Violation:
    """A sample exceeding a conjectured bound (a would-be counterexample)."""

    index: int
    b: float
    f3: float
    c_a: float
    c_b: float
    reasons: tuple[str, ...]
    state: np.ndarray


@dataclass(frozen=True)
class SideBins:
    """Running per-bin maxima of B and F3 against one centre magnitude."""

    max_b: np.ndarray
    max_f3: np.ndarray
    count: np.ndarray
    degenerate: int


@dataclass(frozen=True)
class SweepSummary:
    """Merged sweep result. Equality ignores runtime, which is not data."""

    config: SweepConfig
    vs_cb: SideBins
    vs_ca: SideBins
    violations: tuple[Violation, ...]
    metadata: dict
    runtime_seconds: float = field(compare=False, default=0.0)

    def __eq__(self, other: object) -> bool:  # numpy fields need elementwise comparison
        if not isinstance(other, SweepSummary):
            return NotImplemented
        return self.config == other.config and self.stats_equal(other) and self.metadata == other.metadata

    def stats_equal(self, other: "SweepSummary") -> bool:
        """Bitwise equality of the statistical content (ignores config echo)."""
        return (
            _bins_equal(self.vs_cb, other.vs_cb)
            and _bins_equal(self.vs_ca, other.vs_ca)
            and len(self.violations) == len(other.violations)
            and all(
                v.index == w.index and v.reasons == w.reasons and np.array_equal(v.state, w.state)
                for v, w in zip(self.violations, other.violations)
            )
        )


def _bins_equal(x: SideBins, y: SideBins) -> bool:
    return (
        np.array_equal(x.max_b, y.max_b)
        and np.array_equal(x.max_f3, y.max_f3)
        and np.array_equal(x.count, y.count)
        and x.degenerate == y.degenerate
    )


@dataclass(frozen=True)
class EnvelopeRow:
    c_mid: float
    max_b: float
    max_f3: float
    count: int


def _empty_side(bins: int) -> SideBins:
    return SideBins(np.full(bins, -np.inf), np.full(bins, -np.inf), np.zeros(bins, dtype=np.int64), 0)


def _bin_side(c: np.ndarray, ok: np.ndarray, b: np.ndarray, f3: np.ndarray, bins: int) -> SideBins:
    idx = np.minimum((np.clip(c[ok], 0.0, 1.0) * bins).astype(np.int64), bins - 1)
    max_b = np.full(bins, -np.inf)
    max_f3 = np.full(bins, -np.inf)
    np.maximum.at(max_b, idx, b[ok])
    np.maximum.at(max_f3, idx, f3[ok])
    count = np.bincount(idx, minlength=bins)
    return SideBins(max_b, max_f3, count, int((~ok).sum()))


def _merge_sides(x: SideBins, y: SideBins) -> SideBins:
    return SideBins(
        np.maximum(x.max_b, y.max_b),
        np.maximum(x.max_f3, y.max_f3),
        x.count + y.count,
        x.degenerate + y.degenerate,
    )


def _violations_in_chunk(
    config: SweepConfig,
    start: int,
    g: np.ndarray,
    b: np.ndarray,
    f3: np.ndarray,
    c_a: np.ndarray,
    c_b: np.ndarray,
    ok_a: np.ndarray,
    ok_b: np.ndarray,
) -> list[Violation]:
    tol = config.violation_tol
    th = config.thresholds
    checks = {
        "chsh_bound_cB": ok_b & (b > chsh_bound_vec(c_b) + tol),
        "chsh_bound_cA": ok_a & (b > chsh_bound_vec(c_a) + tol),
        "chsh_above_threshold_cB": ok_b & (b > 1.0 + tol) & (c_b > th.c_chsh),
        "chsh_above_threshold_cA": ok_a & (b > 1.0 + tol) & (c_a > th.c_chsh),
        "f3_above_threshold_cB": ok_b & (f3 > 1.0 + tol) & (c_b > th.c_f3),
        "f3_above_threshold_cA": ok_a & (f3 > 1.0 + tol) & (c_a > th.c_f3),
    }
    any_bad = np.zeros(len(b), dtype=bool)
    for mask in checks.values():
        any_bad |= mask
    out = []
    for local in np.nonzero(any_bad)[0]:
        rho = g[local] @ g[local].conj().T
        rho /= rho.trace().real
        out.append(
            Violation(
                index=start + int(local),
                b=float(b[local]),
                f3=float(f3[local]),
                c_a=float(c_a[local]),
                c_b=float(c_b[local]),
                reasons=tuple(sorted(name for name, mask in checks.items() if mask[local])),
                state=rho,
            )
        )
    return out


def _run_chunk(config: SweepConfig, chunk_index: int) -> tuple[SideBins, SideBins, list[Violation]]:
    start = chunk_index * config.chunk_size
    count = min(config.chunk_size, config.n - start)
    gen = SeededRng(config.seed, chunk_index).generator()
    mix = np.asarray(config.rank_mix, dtype=float)
    ranks = gen.choice(np.arange(1, 5), size=count, p=mix / mix.sum())
    g = gen.standard_normal((count, 4, 4)) + 1j * gen.standard_normal((count, 4, 4))
    g *= np.arange(4)[None, None, :] < ranks[:, None, None]
    b, f3, c_a, c_b, ok_a, ok_b = sweep_stats(g, config.degeneracy_tol)
    side_b = _bin_side(c_b, ok_b, b, f3, config.bins)
    side_a = _bin_side(c_a, ok_a, b, f3, config.bins)
    violations = _violations_in_chunk(config, start, g, b, f3, c_a, c_b, ok_a, ok_b)
    return side_b, side_a, violations


def run_sweep(config: SweepConfig) -> SweepSummary:
    """Execute the sweep described by ``config``.

    Deterministic for a fixed config regardless of worker count; any
    conjecture violations are collected (sorted by sample index), not
    raised.
    """
    started = time.perf_counter()
    n_chunks = (config.n + config.chunk_size - 1) // config.chunk_size
    vs_cb = _empty_side(config.bins)
    vs_ca = _empty_side(config.bins)
    violations: list[Violation] = []
    if n_chunks > 0:
        if config.workers == 1:
            results = map(lambda c: _run_chunk(config, c), range(n_chunks))
            for side_b, side_a, viol in results:
                vs_cb = _merge_sides(vs_cb, side_b)
                vs_ca = _merge_sides(vs_ca, side_a)
                violations.extend(viol)
        else:
            with ThreadPoolExecutor(max_workers=config.workers) as pool:
                for side_b, side_a, viol in pool.map(lambda c: _run_chunk(config, c), range(n_chunks)):
                    vs_cb = _merge_sides(vs_cb, side_b)
                    vs_ca = _merge_sides(vs_ca, side_a)
                    violations.extend(viol)
    violations.sort(key=lambda v: v.index)
    metadata = {
        "ensemble": "ginibre",
        "rank_mix": {str(rank): float(w) for rank, w in zip(range(1, 5), config.rank_mix)},
        "note": "sampling measure is the Ginibre rank mix above; rank 4 is the Hilbert-Schmidt measure",
        "chunks": n_chunks,
    }
    return SweepSummary(
        config=config,
        vs_cb=vs_cb,
        vs_ca=vs_ca,
        violations=tuple(violations),
        metadata=metadata,
        runtime_seconds=time.perf_counter() - started,
    )


def bin_envelope(summary: SweepSummary, side: str = "B") -> list[EnvelopeRow]:
    """Envelope table (c_mid, max_B, max_F3, count) for occupied bins.

    ``side`` selects which centre magnitude the bins refer to ("B" is the
    conventional choice). Rows come out in ascending centre order.
    """
    bins_data = summary.vs_cb if side == "B" else summary.vs_ca
    bins = summary.config.bins
    rows = []
    for k in range(bins):
        if bins_data.count[k] == 0:
            continue
        rows.append(
            EnvelopeRow(
                c_mid=(k + 0.5) / bins,
                max_b=float(bins_data.max_b[k]),
                max_f3=float(bins_data.max_f3[k]),
                count=int(bins_data.count[k]),
            )
        )
    return rows
