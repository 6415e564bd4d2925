"""Seeded random profiles and batch comparison of both procedures against the oracle."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .bundles import minimal_bundles
from .model import ObjectUniverse, PreferenceModel, Profile, is_separable
from .oracle import classify_split, enumerate_ef_splits
from .undercut import original_undercut, simplified_undercut

GENERATORS = ("additive_uniform", "separable_table")
MAX_ADDITIVE_BATCH = 8
MAX_TABLE_BATCH = 5

# separable tables: base values in [V_MIN, V_MIN + V_SPREAD], |perturbation| < V_MIN / 2
V_MIN = 10
V_SPREAD = 10


def object_names(n: int) -> tuple[str, ...]:
    if n <= 26:
        return tuple("abcdefghijklmnopqrstuvwxyz"[:n])
    return tuple(f"o{i}" for i in range(n))


def profile_seed(batch_seed: int, index: int) -> int:
    """Per-profile seed derived from the batch seed; stable across runs and platforms."""
    ss = np.random.SeedSequence([batch_seed & (2**64 - 1), index])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def random_additive_profile(
    n: int, value_range: tuple[int, int] = (1, 10), claims: tuple[int, int] = (1, 1), seed: int = 0
) -> Profile:
    lo, hi = value_range
    if lo < 1 or hi < lo:
        raise ValueError("value range must satisfy 1 <= lo <= hi")
    rng = np.random.default_rng(seed)
    vals = rng.integers(lo, hi, size=(2, n), endpoint=True)
    prefs = tuple(PreferenceModel.additive([int(v) for v in row]) for row in vals)
    return Profile(ObjectUniverse(object_names(n)), prefs, tuple(claims))


def _separable_table(n: int, rng: np.random.Generator, perturb: bool = True) -> PreferenceModel:
    base = rng.integers(V_MIN, V_MIN + V_SPREAD, size=n, endpoint=True)
    half = (V_MIN - 1) // 2  # largest integer strictly below V_MIN / 2
    table = np.zeros(1 << n, dtype=np.int64)
    for j in range(n):
        table[1 << j:2 << j] = table[:1 << j] + base[j]
    if perturb:
        delta = rng.integers(-half, half, size=1 << n, endpoint=True)
        delta[0] = 0
        table = table + delta
    return PreferenceModel.from_table([int(x) for x in table])


def random_separable_table_profile(
    n: int, seed: int = 0, claims: tuple[int, int] = (1, 1), perturb: bool = True
) -> Profile:
    """Additive base values plus bounded per-subset noise.

    Each added object changes utility by more than ``v - 2 * (V_MIN / 2) >= 0``,
    so the table is strictly increasing under inclusion, hence separable with
    every object desirable. ``perturb=False`` yields plain additive tables.
    """
    if n > MAX_TABLE_BATCH:
        raise ValueError(f"separable table profiles are limited to {MAX_TABLE_BATCH} objects")
    rng = np.random.default_rng(seed)
    prefs = (_separable_table(n, rng, perturb), _separable_table(n, rng, perturb))
    for p in prefs:
        rep = is_separable(p)
        assert rep.holds, f"generator produced a non-separable table: {rep.witness}"
    return Profile(ObjectUniverse(object_names(n)), prefs, tuple(claims))


@dataclass(frozen=True)
class BatchConfig:
    count: int
    n: int
    generator: str = "additive_uniform"
    value_range: tuple[int, int] = (1, 10)
    claims: tuple[int, int] = (1, 1)
    seed: int = 0

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("count must be at least 1")
        if self.generator not in GENERATORS:
            raise ValueError(f"unknown generator {self.generator!r}")
        cap = MAX_ADDITIVE_BATCH if self.generator == "additive_uniform" else MAX_TABLE_BATCH
        if not 1 <= self.n <= cap:
            raise ValueError(f"{self.generator} batches support 1..{cap} objects")
        if min(self.claims) < 1:
            raise ValueError("claims must be positive")

    def profile(self, seed: int) -> Profile:
        if self.generator == "additive_uniform":
            return random_additive_profile(self.n, self.value_range, self.claims, seed)
        return random_separable_table_profile(self.n, seed, self.claims)


@dataclass(frozen=True)
class ProfileResult:
    seed: int | None
    n: int
    ef_exists: bool
    nontrivial_exists: bool
    families_differ: bool
    simplified_verdict: str
    original_verdict: str
    ties_broken: int
    problems: tuple[str, ...] = ()


def evaluate_profile(profile: Profile, seed: int | None = None) -> ProfileResult:
    """Oracle, simplified and original (index tie-break) on one profile.

    ``problems`` lists every way the run contradicts the oracle or the
    expected relationships between the procedures.
    """
    efs = enumerate_ef_splits(profile)
    ef_exists = bool(efs)
    nontrivial = any(c.verdict == "ef_nontrivial" for c in efs)
    ground = profile.universe.full()
    mb1 = minimal_bundles(profile.prefs[0], ground, profile.claims_for(1), agent=1)
    mb2 = minimal_bundles(profile.prefs[1], ground, profile.claims_for(2), agent=2)
    differ = not mb1.same_sets(mb2)
    problems = []
    try:
        simp = simplified_undercut(profile)
        sv = simp.classification
    except Exception as e:  # tallied, never fatal
        simp, sv = None, "error"
        problems.append(f"simplified raised {type(e).__name__}: {e}")
    try:
        orig = original_undercut(profile, tie_break="index")
        ov = orig.classification
        ties = sum(1 for ev in orig.trace if type(ev).__name__ == "TieBroken")
    except Exception as e:
        orig, ov, ties = None, "error", 0
        problems.append(f"original raised {type(e).__name__}: {e}")
    for name, out in (("simplified", simp), ("original", orig)):
        if out is not None and out.split is not None:
            got = classify_split(profile, out.split).verdict
            if got != out.classification:
                problems.append(f"{name} claims {out.classification} but split is {got}")
    if simp is not None and simp.found != ef_exists:
        problems.append(f"simplified {sv} but oracle ef_exists={ef_exists}")
    if profile.claims[0] == profile.claims[1] and differ != nontrivial:
        problems.append(f"families_differ={differ} but nontrivial_exists={nontrivial}")
    if orig is not None and simp is not None and orig.found and not simp.found:
        problems.append("original found a split the simplified procedure missed")
    return ProfileResult(seed, profile.n, ef_exists, nontrivial, differ, sv, ov, ties, tuple(problems))


@dataclass
class ComparisonStats:
    total: int = 0
    ef_exists: int = 0
    simplified_found: int = 0
    original_found: int = 0
    original_deadlocks_with_ef_existing: int = 0
    ties_broken: int = 0
    errors: int = 0
    disagreements: list = field(default_factory=list)

    def add(self, r: ProfileResult) -> None:
        self.total += 1
        self.ef_exists += r.ef_exists
        self.simplified_found += r.simplified_verdict in ("ef_trivial", "ef_nontrivial")
        self.original_found += r.original_verdict in ("ef_trivial", "ef_nontrivial")
        self.original_deadlocks_with_ef_existing += r.original_verdict == "deadlock" and r.ef_exists
        self.ties_broken += r.ties_broken
        self.errors += "error" in (r.simplified_verdict, r.original_verdict)
        if r.problems:
            self.disagreements.append(r.seed)

    def merge(self, other: ComparisonStats) -> ComparisonStats:
        out = ComparisonStats()
        for name in ("total", "ef_exists", "simplified_found", "original_found",
                     "original_deadlocks_with_ef_existing", "ties_broken", "errors"):
            setattr(out, name, getattr(self, name) + getattr(other, name))
        out.disagreements = self.disagreements + other.disagreements
        return out


def run_batch(config: BatchConfig, fixtures: Iterable[Profile] = ()) -> tuple[ComparisonStats, list[ProfileResult]]:
    stats = ComparisonStats()
    results = []
    for i in range(config.count):
        seed = profile_seed(config.seed, i)
        r = evaluate_profile(config.profile(seed), seed)
        stats.add(r)
        results.append(r)
    for profile in fixtures:
        r = evaluate_profile(profile, None)
        stats.add(r)
        results.append(r)
    return stats, results


def compare_procedures(config: BatchConfig, fixtures: Iterable[Profile] = ()) -> ComparisonStats:
    """Tally oracle / simplified / original results over a seeded batch.

    ``fixtures`` are extra hand-made profiles evaluated after the random ones;
    they appear in ``disagreements`` as ``None`` seeds.
    """
    return run_batch(config, fixtures)[0]


def format_stats(stats: ComparisonStats, config: BatchConfig | None = None) -> str:
    lines = []
    if config is not None:
        lines += [
            f"generator={config.generator}",
            f"objects={config.n}",
            f"seed={config.seed}",
            f"claims={config.claims[0]}:{config.claims[1]}",
        ]
    lines += [
        f"total={stats.total}",
        f"ef_exists={stats.ef_exists}",
        f"simplified_found={stats.simplified_found}",
        f"original_found={stats.original_found}",
        f"original_deadlocks_with_ef_existing={stats.original_deadlocks_with_ef_existing}",
        f"ties_broken={stats.ties_broken}",
        f"errors={stats.errors}",
        f"disagreements={len(stats.disagreements)}",
        "disagreement_seeds=" + ",".join("fixture" if s is None else str(s) for s in stats.disagreements),
    ]
    return "\n".join(lines) + "\n"


CSV_COLUMNS = ("seed", "n", "ef_exists", "simplified_verdict", "original_verdict", "ties_broken")


def results_csv(results: Sequence[ProfileResult]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in results:
        w.writerow(["" if r.seed is None else r.seed, r.n, int(r.ef_exists), r.simplified_verdict,
                    r.original_verdict, r.ties_broken])
    return buf.getvalue()
