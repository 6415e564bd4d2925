"""Exhaustive envy-freeness oracle over all splits of the universe.

Kept deliberately naive: every split is classified from utilities alone,
with no reference to minimal bundles or the undercut procedures.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import ObjectSet, Profile, canonical_key

MAX_ORACLE_OBJECTS = 20


class SizeLimit(ValueError):
    pass


@dataclass(frozen=True)
class Split:
    to_agent1: ObjectSet
    to_agent2: ObjectSet

    def __post_init__(self):
        a, b = self.to_agent1, self.to_agent2
        if a.n != b.n or a.mask & b.mask:
            raise ValueError("split sides must be disjoint subsets of one universe")

    @classmethod
    def of(cls, s: ObjectSet, ground: ObjectSet | None = None) -> Split:
        """Agent 1 gets ``s``, agent 2 the rest of ``ground``."""
        return cls(s, s.complement(ground))

    def side(self, agent: int) -> ObjectSet:
        return self.to_agent1 if agent == 1 else self.to_agent2

    @property
    def ground(self) -> ObjectSet:
        return self.to_agent1 | self.to_agent2


@dataclass(frozen=True)
class SplitClassification:
    split: Split
    agent1_relation: str
    agent2_relation: str
    verdict: str


def _relation(own_claim: int, other_claim: int, u_own: int, u_other: int) -> str:
    lhs, rhs = other_claim * u_own, own_claim * u_other
    if lhs > rhs:
        return "strictly_prefers_own"
    if lhs == rhs:
        return "indifferent"
    return "envies"


def _verdict(r1: str, r2: str) -> str:
    if "envies" in (r1, r2):
        return "not_ef"
    if r1 == r2 == "indifferent":
        return "ef_trivial"
    return "ef_nontrivial"


def classify_split(profile: Profile, split: Split) -> SplitClassification:
    """Claims-weighted envy check: agent ``i`` is fine when ``c_other*u_i(own) >= c_i*u_i(other)``."""
    if split.ground.mask != (1 << profile.n) - 1:
        raise ValueError("split must partition the whole universe")
    rel = []
    for agent in (1, 2):
        own, oth = profile.claims_for(agent)
        pref = profile.pref(agent)
        rel.append(_relation(own, oth, pref.utility(split.side(agent)), pref.utility(split.side(3 - agent))))
    return SplitClassification(split, rel[0], rel[1], _verdict(*rel))


def _relations_vector(own: int, oth: int, u_own: np.ndarray, u_other: np.ndarray) -> np.ndarray:
    lhs, rhs = oth * u_own, own * u_other
    return np.where(lhs > rhs, 2, np.where(lhs == rhs, 1, 0))


_REL_NAMES = ("envies", "indifferent", "strictly_prefers_own")


def enumerate_ef_splits(profile: Profile) -> list[SplitClassification]:
    """All envy-free splits, ordered canonically by agent 1's side."""
    n = profile.n
    if n > MAX_ORACLE_OBJECTS:
        raise SizeLimit(f"oracle supports at most {MAX_ORACLE_OBJECTS} objects, got {n}")
    c1, c2 = profile.claims
    scale = max(c1, c2)
    u1 = profile.prefs[0].subset_utilities(scale=scale)
    u2 = profile.prefs[1].subset_utilities(scale=scale)
    # index m is agent 1's side; index full^m == reversed position is agent 2's side
    r1 = _relations_vector(c1, c2, u1, u1[::-1])
    r2 = _relations_vector(c2, c1, u2[::-1], u2)
    ok = np.flatnonzero((r1 > 0) & (r2 > 0))
    full = (1 << n) - 1
    out = []
    for m in sorted((int(x) for x in ok), key=canonical_key):
        a, b = _REL_NAMES[r1[m]], _REL_NAMES[r2[m]]
        split = Split(ObjectSet(m, n), ObjectSet(full ^ m, n))
        out.append(SplitClassification(split, a, b, _verdict(a, b)))
    return out


def exists_ef(profile: Profile) -> bool:
    return bool(enumerate_ef_splits(profile))


def exists_nontrivial_ef(profile: Profile) -> bool:
    return any(c.verdict == "ef_nontrivial" for c in enumerate_ef_splits(profile))
