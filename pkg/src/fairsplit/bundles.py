"""Claims-weighted acceptability and minimal-bundle enumeration.

A set ``S`` inside a ground set ``G`` is acceptable to an agent with claims
``(own, other)`` when ``other * u(S) >= own * u(G - S)``. With equal claims
this is "S is weakly preferred to its complement". A minimal bundle is an
acceptable set none of whose proper subsets is acceptable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import ObjectSet, PreferenceModel, bits, canonical_key, submasks

Claims = tuple[int, int]


def is_acceptable(pref: PreferenceModel, s: ObjectSet, ground: ObjectSet, claims: Claims = (1, 1)) -> bool:
    own, oth = claims
    if not s.issubset(ground):
        raise ValueError("set is not contained in the ground set")
    return oth * pref.utility(s) >= own * pref.utility(ground - s)


def is_minimal_bundle(pref: PreferenceModel, s: ObjectSet, ground: ObjectSet, claims: Claims = (1, 1)) -> bool:
    if not is_acceptable(pref, s, ground, claims):
        return False
    for t in submasks(s.mask):
        if t != s.mask and is_acceptable(pref, ObjectSet(t, s.n), ground, claims):
            return False
    return True


@dataclass(frozen=True)
class MinimalBundleFamily:
    agent: int
    ground: ObjectSet
    bundles: tuple[ObjectSet, ...]

    def masks(self) -> frozenset[int]:
        return frozenset(b.mask for b in self.bundles)

    def __contains__(self, s: object) -> bool:
        return isinstance(s, ObjectSet) and s.mask in self.masks()

    def __len__(self) -> int:
        return len(self.bundles)

    def __iter__(self):
        return iter(self.bundles)

    def same_sets(self, other: MinimalBundleFamily) -> bool:
        """Set equality of the two families, ignoring which agent owns them."""
        return self.masks() == other.masks()


def acceptable_vector(pref: PreferenceModel, ground: ObjectSet, claims: Claims = (1, 1)) -> np.ndarray:
    """Boolean acceptability of every subset of ``ground``, indexed by local bitmask."""
    own, oth = claims
    u = pref.subset_utilities(ground, scale=max(own, oth))
    return oth * u >= own * u[::-1]


def _or_over_removals(flags: np.ndarray, k: int) -> np.ndarray:
    """``out[S] = any(flags[S - {x}] for x in S)``."""
    out = np.zeros_like(flags)
    for j in range(k):
        view_in = flags.reshape(-1, 2, 1 << j)
        view_out = out.reshape(-1, 2, 1 << j)
        view_out[:, 1, :] |= view_in[:, 0, :]
    return out


def _down_closure(flags: np.ndarray, k: int) -> np.ndarray:
    """``out[S] = any(flags[T] for T subset of S)``."""
    out = flags.copy()
    for j in range(k):
        view = out.reshape(-1, 2, 1 << j)
        view[:, 1, :] |= view[:, 0, :]
    return out


def _minimal_local(acc: np.ndarray, k: int, upward_closed: bool) -> np.ndarray:
    if upward_closed:
        # any acceptable proper subset lies below some one-element removal
        return acc & ~_or_over_removals(acc, k)
    return acc & ~_or_over_removals(_down_closure(acc, k), k)


def _to_global(local_masks, ground: ObjectSet) -> list[int]:
    members = ground.members()
    out = []
    for lm in local_masks:
        g = 0
        for j in bits(int(lm)):
            g |= 1 << members[j]
        out.append(g)
    return out


def minimal_bundles(
    pref: PreferenceModel,
    ground: ObjectSet,
    claims: Claims = (1, 1),
    agent: int = 1,
    method: str = "auto",
) -> MinimalBundleFamily:
    """Every minimal bundle of ``pref`` over ``ground``, in canonical order.

    ``method="auto"`` uses the pruned search when ``pref`` is separable
    (acceptability is then upward closed) and the full definitional scan
    otherwise. ``"pruned"`` and ``"definitional"`` force one path.
    """
    if len(ground) == 0:
        raise ValueError("ground set must be non-empty")
    k = len(ground)
    if method == "auto":
        upward = pref.separable
    elif method in ("pruned", "definitional"):
        upward = method == "pruned"
    else:
        raise ValueError(f"unknown method {method!r}")
    acc = acceptable_vector(pref, ground, claims)
    local = np.flatnonzero(_minimal_local(acc, k, upward))
    masks = sorted(_to_global(local, ground), key=canonical_key)
    return MinimalBundleFamily(agent, ground, tuple(ObjectSet(m, ground.n) for m in masks))
