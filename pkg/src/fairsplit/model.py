"""Object universes, subsets, integer preference models and profile I/O.

Subsets are bitmasks over universe indices. Preferences over subsets are
exact non-negative integer utilities, either additive (one value per object)
or an explicit table with one entry per subset.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np

MAX_OBJECTS = 24
MAX_TABLE_OBJECTS = 12
_INT64_SAFE = 1 << 62


class ParseError(ValueError):
    """The profile document is not well-formed JSON of the expected shape."""


class ValidationError(ValueError):
    """The document parses but violates a profile invariant."""

    def __init__(self, message: str, location: str | None = None):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def bits(mask: int) -> Iterator[int]:
    """Yield indices of set bits in increasing order."""
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


def canonical_key(mask: int) -> tuple[int, tuple[int, ...]]:
    """Sort key: size first, then lexicographic on member indices."""
    return popcount(mask), tuple(bits(mask))


def submasks(mask: int) -> Iterator[int]:
    """All submasks of ``mask``, including ``mask`` and 0."""
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


@dataclass(frozen=True)
class ObjectSet:
    """A subset of an ``n``-object universe stored as a characteristic bitmask."""

    mask: int
    n: int

    def __post_init__(self):
        if self.mask < 0 or self.mask >> self.n:
            raise ValueError(f"mask {self.mask:#x} has members outside 0..{self.n - 1}")

    @classmethod
    def of(cls, indices: Iterable[int], n: int) -> ObjectSet:
        mask = 0
        for i in indices:
            mask |= 1 << i
        return cls(mask, n)

    @classmethod
    def full(cls, n: int) -> ObjectSet:
        return cls((1 << n) - 1, n)

    @classmethod
    def empty(cls, n: int) -> ObjectSet:
        return cls(0, n)

    def members(self) -> tuple[int, ...]:
        return tuple(bits(self.mask))

    def __iter__(self) -> Iterator[int]:
        return bits(self.mask)

    def __len__(self) -> int:
        return popcount(self.mask)

    def __contains__(self, i: object) -> bool:
        return isinstance(i, int) and 0 <= i < self.n and bool(self.mask >> i & 1)

    def _check(self, other: ObjectSet) -> None:
        if self.n != other.n:
            raise ValueError("object sets belong to universes of different size")

    def __or__(self, other: ObjectSet) -> ObjectSet:
        self._check(other)
        return ObjectSet(self.mask | other.mask, self.n)

    def __and__(self, other: ObjectSet) -> ObjectSet:
        self._check(other)
        return ObjectSet(self.mask & other.mask, self.n)

    def __sub__(self, other: ObjectSet) -> ObjectSet:
        self._check(other)
        return ObjectSet(self.mask & ~other.mask, self.n)

    def issubset(self, other: ObjectSet) -> bool:
        self._check(other)
        return self.mask & ~other.mask == 0

    def complement(self, ground: ObjectSet | None = None) -> ObjectSet:
        """``ground \\ self``; ground defaults to the whole universe."""
        if ground is None:
            ground = ObjectSet.full(self.n)
        if not self.issubset(ground):
            raise ValueError("set is not contained in the ground set")
        return ground - self

    def canonical_key(self) -> tuple[int, tuple[int, ...]]:
        return canonical_key(self.mask)


@dataclass(frozen=True)
class ObjectUniverse:
    names: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        if not 1 <= len(self.names) <= MAX_OBJECTS:
            raise ValidationError(f"number of objects must be in 1..{MAX_OBJECTS}, got {len(self.names)}", "objects")
        for name in self.names:
            if not isinstance(name, str) or not name:
                raise ValidationError(f"object labels must be non-empty strings, got {name!r}", "objects")
        if len(set(self.names)) != len(self.names):
            dup = next(x for x in self.names if self.names.count(x) > 1)
            raise ValidationError(f"duplicate object label {dup!r}", "objects")

    @property
    def n(self) -> int:
        return len(self.names)

    @cached_property
    def _index(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.names)}

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise KeyError(f"unknown object {label!r}") from None

    def set(self, labels: Iterable[str]) -> ObjectSet:
        return ObjectSet.of((self.index(x) for x in labels), self.n)

    def full(self) -> ObjectSet:
        return ObjectSet.full(self.n)

    def empty(self) -> ObjectSet:
        return ObjectSet.empty(self.n)

    def labels(self, s: ObjectSet) -> list[str]:
        return [self.names[i] for i in s]

    def format(self, s: ObjectSet) -> str:
        """Render as ``{a,d}`` with labels in declared order."""
        return "{" + ",".join(_quote_label(x) for x in self.labels(s)) + "}"


def _quote_label(label: str) -> str:
    if all(ch.isalnum() or ch in "_-.:" for ch in label):
        return label
    return json.dumps(label)


def _array(values: Sequence[int], bound: int) -> np.ndarray:
    # int64 when products with claims cannot overflow, Python ints otherwise
    if bound < _INT64_SAFE:
        return np.asarray(values, dtype=np.int64)
    return np.asarray(list(values), dtype=object)


@dataclass(frozen=True)
class PreferenceModel:
    """Cardinal utility over subsets of an ``n``-object universe.

    ``kind == "additive"``: ``values[i]`` is the value of object ``i`` and
    ``u(S)`` is the sum over members. ``kind == "table"``: ``table[mask]`` is
    ``u`` of the subset with that bitmask (``2**n`` entries, ``table[0] == 0``).
    """

    kind: str
    n: int
    values: tuple[int, ...] | None = None
    table: tuple[int, ...] | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind == "additive":
            if self.values is None or len(self.values) != self.n:
                raise ValidationError("additive preference needs one value per object")
            if not 1 <= self.n <= MAX_OBJECTS:
                raise ValidationError(f"additive preference supports 1..{MAX_OBJECTS} objects")
            object.__setattr__(self, "values", tuple(self.values))
            _check_utilities(self.values)
        elif self.kind == "table":
            if not 1 <= self.n <= MAX_TABLE_OBJECTS:
                raise ValidationError(f"table preference supports 1..{MAX_TABLE_OBJECTS} objects, got {self.n}")
            if self.table is None or len(self.table) != 1 << self.n:
                raise ValidationError(f"table preference needs exactly {1 << self.n} entries")
            object.__setattr__(self, "table", tuple(self.table))
            _check_utilities(self.table)
            if self.table[0] != 0:
                raise ValidationError("utility of the empty set must be 0")
        else:
            raise ValidationError(f"unknown preference kind {self.kind!r}")

    @classmethod
    def additive(cls, values: Sequence[int]) -> PreferenceModel:
        return cls("additive", len(values), values=tuple(values))

    @classmethod
    def from_table(cls, table: Sequence[int]) -> PreferenceModel:
        n = len(table).bit_length() - 1
        if len(table) != 1 << n:
            raise ValidationError(f"table length {len(table)} is not a power of two")
        return cls("table", n, table=tuple(table))

    def utility(self, s: ObjectSet | int) -> int:
        mask = s.mask if isinstance(s, ObjectSet) else s
        if self.kind == "additive":
            return sum(self.values[i] for i in bits(mask))
        return self.table[mask]

    @cached_property
    def max_utility(self) -> int:
        if self.kind == "additive":
            return sum(self.values)
        return max(self.table)

    def singleton(self, i: int) -> int:
        return self.utility(1 << i)

    def subset_utilities(self, ground: ObjectSet | int | None = None, scale: int = 1) -> np.ndarray:
        """Utilities of every subset of ``ground``, indexed by local bitmask.

        Local bit ``j`` stands for the ``j``-th member of ``ground`` in index
        order, so local index ``2**k - 1 - m`` is the complement of ``m``.
        ``scale`` only sizes the dtype so that products up to ``scale`` fit.
        """
        if ground is None:
            gmask = (1 << self.n) - 1
        else:
            gmask = ground.mask if isinstance(ground, ObjectSet) else ground
        members = list(bits(gmask))
        k = len(members)
        bound = self.max_utility * max(scale, 1)
        if self.kind == "additive":
            vals = _array([self.values[i] for i in members], bound)
            u = np.zeros(1 << k, dtype=vals.dtype)
            for j in range(k):
                u[1 << j:2 << j] = u[:1 << j] + vals[j]
            return u
        glob = np.zeros(1 << k, dtype=np.int64)
        for j, i in enumerate(members):
            glob[1 << j:2 << j] = glob[:1 << j] | (1 << i)
        return _array(self.table, bound)[glob]

    def to_table(self) -> PreferenceModel:
        if self.kind == "table":
            return self
        return PreferenceModel.from_table([int(x) for x in self.subset_utilities()])

    @cached_property
    def separable(self) -> bool:
        return is_separable(self).holds


def _check_utilities(values: Iterable[int]) -> None:
    for v in values:
        if isinstance(v, bool) or not isinstance(v, (int, np.integer)):
            raise ValidationError(f"utilities must be integers, got {v!r}")
        if v < 0:
            raise ValidationError(f"utilities must be non-negative, got {v}")


@dataclass(frozen=True)
class Profile:
    universe: ObjectUniverse
    prefs: tuple[PreferenceModel, PreferenceModel]
    claims: tuple[int, int] = (1, 1)
    agent_names: tuple[str, str] = ("1", "2")

    def __post_init__(self):
        object.__setattr__(self, "prefs", tuple(self.prefs))
        object.__setattr__(self, "claims", tuple(self.claims))
        object.__setattr__(self, "agent_names", tuple(self.agent_names))
        if len(self.prefs) != 2 or len(self.claims) != 2 or len(self.agent_names) != 2:
            raise ValidationError("a profile has exactly two agents")
        for k, p in enumerate(self.prefs):
            if p.n != self.universe.n:
                raise ValidationError("preference is defined over a different universe", f"agents[{k}].preference")
        for k, c in enumerate(self.claims):
            if isinstance(c, bool) or not isinstance(c, int) or c < 1:
                raise ValidationError("claims must be positive", f"agents[{k}].claim")

    @property
    def n(self) -> int:
        return self.universe.n

    def pref(self, agent: int) -> PreferenceModel:
        return self.prefs[agent - 1]

    def claims_for(self, agent: int) -> tuple[int, int]:
        """``(own claim, other agent's claim)``."""
        return self.claims[agent - 1], self.claims[2 - agent]

    def with_claims(self, claims: tuple[int, int]) -> Profile:
        return Profile(self.universe, self.prefs, claims, self.agent_names)


def other(agent: int) -> int:
    return 3 - agent


def utility(pref: PreferenceModel, s: ObjectSet) -> int:
    return pref.utility(s)


def compare(pref: PreferenceModel, a: ObjectSet, b: ObjectSet) -> str:
    """One of ``"A_strictly_preferred"``, ``"indifferent"``, ``"B_strictly_preferred"``."""
    ua, ub = pref.utility(a), pref.utility(b)
    if ua > ub:
        return "A_strictly_preferred"
    if ua < ub:
        return "B_strictly_preferred"
    return "indifferent"


# -- validators --------------------------------------------------------------


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of a preference-class check.

    ``witness`` is ``None`` when the property holds. Otherwise it names the
    violation: ``{"object": x}`` for desirability, ``{"object": x, "set": S}``
    for separability and ``{"set": S, "x": x, "y": y}`` for responsiveness.
    """

    property: str
    holds: bool
    witness: dict | None = None


def all_desirable(pref: PreferenceModel) -> ValidationReport:
    for i in range(pref.n):
        if pref.singleton(i) <= 0:
            return ValidationReport("all_desirable", False, {"object": i})
    return ValidationReport("all_desirable", True)


def _canonical_masks(n: int, exclude: int = 0) -> list[int]:
    return sorted((m for m in range(1 << n) if not m & exclude), key=canonical_key)


def _sign(x):
    if isinstance(x, np.ndarray):
        return (x > 0).astype(np.int8) - (x < 0).astype(np.int8)
    return (x > 0) - (x < 0)


def is_separable(pref: PreferenceModel) -> ValidationReport:
    """``u({x}) > 0`` iff adding ``x`` to any set strictly helps; ``u({x}) = 0`` iff it never changes ``u``."""
    n = pref.n
    if pref.kind == "additive" and n > MAX_TABLE_OBJECTS:
        # u(S+x) - u(S) == v_x for every S
        return ValidationReport("separable", True)
    u = pref.subset_utilities()
    idx = np.arange(1 << n)
    for x in range(n):
        bit = 1 << x
        without = idx[(idx & bit) == 0]
        diff = u[without | bit] - u[without]
        bad = _sign(diff) != _sign(int(u[bit]))
        if bad.any():
            s = min((int(m) for m in without[bad]), key=canonical_key)
            return ValidationReport("separable", False, {"object": x, "set": ObjectSet(s, n)})
    return ValidationReport("separable", True)


def is_responsive(pref: PreferenceModel) -> ValidationReport:
    """Swapping in an individually better object never makes a set worse, and ``pref`` is separable."""
    n = pref.n
    if pref.kind == "additive" and n > MAX_TABLE_OBJECTS:
        # u(S+x) - u(S+y) == v_x - v_y for every S
        return ValidationReport("responsive", True)
    u = pref.subset_utilities()
    idx = np.arange(1 << n)
    first: tuple | None = None
    for x in range(n):
        for y in range(n):
            if x == y:
                continue
            bx, by = 1 << x, 1 << y
            free = idx[(idx & (bx | by)) == 0]
            lhs = u[free | bx] >= u[free | by]
            rhs = bool(u[bx] >= u[by])
            bad = lhs != rhs
            if bad.any():
                s = min((int(m) for m in free[bad]), key=canonical_key)
                cand = (canonical_key(s), x, y, s)
                if first is None or cand < first:
                    first = cand
    if first is not None:
        _, x, y, s = first
        return ValidationReport("responsive", False, {"set": ObjectSet(s, n), "x": x, "y": y})
    sep = is_separable(pref)
    if not sep.holds:
        return ValidationReport("responsive", False, sep.witness)
    return ValidationReport("responsive", True)


def restrict(pref: PreferenceModel, pile: ObjectSet) -> PreferenceModel:
    """The preference seen on subsets of ``pile``, re-indexed over its members in order."""
    if pref.kind == "additive":
        return PreferenceModel.additive([pref.values[i] for i in pile])
    return PreferenceModel.from_table([int(x) for x in pref.subset_utilities(pile)])


def restrict_profile(profile: Profile, pile: ObjectSet) -> Profile:
    universe = ObjectUniverse(tuple(profile.universe.labels(pile)))
    return Profile(universe, tuple(restrict(p, pile) for p in profile.prefs), profile.claims, profile.agent_names)


def lift(local: ObjectSet, pile: ObjectSet) -> ObjectSet:
    """Map a subset of ``restrict``'s sub-universe back to the parent universe."""
    members = pile.members()
    return ObjectSet.of((members[j] for j in local), pile.n)


# -- profile documents -------------------------------------------------------


def _require(obj, key, typ, where):
    if not isinstance(obj, dict) or key not in obj:
        raise ParseError(f"{where}: missing {key!r}")
    val = obj[key]
    if not isinstance(val, typ) or isinstance(val, bool) and typ is not bool:
        raise ParseError(f"{where}.{key}: expected {getattr(typ, '__name__', typ)}")
    return val


def _parse_preference(doc, universe: ObjectUniverse, where: str) -> PreferenceModel:
    kind = _require(doc, "kind", str, where)
    n = universe.n
    if kind == "additive":
        values = _require(doc, "values", dict, where)
        for label in values:
            if label not in universe.names:
                raise ValidationError(f"unknown object {label!r}", f"{where}.values")
        missing = [x for x in universe.names if x not in values]
        if missing:
            raise ValidationError(f"missing value for object {missing[0]!r}", f"{where}.values")
        vals = [values[x] for x in universe.names]
        try:
            return PreferenceModel.additive(vals)
        except ValidationError as e:
            raise ValidationError(str(e), f"{where}.values") from None
    if kind == "table":
        if n > MAX_TABLE_OBJECTS:
            raise ValidationError(f"table preference supports at most {MAX_TABLE_OBJECTS} objects", where)
        entries = _require(doc, "entries", list, where)
        table: list[int | None] = [None] * (1 << n)
        for k, entry in enumerate(entries):
            loc = f"{where}.entries[{k}]"
            if not (isinstance(entry, list) and len(entry) == 2 and isinstance(entry[0], list)):
                raise ParseError(f"{loc}: expected [[labels...], utility]")
            labels, value = entry
            try:
                s = universe.set(labels)
            except KeyError as e:
                raise ValidationError(str(e.args[0]), loc) from None
            if len(s) != len(labels):
                raise ValidationError("subset lists an object twice", loc)
            if table[s.mask] is not None:
                raise ValidationError(f"duplicate entry for {universe.format(s)}", loc)
            if isinstance(value, bool) or not isinstance(value, int):
                raise ValidationError(f"utilities must be integers, got {value!r}", loc)
            if value < 0:
                raise ValidationError(f"utilities must be non-negative, got {value}", loc)
            table[s.mask] = value
        for mask in _canonical_masks(n):
            if table[mask] is None:
                raise ValidationError(f"missing entry for subset {universe.format(ObjectSet(mask, n))}", f"{where}.entries")
        if table[0] != 0:
            raise ValidationError("utility of the empty set must be 0", f"{where}.entries")
        return PreferenceModel.from_table(table)
    raise ValidationError(f"unknown preference kind {kind!r}", f"{where}.kind")


def parse_profile(text: str) -> Profile:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e}") from None
    if not isinstance(doc, dict):
        raise ParseError("profile document must be a JSON object")
    objects = _require(doc, "objects", list, "profile")
    universe = ObjectUniverse(tuple(objects))
    agents = _require(doc, "agents", list, "profile")
    if len(agents) != 2:
        raise ValidationError(f"exactly two agents required, got {len(agents)}", "agents")
    prefs, claims, names = [], [], []
    for k, agent in enumerate(agents):
        where = f"agents[{k}]"
        if not isinstance(agent, dict):
            raise ParseError(f"{where}: expected an object")
        names.append(str(agent.get("name", k + 1)))
        claim = agent.get("claim", 1)
        if isinstance(claim, bool) or not isinstance(claim, int):
            raise ValidationError("claims must be positive integers", f"{where}.claim")
        if claim < 1:
            raise ValidationError("claims must be positive", f"{where}.claim")
        claims.append(claim)
        prefs.append(_parse_preference(_require(agent, "preference", dict, where), universe, f"{where}.preference"))
    return Profile(universe, tuple(prefs), tuple(claims), tuple(names))


def load_profile(path) -> Profile:
    with open(path, encoding="utf-8") as f:
        return parse_profile(f.read())


def profile_document(profile: Profile) -> dict:
    universe = profile.universe
    agents = []
    for k, pref in enumerate(profile.prefs):
        if pref.kind == "additive":
            pdoc = {"kind": "additive", "values": dict(zip(universe.names, pref.values))}
        else:
            entries = [[universe.labels(ObjectSet(m, universe.n)), pref.table[m]] for m in _canonical_masks(universe.n)]
            pdoc = {"kind": "table", "entries": entries}
        agents.append({"name": profile.agent_names[k], "claim": profile.claims[k], "preference": pdoc})
    return {"objects": list(universe.names), "agents": agents}


def serialize_profile(profile: Profile) -> str:
    """Canonical JSON text; table entries one per line in canonical subset order."""
    doc = profile_document(profile)
    lines = ["{", f'  "objects": {json.dumps(doc["objects"])},', '  "agents": [']
    for k, agent in enumerate(doc["agents"]):
        pdoc = agent["preference"]
        head = f'    {{"name": {json.dumps(agent["name"])}, "claim": {agent["claim"]},'
        if pdoc["kind"] == "additive":
            body = f'     "preference": {{"kind": "additive", "values": {json.dumps(pdoc["values"])}}}}}'
            lines += [head, body]
        else:
            lines += [head, '     "preference": {"kind": "table", "entries": [']
            entries = [f"       {json.dumps(e)}" for e in pdoc["entries"]]
            lines.append(",\n".join(entries))
            lines.append("     ]}}")
        if k == 0:
            lines[-1] += ","
    lines += ["  ]", "}"]
    return "\n".join(lines) + "\n"
