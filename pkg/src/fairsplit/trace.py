"""Step-by-step record of an undercut run.

Text form is one event per line::

    START procedure=original first=1
    GEN pick agent=1 object=a
    GEN contested object=c
    PILE set={c,d}
    MB agent=1 bundles=[{c}]
    VERDICT deadlock

The structured form is a JSON list with one object per event, using object
labels the same way profile documents do.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Union

from .model import ObjectSet, ObjectUniverse, _quote_label


class TraceFormatError(ValueError):
    pass


@dataclass(frozen=True)
class Start:
    procedure: str
    first: int


@dataclass(frozen=True)
class GenerationPick:
    agent: int
    obj: int


@dataclass(frozen=True)
class TieBroken:
    agent: int
    tied: ObjectSet
    chosen: int


@dataclass(frozen=True)
class Contested:
    obj: int


@dataclass(frozen=True)
class ContestedPile:
    pile: ObjectSet


@dataclass(frozen=True)
class MinimalBundlesComputed:
    agent: int
    bundles: tuple[ObjectSet, ...]


@dataclass(frozen=True)
class ProposalSelected:
    proposer: int
    bundle: ObjectSet


@dataclass(frozen=True)
class ComplementPair:
    """Shared family holds ``bundle`` and its complement; agent 1 takes ``bundle``."""

    bundle: ObjectSet


@dataclass(frozen=True)
class Accepted:
    responder: int


@dataclass(frozen=True)
class Undercut:
    responder: int
    bundle: ObjectSet


@dataclass(frozen=True)
class Note:
    text: str


@dataclass(frozen=True)
class Verdict:
    classification: str


Event = Union[
    Start, GenerationPick, TieBroken, Contested, ContestedPile, MinimalBundlesComputed,
    ProposalSelected, ComplementPair, Accepted, Undercut, Note, Verdict,
]
Trace = tuple  # tuple[Event, ...]


def format_event(event: Event, universe: ObjectUniverse) -> str:
    fmt = universe.format
    name = lambda i: _quote_label(universe.names[i])  # noqa: E731
    if isinstance(event, Start):
        return f"START procedure={event.procedure} first={event.first}"
    if isinstance(event, GenerationPick):
        return f"GEN pick agent={event.agent} object={name(event.obj)}"
    if isinstance(event, TieBroken):
        return f"GEN tie agent={event.agent} objects={fmt(event.tied)} chosen={name(event.chosen)}"
    if isinstance(event, Contested):
        return f"GEN contested object={name(event.obj)}"
    if isinstance(event, ContestedPile):
        return f"PILE set={fmt(event.pile)}"
    if isinstance(event, MinimalBundlesComputed):
        return f"MB agent={event.agent} bundles=[{','.join(fmt(b) for b in event.bundles)}]"
    if isinstance(event, ProposalSelected):
        return f"PROPOSE agent={event.proposer} set={fmt(event.bundle)}"
    if isinstance(event, ComplementPair):
        return f"PAIR set={fmt(event.bundle)}"
    if isinstance(event, Accepted):
        return f"ACCEPT agent={event.responder}"
    if isinstance(event, Undercut):
        return f"UNDERCUT agent={event.responder} set={fmt(event.bundle)}"
    if isinstance(event, Note):
        return f"NOTE {event.text}"
    if isinstance(event, Verdict):
        return f"VERDICT {event.classification}"
    raise TypeError(f"not a trace event: {event!r}")


def format_trace(trace: Trace, universe: ObjectUniverse) -> str:
    return "\n".join(format_event(e, universe) for e in trace)


_TOKEN = re.compile(r'"(?:[^"\\]|\\.)*"|[^,{}\[\]\s"]+')


def _label(tok: str) -> str:
    return json.loads(tok) if tok.startswith('"') else tok


def _parse_set(text: str, universe: ObjectUniverse) -> ObjectSet:
    text = text.strip()
    if not (text.startswith("{") and text.endswith("}")):
        raise TraceFormatError(f"expected a set like {{a,b}}, got {text!r}")
    try:
        return universe.set(_label(t) for t in _TOKEN.findall(text[1:-1]))
    except KeyError as e:
        raise TraceFormatError(str(e.args[0])) from None


def _parse_sets(text: str, universe: ObjectUniverse) -> tuple[ObjectSet, ...]:
    text = text.strip()
    if not (text.startswith("[") and text.endswith("]")):
        raise TraceFormatError(f"expected a list of sets, got {text!r}")
    return tuple(_parse_set(m.group(0), universe) for m in re.finditer(r'\{(?:"(?:[^"\\]|\\.)*"|[^}"])*\}', text))


def _fields(rest: str) -> dict[str, str]:
    out = {}
    for m in re.finditer(r'(\w+)=(\[.*?\](?=\s+\w+=|$)|\{.*?\}(?=\s+\w+=|$)|"(?:[^"\\]|\\.)*"|\S+)', rest):
        out[m.group(1)] = m.group(2)
    return out


def _agent(value: str) -> int:
    if value not in ("1", "2"):
        raise TraceFormatError(f"agent must be 1 or 2, got {value!r}")
    return int(value)


def parse_event(line: str, universe: ObjectUniverse) -> Event:
    line = line.strip()
    head, _, rest = line.partition(" ")
    if head == "NOTE":
        return Note(rest)
    if head == "VERDICT":
        return Verdict(rest.strip())
    if head == "GEN":
        kind, _, rest = rest.partition(" ")
    else:
        kind = None
    f = _fields(rest)
    obj = lambda key: universe.index(_label(f[key]))  # noqa: E731
    try:
        if head == "START":
            return Start(f["procedure"], _agent(f["first"]))
        if head == "GEN" and kind == "pick":
            return GenerationPick(_agent(f["agent"]), obj("object"))
        if head == "GEN" and kind == "tie":
            return TieBroken(_agent(f["agent"]), _parse_set(f["objects"], universe), obj("chosen"))
        if head == "GEN" and kind == "contested":
            return Contested(obj("object"))
        if head == "PILE":
            return ContestedPile(_parse_set(f["set"], universe))
        if head == "MB":
            return MinimalBundlesComputed(_agent(f["agent"]), _parse_sets(f["bundles"], universe))
        if head == "PROPOSE":
            return ProposalSelected(_agent(f["agent"]), _parse_set(f["set"], universe))
        if head == "PAIR":
            return ComplementPair(_parse_set(f["set"], universe))
        if head == "ACCEPT":
            return Accepted(_agent(f["agent"]))
        if head == "UNDERCUT":
            return Undercut(_agent(f["agent"]), _parse_set(f["set"], universe))
    except KeyError as e:
        raise TraceFormatError(f"bad trace line {line!r}: {e}") from None
    raise TraceFormatError(f"unrecognized trace line {line!r}")


def parse_trace(text: str, universe: ObjectUniverse) -> Trace:
    return tuple(parse_event(line, universe) for line in text.splitlines() if line.strip())


def event_document(event: Event, universe: ObjectUniverse) -> dict:
    labels = universe.labels
    name = lambda i: universe.names[i]  # noqa: E731
    if isinstance(event, Start):
        return {"event": "start", "procedure": event.procedure, "first": event.first}
    if isinstance(event, GenerationPick):
        return {"event": "pick", "agent": event.agent, "object": name(event.obj)}
    if isinstance(event, TieBroken):
        return {"event": "tie", "agent": event.agent, "objects": labels(event.tied), "chosen": name(event.chosen)}
    if isinstance(event, Contested):
        return {"event": "contested", "object": name(event.obj)}
    if isinstance(event, ContestedPile):
        return {"event": "pile", "set": labels(event.pile)}
    if isinstance(event, MinimalBundlesComputed):
        return {"event": "minimal_bundles", "agent": event.agent, "bundles": [labels(b) for b in event.bundles]}
    if isinstance(event, ProposalSelected):
        return {"event": "propose", "agent": event.proposer, "set": labels(event.bundle)}
    if isinstance(event, ComplementPair):
        return {"event": "pair", "set": labels(event.bundle)}
    if isinstance(event, Accepted):
        return {"event": "accept", "agent": event.responder}
    if isinstance(event, Undercut):
        return {"event": "undercut", "agent": event.responder, "set": labels(event.bundle)}
    if isinstance(event, Note):
        return {"event": "note", "text": event.text}
    if isinstance(event, Verdict):
        return {"event": "verdict", "classification": event.classification}
    raise TypeError(f"not a trace event: {event!r}")


def trace_document(trace: Trace, universe: ObjectUniverse) -> list[dict]:
    return [event_document(e, universe) for e in trace]


def event_from_document(doc: dict, universe: ObjectUniverse) -> Event:
    s = universe.set
    i = universe.index
    try:
        kind = doc["event"]
        if kind == "start":
            return Start(doc["procedure"], doc["first"])
        if kind == "pick":
            return GenerationPick(doc["agent"], i(doc["object"]))
        if kind == "tie":
            return TieBroken(doc["agent"], s(doc["objects"]), i(doc["chosen"]))
        if kind == "contested":
            return Contested(i(doc["object"]))
        if kind == "pile":
            return ContestedPile(s(doc["set"]))
        if kind == "minimal_bundles":
            return MinimalBundlesComputed(doc["agent"], tuple(s(b) for b in doc["bundles"]))
        if kind == "propose":
            return ProposalSelected(doc["agent"], s(doc["set"]))
        if kind == "pair":
            return ComplementPair(s(doc["set"]))
        if kind == "accept":
            return Accepted(doc["agent"])
        if kind == "undercut":
            return Undercut(doc["agent"], s(doc["set"]))
        if kind == "note":
            return Note(doc["text"])
        if kind == "verdict":
            return Verdict(doc["classification"])
    except (KeyError, TypeError) as e:
        raise TraceFormatError(f"bad trace event {doc!r}: {e}") from None
    raise TraceFormatError(f"unknown trace event {doc!r}")


def trace_from_document(doc: list, universe: ObjectUniverse) -> Trace:
    return tuple(event_from_document(d, universe) for d in doc)
