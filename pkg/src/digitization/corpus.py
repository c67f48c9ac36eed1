"""Bundled example automata, traces and formulas."""

from __future__ import annotations

import json
from importlib import resources

from digitization.timed_automata import TAClass, TimedAutomaton, classify
from digitization.timed_traces import TimedStateSequence


def _data():
    return resources.files("digitization") / "data"


def automaton_names() -> list[str]:
    return sorted(p.name[:-5] for p in (_data() / "automata").iterdir() if p.name.endswith(".json"))


def load_automaton(name: str) -> TimedAutomaton:
    text = (_data() / "automata" / f"{name}.json").read_text(encoding="utf-8")
    return TimedAutomaton.from_dict(json.loads(text))


def automata() -> dict[str, TimedAutomaton]:
    return {name: load_automaton(name) for name in automaton_names()}


def closed_automata() -> dict[str, TimedAutomaton]:
    return {n: A for n, A in automata().items() if classify(A) is TAClass.CLOSED}


def load_trace(name: str) -> TimedStateSequence:
    text = (_data() / "traces" / f"{name}.json").read_text(encoding="utf-8")
    return TimedStateSequence.from_dict(json.loads(text))


def formulas() -> dict[str, str]:
    doc = json.loads((_data() / "formulas.json").read_text(encoding="utf-8"))
    return {item["name"]: item["formula"] for item in doc["formulas"]}


def path(*parts: str) -> str:
    """Filesystem path of a bundled file, for CLI examples and tests."""
    return str(_data().joinpath(*parts))
