"""Scenario files: a small YAML dialect with exact string scalars.

Layout::

    dim: 2
    contexts:
      z:
        - [["1", "0"], ["0", "0"]]
        - [["0", "0"], ["0", "1"]]
    state: [["1/2", "0"], ["0", "1/2"]]
    options:
      closure_limit: 256
      enumeration_limit: 100000
    bell:              # optional, dim 4 only
      alice: [A1, A2]
      bob: [B1, B2]

Every matrix entry must be a quoted string in the scalar grammar of
:func:`qexplogic.linalg.parse_scalar`.  Unknown keys are rejected, and every
error carries a line/column position from the source text.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import yaml

from .bell import BellScenario
from .contexts import Context, ContextError, ContextFamily, close_family
from .linalg import DensityOperator, LinalgError, Projection, QMatrix, parse_scalar

__all__ = ["Scenario", "ScenarioError", "Options", "parse_scenario", "emit_scenario", "load_scenario"]

TOP_KEYS = ("dim", "contexts", "state", "options", "bell")
REQUIRED = ("dim", "contexts", "state")
OPTION_DEFAULTS = {"closure_limit": 256, "enumeration_limit": 100_000}


class ScenarioError(ValueError):
    """A parse or validation error, optionally located in the source."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.message = message
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line is not None else ""
        super().__init__(where + message)


@dataclass(frozen=True)
class Options:
    closure_limit: int = OPTION_DEFAULTS["closure_limit"]
    enumeration_limit: int = OPTION_DEFAULTS["enumeration_limit"]


@dataclass(frozen=True)
class Scenario:
    """A validated scenario.  ``contexts`` keeps the file order of names and
    of atoms, which the bell section uses as outcome order."""

    dim: int
    contexts: tuple[tuple[str, tuple[Projection, ...]], ...]
    state: DensityOperator
    options: Options = field(default_factory=Options)
    bell: tuple[tuple[str, ...], tuple[str, ...]] | None = None

    def context(self, name: str) -> Context:
        for n, atoms in self.contexts:
            if n == name:
                return Context(atoms, name=n)
        raise KeyError(name)

    def seed(self) -> list[Context]:
        return [Context(atoms, name=n) for n, atoms in self.contexts]

    def family(self) -> ContextFamily:
        return close_family(self.seed(), limit=self.options.closure_limit)

    def bell_scenario(self, state: DensityOperator | None = None) -> BellScenario:
        if self.bell is None:
            raise ScenarioError("scenario has no bell section")
        atoms = dict(self.contexts)
        alice = tuple(atoms[n] for n in self.bell[0])
        bob = tuple(atoms[n] for n in self.bell[1])
        return BellScenario(alice, bob, self.state if state is None else state)


def _mark(node) -> tuple[int, int]:
    m = node.start_mark
    return m.line + 1, m.column + 1


def _fail(node, message: str):
    line, col = _mark(node) if node is not None else (None, None)
    raise ScenarioError(message, line, col)


def _mapping(node, what: str) -> list[tuple[str, object, object]]:
    if not isinstance(node, yaml.MappingNode):
        _fail(node, f"{what} must be a mapping")
    out, seen = [], set()
    for k, v in node.value:
        if not isinstance(k, yaml.ScalarNode):
            _fail(k, f"keys of {what} must be plain names")
        if k.value in seen:
            _fail(k, f"duplicate key {k.value!r} in {what}")
        seen.add(k.value)
        out.append((k.value, k, v))
    return out


def _sequence(node, what: str) -> list:
    if not isinstance(node, yaml.SequenceNode):
        _fail(node, f"{what} must be a list")
    return node.value


def _int(node, what: str, minimum: int = 1) -> int:
    if not isinstance(node, yaml.ScalarNode) or node.tag != "tag:yaml.org,2002:int":
        _fail(node, f"{what} must be an integer")
    value = int(node.value)
    if value < minimum:
        _fail(node, f"{what} must be at least {minimum}")
    return value


def _matrix(node, dim: int, what: str) -> QMatrix:
    rows = _sequence(node, what)
    if len(rows) != dim:
        _fail(node, f"{what} has {len(rows)} rows, expected {dim}")
    out = []
    for r in rows:
        entries = _sequence(r, f"a row of {what}")
        if len(entries) != dim:
            _fail(r, f"a row of {what} has {len(entries)} entries, expected {dim}")
        row = []
        for e in entries:
            if not isinstance(e, yaml.ScalarNode) or e.tag != "tag:yaml.org,2002:str" or e.style not in ("'", '"'):
                _fail(e, f"entries of {what} must be quoted scalar strings, e.g. \"1/2\"")
            try:
                row.append(parse_scalar(e.value))
            except ValueError as exc:
                _fail(e, f"bad scalar in {what}: {exc}")
        out.append(row)
    return QMatrix(out)


def parse_scenario(text: str) -> Scenario:
    try:
        root = yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark or exc.context_mark
        raise ScenarioError(f"syntax error: {exc.problem}",
                            mark.line + 1 if mark else None, mark.column + 1 if mark else None) from None
    if root is None:
        raise ScenarioError("empty scenario")
    top = {k: (kn, v) for k, kn, v in _mapping(root, "the scenario")}
    for k, (kn, _) in top.items():
        if k not in TOP_KEYS:
            _fail(kn, f"unknown field {k!r} (allowed: {', '.join(TOP_KEYS)})")
    for k in REQUIRED:
        if k not in top:
            _fail(root, f"missing required field {k!r}")

    dim = _int(top["dim"][1], "dim")

    contexts = []
    ctx_node = top["contexts"][1]
    entries = _mapping(ctx_node, "contexts")
    if not entries:
        _fail(ctx_node, "at least one context is required")
    seen_ctx: dict[Context, str] = {}
    for name, kn, v in entries:
        atoms_nodes = _sequence(v, f"context {name!r}")
        if not atoms_nodes:
            _fail(v, f"context {name!r} has no atoms")
        atoms = []
        for k, an in enumerate(atoms_nodes):
            label = f"atom {k} of context {name!r}"
            m = _matrix(an, dim, label)
            if not m.is_projection():
                _fail(an, f"{label} is not a projection (needs P = P* = P^2): {m!r}")
            if m.is_zero():
                _fail(an, f"{label} is the zero matrix")
            atoms.append(Projection.of(m))
        try:
            ctx = Context(tuple(atoms), name=name)
        except ContextError as exc:
            _fail(v, f"context {name!r}: {exc}")
        if ctx in seen_ctx:
            _fail(kn, f"context {name!r} repeats context {seen_ctx[ctx]!r}")
        seen_ctx[ctx] = name
        contexts.append((name, tuple(atoms)))

    state_node = top["state"][1]
    m = _matrix(state_node, dim, "state")
    try:
        state = DensityOperator(m.rows)
    except LinalgError as exc:
        _fail(state_node, f"state is not a density operator: {exc}: {m!r}")

    options = Options()
    if "options" in top:
        vals = dict(OPTION_DEFAULTS)
        for k, kn, v in _mapping(top["options"][1], "options"):
            if k not in OPTION_DEFAULTS:
                _fail(kn, f"unknown option {k!r} (allowed: {', '.join(OPTION_DEFAULTS)})")
            vals[k] = _int(v, f"option {k}")
        options = Options(**vals)

    bell = None
    if "bell" in top:
        bnode = top["bell"][1]
        parts = {k: (kn, v) for k, kn, v in _mapping(bnode, "bell")}
        for k, (kn, _) in parts.items():
            if k not in ("alice", "bob"):
                _fail(kn, f"unknown field {k!r} in bell (allowed: alice, bob)")
        names = dict(contexts)
        sides = []
        for side in ("alice", "bob"):
            if side not in parts:
                _fail(bnode, f"bell section needs {side!r}")
            items = _sequence(parts[side][1], f"bell.{side}")
            if len(items) != 2:
                _fail(parts[side][1], f"bell.{side} must name exactly two contexts")
            chosen = []
            for it in items:
                if not isinstance(it, yaml.ScalarNode) or it.value not in names:
                    _fail(it, f"bell.{side} refers to an unknown context")
                if len(names[it.value]) != 2:
                    _fail(it, f"context {it.value!r} must have exactly two outcomes")
                chosen.append(it.value)
            sides.append(tuple(chosen))
        if dim != 4:
            _fail(bnode, "the bell section requires dim 4")
        bell = (sides[0], sides[1])

    scn = Scenario(dim, tuple(contexts), state, options, bell)
    try:
        scn.family()
    except ContextError as exc:
        _fail(ctx_node, str(exc))
    if bell is not None:
        try:
            scn.bell_scenario()
        except (ValueError, KeyError) as exc:
            _fail(top["bell"][1], f"bell section is inconsistent: {exc}")
    return scn


def load_scenario(path) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        return parse_scenario(fh.read())


def _emit_matrix(m: QMatrix, indent: str) -> list[str]:
    return [f'{indent}- [{", ".join(chr(34) + s + chr(34) for s in row)}]' for row in m.to_strings()]


def emit_scenario(scn: Scenario) -> str:
    """Canonical text for a scenario; ``parse_scenario`` inverts it."""
    lines = [f"dim: {scn.dim}", "contexts:"]
    for name, atoms in scn.contexts:
        lines.append(f"  {_key(name)}:")
        for a in atoms:
            lines.append("    -")
            lines.extend(_emit_matrix(a, "      "))
    lines.append("state:")
    lines.extend(_emit_matrix(scn.state, "  "))
    lines.append("options:")
    lines.append(f"  closure_limit: {scn.options.closure_limit}")
    lines.append(f"  enumeration_limit: {scn.options.enumeration_limit}")
    if scn.bell is not None:
        lines.append("bell:")
        lines.append(f"  alice: [{', '.join(_key(n) for n in scn.bell[0])}]")
        lines.append(f"  bob: [{', '.join(_key(n) for n in scn.bell[1])}]")
    return "\n".join(lines) + "\n"


def _key(name: str) -> str:
    # quote anything YAML might read as a non-string or as syntax
    if yaml.safe_load(name) == name and name.replace("_", "").isalnum():
        return name
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'
