"""Line-oriented text formats for protocols, nets, Diophantine systems and control graphs.

Protocol / net files::

    states: i ibar p pbar q qbar
    input: i
    leaders: ibar=2
    output0: ibar pbar qbar
    output1: i p q            # states in neither list get output '*'
    trans: i ibar -> p q      # "a a b" is 2*a + b, "-" is the empty multiset

Control-graph files are net files with two extra directives, ``project:`` (the
projection set Q) and ``seed:`` (a configuration over Q).
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from .core import (
    Action,
    Configuration,
    Output,
    OutputMap,
    PetriNet,
    Protocol,
    StateSet,
    Transition,
    format_config,
    format_multiset,
)


class ParseError(ValueError):
    def __init__(self, message: str, path: str = "<string>", line: int = 0, column: int = 0):
        self.path = path
        self.line = line
        self.column = column
        self.message = message
        super().__init__(f"{path}:{line}:{column}: {message}")


@dataclass
class NetFile:
    states: StateSet
    transitions: list[Transition]
    inputs: list[str] = field(default_factory=list)
    leaders: Configuration = field(default_factory=Configuration)
    output0: list[str] = field(default_factory=list)
    output1: list[str] = field(default_factory=list)
    project: list[str] | None = None
    seed: Configuration | None = None

    def net(self) -> PetriNet:
        return PetriNet(self.states, self.transitions)

    def protocol(self) -> Protocol:
        out = {}
        for s in self.states:
            if s in self.output0:
                out[s] = Output.ZERO
            elif s in self.output1:
                out[s] = Output.ONE
            else:
                out[s] = Output.STAR
        return Protocol(self.net(), self.leaders, frozenset(self.inputs), OutputMap(out))


_DIRECTIVES = ("states", "input", "leaders", "output0", "output1", "trans", "project", "seed")


def _tokens(text: str, offset: int):
    """(token, column) pairs, columns 1-based."""
    for m in re.finditer(r"\S+", text):
        yield m.group(0), offset + m.start() + 1


def _strip_comment(line: str) -> str:
    i = line.find("#")
    return line if i < 0 else line[:i]


def parse_net_text(text: str, path: str = "<string>") -> NetFile:
    states: StateSet | None = None
    result = NetFile(StateSet(), [])
    seen_directives: set[str] = set()
    trans_seen: set[Transition] = set()

    def need_states(lineno, col):
        if states is None:
            raise ParseError("'states:' must come first", path, lineno, col)
        return states

    def state_list(body, offset, lineno):
        st = need_states(lineno, offset + 1)
        names = []
        for tok, col in _tokens(body, offset):
            if tok not in st:
                raise ParseError(f"unknown state {tok!r}", path, lineno, col)
            names.append(tok)
        return names

    def multiset(body, offset, lineno):
        st = need_states(lineno, offset + 1)
        toks = list(_tokens(body, offset))
        if not toks:
            raise ParseError("empty multiset, use '-'", path, lineno, offset + 1)
        if len(toks) == 1 and toks[0][0] == "-":
            return Configuration()
        counts: dict[str, int] = {}
        for tok, col in toks:
            if tok not in st:
                raise ParseError(f"unknown state {tok!r}", path, lineno, col)
            counts[tok] = counts.get(tok, 0) + 1
        return Configuration(counts)

    def config_literal(body, offset, lineno, allowed):
        counts: dict[str, int] = {}
        pos = 0
        raw = body
        for part in raw.split(","):
            start = pos
            pos += len(part) + 1
            if not part.strip():
                if raw.strip():
                    raise ParseError("empty entry in configuration", path, lineno, offset + start + 1)
                continue
            col = offset + start + len(part) - len(part.lstrip()) + 1
            name, sep, value = part.strip().partition("=")
            name = name.strip()
            if not sep:
                raise ParseError(f"expected state=count, got {part.strip()!r}", path, lineno, col)
            if allowed is not None and name not in allowed:
                raise ParseError(f"unknown state {name!r}", path, lineno, col)
            try:
                count = int(value)
            except ValueError:
                raise ParseError(f"bad count {value.strip()!r}", path, lineno, col) from None
            if count < 0:
                raise ParseError("negative count", path, lineno, col)
            if name in counts:
                raise ParseError(f"state {name!r} given twice", path, lineno, col)
            counts[name] = count
        return Configuration(counts)

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line.strip():
            continue
        m = re.match(r"\s*([A-Za-z0-9_]+)\s*:", line)
        if not m:
            col = len(line) - len(line.lstrip()) + 1
            raise ParseError("expected 'directive:'", path, lineno, col)
        key = m.group(1)
        if key not in _DIRECTIVES:
            raise ParseError(f"unknown directive {key!r}", path, lineno, m.start(1) + 1)
        body = line[m.end():]
        offset = m.end()
        if key != "states" and states is None:
            raise ParseError("'states:' must come first", path, lineno, m.start(1) + 1)
        if key != "trans":
            if key in seen_directives:
                raise ParseError(f"directive {key!r} given twice", path, lineno, m.start(1) + 1)
            seen_directives.add(key)
        if key == "states":
            names = []
            for tok, col in _tokens(body, offset):
                if tok in names:
                    raise ParseError(f"duplicate state {tok!r}", path, lineno, col)
                names.append(tok)
            if not names:
                raise ParseError("no states declared", path, lineno, offset + 1)
            states = StateSet(names)
            result.states = states
        elif key == "input":
            result.inputs = state_list(body, offset, lineno)
        elif key == "output0":
            result.output0 = state_list(body, offset, lineno)
        elif key == "output1":
            result.output1 = state_list(body, offset, lineno)
        elif key == "project":
            result.project = state_list(body, offset, lineno)
        elif key == "leaders":
            result.leaders = config_literal(body, offset, lineno, need_states(lineno, offset + 1))
        elif key == "seed":
            result.seed = config_literal(body, offset, lineno, need_states(lineno, offset + 1))
        elif key == "trans":
            arrow = body.find("->")
            if arrow < 0:
                raise ParseError("expected '->' in transition", path, lineno, offset + 1)
            pre = multiset(body[:arrow], offset, lineno)
            post = multiset(body[arrow + 2:], offset + arrow + 2, lineno)
            t = Transition(pre, post)
            if t in trans_seen:
                raise ParseError("duplicate transition", path, lineno, m.start(1) + 1)
            trans_seen.add(t)
            result.transitions.append(t)
    if states is None:
        raise ParseError("missing 'states:' directive", path, 1, 1)
    both = set(result.output0) & set(result.output1)
    if both:
        raise ParseError(f"states {sorted(both)} listed in both output0 and output1", path, 0, 0)
    if result.seed is not None and result.project is not None:
        extra = result.seed.support() - set(result.project)
        if extra:
            raise ParseError(f"seed uses states outside project: {sorted(extra)}", path, 0, 0)
    return result


def load_net_file(path: str | Path) -> NetFile:
    p = Path(path)
    return parse_net_text(p.read_text(encoding="utf-8"), str(p))


def format_protocol(protocol: Protocol) -> str:
    st = protocol.states
    lines = [f"states: {' '.join(st.names)}"]
    inputs = [s for s in st if s in protocol.inputs]
    if inputs:
        lines.append(f"input: {' '.join(inputs)}")
    if protocol.leaders:
        lines.append(f"leaders: {format_config(protocol.leaders)}")
    zero = [s for s in st if protocol.output[s] is Output.ZERO]
    one = [s for s in st if protocol.output[s] is Output.ONE]
    if zero:
        lines.append(f"output0: {' '.join(zero)}")
    if one:
        lines.append(f"output1: {' '.join(one)}")
    lines.extend(_format_transitions(protocol.net))
    return "\n".join(lines) + "\n"


def format_net(net: PetriNet) -> str:
    return "\n".join([f"states: {' '.join(net.states.names)}", *_format_transitions(net)]) + "\n"


def _format_transitions(net: PetriNet) -> list[str]:
    out = []
    for t in net.transitions:
        line = f"trans: {format_multiset(t.pre, net.states)} -> {format_multiset(t.post, net.states)}"
        if t.name:
            line += f"  # {t.name}"
        out.append(line)
    return out


# -- Diophantine systems --------------------------------------------------

_TERM = re.compile(r"\s*([+-])?\s*(\d+)\s*\*\s*([A-Za-z_][A-Za-z0-9_]*)\s*")


@dataclass
class SystemFile:
    states: list[str]
    signs: dict[str, int]
    action_names: list[str]
    actions: list[Action]


def parse_system_text(text: str, path: str = "<string>") -> SystemFile:
    """One line per state: ``p: + = 2*a1 + 1*a2`` (sign ``+``, ``-`` or ``0``)."""
    states: list[str] = []
    signs: dict[str, int] = {}
    rows: dict[str, dict[str, int]] = {}
    action_names: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line.strip():
            continue
        m = re.match(r"\s*([A-Za-z_][A-Za-z0-9_]*)\s*:\s*([+\-0])\s*=", line)
        if not m:
            col = len(line) - len(line.lstrip()) + 1
            raise ParseError("expected 'state: <+|-|0> = <terms>'", path, lineno, col)
        state = m.group(1)
        if state in signs:
            raise ParseError(f"state {state!r} given twice", path, lineno, m.start(1) + 1)
        states.append(state)
        signs[state] = {"+": 1, "-": -1, "0": 0}[m.group(2)]
        row: dict[str, int] = {}
        rhs = line[m.end():]
        pos = 0
        first = True
        stripped = rhs.strip()
        if stripped in ("", "0"):
            rows[state] = row
            continue
        while pos < len(rhs):
            if not rhs[pos:].strip():
                break
            tm = _TERM.match(rhs, pos)
            if not tm or (tm.group(1) is None and not first):
                raise ParseError("expected '<+|-> coeff*action'", path, lineno, m.end() + pos + 1)
            coeff = int(tm.group(2)) * (-1 if tm.group(1) == "-" else 1)
            name = tm.group(3)
            row[name] = row.get(name, 0) + coeff
            if name not in action_names:
                action_names.append(name)
            pos = tm.end()
            first = False
        rows[state] = row
    if not states:
        raise ParseError("empty system", path, 1, 1)
    actions = [Action({p: rows[p].get(a, 0) for p in states}) for a in action_names]
    return SystemFile(states, signs, action_names, actions)


def load_system_file(path: str | Path) -> SystemFile:
    p = Path(path)
    return parse_system_text(p.read_text(encoding="utf-8"), str(p))
