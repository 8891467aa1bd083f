"""Value types: states, configurations, transitions, Petri nets, protocols, actions.

Configurations are sparse, canonical and immutable.  Zero counts are dropped on
construction so equality and hashing only look at the support.  A ``StateSet``
fixes an index order, which lets exploration code work on dense tuples.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

MAX_COUNT = 2**63 - 1


def _check_count(state: str, value: int) -> int:
    if value > MAX_COUNT or value < -MAX_COUNT:
        raise OverflowError(f"count for state {state!r} exceeds machine width: {value}")
    return value


class StateSet:
    """Ordered set of distinct state names; iteration follows declaration order."""

    __slots__ = ("names", "_index")

    def __init__(self, names: Iterable[str] = ()):
        names = tuple(names)
        index = {}
        for i, name in enumerate(names):
            if not isinstance(name, str) or not name:
                raise ValueError(f"state names must be non-empty strings, got {name!r}")
            if name in index:
                raise ValueError(f"duplicate state {name!r}")
            index[name] = i
        self.names = names
        self._index = index

    def index(self, name: str) -> int:
        return self._index[name]

    def __contains__(self, name) -> bool:
        return name in self._index

    def __iter__(self) -> Iterator[str]:
        return iter(self.names)

    def __len__(self) -> int:
        return len(self.names)

    def __eq__(self, other) -> bool:
        return isinstance(other, StateSet) and self.names == other.names

    def __hash__(self) -> int:
        return hash(self.names)

    def __repr__(self) -> str:
        return f"StateSet({list(self.names)!r})"

    def subset(self, names: Iterable[str]) -> "StateSet":
        """The given names, ordered as in this set; names outside it are appended sorted."""
        wanted = set(names)
        inside = [n for n in self.names if n in wanted]
        outside = sorted(wanted.difference(self._index))
        return StateSet(inside + outside)


class _Sparse(Mapping):
    """Canonical sparse map state -> int with implicit zeros."""

    __slots__ = ("_items", "_map", "_hash")
    _allow_negative = True

    def __init__(self, counts: Mapping[str, int] | Iterable[tuple[str, int]] | None = None, **kwargs: int):
        acc: dict[str, int] = {}
        if counts is not None:
            pairs = counts.items() if isinstance(counts, Mapping) else counts
            for state, value in pairs:
                acc[state] = acc.get(state, 0) + int(value)
        for state, value in kwargs.items():
            acc[state] = acc.get(state, 0) + int(value)
        items = []
        for state in sorted(acc):
            value = _check_count(state, acc[state])
            if value < 0 and not self._allow_negative:
                raise ValueError(f"negative count {value} for state {state!r}")
            if value:
                items.append((state, value))
        self._items = tuple(items)
        self._map = dict(items)
        self._hash = None

    @classmethod
    def _trusted(cls, items: tuple[tuple[str, int], ...]):
        obj = object.__new__(cls)
        obj._items = items
        obj._map = dict(items)
        obj._hash = None
        return obj

    def __getitem__(self, state: str) -> int:
        return self._map.get(state, 0)

    def get(self, state, default=0):
        return self._map.get(state, default)

    def __contains__(self, state) -> bool:
        return state in self._map

    def __iter__(self) -> Iterator[str]:
        return (s for s, _ in self._items)

    def __len__(self) -> int:
        return len(self._items)

    def items(self):
        return self._items

    def support(self) -> frozenset[str]:
        return frozenset(self._map)

    def __eq__(self, other) -> bool:
        if isinstance(other, _Sparse):
            return self._items == other._items
        if isinstance(other, Mapping):
            return self == type(self)(other)
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._items)
        return self._hash

    def __bool__(self) -> bool:
        return bool(self._items)

    def to_vector(self, states: StateSet | Iterable[str]) -> tuple[int, ...]:
        names = states.names if isinstance(states, StateSet) else tuple(states)
        extra = self._map.keys() - set(names)
        if extra:
            raise ValueError(f"states {sorted(extra)} are not declared")
        return tuple(self._map.get(s, 0) for s in names)

    @classmethod
    def from_vector(cls, states: StateSet | Iterable[str], vector: Iterable[int]):
        names = states.names if isinstance(states, StateSet) else tuple(states)
        return cls(zip(names, vector))

    def restrict(self, q: Iterable[str]):
        """Keep only the states in ``q``; states of ``q`` absent here stay zero."""
        q = set(q)
        return type(self)._trusted(tuple((s, v) for s, v in self._items if s in q))

    def norm_inf(self) -> int:
        return max((abs(v) for _, v in self._items), default=0)

    def norm1(self) -> int:
        return sum(abs(v) for _, v in self._items)

    def __str__(self) -> str:
        return format_config(self)


class Configuration(_Sparse):
    """Multiset of agents: a map state -> natural count.

    >>> Configuration(i=3, ibar=2).agents()
    5
    """

    __slots__ = ()
    _allow_negative = False

    def agents(self) -> int:
        return sum(v for _, v in self._items)

    def __add__(self, other: "Configuration") -> "Configuration":
        if isinstance(other, Action):
            return Configuration(_merge(self._map, other._map, 1))
        if not isinstance(other, Configuration):
            return NotImplemented
        return Configuration(_merge(self._map, other._map, 1))

    def __sub__(self, other: "Configuration") -> "Configuration":
        if not isinstance(other, Configuration):
            return NotImplemented
        return Configuration(_merge(self._map, other._map, -1))

    def scale(self, n: int) -> "Configuration":
        if n < 0:
            raise ValueError("scale factor must be natural")
        return Configuration({s: n * v for s, v in self._items})

    def __le__(self, other: "Configuration") -> bool:
        """Componentwise order (a partial order, not a total one)."""
        if not isinstance(other, Configuration):
            return NotImplemented
        om = other._map
        return all(v <= om.get(s, 0) for s, v in self._items)

    def __ge__(self, other: "Configuration") -> bool:
        if not isinstance(other, Configuration):
            return NotImplemented
        return other <= self

    def __lt__(self, other: "Configuration") -> bool:
        if not isinstance(other, Configuration):
            return NotImplemented
        return self <= other and self != other

    def __gt__(self, other: "Configuration") -> bool:
        if not isinstance(other, Configuration):
            return NotImplemented
        return other < self

    def __repr__(self) -> str:
        return f"Configuration({dict(self._items)!r})"


class Action(_Sparse):
    """Integer vector over states (displacements of transitions, paths, multicycles)."""

    __slots__ = ()

    def __add__(self, other: "Action") -> "Action":
        if not isinstance(other, _Sparse):
            return NotImplemented
        return Action(_merge(self._map, other._map, 1))

    __radd__ = __add__

    def __sub__(self, other: "Action") -> "Action":
        if not isinstance(other, _Sparse):
            return NotImplemented
        return Action(_merge(self._map, other._map, -1))

    def __neg__(self) -> "Action":
        return Action({s: -v for s, v in self._items})

    def scale(self, n: int) -> "Action":
        return Action({s: n * v for s, v in self._items})

    def __repr__(self) -> str:
        return f"Action({dict(self._items)!r})"


def _merge(a: Mapping[str, int], b: Mapping[str, int], sign: int) -> dict[str, int]:
    out = dict(a)
    for s, v in b.items():
        out[s] = out.get(s, 0) + sign * v
    return out


def agents(c: Configuration) -> int:
    return c.agents()


def restrict(c: Configuration, q: Iterable[str]) -> Configuration:
    return c.restrict(q)


@dataclass(frozen=True)
class Transition:
    """A pair (pre, post) of configurations; ``name`` is a display label only."""

    pre: Configuration
    post: Configuration
    name: str | None = field(default=None, compare=False)

    def __post_init__(self):
        if not isinstance(self.pre, Configuration):
            object.__setattr__(self, "pre", Configuration(self.pre))
        if not isinstance(self.post, Configuration):
            object.__setattr__(self, "post", Configuration(self.post))

    def width(self) -> int:
        return max(self.pre.agents(), self.post.agents())

    def norm_inf(self) -> int:
        return max(self.pre.norm_inf(), self.post.norm_inf())

    def displacement(self) -> Action:
        return Action(self.post) - Action(self.pre)

    def support(self) -> frozenset[str]:
        return self.pre.support() | self.post.support()

    def restrict(self, q: Iterable[str]) -> "Transition":
        q = set(q)
        return Transition(self.pre.restrict(q), self.post.restrict(q), self.name)

    def is_conservative(self) -> bool:
        return self.pre.agents() == self.post.agents()

    def __str__(self) -> str:
        return f"{format_multiset(self.pre)} -> {format_multiset(self.post)}"


def interaction_width(t: Transition) -> int:
    return t.width()


def displacement(t: Transition) -> Action:
    return t.displacement()


class PetriNet:
    """A finite, ordered list of distinct transitions over a state set."""

    __slots__ = ("states", "transitions")

    def __init__(self, states: StateSet | Iterable[str], transitions: Iterable[Transition] = ()):
        if not isinstance(states, StateSet):
            states = StateSet(states)
        transitions = tuple(transitions)
        seen = set()
        for t in transitions:
            unknown = t.support() - set(states.names)
            if unknown:
                raise ValueError(f"transition {t} uses undeclared states {sorted(unknown)}")
            if t in seen:
                raise ValueError(f"duplicate transition {t}")
            seen.add(t)
        self.states = states
        self.transitions = transitions

    def __len__(self) -> int:
        return len(self.transitions)

    def __iter__(self):
        return iter(self.transitions)

    def __getitem__(self, i: int) -> Transition:
        return self.transitions[i]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PetriNet)
            and self.states == other.states
            and self.transitions == other.transitions
        )

    def __hash__(self) -> int:
        return hash((self.states, self.transitions))

    def __repr__(self) -> str:
        return f"PetriNet({list(self.states)!r}, {len(self.transitions)} transitions)"

    def norm_inf(self) -> int:
        return max((t.norm_inf() for t in self.transitions), default=0)

    def width(self) -> int:
        return max((t.width() for t in self.transitions), default=0)

    def is_conservative(self) -> bool:
        return all(t.is_conservative() for t in self.transitions)

    def restrict(self, q: Iterable[str]) -> "PetriNet":
        """The projected net T|_Q; projections that coincide are merged."""
        sub = self.states.subset(q)
        out = []
        seen = set()
        for t in self.transitions:
            r = t.restrict(sub.names)
            if r not in seen:
                seen.add(r)
                out.append(r)
        return PetriNet(sub, out)

    def label(self, i: int) -> str:
        name = self.transitions[i].name
        return name if name else f"t{i}"


def net_norm_inf(n: PetriNet) -> int:
    return n.norm_inf()


class Output(enum.Enum):
    ZERO = "0"
    STAR = "*"
    ONE = "1"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class OutputMap:
    assignment: Mapping[str, Output]

    def __post_init__(self):
        object.__setattr__(self, "assignment", dict(sorted(self.assignment.items())))

    def __getitem__(self, state: str) -> Output:
        return self.assignment[state]

    def preimage(self, value: Output) -> frozenset[str]:
        return frozenset(s for s, v in self.assignment.items() if v is value)

    def __hash__(self) -> int:
        return hash(tuple(self.assignment.items()))


@dataclass(frozen=True)
class Protocol:
    net: PetriNet
    leaders: Configuration
    inputs: frozenset[str]
    output: OutputMap

    def __post_init__(self):
        object.__setattr__(self, "inputs", frozenset(self.inputs))
        declared = set(self.net.states.names)
        if not self.leaders.support() <= declared:
            raise ValueError(f"leaders use undeclared states {sorted(self.leaders.support() - declared)}")
        if not self.inputs <= declared:
            raise ValueError(f"inputs use undeclared states {sorted(self.inputs - declared)}")
        missing = declared - set(self.output.assignment)
        if missing:
            raise ValueError(f"output map is not total, missing {sorted(missing)}")

    @property
    def states(self) -> StateSet:
        return self.net.states

    def initial(self, inputs: Configuration) -> Configuration:
        if not inputs.support() <= self.inputs:
            raise ValueError("initial configurations only populate input states")
        return self.leaders + inputs


# -- literal syntax -------------------------------------------------------


def format_config(c: _Sparse) -> str:
    """``i=3,ibar=2``; the zero configuration is the empty string."""
    return ",".join(f"{s}={v}" for s, v in c.items())


def format_multiset(c: Configuration, order: StateSet | None = None) -> str:
    names = order.names if order is not None else [s for s, _ in c.items()]
    tokens = [s for s in names for _ in range(c[s])]
    return " ".join(tokens) if tokens else "-"


def parse_config(text: str, states: StateSet | None = None) -> Configuration:
    """Parse ``"i=3,ibar=2"``; the empty string is the zero configuration."""
    counts: dict[str, int] = {}
    text = text.strip()
    if not text:
        return Configuration()
    for part in text.split(","):
        part = part.strip()
        name, sep, value = part.partition("=")
        name = name.strip()
        if not sep or not name:
            raise ValueError(f"expected state=count, got {part!r}")
        try:
            count = int(value.strip())
        except ValueError:
            raise ValueError(f"count for {name!r} is not an integer: {value.strip()!r}") from None
        if count < 0:
            raise ValueError(f"negative count for {name!r}")
        if name in counts:
            raise ValueError(f"state {name!r} given twice")
        if states is not None and name not in states:
            raise ValueError(f"unknown state {name!r}")
        counts[name] = count
    return Configuration(counts)
