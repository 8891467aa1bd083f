"""Firing semantics, budgeted reachability, coverability and the lifting of projected runs."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from . import kernels
from .core import Configuration, PetriNet, StateSet, Transition

Word = tuple[int, ...]


class PreconditionError(ValueError):
    """An operation was called outside its precondition."""

    def __init__(self, message: str, state: str | None = None):
        super().__init__(message)
        self.state = state


@dataclass(frozen=True)
class ExplorationBudget:
    max_configurations: int = 100_000
    max_depth: int | None = None

    def __post_init__(self):
        if self.max_configurations < 1:
            raise ValueError("max_configurations must be at least 1")
        if self.max_depth is not None and self.max_depth < 0:
            raise ValueError("max_depth must be natural")


DEFAULT_BUDGET = ExplorationBudget()


@dataclass(frozen=True)
class CoverWitness:
    word: Word
    reached: Configuration


@dataclass(frozen=True)
class ReachResult:
    configurations: tuple[Configuration, ...]
    exhausted: bool

    def __contains__(self, c) -> bool:
        return c in set(self.configurations)

    def __len__(self) -> int:
        return len(self.configurations)


class DenseNet:
    """Transitions of a net as dense vectors over ``dims``, index-preserving.

    Built over a projection set, transition ``i`` here is ``t_i|_Q``; words
    over the original net are therefore words over the projection.
    """

    __slots__ = ("dims", "pres", "posts", "norm")

    def __init__(self, dims: StateSet, transitions: Sequence[Transition]):
        self.dims = dims
        self.pres = [self._vec(t.pre) for t in transitions]
        self.posts = [self._vec(t.post) for t in transitions]
        self.norm = max((max(p + q, default=0) for p, q in zip(self.pres, self.posts)), default=0)

    def _vec(self, c: Configuration) -> tuple[int, ...]:
        return tuple(c[s] for s in self.dims.names)

    @classmethod
    def of(cls, net: PetriNet, q: Iterable[str] | None = None) -> "DenseNet":
        dims = net.states if q is None else net.states.subset(q)
        return cls(dims, net.transitions)

    def vector(self, c: Configuration) -> tuple[int, ...]:
        extra = c.support() - set(self.dims.names)
        if extra:
            raise ValueError(f"configuration uses states outside {list(self.dims.names)}: {sorted(extra)}")
        return self._vec(c)

    def config(self, v: Sequence[int]) -> Configuration:
        return Configuration.from_vector(self.dims, v)

    def fire(self, v, t: int):
        return kernels.fire(v, self.pres[t], self.posts[t])

    def fire_word(self, v, word: Iterable[int]):
        for t in word:
            v = kernels.fire(v, self.pres[t], self.posts[t])
            if v is None:
                return None
        return v

    def explore(self, start, budget: ExplorationBudget = DEFAULT_BUDGET):
        depth = -1 if budget.max_depth is None else budget.max_depth
        return Exploration(*kernels.explore(start, self.pres, self.posts, budget.max_configurations, depth))

    def __len__(self) -> int:
        return len(self.pres)


@dataclass
class Exploration:
    nodes: list
    parent: list
    via: list
    depth: list
    succ: list
    exhausted: bool

    def word_to(self, i: int) -> Word:
        out = []
        while self.parent[i] >= 0:
            out.append(self.via[i])
            i = self.parent[i]
        return tuple(reversed(out))

    def predecessors(self) -> list[list[int]]:
        preds: list[list[int]] = [[] for _ in self.nodes]
        for i, out in enumerate(self.succ):
            if out is not None:
                for j in out:
                    preds[j].append(i)
        return preds

    def backward_closure(self, targets: Iterable[int]) -> set[int]:
        """Explored nodes with a path (in the explored graph) into ``targets``."""
        preds = self.predecessors()
        seen = set(targets)
        stack = list(seen)
        while stack:
            j = stack.pop()
            for i in preds[j]:
                if i not in seen:
                    seen.add(i)
                    stack.append(i)
        return seen


def _check_index(net: PetriNet, word: Iterable[int]) -> Word:
    word = tuple(word)
    for t in word:
        if not 0 <= t < len(net):
            raise IndexError(f"transition index {t} out of range for a net of {len(net)} transitions")
    return word


def fire(c: Configuration, t: Transition) -> Configuration | None:
    """c - pre(t) + post(t) when c >= pre(t), otherwise None."""
    if not t.pre <= c:
        return None
    return (c - t.pre) + t.post


def fire_word(net: PetriNet, c: Configuration, word: Iterable[int]) -> Configuration | None:
    for t in _check_index(net, word):
        c = fire(c, net.transitions[t])
        if c is None:
            return None
    return c


def reachable_set(
    net: PetriNet, c: Configuration, budget: ExplorationBudget = DEFAULT_BUDGET
) -> ReachResult:
    """Breadth-first closure of ``{c}``; ``exhausted`` says the closure is complete."""
    dense = DenseNet.of(net)
    ex = dense.explore(dense.vector(c), budget)
    return ReachResult(tuple(dense.config(v) for v in ex.nodes), ex.exhausted)


# -- backward coverability ----------------------------------------------


class UpwardClosure:
    """Layers of the backward coverability fixpoint for an upward-closed target set.

    ``layers[k]`` is the minimal basis of the configurations that can cover a
    target in at most ``k`` steps.  The last layer is the fixpoint unless the
    computation was stopped early for a given source.
    """

    def __init__(self, dense: DenseNet, targets: Iterable[Sequence[int]]):
        self.dense = dense
        basis = kernels.minimize([tuple(t) for t in targets])
        self.layers: list[list[tuple[int, ...]]] = [basis]
        self._frontier = list(basis)
        self.complete = not basis

    def _step(self) -> bool:
        dense = self.dense
        current = self.layers[-1]
        fresh = []
        for m in self._frontier:
            for pre, post in zip(dense.pres, dense.posts):
                pred = tuple(a + (x - b if x > b else 0) for x, a, b in zip(m, pre, post))
                if not kernels.dominated(pred, current) and not kernels.dominated(pred, fresh):
                    fresh.append(pred)
        if not fresh:
            self.complete = True
            return False
        fresh = kernels.minimize(fresh)
        self.layers.append(kernels.minimize(current + fresh))
        self._frontier = fresh
        return True

    def distance(self, v) -> int | None:
        """Fewest steps needed to cover a target from ``v`` (None if impossible)."""
        for k, layer in enumerate(self.layers):
            if kernels.dominated(v, layer):
                return k
        while not self.complete:
            if self._step() and kernels.dominated(v, self.layers[-1]):
                return len(self.layers) - 1
        return None

    def saturate(self) -> list[tuple[int, ...]]:
        while not self.complete:
            self._step()
        return self.layers[-1]

    def contains(self, v) -> bool:
        return kernels.dominated(v, self.saturate())

    def witness(self, v) -> Word | None:
        """Shortest covering word from ``v``; lexicographically least among shortest."""
        k = self.distance(v)
        if k is None:
            return None
        word = []
        while k > 0:
            below = self.layers[k - 1]
            for t in range(len(self.dense)):
                w = self.dense.fire(v, t)
                if w is not None and kernels.dominated(w, below):
                    word.append(t)
                    v = w
                    break
            else:  # pragma: no cover - layers guarantee a step exists
                raise AssertionError("backward layers are inconsistent")
            k -= 1
        return tuple(word)


def coverable(net: PetriNet, source: Configuration, target: Configuration) -> CoverWitness | None:
    """A shortest word from ``source`` reaching some configuration >= ``target``."""
    return coverable_any(net, source, [target])


def coverable_any(
    net: PetriNet, source: Configuration, targets: Sequence[Configuration]
) -> CoverWitness | None:
    """Like ``coverable`` for the union of the upward closures of ``targets``."""
    dense = DenseNet.of(net)
    closure = UpwardClosure(dense, [dense.vector(t) for t in targets])
    word = closure.witness(dense.vector(source))
    if word is None:
        return None
    return CoverWitness(word, fire_word(net, source, word))


# -- projection and lifting ---------------------------------------------


def project_word_fire(
    net: PetriNet, c: Configuration, q: Iterable[str], word: Iterable[int]
) -> Configuration | None:
    """Fire ``word|_Q`` from ``c|_Q`` in the projected net T|_Q."""
    q = list(q)
    dense = DenseNet.of(net, q)
    v = dense.fire_word(dense.vector(c.restrict(q)), _check_index(net, word))
    return None if v is None else dense.config(v)


def lift(
    net: PetriNet, alpha: Configuration, q: Iterable[str], word: Iterable[int], rho: Configuration
) -> Configuration:
    """Turn a projected run alpha|_Q -> rho into a run of the full net.

    Requires alpha(p) >= |word| * ||T||_inf outside Q.  Returns beta with
    alpha -word-> beta, beta|_Q = rho and beta(p) >= alpha(p) - |word| * ||T||_inf
    outside Q.
    """
    q = set(q)
    word = _check_index(net, word)
    projected = project_word_fire(net, alpha, q, word)
    if projected is None:
        raise PreconditionError("word is not fireable from alpha in the projected net")
    if projected != rho:
        raise PreconditionError(f"projected run ends in {projected}, not {rho}")
    slack = len(word) * net.norm_inf()
    for p in net.states:
        if p not in q and alpha[p] < slack:
            raise PreconditionError(
                f"alpha({p}) = {alpha[p]} is below |word| * ||T||_inf = {slack}", state=p
            )
    beta = fire_word(net, alpha, word)
    assert beta is not None and beta.restrict(q) == rho.restrict(q)
    return beta


def rackoff_bound(num_states: int, target_norm: int, net_norm: int) -> int:
    """(target_norm + net_norm) ** (num_states ** num_states), with 0**0 = 1."""
    if min(num_states, target_norm, net_norm) < 0:
        raise ValueError("arguments must be natural")
    return (target_norm + net_norm) ** (num_states**num_states)
