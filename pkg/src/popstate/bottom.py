"""Components, bottom configurations and extraction of bottom witnesses.

A configuration is bottom when its component (configurations reachable and
co-reachable) is finite and everything reachable from it can come back.
``extract_bottom`` grows a projection set Q step by step until the run can be
pumped on every state outside Q while the Q-part stays inside a bottom
component.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable

from .core import Configuration, PetriNet
from .reach import (
    DEFAULT_BUDGET,
    DenseNet,
    Exploration,
    ExplorationBudget,
    PreconditionError,
    Word,
    fire_word,
)


@dataclass(frozen=True)
class ComponentResult:
    members: frozenset[Configuration]
    complete: bool

    def __len__(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class BottomWitness:
    sigma: Word
    w: Word
    q: tuple[str, ...]
    alpha: Configuration
    beta: Configuration
    component_size: int

    def sizes(self, num_states: int) -> tuple[int, int, int, int]:
        """|sigma|, |w|, d*||alpha||, d*||beta|| as compared against the extraction bound."""
        return (
            len(self.sigma),
            len(self.w),
            num_states * self.alpha.norm_inf(),
            num_states * self.beta.norm_inf(),
        )


@dataclass(frozen=True)
class Pumped:
    word: Word
    rho: Configuration


@dataclass(frozen=True)
class Grown:
    word: Word
    rho: Configuration
    q: tuple[str, ...]


@dataclass(frozen=True)
class Exhausted:
    reason: str = "budget exhausted"


def _component_nodes(ex: Exploration) -> set[int]:
    return ex.backward_closure([0])


def _component_dense(dense: DenseNet, v, budget: ExplorationBudget) -> tuple[list, bool]:
    ex = dense.explore(v, budget)
    return [ex.nodes[i] for i in sorted(_component_nodes(ex))], ex.exhausted


def component(net: PetriNet, rho: Configuration, budget: ExplorationBudget = DEFAULT_BUDGET) -> ComponentResult:
    """Configurations mutually reachable with ``rho``.

    With an incomplete exploration the members are those seen to return
    inside the explored graph, an under-approximation.
    """
    dense = DenseNet.of(net)
    nodes, complete = _component_dense(dense, dense.vector(rho), budget)
    return ComponentResult(frozenset(dense.config(v) for v in nodes), complete)


def _growing(dense: DenseNet, v, budget: ExplorationBudget):
    """Explorations of v with caps 256, 4096, ... up to the budget."""
    cap = 256
    while True:
        cap = min(cap, budget.max_configurations)
        ex = dense.explore(v, ExplorationBudget(cap, budget.max_depth))
        yield ex
        if ex.exhausted or cap >= budget.max_configurations:
            return
        cap *= 16


def _bottom_verdict(ex: Exploration) -> bool | None:
    back = ex.backward_closure([0])
    if ex.exhausted:
        return len(back) == len(ex.nodes)
    # a node whose explored future is closed and avoids the root never returns
    open_nodes = [i for i, s in enumerate(ex.succ) if s is None]
    if len(ex.backward_closure([0, *open_nodes])) < len(ex.nodes):
        return False
    # root ->* a ->* b with a < b: the future is infinite, so is the component
    for i, node in enumerate(ex.nodes):
        j = ex.parent[i]
        while j >= 0:
            anc = ex.nodes[j]
            if anc != node and all(x <= y for x, y in zip(anc, node)):
                return False
            j = ex.parent[j]
    return None


def _bottom_dense(dense: DenseNet, v, budget: ExplorationBudget) -> tuple[bool | None, int]:
    """(verdict, size of the explored component) for dense vector ``v``."""
    for ex in _growing(dense, v, budget):
        verdict = _bottom_verdict(ex)
        if verdict is not None:
            break
    return verdict, len(ex.backward_closure([0]))


def is_bottom(net: PetriNet, rho: Configuration, budget: ExplorationBudget = DEFAULT_BUDGET) -> bool | None:
    """True/False, or None when the budget ran out before a verdict."""
    dense = DenseNet.of(net)
    return _bottom_dense(dense, dense.vector(rho), budget)[0]


@dataclass
class _Searcher:
    net: PetriNet
    budget: ExplorationBudget
    _cache: dict = field(default_factory=dict)

    def projected(self, q: tuple[str, ...]) -> DenseNet:
        key = ("net", q)
        if key not in self._cache:
            self._cache[key] = DenseNet.of(self.net, q)
        return self._cache[key]

    def bottom(self, q: tuple[str, ...], c: Configuration) -> tuple[bool | None, int]:
        key = (q, c.restrict(q))
        if key not in self._cache:
            dense = self.projected(q)
            self._cache[key] = _bottom_dense(dense, dense.vector(c.restrict(q)), self.budget)
        return self._cache[key]

    def ordered(self, q: Iterable[str]) -> tuple[str, ...]:
        return self.net.states.subset(q).names

    def supersets(self, q: tuple[str, ...]):
        """Strict supersets of q inside P, largest first, then in state order."""
        rest = [s for s in self.net.states if s not in q]
        for size in range(len(rest), 0, -1):
            for extra in combinations(rest, size):
                yield self.ordered(set(q) | set(extra))

    def step(self, rho: Configuration, q: tuple[str, ...]):
        verdict, _ = self.bottom(q, rho)
        if verdict is False:
            raise PreconditionError(f"{rho.restrict(q)} is not bottom for the net projected on {list(q)}")
        if verdict is None:
            return Exhausted("bottom check of the starting point ran out of budget")
        outside = [s for s in self.net.states if s not in q]
        if not outside:
            return Pumped((), rho)
        dense = DenseNet.of(self.net)
        base_q = rho.restrict(q)
        scanned = 0
        for ex in _growing(dense, dense.vector(rho), self.budget):
            for i in range(scanned, len(ex.nodes)):
                cand = dense.config(ex.nodes[i])
                if cand.restrict(q) == base_q and all(cand[p] > rho[p] for p in outside):
                    return Pumped(ex.word_to(i), cand)
                for bigger in self.supersets(q):
                    if self.bottom(bigger, cand)[0]:
                        return Grown(ex.word_to(i), cand, bigger)
            scanned = len(ex.nodes)
        return Exhausted()


def extract_step(
    net: PetriNet,
    rho: Configuration,
    q: Iterable[str],
    budget: ExplorationBudget = DEFAULT_BUDGET,
) -> Pumped | Grown | Exhausted:
    """One growth step: pump every state outside Q, or reach a bottom point for a larger Q.

    Candidates are visited in breadth-first order from ``rho``; at each one
    pumping is tried first, then supersets of Q from largest to smallest.
    """
    search = _Searcher(net, budget)
    return search.step(rho, search.ordered(q))


def extract_bottom(
    net: PetriNet, rho: Configuration, budget: ExplorationBudget = DEFAULT_BUDGET
) -> BottomWitness | None:
    """Words sigma, w and a set Q with rho -sigma-> alpha -w-> beta, alpha|_Q = beta|_Q,
    alpha < beta outside Q and alpha|_Q bottom for the net projected on Q."""
    search = _Searcher(net, budget)
    q: tuple[str, ...] = ()
    current = rho
    sigma: list[int] = []
    for _ in range(len(net.states) + 1):
        outcome = search.step(current, q)
        if isinstance(outcome, Exhausted):
            return None
        if isinstance(outcome, Pumped):
            _, size = search.bottom(q, current)
            return BottomWitness(tuple(sigma), outcome.word, q, current, outcome.rho, size)
        sigma.extend(outcome.word)
        current = outcome.rho
        q = outcome.q
    raise AssertionError("projection set cannot grow past the state set")  # pragma: no cover


def check_bottom_witness(
    net: PetriNet,
    rho: Configuration,
    witness: BottomWitness,
    budget: ExplorationBudget = DEFAULT_BUDGET,
) -> list[str]:
    """Re-derive the witness conditions; returns the failed ones (empty when valid)."""
    failed = []
    q = set(witness.q)
    alpha = fire_word(net, rho, witness.sigma)
    beta = None if alpha is None else fire_word(net, alpha, witness.w)
    if alpha != witness.alpha or beta != witness.beta:
        failed.append("runs")
    if witness.alpha.restrict(q) != witness.beta.restrict(q):
        failed.append("agree-on-Q")
    if any(witness.alpha[p] >= witness.beta[p] for p in net.states if p not in q):
        failed.append("pumped-outside-Q")
    projected = net.restrict(q)
    if is_bottom(projected, witness.alpha.restrict(q), budget) is not True:
        failed.append("bottom")
    comp = component(projected, witness.alpha.restrict(q), budget)
    if not comp.complete or len(comp) != witness.component_size:
        failed.append("finite-component")
    return failed
