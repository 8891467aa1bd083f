"""Desk-scale checks that a protocol stably computes a counting predicate, and the two example protocols."""
from __future__ import annotations

import enum
import re
from collections import deque
from dataclasses import dataclass, field

from .core import Configuration, Output, OutputMap, PetriNet, Protocol, StateSet, Transition
from .reach import DEFAULT_BUDGET, DenseNet, Exploration, ExplorationBudget, PreconditionError, Word, fire_word


@dataclass(frozen=True)
class CountingPredicate:
    """phi(rho) = 1 iff rho(input_state) >= threshold."""

    input_state: str
    threshold: int

    def __post_init__(self):
        if self.threshold < 1:
            raise ValueError("threshold must be at least 1")

    def __call__(self, rho: Configuration) -> int:
        return int(rho[self.input_state] >= self.threshold)

    def __str__(self) -> str:
        return f"{self.input_state}>={self.threshold}"

    @classmethod
    def parse(cls, text: str) -> "CountingPredicate":
        m = re.fullmatch(r"\s*([A-Za-z_][A-Za-z0-9_]*)\s*>=\s*(\d+)\s*", text)
        if not m:
            raise ValueError(f"expected a predicate like 'i>=2', got {text!r}")
        return cls(m.group(1), int(m.group(2)))


class Verdict(enum.Enum):
    VERIFIED = "Verified"
    REFUTED = "Refuted"
    INCONCLUSIVE = "Inconclusive"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Counterexample:
    """A run from ``initial`` to ``reached`` after which S_expected is unreachable."""

    input_count: int
    initial: Configuration
    word: Word
    reached: Configuration
    expected: int
    reason: str

    def replays(self, protocol: Protocol) -> bool:
        return fire_word(protocol.net, self.initial, self.word) == self.reached


@dataclass(frozen=True)
class InputResult:
    input_count: int
    verdict: Verdict
    explored: int


@dataclass(frozen=True)
class VerificationReport:
    verdict: Verdict
    checked_inputs: range
    counterexample: Counterexample | None = None
    per_input: tuple[InputResult, ...] = field(default=())


def _stable_nodes(ex: Exploration, bad: list[bool]) -> list[bool]:
    """Nodes that cannot reach a bad node (the graph must be complete)."""
    preds = ex.predecessors()
    reach_bad = list(bad)
    stack = [i for i, b in enumerate(bad) if b]
    while stack:
        j = stack.pop()
        for i in preds[j]:
            if not reach_bad[i]:
                reach_bad[i] = True
                stack.append(i)
    return [not b for b in reach_bad]


def _can_reach(ex: Exploration, targets: list[bool]) -> list[bool]:
    preds = ex.predecessors()
    ok = list(targets)
    queue = deque(i for i, t in enumerate(targets) if t)
    while queue:
        j = queue.popleft()
        for i in preds[j]:
            if not ok[i]:
                ok[i] = True
                queue.append(i)
    return ok


def output_stable_nodes(protocol: Protocol, dense: DenseNet, ex: Exploration, value: int) -> list[bool]:
    """Membership in S_value for each node of a complete exploration."""
    if value == 0:
        wrong = [i for i, s in enumerate(dense.dims) if protocol.output[s] is not Output.ZERO]
        bad = [any(v[i] for i in wrong) for v in ex.nodes]
    else:
        wrong = [i for i, s in enumerate(dense.dims) if protocol.output[s] is not Output.ONE]
        bad = [any(v[i] for i in wrong) or not any(v) for v in ex.nodes]
    return _stable_nodes(ex, bad)


def check_input(
    protocol: Protocol,
    phi: CountingPredicate,
    m: int,
    budget: ExplorationBudget = DEFAULT_BUDGET,
    dense: DenseNet | None = None,
) -> tuple[InputResult, Counterexample | None]:
    dense = dense or DenseNet.of(protocol.net)
    initial = protocol.initial(Configuration({phi.input_state: m}))
    expected = phi(Configuration({phi.input_state: m}))
    ex = dense.explore(dense.vector(initial), budget)
    if not ex.exhausted:
        return InputResult(m, Verdict.INCONCLUSIVE, len(ex.nodes)), None
    good = _can_reach(ex, output_stable_nodes(protocol, dense, ex, expected))
    for i, ok in enumerate(good):
        if not ok:
            cex = Counterexample(
                m,
                initial,
                ex.word_to(i),
                dense.config(ex.nodes[i]),
                expected,
                f"no {expected}-output stable configuration is reachable",
            )
            return InputResult(m, Verdict.REFUTED, len(ex.nodes)), cex
    return InputResult(m, Verdict.VERIFIED, len(ex.nodes)), None


def stably_computes(
    protocol: Protocol,
    phi: CountingPredicate,
    max_input: int,
    budget: ExplorationBudget = DEFAULT_BUDGET,
) -> VerificationReport:
    """Check every input count m in [0, max_input].

    Refuted stops at the first failing m; Inconclusive when some exploration
    ran out of budget and no refutation was found.
    """
    if len(protocol.inputs) != 1:
        raise PreconditionError("counting predicates need exactly one input state")
    if phi.input_state not in protocol.inputs:
        raise PreconditionError(f"{phi.input_state!r} is not the input state", state=phi.input_state)
    if max_input < 0:
        raise ValueError("max_input must be natural")
    dense = DenseNet.of(protocol.net)
    results = []
    for m in range(max_input + 1):
        res, cex = check_input(protocol, phi, m, budget, dense)
        results.append(res)
        if cex is not None:
            return VerificationReport(Verdict.REFUTED, range(0, m + 1), cex, tuple(results))
    verdict = Verdict.VERIFIED
    if any(r.verdict is Verdict.INCONCLUSIVE for r in results):
        verdict = Verdict.INCONCLUSIVE
    return VerificationReport(verdict, range(0, max_input + 1), None, tuple(results))


# -- example protocols -------------------------------------------------


def _protocol(states, transitions, leaders, ones, zeros) -> Protocol:
    output = {s: Output.ONE for s in ones} | {s: Output.ZERO for s in zeros}
    return Protocol(PetriNet(StateSet(states), transitions), Configuration(leaders), frozenset({"i"}), OutputMap(output))


def example1_protocol(n: int) -> Protocol:
    """Leaderless, width n: (rho + i, rho + p) for every rho over {i, p} with n - 1 agents."""
    if n < 1:
        raise ValueError("n must be at least 1")
    transitions = []
    for j in range(n):
        rho = Configuration({"i": n - 1 - j, "p": j})
        transitions.append(Transition(rho + Configuration(i=1), rho + Configuration(p=1)))
    return _protocol(["i", "p"], transitions, {}, ["p"], ["i"])


def example2_protocol(n: int) -> Protocol:
    """Six states, width 2, n leaders in ibar."""
    if n < 1:
        raise ValueError("n must be at least 1")

    def t(pre, post, name):
        return Transition(Configuration(pre), Configuration(post), name)

    transitions = [
        t({"i": 1, "ibar": 1}, {"p": 1, "q": 1}, "t"),
        t({"pbar": 1, "i": 1}, {"p": 1, "i": 1}, "t_p"),
        t({"p": 1, "ibar": 1}, {"pbar": 1, "ibar": 1}, "tbar_p"),
        t({"qbar": 1, "i": 1}, {"q": 1, "i": 1}, "t_q"),
        t({"q": 1, "ibar": 1}, {"qbar": 1, "ibar": 1}, "tbar_q"),
        t({"q": 1, "pbar": 1}, {"q": 1, "p": 1}, "t_pbar"),
        t({"p": 1, "qbar": 1}, {"p": 1, "q": 1}, "t_qbar"),
    ]
    states = ["i", "ibar", "p", "pbar", "q", "qbar"]
    return _protocol(states, transitions, {"ibar": n}, ["i", "p", "q"], ["ibar", "pbar", "qbar"])


def swap_outputs(protocol: Protocol) -> Protocol:
    """The same protocol with output classes 0 and 1 exchanged."""
    flip = {Output.ZERO: Output.ONE, Output.ONE: Output.ZERO, Output.STAR: Output.STAR}
    out = OutputMap({s: flip[v] for s, v in protocol.output.assignment.items()})
    return Protocol(protocol.net, protocol.leaders, protocol.inputs, out)
