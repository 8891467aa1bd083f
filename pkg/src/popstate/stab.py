"""Output semantics: extended outputs, 0/1-output stability and (T,F)-stabilization."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

from . import kernels
from .core import Configuration, Output, PetriNet, Protocol
from .reach import (
    DEFAULT_BUDGET,
    CoverWitness,
    DenseNet,
    ExplorationBudget,
    PreconditionError,
    UpwardClosure,
    Word,
    fire_word,
)


class OutputVerdict(enum.Enum):
    STABLE_ZERO = "STABLE0"
    STABLE_ONE = "STABLE1"
    UNSTABLE = "UNSTABLE"
    UNKNOWN = "UNKNOWN"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class StabilityResult:
    """Verdict plus, when a stability class fails, a run showing why.

    ``not_zero`` reaches a configuration whose output is not within {0};
    ``not_one`` reaches one whose output is not exactly {1}.
    """

    verdict: OutputVerdict
    not_zero: CoverWitness | None = None
    not_one: CoverWitness | None = None


def gamma_extended(protocol: Protocol, c: Configuration) -> frozenset[Output]:
    return frozenset(protocol.output[s] for s, _ in c.items())


class StabilizationOracle:
    """Decides (T,F)-stabilization for many configurations of one net.

    A configuration is stabilized iff no state outside F is coverable from
    it, i.e. iff it lies outside the upward-closed set computed once here.
    """

    def __init__(self, net: PetriNet, allowed: Iterable[str]):
        self.net = net
        self.allowed = frozenset(allowed)
        self.dense = DenseNet.of(net)
        dims = self.dense.dims.names
        targets = [tuple(1 if s == p else 0 for s in dims) for p in dims if p not in self.allowed]
        self.closure = UpwardClosure(self.dense, targets)
        self.basis = self.closure.saturate()

    def is_stabilized(self, c: Configuration) -> bool:
        return not kernels.dominated(self.dense.vector(c), self.basis)

    def violation(self, c: Configuration) -> CoverWitness | None:
        word = self.closure.witness(self.dense.vector(c))
        if word is None:
            return None
        return CoverWitness(word, fire_word(self.net, c, word))


def is_stabilized(net: PetriNet, allowed: Iterable[str], c: Configuration) -> bool:
    """True iff every configuration reachable from ``c`` only populates ``allowed``."""
    return StabilizationOracle(net, allowed).is_stabilized(c)


def _zero_reachable(net: PetriNet, c: Configuration, budget: ExplorationBudget):
    """(found word | None, decided) for reaching the zero configuration."""
    if not c:
        return (), True
    if all(t.post.agents() >= t.pre.agents() for t in net.transitions):
        return None, True
    dense = DenseNet.of(net)
    ex = dense.explore(dense.vector(c), budget)
    zero = tuple(0 for _ in dense.dims)
    for i, v in enumerate(ex.nodes):
        if v == zero:
            return ex.word_to(i), True
    return None, ex.exhausted


def output_stable(
    protocol: Protocol, c: Configuration, budget: ExplorationBudget = DEFAULT_BUDGET
) -> StabilityResult:
    net = protocol.net
    zero_states = protocol.output.preimage(Output.ZERO)
    one_states = protocol.output.preimage(Output.ONE)
    not_zero = StabilizationOracle(net, zero_states).violation(c)
    if not_zero is None:
        return StabilityResult(OutputVerdict.STABLE_ZERO)
    # c != 0 here: the zero configuration is always 0-output stable
    not_one = StabilizationOracle(net, one_states).violation(c)
    if not_one is not None:
        return StabilityResult(OutputVerdict.UNSTABLE, not_zero, not_one)
    word, decided = _zero_reachable(net, c, budget)
    if word is not None:
        return StabilityResult(OutputVerdict.UNSTABLE, not_zero, CoverWitness(word, fire_word(net, c, word)))
    if not decided:
        return StabilityResult(OutputVerdict.UNKNOWN, not_zero)
    return StabilityResult(OutputVerdict.STABLE_ONE, not_zero)


def stabilization_threshold(net: PetriNet) -> int:
    """Smallest positive h with h >= ||T|| (1 + ||T||) ** (|P| ** |P|)."""
    norm = net.norm_inf()
    d = len(net.states)
    return max(1, norm * (1 + norm) ** (d**d))


@dataclass(frozen=True)
class SampleVerdict:
    sample: Configuration
    in_region: bool
    stabilized: bool | None


@dataclass(frozen=True)
class RegionReport:
    small_states: frozenset[str]
    verdicts: tuple[SampleVerdict, ...]

    @property
    def counterexamples(self) -> tuple[Configuration, ...]:
        return tuple(v.sample for v in self.verdicts if v.in_region and not v.stabilized)


def stabilized_region_check(
    net: PetriNet,
    allowed: Iterable[str],
    rho: Configuration,
    h: int,
    samples: Sequence[Configuration],
    oracle: StabilizationOracle | None = None,
) -> RegionReport:
    """Check that samples agreeing with ``rho`` below ``h`` are stabilized too.

    R = {p : rho(p) < h}; a sample is in the region when it is <= rho on R.
    Samples outside the region get ``stabilized=None``.  The bound on ``h``
    under which no counterexample may exist is not enforced.
    """
    if oracle is None:
        oracle = StabilizationOracle(net, allowed)
    if not oracle.is_stabilized(rho):
        raise PreconditionError(f"{rho} is not stabilized")
    small = frozenset(p for p in net.states if rho[p] < h)
    bound = rho.restrict(small)
    verdicts = []
    for alpha in samples:
        inside = alpha.restrict(small) <= bound
        verdicts.append(SampleVerdict(alpha, inside, oracle.is_stabilized(alpha) if inside else None))
    return RegionReport(small, tuple(verdicts))


__all__ = [
    "OutputVerdict",
    "RegionReport",
    "SampleVerdict",
    "StabilityResult",
    "StabilizationOracle",
    "Word",
    "gamma_extended",
    "is_stabilized",
    "output_stable",
    "stabilization_threshold",
    "stabilized_region_check",
]
