import pytest

from popstate.bottom import is_bottom
from popstate.core import Configuration, Output, OutputMap, PetriNet, Protocol, Transition
from popstate.reach import PreconditionError, reachable_set
from popstate.stab import OutputVerdict, output_stable
from popstate.verify import (
    CountingPredicate,
    Verdict,
    example1_protocol,
    example2_protocol,
    stably_computes,
    swap_outputs,
)


def test_predicate():
    phi = CountingPredicate("i", 2)
    assert phi(Configuration(i=2)) == 1 and phi(Configuration(i=1, p=5)) == 0
    assert CountingPredicate.parse(" i >= 3 ") == CountingPredicate("i", 3)
    assert str(phi) == "i>=2"
    with pytest.raises(ValueError):
        CountingPredicate("i", 0)
    with pytest.raises(ValueError):
        CountingPredicate.parse("i > 2")


def test_example1_constructor():
    assert example1_protocol(1).net.transitions == (Transition(Configuration(i=1), Configuration(p=1)),)
    got = {(t.pre, t.post) for t in example1_protocol(2).net}
    assert got == {(Configuration(i=2), Configuration(i=1, p=1)), (Configuration(i=1, p=1), Configuration(p=2))}
    assert example1_protocol(3).net.width() == 3
    p = example1_protocol(2)
    assert p.leaders == Configuration() and p.inputs == {"i"}
    assert p.output["i"] is Output.ZERO and p.output["p"] is Output.ONE


def test_example2_constructor():
    p = example2_protocol(2)
    by_name = {t.name: t for t in p.net}
    assert (by_name["t"].pre, by_name["t"].post) == (Configuration(i=1, ibar=1), Configuration(p=1, q=1))
    assert (by_name["t_p"].pre, by_name["t_p"].post) == (Configuration(pbar=1, i=1), Configuration(p=1, i=1))
    assert len(p.net) == 7 and p.net.width() == 2
    assert p.leaders == Configuration(ibar=2)
    ones = {s for s in p.net.states if p.output[s] is Output.ONE}
    assert ones == {"i", "p", "q"}
    assert all(t.is_conservative() for t in p.net)


def test_example2_verified():
    report = stably_computes(example2_protocol(2), CountingPredicate("i", 2), 5)
    assert report.verdict is Verdict.VERIFIED
    assert report.checked_inputs == range(0, 6)
    assert [r.input_count for r in report.per_input] == list(range(6))


def test_swapped_outputs_refuted_with_replay():
    proto = swap_outputs(example2_protocol(2))
    report = stably_computes(proto, CountingPredicate("i", 2), 3)
    assert report.verdict is Verdict.REFUTED
    cex = report.counterexample
    assert cex.input_count == 0 and cex.replays(proto)


def test_max_input_zero():
    proto = example2_protocol(1)
    report = stably_computes(proto, CountingPredicate("i", 1), 0)
    assert report.verdict is Verdict.VERIFIED and report.checked_inputs == range(0, 1)
    # a leader stuck in an output-1 state never reaches S_0
    bad = Protocol(PetriNet(["i", "l"], []), Configuration(l=1), frozenset({"i"}),
                   OutputMap({"i": Output.ZERO, "l": Output.ONE}))
    assert stably_computes(bad, CountingPredicate("i", 1), 0).verdict is Verdict.REFUTED


def test_inconclusive_on_budget():
    from popstate.reach import ExplorationBudget

    report = stably_computes(example2_protocol(3), CountingPredicate("i", 3), 4, ExplorationBudget(5))
    assert report.verdict is Verdict.INCONCLUSIVE


def test_preconditions():
    proto = example2_protocol(1)
    with pytest.raises(PreconditionError):
        stably_computes(proto, CountingPredicate("p", 1), 1)
    two_inputs = Protocol(proto.net, proto.leaders, frozenset({"i", "p"}), proto.output)
    with pytest.raises(PreconditionError):
        stably_computes(two_inputs, CountingPredicate("i", 1), 1)
    with pytest.raises(ValueError):
        stably_computes(proto, CountingPredicate("i", 1), -1)


@pytest.mark.parametrize("make", [example1_protocol, example2_protocol])
def test_dichotomy_of_bottom_configurations(make):
    n = 2
    proto = make(n)
    for m in range(5):
        start = proto.initial(Configuration(i=m))
        want = OutputVerdict.STABLE_ONE if m >= n else OutputVerdict.STABLE_ZERO
        for c in reachable_set(proto.net, start).configurations:
            if is_bottom(proto.net, c):
                verdict = output_stable(proto, c).verdict
                assert verdict is want or (m == 0 and not c and verdict is OutputVerdict.STABLE_ZERO)
