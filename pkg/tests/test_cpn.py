import random
from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from oracles import action_rows, brute_hilbert, random_closed_walk, random_control_net
from popstate.core import Action, Configuration, PetriNet, StateSet, Transition
from popstate.cpn import (
    ComponentTooLarge,
    ControlGraph,
    DiophantineSystem,
    GraphError,
    build_control_graph,
    check_reduction,
    decompose_simple,
    decompose_solution,
    euler_cycle,
    hilbert_basis,
    is_simple,
    multicycle_displacement,
    multicycle_parikh,
    parikh,
    path_displacement,
    realize_multicycle,
    reduce_multicycle,
    reduction_factor,
    total_cycle,
)
from popstate.reach import PreconditionError
from popstate.verify import example2_protocol


def graph(pairs, ys=(), extra=None):
    """Control graph on one-hot controls x0.. with an edge a -> b per pair."""
    n = 1 + max(max(p) for p in pairs)
    xs = [f"x{i}" for i in range(n)]
    transitions = []
    for j, (a, b) in enumerate(pairs):
        pre, post = {xs[a]: 1}, {xs[b]: 1}
        if extra:
            for y, (u, v) in extra.get(j, {}).items():
                pre[y] = pre.get(y, 0) + u
                post[y] = post.get(y, 0) + v
        transitions.append(Transition(Configuration(pre), Configuration(post)))
    net = PetriNet(StateSet(xs + list(ys)), transitions)
    return build_control_graph(net, xs, Configuration(x0=1))


# -- build_control_graph -----------------------------------------------


def test_empty_projection_gives_self_loops():
    net = PetriNet(["p", "q"], [Transition(Configuration(p=1), Configuration(q=1)),
                                Transition(Configuration(q=1), Configuration(p=2))])
    g = build_control_graph(net, [], Configuration())
    assert g.controls == (Configuration(),)
    assert g.edges == ((0, 0, 0), (0, 1, 0))


def test_empty_net_has_no_edges():
    g = build_control_graph(PetriNet(["p"], []), ["p"], Configuration(p=3))
    assert g.controls == (Configuration(p=3),) and g.edges == ()


def test_example2_projection_is_infinite():
    net = example2_protocol(2).net
    with pytest.raises(ComponentTooLarge):
        build_control_graph(net, ["p", "q"], Configuration(p=1, q=1))


def test_finite_projected_component():
    g = graph([(0, 1), (1, 0), (1, 2), (2, 0)])
    assert g.num_controls == 3
    assert len(g.edges) == 4 and g.strongly_connected()
    assert len(g.edges) <= g.num_controls * len(g.net)
    for e in g.edges:
        assert g.controls[e.source][f"x{e.target}"] == 0 or e.source == e.target


def test_seed_outside_q_rejected():
    with pytest.raises(PreconditionError):
        build_control_graph(PetriNet(["p", "q"], []), ["p"], Configuration(q=1))


def test_graph_rejects_bad_edges():
    net = PetriNet(["p", "q"], [Transition(Configuration(p=1), Configuration(q=1))])
    with pytest.raises(GraphError):
        ControlGraph(net, ["p", "q"], [Configuration(p=1), Configuration(q=1)], [(1, 0, 0)])


# -- paths ---------------------------------------------------------------


def test_parikh_examples():
    assert parikh(()) == {}
    assert parikh((4, 4, 4)) == {4: 3}
    assert parikh((1, 2, 1)) == {1: 2, 2: 1}


def test_displacement_examples():
    g = graph([(0, 1), (1, 0)])
    assert path_displacement(g, ()) == Action()
    assert path_displacement(g, (0,)) == Action(x0=-1, x1=1)
    assert path_displacement(g, (0, 1)) == Action()


def test_euler_examples():
    loop = graph([(0, 0)])
    assert euler_cycle(loop, {0: 3}, 0) == (0, 0, 0)
    two = graph([(0, 1), (1, 0)])
    c = euler_cycle(two, {0: 2, 1: 2}, 0)
    assert len(c) == 4 and two.is_cycle(c) and parikh(c) == {0: 2, 1: 2}
    assert euler_cycle(two, {}, 0) == ()
    assert euler_cycle(two, {0: 0}, 1) == ()


def test_euler_errors():
    two = graph([(0, 1), (1, 0)])
    with pytest.raises(GraphError):
        euler_cycle(two, {0: 2, 1: 1}, 0)
    split = graph([(0, 0), (0, 1), (1, 1), (1, 0)])
    with pytest.raises(GraphError):
        euler_cycle(split, {0: 1, 2: 1}, 0)
    with pytest.raises(GraphError):
        euler_cycle(split, {2: 1}, 0)


def test_total_cycle_examples():
    g = graph([(0, 0), (0, 0)], ys=["y"], extra={1: {"y": (0, 1)}})
    c = total_cycle(g, 0)
    assert sorted(c) == [0, 1]
    assert total_cycle(graph([(0, 1), (1, 0)]), 0) == (0, 1)
    assert total_cycle(graph([(0, 0)]), 0) == (0,)


def test_total_cycle_needs_strong_connectivity():
    net = PetriNet(["x0", "x1"], [Transition(Configuration(x0=1), Configuration(x1=1))])
    g = build_control_graph(net, ["x0", "x1"], Configuration(x1=1))
    with pytest.raises(GraphError):
        total_cycle(g, 0)
    with pytest.raises(GraphError):
        total_cycle(build_control_graph(PetriNet(["p"], []), ["p"], Configuration()), 0)


def test_decompose_examples():
    two = graph([(0, 1), (1, 0)])
    assert decompose_simple(two, (0, 1)) == ((0, 1),)
    loop = graph([(0, 0)])
    assert decompose_simple(loop, (0, 0)) == ((0,), (0,))
    eight = graph([(0, 1), (1, 0), (0, 2), (2, 0)])
    by_t = {e.transition: i for i, e in enumerate(eight.edges)}
    walk = tuple(by_t[t] for t in (0, 1, 2, 3))
    parts = decompose_simple(eight, walk)
    assert sorted(parts) == sorted([walk[:2], walk[2:]])
    assert all(is_simple(eight, c) for c in parts)


# -- Hilbert bases -------------------------------------------------------


def test_hilbert_examples():
    sys = DiophantineSystem(("p",), {"p": 1}, (Action(p=1),))
    assert hilbert_basis(sys) == [(Configuration(p=1), {0: 1})]
    sys = DiophantineSystem(("p",), {"p": 0}, (Action(p=1), Action(p=-1)))
    assert hilbert_basis(sys) == [(Configuration(), {0: 1, 1: 1})]
    sys = DiophantineSystem(("p",), {"p": 1}, (Action(p=2), Action(p=1)))
    assert sorted(hilbert_basis(sys), key=lambda h: sorted(h[1])) == [
        (Configuration(p=2), {0: 1}),
        (Configuration(p=1), {1: 1}),
    ]


def test_hilbert_negative_sign():
    sys = DiophantineSystem(("p", "q"), {"p": -1, "q": 1}, (Action(p=-1, q=1),))
    assert hilbert_basis(sys) == [(Configuration(p=1, q=1), {0: 1})]
    assert hilbert_basis(DiophantineSystem(("p",), {"p": 1}, (Action(p=-1),))) == []


def test_system_validation():
    with pytest.raises(ValueError):
        DiophantineSystem(("p",), {"p": 2}, ())
    with pytest.raises(ValueError):
        DiophantineSystem(("p",), {"p": 1}, (Action(q=1),))


def _random_system(rng, d, na, lo=-3, hi=3):
    states = tuple(f"p{i}" for i in range(d))
    signs = {p: rng.choice((1, -1)) for p in states}
    actions = tuple(Action({p: rng.randint(lo, hi) for p in states}) for _ in range(na))
    return DiophantineSystem(states, signs, actions)


seeds = st.integers(0, 2**32 - 1)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_hilbert_matches_brute_force_small(seed):
    rng = random.Random(seed)
    sys = _random_system(rng, rng.randint(1, 2), rng.randint(1, 3), -2, 2)
    got = sorted(sys.join(a, b) for a, b in hilbert_basis(sys))
    rows = action_rows(list(sys.actions), sys.states)
    want, bound = brute_hilbert([sys.signs[p] for p in sys.states], rows)
    assert got == want
    for x in got:
        assert sum(x) <= bound
        assert sys.is_solution(*sys.split(x))


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_solutions_decompose_into_basis(seed):
    rng = random.Random(seed)
    sys = _random_system(rng, rng.randint(1, 3), rng.randint(1, 3), -2, 2)
    basis = hilbert_basis(sys)
    if not basis:
        return
    vecs = [sys.join(a, b) for a, b in basis]
    x = [0] * len(vecs[0])
    for _ in range(rng.randint(1, 4)):
        h = rng.choice(vecs)
        x = [u + v for u, v in zip(x, h)]
    parts = decompose_solution(sys, x)
    assert [sum(c) for c in zip(*parts)] == x
    assert all(sys.is_solution(*sys.split(p)) for p in parts)
    assert all(p in vecs for p in parts)


# -- random control graphs -----------------------------------------------


def _random_graph(rng, controls=None, edges=None, **kw):
    net, xs, seed = random_control_net(rng, controls or rng.randint(1, 5), edges or rng.randint(5, 10), **kw)
    return build_control_graph(net, xs, seed)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_euler_and_decompose_preserve_images(seed):
    rng = random.Random(seed)
    g = _random_graph(rng)
    start = rng.randrange(g.num_controls)
    walk = random_closed_walk(rng, g, start, rng.randint(1, 12))
    if not walk:
        return
    c = euler_cycle(g, parikh(walk), start)
    assert g.is_cycle(c) and g.edges[c[0]].source == start
    assert parikh(c) == parikh(walk)
    parts = decompose_simple(g, walk)
    assert all(is_simple(g, p) for p in parts)
    assert multicycle_parikh(parts) == parikh(walk)
    assert multicycle_displacement(g, parts) == path_displacement(g, walk)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_total_cycle_covers_every_edge(seed):
    rng = random.Random(seed)
    g = _random_graph(rng)
    anchor = rng.randrange(g.num_controls)
    c = total_cycle(g, anchor)
    assert g.is_cycle(c) and g.edges[c[0]].source == anchor
    assert set(c) == set(range(len(g.edges)))
    assert len(c) <= len(g.edges) * g.num_controls


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_realization_matches_image(seed):
    rng = random.Random(seed)
    g = _random_graph(rng)
    cycles = {}
    for j in range(rng.randint(1, 4)):
        s = rng.randrange(g.num_controls)
        walk = random_closed_walk(rng, g, s, rng.randint(1, 5))
        if walk:
            cycles[j] = walk
    mult = {j: rng.randint(1, 3) for j in cycles}
    out = realize_multicycle(g, cycles, mult)
    want = Counter()
    for j, c in cycles.items():
        for e in c:
            want[e] += mult[j]
    assert multicycle_parikh(out) == dict(want)
    assert all(g.is_cycle(c) for c in out)


# -- multicycle reduction ------------------------------------------------


def test_reduce_zero_loop_large_k():
    g = graph([(0, 0)])
    out = reduce_multicycle(g, [(0,)], [], 10**6)
    assert check_reduction(g, [(0,)], out, [], 10**6) == []
    # the loop itself is an admissible answer too
    assert check_reduction(g, [(0,)], [(0,)], [], 10**6) == []


def test_reduce_keeps_heavy_edges_and_states():
    g = graph([(0, 1), (1, 0)], ys=["y"], extra={0: {"y": (0, 1)}})
    theta = [(0, 1)] * 5
    k = 3
    out = reduce_multicycle(g, theta, [], k)
    assert check_reduction(g, theta, out, [], k) == []
    assert multicycle_displacement(g, out)["y"] > 0


def test_reduce_precondition():
    g = graph([(0, 1), (1, 0)], ys=["y"], extra={0: {"y": (0, 1)}})
    with pytest.raises(PreconditionError):
        reduce_multicycle(g, [(0, 1)], ["y"], 1)
    with pytest.raises(PreconditionError):
        reduce_multicycle(g, [(0,)], [], 10)
    assert reduction_factor(g) == (1 + 2 * 2 * 1) ** (3 * 4)


def test_checker_detects_violations():
    g = graph([(0, 1), (1, 0)], ys=["y"], extra={0: {"y": (0, 1)}})
    theta = [(0, 1)] * 5
    assert "edge:0" in check_reduction(g, theta, [], [], 3)
    assert "sign:y" in check_reduction(g, theta, [], [], 3)
    assert "zero:y" in check_reduction(g, theta, theta, ["y"], 3)
    assert "cycles" in check_reduction(g, theta, [(0,)], [], 3)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_reduce_passes_checker(seed):
    rng = random.Random(seed)
    g = _random_graph(rng, controls=rng.randint(1, 3), edges=rng.randint(3, 5), num_y=1)
    theta = []
    for _ in range(rng.randint(1, 3)):
        walk = random_closed_walk(rng, g, rng.randrange(g.num_controls), rng.randint(1, 4))
        if walk:
            theta.extend([walk] * rng.randint(1, 4))
    if not theta:
        return
    delta = multicycle_displacement(g, theta)
    qr = [p for p in g.net.states if delta[p] == 0]
    k = rng.randint(1, 6)
    out = reduce_multicycle(g, theta, qr, k)
    assert check_reduction(g, theta, out, qr, k) == []
