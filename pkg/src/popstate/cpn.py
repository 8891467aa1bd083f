"""Petri nets with control-states: paths, cycles, multicycles and their linear algebra.

A control graph has the configurations of a finite component of T|_Q as its
control-states and one edge (s, t, s') whenever s fires t|_Q into s'.  Edge
displacements are those of the full transitions.
"""
from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple, Sequence

from . import kernels
from .core import Action, Configuration, PetriNet
from .reach import DEFAULT_BUDGET, DenseNet, Exploration, ExplorationBudget, PreconditionError

EdgePath = tuple[int, ...]
Multicycle = tuple[EdgePath, ...]


class GraphError(ValueError):
    pass


class ComponentTooLarge(GraphError):
    """The projected component is infinite or larger than the budget."""


class Edge(NamedTuple):
    source: int
    transition: int
    target: int


class ControlGraph:
    """(S, T, E) with controls indexed in canonical order and edges sorted by (source, transition)."""

    def __init__(
        self,
        net: PetriNet,
        q: Iterable[str],
        controls: Sequence[Configuration],
        edges: Iterable[tuple[int, int, int]],
    ):
        self.net = net
        self.q = net.states.subset(q).names
        self.controls = tuple(controls)
        if not self.controls:
            raise GraphError("a control graph needs at least one control-state")
        if len(set(self.controls)) != len(self.controls):
            raise GraphError("duplicate control-states")
        dense = DenseNet.of(net, self.q)
        vecs = [dense.vector(c) for c in self.controls]
        seen: dict[tuple[int, int], int] = {}
        for s, t, s2 in edges:
            if not (0 <= s < len(vecs) and 0 <= s2 < len(vecs) and 0 <= t < len(net)):
                raise GraphError(f"edge {(s, t, s2)} refers to unknown controls or transitions")
            if dense.fire(vecs[s], t) != vecs[s2]:
                raise GraphError(f"control {s} does not fire transition {t} into control {s2}")
            seen[(s, t)] = s2
        self.edges = tuple(Edge(s, t, s2) for (s, t), s2 in sorted(seen.items()))
        self._disp = [net.transitions[e.transition].displacement() for e in self.edges]
        self._out: list[list[int]] = [[] for _ in self.controls]
        for i, e in enumerate(self.edges):
            self._out[e.source].append(i)

    @property
    def num_controls(self) -> int:
        return len(self.controls)

    def control_index(self, c: Configuration | int) -> int:
        if isinstance(c, int):
            if not 0 <= c < len(self.controls):
                raise GraphError(f"no control-state {c}")
            return c
        try:
            return self.controls.index(c.restrict(self.q))
        except ValueError:
            raise GraphError(f"{c} is not a control-state") from None

    def out_edges(self, s: int) -> list[int]:
        return self._out[s]

    def edge_displacement(self, e: int) -> Action:
        return self._disp[e]

    def is_path(self, path: Sequence[int]) -> bool:
        if any(not 0 <= e < len(self.edges) for e in path):
            return False
        return all(self.edges[a].target == self.edges[b].source for a, b in zip(path, path[1:]))

    def is_cycle(self, path: Sequence[int]) -> bool:
        return bool(path) and self.is_path(path) and self.edges[path[-1]].target == self.edges[path[0]].source

    def strongly_connected(self) -> bool:
        n = len(self.controls)

        def reach(adj):
            seen = {0}
            stack = [0]
            while stack:
                s = stack.pop()
                for s2 in adj[s]:
                    if s2 not in seen:
                        seen.add(s2)
                        stack.append(s2)
            return len(seen) == n

        fwd: list[list[int]] = [[] for _ in range(n)]
        bwd: list[list[int]] = [[] for _ in range(n)]
        for e in self.edges:
            fwd[e.source].append(e.target)
            bwd[e.target].append(e.source)
        return reach(fwd) and reach(bwd)

    def shortest_path(self, s: int, s2: int) -> EdgePath | None:
        """Fewest edges from s to s2, choosing lowest edge indices on ties."""
        if s == s2:
            return ()
        prev: dict[int, int] = {s: -1}
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for e in self._out[u]:
                v = self.edges[e].target
                if v not in prev:
                    prev[v] = e
                    if v == s2:
                        path = []
                        while v != s:
                            path.append(prev[v])
                            v = self.edges[prev[v]].source
                        return tuple(reversed(path))
                    queue.append(v)
        return None

    def edge_name(self, e: int) -> str:
        return f"e{e + 1}"


def build_control_graph(
    net: PetriNet,
    q: Iterable[str],
    seed: Configuration,
    budget: ExplorationBudget = DEFAULT_BUDGET,
) -> ControlGraph:
    """Control graph on the T|_Q-component of ``seed`` (controls in breadth-first order)."""
    q = net.states.subset(q).names
    extra = seed.support() - set(q)
    if extra:
        raise PreconditionError(f"seed populates states outside Q: {sorted(extra)}")
    dense = DenseNet.of(net, q)
    start = dense.vector(seed)
    ex = dense.explore(start, budget)
    if ex.exhausted:
        members = [ex.nodes[i] for i in sorted(ex.backward_closure([0]))]
    else:
        # a finite backward set also pins the component down
        rev = kernels.explore(start, dense.posts, dense.pres, budget.max_configurations,
                              -1 if budget.max_depth is None else budget.max_depth)
        back = Exploration(*rev)
        if not back.exhausted:
            raise ComponentTooLarge("the projected component of the seed is infinite or exceeds the budget")
        members = [back.nodes[i] for i in sorted(back.backward_closure([0]))]
    index = {v: k for k, v in enumerate(members)}
    controls = [dense.config(v) for v in members]
    edges = []
    for k, v in enumerate(members):
        for t in range(len(net)):
            w = dense.fire(v, t)
            if w is not None and w in index:
                edges.append((k, t, index[w]))
    return ControlGraph(net, q, controls, edges)


def parikh(path: Iterable[int]) -> dict[int, int]:
    return dict(sorted(Counter(path).items()))


def multicycle_parikh(theta: Iterable[Iterable[int]]) -> dict[int, int]:
    total: Counter = Counter()
    for c in theta:
        total.update(c)
    return dict(sorted(total.items()))


def path_displacement(g: ControlGraph, path: Iterable[int]) -> Action:
    total: dict[str, int] = {}
    for e in path:
        for s, v in g.edge_displacement(e).items():
            total[s] = total.get(s, 0) + v
    return Action(total)


def multicycle_displacement(g: ControlGraph, theta: Iterable[Iterable[int]]) -> Action:
    total = Action()
    for c in theta:
        total = total + path_displacement(g, c)
    return total


def euler_cycle(g: ControlGraph, phi: Mapping[int, int], anchor: Configuration | int) -> EdgePath:
    """A single cycle from ``anchor`` whose Parikh image is exactly ``phi``.

    ``phi`` must be balanced at every control and its support connected and
    touching ``anchor``.  Edges are taken lowest-index first.
    """
    start = g.control_index(anchor)
    remaining = [0] * len(g.edges)
    for e, k in phi.items():
        if not 0 <= e < len(g.edges):
            raise GraphError(f"unknown edge {e}")
        if k < 0:
            raise GraphError(f"negative multiplicity for edge {e}")
        remaining[e] = k
    total = sum(remaining)
    if total == 0:
        return ()
    balance = [0] * g.num_controls
    for e, k in enumerate(remaining):
        balance[g.edges[e].source] -= k
        balance[g.edges[e].target] += k
    bad = [s for s, b in enumerate(balance) if b]
    if bad:
        raise GraphError(f"in-flow differs from out-flow at controls {bad}")
    if not any(remaining[e] for e in g.out_edges(start)):
        raise GraphError("the anchor is not on any edge of the image")
    cursor = [0] * g.num_controls
    stack = [(start, -1)]
    circuit = []
    while stack:
        s, via = stack[-1]
        out = g.out_edges(s)
        while cursor[s] < len(out) and remaining[out[cursor[s]]] == 0:
            cursor[s] += 1
        if cursor[s] < len(out):
            e = out[cursor[s]]
            remaining[e] -= 1
            stack.append((g.edges[e].target, e))
        else:
            stack.pop()
            if via >= 0:
                circuit.append(via)
    if len(circuit) != total:
        raise GraphError("the support of the image is not connected")
    return tuple(reversed(circuit))


def total_cycle(g: ControlGraph, anchor: Configuration | int) -> EdgePath:
    """A cycle from ``anchor`` using every edge, of length at most |E| * |S|.

    One simple cycle is taken through each edge not yet covered (the edge
    followed by a shortest way back); the sum is merged into one cycle.
    """
    start = g.control_index(anchor)
    if not g.edges:
        raise GraphError("the control graph has no edges")
    if not g.strongly_connected():
        raise GraphError("the control graph is not strongly connected")
    phi: Counter = Counter()
    for e, edge in enumerate(g.edges):
        if phi[e]:
            continue
        back = g.shortest_path(edge.target, edge.source)
        phi.update((e, *back))
    return euler_cycle(g, phi, start)


def decompose_simple(g: ControlGraph, theta: Sequence[int]) -> Multicycle:
    """Split a cycle into simple cycles with the same Parikh image."""
    if not theta:
        return ()
    if not g.is_cycle(theta):
        raise GraphError("not a cycle")
    start = g.edges[theta[0]].source
    controls = [start]
    position = {start: 0}
    edges: list[int] = []
    out = []
    for e in theta:
        s2 = g.edges[e].target
        edges.append(e)
        if s2 in position:
            i = position[s2]
            out.append(tuple(edges[i:]))
            del edges[i:]
            for c in controls[i + 1:]:
                del position[c]
            del controls[i + 1:]
        else:
            position[s2] = len(controls)
            controls.append(s2)
    assert not edges
    return tuple(out)


def is_simple(g: ControlGraph, theta: Sequence[int]) -> bool:
    if not g.is_cycle(theta):
        return False
    targets = [g.edges[e].target for e in theta]
    return len(set(targets)) == len(targets)


# -- Diophantine systems ------------------------------------------------


@dataclass(frozen=True)
class DiophantineSystem:
    """Unknowns (alpha, beta) in N^P x N^A with s(p) alpha(p) = sum_a beta(a) a(p) for each p.

    A sign of 0 drops alpha(p) from its equation.
    """

    states: tuple[str, ...]
    signs: Mapping[str, int]
    actions: tuple[Action, ...]

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "actions", tuple(self.actions))
        object.__setattr__(self, "signs", dict(self.signs))
        for p in self.states:
            if self.signs.get(p) not in (1, -1, 0):
                raise ValueError(f"sign of {p!r} must be +1, -1 or 0")
        for a in self.actions:
            extra = a.support() - set(self.states)
            if extra:
                raise ValueError(f"action uses undeclared states {sorted(extra)}")

    @property
    def dimension(self) -> int:
        return len(self.states)

    def columns(self) -> list[tuple[int, ...]]:
        """Columns of the homogeneous matrix over the joint unknown (alpha, beta)."""
        cols = []
        for p in self.states:
            cols.append(tuple(self.signs[p] if r == p else 0 for r in self.states))
        for a in self.actions:
            cols.append(tuple(-a[r] for r in self.states))
        return cols

    def split(self, x: Sequence[int]) -> tuple[Configuration, dict[int, int]]:
        d = len(self.states)
        alpha = Configuration(zip(self.states, x[:d]))
        beta = {j: v for j, v in enumerate(x[d:]) if v}
        return alpha, beta

    def join(self, alpha: Mapping[str, int], beta: Mapping[int, int]) -> tuple[int, ...]:
        return tuple(alpha.get(p, 0) for p in self.states) + tuple(
            beta.get(j, 0) for j in range(len(self.actions))
        )

    def is_solution(self, alpha: Mapping[str, int], beta: Mapping[int, int]) -> bool:
        if any(v < 0 for v in alpha.values()) or any(v < 0 for v in beta.values()):
            return False
        for p in self.states:
            rhs = sum(k * self.actions[j][p] for j, k in beta.items())
            if self.signs[p] * alpha.get(p, 0) != rhs:
                return False
            if self.signs[p] == 0 and alpha.get(p, 0):
                return False
        return True

    def pottier_bound(self) -> int:
        return (2 + sum(a.norm_inf() for a in self.actions)) ** self.dimension


def _hilbert_vectors(sys: DiophantineSystem, upper: Sequence[int] | None = None) -> list[tuple[int, ...]]:
    cols = sys.columns()
    if upper is None:
        # alpha(p) with sign 0 never appears in a minimal solution
        d = sys.dimension
        upper = [None] * len(cols)
        capped = [0 if j < d and sys.signs[sys.states[j]] == 0 else None for j in range(len(cols))]
        if any(c is not None for c in capped):
            big = 2**62
            return kernels.hilbert_cd(cols, [big if c is None else c for c in capped])
        return kernels.hilbert_cd(cols)
    return kernels.hilbert_cd(cols, list(upper))


def hilbert_basis(sys: DiophantineSystem) -> list[tuple[Configuration, dict[int, int]]]:
    """All minimal nonzero solutions, sorted by the joint vector."""
    return [sys.split(x) for x in _hilbert_vectors(sys)]


def decompose_solution(sys: DiophantineSystem, x: Sequence[int]) -> list[tuple[int, ...]]:
    """Write solution ``x`` as a sum of minimal solutions (greedy, always succeeds)."""
    x = tuple(x)
    if any(x):
        basis = _hilbert_vectors(sys, x)
    else:
        basis = []
    parts = []
    rest = x
    while any(rest):
        for h in basis:
            if all(a <= b for a, b in zip(h, rest)):
                parts.append(h)
                rest = tuple(b - a for a, b in zip(h, rest))
                break
        else:  # pragma: no cover - every nonzero solution dominates a minimal one
            raise AssertionError("solution does not dominate any minimal solution")
    return parts


# -- multicycle reduction -----------------------------------------------


def reduction_factor(g: ControlGraph) -> int:
    """(1 + 2 |S| ||T||) ** (d (d + 1)) with d = |P|."""
    d = len(g.net.states)
    return (1 + 2 * g.num_controls * g.net.norm_inf()) ** (d * (d + 1))


def reduce_multicycle(g: ControlGraph, theta: Sequence[Sequence[int]], qr: Iterable[str], k: int) -> Multicycle:
    """A short multicycle keeping the sign pattern of Delta(theta), zero on ``qr``,
    and using every edge that ``theta`` uses at least ``k`` times."""
    qr = frozenset(qr)
    net = g.net
    if net.norm_inf() == 0:
        raise PreconditionError("the net must have a non-trivial transition")
    for c in theta:
        if not g.is_cycle(c):
            raise PreconditionError(f"{tuple(c)} is not a cycle")
    delta = multicycle_displacement(g, theta)
    threshold = delta.restrict(qr).norm1() * reduction_factor(g)
    if not k > threshold:
        raise PreconditionError(f"k = {k} must exceed {threshold}")

    simple: list[EdgePath] = []
    for c in theta:
        simple.extend(decompose_simple(g, tuple(c)))
    cycles = sorted(set(simple))
    counts = Counter(simple)
    states = net.states.names
    signs = {p: 1 if delta[p] >= 0 else -1 for p in states}
    system = DiophantineSystem(states, signs, tuple(path_displacement(g, c) for c in cycles))
    f = {p: abs(delta[p]) for p in states}
    x = system.join(f, {j: counts[c] for j, c in enumerate(cycles)})
    parts = decompose_solution(system, x)
    d = len(states)
    qr_index = [i for i, p in enumerate(states) if p in qr]
    h0 = [h for h in parts if all(h[i] == 0 for i in qr_index)]

    heavy_edges = [e for e, n in multicycle_parikh(theta).items() if n >= k]
    heavy_states = [i for i, p in enumerate(states) if abs(delta[p]) >= k]
    chosen = []
    for e in heavy_edges:
        for h in h0:
            if any(h[d + j] and e in cycles[j] for j in range(len(cycles))):
                chosen.append(h)
                break
        else:
            raise GraphError(f"no zero-on-Q part of the decomposition uses edge {e}")
    for i in heavy_states:
        for h in h0:
            if h[i]:
                chosen.append(h)
                break
        else:
            raise GraphError(f"no zero-on-Q part of the decomposition moves state {states[i]}")
    beta = Counter()
    for h in chosen:
        for j in range(len(cycles)):
            if h[d + j]:
                beta[j] += h[d + j]
    return realize_multicycle(g, {j: cycles[j] for j in beta}, beta)


def realize_multicycle(
    g: ControlGraph, cycles: Mapping[int, EdgePath], multiplicity: Mapping[int, int]
) -> Multicycle:
    """One cycle per connected piece of the summed edge image, anchored at its least control."""
    phi: Counter = Counter()
    for j, n in multiplicity.items():
        for e in cycles[j]:
            phi[e] += n
    if not phi:
        return ()
    parent = list(range(g.num_controls))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for e in phi:
        a, b = find(g.edges[e].source), find(g.edges[e].target)
        if a != b:
            parent[max(a, b)] = min(a, b)
    pieces: dict[int, dict[int, int]] = {}
    for e, n in sorted(phi.items()):
        pieces.setdefault(find(g.edges[e].source), {})[e] = n
    out = []
    for root in sorted(pieces):
        piece = pieces[root]
        anchor = min(g.edges[e].source for e in piece)
        out.append(euler_cycle(g, piece, anchor))
    return tuple(out)


def check_reduction(
    g: ControlGraph, theta: Sequence[Sequence[int]], reduced: Sequence[Sequence[int]], qr: Iterable[str], k: int
) -> list[str]:
    """Names of the violated reduction clauses (empty when all hold)."""
    failed = []
    if any(not g.is_cycle(c) for c in reduced):
        failed.append("cycles")
    before = multicycle_displacement(g, theta)
    after = multicycle_displacement(g, reduced)
    for p in g.net.states:
        b, a = before[p], after[p]
        if (b <= 0 and a > 0) or (b <= -k and a >= 0) or (b >= 0 and a < 0) or (b >= k and a <= 0):
            failed.append(f"sign:{p}")
    for p in qr:
        if after[p] != 0:
            failed.append(f"zero:{p}")
    image_before = multicycle_parikh(theta)
    image_after = multicycle_parikh(reduced)
    for e, n in image_before.items():
        if n >= k and not image_after.get(e):
            failed.append(f"edge:{e}")
    length = sum(len(c) for c in reduced)
    if length > (len(g.edges) + len(g.net.states)) * reduction_factor(g):
        failed.append("length")
    return failed
