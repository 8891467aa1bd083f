"""Slow, independent reference implementations used by the tests."""
from __future__ import annotations

import itertools
import random
from collections import deque

import numba
import numpy as np

from popstate.core import Action, Configuration, PetriNet, StateSet, Transition


def vec_fire(v, pre, post):
    if any(x < a for x, a in zip(v, pre)):
        return None
    return tuple(x - a + b for x, a, b in zip(v, pre, post))


def forward_cover(net: PetriNet, source: Configuration, target: Configuration, cap: int = 100_000):
    """(length of a shortest covering word or None, search complete)."""
    names = net.states.names
    pres = [tuple(t.pre[s] for s in names) for t in net.transitions]
    posts = [tuple(t.post[s] for s in names) for t in net.transitions]
    goal = tuple(target[s] for s in names)
    start = tuple(source[s] for s in names)
    covers = lambda v: all(x >= g for x, g in zip(v, goal))  # noqa: E731
    if covers(start):
        return 0, True
    dist = {start: 0}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for pre, post in zip(pres, posts):
            w = vec_fire(v, pre, post)
            if w is None or w in dist:
                continue
            dist[w] = dist[v] + 1
            if covers(w):
                return dist[w], True
            if len(dist) >= cap:
                return None, False
            queue.append(w)
    return None, True


def forward_reach(net: PetriNet, source: Configuration, cap: int = 100_000):
    names = net.states.names
    pres = [tuple(t.pre[s] for s in names) for t in net.transitions]
    posts = [tuple(t.post[s] for s in names) for t in net.transitions]
    start = tuple(source[s] for s in names)
    seen = {start}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for pre, post in zip(pres, posts):
            w = vec_fire(v, pre, post)
            if w is not None and w not in seen:
                if len(seen) >= cap:
                    return seen, False
                seen.add(w)
                queue.append(w)
    return seen, True


def brute_hilbert(signs, actions):
    """Minimal nonzero solutions of s(p) alpha(p) = sum_a beta(a) a(p) by enumeration in the Pottier box.

    ``signs`` is a list of +1/-1, ``actions`` a list of integer rows over the
    same states (at most three actions).  beta determines alpha, so beta is
    enumerated by level |beta|_1 = 1, 2, ..., B; a solution at some level is
    minimal iff no minimal solution of a lower level lies below it.
    """
    d = len(signs)
    na = len(actions)
    bound = (2 + sum(max((abs(x) for x in a), default=0) for a in actions)) ** d
    if na == 0:
        return [], bound
    if na > 3:
        raise ValueError("at most three actions")
    mat = np.zeros((3, d), dtype=np.int64)
    mat[:na] = np.array(actions, dtype=np.int64).reshape(na, d)
    ub = np.array([bound if j < na else 0 for j in range(3)], dtype=np.int64)
    rows = _enumerate(np.array(signs, dtype=np.int64), mat, ub, bound)
    return sorted(tuple(int(v) for v in r[:d]) + tuple(int(v) for v in r[d:d + na]) for r in rows), bound


@numba.njit(cache=True)
def _enumerate(signs, mat, ub, bound):
    d = signs.shape[0]
    width = d + 3
    found = np.zeros((64, width), dtype=np.int64)
    nfound = 0
    x = np.zeros(width, dtype=np.int64)
    for level in range(1, bound + 1):
        level_start = nfound
        for b0 in range(min(level, ub[0]) + 1):
            for b1 in range(min(level - b0, ub[1]) + 1):
                b2 = level - b0 - b1
                if b2 > ub[2]:
                    continue
                total = level
                ok = True
                for p in range(d):
                    a = signs[p] * (b0 * mat[0, p] + b1 * mat[1, p] + b2 * mat[2, p])
                    if a < 0:
                        ok = False
                        break
                    x[p] = a
                    total += a
                if not ok or total > bound:
                    continue
                x[d] = b0
                x[d + 1] = b1
                x[d + 2] = b2
                dominated = False
                for k in range(level_start):
                    below = True
                    for c in range(width):
                        if found[k, c] > x[c]:
                            below = False
                            break
                    if below:
                        dominated = True
                        break
                if dominated:
                    continue
                if nfound == found.shape[0]:
                    grown = np.zeros((2 * nfound, width), dtype=np.int64)
                    grown[:nfound] = found
                    found = grown
                found[nfound] = x
                nfound += 1
    return found[:nfound].copy()


# -- random instances ------------------------------------------------------


def random_net(rng: random.Random, num_states: int, max_norm: int, num_trans: int) -> PetriNet:
    names = [f"s{i}" for i in range(num_states)]
    transitions = []
    for _ in range(num_trans * 4):
        if len(transitions) == num_trans:
            break
        pre = Configuration({s: rng.randint(0, max_norm) for s in names})
        post = Configuration({s: rng.randint(0, max_norm) for s in names})
        t = Transition(pre, post)
        if t not in transitions:
            transitions.append(t)
    return PetriNet(StateSet(names), transitions)


def random_config(rng: random.Random, net: PetriNet, max_count: int) -> Configuration:
    return Configuration({s: rng.randint(0, max_count) for s in net.states})


def random_control_net(rng: random.Random, num_controls: int, num_edges: int, num_y: int = 1, max_y: int = 1):
    """A net whose projection on x-states is a strongly connected graph.

    Controls are the one-hot configurations x_k; each edge a -> b is a
    transition x_a + pre_y -> x_b + post_y with distinct y parts per pair.
    """
    xs = [f"x{i}" for i in range(num_controls)]
    ys = [f"y{i}" for i in range(num_y)]
    pairs = [(i, (i + 1) % num_controls) for i in range(num_controls)]
    while len(pairs) < num_edges:
        pairs.append((rng.randrange(num_controls), rng.randrange(num_controls)))
    transitions = []
    seen = set()
    for a, b in pairs:
        for _ in range(20):
            pre = {y: rng.randint(0, max_y) for y in ys}
            post = {y: rng.randint(0, max_y) for y in ys}
            key = (a, b, tuple(pre.values()), tuple(post.values()))
            if key not in seen:
                break
        else:
            continue
        seen.add(key)
        pre[xs[a]] = pre.get(xs[a], 0) + 1
        post[xs[b]] = post.get(xs[b], 0) + 1
        transitions.append(Transition(Configuration(pre), Configuration(post)))
    net = PetriNet(StateSet(xs + ys), transitions)
    return net, xs, Configuration({xs[0]: 1})


def random_closed_walk(rng: random.Random, g, start: int, steps: int) -> tuple[int, ...]:
    """A random walk from ``start`` closed by a shortest way back."""
    walk = []
    s = start
    for _ in range(steps):
        out = g.out_edges(s)
        e = rng.choice(out)
        walk.append(e)
        s = g.edges[e].target
    walk.extend(g.shortest_path(s, start))
    return tuple(walk)


def all_configs(net: PetriNet, max_count: int):
    names = net.states.names
    for counts in itertools.product(range(max_count + 1), repeat=len(names)):
        yield Configuration(zip(names, counts))


def action_rows(actions: list[Action], states) -> list[list[int]]:
    return [[a[s] for s in states] for a in actions]
