"""Pure-Python kernels over dense count vectors (tuples of ints).

``_kernels.pyx`` implements the same functions with the same results; the
``kernels`` module picks whichever is importable.
"""
from __future__ import annotations

MAX_COUNT = 2**63 - 1


def fire(vec, pre, post):
    """vec - pre + post, or None when vec does not dominate pre."""
    out = []
    for x, a, b in zip(vec, pre, post):
        if x < a:
            return None
        y = x - a + b
        if y > MAX_COUNT:
            raise OverflowError("configuration count overflow")
        out.append(y)
    return tuple(out)


def explore(start, pres, posts, max_nodes, max_depth=-1):
    """Breadth-first closure of ``start`` under the transitions.

    Returns ``(nodes, parent, via, depth, succ, exhausted)``.  ``succ[i]`` lists
    the successor node of node i for every enabled transition (in transition
    order, duplicates kept) or is None when node i was not fully expanded.
    ``max_depth < 0`` means unbounded depth.
    """
    nodes = [start]
    seen = {start: 0}
    parent = [-1]
    via = [-1]
    depth = [0]
    succ = [None]
    exhausted = True
    ntrans = len(pres)
    qi = 0
    stop = False
    while qi < len(nodes):
        v = nodes[qi]
        dv = depth[qi]
        out = []
        complete = True
        for t in range(ntrans):
            w = fire(v, pres[t], posts[t])
            if w is None:
                continue
            j = seen.get(w)
            if j is None:
                if len(nodes) >= max_nodes:
                    exhausted = False
                    complete = False
                    stop = True
                    break
                if 0 <= max_depth <= dv:
                    exhausted = False
                    complete = False
                    continue
                j = len(nodes)
                seen[w] = j
                nodes.append(w)
                parent.append(qi)
                via.append(t)
                depth.append(dv + 1)
                succ.append(None)
            out.append(j)
        if complete:
            succ[qi] = out
        if stop:
            break
        qi += 1
    return nodes, parent, via, depth, succ, exhausted


def dominated(vec, basis):
    """True when some element of ``basis`` is componentwise <= ``vec``."""
    for b in basis:
        for x, y in zip(b, vec):
            if x > y:
                break
        else:
            return True
    return False


def minimize(vectors):
    """Minimal elements (componentwise), deduplicated, in first-seen order."""
    vectors = list(dict.fromkeys(vectors))
    order = sorted(range(len(vectors)), key=lambda i: sum(vectors[i]))
    keep = []
    for i in order:
        v = vectors[i]
        if not dominated(v, [vectors[j] for j in keep]):
            keep.append(i)
    keep.sort()
    return [vectors[i] for i in keep]


def hilbert_cd(columns, upper=None):
    """Minimal nonzero x in N^n with sum_j x_j * columns[j] = 0.

    Completion procedure of Contejean and Devie: grow vectors one unit at a
    time, only along columns that point against the current defect.  With
    ``upper`` only solutions <= upper are produced.
    """
    n = len(columns)
    m = len(columns[0]) if n else 0
    basis = []
    frontier = {}
    for j in range(n):
        if upper is not None and upper[j] < 1:
            continue
        x = tuple(1 if i == j else 0 for i in range(n))
        frontier[x] = tuple(columns[j])
    while frontier:
        pending = []
        for x, mx in frontier.items():
            if any(mx):
                pending.append((x, mx))
            else:
                basis.append(x)
        nxt = {}
        for x, mx in pending:
            for j in range(n):
                col = columns[j]
                dot = 0
                for r in range(m):
                    dot += mx[r] * col[r]
                if dot >= 0:
                    continue
                if upper is not None and x[j] >= upper[j]:
                    continue
                y = x[:j] + (x[j] + 1,) + x[j + 1:]
                if y in nxt or dominated(y, basis):
                    continue
                nxt[y] = tuple(a + b for a, b in zip(mx, col))
        frontier = nxt
    return sorted(basis)
