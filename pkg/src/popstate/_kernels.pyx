# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled twin of ``_pykernels``: identical signatures and results."""
from cpython.long cimport PyLong_AsLongLong, PyLong_FromLongLong
from cpython.ref cimport Py_INCREF
from cpython.tuple cimport PyTuple_GET_ITEM, PyTuple_New, PyTuple_SET_ITEM
from libc.stdlib cimport free, malloc

cdef long long MAX_COUNT = 9223372036854775807

cdef long long* _to_array(list vecs, Py_ssize_t n) except NULL:
    cdef Py_ssize_t k = len(vecs), t, i
    cdef long long* arr = <long long*> malloc((k * n + 1) * sizeof(long long))
    if arr == NULL:
        raise MemoryError()
    for t in range(k):
        v = vecs[t]
        for i in range(n):
            arr[t * n + i] = v[i]
    return arr


cdef object _fire_arr(tuple v, long long* pre, long long* post, Py_ssize_t n):
    cdef Py_ssize_t i
    cdef long long x
    for i in range(n):
        x = PyLong_AsLongLong(<object> PyTuple_GET_ITEM(v, i))
        if x < pre[i]:
            return None
    cdef tuple out = PyTuple_New(n)
    for i in range(n):
        x = PyLong_AsLongLong(<object> PyTuple_GET_ITEM(v, i)) - pre[i]
        if post[i] > 0 and x > MAX_COUNT - post[i]:
            raise OverflowError("configuration count overflow")
        o = PyLong_FromLongLong(x + post[i])
        Py_INCREF(o)
        PyTuple_SET_ITEM(out, i, o)
    return out


def fire(vec, pre, post):
    cdef Py_ssize_t n = len(vec)
    cdef long long* a = _to_array([tuple(pre), tuple(post)], n)
    try:
        return _fire_arr(tuple(vec), a, a + n, n)
    finally:
        free(a)


def explore(start, pres, posts, Py_ssize_t max_nodes, Py_ssize_t max_depth=-1):
    cdef Py_ssize_t n = len(start)
    cdef Py_ssize_t ntrans = len(pres)
    cdef long long* pre_arr = _to_array(list(pres), n)
    cdef long long* post_arr = _to_array(list(posts), n)
    cdef list nodes = [tuple(start)]
    cdef dict seen = {nodes[0]: 0}
    cdef list parent = [-1], via = [-1], depth = [0], succ = [None]
    cdef bint exhausted = True, stop = False, complete
    cdef Py_ssize_t qi = 0, t, dv, j
    cdef list out
    try:
        while qi < len(nodes):
            v = nodes[qi]
            dv = depth[qi]
            out = []
            complete = True
            for t in range(ntrans):
                w = _fire_arr(<tuple> v, pre_arr + t * n, post_arr + t * n, n)
                if w is None:
                    continue
                jo = seen.get(w)
                if jo is None:
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
                else:
                    j = jo
                out.append(j)
            if complete:
                succ[qi] = out
            if stop:
                break
            qi += 1
    finally:
        free(pre_arr)
        free(post_arr)
    return nodes, parent, via, depth, succ, exhausted


cdef bint _leq(tuple b, tuple v, Py_ssize_t n):
    cdef Py_ssize_t i
    for i in range(n):
        if PyLong_AsLongLong(<object> PyTuple_GET_ITEM(b, i)) > PyLong_AsLongLong(<object> PyTuple_GET_ITEM(v, i)):
            return False
    return True


def dominated(vec, basis):
    cdef tuple v = tuple(vec)
    cdef Py_ssize_t n = len(v)
    for b in basis:
        if _leq(<tuple> b, v, n):
            return True
    return False


def minimize(vectors):
    vectors = list(dict.fromkeys(vectors))
    order = sorted(range(len(vectors)), key=lambda i: sum(vectors[i]))
    cdef list keep = []
    cdef list kept_vecs = []
    cdef Py_ssize_t n
    for i in order:
        v = vectors[i]
        n = len(v)
        for b in kept_vecs:
            if _leq(<tuple> b, <tuple> v, n):
                break
        else:
            keep.append(i)
            kept_vecs.append(v)
    keep.sort()
    return [vectors[i] for i in keep]


def hilbert_cd(columns, upper=None):
    cdef Py_ssize_t n = len(columns)
    cdef Py_ssize_t m = len(columns[0]) if n else 0
    cdef long long* cols = _to_array([tuple(c) for c in columns], m) if n else NULL
    cdef long long* mxa
    cdef long long dot
    cdef Py_ssize_t j, r
    cdef list basis = []
    cdef dict frontier = {}, nxt
    cdef tuple x, y, mx
    cdef bint has_upper = upper is not None
    try:
        for j in range(n):
            if has_upper and upper[j] < 1:
                continue
            frontier[tuple([1 if i == j else 0 for i in range(n)])] = tuple(columns[j])
        mxa = <long long*> malloc((m + 1) * sizeof(long long))
        if mxa == NULL:
            raise MemoryError()
        try:
            while frontier:
                pending = []
                for x, mx in frontier.items():
                    if any(mx):
                        pending.append((x, mx))
                    else:
                        basis.append(x)
                nxt = {}
                for x, mx in pending:
                    for r in range(m):
                        mxa[r] = PyLong_AsLongLong(<object> PyTuple_GET_ITEM(mx, r))
                    for j in range(n):
                        dot = 0
                        for r in range(m):
                            dot += mxa[r] * cols[j * m + r]
                        if dot >= 0:
                            continue
                        if has_upper and x[j] >= upper[j]:
                            continue
                        y = x[:j] + (x[j] + 1,) + x[j + 1:]
                        if y in nxt:
                            continue
                        for b in basis:
                            if _leq(<tuple> b, y, n):
                                break
                        else:
                            nxt[y] = tuple([mxa[r] + cols[j * m + r] for r in range(m)])
                frontier = nxt
        finally:
            free(mxa)
    finally:
        if cols != NULL:
            free(cols)
    return sorted(basis)
