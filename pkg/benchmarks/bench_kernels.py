"""Compare the compiled kernels with the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import random
import timeit

from popstate import _pykernels
from popstate.core import Configuration
from popstate.formats import parse_net_text
from popstate.reach import DenseNet

try:
    from popstate import _kernels
except ImportError:  # extension not built
    _kernels = None


def explore_case():
    # an unbounded net, cut off at 100k configurations
    net = parse_net_text("states: a b c\ntrans: a -> a b\ntrans: b -> c\ntrans: c c -> a\n").net()
    dense = DenseNet.of(net)
    start = dense.vector(Configuration(a=1))
    return lambda k: k.explore(start, dense.pres, dense.posts, 100_000, -1)


def hilbert_case():
    rng = random.Random(1)
    cols = []
    for _ in range(4):
        cols.append(tuple(rng.choice((1, -1)) if i == len(cols) else 0 for i in range(4)))
    for _ in range(3):
        cols.append(tuple(rng.randint(-4, 4) for _ in range(4)))
    return lambda k: k.hilbert_cd(cols)


def minimize_case():
    rng = random.Random(2)
    vecs = [tuple(rng.randint(0, 6) for _ in range(4)) for _ in range(30000)]
    return lambda k: k.minimize(vecs)


CASES = {"explore": explore_case, "hilbert_cd": hilbert_case, "minimize": minimize_case}


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    backends = [("python", _pykernels)] + ([("cython", _kernels)] if _kernels else [])
    print(f"{'kernel':<12}" + "".join(f"{name:>12}" for name, _ in backends) + f"{'speedup':>10}")
    for name, make in CASES.items():
        run = make()
        times = [min(timeit.repeat(lambda: run(k), number=1, repeat=args.repeat)) for _, k in backends]
        speedup = f"{times[0] / times[1]:>9.1f}x" if len(times) > 1 else ""
        print(f"{name:<12}" + "".join(f"{t:>11.4f}s" for t in times) + speedup)


if __name__ == "__main__":
    main()
