"""Compare the compiled and pure-Python BDD kernels.

    python3 benchmarks/bench_bdd.py [--queens 7] [--nets 5] [--repeat 3]

Two workloads: the n-queens characteristic function built from scratch, and
symbolic dominance queries on random 20-variable CP-nets.  Both backends must
produce the same node count and the same answers; the script exits non-zero
otherwise.
"""

import argparse
import random
import statistics
import sys
import time

from ceteris.bdd import BddManager, available_backends
from ceteris.generators import random_cpnet, random_outcome_values
from ceteris.model import Outcome, Query, QueryKind
from ceteris.reasoner import run_query


def queens(n: int, backend: str):
    m = BddManager(n * n, backend=backend)
    x = [[m.var(r * n + c) for c in range(n)] for r in range(n)]
    rows = m.conj(m.disj(row) for row in x)
    constraints = [rows]
    for r in range(n):
        for c in range(n):
            for r2 in range(n):
                for c2 in range(n):
                    if (r2, c2) <= (r, c):
                        continue
                    if r == r2 or c == c2 or abs(r - r2) == abs(c - c2):
                        constraints.append(~(x[r][c] & x[r2][c2]))
    f = m.conj(constraints)
    return m.satcount(f, range(n * n)), m.node_count


def dominance(nets: int, backend: str):
    rng = random.Random(7)
    answers = []
    for _ in range(nets):
        spec = random_cpnet(rng, n=20)
        for _ in range(4):
            a = Outcome.of(spec, random_outcome_values(rng, spec))
            b = Outcome.of(spec, random_outcome_values(rng, spec))
            q = Query(QueryKind.DOMINANCE, (spec.name,), a, b)
            answers.append(run_query(q, [spec], "symbolic", backend=backend, fallback=False).answer)
    return tuple(answers)


def timed(fn, repeat):
    runs, out = [], None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        runs.append(time.perf_counter() - t0)
    return statistics.median(runs), out


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--queens", type=int, default=7)
    ap.add_argument("--nets", type=int, default=5)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    backends = available_backends()
    if "cython" not in backends:
        print("compiled kernel not built; timing the Python kernel only")
    workloads = {
        f"{args.queens}-queens": lambda b: queens(args.queens, b),
        f"dominance x{args.nets * 4}": lambda b: dominance(args.nets, b),
    }
    status = 0
    print(f"{'workload':<18}" + "".join(f"{b:>12}" for b in backends) + "     speedup")
    for name, work in workloads.items():
        times, outs = {}, {}
        for b in backends:
            times[b], outs[b] = timed(lambda: work(b), args.repeat)
        row = f"{name:<18}" + "".join(f"{times[b]:>11.3f}s" for b in backends)
        if len(backends) == 2:
            row += f"{times['python'] / times['cython']:>11.1f}x"
            if outs["python"] != outs["cython"]:
                row += "  MISMATCH"
                status = 1
        print(row)
    return status


if __name__ == "__main__":
    sys.exit(main())
