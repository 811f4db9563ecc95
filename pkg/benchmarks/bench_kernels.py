"""Time the compiled and pure-Python model-enumeration kernels.

    python3 benchmarks/bench_kernels.py [--repeat N] [--worlds N]

Both backends run the same workloads; their results are compared before any
timing is reported.
"""

import argparse
import statistics
import time

from csprove import kernels
from csprove.formula import parse
from csprove.model import refute_semantic, sequent_truth_table
from csprove.sequent import R, S, Sequent

VALID = ["[b]([b]p->p)->[b]p", "[b](p->q)->[b]p->[b]q", "[d]p->[b][d]p"]
MIXED_LOB_LEAF = Sequent.of([(0, S, 1), (1, R, 2), (0, R, 2)], [(0, "[b]([b]p->p)"), (2, "[b]p->p")], [(2, "p"), (2, "q")])


def workloads(n):
    # valid formulas force a full sweep of every model, the worst case
    for text in VALID:
        f = parse(text)
        yield f"refute_semantic {text} <= {n} worlds", lambda b, f=f: refute_semantic(f, n, b)
    yield f"sequent_truth_table mixed_lob leaf, {n} worlds, p q", \
        lambda b: sequent_truth_table(MIXED_LOB_LEAF, n, ("p", "q"), b)


def timed(fn, backend, repeat):
    times = []
    result = None
    for _ in range(repeat):
        t = time.perf_counter()
        result = fn(backend)
        times.append(time.perf_counter() - t)
    return result, statistics.median(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--worlds", type=int, default=3)
    args = ap.parse_args(argv)
    if "cython" not in kernels.BACKENDS:
        print("compiled kernel not built; run `pip install -e . --no-build-isolation` first")
        return 1
    print(f"{'workload':58s} {'python':>10s} {'cython':>10s} {'speedup':>8s}")
    for name, fn in workloads(args.worlds):
        py, t_py = timed(fn, "python", args.repeat)
        cy, t_cy = timed(fn, "cython", args.repeat)
        if py != cy:
            raise SystemExit(f"backends disagree on {name}")
        print(f"{name:58s} {t_py * 1e3:8.1f}ms {t_cy * 1e3:8.2f}ms {t_py / t_cy:7.0f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
