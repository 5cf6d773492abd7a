"""Time the compiled kernels against the pure-Python fallback.

For each Helmholtz dimension this measures the median time of a forward
gradient, a reverse gradient and a Hessian-vector product under both
backends and prints the speedup. Usage::

    python benchmarks/compare_backends.py --n-list 1,10,50 --reps 200
"""
import argparse
import contextlib
import csv
import sys

from adkit import _backend, grad_forward, grad_reverse
from adkit.bench import time_medians
from adkit.functions import helmholtz_eval, helmholtz_make, helmholtz_point
from adkit.nest import hvp


@contextlib.contextmanager
def pure_python():
    saved = _backend.FastDual, _backend.FastTape
    _backend.FastDual = _backend.FastTape = None
    try:
        yield
    finally:
        _backend.FastDual, _backend.FastTape = saved


def workloads(n, seed):
    s = helmholtz_make(n, seed)
    f = lambda x: helmholtz_eval(s, x)  # noqa: E731
    x = helmholtz_point(n)
    v = [1.0] * n
    return {
        "forward": lambda: grad_forward(f, x),
        "reverse": lambda: grad_reverse(f, x),
        "hvp": lambda: hvp(f, x, v),
    }


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n-list", default="1,8,22,50", help="comma-separated dimensions")
    p.add_argument("--reps", type=int, default=200, help="timed repetitions per method")
    p.add_argument("--seed", type=int, default=42)
    args = p.parse_args(argv)
    if _backend.FastDual is None:
        sys.exit("compiled extension not available; build with `pip install -e .`")

    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["n", "method", "t_python", "t_cython", "speedup"])
    for n in (int(t) for t in args.n_list.split(",")):
        jobs = workloads(n, args.seed)
        names = list(jobs)
        fast = time_medians([jobs[k] for k in names], args.reps)
        with pure_python():
            slow = time_medians([jobs[k] for k in names], args.reps)
        for name, ts, tf in zip(names, slow, fast):
            w.writerow([n, name, f"{ts:.3e}", f"{tf:.3e}", f"{ts / tf:.2f}"])


if __name__ == "__main__":
    main()
