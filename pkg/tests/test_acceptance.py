"""Acceptance criteria, one test each. Every test appends a single
PASS/FAIL line (shown in the terminal summary) before asserting."""
import filecmp
import os
import random
import statistics
import subprocess
import sys
import time

import numpy as np

from adkit import grad_forward, grad_reverse, jacobian_forward
from adkit.bench import benchmark_helmholtz
from adkit.functions import (
    QUAD_A,
    QUAD_B,
    example_vec,
    helmholtz_eval,
    helmholtz_make,
    helmholtz_point,
    logistic_dl_closed,
    logistic_l,
    logistic_vec,
    quadratic,
    rosenbrock,
)
from adkit.nest import asymmetry, derivative, hessian, hvp
from adkit.numdiff import DiffScheme, error_curve, grad_numeric, log_grid, loglog_slope
from adkit.optim import grad_reverse as _gr, mlp_init, mlp_loss, mlp_train, newton
from conftest import ACCEPTANCE_LINES, max_rel, rel_err


def report(num, title, checks, elapsed=None, limit=None):
    """``checks`` is a list of ``(label, ok)``; the runtime limit is one more check."""
    checks = list(checks)
    if limit is not None:
        checks.append((f"runtime {elapsed:.3g}s < {limit:g}s", elapsed < limit))
    ok = all(c for _, c in checks)
    failed = [label for label, c in checks if not c]
    detail = "; ".join(label for label, _ in checks)
    line = f"{'PASS' if ok else 'FAIL'} [{num}] {title}: {detail}"
    if failed:
        line += "  <-- failing: " + " | ".join(failed)
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def test_1_worked_trace():
    runs = []
    for _ in range(20):
        t0 = time.perf_counter()
        y, dy = example_vec([2.0, 5.0]), jacobian_forward(example_vec, [2.0, 5.0])[0][0]
        yr, g = grad_reverse(example_vec, [2.0, 5.0])
        runs.append(time.perf_counter() - t0)
    elapsed = statistics.median(runs)
    report(1, "worked trace", [
        (f"y={y:.6g}", abs(y - 11.652) <= 5e-4),
        (f"dy/dx1={dy:.6g}", abs(dy - 5.5) <= 5e-4),
        (f"reverse=({g[0]:.6g},{g[1]:.6g})", abs(g[0] - 5.5) <= 5e-4 and abs(g[1] - 1.716) <= 5e-4),
        (f"reverse y={yr:.6g}", abs(yr - 11.652) <= 5e-4),
    ], elapsed, 1e-3)


def test_2_expression_swell_oracle():
    t0 = time.perf_counter()
    worst = {}
    for n in (1, 2, 3, 4):
        worst[n] = max(
            rel_err(derivative(lambda v: logistic_l(n, v), k / 999), logistic_dl_closed(n, k / 999))
            for k in range(1000)
        )
    elapsed = time.perf_counter() - t0
    report(2, "logistic derivative vs closed form",
           [(f"n={n} max rel {e:.2g}", e <= 1e-9) for n, e in worst.items()], elapsed, 1.0)


def test_3_error_regimes():
    t0 = time.perf_counter()
    trunc = error_curve(0.2, log_grid(1e-3, 1e-1, 50))
    hs = [r.h for r in trunc]
    sf = loglog_slope(hs, [r.e_forward for r in trunc])
    sc = loglog_slope(hs, [r.e_center for r in trunc])
    full = error_curve(0.2)
    # round-off dominance: the error at the smallest step exceeds the error at 1e-12
    tiny, ref = full[0], _at(full, 1e-12)
    ef_up = tiny.e_forward > ref.e_forward
    ec_up = tiny.e_center > ref.e_center
    min_f = min(r.e_forward for r in full)
    min_c = min(r.e_center for r in full)
    elapsed = time.perf_counter() - t0
    report(3, "finite-difference error regimes at x0=0.2", [
        (f"E_f slope {sf:.3f} in [0.8,1.2]", 0.8 <= sf <= 1.2),
        (f"E_c slope {sc:.3f} in [1.8,2.2]", 1.8 <= sc <= 2.2),
        ("E_f rises below h=1e-12", ef_up),
        ("E_c rises below h=1e-12", ec_up),
        (f"min E_c {min_c:.2g} <= min E_f {min_f:.2g}", min_c <= min_f),
    ], elapsed, 1.0)


def _at(rows, h):
    """Grid row closest to ``h`` from above."""
    return min((r for r in rows if r.h >= h), key=lambda r: r.h)


def test_4_helmholtz_trends():
    t0 = time.perf_counter()
    recs = benchmark_helmholtz(reps=1000)
    elapsed = time.perf_counter() - t0
    num = [r.rel_col_num for r in recs]
    rev = [r.rel_col_rev for r in recs]
    ops = [r.op_ratio_rev for r in recs]
    mean_ops = sum(ops) / len(ops)
    spread = max(abs(o - mean_ops) / mean_ops for o in ops)
    big = [r.rel_col_rev for r in recs if r.n >= 15]
    fmt = lambda vs: ",".join(f"{v:.3g}" for v in vs)  # noqa: E731
    report(4, "Helmholtz gradient cost trends", [
        (f"rel_col num [{fmt(num)}] strictly increasing", all(a < b for a, b in zip(num, num[1:]))),
        (f"rel_col rev [{fmt(rev)}] <= 6", max(rev) <= 6),
        ("rel_col rev in [1.5,6] for n>=15", all(1.5 <= v <= 6 for v in big)),
        (f"op_ratio [{fmt(ops)}] within 30% of mean", spread <= 0.3),
    ], elapsed, 120.0)


def _agreement_cases(rng):
    yield "example_f", example_vec, lambda: [rng.uniform(0.5, 3.0), rng.uniform(-3.0, 3.0)]
    yield "logistic", logistic_vec, lambda: [rng.uniform(0.05, 0.95)]
    for n in (1, 2, 5, 10):
        s = helmholtz_make(n, 42)
        yield (f"helmholtz n={n}", lambda x, s=s: helmholtz_eval(s, x),
               lambda n=n: [v * rng.uniform(0.5, 1.5) for v in helmholtz_point(n)])
    yield "rosenbrock", rosenbrock, lambda: [rng.uniform(-2.0, 2.0) for _ in range(2)]
    yield "quadratic", quadratic, lambda: [rng.uniform(-3.0, 3.0) for _ in range(3)]


def test_5_mode_agreement():
    t0 = time.perf_counter()
    rng = random.Random(2024)
    checks = []
    for name, f, draw in _agreement_cases(rng):
        worst = 0.0
        for _ in range(100):
            x = draw()
            gf = grad_forward(f, x)
            gr = grad_reverse(f, x)[1]
            gn = grad_numeric(f, x, DiffScheme("center"))
            worst = max(worst, max_rel(gf, gr), max_rel(gf, gn), max_rel(gr, gn))
        checks.append((f"{name} {worst:.2g}", worst <= 1e-6))
    report(5, "forward/reverse/center agreement", checks, time.perf_counter() - t0, 10.0)


def _fd_hessian(f, x, rel=1e-4):
    n = len(x)
    h = [rel * max(abs(v), 1e-3) for v in x]

    def at(i, di, j, dj):
        y = list(x)
        y[i] += di * h[i]
        y[j] += dj * h[j]
        return f(y)

    return [[(at(i, 1, j, 1) - at(i, 1, j, -1) - at(i, -1, j, 1) + at(i, -1, j, -1)) / (4 * h[i] * h[j])
             for j in range(n)] for i in range(n)]


def test_6_hvp():
    t0 = time.perf_counter()
    rng = random.Random(6)
    points = {"example_f": [2.0, 5.0], "logistic": [0.3], "rosenbrock": [-1.2, 1.0], "quadratic": [0.3, 0.2, -1.0]}
    w_fd = w_h = w_sym = 0.0
    for name, f, draw in _agreement_cases(rng):
        x = points.get(name) or helmholtz_point(len(draw()))
        n = len(x)
        H = hessian(f, x)
        F = _fd_hessian(f, x)
        w_sym = max(w_sym, asymmetry(H))
        for _ in range(5):
            v = [rng.uniform(-1, 1) for _ in range(n)]
            hv = hvp(f, x, v)
            w_fd = max(w_fd, max_rel(hv, [sum(F[i][j] * v[j] for j in range(n)) for i in range(n)]))
            w_h = max(w_h, max_rel(hv, [sum(H[i][j] * v[j] for j in range(n)) for i in range(n)]))
    report(6, "Hessian-vector products", [
        (f"vs finite-difference H.v {w_fd:.2g}", w_fd <= 1e-4),
        (f"vs assembled H.v {w_h:.2g}", w_h <= 1e-10),
        (f"asymmetry {w_sym:.2g}", w_sym <= 1e-8),
    ], time.perf_counter() - t0, 5.0)


def test_7_perturbation_confusion():
    r = derivative(lambda x: x * derivative(lambda y: x + y, 1.0), 1.0)
    report(7, "nested derivative regression", [(f"d/dx[x*d/dy(x+y)] at 1 = {r!r}", r == 1.0)])


def test_8_optimizers():
    traj = newton(quadratic, [5.0, -3.0, 7.0], max_iters=1)
    exact = np.linalg.solve(np.array(QUAD_A), np.array(QUAD_B))
    newton_err = max(abs(a - b) for a, b in zip(traj[1].w, exact))
    curve, _ = mlp_train(seed=7, eta=0.5, epochs=5000)
    p = mlp_init(7)
    _, g = _gr(mlp_loss, p)
    fd = grad_numeric(mlp_loss, p, DiffScheme("center", 1e-5))
    gc = max_rel(g, fd)
    report(8, "optimizer demos", [
        (f"Newton one-step error {newton_err:.2g}", newton_err < 1e-10),
        (f"XOR loss {curve[-1]:.3g} (seed 7)", curve[-1] < 0.05),
        (f"MLP gradient check {gc:.2g}", gc <= 1e-5),
    ])


def test_9_determinism(tmp_path):
    runs = {
        "helmholtz": ["helmholtz", "--n-list", "1,8,15", "--reps", "3", "--no-time", "--seed", "11"],
        "errcurve": ["errcurve", "--x0", "0.2"],
        "mlp": ["demo", "mlp", "--iters", "200"],
        "gd": ["demo", "gd", "--iters", "100"],
    }
    checks = []
    for name, argv in runs.items():
        paths = []
        for k in range(2):
            path = tmp_path / f"{name}{k}.csv"
            subprocess.run([sys.executable, "-m", "adkit", *argv, "--out", str(path)], check=True,
                           env={**os.environ, "PYTHONHASHSEED": str(k)})
            paths.append(path)
        checks.append((f"{name} identical", filecmp.cmp(*paths, shallow=False) and paths[0].stat().st_size > 0))
    report(9, "byte-identical CSV", checks)
