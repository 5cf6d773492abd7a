"""Command-line front end.

Scalar results print as ``name=value`` lines with 12 significant digits;
tables go out as CSV (header row, ``,`` separator, LF line endings).
Exit status: 0 success, 1 domain error, 2 usage error.
"""
import argparse
import csv
import io
import os
import sys
from dataclasses import asdict

from .bench import DEFAULT_N_LIST, BenchmarkRecord, benchmark_helmholtz
from .dual import grad_forward, jacobian_forward
from .errors import DomainError
from .functions import BUILTINS, helmholtz_eval, helmholtz_make, helmholtz_point
from .nest import hvp
from .numdiff import DiffScheme, error_curve, grad_numeric, log_grid
from .optim import GDConfig, OptimizationError, gradient_descent, mlp_train, newton
from .tape import grad_reverse, jacobian_reverse

FUNCTIONS = ("example", "logistic", "helmholtz", "rosenbrock", "quadratic")
MODES = ("forward", "reverse", "numeric")


def default_seed():
    return int(os.environ.get("ADKIT_SEED", "42"))


def _floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}")


def _ints(text):
    try:
        return [int(v) for v in text.split(",") if v.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of integers: {text!r}")


def _positive(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return v


def _fmt(v):
    return format(float(v) + 0.0, ".12g")  # + 0.0 folds -0.0 into 0.0


def _fmt_vec(vs):
    return ",".join(_fmt(v) for v in vs)


def build_parser():
    fmt = argparse.ArgumentDefaultsHelpFormatter
    p = argparse.ArgumentParser(prog="adkit", description="Scalar automatic differentiation kit.")
    sub = p.add_subparsers(dest="command", required=True)

    def function_args(sp, with_mode=True):
        sp.add_argument("--fn", choices=FUNCTIONS, default="example", help="built-in function")
        if with_mode:
            sp.add_argument("--mode", choices=MODES, default="reverse", help="differentiation method")
        sp.add_argument("--at", type=_floats, default=None,
                        help="evaluation point, comma separated (helmholtz defaults to x_i=1/(2n))")
        sp.add_argument("--n", type=int, default=2, help="helmholtz dimension")
        sp.add_argument("--seed", type=int, default=default_seed(),
                        help="helmholtz instance seed (env ADKIT_SEED)")
        if with_mode:
            sp.add_argument("--scheme", choices=("forward", "center"), default="center",
                            help="finite-difference scheme for --mode numeric")
            sp.add_argument("--h", type=_positive, default=None,
                            help="finite-difference step (default: scaled sqrt/cbrt of machine eps)")

    g = sub.add_parser("grad", formatter_class=fmt, help="value and gradient")
    function_args(g)
    j = sub.add_parser("jacobian", formatter_class=fmt, help="Jacobian matrix")
    function_args(j)
    h = sub.add_parser("hvp", formatter_class=fmt, help="Hessian-vector product (forward-over-reverse)")
    function_args(h, with_mode=False)
    h.add_argument("--v", type=_floats, required=True, help="direction vector, comma separated")

    e = sub.add_parser("errcurve", formatter_class=fmt, help="finite-difference error versus step size")
    e.add_argument("--x0", type=float, default=0.2, help="evaluation point")
    e.add_argument("--hmin", type=_positive, default=1e-14, help="smallest step")
    e.add_argument("--hmax", type=_positive, default=1e-1, help="largest step")
    e.add_argument("--points", type=int, default=100, help="log-spaced grid size")
    e.add_argument("--out", default=None, help="CSV path (default: stdout)")

    b = sub.add_parser("helmholtz", formatter_class=fmt, help="gradient timing benchmark")
    b.add_argument("--n-list", type=_ints, default=list(DEFAULT_N_LIST), help="dimensions")
    b.add_argument("--seed", type=int, default=default_seed(), help="instance seed (env ADKIT_SEED)")
    b.add_argument("--reps", type=int, default=1000, help="timed repetitions per method")
    b.add_argument("--no-time", action="store_true", help="write zeros in the timing columns")
    b.add_argument("--out", default=None, help="CSV path (default: stdout)")

    d = sub.add_parser("demo", formatter_class=fmt, help="optimizer demonstrations")
    d.add_argument("which", choices=("gd", "newton", "mlp"))
    d.add_argument("--fn", choices=("rosenbrock", "quadratic"), default="rosenbrock",
                   help="objective for gd/newton")
    d.add_argument("--at", type=_floats, default=None, help="start point (default: -1.2,1 or 0,0,0)")
    d.add_argument("--eta", type=_positive, default=None,
                   help="step size (default: gd 1e-3, newton 1, mlp 0.5)")
    d.add_argument("--iters", type=int, default=None,
                   help="iterations or epochs (default: gd 100000, newton 50, mlp 5000)")
    d.add_argument("--mode", choices=MODES, default="reverse", help="gradient method for gd")
    d.add_argument("--seed", type=int, default=7, help="MLP initialization seed")
    d.add_argument("--out", default=None, help="CSV path (default: stdout)")
    return p


def _resolve_function(args, parser):
    if args.fn == "helmholtz":
        if args.n < 1:
            parser.error("--n must be >= 1")
        spec = helmholtz_make(args.n, args.seed)
        f = lambda x: helmholtz_eval(spec, x)  # noqa: E731
        dim = args.n
        if args.at is None:
            args.at = helmholtz_point(args.n)
    else:
        f, dim = BUILTINS[args.fn]
    if args.at is None:
        parser.error(f"--at is required for --fn {args.fn}")
    if len(args.at) != dim:
        parser.error(f"--fn {args.fn} takes {dim} coordinate(s), got {len(args.at)}")
    return f


_VECTOR_FLAGS = ("--at", "--v", "--n-list")


def _glue_negative_vectors(argv):
    # "--at -1,5" would otherwise be read as an unknown option
    out = []
    it = iter(argv)
    for tok in it:
        if tok in _VECTOR_FLAGS:
            nxt = next(it, None)
            if nxt is None:
                out.append(tok)
            elif nxt.startswith("-") and nxt[1:2].isdigit() or nxt.startswith("-."):
                out.append(f"{tok}={nxt}")
            else:
                out.extend([tok, nxt])
        else:
            out.append(tok)
    return out


def parse_args(argv=None):
    """Parse and validate; usage errors exit with status 2."""
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(_glue_negative_vectors(argv))
    if args.command in ("grad", "jacobian", "hvp"):
        args.f = _resolve_function(args, parser)
        if args.command == "hvp" and len(args.v) != len(args.at):
            parser.error(f"--v has {len(args.v)} entries, point has {len(args.at)}")
    elif args.command == "errcurve":
        if args.points < 2 or args.hmin >= args.hmax:
            parser.error("need --points >= 2 and --hmin < --hmax")
    elif args.command == "helmholtz":
        if args.reps < 1 or not args.n_list or min(args.n_list) < 1:
            parser.error("need --reps >= 1 and positive dimensions")
    elif args.command == "demo":
        if args.iters is not None and args.iters < 0:
            parser.error("--iters must be >= 0")
        if args.which != "mlp" and args.at is not None:
            want = 2 if args.fn == "rosenbrock" else 3
            if len(args.at) != want:
                parser.error(f"--fn {args.fn} takes {want} coordinate(s), got {len(args.at)}")
    return args


def _write_csv(header, rows, out, stdout):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    text = buf.getvalue()
    if out is None:
        stdout.write(text)
    else:
        with open(out, "w", newline="", encoding="utf-8") as fh:
            fh.write(text)


def _cell(v):
    return repr(v + 0.0) if isinstance(v, float) else str(v)


def _gradient(args):
    f, x = args.f, args.at
    if args.mode == "forward":
        return f(x), grad_forward(f, x)
    if args.mode == "reverse":
        return grad_reverse(f, x)
    return f(x), grad_numeric(f, x, DiffScheme(args.scheme, args.h))


def _run(args, stdout):
    cmd = args.command
    if cmd == "grad":
        y, g = _gradient(args)
        stdout.write(f"y={_fmt(y)}\ngrad={_fmt_vec(g)}\n")
    elif cmd == "jacobian":
        if args.mode == "forward":
            rows = jacobian_forward(args.f, args.at)
        elif args.mode == "reverse":
            rows = jacobian_reverse(args.f, args.at)
        else:
            rows = [grad_numeric(args.f, args.at, DiffScheme(args.scheme, args.h))]
        for i, r in enumerate(rows):
            stdout.write(f"row{i}={_fmt_vec(r)}\n")
    elif cmd == "hvp":
        stdout.write(f"hvp={_fmt_vec(hvp(args.f, args.at, args.v))}\n")
    elif cmd == "errcurve":
        rows = error_curve(args.x0, log_grid(args.hmin, args.hmax, args.points))
        _write_csv(["h", "e_forward", "e_center"],
                   [[_cell(r.h), _cell(r.e_forward), _cell(r.e_center)] for r in rows],
                   args.out, stdout)
    elif cmd == "helmholtz":
        recs = benchmark_helmholtz(args.n_list, args.seed, args.reps)
        cols = BenchmarkRecord.columns()
        rows = []
        for r in recs:
            d = asdict(r)
            if args.no_time:
                for k in BenchmarkRecord.TIMING:
                    d[k] = 0.0
            rows.append([_cell(d[c]) for c in cols])
        _write_csv(cols, rows, args.out, stdout)
    elif cmd == "demo":
        _demo(args, stdout)
    return 0


def _demo(args, stdout):
    if args.which == "mlp":
        eta = 0.5 if args.eta is None else args.eta
        epochs = 5000 if args.iters is None else args.iters
        curve, _ = mlp_train(args.seed, eta, epochs)
        _write_csv(["epoch", "loss"], [[k, _cell(v)] for k, v in enumerate(curve)], args.out, stdout)
        return
    f, _ = BUILTINS[args.fn]
    w0 = args.at if args.at is not None else ([-1.2, 1.0] if args.fn == "rosenbrock" else [0.0, 0.0, 0.0])
    if args.which == "gd":
        cfg = GDConfig(
            eta=1e-3 if args.eta is None else args.eta,
            max_iters=100000 if args.iters is None else max(1, args.iters),
            grad_tol=1e-10,
            mode=args.mode,
        )
        traj = gradient_descent(f, w0, cfg)
    else:
        traj = newton(f, w0, 1.0 if args.eta is None else args.eta,
                      50 if args.iters is None else args.iters)
    _write_csv(["iter", "f", "grad_norm"],
               [[s.iter, _cell(s.f), _cell(s.grad_norm)] for s in traj], args.out, stdout)


def dispatch(args, stdout=None, stderr=None):
    """Run a parsed command; returns the exit status."""
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    try:
        return _run(args, stdout)
    except DomainError as exc:
        stderr.write(f"adkit: domain error: {exc}\n")
        return 1
    except (ArithmeticError, OptimizationError) as exc:
        stderr.write(f"adkit: {exc}\n")
        return 1


def main(argv=None):
    return dispatch(parse_args(argv))


if __name__ == "__main__":
    sys.exit(main())
