"""Command-line front end.

    gmqr simulate SPEC.json OUT.csv
    gmqr fit DATA.csv --tau 0.5 --loss gmq [--c auto] [--json-out FIT.json]
    gmqr bench-deriv --sizes 1e5,1e6 --reps 5
    gmqr bench-regression --models 3.2 --n-list 1000,2000 --methods gmq,conquer-gaussian
    gmqr bias-scan --c-grid 0.02,0.1,0.5 --n 100000 --reps 20 --tau 0.9
    gmqr rmse-scan --n-grid 1000,4000,16000 --c auto --reps 50 --tau 0.7

Errors go to stderr prefixed with a code (``E_USAGE:``, ``E_DATA:``, ...);
the exit status is 0 only on success.
"""
import argparse
import json
import sys
from pathlib import Path


from . import bench, kernels
from .datagen import SimSpec, generate
from .errors import GMQRError
from .io import load_dataset, save_dataset, save_truth, truth_path, write_csv
from .loss import Family, LossSpec
from .model import conquer_bandwidth, default_c, default_start, fit
from .optimize import OptimizerConfig
from .oracle import bias_estimate

FIT_LOSSES = ("gmq", "conquer-gaussian", "conquer-logistic", "expectile", "smooth-expectile",
              "kth-power-smooth")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"E_USAGE: {message}", file=sys.stderr)
        raise SystemExit(2)


def _floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text):
    vals = _floats(text)
    if any(v != int(v) for v in vals):
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    return [int(v) for v in vals]


def _names(text):
    return [v.strip() for v in text.split(",") if v.strip()]


def _shape_arg(text):
    if text == "auto":
        return text
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number or 'auto', got {text!r}") from None


def _emit_csv(out, header, rows):
    if out in (None, "-"):
        write_csv(sys.stdout, header, rows)
    else:
        write_csv(out, header, rows)


# ------------------------------------------------------------------ commands

def cmd_simulate(args):
    try:
        text = Path(args.spec).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {args.spec}: {exc.strerror}") from None
    spec = SimSpec.from_json(text)
    data, truth = generate(spec)
    try:
        save_dataset(data, args.out)
        save_truth(truth_path(args.out), spec, truth)
    except OSError as exc:
        print(f"E_IO: cannot write {args.out}: {exc.strerror}", file=sys.stderr)
        return 1
    return 0


def _fit_loss(args, n, p):
    loss = args.loss
    if loss == "kth-power-smooth":
        k = 1.5 if args.k is None else args.k
    elif args.k is not None:
        raise UsageError(f"--k applies only to kth-power-smooth, not {loss}")
    uses_c = loss in ("gmq", "smooth-expectile", "kth-power-smooth")
    uses_h = loss.startswith("conquer")
    if args.c is not None and not uses_c:
        raise UsageError(f"--c does not apply to {loss}")
    if args.h is not None and not uses_h:
        raise UsageError(f"--h does not apply to {loss}")
    if not 0.0 < args.tau < 1.0:
        raise UsageError(f"--tau must lie in (0, 1), got {args.tau}")
    if uses_c:
        c = args.c if args.c not in (None, "auto") else default_c(n, p)
        if not c > 0:
            raise UsageError("--c must be > 0: the loss is not differentiable at c = 0")
        family = {"gmq": Family.GMQ, "smooth-expectile": Family.SMOOTH_EXPECTILE,
                  "kth-power-smooth": Family.SMOOTH_KTH_POWER}[loss]
        return LossSpec(family, args.tau, c, k if loss == "kth-power-smooth" else 2.0)
    if uses_h:
        h = args.h if args.h not in (None, "auto") else conquer_bandwidth(n, p)
        if not h > 0:
            raise UsageError("--h must be > 0")
        family = Family.CONQUER_GAUSSIAN if loss.endswith("gaussian") else Family.CONQUER_LOGISTIC
        return LossSpec(family, args.tau, h)
    return LossSpec(Family.EXPECTILE, args.tau)


def cmd_fit(args):
    data = load_dataset(args.data, has_intercept=not args.no_intercept)
    loss = _fit_loss(args, data.n, data.p)
    config = OptimizerConfig(beta0=default_start(data, loss.tau), tol_delta=args.tol, max_iter=args.max_iter)
    res = fit(data, loss, config)
    text = json.dumps(res.to_dict(), indent=2)
    print(text)
    if args.json_out:
        try:
            Path(args.json_out).write_text(text + "\n", encoding="utf-8")
        except OSError as exc:
            print(f"E_IO: cannot write {args.json_out}: {exc.strerror}", file=sys.stderr)
            return 1
    return 0


def cmd_bench_deriv(args):
    if any(s < 1000 for s in args.sizes):
        raise UsageError("--sizes must all be >= 1000")
    if args.backend == "both":
        backends = kernels.available_backends()
    else:
        backends = (args.backend or kernels.default_backend(),)
    kernels.warmup()
    rows = bench.bench_derivatives(args.sizes, args.reps, args.seed, backends)
    _emit_csv(args.out, ["size", "method", "median_seconds", "backend"], rows)
    return 0


def cmd_bench_regression(args):
    bad = [m for m in args.methods if m not in bench.REGRESSION_METHODS]
    if bad:
        raise UsageError(f"unknown method(s) {', '.join(bad)}; choose from {', '.join(bench.REGRESSION_METHODS)}")
    records = bench.bench_regression(
        models=args.models, n_list=args.n_list, tau=args.tau, dists=args.dists,
        methods=args.methods, reps=args.reps, seed=args.seed, p_ratio=args.p_ratio, p=args.p,
        k=args.k,
    )
    _emit_csv(args.out, list(bench.BenchRecord.FIELDS), [r.row() for r in records])
    return 0


def cmd_bias_scan(args):
    spec = SimSpec(model="3.2", n=args.n, p=args.p, tau=args.tau, error_dist=args.dist, seed=args.seed)
    table = bias_estimate(spec, args.c_grid, args.n, args.reps, c_floor=args.c_floor)
    header, rows = table.csv_rows()
    _emit_csv(args.out, header, rows)
    return 0


def cmd_rmse_scan(args):
    rows, slope_mean, slope_rmse = bench.rmse_scan(
        args.n_grid, p=args.p, tau=args.tau, c=args.c, reps=args.reps, seed=args.seed,
        dist=args.dist,
    )
    header = ["n", "c", "mean_error", "sd_error", "rmse", "slope_mean", "slope_rmse"]
    body = [[r["n"], r["c"], r["mean_error"], r["sd_error"], r["rmse"], slope_mean, slope_rmse] for r in rows]
    _emit_csv(args.out, header, body)
    return 0


# ------------------------------------------------------------------ parser

def build_parser():
    p = _Parser(prog="gmqr", description="Smoothed quantile regression with multiquadric losses.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("simulate", help="generate a dataset from a SimSpec JSON file")
    s.add_argument("spec")
    s.add_argument("out")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("fit", help="fit a dataset CSV and print the result as JSON")
    s.add_argument("data")
    s.add_argument("--tau", type=float, required=True)
    s.add_argument("--loss", choices=FIT_LOSSES, default="gmq")
    s.add_argument("--c", type=_shape_arg, default=None, help="GMQ shape, or 'auto'")
    s.add_argument("--h", type=_shape_arg, default=None, help="conquer bandwidth, or 'auto'")
    s.add_argument("--k", type=float, default=None)
    s.add_argument("--tol", type=float, default=1e-6)
    s.add_argument("--max-iter", type=int, default=5000)
    s.add_argument("--no-intercept", action="store_true")
    s.add_argument("--json-out")
    s.set_defaults(func=cmd_fit)

    s = sub.add_parser("bench-deriv", help="time vectorized first-derivative kernels")
    s.add_argument("--sizes", type=_ints, default=[10**5, 10**6, 10**7])
    s.add_argument("--reps", type=int, default=5)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--backend", choices=("numba", "numpy", "both"), default=None)
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_bench_deriv)

    s = sub.add_parser("bench-regression", help="error and time of fitting methods on simulated data")
    s.add_argument("--models", type=_names, default=["3.2"])
    s.add_argument("--n-list", type=_ints, default=[1000, 2000])
    s.add_argument("--tau", type=float, default=0.5)
    s.add_argument("--dists", type=_names, default=["normal0_4"])
    s.add_argument("--methods", type=_names, default=["gmq", "conquer-gaussian"])
    s.add_argument("--reps", type=int, default=1)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--p-ratio", type=int, default=20)
    s.add_argument("--p", type=int, default=None)
    s.add_argument("--k", type=float, default=1.5)
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_bench_regression)

    s = sub.add_parser("bias-scan", help="smoothing bias of GMQ fits across shape parameters")
    s.add_argument("--c-grid", type=_floats, default=[0.02, 0.1, 0.5])
    s.add_argument("--c-floor", type=float, default=1e-3)
    s.add_argument("--n", type=int, default=100000)
    s.add_argument("--p", type=int, default=5)
    s.add_argument("--reps", type=int, default=20)
    s.add_argument("--tau", type=float, default=0.9)
    s.add_argument("--dist", default="normal0_4")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_bias_scan)

    s = sub.add_parser("rmse-scan", help="estimation error of GMQ fits as n grows")
    s.add_argument("--n-grid", type=_ints, default=[1000, 4000, 16000])
    s.add_argument("--c", type=_shape_arg, default="auto")
    s.add_argument("--p", type=int, default=5)
    s.add_argument("--reps", type=int, default=50)
    s.add_argument("--tau", type=float, default=0.7)
    s.add_argument("--dist", default="normal0_4")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_rmse_scan)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"E_USAGE: {exc}", file=sys.stderr)
        return 2
    except GMQRError as exc:
        print(f"{exc.code}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"E_IO: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
