"""Command-line interface.

Exit codes: 0 success, 1 failed gradient check, 2 usage error, 3 data or
numerical error.
"""

import argparse
import logging
import sys

import numpy as np

from . import io
from .errors import DataError, DegenerateData, DimensionMismatch, FormatError, GsnIcaError
from .linalg import as_dataset, covariance, inv_sqrt_psd, mean, random_rotation
from .metrics import match_sources
from .optimize import INIT_MODES, FitConfig, fit_ica, gradcheck
from .plotting import plot_sources, plot_trace
from .synth import SUM_DIFF_MIX, make_experiment

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_DATA = 3

GRADCHECK_THRESHOLD = 1e-4

UNMIX_NOTE = (
    "Sources are recovered as s = W^T (x - m): column j of W is the projection "
    "vector of component j."
)


class UsageError(GsnIcaError):
    pass


def parse_floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from None


def parse_matrix(text):
    """Parse ``"a,b;c,d"`` into a square matrix."""
    rows = [parse_floats(r) for r in text.split(";") if r.strip()]
    if not rows or any(len(r) != len(rows) for r in rows):
        raise UsageError(f"mixing matrix must be square, got {text!r}")
    return np.array(rows)


def _fit_config(args):
    try:
        return FitConfig(
            max_iter=args.max_iter,
            grad_tol=args.tol,
            restarts=args.restarts,
            init_mode=args.init,
            seed=args.seed,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _add_fit_flags(p, seed_help="seed for restart rotations"):
    p.add_argument("--init", choices=INIT_MODES, default="paper",
                   help="initial unmixing matrix: sample covariance (paper), its inverse square root (whiten), "
                        "or a random rotation of the latter (random)")
    p.add_argument("--max-iter", type=int, default=2000)
    p.add_argument("--tol", type=float, default=1e-7, help="gradient inf-norm stopping tolerance")
    p.add_argument("--restarts", type=int, default=4)
    p.add_argument("--seed", type=int, default=0, help=seed_help)


def cmd_synth(args):
    if args.n < 1:
        raise UsageError("--n must be positive")
    tau = parse_floats(args.tau) if args.tau else ([3.0, 0.3] if args.d == 2 else None)
    if tau is None or len(tau) != args.d:
        raise UsageError(f"--tau needs {args.d} values")
    if any(t <= 0 for t in tau):
        raise UsageError("--tau values must be positive")
    if args.mix:
        A = parse_matrix(args.mix)
    elif args.d == 2:
        A = SUM_DIFF_MIX
    else:
        raise UsageError("--mix is required when --d is not 2")
    if A.shape[0] != args.d:
        raise UsageError(f"--mix must be {args.d}x{args.d}")
    if not 0 <= args.outliers <= 0.5:
        raise UsageError("--outliers must lie in [0, 0.5]")

    S, _, X = make_experiment(args.n, tau, A, args.outliers, args.seed)
    d = args.d
    io.write_csv(S, f"{args.out}_sources.csv", header=[f"s{j + 1}" for j in range(d)])
    io.write_csv(X, f"{args.out}_mixed.csv", header=[f"x{j + 1}" for j in range(d)])
    print("mixing matrix A:")
    for row in A:
        print("  " + "  ".join(f"{v: .6g}" for v in row))
    print(f"wrote {args.out}_sources.csv ({S.shape[0]}x{d}) and {args.out}_mixed.csv ({X.shape[0]}x{d})")
    return EXIT_OK


def _report_fit(res):
    print(f"final ln l: {res.final_log_l:.12g}")
    print(f"iterations: {res.iterations}")
    print(f"converged: {str(res.converged).lower()}")
    print(f"restart: {res.restart_index}")


def cmd_fit(args):
    cfg = _fit_config(args)
    X = io.read_csv(args.input)
    res = fit_ica(X, cfg)
    io.save_model(io.ModelFile.from_fit(res, X.shape[0]), args.model)
    if args.trace:
        io.write_trace(res.trace, args.trace)
    if args.plot:
        plot_trace(res.trace, args.plot)
    _report_fit(res)
    print(f"model written to {args.model}")
    return EXIT_OK


def _orient_and_rescale(S, X, lo, hi):
    """Flip each source to correlate positively with its most similar mixture, then min-max to ``[lo, hi]``."""
    out = np.empty_like(S)
    Xc = X - X.mean(axis=0)
    for j in range(S.shape[1]):
        s = S[:, j]
        sc = s - s.mean()
        corr = (Xc.T @ sc) / (np.linalg.norm(Xc, axis=0) * np.linalg.norm(sc) + 1e-300)
        if corr[np.argmax(np.abs(corr))] < 0:
            s = -s
        span = s.max() - s.min()
        scaled = (s - s.min()) / span if span > 0 else np.zeros_like(s)
        out[:, j] = lo + (hi - lo) * scaled
    return out


def cmd_separate(args):
    shape = rate = None
    if args.input:
        X = io.read_csv(args.input)
    elif args.images:
        signals, shapes = zip(*(io.read_pgm(p, return_shape=True) for p in args.images))
        if len(set(shapes)) != 1:
            raise DimensionMismatch("input images differ in size")
        shape = shapes[0]
        X = np.column_stack(signals)
    else:
        signals, rates = zip(*(io.read_wav(p, return_rate=True) for p in args.audio))
        if len({s.size for s in signals}) != 1:
            raise DimensionMismatch("input recordings differ in length")
        rate = rates[0]
        X = np.column_stack(signals)
    X = as_dataset(X)

    if args.model:
        params = io.load_model(args.model).to_params()
    else:
        res = fit_ica(X, _fit_config(args))
        _report_fit(res)
        params = res.params
        if args.save_model:
            io.save_model(io.ModelFile.from_fit(res, X.shape[0]), args.save_model)
    if params.d != X.shape[1]:
        raise DimensionMismatch(f"model has dimension {params.d}, input has {X.shape[1]}")

    S = params.components(X)
    d = S.shape[1]
    io.write_csv(S, f"{args.out}_sources.csv", header=[f"s{j + 1}" for j in range(d)])
    written = [f"{args.out}_sources.csv"]
    if shape is not None:
        scaled = _orient_and_rescale(S, X, 0.0, 1.0)
        for j in range(d):
            path = f"{args.out}_source{j + 1}.pgm"
            io.write_pgm(scaled[:, j], shape[0], shape[1], path)
            written.append(path)
    if rate is not None:
        scaled = _orient_and_rescale(S, X, -1.0, 32767 / 32768)
        for j in range(d):
            path = f"{args.out}_source{j + 1}.wav"
            io.write_wav(scaled[:, j], rate, path)
            written.append(path)
    print("wrote " + ", ".join(written))
    return EXIT_OK


def cmd_congruence(args):
    A = io.read_csv(args.a)
    B = io.read_csv(args.b)
    report = match_sources(A, B)
    print(report.to_json() if args.json else report.to_table())
    if args.plot:
        # column j of the reference set is the partner of recovered signal j
        plot_sources(B[:, report.matching], A * np.sign(report.signed), args.plot)
    return EXIT_OK


def cmd_gradcheck(args):
    if args.eps <= 0:
        raise UsageError("--eps must be positive")
    X = io.read_csv(args.input)
    # gradcheck at a generic point: whitened start rotated by a seeded rotation
    X = as_dataset(X, min_rows=2)
    if np.any(np.ptp(X, axis=0) == 0):
        raise DegenerateData("some coordinate is constant")
    rng = np.random.default_rng(args.seed)
    W = inv_sqrt_psd(covariance(X)) @ random_rotation(X.shape[1], rng)
    m = mean(X) + 0.1 * X.std(axis=0) * rng.standard_normal(X.shape[1])
    rep = gradcheck(X, m, W, h=args.eps)
    print(f"max relative error: {rep['max_rel_error']:.3e}")
    ok = rep["max_rel_error"] < GRADCHECK_THRESHOLD
    print("PASS" if ok else "FAIL")
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_plot_trace(args):
    try:
        trace = io.read_trace(args.trace)
    except FormatError as exc:
        raise UsageError(str(exc)) from None
    plot_trace(trace, args.out)
    print(f"wrote {args.out}")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="gsnica",
        description="ICA by maximum-likelihood fitting of the General Split Normal distribution. " + UNMIX_NOTE,
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate skewed sources and their linear mixture")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--n", type=int, default=10000)
    p.add_argument("--tau", default=None, help="comma-separated right/left scale ratios (default 3,0.3)")
    p.add_argument("--mix", default=None, help='mixing matrix rows, e.g. "1,1;1,-1" (default for d=2)')
    p.add_argument("--outliers", type=float, default=0.0, help="fraction of uniform outliers to append")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="synth", help="output file prefix")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("fit", help="fit the unmixing model to a CSV dataset")
    p.add_argument("--input", required=True)
    _add_fit_flags(p)
    p.add_argument("--model", default="model.json")
    p.add_argument("--trace", default=None, help="write per-iteration trace CSV")
    p.add_argument("--plot", default=None, help="write trace figure (SVG/PNG by extension)")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("separate", help="recover sources from mixtures", description=UNMIX_NOTE)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", help="CSV of mixtures, one column per channel")
    src.add_argument("--images", nargs="+", metavar="PGM")
    src.add_argument("--audio", nargs="+", metavar="WAV")
    p.add_argument("--model", default=None, help="fitted model JSON; fit on the input when omitted")
    p.add_argument("--save-model", default=None, help="when fitting, also write the model here")
    _add_fit_flags(p)
    p.add_argument("--out", default="separated", help="output file prefix")
    p.set_defaults(func=cmd_separate)

    p = sub.add_parser("congruence", help="matched Tucker congruence between two CSV signal sets")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--json", action="store_true")
    p.add_argument("--plot", default=None, help="write a scatter of each matched pair (SVG/PNG by extension)")
    p.set_defaults(func=cmd_congruence)

    p = sub.add_parser("gradcheck", help="compare analytic and finite-difference gradients")
    p.add_argument("--input", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--eps", type=float, default=1e-6)
    p.set_defaults(func=cmd_gradcheck)

    p = sub.add_parser("plot-trace", help="render a fit trace as an SVG line chart")
    p.add_argument("--trace", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_plot_trace)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"gsnica {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, FormatError) as exc:
        print(f"gsnica {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"gsnica {args.command}: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
