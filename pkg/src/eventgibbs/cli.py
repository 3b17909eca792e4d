"""Command-line interface: ``evt <subcommand> ...``.

Exit codes: 0 success, 1 bad input (usage, parse or validation error),
2 numerical failure (no convergence, sampler budget exhausted, failed
certification or oracle disagreement). Results go to stdout, diagnostics to
stderr.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import formats
from .entropy import (
    DECOMPOSITION_TOL,
    max_pointwise_residual,
    mean_entropy_relation,
    relative_entropy,
    verify_h_theorem,
)
from .errors import EventologyError, NumericalError, ValidationError
from .gibbs import (
    Direction,
    GibbsModel,
    gibbs_distribution,
    solve_alpha_for_mean,
)
from .oracle import OracleConfig, minimize_kl
from .powerset import check_same_eventset
from .sampling import sample

# documented agreement bounds for `evt oracle`
ORACLE_ENTROPY_TOL = 1e-6
ORACLE_LINF_TOL = 1e-4

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


def _read(path):
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _write(path, text):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _load_model(path):
    try:
        return formats.parse_model(_read(path))
    except ValidationError as exc:
        raise ValidationError(f"{path}: {exc}") from exc


def _load_dist(path):
    try:
        return formats.parse_dist(_read(path))
    except ValidationError as exc:
        raise ValidationError(f"{path}: {exc}") from exc


def _rate_model(args, model):
    if args.beta is not None:
        return GibbsModel.from_rate(model.base, model.value, Direction.PERCEPTION_GIBBS, args.beta)
    return GibbsModel.from_rate(model.base, model.value, Direction.ACTIVITY_ANTI_GIBBS, args.gamma)


def _model_lines(gm, h):
    rate = f"beta={gm.beta!r}" if gm.alpha <= 0 else f"gamma={gm.gamma!r}"
    return [f"alpha={gm.alpha!r}", rate, f"logZ={gm.log_z!r}", f"H={h!r}"]


def cmd_gibbs(args):
    model = _load_model(args.model)
    gm = _rate_model(args, model)
    p = gibbs_distribution(gm)
    h = relative_entropy(p, model.base)
    _write(args.out, formats.emit_dist(p, {"alpha": gm.alpha, "logZ": gm.log_z, "H": h}))
    return EXIT_OK


def cmd_solve(args):
    model = _load_model(args.model)
    gm = solve_alpha_for_mean(model.base, model.value, args.target_mean, args.tol)
    p = gibbs_distribution(gm)
    h = relative_entropy(p, model.base)
    print("\n".join(_model_lines(gm, h)))
    if args.out:
        _write(args.out, formats.emit_dist(p, {"alpha": gm.alpha, "logZ": gm.log_z, "H": h}))
    return EXIT_OK


def cmd_entropy(args):
    model = _load_model(args.model)
    dist = _load_dist(args.dist).distribution
    check_same_eventset(dist, model.base)
    print(f"H={relative_entropy(dist, model.base)!r}")
    return EXIT_OK


def cmd_verify(args):
    model = _load_model(args.model)
    report = verify_h_theorem(model.base, model.value, args.target_mean,
                              trials=args.trials, seed=args.seed, workers=args.threads)
    print(report.summary())
    if not report.passed:
        print("verification failed: a feasible competitor beat the Gibbs member",
              file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_oracle(args):
    model = _load_model(args.model)
    res = minimize_kl(model.base, model.value, args.target_mean,
                      OracleConfig(max_iters=args.iters, tol=args.tol))
    gm = solve_alpha_for_mean(model.base, model.value, args.target_mean, 1e-13)
    p = gibbs_distribution(gm)
    h = relative_entropy(p, model.base)
    dh = abs(res.entropy - h)
    linf = float(np.max(np.abs(res.distribution.probs - p.probs)))
    agree = dh <= ORACLE_ENTROPY_TOL and linf <= ORACLE_LINF_TOL
    print("\n".join([
        f"oracle_H={res.entropy!r}",
        f"gibbs_H={h!r}",
        f"abs_entropy_diff={dh!r}",
        f"linf_distance={linf!r}",
        f"iterations={res.iterations}",
        f"fw_gap={res.gap!r}",
        f"converged={str(res.converged).lower()}",
        f"agree={str(agree).lower()}",
    ]))
    if not res.converged:
        print(f"oracle did not converge: gap {res.gap!r} > tol {args.tol!r} "
              f"after {res.iterations} iterations", file=sys.stderr)
    if not agree:
        print("oracle and closed form disagree beyond "
              f"{ORACLE_ENTROPY_TOL} (entropy) / {ORACLE_LINF_TOL} (L-inf)", file=sys.stderr)
    return EXIT_OK if agree and res.converged else EXIT_NUMERIC


def cmd_sample(args):
    dist = _load_dist(args.dist).distribution
    batch = sample(dist, args.n, args.seed)
    _write(args.out, formats.emit_batch(batch))
    return EXIT_OK


def cmd_identities(args):
    model = _load_model(args.model)
    gm = _rate_model(args, model)
    pointwise = max_pointwise_residual(gm)
    rel = mean_entropy_relation(gm)
    print(f"max_pointwise_residual={pointwise!r}")
    print(f"mean={rel.mean!r}")
    print(f"reconstructed_mean={rel.reconstructed_mean!r}")
    print(f"mean_relation_residual={abs(rel.residual)!r}")
    if pointwise > DECOMPOSITION_TOL or abs(rel.residual) > DECOMPOSITION_TOL:
        print("identity residual above 1e-9", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def _finite(text):
    x = float(text)
    if not math.isfinite(x):
        raise argparse.ArgumentTypeError(f"{text!r} is not finite")
    return x


def _positive_int(text):
    x = int(text)
    if x < 1:
        raise argparse.ArgumentTypeError(f"{text!r} must be >= 1")
    return x


def _rate_flags(p):
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--beta", type=_finite, help="Gibbs (perception) rate, >= 0")
    g.add_argument("--gamma", type=_finite, help="anti-Gibbs (activity) rate, >= 0")


def build_parser():
    parser = _Parser(prog="evt", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gibbs", help="tilt a model by a Gibbs or anti-Gibbs rate")
    p.add_argument("--model", required=True)
    _rate_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gibbs)

    p = sub.add_parser("solve", help="find the tilt that meets a target mean")
    p.add_argument("--model", required=True)
    p.add_argument("--target-mean", type=_finite, required=True)
    p.add_argument("--tol", type=_finite, default=1e-12)
    p.add_argument("--out")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("entropy", help="relative entropy of a distribution to the model base")
    p.add_argument("--dist", required=True)
    p.add_argument("--model", required=True)
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("verify", help="certify the minimum relative entropy property")
    p.add_argument("--model", required=True)
    p.add_argument("--target-mean", type=_finite, required=True)
    p.add_argument("--trials", type=_positive_int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=_positive_int, default=None,
                   help="worker threads (default: $EVENTGIBBS_THREADS or 1)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", help="compare the Frank-Wolfe minimizer with the closed form")
    p.add_argument("--model", required=True)
    p.add_argument("--target-mean", type=_finite, required=True)
    p.add_argument("--tol", type=_finite, default=1e-8)
    p.add_argument("--iters", type=_positive_int, default=5000)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("sample", help="draw subsets from a distribution file")
    p.add_argument("--dist", required=True)
    p.add_argument("-n", type=_positive_int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("identities", help="check the value/entropy identities")
    p.add_argument("--model", required=True)
    _rate_flags(p)
    p.set_defaults(func=cmd_identities)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_INPUT
    except (ValidationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except EventologyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
