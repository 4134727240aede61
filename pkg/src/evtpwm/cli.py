"""Command-line interface: ``evtpwm <subcommand> [flags]``.

Exit status is 0 on success, 2 on usage errors and 1 on library errors,
which are reported on stderr as ``error: <ErrorClass>: <message>``.
"""

from __future__ import annotations

import argparse
import io
import sys
from typing import Sequence, TextIO

from .asymptotics import Metric, Target, bm_asymp, grid_eval, k0_ratio, minmse_ratio, pot_asymp, write_grid_csv
from .asymptotics.pot import PwmPotAsymptotics
from .bm import BlockMaximaSample, BlockSpec, PartialPolicy, block_maxima_series, bm_fit, bm_quantile, pwm_betas
from .csvio import format_float, read_column
from .errors import EvtError, InputFormatError
from .evtmath import SecondOrderParams
from .pot import PotSample, pot_fit, pot_quantile
from .sim import Family, McConfig, burr, exponential, frechet, gev, gpd, mc_bm_study, mc_pot_study, uniform, write_mc_csv

__all__ = ["main", "run", "build_parser"]


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


def _row(header: list[str], values: list) -> str:
    cells = [format_float(v) if isinstance(v, float) else str(v) for v in values]
    return ",".join(header) + "\n" + ",".join(cells) + "\n"


def _read_input(args) -> TextIO:
    if args.input in (None, "-"):
        return sys.stdin
    try:
        with open(args.input, encoding="utf-8") as fh:
            return io.StringIO(fh.read())
    except (OSError, UnicodeDecodeError) as exc:
        raise InputFormatError(f"cannot read {args.input}: {exc}") from None


def _cmd_blocks(args) -> str:
    x = read_column(_read_input(args), args.column)
    maxima = block_maxima_series(x, BlockSpec(args.block_size, PartialPolicy(args.partial)))
    return "block_max\n" + "".join(format_float(float(v)) + "\n" for v in maxima)


def _cmd_bm_fit(args) -> str:
    x = read_column(_read_input(args), args.column)
    fit = bm_fit(pwm_betas(BlockMaximaSample.from_values(x, args.block_size), 3))
    header = ["gamma_hat", "a_hat", "b_hat", "k", "m"]
    vals = [fit.gamma_hat, fit.a_hat, fit.b_hat, fit.k, fit.m]
    if args.quantile is not None:
        header += ["p", "x_hat"]
        vals += [args.quantile, bm_quantile(fit, args.quantile)]
    return _row(header, vals)


def _cmd_pot_fit(args) -> str:
    x = read_column(_read_input(args), args.column)
    fit = pot_fit(PotSample.from_values(x, args.k))
    header = ["gamma_hat", "a_hat", "threshold", "k", "n"]
    vals = [fit.gamma_hat, fit.a_hat, fit.threshold, fit.k, fit.n]
    if args.quantile is not None:
        header += ["p", "x_hat"]
        vals += [args.quantile, pot_quantile(fit, args.quantile)]
    return _row(header, vals)


def _cmd_asymp(args) -> str:
    p = SecondOrderParams(args.gamma, args.rho)
    target = Target(args.target)
    provider = PwmPotAsymptotics(args.scale_reference)
    if args.method == "bm":
        s = bm_asymp(p, target)
    else:
        s = pot_asymp(p, target, provider)
    header = ["method", "target", "gamma", "rho", "sigma2", "unit_bias"]
    vals = [args.method, target.value, p.gamma, p.rho, s.sigma2, s.unit_bias]
    if p.rho < 0 and target in (Target.GAMMA, Target.QUANTILE):
        header += ["minmse_ratio", "k0_ratio"]
        vals += [minmse_ratio(p, target, provider), k0_ratio(p, target, provider)]
    return _row(header, vals)


def _cmd_compare_grid(args) -> str:
    gstep = args.gamma_step if args.gamma_step is not None else args.step
    rstep = args.rho_step if args.rho_step is not None else args.step
    if args.rho is not None:
        rho_range = (args.rho, args.rho)
    else:
        rho_range = (args.rho_min, args.rho_max)
    rows = grid_eval(
        Metric(args.metric),
        Target(args.target),
        gamma_range=(args.gamma_min, args.gamma_max),
        rho_range=rho_range,
        gamma_step=gstep if gstep is not None else 0.01,
        rho_step=rstep if rstep is not None else 0.02,
        provider=PwmPotAsymptotics(args.scale_reference),
        workers=args.workers,
    )
    return write_grid_csv(rows)


def _dist_from_args(args):
    fam = Family(args.dist)
    if fam in (Family.GEV, Family.GPD):
        if args.gamma is None:
            raise _UsageError(f"--dist {fam.value} needs --gamma")
        return (gev if fam is Family.GEV else gpd)(args.gamma)
    if fam is Family.FRECHET:
        if args.alpha is None:
            raise _UsageError("--dist frechet needs --alpha")
        return frechet(args.alpha)
    if fam is Family.BURR:
        return burr(args.beta, args.tau, args.lam)
    return uniform() if fam is Family.UNIFORM else exponential()


def _cmd_simulate(args) -> str:
    cfg = McConfig(_dist_from_args(args), args.k, args.m, args.reps, args.seed, workers=args.workers)
    res = mc_bm_study(cfg) if args.method == "bm" else mc_pot_study(cfg)
    return write_mc_csv(res)


def _seed(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--format", choices=["csv"], default="csv", help="output format (only csv)")
    data = _Parser(add_help=False)
    data.add_argument("--input", help="CSV file with a header row (default: stdin)")
    data.add_argument("--column", help="value column (default: first numeric column)")

    parser = _Parser(prog="evtpwm", description="PWM estimators for block maxima and peaks over threshold.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("blocks", parents=[common, data], help="block maxima of a series")
    p.add_argument("--block-size", type=int, required=True)
    p.add_argument("--partial", choices=[x.value for x in PartialPolicy], default="discard")
    p.set_defaults(func=_cmd_blocks)

    p = sub.add_parser("bm-fit", parents=[common, data], help="fit the GEV to block maxima")
    p.add_argument("--block-size", type=int, default=1, help="block size m used for quantiles")
    p.add_argument("--quantile", type=float, help="exceedance probability p per observation")
    p.set_defaults(func=_cmd_bm_fit)

    p = sub.add_parser("pot-fit", parents=[common, data], help="fit the GPD to the top k excesses")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--quantile", type=float, help="exceedance probability p <= k/n")
    p.set_defaults(func=_cmd_pot_fit)

    p = sub.add_parser("asymp", parents=[common], help="asymptotic variance and bias at one (gamma, rho)")
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--method", choices=["bm", "pot"], default="bm")
    p.add_argument("--target", choices=[t.value for t in Target], default="gamma")
    p.add_argument("--scale-reference", choices=["a0", "a"], default="a0")
    p.set_defaults(func=_cmd_asymp)

    p = sub.add_parser("compare-grid", parents=[common], help="BM/POT comparison metric on a (gamma, rho) grid")
    p.add_argument("--metric", choices=[m.value for m in Metric], required=True)
    p.add_argument("--target", choices=["gamma", "quantile"], default="gamma")
    p.add_argument("--gamma-min", type=float, default=-1.0)
    p.add_argument("--gamma-max", type=float, default=0.45)
    p.add_argument("--rho", type=float, help="single rho value (overrides --rho-min/--rho-max)")
    p.add_argument("--rho-min", type=float, default=-1.0)
    p.add_argument("--rho-max", type=float, default=0.0)
    p.add_argument("--step", type=float, help="step for both axes")
    p.add_argument("--gamma-step", type=float)
    p.add_argument("--rho-step", type=float)
    p.add_argument("--scale-reference", choices=["a0", "a"], default="a0")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=_cmd_compare_grid)

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo study of the index estimator")
    p.add_argument("--dist", choices=[f.value for f in Family], required=True)
    p.add_argument("--gamma", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--tau", type=float, default=1.0)
    p.add_argument("--lam", type=float, default=1.0)
    p.add_argument("--method", choices=["bm", "pot"], default="bm")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--m", type=int, default=10)
    p.add_argument("--reps", type=int, required=True)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=_cmd_simulate)
    return parser


def run(argv: Sequence[str] | None = None, stdout: TextIO | None = None, stderr: TextIO | None = None) -> int:
    out = sys.stdout if stdout is None else stdout
    err = sys.stderr if stderr is None else stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        text = args.func(args)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except _UsageError as exc:
        err.write(f"usage error: {exc}\n")
        return 2
    except EvtError as exc:
        msg = " ".join(str(exc).split())
        err.write(f"error: {type(exc).__name__}: {msg}\n")
        return 1
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            err.write(f"error: OutputError: cannot write {args.out}: {exc.strerror}\n")
            return 1
    else:
        out.write(text)
    return 0


def main() -> None:
    sys.exit(run())
