#!/usr/bin/env python
"""Command-line entry point: one subcommand per module, CSV or JSON on stdout or to a file."""
import argparse
import logging
import sys
from typing import Any, Dict, List, Literal, Optional

import pandas as pd
from pydantic import BaseModel, Field, ValidationError

import carl
from config import LIPWIDTH_CONFIG
from corpus import write_corpus
from entropy import entropy_profile
from errors import CapacityError
from lipbounds import certificate_for, empirical_lipschitz, shallow_bound
from network import save_net
from schema import Activation, BoundFamily, GrowthFunction, LipschitzParametrization, RateFunction, TakagiSpec
from spaces import load_point_cloud, sigma_set, uniform_interval
from suite import run_acceptance_suite
from takagi import build_takagi_network, coefficient_family, error_curve, values_table
from utils import (
    csv_text,
    dumps_json,
    get_certificate_dataframe,
    get_profile_dataframe,
    get_width_dataframe,
    profile_from_dataframe,
    read_table,
    widths_from_dataframe,
    write_text,
)
from widths import anchor_family, load_family, restrict_to_gamma, width_upper, width_upper_profile

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_CAPACITY = 2
EXIT_VIOLATION = 3


class RunConfig(BaseModel):
    subcommand: str = Field(description="Top-level command, e.g. entropy or 'carl consistency'")
    inputs: List[str] = Field(default_factory=list, description="Input file paths")
    seed: int = Field(default=LIPWIDTH_CONFIG["seed"], ge=0, lt=2 ** 64)
    tol: Optional[float] = Field(default=None, gt=0, description="Bisection tolerance")
    out: Optional[str] = Field(default=None, description="Output path, stdout when missing")
    format: Literal["csv", "json"] = "csv"
    options: Dict[str, Any] = Field(default_factory=dict, description="Subcommand flags")

    class Config:
        json_schema_extra = {
            "example": {"subcommand": "entropy", "inputs": ["data/unit_interval_17.json"], "format": "csv",
                        "options": {"n_max": 4}}
        }


def _emit(df: pd.DataFrame, doc_line: str, config: RunConfig) -> str:
    if config.format == "json":
        text = dumps_json({"doc": doc_line, "rows": df.to_dict(orient="records")}) + "\n"
    else:
        text = csv_text(df, doc_line)
    write_text(text, config.out)
    if not config.out:
        sys.stdout.write(text)
    return text


def _emit_json(obj: Any, config: RunConfig) -> str:
    text = dumps_json(obj) + "\n"
    write_text(text, config.out)
    if not config.out:
        sys.stdout.write(text)
    return text


def _load_set(config: RunConfig):
    opts = config.options
    if opts.get("sigma"):
        return sigma_set(opts["sigma"])
    if opts.get("interval"):
        return uniform_interval(opts["interval"])
    if not config.inputs:
        raise ValueError("Pass --set, --sigma or --interval")
    return load_point_cloud(config.inputs[0])


def _bound_family(opts: Dict[str, Any]) -> BoundFamily:
    return BoundFamily(kind=opts["w_kind"], C=opts["C"], delta=opts["w_delta"], c=opts["w_c"], nu=opts["nu"])


def _rate(opts: Dict[str, Any]) -> RateFunction:
    if opts["rate"] == "expo":
        return RateFunction(kind="expo", c=opts["c"], a=opts["a"], b=opts["b"])
    return RateFunction(kind=opts["rate"], alpha=opts["alpha"], beta=opts["beta"])


def _rate_row(rate: RateFunction) -> Dict[str, Any]:
    return {
        'kind': rate.kind, 'alpha': rate.alpha, 'beta': rate.beta,
        'c': rate.c, 'a': rate.a, 'b': rate.b, 'describe': rate.describe(),
    }


def run_lipbound(config: RunConfig) -> int:
    opts = config.options
    act = Activation(kind=opts["activation"], L=opts["L"])
    if opts["shallow"]:
        cert = shallow_bound(opts["d"], opts["W"], opts["L"], opts["w"], opts["activation"])
        layout = (opts["d"], opts["W"], 1)
    else:
        cert = certificate_for(act, opts["d"], opts["W"], opts["w"], opts["n"])
        layout = (opts["d"], opts["W"], opts["n"])
    if config.format == "csv":
        _emit(get_certificate_dataframe(cert),
              f"{cert.regime} recursion constants, closed form {cert.closed_form:.17g}", config)
        return EXIT_OK
    empirical = None
    if opts["empirical"]:
        empirical = empirical_lipschitz(layout, act, opts["w"], opts["empirical"], seed=config.seed)
    _emit_json({
        "regime": cert.regime,
        "params": cert.params,
        "L_recursion": cert.value,
        "L_closed_form": cert.closed_form,
        "L_empirical": empirical,
    }, config)
    return EXIT_OK


def run_entropy(config: RunConfig) -> int:
    K = _load_set(config)
    profile = entropy_profile(K, config.options["n_max"], config.tol, config.options["mode"])
    _emit(get_profile_dataframe(profile), f"entropy numbers of {K.label or 'set'}: bracket [lower, upper]", config)
    return EXIT_OK


def _width_family(config: RunConfig, K) -> LipschitzParametrization:
    opts = config.options
    family = opts["family"]
    if family == "takagi":
        return coefficient_family(opts["takagi_terms"], K.norm.dimension)
    if family == "custom-json":
        if not opts.get("family_file"):
            raise ValueError("--family custom-json needs --family-file")
        return load_family(opts["family_file"], K.norm)
    m = min(opts["anchors"], K.size)
    return anchor_family(K.points[:m], K.points[-1], K.norm, id=f"anchors_{m}")


def run_width(config: RunConfig) -> int:
    opts = config.options
    K = _load_set(config)
    par = _width_family(config, K)
    if opts["gamma"]:
        estimates = width_upper_profile(K, par, opts["gamma"], opts["delta"])
    else:
        estimates = [width_upper(K, restrict_to_gamma(par, par.gamma), opts["delta"])]
    _emit(get_width_dataframe(estimates), f"Lipschitz width upper bounds of {K.label or 'set'} via {par.id}", config)
    return EXIT_OK


def run_carl(config: RunConfig) -> int:
    opts = config.options
    action = opts["action"]
    if action == "index":
        idx = carl.carl_index(opts["m"], opts["gamma"], opts["delta"])
        df = pd.DataFrame([{'m': opts["m"], 'gamma': opts["gamma"], 'delta': opts["delta"],
                            'value': idx.value, 'index': idx.index, 'degenerate': idx.degenerate}])
        _emit(df, "Carl index m log2(3 gamma / delta)", config)
        return EXIT_OK
    if action in ("lower-deep", "lower-shallow"):
        rate, wfam = _rate(opts), _bound_family(opts)
        if action == "lower-deep":
            symbolic = carl.nn_lower_rate_deep(rate, wfam)
            value = carl.nn_lower_bound_deep(rate, wfam, opts["n"], opts.get("L"), opts.get("W"))
        else:
            symbolic = carl.nn_lower_rate_shallow(rate, wfam)
            value = carl.nn_lower_bound_shallow(rate, wfam, opts["n"])
        row = _rate_row(symbolic)
        row.update({'n': opts["n"], 'value': value})
        _emit(pd.DataFrame([row]), "network error lower bound, up to constants", config)
        return EXIT_OK
    if action == "entropy-from-width":
        rate = carl.entropy_upper_from_width(_rate(opts), opts["p"], opts["q"])
        _emit(pd.DataFrame([_rate_row(rate)]), "entropy upper rate, up to constants", config)
        return EXIT_OK
    if action == "entropy-from-nn":
        rate = carl.entropy_upper_from_nn_error(_rate(opts), _bound_family(opts), opts["regime"])
        _emit(pd.DataFrame([_rate_row(rate)]), "entropy upper rate, up to constants", config)
        return EXIT_OK
    if action == "width-from-entropy":
        growth = GrowthFunction(kind="power", c=opts["gc"], p=opts["p"], q=opts["q"])
        rate, two_sided = carl.width_rate_from_entropy(_rate(opts), growth)
        row = _rate_row(rate)
        row['two_sided'] = two_sided
        _emit(pd.DataFrame([row]), "Lipschitz width rate in n for gamma_n = 2^phi(n)", config)
        return EXIT_OK
    # consistency
    profile = profile_from_dataframe(read_table(opts["entropy"]), label=opts["entropy"])
    widths = widths_from_dataframe(read_table(opts["widths"]))
    report = carl.check_carl_consistency(profile, widths)
    _emit_json({"checked": report.checked, "partial": report.partial, "ok": report.ok,
                "violations": report.violations}, config)
    return EXIT_OK if report.ok else EXIT_VIOLATION


def run_takagi(config: RunConfig) -> int:
    opts = config.options
    emit = opts["emit"]
    if emit == "net.json":
        net, _ = build_takagi_network(TakagiSpec(lam=opts["lam"], n_terms=opts["n"]))
        text = save_net(net, config.out) + "\n"
        if not config.out:
            sys.stdout.write(text)
        return EXIT_OK
    if emit == "values.csv":
        df = values_table(TakagiSpec(lam=opts["lam"], n_terms=opts["n"]), opts["points"])
        doc = f"psi_n and its width-4 network on [0, 1], lambda={opts['lam']:g}, n={opts['n']}"
    else:
        df = error_curve(opts["lam"], opts["n"], opts["points"])
        doc = f"sup-grid error of psi_n against f_lambda, lambda={opts['lam']:g}; slack is float rounding"
    _emit(df, doc, config)
    return EXIT_OK


def run_corpus(config: RunConfig) -> int:
    paths = write_corpus(config.options["out_dir"], config.options["quick"], config.seed)
    _emit_json({"written": paths}, config.model_copy(update={"out": None}))
    return EXIT_OK


def run_suite(config: RunConfig) -> int:
    report = run_acceptance_suite(config.options["quick"], config.options["corrupt_takagi"], config.seed)
    _emit_json({"quick": report.quick, "passed": report.passed, "criteria": report.criteria}, config)
    return EXIT_OK if report.passed else EXIT_VIOLATION


COMMANDS = {
    "lipbound": run_lipbound,
    "entropy": run_entropy,
    "width": run_width,
    "carl": run_carl,
    "takagi": run_takagi,
    "corpus": run_corpus,
    "suite": run_suite,
}


def run(config: RunConfig) -> int:
    """Dispatch one command; returns the process exit status."""
    try:
        return COMMANDS[config.subcommand](config)
    except CapacityError as e:
        logger.error(str(e))
        return EXIT_CAPACITY
    except (ValueError, ArithmeticError, OSError) as e:
        # LipwidthError and pydantic ValidationError are both ValueErrors; OSError covers unreadable inputs
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_DOMAIN


def _add_rate_flags(p: argparse.ArgumentParser):
    p.add_argument("--rate", choices=["polylog", "loginv", "expo"], default="polylog")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--c", type=float, default=1.0, help="expo rate constant")
    p.add_argument("--a", type=float, default=1.0, help="expo power of n")
    p.add_argument("--b", type=float, default=0.0, help="expo power of log2 n")


def _add_family_flags(p: argparse.ArgumentParser):
    p.add_argument("--w-kind", choices=["constant", "polynomial", "exponential"], default="constant")
    p.add_argument("--C", type=float, default=1.0)
    p.add_argument("--w-delta", type=float, default=0.0)
    p.add_argument("--w-c", type=float, default=0.0)
    p.add_argument("--nu", type=float, default=0.0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lipwidth", description="Lipschitz widths, entropy numbers and Carl inequalities")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    parser.add_argument("--seed", type=int, default=LIPWIDTH_CONFIG["seed"])
    parser.add_argument("--out", "-o", type=str, default=None)
    parser.add_argument("--format", choices=["csv", "json"], default=None, help="csv by default, json for lipbound")
    parser.add_argument("--tol", type=float, default=None)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("lipbound", help="Lipschitz certificate of y -> Phi(y)")
    p.add_argument("--activation", choices=["relu", "sigmoidal", "identity"], default="relu")
    p.add_argument("--L", type=float, default=1.0)
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--W", type=int, default=2)
    p.add_argument("--w", type=float, default=1.0)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--shallow", action="store_true")
    p.add_argument("--empirical", type=int, default=LIPWIDTH_CONFIG["empirical_pairs"],
                   help="sampled pairs for the empirical constant, 0 to skip")

    p = sub.add_parser("entropy", help="Entropy-number brackets of a finite set")
    p.add_argument("--set", dest="set_path", type=str, default=None)
    p.add_argument("--sigma", type=int, default=None, help="use K(sigma) truncated at J")
    p.add_argument("--interval", type=int, default=None, help="use a uniform grid of [0, 1]")
    p.add_argument("--n-max", type=int, default=4)
    p.add_argument("--mode", choices=["auto", "exact", "greedy"], default="auto")

    p = sub.add_parser("width", help="Lipschitz-width upper bounds")
    p.add_argument("--set", dest="set_path", type=str, default=None)
    p.add_argument("--sigma", type=int, default=None)
    p.add_argument("--interval", type=int, default=None)
    p.add_argument("--family", choices=["anchors", "takagi", "custom-json"], default="anchors", help="witness parametrization")
    p.add_argument("--family-file", type=str, default=None, help="AffineFamilySpec JSON for --family custom-json")
    p.add_argument("--takagi-terms", type=int, default=2, help="terms of the Takagi coefficient family")
    p.add_argument("--anchors", type=int, default=1, help="span of the first points")
    p.add_argument("--gamma", type=float, nargs="*", default=None)
    p.add_argument("--grid-delta", "--delta", dest="delta", type=float, default=0.125, help="l_inf fineness of the parameter grid")

    p = sub.add_parser("carl", help="Rate implications and consistency checks")
    actions = p.add_subparsers(dest="action", required=True)
    a = actions.add_parser("index")
    a.add_argument("--m", type=int, required=True)
    a.add_argument("--gamma", type=float, required=True)
    a.add_argument("--delta", type=float, required=True)
    for name in ("lower-deep", "lower-shallow"):
        a = actions.add_parser(name)
        _add_rate_flags(a)
        _add_family_flags(a)
        a.add_argument("--n", type=int, required=True, help="depth n or width W")
        if name == "lower-deep":
            a.add_argument("--L", type=float, default=None)
            a.add_argument("--W", type=int, default=None)
    a = actions.add_parser("entropy-from-width")
    _add_rate_flags(a)
    a.add_argument("--p", type=float, required=True)
    a.add_argument("--q", type=float, default=0.0)
    a = actions.add_parser("entropy-from-nn")
    _add_rate_flags(a)
    _add_family_flags(a)
    a.add_argument("--regime", choices=["deep", "shallow"], default="deep")
    a = actions.add_parser("width-from-entropy")
    _add_rate_flags(a)
    a.add_argument("--p", type=float, required=True)
    a.add_argument("--q", type=float, default=0.0)
    a.add_argument("--gc", type=float, default=1.0, help="constant of phi")
    a = actions.add_parser("consistency")
    a.add_argument("--entropy", type=str, required=True)
    a.add_argument("--widths", type=str, required=True)

    p = sub.add_parser("takagi", help="Takagi partial sums and their networks")
    p.add_argument("--lambda", dest="lam", type=float, default=4.0)
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--grid", "--points", dest="points", type=int, default=4097)
    p.add_argument("--emit", choices=["values.csv", "net.json", "error-curve.csv"], default="error-curve.csv",
                   help="artifact to write to --out or stdout")

    p = sub.add_parser("corpus", help="Write the shipped corpus clouds as JSON")
    p.add_argument("--out-dir", type=str, default="corpus")
    p.add_argument("--quick", action="store_true")

    p = sub.add_parser("suite", help="Run the acceptance suite")
    p.add_argument("--quick", action="store_true")
    p.add_argument("--corrupt-takagi", action="store_true")
    return parser


GLOBAL_FLAGS = ("verbose", "seed", "out", "format", "tol", "command", "set_path")
DEFAULT_FORMATS = {"lipbound": "json"}


def config_from_args(args: argparse.Namespace) -> RunConfig:
    values = vars(args)
    options = {k: v for k, v in values.items() if k not in GLOBAL_FLAGS}
    subcommand = args.command
    inputs = [args.set_path] if getattr(args, "set_path", None) else []
    if subcommand == "carl":
        inputs = [p for p in (values.get("entropy"), values.get("widths")) if p]
    return RunConfig(
        subcommand=subcommand,
        inputs=inputs,
        seed=args.seed,
        tol=args.tol,
        out=args.out,
        format=args.format or DEFAULT_FORMATS.get(subcommand, "csv"),
        options=options,
    )


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING if args.verbose == 0 else logging.INFO if args.verbose == 1 else logging.DEBUG
    logging.basicConfig(level=level, format="%(asctime)s %(name)s %(levelname)s %(message)s", stream=sys.stderr)
    try:
        config = config_from_args(args)
    except ValidationError as e:
        logger.error(str(e))
        return EXIT_DOMAIN
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
