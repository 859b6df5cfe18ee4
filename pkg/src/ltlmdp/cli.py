"""Command-line entry point.

Subcommands follow the synthesis pipeline: ``validate``, ``build-mdp``,
``translate``, ``product``, ``synthesize`` and ``simulate``. Exit status is
0 on success, 1 for invalid input and 2 for capacity or solver failures.

Tolerances can be overridden through ``LTLMDP_VI_EPS`` (value-iteration
stopping threshold) and ``LTLMDP_PROB_TOL`` (probability-sum tolerance).
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass

from . import case_study_path
from .automata import export_hoa, import_hoa, restrict_alphabet
from .env import PROB_TOL, load_environment_file, realizable_symbols
from .errors import CapacityError, LtlMdpError, SolverError
from .mdp import build_mdp, dump_mdp
from .product import build_product, product_stats
from .synthesis import VI_EPS, dump_policy, initial_value, solve_product, translate_for_model


@dataclass
class RunConfig:
    command: str
    model: str | None = None
    formula: str | None = None
    hoa_in: str | None = None
    seed: int = 0
    vi_eps: float = VI_EPS
    prob_tol: float = PROB_TOL
    prune: bool = True


def _env_float(name, default):
    raw = os.environ.get(name)
    return float(raw) if raw else default


def _parser():
    ap = argparse.ArgumentParser(prog="ltlmdp", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def model_arg(p, required=True):
        p.add_argument("--model", required=required,
                       help="model JSON file, or 'casestudy' for the bundled example")

    def spec_args(p):
        p.add_argument("--formula", help="LTL formula (defaults to the model's 'formula' key)")
        p.add_argument("--hoa-in", help="use a Rabin automaton in HOA format instead of translating")
        p.add_argument("--no-prune", action="store_true",
                       help="build all |S| x |Q| product states")
        p.add_argument("--json", action="store_true", help="print a JSON summary instead")

    p = sub.add_parser("validate", help="check a model file")
    model_arg(p)

    p = sub.add_parser("build-mdp", help="build the labeled MDP")
    model_arg(p)
    p.add_argument("--dump", metavar="PATH", help="write a text listing ('-' for stdout)")

    p = sub.add_parser("translate", help="translate a formula to a Rabin automaton")
    model_arg(p, required=False)
    p.add_argument("--formula")
    p.add_argument("--hoa-in")
    p.add_argument("--hoa-out", metavar="PATH")

    p = sub.add_parser("product", help="build the product MDP")
    model_arg(p)
    spec_args(p)
    p.add_argument("--stats", action="store_true", help="print state and pair counts")

    p = sub.add_parser("synthesize", help="compute the optimal strategy")
    model_arg(p)
    spec_args(p)
    p.add_argument("--out", metavar="PATH", help="write the policy table")

    p = sub.add_parser(
        "simulate", help="estimate the satisfaction probability by simulation",
        description="Entering an accepting end component within the horizon is "
                    "counted as satisfying the mission; LTL satisfaction itself is "
                    "a property of infinite runs.")
    model_arg(p)
    spec_args(p)
    p.add_argument("--episodes", type=int, default=1000)
    p.add_argument("--horizon", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--traces-out", metavar="DIR", help="write every trace to DIR")
    return ap


def _config(args):
    return RunConfig(
        command=args.command,
        model=getattr(args, "model", None),
        formula=getattr(args, "formula", None),
        hoa_in=getattr(args, "hoa_in", None),
        seed=getattr(args, "seed", 0),
        vi_eps=_env_float("LTLMDP_VI_EPS", VI_EPS),
        prob_tol=_env_float("LTLMDP_PROB_TOL", PROB_TOL),
        prune=not getattr(args, "no_prune", False),
    )


def _load(cfg):
    path = case_study_path() if cfg.model == "casestudy" else cfg.model
    return load_environment_file(path, tol=cfg.prob_tol)


def _automaton(cfg, model, default_formula):
    if cfg.formula is not None and cfg.hoa_in is not None:
        raise _UsageError("give either --formula or --hoa-in, not both")
    if cfg.hoa_in is not None:
        with open(cfg.hoa_in, encoding="utf-8") as fh:
            d = import_hoa(fh.read())
        return restrict_alphabet(d, realizable_symbols(model.env, model.obs))
    formula = cfg.formula if cfg.formula is not None else default_formula
    if formula is None:
        raise _UsageError("no formula: pass --formula or --hoa-in")
    return translate_for_model(model, formula)


class _UsageError(LtlMdpError):
    pass


def _f6(x):
    return f"{x:.6f}"


def run(argv=None, out=None):
    """Execute one command; returns the exit status."""
    out = out or sys.stdout
    args = _parser().parse_args(argv)
    cfg = _config(args)
    try:
        return _dispatch(cfg, args, out)
    except (CapacityError, SolverError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (LtlMdpError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _dispatch(cfg, args, out):
    t0 = time.perf_counter()
    if cfg.command == "translate":
        return _translate(cfg, args, out)
    model, default_formula = _load(cfg)
    if cfg.command == "validate":
        print(f"ok {len(model.env.vertices)} vertices", file=out)
        return 0
    m = build_mdp(*model)
    if cfg.command == "build-mdp":
        print(f"mdp_states {m.n_states}", file=out)
        if args.dump == "-":
            out.write(dump_mdp(m))
        elif args.dump:
            with open(args.dump, "w", encoding="utf-8") as fh:
                fh.write(dump_mdp(m))
        return 0
    d = _automaton(cfg, model, default_formula)
    prod = build_product(m, d, prune=cfg.prune)
    summary = {
        "mdp_states": m.n_states,
        "dra_states": d.n_states,
        "dra_pairs": len(d.pairs),
        "product_states": prod.n_states,
    }
    if cfg.command == "product":
        if args.json:
            summary["pairs"] = [{"L": len(L), "K": len(K)} for L, K in prod.pairs]
            print(json.dumps(summary, indent=2), file=out)
        else:
            out.write(product_stats(prod) if args.stats else f"product_states {prod.n_states}\n")
        return 0
    amecs, target, dead, sol, pp = solve_product(prod, eps=cfg.vi_eps)
    prob = initial_value(prod, sol.values)
    summary.update(amecs=[len(ec.states) for ec in amecs], max_probability=round(prob, 6))
    if cfg.command == "synthesize":
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(dump_policy(pp, prod))
        if args.json:
            summary["seconds"] = round(time.perf_counter() - t0, 3)
            print(json.dumps(summary, indent=2), file=out)
        else:
            print(f"max_probability {_f6(prob)}", file=out)
        return 0
    if cfg.command == "simulate":
        from .sim import GENERATOR, estimate_satisfaction, simulate, write_traces
        from .synthesis import induce_and_project

        strategy = induce_and_project(pp, prod)
        est = estimate_satisfaction(model, strategy, args.episodes, args.horizon, cfg.seed)
        if args.traces_out:
            traces = [simulate(model, strategy.spawn(), cfg.seed + k, args.horizon)
                      for k in range(args.episodes)]
            write_traces(traces, args.traces_out, model.env.propositions)
        if args.json:
            summary.update(fraction=est.fraction, half_width=round(est.half_width, 6),
                           episodes=est.episodes, generator=GENERATOR, seed=cfg.seed)
            print(json.dumps(summary, indent=2), file=out)
        else:
            print(f"max_probability {_f6(prob)}", file=out)
            print(f"fraction {_f6(est.fraction)} half_width {_f6(est.half_width)}", file=out)
            print(f"generator {GENERATOR} seed {cfg.seed}", file=out)
        return 0
    raise _UsageError(f"unknown command {cfg.command}")


def _translate(cfg, args, out):
    if (args.formula is None) == (args.hoa_in is None):
        raise _UsageError("translate needs exactly one of --formula or --hoa-in")
    if args.model:
        model, _ = _load(cfg)
        if args.hoa_in:
            d = _automaton(cfg, model, None)
        else:
            d = translate_for_model(model, args.formula)
    elif args.hoa_in:
        with open(args.hoa_in, encoding="utf-8") as fh:
            d = import_hoa(fh.read())
    else:
        from .automata import ltl_to_dra
        d = ltl_to_dra(args.formula)
    print(f"dra_states {d.n_states} pairs {len(d.pairs)} symbols {len(d.alphabet)}", file=out)
    if args.hoa_out:
        with open(args.hoa_out, "w", encoding="utf-8") as fh:
            fh.write(export_hoa(d, name=args.formula))
    return 0


def main():
    sys.exit(run())
