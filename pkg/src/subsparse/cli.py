"""Command-line front end.

Subcommands: ``gen``, ``check``, ``recover``, ``mc``, ``bound``, ``src``.
Each writes a single report (stdout when ``--output`` is omitted) that is a
pure function of the arguments. Exit status is 0 on success, 1 on domain or
input errors and 2 on resource or IO errors.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import classifier, conditions, geometry, randomized, solvers
from .errors import DomainError, ResourceError, SolverError
from .report import emit_report

COMMANDS = ("gen", "check", "recover", "mc", "bound", "src")


@dataclass
class ExperimentConfig:
    command: str
    input: str | None = None
    output: str | None = None
    format: str = "json"
    D: int | None = None
    d0: int | None = None
    s0: int | None = None
    rho0: float | None = None
    lam: float = 1.0
    dims: list[int] = field(default_factory=list)
    counts: list[int] = field(default_factory=list)
    method: str = "bp"
    eps_res: float = solvers.EPS_RES
    eps_opt: float = 1e-8
    max_iter: int | None = None
    trials: int = 100
    samples: int = 10
    queries: int = 50
    sparsity: int | None = None
    b: list[float] | None = None
    seed: int = 0
    vertex_method: str = "auto"
    budget: int = geometry.VERTEX_BUDGET
    parallel: bool = False

    def validate(self):
        if self.command not in COMMANDS:
            raise DomainError(f"unknown command {self.command!r}")
        if self.format not in ("json", "csv"):
            raise DomainError(f"field 'format' must be json or csv, got {self.format!r}")
        if self.input is not None and not os.access(self.input, os.R_OK):
            raise DomainError(f"input file {self.input!r} is not readable")
        if self.output not in (None, "-"):
            parent = Path(self.output).resolve().parent
            if not parent.is_dir():
                raise OSError(f"output directory {str(parent)!r} does not exist")


def _degrees(report: conditions.ConditionReport) -> dict:
    keys = ("gamma0", "dist_ac_s0", "dist_ac_d0", "prc_margin", "drc_margin")
    return {k: math.degrees(getattr(report, k)) for k in keys}


def _need(cfg, *names):
    for name in names:
        if getattr(cfg, name) is None:
            raise DomainError(f"command {cfg.command!r} needs --{name.replace('_', '-')}")


def _load(cfg) -> geometry.Dictionary:
    _need(cfg, "input")
    return geometry.load_dictionary(cfg.input)


def _cmd_gen(cfg):
    if cfg.dims or cfg.counts:
        _need(cfg, "D")
        model = classifier.sample_union_model(cfg.D, cfg.dims, cfg.counts, cfg.seed)
        return geometry.dictionary_to_json(model.dictionary)
    _need(cfg, "D", "d0", "s0")
    params = randomized.RandomModelParams(cfg.D, cfg.d0, cfg.s0, cfg.lam)
    return geometry.dictionary_to_json(randomized.sample_instance(params, cfg.seed))


def _cmd_check(cfg):
    dic = _load(cfg)
    if cfg.sparsity is not None:
        return conditions.coherence_recovery_check(dic, cfg.sparsity,
                                                   vertex_method=cfg.vertex_method)
    if dic.partition is not None:
        rep = conditions.analyze_conditions(dic, vertex_method=cfg.vertex_method,
                                            budget=cfg.budget)
        return {"report": rep, "degrees": _degrees(rep)}
    if dic.groups is not None:
        model = classifier.UnionModel.from_dictionary(dic)
        rep = classifier.check_classification_condition(
            model, vertex_method=cfg.vertex_method, budget=cfg.budget)
        return {"holds": rep.holds, "groups": rep.groups}
    raise DomainError("field 'partition' or 'groups' is required for check")


def _solve(cfg, A, b):
    if cfg.method == "omp":
        return solvers.omp(A, b, eps_res=cfg.eps_res, max_iter=cfg.max_iter)
    if cfg.method == "bp":
        return solvers.bp_primal(A, b, eps_opt=cfg.eps_opt)
    if cfg.method == "l0":
        return solvers.l0_oracle(A, b, k_max=cfg.max_iter)
    raise DomainError(f"field 'method' must be omp, bp or l0, got {cfg.method!r}")


def _cmd_recover(cfg):
    dic = _load(cfg)
    if cfg.b is not None:
        signals = [np.asarray(cfg.b, dtype=float)]
    else:
        if dic.partition is None:
            raise DomainError("random signals need field 'partition' (or pass --b)")
        rng = np.random.default_rng(cfg.seed)
        basis = geometry.subspace_basis(dic.inliers)
        signals = list(conditions.sample_unit_in_span(basis, cfg.samples, rng))
    rows = []
    for i, b in enumerate(signals):
        res = _solve(cfg, dic, b)
        sparse = None
        if dic.partition is not None and res.converged:
            sparse = solvers.is_subspace_sparse(res, dic.J0)
        rows.append({"signal": i, "b": b, "result": res, "subspace_sparse": sparse})
    if cfg.format == "csv":
        header = ["signal", "status", "support", "residual_norm", "objective", "subspace_sparse"]
        table = [[r["signal"], r["result"].status, " ".join(map(str, r["result"].support)),
                  r["result"].residual_norm, r["result"].objective, r["subspace_sparse"]]
                 for r in rows]
        return {"header": header, "rows": table}
    return {"method": cfg.method, "signals": rows}


def _params(cfg):
    _need(cfg, "D", "d0")
    if cfg.s0 is not None:
        return randomized.RandomModelParams(cfg.D, cfg.d0, cfg.s0, cfg.lam)
    _need(cfg, "rho0")
    return randomized.RandomModelParams.from_density(cfg.D, cfg.d0, cfg.rho0, cfg.lam)


def _cmd_mc(cfg):
    _need(cfg, "s0")
    params = _params(cfg)
    return randomized.monte_carlo_drc(params, cfg.trials, cfg.seed,
                                      vertex_method=cfg.vertex_method, budget=cfg.budget,
                                      parallel=cfg.parallel)


def _cmd_bound(cfg):
    if cfg.dims or cfg.counts:
        _need(cfg, "D")
        value = classifier.classification_probability_bound(cfg.D, cfg.dims, cfg.counts)
        return {"kind": "classification", "D": cfg.D, "dims": cfg.dims,
                "counts": cfg.counts, "bound": value}
    params = _params(cfg)
    value = randomized.drc_probability_bound(params)
    return {"kind": "drc", "D": params.D, "d0": params.d0, "rho0": params.rho0,
            "lambda": params.lam, "bound": value}


def _cmd_src(cfg):
    if cfg.input is not None:
        model = classifier.UnionModel.from_dictionary(_load(cfg))
    else:
        _need(cfg, "D")
        if not cfg.dims or len(cfg.dims) != len(cfg.counts):
            raise DomainError("src needs --dims and --counts of equal length")
        model = classifier.sample_union_model(cfg.D, cfg.dims, cfg.counts, cfg.seed)
    methods = ("bp", "omp") if cfg.method == "both" else (cfg.method,)
    exp = classifier.run_classification_experiment(model, cfg.queries, cfg.seed, methods)
    if cfg.format == "csv":
        return exp
    cond = classifier.check_classification_condition(model, vertex_method=cfg.vertex_method,
                                                     budget=cfg.budget)
    try:
        bound = classifier.classification_probability_bound(model.dictionary.D, model.dims,
                                                            model.counts)
    except DomainError:
        bound = None
    return {"accuracy": exp.accuracy, "correct": exp.correct, "total": exp.total,
            "all_correct_single_group": exp.all_correct_single_group,
            "condition_holds": cond.holds, "condition": cond.groups,
            "probability_bound": bound, "records": exp.records}


HANDLERS = {"gen": _cmd_gen, "check": _cmd_check, "recover": _cmd_recover,
            "mc": _cmd_mc, "bound": _cmd_bound, "src": _cmd_src}


def run(cfg: ExperimentConfig) -> int:
    """Execute one command; return the process exit status."""
    try:
        cfg.validate()
        report = HANDLERS[cfg.command](cfg)
        if cfg.command == "gen" and cfg.format != "json":
            raise DomainError("gen writes dictionary JSON only")
        emit_report(report, cfg.format, cfg.output)
    except ResourceError as exc:
        print(f"error: {exc} (cap {exc.cap}, required {exc.required})", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DomainError, SolverError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def _int_list(text):
    return [int(t) for t in text.split(",") if t.strip()]


def _float_list(text):
    return [float(t) for t in text.split(",") if t.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="subsparse", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", "-o")
    common.add_argument("--format", default="json", choices=["json", "csv"])
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--vertex-method", default="auto", choices=["auto", "enumerate", "hull"])
    common.add_argument("--budget", type=int, default=geometry.VERTEX_BUDGET)

    model = argparse.ArgumentParser(add_help=False)
    model.add_argument("--D", type=int)
    model.add_argument("--d0", type=int)
    model.add_argument("--s0", type=int)
    model.add_argument("--rho0", type=float)
    model.add_argument("--lambda", dest="lam", type=float, default=1.0)
    model.add_argument("--dims", type=_int_list, default=[])
    model.add_argument("--counts", type=_int_list, default=[])

    sub.add_parser("gen", parents=[common, model], help="sample a dictionary")
    p = sub.add_parser("check", parents=[common], help="recovery certificates")
    p.add_argument("--input", "-i")
    p.add_argument("--sparsity", type=int, help="run the coherence check for this s0")
    p = sub.add_parser("recover", parents=[common], help="run a solver")
    p.add_argument("--input", "-i")
    p.add_argument("--method", default="bp", choices=["bp", "omp", "l0"])
    p.add_argument("--b", type=_float_list)
    p.add_argument("--samples", type=int, default=10)
    p.add_argument("--eps-res", type=float, default=solvers.EPS_RES)
    p.add_argument("--eps-opt", type=float, default=1e-8)
    p.add_argument("--max-iter", type=int)
    p = sub.add_parser("mc", parents=[common, model], help="Monte Carlo of the dual condition")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--parallel", action="store_true")
    sub.add_parser("bound", parents=[common, model], help="evaluate a probability bound")
    p = sub.add_parser("src", parents=[common, model], help="classification experiment")
    p.add_argument("--input", "-i")
    p.add_argument("--method", default="both", choices=["bp", "omp", "both"])
    p.add_argument("--queries", type=int, default=50)
    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    known = {f for f in ExperimentConfig.__dataclass_fields__}
    return ExperimentConfig(**{k: v for k, v in vars(args).items() if k in known})


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return run(config_from_args(args))


if __name__ == "__main__":
    sys.exit(main())
