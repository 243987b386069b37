"""Command-line front end.

Exit codes: 0 success, 1 invalid input, 2 numerical failure, 3 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field, replace
from typing import Optional

from . import verify as vf
from .bounds import asymptotic_remote_floor, bound_corrupted, bound_remote, phi
from .errors import NumericalFailure, SamplingError
from .estimator import distortion
from .harmonics import assemble, dump_matrices
from .model import ModelConfig, SamplingPlan
from .strategies import allocate_high_rate, allocate_low_rate, grid_plan, random_plan, uniform_plan

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC, EXIT_VERIFY = 0, 1, 2, 3


class UsageError(SamplingError, ValueError):
    pass


@dataclass
class ExperimentSpec:
    config: ModelConfig
    plan_source: object = "uniform"  # "uniform" | "grid" | {"random": seed} | {"explicit": times}
    sweep: Optional[dict] = None
    outputs: list = field(default_factory=list)

    def __post_init__(self):
        if self.sweep is not None:
            if self.sweep.get("variable", "m_common") != "m_common":
                raise UsageError("only the 'm_common' sweep variable is supported")
            if len(set(self.config.m)) > 1:
                raise UsageError("a sweep needs every signal to share a common m")

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentSpec":
        if "config" not in d:
            return cls(config=ModelConfig.from_dict(d))
        return cls(
            config=ModelConfig.from_dict(d["config"]),
            plan_source=d.get("plan_source", "uniform"),
            sweep=d.get("sweep"),
            outputs=list(d.get("outputs", [])),
        )


def _int_list(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v.strip()]


def _float_list(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _load_spec(args) -> ExperimentSpec:
    if args.config:
        with open(args.config) as fh:
            spec = ExperimentSpec.from_dict(json.load(fh))
        base = spec.config.to_dict()
    else:
        spec = None
        base = {"T": 1.0, "N1": 5, "N2": 19, "k": 3, "eta": 0.1, "sigma2": None, "m": None}
    for key in ("T", "N1", "N2", "k", "eta"):
        v = getattr(args, key, None)
        if v is not None:
            base[key] = v
    k = base["k"]
    if args.sigma2 is not None:
        base["sigma2"] = args.sigma2
    if args.m is not None:
        base["m"] = args.m
    # a single value is shared by all k signals
    for key, default in (("sigma2", 1.0), ("m", 0)):
        v = base[key]
        if v is None:
            base[key] = [default] * k
        elif len(v) == 1 and k > 1:
            base[key] = list(v) * k
    cfg = ModelConfig.from_dict(base)
    if spec is None:
        return ExperimentSpec(config=cfg)
    return replace(spec, config=cfg)


def _plan(args, spec: ExperimentSpec, cfg: ModelConfig) -> SamplingPlan:
    source = args.plan or spec.plan_source
    if args.plan == "explicit" or (args.times and not args.plan):
        if not args.times:
            raise UsageError("--plan explicit needs --times <path>")
        with open(args.times) as fh:
            return SamplingPlan.from_dict(json.load(fh))
    if isinstance(source, dict):
        if "explicit" in source:
            return SamplingPlan(times=source["explicit"])
        if "random" in source:
            seed = args.seed if args.seed is not None else source["random"]
            if seed is None:
                raise UsageError("random plans need an explicit seed")
            return random_plan(cfg, seed)
        raise UsageError(f"unknown plan source {source!r}")
    if source == "uniform":
        return uniform_plan(cfg)
    if source == "grid":
        return grid_plan(cfg)
    if source == "random":
        if args.seed is None:
            raise UsageError("--plan random requires --seed")
        return random_plan(cfg, args.seed)
    raise UsageError(f"unknown plan kind {source!r}")


def _fmt(v) -> str:
    if isinstance(v, float):
        return format(v, ".17g")
    if v is None:
        return ""
    return str(v)


def _csv_text(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _emit(args, spec: ExperimentSpec, payload, header=None, rows=None) -> None:
    targets = []
    if args.out:
        targets.append((args.format, args.out))
    elif spec.outputs and args.command == "sweep":
        targets.extend((o.get("format", "csv"), o["path"]) for o in spec.outputs)
    else:
        targets.append((args.format, None))
    for fmt, path in targets:
        if fmt == "csv":
            if header is None:
                header, rows = list(payload), [list(payload.values())]
            text = _csv_text(header, rows)
        else:
            text = json.dumps(payload, indent=2) + "\n"
        if path:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)


def cmd_distortion(args) -> int:
    spec = _load_spec(args)
    cfg = spec.config
    plan = _plan(args, spec, cfg)
    if args.dump_matrices:
        dump_matrices(assemble(cfg, plan), args.dump_matrices)
    _emit(args, spec, distortion(cfg, plan).to_dict())
    return EXIT_OK


def cmd_bounds(args) -> int:
    spec = _load_spec(args)
    cfg = spec.config
    f = phi(cfg)
    payload = {
        "remote": bound_remote(cfg).to_dict(),
        "corrupted": bound_corrupted(cfg).to_dict(),
        "phi": list(f.phi),
        "Phi1": f.Phi1,
        "PhiMinus1": f.PhiMinus1,
        "PhiMinus2": f.PhiMinus2,
        "asymptotic_remote_floor": asymptotic_remote_floor(cfg),
    }
    if args.format == "csv":
        header = ["target", "low_branch", "high_branch", "bound", "tight_low", "tight_high"]
        rows = [[b["target"], b["low_branch"], b["high_branch"], b["bound"], b["tight_low"], b["tight_high"]]
                for b in (payload["remote"], payload["corrupted"])]
        _emit(args, spec, payload, header, rows)
    else:
        _emit(args, spec, payload)
    return EXIT_OK


SWEEP_COLUMNS = ["m", "bound_remote", "Da_uniform", "bound_corrupted", "Db_uniform"]


def sweep_rows(cfg: ModelConfig, start: int, stop: int, step: int = 1) -> list[list]:
    """One row per common sample count ``m`` in ``start..stop`` (inclusive)."""
    rows = []
    for m in range(start, stop + 1, step):
        c = cfg.with_m([m] * cfg.k)
        rep = distortion(c, uniform_plan(c))
        rows.append([m, bound_remote(c).bound, rep.Da, bound_corrupted(c).bound, rep.Db])
    return rows


def cmd_sweep(args) -> int:
    spec = _load_spec(args)
    sw = dict(spec.sweep or {})
    start = args.start if args.start is not None else int(sw.get("from", 0))
    stop = args.stop if args.stop is not None else int(sw.get("to", 60))
    step = args.step if args.step is not None else int(sw.get("step", 1))
    if step < 1 or start < 0 or stop < start:
        raise UsageError("sweep needs 0 <= from <= to and step >= 1")
    rows = sweep_rows(spec.config, start, stop, step)
    payload = [dict(zip(SWEEP_COLUMNS, r)) for r in rows]
    if args.format is None:
        args.format = "csv"
    _emit(args, spec, payload, SWEEP_COLUMNS, rows)
    return EXIT_OK


def cmd_allocate(args) -> int:
    spec = _load_spec(args)
    cfg = spec.config
    if args.regime == "low":
        res = allocate_low_rate(cfg, args.budget, args.target)
    else:
        res = allocate_high_rate(cfg, args.budget, args.target, cap=args.cap, keep_rows=bool(args.rows))
        if args.rows:
            with open(args.rows, "w", newline="") as fh:
                fh.write(_csv_text([f"m{i + 1}" for i in range(cfg.k)] + ["objective"],
                                   [list(a) + [v] for a, v in res.enumerated]))
    _emit(args, spec, res.to_dict())
    return EXIT_OK


def cmd_simulate(args) -> int:
    spec = _load_spec(args)
    if args.seed is None:
        raise UsageError("simulate requires --seed")
    cfg = spec.config
    rep = vf.monte_carlo(cfg, _plan(args, spec, cfg), args.trials, args.seed)
    _emit(args, spec, rep.to_dict())
    return EXIT_OK if rep.within_3se else EXIT_VERIFY


def cmd_verify(args) -> int:
    if args.seed is None and args.replay is None:
        raise UsageError("verify requires --seed")
    if args.replay is not None:
        if not args.name:
            raise UsageError("--replay needs --name <suite>")
        rows = vf.replay(args.name, args.replay)
        sys.stdout.write(json.dumps({"suite": args.name, "instance_seed": args.replay, "rows": rows},
                                    indent=2) + "\n")
        return EXIT_OK if all(r["violation"] <= vf.TOLERANCE for r in rows) else EXIT_VERIFY

    reports, ok = {}, True
    if args.suite in ("inequalities", "all"):
        names = [args.name] if args.name else list(vf.SUITES)
        for name in names:
            if name not in vf.SUITES:
                raise UsageError(f"unknown suite {name!r}")
            r = vf.run_trials(name, vf.SUITES[name], args.seed, args.trials)
            reports[name] = r.to_dict()
            ok &= r.passed
    if args.suite in ("montecarlo", "all"):
        spec = _load_spec(args)
        cfg = spec.config
        if cfg.total_samples == 0:
            cfg = cfg.with_m([2 * cfg.N2 + 2] * cfg.k)
        plan = _plan(args, spec, cfg) if args.plan else uniform_plan(cfg)
        r = vf.monte_carlo(cfg, plan, args.mc_trials, args.seed)
        reports["monte_carlo"] = r.to_dict()
        ok &= r.within_3se
    payload = {"seed": args.seed, "passed": ok, "reports": reports}
    sys.stdout.write(json.dumps(payload, indent=2) + "\n")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(json.dumps(payload, indent=2) + "\n")
    return EXIT_OK if ok else EXIT_VERIFY


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON model config or experiment spec")
    p.add_argument("--plan", choices=["uniform", "grid", "random", "explicit"])
    p.add_argument("--times", help="JSON sampling plan {times: [[...], ...]} for --plan explicit")
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.add_argument("--format", choices=["csv", "json"], default=None)
    p.add_argument("--T", type=float)
    p.add_argument("--N1", type=int)
    p.add_argument("--N2", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--eta", type=float)
    p.add_argument("--sigma2", type=_float_list, help="comma list, or one value for all signals")
    p.add_argument("--m", type=_int_list, help="comma list, or one value for all signals")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="indirect-sampling",
                                     description="Distortion, bounds and sampling strategies for remote-signal retrieval.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("distortion", help="exact LMMSE distortions for one plan")
    _common(p)
    p.add_argument("--dump-matrices", metavar="DIR", help="write every system matrix as CSV")
    p.set_defaults(func=cmd_distortion)

    p = sub.add_parser("bounds", help="lower bounds on both distortions")
    _common(p)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("sweep", help="bounds vs uniform sampling over a common m")
    _common(p)
    p.add_argument("--from", dest="start", type=int)
    p.add_argument("--to", dest="stop", type=int)
    p.add_argument("--step", type=int)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("allocate", help="split a sample budget across signals")
    _common(p)
    p.add_argument("--target", choices=["remote", "corrupted"], required=True)
    p.add_argument("--budget", type=int, required=True)
    p.add_argument("--regime", choices=["low", "high"], required=True)
    p.add_argument("--cap", type=int, default=2_000_000, help="max allocations to enumerate")
    p.add_argument("--rows", metavar="CSV", help="write every enumerated allocation")
    p.set_defaults(func=cmd_allocate)

    p = sub.add_parser("simulate", help="Monte Carlo check of the analytic distortions")
    _common(p)
    p.add_argument("--trials", type=int, default=20000)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="randomized inequality suites and Monte Carlo")
    _common(p)
    p.add_argument("--suite", choices=["inequalities", "montecarlo", "all"], default="inequalities")
    p.add_argument("--name", help="restrict to / replay one inequality suite")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--mc-trials", type=int, default=20000)
    p.add_argument("--replay", type=int, metavar="SEED", help="rerun one instance from its sub-seed")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.format is None and args.command != "sweep":
        args.format = "json"
    try:
        return args.func(args)
    except NumericalFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (SamplingError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
