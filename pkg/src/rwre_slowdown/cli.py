"""Command-line front end.

Config-file-first: a TOML file names the laws and experiment parameters,
and a handful of flags (--seed, --out, ...) override it.  All outputs are
byte-identical across reruns of the same invocation; wall-clock metadata
lives only in the run_meta.json sidecar.

Exit codes: 0 success, 2 config error, 3 numeric/domain error,
4 acceptance-check failure in ``validate``.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from pathlib import Path

try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib

from . import __version__
from ._bits import derive_key
from ._kernels import BACKEND
from .asym import M_MODES, rate_eval
from .environment import Environment, OmegaLaw, solomon_speed
from .errors import ConfigError, DomainError, NumericError, ToolkitError
from .exact import make_query, slowdown_lower_bound, slowdown_upper_bound, uniformization_slowdown
from .experiments import (
    ANNEALED_COLUMNS,
    QUENCHED_COLUMNS,
    TAIL_COLUMNS,
    ExperimentConfig,
    TailExperimentConfig,
    config_hash,
    fit_tail_records,
    oracle_window,
    run_annealed_experiment,
    run_quenched_experiment,
    run_tail_lemma_experiment,
    write_csv,
    write_jsonl,
)
from .laws import TailLaw
from .sim import estimate_slowdown, estimate_speed

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_VALIDATE = 4

SUBCOMMANDS = (
    "sample-env", "speed", "slowdown-quenched", "slowdown-annealed",
    "asymptotics", "tail-check", "validate",
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rwre-slowdown",
        description="Slowdown probabilities for biased random walks in random "
        "environment with random holding times.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", type=Path, default=None, help="TOML configuration file")
        p.add_argument("--seed", type=int, default=None, help="master seed override (u64)")
        p.add_argument("--out", type=Path, default=Path("."), help="output directory")
        p.add_argument("--jobs", type=int, default=1, help="worker parallelism bound")
        p.add_argument(
            "--format", choices=("csv", "jsonl", "both"), default="both",
            help="output file format(s)",
        )
        p.add_argument("-v", "--verbose", action="count", default=0, help="more progress chatter")

    p = sub.add_parser("sample-env", help="realize an environment window to CSV")
    common(p)
    p.add_argument("--lo", type=int, default=None, help="left edge of the window")
    p.add_argument("--hi", type=int, default=None, help="right edge of the window")

    p = sub.add_parser("speed", help="Monte Carlo estimate of the linear speed")
    common(p)
    p.add_argument("--t", type=float, default=None, help="horizon (>= 100)")
    p.add_argument("--replicas", type=int, default=None, help="number of replicas")
    p.add_argument("--annealed", action="store_true", help="fresh environment per replica")

    p = sub.add_parser("slowdown-quenched", help="quenched slowdown bracket sweep")
    common(p)

    p = sub.add_parser("slowdown-annealed", help="annealed sweep with planted estimator")
    common(p)

    p = sub.add_parser("asymptotics", help="rate table: h(t), M(t) menu, exponents")
    common(p)
    p.add_argument("--t-grid", type=float, nargs="+", default=None, help="time grid")

    p = sub.add_parser("tail-check", help="weighted heavy-tail sum experiment")
    common(p)

    p = sub.add_parser("validate", help="run the bundled sandwich fixture")
    common(p)
    return parser


# ---------------------------------------------------------------------------
# config handling
# ---------------------------------------------------------------------------

def load_config(path: Path | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed TOML in {path}: {exc}") from exc


def laws_from_config(cfg: dict) -> tuple[OmegaLaw, TailLaw]:
    try:
        omega = OmegaLaw.from_json(cfg.get("omega_law", {"variant": "uniform", "a": 0.6, "b": 0.8}))
        tail = TailLaw.from_json(cfg.get("tail_law", {"variant": "weibull", "params": {"alpha": 1.0}}))
    except (KeyError, TypeError, DomainError) as exc:
        raise ConfigError(f"bad law configuration: {exc}") from exc
    if "tail_law" in cfg and "scale_m" not in cfg["tail_law"]:
        from .laws import make_mean_one

        tail = make_mean_one(tail.variant, alpha=tail.alpha, beta=tail.beta)
    return omega, tail


def _seed(cfg: dict, args) -> int:
    if args.seed is not None:
        return args.seed
    return int(cfg.get("seed", 20260823))


def experiment_config(cfg: dict, args) -> ExperimentConfig:
    omega, tail = laws_from_config(cfg)
    exp = cfg.get("experiment", {})
    try:
        return ExperimentConfig(
            omega_law=omega,
            tail_law=tail,
            v_frac=float(exp.get("v_frac", 0.5)),
            t_grid=tuple(exp.get("t_grid", [10, 20, 30])),
            master_seed=_seed(cfg, args),
            n_envs=int(exp.get("n_envs", 5)),
            mc_replicas=int(exp.get("mc_replicas", 2000)),
            with_mc=bool(exp.get("with_mc", True)),
            with_oracle=bool(exp.get("with_oracle", True)),
            oracle_tol=float(exp.get("oracle_tol", 1e-8)),
            oracle_t_max=float(exp.get("oracle_t_max", 40.0)),
            mc_t_max=float(exp.get("mc_t_max", 200.0)),
            exponent_eps=float(exp.get("exponent_eps", 0.1)),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad experiment configuration: {exc}") from exc


def write_meta(outdir: Path, command: str, seed: int, chash: str | None) -> None:
    meta = {
        "command": command,
        "seed": seed,
        "config_hash": chash,
        "toolkit_version": __version__,
        "backend": BACKEND,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
    }
    with open(outdir / "run_meta.json", "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _emit(records, outdir: Path, stem: str, columns, fmt: str) -> None:
    # wall-clock timings vary between runs; keep emitted files byte-identical
    records = [{k: v for k, v in rec.items() if k != "wall_seconds"} for rec in records]
    columns = [c for c in columns if c != "wall_seconds"]
    if fmt in ("jsonl", "both"):
        write_jsonl(records, outdir / f"{stem}.jsonl")
    if fmt in ("csv", "both"):
        write_csv(records, outdir / f"{stem}.csv", columns)


# ---------------------------------------------------------------------------
# subcommand implementations
# ---------------------------------------------------------------------------

def cmd_sample_env(args) -> int:
    cfg = load_config(args.config)
    omega, tail = laws_from_config(cfg)
    section = cfg.get("sample_env", {})
    lo = args.lo if args.lo is not None else int(section.get("lo", -50))
    hi = args.hi if args.hi is not None else int(section.get("hi", 50))
    if lo > hi:
        raise ConfigError("sample-env needs lo <= hi")
    seed = _seed(cfg, args)
    env = Environment(omega, tail, seed)
    args.out.mkdir(parents=True, exist_ok=True)
    env.write_window_csv(args.out / "env_window.csv", lo, hi)
    write_meta(args.out, "sample-env", seed, None)
    return EXIT_OK


def cmd_speed(args) -> int:
    cfg = load_config(args.config)
    omega, tail = laws_from_config(cfg)
    section = cfg.get("speed", {})
    t = args.t if args.t is not None else float(section.get("t", 1000.0))
    replicas = args.replicas if args.replicas is not None else int(section.get("replicas", 200))
    annealed = args.annealed or bool(section.get("annealed", False))
    seed = _seed(cfg, args)
    if annealed:
        est = estimate_speed((omega, tail), t, replicas, seed, annealed=True)
    else:
        est = estimate_speed(Environment(omega, tail, seed), t, replicas, seed)
    args.out.mkdir(parents=True, exist_ok=True)
    with open(args.out / "speed.csv", "w", newline="") as fh:
        fh.write("# schema v1 columns: t,mode,estimate,ci_lo,ci_hi,replicas,seed,solomon_speed\n")
        writer = csv.writer(fh)
        writer.writerow(["t", "mode", "estimate", "ci_lo", "ci_hi", "replicas", "seed", "solomon_speed"])
        writer.writerow([
            t, "annealed" if annealed else "quenched", est.estimate, est.ci_lo,
            est.ci_hi, replicas, seed, solomon_speed(omega),
        ])
    write_meta(args.out, "speed", seed, None)
    return EXIT_OK


def cmd_slowdown_quenched(args) -> int:
    cfg = load_config(args.config)
    ecfg = experiment_config(cfg, args)
    records = run_quenched_experiment(ecfg, jobs=max(1, args.jobs))
    args.out.mkdir(parents=True, exist_ok=True)
    _emit(records, args.out, "quenched", QUENCHED_COLUMNS, args.format)
    write_meta(args.out, "slowdown-quenched", ecfg.master_seed, config_hash(ecfg.to_json()))
    return EXIT_OK


def cmd_slowdown_annealed(args) -> int:
    cfg = load_config(args.config)
    ecfg = experiment_config(cfg, args)
    records = run_annealed_experiment(ecfg)
    args.out.mkdir(parents=True, exist_ok=True)
    _emit(records, args.out, "annealed", ANNEALED_COLUMNS, args.format)
    write_meta(args.out, "slowdown-annealed", ecfg.master_seed, config_hash(ecfg.to_json()))
    return EXIT_OK


def cmd_asymptotics(args) -> int:
    cfg = load_config(args.config)
    _, tail = laws_from_config(cfg)
    section = cfg.get("asymptotics", {})
    t_grid = args.t_grid if args.t_grid is not None else section.get("t_grid", [1e4, 1e6, 1e8])
    eps = float(section.get("eps", 0.1))
    args.out.mkdir(parents=True, exist_ok=True)
    columns = ["t", "law", "h"] + [f"m_{m}" for m in M_MODES] + [
        "exp_quenched_upper_scale", "exp_quenched_lower_scale", "exp_annealed",
    ]
    with open(args.out / "rates.csv", "w", newline="") as fh:
        fh.write("# schema v1 columns: %s\n" % ",".join(columns))
        writer = csv.writer(fh)
        writer.writerow(columns)
        law_str = json.dumps(tail.to_json(), sort_keys=True)
        for t in t_grid:
            ev = rate_eval(tail, float(t), eps=eps)
            row = [float(t), law_str, ev.h]
            row += ["" if ev.m_values[m] is None else ev.m_values[m] for m in M_MODES]
            row += [
                ev.exponent_quenched_upper_scale,
                ev.exponent_quenched_lower_scale,
                ev.exponent_annealed,
            ]
            writer.writerow(row)
    write_meta(args.out, "asymptotics", _seed(cfg, args), None)
    return EXIT_OK


def cmd_tail_check(args) -> int:
    cfg = load_config(args.config)
    _, tail = laws_from_config(cfg)
    section = cfg.get("tail_check", {})
    try:
        tcfg = TailExperimentConfig(
            weight=float(section.get("weight", 1.0)),
            kappa=float(section.get("kappa", 1.0)),
            delta=float(section.get("delta", 0.5)),
            n_grid=tuple(section.get("n_grid", [25, 50, 100, 200])),
            replicas=int(section.get("replicas", 200_000)),
            master_seed=_seed(cfg, args),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad tail_check configuration: {exc}") from exc
    records = run_tail_lemma_experiment(tcfg, tail)
    args.out.mkdir(parents=True, exist_ok=True)
    _emit(records, args.out, "tail", TAIL_COLUMNS, args.format)
    with open(args.out / "tail_fit.json", "w") as fh:
        json.dump(fit_tail_records(records, tail), fh, indent=2, sort_keys=True)
        fh.write("\n")
    write_meta(args.out, "tail-check", tcfg.master_seed, config_hash(tcfg.to_json()))
    return EXIT_OK


def cmd_validate(args) -> int:
    """Sandwich suite on a bundled tiny fixture (seeded envs, t = 20)."""
    cfg = load_config(args.config)
    seed = _seed(cfg, args)
    omega = OmegaLaw(variant="uniform", a=0.6, b=0.8)
    from .laws import make_mean_one

    laws = [
        make_mean_one("weibull", alpha=1.0),
        make_mean_one("pareto", alpha=2.0),
        make_mean_one("log_pow", beta=2.0),
    ]
    t = 20.0
    failures = []
    for li, tail in enumerate(laws):
        for si in range(2):
            env_seed = int(derive_key(seed, 100 * li + si))
            env = Environment(omega, tail, env_seed)
            v = 0.5 * solomon_speed(omega)
            sq = make_query(omega, t, v)
            lower = slowdown_lower_bound(env, t, v)
            upper = slowdown_upper_bound(env, sq)
            oracle = uniformization_slowdown(env, t, int(math.ceil(v * t)), oracle_window(t), 1e-8)
            est = estimate_slowdown(env, t, v, 2000, derive_key(seed, 777 + li))
            tag = f"law={tail.variant} env_seed={env_seed}"
            if not (lower <= oracle + 1e-8):
                failures.append(f"{tag}: lower {lower} > oracle {oracle}")
            if not (oracle <= upper + 1e-8):
                failures.append(f"{tag}: oracle {oracle} > upper {upper}")
            sigma = math.sqrt(max(oracle * (1.0 - oracle), 1e-12) / est.replicas)
            if abs(est.estimate - oracle) > 3.0 * sigma + 1e-9:
                failures.append(f"{tag}: MC {est.estimate} vs oracle {oracle} beyond 3 sigma")
            if args.verbose:
                print(f"ok {tag}: {lower:.3e} <= {oracle:.3e} <= {upper:.3e}")
    if failures:
        for f in failures:
            print(f"FAIL {f}", file=sys.stderr)
        return EXIT_VALIDATE
    print(f"validate: all sandwich checks passed ({len(laws) * 2} instances)")
    return EXIT_OK


_COMMANDS = {
    "sample-env": cmd_sample_env,
    "speed": cmd_speed,
    "slowdown-quenched": cmd_slowdown_quenched,
    "slowdown-annealed": cmd_slowdown_annealed,
    "asymptotics": cmd_asymptotics,
    "tail-check": cmd_tail_check,
    "validate": cmd_validate,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        json.dump({"error": "config", "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return EXIT_CONFIG
    except (DomainError, NumericError) as exc:
        json.dump({"error": type(exc).__name__, "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return EXIT_NUMERIC
    except ToolkitError as exc:  # pragma: no cover
        json.dump({"error": "toolkit", "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
