"""Command-line driver: ``qpdite {gamma-sweep,ite-energy,tpq,oracle}``."""

from __future__ import annotations

import argparse
import csv
import datetime
import json
import logging
import sys
from pathlib import Path

from . import __version__, experiments
from .qpd import InfeasibleError
from .tpq import TPQExperimentConfig, TPQ_DEFAULT_SAMPLES, tpq_experiment

log = logging.getLogger("qpdite")

DEFAULTS = {
    "common": {"seed": 0, "workers": 1, "out": "results", "format": "csv"},
    "gamma-sweep": {"hamiltonian": "heis2q-shifted", "betas": "0:1:0.05"},
    "ite-energy": {
        "steps": 4, "beta_step": 0.01, "schedule": "400,800,3200,25600", "shots": 512, "reps": 10,
        "basis": "ebl-product", "hamiltonian": "heis2q-shifted", "observable": "heis2q", "initial": "00",
    },
    "tpq": {
        "n": "4,5,6", "ite_exponent": 0.02, "states": 10, "paulis": 30, "mode": "both", "samples": None,
        "shots": 0, "trotter_r": 1, "basis": "ebl-product", "periodic": False,
    },
    "oracle": {
        "experiment": "ite-energy", "steps": 2, "beta_step": 0.01, "N": None, "shots": 512,
        "basis": "ebl-product", "n": 4, "r": 2, "eps": 0.5, "delta": 0.1,
    },
}


class ConfigError(ValueError):
    pass


def _parser() -> argparse.ArgumentParser:
    S = argparse.SUPPRESS
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=S, help="base RNG seed (default 0)")
    common.add_argument("--workers", type=int, default=S, help="worker processes (default 1)")
    common.add_argument("--out", default=S, help="output directory (default ./results)")
    common.add_argument("--config", default=S, help="JSON config file; flags override its values")
    common.add_argument("--format", choices=["csv", "json"], default=S, help="also emit JSON when 'json'")

    p = argparse.ArgumentParser(prog="qpdite", description=__doc__)
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gamma-sweep", parents=[common], help="QPD cost versus beta for EBL and Takagi bases")
    g.add_argument("--hamiltonian", default=S)
    g.add_argument("--betas", default=S, help="start:stop:step (inclusive) or comma list")

    e = sub.add_parser("ite-energy", parents=[common], help="2-qubit energy under repeated ITE steps")
    e.add_argument("--steps", type=int, default=S)
    e.add_argument("--beta-step", type=float, default=S)
    e.add_argument("--schedule", default=S, help="QPD samples per step count, comma separated")
    e.add_argument("--shots", type=int, default=S)
    e.add_argument("--reps", type=int, default=S)
    e.add_argument("--basis", default=S, help="ebl-product, takagi or noisy:<p>")
    e.add_argument("--hamiltonian", default=S)
    e.add_argument("--observable", default=S)
    e.add_argument("--initial", default=S, help="computational basis bitstring")

    t = sub.add_parser("tpq", parents=[common], help="thermal pure quantum state errors")
    t.add_argument("--n", default=S, help="qubit counts, comma separated")
    t.add_argument("--ite-exponent", type=float, default=S, help="b in e^{-b H} applied to the state")
    t.add_argument("--states", type=int, default=S)
    t.add_argument("--paulis", type=int, default=S)
    t.add_argument("--mode", choices=["exact", "simulated", "both"], default=S)
    t.add_argument("--samples", default=S, help="QPD samples per n, comma separated (default: 1024, 9400, 51200, 409600, 1638400 for n = 4..8)")
    t.add_argument("--shots", type=int, default=S, help="0 measures observables exactly")
    t.add_argument("--trotter-r", type=int, default=S)
    t.add_argument("--basis", default=S)
    t.add_argument("--periodic", action="store_true", default=S)

    o = sub.add_parser("oracle", parents=[common], help="sampled estimate against the dense value")
    o.add_argument("--experiment", choices=["ite-energy", "chain"], default=S)
    o.add_argument("--steps", type=int, default=S)
    o.add_argument("--beta-step", type=float, default=S)
    o.add_argument("--N", type=int, default=S, help="samples (default: Hoeffding budget for --eps/--delta)")
    o.add_argument("--shots", type=int, default=S)
    o.add_argument("--basis", default=S)
    o.add_argument("--n", type=int, default=S, help="chain length for --experiment chain")
    o.add_argument("--r", type=int, default=S, help="Trotter number for --experiment chain")
    o.add_argument("--eps", type=float, default=S)
    o.add_argument("--delta", type=float, default=S)
    return p


def resolve_config(args: argparse.Namespace) -> dict:
    cmd = args.command
    cfg = dict(DEFAULTS["common"])
    cfg.update(DEFAULTS[cmd])
    given = {k: v for k, v in vars(args).items() if k not in ("command", "verbose")}
    path = given.pop("config", None)
    if path is not None:
        p = Path(path)
        if not p.exists():
            raise ConfigError(f"config file {path} does not exist")
        doc = json.loads(p.read_text())
        doc = {k.replace("-", "_"): v for k, v in doc.items() if k != "command"}
        unknown = set(doc) - set(cfg)
        if unknown:
            raise ConfigError(f"unknown config keys for {cmd}: {sorted(unknown)}")
        cfg.update(doc)
    cfg.update(given)
    if cfg["workers"] < 1:
        raise ConfigError("--workers must be at least 1")
    if cfg["seed"] < 0:
        raise ConfigError("--seed must be non-negative")
    return cfg


def _ints(spec) -> list[int]:
    if isinstance(spec, (list, tuple)):
        return [int(x) for x in spec]
    if isinstance(spec, int):
        return [spec]
    return [int(x) for x in str(spec).split(",") if x.strip()]


def write_csv(path: Path, rows: list[dict], columns: list[str]) -> None:
    with path.open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=columns, lineterminator="\n", extrasaction="ignore")
        w.writeheader()
        for r in rows:
            w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in r.items()})


PLOTS = {
    "gamma-sweep": """set datafile separator ','
set key autotitle columnhead left top
set xlabel 'beta'
set ylabel 'gamma'
plot '{csv}' using 1:2 with linespoints title 'EBL', \\
     '' using 1:3 with linespoints title 'Takagi', \\
     '' using 1:4 with lines title 'diamond-norm lower bound'
""",
    "ite-energy": """set datafile separator ','
set key autotitle columnhead
set xlabel 'Trotter step'
set ylabel 'energy'
plot '{csv}' using 1:4 with points pt 7 title 'exact', \\
     '' using 1:5:6 with yerrorbars title 'simulated (mean +- std)'
""",
    "tpq": """set datafile separator ','
set key autotitle columnhead
set logscale y
set xlabel 'n'
set ylabel 'mean |<O>_TPQ - <O>_Gibbs|'
plot '< grep exact {csv}' using 1:3:4 with yerrorbars title 'exact ITE', \\
     '< grep simulated {csv}' using 1:3:4 with yerrorbars title 'simulated ITE'
""",
    "oracle": """set datafile separator ','
set key autotitle columnhead
set ylabel 'rescaled expectation'
plot '{csv}' using 0:12 with points pt 7 title 'sampled', \\
     '' using 0:13 with points pt 5 title 'dense'
""",
}


def _emit(out: Path, name: str, rows: list[dict], columns: list[str], fmt: str) -> Path:
    path = out / f"{name}.csv"
    write_csv(path, rows, columns)
    if fmt == "json":
        (out / f"{name}.json").write_text(json.dumps(rows, indent=1) + "\n")
    return path


def execute(cfg: dict, command: str) -> list[Path]:
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    (out / "error.json").unlink(missing_ok=True)
    fmt = cfg["format"]
    written = []
    if command == "gamma-sweep":
        rows = experiments.gamma_sweep(experiments.parse_grid(str(cfg["betas"])), cfg["hamiltonian"], cfg["workers"])
        plot_csv = _emit(out, "gamma_sweep", rows, experiments.GAMMA_COLUMNS, fmt)
        written.append(plot_csv)
    elif command == "ite-energy":
        runs, summary = experiments.ite_energy(
            steps=cfg["steps"], beta_step=cfg["beta_step"], schedule=_ints(cfg["schedule"]),
            shots=cfg["shots"], reps=cfg["reps"], basis=cfg["basis"], hamiltonian=cfg["hamiltonian"],
            observable=cfg["observable"], initial=cfg["initial"], seed=cfg["seed"], workers=cfg["workers"],
        )
        written.append(_emit(out, "ite_energy", runs, experiments.SAMPLER_COLUMNS, fmt))
        cols = ["step", "beta", "N", "exact", "mean", "std", "combined_se", "gamma_total"]
        plot_csv = _emit(out, "ite_energy_summary", summary, cols, fmt)
        written.append(plot_csv)
    elif command == "tpq":
        ns = _ints(cfg["n"])
        samples = _ints(cfg["samples"]) if cfg["samples"] is not None else [TPQ_DEFAULT_SAMPLES.get(n, 1024) for n in ns]
        if len(samples) != len(ns):
            raise ConfigError("--samples needs one value per qubit count")
        modes = ["exact", "simulated"] if cfg["mode"] == "both" else [cfg["mode"]]
        rows, agg = [], []
        for n, N in zip(ns, samples):
            for mode in modes:
                res = tpq_experiment(TPQExperimentConfig(
                    n=n, ite_exponent=cfg["ite_exponent"], n_states=cfg["states"], n_paulis=cfg["paulis"],
                    mode=mode, N=N, shots=cfg["shots"], trotter_r=cfg["trotter_r"], basis=cfg["basis"],
                    periodic=cfg["periodic"], seed=cfg["seed"], workers=cfg["workers"],
                ))
                rows.extend(res.rows)
                agg.append({"n": n, "mode": mode, "mean_abs_error": res.mean_error, "se": res.se,
                            "N": N if mode == "simulated" else 0, "gibbs_beta": 2 * cfg["ite_exponent"]})
        written.append(_emit(out, "tpq", rows, experiments.TPQ_COLUMNS, fmt))
        plot_csv = _emit(out, "tpq_summary", agg, ["n", "mode", "mean_abs_error", "se", "N", "gibbs_beta"], fmt)
        written.append(plot_csv)
    elif command == "oracle":
        rows = experiments.oracle(
            experiment=cfg["experiment"], steps=cfg["steps"], beta_step=cfg["beta_step"], N=cfg["N"],
            shots=cfg["shots"], basis=cfg["basis"], n=cfg["n"], r=cfg["r"], seed=cfg["seed"],
            workers=cfg["workers"], eps=cfg["eps"], delta=cfg["delta"],
        )
        cols = experiments.SAMPLER_COLUMNS + ["exact", "ratio_se", "z", "within_3se"]
        plot_csv = _emit(out, "oracle", rows, cols, fmt)
        written.append(plot_csv)
    else:
        raise ConfigError(f"unknown command {command!r}")

    script = out / f"{command.replace('-', '_')}.gp"
    script.write_text(PLOTS[command].format(csv=plot_csv.name))
    written.append(script)
    meta = {
        "command": command,
        "config": cfg,
        "version": __version__,
        "created": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "files": [p.name for p in written],
    }
    if command == "ite-energy":
        meta["reference_fifth_step"] = experiments.HARDWARE_FIFTH_STEP
    if command == "tpq":
        meta["gibbs_beta"] = 2 * cfg["ite_exponent"]
    (out / f"{command.replace('-', '_')}.meta.json").write_text(json.dumps(meta, indent=1, default=str) + "\n")
    return written


def _error_record(out: str | None, exc: Exception) -> None:
    rec = {"error": type(exc).__name__, "message": str(exc)}
    print(json.dumps(rec), file=sys.stderr)
    if out:
        try:
            Path(out).mkdir(parents=True, exist_ok=True)
            (Path(out) / "error.json").write_text(json.dumps(rec) + "\n")
        except OSError:
            pass


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    out = getattr(args, "out", DEFAULTS["common"]["out"])
    try:
        cfg = resolve_config(args)
        out = cfg["out"]
        for path in execute(cfg, args.command):
            log.info("wrote %s", path)
    except (ConfigError, InfeasibleError, ValueError, ZeroDivisionError, json.JSONDecodeError) as exc:
        _error_record(out, exc)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
