"""Command-line front end.

Subcommands: ``run``, ``compare``, ``noise-sweep``, ``resources`` and
``dump-circuit``.  Every flag may also come from a ``--config`` file of
``key=value`` lines using the flag names; flags given on the command line win.

Exit codes: 0 success, 2 configuration error, 3 capacity error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .circuit import decompose, resource_report
from .d1q3_binary import D1q3Layout, build_collision, build_initialization, build_mapping, build_propagation
from .hpp import (HppLayout, build_collision_hpp, build_initialization_hpp, build_mapping_hpp,
                  build_propagation_hpp)
from .lga import LatticeState
from .noise import PRESETS, NoiseModel
from .pipeline import (CapacityError, ConfigError, ExperimentConfig, InitialCondition, generate_initial,
                       l1_distance, run_experiment, write_profile_csv)
from .svg import line_chart

EXIT_OK, EXIT_CONFIG, EXIT_CAPACITY = 0, 2, 3
STAGES = ("initialization", "collision", "mapping", "propagation", "step")
REFERENCE_CX = "15(n-6)+149"
PROFILE_BINS = 16  # default block = sites / PROFILE_BINS

# flag defaults, applied after the config file
DEFAULTS = {
    "model": "d1q3-binary", "sites": 64, "steps": 16, "shots": None, "exact": False,
    "noise": "none", "p1": None, "p2": None, "pread": None, "ensemble": 1, "block": None,
    "seed": 0, "region": "0.375,0.625", "p_inside": 0.95, "p_outside": 0.05,
    "out": "out", "dump_circuit": None, "max_trajectories": None, "shared_field": False,
    "initial": None, "workers": 1,
}
COMMAND_DEFAULTS = {
    "compare": {"sites": 512, "steps": 160, "snapshots": None},
    "noise-sweep": {"sites": 32, "block": 4, "steps": 8, "levels": "low,mid,high",
                    "shots": "800,3000,100000", "max_trajectories": 256},
    "resources": {"model": "d1q3-binary", "n_min": 6, "n_max": 11},
    "dump-circuit": {"sites": 16, "stage": "step", "out": None},
}
INT_KEYS = {"sites", "steps", "ensemble", "block", "seed", "max_trajectories", "workers", "n_min", "n_max"}
FLOAT_KEYS = {"p1", "p2", "pread", "p_inside", "p_outside"}
BOOL_KEYS = {"exact", "shared_field", "decompose"}


def _experiment_flags(p: argparse.ArgumentParser, shots_list: bool = False) -> None:
    p.add_argument("--config", help="key=value file with defaults for any flag")
    p.add_argument("--model", choices=["d1q3-binary", "d1q3-super", "hpp"])
    p.add_argument("--sites", help="lattice sites (hpp: N*N)")
    p.add_argument("--steps")
    if shots_list:
        p.add_argument("--shots", help="comma-separated shot counts")
        p.add_argument("--levels", help="comma-separated noise levels")
    else:
        p.add_argument("--shots")
        p.add_argument("--exact", action="store_const", const=True, help="decode the exact distribution")
        p.add_argument("--noise", choices=sorted(PRESETS))
    p.add_argument("--p1")
    p.add_argument("--p2")
    p.add_argument("--pread")
    p.add_argument("--ensemble")
    p.add_argument("--block")
    p.add_argument("--seed")
    p.add_argument("--region", help="start,end fractions of the pulse region")
    p.add_argument("--p-inside", dest="p_inside")
    p.add_argument("--p-outside", dest="p_outside")
    p.add_argument("--initial", help="CSV occupancy field used as the initial condition")
    p.add_argument("--max-trajectories", dest="max_trajectories")
    p.add_argument("--shared-field", dest="shared_field", action="store_const", const=True)
    p.add_argument("--workers")
    p.add_argument("--out")
    p.add_argument("--dump-circuit", dest="dump_circuit", choices=STAGES)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qlga", description="Quantum lattice-gas automata simulator")
    sub = parser.add_subparsers(dest="command", required=True)
    _experiment_flags(sub.add_parser("run", help="run one experiment and write its profiles"))
    cmp_ = sub.add_parser("compare", help="quantum vs classical profiles with SVG overlays")
    _experiment_flags(cmp_)
    cmp_.add_argument("--snapshots", help="comma-separated steps to plot (default: six evenly spaced)")
    _experiment_flags(sub.add_parser("noise-sweep", help="grid of noise levels and shot counts"), shots_list=True)
    res = sub.add_parser("resources", help="gate counts per stage over a range of lattice sizes")
    res.add_argument("--config")
    res.add_argument("--model", choices=["d1q3-binary", "hpp"])
    res.add_argument("--n-min", dest="n_min", help="smallest lattice qubit count (hpp: per axis)")
    res.add_argument("--n-max", dest="n_max")
    res.add_argument("--out")
    dump = sub.add_parser("dump-circuit", help="print a stage circuit in text form")
    dump.add_argument("--config")
    dump.add_argument("--model", choices=["d1q3-binary", "hpp"])
    dump.add_argument("--sites")
    dump.add_argument("--stage", choices=STAGES)
    dump.add_argument("--seed")
    dump.add_argument("--decompose", action="store_const", const=True)
    dump.add_argument("--out", help="file to write (default stdout)")
    return parser


def read_config_file(path) -> dict:
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{n}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.lstrip("-").replace("-", "_")] = value
    return out


def _coerce(key: str, value):
    if value is None or not isinstance(value, str):
        return value
    try:
        if key in INT_KEYS:
            return int(value, 0)
        if key in FLOAT_KEYS:
            return float(value)
        if key in BOOL_KEYS:
            if value.lower() not in ("1", "0", "true", "false", "yes", "no"):
                raise ValueError(value)
            return value.lower() in ("1", "true", "yes")
    except ValueError:
        raise ConfigError(f"bad value for {key}: {value!r}") from None
    return value


def resolve(args: argparse.Namespace) -> dict:
    """Merge defaults, config file and flags (in increasing priority)."""
    merged = {**DEFAULTS, **COMMAND_DEFAULTS.get(args.command, {})}
    if getattr(args, "config", None):
        merged.update(read_config_file(args.config))
    merged.update({k: v for k, v in vars(args).items() if v is not None and k not in ("command", "config")})
    return {k: _coerce(k, v) for k, v in merged.items()}


def _noise(opts: dict, level: str) -> NoiseModel:
    base = PRESETS[level]
    try:
        return NoiseModel(
            base.p1 if opts.get("p1") is None else opts["p1"],
            base.p2 if opts.get("p2") is None else opts["p2"],
            base.p_readout if opts.get("pread") is None else opts["pread"],
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _region(text: str) -> tuple[float, float]:
    try:
        a, b = (float(v) for v in str(text).split(","))
    except ValueError:
        raise ConfigError(f"region must be 'start,end', got {text!r}") from None
    return a, b


def experiment_config(opts: dict) -> ExperimentConfig:
    shots = opts.get("shots")
    if opts.get("exact"):
        shots = None
    elif isinstance(shots, str):
        try:
            shots = int(shots)
        except ValueError:
            raise ConfigError(f"bad value for shots: {shots!r}") from None
    level = opts.get("noise", "none")
    if level not in PRESETS:
        raise ConfigError(f"unknown noise level {level!r}")
    initial = InitialCondition(p_inside=opts["p_inside"], p_outside=opts["p_outside"],
                               region=_region(opts["region"]))
    if opts.get("initial"):
        try:
            field = LatticeState.from_csv(opts["initial"])
        except (OSError, ValueError, IndexError) as exc:
            raise ConfigError(f"cannot read initial field {opts['initial']}: {exc}") from None
        initial = replace(initial, kind="explicit", explicit_field=field)
    block = opts.get("block")
    if block is None:
        block = max(1, opts["sites"] // PROFILE_BINS)
    cfg = ExperimentConfig(
        model=opts["model"], sites=opts["sites"], steps=opts["steps"], shots=shots,
        noise=_noise(opts, level), ensemble=opts["ensemble"], block=block, seed=opts["seed"],
        initial=initial, shared_field=bool(opts.get("shared_field")),
        max_trajectories=opts.get("max_trajectories"), workers=opts.get("workers", 1),
    )
    cfg.validate()
    return cfg


def _out_dir(opts: dict) -> Path:
    out = Path(opts["out"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def stage_circuit(model: str, sites: int, stage: str, seed: int = 0):
    if model == "hpp":
        side = int(round(sites ** 0.5))
        if side * side != sites:
            raise ConfigError(f"hpp needs sites = N*N, got {sites}")
        lay = HppLayout(side)
        builders = {"collision": build_collision_hpp, "mapping": build_mapping_hpp,
                    "propagation": build_propagation_hpp}
        init = build_initialization_hpp
    else:
        lay = D1q3Layout.for_sites(sites)
        builders = {"collision": build_collision, "mapping": build_mapping, "propagation": build_propagation}
        init = build_initialization
    if stage == "initialization":
        field = generate_initial(InitialCondition(), lay.sites, model, seed)
        return init(lay, field)
    if stage == "step":
        circ = builders["collision"](lay) + builders["mapping"](lay) + builders["propagation"](lay)
        circ.measured = lay.measured
        return circ
    return builders[stage](lay)


def _dump(opts: dict, cfg: ExperimentConfig, out: Path) -> None:
    if not opts.get("dump_circuit"):
        return
    if cfg.model == "d1q3-super":
        raise ConfigError("--dump-circuit supports d1q3-binary and hpp")
    circ = stage_circuit(cfg.model, cfg.sites, opts["dump_circuit"], cfg.seed)
    header = f"# config: {json.dumps(cfg.to_dict(), sort_keys=True)}\n# seed: {cfg.seed}\n"
    (out / f"circuit_{opts['dump_circuit']}.txt").write_text(header + circ.to_text())


def cmd_run(opts: dict) -> int:
    cfg = experiment_config(opts)
    out = _out_dir(opts)
    _dump(opts, cfg, out)
    quantum, classical = run_experiment(cfg)
    write_profile_csv(out / "profile.csv", quantum, classical, cfg)
    dist = l1_distance(quantum, classical)
    print(f"wrote {out / 'profile.csv'}; final L1 distance {dist[-1]:g}; "
          f"flagged steps {int(np.count_nonzero(quantum.frozen))}")
    return EXIT_OK


def cmd_compare(opts: dict) -> int:
    cfg = experiment_config(opts)
    try:
        if opts.get("snapshots") is None:
            snaps = sorted({int(round(v)) for v in np.linspace(0, cfg.steps, 6)})
        else:
            snaps = sorted({int(s) for s in str(opts["snapshots"]).split(",") if s.strip()})
    except ValueError:
        raise ConfigError(f"bad snapshot list {opts['snapshots']!r}") from None
    if any(s < 0 or s > cfg.steps for s in snaps):
        raise ConfigError(f"snapshots must lie in 0..{cfg.steps}")
    out = _out_dir(opts)
    _dump(opts, cfg, out)
    quantum, classical = run_experiment(cfg)
    write_profile_csv(out / "profile.csv", quantum, classical, cfg)
    echo = f"config: {json.dumps(cfg.to_dict(), sort_keys=True)} seed: {cfg.seed}"
    for t in snaps:
        line_chart(
            out / f"profile_t{t}.svg",
            [("quantum", "blue", quantum.profiles[t]), ("classical", "red", classical.profiles[t])],
            title=f"{cfg.model} t={t}", xlabel="block", ylabel="mass", comment=echo,
        )
    same = bool(np.array_equal(quantum.profiles, classical.profiles))
    print(f"wrote {out / 'profile.csv'} and {len(snaps)} plots; profiles identical: {same}")
    return EXIT_OK


def cmd_noise_sweep(opts: dict) -> int:
    levels = [s.strip() for s in str(opts["levels"]).split(",") if s.strip()]
    for level in levels:
        if level not in PRESETS:
            raise ConfigError(f"unknown noise level {level!r}")
    try:
        shot_list = [int(s) for s in str(opts["shots"]).split(",") if s.strip()]
    except ValueError:
        raise ConfigError(f"bad shot list {opts['shots']!r}") from None
    if not levels or not shot_list or min(shot_list) < 1:
        raise ConfigError("need at least one level and positive shot counts")
    out = _out_dir(opts)
    base = experiment_config({**opts, "shots": shot_list[0], "noise": "none", "exact": False})
    reference, _ = run_experiment(replace(base, shots=None, noise=NoiseModel()))
    rows = []
    for level in levels:
        for shots in shot_list:
            cfg = replace(base, shots=shots, noise=_noise(opts, level))
            quantum, classical = run_experiment(cfg)
            write_profile_csv(out / f"cell_{level}_{shots}.csv", quantum, classical, cfg)
            dist = l1_distance(quantum, reference)
            rows.append({
                "level": level, "shots": shots,
                "l1_mean": float(dist[1:].mean()) if cfg.steps else 0.0,
                "l1_final": float(dist[-1]),
                "junk_mean": float(quantum.junk[1:].mean()) if cfg.steps else 0.0,
                "flagged_steps": int(np.count_nonzero(quantum.frozen)),
            })
    with (out / "summary.csv").open("w", newline="") as fh:
        fh.write(f"# config: {json.dumps(base.to_dict(), sort_keys=True)}\n# seed: {base.seed}\n")
        w = csv.DictWriter(fh, fieldnames=list(rows[0]))
        w.writeheader()
        w.writerows(rows)
    for r in rows:
        flag = "  FROZEN/NON-PROPAGATING" if r["flagged_steps"] else ""
        print(f"{r['level']:>5} {r['shots']:>7}  L1 mean {r['l1_mean']:8.3f}  "
              f"junk {r['junk_mean']:.3f}{flag}")
    return EXIT_OK


def resource_rows(model: str, n_values) -> list[dict]:
    rows = []
    for n in n_values:
        if model == "hpp":
            sites = (1 << n) ** 2
            qubits = HppLayout(1 << n).total
        else:
            sites = 1 << n
            qubits = D1q3Layout(n).total
        for stage in ("collision", "mapping", "propagation"):
            rep = resource_report(decompose(stage_circuit(model, sites, stage)))
            rows.append({"n": n, "N": sites, "stage": stage, "cx_count": rep.cx_count,
                         "one_qubit_count": rep.one_qubit_count, "depth": rep.depth, "qubits": qubits})
        rep = resource_report(decompose(stage_circuit(model, sites, "step")))
        rows.append({"n": n, "N": sites, "stage": "total", "cx_count": rep.cx_count,
                     "one_qubit_count": rep.one_qubit_count, "depth": rep.depth, "qubits": qubits})
    return rows


def linear_fit(x, y) -> tuple[float, float, float]:
    """Slope, intercept and R^2 of a least-squares line."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 if ss_tot == 0 else 1.0 - float((resid ** 2).sum()) / ss_tot
    return float(slope), float(intercept), r2


def cmd_resources(opts: dict) -> int:
    model = opts["model"]
    lo, hi = opts["n_min"], opts["n_max"]
    if lo < 2 or hi < lo:
        raise ConfigError(f"need 2 <= n-min <= n-max, got {lo}..{hi}")
    if model == "hpp" and hi > 12:
        raise ConfigError("hpp resources limited to 12 bits per axis")
    rows = resource_rows(model, range(lo, hi + 1))
    out = _out_dir(opts)
    with (out / "resources.csv").open("w", newline="") as fh:
        fh.write(f"# config: {json.dumps({'model': model, 'n_min': lo, 'n_max': hi})}\n# seed: none\n")
        w = csv.DictWriter(fh, fieldnames=list(rows[0]))
        w.writeheader()
        w.writerows(rows)
    print(f"{'n':>3} {'N':>8} {'stage':>12} {'cx':>6} {'1q':>6} {'depth':>6} {'qubits':>6}")
    for r in rows:
        print(f"{r['n']:>3} {r['N']:>8} {r['stage']:>12} {r['cx_count']:>6} {r['one_qubit_count']:>6} "
              f"{r['depth']:>6} {r['qubits']:>6}")
    for stage in ("collision", "mapping"):
        counts = {r["cx_count"] for r in rows if r["stage"] == stage}
        if len(counts) != 1:
            print(f"error: {stage} CX count varies with n: {sorted(counts)}", file=sys.stderr)
            return 1
    totals = [(r["n"], r["cx_count"]) for r in rows if r["stage"] == "total"]
    if len(totals) >= 2:
        slope, intercept, r2 = linear_fit(*zip(*totals))
        print(f"total CX ~ {slope:.3f} n + {intercept:.3f} (R^2 = {r2:.6f}); reference {REFERENCE_CX}")
    return EXIT_OK


def cmd_dump_circuit(opts: dict) -> int:
    model = opts["model"]
    if model not in ("d1q3-binary", "hpp"):
        raise ConfigError("dump-circuit supports d1q3-binary and hpp")
    try:
        circ = stage_circuit(model, opts["sites"], opts["stage"], opts["seed"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if opts.get("decompose"):
        circ = decompose(circ)
    text = circ.to_text()
    if opts.get("out"):
        Path(opts["out"]).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


COMMANDS = {
    "run": cmd_run,
    "compare": cmd_compare,
    "noise-sweep": cmd_noise_sweep,
    "resources": cmd_resources,
    "dump-circuit": cmd_dump_circuit,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](resolve(args))
    except (CapacityError, MemoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
