"""Command-line front end: config parsing, subcommand dispatch and
deterministic file outputs.

Subcommands: equilibria | invasion | simulate | figures | sweep.
Exit codes: 0 success, 2 validation error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import configparser
import dataclasses
import json
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import experiments
from .equilibria import (
    coexistence_condition_2species,
    equilibria_2species,
    equilibria_3species,
    stability_condition_3species,
)
from .invasion import bubble_construct, invasion_report
from .model import ModelParams, PiecewiseCapacity, ValidationError
from .pde import (
    Grid1D,
    NumericalError,
    SimState,
    default_dt,
    run_to_time,
    snapshots_to_csv,
)
from .stationary import front_construct

__all__ = [
    "RunConfig",
    "parse_config",
    "cmd_equilibria",
    "cmd_invasion",
    "cmd_simulate",
    "cmd_figures",
    "cmd_sweep",
    "main",
]

_FIELD_NAMES = {
    "two_species": ("n1", "n2"),
    "three_species_wolbachia": ("n1", "n2", "n3"),
    "reduced_scalar": ("omega",),
}

_SECTIONS = {
    "model": {"b1", "b2", "b3", "d1", "d2", "d3", "c", "D"},
    "capacity": {"k1_f", "k1_u", "k2_f", "k2_u"},
    "grid": {"half_length", "n_nodes"},
    "run": {"system", "dt", "t_end", "snapshot_interval", "out_dir"},
    "initial": {"n1", "n2", "n3"},
}


@dataclass(frozen=True)
class RunConfig:
    """Validated run configuration; all module preconditions are checked at
    parse time so commands can assume a consistent setup."""

    params: ModelParams
    caps: PiecewiseCapacity
    grid: Grid1D
    system: str
    initial: tuple[experiments.InitialBlock, ...]
    t_end: float
    dt: float | None = None
    snapshot_interval: float = 50.0
    out_dir: str | None = None

    def to_text(self) -> str:
        """Canonical config text; parses back to an identical RunConfig."""
        p, k, g = self.params, self.caps, self.grid
        lines = [
            "[model]",
            *(f"{n} = {getattr(p, n)!r}" for n in ("b1", "b2", "b3", "d1", "d2", "d3", "c", "D")),
            "",
            "[capacity]",
            *(f"{n} = {getattr(k, n)!r}" for n in ("k1_f", "k1_u", "k2_f", "k2_u")),
            "",
            "[grid]",
            f"half_length = {g.half_length!r}",
            f"n_nodes = {g.n_nodes}",
            "",
            "[run]",
            f"system = {self.system}",
            f"t_end = {self.t_end!r}",
            f"snapshot_interval = {self.snapshot_interval!r}",
        ]
        if self.dt is not None:
            lines.append(f"dt = {self.dt!r}")
        if self.out_dir is not None:
            lines.append(f"out_dir = {self.out_dir}")
        blocks: dict[int, list[str]] = {}
        for b in self.initial:
            lo = "-inf" if b.lo == -math.inf else repr(b.lo)
            hi = "inf" if b.hi == math.inf else repr(b.hi)
            blocks.setdefault(b.species, []).append(f"{b.value!r} [{lo}, {hi}]")
        if blocks:
            lines += ["", "[initial]"]
            for sp in sorted(blocks):
                lines.append(f"n{sp} = " + "; ".join(blocks[sp]))
        return "\n".join(lines) + "\n"


def _parse_interval_entry(species: int, entry: str) -> experiments.InitialBlock:
    entry = entry.strip()
    try:
        value_text, rest = entry.split("[", 1)
        lo_text, hi_text = rest.rstrip("]").split(",")
        return experiments.InitialBlock(
            species, float(value_text), float(lo_text), float(hi_text)
        )
    except (ValueError, IndexError) as exc:
        raise ValidationError(
            f"bad initial block {entry!r}; expected 'value [lo, hi]'"
        ) from exc


def parse_config(text: str) -> RunConfig:
    """Parse the sectioned key-value config format; unknown keys reject."""
    cp = configparser.ConfigParser()
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ValidationError(f"config syntax error: {exc}") from exc
    for section in cp.sections():
        if section not in _SECTIONS:
            raise ValidationError(f"unknown config section [{section}]")
        for key in cp[section]:
            if key not in _SECTIONS[section]:
                raise ValidationError(f"unknown key {key!r} in section [{section}]")
    for required in ("model", "capacity", "run"):
        if required not in cp:
            raise ValidationError(f"missing config section [{required}]")

    def fval(section, key, default=None):
        if key not in cp[section]:
            if default is None:
                raise ValidationError(f"missing {key!r} in section [{section}]")
            return default
        return float(cp[section][key])

    params = ModelParams(
        b1=fval("model", "b1"), b2=fval("model", "b2"), b3=fval("model", "b3"),
        d1=fval("model", "d1"), d2=fval("model", "d2"), d3=fval("model", "d3"),
        c=fval("model", "c"), D=fval("model", "D", 1.0),
    )
    caps = PiecewiseCapacity(
        k1_f=fval("capacity", "k1_f"), k1_u=fval("capacity", "k1_u"),
        k2_f=fval("capacity", "k2_f"), k2_u=fval("capacity", "k2_u"),
    )
    grid = Grid1D(
        half_length=fval("grid", "half_length", 40.0) if "grid" in cp else 40.0,
        n_nodes=int(fval("grid", "n_nodes", 801)) if "grid" in cp else 801,
    )
    system = cp["run"].get("system", "two_species")
    if system not in _FIELD_NAMES:
        raise ValidationError(f"unknown system kind {system!r}")
    if system == "three_species_wolbachia":
        params.require_wolbachia_hypothesis()
    blocks: list[experiments.InitialBlock] = []
    if "initial" in cp:
        for key, text_value in cp["initial"].items():
            species = int(key[1])
            n_fields = len(_FIELD_NAMES[system])
            if species > n_fields:
                raise ValidationError(
                    f"initial data for n{species} but system has {n_fields} fields"
                )
            for entry in text_value.split(";"):
                blocks.append(_parse_interval_entry(species, entry))
    dt = float(cp["run"]["dt"]) if "dt" in cp["run"] else None
    if dt is not None and dt <= 0:
        raise ValidationError("dt must be positive")
    t_end = fval("run", "t_end")
    if t_end < 0:
        raise ValidationError("t_end must be nonnegative")
    return RunConfig(
        params=params,
        caps=caps,
        grid=grid,
        system=system,
        initial=tuple(blocks),
        t_end=t_end,
        dt=dt,
        snapshot_interval=fval("run", "snapshot_interval", 50.0),
        out_dir=cp["run"].get("out_dir"),
    )


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    raise TypeError(f"not JSON serializable: {type(obj)}")


def _dump_json(payload: dict, path: str | None) -> str:
    text = json.dumps(payload, indent=2, sort_keys=True, default=_json_default)
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    return text


# ---------------------------------------------------------------------------
# subcommands


def cmd_equilibria(config: RunConfig, out_path: str | None = None) -> dict:
    """Report all homogeneous steady states per side with stability tags and
    the coexistence/stability threshold evaluations."""
    p = config.params
    report: dict = {"config": config.to_text(), "sides": {}}
    for side, K1, K2 in (
        ("F", config.caps.k1_f, config.caps.k2_f),
        ("U", config.caps.k1_u, config.caps.k2_u),
    ):
        ok2, thr2 = coexistence_condition_2species(p, K1, K2)
        entry: dict = {
            "K1": K1,
            "K2": K2,
            "coexistence_condition": {"satisfied": ok2, "threshold": thr2, "c": p.c},
        }
        if config.system == "three_species_wolbachia":
            ok3, thr3 = stability_condition_3species(p, K1, K2)
            entry["stability_condition_3species"] = {
                "satisfied": ok3,
                "threshold": thr3,
                "c": p.c,
            }
            points = equilibria_3species(p, K1, K2, include_infeasible=True)
        else:
            points = equilibria_2species(p, K1, K2)
        entry["equilibria"] = [
            {
                "densities": list(pt.densities),
                "kind": pt.kind,
                "species": list(pt.species),
                "stability": pt.stability,
                "note": pt.note,
            }
            for pt in points
        ]
        report["sides"][side] = entry
    _dump_json(report, out_path)
    return report


def cmd_invasion(
    config: RunConfig,
    out_dir: str | None = None,
    emit_profiles: bool = False,
) -> dict:
    """Report invasion coefficients, thresholds and the scenario class;
    optionally emit the stationary front and a reference bubble as CSV."""
    include13 = config.system == "three_species_wolbachia"
    rep = invasion_report(config.params, config.caps, include_pair13=include13)
    payload: dict = {
        "gamma_f": rep.gamma_f,
        "gamma_u": rep.gamma_u,
        "theta_f": rep.theta_f,
        "theta_u": rep.theta_u,
        "theta1_u": rep.theta1_u,
        "scenario": rep.scenario,
        "gamma13_f": rep.gamma13_f,
        "gamma13_u": rep.gamma13_u,
        "wolbachia_case": rep.wolbachia_case,
        "config": config.to_text(),
    }
    if emit_profiles and out_dir is not None:
        regime = {"two_fronts": "BB", "species1_invades": "TH2"}.get(rep.scenario)
        if regime is not None:
            front = front_construct(
                config.params, config.caps, regime, config.grid.half_length, 0.0025
            )
            front_path = os.path.join(out_dir, "front.csv")
            with open(front_path, "w", encoding="utf-8") as fh:
                fh.write("x,omega\n")
                for xv, wv in zip(front.x, front.values):
                    fh.write(f"{xv:.17g},{wv:.17g}\n")
            payload["front_csv"] = front_path
        if rep.theta_f is not None:
            from .model import carrying_equilibrium

            hi = carrying_equilibrium(config.params, config.caps.k1_f, 1)
            level = 0.5 * (rep.theta_f + hi)
            bubble = bubble_construct("F", level, config.params, config.caps, 5e-4)
            bubble_path = os.path.join(out_dir, "bubble_f.csv")
            with open(bubble_path, "w", encoding="utf-8") as fh:
                fh.write("x,chi\n")
                for xv, cv in zip(bubble.x, bubble.values):
                    fh.write(f"{xv:.17g},{cv:.17g}\n")
            payload["bubble_csv"] = bubble_path
    if out_dir is not None:
        _dump_json(payload, os.path.join(out_dir, "invasion.json"))
    return payload


def cmd_simulate(config: RunConfig, out_dir: str) -> dict:
    """Run one simulation with snapshots; write the CSV series plus a JSON
    summary with final diagnostics."""
    os.makedirs(out_dir, exist_ok=True)
    grid = config.grid
    fields = np.zeros((len(_FIELD_NAMES[config.system]), grid.n_nodes))
    x = grid.nodes()
    for b in config.initial:
        fields[b.species - 1, (x >= b.lo) & (x <= b.hi)] = b.value
    state = SimState(config.system, 0.0, grid, fields)
    dt = config.dt or default_dt(state, config.params, config.caps)
    final, log = run_to_time(
        state,
        config.params,
        config.caps,
        dt,
        config.t_end,
        snapshot_interval=config.snapshot_interval,
    )
    if not log.snapshots:
        log.snapshots.append((final.time, final.fields.copy()))
    csv_path = os.path.join(out_dir, "snapshots.csv")
    snapshots_to_csv(csv_path, log, grid, _FIELD_NAMES[config.system])
    summary = {
        "config": config.to_text(),
        "dt": dt,
        "final_time": final.time,
        "final_sup_dt": log.sup_dt[-1] if log.sup_dt else None,
        "segregation_metric": log.segregation[-1] if log.segregation else None,
        "clamped_total": log.clamped_total,
        "snapshots_csv": csv_path,
    }
    _dump_json(summary, os.path.join(out_dir, "summary.json"))
    return summary


def cmd_figures(
    names,
    out_dir: str,
    t_end: float | None = None,
    dt: float | None = None,
) -> dict:
    """Reproduce the bundled scenarios' data files (CSV series + verdict
    JSON per scenario).  ``names`` may be scenario names or ["all"]."""
    catalog = experiments.all_scenarios()
    if list(names) == ["all"]:
        names = list(catalog)
    unknown = [n for n in names if n not in catalog]
    if unknown:
        raise ValidationError(
            f"unknown scenario names {unknown}; valid: {sorted(catalog)} or 'all'"
        )
    os.makedirs(out_dir, exist_ok=True)
    results = {}
    for name in names:
        scenario = catalog[name]
        if t_end is not None:
            scenario = dataclasses.replace(scenario, t_end=t_end)
        if dt is not None:
            scenario = dataclasses.replace(scenario, dt=dt)
        verdict, final, log = experiments.run_and_judge(
            scenario, snapshot_interval=max(scenario.t_end / 40.0, 1e-9)
        )
        csv_path = os.path.join(out_dir, f"{name}_snapshots.csv")
        snapshots_to_csv(csv_path, log, final.grid, _FIELD_NAMES[scenario.system])
        payload = {
            "scenario": verdict.scenario,
            "outcome": verdict.outcome,
            "expected": verdict.expected,
            "diagnostics": verdict.diagnostics,
            "parameters": verdict.params_echo,
        }
        _dump_json(payload, os.path.join(out_dir, f"{name}_verdict.json"))
        results[name] = payload
    return results


def cmd_sweep(kind: str, out_dir: str, values=None) -> dict:
    """Parameter sweeps: 'competition' runs the strong-competition study,
    'release-width' brackets the replacement threshold."""
    os.makedirs(out_dir, exist_ok=True)
    if kind == "competition":
        table = experiments.strong_competition_study(
            experiments.scenario_case1(), values or (10.0, 100.0, 1000.0)
        )
        path = os.path.join(out_dir, "competition_sweep.csv")
    elif kind == "release-width":
        table = experiments.bubble_threshold_probe(
            experiments.release_width_scenario, values or (0.0, 5.0, 15.0)
        )
        path = os.path.join(out_dir, "release_width_sweep.csv")
    else:
        raise ValidationError("sweep kind must be 'competition' or 'release-width'")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# {table.note}\n")
        fh.write(",".join(table.columns) + "\n")
        for row in table.rows:
            fh.write(",".join(f"{v:.17g}" if isinstance(v, float) else str(v) for v in row) + "\n")
    return {"csv": path, "note": table.note, "rows": [list(r) for r in table.rows]}


# ---------------------------------------------------------------------------
# entry point


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="segrad",
        description="Two-habitat competition simulator and analysis toolkit",
    )
    parser.add_argument("--quiet", action="store_true", help="suppress stdout report")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, needs_config=True):
        if needs_config:
            p.add_argument("--config", required=True, help="path to a run config file")
        p.add_argument("--out", default=None, help="output directory (default $SEGRAD_OUT)")
        p.add_argument("--dt", type=float, default=None)
        p.add_argument("--dx", type=float, default=None, help="target mesh spacing override")
        p.add_argument("--t-end", type=float, default=None)
        p.add_argument("--c", type=float, default=None, help="competition strength override")

    add_common(sub.add_parser("equilibria", help="steady states and stability"))
    pi = sub.add_parser("invasion", help="invasion coefficients and thresholds")
    add_common(pi)
    pi.add_argument("--emit-profiles", action="store_true")
    add_common(sub.add_parser("simulate", help="run one simulation"))
    pf = sub.add_parser("figures", help="reproduce bundled scenario outputs")
    pf.add_argument("names", nargs="+", help="scenario names or 'all'")
    add_common(pf, needs_config=False)
    ps = sub.add_parser("sweep", help="parameter sweeps")
    ps.add_argument("kind", choices=["competition", "release-width"])
    ps.add_argument("--values", type=float, nargs="+", default=None)
    add_common(ps, needs_config=False)
    return parser


def _load_config(args) -> RunConfig:
    with open(args.config, "r", encoding="utf-8") as fh:
        config = parse_config(fh.read())
    overrides = {}
    if args.dt is not None:
        overrides["dt"] = args.dt
    if getattr(args, "t_end", None) is not None:
        overrides["t_end"] = args.t_end
    if args.c is not None:
        overrides["params"] = dataclasses.replace(config.params, c=args.c)
    if args.dx is not None:
        n = max(3, int(round(2.0 * config.grid.half_length / args.dx)) + 1)
        overrides["grid"] = Grid1D(config.grid.half_length, n)
    if overrides:
        config = dataclasses.replace(config, **overrides)
    return config


def _out_dir(args) -> str:
    out = args.out or os.environ.get("SEGRAD_OUT") or "."
    os.makedirs(out, exist_ok=True)
    return out


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "equilibria":
            config = _load_config(args)
            report = cmd_equilibria(
                config, os.path.join(_out_dir(args), "equilibria.json")
            )
            if not args.quiet:
                print(_dump_json(report, None))
        elif args.command == "invasion":
            config = _load_config(args)
            payload = cmd_invasion(config, _out_dir(args), args.emit_profiles)
            if not args.quiet:
                print(_dump_json(payload, None))
        elif args.command == "simulate":
            config = _load_config(args)
            summary = cmd_simulate(config, _out_dir(args))
            if not args.quiet:
                print(_dump_json(summary, None))
        elif args.command == "figures":
            results = cmd_figures(args.names, _out_dir(args), args.t_end, args.dt)
            if not args.quiet:
                print(_dump_json({k: v["outcome"] for k, v in results.items()}, None))
        elif args.command == "sweep":
            payload = cmd_sweep(args.kind, _out_dir(args), args.values)
            if not args.quiet:
                print(_dump_json(payload, None))
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
