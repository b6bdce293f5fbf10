"""
Command-line front end.

    entit fig2 [--r 0.7] [--grid 81] [--out-csv fig2.csv] [--out-svg fig2.svg]
    entit fig3 [--r 0.5] [--gamma 0.01 --gamma 0.05 --gamma 0.1] [--grid 51]
    entit entit | swap | zoology | expansions

Every flag may also be set in a flat ``key=value`` file passed with
``--config``; command-line flags win over the file. ``ENTIT_WORKERS`` caps
the number of threads used for grid scans.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from . import fock
from . import gaussian as g
from . import protocols as p
from . import qubits as q

DEFAULT_SEED = 20090101


@dataclass(frozen=True)
class RunConfig:
    command: str
    r: float = 0.5
    s: float = 0.5
    phi: float = math.pi / 4
    psi: float = math.pi / 4
    gamma: tuple[float, ...] = (0.01, 0.05, 0.1)
    cutoff: int = fock.DEFAULT_CUTOFF
    grid: int | None = None
    draws: int = 50
    seed: int = DEFAULT_SEED
    out_csv: str | None = None
    out_svg: str | None = None
    extra: dict = field(default_factory=dict, compare=False)


COMMAND_DEFAULTS = {
    "fig2": dict(r=0.7, grid=81, out_csv="fig2.csv", out_svg="fig2.svg"),
    "fig3": dict(r=0.5, grid=51, out_csv="fig3.csv", out_svg="fig3.svg"),
    "entit": dict(r=0.5, s=0.5),
    "swap": dict(r=0.5, s=-0.5),
    "zoology": dict(),
    "expansions": dict(r=0.5, s=0.3),
}

_CASTS = {"r": float, "s": float, "phi": float, "psi": float, "cutoff": int, "grid": int,
          "draws": int, "seed": int, "out_csv": str, "out_svg": str}


def read_config_file(path) -> dict:
    """Parse ``key=value`` lines; ``#`` starts a comment, ``gamma`` is comma separated."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value")
        key, val = (t.strip() for t in line.split("=", 1))
        key = key.replace("-", "_")
        if key == "gamma":
            out["gamma"] = tuple(float(v) for v in val.split(",") if v.strip())
        elif key in _CASTS:
            out[key] = _CASTS[key](val)
        else:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
    return out


def build_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(args.command, **COMMAND_DEFAULTS[args.command])
    if args.config:
        cfg = replace(cfg, **read_config_file(args.config))
    flags = {f.name: getattr(args, f.name) for f in fields(RunConfig)
             if f.name not in ("command", "extra") and getattr(args, f.name, None) is not None}
    if "gamma" in flags:
        flags["gamma"] = tuple(flags["gamma"])
    cfg = replace(cfg, **flags)
    if any(not 0 <= gm <= 1 for gm in cfg.gamma):
        raise SystemExit(f"error: loss parameters must lie in [0, 1], got {cfg.gamma}")
    return cfg


class Checks:
    """Ordered pass/fail bookkeeping for a verification command."""

    def __init__(self):
        self.rows: list[tuple[str, float, str, bool]] = []

    def add(self, name: str, value: float, passed: bool, target: str = "") -> None:
        self.rows.append((name, float(value), target, bool(passed)))

    @property
    def first_failure(self):
        return next((r[0] for r in self.rows if not r[3]), None)

    def emit(self, out_csv=None) -> int:
        for name, value, target, ok in self.rows:
            print(f"[{'PASS' if ok else 'FAIL'}] {name}: {value:.6g} {target}")
        if out_csv:
            with open(out_csv, "w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(["check", "value", "target", "passed"])
                for name, value, target, ok in self.rows:
                    w.writerow([name, repr(value), target, int(ok)])
        bad = self.first_failure
        if bad is not None:
            print(f"first failing check: {bad}", file=sys.stderr)
            return 1
        return 0


def cmd_fig2(cfg: RunConfig) -> int:
    from . import plots

    if cfg.r <= 0:
        raise SystemExit("error: fig2 needs r > 0")
    table = p.separability_scan(cfg.r, p.default_x_grid(cfg.grid), p.BeamSplitterPair(cfg.phi, cfg.psi))
    p.write_table(cfg.out_csv, p.SCAN_HEADER, table)
    if cfg.out_svg:
        plots.save_svg(plots.fig2(table, cfg.r), cfg.out_svg)
    span = p.entangled_everywhere_interval(table)
    print(f"wrote {cfg.out_csv} ({len(table)} rows)")
    print(f"kappa12(x=-1)={table[0, 1]:.9f} kappa12(x=1)={table[-1, 1]:.9f}")
    print(f"kappa13(x=-1)={table[0, 2]:.9f} kappa13(x=1)={table[-1, 2]:.9f}")
    print("all partitions entangled for x in " + (f"[{span[0]:.4g}, {span[1]:.4g}]" if span else "(none)"))
    return 0


def fig3_csv_paths(base: str, gammas) -> dict:
    if len(gammas) == 1:
        return {gammas[0]: base}
    b = Path(base)
    return {gm: str(b.with_name(f"{b.stem}_gamma{gm:g}{b.suffix}")) for gm in gammas}


def fig3_s_grid(r: float, n: int) -> np.ndarray:
    # s = r is always sampled so every curve hits the recovery point
    return np.union1d(p.default_s_grid(r, n), [r])


def cmd_fig3(cfg: RunConfig) -> int:
    from . import plots

    grid = fig3_s_grid(cfg.r, cfg.grid)
    curves = {gm: p.bath_recovery_curve(cfg.r, gm, grid) for gm in cfg.gamma}
    for gm, path in fig3_csv_paths(cfg.out_csv, cfg.gamma).items():
        p.write_table(path, p.RECOVERY_HEADER, curves[gm])
        at_r = curves[gm][np.isclose(curves[gm][:, 0], cfg.r)][0]
        print(f"gamma={gm:g}: wrote {path}; at s=r Ef={at_r[1]:.6f} purity={at_r[2]:.12f}")
    if cfg.out_svg:
        plots.save_svg(plots.fig3(curves, cfg.r), cfg.out_svg)
    return 0


def cmd_entit(cfg: RunConfig) -> int:
    rep = p.entit_report(cfg.r, cfg.s, p.BeamSplitterPair(cfg.phi, cfg.psi), cfg.cutoff)
    print("\n".join(rep.lines()))
    c = Checks()
    c.add("classification transparent", float(rep.classification == "transparent"),
          rep.classification == "transparent", "(1 = yes)")
    c.add("cm roundtrip error", rep.cm_roundtrip_error, rep.cm_roundtrip_error < 1e-10, "< 1e-10")
    c.add("fock eigen residual", rep.eigen_residual, rep.eigen_residual < 1e-6, "< 1e-6")
    c.add("overlap with input", rep.overlap_in, rep.overlap_in > 1 - 1e-8, "> 1 - 1e-8")
    c.add("fidelity cross-check", abs(rep.fidelity - rep.fidelity_fock), rep.ok, "< 1e-6")
    return c.emit(cfg.out_csv)


def cmd_swap(cfg: RunConfig) -> int:
    rep = p.entit_report(cfg.r, cfg.s, p.BeamSplitterPair(cfg.phi, cfg.psi), cfg.cutoff)
    print("\n".join(rep.lines()))
    cov = g.reduce(p.output_covariance(cfg.r, cfg.s, cfg.phi, cfg.psi), (1, 3))
    cm_err = float(np.max(np.abs(cov.matrix - g.twb_covariance(cfg.r).matrix)))
    box = fock.apply_bs_pair_fock(fock.twb_pair_state(cfg.r, cfg.s, cfg.cutoff, truncation="box"), cfg.phi, cfg.psi)
    fock_err = float(np.max(np.abs(fock.reduced_moments(box, (1, 3)).matrix - g.twb_covariance(cfg.r).matrix)))
    c = Checks()
    c.add("classification swapped", float(rep.classification == "swapped"), rep.classification == "swapped", "(1 = yes)")
    c.add("overlap with S13 S24 |0>", rep.overlap_swap, rep.overlap_swap > 1 - 1e-6, "> 1 - 1e-6")
    c.add("gaussian (1,3) vs twb(r)", cm_err, cm_err < 1e-6, "< 1e-6")
    c.add("fock (1,3) moments vs twb(r)", fock_err, fock_err < 1e-6, "< 1e-6")
    return c.emit(cfg.out_csv)


def cmd_zoology(cfg: RunConfig) -> int:
    rows = q.validate_zoology(np.random.default_rng(cfg.seed), cfg.draws)
    c = Checks()
    for row in rows:
        print(f"{row.branch:22s} {row.constraint:15s} draws={row.draws} exact={row.max_exact_residual:.2e} "
              f"phase={row.max_phase_residual:.2e} violating_min={row.min_violating_residual:.2e} "
              f"status={row.exact_status}")
        c.add(f"{row.branch} satisfying", row.max_phase_residual, row.max_phase_residual < 1e-10, "< 1e-10")
        c.add(f"{row.branch} violating", row.min_violating_residual, row.min_violating_residual > 1e-6, "> 1e-6")
        c.add(f"{row.branch} classification", row.misclassified, row.misclassified == 0, "== 0")
    if cfg.out_csv:
        with open(cfg.out_csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(q.ZOOLOGY_HEADER)
            for row in rows:
                w.writerow([row.branch, row.draws, repr(row.max_exact_residual), repr(row.max_phase_residual)])
    return c.emit()


EXPANSION_EPS = (1e-1, 1e-2, 1e-3)


def cmd_expansions(cfg: RunConfig) -> int:
    sq = p.expansion_errors_sq(cfg.r, cfg.phi, EXPANSION_EPS)
    sq_fixed = p.expansion_errors_sq(cfg.r, cfg.phi, EXPANSION_EPS, p.fidelity_expansion_sq_corrected)
    bs = p.expansion_errors_bs(cfg.r, cfg.s, cfg.phi, EXPANSION_EPS)
    slope_sq, slope_bs = p.loglog_slope(EXPANSION_EPS, sq), p.loglog_slope(EXPANSION_EPS, bs)
    print(f"corrected squeezing expansion slope (informational): {p.loglog_slope(EXPANSION_EPS, sq_fixed):.4f}")
    c = Checks()
    c.add("squeezing expansion slope", slope_sq, abs(slope_sq - 3) <= 0.2, "3 +- 0.2")
    c.add("transmissivity expansion slope", slope_bs, abs(slope_bs - 2) <= 0.2, "2 +- 0.2")
    if cfg.out_csv:
        with open(cfg.out_csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["expansion", "perturbation", "abs_error"])
            for name, errs in (("squeezing", sq), ("squeezing_corrected", sq_fixed), ("transmissivity", bs)):
                for e, err in zip(EXPANSION_EPS, errs):
                    w.writerow([name, repr(e), repr(err)])
    return c.emit()


COMMANDS = {
    "fig2": cmd_fig2,
    "fig3": cmd_fig3,
    "entit": cmd_entit,
    "swap": cmd_swap,
    "zoology": cmd_zoology,
    "expansions": cmd_expansions,
}


def make_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--r", type=float)
    common.add_argument("--s", type=float)
    common.add_argument("--phi", type=float, help="radians")
    common.add_argument("--psi", type=float, help="radians")
    common.add_argument("--gamma", type=float, action="append", help="loss parameter, repeatable")
    common.add_argument("--cutoff", type=int)
    common.add_argument("--grid", type=int, help="number of grid points")
    common.add_argument("--draws", type=int, help="random draws per zoology branch")
    common.add_argument("--seed", type=int)
    common.add_argument("--out-csv", dest="out_csv")
    common.add_argument("--out-svg", dest="out_svg")
    common.add_argument("--config", help="key=value file; flags override it")

    parser = argparse.ArgumentParser(prog="entit", description=__doc__.split("\n\n")[0].strip())
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=fn.__name__.removeprefix("cmd_"))
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    cfg = build_config(args)
    try:
        return COMMANDS[cfg.command](cfg)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
