"""Command-line front end.

    igpswitch simulate | equilibria | silnikov | sweep | lyapunov
              [--config PATH] [--set key=value ...] [--out DIR] [--jobs N]

Every command writes ``manifest.txt`` into the output directory.  The manifest
is itself a valid config file, so ``--config manifest.txt`` reruns the command
with identical options.

Exit codes: 0 success (including "not found" analytical outcomes), 1 usage or
configuration error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from . import __version__
from .analysis import NoThresholdError, SweepSpec, locate_threshold, sweep, write_sweep_csv, largest_lyapunov
from .config import ConfigError, RunConfig, load_config
from .equilibria import boundary_equilibria, boundary_stability, routh_hurwitz, solve_coexistence
from .integrate import IntegrationError, integrate, write_trajectory_csv
from .spectral import cardano_roots, silnikov_check

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _write_manifest(out: Path, command: str, cfg: RunConfig, outputs, extra=()) -> None:
    lines = [
        f"# igpswitch {__version__}",
        f"# command: {command}",
        *(f"# output: {name}" for name in outputs),
        *(f"# {line}" for line in extra),
        "",
        cfg.to_text(),
    ]
    (out / "manifest.txt").write_text("\n".join(lines))


def _fmt(v: float) -> str:
    return f"{v:.17g}"


def cmd_simulate(cfg: RunConfig, out: Path, jobs: int) -> int:
    t_end = cfg.simulate["t_end"]
    traj = integrate(cfg.params, cfg.initial, t_end, cfg.solver)
    write_trajectory_csv(traj, out / "trajectory.csv")
    _write_manifest(out, "simulate", cfg, ["trajectory.csv"])
    x, y, z = traj.final
    print(f"integrated to t = {traj.times[-1]:g}: x = {x:.6f}, y = {y:.6f}, z = {z:.6f}")
    return EXIT_OK


def cmd_equilibria(cfg: RunConfig, out: Path, jobs: int) -> int:
    p = cfg.params
    eqs = boundary_equilibria(p)
    e4 = solve_coexistence(p)
    rows = []
    for e in eqs:
        pt = e.point if e.point is not None else ("", "", "")
        rows.append([e.kind, *pt, e.feasible, e.stability, e.note])
        line = f"{e.kind}: " + (f"({pt[0]:.6g}, {pt[1]:.6g}, {pt[2]:.6g})" if e.point else "-")
        print(f"{line}  feasible={e.feasible}  {e.stability}  {e.note}".rstrip())
        if e.kind in ("E1", "E2", "E3") and e.feasible:
            bs = boundary_stability(p, e)
            print(f"    {bs.inequality}: {'holds' if bs.inequality_holds else 'fails'}")
    if e4 is None:
        rows.append(["E4", "", "", "", False, "not-assessed", "not found"])
        print("E4: not found (no coexistence equilibrium located)")
    else:
        rows.append(["E4", *e4.point, True, e4.stability, ""])
        rh = routh_hurwitz(p, e4.point)
        x, y, z = e4.point
        print(f"E4: ({x:.6g}, {y:.6g}, {z:.6g})  feasible=True  {e4.stability}")
        print(f"    sigma1 = {rh.sigma1:.4f}, sigma2 = {rh.sigma2:.4f}, sigma3 = {rh.sigma3:.4f}, "
              f"sigma1*sigma2 - sigma3 = {rh.margin:.4f}, hurwitz = {rh.hurwitz}")
        with open(out / "routh_hurwitz.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["sigma1", "sigma2", "sigma3", "margin", "hurwitz",
                        *(f"V{i}" for i in range(1, 9))])
            w.writerow([*map(_fmt, (rh.sigma1, rh.sigma2, rh.sigma3, rh.margin)), rh.hurwitz,
                        *map(_fmt, rh.V)])
    with open(out / "equilibria.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["kind", "x", "y", "z", "feasible", "stability", "note"])
        for r in rows:
            w.writerow([_fmt(v) if isinstance(v, float) else v for v in r])
    outputs = ["equilibria.csv"] + (["routh_hurwitz.csv"] if e4 is not None else [])
    _write_manifest(out, "equilibria", cfg, outputs)
    return EXIT_OK


def cmd_silnikov(cfg: RunConfig, out: Path, jobs: int) -> int:
    p = cfg.params
    e4 = solve_coexistence(p)
    if e4 is None:
        text = "no coexistence equilibrium\n"
    else:
        rh = routh_hurwitz(p, e4.point)
        ca = cardano_roots(rh.sigma1, rh.sigma2, rh.sigma3)
        v = silnikov_check(ca)
        ef = v.expression_form
        lines = [
            "E4 = ({:.6g}, {:.6g}, {:.6g})".format(*e4.point),
            f"A1 = {ca.A1:.4f}, A2 = {ca.A2:.4f}, A3 = {ca.A3:.4f}, H = {ca.H:.4f}, G = {ca.G:.4f}",
            f"Delta = {ca.Delta:.4f}",
            "eigenvalues: " + ", ".join(f"{r.real:.4f}{r.imag:+.4f}i" for r in ca.roots),
        ]
        if ef["RplusHR"] is not None:
            lines += [
                f"R + H/R = {ef['RplusHR']:.4f}",
                f"R - H/R + 2 A1 = {ef['sign_branch_value']:.4f}",
                f"|R - H/R - A1| - |R - H/R + 2 A1|/2 = {ef['magnitude_gap']:.4f}",
            ]
        lines += [
            "conditions: " + ", ".join(f"{k}={c}" for k, c in v.conditions.items()),
            f"verdict: {'chaotic (saddle focus, Sil-nikov conditions hold)' if v.chaotic else 'non-chaotic'}",
        ]
        text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    (out / "silnikov.txt").write_text(text)
    _write_manifest(out, "silnikov", cfg, ["silnikov.txt"])
    return EXIT_OK


def _sweep_spec(cfg: RunConfig) -> SweepSpec:
    s = cfg.sweep
    return SweepSpec(
        s["param"], cfg.sweep_grid(), base=cfg.params, initial=cfg.initial,
        transient=s["transient"], sample=s["sample"], opts=cfg.solver,
        lle_time=s["lle_time"], lle_threshold=s["lle_threshold"],
    )


def cmd_sweep(cfg: RunConfig, out: Path, jobs: int) -> int:
    spec = _sweep_spec(cfg)
    records = sweep(spec, jobs)
    write_sweep_csv(spec, records, out / "sweep_extrema.csv", out / "sweep_summary.csv")
    for r in records:
        print(f"{spec.param} = {r.value:<8g} lle = {r.lle:+.5f}  {r.verdict}")
    report = []
    if cfg.sweep["refine"]:
        try:
            th = locate_threshold(spec, records=records, transition=cfg.sweep["transition"],
                                  max_iter=cfg.sweep["max_iter"])
            report.append(f"{cfg.sweep['transition']} threshold: {spec.param} in "
                          f"[{_fmt(th.lo)}, {_fmt(th.hi)}] after {th.iterations} bisections")
        except NoThresholdError as exc:
            report.append(str(exc))
    for line in report:
        print(line)
    outputs = ["sweep_extrema.csv", "sweep_summary.csv"]
    if report:
        (out / "threshold.txt").write_text("\n".join(report) + "\n")
        outputs.append("threshold.txt")
    _write_manifest(out, "sweep", cfg, outputs)
    return EXIT_OK


def cmd_lyapunov(cfg: RunConfig, out: Path, jobs: int) -> int:
    ly = cfg.lyapunov
    lle = largest_lyapunov(cfg.params, cfg.initial, ly["total_time"], cfg.solver,
                           transient_fraction=ly["transient_fraction"], renorm_tau=ly["renorm_tau"])
    text = f"largest Lyapunov exponent: {_fmt(lle)}\n"
    sys.stdout.write(text)
    (out / "lyapunov.txt").write_text(text)
    _write_manifest(out, "lyapunov", cfg, ["lyapunov.txt"])
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "equilibria": cmd_equilibria,
    "silnikov": cmd_silnikov,
    "sweep": cmd_sweep,
    "lyapunov": cmd_lyapunov,
}


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="igpswitch", description="Intraguild predation model with predator switching.")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", help="config file (sectioned key = value)")
    ap.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                    help="override one option, e.g. --set c=0 or --set sweep.step=0.1")
    ap.add_argument("--out", default="igpswitch-out", help="output directory")
    ap.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.jobs < 1:
        print("igpswitch: error: --jobs must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        cfg = load_config(args.config, args.overrides)
        if args.command == "sweep":
            _sweep_spec(cfg)
    except (ConfigError, ValueError) as exc:
        print(f"igpswitch: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    try:
        return COMMANDS[args.command](cfg, out, args.jobs)
    except IntegrationError as exc:
        print(f"igpswitch: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
