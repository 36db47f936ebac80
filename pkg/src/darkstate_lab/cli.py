"""darkstate-lab command line: figure reproduction and the acceptance suite.

Exit codes: 0 success, 2 config error, 3 numerical failure, 4 exceptional-point abort.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import dynamics as dyn
from . import perturbation as pt
from . import plotting
from .biortho import ExceptionalPointProximityError
from .config import ConfigError, RunConfig, load_config
from .eigensolver import ConvergenceError
from .fock_space import NotBlockDiagonalError, TruncationError, dump_matrix_csv, manifold_block
from .model import ModelParams, build_collective_op, build_h_bh, build_h_eff, split_h0_h1
from .spectra import dark_branch, exceptional_point_scan, full_spectrum, spectrum_rows, sweep_u

log = logging.getLogger("darkstate_lab")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_EP = 0, 2, 3, 4


def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return repr(float(x) + 0.0)  # no "-0.0" in output
    return str(x)


def write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(x) for x in r])


def _stem(command: str, n, u) -> str:
    return f"{command}_{n}_{u}"


def _out(cfg: RunConfig) -> Path:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


SPECTRUM_HEADER = ["manifold", "branch_id", "u", "re_lambda", "im_lambda", "decay_rate", "class"]


def cmd_spectrum(cfg: RunConfig) -> list[Path]:
    params = cfg.params()
    rows = []
    for system in full_spectrum(params):
        rows.extend(spectrum_rows(system))
    out = _out(cfg)
    stem = _stem("spectrum", "all", f"{params.u:g}")
    csv_path, svg_path = out / f"{stem}.csv", out / f"{stem}.svg"
    write_csv(csv_path, SPECTRUM_HEADER, rows)
    plotting.plot_spectrum(csv_path, svg_path, params.omega, half_filling=params.local_dim - 0.5)
    return [csv_path, svg_path]


def cmd_sweep(cfg: RunConfig) -> list[Path]:
    grid = cfg.grid()
    out = _out(cfg)
    written = []
    for n in cfg.manifolds():
        params = cfg.params(u=float(grid[0]))
        sw = sweep_u(params, n, grid)
        if sw.ambiguous.any():
            log.warning("N=%d: branch assignment ambiguous at u = %s", n,
                        ", ".join(f"{u:.4g}" for u in grid[sw.ambiguous][:5]))
        rows = []
        labels = sw.initial_labels()
        for g, system in enumerate(sw.systems):
            for b, idx in enumerate(sw.order[g]):
                p = system.pairs[idx]
                rows.append((n, b, float(grid[g]), p.lam.real, p.lam.imag, p.decay_rate, labels[b]))
        stem = _stem("sweep", n, f"{grid[0]:g}-{grid[-1]:g}")
        csv_path, ep_path, svg_path = out / f"{stem}.csv", out / f"{stem}_ep.csv", out / f"{stem}.svg"
        write_csv(csv_path, SPECTRUM_HEADER, rows)
        eps = exceptional_point_scan(params, n, float(grid[0]), float(grid[-1]), n_grid=len(grid))
        write_csv(ep_path, ["manifold", "u", "gap", "self_overlap", "pair_i", "pair_j"],
                  [(n, e.u, e.gap, e.self_overlap, *e.pair) for e in eps])
        plotting.plot_sweep(csv_path, svg_path, ep_path)
        written += [csv_path, ep_path, svg_path]
    return written


PERTURB_HEADER = ["N", "u", "re_correction", "im_correction", "re_numeric_shift", "im_numeric_shift"]


def cmd_perturb(cfg: RunConfig) -> list[Path]:
    grid = cfg.grid()
    ns = cfg.manifolds()
    # the dark state of manifold N needs N quanta on one site
    local_dim = max(cfg.local_dim, max(ns) + 1)
    if local_dim != cfg.local_dim:
        log.info("raising local_dim from %d to %d to hold N=%d", cfg.local_dim, local_dim, max(ns))
    base = ModelParams(cfg.omega, float(grid[0]), cfg.gamma, local_dim)
    rows = []
    for n in ns:
        numeric = dark_branch(sweep_u(base, n, grid)) - n * base.omega
        for u, shift in zip(grid, numeric):
            corr = pt.total_energy_correction(base.with_u(u), n)
            rows.append((n, float(u), corr.real, corr.imag, shift.real, shift.imag))
    out = _out(cfg)
    stem = _stem("perturb", f"{min(ns)}-{max(ns)}", f"{grid[0]:g}-{grid[-1]:g}")
    csv_path, svg_path = out / f"{stem}.csv", out / f"{stem}.svg"
    write_csv(csv_path, PERTURB_HEADER, rows)
    plotting.plot_perturb(csv_path, svg_path)
    return [csv_path, svg_path]


def cmd_evolve(cfg: RunConfig) -> list[Path]:
    params = cfg.params()
    ns = cfg.manifolds()
    if len(ns) != 1:
        raise ConfigError("evolve takes a single manifold")
    n = ns[0]
    if n < 1:
        raise ConfigError("evolve needs manifold >= 1")
    inits = {
        "numerical": dyn.numerical_dark_state(params, n),
        "perturbative": pt.assemble_state(params, n, cfg.order),
    }
    out = _out(cfg)
    stem = _stem("evolve", n, f"{params.u:g}")
    csvs, metrics = {}, {}
    for name, rho0 in inits.items():
        traj = dyn.evolve(params, rho0, cfg.t_end, cfg.dt, cfg.mode, cfg.sample_every, keep_states=False)
        header, rows = dyn.trajectory_rows(traj)
        path = out / f"{stem}_{name}.csv"
        write_csv(path, header, rows)
        csvs[name] = path
        b = dyn.burst_metrics(traj.times, dyn.intensity(traj))
        last = traj.records[-1]
        metrics[name] = {
            "t_peak": b.t_peak, "i_peak": b.i_peak, "i_initial": b.i_initial, "is_burst": b.is_burst,
            "final_pop_ground": last["pop_ground"], "final_pop_n1_dark": last["pop_n1_dark"],
        }
    json_path = out / f"{stem}_burst.json"
    json_path.write_text(json.dumps({"config": cfg.to_dict(), "metrics": metrics}, indent=2, sort_keys=True) + "\n")
    svg_path = out / f"{stem}.svg"
    plotting.plot_evolve(csvs, svg_path)
    return [*csvs.values(), json_path, svg_path]


def cmd_verify(cfg: RunConfig | None = None) -> int:
    from .acceptance import run_all

    results = run_all()
    n_pass = sum(r.passed for r in results)
    print(f"{n_pass}/{len(results)} criteria passed")
    return EXIT_OK if n_pass == len(results) else 1


OPERATORS = {
    "h_bh": build_h_bh,
    "h_eff": build_h_eff,
    "collective": build_collective_op,
    "h0": lambda p, b: split_h0_h1(p, b)[0],
    "h1": lambda p, b: split_h0_h1(p, b)[1],
}


def cmd_dump(args) -> list[Path]:
    params = ModelParams(args.omega, args.u, 1.0, args.local_dim)
    basis = params.basis()
    op = OPERATORS[args.operator](params, basis)
    if args.manifold is not None:
        op = manifold_block(op, basis, args.manifold)
    path = Path(args.out) / f"dump_{args.operator}_{'all' if args.manifold is None else args.manifold}.csv"
    path.parent.mkdir(parents=True, exist_ok=True)
    dump_matrix_csv(op, path)
    return [path]


COMMAND_FUNCS = {"spectrum": cmd_spectrum, "sweep": cmd_sweep, "perturb": cmd_perturb, "evolve": cmd_evolve}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="darkstate-lab", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("spectrum", "sweep", "perturb", "evolve", "verify"):
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--out", help="output directory (overrides output_dir)")
        p.add_argument("overrides", nargs="*", metavar="key=value")
    d = sub.add_parser("dump", help="write an operator matrix as row,col,re,im CSV")
    d.add_argument("operator", choices=sorted(OPERATORS))
    d.add_argument("--manifold", type=int)
    d.add_argument("--u", type=float, default=0.0)
    d.add_argument("--omega", type=float, default=0.0)
    d.add_argument("--local-dim", type=int, default=6)
    d.add_argument("--out", default=".")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "dump":
            written = cmd_dump(args)
        elif args.command == "verify":
            return cmd_verify(load_config("verify", args.config, args.overrides, args.out))
        else:
            cfg = load_config(args.command, args.config, args.overrides, args.out)
            written = COMMAND_FUNCS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ExceptionalPointProximityError as exc:
        print(f"exceptional-point abort: {exc}", file=sys.stderr)
        return EXIT_EP
    except (ConvergenceError, dyn.IntegrationError, TruncationError, NotBlockDiagonalError,
            FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    for path in written:
        print(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
