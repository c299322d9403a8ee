"""Command-line front end: one subcommand per reproducible artifact.

    spectrum          closed-form vs numeric lattice spectra and mode matrix
    stationary-sweep  four-well symmetric family curves (Omega vs eta)
    branches          continued branches with fold/pitchfork events
    census            full stationary-state census at fixed eta
    bif-table         ground-state symmetry-breaking point vs well count
    evolve            time evolution with the conservation report
    linear1d          1D eigensolver cross-check of the mode reduction

Every command writes CSV files (plus an events JSON where applicable)
stamped with the digest of the effective configuration, and by default a
quick-look PNG next to them (disable with --no-plot).  Exit codes:
2 parameter error, 3 numeric failure, 4 I/O failure.
"""

import argparse
import sys
from pathlib import Path

import numpy as np

from . import export
from .config import apply_overrides, config_digest, load_config, model_params
from .continuation import (
    continue_branch,
    detect_folds,
    detect_pitchfork_and_classify,
    ground_state_bifurcation_table,
)
from .dynamics import ModeState, integrate
from .errors import NumericError, ParameterError, StateError
from .lattice import build_line_coupling, closed_form_spectrum, diagonalize_symmetric
from .linear1d import Well1D, run_crosscheck
from .params import ModelParams
from .stationary import (
    AmplitudeSolution,
    _continue_in_eta,
    enumerate_solutions,
    sweep_symmetric,
)


def cmd_spectrum(config, outdir, digest):
    params = model_params(config)
    basis = closed_form_spectrum(params)
    numeric = diagonalize_symmetric(build_line_coupling(params))
    export.write_spectrum(outdir / "spectrum.csv", basis.mu, numeric.mu, digest)
    export.write_mode_matrix(outdir / "modes.csv", basis.A, digest)
    if config["plot"]:
        from . import plots

        plots.plot_spectrum(basis.mu, numeric.mu, outdir / "spectrum.png")
    return 0


def _sweep_grids(block):
    margin = 1e-3
    lo = np.linspace(block["q_min"], 0.25 - margin, block["n_points"])
    hi = np.linspace(0.25 + margin, block["q_max"], block["n_points"])
    return {"lo": lo, "hi": hi}


def cmd_stationary_sweep(config, outdir, digest):
    params = model_params(config)
    if params.N != 4:
        raise ParameterError("the symmetric-family sweep is a four-well artifact (model.N = 4)")
    block = config["stationary_sweep"]
    grids = _sweep_grids(block)
    branches = []
    for fam in block["families"]:
        fam = tuple(int(v) for v in fam)
        for piece, grid in grids.items():
            br = sweep_symmetric(grid, params.sigma, fam)
            branches.append(br)
            name = f"sweep_sym_j{fam[0]}l{fam[1]}_{piece}.csv"
            export.write_branch(outdir / name, br, digest)
    if config["plot"]:
        from . import plots

        plots.plot_family_sweep(branches, outdir / "stationary_sweep.png")
    return 0


def cmd_branches(config, outdir, digest):
    params = model_params(config)
    sigma = params.sigma
    block = config["branches"]
    eta_min, eta_max = float(block["eta_min"]), float(block["eta_max"])
    if eta_min >= eta_max:
        raise ParameterError(f"branches needs eta_min < eta_max, got [{eta_min}, {eta_max}]")

    N = params.N
    k = np.arange(1, N + 1)
    a0 = np.sqrt(2.0 / (N + 1)) * np.sin(k * np.pi / (N + 1))
    ground = AmplitudeSolution.from_guess(a0, 0.0, sigma, -2.0 * np.cos(np.pi / (N + 1)))
    seed_eta = min(max(0.0, eta_min), eta_max)
    if seed_eta != 0.0:
        ground = _continue_in_eta(ground, seed_eta)
        if ground is None:
            raise NumericError(f"could not reach the branch start at eta = {seed_eta:g}")

    branches = []
    events = []
    sym = continue_branch(ground, (eta_min, eta_max), family_label="symmetric-ground")
    branches.append(sym)
    events.extend(detect_pitchfork_and_classify(sym, sigma))
    for i, ev in enumerate(events):
        if ev.emanating_branch_seed is None:
            continue
        asym = continue_branch(
            ev.emanating_branch_seed, (eta_min, eta_max), family_label=f"asymmetric-{i + 1}"
        )
        branches.append(asym)
    if block["include_family_curves"] and N == 4:
        grids = _sweep_grids(config["stationary_sweep"])
        for fam in ((2, 2), (1, 1)):
            for piece, grid in grids.items():
                br = sweep_symmetric(grid, sigma, fam)
                br.family_label += f"-{piece}"
                branches.append(br)
                try:
                    events.extend(detect_folds(br))
                except ParameterError:
                    pass

    for br in branches:
        export.write_branch(outdir / f"branch_{br.family_label}.csv", br, digest)
    export.write_events_json(outdir / "events.json", events)
    if config["plot"]:
        from . import plots

        plots.plot_branches(branches, events, outdir / "branches.png")
    return 0


def cmd_census(config, outdir, digest):
    params = model_params(config)
    block = config["census"]
    sols = enumerate_solutions(
        params.effective_eta,
        params.sigma,
        params.N,
        seed_strategy=tuple(block["strategies"]),
        n_random=int(block["n_random"]),
        rng_seed=int(config["seed"]),
        threads=int(config["threads"]),
    )
    export.write_solutions(outdir / "census.csv", sols, digest)
    if config["plot"]:
        from . import plots

        plots.plot_census(sols, outdir / "census.png")
    return 0


def cmd_bif_table(config, outdir, digest):
    block = config["bif_table"]
    rows = ground_state_bifurcation_table(
        [int(n) for n in block["N_list"]], float(block["sigma"])
    )
    export.write_table(
        outdir / "bif_table.csv",
        ["N", "eta_bif", "classification"],
        [[r["N"], r["eta_bif"], r["classification"]] for r in rows],
        digest,
    )
    if config["plot"]:
        from . import plots

        plots.plot_bif_table(rows, outdir / "bif_table.png")
    return 0


def _initial_state(spec_block, params: ModelParams):
    kind = spec_block.get("kind")
    if kind == "eigenvector":
        j = int(spec_block.get("index", 1))
        if not 1 <= j <= params.N:
            raise ParameterError(f"eigenvector index must lie in 1..{params.N}, got {j}")
        return ModeState(d=closed_form_spectrum(params).A[j - 1].astype(complex))
    if kind == "site":
        k = int(spec_block.get("index", 1))
        if not 1 <= k <= params.N:
            raise ParameterError(f"site index must lie in 1..{params.N}, got {k}")
        d = np.zeros(params.N, dtype=complex)
        d[k - 1] = 1.0
        return ModeState(d=d)
    if kind == "amplitudes":
        re = np.asarray(spec_block.get("re", []), dtype=float)
        im = np.asarray(spec_block.get("im", np.zeros_like(re)), dtype=float)
        if re.size != params.N or im.size != params.N:
            raise ParameterError(f"amplitudes must have {params.N} components")
        d = re + 1j * im
        nrm = np.linalg.norm(d)
        if nrm == 0:
            raise ParameterError("initial amplitudes are all zero")
        return ModeState(d=d / nrm)
    raise ParameterError(f"unknown initial-state kind {kind!r}")


def cmd_evolve(config, outdir, digest):
    params = model_params(config)
    block = config["evolve"]
    state = _initial_state(block["initial"], params)
    traj = integrate(
        state,
        float(block["t_end"]),
        params,
        dt=None if block["dt"] is None else float(block["dt"]),
        stride=int(block["stride"]),
        order=int(block["order"]),
    )
    export.write_trajectory(outdir / "trajectory.csv", traj, digest)
    if config["plot"]:
        from . import plots

        plots.plot_trajectory(traj, outdir / "trajectory.png")
    return 0


def cmd_linear1d(config, outdir, digest):
    params = model_params(config)
    block = config["linear1d"]
    well = Well1D(depth=float(block["V0"]), radius=float(block["r"]), spacing=float(block["ell"]))
    result = run_crosscheck(well, params.N, hbar=float(block["hbar"]),
                            n_points=int(block["n_points"]))
    x = result.nwell.x
    export.write_eigenfunctions(
        outdir / "eigenfunctions.csv", x, well.multi_value(x, params.N), result.nwell.modes, digest
    )
    export.write_table(
        outdir / "crosscheck.csv",
        ["lambda_D", "beta_formula", "beta_raw", "lambda_fit", "beta_fit", "fit_residual"]
        + [f"lambda_{j}" for j in range(1, params.N + 1)],
        [
            [
                result.lambda_D,
                result.beta_formula.beta,
                result.beta_formula.raw,
                result.fit.lambda_fit,
                result.fit.beta_fit,
                result.fit.residual,
                *result.nwell_eigs,
            ]
        ],
        digest,
    )
    if config["plot"]:
        from . import plots

        plots.plot_linear1d(result, outdir / "linear1d.png")
    return 0


_COMMANDS = {
    "spectrum": cmd_spectrum,
    "stationary-sweep": cmd_stationary_sweep,
    "branches": cmd_branches,
    "census": cmd_census,
    "bif-table": cmd_bif_table,
    "evolve": cmd_evolve,
    "linear1d": cmd_linear1d,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="nwell",
        description="N-well lattice reduction: spectra, dynamics, stationary states "
        "and bifurcation analysis",
    )
    parser.add_argument("--config", type=Path, default=None, help="JSON run configuration")
    parser.add_argument("--out", type=Path, default=None, help="output directory")
    parser.add_argument("--seed", type=int, default=None, help="PRNG seed for multistart")
    parser.add_argument("--threads", type=int, default=None, help="worker threads for sweeps")
    parser.add_argument(
        "--plot",
        action=argparse.BooleanOptionalAction,
        default=None,
        help="render quick-look figures next to the CSV output",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        if name == "spectrum":
            p.add_argument("--N", type=int, default=None, help="well count override")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
        apply_overrides(config, out=args.out, seed=args.seed, threads=args.threads,
                        plot=args.plot)
        if getattr(args, "N", None) is not None:
            config["model"]["N"] = args.N
        digest = config_digest(config)
        outdir = Path(config["output_path"])
        outdir.mkdir(parents=True, exist_ok=True)
        return _COMMANDS[args.command](config, outdir, digest)
    except (ParameterError, StateError) as exc:
        print(f"nwell: parameter error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"nwell: numeric error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"nwell: i/o error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
