"""Delimited output and the bundled readers.

Every CSV is comma-separated with '.' decimals, a header row, LF line
endings, and values printed to 12 significant digits; the first line is a
comment carrying the digest of the run configuration, so identical
configurations produce byte-identical files.  Event lists are exported as
a JSON array of records.
"""

import json

import numpy as np

from .branches import BifurcationEvent, Branch, BranchPoint
from .dynamics import Trajectory
from .stationary import AmplitudeSolution

_FMT = "{:.12g}"


def _fmt(v):
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return _FMT.format(float(v))


def write_table(path, columns, rows, digest=""):
    lines = []
    if digest:
        lines.append(f"# config={digest}")
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def _parse(cell):
    try:
        return float(cell)
    except ValueError:
        return cell


def read_table(path):
    """(columns, ndarray) of a CSV written by `write_table`.

    Numeric tables come back as float arrays; tables with text cells
    (e.g. classifications) come back as object arrays.
    """
    with open(path) as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip() and not ln.startswith("#")]
    columns = lines[0].split(",")
    cells = [[_parse(v) for v in ln.split(",")] for ln in lines[1:]]
    if all(isinstance(v, float) for row in cells for v in row):
        return columns, np.array(cells)
    return columns, np.array(cells, dtype=object)


# ----------------------------------------------------------------------
# typed writers / readers
# ----------------------------------------------------------------------

def solution_columns(N):
    return (
        ["eta", "sigma", "Omega"]
        + [f"q_{k}" for k in range(1, N + 1)]
        + [f"sign_{k}" for k in range(1, N + 1)]
        + ["residual_norm"]
    )


def write_solutions(path, solutions, digest=""):
    if not solutions:
        raise ValueError("no solutions to export")
    N = solutions[0].n
    rows = [
        [s.eta, s.sigma, s.Omega, *s.q, *s.signs, s.residual_norm] for s in solutions
    ]
    return write_table(path, solution_columns(N), rows, digest)


def read_solutions(path):
    columns, data = read_table(path)
    N = sum(1 for c in columns if c.startswith("q_"))
    out = []
    for row in data:
        q = row[3 : 3 + N]
        signs = row[3 + N : 3 + 2 * N]
        a = np.sign(signs) * np.sqrt(q)
        out.append(
            AmplitudeSolution(
                a=a, Omega=row[2], eta=row[0], sigma=row[1], residual_norm=row[-1]
            )
        )
    return out


def branch_columns(N):
    return (
        ["arclength", "eta", "Omega"]
        + [f"q_{k}" for k in range(1, N + 1)]
        + [f"sign_{k}" for k in range(1, N + 1)]
        + ["min_singular_value"]
    )


def write_branch(path, branch: Branch, digest=""):
    if not branch.points:
        raise ValueError("no branch points to export")
    N = branch.points[0].a.size
    rows = [
        [
            p.arclength,
            p.eta,
            p.Omega,
            *(p.a**2),
            *np.where(p.a >= 0, 1, -1),
            p.min_singular_value,
        ]
        for p in branch.points
    ]
    return write_table(path, branch_columns(N), rows, digest)


def read_branch(path, family_label=""):
    columns, data = read_table(path)
    N = sum(1 for c in columns if c.startswith("q_"))
    points = []
    for row in data:
        q = row[3 : 3 + N]
        signs = row[3 + N : 3 + 2 * N]
        points.append(
            BranchPoint(
                arclength=row[0],
                eta=row[1],
                Omega=row[2],
                a=np.sign(signs) * np.sqrt(q),
                min_singular_value=row[-1],
            )
        )
    return Branch(points=points, family_label=family_label)


def write_events_json(path, events):
    records = [
        {
            "kind": e.kind,
            "eta_c": e.eta_c,
            "classification": e.classification,
            "family_label": e.family_label,
        }
        for e in events
    ]
    with open(path, "w", newline="\n") as fh:
        json.dump(records, fh, indent=2)
        fh.write("\n")
    return path


def read_events_json(path):
    with open(path) as fh:
        records = json.load(fh)
    return [BifurcationEvent(**r) for r in records]


def trajectory_columns(N):
    cols = ["t"]
    for k in range(1, N + 1):
        cols += [f"re_d_{k}", f"im_d_{k}"]
    return cols + ["norm", "energy"]


def write_trajectory(path, traj: Trajectory, digest=""):
    N = traj.d.shape[1]
    norms = traj.norms
    energies = traj.energies if traj.energies is not None else np.zeros_like(norms)
    rows = []
    for i, t in enumerate(traj.times):
        row = [t]
        for k in range(N):
            row += [traj.d[i, k].real, traj.d[i, k].imag]
        row += [norms[i], energies[i]]
        rows.append(row)
    return write_table(path, trajectory_columns(N), rows, digest)


def read_trajectory(path):
    columns, data = read_table(path)
    N = (len(columns) - 3) // 2
    times = data[:, 0]
    d = data[:, 1 : 1 + 2 * N : 2] + 1j * data[:, 2 : 2 + 2 * N : 2]
    energies = data[:, -1]
    norms = data[:, -2]
    e0 = energies[0]
    return Trajectory(
        times=times,
        d=d,
        norm_drift=float(np.max(np.abs(norms - 1.0))),
        energy_drift=float(np.max(np.abs(energies - e0)) / max(1.0, abs(e0))),
        dt=float(times[1] - times[0]) if times.size > 1 else 0.0,
        stride=1,
        energies=energies,
    )


def write_spectrum(path, mu_closed, mu_numeric, digest=""):
    rows = [
        [j + 1, mu_closed[j], mu_numeric[j], mu_numeric[j] - mu_closed[j]]
        for j in range(len(mu_closed))
    ]
    return write_table(path, ["j", "mu_closed", "mu_numeric", "difference"], rows, digest)


def write_mode_matrix(path, A, digest=""):
    N = A.shape[0]
    cols = ["j"] + [f"alpha_{k}" for k in range(1, N + 1)]
    rows = [[j + 1, *A[j]] for j in range(N)]
    return write_table(path, cols, rows, digest)


def write_eigenfunctions(path, x, potential, modes, digest=""):
    N = modes.shape[1]
    cols = ["x", "v"] + [f"psi_{j}" for j in range(1, N + 1)]
    rows = [[x[i], potential[i], *modes[i]] for i in range(x.size)]
    return write_table(path, cols, rows, digest)
