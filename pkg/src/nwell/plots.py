"""Quick-look figures rendered next to the CSV output.

The delimited files remain the canonical output; these renderings exist
so a run can be eyeballed without a downstream pipeline.  Everything is
drawn with the Agg backend straight to files.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

plt.rcParams.update(
    {
        "figure.figsize": (6.0, 4.5),
        "font.size": 9,
        "axes.grid": True,
        "grid.alpha": 0.3,
        "savefig.dpi": 150,
    }
)

# family colors: (2,2) black, (1,2) blue, (2,1) green, (1,1) red
FAMILY_COLORS = {"j2l2": "black", "j1l2": "tab:blue", "j2l1": "tab:green", "j1l1": "tab:red"}


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def plot_spectrum(mu_closed, mu_numeric, path):
    fig, ax = plt.subplots()
    j = np.arange(1, len(mu_closed) + 1)
    ax.plot(j, mu_closed, "o-", label="closed form", mfc="none")
    ax.plot(j, mu_numeric, "x", label="numeric")
    ax.set_xlabel("mode index j")
    ax.set_ylabel("eigenvalue")
    ax.legend()
    return _save(fig, path)


def plot_family_sweep(branches, path):
    fig, ax = plt.subplots()
    for br in branches:
        color = next(
            (c for key, c in FAMILY_COLORS.items() if key in br.family_label), None
        )
        ax.plot(br.etas, br.omegas, ".", ms=1.5, color=color, label=br.family_label)
    ax.set_xlabel("eta")
    ax.set_ylabel("Omega")
    ax.set_ylim(-15, 15)
    ax.set_xlim(-20, 20)
    handles, labels = ax.get_legend_handles_labels()
    seen = dict(zip(labels, handles))
    ax.legend(seen.values(), seen.keys(), markerscale=6, fontsize=7)
    return _save(fig, path)


def plot_branches(branches, events, path):
    fig, ax = plt.subplots()
    for br in branches:
        sym = "sym" in br.family_label or "ground" in br.family_label
        ax.plot(
            br.etas,
            br.omegas,
            "-" if sym else "--",
            lw=1.0,
            color="tab:red" if sym else "black",
        )
    for ev in events:
        ax.axvline(ev.eta_c, color="gray", lw=0.6, ls=":")
        ax.annotate(
            f"{ev.kind} {ev.eta_c:.3f}",
            (ev.eta_c, ax.get_ylim()[0]),
            fontsize=6,
            rotation=90,
            va="bottom",
        )
    ax.set_xlabel("eta")
    ax.set_ylabel("Omega")
    return _save(fig, path)


def plot_census(solutions, path):
    n = len(solutions)
    if n == 0:
        raise ValueError("no solutions to plot")
    ncols = min(5, n)
    nrows = (n + ncols - 1) // ncols
    fig, axes = plt.subplots(nrows, ncols, figsize=(2.0 * ncols, 1.6 * nrows), squeeze=False)
    for ax in axes.flat[n:]:
        ax.axis("off")
    for ax, sol in zip(axes.flat, solutions):
        sites = np.arange(1, sol.n + 1)
        ax.bar(sites, sol.q, color=np.where(sol.a >= 0, "tab:blue", "tab:orange"))
        ax.set_title(f"Omega={sol.Omega:.3f}", fontsize=7)
        ax.set_xticks(sites)
        ax.set_ylim(0, 1)
        ax.tick_params(labelsize=6)
    return _save(fig, path)


def plot_trajectory(traj, path):
    fig, (ax1, ax2) = plt.subplots(2, 1, sharex=True, figsize=(6, 5.5))
    q = np.abs(traj.d) ** 2
    for k in range(q.shape[1]):
        ax1.plot(traj.times, q[:, k], label=f"q_{k + 1}", lw=0.9)
    ax1.set_ylabel("site populations")
    ax1.legend(fontsize=7, ncol=4)
    ax2.semilogy(traj.times, np.abs(traj.norms - 1.0) + 1e-18, label="|norm - 1|", lw=0.8)
    if traj.energies is not None:
        e0 = traj.energies[0]
        ax2.semilogy(
            traj.times,
            np.abs(traj.energies - e0) / max(1.0, abs(e0)) + 1e-18,
            label="energy drift",
            lw=0.8,
        )
    ax2.set_xlabel("t")
    ax2.set_ylabel("drift")
    ax2.legend(fontsize=7)
    return _save(fig, path)


def plot_bif_table(rows, path):
    fig, ax = plt.subplots()
    N = [r["N"] for r in rows]
    eta = [r["eta_bif"] for r in rows]
    ax.plot(N, eta, "o-")
    for r in rows:
        ax.annotate(f"{r['eta_bif']:.2f}", (r["N"], r["eta_bif"]), fontsize=7,
                    textcoords="offset points", xytext=(4, 4))
    ax.set_xlabel("well count N")
    ax.set_ylabel("eta at symmetry breaking")
    return _save(fig, path)


def plot_linear1d(spectrum1d, path):
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(8, 3.5))
    x = spectrum1d.nwell.x
    v = spectrum1d.well.multi_value(x, spectrum1d.N)
    ax1.plot(x, v, "k-", lw=1.0)
    ax1.set_xlabel("x")
    ax1.set_ylabel("potential")
    for j in range(spectrum1d.N):
        ax2.plot(x, spectrum1d.nwell.modes[:, j], lw=0.9,
                 label=f"psi_{j + 1} ({spectrum1d.nwell_eigs[j]:.4f})")
    ax2.set_xlabel("x")
    ax2.set_ylabel("eigenfunctions")
    ax2.legend(fontsize=6)
    return _save(fig, path)
