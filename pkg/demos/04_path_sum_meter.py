"""The pointer as a sum over spin histories.

A K-step factorization of the evolution sorts spin histories by their
time-averaged sigma_z.  Reassembling the bins with momentum phases recovers
the exact propagator at rate O(1/K); reading the bins directly (positions
x = t * average) gives a finite-K skeleton of the position sub-states,
including the frozen-spin spikes at the cone edges.
"""

import math
import pathlib

import numpy as np

from spinmeter import (
    SPIN_UP,
    SpatialGrid,
    eta_substates,
    evolution_operator,
    path_average_distribution,
    trotter_path_sum,
)


def convergence_table(p=0.7, theta=math.pi / 3, t=2.5):
    exact = evolution_operator(p, theta, t)
    print(f"Trotter convergence at p={p}, theta=pi/3, t={t}")
    print(f"{'K':>6}  {'max |U_K - U|':>14}  {'K * err':>10}")
    for k in (16, 32, 64, 128, 256, 512):
        total, _ = trotter_path_sum(p, theta, t, k)
        err = np.abs(total - exact).max()
        print(f"{k:>6}  {err:>14.3e}  {k * err:>10.4f}")


def coarse_cells(theta, t, k, width):
    dist = path_average_distribution(theta, t, k, SPIN_UP)
    x_bins = t * dist.bin_centers
    edges = np.arange(-t, t + width / 2, width)
    sums = []
    for a, b in zip(edges[:-1], edges[1:]):
        if b >= t - 1e-9:
            mask = (x_bins >= a) & (x_bins <= b + 1e-9)
        else:
            mask = (x_bins >= a) & (x_bins < b)
        sums.append(dist.amplitudes[mask].sum(axis=0))
    return edges, np.array(sums)


def cell_comparison(theta=math.pi / 3, t=5.0, k=400, width=0.25):
    edges, dp_sums = coarse_cells(theta, t, k, width)
    fine = SpatialGrid(-t, t, 20001)
    sub = eta_substates(fine, t, theta, SPIN_UP)
    xf = fine.points

    cont = []
    num = den = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        mask = (xf >= a) & (xf <= b)
        cell = np.trapezoid(sub.field.values[mask], xf[mask], axis=0)
        if b >= t - 1e-9:
            cell = cell + sub.delta_plus
        if a <= -t + 1e-9:
            cell = cell + sub.delta_minus
        cont.append(cell)
        i = len(cont) - 1
        num += np.abs(dp_sums[i] - cell).sum()
        den += np.abs(cell).sum()
    print(f"\ncell-by-cell match, theta=pi/3, t={t}, K={k}, cell width {width}:")
    print(f"  relative L1 discrepancy = {num / den:.4f}")
    return edges, dp_sums, np.array(cont)


def run():
    convergence_table()
    edges, dp_sums, cont = cell_comparison()
    centers = 0.5 * (edges[:-1] + edges[1:])

    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        print("matplotlib not available; skipping the figure")
        return

    fig, ax = plt.subplots(figsize=(8, 4))
    w = edges[1] - edges[0]
    ax.bar(centers, np.abs(dp_sums[:, 0]), width=0.8 * w,
           label="path sum, up component", alpha=0.7)
    ax.plot(centers, np.abs(cont[:, 0]), "k.-", lw=0.8, ms=4,
            label="continuum cells")
    ax.set_xlabel("x (units of x_so)")
    ax.set_ylabel("|cell amplitude|")
    ax.legend(frameon=False)
    out = pathlib.Path(__file__).with_name("path_sum_meter.png")
    fig.savefig(out, dpi=150, bbox_inches="tight")
    print(f"wrote {out}")


if __name__ == "__main__":
    run()
