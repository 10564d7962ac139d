"""Delimited outputs, run manifests, and the figures rendered beside them.

Every data file a command writes gets a sibling <name>.manifest.json, and
with plotting enabled a sibling PNG. The figure layer always uses the Agg
backend so the CLI works headless.
"""

from __future__ import annotations

import csv
import json
from datetime import datetime, timezone

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def write_csv(path, header, rows) -> str:
    path = str(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    return path


def write_json(path, payload) -> str:
    path = str(path)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def write_text(path, text) -> str:
    path = str(path)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    return path


def manifest_path(out_path) -> str:
    return f"{out_path}.manifest.json"


def write_manifest(out_path, payload) -> str:
    payload = dict(payload)
    payload.setdefault("created_utc", datetime.now(timezone.utc).isoformat())
    return write_json(manifest_path(out_path), payload)


def figure_path(out_path, suffix="") -> str:
    base = str(out_path)
    stem = base.rsplit(".", 1)[0] if "." in base.rsplit("/", 1)[-1] else base
    return f"{stem}{suffix}.png"


def _new_axes(xlabel, ylabel):
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.grid(True, alpha=0.3)
    return fig, ax


def _save(fig, path) -> str:
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return str(path)


def plot_sweep(path, xlabel, values, analytic, empirical=None, ci=None) -> str:
    fig, ax = _new_axes(xlabel, "coverage probability")
    ax.plot(values, analytic, "-", color="tab:blue", label="model")
    if empirical is not None:
        ax.errorbar(values, empirical, yerr=ci, fmt="o", ms=4, color="tab:red",
                    capsize=3, label="simulation")
    ax.legend()
    return _save(fig, path)


def plot_grid(path, h_km, psi_deg, p_grid, curve=None, optimum=None) -> str:
    """Filled coverage map over altitude (x) and beamwidth (y)."""
    fig, ax = _new_axes("altitude [km]", "beamwidth [deg]")
    h = np.asarray(h_km, dtype=float)
    psi = np.asarray(psi_deg, dtype=float)
    p = np.asarray(p_grid, dtype=float)
    mesh = ax.contourf(h, psi, p.T, levels=20, cmap="viridis")
    fig.colorbar(mesh, ax=ax, label="coverage probability")
    if curve:
        ch, cpsi = zip(*curve)
        ax.plot(ch, cpsi, "--", color="white", lw=1.5, label="best beamwidth")
    if optimum:
        ax.plot([optimum[0]], [optimum[1]], "x", color="red", ms=10, mew=2,
                label="joint optimum")
    ax.legend(loc="upper right")
    return _save(fig, path)


def plot_density_study(path, densities, optimized, baseline=None) -> str:
    fig, ax = _new_axes("device density [km$^{-2}$]", "coverage probability")
    ax.semilogx(densities, optimized, "-o", ms=4, color="tab:blue", label="optimized")
    if baseline is not None:
        ax.semilogx(densities, baseline, "--s", ms=4, color="tab:gray", label="baseline")
    ax.legend()
    return _save(fig, path)


def plot_validation(path, xlabel, values, analytic, empirical, ci) -> str:
    fig, ax = _new_axes(xlabel, "coverage probability")
    ax.plot(values, analytic, "-", color="tab:blue", label="model")
    ax.errorbar(values, empirical, yerr=ci, fmt="o", ms=4, color="tab:red",
                capsize=3, label="simulation")
    ax.legend()
    return _save(fig, path)


def plot_walker_compare(path, h_km, series: dict) -> str:
    """series maps a label to the optimal-beamwidth curve over h_km."""
    fig, ax = _new_axes("altitude [km]", "optimal beamwidth [deg]")
    styles = {"analytic": "-", "walker_delta": "--o", "walker_star": ":s"}
    for label, psis in series.items():
        ax.plot(h_km, psis, styles.get(label, "-"), ms=4, label=label)
    ax.legend()
    return _save(fig, path)
