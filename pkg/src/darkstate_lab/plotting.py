"""SVG figures regenerated from the CSV outputs only."""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

plt.rcParams["svg.hashsalt"] = "darkstate-lab"

CLASS_COLORS = {"dark": "tab:blue", "bright": "gold", "faint": "tab:green"}


def read_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def _save(fig, path):
    fig.savefig(path, format="svg", metadata={"Date": None, "Creator": None})
    plt.close(fig)


def _cls(label: str) -> str:
    return "faint" if label.startswith("faint") else label


def plot_spectrum(csv_path, svg_path, omega: float, half_filling: float | None = None):
    rows = read_csv(csv_path)
    fig, ax = plt.subplots(figsize=(4.5, 5))
    scale = omega if omega else 1.0
    for cls, color in CLASS_COLORS.items():
        pts = [r for r in rows if _cls(r["class"]) == cls]
        ax.scatter([float(r["decay_rate"]) for r in pts], [float(r["re_lambda"]) / scale for r in pts],
                   s=18, color=color, label=cls, edgecolors="k", linewidths=0.3)
    if half_filling is not None:
        ax.axhline(half_filling, color="r", ls="--", lw=1, label="half filling")
    ax.set_xlabel(r"$\Gamma/\gamma$")
    ax.set_ylabel(r"$E_n/\omega$" if omega else r"$E_n/\gamma$")
    ax.legend(fontsize=7, loc="upper right")
    fig.tight_layout()
    _save(fig, svg_path)


def plot_sweep(csv_path, svg_path, ep_csv=None):
    rows = read_csv(csv_path)
    branches = sorted({int(r["branch_id"]) for r in rows})
    fig, (ax_re, ax_im) = plt.subplots(2, 1, figsize=(5, 6), sharex=True)
    for b in branches:
        pts = [r for r in rows if int(r["branch_id"]) == b]
        u = [float(r["u"]) for r in pts]
        label = pts[0]["class"]
        ax_re.plot(u, [float(r["re_lambda"]) for r in pts], lw=1.2, label=f"{b}: {label}")
        ax_im.plot(u, [float(r["im_lambda"]) for r in pts], lw=1.2)
    if ep_csv is not None and Path(ep_csv).exists():
        for r in read_csv(ep_csv):
            for ax in (ax_re, ax_im):
                ax.axvline(float(r["u"]), color="k", ls=":", lw=1)
    ax_re.set_ylabel(r"Re $\lambda/\gamma$")
    ax_im.set_ylabel(r"Im $\lambda/\gamma$")
    ax_im.set_xlabel(r"$U/\gamma$")
    ax_re.legend(fontsize=7)
    fig.tight_layout()
    _save(fig, svg_path)


def plot_perturb(csv_path, svg_path):
    rows = read_csv(csv_path)
    fig, (ax_re, ax_im) = plt.subplots(2, 1, figsize=(5, 6), sharex=True)
    for n in sorted({int(r["N"]) for r in rows}):
        pts = [r for r in rows if int(r["N"]) == n]
        u = [float(r["u"]) for r in pts]
        line = ax_re.plot(u, [float(r["re_numeric_shift"]) for r in pts], ".", ms=3, label=f"N={n}")[0]
        ax_re.plot(u, [float(r["re_correction"]) for r in pts], "x", ms=3, color=line.get_color())
        ax_im.plot(u, [float(r["im_numeric_shift"]) for r in pts], ".", ms=3, color=line.get_color())
        ax_im.plot(u, [float(r["im_correction"]) for r in pts], "x", ms=3, color=line.get_color())
    ax_re.set_ylabel(r"Re shift$/\gamma$")
    ax_im.set_ylabel(r"Im shift$/\gamma$")
    ax_im.set_xlabel(r"$U/\gamma$")
    ax_re.legend(fontsize=7, ncol=2)
    fig.tight_layout()
    _save(fig, svg_path)


def plot_evolve(csv_paths: dict, svg_path):
    fig, (ax_p, ax_i) = plt.subplots(2, 1, figsize=(5, 6), sharex=True)
    styles = {"numerical": ("tab:red", "-"), "perturbative": ("tab:blue", ":")}
    for name, path in csv_paths.items():
        rows = read_csv(path)
        color, ls = styles.get(name, ("k", "-"))
        t = [float(r["t"]) for r in rows]
        ax_p.plot(t, [float(r["pop_ground"]) for r in rows], color=color, ls=ls, label=f"{name} ground")
        manifold_cols = [k for k in rows[0] if k.startswith("pop_manifold_")]
        top = max(manifold_cols, key=lambda k: max(float(r[k]) for r in rows[:1]))
        ax_p.plot(t, [float(r[top]) for r in rows], color=color, ls=ls, alpha=0.6, label=f"{name} initial")
        ax_i.plot(t, [float(r["intensity"]) for r in rows], color=color, ls=ls, label=name)
    ax_p.set_ylabel("population")
    ax_i.set_ylabel(r"$\langle I\rangle/\gamma$")
    ax_i.set_xlabel(r"$\gamma t$")
    ax_p.legend(fontsize=7)
    ax_i.legend(fontsize=7)
    fig.tight_layout()
    _save(fig, svg_path)
