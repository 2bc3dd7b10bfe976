"""Figure rendering for the CLI report paths.

每 command can drop a PNG next to its delimited output.  Figures use the Agg
backend so the CLI stays headless.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def _finish(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=140)
    plt.close(fig)
    return path


def approximation_figure(path, xs, fx, sx, Y, A, title):
    fig, (ax, axe) = plt.subplots(2, 1, figsize=(7.2, 5.6), sharex=True,
                                  height_ratios=[2.2, 1.0])
    ax.plot(xs, fx, lw=1.2, label="f")
    ax.plot(xs, sx, lw=1.0, ls="--", label="S")
    for y in Y:
        ax.axvline(y, color="tab:red", lw=0.6, alpha=0.6)
    for a in A:
        ax.axvline(a, color="tab:green", lw=0.6, alpha=0.6)
    ax.legend(loc="best", fontsize=8)
    ax.set_title(title, fontsize=10)
    err = np.abs(np.asarray(fx) - np.asarray(sx))
    axe.semilogy(xs, np.maximum(err, 1e-18), lw=0.8, color="tab:purple")
    axe.set_ylabel("|f - S|")
    axe.set_xlabel("x")
    return _finish(fig, path)


def verify_figure(path, ns, ratios, title):
    fig, ax = plt.subplots(figsize=(5.6, 4.0))
    ax.loglog(ns, ratios, "o-", lw=1.0)
    ax.set_xlabel("n")
    ax.set_ylabel("max interval ratio")
    ax.set_title(title, fontsize=10)
    ax.grid(True, which="both", lw=0.3, alpha=0.5)
    return _finish(fig, path)


def negative_figure(path, params, ratios, family, xlabel):
    fig, ax = plt.subplots(figsize=(5.6, 4.0))
    good = [(p, r) for p, r in zip(params, ratios) if r is not None and r > 0]
    if good:
        ps, rs = zip(*good)
        ax.loglog(ps, rs, "o-", lw=1.0)
    ax.set_xlabel(xlabel)
    ax.set_ylabel("E* / normalizer")
    ax.set_title(f"{family}: certified lower-bound ratios", fontsize=10)
    ax.grid(True, which="both", lw=0.3, alpha=0.5)
    return _finish(fig, path)


def kernels_figure(path, rows, title):
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    byn = {}
    for r in rows:
        byn.setdefault(r["n"], []).append(r)
    for n, rr in sorted(byn.items()):
        js = [r["j"] for r in rr]
        ax.semilogy(js, [r["max"] for r in rr], "-", lw=0.9, label=f"n={n} max")
        ax.semilogy(js, [r["min"] for r in rr], "--", lw=0.7, label=f"n={n} min")
    ax.axhline(1.0, color="k", lw=0.6)
    ax.axhline(4000.0, color="k", lw=0.6)
    ax.set_xlabel("j")
    ax.set_ylabel("kernel ratio")
    ax.set_title(title, fontsize=10)
    ax.legend(fontsize=7, ncols=2)
    return _finish(fig, path)
