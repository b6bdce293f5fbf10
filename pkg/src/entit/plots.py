"""Self-contained SVG figures for the separability scan and recovery curves."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

THRESHOLD = 0.5

# reproducible SVG ids, no timestamps
plt.rcParams["svg.hashsalt"] = "entit"
plt.rcParams["svg.fonttype"] = "path"


def fig2(table, r: float):
    fig, ax = plt.subplots(figsize=(5, 3.6))
    ax.plot(table[:, 0], table[:, 1], "-", color="k", label=r"$\varrho^{(12)}$", gid="kappa12")
    ax.plot(table[:, 0], table[:, 2], "--", color="k", label=r"$\varrho^{(13)}$", gid="kappa13")
    ax.axhline(THRESHOLD, ls=":", color="0.4", gid="threshold")
    ax.set_xlabel(r"$x = s/r$")
    ax.set_ylabel(r"$\tilde\kappa_-$")
    ax.set_title(f"r = {r:g}, balanced beam splitters")
    ax.set_xlim(-1, 1)
    ax.legend(frameon=False)
    fig.tight_layout()
    return fig


_STYLES = ("-", "--", "-.", ":")


def fig3(curves: dict, r: float):
    """``curves`` maps gamma -> table of (s, E_f, purity)."""
    fig, ax = plt.subplots(figsize=(5, 3.6))
    inset = ax.inset_axes([0.58, 0.12, 0.38, 0.38])
    for i, (gamma, tab) in enumerate(curves.items()):
        ls = _STYLES[i % len(_STYLES)]
        ax.plot(tab[:, 0], tab[:, 1], ls, color="k", label=rf"$\Gamma={gamma:g}$", gid=f"ef-{gamma:g}")
        inset.plot(tab[:, 0], tab[:, 2], ls, color="k", gid=f"purity-{gamma:g}")
    ax.axvline(r, color="0.7", lw=0.8)
    ax.set_xlabel(r"$s$")
    ax.set_ylabel(r"$E_f$")
    inset.set_xlabel(r"$s$", fontsize=7)
    inset.set_ylabel(r"$\mu$", fontsize=7)
    inset.tick_params(labelsize=6)
    ax.legend(frameon=False, loc="upper left")
    fig.tight_layout()
    return fig


def save_svg(fig, path) -> None:
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
