"""Figures written next to the CSV/JSON reports."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from zkfl.metrics import RoundReport  # noqa: E402

_STYLE = {
    "figure.figsize": (6.0, 3.6),
    "axes.spines.top": False,
    "axes.spines.right": False,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "font.size": 9,
    "legend.fontsize": 8,
    "savefig.dpi": 120,
}


def _save(fig, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def plot_timings(reports: Sequence[RoundReport], path: Path) -> Path:
    """Stacked per-round cost terms in milliseconds."""
    cols = [
        ("t_train", "train"),
        ("t_enc", "enc"),
        ("t_aggr", "aggr"),
        ("t_prove", "prove"),
        ("t_verify_client", "verify (client)"),
        ("t_verify_miner", "verify (miner)"),
        ("t_chain_read", "chain read"),
    ]
    rounds = [r.round for r in reports]
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        bottom = [0.0] * len(reports)
        for col, label in cols:
            vals = [1e3 * (getattr(r, col) or 0.0) for r in reports]
            if not any(vals):
                continue
            ax.bar(rounds, vals, bottom=bottom, label=label, width=0.8)
            bottom = [b + v for b, v in zip(bottom, vals)]
        ax.set_xlabel("round")
        ax.set_ylabel("time (ms)")
        ax.legend(loc="upper right", ncol=2)
        return _save(fig, Path(path))


def plot_accuracy(reports: Sequence[RoundReport], path: Path) -> Path:
    rounds = [r.round for r in reports]
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        ax.plot(rounds, [r.accuracy for r in reports], marker="o", ms=3, label="test accuracy")
        ax.set_xlabel("round")
        ax.set_ylabel("accuracy")
        ax2 = ax.twinx()
        ax2.plot(rounds, [r.loss for r in reports], color="tab:red", ls="--", label="test loss")
        ax2.set_ylabel("loss")
        ax2.grid(False)
        halted = [r.round for r in reports if r.outcome != "verified"]
        for h in halted:
            ax.axvline(h, color="k", lw=0.8, ls=":")
        return _save(fig, Path(path))


def plot_sizes(rows: Sequence[dict], path: Path) -> Path:
    """Encrypted-update and proof size against model dimension (log-log)."""
    ds = [r["d"] for r in rows]
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        ax.loglog(ds, [r["bytes_plain_update"] for r in rows], marker="s", label="plain update")
        ax.loglog(ds, [r["bytes_enc_update"] for r in rows], marker="o", label="Enc(w_i)")
        ax.loglog(ds, [r["bytes_proof"] for r in rows], marker="^", label="proof")
        ax.set_xlabel("model dimension d")
        ax.set_ylabel("bytes")
        ax.legend()
        return _save(fig, Path(path))
