"""Figure rendering for sweep results (written next to the CSV output)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

_MARKERS = ("o", "s", "^", "d", "v", "x")


def save_ber_figure(records, path) -> None:
    """Semilog BER vs SNR, one curve per detector label."""
    by_label: dict[str, list] = {}
    for rec in records:
        by_label.setdefault(rec.detector, []).append(rec)
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    for i, (label, recs) in enumerate(sorted(by_label.items())):
        recs = sorted(recs, key=lambda r: r.snr_db)
        snr = [r.snr_db for r in recs]
        ber = [max(r.ber, 1e-12) for r in recs]
        ax.semilogy(snr, ber, marker=_MARKERS[i % len(_MARKERS)], label=label)
    ax.set_xlabel("SNR (dB)")
    ax.set_ylabel("BER")
    ax.grid(True, which="both", alpha=0.4)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_epsilon_figure(records, path) -> None:
    """Two panels: BER and mean iteration count vs the DFE exit threshold."""
    recs = sorted(records, key=lambda r: r.epsilon)
    eps = [r.epsilon for r in recs]
    ber = [max(r.ber, 1e-12) for r in recs]
    iters = [r.mean_iters for r in recs]
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.0, 3.8))
    ax1.loglog(eps, ber, marker="o")
    ax1.set_xlabel("exit threshold")
    ax1.set_ylabel("BER")
    ax1.grid(True, which="both", alpha=0.4)
    ax2.semilogx(eps, iters, marker="s", color="tab:red")
    ax2.set_xlabel("exit threshold")
    ax2.set_ylabel("mean iterations")
    ax2.grid(True, which="both", alpha=0.4)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
