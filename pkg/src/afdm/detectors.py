"""Equalizers: exact LMMSE, band-LDL MMSE, weighted-MRC iterative DFE,
and an exhaustive ML reference for tiny frames.

The band solver factors M = Hu Hu^H + N0 I through its band structure; the
DFE sweeps the data symbols in ascending order, cancelling interference with
current-sweep estimates for already-updated symbols and previous-sweep
estimates for the rest, then combines each symbol's received copies with
conjugate weights and the 1/gamma regularizer.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bandmat import OpCounter, band_gram, ldl_band, solve_band
from .effective import EffectiveChannel
from .framing import qam_constellation


@dataclass(frozen=True)
class DetectorResult:
    xhat: np.ndarray
    iterations: int
    converged: bool
    ops: OpCounter


@dataclass(frozen=True)
class DfeConfig:
    """Iteration controls for the MRC-based DFE."""

    n_iter_max: int = 25
    epsilon: float = 0.01
    hard_decision: bool = False
    constellation: np.ndarray | None = None  # used only for hard decisions

    def __post_init__(self):
        if self.n_iter_max < 1:
            raise ValueError("n_iter_max must be at least 1")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")

    def points(self) -> np.ndarray:
        if self.constellation is not None:
            return np.asarray(self.constellation, dtype=complex)
        return qam_constellation(4)


def lmmse_exact(eff: EffectiveChannel, y, n0: float) -> DetectorResult:
    """Dense-solve reference: xhat = Hu^H (Hu Hu^H + n0 I)^-1 y."""
    if n0 < 0:
        raise ValueError("noise variance must be nonnegative")
    y = np.asarray(y, dtype=complex)
    hu = eff.dense
    m = hu @ hu.conj().T
    m[np.diag_indices_from(m)] += n0
    xhat = hu.conj().T @ np.linalg.solve(m, y)
    return DetectorResult(xhat=xhat, iterations=1, converged=True, ops=OpCounter())


def lmmse_band(eff: EffectiveChannel, y, n0: float,
               counter: OpCounter | None = None) -> DetectorResult:
    """Band-LDL MMSE: gram, factor, three band substitutions, re-spread.

    Exact (to rounding) whenever the truncated channel is exactly banded;
    with fractional Doppler the out-of-band leakage is simply dropped.
    """
    ops = OpCounter()
    y = np.asarray(y, dtype=complex)
    m = band_gram(eff, n0, ops)
    fact = ldl_band(m, ops)
    dvec = solve_band(fact, y, ops)
    k_data = eff.n_data
    xhat = np.empty(k_data, dtype=complex)
    for k in range(k_data):
        lo, hi = eff.band_window(k)
        xhat[k] = np.conj(eff.dense[lo:hi + 1, k]) @ dvec[lo:hi + 1]
        ops.add(cm=hi - lo + 1, ca=hi - lo)
    if counter is not None:
        counter.merge(ops)
    return DetectorResult(xhat=xhat, iterations=1, converged=True, ops=ops)


def _sweep_op_costs(eff: EffectiveChannel) -> tuple[int, int, int]:
    # per-sweep complex op tallies of the literal cancellation loops
    row_len = np.array([len(c) for c in eff.row_cols])
    cancel = int(np.sum(row_len[eff.q_map] - 1))
    k_data, l = eff.q_map.shape
    cm = cancel + k_data * l
    ca = cancel + k_data * (l - 1)
    cd = k_data
    return cm, ca, cd


def mrc_dfe(eff: EffectiveChannel, y, gamma: float,
            cfg: DfeConfig | None = None, counter: OpCounter | None = None,
            x0=None, delta_log: list | None = None) -> DetectorResult:
    """Weighted-MRC decision feedback equalizer (reference implementation).

    gamma is the linear per-symbol SNR; the combiner output for symbol k is
    c_k = g_k / (d_k + 1/gamma). Stops when the Euclidean change of the
    estimate vector drops below cfg.epsilon or after cfg.n_iter_max sweeps.
    When delta_log is given, the per-sweep change norms are appended to it.
    """
    cfg = cfg or DfeConfig()
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    if np.any(eff.d <= 0):
        raise ValueError("degenerate channel: zero-energy data column")
    y = np.asarray(y, dtype=complex)
    k_data, l = eff.q_map.shape
    ops = OpCounter()
    denom = eff.d + 1.0 / gamma
    ops.add(ca=k_data)
    points = cfg.points() if cfg.hard_decision else None

    xhat = np.zeros(k_data, dtype=complex) if x0 is None \
        else np.asarray(x0, dtype=complex).copy()
    q_map = eff.q_map
    col_conj = np.conj(eff.col_coef)
    row_cols = eff.row_cols
    row_coefs = eff.row_coefs
    cm_sweep, ca_sweep, cd_sweep = _sweep_op_costs(eff)

    iterations = 0
    converged = False
    for n in range(1, cfg.n_iter_max + 1):
        prev = xhat.copy()
        for k in range(k_data):
            g = 0.0 + 0.0j
            for i in range(l):
                q = q_map[k, i]
                b = y[q]
                cols = row_cols[q]
                coefs = row_coefs[q]
                for j in range(len(cols)):
                    p = cols[j]
                    if p != k:
                        b -= coefs[j] * xhat[p]
                g += col_conj[k, i] * b
            c = g / denom[k]
            if points is not None:
                c = points[np.argmin(np.abs(points - c))]
            xhat[k] = c
        ops.add(cm=cm_sweep, ca=ca_sweep, cd=cd_sweep)
        iterations = n
        delta = float(np.linalg.norm(xhat - prev))
        if delta_log is not None:
            delta_log.append(delta)
        if delta < cfg.epsilon:
            converged = True
            break
    if counter is not None:
        counter.merge(ops)
    return DetectorResult(xhat=xhat, iterations=iterations, converged=converged,
                          ops=ops)


def _batch_tensors(eff: EffectiveChannel, width: int):
    k_data, l = eff.q_map.shape
    bcoef = np.zeros((k_data, l, width), dtype=complex)
    bidx = np.zeros((k_data, l, width), dtype=np.int64)
    for k in range(k_data):
        for i in range(l):
            q = eff.q_map[k, i]
            cols = eff.row_cols[q]
            coefs = eff.row_coefs[q].copy()
            coefs[cols == k] = 0.0  # own symbol is excluded from cancellation
            bcoef[k, i, :len(cols)] = coefs
            bidx[k, i, :len(cols)] = cols
    return bcoef, bidx


def mrc_dfe_batch(effs: list[EffectiveChannel], ys, gamma: float,
                  cfg: DfeConfig | None = None) -> list[DetectorResult]:
    """Run the MRC-DFE on a batch of frames in lockstep.

    Arithmetic per frame matches `mrc_dfe` (same update order, same exit
    rule); frames that converge are frozen while the rest keep sweeping.
    All frames must share the data length and retained-support size.
    """
    cfg = cfg or DfeConfig()
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    n_frames = len(effs)
    if n_frames == 0:
        return []
    k_data, l = effs[0].q_map.shape
    if any(e.q_map.shape != (k_data, l) for e in effs):
        raise ValueError("batch frames must share data length and support size")
    width = max(max((len(c) for c in e.row_cols), default=1) for e in effs)
    width = max(width, 1)

    yq = np.empty((n_frames, k_data, l), dtype=complex)
    ccj = np.empty((n_frames, k_data, l), dtype=complex)
    den = np.empty((n_frames, k_data))
    bcoef = np.empty((n_frames, k_data, l, width), dtype=complex)
    bidx = np.empty((n_frames, k_data, l, width), dtype=np.int64)
    sweep_costs = []
    for f, (e, y) in enumerate(zip(effs, ys)):
        if np.any(e.d <= 0):
            raise ValueError("degenerate channel: zero-energy data column")
        y = np.asarray(y, dtype=complex)
        yq[f] = y[e.q_map]
        ccj[f] = np.conj(e.col_coef)
        den[f] = e.d + 1.0 / gamma
        bcoef[f], bidx[f] = _batch_tensors(e, width)
        sweep_costs.append(_sweep_op_costs(e))

    points = cfg.points() if cfg.hard_decision else None
    xhat = np.zeros((n_frames, k_data), dtype=complex)
    active = np.ones(n_frames, dtype=bool)
    iterations = np.full(n_frames, cfg.n_iter_max, dtype=int)
    converged = np.zeros(n_frames, dtype=bool)
    frame_idx = np.arange(n_frames)[:, None, None]

    for n in range(1, cfg.n_iter_max + 1):
        prev = xhat.copy()
        for k in range(k_data):
            gathered = xhat[frame_idx, bidx[:, k]]
            b = yq[:, k] - np.einsum("flw,flw->fl", bcoef[:, k], gathered)
            g = np.einsum("fl,fl->f", ccj[:, k], b)
            c = g / den[:, k]
            if points is not None:
                c = points[np.argmin(np.abs(points[None, :] - c[:, None]), axis=1)]
            xhat[:, k] = np.where(active, c, xhat[:, k])
        delta = np.linalg.norm(xhat - prev, axis=1)
        newly = active & (delta < cfg.epsilon)
        iterations[newly] = n
        converged[newly] = True
        active &= ~newly
        if not active.any():
            break

    results = []
    for f in range(n_frames):
        ops = OpCounter()
        ops.add(ca=k_data)
        cm, ca, cd = sweep_costs[f]
        sweeps = int(iterations[f])
        ops.add(cm=cm * sweeps, ca=ca * sweeps, cd=cd * sweeps)
        results.append(DetectorResult(
            xhat=xhat[f].copy(), iterations=sweeps,
            converged=bool(converged[f]), ops=ops))
    return results


def ml_detect(eff: EffectiveChannel, y, alphabet,
              max_search_bits: int = 16) -> DetectorResult:
    """Exhaustive minimum-distance search over all symbol vectors.

    Refuses frames where data_length * log2(|alphabet|) exceeds the search
    budget; intended as a tiny-frame reference only.
    """
    alphabet = np.asarray(alphabet, dtype=complex)
    y = np.asarray(y, dtype=complex)
    k_data = eff.n_data
    bits = k_data * np.log2(len(alphabet))
    if bits > max_search_bits:
        raise ValueError(
            f"search space of {bits:.0f} bits exceeds the {max_search_bits}-bit budget")
    n_a = len(alphabet)
    n_cand = n_a**k_data
    idx = np.arange(n_cand)
    digits = (idx[:, None] // n_a ** np.arange(k_data - 1, -1, -1)[None, :]) % n_a
    cand = alphabet[digits]                      # (n_cand, K)
    resid = y[:, None] - eff.dense @ cand.T      # (N, n_cand)
    best = int(np.argmin(np.sum(np.abs(resid) ** 2, axis=0)))
    return DetectorResult(xhat=cand[best].copy(), iterations=1, converged=True,
                          ops=OpCounter())
