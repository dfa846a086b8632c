"""Chirp-domain effective channel: exact build, closed-form sparse build,
column truncation, and the sparse index maps used by the MRC equalizer.

After zero padding, data column k of the truncated matrix is supported on
rows [k + Qg - Q, k + Qg]; no index wraps around. In integer-Doppler mode
every data column carries exactly P nonzero coefficients of magnitude |h_i|;
with fractional Doppler each path leaks into neighbouring rows and the maps
keep the (2*k_nu+1)*P strongest entries per column.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelRealization
from .daft import AfdmConfig, daft_matrix
from .framing import compute_guard_width


@dataclass(frozen=True)
class EffectiveChannel:
    """Truncated effective channel with its sparse access structure.

    dense        N x K matrix (K = N - guard_count data columns)
    q            band half-width: column k lives on rows [k+Qg-Q, k+Qg]
    l            retained coefficients per column
    q_map        (K, L) row index of each retained coefficient, ascending
    col_coef     (K, L) the matching matrix entries dense[q_map[k, i], k]
    d            (K,)   per-column retained energy sum_i |col_coef[k, i]|^2
    row_cols     per row, ascending data columns whose map points at it
    row_coefs    per row, the matching matrix entries
    data_start   first slot of the data range inside the full frame
    """

    dense: np.ndarray
    q: int
    guard_count: int
    l: int
    q_map: np.ndarray
    col_coef: np.ndarray
    d: np.ndarray
    row_cols: list = field(repr=False)
    row_coefs: list = field(repr=False)
    data_start: int

    @property
    def n(self) -> int:
        return self.dense.shape[0]

    @property
    def n_data(self) -> int:
        return self.dense.shape[1]

    def band_window(self, k: int) -> tuple[int, int]:
        """Inclusive row range of the band for data column k."""
        lo = max(0, k + self.guard_count - self.q)
        hi = min(self.n - 1, k + self.guard_count)
        return lo, hi


def build_exact(h_time: np.ndarray, cfg: AfdmConfig) -> np.ndarray:
    """Full-size effective channel A @ H @ A^H from a time-domain matrix."""
    h_time = np.asarray(h_time, dtype=complex)
    a = daft_matrix(cfg)
    return a @ h_time @ a.conj().T


def build_integer_sparse(ch: ChannelRealization, cfg: AfdmConfig) -> np.ndarray:
    """Closed-form effective channel for integer Doppler shifts.

    Requires 2*N*c1 to be an odd integer (the tuned chirp rate). Each path
    contributes one unit-magnitude phase per row, at column offset
    loc = (nu + 2*N*c1*delay) mod N.
    """
    n = cfg.n
    two_nc1 = 2 * n * cfg.c1
    if abs(two_nc1 - round(two_nc1)) > 1e-9:
        raise ValueError("closed-form build needs c1 tuned so 2*N*c1 is integer")
    two_nc1 = int(round(two_nc1))
    if not ch.is_integer_doppler():
        raise ValueError("closed-form build requires integer Doppler shifts")
    h_eff = np.zeros((n, n), dtype=complex)
    p = np.arange(n)
    pf = p.astype(float)
    for h, l, nu in zip(ch.gains, ch.delays, ch.dopplers):
        loc = (int(round(nu)) + two_nc1 * int(l)) % n
        q = (p + loc) % n
        qf = q.astype(float)
        phase = np.exp(1j * (2 * np.pi / n)
                       * (n * cfg.c1 * l * l - qf * l + n * cfg.c2 * (qf**2 - pf**2)))
        h_eff[p, q] += h * phase
    return h_eff


def truncate_and_index(h_eff: np.ndarray, guard_count: int, cfg: AfdmConfig,
                       n_paths: int, l_max: int | None = None) -> EffectiveChannel:
    """Drop guard columns and compute the sparse maps and column energies.

    The retained support per column is the L = (2*k_nu+1)*n_paths strongest
    entries (ties broken toward the lower row); row maps are the transpose
    adjacency of the column maps so both sides index the same coefficients.
    """
    h_eff = np.asarray(h_eff, dtype=complex)
    n = cfg.n
    if h_eff.shape != (n, n):
        raise ValueError(f"expected {n} x {n} effective channel, got {h_eff.shape}")
    span = cfg.doppler_span
    if l_max is not None:
        q_min = compute_guard_width(l_max, cfg)
        if guard_count < q_min:
            raise ValueError(
                f"guard count {guard_count} is below the required width {q_min}")
        band = q_min
    else:
        band = guard_count
    start = guard_count - span
    stop = n - span
    if start < 0:
        raise ValueError("guard count too small for the Doppler span")
    dense = h_eff[:, start:stop].copy()
    k_data = dense.shape[1]
    l_keep = (2 * cfg.k_nu + 1) * n_paths
    if l_keep > n:
        raise ValueError("retained support exceeds the frame length")

    # stable sort on (-magnitude) keeps the lower row on ties
    mags = np.abs(dense)
    q_map = np.sort(np.argsort(-mags, axis=0, kind="stable")[:l_keep], axis=0).T
    q_map = np.ascontiguousarray(q_map, dtype=np.int64)
    col_coef = dense[q_map, np.arange(k_data)[:, None]]
    d = np.sum(np.abs(col_coef) ** 2, axis=1)
    if np.any(d == 0):
        raise ValueError("degenerate channel: a data column has no energy")

    # transpose adjacency: for each row, the data columns that map to it
    rows_flat = q_map.ravel()
    cols_flat = np.repeat(np.arange(k_data, dtype=np.int64), l_keep)
    order = np.argsort(rows_flat, kind="stable")
    sorted_rows = rows_flat[order]
    sorted_cols = cols_flat[order]
    splits = np.cumsum(np.bincount(sorted_rows, minlength=n))[:-1]
    row_cols = np.split(sorted_cols, splits)
    row_coefs = np.split(dense[sorted_rows, sorted_cols], splits)

    dense.setflags(write=False)
    return EffectiveChannel(dense=dense, q=band, guard_count=guard_count,
                            l=l_keep, q_map=q_map, col_coef=col_coef, d=d,
                            row_cols=row_cols, row_coefs=row_coefs,
                            data_start=start)


def build_effective(ch: ChannelRealization, cfg: AfdmConfig,
                    guard_count: int | None = None,
                    check_guard: bool = True) -> EffectiveChannel:
    """Build the full effective channel for a realization and truncate it.

    Integer-Doppler realizations with a tuned c1 use the closed form;
    anything else goes through the exact A H A^H product. check_guard=False
    skips the minimum-width validation (used for the unguarded OFDM
    degenerate, where the full matrix is kept and wrap-around is fine).
    """
    from .channel import time_domain_matrix

    if guard_count is None:
        guard_count = compute_guard_width(ch.l_max, cfg)
    two_nc1 = 2 * cfg.n * cfg.c1
    closed_form = ch.is_integer_doppler() and abs(two_nc1 - round(two_nc1)) < 1e-9 \
        and int(round(two_nc1)) % 2 == 1
    if closed_form:
        h_eff = build_integer_sparse(ch, cfg)
    else:
        h_eff = build_exact(time_domain_matrix(ch, cfg), cfg)
    return truncate_and_index(h_eff, guard_count, cfg, ch.n_paths,
                              l_max=ch.l_max if check_guard else None)
