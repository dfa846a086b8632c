"""QAM mapping and null-guarded frame assembly.

A frame of N chirp-domain slots carries N - Qg data symbols placed on the
contiguous index range [Qg - span, N - span - 1], span = alpha_max + k_nu.
The Qg remaining slots are exact zeros; they confine the truncated effective
channel to a band and remove the circular wrap of the input-output relation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .daft import AfdmConfig


def compute_guard_width(l_max: int, cfg: AfdmConfig) -> int:
    """Minimum number of null symbols for a channel with max delay l_max."""
    if l_max < 0:
        raise ValueError("l_max must be nonnegative")
    if l_max >= cfg.n:
        raise ValueError(f"channel delay {l_max} must be < frame length {cfg.n}")
    return (l_max + 1) * (2 * cfg.doppler_span + 1) - 1


def _gray_levels(bits_per_axis: int) -> np.ndarray:
    # Gray-labelled amplitude levels, index = bit pattern on one axis.
    m = 1 << bits_per_axis
    levels = np.empty(m)
    for code in range(m):
        gray = code ^ (code >> 1)
        levels[gray] = 2 * code - (m - 1)
    return levels


def qam_constellation(order: int = 4) -> np.ndarray:
    """Unit-energy square QAM points indexed by their Gray bit label.

    For order 4 the mapping is fixed: bits 00 -> (+1+1j)/sqrt(2), first bit
    selects the real sign, second bit the imaginary sign (0 means +).
    """
    bits_per_symbol = int(round(np.log2(order)))
    if 2**bits_per_symbol != order or bits_per_symbol % 2 != 0:
        raise ValueError(f"order must be an even power of two, got {order}")
    half = bits_per_symbol // 2
    axis = _gray_levels(half)
    # index = (real bits) * 2^half + (imag bits); axis level 0 maps to +
    re = np.repeat(-axis, len(axis))
    im = np.tile(-axis, len(axis))
    points = (re + 1j * im) / np.sqrt(2 * (4**half - 1) / 3)
    return points


def qam_map(bits, order: int = 4) -> np.ndarray:
    """Map a 0/1 sequence to Gray-coded unit-energy QAM symbols."""
    bits = np.asarray(bits, dtype=int).ravel()
    bps = int(round(np.log2(order)))
    if bits.size % bps != 0:
        raise ValueError(f"bit count {bits.size} not divisible by {bps}")
    if np.any((bits != 0) & (bits != 1)):
        raise ValueError("bits must be 0 or 1")
    idx = bits.reshape(-1, bps) @ (1 << np.arange(bps - 1, -1, -1))
    return qam_constellation(order)[idx]


def qam_demap(symbols, order: int = 4) -> np.ndarray:
    """Nearest-point hard decision back to bits."""
    symbols = np.asarray(symbols, dtype=complex).ravel()
    points = qam_constellation(order)
    idx = np.argmin(np.abs(symbols[:, None] - points[None, :]), axis=1)
    bps = int(round(np.log2(order)))
    shifts = np.arange(bps - 1, -1, -1)
    return ((idx[:, None] >> shifts[None, :]) & 1).ravel()


@dataclass(frozen=True)
class Frame:
    """One chirp-domain frame: data symbols embedded among null guards."""

    data_symbols: np.ndarray
    guard_count: int
    full_vector: np.ndarray
    data_start: int
    data_stop: int  # exclusive

    @property
    def data_index_range(self) -> tuple[int, int]:
        """Inclusive index interval occupied by data symbols."""
        return (self.data_start, self.data_stop - 1)


def assemble_frame(data, n: int, guard_count: int, cfg: AfdmConfig,
                   l_max: int | None = None) -> Frame:
    """Place data on the guarded slot range of a length-n frame.

    When l_max is given, guard_count is checked against the minimum width
    required by that channel.
    """
    data = np.asarray(data, dtype=complex).ravel()
    if guard_count < 0 or guard_count >= n:
        raise ValueError(f"guard count {guard_count} out of range for n={n}")
    if l_max is not None:
        q_min = compute_guard_width(l_max, cfg)
        if guard_count < q_min:
            raise ValueError(
                f"guard count {guard_count} is below the required width {q_min}")
    span = cfg.doppler_span
    start = guard_count - span
    stop = n - span
    if start < 0:
        raise ValueError(
            f"guard count {guard_count} too small for Doppler span {span}")
    if data.size != n - guard_count:
        raise ValueError(f"expected {n - guard_count} data symbols, got {data.size}")
    full = np.zeros(n, dtype=complex)
    full[start:stop] = data
    return Frame(data_symbols=data, guard_count=guard_count, full_vector=full,
                 data_start=start, data_stop=stop)


def extract_data(vec, frame: Frame) -> np.ndarray:
    """Pull the data positions back out of a full-length frame vector."""
    vec = np.asarray(vec, dtype=complex).ravel()
    if vec.size != frame.full_vector.size:
        raise ValueError("vector length does not match the frame")
    return vec[frame.data_start:frame.data_stop]


def truncation_matrix(n: int, guard_count: int, cfg: AfdmConfig) -> np.ndarray:
    """Row-selection matrix T with x_data = T @ x_full."""
    span = cfg.doppler_span
    start = guard_count - span
    stop = n - span
    if start < 0:
        raise ValueError("guard count too small for the Doppler span")
    return np.eye(n)[start:stop, :]
