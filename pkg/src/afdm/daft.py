"""Discrete affine Fourier transform (DAFT) and AFDM waveform parameters.

The DAFT matrix is A = Lambda_c2 @ F @ Lambda_c1 with F the unitary DFT
matrix and Lambda_c = diag(exp(-2j*pi*c*n^2)). Both transform directions
use the 1/sqrt(N) scaling so that A is unitary and idaft == daft^-1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np


@dataclass(frozen=True)
class AfdmConfig:
    """Waveform parameters: frame length and the two chirp rates.

    c1 controls the delay-Doppler placement of the effective channel and is
    normally set with `tuned()`. c2 must stay well below 1/(2N); the default
    is 1/(2N^2).
    """

    n: int
    c1: float
    c2: float
    nu_max: float = 0.0
    k_nu: int = 0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"frame length must be >= 2, got {self.n}")
        if not 0.0 <= self.c2 < 1.0 / (2 * self.n):
            raise ValueError(f"c2 must lie in [0, 1/(2N)), got {self.c2}")
        if self.nu_max < 0:
            raise ValueError("nu_max must be nonnegative")
        if self.k_nu < 0:
            raise ValueError("k_nu must be nonnegative")

    @property
    def alpha_max(self) -> int:
        """Integer part of the maximum normalized Doppler shift."""
        return int(math.floor(self.nu_max))

    @property
    def doppler_span(self) -> int:
        """Per-path Doppler extent alpha_max + k_nu used for guard sizing."""
        return self.alpha_max + self.k_nu

    @classmethod
    def tuned(cls, n: int, nu_max: float, k_nu: int = 0, c2: float | None = None) -> "AfdmConfig":
        """Config with c1 = (2*(floor(nu_max)+k_nu)+1) / (2N).

        With k_nu = 0 and integer nu_max this is the integer-Doppler tuning;
        k_nu > 0 widens the chirp rate to absorb fractional Doppler leakage.
        """
        alpha = int(math.floor(nu_max))
        c1 = (2 * (alpha + k_nu) + 1) / (2 * n)
        if c2 is None:
            c2 = 1.0 / (2 * n * n)
        return cls(n=n, c1=c1, c2=c2, nu_max=nu_max, k_nu=k_nu)

    @classmethod
    def ofdm(cls, n: int) -> "AfdmConfig":
        """Degenerate c1 = c2 = 0 config; the DAFT collapses to the DFT."""
        return cls(n=n, c1=0.0, c2=0.0, nu_max=0.0, k_nu=0)


@lru_cache(maxsize=16)
def _daft_matrix(n: int, c1: float, c2: float) -> np.ndarray:
    idx = np.arange(n)
    f = np.exp(-2j * np.pi * np.outer(idx, idx) / n) / np.sqrt(n)
    lam1 = np.exp(-2j * np.pi * c1 * idx.astype(float) ** 2)
    lam2 = np.exp(-2j * np.pi * c2 * idx.astype(float) ** 2)
    a = lam2[:, None] * f * lam1[None, :]
    a.setflags(write=False)
    return a


def daft_matrix(cfg: AfdmConfig) -> np.ndarray:
    """Return the N x N unitary DAFT matrix (read-only, cached per config)."""
    return _daft_matrix(cfg.n, cfg.c1, cfg.c2)


def _check_length(x: np.ndarray, n: int) -> np.ndarray:
    x = np.asarray(x, dtype=complex)
    if x.shape != (n,):
        raise ValueError(f"expected vector of length {n}, got shape {x.shape}")
    return x


def daft(r, cfg: AfdmConfig, method: str = "matrix") -> np.ndarray:
    """Forward transform y = A r (time samples to chirp-domain symbols)."""
    r = _check_length(r, cfg.n)
    if method == "matrix":
        return daft_matrix(cfg) @ r
    if method == "fft":
        idx = np.arange(cfg.n, dtype=float)
        pre = np.exp(-2j * np.pi * cfg.c1 * idx**2)
        post = np.exp(-2j * np.pi * cfg.c2 * idx**2)
        return post * (np.fft.fft(pre * r) / np.sqrt(cfg.n))
    raise ValueError(f"unknown method {method!r}")


def idaft(x, cfg: AfdmConfig, method: str = "matrix") -> np.ndarray:
    """Inverse transform s = A^H x (chirp-domain symbols to time samples)."""
    x = _check_length(x, cfg.n)
    if method == "matrix":
        return daft_matrix(cfg).conj().T @ x
    if method == "fft":
        idx = np.arange(cfg.n, dtype=float)
        pre = np.exp(2j * np.pi * cfg.c2 * idx**2)
        post = np.exp(2j * np.pi * cfg.c1 * idx**2)
        return post * (np.fft.ifft(pre * x) * np.sqrt(cfg.n))
    raise ValueError(f"unknown method {method!r}")
