"""Doubly dispersive channel synthesis and time-domain application.

A realization is a set of P taps (complex gain, integer delay in samples,
real normalized Doppler nu = N*f). Gains default to CN(0, 1/P), a uniform
power-delay profile with unit expected energy, so linear SNR is 1/N0.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .daft import AfdmConfig


@dataclass(frozen=True)
class ChannelRealization:
    gains: np.ndarray      # complex, shape (P,)
    delays: np.ndarray     # int, shape (P,)
    dopplers: np.ndarray   # float, shape (P,), normalized to subcarrier spacing

    def __post_init__(self):
        object.__setattr__(self, "gains", np.asarray(self.gains, dtype=complex))
        object.__setattr__(self, "delays", np.asarray(self.delays, dtype=int))
        object.__setattr__(self, "dopplers", np.asarray(self.dopplers, dtype=float))
        if self.gains.size == 0:
            raise ValueError("channel needs at least one path")
        if not (self.gains.size == self.delays.size == self.dopplers.size):
            raise ValueError("gain, delay and Doppler lists must have equal length")
        if np.any(self.delays < 0):
            raise ValueError("path delays must be nonnegative")

    @property
    def n_paths(self) -> int:
        return self.gains.size

    @property
    def l_max(self) -> int:
        return int(self.delays.max())

    def is_integer_doppler(self) -> bool:
        return bool(np.all(self.dopplers == np.round(self.dopplers)))

    def to_json(self) -> str:
        """Structured text record for replay."""
        paths = [
            {"gain_re": float(g.real), "gain_im": float(g.imag),
             "delay": int(l), "doppler": float(nu)}
            for g, l, nu in zip(self.gains, self.delays, self.dopplers)
        ]
        return json.dumps({"paths": paths}, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "ChannelRealization":
        rec = json.loads(text)
        paths = rec["paths"]
        return cls(
            gains=np.array([p["gain_re"] + 1j * p["gain_im"] for p in paths]),
            delays=np.array([p["delay"] for p in paths]),
            dopplers=np.array([p["doppler"] for p in paths]),
        )


@dataclass(frozen=True)
class NoiseSpec:
    """Per-sample complex noise variance N0 with its dB bookkeeping."""

    n0: float
    snr_db: float = float("inf")
    seed: int = 0

    def __post_init__(self):
        if self.n0 < 0:
            raise ValueError("noise variance must be nonnegative")

    @classmethod
    def from_snr_db(cls, snr_db: float, seed: int = 0) -> "NoiseSpec":
        # Unit-energy constellation: N0 = Es / gamma = 10^(-snr/10).
        return cls(n0=10.0 ** (-snr_db / 10.0), snr_db=snr_db, seed=seed)

    @classmethod
    def off(cls) -> "NoiseSpec":
        return cls(n0=0.0, snr_db=float("inf"), seed=0)


def sample_jakes_doppler(nu_max: float, n_paths: int, delays, rng,
                         integer_doppler: bool = False) -> ChannelRealization:
    """Draw one realization with Jakes-distributed Doppler shifts.

    Each path gets nu_i = nu_max * cos(theta_i) with theta_i uniform on
    [-pi, pi] (rounded to the nearest integer when requested) and an
    independent CN(0, 1/P) gain. Delays are taken as given.

    Draw order (two rng calls): angles first, then gains.
    """
    delays = np.asarray(delays, dtype=int)
    if delays.size == 0:
        raise ValueError("channel needs at least one path delay")
    if n_paths != delays.size:
        raise ValueError(f"n_paths={n_paths} does not match {delays.size} delays")
    if nu_max < 0:
        raise ValueError("nu_max must be nonnegative")
    rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    theta = rng.uniform(-np.pi, np.pi, n_paths)
    nus = nu_max * np.cos(theta)
    if integer_doppler:
        nus = np.round(nus)
    raw = rng.standard_normal(2 * n_paths)
    gains = (raw[:n_paths] + 1j * raw[n_paths:]) * np.sqrt(1.0 / (2 * n_paths))
    return ChannelRealization(gains=gains, delays=delays, dopplers=nus)


def add_cpp(s, m: int, cfg: AfdmConfig) -> np.ndarray:
    """Prepend the chirp-periodic prefix of length m.

    Prefix samples follow s[n] = s[N+n] * exp(-2j*pi*c1*(N^2 + 2*N*n)) for
    n = -m..-1; with c1 = 0 this is the ordinary cyclic prefix.
    """
    if m < 0:
        raise ValueError("prefix length must be nonnegative")
    s = np.asarray(s, dtype=complex)
    if s.shape != (cfg.n,):
        raise ValueError(f"expected length-{cfg.n} frame, got {s.shape}")
    if m == 0:
        return s.copy()
    n_neg = np.arange(-m, 0)
    phase = np.exp(-2j * np.pi * cfg.c1 * (cfg.n**2 + 2 * cfg.n * n_neg))
    return np.concatenate([s[cfg.n + n_neg] * phase, s])


def apply_channel(s_cpp, ch: ChannelRealization, noise: NoiseSpec,
                  cfg: AfdmConfig, rng=None) -> np.ndarray:
    """Propagate a prefixed frame and return the N post-prefix samples.

    r[n] = sum_i h_i * exp(-2j*pi*(nu_i/N)*n) * s[n - l_i] + w[n] for
    n = 0..N-1, the delayed samples reaching back into the prefix.
    """
    s_cpp = np.asarray(s_cpp, dtype=complex)
    n = cfg.n
    m = s_cpp.size - n
    if m < 0:
        raise ValueError("input shorter than one frame")
    if ch.l_max > m:
        raise ValueError(f"path delay {ch.l_max} exceeds prefix length {m}")
    t = np.arange(n)
    r = np.zeros(n, dtype=complex)
    for h, l, nu in zip(ch.gains, ch.delays, ch.dopplers):
        r += h * np.exp(-2j * np.pi * (nu / n) * t) * s_cpp[m + t - l]
    if noise.n0 > 0:
        gen = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(
            noise.seed if rng is None else rng)
        w = gen.standard_normal(2 * n)
        r += np.sqrt(noise.n0 / 2) * (w[:n] + 1j * w[n:])
    return r


def time_domain_matrix(ch: ChannelRealization, cfg: AfdmConfig) -> np.ndarray:
    """N x N matrix H with r = H s for a prefixed-and-stripped frame.

    Delay taps that reach past the frame start fold back circularly and pick
    up the chirp-periodic prefix phase.
    """
    n = cfg.n
    h_mat = np.zeros((n, n), dtype=complex)
    t = np.arange(n)
    for h, l, nu in zip(ch.gains, ch.delays, ch.dopplers):
        row_gain = h * np.exp(-2j * np.pi * (nu / n) * t)
        cpp_phase = np.where(
            t < l, np.exp(-2j * np.pi * cfg.c1 * (n**2 + 2 * n * (t - l))), 1.0)
        h_mat[t, (t - l) % n] += row_gain * cpp_phase
    return h_mat
