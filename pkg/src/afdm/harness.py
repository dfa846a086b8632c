"""Monte-Carlo BER experiments: configuration, frame pipeline, sweeps,
and delimited-output records.

Reproducibility contract: every frame derives its generators from
(master seed, point index, frame index) plus a fixed stream tag, so a rerun
with the same config is bit-identical and all detector arms and the OFDM
baseline see the same channel and noise draws at each point.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace

import numpy as np

from .channel import NoiseSpec, add_cpp, apply_channel, sample_jakes_doppler
from .daft import AfdmConfig, daft, idaft
from .detectors import (DetectorResult, DfeConfig, lmmse_band, lmmse_exact,
                        ml_detect, mrc_dfe_batch)
from .effective import build_effective
from .framing import assemble_frame, compute_guard_width, qam_constellation, qam_demap, qam_map

_DETECTORS = ("lmmse_exact", "lmmse_band", "mrc_dfe", "ml")
_WAVEFORMS = ("afdm", "ofdm")

# fixed stream tags so arms with different bit counts share channel/noise draws
_STREAM_BITS, _STREAM_CHANNEL, _STREAM_NOISE = 0, 1, 2

_CHUNK = 256


@dataclass(frozen=True)
class ExperimentConfig:
    """One BER experiment: waveform, scenario, detector, and bookkeeping.

    The default scenario is the high-mobility benchmark used throughout the
    test suite: N = 128, 4-QAM, three paths with gapped delays (0, 6, 12),
    Jakes Doppler with nu_max = 1 rounded to integers.
    """

    waveform: str = "afdm"
    n: int = 128
    mod_order: int = 4
    snr_db: tuple = (0.0, 5.0, 10.0, 15.0, 20.0)
    frames: int = 1000
    detector: str = "lmmse_band"
    n_paths: int = 3
    delays: tuple = (0, 6, 12)
    nu_max: float = 1.0
    integer_doppler: bool = True
    k_nu: int = 0
    dfe_n_iter_max: int = 25
    dfe_epsilon: float = 0.01
    dfe_hard: bool = False
    seed: int = 1
    out: str | None = None

    def __post_init__(self):
        if self.waveform not in _WAVEFORMS:
            raise ValueError(f"waveform must be one of {_WAVEFORMS}")
        if self.detector not in _DETECTORS:
            raise ValueError(f"detector must be one of {_DETECTORS}")
        if self.frames < 1:
            raise ValueError("frames must be >= 1")
        if len(self.snr_db) == 0:
            raise ValueError("snr_db list must not be empty")
        if len(self.delays) == 0:
            raise ValueError("delays must not be empty")
        if self.n_paths != len(self.delays):
            raise ValueError("n_paths must match the number of delays")
        object.__setattr__(self, "snr_db", tuple(float(s) for s in self.snr_db))
        object.__setattr__(self, "delays", tuple(int(d) for d in self.delays))

    def waveform_config(self) -> AfdmConfig:
        if self.waveform == "ofdm":
            return AfdmConfig.ofdm(self.n)
        return AfdmConfig.tuned(self.n, self.nu_max, self.k_nu)

    def guard_count(self) -> int:
        if self.waveform == "ofdm":
            return 0
        return compute_guard_width(max(self.delays), self.waveform_config())

    def dfe_config(self) -> DfeConfig:
        return DfeConfig(n_iter_max=self.dfe_n_iter_max, epsilon=self.dfe_epsilon,
                         hard_decision=self.dfe_hard,
                         constellation=qam_constellation(self.mod_order))

    @classmethod
    def from_mapping(cls, mapping: dict) -> "ExperimentConfig":
        """Build from a flat key/value mapping (config file or CLI)."""
        kwargs = {}
        casts = {
            "waveform": str, "n": int, "mod_order": int, "frames": int,
            "detector": str, "n_paths": int, "nu_max": float,
            "integer_doppler": _parse_bool, "k_nu": int,
            "dfe_n_iter_max": int, "dfe_epsilon": float,
            "dfe_hard": _parse_bool, "seed": int, "out": str,
        }
        for key, value in mapping.items():
            if key == "snr_db":
                kwargs[key] = _parse_number_list(value)
            elif key == "delays":
                kwargs[key] = tuple(int(v) for v in _parse_number_list(value))
            elif key in casts:
                kwargs[key] = casts[key](value)
            else:
                raise ValueError(f"unknown config key {key!r}")
        return cls(**kwargs)


def _parse_bool(value) -> bool:
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in ("1", "true", "yes", "on"):
        return True
    if text in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"cannot parse boolean from {value!r}")


def _parse_number_list(value) -> tuple:
    if isinstance(value, (list, tuple)):
        return tuple(float(v) for v in value)
    parts = [p for p in str(value).replace(",", " ").split() if p]
    return tuple(float(p) for p in parts)


def parse_config_file(path) -> dict:
    """Read a `key = value` text file; '#' starts a comment."""
    mapping = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, value = line.split("=", 1)
            mapping[key.strip()] = value.strip()
    return mapping


@dataclass(frozen=True)
class BerRecord:
    snr_db: float
    detector: str
    frames: int
    bit_errors: int
    ber: float
    ci95: float
    mean_iters: float
    cm: float
    ca: float
    cd: float
    wall_ms: float


@dataclass(frozen=True)
class EpsilonRecord:
    epsilon: float
    snr_db: float
    frames: int
    bit_errors: int
    ber: float
    ci95: float
    mean_iters: float
    cm: float
    ca: float
    cd: float
    wall_ms: float


def _frame_rngs(seed: int, point_idx: int, frame_idx: int):
    def stream(tag):
        return np.random.default_rng([seed, point_idx, frame_idx, tag])
    return stream(_STREAM_BITS), stream(_STREAM_CHANNEL), stream(_STREAM_NOISE)


def _synthesize_frame(cfg: ExperimentConfig, wcfg: AfdmConfig, guard: int,
                      noise: NoiseSpec, point_idx: int, frame_idx: int):
    """Generate one frame end to end; returns (eff, y, bits)."""
    rng_bits, rng_ch, rng_noise = _frame_rngs(cfg.seed, point_idx, frame_idx)
    bps = int(round(np.log2(cfg.mod_order)))
    n_data = cfg.n - guard
    guarded = cfg.waveform == "afdm"
    bits = rng_bits.integers(0, 2, bps * n_data)
    data = qam_map(bits, cfg.mod_order)
    frame = assemble_frame(data, cfg.n, guard, wcfg,
                           l_max=max(cfg.delays) if guarded else None)
    ch = sample_jakes_doppler(cfg.nu_max, cfg.n_paths, cfg.delays, rng_ch,
                              integer_doppler=cfg.integer_doppler)
    s = idaft(frame.full_vector, wcfg)
    s_cpp = add_cpp(s, max(cfg.delays), wcfg)
    r = apply_channel(s_cpp, ch, noise, wcfg, rng=rng_noise)
    y = daft(r, wcfg)
    eff = build_effective(ch, wcfg, guard, check_guard=guarded)
    return eff, y, bits


def _detect_chunk(cfg: ExperimentConfig, chunk, n0: float,
                  dfe_cfg: DfeConfig) -> list[DetectorResult]:
    if cfg.detector == "mrc_dfe":
        effs = [c[0] for c in chunk]
        ys = [c[1] for c in chunk]
        return mrc_dfe_batch(effs, ys, 1.0 / n0, dfe_cfg)
    results = []
    for eff, y, _ in chunk:
        if cfg.detector == "lmmse_exact":
            results.append(lmmse_exact(eff, y, n0))
        elif cfg.detector == "lmmse_band":
            results.append(lmmse_band(eff, y, n0))
        else:
            results.append(ml_detect(eff, y, qam_constellation(cfg.mod_order)))
    return results


def _run_point(cfg: ExperimentConfig, point_idx: int, snr_db: float,
               detector_label: str, dfe_cfg: DfeConfig) -> BerRecord:
    t0 = time.perf_counter()
    wcfg = cfg.waveform_config()
    guard = cfg.guard_count()
    noise = NoiseSpec.from_snr_db(snr_db)
    if cfg.detector == "ml":
        bps = int(round(np.log2(cfg.mod_order)))
        if (cfg.n - guard) * bps > 16:
            raise ValueError("ml detector limited to frames of at most 16 data bits")
    bit_errors = 0
    total_bits = 0
    iters = 0.0
    cm = ca = cd = 0.0
    done = 0
    while done < cfg.frames:
        count = min(_CHUNK, cfg.frames - done)
        chunk = [_synthesize_frame(cfg, wcfg, guard, noise, point_idx, done + i)
                 for i in range(count)]
        results = _detect_chunk(cfg, chunk, noise.n0, dfe_cfg)
        for (eff, y, bits), res in zip(chunk, results):
            bits_hat = qam_demap(res.xhat, cfg.mod_order)
            bit_errors += int(np.sum(bits_hat != bits))
            total_bits += bits.size
            iters += res.iterations
            cm += res.ops.cm
            ca += res.ops.ca
            cd += res.ops.cd
        done += count
    ber = bit_errors / total_bits
    ci95 = 1.96 * float(np.sqrt(ber * (1.0 - ber) / total_bits))
    wall_ms = (time.perf_counter() - t0) * 1000.0
    return BerRecord(snr_db=snr_db, detector=detector_label, frames=cfg.frames,
                     bit_errors=bit_errors, ber=ber, ci95=ci95,
                     mean_iters=iters / cfg.frames, cm=cm / cfg.frames,
                     ca=ca / cfg.frames, cd=cd / cfg.frames, wall_ms=wall_ms)


def run_ber_sweep(cfg: ExperimentConfig) -> list[BerRecord]:
    """BER vs SNR for the configured waveform and detector."""
    dfe_cfg = cfg.dfe_config()
    label = cfg.detector if cfg.waveform == "afdm" else f"ofdm_{cfg.detector}"
    return [_run_point(cfg, idx, snr, label, dfe_cfg)
            for idx, snr in enumerate(cfg.snr_db)]


def run_ofdm_baseline(cfg: ExperimentConfig) -> list[BerRecord]:
    """Same sweep through the c1 = c2 = 0 waveform with full LMMSE.

    Channel and noise draws match the AFDM sweep point by point.
    """
    ofdm_cfg = replace(cfg, waveform="ofdm", detector="lmmse_exact")
    return run_ber_sweep(ofdm_cfg)


def epsilon_sweep(cfg: ExperimentConfig, eps_list) -> list[EpsilonRecord]:
    """DFE exit-threshold sweep at a single SNR (first entry of cfg.snr_db).

    All thresholds see identical frames, so iteration counts are directly
    comparable across epsilon values.
    """
    snr_db = cfg.snr_db[0]
    records = []
    for eps in eps_list:
        run_cfg = replace(cfg, detector="mrc_dfe", snr_db=(snr_db,),
                          dfe_epsilon=float(eps))
        rec = _run_point(run_cfg, 0, snr_db, "mrc_dfe", run_cfg.dfe_config())
        records.append(EpsilonRecord(
            epsilon=float(eps), snr_db=rec.snr_db, frames=rec.frames,
            bit_errors=rec.bit_errors, ber=rec.ber, ci95=rec.ci95,
            mean_iters=rec.mean_iters, cm=rec.cm, ca=rec.ca, cd=rec.cd,
            wall_ms=rec.wall_ms))
    return records


BER_CSV_HEADER = "snr_db,detector,frames,bit_errors,ber,ci95,mean_iters,cm,ca,cd,wall_ms"
EPSILON_CSV_HEADER = "epsilon,snr_db,frames,bit_errors,ber,ci95,mean_iters,cm,ca,cd,wall_ms"


def format_ber_csv(records: list[BerRecord]) -> str:
    lines = [BER_CSV_HEADER]
    for r in records:
        lines.append(
            f"{r.snr_db:g},{r.detector},{r.frames},{r.bit_errors},"
            f"{r.ber:.10e},{r.ci95:.10e},{r.mean_iters:.4f},"
            f"{r.cm:.2f},{r.ca:.2f},{r.cd:.2f},{r.wall_ms:.3f}")
    return "\n".join(lines) + "\n"


def format_epsilon_csv(records: list[EpsilonRecord]) -> str:
    lines = [EPSILON_CSV_HEADER]
    for r in records:
        lines.append(
            f"{r.epsilon:g},{r.snr_db:g},{r.frames},{r.bit_errors},"
            f"{r.ber:.10e},{r.ci95:.10e},{r.mean_iters:.4f},"
            f"{r.cm:.2f},{r.ca:.2f},{r.cd:.2f},{r.wall_ms:.3f}")
    return "\n".join(lines) + "\n"


def records_to_json(records) -> str:
    import json
    from dataclasses import asdict
    return json.dumps([asdict(r) for r in records], indent=2)
