"""Fast invariant battery behind the `verify` CLI subcommand.

Each check returns (name, passed, detail). The battery covers transform
unitarity, the closed-form channel build, the end-to-end input-output
identity, the band solver, the DFE, the operation counters, noise
calibration, and run determinism. Runtime is a few seconds.
"""

from __future__ import annotations

import numpy as np

from .bandmat import OpCounter, band_gram, ldl_band, solve_band
from .channel import NoiseSpec, add_cpp, apply_channel, sample_jakes_doppler, time_domain_matrix
from .daft import AfdmConfig, daft, daft_matrix, idaft
from .detectors import DfeConfig, lmmse_band, lmmse_exact, mrc_dfe
from .effective import build_effective, build_exact, build_integer_sparse, truncate_and_index
from .framing import assemble_frame, compute_guard_width, qam_map
from .harness import ExperimentConfig, format_ber_csv, run_ber_sweep


def _check_unitarity():
    worst = 0.0
    for n in (8, 64, 128):
        cfg = AfdmConfig.tuned(n, nu_max=1.0)
        a = daft_matrix(cfg)
        worst = max(worst, float(np.max(np.abs(a @ a.conj().T - np.eye(n)))))
        rng = np.random.default_rng(n)
        for _ in range(10):
            x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            worst = max(worst, float(np.max(np.abs(daft(idaft(x, cfg), cfg) - x))))
    return "daft unitarity and round trip", worst < 1e-10, f"max deviation {worst:.2e}"


def _check_fft_path():
    rng = np.random.default_rng(5)
    cfg = AfdmConfig.tuned(64, nu_max=2.0, k_nu=1)
    x = rng.standard_normal(64) + 1j * rng.standard_normal(64)
    err = max(
        float(np.max(np.abs(daft(x, cfg) - daft(x, cfg, method="fft")))),
        float(np.max(np.abs(idaft(x, cfg) - idaft(x, cfg, method="fft")))))
    return "chirp-fft-chirp fast path", err < 1e-10, f"max deviation {err:.2e}"


def _check_closed_form():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(10):
        cfg = AfdmConfig.tuned(32, nu_max=1.0)
        ch = sample_jakes_doppler(1.0, 3, (0, 1, 2), rng, integer_doppler=True)
        exact = build_exact(time_domain_matrix(ch, cfg), cfg)
        sparse = build_integer_sparse(ch, cfg)
        worst = max(worst, float(np.max(np.abs(exact - sparse))))
    return "closed-form channel build", worst < 1e-10, f"max deviation {worst:.2e}"


def _check_end_to_end():
    rng = np.random.default_rng(9)
    cfg = AfdmConfig.tuned(64, nu_max=1.0)
    worst = 0.0
    for _ in range(10):
        ch = sample_jakes_doppler(1.0, 3, (0, 2, 4), rng, integer_doppler=True)
        guard = compute_guard_width(ch.l_max, cfg)
        data = qam_map(rng.integers(0, 2, 2 * (64 - guard)))
        frame = assemble_frame(data, 64, guard, cfg, l_max=ch.l_max)
        s_cpp = add_cpp(idaft(frame.full_vector, cfg), ch.l_max, cfg)
        y = daft(apply_channel(s_cpp, ch, NoiseSpec.off(), cfg), cfg)
        eff = build_effective(ch, cfg, guard)
        worst = max(worst, float(np.max(np.abs(y - eff.dense @ data))))
    return "noiseless input-output identity", worst < 1e-10, f"max deviation {worst:.2e}"


def _check_band_solver():
    rng = np.random.default_rng(13)
    cfg = AfdmConfig.tuned(128, nu_max=1.0)
    ch = sample_jakes_doppler(1.0, 3, (0, 1, 2), rng, integer_doppler=True)
    eff = build_effective(ch, cfg)
    n0 = 0.05
    m = band_gram(eff, n0)
    fact = ldl_band(m)
    recon = float(np.max(np.abs(fact.reconstruct() - m.to_dense())))
    y = rng.standard_normal(128) + 1j * rng.standard_normal(128)
    x = solve_band(fact, y)
    resid = float(np.linalg.norm(m.to_dense() @ x - y) / np.linalg.norm(y))
    ok = recon < 1e-9 and resid < 1e-9
    return "band LDL factor and solve", ok, f"recon {recon:.2e}, residual {resid:.2e}"


def _check_detector_agreement():
    rng = np.random.default_rng(17)
    cfg = AfdmConfig.tuned(128, nu_max=1.0)
    worst = 0.0
    for _ in range(5):
        ch = sample_jakes_doppler(1.0, 3, (0, 1, 2), rng, integer_doppler=True)
        eff = build_effective(ch, cfg)
        y = rng.standard_normal(128) + 1j * rng.standard_normal(128)
        a = lmmse_exact(eff, y, 0.01).xhat
        b = lmmse_band(eff, y, 0.01).xhat
        worst = max(worst, float(np.max(np.abs(a - b))))
    return "band MMSE matches exact MMSE", worst < 1e-8, f"max deviation {worst:.2e}"


def _check_dfe():
    rng = np.random.default_rng(19)
    cfg = AfdmConfig.tuned(128, nu_max=1.0)
    ch = sample_jakes_doppler(1.0, 3, (0, 6, 12), rng, integer_doppler=True)
    eff = build_effective(ch, cfg)
    k = eff.n_data
    data = qam_map(rng.integers(0, 2, 2 * k))
    y = eff.dense @ data
    n0 = 1e-4
    res = mrc_dfe(eff, y, 1.0 / n0, DfeConfig(n_iter_max=60))
    ref = lmmse_exact(eff, y, n0).xhat
    rel = float(np.linalg.norm(res.xhat - ref) / np.linalg.norm(ref))
    ok = res.converged and rel < 1e-2
    return "mrc dfe converges to lmmse", ok, f"iters {res.iterations}, rel dev {rel:.2e}"


def _check_op_counts():
    rng = np.random.default_rng(23)
    cfg = AfdmConfig.tuned(128, nu_max=1.0)
    ch = sample_jakes_doppler(1.0, 3, (0, 1, 2), rng, integer_doppler=True)
    eff = build_effective(ch, cfg)
    q, n = eff.q, eff.n
    y = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    counter = OpCounter()
    lmmse_band(eff, y, 0.01, counter)
    nominal = (2 * q * q + 11 * q + 4) * n
    ratio = counter.total / nominal
    return ("band pipeline op count", abs(ratio - 1.0) < 0.15,
            f"measured/nominal {ratio:.3f} (Q={q})")


def _check_noise_calibration():
    rng = np.random.default_rng(29)
    cfg = AfdmConfig.tuned(64, nu_max=0.0)
    ch = sample_jakes_doppler(0.0, 1, (0,), rng)
    n0 = 0.25
    spec = NoiseSpec(n0=n0, snr_db=10 * np.log10(1 / n0))
    s = np.zeros(64, dtype=complex)
    acc = 0.0
    reps = 1500
    for _ in range(reps):
        r = apply_channel(s, ch, spec, cfg, rng=rng)
        acc += float(np.mean(np.abs(r) ** 2))
    measured = acc / reps
    ok = abs(measured - n0) / n0 < 0.03
    return "noise variance calibration", ok, f"measured {measured:.4f} vs {n0}"


def _check_determinism():
    cfg = ExperimentConfig(snr_db=(10.0,), frames=20, detector="mrc_dfe", seed=7)
    a = format_ber_csv(run_ber_sweep(cfg))
    b = format_ber_csv(run_ber_sweep(cfg))
    strip = lambda text: "\n".join(",".join(l.split(",")[:-1]) for l in text.splitlines())
    ok = strip(a) == strip(b)
    return "sweep determinism", ok, "identical records" if ok else "records differ"


ALL_CHECKS = (
    _check_unitarity,
    _check_fft_path,
    _check_closed_form,
    _check_end_to_end,
    _check_band_solver,
    _check_detector_agreement,
    _check_dfe,
    _check_op_counts,
    _check_noise_calibration,
    _check_determinism,
)


def run_verify() -> list[tuple[str, bool, str]]:
    return [check() for check in ALL_CHECKS]
