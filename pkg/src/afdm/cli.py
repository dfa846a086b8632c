"""Command-line interface: BER sweeps, epsilon sweeps, verification, and
channel-realization dumps. Results land in a CSV (plus optional JSON mirror
and rendered figures)."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .channel import sample_jakes_doppler
from .harness import (ExperimentConfig, epsilon_sweep, format_ber_csv,
                      format_epsilon_csv, parse_config_file, records_to_json,
                      run_ber_sweep)


def _experiment_config(args) -> ExperimentConfig:
    mapping = {}
    if args.config:
        mapping.update(parse_config_file(args.config))
    overrides = {
        "waveform": args.waveform, "n": args.n, "mod_order": args.mod_order,
        "snr_db": args.snr, "frames": args.frames, "detector": args.detector,
        "delays": args.delays, "nu_max": args.nu_max,
        "integer_doppler": args.integer_doppler, "k_nu": args.k_nu,
        "dfe_n_iter_max": args.dfe_max_iter, "dfe_epsilon": args.dfe_epsilon,
        "seed": args.seed, "out": args.out,
    }
    for key, value in overrides.items():
        if value is not None:
            mapping[key] = value
    if "delays" in mapping and "n_paths" not in mapping:
        delays = mapping["delays"]
        mapping["n_paths"] = len(delays) if isinstance(delays, (list, tuple)) \
            else len(str(delays).replace(",", " ").split())
    return ExperimentConfig.from_mapping(mapping)


def _add_experiment_flags(sub) -> None:
    sub.add_argument("--config", type=Path, default=None,
                     help="key = value config file (flags override it)")
    sub.add_argument("--seed", type=int, default=None)
    sub.add_argument("--frames", type=int, default=None)
    sub.add_argument("--snr", type=str, default=None,
                     help="comma-separated SNR list in dB")
    sub.add_argument("--detector", type=str, default=None,
                     choices=("lmmse_exact", "lmmse_band", "mrc_dfe", "ml"))
    sub.add_argument("--waveform", type=str, default=None, choices=("afdm", "ofdm"))
    sub.add_argument("--n", type=int, default=None)
    sub.add_argument("--mod-order", dest="mod_order", type=int, default=None)
    sub.add_argument("--delays", type=str, default=None,
                     help="comma-separated path delays in samples")
    sub.add_argument("--nu-max", dest="nu_max", type=float, default=None)
    sub.add_argument("--fractional", dest="integer_doppler", default=None,
                     action="store_false",
                     help="keep Jakes Doppler shifts fractional")
    sub.add_argument("--k-nu", dest="k_nu", type=int, default=None)
    sub.add_argument("--dfe-max-iter", dest="dfe_max_iter", type=int, default=None)
    sub.add_argument("--dfe-epsilon", dest="dfe_epsilon", type=float, default=None)
    sub.add_argument("--out", type=str, default=None, help="CSV output path")
    sub.add_argument("--json", action="store_true",
                     help="also write a JSON mirror next to the CSV")
    sub.add_argument("--no-plot", dest="plot", action="store_false",
                     help="skip figure rendering")


def _write_outputs(csv_text: str, records, out: str | None, want_json: bool,
                   plot_fn) -> None:
    if out is None:
        sys.stdout.write(csv_text)
        return
    out_path = Path(out)
    if out_path.parent and not out_path.parent.exists():
        out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text(csv_text, encoding="utf-8")
    print(f"wrote {out_path}")
    if want_json:
        json_path = out_path.with_suffix(".json")
        json_path.write_text(records_to_json(records), encoding="utf-8")
        print(f"wrote {json_path}")
    if plot_fn is not None:
        fig_path = out_path.with_suffix(".png")
        plot_fn(records, fig_path)
        print(f"wrote {fig_path}")


def _cmd_ber(args) -> int:
    cfg = _experiment_config(args)
    records = run_ber_sweep(cfg)
    plot_fn = None
    if args.plot:
        from .report import save_ber_figure
        plot_fn = save_ber_figure
    _write_outputs(format_ber_csv(records), records, cfg.out or args.out,
                   args.json, plot_fn)
    return 0


def _cmd_epsilon(args) -> int:
    cfg = _experiment_config(args)
    eps_list = [float(e) for e in args.eps.replace(",", " ").split()]
    if not eps_list:
        raise ValueError("epsilon list must not be empty")
    records = epsilon_sweep(cfg, eps_list)
    plot_fn = None
    if args.plot:
        from .report import save_epsilon_figure
        plot_fn = save_epsilon_figure
    _write_outputs(format_epsilon_csv(records), records, cfg.out or args.out,
                   args.json, plot_fn)
    return 0


def _cmd_verify(_args) -> int:
    from .selfcheck import run_verify
    results = run_verify()
    failures = 0
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
        failures += 0 if ok else 1
    print(f"{len(results) - failures}/{len(results)} checks passed")
    return 0 if failures == 0 else 1


def _cmd_channel_dump(args) -> int:
    delays = [int(d) for d in args.delays.replace(",", " ").split()]
    rng = np.random.default_rng(args.seed)
    ch = sample_jakes_doppler(args.nu_max, len(delays), delays, rng,
                              integer_doppler=args.integer_doppler)
    text = ch.to_json() + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="afdm",
        description="AFDM modem simulator: BER sweeps and detector benchmarks")
    subs = parser.add_subparsers(dest="command", required=True)

    ber = subs.add_parser("ber", help="Monte-Carlo BER vs SNR sweep")
    _add_experiment_flags(ber)
    ber.set_defaults(func=_cmd_ber)

    eps = subs.add_parser("epsilon", help="DFE exit-threshold sweep")
    _add_experiment_flags(eps)
    eps.add_argument("--eps", type=str, default="1,0.1,0.01,0.001",
                     help="comma-separated thresholds")
    eps.set_defaults(func=_cmd_epsilon)

    ver = subs.add_parser("verify", help="run the invariant self-checks")
    ver.set_defaults(func=_cmd_verify)

    chan = subs.add_parser("channel", help="channel realization utilities")
    chan_subs = chan.add_subparsers(dest="channel_command", required=True)
    dump = chan_subs.add_parser("dump", help="serialize one realization")
    dump.add_argument("--seed", type=int, default=0)
    dump.add_argument("--delays", type=str, default="0,6,12")
    dump.add_argument("--nu-max", dest="nu_max", type=float, default=1.0)
    dump.add_argument("--fractional", dest="integer_doppler", default=True,
                      action="store_false")
    dump.add_argument("--out", type=str, default=None)
    dump.set_defaults(func=_cmd_channel_dump)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
