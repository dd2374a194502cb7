"""Command-line surface: enhance, metrics, report, dump-params.

Every failure prints one machine-parsable line ``error: <Class>: <message>``
to stderr and exits nonzero.
"""

import argparse
import json
import sys

import numpy as np

from .engine import EngineConfig, StreamEngine
from .errors import ChannelMismatch, LengthMismatch, PmwfError
from .masknet import load_weights_file
from .metrics import si_sdr, snr
from .report import complexity_report, dump_params, format_report
from .stft import StftConfig
from .wavio import AudioBuffer, read_wav, write_wav


def _load_config(path) -> EngineConfig:
    if path is None:
        return EngineConfig()
    with open(path) as fh:
        return EngineConfig.from_dict(json.load(fh))


def cmd_enhance(args):
    weights = load_weights_file(args.weights)
    config = _load_config(args.config)
    mix = read_wav(args.input)
    if mix.channels != weights.hyper.mics:
        raise ChannelMismatch(
            f"{args.input}: {mix.channels} channels, weights expect {weights.hyper.mics}"
        )
    reference = None
    if config.mask_provider == "oracle":
        if args.reference is None:
            raise ValueError("oracle mask provider needs --reference")
        ref = read_wav(args.reference)
        if ref.samples.shape != mix.samples.shape:
            raise LengthMismatch(
                f"reference {ref.samples.shape} vs input {mix.samples.shape}"
            )
        reference = ref.samples
    engine = StreamEngine(weights, config)
    out = engine.enhance(mix.samples, reference)
    write_wav(args.output, AudioBuffer(sample_rate=mix.sample_rate, samples=out[None, :]))
    print(f"wrote {args.output}: {out.shape[0]} samples at {mix.sample_rate} Hz")
    return 0


def cmd_metrics(args):
    if len(args.reference) != len(args.estimate):
        raise LengthMismatch("need as many --reference files as --estimate files")
    snrs, sdrs = [], []
    for ref_path, est_path in zip(args.reference, args.estimate):
        ref = read_wav(ref_path).samples[0]  # channel 0 is the target
        est = read_wav(est_path).samples[0]
        if ref.shape != est.shape:
            raise LengthMismatch(f"{ref_path}: {ref.shape} vs {est_path}: {est.shape}")
        file_snr = snr(ref, est)
        file_sdr = si_sdr(ref, est)
        snrs.append(file_snr)
        sdrs.append(file_sdr)
        print(f"{est_path}: snr_db={file_snr:.4f} si_sdr_db={file_sdr:.4f}")
    print(f"mean: snr_db={np.mean(snrs):.4f} si_sdr_db={np.mean(sdrs):.4f}")
    return 0


def cmd_report(args):
    weights = load_weights_file(args.weights)
    print(format_report(complexity_report(weights, StftConfig())))
    return 0


def cmd_dump_params(args):
    weights = load_weights_file(args.weights)
    dump_params(weights, args.out)
    print(f"wrote {args.out}: {weights.hyper.bins} rows")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="pmwfnet",
        description="Streaming multichannel speech enhancement",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enhance", help="enhance a multichannel WAV to mono")
    p.add_argument("--input", required=True)
    p.add_argument("--weights", required=True)
    p.add_argument("--config", default=None, help="JSON engine configuration")
    p.add_argument("--output", required=True)
    p.add_argument("--reference", default=None, help="aligned clean WAV for oracle mode")
    p.set_defaults(func=cmd_enhance)

    p = sub.add_parser("metrics", help="SNR / SI-SDR between reference and estimate")
    p.add_argument("--reference", required=True, nargs="+")
    p.add_argument("--estimate", required=True, nargs="+")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("report", help="parameter and MAC budget of a weight file")
    p.add_argument("--weights", required=True)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("dump-params", help="export learned control curves as CSV")
    p.add_argument("--weights", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_dump_params)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except PmwfError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
