"""Command-line entry point: ``esn-denoise <command> ...``."""
from __future__ import annotations

import argparse
import json
import logging
import sys

from . import chaos, esn, experiment, noise, tuning, wiener
from .signal_io import read_signal, write_signal


def _generate(args):
    orbit = chaos.generate_orbit(chaos.MapParams(args.alpha, args.d0), args.length,
                                 dither=False if args.no_dither else None)
    write_signal(args.out, orbit.samples)


def _corrupt(args):
    d = read_signal(args.inp)
    sig = noise.corrupt(d, noise.NoiseSpec(args.snr_db, args.seed))
    write_signal(args.out, sig.u)
    print(f"realized_snr_db={sig.realized_snr_db:.6f}")


def _train(args):
    with open(args.config) as fh:
        config = esn.EsnConfig.from_dict(json.load(fh))
    u, d = read_signal(args.inp), read_signal(args.desired)
    if len(u) != len(d):
        raise SystemExit("input and desired signals differ in length")
    trained = esn.fit(config, u, d)
    esn.save_model(trained, args.out)


def _denoise(args):
    trained = esn.load_model(args.model)
    if args.reset:
        esn.reset(trained)
    y = esn.run(trained, read_signal(args.inp))
    write_signal(args.out, y[:, 0] if y.shape[1] == 1 else y)


def _wiener(args):
    u, d = read_signal(args.inp), read_signal(args.desired)
    if len(u) != len(d):
        raise SystemExit("input and desired signals differ in length")
    stop = len(u) if args.train_len is None else args.train_start + args.train_len
    filt = wiener.fit(u[args.train_start:stop], d[args.train_start:stop], args.taps, args.delay)
    write_signal(args.out, wiener.apply(filt, u))
    if args.dump_taps:
        write_signal(args.dump_taps, filt.taps)


def _tune(args):
    scenario = tuning.TuneScenario(alpha=args.alpha, snr_in_db=args.snr_db, seed=args.seed,
                                   n_reservoir=args.n_reservoir, transient=args.transient,
                                   train_len=args.train_len,
                                   eval_len=args.eval_len or (10**5 if args.quick
                                                              else 10**6 - args.train_len))
    order = tuple(args.order.split(","))
    result = tuning.coordinate_descent(tuning.TuneGrid(), scenario, order=order,
                                       max_cycles=args.max_cycles)
    tuning.write_trace_csv(result, args.out)
    print(f"a={result.a} lambda={result.lam} p={result.p} q={result.q} "
          f"gain_db={result.gain_db:.4f} cycles={result.trace.cycles} "
          f"converged={result.trace.converged}")


def _sweep(args):
    config = experiment.SweepConfig.from_json(args.config) if args.config else experiment.SweepConfig()
    if args.quick:
        config = config.quick()
    result = experiment.run_sweep(config, args.out, workers=args.workers)
    for row in result.summary:
        print(f"{row['alpha']:+.3f} {row['method']:>6} "
              f"{row['gain_mean_db']:7.3f} +- {row['gain_std_db']:.3f} dB")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="esn-denoise", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a skew tent map orbit")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--d0", type=float, required=True)
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--no-dither", action="store_true",
                   help="disable the ulp dither applied when alpha == 0")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_generate)

    p = sub.add_parser("corrupt", help="add white Gaussian noise at a given SNR")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--snr-db", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_corrupt)

    p = sub.add_parser("train", help="train an ESN readout and save the model")
    p.add_argument("--config", required=True, help="JSON file of EsnConfig fields")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--desired", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_train)

    p = sub.add_parser("denoise", help="run a saved ESN over a signal")
    p.add_argument("--model", required=True)
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--reset", action="store_true",
                   help="start from the zero state instead of the saved training state")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_denoise)

    p = sub.add_parser("wiener", help="design and apply an FIR Wiener filter")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--desired", required=True)
    p.add_argument("--taps", type=int, default=10)
    p.add_argument("--delay", type=int, default=0)
    p.add_argument("--train-start", type=int, default=0)
    p.add_argument("--train-len", type=int, default=None)
    p.add_argument("--dump-taps", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_wiener)

    p = sub.add_parser("tune", help="coordinate-descent search of (a, lambda, p, q)")
    p.add_argument("--alpha", type=float, default=0.1)
    p.add_argument("--snr-db", type=float, default=2.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-reservoir", type=int, default=500)
    p.add_argument("--transient", type=int, default=200)
    p.add_argument("--train-len", type=int, default=25000)
    p.add_argument("--eval-len", type=int, default=None)
    p.add_argument("--quick", action="store_true", help="evaluate on 1e5 samples")
    p.add_argument("--order", default=",".join(tuning.COORDINATES))
    p.add_argument("--max-cycles", type=int, default=50)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_tune)

    p = sub.add_parser("sweep", help="gain versus alpha for ESN and Wiener filter")
    p.add_argument("--config", default=None, help="JSON file of SweepConfig fields")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--quick", action="store_true")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=_sweep)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(asctime)s %(name)s %(message)s")
    args.func(args)
    return 0


if __name__ == "__main__":
    sys.exit(main())
