"""Coordinate-descent selection of (a, lambda, p, q) at alpha=0.1, SNR_in=2 dB.

Full size (N=500) takes hours on one core; --n-reservoir 100 --train-len 5000
finishes in a couple of minutes. The best cell is re-validated on a long
evaluation window at the end.
"""
import argparse

from esn_denoise import tuning


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--n-reservoir", type=int, default=500)
    parser.add_argument("--train-len", type=int, default=25000)
    parser.add_argument("--eval-len", type=int, default=10**5)
    parser.add_argument("--validate-len", type=int, default=None,
                        help="evaluation length for re-validation (default 1e6 - train_len)")
    parser.add_argument("--order", default="a,lambda,p,q")
    parser.add_argument("--out", default="trace.csv")
    args = parser.parse_args()

    common = dict(alpha=0.1, snr_in_db=2.0, seed=args.seed, n_reservoir=args.n_reservoir,
                  train_len=args.train_len)
    scenario = tuning.TuneScenario(eval_len=args.eval_len, **common)
    result = tuning.coordinate_descent(tuning.TuneGrid(), scenario,
                                       order=tuple(args.order.split(",")))
    tuning.write_trace_csv(result, args.out)
    for it in result.trace.iterations:
        print(f"cycle {it.cycle:2d}: a={it.a:.2f} lambda={it.lam:.2f} p={it.p:.2f} "
              f"q={it.q:.2f} G={it.gain_db:.3f} dB")
    print(f"converged={result.trace.converged} after {result.trace.cycles} cycles "
          f"({result.trace.scans} scans)")

    long_len = args.validate_len or 10**6 - args.train_len
    full = tuning.TuneScenario(eval_len=long_len, **common)
    print(f"re-validated on {long_len} samples: "
          f"tuned G={tuning.evaluate_cell(*result.params, full):.3f} dB, "
          f"reference (0.80, 0.75, 1.50, 1.00) G={tuning.evaluate_cell(0.8, 0.75, 1.5, 1.0, full):.3f} dB")


if __name__ == "__main__":
    main()
