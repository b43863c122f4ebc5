"""One victim, one interferer: steer vs neutralize on a single draw, checked
against the explicit received-signal sum."""

import argparse

import numpy as np

from steersim.mimo import NoiseModel, TransmitIntent, assemble_rx, sample_rayleigh, shannon_se, svd_beamform
from steersim.steering import combine, neutralize, steer, victim_snr


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--snr-db", type=float, default=15.0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    H0, H10, H1 = (sample_rayleigh(rng, 2, 2) for _ in range(3))
    bf0, bf1 = svd_beamform(H0), svd_beamform(H1)
    noise = NoiseModel.from_snr_db(args.snr_db)
    i = combine([(H10, TransmitIntent(1.0, bf1.precoder))], contributors=[1])
    d_s = H0 @ bf0.precoder / np.linalg.norm(H0 @ bf0.precoder)

    print(f"victim gain {bf0.gain:.4f}, |i| {np.linalg.norm(i.vector):.4f}, "
          f"|<d_s, i>|/|i| {abs(np.vdot(d_s, i.vector)) / np.linalg.norm(i.vector):.4f}")
    for label, sol in (("IS", steer(bf0, H0, H0, i)), ("IN", neutralize(H0, i))):
        if not sol.feasible:
            print(f"{label}: power {sol.power:.4f} exceeds the budget, SE 0")
            continue
        y = assemble_rx(
            (TransmitIntent(1.0, bf0.precoder), H0),
            [(TransmitIntent(1.0, bf1.precoder), H10)],
            (TransmitIntent(sol.power, sol.precoder), H0),
        )
        leak = np.vdot(bf0.filter, y) - np.sqrt(1 - sol.power) * bf0.gain
        se = shannon_se(victim_snr(1.0, sol.power, bf0.gain, noise))
        print(f"{label}: power {sol.power:.4f}, post-filter leak {abs(leak):.1e}, victim SE {se:.4f}")
    print(f"interference-free BF SE {shannon_se(bf0.gain ** 2 / noise.variance):.4f}")


if __name__ == "__main__":
    main()
