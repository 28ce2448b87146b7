#!/usr/bin/env python3
"""Certify the closed-form bounds by gradient ascent on random instances.

Draws random plant/controller/observable triples, runs the multi-restart
optimizer, and reports attainment errors, violations (there must never be
any), and convergence statistics.
"""

import argparse
import time

import numpy as np

from qkbounds import (
    HermitianPair,
    certify_bounds,
    composite,
    random_observable,
    random_spectrum,
)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--instances", type=int, default=10)
    parser.add_argument("--restarts", type=int, default=32)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--max-dim", type=int, default=12)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    worst_max = worst_min = 0.0
    certified = 0
    t0 = time.perf_counter()
    for k in range(args.instances):
        while True:
            n_s, n_c = int(rng.integers(2, 5)), int(rng.integers(2, 5))
            if n_s * n_c <= args.max_dim:
                break
        comp = composite(
            random_spectrum(rng, n_s),
            random_spectrum(rng, n_c),
            random_observable(rng, n_s),
        )
        hp = HermitianPair.from_composite(comp)
        rep = certify_bounds(hp, restarts=args.restarts, rng_seed=args.seed + k)
        err_max = abs(rep.attained_max - rep.kin_max)
        err_min = abs(rep.attained_min - rep.kin_min)
        worst_max = max(worst_max, err_max)
        worst_min = max(worst_min, err_min)
        certified += rep.certificate
        print(
            f"instance {k:2d}  N={n_s * n_c:2d}  cert={str(rep.certificate):<5}  "
            f"violation={str(rep.violation):<5}  err_max={err_max:.2e}  "
            f"err_min={err_min:.2e}  converged {rep.converged_runs}/{rep.total_runs}"
        )
    dt = time.perf_counter() - t0
    print(
        f"\n{certified}/{args.instances} certified in {dt:.1f}s; "
        f"worst attainment error {max(worst_max, worst_min):.2e}"
    )
    return 0 if certified == args.instances else 1


if __name__ == "__main__":
    raise SystemExit(main())
