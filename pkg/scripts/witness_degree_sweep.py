"""Sup error of the witness fit against the degree cap, for several indices n.

Targets are the constants 0, 1, 2 on K and the two images of the hyperbolic
pair; the basis is polynomial plus powers of one pole just outside the disk.
"""

import argparse

from holotransit.config import load_config
from holotransit.witness import RationalWithPoles, constant, construct_witness


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--config", default="configs/witness.json")
    p.add_argument("--n", type=int, nargs="+", default=[2, 3, 4])
    p.add_argument("--degrees", type=int, nargs="+", default=[10, 20, 30, 40, 50, 60])
    p.add_argument("--pole", type=float, default=1.05)
    args = p.parse_args()
    cfg = load_config(args.config)
    targets = [constant(t) for t in range(len(cfg.maps) + 1)]
    print(f"{'n':>3} {'cap':>4} {'degree':>6} {'sup error':>11} verified")
    for n in args.n:
        for cap in args.degrees:
            fit, check = construct_witness(cfg.maps, n, cfg.compacts[0], targets,
                                           RationalWithPoles(cap, (args.pole,)),
                                           cfg.tolerances.eps_witness, cfg.domain)
            print(f"{n:3d} {cap:4d} {fit.degree:6d} {max(check.errors):11.3e} {check.ok}")


if __name__ == "__main__":
    main()
