"""Run-away sets of phi, phi o phi on the unit disk for a range of disk radii.

Prints the first member n0 and the member count for each radius, which shows
how the final segment starts later as K grows towards the boundary.
"""

import argparse

import numpy as np

from holotransit.domains import disk_region, unit_disk
from holotransit.dynamics import run_away_set
from holotransit.symbols import Composite, Mobius


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--horizon", type=int, default=200)
    p.add_argument("--radii", type=float, nargs="+", default=list(np.round(np.arange(0.1, 0.95, 0.1), 2)))
    args = p.parse_args()
    phi = Mobius(1, 0.5, 0.5, 1)
    maps = [phi, Composite((phi, phi))]
    print(f"{'radius':>7} {'n0':>5} {'members':>8} {'final segment':>14}")
    for r in args.radii:
        s = run_away_set(maps, disk_region(0, r), args.horizon, unit_disk())
        n0 = s.first_member
        tail = bool(s.members) and s.members == tuple(range(n0, args.horizon + 1))
        print(f"{r:7.2f} {n0 if n0 else '-':>5} {len(s.members):8d} {str(tail):>14}")


if __name__ == "__main__":
    main()
