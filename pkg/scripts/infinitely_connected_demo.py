"""Walk the infinitely connected fixture: members, image holes and union checks.

For each run-away index the script lists how many holes every image has, whether
each image is Omega-convex, and the result of the union check.
"""

import argparse

from holotransit.config import load_config
from holotransit.decider import union_convexity_check
from holotransit.domains import is_omega_convex
from holotransit.dynamics import image_of_compact, run_away_set
from holotransit.symbols import IterateSpec


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--config", default="configs/infinitely_connected.json")
    p.add_argument("--horizon", type=int)
    args = p.parse_args()
    cfg = load_config(args.config)
    H = args.horizon or cfg.horizon
    K = cfg.compacts[0]
    print(f"K = {cfg.compact_labels[0]}: {K.hole_count()} holes, "
          f"{len(cfg.domain.excluded)} excluded disks")
    s = run_away_set(cfg.maps, K, H, cfg.domain, require_convexity=True)
    for r in s.rejections[:10]:
        print(f"  n={r.n:3d} rejected: {r.reason}")
    for n in s.members:
        imgs = [image_of_compact(IterateSpec(m, n), K).absolute() for m in cfg.maps]
        conv = [bool(is_omega_convex(im, cfg.domain)) for im in imgs]
        union = union_convexity_check(K, imgs, cfg.domain)
        print(f"  n={n:3d} holes={[im.hole_count() for im in imgs]} convex={conv} union={bool(union)}")


if __name__ == "__main__":
    main()
