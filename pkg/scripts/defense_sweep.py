"""P_DoS with and without the blacklist defense, plus blacklist growth under rotation."""

import argparse
import math
from dataclasses import replace

from nrthreat.defense import AttackerModel, SearchConfig, blacklist_growth, sweep_power_offset

ap = argparse.ArgumentParser(description=__doc__)
ap.add_argument("--trials", type=int, default=1000)
ap.add_argument("--seed", type=int, default=0)
args = ap.parse_args()

attacker, search = AttackerModel(), SearchConfig()
print("offset_db  P_DoS(off)        P_DoS(on)")
for off, arms in sweep_power_offset([-10, -4, -2, 0, 2, 4, 6, 10], attacker, search,
                                    trials=args.trials, seed=args.seed):
    u, m = arms["unmitigated"], arms["mitigated"]
    print(f"{off:+8.1f}  {u.point_estimate:.3f}±{u.confidence_halfwidth_95:.3f}"
          f"   {m.point_estimate:.3f}±{m.confidence_halfwidth_95:.3f}")

print("\nrotating attacker, 10 s, blacklist peak size")
rotating = replace(attacker, rotate_each_frame=True)
for decay in (100.0, 1000.0, math.inf):
    for bucket in (search.timing_bucket_samples, 1):
        out = blacklist_growth(rotating, replace(search, decay_ms=decay, timing_bucket_samples=bucket))
        print(f"  decay {decay:>6} ms  bucket {bucket:>5} samples  peak {out.peak_blacklist_size}")
