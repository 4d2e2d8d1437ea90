"""Print the per-channel efficiency table and the efficiency/complexity ranking."""

from nrthreat.threat import assess, ranking_scatter, round_db

entries = assess()
print(f"{'channel':<20}{'% REs':>8}{'J/S_CH':>8}{'J/S_F':>10}{'display':>9}{'cplx':>6}")
for e in entries:
    print(f"{e.channel:<20}{100 * e.re_fraction:>8.2f}{e.js_ch_db:>8.1f}"
          f"{e.js_frame_db:>10.2f}{round_db(e.js_frame_db):>9d}{e.complexity_score:>6d}")

print("\nranking (most efficient first)")
for p in sorted(ranking_scatter(entries), key=lambda p: (-p.efficiency_db, p.complexity)):
    print(f"  {p.attack:<20}{p.efficiency_db:>7.2f} dB  complexity {p.complexity}")
