# The bench layer: TOML presets, seeded Monte Carlo runs, CSV output.
# The same thing from a shell:
#
#     decbandit bounds --config src/decbandit/bench/presets/fig4_bernoulli_vs_N.toml
#     decbandit run --config <preset> --trials 20 --out out/fig4
#     decbandit sweep --config <preset> --trials 20 --out out/fig4_sweep

import tempfile
from pathlib import Path

from decbandit.bench.config import load_preset, preset_names
from decbandit.bench.runner import run_experiment, run_sweep

print("presets:", ", ".join(preset_names()))

cfg = load_preset("fig4_bernoulli_vs_N").replace(trials=10, T=2000)
out = Path(tempfile.mkdtemp())
res = run_experiment(cfg, out_dir=out)
for k, v in res.summary().items():
    print(f"  {k:26s} {v}")
print((out / "regret.csv").read_text().splitlines()[0])

# leading constant against N (small run, so the error bars are wide)
for row in run_sweep(cfg, "N", [3, 5, 7, 9]):
    print(f"N={row['value']}: {row['leading_constant_mean']:.2f} +/- {row['stderr']:.2f}  "
          f"(tds bound {row['tds_constant']:.2f})")
