"""Drift, Furstenberg-Kesten bounds and the pseudo-Anosov fraction of a random walk.

Simple random walk on <T_A, T_B> at mu = 4, 200 trajectories of 10^4 steps.
"""

import numpy as np

from thurston import bounds
from thurston import walk as wk
from thurston.construction import ThurstonRep

rep = ThurstonRep.from_mu(4.0)
spec, warnings = wk.validate_measure(wk.uniform_measure(), rep)
print("non-elementarity witness:", wk.find_nonelementary_witness(spec, rep))

config = wk.WalkConfig(steps=10_000, trajectories=200, seed=1, record_stride=10)
records = wk.run_walk(rep, spec, config)

drift = wk.drift_estimate(records)
print(f"drift L = {drift.value:.5f} +- {drift.std_error:.5f}")

fk = wk.fk_upper_bounds(records)
print("Furstenberg-Kesten running minimum:", round(fk[-1].running_min, 5))

# (1/n) log lambda(omega_n) approaches the drift
for row in wk.spectral_report(records, drift.value):
    if row.n in (10, 100, 1000, 10_000):
        print(f"n={row.n:6d}  pA fraction {row.fraction_pa:.3f}  mean |log lambda / n - L| {row.mean_abs_deviation:.4f}")

last = np.array(list(wk.last_non_pa_by_traj(records).values()))
print("last non-pA step: median", np.median(last), "max", last.max())

# entropy bounds hyperbolic volume of the mapping torus for genus 2
print("volume bound (g = 2):", bounds.volume_upper_bound(2, drift.value))
