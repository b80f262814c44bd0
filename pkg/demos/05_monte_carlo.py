"""
A small Monte Carlo study
=========================

Runs the replication harness at reduced size: two estimators across three
contamination levels, eight replications.  Every replication draws fresh
training and test samples, picks the component count by trimmed CV,
and records estimation and prediction metrics.  Seeding is keyed to the
replication index, so reruns and multi-process runs give identical rows.

The full-size experiment (100 replications, four levels, 200 + 200
samples) is what the acceptance tests run; it is also reachable from the
command line as `rfpls simulate --config <ini> --out results.csv`.
"""

import time

import numpy as np

from rfpls import ExperimentConfig, run_experiment

config = ExperimentConfig(methods=("fpls", "rfpls"),
                          contamination_levels=(0.0, 0.05, 0.10),
                          replications=8,
                          n_train=100, n_test=100,
                          num_basis=15, max_components=5,
                          cv_folds=5, trim_alpha=0.1, seed=3)

print("replications:", config.replications,
      " levels:", list(config.contamination_levels),
      " methods:", list(config.methods))
start = time.perf_counter()
result = run_experiment(config)
print(f"finished in {time.perf_counter() - start:.1f}s with "
      f"{len(result.failures)} failed cells\n")

# Median metrics per cell, the same summary the CLI writes as CSV.
print("median trimmed MSPE (clean test sets):")
print("  level   " + "".join(f"{m:>9}" for m in config.methods))
for level in config.contamination_levels:
    cells = [result.median(m, level, "trimmed_mspe") for m in config.methods]
    print(f"  {level:5.2f}  " + "".join(f" {v:8.3f}" for v in cells))

print("\nmedian estimation error for the first coefficient function:")
print("  level   " + "".join(f"{m:>9}" for m in config.methods))
for level in config.contamination_levels:
    cells = [result.median(m, level, "risee", "beta1") for m in config.methods]
    print(f"  {level:5.2f}  " + "".join(f" {v:8.3f}" for v in cells))

print("\ncomponent counts chosen by cross-validation (all cells):")
for method in config.methods:
    counts = np.concatenate([result.values(method, lv, "chosen_h")
                             for lv in config.contamination_levels])
    values, freq = np.unique(counts.astype(int), return_counts=True)
    shown = ", ".join(f"h={v}: {f}" for v, f in zip(values, freq))
    print(f"  {method:6s} {shown}")

print("\nthe contamination level barely moves the robust rows while the")
print("classical ones drift upward; the acceptance suite checks the same")
print("pattern at full size with pass/fail margins.")
