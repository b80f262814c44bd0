"""
Robust building blocks
======================

The robust fit is assembled from a few primitives: redescending weight
functions, a residual scale that ignores outliers, a multivariate median,
and bisquare M-regression with a data-driven tuning constant.  Each one is
shown on its own here.
"""

import numpy as np

from rfpls import (hampel_f, hampel_weight, l1_median, m_estimate, mad_scale,
                   select_tuning, tukey_rho)

# The three-part Hampel function: flat, then constant, then a descent to
# zero.  Observations past the last cutoff are ignored entirely.
print("Hampel function and derived weight:")
for x in (0.5, 1.0, 1.8, 2.5, 3.5):
    print(f"  x={x:4.1f}  f(x)={hampel_f(x):6.4f}  weight={hampel_weight(x):6.4f}")

# Tukey's bisquare loss saturates at 1, so one wild residual contributes
# no more than a moderately bad one.
print("\nbisquare loss (c = 4.685):")
for u in (0.0, 2.0, 4.685, 20.0):
    print(f"  u={u:6.3f}  rho={tukey_rho(u, 4.685):.4f}")

# MAD scale: the median absolute deviation shrugs off the 100.
sample = np.array([1.0, 2.0, 3.0, 4.0, 100.0])
print("\nMAD of", sample.tolist(), "=", mad_scale(sample),
      " (standard deviation would be", f"{sample.std(ddof=1):.1f})")

# The L1 median stays near the cloud even when a quarter of the points run
# away; the coordinate mean does not.
rng = np.random.default_rng(2)
cloud = rng.normal(size=(40, 2))
cloud[:10] += 25.0
print("\n2-d sample, 10 of 40 points shifted by +25 in both coordinates:")
print("  mean     :", np.array2string(cloud.mean(axis=0), precision=3))
print("  L1 median:", np.array2string(l1_median(cloud), precision=3))

# M-regression with the bisquare: vertical outliers get weight zero and the
# slope estimate stays put.
x = np.linspace(0.0, 4.0, 80)
y = 1.0 + 2.0 * x + 0.4 * rng.normal(size=80)
bad = np.arange(0, 80, 16)
y[bad] += 18.0 * (-1.0) ** np.arange(bad.size)
X = x[:, None]

ls = np.linalg.lstsq(np.column_stack([np.ones(80), x]), y, rcond=None)[0]
c = select_tuning(X, y)
robust = m_estimate(X, y, c)
print("\nline fit with 5 planted vertical outliers (truth: intercept 1, slope 2):")
print(f"  least squares : intercept {ls[0]:6.3f}  slope {ls[1]:6.3f}")
print(f"  M-estimate    : intercept {robust.intercept:6.3f}  "
      f"slope {robust.delta[0]:6.3f}  (tuned c = {c:.2f})")
print("  outlier weights:", np.array2string(robust.weights[bad], precision=3))
print("  converged in", robust.iterations, "iterations")
