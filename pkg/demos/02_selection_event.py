"""
Conditioning on the selection event
===================================

Picking the top-k scores and then testing them as if nothing had happened
inflates false positives. Given the score covariance, the event "these k
features have the largest scores" is a set of linear inequalities, and the
score of a selected feature, conditioned on it, follows a truncated normal on
``[V-, V+]``. The selective p-value is the upper tail of that distribution.
"""
import numpy as np

from hsicinf import ScoreDistribution, select_top_k, selective_p_value, truncation_interval

rng = np.random.default_rng(3)
d, k = 8, 3

# a null world: all scores have mean zero and a shared covariance
G = rng.standard_normal((d, d + 4))
sigma = G @ G.T / (d + 4) * 1e-4
z = rng.multivariate_normal(np.zeros(d), sigma)
screening = select_top_k(z, k)
dist = ScoreDistribution(np.zeros(d), sigma, nblocks=1)

print("selected:", screening.selected.tolist())
for m in screening.selected:
    iv = truncation_interval(m, screening, dist)
    naive = selective_p_value(z[m], sigma[m, m], -np.inf, np.inf)
    selective = selective_p_value(z[m], sigma[m, m], iv.lower, iv.upper)
    print(f"feature {m}: z={z[m]:+.4f}  [V-, V+]=[{iv.lower:+.4f}, {iv.upper:+.4f}]  "
          f"naive p={naive:.3f}  selective p={selective:.3f}")

# with a diagonal covariance the lower limit is simply the best unselected score
diag = ScoreDistribution(np.zeros(d), np.diag(np.diag(sigma)), nblocks=1)
iv = truncation_interval(screening.selected[0], screening, diag)
print("diagonal covariance: V- =", iv.lower, "= max unselected", z[screening.unselected].max())
