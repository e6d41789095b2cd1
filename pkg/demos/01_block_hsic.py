"""
Block HSIC scores
=================

The block estimator cuts the sample into blocks of B points, computes an
unbiased HSIC inside each block and averages. Under independence every block
value has mean zero, and by the central limit theorem the average is close to
Gaussian, which is what the selective test needs.
"""
import numpy as np

from hsicinf import KernelSpec, hsic_vector, partition_blocks

rng = np.random.default_rng(0)
n, B = 3000, 10
gauss = KernelSpec.gaussian(1.0)

# two features: one drives y through a sine, one is pure noise
X = rng.standard_normal((n, 2))
y = np.sin(2 * X[:, 0]) + 0.3 * rng.standard_normal(n)

z, stats = hsic_vector(X, y, gauss, gauss, partition_blocks(n, B))
print(f"{stats.nblocks} blocks of {B}")
print("scores (dependent, independent):", np.round(z, 5))

# standard error of each score from the spread of its block values
se = stats.eta.std(axis=0, ddof=1) / np.sqrt(stats.nblocks)
print("scores in standard errors:", np.round(z / se, 2))

# block values of the independent feature are centred on zero
eta = stats.eta[:, 1]
print(f"independent feature: mean {eta.mean():.2e}, sd {eta.std(ddof=1):.2e}")

# a shuffled partition gives a different but equally valid estimate
z_shuffled, _ = hsic_vector(X, y, gauss, gauss, partition_blocks(n, B, order=rng))
print("scores with shuffled blocks:", np.round(z_shuffled, 5))
