# %% [markdown]
# Kahler bases
#
# On a Kahler base the density has only even powers of p and its p^2
# coefficient is a multiple of Tr(Omega^2). S2 x S2 with the product
# form has Tr(Omega^2) = 0 pointwise; CP2 does not, which fixes the sign.

# %%
import numpy as np

from wcsbundle import geometry as geo
from wcsbundle.kahler import prop52_check

s2s2 = geo.compatible_triple(geo.sphere_product_metric(), geo.sphere_product_form())
res = prop52_check(s2s2, 1, [[1.0, 0.5, 2.0, 1.5], [0.7, 3.0, 1.2, 0.2]])
print("S2xS2 lhs", res.lhs, "rhs", res.rhs)

# %%
cp2 = geo.compatible_triple(geo.fubini_study_metric(), geo.fubini_study_form())
res = prop52_check(cp2, 1, np.array([[0.1, 0.2, -0.3, 0.4]]))
print("CP2 lhs", res.lhs, "rhs", res.rhs)
print("odd powers:", res.odd, "beta class:", res.beta)
