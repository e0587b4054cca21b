# %% [markdown]
# Top coefficients on flat data
#
# With a flat base and constant normal-form J the bundle curvature is
# constant, so the whole density is one signed permutation sum. The top
# power of p is compared with the Pfaffian closed form.

# %%
import numpy as np

from wcsbundle.cli import flat_density
from wcsbundle.tensor import normal_form_J
from wcsbundle.wcs import dim_4n_plus_2_vanishing, top_coefficient_closed_form

for dim in (4, 6, 8):
    dens, J0 = flat_density(dim)
    print(f"dim {dim}: density = {dens.poly.coeffs}")

# %%
# dims 4 and 8 have a closed form; dim 6 cancels, judged against term sizes
for dim in (4, 8):
    dens, J0 = flat_density(dim)
    print(dim, dens.raw[dim + 2], top_coefficient_closed_form(J0, np.eye(dim)))

value, scale = dim_4n_plus_2_vanishing(np.eye(6), normal_form_J(6))
print(f"dim 6: S = {value:.3g}, term scale = {scale:.3g}")
