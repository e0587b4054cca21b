# %% [markdown]
# The Thurston manifold
#
# Base metric and form depend only on theta2, through
# beta = 1 + theta2 - theta2**2. The density at each theta2 is a
# polynomial in p; integrating over theta2 gives a nonzero number for
# every nonzero integer p.

# %%
import numpy as np

from wcsbundle.thurston import (
    QuadratureSpec,
    closed_form_integral,
    closed_form_integrand,
    nonvanishing_check,
    quartic_roots,
    thurston_density,
    thurston_integral,
)

poly = thurston_density(1.0, 0.3)
print("density at theta2 = 0.3:", poly.coeffs)
print("closed form at p = 1:", closed_form_integrand(1.0, 0.3), "chain sum:", poly(1.0))

# %%
quad = QuadratureSpec(64)
for p in (1, 2, 3):
    print(p, thurston_integral(p, 1, quad), closed_form_integral(p, 1))

# %%
# the integrated expression only vanishes off the integers
print("roots in p:", np.round(quartic_roots(), 6))
print("zero at an integer p?", [p for p in range(-10, 11) if p and not nonvanishing_check(p)[1]])
