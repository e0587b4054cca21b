# %% [markdown]
# Bundle curvature two ways
#
# The polynomial assembly from base data alone against a direct chart
# computation of the 5D total-space metric, both in the lifted frame.

# %%
import numpy as np

from wcsbundle.bundle import bar_curvature, direct_bundle_curvature, frame_components, lifted_frame
from wcsbundle.thurston import thurston_base, thurston_potential

tri, pot = thurston_base(1), thurston_potential(1)
x5 = np.array([0.1, 0.2, 0.6, 0.3, 0.9])
bc = bar_curvature(tri, x5[1:])

for p in (1, 2, 3):
    F = lifted_frame(bc.frame, pot, p, x5[1:])
    direct = frame_components(direct_bundle_curvature(tri, pot, p, x5).riemann, F)
    assembled = bc.evaluate(p)
    print(p, np.abs(direct - assembled).max() / np.abs(assembled).max())

# %%
# grade by grade: p^0 is the lifted base curvature, p^1 carries nabla J
for q, block in enumerate(bc.components.grades):
    print(q, np.abs(block).max())
