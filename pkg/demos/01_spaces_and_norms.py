"""Weighted spaces, fields, and the three norms.

A WeightedSpace is a finite state set with point masses; a Field is a complex
function on it.  Everything downstream is computed against the weighted
measure: L^p norms, the weighted inner product, and the Orlicz-type
L log L norm (a Luxemburg norm for s log(e + s), found by bisection).
"""

import numpy as np

from lapmult import Field, WeightedSpace, constant_field, llogl_norm, lp_norm, weighted_inner

space = WeightedSpace([0.2, 0.3, 0.5])
print(f"space with {space.n} points, total mass {space.total_mass}")

f = Field(space, [1.0, -2.0, 1.0 + 1.0j])
for p in (1.0, 2.0, 4.0, np.inf):
    print(f"  ||f||_{p:g} = {lp_norm(f, p):.6f}")

# norms are nondecreasing in p exactly when the total mass is one
print("norms grow with p on probability spaces:",
      lp_norm(f, 1.0) <= lp_norm(f, 2.0) <= lp_norm(f, np.inf))

g = constant_field(space)
print(f"<f, 1> = {weighted_inner(f, g):.6f} (the weighted mean of f)")
print(f"<f, f> = {weighted_inner(f, f).real:.6f} = ||f||_2^2 = {lp_norm(f, 2.0)**2:.6f}")

# the L log L norm is homogeneous and dominates the L^1 norm on unit mass
print(f"||f||_LlogL = {llogl_norm(f):.6f} >= ||f||_1 = {lp_norm(f, 1.0):.6f}")
print(f"||2f||_LlogL / ||f||_LlogL = {llogl_norm(2.0 * f) / llogl_norm(f):.12f}")
