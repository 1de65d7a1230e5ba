"""The product path space: reverse martingales and conditional expectations.

Paths (x_0, ..., x_N) carry the measure nu(x_0) Q(x_0,x_1) ... Q(x_{N-1},x_N).
The level fields g_k = Q^k f make f_k = g_k(x_k) a reverse martingale, and
conditioning on x_0 realizes even kernel powers: E[f_k | x_0] = Q^{2k} f.
Choosing Q = T^{eps/2} therefore recovers the heat semigroup at times k*eps,
and conditioned martingale transforms recover the multiplier operators.
"""

import numpy as np

from lapmult import (
    Field,
    PathSpace,
    dilation_identity_check,
    hat_expectation,
    heat_operator,
    martingale_transform,
    path_lp_norm,
    random_reversible_generator,
    reverse_martingale,
    square_and_maximal,
    transform_expectation_identity,
)

epsilon = 0.8
space, gen = random_reversible_generator(seed=7, n=4)
kernel = heat_operator(gen, epsilon / 2.0)
ps = PathSpace(kernel, horizon=5)
print(f"{ps.n_states} states, horizon {ps.horizon}: {ps.path_count} paths")

rng = np.random.default_rng(3)
f = Field(space, rng.standard_normal(4) + 1j * rng.standard_normal(4))

for k in range(ps.horizon + 1):
    report = dilation_identity_check(ps, f, k, generator=gen)
    print(f"  k={k}: |E[f_k|x0] - Q^{2 * k} f| = {report.deviation_kernel_power:.2e}, "
          f"vs T^(k eps) f = {report.deviation_heat:.2e}")

# a martingale transform and its conditioned closed form
m_values = rng.standard_normal(5) + 1j * rng.standard_normal(5)
identity = transform_expectation_identity(ps, m_values, f, generator=gen)
print("transform identity deviations:",
      f"{identity.deviation_kernel_powers:.2e} (kernel powers),",
      f"{identity.deviation_telescoping:.2e} (telescoped operator)")

# path-space L^p norms, exactly and by stratified Monte Carlo
transform = martingale_transform(ps, m_values, f)
exact = path_lp_norm(ps, transform, 2.0)
estimate, stderr = path_lp_norm(ps, transform, 2.0, mode="mc", seed=11, samples=20000)
print(f"||S||_2 exact {exact:.6f}, MC {estimate:.6f} +- {stderr:.6f}")

# the square and maximal functions behind the L^1 theory
family = reverse_martingale(ps, f)
square_fn, maximal_fn = square_and_maximal(ps, family)
print(f"E[square fn] = {path_lp_norm(ps, square_fn, 1.0):.6f}, "
      f"E[maximal fn] = {path_lp_norm(ps, maximal_fn, 1.0):.6f}")
conditioned = hat_expectation(ps, transform)
print("conditioned transform values:", np.array_str(conditioned.values, precision=4))
