"""Operator p-norm estimation and the inequality suites.

Exact norms exist at p in {1, 2, inf}; in between, seeded probes refined by
dual-norm ascent give certified lower bounds, which is the sound direction for
checking upper-bound statements.  The transform bound uses the reference
constant p* - 1; the L^1 chain records its ratios without asserting a
universal constant.
"""

import numpy as np

from lapmult import (
    Field,
    PathSpace,
    StepMultiplier,
    heat_operator,
    llogl_chain_check,
    multiplier_operator,
    multiplier_pnorm_check,
    opnorm_exact,
    opnorm_lower_estimate,
    random_reversible_generator,
    reference_constant,
    transform_pnorm_check,
)

space, gen = random_reversible_generator(seed=7, n=6)
rng = np.random.default_rng(4)
step = StepMultiplier(
    np.concatenate([[0.0], np.sort(rng.uniform(0, 3, 4))]),
    rng.standard_normal(4) + 1j * rng.standard_normal(4),
)
op, sup = multiplier_operator(gen, step)

exact2 = opnorm_exact(op, space, 2.0)
lower2 = opnorm_lower_estimate(op, space, 2.0, probes=200, ascent_steps=30, seed=1)
print(f"||T_m||_2 exact {exact2.value:.8f}, probe lower bound {lower2.value:.8f}")

result = multiplier_pnorm_check(gen, step, [1.25, 1.5, 2.0, 3.0, 4.0],
                                probes=400, ascent_steps=30, seed=9)
for report in result.reports:
    print(f"  {report.name}: ratio {report.ratio:.4f} <= {report.threshold:g} "
          f"[{report.provenance}] -> {'ok' if report.passed else 'VIOLATION'}")
print(f"growth of ratios in 1/(p-1): slope {result.fit_slope:.4f}, "
      f"intercept {result.fit_intercept:.4f} (report-only)")

# path-space transform bound plus the conditioning contraction
nspace, ngen = random_reversible_generator(seed=7, n=4, unit_mass=True)
ps = PathSpace(heat_operator(ngen, 0.4), horizon=5)
f = Field(nspace, rng.standard_normal(4))
signs = rng.choice([-1.0, 1.0], 5)
bound = transform_pnorm_check(ps, signs, f, p=3.0)
print(f"transform bound at p=3: ratio {bound.report.ratio:.4f} <= "
      f"{reference_constant(3.0):g}, contraction excess {bound.contraction_excess:.1e}")

# the L^1 chain through square and maximal functions down to L log L
chain = llogl_chain_check(ps, signs, f)
for report in chain.reports:
    print(f"  {report.name}: {report.lhs:.5f} vs {report.rhs:.5f} "
          f"(ratio {report.ratio:.4f}, report-only)")
