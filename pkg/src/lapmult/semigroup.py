"""Reversible Markov generators and kernels, the heat semigroup, and its condition checks."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .space import WeightedSpace, _frozen

__all__ = [
    "ReversibleGenerator",
    "MarkovKernel",
    "ConditionReport",
    "random_reversible_generator",
    "heat_operator",
    "verify_markov_conditions",
]

_CONSTRUCTION_TOL = 1e-8
_HEAT_TOL = 1e-10

_INTERPOLATION_NOTE = (
    "contraction for intermediate 1 < p < inf follows from the "
    "p in {1, inf} endpoints by interpolation; it is not re-verified per p"
)


@dataclass(frozen=True, eq=False)
class ReversibleGenerator:
    """Generator A of a reversible chain: T^t = e^{-tA} is the associated semigroup.

    Invariants enforced at construction (within a small tolerance, to admit
    matrices read from config files): nonpositive off-diagonal, nonnegative
    diagonal, zero row sums, and detailed balance dx_i A_ij = dx_j A_ji.
    """

    space: WeightedSpace
    entries: np.ndarray

    def __post_init__(self) -> None:
        a = np.array(self.entries, dtype=float)
        n = self.space.n
        if a.shape != (n, n):
            raise ValueError(f"generator must be {n}x{n}, got {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValueError("generator entries must be finite")
        scale = max(1.0, float(np.abs(a).max()))
        tol = _CONSTRUCTION_TOL * scale
        off = a - np.diag(np.diag(a))
        if off.max(initial=0.0) > tol:
            raise ValueError("off-diagonal generator entries must be <= 0")
        if np.diag(a).min() < -tol:
            raise ValueError("diagonal generator entries must be >= 0")
        if np.abs(a.sum(axis=1)).max() > tol:
            raise ValueError("generator rows must sum to 0 (conservation)")
        w = self.space.weights
        defect = np.abs(w[:, None] * a - (w[:, None] * a).T).max()
        if defect > tol * max(1.0, float(w.max())):
            raise ValueError("generator violates detailed balance")
        object.__setattr__(self, "entries", _frozen(a))

    def to_dict(self) -> dict:
        """Dense row-major serialization with the weight vector."""
        return {
            "weights": self.space.weights.tolist(),
            "entries": self.entries.tolist(),
        }


@dataclass(frozen=True, eq=False)
class MarkovKernel:
    """One-step kernel Q on a weighted space, with the time step it represents.

    Construction only checks shape and finiteness; conformance to the Markov
    conditions (positivity, conservation, symmetry, contraction) is measured
    by :func:`verify_markov_conditions`, which must be able to receive broken
    kernels and report their defects.
    """

    space: WeightedSpace
    entries: np.ndarray
    step: float = 1.0

    def __post_init__(self) -> None:
        q = np.array(self.entries, dtype=float)
        n = self.space.n
        if q.shape != (n, n):
            raise ValueError(f"kernel must be {n}x{n}, got {q.shape}")
        if not np.all(np.isfinite(q)):
            raise ValueError("kernel entries must be finite")
        if not (self.step >= 0.0 and math.isfinite(self.step)):
            raise ValueError("kernel step must be a finite nonnegative real")
        object.__setattr__(self, "entries", _frozen(q))

    def to_dict(self) -> dict:
        """Dense row-major serialization with the weight vector."""
        return {
            "weights": self.space.weights.tolist(),
            "entries": self.entries.tolist(),
            "step": self.step,
        }


def random_reversible_generator(
    seed,
    n: int,
    conductance_scale: float = 1.0,
    unit_mass: bool = False,
) -> tuple[WeightedSpace, ReversibleGenerator]:
    """Sample a weighted space and a reversible generator from symmetric conductances.

    Point masses are uniform on [0.5, 1.5] (rescaled to total mass one when
    ``unit_mass``), conductances c_ij = c_ji are uniform on [0, scale], and
    A_ij = -c_ij/dx_i off the diagonal with A_ii = sum_j c_ij/dx_i.  All
    generator invariants then hold by construction, and the output is
    deterministic in ``seed``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    w = rng.uniform(0.5, 1.5, size=n)
    if unit_mass:
        w = w / w.sum()
    c = np.triu(rng.uniform(0.0, conductance_scale, size=(n, n)), 1)
    c = c + c.T
    a = -c / w[:, None]
    np.fill_diagonal(a, 0.0)
    np.fill_diagonal(a, -a.sum(axis=1))
    space = WeightedSpace(w)
    return space, ReversibleGenerator(space, a)


def heat_operator(generator: ReversibleGenerator, t: float) -> MarkovKernel:
    """T^t = e^{-tA} computed through the spectral decomposition of A.

    Entries are clipped to [0, 1] only for violations below 1e-10; anything
    larger signals a broken generator and raises.
    """
    if not (t >= 0.0 and math.isfinite(t)):
        raise ValueError("time must be a finite nonnegative real")
    from .spectral import decompose, operator_matrix  # deferred: spectral sits on this module

    dec = decompose(generator)
    m = operator_matrix(dec, lambda lam: math.exp(-t * lam)).real
    worst = float(m.min())
    if worst < -_HEAT_TOL:
        raise ValueError(
            f"heat kernel entry {worst:.3e} below -{_HEAT_TOL}; generator is broken"
        )
    m = np.clip(m, 0.0, 1.0)
    row_defect = float(np.abs(m.sum(axis=1) - 1.0).max())
    if row_defect > _HEAT_TOL:
        raise ValueError(f"heat kernel row sums off by {row_defect:.3e}")
    return MarkovKernel(generator.space, m, step=t)


@dataclass(frozen=True, eq=False)
class ConditionReport:
    """Per-condition maximal violations for a kernel, measured against ``tol``."""

    positivity_violation: float
    conservation_violation: float
    symmetry_violation: float
    contraction_violation_p1: float
    contraction_violation_pinf: float
    tol: float
    note: str = _INTERPOLATION_NOTE

    @property
    def max_violation(self) -> float:
        return max(
            self.positivity_violation,
            self.conservation_violation,
            self.symmetry_violation,
            self.contraction_violation_p1,
            self.contraction_violation_pinf,
        )

    @property
    def passed(self) -> bool:
        return self.max_violation <= self.tol

    def to_dict(self) -> dict:
        return {
            "positivity_violation": self.positivity_violation,
            "conservation_violation": self.conservation_violation,
            "symmetry_violation": self.symmetry_violation,
            "contraction_violation_p1": self.contraction_violation_p1,
            "contraction_violation_pinf": self.contraction_violation_pinf,
            "tol": self.tol,
            "passed": self.passed,
            "note": self.note,
        }


def verify_markov_conditions(kernel: MarkovKernel, tol: float = 1e-10) -> ConditionReport:
    """Measure positivity, conservation, symmetry, and endpoint contraction of Q."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    from .inequalities import opnorm_exact  # deferred: inequalities sits on this module

    q = kernel.entries
    w = kernel.space.weights
    positivity = max(0.0, -float(q.min()))
    conservation = float(np.abs(q.sum(axis=1) - 1.0).max())
    symmetry = float(np.abs(w[:, None] * q - w[None, :] * q.T).max())
    contr_1 = max(0.0, opnorm_exact(q, kernel.space, 1.0).value - 1.0)
    contr_inf = max(0.0, opnorm_exact(q, kernel.space, math.inf).value - 1.0)
    return ConditionReport(
        positivity_violation=positivity,
        conservation_violation=conservation,
        symmetry_violation=symmetry,
        contraction_violation_p1=contr_1,
        contraction_violation_pinf=contr_inf,
        tol=tol,
    )
