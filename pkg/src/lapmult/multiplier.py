"""Symbols of Laplace-transform type and their operators.

A bounded M on (0, inf) induces m(lam) = -lam * integral_0^inf M(t) e^{-t lam} dt
(with m(0) = 0), and T_m = m(A) by spectral calculus.  Step functions admit an
exact closed form; sampled functions go through certified quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.special import gamma as complex_gamma

from .semigroup import ReversibleGenerator, heat_operator
from .space import Field, lp_norm
from .spectral import SpectralDecomposition, spectral_apply

__all__ = [
    "StepMultiplier",
    "SampledMultiplier",
    "MultiplierSymbol",
    "symbol_of_step",
    "symbol_of_sampled",
    "apply_Tm",
    "telescoping_Tm",
    "imaginary_power_preset",
    "approximate_by_steps",
    "step_convergence_check",
    "StepConvergenceReport",
]


@dataclass(frozen=True, eq=False)
class StepMultiplier:
    """M = sum_i values[i] * 1_{[t_i, t_{i+1})} with 0 = t_0 <= ... <= t_N; zero beyond t_N."""

    breakpoints: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        bp = np.array(self.breakpoints, dtype=float)
        vals = np.array(self.values, dtype=complex)
        if bp.ndim != 1 or vals.ndim != 1 or bp.size != vals.size + 1:
            raise ValueError("need N+1 breakpoints for N piece values")
        if not np.all(np.isfinite(bp)) or not np.all(np.isfinite(vals)):
            raise ValueError("breakpoints and values must be finite")
        if bp[0] != 0.0:
            raise ValueError("first breakpoint must be 0")
        if np.any(np.diff(bp) < 0.0):
            raise ValueError("breakpoints must be nondecreasing")
        bp.setflags(write=False)
        vals.setflags(write=False)
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", vals)

    @property
    def sup_norm(self) -> float:
        return float(np.abs(self.values).max()) if self.values.size else 0.0


@dataclass(frozen=True, eq=False)
class SampledMultiplier:
    """A bounded sampler M(t) with a truncation window [0, T] and quadrature grid.

    ``sampler`` should accept an ndarray of times and return the matching array
    of values; scalar-only callables are wrapped transparently.  ``grid_size``
    is rounded up so the point count is 4m+1, which keeps both the full and the
    half grid valid for composite Simpson quadrature.
    """

    sampler: Callable[[np.ndarray], np.ndarray]
    truncation: float
    grid_size: int
    declared_sup: float

    def __post_init__(self) -> None:
        if not (self.truncation > 0.0 and math.isfinite(self.truncation)):
            raise ValueError("truncation must be a finite positive real")
        if self.grid_size < 5:
            raise ValueError("grid_size must be at least 5")
        if not (self.declared_sup >= 0.0 and math.isfinite(self.declared_sup)):
            raise ValueError("declared_sup must be a finite nonnegative real")
        size = int(self.grid_size)
        if (size - 1) % 4:
            size += 4 - (size - 1) % 4
        object.__setattr__(self, "grid_size", size)
        grid = np.linspace(0.0, self.truncation, size)
        vals = _eval_sampler(self.sampler, grid)
        bound = self.declared_sup + 1e-12 * (1.0 + self.declared_sup)
        if np.abs(vals).max() > bound:
            raise ValueError("sampler exceeds declared_sup on the grid")
        grid.setflags(write=False)
        vals.setflags(write=False)
        object.__setattr__(self, "_grid", grid)
        object.__setattr__(self, "_grid_values", vals)


@dataclass(frozen=True, eq=False)
class MultiplierSymbol:
    """m(lam) with its provenance and a per-lam bound on the evaluation error.

    Always m(0) = 0, and |m(lam)| <= sup|M| + error_bound(lam).
    """

    evaluator: Callable[[float], complex]
    provenance: str
    error_bound: Callable[[float], float]


def _eval_sampler(sampler: Callable, t: np.ndarray) -> np.ndarray:
    out = np.asarray(sampler(t))
    if out.shape != t.shape:
        out = np.asarray([sampler(float(x)) for x in t])
    if not np.all(np.isfinite(out)):
        raise ValueError("sampler returned non-finite values")
    return out.astype(complex)


def symbol_of_step(step: StepMultiplier) -> MultiplierSymbol:
    """Exact closed form m(lam) = sum_i M_i (e^{-lam t_{i+1}} - e^{-lam t_i})."""
    bp = step.breakpoints
    vals = step.values

    def evaluator(lam: float) -> complex:
        if lam == 0.0:
            return 0j
        e = np.exp(-lam * bp)
        return complex(vals @ (e[1:] - e[:-1]))

    return MultiplierSymbol(evaluator, "step-closed-form", lambda lam: 0.0)


def _simpson_weights(npoints: int, h: float) -> np.ndarray:
    w = np.full(npoints, 2.0)
    w[1::2] = 4.0
    w[0] = w[-1] = 1.0
    return w * (h / 3.0)


def symbol_of_sampled(sampled: SampledMultiplier) -> MultiplierSymbol:
    """Quadrature symbol with a certified per-lam error report.

    m(lam) is composite Simpson on the uniform grid over [0, T].  The reported
    error adds three parts: the Richardson difference between the full and the
    half grid (smooth part of the integrand), an analytic cap on the first cell
    (samplers may oscillate or be undefined as t -> 0), and the truncation tail
    bound sup|M| * e^{-lam T}.
    """
    t = sampled._grid
    mv = sampled._grid_values
    h = float(t[1] - t[0])
    sup = sampled.declared_sup
    tmax = sampled.truncation
    w_full = _simpson_weights(t.size, h)
    w_half = _simpson_weights((t.size + 1) // 2, 2.0 * h)

    def _quadratures(lam: float) -> tuple[complex, complex]:
        g = mv * np.exp(-lam * t)
        return complex(w_full @ g), complex(w_half @ g[::2])

    def evaluator(lam: float) -> complex:
        if lam == 0.0:
            return 0j
        s_full, _ = _quadratures(lam)
        return -lam * s_full

    def error_bound(lam: float) -> float:
        if lam == 0.0:
            return 0.0
        s_full, s_half = _quadratures(lam)
        richardson = abs(lam) * abs(s_full - s_half)
        first_cell = sup * (1.0 - math.exp(-2.0 * lam * h)) + sup * lam * (h / 3.0) * (
            1.0 + 4.0 * math.exp(-lam * h) + math.exp(-2.0 * lam * h)
        )
        tail = sup * math.exp(-lam * tmax)
        return richardson + first_cell + tail

    return MultiplierSymbol(evaluator, "quadrature", error_bound)


def apply_Tm(dec: SpectralDecomposition, symbol: MultiplierSymbol, f: Field) -> Field:
    """T_m f through the spectral calculus: sum_k m(lam_k) <f, u_k> u_k."""
    return spectral_apply(dec, symbol.evaluator, f)


def telescoping_Tm(generator: ReversibleGenerator, step: StepMultiplier, f: Field) -> Field:
    """sum_i M_i (T^{t_{i+1}} f - T^{t_i} f), built from heat kernels only.

    Must agree with apply_Tm(symbol_of_step(step)) to working precision; the
    two routes share nothing beyond the eigensolver.
    """
    out = np.zeros(generator.space.n, dtype=complex)
    for mi, t0, t1 in zip(step.values, step.breakpoints[:-1], step.breakpoints[1:]):
        later = heat_operator(generator, float(t1)).entries @ f.values
        earlier = heat_operator(generator, float(t0)).entries @ f.values
        out += mi * (later - earlier)
    return Field(f.space, out)


def imaginary_power_preset(
    gamma: float, t_max: float = 48.0, grid_size: int = 24001
) -> SampledMultiplier:
    """M(t) = -t^{-i gamma} / Gamma(1 - i gamma), whose symbol is lam^{i gamma} for lam > 0.

    |M| is the constant 1/|Gamma(1 - i gamma)|.  The sign and normalization are
    fixed so that the quadrature symbol reproduces lam^{i gamma} within its
    reported error.
    """
    if not (math.isfinite(gamma) and abs(gamma) <= 10.0):
        raise ValueError("gamma must be finite with |gamma| <= 10")
    g = complex(complex_gamma(1.0 - 1j * gamma))

    def sampler(t):
        arr = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.zeros(arr.shape, dtype=complex)
        pos = arr > 0.0
        out[pos] = -np.exp(-1j * gamma * np.log(arr[pos])) / g
        if gamma == 0.0:
            out[~pos] = -1.0 / g
        return out.reshape(np.shape(t))

    return SampledMultiplier(sampler, t_max, grid_size, 1.0 / abs(g))


def approximate_by_steps(sampled: SampledMultiplier, n: int) -> StepMultiplier:
    """Midpoint step approximation of M on n equal pieces of [0, T].

    Converges pointwise a.e. to M for piecewise-continuous samplers, and its
    sup norm never exceeds declared_sup.
    """
    if n < 1:
        raise ValueError("need at least one piece")
    bp = np.linspace(0.0, sampled.truncation, n + 1)
    mids = 0.5 * (bp[:-1] + bp[1:])
    return StepMultiplier(bp, _eval_sampler(sampled.sampler, mids))


@dataclass(frozen=True, eq=False)
class StepConvergenceReport:
    """L^2 errors of step-approximated operators against the quadrature operator."""

    piece_counts: tuple[int, ...]
    errors: tuple[float, ...]
    tol: float
    jitter: float

    @property
    def final_error(self) -> float:
        return self.errors[-1]

    @property
    def monotone_ok(self) -> bool:
        return all(
            later <= earlier * (1.0 + self.jitter)
            for earlier, later in zip(self.errors[:-1], self.errors[1:])
        )

    @property
    def passed(self) -> bool:
        return self.final_error < self.tol and self.monotone_ok

    def to_dict(self) -> dict:
        return {
            "piece_counts": list(self.piece_counts),
            "errors": list(self.errors),
            "tol": self.tol,
            "jitter": self.jitter,
            "final_error": self.final_error,
            "monotone_ok": self.monotone_ok,
            "passed": self.passed,
        }


def step_convergence_check(
    dec: SpectralDecomposition,
    sampled: SampledMultiplier,
    f: Field,
    piece_counts: Sequence[int],
    tol: float,
    jitter: float = 0.10,
) -> StepConvergenceReport:
    """Errors ||T_{M_n} f - T_M f||_2 for midpoint step approximations M_n.

    The report passes when the last error is below ``tol`` and the curve is
    nonincreasing up to the ``jitter`` allowance.
    """
    reference = apply_Tm(dec, symbol_of_sampled(sampled), f)
    errors = []
    for n in piece_counts:
        step = approximate_by_steps(sampled, int(n))
        approx = apply_Tm(dec, symbol_of_step(step), f)
        errors.append(lp_norm(approx - reference, 2.0))
    return StepConvergenceReport(tuple(int(n) for n in piece_counts), tuple(errors), tol, jitter)
