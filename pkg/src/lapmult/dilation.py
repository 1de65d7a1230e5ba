"""Path-space dilation of a kernel: reverse martingales, conditional expectations, transforms.

The product space is Omega = X^{N+1} with measure
P(x_0, ..., x_N) = nu(x_0) Q(x_0, x_1) ... Q(x_{N-1}, x_N), where nu is the
normalized weight vector.  The coordinate filtration decreasing in k makes
f_k(omega) = (Q^k f)(x_k) a reverse martingale, and conditioning on the first
coordinate realizes even kernel powers: E[f_k | x_0] = Q^{2k} f.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .semigroup import MarkovKernel, ReversibleGenerator, heat_operator
from .space import Field, same_space

__all__ = [
    "PathSpace",
    "PathFunctional",
    "ReverseMartingaleFamily",
    "MonteCarloField",
    "EnumerationBudgetError",
    "DEFAULT_PATH_BUDGET",
    "all_paths",
    "path_measure",
    "transition_products",
    "reverse_martingale",
    "level_functional",
    "hat_expectation",
    "path_lp_norm",
    "dilation_identity_check",
    "martingale_transform",
    "transform_expectation_identity",
    "square_and_maximal",
]

DEFAULT_PATH_BUDGET = 1_000_000


class EnumerationBudgetError(RuntimeError):
    """Exact path enumeration would exceed the configured budget."""


@dataclass(frozen=True, eq=False)
class PathSpace:
    """Kernel Q, horizon N, and the stationary initial law nu = weights / total mass."""

    kernel: MarkovKernel
    horizon: int

    def __post_init__(self) -> None:
        if self.horizon < 0:
            raise ValueError("horizon must be >= 0")

    @property
    def n_states(self) -> int:
        return self.kernel.space.n

    @property
    def initial_law(self) -> np.ndarray:
        w = self.kernel.space.weights
        return w / w.sum()

    @property
    def path_count(self) -> int:
        return self.n_states ** (self.horizon + 1)


@dataclass(frozen=True, eq=False)
class PathFunctional:
    """A function of the whole path, evaluated vectorized.

    ``evaluator`` maps an integer array of shape (num_paths, N+1) to the array
    of values; it must be finite on every path.
    """

    evaluator: Callable[[np.ndarray], np.ndarray]
    description: str


@dataclass(frozen=True, eq=False)
class ReverseMartingaleFamily:
    """Level fields g_k = Q^k f; the path value at level k is g_k(x_k)."""

    path_space: PathSpace
    levels: tuple[Field, ...]

    def level_matrix(self) -> np.ndarray:
        return np.vstack([lv.values for lv in self.levels])


def all_paths(ps: PathSpace, budget: int = DEFAULT_PATH_BUDGET) -> np.ndarray:
    """All state paths as an integer array of shape (n^{N+1}, N+1)."""
    count = ps.path_count
    if count > budget:
        raise EnumerationBudgetError(
            f"{count} paths exceed the enumeration budget of {budget}"
        )
    steps = ps.horizon + 1
    return np.indices((ps.n_states,) * steps).reshape(steps, -1).T.astype(np.int32)


def transition_products(ps: PathSpace, paths: np.ndarray) -> np.ndarray:
    """prod_k Q(x_k, x_{k+1}): the path weight conditional on its start."""
    q = ps.kernel.entries
    w = np.ones(len(paths))
    for k in range(ps.horizon):
        w *= q[paths[:, k], paths[:, k + 1]]
    return w


def path_measure(ps: PathSpace, paths: np.ndarray) -> np.ndarray:
    """P(omega) = nu(x_0) * prod_k Q(x_k, x_{k+1})."""
    return ps.initial_law[paths[:, 0]] * transition_products(ps, paths)


def reverse_martingale(ps: PathSpace, f: Field) -> ReverseMartingaleFamily:
    """Level fields g_k = Q^k f for k = 0..N, so g_0 = f and g_{k+1} = Q g_k."""
    if not same_space(ps.kernel.space, f.space):
        raise ValueError("field lives on a different space than the kernel")
    q = ps.kernel.entries
    levels = [f]
    g = f.values
    for _ in range(ps.horizon):
        g = q @ g
        levels.append(Field(f.space, g))
    return ReverseMartingaleFamily(ps, tuple(levels))


def level_functional(family: ReverseMartingaleFamily, k: int) -> PathFunctional:
    """The level-k martingale value f_k(omega) = g_k(x_k) as a path functional."""
    if not 0 <= k <= family.path_space.horizon:
        raise ValueError("level outside the horizon")
    g = family.levels[k].values

    def evaluator(paths: np.ndarray) -> np.ndarray:
        return g[paths[:, k]]

    return PathFunctional(evaluator, f"martingale level {k}")


@dataclass(frozen=True, eq=False)
class MonteCarloField:
    """A sampled estimate of a field with per-state standard errors."""

    field: Field
    stderr: np.ndarray


def _stratum_counts(ps: PathSpace, samples: int) -> np.ndarray:
    counts = np.maximum(1, np.rint(samples * ps.initial_law).astype(int))
    return counts


def _sample_stratum(ps: PathSpace, rng: np.random.Generator, count: int, start: int) -> np.ndarray:
    q = ps.kernel.entries
    cum = np.cumsum(q, axis=1)
    cum[:, -1] = 1.0
    paths = np.empty((count, ps.horizon + 1), dtype=np.int32)
    paths[:, 0] = start
    for k in range(ps.horizon):
        u = rng.random(count)
        paths[:, k + 1] = (u[:, None] > cum[paths[:, k]]).sum(axis=1)
    return paths


def hat_expectation(
    ps: PathSpace,
    functional: PathFunctional,
    mode: str = "exact",
    *,
    seed: int | None = None,
    samples: int | None = None,
    budget: int = DEFAULT_PATH_BUDGET,
) -> Field | MonteCarloField:
    """The conditional expectation x -> E[S | pi_0 = x].

    Exact mode enumerates every path; Monte Carlo stratifies on the initial
    state (allocation proportional to nu, at least one sample each) and
    reports a per-state standard error alongside the estimate.
    """
    space = ps.kernel.space
    if mode == "exact":
        paths = all_paths(ps, budget)
        weights = transition_products(ps, paths)
        svals = np.asarray(functional.evaluator(paths), dtype=complex)
        if not np.all(np.isfinite(svals)):
            raise ValueError("path functional returned non-finite values")
        contrib = weights * svals
        out = np.bincount(paths[:, 0], weights=contrib.real, minlength=space.n).astype(complex)
        out += 1j * np.bincount(paths[:, 0], weights=contrib.imag, minlength=space.n)
        return Field(space, out)
    if mode == "mc":
        if seed is None or samples is None or samples < 1:
            raise ValueError("Monte Carlo mode needs a seed and a positive sample count")
        rng = np.random.default_rng(seed)
        counts = _stratum_counts(ps, samples)
        means = np.empty(space.n, dtype=complex)
        stderr = np.empty(space.n)
        for x in range(space.n):
            paths = _sample_stratum(ps, rng, counts[x], x)
            svals = np.asarray(functional.evaluator(paths), dtype=complex)
            means[x] = svals.mean()
            stderr[x] = math.sqrt(float(np.var(svals)) / counts[x])
        return MonteCarloField(Field(space, means), stderr)
    raise ValueError(f"unknown mode {mode!r}")


def path_lp_norm(
    ps: PathSpace,
    functional: PathFunctional,
    p: float,
    mode: str = "exact",
    *,
    seed: int | None = None,
    samples: int | None = None,
    budget: int = DEFAULT_PATH_BUDGET,
) -> float | tuple[float, float]:
    """||S||_{L^p(P)} over the path measure, exactly or by stratified Monte Carlo.

    Monte Carlo mode returns (estimate, standard error) with the error of the
    p-th-moment estimate propagated through the 1/p power; it requires finite p.
    """
    if p < 1.0:
        raise ValueError("p must satisfy p >= 1")
    if mode == "exact":
        paths = all_paths(ps, budget)
        weights = path_measure(ps, paths)
        avals = np.abs(np.asarray(functional.evaluator(paths)))
        if not np.all(np.isfinite(avals)):
            raise ValueError("path functional returned non-finite values")
        if math.isinf(p):
            return float(avals[weights > 0.0].max(initial=0.0))
        return float((weights @ avals**p) ** (1.0 / p))
    if mode == "mc":
        if math.isinf(p):
            raise ValueError("Monte Carlo mode supports finite p only")
        if seed is None or samples is None or samples < 1:
            raise ValueError("Monte Carlo mode needs a seed and a positive sample count")
        rng = np.random.default_rng(seed)
        counts = _stratum_counts(ps, samples)
        nu = ps.initial_law
        moment = 0.0
        variance = 0.0
        for x in range(ps.n_states):
            paths = _sample_stratum(ps, rng, counts[x], x)
            avals = np.abs(np.asarray(functional.evaluator(paths))) ** p
            moment += nu[x] * float(avals.mean())
            variance += nu[x] ** 2 * float(np.var(avals)) / counts[x]
        estimate = moment ** (1.0 / p)
        if moment > 0.0:
            stderr = (1.0 / p) * moment ** (1.0 / p - 1.0) * math.sqrt(variance)
        else:
            stderr = 0.0
        return estimate, stderr
    raise ValueError(f"unknown mode {mode!r}")


@dataclass(frozen=True, eq=False)
class DilationIdentityReport:
    """Deviations of the enumerated E[f_k | x_0] from Q^{2k} f and from the heat operator."""

    level: int
    deviation_kernel_power: float
    deviation_heat: float | None
    tol: float

    @property
    def passed(self) -> bool:
        devs = [self.deviation_kernel_power]
        if self.deviation_heat is not None:
            devs.append(self.deviation_heat)
        return max(devs) <= self.tol

    def to_dict(self) -> dict:
        return {
            "level": self.level,
            "deviation_kernel_power": self.deviation_kernel_power,
            "deviation_heat": self.deviation_heat,
            "tol": self.tol,
            "passed": self.passed,
        }


def dilation_identity_check(
    ps: PathSpace,
    f: Field,
    k: int,
    generator: ReversibleGenerator | None = None,
    tol: float = 1e-10,
    budget: int = DEFAULT_PATH_BUDGET,
) -> DilationIdentityReport:
    """Check E[f_k | x_0] = Q^{2k} f by exact enumeration.

    When the kernel was built as Q = T^{eps/2} from ``generator`` (so the
    kernel's ``step`` is eps/2), the same quantity must equal T^{k eps} f; the
    heat operator at time 2k*step is compared independently.
    """
    if not 0 <= k <= ps.horizon:
        raise ValueError("level outside the horizon")
    family = reverse_martingale(ps, f)
    conditioned = hat_expectation(ps, level_functional(family, k), budget=budget)
    q2k = np.linalg.matrix_power(ps.kernel.entries, 2 * k) @ f.values
    dev_power = float(np.abs(conditioned.values - q2k).max())
    dev_heat = None
    if generator is not None:
        heated = heat_operator(generator, 2.0 * k * ps.kernel.step).entries @ f.values
        dev_heat = float(np.abs(conditioned.values - heated).max())
    return DilationIdentityReport(k, dev_power, dev_heat, tol)


def martingale_transform(ps: PathSpace, m_values: Sequence[complex], f: Field) -> PathFunctional:
    """S(omega) = sum_i M_i (g_{i+1}(x_{i+1}) - g_i(x_i)): a reverse-martingale transform."""
    m = np.asarray(m_values, dtype=complex).ravel()
    if m.size != ps.horizon:
        raise ValueError(f"need exactly {ps.horizon} multiplier values, got {m.size}")
    levels = reverse_martingale(ps, f).level_matrix()

    def evaluator(paths: np.ndarray) -> np.ndarray:
        out = np.zeros(len(paths), dtype=complex)
        for i in range(ps.horizon):
            out += m[i] * (levels[i + 1][paths[:, i + 1]] - levels[i][paths[:, i]])
        return out

    return PathFunctional(evaluator, "martingale transform")


@dataclass(frozen=True, eq=False)
class TransformIdentityReport:
    """Deviations of E[transform | x_0] from its two closed forms."""

    deviation_kernel_powers: float
    deviation_telescoping: float | None
    tol: float

    @property
    def passed(self) -> bool:
        devs = [self.deviation_kernel_powers]
        if self.deviation_telescoping is not None:
            devs.append(self.deviation_telescoping)
        return max(devs) <= self.tol

    def to_dict(self) -> dict:
        return {
            "deviation_kernel_powers": self.deviation_kernel_powers,
            "deviation_telescoping": self.deviation_telescoping,
            "tol": self.tol,
            "passed": self.passed,
        }


def transform_expectation_identity(
    ps: PathSpace,
    m_values: Sequence[complex],
    f: Field,
    generator: ReversibleGenerator | None = None,
    tol: float = 1e-10,
    budget: int = DEFAULT_PATH_BUDGET,
) -> TransformIdentityReport:
    """Check E[sum_i M_i (f_{i+1} - f_i) | x_0] = sum_i M_i (Q^{2(i+1)} - Q^{2i}) f.

    With Q = T^{eps/2} and breakpoints t_i = i*eps this also equals the
    telescoping multiplier operator, which closes the loop with the step-symbol
    closed form.
    """
    m = np.asarray(m_values, dtype=complex).ravel()
    functional = martingale_transform(ps, m, f)
    conditioned = hat_expectation(ps, functional, budget=budget)

    q = ps.kernel.entries
    q2 = q @ q
    power = np.eye(ps.n_states)
    rhs = np.zeros(ps.n_states, dtype=complex)
    for i in range(ps.horizon):
        nxt = power @ q2
        rhs += m[i] * ((nxt - power) @ f.values)
        power = nxt
    dev_powers = float(np.abs(conditioned.values - rhs).max())

    dev_tel = None
    if generator is not None:
        from .multiplier import StepMultiplier, telescoping_Tm

        eps = 2.0 * ps.kernel.step
        breakpoints = eps * np.arange(ps.horizon + 1)
        telescoped = telescoping_Tm(generator, StepMultiplier(breakpoints, m), f)
        dev_tel = float(np.abs(conditioned.values - telescoped.values).max())
    return TransformIdentityReport(dev_powers, dev_tel, tol)


def square_and_maximal(
    ps: PathSpace,
    family: ReverseMartingaleFamily,
    m_values: Sequence[complex] | None = None,
) -> tuple[PathFunctional, PathFunctional]:
    """The square function of the increments and the maximal function of the levels.

    With ``m_values`` the increments are the transformed ones M_i (f_{i+1} - f_i);
    otherwise the raw martingale increments.
    """
    levels = family.level_matrix()
    n_steps = ps.horizon
    if m_values is None:
        m = np.ones(n_steps, dtype=complex)
    else:
        m = np.asarray(m_values, dtype=complex).ravel()
        if m.size != n_steps:
            raise ValueError(f"need exactly {n_steps} multiplier values, got {m.size}")

    def square_eval(paths: np.ndarray) -> np.ndarray:
        acc = np.zeros(len(paths))
        for i in range(n_steps):
            inc = m[i] * (levels[i + 1][paths[:, i + 1]] - levels[i][paths[:, i]])
            acc += np.abs(inc) ** 2
        return np.sqrt(acc)

    def maximal_eval(paths: np.ndarray) -> np.ndarray:
        best = np.abs(levels[0][paths[:, 0]])
        for k in range(1, n_steps + 1):
            best = np.maximum(best, np.abs(levels[k][paths[:, k]]))
        return best

    return (
        PathFunctional(square_eval, "square function of increments"),
        PathFunctional(maximal_eval, "maximal function of levels"),
    )
