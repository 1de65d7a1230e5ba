import numpy as np

from lapmult.suites import (
    dilation_instance_family,
    step_instance_family,
    suite_llogl_chain,
    suite_markov_conditions,
    suite_mc_crosscheck,
)
from lapmult import random_reversible_generator


def test_step_family_prefix_stable():
    short = step_instance_family(11, 3)
    long = step_instance_family(11, 6)
    for (g1, m1, f1), (g2, m2, f2) in zip(short, long):
        assert np.array_equal(g1.entries, g2.entries)
        assert np.array_equal(m1.values, m2.values)
        assert np.array_equal(f1.values, f2.values)


def test_dilation_family_prefix_stable():
    short = dilation_instance_family(12, 2)
    long = dilation_instance_family(12, 5)
    for (g1, ps1, f1), (g2, ps2, f2) in zip(short, long):
        assert np.array_equal(g1.entries, g2.entries)
        assert ps1.horizon == ps2.horizon
        assert np.array_equal(f1.values, f2.values)


def test_step_family_respects_bounds():
    for gen, step, probe in step_instance_family(13, 10, max_n=9, max_pieces=4):
        assert 2 <= gen.space.n <= 9
        assert 1 <= step.values.size <= 4
        assert probe.values.size == gen.space.n


def test_markov_conditions_suite_serializes_kernel():
    _, gen = random_reversible_generator(42, 5)
    result = suite_markov_conditions(gen, time=0.7)
    assert result.passed
    kernel = np.asarray(result.summary["kernel"]["entries"])
    assert kernel.shape == (5, 5)


def test_llogl_chain_without_doubling():
    result = suite_llogl_chain(seed=21, chains=2, fields=2, n=3, horizon=3,
                               stability_doubling=False)
    assert result.passed
    assert result.summary["all_finite"]


def test_mc_crosscheck_deterministic():
    a = suite_mc_crosscheck(17, samples=5000, mc_seed=23)
    b = suite_mc_crosscheck(17, samples=5000, mc_seed=23)
    assert a.summary == b.summary
