import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import ulrident as u
from ulrident.errors import PreconditionUnmet, SigmaNotPD, ValidationError
from ulrident.noniid import FourthMomentBranch


# ---------------------------------------------------------------------------
# scale_family_orbit
# ---------------------------------------------------------------------------


def test_scale_orbit_exponential_swap():
    orbit = u.scale_family_orbit((1.0, 1.0), (1.0, 2.0), symmetric=False)
    assert (0.5, 2.0) in orbit.elements
    assert (1.0, 1.0) in orbit.elements
    assert orbit.qualifier is u.Qualifier.SUBSET
    assert orbit.bound == 8


def test_scale_orbit_contains_identity():
    orbit = u.scale_family_orbit((0.3, -1.0, 2.0), (1.0, 2.0, 3.0), symmetric=False)
    assert (0.3, -1.0, 2.0) in orbit.elements


def test_scale_orbit_symmetric_laplace():
    orbit = u.scale_family_orbit((1.0, 0.0), (1.0, 3.0), symmetric=True)
    assert set(orbit.elements) == {(1.0, 0.0), (-1.0, 0.0), (0.0, 3.0), (0.0, -3.0)}
    assert orbit.qualifier is u.Qualifier.EXACT


def test_detect_scale_family():
    from ulrident.noniid import detect_scale_family

    lambdas, base = detect_scale_family((u.Exponential(1.0), u.Exponential(2.0)))
    assert np.allclose(lambdas, [1.0, 2.0])
    assert isinstance(base, u.Exponential)
    lambdas, base = detect_scale_family((u.Laplace(0, 1.0), u.Laplace(0, 1 / 3)))
    assert np.allclose(lambdas, [1.0, 3.0])
    assert detect_scale_family((u.Exponential(1.0), u.Uniform(0, 1))) is None
    assert detect_scale_family((u.Gamma(2, 1), u.Gamma(3, 1))) is None


# ---------------------------------------------------------------------------
# elliptical_solution_set
# ---------------------------------------------------------------------------


def test_sphere_membership():
    sol = u.elliptical_solution_set([0.0, 0.0], np.eye(2), [3.0, 4.0])
    assert sol.kind is u.SolutionSetKind.SPHERE
    assert sol.radius == pytest.approx(5.0)
    assert sol.contains([5.0, 0.0])
    assert sol.contains([3.0, -4.0])
    assert not sol.contains([1.0, 1.0])


def test_hyperplane_constraint_excludes():
    sol = u.elliptical_solution_set([1.0, 0.0], np.eye(2), [3.0, 4.0])
    assert sol.kind is u.SolutionSetKind.ELLIPSOID_HYPERPLANE
    assert sol.plane_value == pytest.approx(3.0)
    assert sol.radius == pytest.approx(5.0)
    assert not sol.contains([5.0, 0.0])  # right norm, wrong plane value
    assert sol.contains([3.0, 4.0])


def test_diagonal_ellipsoid_membership():
    sol = u.elliptical_solution_set([0.0, 0.0], np.diag([4.0, 1.0]), [1.0, 0.0])
    assert sol.radius == pytest.approx(2.0)
    assert sol.contains([0.0, 2.0])


def test_sphere_membership_rotation_invariant():
    sol = u.elliptical_solution_set([0.0, 0.0], np.eye(2), [3.0, 4.0])
    rng = np.random.default_rng(0)
    for _ in range(20):
        theta = rng.uniform(0, 2 * math.pi)
        rot = np.array(
            [[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]]
        )
        assert sol.contains(rot @ np.array([3.0, 4.0]))


def test_sigma_not_pd_rejected():
    with pytest.raises(SigmaNotPD):
        u.elliptical_solution_set([0.0, 0.0], [[1.0, 2.0], [2.0, 1.0]], [1.0, 0.0])


# ---------------------------------------------------------------------------
# convolution_alternatives
# ---------------------------------------------------------------------------


def _exp_exp_gamma(beta0):
    return u.ProblemSpec(
        components=(u.Exponential(1.0), u.Exponential(1.0), u.Gamma(2.0, 1.0)),
        beta0=beta0,
    )


def test_convolution_certified_candidate():
    cands = u.convolution_alternatives(_exp_exp_gamma((0.0, 0.0, 1.0)))
    assert [(c.beta, c.status) for c in cands] == [((1.0, 1.0, 0.0), "certified")]


def test_convolution_needs_oracle_candidate():
    cands = u.convolution_alternatives(_exp_exp_gamma((1.0, 0.0, 1.0)))
    by_beta = {c.beta: c.status for c in cands}
    assert by_beta[(2.0, 1.0, 0.0)] == "needs_oracle"


def test_convolution_no_matching_tags():
    prob = u.ProblemSpec(
        components=(u.Exponential(1.0), u.Uniform(0.0, 1.0)), beta0=(1.0, 1.0)
    )
    assert u.convolution_alternatives(prob) == []


def test_convolution_integer_rate_multiple():
    # 2 * Exp(2) has the law of Exp(1)
    prob = u.ProblemSpec(
        components=(u.Exponential(1.0), u.Exponential(2.0)), beta0=(1.0, 0.0)
    )
    cands = u.convolution_alternatives(prob)
    assert ((0.0, 2.0), "certified") in [(c.beta, c.status) for c in cands]


# ---------------------------------------------------------------------------
# gamma_gaussian_check
# ---------------------------------------------------------------------------


def test_gamma_gaussian_strong():
    prob = u.ProblemSpec(
        components=(u.Gamma(1, 1), u.Gamma(2, 1), u.Gamma(4, 1), u.Gaussian(1, 1)),
        beta0=(1.0, 1.0, 1.0, 1.0),
    )
    assert u.gamma_gaussian_check(prob).status == "strong"


def test_gamma_gaussian_collision():
    prob = u.ProblemSpec(
        components=(u.Gamma(1, 1), u.Gamma(2, 1), u.Gamma(3, 1), u.Gaussian(1, 1)),
        beta0=(1.0, 1.0, 1.0, 1.0),
    )
    result = u.gamma_gaussian_check(prob)
    assert result.status == "collision"
    assert set(result.colliding) == {frozenset({0, 1}), frozenset({2})}


def test_gamma_gaussian_zero_mean_fails():
    prob = u.ProblemSpec(
        components=(u.Gamma(1, 1), u.Gamma(2, 1), u.Gaussian(0, 1)),
        beta0=(1.0, 1.0, 1.0),
    )
    result = u.gamma_gaussian_check(prob)
    assert result.status == "precondition_failed"
    assert "mean" in result.reason


def test_gamma_gaussian_small_d_fails():
    prob = u.ProblemSpec(
        components=(u.Gamma(1, 1), u.Gaussian(1, 1)), beta0=(1.0, 1.0)
    )
    assert u.gamma_gaussian_check(prob).status == "precondition_failed"


# ---------------------------------------------------------------------------
# fourth_moment_test
# ---------------------------------------------------------------------------


def test_fourth_moment_gaussian_exponential_direction():
    r = u.fourth_moment_test(3.0, 9.0, 1 / math.sqrt(2), 1 / math.sqrt(2))
    assert r.c == pytest.approx(4.5)
    assert r.w1 == pytest.approx(0.0)
    assert r.w2 == pytest.approx(4.0)
    assert r.verdict is u.FourthMomentVerdict.SIGN_FLIPS_ONLY
    assert r.roots_x == pytest.approx((0.5,))


def test_fourth_moment_iid_laplace_direction():
    r = u.fourth_moment_test(6.0, 6.0, 1.0, 0.0)
    assert r.c == pytest.approx(6.0)
    assert r.w1 == pytest.approx(1.0) and r.w2 == pytest.approx(1.0)
    assert r.verdict is u.FourthMomentVerdict.AT_MOST_EIGHT
    assert len(r.roots_x) == 2


def test_fourth_moment_c_equals_three_branch():
    alpha = math.sqrt(math.sqrt(2.0) - 1.0)
    beta = math.sqrt(2.0 - math.sqrt(2.0))
    r = u.fourth_moment_test(6.0, 1.5, alpha, beta)
    assert r.branch is FourthMomentBranch.C_EQUALS_THREE
    assert r.verdict is u.FourthMomentVerdict.SIGN_FLIPS_ONLY
    assert r.roots_x == pytest.approx((math.sqrt(2.0) - 1.0,), abs=1e-9)


def test_fourth_moment_preconditions():
    with pytest.raises(PreconditionUnmet):
        u.fourth_moment_test(3.0, 3.0, 1.0, 1.0)
    with pytest.raises(PreconditionUnmet):
        u.fourth_moment_test(3.0, 9.0, 0.0, 0.0)


@given(
    m1=st.floats(1.0, 20.0),
    m2=st.floats(1.0, 20.0),
    theta=st.floats(0.0, 2 * math.pi),
)
@settings(max_examples=300, deadline=None)
def test_weight_lemma_properties(m1, m2, theta):
    alpha, beta = math.cos(theta), math.sin(theta)
    c, w1, w2 = u.fourth_moment_weights(m1, m2, alpha, beta)
    if abs(c - 3.0) <= 1e-9:
        return
    assert w1 + w2 - w1 * w2 >= -1e-12
    assert max(w1, w2) > 0.0


@given(m=st.floats(1.0, 20.0), theta=st.floats(0.0, 2 * math.pi))
@settings(max_examples=200, deadline=None)
def test_weight_lemma_iid_subcase(m, theta):
    if abs(m - 3.0) <= 1e-6:
        return
    alpha, beta = math.cos(theta), math.sin(theta)
    c, w1, w2 = u.fourth_moment_weights(m, m, alpha, beta)
    if abs(c - 3.0) <= 1e-9:
        return
    assert w1 == pytest.approx(w2, rel=1e-9)
    assert 1.0 - 1e-12 <= w1 <= 2.0 + 1e-12


@given(
    m1=st.floats(1.0, 20.0),
    m2=st.floats(1.0, 20.0),
    theta=st.floats(0.05, math.pi / 2 - 0.05),
)
@settings(max_examples=200, deadline=None)
def test_true_direction_always_admissible(m1, m2, theta):
    if abs(m1 - 3.0) <= 1e-9 and abs(m2 - 3.0) <= 1e-9:
        return
    alpha, beta = math.cos(theta), math.sin(theta)
    report = u.fourth_moment_test(m1, m2, alpha, beta)
    assert any(abs(x - alpha**2) <= 1e-7 for x in report.roots_x)


# ---------------------------------------------------------------------------
# sign_flip_refine
# ---------------------------------------------------------------------------


def test_refine_gaussian_exponential_strong():
    prob = u.ProblemSpec(
        components=(u.Gaussian(1.0, 1.0), u.Exponential(1.0)), beta0=(2.0, 3.0)
    )
    std, _ = u.standardize(prob)
    report = u.fourth_moment_test(
        std.components[0].raw_moment(4), std.components[1].raw_moment(4), *std.beta0
    )
    outcome = u.sign_flip_refine(prob, report)
    assert outcome.strong
    assert outcome.survivors == ((2.0, 3.0),)


def test_refine_symmetric_all_survive():
    prob = u.ProblemSpec(
        components=(
            u.Laplace(0.0, 1 / math.sqrt(2)),
            u.Uniform(-math.sqrt(3), math.sqrt(3)),
        ),
        beta0=(0.6, 0.8),
    )
    report = u.fourth_moment_test(6.0, 1.8, 0.6, 0.8)
    outcome = u.sign_flip_refine(prob, report)
    assert not outcome.strong
    assert len(outcome.survivors) == 4


def test_refine_zero_coordinate_collapses_patterns():
    prob = u.ProblemSpec(
        components=(u.Gaussian(1.0, 1.0), u.Exponential(1.0)), beta0=(0.0, 3.0)
    )
    std, _ = u.standardize(prob)
    report = u.fourth_moment_test(3.0, 9.0, *std.beta0)
    outcome = u.sign_flip_refine(prob, report)
    assert outcome.strong
    assert outcome.survivors == ((0.0, 3.0),)


def test_refine_requires_sign_flips_only():
    prob = u.ProblemSpec(
        components=(u.Laplace(0.0, 1.0), u.Laplace(0.0, 1.0)), beta0=(1.0, 0.0)
    )
    report = u.fourth_moment_test(6.0, 6.0, 1.0, 0.0)
    with pytest.raises(PreconditionUnmet):
        u.sign_flip_refine(prob, report)


# ---------------------------------------------------------------------------
# recursive_partition_analysis
# ---------------------------------------------------------------------------


def _standard_laplace():
    return u.standardize_dist(u.Laplace(0.0, 1.0))


def test_partition_bound_d3():
    prob = u.ProblemSpec(
        components=(_standard_laplace(),) * 3, beta0=(1.0, 1.0, 1.0)
    )
    analysis = u.recursive_partition_analysis(prob)
    assert analysis.ok
    assert analysis.bound == 48
    pair_runs = [i for i in analysis.invocations if i.kind == "pair"]
    combo_runs = [i for i in analysis.invocations if i.kind == "combo"]
    assert len(pair_runs) == 3 and len(combo_runs) == 3


def test_partition_degenerate_reported_per_partition():
    g = u.Gaussian(0.0, 1.0)
    prob = u.ProblemSpec(
        components=(g, g, _standard_laplace()), beta0=(1.0, 1.0, 0.5)
    )
    analysis = u.recursive_partition_analysis(prob)
    assert not analysis.ok
    assert analysis.bound is None
    degenerate = [i for i in analysis.invocations if i.outcome == "degenerate"]
    assert any(i.pair == (0, 1) and i.kind == "pair" for i in degenerate)
    ok_runs = [i for i in analysis.invocations if i.outcome == "ok"]
    assert ok_runs  # other partitions still report


def test_partition_bound_d4():
    prob = u.ProblemSpec(
        components=(_standard_laplace(),) * 4, beta0=(1.0, 2.0, 3.0, 4.0)
    )
    analysis = u.recursive_partition_analysis(prob)
    assert analysis.ok
    assert analysis.bound == math.factorial(4) * 2**4 == 384


def test_partition_requires_standardized():
    prob = u.ProblemSpec(
        components=(u.Exponential(1.0),) * 3, beta0=(1.0, 1.0, 1.0)
    )
    with pytest.raises(ValidationError):
        u.recursive_partition_analysis(prob)
