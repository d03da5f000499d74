import math

import numpy as np
import pytest

import ulrident as u


def test_spherical_gaussian_non_identifiable():
    prob = u.ProblemSpec(
        components=(u.Gaussian(0.0, 1.0), u.Gaussian(0.0, 1.0)),
        beta0=(3.0, 4.0),
        independent=False,
        joint_structure=u.Spherical(),
    )
    verdict = u.analyze(prob)
    assert verdict.verdict is u.VerdictClass.NON_IDENTIFIABLE
    assert verdict.solution_set.kind is u.SolutionSetKind.SPHERE
    assert verdict.solution_set.radius == pytest.approx(5.0)
    assert any(r.rule_id == "spherical" for r in verdict.fired_rules)


def test_independent_standard_gaussians_equivalent_to_sphere():
    prob = u.ProblemSpec(
        components=(u.Gaussian(0.0, 1.0),) * 3, beta0=(1.0, 2.0, 2.0)
    )
    verdict = u.analyze(prob)
    assert verdict.verdict is u.VerdictClass.NON_IDENTIFIABLE
    assert verdict.solution_set.kind is u.SolutionSetKind.SPHERE
    assert verdict.solution_set.radius == pytest.approx(3.0)


def test_shifted_gaussians_d3_elliptical():
    prob = u.ProblemSpec(
        components=(u.Gaussian(1.0, 1.0),) * 3, beta0=(1.0, 0.0, 0.0)
    )
    verdict = u.analyze(prob)
    assert verdict.verdict is u.VerdictClass.NON_IDENTIFIABLE
    assert verdict.solution_set.kind is u.SolutionSetKind.ELLIPSOID_HYPERPLANE


def test_shifted_gaussians_d2_weak_pair():
    prob = u.ProblemSpec(
        components=(u.Gaussian(1.0, 1.0), u.Gaussian(1.0, 1.0)), beta0=(1.0, 2.0)
    )
    verdict = u.analyze(prob)
    assert verdict.verdict is u.VerdictClass.WEAK
    assert verdict.bound == 2
    els = np.array(sorted(verdict.solution_set.elements))
    assert np.allclose(els, [[1.0, 2.0], [2.0, 1.0]])


def test_gamma_gaussian_strong_verdict():
    prob = u.ProblemSpec(
        components=(u.Gamma(1, 1), u.Gamma(2, 1), u.Gamma(4, 1), u.Gaussian(1, 1)),
        beta0=(1.0, 1.0, 1.0, 1.0),
    )
    verdict = u.analyze(prob)
    assert verdict.verdict is u.VerdictClass.STRONG
    assert any(r.rule_id == "gamma-gaussian" for r in verdict.fired_rules)


def test_example_pair_strong_via_fourth_moment():
    prob = u.ProblemSpec(
        components=(u.Gaussian(1.0, 1.0), u.Exponential(1.0)), beta0=(2.0, 3.0)
    )
    verdict = u.analyze(prob)
    assert verdict.verdict is u.VerdictClass.STRONG
    fired = {r.rule_id for r in verdict.fired_rules}
    assert {"fourth-moment", "sign-flip-refine"} <= fired
    assert verdict.fourth_moment.w1 == pytest.approx(0.0)


def test_iid_exponential_weak_orbit():
    prob = u.ProblemSpec(
        components=(u.Exponential(1.0), u.Exponential(1.0)), beta0=(1.0, 2.0)
    )
    verdict = u.analyze(prob)
    assert verdict.verdict is u.VerdictClass.WEAK
    assert (2.0, 1.0) in verdict.solution_set.elements
    assert verdict.solution_set.qualifier is u.Qualifier.SUBSET


def test_scale_family_weak_orbit():
    prob = u.ProblemSpec(
        components=(u.Exponential(1.0), u.Exponential(2.0)), beta0=(1.0, 1.0)
    )
    verdict = u.analyze(prob)
    assert verdict.verdict is u.VerdictClass.WEAK
    assert (0.5, 2.0) in verdict.solution_set.elements


def test_symmetric_scale_family_exact_orbit():
    prob = u.ProblemSpec(
        components=(u.Laplace(0.0, 1.0), u.Laplace(0.0, 1.0 / 3.0)), beta0=(1.0, 0.0)
    )
    verdict = u.analyze(prob)
    assert verdict.verdict is u.VerdictClass.WEAK
    assert set(verdict.solution_set.elements) == {
        (1.0, 0.0),
        (-1.0, 0.0),
        (0.0, 3.0),
        (0.0, -3.0),
    }
    assert verdict.solution_set.qualifier is u.Qualifier.EXACT


def test_noise_gate_blocks_analysis():
    prob = u.ProblemSpec(
        components=(u.Exponential(1.0), u.Exponential(1.0)),
        beta0=(1.0, 1.0),
        noise=u.NoiseSpec.from_dist(u.Empirical((0.0, 1.0), cf_flag=False)),
    )
    verdict = u.analyze(prob)
    assert verdict.verdict is u.VerdictClass.INCONCLUSIVE
    assert any(r.rule_id == "noise-gate" for r in verdict.fired_rules)


def test_admissible_noise_does_not_block():
    prob = u.ProblemSpec(
        components=(u.Gaussian(1.0, 1.0), u.Exponential(1.0)),
        beta0=(2.0, 3.0),
        noise=u.NoiseSpec.from_dist(u.Laplace(0.0, 1.0)),
    )
    assert u.analyze(prob).verdict is u.VerdictClass.STRONG


def test_convolution_witness_downgrades_partition_bound_claim():
    prob = u.ProblemSpec(
        components=(u.Exponential(1.0), u.Exponential(1.0), u.Gamma(2.0, 1.0)),
        beta0=(0.0, 0.0, 1.0),
    )
    verdict = u.analyze(prob)
    assert verdict.verdict is u.VerdictClass.WEAK
    fired = {r.rule_id for r in verdict.fired_rules}
    assert "convolution" in fired


def test_student_t_pair_bounded():
    t5 = u.StudentT(5.0, 0.0, math.sqrt(3.0 / 5.0))
    laplace = u.Laplace(0.0, 1 / math.sqrt(2.0))
    # balanced direction: min weight >= 1, only the eight-solution bound fires
    verdict = u.analyze(
        u.ProblemSpec(components=(laplace, t5), beta0=(1.0, 1.0))
    )
    assert verdict.verdict is u.VerdictClass.WEAK
    assert verdict.bound == 8
    # small first coefficient: min weight < 1, sign-flip region with all four
    # patterns surviving (both laws symmetric)
    verdict2 = u.analyze(
        u.ProblemSpec(components=(laplace, t5), beta0=(0.1, 1.0))
    )
    assert verdict2.verdict is u.VerdictClass.WEAK
    assert verdict2.bound == 4


def test_moment_limited_t_inconclusive():
    t3 = u.StudentT(3.5, 0.0, 1.0)
    prob = u.ProblemSpec(
        components=(u.Laplace(0.0, 1.0), t3), beta0=(1.0, 1.0)
    )
    verdict = u.analyze(prob)
    assert verdict.verdict is u.VerdictClass.INCONCLUSIVE
    assert any("fourth moments" in r for r in verdict.reasons)


def test_conjecture_note_for_minimal_unit_variance():
    prob = u.ProblemSpec(
        components=(
            u.standardize_dist(u.Empirical((0.0, 1.0, 0.5, 4.0))),
            u.Gaussian(0.0, 1.0),
        ),
        beta0=(1.0, 1.0),
    )
    verdict = u.analyze(prob)
    if verdict.verdict is u.VerdictClass.INCONCLUSIVE:
        assert any(r.rule_id == "conjecture-note" for r in verdict.fired_rules)


def test_verdict_deterministic():
    prob = u.ProblemSpec(
        components=(u.Exponential(1.0), u.Exponential(2.0)), beta0=(1.0, 1.0)
    )
    cfg = u.OracleConfig(n=2000, permutations=60, seed=5)
    v1 = u.analyze(prob, cfg)
    v2 = u.analyze(prob, cfg)
    assert v1.describe() == v2.describe()


def test_oracle_spot_checks_recorded():
    prob = u.ProblemSpec(
        components=(u.Exponential(1.0), u.Exponential(2.0)), beta0=(1.0, 1.0)
    )
    cfg = u.OracleConfig(n=4000, permutations=100, seed=5)
    verdict = u.analyze(prob, cfg)
    assert verdict.oracle_evidence
    # every certified orbit member must be accepted at this sample size
    for rec in verdict.oracle_evidence:
        assert rec.accepted


def test_strong_verdict_never_coexists_with_accepted_witness():
    prob = u.ProblemSpec(
        components=(u.Gaussian(1.0, 1.0), u.Exponential(1.0)), beta0=(2.0, 3.0)
    )
    cfg = u.OracleConfig(n=10_000, permutations=100, seed=2)
    verdict = u.analyze(prob, cfg)
    assert verdict.verdict is u.VerdictClass.STRONG
    for pattern in ((-2.0, 3.0), (2.0, -3.0), (-2.0, -3.0)):
        assert not u.verify_candidate(prob, pattern, cfg).accepted
