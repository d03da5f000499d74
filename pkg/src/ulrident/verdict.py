"""Rule orchestration: run every applicable analyzer and assemble a verdict.

Rule order (later rules refine earlier ones; the tightest certified
description wins):

1. noise admissibility gate -- a noise CF with an interval of zeros blocks
   every analytic criterion, so the verdict is inconclusive;
2. explicit joint structure -- spherical/elliptical laws have exact,
   typically infinite solution sets;
3. independent all-Gaussian components -- the joint law is Gaussian, which
   is elliptical, so the same exact description applies;
4. i.i.d. non-Gaussian components -- signed-permutation orbit via the
   identically-distributed-forms dichotomy;
5. common scale family -- permutation-and-ratio orbit;
6. gamma components plus one nonzero-mean Gaussian -- strong when the
   shape subset sums are distinct;
7. convolution-closure relations -- extra solution witnesses;
8. fourth-moment criterion (d = 2 directly, d > 2 via partitions) with the
   low-order sign-flip refinement;
9. anything left is inconclusive.

Analytic membership claims are spot-checked by the oracle when sampling is
available, and every fired rule is recorded with the classical result it
rests on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from .distributions import (
    ProblemSpec,
    Spherical,
    noise_admissible,
    standardize,
)
from .errors import MomentUndefined, NotSamplable, PreconditionUnmet
from .noniid import (
    FourthMomentReport,
    FourthMomentVerdict,
    PartitionAnalysis,
    Qualifier,
    SolutionSet,
    SolutionSetKind,
    convolution_alternatives,
    detect_scale_family,
    elliptical_solution_set,
    fourth_moment_test,
    gamma_gaussian_check,
    recursive_partition_analysis,
    scale_family_orbit,
    sign_flip_refine,
)
from .oracle import OracleConfig, OracleRecord, verify_candidate

MAX_ORACLE_SPOT_CHECKS = 3


class VerdictClass(Enum):
    STRONG = "strong"
    WEAK = "weak"
    NON_IDENTIFIABLE = "non_identifiable"
    INCONCLUSIVE = "inconclusive"


ANCHORS = {
    "noise-gate": "characteristic-function zero-set condition for cancelling noise",
    "spherical": "spherical symmetry: solutions form the sphere of radius ||beta0||",
    "elliptical": "elliptical symmetry: hyperplane-ellipsoid intersection",
    "gaussian-components": "independent Gaussians form an elliptical joint law",
    "iid-orbit": "Marcinkiewicz dichotomy for identically distributed linear forms",
    "scale-family": "scale-family permutation/ratio orbit",
    "gamma-gaussian": "gamma shapes with distinct subset sums plus a shifted Gaussian",
    "convolution": "convolution-closure identities among components",
    "fourth-moment": "two-component fourth-moment weight criterion",
    "sign-flip-refine": "low-order moment screening of sign patterns",
    "partition-recursion": "pairwise partition reduction of the fourth-moment criterion",
    "conjecture-note": "signed-permutation identifiability conjecture for minimal systems",
}


@dataclass(frozen=True)
class FiredRule:
    rule_id: str
    anchor: str
    summary: str
    details: dict = field(default_factory=dict)

    def describe(self) -> dict:
        return {
            "rule_id": self.rule_id,
            "anchor": self.anchor,
            "summary": self.summary,
            "details": self.details,
        }


@dataclass(frozen=True)
class IdentifiabilityVerdict:
    verdict: VerdictClass
    bound: Optional[int]
    solution_set: Optional[SolutionSet]
    reasons: tuple[str, ...]
    fired_rules: tuple[FiredRule, ...]
    oracle_evidence: tuple[OracleRecord, ...]
    warnings: tuple[str, ...]
    fourth_moment: Optional[FourthMomentReport] = None
    partitions: Optional[PartitionAnalysis] = None

    def describe(self) -> dict:
        doc: dict = {
            "class": self.verdict.value,
            "reasons": list(self.reasons),
            "rules": [r.describe() for r in self.fired_rules],
            "oracle": [r.describe() for r in self.oracle_evidence],
            "warnings": list(self.warnings),
        }
        if self.bound is not None:
            doc["bound"] = self.bound
        if self.solution_set is not None:
            doc["solution_set"] = self.solution_set.describe()
        if self.fourth_moment is not None:
            fm = self.fourth_moment
            doc["fourth_moment"] = {
                "c": fm.c,
                "w1": fm.w1,
                "w2": fm.w2,
                "branch": fm.branch.value,
                "roots_x": list(fm.roots_x),
                "verdict": fm.verdict.value,
                "m1": fm.m1,
                "m2": fm.m2,
            }
            if fm.refinement is not None:
                doc["fourth_moment"]["survivors"] = [
                    list(s) for s in fm.refinement.survivors
                ]
        if self.partitions is not None:
            doc["partitions"] = {
                "bound": self.partitions.bound,
                "ok": self.partitions.ok,
                "invocations": [
                    {
                        "pair": list(inv.pair),
                        "rest": list(inv.rest),
                        "kind": inv.kind,
                        "outcome": inv.outcome,
                        "verdict": inv.verdict,
                    }
                    for inv in self.partitions.invocations
                ],
            }
        return doc


class _Analysis:
    """Mutable scratchpad while rules fire."""

    def __init__(self) -> None:
        self.rules: list[FiredRule] = []
        self.warnings: list[str] = []
        self.reasons: list[str] = []
        self.exact_infinite: Optional[SolutionSet] = None
        self.strong: bool = False
        self.weak_sets: list[SolutionSet] = []
        self.extra_witnesses: list[tuple[float, ...]] = []
        self.fourth_moment: Optional[FourthMomentReport] = None
        self.partitions: Optional[PartitionAnalysis] = None

    def fire(self, rule_id: str, summary: str, **details) -> None:
        self.rules.append(
            FiredRule(rule_id, ANCHORS[rule_id], summary, dict(details))
        )


def _rule_joint_structure(problem: ProblemSpec, state: _Analysis) -> None:
    js = problem.joint_structure
    if js is None:
        return
    if isinstance(js, Spherical):
        sol = elliptical_solution_set(
            np.zeros(problem.d), np.eye(problem.d), problem.beta0_array()
        )
        state.fire(
            "spherical",
            f"solution set is the sphere of radius {sol.radius:.12g}",
            radius=sol.radius,
        )
    else:
        sol = elliptical_solution_set(
            js.mu_array(), js.sigma_array(), problem.beta0_array()
        )
        state.fire(
            "elliptical",
            "solution set is {b : b'mu = c} intersected with an ellipsoid",
            plane_value=sol.plane_value,
            radius=sol.radius,
        )
    _register_symmetric_set(problem, sol, state)


def _rule_all_gaussian(problem: ProblemSpec, state: _Analysis) -> None:
    if problem.joint_structure is not None:
        return
    if not all(c.is_gaussian for c in problem.components):
        return
    mu = np.array([c.mean() for c in problem.components])
    sigma = np.diag([c.variance() for c in problem.components])
    sol = elliptical_solution_set(mu, sigma, problem.beta0_array())
    state.fire(
        "gaussian-components",
        "independent Gaussian components: exact elliptical solution set",
        radius=sol.radius,
    )
    _register_symmetric_set(problem, sol, state)


def _register_symmetric_set(
    problem: ProblemSpec, sol: SolutionSet, state: _Analysis
) -> None:
    """File a sphere/ellipsoid-hyperplane set as infinite or enumerated."""
    d = problem.d
    if sol.kind is SolutionSetKind.SPHERE:
        if d == 1:
            beta = problem.beta0[0]
            state.weak_sets.append(
                SolutionSet(
                    kind=SolutionSetKind.FINITE_ORBIT,
                    qualifier=Qualifier.EXACT,
                    elements=((beta,), (-beta,)),
                    bound=2,
                    signs_included=True,
                )
            )
        else:
            state.exact_infinite = sol
        return
    # Hyperplane cut of an ellipsoid: infinite for d >= 3; for d = 2 it is
    # a conic-line intersection with at most two points.
    if d >= 3:
        state.exact_infinite = sol
        return
    elements = _line_ellipse_intersection(sol)
    if elements is None:
        state.exact_infinite = sol
        return
    state.weak_sets.append(
        SolutionSet(
            kind=SolutionSetKind.FINITE_ORBIT,
            qualifier=Qualifier.EXACT,
            elements=elements,
            bound=len(elements),
        )
    )


def _line_ellipse_intersection(
    sol: SolutionSet,
) -> Optional[tuple[tuple[float, ...], ...]]:
    """Solve {b'mu = c} meets {b'Sigma b = rho^2} in the plane (d = 2)."""
    mu = np.asarray(sol.mu, dtype=float)
    sigma = np.asarray(sol.sigma, dtype=float)
    c, rho = sol.plane_value, sol.radius
    if np.allclose(mu, 0.0):
        return None  # the plane constraint is vacuous: whole ellipse
    # Parametrize the line b = b_p + t * u with u orthogonal to mu.
    b_p = mu * (c / float(mu @ mu))
    u = np.array([-mu[1], mu[0]])
    qa = float(u @ sigma @ u)
    qb = 2.0 * float(u @ sigma @ b_p)
    qc = float(b_p @ sigma @ b_p) - rho * rho
    disc = qb * qb - 4.0 * qa * qc
    if disc < 0:
        return ()
    roots = {(-qb + math.sqrt(max(disc, 0.0))) / (2 * qa),
             (-qb - math.sqrt(max(disc, 0.0))) / (2 * qa)}
    return tuple(tuple(float(v) for v in b_p + t * u) for t in sorted(roots))


def _rule_iid(problem: ProblemSpec, state: _Analysis) -> None:
    comps = problem.components
    if len(comps) < 2 or any(c != comps[0] for c in comps[1:]):
        return
    base = comps[0]
    if base.is_gaussian:
        return  # handled by the all-Gaussian elliptical rule
    if not base.has_all_moments:
        state.warnings.append(
            "i.i.d. components without all moments finite: the "
            "permutation-orbit dichotomy does not apply"
        )
        return
    orbit = scale_family_orbit(
        problem.beta0, np.ones(problem.d), base.is_symmetric
    )
    state.fire(
        "iid-orbit",
        "i.i.d. non-Gaussian components: solutions are signed permutations "
        "of beta0",
        bound=orbit.bound,
        symmetric=base.is_symmetric,
    )
    state.weak_sets.append(orbit)


def _rule_scale_family(problem: ProblemSpec, state: _Analysis) -> None:
    detected = detect_scale_family(problem.components)
    if detected is None:
        return
    lambdas, base = detected
    if base.is_gaussian:
        return
    if not base.has_all_moments:
        state.warnings.append(
            "scale family with heavy-tailed base: orbit characterization "
            "needs all moments finite; skipping"
        )
        return
    if np.allclose(lambdas, lambdas[0]):
        return  # plain i.i.d., already covered
    orbit = scale_family_orbit(problem.beta0, lambdas, base.is_symmetric)
    state.fire(
        "scale-family",
        "common scale family: permutation/ratio orbit of beta0",
        lambdas=[float(v) for v in lambdas],
        bound=orbit.bound,
        symmetric=base.is_symmetric,
    )
    state.weak_sets.append(orbit)


def _rule_gamma_gaussian(problem: ProblemSpec, state: _Analysis) -> None:
    result = gamma_gaussian_check(problem)
    if result.status == "strong":
        state.fire(
            "gamma-gaussian",
            "gamma shapes have pairwise distinct subset sums: solution set "
            "is {beta0}",
        )
        state.strong = True
        state.weak_sets.append(
            SolutionSet(
                kind=SolutionSetKind.SINGLETON,
                qualifier=Qualifier.EXACT,
                elements=(tuple(problem.beta0),),
                bound=1,
            )
        )
    elif result.status == "collision":
        first, second = result.colliding
        state.fire(
            "gamma-gaussian",
            "gamma shape subset sums collide: criterion silent "
            f"({sorted(first)} vs {sorted(second)})",
            colliding=[sorted(first), sorted(second)],
        )


def _rule_convolution(problem: ProblemSpec, state: _Analysis) -> None:
    candidates = convolution_alternatives(problem)
    if not candidates:
        return
    state.fire(
        "convolution",
        f"{len(candidates)} convolution-closure candidate(s) found",
        candidates=[
            {"beta": list(c.beta), "status": c.status} for c in candidates
        ],
    )
    for cand in candidates:
        if cand.status == "certified" and not np.allclose(
            cand.beta, problem.beta0
        ):
            state.extra_witnesses.append(cand.beta)


def _rule_fourth_moment(problem: ProblemSpec, state: _Analysis) -> None:
    try:
        std_problem, record = standardize(problem)
    except Exception as exc:  # degenerate component: nothing to do here
        state.warnings.append(f"standardization unavailable: {exc}")
        return
    if problem.d == 2:
        try:
            m1 = std_problem.components[0].raw_moment(4)
            m2 = std_problem.components[1].raw_moment(4)
        except MomentUndefined as exc:
            state.reasons.append(f"fourth moments unavailable: {exc}")
            return
        try:
            report = fourth_moment_test(m1, m2, *std_problem.beta0)
        except PreconditionUnmet as exc:
            state.warnings.append(f"fourth-moment criterion silent: {exc}")
            return
        summary = (
            "one admissible squared direction: solutions limited to sign flips"
            if report.verdict is FourthMomentVerdict.SIGN_FLIPS_ONLY
            else "two admissible squared directions: at most eight solutions"
        )
        state.fire(
            "fourth-moment",
            summary,
            c=report.c,
            w1=report.w1,
            w2=report.w2,
            roots=list(report.roots_x),
        )
        if report.verdict is FourthMomentVerdict.SIGN_FLIPS_ONLY:
            outcome = sign_flip_refine(problem, report)
            report = FourthMomentReport(
                c=report.c,
                w1=report.w1,
                w2=report.w2,
                branch=report.branch,
                roots_x=report.roots_x,
                verdict=report.verdict,
                m1=report.m1,
                m2=report.m2,
                alpha=report.alpha,
                beta=report.beta,
                refinement=outcome,
            )
            state.fire(
                "sign-flip-refine",
                f"{len(outcome.survivors)} sign pattern(s) survive moment "
                "checks of orders 1-3",
                survivors=[list(s) for s in outcome.survivors],
            )
            if outcome.strong:
                state.strong = True
            qualifier = (
                Qualifier.EXACT
                if all(c.is_symmetric for c in problem.components)
                and not record.superset
                else Qualifier.SUPERSET
            )
            state.weak_sets.append(
                SolutionSet(
                    kind=SolutionSetKind.FINITE_ORBIT
                    if len(outcome.survivors) > 1
                    else SolutionSetKind.SINGLETON,
                    qualifier=qualifier,
                    elements=outcome.survivors,
                    bound=len(outcome.survivors),
                    signs_included=True,
                )
            )
        else:
            state.weak_sets.append(
                SolutionSet(
                    kind=SolutionSetKind.BOUNDED_CARDINALITY,
                    qualifier=Qualifier.SUPERSET,
                    bound=8,
                )
            )
        state.fourth_moment = report
    else:
        try:
            partitions = recursive_partition_analysis(std_problem)
        except Exception as exc:
            state.warnings.append(f"partition recursion unavailable: {exc}")
            return
        state.partitions = partitions
        if partitions.ok:
            state.fire(
                "partition-recursion",
                f"all pair/rest partitions avoid the silent case: at most "
                f"{partitions.bound} solutions",
                bound=partitions.bound,
            )
            state.weak_sets.append(
                SolutionSet(
                    kind=SolutionSetKind.BOUNDED_CARDINALITY,
                    qualifier=Qualifier.SUPERSET,
                    bound=partitions.bound,
                )
            )
        else:
            degenerate = [
                list(inv.pair)
                for inv in partitions.invocations
                if inv.outcome == "degenerate"
            ]
            state.fire(
                "partition-recursion",
                "some partition hits the silent m1 = m2 = 3 case: no bound",
                degenerate_pairs=degenerate,
            )
            state.reasons.append(
                "partition recursion degenerate on "
                f"{len(degenerate)} invocation(s)"
            )


def _spot_check(
    problem: ProblemSpec,
    chosen: Optional[SolutionSet],
    oracle: Optional[OracleConfig],
    state: _Analysis,
) -> list[OracleRecord]:
    if oracle is None or chosen is None:
        return []
    if not problem.samplable:
        state.warnings.append("oracle spot-checks skipped: problem not samplable")
        return []
    targets: list[tuple[float, ...]] = []
    beta0 = problem.beta0_array()
    candidates = list(chosen.elements)
    if chosen.kind is SolutionSetKind.SPHERE and problem.d >= 2:
        axis = [0.0] * problem.d
        axis[0] = chosen.radius
        candidates.extend([tuple(axis), tuple(-v for v in beta0)])
    for el in candidates:
        if len(targets) >= MAX_ORACLE_SPOT_CHECKS:
            break
        if not np.allclose(el, beta0):
            targets.append(el)
    for witness in state.extra_witnesses:
        if len(targets) >= MAX_ORACLE_SPOT_CHECKS:
            break
        if all(not np.allclose(witness, t) for t in targets):
            targets.append(witness)
    records: list[OracleRecord] = []
    for target in targets:
        try:
            rec = verify_candidate(problem, target, oracle)
        except NotSamplable:
            break
        records.append(rec)
        member_claimed = chosen.qualifier is not Qualifier.SUPERSET and (
            chosen.contains(target) or target in state.extra_witnesses
        )
        if member_claimed and rec.decision == "reject":
            state.warnings.append(
                f"oracle rejected analytically certified member {list(target)} "
                f"(p={rec.p_value:.4g})"
            )
    return records


def analyze(
    problem: ProblemSpec, oracle: Optional[OracleConfig] = None
) -> IdentifiabilityVerdict:
    """Classify identifiability of the regression vector for this problem."""
    state = _Analysis()

    if not noise_admissible(problem.noise):
        state.fire(
            "noise-gate",
            "noise CF may vanish on an interval: analytic criteria blocked",
        )
        state.reasons.append(
            "noise admissibility fails; returning inconclusive rather than "
            "attempting deconvolution"
        )
        return _finalize(problem, state, oracle)

    _rule_joint_structure(problem, state)
    if problem.independent and state.exact_infinite is None:
        _rule_all_gaussian(problem, state)
        if not all(c.is_gaussian for c in problem.components):
            _rule_iid(problem, state)
            _rule_scale_family(problem, state)
            _rule_gamma_gaussian(problem, state)
            _rule_convolution(problem, state)
            if not state.strong:
                _rule_fourth_moment(problem, state)
    return _finalize(problem, state, oracle)


def _finalize(
    problem: ProblemSpec, state: _Analysis, oracle: Optional[OracleConfig]
) -> IdentifiabilityVerdict:
    chosen: Optional[SolutionSet] = None
    verdict = VerdictClass.INCONCLUSIVE
    bound: Optional[int] = None

    if state.exact_infinite is not None:
        verdict = VerdictClass.NON_IDENTIFIABLE
        chosen = state.exact_infinite
    elif state.strong and not state.extra_witnesses:
        verdict = VerdictClass.STRONG
        bound = 1
        chosen = SolutionSet(
            kind=SolutionSetKind.SINGLETON,
            qualifier=Qualifier.EXACT,
            elements=(tuple(problem.beta0),),
            bound=1,
        )
    elif state.weak_sets:
        verdict = VerdictClass.WEAK
        chosen = min(
            state.weak_sets,
            key=lambda s: (s.bound if s.bound is not None else 10**9,
                           s.qualifier is not Qualifier.EXACT),
        )
        bound = chosen.bound
    else:
        if not state.reasons:
            state.reasons.append(
                "no analytic criterion applies to this component layout"
            )
        _maybe_conjecture_note(problem, state)

    if state.strong and state.extra_witnesses:
        state.warnings.append(
            "a strong criterion and a certified extra witness both fired; "
            "reporting weak with the witness family listed"
        )
        verdict = VerdictClass.WEAK

    evidence = tuple(_spot_check(problem, chosen, oracle, state))
    return IdentifiabilityVerdict(
        verdict=verdict,
        bound=bound,
        solution_set=chosen,
        reasons=tuple(state.reasons),
        fired_rules=tuple(state.rules),
        oracle_evidence=evidence,
        warnings=tuple(state.warnings),
        fourth_moment=state.fourth_moment,
        partitions=state.partitions,
    )


def _maybe_conjecture_note(problem: ProblemSpec, state: _Analysis) -> None:
    if not problem.independent:
        return
    unit_variance = all(
        abs(c.variance() - 1.0) <= 1e-9 for c in problem.components
    )
    gaussians = sum(1 for c in problem.components if c.is_gaussian)
    minimal = not convolution_alternatives(problem)
    if unit_variance and gaussians <= 1 and minimal:
        state.fire(
            "conjecture-note",
            "independent unit-variance components, at most one Gaussian, no "
            "convolution relation detected: identifiability up to signed "
            "permutations is conjectured but not established here",
        )
