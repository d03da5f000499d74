"""Identifiability analysis for independent but non-identical components.

Covers the structured cases where the solution set

    B0 = { b : b'X  equals  beta0'X  in distribution }

admits an explicit description: scale-family orbits, spherical/elliptical
laws, convolution-closure alternatives, the Gamma-plus-Gaussian class with
distinct subset sums (strong identifiability), the two-component
fourth-moment criterion with its sign-flip refinement, and the pairwise
partition recursion that extends the two-component bound to d > 2.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .distributions import (
    Distribution,
    Exponential,
    Gamma,
    Gaussian,
    ProblemSpec,
    check_positive_definite,
    convolution_family_tag,
)
from .errors import PreconditionUnmet, ValidationError
from .moments import MomentTable, moments_match_up_to, projected_moment

BOUNDARY_TOL = 1e-10


class SolutionSetKind(Enum):
    SINGLETON = "singleton"
    FINITE_ORBIT = "finite_orbit"
    SPHERE = "sphere"
    ELLIPSOID_HYPERPLANE = "ellipsoid_hyperplane"
    BOUNDED_CARDINALITY = "bounded_cardinality"
    UNKNOWN = "unknown"


class Qualifier(Enum):
    EXACT = "exact"
    SUPERSET = "superset"
    SUBSET = "subset"


@dataclass(frozen=True)
class SolutionSet:
    """Structured description of B0 (or a certified subset/superset of it)."""

    kind: SolutionSetKind
    qualifier: Qualifier
    elements: tuple[tuple[float, ...], ...] = ()
    radius: Optional[float] = None
    mu: Optional[tuple[float, ...]] = None
    sigma: Optional[tuple[tuple[float, ...], ...]] = None
    plane_value: Optional[float] = None
    bound: Optional[int] = None
    signs_included: bool = False

    def __post_init__(self):
        if self.kind in (SolutionSetKind.SPHERE, SolutionSetKind.ELLIPSOID_HYPERPLANE):
            if self.radius is None or not self.radius > 0:
                raise ValidationError("sphere/ellipsoid descriptions need radius > 0")

    def contains(self, beta: Sequence[float], tol: float = 1e-9) -> bool:
        beta = np.asarray(beta, dtype=float)
        if self.kind is SolutionSetKind.SPHERE:
            return abs(float(np.linalg.norm(beta)) - self.radius) <= tol * max(
                1.0, self.radius
            )
        if self.kind is SolutionSetKind.ELLIPSOID_HYPERPLANE:
            sigma = np.asarray(self.sigma, dtype=float)
            mu = np.asarray(self.mu, dtype=float)
            ell = math.sqrt(float(beta @ sigma @ beta))
            on_ellipsoid = abs(ell - self.radius) <= tol * max(1.0, self.radius)
            on_plane = abs(float(beta @ mu) - self.plane_value) <= tol * max(
                1.0, abs(self.plane_value)
            )
            return on_ellipsoid and on_plane
        scale = max(1.0, float(np.max(np.abs(beta))) if beta.size else 1.0)
        return any(
            np.allclose(beta, np.asarray(el), rtol=0.0, atol=tol * scale)
            for el in self.elements
        )

    def describe(self) -> dict:
        doc: dict = {"kind": self.kind.value, "qualifier": self.qualifier.value}
        if self.elements:
            doc["elements"] = [list(e) for e in self.elements]
        if self.radius is not None:
            doc["radius"] = self.radius
        if self.mu is not None:
            doc["mu"] = list(self.mu)
        if self.sigma is not None:
            doc["sigma"] = [list(r) for r in self.sigma]
        if self.plane_value is not None:
            doc["plane_value"] = self.plane_value
        if self.bound is not None:
            doc["bound"] = self.bound
        if self.signs_included:
            doc["signs_included"] = True
        return doc


def _dedupe(vectors: list[tuple[float, ...]]) -> tuple[tuple[float, ...], ...]:
    seen: dict[tuple[float, ...], tuple[float, ...]] = {}
    for vec in vectors:
        key = tuple(round(v, 12) + 0.0 for v in vec)
        seen.setdefault(key, vec)
    return tuple(seen.values())


# ---------------------------------------------------------------------------
# Scale families
# ---------------------------------------------------------------------------


def scale_family_orbit(
    beta0: Sequence[float], lambdas: Sequence[float], symmetric: bool
) -> SolutionSet:
    """Orbit of solutions when component j has scale parameter lambda_j.

    The permutation orbit { b : b_j = (lambda_j / lambda_s(j)) * beta0_s(j) }
    always consists of certified solutions.  For a base density symmetric
    about zero the orbit extended by all sign masks equals B0 exactly;
    otherwise the certified permutation orbit is reported as a subset of B0
    with the signed orbit size attached as a cardinality bound.
    """
    beta0 = np.asarray(beta0, dtype=float)
    lambdas = np.asarray(lambdas, dtype=float)
    if beta0.shape != lambdas.shape:
        raise ValidationError("beta0 and lambdas must have the same length")
    if np.any(lambdas <= 0):
        raise ValidationError("scale parameters must be positive")
    d = beta0.size
    perms: list[tuple[float, ...]] = []
    for sigma in itertools.permutations(range(d)):
        perms.append(
            tuple(float(lambdas[j] / lambdas[sigma[j]] * beta0[sigma[j]]) for j in range(d))
        )
    perm_orbit = _dedupe(perms)
    signed: list[tuple[float, ...]] = []
    for base in perm_orbit:
        for mask in itertools.product((1.0, -1.0), repeat=d):
            signed.append(tuple(m * v for m, v in zip(mask, base)))
    signed_orbit = _dedupe(signed)
    if symmetric:
        return SolutionSet(
            kind=SolutionSetKind.FINITE_ORBIT,
            qualifier=Qualifier.EXACT,
            elements=signed_orbit,
            bound=len(signed_orbit),
            signs_included=True,
        )
    return SolutionSet(
        kind=SolutionSetKind.FINITE_ORBIT,
        qualifier=Qualifier.SUBSET,
        elements=perm_orbit,
        bound=len(signed_orbit),
        signs_included=False,
    )


def detect_scale_family(
    components: Sequence[Distribution],
) -> Optional[tuple[np.ndarray, Distribution]]:
    """Scale parameters (lambda_j) when all components are scalings of one law.

    Component j is modeled as Z / lambda_j for a common base Z.  Supported:
    exponential (lambda = rate), gamma with a common shape (lambda = rate),
    zero-centered laplace/student-t (lambda = 1/scale) and zero-symmetric
    uniforms (lambda = 1/half-width).  Returns None when no common base fits.
    """
    if len(components) < 2:
        return None
    first = components[0]
    kind = type(first)
    if any(type(c) is not kind for c in components):
        return None
    from .distributions import Laplace, StudentT, Uniform  # local to avoid cycle noise

    if kind is Exponential:
        return np.array([c.rate for c in components]), Exponential(1.0)
    if kind is Gamma:
        shape = first.shape
        if any(abs(c.shape - shape) > 1e-12 * max(1.0, shape) for c in components):
            return None
        return np.array([c.rate for c in components]), Gamma(shape, 1.0)
    if kind is Laplace:
        if any(c.location != 0 for c in components):
            return None
        return np.array([1.0 / c.scale for c in components]), Laplace(0.0, 1.0)
    if kind is StudentT:
        dof = first.dof
        if any(c.location != 0 or c.dof != dof for c in components):
            return None
        return np.array([1.0 / c.scale for c in components]), StudentT(dof, 0.0, 1.0)
    if kind is Uniform:
        if any(abs(c.low + c.high) > 1e-12 * max(1.0, abs(c.high)) for c in components):
            return None
        return np.array([1.0 / c.high for c in components]), Uniform(-1.0, 1.0)
    return None


# ---------------------------------------------------------------------------
# Spherical / elliptical symmetry
# ---------------------------------------------------------------------------


def elliptical_solution_set(
    mu: Sequence[float], sigma: Sequence[Sequence[float]], beta0: Sequence[float]
) -> SolutionSet:
    """Exact B0 for an elliptically symmetric law with parameters (mu, sigma).

    B0 is the intersection of the hyperplane b'mu = beta0'mu with the
    ellipsoid ||sigma^(1/2) b|| = ||sigma^(1/2) beta0||; for mu = 0 and
    sigma = I it reduces to the sphere of radius ||beta0||.
    """
    mu = np.asarray(mu, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    beta0 = np.asarray(beta0, dtype=float)
    check_positive_definite(sigma)
    if mu.shape != beta0.shape or sigma.shape != (beta0.size, beta0.size):
        raise ValidationError("mu/sigma dimensions must match beta0")
    rho = math.sqrt(float(beta0 @ sigma @ beta0))
    if np.allclose(mu, 0.0) and np.allclose(sigma, np.eye(beta0.size)):
        return SolutionSet(
            kind=SolutionSetKind.SPHERE,
            qualifier=Qualifier.EXACT,
            radius=float(np.linalg.norm(beta0)),
        )
    return SolutionSet(
        kind=SolutionSetKind.ELLIPSOID_HYPERPLANE,
        qualifier=Qualifier.EXACT,
        radius=rho,
        mu=tuple(float(v) for v in mu),
        sigma=tuple(tuple(float(v) for v in row) for row in sigma),
        plane_value=float(beta0 @ mu),
    )


# ---------------------------------------------------------------------------
# Convolution closure alternatives
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConvolutionCandidate:
    beta: tuple[float, ...]
    status: str  # "certified" | "needs_oracle"
    target: int
    source: tuple[int, ...]
    alphas: tuple[float, ...]


_MAX_RELATION_SUBSET = 3
_MAX_INTEGER_ALPHA = 3


def _gamma_relation_alphas(
    target: Distribution, sources: Sequence[Distribution]
) -> Optional[tuple[float, ...]]:
    # alpha_i * Gamma(shape_i, rate_i) has rate rate_i / alpha_i; the sum
    # matches the target iff all rescaled rates equal the target rate and
    # the shapes add up.
    def shape(d):
        return d.shape if isinstance(d, Gamma) else 1.0

    rate_t = target.rate
    alphas = []
    for s in sources:
        alpha = s.rate / rate_t
        if alpha < 0.5 or abs(alpha - round(alpha)) > 1e-9:
            return None
        alphas.append(float(round(alpha)))
    total = sum(shape(s) for s in sources)
    if abs(total - shape(target)) > 1e-12 * max(1.0, shape(target)):
        return None
    return tuple(alphas)


def _gaussian_relation_alphas(
    target: Gaussian, sources: Sequence[Gaussian]
) -> Optional[tuple[float, ...]]:
    for alphas in itertools.product(
        range(1, _MAX_INTEGER_ALPHA + 1), repeat=len(sources)
    ):
        mean = sum(a * s.mu for a, s in zip(alphas, sources))
        var = sum(a * a * s.var for a, s in zip(alphas, sources))
        if (
            abs(mean - target.mu) <= 1e-12 * max(1.0, abs(target.mu))
            and abs(var - target.var) <= 1e-12 * max(1.0, target.var)
        ):
            return tuple(float(a) for a in alphas)
    return None


def convolution_alternatives(problem: ProblemSpec) -> list[ConvolutionCandidate]:
    """Alternative coefficient vectors from in-family convolution identities.

    For every detected identity  X_j = sum over I of alpha_i X_i  (in
    distribution), the vector beta0 + delta with delta_j = -beta0_j and
    delta_i = alpha_i beta0_j is emitted.  It is a certified solution when
    beta0 vanishes on I: the replacement then involves fresh independent
    variables only.  Otherwise the same X_i would appear on both sides with
    different weights, the construction is not distributionally valid in
    general, and the candidate is handed to the oracle instead.
    """
    if not problem.independent:
        return []
    d = problem.d
    tags = [convolution_family_tag(c) for c in problem.components]
    out: list[ConvolutionCandidate] = []
    for j in range(d):
        if problem.beta0[j] == 0 or tags[j] is None:
            continue
        same = [
            i
            for i in range(d)
            if i != j and tags[i] is not None and tags[i].kind == tags[j].kind
        ]
        for size in range(1, min(_MAX_RELATION_SUBSET, len(same)) + 1):
            for subset in itertools.combinations(same, size):
                target = problem.components[j]
                sources = [problem.components[i] for i in subset]
                if tags[j].kind == "gamma":
                    alphas = _gamma_relation_alphas(target, sources)
                elif tags[j].kind == "gaussian":
                    alphas = _gaussian_relation_alphas(target, sources)
                else:
                    alphas = None
                if alphas is None:
                    continue
                beta = list(problem.beta0)
                for alpha, i in zip(alphas, subset):
                    beta[i] += alpha * problem.beta0[j]
                beta[j] = 0.0
                certified = all(problem.beta0[i] == 0 for i in subset)
                out.append(
                    ConvolutionCandidate(
                        beta=tuple(float(v) for v in beta),
                        status="certified" if certified else "needs_oracle",
                        target=j,
                        source=subset,
                        alphas=alphas,
                    )
                )
    return out


# ---------------------------------------------------------------------------
# Gamma components plus one Gaussian
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GammaGaussianResult:
    status: str  # "strong" | "collision" | "precondition_failed"
    colliding: Optional[tuple[frozenset[int], frozenset[int]]] = None
    reason: Optional[str] = None


def gamma_gaussian_check(problem: ProblemSpec) -> GammaGaussianResult:
    """Strong identifiability for gamma components plus one shifted Gaussian.

    Requires d >= 3 independent components, exactly one Gaussian with
    nonzero mean (conventionally listed last) and gamma/exponential
    components elsewhere.  The solution set collapses to {beta0} exactly
    when all subset sums of the gamma shape parameters are distinct; the
    first colliding pair of index sets is reported otherwise.
    """
    if problem.d < 3:
        return GammaGaussianResult("precondition_failed", reason="needs d >= 3")
    if not problem.independent:
        return GammaGaussianResult(
            "precondition_failed", reason="components must be independent"
        )
    gaussians = [i for i, c in enumerate(problem.components) if isinstance(c, Gaussian)]
    if len(gaussians) != 1:
        return GammaGaussianResult(
            "precondition_failed", reason="exactly one Gaussian component required"
        )
    g = problem.components[gaussians[0]]
    if g.mu == 0:
        return GammaGaussianResult(
            "precondition_failed", reason="Gaussian component must have nonzero mean"
        )
    others = [i for i in range(problem.d) if i != gaussians[0]]
    shapes: list[float] = []
    for i in others:
        c = problem.components[i]
        if isinstance(c, Gamma):
            shapes.append(c.shape)
        elif isinstance(c, Exponential):
            shapes.append(1.0)
        else:
            return GammaGaussianResult(
                "precondition_failed",
                reason=f"component {i} is not gamma/exponential",
            )
    sums: list[tuple[float, frozenset[int]]] = []
    for size in range(len(shapes) + 1):
        for subset in itertools.combinations(range(len(shapes)), size):
            sums.append((sum(shapes[i] for i in subset), frozenset(subset)))
    sums.sort(key=lambda t: t[0])
    scale = max(1.0, sums[-1][0])
    for (s1, i1), (s2, i2) in zip(sums, sums[1:]):
        if abs(s1 - s2) <= 1e-12 * scale:
            first, second = sorted((i1, i2), key=lambda s: (len(s), sorted(s)))
            return GammaGaussianResult("collision", colliding=(first, second))
    return GammaGaussianResult("strong")


# ---------------------------------------------------------------------------
# Fourth-moment criterion for two components
# ---------------------------------------------------------------------------


class FourthMomentBranch(Enum):
    C_EQUALS_THREE = "c_equals_three"
    GENERIC = "generic"


class FourthMomentVerdict(Enum):
    SIGN_FLIPS_ONLY = "sign_flips_only"
    AT_MOST_EIGHT = "at_most_eight"


@dataclass(frozen=True)
class SignFlipOutcome:
    survivors: tuple[tuple[float, ...], ...]
    strong: bool


@dataclass(frozen=True)
class FourthMomentReport:
    c: float
    w1: Optional[float]
    w2: Optional[float]
    branch: FourthMomentBranch
    roots_x: tuple[float, ...]
    verdict: FourthMomentVerdict
    m1: float
    m2: float
    alpha: float
    beta: float
    refinement: Optional[SignFlipOutcome] = None


def fourth_moment_weights(
    m1: float, m2: float, alpha: float, beta: float
) -> tuple[float, float, float]:
    """(c, w1, w2) for standardized fourth moments m1, m2 and direction
    (alpha, beta); the weights are +-inf when c = 3 exactly."""
    r_sq = alpha * alpha + beta * beta
    au_sq = alpha * alpha / r_sq
    bu_sq = beta * beta / r_sq
    c = au_sq * au_sq * m1 + bu_sq * bu_sq * m2 + 6.0 * au_sq * bu_sq
    denom = c - 3.0

    def weight(delta: float) -> float:
        if denom != 0.0:
            return delta / denom
        return math.copysign(math.inf, delta) if delta != 0 else math.nan

    return c, weight(m1 - 3.0), weight(m2 - 3.0)


def _filter_unit_interval(roots: Sequence[float]) -> tuple[float, ...]:
    kept = [min(max(float(x), 0.0), 1.0) for x in roots if -BOUNDARY_TOL <= x <= 1.0 + BOUNDARY_TOL]
    kept.sort()
    out: list[float] = []
    for x in kept:
        if not out or abs(x - out[-1]) > BOUNDARY_TOL:
            out.append(x)
    return tuple(out)


def fourth_moment_test(
    m1: float, m2: float, alpha: float, beta: float
) -> FourthMomentReport:
    """Two-component identifiability from fourth moments of standardized parts.

    Any solution (a, b) must satisfy a^2 + b^2 = alpha^2 + beta^2 and match
    the fourth moment of the projection; writing x = (a/r)^2 this is a
    quadratic in x, and the admissible roots in [0, 1] enumerate the
    possible squared directions.  A single admissible root (necessarily
    the true one) limits solutions to sign flips of (alpha, beta); two
    admissible roots leave at most eight solutions.

    Raises :class:`PreconditionUnmet` when (alpha, beta) = (0, 0) or when
    m1 = m2 = 3, where the criterion is silent.
    """
    if alpha == 0 and beta == 0:
        raise PreconditionUnmet("coefficient pair must be nonzero")
    same_three = abs(m1 - 3.0) <= 1e-12 and abs(m2 - 3.0) <= 1e-12
    if same_three:
        raise PreconditionUnmet(
            "both fourth moments equal 3: the criterion is silent"
        )
    r_sq = alpha * alpha + beta * beta
    au_sq = alpha * alpha / r_sq
    c, _, _ = fourth_moment_weights(m1, m2, alpha, beta)

    if abs(c - 3.0) <= 1e-12 * max(1.0, abs(c)):
        delta1, delta2 = m1 - 3.0, m2 - 3.0
        if abs(delta1 + delta2) <= 1e-12 * max(1.0, abs(delta1), abs(delta2)):
            roots = [0.5]
        else:
            disc = max(-delta1 * delta2, 0.0)
            den = delta1 + delta2
            roots = [
                (delta2 + math.sqrt(disc)) / den,
                (delta2 - math.sqrt(disc)) / den,
            ]
        branch = FourthMomentBranch.C_EQUALS_THREE
        w1 = w2 = None
    else:
        den = c - 3.0
        w1 = (m1 - 3.0) / den
        w2 = (m2 - 3.0) / den
        if abs(w1 + w2) <= 1e-12 * max(1.0, abs(w1), abs(w2)):
            roots = [(w2 - 1.0) / (2.0 * w2)]
        else:
            disc = max(w1 + w2 - w1 * w2, 0.0)
            den2 = w1 + w2
            roots = [
                (w2 + math.sqrt(disc)) / den2,
                (w2 - math.sqrt(disc)) / den2,
            ]
        branch = FourthMomentBranch.GENERIC

    admissible = _filter_unit_interval(roots)
    if not any(abs(x - au_sq) <= 1e-7 for x in admissible):
        raise AssertionError(
            "internal inconsistency: the true squared direction is not among "
            "the admissible roots"
        )
    verdict = (
        FourthMomentVerdict.SIGN_FLIPS_ONLY
        if len(admissible) == 1
        else FourthMomentVerdict.AT_MOST_EIGHT
    )
    return FourthMomentReport(
        c=float(c),
        w1=w1,
        w2=w2,
        branch=branch,
        roots_x=admissible,
        verdict=verdict,
        m1=float(m1),
        m2=float(m2),
        alpha=float(alpha),
        beta=float(beta),
    )


def sign_flip_refine(
    problem: ProblemSpec, report: FourthMomentReport
) -> SignFlipOutcome:
    """Test the four sign patterns against low-order moments of the
    original (un-standardized) components.

    A pattern survives when the projected moments of orders 1..3 agree with
    those of beta0; only moments up to order three are consulted.  A single
    survivor upgrades the verdict to strong identifiability.
    """
    if report.verdict is not FourthMomentVerdict.SIGN_FLIPS_ONLY:
        raise PreconditionUnmet("refinement applies to the sign-flips-only verdict")
    if problem.d != 2:
        raise ValidationError("sign-flip refinement is a two-component operation")
    table = MomentTable.from_components(problem.components, 3)
    alpha, beta = problem.beta0
    candidates = _dedupe(
        [
            (s * alpha, t * beta)
            for s in (1.0, -1.0)
            for t in (1.0, -1.0)
        ]
    )
    survivors = [
        cand
        for cand in candidates
        if moments_match_up_to(table, cand, problem.beta0, 3)[0]
    ]
    return SignFlipOutcome(
        survivors=tuple(survivors), strong=len(survivors) == 1
    )


# ---------------------------------------------------------------------------
# Partition recursion for d > 2
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PartitionInvocation:
    pair: tuple[int, ...]
    rest: tuple[int, ...]
    kind: str  # "pair" | "combo"
    m1: Optional[float]
    m2: Optional[float]
    outcome: str  # "ok" | "degenerate" | "skipped_zero"
    verdict: Optional[str] = None


@dataclass(frozen=True)
class PartitionAnalysis:
    bound: Optional[int]
    ok: bool
    invocations: tuple[PartitionInvocation, ...]
    warnings: tuple[str, ...]


def recursive_partition_analysis(problem: ProblemSpec) -> PartitionAnalysis:
    """Cardinality bound for d > 2 via two-vs-rest partitions.

    For every pair {i, j} the criterion runs once on the pair itself and
    once on (combined pair, combined rest), with the combination's fourth
    moment computed exactly from the moment table; rests of size > 2 are
    split recursively.  If no invocation hits the silent m1 = m2 = 3 case
    the solution set has at most d! * 2^d elements.  Components must be
    standardized (zero mean, unit variance).
    """
    if problem.d <= 2:
        raise ValidationError("partition recursion applies to d > 2")
    if not problem.independent:
        raise ValidationError("partition recursion requires independent components")
    for comp in problem.components:
        if abs(comp.mean()) > 1e-9 or abs(comp.variance() - 1.0) > 1e-9:
            raise ValidationError("components must be standardized first")
    table = MomentTable.from_components(problem.components, 4)
    beta0 = problem.beta0_array()
    d = problem.d

    def group_stats(indices: tuple[int, ...]) -> tuple[float, float]:
        """(norm, standardized 4th moment) of the beta0-combination."""
        mask = np.zeros(d)
        mask[list(indices)] = beta0[list(indices)]
        norm = float(np.linalg.norm(mask))
        if norm == 0.0:
            return 0.0, math.nan
        m4 = projected_moment(table, mask, 4) / norm**4
        return norm, m4

    invocations: list[PartitionInvocation] = []
    warnings: list[str] = []
    invoked: set[tuple] = set()
    visited: set[tuple[int, ...]] = set()

    def invoke(pair, rest, kind, m1, m2, c1, c2):
        key = (pair, rest, kind)
        if key in invoked:
            return
        invoked.add(key)
        if c1 == 0 and c2 == 0:
            invocations.append(
                PartitionInvocation(pair, rest, kind, None, None, "skipped_zero")
            )
            warnings.append(
                f"partition {pair} vs {rest}: zero coefficients, criterion silent"
            )
            return
        try:
            rep = fourth_moment_test(m1, m2, c1, c2)
            invocations.append(
                PartitionInvocation(
                    pair, rest, kind, m1, m2, "ok", rep.verdict.value
                )
            )
        except PreconditionUnmet:
            invocations.append(
                PartitionInvocation(pair, rest, kind, m1, m2, "degenerate")
            )

    def visit(indices: tuple[int, ...]):
        if len(indices) <= 1 or indices in visited:
            return
        visited.add(indices)
        for i, j in itertools.combinations(indices, 2):
            rest = tuple(k for k in indices if k not in (i, j))
            invoke(
                (i, j),
                rest,
                "pair",
                table.moment(i, 4),
                table.moment(j, 4),
                float(beta0[i]),
                float(beta0[j]),
            )
            if rest:
                norm_p, m4_p = group_stats((i, j))
                norm_r, m4_r = group_stats(rest)
                if norm_p == 0.0 or norm_r == 0.0:
                    invoke((i, j), rest, "combo", None, None, 0.0, 0.0)
                else:
                    invoke((i, j), rest, "combo", m4_p, m4_r, norm_p, norm_r)
                visit(rest)

    visit(tuple(range(d)))
    degenerate = any(inv.outcome == "degenerate" for inv in invocations)
    bound = None if degenerate else math.factorial(d) * 2**d
    return PartitionAnalysis(
        bound=bound,
        ok=not degenerate,
        invocations=tuple(invocations),
        warnings=tuple(warnings),
    )
