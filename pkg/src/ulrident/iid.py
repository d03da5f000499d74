"""Identifiability checks for i.i.d. components.

Two linear forms sum a_j X_j and sum b_j X_j of i.i.d. variables can only
agree in distribution under tight constraints on the coefficients:

* Marcinkiewicz: with all moments finite, either {|a_j|} is a permutation
  of {|b_j|} or the common law is Gaussian.
* Linnik: with no moment assumption, whether distributional equality forces
  Gaussianity is decided by the positive zeros of

      tau(x) = sum_j (a_j^2)^x - sum_j (b_j^2)^x

  through integrality/multiplicity conditions (A) and (B) on those zeros.
* Ghurye-Olkin: a checkable partial-sum condition on the sorted squared
  coefficients that is sufficient for (A) and (B).

tau is an exponential sum c_1 r_1^x + ... + c_K r_K^x (after grouping equal
squared coefficients), so it has at most K-1 positive zeros counted with
multiplicity.  Zeros are isolated exactly: the stationary points of tau are
the zeros of another exponential sum, found recursively, and tau is
monotone between consecutive stationary points.  Sign changes over monotone
pieces give simple zeros; stationary points where tau itself vanishes give
double zeros.  Everything is evaluated with bases normalized by the largest
squared coefficient so that no overflow occurs, and a dominance horizon
bounds the search interval: beyond it the leading term outweighs the rest
and no further zeros exist.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from .distributions import Distribution
from .errors import (
    AllZeroCoefficients,
    DegenerateTau,
    PreconditionUnmet,
    RootIsolationFailure,
)

TOL_INT = 1e-6
TOL_DERIV = 1e-8
TOL_RESIDUAL = 1e-10
MIN_ROOT_SEPARATION = 1e-4
_GROUP_RTOL = 1e-12

# Shipped instance with a sole positive tau zero at x = 1/2 (found by a
# small constructive search: sqrt(4) + sqrt(1) = sqrt(6.25) + sqrt(0.25)).
# Its largest zero has even integral part, so condition (B) fails.
SOLE_ROOT_HALF_PAIR: tuple[tuple[float, ...], tuple[float, ...]] = (
    (2.0, 1.0),
    (2.5, 0.5),
)

# Three-coefficient pair whose tau has the single simple zero xi0 = 1:
# conditions (A) and (B) hold while the Ghurye-Olkin partial sums fail.
LINNIK_SATISFIED_PAIR: tuple[tuple[float, ...], tuple[float, ...]] = (
    (math.sqrt(0.5), math.sqrt(0.25), math.sqrt(0.25)),
    (math.sqrt(0.4), math.sqrt(0.4), math.sqrt(0.2)),
)


class Multiplicity(Enum):
    SIMPLE = "simple"
    DOUBLE = "double"


@dataclass(frozen=True)
class TauRoot:
    x: float
    multiplicity: Multiplicity
    residual: float


@dataclass(frozen=True)
class TauAnalysis:
    roots: tuple[TauRoot, ...]
    xi0: Optional[float]
    p: int
    q: int
    a_max: float
    cond_a: bool
    cond_b: bool
    degenerate: bool
    x_max: float
    warnings: tuple[str, ...] = ()


# ---------------------------------------------------------------------------
# Exponential-sum core
# ---------------------------------------------------------------------------


def _grouped_terms(a: Sequence[float], b: Sequence[float]) -> list[tuple[float, float]]:
    """Merge squared coefficients into (signed count, base) terms.

    Zero coefficients contribute nothing for x > 0 and are dropped; equal
    bases (within relative tolerance) from either side are merged and
    cancelled terms removed.  An empty result means tau vanishes identically.
    """
    pairs: list[tuple[float, float]] = []
    for v in a:
        if v != 0:
            pairs.append((float(v) * float(v), 1.0))
    for v in b:
        if v != 0:
            pairs.append((float(v) * float(v), -1.0))
    pairs.sort()
    terms: list[tuple[float, float]] = []
    for base, coeff in pairs:
        if terms and abs(base - terms[-1][1]) <= _GROUP_RTOL * max(base, terms[-1][1]):
            merged = terms[-1][0] + coeff
            terms[-1] = (merged, terms[-1][1])
        else:
            terms.append((coeff, base))
    return [(c, v) for c, v in terms if c != 0]


def _eval_exp_sum(terms: Sequence[tuple[float, float]], x: float) -> float:
    return sum(c * math.exp(x * math.log(v)) for c, v in terms)


def _abs_scale(terms: Sequence[tuple[float, float]], x: float) -> float:
    return sum(abs(c) * math.exp(x * math.log(v)) for c, v in terms)


def _derivative_terms(
    terms: Sequence[tuple[float, float]],
) -> list[tuple[float, float]]:
    out = [(c * math.log(v), v) for c, v in terms if v != 1.0]
    return [(c, v) for c, v in out if c != 0.0]


def _dominance_horizon(terms: Sequence[tuple[float, float]]) -> float:
    """x beyond which the largest-base term outweighs all others in modulus."""
    if len(terms) < 2:
        return 0.0
    ordered = sorted(terms, key=lambda t: t[1])
    c_top, v_top = ordered[-1]
    v_second = ordered[-2][1]
    total = sum(abs(c) for c, _ in ordered[:-1])
    gap = math.log(v_top) - math.log(v_second)
    x_dom = math.log(total / abs(c_top)) / gap
    return max(x_dom, 0.0)


def _exp_sum_roots(
    terms: list[tuple[float, float]], x_hi: float
) -> list[tuple[float, int]]:
    """All zeros of sum c_i v_i^x on (0, x_hi], as (location, multiplicity).

    The sum is divided by its top exponential first (same zeros, one
    constant term); differentiating then drops the constant, so each
    recursion level has one term fewer and the recursion bottoms out.
    """
    if len(terms) < 2:
        return []
    v_top = max(v for _, v in terms)
    terms = [(c, v / v_top) for c, v in terms]

    def f(x: float) -> float:
        return _eval_exp_sum(terms, x)

    stationary = [s for s, _ in _exp_sum_roots(_derivative_terms(terms), x_hi)]
    knots = [0.0] + sorted(s for s in stationary if 0.0 < s <= x_hi) + [x_hi]

    roots: list[tuple[float, int]] = []
    values = [f(k) for k in knots]
    scales = [_abs_scale(terms, k) for k in knots]
    near_zero = [abs(v) <= TOL_RESIDUAL * max(s, 1e-300) for v, s in zip(values, scales)]

    # Stationary points where the function itself vanishes are double zeros.
    for i in range(1, len(knots) - 1):
        if near_zero[i]:
            roots.append((knots[i], 2))

    for i in range(len(knots) - 1):
        lo, hi = knots[i], knots[i + 1]
        if hi - lo <= 0:
            continue
        if near_zero[i] or near_zero[i + 1]:
            continue  # monotone piece leaving a zero endpoint cannot return
        if values[i] * values[i + 1] < 0:
            x0 = brentq(f, lo, hi, xtol=1e-15, rtol=8.9e-16, maxiter=200)
            roots.append((float(x0), 1))

    roots.sort()
    return roots


# ---------------------------------------------------------------------------
# Public operations
# ---------------------------------------------------------------------------


def tau_eval(
    a: Sequence[float], b: Sequence[float], x: float
) -> tuple[float, float]:
    """Value and analytic derivative of tau at x > 0.

    Internally evaluated with bases divided by the largest squared
    coefficient (no overflow), then rescaled.
    """
    if all(v == 0 for v in a) and all(v == 0 for v in b):
        raise AllZeroCoefficients("tau undefined: all coefficients are zero")
    terms = _grouped_terms(a, b)
    if not terms:
        return 0.0, 0.0
    v_max = max(v for _, v in terms)
    norm = [(c, v / v_max) for c, v in terms]
    g = _eval_exp_sum(norm, x)
    g_prime = sum(c * math.log(v) * math.exp(x * math.log(v)) for c, v in norm)
    rescale = math.exp(x * math.log(v_max))
    value = g * rescale
    derivative = (g_prime + math.log(v_max) * g) * rescale
    return value, derivative


def tau_roots(a: Sequence[float], b: Sequence[float]) -> TauAnalysis:
    """Locate and classify every positive zero of tau; check (A) and (B)."""
    a = [float(v) for v in a]
    b = [float(v) for v in b]
    if all(v == 0 for v in a) and all(v == 0 for v in b):
        raise AllZeroCoefficients("tau undefined: all coefficients are zero")

    a_max = max(a + b)
    p = sum(1 for v in a if abs(v - a_max) <= _GROUP_RTOL * max(1.0, abs(a_max)))
    q = sum(1 for v in b if abs(v - a_max) <= _GROUP_RTOL * max(1.0, abs(a_max)))
    warnings: list[str] = []
    abs_peak = max(abs(v) for v in a + b)
    if any(
        v < 0 and abs(abs(v) - abs_peak) <= _GROUP_RTOL * max(1.0, abs_peak)
        for v in a + b
    ):
        warnings.append(
            "negative coefficients attain the largest magnitude; p and q count "
            "equality with the raw maximum only"
        )

    terms = _grouped_terms(a, b)
    if not terms:
        analysis = TauAnalysis(
            roots=(),
            xi0=None,
            p=p,
            q=q,
            a_max=a_max,
            cond_a=True,
            cond_b=False,
            degenerate=True,
            x_max=0.0,
            warnings=tuple(
                warnings
                + ["tau vanishes identically: |a| is a permutation of |b|"]
            ),
        )
        exc = DegenerateTau("tau vanishes identically: |a| is a permutation of |b|")
        exc.analysis = analysis
        raise exc

    v_max = max(v for _, v in terms)
    norm = [(c, v / v_max) for c, v in terms]
    x_hi = _dominance_horizon(norm) + 1.0

    located = _exp_sum_roots(norm, x_hi)
    if any(
        abs(located[i + 1][0] - located[i][0]) < MIN_ROOT_SEPARATION
        for i in range(len(located) - 1)
    ):
        raise RootIsolationFailure(
            "two tau zeros closer than the configured separation 1e-4"
        )

    roots: list[TauRoot] = []
    for x0, mult in located:
        g = _eval_exp_sum(norm, x0)
        scale = _abs_scale(norm, x0)
        g1 = sum(c * math.log(v) * math.exp(x0 * math.log(v)) for c, v in norm)
        if mult == 1 and abs(g1) <= TOL_DERIV * max(scale, 1e-300):
            mult = 2
        roots.append(
            TauRoot(
                x=x0,
                multiplicity=Multiplicity.DOUBLE if mult >= 2 else Multiplicity.SIMPLE,
                residual=abs(g) / max(scale, 1e-300),
            )
        )

    xi0 = roots[-1].x if roots else None

    cond_a = all(
        abs(r.x - round(r.x)) <= TOL_INT and r.multiplicity is Multiplicity.SIMPLE
        for r in roots[:-1]
    )
    cond_b = False
    if roots:
        last = roots[-1]
        if last.multiplicity is Multiplicity.SIMPLE:
            m_lo = max(1, math.floor((last.x - TOL_INT) / 2))
            cond_b = any(
                2 * m - 1 - TOL_INT <= last.x <= 2 * m + TOL_INT
                for m in range(m_lo, m_lo + 3)
            )
        else:
            nearest = round(last.x)
            cond_b = abs(last.x - nearest) <= TOL_INT and nearest % 2 == 1

    return TauAnalysis(
        roots=tuple(roots),
        xi0=xi0,
        p=p,
        q=q,
        a_max=a_max,
        cond_a=cond_a,
        cond_b=cond_b,
        degenerate=False,
        x_max=x_hi,
        warnings=tuple(warnings),
    )


def tau_table(
    a: Sequence[float], b: Sequence[float], points: int = 512
) -> tuple[np.ndarray, np.ndarray]:
    """Evenly spaced (x, tau(x)) table on (0, x_max] for plotting/export."""
    try:
        analysis = tau_roots(a, b)
        x_hi = analysis.x_max if analysis.x_max > 0 else 1.0
    except DegenerateTau:
        x_hi = 1.0
    xs = np.linspace(x_hi / points, x_hi, points)
    values = np.array([tau_eval(a, b, float(x))[0] for x in xs])
    return xs, values


@dataclass(frozen=True)
class LinnikReport:
    """Outcome of the coefficient conditions (A)/(B) plus the moment tails.

    When ``applies`` is true, distributional equality of the two linear
    forms forces the common law to be Gaussian -- with mean zero unless the
    coefficient sums agree, and variance zero unless the sums of squares
    agree.  Contrapositively, for a declared non-Gaussian common law the
    two forms cannot agree in distribution.
    """

    applies: bool
    gaussian_forced: bool
    mu_forced_zero: bool
    variance_forced_zero: bool
    sum_a: float
    sum_b: float
    sum_a_sq: float
    sum_b_sq: float
    tau: TauAnalysis
    narrative: str


def linnik_check(a: Sequence[float], b: Sequence[float]) -> LinnikReport:
    """Evaluate conditions (A) and (B); requires p != q."""
    try:
        analysis = tau_roots(a, b)
    except DegenerateTau as exc:
        analysis = exc.analysis
    if analysis.p == analysis.q:
        raise PreconditionUnmet(
            f"p = q = {analysis.p}: the criterion is silent for this pair"
        )
    applies = analysis.cond_a and analysis.cond_b and not analysis.degenerate
    sum_a, sum_b = float(np.sum(a)), float(np.sum(b))
    sum_a_sq = float(np.sum(np.square(a)))
    sum_b_sq = float(np.sum(np.square(b)))
    tol = 1e-12 * max(1.0, abs(sum_a), abs(sum_b))
    tol_sq = 1e-12 * max(1.0, sum_a_sq, sum_b_sq)
    mu_forced = abs(sum_a - sum_b) > tol
    var_forced = abs(sum_a_sq - sum_b_sq) > tol_sq
    if applies:
        pieces = ["equality in distribution forces a Gaussian common law"]
        pieces.append(
            "with mean 0 (coefficient sums differ)"
            if mu_forced
            else "mean unconstrained (coefficient sums agree)"
        )
        pieces.append(
            "and variance 0 (sums of squares differ)"
            if var_forced
            else "variance unconstrained (sums of squares agree)"
        )
        narrative = "; ".join(pieces)
    else:
        narrative = (
            "conditions (A)/(B) fail: a non-Gaussian common law admitting "
            "the equality exists"
        )
    return LinnikReport(
        applies=applies,
        gaussian_forced=applies,
        mu_forced_zero=applies and mu_forced,
        variance_forced_zero=applies and var_forced,
        sum_a=sum_a,
        sum_b=sum_b,
        sum_a_sq=sum_a_sq,
        sum_b_sq=sum_b_sq,
        tau=analysis,
        narrative=narrative,
    )


def ghurye_olkin_check(a: Sequence[float], b: Sequence[float]) -> bool:
    """Partial-sum sufficiency on sorted squared coefficients.

    True iff, after sorting both squared vectors in descending order, every
    leading partial sum of a^2 dominates that of b^2 with strict inequality
    somewhere, while the totals agree.
    """
    a_sq = np.sort(np.square(np.asarray(a, dtype=float)))[::-1]
    b_sq = np.sort(np.square(np.asarray(b, dtype=float)))[::-1]
    if a_sq.shape != b_sq.shape or a_sq.size < 2:
        return False
    total_a, total_b = float(a_sq.sum()), float(b_sq.sum())
    tol = 1e-12 * max(1.0, total_a, total_b)
    if abs(total_a - total_b) > tol:
        return False
    partial_a = np.cumsum(a_sq)[:-1]
    partial_b = np.cumsum(b_sq)[:-1]
    diffs = partial_a - partial_b
    if np.any(diffs < -tol):
        return False
    return bool(np.any(diffs > tol))


class MarcinkiewiczVerdict(Enum):
    PERMUTATION_UP_TO_SIGN = "permutation_up_to_sign"
    GAUSSIAN_FORCED = "gaussian_forced"
    NOT_APPLICABLE = "not_applicable"


def marcinkiewicz_verdict(
    a: Sequence[float], b: Sequence[float], dist: Distribution
) -> MarcinkiewiczVerdict:
    """Dichotomy for i.i.d. components with all moments finite.

    ``PERMUTATION_UP_TO_SIGN``: the absolute coefficient multisets agree.
    ``GAUSSIAN_FORCED``: they differ, so distributional equality of the two
    forms is possible only for a Gaussian common law; for a declared
    non-Gaussian spec this certifies the candidate is not a solution.
    """
    if not dist.has_all_moments:
        return MarcinkiewiczVerdict.NOT_APPLICABLE
    a_abs = np.sort(np.abs(np.asarray(a, dtype=float)))
    b_abs = np.sort(np.abs(np.asarray(b, dtype=float)))
    if a_abs.shape == b_abs.shape:
        scale = max(1.0, float(a_abs[-1]) if a_abs.size else 1.0)
        if np.allclose(a_abs, b_abs, rtol=0.0, atol=1e-12 * scale):
            return MarcinkiewiczVerdict.PERMUTATION_UP_TO_SIGN
    return MarcinkiewiczVerdict.GAUSSIAN_FORCED
