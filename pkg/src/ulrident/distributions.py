"""Parametric univariate distributions with closed-form raw moments.

Families
========
Gaussian       (mean, variance)
Exponential    (rate)
Gamma          (shape, rate)
Laplace        (location, scale)
Uniform        (low, high)
StudentT       (dof, location, scale)
PointMass      (value)
Empirical      (user-supplied raw moments, optional sampler)

Every family answers raw moments up to order ``MAX_MOMENT_ORDER`` (where
finite), samples deterministically from a seed, and carries family-level
metadata used by the identifiability analyzers: symmetry about the mean,
Gaussianity, finiteness of all moments, closure under convolution, and
whether the characteristic function is free of zero intervals.  The last
flag is declared per family rather than estimated: certifying the absence
of an interval of CF zeros numerically is ill-posed, and it is a known
property of every built-in family.

Affine images ``scale * X + shift`` canonicalize back into the family
where possible (Gaussian, Laplace, Uniform, StudentT, PointMass, and pure
rescalings of Exponential/Gamma); the residual cases (shifted Gamma family
members, as produced by standardization) are represented by :class:`Affine`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import (
    DegenerateComponent,
    MomentUndefined,
    NotSamplable,
    OrderExceeded,
    SigmaNotPD,
    ValidationError,
)

MAX_MOMENT_ORDER = 8

_STANDARD_TOL = 1e-12


def _check_order(k: int) -> None:
    if not isinstance(k, (int, np.integer)):
        raise OrderExceeded(f"moment order must be an integer, got {k!r}")
    if k < 0 or k > MAX_MOMENT_ORDER:
        raise OrderExceeded(
            f"moment order {k} outside supported range 0..{MAX_MOMENT_ORDER}"
        )


def _raw_from_central(mean: float, central: Callable[[int], float], k: int) -> float:
    """Raw moment from central moments via the binomial shift identity."""
    return sum(
        math.comb(k, j) * central(j) * mean ** (k - j) for j in range(k + 1)
    )


class Distribution:
    """Common interface; concrete families are frozen dataclasses below."""

    family: str = "abstract"

    # -- moments ---------------------------------------------------------
    def raw_moment(self, k: int) -> float:
        _check_order(k)
        if k == 0:
            return 1.0
        return self._raw_moment(k)

    def _raw_moment(self, k: int) -> float:
        raise NotImplementedError

    def mean(self) -> float:
        return self.raw_moment(1)

    def variance(self) -> float:
        m1 = self.raw_moment(1)
        return self.raw_moment(2) - m1 * m1

    def central_moment(self, k: int) -> float:
        _check_order(k)
        mu = self.mean()
        return sum(
            math.comb(k, j) * self.raw_moment(j) * (-mu) ** (k - j)
            for j in range(k + 1)
        )

    # -- metadata --------------------------------------------------------
    @property
    def is_symmetric(self) -> bool:
        """True when the law is symmetric about its mean."""
        return False

    @property
    def is_gaussian(self) -> bool:
        return False

    @property
    def has_all_moments(self) -> bool:
        """True when moments of every positive order are finite."""
        return True

    @property
    def cf_zero_interval_free(self) -> bool:
        """Family-level fact: the CF has no open interval of zeros."""
        return True

    @property
    def samplable(self) -> bool:
        return True

    # -- sampling --------------------------------------------------------
    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        raise NotImplementedError

    def describe(self) -> dict:
        """JSON-friendly echo of the family and parameters."""
        raise NotImplementedError


@dataclass(frozen=True)
class Gaussian(Distribution):
    mu: float
    var: float
    family = "gaussian"

    def __post_init__(self):
        if not self.var > 0:
            raise ValidationError("gaussian variance must be > 0")

    def _raw_moment(self, k: int) -> float:
        sigma = math.sqrt(self.var)

        def central(j: int) -> float:
            if j % 2:
                return 0.0
            return sigma**j * math.prod(range(1, j, 2))  # (j-1)!!

        return _raw_from_central(self.mu, central, k)

    @property
    def is_symmetric(self) -> bool:
        return True

    @property
    def is_gaussian(self) -> bool:
        return True

    def sample(self, n, rng):
        return rng.normal(self.mu, math.sqrt(self.var), n)

    def describe(self):
        return {"family": "gaussian", "mean": self.mu, "variance": self.var}


@dataclass(frozen=True)
class Exponential(Distribution):
    rate: float
    family = "exponential"

    def __post_init__(self):
        if not self.rate > 0:
            raise ValidationError("exponential rate must be > 0")

    def _raw_moment(self, k: int) -> float:
        return math.factorial(k) / self.rate**k

    def sample(self, n, rng):
        return rng.exponential(1.0 / self.rate, n)

    def describe(self):
        return {"family": "exponential", "rate": self.rate}


@dataclass(frozen=True)
class Gamma(Distribution):
    shape: float
    rate: float
    family = "gamma"

    def __post_init__(self):
        if not (self.shape > 0 and self.rate > 0):
            raise ValidationError("gamma shape and rate must be > 0")

    def _raw_moment(self, k: int) -> float:
        num = math.prod(self.shape + i for i in range(k))  # rising factorial
        return num / self.rate**k

    def sample(self, n, rng):
        return rng.gamma(self.shape, 1.0 / self.rate, n)

    def describe(self):
        return {"family": "gamma", "shape": self.shape, "rate": self.rate}


@dataclass(frozen=True)
class Laplace(Distribution):
    location: float
    scale: float
    family = "laplace"

    def __post_init__(self):
        if not self.scale > 0:
            raise ValidationError("laplace scale must be > 0")

    def _raw_moment(self, k: int) -> float:
        def central(j: int) -> float:
            return 0.0 if j % 2 else math.factorial(j) * self.scale**j

        return _raw_from_central(self.location, central, k)

    @property
    def is_symmetric(self) -> bool:
        return True

    def sample(self, n, rng):
        return rng.laplace(self.location, self.scale, n)

    def describe(self):
        return {"family": "laplace", "location": self.location, "scale": self.scale}


@dataclass(frozen=True)
class Uniform(Distribution):
    low: float
    high: float
    family = "uniform"

    def __post_init__(self):
        if not self.low < self.high:
            raise ValidationError("uniform requires low < high")

    def _raw_moment(self, k: int) -> float:
        return (self.high ** (k + 1) - self.low ** (k + 1)) / (
            (k + 1) * (self.high - self.low)
        )

    @property
    def is_symmetric(self) -> bool:
        return True

    def sample(self, n, rng):
        return rng.uniform(self.low, self.high, n)

    def describe(self):
        return {"family": "uniform", "low": self.low, "high": self.high}


@dataclass(frozen=True)
class StudentT(Distribution):
    dof: float
    location: float
    scale: float
    family = "student_t"

    def __post_init__(self):
        if not self.dof > 2:
            raise ValidationError(
                "student_t requires dof > 2 (finite variance needed for analysis)"
            )
        if not self.scale > 0:
            raise ValidationError("student_t scale must be > 0")

    @property
    def moment_limited(self) -> bool:
        """True when fourth moments are unavailable (dof <= 4)."""
        return self.dof <= 4

    def _standard_central(self, j: int) -> float:
        # E[T^j] for standard t with self.dof degrees of freedom.
        if j >= self.dof:
            raise MomentUndefined(
                f"student_t moment of order {j} undefined for dof={self.dof}"
            )
        if j % 2:
            return 0.0
        nu = self.dof
        return (
            nu ** (j / 2)
            * math.gamma((j + 1) / 2)
            * math.gamma((nu - j) / 2)
            / (math.sqrt(math.pi) * math.gamma(nu / 2))
        )

    def _raw_moment(self, k: int) -> float:
        def central(j: int) -> float:
            return self.scale**j * self._standard_central(j)

        return _raw_from_central(self.location, central, k)

    @property
    def is_symmetric(self) -> bool:
        return True

    @property
    def has_all_moments(self) -> bool:
        return False

    def sample(self, n, rng):
        return self.location + self.scale * rng.standard_t(self.dof, n)

    def describe(self):
        return {
            "family": "student_t",
            "dof": self.dof,
            "location": self.location,
            "scale": self.scale,
        }


@dataclass(frozen=True)
class PointMass(Distribution):
    value: float
    family = "point_mass"

    def _raw_moment(self, k: int) -> float:
        return self.value**k

    @property
    def is_symmetric(self) -> bool:
        return True

    def sample(self, n, rng):
        return np.full(n, float(self.value))

    def describe(self):
        return {"family": "point_mass", "value": self.value}


@dataclass(frozen=True)
class Empirical(Distribution):
    """Moment-only spec for laws outside the built-in list.

    ``moments[i]`` is the raw moment of order ``i + 1``.  Without a sampler
    the spec supports analytic moment work only; oracle verification then
    raises :class:`NotSamplable`.
    """

    moments: tuple[float, ...]
    symmetric: bool = False
    cf_flag: bool = True
    sampler: Optional[Distribution] = None
    family = "empirical"

    def __post_init__(self):
        if len(self.moments) < 2:
            raise ValidationError("empirical spec needs moments up to order >= 2")
        if any(not math.isfinite(m) for m in self.moments):
            raise ValidationError("empirical moments must be finite")

    def _raw_moment(self, k: int) -> float:
        if k > len(self.moments):
            raise MomentUndefined(
                f"empirical spec carries moments up to order {len(self.moments)}"
            )
        return float(self.moments[k - 1])

    @property
    def is_symmetric(self) -> bool:
        return self.symmetric

    @property
    def has_all_moments(self) -> bool:
        return False

    @property
    def cf_zero_interval_free(self) -> bool:
        return self.cf_flag

    @property
    def samplable(self) -> bool:
        return self.sampler is not None

    def sample(self, n, rng):
        if self.sampler is None:
            raise NotSamplable("empirical spec has no sampler attached")
        return self.sampler.sample(n, rng)

    def describe(self):
        doc = {
            "family": "empirical",
            "moments": list(self.moments),
            "symmetric": self.symmetric,
            "cf_zero_interval_free": self.cf_flag,
        }
        if self.sampler is not None:
            doc["sampler"] = self.sampler.describe()
        return doc


@dataclass(frozen=True)
class Affine(Distribution):
    """``scale * base + shift`` for cases with no closed-family image."""

    base: Distribution
    scale: float
    shift: float
    family = "affine"

    def __post_init__(self):
        if self.scale == 0:
            raise ValidationError("affine scale must be nonzero")

    def _raw_moment(self, k: int) -> float:
        return sum(
            math.comb(k, j)
            * self.scale**j
            * self.base.raw_moment(j)
            * self.shift ** (k - j)
            for j in range(k + 1)
        )

    @property
    def is_symmetric(self) -> bool:
        return self.base.is_symmetric

    @property
    def is_gaussian(self) -> bool:
        return self.base.is_gaussian

    @property
    def has_all_moments(self) -> bool:
        return self.base.has_all_moments

    @property
    def cf_zero_interval_free(self) -> bool:
        return self.base.cf_zero_interval_free

    @property
    def samplable(self) -> bool:
        return self.base.samplable

    def sample(self, n, rng):
        return self.scale * self.base.sample(n, rng) + self.shift

    def describe(self):
        return {
            "family": "affine",
            "scale": self.scale,
            "shift": self.shift,
            "base": self.base.describe(),
        }


def affine(dist: Distribution, scale: float, shift: float) -> Distribution:
    """Affine image ``scale * X + shift``, canonicalized into a named family."""
    if scale == 0:
        return PointMass(shift)
    if isinstance(dist, Gaussian):
        return Gaussian(scale * dist.mu + shift, scale**2 * dist.var)
    if isinstance(dist, PointMass):
        return PointMass(scale * dist.value + shift)
    if isinstance(dist, Laplace):
        return Laplace(scale * dist.location + shift, abs(scale) * dist.scale)
    if isinstance(dist, StudentT):
        return StudentT(dist.dof, scale * dist.location + shift, abs(scale) * dist.scale)
    if isinstance(dist, Uniform):
        lo, hi = scale * dist.low + shift, scale * dist.high + shift
        return Uniform(min(lo, hi), max(lo, hi))
    if isinstance(dist, Exponential) and shift == 0 and scale > 0:
        return Exponential(dist.rate / scale)
    if isinstance(dist, Gamma) and shift == 0 and scale > 0:
        return Gamma(dist.shape, dist.rate / scale)
    if isinstance(dist, Affine):
        return affine(dist.base, scale * dist.scale, scale * dist.shift + shift)
    return Affine(dist, scale, shift)


def standardize_dist(dist: Distribution) -> Distribution:
    """Zero-mean unit-variance image of ``dist``."""
    var = dist.variance()
    if var <= _STANDARD_TOL:
        raise DegenerateComponent(f"cannot standardize zero-variance {dist.family}")
    sigma = math.sqrt(var)
    return affine(dist, 1.0 / sigma, -dist.mean() / sigma)


def raw_moment(dist: Distribution, k: int) -> float:
    """Exact closed-form raw moment E[X^k], order 0..8."""
    return dist.raw_moment(k)


def sample(dist: Distribution, n: int, seed: int) -> np.ndarray:
    """Deterministic n-sample for the given seed."""
    if n < 1:
        raise ValidationError("sample size must be >= 1")
    return dist.sample(n, np.random.default_rng(seed))


# ---------------------------------------------------------------------------
# Convolution closure
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConvolutionTag:
    """Additive closure class; two components combine iff their tags match.

    ``kind`` is one of ``gamma`` (fixed rate, shapes add), ``gaussian``
    (means and variances add) and ``point_mass`` (values add).
    """

    kind: str
    rate: Optional[float] = None

    def combine(self, dists: Sequence[Distribution]) -> Distribution:
        """Distribution of the sum of independent, same-tag components."""
        if self.kind == "gamma":
            shape = sum(_gamma_shape(d) for d in dists)
            return Gamma(shape, self.rate)
        if self.kind == "gaussian":
            return Gaussian(
                sum(d.mean() for d in dists), sum(d.variance() for d in dists)
            )
        if self.kind == "point_mass":
            return PointMass(sum(d.value for d in dists))
        raise ValidationError(f"unknown convolution tag kind {self.kind!r}")


def _gamma_shape(dist: Distribution) -> float:
    if isinstance(dist, Gamma):
        return dist.shape
    if isinstance(dist, Exponential):
        return 1.0
    raise ValidationError("component is not in the gamma closure class")


def convolution_family_tag(dist: Distribution) -> Optional[ConvolutionTag]:
    """Closure tag of the family, or None when sums leave the family."""
    if isinstance(dist, (Gamma, Exponential)):
        return ConvolutionTag("gamma", rate=dist.rate)
    if isinstance(dist, Gaussian):
        return ConvolutionTag("gaussian")
    if isinstance(dist, PointMass):
        return ConvolutionTag("point_mass")
    return None


# ---------------------------------------------------------------------------
# Noise and problem specs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NoiseSpec:
    """Additive noise plus the stored CF zero-interval fact."""

    dist: Distribution
    cf_zero_interval_free: bool

    @classmethod
    def from_dist(cls, dist: Distribution) -> "NoiseSpec":
        return cls(dist, dist.cf_zero_interval_free)


def noise_admissible(noise: Optional[NoiseSpec]) -> bool:
    """True when the noise CF has no open interval of zeros (or no noise)."""
    return True if noise is None else noise.cf_zero_interval_free


@dataclass(frozen=True)
class Spherical:
    kind = "spherical"


@dataclass(frozen=True)
class Elliptical:
    mu: tuple[float, ...]
    sigma: tuple[tuple[float, ...], ...]
    kind = "elliptical"

    def mu_array(self) -> np.ndarray:
        return np.asarray(self.mu, dtype=float)

    def sigma_array(self) -> np.ndarray:
        return np.asarray(self.sigma, dtype=float)


def check_positive_definite(sigma: np.ndarray) -> None:
    sigma = np.asarray(sigma, dtype=float)
    if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1]:
        raise SigmaNotPD("sigma must be a square matrix")
    if not np.allclose(sigma, sigma.T, rtol=1e-10, atol=1e-12):
        raise SigmaNotPD("sigma must be symmetric")
    try:
        np.linalg.cholesky(sigma)
    except np.linalg.LinAlgError as exc:
        raise SigmaNotPD("sigma is not positive definite") from exc


@dataclass(frozen=True)
class ProblemSpec:
    """One unlinked-regression instance: Y =d beta0'X (+ noise).

    Exactly one of {independent components, joint_structure} governs the
    analysis.  ``beta0 = 0`` is rejected: the model is trivial and the
    two-component criteria assume a nonzero coefficient pair.
    """

    components: tuple[Distribution, ...]
    beta0: tuple[float, ...]
    independent: bool = True
    noise: Optional[NoiseSpec] = None
    joint_structure: Optional[Spherical | Elliptical] = None

    def __post_init__(self):
        if len(self.components) < 1:
            raise ValidationError("at least one component is required")
        if len(self.beta0) != len(self.components):
            raise ValidationError(
                f"beta0 has length {len(self.beta0)} but there are "
                f"{len(self.components)} components"
            )
        if any(not math.isfinite(b) for b in self.beta0):
            raise ValidationError("beta0 entries must be finite")
        if all(b == 0 for b in self.beta0):
            raise ValidationError("beta0 must be nonzero")
        if self.independent and self.joint_structure is not None:
            raise ValidationError(
                "exactly one of independent components or joint_structure may govern"
            )
        if not self.independent and self.joint_structure is None:
            raise ValidationError(
                "dependent components require an explicit joint_structure"
            )
        if isinstance(self.joint_structure, Elliptical):
            mu = self.joint_structure.mu_array()
            sig = self.joint_structure.sigma_array()
            if mu.shape != (self.d,) or sig.shape != (self.d, self.d):
                raise ValidationError("joint_structure dimensions must match beta0")
            check_positive_definite(sig)

    @property
    def d(self) -> int:
        return len(self.beta0)

    def beta0_array(self) -> np.ndarray:
        return np.asarray(self.beta0, dtype=float)

    @property
    def samplable(self) -> bool:
        ok = all(c.samplable for c in self.components)
        if self.noise is not None:
            ok = ok and self.noise.dist.samplable
        if self.joint_structure is not None:
            # Only a Gaussian spherical base yields independent components,
            # so joint sampling is supported exactly in that case.
            ok = ok and all(
                isinstance(c, Gaussian) and c.mu == 0 and c.var == 1
                for c in self.components
            )
        return ok

    def describe(self) -> dict:
        doc: dict = {
            "components": [c.describe() for c in self.components],
            "beta0": list(self.beta0),
            "independent": self.independent,
        }
        if self.noise is not None:
            doc["noise"] = self.noise.dist.describe()
            doc["noise"]["cf_zero_interval_free"] = self.noise.cf_zero_interval_free
        if self.joint_structure is not None:
            if isinstance(self.joint_structure, Spherical):
                doc["joint_structure"] = {"kind": "spherical"}
            else:
                doc["joint_structure"] = {
                    "kind": "elliptical",
                    "mu": list(self.joint_structure.mu),
                    "sigma": [list(r) for r in self.joint_structure.sigma],
                }
        return doc


@dataclass(frozen=True)
class ScalingRecord:
    """Centering/rescaling bookkeeping for mapping candidates back.

    A candidate ``g`` for the standardized problem corresponds to
    ``g / sigmas`` in original coordinates.  When any component mean is
    nonzero the standardized solution set is only a superset of the
    original one (``superset`` is then True): sign solutions picked up
    after centering may fail the original mean equation.
    """

    means: tuple[float, ...]
    sigmas: tuple[float, ...]
    superset: bool

    def to_standardized(self, beta: Sequence[float]) -> np.ndarray:
        return np.asarray(beta, dtype=float) * np.asarray(self.sigmas)

    def to_original(self, beta_std: Sequence[float]) -> np.ndarray:
        return np.asarray(beta_std, dtype=float) / np.asarray(self.sigmas)


def standardize(problem: ProblemSpec) -> tuple[ProblemSpec, ScalingRecord]:
    """Zero-mean unit-variance version of an independent-component problem."""
    if not problem.independent:
        raise ValidationError("standardize applies to independent-component problems")
    means, sigmas, comps = [], [], []
    for comp in problem.components:
        var = comp.variance()
        if var <= _STANDARD_TOL:
            raise DegenerateComponent(
                f"component {comp.family} has zero variance"
            )
        means.append(comp.mean())
        sigmas.append(math.sqrt(var))
        comps.append(standardize_dist(comp))
    record = ScalingRecord(
        means=tuple(means),
        sigmas=tuple(sigmas),
        superset=any(abs(m) > _STANDARD_TOL for m in means),
    )
    beta_std = tuple(float(b * s) for b, s in zip(problem.beta0, sigmas))
    standardized = ProblemSpec(
        components=tuple(comps),
        beta0=beta_std,
        independent=True,
        noise=problem.noise,
    )
    return standardized, record
