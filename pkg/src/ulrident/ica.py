"""Multi-response identifiability: the overcomplete-ICA mixing matrix.

With m >= 2 responses, Y = B0 X for independent, unit-variance,
non-Gaussian sources is identifiable up to a signed column permutation
provided no two columns of B0 are linearly dependent (Kagan-Linnik-Rao).
This module checks the hypothesis, reports the verdict, and constructs the
column-collapse matrix used to argue that proportional columns break the
hypothesis.  Note the collapse construction preserves the output
distribution only for laws where a1*X1 + a2*X2 and (a1+a2)*X1 agree in
distribution (degenerate or 1-stable sources); tests exercise both sides.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .distributions import Distribution
from .errors import PreconditionUnmet, ValidationError

PROPORTIONALITY_RTOL = 1e-10


@dataclass(frozen=True)
class MixingProblem:
    """Mixing matrix (m x d, rows = responses) over independent components."""

    mixing: tuple[tuple[float, ...], ...]
    components: tuple[Distribution, ...]

    def __post_init__(self):
        b = self.matrix()
        if b.ndim != 2 or b.shape[0] < 2:
            raise ValidationError("mixing matrix needs at least two rows")
        if b.shape[1] != len(self.components):
            raise ValidationError(
                f"matrix has {b.shape[1]} columns but {len(self.components)} components"
            )
        for i, comp in enumerate(self.components):
            if abs(comp.variance() - 1.0) > 1e-9:
                raise ValidationError(
                    f"component {i} must have unit variance, got {comp.variance():.6g}"
                )

    def matrix(self) -> np.ndarray:
        return np.asarray(self.mixing, dtype=float)

    @property
    def m(self) -> int:
        return len(self.mixing)

    @property
    def d(self) -> int:
        return len(self.components)

    @property
    def samplable(self) -> bool:
        return all(c.samplable for c in self.components)

    def describe(self) -> dict:
        return {
            "mixing_matrix": [list(r) for r in self.mixing],
            "components": [c.describe() for c in self.components],
        }


def pairwise_dependent_columns(
    b: Sequence[Sequence[float]], rtol: float = PROPORTIONALITY_RTOL
) -> list[tuple[int, int, float]]:
    """All column pairs (j < k, 0-based) with col_k = lam * col_j.

    A zero column is dependent on every other column and is reported with
    lam = 0.  An empty list means the pairwise-independence hypothesis of
    the mixing-identifiability theorem holds.
    """
    b = np.asarray(b, dtype=float)
    if b.ndim != 2 or b.shape[0] < 2:
        raise ValidationError("matrix needs at least two rows")
    out: list[tuple[int, int, float]] = []
    ncols = b.shape[1]
    for j in range(ncols):
        for k in range(j + 1, ncols):
            lam = _proportionality(b[:, j], b[:, k], rtol)
            if lam is not None:
                out.append((j, k, lam))
    return out


def _proportionality(
    col_j: np.ndarray, col_k: np.ndarray, rtol: float
) -> Optional[float]:
    """lam with col_k = lam * col_j, pivoting on the largest entry; None if
    the columns are linearly independent."""
    norm_j = float(np.max(np.abs(col_j)))
    norm_k = float(np.max(np.abs(col_k)))
    if norm_j == 0.0 or norm_k == 0.0:
        return 0.0
    pivot = int(np.argmax(np.abs(col_j)))
    lam = col_k[pivot] / col_j[pivot]
    scale = max(norm_k, abs(lam) * norm_j)
    if np.all(np.abs(col_k - lam * col_j) <= rtol * max(scale, 1.0)):
        return float(lam)
    return None


class ICAStatus:
    WEAK_UP_TO_SIGNED_PERMUTATION = "weak_up_to_signed_permutation"
    GAUSSIAN_COMPONENT_PRESENT = "gaussian_component_present"
    HYPOTHESIS_FAILED = "hypothesis_failed"


@dataclass(frozen=True)
class ICAVerdict:
    status: str
    dependent_pairs: tuple[tuple[int, int, float], ...]
    reasons: tuple[str, ...]

    def describe(self) -> dict:
        return {
            "status": self.status,
            "dependent_pairs": [list(p) for p in self.dependent_pairs],
            "reasons": list(self.reasons),
        }


def ica_verdict(problem: MixingProblem) -> ICAVerdict:
    """Weak identifiability (up to signed column permutations) verdict.

    Requires pairwise linearly independent columns and non-Gaussian,
    unit-variance components; a Gaussian source gets its own status since
    the hypothesis excludes it outright.
    """
    pairs = tuple(pairwise_dependent_columns(problem.matrix()))
    gaussians = [i for i, c in enumerate(problem.components) if c.is_gaussian]
    if gaussians:
        return ICAVerdict(
            status=ICAStatus.GAUSSIAN_COMPONENT_PRESENT,
            dependent_pairs=pairs,
            reasons=tuple(f"component {i} is Gaussian" for i in gaussians),
        )
    if pairs:
        return ICAVerdict(
            status=ICAStatus.HYPOTHESIS_FAILED,
            dependent_pairs=pairs,
            reasons=tuple(
                f"columns {j} and {k} are linearly dependent (lam={lam:.6g})"
                for j, k, lam in pairs
            ),
        )
    return ICAVerdict(
        status=ICAStatus.WEAK_UP_TO_SIGNED_PERMUTATION,
        dependent_pairs=(),
        reasons=(),
    )


def collapse_counterexample(
    b0: Sequence[Sequence[float]], j: int, k: int, lam: float
) -> np.ndarray:
    """Absorb column j (= lam * column k) into column k and zero it.

    Returns a copy of the matrix with column k scaled by (1 + lam) and
    column j set to zero.  Requires the stated proportionality to hold.
    """
    b0 = np.asarray(b0, dtype=float)
    col_j, col_k = b0[:, j], b0[:, k]
    scale = max(1.0, float(np.max(np.abs(col_j))), abs(lam) * float(np.max(np.abs(col_k))))
    if not np.all(np.abs(col_j - lam * col_k) <= PROPORTIONALITY_RTOL * scale):
        raise PreconditionUnmet(
            f"column {j} is not lam * column {k} for lam={lam!r}"
        )
    out = b0.copy()
    out[:, k] = (1.0 + lam) * col_k
    out[:, j] = 0.0
    return out
