"""Seeded equality-in-distribution testing for candidate verification.

Two-sample permutation tests back every empirical membership check: the
projections under beta0 and under a candidate are simulated on independent
draws and compared with the energy distance (default) or a Gaussian-weighted
empirical-CF distance.  Permutation calibration keeps the null exact at
desk-scale sample sizes; every random stream is derived from the config
seed and a fixed role tag, so identical inputs give bit-identical p-values
independent of execution order.

Univariate energy statistics are computed exactly in O(n log n) from the
pooled sort.  Multivariate (and ECF) statistics need the pairwise Gram
matrix; when the pooled size squared exceeds the configured cap the test
runs on a seeded subsample and records that fact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.spatial.distance import cdist

from .distributions import Elliptical, ProblemSpec, Spherical
from .errors import NotSamplable, ValidationError
from .ica import MixingProblem

_PERM_CHUNK = 64
_GRAM_BLOCK = 2048


@dataclass(frozen=True)
class OracleConfig:
    n: int = 100_000
    permutations: int = 200
    significance: float = 0.01
    seed: int = 0
    statistic: str = "energy"  # "energy" | "ecf"
    ecf_scale: float = 1.0
    max_pairwise_elements: int = 400_000_000

    def __post_init__(self):
        if self.n < 100:
            raise ValidationError("oracle needs n >= 100 per side")
        if self.permutations < 50:
            raise ValidationError("oracle needs at least 50 permutations")
        if not 0.0 < self.significance < 1.0:
            raise ValidationError("significance must lie in (0, 1)")
        if self.statistic not in ("energy", "ecf"):
            raise ValidationError(f"unknown statistic {self.statistic!r}")


@dataclass(frozen=True)
class OracleRecord:
    decision: str  # "accept" | "reject"
    p_value: float
    statistic: float
    n_per_side: int
    permutations: int
    subsampled: bool
    candidate: Optional[tuple[float, ...]] = None

    @property
    def accepted(self) -> bool:
        return self.decision == "accept"

    def describe(self) -> dict:
        doc = {
            "decision": self.decision,
            "p_value": self.p_value,
            "statistic": self.statistic,
            "n_per_side": self.n_per_side,
            "permutations": self.permutations,
            "subsampled": self.subsampled,
        }
        if self.candidate is not None:
            doc["candidate"] = list(self.candidate)
        return doc


def _rng(seed: int, *tag: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=tag))


# ---------------------------------------------------------------------------
# Statistics
# ---------------------------------------------------------------------------


def _sorted_group_pair_sum(v: np.ndarray, masks: np.ndarray, size: int) -> np.ndarray:
    """Sum of |w_i - w_j| over unordered member pairs, per mask row.

    ``v`` must be sorted ascending; for the sorted member subsequence the
    pair sum is sum_k w_k * (2k - size + 1) with k the within-group rank.
    """
    ranks = np.cumsum(masks, axis=1, dtype=np.int32) - 1
    weights = 2 * ranks - (size - 1)
    return np.einsum("ij,ij->i", np.where(masks, weights, 0).astype(float), np.broadcast_to(v, masks.shape))


def _energy_stats_sorted(v: np.ndarray, masks: np.ndarray, nx: int) -> np.ndarray:
    """Energy statistics for each row mask (True marks the first sample)."""
    n_total = v.size
    ny = n_total - nx
    s_xx = _sorted_group_pair_sum(v, masks, nx)
    s_yy = _sorted_group_pair_sum(v, ~masks, ny)
    ranks = np.arange(n_total)
    s_tot = float(np.sum(v * (2 * ranks - (n_total - 1))))
    s_xy = s_tot - s_xx - s_yy
    mean_xx = s_xx / (nx * (nx - 1) / 2.0)
    mean_yy = s_yy / (ny * (ny - 1) / 2.0)
    mean_xy = s_xy / (nx * ny)
    return 2.0 * mean_xy - mean_xx - mean_yy


def _permutation_pvalue_1d(
    x: np.ndarray, y: np.ndarray, n_perm: int, seed: int
) -> tuple[float, float]:
    pooled = np.concatenate([x, y])
    nx, n_total = x.size, pooled.size
    order = np.argsort(pooled, kind="stable")
    v = pooled[order]
    observed_mask = np.zeros(n_total, dtype=bool)
    observed_mask[:nx] = True
    observed_mask = observed_mask[order]
    observed = float(_energy_stats_sorted(v, observed_mask[None, :], nx)[0])

    exceed = 0
    for start in range(0, n_perm, _PERM_CHUNK):
        stop = min(start + _PERM_CHUNK, n_perm)
        masks = np.zeros((stop - start, n_total), dtype=bool)
        for row, b in enumerate(range(start, stop)):
            idx = _rng(seed, 2, b).permutation(n_total)[:nx]
            masks[row, idx] = True
        stats = _energy_stats_sorted(v, masks, nx)
        exceed += int(np.sum(stats >= observed))
    p_value = (1.0 + exceed) / (n_perm + 1.0)
    return observed, p_value


def _permutation_pvalue_gram(
    p0: np.ndarray,
    p1: np.ndarray,
    config: OracleConfig,
) -> tuple[float, float, bool, int]:
    """Permutation p-value from the pooled Gram matrix, blockwise.

    Group sums for every permutation come from one matrix product
    M = K Z with Z the 0/1 membership columns, so the Gram blocks are
    computed once and never stored whole.
    """
    subsampled = False
    cap_side = int(math.isqrt(config.max_pairwise_elements)) // 2
    if p0.shape[0] > cap_side:
        keep0 = _rng(config.seed, 3, 0).choice(p0.shape[0], cap_side, replace=False)
        keep1 = _rng(config.seed, 3, 1).choice(p1.shape[0], cap_side, replace=False)
        p0, p1 = p0[keep0], p1[keep1]
        subsampled = True
    pooled = np.vstack([p0, p1])
    nx, n_total = p0.shape[0], pooled.shape[0]
    ny = n_total - nx
    n_perm = config.permutations

    z = np.zeros((n_total, n_perm + 1))
    z[:nx, 0] = 1.0
    for b in range(n_perm):
        idx = _rng(config.seed, 2, b).permutation(n_total)[:nx]
        z[idx, b + 1] = 1.0

    gaussian_kernel = config.statistic == "ecf"
    m = np.zeros((n_total, n_perm + 1))
    rowsum = np.zeros(n_total)
    for start in range(0, n_total, _GRAM_BLOCK):
        block = cdist(pooled[start : start + _GRAM_BLOCK], pooled)
        if gaussian_kernel:
            block = np.exp(-0.5 * (config.ecf_scale * block) ** 2)
        m[start : start + _GRAM_BLOCK] = block @ z
        rowsum[start : start + _GRAM_BLOCK] = block.sum(axis=1)

    total = float(rowsum.sum())
    s_zz = np.einsum("ij,ij->j", z, m)  # z'Kz per column
    s_z1 = z.T @ rowsum  # z'K1 per column
    diag = 1.0 if gaussian_kernel else 0.0
    mean_xx = (s_zz - nx * diag) / (nx * (nx - 1))
    s_cc = total - 2.0 * s_z1 + s_zz  # (1-z)'K(1-z)
    mean_yy = (s_cc - ny * diag) / (ny * (ny - 1))
    mean_xy = (s_z1 - s_zz) / (nx * ny)
    if gaussian_kernel:
        stats = mean_xx + mean_yy - 2.0 * mean_xy  # CF-distance (MMD form)
    else:
        stats = 2.0 * mean_xy - mean_xx - mean_yy  # energy distance
    observed = float(stats[0])
    exceed = int(np.sum(stats[1:] >= observed))
    p_value = (1.0 + exceed) / (n_perm + 1.0)
    return observed, p_value, subsampled, nx


# ---------------------------------------------------------------------------
# Simulation of the two sides
# ---------------------------------------------------------------------------


def _sample_covariates(
    problem: ProblemSpec, n: int, rng: np.random.Generator
) -> np.ndarray:
    cols = [c.sample(n, rng) for c in problem.components]
    z = np.column_stack(cols)
    if problem.joint_structure is None:
        return z
    if isinstance(problem.joint_structure, Spherical):
        return z
    struct: Elliptical = problem.joint_structure
    chol = np.linalg.cholesky(struct.sigma_array())
    return struct.mu_array()[None, :] + z @ chol.T


def _sample_projection(
    problem: ProblemSpec, coeffs: np.ndarray, n: int, rng: np.random.Generator
) -> np.ndarray:
    y = _sample_covariates(problem, n, rng) @ coeffs
    if problem.noise is not None:
        y = y + problem.noise.dist.sample(n, rng)
    return y


def verify_candidate(
    problem: ProblemSpec, candidate: Sequence[float], config: OracleConfig
) -> OracleRecord:
    """Test whether candidate'X matches beta0'X in distribution.

    Simulates both projections (noise included on both sides when present)
    on independent seeded draws and runs the configured two-sample
    permutation test; rejects when the p-value falls below the configured
    significance.
    """
    candidate = np.asarray(candidate, dtype=float)
    if candidate.shape != (problem.d,):
        raise ValidationError(f"candidate must have length {problem.d}")
    if not np.all(np.isfinite(candidate)):
        raise ValidationError("candidate entries must be finite")
    if not problem.samplable:
        raise NotSamplable(
            "problem is not samplable (moment-only component without sampler, "
            "or non-Gaussian joint structure)"
        )
    y0 = _sample_projection(problem, problem.beta0_array(), config.n, _rng(config.seed, 0))
    y1 = _sample_projection(problem, candidate, config.n, _rng(config.seed, 1))
    if config.statistic == "energy":
        statistic, p_value = _permutation_pvalue_1d(
            y0, y1, config.permutations, config.seed
        )
        subsampled, n_eff = False, config.n
    else:
        statistic, p_value, subsampled, n_eff = _permutation_pvalue_gram(
            y0[:, None], y1[:, None], config
        )
    return OracleRecord(
        decision="reject" if p_value < config.significance else "accept",
        p_value=p_value,
        statistic=statistic,
        n_per_side=n_eff,
        permutations=config.permutations,
        subsampled=subsampled,
        candidate=tuple(float(v) for v in candidate),
    )


def verify_joint(
    problem: MixingProblem,
    candidate: Sequence[Sequence[float]],
    config: OracleConfig,
) -> OracleRecord:
    """Test whether candidate @ X matches B0 @ X in distribution (vectors in R^m)."""
    candidate = np.asarray(candidate, dtype=float)
    b0 = problem.matrix()
    if candidate.shape != b0.shape:
        raise ValidationError(f"candidate matrix must have shape {b0.shape}")
    if not problem.samplable:
        raise NotSamplable("mixing problem has a moment-only component without sampler")

    def draw(matrix: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        x = np.column_stack([c.sample(config.n, rng) for c in problem.components])
        return x @ matrix.T

    y0 = draw(b0, _rng(config.seed, 0))
    y1 = draw(candidate, _rng(config.seed, 1))
    statistic, p_value, subsampled, n_eff = _permutation_pvalue_gram(y0, y1, config)
    return OracleRecord(
        decision="reject" if p_value < config.significance else "accept",
        p_value=p_value,
        statistic=statistic,
        n_per_side=n_eff,
        permutations=config.permutations,
        subsampled=subsampled,
        candidate=tuple(float(v) for v in candidate.ravel()),
    )
