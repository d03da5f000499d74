"""Strict JSON configuration parsing.

The documented schema lives in ``docs/config.schema.json``; parsing here is
strict: unknown keys anywhere in the document are an error, as are missing
required keys, and every error message names the offending key.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .distributions import (
    Distribution,
    Elliptical,
    Empirical,
    Exponential,
    Gamma,
    Gaussian,
    Laplace,
    NoiseSpec,
    PointMass,
    ProblemSpec,
    Spherical,
    StudentT,
    Uniform,
    standardize_dist,
)
from .errors import ValidationError
from .ica import MixingProblem

_FAMILY_KEYS = {
    "gaussian": {"mean", "variance"},
    "exponential": {"rate"},
    "gamma": {"shape", "rate"},
    "laplace": {"location", "scale"},
    "uniform": {"low", "high"},
    "student_t": {"dof", "location", "scale"},
    "point_mass": {"value"},
    "empirical": {"moments", "symmetric", "cf_zero_interval_free", "sampler"},
    "standardized": {"base"},
}

_TOP_KEYS = {
    "beta0",
    "components",
    "independent",
    "noise",
    "joint_structure",
    "mixing_matrix",
}


def _require(doc: dict, key: str, where: str):
    if key not in doc:
        raise ValidationError(f"missing required key '{key}' in {where}")
    return doc[key]


def _check_keys(doc: dict, allowed: set[str], where: str) -> None:
    unknown = set(doc) - allowed
    if unknown:
        raise ValidationError(
            f"unknown key '{sorted(unknown)[0]}' in {where}"
        )


def parse_component(doc: dict, where: str = "component") -> Distribution:
    if not isinstance(doc, dict):
        raise ValidationError(f"{where} must be an object")
    family = _require(doc, "family", where)
    if family not in _FAMILY_KEYS:
        raise ValidationError(f"unknown family '{family}' in {where}")
    _check_keys(doc, _FAMILY_KEYS[family] | {"family"}, where)
    if family == "gaussian":
        return Gaussian(_require(doc, "mean", where), _require(doc, "variance", where))
    if family == "exponential":
        return Exponential(_require(doc, "rate", where))
    if family == "gamma":
        return Gamma(_require(doc, "shape", where), _require(doc, "rate", where))
    if family == "laplace":
        return Laplace(_require(doc, "location", where), _require(doc, "scale", where))
    if family == "uniform":
        return Uniform(_require(doc, "low", where), _require(doc, "high", where))
    if family == "student_t":
        return StudentT(
            _require(doc, "dof", where),
            doc.get("location", 0.0),
            doc.get("scale", 1.0),
        )
    if family == "point_mass":
        return PointMass(_require(doc, "value", where))
    if family == "standardized":
        base = parse_component(_require(doc, "base", where), f"{where}.base")
        return standardize_dist(base)
    moments = _require(doc, "moments", where)
    sampler_doc = doc.get("sampler")
    sampler = (
        parse_component(sampler_doc, f"{where}.sampler") if sampler_doc else None
    )
    return Empirical(
        moments=tuple(float(m) for m in moments),
        symmetric=bool(doc.get("symmetric", False)),
        cf_flag=bool(doc.get("cf_zero_interval_free", True)),
        sampler=sampler,
    )


def _parse_joint_structure(doc: dict):
    _check_keys(doc, {"kind", "mu", "sigma"}, "joint_structure")
    kind = _require(doc, "kind", "joint_structure")
    if kind == "spherical":
        return Spherical()
    if kind == "elliptical":
        mu = _require(doc, "mu", "joint_structure")
        sigma = _require(doc, "sigma", "joint_structure")
        return Elliptical(
            mu=tuple(float(v) for v in mu),
            sigma=tuple(tuple(float(v) for v in row) for row in sigma),
        )
    raise ValidationError(f"unknown joint_structure kind '{kind}'")


@dataclass(frozen=True)
class ParsedConfig:
    """Either a single-response problem or a mixing (multi-response) one."""

    problem: Optional[ProblemSpec]
    mixing: Optional[MixingProblem]


def parse_config(doc: dict) -> ParsedConfig:
    if not isinstance(doc, dict):
        raise ValidationError("configuration root must be an object")
    _check_keys(doc, _TOP_KEYS, "configuration")
    components_doc = _require(doc, "components", "configuration")
    if not isinstance(components_doc, list) or not components_doc:
        raise ValidationError("'components' must be a non-empty list")
    components = tuple(
        parse_component(c, f"component {i}") for i, c in enumerate(components_doc)
    )

    if "mixing_matrix" in doc:
        for key in ("beta0", "noise", "joint_structure"):
            if key in doc:
                raise ValidationError(
                    f"key '{key}' does not apply to a mixing_matrix configuration"
                )
        matrix = tuple(
            tuple(float(v) for v in row) for row in doc["mixing_matrix"]
        )
        return ParsedConfig(
            problem=None,
            mixing=MixingProblem(mixing=matrix, components=components),
        )

    beta0 = _require(doc, "beta0", "configuration")
    noise = None
    if "noise" in doc and doc["noise"] is not None:
        # The CF zero-interval flag is a family-level fact; only the
        # empirical family carries it explicitly.
        noise = NoiseSpec.from_dist(parse_component(doc["noise"], "noise"))
    joint = None
    if "joint_structure" in doc and doc["joint_structure"] is not None:
        joint = _parse_joint_structure(doc["joint_structure"])
    independent = bool(doc.get("independent", joint is None))
    problem = ProblemSpec(
        components=components,
        beta0=tuple(float(v) for v in beta0),
        independent=independent,
        noise=noise,
        joint_structure=joint,
    )
    return ParsedConfig(problem=problem, mixing=None)


def load_config(path: str | Path) -> ParsedConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot read configuration: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"configuration is not valid JSON: {exc}") from exc
    return parse_config(doc)
