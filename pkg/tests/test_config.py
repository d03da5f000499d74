import json
from pathlib import Path

import pytest

import ulrident as u
from ulrident.config import load_config, parse_config
from ulrident.errors import ValidationError


def test_parse_minimal_problem():
    parsed = parse_config(
        {
            "components": [
                {"family": "gaussian", "mean": 1.0, "variance": 1.0},
                {"family": "exponential", "rate": 1.0},
            ],
            "beta0": [2.0, 3.0],
        }
    )
    prob = parsed.problem
    assert prob.d == 2
    assert isinstance(prob.components[0], u.Gaussian)
    assert prob.independent and prob.noise is None


def test_parse_all_families():
    parsed = parse_config(
        {
            "components": [
                {"family": "gamma", "shape": 2.0, "rate": 1.5},
                {"family": "laplace", "location": 0.0, "scale": 1.0},
                {"family": "uniform", "low": -1.0, "high": 1.0},
                {"family": "student_t", "dof": 5.0, "location": 0.0, "scale": 1.0},
                {"family": "point_mass", "value": 2.0},
                {
                    "family": "empirical",
                    "moments": [0.0, 1.0, 0.0, 3.0],
                    "symmetric": True,
                    "sampler": {"family": "gaussian", "mean": 0.0, "variance": 1.0},
                },
                {"family": "standardized", "base": {"family": "exponential", "rate": 2.0}},
            ],
            "beta0": [1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0],
        }
    )
    comps = parsed.problem.components
    assert isinstance(comps[5], u.Empirical) and comps[5].samplable
    assert comps[6].mean() == pytest.approx(0.0, abs=1e-12)
    assert comps[6].variance() == pytest.approx(1.0, abs=1e-12)


def test_unknown_top_level_key_named():
    with pytest.raises(ValidationError, match="unknown key 'betas'"):
        parse_config(
            {
                "components": [{"family": "exponential", "rate": 1.0}],
                "betas": [1.0],
            }
        )


def test_unknown_component_key_named():
    with pytest.raises(ValidationError, match="unknown key 'lambda'"):
        parse_config(
            {
                "components": [{"family": "exponential", "lambda": 1.0}],
                "beta0": [1.0],
            }
        )


def test_missing_beta0_named():
    with pytest.raises(ValidationError, match="missing required key 'beta0'"):
        parse_config({"components": [{"family": "exponential", "rate": 1.0}]})


def test_joint_structure_parsing():
    parsed = parse_config(
        {
            "components": [
                {"family": "gaussian", "mean": 0.0, "variance": 1.0},
                {"family": "gaussian", "mean": 0.0, "variance": 1.0},
            ],
            "beta0": [3.0, 4.0],
            "independent": False,
            "joint_structure": {"kind": "spherical"},
        }
    )
    assert isinstance(parsed.problem.joint_structure, u.Spherical)
    parsed2 = parse_config(
        {
            "components": [
                {"family": "gaussian", "mean": 0.0, "variance": 1.0},
                {"family": "gaussian", "mean": 0.0, "variance": 1.0},
            ],
            "beta0": [3.0, 4.0],
            "independent": False,
            "joint_structure": {
                "kind": "elliptical",
                "mu": [1.0, 0.0],
                "sigma": [[2.0, 0.0], [0.0, 1.0]],
            },
        }
    )
    assert isinstance(parsed2.problem.joint_structure, u.Elliptical)


def test_mixing_matrix_configuration():
    parsed = parse_config(
        {
            "components": [
                {"family": "standardized", "base": {"family": "exponential", "rate": 1.0}}
            ]
            * 4,
            "mixing_matrix": [
                [1.0, 1.0, 0.0, 0.0],
                [0.0, 1.0, 1.0, 0.0],
                [0.0, 0.0, 1.0, 1.0],
            ],
        }
    )
    assert parsed.problem is None
    assert parsed.mixing is not None
    assert parsed.mixing.m == 3 and parsed.mixing.d == 4


def test_mixing_matrix_conflicting_keys():
    with pytest.raises(ValidationError, match="'beta0'"):
        parse_config(
            {
                "components": [
                    {"family": "standardized", "base": {"family": "exponential", "rate": 1.0}}
                ]
                * 2,
                "beta0": [1.0, 1.0],
                "mixing_matrix": [[1.0, 0.0], [0.0, 1.0]],
            }
        )


def test_noise_parsing_and_flags():
    parsed = parse_config(
        {
            "components": [{"family": "exponential", "rate": 1.0}],
            "beta0": [1.0],
            "noise": {"family": "laplace", "location": 0.0, "scale": 1.0},
        }
    )
    assert parsed.problem.noise.cf_zero_interval_free
    parsed2 = parse_config(
        {
            "components": [{"family": "exponential", "rate": 1.0}],
            "beta0": [1.0],
            "noise": {
                "family": "empirical",
                "moments": [0.0, 1.0],
                "cf_zero_interval_free": False,
            },
        }
    )
    assert not parsed2.problem.noise.cf_zero_interval_free


def test_load_config_round_trip(tmp_path: Path):
    doc = {
        "components": [{"family": "exponential", "rate": 1.0}],
        "beta0": [1.0],
    }
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    parsed = load_config(path)
    assert parsed.problem.describe()["beta0"] == [1.0]


def test_load_config_bad_json(tmp_path: Path):
    path = tmp_path / "broken.json"
    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(ValidationError, match="not valid JSON"):
        load_config(path)


def test_shipped_configs_validate_against_schema():
    jsonschema = pytest.importorskip("jsonschema")
    schema = json.loads(Path("docs/config.schema.json").read_text())
    for cfg_path in sorted(Path("configs").glob("*.json")):
        doc = json.loads(cfg_path.read_text())
        jsonschema.validate(doc, schema)
        parse_config(doc)
