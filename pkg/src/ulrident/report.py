"""Report document assembly and rendering (text and JSON)."""

from __future__ import annotations

import json
from typing import Optional

from .ica import ICAVerdict, MixingProblem
from .distributions import ProblemSpec
from .iid import TauAnalysis
from .verdict import IdentifiabilityVerdict

SCHEMA_VERSION = "1"


def build_report(
    problem: Optional[ProblemSpec],
    verdict: Optional[IdentifiabilityVerdict],
    seed: int,
    seed_generated: bool,
    mixing: Optional[MixingProblem] = None,
    ica: Optional[ICAVerdict] = None,
    oracle_records: Optional[list] = None,
) -> dict:
    doc: dict = {"schema_version": SCHEMA_VERSION, "seed": seed}
    if seed_generated:
        doc["seed_generated"] = True
    if problem is not None:
        doc["problem"] = problem.describe()
    if mixing is not None:
        doc["problem"] = mixing.describe()
    if verdict is not None:
        doc["verdict"] = verdict.describe()
    if ica is not None:
        doc["ica"] = ica.describe()
    if oracle_records:
        doc.setdefault("oracle", []).extend(r.describe() for r in oracle_records)
    return doc


def tau_report(analysis: TauAnalysis, a, b) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "a": [float(v) for v in a],
        "b": [float(v) for v in b],
        "tau": {
            "roots": [
                {
                    "x": r.x,
                    "multiplicity": r.multiplicity.value,
                    "residual": r.residual,
                }
                for r in analysis.roots
            ],
            "xi0": analysis.xi0,
            "p": analysis.p,
            "q": analysis.q,
            "a_max": analysis.a_max,
            "cond_a": analysis.cond_a,
            "cond_b": analysis.cond_b,
            "degenerate": analysis.degenerate,
            "x_max": analysis.x_max,
            "warnings": list(analysis.warnings),
        },
    }


def to_json(doc: dict) -> str:
    """Deterministic JSON: sorted keys, shortest round-trip float repr."""
    return json.dumps(doc, sort_keys=True, indent=2, allow_nan=True) + "\n"


def render_text(doc: dict) -> str:
    lines: list[str] = []
    if "problem" in doc and "beta0" in doc.get("problem", {}):
        lines.append(f"beta0: {doc['problem']['beta0']}")
    if "verdict" in doc:
        v = doc["verdict"]
        head = f"verdict: {v['class'].upper()}"
        if "bound" in v:
            head += f" (cardinality bound {v['bound']})"
        lines.append(head)
        if v.get("solution_set"):
            ss = v["solution_set"]
            desc = f"solution set: {ss['kind']} [{ss['qualifier']}]"
            if "radius" in ss:
                desc += f" radius={ss['radius']:.12g}"
            if "elements" in ss:
                desc += f" elements={ss['elements']}"
            lines.append(desc)
        for reason in v.get("reasons", []):
            lines.append(f"reason: {reason}")
        for rule in v.get("rules", []):
            lines.append(f"rule {rule['rule_id']}: {rule['anchor']}")
            lines.append(f"  {rule['summary']}")
        for rec in v.get("oracle", []):
            lines.append(
                f"oracle: candidate={rec.get('candidate')} decision={rec['decision']} "
                f"p={rec['p_value']:.6g}"
            )
        for warn in v.get("warnings", []):
            lines.append(f"warning: {warn}")
    if "ica" in doc:
        ica = doc["ica"]
        lines.append(f"ica verdict: {ica['status']}")
        for pair in ica.get("dependent_pairs", []):
            lines.append(f"  dependent columns: {pair}")
        for reason in ica.get("reasons", []):
            lines.append(f"  reason: {reason}")
    if "tau" in doc:
        tau = doc["tau"]
        if tau["degenerate"]:
            lines.append("tau is identically zero (degenerate pair)")
        else:
            for root in tau["roots"]:
                lines.append(
                    f"root x={root['x']:.6f} ({root['multiplicity']}), "
                    f"residual {root['residual']:.3g}"
                )
            xi0 = tau["xi0"]
            lines.append(
                "xi0="
                + (f"{xi0:.6f}" if xi0 is not None else "none")
                + f" p={tau['p']} q={tau['q']}"
                + f"; (A) {'ok' if tau['cond_a'] else 'fails'}"
                + f"; (B) {'ok' if tau['cond_b'] else 'fails'}"
            )
        for warn in tau.get("warnings", []):
            lines.append(f"warning: {warn}")
    for rec in doc.get("oracle", []):
        if "verdict" not in doc:
            lines.append(
                f"oracle: decision={rec['decision']} p={rec['p_value']:.6g} "
                f"statistic={rec['statistic']:.6g} n={rec['n_per_side']}"
            )
    if "seed" in doc:
        lines.append(f"seed: {doc['seed']}")
    return "\n".join(lines) + "\n"
