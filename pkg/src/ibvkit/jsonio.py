"""JSON interchange for derivations, sequent proofs, and results.

Deep derivations serialize as an object with "system", "premise", and a
"steps" array of {"rule", "path", "direction", "result"}; formulas are
concrete-syntax strings in the system's dialect.  The ambient sign is
written only when negative, so ordinary proofs stay in the shape other
tools expect.  Sequent proofs mirror the SequentProof tree: rule name,
partition as index lists, the pointwise count n, and a premise array.
Loaders accept either shape and tell them apart by their fields.
"""

from __future__ import annotations

import json
from pathlib import Path

from .derivations import DeepDerivation, RuleInstance
from .formulas import NEGATIVE, POSITIVE, parse_formula, render_formula
from .sequents import (
    RuleApp,
    SequentProof,
    get_sequent_system,
    parse_sequent,
    render_sequent,
)
from .systems import get_system


def derivation_to_json(d: DeepDerivation) -> dict:
    obj = {
        "system": d.system,
        "premise": render_formula(d.premise),
        "steps": [
            {
                "rule": inst.rule,
                "path": list(inst.path),
                "direction": inst.direction,
                "result": render_formula(result),
            }
            for inst, result in d.steps
        ],
    }
    if d.ambient == NEGATIVE:
        obj["ambient"] = NEGATIVE
    return obj


def derivation_from_json(obj: dict) -> DeepDerivation:
    system = get_system(obj["system"])
    dialect = system.dialect
    steps = tuple(
        (
            RuleInstance(
                s["rule"], tuple(s["path"]), s.get("direction", "down")
            ),
            parse_formula(s["result"], dialect),
        )
        for s in obj["steps"]
    )
    return DeepDerivation(
        system=system.name,
        premise=parse_formula(obj["premise"], dialect),
        steps=steps,
        ambient=obj.get("ambient", POSITIVE),
    )


def _app_to_json(app: RuleApp) -> dict:
    out: dict = {"rule": app.rule}
    if app.partition:
        out["partition"] = [list(p) for p in app.partition]
    if app.principal is not None:
        out["principal"] = app.principal
    if app.n is not None:
        out["n"] = app.n
    if app.seq_indices:
        out["seq_indices"] = list(app.seq_indices)
    if app.cut_formula is not None:
        out["cut_formula"] = render_formula(app.cut_formula)
    if app.loc is not None:
        out["loc"] = list(app.loc)
    if app.path:
        out["path"] = list(app.path)
    if app.rw is not None:
        out["rw"] = app.rw
    return out


def _node_to_json(p: SequentProof) -> dict:
    obj = _app_to_json(p.app)
    obj["conclusion"] = render_sequent(p.conclusion)
    obj["premises"] = [_node_to_json(q) for q in p.premises]
    return obj


def sequent_proof_to_json(p: SequentProof, system_name: str) -> dict:
    root = _node_to_json(p)
    return {"system": system_name, **root}


def _node_from_json(obj: dict, dialect: str) -> SequentProof:
    app = RuleApp(
        rule=obj["rule"],
        partition=tuple(tuple(p) for p in obj.get("partition", ())),
        principal=obj.get("principal"),
        n=obj.get("n"),
        seq_indices=tuple(obj.get("seq_indices", ())),
        cut_formula=(
            parse_formula(obj["cut_formula"], dialect)
            if "cut_formula" in obj
            else None
        ),
        loc=tuple(obj["loc"]) if "loc" in obj else None,
        path=tuple(obj.get("path", ())),
        rw=obj.get("rw"),
    )
    return SequentProof(
        conclusion=parse_sequent(obj["conclusion"], dialect),
        app=app,
        premises=tuple(_node_from_json(q, dialect) for q in obj.get("premises", ())),
    )


def sequent_proof_from_json(obj: dict) -> tuple[SequentProof, str]:
    system = get_sequent_system(obj["system"])
    return _node_from_json(obj, system.dialect), system.name


def is_derivation_json(obj: dict) -> bool:
    return "steps" in obj


def dump(obj: dict, path: str | Path) -> None:
    Path(path).write_text(json.dumps(obj, indent=2) + "\n")


def load(path: str | Path) -> dict:
    return json.loads(Path(path).read_text())


def load_proof(path: str | Path):
    """DeepDerivation or (SequentProof, system name), by file shape."""
    obj = load(path)
    if is_derivation_json(obj):
        return derivation_from_json(obj)
    return sequent_proof_from_json(obj)
