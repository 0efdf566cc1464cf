"""JSON representations of proofs, states, witnesses and certificates.

Every artifact is wrapped in an envelope with a ``format_version`` and a
``kind`` field, plus an optional embedded witness-constant registry so files
are self-contained.  Formulas and terms appear as concrete-syntax text.  Key
order is fixed at construction, so serialization is byte-deterministic.

The registry also has a plain-text sidecar form: one line per entry,
``index<TAB>layer<TAB>formula``.
"""

from __future__ import annotations

import json

from .kernel import Proof
from .states import BasicState, Edge, FineCert, IntenticState
from .syntax import (
    Formula, ParseError, Signature, WitnessRegistry, formula_text, free_vars,
    parse, parse_term, term_text,
)
from .truthmaking import ChildStep, MTWitness

FORMAT_VERSION = 1


class FormatError(Exception):
    pass


def _require(d, key, kind):
    if not isinstance(d, dict) or key not in d:
        raise FormatError(f"{kind}: missing field {key!r}")
    return d[key]


# -------------------------------------------------------------------- proofs

def proof_to_data(p: Proof) -> dict:
    d: dict = {"rule": p.rule, "conclusion": formula_text(p.conclusion)}
    if p.rule == "assume":
        d["label"] = p.label or "h"
        return d
    if p.rule == "lem":
        d["instance"] = formula_text(p.conclusion.left)
        return d
    d["premises"] = [proof_to_data(q) for q in p.premises]
    if p.discharge is not None:
        d["discharge"] = p.discharge
    if p.var is not None:
        d["var"] = p.var
    if p.witness is not None:
        d["witness"] = term_text(p.witness)
    return d


def proof_from_data(d, sig: Signature, registry: WitnessRegistry | None = None) -> Proof:
    rule = _require(d, "rule", "proof node")
    conclusion = parse(_require(d, "conclusion", "proof node"), sig, registry)
    if rule == "assume":
        return Proof("assume", conclusion, label=d.get("label", "h"))
    if rule == "lem":
        return Proof("lem", conclusion)
    premises = tuple(proof_from_data(q, sig, registry)
                     for q in d.get("premises", ()))
    witness = d.get("witness")
    return Proof(rule, conclusion, premises,
                 discharge=d.get("discharge"), var=d.get("var"),
                 witness=parse_term(witness, sig, registry) if witness else None)


# -------------------------------------------------------------------- states

def state_to_data(u: IntenticState) -> dict:
    return {
        "base": [formula_text(g) for g in u.base.generators],
        "children": [
            {"hypothesis": formula_text(e.hypothesis),
             "state": state_to_data(e.child),
             "connection": [proof_to_data(p) for p in e.connection]}
            for e in u.children
        ],
    }


def state_from_data(d, sig: Signature, registry: WitnessRegistry | None = None) -> IntenticState:
    base = BasicState.of(parse(t, sig, registry) for t in _require(d, "base", "state"))
    edges = []
    for c in d.get("children", ()):
        edges.append(Edge(
            parse(_require(c, "hypothesis", "edge"), sig, registry),
            state_from_data(_require(c, "state", "edge"), sig, registry),
            tuple(proof_from_data(p, sig, registry)
                  for p in _require(c, "connection", "edge"))))
    return IntenticState(base, tuple(edges))


# ----------------------------------------------------------------- witnesses

def witness_to_data(w: MTWitness) -> dict:
    return {
        "child_steps": [
            {"edge": s.edge,
             "antecedent": formula_text(s.antecedent),
             "connection": [proof_to_data(p) for p in s.connection],
             "consequent": witness_to_data(s.consequent)}
            for s in w.child_steps
        ],
        "closing": proof_to_data(w.closing),
    }


def witness_from_data(d, sig: Signature, registry: WitnessRegistry | None = None) -> MTWitness:
    steps = []
    for s in d.get("child_steps", ()):
        steps.append(ChildStep(
            int(_require(s, "edge", "child step")),
            parse(_require(s, "antecedent", "child step"), sig, registry),
            tuple(proof_from_data(p, sig, registry)
                  for p in _require(s, "connection", "child step")),
            witness_from_data(_require(s, "consequent", "child step"), sig, registry)))
    return MTWitness(tuple(steps),
                     proof_from_data(_require(d, "closing", "witness"), sig, registry))


# -------------------------------------------------------------- certificates

def cert_to_data(c: FineCert) -> dict:
    return {"matches": [[j, cert_to_data(sub)] for j, sub in c.matches]}


def cert_from_data(d) -> FineCert:
    matches = []
    for m in _require(d, "matches", "fine certificate"):
        if not (isinstance(m, (list, tuple)) and len(m) == 2):
            raise FormatError("fine certificate: each match is [index, cert]")
        matches.append((int(m[0]), cert_from_data(m[1])))
    return FineCert(tuple(matches))


# ------------------------------------------------------------------ registry

def registry_to_data(reg: WitnessRegistry) -> list:
    return [[i, layer, formula_text(f)]
            for i, (f, _, layer) in enumerate(reg.entries())]


def registry_from_data(data, sig: Signature) -> WitnessRegistry:
    reg = WitnessRegistry()
    for row in data:
        if len(row) != 3:
            raise FormatError("registry entry must be [index, layer, formula]")
        idx, layer, text = int(row[0]), int(row[1]), row[2]
        f = parse(text, sig, reg)
        fv = sorted(free_vars(f))
        if len(fv) != 1:
            raise FormatError(f"registry entry {idx} must have one free variable")
        got = reg.register_variant(f, fv[0])
        if got != idx:
            raise FormatError(f"registry entries must be dense and ordered; "
                              f"entry {idx} landed at {got}")
        if reg.layer(got) != layer:
            raise FormatError(f"registry entry {idx}: stored layer {layer} "
                              f"differs from computed {reg.layer(got)}")
    return reg


def registry_to_text(reg: WitnessRegistry) -> str:
    return "".join(f"{i}\t{layer}\t{text}\n"
                   for i, layer, text in registry_to_data(reg))


def registry_from_text(text: str, sig: Signature) -> WitnessRegistry:
    rows = []
    for line in text.splitlines():
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise FormatError(f"registry line needs 3 tab-separated fields: {line!r}")
        rows.append(parts)
    return registry_from_data(rows, sig)


# ------------------------------------------------------------------ envelope

_KIND_CODECS = {
    "proof": (proof_to_data, proof_from_data),
    "state": (state_to_data, state_from_data),
    "witness": (witness_to_data, witness_from_data),
}


def wrap(kind: str, payload: dict, registry: WitnessRegistry | None = None) -> dict:
    out = {"format_version": FORMAT_VERSION, "kind": kind}
    if registry is not None and len(registry):
        out["registry"] = registry_to_data(registry)
    out.update(payload)
    return out


def dumps(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def load_envelope(text: str, sig: Signature, expect_kind: str,
                  registry: WitnessRegistry | None = None):
    """Returns (payload dict, registry).  An embedded registry wins over the
    supplied one; formula text inside the payload is not yet parsed."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise FormatError("expected a JSON object")
    version = data.get("format_version", FORMAT_VERSION)
    if version != FORMAT_VERSION:
        raise FormatError(f"unsupported format_version {version}")
    kind = data.get("kind", expect_kind)
    if kind != expect_kind:
        raise FormatError(f"expected a {expect_kind} file, found {kind}")
    if "registry" in data:
        registry = registry_from_data(data["registry"], sig)
    return data, (registry if registry is not None else WitnessRegistry())


def translation_to_data(state: IntenticState, cert: FineCert, witness: MTWitness) -> dict:
    return {"state": state_to_data(state),
            "fine_cert": cert_to_data(cert),
            "witness": witness_to_data(witness)}
