"""Checkable certificates for membership in a state's made-true set.

The made-true set of a state contains its base generators, is closed under
the hypothesis-free logic, and contains ``h -> g`` whenever some child
reachable by adjoining ``h`` makes ``g`` true.  Membership is only
semi-decidable, so it is represented exclusively by finite certificates:

* each *child step* contributes one implication, justified by connection
  proofs (base plus antecedent derives every child generator) and a
  recursive certificate against that child;
* a single *closing proof* derives the claimed formula in the
  hypothesis-free logic from base generators and step implications.

``transport_fine`` and ``transport_boost`` rewrite a certificate so that it
checks against a fine extension or a boosted copy of its state; both are
total on checked inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

from .kernel import (
    NON_HYPOTHETICAL, Proof, ProofError, assume, check_proof,
)
from .states import (
    BasicState, Edge, FineCert, IntenticState, _boost_edge, boost,
    check_fine_ext, leaf, verify_fine_cert,
)
from .syntax import (
    Formula, Implies, WitnessRegistry, alpha_eq, canon_key, formula_text,
)


class WitnessError(Exception):
    """Certificate rejection; ``path`` routes through child steps."""

    def __init__(self, path: tuple[int, ...], reason: str):
        self.path = path
        self.reason = reason
        loc = ".".join(map(str, path)) if path else "root"
        super().__init__(f"at step {loc}: {reason}")


@dataclass(frozen=True)
class ChildStep:
    edge: int
    antecedent: Formula
    connection: tuple[Proof, ...]
    consequent: "MTWitness"

    @property
    def implication(self) -> Formula:
        return Implies(self.antecedent, self.consequent.formula)


@dataclass(frozen=True)
class MTWitness:
    child_steps: tuple[ChildStep, ...]
    closing: Proof

    @property
    def formula(self) -> Formula:
        return self.closing.conclusion

    def is_flat(self) -> bool:
        return not self.child_steps


def trivial_witness(f: Formula) -> MTWitness:
    """Certificate for a base generator: a single assumption leaf."""
    return MTWitness((), assume(f))


def make_child_step(u: IntenticState, edge_index: int, consequent: MTWitness,
                    antecedent: Formula | None = None,
                    connection: tuple[Proof, ...] | None = None) -> ChildStep:
    """Child step defaulting to the edge's own hypothesis and connection."""
    e = u.children[edge_index]
    if antecedent is None:
        antecedent = e.hypothesis
    if connection is None:
        if not alpha_eq(antecedent, e.hypothesis):
            raise ValueError("connection proofs are required for a custom antecedent")
        connection = e.connection
    return ChildStep(edge_index, antecedent, connection, consequent)


# ------------------------------------------------------------------ checking

def check_mt_witness(u: IntenticState, f: Formula, w: MTWitness,
                     registry: WitnessRegistry | None = None,
                     _path: tuple[int, ...] = ()) -> None:
    """Accept iff the certificate establishes that u makes f true."""
    if not alpha_eq(w.formula, f):
        raise WitnessError(_path, f"closing proof concludes {formula_text(w.formula)}, "
                                  f"claimed {formula_text(f)}")
    allowed = set(u.base.keys())
    for i, step in enumerate(w.child_steps):
        if not 0 <= step.edge < len(u.children):
            raise WitnessError(_path + (i,), f"edge index {step.edge} out of range")
        edge = u.children[step.edge]
        _check_step_connection(u.base, step, edge, registry, _path + (i,))
        check_mt_witness(edge.child, step.consequent.formula, step.consequent,
                         registry, _path + (i,))
        allowed.add(canon_key(step.implication))
    try:
        j = check_proof(w.closing, NON_HYPOTHETICAL, registry=registry)
    except ProofError as exc:
        raise WitnessError(_path, f"closing proof does not check: {exc}") from exc
    for a in j.assumptions:
        if canon_key(a) not in allowed:
            raise WitnessError(_path, f"closing proof assumes {formula_text(a)}, which is "
                                      "neither a generator nor a step implication")


def _check_step_connection(base: BasicState, step: ChildStep, edge: Edge,
                           registry, path) -> None:
    gens = edge.child.base.generators
    if len(step.connection) != len(gens):
        raise WitnessError(path, f"expected {len(gens)} connection proofs, "
                                 f"got {len(step.connection)}")
    allowed = set(base.keys()) | {canon_key(step.antecedent)}
    for i, (g, proof) in enumerate(zip(gens, step.connection)):
        try:
            j = check_proof(proof, NON_HYPOTHETICAL, registry=registry)
        except ProofError as exc:
            raise WitnessError(path, f"connection proof {i} does not check: {exc}") from exc
        if canon_key(j.conclusion) != canon_key(g):
            raise WitnessError(path, f"connection proof {i} concludes "
                                     f"{formula_text(j.conclusion)}, expected {formula_text(g)}")
        for a in j.assumptions:
            if canon_key(a) not in allowed:
                raise WitnessError(path, f"connection proof {i} assumes {formula_text(a)}, "
                                         "which is neither a generator nor the antecedent")


def holds(u: IntenticState, f: Formula, w: MTWitness,
          registry: WitnessRegistry | None = None) -> bool:
    try:
        check_mt_witness(u, f, w, registry)
        return True
    except WitnessError:
        return False


# ----------------------------------------------------------------- transport

def transport_fine(w: MTWitness, u: IntenticState, v: IntenticState,
                   cert: FineCert) -> MTWitness:
    """Re-target a certificate along a fine-extension matching.

    Bases agree, so closing and connection proofs carry over verbatim; only
    edge indices are rewritten, recursively."""
    steps = []
    for step in w.child_steps:
        j, sub = cert.matches[step.edge]
        steps.append(ChildStep(j, step.antecedent, step.connection,
                               transport_fine(step.consequent,
                                              u.children[step.edge].child,
                                              v.children[j].child, sub)))
    return MTWitness(tuple(steps), w.closing)


def transport_boost(w: MTWitness, u: IntenticState, c: BasicState) -> MTWitness:
    """Re-target a certificate to boost(u, c).

    Closing proofs are reused (their assumptions remain generators of the
    enlarged base); connection proofs gain assumption leaves for the new
    generators."""
    bu = boost(u, c)
    steps = []
    for step in w.child_steps:
        edge = u.children[step.edge]
        new_edge = _boost_edge(edge, c)
        j = bu.children.index(new_edge)
        old = {canon_key(g): p for g, p in zip(edge.child.base.generators, step.connection)}
        connection = tuple(old.get(canon_key(g), assume(g))
                           for g in new_edge.child.base.generators)
        steps.append(ChildStep(j, step.antecedent, connection,
                               transport_boost(step.consequent, edge.child, c)))
    return MTWitness(tuple(steps), w.closing)


# ------------------------------------------------------- entailment checking

def root_state(gamma) -> IntenticState:
    """The childless state generated by an assumption set."""
    return leaf(BasicState.of(gamma))


def check_entailment_certificate(gamma, f: Formula, v: IntenticState,
                                 cert: FineCert, w: MTWitness,
                                 registry: WitnessRegistry | None = None) -> None:
    """Accept iff cert proves root(gamma) <=F v and w establishes f at v."""
    verify_fine_cert(root_state(gamma), v, cert)
    check_mt_witness(v, f, w, registry)
