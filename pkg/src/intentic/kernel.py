"""Natural-deduction proof trees and the two checkers.

A proof is a tree of immutable nodes.  ``check_proof`` validates every node
against its rule schema and returns the root judgment (open assumptions plus
conclusion).  Two rule sets are supported:

* ``classical``: assumption, LEM, the usual intro/elim rules including the
  discharging rules ->I, vE and EE, plus the hypothesis-free variants vE' and
  EE' (which are classically derivable, so accepting them keeps every
  non-hypothetically checkable proof classically checkable with the same
  judgment).
* ``non-hypothetical``: the same set minus ->I, vE and EE.  Nothing ever
  discharges an assumption, so no reasoning happens under a hypothesis.

vE' takes a disjunction and two implication premises; EE' takes an
existential and one implication premise whose antecedent instantiates the
matrix with a witness constant registered for that matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

from .syntax import (
    And, Exists, FALSUM, ForAll, Formula, Implies, Or, Signature, Term, Var,
    WConst, WitnessRegistry, alpha_eq, canon_key, formula_text, free_vars,
    neg, substitute,
)

CLASSICAL = "classical"
NON_HYPOTHETICAL = "non-hypothetical"
_LOGIC_ALIASES = {
    "classical": CLASSICAL, "c": CLASSICAL,
    "non-hypothetical": NON_HYPOTHETICAL, "nh": NON_HYPOTHETICAL,
}

DISCHARGING_RULES = frozenset({"imp_i", "or_e", "exists_e"})

RULES = frozenset({
    "assume", "lem", "and_i", "and_e_l", "and_e_r", "or_i_l", "or_i_r",
    "or_e", "imp_i", "imp_e", "efq", "forall_i", "forall_e", "exists_i",
    "exists_e", "or_e_nh", "exists_e_nh",
})


class ProofError(Exception):
    """Check failure; ``path`` is the premise-index route to the bad node."""

    def __init__(self, path: tuple[int, ...], reason: str):
        self.path = path
        self.reason = reason
        loc = ".".join(map(str, path)) if path else "root"
        super().__init__(f"at {loc}: {reason}")


@dataclass(frozen=True)
class Proof:
    rule: str
    conclusion: Formula
    premises: tuple["Proof", ...] = ()
    label: str | None = None        # assumption label
    discharge: str | None = None    # imp_i / or_e / exists_e
    var: str | None = None          # eigenvariable of forall_i / exists_e
    witness: Term | None = None     # instantiation term of forall_e / exists_i

    def nodes(self):
        yield self
        for p in self.premises:
            yield from p.nodes()


# --------------------------------------------------------- node constructors

def assume(formula: Formula, label: str = "h") -> Proof:
    return Proof("assume", formula, label=label)


def lem(instance: Formula) -> Proof:
    return Proof("lem", Or(instance, neg(instance)))


def and_i(left: Proof, right: Proof) -> Proof:
    return Proof("and_i", And(left.conclusion, right.conclusion), (left, right))


def and_e_l(premise: Proof) -> Proof:
    return Proof("and_e_l", premise.conclusion.left, (premise,))


def and_e_r(premise: Proof) -> Proof:
    return Proof("and_e_r", premise.conclusion.right, (premise,))


def or_i_l(premise: Proof, right: Formula) -> Proof:
    return Proof("or_i_l", Or(premise.conclusion, right), (premise,))


def or_i_r(premise: Proof, left: Formula) -> Proof:
    return Proof("or_i_r", Or(left, premise.conclusion), (premise,))


def imp_i(premise: Proof, antecedent: Formula, discharge: str | None = None) -> Proof:
    return Proof("imp_i", Implies(antecedent, premise.conclusion), (premise,),
                 discharge=discharge)


def imp_e(major: Proof, minor: Proof) -> Proof:
    return Proof("imp_e", major.conclusion.right, (major, minor))


def efq(premise: Proof, conclusion: Formula) -> Proof:
    return Proof("efq", conclusion, (premise,))


def forall_i(premise: Proof, var: str, conclusion: Formula) -> Proof:
    return Proof("forall_i", conclusion, (premise,), var=var)


def forall_e(premise: Proof, term: Term) -> Proof:
    body = substitute(premise.conclusion.body, premise.conclusion.var, term)
    return Proof("forall_e", body, (premise,), witness=term)


def exists_i(premise: Proof, conclusion: Formula, term: Term) -> Proof:
    return Proof("exists_i", conclusion, (premise,), witness=term)


def exists_e(major: Proof, minor: Proof, var: str, discharge: str) -> Proof:
    return Proof("exists_e", minor.conclusion, (major, minor),
                 var=var, discharge=discharge)


def or_e(major: Proof, left: Proof, right: Proof, discharge: str) -> Proof:
    return Proof("or_e", left.conclusion, (major, left, right), discharge=discharge)


def or_e_nh(major: Proof, left_imp: Proof, right_imp: Proof) -> Proof:
    return Proof("or_e_nh", left_imp.conclusion.right, (major, left_imp, right_imp))


def exists_e_nh(major: Proof, minor_imp: Proof) -> Proof:
    return Proof("exists_e_nh", minor_imp.conclusion.right, (major, minor_imp))


# ------------------------------------------------------------------ judgment

@dataclass(frozen=True)
class Judgment:
    assumptions: tuple[Formula, ...]  # canonically ordered, alpha-deduplicated
    conclusion: Formula

    def __str__(self) -> str:
        gamma = ", ".join(map(formula_text, self.assumptions))
        return f"{gamma} |- {formula_text(self.conclusion)}"


def _canonical_formulas(formulas) -> tuple[Formula, ...]:
    seen: dict[str, Formula] = {}
    for f in formulas:
        seen.setdefault(canon_key(f), f)
    return tuple(seen[k] for k in sorted(seen))


# ------------------------------------------------------------------- checker

def check_proof(proof: Proof, logic: str = CLASSICAL, *,
                registry: WitnessRegistry | None = None,
                signature: Signature | None = None) -> Judgment:
    """Validate every node; returns the root judgment or raises ProofError."""
    try:
        mode = _LOGIC_ALIASES[logic]
    except KeyError:
        raise ValueError(f"unknown logic {logic!r}") from None
    reg = registry if registry is not None else WitnessRegistry()
    opens = _check(proof, (), mode, reg, signature)
    return Judgment(_canonical_formulas(f for _, f in opens), proof.conclusion)


def checks(proof: Proof, logic: str = CLASSICAL, **kw) -> bool:
    try:
        check_proof(proof, logic, **kw)
        return True
    except ProofError:
        return False


def _fail(path, reason):
    raise ProofError(path, reason)


def _expect_premises(node, path, n):
    if len(node.premises) != n:
        _fail(path, f"{node.rule} expects {n} premises, got {len(node.premises)}")


def _check(node: Proof, path, mode, reg, sig):
    """Returns the open assumptions of the subtree as (label, formula) pairs."""
    rule = node.rule
    if rule not in RULES:
        _fail(path, f"unknown rule {rule!r}")
    if mode == NON_HYPOTHETICAL and rule in DISCHARGING_RULES:
        _fail(path, f"rule {rule} is not available in non-hypothetical mode")
    if sig is not None:
        sig.validate(node.conclusion, reg)
    c = node.conclusion

    if rule == "assume":
        if node.premises:
            _fail(path, "assumption leaves take no premises")
        return ((node.label or "h", c),)

    if rule == "lem":
        if node.premises:
            _fail(path, "lem leaves take no premises")
        if not (isinstance(c, Or) and alpha_eq(c.right, neg(c.left))):
            _fail(path, "lem must conclude an instance of 'p | ~p'")
        return ()

    sub = [_check(p, path + (i,), mode, reg, sig) for i, p in enumerate(node.premises)]

    if rule == "and_i":
        _expect_premises(node, path, 2)
        if not (isinstance(c, And) and alpha_eq(c.left, node.premises[0].conclusion)
                and alpha_eq(c.right, node.premises[1].conclusion)):
            _fail(path, "conclusion is not the conjunction of the premises")
        return sub[0] + sub[1]

    if rule in ("and_e_l", "and_e_r"):
        _expect_premises(node, path, 1)
        prem = node.premises[0].conclusion
        if not isinstance(prem, And):
            _fail(path, "premise is not a conjunction")
        side = prem.left if rule == "and_e_l" else prem.right
        if not alpha_eq(c, side):
            _fail(path, "conclusion is not the selected conjunct")
        return sub[0]

    if rule in ("or_i_l", "or_i_r"):
        _expect_premises(node, path, 1)
        if not isinstance(c, Or):
            _fail(path, "conclusion is not a disjunction")
        side = c.left if rule == "or_i_l" else c.right
        if not alpha_eq(side, node.premises[0].conclusion):
            _fail(path, "premise does not match the selected disjunct")
        return sub[0]

    if rule == "imp_e":
        _expect_premises(node, path, 2)
        major = node.premises[0].conclusion
        if not isinstance(major, Implies):
            _fail(path, "major premise is not an implication")
        if not alpha_eq(major.left, node.premises[1].conclusion):
            _fail(path, "minor premise does not match the antecedent")
        if not alpha_eq(major.right, c):
            _fail(path, "conclusion does not match the consequent")
        return sub[0] + sub[1]

    if rule == "efq":
        _expect_premises(node, path, 1)
        if node.premises[0].conclusion != FALSUM:
            _fail(path, "premise of efq must be falsum")
        return sub[0]

    if rule == "imp_i":
        _expect_premises(node, path, 1)
        if not isinstance(c, Implies):
            _fail(path, "conclusion is not an implication")
        if not alpha_eq(c.right, node.premises[0].conclusion):
            _fail(path, "premise does not match the consequent")
        return _discharge(sub[0], node.discharge, c.left, path)

    if rule == "or_e":
        _expect_premises(node, path, 3)
        major = node.premises[0].conclusion
        if not isinstance(major, Or):
            _fail(path, "major premise is not a disjunction")
        for i in (1, 2):
            if not alpha_eq(node.premises[i].conclusion, c):
                _fail(path, "minor premise conclusion differs from the rule conclusion")
        left = _discharge(sub[1], node.discharge, major.left, path)
        right = _discharge(sub[2], node.discharge, major.right, path)
        return sub[0] + left + right

    if rule == "forall_i":
        _expect_premises(node, path, 1)
        a = node.var
        if a is None:
            _fail(path, "forall_i needs an eigenvariable")
        if not isinstance(c, ForAll):
            _fail(path, "conclusion is not universal")
        if not alpha_eq(substitute(c.body, c.var, Var(a)), node.premises[0].conclusion):
            _fail(path, "premise is not the matrix at the eigenvariable")
        if a in free_vars(c):
            _fail(path, f"eigenvariable {a} occurs free in the conclusion")
        for _, f in sub[0]:
            if a in free_vars(f):
                _fail(path, f"eigenvariable {a} occurs free in an open assumption")
        return sub[0]

    if rule == "forall_e":
        _expect_premises(node, path, 1)
        prem = node.premises[0].conclusion
        if not isinstance(prem, ForAll):
            _fail(path, "premise is not universal")
        if node.witness is None:
            _fail(path, "forall_e needs an instantiation term")
        if not alpha_eq(c, substitute(prem.body, prem.var, node.witness)):
            _fail(path, "conclusion is not the instance at the given term")
        return sub[0]

    if rule == "exists_i":
        _expect_premises(node, path, 1)
        if not isinstance(c, Exists):
            _fail(path, "conclusion is not existential")
        if node.witness is None:
            _fail(path, "exists_i needs a witness term")
        if not alpha_eq(node.premises[0].conclusion, substitute(c.body, c.var, node.witness)):
            _fail(path, "premise is not the matrix at the witness term")
        return sub[0]

    if rule == "exists_e":
        _expect_premises(node, path, 2)
        major = node.premises[0].conclusion
        if not isinstance(major, Exists):
            _fail(path, "major premise is not existential")
        a = node.var
        if a is None:
            _fail(path, "exists_e needs an eigenvariable")
        if not alpha_eq(node.premises[1].conclusion, c):
            _fail(path, "minor premise conclusion differs from the rule conclusion")
        inst = substitute(major.body, major.var, Var(a))
        remaining = _discharge(sub[1], node.discharge, inst, path)
        for f in (c, major):
            if a in free_vars(f):
                _fail(path, f"eigenvariable {a} occurs free in {formula_text(f)}")
        for _, f in remaining:
            if a in free_vars(f):
                _fail(path, f"eigenvariable {a} occurs free in an open assumption")
        return sub[0] + remaining

    if rule == "or_e_nh":
        _expect_premises(node, path, 3)
        major = node.premises[0].conclusion
        li, ri = node.premises[1].conclusion, node.premises[2].conclusion
        if not isinstance(major, Or):
            _fail(path, "major premise is not a disjunction")
        if not (isinstance(li, Implies) and isinstance(ri, Implies)):
            _fail(path, "side premises must be implications")
        if not (alpha_eq(li.left, major.left) and alpha_eq(ri.left, major.right)):
            _fail(path, "implication antecedents do not match the disjuncts")
        if not (alpha_eq(li.right, c) and alpha_eq(ri.right, c)):
            _fail(path, "implication consequents do not match the conclusion")
        return sub[0] + sub[1] + sub[2]

    if rule == "exists_e_nh":
        _expect_premises(node, path, 2)
        major = node.premises[0].conclusion
        minor = node.premises[1].conclusion
        if not isinstance(major, Exists):
            _fail(path, "major premise is not existential")
        if not isinstance(minor, Implies):
            _fail(path, "minor premise must be an implication")
        if not alpha_eq(minor.right, c):
            _fail(path, "implication consequent does not match the conclusion")
        if free_vars(major.body) != {major.var}:
            _fail(path, "the existential matrix must have exactly the bound variable free")
        candidates = reg.ids_for(major.body, major.var)
        if not candidates:
            _fail(path, "no witness constant is registered for the existential matrix")
        if not any(alpha_eq(minor.left, substitute(major.body, major.var, WConst(k)))
                   for k in candidates):
            _fail(path, "wrong witness constant in the minor premise")
        return sub[0] + sub[1]

    raise AssertionError(f"unhandled rule {rule}")


def _discharge(opens, label, formula, path):
    """Remove leaves bound by `label`; they must all carry the stated formula."""
    if label is None:
        return opens
    remaining = []
    for lab, f in opens:
        if lab == label:
            if not alpha_eq(f, formula):
                _fail(path, f"label {label!r} binds {formula_text(f)}, "
                            f"expected {formula_text(formula)}")
        else:
            remaining.append((lab, f))
    return tuple(remaining)


def axiomatic(proof: Proof, axioms, *, logic: str = NON_HYPOTHETICAL,
              registry: WitnessRegistry | None = None) -> bool:
    """True iff the proof checks and every open assumption satisfies the oracle."""
    judgment = check_proof(proof, logic, registry=registry)
    return all(axioms(f) for f in judgment.assumptions)
