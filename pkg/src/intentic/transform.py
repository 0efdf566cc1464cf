"""Constructive round trip between classical proofs and state certificates.

``translate`` walks a checked classical proof and produces a fine extension
of the input state together with a made-true certificate for the conclusion.
The three discharging rules each adjoin one hypothesis child and contribute
one child step; every other rule becomes a node of the closing proof, with
premise translations threaded left to right through successively finer
states.

``extract`` inverts the construction: child steps become implication
subproofs (recursively extracted, connection-grafted, then discharged), which
replace the corresponding assumptions of the closing proof.  The result is a
classical proof of the certified formula from the base generators alone.

``entail`` packages the common entry point: the root state generated by a
sentence set, with assumption-leaf witnesses.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .kernel import (
    CLASSICAL, DISCHARGING_RULES, Proof, assume, check_proof,
)
from .states import (
    FineCert, IntenticState, app, check_fine_ext, compose_fine_certs,
    identity_cert, leaf, make_edge, validate_state, verify_fine_cert,
)
from .syntax import (
    Exists, Formula, Implies, Var, WConst, WitnessRegistry, canon_key,
    formula_text, formula_wconsts, free_vars, fresh_var, substitute,
)
from .truthmaking import (
    ChildStep, MTWitness, check_mt_witness, root_state, transport_fine,
    trivial_witness,
)


class TranslationError(Exception):
    pass


@dataclass(frozen=True)
class TranslationResult:
    state: IntenticState
    fine_cert: FineCert
    witness: MTWitness


# ----------------------------------------------------------- proof utilities

class _Labels:
    def __init__(self):
        self.counter = 0

    def fresh(self) -> str:
        self.counter += 1
        return f"_d{self.counter}"


def proof_subst_var(node: Proof, var: str, term) -> Proof:
    """Substitute a term for a free variable throughout a proof.

    Inner eigenvariables that collide with the substituted name are renamed
    first, so only genuinely free occurrences are replaced."""
    if node.var == var and node.rule in ("forall_i", "exists_e"):
        avoid = set()
        for n in node.nodes():
            avoid |= free_vars(n.conclusion)
        avoid.add(var)
        if isinstance(term, Var):
            avoid.add(term.name)
        new = fresh_var(node.var, avoid)
        if node.rule == "forall_i":
            prem = (proof_subst_var(node.premises[0], var, Var(new)),)
        else:
            prem = (node.premises[0],
                    proof_subst_var(node.premises[1], var, Var(new)))
        node = replace(node, premises=prem, var=new)
    conclusion = substitute(node.conclusion, var, term)
    witness = node.witness
    if witness == Var(var):
        witness = term
    premises = tuple(proof_subst_var(q, var, term) for q in node.premises)
    return replace(node, conclusion=conclusion, premises=premises, witness=witness)


def proof_wconsts(p: Proof) -> frozenset[int]:
    out = set()
    for n in p.nodes():
        out |= formula_wconsts(n.conclusion)
        if isinstance(n.witness, WConst):
            out.add(n.witness.index)
    return frozenset(out)


def state_wconsts(u: IntenticState) -> frozenset[int]:
    out = set()
    for g in u.base.generators:
        out |= formula_wconsts(g)
    for e in u.children:
        out |= formula_wconsts(e.hypothesis)
        out |= state_wconsts(e.child)
    return frozenset(out)


def _normalize_labels(p: Proof, labels: _Labels) -> Proof:
    """Fresh, globally unique discharge labels; open leaves get a stock label."""
    def go(node, env):
        if node.rule == "assume":
            return replace(node, label=env.get(node.label, "h"))
        if node.rule in DISCHARGING_RULES and node.discharge is not None:
            new = labels.fresh()
            inner = {**env, node.discharge: new}
            if node.rule == "imp_i":
                prems = (go(node.premises[0], inner),)
            elif node.rule == "or_e":
                prems = (go(node.premises[0], env),
                         go(node.premises[1], inner),
                         go(node.premises[2], inner))
            else:
                prems = (go(node.premises[0], env),
                         go(node.premises[1], inner))
            return replace(node, premises=prems, discharge=new)
        return replace(node, premises=tuple(go(q, env) for q in node.premises))
    return go(p, {})


def _map_open_leaves(node: Proof, fn, bound: frozenset[str]) -> Proof:
    if node.rule == "assume":
        if node.label in bound:
            return node
        return fn(node)
    if node.rule in DISCHARGING_RULES and node.discharge is not None:
        inner = bound | {node.discharge}
        if node.rule == "imp_i":
            prems = (_map_open_leaves(node.premises[0], fn, inner),)
        elif node.rule == "or_e":
            prems = (_map_open_leaves(node.premises[0], fn, bound),
                     _map_open_leaves(node.premises[1], fn, inner),
                     _map_open_leaves(node.premises[2], fn, inner))
        else:
            prems = (_map_open_leaves(node.premises[0], fn, bound),
                     _map_open_leaves(node.premises[1], fn, inner))
        return replace(node, premises=prems)
    return replace(node, premises=tuple(_map_open_leaves(q, fn, bound)
                                        for q in node.premises))


def _graft(p: Proof, repl: dict[str, Proof]) -> Proof:
    """Replace open assumption leaves by proofs of the same formulas."""
    def fn(leaf_node):
        return repl.get(canon_key(leaf_node.conclusion), leaf_node)
    return _map_open_leaves(p, fn, frozenset())


def _relabel_open(p: Proof, formula_key: str, label: str) -> Proof:
    def fn(leaf_node):
        if canon_key(leaf_node.conclusion) == formula_key:
            return replace(leaf_node, label=label)
        return leaf_node
    return _map_open_leaves(p, fn, frozenset())


# ----------------------------------------------------------------- translate

class _Translator:
    def __init__(self, registry: WitnessRegistry):
        self.registry = registry

    def opens(self, p: Proof) -> tuple[Formula, ...]:
        return check_proof(p, CLASSICAL, registry=self.registry).assumptions

    def migrate(self, q: Proof, u1: IntenticState, wits) -> dict[str, MTWitness]:
        """Witness map for a subproof translated inside a hypothesis state.

        Only assumption-level (step-free) witnesses survive the move: the
        hypothesis state starts with no children, so a witness that leans on
        child steps of the outer state has nothing to re-target to."""
        out: dict[str, MTWitness] = {}
        for g in self.opens(q):
            k = canon_key(g)
            if u1.base.contains(g):
                out[k] = trivial_witness(g)
            elif k in wits:
                if not wits[k].is_flat():
                    raise TranslationError(
                        f"witness for {formula_text(g)} uses child steps and cannot "
                        "enter the scope of a discharged hypothesis")
                out[k] = wits[k]
            else:
                raise TranslationError(f"no witness for open assumption {formula_text(g)}")
        return out

    def run(self, p: Proof, u: IntenticState, wits):
        rule = p.rule
        if rule == "assume":
            w = wits.get(canon_key(p.conclusion))
            if w is None:
                if u.base.contains(p.conclusion):
                    w = trivial_witness(p.conclusion)
                else:
                    raise TranslationError(
                        f"no witness for open assumption {formula_text(p.conclusion)}")
            return u, identity_cert(u), w
        if rule == "lem":
            return u, identity_cert(u), MTWitness((), p)
        if rule == "imp_i":
            return self.case_imp_i(p, u, wits)
        if rule == "or_e":
            return self.case_or_e(p, u, wits)
        if rule == "exists_e":
            return self.case_exists_e(p, u, wits)
        return self.case_generic(p, u, wits)

    def _attach(self, parent: IntenticState, hyps_children):
        """App new hypothesis children onto parent; returns (v, cert, step data)."""
        edges = [make_edge(parent.base, h, child) for h, child in hyps_children]
        v = app(parent, edges, self.registry)
        cert = check_fine_ext(parent, v)
        indices = []
        for e in edges:
            key = e.sort_key()
            indices.append(next(i for i, f in enumerate(v.children)
                                if f.sort_key() == key))
        return v, cert, edges, indices

    def case_imp_i(self, p, u, wits):
        psi = p.conclusion.left
        u1 = leaf(u.base.add(psi))
        v1, _, w_theta = self.run(p.premises[0], u1, self.migrate(p.premises[0], u1, wits))
        v, cert, edges, (idx,) = self._attach(u, [(psi, v1)])
        step = ChildStep(idx, psi, edges[0].connection, w_theta)
        return v, cert, MTWitness((step,), assume(p.conclusion))

    def case_or_e(self, p, u, wits):
        major, lp, rp = p.premises
        psi, theta = major.conclusion.left, major.conclusion.right
        v1, c1, w_major = self.run(major, u, wits)
        u2 = leaf(u.base.add(psi))
        v2, _, w_l = self.run(lp, u2, self.migrate(lp, u2, wits))
        u3 = leaf(u.base.add(theta))
        v3, _, w_r = self.run(rp, u3, self.migrate(rp, u3, wits))
        v, c2, edges, (i2, i3) = self._attach(v1, [(psi, v2), (theta, v3)])
        w_major = transport_fine(w_major, v1, v, c2)
        steps = w_major.child_steps + (
            ChildStep(i2, psi, edges[0].connection, w_l),
            ChildStep(i3, theta, edges[1].connection, w_r))
        closing = Proof("or_e_nh", p.conclusion,
                        (w_major.closing,
                         assume(Implies(psi, p.conclusion)),
                         assume(Implies(theta, p.conclusion))))
        return v, compose_fine_certs(u, v1, c1, c2), MTWitness(steps, closing)

    def case_exists_e(self, p, u, wits):
        major, minor = p.premises
        ex = major.conclusion
        if not isinstance(ex, Exists) or free_vars(ex):
            raise TranslationError("existential elimination requires a closed major premise")
        if free_vars(ex.body) != {ex.var}:
            raise TranslationError("no witness constant exists for a vacuous existential")
        used = proof_wconsts(p) | state_wconsts(u)
        k = self.registry.canonical_id(ex.body, ex.var)
        if k is None:
            k = self.registry.register(ex.body, ex.var)
        elif k in used:
            k = self.registry.register_variant(ex.body, ex.var)
        inst = substitute(ex.body, ex.var, WConst(k))
        minor = proof_subst_var(minor, p.var, WConst(k))
        v1, c1, w_major = self.run(major, u, wits)
        u2 = leaf(u.base.add(inst))
        v2, _, w_min = self.run(minor, u2, self.migrate(minor, u2, wits))
        v, c2, edges, (idx,) = self._attach(v1, [(inst, v2)])
        w_major = transport_fine(w_major, v1, v, c2)
        steps = w_major.child_steps + (ChildStep(idx, inst, edges[0].connection, w_min),)
        closing = Proof("exists_e_nh", p.conclusion,
                        (w_major.closing, assume(Implies(inst, p.conclusion))))
        return v, compose_fine_certs(u, v1, c1, c2), MTWitness(steps, closing)

    def case_generic(self, p, u, wits):
        cur = u
        acc = identity_cert(u)
        wits = dict(wits)
        done: list[MTWitness] = []
        for q in p.premises:
            v_i, c_i, w_i = self.run(q, cur, wits)
            done = [transport_fine(w, cur, v_i, c_i) for w in done]
            wits = {k: transport_fine(w, cur, v_i, c_i) for k, w in wits.items()}
            done.append(w_i)
            acc = compose_fine_certs(u, cur, acc, c_i)
            cur = v_i
        steps = tuple(s for w in done for s in w.child_steps)
        if p.rule == "forall_i":
            a = p.var
            loose = [f for f in [s.implication for s in steps] + list(cur.base.generators)
                     if a in free_vars(f)]
            if loose:
                raise TranslationError(
                    f"eigenvariable {a} occurs free in {formula_text(loose[0])}; "
                    "the universal step cannot be replayed against the state")
        closing = Proof(p.rule, p.conclusion, tuple(w.closing for w in done),
                        var=p.var, witness=p.witness)
        return cur, acc, MTWitness(steps, closing)


def translate(p: Proof, u: IntenticState, gamma_witnesses,
              registry: WitnessRegistry | None = None) -> TranslationResult:
    """Turn a classical proof into a checked (state, certificate, witness) triple."""
    reg = registry if registry is not None else WitnessRegistry()
    judgment = check_proof(p, CLASSICAL, registry=reg)
    wits: dict[str, MTWitness] = {}
    for g, w in dict(gamma_witnesses).items():
        check_mt_witness(u, g, w, reg)
        wits[canon_key(g)] = w
    for f in judgment.assumptions:
        if canon_key(f) not in wits and not u.base.contains(f):
            raise TranslationError(f"no witness for open assumption {formula_text(f)}")
    v, cert, witness = _Translator(reg).run(p, u, wits)
    validate_state(v, reg)
    verify_fine_cert(u, v, cert)
    check_mt_witness(v, p.conclusion, witness, reg)
    return TranslationResult(v, cert, witness)


def entail(gamma, f: Formula, p: Proof,
           registry: WitnessRegistry | None = None):
    """Root-state entry point: assumption-leaf witnesses over the sentence set."""
    gamma = tuple(gamma)
    for g in gamma:
        if free_vars(g):
            raise TranslationError(f"assumption {formula_text(g)} is not a sentence")
    reg = registry if registry is not None else WitnessRegistry()
    root = root_state(gamma)
    witnesses = {g: trivial_witness(g) for g in root.base.generators}
    result = translate(p, root, witnesses, reg)
    return root, result


# ------------------------------------------------------------------- extract

def extract(u: IntenticState, f: Formula, w: MTWitness,
            registry: WitnessRegistry | None = None) -> Proof:
    """Classical proof of the certified formula from the base generators."""
    reg = registry if registry is not None else WitnessRegistry()
    check_mt_witness(u, f, w, reg)
    proof = _extract(u, w, _Labels())
    judgment = check_proof(proof, CLASSICAL, registry=reg)
    allowed = set(u.base.keys())
    stray = [a for a in judgment.assumptions if canon_key(a) not in allowed]
    if stray:  # cannot happen for a checked witness; guards the contract
        raise TranslationError(f"extraction leaked assumption {formula_text(stray[0])}")
    return proof


def _extract(u: IntenticState, w: MTWitness, labels: _Labels) -> Proof:
    repl: dict[str, Proof] = {}
    for step in w.child_steps:
        edge = u.children[step.edge]
        chi = step.consequent.formula
        sub = _extract(edge.child, step.consequent, labels)
        conn = {canon_key(g): _normalize_labels(pr, labels)
                for g, pr in zip(edge.child.base.generators, step.connection)}
        sub = _graft(_normalize_labels(sub, labels), conn)
        lab = labels.fresh()
        sub = _relabel_open(sub, canon_key(step.antecedent), lab)
        impl = Proof("imp_i", Implies(step.antecedent, chi), (sub,), discharge=lab)
        repl[canon_key(impl.conclusion)] = impl
    return _graft(_normalize_labels(w.closing, labels), repl)
