"""Bounded proof search for the hypothesis-free logic over relational
arithmetic.

The axiom base is arithmetic in a purely relational signature (successor,
addition and multiplication as relations, equality, the constant 0), with
excluded middle and induction as schemas and optional extra axioms whose
free variables are read as parameter constants.

The search is a terminating under-approximation, organized around a strong
subformula discipline: goals are confined to positive-subformula instances
of the axioms and of the top goal over a finite term pool, implications are
never introduced, and at most one witness constant is registered per
existential formula in the initial pool.  Verdicts are three-valued: a
kernel-checkable proof, exhaustion at the depth bound, or definite failure
of the discipline (no bound was hit).

Dispatch per goal is: axiom recognition, then introduction steps, then
elimination steps (instantiation chains from universal axioms, implication
elimination, conjunction projection, disjunction cases, excluded-middle
cases, existential cases over registered witness constants, and optionally
ex falso).
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field

from .kernel import (
    NON_HYPOTHETICAL, Proof, and_e_l, and_e_r, and_i, assume, check_proof,
    exists_e_nh, exists_i, forall_e, forall_i, imp_e, lem, or_e_nh, or_i_l,
    or_i_r, efq,
)
from .syntax import (
    And, Atom, Const, Exists, FALSUM, ForAll, Formula, Implies, Or,
    PA_SIGNATURE, Signature, Term, Var, WConst, WitnessRegistry, alpha_eq,
    canon_key, formula_text, formula_terms, free_vars, fresh_var, neg,
    subformula_polarities, substitute, substitute_many, term_text,
)


# -------------------------------------------------------------- axiom base

_PA_AXIOM_TEXT = (
    ("E1", "forall x. x = x"),
    ("E2", "forall x. forall y. x = y -> y = x"),
    ("E3", "forall x. forall y. forall z. x = y & y = z -> x = z"),
    ("E4", "forall x. forall x2. forall y. forall y2. forall z. forall z2. "
           "x = x2 & y = y2 & z = z2 & Add(x, y, z) -> Add(x2, y2, z2)"),
    ("E5", "forall x. forall x2. forall y. forall y2. forall z. forall z2. "
           "x = x2 & y = y2 & z = z2 & Mul(x, y, z) -> Mul(x2, y2, z2)"),
    ("E6", "forall x. forall x2. forall y. forall y2. "
           "x = x2 & y = y2 & S(x, y) -> S(x2, y2)"),
    ("SF1", "forall x. exists y. S(x, y)"),
    ("SF2", "forall x. forall y. forall z. S(x, y) & S(x, z) -> y = z"),
    ("AF1", "forall x. forall y. exists z. Add(x, y, z)"),
    ("AF2", "forall x. forall y. forall z. forall z2. "
            "Add(x, y, z) & Add(x, y, z2) -> z = z2"),
    ("MF1", "forall x. forall y. exists z. Mul(x, y, z)"),
    ("MF2", "forall x. forall y. forall z. forall z2. "
            "Mul(x, y, z) & Mul(x, y, z2) -> z = z2"),
    ("S1", "forall x. ~S(x, 0)"),
    ("S2", "forall x. forall y. forall z. S(x, z) & S(y, z) -> x = y"),
    ("A1", "forall x. Add(x, 0, x)"),
    ("A2", "forall x. forall y. forall y2. forall z. forall z2. "
           "S(y, y2) & Add(x, y, z) & S(z, z2) -> Add(x, y2, z2)"),
    ("M1", "forall x. Mul(x, 0, 0)"),
    ("M2", "forall x. forall y. forall y2. forall z. forall u. "
           "S(y, y2) & Mul(x, y, z) & Add(z, x, u) -> Mul(x, y2, u)"),
)


@dataclass(frozen=True)
class AxiomBase:
    signature: Signature
    axioms: tuple[tuple[str, Formula], ...]
    extras: tuple[Formula, ...] = ()
    lem: bool = True
    ind: bool = True

    def named(self):
        """Closed axioms plus extras, each with a display name."""
        return self.axioms + tuple((f"extra{i}", f) for i, f in enumerate(self.extras))


def relational_pa(extras=(), omit=(), lem: bool = True, ind: bool = True) -> AxiomBase:
    from .syntax import parse
    axioms = tuple((name, parse(text, PA_SIGNATURE))
                   for name, text in _PA_AXIOM_TEXT if name not in omit)
    return AxiomBase(PA_SIGNATURE, axioms, tuple(extras), lem, ind)


# ------------------------------------------------------------------ matching

def strip_foralls(f: Formula) -> tuple[tuple[str, ...], Formula]:
    """Peel outer universals, renaming on shadowing so names stay distinct."""
    out: list[str] = []
    while isinstance(f, ForAll):
        v, body = f.var, f.body
        if v in out:
            nv = fresh_var(v, set(out) | free_vars(body))
            body = substitute(body, v, Var(nv))
            v = nv
        out.append(v)
        f = body
    return tuple(out), f


def close_foralls(vs, f: Formula) -> Formula:
    return functools.reduce(lambda acc, v: ForAll(v, acc), reversed(vs), f)


def match(pattern: Formula, target: Formula, pvars) -> dict[str, Term] | None:
    """First-order matching: bind the pattern variables so the pattern
    becomes alpha-equal to the target.  Returns the binding or None."""
    binding: dict[str, Term] = {}
    ok = _match(pattern, target, frozenset(pvars), {}, {}, binding)
    return binding if ok else None


def _match(p, t, pvars, penv, tenv, binding) -> bool:
    if isinstance(p, Atom):
        if not (isinstance(t, Atom) and p.rel == t.rel and len(p.args) == len(t.args)):
            return False
        return all(_match_term(pa, ta, pvars, penv, tenv, binding)
                   for pa, ta in zip(p.args, t.args))
    if type(p) is not type(t):
        return False
    if isinstance(p, (And, Or, Implies)):
        return (_match(p.left, t.left, pvars, penv, tenv, binding)
                and _match(p.right, t.right, pvars, penv, tenv, binding))
    if isinstance(p, (ForAll, Exists)):
        depth = len(penv)
        return _match(p.body, t.body, pvars,
                      {**penv, p.var: depth}, {**tenv, t.var: depth}, binding)
    return True  # Falsum


def _match_term(pa, ta, pvars, penv, tenv, binding) -> bool:
    if isinstance(pa, Var):
        if pa.name in penv:
            return isinstance(ta, Var) and tenv.get(ta.name) == penv[pa.name]
        if pa.name in pvars:
            if isinstance(ta, Var) and ta.name in tenv:
                return False  # a bound target variable is not a term
            if pa.name in binding:
                return binding[pa.name] == ta
            binding[pa.name] = ta
            return True
        return isinstance(ta, Var) and ta.name == pa.name and ta.name not in tenv
    if isinstance(ta, Var) and ta.name in tenv:
        return False
    return pa == ta


# ------------------------------------------------------------- axiom oracle

def _lem_shape(f: Formula) -> Formula | None:
    if isinstance(f, Or) and isinstance(f.right, Implies) \
            and f.right.right == FALSUM and alpha_eq(f.right.left, f.left):
        return f.left
    return None


def _ind_shape(f: Formula) -> bool:
    if not (isinstance(f, Implies) and isinstance(f.left, And)
            and isinstance(f.right, ForAll)):
        return False
    x, body = f.right.var, f.right.body
    base_case = substitute(body, x, Const("0"))
    avoid = free_vars(body) | {x}
    y = fresh_var("y", avoid)
    y2 = fresh_var("y", avoid | {y})
    step = ForAll(y, ForAll(y2, Implies(
        And(Atom("S", (Var(y), Var(y2))), substitute(body, x, Var(y))),
        substitute(body, x, Var(y2)))))
    return alpha_eq(f.left.left, base_case) and alpha_eq(f.left.right, step)


def is_axiom(f: Formula, base: AxiomBase) -> bool:
    """Axiom recognition up to variable renaming and universal closure;
    schema instances of excluded middle and induction included."""
    for _, ax in base.named():
        if alpha_eq(f, ax):
            return True
    tvars, matrix = strip_foralls(f)
    for _, ax in base.named():
        avars, amat = strip_foralls(ax)
        b = match(amat, matrix, avars)
        if b is not None and all(isinstance(t, Var) for t in b.values()):
            return True
    if base.lem and _lem_shape(matrix) is not None:
        return True
    if base.ind and _ind_shape(matrix):
        return True
    return False


def uni(f: Formula, base: AxiomBase, pool=None):
    """Instantiation chain: an axiom whose outer universals, instantiated at
    pool terms, yield the goal.  Returns (axiom name, terms, proof) or None."""
    for name, ax in base.named():
        avars, amat = strip_foralls(ax)
        for k in range(len(avars) + 1):
            pvars = avars[:k]
            remainder = close_foralls(avars[k:], amat)
            b = match(remainder, f, pvars)
            if b is None or set(b) != set(pvars):
                continue
            terms = tuple(b[v] for v in pvars)
            if pool is not None and any(not isinstance(t, (Var, WConst)) and t not in pool
                                        for t in terms):
                continue
            proof = assume(ax)
            for t in terms:
                proof = forall_e(proof, t)
            if alpha_eq(proof.conclusion, f):
                return name, terms, proof
    return None


# ------------------------------------------------------------------ the pool

def _pattern_sources(base: AxiomBase, goal: Formula):
    yield from ((f, True) for _, f in base.named())
    yield goal, False


class GoalPool:
    """Positive-subformula instances of the axioms and the goal over a fixed
    finite term pool; membership is decided by matching, instances are
    enumerated on demand."""

    def __init__(self, base: AxiomBase, goal: Formula, terms: tuple[Term, ...]):
        self.base = base
        self.goal = goal
        self.terms = terms
        self.patterns: list[tuple[Formula, frozenset[str], bool]] = []
        seen: set[str] = set()
        for source, from_axiom in _pattern_sources(base, goal):
            rigid = free_vars(source)
            for sub, pol in subformula_polarities(source):
                if pol <= 0:
                    continue
                pv = frozenset(free_vars(sub) - rigid)
                key = canon_key(sub) + "/" + ",".join(sorted(pv)) + ("/ax" if from_axiom else "")
                if key not in seen:
                    seen.add(key)
                    self.patterns.append((sub, pv, from_axiom))

    def _pool_ok(self, binding) -> bool:
        # witness constants are admitted by matching, though instantiation
        # products never generate them (they only reach goals via the
        # existential elimination step or the goal text itself)
        return all(isinstance(t, (Var, WConst)) or t in self.terms
                   for t in binding.values())

    def _matches(self, f: Formula, axiom_only: bool) -> bool:
        for pat, pv, from_axiom in self.patterns:
            if axiom_only and not from_axiom:
                continue
            b = match(pat, f, pv)
            if b is not None and self._pool_ok(b):
                return True
        return False

    def contains(self, f: Formula) -> bool:
        return self._matches(f, axiom_only=False)

    def pos_sub_axiom(self, f: Formula) -> bool:
        return self._matches(f, axiom_only=True)

    def _instances(self, pat, pv, partial):
        """All full instantiations of the remaining pattern variables."""
        rest = sorted(pv - set(partial))
        for combo in itertools.product(self.terms, repeat=len(rest)):
            yield substitute_many(pat, {**partial, **dict(zip(rest, combo))})

    def _dedup(self, formulas):
        out: dict[str, Formula] = {}
        for f in formulas:
            out.setdefault(canon_key(f), f)
        return tuple(out[k] for k in sorted(out))

    def implications_into(self, f: Formula) -> tuple[Implies, ...]:
        found = []
        for pat, pv, _ in self.patterns:
            if not isinstance(pat, Implies):
                continue
            b = match(pat.right, f, pv)
            if b is None or not self._pool_ok(b):
                continue
            found.extend(self._instances(pat, pv, b))
        return self._dedup(i for i in found if alpha_eq(i.right, f))

    def conjunctions_containing(self, f: Formula):
        out = []
        seen = set()
        for pat, pv, _ in self.patterns:
            if not isinstance(pat, And):
                continue
            for sub, path in _and_positions(pat):
                b = match(sub, f, pv)
                if b is None or not self._pool_ok(b):
                    continue
                for inst in self._instances(pat, pv, b):
                    key = canon_key(inst) + "@" + path
                    if key not in seen:
                        seen.add(key)
                        out.append((inst, path))
        return tuple(sorted(out, key=lambda ip: (canon_key(ip[0]), ip[1])))

    def disjunctions(self) -> tuple[Or, ...]:
        found = []
        for pat, pv, _ in self.patterns:
            if isinstance(pat, Or) and _lem_shape(pat) is None:
                found.extend(self._instances(pat, pv, {}))
        return self._dedup(found)

    def existentials(self) -> tuple[Exists, ...]:
        found = []
        for pat, pv, _ in self.patterns:
            if not isinstance(pat, Exists):
                continue
            found.extend(i for i in self._instances(pat, pv, {})
                         if not free_vars(i) and free_vars(i.body) == {i.var})
        return self._dedup(found)


def _and_positions(f: Formula, path: str = ""):
    yield f, path
    if isinstance(f, And):
        yield from _and_positions(f.left, path + "l")
        yield from _and_positions(f.right, path + "r")


# -------------------------------------------------------------------- search

@dataclass
class SearchConfig:
    depth_bound: int = 12
    allow_efq: bool = False
    trace: bool = False
    memo: bool = True


@dataclass(frozen=True)
class SearchResult:
    proof: Proof | None
    depth_limited: bool  # True: the depth bound was hit somewhere relevant;
    # False on a negative verdict means the discipline itself ran dry, so no
    # larger bound would change the answer.
    trace: tuple[str, ...] = ()

    @property
    def verdict(self) -> str:
        return "proved" if self.proof is not None else "exhausted"


class _Memo:
    __slots__ = ("proved_depth", "proof", "exhausted_depth", "hit")

    def __init__(self):
        self.proved_depth: int | None = None
        self.proof: Proof | None = None
        self.exhausted_depth = -1
        self.hit = False


class Searcher:
    def __init__(self, base: AxiomBase, cfg: SearchConfig | None = None,
                 registry: WitnessRegistry | None = None):
        self.base = base
        self.cfg = cfg if cfg is not None else SearchConfig()
        self.registry = registry if registry is not None else WitnessRegistry()
        self.trace_lines: list[str] = []
        self.memo: dict[str, _Memo] = {}
        self.active: set[str] = set()
        self.cut_hits: set[str] = set()
        self.depth_hit = False
        self.pool: GoalPool | None = None
        self._impl_cache: dict[str, tuple] = {}
        self._conj_cache: dict[str, tuple] = {}
        self._axiom_cache: dict[str, bool] = {}
        self.param_vars: frozenset[str] = frozenset()
        self.witness_terms: tuple[WConst, ...] = ()
        self._disjunctions: tuple = ()
        self._existentials: tuple = ()

    # -- setup ------------------------------------------------------------

    def setup(self, goal: Formula) -> None:
        terms: dict[str, Term] = {"0": Const("0")}
        sources = (goal,) + self.base.extras
        for src in sources:
            for t in formula_terms(src):
                terms[term_text(t)] = t
            for v in sorted(free_vars(src)):
                terms[v] = Var(v)
        self.param_vars = frozenset(v for src in sources for v in free_vars(src))
        self.pool = GoalPool(self.base, goal,
                             tuple(terms[k] for k in sorted(terms)))
        # one witness constant per existential formula in the pool; these are
        # additional single-witness choices, not instantiation-product terms
        self._existentials = self.pool.existentials()
        self.witness_terms = tuple(
            WConst(self.registry.register(ex.body, ex.var))
            for ex in self._existentials)
        self._disjunctions = self.pool.disjunctions()

    def search(self, goal: Formula) -> SearchResult:
        self.setup(goal)
        proof = self.prove(goal, self.cfg.depth_bound)
        if proof is not None:
            check_proof(proof, NON_HYPOTHETICAL, registry=self.registry)
        return SearchResult(proof, self.depth_hit and proof is None,
                            tuple(self.trace_lines))

    # -- helpers ----------------------------------------------------------

    def _trace(self, depth, attempt, goal, verdict):
        if self.cfg.trace:
            self.trace_lines.append(
                f"{depth}\t{attempt}\t{formula_text(goal)}\t{verdict}")

    def is_axiom(self, f: Formula) -> bool:
        key = canon_key(f)
        if key not in self._axiom_cache:
            self._axiom_cache[key] = is_axiom(f, self.base)
        return self._axiom_cache[key]

    def axiom_proof(self, f: Formula) -> Proof:
        tvars, matrix = strip_foralls(f)
        inst = _lem_shape(matrix)
        if inst is not None and not any(alpha_eq(f, ax) for _, ax in self.base.named()):
            proof = lem(inst)
            for v in reversed(tvars):
                proof = forall_i(proof, v, ForAll(v, proof.conclusion))
            return proof
        return assume(f)

    def axiomatic(self, p: Proof) -> bool:
        j = check_proof(p, NON_HYPOTHETICAL, registry=self.registry)
        return all(self.is_axiom(a) for a in j.assumptions)

    def _implications_into(self, f: Formula):
        key = canon_key(f)
        if key not in self._impl_cache:
            self._impl_cache[key] = self.pool.implications_into(f)
        return self._impl_cache[key]

    def _conjunctions_containing(self, f: Formula):
        key = canon_key(f)
        if key not in self._conj_cache:
            self._conj_cache[key] = self.pool.conjunctions_containing(f)
        return self._conj_cache[key]

    # -- the dispatch (axiom, then intro, then elim) ------------------------

    def prove(self, f: Formula, depth: int) -> Proof | None:
        key = canon_key(f)
        if self.cfg.memo:
            ent = self.memo.get(key)
            if ent is not None:
                if ent.proved_depth is not None and ent.proved_depth <= depth:
                    return ent.proof
                if ent.exhausted_depth >= depth:
                    if ent.hit:
                        self.depth_hit = True
                    return None
        if depth <= 0:
            self.depth_hit = True
            self._trace(depth, "bound", f, "exhausted")
            return None
        if key in self.active:
            # in-progress goal: cut the loop (a least proof never needs the
            # goal as its own proper subgoal)
            self.cut_hits.add(key)
            return None
        self.active.add(key)
        hit_before = self.depth_hit
        self.depth_hit = False
        try:
            proof = self._prove(f, depth)
        finally:
            self.active.discard(key)
        hit_here = self.depth_hit
        self.depth_hit = hit_before or hit_here
        # a negative result obtained while an enclosing goal was loop-cut is
        # contingent on the stack and must not be cached
        cacheable = proof is not None or not (self.cut_hits & self.active)
        self.cut_hits.discard(key)
        if self.cfg.memo and cacheable:
            ent = self.memo.setdefault(key, _Memo())
            if proof is not None:
                if ent.proved_depth is None or depth < ent.proved_depth:
                    ent.proved_depth = depth
                    ent.proof = proof
            else:
                ent.exhausted_depth = max(ent.exhausted_depth, depth)
                ent.hit = ent.hit or hit_here
        return proof

    def _prove(self, f: Formula, depth: int) -> Proof | None:
        if self.is_axiom(f):
            self._trace(depth, "axiom", f, "proved")
            return self.axiom_proof(f)
        self._trace(depth, "axiom", f, "failed")
        p = self.prove_intro(f, depth)
        if p is not None and self.axiomatic(p):
            self._trace(depth, "intro", f, "proved")
            return p
        self._trace(depth, "intro", f, "failed")
        p = self.prove_elim(f, depth)
        if p is not None and self.axiomatic(p):
            self._trace(depth, "elim", f, "proved")
            return p
        self._trace(depth, "elim", f, "failed")
        return None

    # -- introduction steps -------------------------------------------------

    def prove_intro(self, f: Formula, depth: int) -> Proof | None:
        if isinstance(f, And):
            left = self.prove(f.left, depth - 1)
            if left is None:
                return None
            right = self.prove(f.right, depth - 1)
            if right is None:
                return None
            return and_i(left, right)
        if isinstance(f, Or):
            left = self.prove(f.left, depth - 1)
            if left is not None:
                return or_i_l(left, f.right)
            right = self.prove(f.right, depth - 1)
            if right is not None:
                return or_i_r(right, f.left)
            return None
        if isinstance(f, ForAll):
            avoid = free_vars(f) | free_vars(f.body) | self.param_vars
            v = fresh_var(f.var, avoid)
            sub = self.prove(substitute(f.body, f.var, Var(v)), depth - 1)
            if sub is not None:
                return forall_i(sub, v, f)
            return None
        if isinstance(f, Exists):
            for t in self.pool.terms + self.witness_terms:
                sub = self.prove(substitute(f.body, f.var, t), depth - 1)
                if sub is not None:
                    return exists_i(sub, f, t)
            return None
        return None  # no introduction step exists for atoms, falsum, implications

    # -- elimination steps ---------------------------------------------------

    def prove_elim(self, f: Formula, depth: int) -> Proof | None:
        if not self.pool.contains(f):
            self._trace(depth, "elim-gate", f, "failed")
            return None
        got = uni(f, self.base, self.pool.terms)
        if got is not None:
            self._trace(depth, "uni", f, "proved")
            return got[2]
        impls = self._implications_into(f)
        by_antecedent = {canon_key(i.left): i for i in impls}
        # implication elimination
        for cand in impls:
            major = self.prove(cand, depth - 1)
            if major is None:
                continue
            minor = self.prove(cand.left, depth - 1)
            if minor is None:
                continue
            self._trace(depth, "imp_e", f, "proved")
            return imp_e(major, minor)
        # conjunction projection, only when it closes the goal directly
        for conj, path in self._conjunctions_containing(f):
            if alpha_eq(conj, f):
                continue
            sub = self.prove(conj, depth - 1)
            if sub is None:
                continue
            for side in path:
                sub = and_e_l(sub) if side == "l" else and_e_r(sub)
            if alpha_eq(sub.conclusion, f):
                self._trace(depth, "and_e", f, "proved")
                return sub
        # disjunction cases
        for disj in self._disjunctions:
            li = by_antecedent.get(canon_key(disj.left))
            ri = by_antecedent.get(canon_key(disj.right))
            if li is None or ri is None:
                continue
            dp = self.prove(disj, depth - 1)
            if dp is None:
                continue
            lp = self.prove(li, depth - 1)
            rp = self.prove(ri, depth - 1) if lp is not None else None
            if lp is not None and rp is not None:
                self._trace(depth, "or_e_nh", f, "proved")
                return or_e_nh(dp, lp, rp)
        # excluded-middle cases
        if self.base.lem:
            for cand in impls:
                partner = by_antecedent.get(canon_key(neg(cand.left)))
                if partner is None:
                    continue
                lp = self.prove(cand, depth - 1)
                rp = self.prove(partner, depth - 1) if lp is not None else None
                if lp is not None and rp is not None:
                    self._trace(depth, "lem_or_e_nh", f, "proved")
                    return or_e_nh(lem(cand.left), lp, rp)
        # existential cases over registered witness constants
        for ex in self._existentials:
            k = self.registry.canonical_id(ex.body, ex.var)
            if k is None:
                continue
            impl = Implies(substitute(ex.body, ex.var, WConst(k)), f)
            if not self.pool.contains(impl):
                continue
            ep = self.prove(ex, depth - 1)
            if ep is None:
                continue
            ip = self.prove(impl, depth - 1)
            if ip is None:
                continue
            self._trace(depth, "exists_e_nh", f, "proved")
            return exists_e_nh(ep, ip)
        if self.cfg.allow_efq and f != FALSUM:
            bp = self.prove(FALSUM, depth - 1)
            if bp is not None:
                self._trace(depth, "efq", f, "proved")
                return efq(bp, f)
        return None


# ----------------------------------------------------------- module surface

def prove(f: Formula, base: AxiomBase, cfg: SearchConfig | None = None,
          registry: WitnessRegistry | None = None) -> SearchResult:
    return Searcher(base, cfg, registry).search(f)


def prove_intro(f: Formula, base: AxiomBase, cfg: SearchConfig | None = None,
                registry: WitnessRegistry | None = None) -> Proof | None:
    s = Searcher(base, cfg, registry)
    s.setup(f)
    return s.prove_intro(f, s.cfg.depth_bound)


def prove_elim(f: Formula, base: AxiomBase, cfg: SearchConfig | None = None,
               registry: WitnessRegistry | None = None) -> Proof | None:
    s = Searcher(base, cfg, registry)
    s.setup(f)
    return s.prove_elim(f, s.cfg.depth_bound)
