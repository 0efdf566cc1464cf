import pytest

from intentic.kernel import (
    NON_HYPOTHETICAL, check_proof, checks,
)
from intentic.pasearch import (
    GoalPool, SearchConfig, Searcher, is_axiom, match, prove, prove_elim,
    prove_intro, relational_pa, strip_foralls, uni,
)
from intentic.syntax import (
    Const, PA_SIGNATURE, Var, WitnessRegistry, alpha_eq, canon_key,
    formula_text, parse,
)

SIG = PA_SIGNATURE
BASE = relational_pa()


def F(t, reg=None):
    return parse(t, SIG, reg)


# ------------------------------------------------------------------ matching

def test_strip_foralls():
    vs, m = strip_foralls(F("forall x. forall y. S(x, y)"))
    assert vs == ("x", "y") and m == F("S(x, y)")


def test_match_binds_terms():
    pat = F("S(x, y)")
    b = match(pat, F("S(0, 0)"), {"x", "y"})
    assert b == {"x": Const("0"), "y": Const("0")}
    assert match(pat, F("Add(0, 0, 0)"), {"x", "y"}) is None


def test_match_respects_binders():
    pat = F("exists y. S(x, y)")
    assert match(pat, F("exists z. S(0, z)"), {"x"}) == {"x": Const("0")}
    # bound target variables are not terms
    assert match(F("S(x, y)"), F("exists z. S(z, z)").body, {"x"}) is None


# --------------------------------------------------------------- axiom oracle

def test_is_axiom_closed_axioms():
    assert is_axiom(F("forall x. exists y. S(x, y)"), BASE)
    assert is_axiom(F("forall z. Add(z, 0, z)"), BASE)  # alpha-variant
    assert not is_axiom(F("S(0, 0)"), BASE)
    assert not is_axiom(F("exists y. S(0, y)"), BASE)  # constant instance


def test_is_axiom_variable_renaming_and_closure():
    # injectively renamed + reclosed instance
    assert is_axiom(F("forall u. forall v. u = v -> v = u"), BASE)
    # non-injective renaming under closure
    assert is_axiom(F("forall x. x = x -> x = x"), BASE)


def test_is_axiom_lem_instances():
    assert is_axiom(F("(exists y. S(0, y)) | ~exists y. S(0, y)"), BASE)
    assert is_axiom(F("forall x. S(x, 0) | ~S(x, 0)"), BASE)
    assert not is_axiom(F("S(0, 0) | ~Add(0, 0, 0)"), BASE)
    no_lem = relational_pa(lem=False)
    assert not is_axiom(F("S(0, 0) | ~S(0, 0)"), no_lem)


def test_is_axiom_ind_instances():
    ind = F("0 = 0 & (forall y. forall w. S(y, w) & y = y -> w = w) "
            "-> forall x. x = x")
    assert is_axiom(ind, BASE)
    broken = F("0 = 0 & (forall y. forall w. S(y, w) & y = y -> w = w) "
               "-> forall x. S(x, x)")
    assert not is_axiom(broken, BASE)
    assert not is_axiom(ind, relational_pa(ind=False))


def test_uni_instances():
    name, terms, proof = uni(F("exists y. S(0, y)"), BASE)
    assert name == "SF1" and terms == (Const("0"),)
    assert checks(proof, NON_HYPOTHETICAL)
    name, terms, proof = uni(F("Add(0, 0, 0)"), BASE)
    assert name == "A1" and terms == (Const("0"),)
    assert uni(F("S(0, 0)"), BASE) is None


def test_uni_partial_chain():
    name, terms, proof = uni(F("forall y. exists z. Add(0, y, z)"), BASE)
    assert name == "AF1" and terms == (Const("0"),)
    j = check_proof(proof, NON_HYPOTHETICAL)
    assert alpha_eq(j.conclusion, F("forall y. exists z. Add(0, y, z)"))


# ----------------------------------------------------------------- goal pool

def test_goal_pool_membership():
    s = Searcher(BASE)
    s.setup(F("S(0, 0)"))
    assert s.pool.contains(F("S(0, 0)"))
    assert s.pool.pos_sub_axiom(F("exists y. S(0, y)"))
    assert s.pool.contains(F("0 = 0"))
    assert not s.pool.contains(F("S(0, 0) & (S(0, 0) & S(0, 0))"))


def test_goal_pool_negative_polarity_excluded():
    s = Searcher(BASE)
    s.setup(F("0 = 0"))
    # the antecedent of S1 occurs only negatively
    assert not s.pool.pos_sub_axiom(F("S(0, 0) -> false"))
    # but falsum itself occurs positively (consequent of S1)
    assert s.pool.pos_sub_axiom(F("false"))


# -------------------------------------------------------------------- search

def test_prove_axiom_leaf():
    res = prove(F("forall x. exists y. S(x, y)"), BASE)
    assert res.verdict == "proved"
    assert res.proof.rule == "assume"


def test_prove_exists_via_elimination():
    reg = WitnessRegistry()
    res = prove(F("exists y. S(0, y)"), BASE, registry=reg)
    assert res.verdict == "proved"
    rules = [n.rule for n in res.proof.nodes()]
    assert "forall_e" in rules
    assert checks(res.proof, NON_HYPOTHETICAL, registry=reg)


def test_prove_exists_intro_with_pool_witness():
    reg = WitnessRegistry()
    res = prove(F("exists z. Add(0, 0, z)"), BASE, registry=reg)
    assert res.verdict == "proved"
    assert res.proof.rule == "exists_i"
    assert res.proof.witness == Const("0")


def test_prove_conjunction_intro():
    res = prove(F("0 = 0 & Add(0, 0, 0)"), BASE)
    assert res.verdict == "proved"
    assert res.proof.rule == "and_i"


def test_prove_negative_goals():
    for t in ("S(0, 0)", "false", "0 = 0 -> S(0, 0)"):
        res = prove(F(t), BASE)
        assert res.verdict == "exhausted", t
    res = prove(F("0 = 0"), relational_pa(omit=("E1", "AF2", "MF2")))
    assert res.verdict == "exhausted"


def test_equality_derivable_from_functionality():
    # without reflexivity, 0 = 0 still follows from A1 and functionality
    res = prove(F("0 = 0"), relational_pa(omit=("E1",)))
    assert res.verdict == "proved"
    rules = {n.rule for n in res.proof.nodes()}
    assert "imp_e" in rules


def test_no_implication_intro_in_outputs():
    goals = ["forall x. x = x", "exists y. S(0, y)", "exists z. Add(0, 0, z)",
             "0 = 0", "0 = 0 & 0 = 0"]
    for t in goals:
        reg = WitnessRegistry()
        res = prove(F(t), BASE, registry=reg)
        assert res.proof is not None
        assert all(n.rule not in ("imp_i", "or_e", "exists_e")
                   for n in res.proof.nodes()), t


def test_outputs_axiomatic_and_checked():
    for t in ("forall x. ~S(x, 0)", "exists y. S(0, y)", "0 = 0"):
        reg = WitnessRegistry()
        s = Searcher(BASE, SearchConfig(), reg)
        res = s.search(F(t))
        assert res.proof is not None
        assert s.axiomatic(res.proof), t


def test_subformula_discipline():
    # every formula in a returned proof is in the pool or an axiom instance
    reg = WitnessRegistry()
    s = Searcher(BASE, SearchConfig(), reg)
    res = s.search(F("exists y. S(0, y)"))
    for node in res.proof.nodes():
        f = node.conclusion
        ok = (s.pool.contains(f) or s.is_axiom(f)
              or uni(f, BASE, None) is not None)
        assert ok, formula_text(f)


def test_z_uniqueness_from_extras():
    extras = [F("S(0, y)"), F("S(0, z)")]
    base = relational_pa(extras=extras)
    reg = WitnessRegistry()
    res = prove(F("y = z"), base, registry=reg)
    assert res.verdict == "proved"
    j = check_proof(res.proof, NON_HYPOTHETICAL, registry=reg)
    assert alpha_eq(j.conclusion, F("y = z"))
    rules = [n.rule for n in res.proof.nodes()]
    assert "imp_e" in rules


def test_exists_elimination_step_end_to_end():
    extras = [F("forall y. S(0, y) -> 0 = 0")]
    base = relational_pa(extras=extras, omit=("E1", "AF2", "MF2"))
    reg = WitnessRegistry()
    res = prove(F("0 = 0"), base, registry=reg)
    assert res.verdict == "proved"
    rules = [n.rule for n in res.proof.nodes()]
    assert "exists_e_nh" in rules
    assert checks(res.proof, NON_HYPOTHETICAL, registry=reg)


def test_lem_elimination_step():
    extras = [F("S(0, 0) -> Mul(0, 0, 0)"),
              F("~S(0, 0) -> Mul(0, 0, 0)")]
    base = relational_pa(extras=extras, omit=("M1",))
    reg = WitnessRegistry()
    res = prove(F("Mul(0, 0, 0)"), base, registry=reg)
    assert res.verdict == "proved"
    rules = [n.rule for n in res.proof.nodes()]
    assert "or_e_nh" in rules and "lem" in rules


def test_disjunction_elimination_step():
    extras = [F("S(0, 0) | Add(0, 0, 0)"),
              F("S(0, 0) -> exists z. Add(0, 0, z)"),
              F("Add(0, 0, 0) -> exists z. Add(0, 0, z)")]
    base = relational_pa(extras=extras, omit=("A1", "AF1"))
    reg = WitnessRegistry()
    res = prove(F("exists z. Add(0, 0, z)"), base, registry=reg)
    assert res.verdict == "proved"
    assert "or_e_nh" in [n.rule for n in res.proof.nodes()]


def test_conjunction_projection_step():
    extras = [F("S(0, 0) & 0 = 0")]
    base = relational_pa(extras=extras, omit=("E1", "AF2", "MF2"))
    res = prove(F("S(0, 0)"), base)
    assert res.verdict == "proved"
    assert res.proof.rule in ("and_e_l", "and_e_r")


def test_efq_flag():
    extras = [F("false")]
    base = relational_pa(extras=extras)
    goal = F("S(0, 0)")
    assert prove(goal, base).verdict == "exhausted"
    res = prove(goal, base, SearchConfig(allow_efq=True))
    assert res.verdict == "proved"
    assert res.proof.rule == "efq"


def test_intro_has_no_implication_case():
    assert prove_intro(F("S(0, 0) -> S(0, 0)"), BASE) is None


def test_elim_gate_rejects_foreign_goals():
    s = Searcher(BASE)
    s.setup(F("0 = 0"))
    # a conjunction shape that no axiom or goal contains positively
    foreign = F("S(0, 0) & (S(0, 0) & (S(0, 0) & S(0, 0)))")
    assert s.prove_elim(foreign, 12) is None


def test_depth_bound_reported():
    res = prove(F("S(0, 0)"), BASE, SearchConfig(depth_bound=1))
    assert res.verdict == "exhausted"
    assert res.depth_limited


def test_memo_transparency():
    goals = ["exists y. S(0, y)", "S(0, 0)", "0 = 0", "false",
             "exists z. Mul(0, 0, z)", "0 = 0 & 0 = 0"]
    for t in goals:
        g = F(t)
        with_memo = prove(g, BASE, SearchConfig(memo=True), WitnessRegistry())
        without = prove(g, BASE, SearchConfig(memo=False), WitnessRegistry())
        assert (with_memo.proof is None) == (without.proof is None), t


def test_trace_format():
    s = Searcher(BASE, SearchConfig(trace=True))
    res = s.search(F("0 = 0"))
    assert res.trace
    for line in res.trace:
        parts = line.split("\t")
        assert len(parts) == 4
        assert parts[0].lstrip("-").isdigit()


def test_witness_registration_bounded():
    reg = WitnessRegistry()
    prove(F("exists y. S(0, y)"), BASE, registry=reg)
    # one witness constant per existential pool formula, none nested
    assert len(reg) == 3
