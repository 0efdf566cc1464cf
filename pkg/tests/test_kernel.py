import random

import pytest

from intentic.kernel import (
    CLASSICAL, DISCHARGING_RULES, NON_HYPOTHETICAL, Proof, ProofError,
    and_e_l, and_i, assume, axiomatic, check_proof, checks, exists_e,
    exists_e_nh, exists_i, forall_e, forall_i, imp_e, imp_i, lem, or_e,
    or_e_nh, or_i_l,
)
from intentic.syntax import (
    Const, DEMO_SIGNATURE, Implies, Or, Var, WConst, WitnessRegistry,
    alpha_eq, canon_key, neg, parse,
)
from corpus import classical_corpus, gen_proof

SIG = DEMO_SIGNATURE


def F(t):
    return parse(t, SIG)


def test_assumption_leaf_both_logics():
    p = assume(F("P(x)"))
    for logic in (CLASSICAL, NON_HYPOTHETICAL):
        j = check_proof(p, logic)
        assert j.assumptions == (F("P(x)"),)
        assert j.conclusion == F("P(x)")


def test_imp_i_classical_only():
    p = imp_i(assume(F("P(c)"), "a"), F("P(c)"), discharge="a")
    j = check_proof(p, CLASSICAL)
    assert j.assumptions == ()
    with pytest.raises(ProofError) as exc:
        check_proof(p, NON_HYPOTHETICAL)
    assert "imp_i" in str(exc.value)


def test_or_e_nh_judgment():
    p = or_e_nh(assume(F("P(c) | Q(c)")),
                assume(F("P(c) -> R(c)")), assume(F("Q(c) -> R(c)")))
    j = check_proof(p, NON_HYPOTHETICAL)
    assert j.conclusion == F("R(c)")
    assert {canon_key(a) for a in j.assumptions} == \
        {canon_key(F(t)) for t in ("P(c) | Q(c)", "P(c) -> R(c)", "Q(c) -> R(c)")}


def test_or_e_nh_mismatched_consequents_rejected():
    p = or_e_nh(assume(F("P(c) | Q(c)")),
                assume(F("P(c) -> R(c)")), assume(F("Q(c) -> R(c1)")))
    with pytest.raises(ProofError):
        check_proof(p, NON_HYPOTHETICAL)


def _registered(matrix_text="P(x)"):
    reg = WitnessRegistry()
    k = reg.register(F(matrix_text), "x")
    return reg, k


def test_exists_e_nh_accepts_registered_constant():
    reg, k = _registered()
    p = exists_e_nh(assume(F("exists x. P(x)")),
                    assume(Implies(F(f"P(#{k})"), F("Q(c)"))))
    j = check_proof(p, NON_HYPOTHETICAL, registry=reg)
    assert j.conclusion == F("Q(c)")


def test_exists_e_nh_wrong_constant_rejected():
    reg = WitnessRegistry()
    reg.register(F("P(x)"), "x")
    other = reg.register(F("Q(x)"), "x")
    p = exists_e_nh(assume(F("exists x. P(x)")),
                    assume(Implies(F(f"P(#{other})"), F("Q(c)"))))
    with pytest.raises(ProofError) as exc:
        check_proof(p, NON_HYPOTHETICAL, registry=reg)
    assert "witness constant" in str(exc.value)


def test_exists_e_nh_variant_constant_accepted():
    reg, k = _registered()
    k2 = reg.register_variant(F("P(x)"), "x")
    p = exists_e_nh(assume(F("exists x. P(x)")),
                    assume(Implies(F(f"P(#{k2})"), F("Q(c)"))))
    check_proof(p, NON_HYPOTHETICAL, registry=reg)


def test_exists_e_nh_open_matrix_rejected():
    reg, _ = _registered()
    p = exists_e_nh(assume(F("exists x. S(x, y)")),
                    assume(Implies(F("S(c, y)"), F("Q(c)"))))
    with pytest.raises(ProofError):
        check_proof(p, NON_HYPOTHETICAL, registry=reg)


def test_lem_shape():
    check_proof(lem(F("P(c)")), NON_HYPOTHETICAL)
    bad = Proof("lem", F("P(c) | Q(c)"))
    with pytest.raises(ProofError):
        check_proof(bad, CLASSICAL)


def test_forall_i_eigenvariable_conditions():
    open_gamma = assume(F("P(a)"))
    bad = forall_i(open_gamma, "a", F("forall x. P(x)"))
    with pytest.raises(ProofError) as exc:
        check_proof(bad, CLASSICAL)
    assert "eigenvariable" in str(exc.value)
    bad2 = forall_i(forall_e(assume(F("forall x. S(x, a)")), Var("a")),
                    "a", F("forall x. S(x, a)"))
    with pytest.raises(ProofError):
        check_proof(bad2, CLASSICAL)


def test_exists_e_eigenvariable_conditions():
    maj = assume(F("exists x. P(x)"))
    minor = assume(F("P(a)"), "w")
    bad = exists_e(maj, minor, var="a", discharge=None)  # a free in conclusion
    with pytest.raises(ProofError):
        check_proof(bad, CLASSICAL)


def test_discharge_label_binds_matching_formulas_only():
    p = imp_i(and_i(assume(F("P(c)"), "a"), assume(F("Q(c)"), "a")),
              F("P(c)"), discharge="a")
    with pytest.raises(ProofError) as exc:
        check_proof(p, CLASSICAL)
    assert "binds" in str(exc.value)


def test_forall_e_and_exists_i_term_instances():
    p = forall_e(assume(F("forall x. S(x, x)")), Const("c"))
    assert check_proof(p, NON_HYPOTHETICAL).conclusion == F("S(c, c)")
    q = exists_i(assume(F("S(c, c1)")), F("exists y. S(c, y)"), Const("c1"))
    check_proof(q, NON_HYPOTHETICAL)
    bad = exists_i(assume(F("S(c, c1)")), F("exists y. S(y, y)"), Const("c"))
    with pytest.raises(ProofError):
        check_proof(bad, CLASSICAL)


def test_error_paths_point_at_nodes():
    inner = Proof("and_e_l", F("P(c)"), (assume(F("Q(c)")),))
    p = and_i(assume(F("P(c)")), inner)
    with pytest.raises(ProofError) as exc:
        check_proof(p, CLASSICAL)
    assert exc.value.path == (1,)


def test_nh_subset_classical_on_generated(seed=5, n=150):
    rng = random.Random(seed)
    reg = WitnessRegistry()
    for _ in range(n):
        p = gen_proof(rng, rng.randrange(1, 5), discharge=rng.random() < 0.5,
                      registry=reg)
        if checks(p, NON_HYPOTHETICAL, registry=reg):
            jn = check_proof(p, NON_HYPOTHETICAL, registry=reg)
            jc = check_proof(p, CLASSICAL, registry=reg)
            assert jn == jc


def test_discharge_rules_rejected_nh_on_corpus():
    for name, _, p in classical_corpus():
        if any(n.rule in DISCHARGING_RULES for n in p.nodes()):
            assert not checks(p, NON_HYPOTHETICAL), name


def test_check_deterministic():
    p = or_e_nh(assume(F("P(c) | Q(c)")),
                assume(F("P(c) -> R(c)")), assume(F("Q(c) -> R(c)")))
    assert check_proof(p, NON_HYPOTHETICAL) == check_proof(p, NON_HYPOTHETICAL)


def test_weakening_unused_leaf():
    base = imp_e(assume(F("P(c) -> Q(c)")), assume(F("P(c)")))
    extra = F("R(c2)")
    weakened = and_e_l(and_i(base, assume(extra)))
    j0 = check_proof(base, NON_HYPOTHETICAL)
    j1 = check_proof(weakened, NON_HYPOTHETICAL)
    assert j1.conclusion == j0.conclusion
    assert set(j0.assumptions) <= set(j1.assumptions)
    assert extra in j1.assumptions


def test_axiomatic():
    closed = imp_i(assume(F("P(c)"), "a"), F("P(c)"), discharge="a")
    assert axiomatic(closed, lambda f: False, logic=CLASSICAL)
    sf1 = F("forall x. exists y. S(x, y)")
    p = assume(sf1)
    assert axiomatic(p, lambda f: alpha_eq(f, sf1))
    assert not axiomatic(assume(F("S(0, 0)")), lambda f: alpha_eq(f, sf1))
