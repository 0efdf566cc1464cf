import pytest

from intentic.kernel import assume, imp_e
from intentic.states import (
    BasicState, Edge, FineExtensionError, IntenticState, Path, StateError,
    app, app_at, boost, check_fine_ext, compose_fine_certs, identity_cert,
    is_fine_ext, leaf, make_edge, rep, struct_key, validate_state,
    verify_fine_cert,
)
from intentic.syntax import And, DEMO_SIGNATURE, TOP, alpha_eq, parse

SIG = DEMO_SIGNATURE


def F(t):
    return parse(t, SIG)


def B(*texts):
    return BasicState.of(F(t) for t in texts)


def child_of(base, hyp_text):
    hyp = F(hyp_text)
    return make_edge(base, hyp, leaf(base.add(hyp)))


def test_basic_state_canonical():
    b1 = B("Q(c)", "P(c)", "P(c)")
    b2 = B("P(c)", "Q(c)")
    assert b1 == b2
    assert b1.generators == b2.generators
    # alpha-variants are deduplicated
    b3 = BasicState.of([F("forall x. P(x)"), F("forall y. P(y)")])
    assert len(b3.generators) == 1


def test_canonicalization_idempotent():
    b = B("R(c)", "P(c)")
    assert BasicState.of(b.generators) == b


def test_sigma_right_nested():
    b = B("P(c)", "Q(c)", "R(c)")
    g = b.generators
    assert b.sigma == And(g[0], And(g[1], g[2]))
    assert B("P(c)").sigma == F("P(c)")
    assert B().sigma == TOP


def test_sigma_regenerates():
    # each generator recoverable from sigma by conjunction projections, and
    # sigma derivable from the generators
    from intentic.frames import _sigma_projection, sigma_witness
    from intentic.kernel import NON_HYPOTHETICAL, check_proof
    from intentic.syntax import canon_key
    b = B("P(c)", "Q(c)", "R(c)")
    for g in b.generators:
        j = check_proof(_sigma_projection(b, g), NON_HYPOTHETICAL)
        assert canon_key(j.conclusion) == canon_key(g)
        assert all(canon_key(a) == canon_key(b.sigma) for a in j.assumptions)
    w = sigma_witness(leaf(b), b)
    j = check_proof(w.closing, NON_HYPOTHETICAL)
    assert canon_key(j.conclusion) == canon_key(b.sigma)


def test_app_empty_is_identity():
    u = leaf(B("P(c)"))
    assert app(u, []) == u


def test_app_single_child():
    base = B("P(c)")
    u = leaf(base)
    v = app(u, [child_of(base, "Q(c)")])
    assert len(v.children) == 1
    assert v.children[0].child.base == B("P(c)", "Q(c)")
    validate_state(v)


def test_app_validates_edges():
    base = B("P(c)")
    bad = Edge(F("Q(c)"), leaf(B("R(c2)")), (assume(F("R(c2)")),))
    with pytest.raises(StateError):
        app(leaf(base), [bad])


def test_edge_connection_proofs_checked():
    base = B("P(c)")
    hyp = F("Q(c)")
    child = leaf(B("P(c)", "Q(c)", "R(c)"))
    with pytest.raises(StateError):
        app(leaf(base), [make_edge(base, hyp, child)])  # R(c) not derivable
    conn = (assume(F("P(c)")), assume(F("Q(c)")),
            imp_e(assume(F("Q(c) -> R(c)")), assume(F("Q(c)"))))
    with pytest.raises(StateError):
        # implication assumption is neither a generator nor the hypothesis
        app(leaf(base), [Edge(hyp, child, conn)])


def test_connection_proofs_may_derive_generators():
    base = B("P(c)", "Q(c) -> R(c)")
    hyp = F("Q(c)")
    child = leaf(B("P(c)", "Q(c)", "R(c)"))
    conn = []
    for g in child.base.generators:
        if base.contains(g) or alpha_eq(g, hyp):
            conn.append(assume(g))
        else:
            conn.append(imp_e(assume(F("Q(c) -> R(c)")), assume(F("Q(c)"))))
    v = app(leaf(base), [Edge(hyp, child, tuple(conn))])
    validate_state(v)


def test_children_canonical_and_deduped():
    base = B("P(c)")
    e = child_of(base, "Q(c)")
    u = IntenticState(base, (e, e, child_of(base, "R(c)")))
    assert len(u.children) == 2
    keys = [c.sort_key() for c in u.children]
    assert keys == sorted(keys)


def test_rep_identity_replacement():
    base = B("P(c)")
    u = app(leaf(base), [child_of(base, "Q(c)")])
    child = u.children[0].child
    v = rep(Path(u, (0,)), child)
    assert v == u


def test_rep_zero_length_path():
    u = leaf(B("P(c)"))
    v = app(u, [child_of(u.base, "Q(c)")])
    assert rep(Path(u, ()), v) == v


def test_rep_requires_fine_extension():
    base = B("P(c)")
    u = app(leaf(base), [child_of(base, "Q(c)")])
    stranger = leaf(B("R(c2)"))
    with pytest.raises(FineExtensionError):
        rep(Path(u, (0,)), stranger)


def test_rep_depth_two_with_app_extension():
    base = B("P(c)")
    u = leaf(base)
    u = app(u, [child_of(base, "Q(c)")])
    c1 = u.children[0].child
    u = rep(Path(u, (0,)), app(c1, [child_of(c1.base, "R(c)")]))
    end = u.children[0].child.children[0].child
    ext = app(end, [child_of(end.base, "P(c1)")])
    v = rep(Path(u, (0, 0)), ext)
    cert = check_fine_ext(u, v)
    verify_fine_cert(u, v, cert)
    validate_state(v)


def test_app_along_path():
    base = B("P(c)")
    u = app(leaf(base), [child_of(base, "Q(c)")])
    mid = u.children[0].child
    v = app_at(Path(u, (0,)), [child_of(mid.base, "R(c)")])
    assert is_fine_ext(u, v)
    assert v.children[0].child.children
    validate_state(v)


def test_path_connectors():
    base = B("P(c)")
    u = app(leaf(base), [child_of(base, "Q(c)")])
    mid = u.children[0].child
    u2 = rep(Path(u, (0,)), app(mid, [child_of(mid.base, "R(c)")]))
    p = Path(u2, (0, 0))
    assert [str(c) for c in p.connectors()] == ["Q(c)", "R(c)"]
    assert p.end().base == B("P(c)", "Q(c)", "R(c)")
    with pytest.raises(ValueError):
        Path(u2, (0, 5))


def test_boost_leaf():
    u = leaf(B("P(c)"))
    assert boost(u, B("Q(c)")) == leaf(B("P(c)", "Q(c)"))
    assert boost(u, B()) == u


def test_boost_recurses_and_keeps_hypotheses():
    base = B("P(c)")
    u = app(leaf(base), [child_of(base, "Q(c)")])
    v = boost(u, B("R(c)"))
    assert v.base == B("P(c)", "R(c)")
    edge = v.children[0]
    assert alpha_eq(edge.hypothesis, F("Q(c)"))
    assert edge.child.base == B("P(c)", "Q(c)", "R(c)")
    validate_state(v)


def test_boost_distributes_over_app():
    base = B("P(c)")
    u = app(leaf(base), [child_of(base, "Q(c)")])
    extra = [child_of(base, "R(c)"), child_of(base, "P(c1)")]
    c = B("Q(c2)")
    left = boost(app(u, extra), c)
    from intentic.states import _boost_edge
    right = app(boost(u, c), [_boost_edge(e, c) for e in extra])
    assert left == right


def test_fine_ext_reflexive():
    base = B("P(c)")
    u = app(leaf(base), [child_of(base, "Q(c)")])
    cert = check_fine_ext(u, u)
    verify_fine_cert(u, u, cert)
    assert cert == identity_cert(u)


def test_fine_ext_superset_children():
    base = B("P(c)")
    u = app(leaf(base), [child_of(base, "Q(c)")])
    v = app(u, [child_of(base, "R(c)")])
    verify_fine_cert(u, v, check_fine_ext(u, v))
    assert not is_fine_ext(v, u)


def test_fine_ext_rejects_unmatchable_child():
    base = B("P(c)")
    u = app(leaf(base), [child_of(base, "Q(c)")])
    v = app(leaf(base), [child_of(base, "R(c)")])
    with pytest.raises(FineExtensionError) as exc:
        check_fine_ext(u, v)
    assert exc.value.path == (0,)


def test_fine_ext_rejects_base_mismatch():
    with pytest.raises(FineExtensionError):
        check_fine_ext(leaf(B("P(c)")), leaf(B("Q(c)")))


def test_fine_ext_transitivity_and_composition():
    base = B("P(c)")
    u = app(leaf(base), [child_of(base, "Q(c)")])
    v = app(u, [child_of(base, "R(c)")])
    mid = v.children[0].child
    w = app_at(Path(v, (0,)), [child_of(mid.base, "P(c1)")])
    c_uv = check_fine_ext(u, v)
    c_vw = check_fine_ext(v, w)
    direct = check_fine_ext(u, w)
    verify_fine_cert(u, w, direct)
    composed = compose_fine_certs(u, v, c_uv, c_vw)
    verify_fine_cert(u, w, composed)


def test_verify_cert_rejects_bad_certificate():
    base = B("P(c)")
    u = app(leaf(base), [child_of(base, "Q(c)")])
    v = app(u, [child_of(base, "R(c)")])
    cert = check_fine_ext(u, v)
    wrong_idx = (cert.matches[0][0] + 1) % len(v.children)
    from intentic.states import FineCert
    bad = FineCert(((wrong_idx, cert.matches[0][1]),))
    with pytest.raises(FineExtensionError):
        verify_fine_cert(u, v, bad)


def test_struct_key_distinguishes():
    base = B("P(c)")
    u = app(leaf(base), [child_of(base, "Q(c)")])
    v = app(u, [child_of(base, "R(c)")])
    assert struct_key(u) != struct_key(v)
    assert struct_key(u) == struct_key(app(leaf(base), [child_of(base, "Q(c)")]))
