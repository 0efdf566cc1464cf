"""Random state generation and constructive checks of the frame properties.

The two orders on state trees behave like the accessibility relations of a
bimodal frame: the fine-extension order is a locally directed preorder, the
made-true inclusion order is a preorder, and the two commute.  Everything
here is verified constructively, on generated states, at the certificate
level:

* ``local_join`` joins two fine extensions of a common state by pooling
  children;
* ``commute_witness`` builds the commuting state (append the boosted copy
  of one state as a hypothesis child of the other, connected by its base's
  generating conjunction) and returns a total witness transport into it.

Generation is a pure function of the seed, so every trial is reproducible.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .kernel import Proof, and_e_l, and_e_r, and_i, assume, imp_e
from .states import (
    BasicState, Edge, IntenticState, Path, app, app_at, boost,
    check_fine_ext, compose_fine_certs, identity_cert, leaf, make_edge,
    validate_state, verify_fine_cert,
)
from .syntax import (
    Atom, Const, Formula, Implies, Signature, WitnessRegistry, canon_key,
    formula_text,
)
from .truthmaking import (
    ChildStep, MTWitness, check_mt_witness, transport_boost, transport_fine,
    trivial_witness,
)

FRAMES_SIGNATURE = Signature((("P", 1), ("Q", 1), ("R", 1)), ("c1", "c2"))


@dataclass(frozen=True)
class GenParams:
    seed: int = 0
    max_depth: int = 3
    max_branching: int = 3
    atoms: tuple[str, ...] = ("P", "Q", "R")
    constants: tuple[str, ...] = ("c1", "c2")
    max_generators: int = 3

    def __post_init__(self):
        if min(self.max_depth, self.max_branching, self.max_generators) < 0:
            raise ValueError("bounds must be nonnegative")


def _atom_pool(params: GenParams) -> tuple[Formula, ...]:
    return tuple(Atom(r, (Const(c),))
                 for r in params.atoms for c in params.constants)


def gen_state(params: GenParams) -> IntenticState:
    """Deterministic random state; the root base is never empty, so its
    generating conjunction is always derivable from the generators."""
    rng = random.Random(params.seed)
    atoms = _atom_pool(params)
    k = rng.randint(1, max(1, params.max_generators))
    base = BasicState.of(rng.choice(atoms) for _ in range(k))
    return _grow(rng, base, 0, params, atoms)


def _grow(rng, base, depth, params, atoms) -> IntenticState:
    n = rng.randint(0, params.max_branching) if depth < params.max_depth else 0
    edges = []
    for _ in range(n):
        hyp = rng.choice(atoms)
        child = _grow(rng, base.add(hyp), depth + 1, params, atoms)
        edges.append(make_edge(base, hyp, child))
    return IntenticState(base, tuple(edges))


def random_walk(rng, u: IntenticState) -> Path:
    steps = []
    node = u
    while node.children and rng.random() < 0.6:
        i = rng.randrange(len(node.children))
        steps.append(i)
        node = node.children[i].child
    return Path(u, tuple(steps))


def random_fine_extension(rng, u: IntenticState, params: GenParams,
                          ops: int = 2) -> IntenticState:
    """Apply a few child-adding operations at random paths; the result is a
    fine extension of the input by construction."""
    atoms = _atom_pool(params)
    cur = u
    for _ in range(max(1, ops)):
        path = random_walk(rng, cur)
        node = path.end()
        hyp = rng.choice(atoms)
        child = _grow(rng, node.base.add(hyp),
                      max(0, params.max_depth - len(path.steps) - 1), params, atoms)
        cur = app_at(path, [make_edge(node.base, hyp, child)])
    return cur


# ----------------------------------------------------------- frame witnesses

def local_join(u: IntenticState, v: IntenticState, w: IntenticState) -> IntenticState:
    """Common fine extension of two fine extensions of u: same base, pooled
    children."""
    check_fine_ext(u, v)
    check_fine_ext(u, w)
    return IntenticState(u.base, v.children + w.children)


def _sigma_projection(base: BasicState, g: Formula) -> Proof:
    """Non-hypothetical proof of a generator from the generating conjunction."""
    gens = base.generators
    proof = assume(base.sigma)
    target = canon_key(g)
    for i, gen in enumerate(gens):
        if canon_key(gen) == target:
            if i < len(gens) - 1:
                proof = and_e_l(proof)
            return proof
        proof = and_e_r(proof)
    raise ValueError(f"{formula_text(g)} is not a generator")


def sigma_witness(v: IntenticState, base: BasicState) -> MTWitness:
    """Step-free witness for another base's generating conjunction, available
    whenever that base's generators all appear among v's."""
    missing = [g for g in base.generators if not v.base.contains(g)]
    if missing:
        raise ValueError(f"no assumption-level witness: {formula_text(missing[0])} "
                         "is not a generator of the target state")
    gens = base.generators
    if not gens:
        if not v.base.contains(base.sigma):
            raise ValueError("no assumption-level witness for the empty conjunction")
        return trivial_witness(base.sigma)

    def chain(i):
        if i == len(gens) - 1:
            return assume(gens[i])
        return and_i(assume(gens[i]), chain(i + 1))

    return MTWitness((), chain(0))


def commute_witness(v: IntenticState, w: IntenticState,
                    sigma_wit: MTWitness | None = None,
                    registry: WitnessRegistry | None = None):
    """The commuting square: a fine extension s of v that absorbs w.

    s appends boost(w, b(v)) as a child of v, reached by w's generating
    conjunction.  Returns (s, cert v <=F s, transport) where transport maps
    any checking witness (w, f) to a checking witness (s, f): boost it into
    the new child, turn it into the child-step implication, and close with
    an implication elimination against the conjunction's witness."""
    c = v.base
    sigma = w.base.sigma
    boosted = boost(w, c)
    connection = tuple(
        assume(g) if v.base.contains(g) else _sigma_projection(w.base, g)
        for g in boosted.base.generators)
    edge = Edge(sigma, boosted, connection)
    s = app(v, [edge], registry)
    cert = check_fine_ext(v, s)
    key = edge.sort_key()
    idx = next(i for i, e in enumerate(s.children) if e.sort_key() == key)
    if sigma_wit is None:
        sigma_wit = sigma_witness(v, w.base)
    check_mt_witness(v, sigma, sigma_wit, registry)
    sigma_at_s = transport_fine(sigma_wit, v, s, cert)

    def transport(f: Formula, wit: MTWitness) -> MTWitness:
        check_mt_witness(w, f, wit, registry)
        inner = transport_boost(wit, w, c)
        step = ChildStep(idx, sigma, connection, inner)
        closing = imp_e(assume(Implies(sigma, f)), sigma_at_s.closing)
        return MTWitness(sigma_at_s.child_steps + (step,), closing)

    return s, cert, transport


# -------------------------------------------------------------- fuzz harness

def sample_witness(rng, u: IntenticState) -> tuple[Formula, MTWitness]:
    """A random checkable certificate against u: a generator, a conjunction
    of generators, or a child-step implication."""
    kinds = []
    if u.base.generators:
        kinds.extend(["gen", "conj"])
    if u.children:
        kinds.append("step")
    if not kinds:
        raise ValueError("state supports no sampled witness")
    kind = rng.choice(kinds)
    if kind == "gen":
        g = rng.choice(u.base.generators)
        return g, trivial_witness(g)
    if kind == "conj":
        g1 = rng.choice(u.base.generators)
        g2 = rng.choice(u.base.generators)
        closing = and_i(assume(g1), assume(g2))
        return closing.conclusion, MTWitness((), closing)
    i = rng.randrange(len(u.children))
    edge = u.children[i]
    g = rng.choice(edge.child.base.generators)
    step = ChildStep(i, edge.hypothesis, edge.connection, trivial_witness(g))
    f = Implies(edge.hypothesis, g)
    return f, MTWitness((step,), assume(f))


@dataclass(frozen=True)
class FuzzReport:
    trials: int
    passed: int
    failures: tuple[tuple[int, str], ...]  # (trial seed, reason)

    @property
    def failed(self) -> int:
        return self.trials - self.passed

    def summary(self) -> str:
        return f"trials={self.trials} pass={self.passed} fail={self.failed}"


def trial_states(seed: int, max_depth: int = 3, max_branching: int = 3):
    """The deterministic (u, v, w) triple a trial runs on, plus its stream."""
    params = GenParams(seed=seed, max_depth=max_depth, max_branching=max_branching)
    rng = random.Random(f"trial:{seed}")  # str seeding hashes deterministically
    u = gen_state(params)
    v = random_fine_extension(rng, u, params)
    w = random_fine_extension(rng, u, params)
    return params, rng, u, v, w


def run_trial(seed: int, max_depth: int = 3, max_branching: int = 3) -> None:
    """One seeded frame-property trial; raises on any violated property."""
    params, rng, u, v, w = trial_states(seed, max_depth, max_branching)
    validate_state(u)

    # preorder: reflexivity and transitivity certificates verify
    verify_fine_cert(u, u, check_fine_ext(u, u))
    v2 = random_fine_extension(rng, v, params, ops=1)
    c_uv = check_fine_ext(u, v)
    c_vv2 = check_fine_ext(v, v2)
    verify_fine_cert(u, v2, check_fine_ext(u, v2))
    composed = compose_fine_certs(u, v, c_uv, c_vv2)
    verify_fine_cert(u, v2, composed)

    # witness transport composes: both routes check, and agree structurally
    f0, w0 = sample_witness(rng, u)
    via_v = transport_fine(transport_fine(w0, u, v, c_uv), v, v2, c_vv2)
    direct = transport_fine(w0, u, v2, composed)
    check_mt_witness(v2, f0, via_v)
    check_mt_witness(v2, f0, direct)
    if via_v != direct:
        raise AssertionError("transport composition is not coherent")

    # local directedness
    s = local_join(u, v, w)
    verify_fine_cert(v, s, check_fine_ext(v, s))
    verify_fine_cert(w, s, check_fine_ext(w, s))

    # commutation: v extends u in the made-true order (via fine extension),
    # w extends u finely; the constructed s2 closes the square
    s2, cert, transport = commute_witness(v, w)
    verify_fine_cert(v, s2, cert)
    f1, w1 = sample_witness(rng, w)
    check_mt_witness(s2, f1, transport(f1, w1))


def run_fuzz(seed: int, count: int, max_depth: int = 3,
             max_branching: int = 3) -> FuzzReport:
    passed = 0
    failures = []
    for i in range(count):
        trial_seed = seed + i
        try:
            run_trial(trial_seed, max_depth, max_branching)
            passed += 1
        except Exception as exc:  # noqa: BLE001 - fuzz collects everything
            failures.append((trial_seed, f"{type(exc).__name__}: {exc}"))
    return FuzzReport(count, passed, tuple(failures))
