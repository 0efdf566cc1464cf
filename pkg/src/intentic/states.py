"""Finite state trees over deductively generated bases.

A :class:`BasicState` stores a canonical finite generator set; the state it
stands for is the closure of those generators under the hypothesis-free
logic, which is never materialized.  Equality of basic states is equality of
canonical generator sets (a syntactic refinement of closure equality).

An :class:`IntenticState` is a base plus finitely many child edges.  Each
edge records the adjoined hypothesis and connection proofs deriving every
child generator from the parent generators plus that hypothesis; in the
common case the child generators are literally the parent's plus the
hypothesis and the connection proofs are assumption leaves.

``check_fine_ext`` decides the base-preserving refinement order between two
state trees and produces a recursive child-matching certificate.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

from .kernel import NON_HYPOTHETICAL, Proof, ProofError, assume, check_proof
from .syntax import (
    And, Formula, TOP, WitnessRegistry, canon_key, formula_text,
)


class StateError(Exception):
    """Structural validation failure; ``path`` routes to the bad edge."""

    def __init__(self, path: tuple[int, ...], reason: str):
        self.path = path
        self.reason = reason
        loc = ".".join(map(str, path)) if path else "root"
        super().__init__(f"at {loc}: {reason}")


class FineExtensionError(Exception):
    """No fine-extension matching exists; carries the first unmatchable path."""

    def __init__(self, path: tuple[int, ...], reason: str):
        self.path = path
        loc = ".".join(map(str, path)) if path else "root"
        super().__init__(f"at {loc}: {reason}")


# -------------------------------------------------------------- basic states

@dataclass(frozen=True)
class BasicState:
    generators: tuple[Formula, ...]

    def __post_init__(self):
        seen: dict[str, Formula] = {}
        for g in self.generators:
            seen.setdefault(canon_key(g), g)
        object.__setattr__(self, "generators",
                           tuple(seen[k] for k in sorted(seen)))

    @classmethod
    def of(cls, formulas) -> "BasicState":
        return cls(tuple(formulas))

    def keys(self) -> tuple[str, ...]:
        return tuple(canon_key(g) for g in self.generators)

    def contains(self, f: Formula) -> bool:
        return canon_key(f) in self.keys()

    def add(self, f: Formula) -> "BasicState":
        return BasicState(self.generators + (f,))

    def union(self, other: "BasicState") -> "BasicState":
        return BasicState(self.generators + other.generators)

    @property
    def sigma(self) -> Formula:
        """Single generating formula: right-nested conjunction (top if empty)."""
        if not self.generators:
            return TOP
        return functools.reduce(lambda acc, g: And(g, acc),
                                reversed(self.generators[:-1]),
                                self.generators[-1])

    def __str__(self) -> str:
        return "{" + ", ".join(map(formula_text, self.generators)) + "}"


EMPTY_BASE = BasicState(())


# -------------------------------------------------------------- state trees

@dataclass(frozen=True)
class Edge:
    hypothesis: Formula
    child: "IntenticState"
    connection: tuple[Proof, ...]

    def sort_key(self) -> tuple[str, str]:
        return (canon_key(self.hypothesis), struct_key(self.child))


@dataclass(frozen=True)
class IntenticState:
    base: BasicState
    children: tuple[Edge, ...] = ()

    def __post_init__(self):
        ordered = sorted(self.children, key=Edge.sort_key)
        deduped: list[Edge] = []
        for e in ordered:
            if not (deduped and deduped[-1].sort_key() == e.sort_key()):
                deduped.append(e)
        object.__setattr__(self, "children", tuple(deduped))

    def depth(self) -> int:
        return 1 + max((e.child.depth() for e in self.children), default=0)

    def size(self) -> int:
        return 1 + sum(e.child.size() for e in self.children)


def struct_key(u: IntenticState) -> str:
    gens = ";".join(u.base.keys())
    edges = ",".join(f"[{canon_key(e.hypothesis)}>{struct_key(e.child)}]"
                     for e in u.children)
    return f"({gens}|{edges})"


def leaf(base: BasicState) -> IntenticState:
    return IntenticState(base, ())


def make_edge(parent_base: BasicState, hypothesis: Formula,
              child: IntenticState, connection: tuple[Proof, ...] | None = None) -> Edge:
    """Build an edge; omitted connection proofs default to assumption leaves,
    which suffices whenever every child generator is a parent generator or
    the hypothesis itself."""
    if connection is None:
        connection = tuple(assume(g) for g in child.base.generators)
    return Edge(hypothesis, child, connection)


def _validate_edge(parent: BasicState, edge: Edge, path,
                   registry: WitnessRegistry | None) -> None:
    gens = edge.child.base.generators
    if len(edge.connection) != len(gens):
        raise StateError(path, f"expected {len(gens)} connection proofs, "
                               f"got {len(edge.connection)}")
    allowed = set(parent.keys()) | {canon_key(edge.hypothesis)}
    for i, (g, proof) in enumerate(zip(gens, edge.connection)):
        try:
            j = check_proof(proof, NON_HYPOTHETICAL, registry=registry)
        except ProofError as exc:
            raise StateError(path, f"connection proof {i} does not check: {exc}") from exc
        if canon_key(j.conclusion) != canon_key(g):
            raise StateError(path, f"connection proof {i} concludes "
                                   f"{formula_text(j.conclusion)}, expected {formula_text(g)}")
        bad = [f for f in j.assumptions if canon_key(f) not in allowed]
        if bad:
            raise StateError(path, f"connection proof {i} assumes {formula_text(bad[0])}, "
                                   "which is neither a parent generator nor the hypothesis")


def validate_state(u: IntenticState, registry: WitnessRegistry | None = None,
                   _path: tuple[int, ...] = ()) -> None:
    """Full recursive re-validation of every edge invariant."""
    for i, edge in enumerate(u.children):
        _validate_edge(u.base, edge, _path + (i,), registry)
        validate_state(edge.child, registry, _path + (i,))


# -------------------------------------------------------------------- paths

@dataclass(frozen=True)
class Path:
    root: IntenticState
    steps: tuple[int, ...] = ()

    def __post_init__(self):
        node = self.root
        for i in self.steps:
            if not 0 <= i < len(node.children):
                raise ValueError(f"path step {i} out of range")
            node = node.children[i].child

    def nodes(self) -> tuple[IntenticState, ...]:
        out = [self.root]
        for i in self.steps:
            out.append(out[-1].children[i].child)
        return tuple(out)

    def connectors(self) -> tuple[Formula, ...]:
        out = []
        node = self.root
        for i in self.steps:
            out.append(node.children[i].hypothesis)
            node = node.children[i].child
        return tuple(out)

    def end(self) -> IntenticState:
        return self.nodes()[-1]


# ----------------------------------------------------------- fine extensions

@dataclass(frozen=True)
class FineCert:
    """Per child of the smaller state: (index into the larger state's
    children, certificate for that pair)."""

    matches: tuple[tuple[int, "FineCert"], ...]


def _search(u: IntenticState, v: IntenticState, memo) -> FineCert | None:
    key = (id(u), id(v))
    if key in memo:
        return memo[key]
    if u.base.keys() != v.base.keys():
        memo[key] = None
        return None
    memo[key] = None  # guard against revisiting while in progress
    matches = []
    for edge in u.children:
        found = None
        for j, cand in enumerate(v.children):
            sub = _search(edge.child, cand.child, memo)
            if sub is not None:
                found = (j, sub)
                break
        if found is None:
            memo[key] = None
            return None
        matches.append(found)
    cert = FineCert(tuple(matches))
    memo[key] = cert
    return cert


def _explain(u, v, memo, path):
    if u.base.keys() != v.base.keys():
        return path, "bases differ"
    for i, edge in enumerate(u.children):
        if all(_search(edge.child, cand.child, memo) is None for cand in v.children):
            return path + (i,), "no matching child"
    return path, "unmatchable"


def check_fine_ext(u: IntenticState, v: IntenticState) -> FineCert:
    """Certificate that v fine-extends u, or FineExtensionError."""
    memo: dict = {}
    cert = _search(u, v, memo)
    if cert is None:
        where, why = _explain(u, v, memo, ())
        raise FineExtensionError(where, why)
    return cert


def is_fine_ext(u: IntenticState, v: IntenticState) -> bool:
    try:
        check_fine_ext(u, v)
        return True
    except FineExtensionError:
        return False


def verify_fine_cert(u: IntenticState, v: IntenticState, cert: FineCert) -> None:
    """Re-check a certificate structurally (no search)."""
    if u.base.keys() != v.base.keys():
        raise FineExtensionError((), "bases differ")
    if len(cert.matches) != len(u.children):
        raise FineExtensionError((), "certificate does not cover every child")
    for i, (j, sub) in enumerate(cert.matches):
        if not 0 <= j < len(v.children):
            raise FineExtensionError((i,), f"match index {j} out of range")
        verify_fine_cert(u.children[i].child, v.children[j].child, sub)


def identity_cert(u: IntenticState) -> FineCert:
    return FineCert(tuple((i, identity_cert(e.child))
                          for i, e in enumerate(u.children)))


def compose_fine_certs(u: IntenticState, v: IntenticState,
                       first: FineCert, second: FineCert) -> FineCert:
    """From certificates u <=F v and v <=F w, the certificate u <=F w."""
    matches = []
    for i, (j, sub1) in enumerate(first.matches):
        k, sub2 = second.matches[j]
        matches.append((k, compose_fine_certs(u.children[i].child,
                                              v.children[j].child, sub1, sub2)))
    return FineCert(tuple(matches))


# -------------------------------------------------------------- constructors

def app(u: IntenticState, edges, registry: WitnessRegistry | None = None) -> IntenticState:
    """Add children; each new edge must satisfy the edge invariant at u."""
    edges = tuple(edges)
    for i, e in enumerate(edges):
        _validate_edge(u.base, e, (i,), registry)
    return IntenticState(u.base, u.children + edges)


def _replace(node: IntenticState, steps, replacement) -> IntenticState:
    if not steps:
        return replacement
    i = steps[0]
    edge = node.children[i]
    new_child = _replace(edge.child, steps[1:], replacement)
    new_edge = Edge(edge.hypothesis, new_child, edge.connection)
    rest = node.children[:i] + node.children[i + 1:]
    return IntenticState(node.base, rest + (new_edge,))


def rep(path: Path, replacement: IntenticState) -> IntenticState:
    """Replace the endpoint of the path by a fine extension of it."""
    check_fine_ext(path.end(), replacement)
    return _replace(path.root, path.steps, replacement)


def app_at(path: Path, edges, registry: WitnessRegistry | None = None) -> IntenticState:
    return rep(path, app(path.end(), edges, registry))


def _boost_edge(edge: Edge, c: BasicState) -> Edge:
    new_child = boost(edge.child, c)
    old = {canon_key(g): p for g, p in zip(edge.child.base.generators, edge.connection)}
    connection = tuple(old.get(canon_key(g), assume(g))
                       for g in new_child.base.generators)
    return Edge(edge.hypothesis, new_child, connection)


def boost(u: IntenticState, c: BasicState) -> IntenticState:
    """Union extra generators into every base of the tree; hypotheses stay."""
    return IntenticState(u.base.union(c),
                         tuple(_boost_edge(e, c) for e in u.children))
