"""First-order formulas over a purely relational signature.

Terms are variables, declared base constants, or witness constants written
``#k`` (indices into a :class:`WitnessRegistry`).  There are no function
symbols.  Negation is derived notation: ``~p`` is stored as ``p -> false``.

Formula equality throughout the package is alpha-equivalence; ``canon_key``
gives the total order used wherever a deterministic ordering of formulas is
needed.
"""

from __future__ import annotations

import re
from dataclasses import dataclass


class ParseError(Exception):
    """Raised on malformed formula text; carries the offending position."""

    def __init__(self, message: str, position: int = -1):
        self.position = position
        if position >= 0:
            message = f"{message} (at position {position})"
        super().__init__(message)


class RegistryError(ValueError):
    pass


# ---------------------------------------------------------------- terms

@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Const:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class WConst:
    index: int

    def __str__(self) -> str:
        return f"#{self.index}"


Term = Var | Const | WConst


# ---------------------------------------------------------------- formulas

@dataclass(frozen=True)
class Atom:
    rel: str
    args: tuple[Term, ...]


@dataclass(frozen=True)
class Falsum:
    pass


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class ForAll:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


Formula = Atom | Falsum | And | Or | Implies | ForAll | Exists

FALSUM = Falsum()
TOP = Implies(FALSUM, FALSUM)


def neg(f: Formula) -> Formula:
    return Implies(f, FALSUM)


def is_neg(f: Formula) -> bool:
    return isinstance(f, Implies) and f.right == FALSUM


def _str_formula(self) -> str:
    return formula_text(self)


for _cls in (Atom, Falsum, And, Or, Implies, ForAll, Exists):
    _cls.__str__ = _str_formula  # type: ignore[assignment]


# ------------------------------------------------------- alpha equivalence

def alpha_key(f: Formula):
    """Hashable canonical form: bound variables replaced by binding depth."""
    return _akey(f, {}, 0)


def _akey(f, env, depth):
    if isinstance(f, Atom):
        return ("A", f.rel) + tuple(_tkey(t, env) for t in f.args)
    if isinstance(f, Falsum):
        return ("F",)
    if isinstance(f, And):
        return ("&", _akey(f.left, env, depth), _akey(f.right, env, depth))
    if isinstance(f, Or):
        return ("|", _akey(f.left, env, depth), _akey(f.right, env, depth))
    if isinstance(f, Implies):
        return (">", _akey(f.left, env, depth), _akey(f.right, env, depth))
    if isinstance(f, ForAll):
        return ("all", _akey(f.body, {**env, f.var: depth}, depth + 1))
    if isinstance(f, Exists):
        return ("ex", _akey(f.body, {**env, f.var: depth}, depth + 1))
    raise TypeError(f"not a formula: {f!r}")


def _tkey(t, env):
    if isinstance(t, Var):
        if t.name in env:
            return ("b", env[t.name])
        return ("v", t.name)
    if isinstance(t, Const):
        return ("c", t.name)
    if isinstance(t, WConst):
        return ("w", t.index)
    raise TypeError(f"not a term: {t!r}")


def alpha_eq(f: Formula, g: Formula) -> bool:
    return alpha_key(f) == alpha_key(g)


def canon_key(f: Formula) -> str:
    """Deterministic total-order key; alpha-equal formulas share a key."""
    try:
        return f._ckey  # type: ignore[union-attr]
    except AttributeError:
        key = repr(alpha_key(f))
        object.__setattr__(f, "_ckey", key)
        return key


# ------------------------------------------------------------- traversals

def free_vars(f: Formula) -> frozenset[str]:
    if isinstance(f, Atom):
        return frozenset(t.name for t in f.args if isinstance(t, Var))
    if isinstance(f, Falsum):
        return frozenset()
    if isinstance(f, (And, Or, Implies)):
        return free_vars(f.left) | free_vars(f.right)
    if isinstance(f, (ForAll, Exists)):
        return free_vars(f.body) - {f.var}
    raise TypeError(f"not a formula: {f!r}")


def formula_terms(f: Formula) -> frozenset[Term]:
    """All constant terms (base and witness) occurring in the formula."""
    if isinstance(f, Atom):
        return frozenset(t for t in f.args if not isinstance(t, Var))
    if isinstance(f, Falsum):
        return frozenset()
    if isinstance(f, (And, Or, Implies)):
        return formula_terms(f.left) | formula_terms(f.right)
    if isinstance(f, (ForAll, Exists)):
        return formula_terms(f.body)
    raise TypeError(f"not a formula: {f!r}")


def formula_wconsts(f: Formula) -> frozenset[int]:
    return frozenset(t.index for t in formula_terms(f) if isinstance(t, WConst))


def fresh_var(base: str, avoid) -> str:
    if base not in avoid:
        return base
    i = 1
    while f"{base}{i}" in avoid:
        i += 1
    return f"{base}{i}"


def substitute(f: Formula, var: str, term: Term) -> Formula:
    """Capture-avoiding substitution of a term for a free variable."""
    if var not in free_vars(f):
        return f
    if isinstance(f, Atom):
        args = tuple(term if isinstance(t, Var) and t.name == var else t
                     for t in f.args)
        return Atom(f.rel, args)
    if isinstance(f, And):
        return And(substitute(f.left, var, term), substitute(f.right, var, term))
    if isinstance(f, Or):
        return Or(substitute(f.left, var, term), substitute(f.right, var, term))
    if isinstance(f, Implies):
        return Implies(substitute(f.left, var, term), substitute(f.right, var, term))
    if isinstance(f, (ForAll, Exists)):
        ctor = type(f)
        if isinstance(term, Var) and term.name == f.var:
            # term would be captured: rename the binder first
            avoid = free_vars(f.body) | {var, term.name}
            nv = fresh_var(f.var, avoid)
            body = substitute(f.body, f.var, Var(nv))
            return ctor(nv, substitute(body, var, term))
        return ctor(f.var, substitute(f.body, var, term))
    raise TypeError(f"not a formula: {f!r}")


def substitute_many(f: Formula, mapping: dict[str, Term]) -> Formula:
    """Simultaneous capture-avoiding substitution."""
    live = {k: v for k, v in mapping.items() if k in free_vars(f)}
    if not live:
        return f
    if isinstance(f, Atom):
        args = tuple(live.get(t.name, t) if isinstance(t, Var) else t
                     for t in f.args)
        return Atom(f.rel, args)
    if isinstance(f, (And, Or, Implies)):
        ctor = type(f)
        return ctor(substitute_many(f.left, live), substitute_many(f.right, live))
    if isinstance(f, (ForAll, Exists)):
        ctor = type(f)
        inner = {k: v for k, v in live.items() if k != f.var}
        incoming = {v.name for v in inner.values() if isinstance(v, Var)}
        if f.var in incoming:
            avoid = free_vars(f.body) | incoming | set(inner)
            nv = fresh_var(f.var, avoid)
            body = substitute(f.body, f.var, Var(nv))
            return ctor(nv, substitute_many(body, inner))
        return ctor(f.var, substitute_many(f.body, inner))
    raise TypeError(f"not a formula: {f!r}")


def subformula_polarities(f: Formula, polarity: int = 1):
    """Yield (subformula, polarity) occurrences; implication flips its antecedent."""
    yield f, polarity
    if isinstance(f, (And, Or)):
        yield from subformula_polarities(f.left, polarity)
        yield from subformula_polarities(f.right, polarity)
    elif isinstance(f, Implies):
        yield from subformula_polarities(f.left, -polarity)
        yield from subformula_polarities(f.right, polarity)
    elif isinstance(f, (ForAll, Exists)):
        yield from subformula_polarities(f.body, polarity)


def positive_subformulas(f: Formula) -> tuple[Formula, ...]:
    """The positively occurring subformulas, deduplicated up to alpha."""
    out: dict[str, Formula] = {}
    for sub, pol in subformula_polarities(f):
        if pol > 0:
            out.setdefault(canon_key(sub), sub)
    return tuple(out.values())


# --------------------------------------------------------------- signature

@dataclass(frozen=True)
class Signature:
    """Relation symbols with arities plus individual constants; no functions."""

    relations: tuple[tuple[str, int], ...]
    base_constants: tuple[str, ...] = ()

    def __post_init__(self):
        names = [r for r, _ in self.relations]
        if len(set(names)) != len(names):
            raise ValueError("duplicate relation names")
        if any(a < 0 for _, a in self.relations):
            raise ValueError("negative arity")
        if set(names) & set(self.base_constants):
            raise ValueError("relation and constant names must be disjoint")

    def arity(self, rel: str) -> int | None:
        for name, a in self.relations:
            if name == rel:
                return a
        return None

    def has_constant(self, name: str) -> bool:
        return name in self.base_constants

    def merge(self, other: "Signature") -> "Signature":
        rels = dict(self.relations)
        for name, a in other.relations:
            if rels.get(name, a) != a:
                raise ValueError(f"conflicting arity for {name}")
            rels[name] = a
        consts = tuple(dict.fromkeys(self.base_constants + other.base_constants))
        return Signature(tuple(rels.items()), consts)

    def validate(self, f: Formula, registry: "WitnessRegistry | None" = None) -> None:
        if isinstance(f, Atom):
            a = self.arity(f.rel)
            if a is None:
                raise ParseError(f"unknown relation {f.rel!r}")
            if a != len(f.args):
                raise ParseError(f"relation {f.rel!r} expects {a} arguments, got {len(f.args)}")
            for t in f.args:
                if isinstance(t, Const) and not self.has_constant(t.name):
                    raise ParseError(f"unknown constant {t.name!r}")
                if isinstance(t, WConst) and registry is not None and t.index >= len(registry):
                    raise ParseError(f"unknown witness constant #{t.index}")
        elif isinstance(f, (And, Or, Implies)):
            self.validate(f.left, registry)
            self.validate(f.right, registry)
        elif isinstance(f, (ForAll, Exists)):
            self.validate(f.body, registry)


PA_SIGNATURE = Signature((("S", 2), ("Add", 3), ("Mul", 3), ("=", 2)), ("0",))
DEMO_SIGNATURE = PA_SIGNATURE.merge(
    Signature((("P", 1), ("Q", 1), ("R", 1)), ("c", "c1", "c2")))


# ----------------------------------------------------------- witness registry

class WitnessRegistry:
    """Append-only table of witness constants, one canonical id per formula.

    Entry ``k`` names the hypothesized witness of ``exists x. f(x)`` where
    ``f`` has exactly one free variable.  Layers keep things well-founded:
    an entry may only mention witness constants of strictly lower layers.
    Variants of the same formula can be registered when a genuinely fresh
    constant is required; the canonical id stays the first-registered one.
    """

    def __init__(self):
        self._entries: list[tuple[Formula, str, int]] = []
        self._canonical: dict[str, int] = {}

    def __len__(self) -> int:
        return len(self._entries)

    @staticmethod
    def _key(formula: Formula, var: str) -> str:
        return canon_key(ForAll(var, formula))

    def _check_registrable(self, formula: Formula, var: str) -> None:
        fv = free_vars(formula)
        if fv != {var}:
            raise RegistryError(
                f"witness formula must have exactly the free variable {var!r}, got {sorted(fv)}")
        for k in formula_wconsts(formula):
            if k >= len(self._entries):
                raise RegistryError(f"witness constant #{k} is not registered")

    def _layer_for(self, formula: Formula) -> int:
        inner = [self.layer(k) for k in formula_wconsts(formula)]
        return 1 + max(inner, default=0)

    def register(self, formula: Formula, var: str) -> int:
        """Idempotent up to alpha-equivalence of the (var-normalized) formula."""
        self._check_registrable(formula, var)
        key = self._key(formula, var)
        if key in self._canonical:
            return self._canonical[key]
        idx = len(self._entries)
        self._entries.append((formula, var, self._layer_for(formula)))
        self._canonical[key] = idx
        return idx

    def register_variant(self, formula: Formula, var: str) -> int:
        """Always allocates a new id for the formula (a fresh indexed variant)."""
        self._check_registrable(formula, var)
        key = self._key(formula, var)
        idx = len(self._entries)
        self._entries.append((formula, var, self._layer_for(formula)))
        self._canonical.setdefault(key, idx)
        return idx

    def formula(self, idx: int) -> Formula:
        return self._entries[idx][0]

    def var(self, idx: int) -> str:
        return self._entries[idx][1]

    def layer(self, idx: int) -> int:
        return self._entries[idx][2]

    def canonical_id(self, formula: Formula, var: str) -> int | None:
        return self._canonical.get(self._key(formula, var))

    def ids_for(self, formula: Formula, var: str) -> tuple[int, ...]:
        key = self._key(formula, var)
        return tuple(i for i, (f, v, _) in enumerate(self._entries)
                     if self._key(f, v) == key)

    def entries(self):
        return tuple(self._entries)


# ------------------------------------------------------------------ parser

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<arrow>->)
  | (?P<wconst>\#\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*|\d+)
  | (?P<sym>[()~&|=.,])
""", re.VERBOSE)

_KEYWORDS = {"false", "forall", "exists"}


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), pos))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, sig: Signature, registry: WitnessRegistry):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.sig = sig
        self.registry = registry

    def peek(self):
        return self.tokens[self.pos]

    def next(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, value: str):
        kind, val, pos = self.next()
        if val != value:
            raise ParseError(f"expected {value!r}, found {val or 'end of input'!r}", pos)

    def parse(self) -> Formula:
        f = self.implication()
        kind, val, pos = self.peek()
        if kind != "eof":
            raise ParseError(f"unexpected trailing {val!r}", pos)
        return f

    # precedence: -> (loosest, right-assoc) < | < & < ~ ; quantifiers scope
    # to the right as far as possible.
    def implication(self) -> Formula:
        left = self.disjunction()
        if self.peek()[1] == "->":
            self.next()
            return Implies(left, self.implication())
        return left

    def disjunction(self) -> Formula:
        left = self.conjunction()
        if self.peek()[1] == "|":
            self.next()
            return Or(left, self.disjunction())
        return left

    def conjunction(self) -> Formula:
        left = self.unary()
        if self.peek()[1] == "&":
            self.next()
            return And(left, self.conjunction())
        return left

    def unary(self) -> Formula:
        kind, val, pos = self.peek()
        if val == "~":
            self.next()
            return neg(self.unary())
        if val in ("forall", "exists"):
            self.next()
            vkind, vname, vpos = self.next()
            if vkind != "ident" or not vname[0].islower() or vname in _KEYWORDS:
                raise ParseError(f"expected a variable after {val!r}", vpos)
            if self.sig.has_constant(vname):
                raise ParseError(f"cannot bind the constant {vname!r}", vpos)
            self.expect(".")
            body = self.implication()
            return (ForAll if val == "forall" else Exists)(vname, body)
        return self.atom()

    def atom(self) -> Formula:
        kind, val, pos = self.peek()
        if val == "(":
            self.next()
            f = self.implication()
            self.expect(")")
            return f
        if val == "false":
            self.next()
            return FALSUM
        if kind == "ident" and self.tokens[self.pos + 1][1] == "(":
            return self.relation_app()
        # a term, which must be the left side of `=`, or a 0-ary relation
        if kind in ("ident", "wconst"):
            if self.tokens[self.pos + 1][1] == "=":
                t1 = self.term()
                self.expect("=")
                t2 = self.term()
                if self.sig.arity("=") != 2:
                    raise ParseError("the signature does not declare '='", pos)
                return Atom("=", (t1, t2))
            if kind == "ident" and self.sig.arity(val) == 0:
                self.next()
                return Atom(val, ())
            raise ParseError(f"unknown relation {val!r}", pos)
        raise ParseError(f"expected a formula, found {val or 'end of input'!r}", pos)

    def relation_app(self) -> Formula:
        kind, rel, pos = self.next()
        arity = self.sig.arity(rel)
        if arity is None:
            raise ParseError(f"unknown relation {rel!r}", pos)
        self.expect("(")
        args = []
        if self.peek()[1] != ")":
            args.append(self.term())
            while self.peek()[1] == ",":
                self.next()
                args.append(self.term())
        self.expect(")")
        if len(args) != arity:
            raise ParseError(f"relation {rel!r} expects {arity} arguments, got {len(args)}", pos)
        return Atom(rel, tuple(args))

    def term(self) -> Term:
        kind, val, pos = self.next()
        if kind == "wconst":
            idx = int(val[1:])
            if idx >= len(self.registry):
                raise ParseError(f"unknown witness constant {val}", pos)
            return WConst(idx)
        if kind == "ident":
            if self.sig.has_constant(val):
                return Const(val)
            if val[0].islower() and val not in _KEYWORDS:
                return Var(val)
        raise ParseError(f"expected a term, found {val or 'end of input'!r}", pos)


_EMPTY_REGISTRY = WitnessRegistry()


def parse(text: str, sig: Signature, registry: WitnessRegistry | None = None) -> Formula:
    return _Parser(text, sig, registry if registry is not None else _EMPTY_REGISTRY).parse()


def parse_term(text: str, sig: Signature, registry: WitnessRegistry | None = None) -> Term:
    p = _Parser(text, sig, registry if registry is not None else _EMPTY_REGISTRY)
    t = p.term()
    kind, val, pos = p.peek()
    if kind != "eof":
        raise ParseError(f"unexpected trailing {val!r}", pos)
    return t


# ----------------------------------------------------------------- printer

_PREC_IMP, _PREC_OR, _PREC_AND, _PREC_NOT = 1, 2, 3, 4


def term_text(t: Term) -> str:
    return str(t)


def formula_text(f: Formula) -> str:
    return _fmt(f, 0, True)


def _fmt(f: Formula, ctx: int, tail: bool) -> str:
    if isinstance(f, Falsum):
        return "false"
    if isinstance(f, Atom):
        if f.rel == "=" and len(f.args) == 2:
            return f"{f.args[0]} = {f.args[1]}"
        if not f.args:
            return f.rel
        return f"{f.rel}({', '.join(map(str, f.args))})"
    if is_neg(f):
        return "~" + _fmt(f.left, _PREC_NOT, tail)
    if isinstance(f, (ForAll, Exists)):
        kw = "forall" if isinstance(f, ForAll) else "exists"
        body = f"{kw} {f.var}. {_fmt(f.body, _PREC_IMP, True)}"
        # the quantifier scope runs to the end of the expression, so parens
        # are needed exactly when this position is not in tail position
        return body if tail else f"({body})"
    if isinstance(f, Implies):
        s = _fmt(f.left, _PREC_IMP + 1, False) + " -> " + _fmt(f.right, _PREC_IMP, tail)
        return f"({s})" if ctx > _PREC_IMP else s
    if isinstance(f, Or):
        s = _fmt(f.left, _PREC_OR + 1, False) + " | " + _fmt(f.right, _PREC_OR, tail)
        return f"({s})" if ctx > _PREC_OR else s
    if isinstance(f, And):
        s = _fmt(f.left, _PREC_AND + 1, False) + " & " + _fmt(f.right, _PREC_AND, tail)
        return f"({s})" if ctx > _PREC_AND else s
    raise TypeError(f"not a formula: {f!r}")
