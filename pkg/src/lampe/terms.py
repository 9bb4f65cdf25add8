"""Terms of the probabilistic event lambda calculus and its CbV extension.

Variables are ordinary strings bound by lambda; names (the labels on choice
operators and generators) are interned `Name` objects bound by `nu`.  Names
are rigid: alpha_eq never renames them, and substitution only freshens a
nu-binder when it would otherwise capture a free name of the substituted
term.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import ParseError, UndefinedBitError

# ---------------------------------------------------------------------------
# Names


class Name:
    """Interned choice/generator label.  Creation order breaks ordering ties."""

    _table: dict = {}
    _counter = 0

    __slots__ = ("text", "seq")

    def __new__(cls, text):
        existing = cls._table.get(text)
        if existing is not None:
            return existing
        obj = object.__new__(cls)
        obj.text = text
        obj.seq = cls._counter
        Name._counter += 1
        cls._table[text] = obj
        return obj

    @classmethod
    def fresh(cls, base="a"):
        """A name not interned yet, derived from `base`."""
        stem = base.rstrip("0123456789_")
        if not stem:
            stem = "a"
        i = 1
        while f"{stem}_{i}" in cls._table:
            i += 1
        return cls(f"{stem}_{i}")

    def __repr__(self):
        return f"Name({self.text!r})"

    def __str__(self):
        return self.text


# ---------------------------------------------------------------------------
# Abstract syntax


@dataclass(frozen=True)
class Term:
    pass


@dataclass(frozen=True)
class Var(Term):
    var: str


@dataclass(frozen=True)
class Lam(Term):
    var: str
    body: Term


@dataclass(frozen=True)
class App(Term):
    fun: Term
    arg: Term


@dataclass(frozen=True)
class Choice(Term):
    """left if the sampled bit (name, index) is 1, right if it is 0."""

    left: Term
    right: Term
    name: Name
    index: int


@dataclass(frozen=True)
class Nu(Term):
    name: Name
    body: Term


@dataclass(frozen=True)
class CbvApp(Term):
    fun: Term
    arg: Term


@dataclass(frozen=True)
class Const(Term):
    """The distinguished constant produced by translating dummy proofs."""


CONST = Const()


def children(t):
    if isinstance(t, (Var, Const)):
        return ()
    if isinstance(t, Lam):
        return (t.body,)
    if isinstance(t, Nu):
        return (t.body,)
    if isinstance(t, (App, CbvApp)):
        return (t.fun, t.arg)
    if isinstance(t, Choice):
        return (t.left, t.right)
    raise TypeError(t)


def replace_child(t, i, new):
    if isinstance(t, Lam):
        return Lam(t.var, new)
    if isinstance(t, Nu):
        return Nu(t.name, new)
    if isinstance(t, App):
        return App(new, t.arg) if i == 0 else App(t.fun, new)
    if isinstance(t, CbvApp):
        return CbvApp(new, t.arg) if i == 0 else CbvApp(t.fun, new)
    if isinstance(t, Choice):
        if i == 0:
            return Choice(new, t.right, t.name, t.index)
        return Choice(t.left, new, t.name, t.index)
    raise TypeError(t)


def subterm_at(t, path):
    for i in path:
        t = children(t)[i]
    return t


def replace_at(t, path, new):
    if not path:
        return new
    i = path[0]
    return replace_child(t, i, replace_at(children(t)[i], path[1:], new))


def free_vars(t):
    if isinstance(t, Var):
        return {t.var}
    if isinstance(t, Lam):
        return free_vars(t.body) - {t.var}
    out = set()
    for c in children(t):
        out |= free_vars(c)
    return out


_FN_CACHE = {}


def free_names(t):
    cached = _FN_CACHE.get(id(t))
    if cached is not None and cached[0] is t:
        return cached[1]
    if isinstance(t, Choice):
        out = free_names(t.left) | free_names(t.right) | {t.name}
    elif isinstance(t, Nu):
        out = free_names(t.body) - {t.name}
    else:
        out = set()
        for c in children(t):
            out |= free_names(c)
    out = frozenset(out)
    _FN_CACHE[id(t)] = (t, out)
    return out


_SHAPE_CACHE = {}


def shape_hash(t):
    """Alpha-invariant structural hash (variable names erased); equal terms
    up to alpha always share it, so it serves as a fast reject."""
    cached = _SHAPE_CACHE.get(id(t))
    if cached is not None and cached[0] is t:
        return cached[1]
    if isinstance(t, Var):
        out = hash(("v",))
    elif isinstance(t, Const):
        out = hash(("c",))
    elif isinstance(t, Lam):
        out = hash(("l", shape_hash(t.body)))
    elif isinstance(t, Nu):
        out = hash(("n", t.name.seq, shape_hash(t.body)))
    elif isinstance(t, Choice):
        out = hash(
            ("p", t.name.seq, t.index, shape_hash(t.left), shape_hash(t.right))
        )
    elif isinstance(t, App):
        out = hash(("a", shape_hash(t.fun), shape_hash(t.arg)))
    else:
        out = hash(("b", shape_hash(t.fun), shape_hash(t.arg)))
    _SHAPE_CACHE[id(t)] = (t, out)
    return out


def bound_names(t):
    out = set()
    if isinstance(t, Nu):
        out.add(t.name)
    for c in children(t):
        out |= bound_names(c)
    return out


def all_names(t):
    return free_names(t) | bound_names(t)


def term_size(t):
    return 1 + sum(term_size(c) for c in children(t))


def rename_bound_name(t, new_name):
    """Rename the binder of Nu-term `t` to `new_name` (which must be fresh in t)."""
    assert isinstance(t, Nu)
    old = t.name

    def go(u):
        if isinstance(u, Nu) and u.name is old:
            return u  # inner shadowing binder keeps its occurrences
        if isinstance(u, Choice) and u.name is old:
            return Choice(go(u.left), go(u.right), new_name, u.index)
        out = u
        for i, c in enumerate(children(u)):
            c2 = go(c)
            if c2 is not c:
                out = replace_child(out, i, c2)
        return out

    return Nu(new_name, go(t.body))


# ---------------------------------------------------------------------------
# Substitution and alpha-equivalence

_fresh_var_counter = [0]


def fresh_var(base, avoid):
    stem = base.split("'")[0]
    cand = stem + "'"
    while cand in avoid:
        cand += "'"
    return cand


def copy_variant_name(name, k):
    """Deterministic name for the k-th duplicated copy of a nu scope."""
    return Name(f"{name.text}~{k}")


def variant_copy(u, k):
    """Rename every nu binder of u (and its bound occurrences) to the k-th
    copy variant.  Keeps duplicated generator scopes independent under a
    naming scheme the proof layer can reproduce."""

    def go(t, bound):
        if isinstance(t, Nu):
            return Nu(copy_variant_name(t.name, k), go(t.body, bound | {t.name}))
        if isinstance(t, Choice):
            name = copy_variant_name(t.name, k) if t.name in bound else t.name
            return Choice(go(t.left, bound), go(t.right, bound), name, t.index)
        out = t
        for i, c in enumerate(children(t)):
            c2 = go(c, bound)
            if c2 is not c:
                out = replace_child(out, i, c2)
        return out

    return go(u, frozenset())


def count_free_occurrences(t, x):
    if isinstance(t, Var):
        return 1 if t.var == x else 0
    if isinstance(t, Lam) and t.var == x:
        return 0
    return sum(count_free_occurrences(c, x) for c in children(t))


def substitute_indexed(t, x, u, start, duplicating):
    """Like substitute, but occurrences of x are numbered globally starting
    at `start`, so a larger term can be substituted piecewise while keeping
    the copy-variant naming aligned."""
    u_fvars = free_vars(u)
    u_fnames = free_names(u)
    hits = [start]

    def payload():
        hits[0] += 1
        if duplicating and hits[0] > 1:
            return variant_copy(u, hits[0])
        return u

    def go(t):
        if isinstance(t, Var):
            return payload() if t.var == x else t
        if isinstance(t, Lam):
            if t.var == x:
                return t
            if x not in free_vars(t.body):
                return t
            if t.var in u_fvars:
                y = fresh_var(t.var, u_fvars | free_vars(t.body))
                body = substitute(t.body, t.var, Var(y))
                return Lam(y, go(body))
            return Lam(t.var, go(t.body))
        if isinstance(t, Nu):
            if x not in free_vars(t.body):
                return t
            if t.name in u_fnames:
                t = rename_bound_name(t, Name.fresh(t.name.text))
            return Nu(t.name, go(t.body))
        out = t
        for i, c in enumerate(children(t)):
            c2 = go(c)
            if c2 is not c:
                out = replace_child(out, i, c2)
        return out

    return go(t)


def substitute(t, x, u):
    """Capture-avoiding t[u/x]: lambda binders of t are renamed as needed, and
    a nu binder of t is freshened when it would capture a free name of u.
    When x occurs several times and u carries generators, the second and
    later copies get variant-renamed binders, so the duplicated scopes stay
    distinct."""
    duplicating = bool(count_free_occurrences(t, x) > 1 and bound_names(u))
    return substitute_indexed(t, x, u, 0, duplicating)


def alpha_eq(t, u):
    """Equality up to renaming of lambda-bound variables.  Names are rigid."""
    if t is u:
        return True
    if shape_hash(t) != shape_hash(u):
        return False

    def go(t, u, env_t, env_u, depth):
        if type(t) is not type(u):
            return False
        if isinstance(t, Var):
            bt = env_t.get(t.var)
            bu = env_u.get(u.var)
            if bt is None and bu is None:
                return t.var == u.var
            return bt == bu
        if isinstance(t, Const):
            return True
        if isinstance(t, Lam):
            et = dict(env_t)
            eu = dict(env_u)
            et[t.var] = depth
            eu[u.var] = depth
            return go(t.body, u.body, et, eu, depth + 1)
        if isinstance(t, Nu):
            return t.name is u.name and go(t.body, u.body, env_t, env_u, depth)
        if isinstance(t, Choice):
            if t.name is not u.name or t.index != u.index:
                return False
            return go(t.left, u.left, env_t, env_u, depth) and go(
                t.right, u.right, env_t, env_u, depth
            )
        return all(
            go(a, b, env_t, env_u, depth)
            for a, b in zip(children(t), children(u))
        )

    return go(t, u, {}, {}, 0)


_CANON_CACHE = {}


def canonical_str(t):
    """Printed form with lambda binders renamed positionally; alpha-invariant,
    suitable as a dictionary key."""
    cached = _CANON_CACHE.get(id(t))
    if cached is not None and cached[0] is t:
        return cached[1]

    def go(t, env, depth):
        if isinstance(t, Var):
            return env.get(t.var, t.var)
        if isinstance(t, Const):
            return "#c"
        if isinstance(t, Lam):
            env2 = dict(env)
            env2[t.var] = f"${depth}"
            return f"(\\${depth}. {go(t.body, env2, depth + 1)})"
        if isinstance(t, Nu):
            return f"(nu {t.name}. {go(t.body, env, depth)})"
        if isinstance(t, App):
            return f"({go(t.fun, env, depth)} {go(t.arg, env, depth)})"
        if isinstance(t, CbvApp):
            return f"{{{go(t.fun, env, depth)}}} {go(t.arg, env, depth)}"
        if isinstance(t, Choice):
            return (
                f"({go(t.left, env, depth)} (+{t.name}.{t.index}) "
                f"{go(t.right, env, depth)})"
            )
        raise TypeError(t)

    out = go(t, {}, 0)
    _CANON_CACHE[id(t)] = (t, out)
    return out


# ---------------------------------------------------------------------------
# Projection by Cantor-space events


def project(t, names, valuation):
    """Resolve choices on names in `names` using `valuation`, a finite map
    (Name, index) -> bit.  Other choices and all generators are kept.

    A nu binder re-binding a name of `names` shields its scope: the outer
    bits do not apply there.
    """
    names = set(names)

    def go(t, active):
        if isinstance(t, Choice) and t.name in active:
            key = (t.name, t.index)
            if key not in valuation:
                raise UndefinedBitError(
                    f"no bit for ({t.name}, {t.index})"
                )
            side = t.left if valuation[key] == 1 else t.right
            return go(side, active)
        if isinstance(t, Choice):
            return Choice(
                go(t.left, active), go(t.right, active), t.name, t.index
            )
        if isinstance(t, Nu):
            inner = active - {t.name} if t.name in active else active
            return Nu(t.name, go(t.body, inner))
        out = t
        for i, c in enumerate(children(t)):
            c2 = go(c, active)
            if c2 is not c:
                out = replace_child(out, i, c2)
        return out

    return go(t, frozenset(names))


# ---------------------------------------------------------------------------
# Concrete syntax

_ABBREVIATIONS = {}


def _init_abbreviations():
    if _ABBREVIATIONS:
        return
    _ABBREVIATIONS["I"] = Lam("x", Var("x"))
    w = Lam("x", App(Var("x"), Var("x")))
    _ABBREVIATIONS["OMEGA"] = App(w, w)
    _ABBREVIATIONS["2"] = Lam(
        "y", Lam("x", App(Var("y"), App(Var("y"), Var("x"))))
    )


class _Lexer:
    def __init__(self, text):
        self.text = text
        self.pos = 0
        self.tokens = []
        self._lex()
        self.i = 0

    def _lex(self):
        text = self.text
        pos = 0
        n = len(text)
        while pos < n:
            while pos < n and text[pos].isspace():
                pos += 1
            if pos >= n:
                break
            ch = text[pos]
            if text.startswith("(+", pos):
                m = re.match(r"\(\+([a-z][a-zA-Z0-9_'~]*)\.([0-9]+)\)", text[pos:])
                if not m:
                    raise ParseError("malformed choice operator", pos)
                self.tokens.append(("choice", (m.group(1), int(m.group(2))), pos))
                pos += m.end()
                continue
            if ch == "\\":
                self.tokens.append(("lam", None, pos))
                pos += 1
                continue
            if ch == ".":
                self.tokens.append(("dot", None, pos))
                pos += 1
                continue
            if ch == "(":
                self.tokens.append(("lpar", None, pos))
                pos += 1
                continue
            if ch == ")":
                self.tokens.append(("rpar", None, pos))
                pos += 1
                continue
            if ch == "{":
                self.tokens.append(("lbrace", None, pos))
                pos += 1
                continue
            if ch == "}":
                self.tokens.append(("rbrace", None, pos))
                pos += 1
                continue
            if text.startswith("#c", pos):
                self.tokens.append(("const", None, pos))
                pos += 2
                continue
            m = re.match(r"[a-z][a-zA-Z0-9_'~]*", text[pos:])
            if m:
                word = m.group(0)
                kind = "nu" if word == "nu" else "ident"
                self.tokens.append((kind, word, pos))
                pos += m.end()
                continue
            m = re.match(r"[A-Z][A-Z0-9_]*|2", text[pos:])
            if m:
                self.tokens.append(("abbrev", m.group(0), pos))
                pos += m.end()
                continue
            raise ParseError(f"unexpected character {ch!r}", pos)

    def peek(self):
        if self.i < len(self.tokens):
            return self.tokens[self.i]
        return ("eof", None, len(self.text))

    def next(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect(self, kind):
        tok = self.next()
        if tok[0] != kind:
            raise ParseError(f"expected {kind}, found {tok[0]}", tok[2])
        return tok


def parse_term(text):
    """Parse the ASCII term grammar.  Abbreviations: I, OMEGA, 2."""
    _init_abbreviations()
    lx = _Lexer(text)
    t = _parse_term(lx)
    tok = lx.peek()
    if tok[0] != "eof":
        raise ParseError(f"trailing input at {tok[0]}", tok[2])
    return t


def _parse_term(lx):
    kind, val, pos = lx.peek()
    if kind == "lam":
        lx.next()
        name = lx.expect("ident")[1]
        lx.expect("dot")
        return Lam(name, _parse_term(lx))
    if kind == "nu":
        lx.next()
        name = lx.expect("ident")[1]
        lx.expect("dot")
        return Nu(Name(name), _parse_term(lx))
    return _parse_choice(lx)


def _parse_choice(lx):
    t = _parse_app(lx)
    while lx.peek()[0] == "choice":
        _, (name, idx), _ = lx.next()
        u = _parse_app(lx)
        t = Choice(t, u, Name(name), idx)
    return t


def _parse_app(lx):
    t = _parse_atom(lx)
    while True:
        kind = lx.peek()[0]
        if kind in ("ident", "const", "lpar", "lbrace", "abbrev", "lam", "nu"):
            if isinstance(t, _BraceFun):
                t = CbvApp(t.fun, _parse_atom(lx))
            else:
                t = App(t, _parse_atom(lx))
        else:
            break
    if isinstance(t, _BraceFun):
        raise ParseError("CbV function {t} must be applied", lx.peek()[2])
    return t


@dataclass(frozen=True)
class _BraceFun(Term):
    fun: Term


def _parse_atom(lx):
    kind, val, pos = lx.next()
    if kind == "ident":
        return Var(val)
    if kind == "const":
        return CONST
    if kind == "abbrev":
        if val not in _ABBREVIATIONS:
            raise ParseError(f"unknown abbreviation {val}", pos)
        return _ABBREVIATIONS[val]
    if kind == "lpar":
        t = _parse_term(lx)
        lx.expect("rpar")
        return t
    if kind == "lbrace":
        t = _parse_term(lx)
        lx.expect("rbrace")
        return _BraceFun(t)
    if kind == "lam":
        name = lx.expect("ident")[1]
        lx.expect("dot")
        return Lam(name, _parse_term(lx))
    if kind == "nu":
        name = lx.expect("ident")[1]
        lx.expect("dot")
        return Nu(Name(name), _parse_term(lx))
    raise ParseError(f"unexpected token {kind}", pos)


def print_term(t):
    """Inverse of parse_term up to whitespace (and alpha for reparse)."""

    def atom(t):
        if isinstance(t, Var):
            return t.var
        if isinstance(t, Const):
            return "#c"
        return f"({go(t)})"

    def appish(t):
        if isinstance(t, (App, CbvApp, Var, Const)):
            return go(t)
        return atom(t)

    def go(t):
        if isinstance(t, Var):
            return t.var
        if isinstance(t, Const):
            return "#c"
        if isinstance(t, Lam):
            return f"\\{t.var}. {go(t.body)}"
        if isinstance(t, Nu):
            return f"nu {t.name}. {go(t.body)}"
        if isinstance(t, App):
            return f"{appish(t.fun)} {atom(t.arg)}"
        if isinstance(t, CbvApp):
            return f"{{{go(t.fun)}}} {atom(t.arg)}"
        if isinstance(t, Choice):
            left = atom(t.left) if isinstance(t.left, Choice) else appish_or_atom(t.left)
            right = appish_or_atom(t.right)
            return f"{left} (+{t.name}.{t.index}) {right}"
        raise TypeError(t)

    def appish_or_atom(t):
        if isinstance(t, (Lam, Nu, Choice)):
            return atom(t)
        return go(t)

    return go(t)
