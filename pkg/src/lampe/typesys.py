"""Counting-quantified type systems: the single-quantifier system (CN), the
CbV system with quantifier lists (CBV), and the intersection system (INT).

A derivation is an explicit tree that gets checked, never inferred: semantic
side conditions (entailment and measure bounds) are discharged by the exact
Boolean oracle.  Constraint positions prescribed as conjunctions by the
counting rules are matched up to logical equivalence, since rules elsewhere
may quote an equivalent formula.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (
    ParseError,
    PreconditionError,
    RuleShapeError,
    SideConditionError,
    SystemMismatchError,
)
from . import formulas as fm
from .formulas import (
    And,
    Atom,
    BoolFormula,
    Not,
    TOP,
    conj,
    disj,
    entails,
    equivalent,
    formula_names,
    measure,
    parse_formula,
    parse_rational,
    print_formula,
    satisfiable,
)
from .terms import (
    App,
    CbvApp,
    Choice,
    Lam,
    Name,
    Nu,
    Term,
    Var,
    alpha_eq,
    free_names,
    parse_term,
    print_term,
    substitute,
)

CN = "cn"
CBV = "cbv"
INT = "int"

GROUND_O = "o"
GROUND_HN = "hn"
GROUND_N = "n"


# ---------------------------------------------------------------------------
# Types


@dataclass(frozen=True)
class Type:
    pass


@dataclass(frozen=True)
class Ground(Type):
    kind: str


@dataclass(frozen=True)
class Arrow(Type):
    dom: object  # Type, or Mset in the intersection system
    cod: Type


@dataclass(frozen=True)
class Counted(Type):
    q: Fraction
    body: Type


@dataclass(frozen=True)
class Mset:
    items: tuple

    def __len__(self):
        return len(self.items)


O = Ground(GROUND_O)
HN = Ground(GROUND_HN)
N = Ground(GROUND_N)


def mk_mset(items):
    return Mset(tuple(sorted(items, key=print_type)))


def print_type(t):
    if isinstance(t, Ground):
        return t.kind
    if isinstance(t, Counted):
        q = t.q
        return f"C[{q.numerator}/{q.denominator}] {print_type(t.body)}"
    if isinstance(t, Arrow):
        return f"({print_type(t.dom)} => {print_type(t.cod)})"
    if isinstance(t, Mset):
        return "[" + ", ".join(print_type(i) for i in t.items) + "]"
    raise TypeError(t)


def parse_type(text):
    pos = [0]
    n = len(text)

    def skip():
        while pos[0] < n and text[pos[0]].isspace():
            pos[0] += 1

    def parse():
        skip()
        if text.startswith("C[", pos[0]):
            pos[0] += 2
            close = text.index("]", pos[0])
            q = parse_rational(text[pos[0] : close])
            pos[0] = close + 1
            return Counted(q, parse())
        return parse_atom()

    def parse_atom():
        skip()
        if pos[0] >= n:
            raise ParseError("unexpected end of type", pos[0])
        ch = text[pos[0]]
        if ch == "(":
            pos[0] += 1
            dom = parse_arg()
            skip()
            if not text.startswith("=>", pos[0]):
                raise ParseError("expected '=>'", pos[0])
            pos[0] += 2
            cod = parse()
            skip()
            if pos[0] >= n or text[pos[0]] != ")":
                raise ParseError("expected ')'", pos[0])
            pos[0] += 1
            return Arrow(dom, cod)
        if ch == "[":
            return parse_mset()
        m = re.match(r"(hn|n|o)\b", text[pos[0] :])
        if m:
            pos[0] += m.end()
            return Ground(m.group(1))
        raise ParseError(f"unexpected character {ch!r} in type", pos[0])

    def parse_mset():
        pos[0] += 1  # consume '['
        items = []
        skip()
        if pos[0] < n and text[pos[0]] == "]":
            pos[0] += 1
            return mk_mset(items)
        while True:
            items.append(parse())
            skip()
            if pos[0] < n and text[pos[0]] == ",":
                pos[0] += 1
                continue
            if pos[0] < n and text[pos[0]] == "]":
                pos[0] += 1
                return mk_mset(items)
            raise ParseError("expected ',' or ']' in multiset", pos[0])

    def parse_arg():
        skip()
        if pos[0] < n and text[pos[0]] == "[":
            return parse_mset()
        return parse()

    out = parse()
    skip()
    if pos[0] != n:
        raise ParseError("trailing input in type", pos[0])
    return out


def _check_q(q):
    if not (0 < q <= 1):
        raise RuleShapeError(f"counting exponent {q} outside (0,1]")


def validate_type(t, system):
    """Structural validity of a type for the given system."""
    if system == CN:
        if not isinstance(t, Counted):
            raise RuleShapeError(f"CN type must carry one quantifier: {print_type(t)}")
        _check_q(t.q)
        _validate_cn_sigma(t.body)
    elif system == CBV:
        while isinstance(t, Counted):
            _check_q(t.q)
            t = t.body
        _validate_cbv_sigma(t)
    elif system == INT:
        if not isinstance(t, Counted):
            raise RuleShapeError(f"INT type must carry one quantifier: {print_type(t)}")
        _check_q(t.q)
        _validate_int_sigma(t.body)
    else:
        raise ValueError(system)


def _validate_cn_sigma(s):
    if isinstance(s, Ground):
        if s.kind != GROUND_O:
            raise RuleShapeError(f"ground type {s.kind} is not a CN type")
        return
    if isinstance(s, Arrow):
        if isinstance(s.dom, Mset):
            raise RuleShapeError("multiset argument outside the intersection system")
        validate_type(s.dom, CN)
        _validate_cn_sigma(s.cod)
        return
    raise RuleShapeError(f"not a CN simple type: {print_type(s)}")


def _validate_cbv_sigma(s):
    if isinstance(s, Ground):
        if s.kind != GROUND_O:
            raise RuleShapeError(f"ground type {s.kind} is not a CBV type")
        return
    if isinstance(s, Arrow):
        if isinstance(s.dom, Mset):
            raise RuleShapeError("multiset argument outside the intersection system")
        validate_type(s.dom, CBV)
        _validate_cbv_sigma(s.cod)
        return
    raise RuleShapeError(f"quantifier right of an arrow: {print_type(s)}")


def _validate_int_sigma(s):
    if isinstance(s, Ground):
        return
    if isinstance(s, Arrow):
        if not isinstance(s.dom, Mset):
            raise RuleShapeError("intersection arrows take multiset arguments")
        for item in s.dom.items:
            validate_type(item, INT)
        _validate_int_sigma(s.cod)
        return
    raise RuleShapeError(f"not an INT simple type: {print_type(s)}")


def strip_prefix(t):
    """(list of exponents, quantifier-free body)."""
    qs = []
    while isinstance(t, Counted):
        qs.append(t.q)
        t = t.body
    return qs, t


def wrap_prefix(qs, body):
    for q in reversed(qs):
        body = Counted(q, body)
    return body


def prefix_product(t):
    qs, _ = strip_prefix(t)
    out = Fraction(1)
    for q in qs:
        out *= q
    return out


# ---------------------------------------------------------------------------
# Subtyping, rank, balance, safety


def subtype(s, t):
    """The preorder of the intersection system."""
    if isinstance(s, Ground) and isinstance(t, Ground):
        return s.kind == t.kind
    if isinstance(s, Counted) and isinstance(t, Counted):
        return s.q <= t.q and subtype(s.body, t.body)
    if isinstance(s, Arrow) and isinstance(t, Arrow):
        return subtype(s.cod, t.cod) and mset_subtype(t.dom, s.dom)
    return False


def mset_subtype(source, target):
    """source <=* target: an injection of target's elements into source's
    with elementwise subtyping."""
    src = list(source.items) if isinstance(source, Mset) else [source]
    tgt = list(target.items) if isinstance(target, Mset) else [target]
    if len(tgt) > len(src):
        return False

    def assign(i, used):
        if i == len(tgt):
            return True
        for j in range(len(src)):
            if j not in used and subtype(src[j], tgt[i]):
                if assign(i + 1, used | {j}):
                    return True
        return False

    return assign(0, frozenset())


def srank(t):
    """The rank used by balancedness."""
    if isinstance(t, Counted):
        return t.q
    if isinstance(t, Ground):
        if t.kind == GROUND_HN:
            return Fraction(0)
        return Fraction(1)  # n and o; o never feeds a balance product
    if isinstance(t, Mset):
        if not t.items:
            return Fraction(0)
        return max(srank(i) for i in t.items)
    if isinstance(t, Arrow):
        return Fraction(1)
    raise TypeError(t)


def _arrow_args(sigma):
    args = []
    while isinstance(sigma, Arrow):
        args.append(sigma.dom)
        sigma = sigma.cod
    return args


def is_balanced(t):
    if isinstance(t, Ground):
        return True
    if isinstance(t, Mset):
        return all(is_balanced(i) for i in t.items)
    if isinstance(t, Arrow):
        return all(is_balanced(a) for a in _arrow_args(t))
    if isinstance(t, Counted):
        args = _arrow_args(t.body)
        if not all(is_balanced(a) for a in args):
            return False
        bound = Fraction(1)
        for a in args:
            bound *= srank(a)
        return t.q <= bound
    raise TypeError(t)


def _mentions_unsafe(t):
    if isinstance(t, Ground):
        return t.kind == GROUND_HN
    if isinstance(t, Mset):
        return not t.items or any(_mentions_unsafe(i) for i in t.items)
    if isinstance(t, Arrow):
        return _mentions_unsafe(t.dom) or _mentions_unsafe(t.cod)
    if isinstance(t, Counted):
        return _mentions_unsafe(t.body)
    raise TypeError(t)


def is_safe(t):
    """Balanced and free of hn and of the empty multiset."""
    return is_balanced(t) and not _mentions_unsafe(t)


# ---------------------------------------------------------------------------
# Judgements and derivations


@dataclass(frozen=True)
class Judgement:
    ctx: tuple  # tuple of (var, Type-or-Mset)
    names: frozenset
    term: Term
    constraint: BoolFormula
    type: object

    def ctx_map(self):
        return dict(self.ctx)

    def format(self):
        ctx = ", ".join(f"{x}: {print_type(a)}" for x, a in self.ctx)
        names = ",".join(sorted(str(n) for n in self.names))
        return (
            f"{ctx} |-{{{names}}} {print_term(self.term)} : "
            f"{print_formula(self.constraint)} ~> {print_type(self.type)}"
        )


def same_judgement(j1, j2):
    return (
        j1.ctx_map() == j2.ctx_map()
        and j1.names == j2.names
        and alpha_eq(j1.term, j2.term)
        and j1.constraint == j2.constraint
        and j1.type == j2.type
    )


@dataclass(frozen=True)
class TypingDerivation:
    rule: str
    judgement: Judgement
    premises: tuple = ()
    side: dict = field(default_factory=dict)


RULES_BY_SYSTEM = {
    CN: {"id", "or", "plus-l", "plus-r", "lam", "app", "mu-prime"},
    CBV: {"id", "or", "plus-l", "plus-r", "lam", "app", "cbv", "mu"},
    INT: {
        "id-sub",
        "or",
        "plus-l",
        "plus-r",
        "lam",
        "app-int",
        "mu-sigma",
        "hn",
        "n",
    },
}


def _shape(cond, message):
    if not cond:
        raise RuleShapeError(message)


def _side(cond, message):
    if not cond:
        raise SideConditionError(message)


def _check_judgement_wf(j, system):
    seen = set()
    for x, a in j.ctx:
        _shape(x not in seen, f"duplicate context variable {x}")
        seen.add(x)
        if isinstance(a, Mset):
            _shape(system == INT, "multiset declaration outside INT")
            for item in a.items:
                validate_type(item, system)
        else:
            _shape(system != INT, "INT declarations are multisets")
            validate_type(a, system)
    _shape(
        free_names(j.term) <= j.names,
        f"term names escape the judgement name set in {j.format()}",
    )
    _shape(
        formula_names(j.constraint) <= j.names,
        "constraint names escape the judgement name set",
    )
    validate_type(j.type, system)


def check_derivation(d, system):
    """Validate every node of the derivation; returns the root judgement."""
    if system not in RULES_BY_SYSTEM:
        raise ValueError(f"unknown system {system!r}")
    _check_node(d, system)
    return d.judgement


def _check_node(d, system):
    if d.rule not in RULES_BY_SYSTEM[system]:
        raise SystemMismatchError(f"rule {d.rule} does not belong to {system}")
    j = d.judgement
    _check_judgement_wf(j, system)
    for p in d.premises:
        _check_node(p, system)
    checker = _RULE_CHECKERS.get(d.rule)
    if checker is None:
        raise RuleShapeError(f"unknown rule {d.rule}")
    checker(d, system)


def _same_env(j, p):
    _shape(p.ctx_map() == j.ctx_map(), "premise context differs")
    _shape(p.names == j.names, "premise name set differs")


def _check_id(d, system):
    j = d.judgement
    _shape(not d.premises, "id takes no premises")
    _shape(isinstance(j.term, Var), "id subject must be a variable")
    declared = j.ctx_map().get(j.term.var)
    _shape(declared is not None, f"variable {j.term.var} not in context")
    _side(declared == j.type, "id type differs from the declaration")


def _check_id_sub(d, system):
    j = d.judgement
    _shape(not d.premises, "id takes no premises")
    _shape(isinstance(j.term, Var), "id subject must be a variable")
    declared = j.ctx_map().get(j.term.var)
    _shape(isinstance(declared, Mset), f"variable {j.term.var} not declared")
    _side(
        any(subtype(s, j.type) for s in declared.items),
        "no declared type is a subtype of the conclusion type",
    )


def _check_or(d, system):
    j = d.judgement
    for p in d.premises:
        _same_env(j, p.judgement)
        _shape(alpha_eq(p.judgement.term, j.term), "or premise subject differs")
        _shape(p.judgement.type == j.type, "or premise type differs")
    _side(
        entails(j.constraint, disj([p.judgement.constraint for p in d.premises])),
        "constraint does not entail the disjunction of the premises",
    )


def _check_plus(d, system, left):
    j = d.judgement
    _shape(len(d.premises) == 1, "choice rule takes one premise")
    _shape(isinstance(j.term, Choice), "subject must be a choice")
    p = d.premises[0].judgement
    _same_env(j, p)
    _shape(j.term.name in j.names, "choice name must be in the name set")
    branch = j.term.left if left else j.term.right
    _shape(alpha_eq(p.term, branch), "premise subject is not the chosen branch")
    _shape(p.type == j.type, "premise type differs")
    pivot = Atom(j.term.name, j.term.index)
    literal = pivot if left else Not(pivot)
    _side(
        entails(j.constraint, And(literal, p.constraint)),
        "constraint does not entail literal and premise constraint",
    )


def _check_plus_l(d, system):
    _check_plus(d, system, left=True)


def _check_plus_r(d, system):
    _check_plus(d, system, left=False)


def _arrow_parts(t, system):
    qs, body = strip_prefix(t)
    _shape(isinstance(body, Arrow), f"expected an arrow under {print_type(t)}")
    if system in (CN, INT):
        _shape(len(qs) == 1, "exactly one quantifier expected")
    return qs, body


def _check_lam(d, system):
    j = d.judgement
    _shape(len(d.premises) == 1, "lam takes one premise")
    _shape(isinstance(j.term, Lam), "subject must be a lambda")
    p = d.premises[0].judgement
    _shape(p.names == j.names, "premise name set differs")
    qs, body = _arrow_parts(j.type, system)
    ctx = j.ctx_map()
    pctx = p.ctx_map()
    extra = [x for x in pctx if x not in ctx]
    _shape(len(extra) == 1, "premise must declare exactly the bound variable")
    y = extra[0]
    _shape({x: a for x, a in pctx.items() if x != y} == ctx, "premise context differs")
    _shape(pctx[y] == body.dom, "declared argument type differs from the arrow")
    _shape(
        alpha_eq(p.term, substitute(j.term.body, j.term.var, Var(y)))
        if y != j.term.var
        else alpha_eq(p.term, j.term.body),
        "premise subject is not the lambda body",
    )
    _shape(p.type == wrap_prefix(qs, body.cod), "premise type must be the codomain")
    _shape(p.constraint == j.constraint, "lam keeps the constraint")


def _check_app(d, system):
    j = d.judgement
    _shape(len(d.premises) == 2, "app takes two premises")
    _shape(isinstance(j.term, App), "subject must be an application")
    pf, pa = (p.judgement for p in d.premises)
    _same_env(j, pf)
    _same_env(j, pa)
    _shape(alpha_eq(pf.term, j.term.fun), "function premise subject differs")
    _shape(alpha_eq(pa.term, j.term.arg), "argument premise subject differs")
    qs, body = _arrow_parts(pf.type, system)
    _shape(pa.type == body.dom, "argument type differs from the arrow domain")
    _shape(j.type == wrap_prefix(qs, body.cod), "conclusion type must be the codomain")
    _side(
        entails(j.constraint, And(pf.constraint, pa.constraint)),
        "constraint does not entail the premise conjunction",
    )


def _check_app_int(d, system):
    j = d.judgement
    _shape(len(d.premises) >= 1, "intersection app takes the function premise")
    _shape(isinstance(j.term, App), "subject must be an application")
    pf = d.premises[0].judgement
    _same_env(j, pf)
    _shape(alpha_eq(pf.term, j.term.fun), "function premise subject differs")
    qs, body = _arrow_parts(pf.type, system)
    _shape(isinstance(body.dom, Mset), "intersection arrow expected")
    arg_premises = [p.judgement for p in d.premises[1:]]
    _shape(
        len(arg_premises) == len(body.dom.items),
        "one argument premise per multiset element",
    )
    for pa in arg_premises:
        _same_env(j, pa)
        _shape(alpha_eq(pa.term, j.term.arg), "argument premise subject differs")
        _shape(pa.constraint == j.constraint, "argument premise keeps the constraint")
    _shape(
        mk_mset([pa.type for pa in arg_premises]) == body.dom,
        "argument premise types do not match the multiset",
    )
    _shape(pf.constraint == j.constraint, "function premise keeps the constraint")
    _shape(j.type == wrap_prefix(qs, body.cod), "conclusion type must be the codomain")


def _get_scale(d):
    s = d.side.get("scale", Fraction(1))
    if not isinstance(s, Fraction):
        s = parse_rational(s)
    _side(0 < s <= 1, f"scale {s} outside (0,1]")
    return s


def _check_cbv(d, system):
    j = d.judgement
    _shape(len(d.premises) == 2, "cbv app takes two premises")
    _shape(isinstance(j.term, CbvApp), "subject must be a CbV application")
    pf, pa = (p.judgement for p in d.premises)
    _same_env(j, pf)
    _same_env(j, pa)
    _shape(alpha_eq(pf.term, j.term.fun), "function premise subject differs")
    _shape(alpha_eq(pa.term, j.term.arg), "argument premise subject differs")
    qs, body = _arrow_parts(pf.type, system)
    _shape(
        isinstance(pa.type, Counted) and pa.type.body == body.dom,
        "argument must have exactly one quantifier over the arrow domain",
    )
    s = _get_scale(d)
    expected = Counted(pa.type.q * s, wrap_prefix(qs, body.cod))
    _shape(j.type == expected, f"conclusion type must be {print_type(expected)}")
    _side(
        entails(j.constraint, And(pf.constraint, pa.constraint)),
        "constraint does not entail the premise conjunction",
    )


def _nu_common(d):
    j = d.judgement
    _shape(len(d.premises) >= 1, "counting rules take at least one premise")
    _shape(isinstance(j.term, Nu), "subject must be a generator")
    a = j.term.name
    _shape(a not in j.names, "generator name already in scope")
    for p in d.premises:
        pj = p.judgement
        _shape(pj.names == j.names | {a}, "premise name set must add the generator name")
        _shape(pj.ctx_map() == j.ctx_map(), "premise context differs")
        _shape(alpha_eq(pj.term, j.term.body), "premise subject is not the body")
    return a


def _local_formula(d, key, a):
    f = d.side.get(key)
    _shape(f is not None, f"missing side formula {key!r}")
    if isinstance(f, str):
        f = parse_formula(f)
    _side(formula_names(f) <= {a}, f"side formula {key!r} must only use the bound name")
    return f


def _check_mu(d, system):
    j = d.judgement
    a = _nu_common(d)
    _shape(len(d.premises) == 1, "mu takes one premise")
    p = d.premises[0].judgement
    dloc = _local_formula(d, "d", a)
    q = d.side.get("q")
    _shape(q is not None, "missing side rational 'q'")
    if not isinstance(q, Fraction):
        q = parse_rational(q)
    _side(measure(dloc) >= q, "measure bound fails")
    _side(
        equivalent(p.constraint, And(j.constraint, dloc)),
        "premise constraint is not the conclusion constraint plus the local part",
    )
    _shape(j.type == Counted(q, p.type), "conclusion must prefix the premise type")


def _check_mu_prime(d, system):
    j = d.judgement
    a = _nu_common(d)
    _shape(len(d.premises) == 1, "mu-prime takes one premise")
    p = d.premises[0].judgement
    dloc = _local_formula(d, "d", a)
    s = d.side.get("q", d.side.get("s"))
    _shape(s is not None, "missing side rational 'q'")
    if not isinstance(s, Fraction):
        s = parse_rational(s)
    _side(measure(dloc) >= s, "measure bound fails")
    _side(
        equivalent(p.constraint, And(j.constraint, dloc)),
        "premise constraint is not the conclusion constraint plus the local part",
    )
    _shape(isinstance(p.type, Counted), "premise must carry its quantifier")
    _shape(
        j.type == Counted(p.type.q * s, p.type.body),
        "conclusion exponent must be the product",
    )


def _check_mu_sigma(d, system):
    j = d.judgement
    a = _nu_common(d)
    cases = d.side.get("cases")
    _shape(isinstance(cases, (list, tuple)) and cases, "mu-sigma needs its case list")
    _shape(len(cases) == len(d.premises), "one case per premise")
    _side(a not in formula_names(j.constraint), "bound name occurs in the constraint")
    total = Fraction(0)
    sigma = None
    parsed = []
    for (draw, sraw), p in zip(cases, d.premises):
        dloc = parse_formula(draw) if isinstance(draw, str) else draw
        s = parse_rational(sraw) if not isinstance(sraw, Fraction) else sraw
        _side(formula_names(dloc) <= {a}, "case formula must only use the bound name")
        _side(measure(dloc) >= s, "case measure bound fails")
        pj = p.judgement
        _side(
            equivalent(pj.constraint, And(j.constraint, dloc)),
            "premise constraint is not the conclusion constraint plus its case",
        )
        _shape(isinstance(pj.type, Counted), "premises carry one quantifier")
        if sigma is None:
            sigma = pj.type.body
        _shape(pj.type.body == sigma, "premises must share the quantified type")
        total += pj.type.q * s
        parsed.append(dloc)
    for d1, d2 in itertools.combinations(parsed, 2):
        _side(entails(And(d1, d2), fm.BOT), "case formulas must be pairwise disjoint")
    _shape(j.type == Counted(total, sigma), "conclusion exponent must be the sum")


def _check_hn(d, system):
    j = d.judgement
    _shape(len(d.premises) == 1, "hn takes one premise")
    p = d.premises[0].judgement
    _same_env(j, p)
    _shape(alpha_eq(p.term, j.term), "premise subject differs")
    _shape(p.constraint == j.constraint, "hn keeps the constraint")
    _shape(isinstance(p.type, Counted), "premise carries one quantifier")
    _shape(j.type == Counted(p.type.q, HN), "conclusion must be the hn ground type")


def _check_n(d, system):
    j = d.judgement
    _shape(len(d.premises) == 1, "n takes one premise")
    p = d.premises[0].judgement
    _same_env(j, p)
    _shape(alpha_eq(p.term, j.term), "premise subject differs")
    _shape(p.constraint == j.constraint, "n keeps the constraint")
    _shape(isinstance(p.type, Counted), "premise carries one quantifier")
    _side(is_safe(p.type.body), "the quantified type must be safe")
    _shape(j.type == Counted(p.type.q, N), "conclusion must be the n ground type")


_RULE_CHECKERS = {
    "id": _check_id,
    "id-sub": _check_id_sub,
    "or": _check_or,
    "plus-l": _check_plus_l,
    "plus-r": _check_plus_r,
    "lam": _check_lam,
    "app": _check_app,
    "app-int": _check_app_int,
    "cbv": _check_cbv,
    "mu": _check_mu,
    "mu-prime": _check_mu_prime,
    "mu-sigma": _check_mu_sigma,
    "hn": _check_hn,
    "n": _check_n,
}


# ---------------------------------------------------------------------------
# The admissible generalized counting rule


def _minterms(name, indices, constraint_part):
    """Complete sign patterns over the given indices consistent with the
    conjunction-of-literals part for this name."""
    out = []
    for bits in itertools.product((0, 1), repeat=len(indices)):
        val = {(name, i): b for i, b in zip(indices, bits)}
        if fm.eval_formula(constraint_part, val):
            lits = [
                Atom(name, i) if b == 1 else Not(Atom(name, i))
                for i, b in zip(indices, bits)
            ]
            out.append(conj(lits))
    return out


def apply_mu_star(d, order=None):
    """Discharge every name of the root judgement at once, scaling the
    counting exponent by the exact measure of the root constraint.

    The construction normalizes the constraint into pairwise-disjoint
    per-name minterm rows and folds them with the summing counting rule,
    name by name, innermost first.
    """
    j = check_derivation(d, INT)
    b = j.constraint
    if not isinstance(j.type, Counted):
        raise PreconditionError("root type must carry one quantifier")
    if not satisfiable(b):
        raise PreconditionError("the root constraint is unsatisfiable")
    if formula_names(b) - j.names:
        raise PreconditionError("constraint names escape the judgement")
    names = list(order) if order is not None else sorted(
        j.names, key=lambda n: n.seq
    )
    if set(names) != set(j.names):
        raise PreconditionError("name order must enumerate the judgement names")

    indices = {
        a: sorted(i for (n, i) in fm.atoms(b) if n is a) for a in names
    }
    rows = [[]]
    for a in names:
        per_name = _minterms(a, indices[a], TOP)
        rows = [row + [m] for row in rows for m in per_name]
    kept = []
    seen = set()
    for row in rows:
        formula = conj(row) if row else TOP
        if not satisfiable(And(formula, b)):
            continue
        if entails(formula, b):
            key = tuple(print_formula(m) for m in row)
            if key not in seen:
                seen.add(key)
                kept.append(row)
        else:
            raise PreconditionError(
                "constraint is not a union of complete minterm rows"
            )
    # every satisfiable complete row is either inside or outside b, so the
    # kept rows partition the constraint exactly

    def weaken(deriv, new_constraint, names_set):
        jj = deriv.judgement
        new_j = Judgement(jj.ctx, frozenset(names_set), jj.term, new_constraint, jj.type)
        return TypingDerivation("or", new_j, (deriv,), {})

    level = [
        (row, weaken(d, conj(row) if row else TOP, j.names)) for row in kept
    ]
    current_names = set(j.names)
    for a in reversed(names):
        current_names = current_names - {a}
        groups = {}
        for row, deriv in level:
            prefix = tuple(print_formula(m) for m in row[:-1])
            groups.setdefault(prefix, []).append((row, deriv))
        new_level = []
        for group in groups.values():
            prefix_row = group[0][0][:-1]
            prefix_formula = conj(prefix_row) if prefix_row else TOP
            cases = []
            premises = []
            total = Fraction(0)
            for row, deriv in group:
                dloc = row[-1]
                s = measure(dloc)
                pj = deriv.judgement
                premises.append(
                    TypingDerivation(
                        "or",
                        Judgement(
                            pj.ctx,
                            pj.names,
                            pj.term,
                            And(prefix_formula, dloc),
                            pj.type,
                        ),
                        (deriv,),
                        {},
                    )
                )
                cases.append((dloc, s))
                total += pj.type.q * s
            root_j = Judgement(
                premises[0].judgement.ctx,
                frozenset(current_names),
                Nu(a, premises[0].judgement.term),
                prefix_formula,
                Counted(total, premises[0].judgement.type.body),
            )
            node = TypingDerivation(
                "mu-sigma", root_j, tuple(premises), {"cases": cases}
            )
            new_level.append((prefix_row, node))
        level = new_level
    assert len(level) == 1
    _, result = level[0]
    final_j = result.judgement
    result = TypingDerivation(
        "or",
        Judgement(final_j.ctx, final_j.names, final_j.term, TOP, final_j.type),
        (result,),
        {},
    )
    check_derivation(result, INT)
    expected = Counted(j.type.q * measure(b), j.type.body)
    if result.judgement.type != expected:
        raise PreconditionError(
            f"constructed {print_type(result.judgement.type)}, "
            f"expected {print_type(expected)}"
        )
    return result


# ---------------------------------------------------------------------------
# JSON interchange


def _arg_to_text(a):
    return print_type(a)


def derivation_to_json(d):
    j = d.judgement
    side = {}
    for key, value in d.side.items():
        if key == "cases":
            side[key] = [
                [print_formula(f) if isinstance(f, BoolFormula) else f,
                 fm.format_rational(s) if isinstance(s, Fraction) else s]
                for f, s in value
            ]
        elif isinstance(value, BoolFormula):
            side[key] = print_formula(value)
        elif isinstance(value, Fraction):
            side[key] = fm.format_rational(value)
        else:
            side[key] = value
    return {
        "rule": d.rule,
        "judgement": {
            "ctx": [[x, _arg_to_text(a)] for x, a in j.ctx],
            "names": sorted(str(n) for n in j.names),
            "term": print_term(j.term),
            "constraint": print_formula(j.constraint),
            "type": print_type(j.type),
        },
        "side": side,
        "premises": [derivation_to_json(p) for p in d.premises],
    }


def _parse_arg(text):
    text = text.strip()
    if text.startswith("["):
        return parse_type(text)
    return parse_type(text)


def judgement_from_json(obj):
    ctx = tuple((x, _parse_arg(a)) for x, a in obj["ctx"])
    names = frozenset(Name(n) for n in obj["names"])
    return Judgement(
        ctx,
        names,
        parse_term(obj["term"]),
        parse_formula(obj["constraint"]),
        parse_type(obj["type"]),
    )


def derivation_from_json(obj):
    side = dict(obj.get("side", {}))
    if "cases" in side:
        side["cases"] = [
            (parse_formula(f), parse_rational(s)) for f, s in side["cases"]
        ]
    if "d" in side:
        side["d"] = parse_formula(side["d"])
    for key in ("q", "s", "scale"):
        if key in side:
            side[key] = parse_rational(side[key])
    return TypingDerivation(
        obj["rule"],
        judgement_from_json(obj["judgement"]),
        tuple(derivation_from_json(p) for p in obj.get("premises", [])),
        side,
    )
