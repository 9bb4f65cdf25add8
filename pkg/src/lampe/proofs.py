"""Natural deduction for the counting-quantified implicational logic:
checking, normalization, and the proof-term translation into the CbV
type system.

Sequents are (hypothesis list, Boolean constraint, formula).  The identity
rule carries the index of the hypothesis it uses; the mixing rule carries its
pivot atom; the counting introduction carries its local one-name constraint
and bound.  Normalization rewrites the proof tree: the two cuts go through an
inlining substitution, and the mixing rule permutes past every other rule.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import IllFormedError, ParseError, RuleShapeError, SideConditionError
from . import formulas as fm
from .formulas import (
    And,
    Atom,
    BoolFormula,
    Not,
    Or,
    entails,
    equivalent,
    formula_names,
    measure,
    parse_formula,
    parse_rational,
    print_formula,
)
from .rewrite import PE_BRACES, apply_rule_at
from .terms import (
    App,
    CbvApp,
    CONST,
    Choice,
    Lam,
    Name,
    Nu,
    Var,
    alpha_eq,
    print_term,
)
from .typesys import (
    Arrow,
    CBV,
    Counted,
    Judgement,
    O,
    TypingDerivation,
    check_derivation,
    strip_prefix,
    wrap_prefix,
)


# ---------------------------------------------------------------------------
# Formulas of the logic


@dataclass(frozen=True)
class Formula:
    pass


@dataclass(frozen=True)
class PropVar(Formula):
    name: str


@dataclass(frozen=True)
class Implies(Formula):
    antecedent: Formula
    consequent: Formula


@dataclass(frozen=True)
class Count(Formula):
    q: Fraction
    body: Formula


def parse_proof_formula(text):
    pos = [0]
    n = len(text)

    def skip():
        while pos[0] < n and text[pos[0]].isspace():
            pos[0] += 1

    def parse_impl():
        left = parse_prefix()
        skip()
        if text.startswith("->", pos[0]):
            pos[0] += 2
            return Implies(left, parse_impl())
        return left

    def parse_prefix():
        skip()
        if text.startswith("C[", pos[0]):
            pos[0] += 2
            close = text.index("]", pos[0])
            q = parse_rational(text[pos[0] : close])
            pos[0] = close + 1
            return Count(q, parse_prefix())
        return parse_atom()

    def parse_atom():
        skip()
        if pos[0] < n and text[pos[0]] == "(":
            pos[0] += 1
            out = parse_impl()
            skip()
            if pos[0] >= n or text[pos[0]] != ")":
                raise ParseError("expected ')'", pos[0])
            pos[0] += 1
            return out
        m = re.match(r"[a-zA-Z][a-zA-Z0-9_]*", text[pos[0] :])
        if not m:
            raise ParseError("expected a propositional variable", pos[0])
        pos[0] += m.end()
        return PropVar(m.group(0))

    out = parse_impl()
    skip()
    if pos[0] != n:
        raise ParseError("trailing input in formula", pos[0])
    return out


def print_proof_formula(a):
    if isinstance(a, PropVar):
        return a.name
    if isinstance(a, Count):
        inner = print_proof_formula(a.body)
        if isinstance(a.body, Implies):
            inner = f"({inner})"
        return f"C[{a.q.numerator}/{a.q.denominator}] {inner}"
    if isinstance(a, Implies):
        left = print_proof_formula(a.antecedent)
        if isinstance(a.antecedent, Implies):
            left = f"({left})"
        return f"{left} -> {print_proof_formula(a.consequent)}"
    raise TypeError(a)


def strip_counts(a):
    qs = []
    while isinstance(a, Count):
        qs.append(a.q)
        a = a.body
    return qs, a


# ---------------------------------------------------------------------------
# Proofs


@dataclass(frozen=True)
class Sequent:
    ctx: tuple  # tuple of Formula
    constraint: BoolFormula
    formula: Formula

    def format(self):
        ctx = ", ".join(print_proof_formula(a) for a in self.ctx)
        return (
            f"{ctx} |- {print_formula(self.constraint)} ~> "
            f"{print_proof_formula(self.formula)}"
        )


@dataclass(frozen=True)
class ProofDerivation:
    rule: str  # id | bot | m | imp-i | imp-e | ci | ce
    sequent: Sequent
    premises: tuple = ()
    side: dict = field(default_factory=dict)


def _shape(cond, message):
    if not cond:
        raise RuleShapeError(message)


def _side_ok(cond, message):
    if not cond:
        raise SideConditionError(message)


def check_proof(p):
    """Validate every rule application; returns the root sequent."""
    _check_proof_node(p)
    return p.sequent


def _check_proof_node(p):
    for q in p.premises:
        _check_proof_node(q)
    s = p.sequent
    if p.rule == "id":
        _shape(not p.premises, "id takes no premises")
        idx = p.side.get("index")
        _shape(idx is not None and 0 <= idx < len(s.ctx), "bad hypothesis index")
        _shape(s.ctx[idx] == s.formula, "id concludes a hypothesis")
    elif p.rule == "bot":
        _shape(not p.premises, "bot takes no premises")
        _side_ok(entails(s.constraint, fm.BOT), "constraint must be unsatisfiable")
    elif p.rule == "m":
        _shape(len(p.premises) == 2, "m takes two premises")
        left, right = (q.sequent for q in p.premises)
        _shape(left.ctx == s.ctx and right.ctx == s.ctx, "m premises keep the context")
        _shape(
            left.formula == s.formula and right.formula == s.formula,
            "m premises prove the same formula",
        )
        pivot = _pivot_atom(p)
        _side_ok(
            entails(
                s.constraint,
                Or(And(left.constraint, pivot), And(right.constraint, Not(pivot))),
            ),
            "m mixing condition fails",
        )
    elif p.rule == "imp-i":
        _shape(len(p.premises) == 1, "imp-i takes one premise")
        _shape(isinstance(s.formula, Implies), "imp-i concludes an implication")
        q = p.premises[0].sequent
        _shape(q.ctx == s.ctx + (s.formula.antecedent,), "premise discharges the antecedent")
        _shape(q.constraint == s.constraint, "imp-i keeps the constraint")
        _shape(q.formula == s.formula.consequent, "premise proves the consequent")
    elif p.rule == "imp-e":
        _shape(len(p.premises) == 2, "imp-e takes two premises")
        fun, arg = (q.sequent for q in p.premises)
        _shape(fun.ctx == s.ctx and arg.ctx == s.ctx, "imp-e premises keep the context")
        _shape(
            fun.constraint == s.constraint and arg.constraint == s.constraint,
            "imp-e keeps the constraint",
        )
        _shape(isinstance(fun.formula, Implies), "major premise is an implication")
        _shape(fun.formula.antecedent == arg.formula, "minor premise matches")
        _shape(fun.formula.consequent == s.formula, "conclusion is the consequent")
    elif p.rule == "ci":
        _shape(len(p.premises) == 1, "ci takes one premise")
        _shape(isinstance(s.formula, Count), "ci concludes a counted formula")
        q = p.premises[0].sequent
        _shape(q.ctx == s.ctx, "ci keeps the context")
        _shape(q.formula == s.formula.body, "premise proves the body")
        d = _local_constraint(p)
        _side_ok(
            not (formula_names(s.constraint) & formula_names(d)),
            "local constraint shares a name with the ambient one",
        )
        _side_ok(measure(d) >= s.formula.q, "measure bound fails")
        _side_ok(
            equivalent(q.constraint, And(s.constraint, d)),
            "premise constraint is not the conclusion constraint plus the local part",
        )
    elif p.rule == "ce":
        _shape(len(p.premises) == 2, "ce takes two premises")
        major, minor = (q.sequent for q in p.premises)
        _shape(major.ctx == s.ctx, "major premise keeps the context")
        _shape(isinstance(major.formula, Count), "major premise is counted")
        _shape(
            minor.ctx == s.ctx + (major.formula.body,),
            "minor premise assumes the counted body",
        )
        _shape(
            major.constraint == s.constraint and minor.constraint == s.constraint,
            "ce keeps the constraint",
        )
        scale = _scale(p)
        _shape(
            s.formula == Count(major.formula.q * scale, minor.formula),
            "conclusion must prefix the minor formula with the scaled exponent",
        )
    else:
        raise RuleShapeError(f"unknown proof rule {p.rule}")


def _pivot_atom(p):
    pivot = p.side.get("pivot")
    _shape(pivot is not None, "m needs its pivot atom")
    if isinstance(pivot, Atom):
        return pivot
    if isinstance(pivot, str):
        name, idx = pivot.split(".")
        return Atom(Name(name), int(idx))
    name, idx = pivot
    return Atom(name if isinstance(name, Name) else Name(name), int(idx))


def _local_constraint(p):
    d = p.side.get("d")
    _shape(d is not None, "ci needs its local constraint")
    if isinstance(d, str):
        d = parse_formula(d)
    return d


def _scale(p):
    s = p.side.get("scale", Fraction(1))
    if not isinstance(s, Fraction):
        s = parse_rational(s)
    _side_ok(0 < s <= 1, f"scale {s} outside (0,1]")
    return s


# ---------------------------------------------------------------------------
# Proof transformations


def weaken_proof(p, new_constraint):
    """Replace the ambient constraint by a stronger one throughout."""
    s = p.sequent
    new_s = Sequent(s.ctx, new_constraint, s.formula)
    if p.rule in ("id", "bot"):
        return ProofDerivation(p.rule, new_s, (), p.side)
    if p.rule == "m":
        return ProofDerivation(p.rule, new_s, p.premises, p.side)
    if p.rule in ("imp-i", "imp-e", "ce"):
        return ProofDerivation(
            p.rule,
            new_s,
            tuple(weaken_proof(q, new_constraint) for q in p.premises),
            p.side,
        )
    if p.rule == "ci":
        d = _local_constraint(p)
        if formula_names(new_constraint) & formula_names(d):
            raise IllFormedError(
                "constraint strengthening collides with a bound name"
            )
        return ProofDerivation(
            p.rule,
            new_s,
            (weaken_proof(p.premises[0], And(new_constraint, d)),),
            p.side,
        )
    raise RuleShapeError(p.rule)


def ctx_insert_proof(p, pos, extra):
    """Insert unused hypotheses at a fixed position of every context,
    shifting the hypothesis indices accordingly."""
    extra = tuple(extra)
    if not extra:
        return p
    s = p.sequent
    side = p.side
    if p.rule == "id" and side["index"] >= pos:
        side = dict(side)
        side["index"] += len(extra)
    return ProofDerivation(
        p.rule,
        Sequent(s.ctx[:pos] + extra + s.ctx[pos:], s.constraint, s.formula),
        tuple(ctx_insert_proof(q, pos, extra) for q in p.premises),
        side,
    )


def rename_formula_names(f, mapping):
    if isinstance(f, Atom):
        new = mapping.get(f.name)
        return Atom(new, f.index) if new is not None else f
    if isinstance(f, Not):
        return Not(rename_formula_names(f.arg, mapping))
    if isinstance(f, And):
        return And(
            rename_formula_names(f.left, mapping),
            rename_formula_names(f.right, mapping),
        )
    if isinstance(f, Or):
        return Or(
            rename_formula_names(f.left, mapping),
            rename_formula_names(f.right, mapping),
        )
    return f


def counting_names(p):
    """Names bound by counting introductions inside a proof."""
    out = set()
    if p.rule == "ci":
        out |= formula_names(_local_constraint(p))
    for q in p.premises:
        out |= counting_names(q)
    return out


def rename_proof_names(p, mapping):
    s = p.sequent
    side = dict(p.side)
    if "d" in side:
        side["d"] = rename_formula_names(_local_constraint(p), mapping)
    if "pivot" in side:
        pivot = _pivot_atom(p)
        side["pivot"] = rename_formula_names(pivot, mapping)
    return ProofDerivation(
        p.rule,
        Sequent(s.ctx, rename_formula_names(s.constraint, mapping), s.formula),
        tuple(rename_proof_names(q, mapping) for q in p.premises),
        side,
    )


def subst_proof(p, k, replacement):
    """Inline `replacement` (proving the hypothesis at index k) into p,
    removing that hypothesis; conjoins the replacement constraint along the
    way.  Duplicated copies get variant-renamed counting names, numbered in
    proof-term order to stay in lockstep with term substitution."""
    from .terms import copy_variant_name

    du = replacement.sequent.constraint
    base_len = len(replacement.sequent.ctx)
    total = _count_uses(p, k)
    internal = counting_names(replacement) - formula_names(du)
    hits = [0]

    def plugged_copy():
        hits[0] += 1
        if total > 1 and internal and hits[0] > 1:
            mapping = {
                name: copy_variant_name(name, hits[0]) for name in internal
            }
            return rename_proof_names(replacement, mapping)
        return replacement

    def go(p):
        s = p.sequent
        new_ctx = s.ctx[:k] + s.ctx[k + 1 :]
        new_c = And(s.constraint, du)
        new_s = Sequent(new_ctx, new_c, s.formula)
        if p.rule == "id":
            idx = p.side["index"]
            if idx == k:
                extra = new_ctx[base_len:]
                copy = plugged_copy()
                return weaken_proof(
                    ctx_insert_proof(copy, base_len, extra), new_c
                )
            new_idx = idx - 1 if idx > k else idx
            return ProofDerivation("id", new_s, (), {"index": new_idx})
        if p.rule == "ce":
            # term order visits the minor (the CbV function body) first
            minor = go(p.premises[1])
            major = go(p.premises[0])
            return ProofDerivation(p.rule, new_s, (major, minor), p.side)
        return ProofDerivation(
            p.rule, new_s, tuple(go(q) for q in p.premises), p.side
        )

    return go(p)


def _count_uses(p, k):
    if p.rule == "id":
        return 1 if p.side["index"] == k else 0
    return sum(_count_uses(q, k) for q in p.premises)


# ---------------------------------------------------------------------------
# Normalization


_CUT_KINDS = (
    "beta-cut",
    "cbv-cut",
    "m-idem",
    "m-m-left",
    "m-m-right",
    "m-imp-i",
    "m-imp-e-fun",
    "m-imp-e-arg",
    "m-ci",
    "m-ce-major",
    "m-ce-minor",
)


def _redex_kind(p):
    """The redex pattern this node heads, if any (first match in the
    canonical order)."""
    if p.rule == "imp-e" and p.premises[0].rule == "imp-i":
        return "beta-cut"
    if p.rule == "ce" and p.premises[0].rule == "ci":
        return "cbv-cut"
    if p.rule == "m":
        left, right = p.premises
        if left == right:
            return "m-idem"
        pivot = _pivot_atom(p)
        if left.rule == "m" and _pivot_atom(left) == pivot:
            return "m-m-left"
        if right.rule == "m" and _pivot_atom(right) == pivot:
            return "m-m-right"
    if p.rule == "imp-i" and p.premises[0].rule == "m":
        return "m-imp-i"
    if p.rule == "imp-e":
        if p.premises[0].rule == "m":
            return "m-imp-e-fun"
        if p.premises[1].rule == "m":
            return "m-imp-e-arg"
    if p.rule == "ci" and p.premises[0].rule == "m":
        inner = p.premises[0]
        if not (
            formula_names(_local_constraint(p))
            & {_pivot_atom(inner).name}
        ):
            return "m-ci"
    if p.rule == "ce":
        if p.premises[0].rule == "m":
            return "m-ce-major"
        if p.premises[1].rule == "m":
            return "m-ce-minor"
    return None


def find_proof_redex(p, path=()):
    kind = _redex_kind(p)
    if kind is not None:
        return path, kind
    for i, q in enumerate(p.premises):
        found = find_proof_redex(q, path + (i,))
        if found is not None:
            return found
    return None


def _rewrite_at(p, path, transform):
    if not path:
        return transform(p)
    i = path[0]
    premises = list(p.premises)
    premises[i] = _rewrite_at(premises[i], path[1:], transform)
    return ProofDerivation(p.rule, p.sequent, tuple(premises), p.side)


def _mix(left, right, pivot, sequent):
    return ProofDerivation(
        "m", sequent, (left, right), {"pivot": pivot}
    )


def _transform_redex(p):
    s = p.sequent
    b = s.constraint
    kind = _redex_kind(p)
    if kind == "beta-cut":
        fun, arg = p.premises
        body = fun.premises[0]
        inlined = subst_proof(body, len(s.ctx), arg)
        return weaken_proof(inlined, b)
    if kind == "cbv-cut":
        major, minor = p.premises
        intro = major
        d = _local_constraint(intro)
        q = intro.sequent.formula.q
        scale = _scale(p)
        strengthened = weaken_proof(minor, And(b, d))
        inlined = subst_proof(strengthened, len(s.ctx), intro.premises[0])
        inlined = weaken_proof(inlined, And(b, d))
        return ProofDerivation(
            "ci", s, (inlined,), {"d": d, "q": q * scale}
        )
    if kind == "m-idem":
        return weaken_proof(p.premises[0], b)
    if kind == "m-m-left":
        inner = p.premises[0]
        return _mix(
            inner.premises[0], p.premises[1], p.side["pivot"], s
        )
    if kind == "m-m-right":
        inner = p.premises[1]
        return _mix(
            p.premises[0], inner.premises[1], p.side["pivot"], s
        )
    if kind == "m-imp-i":
        inner = p.premises[0]
        left, right = inner.premises
        new_left = ProofDerivation(
            "imp-i",
            Sequent(s.ctx, left.sequent.constraint, s.formula),
            (left,),
            {},
        )
        new_right = ProofDerivation(
            "imp-i",
            Sequent(s.ctx, right.sequent.constraint, s.formula),
            (right,),
            {},
        )
        return _mix(new_left, new_right, inner.side["pivot"], s)
    if kind in ("m-imp-e-fun", "m-imp-e-arg"):
        fun_side = kind == "m-imp-e-fun"
        inner = p.premises[0] if fun_side else p.premises[1]
        other = p.premises[1] if fun_side else p.premises[0]
        pieces = []
        for branch in inner.premises:
            bc = And(b, branch.sequent.constraint)
            fun_piece = weaken_proof(branch if fun_side else other, bc)
            arg_piece = weaken_proof(other if fun_side else branch, bc)
            pieces.append(
                ProofDerivation(
                    "imp-e", Sequent(s.ctx, bc, s.formula),
                    (fun_piece, arg_piece), {},
                )
            )
        return _mix(pieces[0], pieces[1], inner.side["pivot"], s)
    if kind == "m-ci":
        inner = p.premises[0]
        d = _local_constraint(p)
        q = p.side["q"] if "q" in p.side else s.formula.q
        pivot = _pivot_atom(inner)
        pieces = []
        for sign, branch in (
            (pivot, inner.premises[0]),
            (Not(pivot), inner.premises[1]),
        ):
            bc = And(b, sign)
            strengthened = weaken_proof(branch, And(bc, d))
            pieces.append(
                ProofDerivation(
                    "ci", Sequent(s.ctx, bc, s.formula),
                    (strengthened,), {"d": d, "q": q},
                )
            )
        return _mix(pieces[0], pieces[1], inner.side["pivot"], s)
    if kind in ("m-ce-major", "m-ce-minor"):
        major_side = kind == "m-ce-major"
        inner = p.premises[0] if major_side else p.premises[1]
        other = p.premises[1] if major_side else p.premises[0]
        pieces = []
        for branch in inner.premises:
            bc = And(b, branch.sequent.constraint)
            major_piece = weaken_proof(branch if major_side else other, bc)
            minor_piece = weaken_proof(other if major_side else branch, bc)
            pieces.append(
                ProofDerivation(
                    "ce", Sequent(s.ctx, bc, s.formula),
                    (major_piece, minor_piece), dict(p.side),
                )
            )
        return _mix(pieces[0], pieces[1], inner.side["pivot"], s)
    raise IllFormedError(f"no redex at this node")


def normalize_step(p):
    """One leftmost-outermost normalization step; None when normal."""
    check_proof(p)
    found = find_proof_redex(p)
    if found is None:
        return None
    path, _ = found
    out = _rewrite_at(p, path, _transform_redex)
    check_proof(out)
    return out


def normalize_proof(p, max_steps=10000):
    steps = 0
    while steps < max_steps:
        nxt = normalize_step(p)
        if nxt is None:
            return p, steps
        p = nxt
        steps += 1
    raise IllFormedError(f"normalization did not finish in {max_steps} steps")


# ---------------------------------------------------------------------------
# Translation into the CbV type system


def formula_type(a):
    """The type corresponding to a formula."""
    if isinstance(a, PropVar):
        return O
    if isinstance(a, Count):
        return Counted(a.q, formula_type(a.body))
    if isinstance(a, Implies):
        target = formula_type(a.consequent)
        qs, body = strip_prefix(target)
        return wrap_prefix(qs, Arrow(formula_type(a.antecedent), body))
    raise TypeError(a)


def _hyp_var(i):
    return f"x{i}"


def proof_term(p):
    """The proof term alone (variables named by hypothesis position)."""
    s = p.sequent
    if p.rule == "id":
        return Var(_hyp_var(p.side["index"]))
    if p.rule == "bot":
        return CONST
    if p.rule == "m":
        pivot = _pivot_atom(p)
        return Choice(
            proof_term(p.premises[0]),
            proof_term(p.premises[1]),
            pivot.name,
            pivot.index,
        )
    if p.rule == "imp-i":
        return Lam(_hyp_var(len(s.ctx)), proof_term(p.premises[0]))
    if p.rule == "imp-e":
        return App(proof_term(p.premises[0]), proof_term(p.premises[1]))
    if p.rule == "ci":
        d = _local_constraint(p)
        names = formula_names(d)
        if len(names) != 1:
            raise IllFormedError(
                "translation needs a single-name local constraint"
            )
        (a,) = names
        return Nu(a, proof_term(p.premises[0]))
    if p.rule == "ce":
        minor = Lam(_hyp_var(len(s.ctx)), proof_term(p.premises[1]))
        return CbvApp(minor, proof_term(p.premises[0]))
    raise RuleShapeError(p.rule)


def translate(p):
    """(proof term, checked CbV typing derivation) for a checked proof."""
    check_proof(p)
    term = proof_term(p)
    from .terms import free_names as term_free_names

    root_names = frozenset(
        formula_names(p.sequent.constraint) | term_free_names(term)
    )
    deriv = _translate_node(p, root_names)
    check_derivation(deriv, CBV)
    return term, deriv


def _ctx_types(ctx):
    return tuple(
        (_hyp_var(i), formula_type(a)) for i, a in enumerate(ctx)
    )


def _translate_node(p, names):
    s = p.sequent
    ctx = _ctx_types(s.ctx)
    ty = formula_type(s.formula)
    term = proof_term(p)
    j = Judgement(ctx, names, term, s.constraint, ty)
    if p.rule == "id":
        return TypingDerivation("id", j, (), {})
    if p.rule == "bot":
        return TypingDerivation("or", j, (), {})
    if p.rule == "m":
        pivot = _pivot_atom(p)
        if pivot.name not in names:
            raise IllFormedError(
                f"mixing pivot {pivot.name} is not in scope"
            )
        left = _translate_node(p.premises[0], names)
        right = _translate_node(p.premises[1], names)
        lj = left.judgement
        rj = right.judgement
        lnode = TypingDerivation(
            "plus-l",
            Judgement(ctx, names, term, And(lj.constraint, pivot), ty),
            (left,),
            {},
        )
        rnode = TypingDerivation(
            "plus-r",
            Judgement(ctx, names, term, And(rj.constraint, Not(pivot)), ty),
            (right,),
            {},
        )
        return TypingDerivation("or", j, (lnode, rnode), {})
    if p.rule == "imp-i":
        body = _translate_node(p.premises[0], names)
        return TypingDerivation("lam", j, (body,), {})
    if p.rule == "imp-e":
        fun = _translate_node(p.premises[0], names)
        arg = _translate_node(p.premises[1], names)
        return TypingDerivation("app", j, (fun, arg), {})
    if p.rule == "ci":
        d = _local_constraint(p)
        (a,) = formula_names(d) or {None}
        if a is None:
            raise IllFormedError("translation needs a named local constraint")
        if a in names:
            raise IllFormedError(f"generator name {a} is already in scope")
        body = _translate_node(p.premises[0], names | {a})
        return TypingDerivation(
            "mu", j, (body,), {"d": d, "q": s.formula.q}
        )
    if p.rule == "ce":
        major = _translate_node(p.premises[0], names)
        minor = _translate_node(p.premises[1], names)
        mj = minor.judgement
        qs, body = strip_prefix(mj.type)
        arg_type = formula_type(p.premises[0].sequent.formula.body)
        lam_node = TypingDerivation(
            "lam",
            Judgement(
                ctx,
                names,
                Lam(_hyp_var(len(s.ctx)), mj.term),
                s.constraint,
                wrap_prefix(qs, Arrow(arg_type, body)),
            ),
            (minor,),
            {},
        )
        return TypingDerivation(
            "cbv", j, (lam_node, major), {"scale": _scale(p)}
        )
    raise RuleShapeError(p.rule)


# ---------------------------------------------------------------------------
# Simulation of normalization by reduction


@dataclass
class SimulationEntry:
    kind: str
    ok: bool
    steps: list
    detail: str = ""


@dataclass
class SimulationReport:
    entries: list

    @property
    def failures(self):
        return [e for e in self.entries if not e.ok]


def _term_path(p, proof_path):
    """Map a proof-node path to the corresponding position in the proof
    term."""
    out = []
    for i in proof_path:
        if p.rule == "m":
            out.append(i)
        elif p.rule == "imp-i":
            out.append(0)
        elif p.rule == "imp-e":
            out.append(i)
        elif p.rule == "ci":
            out.append(0)
        elif p.rule == "ce":
            if i == 0:
                out.append(1)
            else:
                out.extend((0, 0))
        else:
            raise IllFormedError("path descends through a leaf")
        p = p.premises[i]
    return tuple(out)


_KIND_TERM_RULES = {
    "beta-cut": ("beta",),
    "cbv-cut": ("cbv-nu", "beta"),
    "m-idem": ("i",),
    "m-m-left": ("c1",),
    "m-m-right": ("c2",),
    "m-imp-i": ("plus-lam",),
    "m-imp-e-fun": ("plus-fun",),
    "m-imp-e-arg": ("plus-arg",),
    "m-ci": ("plus-nu",),
    "m-ce-major": ("cbv-plus-2",),
    "m-ce-minor": ("plus-lam", "cbv-plus-1"),
}


def _witness_steps(term, kind, pos):
    """The reduction steps that should realize one normalization step."""
    steps = []
    if kind == "cbv-cut":
        term2 = apply_rule_at(term, "cbv-nu", pos, PE_BRACES)
        steps.append(("cbv-nu", pos))
        term3 = apply_rule_at(term2, "beta", pos + (0,), PE_BRACES)
        steps.append(("beta", pos + (0,)))
        return term3, steps
    if kind == "m-ce-minor":
        lam_pos = pos + (0,)
        term2 = apply_rule_at(term, "plus-lam", lam_pos, PE_BRACES)
        steps.append(("plus-lam", lam_pos))
        term3 = apply_rule_at(term2, "cbv-plus-1", pos, PE_BRACES)
        steps.append(("cbv-plus-1", pos))
        return term3, steps
    (rule,) = _KIND_TERM_RULES[kind]
    term2 = apply_rule_at(term, rule, pos, PE_BRACES)
    steps.append((rule, pos))
    return term2, steps


def verify_simulation(p, fuel=1000):
    """Check that every normalization step of p is matched by reduction on
    the proof terms; failures become report entries."""
    check_proof(p)
    entries = []
    used = 0
    while used < fuel:
        found = find_proof_redex(p)
        if found is None:
            break
        path, kind = found
        nxt = _rewrite_at(p, path, _transform_redex)
        check_proof(nxt)
        before = proof_term(p)
        after = proof_term(nxt)
        pos = _term_path(p, path)
        try:
            witnessed, steps = _witness_steps(before, kind, pos)
            ok = alpha_eq(witnessed, after)
            detail = "" if ok else (
                f"reached {print_term(witnessed)}, expected {print_term(after)}"
            )
        except Exception as exc:  # noqa: BLE001 - recorded, not raised
            witnessed, steps, ok = None, [], False
            detail = str(exc)
        entries.append(SimulationEntry(kind, ok, steps, detail))
        used += max(len(steps), 1)
        p = nxt
    return SimulationReport(entries)


# ---------------------------------------------------------------------------
# JSON interchange


def proof_to_json(p):
    s = p.sequent
    side = {}
    for key, value in p.side.items():
        if isinstance(value, BoolFormula):
            side[key] = print_formula(value)
        elif isinstance(value, Atom):
            side[key] = f"{value.name}.{value.index}"
        elif isinstance(value, Fraction):
            side[key] = fm.format_rational(value)
        else:
            side[key] = value
    return {
        "rule": p.rule,
        "sequent": {
            "ctx": [print_proof_formula(a) for a in s.ctx],
            "constraint": print_formula(s.constraint),
            "formula": print_proof_formula(s.formula),
        },
        "side": side,
        "premises": [proof_to_json(q) for q in p.premises],
    }


def proof_from_json(obj):
    side = dict(obj.get("side", {}))
    if "d" in side:
        side["d"] = parse_formula(side["d"])
    if "pivot" in side and isinstance(side["pivot"], str):
        name, idx = side["pivot"].split(".")
        side["pivot"] = Atom(Name(name), int(idx))
    for key in ("q", "scale"):
        if key in side:
            side[key] = parse_rational(side[key])
    seq = obj["sequent"]
    return ProofDerivation(
        obj["rule"],
        Sequent(
            tuple(parse_proof_formula(a) for a in seq["ctx"]),
            parse_formula(seq["constraint"]),
            parse_proof_formula(seq["formula"]),
        ),
        tuple(proof_from_json(q) for q in obj.get("premises", [])),
        side,
    )
