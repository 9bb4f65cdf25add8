"""Constructive subject reduction for the CbV system: given a checked
derivation and a one-step reduction of its subject, rebuild a checked
derivation of the reduct with the identical judgement.

Beta steps go through the substitution-lemma construction; permutative steps
are handled by case analysis on the pivot bits (resolving the rearranged
choices the same way on both sides), and the generator permutations by
re-associating the counting rule with its neighbour.  Disjunction nodes are
peeled into their leaves and reassembled around the transformed pieces.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import UnsupportedStepError
from .formulas import And, Atom, Not, BoolFormula
from .terms import (
    App,
    CbvApp,
    Choice,
    Lam,
    Nu,
    Var,
    alpha_eq,
    free_names,
    free_vars,
    substitute,
)
from .typesys import (
    CBV,
    Counted,
    Judgement,
    TypingDerivation,
    check_derivation,
    same_judgement,
    strip_prefix,
    wrap_prefix,
)


def _unsupported(msg):
    raise UnsupportedStepError(msg)


def or_leaves(d):
    """Non-disjunction leaves of the top layer of disjunction nodes."""
    if d.rule == "or":
        out = []
        for p in d.premises:
            out.extend(or_leaves(p))
        return out
    return [d]


def _or(premises, judgement):
    return TypingDerivation("or", judgement, tuple(premises), {})


def _node(rule, judgement, premises, side=None):
    return TypingDerivation(rule, judgement, tuple(premises), side or {})


def _with(j, term=None, constraint=None, type_=None, ctx=None, names=None):
    return Judgement(
        j.ctx if ctx is None else ctx,
        j.names if names is None else names,
        j.term if term is None else term,
        j.constraint if constraint is None else constraint,
        j.type if type_ is None else type_,
    )


# ---------------------------------------------------------------------------
# Structural weakenings


def weaken_constraint(d, new_constraint):
    """Strengthen the conclusion constraint (single-premise disjunction)."""
    return _or([d], _with(d.judgement, constraint=new_constraint))


def names_weaken(d, extra):
    """Add names to every judgement name set."""
    extra = frozenset(extra)
    if not extra:
        return d

    def go(d):
        j = d.judgement
        if isinstance(j.term, Nu) and d.rule in ("mu", "mu-prime", "mu-sigma"):
            if j.term.name in extra:
                _unsupported(
                    f"name weakening collides with bound name {j.term.name}"
                )
        return TypingDerivation(
            d.rule,
            _with(j, names=j.names | extra),
            tuple(go(p) for p in d.premises),
            d.side,
        )

    return go(d)


def rename_derivation_var(d, old, new):
    """Rename a context variable throughout a derivation."""

    def go(d):
        j = d.judgement
        ctx = tuple((new if x == old else x, a) for x, a in j.ctx)
        term = substitute(j.term, old, Var(new))
        return TypingDerivation(
            d.rule,
            _with(j, term=term, ctx=ctx),
            tuple(go(p) for p in d.premises),
            d.side,
        )

    return go(d)


def ctx_weaken(d, pairs):
    """Add unused declarations to every context, renaming inner binders on
    collision."""
    if not pairs:
        return d
    new_vars = {x for x, _ in pairs}

    def go(d):
        for x, _ in d.judgement.ctx:
            if x in new_vars:
                _unsupported(f"context weakening collides with {x}")
        premises = []
        for p in d.premises:
            clash = [x for x, _ in p.judgement.ctx if x in new_vars
                     and x not in {y for y, _ in d.judgement.ctx}]
            for x in clash:
                taken = {y for y, _ in p.judgement.ctx} | new_vars
                fresh = x
                while fresh in taken:
                    fresh += "'"
                p = rename_derivation_var(p, x, fresh)
            premises.append(go(p))
        return TypingDerivation(
            d.rule,
            _with(d.judgement, ctx=d.judgement.ctx + tuple(pairs)),
            tuple(premises),
            d.side,
        )

    return go(d)


# ---------------------------------------------------------------------------
# The substitution lemma as a derivation transformation


def rename_derivation_names(d, mapping):
    """Wholesale renaming of generator names in subjects, name sets, side
    formulas and constraints of a derivation."""
    from .proofs import rename_formula_names

    def rn_term(t):
        if isinstance(t, Nu):
            return Nu(mapping.get(t.name, t.name), rn_term(t.body))
        if isinstance(t, Choice):
            return Choice(
                rn_term(t.left), rn_term(t.right),
                mapping.get(t.name, t.name), t.index,
            )
        out = t
        from .terms import children, replace_child

        for i, c in enumerate(children(t)):
            c2 = rn_term(c)
            if c2 is not c:
                out = replace_child(out, i, c2)
        return out

    def go(d):
        j = d.judgement
        side = dict(d.side)
        if "d" in side and isinstance(side["d"], BoolFormula):
            side["d"] = rename_formula_names(side["d"], mapping)
        new_j = Judgement(
            j.ctx,
            frozenset(mapping.get(n, n) for n in j.names),
            rn_term(j.term),
            rename_formula_names(j.constraint, mapping),
            j.type,
        )
        return TypingDerivation(
            d.rule, new_j, tuple(go(p) for p in d.premises), side
        )

    return go(d)


def subst_typing(d, x, arg_derivation):
    """Given d typing t (with x declared) and a derivation of u, build the
    derivation of t[u/x] whose every node conjoins the argument constraint.
    Occurrences of x are numbered in subject order so duplicated generator
    scopes get the same variant names as term-level substitution."""
    from .terms import bound_names, count_free_occurrences, substitute_indexed

    du = arg_derivation.judgement.constraint
    u = arg_derivation.judgement.term
    base_ctx_vars = {y for y, _ in arg_derivation.judgement.ctx}
    base_names = arg_derivation.judgement.names
    u_binders = bound_names(u)
    duplicating = bool(
        count_free_occurrences(d.judgement.term, x) > 1 and u_binders
    )

    def count(t):
        return count_free_occurrences(t, x)

    def premise_offsets(d, offset):
        """Occurrence offset for each premise, following the subject layout."""
        t = d.judgement.term
        if d.rule == "or":
            return [offset] * len(d.premises)
        if d.rule in ("lam", "mu"):
            return [offset]
        if d.rule == "plus-l":
            return [offset]
        if d.rule == "plus-r":
            return [offset + count(t.left)]
        if d.rule in ("app", "cbv"):
            return [offset, offset + count(t.fun)]
        return [offset] * len(d.premises)

    def go(d, offset):
        j = d.judgement
        new_ctx = tuple((y, a) for y, a in j.ctx if y != x)
        new_constraint = And(j.constraint, du)
        new_term = substitute_indexed(j.term, x, u, offset, duplicating)
        new_j = _with(j, term=new_term, constraint=new_constraint, ctx=new_ctx)
        if d.rule == "id":
            if j.term.var == x:
                copy_index = offset + 1
                plug = arg_derivation
                if duplicating and copy_index > 1:
                    from .terms import copy_variant_name

                    mapping = {
                        n: copy_variant_name(n, copy_index) for n in u_binders
                    }
                    plug = rename_derivation_names(plug, mapping)
                extra = [(y, a) for y, a in new_ctx if y not in base_ctx_vars]
                plugged = names_weaken(
                    ctx_weaken(plug, extra), j.names - base_names
                )
                return _or([plugged], new_j)
            return _node("id", new_j, ())
        if d.rule == "lam":
            binder = [y for y, _ in d.premises[0].judgement.ctx
                      if y not in {z for z, _ in j.ctx}][0]
            premise = d.premises[0]
            if binder in free_vars(u) or binder == x:
                taken = free_vars(u) | {z for z, _ in j.ctx} | {x}
                fresh = binder
                while fresh in taken:
                    fresh += "'"
                premise = rename_derivation_var(premise, binder, fresh)
            return _node("lam", new_j, [go(premise, offset)], d.side)
        offsets = premise_offsets(d, offset)
        return _node(
            d.rule,
            new_j,
            [go(p, off) for p, off in zip(d.premises, offsets)],
            d.side,
        )

    return go(d, 0)


# ---------------------------------------------------------------------------
# Harvesting typed pieces out of choice / generator typings


def branch_typings(d, want_left):
    """Sub-derivations typing the chosen branch of a choice subject, whose
    constraints jointly cover the subject constraint under the pivot literal."""
    out = []
    for leaf in or_leaves(d):
        if leaf.rule == "plus-l":
            if want_left:
                out.append(leaf.premises[0])
        elif leaf.rule == "plus-r":
            if not want_left:
                out.append(leaf.premises[0])
        else:
            _unsupported(f"choice subject typed by rule {leaf.rule}")
    return out


def mu_leaves(d):
    out = []
    for leaf in or_leaves(d):
        if leaf.rule != "mu":
            _unsupported(f"generator subject typed by rule {leaf.rule}")
        out.append(leaf)
    return out


def lam_leaves(d):
    out = []
    for leaf in or_leaves(d):
        if leaf.rule != "lam":
            _unsupported(f"lambda subject typed by rule {leaf.rule}")
        out.append(leaf)
    return out


# ---------------------------------------------------------------------------
# Root-step transformations


def _transport_root(d, rule, mode):
    j = d.judgement
    t = j.term
    b = j.constraint
    handler = _ROOT_HANDLERS.get(rule)
    if handler is None:
        _unsupported(f"no transport case for rule {rule}")
    return handler(d, j, t, b)


def _root_beta(d, j, t, b):
    if d.rule != "app" or not isinstance(t, App) or not isinstance(t.fun, Lam):
        _unsupported("beta step against a non-application typing")
    dfun, darg = d.premises
    after = substitute(t.fun.body, t.fun.var, t.arg)
    pieces = []
    for lf in lam_leaves(dfun):
        binder = [y for y, _ in lf.premises[0].judgement.ctx
                  if y not in {z for z, _ in lf.judgement.ctx}][0]
        for la in or_leaves(darg):
            piece = subst_typing(lf.premises[0], binder, la)
            pieces.append(piece)
    return _or(pieces, _with(j, term=after))


def _pivot(t):
    return Atom(t.name, t.index)


def _root_idem(d, j, t, b):
    # t (+a.i) t ~> t
    lefts = branch_typings(d, True)
    rights = branch_typings(d, False)
    return _or(lefts + rights, _with(j, term=t.left))


def _choice_piece(core, choice_term, bv, left, j):
    rule = "plus-l" if left else "plus-r"
    return _node(rule, _with(j, term=choice_term, constraint=bv), [core])


def _root_c1(d, j, t, b):
    # (l (+a.i) m) (+a.i) r ~> l (+a.i) r
    inner, r = t.left, t.right
    after = Choice(inner.left, r, t.name, t.index)
    x = _pivot(t)
    bv1, bv0 = And(b, x), And(b, Not(x))
    lefts2 = []
    for ol in branch_typings(d, True):
        lefts2.extend(branch_typings(ol, True))
    p1 = _or(lefts2, _with(j, term=inner.left, constraint=bv1))
    piece1 = _choice_piece(p1, after, bv1, True, j)
    p0 = _or(branch_typings(d, False), _with(j, term=r, constraint=bv0))
    piece0 = _choice_piece(p0, after, bv0, False, j)
    return _or([piece1, piece0], _with(j, term=after))


def _root_c2(d, j, t, b):
    # l (+a.i) (m (+a.i) r) ~> l (+a.i) r
    inner = t.right
    after = Choice(t.left, inner.right, t.name, t.index)
    x = _pivot(t)
    bv1, bv0 = And(b, x), And(b, Not(x))
    p1 = _or(branch_typings(d, True), _with(j, term=t.left, constraint=bv1))
    piece1 = _choice_piece(p1, after, bv1, True, j)
    rights2 = []
    for orr in branch_typings(d, False):
        rights2.extend(branch_typings(orr, False))
    p0 = _or(rights2, _with(j, term=inner.right, constraint=bv0))
    piece0 = _choice_piece(p0, after, bv0, False, j)
    return _or([piece1, piece0], _with(j, term=after))


def _root_plus_lam(d, j, t, b):
    # \x. (l (+a.i) r) ~> (\x. l) (+a.i) (\x. r)
    if d.rule != "lam":
        _unsupported("plus-lam against a non-lambda typing")
    body_deriv = d.premises[0]
    pb = body_deriv.judgement
    choice = pb.term
    if not isinstance(choice, Choice):
        _unsupported("lambda body premise is not a choice typing")
    binder = [y for y, _ in pb.ctx if y not in {z for z, _ in j.ctx}][0]
    x = _pivot(choice)
    after = Choice(
        Lam(binder, choice.left), Lam(binder, choice.right),
        choice.name, choice.index,
    )
    pieces = []
    for sign, want in ((x, True), (Not(x), False)):
        bv = And(b, sign)
        branch = choice.left if want else choice.right
        core = _or(
            branch_typings(body_deriv, want),
            Judgement(pb.ctx, pb.names, branch, bv, pb.type),
        )
        lam_node = _node(
            "lam",
            _with(j, term=Lam(binder, branch), constraint=bv),
            [core],
        )
        pieces.append(_choice_piece(lam_node, after, bv, want, j))
    return _or(pieces, _with(j, term=after))


def _root_plus_app(d, j, t, b, cbv, fun_side):
    """The four choice-past-application permutations."""
    expected = "cbv" if cbv else "app"
    if d.rule != expected:
        _unsupported(f"step against a non-{expected} typing")
    dfun, darg = d.premises
    mk = CbvApp if cbv else App
    if fun_side:
        choice = t.fun
        other, other_deriv, choice_deriv = t.arg, darg, dfun
        after = Choice(
            mk(choice.left, other), mk(choice.right, other),
            choice.name, choice.index,
        )
    else:
        choice = t.arg
        other, other_deriv, choice_deriv = t.fun, dfun, darg
        after = Choice(
            mk(other, choice.left), mk(other, choice.right),
            choice.name, choice.index,
        )
    x = _pivot(choice)
    pieces = []
    for sign, want in ((x, True), (Not(x), False)):
        bv = And(b, sign)
        branch = choice.left if want else choice.right
        core = _or(
            branch_typings(choice_deriv, want),
            _with(choice_deriv.judgement, term=branch, constraint=bv),
        )
        partner = weaken_constraint(other_deriv, bv)
        if fun_side:
            premises = [core, partner]
            new_term = mk(branch, other)
        else:
            premises = [partner, core]
            new_term = mk(other, branch)
        app_node = _node(
            expected,
            _with(j, term=new_term, constraint=bv),
            premises,
            d.side,
        )
        pieces.append(_choice_piece(app_node, after, bv, want, j))
    return _or(pieces, _with(j, term=after))


def _root_plus_plus(d, j, t, b, left_nested):
    """Reordering of two stacked choices with ordered pivots."""
    if left_nested:
        inner, w = t.left, t.right
        after = Choice(
            Choice(inner.left, w, t.name, t.index),
            Choice(inner.right, w, t.name, t.index),
            inner.name,
            inner.index,
        )
    else:
        inner, w = t.right, t.left
        after = Choice(
            Choice(w, inner.left, t.name, t.index),
            Choice(w, inner.right, t.name, t.index),
            inner.name,
            inner.index,
        )
    xa = _pivot(inner)  # the pivot that ends up outermost
    xb = _pivot(t)
    pieces = []
    for sa, wa in ((xa, True), (Not(xa), False)):
        for sb, wb in ((xb, True), (Not(xb), False)):
            bv = And(b, And(sa, sb))
            # which original subterm does this assignment select?
            picks_inner = wb if left_nested else not wb
            if picks_inner:
                cores = []
                for br in branch_typings(d, left_nested):
                    cores.extend(branch_typings(br, wa))
                target = inner.left if wa else inner.right
            else:
                cores = branch_typings(d, not left_nested)
                target = w
            core = _or(cores, _with(j, term=target, constraint=bv))
            # rebuild the after-term selection: outer pivot xa, inner xb
            mid_term = after.left if wa else after.right
            mid_pick = mid_term.left if wb else mid_term.right
            if not alpha_eq(mid_pick, target):
                _unsupported("pivot selection mismatch in choice reordering")
            mid = _choice_piece(core, mid_term, bv, wb, j)
            pieces.append(_choice_piece(mid, after, bv, wa, j))
    return _or(pieces, _with(j, term=after))


def _root_plus_nu(d, j, t, b):
    # nu b. (l (+a.i) r) ~> (nu b. l) (+a.i) (nu b. r)
    if d.rule != "mu":
        _unsupported("plus-nu against a non-counting typing")
    body = t.body
    x = _pivot(body)
    dloc = d.side["d"]
    q = d.side["q"]
    after = Choice(
        Nu(t.name, body.left), Nu(t.name, body.right), body.name, body.index
    )
    inner = d.premises[0]
    pieces = []
    for sign, want in ((x, True), (Not(x), False)):
        bv = And(b, sign)
        branch = body.left if want else body.right
        core = _or(
            branch_typings(inner, want),
            _with(inner.judgement, term=branch, constraint=And(bv, dloc)),
        )
        mu_node = _node(
            "mu",
            _with(j, term=Nu(t.name, branch), constraint=bv),
            [core],
            {"d": dloc, "q": q},
        )
        pieces.append(_choice_piece(mu_node, after, bv, want, j))
    return _or(pieces, _with(j, term=after))


def _root_nu_lam(d, j, t, b):
    # \x. nu b. B ~> nu b. \x. B
    if d.rule != "lam":
        _unsupported("nu-lam against a non-lambda typing")
    nu_deriv = d.premises[0]
    pb = nu_deriv.judgement
    binder = [y for y, _ in pb.ctx if y not in {z for z, _ in j.ctx}][0]
    nu_term = pb.term
    after = Nu(nu_term.name, Lam(binder, nu_term.body))
    arg_type = dict(pb.ctx)[binder]
    pieces = []
    for leaf in mu_leaves(nu_deriv):
        inner = leaf.premises[0]
        pi = inner.judgement
        qs, body_sigma = strip_prefix(pi.type)
        from .typesys import Arrow

        lam_node = _node(
            "lam",
            Judgement(
                j.ctx,
                pi.names,
                Lam(binder, pi.term),
                pi.constraint,
                wrap_prefix(qs, Arrow(arg_type, body_sigma)),
            ),
            [inner],
        )
        mu_node = _node(
            "mu",
            _with(
                j,
                term=after,
                constraint=leaf.judgement.constraint,
                type_=Counted(leaf.side["q"], lam_node.judgement.type),
            ),
            [lam_node],
            leaf.side,
        )
        pieces.append(mu_node)
    return _or(pieces, _with(j, term=after))


def _root_nu_fun(d, j, t, b):
    # (nu b. F) w ~> nu b. (F w)
    if d.rule != "app":
        _unsupported("nu-fun against a non-application typing")
    dfun, darg = d.premises
    nu_term = t.fun
    after = Nu(nu_term.name, App(nu_term.body, t.arg))
    if nu_term.name in free_names(t.arg):
        _unsupported("argument captures the generator name")
    pieces = []
    for leaf in mu_leaves(dfun):
        inner = leaf.premises[0]
        pi = inner.judgement
        ci = leaf.judgement.constraint
        dloc = leaf.side["d"]
        appc = And(And(ci, darg.judgement.constraint), dloc)
        arg_in = weaken_constraint(names_weaken(darg, {nu_term.name}), appc)
        fun_in = weaken_constraint(inner, appc)
        arrow_qs, arrow = strip_prefix(pi.type)
        app_j = Judgement(
            j.ctx,
            pi.names,
            App(pi.term, t.arg),
            appc,
            wrap_prefix(arrow_qs, arrow.cod),
        )
        app_node = _node("app", app_j, [fun_in, arg_in])
        mu_node = _node(
            "mu",
            _with(
                j,
                term=after,
                constraint=And(ci, darg.judgement.constraint),
                type_=Counted(leaf.side["q"], app_j.type),
            ),
            [app_node],
            leaf.side,
        )
        pieces.append(mu_node)
    return _or(pieces, _with(j, term=after))


def _root_cbv_nu(d, j, t, b):
    # {F} (nu b. U) ~> nu b. (F U)
    if d.rule != "cbv":
        _unsupported("cbv-nu against a non-cbv typing")
    dfun, darg = d.premises
    nu_term = t.arg
    if nu_term.name in free_names(t.fun):
        _unsupported("function captures the generator name")
    after = Nu(nu_term.name, App(t.fun, nu_term.body))
    scale = d.side.get("scale", Fraction(1))
    if not isinstance(scale, Fraction):
        from .formulas import parse_rational

        scale = parse_rational(scale)
    r = darg.judgement.type.q
    pieces = []
    for leaf in mu_leaves(darg):
        inner = leaf.premises[0]
        pi = inner.judgement
        ci = leaf.judgement.constraint
        dloc = leaf.side["d"]
        appc = And(And(dfun.judgement.constraint, ci), dloc)
        fun_in = names_weaken(dfun, {nu_term.name})
        fun_in = weaken_constraint(fun_in, appc)
        arg_in = weaken_constraint(inner, appc)
        arrow_qs, arrow = strip_prefix(dfun.judgement.type)
        app_j = Judgement(
            j.ctx,
            pi.names,
            App(t.fun, pi.term),
            appc,
            wrap_prefix(arrow_qs, arrow.cod),
        )
        app_node = _node("app", app_j, [fun_in, arg_in])
        mu_node = _node(
            "mu",
            _with(
                j,
                term=after,
                constraint=And(dfun.judgement.constraint, ci),
                type_=Counted(r * scale, app_j.type),
            ),
            [app_node],
            {"d": dloc, "q": r * scale},
        )
        pieces.append(mu_node)
    return _or(pieces, _with(j, term=after))


_ROOT_HANDLERS = {
    "beta": _root_beta,
    "i": _root_idem,
    "c1": _root_c1,
    "c2": _root_c2,
    "plus-lam": _root_plus_lam,
    "plus-fun": lambda d, j, t, b: _root_plus_app(d, j, t, b, False, True),
    "plus-arg": lambda d, j, t, b: _root_plus_app(d, j, t, b, False, False),
    "cbv-plus-1": lambda d, j, t, b: _root_plus_app(d, j, t, b, True, True),
    "cbv-plus-2": lambda d, j, t, b: _root_plus_app(d, j, t, b, True, False),
    "plus-plus-1": lambda d, j, t, b: _root_plus_plus(d, j, t, b, True),
    "plus-plus-2": lambda d, j, t, b: _root_plus_plus(d, j, t, b, False),
    "plus-nu": _root_plus_nu,
    "nu-lam": _root_nu_lam,
    "nu-fun": _root_nu_fun,
    "cbv-nu": _root_cbv_nu,
}

# premise index typing the subterm at each child position, per rule
_CHILD_PREMISE = {
    "lam": {0: 0},
    "app": {0: 0, 1: 1},
    "cbv": {0: 0, 1: 1},
    "plus-l": {0: 0},
    "plus-r": {1: 0},
    "mu": {0: 0},
}


def _descend(d, rule, path, mode):
    j = d.judgement
    if d.rule == "or":
        new_premises = [_descend(p, rule, path, mode) for p in d.premises]
        term = (
            new_premises[0].judgement.term
            if new_premises
            else _reapply(j.term, rule, path, mode)
        )
        return _or(new_premises, _with(j, term=term))
    if not path:
        return _transport_root(d, rule, mode)
    child = path[0]
    mapping = _CHILD_PREMISE.get(d.rule, {})
    new_term = _reapply(j.term, rule, path, mode)
    if child not in mapping:
        # untyped branch of a one-sided choice rule: the typing is unaffected
        if d.rule in ("plus-l", "plus-r"):
            return TypingDerivation(
                d.rule, _with(j, term=new_term), d.premises, d.side
            )
        _unsupported(f"cannot descend child {child} of rule {d.rule}")
    idx = mapping[child]
    new_premise = _descend(d.premises[idx], rule, path[1:], mode)
    premises = list(d.premises)
    premises[idx] = new_premise
    return TypingDerivation(
        d.rule, _with(j, term=new_term), tuple(premises), d.side
    )


def _reapply(term, rule, path, mode):
    """Apply the named reduction rule at the path inside `term`."""
    from .errors import NotPnfError
    from .rewrite import apply_rule_at

    try:
        return apply_rule_at(term, rule, path, mode)
    except NotPnfError as exc:
        _unsupported(str(exc))


def transport_subject_reduction(d, step, mode="pe-braces"):
    """Rebuild a checked CbV derivation for the reduct of a one-step
    reduction of d's subject, with an identical judgement."""
    j = check_derivation(d, CBV)
    if not alpha_eq(j.term, step.before):
        raise UnsupportedStepError("derivation subject differs from the step")
    result = _descend(d, step.rule, tuple(step.path), mode)
    out_j = check_derivation(result, CBV)
    expected_term = _reapply(j.term, step.rule, tuple(step.path), mode)
    expected = _with(j, term=expected_term)
    if not same_judgement(out_j, expected):
        raise UnsupportedStepError(
            f"transport produced {out_j.format()}, expected {expected.format()}"
        )
    return result
