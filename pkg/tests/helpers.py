"""Shared builders, fixtures, and random generators for the test suite."""

from fractions import Fraction

from lampe.formulas import And, Atom, BOT, Not, Or, TOP, measure
from lampe.proofs import (
    Count,
    Implies,
    ProofDerivation,
    PropVar,
    Sequent,
)
from lampe.terms import (
    App,
    CbvApp,
    Choice,
    Lam,
    Name,
    Nu,
    Var,
)
from lampe.typesys import (
    Arrow,
    Counted,
    Judgement,
    O,
    TypingDerivation,
    mk_mset,
)

HALF = Fraction(1, 2)
A_ = Name("a")
B_ = Name("b")

I_TERM = Lam("z", Var("z"))
OMEGA = App(Lam("w", App(Var("w"), Var("w"))), Lam("w", App(Var("w"), Var("w"))))
TWO = Lam("y", Lam("x", App(Var("y"), App(Var("y"), Var("x")))))
TWO_CBN = Lam("y", Lam("x", CbvApp(Var("y"), App(Var("y"), Var("x")))))
OO = Arrow(O, O)


def J(ctx, names, term, constraint, ty):
    return Judgement(tuple(ctx), frozenset(names), term, constraint, ty)


def D(rule, judgement, premises=(), side=None):
    return TypingDerivation(rule, judgement, tuple(premises), side or {})


def S(ctx, constraint, formula):
    return Sequent(tuple(ctx), constraint, formula)


def P(rule, sequent, premises=(), side=None):
    return ProofDerivation(rule, sequent, tuple(premises), side or {})


# ---------------------------------------------------------------------------
# Hand-built CBV typing fixtures


def identity_derivation(ctx=(), names=(), constraint=TOP, arg_type=O):
    """lam z. z at C^[] (arg => arg)."""
    full = tuple(ctx) + (("z", arg_type),)
    body = D("id", J(full, names, Var("z"), constraint, arg_type))
    return D(
        "lam",
        J(tuple(ctx), names, Lam("z", Var("z")), constraint, Arrow(arg_type, arg_type)),
        (body,),
    )


def coin_derivation(name=A_, index=0, left=None, right_constraintless=True):
    """nu a. (I (+a.i) OMEGA) at C[1/2] (o => o)."""
    atom = Atom(name, index)
    ident = identity_derivation(names={name}, constraint=atom)
    term = Choice(I_TERM, OMEGA, name, index)
    branch = D(
        "plus-l",
        J((), {name}, term, atom, OO),
        (ident,),
    )
    return D(
        "mu",
        J((), (), Nu(name, term), TOP, Counted(HALF, OO)),
        (branch,),
        {"d": atom, "q": HALF},
    )


def fair_pick_derivation(name=A_, index=0):
    """nu a. (I (+a.i) I) at C[1] (o => o): both branches are typed."""
    atom = Atom(name, index)
    term = Choice(I_TERM, I_TERM, name, index)
    taut = Or(atom, Not(atom))
    left = D(
        "plus-l",
        J((), {name}, term, And(atom, TOP), OO),
        (identity_derivation(names={name}),),
    )
    right = D(
        "plus-r",
        J((), {name}, term, And(Not(atom), TOP), OO),
        (identity_derivation(names={name}),),
    )
    both = D("or", J((), {name}, term, And(TOP, taut), OO), (left, right))
    return D(
        "mu",
        J((), (), Nu(name, term), TOP, Counted(Fraction(1), OO)),
        (both,),
        {"d": taut, "q": Fraction(1)},
    )


def church_two_cbn_derivation(q=HALF):
    """The CbV-application Church numeral, typed with two stacked quantifiers."""
    cqoo = Counted(q, OO)
    ctx = (("y", cqoo), ("x", O))
    y, x = Var("y"), Var("x")
    dy1 = D("id", J(ctx, (), y, TOP, cqoo))
    dy2 = D("id", J(ctx, (), y, TOP, cqoo))
    dx = D("id", J(ctx, (), x, TOP, O))
    dyx = D("app", J(ctx, (), App(y, x), TOP, Counted(q, O)), (dy2, dx))
    dcbv = D(
        "cbv",
        J(ctx, (), CbvApp(y, App(y, x)), TOP, Counted(q, Counted(q, O))),
        (dy1, dyx),
    )
    dlamx = D(
        "lam",
        J(
            (("y", cqoo),),
            (),
            Lam("x", CbvApp(y, App(y, x))),
            TOP,
            Counted(q, Counted(q, OO)),
        ),
        (dcbv,),
    )
    return D(
        "lam",
        J((), (), TWO_CBN, TOP, Counted(q, Counted(q, Arrow(cqoo, OO)))),
        (dlamx,),
    )


def plain_two_derivation(ctx=(), names=(), constraint=TOP):
    """lam y. lam x. y (y x) at (o=>o) => (o=>o), no quantifiers."""
    base = tuple(ctx)
    full = base + (("y", OO), ("x", O))
    y, x = Var("y"), Var("x")
    dy1 = D("id", J(full, names, y, constraint, OO))
    dy2 = D("id", J(full, names, y, constraint, OO))
    dx = D("id", J(full, names, x, constraint, O))
    dyx = D("app", J(full, names, App(y, x), constraint, O), (dy2, dx))
    dyyx = D("app", J(full, names, App(y, App(y, x)), constraint, O), (dy1, dyx))
    dlamx = D(
        "lam",
        J(base + (("y", OO),), names, Lam("x", App(y, App(y, x))), constraint, OO),
        (dyyx,),
    )
    return D(
        "lam",
        J(base, names, TWO, constraint, Arrow(OO, OO)),
        (dlamx,),
    )


def church_two_cbv_derivation(q=HALF):
    """The CbV Church numeral lam f. {2} f, typed with one quantifier."""
    cqoo = Counted(q, OO)
    ctx = (("f", cqoo),)
    dtwo = plain_two_derivation(ctx=ctx)
    df = D("id", J(ctx, (), Var("f"), TOP, cqoo))
    dcbv = D(
        "cbv",
        J(ctx, (), CbvApp(TWO, Var("f")), TOP, Counted(q, OO)),
        (dtwo, df),
    )
    return D(
        "lam",
        J((), (), Lam("f", CbvApp(TWO, Var("f"))), TOP, Counted(q, Arrow(cqoo, OO))),
        (dcbv,),
    )


def cbn_applied_derivation(q=HALF):
    """(2^CbN)(nu a. I (+a.0) OMEGA) at C[q] C[q] (o => o)."""
    fun = church_two_cbn_derivation(q)
    arg = coin_derivation()
    term = App(TWO_CBN, arg.judgement.term)
    return D(
        "app",
        J((), (), term, TOP, Counted(q, Counted(q, OO))),
        (fun, arg),
    )


def cbv_arranged_derivation():
    """nu a. 2 (I (+a.0) OMEGA) at C[1/2] (o => o)."""
    atom = Atom(A_, 0)
    dtwo = plain_two_derivation(names={A_}, constraint=atom)
    iota = identity_derivation(names={A_}, constraint=atom)
    choice = Choice(I_TERM, OMEGA, A_, 0)
    dchoice = D("plus-l", J((), {A_}, choice, atom, OO), (iota,))
    dapp = D(
        "app",
        J((), {A_}, App(TWO, choice), And(TOP, atom), OO),
        (dtwo, dchoice),
    )
    return D(
        "mu",
        J((), (), Nu(A_, App(TWO, choice)), TOP, Counted(HALF, OO)),
        (dapp,),
        {"d": atom, "q": HALF},
    )


def braces_coin_derivation():
    """{I} (nu a. I (+a.0) OMEGA) at C[1/2] (o => o)."""
    fun = identity_derivation(arg_type=OO)
    arg = coin_derivation()
    term = CbvApp(fun.judgement.term, arg.judgement.term)
    return D(
        "cbv",
        J((), (), term, TOP, Counted(HALF, OO)),
        (fun, arg),
    )


def worked_example_derivation():
    """nu a. (lam x. lam y. (y (+a.0) I) x) (nu b. I (+b.0) OMEGA)."""
    atom = Atom(A_, 0)
    arg_s = Counted(HALF, OO)  # the coin's type
    iota_inner = Lam("z", Var("z"))  # typed at C[1/2](arg_s => o=>o)
    t_y = Counted(HALF, Arrow(arg_s, OO))
    ctx = (("x", arg_s), ("y", t_y))
    names = {A_}
    dz = D(
        "id",
        J(ctx + (("z", arg_s),), names, Var("z"), Not(atom), arg_s),
    )
    di = D(
        "lam",
        J(ctx, names, iota_inner, Not(atom), t_y),
        (dz,),
    )
    choice = Choice(Var("y"), iota_inner, A_, 0)
    dchoice = D(
        "plus-r",
        J(ctx, names, choice, And(Not(atom), Not(atom)), t_y),
        (di,),
    )
    dx = D("id", J(ctx, names, Var("x"), Not(atom), arg_s))
    dapp = D(
        "app",
        J(
            ctx,
            names,
            App(choice, Var("x")),
            And(And(Not(atom), Not(atom)), Not(atom)),
            Counted(HALF, OO),
        ),
        (dchoice, dx),
    )
    dlamy = D(
        "lam",
        J(
            (("x", arg_s),),
            names,
            Lam("y", App(choice, Var("x"))),
            And(And(Not(atom), Not(atom)), Not(atom)),
            Counted(HALF, Arrow(t_y, OO)),
        ),
        (dapp,),
    )
    dlamx = D(
        "lam",
        J(
            (),
            names,
            Lam("x", Lam("y", App(choice, Var("x")))),
            And(And(Not(atom), Not(atom)), Not(atom)),
            Counted(HALF, Arrow(arg_s, Arrow(t_y, OO))),
        ),
        (dlamy,),
    )
    coin = coin_derivation(B_, 0)
    coin = D(
        coin.rule,
        J((), {A_}, coin.judgement.term, TOP, coin.judgement.type),
        (
            D(
                "plus-l",
                J(
                    (),
                    {A_, B_},
                    coin.premises[0].judgement.term,
                    Atom(B_, 0),
                    OO,
                ),
                (identity_derivation(names={A_, B_}, constraint=Atom(B_, 0)),),
            ),
        ),
        coin.side,
    )
    body = App(dlamx.judgement.term, coin.judgement.term)
    dbody = D(
        "app",
        J(
            (),
            {A_},
            body,
            And(Not(atom), TOP),
            Counted(HALF, Arrow(t_y, OO)),
        ),
        (dlamx, coin),
    )
    return D(
        "mu",
        J((), (), Nu(A_, body), TOP, Counted(HALF, Counted(HALF, Arrow(t_y, OO)))),
        (dbody,),
        {"d": Not(atom), "q": HALF},
    )


def cbv_fixture_corpus():
    """Closed CBV fixtures: (derivation, reduction mode) pairs."""
    from lampe.rewrite import PE, PE_BRACES

    return [
        (identity_derivation(), PE),
        (coin_derivation(), PE),
        (fair_pick_derivation(), PE),
        (plain_two_derivation(), PE),
        (church_two_cbn_derivation(), PE_BRACES),
        (church_two_cbv_derivation(), PE_BRACES),
        (cbn_applied_derivation(), PE_BRACES),
        (cbv_arranged_derivation(), PE),
        (braces_coin_derivation(), PE_BRACES),
        (worked_example_derivation(), PE),
    ]


# ---------------------------------------------------------------------------
# CN fixtures (balanced types, for the normal-form bound)


C1O = Counted(Fraction(1), O)
CN_OO = Arrow(C1O, O)  # C[1] o => o


def cn_identity(ctx=(), names=(), constraint=TOP):
    full = tuple(ctx) + (("z", C1O),)
    body = D("id", J(full, names, Var("z"), constraint, C1O))
    return D(
        "lam",
        J(tuple(ctx), names, Lam("z", Var("z")), constraint, Counted(Fraction(1), CN_OO)),
        (body,),
    )


def cn_coin():
    """nu a. (I (+a.0) OMEGA) at C[1/2](C[1] o => o) in the CN system."""
    atom = Atom(A_, 0)
    branch = D(
        "plus-l",
        J((), {A_}, Choice(I_TERM, OMEGA, A_, 0), And(TOP, atom), Counted(Fraction(1), CN_OO)),
        (cn_identity(names={A_}, constraint=And(TOP, atom)),),
    )
    return D(
        "mu-prime",
        J((), (), Nu(A_, Choice(I_TERM, OMEGA, A_, 0)), TOP, Counted(HALF, CN_OO)),
        (branch,),
        {"d": atom, "q": HALF},
    )


def cn_fair_pick():
    atom = Atom(A_, 0)
    taut = Or(atom, Not(atom))
    term = Choice(I_TERM, I_TERM, A_, 0)
    ty = Counted(Fraction(1), CN_OO)
    left = D(
        "plus-l",
        J((), {A_}, term, And(atom, TOP), ty),
        (cn_identity(names={A_}),),
    )
    right = D(
        "plus-r",
        J((), {A_}, term, And(Not(atom), TOP), ty),
        (cn_identity(names={A_}),),
    )
    both = D("or", J((), {A_}, term, And(TOP, taut), ty), (left, right))
    return D(
        "mu-prime",
        J((), (), Nu(A_, term), TOP, ty),
        (both,),
        {"d": taut, "q": Fraction(1)},
    )


def cn_two():
    """Church 2 at C[1](C[1](C[1]o => o) => (C[1]o => o)) in CN."""
    one = Fraction(1)
    t_inner = Counted(one, CN_OO)  # C1(C1 o => o)
    ctx = (("y", t_inner), ("x", C1O))
    y, x = Var("y"), Var("x")
    dy1 = D("id", J(ctx, (), y, TOP, t_inner))
    dy2 = D("id", J(ctx, (), y, TOP, t_inner))
    dx = D("id", J(ctx, (), x, TOP, C1O))
    dyx = D("app", J(ctx, (), App(y, x), TOP, C1O), (dy2, dx))
    dyyx = D("app", J(ctx, (), App(y, App(y, x)), TOP, C1O), (dy1, dyx))
    dlamx = D(
        "lam",
        J((("y", t_inner),), (), Lam("x", App(y, App(y, x))), TOP, Counted(one, CN_OO)),
        (dyyx,),
    )
    return D(
        "lam",
        J((), (), TWO, TOP, Counted(one, Arrow(t_inner, CN_OO))),
        (dlamx,),
    )


def correlated_pick_term():
    """((I (+b.1) OMEGA) (+b.0) OMEGA) (+a.0) (OMEGA (+b.0) I)."""
    left = Choice(Choice(I_TERM, OMEGA, B_, 1), OMEGA, B_, 0)
    right = Choice(OMEGA, I_TERM, B_, 0)
    return Choice(left, right, A_, 0)


def two_name_quarter_bound_derivation():
    """The quarter bound for the two-name mixed pick via mu-prime and or."""
    one = Fraction(1)
    quarter = Fraction(1, 4)
    ty1 = Counted(one, CN_OO)
    a0 = Atom(A_, 0)
    b0, b1 = Atom(B_, 0), Atom(B_, 1)
    t = correlated_pick_term()
    names = {A_, B_}

    d1 = And(b0, b1)
    c1 = And(a0, d1)
    ident = cn_identity(names=names, constraint=c1)
    inner_l = D("plus-l", J((), names, t.left.left, c1, ty1), (ident,))
    mid_l = D("plus-l", J((), names, t.left, c1, ty1), (inner_l,))
    top_l = D("plus-l", J((), names, t, c1, ty1), (mid_l,))

    d2 = Not(b0)
    c2 = And(Not(a0), d2)
    ident2 = cn_identity(names=names, constraint=c2)
    inner_r = D("plus-r", J((), names, t.right, c2, ty1), (ident2,))
    top_r = D("plus-r", J((), names, t, c2, ty1), (inner_r,))

    nu_b_left = D(
        "mu-prime",
        J((), {A_}, Nu(B_, t), a0, Counted(quarter, CN_OO)),
        (top_l,),
        {"d": d1, "q": quarter},
    )
    nu_b_right = D(
        "mu-prime",
        J((), {A_}, Nu(B_, t), Not(a0), Counted(quarter, CN_OO)),
        (top_r,),
        {"d": d2, "q": quarter},
    )
    joined = D(
        "or",
        J((), {A_}, Nu(B_, t), And(TOP, Or(a0, Not(a0))), Counted(quarter, CN_OO)),
        (nu_b_left, nu_b_right),
    )
    return D(
        "mu-prime",
        J((), (), Nu(A_, Nu(B_, t)), TOP, Counted(quarter, CN_OO)),
        (joined,),
        {"d": Or(a0, Not(a0)), "q": one},
    )


INT_OO = Arrow(mk_mset([C1O]), O)  # [C[1] o] => o  in the intersection system


def int_identity(names=(), constraint=TOP):
    full = (("z", mk_mset([C1O])),)
    body = D("id-sub", J(full, names, Var("z"), constraint, C1O))
    return D(
        "lam",
        J((), names, Lam("z", Var("z")), constraint, Counted(Fraction(1), INT_OO)),
        (body,),
    )


def two_name_exact_bound_derivation():
    """The exact 3/8 bound via the summing counting rule."""
    one = Fraction(1)
    a0 = Atom(A_, 0)
    b0, b1 = Atom(B_, 0), Atom(B_, 1)
    t = correlated_pick_term()
    names = {A_, B_}
    ty1 = Counted(one, INT_OO)

    d1 = And(b0, b1)
    c1 = And(a0, d1)
    ident = int_identity(names=names, constraint=c1)
    inner_l = D("plus-l", J((), names, t.left.left, c1, ty1), (ident,))
    mid_l = D("plus-l", J((), names, t.left, c1, ty1), (inner_l,))
    top_l = D("plus-l", J((), names, t, c1, ty1), (mid_l,))

    d2 = Not(b0)
    c2 = And(Not(a0), d2)
    ident2 = int_identity(names=names, constraint=c2)
    inner_r = D("plus-r", J((), names, t.right, c2, ty1), (ident2,))
    top_r = D("plus-r", J((), names, t, c2, ty1), (inner_r,))

    nu_b_left = D(
        "mu-sigma",
        J((), {A_}, Nu(B_, t), a0, Counted(Fraction(1, 4), INT_OO)),
        (top_l,),
        {"cases": [(d1, Fraction(1, 4))]},
    )
    nu_b_right = D(
        "mu-sigma",
        J((), {A_}, Nu(B_, t), Not(a0), Counted(HALF, INT_OO)),
        (top_r,),
        {"cases": [(d2, HALF)]},
    )

    left_wrapped = D(
        "or",
        J((), {A_}, Nu(B_, t), And(TOP, a0), Counted(Fraction(1, 4), INT_OO)),
        (nu_b_left,),
    )
    right_wrapped = D(
        "or",
        J((), {A_}, Nu(B_, t), And(TOP, Not(a0)), Counted(HALF, INT_OO)),
        (nu_b_right,),
    )
    return D(
        "mu-sigma",
        J((), (), Nu(A_, Nu(B_, t)), TOP, Counted(Fraction(3, 8), INT_OO)),
        (left_wrapped, right_wrapped),
        {"cases": [(a0, HALF), (Not(a0), HALF)]},
    )


def cn_fixture_corpus():
    """CN fixtures with balanced quantified types."""
    return [
        cn_identity(),
        cn_coin(),
        cn_fair_pick(),
        cn_two(),
        two_name_quarter_bound_derivation(),
    ]


# ---------------------------------------------------------------------------
# Proof fixtures


def half_id_proof(prop="A"):
    """Mix an exact identity proof with a dummy one, then count."""
    A = PropVar(prop)
    a0 = Atom(A_, 0)
    arrow = Implies(A, A)
    exact = P(
        "imp-i",
        S((), a0, arrow),
        (P("id", S((A,), a0, A), (), {"index": 0}),),
    )
    dummy = P("bot", S((), BOT, arrow))
    mixed = P("m", S((), a0, arrow), (exact, dummy), {"pivot": a0})
    return P(
        "ci",
        S((), TOP, Count(HALF, arrow)),
        (mixed,),
        {"d": a0},
    )


def duplicator_proof(q=HALF, prop="A"):
    """|- C^q(A->A) -> A -> C^q C^q A, built from two counted eliminations."""
    A = PropVar(prop)
    arrow = Implies(A, A)
    carrow = Count(q, arrow)
    ctx0 = (carrow, A)

    def ce_block(ctx):
        major = P("id", S(ctx, TOP, carrow), (), {"index": 0})
        inner_ctx = ctx + (arrow,)
        fn = P("id", S(inner_ctx, TOP, arrow), (), {"index": len(inner_ctx) - 1})
        av = P("id", S(inner_ctx, TOP, A), (), {"index": 1})
        minor = P("imp-e", S(inner_ctx, TOP, A), (fn, av))
        return P("ce", S(ctx, TOP, Count(q, A)), (major, minor))

    first = ce_block(ctx0)
    second = ce_block(ctx0 + (A,))
    outer = P(
        "ce",
        S(ctx0, TOP, Count(q, Count(q, A))),
        (first, second),
    )
    inner_lam = P(
        "imp-i",
        S((carrow,), TOP, Implies(A, Count(q, Count(q, A)))),
        (outer,),
    )
    return P(
        "imp-i",
        S((), TOP, Implies(carrow, Implies(A, Count(q, Count(q, A))))),
        (inner_lam,),
    )


def cut_proof():
    """The duplicator proof cut against the half-identity: |- A -> C^1/2 C^1/2 A."""
    dup = duplicator_proof()
    half = half_id_proof()
    A = PropVar("A")
    return P(
        "imp-e",
        S((), TOP, Implies(A, Count(HALF, Count(HALF, A)))),
        (dup, half),
    )


def proof_fixture_corpus():
    return [half_id_proof(), duplicator_proof(), cut_proof()]


# ---------------------------------------------------------------------------
# Random generators (plain seeded random; sizes stay tiny)


class _TermNames:
    """Per-term supply of generator names, so binders never shadow."""

    def __init__(self, prefix):
        self.prefix = prefix
        self.counter = 0

    def fresh(self):
        self.counter += 1
        return Name(f"{self.prefix}{self.counter}")


def random_term(rng, size, names, vars_in_scope, allow_cbv=False, supply=None):
    """A random term of roughly the requested size; nu binders get distinct
    names."""
    supply = supply or _TermNames(f"n{rng.randrange(10**6)}_")
    if size <= 1:
        if vars_in_scope and rng.random() < 0.8:
            return Var(rng.choice(vars_in_scope))
        return Lam("v0", Var("v0"))
    kinds = ["lam", "app", "choice", "nu"]
    if names:
        kinds.append("choice")
    if allow_cbv:
        kinds.append("cbv")
    kind = rng.choice(kinds)
    if kind == "lam":
        v = f"v{len(vars_in_scope)}"
        return Lam(
            v,
            random_term(rng, size - 1, names, vars_in_scope + [v], allow_cbv, supply),
        )
    if kind == "app":
        left = size // 2
        return App(
            random_term(rng, left, names, vars_in_scope, allow_cbv, supply),
            random_term(rng, size - 1 - left, names, vars_in_scope, allow_cbv, supply),
        )
    if kind == "cbv":
        left = size // 2
        return CbvApp(
            random_term(rng, left, names, vars_in_scope, allow_cbv, supply),
            random_term(rng, size - 1 - left, names, vars_in_scope, allow_cbv, supply),
        )
    if kind == "choice" and names:
        name = rng.choice(names)
        left = size // 2
        return Choice(
            random_term(rng, left, names, vars_in_scope, allow_cbv, supply),
            random_term(rng, size - 1 - left, names, vars_in_scope, allow_cbv, supply),
            name,
            rng.randrange(3),
        )
    fresh = supply.fresh()
    return Nu(
        fresh,
        random_term(rng, size - 1, names + [fresh], vars_in_scope, allow_cbv, supply),
    )


def random_affine_term(rng, size, names, vars_in_scope, supply=None):
    """Random term whose lambda variables are used at most once (keeps full
    reduction terminating for the join tests)."""
    supply = supply or _TermNames(f"m{rng.randrange(10**6)}_")
    if size <= 1 or (vars_in_scope and rng.random() < 0.25):
        if vars_in_scope:
            v = rng.choice(vars_in_scope)
            vars_in_scope.remove(v)
            return Var(v)
        return Lam("u0", Var("u0"))
    kind = rng.choice(["lam", "app", "choice", "nu", "app"])
    if kind == "lam":
        v = f"u{rng.randrange(1000)}"
        vars_in_scope.append(v)
        return Lam(v, random_affine_term(rng, size - 1, names, vars_in_scope, supply))
    if kind == "app":
        left = size // 2
        return App(
            random_affine_term(rng, left, names, vars_in_scope, supply),
            random_affine_term(rng, size - 1 - left, names, vars_in_scope, supply),
        )
    if kind == "choice" and names:
        name = rng.choice(names)
        left = size // 2
        return Choice(
            random_affine_term(rng, left, names, vars_in_scope, supply),
            random_affine_term(rng, size - 1 - left, names, vars_in_scope, supply),
            name,
            rng.randrange(2),
        )
    fresh = supply.fresh()
    return Nu(
        fresh, random_affine_term(rng, size - 1, names + [fresh], vars_in_scope, supply)
    )


_PROPS = [PropVar(p) for p in ("A", "B", "C")]


def random_proof_formula(rng, depth):
    if depth <= 0:
        return rng.choice(_PROPS)
    kind = rng.random()
    if kind < 0.4:
        return Implies(
            random_proof_formula(rng, depth - 1),
            random_proof_formula(rng, depth - 1),
        )
    if kind < 0.7:
        q = rng.choice([Fraction(1, 2), Fraction(1, 4), Fraction(1)])
        return Count(q, random_proof_formula(rng, depth - 1))
    return rng.choice(_PROPS)


class _NameSupply:
    def __init__(self):
        self.counter = 0

    def fresh(self):
        self.counter += 1
        return Name(f"g{self.counter}")


def _constraint_for(q, name):
    """A one-name formula with measure exactly q in {1, 1/2, 1/4}."""
    a0, a1 = Atom(name, 0), Atom(name, 1)
    if q == Fraction(1):
        return Or(a0, Not(a0))
    if q == Fraction(1, 2):
        return a0
    if q == Fraction(1, 4):
        return And(a0, a1)
    raise ValueError(q)


def random_proof(rng, depth, ctx=(), constraint=TOP, formula=None, supply=None):
    """A random checked proof of bounded depth, or None on a dead end."""
    supply = supply or _NameSupply()
    if formula is None:
        formula = random_proof_formula(rng, 2)
    for _ in range(24):
        p = _try_random_proof(rng, depth, ctx, constraint, formula, supply)
        if p is not None:
            return p
    return None


def _try_random_proof(rng, depth, ctx, constraint, formula, supply):
    choices = []
    hyp_indices = [i for i, a in enumerate(ctx) if a == formula]
    if hyp_indices:
        choices.append("id")
    if depth > 0:
        if isinstance(formula, Implies):
            choices.extend(["imp-i", "imp-i"])
        if isinstance(formula, Count):
            choices.extend(["ci", "ci"])
            if rng.random() < 0.4:
                choices.append("ce")
        choices.append("m")
        if rng.random() < 0.3:
            choices.append("imp-e")
    if not choices:
        return None
    rng.shuffle(choices)
    for rule in choices:
        built = _build_rule(rng, rule, depth, ctx, constraint, formula, supply)
        if built is not None:
            return built
    return None


def _build_rule(rng, rule, depth, ctx, constraint, formula, supply):
    if rule == "id":
        idx = rng.choice([i for i, a in enumerate(ctx) if a == formula])
        return P("id", S(ctx, constraint, formula), (), {"index": idx})
    if rule == "imp-i":
        body = _try_random_proof(
            rng, depth - 1, ctx + (formula.antecedent,), constraint,
            formula.consequent, supply,
        )
        if body is None:
            return None
        return P("imp-i", S(ctx, constraint, formula), (body,))
    if rule == "ci":
        name = supply.fresh()
        d = _constraint_for(formula.q, name)
        body = _try_random_proof(
            rng, depth - 1, ctx, And(constraint, d), formula.body, supply
        )
        if body is None:
            return None
        return P("ci", S(ctx, constraint, formula), (body,), {"d": d})
    if rule == "ce":
        inner = random_proof_formula(rng, 1)
        q = formula.q
        major = _try_random_proof(
            rng, depth - 1, ctx, constraint, Count(q, inner), supply
        )
        if major is None:
            return None
        minor = _try_random_proof(
            rng, depth - 1, ctx + (inner,), constraint, formula.body, supply
        )
        if minor is None:
            return None
        return P("ce", S(ctx, constraint, formula), (major, minor))
    if rule == "m":
        name = supply.fresh()
        pivot = Atom(name, 0)
        left_c = And(constraint, pivot)
        right_c = And(constraint, Not(pivot))
        left = _try_random_proof(rng, depth - 1, ctx, left_c, formula, supply)
        if left is None:
            return None
        right = _try_random_proof(rng, depth - 1, ctx, right_c, formula, supply)
        if right is None:
            return None
        return P("m", S(ctx, constraint, formula), (left, right), {"pivot": pivot})
    if rule == "imp-e":
        other = random_proof_formula(rng, 1)
        fun = _try_random_proof(
            rng, depth - 1, ctx, constraint, Implies(other, formula), supply
        )
        if fun is None:
            return None
        arg = _try_random_proof(rng, depth - 1, ctx, constraint, other, supply)
        if arg is None:
            return None
        return P("imp-e", S(ctx, constraint, formula), (fun, arg))
    return None
