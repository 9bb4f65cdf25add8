"""Reduction relations: beta, the permutative rules, and head reduction.

Two modes: PE (the base calculus) and PE_BRACES (the CbV extension).  The
permutative system of PE_BRACES drops rule (not-nu) and adds the three
CbV-application permutations.

The pair order used by the plus-plus rules at a redex position: (a,i) comes
before (b,j) when a's binder encloses b's binder at that position (free names
count as outermost), with interning order breaking ties between free names,
and index order within one name.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import FuelError, ModeViolationError, NotPnfError, OpenNamesError
from .terms import (
    App,
    CbvApp,
    Choice,
    Lam,
    Name,
    Nu,
    Term,
    alpha_eq,
    children,
    free_names,
    print_term,
    replace_at,
    rename_bound_name,
    substitute,
    subterm_at,
)

PE = "pe"
PE_BRACES = "pe-braces"

PERM_STEP_CAP = 10**6


@dataclass(frozen=True)
class ReductionStep:
    rule: str
    path: tuple
    before: Term
    after: Term

    def format(self):
        pathtxt = ".".join(str(i) for i in self.path) if self.path else "e"
        return (
            f"{self.rule} @ {pathtxt} : "
            f"{print_term(self.before)} ~> {print_term(self.after)}"
        )

    def to_json(self):
        return {
            "rule": self.rule,
            "path": list(self.path),
            "before": print_term(self.before),
            "after": print_term(self.after),
        }


@dataclass(frozen=True)
class PseudoValue:
    term: Term


@dataclass(frozen=True)
class Generator:
    name: Name
    tree: Term
    support: tuple


@dataclass
class ReduceOutcome:
    term: Term
    trace: list
    exhausted: bool = False


def contains_cbv(t):
    if isinstance(t, CbvApp):
        return True
    return any(contains_cbv(c) for c in children(t))


def _require_mode(t, mode):
    if mode not in (PE, PE_BRACES):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == PE and contains_cbv(t):
        raise ModeViolationError("CbV application in plain PE mode")


def _pair_before(a, i, b, j, env):
    """The ordering side condition of the plus-plus rules."""
    if a is b:
        return i < j
    da = env.get(a, -1)
    db = env.get(b, -1)
    if da != db:
        return da < db
    return a.seq < b.seq


def _fresh_avoiding(base, *terms):
    """Deterministic fresh rename target, local to the redex."""
    from .terms import all_names

    taken = {n.text for t in terms for n in all_names(t)}
    k = 1
    while f"{base.text}_{k}" in taken:
        k += 1
    return Name(f"{base.text}_{k}")


def _local_results(t, env, mode, include_beta):
    """Rule applications available at the root of t.  Yields (rule, result)."""
    braces = mode == PE_BRACES
    if isinstance(t, Choice):
        left, right, a, i = t.left, t.right, t.name, t.index
        if alpha_eq(left, right):
            yield "i", left
        if isinstance(left, Choice) and left.name is a and left.index == i:
            yield "c1", Choice(left.left, right, a, i)
        if isinstance(right, Choice) and right.name is a and right.index == i:
            yield "c2", Choice(left, right.right, a, i)
        if (
            isinstance(left, Choice)
            and (left.name, left.index) != (a, i)
            and _pair_before(left.name, left.index, a, i, env)
        ):
            b2, j2 = left.name, left.index
            yield "plus-plus-1", Choice(
                Choice(left.left, right, a, i),
                Choice(left.right, right, a, i),
                b2,
                j2,
            )
        if (
            isinstance(right, Choice)
            and (right.name, right.index) != (a, i)
            and _pair_before(right.name, right.index, a, i, env)
        ):
            b2, j2 = right.name, right.index
            yield "plus-plus-2", Choice(
                Choice(left, right.left, a, i),
                Choice(left, right.right, a, i),
                b2,
                j2,
            )
    elif isinstance(t, Lam):
        body = t.body
        if isinstance(body, Choice):
            yield "plus-lam", Choice(
                Lam(t.var, body.left), Lam(t.var, body.right),
                body.name, body.index,
            )
        if isinstance(body, Nu):
            yield "nu-lam", Nu(body.name, Lam(t.var, body.body))
    elif isinstance(t, App):
        fun, arg = t.fun, t.arg
        if isinstance(fun, Choice):
            yield "plus-fun", Choice(
                App(fun.left, arg), App(fun.right, arg), fun.name, fun.index
            )
        if isinstance(arg, Choice):
            yield "plus-arg", Choice(
                App(fun, arg.left), App(fun, arg.right), arg.name, arg.index
            )
        if isinstance(fun, Nu):
            nu = fun
            if nu.name in free_names(arg):
                nu = rename_bound_name(nu, _fresh_avoiding(nu.name, fun, arg))
            yield "nu-fun", Nu(nu.name, App(nu.body, arg))
        if include_beta and isinstance(fun, Lam):
            yield "beta", substitute(fun.body, fun.var, arg)
    elif isinstance(t, Nu):
        body = t.body
        if isinstance(body, Choice) and body.name is not t.name:
            yield "plus-nu", Choice(
                Nu(t.name, body.left), Nu(t.name, body.right),
                body.name, body.index,
            )
        if mode == PE and t.name not in free_names(body):
            yield "not-nu", body
    elif braces and isinstance(t, CbvApp):
        fun, arg = t.fun, t.arg
        if isinstance(arg, Nu):
            nu = arg
            if nu.name in free_names(fun):
                nu = rename_bound_name(nu, _fresh_avoiding(nu.name, fun, arg))
            yield "cbv-nu", Nu(nu.name, App(fun, nu.body))
        if isinstance(fun, Choice):
            yield "cbv-plus-1", Choice(
                CbvApp(fun.left, arg), CbvApp(fun.right, arg),
                fun.name, fun.index,
            )
        if isinstance(arg, Choice):
            yield "cbv-plus-2", Choice(
                CbvApp(fun, arg.left), CbvApp(fun, arg.right),
                arg.name, arg.index,
            )


def _iter_redexes(root, mode, include_beta):
    """Pre-order enumeration of (rule, path, result_subterm)."""

    def go(t, path, env, depth):
        for rule, result in _local_results(t, env, mode, include_beta):
            yield rule, path, result
        kids = children(t)
        for i, c in enumerate(kids):
            env2 = env
            if isinstance(t, Nu):
                env2 = dict(env)
                env2[t.name] = depth
            yield from go(c, path + (i,), env2, depth + 1)

    yield from go(root, (), {}, 0)


def step(t, mode=PE):
    """All one-step redexes of the full reduction, leftmost-outermost first."""
    _require_mode(t, mode)
    out = []
    for rule, path, result in _iter_redexes(t, mode, include_beta=True):
        out.append(ReductionStep(rule, path, t, replace_at(t, path, result)))
    return out


def iter_steps(t, mode=PE, include_beta=True):
    """Lazy (rule, path, local_result) triples; the reduct of a triple is
    replace_at(t, path, local_result)."""
    _require_mode(t, mode)
    yield from _iter_redexes(t, mode, include_beta)


def first_step(t, mode=PE, include_beta=True):
    _require_mode(t, mode)
    for rule, path, result in _iter_redexes(t, mode, include_beta):
        return ReductionStep(rule, path, t, replace_at(t, path, result))
    return None


def pnf(t, mode=PE, cap=PERM_STEP_CAP):
    """The unique permutative normal form, with the reduction trace."""
    _require_mode(t, mode)
    trace = []
    for _ in range(cap):
        s = first_step(t, mode, include_beta=False)
        if s is None:
            return t, trace
        trace.append(s)
        t = s.after
    raise FuelError(f"permutative normalization exceeded {cap} steps")


def is_pnf(t, mode=PE):
    _require_mode(t, mode)
    return first_step(t, mode, include_beta=False) is None


def classify_pnf(t, mode=PE):
    """Split a name-closed PNF into a pseudo-value or a generator with its
    choice tree and support."""
    if free_names(t):
        raise OpenNamesError(f"free names {sorted(str(n) for n in free_names(t))}")
    if not is_pnf(t, mode):
        raise NotPnfError(print_term(t))
    if not isinstance(t, Nu):
        return PseudoValue(t)
    leaves = []
    _collect_leaves(t.body, t.name, leaves)
    return Generator(t.name, t.body, tuple(leaves))


def _collect_leaves(tree, name, out):
    if isinstance(tree, Choice) and tree.name is name:
        _collect_leaves(tree.left, name, out)
        _collect_leaves(tree.right, name, out)
    else:
        out.append(tree)


def is_pseudo_value(t, mode=PE):
    return not isinstance(t, Nu) and is_pnf(t, mode)


# ---------------------------------------------------------------------------
# Head reduction


def _head_redex_in_value(t, path, mode):
    """Head beta (or CbV-argument) redex inside a permutation-normal
    pseudo-value position."""
    if isinstance(t, Lam):
        return _head_redex_in_value(t.body, path + (0,), mode)
    if isinstance(t, App):
        if isinstance(t.fun, Lam):
            return ("beta", path, substitute(t.fun.body, t.fun.var, t.arg))
        return _head_redex_in_value(t.fun, path + (0,), mode)
    if mode == PE_BRACES and isinstance(t, CbvApp):
        found = _head_redex_in_value(t.fun, path + (0,), mode)
        if found is not None:
            return found
        return _head_redex_in_value(t.arg, path + (1,), mode)
    return None


def _head_redex(t, path, mode):
    """Descend the randomized context, then look for a head beta redex."""
    if isinstance(t, Nu):
        return _head_redex(t.body, path + (0,), mode)
    if isinstance(t, Choice):
        found = _head_redex(t.left, path + (0,), mode)
        if found is not None:
            return found
        return _head_redex(t.right, path + (1,), mode)
    return _head_redex_in_value(t, path, mode)


def head_step(t, mode=PE):
    """One head-reduction step: the first permutative redex if any, else the
    leftmost head beta redex through the randomized context."""
    s = first_step(t, mode, include_beta=False)
    if s is not None:
        return s
    found = _head_redex(t, (), mode)
    if found is None:
        return None
    rule, path, result = found
    return ReductionStep(rule, path, t, replace_at(t, path, result))


def is_hnv(t, mode=PE):
    """Head normal value: a pseudo-value with no head-reduction step."""
    if isinstance(t, Nu):
        return False
    return head_step(t, mode) is None


def apply_rule_at(t, rule, path, mode=PE):
    """Apply the named reduction rule at a path; raises if it fails to match.
    The ordering guard of the plus-plus rules is skipped (callers replay
    steps that already fired in context)."""
    sub = subterm_at(t, path)
    for r, result in _local_results(sub, {}, mode, include_beta=True):
        if r == rule:
            return replace_at(t, path, result)
    if rule == "plus-plus-1" and isinstance(sub, Choice) and isinstance(sub.left, Choice):
        inner = sub.left
        result = Choice(
            Choice(inner.left, sub.right, sub.name, sub.index),
            Choice(inner.right, sub.right, sub.name, sub.index),
            inner.name,
            inner.index,
        )
        return replace_at(t, path, result)
    if rule == "plus-plus-2" and isinstance(sub, Choice) and isinstance(sub.right, Choice):
        inner = sub.right
        result = Choice(
            Choice(sub.left, inner.left, sub.name, sub.index),
            Choice(sub.left, inner.right, sub.name, sub.index),
            inner.name,
            inner.index,
        )
        return replace_at(t, path, result)
    raise NotPnfError(f"rule {rule} does not apply at path {path}")


def reduce_term(t, mode=PE, strategy="full", fuel=1000):
    """Fuel-bounded driver.  `full` takes the leftmost-outermost redex of the
    full reduction; `head` follows head_step."""
    _require_mode(t, mode)
    trace = []
    for _ in range(fuel):
        if strategy == "head":
            s = head_step(t, mode)
        elif strategy == "full":
            s = first_step(t, mode, include_beta=True)
        else:
            raise ValueError(f"unknown strategy {strategy!r}")
        if s is None:
            return ReduceOutcome(t, trace, exhausted=False)
        trace.append(s)
        t = s.after
    more = (
        head_step(t, mode)
        if strategy == "head"
        else first_step(t, mode, include_beta=True)
    )
    return ReduceOutcome(t, trace, exhausted=more is not None)
