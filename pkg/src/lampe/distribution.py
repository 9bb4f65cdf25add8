"""Exact value distributions, termination mass functionals, and a seeded
Monte Carlo cross-validator.

The distribution of a name-closed PNF assigns each pseudo-value the exact
measure of the event set leading to it, computed by walking generator trees
with a partial bit assignment (so the same index met twice along a path is
not double-counted).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

from .errors import ModeViolationError, OpenNamesError
from .rewrite import (
    PE,
    PseudoValue,
    classify_pnf,
    contains_cbv,
    head_step,
    is_hnv,
    pnf,
)
from .terms import (
    App,
    Choice,
    Lam,
    Nu,
    Term,
    alpha_eq,
    canonical_str,
    free_names,
    replace_at,
)


@dataclass
class Distribution:
    """Finite sub-distribution over alpha-canonicalized pseudo-values."""

    entries: dict  # canonical key -> (representative term, Fraction)

    @property
    def mass(self):
        return sum((w for _, w in self.entries.values()), Fraction(0))

    def items(self):
        return [
            (term, weight)
            for _, (term, weight) in sorted(self.entries.items())
        ]

    def weight_of(self, t):
        entry = self.entries.get(canonical_str(t))
        return entry[1] if entry else Fraction(0)

    def __len__(self):
        return len(self.entries)


@dataclass
class TerminationEstimate:
    value: Fraction
    fuel_used: int
    exact: bool


def _add(entries, term, weight):
    key = canonical_str(term)
    if key in entries:
        old_term, old_w = entries[key]
        entries[key] = (old_term, old_w + weight)
    else:
        entries[key] = (term, weight)


def _tree_leaf_weights(tree, name):
    """Leaves of a generator tree with the exact measures of the bit events
    reaching them."""

    def go(node, assignment):
        if isinstance(node, Choice) and node.name is name:
            if node.index in assignment:
                side = node.left if assignment[node.index] == 1 else node.right
                yield from go(side, assignment)
            else:
                left = dict(assignment)
                left[node.index] = 1
                yield from go(node.left, left)
                right = dict(assignment)
                right[node.index] = 0
                yield from go(node.right, right)
        else:
            yield node, Fraction(1, 2 ** len(assignment))

    yield from go(tree, {})


def distribution(t, mode=PE):
    """The sub-distribution of pseudo-values of a name-closed PNF."""
    view = classify_pnf(t, mode)
    entries = {}
    if isinstance(view, PseudoValue):
        _add(entries, view.term, Fraction(1))
        return Distribution(entries)
    for leaf, weight in _tree_leaf_weights(view.tree, view.name):
        sub = distribution(leaf, mode)
        for term, w in sub.entries.values():
            _add(entries, term, weight * w)
    return Distribution(entries)


def hnv_mass(t, mode=PE):
    """Probability mass of head normal values in the distribution of t."""
    dist = distribution(t, mode)
    total = Fraction(0)
    for term, w in dist.entries.values():
        if is_hnv(term, mode):
            total += w
    return total


class _Budget:
    def __init__(self, fuel):
        self.fuel = fuel
        self.used = 0
        self.exhausted = False

    @property
    def remaining(self):
        return max(self.fuel - self.used, 0)

    def spend(self, n=1):
        self.used += n
        if self.used > self.fuel:
            self.exhausted = True
            return False
        return True


def _head_round(t, mode, budget):
    """Apply one head beta step in every branch position that has one.
    Returns (term, number of steps applied)."""
    from .rewrite import _head_redex_in_value

    applied = [0]

    def go(t):
        if isinstance(t, Nu):
            return Nu(t.name, go(t.body))
        if isinstance(t, Choice):
            return Choice(go(t.left), go(t.right), t.name, t.index)
        found = _head_redex_in_value(t, (), mode)
        if found is None or budget.remaining - applied[0] <= 0:
            return t
        _, path, result = found
        applied[0] += 1
        return replace_at(t, path, result)

    out = go(t)
    return out, applied[0]


def hnv_lower_bound(t, fuel, mode=PE):
    """Fuel-bounded under-approximation of the head-normalization
    probability: head-reduce fairly across branches, keeping the best mass
    seen at each permutation-normal stage."""
    if free_names(t):
        raise OpenNamesError("term has free names")
    budget = _Budget(fuel)
    best = Fraction(0)
    exact = True
    while True:
        t, trace = pnf(t, mode)
        budget.spend(len(trace))
        best = max(best, hnv_mass(t, mode))
        if budget.exhausted or budget.remaining == 0:
            exact = False
            break
        t2, n = _head_round(t, mode, budget)
        if n == 0:
            break
        budget.spend(n)
        if alpha_eq(t2, t):
            # deterministic head rounds hit a fixpoint: nothing will change
            break
        t = t2
    return TerminationEstimate(best, min(budget.used, fuel), exact)


def _spine_args(t):
    while isinstance(t, Lam):
        t = t.body
    args = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fun
    args.reverse()
    return args


def _nf_rec(t, budget, mode):
    """Lower bound for the normalization probability of a name-closed term.
    Returns (value, exact)."""
    exact = True
    while True:
        t, trace = pnf(t, mode)
        if not budget.spend(len(trace)):
            return Fraction(0), False
        if isinstance(t, Nu):
            view = classify_pnf(t, mode)
            total = Fraction(0)
            for leaf, weight in _tree_leaf_weights(view.tree, view.name):
                sub, sub_exact = _nf_rec(leaf, budget, mode)
                exact = exact and sub_exact
                total += weight * sub
            return total, exact
        if is_hnv(t, mode):
            total = Fraction(1)
            for arg in _spine_args(t):
                sub, sub_exact = _nf_rec(arg, budget, mode)
                exact = exact and sub_exact
                total *= sub
            return total, exact
        s = head_step(t, mode)
        if s is None:
            # head-blocked without being a head normal value
            return Fraction(0), True
        if not budget.spend(1):
            return Fraction(0), False
        if alpha_eq(s.after, t):
            # self-looping head redex: this branch never normalizes
            return Fraction(0), True
        t = s.after


def nf_mass(t, fuel, mode=PE):
    """Fuel-bounded lower bound for the probability of reaching a normal
    form.  Only defined on the plain calculus."""
    if mode != PE or contains_cbv(t):
        raise ModeViolationError(
            "normal-form mass is only defined for plain PE terms"
        )
    if free_names(t):
        raise OpenNamesError("term has free names")
    budget = _Budget(fuel)
    value, exact = _nf_rec(t, budget, PE)
    return TerminationEstimate(value, min(budget.used, fuel), exact)


# ---------------------------------------------------------------------------
# Monte Carlo


@dataclass
class SampleOutcome:
    kind: str  # "head-normal" | "exhausted"
    term: Term = None

    @property
    def is_head_normal(self):
        return self.kind == "head-normal"


_ADVANCE_CAP = 2000


def _advance(t, mode, cache):
    """Run the deterministic part of a sampled reduction: permutative
    normalization plus head steps, until a generator or a head normal value
    appears.  Returns (kind, term, steps); kind is one of "gen", "hnv",
    "diverged" (a detected head-step fixpoint), or "cap" (gave up after the
    internal cap, so the segment needs more than that many steps)."""
    key = canonical_str(t)
    cached = cache.get(key)
    if cached is not None:
        return cached
    steps = 0
    cur = t
    result = None
    while steps <= _ADVANCE_CAP:
        cur, trace = pnf(cur, mode)
        steps += len(trace)
        if isinstance(cur, Nu):
            result = ("gen", cur, steps)
            break
        s = head_step(cur, mode)
        if s is None:
            result = ("hnv", cur, steps)
            break
        if alpha_eq(s.after, cur):
            result = ("diverged", cur, steps)
            break
        cur = s.after
        steps += 1
    if result is None:
        result = ("cap", cur, steps)
    cache[key] = result
    return result


def sample_run(t, seed, fuel, mode=PE, _caches=None):
    """One randomized head-reduction run: whenever the term is a generator
    PNF, fresh bits from the seeded PRNG resolve its tree.  Reproducible for
    a fixed seed."""
    rng = random.Random(seed)
    cache = _caches if _caches is not None else {}
    remaining = fuel
    while True:
        kind, cur, steps = _advance(t, mode, cache)
        if kind == "cap" and fuel > _ADVANCE_CAP:
            # honest slow path for very large budgets
            return _sample_run_plain(t, rng, remaining, mode)
        if kind in ("diverged", "cap") or steps > remaining:
            return SampleOutcome("exhausted")
        remaining -= steps
        if kind == "hnv":
            return SampleOutcome("head-normal", cur)
        bits = {}
        node = cur.body
        while isinstance(node, Choice) and node.name is cur.name:
            bit = bits.setdefault(node.index, rng.getrandbits(1))
            node = node.left if bit == 1 else node.right
        t = node


def _sample_run_plain(t, rng, remaining, mode):
    while True:
        t, trace = pnf(t, mode)
        remaining -= len(trace)
        if remaining < 0:
            return SampleOutcome("exhausted")
        if isinstance(t, Nu):
            bits = {}
            node = t.body
            while isinstance(node, Choice) and node.name is t.name:
                bit = bits.setdefault(node.index, rng.getrandbits(1))
                node = node.left if bit == 1 else node.right
            t = node
            continue
        s = head_step(t, mode)
        if s is None:
            return SampleOutcome("head-normal", t)
        remaining -= 1
        if remaining < 0:
            return SampleOutcome("exhausted")
        t = s.after


def estimate_hnv(t, samples, fuel, seed, mode=PE):
    """Fraction of runs reaching a head normal value, with an upper rational
    bound on the binomial standard error.  Deterministic for a fixed seed."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    caches = {}
    hits = 0
    for k in range(samples):
        sub_seed = seed * 1_000_003 + k
        if sample_run(t, sub_seed, fuel, mode, _caches=caches).is_head_normal:
            hits += 1
    estimate = Fraction(hits, samples)
    variance_numerator = hits * (samples - hits) * samples
    root = math.isqrt(variance_numerator)
    if root * root < variance_numerator:
        root += 1
    stderr = Fraction(root, samples * samples)
    return estimate, stderr
