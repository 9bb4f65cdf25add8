"""Named Boolean formulas and their exact measure on the product Cantor space.

Atoms are (name, index) pairs; each atom is an independent fair bit, so the
measure of a formula is (#satisfying assignments) / 2^(#atoms).  Counting is
by truth-table enumeration over the atoms that actually occur, guarded by a
hard cap.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import ParseError, TooManyAtomsError, UndefinedBitError
from .terms import Name

ATOM_CAP = 24


@dataclass(frozen=True)
class BoolFormula:
    pass


@dataclass(frozen=True)
class Top(BoolFormula):
    pass


@dataclass(frozen=True)
class Bot(BoolFormula):
    pass


@dataclass(frozen=True)
class Atom(BoolFormula):
    name: Name
    index: int


@dataclass(frozen=True)
class Not(BoolFormula):
    arg: BoolFormula


@dataclass(frozen=True)
class And(BoolFormula):
    left: BoolFormula
    right: BoolFormula


@dataclass(frozen=True)
class Or(BoolFormula):
    left: BoolFormula
    right: BoolFormula


TOP = Top()
BOT = Bot()


def conj(parts):
    parts = list(parts)
    if not parts:
        return TOP
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def disj(parts):
    parts = list(parts)
    if not parts:
        return BOT
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out


def atoms(b):
    if isinstance(b, Atom):
        return {(b.name, b.index)}
    if isinstance(b, Not):
        return atoms(b.arg)
    if isinstance(b, (And, Or)):
        return atoms(b.left) | atoms(b.right)
    return set()


def formula_names(b):
    return {name for name, _ in atoms(b)}


def eval_formula(b, valuation):
    """Evaluate under a finite map (Name, index) -> bit; missing bits error."""
    if isinstance(b, Top):
        return True
    if isinstance(b, Bot):
        return False
    if isinstance(b, Atom):
        key = (b.name, b.index)
        if key not in valuation:
            raise UndefinedBitError(f"no bit for ({b.name}, {b.index})")
        return valuation[key] == 1
    if isinstance(b, Not):
        return not eval_formula(b.arg, valuation)
    if isinstance(b, And):
        return eval_formula(b.left, valuation) and eval_formula(b.right, valuation)
    if isinstance(b, Or):
        return eval_formula(b.left, valuation) or eval_formula(b.right, valuation)
    raise TypeError(b)


def _assignments(atom_list):
    for bits in itertools.product((0, 1), repeat=len(atom_list)):
        yield dict(zip(atom_list, bits))


def _check_cap(atom_set):
    if len(atom_set) > ATOM_CAP:
        raise TooManyAtomsError(
            f"{len(atom_set)} atoms exceeds the cap of {ATOM_CAP}"
        )


def measure(b):
    """Exact measure of the event denoted by b, as a Fraction."""
    ats = sorted(atoms(b), key=lambda ni: (ni[0].seq, ni[1]))
    _check_cap(ats)
    count = sum(1 for v in _assignments(ats) if eval_formula(b, v))
    return Fraction(count, 2 ** len(ats))


def entails(b, c):
    """True iff every assignment satisfying b satisfies c."""
    ats = sorted(atoms(b) | atoms(c), key=lambda ni: (ni[0].seq, ni[1]))
    _check_cap(ats)
    return all(
        eval_formula(c, v) for v in _assignments(ats) if eval_formula(b, v)
    )


def equivalent(b, c):
    return entails(b, c) and entails(c, b)


def satisfiable(b):
    return not entails(b, BOT)


# ---------------------------------------------------------------------------
# Concrete syntax: T, F, name.index, !b, b & c, b | c, parentheses.


def parse_formula(text):
    pos = 0

    def skip_ws(p):
        while p < len(text) and text[p].isspace():
            p += 1
        return p

    def parse_or(p):
        left, p = parse_and(p)
        while True:
            p = skip_ws(p)
            if p < len(text) and text[p] == "|":
                right, p = parse_and(p + 1)
                left = Or(left, right)
            else:
                return left, p

    def parse_and(p):
        left, p = parse_not(p)
        while True:
            p = skip_ws(p)
            if p < len(text) and text[p] == "&":
                right, p = parse_not(p + 1)
                left = And(left, right)
            else:
                return left, p

    def parse_not(p):
        p = skip_ws(p)
        if p < len(text) and text[p] == "!":
            arg, p = parse_not(p + 1)
            return Not(arg), p
        return parse_atom(p)

    def parse_atom(p):
        p = skip_ws(p)
        if p >= len(text):
            raise ParseError("unexpected end of formula", p)
        ch = text[p]
        if ch == "(":
            inner, p = parse_or(p + 1)
            p = skip_ws(p)
            if p >= len(text) or text[p] != ")":
                raise ParseError("expected ')'", p)
            return inner, p + 1
        if ch == "T" and not _ident_continues(p + 1):
            return TOP, p + 1
        if ch == "F" and not _ident_continues(p + 1):
            return BOT, p + 1
        m = re.match(r"([a-z][a-zA-Z0-9_'~]*)\.([0-9]+)", text[p:])
        if m:
            return Atom(Name(m.group(1)), int(m.group(2))), p + m.end()
        raise ParseError(f"unexpected character {ch!r} in formula", p)

    def _ident_continues(p):
        return p < len(text) and (text[p].isalnum() or text[p] == "_")

    out, p = parse_or(0)
    p = skip_ws(p)
    if p != len(text):
        raise ParseError("trailing input in formula", p)
    return out


def print_formula(b):
    def go(b, prec):
        if isinstance(b, Top):
            return "T"
        if isinstance(b, Bot):
            return "F"
        if isinstance(b, Atom):
            return f"{b.name}.{b.index}"
        if isinstance(b, Not):
            return "!" + go(b.arg, 3)
        if isinstance(b, And):
            s = f"{go(b.left, 2)} & {go(b.right, 3)}"
            return f"({s})" if prec > 2 else s
        if isinstance(b, Or):
            s = f"{go(b.left, 1)} | {go(b.right, 2)}"
            return f"({s})" if prec > 1 else s
        raise TypeError(b)

    return go(b, 0)


def parse_rational(text):
    text = text.strip()
    if "/" in text:
        num, den = text.split("/", 1)
        return Fraction(int(num), int(den))
    return Fraction(int(text))


def format_rational(q):
    return f"{q.numerator}/{q.denominator}"
