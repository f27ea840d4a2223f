"""CTL abstract syntax, pretty-printing and existential normal form."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Union


class _Node:
    __slots__ = ()

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True)
class TrueF(_Node):
    pass


@dataclass(frozen=True)
class FalseF(_Node):
    pass


@dataclass(frozen=True)
class Atom(_Node):
    name: str

    def __post_init__(self):
        if not self.name:
            raise ValueError("atom name must be nonempty")


@dataclass(frozen=True)
class Not(_Node):
    arg: Formula


@dataclass(frozen=True)
class And(_Node):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(_Node):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(_Node):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class AX(_Node):
    arg: Formula


@dataclass(frozen=True)
class EX(_Node):
    arg: Formula


@dataclass(frozen=True)
class AF(_Node):
    arg: Formula


@dataclass(frozen=True)
class EF(_Node):
    arg: Formula


@dataclass(frozen=True)
class AG(_Node):
    arg: Formula


@dataclass(frozen=True)
class EG(_Node):
    arg: Formula


@dataclass(frozen=True)
class AU(_Node):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class EU(_Node):
    left: Formula
    right: Formula


Formula = Union[TrueF, FalseF, Atom, Not, And, Or, Implies,
                AX, EX, AF, EF, AG, EG, AU, EU]

TRUE = TrueF()
FALSE = FalseF()

UNARY_TEMPORAL = (AX, EX, AF, EF, AG, EG)
BINARY_BOOL = {And: "&", Or: "|", Implies: "->"}
# binding strength used when printing; larger binds tighter
_PREC = {Implies: 1, Or: 2, And: 3}


def children(f: Formula) -> tuple:
    if isinstance(f, (TrueF, FalseF, Atom)):
        return ()
    if isinstance(f, (Not,) + UNARY_TEMPORAL):
        return (f.arg,)
    return (f.left, f.right)


def subformulas(f: Formula) -> Iterator[Formula]:
    """Post-order traversal (children before parents)."""
    for c in children(f):
        yield from subformulas(c)
    yield f


def atoms(f: Formula) -> list[str]:
    """Atom names in first-occurrence order."""
    seen = {}
    for g in subformulas(f):
        if isinstance(g, Atom):
            seen.setdefault(g.name, None)
    return list(seen)


def depth(f: Formula) -> int:
    return 1 + max((depth(c) for c in children(f)), default=-1)


def is_propositional(f: Formula) -> bool:
    return not any(isinstance(g, UNARY_TEMPORAL + (AU, EU)) for g in subformulas(f))


def to_text(f: Formula) -> str:
    """Concrete syntax accepted by :func:`signalmc.ctl.parse_formula`."""
    return _print(f, 0)


def _print(f: Formula, context: int) -> str:
    if isinstance(f, TrueF):
        return "true"
    if isinstance(f, FalseF):
        return "false"
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Not):
        return "!" + _print(f.arg, 4)
    if isinstance(f, UNARY_TEMPORAL):
        return f"{type(f).__name__} " + _print(f.arg, 4)
    if isinstance(f, (AU, EU)):
        q = "A" if isinstance(f, AU) else "E"
        return f"{q} [{_print(f.left, 0)} U {_print(f.right, 0)}]"
    prec = _PREC[type(f)]
    op = BINARY_BOOL[type(f)]
    if isinstance(f, Implies):
        # right-associative
        text = f"{_print(f.left, prec + 1)} {op} {_print(f.right, prec)}"
    else:
        text = f"{_print(f.left, prec)} {op} {_print(f.right, prec + 1)}"
    return f"({text})" if prec < context else text


def neg(f: Formula) -> Formula:
    return f.arg if isinstance(f, Not) else Not(f)


def to_enf(f: Formula) -> Formula:
    """Rewrite into the adequate set {true, atoms, !, &, EX, EU, EG}."""
    if isinstance(f, (TrueF, Atom)):
        return f
    if isinstance(f, FalseF):
        return Not(TRUE)
    if isinstance(f, Not):
        return neg(to_enf(f.arg))
    if isinstance(f, And):
        return And(to_enf(f.left), to_enf(f.right))
    if isinstance(f, Or):
        return neg(And(neg(to_enf(f.left)), neg(to_enf(f.right))))
    if isinstance(f, Implies):
        return neg(And(to_enf(f.left), neg(to_enf(f.right))))
    if isinstance(f, EX):
        return EX(to_enf(f.arg))
    if isinstance(f, AX):
        return neg(EX(neg(to_enf(f.arg))))
    if isinstance(f, EF):
        return EU(TRUE, to_enf(f.arg))
    if isinstance(f, AF):
        return neg(EG(neg(to_enf(f.arg))))
    if isinstance(f, EG):
        return EG(to_enf(f.arg))
    if isinstance(f, AG):
        return neg(EU(TRUE, neg(to_enf(f.arg))))
    if isinstance(f, EU):
        return EU(to_enf(f.left), to_enf(f.right))
    if isinstance(f, AU):
        p, q = to_enf(f.left), to_enf(f.right)
        nq = neg(q)
        bad_until = EU(nq, And(neg(p), nq))
        return And(neg(bad_until), neg(EG(nq)))
    raise TypeError(f"not a formula: {f!r}")


ENF_TYPES = (TrueF, Atom, Not, And, EX, EU, EG)


def is_enf(f: Formula) -> bool:
    return all(isinstance(g, ENF_TYPES) for g in subformulas(f))
