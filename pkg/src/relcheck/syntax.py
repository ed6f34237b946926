"""Abstract syntax of the policy logic.

One set of node classes serves both the user side and the public side; a
node's side is fixed by its position (policies start on the user side, and
only :class:`ToPub` / :class:`ToUser` switch sides).  Nodes are frozen
dataclasses, so structural equality is plain ``==``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Union

USER = "user"
PUBLIC = "public"
RESERVED = ("own", "req")
DEFAULT_CATEGORY_REL = "is-a"


def other_side(side: str) -> str:
    return PUBLIC if side == USER else USER


class FormulaError(ValueError):
    """Static error in a formula (binding or side discipline)."""


@dataclass(frozen=True)
class Const:
    value: bool


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Nominal:
    id: str


@dataclass(frozen=True)
class Prop:
    name: str


@dataclass(frozen=True)
class CatNominal:
    """True at ``id`` and at every node below it in the ``rel`` hierarchy."""
    id: str
    rel: str = DEFAULT_CATEGORY_REL


@dataclass(frozen=True)
class Not:
    sub: Formula


@dataclass(frozen=True)
class And:
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or:
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Trust:
    """Trust bound on a modal step; ``forward`` reads the traversed edge,
    otherwise the successor's edge back to the current node is read."""
    threshold: float
    forward: bool = True


@dataclass(frozen=True)
class Modal:
    """At least ``grade`` distinct ``rel``-successors satisfy ``sub``."""
    rel: str
    sub: Formula
    grade: int = 1
    trust: Trust | None = None


@dataclass(frozen=True)
class Jump:
    target: Union[Var, Nominal]
    sub: Formula


@dataclass(frozen=True)
class Bind:
    var: str
    sub: Formula


@dataclass(frozen=True)
class ToPub:
    sub: Formula
    filter: str | None = None


@dataclass(frozen=True)
class ToUser:
    sub: Formula
    filter: str | None = None


Formula = Union[Const, Var, Nominal, Prop, CatNominal, Not, And, Or, Modal, Jump, Bind, ToPub, ToUser]
ATOMS = (Const, Var, Nominal, Prop, CatNominal)


def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, (And, Or)):
        return (f.left, f.right)
    if isinstance(f, ATOMS):
        return ()
    return (f.sub,)


def walk(f: Formula) -> Iterator[Formula]:
    """Pre-order traversal."""
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        stack.extend(reversed(children(g)))


def size(f: Formula) -> int:
    return sum(1 for _ in walk(f))


def var_names(f: Formula) -> set[str]:
    """Every variable name occurring in ``f``, bound or free."""
    names = set()
    for g in walk(f):
        if isinstance(g, Var):
            names.add(g.name)
        elif isinstance(g, Bind):
            names.add(g.var)
        elif isinstance(g, Jump) and isinstance(g.target, Var):
            names.add(g.target.name)
    return names


def free_vars(f: Formula, side: str = USER) -> set[tuple[str, str]]:
    """Free variables of ``f`` with the side each is used on.

    ``own`` and ``req`` are reported wherever they occur.  A variable used on
    both sides appears twice; :func:`check_formula` rejects that.
    """
    out: set[tuple[str, str]] = set()

    def go(g: Formula, side: str, bound: frozenset[str]) -> None:
        if isinstance(g, Var):
            if g.name not in bound:
                out.add((g.name, side))
        elif isinstance(g, Jump):
            if isinstance(g.target, Var) and g.target.name not in bound:
                out.add((g.target.name, side))
            go(g.sub, side, bound)
        elif isinstance(g, Bind):
            go(g.sub, side, bound | {g.var})
        elif isinstance(g, ToPub):
            go(g.sub, PUBLIC, bound)
        elif isinstance(g, ToUser):
            go(g.sub, USER, bound)
        else:
            for c in children(g):
                go(c, side, bound)

    go(f, side, frozenset())
    return out


def check_formula(f: Formula, side: str = USER, *, closed: bool = True) -> None:
    """Enforce binding and side discipline; raise :class:`FormulaError`.

    With ``closed`` every variable other than ``own``/``req`` must be bound.
    ``own``/``req`` are user-side and cannot be rebound.
    """

    def go(g: Formula, side: str, scope: dict[str, str], free: dict[str, str]) -> None:
        if isinstance(g, (Var, Jump, Bind)):
            if isinstance(g, Bind):
                name = g.var
            elif isinstance(g, Jump):
                name = g.target.name if isinstance(g.target, Var) else None
            else:
                name = g.name
            if isinstance(g, Bind):
                if name in RESERVED:
                    raise FormulaError(f"reserved variable ?{name} cannot be rebound")
                go(g.sub, side, {**scope, name: side}, free)
                return
            if name is not None:
                if name in RESERVED:
                    if side != USER:
                        raise FormulaError(f"?{name} is a user-side variable, used on the public side")
                elif name in scope:
                    if scope[name] != side:
                        raise FormulaError(
                            f"?{name} is bound on the {scope[name]} side but used on the {side} side")
                elif closed:
                    raise FormulaError(f"unbound variable ?{name}")
                elif free.setdefault(name, side) != side:
                    raise FormulaError(f"free variable ?{name} used on both sides")
            if isinstance(g, Jump):
                go(g.sub, side, scope, free)
            return
        if isinstance(g, Modal):
            if g.grade < 1:
                raise FormulaError(f"grade must be at least 1, got {g.grade}")
            if side == PUBLIC and (g.grade != 1 or g.trust is not None):
                raise FormulaError("grades and trust bounds apply to user relations only")
            if g.trust is not None and not 0.0 <= g.trust.threshold <= 1.0:
                raise FormulaError(f"trust bound {g.trust.threshold} outside [0,1]")
        if isinstance(g, CatNominal) and side != PUBLIC:
            raise FormulaError("category nominals are public-side formulas")
        if isinstance(g, ToPub):
            if side != USER:
                raise FormulaError("'pub' must be applied to a user-side formula")
            go(g.sub, PUBLIC, scope, free)
            return
        if isinstance(g, ToUser):
            if side != PUBLIC:
                raise FormulaError("'usr' must be applied to a public-side formula")
            go(g.sub, USER, scope, free)
            return
        for c in children(g):
            go(c, side, scope, free)

    go(f, side, {}, {})


def anchor(f: Formula) -> str | None:
    """``'own'`` or ``'req'`` if ``f`` is an anchored policy, else ``None``."""
    if isinstance(f, Jump) and isinstance(f.target, Var) and f.target.name in RESERVED:
        return f.target.name
    return None


def to_json(f: Formula) -> dict:
    """JSON-ready dict form of a formula (used by ``relcheck parse --format json``)."""
    if isinstance(f, Const):
        return {"op": "const", "value": f.value}
    if isinstance(f, Var):
        return {"op": "var", "name": f.name}
    if isinstance(f, Nominal):
        return {"op": "nominal", "id": f.id}
    if isinstance(f, Prop):
        return {"op": "prop", "name": f.name}
    if isinstance(f, CatNominal):
        return {"op": "cat", "rel": f.rel, "id": f.id}
    if isinstance(f, Not):
        return {"op": "not", "sub": to_json(f.sub)}
    if isinstance(f, (And, Or)):
        return {"op": "and" if isinstance(f, And) else "or",
                "left": to_json(f.left), "right": to_json(f.right)}
    if isinstance(f, Modal):
        d = {"op": "modal", "rel": f.rel, "grade": f.grade}
        if f.trust is not None:
            d["trust"] = {"threshold": f.trust.threshold,
                          "direction": "forward" if f.trust.forward else "backward"}
        d["sub"] = to_json(f.sub)
        return d
    if isinstance(f, Jump):
        return {"op": "jump", "target": to_json(f.target), "sub": to_json(f.sub)}
    if isinstance(f, Bind):
        return {"op": "bind", "var": f.var, "sub": to_json(f.sub)}
    if isinstance(f, (ToPub, ToUser)):
        d = {"op": "pub" if isinstance(f, ToPub) else "usr"}
        if f.filter is not None:
            d["filter"] = f.filter
        d["sub"] = to_json(f.sub)
        return d
    raise TypeError(f"not a formula: {f!r}")
