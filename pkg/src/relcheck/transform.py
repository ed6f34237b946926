"""Semantics-preserving rewrites of formulas."""

from __future__ import annotations

from functools import reduce

from .model import Model, descendants
from .syntax import (
    And, Bind, CatNominal, Formula, Jump, Modal, Nominal, Not, Or, Prop, ToPub, ToUser, ATOMS,
)


def map_children(f: Formula, fn) -> Formula:
    """Rebuild ``f`` with ``fn`` applied to each direct subformula."""
    if isinstance(f, ATOMS):
        return f
    if isinstance(f, (And, Or)):
        left, right = fn(f.left), fn(f.right)
        if left is f.left and right is f.right:
            return f
        return type(f)(left, right)
    sub = fn(f.sub)
    if sub is f.sub:
        return f
    if isinstance(f, Not):
        return Not(sub)
    if isinstance(f, Modal):
        return Modal(f.rel, sub, f.grade, f.trust)
    if isinstance(f, Jump):
        return Jump(f.target, sub)
    if isinstance(f, Bind):
        return Bind(f.var, sub)
    if isinstance(f, ToPub):
        return ToPub(sub, f.filter)
    if isinstance(f, ToUser):
        return ToUser(sub, f.filter)
    raise TypeError(f"not a formula: {f!r}")


def desugar(f: Formula, model: Model | None = None, *, expand_cat: bool = False) -> Formula:
    """Remove filtered crossings and, with ``expand_cat``, category nominals.

    ``pub[q] f`` becomes ``pub (q and f)`` (likewise for ``usr``).  Category
    nominals become a disjunction of nominals over the closure computed on
    ``model``, ordered as the public nodes appear in the model.  Grades and
    trust bounds are left alone.
    """
    if expand_cat and model is None:
        raise ValueError("expanding category nominals needs a model")

    def go(g: Formula) -> Formula:
        if isinstance(g, (ToPub, ToUser)) and g.filter is not None:
            return type(g)(And(Prop(g.filter), go(g.sub)))
        if expand_cat and isinstance(g, CatNominal):
            members = descendants(model, g.rel, g.id)
            ordered = [g.id] + [c for c in model.public if c in members and c != g.id]
            return reduce(Or, (Nominal(c) for c in ordered))
        return map_children(g, go)

    return go(f)
