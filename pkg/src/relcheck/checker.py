"""Local model checking of policies and access decisions.

:class:`ModelChecker` decides one formula at one node by structural
recursion.  Results of non-atomic subformulas are memoized under the key
``(subformula, node, values of the subformula's free variables)``, so the
table stays sound under ``down`` binders and can be shared across
requesters: entries that do not mention ``req`` are reused, the others are
keyed by the requester.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .model import PUBLIC, USER, Model, ModelError, descendants
from .syntax import (
    And, Bind, CatNominal, Const, Formula, FormulaError, Jump, Modal, Nominal, Not, Or, Prop,
    ToPub, ToUser, Var, anchor, check_formula, children,
)

Valuation = Mapping[str, str]


class EvaluationError(ValueError):
    """A formula cannot be evaluated against the given model/valuation."""


@dataclass(frozen=True)
class WitnessStep:
    """One existential choice on the granting branch.

    ``path`` locates the operator in the policy (child indices from the
    root, ``""`` for the root).  ``via`` is the relation traversed, or
    ``"rho"``/``"varrho"`` for a link.  ``bindings`` is the valuation in
    force when the choice was made.
    """
    path: str
    op: str
    source: str
    targets: tuple[str, ...]
    via: str
    bindings: tuple[tuple[str, str], ...]

    def __str__(self) -> str:
        tgt = ", ".join(self.targets)
        return f"[{self.path or '.'}] {self.op} {self.source} -{self.via}-> {tgt}"


@dataclass(frozen=True)
class Decision:
    granted: bool
    witness: tuple[WitnessStep, ...] | None = None


class ModelChecker:
    """Evaluates formulas on one model; reuse an instance to share its memo."""

    def __init__(self, model: Model, *, memo: bool = True):
        self.model = model
        self.memo: dict | None = {} if memo else None
        # id(subformula) -> (subformula, free variable names); the formula is
        # kept so its id cannot be recycled while cached
        self._fv: dict[int, tuple[Formula, tuple[str, ...]]] = {}
        self._trace: list[WitnessStep] | None = None
        self._paths: dict[int, str] = {}

    # -- public entry points ----------------------------------------------

    def check(self, f: Formula, valuation: Valuation, node: str) -> bool:
        try:
            side = self.model.side_of(node)
        except ModelError as exc:
            raise EvaluationError(str(exc)) from None
        return self._ev(f, node, side, dict(valuation))

    def explain(self, f: Formula, valuation: Valuation, node: str) -> Decision:
        self._paths = {}
        stack = [(f, "")]
        while stack:
            g, path = stack.pop()
            self._paths.setdefault(id(g), path)
            for i, c in enumerate(children(g)):
                stack.append((c, f"{path}.{i}" if path else str(i)))
        saved_memo, self.memo = self.memo, None
        self._trace = []
        try:
            ok = self.check(f, valuation, node)
            trace = tuple(self._trace)
        finally:
            self._trace = None
            self.memo = saved_memo
        return Decision(ok, trace if ok else None)

    # -- internals --------------------------------------------------------

    def _free(self, g: Formula) -> tuple[str, ...]:
        hit = self._fv.get(id(g))
        if hit is not None:
            return hit[1]
        if isinstance(g, Var):
            names = {g.name}
        elif isinstance(g, Bind):
            names = set(self._free(g.sub)) - {g.var}
        else:
            names = set()
            if isinstance(g, Jump) and isinstance(g.target, Var):
                names.add(g.target.name)
            for c in children(g):
                names.update(self._free(c))
        fv = tuple(sorted(names))
        self._fv[id(g)] = (g, fv)
        return fv

    def _lookup(self, name: str, side: str, val: dict[str, str]) -> str:
        node = val.get(name)
        if node is None:
            raise EvaluationError(f"unbound variable ?{name}")
        if self.model.side_of(node) != side:
            raise EvaluationError(f"side mismatch: ?{name} is bound to {side_name(self.model, node)} "
                                  f"{node!r} but used on the {side} side")
        return node

    def _nominal(self, node_id: str, side: str) -> str:
        nodes = self.model.users if side == USER else self.model.public
        if node_id not in nodes:
            if node_id in self.model.users or node_id in self.model.public:
                raise EvaluationError(f"side mismatch: nominal #{node_id} used on the {side} side")
            raise EvaluationError(f"unknown nominal #{node_id}")
        return node_id

    def _relation(self, name: str, side: str):
        rel = self.model.relations.get(name)
        if rel is None:
            raise EvaluationError(f"unknown relation {name!r}")
        if rel.side != side:
            raise EvaluationError(f"side mismatch: {rel.side} relation {name!r} used on the {side} side")
        return rel

    def _record(self, mark: int, g: Formula, op: str, source: str, targets, via: str,
                val: dict[str, str]) -> None:
        step = WitnessStep(self._paths.get(id(g), "?"), op, source, tuple(targets), via,
                           tuple(sorted(val.items())))
        self._trace.insert(mark, step)

    def _ev(self, g: Formula, v: str, side: str, val: dict[str, str]) -> bool:
        m = self.model
        if isinstance(g, Const):
            return g.value
        if isinstance(g, Var):
            return v == self._lookup(g.name, side, val)
        if isinstance(g, Nominal):
            return v == self._nominal(g.id, side)
        if isinstance(g, Prop):
            nodes = m.users if side == USER else m.public
            return g.name in nodes[v].props
        if isinstance(g, CatNominal):
            if side != PUBLIC:
                raise EvaluationError("side mismatch: category nominal on the user side")
            self._nominal(g.id, PUBLIC)
            rel = self._relation(g.rel, PUBLIC)
            if not rel.acyclic:
                raise EvaluationError(f"category nominal over {g.rel!r}, which is not declared acyclic")
            return v in descendants(m, g.rel, g.id)

        memo = self.memo
        if memo is not None:
            key = (id(g), v, tuple(val.get(x) for x in self._free(g)))
            hit = memo.get(key)
            if hit is not None:
                return hit
        trace = self._trace
        mark = len(trace) if trace is not None else 0

        if isinstance(g, Not):
            self._trace = None
            try:
                result = not self._ev(g.sub, v, side, val)
            finally:
                self._trace = trace
        elif isinstance(g, And):
            result = self._ev(g.left, v, side, val) and self._ev(g.right, v, side, val)
        elif isinstance(g, Or):
            result = self._ev(g.left, v, side, val)
            if not result:
                if trace is not None:
                    del trace[mark:]
                result = self._ev(g.right, v, side, val)
        elif isinstance(g, Modal):
            result = self._modal(g, v, side, val, mark)
        elif isinstance(g, Jump):
            if isinstance(g.target, Var):
                target = self._lookup(g.target.name, side, val)
            else:
                target = self._nominal(g.target.id, side)
            result = self._ev(g.sub, target, side, val)
        elif isinstance(g, Bind):
            result = self._ev(g.sub, v, side, {**val, g.var: v})
        elif isinstance(g, ToPub):
            if side != USER:
                raise EvaluationError("side mismatch: 'pub' evaluated at a public node")
            result = self._cross(g, v, m.rho_list(v), m.public, PUBLIC, "rho", val, mark)
        elif isinstance(g, ToUser):
            if side != PUBLIC:
                raise EvaluationError("side mismatch: 'usr' evaluated at a user node")
            result = self._cross(g, v, m.varrho_list(v), m.users, USER, "varrho", val, mark)
        else:
            raise TypeError(f"not a formula: {g!r}")

        if not result and trace is not None:
            del trace[mark:]
        if memo is not None:
            memo[key] = result
        return result

    def _modal(self, g: Modal, v: str, side: str, val: dict[str, str], mark: int) -> bool:
        rel = self._relation(g.rel, side)
        trust = g.trust
        if side == PUBLIC and (g.grade != 1 or trust is not None):
            raise EvaluationError("grades and trust bounds apply to user relations only")
        chosen = []
        for b, t in self.model.successor_list(v, g.rel):
            if trust is not None:
                if not trust.forward:
                    t = self.model.edge_trust(b, v, rel.reverse)
                if t is None or t < trust.threshold:
                    continue
            if self._ev(g.sub, b, side, val):
                chosen.append(b)
                if len(chosen) >= g.grade:
                    if self._trace is not None:
                        self._record(mark, g, "modal", v, chosen, g.rel, val)
                    return True
        return False

    def _cross(self, g, v, linked, nodes, side, via, val, mark) -> bool:
        for c in linked:
            if g.filter is not None and g.filter not in nodes[c].props:
                continue
            if self._ev(g.sub, c, side, val):
                if self._trace is not None:
                    self._record(mark, g, "pub" if side == PUBLIC else "usr", v, (c,), via, val)
                return True
        return False


def side_name(m: Model, node: str) -> str:
    return "user" if node in m.users else "public node"


def check(m: Model, f: Formula, valuation: Valuation, node: str, *, memo: bool = True) -> bool:
    """Truth value of ``f`` at ``node`` under ``valuation``."""
    return ModelChecker(m, memo=memo).check(f, valuation, node)


def _access_valuation(m: Model, policy: Formula, owner: str, requester: str) -> dict[str, str]:
    if anchor(policy) is None:
        raise EvaluationError("policy is not anchored: it must be of the form @?own ... or @?req ...")
    try:
        check_formula(policy)
    except FormulaError as exc:
        raise EvaluationError(str(exc)) from None
    for who, uid in (("owner", owner), ("requester", requester)):
        if uid not in m.users:
            raise EvaluationError(f"unknown {who} {uid!r}")
    return {"own": owner, "req": requester}


def evaluate_access(m: Model, policy: Formula, owner: str, requester: str, *,
                    checker: ModelChecker | None = None) -> Decision:
    """Grant or deny ``requester`` access to a resource of ``owner``."""
    val = _access_valuation(m, policy, owner, requester)
    checker = checker or ModelChecker(m)
    return Decision(checker.check(policy, val, owner))


def explain(m: Model, policy: Formula, owner: str, requester: str) -> Decision:
    """Like :func:`evaluate_access`, with a witness when access is granted."""
    val = _access_valuation(m, policy, owner, requester)
    return ModelChecker(m).explain(policy, val, owner)


def audience(m: Model, policy: Formula, owner: str, *, memo: bool = True) -> set[str]:
    """Every user that ``policy`` grants access to ``owner``'s resource."""
    checker = ModelChecker(m, memo=memo)
    return {u for u in m.users
            if evaluate_access(m, policy, owner, u, checker=checker).granted}
