"""Reference semantics and random test-case generators.

:func:`naive_check` transcribes the satisfaction clauses directly: no memo
table, linear scans over the raw edge and link lists, graded modalities by
enumerating successor subsets, category nominals by searching for a path.
It is deliberately slow and deliberately separate from
:mod:`relcheck.checker` so the two can be compared.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from .checker import EvaluationError
from .model import (
    PUBLIC, USER, Link, Model, Node, PublicEdge, Relation, RelationTable, UserEdge,
)
from .transform import map_children
from .syntax import (
    And, Bind, CatNominal, Const, Formula, Jump, Modal, Nominal, Not, Or, Prop, ToPub, ToUser,
    Trust, Var, var_names,
)

TRUST_LEVELS = (0.0, 0.25, 0.5, 0.75, 1.0)


# -- naive evaluation ------------------------------------------------------

def naive_check(m: Model, f: Formula, tau: dict[str, str], v: str) -> bool:
    if v in m.users:
        side = USER
    elif v in m.public:
        side = PUBLIC
    else:
        raise EvaluationError(f"unknown node {v!r}")
    return _sat(m, f, dict(tau), v, side)


def _nodes(m: Model, side: str) -> dict[str, Node]:
    return m.users if side == USER else m.public


def _resolve_var(m: Model, name: str, tau: dict[str, str], side: str) -> str:
    if name not in tau:
        raise EvaluationError(f"unbound variable ?{name}")
    if tau[name] not in _nodes(m, side):
        raise EvaluationError(f"side mismatch for ?{name}")
    return tau[name]


def _resolve_nominal(m: Model, name: str, side: str) -> str:
    matches = [n for n in _nodes(m, side) if n == name]
    if len(matches) != 1:
        raise EvaluationError(f"unknown nominal #{name}")
    return matches[0]


def _relation(m: Model, name: str, side: str) -> Relation:
    rel = m.relations.get(name)
    if rel is None or rel.side != side:
        raise EvaluationError(f"no {side} relation {name!r}")
    return rel


def _sat(m: Model, f: Formula, tau: dict[str, str], v: str, side: str) -> bool:
    if isinstance(f, Const):
        return f.value
    if isinstance(f, Var):
        return v == _resolve_var(m, f.name, tau, side)
    if isinstance(f, Nominal):
        return v == _resolve_nominal(m, f.id, side)
    if isinstance(f, Prop):
        return f.name in _nodes(m, side)[v].props
    if isinstance(f, Not):
        return not _sat(m, f.sub, tau, v, side)
    if isinstance(f, And):
        return _sat(m, f.left, tau, v, side) and _sat(m, f.right, tau, v, side)
    if isinstance(f, Or):
        return _sat(m, f.left, tau, v, side) or _sat(m, f.right, tau, v, side)
    if isinstance(f, Jump):
        if isinstance(f.target, Var):
            w = _resolve_var(m, f.target.name, tau, side)
        else:
            w = _resolve_nominal(m, f.target.id, side)
        return _sat(m, f.sub, tau, w, side)
    if isinstance(f, Bind):
        return _sat(m, f.sub, {**tau, f.var: v}, v, side)
    if isinstance(f, ToPub):
        if side != USER:
            raise EvaluationError("'pub' at a public node")
        for link in m.links:
            if link.user == v:
                c = link.pub
                ok = f.filter is None or f.filter in m.public[c].props
                if ok and _sat(m, f.sub, tau, c, PUBLIC):
                    return True
        return False
    if isinstance(f, ToUser):
        if side != PUBLIC:
            raise EvaluationError("'usr' at a user node")
        for link in m.links:
            if link.pub == v:
                a = link.user
                ok = f.filter is None or f.filter in m.users[a].props
                if ok and _sat(m, f.sub, tau, a, USER):
                    return True
        return False
    if isinstance(f, CatNominal):
        if side != PUBLIC:
            raise EvaluationError("category nominal at a user node")
        target = _resolve_nominal(m, f.id, PUBLIC)
        rel = _relation(m, f.rel, PUBLIC)
        if not rel.acyclic:
            raise EvaluationError(f"{f.rel!r} is not acyclic")
        return _path_exists(m, v, target, f.rel)
    if isinstance(f, Modal):
        return _modal(m, f, tau, v, side)
    raise TypeError(f"not a formula: {f!r}")


def _path_exists(m: Model, start: str, goal: str, rel: str) -> bool:
    frontier = [start]
    visited = set()
    while frontier:
        c = frontier.pop()
        if c == goal:
            return True
        if c in visited:
            continue
        visited.add(c)
        frontier.extend(e.target for e in m.public_edges if e.source == c and e.rel == rel)
    return False


def _modal(m: Model, f: Modal, tau: dict[str, str], v: str, side: str) -> bool:
    rel = _relation(m, f.rel, side)
    if side == PUBLIC:
        if f.grade != 1 or f.trust is not None:
            raise EvaluationError("grades and trust bounds apply to user relations only")
        succ = [e.target for e in m.public_edges if e.source == v and e.rel == f.rel]
    else:
        succ = []
        for e in m.user_edges:
            if e.source != v or e.rel != f.rel:
                continue
            if f.trust is not None:
                if f.trust.forward:
                    t = e.trust
                else:
                    back = [r.trust for r in m.user_edges
                            if r.source == e.target and r.target == v and r.rel == rel.reverse]
                    t = back[0] if back else None
                if t is None or t < f.trust.threshold:
                    continue
            succ.append(e.target)
    holds: dict[str, bool] = {}

    def sat_at(b: str) -> bool:
        if b not in holds:
            holds[b] = _sat(m, f.sub, tau, b, side)
        return holds[b]

    for subset in itertools.combinations(sorted(set(succ)), f.grade):
        if all(sat_at(b) for b in subset):
            return True
    return False


# -- graded expansion --------------------------------------------------------

def expand_graded(f: Formula, grade_cap: int = 4) -> Formula:
    """Rewrite every graded modality with binders and jumps.

    ``<r:n> phi`` becomes::

        down ?x . <r> down ?y1 . (phi and @?x <r> (not ?y1 and down ?y2 . (phi and
            ... @?x <r> (not ?y1 and ... and not ?y(n-1) and phi))))

    using variable names that do not occur in ``f``.  A trust bound is copied
    onto every generated step.
    """
    taken = set(var_names(f))
    counter = itertools.count()

    def fresh(prefix: str) -> str:
        while True:
            name = f"{prefix}{next(counter)}"
            if name not in taken:
                taken.add(name)
                return name

    def go(g: Formula) -> Formula:
        if isinstance(g, Modal):
            sub = go(g.sub)
            if g.grade == 1:
                return g if sub is g.sub else Modal(g.rel, sub, 1, g.trust)
            if g.grade > grade_cap:
                raise ValueError(f"grade {g.grade} exceeds the cap of {grade_cap}")
            origin = fresh("gx")
            picks = [fresh("gy") for _ in range(g.grade - 1)]

            def step(i: int) -> Formula:
                inner = sub if i == g.grade - 1 else Bind(
                    picks[i], And(sub, Jump(Var(origin), step(i + 1))))
                if i:
                    distinct = Not(Var(picks[0]))
                    for y in picks[1:i]:
                        distinct = And(distinct, Not(Var(y)))
                    inner = And(distinct, inner)
                return Modal(g.rel, inner, 1, g.trust)

            return Bind(origin, step(0))
        return map_children(g, go)

    return go(f)


# -- generators ----------------------------------------------------------------

USER_RELATIONS = (("friend", "friend"), ("colleague", "colleague"),
                  ("parentof", "childof"), ("follows", "followedby"))
PUBLIC_RELATIONS = (("is-a", "has-member", True), ("rival", "rival", False),
                    ("donate", "donate-from", False), ("is-in", "contains", True))


@dataclass(frozen=True)
class GeneratorConfig:
    seed: int = 0
    user_count: int = 6
    pub_count: int = 6
    edge_density: float = 0.3
    link_density: float = 0.25
    max_formula_depth: int = 4
    grade_cap: int = 3
    user_relation_count: int = 2
    public_relation_count: int = 3
    user_prop_count: int = 2
    public_prop_count: int = 2
    var_names: tuple[str, ...] = field(default=("x", "y", "z"))

    def __post_init__(self):
        for name in ("user_count", "pub_count", "max_formula_depth",
                     "user_relation_count", "public_relation_count",
                     "user_prop_count", "public_prop_count"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        for name in ("edge_density", "link_density"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must be in [0,1]")
        if not 1 <= self.grade_cap <= 4:
            raise ValueError("grade_cap must be in 1..4")
        if self.user_relation_count > len(USER_RELATIONS):
            raise ValueError(f"at most {len(USER_RELATIONS)} user relations")
        if self.public_relation_count > len(PUBLIC_RELATIONS):
            raise ValueError(f"at most {len(PUBLIC_RELATIONS)} public relations")

    @property
    def user_relations(self) -> list[tuple[str, str]]:
        return list(USER_RELATIONS[:self.user_relation_count])

    @property
    def public_relations(self) -> list[tuple[str, str, bool]]:
        return list(PUBLIC_RELATIONS[:self.public_relation_count])

    @property
    def users(self) -> list[str]:
        return [f"u{i}" for i in range(self.user_count)]

    @property
    def pubs(self) -> list[str]:
        return [f"c{i}" for i in range(self.pub_count)]

    @property
    def user_props(self) -> list[str]:
        return [f"P{i}" for i in range(self.user_prop_count)]

    @property
    def public_props(self) -> list[str]:
        return [f"Q{i}" for i in range(self.public_prop_count)]


def random_model(cfg: GeneratorConfig) -> Model:
    """A valid random model; the same config always gives the same model."""
    rng = random.Random(cfg.seed)
    relations = [Relation(n, r, USER) for n, r in cfg.user_relations]
    relations += [Relation(n, r, PUBLIC, acyclic) for n, r, acyclic in cfg.public_relations]
    users = {u: Node(u, frozenset(p for p in cfg.user_props if rng.random() < 0.5))
             for u in cfg.users}
    pubs = {c: Node(c, frozenset(q for q in cfg.public_props if rng.random() < 0.5))
            for c in cfg.pubs}

    user_edges = []
    for name, rev in cfg.user_relations:
        for a, b in itertools.permutations(cfg.users, 2):
            if name == rev and a > b:
                continue
            if rng.random() < cfg.edge_density:
                user_edges.append(UserEdge(a, b, name, rng.choice(TRUST_LEVELS)))
                user_edges.append(UserEdge(b, a, rev, rng.choice(TRUST_LEVELS)))
    public_edges = []
    pub_ids = cfg.pubs
    for name, rev, acyclic in cfg.public_relations:
        for i, j in itertools.permutations(range(len(pub_ids)), 2):
            if (acyclic and i < j) or (name == rev and i > j):
                # acyclic relations only point from higher to lower index
                continue
            if rng.random() < cfg.edge_density:
                public_edges.append(PublicEdge(pub_ids[i], pub_ids[j], name))
                public_edges.append(PublicEdge(pub_ids[j], pub_ids[i], rev))
    links = [Link(u, c) for u in cfg.users for c in cfg.pubs if rng.random() < cfg.link_density]
    return Model(RelationTable(relations), users, pubs, user_edges, public_edges, links)


def random_formula(cfg: GeneratorConfig, side: str = USER, anchor: bool = False,
                   *, depth: int | None = None) -> Formula:
    """A random closed formula over the vocabulary of ``random_model(cfg)``.

    Free occurrences are limited to ``?own``/``?req``.  With ``anchor`` the
    result is a policy ``@?own ...`` or ``@?req ...``.
    """
    if anchor and side != USER:
        raise ValueError("only user-side formulas can be anchored")
    if anchor and cfg.user_count == 0:
        raise ValueError("cannot anchor a policy in a model without users")
    rng = random.Random(f"formula:{cfg.seed}:{side}:{anchor}")
    depth = cfg.max_formula_depth if depth is None else depth
    acyclic = [n for n, _, a in cfg.public_relations if a]
    cross_ok = cfg.user_count > 0 or side == PUBLIC

    def atom(side: str, scope: dict[str, str]) -> Formula:
        here = [n for n, s in scope.items() if s == side]
        choices = ["prop", "var"]
        if side == USER:
            here += ["own", "req"]
            if cfg.users:
                choices.append("nominal")
        else:
            if cfg.pubs:
                choices.append("nominal")
                if acyclic:
                    choices.append("cat")
        if not here:
            choices.remove("var")
        props = cfg.user_props if side == USER else cfg.public_props
        if not props:
            choices.remove("prop")
        kind = "const" if not choices or rng.random() < 0.08 else rng.choice(choices)
        if kind == "const":
            return Const(rng.random() < 0.5)
        if kind == "prop":
            return Prop(rng.choice(props))
        if kind == "var":
            return Var(rng.choice(here))
        if kind == "cat":
            return CatNominal(rng.choice(cfg.pubs), rng.choice(acyclic))
        return Nominal(rng.choice(cfg.users if side == USER else cfg.pubs))

    def term(side: str, scope: dict[str, str]) -> Var | Nominal:
        here = [n for n, s in scope.items() if s == side]
        if side == USER:
            here += ["own", "req"]
        nodes = cfg.users if side == USER else cfg.pubs
        if here and (not nodes or rng.random() < 0.6):
            return Var(rng.choice(here))
        return Nominal(rng.choice(nodes))

    def gen(side: str, d: int, scope: dict[str, str]) -> Formula:
        if d <= 0 or rng.random() < 0.05:
            return atom(side, scope)
        rels = cfg.user_relations if side == USER else cfg.public_relations
        nodes = cfg.users if side == USER else cfg.pubs
        ops = ["not", "and", "or", "bind", "cross", "cross"]
        if rels:
            ops += ["modal", "modal", "modal"]
        if nodes or [n for n, s in scope.items() if s == side] or side == USER:
            ops.append("jump")
        if not cross_ok:
            ops.remove("cross")
        op = rng.choice(ops)
        if op == "not":
            return Not(gen(side, d - 1, scope))
        if op in ("and", "or"):
            cls = And if op == "and" else Or
            return cls(gen(side, d - 1, scope), gen(side, d - 1, scope))
        if op == "modal":
            rel = rng.choice(rels)[0]
            grade, trust = 1, None
            if side == USER:
                if rng.random() < 0.35:
                    grade = rng.randint(2, cfg.grade_cap) if cfg.grade_cap > 1 else 1
                if rng.random() < 0.5:
                    trust = Trust(rng.choice(TRUST_LEVELS), rng.random() < 0.5)
            return Modal(rel, gen(side, d - 1, scope), grade, trust)
        if op == "jump":
            return Jump(term(side, scope), gen(side, d - 1, scope))
        if op == "bind":
            name = rng.choice(cfg.var_names)
            return Bind(name, gen(side, d - 1, {**scope, name: side}))
        other = PUBLIC if side == USER else USER
        props = cfg.public_props if side == USER else cfg.user_props
        filt = rng.choice(props) if props and rng.random() < 0.3 else None
        body = gen(other, d - 1, scope)
        return ToPub(body, filt) if side == USER else ToUser(body, filt)

    if anchor:
        return Jump(Var(rng.choice(("own", "req"))), gen(USER, depth - 1, {}))
    return gen(side, depth, {})


# -- differential runs ---------------------------------------------------------

@dataclass(frozen=True)
class OracleReport:
    """One differential case and both verdicts."""
    seed: int
    formula: str
    owner: str
    requester: str
    checker: bool
    oracle: bool

    @property
    def agree(self) -> bool:
        return self.checker == self.oracle


def differential(cfg: GeneratorConfig) -> OracleReport:
    """Run one random access request through the checker and the oracle."""
    from .checker import check
    from .parser import pretty_print

    m = random_model(cfg)
    policy = random_formula(cfg, anchor=True)
    rng = random.Random(f"request:{cfg.seed}")
    own, req = rng.choice(cfg.users), rng.choice(cfg.users)
    val = {"own": own, "req": req}
    return OracleReport(cfg.seed, pretty_print(policy), own, req,
                        check(m, policy, val, own), naive_check(m, policy, val, own))
