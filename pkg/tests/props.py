"""Seed-driven property checks shared by the hypothesis suite and the
acceptance gate.  Each function builds its own case from ``seed`` and fails
with an AssertionError naming the offending formula."""

import random
from dataclasses import replace
from functools import reduce

from relcheck.checker import ModelChecker, check
from relcheck.model import PUBLIC, USER, Model, Node, PublicEdge, Relation, RelationTable
from relcheck.oracle import (
    TRUST_LEVELS, GeneratorConfig, expand_graded, naive_check, random_formula, random_model,
)
from relcheck.parser import pretty_print
from relcheck.syntax import (
    And, CatNominal, Jump, Modal, Nominal, Not, Or, Prop, ToPub, ToUser, Trust, Var,
)
from relcheck.transform import desugar


def config(seed, *, users=(1, 12), pubs=(0, 12), depth=(2, 6), grade_cap=3):
    r = random.Random(seed)
    return GeneratorConfig(
        seed=seed, user_count=r.randint(*users), pub_count=r.randint(*pubs),
        edge_density=r.choice((0.1, 0.2, 0.3, 0.4)), link_density=r.choice((0.1, 0.2, 0.3)),
        max_formula_depth=r.randint(*depth), grade_cap=grade_cap,
        user_relation_count=r.randint(1, 3), public_relation_count=r.randint(1, 4))


def case(seed, **kw):
    """A model, a valuation for own/req, a user node and the rng."""
    cfg = config(seed, **kw)
    m = random_model(cfg)
    r = random.Random(seed ^ 0x5EED)
    users = list(m.users)
    val = {"own": r.choice(users), "req": r.choice(users)}
    return cfg, m, val, r.choice(users), r


def formula(cfg, salt, side=USER, depth=None):
    return random_formula(replace(cfg, seed=cfg.seed * 1009 + salt), side, depth=depth)


def same(m, f, g, val, nodes, label):
    for v in nodes:
        a, b = check(m, f, val, v), check(m, g, val, v)
        assert a == b, f"{label} at {v}: {pretty_print(f)} vs {pretty_print(g)}"


# -- properties ----------------------------------------------------------------

def oracle_agreement(seed):
    """Checker and naive evaluator agree on an anchored access request."""
    cfg, m, val, _, _ = case(seed)
    policy = random_formula(cfg, anchor=True)
    a = check(m, policy, val, val["own"])
    b = naive_check(m, policy, val, val["own"])
    assert a == b, f"checker {a} vs oracle {b}: {pretty_print(policy)} {val}"
    return a


def oracle_agreement_everywhere(seed):
    """Checker and naive evaluator agree on a formula at every node, under
    several valuations of own/req."""
    cfg, m, _, _, r = case(seed)
    users = list(m.users)
    for salt, side in ((1, USER), (2, PUBLIC)):
        f = formula(cfg, salt, side)
        nodes = m.users if side == USER else m.public
        for _ in range(3):
            val = {"own": r.choice(users), "req": r.choice(users)}
            for v in nodes:
                a, b = check(m, f, val, v), naive_check(m, f, val, v)
                assert a == b, f"checker {a} vs oracle {b} at {v}: {pretty_print(f)} {val}"


def double_negation(seed):
    cfg, m, val, _, _ = case(seed)
    f = formula(cfg, 1)
    same(m, Not(Not(f)), f, val, m.users, "double negation")


def de_morgan(seed):
    cfg, m, val, _, _ = case(seed)
    f, g = formula(cfg, 1, depth=3), formula(cfg, 2, depth=3)
    same(m, Or(f, g), Not(And(Not(f), Not(g))), val, m.users, "de morgan")


def jump_absorption(seed):
    cfg, m, val, v, r = case(seed)
    f = formula(cfg, 1)
    terms = [Var("own"), Var("req")] + [Nominal(u) for u in m.users]
    s, s2 = r.choice(terms), r.choice(terms)
    same(m, Jump(s, Jump(s2, f)), Jump(s2, f), val, m.users, "jump absorption")


def graded_monotonicity(seed):
    cfg, m, val, _, r = case(seed)
    f = formula(cfg, 1, depth=3)
    rel = r.choice(m.relations.names(USER))
    trust = r.choice([None, Trust(r.choice(TRUST_LEVELS), r.random() < 0.5)])
    for n in (1, 2, 3):
        strong = Modal(rel, f, n + 1, trust)
        weak = Modal(rel, f, n, trust)
        for v in m.users:
            if check(m, strong, val, v):
                assert check(m, weak, val, v), f"grade {n + 1} without {n}: {pretty_print(strong)}"


def trust_monotonicity(seed):
    cfg, m, val, _, r = case(seed)
    f = formula(cfg, 1, depth=3)
    rel = r.choice(m.relations.names(USER))
    n = r.randint(1, 3)
    forward = r.random() < 0.5
    lo, hi = sorted((r.choice(TRUST_LEVELS), r.choice(TRUST_LEVELS)))
    for v in m.users:
        if check(m, Modal(rel, f, n, Trust(hi, forward)), val, v):
            assert check(m, Modal(rel, f, n, Trust(lo, forward)), val, v)
    same(m, Modal(rel, f, n, Trust(0.0, forward)), Modal(rel, f, n), val, m.users, "trust 0")


def filter_equivalence(seed):
    cfg, m, val, _, r = case(seed)
    if cfg.public_props:
        q = r.choice(cfg.public_props)
        psi = formula(cfg, 1, PUBLIC, depth=3)
        same(m, ToPub(psi, q), ToPub(And(Prop(q), psi)), val, m.users, "pub filter")
    if cfg.user_props:
        p = r.choice(cfg.user_props)
        phi = formula(cfg, 2, USER, depth=3)
        same(m, ToUser(phi, p), ToUser(And(Prop(p), phi)), val, m.public, "usr filter")
    f = formula(cfg, 3)
    same(m, desugar(f), f, val, m.users, "desugar")


def layered_dag_model(seed, levels=5, width=(1, 4)):
    """Public nodes on levels 0..levels-1 with is-a edges pointing to lower
    levels only, so no is-a path is longer than levels-1."""
    r = random.Random(seed)
    rels = RelationTable([Relation("friend", "friend", USER),
                          Relation("is-a", "has-member", PUBLIC, True)])
    level = {}
    for lv in range(levels):
        for i in range(r.randint(*width)):
            level[f"c{lv}_{i}"] = lv
    edges = []
    for d in level:
        for c in level:
            if level[d] > level[c] and r.random() < 0.35:
                edges += [PublicEdge(d, c, "is-a"), PublicEdge(c, d, "has-member")]
    pubs = {c: Node(c) for c in level}
    return Model(rels, {"u0": Node("u0")}, pubs, (), edges, ())


def category_equivalence(seed, depth=4):
    m = layered_dag_model(seed, levels=depth + 1)
    for n in m.public:
        paths = [Nominal(n)]
        for _ in range(depth):
            paths.append(Modal("is-a", paths[-1]))
        disj = reduce(Or, paths)
        expanded = desugar(CatNominal(n), m, expand_cat=True)
        for c in m.public:
            cat = check(m, CatNominal(n), {}, c)
            assert cat == check(m, disj, {}, c), (n, c)
            assert cat == check(m, expanded, {}, c), (n, c)
            assert cat == naive_check(m, CatNominal(n), {}, c), (n, c)


def memo_equivalence(seed):
    cfg, m, val, _, _ = case(seed)
    f = formula(cfg, 1)
    on, off = ModelChecker(m), ModelChecker(m, memo=False)
    for v in m.users:
        assert on.check(f, val, v) == off.check(f, val, v), pretty_print(f)


def expand_graded_preserves(seed):
    cfg, m, val, _, _ = case(seed, users=(1, 7), pubs=(0, 6), depth=(2, 4), grade_cap=3)
    f = formula(cfg, 1)
    g = expand_graded(f)
    for v in m.users:
        assert naive_check(m, f, val, v) == naive_check(m, g, val, v), pretty_print(f)


PROPERTIES = {
    "double negation": double_negation,
    "De Morgan": de_morgan,
    "jump absorption": jump_absorption,
    "graded monotonicity": graded_monotonicity,
    "trust monotonicity and <r->0> == <r>": trust_monotonicity,
    "filter equivalence": filter_equivalence,
    "category vs disjunction (depth <= 4)": category_equivalence,
    "memo on == memo off": memo_equivalence,
    "expand_graded preserves verdicts": expand_graded_preserves,
}
