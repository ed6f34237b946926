import json

import pytest
from hypothesis import given, settings, strategies as st

from relcheck.model import (
    Model, ModelError, Node, PublicEdge, Relation, RelationTable, UserEdge,
    descendants, load_model, materialize_reverse, parse_document, rho, successors, validate, varrho,
)
from relcheck.oracle import GeneratorConfig, random_model

from conftest import fixpoint_descendants


def doc(**parts):
    base = {"relations": {"user": [{"name": "friend", "reverse": "friend"}],
                          "public": [{"name": "is-a", "reverse": "has-member", "acyclic": True}]},
            "users": [], "public": []}
    base.update(parts)
    return json.dumps(base)


def codes(m):
    return {v.code for v in validate(m)}


def test_minimal_document():
    m = load_model(doc(users=[{"id": "alice"}]))
    assert list(m.users) == ["alice"]
    assert m.public == {}


def test_reverse_edge_materialized_with_default_trust():
    m = load_model(doc(users=[{"id": "alice"}, {"id": "bob"}],
                       user_edges=[{"from": "alice", "to": "bob", "rel": "friend", "trust": 0.9}]))
    assert successors(m, "alice", "friend") == {("bob", 0.9)}
    assert successors(m, "bob", "friend") == {("alice", 1.0)}


def test_explicit_reverse_entry_keeps_its_trust():
    m = load_model(doc(users=[{"id": "a"}, {"id": "b"}],
                       user_edges=[{"from": "a", "to": "b", "rel": "friend", "trust": 0.9},
                                   {"from": "b", "to": "a", "rel": "friend", "trust": 0.3}]))
    assert successors(m, "b", "friend") == {("a", 0.3)}
    assert len(m.user_edges) == 2


def test_asymmetric_reverse_relation():
    text = json.dumps({
        "relations": {"user": [{"name": "husbandof", "reverse": "wifeof"}]},
        "users": [{"id": "d"}, {"id": "e"}],
        "user_edges": [{"from": "d", "to": "e", "rel": "husbandof"}]})
    m = load_model(text)
    assert successors(m, "e", "wifeof") == {("d", 1.0)}
    assert m.relations.reverse(m.relations.reverse("husbandof")) == "husbandof"


def test_trust_out_of_range():
    with pytest.raises(ModelError, match="trust out of range"):
        load_model(doc(users=[{"id": "a"}, {"id": "b"}],
                       user_edges=[{"from": "a", "to": "b", "rel": "friend", "trust": 1.2}]))


@pytest.mark.parametrize("text, fragment", [
    ("{not json", "malformed JSON"),
    ("[]", "JSON object"),
    (doc(users=[{"id": "a"}], user_edges=[{"from": "a", "to": "zed", "rel": "friend"}]), "unknown node"),
    (doc(users=[{"id": "a"}, {"id": "b"}], user_edges=[{"from": "a", "to": "b", "rel": "enemy"}]),
     "unknown relation"),
    (doc(users=[{"id": "a"}], links=[{"user": "a", "pub": "nowhere"}]), "unknown node"),
])
def test_load_errors(text, fragment):
    with pytest.raises(ModelError, match=fragment):
        load_model(text)


def test_reverse_table_inconsistency():
    text = json.dumps({"relations": {"user": [{"name": "husbandof", "reverse": "wifeof"},
                                              {"name": "wifeof", "reverse": "sisterof"}]}})
    with pytest.raises(ModelError) as exc:
        load_model(text)
    assert "reverse-not-involution" in {v.code for v in exc.value.violations}


def test_cycle_rejected_on_load():
    text = doc(public=[{"id": "Tennis"}, {"id": "Sports"}],
               public_edges=[{"from": "Tennis", "to": "Sports", "rel": "is-a"},
                             {"from": "Sports", "to": "Tennis", "rel": "is-a"}])
    with pytest.raises(ModelError, match="cycle"):
        load_model(text)


def test_successors_fixture(model):
    friends = {b for b, _ in successors(model, "Eve", "friend")}
    assert {"Bob", "Frank", "Gabriele"} <= friends
    assert successors(model, "CompanyB", "rival") == {("CompanyA", None)}
    assert successors(model, "Danny", "colleague") == set()


def test_successors_errors(model):
    with pytest.raises(ModelError):
        successors(model, "Nobody", "friend")
    with pytest.raises(ModelError):
        successors(model, "Eve", "rival")  # public relation at a user
    with pytest.raises(ModelError):
        successors(model, "Eve", "enemy")


def test_links(model):
    assert {"Basketball", "Tennis"} <= rho(model, "Charlie")
    assert {"Alice", "Charlie"} <= varrho(model, "Tennis")
    assert varrho(model, "France") == set()
    m = load_model(doc(users=[{"id": "a"}]))
    assert rho(m, "a") == set()
    with pytest.raises(ModelError):
        rho(model, "Tennis")


def test_descendants_fixture(model):
    assert descendants(model, "is-a", "Sports") == {
        "Sports", "TeamSports", "Tennis", "Volleyball", "Basketball"}
    assert descendants(model, "is-a", "Tennis") == {"Tennis"}
    assert descendants(model, "is-in", "Paris") == {"Paris", "Montparnasse", "Louvre", "CafeDeFlore"}
    with pytest.raises(ModelError, match="not declared acyclic"):
        descendants(model, "rival", "CompanyA")
    with pytest.raises(ModelError):
        descendants(model, "is-a", "Atlantis")


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32), n=st.integers(1, 50), density=st.floats(0.0, 0.3))
def test_descendants_match_fixpoint(seed, n, density):
    m = random_model(GeneratorConfig(seed=seed, user_count=0, pub_count=n,
                                     edge_density=density, public_relation_count=1))
    for root in list(m.public)[:10]:
        assert descendants(m, "is-a", root) == fixpoint_descendants(m, "is-a", root)


def test_fixture_validates(model):
    assert validate(model) == []


def _tiny(user_edges=(), public_edges=(), links=(), users=("a", "b"), pubs=("p", "q")):
    rels = RelationTable([Relation("friend", "friend", "user"),
                          Relation("is-a", "has-member", "public", True)])
    return Model(rels, {u: Node(u) for u in users}, {p: Node(p) for p in pubs},
                 user_edges, public_edges, links)


def test_validate_missing_reverse():
    assert codes(_tiny([UserEdge("a", "b", "friend")])) == {"missing-reverse-edge"}


def test_validate_cycle():
    m = _tiny(public_edges=[PublicEdge("p", "q", "is-a"), PublicEdge("q", "p", "has-member"),
                            PublicEdge("q", "p", "is-a"), PublicEdge("p", "q", "has-member")])
    assert codes(m) == {"cycle-in-acyclic-relation"}


@pytest.mark.parametrize("mutate, code", [
    (lambda d: d["user_edges"][0].update(trust=-0.1), "trust-out-of-range"),
    (lambda d: d["user_edges"][0].update(to="Zed"), "unknown-node"),
    (lambda d: d["user_edges"][0].update(rel="is-a"), "wrong-side-relation"),
    (lambda d: d["public_edges"][0].update(rel="friend"), "wrong-side-relation"),
    (lambda d: d["public_edges"][0].update(rel="likes"), "unknown-relation"),
    (lambda d: d["links"][0].update(pub="Atlantis"), "unknown-node"),
    (lambda d: d["links"].append(dict(d["links"][0])), "duplicate-link"),
    (lambda d: d["user_edges"].append(dict(d["user_edges"][0])), "duplicate-edge"),
    (lambda d: d["public"].append({"id": "Alice"}), "duplicate-id"),
    (lambda d: d["users"].append({"id": "9lives"}), "invalid-id"),
    (lambda d: d["public_edges"].append({"from": "Sports", "to": "Tennis", "rel": "is-a"}),
     "cycle-in-acyclic-relation"),
    (lambda d: d["relations"]["public"].append({"name": "friend", "reverse": "friend"}),
     "relation-side-clash"),
])
def test_validate_reports_injected_violation(fig1_doc, mutate, code):
    mutate(fig1_doc)
    m = materialize_reverse(parse_document(json.dumps(fig1_doc)))
    assert code in codes(m)


def test_random_models_validate():
    for seed in range(1000):
        cfg = GeneratorConfig(seed=seed, user_count=seed % 13, pub_count=(seed * 7) % 13,
                              public_relation_count=4, user_relation_count=4)
        assert validate(random_model(cfg)) == [], seed


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32))
def test_edge_and_link_duality(seed):
    m = random_model(GeneratorConfig(seed=seed, user_relation_count=4, public_relation_count=4))
    for node in list(m.users) + list(m.public):
        side_rels = m.relations.names(m.side_of(node))
        for r in side_rels:
            for b, _ in successors(m, node, r):
                assert node in {a for a, _ in successors(m, b, m.relations.reverse(r))}
    for a in m.users:
        for c in rho(m, a):
            assert a in varrho(m, c)
    for c in m.public:
        for a in varrho(m, c):
            assert c in rho(m, a)
    for r in m.relations:
        assert m.relations.reverse(m.relations.reverse(r.name)) == r.name
