"""OSN model: a user graph and a public-information graph joined by links.

Users carry relationship edges annotated with a trust value in [0, 1].
Public-information nodes carry relationship edges without trust.  Links
connect a user to the public information related to them; the same link set
answers both directions (``rho`` for user -> public, ``varrho`` for
public -> user).

Models are immutable once constructed.  :func:`load_model` parses the JSON
interchange format, materializes missing reverse edges and rejects invalid
documents; :func:`validate` reports invariant violations as data.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Iterable

USER = "user"
PUBLIC = "public"
SIDES = (USER, PUBLIC)

DEFAULT_TRUST = 1.0
ID_RE = re.compile(r"[A-Za-z][A-Za-z0-9_.-]*\Z")


class ModelError(ValueError):
    """Raised when a model document cannot be loaded."""

    def __init__(self, message: str, violations: list[Violation] | None = None):
        super().__init__(message)
        self.violations = violations or []


class UnknownNodeError(ModelError, LookupError):
    pass


class UnknownRelationError(ModelError, LookupError):
    pass


@dataclass(frozen=True)
class Relation:
    name: str
    reverse: str
    side: str
    acyclic: bool = False

    @property
    def symmetric(self) -> bool:
        return self.name == self.reverse


@dataclass(frozen=True)
class Node:
    id: str
    props: frozenset[str] = frozenset()


@dataclass(frozen=True)
class UserEdge:
    source: str
    target: str
    rel: str
    trust: float = DEFAULT_TRUST


@dataclass(frozen=True)
class PublicEdge:
    source: str
    target: str
    rel: str


@dataclass(frozen=True)
class Link:
    user: str
    pub: str


@dataclass(frozen=True)
class Violation:
    code: str
    element: str

    def __str__(self) -> str:
        return f"{self.code}: {self.element}"


class RelationTable:
    """Declared relation types of both sides, closed under reversal.

    A declaration ``{"name": "husbandof", "reverse": "wifeof"}`` implicitly
    declares ``wifeof`` with reverse ``husbandof``.  Conflicting declarations
    are kept in :attr:`conflicts` so that :func:`validate` can report them.
    """

    def __init__(self, relations: Iterable[Relation] = ()):
        self._by_name: dict[str, Relation] = {}
        self.declared: list[Relation] = []
        self.conflicts: list[Violation] = []
        for rel in relations:
            self._add(rel)

    def _add(self, rel: Relation) -> None:
        self.declared.append(rel)
        implied = Relation(rel.reverse, rel.name, rel.side, rel.acyclic)
        for r in (rel, implied):
            old = self._by_name.get(r.name)
            if old is None:
                self._by_name[r.name] = r
            elif old.side != r.side:
                self.conflicts.append(
                    Violation("relation-side-clash", f"{r.name} declared on both sides"))
            elif old.reverse != r.reverse:
                self.conflicts.append(
                    Violation("reverse-not-involution",
                              f"{r.name}: reverse {old.reverse} vs {r.reverse}"))

    def __contains__(self, name: str) -> bool:
        return name in self._by_name

    def __iter__(self):
        return iter(self._by_name.values())

    def get(self, name: str) -> Relation | None:
        return self._by_name.get(name)

    def reverse(self, name: str) -> str:
        return self._by_name[name].reverse

    def names(self, side: str) -> list[str]:
        return [r.name for r in self._by_name.values() if r.side == side]


@dataclass
class Model:
    """The OSN tuple.  Treat instances as read-only."""

    relations: RelationTable
    users: dict[str, Node] = field(default_factory=dict)
    public: dict[str, Node] = field(default_factory=dict)
    user_edges: tuple[UserEdge, ...] = ()
    public_edges: tuple[PublicEdge, ...] = ()
    links: tuple[Link, ...] = ()
    # ids declared more than once (kept for validate; dicts keep the first)
    duplicate_ids: tuple[str, ...] = ()

    def __post_init__(self):
        self.user_edges = tuple(self.user_edges)
        self.public_edges = tuple(self.public_edges)
        self.links = tuple(self.links)
        self._succ: dict[tuple[str, str], list[tuple[str, float | None]]] = {}
        self._trust: dict[tuple[str, str, str], float] = {}
        for e in self.user_edges:
            self._succ.setdefault((e.source, e.rel), []).append((e.target, e.trust))
            self._trust.setdefault((e.source, e.target, e.rel), e.trust)
        for e in self.public_edges:
            self._succ.setdefault((e.source, e.rel), []).append((e.target, None))
        self._rho: dict[str, list[str]] = {}
        self._varrho: dict[str, list[str]] = {}
        for ln in self.links:
            self._rho.setdefault(ln.user, []).append(ln.pub)
            self._varrho.setdefault(ln.pub, []).append(ln.user)
        self._closure: dict[tuple[str, str], frozenset[str]] = {}

    # -- lookups ---------------------------------------------------------

    def side_of(self, node: str) -> str:
        if node in self.users:
            return USER
        if node in self.public:
            return PUBLIC
        raise UnknownNodeError(f"unknown node {node!r}")

    def node(self, node_id: str) -> Node:
        n = self.users.get(node_id) or self.public.get(node_id)
        if n is None:
            raise UnknownNodeError(f"unknown node {node_id!r}")
        return n

    def relation(self, name: str, side: str | None = None) -> Relation:
        rel = self.relations.get(name)
        if rel is None:
            raise UnknownRelationError(f"unknown relation {name!r}")
        if side is not None and rel.side != side:
            raise UnknownRelationError(f"relation {name!r} is a {rel.side} relation, not {side}")
        return rel

    def successor_list(self, node: str, rel: str) -> list[tuple[str, float | None]]:
        """Successors in model-file order, without argument checking."""
        return self._succ.get((node, rel), [])

    def edge_trust(self, source: str, target: str, rel: str) -> float | None:
        return self._trust.get((source, target, rel))

    def rho_list(self, user: str) -> list[str]:
        return self._rho.get(user, [])

    def varrho_list(self, pub: str) -> list[str]:
        return self._varrho.get(pub, [])

    def nodes_with_prop(self, prop: str, side: str) -> set[str]:
        nodes = self.users if side == USER else self.public
        return {n.id for n in nodes.values() if prop in n.props}


def successors(m: Model, node: str, rel: str) -> set[tuple[str, float | None]]:
    """The ``rel``-successors of ``node`` with the trust of each traversed edge.

    Public edges carry no trust, so their entries pair the successor with
    ``None``.
    """
    side = m.side_of(node)
    m.relation(rel, side)
    return set(m.successor_list(node, rel))


def rho(m: Model, user: str) -> set[str]:
    if user not in m.users:
        raise UnknownNodeError(f"unknown user {user!r}")
    return set(m.rho_list(user))


def varrho(m: Model, pub: str) -> set[str]:
    if pub not in m.public:
        raise UnknownNodeError(f"unknown public node {pub!r}")
    return set(m.varrho_list(pub))


def descendants(m: Model, rel: str, root: str) -> frozenset[str]:
    """``root`` plus every node with a directed ``rel``-path ending at ``root``.

    Intermediate nodes are included: with ``Volleyball is-a TeamSports is-a
    Sports`` both Volleyball and TeamSports are descendants of Sports.
    """
    relation = m.relation(rel, PUBLIC)
    if not relation.acyclic:
        raise ModelError(f"relation {rel!r} is not declared acyclic")
    if root not in m.public:
        raise UnknownNodeError(f"unknown public node {root!r}")
    key = (rel, root)
    cached = m._closure.get(key)
    if cached is not None:
        return cached
    # an edge d -rel-> c is stored reversed as c -reverse(rel)-> d
    back = relation.reverse
    seen = {root}
    stack = [root]
    while stack:
        c = stack.pop()
        for d, _ in m.successor_list(c, back):
            if d not in seen:
                seen.add(d)
                stack.append(d)
    result = frozenset(seen)
    m._closure[key] = result
    return result


# -- validation ------------------------------------------------------------

def _find_cycle(nodes: Iterable[str], edges: dict[str, list[str]]) -> list[str] | None:
    WHITE, GREY, BLACK = 0, 1, 2
    color = {n: WHITE for n in nodes}
    for start in color:
        if color[start] != WHITE:
            continue
        path = [start]
        iters = [iter(edges.get(start, ()))]
        color[start] = GREY
        while iters:
            nxt = next(iters[-1], None)
            if nxt is None:
                color[path.pop()] = BLACK
                iters.pop()
            elif color.get(nxt) == GREY:
                return path[path.index(nxt):] + [nxt]
            elif color.get(nxt) == WHITE:
                color[nxt] = GREY
                path.append(nxt)
                iters.append(iter(edges.get(nxt, ())))
    return None


def validate(m: Model) -> list[Violation]:
    """Check every model invariant; an empty list means the model is valid."""
    out: list[Violation] = list(m.relations.conflicts)
    rels = m.relations

    for dup in m.duplicate_ids:
        out.append(Violation("duplicate-id", dup))
    for nid in list(m.users) + list(m.public):
        if not ID_RE.match(nid):
            out.append(Violation("invalid-id", nid))
    for nid in set(m.users) & set(m.public):
        out.append(Violation("duplicate-id", nid))
    for r in rels.declared:
        for name in (r.name, r.reverse):
            if not ID_RE.match(name):
                out.append(Violation("invalid-id", name))
        if r.acyclic and r.side == USER:
            out.append(Violation("acyclic-user-relation", r.name))

    def check_rel(name: str, side: str, where: str) -> bool:
        rel = rels.get(name)
        if rel is None:
            out.append(Violation("unknown-relation", f"{name} in {where}"))
            return False
        if rel.side != side:
            out.append(Violation("wrong-side-relation", f"{name} in {where}"))
            return False
        return True

    seen: set[tuple[str, str, str]] = set()
    for e in m.user_edges:
        where = f"user edge {e.source}->{e.target}"
        ok = check_rel(e.rel, USER, where)
        for end in (e.source, e.target):
            if end not in m.users:
                out.append(Violation("unknown-node", f"{end} in {where}"))
                ok = False
        if not (0.0 <= e.trust <= 1.0):
            out.append(Violation("trust-out-of-range", f"{where} ({e.rel}) trust {e.trust}"))
        key = (e.source, e.target, e.rel)
        if key in seen:
            out.append(Violation("duplicate-edge", f"{where} ({e.rel})"))
        seen.add(key)
        if ok and (e.target, e.source, rels.reverse(e.rel)) not in m._trust:
            out.append(Violation("missing-reverse-edge",
                                 f"{e.target}->{e.source} ({rels.reverse(e.rel)})"))

    pub_seen: set[tuple[str, str, str]] = set()
    for e in m.public_edges:
        pub_seen.add((e.source, e.target, e.rel))
    counted: set[tuple[str, str, str]] = set()
    for e in m.public_edges:
        where = f"public edge {e.source}->{e.target}"
        ok = check_rel(e.rel, PUBLIC, where)
        for end in (e.source, e.target):
            if end not in m.public:
                out.append(Violation("unknown-node", f"{end} in {where}"))
                ok = False
        key = (e.source, e.target, e.rel)
        if key in counted:
            out.append(Violation("duplicate-edge", f"{where} ({e.rel})"))
        counted.add(key)
        if ok and (e.target, e.source, rels.reverse(e.rel)) not in pub_seen:
            out.append(Violation("missing-reverse-edge",
                                 f"{e.target}->{e.source} ({rels.reverse(e.rel)})"))

    link_seen: set[Link] = set()
    for ln in m.links:
        if ln.user not in m.users:
            out.append(Violation("unknown-node", f"{ln.user} in link {ln.user}->{ln.pub}"))
        if ln.pub not in m.public:
            out.append(Violation("unknown-node", f"{ln.pub} in link {ln.user}->{ln.pub}"))
        if ln in link_seen:
            out.append(Violation("duplicate-link", f"{ln.user}->{ln.pub}"))
        link_seen.add(ln)

    for r in rels:
        if r.side != PUBLIC or not r.acyclic or r.name > r.reverse:
            # one check per acyclic pair; a graph and its reverse share cycles
            continue
        adj: dict[str, list[str]] = {}
        for e in m.public_edges:
            if e.rel == r.name:
                adj.setdefault(e.source, []).append(e.target)
        cycle = _find_cycle(list(m.public), adj)
        if cycle:
            out.append(Violation("cycle-in-acyclic-relation", f"{r.name}: " + " -> ".join(cycle)))
    return out


# -- interchange format -----------------------------------------------------

def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ModelError(message)


def _nodes(entries, what: str) -> tuple[dict[str, Node], list[str]]:
    _require(isinstance(entries, list), f"'{what}' must be a list")
    nodes: dict[str, Node] = {}
    dups: list[str] = []
    for ent in entries:
        _require(isinstance(ent, dict) and isinstance(ent.get("id"), str),
                 f"{what} entry needs a string 'id': {ent!r}")
        props = ent.get("props", [])
        _require(isinstance(props, list) and all(isinstance(p, str) for p in props),
                 f"props of {ent['id']!r} must be a list of strings")
        if ent["id"] in nodes:
            dups.append(ent["id"])
            continue
        nodes[ent["id"]] = Node(ent["id"], frozenset(props))
    return nodes, dups


def _str_fields(ent, keys: tuple[str, ...], what: str) -> None:
    _require(isinstance(ent, dict), f"{what} entry must be an object: {ent!r}")
    for k in keys:
        _require(isinstance(ent.get(k), str), f"{what} entry needs a string {k!r}: {ent!r}")


def parse_document(data: bytes | str) -> Model:
    """Build a model from JSON text exactly as written (no reverse edges added).

    Structural problems (bad JSON, wrong types) raise :class:`ModelError`;
    semantic problems are left for :func:`validate`.
    """
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ModelError(f"model is not UTF-8: {exc}") from None
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ModelError(f"malformed JSON: {exc}") from None
    _require(isinstance(doc, dict), "model document must be a JSON object")

    rel_doc = doc.get("relations", {})
    _require(isinstance(rel_doc, dict), "'relations' must be an object")
    relations = []
    for side in SIDES:
        entries = rel_doc.get(side, [])
        _require(isinstance(entries, list), f"'relations.{side}' must be a list")
        for ent in entries:
            _str_fields(ent, ("name", "reverse"), "relation")
            acyclic = ent.get("acyclic", False)
            _require(isinstance(acyclic, bool), f"'acyclic' of {ent['name']!r} must be boolean")
            relations.append(Relation(ent["name"], ent["reverse"], side, acyclic))

    users, dup_u = _nodes(doc.get("users", []), "users")
    public, dup_p = _nodes(doc.get("public", []), "public")

    user_edges = []
    for ent in doc.get("user_edges", []):
        _str_fields(ent, ("from", "to", "rel"), "user_edges")
        trust = ent.get("trust", DEFAULT_TRUST)
        _require(isinstance(trust, (int, float)) and not isinstance(trust, bool),
                 f"trust must be a number: {ent!r}")
        user_edges.append(UserEdge(ent["from"], ent["to"], ent["rel"], float(trust)))
    public_edges = []
    for ent in doc.get("public_edges", []):
        _str_fields(ent, ("from", "to", "rel"), "public_edges")
        _require("trust" not in ent, f"public edges carry no trust: {ent!r}")
        public_edges.append(PublicEdge(ent["from"], ent["to"], ent["rel"]))
    links = []
    for ent in doc.get("links", []):
        _str_fields(ent, ("user", "pub"), "links")
        links.append(Link(ent["user"], ent["pub"]))

    return Model(RelationTable(relations), users, public, user_edges, public_edges,
                 links, tuple(dup_u + dup_p))


def materialize_reverse(m: Model) -> Model:
    """Return a model where every edge has its reverse-direction counterpart.

    Added user edges get the default trust; an explicit opposite-direction
    entry in the document always wins.  Edges over unknown relations are left
    alone for :func:`validate` to report.
    """
    rels = m.relations
    user_edges = list(m.user_edges)
    have = {(e.source, e.target, e.rel) for e in user_edges}
    for e in m.user_edges:
        if e.rel not in rels:
            continue
        rev = (e.target, e.source, rels.reverse(e.rel))
        if rev not in have:
            have.add(rev)
            user_edges.append(UserEdge(*rev, DEFAULT_TRUST))
    public_edges = list(m.public_edges)
    have = {(e.source, e.target, e.rel) for e in public_edges}
    for e in m.public_edges:
        if e.rel not in rels:
            continue
        rev = (e.target, e.source, rels.reverse(e.rel))
        if rev not in have:
            have.add(rev)
            public_edges.append(PublicEdge(*rev))
    return Model(rels, m.users, m.public, user_edges, public_edges, m.links, m.duplicate_ids)


def load_model(data: bytes | str) -> Model:
    """Parse, complete and validate a model document."""
    m = materialize_reverse(parse_document(data))
    problems = validate(m)
    if problems:
        detail = "; ".join(str(v) for v in problems[:5])
        more = f" (+{len(problems) - 5} more)" if len(problems) > 5 else ""
        first = problems[0].code.replace("-", " ")
        raise ModelError(f"{first}: {detail}{more}", problems)
    return m


def to_document(m: Model) -> dict:
    """Inverse of :func:`parse_document` (edges are written as stored)."""
    return {
        "relations": {
            side: [
                {"name": r.name, "reverse": r.reverse, **({"acyclic": True} if r.acyclic else {})}
                for r in m.relations.declared if r.side == side
            ]
            for side in SIDES
        },
        "users": [{"id": n.id, "props": sorted(n.props)} for n in m.users.values()],
        "public": [{"id": n.id, "props": sorted(n.props)} for n in m.public.values()],
        "user_edges": [{"from": e.source, "to": e.target, "rel": e.rel, "trust": e.trust}
                       for e in m.user_edges],
        "public_edges": [{"from": e.source, "to": e.target, "rel": e.rel}
                         for e in m.public_edges],
        "links": [{"user": ln.user, "pub": ln.pub} for ln in m.links],
    }
