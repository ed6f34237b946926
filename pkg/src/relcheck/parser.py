"""Concrete syntax: lexer, recursive-descent parser and pretty-printer.

Policy grammar (whitespace insensitive)::

    policy  := '@' '?' ('own'|'req') uunary
    ufor    := uconj ('or' uconj)*
    uconj   := uunary ('and' uunary)*
    uunary  := 'not' uunary
             | '<' REL (':' INT)? ('->' NUM | '<-' NUM)? '>' uunary
             | '@' term uunary
             | 'down' '?' VAR '.' uunary
             | 'pub' ('[' PROP ']')? punary
             | '(' ufor ')' | '#' NAME | '?' VAR | PROP | 'true' | 'false'
    punary  := 'not' punary
             | '<' REL '>' punary
             | '@' term punary
             | 'down' '?' VAR '.' punary
             | 'usr' ('[' PROP ']')? uunary
             | 'cat' ('(' REL ')')? '#' NAME
             | '(' pfor ')' | '#' NAME | '?' VAR | PROP | 'true' | 'false'

``#`` followed by a letter is a nominal; otherwise ``#`` at the start of a
line or after whitespace starts a comment running to the end of the line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from decimal import Decimal

from .syntax import (
    DEFAULT_CATEGORY_REL, PUBLIC, RESERVED, USER, And, Bind, CatNominal, Const, FormulaError,
    Formula, Jump, Modal, Nominal, Not, Or, Prop, ToPub, ToUser, Trust, Var,
)

KEYWORDS = frozenset({"not", "and", "or", "down", "pub", "usr", "cat", "true", "false"})

_NAME = r"[A-Za-z][A-Za-z0-9_.-]*"
_WORD = r"[A-Za-z][A-Za-z0-9_]*(?:-[A-Za-z0-9_]+)*"
_TOKEN_RE = re.compile(
    rf"(?P<nominal>#{_NAME})"
    rf"|(?P<word>{_WORD})"
    r"|(?P<num>\d+(?:\.\d+)?|\.\d+)"
    r"|(?P<sym><-|->|[@?()\[\]<>:.])"
)


class PolicySyntaxError(FormulaError):
    """A diagnostic tied to a position in the policy text."""

    def __init__(self, message: str, text: str, pos: int):
        self.message = message
        self.pos = pos
        self.line = text.count("\n", 0, pos) + 1
        self.col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        super().__init__(f"{self.line}:{self.col}: {message}")


@dataclass(frozen=True)
class Token:
    kind: str   # 'nominal', 'word', 'num', 'sym' or 'eof'
    value: str
    pos: int

    def describe(self) -> str:
        return "end of input" if self.kind == "eof" else repr(self.value)


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        ch = text[pos]
        if ch.isspace():
            pos += 1
            continue
        if ch == "#" and not (pos + 1 < n and text[pos + 1].isascii() and text[pos + 1].isalpha()):
            if pos == 0 or text[pos - 1].isspace():
                end = text.find("\n", pos)
                pos = n if end < 0 else end
                continue
            raise PolicySyntaxError("'#' must start a nominal or a comment", text, pos)
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise PolicySyntaxError(f"unexpected character {ch!r}", text, pos)
        kind = m.lastgroup
        value = m.group()
        if kind == "nominal":
            value = value[1:]
        tokens.append(Token(kind, value, pos))
        pos = m.end()
    tokens.append(Token("eof", "", n))
    return tokens


class _Parser:

    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def error(self, message: str, tok: Token | None = None) -> PolicySyntaxError:
        return PolicySyntaxError(message, self.text, (tok or self.tok).pos)

    def at(self, value: str) -> bool:
        t = self.tok
        return t.kind in ("sym", "word") and t.value == value

    def next(self) -> Token:
        t = self.tok
        if t.kind != "eof":
            self.i += 1
        return t

    def expect(self, value: str) -> Token:
        if not self.at(value):
            raise self.error(f"expected {value!r}, found {self.tok.describe()}")
        return self.next()

    def word(self, what: str) -> Token:
        t = self.tok
        if t.kind != "word" or t.value in KEYWORDS:
            raise self.error(f"expected {what}, found {t.describe()}")
        return self.next()

    def nominal(self) -> Token:
        if self.tok.kind != "nominal":
            raise self.error(f"expected a nominal '#Name', found {self.tok.describe()}")
        return self.next()

    def number(self, what: str) -> tuple[Token, str]:
        t = self.tok
        if t.kind != "num":
            raise self.error(f"expected {what}, found {t.describe()}")
        return self.next(), t.value

    # -- variables --------------------------------------------------------

    def use_var(self, tok: Token, side: str, scope: dict[str, str], free: dict[str, str] | None):
        name = tok.value
        if name in RESERVED:
            if side != USER:
                raise self.error(f"?{name} is a user-side variable, used on the public side", tok)
        elif name in scope:
            if scope[name] != side:
                raise self.error(
                    f"?{name} is bound on the {scope[name]} side but used on the {side} side", tok)
        elif free is None:
            raise self.error(f"unbound variable ?{name}", tok)
        elif free.setdefault(name, side) != side:
            raise self.error(f"free variable ?{name} used on both sides", tok)

    # -- grammar ----------------------------------------------------------

    def disj(self, side, scope, free) -> Formula:
        f = self.conj(side, scope, free)
        while self.at("or"):
            self.next()
            f = Or(f, self.conj(side, scope, free))
        return f

    def conj(self, side, scope, free) -> Formula:
        f = self.unary(side, scope, free)
        while self.at("and"):
            self.next()
            f = And(f, self.unary(side, scope, free))
        return f

    def unary(self, side: str, scope: dict[str, str], free) -> Formula:
        t = self.tok
        if t.kind == "nominal":
            self.next()
            return Nominal(t.value)
        if t.kind == "num":
            raise self.error(f"unexpected number {t.value!r}")
        if t.kind == "eof":
            raise self.error("unexpected end of input")
        v = t.value
        if t.kind == "word":
            if v == "not":
                self.next()
                return Not(self.unary(side, scope, free))
            if v == "down":
                self.next()
                self.expect("?")
                var = self.word("a variable name")
                if var.value in RESERVED:
                    raise self.error(f"reserved variable ?{var.value} cannot be rebound", var)
                self.expect(".")
                return Bind(var.value, self.unary(side, {**scope, var.value: side}, free))
            if v in ("pub", "usr"):
                want = USER if v == "pub" else PUBLIC
                if side != want:
                    other = "usr" if v == "pub" else "pub"
                    raise self.error(f"'{v}' cannot be used on the {side} side (did you mean '{other}'?)")
                self.next()
                filt = None
                if self.at("["):
                    self.next()
                    filt = self.word("a proposition").value
                    self.expect("]")
                body = self.unary(PUBLIC if v == "pub" else USER, scope, free)
                return ToPub(body, filt) if v == "pub" else ToUser(body, filt)
            if v == "cat":
                if side != PUBLIC:
                    raise self.error("'cat' is only allowed on the public side")
                self.next()
                rel = DEFAULT_CATEGORY_REL
                if self.at("("):
                    self.next()
                    rel = self.word("a relation name").value
                    self.expect(")")
                return CatNominal(self.nominal().value, rel)
            if v in ("true", "false"):
                self.next()
                return Const(v == "true")
            if v in KEYWORDS:
                raise self.error(f"unexpected keyword {v!r}")
            self.next()
            return Prop(v)
        # symbols
        if v == "?":
            self.next()
            var = self.word("a variable name")
            self.use_var(var, side, scope, free)
            return Var(var.value)
        if v == "(":
            self.next()
            f = self.disj(side, scope, free)
            self.expect(")")
            return f
        if v == "@":
            self.next()
            return Jump(self.term(side, scope, free), self.unary(side, scope, free))
        if v == "<":
            return self.modal(side, scope, free)
        raise self.error(f"unexpected {t.describe()}")

    def term(self, side, scope, free) -> Var | Nominal:
        if self.tok.kind == "nominal":
            return Nominal(self.next().value)
        if self.at("?"):
            self.next()
            var = self.word("a variable name")
            self.use_var(var, side, scope, free)
            return Var(var.value)
        raise self.error(f"expected '#Name' or '?var' after '@', found {self.tok.describe()}")

    def modal(self, side, scope, free) -> Modal:
        self.expect("<")
        rel = self.word("a relation name").value
        grade = 1
        trust = None
        if self.at(":"):
            colon = self.next()
            tok, text = self.number("a grade")
            if not text.isdigit():
                raise self.error(f"grade must be an integer, got {text}", tok)
            grade = int(text)
            if grade < 1:
                raise self.error("grade must be at least 1", tok)
            if side != USER and grade != 1:
                raise self.error("grades apply to user relations only", colon)
        if self.at("->") or self.at("<-"):
            arrow = self.next()
            if side != USER:
                raise self.error("trust bounds apply to user relations only", arrow)
            tok, text = self.number("a trust value")
            t = float(text)
            if not 0.0 <= t <= 1.0:
                raise self.error(f"trust value {text} outside [0,1]", tok)
            trust = Trust(t, arrow.value == "->")
        self.expect(">")
        return Modal(rel, self.unary(side, scope, free), grade, trust)


def parse(text: str) -> Formula:
    """Parse an anchored policy ``@?own ...`` or ``@?req ...``.

    Raises :class:`PolicySyntaxError` carrying line and column.
    """
    p = _Parser(text)
    start = p.tok
    if not p.at("@"):
        raise p.error("a policy must start with '@?own' or '@?req'")
    p.next()
    if not p.at("?"):
        raise p.error("a policy must be anchored at ?own or ?req", start)
    p.next()
    var = p.word("'own' or 'req'")
    if var.value not in RESERVED:
        raise p.error("a policy must be anchored at ?own or ?req", var)
    body = p.unary(USER, {}, None)
    if p.at("and") or p.at("or"):
        raise p.error(f"the policy's outermost operator is '{p.tok.value}', not an anchor jump; "
                      "parenthesize the part after the anchor")
    if p.tok.kind != "eof":
        raise p.error(f"unexpected {p.tok.describe()} after the policy")
    return Jump(Var(var.value), body)


def parse_formula(text: str, side: str = USER, *, closed: bool = False) -> Formula:
    """Parse a formula that need not be a policy (free variables allowed
    unless ``closed``)."""
    p = _Parser(text)
    f = p.disj(side, {}, None if closed else {})
    if p.tok.kind != "eof":
        raise p.error(f"unexpected {p.tok.describe()}")
    return f


# -- printing --------------------------------------------------------------

def _num(x: float) -> str:
    s = format(Decimal(repr(float(x))), "f")
    return s


def pretty_print(f: Formula) -> str:
    """Render ``f`` in the concrete syntax; ``parse`` inverts it exactly."""
    return _pp(f, 0)


def _pp(f: Formula, ctx: int) -> str:
    if isinstance(f, Or):
        s = f"{_pp(f.left, 0)} or {_pp(f.right, 1)}"
        return f"({s})" if ctx > 0 else s
    if isinstance(f, And):
        s = f"{_pp(f.left, 1)} and {_pp(f.right, 2)}"
        return f"({s})" if ctx > 1 else s
    if isinstance(f, Const):
        return "true" if f.value else "false"
    if isinstance(f, Var):
        return f"?{f.name}"
    if isinstance(f, Nominal):
        return f"#{f.id}"
    if isinstance(f, Prop):
        return f.name
    if isinstance(f, CatNominal):
        rel = "" if f.rel == DEFAULT_CATEGORY_REL else f"({f.rel})"
        return f"cat{rel} #{f.id}"
    if isinstance(f, Not):
        return f"not {_pp(f.sub, 2)}"
    if isinstance(f, Modal):
        grade = f":{f.grade}" if f.grade != 1 else ""
        trust = ""
        if f.trust is not None:
            trust = ("->" if f.trust.forward else "<-") + _num(f.trust.threshold)
        return f"<{f.rel}{grade}{trust}> {_pp(f.sub, 2)}"
    if isinstance(f, Jump):
        return f"@{_pp(f.target, 2)} {_pp(f.sub, 2)}"
    if isinstance(f, Bind):
        return f"down ?{f.var} . {_pp(f.sub, 2)}"
    if isinstance(f, (ToPub, ToUser)):
        op = "pub" if isinstance(f, ToPub) else "usr"
        filt = f"[{f.filter}]" if f.filter is not None else ""
        return f"{op}{filt} {_pp(f.sub, 2)}"
    raise TypeError(f"not a formula: {f!r}")
