"""Textual format for feature models (`.fm` files).

    model CADPartial
    feature CAD {
      mandatory {
        v1 {
          xor { v1.1 v1.2 }
        }
      }
    }
    constraints {
      v2.3.1 requires v1.1
    }

Group keywords are `mandatory`, `optional`, `xor`, `xor?`, `or`, `or?`.
Children inside a group are bare identifiers with an optional braced body;
the `feature` keyword is required for the root and tolerated before children.
Identifiers may contain dots (so names like v2.3.1 need no quoting), which is
also why the language has no attribute-access syntax. `#` starts a comment.
Keywords are reserved and cannot name features.

The parser never raises mid-parse: it recovers at statement boundaries and
reports every error it can find in one pass, with byte-reproducible messages.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import (
    ChildGroup,
    ConstraintKind,
    CrossTreeConstraint,
    Feature,
    FeatureModel,
    GroupKind,
    validate_structure,
)

KEYWORDS = frozenset({
    "model", "feature", "constraints", "requires", "excludes",
    "mandatory", "optional", "xor", "xor?", "or", "or?",
})

KIND_KEYWORDS = {kind.keyword: kind for kind in GroupKind}


@dataclass(frozen=True)
class SourceSpan:
    line: int
    column: int
    length: int


@dataclass(frozen=True)
class ParseError:
    span: SourceSpan
    expected: str
    found: str
    code: str = "syntax"

    @property
    def message(self) -> str:
        return (f"{self.span.line}:{self.span.column}: "
                f"expected {self.expected}, found {self.found}")

    def __str__(self) -> str:
        return self.message


class ParseFailure(Exception):
    """Carries every error found in one pass over the source."""

    def __init__(self, errors: list[ParseError]):
        super().__init__("; ".join(e.message for e in errors[:5])
                         + ("; ..." if len(errors) > 5 else ""))
        self.errors = errors


# --- lexer -------------------------------------------------------------------

_EOF = "end of input"


@dataclass(frozen=True)
class _Token:
    kind: str  # "ident", "kw", "{", "}", "eof"
    text: str
    line: int
    column: int

    @property
    def span(self) -> SourceSpan:
        return SourceSpan(self.line, self.column, max(1, len(self.text)))

    def describe(self) -> str:
        return _EOF if self.kind == "eof" else f"'{self.text}'"


def _lex(source: str, errors: list[ParseError]) -> list[_Token]:
    tokens: list[_Token] = []
    pos, line, col = 0, 1, 1
    n = len(source)
    while pos < n:
        ch = source[pos]
        if ch in " \t\r":
            pos += 1
            col += 1
            continue
        if ch == "\n":
            pos += 1
            line += 1
            col = 1
            continue
        if ch == "#":
            end = source.find("\n", pos)
            if end == -1:
                break
            col += end - pos
            pos = end
            continue
        if ch == "{" or ch == "}":
            tokens.append(_Token(ch, ch, line, col))
            pos += 1
            col += 1
            continue
        if ch.isalpha() or ch == "_":
            start = pos
            pos += 1
            while pos < n and (source[pos].isalnum() or source[pos] in "_."):
                pos += 1
            text = source[start:pos]
            if text in ("xor", "or") and pos < n and source[pos] == "?":
                text += "?"
                pos += 1
            kind = "kw" if text in KEYWORDS else "ident"
            tokens.append(_Token(kind, text, line, col))
            col += pos - start
            continue
        errors.append(ParseError(
            SourceSpan(line, col, 1), "a token",
            f"{ch!r}" if ch.isprintable() else f"byte 0x{ord(ch) & 0xff:02x}",
            code="lexical"))
        pos += 1
        col += 1
    tokens.append(_Token("eof", "", line, col))
    return tokens


# --- parser ------------------------------------------------------------------

class _Parser:
    def __init__(self, source: str):
        self.errors: list[ParseError] = []
        self.tokens = _lex(source, self.errors)
        self.pos = 0
        self.declared: dict[str, SourceSpan] = {}

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def at(self, kind: str, text: str | None = None) -> bool:
        tok = self.peek()
        return tok.kind == kind and (text is None or tok.text == text)

    def error(self, expected: str, tok: _Token | None = None, code: str = "syntax") -> None:
        tok = tok if tok is not None else self.peek()
        self.errors.append(ParseError(tok.span, expected, tok.describe(), code))

    def expect_kw(self, word: str) -> bool:
        if self.at("kw", word):
            self.advance()
            return True
        self.error(f"'{word}'")
        return False

    def expect_ident(self, what: str) -> _Token | None:
        if self.at("ident"):
            return self.advance()
        self.error(what)
        return None

    # grammar productions -----------------------------------------------

    def parse_file(self, name_hint: str) -> FeatureModel | None:
        self.expect_kw("model")
        name_tok = self.expect_ident("a model name")
        name = name_tok.text if name_tok else name_hint
        root: Feature | None = None
        if self.at("kw", "feature"):
            root = self.parse_root()
        else:
            self.error("'feature'")
        constraints: list[CrossTreeConstraint] = []
        if self.at("kw", "constraints"):
            constraints = self.parse_constraints()
        if not self.at("eof"):
            self.error(_EOF)
        if root is None:
            return None
        return FeatureModel(name, root, tuple(constraints))

    def parse_root(self) -> Feature:
        self.advance()  # 'feature'
        name_tok = self.expect_ident("a feature id")
        fid = self.declare(name_tok)
        groups = self.parse_body() if self.at("{") else []
        return Feature(fid, groups=tuple(groups))

    def declare(self, tok: _Token | None) -> str:
        if tok is None:
            return "_error_"
        if tok.text in self.declared:
            self.errors.append(ParseError(
                tok.span, "a fresh feature id",
                f"duplicate feature id '{tok.text}'", code="duplicate-feature"))
        else:
            self.declared[tok.text] = tok.span
        return tok.text

    def parse_body(self) -> list[ChildGroup]:
        self.advance()  # '{'
        groups: list[ChildGroup] = []
        while True:
            tok = self.peek()
            if tok.kind == "}":
                self.advance()
                return groups
            if tok.kind == "eof":
                self.error("'}'")
                return groups
            if tok.kind == "kw" and tok.text in KIND_KEYWORDS:
                groups.append(self.parse_group())
            else:
                self.error("a group kind or '}'")
                self.advance()  # skip and resync

    def parse_group(self) -> ChildGroup:
        kind_tok = self.advance()
        kind = KIND_KEYWORDS[kind_tok.text]
        children: list[Feature] = []
        if self.at("{"):
            self.advance()
            while True:
                tok = self.peek()
                if tok.kind == "}":
                    self.advance()
                    break
                if tok.kind == "eof":
                    self.error("'}'")
                    break
                if tok.kind == "ident" or (tok.kind == "kw" and tok.text == "feature"):
                    children.append(self.parse_child())
                else:
                    self.error("a feature id or '}'")
                    self.advance()
        else:
            self.error("'{'")
        if len(children) < kind.min_children:
            self.errors.append(ParseError(
                kind_tok.span,
                f"at least {kind.min_children} child(ren) in a "
                f"{kind.keyword} group",
                f"{len(children)}", code="group-too-small"))
        return ChildGroup(kind, tuple(children))

    def parse_child(self) -> Feature:
        if self.at("kw", "feature"):
            self.advance()
        name_tok = self.expect_ident("a feature id")
        fid = self.declare(name_tok)
        groups = self.parse_body() if self.at("{") else []
        return Feature(fid, groups=tuple(groups))

    def parse_constraints(self) -> list[CrossTreeConstraint]:
        self.advance()  # 'constraints'
        constraints: list[CrossTreeConstraint] = []
        if not self.at("{"):
            self.error("'{'")
            return constraints
        self.advance()
        while True:
            tok = self.peek()
            if tok.kind == "}":
                self.advance()
                return constraints
            if tok.kind == "eof":
                self.error("'}'")
                return constraints
            if tok.kind == "ident":
                constraint = self.parse_constraint()
                if constraint is not None:
                    constraints.append(constraint)
            else:
                self.error("a feature id or '}'")
                self.advance()

    def parse_constraint(self) -> CrossTreeConstraint | None:
        source_tok = self.advance()
        if self.at("kw", "requires") or self.at("kw", "excludes"):
            kind = ConstraintKind(self.advance().text)
        else:
            self.error("'requires' or 'excludes'")
            return None
        target_tok = self.expect_ident("a feature id")
        if target_tok is None:
            return None
        self.check_endpoint(source_tok)
        self.check_endpoint(target_tok)
        if source_tok.text == target_tok.text:
            self.errors.append(ParseError(
                source_tok.span, "two distinct features",
                f"'{source_tok.text}' related to itself", code="self-reference"))
        return CrossTreeConstraint(kind, source_tok.text, target_tok.text)

    def check_endpoint(self, tok: _Token) -> None:
        if tok.text not in self.declared:
            self.errors.append(ParseError(
                tok.span, "a declared feature id",
                f"unknown feature '{tok.text}'", code="unknown-feature"))


def parse_model(source: str, name_hint: str = "Unnamed") -> FeatureModel:
    """Parse `.fm` text; raises ParseFailure carrying every error found."""
    parser = _Parser(source)
    model = parser.parse_file(name_hint)
    errors = parser.errors
    if model is not None and not errors:
        # Residual structural problems (none are expected to slip past the
        # syntactic checks, but the contract is that a returned model is sound).
        for diag in validate_structure(model):
            errors.append(ParseError(SourceSpan(1, 1, 1), "a well-formed model",
                                     diag.message, code="structure"))
    if errors:
        raise ParseFailure(errors)
    assert model is not None
    return model


def try_parse_model(source: str, name_hint: str = "Unnamed") -> tuple[FeatureModel | None, list[ParseError]]:
    try:
        return parse_model(source, name_hint), []
    except ParseFailure as failure:
        return None, failure.errors


# --- serializer ---------------------------------------------------------------

def serialize_model(model: FeatureModel) -> str:
    """Canonical rendering: 2-space indent, declaration order preserved,
    leaf-only groups on one line. Output re-parses to an identical model."""
    lines = [f"model {model.name}", f"feature {model.root.id} {{"]

    def emit_group(group: ChildGroup, depth: int) -> None:
        pad = "  " * depth
        if all(not child.groups for child in group.children):
            inline = " ".join(child.id for child in group.children)
            lines.append(f"{pad}{group.kind.keyword} {{ {inline} }}")
            return
        lines.append(f"{pad}{group.kind.keyword} {{")
        for child in group.children:
            emit_child(child, depth + 1)
        lines.append(f"{pad}}}")

    def emit_child(child: Feature, depth: int) -> None:
        pad = "  " * depth
        if not child.groups:
            lines.append(f"{pad}{child.id}")
            return
        lines.append(f"{pad}{child.id} {{")
        for group in child.groups:
            emit_group(group, depth + 1)
        lines.append(f"{pad}}}")

    for group in model.root.groups:
        emit_group(group, 1)
    lines.append("}")

    if model.constraints:
        lines.append("constraints {")
        for constraint in model.constraints:
            lines.append(f"  {constraint}")
        lines.append("}")
    return "\n".join(lines) + "\n"
