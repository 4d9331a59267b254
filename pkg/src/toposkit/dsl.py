"""Declaration language for finite sites.

Documents declare, in order: categories (objects, arrows, composition),
topologies given by covering bases, at most one coefficient ring,
presheaves (set or module valued), and presheaf morphisms.  ``parse``
turns source text into a :class:`SiteDocument` or raises a
:class:`DslError` carrying line/column diagnostics; ``elaborate`` builds
the validated in-memory objects, mapping every validation failure back
to a source span; ``print_document`` renders a document in canonical
form that parses back to an equal document.

Notation fixed here once: ``g o f = h`` declares the composite "first
``f``, then ``g``".  Identity arrows ``id_X`` exist implicitly and may
appear in covers and composition equations.  A restriction statement
``F(i) = { p -> a }`` for ``i: U -> V`` maps elements of ``F(V)`` to
elements of ``F(U)``; writing it the other way round is rejected by
domain checking.
"""

from __future__ import annotations

import string
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Optional, Sequence, Union

from .category import FinCategory, category, validate_category
from .diagnostics import StructureError
from .modules import FinModule, FinRing, ModuleHom, hom_make, module_make, ring_make
from .presheaf import (ModPresheaf, Presheaf, PresheafMorphism, SetPresheaf,
                       mod_presheaf, presheaf_morphism, set_presheaf)
from .topology import GrothendieckTopology, topology_from_sieves

__all__ = [
    "ArrowSpec", "CategoryDecl", "ComposeSpec", "CoverSpec", "Diagnostic",
    "DslError", "Elaborated", "MapSpec", "MorphismDecl", "PresheafDecl",
    "RingDecl", "SiteDocument", "Span", "TopologyDecl", "ValueSpec",
    "elaborate", "parse", "print_document", "presheaf_decl_from",
    "ring_from_text",
]


# -- diagnostics --------------------------------------------------------------


@dataclass(frozen=True)
class Span:
    line: int
    col: int


@dataclass(frozen=True)
class Diagnostic:
    line: int
    col: int
    message: str

    def __str__(self) -> str:
        return f"line {self.line}, column {self.col}: {self.message}"


class DslError(StructureError):
    """Raised with the full list of collected diagnostics."""

    def __init__(self, diagnostics: Sequence[Diagnostic]):
        self.diagnostics = tuple(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics))


# -- tokens -------------------------------------------------------------------


@dataclass(frozen=True)
class Token:
    kind: str                      # ident | number | punct | eof
    text: str
    line: int
    col: int

    @property
    def span(self) -> Span:
        return Span(self.line, self.col)


_IDENT_START = set(string.ascii_letters + "_")
_IDENT_BODY = _IDENT_START | set(string.digits)
_PUNCT = set("{}[]():;,=/^-")


def _tokenize(text: str, diags: list[Diagnostic]) -> list[Token]:
    toks: list[Token] = []
    line, col, i = 1, 1, 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if text.startswith("//", i):
            while i < n and text[i] != "\n":
                i += 1
            continue
        if text.startswith("->", i):
            toks.append(Token("punct", "->", line, col))
            i += 2
            col += 2
            continue
        if ch in _IDENT_START:
            j = i
            while j < n and text[j] in _IDENT_BODY:
                j += 1
            toks.append(Token("ident", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            toks.append(Token("number", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if ch in _PUNCT:
            toks.append(Token("punct", ch, line, col))
            i += 1
            col += 1
            continue
        diags.append(Diagnostic(line, col, f"unexpected character {ch!r}"))
        i += 1
        col += 1
    toks.append(Token("eof", "", line, col))
    return toks


# -- document model -----------------------------------------------------------


@dataclass(frozen=True)
class ArrowSpec:
    name: str
    source: str
    target: str
    span: Span = field(compare=False)


@dataclass(frozen=True)
class ComposeSpec:
    outer: str                     # outer o inner = result
    inner: str
    result: str
    span: Span = field(compare=False)


@dataclass(frozen=True)
class CategoryDecl:
    name: str
    objects: tuple[str, ...]
    arrows: tuple[ArrowSpec, ...]
    composes: tuple[ComposeSpec, ...]
    span: Span = field(compare=False)
    compose_span: Optional[Span] = field(default=None, compare=False)


@dataclass(frozen=True)
class CoverSpec:
    obj: str
    arrows: tuple[str, ...]
    span: Span = field(compare=False)


@dataclass(frozen=True)
class TopologyDecl:
    name: str
    base: str
    covers: tuple[CoverSpec, ...]
    span: Span = field(compare=False)


@dataclass(frozen=True)
class RingDecl:
    orders: tuple[int, ...]
    span: Span = field(compare=False)


@dataclass(frozen=True)
class ValueSpec:
    key: str                       # an object of the base category
    elements: Optional[tuple[str, ...]] = None
    orders: Optional[tuple[int, ...]] = None
    span: Span = field(default=Span(0, 0), compare=False)


@dataclass(frozen=True)
class MapSpec:
    key: str                       # an arrow (restriction) or object (component)
    pairs: Optional[tuple[tuple[str, str], ...]] = None
    matrix: Optional[tuple[tuple[int, ...], ...]] = None
    span: Span = field(default=Span(0, 0), compare=False)


@dataclass(frozen=True)
class PresheafDecl:
    name: str
    flavor: str                    # Set | Mod
    base: str
    values: tuple[ValueSpec, ...]
    maps: tuple[MapSpec, ...]
    span: Span = field(compare=False)


@dataclass(frozen=True)
class MorphismDecl:
    name: str
    source: str
    target: str
    components: tuple[MapSpec, ...]
    span: Span = field(compare=False)


Decl = Union[CategoryDecl, TopologyDecl, RingDecl, PresheafDecl, MorphismDecl]


@dataclass(frozen=True)
class SiteDocument:
    decls: tuple[Decl, ...]

    def categories(self) -> dict[str, CategoryDecl]:
        return {d.name: d for d in self.decls if isinstance(d, CategoryDecl)}

    def topologies(self) -> dict[str, TopologyDecl]:
        return {d.name: d for d in self.decls if isinstance(d, TopologyDecl)}

    def ring(self) -> Optional[RingDecl]:
        for d in self.decls:
            if isinstance(d, RingDecl):
                return d
        return None

    def presheaves(self) -> dict[str, PresheafDecl]:
        return {d.name: d for d in self.decls if isinstance(d, PresheafDecl)}

    def morphisms(self) -> dict[str, MorphismDecl]:
        return {d.name: d for d in self.decls if isinstance(d, MorphismDecl)}


# -- parser -------------------------------------------------------------------


class _ParseFail(Exception):
    pass


class _Parser:
    def __init__(self, toks: list[Token], diags: list[Diagnostic]):
        self.toks = toks
        self.pos = 0
        self.diags = diags

    def peek(self) -> Token:
        return self.toks[self.pos]

    def next(self) -> Token:
        t = self.toks[self.pos]
        if t.kind != "eof":
            self.pos += 1
        return t

    def fail(self, tok: Token, message: str) -> _ParseFail:
        self.diags.append(Diagnostic(tok.line, tok.col, message))
        return _ParseFail()

    def expect_punct(self, text: str) -> Token:
        t = self.peek()
        if t.kind == "punct" and t.text == text:
            return self.next()
        raise self.fail(t, f"expected {text!r}")

    def expect_ident(self, what: str = "an identifier") -> Token:
        t = self.peek()
        if t.kind == "ident":
            return self.next()
        raise self.fail(t, f"expected {what}")

    def expect_keyword(self, word: str) -> Token:
        t = self.peek()
        if t.kind == "ident" and t.text == word:
            return self.next()
        raise self.fail(t, f"expected {word!r}")

    def expect_number(self) -> int:
        t = self.peek()
        if t.kind == "number":
            return int(self.next().text)
        raise self.fail(t, "expected a number")

    def at_punct(self, text: str) -> bool:
        t = self.peek()
        return t.kind == "punct" and t.text == text

    def resync(self) -> None:
        """Skip past the next ';', stopping short of '}' and end of input."""
        while True:
            t = self.peek()
            if t.kind == "eof":
                return
            if t.kind == "punct" and t.text == "}":
                return
            self.next()
            if t.kind == "punct" and t.text == ";":
                return

    def resync_decl(self) -> None:
        """Skip to the next declaration keyword."""
        while True:
            t = self.peek()
            if t.kind == "eof" or (t.kind == "ident" and t.text in _DECL_WORDS):
                return
            self.next()


_DECL_WORDS = ("category", "topology", "ring", "presheaf", "morphism")


def parse(source: str) -> SiteDocument:
    """Parse source text; raises :class:`DslError` listing every problem.

    Recovery is statement-level only: after an error the parser skips to
    the next ';' and continues, so one bad line does not hide the rest.
    """
    diags: list[Diagnostic] = []
    toks = _tokenize(source, diags)
    p = _Parser(toks, diags)
    decls: list[Decl] = []
    last_category: Optional[str] = None
    seen: dict[str, Span] = {}
    while p.peek().kind != "eof":
        t = p.peek()
        if t.kind != "ident":
            p.fail(t, "expected a declaration")
            p.next()
            continue
        try:
            if t.text == "category":
                d = _parse_category(p)
                last_category = d.name
            elif t.text == "topology":
                d = _parse_topology(p, decls)
            elif t.text == "ring":
                d = _parse_ring(p, decls)
            elif t.text == "presheaf":
                d = _parse_presheaf(p, decls, last_category)
            elif t.text == "morphism":
                d = _parse_morphism(p, decls)
            else:
                p.fail(t, f"unknown declaration {t.text!r}")
                p.next()
                continue
        except _ParseFail:
            p.resync_decl()
            continue
        if hasattr(d, "name"):
            if d.name in seen:
                p.diags.append(Diagnostic(
                    d.span.line, d.span.col,
                    f"name {d.name} already declared"))
            else:
                seen[d.name] = d.span
        decls.append(d)
    if diags:
        raise DslError(diags)
    return SiteDocument(tuple(decls))


def _ident_list(p: _Parser, closers: tuple[str, ...]) -> list[Token]:
    out: list[Token] = []
    if p.at_punct(closers[0]) or any(p.at_punct(c) for c in closers):
        return out
    out.append(p.expect_ident())
    while p.at_punct(","):
        p.next()
        out.append(p.expect_ident())
    return out


def _parse_category(p: _Parser) -> CategoryDecl:
    span = p.next().span
    name = p.expect_ident("a category name")
    p.expect_punct("{")
    objects: list[str] = []
    try:
        p.expect_keyword("objects")
        p.expect_punct(":")
        objects = [t.text for t in _ident_list(p, (";",))]
        p.expect_punct(";")
    except _ParseFail:
        p.resync()
    obj_set = set(objects)
    arrows: list[ArrowSpec] = []
    arrow_names = {f"id_{x}" for x in objects}
    try:
        p.expect_keyword("arrows")
        p.expect_punct(":")
        while not p.at_punct(";"):
            at = p.expect_ident("an arrow name")
            p.expect_punct(":")
            src = p.expect_ident()
            p.expect_punct("->")
            tgt = p.expect_ident()
            if at.text.startswith("id_"):
                p.diags.append(Diagnostic(
                    at.line, at.col,
                    f"arrow name {at.text} is reserved for identities"))
            elif at.text in arrow_names:
                p.diags.append(Diagnostic(at.line, at.col,
                                          f"arrow {at.text} already declared"))
            for end in (src, tgt):
                if end.text not in obj_set:
                    p.diags.append(Diagnostic(end.line, end.col,
                                              f"unresolved object {end.text}"))
            arrow_names.add(at.text)
            arrows.append(ArrowSpec(at.text, src.text, tgt.text, at.span))
            if p.at_punct(","):
                p.next()
            else:
                break
        p.expect_punct(";")
    except _ParseFail:
        p.resync()
    composes: list[ComposeSpec] = []
    compose_span: Optional[Span] = None
    if p.peek().kind == "ident" and p.peek().text == "compose":
        compose_span = p.next().span
        try:
            p.expect_punct(":")
            while not p.at_punct(";"):
                g = p.expect_ident("an arrow name")
                op = p.expect_ident()
                if op.text != "o":
                    raise p.fail(op, "expected 'o'")
                f = p.expect_ident("an arrow name")
                p.expect_punct("=")
                h = p.expect_ident("an arrow name")
                for tok in (g, f, h):
                    if tok.text not in arrow_names:
                        p.diags.append(Diagnostic(tok.line, tok.col,
                                                  f"unresolved arrow {tok.text}"))
                composes.append(ComposeSpec(g.text, f.text, h.text, g.span))
                if p.at_punct(","):
                    p.next()
                else:
                    break
            p.expect_punct(";")
        except _ParseFail:
            p.resync()
    p.expect_punct("}")
    return CategoryDecl(name.text, tuple(objects), tuple(arrows),
                        tuple(composes), span, compose_span)


def _category_decl(decls: Sequence[Decl], name: str) -> Optional[CategoryDecl]:
    for d in decls:
        if isinstance(d, CategoryDecl) and d.name == name:
            return d
    return None


def _arrow_names(cat: CategoryDecl) -> set[str]:
    return ({a.name for a in cat.arrows}
            | {f"id_{x}" for x in cat.objects})


def _parse_topology(p: _Parser, decls: Sequence[Decl]) -> TopologyDecl:
    span = p.next().span
    name = p.expect_ident("a topology name")
    p.expect_keyword("on")
    base = p.expect_ident("a category name")
    cat = _category_decl(decls, base.text)
    if cat is None:
        p.diags.append(Diagnostic(base.line, base.col,
                                  f"unresolved category {base.text}"))
    p.expect_keyword("basis")
    p.expect_punct("{")
    covers: list[CoverSpec] = []
    while p.peek().kind == "ident" and p.peek().text == "cover":
        cspan = p.next().span
        try:
            obj = p.expect_ident("an object name")
            if cat is not None and obj.text not in cat.objects:
                p.diags.append(Diagnostic(obj.line, obj.col,
                                          f"unresolved object {obj.text}"))
            p.expect_punct(":")
            p.expect_punct("[")
            names = _ident_list(p, ("]",))
            if cat is not None:
                known = _arrow_names(cat)
                for tok in names:
                    if tok.text not in known:
                        p.diags.append(Diagnostic(tok.line, tok.col,
                                                  f"unresolved arrow {tok.text}"))
            p.expect_punct("]")
            p.expect_punct(";")
        except _ParseFail:
            p.resync()
            continue
        covers.append(CoverSpec(obj.text, tuple(t.text for t in names), cspan))
    p.expect_punct("}")
    return TopologyDecl(name.text, base.text, tuple(covers), span)


def _parse_ring_orders(p: _Parser) -> tuple[int, ...]:
    orders: list[int] = []
    while True:
        z = p.expect_ident()
        if z.text != "Z":
            raise p.fail(z, "expected 'Z'")
        p.expect_punct("/")
        orders.append(p.expect_number())
        if p.peek().kind == "ident" and p.peek().text == "x":
            p.next()
        else:
            return tuple(orders)


def _parse_ring(p: _Parser, decls: Sequence[Decl]) -> RingDecl:
    span = p.next().span
    if any(isinstance(d, RingDecl) for d in decls):
        p.diags.append(Diagnostic(span.line, span.col,
                                  "a ring is already declared"))
    orders = _parse_ring_orders(p)
    p.expect_punct(";")
    return RingDecl(orders, span)


def _parse_module_orders(p: _Parser) -> tuple[int, ...]:
    if p.at_punct("("):
        p.next()
        orders: list[int] = []
        if not p.at_punct(")"):
            orders.append(p.expect_number())
            while p.at_punct(","):
                p.next()
                orders.append(p.expect_number())
        p.expect_punct(")")
        return tuple(orders)
    orders = []
    while True:
        z = p.expect_ident()
        if z.text != "Z":
            raise p.fail(z, "expected 'Z' or '('")
        p.expect_punct("/")
        n = p.expect_number()
        power = 1
        if p.at_punct("^"):
            p.next()
            power = p.expect_number()
        orders.extend([n] * power)
        if p.peek().kind == "ident" and p.peek().text == "x":
            p.next()
        else:
            return tuple(orders)


def _parse_int(p: _Parser) -> int:
    if p.at_punct("-"):
        p.next()
        return -p.expect_number()
    return p.expect_number()


def _parse_matrix(p: _Parser) -> tuple[tuple[int, ...], ...]:
    p.expect_punct("[")
    rows: list[tuple[int, ...]] = []
    while not p.at_punct("]"):
        p.expect_punct("[")
        row: list[int] = []
        if not p.at_punct("]"):
            row.append(_parse_int(p))
            while p.at_punct(","):
                p.next()
                row.append(_parse_int(p))
        p.expect_punct("]")
        rows.append(tuple(row))
        if p.at_punct(","):
            p.next()
        else:
            break
    p.expect_punct("]")
    return tuple(rows)


def _parse_element_pairs(p: _Parser) -> tuple[tuple[str, str], ...]:
    p.expect_punct("{")
    pairs: list[tuple[str, str]] = []
    while not p.at_punct("}"):
        left = p.expect_ident("an element name")
        p.expect_punct("->")
        right = p.expect_ident("an element name")
        pairs.append((left.text, right.text))
        if p.at_punct(","):
            p.next()
        else:
            break
    p.expect_punct("}")
    return tuple(pairs)


def _parse_presheaf(p: _Parser, decls: Sequence[Decl],
                    last_category: Optional[str]) -> PresheafDecl:
    span = p.next().span
    name = p.expect_ident("a presheaf name")
    p.expect_punct(":")
    flavor = p.expect_ident("'Set' or 'Mod'")
    if flavor.text not in ("Set", "Mod"):
        raise p.fail(flavor, "expected 'Set' or 'Mod'")
    if last_category is None:
        raise p.fail(name, "no category declared before this presheaf")
    cat = _category_decl(decls, last_category)
    assert cat is not None
    arrows = _arrow_names(cat)
    p.expect_punct("{")
    values: list[ValueSpec] = []
    maps: list[MapSpec] = []
    seen_keys: set[str] = set()
    while p.peek().kind == "ident":
        try:
            head = p.expect_ident()
            if head.text != name.text:
                p.diags.append(Diagnostic(
                    head.line, head.col,
                    f"expected {name.text}, found {head.text}"))
            p.expect_punct("(")
            key = p.expect_ident("an object or arrow name")
            p.expect_punct(")")
            p.expect_punct("=")
            if key.text in seen_keys:
                p.diags.append(Diagnostic(key.line, key.col,
                                          f"{name.text}({key.text}) given twice"))
            seen_keys.add(key.text)
            if key.text in cat.objects:
                if flavor.text == "Set":
                    p.expect_punct("{")
                    elems = _ident_list(p, ("}",))
                    names = [t.text for t in elems]
                    if len(set(names)) != len(names):
                        p.diags.append(Diagnostic(key.line, key.col,
                                                  "duplicate elements in value"))
                    p.expect_punct("}")
                    values.append(ValueSpec(key.text, elements=tuple(names),
                                            span=key.span))
                else:
                    values.append(ValueSpec(key.text,
                                            orders=_parse_module_orders(p),
                                            span=key.span))
            elif key.text in arrows:
                if flavor.text == "Set":
                    maps.append(MapSpec(key.text,
                                        pairs=_parse_element_pairs(p),
                                        span=key.span))
                else:
                    maps.append(MapSpec(key.text, matrix=_parse_matrix(p),
                                        span=key.span))
            else:
                raise p.fail(key, f"unresolved object or arrow {key.text}")
            p.expect_punct(";")
        except _ParseFail:
            p.resync()
    p.expect_punct("}")
    return PresheafDecl(name.text, flavor.text, cat.name,
                        tuple(values), tuple(maps), span)


def _parse_morphism(p: _Parser, decls: Sequence[Decl]) -> MorphismDecl:
    span = p.next().span
    name = p.expect_ident("a morphism name")
    p.expect_punct(":")
    src = p.expect_ident("a presheaf name")
    p.expect_punct("->")
    tgt = p.expect_ident("a presheaf name")
    declared = {d.name: d for d in decls if isinstance(d, PresheafDecl)}
    for tok in (src, tgt):
        if tok.text not in declared:
            p.diags.append(Diagnostic(tok.line, tok.col,
                                      f"unresolved presheaf {tok.text}"))
    flavor = declared[src.text].flavor if src.text in declared else "Set"
    base = declared[src.text].base if src.text in declared else None
    cat = _category_decl(decls, base) if base else None
    p.expect_punct("{")
    components: list[MapSpec] = []
    seen: set[str] = set()
    while p.peek().kind == "ident":
        try:
            head = p.expect_ident()
            if head.text != name.text:
                p.diags.append(Diagnostic(
                    head.line, head.col,
                    f"expected {name.text}, found {head.text}"))
            p.expect_punct("(")
            key = p.expect_ident("an object name")
            p.expect_punct(")")
            p.expect_punct("=")
            if cat is not None and key.text not in cat.objects:
                p.diags.append(Diagnostic(key.line, key.col,
                                          f"unresolved object {key.text}"))
            if key.text in seen:
                p.diags.append(Diagnostic(key.line, key.col,
                                          f"{name.text}({key.text}) given twice"))
            seen.add(key.text)
            if flavor == "Set":
                components.append(MapSpec(key.text,
                                          pairs=_parse_element_pairs(p),
                                          span=key.span))
            else:
                components.append(MapSpec(key.text, matrix=_parse_matrix(p),
                                          span=key.span))
            p.expect_punct(";")
        except _ParseFail:
            p.resync()
    p.expect_punct("}")
    return MorphismDecl(name.text, src.text, tgt.text,
                        tuple(components), span)


# -- elaboration --------------------------------------------------------------


@dataclass
class Elaborated:
    document: SiteDocument
    categories: dict[str, FinCategory]
    topologies: dict[str, GrothendieckTopology]
    topology_base: dict[str, str]
    ring: Optional[FinRing]
    presheaves: dict[str, Presheaf]
    presheaf_base: dict[str, str]
    morphisms: dict[str, PresheafMorphism]


def _elab_category(d: CategoryDecl, diags: list[Diagnostic]) -> Optional[FinCategory]:
    arrows = [(a.name, a.source, a.target) for a in d.arrows]
    by_name = {a.name: a for a in d.arrows}
    endpoints = {a.name: (a.source, a.target) for a in d.arrows}
    for x in d.objects:
        endpoints[f"id_{x}"] = (x, x)
    compose: dict[tuple[str, str], str] = {}
    bad = False
    for eq in d.composes:
        if not all(n in endpoints for n in (eq.outer, eq.inner, eq.result)):
            bad = True
            continue
        isrc, itgt = endpoints[eq.inner]
        osrc, otgt = endpoints[eq.outer]
        if itgt != osrc:
            diags.append(Diagnostic(eq.span.line, eq.span.col,
                                    f"{eq.outer} o {eq.inner} does not compose: "
                                    f"{eq.inner} ends at {itgt}, {eq.outer} starts at {osrc}"))
            bad = True
            continue
        rsrc, rtgt = endpoints[eq.result]
        if (rsrc, rtgt) != (isrc, otgt):
            diags.append(Diagnostic(eq.span.line, eq.span.col,
                                    f"composite of {eq.inner} then {eq.outer} "
                                    f"runs {isrc} -> {otgt}, but {eq.result} "
                                    f"runs {rsrc} -> {rtgt}"))
            bad = True
            continue
        if eq.inner not in by_name:        # inner is an identity
            expected = eq.outer
        elif eq.outer not in by_name:      # outer is an identity
            expected = eq.inner
        else:
            compose[(eq.outer, eq.inner)] = eq.result
            continue
        if eq.result != expected:
            diags.append(Diagnostic(eq.span.line, eq.span.col,
                                    f"identity law forces the composite to be "
                                    f"{expected}, not {eq.result}"))
            bad = True
    if bad:
        return None
    at = d.compose_span or d.span
    try:
        cat = category(list(d.objects), arrows, compose)
    except StructureError as e:
        diags.append(Diagnostic(at.line, at.col, str(e)))
        return None
    report = validate_category(cat)
    if not report.ok:
        for v in report.violations:
            diags.append(Diagnostic(at.line, at.col, str(v)))
        return None
    return cat


def _elab_topology(d: TopologyDecl, cat: FinCategory,
                   diags: list[Diagnostic]) -> Optional[GrothendieckTopology]:
    seeds: dict[str, list[tuple[str, ...]]] = {}
    for cover in d.covers:
        seeds.setdefault(cover.obj, []).append(cover.arrows)
    try:
        return topology_from_sieves(cat, seeds)
    except StructureError as e:
        diags.append(Diagnostic(d.span.line, d.span.col, str(e)))
        return None


def _normalize_matrix(matrix: Sequence[Sequence[int]],
                      codomain: FinModule) -> list[list[int]]:
    out = []
    for i, row in enumerate(matrix):
        if i < len(codomain.orders):
            order = codomain.orders[i]
            out.append([e % order if order else e for e in row])
        else:
            out.append(list(row))
    return out


def _elab_presheaf(d: PresheafDecl, cat: FinCategory, ring: Optional[FinRing],
                   diags: list[Diagnostic]) -> Optional[Presheaf]:
    start = len(diags)
    values_by_key = {v.key: v for v in d.values}
    for obj in cat.objects:
        if obj not in values_by_key:
            diags.append(Diagnostic(d.span.line, d.span.col,
                                    f"no value given for object {obj}"))
    maps_by_key = {m.key: m for m in d.maps}
    for a in cat.arrows:
        if cat.is_identity(a.name) or a.name in maps_by_key:
            continue
        diags.append(Diagnostic(d.span.line, d.span.col,
                                f"no restriction given along {a.name}"))
    if len(diags) > start:
        return None

    if d.flavor == "Set":
        values = {v.key: tuple(v.elements or ()) for v in d.values}
        rests: dict[str, dict] = {}
        for m in d.maps:
            a = cat.arrow_by_name[m.key]
            src, tgt = a.source, a.target
            mapping: dict = {}
            for left, right in m.pairs or ():
                if left not in values[tgt]:
                    diags.append(Diagnostic(
                        m.span.line, m.span.col,
                        f"{left} is not an element of {d.name}({tgt}); the "
                        f"restriction along {m.key} maps {d.name}({tgt}) "
                        f"into {d.name}({src})"))
                    continue
                if right not in values[src]:
                    diags.append(Diagnostic(
                        m.span.line, m.span.col,
                        f"{right} is not an element of {d.name}({src})"))
                    continue
                if left in mapping:
                    diags.append(Diagnostic(m.span.line, m.span.col,
                                            f"{left} is mapped twice"))
                    continue
                mapping[left] = right
            missing = [x for x in values[tgt] if x not in mapping]
            if missing:
                diags.append(Diagnostic(
                    m.span.line, m.span.col,
                    f"restriction along {m.key} misses "
                    f"{', '.join(str(x) for x in missing)}"))
            rests[m.key] = mapping
        if len(diags) > start:
            return None
        try:
            return set_presheaf(cat, values, rests)
        except StructureError as e:
            diags.append(Diagnostic(d.span.line, d.span.col, str(e)))
            return None

    if ring is None:
        diags.append(Diagnostic(d.span.line, d.span.col,
                                "module-valued presheaf needs a ring declaration"))
        return None
    modules: dict[str, FinModule] = {}
    for v in d.values:
        try:
            modules[v.key] = module_make(ring, v.orders or ())
        except StructureError as e:
            diags.append(Diagnostic(v.span.line, v.span.col, str(e)))
    if len(diags) > start:
        return None
    homs: dict[str, ModuleHom] = {}
    for m in d.maps:
        a = cat.arrow_by_name[m.key]
        dom, cod = modules[a.target], modules[a.source]
        try:
            homs[m.key] = hom_make(dom, cod,
                                   _normalize_matrix(m.matrix or (), cod))
        except StructureError as e:
            diags.append(Diagnostic(m.span.line, m.span.col, str(e)))
    if len(diags) > start:
        return None
    try:
        return mod_presheaf(cat, ring, modules, homs)
    except StructureError as e:
        diags.append(Diagnostic(d.span.line, d.span.col, str(e)))
        return None


def _elab_morphism(d: MorphismDecl, src: Presheaf, tgt: Presheaf,
                   diags: list[Diagnostic]) -> Optional[PresheafMorphism]:
    start = len(diags)
    if src.flavor != tgt.flavor:
        diags.append(Diagnostic(d.span.line, d.span.col,
                                f"{d.source} is {src.flavor}-valued but "
                                f"{d.target} is {tgt.flavor}-valued"))
        return None
    if src.base is not tgt.base:
        diags.append(Diagnostic(d.span.line, d.span.col,
                                f"{d.source} and {d.target} live on "
                                "different categories"))
        return None
    cat = src.base
    comp_by_key = {c.key: c for c in d.components}
    for obj in cat.objects:
        if obj not in comp_by_key:
            diags.append(Diagnostic(d.span.line, d.span.col,
                                    f"no component given at {obj}"))
    if len(diags) > start:
        return None
    components: dict[str, object] = {}
    for c in d.components:
        if src.flavor == "set":
            mapping: dict = {}
            for left, right in c.pairs or ():
                if left not in src.value(c.key):
                    diags.append(Diagnostic(
                        c.span.line, c.span.col,
                        f"{left} is not an element of {d.source}({c.key})"))
                    continue
                if right not in tgt.value(c.key):
                    diags.append(Diagnostic(
                        c.span.line, c.span.col,
                        f"{right} is not an element of {d.target}({c.key})"))
                    continue
                mapping[left] = right
            missing = [x for x in src.value(c.key) if x not in mapping]
            if missing:
                diags.append(Diagnostic(
                    c.span.line, c.span.col,
                    f"component at {c.key} misses "
                    f"{', '.join(str(x) for x in missing)}"))
            components[c.key] = mapping
        else:
            dom, cod = src.value(c.key), tgt.value(c.key)
            try:
                components[c.key] = hom_make(
                    dom, cod, _normalize_matrix(c.matrix or (), cod))
            except StructureError as e:
                diags.append(Diagnostic(c.span.line, c.span.col, str(e)))
    if len(diags) > start:
        return None
    try:
        return presheaf_morphism(src, tgt, components, check=True)
    except StructureError as e:
        diags.append(Diagnostic(d.span.line, d.span.col, str(e)))
        return None


def elaborate(doc: SiteDocument) -> Elaborated:
    """Build validated objects from a parsed document.

    Collects one diagnostic per independent failure; declarations whose
    prerequisites failed are skipped rather than double-reported.
    """
    diags: list[Diagnostic] = []
    categories: dict[str, FinCategory] = {}
    topologies: dict[str, GrothendieckTopology] = {}
    topology_base: dict[str, str] = {}
    ring: Optional[FinRing] = None
    presheaves: dict[str, Presheaf] = {}
    presheaf_base: dict[str, str] = {}
    morphisms: dict[str, PresheafMorphism] = {}
    for d in doc.decls:
        if isinstance(d, CategoryDecl):
            cat = _elab_category(d, diags)
            if cat is not None:
                categories[d.name] = cat
        elif isinstance(d, RingDecl):
            ring = ring_make(d.orders)
        elif isinstance(d, TopologyDecl):
            if d.base in categories:
                j = _elab_topology(d, categories[d.base], diags)
                if j is not None:
                    topologies[d.name] = j
                    topology_base[d.name] = d.base
        elif isinstance(d, PresheafDecl):
            if d.base in categories:
                p = _elab_presheaf(d, categories[d.base], ring, diags)
                if p is not None:
                    presheaves[d.name] = p
                    presheaf_base[d.name] = d.base
        elif isinstance(d, MorphismDecl):
            if d.source in presheaves and d.target in presheaves:
                phi = _elab_morphism(d, presheaves[d.source],
                                     presheaves[d.target], diags)
                if phi is not None:
                    morphisms[d.name] = phi
    if diags:
        raise DslError(diags)
    return Elaborated(doc, categories, topologies, topology_base, ring,
                      presheaves, presheaf_base, morphisms)


# -- printing -----------------------------------------------------------------


def _print_category(d: CategoryDecl, out: list[str]) -> None:
    out.append(f"category {d.name} {{")
    out.append(f"  objects: {', '.join(d.objects)};")
    if d.arrows:
        parts = [f"{a.name}: {a.source} -> {a.target}" for a in d.arrows]
        out.append(f"  arrows: {', '.join(parts)};")
    else:
        out.append("  arrows: ;")
    if d.composes:
        parts = [f"{e.outer} o {e.inner} = {e.result}" for e in d.composes]
        out.append(f"  compose: {', '.join(parts)};")
    out.append("}")


def _print_topology(d: TopologyDecl, out: list[str]) -> None:
    out.append(f"topology {d.name} on {d.base} basis {{")
    for cover in d.covers:
        out.append(f"  cover {cover.obj}: [{', '.join(cover.arrows)}];")
    out.append("}")


def _ring_text(orders: Sequence[int]) -> str:
    return " x ".join(f"Z/{n}" for n in orders)


def _print_presheaf(d: PresheafDecl, out: list[str]) -> None:
    out.append(f"presheaf {d.name} : {d.flavor} {{")
    for v in d.values:
        if d.flavor == "Set":
            inner = ", ".join(v.elements or ())
            body = f"{{ {inner} }}" if inner else "{ }"
        else:
            body = f"({', '.join(str(n) for n in v.orders or ())})"
        out.append(f"  {d.name}({v.key}) = {body};")
    for m in d.maps:
        out.append(f"  {d.name}({m.key}) = {_map_text(d.flavor, m)};")
    out.append("}")


def _map_text(flavor: str, m: MapSpec) -> str:
    if flavor == "Set":
        inner = ", ".join(f"{a} -> {b}" for a, b in m.pairs or ())
        return f"{{ {inner} }}" if inner else "{ }"
    rows = ", ".join(
        f"[{', '.join(str(e) for e in row)}]" for row in m.matrix or ())
    return f"[{rows}]"


def _print_morphism(d: MorphismDecl, flavor: str, out: list[str]) -> None:
    out.append(f"morphism {d.name} : {d.source} -> {d.target} {{")
    for c in d.components:
        out.append(f"  {d.name}({c.key}) = {_map_text(flavor, c)};")
    out.append("}")


def print_document(doc: SiteDocument) -> str:
    """Canonical text; parsing it back yields an equal document."""
    out: list[str] = []
    flavors = {d.name: d.flavor for d in doc.decls
               if isinstance(d, PresheafDecl)}
    for d in doc.decls:
        if out:
            out.append("")
        if isinstance(d, CategoryDecl):
            _print_category(d, out)
        elif isinstance(d, TopologyDecl):
            _print_topology(d, out)
        elif isinstance(d, RingDecl):
            out.append(f"ring {_ring_text(d.orders)};")
        elif isinstance(d, PresheafDecl):
            _print_presheaf(d, out)
        elif isinstance(d, MorphismDecl):
            _print_morphism(d, flavors.get(d.source, "Set"), out)
    return "\n".join(out) + "\n"


# -- synthesizing declarations from live objects ------------------------------


def _element_names(p: Presheaf, obj: str) -> dict:
    elems = list(p.value(obj))
    texts = [str(x) for x in elems]
    fine = (len(set(texts)) == len(texts)
            and all(t and t[0] in _IDENT_START
                    and all(c in _IDENT_BODY for c in t) for t in texts))
    if fine:
        return {x: str(x) for x in elems}
    return {x: f"x{k}" for k, x in enumerate(elems)}


def presheaf_decl_from(name: str, p: Presheaf, base: str) -> PresheafDecl:
    """A declaration whose elaboration is isomorphic to ``p``.

    Set-flavored elements that are not printable identifiers are renamed
    ``x0, x1, ...`` per object, in value order.
    """
    zero = Span(0, 0)
    cat = p.base
    values: list[ValueSpec] = []
    maps: list[MapSpec] = []
    if p.flavor == "set":
        names = {obj: _element_names(p, obj) for obj in cat.objects}
        for obj in cat.objects:
            values.append(ValueSpec(
                obj, elements=tuple(names[obj][x] for x in p.value(obj)),
                span=zero))
        for a in cat.arrows:
            if cat.is_identity(a.name):
                continue
            pairs = tuple((names[a.target][x],
                           names[a.source][p.restrict(a.name, x)])
                          for x in p.value(a.target))
            maps.append(MapSpec(a.name, pairs=pairs, span=zero))
        return PresheafDecl(name, "Set", base, tuple(values), tuple(maps), zero)
    for obj in cat.objects:
        values.append(ValueSpec(obj, orders=tuple(p.value(obj).orders),
                                span=zero))
    for a in cat.arrows:
        if cat.is_identity(a.name):
            continue
        maps.append(MapSpec(a.name, matrix=tuple(
            tuple(row) for row in p.restriction(a.name).matrix), span=zero))
    return PresheafDecl(name, "Mod", base, tuple(values), tuple(maps), zero)


def ring_from_text(text: str) -> FinRing:
    """Parse a ring expression such as ``Z/2`` or ``Z/2 x Z/4``."""
    diags: list[Diagnostic] = []
    toks = _tokenize(text, diags)
    p = _Parser(toks, diags)
    try:
        orders = _parse_ring_orders(p)
        if p.peek().kind != "eof":
            p.fail(p.peek(), "trailing input after ring expression")
    except _ParseFail:
        orders = ()
    if diags:
        raise DslError(diags)
    return ring_make(orders)
