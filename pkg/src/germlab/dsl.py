"""Germ description language: parser and resolver.

Line-oriented declarations of polynomial map germs and mixed (conjugate-
aware) germs, together with attached metadata blocks: named set components
given by rational parametrizations, named polynomials, and witness curves
with Laurent expansions in the tube variable t.

    map mfx1 : R^3 -> R^2
    vars x, y, z
    G1 = x*y
    G2 = x*z
    assert_set M {
      (0, s1, s2)
    }

Parsing is recursive descent over a hand-rolled token stream; every error
carries a line and column plus the tokens that would have been accepted.
Resolution turns the syntax into exact objects (RealMapGerm, Parametrization,
CurveFamily) and performs the semantic checks the syntax cannot: declared
variables only, matching arities, vanishing at the origin, conj and i
restricted to mixed declarations, negative powers restricted to t.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from germlab.curves import CurveFamily, LaurentPoly
from germlab.germs import Parametrization, RealMapGerm, realify_mixed
from germlab.mixed import ComplexRational, I, MixedPolynomial, realified_context
from germlab.poly import Polynomial, VarContext

KEYWORDS = {"map", "mixed", "vars", "assert_set", "assert_poly", "witness"}
PUNCT = {":", ",", "^", "+", "-", "*", "/", "(", ")", "{", "}", "="}


class GermParseError(Exception):
    def __init__(self, message: str, line: int, col: int, expected=()):
        self.message = message
        self.line = line
        self.col = col
        self.expected = tuple(expected)
        text = f"line {line}, col {col}: {message}"
        if self.expected:
            text += " (expected " + " or ".join(self.expected) + ")"
        super().__init__(text)


@dataclass(frozen=True)
class Token:
    kind: str  # IDENT, INT, NEWLINE, EOF, or the punctuation itself
    value: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    toks: list[Token] = []
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch == "\n":
            toks.append(Token("NEWLINE", "\\n", line, col))
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "-" and i + 1 < n and text[i + 1] == ">":
            toks.append(Token("->", "->", line, col))
            i += 2
            col += 2
            continue
        if ch in PUNCT:
            toks.append(Token(ch, ch, line, col))
            i += 1
            col += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            toks.append(Token("INT", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            toks.append(Token("IDENT", text[i:j], line, col))
            col += j - i
            i = j
            continue
        raise GermParseError(f"unexpected character {ch!r}", line, col)
    toks.append(Token("NEWLINE", "\\n", line, col))
    toks.append(Token("EOF", "", line, col))
    return toks


# -- syntax trees --------------------------------------------------------
# Expressions are tagged tuples; var/conj/div/pow keep their position for
# semantic errors reported after parsing.


@dataclass(frozen=True)
class SetDecl:
    name: str
    lines: list  # list of list-of-AST (one tuple per component)
    line: int
    col: int


@dataclass(frozen=True)
class WitnessDecl:
    name: str
    stratum: str | None
    gamma: list | None
    coeffs: list | None
    assumptions: tuple[str, ...]
    line: int
    col: int


@dataclass
class RawDecl:
    kind: str  # "map" | "mixed"
    name: str
    source_arity: int
    target_arity: int
    var_names: list[str] | None
    components: list  # (name, ast, line, col)
    sets: dict[str, SetDecl] = field(default_factory=dict)
    polys: dict[str, tuple] = field(default_factory=dict)  # name -> (ast, line, col)
    witnesses: dict[str, WitnessDecl] = field(default_factory=dict)
    line: int = 0
    col: int = 0


class _Parser:
    def __init__(self, toks: list[Token]):
        self.toks = toks
        self.i = 0

    def peek(self) -> Token:
        return self.toks[self.i]

    def advance(self) -> Token:
        t = self.toks[self.i]
        if t.kind != "EOF":
            self.i += 1
        return t

    def fail(self, message: str, expected=()):
        t = self.peek()
        raise GermParseError(message, t.line, t.col, expected)

    def expect(self, kind: str, what: str | None = None) -> Token:
        t = self.peek()
        if t.kind != kind:
            self.fail(f"found {t.value!r}", expected=(what or kind,))
        return self.advance()

    def expect_word(self, word: str) -> Token:
        t = self.peek()
        if t.kind != "IDENT" or t.value != word:
            self.fail(f"found {t.value!r}", expected=(repr(word),))
        return self.advance()

    def at_word(self, word: str) -> bool:
        t = self.peek()
        return t.kind == "IDENT" and t.value == word

    def skip_newlines(self):
        while self.peek().kind == "NEWLINE":
            self.advance()

    def end_line(self):
        t = self.peek()
        if t.kind == "EOF":
            return
        if t.kind != "NEWLINE":
            self.fail(f"found {t.value!r} after a complete line",
                      expected=("end of line",))
        self.skip_newlines()

    # -- expressions ----------------------------------------------------

    def parse_expr(self):
        t = self.peek()
        negate = False
        if t.kind == "-":
            self.advance()
            negate = True
        node = self.parse_term()
        if negate:
            node = ("neg", node)
        while self.peek().kind in ("+", "-"):
            op = self.advance().kind
            rhs = self.parse_term()
            node = ("add" if op == "+" else "sub", node, rhs)
        return node

    def parse_term(self):
        node = self.parse_factor()
        while self.peek().kind in ("*", "/"):
            t = self.advance()
            rhs = self.parse_factor()
            if t.kind == "*":
                node = ("mul", node, rhs)
            else:
                node = ("div", node, rhs, t.line, t.col)
        return node

    def parse_factor(self):
        node = self.parse_base()
        if self.peek().kind == "^":
            caret = self.advance()
            sign = 1
            if self.peek().kind == "-":
                self.advance()
                sign = -1
            k = self.expect("INT", "integer exponent")
            node = ("pow", node, sign * int(k.value), caret.line, caret.col)
        return node

    def parse_base(self):
        t = self.peek()
        if t.kind == "INT":
            self.advance()
            return ("int", Fraction(int(t.value)))
        if t.kind == "(":
            self.advance()
            node = self.parse_expr()
            self.expect(")", "')'")
            return node
        if t.kind == "IDENT":
            if t.value == "conj":
                self.advance()
                self.expect("(", "'('")
                name = self.expect("IDENT", "variable name")
                self.expect(")", "')'")
                return ("conj", name.value, name.line, name.col)
            self.advance()
            return ("var", t.value, t.line, t.col)
        self.fail(f"found {t.value!r}",
                  expected=("number", "variable", "'('", "'conj'"))

    def parse_tuple(self) -> list:
        self.expect("(", "'('")
        items = [self.parse_expr()]
        while self.peek().kind == ",":
            self.advance()
            items.append(self.parse_expr())
        self.expect(")", "')'")
        return items

    # -- declarations ----------------------------------------------------

    def parse_file(self) -> list[RawDecl]:
        decls = []
        self.skip_newlines()
        while self.peek().kind != "EOF":
            decls.append(self.parse_decl())
            self.skip_newlines()
        if not decls:
            self.fail("empty input", expected=("'map'", "'mixed'"))
        return decls

    def parse_decl(self) -> RawDecl:
        t = self.peek()
        if self.at_word("map"):
            return self.parse_header("map")
        if self.at_word("mixed"):
            return self.parse_header("mixed")
        self.fail(f"found {t.value!r}", expected=("'map'", "'mixed'"))

    def parse_header(self, kind: str) -> RawDecl:
        head = self.advance()
        name = self.expect("IDENT", "germ name")
        self.expect(":", "':'")
        space = "R" if kind == "map" else "C"
        self.expect_word(space)
        self.expect("^", "'^'")
        src_tok = self.expect("INT", "source arity")
        src = int(src_tok.value)
        self.expect("->", "'->'")
        self.expect_word(space)
        if kind == "map":
            self.expect("^", "'^'")
            tgt_tok = self.expect("INT", "target arity")
            tgt = int(tgt_tok.value)
        else:
            tgt_tok = src_tok
            tgt = 1
        limit = 10 if kind == "map" else 5
        if not 1 <= src <= limit:
            raise GermParseError(f"source arity {src} out of range 1..{limit}",
                                 src_tok.line, src_tok.col)
        if kind == "map" and not 1 <= tgt <= src:
            raise GermParseError(
                f"target arity {tgt} must lie in 1..{src}",
                tgt_tok.line, tgt_tok.col)
        self.end_line()

        decl = RawDecl(kind=kind, name=name.value, source_arity=src,
                       target_arity=tgt, var_names=None, components=[],
                       line=head.line, col=head.col)

        if self.at_word("vars"):
            self.advance()
            names = [self.expect("IDENT", "variable name")]
            while self.peek().kind == ",":
                self.advance()
                names.append(self.expect("IDENT", "variable name"))
            decl.var_names = [t.value for t in names]
            for t in names:
                if decl.var_names.count(t.value) > 1:
                    raise GermParseError(
                        f"duplicate variable {t.value!r}", t.line, t.col)
                if kind == "mixed" and t.value == "i":
                    raise GermParseError(
                        "'i' is the imaginary unit in a mixed declaration",
                        t.line, t.col)
            if len(decl.var_names) != src:
                raise GermParseError(
                    f"{len(decl.var_names)} variables declared for source arity {src}",
                    names[0].line, names[0].col)
            self.end_line()

        while True:
            t = self.peek()
            if t.kind == "IDENT" and t.value not in KEYWORDS:
                nxt = self.toks[self.i + 1]
                if nxt.kind != "=":
                    break
                cname = self.advance()
                self.advance()  # '='
                ast = self.parse_expr()
                if any(c[0] == cname.value for c in decl.components):
                    raise GermParseError(
                        f"duplicate component {cname.value!r}",
                        cname.line, cname.col)
                decl.components.append((cname.value, ast, cname.line, cname.col))
                self.end_line()
                continue
            if self.at_word("assert_set"):
                s = self.parse_assert_set()
                if s.name in decl.sets:
                    raise GermParseError(
                        f"duplicate set {s.name!r}", s.line, s.col)
                decl.sets[s.name] = s
                continue
            if self.at_word("assert_poly"):
                self.parse_assert_poly(decl)
                continue
            if self.at_word("witness"):
                w = self.parse_witness()
                if w.name in decl.witnesses:
                    raise GermParseError(
                        f"duplicate witness {w.name!r}", w.line, w.col)
                decl.witnesses[w.name] = w
                continue
            break

        if not decl.components:
            self.fail("declaration has no components",
                      expected=("component line",))
        if len(decl.components) != (tgt if kind == "map" else 1):
            want = tgt if kind == "map" else 1
            raise GermParseError(
                f"{len(decl.components)} components for target arity {want}",
                decl.components[-1][2], decl.components[-1][3])
        return decl

    def parse_assert_set(self) -> SetDecl:
        head = self.advance()
        name = self.expect("IDENT", "set name")
        self.expect("{", "'{'")
        self.skip_newlines()
        lines = []
        while self.peek().kind == "(":
            lines.append(self.parse_tuple())
            self.end_line()
        self.expect("}", "'}'")
        self.end_line()
        if not lines:
            raise GermParseError("assert_set block is empty",
                                 head.line, head.col)
        return SetDecl(name=name.value, lines=lines,
                       line=head.line, col=head.col)

    def parse_assert_poly(self, decl: RawDecl):
        head = self.advance()
        name = self.expect("IDENT", "polynomial name")
        if name.value in decl.polys:
            raise GermParseError(f"duplicate assert_poly {name.value!r}",
                                 name.line, name.col)
        self.expect("{", "'{'")
        self.skip_newlines()
        ast = self.parse_expr()
        self.end_line()
        self.expect("}", "'}'")
        self.end_line()
        decl.polys[name.value] = (ast, head.line, head.col)

    def parse_witness(self) -> WitnessDecl:
        head = self.advance()
        name = self.expect("IDENT", "witness name")
        self.expect("{", "'{'")
        self.skip_newlines()
        stratum = None
        gamma = None
        coeffs = None
        assumptions: list[str] = []
        while self.peek().kind == "IDENT":
            word = self.advance()
            if word.value == "stratum":
                stratum = self.expect("IDENT", "set name").value
            elif word.value == "gamma":
                gamma = self.parse_tuple()
            elif word.value == "c":
                coeffs = self.parse_tuple()
            elif word.value == "assume":
                assumptions.append(self.expect("IDENT", "assumption name").value)
            else:
                raise GermParseError(
                    f"found {word.value!r}", word.line, word.col,
                    expected=("'stratum'", "'gamma'", "'c'", "'assume'"))
            self.end_line()
        self.expect("}", "'}'")
        self.end_line()
        if gamma is None:
            raise GermParseError("witness block needs a gamma line",
                                 head.line, head.col)
        return WitnessDecl(name=name.value, stratum=stratum, gamma=gamma,
                           coeffs=coeffs, assumptions=tuple(assumptions),
                           line=head.line, col=head.col)


# -- semantic evaluation -------------------------------------------------


def _collect_vars(node, out: list[str]):
    tag = node[0]
    if tag == "var":
        if node[1] not in out:
            out.append(node[1])
    elif tag in ("neg",):
        _collect_vars(node[1], out)
    elif tag in ("add", "sub", "mul"):
        _collect_vars(node[1], out)
        _collect_vars(node[2], out)
    elif tag == "div":
        _collect_vars(node[1], out)
        _collect_vars(node[2], out)
    elif tag == "pow":
        _collect_vars(node[1], out)


def eval_expr(node, alg):
    tag = node[0]
    if tag == "int":
        return alg.const(node[1])
    if tag == "var":
        return alg.var(node[1], node[2], node[3])
    if tag == "conj":
        return alg.conj(node[1], node[2], node[3])
    if tag == "neg":
        return -eval_expr(node[1], alg)
    if tag == "add":
        return eval_expr(node[1], alg) + eval_expr(node[2], alg)
    if tag == "sub":
        return eval_expr(node[1], alg) - eval_expr(node[2], alg)
    if tag == "mul":
        return eval_expr(node[1], alg) * eval_expr(node[2], alg)
    if tag == "div":
        a = eval_expr(node[1], alg)
        b = eval_expr(node[2], alg)
        return alg.div(a, b, node[3], node[4])
    if tag == "pow":
        return alg.pow(eval_expr(node[1], alg), node[2], node[3], node[4])
    raise AssertionError(f"unknown node {tag}")


class _RealAlgebra:
    """Polynomial values over a fixed real context."""

    def __init__(self, ctx: VarContext):
        self.ctx = ctx

    def const(self, c):
        return self.ctx.const(c)

    def var(self, name, line, col):
        if name not in self.ctx.names:
            raise GermParseError(f"undeclared variable {name!r}", line, col)
        return self.ctx.var(name)

    def conj(self, name, line, col):
        raise GermParseError(
            "conj() is only available in mixed declarations", line, col)

    def div(self, a, b, line, col):
        if not (isinstance(b, Polynomial) and b.is_constant()):
            raise GermParseError(
                "division is only defined by nonzero constants here", line, col)
        c = b.constant_value()
        if c == 0:
            raise GermParseError("division by zero", line, col)
        return a * (Fraction(1) / c)

    def pow(self, v, k, line, col):
        if k < 0:
            raise GermParseError(
                "negative powers are only allowed on the tube variable t",
                line, col)
        return v**k


class _MixedAlgebra:
    """MixedPolynomial values; i and conj are live here."""

    def __init__(self, ctx: VarContext):
        self.ctx = ctx

    def const(self, c):
        return MixedPolynomial.const(self.ctx, c)

    def var(self, name, line, col):
        if name == "i":
            return MixedPolynomial.const(self.ctx, I)
        if name not in self.ctx.names:
            raise GermParseError(f"undeclared variable {name!r}", line, col)
        return MixedPolynomial.var(self.ctx, name)

    def conj(self, name, line, col):
        if name not in self.ctx.names:
            raise GermParseError(f"undeclared variable {name!r}", line, col)
        return MixedPolynomial.conj_var(self.ctx, name)

    def div(self, a, b, line, col):
        if not (isinstance(b, MixedPolynomial) and len(b.terms) <= 1):
            raise GermParseError(
                "division is only defined by nonzero constants here", line, col)
        zero = (0,) * self.ctx.arity
        c = b.terms.get((zero, zero))
        if c is None or not c:
            raise GermParseError(
                "division is only defined by nonzero constants here", line, col)
        norm = c.re * c.re + c.im * c.im
        inv = ComplexRational(c.re / norm, -c.im / norm)
        return a * inv

    def pow(self, v, k, line, col):
        if k < 0:
            raise GermParseError(
                "negative powers are only allowed on the tube variable t",
                line, col)
        return v**k


class _RationalAlgebra:
    """(numerator, denominator) pairs over a parameter context."""

    def __init__(self, ctx: VarContext):
        self.ctx = ctx

    def const(self, c):
        return _Rat(self.ctx.const(c), self.ctx.one())

    def var(self, name, line, col):
        return _Rat(self.ctx.var(name), self.ctx.one())

    def conj(self, name, line, col):
        raise GermParseError(
            "conj() is only available in mixed declarations", line, col)

    def div(self, a, b, line, col):
        if b.num.is_zero():
            raise GermParseError(
                "division by an identically zero expression", line, col)
        return _Rat(a.num * b.den, a.den * b.num)

    def pow(self, v, k, line, col):
        if k < 0:
            raise GermParseError(
                "negative powers are only allowed on the tube variable t",
                line, col)
        return _Rat(v.num**k, v.den**k)


@dataclass(frozen=True)
class _Rat:
    num: Polynomial
    den: Polynomial

    def __add__(self, other):
        return _Rat(self.num * other.den + other.num * self.den,
                    self.den * other.den)

    def __sub__(self, other):
        return _Rat(self.num * other.den - other.num * self.den,
                    self.den * other.den)

    def __mul__(self, other):
        return _Rat(self.num * other.num, self.den * other.den)

    def __neg__(self):
        return _Rat(-self.num, self.den)


class _LaurentAlgebra:
    """LaurentPoly values; the reserved name t is the tube variable."""

    def __init__(self, ctx: VarContext):
        self.ctx = ctx

    def const(self, c):
        return LaurentPoly.const(self.ctx, c)

    def var(self, name, line, col):
        if name == "t":
            return LaurentPoly.t_power(self.ctx, 1)
        return LaurentPoly.from_poly(self.ctx.var(name))

    def conj(self, name, line, col):
        raise GermParseError(
            "conj() is only available in mixed declarations", line, col)

    def div(self, a, b, line, col):
        parts = b.parts
        if len(parts) != 1 or 0 not in parts or not parts[0].is_constant():
            raise GermParseError(
                "division is only defined by nonzero constants here", line, col)
        c = parts[0].constant_value()
        return a * LaurentPoly.const(self.ctx, Fraction(1) / c)

    def pow(self, v, k, line, col):
        if k < 0:
            ok = len(v.parts) == 1 and next(iter(v.parts.values())).is_constant()
            if not ok:
                raise GermParseError(
                    "negative powers require a constant multiple of a power of t",
                    line, col)
        return v**k


# -- resolved declarations -----------------------------------------------


@dataclass(frozen=True)
class WitnessSpec:
    name: str
    gamma: CurveFamily
    coeffs: tuple[LaurentPoly, ...] | None
    stratum: Parametrization | None
    assumptions: frozenset[str]


@dataclass(frozen=True)
class ResolvedMapGerm:
    kind = "map"
    name: str
    germ: RealMapGerm
    component_names: tuple[str, ...]
    sets: dict[str, list[Parametrization]]
    polys: dict[str, Polynomial]
    witnesses: dict[str, WitnessSpec]

    @property
    def ctx(self) -> VarContext:
        return self.germ.ctx

    def canonical_text(self) -> str:
        m, p = self.germ.source_arity, self.germ.target_arity
        out = [f"map {self.name} : R^{m} -> R^{p}",
               "vars " + ", ".join(self.ctx.names)]
        for cname, comp in zip(self.component_names, self.germ.components):
            out.append(f"{cname} = {comp.text()}")
        return "\n".join(out)


@dataclass(frozen=True)
class ResolvedMixedGerm:
    kind = "mixed"
    name: str
    ctx: VarContext  # complex variable names
    component_name: str
    poly: MixedPolynomial
    realified: RealMapGerm
    sets: dict[str, list[Parametrization]]
    polys: dict[str, Polynomial]

    def canonical_text(self) -> str:
        out = [f"mixed {self.name} : C^{self.ctx.arity} -> C",
               "vars " + ", ".join(self.ctx.names),
               f"{self.component_name} = {self.poly.text()}"]
        return "\n".join(out)


@dataclass(frozen=True)
class GermFile:
    decls: tuple
    by_name: dict[str, object]

    def single(self, name: str | None = None):
        if name is not None:
            if name not in self.by_name:
                known = ", ".join(sorted(self.by_name))
                raise GermlabUsage(f"no germ named {name!r} (file has: {known})")
            return self.by_name[name]
        if len(self.decls) > 1:
            known = ", ".join(d.name for d in self.decls)
            raise GermlabUsage(
                f"file declares several germs ({known}); pick one with --germ")
        return self.decls[0]


class GermlabUsage(Exception):
    """Bad invocation: missing names, wrong modes.  Exit code 2 territory."""


def _params_of(lines_asts: list, exclude=()) -> list[str]:
    names: list[str] = []
    for ast in lines_asts:
        _collect_vars(ast, names)
    return [n for n in names if n not in exclude]


def _resolve_set(decl_name: str, sd: SetDecl, target: VarContext) -> list[Parametrization]:
    comps = []
    for idx, tup in enumerate(sd.lines):
        if len(tup) != target.arity:
            raise GermParseError(
                f"set {sd.name!r} line {idx + 1} has {len(tup)} entries "
                f"for {target.arity} variables", sd.line, sd.col)
        pnames = _params_of(tup)
        clash = [n for n in pnames if n in target.names]
        if clash:
            raise GermParseError(
                f"set {sd.name!r} reuses germ variable {clash[0]!r} as a parameter",
                sd.line, sd.col)
        ctx = VarContext(pnames if pnames else ["s0"])
        alg = _RationalAlgebra(ctx)
        nums, dens = [], []
        for ast in tup:
            r = eval_expr(ast, alg)
            nums.append(r.num)
            dens.append(r.den)
        comps.append(Parametrization(
            target=target, params=ctx,
            numerators=tuple(nums), denominators=tuple(dens),
            name=f"{sd.name}[{idx}]"))
    return comps


def _resolve_witness(wd: WitnessDecl, target: VarContext,
                     sets: dict[str, list[Parametrization]],
                     target_arity: int) -> WitnessSpec:
    stratum = None
    stratum_params: list[str] = []
    if wd.stratum is not None:
        if wd.stratum not in sets:
            raise GermParseError(
                f"witness {wd.name!r} references unknown set {wd.stratum!r}",
                wd.line, wd.col)
        comps = sets[wd.stratum]
        if len(comps) != 1:
            raise GermParseError(
                f"stratum set {wd.stratum!r} must have exactly one component",
                wd.line, wd.col)
        stratum = comps[0]
        stratum_params = list(stratum.params.names)

    if len(wd.gamma) != target.arity:
        raise GermParseError(
            f"gamma has {len(wd.gamma)} coordinates for {target.arity} variables",
            wd.line, wd.col)
    if wd.coeffs is not None and len(wd.coeffs) != target_arity:
        raise GermParseError(
            f"c has {len(wd.coeffs)} entries for {target_arity} components",
            wd.line, wd.col)

    inferred = _params_of(wd.gamma + (wd.coeffs or []), exclude=("t",))
    clash = [n for n in inferred if n in target.names]
    if clash:
        raise GermParseError(
            f"witness {wd.name!r} reuses germ variable {clash[0]!r} as a parameter",
            wd.line, wd.col)
    names = stratum_params + [n for n in inferred if n not in stratum_params]
    ctx = VarContext(names if names else ["s0"])
    alg = _LaurentAlgebra(ctx)
    gamma = CurveFamily(
        target=target, params=ctx,
        coords=tuple(eval_expr(ast, alg) for ast in wd.gamma))
    coeffs = None
    if wd.coeffs is not None:
        coeffs = tuple(eval_expr(ast, alg) for ast in wd.coeffs)
    if stratum is not None and stratum.params.names != ctx.names:
        # Re-express the stratum over the witness's joint parameter context.
        stratum = Parametrization(
            target=stratum.target, params=ctx,
            numerators=tuple(p.lift(ctx) for p in stratum.numerators),
            denominators=tuple(p.lift(ctx) for p in stratum.denominators),
            name=stratum.name)
    return WitnessSpec(name=wd.name, gamma=gamma, coeffs=coeffs,
                       stratum=stratum, assumptions=frozenset(wd.assumptions))


def resolve(decl: RawDecl):
    if decl.var_names is None:
        prefix = "x" if decl.kind == "map" else "z"
        decl.var_names = [f"{prefix}{i + 1}" for i in range(decl.source_arity)]
        if decl.kind == "mixed" and "i" in decl.var_names:
            raise GermParseError("'i' cannot be a default variable name",
                                 decl.line, decl.col)

    if decl.kind == "map":
        ctx = VarContext(decl.var_names)
        alg = _RealAlgebra(ctx)
        comps, cnames = [], []
        for cname, ast, line, col in decl.components:
            p = eval_expr(ast, alg)
            if not isinstance(p, Polynomial):
                p = ctx.const(p)
            zero = (Fraction(0),) * ctx.arity
            if p.evaluate(zero) != 0:
                raise GermParseError(
                    f"component {cname!r} does not vanish at the origin",
                    line, col)
            comps.append(p)
            cnames.append(cname)
        germ = RealMapGerm(ctx=ctx, components=tuple(comps), name=decl.name)
        sets = {n: _resolve_set(decl.name, sd, ctx) for n, sd in decl.sets.items()}
        polys = {}
        for pname, (ast, line, col) in decl.polys.items():
            polys[pname] = eval_expr(ast, alg)
        witnesses = {
            n: _resolve_witness(wd, ctx, sets, germ.target_arity)
            for n, wd in decl.witnesses.items()
        }
        return ResolvedMapGerm(name=decl.name, germ=germ,
                               component_names=tuple(cnames), sets=sets,
                               polys=polys, witnesses=witnesses)

    ctx = VarContext(decl.var_names)
    alg = _MixedAlgebra(ctx)
    (cname, ast, line, col), = decl.components
    f = eval_expr(ast, alg)
    if not isinstance(f, MixedPolynomial):
        f = MixedPolynomial.const(ctx, f)
    zero_key = ((0,) * ctx.arity, (0,) * ctx.arity)
    if zero_key in f.terms:
        raise GermParseError(
            f"component {cname!r} does not vanish at the origin", line, col)
    realified = realify_mixed([f], name=decl.name)
    rctx = realified.ctx
    ralg = _RealAlgebra(rctx)
    sets = {n: _resolve_set(decl.name, sd, rctx) for n, sd in decl.sets.items()}
    polys = {}
    for pname, (past, pline, pcol) in decl.polys.items():
        polys[pname] = eval_expr(past, ralg)
    if decl.witnesses:
        wd = next(iter(decl.witnesses.values()))
        raise GermParseError(
            "witness blocks attach to map declarations; realify first",
            wd.line, wd.col)
    return ResolvedMixedGerm(name=decl.name, ctx=ctx, component_name=cname,
                             poly=f, realified=realified, sets=sets,
                             polys=polys)


def parse_text(text: str) -> GermFile:
    decls = _Parser(tokenize(text)).parse_file()
    resolved = []
    seen = {}
    for d in decls:
        if d.name in seen:
            raise GermParseError(f"duplicate germ name {d.name!r}",
                                 d.line, d.col)
        r = resolve(d)
        seen[d.name] = r
        resolved.append(r)
    return GermFile(decls=tuple(resolved), by_name=seen)


def parse_path(path) -> GermFile:
    from pathlib import Path

    return parse_text(Path(path).read_text())


def parse_mixed_expr(text: str, ctx: VarContext) -> MixedPolynomial:
    """One mixed-polynomial expression over the given complex variables."""
    parser = _Parser(tokenize(text))
    parser.skip_newlines()
    ast = parser.parse_expr()
    parser.skip_newlines()
    tail = parser.peek()
    if tail.kind != "EOF":
        raise GermParseError(f"found {tail.value!r} after the expression",
                             tail.line, tail.col)
    return eval_expr(ast, _MixedAlgebra(ctx))
