"""Concrete syntax for terms, specifications, source files and modal formulas.

Grammar (terms)::

    term   := sum
    sum    := par ("+" par)*
    par    := prefix ("||{" acts "}" prefix)*
    prefix := action "." prefix | atom
    atom   := "0" | ident | "(" term ")"
            | "hide{" acts "}(" term ")"
            | "rename{" a->b ("," a->b)* "}(" term ")"
            | "theta{" acts "}{" acts "}(" term ")"
            | "psi{" acts "}(" term ")"
            | "<" ident "|" ident ">"            -- call into a named spec
            | "<" ident "|" "{" eqs "}" ">"      -- call with inline equations
    action := "tau" | "t" | ident
    acts   := (ident ("," ident)*)?

Spec files are ``ident = term`` lines with ``#`` comments.  Rendering is the
inverse: ``parse(render(x))`` is structurally equal to ``x``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from . import modal as _modal
from .errors import DuplicateEquation, ParseError, UnboundReference, ValidityError
from .terms import (NIL, RESERVED_NAMES, Choice, Hide, Nil, Par, Prefix, Psi,
                    RecCall, RecSpec, Rename, Term, Theta, Var, is_valid,
                    is_visible, spec)

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<arrow>->)
  | (?P<parpar>\|\|)
  | (?P<ident>[A-Za-z][A-Za-z0-9_]*)
  | (?P<sym>[0-9().{},<>|+=;\[\]!&^~])
""", re.VERBOSE)


@dataclass
class _Tok:
    kind: str   # 'ident', 'sym', 'arrow', 'parpar', 'eof'
    text: str
    line: int
    col: int


def _tokenize(text: str) -> List[_Tok]:
    toks = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        chunk = m.group(0)
        if m.lastgroup != "ws":
            toks.append(_Tok(m.lastgroup, chunk, line, col))
        nl = chunk.count("\n")
        if nl:
            line += nl
            col = len(chunk) - chunk.rfind("\n")
        else:
            col += len(chunk)
        pos = m.end()
    toks.append(_Tok("eof", "", line, col))
    return toks


class _Parser:
    def __init__(self, text: str, specs: Optional[Dict[str, RecSpec]] = None):
        self.toks = _tokenize(text)
        self.pos = 0
        self.specs = specs or {}

    # -- token plumbing ----------------------------------------------------
    def peek(self, ahead=0) -> _Tok:
        return self.toks[min(self.pos + ahead, len(self.toks) - 1)]

    def next(self) -> _Tok:
        tok = self.toks[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def expect(self, text: str) -> _Tok:
        tok = self.next()
        if tok.text != text:
            raise ParseError(f"found {tok.text or 'end of input'!r}",
                             tok.line, tok.col, expected=repr(text))
        return tok

    def expect_ident(self) -> _Tok:
        tok = self.next()
        if tok.kind != "ident":
            raise ParseError(f"found {tok.text or 'end of input'!r}",
                             tok.line, tok.col, expected="an identifier")
        return tok

    def at_end(self) -> bool:
        return self.peek().kind == "eof"

    # -- terms ---------------------------------------------------------
    def term(self) -> Term:
        out = self.par()
        while self.peek().text == "+":
            self.next()
            out = Choice(out, self.par())
        return out

    def par(self) -> Term:
        out = self.prefix()
        while self.peek().kind == "parpar":
            self.next()
            self.expect("{")
            acts = self.acts()
            self.expect("}")
            out = Par(acts, out, self.prefix())
        return out

    def prefix(self) -> Term:
        tok = self.peek()
        if tok.kind == "ident" and self.peek(1).text == ".":
            action = self.next().text
            self.next()
            return Prefix(action, self.prefix())
        return self.atom()

    def atom(self) -> Term:
        tok = self.peek()
        if tok.text == "0":
            self.next()
            return NIL
        if tok.text == "(":
            self.next()
            out = self.term()
            self.expect(")")
            return out
        if tok.text == "<":
            return self.rec_call()
        if tok.kind == "ident":
            if tok.text == "hide":
                self.next()
                self.expect("{")
                acts = self.acts()
                self.expect("}")
                return Hide(acts, self.parenthesised())
            if tok.text == "rename":
                self.next()
                self.expect("{")
                pairs = self.renpairs()
                self.expect("}")
                return Rename(pairs, self.parenthesised())
            if tok.text == "theta":
                self.next()
                self.expect("{")
                low = self.acts()
                self.expect("}")
                self.expect("{")
                high = self.acts()
                self.expect("}")
                try:
                    return Theta(low, high, self.parenthesised())
                except ValueError as exc:
                    raise ParseError(str(exc), tok.line, tok.col)
            if tok.text == "psi":
                self.next()
                self.expect("{")
                acts = self.acts()
                self.expect("}")
                return Psi(acts, self.parenthesised())
            self.next()
            return Var(tok.text)
        raise ParseError(f"found {tok.text or 'end of input'!r}",
                         tok.line, tok.col, expected="a term")

    def parenthesised(self) -> Term:
        self.expect("(")
        out = self.term()
        self.expect(")")
        return out

    def rec_call(self) -> Term:
        opening = self.expect("<")
        var = self.expect_ident().text
        self.expect("|")
        if self.peek().text == "{":
            self.next()
            sp = self.equations(stop="}")
            self.expect("}")
        else:
            name = self.expect_ident()
            if name.text not in self.specs:
                raise UnboundReference(f"unknown specification {name.text!r}",
                                       name.line, name.col)
            sp = self.specs[name.text]
        self.expect(">")
        if var not in sp.vars:
            raise UnboundReference(f"{var!r} is not bound by the specification",
                                   opening.line, opening.col)
        return RecCall(var, sp)

    def equations(self, stop: str) -> RecSpec:
        eqs: List[Tuple[str, Term]] = []
        seen = set()
        while self.peek().text != stop:
            name = self.expect_ident()
            if name.text in seen:
                raise DuplicateEquation(f"duplicate equation for {name.text!r}",
                                        name.line, name.col)
            seen.add(name.text)
            self.expect("=")
            eqs.append((name.text, self.term()))
            if self.peek().text == ";":
                self.next()
        if not eqs:
            tok = self.peek()
            raise ParseError("empty specification", tok.line, tok.col)
        return spec(eqs)

    def acts(self) -> frozenset:
        names = []
        if self.peek().kind == "ident":
            names.append(self.expect_ident().text)
            while self.peek().text == ",":
                self.next()
                names.append(self.expect_ident().text)
        for n in names:
            if not is_visible(n):
                tok = self.peek()
                raise ParseError(f"{n!r} cannot occur in an action set",
                                 tok.line, tok.col)
        return frozenset(names)

    def renpairs(self) -> frozenset:
        pairs = []
        while self.peek().kind == "ident":
            a = self.expect_ident().text
            self.expect("->")
            b = self.expect_ident().text
            pairs.append((a, b))
            if self.peek().text != ",":
                break
            self.next()
        return frozenset(pairs)

    # -- formulas ------------------------------------------------------
    def formula(self) -> _modal.Formula:
        out = self.formula_unary()
        while self.peek().text == "<" and self.peek(1).text == "eps_":
            self.next()
            self.next()
            self.expect("{")
            acts = self.acts()
            self.expect("}")
            self.expect(">")
            out = _modal.EpsX(out, acts, self.formula_unary())
        return out

    def formula_unary(self) -> _modal.Formula:
        tok = self.peek()
        if tok.text == "T":
            self.next()
            return _modal.Top()
        if tok.text == "stable":
            self.next()
            return _modal.Stable()
        if tok.text == "!":
            self.next()
            return _modal.Not(self.formula_unary())
        if tok.text == "&":
            self.next()
            self.expect("(")
            parts = [self.formula()]
            while self.peek().text == ",":
                self.next()
                parts.append(self.formula())
            self.expect(")")
            return _modal.And(tuple(parts))
        if tok.text == "(":
            self.next()
            out = self.formula()
            self.expect(")")
            return out
        if tok.text == "[":
            self.next()
            self.expect("{")
            acts = self.acts()
            self.expect("}")
            self.expect("]")
            body = self.formula_unary()
            if isinstance(body, _modal.Diamond) and body.action == "t":
                return _modal.TimeoutDiamond(acts, body.sub)
            return _modal.EnvBox(acts, body)
        if tok.text == "<":
            self.next()
            action = self.expect_ident().text
            if self.peek().text == "^":
                self.next()
                self.expect(">")
                return _modal.HatDiamond(action, self.formula_unary())
            self.expect(">")
            return _modal.Diamond(action, self.formula_unary())
        if tok.text == "eps":
            self.next()
            self.expect("(")
            left = self.formula()
            if self.peek().text == ")":
                self.next()
                return _modal.Eps(left)
            self.expect("<")
            action = self.expect_ident().text
            self.expect("^")
            self.expect(">")
            right = self.formula()
            self.expect(")")
            return _modal.EpsStep(left, action, right)
        raise ParseError(f"found {tok.text or 'end of input'!r}",
                         tok.line, tok.col, expected="a formula")


# ---------------------------------------------------------------------------
# Entry points


def parse_term(text: str, specs: Optional[Dict[str, RecSpec]] = None,
               require_valid: bool = True) -> Term:
    p = _Parser(text, specs)
    out = p.term()
    if not p.at_end():
        tok = p.peek()
        raise ParseError(f"trailing input {tok.text!r}", tok.line, tok.col)
    if require_valid and not is_valid(out):
        raise ValidityError(f"invalid expression: {text.strip()!r}")
    return out


def _strip_comments(text: str) -> str:
    return "\n".join(line.split("#", 1)[0] for line in text.splitlines())


def parse_spec(text: str, specs: Optional[Dict[str, RecSpec]] = None) -> RecSpec:
    """One ``name = term`` equation per line; mutual references allowed."""
    p = _Parser(_strip_comments(text), specs)
    sp = p.equations(stop="")
    if not p.at_end():
        tok = p.peek()
        raise ParseError(f"trailing input {tok.text!r}", tok.line, tok.col)
    return sp


def parse_formula(text: str) -> "_modal.Formula":
    p = _Parser(text)
    out = p.formula()
    if not p.at_end():
        tok = p.peek()
        raise ParseError(f"trailing input {tok.text!r}", tok.line, tok.col)
    return out


@dataclass
class SourceFile:
    """A parsed process file: optional alphabet pragma, named specs, one root term."""

    alphabet: frozenset
    specs: Dict[str, RecSpec]
    root: Term


def parse_source(text: str, open_terms: bool = False) -> SourceFile:
    """Parse a process file.

    The file may declare ``alphabet a, b``, any number of ``spec NAME`` blocks
    of ``var = term`` lines, and one ``root TERM``.  A file whose entire
    content is a single term expression is also accepted.
    """
    stripped = _strip_comments(text)
    lines = stripped.splitlines()
    keywords = ("alphabet", "spec", "root", "endspec")
    if not any(line.strip().split(" ", 1)[0] in keywords for line in lines if line.strip()):
        root = parse_term(stripped)
        return SourceFile(frozenset(), {}, root)

    alphabet_extra: frozenset = frozenset()
    specs: Dict[str, RecSpec] = {}
    root: Optional[Term] = None
    current_name: Optional[str] = None
    current_eqs: List[str] = []

    def close_block():
        nonlocal current_name, current_eqs
        if current_name is not None:
            specs[current_name] = parse_spec("\n".join(current_eqs), specs)
            current_name, current_eqs = None, []

    for lineno, line in enumerate(lines, start=1):
        body = line.strip()
        if not body:
            continue
        head = body.split(" ", 1)[0]
        if head == "alphabet":
            close_block()
            rest = body[len("alphabet"):].strip()
            names = [n.strip() for n in rest.split(",") if n.strip()]
            alphabet_extra |= frozenset(names)
        elif head == "spec":
            close_block()
            current_name = body[len("spec"):].strip()
            if not current_name:
                raise ParseError("spec block needs a name", lineno, 1)
            if current_name in specs:
                raise DuplicateEquation(f"specification {current_name!r} redefined",
                                        lineno, 1)
        elif head == "endspec":
            close_block()
        elif head == "root":
            close_block()
            if root is not None:
                raise ParseError("more than one root term", lineno, 1)
            root = parse_term(body[len("root"):], specs, require_valid=False)
        elif current_name is not None:
            current_eqs.append(body)
        else:
            raise ParseError(f"stray line {body!r}", lineno, 1)
    close_block()
    if root is None:
        raise ParseError("no root term", len(lines), 1)
    if not is_valid(root):
        raise ValidityError("root term is invalid")
    from .terms import free_vars
    if not open_terms and free_vars(root):
        raise ValidityError(f"root term has free variables {sorted(free_vars(root))}")
    return SourceFile(alphabet_extra, specs, root)


# ---------------------------------------------------------------------------
# Rendering

_SUM, _PAR, _PREFIX = 0, 1, 2


def render(x) -> str:
    """Deterministic pretty-printer; parse(render(x)) == x."""
    if isinstance(x, Term):
        return _render_term(x, _SUM, {})
    if isinstance(x, RecSpec):
        names = _spec_display_names(x, {})
        return "\n".join(f"{names.get(n, n)} = {_render_term(b, _SUM, names)}"
                         for n, b in x.equations)
    if isinstance(x, _modal.Formula):
        return _render_formula(x, top=True)
    raise TypeError(f"cannot render {x!r}")


def _acts(names) -> str:
    return ",".join(sorted(names))


def _render_term(t: Term, level: int, names: Dict[str, str]) -> str:
    if isinstance(t, Nil):
        return "0"
    if isinstance(t, Var):
        return names.get(t.name, t.name)
    if isinstance(t, Prefix):
        return f"{t.action}.{_render_term(t.body, _PREFIX, names)}"
    if isinstance(t, Choice):
        body = (f"{_render_term(t.left, _SUM, names)} + "
                f"{_render_term(t.right, _PAR, names)}")
        return f"({body})" if level > _SUM else body
    if isinstance(t, Par):
        body = (f"{_render_term(t.left, _PAR, names)} ||{{{_acts(t.sync)}}} "
                f"{_render_term(t.right, _PREFIX, names)}")
        return f"({body})" if level > _PAR else body
    if isinstance(t, Hide):
        return f"hide{{{_acts(t.hidden)}}}({_render_term(t.body, _SUM, names)})"
    if isinstance(t, Rename):
        pairs = ",".join(f"{a}->{b}" for a, b in sorted(t.pairs))
        return f"rename{{{pairs}}}({_render_term(t.body, _SUM, names)})"
    if isinstance(t, Theta):
        return (f"theta{{{_acts(t.low)}}}{{{_acts(t.high)}}}"
                f"({_render_term(t.body, _SUM, names)})")
    if isinstance(t, Psi):
        return f"psi{{{_acts(t.allowed)}}}({_render_term(t.body, _SUM, names)})"
    if isinstance(t, RecCall):
        inner = _spec_display_names(t.spec, names)
        eqs = "; ".join(f"{inner.get(n, n)} = {_render_term(b, _SUM, inner)}"
                        for n, b in t.spec.equations)
        return f"<{inner.get(t.var, t.var)}|{{{eqs}}}>"
    raise TypeError(f"not a term: {t!r}")


_IDENT_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")


def _spec_display_names(sp: RecSpec, outer: Dict[str, str]) -> Dict[str, str]:
    """Choose printable names for bound variables freshened during substitution."""
    names = dict(outer)
    taken = set(outer.values())
    for n, body in sp.equations:
        taken |= {v for v in _all_var_names(body) if v not in sp.vars}
    for n, _ in sp.equations:
        if _IDENT_RE.match(n) and n not in taken:
            names[n] = n
            taken.add(n)
            continue
        base = n.split("~", 1)[0] or "v"
        cand = base
        k = 0
        while cand in taken or not _IDENT_RE.match(cand) or cand in RESERVED_NAMES:
            k += 1
            cand = f"{base}_{k}"
        names[n] = cand
        taken.add(cand)
    return names


def _all_var_names(t: Term):
    if isinstance(t, Var):
        yield t.name
    elif isinstance(t, Prefix):
        yield from _all_var_names(t.body)
    elif isinstance(t, (Choice, Par)):
        yield from _all_var_names(t.left)
        yield from _all_var_names(t.right)
    elif isinstance(t, (Hide, Rename, Theta, Psi)):
        yield from _all_var_names(t.body)
    elif isinstance(t, RecCall):
        for _, b in t.spec.equations:
            yield from _all_var_names(b)


def _render_formula(f, top=False) -> str:
    m = _modal
    if isinstance(f, m.Top):
        return "T"
    if isinstance(f, m.Stable):
        return "stable"
    if isinstance(f, m.Not):
        return f"!{_render_formula(f.sub)}"
    if isinstance(f, m.And):
        return "&(" + ",".join(_render_formula(p, top=True) for p in f.parts) + ")"
    if isinstance(f, m.Diamond):
        return f"<{f.action}>{_render_formula(f.sub)}"
    if isinstance(f, m.HatDiamond):
        return f"<{f.action}^>{_render_formula(f.sub)}"
    if isinstance(f, m.EnvBox):
        return f"[{{{_acts(f.allowed)}}}]{_render_formula(f.sub)}"
    if isinstance(f, m.TimeoutDiamond):
        return f"[{{{_acts(f.allowed)}}}]<t>{_render_formula(f.sub)}"
    if isinstance(f, m.Eps):
        return f"eps({_render_formula(f.sub, top=True)})"
    if isinstance(f, m.EpsStep):
        return (f"eps({_render_formula(f.left, top=True)} <{f.action}^> "
                f"{_render_formula(f.right, top=True)})")
    if isinstance(f, m.EpsX):
        body = (f"{_render_formula(f.left)} <eps_{{{_acts(f.allowed)}}}> "
                f"{_render_formula(f.right)}")
        return body if top else f"({body})"
    raise TypeError(f"not a formula: {f!r}")
