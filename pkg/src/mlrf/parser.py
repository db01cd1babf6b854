"""Reader and writer for ``.slc`` loop files.

Grammar (one item per line, ``#`` starts a comment)::

    file        := header* section*
    header      := "vars:" IDENT+
                 | "mode:" ("rational" | "integer")
                 | "depth-bound:" INT
                 | "max-iters:" INT
    section     := ("guard:" | "update:") [constraint ("," constraint)*]
                   followed by indented or plain constraint lines
    constraint  := expr ("<=" | ">=" | "=" | "==") expr
    expr        := ["+"|"-"] term (("+"|"-") term)*
    term        := coef ["*"] IDENT ["'"] ["/" INT]
                 | IDENT ["'"] ["/" INT]
                 | coef
    coef        := INT ["/" INT] | "(" INT "/" INT ")"

Guard constraints may only mention unprimed variables.  Strict comparisons
and products of variables are rejected.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .linalg import ZERO, zeros
from .loop import EQUAL, LEQ, SLCLoop
from .polyhedron import format_linear


class LoopParseError(ValueError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.message = message
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line else ""
        super().__init__(where + message)


@dataclass
class LoopFile:
    loop: SLCLoop
    mode: Optional[str] = None
    depth_bound: Optional[int] = None
    max_iters: Optional[int] = None


_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<num>\d+)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op><=|>=|==|<|>|=|\+|-|\*|/|\(|\)|')"
    r")"
)


def _tokenize(text, line, col0):
    pos = 0
    toks = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise LoopParseError(f"unexpected character {text[pos:].strip()[0]!r}", line, col0 + pos + 1)
        kind = m.lastgroup
        start = m.start(kind)
        toks.append((kind, m.group(kind), col0 + start + 1))
        pos = m.end()
    return toks


class _Expr:
    """Linear expression over (x, x') plus a constant."""

    def __init__(self, n):
        self.x = [ZERO] * n
        self.xp = [ZERO] * n
        self.const = ZERO


class _ExprParser:
    def __init__(self, toks, names, line):
        self.toks = toks
        self.i = 0
        self.names = {v: k for k, v in enumerate(names)}
        self.n = len(names)
        self.line = line

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None, self._end_col())

    def _end_col(self):
        return self.toks[-1][2] + len(self.toks[-1][1]) if self.toks else 1

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        raise LoopParseError(msg, self.line, tok[2])

    def coefficient(self):
        kind, val, col = self.peek()
        if kind == "op" and val == "(":
            self.take()
            num = self._int("numerator")
            if self.peek()[1] != "/":
                self.error("malformed rational")
            self.take()
            den = self._int("denominator")
            if self.peek()[1] != ")":
                self.error("expected ')'")
            self.take()
            return Fraction(num, den)
        num = self._int("number")
        # p/q only when the slash is followed by a number and not a variable term
        if self.peek()[1] == "/":
            nxt = self.toks[self.i + 1] if self.i + 1 < len(self.toks) else (None, None, col)
            if nxt[0] != "num":
                self.error("malformed rational", nxt if nxt[0] else None)
            self.take()
            den = self._int("denominator")
            return Fraction(num, den)
        return Fraction(num)

    def _int(self, what):
        kind, val, col = self.take()
        if kind != "num":
            raise LoopParseError(f"malformed rational: expected {what}", self.line, col)
        if what == "denominator" and int(val) == 0:
            raise LoopParseError("malformed rational: zero denominator", self.line, col)
        return int(val)

    def term(self, expr, sign):
        kind, val, col = self.peek()
        coef = Fraction(1)
        has_coef = False
        if kind == "num" or (kind == "op" and val == "("):
            coef = self.coefficient()
            has_coef = True
            if self.peek()[1] == "*":
                self.take()
                if self.peek()[0] != "ident":
                    self.error("expected variable after '*'")
        kind, val, col = self.peek()
        if kind == "ident":
            self.take()
            if val not in self.names:
                raise LoopParseError(f"undeclared variable {val!r}", self.line, col)
            primed = False
            if self.peek()[1] == "'":
                self.take()
                primed = True
            if self.peek()[1] == "/":
                self.take()
                coef = coef / self._int("denominator")
            if self.peek()[0] in ("ident", "num") or self.peek()[1] in ("*", "("):
                self.error("non-linear term")
            target = expr.xp if primed else expr.x
            target[self.names[val]] += sign * coef
            return
        if not has_coef:
            self.error("expected a term")
        if kind == "ident" or val == "*":
            self.error("non-linear term")
        expr.const += sign * coef

    def expression(self):
        expr = _Expr(self.n)
        sign = 1
        kind, val, _ = self.peek()
        if val in ("+", "-"):
            self.take()
            sign = -1 if val == "-" else 1
        self.term(expr, sign)
        while True:
            kind, val, _ = self.peek()
            if val in ("+", "-"):
                self.take()
                self.term(expr, -1 if val == "-" else 1)
            else:
                return expr


def _parse_constraint(text, names, line, col0, allow_primed):
    toks = _tokenize(text, line, col0)
    if not toks:
        raise LoopParseError("empty constraint", line, col0 + 1)
    p = _ExprParser(toks, names, line)
    lhs = p.expression()
    kind, op, col = p.take()
    if op in ("<", ">"):
        raise LoopParseError("strict inequality not supported", line, col)
    if op not in ("<=", ">=", "=", "=="):
        raise LoopParseError("expected a comparison operator", line, col)
    rhs = p.expression()
    if p.i != len(toks):
        kind, val, col = p.peek()
        if val in ("<=", ">=", "=", "=="):
            raise LoopParseError("chained comparison not supported", line, col)
        raise LoopParseError("non-linear term" if kind in ("ident", "num") else f"unexpected {val!r}", line, col)
    n = len(names)
    # lhs op rhs  ->  (lhs - rhs) op 0  ->  coeffs . v  op  const
    ax = [a - b for a, b in zip(lhs.x, rhs.x)]
    axp = [a - b for a, b in zip(lhs.xp, rhs.xp)]
    const = rhs.const - lhs.const
    if op == ">=":
        ax, axp, const = [-a for a in ax], [-a for a in axp], -const
    rel = EQUAL if op in ("=", "==") else LEQ
    if not allow_primed and any(axp):
        raise LoopParseError("primed variable in guard", line, col0 + 1 + text.find("'"))
    return tuple(ax), tuple(axp), rel, const


def _split_top(text):
    """Split on commas, keeping column offsets."""
    parts = []
    start = 0
    for k, ch in enumerate(text):
        if ch == ",":
            parts.append((text[start:k], start))
            start = k + 1
    parts.append((text[start:], start))
    return [(t, off) for t, off in parts if t.strip()]


def parse_loop_file(text: str) -> LoopFile:
    names = None
    mode = depth = iters = None
    section = None
    guard, update = [], []
    pending = []  # (section, text, line, col)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        if not body.strip():
            continue
        m = re.match(r"\s*([A-Za-z][A-Za-z-]*)\s*:(.*)$", body)
        if m and m.group(1) in ("vars", "guard", "update", "mode", "depth-bound", "max-iters"):
            key, rest = m.group(1), m.group(2)
            rest_col = m.start(2)
            if key == "vars":
                if names is not None:
                    raise LoopParseError("duplicate vars declaration", lineno, 1)
                names = rest.replace(",", " ").split()
                if not names:
                    raise LoopParseError("no variables declared", lineno, 1)
                for v in names:
                    if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", v):
                        raise LoopParseError(f"bad variable name {v!r}", lineno, 1 + body.find(v))
                if len(set(names)) != len(names):
                    raise LoopParseError("duplicate variable name", lineno, 1)
                section = None
            elif key in ("guard", "update"):
                section = key
                for part, off in _split_top(rest):
                    pending.append((section, part, lineno, rest_col + off))
            elif key == "mode":
                mode = rest.strip()
                if mode not in ("rational", "integer"):
                    raise LoopParseError(f"unknown mode {mode!r}", lineno, rest_col + 1)
            else:
                try:
                    val = int(rest.strip())
                except ValueError:
                    raise LoopParseError(f"{key} needs a positive integer", lineno, rest_col + 1) from None
                if val <= 0:
                    raise LoopParseError(f"{key} needs a positive integer", lineno, rest_col + 1)
                if key == "depth-bound":
                    depth = val
                else:
                    iters = val
            continue
        if section is None:
            raise LoopParseError("constraint outside a guard: or update: block", lineno, 1)
        for part, off in _split_top(body):
            pending.append((section, part, lineno, off))
    if names is None:
        raise LoopParseError("missing vars: declaration", 1, 1)
    for sec, part, lineno, col in pending:
        row = _parse_constraint(part, names, lineno, col, allow_primed=(sec == "update"))
        (guard if sec == "guard" else update).append(row)
    loop = SLCLoop.from_rows(
        names,
        guard=[(ax, rel, c) for ax, _, rel, c in guard],
        update=[(ax, axp, rel, c) for ax, axp, rel, c in update],
    )
    return LoopFile(loop, mode, depth, iters)


def parse_loop(text: str) -> SLCLoop:
    return parse_loop_file(text).loop


def _row_text(coeffs, names, rel, rhs):
    op = "=" if rel == EQUAL else "<="
    if not any(coeffs):
        return f"0 {op} {rhs}"
    return f"{format_linear(coeffs, names)} {op} {rhs}"


def serialize_loop(loop: SLCLoop, mode: Optional[str] = None, depth_bound=None, max_iters=None) -> str:
    """Text that :func:`parse_loop` reads back to an identical loop."""
    names = list(loop.names)
    primed = [f"{v}'" for v in names]
    lines = ["vars: " + " ".join(names)]
    if mode:
        lines.append(f"mode: {mode}")
    if depth_bound:
        lines.append(f"depth-bound: {depth_bound}")
    if max_iters:
        lines.append(f"max-iters: {max_iters}")
    lines.append("guard:")
    for row, rel, rhs in zip(loop.B.rows, loop.guard_rel, loop.b):
        lines.append("  " + _row_text(row, names, rel, rhs))
    lines.append("update:")
    for ra, rp, rel, rhs in zip(loop.A.rows, loop.A_primed.rows, loop.update_rel, loop.c):
        lines.append("  " + _row_text(ra + rp, names + primed, rel, rhs))
    return "\n".join(lines) + "\n"
