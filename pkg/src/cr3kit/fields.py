"""Scalar-field expression language over the chart coordinates (x, y, t).

Grammar (lowest to highest precedence, binaries left-associative):

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' exponent)*          # exponent folds to a constant
    atom   := NUMBER | VAR | FUNC '(' expr ')' | '(' expr ')'

Variables are exactly {x, y, t}; functions are {exp, log, sin, cos, sqrt,
abs}.  Numeric literals are plain decimals (optionally with an exponent
part); there is no pi keyword.  Parsed fields evaluate identically on floats
and on jets, so one AST serves both pointwise evaluation and derivative
extraction.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import jets
from .errors import DegenerateJet, ParseError

VARIABLES = ("x", "y", "t")
FUNCTIONS = {
    "exp": jets.exp,
    "log": jets.log,
    "sin": jets.sin,
    "cos": jets.cos,
    "sqrt": jets.sqrt,
    "abs": jets.absval,
}


# -- AST ---------------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: object


@dataclass(frozen=True)
class Bin:
    op: str
    lhs: object
    rhs: object


@dataclass(frozen=True)
class Pow:
    base: object
    exponent: float


@dataclass(frozen=True)
class Call:
    fn: str
    arg: object


# -- tokenizer ---------------------------------------------------------------


def _tokenize(src, variables):
    tokens = []
    i, n = 0, len(src)
    while i < n:
        ch = src[i]
        if ch.isspace():
            i += 1
            continue
        if ch in "+-*/^()":
            tokens.append((ch, ch, i))
            i += 1
            continue
        if ch.isdigit() or (ch == "." and i + 1 < n and src[i + 1].isdigit()):
            j = i
            while j < n and (src[j].isdigit() or src[j] == "."):
                j += 1
            if j < n and src[j] in "eE":
                k = j + 1
                if k < n and src[k] in "+-":
                    k += 1
                if k < n and src[k].isdigit():
                    j = k
                    while j < n and src[j].isdigit():
                        j += 1
            text = src[i:j]
            try:
                value = float(text)
            except ValueError:
                raise ParseError(f"bad numeric literal '{text}'", i, {"number"})
            tokens.append(("num", value, i))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (src[j].isalnum() or src[j] == "_"):
                j += 1
            name = src[i:j]
            if name in variables:
                tokens.append(("var", name, i))
            elif name in FUNCTIONS:
                tokens.append(("func", name, i))
            else:
                raise ParseError(f"unknown identifier '{name}'", i,
                                 set(variables) | set(FUNCTIONS))
            i = j
            continue
        raise ParseError(f"unexpected character '{ch}'", i,
                         {"number", "identifier", "operator", "("})
    tokens.append(("end", None, n))
    return tokens


# -- parser ------------------------------------------------------------------


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind, expected):
        tok = self.peek()
        if tok[0] != kind:
            raise ParseError(f"expected {expected}, got '{tok[1]}'", tok[2], {expected})
        return self.advance()

    def expr(self):
        node = self.term()
        while self.peek()[0] in ("+", "-"):
            op = self.advance()[0]
            node = Bin(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[0] in ("*", "/"):
            op = self.advance()[0]
            node = Bin(op, node, self.unary())
        return node

    def unary(self):
        if self.peek()[0] == "-":
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self):
        node = self.atom()
        while self.peek()[0] == "^":
            self.advance()
            tok = self.peek()
            exponent = self.exponent_value()
            node = Pow(node, exponent)
            del tok
        return node

    def exponent_value(self):
        tok = self.peek()
        sign = 1.0
        while self.peek()[0] == "-":
            self.advance()
            sign = -sign
        operand = self.atom()
        value = _const_value(operand)
        if value is None:
            raise ParseError("exponent must be a numeric constant", tok[2],
                             {"number"})
        return sign * value

    def atom(self):
        kind, value, off = self.peek()
        if kind == "num":
            self.advance()
            return Num(value)
        if kind == "var":
            self.advance()
            return Var(value)
        if kind == "func":
            self.advance()
            self.expect("(", "'('")
            arg = self.expr()
            self.expect(")", "')'")
            return Call(value, arg)
        if kind == "(":
            self.advance()
            node = self.expr()
            self.expect(")", "')'")
            return node
        raise ParseError(f"expected an operand, got '{value}'", off,
                         {"number", "variable", "function", "("})


def _const_value(node):
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Neg):
        v = _const_value(node.arg)
        return None if v is None else -v
    if isinstance(node, Bin):
        l, r = _const_value(node.lhs), _const_value(node.rhs)
        if l is None or r is None:
            return None
        if node.op == "+":
            return l + r
        if node.op == "-":
            return l - r
        if node.op == "*":
            return l * r
        if node.op == "/":
            return l / r
    if isinstance(node, Pow):
        b = _const_value(node.base)
        return None if b is None else b ** node.exponent
    return None


def _parse_ast(src, variables=VARIABLES):
    if not src or not src.strip():
        raise ParseError("empty expression", 0, {"expression"})
    parser = _Parser(_tokenize(src, variables))
    node = parser.expr()
    kind, value, off = parser.peek()
    if kind != "end":
        raise ParseError(f"trailing input '{value}'", off, {"end of input"})
    return node


# -- evaluation --------------------------------------------------------------


def _eval(node, env):
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        return env[node.name]
    if isinstance(node, Neg):
        return -_eval(node.arg, env)
    if isinstance(node, Bin):
        l = _eval(node.lhs, env)
        r = _eval(node.rhs, env)
        if node.op == "+":
            return l + r
        if node.op == "-":
            return l - r
        if node.op == "*":
            return l * r
        if not isinstance(r, jets.Jet) and r == 0.0:
            raise DegenerateJet("division by zero in field evaluation")
        return l / r
    if isinstance(node, Pow):
        return jets.powr(_eval(node.base, env), node.exponent)
    if isinstance(node, Call):
        return FUNCTIONS[node.fn](_eval(node.arg, env))
    raise TypeError(f"unknown AST node {node!r}")


def _mentions(node, name):
    if isinstance(node, Var):
        return node.name == name
    if isinstance(node, Neg):
        return _mentions(node.arg, name)
    if isinstance(node, Bin):
        return _mentions(node.lhs, name) or _mentions(node.rhs, name)
    if isinstance(node, Pow):
        return _mentions(node.base, name)
    if isinstance(node, Call):
        return _mentions(node.arg, name)
    return False


# -- printer -----------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "pow": 4}


def _fmt_num(v):
    if float(v).is_integer() and abs(v) < 1e16:
        return str(int(v))
    return repr(float(v))


def _to_source(node, prec=0):
    if isinstance(node, Num):
        s = _fmt_num(node.value)
        return f"({s})" if node.value < 0 and prec > 0 else s
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        s = "-" + _to_source(node.arg, _PREC["neg"])
        return f"({s})" if prec > _PREC["neg"] else s
    if isinstance(node, Bin):
        p = _PREC[node.op]
        lhs = _to_source(node.lhs, p)
        rhs = _to_source(node.rhs, p + 1)  # left-associative
        s = f"{lhs} {node.op} {rhs}"
        return f"({s})" if prec > p else s
    if isinstance(node, Pow):
        base = _to_source(node.base, _PREC["pow"] + 1)
        expo = _fmt_num(node.exponent)
        if node.exponent < 0:
            expo = f"({expo})"
        s = f"{base}^{expo}"
        return f"({s})" if prec > _PREC["pow"] else s
    if isinstance(node, Call):
        return f"{node.fn}({_to_source(node.arg)})"
    raise TypeError(f"unknown AST node {node!r}")


# -- public field objects ----------------------------------------------------


class ScalarField:
    """Parsed scalar field; evaluates on floats and on jets alike."""

    def __init__(self, ast, source):
        self.ast = ast
        self.source = source
        self.basic = not _mentions(ast, "t")
        self.max_order = jets.MAX_ORDER

    def __call__(self, x, y, t=0.0):
        v = _eval(self.ast, {"x": x, "y": y, "t": t})
        return float(v)

    def eval_jets(self, jx, jy, jt):
        v = _eval(self.ast, {"x": jx, "y": jy, "t": jt})
        if not isinstance(v, jets.Jet):
            v = jx.new_const(v)
        return v

    def jet_at(self, point, order=jets.MAX_ORDER):
        jx, jy, jt = jets.seed(point, order)
        return self.eval_jets(jx, jy, jt)

    def __str__(self):
        return _to_source(self.ast)

    def __repr__(self):
        return f"ScalarField({str(self)!r})"

    def __eq__(self, other):
        return isinstance(other, ScalarField) and self.ast == other.ast

    def __hash__(self):
        return hash(("ScalarField", self.source))


class CallableField:
    """Field defined by a jet-producing procedure rather than an expression.

    `fn(point, order)` must return the jet of the field at `point` to the
    requested order.  `max_order` caps the order the procedure can deliver
    exactly (derived fields that extract derivatives internally lose orders).
    """

    def __init__(self, fn, basic=True, max_order=jets.MAX_ORDER, label="<derived>"):
        self.fn = fn
        self.basic = basic
        self.max_order = max_order
        self.label = label

    def __call__(self, x, y, t=0.0):
        return float(jets.deep_value(self.jet_at((x, y, t), 0).value()))

    def jet_at(self, point, order=jets.MAX_ORDER):
        if order > self.max_order:
            raise ValueError(
                f"field {self.label} supports jets up to order {self.max_order}, "
                f"requested {order}")
        return self.fn(point, order)

    def eval_jets(self, jx, jy, jt):
        # derived fields are evaluated on pure coordinate seeds only
        base = jx.base
        if base is None:
            raise ValueError("derived fields need seed jets with a base point")
        return self.fn(base, min(jx.n, jy.n, jt.n))

    def __repr__(self):
        return f"CallableField({self.label})"


def parse_field(src):
    return ScalarField(_parse_ast(src), src)


def eval_field(field, point_or_jets):
    """Evaluate on a (x, y, t) triple of floats or of jet seeds."""
    x, y, t = point_or_jets
    if isinstance(x, jets.Jet):
        return field.eval_jets(x, y, t)
    return field(x, y, t)


def const_field(value):
    return ScalarField(Num(float(value)), _fmt_num(float(value)))


def combine(op, f, g):
    """Pointwise combination; stays printable when both operands are parsed."""
    if isinstance(f, ScalarField) and isinstance(g, ScalarField):
        node = Bin(op, f.ast, g.ast)
        return ScalarField(node, _to_source(node))
    order_cap = min(f.max_order, g.max_order)

    def fn(point, order):
        a = f.jet_at(point, order)
        b = g.jet_at(point, order)
        return {"+": a + b, "-": a - b, "*": a * b, "/": a / b}[op]

    return CallableField(fn, basic=f.basic and g.basic, max_order=order_cap,
                         label=f"({f!r} {op} {g!r})")


# -- connection 1-form input -------------------------------------------------


def parse_one_form(src):
    """Parse a 1-form like ``x*dy - y*dx`` into its (Ax, Ay) component fields.

    dx and dy act as formal symbols; the expression must be linear in them.
    Components are extracted by substituting (dx, dy) = (1, 0) and (0, 1).
    """
    ast = _parse_ast(src, variables=VARIABLES + ("dx", "dy"))

    def subst(node, dxv, dyv):
        if isinstance(node, Var):
            if node.name == "dx":
                return Num(dxv)
            if node.name == "dy":
                return Num(dyv)
            return node
        if isinstance(node, Neg):
            return Neg(subst(node.arg, dxv, dyv))
        if isinstance(node, Bin):
            return Bin(node.op, subst(node.lhs, dxv, dyv), subst(node.rhs, dxv, dyv))
        if isinstance(node, Pow):
            return Pow(subst(node.base, dxv, dyv), node.exponent)
        if isinstance(node, Call):
            return Call(node.fn, subst(node.arg, dxv, dyv))
        return node

    zero = ScalarField(subst(ast, 0.0, 0.0), src)
    ax = ScalarField(subst(ast, 1.0, 0.0), src)
    ay = ScalarField(subst(ast, 0.0, 1.0), src)
    both = ScalarField(subst(ast, 1.0, 1.0), src)
    for px, py, pt in ((0.13, -0.21, 0.4), (0.52, 0.31, 0.0)):
        z = zero(px, py, pt)
        lin = both(px, py, pt) - ax(px, py, pt) - ay(px, py, pt) + z
        if abs(z) > 1e-12 or abs(lin) > 1e-12:
            raise ParseError("connection form must be linear in dx, dy", 0,
                             {"linear 1-form"})
    axf = ScalarField(Bin("-", ax.ast, zero.ast), f"({src})|dx")
    ayf = ScalarField(Bin("-", ay.ast, zero.ast), f"({src})|dy")
    return axf, ayf
