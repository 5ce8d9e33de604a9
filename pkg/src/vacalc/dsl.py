"""A small expression language for formal series and vertex operators.

    expr    := term (("+" | "-") term)*
    term    := unary (("*" | "/") unary)*
    unary   := "-" unary | apply
    apply   := power [operand]            (only after Y/Yo: right-nested application)
    power   := atom ["^" exponent]
    exponent:= INT | "-" INT | "(" expr ")"
    atom    := INT | INTi | "i" | VAR | "(" expr ")" | 'basis-id'
             | "delta" "(" expr ")" | "delta3" "(" VAR ";" VAR "," VAR [";" "-"] ")"
             | Res_VAR "(" expr ")" | d/dVAR "(" expr ")"
             | "Taylor" "[" VAR "," VAR "]" "(" expr ")"
             | ("Y" | "Yo") "(" expr "," VAR ")" | "<" expr "," expr ">"

``Taylor[y, x](f)`` is e^{y d/dx} f.  ``Y(v, x) w`` applies a vertex operator of
the loaded structure to a vector expression; ``<v', ...>`` pairs with a dual
vector.  Whitespace is insignificant except that ``d/dx`` is always the derivative
token (write ``d / dx`` for a quotient); ``unparse`` prints the canonical form.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from gmpy2 import mpq

from .errors import ExprSyntaxError, UndefinedProduct
from .grading import Vector, pair
from .scalar import ONE, ZERO, is_integer, scalar
from .series import (
    FormalSeries,
    Window,
    binom_expand,
    delta,
    delta3,
    delta_ratio,
    derivative,
    formal_taylor,
    monomial,
    multiply,
    residue,
)

# ---------------------------------------------------------------- AST


@dataclass(frozen=True)
class Num:
    value: int
    imag: bool = False


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Basis:
    id: str


@dataclass(frozen=True)
class BinOp:
    op: str  # + - * /
    left: object
    right: object


@dataclass(frozen=True)
class Neg:
    arg: object


@dataclass(frozen=True)
class Pow:
    base: object
    exp: object


@dataclass(frozen=True)
class Delta:
    arg: object


@dataclass(frozen=True)
class Delta3:
    out: str
    a: str
    b: str
    sign: int = 1


@dataclass(frozen=True)
class Res:
    var: str
    arg: object


@dataclass(frozen=True)
class Deriv:
    var: str
    arg: object


@dataclass(frozen=True)
class Taylor:
    y: str
    x: str
    arg: object


@dataclass(frozen=True)
class VOp:
    vec: object
    var: str
    opposite: bool = False


@dataclass(frozen=True)
class Apply:
    op: VOp
    arg: object


@dataclass(frozen=True)
class Pair:
    dual: object
    arg: object


# ---------------------------------------------------------------- lexer

TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<res>Res_(?P<resvar>[A-Za-z][A-Za-z0-9]*))
  | (?P<dd>d/d(?P<ddvar>[A-Za-z][A-Za-z0-9]*))
  | (?P<imag>\d+i(?![A-Za-z0-9_]))
  | (?P<int>\d+)
  | (?P<name>[A-Za-z][A-Za-z0-9]*)
  | (?P<quoted>'[^']*')
  | (?P<punct>[-+*/^()\[\],;<>])
""", re.VERBOSE)
KEYWORDS = {"delta", "delta3", "Taylor", "Y", "Yo", "i"}


@dataclass
class Tok:
    kind: str
    text: str
    pos: int
    value: str = ""


def tokenize(text: str) -> list:
    toks, pos = [], 0
    while pos < len(text):
        m = TOKEN.match(text, pos)
        if m is None:
            raise _error(text, pos, "a token", text[pos])
        kind = m.lastgroup
        if kind == "resvar":
            kind = "res"
        if kind == "ddvar":
            kind = "dd"
        if kind != "ws":
            value = m.group("resvar") or m.group("ddvar") or m.group(0)
            if kind == "name" and value in KEYWORDS:
                kind = value
            if kind == "quoted":
                value = value[1:-1]
            toks.append(Tok(kind, m.group(0), pos, value))
        pos = m.end()
    toks.append(Tok("eof", "", len(text)))
    return toks


def _error(text, pos, expected, found):
    line = text.count("\n", 0, pos) + 1
    col = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return ExprSyntaxError(line, col, expected, found or "end of input")


# ---------------------------------------------------------------- parser


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Tok:
        return self.toks[self.i]

    def at(self, *texts) -> bool:
        t = self.tok
        return (t.kind == "punct" and t.text in texts) or t.kind in texts

    def expect(self, text: str, what: str | None = None) -> Tok:
        if not self.at(text):
            raise _error(self.text, self.tok.pos, what or repr(text), self.tok.text)
        t = self.tok
        self.i += 1
        return t

    def var(self) -> str:
        if self.tok.kind != "name":
            raise _error(self.text, self.tok.pos, "a variable", self.tok.text)
        t = self.tok
        self.i += 1
        return t.value

    def parse(self):
        e = self.expr()
        if self.tok.kind != "eof":
            raise _error(self.text, self.tok.pos, "an operator or end of input", self.tok.text)
        return e

    def expr(self):
        e = self.term()
        while self.at("+", "-"):
            op = self.tok.text
            self.i += 1
            e = BinOp(op, e, self.term())
        return e

    def term(self):
        e = self.unary()
        while self.at("*", "/"):
            op = self.tok.text
            self.i += 1
            e = BinOp(op, e, self.unary())
        return e

    def unary(self):
        if self.at("-"):
            self.i += 1
            return Neg(self.unary())
        return self.apply()

    def apply(self):
        e = self.power()
        if isinstance(e, VOp) and self.at("Y", "Yo", "quoted", "("):
            return Apply(e, self.apply())
        return e

    def power(self):
        base = self.atom()
        if self.at("^"):
            self.i += 1
            if self.at("-"):
                self.i += 1
                t = self.expect("int", "an integer")
                return Pow(base, Neg(Num(int(t.value))))
            if self.at("int"):
                t = self.tok
                self.i += 1
                return Pow(base, Num(int(t.value)))
            if self.at("("):
                self.i += 1
                e = self.expr()
                self.expect(")")
                return Pow(base, e)
            raise _error(self.text, self.tok.pos, "an exponent", self.tok.text)
        return base

    def atom(self):
        t = self.tok
        k = t.kind
        if k == "int":
            self.i += 1
            return Num(int(t.value))
        if k == "imag":
            self.i += 1
            return Num(int(t.value[:-1]), True)
        if k == "i":
            self.i += 1
            return Num(1, True)
        if k == "name":
            self.i += 1
            return Var(t.value)
        if k == "quoted":
            self.i += 1
            return Basis(t.value)
        if self.at("("):
            self.i += 1
            e = self.expr()
            self.expect(")")
            return e
        if k == "delta":
            self.i += 1
            self.expect("(")
            e = self.expr()
            self.expect(")")
            return Delta(e)
        if k == "delta3":
            self.i += 1
            self.expect("(")
            out = self.var()
            self.expect(";")
            a = self.var()
            self.expect(",")
            b = self.var()
            sign = 1
            if self.at(";"):
                self.i += 1
                self.expect("-")
                sign = -1
            self.expect(")")
            return Delta3(out, a, b, sign)
        if k in ("res", "dd"):
            self.i += 1
            self.expect("(")
            e = self.expr()
            self.expect(")")
            return Res(t.value, e) if k == "res" else Deriv(t.value, e)
        if k == "Taylor":
            self.i += 1
            self.expect("[")
            y = self.var()
            self.expect(",")
            x = self.var()
            self.expect("]")
            self.expect("(")
            e = self.expr()
            self.expect(")")
            return Taylor(y, x, e)
        if k in ("Y", "Yo"):
            self.i += 1
            self.expect("(")
            v = self.expr()
            self.expect(",")
            x = self.var()
            self.expect(")")
            return VOp(v, x, k == "Yo")
        if self.at("<"):
            self.i += 1
            d = self.expr()
            self.expect(",")
            e = self.expr()
            self.expect(">")
            return Pair(d, e)
        raise _error(self.text, t.pos, "an expression", t.text)


def parse_expr(text: str):
    return _Parser(text).parse()


# ---------------------------------------------------------------- printer

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def _prec(e) -> int:
    if isinstance(e, BinOp):
        return _PREC[e.op]
    if isinstance(e, Neg):
        return 3
    if isinstance(e, Apply):
        return 3
    if isinstance(e, Pow):
        return 4
    return 5


def _wrap(e, level: int) -> str:
    s = unparse(e)
    return f"({s})" if _prec(e) < level else s


def unparse(e) -> str:
    if isinstance(e, Num):
        if e.imag:
            return "i" if e.value == 1 else f"{e.value}i"
        return str(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Basis):
        return f"'{e.id}'"
    if isinstance(e, BinOp):
        p = _PREC[e.op]
        left = _wrap(e.left, p)
        right = _wrap(e.right, p + 1)
        return f"{left} {e.op} {right}"
    if isinstance(e, Neg):
        return "-" + _wrap(e.arg, 4)
    if isinstance(e, Pow):
        x = e.exp
        if isinstance(x, Num) and not x.imag:
            exp = str(x.value)
        elif isinstance(x, Neg) and isinstance(x.arg, Num) and not x.arg.imag:
            exp = f"-{x.arg.value}"
        else:
            exp = f"({unparse(x)})"
        return f"{_wrap(e.base, 5)}^{exp}"
    if isinstance(e, Delta):
        return f"delta({unparse(e.arg)})"
    if isinstance(e, Delta3):
        return f"delta3({e.out}; {e.a}, {e.b}{'; -' if e.sign < 0 else ''})"
    if isinstance(e, Res):
        return f"Res_{e.var}({unparse(e.arg)})"
    if isinstance(e, Deriv):
        return f"d/d{e.var}({unparse(e.arg)})"
    if isinstance(e, Taylor):
        return f"Taylor[{e.y}, {e.x}]({unparse(e.arg)})"
    if isinstance(e, VOp):
        return f"{'Yo' if e.opposite else 'Y'}({unparse(e.vec)}, {e.var})"
    if isinstance(e, Apply):
        arg = e.arg
        s = unparse(arg)
        if not isinstance(arg, (Apply, Basis, VOp)):
            s = f"({s})"
        return f"{unparse(e.op)} {s}"
    if isinstance(e, Pair):
        return f"<{unparse(e.dual)}, {unparse(e.arg)}>"
    raise TypeError(f"not an expression node: {e!r}")


# ---------------------------------------------------------------- evaluation


class VSeries:
    """Finite vector-valued series {monomial: Vector}."""

    def __init__(self, terms=None):
        self.terms = {m: v for m, v in (terms or {}).items() if v.c}

    def __add__(self, other):
        out = dict(self.terms)
        for m, v in other.terms.items():
            out[m] = out[m] + v if m in out else v
        return VSeries(out)

    def scale(self, c):
        return VSeries({m: v * c for m, v in self.terms.items()})

    def to_series(self) -> FormalSeries:
        return FormalSeries.from_terms(self.terms)


@dataclass
class Env:
    module: object = None
    window: Window = field(default_factory=lambda: Window.symmetric(8))


def _constant(s) -> object:
    """The scalar value of a constant series, or None."""
    if isinstance(s, FormalSeries) and s.is_finite:
        c = s.coefficients()
        if not c:
            return ZERO
        if list(c) == [()]:
            return c[()]
    return None


def _linear(e):
    """(coeff, var) or (coeff, None) for c, x, c*x, -x; None otherwise."""
    if isinstance(e, Var):
        return (ONE, e.name)
    if isinstance(e, Num):
        return (_num(e), None)
    if isinstance(e, Neg):
        inner = _linear(e.arg)
        return None if inner is None else (-inner[0], inner[1])
    if isinstance(e, BinOp) and e.op in "*/":
        a, b = _linear(e.left), _linear(e.right)
        if a is None or b is None:
            return None
        if e.op == "*" and (a[1] is None or b[1] is None):
            return (a[0] * b[0], a[1] or b[1])
        if e.op == "/" and b[1] is None:
            return (a[0] / b[0], a[1])
    return None


def _binomial_pair(e):
    """((c1, v1), (c2, v2)) when e is a sum or difference of two linear terms."""
    if isinstance(e, BinOp) and e.op in "+-":
        a, b = _linear(e.left), _linear(e.right)
        if a is not None and b is not None:
            if e.op == "-":
                b = (-b[0], b[1])
            return a, b
    return None


def _num(e: Num):
    return scalar(0, e.value) if e.imag else mpq(e.value)


def _term_arg(t):
    c, v = t
    return v if v is not None and c == 1 else (c, v) if v is not None else c


def evaluate_expr(e, env: Env | None = None):
    """FormalSeries for scalar expressions, VSeries for vector-valued ones."""
    env = env or Env()
    ev = lambda x: evaluate_expr(x, env)  # noqa: E731
    if isinstance(e, Num):
        return FormalSeries.constant(_num(e))
    if isinstance(e, Var):
        return FormalSeries.var(e.name)
    if isinstance(e, Basis):
        return VSeries({(): Vector.basis(e.id)})
    if isinstance(e, Neg):
        x = ev(e.arg)
        return x.scale(-ONE)
    if isinstance(e, BinOp):
        a, b = ev(e.left), ev(e.right)
        if e.op in "+-":
            if type(a) is not type(b):
                raise TypeError("cannot add a scalar series and a vector")
            return a + (b.scale(-ONE) if e.op == "-" else b)
        if e.op == "*":
            ca, cb = _constant(a), _constant(b)
            if isinstance(b, VSeries) and ca is not None:
                return b.scale(ca)
            if isinstance(a, VSeries) and cb is not None:
                return a.scale(cb)
            if isinstance(a, VSeries) or isinstance(b, VSeries):
                raise TypeError("vectors can only be scaled by constants")
            return multiply(a, b)
        cb = _constant(b)
        if cb is not None:
            if cb == 0:
                raise ZeroDivisionError("division by zero")
            return a.scale(ONE / cb)
        terms = b.coefficients() if isinstance(b, FormalSeries) and b.is_finite else {}
        if len(terms) == 1:
            (m, c), = terms.items()
            inv = FormalSeries.from_terms({monomial({v: -x for v, x in m}): ONE / c})
            if isinstance(a, VSeries):
                raise UndefinedProduct("vectors can only be divided by constants")
            return multiply(a, inv)
        raise UndefinedProduct("division is only by a scalar or a single monomial")
    if isinstance(e, Pow):
        lam = _constant(ev(e.exp))
        if lam is None:
            raise ValueError("exponents must be constant")
        if isinstance(e.base, Var):
            return FormalSeries.var(e.base.name, lam)
        pairs = _binomial_pair(e.base)
        if pairs is not None:
            return binom_expand(_term_arg(pairs[0]), _term_arg(pairs[1]), lam)
        base = ev(e.base)
        if is_integer(lam) and lam >= 0:
            out = FormalSeries.constant(ONE)
            for _ in range(int(lam)):
                out = multiply(out, base)
            return out
        c = _constant(base)
        if c is not None and is_integer(lam):
            return FormalSeries.constant(c ** int(lam))
        raise ValueError("only variables, binomials and constants take general exponents")
    if isinstance(e, Delta):
        arg = e.arg
        if isinstance(arg, Var):
            return delta(arg.name)
        if isinstance(arg, BinOp) and arg.op == "/":
            den = _linear(arg.right)
            if den is None or den[1] is None:
                raise ValueError("a delta denominator must be c*x")
            pairs = _binomial_pair(arg.left)
            num = list(pairs) if pairs is not None else [_linear(arg.left)]
            if num[0] is None:
                raise ValueError("a delta numerator must be a linear term or a binomial")
            return delta_ratio([_term_arg(t) for t in num], _term_arg(den))
        lin = _linear(arg)
        if lin is not None and lin[1] is not None:
            return delta_ratio([_term_arg(lin)], ONE)
        raise ValueError("unsupported delta argument")
    if isinstance(e, Delta3):
        return delta3(e.out, e.a, e.b, e.sign)
    if isinstance(e, Res):
        return residue(ev(e.arg), e.var)
    if isinstance(e, Deriv):
        return derivative(ev(e.arg), e.var)
    if isinstance(e, Taylor):
        return formal_taylor(ev(e.arg), e.x, e.y)
    if isinstance(e, Apply):
        return _apply(e.op, ev(e.arg), env)
    if isinstance(e, VOp):
        raise ValueError("a vertex operator must be applied to a vector")
    if isinstance(e, Pair):
        dual = ev(e.dual)
        arg = ev(e.arg)
        if not isinstance(dual, VSeries) or list(dual.terms) not in ([()], []):
            raise ValueError("the left side of a pairing must be a constant vector")
        if not isinstance(arg, VSeries):
            raise ValueError("the right side of a pairing must be vector valued")
        d = dual.terms.get((), Vector())
        return FormalSeries.from_terms({m: pair(d, v) for m, v in arg.terms.items()})
    raise TypeError(f"not an expression node: {e!r}")


def _apply(op: VOp, arg, env: Env) -> VSeries:
    from .modules import module_action, opposite_op

    if env.module is None:
        raise ValueError("vertex operators need a loaded algebra or module (--structure)")
    if not isinstance(arg, VSeries):
        raise ValueError("vertex operators act on vectors")
    vec = evaluate_expr(op.vec, env)
    if not isinstance(vec, VSeries) or list(vec.terms) not in ([()], []):
        raise ValueError("the first argument of Y must be a constant vector")
    v = vec.terms.get((), Vector())
    fn = opposite_op if op.opposite else module_action
    out = VSeries()
    for m, w in arg.terms.items():
        if any(var == op.var for var, _ in m):
            raise ValueError(f"variable {op.var} already used")
        series = fn(env.module, v, w, env.window, op.var)
        terms = {monomial(list(m) + list(mm)): c for mm, c in series.coefficients(env.window).items()}
        out = out + VSeries(terms)
    return out


def evaluate_text(text: str, env: Env | None = None):
    return evaluate_expr(parse_expr(text), env)
