"""Space-time periodic speed media g(x, t).

A medium is a strictly positive scalar field on R^n x R, periodic with
period 1 in every space coordinate and in time, given by a parsed
arithmetic expression. Evaluation broadcasts over numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from .errors import ExpressionError, ValidationError

# Expression grammar (every binary op left-associative except '^'):
#
#   expr   := term  (('+' | '-') term)*
#   term   := unary (('*' | '/') unary)*
#   unary  := '-' unary | power
#   power  := atom ('^' unary)?        right-associative, binds above unary '-'
#   atom   := NUMBER | IDENT | IDENT '(' expr (',' expr)* ')' | '(' expr ')'
#
# IDENT is a space variable x1..xn (aliases: x for n <= 2, y for n = 2),
# the time variable t, the constant pi, or a function name.

_FUNCS1 = {
    "sin": np.sin,
    "cos": np.cos,
    "exp": np.exp,
    "sqrt": np.sqrt,
    "abs": np.abs,
}
_FUNCS2 = {
    "min": np.minimum,
    "max": np.maximum,
}


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: "Node"


@dataclass(frozen=True)
class Bin:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    fn: str
    args: tuple["Node", ...]


Node = Union[Num, Var, Neg, Bin, Call]


def _byte_offset(src: str, charpos: int) -> int:
    return len(src[:charpos].encode("utf-8"))


def _tokenize(src: str) -> list[tuple[str, str, int]]:
    """Scan src into (kind, text, charpos) triples; kinds NUM/IDENT/OP/END."""
    tokens = []
    i, n = 0, len(src)
    while i < n:
        c = src[i]
        if c.isspace():
            i += 1
            continue
        if c in "+-*/^(),":
            tokens.append(("OP", c, i))
            i += 1
            continue
        if c.isdigit() or c == ".":
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
                float(text)
            except ValueError:
                raise ExpressionError(f"bad number {text!r}", _byte_offset(src, i))
            tokens.append(("NUM", text, i))
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (src[j].isalnum() or src[j] == "_"):
                j += 1
            tokens.append(("IDENT", src[i:j], i))
            i = j
            continue
        raise ExpressionError(f"unexpected character {c!r}", _byte_offset(src, i))
    tokens.append(("END", "", n))
    return tokens


class _Parser:
    def __init__(self, src: str, dim: int):
        self.src = src
        self.tokens = _tokenize(src)
        self.pos = 0
        # canonical variable names plus dimension-gated aliases
        names = {f"x{i + 1}": f"x{i + 1}" for i in range(dim)}
        names["t"] = "t"
        if dim <= 2:
            names["x"] = "x1"
        if dim == 2:
            names["y"] = "x2"
        self.varmap = names

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, message: str, tok=None):
        tok = tok or self.peek()
        raise ExpressionError(message, _byte_offset(self.src, tok[2]))

    def parse(self) -> Node:
        node = self.expr()
        kind, text, _ = self.peek()
        if kind != "END":
            self.fail(f"unexpected token {text!r}")
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.peek()[:2] in (("OP", "+"), ("OP", "-")):
            op = self.advance()[1]
            node = Bin(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.peek()[:2] in (("OP", "*"), ("OP", "/")):
            op = self.advance()[1]
            node = Bin(op, node, self.unary())
        return node

    def unary(self) -> Node:
        if self.peek()[:2] == ("OP", "-"):
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Node:
        node = self.atom()
        if self.peek()[:2] == ("OP", "^"):
            self.advance()
            node = Bin("^", node, self.unary())
        return node

    def atom(self) -> Node:
        kind, text, _ = self.peek()
        if kind == "NUM":
            self.advance()
            return Num(float(text))
        if kind == "IDENT":
            tok = self.advance()
            name = tok[1]
            if self.peek()[:2] == ("OP", "("):
                return self.call(name, tok)
            if name == "pi":
                return Var("pi")
            if name in self.varmap:
                return Var(self.varmap[name])
            if name in _FUNCS1 or name in _FUNCS2:
                self.fail(f"expected '(' after function name {name!r}", tok)
            self.fail(f"unknown identifier {name!r}", tok)
        if kind == "OP" and text == "(":
            self.advance()
            node = self.expr()
            if self.peek()[:2] != ("OP", ")"):
                self.fail("expected ')'")
            self.advance()
            return node
        if kind == "END":
            self.fail("unexpected end of expression")
        self.fail(f"unexpected token {text!r}")

    def call(self, name: str, tok) -> Node:
        if name not in _FUNCS1 and name not in _FUNCS2:
            self.fail(f"unknown function {name!r}", tok)
        self.advance()  # '('
        args = [self.expr()]
        while self.peek()[:2] == ("OP", ","):
            self.advance()
            args.append(self.expr())
        if self.peek()[:2] != ("OP", ")"):
            self.fail("expected ')' in call arguments")
        self.advance()
        arity = 1 if name in _FUNCS1 else 2
        if len(args) != arity:
            self.fail(f"{name} takes {arity} argument(s), got {len(args)}", tok)
        return Call(name, tuple(args))


def _compile(node: Node) -> Callable:
    if isinstance(node, Num):
        v = node.value
        return lambda env: v
    if isinstance(node, Var):
        if node.name == "pi":
            return lambda env: math.pi
        name = node.name
        return lambda env: env[name]
    if isinstance(node, Neg):
        f = _compile(node.arg)
        return lambda env: -f(env)
    if isinstance(node, Bin):
        lf, rf = _compile(node.left), _compile(node.right)
        op = node.op
        if op == "+":
            return lambda env: lf(env) + rf(env)
        if op == "-":
            return lambda env: lf(env) - rf(env)
        if op == "*":
            return lambda env: lf(env) * rf(env)
        if op == "/":
            return lambda env: lf(env) / rf(env)
        if op == "^":
            return lambda env: lf(env) ** rf(env)
    if isinstance(node, Call):
        fn = _FUNCS1.get(node.fn) or _FUNCS2[node.fn]
        fargs = [_compile(a) for a in node.args]
        if len(fargs) == 1:
            f0 = fargs[0]
            return lambda env: fn(f0(env))
        f0, f1 = fargs
        return lambda env: fn(f0(env), f1(env))
    raise TypeError(f"unknown node {node!r}")


# printer precedence levels; '^' re-parses correctly with these
_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4, "atom": 5}


def format_expr(node: Node) -> str:
    """Render an AST to a string that parses back to an identical AST."""

    def emit(n: Node) -> tuple[str, int]:
        if isinstance(n, Num):
            return repr(n.value), _PREC["atom"]
        if isinstance(n, Var):
            return n.name, _PREC["atom"]
        if isinstance(n, Neg):
            s, p = emit(n.arg)
            if p < _PREC["neg"]:
                s = f"({s})"
            return f"-{s}", _PREC["neg"]
        if isinstance(n, Call):
            return f"{n.fn}({', '.join(emit(a)[0] for a in n.args)})", _PREC["atom"]
        ls, lp = emit(n.left)
        rs, rp = emit(n.right)
        p = _PREC[n.op]
        if n.op == "^":
            # '^' is right-associative and parses a unary on the right
            if lp < _PREC["atom"]:
                ls = f"({ls})"
            if rp < _PREC["neg"]:
                rs = f"({rs})"
        else:
            if lp < p:
                ls = f"({ls})"
            # left-associative: parenthesize right child at equal precedence
            if rp <= p:
                rs = f"({rs})"
        return f"{ls} {n.op} {rs}", p

    return emit(node)[0]


@dataclass(frozen=True)
class Medium:
    """Parsed, immutable speed field g(x, t); safe for concurrent use."""

    dim: int
    source: str
    ast: Node
    _fn: Callable = field(repr=False, compare=False)

    def __call__(self, x, t):
        env = self._env(x, t)
        out = self._fn(env)
        if np.ndim(out) == 0:
            return float(out)
        return np.asarray(out, dtype=float)

    def _env(self, x, t) -> dict:
        env = {"t": np.asarray(t, dtype=float)}
        if self.dim == 1:
            env["x1"] = np.asarray(x, dtype=float)
        else:
            arr = np.asarray(x, dtype=float)
            if arr.shape[-1] != self.dim:
                raise ValidationError(
                    f"point has {arr.shape[-1]} coordinates, medium has dim {self.dim}"
                )
            for i in range(self.dim):
                env[f"x{i + 1}"] = arr[..., i]
        return env


def parse_medium(src: str, dim: int) -> Medium:
    """Parse an expression over x1..x{dim}, t into a Medium."""
    if not isinstance(dim, int) or dim < 1:
        raise ValidationError(f"dim must be an integer >= 1, got {dim!r}")
    if not src or not src.strip():
        raise ValidationError("empty medium expression")
    ast = _Parser(src, dim).parse()
    return Medium(dim=dim, source=src, ast=ast, _fn=_compile(ast))


# Named media used throughout the test battery and the CLI.
BUILTIN_MEDIA: dict[str, tuple[str, int]] = {
    "pinning": ("sin(pi*(x - t))^2 + 1", 1),
    "antipinning": ("sin(pi*(-x - t))^2 + 1", 1),
    "two_wave": ("sin(2*pi*(x - 3*t)) * sin(2*pi*(2*t + x)) + 11/10", 1),
    "static_sin": ("1 + sin(pi*x)^2", 1),
    "pinning2d": ("sin(pi*(x - t))^2 + 1", 2),
}

_builtin_cache: dict[str, Medium] = {}


def builtin_medium(name: str) -> Medium:
    """Look up a named medium from the registry."""
    if name not in BUILTIN_MEDIA:
        known = ", ".join(sorted(BUILTIN_MEDIA))
        raise ValidationError(f"unknown builtin medium {name!r} (known: {known})")
    if name not in _builtin_cache:
        src, dim = BUILTIN_MEDIA[name]
        _builtin_cache[name] = parse_medium(src, dim)
    return _builtin_cache[name]


def eval_scaled(g: Medium, eps: float, x, t):
    """Evaluate g(x/eps, t/eps), the eps-oscillatory rescaling of g."""
    if not eps > 0:
        raise ValidationError(f"eps must be > 0, got {eps}")
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    return g(x / eps, t / eps)


@dataclass(frozen=True)
class MediumBounds:
    """Sampled bounds 0 < m <= g <= M and finite-difference slope L."""

    m: float
    M: float
    L: float
    resolution: int


def estimate_bounds(g: Medium, resolution: int = 64) -> MediumBounds:
    """Min/max/max-slope of g over a unit cell sampled at resolution^d points.

    Sampling bounds are not certified: the true m is <= the reported m and
    the true M >= the reported M, off by at most L * (1/resolution).
    """
    if resolution < 8:
        raise ValidationError(f"resolution must be >= 8, got {resolution}")
    axes = np.arange(resolution) / resolution
    grids = np.meshgrid(*([axes] * (g.dim + 1)), indexing="ij", sparse=True)
    env = {f"x{i + 1}": grids[i] for i in range(g.dim)}
    env["t"] = grids[g.dim]
    vals = np.asarray(g._fn(env), dtype=float)
    vals = np.broadcast_to(vals, (resolution,) * (g.dim + 1))
    if not np.all(np.isfinite(vals)):
        raise ValidationError("medium evaluates to a non-finite value")
    m = float(vals.min())
    M = float(vals.max())
    if m <= 0:
        raise ValidationError(f"medium is not positive: sampled minimum {m}")
    L = 0.0
    for axis in range(g.dim + 1):
        slope = np.abs(np.roll(vals, -1, axis=axis) - vals).max() * resolution
        L = max(L, float(slope))
    return MediumBounds(m=m, M=M, L=L, resolution=resolution)


@dataclass(frozen=True)
class PeriodicityReport:
    max_deviation: float
    trials: int


def check_periodicity(g: Medium, trials: int = 32, seed: int = 0) -> PeriodicityReport:
    """Max |g(x+k, t+l) - g(x, t)| over random points and unit lattice shifts."""
    if trials < 1:
        raise ValidationError(f"trials must be >= 1, got {trials}")
    rng = np.random.default_rng(seed)
    pts = rng.uniform(0.0, 1.0, size=(trials, g.dim + 1))
    xs, ts = pts[:, : g.dim], pts[:, g.dim]
    if g.dim == 1:
        xs = xs[:, 0]
    base = np.asarray(g(xs, ts))
    worst = 0.0
    for axis in range(g.dim):
        shift = np.zeros(g.dim)
        shift[axis] = 1.0
        shifted = g(xs + (shift[0] if g.dim == 1 else shift), ts)
        worst = max(worst, float(np.abs(np.asarray(shifted) - base).max()))
    shifted = g(xs, ts + 1.0)
    worst = max(worst, float(np.abs(np.asarray(shifted) - base).max()))
    return PeriodicityReport(max_deviation=worst, trials=trials)
