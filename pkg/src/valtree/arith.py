"""Exact arithmetic: extended rationals, bivariate polynomials, branch
parameterizations and the substitution-order oracle."""

from __future__ import annotations

import os
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union


class ValtreeError(Exception):
    """Base class for domain errors (CLI exit code 1)."""


class ParseError(ValtreeError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class TruncationError(ValtreeError):
    """The working truncation order was too small to decide a result."""


class FieldExtensionError(ValtreeError):
    """A computation would need coefficients outside the rationals."""


# ---------------------------------------------------------------------------
# Extended rationals


class _Infinity:
    """The symbol +inf. Finite values are plain ``Fraction`` objects."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "inf"

    __str__ = __repr__

    def __hash__(self):
        return hash("valtree.inf")

    def __eq__(self, other):
        return other is self

    def __ne__(self, other):
        return other is not self

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __add__(self, other):
        if other is self or isinstance(other, (int, Fraction)):
            return self
        return NotImplemented

    __radd__ = __add__

    def __mul__(self, other):
        if other is self:
            return self
        if isinstance(other, (int, Fraction)):
            if other > 0:
                return self
            raise ValtreeError("0*inf and negative multiples of inf are undefined")
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)) and other > 0:
            return self
        raise ValtreeError("inf can only be divided by a positive rational")

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return Fraction(0)
        return NotImplemented

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()
ExtRat = Union[Fraction, _Infinity]


def is_inf(v) -> bool:
    return v is INF


def Q(v) -> ExtRat:
    """Coerce ints, strings ("p/q", "inf") and Fractions to an ExtRat."""
    if v is INF:
        return INF
    if isinstance(v, str):
        s = v.strip()
        if s in ("inf", "+inf", "oo"):
            return INF
        return Fraction(s)
    if isinstance(v, float):
        raise TypeError("floats are not accepted; use exact rationals")
    return Fraction(v)


def fmt_q(v: ExtRat) -> str:
    if v is INF:
        return "inf"
    v = Fraction(v)
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


# ---------------------------------------------------------------------------
# Bivariate polynomials


Mono = Tuple[int, int]


def _monokey(m: Mono):
    # graded lex with x < y
    return (m[0] + m[1], m[1])


class BiPoly:
    """Sparse polynomial in x, y with rational coefficients. Immutable."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Optional[Mapping[Mono, object]] = None):
        clean: Dict[Mono, Fraction] = {}
        if terms:
            for (i, j), c in terms.items():
                if i < 0 or j < 0:
                    raise ValueError("negative exponent")
                c = Fraction(c)
                if c:
                    clean[(int(i), int(j))] = clean.get((int(i), int(j)), Fraction(0)) + c
                    if not clean[(i, j)]:
                        del clean[(i, j)]
        self._terms = clean
        self._hash = None

    # constructors
    @classmethod
    def const(cls, c) -> "BiPoly":
        return cls({(0, 0): c})

    @classmethod
    def x(cls) -> "BiPoly":
        return cls({(1, 0): 1})

    @classmethod
    def y(cls) -> "BiPoly":
        return cls({(0, 1): 1})

    @classmethod
    def monomial(cls, i: int, j: int, c=1) -> "BiPoly":
        return cls({(i, j): c})

    @property
    def terms(self) -> Dict[Mono, Fraction]:
        return dict(self._terms)

    def items(self):
        return sorted(self._terms.items(), key=lambda kv: _monokey(kv[0]))

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        if isinstance(other, BiPoly):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self == BiPoly.const(other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __add__(self, other):
        other = _as_poly(other)
        t = dict(self._terms)
        for m, c in other._terms.items():
            t[m] = t.get(m, Fraction(0)) + c
        return BiPoly(t)

    __radd__ = __add__

    def __neg__(self):
        return BiPoly({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        other = _as_poly(other)
        t: Dict[Mono, Fraction] = {}
        for (i1, j1), c1 in self._terms.items():
            for (i2, j2), c2 in other._terms.items():
                k = (i1 + i2, j1 + j2)
                t[k] = t.get(k, Fraction(0)) + c1 * c2
        return BiPoly(t)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative exponent")
        result = BiPoly.const(1)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def scale(self, c) -> "BiPoly":
        return BiPoly({m: v * Fraction(c) for m, v in self._terms.items()})

    def deg_y(self) -> int:
        return max((j for (_, j) in self._terms), default=-1)

    def deg_x(self) -> int:
        return max((i for (i, _) in self._terms), default=-1)

    def total_degree(self) -> int:
        return max((i + j for (i, j) in self._terms), default=-1)

    def multiplicity(self) -> int:
        """Order m(phi) = min{i+j}; raises on the zero polynomial."""
        if not self._terms:
            raise ValtreeError("multiplicity of the zero polynomial")
        return min(i + j for (i, j) in self._terms)

    def coeff_y(self, j: int) -> "BiPoly":
        """Coefficient of y^j as a polynomial in x."""
        return BiPoly({(i, 0): c for (i, jj), c in self._terms.items() if jj == j})

    def swapped(self) -> "BiPoly":
        return BiPoly({(j, i): c for (i, j), c in self._terms.items()})

    def is_monic_in_y(self) -> bool:
        d = self.deg_y()
        return d >= 0 and self.coeff_y(d) == BiPoly.const(1)

    def __repr__(self):
        return f"BiPoly({format_poly(self)!r})"

    def __str__(self):
        return format_poly(self)


def _as_poly(v) -> BiPoly:
    if isinstance(v, BiPoly):
        return v
    return BiPoly.const(v)


def _fmt_monomial(c: Fraction, exps: Sequence[Tuple[str, int]]) -> str:
    parts = []
    for name, e in exps:
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    a = abs(c)
    if not parts:
        return fmt_q(a)
    if a == 1:
        return "*".join(parts)
    return fmt_q(a) + "*" + "*".join(parts)


def _join_terms(items: Iterable[Tuple[Fraction, str]]) -> str:
    out = ""
    for k, (c, body) in enumerate(items):
        if k == 0:
            out = ("-" if c < 0 else "") + body
        else:
            out += (" - " if c < 0 else " + ") + body
    return out or "0"


def format_poly(p: BiPoly) -> str:
    return _join_terms((c, _fmt_monomial(c, (("x", i), ("y", j)))) for (i, j), c in p.items())


def format_upoly(coeffs: Mapping[int, Fraction], var: str = "t") -> str:
    items = sorted((e, Fraction(c)) for e, c in coeffs.items() if c)
    return _join_terms((c, _fmt_monomial(c, ((var, e),))) for e, c in items)


# ---------------------------------------------------------------------------
# Parser

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_]\w*)|(.))")


class _Parser:
    def __init__(self, text: str, variables: Sequence[str]):
        self.text = text
        self.vars = list(variables)
        self.pos = 0

    def _skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self._skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def error(self, msg: str):
        raise ParseError(msg, self.pos)

    def expect(self, ch: str):
        if self.peek() != ch:
            self.error(f"expected '{ch}'" if self.peek() else "unexpected end of input")
        self.pos += 1

    def number(self) -> int:
        self._skip()
        m = re.compile(r"\d+").match(self.text, self.pos)
        if not m:
            self.error("expected integer" if self.peek() else "unexpected end of input")
        self.pos = m.end()
        return int(m.group())

    # grammar: expr := term (('+'|'-') term)* ; term := unary ('*'? unary)* ;
    # unary := ('+'|'-') unary | power ; power := atom ('^' int)?
    def expr(self) -> Dict[tuple, Fraction]:
        acc = self.term()
        while self.peek() in ("+", "-"):
            op = self.peek()
            self.pos += 1
            rhs = self.term()
            acc = _padd(acc, rhs if op == "+" else _pscale(rhs, -1))
        return acc

    def term(self):
        acc = self.unary()
        while True:
            ch = self.peek()
            if ch == "*":
                self.pos += 1
                acc = _pmul(acc, self.unary())
            elif ch == "(" or ch.isalpha() or ch.isdigit():
                acc = _pmul(acc, self.unary())
            else:
                return acc

    def unary(self):
        ch = self.peek()
        if ch in ("+", "-"):
            self.pos += 1
            inner = self.unary()
            return inner if ch == "+" else _pscale(inner, -1)
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek() == "^":
            self.pos += 1
            if self.peek() == "-":
                self.error("negative exponent")
            e = self.number()
            return _ppow(base, e, len(self.vars))
        return base

    def atom(self):
        ch = self.peek()
        nv = len(self.vars)
        if ch == "":
            self.error("unexpected end of input")
        if ch == "(":
            self.pos += 1
            inner = self.expr()
            self.expect(")")
            return inner
        if ch.isdigit():
            num = self.number()
            den = 1
            save = self.pos
            if self.peek() == "/":
                self.pos += 1
                if not self.peek().isdigit():
                    self.pos = save
                    self.error("expected denominator")
                den = self.number()
                if den == 0:
                    self.error("zero denominator")
            return {(0,) * nv: Fraction(num, den)}
        if ch.isalpha():
            self._skip()
            m = re.compile(r"[A-Za-z_]").match(self.text, self.pos)
            name = m.group()
            if name not in self.vars:
                self.error(f"unknown variable '{name}'")
            self.pos += 1
            e = [0] * nv
            e[self.vars.index(name)] = 1
            return {tuple(e): Fraction(1)}
        self.error(f"unexpected character '{ch}'")


def _padd(a, b):
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, Fraction(0)) + v
        if not out[k]:
            del out[k]
    return out


def _pscale(a, c):
    return {k: v * c for k, v in a.items()}


def _pmul(a, b):
    out: Dict[tuple, Fraction] = {}
    for k1, v1 in a.items():
        for k2, v2 in b.items():
            k = tuple(p + q for p, q in zip(k1, k2))
            out[k] = out.get(k, Fraction(0)) + v1 * v2
    return {k: v for k, v in out.items() if v}


def _ppow(a, e, nv):
    out = {(0,) * nv: Fraction(1)}
    for _ in range(e):
        out = _pmul(out, a)
    return out


def _parse(text: str, variables: Sequence[str]):
    p = _Parser(text, variables)
    result = p.expr()
    if p.peek() != "":
        p.error(f"unexpected character '{p.peek()}'")
    return result


def parse_poly(text: str) -> BiPoly:
    """Parse an expression in x, y with rational coefficients."""
    return BiPoly({k: v for k, v in _parse(text, ("x", "y")).items()})


def parse_upoly(text: str, var: str = "t") -> Dict[int, Fraction]:
    return {k[0]: v for k, v in _parse(text, (var,)).items()}


# ---------------------------------------------------------------------------
# Truncated univariate series (dense coefficient lists of length T)


def _smul(a: List[Fraction], b: List[Fraction], T: int) -> List[Fraction]:
    out = [Fraction(0)] * T
    nz_b = [(j, c) for j, c in enumerate(b[:T]) if c]
    for i, ca in enumerate(a[:T]):
        if not ca:
            continue
        for j, cb in nz_b:
            if i + j >= T:
                break
            out[i + j] += ca * cb
    return out


def series_order(s: Sequence[Fraction]) -> Optional[int]:
    for i, c in enumerate(s):
        if c:
            return i
    return None


def _dense(coeffs: Mapping[int, Fraction], T: int) -> List[Fraction]:
    out = [Fraction(0)] * T
    for e, c in coeffs.items():
        if e < T:
            out[e] += Fraction(c)
    return out


def _upoly_mul(a: Mapping[int, Fraction], b: Mapping[int, Fraction]) -> Dict[int, Fraction]:
    out: Dict[int, Fraction] = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            out[e1 + e2] = out.get(e1 + e2, Fraction(0)) + c1 * c2
    return {e: c for e, c in out.items() if c}


# ---------------------------------------------------------------------------
# Branch parameterizations


@dataclass(frozen=True)
class ArithConfig:
    """Truncation policy for series computations."""

    trunc: Optional[int] = None  # None: 4*(largest exponent)+8, or $VALTREE_TRUNC
    trunc_cap: int = 1 << 14


def default_trunc(max_exponent: int) -> int:
    env = os.environ.get("VALTREE_TRUNC")
    if env:
        try:
            val = int(env)
        except ValueError:
            raise ValtreeError(f"VALTREE_TRUNC must be an integer, got {env!r}")
        if val <= 0:
            raise ValtreeError("VALTREE_TRUNC must be positive")
        return val
    return 4 * max_exponent + 8


@dataclass(frozen=True)
class BranchParam:
    """Primitive parameterization of an irreducible branch.

    In working coordinates the branch is t -> (X(t), Y(t)) with X = t^n unless
    ``xcoeffs`` is given. ``swap`` means the working coordinates are (y, x),
    which is how branches tangent to {x=0} are stored.
    """

    n: int
    ycoeffs: Tuple[Tuple[int, Fraction], ...] = ()
    xcoeffs: Optional[Tuple[Tuple[int, Fraction], ...]] = None
    swap: bool = False
    trunc: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "ycoeffs", _norm_coeffs(self.ycoeffs))
        if self.xcoeffs is not None:
            xc = _norm_coeffs(self.xcoeffs)
            object.__setattr__(self, "xcoeffs", None if xc == ((self.n, Fraction(1)),) else xc)
        self._validate()

    def _validate(self):
        n = self.n
        if not isinstance(n, int) or n < 1:
            raise ValtreeError("branch multiplicity n must be a positive integer")
        X = self.xdict()
        if not X or min(X) != n:
            raise ValtreeError("x(t) must have order exactly n")
        Y = self.ydict()
        if Y:
            oy = min(Y)
            if oy < n:
                raise ValtreeError("branch not transverse to {x=0}: y(t) has order below n")
            if self.swap and oy == n:
                raise ValtreeError("swapped branch must be tangent to the swapped axis")
        g = n
        for e in list(X) + list(Y):
            g = gcd(g, e)
        if g != 1:
            raise ValtreeError("parameterization is not primitive (exponent gcd > 1)")

    def xdict(self) -> Dict[int, Fraction]:
        if self.xcoeffs is None:
            return {self.n: Fraction(1)}
        return dict(self.xcoeffs)

    def ydict(self) -> Dict[int, Fraction]:
        return dict(self.ycoeffs)

    @property
    def puiseux_form(self) -> bool:
        return self.xcoeffs is None

    def max_exponent(self) -> int:
        return max(list(self.xdict()) + list(self.ydict()) + [self.n])

    def original_param(self) -> Tuple[Dict[int, Fraction], Dict[int, Fraction]]:
        """(x(t), y(t)) in the input coordinates."""
        X, Y = self.xdict(), self.ydict()
        return (Y, X) if self.swap else (X, Y)

    def with_trunc(self, T: int) -> "BranchParam":
        return BranchParam(self.n, self.ycoeffs, self.xcoeffs, self.swap, T)

    def to_text(self) -> str:
        X, Y = self.original_param()
        if self.swap or self.xcoeffs is not None:
            return f"n={self.n}; x={format_upoly(X)}; y={format_upoly(Y)}"
        return f"n={self.n}; y={format_upoly(Y)}"

    def __str__(self):
        return self.to_text()


def _norm_coeffs(c) -> Tuple[Tuple[int, Fraction], ...]:
    if isinstance(c, Mapping):
        items = c.items()
    else:
        items = c
    d: Dict[int, Fraction] = {}
    for e, v in items:
        e = int(e)
        if e < 0:
            raise ValtreeError("negative exponent in parameterization")
        d[e] = d.get(e, Fraction(0)) + Fraction(v)
    return tuple(sorted((e, v) for e, v in d.items() if v))


def branch_from_xy(X: Mapping[int, Fraction], Y: Mapping[int, Fraction], n: Optional[int] = None,
                   trunc: Optional[int] = None) -> BranchParam:
    """Canonical BranchParam of t -> (X(t), Y(t)) given in input coordinates."""
    X = {e: Fraction(c) for e, c in X.items() if c}
    Y = {e: Fraction(c) for e, c in Y.items() if c}
    if 0 in X or 0 in Y:
        raise ValtreeError("branch must pass through the origin (no constant terms)")
    ox = min(X) if X else None
    oy = min(Y) if Y else None
    if ox is None and oy is None:
        raise ValtreeError("constant parameterization")
    swap = ox is None or (oy is not None and oy < ox)
    WX, WY = (Y, X) if swap else (X, Y)
    m = min(WX)
    if n is not None and n != m:
        raise ValtreeError(f"declared n={n} but the parameterization has multiplicity {m}")
    xc = None if WX == {m: Fraction(1)} else tuple(sorted(WX.items()))
    return BranchParam(m, tuple(sorted(WY.items())), xc, swap, trunc)


def parse_branch(text: str) -> BranchParam:
    """Parse ``[branch] n=<int>; [x = <poly in t>;] y = <poly in t>``."""
    s = text.strip()
    if s.startswith("branch"):
        s = s[len("branch"):]
    fields: Dict[str, str] = {}
    for part in s.split(";"):
        if not part.strip():
            continue
        if "=" not in part:
            raise ValtreeError(f"malformed branch field {part.strip()!r}")
        k, v = part.split("=", 1)
        k = k.strip()
        if k not in ("n", "x", "y", "trunc") or k in fields:
            raise ValtreeError(f"unexpected branch field {k!r}")
        fields[k] = v.strip()
    if "y" not in fields:
        raise ValtreeError("branch needs a 'y = ...' field")
    try:
        n = int(fields["n"]) if "n" in fields else None
    except ValueError:
        raise ValtreeError("n must be an integer")
    trunc = int(fields["trunc"]) if "trunc" in fields else None
    Y = parse_upoly(fields["y"])
    if "x" in fields:
        X = parse_upoly(fields["x"])
    else:
        if n is None:
            raise ValtreeError("branch needs 'n=' when x is not given")
        X = {n: Fraction(1)}
    return branch_from_xy(X, Y, n, trunc)


# ---------------------------------------------------------------------------
# Weierstrass division and the substitution oracle


def weierstrass_divide(phi: BiPoly, U: BiPoly) -> List[BiPoly]:
    """Expansion phi = sum_j phi_j U^j with deg_y phi_j < deg_y U."""
    if not U.is_monic_in_y():
        raise ValtreeError("divisor is not monic in y")
    d = U.deg_y()
    if d == 0:
        raise ValtreeError("divisor must have positive degree in y")
    out: List[BiPoly] = []
    cur = phi
    while True:
        q, r = _divmod_y(cur, U, d)
        out.append(r)
        if q.is_zero():
            break
        cur = q
    return out


def _divmod_y(phi: BiPoly, U: BiPoly, d: int) -> Tuple[BiPoly, BiPoly]:
    rem = dict(phi.terms)
    quot: Dict[Mono, Fraction] = {}
    lower = [(m, c) for m, c in U.terms.items() if m[1] < d]
    while True:
        top = max((j for (_, j) in rem), default=-1)
        if top < d:
            break
        for (i, j) in [m for m in rem if m[1] == top]:
            c = rem.pop((i, j))
            qm = (i, j - d)
            quot[qm] = quot.get(qm, Fraction(0)) + c
            for (a, b), cu in lower:
                k = (i + a, j - d + b)
                v = rem.get(k, Fraction(0)) - c * cu
                if v:
                    rem[k] = v
                else:
                    rem.pop(k, None)
    return BiPoly(quot), BiPoly(rem)


def compose_series(phi: BiPoly, C: BranchParam, T: int) -> List[Fraction]:
    """phi(X(t), Y(t)) mod t^T, in working coordinates of C."""
    if C.swap:
        phi = phi.swapped()
    X = _dense(C.xdict(), T)
    Y = _dense(C.ydict(), T)
    xp = [_dense({0: Fraction(1)}, T)]
    yp = [_dense({0: Fraction(1)}, T)]
    out = [Fraction(0)] * T
    for (i, j), c in phi.items():
        while len(xp) <= i:
            xp.append(_smul(xp[-1], X, T))
        while len(yp) <= j:
            yp.append(_smul(yp[-1], Y, T))
        prod = _smul(xp[i], yp[j], T)
        for k, v in enumerate(prod):
            if v:
                out[k] += c * v
    return out


def compose_exact(phi: BiPoly, C: BranchParam) -> Dict[int, Fraction]:
    """phi(X(t), Y(t)) as an exact polynomial in t (working coordinates)."""
    if C.swap:
        phi = phi.swapped()
    X, Y = C.xdict(), C.ydict()
    out: Dict[int, Fraction] = {}
    xp = [{0: Fraction(1)}]
    yp = [{0: Fraction(1)}]
    for (i, j), c in phi.items():
        while len(xp) <= i:
            xp.append(_upoly_mul(xp[-1], X))
        while len(yp) <= j:
            yp.append(_upoly_mul(yp[-1], Y))
        for e, v in _upoly_mul(xp[i], yp[j]).items():
            out[e] = out.get(e, Fraction(0)) + c * v
    return {e: v for e, v in out.items() if v}


def weierstrass_polynomial(C: BranchParam) -> BiPoly:
    """prod over n-th roots of unity of (y - Y(zeta t)), working coordinates.

    Only defined when X = t^n; computed exactly from power sums via Newton's
    identities, so no roots of unity appear.
    """
    if not C.puiseux_form:
        raise ValtreeError("Weierstrass polynomial needs x = t^n")
    return _weierstrass_cached(C.n, C.ycoeffs)


@lru_cache(maxsize=256)
def _weierstrass_cached(n: int, ycoeffs) -> BiPoly:
    Y = dict(ycoeffs)
    # power sums p_k(t) = n * (part of Y^k with exponents divisible by n)
    p: List[Dict[int, Fraction]] = [{}]
    Yk: Dict[int, Fraction] = {0: Fraction(1)}
    for _ in range(1, n + 1):
        Yk = _upoly_mul(Yk, Y)
        p.append({e: n * c for e, c in Yk.items() if e % n == 0})
    e: List[Dict[int, Fraction]] = [{0: Fraction(1)}]
    for k in range(1, n + 1):
        acc: Dict[int, Fraction] = {}
        for i in range(1, k + 1):
            term = _upoly_mul(e[k - i], p[i])
            sign = 1 if i % 2 == 1 else -1
            for ex, c in term.items():
                acc[ex] = acc.get(ex, Fraction(0)) + sign * c
        e.append({ex: c / k for ex, c in acc.items() if c})
    terms: Dict[Mono, Fraction] = {}
    for k in range(n + 1):
        sign = 1 if k % 2 == 0 else -1
        for ex, c in e[k].items():
            assert ex % n == 0
            terms[(ex // n, n - k)] = terms.get((ex // n, n - k), Fraction(0)) + sign * c
    W = BiPoly(terms)
    return W


def branch_equation(C: BranchParam) -> BiPoly:
    """Weierstrass polynomial of C in input coordinates."""
    W = weierstrass_polynomial(C)
    return W.swapped() if C.swap else W


def _trunc_for(phi: BiPoly, C: BranchParam, cfg: ArithConfig) -> int:
    if C.trunc is not None:
        return C.trunc
    if cfg.trunc is not None:
        return cfg.trunc
    return default_trunc(max(C.max_exponent(), phi.total_degree(), 1))


def substitute_order_once(phi: BiPoly, C: BranchParam, T: int) -> ExtRat:
    """ord_t phi(C) computed modulo t^T; raises TruncationError if undecided."""
    if phi.is_zero():
        raise ValtreeError("substitute_order of the zero polynomial")
    s = compose_series(phi, C, T)
    o = series_order(s)
    if o is not None:
        return Fraction(o)
    # zero modulo t^T: confirm by divisibility (or exact composition)
    if C.puiseux_form:
        W = weierstrass_polynomial(C)
        ph = phi.swapped() if C.swap else phi
        if _divmod_y(ph, W, W.deg_y())[1].is_zero():
            return INF
    elif not compose_exact(phi, C):
        return INF
    raise TruncationError(f"truncation T={T} insufficient")


def substitute_order(phi: BiPoly, C: BranchParam, cfg: ArithConfig = ArithConfig()) -> ExtRat:
    """ord_t phi(X(t), Y(t)), doubling the truncation until decided."""
    T = _trunc_for(phi, C, cfg)
    while True:
        try:
            return substitute_order_once(phi, C, T)
        except TruncationError:
            if T >= cfg.trunc_cap:
                raise
            T = min(2 * T, cfg.trunc_cap)


def intersection_number(C: BranchParam, D: BranchParam, cfg: ArithConfig = ArithConfig()) -> ExtRat:
    """C.D = ord_t of an equation of one branch along the other."""
    if C.puiseux_form:
        return substitute_order(branch_equation(C), D, cfg)
    if D.puiseux_form:
        return substitute_order(branch_equation(D), C, cfg)
    raise ValtreeError("intersection number needs one branch with x = t^n")
