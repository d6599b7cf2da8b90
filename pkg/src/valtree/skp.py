"""Sequences of key polynomials (SKPs): the representation of centered
valuations used throughout the package, with evaluation, comparison,
infima and tree invariants."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import List, Optional, Sequence, Tuple

from .arith import (
    INF,
    ArithConfig,
    BiPoly,
    BranchParam,
    ExtRat,
    TruncationError,
    ValtreeError,
    compose_exact,
    compose_series,
    default_trunc,
    fmt_q,
    format_poly,
    intersection_number,
    parse_poly,
    Q,
    series_order,
    _smul,
)

X = BiPoly.x()
Y = BiPoly.y()


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


@dataclass(frozen=True)
class SKP:
    """[(U_0..U_k); (b_0..b_k)] in working coordinates.

    ``swap`` means the working coordinates are (y, x). ``truncated`` marks a
    finite prefix of the infinite SKP of a curve valuation; ``source`` then
    holds the branch so the prefix can be extended on demand.
    """

    keys: Tuple[BiPoly, ...]
    values: Tuple[ExtRat, ...]
    swap: bool = False
    truncated: bool = False
    source: Optional[BranchParam] = field(default=None, compare=False, repr=False)

    @property
    def k(self) -> int:
        return len(self.keys) - 1

    def prefix(self, j: int) -> "SKP":
        """Truncation [(U_0..U_j); (b_0..b_j)]."""
        if j >= self.k and not self.truncated:
            return self
        return SKP(self.keys[: j + 1], self.values[: j + 1], self.swap)

    def with_last(self, v: ExtRat) -> "SKP":
        return SKP(self.keys, self.values[:-1] + (v,), self.swap)

    def data(self):
        return (self.swap, self.keys, self.values, self.truncated)

    def __str__(self):
        return skp_to_text(self)


NU_M = SKP((X, Y), (Fraction(1), Fraction(1)))


@dataclass(frozen=True)
class KeyData:
    """Derived data at index j: n_j, m_{j,l}, d_j and theta_j (None at the top)."""

    n: Optional[int]
    m: Tuple[int, ...]
    d: int
    theta: Optional[Fraction]


class SKPViolation(ValtreeError):
    def __init__(self, rule: str, message: str):
        super().__init__(f"({rule}) {message}")
        self.rule = rule


# ---------------------------------------------------------------------------
# arithmetic lemma


def _decompose(values: Sequence[Fraction], j: int) -> Tuple[int, Tuple[int, ...]]:
    """n_j and the unique (m_{j,0},..,m_{j,j-1}) with n_j b_j = sum m_{j,l} b_l."""
    D = [1]  # D[l]: span of b_0..b_{l-1} is (1/D[l]) Z
    ns = []
    for l in range(1, j + 1):
        D.append(_lcm(D[-1], Fraction(values[l - 1]).denominator))
    for l in range(1, j + 1):
        q = Fraction(values[l]).denominator
        ns.append(q // gcd(q, D[l]))
    nj = ns[j - 1]
    r = nj * Fraction(values[j])
    ms = [0] * j
    for l in range(j - 1, 0, -1):
        nl = ns[l - 1]
        for cand in range(nl):
            rest = r - cand * Fraction(values[l])
            if (rest * D[l]).denominator == 1:
                ms[l] = cand
                r = rest
                break
        else:  # pragma: no cover - impossible by construction
            raise SKPViolation("P1", "no decomposition")
    if r.denominator != 1:
        raise SKPViolation("P1", "decomposition not integral")
    ms[0] = int(r)
    return nj, tuple(ms)


def key_data(s: SKP) -> Tuple[KeyData, ...]:
    return _key_data(s.keys, s.values)


@lru_cache(maxsize=4096)
def _key_data(keys, values) -> Tuple[KeyData, ...]:
    out = [KeyData(None, (), 0, None)]
    k = len(keys) - 1
    for j in range(1, k + 1):
        d = keys[j].deg_y()
        if values[j] is INF:
            out.append(KeyData(None, (), d, None))
            continue
        nj, ms = _decompose(values, j)
        theta = None
        if j < k:
            diff = keys[j] ** nj - keys[j + 1]
            mono = BiPoly.const(1)
            for l, e in enumerate(ms):
                mono = mono * keys[l] ** e
            theta = _ratio(diff, mono)
        out.append(KeyData(nj, ms, d, theta))
    return tuple(out)


def _ratio(a: BiPoly, b: BiPoly) -> Optional[Fraction]:
    if a.is_zero() or b.is_zero():
        return None
    m, c = next(iter(b.items()))
    theta = a.terms.get(m, Fraction(0)) / c
    if theta and b.scale(theta) == a:
        return theta
    return None


def validate(s: SKP) -> Optional[str]:
    """None if s satisfies every SKP condition, else a description of the first violation."""
    try:
        _validate(s)
    except SKPViolation as e:
        return str(e)
    return None


def check(s: SKP) -> SKP:
    _validate(s)
    return s


def _validate(s: SKP):
    keys, vals = s.keys, s.values
    if len(keys) != len(vals):
        raise SKPViolation("shape", "keys and values differ in length")
    if len(keys) < 2:
        raise SKPViolation("P0", "an SKP needs at least U_0 and U_1")
    if keys[0] != X or keys[1] != Y:
        raise SKPViolation("P0", "U_0 must be x and U_1 must be y")
    for j, v in enumerate(vals):
        if v is not INF and not isinstance(v, Fraction):
            raise SKPViolation("shape", "values must be rationals or inf")
        if v is INF and j < len(vals) - 1:
            raise SKPViolation("P1", "only the last value may be infinite")
        if v is not INF and v <= 0:
            raise SKPViolation("P1", "values must be positive")
    if vals[0] != 1 or vals[1] < 1:
        raise SKPViolation("norm", "normalization requires b_0 = 1 <= b_1")
    if s.swap and vals[1] == 1:
        raise SKPViolation("norm", "swapped SKP must have b_1 > b_0")
    k = len(keys) - 1
    for j in range(1, k):
        nj, ms = _decompose(vals, j)
        if ms[0] < 0:
            raise SKPViolation("P1", f"m_{{{j},0}} = {ms[0]} is negative")
        if not vals[j + 1] > nj * vals[j]:
            raise SKPViolation("P1", f"b_{j+1} <= n_{j} b_{j}")
        diff = keys[j] ** nj - keys[j + 1]
        mono = BiPoly.const(1)
        for l, e in enumerate(ms):
            mono = mono * keys[l] ** e
        if _ratio(diff, mono) is None:
            raise SKPViolation("P2", f"U_{j+1} is not U_{j}^{nj} - theta*prod U_l^m")
    if k >= 1 and vals[k] is not INF:
        _, ms = _decompose(vals, k)
        if ms[0] < 0:
            raise SKPViolation("P1", f"m_{{{k},0}} is negative")


def make_skp(keys: Sequence, values: Sequence, swap: bool = False) -> SKP:
    """Build, normalize (min(b_0,b_1)=1) and validate an SKP.

    A length-one SKP with b_1 < b_0 is rewritten in swapped coordinates.
    """
    keys = tuple(k if isinstance(k, BiPoly) else parse_poly(str(k)) for k in keys)
    vals = [Q(v) for v in values]
    if len(vals) < 2:
        raise SKPViolation("P0", "an SKP needs at least U_0 and U_1")
    if vals[0] is INF:
        raise SKPViolation("norm", "b_0 must be finite")
    if vals[1] is not INF and vals[1] < vals[0]:
        if len(vals) > 2:
            raise SKPViolation("norm", "b_1 < b_0: give the SKP in swapped coordinates")
        vals = [vals[1], vals[0]]
        swap = not swap
    scale = vals[0]
    if scale <= 0:
        raise SKPViolation("P1", "values must be positive")
    vals = tuple(v if v is INF else v / scale for v in vals)
    s = SKP(keys, vals, swap)
    if vals[1] == 1 and len(vals) == 2:
        s = SKP(keys, vals, False)
    return check(s)


def monomial_skp(vx, vy) -> SKP:
    """Monomial valuation with nu(x)=vx, nu(y)=vy (input coordinates)."""
    return make_skp((X, Y), (vx, vy))


# ---------------------------------------------------------------------------
# evaluation


@lru_cache(maxsize=200000)
def _eval_w(keys, values, phi: BiPoly) -> ExtRat:
    if phi.is_zero():
        return INF
    k = len(keys) - 1
    if k == 1:
        b0, b1 = values
        best = INF
        for (i, j), _ in phi.items():
            v = i * b0 if j == 0 else i * b0 + j * b1
            if v < best:
                best = v
        return best
    parts = weierstrass_divide_cached(phi, keys[k])
    best = INF
    for j, pj in enumerate(parts):
        if pj.is_zero():
            continue
        if j and values[k] is INF:
            continue
        v = _eval_w(keys[:k], values[:k], pj)
        if j:
            v = v + j * values[k]
        if v < best:
            best = v
    return best


@lru_cache(maxsize=100000)
def weierstrass_divide_cached(phi: BiPoly, U: BiPoly):
    from .arith import weierstrass_divide

    return tuple(weierstrass_divide(phi, U))


def eval_skp(s: SKP, phi: BiPoly) -> ExtRat:
    """Value of phi under the valuation of s (input coordinates)."""
    if isinstance(phi, str):
        phi = parse_poly(phi)
    if phi.is_zero():
        return INF
    w = phi.swapped() if s.swap else phi
    if not s.truncated:
        return _eval_w(s.keys, s.values, w)
    return _eval_truncated(s, w)


def _eval_truncated(s: SKP, w: BiPoly) -> ExtRat:
    cur = s
    for _ in range(256):
        k = cur.k
        parts = weierstrass_divide_cached(w, cur.keys[k])
        cands = []
        for j, pj in enumerate(parts):
            if pj.is_zero():
                continue
            v = _eval_w(cur.keys[:k], cur.values[:k], pj)
            cands.append(v + j * cur.values[k] if j else v)
        best = min(cands)
        if cands.count(best) == 1:
            return best
        if cur.source is None:
            raise TruncationError("truncated SKP cannot be extended")
        phi = w.swapped() if s.swap else w
        if not compose_exact(phi, cur.source):
            return INF
        cur = extend(cur)
        if not cur.truncated:
            return _eval_w(cur.keys, cur.values, w)
    raise TruncationError("evaluation did not stabilize")


# alias matching the operation name
eval = eval_skp  # noqa: A001


# ---------------------------------------------------------------------------
# SKP of a branch


@dataclass(frozen=True)
class SKPConfig:
    """Controls how far the tail of a curve SKP is expanded."""

    max_keys: int = 64
    arith: ArithConfig = ArithConfig()


def skp_of_branch(C: BranchParam, min_keys: int = 0, cfg: SKPConfig = SKPConfig()) -> SKP:
    """The SKP of the curve valuation nu_C, normalized so that nu_C(m) = 1.

    Stops at the key with infinite value; if the polynomial keys never reach
    the branch equation, returns a prefix tagged ``truncated`` that already
    contains every key of degree below m(C).
    """
    return _skp_of_branch(C, min_keys, cfg)


@lru_cache(maxsize=1024)
def _skp_of_branch(C: BranchParam, min_keys: int, cfg: SKPConfig) -> SKP:
    T = C.trunc or cfg.arith.trunc or default_trunc(C.max_exponent())
    while True:
        try:
            return _skp_of_branch_T(C, min_keys, cfg, T)
        except TruncationError:
            if T >= cfg.arith.trunc_cap:
                raise
            T = min(2 * T, cfg.arith.trunc_cap)


def _skp_of_branch_T(C: BranchParam, min_keys: int, cfg: SKPConfig, T: int) -> SKP:
    n = C.n
    Xs = compose_series(X.swapped() if C.swap else X, C, T)
    Ys = compose_series(Y.swapped() if C.swap else Y, C, T)
    if series_order(Xs) != n:
        raise TruncationError("x(t) not visible at this truncation")
    keys: List[BiPoly] = [X, Y]
    series: List[List[Fraction]] = [Xs, Ys]
    vals: List[ExtRat] = [Fraction(1), _value_of(Y, Ys, C, n)]
    degs = [0, 1]
    cap = Fraction(2 * C.max_exponent(), n) + 2
    while vals[-1] is not INF:
        j = len(keys) - 1
        if degs[j] == n and len(keys) >= 3 - (1 if n == 1 else 0):
            done = len(keys) >= min_keys if min_keys else vals[j] > cap
            if done or len(keys) >= cfg.max_keys:
                return SKP(tuple(keys), tuple(vals), C.swap, True, C)
        nj, ms = _decompose(vals, j)
        if ms[0] < 0:  # pragma: no cover - cannot happen for branches
            raise ValtreeError("inconsistent key values")
        A = [Fraction(0)] * T
        A[0] = Fraction(1)
        for _ in range(nj):
            A = _smul(A, series[j], T)
        B = [Fraction(0)] * T
        B[0] = Fraction(1)
        mono = BiPoly.const(1)
        for l, e in enumerate(ms):
            for _ in range(e):
                B = _smul(B, series[l], T)
            mono = mono * keys[l] ** e
        oa, ob = series_order(A), series_order(B)
        if oa is None or ob is None:
            raise TruncationError("leading terms beyond truncation")
        if oa != ob:
            raise ValtreeError("internal error: key leading orders differ")
        theta = A[oa] / B[ob]
        S = [a - theta * b for a, b in zip(A, B)]
        U = keys[j] ** nj - mono.scale(theta)
        keys.append(U)
        series.append(S)
        degs.append(degs[j] * nj)
        vals.append(_value_of(U, S, C, n))
    return SKP(tuple(keys), tuple(vals), C.swap, False, C)


def _value_of(U: BiPoly, S, C: BranchParam, n: int) -> ExtRat:
    o = series_order(S)
    if o is not None:
        return Fraction(o, n)
    if not compose_exact(U.swapped() if C.swap else U, C):
        return INF
    raise TruncationError("key value beyond truncation")


def extend(s: SKP) -> SKP:
    """A longer prefix of the same curve SKP."""
    if not s.truncated or s.source is None:
        return s
    return skp_of_branch(s.source, len(s.keys) + 1)


# ---------------------------------------------------------------------------
# order structure


def _same(s: SKP, t: SKP) -> bool:
    if s.truncated != t.truncated:
        return False
    if s.truncated:
        if s.source is not None and s.source == t.source:
            return True
        if s.data() != t.data():
            return False
        if s.source is None or t.source is None:
            return True
        # equal prefixes do not make equal curves; two branches coincide iff C.D = inf
        if s.source.puiseux_form or t.source.puiseux_form:
            return intersection_number(s.source, t.source) is INF
        return False
    return s.data() == t.data()


def wedge(s: SKP, t: SKP) -> SKP:
    """Infimum of two valuations in the valuative tree."""
    if _same(s, t):
        return s if len(s.keys) >= len(t.keys) else t
    if s.swap != t.swap:
        return NU_M
    for _ in range(512):
        ks, kt = s.k, t.k
        k = 1
        while (k + 1 <= min(ks, kt) and s.keys[k + 1] == t.keys[k + 1]
               and s.values[k] == t.values[k]):
            k += 1
        if s.values[k] == t.values[k] and s.keys[k] == t.keys[k]:
            s_out = k == ks and s.truncated
            t_out = k == kt and t.truncated
            if (s_out and (kt > k or t.truncated)) or (t_out and (ks > k or s.truncated)):
                if s_out:
                    s = extend(s)
                if t_out:
                    t = extend(t)
                if _same(s, t):
                    return s
                continue
        v = min(s.values[k], t.values[k])
        return SKP(s.keys[: k + 1], s.values[:k] + (v,), s.swap)
    raise TruncationError("wedge did not separate the two valuations (are the branches equal?)")


def compare(s: SKP, t: SKP) -> str:
    """'equal', 'less', 'greater' or 'incomparable'."""
    if _same(s, t):
        return "equal"
    w = wedge(s, t)
    if w.data() == s.data():
        return "less"
    if w.data() == t.data():
        return "greater"
    return "incomparable"


def leq(s: SKP, t: SKP) -> bool:
    return compare(s, t) in ("equal", "less")


# ---------------------------------------------------------------------------
# invariants


def is_curve(s: SKP) -> bool:
    return s.truncated or s.values[-1] is INF


def multiplicity(s: SKP) -> int:
    return s.keys[-1].deg_y()


def skewness(s: SKP) -> ExtRat:
    if is_curve(s):
        return INF
    return s.values[-1] / s.keys[-1].deg_y()


def generic_multiplicity(s: SKP) -> Optional[int]:
    if is_curve(s):
        return None
    nk, _ = _decompose(s.values, s.k)
    return nk * s.keys[-1].deg_y()


def approximating_indices(s: SKP) -> List[int]:
    kd = key_data(s)
    return [j for j in range(1, s.k) if kd[j].n is not None and kd[j].n >= 2]


@dataclass(frozen=True)
class ApproxElement:
    k: int
    m: int
    alpha: Fraction
    A: Fraction


@dataclass(frozen=True)
class InvariantReport:
    kind: str
    rk: int
    rat_rk: int
    tr_deg: int
    alpha: ExtRat
    A: ExtRat
    m: int
    b: Optional[int]
    approx: Tuple[ApproxElement, ...]
    semigroup: Tuple[ExtRat, ...]
    monomial: bool


def approximating_sequence(s: SKP) -> List[ApproxElement]:
    out = []
    a_prev, A_prev = Fraction(1), Fraction(2)
    for j in approximating_indices(s):
        d = s.keys[j].deg_y()
        a = s.values[j] / d
        A = A_prev + d * (a - a_prev)
        out.append(ApproxElement(j, d, a, A))
        a_prev, A_prev = a, A
    return out


def thinness(s: SKP) -> ExtRat:
    if is_curve(s):
        return INF
    ap = approximating_sequence(s)
    a_prev, A_prev = (ap[-1].alpha, ap[-1].A) if ap else (Fraction(1), Fraction(2))
    return A_prev + multiplicity(s) * (skewness(s) - a_prev)


def invariants(s: SKP) -> InvariantReport:
    ap = tuple(approximating_sequence(s))
    curve = is_curve(s)
    gens = [s.values[0]] + [s.values[e.k] for e in ap]
    if not curve:
        gens.append(s.values[-1])
    gens = tuple(sorted(set(gens)))
    if curve:
        kind, triple = "curve", (2, 2, 0)
    else:
        kind, triple = "divisorial", (1, 1, 1)
    return InvariantReport(
        kind=kind,
        rk=triple[0],
        rat_rk=triple[1],
        tr_deg=triple[2],
        alpha=skewness(s),
        A=thinness(s),
        m=multiplicity(s),
        b=generic_multiplicity(s),
        approx=ap,
        semigroup=gens,
        monomial=(s.k == 1 and not curve),
    )


def value_of_x(s: SKP) -> ExtRat:
    """nu(x) in input coordinates for the normalized valuation."""
    return s.values[1] if s.swap else Fraction(1)


def relative_invariants(s: SKP) -> Tuple[ExtRat, ExtRat, ExtRat]:
    """(alpha_x, A_x, m_x): skewness, thinness and multiplicity relative to x."""
    if s.swap and s.k == 1 and s.values[1] is INF:
        raise ValtreeError("relative invariants are undefined at nu_x")
    vx = value_of_x(s)
    inv = invariants(s)
    on_x_segment = (s.swap and s.k == 1) or s.data() == NU_M.data()
    alpha_x = inv.alpha if inv.alpha is INF else inv.alpha / (vx * vx)
    A_x = inv.A if inv.A is INF else inv.A / vx
    m_x = Fraction(1) if on_x_segment else inv.m * vx
    return alpha_x, A_x, m_x


def point_at_skewness(s: SKP, alpha: ExtRat) -> SKP:
    """The valuation on the segment [nu_m, s] with skewness alpha."""
    if alpha is INF:
        if not is_curve(s):
            raise ValtreeError("skewness beyond the end of the segment")
        return s
    alpha = Fraction(alpha)
    if alpha < 1:
        raise ValtreeError("skewness must be at least 1")
    if alpha == 1:
        return NU_M
    cur = s
    while True:
        for j in range(1, cur.k + 1):
            d = cur.keys[j].deg_y()
            top = cur.values[j] if cur.values[j] is INF else cur.values[j] / d
            if top >= alpha:
                return SKP(cur.keys[: j + 1], cur.values[:j] + (alpha * d,), cur.swap)
        if not cur.truncated:
            raise ValtreeError("skewness beyond the end of the segment")
        cur = extend(cur)


def thinness_at(s: SKP, alpha: ExtRat) -> ExtRat:
    """Thinness of the point of skewness alpha on [nu_m, s]."""
    return thinness(point_at_skewness(s, alpha))


def eval_irreducible(s: SKP, phi_skp: SKP) -> ExtRat:
    """nu(phi) for phi irreducible, from its curve SKP and the contact index."""
    if not is_curve(phi_skp):
        raise ValtreeError("second argument must be a curve SKP")
    m_phi = multiplicity(phi_skp)
    if s.swap != phi_skp.swap:
        return Fraction(m_phi)
    for _ in range(512):
        kmax = min(s.k, phi_skp.k)
        k = 1
        while k + 1 <= kmax and s.keys[k + 1] == phi_skp.keys[k + 1]:
            k += 1
        if k == phi_skp.k and phi_skp.truncated and (s.k > k or s.truncated) \
                and s.values[k] == phi_skp.values[k]:
            if s.truncated and s.k == k and _same(s, phi_skp):
                return INF
            phi_skp = extend(phi_skp)
            continue
        if k == s.k and s.truncated and phi_skp.k > k and s.values[k] == phi_skp.values[k]:
            s = extend(s)
            continue
        v = min(s.values[k], phi_skp.values[k])
        d = s.keys[k].deg_y()
        return v if v is INF else m_phi * v / d
    raise TruncationError("contact index did not stabilize")


def ball_distance(C: BranchParam, D: BranchParam, cfg: ArithConfig = ArithConfig()) -> Fraction:
    """m(C) m(D) / (C.D); zero for identical branches."""
    if C == D:
        return Fraction(0)
    try:
        cd = intersection_number(C, D, cfg)
    except ValtreeError:
        w = wedge(skp_of_branch(C), skp_of_branch(D))
        cd = C.n * D.n * skewness(w)
    if cd is INF:
        return Fraction(0)
    return Fraction(C.n * D.n) / cd


# ---------------------------------------------------------------------------
# serialization


def skp_to_text(s: SKP) -> str:
    keys = ", ".join(format_poly(k) for k in s.keys)
    vals = ", ".join(fmt_q(v) for v in s.values)
    tail = ", ..." if s.truncated else ""
    sw = " (swapped: working x = y)" if s.swap else ""
    return f"[({keys}{tail}); ({vals}{tail})]{sw}"


def skp_to_json(s: SKP) -> dict:
    d = {
        "schema": "skp.v1",
        "keys": [format_poly(k) for k in s.keys],
        "values": [fmt_q(v) for v in s.values],
        "swap": s.swap,
    }
    if s.truncated:
        d["truncated"] = True
        if s.source is not None:
            d["source"] = s.source.to_text()
    return d


def skp_from_json(d: dict) -> SKP:
    from .arith import parse_branch

    if d.get("schema", "skp.v1") != "skp.v1":
        raise ValtreeError("expected schema skp.v1")
    keys = tuple(parse_poly(k) for k in d["keys"])
    vals = tuple(Q(v) for v in d["values"])
    swap = bool(d.get("swap", False))
    if d.get("truncated"):
        src = parse_branch(d["source"]) if "source" in d else None
        s = SKP(keys, vals, swap, True, src)
        return s
    return check(SKP(keys, vals, swap))
