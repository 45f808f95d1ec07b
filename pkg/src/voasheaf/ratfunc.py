"""Exact arithmetic in the field Q(x1, ..., xN).

Polynomials are sparse maps from exponent tuples to ``Fraction`` values.
A ``RatFunc`` is always stored in canonical form: numerator and
denominator are coprime, and the denominator is a primitive integer
polynomial whose leading coefficient (graded lex order) is positive.
Canonical storage makes ``==`` and ``hash`` structural.
"""

from __future__ import annotations

import re
from fractions import Fraction
from math import gcd as _igcd
from typing import Iterable, Mapping, Sequence

Exp = tuple[int, ...]
Terms = dict[Exp, Fraction]

__all__ = [
    "MultiPoly",
    "RatFunc",
    "RatFuncError",
    "ParseError",
    "arithmetic",
    "partial_derivative",
    "substitute",
]


class RatFuncError(ArithmeticError):
    """Raised for division by zero or a degenerate substitution."""


class ParseError(ValueError):
    pass


# ---------------------------------------------------------------------------
# dict-level polynomial helpers


def _order_key(e: Exp) -> tuple[int, Exp]:
    return (sum(e), e)


def _lead(a: Terms) -> Exp:
    return max(a, key=_order_key)


def _clean(a: Terms) -> Terms:
    return {e: c for e, c in a.items() if c}


def _add_into(acc: Terms, b: Mapping[Exp, Fraction], scale: Fraction | int = 1) -> None:
    for e, c in b.items():
        v = acc.get(e, 0) + scale * c
        if v:
            acc[e] = v
        else:
            acc.pop(e, None)


def _mul(a: Terms, b: Terms) -> Terms:
    if len(a) == 1 and len(b) == 1:
        (ea, ca), = a.items()
        (eb, cb), = b.items()
        return {tuple(x + y for x, y in zip(ea, eb)): ca * cb}
    out: Terms = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            v = out.get(e, 0) + ca * cb
            if v:
                out[e] = v
            else:
                del out[e]
    return out


def _scale(a: Terms, s: Fraction) -> Terms:
    if not s:
        return {}
    return {e: c * s for e, c in a.items()}


def _divexact(a: Terms, b: Terms) -> Terms:
    """Quotient a/b; raises if b does not divide a."""
    if not b:
        raise RatFuncError("polynomial division by zero")
    lb = _lead(b)
    cb = b[lb]
    r = dict(a)
    q: Terms = {}
    while r:
        lr = _lead(r)
        d = tuple(x - y for x, y in zip(lr, lb))
        if min(d, default=0) < 0:
            raise RatFuncError("inexact polynomial division")
        c = r[lr] / cb
        q[d] = c
        _add_into(r, _mul({d: c}, b), -1)
    return q


def _vars(a: Terms) -> set[int]:
    out: set[int] = set()
    for e in a:
        for i, x in enumerate(e):
            if x:
                out.add(i)
    return out


def _deg_in(a: Terms, v: int) -> int:
    return max(e[v] for e in a)


def _coeff_in(a: Terms, v: int, d: int) -> Terms:
    out: Terms = {}
    for e, c in a.items():
        if e[v] == d:
            out[e[:v] + (0,) + e[v + 1:]] = c
    return out


def _coeffs_in(a: Terms, v: int) -> list[Terms]:
    groups: dict[int, Terms] = {}
    for e, c in a.items():
        groups.setdefault(e[v], {})[e[:v] + (0,) + e[v + 1:]] = c
    return list(groups.values())


def _unit_normal(a: Terms) -> Terms:
    """Scale a nonzero polynomial to a primitive integer one with positive lead."""
    den = 1
    for c in a.values():
        den = den * c.denominator // _igcd(den, c.denominator)
    num = 0
    for c in a.values():
        num = _igcd(num, int(c * den))
    s = Fraction(den, num)
    if a[_lead(a)] < 0:
        s = -s
    return {e: c * s for e, c in a.items()}


def _one(n: int) -> Terms:
    return {(0,) * n: Fraction(1)}


def _content(a: Terms, v: int, n: int) -> Terms:
    g: Terms = {}
    for c in _coeffs_in(a, v):
        g = _gcd(g, c, n)
        if len(g) == 1 and not any(next(iter(g))):
            break
    return g


def _prem(a: Terms, b: Terms, v: int, n: int) -> Terms:
    db = _deg_in(b, v)
    lcb = _coeff_in(b, v, db)
    r = a
    while r and _deg_in(r, v) >= db:
        dr = _deg_in(r, v)
        lcr = _coeff_in(r, v, dr)
        shift = tuple(dr - db if i == v else 0 for i in range(n))
        nxt = _mul(lcb, r)
        _add_into(nxt, _mul(_mul(lcr, {shift: Fraction(1)}), b), -1)
        r = nxt
    return r


def _shift_down(a: Terms, m: Sequence[int]) -> Terms:
    return {tuple(x - y for x, y in zip(e, m)): c for e, c in a.items()}


def _image(a: Terms, v: int, point: Sequence[int]) -> dict[int, Fraction]:
    """Evaluate every variable except v at point; keyed by the degree in v."""
    out: dict[int, Fraction] = {}
    for e, c in a.items():
        for i, x in enumerate(e):
            if i != v and x:
                c = c * point[i] ** x
        out[e[v]] = out.get(e[v], 0) + c
    return {d: c for d, c in out.items() if c}


def _udeg_gcd(a: dict[int, Fraction], b: dict[int, Fraction]) -> int:
    """Degree of the univariate gcd over Q."""
    while b:
        db, lb = max(b), b[max(b)]
        r = dict(a)
        while r and max(r) >= db:
            dr = max(r)
            q = r[dr] / lb
            for d, c in b.items():
                x = r.get(d + dr - db, 0) - q * c
                if x:
                    r[d + dr - db] = x
                else:
                    r.pop(d + dr - db, None)
        a, b = b, r
    return max(a) if a else 0


def _coprime_by_images(a: Terms, b: Terms, n: int, common: set[int]) -> bool:
    """Sound test for a constant gcd.

    Specializing the other variables never lowers the degree of the gcd in v
    as long as both leading coefficients in v survive, so a constant image
    gcd for every shared variable proves the gcd is constant.
    """
    for v in common:
        da, db = _deg_in(a, v), _deg_in(b, v)
        for shift in range(3):
            point = [3 + 2 * i + 5 * shift for i in range(n)]
            ia, ib = _image(a, v, point), _image(b, v, point)
            if max(ia, default=-1) == da and max(ib, default=-1) == db:
                break
        else:
            return False
        if _udeg_gcd(ia, ib) > 0:
            return False
    return True


def _gcd(a: Terms, b: Terms, n: int) -> Terms:
    """Multivariate gcd by recursive content / primitive-part reduction."""
    if not a:
        return _unit_normal(b) if b else {}
    if not b:
        return _unit_normal(a)
    va, vb = _vars(a), _vars(b)
    if not va or not vb:
        return _one(n)
    ma = [min(e[i] for e in a) for i in range(n)]
    mb = [min(e[i] for e in b) for i in range(n)]
    if any(ma) or any(mb):
        # variables are prime, so monomial factors split off exactly
        m = tuple(min(x, y) for x, y in zip(ma, mb))
        return _mul({m: Fraction(1)}, _gcd(_shift_down(a, ma), _shift_down(b, mb), n))
    if len(a) == 1 or len(b) == 1:
        # a monomial divisor only shares a monomial with anything
        m = [min(e[i] for e in (*a, *b)) for i in range(n)]
        return {tuple(m): Fraction(1)}
    common = va & vb
    if not common or (len(va | vb) > 1 and _coprime_by_images(a, b, n, common)):
        return _one(n)
    v = max(va | vb)
    if v not in va:
        return _gcd(a, _content(b, v, n), n)
    if v not in vb:
        return _gcd(_content(a, v, n), b, n)
    ca, cb = _content(a, v, n), _content(b, v, n)
    gc = _gcd(ca, cb, n)
    pa, pb = _divexact(a, ca), _divexact(b, cb)
    if _deg_in(pa, v) < _deg_in(pb, v):
        pa, pb = pb, pa
    while pb:
        r = _prem(pa, pb, v, n)
        if r and v not in _vars(r):
            pa, pb = _one(n), {}
            break
        # integer content is invisible to _content, strip it here too
        pa, pb = pb, (_unit_normal(_divexact(r, _content(r, v, n))) if r else {})
    pa = _divexact(pa, _content(pa, v, n))
    return _unit_normal(_mul(gc, pa))


def _poly_str(a: Terms) -> str:
    if not a:
        return "0"
    parts: list[str] = []
    for e in sorted(a, key=_order_key, reverse=True):
        c = a[e]
        sign = "-" if c < 0 else "+"
        c = abs(c)
        factors = []
        for i, x in enumerate(e):
            if x == 1:
                factors.append(f"x{i + 1}")
            elif x:
                factors.append(f"x{i + 1}^{x}")
        if not factors:
            body = str(c)
        elif c == 1:
            body = "*".join(factors)
        else:
            body = str(c) + "*" + "*".join(factors)
        parts.append((sign, body))
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


# ---------------------------------------------------------------------------
# public types


class MultiPoly:
    """Sparse polynomial over Q in ``nvars`` variables."""

    __slots__ = ("terms", "nvars", "_hash")

    def __init__(self, terms: Mapping[Exp, Fraction | int], nvars: int):
        clean: Terms = {}
        for e, c in terms.items():
            if len(e) != nvars:
                raise ValueError(f"exponent {e} does not have length {nvars}")
            if c:
                clean[tuple(e)] = Fraction(c)
        self.terms = clean
        self.nvars = nvars
        self._hash: int | None = None

    @classmethod
    def _raw(cls, terms: Terms, nvars: int) -> "MultiPoly":
        p = object.__new__(cls)
        p.terms = terms
        p.nvars = nvars
        p._hash = None
        return p

    def lifted(self, nvars: int) -> "MultiPoly":
        if nvars == self.nvars:
            return self
        if nvars < self.nvars:
            raise ValueError("cannot drop variables")
        pad = (0,) * (nvars - self.nvars)
        return MultiPoly._raw({e + pad: c for e, c in self.terms.items()}, nvars)

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def leading(self) -> tuple[Exp, Fraction]:
        e = _lead(self.terms)
        return e, self.terms[e]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MultiPoly):
            return NotImplemented
        n = max(self.nvars, other.nvars)
        return self.lifted(n).terms == other.lifted(n).terms

    def __hash__(self) -> int:
        if self._hash is None:
            items = []
            for e, c in self.terms.items():
                k = len(e)
                while k and not e[k - 1]:
                    k -= 1
                items.append((e[:k], c))
            self._hash = hash(frozenset(items))
        return self._hash

    def __str__(self) -> str:
        return _poly_str(self.terms)

    def __repr__(self) -> str:
        return f"MultiPoly({self})"


def _lift_pair(a: "RatFunc", b: "RatFunc") -> tuple["RatFunc", "RatFunc"]:
    if a.nvars == b.nvars:
        return a, b
    n = max(a.nvars, b.nvars)
    return a.lifted(n), b.lifted(n)


class RatFunc:
    """An element of Q(x1..xN) in canonical form."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num: MultiPoly, den: MultiPoly | None = None):
        if den is None:
            den = MultiPoly._raw(_one(num.nvars), num.nvars)
        n = max(num.nvars, den.nvars)
        num, den = num.lifted(n), den.lifted(n)
        p, q = _reduce(num.terms, den.terms, n)
        self.num = MultiPoly._raw(p, n)
        self.den = MultiPoly._raw(q, n)
        self._hash = None

    @classmethod
    def _raw(cls, p: Terms, q: Terms, nvars: int) -> "RatFunc":
        r = object.__new__(cls)
        r.num = MultiPoly._raw(p, nvars)
        r.den = MultiPoly._raw(q, nvars)
        r._hash = None
        return r

    @classmethod
    def _from_terms(cls, p: Terms, q: Terms, nvars: int) -> "RatFunc":
        p, q = _reduce(p, q, nvars)
        return cls._raw(p, q, nvars)

    # constructors -----------------------------------------------------
    @classmethod
    def const(cls, c: Fraction | int | str, nvars: int = 1) -> "RatFunc":
        c = Fraction(c)
        return cls._raw({(0,) * nvars: c} if c else {}, _one(nvars), nvars)

    @classmethod
    def var(cls, p: int, nvars: int) -> "RatFunc":
        if not 1 <= p <= nvars:
            raise ValueError(f"variable index {p} out of range 1..{nvars}")
        e = tuple(1 if i == p - 1 else 0 for i in range(nvars))
        return cls._raw({e: Fraction(1)}, _one(nvars), nvars)

    @classmethod
    def parse(cls, text: str, nvars: int | None = None) -> "RatFunc":
        return _Parser(text, nvars).parse()

    # structure --------------------------------------------------------
    @property
    def nvars(self) -> int:
        return self.num.nvars

    def lifted(self, nvars: int) -> "RatFunc":
        if nvars == self.nvars:
            return self
        return RatFunc._raw(self.num.lifted(nvars).terms, self.den.lifted(nvars).terms, nvars)

    def is_zero(self) -> bool:
        return not self.num.terms

    def is_constant(self) -> bool:
        return len(self.den.terms) == 1 and not _vars(self.num.terms) and not _vars(self.den.terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        if not self.num.terms:
            return Fraction(0)
        return next(iter(self.num.terms.values())) / next(iter(self.den.terms.values()))

    def variables(self) -> set[int]:
        """1-based indices of variables that occur."""
        return {i + 1 for i in _vars(self.num.terms) | _vars(self.den.terms)}

    def canonical(self) -> "RatFunc":
        return RatFunc(self.num, self.den)

    # arithmetic -------------------------------------------------------
    def __add__(self, other: "RatFunc | int | Fraction") -> "RatFunc":
        other = _coerce(other, self.nvars)
        a, b = _lift_pair(self, other)
        n = a.nvars
        if not a.num.terms:
            return b
        if not b.num.terms:
            return a
        if a.den.terms == b.den.terms:
            p = dict(a.num.terms)
            _add_into(p, b.num.terms)
            if len(a.den.terms) == 1 and not any(next(iter(a.den.terms))):
                return RatFunc._raw(p, a.den.terms, n)
            return RatFunc._from_terms(p, a.den.terms, n)
        # Henrici: only the shared part of the denominators can cancel
        q1, q2 = a.den.terms, b.den.terms
        g = _gcd(q1, q2, n)
        q1g, q2g = (q1, q2) if _is_one(g) else (_divexact(q1, g), _divexact(q2, g))
        t = _mul(a.num.terms, q2g)
        _add_into(t, _mul(b.num.terms, q1g))
        if not t:
            return RatFunc._raw({}, _one(n), n)
        h = g if _is_one(g) else _gcd(t, g, n)
        if not _is_one(h):
            t, q2 = _divexact(t, h), _divexact(q2, h)
        return RatFunc._raw(*_normalize(t, _mul(q1g, q2)), n)

    __radd__ = __add__

    def __neg__(self) -> "RatFunc":
        return RatFunc._raw({e: -c for e, c in self.num.terms.items()}, self.den.terms, self.nvars)

    def __sub__(self, other: "RatFunc | int | Fraction") -> "RatFunc":
        return self + (-_coerce(other, self.nvars))

    def __rsub__(self, other: "RatFunc | int | Fraction") -> "RatFunc":
        return _coerce(other, self.nvars) - self

    def __mul__(self, other: "RatFunc | int | Fraction") -> "RatFunc":
        if isinstance(other, (int, Fraction)):
            return self.scaled(Fraction(other))
        a, b = _lift_pair(self, other)
        n = a.nvars
        if not a.num.terms or not b.num.terms:
            return RatFunc._raw({}, _one(n), n)
        if _is_one(a.den.terms) and _is_one(b.den.terms):
            return RatFunc._raw(_mul(a.num.terms, b.num.terms), a.den.terms, n)
        # Henrici: cross gcds suffice since both inputs are reduced
        p1, q1, p2, q2 = a.num.terms, a.den.terms, b.num.terms, b.den.terms
        g1, g2 = _gcd(p1, q2, n), _gcd(p2, q1, n)
        if not _is_one(g1):
            p1, q2 = _divexact(p1, g1), _divexact(q2, g1)
        if not _is_one(g2):
            p2, q1 = _divexact(p2, g2), _divexact(q1, g2)
        return RatFunc._raw(*_normalize(_mul(p1, p2), _mul(q1, q2)), n)

    __rmul__ = __mul__

    def scaled(self, s: Fraction) -> "RatFunc":
        if s == 1:
            return self
        return RatFunc._raw(_scale(self.num.terms, Fraction(s)), self.den.terms, self.nvars)

    def inverse(self) -> "RatFunc":
        if not self.num.terms:
            raise RatFuncError("division by zero rational function")
        return RatFunc._from_terms(dict(self.den.terms), dict(self.num.terms), self.nvars)

    def __truediv__(self, other: "RatFunc | int | Fraction") -> "RatFunc":
        if isinstance(other, (int, Fraction)):
            if not other:
                raise RatFuncError("division by zero")
            return self.scaled(1 / Fraction(other))
        return self * other.inverse()

    def __rtruediv__(self, other: "RatFunc | int | Fraction") -> "RatFunc":
        return _coerce(other, self.nvars) * self.inverse()

    def __pow__(self, k: int) -> "RatFunc":
        if k < 0:
            return self.inverse() ** (-k)
        out = RatFunc.const(1, self.nvars)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # calculus ---------------------------------------------------------
    def diff(self, p: int) -> "RatFunc":
        n = self.nvars
        if not 1 <= p <= n:
            raise ValueError(f"variable index {p} out of range 1..{n}")
        i = p - 1
        dn = _pdiff(self.num.terms, i)
        if _is_one(self.den.terms):
            return RatFunc._raw(dn, self.den.terms, n)
        dd = _pdiff(self.den.terms, i)
        if not dd:
            return RatFunc._from_terms(dn, dict(self.den.terms), n)
        q = self.den.terms
        g = _gcd(q, dd, n)
        qg, ddg = (q, dd) if _is_one(g) else (_divexact(q, g), _divexact(dd, g))
        top = _mul(dn, qg)
        _add_into(top, _mul(self.num.terms, ddg), -1)
        return RatFunc._from_terms(top, _mul(q, qg), n)

    def substitute(self, images: Sequence["RatFunc"]) -> "RatFunc":
        if len(images) != self.nvars:
            raise ValueError(f"need {self.nvars} images, got {len(images)}")
        m = max(im.nvars for im in images)
        images = [im.lifted(m) for im in images]
        num = _evaluate(self.num.terms, images, m)
        den = _evaluate(self.den.terms, images, m)
        if den.is_zero():
            raise RatFuncError(f"substitution into {self} hits a zero denominator")
        return num / den

    # comparison / printing -------------------------------------------
    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            return self.is_constant() and self.constant_value() == other
        if not isinstance(other, RatFunc):
            return NotImplemented
        if self.nvars == other.nvars:
            return self.num.terms == other.num.terms and self.den.terms == other.den.terms
        a, b = _lift_pair(self, other)
        return a.num.terms == b.num.terms and a.den.terms == b.den.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    def __bool__(self) -> bool:
        return bool(self.num.terms)

    def __str__(self) -> str:
        ns = _poly_str(self.num.terms)
        if _is_one(self.den.terms):
            return ns
        if len(self.num.terms) > 1:
            ns = f"({ns})"
        ds = _poly_str(self.den.terms)
        if not (len(self.den.terms) == 1 and re.fullmatch(r"x\d+(\^\d+)?", ds)):
            ds = f"({ds})"
        return f"{ns}/{ds}"

    def __repr__(self) -> str:
        return f"RatFunc({self})"


def _is_one(q: Terms) -> bool:
    if len(q) != 1:
        return False
    (e, c), = q.items()
    return c == 1 and not any(e)


def _coerce(x: "RatFunc | int | Fraction", nvars: int) -> RatFunc:
    if isinstance(x, RatFunc):
        return x
    return RatFunc.const(Fraction(x), nvars)


def _pdiff(a: Terms, i: int) -> Terms:
    out: Terms = {}
    for e, c in a.items():
        k = e[i]
        if k:
            out[e[:i] + (k - 1,) + e[i + 1:]] = c * k
    return out


def _evaluate(a: Terms, images: Sequence[RatFunc], nvars: int) -> RatFunc:
    powers: dict[tuple[int, int], RatFunc] = {}

    def power(i: int, k: int) -> RatFunc:
        key = (i, k)
        if key not in powers:
            powers[key] = images[i] if k == 1 else power(i, k - 1) * images[i]
        return powers[key]

    total = RatFunc.const(0, nvars)
    for e, c in a.items():
        term = RatFunc.const(c, nvars)
        for i, k in enumerate(e):
            if k:
                term = term * power(i, k)
        total = total + term
    return total


def _reduce(p: Terms, q: Terms, n: int) -> tuple[Terms, Terms]:
    """Cancel the gcd and normalize the denominator."""
    if not q:
        raise RatFuncError("zero denominator")
    if not p:
        return {}, _one(n)
    if len(q) == 1:
        (eq, cq), = q.items()
        if any(eq):
            m = [min([eq[i]] + [e[i] for e in p]) for i in range(n)]
            if any(m):
                p = {tuple(x - y for x, y in zip(e, m)): c for e, c in p.items()}
                eq = tuple(x - y for x, y in zip(eq, m))
        s = 1 / cq
        return ({e: c * s for e, c in p.items()} if s != 1 else p), {eq: Fraction(1)}
    g = _gcd(p, q, n)
    if not _is_one(g):
        p = _divexact(p, g)
        q = _divexact(q, g)
    return _normalize(p, q)


def _normalize(p: Terms, q: Terms) -> tuple[Terms, Terms]:
    """Scale a coprime pair so the denominator is unit normal."""
    qn = _unit_normal(q)
    e0 = next(iter(qn))
    s = q[e0] / qn[e0]
    if s != 1:
        p = {e: c / s for e, c in p.items()}
    return p, qn


# ---------------------------------------------------------------------------
# text grammar


_TOKEN = re.compile(r"\s*(?:(\d+)|x(\d+)|(\*\*|[-+*/^()]))")


class _Parser:
    def __init__(self, text: str, nvars: int | None):
        self.text = text
        self.toks: list[tuple[str, str]] = []
        pos = 0
        text = text.rstrip()
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m:
                raise ParseError(f"unexpected character at {pos} in {self.text!r}")
            if m.group(1) is not None:
                self.toks.append(("int", m.group(1)))
            elif m.group(2) is not None:
                self.toks.append(("var", m.group(2)))
            else:
                op = m.group(3)
                self.toks.append(("op", "^" if op == "**" else op))
            pos = m.end()
        used = [int(v) for k, v in self.toks if k == "var"]
        if any(v < 1 for v in used):
            raise ParseError("variables are numbered from x1")
        need = max(used, default=1)
        if nvars is not None and need > nvars:
            raise ParseError(f"variable x{need} exceeds N={nvars}")
        self.n = nvars if nvars is not None else need
        self.i = 0

    def peek(self) -> tuple[str, str] | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self) -> tuple[str, str]:
        t = self.peek()
        if t is None:
            raise ParseError(f"unexpected end of {self.text!r}")
        self.i += 1
        return t

    def parse(self) -> RatFunc:
        if not self.toks:
            raise ParseError("empty expression")
        v = self.expr()
        if self.peek() is not None:
            raise ParseError(f"trailing input in {self.text!r}")
        return v

    def expr(self) -> RatFunc:
        v = self.term()
        while (t := self.peek()) and t[1] in "+-" and t[0] == "op":
            self.take()
            w = self.term()
            v = v + w if t[1] == "+" else v - w
        return v

    def term(self) -> RatFunc:
        v = self.unary()
        while (t := self.peek()) and t[0] == "op" and t[1] in "*/":
            self.take()
            w = self.unary()
            v = v * w if t[1] == "*" else v / w
        return v

    def unary(self) -> RatFunc:
        t = self.peek()
        if t == ("op", "-"):
            self.take()
            return -self.unary()
        if t == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> RatFunc:
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            sign = 1
            if self.peek() == ("op", "-"):
                self.take()
                sign = -1
            k = self.take()
            if k[0] != "int":
                raise ParseError("exponent must be an integer literal")
            return base ** (sign * int(k[1]))
        return base

    def atom(self) -> RatFunc:
        kind, val = self.take()
        if kind == "int":
            return RatFunc.const(int(val), self.n)
        if kind == "var":
            return RatFunc.var(int(val), self.n)
        if val == "(":
            v = self.expr()
            if self.take() != ("op", ")"):
                raise ParseError(f"missing ')' in {self.text!r}")
            return v
        raise ParseError(f"unexpected {val!r} in {self.text!r}")


# ---------------------------------------------------------------------------
# functional surface


def arithmetic(a: RatFunc, op: str, b: RatFunc) -> RatFunc:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown operation {op!r}")


def partial_derivative(f: RatFunc, p: int) -> RatFunc:
    return f.diff(p)


def substitute(f: RatFunc, images: Iterable[RatFunc]) -> RatFunc:
    return f.substitute(list(images))
