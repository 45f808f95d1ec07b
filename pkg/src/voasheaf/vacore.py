"""The vertex algebra V (x) Q(x) with V = Hei (x) V_glN (x) V_g (x) V_Vir.

States are finite sums of canonical creation words applied to the vacuum,
tensored with a rational function.  Internally a state is a dict mapping a
basis key ``(word, top)`` to its ``RatFunc`` coefficient; ``top`` is 0 for
the vacuum module and indexes the top component of a Verma module.

The n-th product is computed by peeling the leftmost creation mode of the
first argument and expanding with the Borcherds identity.  The recursion
bottoms out at states ``1 (x) f``, whose field is given in closed form:

    Y(1 (x) f, z) = sum_s (1/s!) ubar(z)^s (x) d^s f,
    ubar_p(z) = sum_{j != 0} (1/j) u_p(-j) z^j.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, NamedTuple, Sequence

from .liedata import SimpleLieAlgebra, builtin
from .ratfunc import ParseError, RatFunc

U, V, E, G, L = range(5)
KIND_NAMES = "UVEGL"


class ConfigError(ValueError):
    """Invalid engine configuration."""


class Mode(NamedTuple):
    """A generator mode; tuple order is the canonical PBW order."""

    level: int
    kind: int
    i: int = 0
    j: int = 0

    def shifted(self, level: int) -> "Mode":
        return Mode(level, self.kind, self.i, self.j)


def u(p: int, level: int) -> Mode:
    return Mode(level, U, p)


def v(p: int, level: int) -> Mode:
    return Mode(level, V, p)


def e(a: int, b: int, level: int) -> Mode:
    return Mode(level, E, a, b)


def g(i: int, level: int) -> Mode:
    return Mode(level, G, i)


def lmode(level: int) -> Mode:
    return Mode(level, L)


Word = tuple[Mode, ...]
Key = tuple[Word, int]
Terms = dict[Key, RatFunc]
QTerms = dict[Key, Fraction]


def word_degree(word: Word) -> int:
    return -sum(m.level for m in word)


@lru_cache(maxsize=None)
def binom(k: int, j: int) -> Fraction:
    """Generalized binomial k(k-1)...(k-j+1)/j! for any integer k."""
    if j < 0:
        return Fraction(0)
    out = Fraction(1)
    for t in range(j):
        out = out * (k - t) / (t + 1)
    return out


@dataclass(frozen=True)
class EngineConfig:
    N: int
    algebra: SimpleLieAlgebra
    c: Fraction

    def __post_init__(self) -> None:
        if self.N < 1:
            raise ConfigError("N must be >= 1")
        object.__setattr__(self, "c", Fraction(self.c))
        if self.c == 0:
            raise ConfigError("level c must be non-zero")
        if self.c == -self.algebra.dual_coxeter:
            raise ConfigError(
                f"level c = {self.c} is critical (c = -h^vee); a non-critical level is required"
            )

    @property
    def c_hei(self) -> Fraction:
        return Fraction(1)

    @property
    def c_gl(self) -> Fraction:
        return Fraction(1)

    @property
    def c_vir(self) -> Fraction:
        h = self.algebra.dual_coxeter
        return -self.c * self.algebra.dim / (self.c + h)


# ---------------------------------------------------------------------------
# states


def _fmt_mode(m: Mode, labels: Sequence[str] | None) -> str:
    if m.kind == U:
        return f"u{m.i}({m.level})"
    if m.kind == V:
        return f"v{m.i}({m.level})"
    if m.kind == E:
        return f"E({m.i},{m.j})({m.level})"
    if m.kind == G:
        lab = labels[m.i] if labels is not None else f"#{m.i}"
        return f"G({lab})({m.level})"
    return f"L({m.level})"


def _fmt_coeff(f: RatFunc) -> str:
    s = str(f)
    if " " in s or s.startswith("-"):
        return f"({s})"
    return s


class State:
    """Immutable finite sum of basis keys with RatFunc coefficients."""

    __slots__ = ("terms", "labels", "top_names", "_hash")

    def __init__(
        self,
        terms: Terms | None = None,
        labels: Sequence[str] | None = None,
        top_names: Sequence[str] | None = None,
    ):
        self.terms: Terms = {k: f for k, f in (terms or {}).items() if f}
        self.labels = tuple(labels) if labels is not None else None
        self.top_names = tuple(top_names) if top_names is not None else None
        self._hash: int | None = None

    def _like(self, terms: Terms) -> "State":
        return State(terms, self.labels, self.top_names)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def items(self) -> Iterator[tuple[Key, RatFunc]]:
        return iter(sorted(self.terms.items(), key=lambda kv: kv[0]))

    def degrees(self) -> set[int]:
        return {word_degree(w) for (w, _t) in self.terms}

    def degree(self) -> int:
        ds = self.degrees()
        if len(ds) > 1:
            raise ValueError("state is not homogeneous")
        return ds.pop() if ds else 0

    def __add__(self, other: "State") -> "State":
        out = dict(self.terms)
        _accumulate(out, other.terms)
        return self._like(out)

    def __sub__(self, other: "State") -> "State":
        return self + other.scale(-1)

    def __neg__(self) -> "State":
        return self.scale(-1)

    def scale(self, s: Fraction | int) -> "State":
        s = Fraction(s)
        return self._like({k: f.scaled(s) for k, f in self.terms.items()} if s else {})

    def __rmul__(self, s: Fraction | int) -> "State":
        return self.scale(s)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, State):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (word, top), f in self.items():
            w = " ".join(_fmt_mode(m, self.labels) for m in word) or "1"
            if self.top_names is not None:
                w = f"{w} [{self.top_names[top]}]"
            parts.append(f"{w} | {_fmt_coeff(f)}")
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"State({self})"


def _accumulate(acc: Terms, terms: Terms, scale: Fraction | int = 1) -> None:
    for k, f in terms.items():
        if scale != 1:
            f = f.scaled(Fraction(scale))
        cur = acc.get(k)
        if cur is None:
            acc[k] = f
        else:
            s = cur + f
            if s:
                acc[k] = s
            else:
                del acc[k]


# ---------------------------------------------------------------------------
# target spaces


class FockSpace:
    """The vacuum module V itself."""

    top_dim = 1

    def is_creation(self, m: Mode) -> bool:
        if m.kind == L:
            return m.level <= -2
        return m.level <= -1

    def top_act(self, m: Mode, top: int) -> QTerms:
        return {}


# ---------------------------------------------------------------------------
# engine


_MODE_RE = re.compile(
    r"u(\d+)\((-?\d+)\)|v(\d+)\((-?\d+)\)|E\((\d+),(\d+)\)\((-?\d+)\)|G\(([^()]+)\)\((-?\d+)\)|L\((-?\d+)\)"
)


class Action:
    """Mode action and n-th products of V on a target space, with memo tables."""

    def __init__(self, engine: "Engine", space: FockSpace):
        self.engine = engine
        self.space = space
        self._insert: dict[tuple[Mode, Word], dict[Word, Fraction]] = {}
        self._act: dict[tuple[Mode, Word, int], QTerms] = {}
        self._prod: dict[tuple[Word, RatFunc, int, Key, RatFunc], Terms] = {}
        self._deriv: dict[tuple[RatFunc, tuple[int, ...]], RatFunc] = {}

    # -- ordering ----------------------------------------------------------
    def insert(self, m: Mode, word: Word) -> dict[Word, Fraction]:
        """Canonical expansion of the creation mode m times the canonical word."""
        if not word or m <= word[0]:
            return {(m,) + word: Fraction(1)}
        key = (m, word)
        hit = self._insert.get(key)
        if hit is not None:
            return hit
        w0, rest = word[0], word[1:]
        out: dict[Word, Fraction] = {}
        for w1, c1 in self.insert(m, rest).items():
            for w2, c2 in self.insert(w0, w1).items():
                _qadd(out, w2, c1 * c2)
        terms, _central = self.engine.bracket(m, w0)
        for cb, y in terms:
            for w1, c1 in self.insert(y, rest).items():
                _qadd(out, w1, cb * c1)
        self._insert[key] = out
        return out

    def insert_terms(self, m: Mode, terms: dict[Word, Fraction]) -> dict[Word, Fraction]:
        out: dict[Word, Fraction] = {}
        for w, c in terms.items():
            for w2, c2 in self.insert(m, w).items():
                _qadd(out, w2, c * c2)
        return out

    def normal_order(self, modes: Sequence[Mode]) -> dict[Word, Fraction]:
        for m in modes:
            if not self.space.is_creation(m):
                raise ValueError(f"{_fmt_mode(m, None)} is not a creation mode")
        cur: dict[Word, Fraction] = {(): Fraction(1)}
        for m in reversed(modes):
            cur = self.insert_terms(m, cur)
        return cur

    # -- single modes ------------------------------------------------------
    def act(self, m: Mode, word: Word, top: int) -> QTerms:
        """m applied to word|top, for any m except v_p(0)."""
        if self.space.is_creation(m):
            return {(w, top): c for w, c in self.insert(m, word).items()}
        if not word:
            return self.space.top_act(m, top)
        key = (m, word, top)
        hit = self._act.get(key)
        if hit is not None:
            return hit
        w0, rest = word[0], word[1:]
        out: QTerms = {}
        for (w1, t1), c1 in self.act(m, rest, top).items():
            for w2, c2 in self.insert(w0, w1).items():
                _qadd(out, (w2, t1), c1 * c2)
        terms, central = self.engine.bracket(m, w0)
        for cb, y in terms:
            for k, c1 in self.act(y, rest, top).items():
                _qadd(out, k, cb * c1)
        if central:
            _qadd(out, (rest, top), central)
        self._act[key] = out
        return out

    def apply_mode(self, m: Mode, terms: Terms) -> Terms:
        out: Terms = {}
        if m.kind == V and m.level == 0:
            for k, f in terms.items():
                d = f.diff(m.i)
                if d:
                    _accumulate(out, {k: d})
            return out
        for (w, t), f in terms.items():
            for k, c in self.act(m, w, t).items():
                _accumulate(out, {k: f.scaled(c)})
        return out

    def apply_gen(self, alpha: Mode, j: int, terms: Terms) -> Terms:
        """The j-th product of the generator state of alpha's kind."""
        if alpha.kind == L:
            return self.apply_mode(alpha.shifted(j - 1), terms)
        return self.apply_mode(alpha.shifted(j), terms)

    # -- function fields ---------------------------------------------------
    def deriv(self, f: RatFunc, alpha: tuple[int, ...]) -> RatFunc:
        if not any(alpha):
            return f
        key = (f, alpha)
        hit = self._deriv.get(key)
        if hit is not None:
            return hit
        p = next(i for i, a in enumerate(alpha) if a)
        lower = alpha[:p] + (alpha[p] - 1,) + alpha[p + 1:]
        base = self.deriv(f, lower)
        out = base.diff(p + 1) if base else base
        self._deriv[key] = out
        return out

    def function_mode(self, f: RatFunc, n: int, key: Key, h: RatFunc) -> Terms:
        """z^{-n-1} coefficient of Y(1 (x) f, z) on the basis element key (x) h."""
        word, top = key
        N = self.engine.N
        vpos = [i for i, m in enumerate(word) if m.kind == V]
        out: Terms = {}
        for r in range(len(vpos) + 1):
            for chosen in itertools.combinations(vpos, r):
                dS = -sum(word[i].level for i in chosen)
                ecount = dS - n - 1
                if ecount < 0:
                    continue
                sel = set(chosen)
                remaining = tuple(m for i, m in enumerate(word) if i not in sel)
                a = [0] * N
                for i in chosen:
                    a[word[i].i - 1] += 1
                sign = -1 if r % 2 else 1
                for parts, coeff in colored_partitions(ecount, N):
                    alpha = list(a)
                    for p, _j in parts:
                        alpha[p - 1] += 1
                    F = self.deriv(f, tuple(alpha))
                    if not F:
                        continue
                    if parts:
                        new = tuple(sorted(remaining + tuple(u(p, -j) for p, j in parts)))
                    else:
                        new = remaining
                    _accumulate(out, {(new, top): (F * h).scaled(sign * coeff)})
        return out

    # -- n-th products -----------------------------------------------------
    def product(self, aw: Word, f: RatFunc, n: int, key: Key, h: RatFunc) -> Terms:
        """(aw (x) f)_(n) (key (x) h)."""
        bw, top = key
        if word_degree(aw) + word_degree(bw) - n - 1 < 0:
            return {}
        if not aw:
            return self.function_mode(f, n, key, h)
        ck = (aw, f, n, key, h)
        hit = self._prod.get(ck)
        if hit is not None:
            return hit
        alpha, rest = aw[0], aw[1:]
        k = alpha.level + (1 if alpha.kind == L else 0)
        db = word_degree(bw)
        out: Terms = {}
        jmax = db + (1 if alpha.kind == L else 0)
        base = {key: h}
        for j in range(jmax + 1):
            coeff = binom(k, j) * (-1 if (k + j + 1) % 2 else 1)
            for k2, h2 in self.apply_gen(alpha, j, base).items():
                _accumulate(out, self.product(rest, f, n + k - j, k2, h2), coeff)
        top_j = word_degree(rest) + db - n - 1
        for j in range(top_j + 1):
            coeff = binom(k, j) * (-1 if j % 2 else 1)
            s = self.product(rest, f, n + j, key, h)
            if s:
                _accumulate(out, self.apply_gen(alpha, k - j, s), coeff)
        self._prod[ck] = out
        return out

    def nth_product(self, a: Terms, n: int, b: Terms) -> Terms:
        out: Terms = {}
        for (aw, _t), f in a.items():
            for key, h in b.items():
                _accumulate(out, self.product(aw, f, n, key, h))
        return out


@lru_cache(maxsize=None)
def colored_partitions(total: int, colors: int) -> tuple[tuple[tuple[tuple[int, int], ...], Fraction], ...]:
    """Multisets of (color, part) with parts summing to total, weighted by
    prod over distinct items of (1/part)^mult / mult!."""
    items = [(p, j) for j in range(1, total + 1) for p in range(1, colors + 1)]
    out = []

    def rec(idx: int, left: int, acc: list[tuple[int, int]], w: Fraction) -> None:
        if left == 0:
            out.append((tuple(acc), w))
            return
        if idx == len(items):
            return
        p, j = items[idx]
        mult = 0
        ww = w
        rec(idx + 1, left, acc, ww)
        while (mult + 1) * j <= left:
            mult += 1
            ww = ww / j / mult
            acc.extend([(p, j)])
            rec(idx + 1, left - mult * j, acc, ww)
        del acc[len(acc) - mult:]

    rec(0, total, [], Fraction(1))
    return tuple(out)


def _qadd(acc: dict, k, c: Fraction) -> None:
    s = acc.get(k, 0) + c
    if s:
        acc[k] = s
    else:
        acc.pop(k, None)


class Engine:
    """Exact operations in V (x) Q(x1..xN) for a fixed configuration."""

    def __init__(self, cfg: EngineConfig):
        self.cfg = cfg
        self.N = cfg.N
        self.alg = cfg.algebra
        self._bracket: dict[tuple[Mode, Mode], tuple[tuple[tuple[Fraction, Mode], ...], Fraction]] = {}
        self.vac = Action(self, FockSpace())
        self._omega: dict[str, State] = {}

    @classmethod
    def create(cls, N: int = 2, algebra: str | SimpleLieAlgebra = "sl2", c: Fraction | int | str = 1) -> "Engine":
        alg = builtin(algebra) if isinstance(algebra, str) else algebra
        return cls(EngineConfig(N, alg, Fraction(c)))

    # -- relation tables ---------------------------------------------------
    def bracket(self, x: Mode, y: Mode) -> tuple[tuple[tuple[Fraction, Mode], ...], Fraction]:
        """[x, y] as (mode terms, central scalar)."""
        key = (x, y)
        hit = self._bracket.get(key)
        if hit is not None:
            return hit
        terms: dict[Mode, Fraction] = {}
        central = Fraction(0)
        m, s = x.level, y.level
        kinds = (x.kind, y.kind)
        if kinds in ((U, V), (V, U)):
            if x.i == y.i and m + s == 0:
                central = Fraction(m) * self.cfg.c_hei
        elif kinds == (E, E):
            a, b, c, d = x.i, x.j, y.i, y.j
            if b == c:
                terms[Mode(m + s, E, a, d)] = terms.get(Mode(m + s, E, a, d), 0) + 1
            if a == d:
                terms[Mode(m + s, E, c, b)] = terms.get(Mode(m + s, E, c, b), 0) - 1
            if m + s == 0 and a == d and b == c:
                central = Fraction(m) * self.cfg.c_gl
        elif kinds == (G, G):
            for k, val in self.alg.bracket(x.i, y.i).items():
                terms[Mode(m + s, G, k)] = val
            if m + s == 0:
                central = Fraction(m) * self.cfg.c * self.alg.pairing(x.i, y.i)
        elif kinds == (L, L):
            if m != s:
                terms[Mode(m + s, L)] = Fraction(m - s)
            if m + s == 0:
                central = Fraction(m**3 - m, 12) * self.cfg.c_vir
        out = (tuple((Fraction(c), md) for md, c in sorted(terms.items()) if c), central)
        self._bracket[key] = out
        return out

    # -- state construction ------------------------------------------------
    def const(self, c: Fraction | int | str) -> RatFunc:
        return RatFunc.const(Fraction(c), self.N)

    def fn(self, f: RatFunc | str | int | Fraction) -> RatFunc:
        if isinstance(f, RatFunc):
            if f.nvars > self.N:
                raise ValueError(f"{f} uses more than {self.N} variables")
            return f.lifted(self.N)
        if isinstance(f, str):
            return RatFunc.parse(f, self.N)
        return self.const(f)

    def state(self, terms: Terms | None = None) -> State:
        return State(terms, self.alg.labels)

    def vacuum(self, f: RatFunc | str | int = 1) -> State:
        return self.state({((), 0): self.fn(f)})

    def monomial(self, modes: Sequence[Mode], f: RatFunc | str | int = 1) -> State:
        return self.normal_order(modes, f)

    def normal_order(self, modes: Sequence[Mode], coeff: RatFunc | str | int = 1) -> State:
        f = self.fn(coeff)
        terms = self.vac.normal_order(list(modes))
        return self.state({(w, 0): f.scaled(c) for w, c in terms.items()})

    def generators(self) -> list[tuple[str, State]]:
        """Named generator states u_p(-1)1, v_p(-1)1, E_ab(-1)1, g_i(-1)1, L(-2)1."""
        out = []
        for p in range(1, self.N + 1):
            out.append((f"u{p}", self.monomial([u(p, -1)])))
        for p in range(1, self.N + 1):
            out.append((f"v{p}", self.monomial([v(p, -1)])))
        for a in range(1, self.N + 1):
            for b in range(1, self.N + 1):
                out.append((f"E{a}{b}", self.monomial([e(a, b, -1)])))
        for i, lab in enumerate(self.alg.labels):
            out.append((f"g_{lab}", self.monomial([g(i, -1)])))
        out.append(("L", self.monomial([lmode(-2)])))
        return out

    # -- operations --------------------------------------------------------
    def apply_mode(self, m: Mode, s: State) -> State:
        self._check_mode(m)
        return self.state(self.vac.apply_mode(m, s.terms))

    def nth_product(self, a: State, n: int, b: State) -> State:
        return self.state(self.vac.nth_product(a.terms, n, b.terms))

    def function_mode(self, f: RatFunc | str, n: int, b: State) -> State:
        f = self.fn(f)
        out: Terms = {}
        for key, h in b.terms.items():
            _accumulate(out, self.vac.function_mode(f, n, key, h))
        return self.state(out)

    def translation_D(self, a: State) -> State:
        out: Terms = {}
        for (word, top), f in a.terms.items():
            for i, m in enumerate(word):
                if m.kind == L:
                    coef = -(m.level + 1)
                else:
                    coef = -m.level
                if not coef:
                    continue
                cur = self.vac.insert(m.shifted(m.level - 1), word[i + 1:])
                for pm in reversed(word[:i]):
                    cur = self.vac.insert_terms(pm, cur)
                for w, c in cur.items():
                    _accumulate(out, {(w, top): f.scaled(c * coef)})
            for p in range(1, self.N + 1):
                d = f.diff(p)
                if d:
                    for w, c in self.vac.insert(u(p, -1), word).items():
                        _accumulate(out, {(w, top): d.scaled(c)})
        return self.state(out)

    def _check_mode(self, m: Mode) -> None:
        if m.kind in (U, V) and not 1 <= m.i <= self.N:
            raise ValueError(f"index {m.i} out of range 1..{self.N}")
        if m.kind == E and not (1 <= m.i <= self.N and 1 <= m.j <= self.N):
            raise ValueError(f"indices ({m.i},{m.j}) out of range 1..{self.N}")
        if m.kind == G and not 0 <= m.i < self.alg.dim:
            raise ValueError(f"g index {m.i} out of range")

    # -- Virasoro elements -------------------------------------------------
    def omega_hei(self) -> State:
        out = self.state()
        for p in range(1, self.N + 1):
            out = out + self.monomial([v(p, -1), u(p, -1)])
        return out

    def omega_gl(self) -> State:
        N = self.N
        quad = self.state()
        for a in range(1, N + 1):
            for b in range(1, N + 1):
                quad = quad + self.monomial([e(a, a, -1), e(b, b, -1)])
                quad = quad + self.monomial([e(a, b, -1), e(b, a, -1)])
        lin = self.state()
        for a in range(1, N + 1):
            lin = lin + self.monomial([e(a, a, -2)])
        return quad.scale(Fraction(1, 2 * (N + 1))) + lin.scale(Fraction(1, 2))

    def omega_g(self) -> State:
        inv = self.alg.inverse_form()
        out = self.state()
        for i in range(self.alg.dim):
            for j in range(self.alg.dim):
                if inv[i][j]:
                    out = out + self.monomial([g(i, -1), g(j, -1)]).scale(inv[i][j])
        return out.scale(1 / (2 * (self.cfg.c + self.alg.dual_coxeter)))

    def omega_vir(self) -> State:
        return self.monomial([lmode(-2)])

    def virasoro_omega(self) -> State:
        if "total" not in self._omega:
            self._omega["total"] = self.omega_hei() + self.omega_gl() + self.omega_g() + self.omega_vir()
        return self._omega["total"]

    # -- identity checks ---------------------------------------------------
    def borcherds_sides(self, a: State, b: State, c: State, k: int, n: int) -> tuple[State, State]:
        lhs = self.nth_product(self.nth_product(a, k, b), n, c)
        rhs = self.state()
        if k >= 0:
            jr = range(k + 1)
        else:
            jr = range(max(a.degrees() | {0}) + max(c.degrees() | {0}) + 2)
        for j in jr:
            coeff = binom(k, j) * (-1 if (k + j + 1) % 2 else 1)
            ac = self.nth_product(a, j, c)
            if ac:
                rhs = rhs + self.nth_product(b, n + k - j, ac).scale(coeff)
        top = max(b.degrees() | {0}) + max(c.degrees() | {0}) - n - 1
        for j in range(max(top, -1) + 1):
            coeff = binom(k, j) * (-1 if j % 2 else 1)
            bc = self.nth_product(b, n + j, c)
            if bc:
                rhs = rhs + self.nth_product(a, k - j, bc).scale(coeff)
        return lhs, rhs

    def check_borcherds(self, a: State, b: State, c: State, k: int, n: int) -> bool:
        lhs, rhs = self.borcherds_sides(a, b, c, k, n)
        return lhs == rhs

    def commutator_sides(self, a: State, b: State, m: int, k: int, c: State) -> tuple[State, State]:
        lhs = self.nth_product(a, m, self.nth_product(b, k, c)) - self.nth_product(
            b, k, self.nth_product(a, m, c)
        )
        rhs = self.state()
        top = max(a.degrees() | {0}) + max(b.degrees() | {0}) - 1
        for n in range(max(top, -1) + 1):
            coeff = binom(m, n)
            if not coeff:
                continue
            ab = self.nth_product(a, n, b)
            if ab:
                rhs = rhs + self.nth_product(ab, m + k - n, c).scale(coeff)
        return lhs, rhs

    def check_commutator_formula(self, a: State, b: State, m: int, k: int, c: State) -> bool:
        lhs, rhs = self.commutator_sides(a, b, m, k, c)
        return lhs == rhs

    # -- text --------------------------------------------------------------
    def parse_mode(self, text: str) -> Mode:
        m = _MODE_RE.fullmatch(text.strip())
        if not m:
            raise ParseError(f"cannot parse mode {text!r}")
        gs = m.groups()
        try:
            if gs[0] is not None:
                md = u(int(gs[0]), int(gs[1]))
            elif gs[2] is not None:
                md = v(int(gs[2]), int(gs[3]))
            elif gs[4] is not None:
                md = e(int(gs[4]), int(gs[5]), int(gs[6]))
            elif gs[7] is not None:
                md = g(self.alg.index(gs[7].strip()), int(gs[8]))
            else:
                md = lmode(int(gs[9]))
            self._check_mode(md)
        except ParseError:
            raise
        except ValueError as exc:
            raise ParseError(f"mode {text.strip()!r}: {exc}") from None
        return md

    def parse_word(self, text: str) -> list[Mode]:
        text = text.strip()
        if text in ("", "1"):
            return []
        pos = 0
        out = []
        while pos < len(text):
            if text[pos].isspace():
                pos += 1
                continue
            m = _MODE_RE.match(text, pos)
            if not m:
                raise ParseError(f"cannot parse modes in {text!r} at position {pos}")
            out.append(self.parse_mode(m.group(0)))
            pos = m.end()
        return out

    def parse_state(self, text: str) -> State:
        """Parse ``word | f + word | f ...``; a bare word means coefficient 1
        and a bare function means the vacuum."""
        total = self.state()
        for sign, chunk in _split_terms(text):
            if chunk.startswith("-") and "|" in chunk:
                sign, chunk = -sign, chunk[1:].strip()
            if "|" in chunk:
                left, right = chunk.split("|", 1)
                modes = self.parse_word(left)
                f = RatFunc.parse(right, self.N)
            else:
                try:
                    modes = self.parse_word(chunk)
                    f = self.const(1)
                except ParseError:
                    modes = []
                    f = RatFunc.parse(chunk, self.N)
            s = self.normal_order(modes, f)
            total = total + (s if sign > 0 else -s)
        return total

    def format_state(self, s: State) -> str:
        return str(self.state(s.terms))


def _split_terms(text: str) -> list[tuple[int, str]]:
    chunks: list[tuple[int, str]] = []
    depth = 0
    sign = 1
    start = 0
    prev = ""
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch in "+-" and depth == 0 and prev not in ("", "^", "|", "*", "/"):
            piece = text[start:i].strip()
            if piece:
                chunks.append((sign, piece))
            sign = 1 if ch == "+" else -1
            start = i + 1
            prev = ""
            continue
        if not ch.isspace():
            prev = ch
    piece = text[start:].strip()
    if piece:
        chunks.append((sign, piece))
    if not chunks:
        raise ParseError("empty state expression")
    return chunks


def states_equal(a: State, b: State) -> bool:
    return a.terms == b.terms


def iter_monomials(s: State) -> Iterable[tuple[Word, RatFunc]]:
    for (w, _t), f in s.items():
        yield w, f
