"""The loop Lie algebra acting on V (x) Q(x) and its verification suites.

Basis elements are t^j f X with X one of a g-current [label], dt, dx_a,
d/dx_a or d/dt.  They are grouped into generating series

    g(f,z)  = sum t^j f g     z^{-j-1}      k0(f,z) = sum t^j f dt   z^{-j-1}
    ka(f,z) = sum t^j f dx_a  z^{-j-1}      da(f,z) = sum t^j f d/dx_a z^{-j-1}
    d0(f,z) = -sum t^j f d/dt z^{-j-1}

and rho sends each series to the field of a fixed state, so the element at
loop power j acts as the j-th product with that state.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .charts import ChartTransition, gluing
from .ratfunc import ParseError, RatFunc
from .report import Check, compare
from .vacore import Engine, State, binom, e, g, u, v

CURRENT, FORM_DT, FORM_DX, VECT_DX, VECT_DT = "current", "dt", "dx", "d/dx", "d/dt"
KINDS = (CURRENT, FORM_DT, FORM_DX, VECT_DX, VECT_DT)


@dataclass(frozen=True)
class LoopElement:
    """t^power * coeff * basis; index is a g basis index for currents, 1-based otherwise."""

    kind: str
    power: int
    coeff: RatFunc
    index: int = 0

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown loop element kind {self.kind!r}")
        if self.kind in (FORM_DX, VECT_DX) and self.index < 1:
            raise ValueError("dx_a and d/dx_a need an index a >= 1")

    def with_coeff(self, f: RatFunc) -> "LoopElement":
        return LoopElement(self.kind, self.power, f, self.index)

    def basis_text(self, labels: Sequence[str] | None = None) -> str:
        if self.kind == CURRENT:
            lab = labels[self.index] if labels else str(self.index)
            return f"[{lab}]"
        if self.kind == FORM_DX:
            return f"dx{self.index}"
        if self.kind == VECT_DX:
            return f"d/dx{self.index}"
        return self.kind

    def format(self, labels: Sequence[str] | None = None) -> str:
        c = str(self.coeff)
        if not _ATOM.fullmatch(c):
            c = f"({c})"
        return f"t^{self.power} * {c} * {self.basis_text(labels)}"

    def __str__(self) -> str:
        return self.format()


_ATOM = re.compile(r"-?[\w/^]+")
_ELEMENT_RE = re.compile(
    r"^\s*(?:(?P<t>t)(?:\^\s*(?P<pow>[-+]?\d+))?\s*\*\s*)?(?:(?P<coeff>.*?)\s*\*\s*)?"
    r"(?P<basis>d/dx\d+|d/dt|dx\d+|dt|\[[^\]]+\])\s*$"
)


def parse_element(text: str, engine: Engine) -> LoopElement:
    """Parse ``t^3 * (x1/x2) * d/dx1``, ``t^-1 * x2 * dt`` or ``t^0 * 1 * [e]``."""
    m = _ELEMENT_RE.match(text)
    if not m:
        raise ParseError(f"cannot parse loop element {text!r}")
    power = int(m.group("pow")) if m.group("pow") else (1 if m.group("t") else 0)
    coeff = engine.fn(m.group("coeff") or "1")
    basis = m.group("basis")
    if basis.startswith("["):
        lab = basis[1:-1].strip()
        try:
            idx = engine.alg.index(lab)
        except (KeyError, ValueError):
            raise ParseError(f"unknown g basis label {lab!r}") from None
        return LoopElement(CURRENT, power, coeff, idx)
    if basis == "dt":
        return LoopElement(FORM_DT, power, coeff)
    if basis == "d/dt":
        return LoopElement(VECT_DT, power, coeff)
    kind = VECT_DX if basis.startswith("d/") else FORM_DX
    idx = int(basis.rsplit("x", 1)[1])
    if not 1 <= idx <= engine.N:
        raise ParseError(f"index {idx} out of range 1..{engine.N}")
    return LoopElement(kind, power, coeff, idx)


def collect(elements: Iterable[LoopElement]) -> list[LoopElement]:
    """Merge like basis terms and drop zeros; the order is canonical."""
    acc: dict[tuple[str, int, int], RatFunc] = {}
    for el in elements:
        key = (el.kind, el.index, el.power)
        acc[key] = acc[key] + el.coeff if key in acc else el.coeff
    return [LoopElement(k, p, f, i) for (k, i, p), f in sorted(acc.items()) if f]


# ---------------------------------------------------------------------------
# rho


@dataclass(frozen=True)
class RhoOperator:
    state: State
    mode: int

    def apply(self, engine: Engine, b: State) -> State:
        return engine.nth_product(self.state, self.mode, b)


def series_state(engine: Engine, kind: str, index: int, f: RatFunc) -> State:
    """The state whose field is the generating series of the given kind.

    For kind d/dt this is the series d0, which carries the opposite sign of
    t^j f d/dt.
    """
    N, c = engine.N, engine.cfg.c
    if kind == CURRENT:
        return engine.monomial([g(index, -1)], f)
    if kind == FORM_DT:
        return engine.vacuum(f).scale(c)
    if kind == FORM_DX:
        return engine.monomial([u(index, -1)], f).scale(c)
    if kind == VECT_DX:
        out = engine.monomial([v(index, -1)], f)
        for p in range(1, N + 1):
            d = f.diff(p)
            if d:
                out = out + engine.monomial([e(p, index, -1)], d)
        return out
    out = engine.nth_product(engine.virasoro_omega(), -1, engine.vacuum(f))
    for s in range(1, N + 1):
        d = f.diff(s)
        if not d:
            continue
        for k in range(1, N + 1):
            out = out + engine.monomial([u(k, -1), e(s, k, -1)], d)
        out = out - engine.monomial([u(s, -2)], d)
    return out


def rho(engine: Engine, el: LoopElement) -> RhoOperator:
    st = series_state(engine, el.kind, el.index, engine.fn(el.coeff))
    if el.kind == VECT_DT:
        st = -st
    return RhoOperator(st, el.power)


def rho_apply(engine: Engine, elements: Iterable[LoopElement], b: State) -> State:
    out = engine.state()
    for el in elements:
        out = out + rho(engine, el).apply(engine, b)
    return out


# ---------------------------------------------------------------------------
# bracket tables


@dataclass(frozen=True)
class SeriesTerm:
    """coef * X(F, z2) (or its z2-derivative) times the n-th derivative of delta."""

    order: int
    kind: str
    index: int
    F: RatFunc
    coef: Fraction = Fraction(1)
    deriv: bool = False


FAMILIES = ("g-g", "d-g", "d-k0", "d-k", "d-d", "k-k", "g-k", "d0-g", "d0-k0", "d0-k", "d0-d", "d0-d0")

FAMILY_REFS = {
    "g-g": "current-current relation with central form terms",
    "d-g": "vector field acts on current coefficients",
    "d-k0": "vector field acts on dt coefficients",
    "d-k": "vector field acts on dx coefficients with central terms",
    "d-d": "vector field bracket",
    "k-k": "forms commute",
    "g-k": "currents commute with forms",
    "d0-g": "time translation on currents",
    "d0-k0": "time translation on dt forms",
    "d0-k": "time translation on dx forms",
    "d0-d": "time translation against vector fields",
    "d0-d0": "time translations form a Virasoro algebra of central charge zero",
}

_FAMILY_KINDS = {
    (CURRENT, CURRENT): "g-g",
    (VECT_DX, CURRENT): "d-g",
    (VECT_DX, FORM_DT): "d-k0",
    (VECT_DX, FORM_DX): "d-k",
    (VECT_DX, VECT_DX): "d-d",
    (FORM_DT, FORM_DT): "k-k",
    (FORM_DT, FORM_DX): "k-k",
    (FORM_DX, FORM_DT): "k-k",
    (FORM_DX, FORM_DX): "k-k",
    (CURRENT, FORM_DT): "g-k",
    (CURRENT, FORM_DX): "g-k",
    (VECT_DT, CURRENT): "d0-g",
    (VECT_DT, FORM_DT): "d0-k0",
    (VECT_DT, FORM_DX): "d0-k",
    (VECT_DT, VECT_DX): "d0-d",
    (VECT_DT, VECT_DT): "d0-d0",
}


def family_of(kind_a: str, kind_b: str) -> tuple[str, bool]:
    """The relation family of a kind pair and whether the pair is reversed."""
    if (kind_a, kind_b) in _FAMILY_KINDS:
        return _FAMILY_KINDS[(kind_a, kind_b)], False
    if (kind_b, kind_a) in _FAMILY_KINDS:
        return _FAMILY_KINDS[(kind_b, kind_a)], True
    raise ValueError(f"no relation family for {kind_a}, {kind_b}")


def relation_terms(engine: Engine, a: tuple[str, int, RatFunc], b: tuple[str, int, RatFunc]) -> list[SeriesTerm]:
    """Right side of [A(f,z1), B(h,z2)] for a pair in table order."""
    (ka, ia, f), (kb, ib, h) = a, b
    N = engine.N
    fam, rev = family_of(ka, kb)
    if rev:
        raise ValueError("relation_terms needs the pair in table order")
    fh = f * h
    out: list[SeriesTerm] = []
    if fam in ("k-k", "g-k"):
        return out
    if fam == "g-g":
        for k, c in engine.alg.bracket(ia, ib).items():
            out.append(SeriesTerm(0, CURRENT, k, fh, Fraction(c)))
        kappa = Fraction(engine.alg.pairing(ia, ib))
        if kappa:
            out.append(SeriesTerm(1, FORM_DT, 0, fh, kappa))
            for p in range(1, N + 1):
                out.append(SeriesTerm(0, FORM_DX, p, h * f.diff(p), kappa))
    elif fam == "d-g":
        out.append(SeriesTerm(0, CURRENT, ib, f * h.diff(ia)))
    elif fam == "d-k0":
        out.append(SeriesTerm(0, FORM_DT, 0, f * h.diff(ia)))
    elif fam == "d-k":
        out.append(SeriesTerm(0, FORM_DX, ib, f * h.diff(ia)))
        if ia == ib:
            out.append(SeriesTerm(1, FORM_DT, 0, fh))
            for p in range(1, N + 1):
                out.append(SeriesTerm(0, FORM_DX, p, h * f.diff(p)))
    elif fam == "d-d":
        out.append(SeriesTerm(0, VECT_DX, ib, f * h.diff(ia)))
        out.append(SeriesTerm(0, VECT_DX, ia, h * f.diff(ib), Fraction(-1)))
    elif fam == "d0-k0":
        for p in range(1, N + 1):
            out.append(SeriesTerm(0, FORM_DX, p, f * h.diff(p)))
    elif fam in ("d0-g", "d0-k", "d0-d", "d0-d0"):
        weight = 2 if fam == "d0-d0" else 1
        out.append(SeriesTerm(0, kb, ib, fh, deriv=True))
        out.append(SeriesTerm(1, kb, ib, fh, Fraction(weight)))
        if fam == "d0-d":
            out.append(SeriesTerm(0, VECT_DT, 0, h * f.diff(ib), Fraction(-1)))
    return [t for t in out if t.F]


def _series(el: LoopElement) -> tuple[str, int, RatFunc, int]:
    """(kind, index, F, power) of the series containing el; d/dt flips sign."""
    f = -el.coeff if el.kind == VECT_DT else el.coeff
    return el.kind, el.index, f, el.power


def _series_mode(kind: str, index: int, F: RatFunc, j: int) -> LoopElement:
    if kind == VECT_DT:
        F = -F
    return LoopElement(kind, j, F, index)


def loop_bracket(engine: Engine, x: LoopElement, y: LoopElement) -> list[LoopElement]:
    """[x, y] expanded in basis elements.

    A term X(F) times the n-th derivative of delta contributes
    binom(m, n) X_{m+k-n}(F); a z2-derivative of X turns X_j into -j X_{j-1}.
    """
    ka, ia, f, m = _series(x)
    kb, ib, h, k = _series(y)
    _fam, rev = family_of(ka, kb)
    sign = 1
    if rev:
        (ka, ia, f, m), (kb, ib, h, k) = (kb, ib, h, k), (ka, ia, f, m)
        sign = -1
    out = []
    for t in relation_terms(engine, (ka, ia, f), (kb, ib, h)):
        c = t.coef * binom(m, t.order) * sign
        if not c:
            continue
        j = m + k - t.order
        if t.deriv:
            c = c * (-j)
            j -= 1
            if not c:
                continue
        el = _series_mode(t.kind, t.index, t.F, j)
        out.append(el.with_coeff(el.coeff.scaled(c)))
    return collect(out)


def term_state(engine: Engine, t: SeriesTerm) -> State:
    st = series_state(engine, t.kind, t.index, t.F)
    if t.deriv:
        st = engine.translation_D(st)
    return st.scale(t.coef)


def product_identity(
    engine: Engine, a: tuple[str, int, RatFunc], b: tuple[str, int, RatFunc], n: int
) -> tuple[State, State]:
    """Both sides of state(A)_(n) state(B) = sum of the order-n relation terms."""
    lhs = engine.nth_product(series_state(engine, *a), n, series_state(engine, *b))
    rhs = engine.state()
    for t in relation_terms(engine, a, b):
        if t.order == n:
            rhs = rhs + term_state(engine, t)
    return lhs, rhs


def family_pairs(engine: Engine, family: str) -> list[tuple[tuple[str, int], tuple[str, int]]]:
    N, dim = engine.N, engine.alg.dim
    forms = [(FORM_DT, 0)] + [(FORM_DX, a) for a in range(1, N + 1)]
    cur = [(CURRENT, i) for i in range(dim)]
    vec = [(VECT_DX, a) for a in range(1, N + 1)]
    d0 = [(VECT_DT, 0)]
    table = {
        "g-g": (cur, cur),
        "d-g": (vec, cur),
        "d-k0": (vec, [(FORM_DT, 0)]),
        "d-k": (vec, forms[1:]),
        "d-d": (vec, vec),
        "k-k": (forms, forms),
        "g-k": (cur, forms),
        "d0-g": (d0, cur),
        "d0-k0": (d0, [(FORM_DT, 0)]),
        "d0-k": (d0, forms[1:]),
        "d0-d": (d0, vec),
        "d0-d0": (d0, d0),
    }
    if family not in table:
        raise ValueError(f"unknown relation family {family!r}; expected one of {', '.join(FAMILIES)}")
    left, right = table[family]
    return [(x, y) for x in left for y in right]


def _kind_text(engine: Engine, kind: str, index: int) -> str:
    if kind == CURRENT:
        return engine.alg.labels[index]
    if kind == FORM_DT:
        return "k0"
    if kind == FORM_DX:
        return f"k{index}"
    if kind == VECT_DX:
        return f"d{index}"
    return "d0"


def verify_relation_suite(engine: Engine, family: str, samples: Sequence[RatFunc]) -> list[Check]:
    """Every n-th product identity of the family, 0 <= n < deg a + deg b."""
    out = []
    ref = FAMILY_REFS[family]
    for (ka, ia), (kb, ib) in family_pairs(engine, family):
        for f in samples:
            for h in samples:
                a, b = (ka, ia, f), (kb, ib, h)
                da = series_state(engine, *a).degree()
                db = series_state(engine, *b).degree()
                for n in range(max(da + db, 1)):
                    lhs, rhs = product_identity(engine, a, b, n)
                    cid = (
                        f"{family}/{_kind_text(engine, ka, ia)},{_kind_text(engine, kb, ib)}"
                        f"/f={f},h={h}/n={n}"
                    )
                    out.append(compare(cid, ref, lhs, rhs))
    return out


def random_element(engine: Engine, rng: random.Random, samples: Sequence[RatFunc], powers=(-2, 2)) -> LoopElement:
    kind = rng.choice(KINDS)
    j = rng.randint(*powers)
    f = rng.choice(list(samples))
    if kind == CURRENT:
        return LoopElement(kind, j, f, rng.randrange(engine.alg.dim))
    if kind in (FORM_DX, VECT_DX):
        return LoopElement(kind, j, f, rng.randint(1, engine.N))
    return LoopElement(kind, j, f)


def commutator_on(engine: Engine, x: LoopElement, y: LoopElement, c: State) -> State:
    rx, ry = rho(engine, x), rho(engine, y)
    return rx.apply(engine, ry.apply(engine, c)) - ry.apply(engine, rx.apply(engine, c))


def spot_check_operators(
    engine: Engine, samples: Sequence[RatFunc], states: Sequence[State], rng: random.Random
) -> list[Check]:
    """[rho A, rho B] c = rho([A, B]) c for random A, B, one pair per state."""
    out = []
    for idx, c in enumerate(states):
        x, y = random_element(engine, rng, samples), random_element(engine, rng, samples)
        lhs = commutator_on(engine, x, y, c)
        rhs = rho_apply(engine, loop_bracket(engine, x, y), c)
        fam, _ = family_of(x.kind, y.kind)
        out.append(
            compare(
                f"operator/{idx:03d}/{x.format(engine.alg.labels)},{y.format(engine.alg.labels)}",
                f"operator bracket matches the loop bracket ({fam})",
                lhs,
                rhs,
            )
        )
    return out


# ---------------------------------------------------------------------------
# coordinate changes


def theta(T: ChartTransition, el: LoopElement) -> list[LoopElement]:
    """Rewrite an element given in tilde coordinates in the x chart."""
    f = T.express(el.coeff)
    jac = T.jac
    if el.kind == VECT_DX:
        return collect(
            LoopElement(VECT_DX, el.power, jac.inv[el.index - 1][s] * f, s + 1) for s in range(T.n)
        )
    if el.kind == FORM_DX:
        return collect(
            LoopElement(FORM_DX, el.power, jac.fwd[p][el.index - 1] * f, p + 1) for p in range(T.n)
        )
    return collect([el.with_coeff(f)])


def verify_equivariance(engine: Engine, T: ChartTransition, samples: Sequence[RatFunc], power: int = 0) -> list[Check]:
    """Phi(rho(e).state) = rho(Theta(e)).state for each kind and sample."""
    G_ = gluing(engine, T)
    elements = [LoopElement(CURRENT, power, engine.const(1), i) for i in range(engine.alg.dim)]
    elements += [LoopElement(FORM_DT, power, engine.const(1))]
    elements += [LoopElement(FORM_DX, power, engine.const(1), a) for a in range(1, engine.N + 1)]
    elements += [LoopElement(VECT_DX, power, engine.const(1), a) for a in range(1, engine.N + 1)]
    elements += [LoopElement(VECT_DT, power, engine.const(1))]
    refs = {
        CURRENT: "currents are chart independent",
        FORM_DT: "dt forms are chart independent",
        FORM_DX: "dx forms transform by the jacobian",
        VECT_DX: "vector field image transforms by the inverse jacobian",
        VECT_DT: "time-translation field is chart independent",
    }
    out = []
    for base in elements:
        for f in samples:
            el = base.with_coeff(f)
            lhs = G_.phi(rho(engine, el).state)
            rhs = engine.state()
            for t in theta(T, el):
                rhs = rhs + rho(engine, t).state
            out.append(
                compare(
                    f"equivariance/{T.name}/{base.basis_text(engine.alg.labels)}/f={f}",
                    refs[el.kind],
                    lhs,
                    rhs,
                )
            )
    out += explicit_transforms(engine, T, samples)
    return out


def explicit_transforms(engine: Engine, T: ChartTransition, samples: Sequence[RatFunc]) -> list[Check]:
    """The vector-field and Virasoro-field transformation laws written out."""
    G_ = gluing(engine, T)
    N, jac = engine.N, T.jac
    out = []
    for f in samples:
        F = T.express(f)
        for a in range(1, N + 1):
            tilde = engine.monomial([v(a, -1)], f)
            for q in range(1, N + 1):
                tilde = tilde + engine.monomial([e(q, a, -1)], f.diff(q))
            rhs = engine.state()
            for s in range(1, N + 1):
                cs = jac.inv[a - 1][s - 1] * F
                rhs = rhs + engine.monomial([v(s, -1)], cs)
                for k in range(1, N + 1):
                    rhs = rhs + engine.monomial([e(k, s, -1)], cs.diff(k))
            out.append(
                compare(
                    f"vector-field-law/{T.name}/a={a}/f={f}",
                    "image of v_a(-1)f + E_qa(-1)d_q f under the gluing map",
                    G_.phi(tilde),
                    rhs,
                )
            )

        def vir_field(h: RatFunc) -> State:
            st = engine.nth_product(engine.virasoro_omega(), -1, engine.vacuum(h))
            for a in range(1, N + 1):
                d = h.diff(a)
                if d:
                    for b in range(1, N + 1):
                        st = st + engine.monomial([u(b, -1), e(a, b, -1)], d)
                    st = st - engine.monomial([u(a, -2)], d)
            return st

        out.append(
            compare(
                f"virasoro-field-law/{T.name}/f={f}",
                "image of omega_(-1)f + u_k(-1)E_sk(-1)d_s f - u_s(-2)d_s f under the gluing map",
                G_.phi(vir_field(f)),
                vir_field(F),
            )
        )
    return out


# ---------------------------------------------------------------------------
# exact forms


def exact_form(engine: Engine, j: int, f: RatFunc) -> list[LoopElement]:
    """d(t^j f) = j t^(j-1) f dt + sum_p t^j (d_p f) dx_p."""
    out = [LoopElement(FORM_DT, j - 1, f.scaled(j))]
    out += [LoopElement(FORM_DX, j, f.diff(p), p) for p in range(1, engine.N + 1)]
    return collect(out)


def verify_exact_forms(
    engine: Engine, samples: Sequence[RatFunc], states: Sequence[State], powers: Iterable[int] = range(-2, 3)
) -> list[Check]:
    out = []
    for j in powers:
        for f in samples:
            form = exact_form(engine, j, f)
            for idx, c in enumerate(states):
                out.append(
                    compare(
                        f"exact-form/j={j}/f={f}/state={idx:02d}",
                        "exact forms act trivially",
                        rho_apply(engine, form, c),
                        engine.state(),
                    )
                )
    return out
