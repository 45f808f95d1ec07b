"""Coordinate changes between charts and the gluing isomorphism Phi.

A transition is given by both directions: ``forward`` expresses the tilde
coordinates in terms of x, ``inverse`` expresses x in terms of the tilde
coordinates.  Phi maps states written in the tilde chart to states written
in the x chart.  On generators,

    Phi(f)              = f(xt(x))
    Phi(ut_a(-1)1)      = u_p(-1) d_p xt_a
    Phi(vt_a(-1)1)      = v_p(-1) dt_a x_p + E_sp(-1) d_s dt_a x_p
    Phi(Et_ab(-1)1)     = E_sp(-1) (d_s xt_a)(dt_b x_p) + u_s(-1) dt_b d_s xt_a
    Phi(g(-1)1), Phi(L(-2)1) unchanged

and Phi extends to composites as a vertex algebra homomorphism.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from . import matrices as mx
from .ratfunc import RatFunc, RatFuncError
from .report import Check, compare
from .vacore import E, G, L, U, V, Engine, State, Terms, Word, _accumulate, e, u, v


class ChartError(ValueError):
    pass


@dataclass(frozen=True)
class JacobianData:
    fwd: tuple[tuple[RatFunc, ...], ...]  # fwd[r][s] = d_r xt_s, in x
    inv: tuple[tuple[RatFunc, ...], ...]  # inv[a][p] = dt_a x_p, in x


@dataclass(frozen=True)
class ChartTransition:
    forward: tuple[RatFunc, ...]
    inverse: tuple[RatFunc, ...]
    jac: JacobianData
    name: str = ""

    @property
    def n(self) -> int:
        return len(self.forward)

    def express(self, f: RatFunc) -> RatFunc:
        """A tilde-chart function rewritten in x."""
        return f.lifted(self.n).substitute(list(self.forward))

    def reversed(self) -> "ChartTransition":
        return build_transition(self.inverse, self.forward, name=f"{self.name}^-1")


def _parse_all(items: Sequence[RatFunc | str], n: int) -> tuple[RatFunc, ...]:
    out = []
    for f in items:
        if isinstance(f, str):
            f = RatFunc.parse(f, n)
        if f.nvars > n:
            raise ChartError(f"{f} uses more than {n} variables")
        out.append(f.lifted(n))
    return tuple(out)


def build_transition(
    forward: Sequence[RatFunc | str], inverse: Sequence[RatFunc | str], name: str = ""
) -> ChartTransition:
    n = len(forward)
    if n == 0 or len(inverse) != n:
        raise ChartError("forward and inverse must be non-empty tuples of equal length")
    fw, iv = _parse_all(forward, n), _parse_all(inverse, n)
    xs = [RatFunc.var(p, n) for p in range(1, n + 1)]
    for label, outer, inner in (("inverse(forward)", iv, fw), ("forward(inverse)", fw, iv)):
        for p, f in enumerate(outer):
            try:
                got = f.substitute(list(inner))
            except RatFuncError as exc:
                raise ChartError(f"{label} entry {p + 1}: {exc}") from None
            if got != xs[p]:
                raise ChartError(f"{label} entry {p + 1} is {got}, expected x{p + 1}")
    fwd = [[fw[s].diff(r + 1) for s in range(n)] for r in range(n)]
    if not mx.det(fwd):
        raise ChartError("jacobian determinant vanishes identically")
    inv = [[iv[p].diff(a + 1).substitute(list(fw)) for p in range(n)] for a in range(n)]
    for label, prod in (("fwd*inv", mx.matmul(fwd, inv)), ("inv*fwd", mx.matmul(inv, fwd))):
        for i in range(n):
            for j in range(n):
                want = 1 if i == j else 0
                if prod[i][j] != want:
                    raise ChartError(f"jacobian product {label} entry ({i + 1},{j + 1}) is {prod[i][j]}")
    T = ChartTransition(fw, iv, JacobianData(_freeze(fwd), _freeze(inv)), name)
    bad = second_derivative_identity(T)
    if bad:
        raise ChartError(f"second-derivative identity fails at (a,b,q) = {bad[0]}")
    return T


def _freeze(m: Sequence[Sequence[RatFunc]]) -> tuple[tuple[RatFunc, ...], ...]:
    return tuple(tuple(r) for r in m)


def identity_chart(n: int) -> ChartTransition:
    xs = [f"x{p}" for p in range(1, n + 1)]
    return build_transition(xs, xs, name=f"identity{n}")


def transition_from_config(doc: Mapping) -> ChartTransition:
    try:
        n = int(doc["n"])
        fw, iv = list(doc["forward"]), list(doc["inverse"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ChartError(f"chart config needs n, forward, inverse ({exc})") from None
    if len(fw) != n or len(iv) != n:
        raise ChartError(f"chart {doc.get('name', '')!r}: forward/inverse must have {n} entries")
    return build_transition(fw, iv, name=str(doc.get("name", "")))


def compose(T_ij: ChartTransition, T_jk: ChartTransition) -> ChartTransition:
    """T_ik: hat coordinates as functions of x, via the tilde chart."""
    if T_ij.n != T_jk.n:
        raise ChartError("charts are not composable (different dimensions)")
    fw = [f.substitute(list(T_ij.forward)) for f in T_jk.forward]
    iv = [f.substitute(list(T_jk.inverse)) for f in T_ij.inverse]
    return build_transition(fw, iv, name=f"{T_ij.name}.{T_jk.name}")


def tilde_derivative(T: ChartTransition, f: RatFunc, a: int) -> RatFunc:
    """dt_a f = (dt_a x_p) d_p f, everything in x."""
    out = RatFunc.const(0, T.n)
    for p in range(T.n):
        c = T.jac.inv[a - 1][p]
        if c:
            d = f.diff(p + 1)
            if d:
                out = out + c * d
    return out


def second_derivative_identity(T: ChartTransition) -> list[tuple[int, int, int]]:
    """Index triples where (d_q dt_a x_p)(d_p xt_b) + dt_a d_q xt_b != 0."""
    n = T.n
    bad = []
    for a in range(1, n + 1):
        for b in range(1, n + 1):
            for q in range(1, n + 1):
                tot = RatFunc.const(0, n)
                for p in range(1, n + 1):
                    tot = tot + T.jac.inv[a - 1][p - 1].diff(q) * T.jac.fwd[p - 1][b - 1]
                tot = tot + tilde_derivative(T, T.jac.fwd[q - 1][b - 1], a)
                if tot:
                    bad.append((a, b, q))
    return bad


def derivative_commutator(T: ChartTransition, f: RatFunc, r: int, p: int) -> tuple[RatFunc, RatFunc]:
    """Both sides of [d_r, dt_p] f = (d_r dt_p x_q) d_q f."""
    lhs = tilde_derivative(T, f, p).diff(r) - tilde_derivative(T, f.diff(r), p)
    rhs = RatFunc.const(0, T.n)
    for q in range(1, T.n + 1):
        rhs = rhs + T.jac.inv[p - 1][q - 1].diff(r) * f.diff(q)
    return lhs, rhs


class Gluing:
    """Phi for one transition, with memoized images of monomials."""

    def __init__(self, engine: Engine, T: ChartTransition):
        if engine.N != T.n:
            raise ChartError(f"engine has N={engine.N} but chart has n={T.n}")
        self.engine = engine
        self.T = T
        self._gen: dict[tuple[int, int, int], Terms] = {}
        self._img: dict[tuple[Word, RatFunc], Terms] = {}
        self._fn: dict[RatFunc, RatFunc] = {}

    def express(self, f: RatFunc) -> RatFunc:
        hit = self._fn.get(f)
        if hit is None:
            hit = self.T.express(f)
            self._fn[f] = hit
        return hit

    def generator_image(self, kind: int, i: int, j: int = 0) -> State:
        return self.engine.state(self._generator(kind, i, j))

    def _generator(self, kind: int, i: int, j: int) -> Terms:
        key = (kind, i, j)
        if key in self._gen:
            return self._gen[key]
        n, jac = self.T.n, self.T.jac
        out: Terms = {}

        def add(word: Word, f: RatFunc) -> None:
            if f:
                _accumulate(out, {(word, 0): f})

        if kind == U:
            for p in range(1, n + 1):
                add((u(p, -1),), jac.fwd[p - 1][i - 1])
        elif kind == V:
            for p in range(1, n + 1):
                c = jac.inv[i - 1][p - 1]
                add((v(p, -1),), c)
                for s in range(1, n + 1):
                    add((e(s, p, -1),), c.diff(s))
        elif kind == E:
            a, b = i, j
            for s in range(1, n + 1):
                for p in range(1, n + 1):
                    add((e(s, p, -1),), jac.fwd[s - 1][a - 1] * jac.inv[b - 1][p - 1])
                add((u(s, -1),), tilde_derivative(self.T, jac.fwd[s - 1][a - 1], b))
        else:
            raise ValueError("only u, v, E generators change under Phi")
        self._gen[key] = out
        return out

    def _image(self, word: Word, f: RatFunc) -> Terms:
        key = (word, f)
        hit = self._img.get(key)
        if hit is not None:
            return hit
        act = self.engine.vac
        if not word:
            out: Terms = {((), 0): self.express(f)}
        else:
            alpha, rest = word[0], word[1:]
            r = self._image(rest, f)
            if alpha.kind in (G, L):
                out = act.apply_mode(alpha, r)
            else:
                out = act.nth_product(self._generator(alpha.kind, alpha.i, alpha.j), alpha.level, r)
        self._img[key] = out
        return out

    def phi(self, a: State) -> State:
        out: Terms = {}
        for (w, _t), f in a.terms.items():
            _accumulate(out, self._image(w, f))
        return self.engine.state(out)


_gluing_cache: dict[tuple[int, ChartTransition], Gluing] = {}


def gluing(engine: Engine, T: ChartTransition) -> Gluing:
    key = (id(engine), T)
    g = _gluing_cache.get(key)
    if g is None or g.engine is not engine:
        g = Gluing(engine, T)
        _gluing_cache[key] = g
    return g


def phi(engine: Engine, T: ChartTransition, a: State) -> State:
    return gluing(engine, T).phi(a)


def generator_corpus(engine: Engine, samples: Iterable[RatFunc]) -> list[tuple[str, State]]:
    gens = engine.generators()
    for f in samples:
        gens.append((f"fn[{f}]", engine.vacuum(f)))
    return gens


REF_GLUING = "gluing map respects n-th products of generators"
REF_COCYCLE = "gluing maps compose over triple overlaps"
REF_INVERSE = "gluing map of the reversed chart is the inverse"
REF_OMEGA = "gluing map fixes the total Virasoro element"


def verify_gluing(
    engine: Engine, T: ChartTransition, samples: Iterable[RatFunc], degree_bound: int | None = None
) -> list[Check]:
    """Phi(a)_(n) Phi(b) = Phi(a_(n) b) for generator pairs, 0 <= n < deg a + deg b."""
    G_ = gluing(engine, T)
    gens = generator_corpus(engine, samples)
    images = {name: G_.phi(s) for name, s in gens}
    out = []
    for na, a in gens:
        for nb, b in gens:
            top = a.degree() + b.degree() - 1
            if degree_bound is not None:
                top = min(top, degree_bound)
            for n in range(top + 1):
                lhs = engine.nth_product(images[na], n, images[nb])
                rhs = G_.phi(engine.nth_product(a, n, b))
                out.append(
                    compare(f"gluing/{T.name}/{na}_({n}){nb}", REF_GLUING, lhs, rhs, a=na, b=nb, n=n)
                )
    return out


def verify_cocycle(
    engine: Engine, T_jk: ChartTransition, T_ij: ChartTransition, samples: Iterable[RatFunc]
) -> list[Check]:
    if T_ij.n != T_jk.n:
        raise ChartError("charts are not composable (different dimensions)")
    T_ik = compose(T_ij, T_jk)
    G_ij, G_jk, G_ik = gluing(engine, T_ij), gluing(engine, T_jk), gluing(engine, T_ik)
    G_ji = gluing(engine, T_ij.reversed())
    out = []
    tag = f"{T_ij.name}|{T_jk.name}"
    for name, s in generator_corpus(engine, samples):
        out.append(
            compare(f"cocycle/{tag}/{name}", REF_COCYCLE, G_ij.phi(G_jk.phi(s)), G_ik.phi(s), gen=name)
        )
        out.append(compare(f"inverse/{T_ij.name}/{name}", REF_INVERSE, G_ji.phi(G_ij.phi(s)), s, gen=name))
    return out


def omega_corrections(engine: Engine, T: ChartTransition) -> tuple[State, State]:
    """The two correction states relating Phi(omega~^Hei) and omega^Hei."""
    n, jac = T.n, T.jac
    first = engine.state()
    second = engine.state()
    for k in range(n):
        for p in range(n):
            if jac.fwd[k][p] and jac.inv[p][k]:
                first = first + engine.function_mode(jac.fwd[k][p], -3, engine.vacuum(jac.inv[p][k]))
    for s in range(1, n + 1):
        for m in range(1, n + 1):
            for a in range(n):
                if jac.fwd[s - 1][a] and jac.inv[a][m - 1]:
                    inner = engine.function_mode(jac.fwd[s - 1][a], -2, engine.vacuum(jac.inv[a][m - 1]))
                    second = second + engine.apply_mode(e(s, m, -1), inner)
    return first, second


def verify_omega_invariance(engine: Engine, T: ChartTransition) -> list[Check]:
    G_ = gluing(engine, T)
    c1, c2 = omega_corrections(engine, T)
    corr = c1 + c2
    tag = T.name
    checks = [
        compare(f"omega/{tag}/total", REF_OMEGA, G_.phi(engine.virasoro_omega()), engine.virasoro_omega()),
        compare(
            f"omega/{tag}/heisenberg",
            "Heisenberg Virasoro element picks up the jacobian correction with a minus sign",
            G_.phi(engine.omega_hei()),
            engine.omega_hei() - corr,
        ),
        compare(
            f"omega/{tag}/gl",
            "gl_N Virasoro element picks up the jacobian correction with a plus sign",
            G_.phi(engine.omega_gl()),
            engine.omega_gl() + corr,
        ),
        compare(f"omega/{tag}/g", "Sugawara element is chart independent", G_.phi(engine.omega_g()), engine.omega_g()),
        compare(f"omega/{tag}/vir", "Virasoro factor is chart independent", G_.phi(engine.omega_vir()), engine.omega_vir()),
    ]
    return checks
