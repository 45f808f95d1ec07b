"""Generalized Verma modules M(W, S, h) over V (x) Q(x), truncated by degree.

The top component is W (x) S (x) v_h (x) Q(x); a top basis vector is indexed
by t = w * dim S + s.  Creation modes are every mode of negative level,
including L(-1), so the Virasoro factor is the full Verma module.  On the top
E_ab(0) acts through W, g_i(0) through S, L(0) by h, u_p(0) by zero,
v_p(0) differentiates the coefficient, and positive modes vanish.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable, Mapping, Sequence

from . import matrices as mx
from .charts import ChartTransition, gluing
from .corpus import creation_modes
from .liedata import GLNRep, GRep, LieDataError, builtin, from_config, grep_from_spec
from .ratfunc import RatFunc
from .report import Check, compare
from .vacore import (
    E,
    G,
    L,
    U,
    V,
    Action,
    ConfigError,
    Engine,
    EngineConfig,
    Key,
    Mode,
    QTerms,
    State,
    Terms,
    Word,
    _accumulate,
    _fmt_mode,
    e,
    g,
    lmode,
    u,
    v,
    word_degree,
)


class TruncationError(ArithmeticError):
    """A module computation produced components above the degree cutoff."""


@dataclass(frozen=True)
class VermaConfig:
    W: GLNRep
    S: GRep
    h: Fraction
    cutoff: int

    def __post_init__(self) -> None:
        if self.cutoff < 0:
            raise ConfigError("cutoff must be >= 0")


class VermaSpace:
    """Top-level action data for the module; plugs into the generic Action."""

    def __init__(self, cfg: VermaConfig, engine: Engine):
        self.cfg = cfg
        self.dS = cfg.S.dim
        self.top_dim = cfg.W.dim * self.dS
        self._wmats = {
            (a, b): cfg.W.lie_action(a, b) for a in range(1, engine.N + 1) for b in range(1, engine.N + 1)
        }

    def is_creation(self, m: Mode) -> bool:
        return m.level <= -1

    def split(self, top: int) -> tuple[int, int]:
        return divmod(top, self.dS)

    def top_act(self, m: Mode, top: int) -> QTerms:
        if m.level != 0:
            return {}
        w, s = self.split(top)
        out: QTerms = {}
        if m.kind == E:
            mat = self._wmats[(m.i, m.j)]
            for w2 in range(self.cfg.W.dim):
                c = mat[w2][w]
                if c:
                    out[((), w2 * self.dS + s)] = Fraction(c)
        elif m.kind == G:
            mat = self.cfg.S.action(m.i)
            for s2 in range(self.dS):
                c = mat[s2][s]
                if c:
                    out[((), w * self.dS + s2)] = Fraction(c)
        elif m.kind == L:
            if self.cfg.h:
                out[((), top)] = Fraction(self.cfg.h)
        return out


def top_names(cfg: VermaConfig) -> list[str]:
    return [f"w{w + 1}.s{s + 1}" for w in range(cfg.W.dim) for s in range(cfg.S.dim)]


class VermaModule:
    def __init__(self, engine: Engine, cfg: VermaConfig):
        if cfg.W.N != engine.N:
            raise ConfigError(f"W is a gl_{cfg.W.N}-module but the engine has N={engine.N}")
        if cfg.S.matrices and len(cfg.S.matrices) != engine.alg.dim:
            raise ConfigError("S does not match the simple Lie algebra")
        self.engine = engine
        self.cfg = cfg
        self.space = VermaSpace(cfg, engine)
        self.act = Action(engine, self.space)
        self.names = top_names(cfg)
        self._dual: dict[tuple[RatFunc, int, Key, RatFunc], Terms] = {}

    @classmethod
    def create(
        cls,
        engine: Engine,
        tensor_power: int = 1,
        det_power: int = 0,
        S: str = "trivial",
        h: Fraction | int | str = 0,
        cutoff: int = 3,
    ) -> "VermaModule":
        W = GLNRep(engine.N, tensor_power, det_power)
        return cls(engine, VermaConfig(W, grep_from_spec(engine.alg, S), Fraction(h), cutoff))

    # -- states -------------------------------------------------------------
    def state(self, terms: Terms | None = None) -> State:
        return State(terms, self.engine.alg.labels, self.names)

    def top(self, t: int, f: RatFunc | str | int = 1) -> State:
        return self.state({((), t): self.engine.fn(f)})

    def element(self, modes: Sequence[Mode], t: int, f: RatFunc | str | int = 1) -> State:
        """The normal-ordered product of modes applied to a top vector."""
        s = self.top(t, f)
        for m in reversed(list(modes)):
            s = self.apply_mode(m, s)
        return s

    def _guard(self, s: State) -> State:
        for w, _t in s.terms:
            if word_degree(w) > self.cfg.cutoff:
                raise TruncationError(
                    f"degree {word_degree(w)} exceeds the module cutoff {self.cfg.cutoff}"
                )
        return s

    # -- actions ------------------------------------------------------------
    def apply_mode(self, m: Mode, s: State) -> State:
        self.engine._check_mode(m)
        return self._guard(self.state(self.act.apply_mode(m, s.terms)))

    def vertex_act(self, a: State, n: int, s: State) -> State:
        """a_(n) s for a state a of the vertex algebra."""
        return self._guard(self.state(self.act.nth_product(a.terms, n, s.terms)))

    def function_act(self, f: RatFunc | str, n: int, s: State) -> State:
        """f_(n) s through the closed T(f, z) formula."""
        f = self.engine.fn(f)
        out: Terms = {}
        for key, h in s.terms.items():
            _accumulate(out, self.act.function_mode(f, n, key, h))
        return self._guard(self.state(out))

    def function_act_dual(self, f: RatFunc | str, n: int, s: State) -> State:
        """f_(n) s by induction: z-derivative recursion on the top, commutators past creation modes."""
        f = self.engine.fn(f)
        out: Terms = {}
        for key, h in s.terms.items():
            _accumulate(out, self._dual_mode(f, n, key, h))
        return self._guard(self.state(out))

    def _dual_mode(self, f: RatFunc, n: int, key: Key, h: RatFunc) -> Terms:
        if not f:
            return {}
        ck = (f, n, key, h)
        hit = self._dual.get(ck)
        if hit is not None:
            return hit
        word, top = key
        out: Terms = {}
        if word:
            w0, rest = word[0], word[1:]
            inner = self._dual_mode(f, n, (rest, top), h)
            _accumulate(out, self._insert(w0, inner))
            if w0.kind == V:
                _accumulate(out, self._dual_mode(f.diff(w0.i), n + w0.level, (rest, top), h), -1)
        elif n == -1:
            out[((), top)] = f * h
        elif n < -1:
            r = -1 - n
            for p in range(1, self.engine.N + 1):
                fp = f.diff(p)
                if not fp:
                    continue
                for j in range(1, r + 1):
                    sub = self._dual_mode(fp, -1 - (r - j), ((), top), h)
                    _accumulate(out, self._insert(u(p, -j), sub), Fraction(1, r))
        self._dual[ck] = out
        return out

    def _insert(self, m: Mode, terms: Terms) -> Terms:
        out: Terms = {}
        for (w, t), f in terms.items():
            for w2, c in self.act.insert(m, w).items():
                _accumulate(out, {(w2, t): f.scaled(c)})
        return out

    # -- gluing ---------------------------------------------------------------
    def top_transform(self, T: ChartTransition) -> list[list[Any]]:
        """The matrix of J = (d_r xt_s) on W."""
        return self.cfg.W.group_action([list(r) for r in T.jac.fwd])

    def psi(self, T: ChartTransition, s: State) -> State:
        """Psi for the chart T: tilde-chart module element to the x chart."""
        G_ = gluing(self.engine, T)
        J = self.top_transform(T)
        dS = self.space.dS
        memo: dict[tuple[Word, int, RatFunc], Terms] = {}

        def image(word: Word, top: int, f: RatFunc) -> Terms:
            k = (word, top, f)
            if k in memo:
                return memo[k]
            if not word:
                F = G_.express(f)
                w, sidx = divmod(top, dS)
                res: Terms = {}
                for w2 in range(self.cfg.W.dim):
                    c = J[w2][w]
                    if c:
                        _accumulate(res, {((), w2 * dS + sidx): F * c})
            else:
                alpha, rest = word[0], word[1:]
                r = image(rest, top, f)
                if alpha.kind in (G, L):
                    res = self.act.apply_mode(alpha, r)
                else:
                    res = self.act.nth_product(G_._generator(alpha.kind, alpha.i, alpha.j), alpha.level, r)
            memo[k] = res
            return res

        out: Terms = {}
        for (w, t), f in s.terms.items():
            _accumulate(out, image(w, t, f))
        return self._guard(self.state(out))

    def phi_mode(self, T: ChartTransition, m: Mode, s: State) -> State:
        """The image of the tilde mode m under Phi, acting on an x-chart element."""
        if m.kind in (G, L):
            return self.apply_mode(m, s)
        gen = gluing(self.engine, T).generator_image(m.kind, m.i, m.j)
        return self.vertex_act(gen, m.level, s)

    # -- grading --------------------------------------------------------------
    def top_weight_matrix(self) -> list[list[Fraction]]:
        """omega_(1) on the top from representation data alone."""
        N, dim = self.engine.N, self.cfg.W.dim
        I_W = mx.identity(dim, Fraction(1), Fraction(0))
        gl = [[Fraction(0)] * dim for _ in range(dim)]
        lie = {k: [[Fraction(x) for x in r] for r in m] for k, m in self.space._wmats.items()}
        for a in range(1, N + 1):
            for b in range(1, N + 1):
                prod = mx.matmul(lie[(a, a)], lie[(b, b)])
                prod2 = mx.matmul(lie[(b, a)], lie[(a, b)])
                gl = [[x + Fraction(y + z, 2 * (N + 1)) for x, y, z in zip(r, p, q)] for r, p, q in zip(gl, prod, prod2)]
            gl = [[x - y / 2 for x, y in zip(r, p)] for r, p in zip(gl, lie[(a, a)])]
        dS = self.cfg.S.dim
        cas = [[Fraction(0)] * dS for _ in range(dS)]
        inv = self.engine.alg.inverse_form()
        for i in range(self.engine.alg.dim):
            for j in range(self.engine.alg.dim):
                if inv[i][j]:
                    prod = mx.matmul(self.cfg.S.action(j), self.cfg.S.action(i))
                    cas = [[x + inv[i][j] * y for x, y in zip(r, p)] for r, p in zip(cas, prod)]
        k = 2 * (self.engine.cfg.c + self.engine.alg.dual_coxeter)
        cas = [[x / k for x in r] for r in cas]
        I_S = mx.identity(dS, Fraction(1), Fraction(0))
        total = [
            [x + y for x, y in zip(r1, r2)] for r1, r2 in zip(mx.kron(gl, I_S), mx.kron(I_W, cas))
        ]
        for i in range(len(total)):
            total[i][i] += self.cfg.h
        return total

    def basis(self, degree: int) -> list[tuple[Word, int]]:
        """PBW basis keys of the given degree, over the coefficient field."""
        return [(w, t) for w in pbw_words(self.engine, degree) for t in range(self.space.top_dim)]


# ---------------------------------------------------------------------------
# characters


def generators_per_level(N: int, g_dim: int) -> int:
    """2N Heisenberg, N^2 gl_N, dim g affine and one Virasoro mode per level."""
    return 2 * N + N * N + g_dim + 1


def character(N: int, g_dim: int, top_dim: int, cutoff: int) -> list[int]:
    """Graded dimensions from the product formula prod_l (1 - q^l)^(-count)."""
    count = generators_per_level(N, g_dim)
    coeffs = [1] + [0] * cutoff
    for level in range(1, cutoff + 1):
        for _ in range(count):
            for d in range(level, cutoff + 1):
                coeffs[d] += coeffs[d - level]
    return [c * top_dim for c in coeffs]


def module_character(module: VermaModule) -> list[int]:
    e_ = module.engine
    return character(e_.N, e_.alg.dim, module.space.top_dim, module.cfg.cutoff)


def pbw_words(engine: Engine, degree: int) -> list[Word]:
    """Sorted words of creation modes (levels <= -1, L(-1) included) of the given degree."""
    modes = []
    for lvl in range(1, degree + 1):
        modes += creation_modes(engine, -lvl)
        if lvl == 1:
            modes.append(lmode(-1))
    out = []
    for size in range(degree + 1):
        for combo in itertools.combinations_with_replacement(sorted(modes), size):
            if sum(-m.level for m in combo) == degree:
                out.append(tuple(combo))
    return out


def brute_force_character(module: VermaModule) -> list[int]:
    return [len(module.basis(d)) for d in range(module.cfg.cutoff + 1)]


# ---------------------------------------------------------------------------
# configuration


def verma_from_config(doc: Mapping[str, Any], engine: Engine | None = None) -> VermaModule:
    """``{"W": {"tensor_power": 1, "det_power": 0}, "S": "sl2:dim2", "h": "1/2", "cutoff": 3}``."""
    try:
        if engine is None:
            alg = doc.get("algebra", "sl2")
            alg = builtin(alg) if isinstance(alg, str) else from_config(alg)
            engine = Engine(EngineConfig(int(doc.get("N", 2)), alg, Fraction(str(doc.get("c", 1)))))
        wdoc = doc.get("W", {})
        W = GLNRep(engine.N, int(wdoc.get("tensor_power", 1)), int(wdoc.get("det_power", 0)))
        S = grep_from_spec(engine.alg, str(doc.get("S", "trivial")))
        h = Fraction(str(doc.get("h", 0)))
        cutoff = int(doc.get("cutoff", 3))
    except (TypeError, ValueError, ZeroDivisionError, AttributeError) as exc:
        raise ConfigError(f"invalid verma config: {exc}") from None
    except LieDataError as exc:
        raise ConfigError(f"invalid verma config: {exc}") from None
    return VermaModule(engine, VermaConfig(W, S, h, cutoff))


def load_verma(path: str) -> VermaModule:
    with open(path, encoding="utf-8") as fh:
        return verma_from_config(json.load(fh))


# ---------------------------------------------------------------------------
# verification


def _sample_modes(engine: Engine) -> list[Mode]:
    """Every generator mode at levels -2..2 (L shifted so that it ranges over L(-1)..L(2))."""
    out = []
    for lvl in range(-2, 3):
        N = engine.N
        for p in range(1, N + 1):
            out += [u(p, lvl), v(p, lvl)]
        out += [e(a, b, lvl) for a in range(1, N + 1) for b in range(1, N + 1)]
        out += [g(i, lvl) for i in range(engine.alg.dim)]
        out.append(lmode(lvl))
    return out


def random_module_state(module: VermaModule, rng: random.Random, degree: int, samples: Sequence[RatFunc]) -> State:
    eng = module.engine
    modes: list[Mode] = []
    left = degree
    while left > 0:
        lvl = rng.randint(1, left)
        pool = creation_modes(eng, -lvl) + ([lmode(-1)] if lvl == 1 else [])
        modes.append(rng.choice(pool))
        left -= lvl
    return module.element(sorted(modes), rng.randrange(module.space.top_dim), rng.choice(list(samples)))


def verify_top_equivariance(module: VermaModule, T: ChartTransition, samples: Iterable[RatFunc]) -> list[Check]:
    """Phi(X(0)) Psi(top) = Psi(X(0) top) for X = u_a, v_a, E_ab on a basis of the top."""
    eng, N = module.engine, module.engine.N
    out = []
    samples = list(samples)
    modes = [u(a, 0) for a in range(1, N + 1)] + [v(a, 0) for a in range(1, N + 1)]
    modes += [e(a, b, 0) for a in range(1, N + 1) for b in range(1, N + 1)]
    for t in range(module.space.top_dim):
        for f in samples:
            base = module.top(t, f)
            image = module.psi(T, base)
            for m in modes:
                lhs = module.phi_mode(T, m, image)
                rhs = module.psi(T, module.apply_mode(m, base))
                ref = {
                    U: "u_a(0) acts trivially on both tops",
                    V: "top gluing intertwines v_a(0)",
                    E: "top gluing intertwines E_ab(0)",
                }[m.kind]
                out.append(
                    compare(f"top/{T.name}/{_mode_id(m)}/{module.names[t]}/f={f}", ref, lhs, rhs)
                )
    return out


def _mode_id(m: Mode) -> str:
    return _fmt_mode(m, None)


def verify_round_trip(module: VermaModule, T: ChartTransition, states: Sequence[State]) -> list[Check]:
    back = T.reversed()
    out = []
    for idx, s in enumerate(states):
        out.append(
            compare(
                f"psi-round-trip/{T.name}/{idx:02d}",
                "reversed gluing undoes the module gluing",
                module.psi(back, module.psi(T, s)),
                s,
            )
        )
    return out


def verify_intertwining(
    module: VermaModule, T: ChartTransition, states: Sequence[State], rng: random.Random
) -> list[Check]:
    """Psi(m_tilde(k) s) = Phi(m)_(k) Psi(s), annihilators commuted first on the left."""
    out = []
    pool = _sample_modes(module.engine)
    for idx, s in enumerate(states):
        m = rng.choice(pool)
        try:
            lhs = module.psi(T, module.apply_mode(m, s))
        except TruncationError:
            continue
        rhs = module.phi_mode(T, m, module.psi(T, s))
        out.append(
            compare(f"psi-intertwines/{T.name}/{idx:02d}/{_mode_id(m)}", "module gluing intertwines the modes", lhs, rhs)
        )
    return out


def verify_dual_path(module: VermaModule, rng: random.Random, samples: Sequence[RatFunc], cases: int = 20) -> list[Check]:
    out = []
    made = 0
    while made < cases:
        deg = rng.randint(0, max(0, module.cfg.cutoff - 1))
        s = random_module_state(module, rng, deg, samples)
        f = rng.choice(list(samples))
        n = rng.randint(-1 - (module.cfg.cutoff - deg), 1)
        out.append(
            compare(
                f"dual-path/{made:02d}/f={f}/n={n}",
                "field of a function agrees with the closed T(f,z) formula",
                module.function_act(f, n, s),
                module.function_act_dual(f, n, s),
            )
        )
        made += 1
    return out


def verify_grading(module: VermaModule, max_degree: int | None = None) -> list[Check]:
    """omega_(1) acts on y (x) t (x) f as deg(y) plus the top weight operator."""
    eng = module.engine
    omega = eng.virasoro_omega()
    top_w = module.top_weight_matrix()
    max_degree = module.cfg.cutoff if max_degree is None else max_degree
    one = eng.const(1)
    out = []
    for d in range(max_degree + 1):
        for word, t in module.basis(d):
            s = module.state({(word, t): one})
            lhs = module.vertex_act(omega, 1, s)
            terms: Terms = {}
            for t2 in range(module.space.top_dim):
                c = top_w[t2][t] + (d if t2 == t else 0)
                if c:
                    terms[(word, t2)] = one.scaled(c)
            out.append(
                compare(
                    f"grading/deg={d}/{s}",
                    "total L(0) is degree plus the top weight",
                    lhs,
                    module.state(terms),
                )
            )
    return out


def verify_generation(module: VermaModule, max_degree: int = 2) -> list[Check]:
    out = []
    one = module.engine.const(1)
    for d in range(max_degree + 1):
        for word, t in module.basis(d):
            built = module.element(word, t)
            out.append(
                compare(
                    f"generated/deg={d}/{built}",
                    "module is generated by its top",
                    built,
                    module.state({(word, t): one}),
                )
            )
    return out


def verify_character(module: VermaModule) -> list[Check]:
    formula = module_character(module)
    brute = brute_force_character(module)
    out = [compare("character/all", "PBW character of the induced module", formula, brute)]
    N, gd, td = module.engine.N, module.engine.alg.dim, module.space.top_dim
    if module.cfg.cutoff >= 1:
        out.append(
            compare(
                "character/degree1",
                "one creation mode per generator at level -1",
                brute[1],
                (2 * N + N * N + gd + 1) * td,
            )
        )
    return out
