"""Suite configuration and the individual verification tasks.

Each suite expands into named tasks.  A task rebuilds whatever it needs from
the plain configuration document, so tasks can run in worker processes and
still produce identical entries.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Callable, Mapping

from . import charts as ch
from . import looprep as lr
from . import verma as vm
from .corpus import SAMPLE_TEXTS, random_state, random_states
from .liedata import LieDataError, builtin, from_config
from .ratfunc import ParseError, RatFunc, RatFuncError
from .report import Check, compare
from .vacore import ConfigError, Engine, EngineConfig, State, e, g

SUITES = ("axioms", "gluing", "cocycle", "omega", "relations", "equivariance", "verma")

DEFAULT_CHARTS = [
    {"name": "identity2", "n": 2, "forward": ["x1", "x2"], "inverse": ["x1", "x2"]},
    {"name": "identity1", "n": 1, "forward": ["x1"], "inverse": ["x1"]},
    {"name": "inversion", "n": 1, "forward": ["1/x1"], "inverse": ["1/x1"]},
    {"name": "triangular", "n": 2, "forward": ["x1", "x2 + x1^2"], "inverse": ["x1", "x2 - x1^2"]},
    {"name": "triangular2", "n": 2, "forward": ["x1 + x2^2", "x2"], "inverse": ["x1 - x2^2", "x2"]},
    {"name": "scaleswap", "n": 2, "forward": ["2*x2", "3*x1"], "inverse": ["x2/3", "x1/2"]},
]

DEFAULT_VERMA = {"W": {"tensor_power": 1, "det_power": 0}, "S": "sl2:dim2", "h": "1/2", "cutoff": 3}

DEFAULT_COUNTS = {
    "composites": 50,
    "borcherds": 200,
    "commutator_pairs": 100,
    "commutator_states": 5,
    "operator_states": 50,
    "exact_states": 20,
    "psi_states": 20,
    "dual_cases": 20,
    "grading_degree": 2,
}


def default_config() -> dict[str, Any]:
    return {
        "engine": {"N": 2, "algebra": "sl2", "c": "1"},
        "charts": [dict(c) for c in DEFAULT_CHARTS],
        "samples": list(SAMPLE_TEXTS),
        "seed": 42,
        "degree_bound": 4,
        "suites": list(SUITES),
        "verma": dict(DEFAULT_VERMA),
        "counts": dict(DEFAULT_COUNTS),
    }


@dataclass(frozen=True)
class SuiteConfig:
    doc: Mapping[str, Any]
    N: int
    c: Fraction
    algebra_doc: Any
    charts: tuple[ch.ChartTransition, ...]
    sample_texts: tuple[str, ...]
    seed: int
    degree_bound: int
    suites: tuple[str, ...]
    verma: Mapping[str, Any] = field(default_factory=dict)
    counts: Mapping[str, int] = field(default_factory=dict)

    def engine(self, n: int | None = None) -> Engine:
        return _engine(n or self.N, _freeze(self.algebra_doc), self.c)

    def samples(self, n: int) -> list[RatFunc]:
        """The configured coefficients that live in n variables."""
        out = []
        for s in self.sample_texts:
            try:
                out.append(RatFunc.parse(s, n))
            except ParseError:
                continue
        return out

    def chart(self, name: str) -> ch.ChartTransition:
        for T in self.charts:
            if T.name == name:
                return T
        raise KeyError(name)

    def rng(self, task: str) -> random.Random:
        return random.Random(f"{self.seed}/{task}")


def _freeze(x: Any) -> Any:
    if isinstance(x, Mapping):
        return tuple(sorted((k, _freeze(v)) for k, v in x.items()))
    if isinstance(x, list):
        return tuple(_freeze(v) for v in x)
    return x


def _thaw(x: Any) -> Any:
    if isinstance(x, tuple) and x and all(isinstance(p, tuple) and len(p) == 2 and isinstance(p[0], str) for p in x):
        return {k: _thaw(v) for k, v in x}
    if isinstance(x, tuple):
        return [_thaw(v) for v in x]
    return x


@lru_cache(maxsize=None)
def _engine(n: int, algebra: Any, c: Fraction) -> Engine:
    alg = builtin(algebra) if isinstance(algebra, str) else from_config(_thaw(algebra))
    return Engine(EngineConfig(n, alg, c))


def _field(path: str, exc: Exception) -> ConfigError:
    return ConfigError(f"config field {path!r}: {exc}")


def load_config(doc: Mapping[str, Any]) -> SuiteConfig:
    """Validate a configuration document; errors name the offending field."""
    if not isinstance(doc, Mapping):
        raise ConfigError("config must be a JSON object")
    base = default_config()
    eng = {**base["engine"], **doc.get("engine", {})}
    try:
        N = int(eng["N"])
    except (TypeError, ValueError) as exc:
        raise _field("engine.N", exc) from None
    try:
        c = Fraction(str(eng["c"]))
    except (ValueError, ZeroDivisionError) as exc:
        raise _field("engine.c", exc) from None
    algebra = eng["algebra"]
    try:
        alg = builtin(algebra) if isinstance(algebra, str) else from_config(algebra)
    except (LieDataError, KeyError, TypeError, ValueError) as exc:
        raise _field("engine.algebra", exc) from None
    try:
        EngineConfig(N, alg, c)
    except ConfigError as exc:
        path = "engine.N" if "N must" in str(exc) else "engine.c"
        raise _field(path, exc) from None
    charts = []
    for i, cdoc in enumerate(doc.get("charts", base["charts"])):
        try:
            charts.append(ch.transition_from_config(cdoc))
        except (ch.ChartError, ParseError, RatFuncError) as exc:
            raise _field(f"charts[{i}]", exc) from None
        if not charts[-1].name:
            raise _field(f"charts[{i}].name", ValueError("every chart needs a name"))
    names = [T.name for T in charts]
    if len(set(names)) != len(names):
        raise _field("charts", ValueError("chart names must be unique"))
    samples = doc.get("samples", base["samples"])
    for i, s in enumerate(samples):
        try:
            RatFunc.parse(str(s), max(N, 1))
        except (ParseError, RatFuncError) as exc:
            raise _field(f"samples[{i}]", exc) from None
    suites = doc.get("suites", base["suites"])
    for s in suites:
        if s not in SUITES:
            raise _field("suites", ValueError(f"unknown suite {s!r}; expected a subset of {', '.join(SUITES)}"))
    try:
        seed = int(doc.get("seed", base["seed"]))
        bound = int(doc.get("degree_bound", base["degree_bound"]))
    except (TypeError, ValueError) as exc:
        raise _field("seed/degree_bound", exc) from None
    counts = {**DEFAULT_COUNTS, **doc.get("counts", {})}
    for k, val in counts.items():
        if k not in DEFAULT_COUNTS or not isinstance(val, int) or val < 0:
            raise _field(f"counts.{k}", ValueError("expected a known non-negative integer count"))
    verma = {**DEFAULT_VERMA, **doc.get("verma", {})}
    if "verma" in suites:
        try:
            for n in sorted({N} | {T.n for T in charts}):
                vm.verma_from_config(verma, _engine(n, _freeze(algebra), c))
        except ConfigError as exc:
            raise _field("verma", exc) from None
    return SuiteConfig(
        doc=doc,
        N=N,
        c=c,
        algebra_doc=algebra,
        charts=tuple(charts),
        sample_texts=tuple(str(s) for s in samples),
        seed=seed,
        degree_bound=bound,
        suites=tuple(suites),
        verma=verma,
        counts=counts,
    )


# ---------------------------------------------------------------------------
# va-core tasks

REF_D = "omega_(0) is the translation operator"
REF_DEG = "omega_(1) is the grading operator"
REF_VAC = "vacuum axioms"
REF_DERIV = "translation is a derivation of all n-th products"
REF_SHIFT = "translation shifts modes: (Da)_(n) b = -n a_(n-1) b"


def _corpus(cfg: SuiteConfig, task: str) -> list[tuple[str, State]]:
    eng = cfg.engine()
    samples = cfg.samples(cfg.N)
    items = ch.generator_corpus(eng, samples)
    rng = cfg.rng(task)
    for i in range(cfg.counts["composites"]):
        items.append((f"composite{i:02d}", random_state(eng, rng, rng.randint(0, cfg.degree_bound), samples)))
    return items


def task_voa_axioms(cfg: SuiteConfig) -> list[Check]:
    eng = cfg.engine()
    omega = eng.virasoro_omega()
    vac = eng.vacuum()
    items = _corpus(cfg, "composites")
    out = []
    for name, a in items:
        out.append(compare(f"axioms/D/{name}", REF_D, eng.nth_product(omega, 0, a), eng.translation_D(a)))
        out.append(compare(f"axioms/deg/{name}", REF_DEG, eng.nth_product(omega, 1, a), a.scale(a.degree())))
        out.append(compare(f"axioms/vac-right/{name}", REF_VAC, eng.nth_product(a, -1, vac), a))
        for n in range(0, 3):
            out.append(compare(f"axioms/vac-kill/{name}/n={n}", REF_VAC, eng.nth_product(a, n, vac), eng.state()))
        for n in (-2, -1, 0, 1):
            want = a if n == -1 else eng.state()
            out.append(compare(f"axioms/vac-left/{name}/n={n}", REF_VAC, eng.nth_product(vac, n, a), want))
    gens = items[: len(items) - cfg.counts["composites"]]
    pairs = [(na, a, nb, b) for na, a in gens for nb, b in gens]
    rng = cfg.rng("axiom-pairs")
    comps = items[len(gens):]
    for i in range(len(comps)):
        (na, a), (nb, b) = comps[i], comps[rng.randrange(len(comps))]
        pairs.append((na, a, nb, b))
    for na, a, nb, b in pairs:
        top = a.degree() + b.degree() - 1
        for n in range(-2, max(top, 0) + 1):
            ab = eng.nth_product(a, n, b)
            Da, Db = eng.translation_D(a), eng.translation_D(b)
            out.append(
                compare(
                    f"axioms/derivation/{na},{nb}/n={n}",
                    REF_DERIV,
                    eng.translation_D(ab),
                    eng.nth_product(Da, n, b) + eng.nth_product(a, n, Db),
                )
            )
            out.append(
                compare(
                    f"axioms/shift/{na},{nb}/n={n}",
                    REF_SHIFT,
                    eng.nth_product(Da, n, b),
                    eng.nth_product(a, n - 1, b).scale(-n),
                )
            )
    return out


def task_omega_products(cfg: SuiteConfig) -> list[Check]:
    eng = cfg.engine()
    w = eng.virasoro_omega()
    want = {0: eng.translation_D(w), 1: w.scale(2)}
    out = []
    for n in range(0, 6):
        out.append(
            compare(
                f"omega-products/n={n}",
                "total Virasoro element has central charge zero",
                eng.nth_product(w, n, w),
                want.get(n, eng.state()),
            )
        )
    return out


def task_affine(cfg: SuiteConfig) -> list[Check]:
    out = []
    for N in sorted({1, 2, 3, cfg.N}):
        if N > 3 and N != cfg.N:
            continue
        eng = cfg.engine(N)
        rng_ = range(1, N + 1)
        for a in rng_:
            for b in rng_:
                A = eng.monomial([e(a, b, -1)])
                for c_ in rng_:
                    for d in rng_:
                        B = eng.monomial([e(c_, d, -1)])
                        zero = eng.monomial([e(a, d, -1)]).scale(int(b == c_)) - eng.monomial(
                            [e(c_, b, -1)]
                        ).scale(int(a == d))
                        want = {0: zero, 1: eng.vacuum().scale(int(a == d and b == c_))}
                        for n in range(4):
                            out.append(
                                compare(
                                    f"affine-gl/N={N}/E{a}{b}_({n})E{c_}{d}",
                                    "affine gl_N n-th products at level one",
                                    eng.nth_product(A, n, B),
                                    want.get(n, eng.state()),
                                )
                            )
        alg = eng.alg
        for i in range(alg.dim):
            for j in range(alg.dim):
                A, B = eng.monomial([g(i, -1)]), eng.monomial([g(j, -1)])
                br = eng.state()
                for k, val in alg.bracket(i, j).items():
                    br = br + eng.monomial([g(k, -1)]).scale(val)
                want = {0: br, 1: eng.vacuum().scale(eng.cfg.c * alg.pairing(i, j))}
                for n in range(4):
                    out.append(
                        compare(
                            f"affine-g/N={N}/{alg.labels[i]}_({n}){alg.labels[j]}",
                            "affine g n-th products at level c",
                            eng.nth_product(A, n, B),
                            want.get(n, eng.state()),
                        )
                    )
    return out


def task_borcherds(cfg: SuiteConfig) -> list[Check]:
    eng = cfg.engine()
    rng = cfg.rng("borcherds")
    samples = cfg.samples(cfg.N)
    out = []
    for i in range(cfg.counts["borcherds"]):
        a, b, c = (random_state(eng, rng, rng.randint(0, cfg.degree_bound), samples) for _ in range(3))
        k, n = rng.randint(-3, 3), rng.randint(-3, 3)
        lhs, rhs = eng.borcherds_sides(a, b, c, k, n)
        out.append(compare(f"borcherds/{i:03d}/k={k},n={n}", "Borcherds identity", lhs, rhs))
    return out


def task_commutator(cfg: SuiteConfig) -> list[Check]:
    eng = cfg.engine()
    rng = cfg.rng("commutator")
    samples = cfg.samples(cfg.N)
    gens = [s for _n, s in ch.generator_corpus(eng, samples)]
    out = []
    for i in range(cfg.counts["commutator_pairs"]):
        a = eng.nth_product(rng.choice(gens), -1, rng.choice(gens)) if rng.random() < 0.5 else rng.choice(gens)
        b = rng.choice(gens)
        m, k = rng.randint(-2, 2), rng.randint(-2, 2)
        for j in range(cfg.counts["commutator_states"]):
            c = random_state(eng, rng, rng.randint(0, 2), samples)
            lhs, rhs = eng.commutator_sides(a, b, m, k, c)
            out.append(
                compare(f"commutator/{i:03d}/m={m},k={k}/state={j}", "commutator formula for modes", lhs, rhs)
            )
    return out


# ---------------------------------------------------------------------------
# chart tasks


def task_gluing(cfg: SuiteConfig, chart: str) -> list[Check]:
    T = cfg.chart(chart)
    return ch.verify_gluing(cfg.engine(T.n), T, cfg.samples(T.n))


def chart_pairs(cfg: SuiteConfig) -> list[tuple[str, str]]:
    return [(a.name, b.name) for a in cfg.charts for b in cfg.charts if a.n == b.n]


def task_cocycle(cfg: SuiteConfig, first: str, second: str) -> list[Check]:
    T_ij, T_jk = cfg.chart(first), cfg.chart(second)
    return ch.verify_cocycle(cfg.engine(T_ij.n), T_jk, T_ij, cfg.samples(T_ij.n))


def task_omega(cfg: SuiteConfig, chart: str) -> list[Check]:
    T = cfg.chart(chart)
    eng = cfg.engine(T.n)
    out = ch.verify_omega_invariance(eng, T)
    G_ = ch.gluing(eng, T)
    out.append(
        compare(
            f"omega/{T.name}/corrections-cancel",
            "jacobian corrections of the Heisenberg and gl_N parts cancel",
            G_.phi(eng.omega_hei()) + G_.phi(eng.omega_gl()),
            eng.omega_hei() + eng.omega_gl(),
        )
    )
    c1, c2 = ch.omega_corrections(eng, T)
    curved = any(not f.is_constant() for row in T.jac.fwd for f in row)
    out.append(
        compare(
            f"omega/{T.name}/corrections-present",
            "corrections vanish exactly for charts with constant jacobian",
            "nonzero" if not (c1 + c2).is_zero() else "zero",
            "nonzero" if curved else "zero",
        )
    )
    return out


def task_equivariance(cfg: SuiteConfig, chart: str) -> list[Check]:
    T = cfg.chart(chart)
    return lr.verify_equivariance(cfg.engine(T.n), T, cfg.samples(T.n))


# ---------------------------------------------------------------------------
# loop-rep tasks


def task_relation_family(cfg: SuiteConfig, family: str) -> list[Check]:
    return lr.verify_relation_suite(cfg.engine(), family, cfg.samples(cfg.N))


def task_operator_spot(cfg: SuiteConfig) -> list[Check]:
    eng = cfg.engine()
    samples = cfg.samples(cfg.N)
    rng = cfg.rng("operators")
    states = random_states(eng, rng, cfg.counts["operator_states"], 3, samples)
    return lr.spot_check_operators(eng, samples, states, rng)


def task_exact_forms(cfg: SuiteConfig) -> list[Check]:
    eng = cfg.engine()
    samples = cfg.samples(cfg.N)
    rng = cfg.rng("exact-forms")
    states = random_states(eng, rng, cfg.counts["exact_states"], 3, samples)
    return lr.verify_exact_forms(eng, samples, states)


# ---------------------------------------------------------------------------
# verma tasks


def module_for(cfg: SuiteConfig, n: int) -> vm.VermaModule:
    return vm.verma_from_config(cfg.verma, cfg.engine(n))


def task_verma_chart(cfg: SuiteConfig, chart: str) -> list[Check]:
    T = cfg.chart(chart)
    M = module_for(cfg, T.n)
    samples = cfg.samples(T.n)
    rng = cfg.rng(f"verma/{chart}")
    deg = min(2, M.cfg.cutoff)
    states = [vm.random_module_state(M, rng, rng.randint(0, deg), samples) for _ in range(cfg.counts["psi_states"])]
    out = vm.verify_top_equivariance(M, T, samples)
    out += vm.verify_round_trip(M, T, states)
    out += vm.verify_intertwining(M, T, states, rng)
    return out


def task_verma_module(cfg: SuiteConfig) -> list[Check]:
    M = module_for(cfg, cfg.N)
    samples = cfg.samples(cfg.N)
    rng = cfg.rng("verma/module")
    out = vm.verify_dual_path(M, rng, samples, cfg.counts["dual_cases"])
    out += vm.verify_grading(M, min(cfg.counts["grading_degree"], M.cfg.cutoff))
    out += vm.verify_generation(M, min(2, M.cfg.cutoff))
    out += vm.verify_character(M)
    return out


# ---------------------------------------------------------------------------

TASKS: dict[str, Callable[..., list[Check]]] = {
    "voa-axioms": task_voa_axioms,
    "omega-products": task_omega_products,
    "affine": task_affine,
    "borcherds": task_borcherds,
    "commutator": task_commutator,
    "gluing": task_gluing,
    "cocycle": task_cocycle,
    "omega": task_omega,
    "equivariance": task_equivariance,
    "relation-family": task_relation_family,
    "operator-spot": task_operator_spot,
    "exact-forms": task_exact_forms,
    "verma-chart": task_verma_chart,
    "verma-module": task_verma_module,
}


def plan(cfg: SuiteConfig, suites: tuple[str, ...] | None = None) -> list[tuple[str, str, tuple[str, ...]]]:
    """(suite, task, args) triples for the selected suites, in a fixed order."""
    out: list[tuple[str, str, tuple[str, ...]]] = []
    for s in suites or cfg.suites:
        if s == "axioms":
            out += [(s, t, ()) for t in ("voa-axioms", "omega-products", "affine", "borcherds", "commutator")]
        elif s in ("gluing", "omega", "equivariance"):
            out += [(s, s, (T.name,)) for T in cfg.charts]
        elif s == "cocycle":
            out += [(s, "cocycle", p) for p in chart_pairs(cfg)]
        elif s == "relations":
            out += [(s, "relation-family", (f,)) for f in lr.FAMILIES]
            out += [(s, "operator-spot", ()), (s, "exact-forms", ())]
        elif s == "verma":
            out += [(s, "verma-chart", (T.name,)) for T in cfg.charts]
            out.append((s, "verma-module", ()))
    return out


def run_task(doc: Mapping[str, Any], suite: str, task: str, args: tuple[str, ...]) -> list[dict[str, Any]]:
    cfg = load_config(doc)
    return [c.as_json(suite) for c in TASKS[task](cfg, *args)]
