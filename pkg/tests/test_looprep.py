import random

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from conftest import X, to_sympy
from voasheaf import looprep as lr
from voasheaf.charts import build_transition, identity_chart
from voasheaf.corpus import default_samples, random_state, random_states
from voasheaf.looprep import CURRENT, FORM_DT, FORM_DX, VECT_DT, VECT_DX, LoopElement, loop_bracket, parse_element
from voasheaf.ratfunc import ParseError
from voasheaf.report import all_pass, failures
from voasheaf.vacore import Engine, lmode, v

ENG = Engine.create(2, "sl2", 1)
ENG1 = Engine.create(1, "sl2", 1)
SAMPLES = default_samples(2)
LAB = ENG.alg.labels
T = sympy.Symbol("t")
INV = build_transition(["1/x1"], ["1/x1"], name="inversion")
TRI = build_transition(["x1", "x2 + x1^2"], ["x1", "x2 - x1^2"], name="triangular")


def el(text, eng=ENG):
    return parse_element(text, eng)


# -- grammar ------------------------------------------------------------------


@pytest.mark.parametrize(
    "text,kind,power,index",
    [
        ("t^3 * (x1/x2) * d/dx1", VECT_DX, 3, 1),
        ("t^-1 * x2 * dt", FORM_DT, -1, 0),
        ("t^0 * 1 * [e]", CURRENT, 0, 0),
        ("t * x1 * dx2", FORM_DX, 1, 2),
        ("d/dt", VECT_DT, 0, 0),
    ],
)
def test_parse_element(text, kind, power, index):
    x = el(text)
    assert (x.kind, x.power, x.index) == (kind, power, index)
    assert el(x.format(LAB)) == x


@pytest.mark.parametrize("text", ["t^2 * x1 * d/dx3", "t^1 * [q]", "t^1 * x1 *", "x1 * dy"])
def test_parse_element_errors(text):
    with pytest.raises(ParseError):
        el(text)


# -- the representation -------------------------------------------------------


def test_series_states():
    assert lr.series_state(ENG, VECT_DX, 1, ENG.const(1)) == ENG.monomial([v(1, -1)])
    assert lr.series_state(ENG, FORM_DT, 0, ENG.const(1)) == ENG.vacuum().scale(ENG.cfg.c)
    assert lr.rho(ENG, el("t^2 * d/dt")).state == -ENG.virasoro_omega()


def test_constant_dt_form_acts_by_the_level_at_minus_one_only():
    s = random_state(ENG, random.Random(3), 2, SAMPLES)
    for j in range(-3, 3):
        got = lr.rho_apply(ENG, [LoopElement(FORM_DT, j, ENG.const(1))], s)
        assert got == (s.scale(ENG.cfg.c) if j == -1 else ENG.state())


def test_time_translation_acts_as_minus_total_virasoro():
    s = random_state(ENG, random.Random(4), 3, SAMPLES)
    for j in range(-1, 3):
        got = lr.rho_apply(ENG, [LoopElement(VECT_DT, j, ENG.const(1))], s)
        assert got == -ENG.nth_product(ENG.virasoro_omega(), j, s)


# -- independent bracket oracle ------------------------------------------------
# vector fields are derivations of C[t, 1/t](x); they act on currents by
# differentiating the coefficient and on 1-forms by the Lie derivative.
# The g-valued bracket carries the cocycle (g1|g2) h d f.


def sym_coeff(x):
    return T**x.power * to_sympy(x.coeff)


def coords(n):
    return [T] + list(X[:n])


def sym_component(x):
    """(slot, expression): slot is 'g:<i>', 'form:<i>' or 'vec:<i>' with i=0 for t."""
    c = sym_coeff(x)
    if x.kind == CURRENT:
        return f"g:{x.index}", c
    if x.kind == FORM_DT:
        return "form:0", c
    if x.kind == FORM_DX:
        return f"form:{x.index}", c
    if x.kind == VECT_DT:
        return "vec:0", c
    return f"vec:{x.index}", c


def apply_vec(vec, f, n):
    return sum(vec.get(i, 0) * sympy.diff(f, y) for i, y in enumerate(coords(n)))


def d_of(f, n):
    return {i: sympy.diff(f, y) for i, y in enumerate(coords(n))}


def oracle_bracket(eng, x, y):
    n = eng.N
    sx, cx = sym_component(x)
    sy, cy = sym_component(y)
    out = {}

    def add(slot, expr):
        out[slot] = out.get(slot, 0) + expr

    kx, ky = sx.split(":")[0], sy.split(":")[0]
    if kx == "form" and ky == "vec":
        return {k: -val for k, val in oracle_bracket(eng, y, x).items()}
    if kx == "g" and ky == "vec":
        return {k: -val for k, val in oracle_bracket(eng, y, x).items()}
    if kx == "vec":
        vx = {int(sx[4:]): cx}
        if ky == "vec":
            vy = {int(sy[4:]): cy}
            for i in range(n + 1):
                add(f"vec:{i}", apply_vec(vx, vy.get(i, 0), n) - apply_vec(vy, vx.get(i, 0), n))
        elif ky == "g":
            add(sy, apply_vec(vx, cy, n))
        else:
            i = int(sy[5:])
            add(sy, apply_vec(vx, cy, n))
            for j, dj in d_of(vx.get(i, 0), n).items():
                add(f"form:{j}", cy * dj)
    elif kx == "g" and ky == "g":
        for k, c in eng.alg.bracket(x.index, y.index).items():
            add(f"g:{k}", c * cx * cy)
        kappa = eng.alg.pairing(x.index, y.index)
        for j, dj in d_of(cx, n).items():
            add(f"form:{j}", kappa * cy * dj)
    return out


def engine_as_sym(elements):
    out = {}
    for z in elements:
        slot, c = sym_component(z)
        out[slot] = out.get(slot, 0) + c
    return out


def is_exact(form, n):
    """True only if form = dF for a function F in the coefficient ring."""
    ys = coords(n)
    rem = [sympy.together(form.get(i, 0)) for i in range(n + 1)]
    for i, y in enumerate(ys):
        if rem[i] == 0:
            continue
        F = sympy.integrate(rem[i], y)
        if F.has(sympy.log, sympy.atan, sympy.Integral):
            return False
        rem = [sympy.simplify(r - sympy.diff(F, ys[j])) for j, r in enumerate(rem)]
    return all(r == 0 for r in rem)


def same(a, b, n=2):
    """Equal, with the 1-form parts compared modulo exact forms."""
    keys = set(a) | set(b)
    diff = {k: sympy.simplify(a.get(k, 0) - b.get(k, 0)) for k in keys}
    if any(v != 0 for k, v in diff.items() if not k.startswith("form:")):
        return False
    return is_exact({int(k[5:]): v for k, v in diff.items() if k.startswith("form:")}, n)


def test_exactness_oracle():
    t, x1 = T, X[0]
    assert is_exact({0: 2 * t * x1, 1: t**2}, 1)
    assert not is_exact({0: 1 / t}, 1)
    assert not is_exact({1: 1 / x1}, 1)
    assert not is_exact({0: x1}, 1)


def test_bracket_examples():
    got = loop_bracket(ENG, el("t^1 * x1 * d/dx1"), el("t^2 * x1*x2 * d/dx2"))
    assert got == [el("t^3 * (x1*x2) * d/dx2")]
    assert loop_bracket(ENG, el("t^1 * x1 * dx1"), el("t^-1 * x2 * dx2")) == []
    got = loop_bracket(ENG, el("t^1 * x1 * [e]"), el("t^-1 * x2 * [f]"))
    assert engine_as_sym(got) == engine_as_sym(
        [el("t^0 * (x1*x2) * [h]"), el("t^-1 * (x1*x2) * dt"), el("t^0 * x2 * dx1")]
    )


@pytest.mark.parametrize("seed", range(8))
def test_bracket_against_oracle(seed):
    rng = random.Random(seed)
    for _ in range(12):
        x = lr.random_element(ENG, rng, SAMPLES)
        y = lr.random_element(ENG, rng, SAMPLES)
        assert same(engine_as_sym(loop_bracket(ENG, x, y)), oracle_bracket(ENG, x, y)), (x, y)


@given(st.integers(0, 10**6))
def test_antisymmetry_modulo_exact_forms(seed):
    rng = random.Random(seed)
    x, y = lr.random_element(ENG, rng, SAMPLES), lr.random_element(ENG, rng, SAMPLES)
    total = lr.collect(loop_bracket(ENG, x, y) + loop_bracket(ENG, y, x))
    assert all(z.kind in (FORM_DT, FORM_DX) for z in total)
    assert same(engine_as_sym(total), {})


def _bracket_sum(xs, ys):
    out = []
    for x in xs:
        for y in ys:
            out += loop_bracket(ENG, x, y)
    return lr.collect(out)


@given(st.integers(0, 10**6))
def test_jacobi_identity(seed):
    rng = random.Random(seed)
    a, b, c = (lr.random_element(ENG, rng, SAMPLES, powers=(-1, 1)) for _ in range(3))
    total = lr.collect(
        _bracket_sum([a], _bracket_sum([b], [c]))
        + _bracket_sum([b], _bracket_sum([c], [a]))
        + _bracket_sum([c], _bracket_sum([a], [b]))
    )
    assert same(engine_as_sym(total), {})


# -- relation families ----------------------------------------------------------


@pytest.mark.parametrize("family", lr.FAMILIES)
def test_relation_family(family):
    checks = lr.verify_relation_suite(ENG, family, SAMPLES)
    assert checks and all_pass(checks), failures(checks)[:1]


def test_central_current_family_at_level_one():
    f, h = ENG.fn("x1"), ENG.fn("x2")
    for i in range(3):
        for j in range(3):
            for n in range(3):
                lhs, rhs = lr.product_identity(ENG, (CURRENT, i, f), (CURRENT, j, h), n)
                assert lhs == rhs


def test_time_translation_family_with_derivative_term():
    f, h = ENG.fn("x1"), ENG.fn("x1*x2")
    for b in range(1, 3):
        for n in range(4):
            lhs, rhs = lr.product_identity(ENG, (VECT_DT, 0, f), (VECT_DX, b, h), n)
            assert lhs == rhs
    lhs, rhs = lr.product_identity(ENG, (VECT_DT, 0, f), (VECT_DT, 0, h), 0)
    assert lhs == rhs and not lhs.is_zero()


def test_unknown_family():
    with pytest.raises(ValueError):
        lr.family_pairs(ENG, "x-y")


def test_operator_spot_checks():
    rng = random.Random(42)
    states = random_states(ENG, rng, 20, 3, SAMPLES)
    checks = lr.spot_check_operators(ENG, SAMPLES, states, rng)
    assert len(checks) == 20 and all_pass(checks)


# -- coordinate changes ---------------------------------------------------------


def test_theta_on_the_inversion_chart():
    for j in (-2, 0, 3):
        vec = lr.theta(INV, LoopElement(VECT_DX, j, ENG1.const(1), 1))
        assert vec == [LoopElement(VECT_DX, j, ENG1.fn("-x1^2"), 1)]
        form = lr.theta(INV, LoopElement(FORM_DX, j, ENG1.const(1), 1))
        assert form == [LoopElement(FORM_DX, j, ENG1.fn("-1/x1^2"), 1)]


def test_theta_identity_chart():
    T = identity_chart(2)
    rng = random.Random(0)
    for _ in range(20):
        x = lr.random_element(ENG, rng, SAMPLES)
        assert lr.theta(T, x) == [x]


@pytest.mark.parametrize("chart,eng", [(identity_chart(2), ENG), (INV, ENG1), (TRI, ENG)])
def test_equivariance(chart, eng):
    checks = lr.verify_equivariance(eng, chart, default_samples(chart.n))
    assert all_pass(checks), failures(checks)[:1]
    assert any(c.check_id.startswith("vector-field-law/") for c in checks)
    assert any(c.check_id.startswith("virasoro-field-law/") for c in checks)


# -- exact forms ----------------------------------------------------------------


def test_exact_form_shape():
    form = lr.exact_form(ENG, 2, ENG.fn("x1*x2"))
    assert form == lr.collect([
        LoopElement(FORM_DT, 1, ENG.fn("2*x1*x2")),
        LoopElement(FORM_DX, 2, ENG.fn("x2"), 1),
        LoopElement(FORM_DX, 2, ENG.fn("x1"), 2),
    ])


def test_exact_forms_act_trivially():
    rng = random.Random(7)
    states = random_states(ENG, rng, 6, 3, SAMPLES)
    assert all_pass(lr.verify_exact_forms(ENG, SAMPLES, states))


def test_non_exact_form_acts_nontrivially():
    s = ENG.monomial([lmode(-2)])
    assert not lr.rho_apply(ENG, [LoopElement(FORM_DX, 1, ENG.const(1), 1)], ENG.monomial([v(1, -1)])).is_zero()
    assert not lr.rho_apply(ENG, [LoopElement(FORM_DT, -1, ENG.const(1))], s).is_zero()
