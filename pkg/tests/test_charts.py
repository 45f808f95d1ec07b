import random

import pytest
import sympy

from conftest import X, to_sympy
from voasheaf import charts as ch
from voasheaf.charts import ChartError, build_transition, compose, identity_chart, tilde_derivative
from voasheaf.corpus import default_samples, random_state
from voasheaf.ratfunc import RatFunc
from voasheaf.report import all_pass, failures
from voasheaf.vacore import E, U, V, Engine, e, u, v

ENG1 = Engine.create(1, "sl2", 1)
ENG2 = Engine.create(2, "sl2", 1)
INV = build_transition(["1/x1"], ["1/x1"], name="inversion")
TRI = build_transition(["x1", "x2 + x1^2"], ["x1", "x2 - x1^2"], name="triangular")
TRI2 = build_transition(["x1 + x2^2", "x2"], ["x1 - x2^2", "x2"], name="triangular2")
SWAP = build_transition(["2*x2", "3*x1"], ["x2/3", "x1/2"], name="scaleswap")


def P(text, n):
    return RatFunc.parse(text, n)


def sympy_jacobian(T):
    n = T.n
    fw = sympy.Matrix([to_sympy(f) for f in T.forward])
    return fw.jacobian(list(X[:n]))


# -- transitions ----------------------------------------------------------


@pytest.mark.parametrize("n", [1, 2, 3])
def test_identity_chart_has_identity_jacobians(n):
    T = identity_chart(n)
    for r in range(n):
        for s in range(n):
            assert T.jac.fwd[r][s] == (1 if r == s else 0)
            assert T.jac.inv[r][s] == (1 if r == s else 0)


def test_inversion_jacobians():
    assert INV.jac.fwd == ((P("-1/x1^2", 1),),)
    assert INV.jac.inv == ((P("-x1^2", 1),),)


@pytest.mark.parametrize("T", [INV, TRI, TRI2, SWAP])
def test_jacobians_against_sympy(T):
    J = sympy_jacobian(T)
    for r in range(T.n):
        for s in range(T.n):
            # fwd[r][s] = d_r of the s-th new coordinate
            assert sympy.simplify(to_sympy(T.jac.fwd[r][s]) - J[s, r]) == 0
    Jinv = J.inv()
    for a in range(T.n):
        for p in range(T.n):
            assert sympy.simplify(to_sympy(T.jac.inv[a][p]) - Jinv[p, a]) == 0


def test_triangular_chart_is_unipotent():
    assert TRI.jac.fwd == ((P("1", 2), P("2*x1", 2)), (P("0", 2), P("1", 2)))
    assert TRI.jac.inv[0][1] == P("-2*x1", 2)


def test_wrong_inverse_names_failing_entry():
    with pytest.raises(ChartError, match="entry 2"):
        build_transition(["x1", "x2 + x1^2"], ["x1", "x2 + x1^2"])


def test_singular_or_malformed_transitions():
    with pytest.raises(ChartError):
        build_transition(["x1"], ["x1", "x2"])
    with pytest.raises(ChartError):
        build_transition(["x1*x2", "x1*x2"], ["x1", "x2"])


def test_tilde_derivative_examples():
    f = P("x1^2*x2 + 1/x2", 2)
    for a in (1, 2):
        assert tilde_derivative(identity_chart(2), f, a) == f.diff(a)
    assert tilde_derivative(INV, P("x1", 1), 1) == P("-x1^2", 1)


@pytest.mark.parametrize("T", [TRI, TRI2, SWAP])
def test_derivative_commutator_identity(T):
    f = P("x1*x2", 2)
    for r in (1, 2):
        for p in (1, 2):
            lhs, rhs = ch.derivative_commutator(T, f, r, p)
            assert lhs == rhs


def test_composition_and_reversal():
    assert compose(INV, INV).forward == (P("x1", 1),)
    both = compose(TRI, TRI2)
    assert both.forward == (P("x1 + (x2 + x1^2)^2", 2), P("x2 + x1^2", 2))
    assert compose(TRI, TRI.reversed()).forward == identity_chart(2).forward


# -- gluing map -----------------------------------------------------------


def test_identity_gluing_is_identity():
    T = identity_chart(2)
    for _name, s in ch.generator_corpus(ENG2, default_samples(2)):
        assert ch.phi(ENG2, T, s) == s


def test_inversion_images_of_generators():
    G = ch.gluing(ENG1, INV)
    want_v = ENG1.monomial([v(1, -1)], "-x1^2") + ENG1.monomial([e(1, 1, -1)], "-2*x1")
    assert G.generator_image(V, 1) == want_v
    want_e = ENG1.monomial([e(1, 1, -1)]) + ENG1.monomial([u(1, -1)], "-2/x1")
    assert G.generator_image(E, 1, 1) == want_e
    assert G.generator_image(U, 1) == ENG1.monomial([u(1, -1)], "-1/x1^2")


def test_function_states_are_re_expressed():
    assert ch.phi(ENG2, TRI, ENG2.vacuum("x2")) == ENG2.vacuum("x2 + x1^2")


@pytest.mark.parametrize("T", [INV, TRI, SWAP])
def test_gluing_preserves_degree_and_translation(T):
    eng = ENG1 if T.n == 1 else ENG2
    rng = random.Random(T.name)
    samples = default_samples(T.n)
    for _ in range(15):
        s = random_state(eng, rng, rng.randint(0, 3), samples)
        img = ch.phi(eng, T, s)
        assert img.degrees() <= {s.degree()} or s.is_zero()
        assert ch.phi(eng, T, eng.translation_D(s)) == eng.translation_D(img)


@pytest.mark.parametrize("T", [TRI, SWAP])
def test_gluing_on_seeded_composites(T):
    rng = random.Random(f"composites/{T.name}")
    samples = default_samples(2)
    for _ in range(50):
        a = random_state(ENG2, rng, rng.randint(0, 2), samples)
        b = random_state(ENG2, rng, rng.randint(0, 2), samples)
        n = rng.randint(-1, 2)
        lhs = ENG2.nth_product(ch.phi(ENG2, T, a), n, ch.phi(ENG2, T, b))
        assert lhs == ch.phi(ENG2, T, ENG2.nth_product(a, n, b))


@pytest.mark.parametrize("T", [identity_chart(2), INV, TRI, SWAP])
def test_verify_gluing_passes(T):
    eng = ENG1 if T.n == 1 else ENG2
    checks = ch.verify_gluing(eng, T, default_samples(T.n))
    assert checks and all_pass(checks), failures(checks)[:2]


def test_injected_fault_is_detected(monkeypatch):
    original = ch.Gluing._generator

    def dropped_correction(self, kind, i, j):
        out = original(self, kind, i, j)
        if kind == V:
            out = {k: f for k, f in out.items() if k[0][0].kind != E}
        return out

    monkeypatch.setattr(ch.Gluing, "_generator", dropped_correction)
    T = build_transition(["x1", "x2 + x1^2"], ["x1", "x2 - x1^2"], name="fresh")
    eng = Engine.create(2, "sl2", 1)
    assert not all_pass(ch.verify_gluing(eng, T, default_samples(2)))


@pytest.mark.parametrize("first,second", [(INV, INV), (TRI, TRI2), (TRI2, SWAP), (identity_chart(2), TRI)])
def test_verify_cocycle_passes(first, second):
    eng = ENG1 if first.n == 1 else ENG2
    checks = ch.verify_cocycle(eng, second, first, default_samples(first.n))
    assert all_pass(checks)
    assert any(c.check_id.startswith("inverse/") for c in checks)


def test_cocycle_rejects_mismatched_dimensions():
    with pytest.raises(ChartError):
        ch.verify_cocycle(ENG2, INV, TRI, default_samples(2))


@pytest.mark.parametrize("T", [identity_chart(1), INV, TRI, SWAP])
def test_omega_invariance(T):
    eng = ENG1 if T.n == 1 else ENG2
    assert all_pass(ch.verify_omega_invariance(eng, T))
    c1, c2 = ch.omega_corrections(eng, T)
    curved = T in (INV, TRI)
    assert (c1 + c2).is_zero() != curved
