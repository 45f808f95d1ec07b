import random
from fractions import Fraction

import pytest
import sympy

from voasheaf import verma as vm
from voasheaf.charts import build_transition, identity_chart
from voasheaf.corpus import default_samples
from voasheaf.liedata import sl_matrices
from voasheaf.report import all_pass, failures
from voasheaf.vacore import ConfigError, Engine, e, g, lmode, u, v

ENG1 = Engine.create(1, "sl2", 1)
ENG2 = Engine.create(2, "sl2", 1)
INV = build_transition(["1/x1"], ["1/x1"], name="inversion")
TRI = build_transition(["x1", "x2 + x1^2"], ["x1", "x2 - x1^2"], name="triangular")
SWAP = build_transition(["2*x2", "3*x1"], ["x2/3", "x1/2"], name="scaleswap")


@pytest.fixture(scope="module")
def M():
    """The reference module: W natural, S two-dimensional, h = 1/2."""
    return vm.VermaModule.create(ENG2, 1, 0, "sl2:dim2", "1/2", 3)


@pytest.fixture(scope="module")
def M1():
    return vm.VermaModule.create(ENG1, 1, 0, "sl2:dim2", "1/2", 3)


def test_top_names(M):
    assert M.names == ["w1.s1", "w1.s2", "w2.s1", "w2.s2"]


def test_l0_scales_the_top_by_h(M):
    for t in range(4):
        assert M.apply_mode(lmode(0), M.top(t, "x1*x2")) == M.top(t, "x1*x2").scale(Fraction(1, 2))


def test_v0_differentiates_the_coefficient(M):
    assert M.apply_mode(v(1, 0), M.top(0, "x1")) == M.top(0, 1)
    assert M.apply_mode(v(2, 0), M.top(3, "x1")).is_zero()
    assert M.apply_mode(u(1, 0), M.top(1, "x1")).is_zero()


def test_e12_moves_w2_to_w1(M):
    # top index = w * dim S + s
    assert M.apply_mode(e(1, 2, 0), M.top(2)) == M.top(0)
    assert M.apply_mode(e(1, 2, 0), M.top(0)).is_zero()
    assert M.apply_mode(e(1, 1, 0), M.top(1)) == M.top(1)


def test_g0_acts_on_s(M):
    # h acts on the highest weight line by 1
    h = ENG2.alg.index("h")
    assert M.apply_mode(g(h, 0), M.top(0)) == M.top(0)
    assert M.apply_mode(g(h, 0), M.top(1)) == M.top(1).scale(-1)


def test_positive_modes_kill_the_top(M):
    for m in (u(1, 1), v(2, 1), e(1, 2, 1), g(0, 2), lmode(1)):
        assert M.apply_mode(m, M.top(0, "x1")).is_zero()


def test_function_minus_one_is_multiplication(M):
    assert M.function_act("x1", -1, M.top(2, "x2")) == M.top(2, "x1*x2")


def test_top_weight(M):
    # Casimir of the natural sl2 module for the trace form
    _labels, mats = sl_matrices(2)
    B = [sympy.Matrix(m) for m in mats]
    gram = sympy.Matrix(3, 3, lambda i, j: (B[i] * B[j]).trace())
    dual = gram.inv()
    cas = sum((dual[i, j] * B[i] * B[j] for i in range(3) for j in range(3)), sympy.zeros(2))
    assert cas == sympy.Rational(3, 2) * sympy.eye(2)
    # the gl_2 part vanishes on the natural module, leaving (3/2)/(2*3) + h
    omega = ENG2.virasoro_omega()
    for t in range(4):
        assert M.vertex_act(omega, 1, M.top(t)) == M.top(t).scale(Fraction(3, 4))
    assert M.top_weight_matrix() == [[Fraction(3, 4) if i == j else 0 for j in range(4)] for i in range(4)]


def test_truncation_is_loud():
    small = vm.VermaModule.create(ENG2, 1, 0, "trivial", 0, 1)
    s = small.apply_mode(u(1, -1), small.top(0))
    with pytest.raises(vm.TruncationError):
        small.apply_mode(v(1, -1), s)


# -- gluing -----------------------------------------------------------------------


def test_identity_psi(M):
    rng = random.Random(1)
    T = identity_chart(2)
    for _ in range(5):
        s = vm.random_module_state(M, rng, rng.randint(0, 2), default_samples(2))
        assert M.psi(T, s) == s


def test_psi_on_the_inversion_chart(M1):
    for t in range(M1.space.top_dim):
        assert M1.psi(INV, M1.top(t)) == M1.top(t, "-1/x1^2")


def test_other_jacobian_convention_breaks_v0(M1, monkeypatch):
    # twisting the top by the inverse jacobian instead fails on the inversion chart
    assert all_pass(vm.verify_top_equivariance(M1, INV, default_samples(1)))
    monkeypatch.setattr(
        vm.VermaModule, "top_transform", lambda self, T: self.cfg.W.group_action([list(r) for r in T.jac.inv])
    )
    checks = vm.verify_top_equivariance(M1, INV, default_samples(1))
    assert any(not c.passed and "/v1(0)/" in c.check_id for c in checks)


@pytest.mark.parametrize("T", [identity_chart(2), TRI, SWAP])
def test_top_equivariance(M, T):
    checks = vm.verify_top_equivariance(M, T, default_samples(2))
    assert all_pass(checks), failures(checks)[:1]


@pytest.mark.parametrize("T", [TRI, SWAP])
def test_round_trip_and_intertwining(M, T):
    rng = random.Random(T.name)
    states = [vm.random_module_state(M, rng, rng.randint(0, 2), default_samples(2)) for _ in range(20)]
    assert all_pass(vm.verify_round_trip(M, T, states))
    checks = vm.verify_intertwining(M, T, states, rng)
    assert checks and all_pass(checks)


def test_round_trip_on_the_inversion_chart(M1):
    rng = random.Random(5)
    states = [vm.random_module_state(M1, rng, rng.randint(0, 2), default_samples(1)) for _ in range(20)]
    assert all_pass(vm.verify_round_trip(M1, INV, states))


def test_dual_path(M):
    checks = vm.verify_dual_path(M, random.Random(42), default_samples(2), 20)
    assert len(checks) == 20 and all_pass(checks)


def test_grading_and_generation(M):
    assert all_pass(vm.verify_grading(M, 2))
    assert all_pass(vm.verify_generation(M, 2))


# -- characters ----------------------------------------------------------------


def test_degree_zero_is_the_top():
    for k, S in ((1, "trivial"), (2, "sl2:dim2"), (0, "sl2:dim3")):
        mod = vm.VermaModule.create(ENG2, k, 0, S, 0, 2)
        assert vm.module_character(mod)[0] == mod.cfg.W.dim * mod.cfg.S.dim


def test_small_character_by_hand():
    # N = 1: seven creation modes per level (u, v, E11, e, h, f and L);
    # degree 2 is a pair from level -1 or a single level -2 mode
    mod = vm.VermaModule.create(ENG1, 1, 0, "trivial", 0, 2)
    assert vm.brute_force_character(mod) == [1, 7, 7 * 8 // 2 + 7]
    assert vm.module_character(mod) == [1, 7, 35]


def test_character_matches_enumeration(M):
    assert vm.module_character(M) == vm.brute_force_character(M) == [4, 48, 360, 2080]
    assert all_pass(vm.verify_character(M))


def test_config_errors():
    with pytest.raises(ConfigError):
        vm.verma_from_config({"W": {"tensor_power": "x"}})
    with pytest.raises(ConfigError):
        vm.verma_from_config({"S": "su7"})
    with pytest.raises(ConfigError):
        vm.verma_from_config({"cutoff": -1})
