import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import brentq

from orlimink.orlicz_pairs import (
    A_DECREASING,
    B_INCREASING,
    OrliczPair,
    PairError,
    RadialAdditionError,
    RadialAdditionSpec,
    addition_residual,
    load_table_pair,
    make_power_pair,
    parse_function_spec,
    parse_pair_spec,
    radial_addition,
    table_pair,
    validate_pair,
)

PROBE = np.logspace(-3, 3, 61)


def ident(t):
    return np.asarray(t, dtype=float)


def inverse(t):
    return 1.0 / np.asarray(t, dtype=float)


def square(t):
    return np.asarray(t, dtype=float) ** 2


def test_power_pair_q_minus_two():
    p = make_power_pair(-2)
    t = np.array([0.1, 1.0, 10.0])
    assert p.family == A_DECREASING
    np.testing.assert_allclose(p.phi(t), t ** -2 / 2, rtol=1e-15)
    np.testing.assert_allclose(p.varphi(t), t ** -2, rtol=1e-15)
    assert p.sign == -1


def test_power_pair_q_three_is_cone_volume_type():
    p = make_power_pair(3)
    t = np.linspace(0.1, 5, 7)
    np.testing.assert_allclose(p.varphi(t), t ** 3, rtol=1e-15)
    assert p.family == B_INCREASING and p.sign == 1


def test_power_pair_q_one_identity():
    p = make_power_pair(1)
    t = np.linspace(0.1, 5, 7)
    np.testing.assert_allclose(p.phi(t), t)
    np.testing.assert_allclose(p.phi_prime(t) * t, p.varphi(t))


def test_q_zero_rejected():
    with pytest.raises(PairError):
        make_power_pair(0)


@pytest.mark.parametrize("q", [-3, -2, -1, -0.5, 0.5, 1, 2, 3])
def test_builtin_pairs_validate(q):
    p = make_power_pair(q)
    rep = validate_pair(p, PROBE)
    assert rep.passed, rep.summary()
    assert rep.max_relation_mismatch <= 1e-10
    assert np.all(p.varphi(PROBE) > 0)


def test_validate_small_probe_examples():
    probe = [0.1, 0.5, 1, 2, 10]
    a = validate_pair(make_power_pair(-2), probe)
    assert a.passed and a.max_relation_mismatch == 0
    assert validate_pair(make_power_pair(2), probe).passed


def test_exp_pair_fails_only_the_limit_heuristic():
    p = OrliczPair(A_DECREASING, lambda t: np.exp(-np.asarray(t)),
                   lambda t: -np.exp(-np.asarray(t)),
                   lambda t: np.exp(-np.asarray(t)) * np.asarray(t), "exp")
    rep = validate_pair(p, [0.1, 0.5, 1, 2, 10])
    assert not rep.checks["limits"]
    assert rep.core_passed and rep.warnings


def test_validation_reports_nonfinite_without_raising():
    p = OrliczPair(A_DECREASING, lambda t: 1 / (np.asarray(t) - 1.0),
                   lambda t: -1 / (np.asarray(t) - 1.0) ** 2,
                   lambda t: np.asarray(t) / (np.asarray(t) - 1.0) ** 2)
    rep = validate_pair(p, [0.5, 1.0, 2.0])
    assert not rep.passed and not rep.checks["finite"]


def test_relation_mismatch_detected():
    good = make_power_pair(-1)
    bad = OrliczPair(A_DECREASING, good.phi, good.phi_prime, lambda t: 2 * good.varphi(t))
    rep = validate_pair(bad)
    assert not rep.checks["relation"]
    assert rep.max_relation_mismatch == pytest.approx(0.5)


def test_probe_must_be_sorted_positive():
    with pytest.raises(PairError):
        validate_pair(make_power_pair(-1), [1.0, 0.5])
    with pytest.raises(PairError):
        validate_pair(make_power_pair(-1), [0.0, 1.0])


def test_table_pair_reproduces_power_pair(tmp_path):
    t = np.logspace(-1, 1, 401)
    ref = make_power_pair(-1)
    path = tmp_path / "pair.csv"
    rows = ["t,phi,phi_prime"] + [f"{a:.17g},{b:.17g},{c:.17g}" for a, b, c in
                                  zip(t, ref.phi(t), ref.phi_prime(t))]
    path.write_text("\n".join(rows) + "\n")
    pair = parse_pair_spec(f"table:{path}")
    assert pair.family == A_DECREASING
    x = np.array([0.2, 1.0, 3.7])
    np.testing.assert_allclose(pair.phi(x), ref.phi(x), rtol=1e-4)
    np.testing.assert_allclose(pair.varphi(x), ref.varphi(x), rtol=1e-4)
    # power-law tails outside the table keep the family conditions
    assert validate_pair(pair).passed
    np.testing.assert_allclose(pair.phi(1e-3), ref.phi(1e-3), rtol=1e-3)


def test_table_errors(tmp_path):
    with pytest.raises(PairError):
        table_pair([1, 2, 3], [1, 2, 1], [1, 1, 1])
    with pytest.raises(PairError):
        table_pair([1, 2], [1, -1], [1, 1])
    bad = tmp_path / "bad.csv"
    bad.write_text("1,2,3\n4,x,6\n")
    with pytest.raises(PairError, match=":2:"):
        load_table_pair(bad)


def test_pair_spec_parsing():
    assert parse_pair_spec("power:-2").label == "power:-2"
    for spec in ("power:abc", "gauss:1", "table:"):
        with pytest.raises(PairError):
            parse_pair_spec(spec)
    f = parse_function_spec("power:2")
    assert f(3.0) == 9.0
    with pytest.raises(PairError):
        parse_function_spec("sin:1")


# --------------------------------------------------------------------------
# radial addition
# --------------------------------------------------------------------------

def test_addition_linear_closed_form():
    rng = np.random.default_rng(0)
    rk, rl = rng.uniform(0.2, 5, 500), rng.uniform(0.2, 5, 500)
    rho = radial_addition(rk, rl, RadialAdditionSpec(ident, ident, 0.7))
    np.testing.assert_allclose(rho, rk + 0.7 * rl, rtol=1e-12, atol=0)


def test_addition_harmonic_closed_form():
    rng = np.random.default_rng(1)
    rk, rl = rng.uniform(0.2, 5, 500), rng.uniform(0.2, 5, 500)
    rho = radial_addition(rk, rl, RadialAdditionSpec(inverse, inverse, 2.0))
    np.testing.assert_allclose(rho, 1.0 / (1.0 / rk + 2.0 / rl), rtol=1e-12, atol=0)


def test_addition_square_example_against_scalar_root():
    spec = RadialAdditionSpec(square, square, 3.0)
    rho = radial_addition(np.ones(4), np.ones(4), spec)
    oracle = brentq(lambda r: 4.0 / r ** 2 - 1.0, 0.1, 10.0, xtol=1e-15)
    assert oracle == pytest.approx(2.0, abs=1e-14)
    np.testing.assert_allclose(rho, oracle, rtol=1e-13)


def test_addition_small_epsilon_tends_to_rho_k():
    rng = np.random.default_rng(2)
    rk, rl = rng.uniform(0.5, 2, 100), rng.uniform(0.5, 2, 100)
    rho = radial_addition(rk, rl, RadialAdditionSpec(ident, square, 1e-8))
    assert np.max(np.abs(rho / rk - 1)) <= 1e-6


@settings(max_examples=40, deadline=None)
@given(
    st.lists(st.floats(1e-3, 1e3), min_size=1, max_size=20),
    st.lists(st.floats(1e-3, 1e3), min_size=1, max_size=20),
    st.floats(1e-3, 1e3),
    st.sampled_from([(ident, ident), (inverse, inverse), (square, square), (ident, square),
                     (inverse, lambda t: np.asarray(t, dtype=float) ** -3)]),
)
def test_addition_residual_property(rk, rl, eps, fs):
    m = min(len(rk), len(rl))
    rk, rl = np.array(rk[:m]), np.array(rl[:m])
    spec = RadialAdditionSpec(fs[0], fs[1], eps)
    rho = radial_addition(rk, rl, spec)
    assert np.all(rho > 0)
    assert np.max(np.abs(addition_residual(rho, rk, rl, spec))) <= 1e-10


def test_addition_bracket_failure_names_node():
    # phi1 + eps phi2 never drops below 1: no root
    spec = RadialAdditionSpec(lambda t: 2.0 + np.asarray(t, dtype=float), ident, 1.0)
    with pytest.raises(RadialAdditionError, match="node 0"):
        radial_addition(np.ones(3), np.ones(3), spec)


def test_addition_spec_validation():
    with pytest.raises(PairError):
        RadialAdditionSpec(ident, inverse, 1.0)
    with pytest.raises(PairError):
        RadialAdditionSpec(ident, ident, 0.0)
    with pytest.raises(PairError):
        radial_addition(np.ones(2), np.array([1.0, -1.0]), RadialAdditionSpec(ident, ident, 1.0))
