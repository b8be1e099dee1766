import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from weakval.analytic import (
    DisturbanceChannel, WeakSetup, apply_weak_operation, conditional_expectation_s,
    joint_prob, max_admissible_lambda, outcome_prob, postselection_prob,
    quantum_disturbance_tables, quantum_disturbance_weak_value, require_admissible,
    total_expectation_identity, validate_admissible, weak_value, weak_value_via_conditioning,
)
from weakval.errors import DomainError, InadmissibleStrength, OrthogonalSelection
from weakval.qubit import (
    I, KET_MINUS, KET_PLUS, X, Y, Z, HermitianOperator, PureState, expectation,
    make_state_pair,
)

RNG = np.random.default_rng(7)


def random_state(rng):
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    return PureState.normalized(v)


def random_observable(rng):
    c = rng.normal(size=4)
    return HermitianOperator(c[0] * I.entries + c[1] * X.entries + c[2] * Y.entries + c[3] * Z.entries)


def matrix_joint(setup, psi, phi, s):
    """Direct 2x2 evaluation of <phi| E_s(|psi><psi|) |phi>."""
    rho = np.outer(psi.amplitudes, psi.amplitudes.conj())
    A = setup.A.entries
    E = 0.5 * (rho + s * setup.lam / 2 * (A @ rho + rho @ A))
    return np.vdot(phi.amplitudes, E @ phi.amplitudes).real


# -- weak_value ---------------------------------------------------------------


def test_weak_value_theta_pi_3():
    p = make_state_pair(np.pi / 3)
    assert weak_value(Z, p.psi, p.phi) == pytest.approx(2.0, abs=1e-14)


def test_weak_value_reduces_to_expectation():
    for _ in range(20):
        A, psi = random_observable(RNG), random_state(RNG)
        assert weak_value(A, psi, psi) == pytest.approx(expectation(A, psi), abs=1e-12)


def test_weak_value_100():
    p = make_state_pair(1.5608)
    assert abs(weak_value(Z, p.psi, p.phi) - 100) < 0.1


def test_weak_value_orthogonal():
    with pytest.raises(OrthogonalSelection):
        weak_value(Z, KET_PLUS, KET_MINUS)


# -- the linearized operation -----------------------------------------------------


def test_weak_operation_trivial_limit():
    rho = make_state_pair(0.7).psi.projector()
    for s in (1, -1):
        out = apply_weak_operation(WeakSetup(Z, 1e-15), rho, s)
        np.testing.assert_allclose(out.entries, rho.entries / 2, atol=1e-12)


def test_weak_operation_examples():
    out = apply_weak_operation(WeakSetup(Z, 0.1), KET_PLUS.projector(), 1)
    np.testing.assert_allclose(out.entries, np.diag([0.55, 0.0]), atol=1e-15)
    half = HermitianOperator(np.eye(2) / 2)
    out = apply_weak_operation(WeakSetup(Z, 0.1), half, 1)
    np.testing.assert_allclose(out.entries, 0.5 * (np.eye(2) / 2 + 0.05 * Z.entries), atol=1e-15)


def test_weak_operation_trace_is_outcome_prob():
    for _ in range(20):
        A, psi = random_observable(RNG), random_state(RNG)
        setup = WeakSetup(A, RNG.uniform(0.01, 0.5))
        for s in (1, -1):
            out = apply_weak_operation(setup, psi.projector(), s)
            assert out.trace() == pytest.approx(outcome_prob(setup, psi, s), abs=1e-12)


def test_weak_operation_rejects_non_unit_trace():
    with pytest.raises(DomainError):
        apply_weak_operation(WeakSetup(Z, 0.1), HermitianOperator(np.eye(2)), 1)


def test_weak_setup_domain():
    for lam in (0.0, 1.0, -0.1):
        with pytest.raises(DomainError):
            WeakSetup(Z, lam)


def test_outcome_prob_examples():
    assert outcome_prob(WeakSetup(Z, 0.1), KET_PLUS, 1) == pytest.approx(0.55, abs=1e-15)
    balanced = PureState([np.sqrt(0.5), np.sqrt(0.5)])
    for s in (1, -1):
        assert outcome_prob(WeakSetup(Z, 0.3), balanced, s) == pytest.approx(0.5, abs=1e-15)
    psi = make_state_pair(np.pi / 3).psi
    assert outcome_prob(WeakSetup(Z, 0.2), psi, -1) == pytest.approx(0.45, abs=1e-15)


# -- joint probabilities and conditioning -------------------------------------------


def test_joint_orthogonal_is_zero():
    setup = WeakSetup(Z, 0.3)
    for s in (1, -1):
        assert joint_prob(setup, KET_PLUS, KET_MINUS, s) == 0.0


def test_joint_theta_pi_3():
    p = make_state_pair(np.pi / 3)
    setup = WeakSetup(Z, 0.2)
    oracle = matrix_joint(setup, p.psi, p.phi, 1)
    # 1/2 cos^2(theta) (1 + lam/cos(theta)) = 0.175
    assert oracle == pytest.approx(0.175, abs=1e-15)
    assert joint_prob(setup, p.psi, p.phi, 1) == pytest.approx(oracle, abs=1e-15)
    total = joint_prob(setup, p.psi, p.phi, 1) + joint_prob(setup, p.psi, p.phi, -1)
    assert total == pytest.approx(np.cos(np.pi / 3) ** 2, abs=1e-15)


def test_joint_matches_matrix_oracle_random():
    for _ in range(50):
        A, psi, phi = random_observable(RNG), random_state(RNG), random_state(RNG)
        lam = min(0.99, 0.9 * max_admissible_lambda(A, psi, phi))
        setup = WeakSetup(A, lam)
        for s in (1, -1):
            assert joint_prob(setup, psi, phi, s) == pytest.approx(
                matrix_joint(setup, psi, phi, s), abs=1e-14
            )


def test_joint_inadmissible_raises():
    p = make_state_pair(1.5608)
    with pytest.raises(InadmissibleStrength) as info:
        joint_prob(WeakSetup(Z, 0.02), p.psi, p.phi, -1)
    assert info.value.max_lambda == pytest.approx(np.cos(1.5608), rel=1e-12)


def test_conditional_expectation_examples():
    assert conditional_expectation_s(WeakSetup(Z, 0.37), KET_PLUS, KET_PLUS) == pytest.approx(0.37)
    p = make_state_pair(np.pi / 3)
    setup = WeakSetup(Z, 0.2)
    explicit = sum(s * matrix_joint(setup, p.psi, p.phi, s) for s in (1, -1)) / 0.25
    assert explicit == pytest.approx(0.4, abs=1e-15)
    assert conditional_expectation_s(setup, p.psi, p.phi) == pytest.approx(0.4, abs=1e-15)
    p0 = make_state_pair(0.0)
    assert conditional_expectation_s(WeakSetup(Z, 0.3), p0.psi, p0.phi) == pytest.approx(0.3, abs=1e-15)


def test_conditioning_errors():
    with pytest.raises(OrthogonalSelection):
        conditional_expectation_s(WeakSetup(Z, 0.1), KET_PLUS, KET_MINUS)
    p = make_state_pair(1.5608)
    with pytest.raises(InadmissibleStrength):
        weak_value_via_conditioning(WeakSetup(Z, 0.02), p.psi, p.phi)


def test_weak_value_via_conditioning_examples():
    p = make_state_pair(np.pi / 3)
    assert weak_value_via_conditioning(WeakSetup(Z, 0.2), p.psi, p.phi) == pytest.approx(2.0, abs=1e-13)
    p = make_state_pair(1.5608)
    assert abs(weak_value_via_conditioning(WeakSetup(Z, 0.005), p.psi, p.phi) - 100) < 0.1
    for _ in range(10):
        A, psi = random_observable(RNG), random_state(RNG)
        lam = min(0.5, 0.9 * max_admissible_lambda(A, psi, psi))
        assert weak_value_via_conditioning(WeakSetup(A, lam), psi, psi) == pytest.approx(
            expectation(A, psi), abs=1e-12
        )


@given(st.floats(0.0, 1.55), st.floats(0.001, 0.999))
def test_conditioning_equals_real_weak_value(theta, lam):
    p = make_state_pair(theta)
    setup = WeakSetup(Z, lam)
    if not validate_admissible(setup, p.psi, p.phi):
        return
    aw = weak_value(Z, p.psi, p.phi).real
    assert abs(weak_value_via_conditioning(setup, p.psi, p.phi) - aw) <= 1e-12 * max(1.0, abs(aw))


def test_complex_weak_value_conditions_on_real_part():
    psi = PureState.normalized([1, 1j])
    phi = PureState.normalized([1, 0.3])
    aw = weak_value(Z, psi, phi)
    assert abs(aw.imag) > 0.1
    setup = WeakSetup(Z, 0.1)
    assert weak_value_via_conditioning(setup, psi, phi) == pytest.approx(aw.real, abs=1e-12)


def test_normalization():
    for _ in range(30):
        A, psi, phi = random_observable(RNG), random_state(RNG), random_state(RNG)
        lam = min(0.99, 0.9 * max_admissible_lambda(A, psi, phi))
        setup = WeakSetup(A, lam)
        assert sum(outcome_prob(setup, psi, s) for s in (1, -1)) == pytest.approx(1.0, abs=1e-12)
        total = sum(joint_prob(setup, psi, f, s) for f in (phi, phi.orthogonal()) for s in (1, -1))
        assert total == pytest.approx(1.0, abs=1e-12)


# -- total expectation ---------------------------------------------------------


def test_total_expectation_examples():
    rot = make_state_pair(np.pi / 4).psi
    lhs, rhs = total_expectation_identity(WeakSetup(Z, 0.1), KET_PLUS, [rot, rot.orthogonal()])
    assert lhs == pytest.approx(1.0, abs=1e-15) and rhs == pytest.approx(1.0, abs=1e-12)
    p = make_state_pair(np.pi / 3)
    lhs, rhs = total_expectation_identity(WeakSetup(Z, 0.1), p.psi, [p.phi, p.phi.orthogonal()])
    assert lhs == pytest.approx(0.5, abs=1e-15) and rhs == pytest.approx(0.5, abs=1e-12)
    psi = random_state(RNG)
    basis = random_state(RNG)
    lhs, rhs = total_expectation_identity(WeakSetup(I, 0.5), psi, [basis, basis.orthogonal()])
    assert lhs == pytest.approx(1.0, abs=1e-15) and rhs == pytest.approx(1.0, abs=1e-12)


def test_total_expectation_random_draws():
    for _ in range(100):
        A, psi, b = random_observable(RNG), random_state(RNG), random_state(RNG)
        basis = [b, b.orthogonal()]
        lam_max = min(max_admissible_lambda(A, psi, f) for f in basis)
        setup = WeakSetup(A, RNG.uniform(0.0, 1.0) * min(lam_max, 0.999) + 1e-9)
        lhs, rhs = total_expectation_identity(setup, psi, basis)
        assert abs(lhs - rhs) < 1e-12


def test_total_expectation_errors():
    with pytest.raises(OrthogonalSelection):
        total_expectation_identity(WeakSetup(Z, 0.1), KET_PLUS, [KET_PLUS, KET_MINUS])
    with pytest.raises(DomainError):
        total_expectation_identity(WeakSetup(Z, 0.1), KET_PLUS, [KET_PLUS, KET_PLUS])


# -- admissibility ---------------------------------------------------------------


def test_admissibility_examples():
    p = make_state_pair(1.5608)
    assert validate_admissible(WeakSetup(Z, 0.005), p.psi, p.phi)
    assert not validate_admissible(WeakSetup(Z, 0.02), p.psi, p.phi)
    for theta in (0.0, 0.5, 1.5, 1.5707):
        q = make_state_pair(theta)
        assert validate_admissible(WeakSetup(Z, 1e-6), q.psi, q.phi)


def test_require_admissible_names_max_lambda():
    p = make_state_pair(1.5608)
    with pytest.raises(InadmissibleStrength, match="largest admissible λ is 0.00999616"):
        require_admissible(WeakSetup(Z, 0.02), p.psi, p.phi)


# -- disturbance channel -------------------------------------------------------------


def test_disturbance_examples():
    assert quantum_disturbance_weak_value(DisturbanceChannel(0.99, 0.005)) == pytest.approx(100, abs=1e-9)
    explicit = sum(s / (2 * 0.1) * (1 + s * 0.1 - 0.5) / (1 - 0.5) for s in (1, -1))
    assert explicit == pytest.approx(2.0, abs=1e-14)
    assert quantum_disturbance_weak_value(DisturbanceChannel(0.5, 0.1)) == pytest.approx(2.0, abs=1e-14)
    assert quantum_disturbance_weak_value(DisturbanceChannel(1e-9, 0.1)) == pytest.approx(1.0, abs=1e-8)


def test_disturbance_tables():
    lam, d = 0.1, 0.4
    t = quantum_disturbance_tables(DisturbanceChannel(d, lam))
    for s in (1, -1):
        assert t.conditional[(1, s)] == pytest.approx(d / (1 + s * lam), abs=1e-15)
        assert t.conditional[(-1, s)] == pytest.approx((1 + s * lam - d) / (1 + s * lam), abs=1e-15)
        assert t.joint[(1, s)] == pytest.approx(d / 2, abs=1e-15)
        assert t.joint[(-1, s)] == pytest.approx(0.5 * (1 + s * lam - d), abs=1e-15)
    assert t.marginal[1] == pytest.approx(d, abs=1e-15)
    assert t.marginal[-1] == pytest.approx(1 - d, abs=1e-15)


def test_disturbance_grid():
    for d in np.linspace(0.01, 0.99, 99):
        for lam in np.linspace(0.001, 1 - d, 12, endpoint=False)[1:]:
            aw = quantum_disturbance_weak_value(DisturbanceChannel(d, lam))
            assert abs(aw - 1 / (1 - d)) <= 1e-12


def test_disturbance_change_of_variable():
    lam = 0.01
    for theta in np.linspace(0.05, 1.5, 30):
        p = make_state_pair(theta)
        quantum = weak_value(Z, p.psi, p.phi).real
        classical = quantum_disturbance_weak_value(DisturbanceChannel(1 - np.cos(theta), lam))
        assert classical == pytest.approx(quantum, rel=1e-11)


def test_disturbance_monotone():
    deltas = np.linspace(0.01, 0.98, 50)
    aw = [quantum_disturbance_weak_value(DisturbanceChannel(d, 0.01)) for d in deltas]
    assert np.all(np.diff(aw) > 0)


@pytest.mark.parametrize("d,lam", [(0.0, 0.1), (0.9, 0.1), (0.95, 0.1), (-0.1, 0.1), (0.5, 0.0)])
def test_disturbance_domain(d, lam):
    with pytest.raises(DomainError):
        DisturbanceChannel(d, lam)


def test_disturbance_rejects_other_preselection():
    with pytest.raises(DomainError):
        quantum_disturbance_weak_value(DisturbanceChannel(0.5, 0.1), psi=-1)
