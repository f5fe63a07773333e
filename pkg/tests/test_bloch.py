import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eitsim.bloch import (
    AB,
    DensityMatrix3,
    bloch_rhs,
    bloch_rhs_array,
    integrate_bloch,
    population_ratio_check,
    reduced_resonant_rhs,
)
from eitsim.errors import IntegrationError, ParameterError
from eitsim.params import dimensionless_params
from eitsim.susceptibility import steady_two_coherence
from oracles import bloch_oracle

finite = st.floats(-1.0, 1.0)
cplx = st.builds(complex, finite, finite)


def test_decay_only_tangent():
    atom, _ = dimensionless_params()
    d = bloch_rhs(DensityMatrix3(aa=1.0), atom, 0.0, 0.0)
    assert d.aa == -atom.gamma_aa
    assert d.bb == d.cc == 0.0
    assert d.ab == d.ac == d.bc == 0.0


def test_hamiltonian_only_tangent():
    atom, _ = dimensionless_params(gamma_aa=0.0, gamma_ab=0.0, gamma_ac=0.0, gamma_bc=0.0)
    d = bloch_rhs(DensityMatrix3.dark(), atom, 0.1, 0.0)
    assert d.ab == pytest.approx(0.05j, abs=1e-16)
    assert d.bb == 0.0


def test_canonical_tangent_matches_symbolic_oracle(canon):
    atom, _ = canon
    rho = DensityMatrix3.dark()
    ours = bloch_rhs(rho, atom, 0.1, 1.0).to_vector()
    ref = np.array([complex(v) for v in bloch_oracle.rhs_vector(rho.to_vector(), atom, 0.1, 1.0)])
    np.testing.assert_allclose(ours, ref, atol=1e-15)


@settings(max_examples=150, deadline=None)
@given(
    st.floats(0, 1), st.floats(0, 1), st.floats(0, 1), cplx, cplx, cplx, cplx, cplx,
    st.floats(-2, 2), st.floats(-2, 2),
)
def test_rhs_matches_commutator_oracle(aa, bb, cc, ab, ac, bc, op, oc, d_ab, d_ac):
    atom, _ = dimensionless_params(gamma_bb=0.3, gamma_cc=0.2, gamma_ac=0.7, delta_ab=d_ab, delta_ac=d_ac)
    y = np.array([aa, bb, cc, ab, ac, bc], dtype=complex)
    ours = bloch_rhs_array(y, atom, op, oc)
    ref = np.array([complex(v) for v in bloch_oracle.rhs_vector(y, atom, op, oc)])
    np.testing.assert_allclose(ours, ref, rtol=1e-12, atol=1e-14)


def test_vectorised_rhs_matches_scalar(canon):
    atom, _ = canon
    rng = np.random.default_rng(3)
    y = rng.normal(size=(5, 6)) + 1j * rng.normal(size=(5, 6))
    y[:, :3] = y[:, :3].real
    op = rng.normal(size=5) + 1j * rng.normal(size=5)
    batch = bloch_rhs_array(y, atom, op, 1.0)
    for k in range(5):
        np.testing.assert_allclose(batch[k], bloch_rhs(DensityMatrix3.from_vector(y[k]), atom, op[k], 1.0).to_vector())


def test_density_matrix_round_trip_and_hermitian_check():
    rho = DensityMatrix3(aa=0.2, bb=0.7, cc=0.1, ab=0.1 + 0.2j, ac=-0.05j, bc=0.03)
    assert DensityMatrix3.from_matrix(rho.matrix) == rho
    m = rho.matrix.copy()
    m[1, 0] += 0.1
    with pytest.raises(ParameterError, match="Hermitian"):
        DensityMatrix3.from_matrix(m)
    with pytest.raises(ParameterError):
        DensityMatrix3(aa=1.0 + 0.5j)
    with pytest.raises(ParameterError):
        DensityMatrix3(aa=0.8, bb=0.8).validate()


def test_exponential_decay():
    atom, _ = dimensionless_params(gamma_aa=1.0)
    t = np.linspace(0, 10, 21)
    tol = 1e-8
    traj = integrate_bloch(DensityMatrix3(aa=1.0), atom, 0.0, 0.0, (0, 10), tol=tol, t_eval=t)
    np.testing.assert_allclose(traj.aa, np.exp(-t), atol=tol)


def test_decay_free_conservation():
    atom, _ = dimensionless_params(gamma_aa=0.0, gamma_ab=0.0, gamma_ac=0.0, gamma_bc=0.0)
    tol = 1e-9
    rho0 = DensityMatrix3(aa=0.1, bb=0.6, cc=0.3, ab=0.05, ac=0.02j, bc=0.1)
    traj = integrate_bloch(rho0, atom, 0.4 + 0.1j, 1.0, (0, 60), tol=tol, t_eval=np.linspace(0, 60, 121))
    assert np.max(np.abs(traj.trace - 1.0)) <= 10 * tol
    ev0 = np.linalg.eigvalsh(rho0.matrix)
    for m in traj.matrices:
        np.testing.assert_allclose(np.linalg.eigvalsh(m), ev0, atol=10 * tol)


def test_hermiticity_and_trace_monotone(canon):
    atom, _ = canon
    atom = type(atom)(**{**atom.__dict__, "gamma_bb": 0.05, "gamma_cc": 0.02, "gamma_bc": 0.05})
    tol = 1e-8
    traj = integrate_bloch(DensityMatrix3(bb=0.8, cc=0.2, bc=0.3), atom, 0.3, lambda t: 1.0 + 0.2 * np.sin(t), (0, 40), tol=tol)
    m = traj.matrices
    assert np.max(np.abs(m - np.conj(np.transpose(m, (0, 2, 1))))) <= 10 * tol
    assert np.all(np.diff(traj.trace) <= 10 * tol)
    assert np.all(np.diff(traj.times) > 0)


def test_matches_dop853_reference(canon):
    atom, _ = canon
    t = np.linspace(0, 30, 31)
    rho0 = DensityMatrix3(aa=0.1, bb=0.7, cc=0.2, ab=0.05j, bc=0.1)
    ours = integrate_bloch(rho0, atom, 0.3, 1.0, (0, 30), tol=1e-10, t_eval=t)
    _, ref = bloch_oracle.reference_trajectory(rho0.matrix, atom, 0.3, 1.0, 30.0, t)
    np.testing.assert_allclose(ours.matrices, ref, atol=1e-8)


def test_error_bounded_by_tolerance_and_decreasing_per_decade(canon):
    atom, _ = canon
    t = np.linspace(0, 50, 201)
    rho0 = DensityMatrix3(aa=0.2, bb=0.5, cc=0.3, ab=0.1, ac=0.05j, bc=0.1)
    errors = []
    for tol in (1e-4, 1e-5, 1e-6, 1e-7, 1e-8):
        ref = integrate_bloch(rho0, atom, 0.5, 1.0, (0, 50), tol=tol / 100, t_eval=t).y
        y = integrate_bloch(rho0, atom, 0.5, 1.0, (0, 50), tol=tol, t_eval=t).y
        errors.append(np.max(np.abs(y - ref)))
        assert errors[-1] <= 5 * tol
    assert all(b <= a for a, b in zip(errors, errors[1:]))


def test_rhs_matches_finite_difference_of_trajectory(canon):
    atom, _ = canon
    h = 1e-3
    t = np.array([10.0 - h, 10.0, 10.0 + h])
    traj = integrate_bloch(DensityMatrix3.dark(), atom, 0.2, 1.0, (0, 11), tol=1e-12, t_eval=t)
    fd = (traj.y[2] - traj.y[0]) / (2 * h)
    exact = bloch_rhs(traj.state(1), atom, 0.2, 1.0).to_vector()
    np.testing.assert_allclose(fd, exact, atol=1e-6)


def test_long_time_coherence_near_two_coherence_steady_state(canon):
    atom, _ = canon
    traj = integrate_bloch(DensityMatrix3.dark(), atom, 0.1, 1.0, (0, 100), tol=1e-9, t_eval=[100.0])
    steady = steady_two_coherence(atom, 0.1, 1.0).rho_ab
    assert steady == pytest.approx(1.9230769230769232e-3j, rel=1e-12)
    # the full dynamics depletes rho_bb by a few percent, which the linear steady state ignores
    assert abs(traj.ab[-1] - steady) / abs(steady) < 0.06
    assert abs(traj.ab[-1].real) < 1e-3 * abs(steady)


def test_bad_tolerance_and_span(canon):
    atom, _ = canon
    with pytest.raises(ParameterError):
        integrate_bloch(DensityMatrix3.dark(), atom, 0.1, 1.0, (0, 1), tol=1e-2)
    with pytest.raises(ParameterError):
        integrate_bloch(DensityMatrix3.dark(), atom, 0.1, 1.0, (1, 0))


def test_non_finite_drive_aborts_with_time(canon):
    atom, _ = canon
    with pytest.raises(IntegrationError) as info:
        integrate_bloch(DensityMatrix3.dark(), atom, lambda t: np.nan if t > 1 else 0.1, 1.0, (0, 5))
    assert info.value.time == pytest.approx(1.0, abs=1e-6)


# reduced resonant system


def _steady_embedding(atom, op, oc):
    s = steady_two_coherence(atom, op, oc)
    rho_bc = np.conj(s.rho_cb)
    # rho_cc chosen so the ac row balances; real at zero detuning
    rho_cc = (-op * rho_bc / oc).real
    return DensityMatrix3(aa=0.0, bb=1.0, cc=rho_cc, ab=s.rho_ab, ac=0.0, bc=rho_bc)


def test_reduced_residuals_vanish_at_steady_embedding(canon):
    atom, _ = canon
    rho = _steady_embedding(atom, 0.1, 1.0)
    res = reduced_resonant_rhs(rho, atom, 0.1, 1.0)
    assert np.all(res.relative[1:] <= 1e-9)
    assert abs(res.derivatives[1]) <= 1e-12
    # the population row keeps the second-order term Im(Op* rho_ab) that the linear theory drops
    assert res.algebraic[0] == pytest.approx((np.conj(0.1) * rho.ab).imag, rel=1e-12)


def test_reduced_residuals_zero_for_dark_state_without_probe(canon):
    atom, _ = canon
    res = reduced_resonant_rhs(DensityMatrix3.dark(), atom, 0.0, 1.0)
    assert np.all(res.algebraic == 0)
    assert np.all(res.derivatives == 0)


def test_reduced_residuals_detect_non_solution(canon):
    atom, _ = canon
    rho = DensityMatrix3(aa=0.3, bb=0.5, cc=0.2, ab=0.1 + 0.1j, ac=0.2, bc=-0.1j)
    assert np.max(reduced_resonant_rhs(rho, atom, 0.1, 1.0).relative) > 0.1


def test_reduced_requires_resonance():
    atom, _ = dimensionless_params(delta_ab=0.1)
    with pytest.raises(ParameterError, match="delta"):
        reduced_resonant_rhs(DensityMatrix3.dark(), atom, 0.1, 1.0)


def test_population_ratio_empty_levels(canon):
    atom, _ = canon
    traj = integrate_bloch(DensityMatrix3.dark(), atom, 0.0, 1.0, (0, 10), tol=1e-8)
    assert population_ratio_check(traj, atom) == 0.0


def test_population_ratio_reported_for_canonical_run(canon):
    atom, _ = canon
    atom = type(atom)(**{**atom.__dict__, "gamma_cc": 0.01})
    traj = integrate_bloch(DensityMatrix3.dark(), atom, 0.1, 1.0, (0, 100), tol=1e-8)
    value = population_ratio_check(traj, atom)
    # both terms are non-negative, so the ratio sits at 1 whenever either level is occupied
    assert 0.0 <= value <= 1.0
    assert value == pytest.approx(1.0, abs=1e-12)


def test_trajectory_accessors(canon):
    atom, _ = canon
    traj = integrate_bloch(DensityMatrix3.dark(), atom, 0.1, 1.0, (0, 2), tol=1e-8, t_eval=[0.0, 1.0, 2.0])
    assert len(traj) == 3
    np.testing.assert_array_equal(traj.ba, np.conj(traj.ab))
    assert traj.state(0) == DensityMatrix3.dark()
    assert traj.y[:, AB].shape == (3,)
    with pytest.raises(AttributeError):
        traj.nope
