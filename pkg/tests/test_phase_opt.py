import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from papa.phase_opt import (
    RegressionProblem,
    SCAConfig,
    accelerated_signature,
    f1,
    lower_bound_signature,
    mu_floor,
    norm_bound,
    optimal_signature,
    phase_stage,
    sca_gradient,
    sca_phase_solve,
    wrap_angle,
)
from papa.power_filter import Stage1Config, stage1_solve
from papa.scenario import ChannelSet, Scenario, synthesize_channels
from papa.system import ModelKind, PhaseBank, SolverState, all_signatures
from conftest import crandn


def random_problem(rng, K, M=4):
    B = crandn(rng, M, K)
    return RegressionProblem.from_cascade(B, crandn(rng, M)), B


def fd_gradient(prob, phi, h=1e-6):
    g = np.empty_like(phi)
    for k in range(len(phi)):
        e = np.zeros_like(phi)
        e[k] = h
        g[k] = (f1(prob, phi + e) - f1(prob, phi - e)) / (2 * h)
    return g


# --- optimal signature --------------------------------------------------------


def test_optimal_signature_scalar_closed_form():
    c = np.array([0.6, 0.8j])
    s, mu = optimal_signature(c[:, None], 1.0, c, 0.5)
    assert mu == pytest.approx(1.0, rel=1e-7)
    np.testing.assert_allclose(s, c / 2, rtol=1e-7)


def test_optimal_signature_inactive_constraint(rng):
    C = crandn(rng, 4, 3)
    s0, mu0 = optimal_signature(C, 0.7, C[:, 0], np.inf)
    assert mu0 == pytest.approx(mu_floor(C, 0.7))
    s, mu = optimal_signature(C, 0.7, C[:, 0], np.linalg.norm(s0) * 1.5)
    assert mu == mu0
    np.testing.assert_array_equal(s, s0)


def test_signature_norm_decreasing_in_mu(rng):
    C = crandn(rng, 4, 3)
    p, c = 0.9, C[:, 1]
    norms = []
    for mu in np.logspace(-4, 3, 20):
        A = p * C @ C.conj().T + mu * np.eye(4)
        norms.append(np.linalg.norm(np.sqrt(p) * np.linalg.solve(A, c)))
    assert np.all(np.diff(norms) < 0)


@pytest.mark.parametrize("seed", range(10))
def test_bisection_hits_bound(seed):
    rng = np.random.default_rng(seed)
    C = crandn(rng, 4, 3)
    s0, _ = optimal_signature(C, 1.3, C[:, 2], np.inf)
    bound = 0.3 * np.linalg.norm(s0)
    s, mu = optimal_signature(C, 1.3, C[:, 2], bound)
    assert mu > 0
    assert abs(np.linalg.norm(s) - bound) <= 1e-8 * bound


def test_accelerated_signature_norm(rng):
    C = crandn(rng, 8, 10)
    s = accelerated_signature(C, 2.0, C[:, 0], 3.7)
    assert np.linalg.norm(s) == pytest.approx(3.7, rel=1e-10)


# --- gradient / SCA ---------------------------------------------------------------


def test_gradient_zero_for_identity_gram(rng):
    prob = RegressionProblem(np.eye(6, dtype=complex), np.zeros(6, complex), np.zeros(3, complex))
    phi = rng.uniform(-np.pi, np.pi, 6)
    np.testing.assert_allclose(sca_gradient(prob, phi), 0, atol=1e-15)
    assert f1(prob, phi) == pytest.approx(6.0)


def test_gradient_single_target_element(rng):
    K = 5
    v = np.zeros(K, complex)
    v[0] = 1.0
    prob = RegressionProblem(np.zeros((K, K), complex), v, np.zeros(1, complex))
    phi = rng.uniform(-np.pi, np.pi, K)
    g = sca_gradient(prob, phi)
    # f1 = -2 cos(phi_0) so the derivative is 2 sin(phi_0)
    assert g[0] == pytest.approx(2 * np.sin(phi[0]), rel=1e-12)
    np.testing.assert_allclose(g, fd_gradient(prob, phi), rtol=1e-6, atol=1e-9)


@pytest.mark.parametrize("seed", range(10))
def test_gradient_finite_differences(seed):
    rng = np.random.default_rng(seed)
    prob, _ = random_problem(rng, 8)
    phi = rng.uniform(-np.pi, np.pi, 8)
    g, fd = sca_gradient(prob, phi), fd_gradient(prob, phi)
    assert np.max(np.abs(g - fd)) / np.max(np.abs(fd)) < 1e-6


def test_sca_fixed_at_stationary_point(rng):
    prob = RegressionProblem(np.eye(4, dtype=complex), np.zeros(4, complex), np.zeros(2, complex))
    phi0 = wrap_angle(rng.uniform(-np.pi, np.pi, 4))
    np.testing.assert_array_equal(sca_phase_solve(prob, phi0, SCAConfig()), phi0)


def test_sca_separable_targets(rng):
    psi = rng.uniform(-np.pi, np.pi, 4)
    prob = RegressionProblem(np.zeros((4, 4), complex), np.exp(1j * psi), np.zeros(1, complex))
    phi = sca_phase_solve(prob, np.zeros(4), SCAConfig(inner_iters=5000, grad_tol=1e-12))
    np.testing.assert_allclose(np.angle(np.exp(1j * (phi - psi))), 0, atol=1e-6)


@pytest.mark.parametrize("seed", range(5))
def test_sca_descent_trace(seed):
    rng = np.random.default_rng(seed)
    prob, _ = random_problem(rng, 8)
    trace = []
    sca_phase_solve(prob, rng.uniform(-np.pi, np.pi, 8), SCAConfig(inner_iters=500), trace)
    assert len(trace) > 1
    assert np.all(np.diff(trace) <= 1e-12)


def test_sca_beats_random_phases(rng):
    prob, _ = random_problem(rng, 12)
    phi = sca_phase_solve(prob, rng.uniform(-np.pi, np.pi, 12), SCAConfig(inner_iters=3000))
    best = f1(prob, phi)
    for _ in range(100):
        assert best <= f1(prob, rng.uniform(-np.pi, np.pi, 12))


def test_sca_output_wrapped(rng):
    prob, _ = random_problem(rng, 8)
    phi = sca_phase_solve(prob, rng.uniform(-20, 20, 8), SCAConfig())
    assert np.all(phi > -np.pi) and np.all(phi <= np.pi)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-50, 50), min_size=1, max_size=10))
def test_wrap_angle_range_and_equivalence(xs):
    x = np.array(xs)
    w = wrap_angle(x)
    assert np.all(w > -np.pi) and np.all(w <= np.pi)
    np.testing.assert_allclose(np.exp(1j * w), np.exp(1j * x), atol=1e-12)


# --- lower bound ------------------------------------------------------------------------


def test_lower_bound_projection_identity(rng):
    B = crandn(rng, 4, 2)
    target = B @ crandn(rng, 2)
    prob = RegressionProblem.from_cascade(B, target)
    np.testing.assert_allclose(lower_bound_signature(prob, B), target, atol=1e-12)


def test_lower_bound_zero_cascade(rng):
    B = np.zeros((3, 5), complex)
    prob = RegressionProblem.from_cascade(B, crandn(rng, 3))
    np.testing.assert_array_equal(lower_bound_signature(prob, B), 0)


def test_lower_bound_normal_equations(rng):
    # rank-deficient cascade so the projection is non-trivial
    B = crandn(rng, 4, 2) @ crandn(rng, 2, 8)
    target = crandn(rng, 4)
    prob = RegressionProblem.from_cascade(B, target)
    resid = target - lower_bound_signature(prob, B)
    assert np.max(np.abs(B.conj().T @ resid)) < 1e-10


def test_lower_bound_dominates_sca(rng):
    B = crandn(rng, 4, 2) @ crandn(rng, 2, 8)
    prob = RegressionProblem.from_cascade(B, crandn(rng, 4))
    phi = sca_phase_solve(prob, np.zeros(8), SCAConfig(inner_iters=500))
    lb = lower_bound_signature(prob, B)
    assert np.linalg.norm(prob.target - lb) <= np.linalg.norm(prob.target - B @ np.exp(1j * phi))


# --- whole stage ------------------------------------------------------------------------


def _solved(sc, kind, rng):
    ch = synthesize_channels(sc)
    pb = PhaseBank.random(sc.n_users, sc.n_ris_elements, rng)
    st0 = SolverState.initial(all_signatures(ch, pb, kind), sc.noise_power)
    st1, _, _ = stage1_solve(st0, Stage1Config(), sc.sinr_targets, sc.noise_power)
    return ch, pb, st1


def test_single_user_rank_one_cophases(rng):
    sc = Scenario(n_users=1, n_bs_antennas=4, n_ris_elements=16, channel_kind="los")
    ch, pb, st1 = _solved(sc, ModelKind.PERSONAL, rng)
    B = ch.cascade(0, 0)
    coherent = np.sum(np.linalg.norm(B, axis=0))
    # target beyond the reachable norm, so the optimum is strictly the co-phased point
    u = st1.signatures[:, 0] / np.linalg.norm(st1.signatures[:, 0])
    prob = RegressionProblem.from_cascade(B, 2 * coherent * u)
    phi = sca_phase_solve(prob, pb.phi[0], SCAConfig(inner_iters=2000, grad_tol=1e-12))
    assert np.linalg.norm(B @ np.exp(1j * phi)) == pytest.approx(coherent, rel=1e-6)


def test_phase_stage_single_user_increases_gain(rng):
    sc = Scenario(n_users=1, n_bs_antennas=4, n_ris_elements=16, channel_kind="los")
    ch, pb, st1 = _solved(sc, ModelKind.PERSONAL, rng)
    coherent = np.sum(np.linalg.norm(ch.cascade(0, 0), axis=0))
    before = np.linalg.norm(st1.signatures[:, 0])
    pb2, st2 = phase_stage(st1, ch, pb, ModelKind.PERSONAL, SCAConfig(), accelerated=True)
    after = np.linalg.norm(st2.signatures[:, 0])
    assert before < after <= coherent * (1 + 1e-12)
    np.testing.assert_allclose(np.abs(pb2.theta), 1.0, atol=1e-15)


def test_phase_stage_parallel_without_cross_links_matches_personal(rng):
    sc = Scenario(n_users=3, n_bs_antennas=4, n_ris_elements=16, seed=4)
    ch = synthesize_channels(sc)
    h = ch.h.copy()
    mask = ~np.eye(3, dtype=bool)
    h[mask] = 0
    ch = ChannelSet(h=h, G=ch.G, h_direct=ch.h_direct)
    pb = PhaseBank.random(3, 16, rng)
    st0 = SolverState.initial(all_signatures(ch, pb, "personal"), sc.noise_power)
    st1, _, _ = stage1_solve(st0, Stage1Config(), sc.sinr_targets, sc.noise_power)
    for acc in (False, True):
        pa, sa = phase_stage(st1, ch, pb, "personal", SCAConfig(), accelerated=acc)
        pp, sp = phase_stage(st1, ch, pb, "parallel", SCAConfig(), accelerated=acc)
        np.testing.assert_allclose(pp.phi, pa.phi, atol=1e-12)
        np.testing.assert_allclose(sp.signatures, sa.signatures, rtol=1e-10)


@pytest.mark.parametrize("kind", ["personal", "parallel"])
def test_phase_stage_descent_per_user(rng, kind):
    sc = Scenario(n_users=3, n_bs_antennas=4, n_ris_elements=16, seed=2)
    ch, pb, st1 = _solved(sc, kind, rng)
    traces = []
    new_pb, new_st = phase_stage(st1, ch, pb, kind, SCAConfig(), accelerated=True, f1_traces=traces)
    assert len(traces) == 3
    for tr in traces:
        assert np.all(np.diff(tr) <= 1e-12 * max(1.0, abs(tr[0])))
    np.testing.assert_allclose(new_st.signatures, all_signatures(ch, new_pb, kind))
    assert new_pb.phi.dtype == float


def test_norm_bound_values(rng):
    sc = Scenario(n_users=2, n_bs_antennas=3, n_ris_elements=9, seed=1)
    ch = synthesize_channels(sc)
    s0 = np.linalg.svd(ch.cascade(0, 0), compute_uv=False)[0]
    s01 = np.linalg.svd(ch.cascade(0, 1), compute_uv=False)[0]
    assert norm_bound(ch, 0, "personal") == pytest.approx(3 * s0, rel=1e-8)
    assert norm_bound(ch, 0, "parallel") == pytest.approx(3 * (s0 + s01), rel=1e-8)


def test_phase_stage_rejects_direct(rng):
    sc = Scenario(n_users=2, n_bs_antennas=3, n_ris_elements=4)
    ch, pb, st1 = _solved(sc, "personal", rng)
    with pytest.raises(ValueError):
        phase_stage(st1, ch, pb, "direct", SCAConfig())
