"""Alternating surrogate ascent: aux tightness, block assembly, the runner.

The assembly oracles are difference probes: a block's QCQP objective and
constraint must track the full surrogate and the total power exactly as
that block's variable moves, holding everything else fixed.
"""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from conftest import crandn, random_channelset, random_design

from airsdm.ldt_cffp import (
    BudgetExhausted,
    LdtOptions,
    assemble_theta,
    assemble_vb,
    assemble_ve,
    initial_design,
    optimal_aux,
    run_ldt_cffp,
    solve_qcqp,
)
from airsdm.model import Design, NoiseProfile, ldt_objective, snr_pair, total_power, virtual_rate
from airsdm.scene import benchmark_scene, build_channels


NOISE = NoiseProfile(sigma2_irs=0.05, sigma2_b=0.07, sigma2_e=0.06)


def qcqp_objective(prob, x):
    return float(2.0 * np.vdot(prob.a, x).real - np.vdot(x, prob.A @ x).real)


def qcqp_constraint(prob, x):
    return float(np.vdot(x, prob.F @ x).real)


# -- auxiliary fixed point ----------------------------------------------------

def test_optimal_aux_lambdas_are_the_sinrs():
    rng = np.random.default_rng(0)
    for _ in range(20):
        ch = random_channelset(rng)
        d = random_design(rng, ch, NOISE, p_max=4.0)
        aux = optimal_aux(ch, d, NOISE)
        snr_b, _ = snr_pair(ch, d, NOISE)
        assert_allclose(aux.lam_b, snr_b, rtol=1e-12)
        assert aux.lam_e >= 0.0


def test_surrogate_is_tight_at_the_aux_fixed_point():
    rng = np.random.default_rng(1)
    for _ in range(100):
        ch = random_channelset(rng, m=4, n=8)
        d = random_design(rng, ch, NOISE, p_max=4.0)
        aux = optimal_aux(ch, d, NOISE)
        vr = virtual_rate(ch, d, NOISE, base=math.e)
        assert_allclose(ldt_objective(ch, d, NOISE, aux), vr, rtol=1e-10)


def test_aux_satisfies_all_stationarity_conditions():
    rng = np.random.default_rng(2)
    ch = random_channelset(rng)
    d = random_design(rng, ch, NOISE, p_max=4.0)
    aux = optimal_aux(ch, d, NOISE)
    # perturbing any auxiliary away from the fixed point can only lose
    base = ldt_objective(ch, d, NOISE, aux)
    from airsdm.model import AuxVars
    for eps in (1e-3, -1e-3):
        worse = ldt_objective(ch, d, NOISE, AuxVars(
            lam_b=max(0.0, aux.lam_b + eps), lam_e=aux.lam_e,
            mu_b=aux.mu_b, mu_e=aux.mu_e))
        assert worse <= base + 1e-12
        worse = ldt_objective(ch, d, NOISE, AuxVars(
            lam_b=aux.lam_b, lam_e=aux.lam_e,
            mu_b=aux.mu_b * (1.0 + eps), mu_e=aux.mu_e))
        assert worse <= base + 1e-12


# -- block assembly probes ------------------------------------------------------

def _random_state(rng, m=4, n=8, p_max=6.0):
    ch = random_channelset(rng, m=m, n=n)
    d = random_design(rng, ch, NOISE, p_max=p_max, fill=0.7)
    aux = optimal_aux(ch, d, NOISE)
    return ch, d, aux


def test_vb_problem_tracks_surrogate_and_power():
    rng = np.random.default_rng(3)
    for _ in range(100):
        ch, d, aux = _random_state(rng)
        prob = assemble_vb(ch, d, NOISE, aux, p_max=6.0)
        x, y = crandn(rng, 4), crandn(rng, 4)

        dx, dy = d.copy(), d.copy()
        dx.v_b, dy.v_b = x, y
        lhs = qcqp_objective(prob, x) - qcqp_objective(prob, y)
        rhs = ldt_objective(ch, dx, NOISE, aux) - ldt_objective(ch, dy, NOISE, aux)
        assert_allclose(lhs, rhs, rtol=1e-8, atol=1e-10)

        # constraint value + spent budget = total power at that beam
        spent = 6.0 - prob.p_budget
        assert_allclose(qcqp_constraint(prob, x) + spent,
                        total_power(ch, dx, NOISE), rtol=1e-10)


def test_ve_problem_tracks_surrogate_and_power():
    rng = np.random.default_rng(4)
    for _ in range(100):
        ch, d, aux = _random_state(rng)
        prob = assemble_ve(ch, d, NOISE, aux, p_max=6.0)
        x, y = crandn(rng, 4), crandn(rng, 4)

        dx, dy = d.copy(), d.copy()
        dx.v_e, dy.v_e = x, y
        lhs = qcqp_objective(prob, x) - qcqp_objective(prob, y)
        rhs = ldt_objective(ch, dx, NOISE, aux) - ldt_objective(ch, dy, NOISE, aux)
        assert_allclose(lhs, rhs, rtol=1e-8, atol=1e-10)

        spent = 6.0 - prob.p_budget
        assert_allclose(qcqp_constraint(prob, x) + spent,
                        total_power(ch, dx, NOISE), rtol=1e-10)


def test_theta_problem_tracks_surrogate_and_power():
    """The reflect QCQP's variable is the conjugate of the design vector."""
    rng = np.random.default_rng(5)
    for _ in range(100):
        ch, d, aux = _random_state(rng)
        prob = assemble_theta(ch, d, NOISE, aux, p_max=6.0)
        tx, ty = crandn(rng, 8), crandn(rng, 8)

        dx, dy = d.copy(), d.copy()
        dx.theta, dy.theta = tx, ty
        lhs = qcqp_objective(prob, tx.conj()) - qcqp_objective(prob, ty.conj())
        rhs = ldt_objective(ch, dx, NOISE, aux) - ldt_objective(ch, dy, NOISE, aux)
        assert_allclose(lhs, rhs, rtol=1e-8, atol=1e-10)

        spent = 6.0 - prob.p_budget
        assert_allclose(qcqp_constraint(prob, tx.conj()) + spent,
                        total_power(ch, dx, NOISE), rtol=1e-10)


def test_block_budgets_partition_total_power():
    rng = np.random.default_rng(6)
    ch, d, aux = _random_state(rng)
    p = 6.0
    for assemble, attr in ((assemble_vb, "v_b"), (assemble_ve, "v_e")):
        prob = assemble(ch, d, NOISE, aux, p_max=p)
        x_now = getattr(d, attr)
        assert_allclose(qcqp_constraint(prob, x_now) + (p - prob.p_budget),
                        total_power(ch, d, NOISE), rtol=1e-10)
    prob = assemble_theta(ch, d, NOISE, aux, p_max=p)
    assert_allclose(qcqp_constraint(prob, d.theta.conj()) + (p - prob.p_budget),
                    total_power(ch, d, NOISE), rtol=1e-10)


def test_assemblers_raise_on_exhausted_budget():
    rng = np.random.default_rng(7)
    ch = random_channelset(rng)
    aux = optimal_aux(ch, random_design(rng, ch, NOISE, p_max=4.0), NOISE)
    glut = Design(v_b=10.0 * crandn(rng, 4), v_e=10.0 * crandn(rng, 4),
                  theta=crandn(rng, 8))
    with pytest.raises(BudgetExhausted):
        assemble_vb(ch, glut, NOISE, aux, p_max=1.0)
    with pytest.raises(BudgetExhausted):
        assemble_ve(ch, glut, NOISE, aux, p_max=1.0)
    with pytest.raises(BudgetExhausted):
        assemble_theta(ch, glut, NOISE, aux, p_max=1.0)


def test_block_maximizer_improves_the_surrogate():
    rng = np.random.default_rng(8)
    for _ in range(10):
        ch, d, aux = _random_state(rng)
        base = ldt_objective(ch, d, NOISE, aux)
        sol = solve_qcqp(assemble_vb(ch, d, NOISE, aux, p_max=6.0))
        d2 = d.copy()
        d2.v_b = sol.x
        assert ldt_objective(ch, d2, NOISE, aux) >= base - 1e-10
        assert total_power(ch, d2, NOISE) <= 6.0 * (1.0 + 1e-8)


# -- initialization and the runner ------------------------------------------------

def test_initial_design_spends_99_percent():
    cfg = benchmark_scene(m_bs=4, n_irs=8)
    ch, _ = build_channels(cfg)
    noise = NoiseProfile()
    d = initial_design(ch, noise, p_max=1.0, seed=3)
    assert_allclose(total_power(ch, d, noise), 0.99, rtol=1e-10)
    assert_allclose(np.linalg.norm(d.v_b), 0.5, rtol=1e-12)   # sqrt(P/4)
    assert_allclose(np.linalg.norm(d.v_e), 0.5, rtol=1e-12)

    again = initial_design(ch, noise, p_max=1.0, seed=3)
    assert np.array_equal(d.theta, again.theta)
    other = initial_design(ch, noise, p_max=1.0, seed=4)
    assert not np.allclose(d.theta, other.theta)


def test_run_ldt_cffp_trace_and_convergence():
    cfg = benchmark_scene(m_bs=4, n_irs=8, pl_ref_db=-55.0)
    ch, _ = build_channels(cfg)
    noise = NoiseProfile()
    d, trace = run_ldt_cffp(ch, noise, p_max=1.0, seed=1)

    assert trace.converged
    assert trace.iterations == len(trace.rows) <= LdtOptions().max_iters
    assert trace.flags == []
    row = trace.rows[0]
    assert set(row) == {"iteration", "vr_prime", "sr_bits", "power_slack",
                        "wall_time_s"}
    assert trace.rows[-1]["iteration"] == trace.iterations

    # monotone surrogate ascent, up to per-step float slack
    vr = trace.objective_values("vr_prime")
    assert all(b >= a - 1e-6 for a, b in zip(vr, vr[1:]))
    # the final design respects the budget
    assert total_power(ch, d, noise) <= 1.0 * (1.0 + 1e-8)
    assert all(r["power_slack"] >= -1e-8 for r in trace.rows)


def test_run_ldt_cffp_is_deterministic():
    cfg = benchmark_scene(m_bs=4, n_irs=8, pl_ref_db=-60.0)
    ch, _ = build_channels(cfg)
    noise = NoiseProfile()
    d1, t1 = run_ldt_cffp(ch, noise, p_max=0.1, seed=5)
    d2, t2 = run_ldt_cffp(ch, noise, p_max=0.1, seed=5)
    assert np.array_equal(d1.v_b, d2.v_b)
    assert np.array_equal(d1.v_e, d2.v_e)
    assert np.array_equal(d1.theta, d2.theta)
    assert t1.iterations == t2.iterations
    assert t1.objective_values("vr_prime") == t2.objective_values("vr_prime")


def test_run_ldt_cffp_flags_the_iteration_cap():
    cfg = benchmark_scene(m_bs=4, n_irs=8, pl_ref_db=-55.0)
    ch, _ = build_channels(cfg)
    d, trace = run_ldt_cffp(ch, NoiseProfile(), p_max=1.0, seed=1,
                            options=LdtOptions(max_iters=3))
    assert not trace.converged
    assert trace.iterations == 3
    assert "iteration-cap" in trace.flags


def test_run_improves_on_the_initial_secrecy_rate():
    from airsdm.model import secrecy_rate
    cfg = benchmark_scene(m_bs=4, n_irs=8, pl_ref_db=-55.0)
    ch, _ = build_channels(cfg)
    noise = NoiseProfile()
    d0 = initial_design(ch, noise, p_max=1.0, seed=2)
    d, trace = run_ldt_cffp(ch, noise, p_max=1.0, seed=2)
    assert secrecy_rate(ch, d, noise) > secrecy_rate(ch, d0, noise)
