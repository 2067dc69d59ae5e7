"""Constant-speed complex solver: d'Alembert, Duhamel, Picard windows."""

import math

import numpy as np
import pytest
from scipy.special import erf

from varwave import (AprioriViolationError, ComplexField, ConfigError,
                     Grid1D, SemilinearConfig, apriori_constants,
                     contraction_window, duhamel_apply, ensure_valid,
                     flat_point_potential, free_wave, picard_solve,
                     reference_potential, source_term, zero_potential)


# --- source_term -------------------------------------------------------------


def test_source_vanishes_at_origin_and_matches_reference_formula():
    p = reference_potential()
    assert source_term(p, np.array([0.0 + 0.0j]))[0] == 0.0
    # W0'(s) = 2 s / (1-s)^3 for the reference potential
    s = np.array([0.1, 0.3, 0.6])
    got = source_term(p, s.astype(complex)).real
    assert np.allclose(got, 2.0 * s / (1.0 - s) ** 3, rtol=1e-12)


def test_source_rotation_equivariance():
    p = reference_potential()
    z = np.array([0.3 + 0.1j, 0.05 - 0.2j, 1e-9 + 0j])
    for theta in (0.4, 1.3, -2.0):
        rot = np.exp(1j * theta)
        assert np.allclose(source_term(p, rot * z), rot * source_term(p, z),
                           rtol=1e-10, atol=1e-18)


def test_source_smooth_through_zero():
    # the small-|z| expansion must join the exact ratio without a jump
    p = reference_potential()
    s = np.array([1e-8, 0.999e-7, 1.001e-7, 1e-6])
    vals = source_term(p, s.astype(complex)).real / s
    # ratio = 2/(1-s)^3 = 2 + 6s + 12s^2 + ... near zero
    assert np.max(np.abs(vals - (2.0 + 6.0 * s))) < 2e-11
    # across the switch the increment is the genuine slope, no extra jump
    assert abs((vals[2] - vals[1]) - 6.0 * (s[2] - s[1])) < 1e-12


def test_source_escape_guard():
    from varwave import StateEscapeError
    p = reference_potential()
    with pytest.raises(StateEscapeError):
        source_term(p, np.array([0.5, 1.0 + 0j]))


# --- free_wave ---------------------------------------------------------------


def _zero_velocity_bump(g, amp=0.2, width=0.8):
    zeta = amp * np.exp(-(g.nodes / width) ** 2)
    return ComplexField(g, zeta.astype(complex), np.zeros(g.n, complex))


def test_free_wave_splits_zero_velocity_data_exactly():
    g = Grid1D(-8.0, 8.0, 513)
    f0 = _zero_velocity_bump(g)
    c, t = 2.0, 1.5  # c t / dx = 96 cells
    f1 = free_wave(f0, c, t)
    h = lambda x: 0.2 * np.exp(-(x / 0.8) ** 2)
    exact = 0.5 * (h(g.nodes - c * t) + h(g.nodes + c * t))
    assert np.max(np.abs(f1.zeta - exact)) < 1e-15
    assert f1.time == pytest.approx(1.5)


def test_free_wave_velocity_integral():
    # zeta0 = 0, zeta_t0 = e^{-x^2}: zeta(t) = (1/2c) int_{x-ct}^{x+ct} e^{-y^2}
    g = Grid1D(-8.0, 8.0, 2049)
    c, t = 1.0, 2.0
    zt0 = np.exp(-g.nodes ** 2)
    f0 = ComplexField(g, np.zeros(g.n, complex), zt0.astype(complex),
                      validate=False)
    f1 = free_wave(f0, c, t)
    exact = (math.sqrt(math.pi) / (4.0 * c)) * (
        erf(g.nodes + c * t) - erf(g.nodes - c * t))
    mask = np.abs(g.nodes) < 5.0  # stay clear of the far-field extension
    assert np.max(np.abs(f1.zeta[mask] - exact[mask])) < 5e-6


def test_free_wave_preserves_traveling_profile_second_order():
    h = lambda x: 0.2 * np.exp(-x ** 2)
    hp = lambda x: 0.2 * np.exp(-x ** 2) * (-2.0 * x)
    c, t = 1.0, 1.0
    errs = []
    for n in (257, 513):
        g = Grid1D(-8.0, 8.0, n)
        f0 = ComplexField(g, h(g.nodes).astype(complex),
                          (-c * hp(g.nodes)).astype(complex))
        f1 = free_wave(f0, c, t)
        errs.append(np.max(np.abs(f1.zeta - h(g.nodes - c * t))))
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.3)


def test_free_wave_requires_aligned_time():
    g = Grid1D(-8.0, 8.0, 257)
    f0 = _zero_velocity_bump(g)
    with pytest.raises(ConfigError, match="grid aligned"):
        free_wave(f0, 1.0, 0.7 * g.dx)
    with pytest.raises(ConfigError):
        free_wave(f0, 1.0, -g.dx)


# --- duhamel_apply -----------------------------------------------------------


def test_duhamel_zero_potential_is_inert():
    g = Grid1D(-8.0, 8.0, 257)
    p = zero_potential()
    hist = np.stack([0.3 * np.exp(-g.nodes ** 2) * (1.0 + 0.1 * l)
                     for l in range(5)]).astype(complex)
    dz, dzt = duhamel_apply(g, hist, p, 1.0, g.dx)
    assert np.max(np.abs(dz)) == 0.0
    assert np.max(np.abs(dzt)) == 0.0


def test_duhamel_constant_history_closed_form():
    # constant source q: corrections are -q t^2 / 2 and -q t, exactly
    g = Grid1D(-8.0, 8.0, 257)
    p = reference_potential()
    zstar = 0.4 + 0.0j
    m = 12
    c = 1.0
    dt = g.dx / c
    hist = np.full((m + 1, g.n), zstar, dtype=complex)
    dz, dzt = duhamel_apply(g, hist, p, c, dt, far_field=zstar)
    q = source_term(p, np.array([zstar]))[0]
    t = m * dt
    assert np.max(np.abs(dz - (-q * t * t / 2.0))) < 1e-14
    assert np.max(np.abs(dzt - (-q * t))) < 1e-14


def test_duhamel_self_convergence_second_order():
    # fixed final time, fixed smooth history function, refined grids
    c, T = 1.0, 0.5
    h = lambda x, t: 0.3 * np.exp(-x ** 2) * (1.0 + t)
    outs = []
    for n in (129, 257, 513):
        g = Grid1D(-8.0, 8.0, n)
        dt = g.dx / c
        m = int(round(T / dt))
        hist = np.stack([h(g.nodes, l * dt) for l in range(m + 1)]).astype(complex)
        dz, _ = duhamel_apply(g, hist, reference_potential(), c, dt)
        outs.append(dz)
    # compare on the shared coarse nodes, finest run as reference
    e_coarse = np.max(np.abs(outs[0] - outs[2][::4]))
    e_mid = np.max(np.abs(outs[1] - outs[2][::2]))
    assert e_coarse / e_mid == pytest.approx(4.0, rel=0.4)


def test_duhamel_rejects_misshapen_history():
    g = Grid1D(-8.0, 8.0, 257)
    with pytest.raises(ConfigError):
        duhamel_apply(g, np.zeros((3, 99), complex), reference_potential(),
                      1.0, g.dx)


# --- contraction_window ------------------------------------------------------


def test_contraction_window_positive_and_shrinks_with_energy():
    p = ensure_valid(reference_potential())
    w1 = contraction_window(p, 0.01)
    w2 = contraction_window(p, 0.1)
    assert 0.0 < w2 < w1


def test_contraction_window_requires_enlarged_budget():
    p = ensure_valid(reference_potential())
    with pytest.raises(ConfigError):
        contraction_window(p, 1.0, E_prime=0.5)


def test_contraction_window_needs_a_confining_tail():
    with pytest.raises(ConfigError):
        contraction_window(zero_potential(), 1.0)


# --- picard_solve ------------------------------------------------------------


def _solve_setup(n=257, amp=0.05, c=1.0):
    g = Grid1D(-8.0, 8.0, n)
    zeta = amp * np.exp(-g.nodes ** 2)
    f0 = ComplexField(g, zeta.astype(complex), np.zeros(g.n, complex))
    cfg = SemilinearConfig.aligned(g, c, T_window=0.25)
    return g, f0, cfg


def test_picard_zero_potential_reduces_to_free_wave():
    # one window covering the whole span: transport must be exact
    g = Grid1D(-8.0, 8.0, 257)
    zeta = 0.05 * np.exp(-g.nodes ** 2)
    f0 = ComplexField(g, zeta.astype(complex), np.zeros(g.n, complex))
    T = 0.5
    cfg = SemilinearConfig.aligned(g, 1.0, T_window=T)
    res = picard_solve(f0, zero_potential(), cfg, T)
    fw = free_wave(f0, cfg.c, T)
    assert np.max(np.abs(res.field.zeta - fw.zeta)) < 1e-14
    assert np.max(np.abs(res.field.zeta_t - fw.zeta_t)) < 1e-14
    # source-free: every window converges on its first pass
    assert res.trace.converged
    assert res.trace.iterate_count == len(res.trace.diff_norms)


def test_picard_constant_equilibrium_is_a_fixed_point():
    g = Grid1D(-8.0, 8.0, 257)
    p = flat_point_potential(0.5)
    f0 = ComplexField(g, np.full(g.n, 0.5 + 0.0j), np.zeros(g.n, complex),
                      far_field=0.5)
    cfg = SemilinearConfig.aligned(g, 1.0, T_window=0.25)
    res = picard_solve(f0, p, cfg, 0.5)
    assert np.max(np.abs(res.field.zeta - 0.5)) < 1e-14
    assert np.max(np.abs(res.field.zeta_t)) < 1e-14


def test_picard_window_seams_refine_second_order():
    # window boundaries re-derive zeta_t discretely, an O(dx^2) perturbation;
    # one-shot and split runs must agree at that order
    p = ensure_valid(reference_potential())
    seams = []
    for n in (257, 513):
        g = Grid1D(-8.0, 8.0, n)
        zeta = 0.05 * np.exp(-g.nodes ** 2)
        f0 = ComplexField(g, zeta.astype(complex), np.zeros(g.n, complex))
        one = picard_solve(f0, p, SemilinearConfig(c=1.0, dt=g.dx, T_window=0.5,
                                                   picard_tol=1e-12), 0.5)
        two = picard_solve(f0, p, SemilinearConfig(c=1.0, dt=g.dx, T_window=0.25,
                                                   picard_tol=1e-12), 0.5)
        seams.append(np.max(np.abs(one.field.zeta - two.field.zeta)))
    assert seams[0] < 1e-4
    assert seams[0] / seams[1] == pytest.approx(4.0, rel=0.4)


def test_picard_iterates_contract_geometrically():
    g, f0, cfg = _solve_setup(amp=0.1)
    p = ensure_valid(reference_potential())
    res = picard_solve(f0, p, cfg, 0.5)
    for diffs in res.trace.diff_norms:
        # after the first comparison the ratio must stay below 0.9
        for a, b in zip(diffs[1:-1], diffs[2:]):
            if a > 1e-13:
                assert b / a <= 0.9


def test_picard_small_amplitude_matches_linear_dispersion():
    # around zeta = 0 the reference potential linearizes to
    # zeta_tt - c^2 zeta_xx + 2 zeta = 0, so a Dirichlet mode sin(kx)
    # oscillates at omega^2 = c^2 k^2 + 2
    n = 513
    g = Grid1D(-8.0, 8.0, n)
    a, k, c = 1e-3, math.pi / 4.0, 1.0
    zeta = a * np.sin(k * g.nodes)
    f0 = ComplexField(g, zeta.astype(complex), np.zeros(g.n, complex))
    cfg = SemilinearConfig.aligned(g, c, T_window=0.25)
    T = 31 * g.dx / c  # near a quarter period, where sensitivity to omega peaks
    res = picard_solve(f0, reference_potential(), cfg, T)
    omega = math.sqrt(c * c * k * k + 2.0)
    exact = a * np.sin(k * g.nodes) * math.cos(omega * T)
    mask = np.abs(g.nodes) < 5.5  # away from boundary contamination
    err = np.max(np.abs(res.field.zeta[mask] - exact[mask]))
    assert err < 0.01 * a
    # the shift away from the potential-free frequency is clearly resolved
    free_exact = a * np.sin(k * g.nodes) * math.cos(c * k * T)
    assert np.max(np.abs(res.field.zeta[mask] - free_exact[mask])) > 50.0 * err


def test_picard_energy_drift_second_order():
    p = ensure_valid(reference_potential())
    drifts = []
    steps = []
    for n in (257, 513, 1025):
        g = Grid1D(-8.0, 8.0, n)
        zeta = 0.1 * np.exp(-g.nodes ** 2)
        f0 = ComplexField(g, zeta.astype(complex), np.zeros(g.n, complex))
        cfg = SemilinearConfig.aligned(g, 1.0, T_window=0.25)
        res = picard_solve(f0, p, cfg, 0.5)
        E = np.array([r.total_E for r in res.energy_reports])
        drifts.append(float(np.max(np.abs(E - E[0]))))
        steps.append(cfg.dt)
    from varwave import fit_order
    order = fit_order(list(zip(steps, drifts)))
    assert 1.7 <= order <= 2.3


def test_picard_enforces_aligned_step_and_equilibrium_far_field():
    g, f0, cfg = _solve_setup()
    p = ensure_valid(reference_potential())
    bad = SemilinearConfig(c=1.0, dt=0.9 * g.dx, T_window=0.25)
    with pytest.raises(ConfigError, match="grid-aligned"):
        picard_solve(f0, p, bad, 0.5)
    zeta = 0.3 + 0.05 * np.exp(-g.nodes ** 2)
    f_bad = ComplexField(g, zeta.astype(complex), np.zeros(g.n, complex),
                         far_field=0.3)
    with pytest.raises(ConfigError, match="far field"):
        picard_solve(f_bad, p, cfg, 0.5)


def test_picard_trips_certified_bound_when_over_energized():
    # constants certified for a tiny energy budget cannot cover 0.3-size data
    g, f0, cfg = _solve_setup(amp=0.3)
    p = ensure_valid(reference_potential())
    tiny = apriori_constants(p, 1e-6)
    assert tiny.cE < 0.3
    with pytest.raises(AprioriViolationError):
        picard_solve(f0, p, cfg, 0.5, apriori=tiny)
