import cmath
import math

import numpy as np
import pytest

from schottky_zhu.forms import (
    QuasiformEvaluator,
    contour_moment,
    poincare_omega,
    theta_rank,
    verify_classical,
    verify_expansions,
)
from schottky_zhu.moments import pi_kernel
from schottky_zhu.schottky import enumerate_words, sample_domain_points

from conftest import reference_params, torus_params


def _points(ev, n, seed):
    avoid = ev.basepoints(1) + (ev.basepoints(2) if ev.genus >= 2 else ())
    return sample_domain_points(ev.params, n, seed, avoid=avoid)


def test_psi_tends_to_kernel_when_handles_shrink():
    ev = QuasiformEvaluator(reference_params(1e-12), 24)
    x, y = 0.7 + 0.4j, -0.3 + 0.9j
    assert abs(ev.psi_value(1, 0, 0, x, y) - pi_kernel(ev.system(1).spec, x, y)) < 1e-9
    # at weight two the public form also cancels the basepoint poles of the kernel,
    # so the limit holds for the bare sewing value
    assert abs(ev._kernel_psi(2, 0, 0, x, y) - pi_kernel(ev.system(2).spec, x, y)) < 1e-9


def test_psi_weight_one_is_a_poincare_sum_at_genus_one(g1_ev):
    A0 = g1_ev.basepoints(1)[0]
    spec = g1_ev.system(1).spec
    x, y = 0.4 + 0.6j, -0.5 - 0.3j
    words = enumerate_words(g1_ev.params, 8)
    total = sum(pi_kernel(spec, w.map(x), y) * w.map.derivative(x) for w in words)
    assert abs(g1_ev.psi_value(1, 0, 0, x, y) - total) < 1e-9
    assert A0 not in (x, y)


def test_psi_has_residue_one_on_the_diagonal(g2_ev):
    y = 0.6 + 0.2j
    for direction in (1, 1j, -1, -1j):
        vals = [(eps * direction) * g2_ev.psi_value(1, 0, 0, y + eps * direction, y) for eps in (1e-4, 5e-5)]
        # residue plus O(eps); Richardson removes the linear term
        assert abs(2 * vals[1] - vals[0] - 1) < 1e-8


def test_theta_one_is_minus_nu(g2_ev):
    # with the sewing normalisation the weight-one cocycle forms carry alpha-period -2 pi i
    xs = np.array(_points(g2_ev, 4, 2))
    for a in (1, 2):
        assert np.max(np.abs(g2_ev.theta_value(1, a, 0, xs) + g2_ev.nu_value(a, xs))) < 1e-14


def test_theta_ranks_match_dimension_count(g2_ev):
    # d_1 = g and d_N = (g - 1)(2N - 1) for N >= 2
    assert theta_rank(g2_ev, 1) == 2
    assert theta_rank(g2_ev, 2) == 3
    assert theta_rank(g2_ev, 3) == 5


def test_theta_bounded_near_disc_boundaries(g2_ev):
    p = g2_ev.params
    ring = p.w(1) + 1.05 * p.radius(1) * np.exp(2j * np.pi * np.arange(64) / 64)
    vals = np.abs(g2_ev.theta_all(2, ring))
    assert np.all(np.isfinite(vals)) and np.max(vals) < 1e3


def test_omega_symmetric(g2_ev):
    pts = _points(g2_ev, 40, 3)
    for x, y in zip(pts[::2], pts[1::2]):
        w1, w2 = g2_ev.omega_value(x, y), g2_ev.omega_value(y, x)
        assert abs(w1 - w2) < 1e-9 * abs(w1)


def test_omega_degenerates_to_the_plane():
    ev = QuasiformEvaluator(reference_params(1e-12), 24)
    x, y = 0.3 + 0.1j, -0.8j
    assert abs(ev.omega_value(x, y) - 1 / (x - y) ** 2) < 1e-10


def test_alpha_periods(g2_ev):
    p = g2_ev.params
    y = 0.5 + 0.7j
    for a in (1, 2):
        c, r = p.w(-a), 1.3 * p.radius(a)
        assert abs(contour_moment(lambda z: g2_ev.omega_value(z, y), c, r)) < 1e-8
        for b in (1, 2):
            per = contour_moment(lambda z: g2_ev.nu_value(b, z), c, r)
            assert abs(per - (1.0 if a == b else 0.0)) < 1e-8


def test_nu_closed_form_at_genus_one(g1_ev):
    p = g1_ev.params
    g = p.gen(1)
    for x in (0.3 + 0.5j, -2 + 1j, 0.1 - 3j):
        closed = 1 / (x - g.W_minus) - 1 / (x - g.W_plus)
        assert abs(g1_ev.nu_value(1, x) - closed) < 1e-9


def test_third_kind_independent_of_the_basepoint(g2_params):
    a = QuasiformEvaluator(g2_params, 24)
    b = QuasiformEvaluator(g2_params, 24, basepoints={1: (5.5 - 4.5j,)})
    x, y1, y2 = 0.2 + 0.8j, -0.6 + 0.3j, 1.1 - 0.5j
    assert abs(a.omega_third_value(y1, y2, x) - b.omega_third_value(y1, y2, x)) < 1e-12


def test_period_matrix_genus_one(g1_ev):
    Om = g1_ev.period_matrix()[0, 0]
    assert abs(Om - cmath.log(0.01) / (2j * math.pi)) < 1e-9
    assert Om.imag == pytest.approx(0.7329355, abs=1e-7)


def test_period_matrix_symmetric_with_positive_imaginary_part(g2_ev):
    Om = g2_ev.period_matrix()
    assert np.max(np.abs(Om - Om.T)) < 1e-8
    assert np.min(np.linalg.eigvalsh(Om.imag)) > 0


def test_period_matrix_decouples_when_a_handle_shrinks():
    from schottky_zhu.schottky import SchottkyParams, generator_from_canonical
    one = QuasiformEvaluator(SchottkyParams((generator_from_canonical(2, -2, 0.02),)), 24)
    two = QuasiformEvaluator(SchottkyParams((generator_from_canonical(2, -2, 0.02),
                                             generator_from_canonical(2j, -2j, 1e-9))), 24)
    assert abs(two.period_matrix()[0, 0] - one.period_matrix()[0, 0]) < 1e-6


def test_prime_form_antisymmetric_and_normalised(g2_ev):
    x, y = 0.4 + 0.3j, -0.7 + 0.6j
    assert abs(g2_ev.prime_form_value(x, y) + g2_ev.prime_form_value(y, x)) < 1e-8
    devs = []
    for eps in (1e-2, 5e-3, 2.5e-3):
        K = g2_ev.prime_form_value(y + eps, y)
        devs.append(abs(K - eps) / eps ** 2)
    # (K - (x - y)) / (x - y)^2 tends to zero: the correction is cubic
    assert devs[2] < devs[1] < devs[0] and devs[2] < 1e-2


def test_prime_form_degenerates_to_difference():
    ev = QuasiformEvaluator(reference_params(1e-12), 24)
    x, y = 0.4 + 0.3j, -0.7 + 0.6j
    assert abs(ev.prime_form_value(x, y) - (x - y)) < 1e-10


def test_projective_connection_limit(g2_ev):
    x = 0.3 + 0.5j
    est = []
    for direction in (1, 1j, -1, -1j):
        def reg(h):
            y = x + h * direction
            return g2_ev.omega_value(x, y) - 1 / (x - y) ** 2
        est.append(6 * (2 * reg(5e-4) - reg(1e-3)))
    for e in est:
        assert abs(e - g2_ev.proj_conn_value(x)) < 1e-7


def test_projective_connection_vanishes_in_the_plane():
    ev = QuasiformEvaluator(reference_params(1e-12), 24)
    assert abs(ev.proj_conn_value(0.2 + 0.1j)) < 1e-10


def test_weight_two_bidifferential_symmetric(g2_ev):
    x, y = 0.5 - 0.2j, -0.4 + 0.8j
    w1, w2 = g2_ev.omega_weight_value(2, x, y), g2_ev.omega_weight_value(2, y, x)
    assert abs(w1 - w2) < 1e-8 * abs(w1)


def test_poincare_series_matches_sewing(g2_ev):
    x, y = 0.5 + 0.4j, -0.6 - 0.2j
    assert abs(poincare_omega(g2_ev.params, x, y, 6) - g2_ev.omega_value(x, y)) < 1e-12


def test_expansion_and_classical_suites_pass(g2_ev, g1_ev):
    for ev in (g2_ev, g1_ev):
        for rep in (verify_expansions(ev), verify_classical(ev, {"depth": 6})):
            assert rep.passed, rep.failures()
