import cmath
import math

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from schottky_zhu.errors import BranchPoint, ParameterSpaceError, PoleHit
from schottky_zhu.forms import QuasiformEvaluator
from schottky_zhu.genus1 import (
    EllipticParams,
    euler_partition,
    p1,
    p1_derivative,
    partition_series,
    torus_map,
    torus_map_derivative,
    verify_genus1_suite,
)
from schottky_zhu.heisenberg import partition_det
from schottky_zhu.schottky import SchottkyParams, make_generator

EP = EllipticParams(0.05 + 0.02j)
strip = st.builds(complex, st.floats(-1.2, 1.2), st.floats(-3.0, 3.0))


def test_p1_small_q_closed_form():
    ep = EllipticParams(1e-14)
    for z in (0.3 + 0.2j, -1.1 + 2j):
        e = cmath.exp(z)
        assert abs(p1(z, ep) - (1 + e) / (2 * (e - 1))) < 1e-12
    assert abs(p1(1j * math.pi, ep)) < 1e-15


@settings(max_examples=60, deadline=None)
@given(z=strip)
def test_p1_odd(z):
    assume(abs(cmath.exp(z) - 1) > 1e-3)
    assert abs(p1(-z, EP) + p1(z, EP)) < 1e-12 * max(1.0, abs(p1(z, EP)))


@settings(max_examples=60, deadline=None)
@given(z=strip)
def test_p1_periodicities(z):
    # near the pole |P1'| ~ |z|^-2 amplifies the rounding of the shifted argument
    assume(abs(cmath.exp(z) - 1) > 0.1)
    assert abs(p1(z + 2j * math.pi, EP) - p1(z, EP)) < 1e-10
    assert abs(p1(z + EP.log_q, EP) - p1(z, EP) + 1) < 1e-10


@settings(max_examples=30, deadline=None)
@given(z=strip)
def test_p1_derivative_matches_difference_quotient(z):
    assume(abs(cmath.exp(z) - 1) > 1e-2)
    h = 1e-5
    fd = (p1(z + h, EP) - p1(z - h, EP)) / (2 * h)
    assert abs(p1_derivative(z, EP) - fd) < 1e-5 * max(1.0, abs(fd))


def test_p1_poles():
    with pytest.raises(PoleHit):
        p1(0, EP)
    with pytest.raises(PoleHit):
        p1_derivative(2j * math.pi, EP)


def test_euler_product_and_partition_series_agree():
    for q in (0.01, 0.05, 0.1 + 0.05j):
        assert abs(euler_partition(q) - partition_series(q)) < 1e-12


def test_elliptic_params_validation():
    with pytest.raises(ValueError):
        EllipticParams(1.2)
    assert EllipticParams(0.01).tau == pytest.approx(cmath.log(0.01) / (2j * math.pi))


def test_torus_map():
    gen = make_generator(1, -1, 0.05)
    assert torus_map(gen, 1 + 1e-9).real < -15
    with pytest.raises(BranchPoint):
        torus_map(gen, gen.W_plus)
    ev = QuasiformEvaluator(SchottkyParams((gen,)), 24)
    for z in (0.3 + 0.4j, -2 + 0.5j, 0.2 - 2j):
        assert abs(ev.nu_value(1, z) - torus_map_derivative(gen, z)) < 1e-10


@pytest.mark.parametrize("q", [0.01, 0.05, 0.1 + 0.05j, 0.2j])
def test_suite_passes(q):
    rep = verify_genus1_suite(make_generator(1, -1, q))
    assert rep.passed, rep.failures()


def test_fixed_point_pair_does_not_matter():
    a = QuasiformEvaluator(SchottkyParams((make_generator(1, -1, 0.05),)), 24)
    b = QuasiformEvaluator(SchottkyParams((make_generator(2, -3 + 1j, 0.05),)), 24)
    assert abs(partition_det(a) - partition_det(b)) < 1e-8
    assert abs(a.period_matrix()[0, 0] - b.period_matrix()[0, 0]) < 1e-8
    assert verify_genus1_suite(make_generator(2, -3 + 1j, 0.05)).passed


def test_suite_rejects_overlapping_discs():
    with pytest.raises(ParameterSpaceError):
        verify_genus1_suite(make_generator(1, -1, -0.2))
