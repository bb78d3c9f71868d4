import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from schottky_zhu.errors import CapExceeded, ChargeNotNeutral, CoincidentPoints, UnsupportedChargeCount
from schottky_zhu.genus1 import euler_partition, partition_numbers
from schottky_zhu.heisenberg import (
    HeisenbergInsertion,
    HeisenbergState,
    LatticeSpec,
    charge_at,
    gram_dual,
    h_at,
    involution_count,
    involutions,
    lattice_partition,
    npoint,
    partition_bruteforce,
    partition_det,
    partitions,
    siegel_theta,
    twisted_factor,
    verify_zhu_genus0,
    wick_correlator,
)
from schottky_zhu.forms import QuasiformEvaluator

from conftest import reference_params, torus_params

cplx = st.builds(complex, st.floats(-2, 2), st.floats(-2, 2))


def test_grading_dimensions_are_partition_numbers():
    assert HeisenbergState().weight == 0
    assert [len(partitions(k)) for k in range(9)] == partition_numbers(8)


def test_two_point_current():
    x1, x2 = 0.3 + 0.2j, -1.1 + 0.5j
    assert wick_correlator([h_at(x1), h_at(x2)]) == pytest.approx(1 / (x1 - x2) ** 2, abs=1e-15)
    assert wick_correlator([h_at(x1), h_at(x2), h_at(0.7j)]) == 0


def test_current_against_a_charge_pair():
    x, z1, z2, g = 0.4 + 0.9j, -0.5, 0.8 - 0.3j, math.sqrt(2)
    base = wick_correlator([charge_at(g, z1), charge_at(-g, z2)])
    full = wick_correlator([h_at(x), charge_at(g, z1), charge_at(-g, z2)])
    assert full / base == pytest.approx(g * (1 / (x - z1) - 1 / (x - z2)), abs=1e-14)


@settings(max_examples=30, deadline=None)
@given(pts=st.lists(cplx, min_size=4, max_size=4, unique=True))
def test_wick_correlator_is_local(pts):
    if min(abs(a - b) for a, b in itertools.combinations(pts, 2)) < 1e-2:
        return
    ins = [HeisenbergInsertion(HeisenbergState((2,)), pts[0]), h_at(pts[1]),
           HeisenbergInsertion(HeisenbergState((1, 1)), pts[2]), h_at(pts[3])]
    ref = wick_correlator(ins)
    for perm in itertools.permutations(range(4)):
        val = wick_correlator([ins[i] for i in perm])
        assert abs(val - ref) <= 1e-10 * max(1.0, abs(ref))


def test_wick_errors():
    with pytest.raises(ChargeNotNeutral):
        wick_correlator([charge_at(1, 0.1)])
    with pytest.raises(CoincidentPoints):
        wick_correlator([h_at(0.5), h_at(0.5)])


def test_gram_matrices():
    basis, G, Ginv = gram_dual(0)
    assert G.tolist() == [[1]]
    basis, G, Ginv = gram_dual(1)
    assert G.tolist() == [[-1]]
    basis, G, Ginv = gram_dual(4)
    assert len(basis) == 5 and np.isfinite(np.linalg.cond(G))
    assert np.allclose(G @ Ginv, np.eye(5))


def test_partition_det_genus_one(g1_ev):
    Z = partition_det(g1_ev)
    assert abs(Z / euler_partition(0.01) - 1) < 1e-8
    assert Z.real == pytest.approx(1.0102030, abs=1e-7)


def test_partition_det_degenerate_and_tensor_rank(g2_ev):
    ev0 = QuasiformEvaluator(reference_params(1e-14), 24)
    assert abs(partition_det(ev0) - 1) < 1e-12
    Z = partition_det(g2_ev)
    assert abs(partition_det(g2_ev, 3) - Z ** 3) < 1e-14


def test_partition_bruteforce_small_cases(g1_params, g1_ev, g2_params, g2_ev):
    assert partition_bruteforce(g2_params, 0) == 1
    assert abs(partition_bruteforce(g1_params, 6) / partition_det(g1_ev) - 1) < 1e-8
    assert abs(partition_bruteforce(g2_params, 6) / partition_det(g2_ev) - 1) < 1e-8
    with pytest.raises(CapExceeded):
        partition_bruteforce(g2_params, 9)


def test_involution_counts():
    assert [len(involutions(n)) for n in range(1, 6)] == [1, 2, 4, 10, 26]
    assert [involution_count(n) for n in range(1, 9)] == [len(involutions(n)) for n in range(1, 9)]
    assert set(involutions(2)) == {((0, 1), ()), ((), ((0, 1),))}


def test_npoint_small_cases(g2_ev):
    x1, x2, x3 = 0.5 + 0.4j, -0.6 - 0.2j, 0.9 - 0.7j
    Z = partition_det(g2_ev)
    assert abs(npoint(g2_ev, [x1]).value) == 0
    assert abs(npoint(g2_ev, [x1, x2, x3]).value) == 0
    assert npoint(g2_ev, [x1, x2]).value == pytest.approx(g2_ev.omega_value(x1, x2) * Z, abs=1e-15)


def test_npoint_is_symmetric_in_the_currents(g2_ev):
    pts = [0.5 + 0.4j, -0.6 - 0.2j, 0.9 - 0.7j, -0.3 + 1.2j]
    charges = [(math.sqrt(2), 0.1 + 0.1j), (-math.sqrt(2), 0.45 + 0.3j)]
    loops = [0.7, -0.3]
    ref = npoint(g2_ev, pts, charges, loops).value
    for perm in itertools.permutations(range(4)):
        val = npoint(g2_ev, [pts[i] for i in perm], charges, loops).value
        assert abs(val - ref) < 1e-12 * abs(ref)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_charge_conjugation_flips_odd_correlators(g2_ev, n):
    pts = [0.5 + 0.4j, -0.6 - 0.2j, 0.9 - 0.7j, -0.3 + 1.2j][:n]
    g = math.sqrt(2)
    z1, z2 = 0.1 + 0.1j, 0.45 + 0.3j
    loops = np.array([0.7, -0.3])
    a = npoint(g2_ev, pts, [(g, z1), (-g, z2)], loops).value
    b = npoint(g2_ev, pts, [(-g, z1), (g, z2)], -loops).value
    # every current picks up a sign under h -> -h
    assert abs(b - (-1) ** n * a) < 1e-12 * abs(a)


def test_twisted_factor_rejects_unsupported_charges(g2_ev):
    with pytest.raises(UnsupportedChargeCount):
        twisted_factor(g2_ev, [(1, 0.1), (1, 0.3), (-2, 0.6)])
    with pytest.raises(ChargeNotNeutral):
        npoint(g2_ev, [0.5], [(1, 0.1), (1, 0.3)])


def test_lattice_genus_one_matches_q_series(g1_ev):
    q = 0.01
    theta = sum(q ** (n * n / 2) for n in range(-20, 21))
    euler = sum(c * q ** n for n, c in enumerate(partition_numbers(40)))
    lat = LatticeSpec(((1.0,),))
    assert siegel_theta(g1_ev.period_matrix(), lat).value == pytest.approx(1.2002000020, abs=1e-9)
    assert abs(lattice_partition(g1_ev, lat) - theta * euler) < 1e-8


def test_lattice_zero_radius_and_tail(g2_ev):
    lat = LatticeSpec(((2.0, 1.0), (1.0, 2.0)), radius=0.0)
    assert siegel_theta(g2_ev.period_matrix(), lat).value == 1
    assert abs(lattice_partition(g2_ev, lat) - partition_det(g2_ev, 2)) < 1e-15
    tail = siegel_theta(g2_ev.period_matrix(), LatticeSpec(((1.0,),), radius=6.0)).tail_estimate
    assert tail < 1e-10


def test_lattice_rejects_indefinite_gram():
    with pytest.raises(ValueError):
        LatticeSpec(((1.0, 2.0), (2.0, 1.0)))


def test_genus_zero_recursion_report():
    rep = verify_zhu_genus0()
    assert rep.passed, rep.failures()
