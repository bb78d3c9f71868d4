import cmath

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from schottky_zhu.errors import ImageOutsideParameterSpace
from schottky_zhu.schottky import (
    INF,
    MoebiusMap,
    SchottkyParams,
    act_on_params,
    canonical_to_multiplier,
    enumerate_words,
    generator_from_canonical,
    make_generator,
    moebius_apply,
    select_basepoints,
    validate,
)

from conftest import reference_params, torus_params

finite = st.floats(-3, 3, allow_nan=False)
cplx = st.builds(complex, finite, finite)


def test_make_generator_reference_values():
    g = make_generator(1, -1, 0.01)
    assert g.w_plus == pytest.approx(-1.0202020202020203, abs=1e-12)
    assert g.w_minus == pytest.approx(1.0202020202020203, abs=1e-12)
    assert g.rho == pytest.approx(-0.040812162024283235, abs=1e-12)
    second = -0.01 * (g.w_minus - g.w_plus) ** 2 / (1.01) ** 2
    assert abs(g.rho - second) < 1e-12
    assert g.sqrt_rho ** 2 == g.rho


def test_small_multiplier_degenerates_to_fixed_points():
    g = make_generator(1, -1, 1e-12)
    assert abs(g.rho) < 1e-10
    assert abs(g.w_minus - 1) < 1e-10 and abs(g.w_plus + 1) < 1e-10


def test_canonical_to_multiplier_recovers_q():
    Wm, Wp, q = canonical_to_multiplier(1.0202020202020203, -1.0202020202020203, -0.040812162024283235)
    assert abs(q - 0.01) < 1e-12
    assert abs(Wm - 1) < 1e-10 and abs(Wp + 1) < 1e-10


@settings(max_examples=40, deadline=None)
@given(Wm=cplx, Wp=cplx, r=st.floats(0.01, 0.6), th=st.floats(0, 6.28))
def test_canonical_round_trip(Wm, Wp, r, th):
    if abs(Wm - Wp) < 0.1:
        return
    q = r * cmath.exp(1j * th)
    g = make_generator(Wm, Wp, q)
    h = generator_from_canonical(g.w_minus, g.w_plus, g.rho)
    assert abs(h.q - q) < 1e-10
    assert abs(h.W_minus - Wm) < 1e-9 and abs(h.W_plus - Wp) < 1e-9


def test_generator_fixes_its_fixed_points():
    g = make_generator(1 + 1j, -2, 0.05)
    m = g.moebius()
    assert abs(m(g.W_plus) - g.W_plus) < 1e-12
    assert abs(m(g.W_minus) - g.W_minus) < 1e-12
    # infinity goes to the centre of the partner disc
    assert abs(moebius_apply(m, INF) - g.w_minus) < 1e-12


@settings(max_examples=40, deadline=None)
@given(a=cplx, b=cplx, c=cplx, d=cplx, z=cplx)
def test_moebius_normalised_and_invertible(a, b, c, d, z):
    if abs(a * d - b * c) < 1e-2:
        return
    m = MoebiusMap(a, b, c, d)
    assert abs(m.a * m.d - m.b * m.c - 1) < 1e-12
    ident = m.inverse() @ m
    assert ident.close_to(MoebiusMap.identity(), 1e-9)
    assert moebius_apply(MoebiusMap.identity(), 3 + 4j) == 3 + 4j


def test_composition_associative():
    a, b, c = MoebiusMap(1, 2, 0.5, 3), MoebiusMap(2, 1j, 1, 1), MoebiusMap(1, -1, 1, 1)
    assert ((a @ b) @ c).close_to(a @ (b @ c), 1e-12)


@pytest.mark.parametrize("params,depth,count", [
    (torus_params(), 2, 5), (reference_params(), 1, 5), (reference_params(), 2, 17),
])
def test_word_counts(params, depth, count):
    words = enumerate_words(params, depth)
    assert len(words) == count
    for w in words:
        assert all(w.letters[i + 1] != -w.letters[i] for i in range(len(w.letters) - 1))


def test_validate_reference_passes_with_expected_margin():
    rep = validate(reference_params())
    assert rep.passed
    assert rep.min_margin == pytest.approx(2 * np.sqrt(2) - 2 * np.sqrt(0.02), abs=1e-12)


def test_validate_names_the_offending_pair():
    p = SchottkyParams((generator_from_canonical(2, -2, 0.02), generator_from_canonical(2j, -2.1, 0.02)))
    rep = validate(p)
    assert not rep.passed
    bad = {(a, b) for a, b, _, _ in rep.failures()}
    assert bad == {(1, 2)} or bad == {(2, 1)}


def test_validate_single_handle():
    assert validate(torus_params(0.05)).passed


def test_act_on_params_translation_and_multiplier():
    p = reference_params()
    shifted = act_on_params(MoebiusMap(1, 1, 0, 1), p)
    for a in p.indices():
        assert abs(shifted.w(a) - (p.w(a) + 1)) < 1e-12
    for a in (1, 2):
        assert abs(shifted.rho(a) - p.rho(a)) < 1e-12
    same = act_on_params(MoebiusMap.identity(), p)
    assert all(abs(same.w(a) - p.w(a)) < 1e-14 for a in p.indices())
    rot = act_on_params(MoebiusMap(1, 0.3, 0.05, 1.2), p)
    for a in (1, 2):
        assert abs(rot.gen(a).q - p.gen(a).q) < 1e-10


def test_act_on_params_rejects_bad_images():
    # a pole inside the fundamental domain pushes discs through infinity
    with pytest.raises(ImageOutsideParameterSpace):
        act_on_params(MoebiusMap(0, 1, 1, -2.05), reference_params())


def test_select_basepoints_deterministic_and_outside_discs():
    p = reference_params()
    for N in (1, 2):
        a, b = select_basepoints(p, N), select_basepoints(p, N)
        assert a == b and len(a) == 2 * N - 1
        assert len(set(a)) == len(a)
        assert all(p.in_domain(z) for z in a)
