"""Derivatives in the Schottky parameters and the variational identities they satisfy."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import GenusTooSmall, PerturbationLeavesParameterSpace
from .forms import FormValue, QuasiformEvaluator, sample_domain_points
from .heisenberg import partition_det
from .report import Report
from .schottky import SchottkyParams, validate

DEFAULT_STEP = 1e-5


@dataclass(frozen=True)
class ParamFunction:
    """A quantity depending smoothly on (w_a, w_-a, rho_a); evaluated through an evaluator.

    The callback receives a QuasiformEvaluator for the (perturbed) parameters and may
    return a scalar or an array.  Perturbed evaluators keep the reference basepoints.
    """

    func: Callable

    def __call__(self, ev: QuasiformEvaluator):
        return np.asarray(self.func(ev), dtype=complex)


def _as_param_function(F) -> ParamFunction:
    return F if isinstance(F, ParamFunction) else ParamFunction(F)


def evaluator_like(ev: QuasiformEvaluator, params: SchottkyParams) -> QuasiformEvaluator:
    bps = {N: ev.basepoints(N) for N in (1, 2) if N == 1 or ev.genus >= 2}
    return QuasiformEvaluator(params, ev.cutoff, basepoints=bps, genus1_extension=ev.genus1_extension)


def _shift(params: SchottkyParams, coord: str, a: int, delta: complex) -> SchottkyParams:
    """Move one canonical coordinate: ('w', a) is w_a for signed a, ('rho', a) is rho_|a|."""
    h = abs(a)
    if coord == "rho":
        new = params.with_canonical(h, rho=params.rho(h) + delta)
    elif a > 0:
        new = params.with_canonical(h, w_plus=params.w(a) + delta)
    else:
        new = params.with_canonical(h, w_minus=params.w(a) + delta)
    if not validate(new).passed:
        raise PerturbationLeavesParameterSpace(f"step {delta} on {coord}_{a} leaves the parameter space")
    return new


def _coordinate(a: int, ell: int):
    """(coordinate, signed index, rho weight) for the operator d_a^ell."""
    if ell == 0:
        return "w", a, False
    if ell == 1:
        return "rho", a, True
    if ell == 2:
        return "w", -a, True
    raise ValueError("ell must be 0, 1 or 2")


def _central(F: ParamFunction, ev, coord, a, h, direction=1.0):
    plus = F(evaluator_like(ev, _shift(ev.params, coord, a, h * direction)))
    minus = F(evaluator_like(ev, _shift(ev.params, coord, a, -h * direction)))
    return (plus - minus) / (2 * h * direction)


def _step_size(params: SchottkyParams, coord: str, a: int, step: float) -> float:
    scale = abs(params.rho(a)) if coord == "rho" else max(abs(params.w(a)), params.radius(a))
    return step * max(scale, 1e-300)


def partial_deriv(F, ev: QuasiformEvaluator, a: int, ell: int, step: float = DEFAULT_STEP,
                  richardson: bool = True, direction: complex = 1.0):
    """d_a^ell F: d/dw_a, rho_a d/drho_a or rho_a d/dw_-a (signed a), by central differences."""
    F = _as_param_function(F)
    coord, idx, weighted = _coordinate(a, ell)
    h = _step_size(ev.params, coord, idx, step)
    d = _central(F, ev, coord, idx, h, direction)
    if richardson:
        d = (4 * _central(F, ev, coord, idx, h / 2, direction) - d) / 3
    return ev.params.rho(a) * d if weighted else d


def moduli_gradient(F, ev: QuasiformEvaluator, step: float = DEFAULT_STEP, richardson: bool = True):
    """Stack of d_a^ell F for a = 1..g, ell = 0, 1, 2 (first axis in that order)."""
    F = _as_param_function(F)
    return np.stack([partial_deriv(F, ev, a, ell, step, richardson)
                     for a in range(1, ev.genus + 1) for ell in range(3)])


def _require_genus(ev: QuasiformEvaluator):
    if ev.genus < 2:
        raise GenusTooSmall("nabla needs genus >= 2; use q d/dq at genus one")


def nabla_value(ev: QuasiformEvaluator, x, gradient) -> np.ndarray:
    """sum_{a, l} Theta_{2,a}^l(x) d_a^l F from a precomputed gradient."""
    _require_genus(ev)
    th = np.atleast_1d(ev.theta_all(2, np.asarray(x, dtype=complex)))
    grad = np.asarray(gradient)
    return np.tensordot(th, grad, axes=([-1], [0]))


def nabla(F, ev: QuasiformEvaluator, x, step: float = DEFAULT_STEP) -> FormValue:
    """Holomorphic quadratic differential nabla(x) F."""
    _require_genus(ev)
    grad = moduli_gradient(F, ev, step)
    return FormValue(complex(np.squeeze(nabla_value(ev, x, grad))), (("x", 2),))


def point_derivatives(H: Callable, ev: QuasiformEvaluator, points, step: float = 1e-5):
    """d/dy_k of H(ev, points) for every k, Richardson-extrapolated central differences."""
    pts = list(points)
    out = []
    for k in range(len(pts)):
        def at(h):
            up, dn = list(pts), list(pts)
            up[k] += h
            dn[k] -= h
            return (np.asarray(H(ev, up)) - np.asarray(H(ev, dn))) / (2 * h)
        h = step * max(1.0, abs(pts[k]))
        out.append((4 * at(h / 2) - at(h)) / 3)
    return out


def nabla_weighted_value(H: Callable, weights, points, x, ev: QuasiformEvaluator,
                         step: float = DEFAULT_STEP, gradient=None, point_grads=None):
    """nabla_y^(m)(x) H = nabla(x) H + sum_k (Psi_2(x, y_k) d_k H + m_k d_k Psi_2(x, y_k) H)."""
    _require_genus(ev)
    pts = list(points)
    for y in pts:
        if np.any(np.asarray(x) == y):
            from .errors import CoincidentPoints
            raise CoincidentPoints("x coincides with an inserted point")
    if gradient is None:
        gradient = moduli_gradient(ParamFunction(lambda e: H(e, pts)), ev, step)
    if point_grads is None:
        point_grads = point_derivatives(H, ev, pts)
    base = np.asarray(H(ev, pts))
    val = nabla_value(ev, x, gradient)
    for k, (m, y) in enumerate(zip(weights, pts)):
        psi = ev.psi_value(2, 0, 0, x, y)
        dpsi = ev.psi_value(2, 0, 1, x, y)
        val = val + np.multiply.outer(psi, point_grads[k]) + m * np.multiply.outer(dpsi, base)
    return val


def nabla_weighted(H: Callable, weights, points, x, ev: QuasiformEvaluator,
                   step: float = DEFAULT_STEP) -> FormValue:
    val = nabla_weighted_value(H, weights, points, x, ev, step)
    w = (("x", 2),) + tuple((f"y{k}", m) for k, m in enumerate(weights))
    return FormValue(complex(np.squeeze(val)), w)


def _poly(p):
    c = list(p) + [0] * (3 - len(p))
    if len(c) > 3:
        raise ValueError("Moebius generators need degree <= 2")
    return (lambda z: c[0] + c[1] * z + c[2] * z * z,
            lambda z: c[1] + 2 * c[2] * z,
            lambda z: c[2])  # normalised second derivative p''/2


def mobius_generator(F, ev: QuasiformEvaluator, p, points=(), weights=(),
                     step: float = DEFAULT_STEP) -> complex:
    """D^p F = sum over all 2g indices of p(w_a) d_{w_a} + p'(w_a) rho_a d_rho_a + p''/2 rho_a d_{w_-a},
    plus sum_k (p(y_k) d_{y_k} + wt_k p'(y_k)) when F takes points."""
    p0, p1, p2 = _poly(p)
    pts = list(points)
    if pts:
        H = F
        G = ParamFunction(lambda e: H(e, pts))
    else:
        G = _as_param_function(F)
    total = 0j
    for a in ev.params.indices():
        wa = ev.params.w(a)
        total += p0(wa) * partial_deriv(G, ev, a, 0, step)
        total += p1(wa) * partial_deriv(G, ev, a, 1, step)
        total += p2(wa) * partial_deriv(G, ev, a, 2, step)
    total = complex(np.squeeze(total))
    if pts:
        grads = point_derivatives(F, ev, pts)
        base = complex(np.squeeze(F(ev, pts)))
        for k, y in enumerate(pts):
            total += p0(y) * complex(np.squeeze(grads[k])) + weights[k] * p1(y) * base
    return total


# ---------------------------------------------------------------- the suite

def _bundle(z1, z2, y, y2):
    """All Ward targets at fixed points, as one vector-valued function of the evaluator."""

    def H(ev: QuasiformEvaluator, pts):
        zz1, zz2, yy, yy2 = pts
        g = ev.genus
        parts = [
            [partition_det(ev)],
            [ev.prime_form_value(zz1, zz2)],
            ev.nu_integral(zz2, zz1),
            ev.period_matrix().reshape(-1),
            [complex(ev.nu_value(a, yy)) for a in range(1, g + 1)],
            [complex(ev.omega_third_value(zz1, zz2, yy))],
            [complex(ev.omega_value(yy, yy2))],
            [complex(ev.proj_conn_value(yy))],
        ]
        return np.concatenate([np.asarray(p, dtype=complex).reshape(-1) for p in parts])

    return H, [z1, z2, y, y2]


def _layout(g):
    sizes = [("Z", 1), ("E", 1), ("jac", g), ("Om", g * g), ("nu", g), ("om3", 1), ("om", 1), ("s", 1)]
    out, i = {}, 0
    for name, n in sizes:
        out[name] = slice(i, i + n)
        i += n
    return out


def _observed_order(ev, xs, step_ladder):
    """Order of the plain central-difference error in nabla Z_M against s/12 Z_M."""
    F = ParamFunction(partition_det)
    Z = partition_det(ev)
    target = np.array([complex(ev.proj_conn_value(x)) for x in xs]) / 12 * Z
    res = []
    for h in step_ladder:
        grad = moduli_gradient(F, ev, h, richardson=False)
        res.append(float(np.max(np.abs(nabla_value(ev, xs, grad) - target)) / abs(Z)))
    orders = [math.log2(res[i] / res[i + 1]) for i in range(len(res) - 1)]
    return orders, res


def verify_ward_suite(ev: QuasiformEvaluator, config: dict | None = None) -> Report:
    """Residuals of the variational equations on a genus >= 2 surface."""
    _require_genus(ev)
    cfg = {"points": 5, "seed": 21, "step": DEFAULT_STEP, "tol": 1e-4, "tol_mobius": 1e-6,
           "tol_mobius_points": 1e-5, "ladder": (4e-3, 2e-3, 1e-3), "central_charge": 1.0}
    cfg.update(config or {})
    g = ev.genus
    params = ev.params
    avoid = tuple(ev.basepoints(1)) + tuple(ev.basepoints(2))
    pts = sample_domain_points(params, cfg["points"] + 4, seed=cfg["seed"], avoid=avoid)
    # the charge pair sits close together so the straight path between them is canonical
    z1 = pts[0]
    z2 = z1 + 0.35 * (1 + 0.5j)
    y, y2 = pts[1], pts[2]
    xs = np.asarray(pts[4:4 + cfg["points"]], dtype=complex)

    H, hp = _bundle(z1, z2, y, y2)
    grad = moduli_gradient(ParamFunction(lambda e: H(e, hp)), ev, cfg["step"])
    pgrad = point_derivatives(H, ev, hp)
    base = H(ev, hp)
    L = _layout(g)
    nab = nabla_value(ev, xs, grad)  # shape (nx, len(base))

    def psi2(x, yy, j=0):
        return ev.psi_value(2, 0, j, x, yy)

    Z = base[L["Z"]][0]
    E = base[L["E"]][0]
    s_x = np.array([complex(ev.proj_conn_value(x)) for x in xs])
    om3_x = np.array([complex(ev.omega_third_value(z1, z2, x)) for x in xs])
    nu_x = np.array([[complex(ev.nu_value(a, x)) for a in range(1, g + 1)] for x in xs])
    om_xy = np.array([complex(ev.omega_value(x, y)) for x in xs])
    om_xy2 = np.array([complex(ev.omega_value(x, y2)) for x in xs])
    rep = Report()
    tol = cfg["tol"]

    def pt_terms(comp, weights_by_point):
        """Point part of nabla_y^(m) for one bundle component."""
        out = np.zeros(len(xs), dtype=complex)
        for k, m in weights_by_point.items():
            out += psi2(xs, hp[k]) * pgrad[k][comp] + m * psi2(xs, hp[k], 1) * base[comp]
        return out

    iZ = L["Z"].start
    rep.add("nabla Z_M = s Z_M / 12", np.max(np.abs(nab[:, iZ] - s_x / 12 * Z)) / abs(Z), tol)

    iE = L["E"].start
    lhs = nab[:, iE] + pt_terms(iE, {0: -0.5, 1: -0.5})
    rep.add("prime form equation", np.max(np.abs(lhs + 0.5 * om3_x ** 2 * E)) / abs(E), tol)

    worst = 0.0
    for a in range(g):
        c = L["jac"].start + a
        lhs = nab[:, c] + pt_terms(c, {0: 0, 1: 0})
        worst = max(worst, np.max(np.abs(lhs - om3_x * nu_x[:, a])))
    rep.add("Abel integral equation", worst, tol)

    worst = 0.0
    for a in range(g):
        for b in range(g):
            c = L["Om"].start + a * g + b
            worst = max(worst, np.max(np.abs(2j * math.pi * nab[:, c] - nu_x[:, a] * nu_x[:, b])))
    rep.add("Rauch formula", worst, tol)

    worst = 0.0
    for a in range(g):
        c = L["nu"].start + a
        lhs = nab[:, c] + pt_terms(c, {2: 1})
        worst = max(worst, np.max(np.abs(lhs - om_xy * nu_x[:, a])))
    rep.add("holomorphic differential equation", worst, tol)

    c = L["om3"].start
    lhs = nab[:, c] + pt_terms(c, {2: 1, 0: 0, 1: 0})
    rep.add("third-kind differential equation", np.max(np.abs(lhs - om_xy * om3_x)), tol)

    c = L["om"].start
    lhs = nab[:, c] + pt_terms(c, {2: 1, 3: 1})
    rep.add("bidifferential equation", np.max(np.abs(lhs - om_xy * om_xy2)), tol)

    c = L["s"].start
    om2 = np.array([complex(ev.omega_weight_value(2, x, y)) for x in xs])
    lhs = nab[:, c] + pt_terms(c, {2: 2})
    rep.add("projective connection equation", np.max(np.abs(lhs - 6 * (om_xy ** 2 - om2))), tol)

    # two Virasoro insertions: Ward assembly against the free-boson closed form, and x <-> y symmetry
    C = cfg["central_charge"]
    s_y = base[L["s"]][0]
    ds_y = pgrad[2][L["s"]][0]

    def two_vir(xv, yv, s_yv, ds_yv, nab_s_yv):
        # nabla_y^(2)(x) of s(y) Z / 12, plus C/2 omega_2(x, y) Z
        nab_sZ = (nab_s_yv * Z + s_yv * complex(ev.proj_conn_value(xv)) / 12 * Z) / 12
        pt = psi2(xv, yv) * ds_yv * Z / 12 + 2 * psi2(xv, yv, 1) * s_yv * Z / 12
        return nab_sZ + pt + C / 2 * complex(ev.omega_weight_value(2, xv, yv)) * Z

    closed = (0.5 * om_xy ** 2 + s_x * s_y / 144) * Z
    assembled = np.array([two_vir(x, y, s_y, ds_y, nab[i, L["s"].start]) for i, x in enumerate(xs)])
    rep.add("two-Virasoro assembly vs free boson", np.max(np.abs(assembled - closed)) / abs(Z), tol)

    # swap roles: insert the second Virasoro at x0 and differentiate there
    x0 = complex(xs[0])
    Hs = lambda e, p: np.array([complex(e.proj_conn_value(p[0]))])
    grad_s = moduli_gradient(ParamFunction(lambda e: Hs(e, [x0])), ev, cfg["step"])
    ds_x0 = point_derivatives(Hs, ev, [x0])[0][0]
    nab_s_x0 = complex(np.squeeze(nabla_value(ev, y, grad_s)))
    swapped = two_vir(y, x0, s_x[0], ds_x0, nab_s_x0)
    rep.add("two-Virasoro x <-> y symmetry", abs(swapped - assembled[0]) / abs(Z), tol)

    # step halving of the plain central differences
    orders, _ = _observed_order(ev, xs[:2], cfg["ladder"])
    rep.add("central-difference order (|order - 2|)", max(abs(o - 2) for o in orders), 0.5)

    # Cauchy-Riemann: real and imaginary perturbations agree
    F = ParamFunction(partition_det)
    cr = max(abs(complex(partial_deriv(F, ev, 1, ell, cfg["step"]))
                 - complex(partial_deriv(F, ev, 1, ell, cfg["step"], direction=1j)))
             for ell in range(3)) / abs(Z)
    rep.add("holomorphy of Z_M in the parameters", cr, 1e-6)

    for name, p in (("1", (1,)), ("z", (0, 1)), ("z^2", (0, 0, 1))):
        rep.add(f"D^p Z_M = 0, p = {name}",
                abs(mobius_generator(F, ev, p, step=cfg["step"])) / abs(Z), cfg["tol_mobius"])
    return rep


def verify_mobius_points(ev: QuasiformEvaluator, config: dict | None = None) -> Report:
    """D^p_y on the h-h two-point function (weights 1, 1) for p = 1, z, z^2."""
    cfg = {"seed": 8, "step": DEFAULT_STEP, "tol": 1e-5}
    cfg.update(config or {})
    pts = sample_domain_points(ev.params, 2, seed=cfg["seed"], avoid=ev.basepoints(1))
    H = lambda e, p: np.array([complex(e.omega_value(p[0], p[1])) * partition_det(e)])
    scale = abs(complex(H(ev, pts)[0]))
    rep = Report()
    for name, p in (("1", (1,)), ("z", (0, 1)), ("z^2", (0, 0, 1))):
        val = mobius_generator(H, ev, p, points=pts, weights=(1, 1), step=cfg["step"])
        rep.add(f"D^p_y F(h, h) = 0, p = {name}", abs(val) / scale, cfg["tol"])
    return rep
