"""Bers quasiforms, their cocycle forms and the classical differentials."""

from __future__ import annotations

import cmath
import math
import threading
from dataclasses import dataclass

import numpy as np

from .errors import CoincidentPoints, PathThroughSingularity
from .moments import BlockSystem, KernelSpec, pi_kernel
from .report import Report
from .schottky import (
    SchottkyParams,
    alternative_basepoints,
    sample_domain_points,
    select_basepoints,
)

TWO_PI_I = 2j * math.pi


@dataclass(frozen=True)
class FormValue:
    """A coefficient in the plane coordinate plus its differential weights."""

    value: complex
    weights: tuple = ()

    def __complex__(self) -> complex:
        return complex(self.value)


# ---------------------------------------------------------------- paths

@dataclass(frozen=True)
class Segment:
    start: complex
    end: complex

    def point(self, t):
        return self.start + t * (self.end - self.start)

    def velocity(self, t):
        return np.full(np.shape(t), self.end - self.start, dtype=complex)


@dataclass(frozen=True)
class Arc:
    centre: complex
    radius: float
    theta0: float
    theta1: float

    def point(self, t):
        th = self.theta0 + t * (self.theta1 - self.theta0)
        return self.centre + self.radius * np.exp(1j * th)

    def velocity(self, t):
        th = self.theta0 + t * (self.theta1 - self.theta0)
        return 1j * (self.theta1 - self.theta0) * self.radius * np.exp(1j * th)


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(32)


def _gl(f, piece, t0, t1):
    t = 0.5 * (t1 - t0) * _GL_NODES + 0.5 * (t1 + t0)
    z = piece.point(t)
    vals = f(z) * piece.velocity(t)[(...,) + (None,) * (np.ndim(f(z[:1])) - 1)]
    return 0.5 * (t1 - t0) * np.tensordot(_GL_WEIGHTS, vals, axes=(0, 0))


def integrate_path(f, pieces, tol: float = 1e-13, max_depth: int = 30):
    """Adaptive composite Gauss-Legendre integral of f(z) dz along the path.

    ``f`` maps an array of points to an array whose leading axis matches.
    """
    total = 0
    for piece in pieces:
        stack = [(0.0, 1.0, _gl(f, piece, 0.0, 1.0), 0)]
        while stack:
            t0, t1, whole, depth = stack.pop()
            tm = 0.5 * (t0 + t1)
            left, right = _gl(f, piece, t0, tm), _gl(f, piece, tm, t1)
            err = np.max(np.abs(left + right - whole))
            if err <= tol * max(1.0, float(np.max(np.abs(whole)))) or depth >= max_depth:
                total = total + left + right
            else:
                stack.append((tm, t1, right, depth + 1))
                stack.append((t0, tm, left, depth + 1))
    return total


def straight_path(params: SchottkyParams, start: complex, end: complex, exempt=(),
                  detour_factor: float = 1.5):
    """Segment start -> end with circular detours around every disc it meets.

    Detours follow the shorter arc of radius ``detour_factor`` times the disc
    radius (counterclockwise on a tie). Discs listed in ``exempt`` are ignored.
    """
    D = end - start
    cuts = []
    for c in params.indices():
        if c in exempt:
            continue
        w, R = params.w(c), detour_factor * params.radius(c)
        if abs(start - w) <= R or abs(end - w) <= R:
            raise PathThroughSingularity(f"path endpoint inside the detour circle of disc {c}")
        a2 = abs(D) ** 2
        b = 2 * (np.conj(D) * (start - w)).real
        cc = abs(start - w) ** 2 - R * R
        disc = b * b - 4 * a2 * cc
        if disc <= 0:
            continue
        t1, t2 = (-b - math.sqrt(disc)) / (2 * a2), (-b + math.sqrt(disc)) / (2 * a2)
        if t2 <= 0 or t1 >= 1:
            continue
        cuts.append((t1, t2, w, R))
    cuts.sort(key=lambda c: c[0])
    for (s1, s2, *_), (u1, u2, *_) in zip(cuts, cuts[1:]):
        if u1 < s2:
            raise PathThroughSingularity("overlapping detours")
    pieces, t_prev = [], 0.0
    for t1, t2, w, R in cuts:
        e1, e2 = start + t1 * D, start + t2 * D
        th1 = cmath.phase(e1 - w)
        dth = cmath.phase((e2 - w) / (e1 - w))
        if dth <= -math.pi + 1e-12:
            dth = math.pi
        pieces.append(Segment(start + t_prev * D, e1))
        pieces.append(Arc(w, R, th1, th1 + dth))
        t_prev = t2
    pieces.append(Segment(start + t_prev * D, end))
    for piece in pieces:
        if isinstance(piece, Arc):
            pts = piece.point(np.linspace(0, 1, 65))
            for c in params.indices():
                if c in exempt:
                    continue
                if np.any(np.abs(pts - params.w(c)) <= params.radius(c)):
                    raise PathThroughSingularity("detour arc meets another disc")
    return pieces


def _arc_between(centre: complex, radius: float, th_from: float, th_to: float) -> Arc:
    dth = math.remainder(th_to - th_from, 2 * math.pi)
    if dth <= -math.pi + 1e-12:
        dth = math.pi
    return Arc(centre, radius, th_from, th_from + dth)


def beta_path(params: SchottkyParams, a: int, detour_factor: float = 1.5):
    """Canonical path from z0 on circle a to gamma_a z0 on circle -a.

    z0 faces disc -a. The path leaves radially to radius 1.5 r, crosses to the
    facing point of disc -a, follows the shorter arc at that radius and enters
    radially to gamma_a z0.
    """
    wa, wma, r = params.w(a), params.w(-a), params.radius(a)
    R = detour_factor * r
    u = (wma - wa) / abs(wma - wa)
    z0 = wa + r * u
    z1 = params.gamma(a)(z0)
    th_end = cmath.phase(z1 - wma)
    th_face = cmath.phase(-u)
    pieces = [Segment(z0, wa + R * u)]
    pieces += straight_path(params, wa + R * u, wma - R * u, exempt=(a, -a))
    pieces.append(_arc_between(wma, R, th_face, th_end))
    pieces.append(Segment(wma + R * cmath.exp(1j * th_end), z1))
    for piece in pieces[-2:]:
        pts = piece.point(np.linspace(0, 1, 65))
        for c in params.indices():
            if c in (a, -a):
                continue
            if np.any(np.abs(pts - params.w(c)) <= params.radius(c)):
                raise PathThroughSingularity(f"beta path of handle {a} meets disc {c}")
    return pieces


def contour_moment(f, centre: complex, radius: float, power: int = 0, nodes: int = 256) -> complex:
    """(1/2 pi i) times the counterclockwise integral of (z - centre)^power f(z) dz.

    Trapezoid rule, spectrally accurate for integrands analytic near the circle.
    """
    t = 2 * math.pi * np.arange(nodes) / nodes
    u = radius * np.exp(1j * t)
    return complex(np.mean(u ** (power + 1) * np.asarray(f(centre + u))))


def _mono_deriv(w, k: int, j: int):
    """Normalised j-th derivative of y^k at y = w."""
    return math.comb(k, j) * w ** (k - j) if j <= k else 0 * w


# ---------------------------------------------------------------- evaluator

class QuasiformEvaluator:
    """Evaluates Ψ_N, Θ_{N,a}^l and the classical differentials for one set of params."""

    def __init__(self, params: SchottkyParams, cutoff: int = 24, basepoints=None,
                 genus1_extension: bool = False):
        self.params = params
        self.cutoff = cutoff
        self.genus1_extension = genus1_extension
        self._basepoints = dict(basepoints or {})
        self._systems: dict = {}
        self._cache: dict = {}
        self._lock = threading.Lock()

    @property
    def genus(self) -> int:
        return self.params.genus

    def basepoints(self, N: int) -> tuple:
        if N not in self._basepoints:
            self._basepoints[N] = select_basepoints(self.params, N, self.genus1_extension)
        return self._basepoints[N]

    def system(self, N: int) -> BlockSystem:
        with self._lock:
            if N not in self._systems:
                spec = KernelSpec(self.params, N, self.basepoints(N))
                self._systems[N] = BlockSystem(spec, max(self.cutoff, 2 * N - 1))
            return self._systems[N]

    # -- quasiform and cocycle
    def coboundary_matrix(self, N: int) -> np.ndarray:
        """Column k holds the generator coboundary coefficients p_a^l of p(y) = y^k.

        Rows run over (a, l) for a = 1..g, l = 0..2N-2.
        """
        key = ("cob", N)
        if key not in self._cache:
            L = 2 * N - 1
            K = np.zeros((self.genus * L, L), dtype=complex)
            for k in range(L):
                row = 0
                for a in range(1, self.genus + 1):
                    wa, wma, rho = self.params.w(a), self.params.w(-a), self.params.rho(a)
                    for ell in range(L):
                        K[row, k] = (-1) ** (N + 1) * rho ** (N - ell - 1) * _mono_deriv(wma, k, 2 * N - 2 - ell) \
                            - _mono_deriv(wa, k, ell)
                        row += 1
            self._cache[key] = K
        return self._cache[key]

    def _pole_fix(self, N: int):
        """(lam, P): lam[s, k] are the y^k coefficients of the correcting polynomials,
        P = K lam^T the projector removing basepoint poles from the cocycle forms."""
        key = ("fix", N)
        if key not in self._cache:
            K = self.coboundary_matrix(N)
            lam = np.linalg.pinv(K.T)
            self._cache[key] = (lam, K @ lam.T)
        return self._cache[key]

    def _kernel_psi(self, N: int, i: int, j: int, x, y):
        sysN = self.system(N)
        left = sysN.solve_left(sysN.eval_Ltilde(x, i))
        right = sysN.eval_R(y, j)
        return pi_kernel(sysN.spec, x, y, i, j) + np.sum(left * right, axis=-1)

    def psi_value(self, N: int, i: int, j: int, x, y):
        x = np.asarray(x, dtype=complex)
        y = np.asarray(y, dtype=complex)
        out = self._kernel_psi(N, i, j, x, y)
        if N >= 2:
            # cancel the simple poles at the basepoints with polynomial multiples of the cocycle forms
            lam, _ = self._pole_fix(N)
            ydep = np.stack([_mono_deriv(y, k, j) for k in range(2 * N - 1)], axis=-1)
            out = out + np.sum((ydep @ lam.T) * self._theta_raw_all(N, x, i), axis=-1)
        return out[()] if np.ndim(out) == 0 else out

    def psi(self, N: int, i: int, j: int, x, y) -> FormValue:
        return FormValue(complex(self.psi_value(N, i, j, x, y)), (("x", N), ("y", 1 - N)))

    def _t_value(self, N: int, b: int, ell: int, x, i: int):
        sysN = self.system(N)
        col = sysN.pos[b] * (2 * N - 1) + ell
        lt = sysN.eval_Ltilde(x, i)
        return pi_kernel(sysN.spec, x, self.params.w(b), i, ell) + lt @ sysN.S[:, col]

    def _theta_raw(self, N: int, a: int, ell: int, x, i: int):
        rho = self.params.rho(a)
        return self._t_value(N, a, ell, x, i) + (-1) ** N * rho ** (N - 1 - ell) * \
            self._t_value(N, -a, 2 * N - 2 - ell, x, i)

    def _theta_raw_all(self, N: int, x, i: int = 0):
        return np.stack([self._theta_raw(N, a, ell, x, i) for a in range(1, self.genus + 1)
                         for ell in range(2 * N - 1)], axis=-1)

    def theta_all(self, N: int, x, i: int = 0):
        """All Θ_{N,a}^l at x; last axis runs over (a, l), a = 1..g, l = 0..2N-2."""
        x = np.asarray(x, dtype=complex)
        raw = self._theta_raw_all(N, x, i)
        if N == 1:
            return raw
        _, P = self._pole_fix(N)
        return raw - raw @ P.T

    def theta_value(self, N: int, a: int, ell: int, x, i: int = 0):
        x = np.asarray(x, dtype=complex)
        if N == 1:
            out = self._theta_raw(N, a, ell, x, i)
        else:
            out = self.theta_all(N, x, i)[..., (a - 1) * (2 * N - 1) + ell]
        return out[()] if np.ndim(out) == 0 else out

    def theta(self, N: int, a: int, ell: int, x, i: int = 0) -> FormValue:
        return FormValue(complex(self.theta_value(N, a, ell, x, i)), (("x", N),))

    # -- classical differentials
    def nu_value(self, a: int, x):
        """Normalised holomorphic 1-form: alpha-period 2 pi i delta around disc -a."""
        return -self.theta_value(1, a, 0, x)

    def nu_all(self, x):
        x = np.asarray(x, dtype=complex)
        return np.stack([self.nu_value(a, x) for a in range(1, self.genus + 1)], axis=-1)

    def nu(self, a: int, x) -> FormValue:
        return FormValue(complex(self.nu_value(a, x)), (("x", 1),))

    def omega_value(self, x, y):
        return self.psi_value(1, 0, 1, x, y)

    def omega_bidiff(self, x, y) -> FormValue:
        return FormValue(complex(self.omega_value(x, y)), (("x", 1), ("y", 1)))

    def omega_third_value(self, y1, y2, x):
        return self.psi_value(1, 0, 0, x, y1) - self.psi_value(1, 0, 0, x, y2)

    def omega_third(self, y1, y2, x) -> FormValue:
        return FormValue(complex(self.omega_third_value(y1, y2, x)), (("x", 1),))

    def _regular_omega(self, x, y, i: int = 0, j: int = 1):
        sys1 = self.system(1)
        left = sys1.solve_left(sys1.eval_Ltilde(np.asarray(x, dtype=complex), i))
        return np.sum(left * sys1.eval_R(np.asarray(y, dtype=complex), j), axis=-1)

    def proj_conn_value(self, x):
        """Projective connection: six times the regular diagonal part of omega."""
        return 6.0 * self._regular_omega(x, x)

    def proj_conn(self, x) -> FormValue:
        return FormValue(complex(self.proj_conn_value(x)), (("x", 2),))

    def omega_weight_value(self, N: int, x, y):
        return self.psi_value(N, 0, 2 * N - 1, x, y)

    def omega_weight(self, N: int, x, y) -> FormValue:
        return FormValue(complex(self.omega_weight_value(N, x, y)), (("x", N), ("y", N)))

    # -- integrals
    def period_matrix(self) -> np.ndarray:
        if "period" not in self._cache:
            g = self.genus
            Om = np.zeros((g, g), dtype=complex)
            for a in range(1, g + 1):
                Om[a - 1] = integrate_path(self.nu_all, beta_path(self.params, a)) / TWO_PI_I
            # the straight beta paths may cross; adding whole alpha cycles restores a canonical marking
            for a in range(g):
                for b in range(a + 1, g):
                    Om[b, a] += round((Om[a, b] - Om[b, a]).real)
            self._cache["period"] = Om
        return self._cache["period"]

    def nu_integral(self, z_from: complex, z_to: complex) -> np.ndarray:
        """Integrals of all nu_a along the canonical straight path from z_from to z_to."""
        return integrate_path(self.nu_all, straight_path(self.params, z_from, z_to))

    def log_prime_form(self, x: complex, y: complex) -> complex:
        """log K(x, y) - log(x - y), via the separable regular part of omega."""
        if x == y:
            raise CoincidentPoints("prime form needs distinct points")
        sys1 = self.system(1)
        n = np.arange(sys1.M + 1)
        parts = []
        for k in range(len(sys1.index)):
            anti = lambda u: (sys1.sr[k] / (u - sys1.w[k])) ** (n + 1) / (-(n + 1))
            parts.append(anti(x) - anti(y))
        lint = np.concatenate(parts)
        dR = sys1.eval_R(np.asarray(x, dtype=complex)) - sys1.eval_R(np.asarray(y, dtype=complex))
        double = lint @ sys1.solve_resolvent(dR)
        return -0.5 * complex(double)

    def prime_form_value(self, x: complex, y: complex) -> complex:
        return (x - y) * cmath.exp(self.log_prime_form(x, y))

    def prime_form(self, x: complex, y: complex) -> FormValue:
        return FormValue(self.prime_form_value(x, y), (("x", -0.5), ("y", -0.5)))


# ---------------------------------------------------------------- checks

def theta_rank(ev: QuasiformEvaluator, N: int, n_points: int = 12, seed: int = 3,
               rel_tol: float = 1e-8) -> int:
    """Numerical rank of the sampled spanning set Θ_{N,a}^l, a = 1..g, l = 0..2N-2."""
    pts = np.array(sample_domain_points(ev.params, n_points, seed, avoid=ev.basepoints(N)))
    cols = [ev.theta_value(N, a, ell, pts) for a in range(1, ev.genus + 1)
            for ell in range(2 * N - 1)]
    sv = np.linalg.svd(np.stack(cols, axis=1), compute_uv=False)
    return int(np.sum(sv > rel_tol * sv[0]))


def _circle_points(params: SchottkyParams, a: int, n: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    th = rng.uniform(0, 2 * math.pi, n)
    return params.w(a) + params.radius(a) * np.exp(1j * th)


def verify_expansions(ev: QuasiformEvaluator, config: dict | None = None) -> Report:
    """Residuals of the quasiform laws and the meromorphic-form expansion."""
    cfg = {"samples": 5, "seed": 7, "weights": (1, 2), "tol_expansion": 1e-10,
           "tol_cocycle": 1e-8, "tol_invariance": 1e-8, "tol_basepoint": 1e-8}
    cfg.update(config or {})
    p, g = ev.params, ev.genus
    rep = Report()
    n = cfg["samples"]
    weights = [N for N in cfg["weights"] if N == 1 or g >= 2 or ev.genus1_extension]
    alt = {N: QuasiformEvaluator(p, ev.cutoff, {N: alternative_basepoints(p, N, ev.genus1_extension)},
                                 ev.genus1_extension) for N in weights}

    # (a) third-kind differential from a second basepoint, expanded in Θ and Ψ_1
    if 1 in alt:
        other = alt[1]
        pts = sample_domain_points(p, 3 * n, cfg["seed"], avoid=ev.basepoints(1) + other.basepoints(1))
        worst = 0.0
        for k in range(n):
            x, y1, y2 = pts[3 * k: 3 * k + 3]
            H = lambda z: other.omega_third_value(y1, y2, z)
            rhs = ev.psi_value(1, 0, 0, x, y1) - ev.psi_value(1, 0, 0, x, y2)
            for a in range(1, g + 1):
                res = contour_moment(H, p.w(a), 1.2 * p.radius(a))
                rhs += ev.theta_value(1, a, 0, x) * res
            worst = max(worst, abs(H(x) - rhs))
        rep.add("expansion: third-kind differential", worst, cfg["tol_expansion"])

    for N in weights:
        ys = sample_domain_points(p, n, cfg["seed"] + N, avoid=ev.basepoints(N))
        # (b) generator cocycle in y, y on circle a so that gamma_a y lies on circle -a
        worst = 0.0
        for a in range(1, g + 1):
            ga = p.gamma(a)
            for x, y in zip(ys, _circle_points(p, a, n, cfg["seed"] + 10 * a)):
                gy = ga(y)
                lhs = ev.psi_value(N, 0, 0, x, gy) * ga.derivative(y) ** (1 - N) - ev.psi_value(N, 0, 0, x, y)
                rhs = -sum(ev.theta_value(N, a, ell, x) * (y - p.w(a)) ** ell for ell in range(2 * N - 1))
                worst = max(worst, abs(lhs - rhs))
        rep.add(f"cocycle in y, N={N}", worst, cfg["tol_cocycle"])
        # (c) invariance in x
        worst = 0.0
        for a in range(1, g + 1):
            ga = p.gamma(a)
            for y, x in zip(ys, _circle_points(p, a, n, cfg["seed"] + 20 * a)):
                lhs = ev.psi_value(N, 0, 0, ga(x), y) * ga.derivative(x) ** N
                worst = max(worst, abs(lhs - ev.psi_value(N, 0, 0, x, y)))
        rep.add(f"invariance in x, N={N}", worst, cfg["tol_invariance"])
        # (d) change of basepoints
        rep.add(f"basepoint change, N={N}", _basepoint_change_residual(ev, alt[N], N, ys),
                cfg["tol_basepoint"])
    return rep


def _basepoint_change_residual(ev: QuasiformEvaluator, other: QuasiformEvaluator, N: int, xs) -> float:
    p, g, L = ev.params, ev.genus, 2 * N - 1
    avoid = ev.basepoints(N) + other.basepoints(N)
    xs = [x for x in xs if min(abs(x - b) for b in avoid) > 1e-3]
    nodes = sample_domain_points(p, L, 99, avoid=avoid + tuple(xs))
    V = np.vander(np.array(nodes), L, increasing=True)
    worst = 0.0
    for x in xs:
        # other - ev = -sum_k phi_k(x) y^k
        diff = np.array([other.psi_value(N, 0, 0, x, y) - ev.psi_value(N, 0, 0, x, y) for y in nodes])
        phi = -np.linalg.solve(V, diff)
        for a in range(1, g + 1):
            wa, wma, rho = p.w(a), p.w(-a), p.rho(a)
            for ell in range(L):
                pred = 0j
                for k in range(L):
                    dk = lambda w, j: math.comb(k, j) * w ** (k - j) if j <= k else 0.0
                    pal = (-1) ** (N + 1) * rho ** (N - ell - 1) * dk(wma, 2 * N - 2 - ell) - dk(wa, ell)
                    pred += pal * phi[k]
                got = other.theta_value(N, a, ell, x) - ev.theta_value(N, a, ell, x)
                worst = max(worst, abs(got - pred))
    return worst


def poincare_omega(params: SchottkyParams, x: complex, y: complex, depth: int) -> complex:
    """omega(x, y) as the group sum of gamma'(x) / (gamma x - y)^2 over reduced words of length <= depth."""
    from .schottky import enumerate_words

    total = 0j
    for word in enumerate_words(params, depth):
        m = word.map
        gx = m(x)
        total += m.derivative(x) / (gx - y) ** 2
    return total


def verify_classical(ev: QuasiformEvaluator, config: dict | None = None) -> Report:
    """Symmetry and normalisation checks on the classical differentials and the prime form."""
    cfg = {"samples": 5, "seed": 17, "depth": 0, "tol_sym": 1e-9, "tol_period": 1e-8,
           "tol_prime": 1e-8, "tol_poincare": 1e-8}
    cfg.update(config or {})
    p, g = ev.params, ev.genus
    pts = sample_domain_points(p, 2 * cfg["samples"], cfg["seed"], avoid=ev.basepoints(1))
    pairs = list(zip(pts[::2], pts[1::2]))
    rep = Report()

    rep.add("omega symmetric (relative)",
            max(abs(ev.omega_value(x, y) - ev.omega_value(y, x)) / abs(ev.omega_value(x, y))
                for x, y in pairs), cfg["tol_sym"])

    worst_om = worst_nu = 0.0
    for a in range(1, g + 1):
        centre, rad = p.w(-a), 1.2 * p.radius(a)
        for _, y in pairs:
            worst_om = max(worst_om, abs(contour_moment(lambda z: ev.omega_value(z, y), centre, rad)))
        for b in range(1, g + 1):
            per = contour_moment(lambda z: ev.nu_value(b, z), centre, rad)
            worst_nu = max(worst_nu, abs(per - (1.0 if a == b else 0.0)) * 2 * math.pi)
    rep.add("alpha periods of omega vanish", worst_om * 2 * math.pi, cfg["tol_period"])
    rep.add("alpha periods of nu are 2 pi i delta", worst_nu, cfg["tol_period"])

    Om = ev.period_matrix()
    rep.add("period matrix symmetric", float(np.max(np.abs(Om - Om.T))), cfg["tol_period"])
    rep.add("Im period matrix positive definite (-min eigenvalue)",
            max(0.0, -float(np.min(np.linalg.eigvalsh(Om.imag)))), 1e-12)

    worst_anti = worst_diag = 0.0
    for x, y in pairs:
        worst_anti = max(worst_anti, abs(ev.prime_form_value(x, y) + ev.prime_form_value(y, x)))
        for eps in (1e-2, 5e-3):
            # K(x, x+e)/(-e) = 1 + O(e^2): the quotient shrinks by 4 when e halves
            worst_diag = max(worst_diag, abs(ev.prime_form_value(x, x + eps) / (-eps) - 1) / eps)
    rep.add("prime form antisymmetric", worst_anti, cfg["tol_prime"])
    rep.add("prime form diagonal (|K/(x-y) - 1| / |x-y|)", worst_diag, 1e-1)

    if cfg["depth"]:
        worst = max(abs(poincare_omega(p, x, y, cfg["depth"]) - ev.omega_value(x, y)) for x, y in pairs)
        rep.add(f"omega vs Poincare series at depth {cfg['depth']}", worst, cfg["tol_poincare"])
    return rep
