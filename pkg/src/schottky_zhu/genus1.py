"""Closed-form elliptic functions used as genus-one oracles."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import BranchPoint, ParameterSpaceError, PoleHit
from .forms import QuasiformEvaluator, sample_domain_points
from .heisenberg import partition_det
from .moments import stable_cutoff
from .report import Report
from .schottky import SchottkyGenerator, SchottkyParams, validate


@dataclass(frozen=True)
class EllipticParams:
    """Nome q of the torus and the truncation of its q-series."""

    q: complex
    cutoff: int = 0

    def __post_init__(self):
        q = complex(self.q)
        if not 0 < abs(q) < 1:
            raise ValueError("need 0 < |q| < 1")
        object.__setattr__(self, "q", q)
        if self.cutoff <= 0:
            n = 1
            while abs(q) ** n / (1 - abs(q)) >= 1e-16:
                n += 1
            object.__setattr__(self, "cutoff", n)
        elif abs(q) ** self.cutoff / (1 - abs(q)) >= 1e-14:
            raise ValueError("cutoff too small for a 1e-14 tail")

    @property
    def log_q(self) -> complex:
        return cmath.log(self.q)

    @property
    def tau(self) -> complex:
        return self.log_q / (2j * math.pi)


def _reduce(z: complex, ep: EllipticParams):
    """Shift z by multiples of log q into the central strip; returns (z', k) with z = z' + k log q."""
    lq = ep.log_q
    k = round(z.real / lq.real)
    return z - k * lq, k


def _series_terms(zr: complex, ep: EllipticParams):
    # both sums converge on |q| < |e^z| < 1/|q|; twice the cutoff covers the square-root rate
    m = np.arange(1, 2 * ep.cutoff + 1)
    qm = ep.q ** m
    return m, qm / (1 - qm), np.exp(m * zr), np.exp(-m * zr)


def p1(z: complex, ep: EllipticParams) -> complex:
    """Quasiperiodic Weierstrass function with periods 2 pi i (shift 0) and log q (shift -1)."""
    zr, k = _reduce(complex(z), ep)
    e = cmath.exp(zr)
    if abs(1 - e) < 1e-14:
        raise PoleHit(f"P1 has a pole at z = {z}")
    m, c, ep_, em = _series_terms(zr, ep)
    val = (1 + e) / (2 * (e - 1)) - np.sum(c * ep_) + np.sum(c * em)
    return complex(val) - k


def p1_derivative(z: complex, ep: EllipticParams) -> complex:
    """z-derivative of P1 (elliptic, double pole of coefficient -1)."""
    zr, _ = _reduce(complex(z), ep)
    e = cmath.exp(zr)
    if abs(1 - e) < 1e-14:
        raise PoleHit(f"P1' has a pole at z = {z}")
    m, c, ep_, em = _series_terms(zr, ep)
    return complex(-e / (e - 1) ** 2 - np.sum(m * c * ep_) - np.sum(m * c * em))


def euler_partition(q: complex, terms: int = 40) -> complex:
    """prod_{n <= terms} (1 - q^n)^(-1)."""
    n = np.arange(1, terms + 1)
    return complex(1 / np.prod(1 - complex(q) ** n))


def partition_numbers(n_max: int) -> list:
    """p(0..n_max) by the coin-change recurrence."""
    p = [1] + [0] * n_max
    for part in range(1, n_max + 1):
        for n in range(part, n_max + 1):
            p[n] += p[n - part]
    return p


def partition_series(q: complex, terms: int = 40) -> complex:
    """sum_{n <= terms} p(n) q^n."""
    return complex(sum(c * complex(q) ** n for n, c in enumerate(partition_numbers(terms))))


def torus_map(gen: SchottkyGenerator, z: complex) -> complex:
    """Principal log of (z - W_minus)/(z - W_plus): the flat torus coordinate."""
    z = complex(z)
    if z == gen.W_minus or z == gen.W_plus:
        raise BranchPoint("torus coordinate is singular at the fixed points")
    return cmath.log((z - gen.W_minus) / (z - gen.W_plus))


def torus_map_derivative(gen: SchottkyGenerator, z: complex) -> complex:
    z = complex(z)
    return 1 / (z - gen.W_minus) - 1 / (z - gen.W_plus)


def verify_genus1_suite(gen: SchottkyGenerator, ep: EllipticParams | None = None,
                        config: dict | None = None) -> Report:
    """Sewing-side genus-one quantities against their elliptic closed forms."""
    cfg = {"samples": 6, "seed": 11, "cutoff": None, "charges": (1.0, math.sqrt(2.0)),
           "tol_partition": 1e-8, "tol_period": 1e-9, "tol_psi": 1e-9, "tol_omega": 1e-9,
           "tol_charge": 1e-10}
    cfg.update(config or {})
    ep = ep or EllipticParams(gen.q)
    params = SchottkyParams((gen,))
    if not validate(params).passed:
        raise ParameterSpaceError("the isometric circles of this generator overlap")
    cutoff = cfg["cutoff"] or stable_cutoff(params)
    ev = QuasiformEvaluator(params, cutoff)
    rep = Report()

    Z = partition_det(ev)
    rep.add("partition vs Euler product", abs(Z / euler_partition(ep.q) - 1), cfg["tol_partition"])

    Om = complex(ev.period_matrix()[0, 0])
    rep.add("period vs log q / 2 pi i", abs(Om - ep.tau), cfg["tol_period"])

    A0 = ev.basepoints(1)[0]
    pts = sample_domain_points(params, 2 * cfg["samples"], cfg["seed"], avoid=(A0,))
    zeta = lambda z: torus_map(gen, z)
    worst_psi = worst_om = 0.0
    for x, y in zip(pts[::2], pts[1::2]):
        dz = torus_map_derivative(gen, x)
        closed = (p1(zeta(x) - zeta(y), ep) - p1(zeta(x) - zeta(A0), ep)) * dz
        worst_psi = max(worst_psi, abs(ev.psi_value(1, 0, 0, x, y) - closed))
        closed_om = -p1_derivative(zeta(x) - zeta(y), ep) * dz * torus_map_derivative(gen, y)
        worst_om = max(worst_om, abs(ev.omega_value(x, y) - closed_om))
    rep.add("third-kind form vs P1", worst_psi, cfg["tol_psi"])
    rep.add("two-point form vs P1'", worst_om, cfg["tol_omega"])

    worst = 0.0
    for alpha in cfg["charges"]:
        lhs = cmath.exp(1j * math.pi * alpha ** 2 * Om)
        rhs = cmath.exp(alpha ** 2 / 2 * ep.log_q)
        worst = max(worst, abs(lhs - rhs) / abs(rhs))
    rep.add("charge factor vs q^(alpha^2/2)", worst, cfg["tol_charge"])
    return rep
