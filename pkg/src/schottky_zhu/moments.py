"""Sewing kernel, truncated moment matrices and the resolvent of I - Ã."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import (
    CoincidentPoints,
    EvaluationAtBasepoint,
    EvaluationAtCentre,
    SingularResolvent,
)
from .schottky import SchottkyParams, select_basepoints


def _binom(n: int, k: int) -> float:
    return float(math.comb(n, k)) if 0 <= k <= n else 0.0


def _neg_power_deriv(d, p: int, i: int):
    """Normalised i-th derivative of (x - c)^(-p), given d = x - c."""
    return (-1) ** i * _binom(p + i - 1, i) * d ** (-(p + i))


@dataclass(frozen=True)
class KernelSpec:
    """Weight N sewing kernel with its 2N-1 basepoints."""

    params: SchottkyParams
    N: int
    basepoints: tuple
    lagrange: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        pts = tuple(complex(p) for p in self.basepoints)
        object.__setattr__(self, "basepoints", pts)
        if len(pts) != 2 * self.N - 1:
            raise ValueError(f"need {2 * self.N - 1} basepoints, got {len(pts)}")
        for i in range(len(pts)):
            for j in range(i):
                if pts[i] == pts[j]:
                    raise ValueError("basepoints must be pairwise distinct")
        # lagrange[k, l] = coefficient of y^l in the k-th Lagrange polynomial
        L = len(pts)
        coef = np.zeros((L, L), dtype=complex)
        for k in range(L):
            others = [pts[j] for j in range(L) if j != k]
            poly = np.poly(others) if others else np.array([1.0 + 0j])
            denom = np.prod([pts[k] - o for o in others]) if others else 1.0
            coef[k] = poly[::-1] / denom
        object.__setattr__(self, "lagrange", coef)

    @staticmethod
    def default(params: SchottkyParams, N: int, genus1_extension: bool = False) -> "KernelSpec":
        return KernelSpec(params, N, select_basepoints(params, N, genus1_extension))

    @property
    def ell_range(self) -> range:
        return range(2 * self.N - 1)

    def _check_x(self, x):
        for p in self.basepoints:
            if np.any(x == p):
                raise EvaluationAtBasepoint(f"evaluation at basepoint {p}")

    def lagrange_deriv(self, y, j: int):
        """Normalised j-th derivatives of all Lagrange polynomials at y; shape (2N-1, *y.shape)."""
        y = np.asarray(y, dtype=complex)
        L = len(self.basepoints)
        out = np.zeros((L,) + y.shape, dtype=complex)
        for ell in range(j, L):
            out += np.multiply.outer(self.lagrange[:, ell] * _binom(ell, j), y ** (ell - j))
        return out


def pi_regular(spec: KernelSpec, x, y, i: int, j: int):
    """Normalised (i, j) derivative of sum_l f_l(x) y^l, closed form."""
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    spec._check_x(x)
    Q = spec.lagrange_deriv(y, j)
    out = np.zeros(np.broadcast(x, y).shape, dtype=complex)
    for k, A in enumerate(spec.basepoints):
        out -= _neg_power_deriv(x - A, 1, i) * Q[k]
    return out


def pi_kernel(spec: KernelSpec, x, y, i: int = 0, j: int = 0):
    """Normalised derivative of 1/(x-y) prod_l (y-A_l)/(x-A_l) in closed form."""
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    if np.any(x == y):
        raise CoincidentPoints("pi kernel is singular at x = y")
    sing = (-1) ** i * _binom(i + j, i) / (x - y) ** (1 + i + j)
    out = sing + pi_regular(spec, x, y, i, j)
    return out[()] if out.ndim == 0 else out


def f_ell(spec: KernelSpec, x, ell: int, m: int = 0):
    """Normalised m-th derivative of f_l(x) = -sum_k Q_k^(l)(0) / (x - A_k)."""
    x = np.asarray(x, dtype=complex)
    spec._check_x(x)
    out = np.zeros(x.shape, dtype=complex)
    for k, A in enumerate(spec.basepoints):
        out -= spec.lagrange[k, ell] * _neg_power_deriv(x - A, 1, m)
    return out[()] if out.ndim == 0 else out


def e_mn(spec: KernelSpec, y, m: int, n: int):
    """sum_l binom(l, n) f_l^(m)(y) y^(l-n)."""
    y = np.asarray(y, dtype=complex)
    out = np.zeros(y.shape, dtype=complex)
    for ell in range(n, 2 * spec.N - 1):
        out += _binom(ell, n) * f_ell(spec, y, ell, m) * y ** (ell - n)
    return out[()] if out.ndim == 0 else out


def e_coeff(spec: KernelSpec, y, j: int, i: int):
    """sum_l f_l^(i)(y) d^(j) y^l: the y-expansion coefficients of the regular kernel."""
    return e_mn(spec, y, i, j)


def _lu_logdet(lu: np.ndarray, piv: np.ndarray):
    diag = np.diag(lu)
    log_abs = float(np.sum(np.log(np.abs(diag))))
    swaps = int(np.sum(piv != np.arange(len(piv))))
    phase = float(np.sum(np.angle(diag))) + math.pi * (swaps % 2)
    return log_abs, phase


class BlockSystem:
    """Truncated moment matrices for modes 0..M and the factorised resolvent.

    Rows and columns are ordered by signed index (params.indices()) and then
    by mode. The columns of ``A_ell`` are (a, l) for l in 0..2N-2 with the
    column factor rho_a^(l/2) removed.
    """

    def __init__(self, spec: KernelSpec, M: int):
        if M < 2 * spec.N - 1:
            raise ValueError("cutoff M must be at least 2N-1")
        self.spec = spec
        self.M = M
        p = spec.params
        self.index = p.indices()
        self.pos = {a: k for k, a in enumerate(self.index)}
        self.w = np.array([p.w(a) for a in self.index])
        self.w_partner = np.array([p.w(-a) for a in self.index])
        self.sr = np.array([p.sqrt_rho(a) for a in self.index])
        for A in spec.basepoints:
            if np.any(np.abs(self.w - A) == 0):
                raise EvaluationAtCentre("basepoint coincides with a disc centre")
        self.dim = len(self.index) * (M + 1)
        self.Atilde = self._build_atilde()
        self._A = None
        self.A_ell = self._build_a_ell()
        lhs = np.eye(self.dim, dtype=complex) - self.Atilde
        self._lu, self._piv = scipy.linalg.lu_factor(lhs, check_finite=True)
        d = np.abs(np.diag(self._lu))
        if np.min(d) < 1e-13 * max(1.0, np.max(d)):
            raise SingularResolvent("I - Ã is numerically singular")
        self.logdet = self._logdet()
        self.S = self.solve_resolvent(self.A_ell)

    # construction
    def _build_atilde(self) -> np.ndarray:
        N, M = self.spec.N, self.M
        m = np.arange(M + 1)
        mm, nn = np.meshgrid(m, m, indexing="ij")
        binom = np.vectorize(lambda a, b: _binom(int(a), int(b)))(mm + nn + 2 * N - 1, mm)
        sign = (-1.0) ** (mm + N)
        blocks = []
        for a in self.index:
            row = []
            for b in self.index:
                if a == -b:
                    row.append(np.zeros((M + 1, M + 1), dtype=complex))
                    continue
                d = self.spec.params.w(-a) - self.spec.params.w(b)
                ra = self.spec.params.sqrt_rho(a) / d
                rb = self.spec.params.sqrt_rho(b) / d
                row.append(sign * binom * ra ** (mm + 1) * rb ** (nn + 2 * N - 1))
            blocks.append(row)
        return np.block(blocks)

    def _a_entry_block(self, a: int, b: int, ncols: int, col_scale: bool) -> np.ndarray:
        """Rows m = 0..M of A_{ab}^{mn} for n < ncols."""
        spec, p, N, M = self.spec, self.spec.params, self.spec.N, self.M
        x = p.w(-a)
        out = np.zeros((M + 1, ncols), dtype=complex)
        for n in range(ncols):
            if a == -b:
                if n > 2 * N - 2:
                    continue
                col = np.array([e_mn(spec, x, m, n) for m in range(M + 1)])
            else:
                col = np.array([pi_kernel(spec, x, p.w(b), m, n)
                                for m in range(M + 1)])
            scale = p.sqrt_rho(b) ** n if col_scale else 1.0
            out[:, n] = (-1) ** N * p.sqrt_rho(a) ** (np.arange(M + 1) + 1) * col * scale
        return out

    def build_a(self, ncols: int) -> np.ndarray:
        """The moment matrix A with rows m = 0..M and columns n < ncols per block."""
        return np.block([[self._a_entry_block(a, b, ncols, True) for b in self.index]
                         for a in self.index])

    @property
    def A(self) -> np.ndarray:
        """Square truncation of A (built on first use)."""
        if self._A is None:
            self._A = self.build_a(self.M + 1)
        return self._A

    def _build_a_ell(self) -> np.ndarray:
        L = 2 * self.spec.N - 1
        return np.block([[self._a_entry_block(d, a, L, False) for a in self.index]
                         for d in self.index])

    def _logdet(self) -> complex:
        log_abs, phase = _lu_logdet(self._lu, self._piv)
        # select the branch continuously connected to logdet = 0 at Ã = 0
        lam = np.linalg.eigvals(self.Atilde)
        ref = float(np.sum(np.angle(1.0 - lam)))
        k = round((ref - phase) / (2 * math.pi))
        return complex(log_abs, phase + 2 * math.pi * k)

    # evaluation
    def block_slice(self, a: int) -> slice:
        k = self.pos[a]
        return slice(k * (self.M + 1), (k + 1) * (self.M + 1))

    def col(self, a: int, n: int) -> int:
        return self.pos[a] * (self.M + 1) + n

    def _check_centres(self, x, partner: bool):
        centres = self.w_partner if partner else self.w
        for c in centres:
            if np.any(x == c):
                raise EvaluationAtCentre(f"evaluation at disc centre {c}")

    def eval_Ltilde(self, x, i: int = 0) -> np.ndarray:
        """Rows L̃^(i)(x); shape (*x.shape, dim)."""
        x = np.asarray(x, dtype=complex)
        self._check_centres(x, False)
        N, M = self.spec.N, self.M
        n = np.arange(M + 1)
        parts = []
        for k, a in enumerate(self.index):
            d = x[..., None] - self.w[k]
            p = n + 2 * N
            coeff = (-1) ** i * np.array([_binom(int(pp) + i - 1, i) for pp in p])
            parts.append(coeff * (self.sr[k] / d) ** (n + 2 * N - 1) / d ** (i + 1))
        return np.concatenate(parts, axis=-1)

    def eval_L(self, x, i: int = 0, tilde: bool = False) -> np.ndarray:
        if tilde:
            return self.eval_Ltilde(x, i)
        x = np.asarray(x, dtype=complex)
        self._check_centres(x, False)
        parts = []
        for k, a in enumerate(self.index):
            cols = [self.sr[k] ** n * pi_kernel(self.spec, x, self.w[k], i, n)
                    for n in range(self.M + 1)]
            parts.append(np.stack(np.broadcast_arrays(*cols), axis=-1))
        return np.concatenate(parts, axis=-1)

    def eval_R(self, y, j: int = 0) -> np.ndarray:
        """Columns R^(j)(y); shape (*y.shape, dim)."""
        y = np.asarray(y, dtype=complex)
        self._check_centres(y, True)
        N, M = self.spec.N, self.M
        parts = []
        for k, a in enumerate(self.index):
            x = self.w_partner[k]
            cols = [(-1) ** N * self.sr[k] ** (m + 1) * pi_kernel(self.spec, x, y, m, j)
                    for m in range(M + 1)]
            parts.append(np.stack(np.broadcast_arrays(*cols), axis=-1))
        return np.concatenate(parts, axis=-1)

    def solve_resolvent(self, rhs: np.ndarray) -> np.ndarray:
        """(I - Ã)^(-1) rhs for a column or a matrix of columns."""
        return scipy.linalg.lu_solve((self._lu, self._piv), rhs)

    def solve_left(self, rows: np.ndarray) -> np.ndarray:
        """rows (I - Ã)^(-1) for rows stacked along the last axis."""
        rows = np.asarray(rows)
        flat = rows.reshape(-1, self.dim).T
        out = scipy.linalg.lu_solve((self._lu, self._piv), flat, trans=1)
        return out.T.reshape(rows.shape)

    def partition_value(self, rank: int = 1) -> complex:
        return cmath.exp(-0.5 * rank * self.logdet)


def build_block_system(spec: KernelSpec, M: int) -> BlockSystem:
    return BlockSystem(spec, M)


def neumann_solve(system: BlockSystem, rhs: np.ndarray, terms: int = 40) -> np.ndarray:
    """Neumann-series solution; kept as an independent check of the factorisation."""
    out = np.array(rhs, dtype=complex)
    term = np.array(rhs, dtype=complex)
    for _ in range(terms):
        term = system.Atilde @ term
        out = out + term
    return out


def logdet_highprec(params: SchottkyParams, M: int, dps: int = 40, rank: int = 1):
    """log det(I - Ã) for N = 1 in mpmath arithmetic (for error-slope studies below 1e-16)."""
    import mpmath

    with mpmath.workdps(dps):
        idx = params.indices()
        w = {a: mpmath.mpc(params.w(a)) for a in idx}
        sr = {a: mpmath.sqrt(mpmath.mpc(params.rho(a))) for a in idx}
        dim = len(idx) * (M + 1)
        mat = mpmath.eye(dim)
        for ia, a in enumerate(idx):
            for ib, b in enumerate(idx):
                if a == -b:
                    continue
                d = w[-a] - w[b]
                for m in range(M + 1):
                    for n in range(M + 1):
                        val = (-1) ** (m + 1) * math.comb(m + n + 1, m) * sr[a] ** (m + 1) \
                            * sr[b] ** (n + 1) / d ** (m + n + 2)
                        mat[ia * (M + 1) + m, ib * (M + 1) + n] -= val
        return mpmath.log(mpmath.det(mat))


def stable_cutoff(params: SchottkyParams, cutoff: int = 24, tol: float = 1e-9,
                  max_cutoff: int = 768) -> int:
    """Smallest cutoff in the doubling ladder whose weight-one log det moves < tol when doubled."""
    spec = KernelSpec.default(params, 1)
    M = cutoff
    current = BlockSystem(spec, M).logdet
    while 2 * M <= max_cutoff:
        doubled = BlockSystem(spec, 2 * M).logdet
        if abs(doubled - current) < tol:
            return M
        M, current = 2 * M, doubled
    return M
