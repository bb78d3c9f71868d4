"""Rank-one Heisenberg algebra: genus-zero Wick correlators and their sewn higher-genus counterparts."""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import (
    CapExceeded,
    ChargeNotNeutral,
    CoincidentPoints,
    NonConvergentTheta,
    UnsupportedChargeCount,
)
from .forms import FormValue, QuasiformEvaluator
from .report import Report
from .schottky import SchottkyParams

BRUTE_FORCE_CAP = 200_000
GRAM_CAP = 10


# ---------------------------------------------------------------- states

@dataclass(frozen=True)
class HeisenbergState:
    """prod_i h(-n_i) e^charge: oscillator modes (positive integers) on a charge-alpha vacuum."""

    modes: tuple = ()
    charge: complex = 0

    def __post_init__(self):
        modes = tuple(sorted((int(n) for n in self.modes), reverse=True))
        if any(n <= 0 for n in modes):
            raise ValueError("oscillator modes must be positive")
        object.__setattr__(self, "modes", modes)

    @property
    def weight(self):
        return sum(self.modes) + self.charge ** 2 / 2


@dataclass(frozen=True)
class HeisenbergInsertion:
    state: HeisenbergState
    point: complex


def h_at(x) -> HeisenbergInsertion:
    """The weight-one current h = h(-1) vacuum at x."""
    return HeisenbergInsertion(HeisenbergState((1,)), x)


def charge_at(alpha, z) -> HeisenbergInsertion:
    return HeisenbergInsertion(HeisenbergState((), alpha), z)


def partitions(k: int) -> list:
    """Partitions of k as descending tuples, in reverse lexicographic order."""
    out = []

    def rec(rest, largest, acc):
        if rest == 0:
            out.append(tuple(acc))
            return
        for part in range(min(rest, largest), 0, -1):
            rec(rest - part, part, acc + [part])

    rec(k, k, [])
    return out


# Fock vectors are dicts {descending mode tuple: coefficient}; the charge rides along separately.

def apply_mode(n: int, vec: dict, charge=0) -> dict:
    """Action of h(n) on a Fock vector with vacuum charge `charge`."""
    out: dict = {}
    if n < 0:
        for modes, c in vec.items():
            key = tuple(sorted(modes + (-n,), reverse=True))
            out[key] = out.get(key, 0) + c
    elif n == 0:
        if charge != 0:
            out = {k: charge * c for k, c in vec.items()}
    else:
        for modes, c in vec.items():
            cnt = modes.count(n)
            if cnt:
                lst = list(modes)
                lst.remove(n)
                key = tuple(lst)
                out[key] = out.get(key, 0) + n * cnt * c
    return {k: c for k, c in out.items() if c != 0}


def li_zamolodchikov_pairing(left: tuple, right: tuple) -> int:
    """<prod h(-m) 1, prod h(-n) 1> with the adjoint h(n)^dagger = -h(-n), by mode algebra."""
    vec = {tuple(right): 1}
    # adjoint of h(-m_1)...h(-m_k) is (-1)^k h(m_k)...h(m_1); apply h(m_1) last
    for m in left:
        vec = apply_mode(m, vec)
        if not vec:
            return 0
    return (-1) ** len(left) * vec.get((), 0)


def gram_dual(k: int, cap: int = GRAM_CAP):
    """Weight-k basis (mode partitions), its Li-Z Gram matrix and the inverse."""
    if k > cap:
        raise CapExceeded(f"Gram matrix requested at weight {k} > cap {cap}")
    basis = partitions(k)
    G = np.array([[li_zamolodchikov_pairing(b, c) for c in basis] for b in basis], dtype=float)
    return basis, G, np.linalg.inv(G)


@lru_cache(maxsize=None)
def _dual_table(k: int):
    """For each weight-k basis state, the nonzero dual expansion [(partition, coefficient)]."""
    basis, _, Ginv = gram_dual(k, cap=max(k, GRAM_CAP))
    table = []
    for ib, b in enumerate(basis):
        table.append((b, [(basis[ic], float(Ginv[ic, ib])) for ic in range(len(basis))
                          if Ginv[ic, ib] != 0]))
    return table


# ---------------------------------------------------------------- genus zero correlators

def _is_mp(z) -> bool:
    return type(z).__module__.startswith("mpmath")


def _power(base, expo):
    """base**expo with exact integer powers and the principal branch otherwise."""
    e = complex(expo)
    if abs(e.imag) < 1e-14 and abs(e.real - round(e.real)) < 1e-12:
        return base ** int(round(e.real))
    if _is_mp(base):
        import mpmath
        return mpmath.power(base, expo)
    return complex(base) ** e


def _leg_pair(m: int, n: int, d):
    """D_x^(m-1) D_y^(n-1) (x-y)^-2 with d = x - y."""
    c = math.factorial(m + n - 1) // (math.factorial(m - 1) * math.factorial(n - 1))
    return (-1) ** (m - 1) * c / d ** (m + n)


def _leg_charge(m: int, d):
    """D_x^(m-1) of 1/(x-z) with d = x - z."""
    return (-1) ** (m - 1) / d ** m


def _matching_sum(mult: tuple, owner: tuple, pair_w, sink_w):
    """Sum over partial matchings of typed legs; unmatched legs go to the charge sink.

    mult[t] legs of type t; legs of the same owner never pair.  Each edge class between
    types t < u with e legs carries pair_w[t][u]^e / e!, sink edges sink_w[t]^e / e!;
    the full sum is that times prod mult[t]!.
    """
    T = len(mult)

    @lru_cache(maxsize=None)
    def f(rem: tuple):
        t = next((i for i in range(T) if rem[i]), None)
        if t is None:
            return 1
        partners = [u for u in range(t + 1, T) if rem[u] and owner[u] != owner[t]]
        total = 0

        def spread(idx, left, rem_list, weight):
            nonlocal total
            if idx == len(partners):
                if left and sink_w[t] == 0:
                    return
                w = weight * sink_w[t] ** left / math.factorial(left) if left else weight
                rem_list[t] = 0
                total += w * f(tuple(rem_list))
                rem_list[t] = rem[t]
                return
            u = partners[idx]
            for e in range(min(left, rem_list[u]) + 1):
                rem_list[u] -= e
                w = weight * pair_w[t][u] ** e / math.factorial(e) if e else weight
                spread(idx + 1, left - e, rem_list, w)
                rem_list[u] += e

        spread(0, rem[t], list(rem), 1)
        return total

    scale = 1
    for m in mult:
        scale *= math.factorial(m)
    return scale * f(tuple(mult))


def wick_correlator(insertions) -> complex:
    """Genus-zero correlator of Heisenberg states by exhaustive Wick matching."""
    ins = list(insertions)
    charges = [s.state.charge for s in ins]
    if abs(complex(sum(charges))) > 1e-12:
        raise ChargeNotNeutral(f"total charge {sum(charges)} != 0")
    pts = [s.point for s in ins]
    for i in range(len(pts)):
        for j in range(i):
            if pts[i] == pts[j]:
                raise CoincidentPoints(f"insertions {j} and {i} coincide")

    factor = 1
    for i in range(len(ins)):
        for j in range(i + 1, len(ins)):
            ab = charges[i] * charges[j]
            if ab != 0:
                factor = factor * _power(pts[i] - pts[j], ab)

    types, mult, owner = [], [], []
    for k, s in enumerate(ins):
        for m in sorted(set(s.state.modes)):
            types.append((k, m))
            mult.append(s.state.modes.count(m))
            owner.append(k)
    if not types:
        return factor
    pair_w = [[0] * len(types) for _ in types]
    sink_w = []
    for t, (k, m) in enumerate(types):
        for u, (l, n) in enumerate(types):
            if k != l:
                pair_w[t][u] = _leg_pair(m, n, pts[k] - pts[l])
        sink_w.append(sum(charges[j] * _leg_charge(m, pts[k] - pts[j])
                          for j in range(len(ins)) if j != k and charges[j] != 0))
    return factor * _matching_sum(tuple(mult), tuple(owner), pair_w, sink_w)


def _vec_correlator(vectors) -> complex:
    """Correlator of (Fock vector, charge, point) triples, expanded by linearity."""
    total = 0
    keys = [list(v.items()) for v, _, _ in vectors]
    for combo in itertools.product(*keys):
        coeff = 1
        ins = []
        for (modes, c), (_, charge, z) in zip(combo, vectors):
            coeff *= c
            ins.append(HeisenbergInsertion(HeisenbergState(modes, charge), z))
        total += coeff * wick_correlator(ins)
    return total


# ---------------------------------------------------------------- genus g partition functions

def partition_det(ev: QuasiformEvaluator, rank: int = 1) -> complex:
    """Z_M = det(I - Ã)^(-1/2) from the weight-one block system (times rank for M^r)."""
    return ev.system(1).partition_value(rank)


def _charged_pairing_sign(alpha) -> int:
    half = complex(alpha) ** 2 / 2
    if abs(half.imag) > 1e-12 or abs(half.real - round(half.real)) > 1e-12:
        raise ValueError("brute-force loop charges need integer alpha^2/2")
    return (-1) ** int(round(half.real))


def _sewing_terms(params: SchottkyParams, K: int, loop_charges, mp: bool):
    """Yield (weight factor, [insertions at w_1, w_-1, ..., w_g, w_-g]) over all g-tuples."""
    g = params.genus
    alphas = list(loop_charges) if loop_charges is not None else [0] * g
    per_handle = []
    for a in range(1, g + 1):
        alpha = alphas[a - 1]
        if mp:
            import mpmath
            wa, wma, rho = (mpmath.mpc(params.w(a)), mpmath.mpc(params.w(-a)),
                            mpmath.mpc(params.rho(a)))
        else:
            wa, wma, rho = params.w(a), params.w(-a), params.rho(a)
        # the handle carries charge alpha: -alpha sits at w_a, its dual +alpha at w_-a
        sign = _charged_pairing_sign(alpha) if alpha else 1
        half = int(round((complex(alpha) ** 2 / 2).real)) if alpha else 0
        opts = []
        for k in range(K + 1):
            for b, dual in _dual_table(k):
                weight = sign * rho ** (k + half)
                left = ({b: 1}, -alpha, wa)
                right = ({d: c for d, c in dual}, alpha, wma)
                opts.append((weight, left, right))
        per_handle.append(opts)
    count = 1
    for opts in per_handle:
        count *= len(opts)
    if count > BRUTE_FORCE_CAP:
        raise CapExceeded(f"{count} basis tuples exceed the cap {BRUTE_FORCE_CAP}")
    for combo in itertools.product(*per_handle):
        weight = 1
        vecs = []
        for wgt, left, right in combo:
            weight = weight * wgt
            vecs += [left, right]
        yield weight, vecs


def _insertion_vectors(insertions, mp: bool):
    out = []
    for s in insertions:
        z = s.point
        if mp:
            import mpmath
            z = mpmath.mpc(z)
        out.append(({s.state.modes: 1}, s.state.charge, z))
    return out


def partition_bruteforce(params: SchottkyParams, K: int, insertions=(), loop_charges=None,
                         dps: int | None = None) -> complex:
    """Sum over g-tuples of basis states of weight <= K of sewn genus-zero correlators.

    With `insertions` this is the brute-force n-point function.  `loop_charges` fixes the
    module carried around each handle (alpha_a^2/2 must be an integer here).  `dps`
    switches to mpmath arithmetic at that precision.
    """
    if K > 8:
        raise CapExceeded("brute force is limited to K <= 8")
    if dps:
        import mpmath
        with mpmath.workdps(dps):
            extra = _insertion_vectors(insertions, True)
            total = mpmath.mpc(0)
            for weight, vecs in _sewing_terms(params, K, loop_charges, True):
                total += weight * _vec_correlator(vecs + extra)
            return total
    extra = _insertion_vectors(insertions, False)
    terms = [weight * _vec_correlator(vecs + extra)
             for weight, vecs in _sewing_terms(params, K, loop_charges, False)]
    return complex(math.fsum(t.real for t in map(complex, terms))
                   + 1j * math.fsum(t.imag for t in map(complex, terms)))


# ---------------------------------------------------------------- n-point functions

@lru_cache(maxsize=None)
def involutions(n: int) -> tuple:
    """All involutions of {0..n-1}: each is (fixed points, transpositions)."""
    if n > 12:
        raise CapExceeded("involutions enumerated only for n <= 12")
    if n == 0:
        return (((), ()),)
    out = []
    for fixed, pairs in involutions(n - 1):
        out.append((fixed + (n - 1,), pairs))
    for partner in range(n - 1):
        rest = [i for i in range(n - 1) if i != partner]
        for fixed, pairs in involutions(n - 2):
            out.append((tuple(rest[i] for i in fixed),
                        tuple((rest[i], rest[j]) for i, j in pairs) + ((partner, n - 1),)))
    return tuple(out)


def involution_count(n: int) -> int:
    a, b = 1, 1
    for k in range(2, n + 1):
        a, b = b, b + (k - 1) * a
    return b if n else 1


def charge_form(ev: QuasiformEvaluator, x, charges=(), loop_charges=None):
    """nu_{alpha,gamma}(x): sum alpha_a nu_a(x) + sum gamma_j omega_{z_j - z_0}(x), z_0 = z_1."""
    val = 0j
    if loop_charges is not None:
        for a, alpha in enumerate(loop_charges, start=1):
            if alpha:
                val += alpha * complex(ev.nu_value(a, x))
    if charges:
        z0 = charges[0][1]
        for gamma, z in charges[1:]:
            if gamma:
                val += gamma * complex(ev.omega_third_value(z, z0, x))
    return val


def symmetrised_product(ev: QuasiformEvaluator, points, nu_values) -> complex:
    """Sum over involutions of prod omega(pairs) * prod nu(fixed points)."""
    n = len(points)
    om = {}
    for i in range(n):
        for j in range(i + 1, n):
            om[i, j] = om[j, i] = complex(ev.omega_value(points[i], points[j]))
    total = 0j
    for fixed, pairs in involutions(n):
        term = 1 + 0j
        for i in fixed:
            term *= nu_values[i]
        for i, j in pairs:
            term *= om[i, j]
        total += term
    return total


def twisted_factor(ev: QuasiformEvaluator, charges=(), loop_charges=None) -> complex:
    """The charged partition factor for zero or two nonzero charges."""
    g = ev.genus
    alpha = np.zeros(g, dtype=complex) if loop_charges is None else np.asarray(loop_charges, complex)
    nonzero = [(gm, z) for gm, z in charges if gm != 0]
    if len(nonzero) not in (0, 2):
        raise UnsupportedChargeCount("only zero or two nonzero charges are supported")
    if abs(sum(gm for gm, _ in charges)) > 1e-12:
        raise ChargeNotNeutral("charges must sum to zero")
    Om = ev.period_matrix()
    val = cmath.exp(1j * math.pi * (alpha @ Om @ alpha)) * partition_det(ev)
    if nonzero:
        (gamma, z1), (_, z2) = nonzero
        E = ev.prime_form_value(z1, z2)
        jac = ev.nu_integral(z2, z1)
        val *= _power(E, -gamma ** 2) * cmath.exp(gamma * (alpha @ jac))
    return val


def npoint(ev: QuasiformEvaluator, h_points=(), charges=(), loop_charges=None) -> FormValue:
    """n-point function of h insertions with charges [(gamma_j, z_j)] and handle charges alpha."""
    if abs(sum(gm for gm, _ in charges)) > 1e-12:
        raise ChargeNotNeutral("charges must sum to zero")
    nus = [charge_form(ev, x, charges, loop_charges) for x in h_points]
    sym = symmetrised_product(ev, list(h_points), nus)
    weights = tuple(("x%d" % i, 1) for i in range(len(h_points)))
    weights += tuple(("z%d" % j, gm ** 2 / 2) for j, (gm, _) in enumerate(charges))
    return FormValue(sym * twisted_factor(ev, charges, loop_charges), weights)


# ---------------------------------------------------------------- lattices

@dataclass(frozen=True)
class LatticeSpec:
    gram: tuple
    radius: float = 6.0
    rank: int = field(init=False)

    def __post_init__(self):
        G = np.atleast_2d(np.asarray(self.gram, dtype=float))
        if G.shape[0] != G.shape[1] or not np.allclose(G, G.T):
            raise ValueError("lattice Gram matrix must be square and symmetric")
        try:
            np.linalg.cholesky(G)
        except np.linalg.LinAlgError as exc:
            raise ValueError("lattice Gram matrix must be positive definite") from exc
        object.__setattr__(self, "gram", tuple(map(tuple, G)))
        object.__setattr__(self, "rank", G.shape[0])

    @property
    def matrix(self) -> np.ndarray:
        return np.asarray(self.gram, dtype=float)


@dataclass(frozen=True)
class ThetaValue:
    value: complex
    tail_estimate: float
    terms: int


def siegel_theta(Omega: np.ndarray, lattice: LatticeSpec, radius: float | None = None) -> ThetaValue:
    """sum over lambda in L^g with sum_a |lambda_a|^2 <= radius^2 of exp(i pi lambda.Omega.lambda)."""
    R = lattice.radius if radius is None else radius
    Om = np.atleast_2d(np.asarray(Omega, dtype=complex))
    g, G = Om.shape[0], lattice.matrix
    r = lattice.rank
    mu = float(np.min(np.linalg.eigvalsh((Om.imag + Om.imag.T) / 2)))
    if mu <= 0:
        raise NonConvergentTheta(f"Im(Omega) not positive definite (min eigenvalue {mu:.3g})")
    # enumerate well past R so the shell beyond R gives the tail estimate
    R_out = max(2 * R, R + 4.0)
    bound = np.floor(R_out * np.sqrt(np.diag(np.linalg.inv(G)))).astype(int)
    ranges = [range(-b, b + 1) for b in bound] * g
    inner = 0j
    tail = 0.0
    shells = {}
    count = 0
    for vec in itertools.product(*ranges):
        lam = np.asarray(vec, dtype=float).reshape(g, r)
        norms = lam @ G @ lam.T
        nsq = float(np.trace(norms))
        if nsq > R_out ** 2:
            continue
        term = cmath.exp(1j * math.pi * np.sum(Om * norms))
        if nsq <= R ** 2 + 1e-9:
            inner += term
            count += 1
        else:
            tail += abs(term)
        shell = int(math.sqrt(nsq))
        shells[shell] = max(shells.get(shell, 0.0), abs(term))
    peaks = [shells[k] for k in sorted(shells)]
    if len(peaks) > 2 and not peaks[-1] <= peaks[1]:
        raise NonConvergentTheta("theta summands do not decay with the lattice radius")
    # beyond R_out: Gaussian bound exp(-pi mu t) summed against a generous point count
    far = sum((2 * math.sqrt(t) + 1) ** (r * g) * math.exp(-math.pi * mu * t)
              for t in range(int(R_out ** 2) + 1, int(R_out ** 2) + 400))
    return ThetaValue(inner, tail + far, count)


def lattice_partition(ev: QuasiformEvaluator, lattice: LatticeSpec) -> complex:
    """Z_{V_L} = Theta_L(Omega) Z_M^rank."""
    theta = siegel_theta(ev.period_matrix(), lattice)
    return theta.value * partition_det(ev, lattice.rank)


# ---------------------------------------------------------------- Zhu recursion checks

def _h_mode_on_state(j: int, state: HeisenbergState) -> dict:
    return apply_mode(j, {state.modes: 1}, state.charge)


def zhu_genus0_rhs(x, insertions, f0=None) -> complex:
    """Right side of the weight-one genus-zero recursion for h at x.

    pi_1(x, y) = 1/(x - y) + f0(x); the j-th y-derivative enters with h(j) acting on
    the k-th state.
    """
    ins = list(insertions)
    total = 0
    for k, s in enumerate(ins):
        top = sum(s.state.modes) + 1
        for j in range(0, top + 1):
            vec = _h_mode_on_state(j, s.state)
            if not vec:
                continue
            d = x - s.point
            coeff = 1 / d ** (j + 1)
            if j == 0 and f0 is not None:
                coeff = coeff + f0(x)
            others = [({o.state.modes: 1}, o.state.charge, o.point) for o in ins]
            others[k] = (vec, s.state.charge, s.point)
            total += coeff * _vec_correlator(others)
    return total


def zhu_genus0_mode_rhs(i: int, insertions, f0=None, f0_deriv=None) -> complex:
    """Right side of the second genus-zero recursion: h(-i-1) acting on the first state."""
    ins = list(insertions)
    y1 = ins[0].point
    total = 0
    # e_i^j(y) = f0^(i)(y) delta_{j0} at weight one
    if f0 is not None:
        vec = _h_mode_on_state(0, ins[0].state)
        if vec:
            others = [({o.state.modes: 1}, o.state.charge, o.point) for o in ins]
            others[0] = (vec, ins[0].state.charge, y1)
            total += f0_deriv(y1, i) * _vec_correlator(others)
    for k in range(1, len(ins)):
        s = ins[k]
        for j in range(0, sum(s.state.modes) + 2):
            vec = _h_mode_on_state(j, s.state)
            if not vec:
                continue
            d = y1 - s.point
            coeff = (-1) ** i * math.comb(i + j, i) / d ** (1 + i + j)
            if j == 0 and f0 is not None:
                coeff = coeff + f0_deriv(y1, i)
            others = [({o.state.modes: 1}, o.state.charge, o.point) for o in ins]
            others[k] = (vec, s.state.charge, s.point)
            total += coeff * _vec_correlator(others)
    return total


def _random_states(rng, n: int, max_weight: int = 3, charged: bool = True):
    states = []
    for _ in range(n):
        k = int(rng.integers(0, max_weight + 1))
        parts = partitions(k)
        states.append(tuple(parts[int(rng.integers(len(parts)))]))
    charges = [0.0] * n
    if charged and n >= 2:
        gamma = float(rng.choice([0.5, 1.0, math.sqrt(2.0)]))
        charges[0], charges[1] = gamma, -gamma
    return states, charges


def verify_zhu_genus0(config: dict | None = None) -> Report:
    """Weight-one genus-zero recursions against direct Wick correlators."""
    cfg = {"seed": 5, "trials": 8, "max_points": 5, "tol": 1e-12}
    cfg.update(config or {})
    rng = np.random.default_rng(cfg["seed"])
    rep = Report()
    # two choices of the regular part: zero and a simple pole away from the points
    choices = {"f=0": (None, None),
               "f=1/(x-c)": (lambda x: 1 / (x - 7.5j),
                             lambda y, i: (-1) ** i / (y - 7.5j) ** (i + 1))}
    worst = {name: 0.0 for name in choices}
    worst_ii = {name: 0.0 for name in choices}
    spread = 0.0
    for trial in range(cfg["trials"]):
        # cycle through insertion counts so every correlator size is exercised
        n = 1 + trial % cfg["max_points"]
        modes, charges = _random_states(rng, n)
        pts = [complex(*rng.uniform(-2, 2, 2)) for _ in range(n)]
        ins = [HeisenbergInsertion(HeisenbergState(m, c), z) for m, c, z in zip(modes, charges, pts)]
        x = complex(*rng.uniform(-2, 2, 2)) + 3
        lhs = wick_correlator([h_at(x)] + ins)
        scale = max(1.0, abs(lhs))
        rhs_vals = {}
        for name, (f0, f0d) in choices.items():
            rhs = zhu_genus0_rhs(x, ins, f0)
            rhs_vals[name] = rhs
            worst[name] = max(worst[name], abs(lhs - rhs) / scale)
            for i in range(3):
                lhs_ii = _vec_correlator([(_h_mode_on_state(-i - 1, ins[0].state), ins[0].state.charge,
                                           ins[0].point)]
                                         + [({o.state.modes: 1}, o.state.charge, o.point) for o in ins[1:]])
                rhs_ii = zhu_genus0_mode_rhs(i, ins, f0, f0d)
                worst_ii[name] = max(worst_ii[name], abs(lhs_ii - rhs_ii) / max(1.0, abs(lhs_ii)))
        vals = list(rhs_vals.values())
        spread = max(spread, abs(vals[0] - vals[1]) / scale)
    for name in choices:
        rep.add(f"current recursion ({name})", worst[name], cfg["tol"])
        rep.add(f"mode recursion ({name})", worst_ii[name], cfg["tol"])
    rep.add("recursion independent of regular part", spread, cfg["tol"])
    return rep


def verify_zhu_genusg(ev: QuasiformEvaluator, config: dict | None = None) -> Report:
    """Genus-g recursion for h: quasiform assemblies against brute-force sewing sums."""
    cfg = {"K": 5, "tol": 1e-6, "gamma": math.sqrt(2.0), "loop_charge": math.sqrt(2.0),
           "x": None, "seed": 13}
    cfg.update(config or {})
    from .schottky import sample_domain_points
    params = ev.params
    K = cfg["K"]
    pts = sample_domain_points(params, 4, seed=cfg["seed"], avoid=ev.basepoints(1))
    x1, x2, z1, z2 = pts
    gamma = cfg["gamma"]
    rep = Report()

    Z = partition_bruteforce(params, K)
    two = partition_bruteforce(params, K, [h_at(x1), h_at(x2)])
    lhs = complex(ev.psi_value(1, 0, 1, x1, x2)) * Z
    rep.add("two-point h h", abs(two - lhs) / abs(two), cfg["tol"])

    pair = [charge_at(gamma, z1), charge_at(-gamma, z2)]
    F0 = partition_bruteforce(params, K, pair)
    F1 = partition_bruteforce(params, K, [h_at(x1)] + pair)
    psi = gamma * (complex(ev.psi_value(1, 0, 0, x1, z1)) - complex(ev.psi_value(1, 0, 0, x1, z2)))
    rep.add("one-point h with a charge pair", abs(F1 - psi * F0) / abs(F1), cfg["tol"])

    alpha = [0.0] * ev.genus
    alpha[0] = cfg["loop_charge"]
    Fa = partition_bruteforce(params, K, loop_charges=alpha)
    Fa1 = partition_bruteforce(params, K, [h_at(x1)], loop_charges=alpha)
    theta_term = sum(-alpha[a - 1] * complex(ev.theta_value(1, a, 0, x1)) for a in range(1, ev.genus + 1))
    rep.add("one-point h with a charged handle", abs(Fa1 - theta_term * Fa) / abs(Fa1), cfg["tol"])

    rep.add("charged partition vs twisted factor",
            abs(Fa / twisted_factor(ev, (), alpha) - 1), cfg["tol"])

    both = [(gamma, z1), (-gamma, z2)]
    Fab = partition_bruteforce(params, K, pair, loop_charges=alpha)
    rep.add("charge pair on a charged handle vs twisted factor",
            abs(Fab / twisted_factor(ev, both, alpha) - 1), cfg["tol"])
    return rep
