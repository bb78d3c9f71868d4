"""Schottky groups: Möbius generators and the parameter space they live in."""

from __future__ import annotations

import cmath
import itertools
from dataclasses import dataclass, field
from typing import Iterator, Sequence, Union

import numpy as np

from .errors import (
    DegenerateFixedPoints,
    ImageOutsideParameterSpace,
    InsufficientDistinctPoints,
    MultiplierOutOfRange,
    NoAdmissibleRoot,
)


class _Infinity:
    """The point at infinity of the Riemann sphere."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INF"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()
ExtendedComplex = Union[complex, _Infinity]


def is_infinite(z) -> bool:
    return z is INF


@dataclass(frozen=True)
class MoebiusMap:
    """An element of SL(2, C), normalised so that ad - bc = 1."""

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        a, b, c, d = (complex(v) for v in (self.a, self.b, self.c, self.d))
        det = a * d - b * c
        if det == 0:
            raise ValueError("singular Moebius matrix")
        s = cmath.sqrt(det)
        object.__setattr__(self, "a", a / s)
        object.__setattr__(self, "b", b / s)
        object.__setattr__(self, "c", c / s)
        object.__setattr__(self, "d", d / s)

    @classmethod
    def _raw(cls, a, b, c, d) -> "MoebiusMap":
        # products of normalised matrices are normalised; recomputing the
        # determinant would only add cancellation error
        m = object.__new__(cls)
        for name, v in zip("abcd", (a, b, c, d)):
            object.__setattr__(m, name, complex(v))
        return m

    @staticmethod
    def identity() -> "MoebiusMap":
        return MoebiusMap(1, 0, 0, 1)

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=complex)

    def __matmul__(self, other: "MoebiusMap") -> "MoebiusMap":
        # (self @ other)(z) = self(other(z))
        return MoebiusMap._raw(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "MoebiusMap":
        return MoebiusMap._raw(self.d, -self.b, -self.c, self.a)

    def __call__(self, z: ExtendedComplex) -> ExtendedComplex:
        return moebius_apply(self, z)

    def derivative(self, z: complex) -> complex:
        return 1.0 / (self.c * z + self.d) ** 2

    def close_to(self, other: "MoebiusMap", tol: float = 1e-9) -> bool:
        """Equality in PSL(2, C): matrices agree up to an overall sign."""
        m, n = self.matrix, other.matrix
        return bool(np.max(np.abs(m - n)) < tol or np.max(np.abs(m + n)) < tol)


def moebius_apply(m: MoebiusMap, z: ExtendedComplex) -> ExtendedComplex:
    """Action on the extended plane, with the pole and infinity handled explicitly."""
    if z is INF:
        return INF if m.c == 0 else m.a / m.c
    den = m.c * z + m.d
    if den == 0:
        return INF
    return (m.a * z + m.b) / den


@dataclass(frozen=True)
class SchottkyGenerator:
    """One loxodromic generator, in fixed-point and canonical coordinates.

    ``W_minus`` is the attracting fixed point, ``W_plus`` the repelling one.
    The map is ``z -> w_minus + rho / (z - w_plus)``.
    """

    W_minus: complex
    W_plus: complex
    q: complex
    w_minus: complex
    w_plus: complex
    rho: complex
    sqrt_rho: complex

    @property
    def radius(self) -> float:
        return abs(self.sqrt_rho)

    def moebius(self) -> MoebiusMap:
        wm, wp, r = self.w_minus, self.w_plus, self.rho
        return MoebiusMap(wm, r - wm * wp, 1.0, -wp)

    def with_sqrt_rho(self, sqrt_rho: complex) -> "SchottkyGenerator":
        if abs(sqrt_rho * sqrt_rho - self.rho) > 1e-12 * max(1.0, abs(self.rho)):
            raise ValueError("sqrt_rho does not square to rho")
        return SchottkyGenerator(self.W_minus, self.W_plus, self.q, self.w_minus,
                                 self.w_plus, self.rho, complex(sqrt_rho))


def _canonical_from_fixed(W_minus: complex, W_plus: complex, q: complex):
    w_plus = (W_plus - q * W_minus) / (1 - q)
    w_minus = (W_minus - q * W_plus) / (1 - q)
    rho = -q * (W_minus - W_plus) ** 2 / (1 - q) ** 2
    return w_minus, w_plus, rho


def make_generator(W_minus: complex, W_plus: complex, q: complex) -> SchottkyGenerator:
    W_minus, W_plus, q = complex(W_minus), complex(W_plus), complex(q)
    if W_minus == W_plus:
        raise DegenerateFixedPoints("attracting and repelling fixed points coincide")
    if not 0 < abs(q) < 1:
        raise MultiplierOutOfRange(f"|q| = {abs(q)} is not in (0, 1)")
    w_minus, w_plus, rho = _canonical_from_fixed(W_minus, W_plus, q)
    root = cmath.sqrt(rho)
    return SchottkyGenerator(W_minus, W_plus, q, w_minus, w_plus, root * root, root)


def canonical_to_multiplier(w_minus: complex, w_plus: complex, rho: complex):
    """Invert the (W, q) -> (w, rho) change of coordinates.

    The multiplier solves rho (1 + q)^2 + q (w_minus - w_plus)^2 = 0, whose
    roots are q and 1/q; the root inside the unit disc is returned.
    """
    w_minus, w_plus, rho = complex(w_minus), complex(w_plus), complex(rho)
    if w_minus == w_plus:
        raise DegenerateFixedPoints("canonical centres coincide")
    if rho == 0:
        return w_minus, w_plus, 0j
    dsq = (w_minus - w_plus) ** 2
    # rho q^2 + (2 rho + dsq) q + rho = 0
    bq = 2 * rho + dsq
    disc = cmath.sqrt(bq * bq - 4 * rho * rho)
    roots = [(-bq + disc) / (2 * rho), (-bq - disc) / (2 * rho)]
    # the product of the roots is one; use it to refine the small root
    roots.sort(key=abs)
    q = roots[0]
    if abs(roots[1]) > 0:
        q = 1.0 / roots[1]
    if not abs(q) < 1:
        raise NoAdmissibleRoot("no multiplier root with |q| < 1")
    W_plus = (w_plus + q * w_minus) / (1 + q)
    W_minus = (w_minus + q * w_plus) / (1 + q)
    return W_minus, W_plus, q


def generator_from_canonical(w_minus: complex, w_plus: complex, rho: complex) -> SchottkyGenerator:
    W_minus, W_plus, q = canonical_to_multiplier(w_minus, w_plus, rho)
    if q == 0:
        raise MultiplierOutOfRange("rho = 0 gives a degenerate handle")
    # rho is stored as the square of its root so the two agree exactly
    root = cmath.sqrt(complex(rho))
    return SchottkyGenerator(W_minus, W_plus, q, complex(w_minus), complex(w_plus),
                             root * root, root)


@dataclass(frozen=True)
class ValidationReport:
    passed: bool
    pairs: tuple  # (a, b, margin, ok) over signed indices a < b in index order
    min_margin: float

    def failures(self):
        return [p for p in self.pairs if not p[3]]


@dataclass(frozen=True)
class SchottkyParams:
    """A genus g Schottky uniformisation. Signed index a in {+-1, ..., +-g}."""

    generators: tuple

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        if not self.generators:
            raise ValueError("at least one generator is required")

    @property
    def genus(self) -> int:
        return len(self.generators)

    def indices(self) -> list:
        """Signed indices in the fixed order 1, -1, 2, -2, ..."""
        out = []
        for a in range(1, self.genus + 1):
            out += [a, -a]
        return out

    def gen(self, a: int) -> SchottkyGenerator:
        return self.generators[abs(a) - 1]

    def w(self, a: int) -> complex:
        g = self.gen(a)
        return g.w_plus if a > 0 else g.w_minus

    def W(self, a: int) -> complex:
        g = self.gen(a)
        return g.W_plus if a > 0 else g.W_minus

    def rho(self, a: int) -> complex:
        return self.gen(a).rho

    def sqrt_rho(self, a: int) -> complex:
        return self.gen(a).sqrt_rho

    def radius(self, a: int) -> float:
        return abs(self.gen(a).sqrt_rho)

    def gamma(self, a: int) -> MoebiusMap:
        m = self.gen(a).moebius()
        return m if a > 0 else m.inverse()

    def replace(self, a: int, generator: SchottkyGenerator) -> "SchottkyParams":
        gens = list(self.generators)
        gens[abs(a) - 1] = generator
        return SchottkyParams(tuple(gens))

    def with_canonical(self, a: int, w_plus=None, w_minus=None, rho=None) -> "SchottkyParams":
        """Replace the canonical coordinates of handle |a|; sqrt_rho is principal."""
        g = self.gen(a)
        new = generator_from_canonical(
            g.w_minus if w_minus is None else w_minus,
            g.w_plus if w_plus is None else w_plus,
            g.rho if rho is None else rho,
        )
        return self.replace(a, new)

    def flip_sqrt_rho(self, a: int) -> "SchottkyParams":
        g = self.gen(a)
        return self.replace(a, g.with_sqrt_rho(-g.sqrt_rho))

    def centres(self) -> np.ndarray:
        return np.array([self.w(a) for a in self.indices()])

    def radii(self) -> np.ndarray:
        return np.array([self.radius(a) for a in self.indices()])

    def in_domain(self, z: complex, margin: float = 0.0) -> bool:
        """True if z lies outside every closed disc (enlarged by ``margin``)."""
        return bool(np.all(np.abs(z - self.centres()) > self.radii() + margin))


def params_from_canonical(triples: Sequence) -> SchottkyParams:
    """Build params from (w_plus, w_minus, rho) triples, one per handle."""
    return SchottkyParams(tuple(generator_from_canonical(wm, wp, r) for wp, wm, r in triples))


def validate(params: SchottkyParams) -> ValidationReport:
    idx = params.indices()
    pairs = []
    for a, b in itertools.combinations(idx, 2):
        margin = abs(params.w(a) - params.w(b)) - params.radius(a) - params.radius(b)
        pairs.append((a, b, margin, margin > 0))
    min_margin = min(p[2] for p in pairs)
    return ValidationReport(all(p[3] for p in pairs), tuple(pairs), min_margin)


@dataclass(frozen=True)
class GroupWord:
    letters: tuple
    map: MoebiusMap = field(compare=False)


def enumerate_words(params: SchottkyParams, depth: int) -> list:
    """All reduced words of length <= depth, ordered by length then letter order."""
    if depth < 0:
        raise ValueError("depth must be non-negative")
    letters = params.indices()
    gammas = {a: params.gamma(a) for a in letters}
    level = [GroupWord((), MoebiusMap.identity())]
    out = list(level)
    for _ in range(depth):
        nxt = []
        for word in level:
            for a in letters:
                if word.letters and word.letters[-1] == -a:
                    continue
                nxt.append(GroupWord(word.letters + (a,), word.map @ gammas[a]))
        out += nxt
        level = nxt
    return out


def transform_canonical(gamma: MoebiusMap, w_a: complex, w_ma: complex, rho: complex):
    """Image of (w_a, rho_a) under a Möbius map, given the partner centre w_{-a}."""
    A, B, C, D = gamma.a, gamma.b, gamma.c, gamma.d
    den = (C * w_a + D) * (C * w_ma + D) - rho * C * C
    w_new = ((A * w_a + B) * (C * w_ma + D) - rho * A * C) / den
    rho_new = rho / den ** 2
    return w_new, rho_new


def act_on_params(gamma: MoebiusMap, params: SchottkyParams) -> SchottkyParams:
    gens = []
    for a in range(1, params.genus + 1):
        wp, rho = transform_canonical(gamma, params.w(a), params.w(-a), params.rho(a))
        wm, _ = transform_canonical(gamma, params.w(-a), params.w(a), params.rho(a))
        try:
            gens.append(generator_from_canonical(wm, wp, rho))
        except Exception as exc:  # degenerate image
            raise ImageOutsideParameterSpace(str(exc)) from exc
    image = SchottkyParams(tuple(gens))
    report = validate(image)
    if not report.passed:
        raise ImageOutsideParameterSpace(f"disc condition fails: {report.failures()}")
    return image


def _domain_candidates(params: SchottkyParams, n: int = 41) -> Iterator[complex]:
    c, r = params.centres(), params.radii()
    lo_x, hi_x = np.min(c.real - r), np.max(c.real + r)
    lo_y, hi_y = np.min(c.imag - r), np.max(c.imag + r)
    pad = max(1.0, 0.5 * max(hi_x - lo_x, hi_y - lo_y))
    xs = np.linspace(lo_x - pad, hi_x + pad, n)
    ys = np.linspace(lo_y - pad, hi_y + pad, n)
    for y in ys:
        for x in xs:
            yield complex(x, y)


def _best_domain_point(params: SchottkyParams, avoid=()) -> complex:
    c, r = params.centres(), params.radii()
    best, best_score = None, -np.inf
    for z in _domain_candidates(params):
        score = np.min(np.abs(z - c) - r)
        for p in avoid:
            score = min(score, abs(z - p))
        if score > best_score + 1e-12:
            best, best_score = z, score
    return best


def select_basepoints(params: SchottkyParams, N: int, genus1_extension: bool = False) -> tuple:
    """Deterministic choice of the 2N-1 kernel basepoints.

    Points are picked greedily from a grid on the fundamental domain, each
    maximising its distance to the discs and to the points already chosen.
    Basepoints inside a disc make the moment expansions diverge.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    if N >= 2 and params.genus < 2 and not genus1_extension:
        raise InsufficientDistinctPoints("N >= 2 needs genus >= 2 (or the genus-one extension)")
    pts: list = []
    for _ in range(2 * N - 1):
        z = _best_domain_point(params, avoid=pts)
        if z is None or any(abs(z - p) < 1e-8 for p in pts):
            raise InsufficientDistinctPoints(f"found {len(pts)} of {2 * N - 1} basepoints")
        pts.append(z)
    return tuple(pts)


def alternative_basepoints(params: SchottkyParams, N: int, genus1_extension: bool = False) -> tuple:
    """A second admissible basepoint set, disjoint from the default one."""
    primary = list(select_basepoints(params, N, genus1_extension))
    pts: list = []
    for _ in range(2 * N - 1):
        pts.append(_best_domain_point(params, avoid=primary + pts))
    return tuple(pts)


def sample_domain_points(params: SchottkyParams, n: int, seed: int = 0, margin: float = 0.5,
                         avoid=(), spread: float = 1.0) -> list:
    """n reproducible random points of the fundamental domain.

    Each point keeps ``margin`` disc radii away from every disc and from ``avoid``.
    """
    rng = np.random.default_rng(seed)
    c, r = params.centres(), params.radii()
    lo = complex(np.min(c.real - r), np.min(c.imag - r)) - spread * (1 + 1j)
    hi = complex(np.max(c.real + r), np.max(c.imag + r)) + spread * (1 + 1j)
    gap = margin * float(np.max(r))
    out: list = []
    while len(out) < n:
        z = complex(rng.uniform(lo.real, hi.real), rng.uniform(lo.imag, hi.imag))
        if np.all(np.abs(z - c) > (1 + margin) * r) and \
                all(abs(z - p) > gap for p in list(avoid) + out):
            out.append(z)
    return out
