"""Classical dynamics of hyperbolic torus maps.

Exact integer arithmetic throughout: matrix powers use Python integers,
periodic points live on rational lattices and are iterated mod l.  Floating
point enters only in the derived hyperbolic data (Lyapunov exponent, axis
angles, squeeze parameter) and in measure evaluations.
"""

from __future__ import annotations

import math
import cmath
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Sequence, Tuple

import numpy as np

from .errors import EnumerationTooLarge, NotHyperbolic, NotUnimodular

__all__ = [
    "CatMap",
    "RationalPoint",
    "Orbit",
    "validate_cat_map",
    "decompose_hyperbolic",
    "fixed_point_count",
    "enumerate_prime_orbits",
    "delta_measure_integrate",
    "orbit_fourier_coefficient",
    "best_orbit_for_measure",
    "rotation_matrix",
    "boost_matrix",
]

# Lattice guard: enumerating L_l scans l^2 points; l <= 10^4 keeps runs
# under a minute on one core.
DEFAULT_LATTICE_GUARD = 10_000


def rotation_matrix(phi: float) -> np.ndarray:
    """Rotation by angle phi, [[cos, -sin], [sin, cos]]."""
    c, s = math.cos(phi), math.sin(phi)
    return np.array([[c, -s], [s, c]])


def boost_matrix(mu: float) -> np.ndarray:
    """Hyperbolic boost [[cosh, sinh], [sinh, cosh]] with axes at +-pi/4."""
    ch, sh = math.cosh(mu), math.sinh(mu)
    return np.array([[ch, sh], [sh, ch]])


@dataclass(frozen=True)
class CatMap:
    """An integer unimodular hyperbolic matrix with derived hyperbolic data.

    Attributes
    ----------
    a, b, c, d : int
        Matrix entries, row major; a*d - b*c == 1 and a + d > 2.
    lyapunov : float
        lambda > 0 with e^lambda + e^-lambda = a + d.
    unstable_angle, stable_angle : float
        Angles of the expanding/contracting eigenlines.  The unstable
        angle lies in (-pi/2, pi/2]; the stable angle equals it plus the
        line-to-line angle in (0, pi).
    b1, b2 : float
        Frame parameters: the matrix equals R(b1) B(b2) D(lambda)
        B(b2)^-1 R(b1)^-1, with b1 in (-pi/2, pi/2].
    squeeze : complex
        -b2 * exp(-2i b1); selects the analyzing coherent state adapted
        to this map.
    """

    a: int
    b: int
    c: int
    d: int
    lyapunov: float
    unstable_angle: float
    stable_angle: float
    b1: float
    b2: float
    squeeze: complex

    @property
    def trace(self) -> int:
        return self.a + self.d

    @property
    def entries(self) -> Tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    def as_array(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=float)

    def frame_matrix(self) -> np.ndarray:
        """Q = R(b1) B(b2), mapping the (q, p) frame to the eigenframe."""
        return rotation_matrix(self.b1) @ boost_matrix(self.b2)

    def matrix_power(self, t: int) -> Tuple[int, int, int, int]:
        """Exact integer entries of M^t (t may be negative)."""
        return _int_power(self.entries, t)

    def apply(self, point: "RationalPoint", t: int = 1) -> "RationalPoint":
        """M^t x on the torus, exactly."""
        a, b, c, d = self.matrix_power(t)
        j, k, l = point.j, point.k, point.l
        return RationalPoint((a * j + b * k) % l, (c * j + d * k) % l, l)

    def __repr__(self) -> str:
        return f"CatMap({self.a},{self.b},{self.c},{self.d})"


def _int_power(entries: Tuple[int, int, int, int], t: int) -> Tuple[int, int, int, int]:
    """(a,b,c,d) of M^t by squaring, exact Python integers."""
    a, b, c, d = entries
    if t < 0:
        # inverse of a unimodular matrix is integral
        a, b, c, d = d, -b, -c, a
        t = -t
    ra, rb, rc, rd = 1, 0, 0, 1
    while t > 0:
        if t & 1:
            ra, rb, rc, rd = ra * a + rb * c, ra * b + rb * d, rc * a + rd * c, rc * b + rd * d
        a, b, c, d = a * a + b * c, a * b + b * d, c * a + d * c, c * b + d * d
        t >>= 1
    return ra, rb, rc, rd


def validate_cat_map(a: int, b: int, c: int, d: int) -> CatMap:
    """Validate raw integer entries and attach derived hyperbolic data.

    A matrix with trace < -2 is replaced by its negative, which defines
    the same torus map.

    Raises
    ------
    NotUnimodular
        If a*d - b*c != 1.
    NotHyperbolic
        If |a + d| <= 2.
    """
    a, b, c, d = int(a), int(b), int(c), int(d)
    det = a * d - b * c
    if det != 1:
        raise NotUnimodular(f"determinant is {det}, must be 1")
    tr = a + d
    if abs(tr) <= 2:
        raise NotHyperbolic(f"|trace| = {abs(tr)} <= 2, not hyperbolic")
    if tr < 0:
        a, b, c, d = -a, -b, -c, -d
    lam, ang_u, ang_s, b1, b2, squeeze = decompose_hyperbolic(
        np.array([[a, b], [c, d]], dtype=float)
    )
    return CatMap(a, b, c, d, lam, ang_u, ang_s, b1, b2, squeeze)


def decompose_hyperbolic(matrix: np.ndarray):
    """Hyperbolic frame decomposition of a trace > 2 matrix.

    Returns (lambda, unstable_angle, stable_angle, b1, b2, squeeze) such
    that matrix = R(b1) B(b2) D(lambda) B(b2)^-1 R(b1)^-1 with
    D(lambda) = diag(e^lambda, e^-lambda).

    The unstable eigenvector is oriented into the right half plane, giving
    unstable_angle in (-pi/2, pi/2]; the stable angle is the unstable
    angle plus the line angle between the two eigenlines, so it lies in
    (unstable_angle, unstable_angle + pi).  b1 is reduced mod pi into
    (-pi/2, pi/2], which leaves the reconstruction and the squeeze
    parameter unchanged.
    """
    m = np.asarray(matrix, dtype=float)
    tr = m[0, 0] + m[1, 1]
    if tr <= 2.0:
        raise NotHyperbolic(f"trace {tr} <= 2")
    lam = math.log((tr + math.sqrt(tr * tr - 4.0)) / 2.0)

    def unit_eigvec(mu: float) -> np.ndarray:
        v = np.array([m[0, 1], mu - m[0, 0]])
        if np.hypot(v[0], v[1]) < 1e-12 * max(1.0, abs(mu)):
            v = np.array([mu - m[1, 1], m[1, 0]])
        return v / np.hypot(v[0], v[1])

    vu = unit_eigvec(math.exp(lam))
    vs = unit_eigvec(math.exp(-lam))
    if vu[0] < 0 or (vu[0] == 0 and vu[1] < 0):
        vu = -vu
    ang_u = math.atan2(vu[1], vu[0])
    ang_s = ang_u + (math.atan2(vs[1], vs[0]) - ang_u) % math.pi

    b1 = (ang_u + ang_s - math.pi / 2) / 2
    psi = ang_u - b1  # in (-pi/4, pi/4) since the eigenlines are distinct
    b2 = math.atanh(math.tan(psi))
    while b1 <= -math.pi / 2:
        b1 += math.pi
    while b1 > math.pi / 2:
        b1 -= math.pi
    squeeze = -b2 * cmath.exp(-2j * b1)
    return lam, ang_u, ang_s, b1, b2, squeeze


@dataclass(frozen=True, order=True)
class RationalPoint:
    """A rational torus point (j/l, k/l), canonically reduced mod l."""

    j: int
    k: int
    l: int

    def __post_init__(self):
        if self.l <= 0:
            raise ValueError("denominator must be positive")
        object.__setattr__(self, "j", self.j % self.l)
        object.__setattr__(self, "k", self.k % self.l)

    def as_floats(self) -> Tuple[float, float]:
        return (self.j / self.l, self.k / self.l)

    def as_fractions(self) -> Tuple[Fraction, Fraction]:
        return (Fraction(self.j, self.l), Fraction(self.k, self.l))

    def _reduced(self) -> Tuple[int, int, int, int]:
        f1, f2 = self.as_fractions()
        return (f1.numerator, f1.denominator, f2.numerator, f2.denominator)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalPoint):
            return NotImplemented
        return self._reduced() == other._reduced()

    def __hash__(self) -> int:
        return hash(self._reduced())


def torus_distance(x: Sequence[float], y: Sequence[float]) -> float:
    """Euclidean distance on the torus via minimal-image differences."""
    dq = abs(x[0] - y[0]) % 1.0
    dp = abs(x[1] - y[1]) % 1.0
    dq = min(dq, 1.0 - dq)
    dp = min(dp, 1.0 - dp)
    return math.hypot(dq, dp)


@dataclass(frozen=True)
class Orbit:
    """A closed orbit on the lattice L_l, stored from its canonical point.

    points[t+1] = M points[t] mod 1 exactly, and the first point is the
    lexicographically smallest (j, k) pair on the orbit.
    """

    points: Tuple[RationalPoint, ...]
    l: int
    prime: bool = True

    @property
    def length(self) -> int:
        return len(self.points)

    def start(self) -> RationalPoint:
        return self.points[0]

    def min_separation(self) -> float:
        pts = [p.as_floats() for p in self.points]
        n = len(pts)
        if n < 2:
            return math.inf
        return min(
            torus_distance(pts[s], pts[t]) for s in range(n) for t in range(s + 1, n)
        )


def fixed_point_count(catmap: CatMap, T: int) -> int:
    """Number of fixed points of M^T on the torus: trace(M^T) - 2, exact."""
    if T < 1:
        raise ValueError("T must be >= 1")
    a, _, _, d = catmap.matrix_power(T)
    return a + d - 2


def _lattice_fixed_points(catmap: CatMap, T: int, l: int) -> List[Tuple[int, int]]:
    """All (j, k) in Z_l^2 with (M^T - Id)(j, k) = 0 mod l."""
    a, b, c, d = catmap.matrix_power(T)
    k00, k01 = (a - 1) % l, b % l
    k10, k11 = c % l, (d - 1) % l
    out: List[Tuple[int, int]] = []
    ks = np.arange(l, dtype=np.int64)
    for j in range(l):
        r1 = (k00 * j + k01 * ks) % l
        r2 = (k10 * j + k11 * ks) % l
        for k in ks[(r1 == 0) & (r2 == 0)]:
            out.append((j, int(k)))
    return out


def enumerate_prime_orbits(
    catmap: CatMap, T: int, lattice_guard: int = DEFAULT_LATTICE_GUARD
) -> List[Orbit]:
    """All prime closed orbits of exact length T, canonically ordered.

    Fixed points of M^T live on the lattice L_l with l = trace(M^T) - 2;
    the scan over L_l uses exact arithmetic mod l.  Each orbit is rotated
    to start at its lexicographically smallest (j, k) and the list is
    sorted by that starting point.

    Raises
    ------
    EnumerationTooLarge
        If l exceeds the lattice guard.
    """
    if T < 1:
        raise ValueError("T must be >= 1")
    l = fixed_point_count(catmap, T)
    if l > lattice_guard:
        raise EnumerationTooLarge(
            f"lattice denominator l = {l} exceeds guard {lattice_guard}"
        )
    a1, b1_, c1, d1 = catmap.entries
    fixed = set(_lattice_fixed_points(catmap, T, l))
    orbits: List[Orbit] = []
    seen = set()
    for start in sorted(fixed):
        if start in seen:
            continue
        cycle = [start]
        j, k = start
        while True:
            j, k = (a1 * j + b1_ * k) % l, (c1 * j + d1 * k) % l
            if (j, k) == start:
                break
            cycle.append((j, k))
        for pt in cycle:
            seen.add(pt)
        if len(cycle) != T:
            continue  # exact period is a proper divisor of T
        pivot = cycle.index(min(cycle))
        cycle = cycle[pivot:] + cycle[:pivot]
        orbits.append(
            Orbit(tuple(RationalPoint(j, k, l) for j, k in cycle), l=l, prime=True)
        )
    orbits.sort(key=lambda o: (o.start().j, o.start().k))
    return orbits


def delta_measure_integrate(orbit: Orbit, f: Callable[[float, float], complex]) -> complex:
    """Integral of f against the normalized delta measure on the orbit."""
    total = 0.0 + 0.0j
    for p in orbit.points:
        q, pp = p.as_floats()
        total += f(q, pp)
    return total / orbit.length


def orbit_fourier_coefficient(orbit: Orbit, n: Tuple[int, int]) -> complex:
    """mu_gamma(e_n) with e_n(x) = exp(2 pi i (n2 x1 - n1 x2)), exact phases.

    The phase argument (n2 j - n1 k)/l is reduced mod 1 in integer
    arithmetic before exponentiating.
    """
    n1, n2 = n
    total = 0.0 + 0.0j
    l = orbit.l
    for p in orbit.points:
        r = (n2 * p.j - n1 * p.k) % l
        total += cmath.exp(2j * math.pi * r / l)
    return total / orbit.length


def best_orbit_for_measure(
    catmap: CatMap,
    target: Dict[Tuple[int, int], complex],
    T_max: int,
    lattice_guard: int = DEFAULT_LATTICE_GUARD,
) -> Tuple[Orbit, float]:
    """Prime orbit of length <= T_max whose delta measure best matches target.

    target maps frequencies n to desired Fourier coefficients mu(e_n); the
    discrepancy is the l1 distance over those frequencies.  Ties break
    toward shorter orbits, then the canonical starting point.  Returns the
    winning orbit and its discrepancy.
    """
    if T_max < 1:
        raise ValueError("T_max must be >= 1")
    best: Tuple[Orbit, float] | None = None
    best_key = None
    for T in range(1, T_max + 1):
        for orbit in enumerate_prime_orbits(catmap, T, lattice_guard):
            disc = sum(
                abs(orbit_fourier_coefficient(orbit, n) - target[n]) for n in target
            )
            key = (disc, T, orbit.start().j, orbit.start().k)
            if best_key is None or key < best_key:
                best_key = key
                best = (orbit, float(disc))
    assert best is not None
    return best
