"""Factors of the predicted leading constant alpha * tau_fin * tau_inf.

* alpha from the pseudoeffective cone Cone(E, H - E) at the class 3H - E,
* local densities #U_i(F_p) / p^3 and the Euler product tau_fin,
* the archimedean boundary volume tau_{D_i,inf}(D_i(R)), once by adaptive
  quadrature and once by an exact region decomposition.
"""
from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy import integrate

from .cox import DivisorTag

C_REAL = 2  # renormalisation of the residue measure at the real place


# --------------------------------------------------------------------------
# alpha
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ConeSpec:
    """Simplicial cone spanned by ``generators`` and a target class."""

    generators: tuple[tuple[int, ...], ...]
    target: tuple[int, ...]

    def __post_init__(self) -> None:
        r = len(self.target)
        if len(self.generators) != r or any(len(g) != r for g in self.generators):
            raise ValueError("need rank-many generators of matching dimension")


# Pic(X) in the basis (H, E): E = (0, 1), H - E = (1, -1), omega(D)^v = 3H - E.
EFFECTIVE_CONE = ConeSpec(generators=((0, 1), (1, -1)), target=(3, -1))


def _solve(columns: Sequence[Sequence[int]], rhs: Sequence[int]) -> tuple[Fraction, list[Fraction]]:
    """Determinant of the matrix with the given columns and its solution."""
    n = len(rhs)
    m = [[Fraction(columns[j][i]) for j in range(n)] + [Fraction(rhs[i])] for i in range(n)]
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            return Fraction(0), []
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
            det = -det
        det *= m[col][col]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col] / m[col][col]
                m[r] = [vr - f * vc for vr, vc in zip(m[r], m[col])]
    return det, [m[i][n] / m[i][i] for i in range(n)]


def alpha(cone: ConeSpec = EFFECTIVE_CONE) -> Fraction:
    """1/(r-1)! times the characteristic function of the cone at the target.

    With L = sum_i l_i g_i, the integral of exp(-<L, t>) over the dual cone is
    1 / (|det G| prod_i l_i) for Lebesgue measure normalised by the dual lattice.
    """
    det, coeffs = _solve(cone.generators, cone.target)
    if det == 0:
        raise ValueError("cone generators are linearly dependent")
    if any(c <= 0 for c in coeffs):
        raise ValueError(f"target {cone.target} is not interior to the cone")
    chi = 1 / (abs(det) * math.prod(coeffs))
    return chi / math.factorial(len(coeffs) - 1)


# --------------------------------------------------------------------------
# finite places
# --------------------------------------------------------------------------

MAX_FP_PRIME = 10_000


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % q for q in range(2, math.isqrt(n) + 1))


def primes_up_to(n: int) -> np.ndarray:
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for q in range(2, math.isqrt(n) + 1):
        if sieve[q]:
            sieve[q * q :: q] = False
    return np.flatnonzero(sieve).astype(np.int64)


def _check_prime(p: int) -> int:
    p = int(p)
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if p > MAX_FP_PRIME:
        raise ValueError(f"p = {p} exceeds {MAX_FP_PRIME}")
    return p


def fp_count(d: DivisorTag, p: int) -> int:
    """#U_i(F_p): torsor points over F_p with b != 0 (D1) or a != 0 (D2),
    divided by the (p-1)^2 points of each G_m^2-orbit.

    For each (a, b) the c with m = a^2 + bc = 0 are found by solving the
    linear equation; every (a, b, c) then contributes the number of (x, y, z)
    with yz = m, (x, y) != 0 and (a, b, c, z) != 0.
    """
    d = DivisorTag.parse(d)
    p = _check_prime(p)
    a = np.arange(p, dtype=np.int64)[:, None]
    b = np.arange(p, dtype=np.int64)[None, :]
    a2 = (a * a) % p
    # number of c in F_p with a^2 + b c = 0
    zeros = np.where(b != 0, 1, np.where(a2 == 0, p, 0))
    keep = (b != 0) if d is DivisorTag.D1 else (a != 0)
    keep = np.broadcast_to(keep, zeros.shape)
    n_zero = int(zeros[keep].sum())
    n_nonzero = int(keep.sum()) * p - n_zero
    origin_kept = bool(keep[0, 0])  # the triple (0, 0, 0) has m = 0
    n_zero_origin = 1 if origin_kept else 0

    fiber_nonzero = (p - 1) * p  # y, z != 0 fixed by yz = m; x free
    fiber_zero = 2 * p * (p - 1)  # y = 0 (z free, x != 0) or z = 0 (y != 0, x free)
    fiber_zero_origin = (p - 1) ** 2  # y = 0, x != 0, z != 0
    total = (
        n_nonzero * fiber_nonzero
        + (n_zero - n_zero_origin) * fiber_zero
        + n_zero_origin * fiber_zero_origin
    )
    q, r = divmod(total, (p - 1) ** 2)
    if r:
        raise AssertionError("torus action is not free on the point set")
    return q


def fp_count_bruteforce(d: DivisorTag, p: int) -> int:
    """Same count by checking all p^6 tuples; for small p only."""
    d = DivisorTag.parse(d)
    p = _check_prime(p)
    if p > 11:
        raise ValueError("brute force is O(p^6); use p <= 11")
    g = np.array(list(itertools.product(range(p), repeat=6)), dtype=np.int64)
    a, b, c, x, y, z = g.T
    ok = (a * a + b * c - y * z) % p == 0
    ok &= ~((a == 0) & (b == 0) & (c == 0) & (z == 0))
    ok &= ~((x == 0) & (y == 0))
    ok &= (b != 0) if d is DivisorTag.D1 else (a != 0)
    total = int(ok.sum())
    assert total % (p - 1) ** 2 == 0
    return total // (p - 1) ** 2


@dataclass(frozen=True)
class LocalDensity:
    p: int
    value: Fraction


def density_formula(d: DivisorTag, p: int) -> Fraction:
    """1 + 1/p for D1, 1 + 1/p - 1/p^2 for D2."""
    if DivisorTag.parse(d) is DivisorTag.D1:
        return 1 + Fraction(1, p)
    return 1 + Fraction(1, p) - Fraction(1, p * p)


def local_density(d: DivisorTag, p: int) -> LocalDensity:
    p = _check_prime(p)
    return LocalDensity(p, Fraction(fp_count(d, p), p**3))


def euler_factor(d: DivisorTag, p: int) -> Fraction:
    """Convergence factor (1 - 1/p) times the local density."""
    return (1 - Fraction(1, p)) * density_formula(d, p)


def euler_product(d: DivisorTag, prime_bound: int) -> tuple[float, float]:
    """Partial product over p <= P and a bound on |log| of the omitted factors.

    Each factor is 1 - x_p with 0 < x_p <= k/p^2 (k = 1 for D1, 2 for D2), so
    -log(1 - x_p) <= x_p / (1 - x_p) and the tail is at most
    k / P / (1 - k/(P+1)^2).
    """
    d = DivisorTag.parse(d)
    if prime_bound < 2:
        raise ValueError("prime bound must be >= 2")
    p = primes_up_to(int(prime_bound)).astype(np.float64)
    if d is DivisorTag.D1:
        x = 1.0 / (p * p)
        k = 1.0
    else:
        x = 2.0 / (p * p) - 1.0 / (p * p * p)
        k = 2.0
    partial = math.exp(math.fsum(np.log1p(-x).tolist()))
    P = float(prime_bound)
    tail = k / P / (1.0 - k / (P + 1.0) ** 2)
    return partial, tail


# --------------------------------------------------------------------------
# archimedean place
#
# On the chart V = X - V(xz) the residue measure on D_i(R) has density
# 1 / max(monomials) in the two remaining coordinates (u, v) = (a, c) for D1
# and (b, c) for D2.  Monomials and region constraints are stored as exponent
# pairs (i, j) for |u|^i |v|^j.  Everything is even in u and v, so integrals
# are taken over the open quadrant and multiplied by 4.
# --------------------------------------------------------------------------

Exp = tuple[int, int]

DENSITY_MONOMIALS: dict[DivisorTag, tuple[Exp, ...]] = {
    DivisorTag.D1: ((2, 0), (0, 2), (0, 0), (3, 0), (2, 1)),
    DivisorTag.D2: ((2, 0), (0, 2), (0, 0), (2, 1), (1, 2)),
}

ONE, U, V = (0, 0), (1, 0), (0, 1)


def le(lhs: Exp, rhs: Exp) -> tuple[Exp, Exp]:
    """Constraint |u|^i1 |v|^j1 <= |u|^i2 |v|^j2."""
    return (lhs, rhs)


class QuadratureError(RuntimeError):
    pass


@dataclass(frozen=True)
class RegionPiece:
    """One piece of the region decomposition of D_i(R).

    ``cells`` is a union of quadrant cells, each a list of monomial
    constraints; ``terms`` gives the exact quadrant integral as a sum of
    coef * int t^e dt over [0, 1] ('01') or [1, inf) ('1inf').
    """

    name: str
    cells: tuple[tuple[tuple[Exp, Exp], ...], ...]
    terms: tuple[tuple[Fraction, Fraction, str], ...]
    parts: tuple["RegionPiece", ...] = field(default=())

    def exact(self) -> Fraction:
        return 4 * sum((coef * _power_integral(e, span) for coef, e, span in self.terms), Fraction(0))


def _power_integral(e: Fraction, span: str) -> Fraction:
    if span == "01":
        if e <= -1:
            raise ValueError("divergent at 0")
        return 1 / (e + 1)
    if span == "1inf":
        if e >= -1:
            raise ValueError("divergent at infinity")
        return -1 / (e + 1)
    raise ValueError(span)


F = Fraction
_D1_PIECE3 = (
    RegionPiece(
        "|c|>|a|, |a^2 c|>1, |a^2|>|c|",
        ((le(U, V), le(ONE, (2, 1)), le(V, (2, 0))),),
        # int_{c>=1} c^-1 (c^-1/2 - c^-1) dc
        ((F(1), F(-3, 2), "1inf"), (F(-1), F(-2), "1inf")),
    ),
    RegionPiece(
        "|c|>|a|, |a^2 c|>1, |a^2|<=|c|",
        ((le(U, V), le(ONE, (2, 1)), le((2, 0), V)),),
        # int 1/max(a, a^2, a^-2) da
        ((F(1), F(2), "01"), (F(1), F(-2), "1inf")),
    ),
)

REGION_PIECES: dict[DivisorTag, tuple[RegionPiece, ...]] = {
    DivisorTag.D1: (
        RegionPiece(
            "|a|<=1, |a^2 c|<=1",
            ((le(U, ONE), le((2, 1), ONE)),),
            # int min(1, c^-1/2) / max(1, c^2) dc
            ((F(1), F(0), "01"), (F(1), F(-5, 2), "1inf")),
        ),
        RegionPiece(
            "|a|>=|c|, |a|>1",
            ((le(V, U), le(ONE, U)),),
            # int_{a>1} a * a^-3 da
            ((F(1), F(-2), "1inf"),),
        ),
        RegionPiece(
            "|c|>|a|, |a^2 c|>1",
            ((le(U, V), le(ONE, (2, 1))),),
            _D1_PIECE3[0].terms + _D1_PIECE3[1].terms,
            parts=_D1_PIECE3,
        ),
    ),
    DivisorTag.D2: (
        RegionPiece(
            "|b^2 c|<=1, |b c^2|<=1",
            ((le((2, 1), ONE), le((1, 2), ONE)),),
            # 2 int_{b>=c, b^2 c<=1} 1/max(1, b^2) = 2 (int_0^1 b + int_1^inf b^-4)
            ((F(2), F(1), "01"), (F(2), F(-4), "1inf")),
        ),
        RegionPiece(
            "max(|b^2 c|,|b c^2|)>1, min(|b|,|c|)<=1",
            (
                (le(V, U), le(V, ONE), le(ONE, (2, 1))),
                (le(U, V), le(U, ONE), le(ONE, (1, 2))),
            ),
            # 2 int_0^1 dc int_{c^-1/2}^inf b^-2 db
            ((F(2), F(1, 2), "01"),),
        ),
        RegionPiece(
            "min(|b|,|c|)>1",
            ((le(V, U), le(ONE, V)), (le(U, V), le(ONE, U))),
            # 2 int_1^inf c^-1 int_c^inf b^-2 db dc
            ((F(2), F(-2), "1inf"),),
        ),
    ),
}


def archimedean_volume_regions(d: DivisorTag) -> tuple[Fraction, list[tuple[str, Fraction]]]:
    """Exact boundary volume as the sum of the closed-form region pieces."""
    pieces = [(piece.name, piece.exact()) for piece in REGION_PIECES[DivisorTag.parse(d)]]
    return sum((v for _, v in pieces), Fraction(0)), pieces


def _log_crossings(monos: Sequence[Exp], lu: float) -> list[float]:
    """log v where two of the monomials u^i v^j agree, at fixed log u."""
    out = set()
    for (i1, j1), (i2, j2) in itertools.combinations(monos, 2):
        if j1 != j2:
            out.add(lu * (i2 - i1) / (j1 - j2))
    return sorted(out)


def _log_v_interval(cons: Sequence[tuple[Exp, Exp]], lu: float) -> tuple[float, float]:
    lo, hi = -math.inf, math.inf
    for (i1, j1), (i2, j2) in cons:
        dj = j1 - j2
        if dj == 0:
            continue
        t = lu * (i2 - i1) / dj
        if dj > 0:
            hi = min(hi, t)
        else:
            lo = max(lo, t)
    return lo, hi


def _log_u_interval(cons: Sequence[tuple[Exp, Exp]]) -> tuple[float, float]:
    lo, hi = -math.inf, math.inf
    for (i1, j1), (i2, j2) in cons:
        if j1 != j2:
            continue
        if i1 > i2:
            hi = min(hi, 0.0)
        elif i1 < i2:
            lo = max(lo, 0.0)
    return lo, hi


def _quad_log(h, lo: float, hi: float, epsabs: float, limit: int, epsrel: float = 0.0) -> tuple[float, float]:
    """Integral of exp(h(s) + s) ds over [lo, hi], i.e. of exp(h(log t)) dt
    over [e^lo, e^hi].  Power laws become smooth, exponentially decaying
    integrands in s."""

    def f(s: float) -> float:
        e = h(s) + s
        if e > 700.0:
            raise QuadratureError(f"integrand grows without bound near log t = {s:.3g}")
        return math.exp(e) if e > -745.0 else 0.0

    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            return integrate.quad(f, lo, hi, epsabs=epsabs, epsrel=epsrel, limit=limit)
        except integrate.IntegrationWarning as exc:
            raise QuadratureError(str(exc)) from None


def integrate_quadrant(
    monos: Sequence[Exp],
    cells: Sequence[Sequence[tuple[Exp, Exp]]] = ((),),
    tol: float = 1e-6,
    limit: int = 200,
) -> tuple[float, float]:
    """4 * integral over u, v > 0 (restricted to the union of ``cells``) of
    1 / max_k u^i_k v^j_k.  Returns (value, error estimate).

    Both variables are integrated on a log scale.  The inner integral is split
    at every crossing of two monomials so each piece has a single dominating
    monomial; the outer one is split at u = 1, the only place crossings meet.
    """
    monos = tuple(monos)
    inner_tol = tol * 1e-3
    total = err = 0.0
    for cons in cells:
        ulo, uhi = _log_u_interval(cons)

        def log_inner(lu: float, cons=cons) -> float:
            lo, hi = _log_v_interval(cons, lu)
            if hi <= lo:
                return -math.inf
            knots = [lo] + [t for t in _log_crossings(monos, lu) if lo < t < hi] + [hi]
            s = 0.0
            for v0, v1 in zip(knots, knots[1:]):
                s += _quad_log(
                    lambda lv: -max(i * lu + j * lv for i, j in monos),
                    v0, v1, inner_tol, limit, 1e-12,
                )[0]
            return math.log(s) if s > 0 else -math.inf

        for a, b in ((-math.inf, 0.0), (0.0, math.inf)):
            lo, hi = max(a, ulo), min(b, uhi)
            if hi <= lo:
                continue
            val, e = _quad_log(log_inner, lo, hi, tol / 16, limit)
            total += val
            err += e
    total, err = 4 * total, 4 * err
    if err > tol:
        raise QuadratureError(f"error estimate {err:.3g} exceeds tolerance {tol:.3g}")
    return total, err


def archimedean_volume_quadrature(d: DivisorTag, tol: float = 1e-6) -> float:
    """Numerical volume of D_i(R); the result is within ``tol`` of the truth."""
    if not tol > 0:
        raise ValueError("tol must be positive")
    value, _ = integrate_quadrant(DENSITY_MONOMIALS[DivisorTag.parse(d)], tol=tol)
    return value


def region_quadrature(d: DivisorTag, piece: RegionPiece, tol: float = 1e-6) -> float:
    value, _ = integrate_quadrant(DENSITY_MONOMIALS[DivisorTag.parse(d)], piece.cells, tol=tol)
    return value


# --------------------------------------------------------------------------
# assembled prediction
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ConstantBreakdown:
    divisor: DivisorTag
    alpha: Fraction
    tau_infinity: float  # c_R times the quadrature volume
    tau_infinity_regions: Fraction
    euler_partial: float
    euler_tail_bound: float
    prediction: float
    prediction_low: float
    prediction_high: float
    prime_bound: int
    tol: float

    def contains(self, value: float) -> bool:
        return self.prediction_low <= value <= self.prediction_high

    @property
    def width(self) -> float:
        return self.prediction_high - self.prediction_low

    def as_dict(self) -> dict:
        return {
            "divisor": self.divisor.value,
            "alpha": str(self.alpha),
            "c_real": C_REAL,
            "tau_infinity_quadrature": self.tau_infinity,
            "tau_infinity_regions": str(self.tau_infinity_regions),
            "euler_partial": self.euler_partial,
            "euler_tail_bound": self.euler_tail_bound,
            "prediction": self.prediction,
            "prediction_low": self.prediction_low,
            "prediction_high": self.prediction_high,
            "prime_bound": self.prime_bound,
            "tol": self.tol,
        }


def predicted_constant(d: DivisorTag, prime_bound: int = 10**6, tol: float = 1e-4) -> ConstantBreakdown:
    """alpha * c_R * vol(D_i(R)) * tau_fin with an enclosing interval.

    The interval uses vol in [q - tol, q + tol] and the true Euler product in
    [partial * exp(-tail), partial]; it is widened outward by one ulp.
    """
    d = DivisorTag.parse(d)
    a = alpha()
    vol = archimedean_volume_quadrature(d, tol)
    exact_vol, _ = archimedean_volume_regions(d)
    partial, tail = euler_product(d, prime_bound)
    af = float(a)
    pred = af * C_REAL * vol * partial
    low = af * C_REAL * (vol - tol) * partial * math.exp(-tail)
    high = af * C_REAL * (vol + tol) * partial
    return ConstantBreakdown(
        divisor=d,
        alpha=a,
        tau_infinity=C_REAL * vol,
        tau_infinity_regions=C_REAL * exact_vol,
        euler_partial=partial,
        euler_tail_bound=tail,
        prediction=pred,
        prediction_low=math.nextafter(low, -math.inf),
        prediction_high=math.nextafter(high, math.inf),
        prime_bound=int(prime_bound),
        tol=tol,
    )
