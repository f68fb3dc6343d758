"""Exact counts N_1(B), N_2(B) of integral points of bounded height.

N_1(B) = 1/2 #{(a, x, y, z) : gcd(x, y) = 1, H(a, 1, yz - a^2, x, y, z) <= B,
a, x, z != 0} and N_2(B) = 1/2 #{(b, c, x, y, z) : 1 + bc = yz,
gcd(x, y) = 1, H(1, b, c, x, y, z) <= B, b, c, x, z != 0}.

Each set is stable under a free action of (Z/2)^3 by sign changes, so the
kernels count positive representatives and the result is 4 times that.
"""
from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import isqrt
from typing import Callable, Iterator, Sequence

import numpy as np

from . import kernels
from ._pykernels import icbrt
from .cox import (
    CoxPoint,
    DivisorTag,
    height,
    in_open_subvariety,
    satisfies_divisor_restriction,
)

MAX_FAST_BOUND = 10**9
MAX_ORACLE_BOUND = 500
METHODS = ("fast", "oracle")


@dataclass(frozen=True)
class CountResult:
    divisor: DivisorTag
    bound: int
    count: int
    method: str
    elapsed: float

    def as_row(self) -> dict:
        return {
            "divisor": self.divisor.value,
            "B": self.bound,
            "count": self.count,
            "method": self.method,
            "elapsed_seconds": self.elapsed,
        }


def _check_bound(B: int, limit: int, allow_zero: bool = False) -> int:
    if isinstance(B, bool) or not isinstance(B, (int, np.integer)):
        raise TypeError(f"B must be an integer, got {type(B).__name__}")
    B = int(B)
    if B < (0 if allow_zero else 1):
        raise ValueError(f"B must be >= {0 if allow_zero else 1}, got {B}")
    if B > limit:
        raise ValueError(f"B = {B} exceeds the supported bound {limit}")
    return B


def outer_range(d: DivisorTag, B: int) -> tuple[int, int]:
    """Half-open range of the outermost loop variable (x for D1, b for D2)."""
    if DivisorTag.parse(d) is DivisorTag.D1:
        return 1, icbrt(B) + 1
    return 1, isqrt(B) + 1


def split_range(lo: int, hi: int, shards: int) -> list[tuple[int, int]]:
    """Cut [lo, hi) into ``shards`` contiguous pieces (some may be empty)."""
    if shards < 1:
        raise ValueError("shards must be >= 1")
    edges = [lo + (hi - lo) * i // shards for i in range(shards + 1)]
    return list(zip(edges[:-1], edges[1:]))


def count_orbits(
    d: DivisorTag,
    B: int,
    pieces: Sequence[tuple[int, int]] | None = None,
    backend: str | None = None,
    workers: int | None = None,
) -> int:
    """Sum of positive-representative counts over the given outer-loop pieces.

    The pieces must partition ``outer_range(d, B)``; any partition gives the
    same integer.
    """
    d = DivisorTag.parse(d)
    impl = kernels.get_backend(backend)
    kernel: Callable[[int, int, int], int] = (
        impl.n1_orbits if d is DivisorTag.D1 else impl.n2_orbits
    )
    if pieces is None:
        pieces = [outer_range(d, B)]
    if len(pieces) == 1 or workers == 1:
        return sum(kernel(B, lo, hi) for lo, hi in pieces)
    with ThreadPoolExecutor(max_workers=workers or len(pieces)) as pool:
        parts = list(pool.map(lambda p: kernel(B, p[0], p[1]), pieces))
    return sum(parts)


def _count_fast(d: DivisorTag, B: int, shards: int, backend: str | None) -> CountResult:
    B = _check_bound(B, MAX_FAST_BOUND)
    t0 = time.perf_counter()
    lo, hi = outer_range(d, B)
    orbits = count_orbits(d, B, split_range(lo, hi, shards), backend=backend)
    return CountResult(d, B, 4 * orbits, "fast", time.perf_counter() - t0)


def count_N1(B: int, shards: int = 1, backend: str | None = None) -> CountResult:
    return _count_fast(DivisorTag.D1, B, shards, backend)


def count_N2(B: int, shards: int = 1, backend: str | None = None) -> CountResult:
    return _count_fast(DivisorTag.D2, B, shards, backend)


def count(d: DivisorTag, B: int, method: str = "fast", shards: int = 1) -> CountResult:
    d = DivisorTag.parse(d)
    if method == "fast":
        return _count_fast(d, B, shards, None)
    if method == "oracle":
        return oracle_count(d, B)
    raise ValueError(f"unknown method {method!r}")


def count_grid(
    d: DivisorTag, bounds: Sequence[int], method: str = "fast", shards: int = 1
) -> list[CountResult]:
    d = DivisorTag.parse(d)
    bounds = list(bounds)
    if any(b2 <= b1 for b1, b2 in zip(bounds, bounds[1:])):
        raise ValueError("bounds must be strictly increasing")
    if method == "oracle" and bounds:
        return oracle_counts(d, bounds)
    return [count(d, B, method, shards) for B in bounds]


# --------------------------------------------------------------------------
# Brute-force oracle.
#
# Every height monomial is <= B, so each coordinate lies in the box cut out by
# single-monomial bounds: |x| <= B (b^2 x or a^2 x with the unit coordinate),
# |z|^2 |x|^3 <= B, |a|^2 |x| <= B (resp. b, c), |y| <= B.  All raw 6-tuples
# in the box (both signs of the unit coordinate) are tested; the 4-to-1
# torus correspondence turns the raw count into N_i(B).
# --------------------------------------------------------------------------


def _nonzero(k: int) -> np.ndarray:
    return np.concatenate([np.arange(-k, 0), np.arange(1, k + 1)]).astype(np.int64)


def _raw_heights_d1(B: int) -> Iterator[np.ndarray]:
    ys = np.arange(-B, B + 1, dtype=np.int64)
    for x in range(-B, B + 1):
        ax = abs(x)
        if x == 0 or ax**3 > B:
            continue
        a_, b_, z_, y_ = np.meshgrid(
            _nonzero(isqrt(B // ax)),
            np.array([-1, 1], dtype=np.int64),
            _nonzero(isqrt(B // ax**3)),
            ys,
            indexing="ij",
        )
        a, b, z, y = (v.ravel() for v in (a_, b_, z_, y_))
        c = b * (y * z - a * a)
        ok = (a * a + b * c - y * z == 0) & (np.gcd(x, y) == 1)
        ok &= (a != 0) & (z != 0)
        yield _heights(a[ok], b[ok], c[ok], x, y[ok], z[ok])


def _raw_heights_d2(B: int) -> Iterator[np.ndarray]:
    for x in range(-B, B + 1):
        ax = abs(x)
        if x == 0 or ax**3 > B:
            continue
        kb = isqrt(B // ax)
        a_, b_, c_, z_ = np.meshgrid(
            np.array([-1, 1], dtype=np.int64),
            _nonzero(kb),
            _nonzero(kb),
            _nonzero(isqrt(B // ax**3)),
            indexing="ij",
        )
        a, b, c, z = (v.ravel() for v in (a_, b_, c_, z_))
        rhs = a * a + b * c
        div = rhs % z == 0
        a, b, c, z, rhs = a[div], b[div], c[div], z[div], rhs[div]
        y = rhs // z
        ok = (a * a + b * c - y * z == 0) & (np.gcd(x, y) == 1)
        ok &= (b != 0) & (c != 0) & (z != 0)
        yield _heights(a[ok], b[ok], c[ok], x, y[ok], z[ok])


def _heights(a, b, c, x: int, y, z) -> np.ndarray:
    ax = abs(x)
    return np.max(
        np.stack(
            [
                a * a * ax,
                b * b * ax,
                c * c * ax,
                z * z * ax**3,
                np.abs(a * y),
                np.abs(b * y),
                np.abs(c * y),
            ]
        ),
        axis=0,
    )


def oracle_counts(d: DivisorTag, bounds: Sequence[int]) -> list[CountResult]:
    """Oracle counts for several bounds from one enumeration at max(bounds)."""
    d = DivisorTag.parse(d)
    bounds = [_check_bound(B, MAX_ORACLE_BOUND, allow_zero=True) for B in bounds]
    if not bounds:
        return []
    t0 = time.perf_counter()
    bmax = max(bounds)
    hist = np.zeros(bmax + 1, dtype=np.int64)
    if bmax >= 1:
        gen = _raw_heights_d1(bmax) if d is DivisorTag.D1 else _raw_heights_d2(bmax)
        for h in gen:
            h = h[h <= bmax]
            hist += np.bincount(h, minlength=bmax + 1)
    cumulative = np.cumsum(hist)
    elapsed = time.perf_counter() - t0
    out = []
    for B in bounds:
        raw = int(cumulative[B])
        if raw % 4:
            raise AssertionError(f"raw torsor count {raw} is not a multiple of 4")
        out.append(CountResult(d, B, raw // 4, "oracle", elapsed))
    return out


def oracle_count(d: DivisorTag, B: int) -> CountResult:
    return oracle_counts(d, [B])[0]


def oracle_points(d: DivisorTag, B: int) -> Iterator[CoxPoint]:
    """All raw torsor points of height <= B over U_i, one CoxPoint at a time.

    Slow scalar route through the cox predicates; meant for small B.
    """
    d = DivisorTag.parse(d)
    B = _check_bound(B, MAX_ORACLE_BOUND, allow_zero=True)
    for x in range(-B, B + 1):
        if x == 0 or abs(x) ** 3 > B:
            continue
        k = isqrt(B // abs(x))
        kz = isqrt(B // abs(x) ** 3)
        for z in range(-kz, kz + 1):
            for u in (-1, 1):
                for s in range(-k, k + 1):
                    for t in range(-B, B + 1) if d is DivisorTag.D1 else range(-k, k + 1):
                        if d is DivisorTag.D1:
                            a, y = s, t
                            c = u * (y * z - a * a)
                            p = CoxPoint(a, u, c, x, y, z)
                        else:
                            b, c = s, t
                            if z == 0 or (1 + b * c) % z:
                                continue
                            p = CoxPoint(u, b, c, x, (1 + b * c) // z, z)
                        if (
                            satisfies_divisor_restriction(p, d)
                            and in_open_subvariety(p, d)
                            and height(p) <= B
                        ):
                            yield p
