"""Pure-Python counting kernels.

Both kernels count one orbit representative of the sign symmetries
(a -> -a or (b, c) -> (-b, -c); x -> -x; (y, z) -> (-y, -z)), i.e. tuples
with the outer variables positive.  ``_ckernels.pyx`` is a line-for-line
typed copy; keep the two in sync.
"""
from __future__ import annotations

from math import gcd, isqrt


def icbrt(n: int) -> int:
    """Largest r >= 0 with r**3 <= n, for n >= 0."""
    if n <= 0:
        return 0
    r = int(round(n ** (1.0 / 3.0)))
    while r * r * r > n:
        r -= 1
    while (r + 1) ** 3 <= n:
        r += 1
    return r


def n1_orbits(B: int, x_lo: int, x_hi: int) -> int:
    """#{(a, x, y, z): a, x, z >= 1, x in [x_lo, x_hi), gcd(x, y) = 1,
    H(a, 1, yz - a^2, x, y, z) <= B}."""
    total = 0
    x = max(x_lo, 1)
    while x < x_hi and x * x * x <= B:
        k = isqrt(B // x)  # |a|, |c| <= k  <=>  a^2 x, c^2 x <= B
        zmax = isqrt(B // (x * x * x))
        for z in range(1, zmax + 1):
            for a in range(1, k + 1):
                a2 = a * a
                ylim = B // a  # |a y| <= B, implies |b y| = |y| <= B
                # c = yz - a^2 in [-k, k]
                lo = -((k - a2) // z)
                hi = (a2 + k) // z
                if lo < -ylim:
                    lo = -ylim
                if hi > ylim:
                    hi = ylim
                for y in range(lo, hi + 1):
                    c = y * z - a2
                    if abs(c * y) <= B and gcd(x, y) == 1:
                        total += 1
        x += 1
    return total


def n2_orbits(B: int, b_lo: int, b_hi: int) -> int:
    """#{(b, c, x, y, z): b, x, z >= 1, b in [b_lo, b_hi), c != 0,
    1 + bc = yz, gcd(x, y) = 1, H(1, b, c, x, y, z) <= B}."""
    total = 0
    k = isqrt(B)  # |b|, |c| <= k from b^2 x, c^2 x <= B
    for b in range(max(b_lo, 1), min(b_hi, k + 1)):
        for z in range(1, k + 1):  # z^2 x^3 <= B with x >= 1
            if gcd(b, z) != 1:
                continue  # 1 + bc = 0 mod z needs b invertible mod z
            xz = icbrt(B // (z * z))
            # c = -b^{-1} mod z, then step by z across [-k, k]
            r = (-pow(b, -1, z)) % z if z > 1 else 0
            c = r - ((r + k) // z) * z
            while c <= k:
                if c != 0:
                    m = 1 + b * c
                    y = m // z
                    ac = -c if c < 0 else c
                    big = b if b > ac else ac
                    ay = -y if y < 0 else y
                    if ay * big <= B:
                        xmax = B // (big * big)
                        if xmax > xz:
                            xmax = xz
                        for x in range(1, xmax + 1):
                            if gcd(x, ay) == 1:
                                total += 1
                c += z
    return total
