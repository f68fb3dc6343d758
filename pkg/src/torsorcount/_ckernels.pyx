# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled counting kernels; same loops as ``_pykernels`` in C integers.

All intermediates stay below B**1.5 + B, so int64 is exact for B <= 1e9.
"""

from libc.math cimport cbrt, sqrt

ctypedef long long i64


cdef inline i64 _gcd(i64 u, i64 v) noexcept nogil:
    if u < 0:
        u = -u
    if v < 0:
        v = -v
    while v:
        u, v = v, u % v
    return u


cdef inline i64 _isqrt(i64 n) noexcept nogil:
    if n <= 0:
        return 0
    cdef i64 r = <i64>sqrt(<double>n)
    while r * r > n:
        r -= 1
    while (r + 1) * (r + 1) <= n:
        r += 1
    return r


cdef inline i64 _icbrt(i64 n) noexcept nogil:
    if n <= 0:
        return 0
    cdef i64 r = <i64>cbrt(<double>n)
    while r * r * r > n:
        r -= 1
    while (r + 1) * (r + 1) * (r + 1) <= n:
        r += 1
    return r


cdef inline i64 _floordiv(i64 p, i64 q) noexcept nogil:
    # q > 0
    cdef i64 d = p / q
    if (p % q != 0) and (p < 0):
        d -= 1
    return d


cdef inline i64 _inverse_mod(i64 b, i64 z) noexcept nogil:
    # b invertible mod z, z > 1
    cdef i64 t = 0, newt = 1, r = z, newr = b % z, q
    while newr:
        q = r / newr
        t, newt = newt, t - q * newt
        r, newr = newr, r - q * newr
    if t < 0:
        t += z
    return t


cdef i64 _n1(i64 B, i64 x_lo, i64 x_hi) noexcept nogil:
    cdef i64 total = 0, x, k, zmax, z, a, a2, ylim, lo, hi, y, c, cy
    x = x_lo if x_lo > 1 else 1
    while x < x_hi and x * x * x <= B:
        k = _isqrt(B / x)
        zmax = _isqrt(B / (x * x * x))
        for z in range(1, zmax + 1):
            for a in range(1, k + 1):
                a2 = a * a
                ylim = B / a
                lo = -_floordiv(k - a2, z)
                hi = _floordiv(a2 + k, z)
                if lo < -ylim:
                    lo = -ylim
                if hi > ylim:
                    hi = ylim
                y = lo
                while y <= hi:
                    c = y * z - a2
                    cy = c * y
                    if cy < 0:
                        cy = -cy
                    if cy <= B and _gcd(x, y) == 1:
                        total += 1
                    y += 1
        x += 1
    return total


cdef i64 _n2(i64 B, i64 b_lo, i64 b_hi) noexcept nogil:
    cdef i64 total = 0, k, b, z, xz, r, c, m, y, ac, big, ay, xmax, x, b_end
    k = _isqrt(B)
    b = b_lo if b_lo > 1 else 1
    b_end = b_hi if b_hi < k + 1 else k + 1
    while b < b_end:
        for z in range(1, k + 1):
            if _gcd(b, z) != 1:
                continue
            xz = _icbrt(B / (z * z))
            if z > 1:
                r = (z - _inverse_mod(b, z)) % z
            else:
                r = 0
            c = r - _floordiv(r + k, z) * z
            while c <= k:
                if c != 0:
                    m = 1 + b * c
                    y = _floordiv(m, z)
                    ac = -c if c < 0 else c
                    big = b if b > ac else ac
                    ay = -y if y < 0 else y
                    if ay * big <= B:
                        xmax = B / (big * big)
                        if xmax > xz:
                            xmax = xz
                        for x in range(1, xmax + 1):
                            if _gcd(x, ay) == 1:
                                total += 1
                c += z
        b += 1
    return total


def n1_orbits(long long B, long long x_lo, long long x_hi):
    cdef i64 out
    with nogil:
        out = _n1(B, x_lo, x_hi)
    return out


def n2_orbits(long long B, long long b_lo, long long b_hi):
    cdef i64 out
    with nogil:
        out = _n2(B, b_lo, b_hi)
    return out
