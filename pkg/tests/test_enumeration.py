import itertools
import math
from math import gcd

import pytest
from hypothesis import given, settings, strategies as st

from torsorcount import kernels
from torsorcount.cox import DivisorTag, height
from torsorcount.enumeration import (
    MAX_FAST_BOUND,
    count,
    count_grid,
    count_N1,
    count_N2,
    count_orbits,
    oracle_count,
    oracle_counts,
    oracle_points,
    outer_range,
    split_range,
)

D1, D2 = DivisorTag.D1, DivisorTag.D2


def tiny_n1(B, box):
    """Scalar transcription of the reduced D1 set over |a|,|x|,|y|,|z| <= box."""
    r = range(-box, box + 1)
    n = 0
    for a, x, y, z in itertools.product(r, r, r, r):
        if a == 0 or x == 0 or z == 0 or gcd(x, y) != 1:
            continue
        c = y * z - a * a
        h = max(a * a * abs(x), abs(x), c * c * abs(x), z * z * abs(x) ** 3, abs(a * y), abs(y), abs(c * y))
        n += h <= B
    assert n % 2 == 0
    return n // 2


def test_n1_at_one_matches_tiny_box():
    assert count_N1(1).count == tiny_n1(1, 1) == 8


def test_n1_small_box_values():
    # a box of size B is sufficient for the reduced set
    for B in (2, 3, 4):
        assert count_N1(B).count == tiny_n1(B, B)


@pytest.mark.parametrize("d", list(DivisorTag))
def test_fast_matches_oracle_up_to_200(d):
    ref = oracle_counts(d, range(1, 201))
    assert [count(d, r.bound).count for r in ref] == [r.count for r in ref]


@pytest.mark.parametrize("d, B", [(D1, 100), (D2, 50)])
def test_single_oracle_call(d, B):
    assert oracle_count(d, B).count == count(d, B).count


@pytest.mark.parametrize("d", list(DivisorTag))
def test_scalar_oracle_agrees_with_vectorised(d):
    for B in (1, 6, 17, 30):
        n = sum(1 for _ in oracle_points(d, B))
        assert n % 4 == 0
        assert n // 4 == oracle_count(d, B).count


def test_oracle_zero():
    assert oracle_count(D1, 0).count == 0
    assert oracle_count(D2, 0).count == 0


def test_oracle_guard():
    with pytest.raises(ValueError):
        oracle_count(D1, 501)


@pytest.mark.parametrize("d", list(DivisorTag))
def test_counted_sets_are_stable_under_involutions(d):
    pts = set(oracle_points(d, 40))
    assert pts
    assert {p.negate_a() for p in pts} == pts
    assert {p.negate_yz() for p in pts} == pts
    assert sum(p.a > 0 for p in pts) == sum(p.a < 0 for p in pts)
    assert sum(p.z > 0 for p in pts) == sum(p.z < 0 for p in pts)
    assert all(1 <= height(p) <= 40 for p in pts)


@pytest.mark.parametrize("backend", kernels.available_backends())
@pytest.mark.parametrize("d", list(DivisorTag))
def test_backends_agree(d, backend):
    for B in (1, 7, 64, 999, 5000):
        assert 4 * count_orbits(d, B, backend=backend) == count(d, B).count


def test_cython_backend_is_default_when_built():
    if "cython" in kernels.available_backends():
        assert kernels.BACKEND in ("cython", "python")  # python only if forced by env
    with pytest.raises(ValueError):
        kernels.get_backend("fortran")


@settings(max_examples=30, deadline=None)
@given(
    d=st.sampled_from(list(DivisorTag)),
    B=st.integers(1, 20000),
    cuts=st.lists(st.integers(0, 200), max_size=6),
)
def test_any_partition_of_the_outer_loop_gives_the_same_total(d, B, cuts):
    lo, hi = outer_range(d, B)
    edges = sorted({lo, hi, *[min(max(c, lo), hi) for c in cuts]})
    pieces = list(zip(edges[:-1], edges[1:]))
    assert 4 * count_orbits(d, B, pieces) == count(d, B).count


@pytest.mark.parametrize("shards", [1, 2, 3, 8])
def test_shard_count_independence(shards):
    assert count_N1(30000, shards=shards).count == count_N1(30000).count
    assert count_N2(30000, shards=shards).count == count_N2(30000).count


def test_split_range():
    assert split_range(1, 11, 3) == [(1, 4), (4, 7), (7, 11)]
    assert split_range(1, 2, 3) == [(1, 1), (1, 1), (1, 2)]
    with pytest.raises(ValueError):
        split_range(1, 5, 0)


@settings(max_examples=20, deadline=None)
@given(d=st.sampled_from(list(DivisorTag)), B=st.integers(1, 5000), step=st.integers(0, 3000))
def test_monotone_in_B(d, B, step):
    assert count(d, B).count <= count(d, B + step).count


def test_n2_monotone_consecutive():
    prev = 0
    for B in range(1, 400):
        cur = count_N2(B).count
        assert cur >= prev
        prev = cur


def test_count_grid():
    assert [r.count for r in count_grid(D1, [10, 100])] == [count_N1(10).count, count_N1(100).count]
    assert count_grid(D2, []) == []
    big = [r.count for r in count_grid(D1, [10**3, 10**4, 10**5])]
    assert big[0] < big[1] < big[2]
    oracle = count_grid(D2, [5, 50], method="oracle")
    assert [r.method for r in oracle] == ["oracle", "oracle"]
    assert [r.count for r in oracle] == [count_N2(5).count, count_N2(50).count]
    with pytest.raises(ValueError):
        count_grid(D1, [100, 10])


def test_bound_validation():
    for bad in (0, -5):
        with pytest.raises(ValueError):
            count_N1(bad)
    with pytest.raises(ValueError):
        count_N2(MAX_FAST_BOUND + 1)
    with pytest.raises(TypeError):
        count_N1(10.0)
    with pytest.raises(ValueError):
        count(D1, 10, method="guess")


def test_result_fields():
    r = count_N2(100)
    assert r.divisor is D2 and r.bound == 100 and r.method == "fast" and r.elapsed >= 0
    assert r.count % 4 == 0  # free (Z/2)^3 action on the reduced set, then halving


@pytest.mark.parametrize(
    "d, c",
    [(D1, 40 / math.pi**2), (D2, 2.854997091)],
)
def test_growth_at_1e5(d, c):
    B = 10**5
    v = count(d, B).count
    assert abs(v / (B * math.log(B)) - c) / c <= 0.25


def test_env_var_forces_pure_python_backend():
    import os
    import subprocess
    import sys

    env = dict(os.environ, TORSORCOUNT_PURE_PYTHON="1")
    code = "from torsorcount import kernels, count_N2; print(kernels.BACKEND, count_N2(5000).count)"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["python", str(count_N2(5000).count)]
