import math

import numpy as np
import pytest

from oystergen.rng import Rng, derive_seed, fnv1a64


def test_fnv1a64_known_vectors():
    # Published FNV-1a 64-bit test values.
    assert fnv1a64(b"") == 0xCBF29CE484222325
    assert fnv1a64(b"a") == 0xAF63DC4C8601EC8C
    assert fnv1a64(b"foobar") == 0x85944171F73967E8


def test_stream_is_deterministic():
    a = Rng(12345)
    b = Rng(12345)
    assert [a.next_u64() for _ in range(100)] == [b.next_u64() for _ in range(100)]


def test_stream_regression_values():
    # Frozen stream contract; changing these breaks every golden file.
    r = Rng(0)
    assert [r.next_u64() for _ in range(3)] == [
        16294208416658607535,
        7960286522194355700,
        487617019471545679,
    ]


def test_random_range_and_resolution():
    r = Rng(7)
    vals = [r.random() for _ in range(10000)]
    assert all(0.0 <= v < 1.0 for v in vals)
    assert abs(np.mean(vals) - 0.5) < 0.02


def test_randint_bounds_and_coverage():
    r = Rng(3)
    draws = [r.randint(4, 9) for _ in range(6000)]
    assert set(draws) == {4, 5, 6, 7, 8, 9}
    with pytest.raises(ValueError):
        r.randint(5, 4)


def test_normal_moments():
    r = Rng(11)
    vals = np.array([r.normal(2.0, 3.0) for _ in range(20000)])
    assert abs(vals.mean() - 2.0) < 0.08
    assert abs(vals.std() - 3.0) < 0.08


def test_normal_zero_sigma_is_exact():
    r = Rng(5)
    assert all(r.normal(1.5, 0.0) == 1.5 for _ in range(10))


def test_box_muller_consumes_pairs():
    # Two uniforms per gaussian pair: stream position after 2 normals
    # equals position after 2 raw uniforms.
    a = Rng(99)
    a.normal()
    a.normal()
    b = Rng(99)
    b.random()
    b.random()
    assert a.next_u64() == b.next_u64()


def test_normal_values_follow_box_muller():
    a = Rng(1234)
    z0 = a.normal()
    z1 = a.normal()
    b = Rng(1234)
    u1 = b.random()
    u2 = b.random()
    radius = math.sqrt(-2.0 * math.log(1.0 - u1))
    assert z0 == radius * math.cos(2.0 * math.pi * u2)
    assert z1 == radius * math.sin(2.0 * math.pi * u2)


def test_derive_seed_stable_and_distinct():
    assert derive_seed(0, "shell", 0) == derive_seed(0, "shell", 0)
    assert derive_seed(0, "shell", 0) != derive_seed(0, "shell", 1)
    assert derive_seed(0, "shell", 0) != derive_seed(0, "scene", 0)
    assert derive_seed(1, "shell", 0) != derive_seed(0, "shell", 0)


def test_derive_seed_no_collisions_at_desk_scale():
    seen = set()
    for label in ("shell", "scene", "mask"):
        for master in range(20):
            for idx in range(2000):
                seen.add(derive_seed(master, label, idx))
    assert len(seen) == 3 * 20 * 2000
