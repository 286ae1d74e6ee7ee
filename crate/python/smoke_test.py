"""Smoke test for the pyfracmap extension module.

Build with `cargo build --release -p fracmap-py`, copy
`target/release/libpyfracmap.so` to `pyfracmap.so` somewhere on PYTHONPATH,
then run `python3 python/smoke_test.py`.
"""

import math

import pyfracmap as fm


def close(a, b, tol):
    return abs(a - b) <= tol


def main():
    assert close(fm.gamma(5.0), 24.0, 1e-12)
    assert close(fm.beta(2.0, 3.0), 1.0 / 12.0, 1e-14)

    grid = fm.Grid(0.0, 1.0, 512)
    assert grid.n == 512 and close(grid.h, 1.0 / 512, 1e-15)

    f = fm.Function.sample(lambda x: x, grid)
    half = fm.apply("rl_integral", f, 0.5)
    exact = 1.0 / math.gamma(2.5)
    assert close(half.values[-1], exact, 1e-3), half.values[-1]

    const = fm.Function(grid, [2.0] * 513, "hold")
    cap = fm.apply("caputo", const, 0.4)
    assert math.isnan(cap.values[0]) and all(v == 0.0 for v in cap.values[1:])

    assert close(fm.gagliardo_seminorm(f, 2.0, 0.5), 1.0, 1e-2)
    norm = fm.sobolev_norm(f, "2", 0.5)
    assert close(norm["total"], math.hypot(norm["lp_part"], norm["seminorm_part"]), 1e-12)

    z = complex(0.5, 1.0)
    num = fm.mellin_transform(lambda r: fm.censor_kernel(r, 0.5), z)
    assert abs(num - fm.kernel_mellin(z, 0.5)) < 1e-6

    xs = [0.5, 1.0, 2.0]
    v = fm.reconstruct_left_extension(
        lambda x: fm.synthesize_u_from_v(lambda y: math.exp(-y), 0.5, [x])[0], 0.5, xs
    )
    for x, got in zip(xs, v):
        assert close(got, math.exp(-x), 1e-2 * math.exp(-x)), (x, got)

    rows = fm.identity_suite(0.5, "bump:0.8", [64, 128, 256])
    assert rows and all(r["pass"] for r in rows)
    assert all(r["pass"] for r in fm.weight_probe(0.5, [0.3]))

    try:
        fm.apply("caputo", f, 1.5)
    except ValueError as e:
        assert "alpha" in str(e)
    else:
        raise AssertionError("alpha = 1.5 accepted")

    print("pyfracmap smoke test passed")


if __name__ == "__main__":
    main()
