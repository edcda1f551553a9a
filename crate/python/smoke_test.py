"""Smoke test for the pyspherekern extension module.

Build and install first:

    maturin build --release -m crates/python/Cargo.toml
    pip install target/wheels/pyspherekern-*.whl
"""

import math

import pyspherekern as sk


def close(a, b, tol):
    return abs(a - b) <= tol


def main():
    assert close(sk.eval_gegenbauer(1.0, 2, 0.5), 0.0, 1e-14)
    assert close(sk.eval_gegenbauer(0.5, 1, 0.3), 0.3, 1e-14)

    coeffs = sk.expand_profile(lambda t: t * t, 0.5, 4)
    assert close(coeffs[0], 1 / 3, 1e-12) and close(coeffs[2], 2 / 3, 1e-12)

    e = sk.ScalarExpansion(4, [1.0, 0.5, 0.25])
    assert e.is_positive_definite()
    assert close(e.eval([1, 0, 0, 0], [1, 0, 0, 0]), e.profile(1.0), 1e-14)
    back = sk.expand("gegenbauer:2", 4, 6)
    assert close(back[2], 1.0, 1e-9) and all(abs(c) < 1e-9 for i, c in enumerate(back) if i != 2)

    rep = sk.check_pd("neg-dot", 3)
    assert not rep["pass"] and rep["witness"]["min_eigenvalue"] < 0
    assert sk.check_pd("dot", 3)["pass"]
    assert not sk.check_invariance("coord", 4)["pass"]

    cfg = sk.SphereConfig.random(5, 2, seed=3)
    x = [0.6, 0.0, 0.8, 0.0, 0.0]
    v, u = cfg.map_t2(x)
    assert max(abs(a - b) for a, b in zip(cfg.map_t1(v, u), x)) < 1e-12

    bundle = sk.BundleKernel.random(5, 2, seed=1)
    assert bundle.eval(x, x, cfg) >= 0

    d = sk.SphereConfig(4, [[1, 0, 0, 0]]).musin_coefficients("dot", [0.3], [-0.5], 4)
    assert close(d[0], -0.15, 1e-12) and close(d[1], math.sqrt(0.91 * 0.75), 1e-12)

    c = sk.addition_constants(1.5, 1)
    assert close(c[0], 1 / 3, 1e-10) and close(c[1], 1.5, 1e-10)
    assert sk.verify_addition(6, 1, 4, samples=50, seed=7)["pass"]

    cert = sk.lp_bound(8, math.pi / 3)
    assert close(cert["bound"], 240.0, 0.5)
    assert sk.certify(cert)["pass"]
    cert["coefficients"][1] += 10
    assert not sk.certify(cert)["pass"]

    print("pyspherekern smoke test passed")


if __name__ == "__main__":
    main()
