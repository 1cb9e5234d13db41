"""Quick check of the compiled module. Build it first:

    pip install maturin
    pip install --no-build-isolation -e crates/py
"""

import cmath
import json
import math

import fractal_dims as fd


def main():
    koch = fd.RatioMultiset([(1 / 3, 4)])
    assert abs(koch.similarity_dimension() - math.log(4) / math.log(3)) < 1e-12
    assert koch.lattice_generator() is not None

    cantor = fd.RatioMultiset([(1 / 3, 2)])
    poles = cantor.complex_dimensions(20.0)
    d = math.log(2) / math.log(3)
    period = 2 * math.pi / math.log(3)
    for omega, residue, mult in poles:
        k = round(omega.imag / period)
        assert abs(omega - complex(d, k * period)) < 1e-9
        assert abs(cantor.dirichlet(omega)) < 1e-10
        assert mult == 1
    print(f"cantor: {len(poles)} poles on Re s = {d:.6f}")

    p = fd.GkfParams(4, 0.2)
    assert p.r < p.self_avoidance_bound()
    assert len(p.prefractal(2)) == 26
    flake = p.snowflake(2)
    lows = p.ratios().lower_similarity_dimension()
    assert abs(lows) < 1e-12, lows
    print(f"(4, 0.2): {len(flake)} boundary vertices, lower dimension {lows:.1e}")

    ts = [0.01 * 2**k for k in range(5)]
    seg = fd.SampledFunction(ts, [2 * t + math.pi * t * t for t in ts])
    assert abs(seg.interp(0.02) - (0.04 + math.pi * 4e-4)) < 1e-15

    f = fd.SampledFunction([1e-6 * 10 ** (k / 24) for k in range(24 * 6 + 1)], [1.0] * (24 * 6 + 1))
    value, err = f.mellin(complex(1.5, 2.0), 0.0, 0.5)
    s = complex(1.5, 2.0)
    exact = cmath.exp(s * math.log(0.5)) / s
    assert abs(value - exact) < 1e-10, (value, exact)

    square = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]
    e = fd.heat_content_fdm(square, 1 / 64, [0.01, 0.02])
    mc, sigma = fd.heat_content_mc(square, 0.02, 20000, seed=1)
    assert abs(mc - e.interp(0.02)) < 4 * sigma + 0.02 * mc
    print(f"square E(0.02): fdm {e.interp(0.02):.4f}, mc {mc:.4f} +- {sigma:.4f}")

    doc = json.loads(fd.run_command("dims", json.dumps({"system": {"gkf": {"n": 3, "r": 1 / 3}}})))
    assert doc["verdicts"]["admissible"]
    assert doc["files"] == ["dims.csv"]
    print("dims:", doc["summary"])
    print("ok")


if __name__ == "__main__":
    main()
