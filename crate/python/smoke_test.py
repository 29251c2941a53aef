"""Smoke test for the spoofsim_py extension module."""

import cmath
import math

import spoofsim_py as sp


def close(a, b, tol=1e-9):
    return abs(a - b) <= tol * max(1.0, abs(b))


def main():
    a = sp.steering_vector(math.pi / 2, 4, 0.5)
    assert all(close(z, 0.5) for z in a)

    pilots = sp.dft_pilots(8, 2)
    inner = sum(x * y.conjugate() for x, y in zip(pilots[0], pilots[1]))
    assert abs(inner) < 1e-12

    exp = sp.Experiment.preset("fig3")
    assert exp.sweep_variable == "snr_b_db"
    assert exp.n_antennas == 10
    again = sp.Experiment.from_toml(exp.to_toml())
    assert again.sweep_values == exp.sweep_values

    cf = exp.closed_forms()
    assert cf["mmse"] <= cf["mle"] <= cf["lse"]
    lo, hi = cf["lemma1_bounds"]
    assert lo <= cf["lse_floor"] <= hi

    kb = exp.bob_composite()
    ke = exp.eve_composite()
    h = [complex(1, -1), complex(0.5, 2), complex(-1, 0)]
    y = [sum(row[j] * h[j] for j in range(3)) for row in kb]
    est = sp.lse(y, kb)
    assert all(abs(e - t) < 1e-9 for e, t in zip(est, h))
    m1 = sp.mmse(y, kb, ke, 1.0)
    assert len(m1) == 3 and all(cmath.isfinite(z) for z in m1)

    assert close(sp.trunc_lognormal_mean(1e-6, 2e-6), 1.0)
    r = sp.raa_matrix(2 * math.pi / 5, math.pi / 75, math.pi / 25)
    assert close(sum(r[i][i] for i in range(10)).real, 1.0)

    exp.sweep_values = [30.0]
    rows = sp.run_sweep(exp, seed=1, trials=50, estimators=["lse", "mmse"])
    assert [r["estimator"] for r in rows] == ["lse", "mmse"]
    assert rows[1]["nbmse"] < rows[0]["nbmse"]
    assert rows[0]["closed_form_bmse"] is not None

    try:
        sp.Experiment.preset("fig7")
    except ValueError:
        pass
    else:
        raise AssertionError("unknown preset accepted")

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
