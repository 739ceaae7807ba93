"""Smoke test for the Python extension.

Build and install with `pip install -e crates/python --no-build-isolation`
(needs maturin), then run `python python/smoke_test.py`.
"""

import math

import gevrey_beam as gb


def main():
    grid = gb.Grid(1, 128, 2 * math.pi)
    u0 = gb.Field.from_initial(grid, {"family": "single_mode", "k": [1], "amplitude": 1.0})
    zero = gb.Field.from_initial(grid, {"family": "zero"})

    # Linear flow of cos(x): u(t) = cos(sqrt(2) t) cos(x) for m = 1.
    linear = gb.State(u0, zero, gb.Params(1.0, 3, coupling=0.0))
    t = 3.7
    u = linear.linear_propagate(t).u.values()[64]  # x = 0 on the centered box
    assert abs(u - math.cos(math.sqrt(2.0) * t)) < 1e-12, u

    # Nonlinear run conserves energy.
    state = gb.State(u0, zero, gb.Params(1.0, 3))
    states, energies = gb.integrate(state, 1.0, 1e-3, scheme="yoshida4", output_stride=100)
    e0, e1 = energies[0]["total"], energies[-1]["total"]
    assert abs(e1 - e0) / e0 < 1e-10, (e0, e1)
    assert len(states) == 11 and abs(states[-1].time - 1.0) < 1e-12

    # Lifted energy at sigma = 0 is the energy.
    assert state.modified_energy(0.0)["value"] == state.energy()["total"]

    # Known radius of an exponential spectrum.
    g = gb.Grid(1, 256, 2 * math.pi)
    f = gb.Field.from_initial(g, {"family": "exp_decay_spectrum", "amplitude": 1.0, "a": 0.3})
    est = f.estimate_radius()
    assert abs(est["sigma_est"] - 0.3) < 1e-6, est

    reports = gb.verify_lemmas(samples=2000, seed=7)
    assert all(r["violations"] == 0 for r in reports), reports

    table = gb.sigma_drift_sweep(states, [0.01, 0.02], 1.0)
    assert len(table["rows"]) == 2

    print("smoke test passed:", len(reports), "lemma checks,", "radius", round(est["sigma_est"], 6))


if __name__ == "__main__":
    main()
