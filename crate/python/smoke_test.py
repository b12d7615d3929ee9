"""Smoke test for the fracstab extension module.

Build and install first, e.g.

    pip install maturin
    maturin build --release -m crates/python/Cargo.toml
    pip install target/wheels/fracstab-*.whl
"""

import math

import fracstab


def close(x, y, tol):
    return abs(x - y) <= tol


def main():
    a, omega = fracstab.a_star(1.0, 1.0, 0.5)
    assert close(a, -1.5, 1e-12) and close(omega, 2.0, 1e-12), (a, omega)
    assert abs(fracstab.delta_eval(2j, a, 1.0, 1.0, 0.5)) < 1e-12
    assert fracstab.transversality(1.0, 1.0, 0.5) < 0.0

    v = fracstab.classify(0.0, 1.0, -1.0, 0.5)
    assert v.kind == "Unstable" and v.order_independent
    t = fracstab.CharTriple(0.5, 1.0, 1.0, 0.5)
    assert t.classify().is_stable
    roots = fracstab.oracle_roots(0.5, 1.0, 1.0, 1, 2)
    assert max(r.real for r in roots) < 0.0

    assert close(fracstab.ml_reference(1.0, 1.0), math.exp(-1.0), 1e-14)

    p = fracstab.MLParams()
    d = fracstab.nondimensionalize(p)
    assert close(d.gamma_l, 0.5, 1e-15) and close(d.phi, 1.0 / 3000.0, 1e-18)
    assert close(d.current_scale, 480.0, 1e-12)

    sp = dict(fracstab.special_points(p))
    assert close(sp["V_alpha"], -29.568, 0.005)
    assert close(sp["I_max"], 39.6935, 0.005)
    assert close(sp["V_prime"], -31.403, 0.005)

    eqs = fracstab.equilibria(0.0, p)
    assert [e.branch for e in eqs] == ["B1", "B2", "B3"]
    assert eqs[0].verdict.is_stable

    q_star = fracstab.critical_q(-30.0, p)
    assert q_star is not None and 0.0 < q_star < 1.0

    p40 = fracstab.MLParams(I=40.0, q=0.8)
    t_ms, v_mv, n, diverged = fracstab.simulate(p40, 400.0, dt_ms=0.2)
    assert not diverged and len(t_ms) == 2001
    assert len(fracstab.spike_times(t_ms, v_mv)) >= 1

    print("fracstab smoke test passed")


if __name__ == "__main__":
    main()
