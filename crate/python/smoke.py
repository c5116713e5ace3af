"""Smoke test for the vr3c extension module.

Build and install first, e.g. `maturin develop -m crates/py/Cargo.toml`.
"""

import math
import os
import sys
import tempfile

import vr3c


def main():
    inst = vr3c.sample_instance(7)
    assert (inst.users, inst.contents) == (5, 10)
    assert inst.validate() == []

    rate = vr3c.transmission_rate(inst, 0, 1.0)
    assert f"{rate:.3e}" == "1.365e+09", rate

    proposed = vr3c.solve(inst)
    assert proposed.converged and proposed.iterations <= 7
    assert math.isclose(sum(proposed.bandwidth), 1.0, abs_tol=1e-9)
    assert proposed.max_cost - proposed.min_cost <= 1e-6 * proposed.max_cost

    local = vr3c.solve(inst, "greedy-local")
    assert local.max_cost >= proposed.max_cost

    trace = vr3c.convergence_trace(inst)
    assert trace == proposed.trace

    zipf = vr3c.build_matrix("zipf", 2, 3, gamma=1.0)
    assert all(math.isclose(a, b) for a, b in zip(zipf[0], [6 / 11, 3 / 11, 2 / 11]))

    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "instance.json")
        inst.save(path)
        again = vr3c.Instance.load(path)
        assert again.to_json() == inst.to_json()

    try:
        vr3c.solve(inst, "nope")
    except ValueError as err:
        assert "unknown scheme" in str(err)
    else:
        raise AssertionError("bad scheme accepted")

    print(f"ok: max cost {proposed.max_cost:.6g} in {proposed.iterations} iterations")
    return 0


if __name__ == "__main__":
    sys.exit(main())
