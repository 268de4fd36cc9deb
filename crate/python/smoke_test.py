"""Smoke test for the algcirc_py extension module.

Build the module first, either with `maturin develop` or with

    cargo build -p algcirc-python --release --features extension-module
    cp target/release/libalgcirc_py.so python/algcirc_py.so
"""

import json
import math
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import algcirc_py as ac

SQUARED = """field p 3 ext 1 modulus [0 1]
nvars 2
kind circuit
gate 0 input 0
gate 1 input 1
gate 2 mul 0 [1] 1 [2]
gate 3 const [1]
gate 4 add 2 [1] 3 [1]
gate 5 mul 4 [1] 4 [1]
gate 6 mul 5 [1] 4 [1]
output 6
"""

ZERO = "field p 2 ext 1 modulus [0 1]\nnvars 1\nkind circuit\ngate 0 const [0]\noutput 0\n"


def main():
    assert ac.metrics(SQUARED) == ("circuit", 2, 7, 3, 6)

    root = ac.pth_root(SQUARED)
    assert root.startswith("# transform pth-root-circuit")
    [poly] = ac.expand(root)
    assert poly.splitlines()[2:] == ["[1 1] : [2]", "[0 0] : [1]"], poly

    verdict = json.loads(ac.pit_brute(ZERO))
    assert verdict["is_zero"] is True and verdict["witness"] is None
    assert json.loads(ac.pit_random(SQUARED, seed=1))["is_zero"] is False

    sets = ac.rs_design(9, 3, 2, 2)
    assert len(sets) == 9 and all(len(s) == 3 for s in sets)
    ell, greedy = ac.greedy_design(16, 8)
    assert len(greedy) == 16 and ell >= 8

    assert ac.slp_pow2(1000)[0] == 2**1000 and ac.slp_pow2(1000)[1] <= 22
    assert ac.slp_factorial(30)[0] == math.factorial(30)
    assert ac.slp_pow2_factorial(5)[0] == math.factorial(32)
    assert ac.binomial_window(3) == (True, "22", "22")
    assert ac.binomial_window(2) == (False, "7", "8")

    try:
        ac.expand(SQUARED, max_degree=2)
    except ac.ResourceError:
        pass
    else:
        raise AssertionError("degree cap not enforced")
    try:
        ac.metrics("nonsense")
    except ValueError as e:
        assert "parse error" in str(e)
    else:
        raise AssertionError("parse error not raised")

    print("algcirc_py smoke test passed")


if __name__ == "__main__":
    main()
