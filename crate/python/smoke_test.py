"""Smoke test for the gradedlc_py extension.

Build first, then run with the library on the path:

    cargo build --release -p gradedlc-python
    cp target/release/libgradedlc_py.so python/gradedlc_py.so
    python3 python/smoke_test.py
"""

import gradedlc_py as g

REISNER = [[1, 2, 3], [1, 2, 4], [1, 3, 5], [1, 4, 6], [1, 5, 6],
           [2, 3, 6], [2, 5, 6], [2, 4, 5], [3, 4, 5], [3, 4, 6]]


def exps(n, supports):
    return [[1 if i + 1 in s else 0 for i in range(n)] for s in supports]


def main():
    three = exps(3, [[1, 2], [1, 3], [2, 3]])
    assert g.local_cohomology(3, three)[2]["{1,2,3}"] == "Z^2"
    assert g.bad_primes(3, three) == []

    reisner = exps(6, REISNER)
    assert g.bad_primes(6, reisner) == [2]
    assert g.local_cohomology(6, reisner)[4] == {"{1,2,3,4,5,6}": "Z/2"}
    assert g.support_of(6, reisner, 4) == ["(2, x1, x2, x3, x4, x5, x6)"]

    good = g.lyubeznik(6, reisner, 3, mixed=True)
    assert good["agreement"]["quotient_agrees"] and good["agreement"]["ring_agrees"]
    bad = g.lyubeznik(6, reisner, 2, mixed=True)
    assert bad["agreement"]["quotient_differences"]

    ce = g.verify_counterexample()
    assert ce["all_passed"], ce
    assert g.verify_counterexample(3)["expected_fail_mode"]

    try:
        g.bad_primes(2, [[1]])
    except ValueError:
        pass
    else:
        raise AssertionError("malformed generators accepted")
    print("ok")


if __name__ == "__main__":
    main()
