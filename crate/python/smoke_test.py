"""Smoke test for the digitwitness extension module.

Build first, e.g. `maturin develop -m crates/py/Cargo.toml`, or copy
target/release/libdigitwitness.so next to this file as digitwitness.so.
"""

import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

import digitwitness as dw


def digit_sum(n, q):
    s = 0
    while n:
        n, r = divmod(n, q)
        s += r
    return s


def main():
    r = dw.witness(2, "1/2")
    assert r.verified and r.witness == 259915775, r
    assert (r.s_u, r.s_fu) == (26, 13)
    assert json.loads(r.to_json())["witness"] == "259915775"

    for q, ratio in [(3, "7/2"), (5, "3/4"), (10, "5/1")]:
        r = dw.witness(q, ratio)
        a, c = map(int, ratio.split("/"))
        assert digit_sum(r.witness**2, q) * c == digit_sum(r.witness, q) * a, (q, ratio)

    f = dw.witness_frac(2, 1, 4, "1/2")
    assert f.verified and f.route == "frac-binomial"

    v = dw.verify_witness(2624, 5)
    assert v.ratio == "1/1"

    n = 12345678901234567890
    assert dw.digit_sum(n, 7) == digit_sum(n, 7)
    assert dw.from_pattern(dw.pattern(n, 3)) == n
    assert dw.expand(10, 2) == [1, 0, 1, 0]
    assert dw.integer_root(10**40 + 5, 4) == 10**10

    table = dw.scan(2, 8)
    assert [(e["ratio"], e["count"]) for e in table["entries"]] == [("1/1", "7"), ("3/2", "1")]
    assert dw.melfi_count(8) == 7
    assert dw.calibrate(2, 1)["d"] == 4

    try:
        dw.witness(1, "1/2")
    except dw.DigitWitnessError as e:
        assert str(e).startswith("invalid-base")
    else:
        raise AssertionError("base 1 accepted")

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
