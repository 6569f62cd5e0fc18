"""Smoke test for the nilcap Python bindings.

Build first, e.g. `maturin develop -m crates/py/Cargo.toml`, then run
`python python/smoke_test.py`.
"""

import nilcap


def main():
    d8 = nilcap.Group(2, [2, 2])
    assert d8.order == 8
    assert d8.basis == ["x1", "x2", "[x2,x1]"]
    x1, x2 = d8.generator(1), d8.generator(2)
    assert x1 * x2 != x2 * x1
    assert (x1 * x2).order() == 4
    assert (x1 * ~x1).is_identity()
    assert x1 ** 2 == d8.identity()
    z = x1.comm(x2)
    assert str(z) == "[x2,x1]" and z.exponents == [0, 0, 1]
    assert d8.parse(str(z)) == z
    assert len({x1, x1 * d8.identity(), x2}) == 2
    assert [str(c) for c in d8.center()] == ["[x2,x1]"]
    assert d8.center_order() == 2

    g = nilcap.Group(3, [3, 9])
    assert g.order == 3 ** 6
    assert g.center_order() == 27

    big = nilcap.Group(2, [0, 0])
    assert big.order is None
    e = big.element([10**30, 1, 0])
    assert e.exponents[0] == 10**30

    assert nilcap.capable_abelian([2, 2])["decision"] == "Capable"
    assert nilcap.capable_abelian([2, 4])["decision"] == "NotCapable"
    v = nilcap.capable(2, [9, 9], verify=True)
    assert v["decision"] == "Capable" and v["verified"] is True
    assert nilcap.capable(2, [3, 9])["decision"] == "NotCapable"
    assert nilcap.capable_class2(3, 1, 1, 1, 1)["decision"] == "Capable"

    assert nilcap.basic_commutators(2, 3) == ["x1", "x2", "[x2,x1]", "[x2,x1,x1]", "[x2,x1,x2]"]
    assert "kummer" in nilcap.SUITES
    rep = nilcap.run_suite("maxs")
    assert rep["passed"] and rep["failures"] == 0

    try:
        nilcap.Group(9, [4, 4])
    except ValueError:
        pass
    else:
        raise AssertionError("class 9 with 2-groups should be rejected on use")
    print("smoke test ok")


if __name__ == "__main__":
    main()
