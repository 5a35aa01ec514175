"""Smoke test for the zspecial_py extension module.

Build it with `maturin develop -m crates/python/Cargo.toml --features extension-module`,
or with `python/build_ext.sh`, then run `python3 python/smoke_test.py`.
"""

import json
import sys

import zspecial_py as z


def main():
    f3 = z.Field(3)
    assert f3.modulus == [0, 1]
    f16 = z.Field(2, 4)
    assert f16.modulus == [1, 0, 0, 1, 1], f16.modulus

    a = f16.generator()
    assert a ** 15 == f16.element([1, 0, 0, 0])
    assert a * a.inverse() == f16.element([1])

    direct = z.z_direct(f3, [1, 1])
    ones = z.z_via_ones(f3, [1, 1])
    assert str(direct.poly) == "1 + 2*t0", str(direct.poly)
    assert direct.poly == ones.poly
    assert direct.provenance == "direct"

    assert z.phi_degree(f3, [5]) == 1
    assert z.z_direct(f3, [5]).degree() == 1
    assert z.sheats_degree(f3, 5) == 1
    assert z.z_recursive_ones(z.Field(2), 6).degree() == 6

    assert z.digits_base_q(11, 3) == [2, 0, 1]
    assert z.length_l(11, 3) == 3
    assert z.carry_free(1, 3, 3)
    assert not z.carry_free(2, 1, 3)
    assert z.perm_apply("0:1,1:0", 5, 3) == 7
    assert z.perm_apply("id", 2**70 + 1, 2) == 2**70 + 1

    report = z.trivial_zero_report(f3, [2, 2])
    assert report["multiplicity_at_one"] == 1 and report["predicted_zero"]
    assert z.witness(f3, [2, 2]) == {"ms": [1], "B": 8}
    assert z.twist(z.Field(2, 2), [1, 2], 3)

    d = z.dirichlet(f3, 2, [[0, 1]], [1], 1)
    assert d["paths_agree"] and d["multiplicity_at_one"] == 1
    assert str(d["poly"]) == "1 + 2*t0"

    text = direct.poly.to_json()
    assert json.loads(text)["modulus"] == [0, 1]
    assert z.Poly.from_json(text) == direct.poly

    try:
        z.z_direct(z.Field(2), [1], d_max=30)
    except z.BudgetError as e:
        assert "d = 24" in str(e)
    else:
        raise AssertionError("expected a budget refusal")
    try:
        z.Field(4)
    except z.ZSpecialError as e:
        assert "not prime" in str(e)
    else:
        raise AssertionError("expected an error for p = 4")

    print("smoke test passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
