from fractions import Fraction

import pytest

import sdmc


def matmul(a, b, q):
    return [[sum(x * y for x, y in zip(row, col)) % q for col in zip(*b)] for row in a]


A = [[1, 2, 3], [4, 5, 6]]
B = [[7, 8], [9, 10], [11, 12]]


def test_field_helpers():
    assert sdmc.find_field(7, 2) == 29
    assert sdmc.primitive_root(29, 7) == 16
    assert sdmc.primitive_root(11, 5) == 4
    coeffs = [3, 1, 4, 1, 5, 9, 2]
    assert sdmc.idft(29, sdmc.dft(29, coeffs)) == coeffs


def test_share_round_trip():
    secret = [[1, 2, 3, 4, 5, 6]]
    shares = sdmc.share(secret, 29, 7, 3, 2, "left", seed=4)
    assert len(shares) == 7
    assert len(shares[0][0]) == 2
    assert sdmc.reconstruct(shares, 29, 3, 2, "left") == secret


def test_secure_product_and_costs():
    c, report = sdmc.multiply(A, B, q=29, n=7, t=2)
    assert c == matmul(A, B, 29) == [[0, 6], [23, 9]]
    assert report["chi_ul"] == "7/3"
    _, own = sdmc.multiply([[1] * 5], [[2]] * 5, q=29, n=7, t=2, variant="own_data")
    assert own["chi_ul"] == "7/5"


def test_descriptor_run_matches_oracle():
    out = sdmc.run({"protocol": "chain", "n": 7, "t": 2, "q": 29, "seed": 2, "gen": ["3x3", "3x3", "3x3"]})
    assert out["result"] == out["expected"]
    assert out["report"]["chi_ul"] == "7/3"


def test_upload_comparison():
    rows = sdmc.upload_comparison(20, 9)
    assert rows[2]["proposed"] == Fraction(5, 4)
    assert rows[2]["secure_matdot"] == Fraction(40, 17)
    assert rows[9]["proposed"] == 10


def test_audit():
    assert sdmc.audit_exhaustive(5, 1, 2, 11)["pass"]
    assert not sdmc.audit_exhaustive(5, 1, 2, 11, colluders=3)["pass"]


def test_errors_carry_codes():
    with pytest.raises(sdmc.SdmcError) as e:
        sdmc.multiply(A, B, q=29, n=4, t=2)
    assert e.value.args[0] == "invalid-parameters"
    with pytest.raises(sdmc.SdmcError) as e:
        sdmc.run({"protocol": "invert", "n": 7, "t": 2, "q": 29,
                  "inputs": [{"q": 29, "rows": 3, "cols": 3, "data": [1, 2, 3, 2, 4, 6, 0, 1, 5]}]})
    assert e.value.args[0] == "singular-matrix"
