import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scaleop.field import BUILTIN_MODULI, FieldSpec, get_field

from oracles import (
    oracle_inverse,
    oracle_mul,
    oracle_pow,
    oracle_squares,
    oracle_trace,
)


# -- construction and validation ---------------------------------------------------


def test_even_characteristic_rejected():
    with pytest.raises(ValueError):
        FieldSpec(2)
    with pytest.raises(ValueError):
        get_field(4)


def test_caps_enforced():
    with pytest.raises(ValueError):
        FieldSpec(65537)  # above the prime cap
    with pytest.raises(ValueError):
        FieldSpec(3, 8)  # 6561 above the prime-power cap


def test_reducible_modulus_rejected():
    # t^2 - 1 = (t-1)(t+1)
    with pytest.raises(ValueError):
        FieldSpec(3, 2, [2, 0, 1])
    # t^2 + 2t + 1 = (t+1)^2
    with pytest.raises(ValueError):
        FieldSpec(3, 2, [1, 2, 1])
    # degree-4 example with no roots but a quadratic factor: (t^2+1)^2 over F_3
    with pytest.raises(ValueError):
        FieldSpec(3, 4, [1, 0, 2, 0, 1])


def test_custom_irreducible_modulus_accepted():
    # t^2 + t + 2 over F_3: values at 0,1,2 are 2, 1, 2 -- no roots
    spec = FieldSpec(3, 2, [2, 1, 1])
    assert spec.q == 9
    t = spec.element([0, 1])
    assert (t * t).idx == spec.element([1, 2]).idx  # t^2 = -t - 2 = 2t + 1


def test_non_prime_power_rejected():
    with pytest.raises(ValueError):
        get_field(15)


def test_serialization_roundtrip(any_spec):
    again = FieldSpec.from_dict(any_spec.to_dict())
    assert again == any_spec
    assert again.to_dict() == any_spec.to_dict()


def test_identity_indices(any_spec):
    assert any_spec.zero().idx == 0
    assert any_spec.one().idx == 1


# -- arithmetic examples ------------------------------------------------------------


def test_add_examples():
    f3 = get_field(3)
    assert (f3.element(1) + f3.element(2)).idx == 0
    f9 = get_field(9)
    t = f9.element([0, 1])
    assert (t + t) == f9.element([0, 2])
    f5 = get_field(5)
    assert (f5.element(3) + f5.element(4)).idx == 2


def test_mul_reduction_example():
    f9 = get_field(9)
    t = f9.element([0, 1])
    expected = oracle_mul(t.idx, t.idx, 3, 2, BUILTIN_MODULI[9])
    assert expected == 2  # t^2 = -1 = 2
    assert (t * t).idx == expected


def test_inverse_example_and_exhaustive():
    f7 = get_field(7)
    assert oracle_inverse(3, 7, 1, (0, 1)) == 5
    assert f7.element(3).inverse().idx == 5
    for q in (7, 9, 27):
        spec = get_field(q)
        for a in range(1, q):
            inv = spec.inv_idx(a)
            assert spec.mul_idx(a, inv) == 1


def test_lagrange_pow(any_spec):
    q = any_spec.q
    idx = np.arange(1, q, dtype=np.int64)
    assert np.all(any_spec.pow_idx(idx, q - 1) == 1)


def test_pow_matches_oracle():
    spec = get_field(9)
    mod = BUILTIN_MODULI[9]
    for a in range(9):
        for e in range(5):
            assert spec.pow_idx(a, e) == oracle_pow(a, e, 3, 2, mod)


# -- exhaustive field axioms (q <= 49) ------------------------------------------------


def test_field_axioms_exhaustive(any_spec):
    q = any_spec.q
    idx = np.arange(q, dtype=np.int64)
    a = np.repeat(idx, q)
    b = np.tile(idx, q)
    add = any_spec.add_idx(a, b)
    mul = any_spec.mul_idx(a, b)
    # commutativity
    assert np.array_equal(add.reshape(q, q), add.reshape(q, q).T)
    assert np.array_equal(mul.reshape(q, q), mul.reshape(q, q).T)
    # identities and inverses
    assert np.array_equal(any_spec.add_idx(idx, 0), idx)
    assert np.array_equal(any_spec.mul_idx(idx, 1), idx)
    assert np.all(any_spec.add_idx(idx, any_spec.neg_idx(idx)) == 0)
    # associativity and distributivity on the full triple product
    a3 = np.repeat(idx, q * q)
    b3 = np.tile(np.repeat(idx, q), q)
    c3 = np.tile(idx, q * q)
    assert np.array_equal(
        any_spec.add_idx(any_spec.add_idx(a3, b3), c3),
        any_spec.add_idx(a3, any_spec.add_idx(b3, c3)),
    )
    assert np.array_equal(
        any_spec.mul_idx(any_spec.mul_idx(a3, b3), c3),
        any_spec.mul_idx(a3, any_spec.mul_idx(b3, c3)),
    )
    assert np.array_equal(
        any_spec.mul_idx(a3, any_spec.add_idx(b3, c3)),
        any_spec.add_idx(any_spec.mul_idx(a3, b3), any_spec.mul_idx(a3, c3)),
    )


# -- trace ---------------------------------------------------------------------------


def test_trace_examples():
    f9 = get_field(9)
    assert f9.element([0, 1]).trace() == 0  # t + t^3 = 0
    assert f9.element(1).trace() == 2
    f7 = get_field(7)
    for x in range(7):
        assert f7.element(x).trace() == x


def test_trace_matches_frobenius_oracle():
    for q, (p, alpha) in ((9, (3, 2)), (27, (3, 3)), (25, (5, 2))):
        spec = get_field(q)
        mod = BUILTIN_MODULI[q]
        for a in range(q):
            assert spec.trace_idx(a) == oracle_trace(a, p, alpha, mod)


def test_trace_linear_and_equidistributed(any_spec):
    q, p = any_spec.q, any_spec.p
    idx = np.arange(q, dtype=np.int64)
    a = np.repeat(idx, q)
    b = np.tile(idx, q)
    lhs = any_spec.trace_idx(any_spec.add_idx(a, b))
    rhs = (any_spec.trace_idx(a) + any_spec.trace_idx(b)) % p
    assert np.array_equal(lhs, rhs)
    counts = np.bincount(np.asarray(any_spec._trace), minlength=p)
    assert np.all(counts == q // p)


# -- quadratic character and square roots ----------------------------------------------


def test_eta_examples():
    f7 = get_field(7)
    squares = oracle_squares(7, 1, (0, 1))
    assert 2 in squares and squares[2] == 3  # 3^2 = 2 mod 7
    assert f7.element(2).eta() == 1
    assert 3 not in squares
    assert f7.element(3).eta() == -1
    assert f7.element(0).eta() == 0


def test_eta_multiplicative_and_square_count(any_spec):
    q = any_spec.q
    idx = np.arange(1, q, dtype=np.int64)
    a = np.repeat(idx, q - 1)
    b = np.tile(idx, q - 1)
    assert np.array_equal(
        any_spec.eta_idx(any_spec.mul_idx(a, b)),
        any_spec.eta_idx(a) * any_spec.eta_idx(b),
    )
    assert int(np.sum(any_spec.eta_idx(idx) == 1)) == (q - 1) // 2


def test_sqrt_examples_and_consistency(any_spec):
    f7 = get_field(7)
    assert f7.element(2).sqrt().idx == 3  # 3 < 4 = -3
    assert f7.element(3).sqrt() is None
    assert f7.element(0).sqrt().idx == 0
    squares = oracle_squares(any_spec.p, any_spec.alpha, any_spec.modulus)
    for t in range(any_spec.q):
        r = any_spec.sqrt_idx(t)
        if any_spec.eta_idx(t) == -1:
            assert r == -1
            assert t not in squares
        else:
            assert r == squares[t]
            assert any_spec.mul_idx(r, r) == t


# -- element wrapper -----------------------------------------------------------------


def test_mismatched_fields_rejected():
    a = get_field(3).element(1)
    b = get_field(5).element(1)
    with pytest.raises(ValueError):
        a + b
    with pytest.raises(ValueError):
        a * b


def test_inverse_of_zero_rejected(spec):
    with pytest.raises(ZeroDivisionError):
        spec.element(0).inverse()


@settings(max_examples=60, deadline=None)
@given(
    q=st.sampled_from((3, 5, 7, 9, 25, 27, 49)),
    data=st.data(),
)
def test_field_axioms_random_triples(q, data):
    spec = get_field(q)
    a = spec.element(data.draw(st.integers(0, q - 1)))
    b = spec.element(data.draw(st.integers(0, q - 1)))
    c = spec.element(data.draw(st.integers(0, q - 1)))
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    if not b.is_zero():
        assert (a * b) * b.inverse() == a
