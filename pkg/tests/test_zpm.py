from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from almostperiods.errors import NotAComplexError, ParameterMismatchError
from almostperiods.zpm import (
    ZpmMatrix,
    cohomology,
    howell_form,
    kernel_basis,
    matmul_mod,
    p_valuation,
    quotient_invariants,
    same_span,
    span_contains,
)


def _m(rows, p=2, m=2):
    return ZpmMatrix.from_rows(p, m, rows)


def test_entries_are_reduced():
    A = _m([[5, -1]])
    assert A.data.tolist() == [[1, 3]]
    with pytest.raises(ValueError):
        ZpmMatrix.from_rows(4, 1, [[1]])
    with pytest.raises(ParameterMismatchError):
        _m([[1]]) @ _m([[1]], p=3)


def test_p_valuation():
    assert p_valuation(12, 2, 5) == 2
    assert p_valuation(0, 3, 4) == 4


def test_matmul_mod_matches_exact_product():
    rng = np.random.default_rng(0)
    a = rng.integers(0, 3**10, size=(3, 4))
    b = rng.integers(0, 3**10, size=(4, 2))
    exact = (a.astype(object) @ b.astype(object)) % 3**10
    assert np.array_equal(matmul_mod(a, b, 3**10), exact.astype(np.int64))


def test_howell_form_closure_rows():
    form = howell_form(_m([[2, 1]]))
    # span{(2, 1)} over Z/4 has four elements: (2, 1) has order 4
    assert form.log_size() == 2
    assert span_contains(form, np.array([0, 2]))
    assert not span_contains(form, np.array([0, 1]))
    assert form.H.equals(form.U @ _m([[2, 1]]))


def test_same_span_is_basis_independent():
    assert same_span(_m([[1, 1], [0, 2]]), _m([[1, 3], [0, 2], [1, 1]]))
    assert not same_span(_m([[2, 0]]), _m([[1, 0]]))


def test_kernel_basis():
    K = kernel_basis(_m([[2]]))
    assert K.data.tolist() == [[2]]
    A = _m([[1, 1, 0], [0, 2, 2]])
    K = kernel_basis(A)
    assert (A @ K.T).is_zero()
    # the kernel {x : x0 + x1 = 0, 2 x1 + 2 x2 = 0} has 2 * 4 = 8 elements
    assert howell_form(K).log_size() == 3


def test_quotient_invariants():
    Z = ZpmMatrix.zeros(2, 2, 0, 1)
    free = quotient_invariants(_m([[1]]), Z)
    assert free.free_rank == 1 and free.orders == ()
    assert free.annihilator_valuation() == 2
    torsion = quotient_invariants(_m([[1]]), _m([[2]]))
    assert torsion.orders == (1,) and torsion.free_rank == 0
    assert torsion.to_json() == {"orders": ["1/1"], "free_rank": 0}


def test_cohomology_of_small_complexes():
    two = _m([[2]])
    assert cohomology(two, two).is_zero()
    h = cohomology(_m([[0]]), two)
    assert h.valuations() == (Fraction(1),)
    with pytest.raises(NotAComplexError):
        cohomology(_m([[1]]), _m([[1]]))


def test_json_form():
    A = _m([[1, 2], [3, 0]])
    data = A.to_json()
    assert data == {"p": 2, "m": 2, "rows": 2, "cols": 2, "entries": [[1, 2], [3, 0]]}
    assert ZpmMatrix.from_json(data).equals(A)


# ── Random identities ────────────────────────────────────────────────────────


def _unimodular(rng, p, m, n):
    mod = p**m
    upper = np.triu(rng.integers(0, mod, size=(n, n)), 1) + np.eye(n, dtype=np.int64)
    units = [int(u) for u in rng.integers(1, mod, size=n)]
    units = [u if u % p else u + 1 for u in units]
    scaled = upper * np.array(units, dtype=np.int64)[:, None]
    return ZpmMatrix(p, m, scaled[rng.permutation(n)])


@pytest.mark.parametrize("p,m", [(2, 3), (3, 2)])
def test_howell_form_of_row_equivalent_matrices(rng, p, m):
    for _ in range(15):
        A = ZpmMatrix(p, m, rng.integers(0, p**m, size=(3, 4)))
        B = _unimodular(rng, p, m, 3) @ A
        assert howell_form(A).H.equals(howell_form(B).H)
        combo = ZpmMatrix(p, m, rng.integers(0, p**m, size=(1, 3))) @ A
        assert same_span(A, A.vstack(combo))
        assert howell_form(A).H.equals(howell_form(B.vstack(combo)).H)
