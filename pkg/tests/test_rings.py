import numpy as np
import pytest

from ringlab.config import BudgetExceeded
from ringlab.predicates import (
    annihilators,
    check_matrix_pair,
    cyclic_flat_test,
    is_vnr,
    jacobson_radical,
    matrix_flat_test,
    ring_predicates,
    weakly_semihereditary_test,
)
from ringlab.rings import CORPUS, RingTable, build_ring, verify_axioms

import oracles


@pytest.fixture(scope="module")
def z4():
    return build_ring("zmod(4)")


@pytest.fixture(scope="module")
def ut():
    return build_ring("ut(2,gf(2))")


E12 = 3  # index of the strictly upper triangular unit in ut(2, gf(2))


def test_zmod_tables_match_integer_arithmetic():
    for n in (2, 5, 6, 12):
        R = build_ring(f"zmod({n})")
        add, mul = oracles.zmod_tables(n)
        assert R.add.tolist() == add
        assert R.mul.tolist() == mul


def test_gf4_multiplication_uses_x2_x_1():
    F = build_ring("gf(4)")
    x = [F.label(i) for i in range(4)].index("x")
    assert F.label(int(F.mul[x, x])) == "x+1"


def test_ut_has_nilpotent_e12(ut):
    assert ut.size == 8
    assert ut.label(E12) == "[[0,1],[0,0]]"
    assert int(ut.mul[E12, E12]) == 0


def test_mat2_gf2_products_match_oracle():
    R = build_ring("mat(2,gf(2))")
    mats, mm = oracles.mat2_gf2_products()
    parse = {R.label(i): i for i in range(R.size)}
    key = {m: parse[f"[[{m[0]},{m[1]}],[{m[2]},{m[3]}]]"] for m in mats}
    for a in mats:
        for b in mats:
            assert int(R.mul[key[a], key[b]]) == key[mm(a, b)]


@pytest.mark.parametrize("spec", ["zmod(6)", "mat(2,gf(2))", "nil(gf(3))", "prod(zmod(2),gf(4))"])
def test_axioms_pass(spec):
    assert verify_axioms(build_ring(spec)).ok


def test_corrupted_table_reports_associativity_witness():
    R = build_ring("zmod(4)")
    mul = R.mul.copy()
    mul[2, 2] = 1  # then (2*2)*3 = 3 but 2*(2*3) = 1
    bad = RingTable(R.add.copy(), mul, "broken")
    rep = verify_axioms(bad)
    assert not rep.ok
    assert not rep.checks["mul_associative"]
    a, b, c = rep.failures["mul_associative"]
    assert mul[mul[a, b], c] != mul[a, mul[b, c]]


def test_size_cap():
    with pytest.raises(BudgetExceeded):
        build_ring("mat(2,zmod(4))", max_elements=64)
    assert build_ring("mat(2,zmod(4))", max_elements=256).size == 256


def test_env_cap(monkeypatch):
    monkeypatch.setenv("RINGLAB_MAX_ELEMENTS", "8")
    with pytest.raises(BudgetExceeded):
        build_ring("zmod(9)")


def test_vnr_witnesses(z4, ut):
    v = is_vnr(build_ring("zmod(6)"))
    assert v.holds and v.witness[2] == 2
    v = is_vnr(z4)
    assert not v.holds and v.witness == 2
    v = is_vnr(ut)
    assert not v.holds and v.witness == E12


@pytest.mark.parametrize("spec", CORPUS)
def test_vnr_matches_brute_force(spec):
    R = build_ring(spec)
    add, mul = R.add.tolist(), R.mul.tolist()
    assert is_vnr(R).holds == oracles.is_regular_brute(add, mul)
    assert jacobson_radical(R).tolist() == oracles.radical_brute(add, mul, R.one)


def test_annihilators(z4):
    assert annihilators(z4, "right", [2]).tolist() == [0, 2]
    assert annihilators(build_ring("gf(2)"), "right", [1]).tolist() == [0]
    R6 = build_ring("zmod(6)")
    assert annihilators(R6, "left", annihilators(R6, "right", [2])).tolist() == [0, 2, 4]


def test_annihilators_are_one_sided_ideals(ut):
    for x in range(ut.size):
        A = annihilators(ut, "right", [x])
        assert set(ut.mul[np.ix_(A, np.arange(ut.size))].reshape(-1)) <= set(A.tolist())
        L = annihilators(ut, "left", [x])
        assert set(ut.mul[np.ix_(np.arange(ut.size), L)].reshape(-1)) <= set(L.tolist())


def test_ring_predicates(z4, ut):
    p = ring_predicates(z4)
    assert p.jacobson_radical == [0, 2] and p.is_local and not p.is_reduced
    p = ring_predicates(build_ring("gf(3)"))
    assert p.jacobson_radical == [0] and p.is_simple
    p = ring_predicates(ut)
    assert p.jacobson_radical == [0, E12] and not p.is_simple


def test_cyclic_flat(z4, ut):
    v = cyclic_flat_test(z4)
    assert not v.holds and v.witness == (2, 2)
    assert cyclic_flat_test(build_ring("gf(2)")).holds
    assert cyclic_flat_test(ut).holds


def test_matrix_flat(z4, ut):
    assert matrix_flat_test(build_ring("gf(2)"), 2).holds
    v = matrix_flat_test(z4, 2)
    assert not v.holds and v.detail["mode"] == "exhaustive"
    # the scan reports the lexicographically first pair; 2I is another failing pair
    A, B = v.witness
    assert not check_matrix_pair(z4, A, B)
    assert not check_matrix_pair(z4, [[2, 0], [0, 2]], [[2, 0], [0, 2]])
    v = matrix_flat_test(ut, 2)
    assert v.holds and v.detail["mode"] == "exhaustive"
    v = matrix_flat_test(ut, 2, "sampled", samples=200, seed=4)
    assert v.holds and v.detail["seed"] == 4 and "qualifier" in v.detail
    with pytest.raises(BudgetExceeded):
        matrix_flat_test(ut, 2, "exhaustive", budget=1000)


def test_weakly_semihereditary(z4, ut):
    assert weakly_semihereditary_test(build_ring("gf(2)"), 2).holds
    assert weakly_semihereditary_test(ut, 1).holds
    v = weakly_semihereditary_test(z4, 1)
    assert not v.holds and v.witness == ([[2]], [[2]])


@pytest.mark.parametrize("spec", ["gf(2)", "zmod(6)", "zmod(4)", "zmod(8)", "nil(gf(2))", "ut(2,gf(2))"])
def test_vnr_implies_flat_and_radical_zero(spec):
    R = build_ring(spec)
    vnr = is_vnr(R).holds
    assert vnr == (jacobson_radical(R).tolist() == [0])
    if vnr:
        assert cyclic_flat_test(R).holds and matrix_flat_test(R, 1).holds
    if weakly_semihereditary_test(R, 1).holds:
        assert matrix_flat_test(R, 1).holds
