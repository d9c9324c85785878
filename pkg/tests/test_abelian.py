import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ringlab.abelian import (
    AbHom,
    AffineSystem,
    BlockSystem,
    Subgroup,
    check_snf,
    decode,
    encode,
    endo_matrix,
    group_structure,
    invariant_factors,
    snf,
    solve_affine,
    subgroup_order,
)
from ringlab.rings import build_ring


def test_group_structure_factors():
    assert group_structure(build_ring("zmod(4)").add).factors == (4,)
    assert group_structure(build_ring("gf(4)").add).factors == (2, 2)
    assert group_structure(build_ring("mat(2,gf(2))").add).factors == (2, 2, 2, 2)


def test_group_round_trip():
    G = group_structure(build_ring("prod(zmod(4),zmod(6))").add)
    for x in range(G.order):
        assert G.elem(G.vec(x)) == x


def test_snf_examples():
    U, S, V = snf([[2, 0], [0, 3]])
    assert S == [[1, 0], [0, 6]]
    assert check_snf([[2, 0], [0, 3]], U, S, V)
    U, S, V = snf([[1, 0], [0, 1]])
    assert S == U == V == [[1, 0], [0, 1]]
    assert snf([[0]])[1] == [[0]]


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(st.integers(-20, 20), min_size=3, max_size=3), min_size=1, max_size=4))
def test_snf_is_unimodular_diagonalisation(rows):
    U, S, V = snf(rows)
    assert check_snf(rows, U, S, V)
    diag = [S[i][i] for i in range(min(len(S), len(S[0])))]
    nz = [d for d in diag if d]
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))


def test_invariant_factors():
    assert invariant_factors([[2, 0], [0, 3]], 2) == [6]
    assert invariant_factors([[4]], 1) == [4]


def test_solve_affine_examples():
    hom = AbHom(np.array([[2]]), (4,), (4,))
    sol = solve_affine(AffineSystem(hom, [2]))
    assert sol.particular.tolist() == [1]
    assert sorted(map(int, sol.kernel.elements()[:, 0])) == [0, 2]
    assert sol.count == 2
    assert solve_affine(AffineSystem(hom, [1])) is None


def test_kernel_and_image_orders():
    hom = AbHom(np.array([[2]]), (4,), (4,))
    assert subgroup_order(hom.kernel()) == 2
    assert subgroup_order(hom.image()) == 2


def test_endo_matrix():
    R = build_ring("zmod(4)")
    assert endo_matrix(lambda x: int(R.mul[x, 2]), R.group).matrix.tolist() == [[2]]
    assert not endo_matrix(lambda x: 0, R.group).matrix.any()
    ut = build_ring("ut(2,gf(2))")
    h = endo_matrix(lambda x: int(ut.mul[x, 3]), ut.group)
    assert h.matrix.shape == (3, 3)
    for x in range(ut.size):
        assert ut.group.elem(h(ut.group.vec(x))) == ut.mul[x, 3]


def test_endo_matrix_rejects_non_additive():
    R = build_ring("zmod(4)")
    with pytest.raises(ValueError):
        endo_matrix(lambda x: int(R.mul[x, x]), R.group)


def _brute_solutions(M, t, src, tgt):
    out = []
    for x in itertools.product(*[range(m) for m in src]):
        if all((int(np.dot(M[i], x)) - t[i]) % tgt[i] == 0 for i in range(len(tgt))):
            out.append(x)
    return out


moduli = st.sampled_from([2, 3, 4, 6, 8, 9, 12])


@settings(max_examples=150, deadline=None)
@given(st.data())
def test_solve_affine_matches_enumeration(data):
    src = tuple(data.draw(st.lists(moduli, min_size=1, max_size=3)))
    tgt = tuple(data.draw(st.lists(moduli, min_size=1, max_size=3)))
    # only homomorphisms: column j must be killed by src[j] in every target coordinate
    M = np.zeros((len(tgt), len(src)), dtype=np.int64)
    for i, q in enumerate(tgt):
        for j, p in enumerate(src):
            g = np.gcd(p, q)
            M[i, j] = data.draw(st.integers(0, g - 1)) * (q // g)
    t = np.array([data.draw(st.integers(0, q - 1)) for q in tgt])
    sol = solve_affine(AffineSystem(AbHom(M, src, tgt), t))
    brute = _brute_solutions(M, t, src, tgt)
    if not brute:
        assert sol is None
        return
    assert sol is not None
    assert sol.count == len(brute)
    assert tuple(int(v) for v in sol.particular) in set(brute)
    got = {tuple(int(v) for v in (sol.particular + k) % np.array(src)) for k in sol.kernel.elements()}
    assert got == set(brute)


def test_subgroup_membership_and_elements():
    S = Subgroup((4, 6), [[2, 3]])
    assert S.order == 2
    assert S.contains([2, 3]) and not S.contains([1, 0])
    assert [list(map(int, e)) for e in S.elements()] == [[0, 0], [2, 3]]
    assert Subgroup((), []).order == 1


def test_encode_decode_round_trip():
    mods = (2, 3, 4)
    codes = np.arange(24)
    assert encode(decode(codes, mods), mods).tolist() == codes.tolist()


def test_block_system_two_unknowns():
    # x + y = 1 and 2x = 0 over Z/4
    bs = BlockSystem()
    bs.var("x", (4,))
    bs.var("y", (4,))
    e = bs.equation((4,))
    bs.coef(e, "x", [[1]])
    bs.coef(e, "y", [[1]])
    bs.rhs(e, [1])
    e = bs.equation((4,))
    bs.coef(e, "x", [[2]])
    sol = bs.solve()
    assert sol is not None and sol.count == 2
    x, y = sol.particular[bs.var_slice("x")][0], sol.particular[bs.var_slice("y")][0]
    assert (x + y) % 4 == 1 and (2 * x) % 4 == 0
    assert bs.kernel().order == 2
