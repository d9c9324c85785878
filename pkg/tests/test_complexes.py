import numpy as np
import pytest

from ringlab.complexes import (
    ChainComplex,
    ChainMap,
    ComplexError,
    SplitError,
    chain_map_group,
    free_complex,
    homology,
    homotopy_classes,
    identity_map,
    induced_on_homology,
    is_homology_zero,
    null_homotopy,
    realize_as_h1,
    realize_cycles,
    sphere,
    sphere_disk,
    split_decomposition,
)
from ringlab.modules import ModuleMap, Presentation, free_module, module_from_presentation
from ringlab.pool import enumerate_pool
from ringlab.rings import build_ring

import oracles


@pytest.fixture(scope="module")
def z4():
    return build_ring("zmod(4)")


@pytest.fixture(scope="module")
def P2(z4):
    """R -(2)-> R over Z/4 in degrees 1, 0."""
    return free_complex(z4, {0: 1, 1: 1}, {1: [[2]]})


def pair_map(P, a, b):
    """phi = (a, b): multiplication by a in degree 1 and by b in degree 0."""
    R1 = P.term(0)
    return ChainMap(P, P, {1: ModuleMap.from_images(R1, R1, [a]), 0: ModuleMap.from_images(R1, R1, [b])})


def test_build_rejects_d_squared(z4):
    assert free_complex(z4, {0: 1, 1: 1, 2: 1}, {1: [[2]], 2: [[2]]}).hi == 2
    with pytest.raises(ComplexError) as e:
        free_complex(z4, {0: 1, 1: 1, 2: 1}, {1: [[1]], 2: [[1]]})
    assert e.value.element == 1 and e.value.degree == 2


def test_empty_complex(z4):
    C = ChainComplex(z4, {})
    assert list(C.degrees) == [] and homology(C).is_zero()


def test_spheres_and_disks(z4):
    M = module_from_presentation(Presentation(z4, 1, [[2]]))
    S = sphere_disk(M, 3, "S")
    assert {n: S.homology.order(n) for n in S.degrees} == {3: 2}
    D = sphere_disk(free_module(z4, 1), 1, "D")
    assert D.term(1).size == D.term(0).size == 4
    assert D.homology.is_zero()


def test_homology_orders(z4, P2):
    H = homology(P2)
    assert (H.order(0), H.order(1)) == (2, 2)
    assert oracles.homology_orders(z4, {0: 1, 1: 1}, {1: [[2]]}) == {0: 2, 1: 2}
    R6 = build_ring("zmod(6)")
    P = free_complex(R6, {0: 1, 1: 1}, {1: [[3]]})
    assert (P.homology.order(0), P.homology.order(1)) == (3, 3)


def test_chain_map_group_orders(z4, P2):
    ps = chain_map_group(P2, P2)
    census = oracles.chain_map_census(z4, ({0: 1, 1: 1}, {1: [[2]]}), ({0: 1, 1: 1}, {1: [[2]]}))
    assert (ps.chain_order, ps.hzero_order, ps.null_order) == census == (8, 4, 2)
    assert ps.chain_subgroup.contains(ps.vec_of(identity_map(P2)))


@pytest.mark.parametrize("spec", ["zmod(4)", "nil(gf(2))", "zmod(6)", "zmod(8)"])
def test_pair_orders_match_census(spec):
    R = build_ring(spec)
    pool = enumerate_pool(R, 1, 3)
    specs = pool.complexes[:8]
    for a in specs:
        for b in specs:
            P, Q = pool.build(a), pool.build(b)
            ps = chain_map_group(P, Q)
            want = oracles.chain_map_census(R, _ranks_mats(a), _ranks_mats(b))
            assert (ps.chain_order, ps.hzero_order, ps.null_order) == want


def _ranks_mats(spec):
    ranks = {spec.lo + i: r for i, r in enumerate(spec.ranks)}
    mats = {}
    for n in range(spec.lo + 1, spec.hi + 1):
        mats[n] = np.asarray(spec.matrix(n)).reshape(ranks[n - 1], ranks[n]).tolist()
    return ranks, mats


def test_induced_on_homology(P2):
    ind = induced_on_homology(identity_map(P2))
    assert all((f.table == np.arange(f.source.size)).all() for f in ind.values())
    assert is_homology_zero(pair_map(P2, 2, 0))


def test_null_homotopy_examples(P2):
    assert null_homotopy(pair_map(P2, 2, 0)) is None
    assert null_homotopy(pair_map(P2, 2, 0), "oracle") is None
    h = null_homotopy(pair_map(P2, 2, 2))
    assert h is not None and h.describe()["0"] == [1]
    D = sphere_disk(free_module(P2.ring, 1), 1, "D")
    assert null_homotopy(identity_map(D)) is not None


def test_homotopy_classes(z4, P2):
    hc = homotopy_classes(P2, P2)
    assert hc.order == 4 and hc.target_order == 4
    assert not hc.injective and not hc.surjective
    assert hc.kernel_witness is not None and null_homotopy(hc.kernel_witness) is None
    g2 = build_ring("gf(2)")
    P = free_complex(g2, {0: 1, 1: 1}, {1: [[0]]})
    assert homotopy_classes(P, P).bijective


def test_classes_from_sphere(z4):
    S0 = sphere(free_module(z4, 1), 0)
    Q = free_complex(z4, {0: 1, 1: 1}, {1: [[2]]})
    hc = homotopy_classes(S0, Q)
    assert hc.order == Q.homology.order(0)


def test_split_examples(z4):
    g2 = build_ring("gf(2)")
    res = split_decomposition(free_complex(g2, {0: 1, 1: 1}, {1: [[0]]}))
    assert {n: res.spheres.term(n).size for n in res.spheres.degrees} == {0: 2, 1: 2}
    R6 = build_ring("zmod(6)")
    res = split_decomposition(free_complex(R6, {0: 1, 1: 1}, {1: [[3]]}))
    assert {n: res.spheres.term(n).size for n in res.spheres.degrees} == {0: 3, 1: 3}
    assert {n: B.size for n, B in res.disks.items()} == {1: 2}
    with pytest.raises(SplitError) as e:
        split_decomposition(free_complex(z4, {0: 1, 1: 1}, {1: [[2]]}))
    assert e.value.module_kind == "homology" and e.value.degree == 0 and e.value.module.size == 2


def test_realize_as_h1(z4):
    r = realize_as_h1(Presentation(z4, 1), [2], [[2]])
    assert r.complex.homology.order(1) == 2
    assert r.iso.is_injective() and r.iso.is_surjective()
    r = realize_as_h1(Presentation(z4, 1), [], [[1]])
    assert r.complex.homology.order(1) == 1
    R6 = build_ring("zmod(6)")
    r = realize_as_h1(Presentation(R6, 1), [2], [[3]])
    assert r.complex.homology.order(1) == 3
    with pytest.raises(ValueError):
        realize_as_h1(Presentation(z4, 1), [2], [[1]])


def test_realize_cycles(z4, P2):
    r = realize_cycles(P2, 1)
    assert r.complex.homology.H[1].size == P2.homology.Z[1].size


def test_functoriality_on_compositions(z4, P2):
    rng = np.random.default_rng(3)
    ps = chain_map_group(P2, P2)
    elems = ps.chain_subgroup.elements()
    for _ in range(10):
        f = ps.chain_map(elems[rng.integers(len(elems))])
        g = ps.chain_map(elems[rng.integers(len(elems))])
        hf, hg, hgf = induced_on_homology(f), induced_on_homology(g), induced_on_homology(g.compose(f))
        for n in hgf:
            assert (hgf[n].table == hg[n].table[hf[n].table]).all()
