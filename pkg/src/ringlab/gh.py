"""Generating-hypothesis tests, ring classification and the constructive procedures.

Searches run over a pool of free complexes (see :mod:`ringlab.pool`).  Both
subgroups involved (H-zero maps and null-homotopic maps) are additive in
source and target, so testing pairs of indecomposable pool complexes decides
every pair in the pool; the canonical witness is unaffected because a
failing direct sum always has an earlier failing summand.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import config
from .abelian import BlockSystem, Subgroup
from .complexes import (
    ChainComplex,
    ChainMap,
    Homotopy,
    PairSystem,
    free_complex,
    homotopy_classes,
    induced_on_homology,
    is_homology_zero,
    null_homotopy,
    sphere,
)
from .config import BudgetExceeded
from .modules import (
    FinModule,
    ModuleMap,
    Presentation,
    cyclic_presentation,
    ext1,
    free_element,
    free_module,
    is_fp_injective,
    module_from_presentation,
    small_presentations,
)
from .pool import ComplexSpec, Pool, SphereSpec, enumerate_pool, random_complex
from .predicates import (
    Verdict,
    cyclic_flat_test,
    ideal_generators,
    is_vnr,
    matrix_flat_test,
    one_sided_ideals,
    ring_predicates,
    weakly_semihereditary_test,
)
from .rings import RingTable


@dataclass
class Witness:
    P: dict
    Q: dict
    phi: dict
    transcript: dict


@dataclass
class GhVerdict:
    ring: str
    mode: str
    bounds: dict
    holds: bool
    witnesses: list = field(default_factory=list)
    pairs_tested: int = 0
    qualified: bool = False
    seed: int | None = None
    samples: int | None = None

    def as_dict(self) -> dict:
        out = asdict(self)
        return out


def _supports_touch(P: ChainComplex, Q: ChainComplex) -> bool:
    """Maps or homotopies can be nonzero only if the supports overlap or are adjacent."""
    return P.lo <= Q.hi and Q.lo - 1 <= P.hi


def verify_witness(P: ChainComplex, Q: ChainComplex, phi: ChainMap, oracle_budget: int = config.ORACLE_BUDGET) -> dict:
    """Re-check a GH counterexample from scratch."""
    out = {}
    phi.verify()
    out["chain_map"] = True
    out["homology_zero"] = is_homology_zero(phi)
    out["solver_null_homotopy"] = null_homotopy(phi, "solver") is not None
    try:
        out["oracle_null_homotopy"] = null_homotopy(phi, "oracle", oracle_budget) is not None
    except BudgetExceeded:
        out["oracle_null_homotopy"] = "skipped (budget)"
    out["verified"] = bool(out["homology_zero"] and not out["solver_null_homotopy"]
                           and out["oracle_null_homotopy"] in (False, "skipped (budget)"))
    return out


def gh_test_pair(P: ChainComplex, Q: ChainComplex, witness: bool = True):
    """(holds, witness chain map or None, PairSystem)."""
    if not P.perfect:
        raise ValueError("the source must be perfect")
    if not _supports_touch(P, Q):
        return True, None, None
    ps = PairSystem(P, Q)
    if ps.gh_holds:
        return True, None, ps
    phi = ps.chain_map(ps.canonical_witness()) if witness else None
    return False, phi, ps


def _describe(spec, C: ChainComplex) -> dict:
    return spec.describe() if spec is not None else {"degrees": [C.lo, C.hi]}


def gh_search(R: RingTable, max_rank: int = 1, span: int = 2, mode: str = "exhaustive", samples: int = 200,
              seed: int = 0, pool: Pool | None = None, spheres: bool = True, stop_at_first: bool = True,
              verify: bool = True) -> GhVerdict:
    """Search pool pairs (sources perfect, targets pool complexes then spheres) for GH failures."""
    bounds = {"max_rank": max_rank, "span": span}
    if mode == "exhaustive":
        pool = pool or enumerate_pool(R, max_rank, span)
        targets = pool.core + (pool.spheres if spheres else [])
        verdict = GhVerdict(R.spec, mode, bounds, True)
        for sp in pool.core:
            P = pool.build(sp)
            for sq in targets:
                Q = pool.build(sq)
                verdict.pairs_tested += 1
                ok, phi, _ = gh_test_pair(P, Q)
                if not ok:
                    verdict.holds = False
                    tr = verify_witness(P, Q, phi) if verify else {}
                    verdict.witnesses.append(Witness(sp.describe(), sq.describe(), phi.describe(), tr))
                    if stop_at_first:
                        return verdict
        return verdict
    if mode != "sampled":
        raise ValueError(f"unknown mode {mode!r}")
    rng = np.random.default_rng(seed)
    verdict = GhVerdict(R.spec, mode, bounds, True, qualified=True, seed=seed, samples=samples)
    sphere_specs = []
    if spheres:
        for ideal in one_sided_ideals(R, "right"):
            if len(ideal) not in (1, R.size) and R.size // len(ideal) <= 16:
                gens = tuple(ideal_generators(R, ideal, "right"))
                sphere_specs += [SphereSpec(n, gens, R.size // len(ideal)) for n in range(span)]
    for _ in range(samples):
        sp = random_complex(R, rng, max_rank, span)
        if sphere_specs and rng.random() < 0.25:
            sq = sphere_specs[int(rng.integers(len(sphere_specs)))]
        else:
            sq = random_complex(R, rng, max_rank, span)
        P, Q = sp.build(R), sq.build(R)
        verdict.pairs_tested += 1
        ok, phi, _ = gh_test_pair(P, Q)
        if not ok:
            verdict.holds = False
            tr = verify_witness(P, Q, phi) if verify else {}
            verdict.witnesses.append(Witness(sp.describe(), sq.describe(), phi.describe(), tr))
            if stop_at_first:
                break
    if not verdict.holds:
        # shrink: an exhaustive pass at the failing size returns the canonical minimum when affordable
        try:
            ex = gh_search(R, max_rank, span, "exhaustive", spheres=spheres, verify=verify)
            if not ex.holds:
                verdict.witnesses = ex.witnesses + verdict.witnesses[1:]
        except BudgetExceeded:
            pass
    return verdict


@dataclass
class StrongVerdict:
    ring: str
    bounds: dict
    holds: bool
    pairs_tested: int
    witness: dict | None = None


def strong_gh_test(R: RingTable, max_rank: int = 1, span: int = 2, pool: Pool | None = None) -> StrongVerdict:
    """Bijectivity of ``[P, Q] -> Hom(H_* P, H_* Q)`` over pool pairs."""
    pool = pool or enumerate_pool(R, max_rank, span)
    bounds = {"max_rank": max_rank, "span": span}
    tested = 0
    for sp in pool.core:
        P = pool.build(sp)
        for sq in pool.core:
            Q = pool.build(sq)
            if not _supports_touch(P, Q):
                continue
            tested += 1
            hc = homotopy_classes(P, Q)
            if not hc.bijective:
                w = {
                    "P": sp.describe(),
                    "Q": sq.describe(),
                    "classes": hc.order,
                    "homology_homs": hc.target_order,
                    "injective": hc.injective,
                    "surjective": hc.surjective,
                    "kernel_witness": hc.kernel_witness.describe() if hc.kernel_witness else None,
                    "cokernel_witness": hc.cokernel_witness,
                }
                return StrongVerdict(R.spec, bounds, False, tested, w)
    return StrongVerdict(R.spec, bounds, True, tested)


# ---------------------------------------------------------------------------
# constructions from the proofs


class PreconditionError(ValueError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


def witness_from_ext(F: Presentation, Q: ChainComplex, n: int, e) -> tuple[ChainComplex, ChainMap]:
    """Chain map from the two-term complex of F's presentation into Q, nonzero only in degree n.

    ``e`` is a cocycle ``K -> H_n Q`` (coordinates from :func:`ext1`, or a
    ModuleMap on the relation module K) representing a nonzero Ext^1 class.
    """
    R = F.ring
    H = Q.homology
    Hn, Zn = H.H[n], H.Z[n]
    ext = ext1(F, Hn)
    if isinstance(e, ModuleMap):
        vec = ext.homs.vec_of(e)
    else:
        vec = np.asarray(e, dtype=np.int64)
    if ext.is_trivial_class(vec):
        raise ValueError("the Ext class is zero; the construction would be null-homotopic")
    h = ext.cocycle_map(vec)
    K = ext.relations
    P = free_complex(R, {n: F.m, n - 1: F.k}, {n: F.D})
    Pn, Qn = P.term(n), Q.term(n)
    images = []
    for j in range(F.m):
        col = free_element(R, F.D[:, j])
        cls = int(h.table[K.index[col]])
        images.append(int(Zn.members[Hn.reps[cls]]))
    phi = ChainMap(P, Q, {n: ModuleMap.from_images(Pn, Qn, images)})
    if not is_homology_zero(phi):
        raise AssertionError("constructed map is not zero on homology")
    if null_homotopy(phi) is not None:
        raise AssertionError("constructed map is null-homotopic although the class is nonzero")
    return P, phi


def _extend(sub_gens_expr, values, src: FinModule, tgt: FinModule):
    """Map ``src -> tgt`` taking ``sum_i g_i e_i`` to the given values, or None."""
    sysm = BlockSystem()
    k = len(src.generators)
    for i in range(k):
        sysm.var(i, tgt.factors)
    for rho in src.relations:
        eq = sysm.equation(tgt.factors)
        for i in range(k):
            sysm.coef(eq, i, tgt.act_mats[rho[i]])
    for ex, val in zip(sub_gens_expr, values):
        eq = sysm.equation(tgt.factors)
        for i, c in enumerate(ex):
            if c:
                sysm.coef(eq, i, tgt.act_mats[c])
        sysm.rhs(eq, tgt.vec(int(val)))
    sol = sysm.solve()
    if sol is None:
        return None
    return ModuleMap.from_images(src, tgt, [tgt.elem(sol.particular[sysm.var_slice(i)]) for i in range(k)])


def homotopy_via_fp_injectivity(phi: ChainMap, check_precondition: bool = True) -> Homotopy:
    """Build a null-homotopy degree by degree: D_n lifts E_n + F_n.

    E_n comes from projectivity of P_n, F_n from FP-injectivity of
    H_{n+1} Q.  The invariant ``phi_n - D_{n-1} d_n`` lands in ``B_n Q`` is
    checked at every step.
    """
    P, Q = phi.source, phi.target
    if not P.perfect:
        raise PreconditionError("source is not perfect")
    HQ = Q.homology
    if check_precondition:
        for n in Q.degrees:
            v = is_fp_injective(HQ.H[n])
            if not v.holds:
                raise PreconditionError(f"H_{n} of the target is not FP-injective", {"degree": n, **v.witness})
    if not is_homology_zero(phi):
        raise PreconditionError("phi is not zero on homology")
    HP = P.homology
    D = {}
    for n in P.degrees:
        Pn, Qn, Qn1 = P.term(n), Q.term(n), Q.term(n + 1)
        Dprev = D.get(n - 1)
        # psi = phi_n - D_{n-1} d_n, required to land in B_n Q
        psi = phi[n].table
        if Dprev is not None:
            psi = Qn.add[psi, Qn.neg[Dprev.table[P.diff(n).table]]]
        Bn = HQ.B[n] if n in HQ.B else None
        if Bn is not None and (Bn.index[psi] < 0).any():
            raise AssertionError(f"invariant broken in degree {n}")
        if Qn1.size == 1:
            if np.any(psi):
                raise AssertionError(f"no room for a homotopy in degree {n}")
            continue
        C, _ = Q.coker_boundaries(n + 1)  # Q_{n+1} / B_{n+1}
        dbar = C.reps  # representatives in Q_{n+1}
        dQ = Q.diff(n + 1).table
        # E_n: P_n -> C with dbar E_n = psi (choose preimages of generator values)
        e_images = []
        for g in Pn.generators:
            want = int(psi[g])
            hits = np.flatnonzero(dQ[dbar] == want)
            if not len(hits):
                raise AssertionError(f"E_{n}: value {want} is not a boundary")
            e_images.append(int(hits[0]))
        E = ModuleMap.from_images(Pn, C, e_images)
        # u = phibar_{n+1} - E_n d_{n+1} on B_n P, valued in H_{n+1} Q inside C
        Hn1, Zn1 = HQ.H[n + 1], HQ.Z[n + 1]
        incl = C.proj[Zn1.members[Hn1.reps]]  # H_{n+1} -> C
        inv_incl = np.full(C.size, -1, dtype=np.int64)
        inv_incl[incl] = np.arange(Hn1.size)
        BP = HP.B[n]
        u_vals = []
        for b in BP.generators:
            x_elem = int(BP.members[b])
            pre = np.flatnonzero(P.diff(n + 1).table == x_elem)
            x = int(pre[0])
            val = C.add[int(C.proj[phi[n + 1].table[x]]), int(C.neg[E.table[x_elem]])]
            h = int(inv_incl[val])
            if h < 0:
                raise AssertionError(f"F_{n}: value does not lie in H_{n + 1}")
            u_vals.append(h)
        exprs = [Pn.express(int(BP.members[b])) for b in BP.generators]
        Fn = _extend(exprs, u_vals, Pn, Hn1)
        if Fn is None:
            raise PreconditionError(f"the map B_{n}P -> H_{n + 1}Q does not extend to P_{n}",
                                    {"degree": n, "values": u_vals})
        # D_n lifts Dbar = E + i F
        dbar_vals = C.add[E.table, incl[Fn.table]]
        D[n] = ModuleMap.from_images(Pn, Qn1, [int(C.reps[dbar_vals[g]]) for g in Pn.generators])
        if not np.array_equal(Qn.add[dQ[D[n].table], 0], psi):
            raise AssertionError(f"d D_{n} != phi_{n} - D_{n-1} d_{n}")
    return Homotopy(phi, D)


@dataclass
class VnrReport:
    x: int
    regular: bool
    y: int | None
    tuple_abcd: tuple | None
    complex: dict


def vnr_witness_via_complex(R: RingTable, x: int) -> VnrReport:
    """Search a, b, c, d with x a = b x, a = d x, b = 1 + x c; then y = d - c satisfies x y x = x."""
    P = free_complex(R, {0: 1, 1: 1}, {1: [[x]]})
    desc = {"degrees": [P.lo, P.hi], "diffs": {"1": [[int(x)]]}}
    c = np.arange(R.size)[:, None]
    d = np.arange(R.size)[None, :]
    a = np.broadcast_to(R.mul[d, x], (R.size, R.size))
    b = np.broadcast_to(R.add[R.one, R.mul[x, c]], (R.size, R.size))
    ok = R.mul[x, a] == R.mul[b, x]
    hits = np.argwhere(ok)
    for ci, di in hits:
        y = int(R.sub(di, ci))
        if R.mul[R.mul[x, y], x] == x:
            return VnrReport(int(x), True, y, (int(a[ci, di]), int(b[ci, di]), int(ci), int(di)), desc)
    return VnrReport(int(x), False, None, None, desc)


@dataclass
class NfoldVerdict:
    n: int
    holds: bool
    chains_tested: int
    witness: dict | None = None


def nfold_gh_test(R: RingTable, n: int, max_rank: int = 1, span: int = 2, pool: Pool | None = None,
                  spheres: bool = True) -> NfoldVerdict:
    """Composites of n H-zero maps between pool complexes are null-homotopic.

    Composition is multilinear and null-homotopic maps form a subgroup, so it
    suffices to compose generators of the H-zero groups.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    pool = pool or enumerate_pool(R, max_rank, span)
    core = pool.core
    built = {id(s): pool.build(s) for s in core + (pool.spheres if spheres else [])}
    gens_cache: dict = {}

    def hzero_gens(a, b):
        key = (id(a), id(b))
        if key not in gens_cache:
            A, B = built[id(a)], built[id(b)]
            if not _supports_touch(A, B):
                gens_cache[key] = []
            else:
                ps = PairSystem(A, B)
                gens_cache[key] = [ps.chain_map(g, check=False) for g in ps.hzero_subgroup.gens]
        return gens_cache[key]

    tested = 0
    last_targets = core + (pool.spheres if spheres else [])
    for chain in itertools.product(core, repeat=n):
        for last in last_targets:
            seq = list(chain) + [last]
            stages = [hzero_gens(seq[i], seq[i + 1]) for i in range(n)]
            if any(not s for s in stages):
                continue
            src, tgt = built[id(seq[0])], built[id(seq[-1])]
            if not _supports_touch(src, tgt):
                continue
            ps = PairSystem(src, tgt)
            for maps in itertools.product(*stages):
                comp = maps[0]
                for f in maps[1:]:
                    comp = f.compose(comp)
                tested += 1
                if not ps.null_subgroup.contains(ps.vec_of(comp)):
                    w = {"complexes": [s.describe() for s in seq], "maps": [f.describe() for f in maps],
                         "composite": comp.describe()}
                    return NfoldVerdict(n, False, tested, w)
    return NfoldVerdict(n, True, tested)


# ---------------------------------------------------------------------------
# classification


@dataclass
class ClassReport:
    ring: str
    size: int
    predicates: dict
    gh: dict
    strong_gh: dict
    fp_injective_witness: dict | None
    free_target_witness: dict | None
    consistency: dict
    bounds: dict
    timing: float = 0.0

    @property
    def red_alert(self) -> bool:
        return not all(self.consistency.values())


def fp_injective_all(R: RingTable, max_gens: int = 1) -> Verdict:
    """Every small finitely presented module (R/I, then R^j/vR) is FP-injective."""
    for p in small_presentations(R, max_gens):
        M = module_from_presentation(p)
        if M.size == 1:
            continue
        v = is_fp_injective(M)
        if not v.holds:
            return Verdict(False, {"module": {"k": p.k, "relations": p.D.tolist(), "size": M.size},
                                   "ideal": v.witness["ideal"], "map": v.witness["map"],
                                   "ext_order": v.witness["ext_order"]}, "a finitely presented module is not FP-injective")
    return Verdict(True, None, "all tested modules are FP-injective")


def find_ext_witness(R: RingTable, Q: ChainComplex, n: int):
    """First right ideal I with Ext^1(R/I, H_n Q) != 0, with the chain map built from it."""
    Hn = Q.homology.H[n]
    for ideal in one_sided_ideals(R, "right"):
        p = cyclic_presentation(R, ideal_generators(R, ideal, "right"))
        e = ext1(p, Hn)
        if not e.is_zero:
            P, phi = witness_from_ext(p, Q, n, e.cocycles[0])
            return p, P, phi
    return None


def classify_ring(R: RingTable, max_rank: int = 1, span: int = 2, mat_bound: int = 2, fp_bound: int = 1,
                  ws_bound: int = 1, seed: int = 0) -> ClassReport:
    t0 = time.time()
    preds = ring_predicates(R)
    vnr = is_vnr(R)
    cf = cyclic_flat_test(R)
    mf = matrix_flat_test(R, mat_bound, seed=seed)
    fp = fp_injective_all(R, fp_bound)
    ws = weakly_semihereditary_test(R, ws_bound)
    semisimple = preds.is_semisimple
    predicates = {
        "vnr": vnr.holds,
        "cyclic_flat": cf.holds,
        f"matrix_flat_{mat_bound}": mf.holds,
        "matrix_flat_mode": mf.detail,
        "fp_injective_all": fp.holds,
        f"weakly_semihereditary_{ws_bound}": ws.holds,
        "semisimple": semisimple,
        "local": preds.is_local,
        "reduced": preds.is_reduced,
        "simple": preds.is_simple,
    }
    pool = enumerate_pool(R, max_rank, span)
    gh = gh_search(R, max_rank, span, pool=pool)
    strong = strong_gh_test(R, max_rank, span, pool=pool)
    free_w = None
    if not gh.holds:
        Q = sphere(free_module(R, 1), 0)
        found = find_ext_witness(R, Q, 0)
        if found is not None:
            p, P, phi = found
            free_w = {"F": {"k": p.k, "relations": p.D.tolist()}, "Q": "S^0(R)",
                      "P": {"degrees": [P.lo, P.hi], "diffs": {str(P.hi): p.D.tolist()}},
                      "phi": phi.describe(), "transcript": verify_witness(P, Q, phi)}
    mf_ok = mf.holds
    consistency = {
        # GH iff (weak dimension <= 1 and f.p. modules FP-injective)
        "gh_vs_flat_and_fp_injective": gh.holds == (mf_ok and cf.holds and fp.holds),
        # over finite rings GH, semisimplicity and regularity coincide
        "gh_vs_semisimple": gh.holds == semisimple,
        "gh_vs_vnr": gh.holds == vnr.holds,
        "strong_vs_vnr": strong.holds == vnr.holds,
    }
    bounds = {"max_rank": max_rank, "span": span, "mat_bound": mat_bound, "fp_bound": fp_bound,
              "ws_bound": ws_bound, "seed": seed}
    return ClassReport(R.spec, R.size, predicates, gh.as_dict(), asdict(strong),
                       fp.witness, free_w, consistency, bounds, time.time() - t0)
