"""Bounded chain complexes of finite modules, chain maps and homotopies.

Differentials lower degree: ``d_n : P_n -> P_{n-1}``.  Chain maps,
H-zero maps and null-homotopic maps are all handled as subgroups of one
coordinate space: the images of the source generators, degree by degree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from . import config
from .abelian import AbHom, BlockSystem, Subgroup, decode, encode
from .config import BudgetExceeded
from .modules import (
    FinModule,
    ModuleMap,
    Presentation,
    Quotient,
    Submodule,
    direct_sum,
    free_element,
    free_module,
    hom_group,
    is_projective,
    module_from_presentation,
    quotient,
    restrict_image,
    sum_injection,
    zero_module,
)
from .rings import RingTable


class ComplexError(ValueError):
    """Invalid complex; ``degree`` and ``element`` locate a failure of d^2 = 0."""

    def __init__(self, message, degree=None, element=None):
        super().__init__(message)
        self.degree = degree
        self.element = element


class ChainComplex:
    """Terms ``P_n`` for ``lo <= n <= hi`` and differentials ``d_n : P_n -> P_{n-1}``."""

    def __init__(self, ring: RingTable, terms: dict, diffs: dict | None = None, matrices: dict | None = None,
                 check: bool = True, name: str = ""):
        self.ring = ring
        self.name = name
        self._terms = {int(n): M for n, M in terms.items() if M.size > 1}
        self._diffs = {}
        self.matrices = dict(matrices or {})
        if self._terms:
            self.lo, self.hi = min(self._terms), max(self._terms)
        else:
            self.lo, self.hi = 0, -1
        for n, f in (diffs or {}).items():
            n = int(n)
            src, tgt = self.term(n), self.term(n - 1)
            if f.source.size != src.size or f.target.size != tgt.size:
                raise ComplexError(f"differential d_{n} does not match the terms in degrees {n}, {n - 1}", n)
            if src.size > 1 and tgt.size > 1:
                self._diffs[n] = f
        if check:
            self.verify()

    def __repr__(self):
        return self.name or f"ChainComplex(degrees {self.lo}..{self.hi}, sizes {[self.term(n).size for n in self.degrees]})"

    @property
    def degrees(self) -> range:
        return range(self.lo, self.hi + 1)

    def term(self, n: int) -> FinModule:
        return self._terms.get(n) or zero_module(self.ring)

    def diff(self, n: int) -> ModuleMap:
        if n in self._diffs:
            return self._diffs[n]
        return ModuleMap.zero(self.term(n), self.term(n - 1))

    def verify(self):
        for n in range(self.lo + 1, self.hi + 1):
            comp = self.diff(n - 1).table[self.diff(n).table]
            bad = np.flatnonzero(comp)
            if len(bad):
                x = int(bad[0])
                raise ComplexError(f"d_{n - 1} d_{n} is nonzero on element {x} of degree {n}", n, x)

    @property
    def perfect(self) -> bool:
        return all("free_rank" in self.term(n).provenance for n in self.degrees)

    @property
    def ranks(self) -> dict:
        return {n: self.term(n).provenance.get("free_rank") for n in self.degrees}

    def shift(self, k: int) -> "ChainComplex":
        terms = {n + k: M for n, M in self._terms.items()}
        diffs = {n + k: f for n, f in self._diffs.items()}
        mats = {n + k: m for n, m in self.matrices.items()}
        return ChainComplex(self.ring, terms, diffs, mats, check=False)

    # cached data used by the pair systems

    @cached_property
    def homology(self) -> "HomologyData":
        return homology(self)

    def dexpr(self, n: int) -> np.ndarray:
        """Row ``j``: expression of ``d_n(g_j)`` in the generators of ``P_{n-1}``."""
        cache = self.__dict__.setdefault("_dexpr", {})
        if n not in cache:
            P, T = self.term(n), self.term(n - 1)
            if n in self.matrices and "free_rank" in P.provenance and "free_rank" in T.provenance:
                cache[n] = np.asarray(self.matrices[n], dtype=np.int64).T.reshape(len(P.generators), len(T.generators))
            else:
                d = self.diff(n)
                cache[n] = T.expressions[[d.table[g] for g in P.generators]].reshape(len(P.generators), len(T.generators))
        return cache[n]

    def dmat(self, n: int) -> np.ndarray:
        return self.diff(n).matrix

    def cycle_exprs(self, n: int) -> np.ndarray:
        """Expressions of generators of ``Z_n`` in the generators of ``P_n``."""
        H = self.homology
        Z = H.Z[n]
        P = self.term(n)
        return P.expressions[[int(Z.members[g]) for g in Z.generators]].reshape(len(Z.generators), len(P.generators))

    def coker_boundaries(self, n: int) -> tuple[FinModule, np.ndarray]:
        """``Q_n / B_n`` and the coordinate matrix of the projection."""
        cache = self.__dict__.setdefault("_coker", {})
        if n not in cache:
            Bn = self.homology.B[n]
            C = quotient(self.term(n), Bn.mask)
            cache[n] = (C, C.projection.matrix)
        return cache[n]


def build_complex(terms: dict, diffs: dict, ring: RingTable | None = None) -> ChainComplex:
    if ring is None:
        ring = next(iter(terms.values())).ring
    return ChainComplex(ring, terms, diffs)


def free_complex(R: RingTable, ranks: dict, matrices: dict, check: bool = True) -> ChainComplex:
    """Free complex with ``d_n(e_j) = sum_i e_i * D_n[i, j]`` (D_n is r_{n-1} x r_n)."""
    terms = {n: free_module(R, k) for n, k in ranks.items() if k > 0}
    diffs = {}
    mats = {}
    for n, D in matrices.items():
        D = np.asarray(D, dtype=np.int64)
        r_src, r_tgt = ranks.get(n, 0), ranks.get(n - 1, 0)
        if r_src == 0 or r_tgt == 0:
            continue
        D = D.reshape(r_tgt, r_src)
        if ((D < 0) | (D >= R.size)).any():
            raise ComplexError(f"d_{n} has entries outside the ring", n)
        images = [free_element(R, D[:, j]) for j in range(r_src)]
        diffs[n] = ModuleMap.from_images(terms[n], terms[n - 1], images, check=False)
        mats[n] = D
    return ChainComplex(R, terms, diffs, mats, check=check)


def sphere(M: FinModule, n: int) -> ChainComplex:
    return ChainComplex(M.ring, {n: M}, {}, name=f"S^{n}")


def disk(M: FinModule, n: int) -> ChainComplex:
    return ChainComplex(M.ring, {n: M, n - 1: M}, {n: ModuleMap.identity(M)}, name=f"D^{n}")


def sphere_disk(M: FinModule, n: int, kind: str) -> ChainComplex:
    if kind.upper() == "S":
        return sphere(M, n)
    if kind.upper() == "D":
        return disk(M, n)
    raise ValueError("kind must be 'S' or 'D'")


# ---------------------------------------------------------------------------
# homology


@dataclass
class HomologyData:
    Z: dict
    B: dict
    H: dict

    def order(self, n: int) -> int:
        return self.H[n].size if n in self.H else 1

    def is_zero(self) -> bool:
        return all(H.size == 1 for H in self.H.values())


def homology(P: ChainComplex) -> HomologyData:
    Z, B, H = {}, {}, {}
    for n in P.degrees:
        Pn = P.term(n)
        Z[n] = P.diff(n).kernel()
        mask = np.zeros(Pn.size, dtype=bool)
        mask[P.diff(n + 1).table] = True
        B[n] = Submodule(Pn, mask)
        H[n] = quotient(Z[n], mask[Z[n].members])
    return HomologyData(Z, B, H)


# ---------------------------------------------------------------------------
# chain maps and homotopies


class ChainMap:
    def __init__(self, source: ChainComplex, target: ChainComplex, maps: dict, check: bool = True):
        self.source = source
        self.target = target
        self.maps = {}
        for n in source.degrees:
            f = maps.get(n)
            if f is None:
                f = ModuleMap.zero(source.term(n), target.term(n))
            self.maps[n] = f
        if check:
            self.verify()

    def __getitem__(self, n):
        if n in self.maps:
            return self.maps[n]
        return ModuleMap.zero(self.source.term(n), self.target.term(n))

    def verify(self):
        P, Q = self.source, self.target
        for n in P.degrees:
            left = Q.diff(n).table[self[n].table]
            right = self[n - 1].table[P.diff(n).table]
            bad = np.flatnonzero(left != right)
            if len(bad):
                raise ValueError(f"not a chain map: d phi != phi d at element {int(bad[0])} of degree {n}")

    def flat(self) -> tuple[int, ...]:
        """Generator images, degree by degree (ascending)."""
        out = []
        for n in self.source.degrees:
            out.extend(self[n].images())
        return tuple(out)

    def __sub__(self, other: "ChainMap") -> "ChainMap":
        return ChainMap(self.source, self.target, {n: self[n] - other[n] for n in self.source.degrees}, check=False)

    def compose(self, other: "ChainMap") -> "ChainMap":
        """``self o other``."""
        return ChainMap(other.source, self.target, {n: self[n].compose(other[n]) for n in other.source.degrees},
                        check=False)

    def is_zero(self) -> bool:
        return all(f.is_zero() for f in self.maps.values())

    def describe(self) -> dict:
        return {str(n): [int(x) for x in self[n].images()] for n in self.source.degrees}


def identity_map(P: ChainComplex) -> ChainMap:
    return ChainMap(P, P, {n: ModuleMap.identity(P.term(n)) for n in P.degrees}, check=False)


class Homotopy:
    """``D_n : P_n -> Q_{n+1}`` with ``d D + D d = phi``."""

    def __init__(self, phi: ChainMap, maps: dict, check: bool = True):
        self.phi = phi
        self.maps = dict(maps)
        if check:
            self.verify()

    def __getitem__(self, n):
        if n in self.maps:
            return self.maps[n]
        return ModuleMap.zero(self.phi.source.term(n), self.phi.target.term(n + 1))

    def verify(self):
        P, Q, phi = self.phi.source, self.phi.target, self.phi
        for n in P.degrees:
            dD = Q.diff(n + 1).table[self[n].table]
            Dd = self[n - 1].table[P.diff(n).table]
            lhs = Q.term(n).add[dD, Dd]
            bad = np.flatnonzero(lhs != phi[n].table)
            if len(bad):
                raise ValueError(f"dD + Dd != phi at element {int(bad[0])} of degree {n}")

    def describe(self) -> dict:
        return {str(n): [int(x) for x in self[n].images()] for n in self.phi.source.degrees}


class PairSystem:
    """Linear data for maps ``P -> Q``: chain maps, H-zero maps, null-homotopic maps."""

    def __init__(self, P: ChainComplex, Q: ChainComplex):
        if P.ring.key != Q.ring.key:
            raise ValueError("complexes over different rings")
        self.P, self.Q = P, Q
        self.degrees = [n for n in P.degrees if Q.term(n).size > 1 and P.term(n).size > 1]
        phi = BlockSystem()
        for n in self.degrees:
            for i in range(len(P.term(n).generators)):
                phi.var((n, i), Q.term(n).factors)
        self.phi_vars = phi
        self.moduli = phi.var_moduli

    def _phi_block(self, n, i):
        return self.phi_vars.var_slice((n, i))

    @cached_property
    def chain_rows(self) -> tuple[np.ndarray, tuple[int, ...]]:
        """Rows whose kernel is the group of chain maps."""
        P, Q = self.P, self.Q
        sysm = BlockSystem()
        for n in self.degrees:
            for i in range(len(P.term(n).generators)):
                sysm.var((n, i), Q.term(n).factors)
        for n in self.degrees:
            Pn, Qn = P.term(n), Q.term(n)
            for rho in Pn.relations:
                eq = sysm.equation(Qn.factors)
                for i in range(len(Pn.generators)):
                    sysm.coef(eq, (n, i), Qn.act_mats[rho[i]])
        dset = set(self.degrees)
        for n in P.degrees:
            Pn, Qm = P.term(n), Q.term(n - 1)
            if Qm.size == 1 or Pn.size == 1 or (n not in dset and n - 1 not in dset):
                continue
            ex = P.dexpr(n) if (n - 1) in dset else None
            dQ = Q.dmat(n) if n in dset else None
            for j in range(len(Pn.generators)):
                eq = sysm.equation(Qm.factors)
                if dQ is not None:
                    sysm.coef(eq, (n, j), dQ)
                if ex is not None:
                    for i, c in enumerate(ex[j]):
                        if c:
                            sysm.coef(eq, (n - 1, i), -Qm.act_mats[c])
        return sysm.matrix(), tuple(sysm._row_moduli)

    @cached_property
    def hzero_rows(self) -> tuple[np.ndarray, tuple[int, ...]]:
        """Chain rows plus ``phi(Z_n P) in B_n Q`` for every degree."""
        P, Q = self.P, self.Q
        A, md = self.chain_rows
        blocks, mods = [A], list(md)
        for n in self.degrees:
            C, proj = Q.coker_boundaries(n)
            if C.size == 1:
                continue
            Qn = Q.term(n)
            zex = P.cycle_exprs(n)
            for e in zex:
                row = np.zeros((len(C.factors), len(self.moduli)), dtype=np.int64)
                for i, c in enumerate(e):
                    if c:
                        row[:, self._phi_block(n, i)] += proj @ Qn.act_mats[c]
                blocks.append(row)
                mods.extend(C.factors)
        return np.vstack(blocks) if blocks else np.zeros((0, len(self.moduli))), tuple(mods)

    @cached_property
    def homotopy_data(self):
        """(H, Dvars, relation rows): ``phi = H @ D`` for D subject to the relation rows."""
        P, Q = self.P, self.Q
        Dsys = BlockSystem()
        for n in P.degrees:
            Qn1 = Q.term(n + 1)
            if Qn1.size == 1:
                continue
            for i in range(len(P.term(n).generators)):
                Dsys.var((n, i), Qn1.factors)
        rel = BlockSystem()
        for key in Dsys._vars:
            rel.var(key, Dsys._vars[key][1])
        for n in P.degrees:
            Pn, Qn1 = P.term(n), Q.term(n + 1)
            if Qn1.size == 1:
                continue
            for rho in Pn.relations:
                eq = rel.equation(Qn1.factors)
                for i in range(len(Pn.generators)):
                    rel.coef(eq, (n, i), Qn1.act_mats[rho[i]])
        H = np.zeros((len(self.moduli), Dsys.nvars), dtype=np.int64)
        for n in self.degrees:
            Pn, Qn = P.term(n), Q.term(n)
            has_up = Dsys.has_var((n, 0))
            has_down = Dsys.has_var((n - 1, 0)) and P.term(n - 1).size > 1
            ex = P.dexpr(n) if has_down else None
            dQ = Q.dmat(n + 1) if has_up else None
            for j in range(len(Pn.generators)):
                rows = self._phi_block(n, j)
                if has_up:
                    H[rows, Dsys.var_slice((n, j))] += dQ
                if has_down:
                    for i, c in enumerate(ex[j]):
                        if c:
                            H[rows, Dsys.var_slice((n - 1, i))] += Qn.act_mats[c]
        return H, Dsys, rel

    # -- orders (one elimination each) --------------------------------------

    def _kernel_order(self, rows) -> int:
        A, md = rows
        total = math.prod(self.moduli)
        if not len(md):
            return total
        return total // Subgroup(md, A.T).order

    @cached_property
    def chain_order(self) -> int:
        return self._kernel_order(self.chain_rows)

    @cached_property
    def hzero_order(self) -> int:
        return self._kernel_order(self.hzero_rows)

    @cached_property
    def null_subgroup(self) -> Subgroup:
        H, Dsys, rel = self.homotopy_data
        if not Dsys.nvars:
            return Subgroup(self.moduli, [])
        if rel._row_moduli:
            gens = rel.kernel().gens
        else:
            gens = np.eye(Dsys.nvars, dtype=np.int64)
        return Subgroup(self.moduli, (H @ gens.T).T if len(gens) else [])

    @cached_property
    def null_order(self) -> int:
        return self.null_subgroup.order if self.moduli else 1

    @cached_property
    def chain_subgroup(self) -> Subgroup:
        A, md = self.chain_rows
        if not len(md):
            return Subgroup(self.moduli, np.eye(len(self.moduli), dtype=np.int64))
        return AbHom(A, self.moduli, md).kernel()

    @cached_property
    def hzero_subgroup(self) -> Subgroup:
        A, md = self.hzero_rows
        if not len(md):
            return Subgroup(self.moduli, np.eye(len(self.moduli), dtype=np.int64))
        return AbHom(A, self.moduli, md).kernel()

    @property
    def gh_holds(self) -> bool:
        return self.hzero_order == self.null_order

    # -- conversions ---------------------------------------------------------

    def chain_map(self, vec, check: bool = True) -> ChainMap:
        P, Q = self.P, self.Q
        vec = np.asarray(vec, dtype=np.int64)
        maps = {}
        for n in self.degrees:
            Qn = Q.term(n)
            images = [Qn.elem(vec[self._phi_block(n, i)]) for i in range(len(P.term(n).generators))]
            maps[n] = ModuleMap.from_images(P.term(n), Qn, images, check=check)
        return ChainMap(P, Q, maps, check=check)

    def vec_of(self, phi: ChainMap) -> np.ndarray:
        out = np.zeros(len(self.moduli), dtype=np.int64)
        for n in self.degrees:
            Pn, Qn = self.P.term(n), self.Q.term(n)
            for i, g in enumerate(Pn.generators):
                out[self._phi_block(n, i)] = Qn.vec(int(phi[n].table[g]))
        return out

    def flat_elements(self, vecs: np.ndarray) -> np.ndarray:
        """Generator images (element indices) for rows of phi coordinates."""
        vecs = np.asarray(vecs, dtype=np.int64).reshape(-1, len(self.moduli))
        cols = []
        for n in self.degrees:
            Qn = self.Q.term(n)
            for i in range(len(self.P.term(n).generators)):
                cols.append(Qn.group.elems(vecs[:, self._phi_block(n, i)]))
        if not cols:
            return np.zeros((len(vecs), 0), dtype=np.int64)
        return np.stack(cols, axis=1)

    def canonical_witness(self, limit: int = config.ENUM_BUDGET) -> np.ndarray | None:
        """Lexicographically least H-zero map that is not null-homotopic."""
        if self.gh_holds:
            return None
        hz = self.hzero_subgroup.elements(limit)
        null = self.null_subgroup.elements(limit)
        null_codes = set(encode(null, self.moduli).tolist())
        codes = encode(hz, self.moduli)
        keep = np.array([c not in null_codes for c in codes.tolist()], dtype=bool)
        cands = hz[keep]
        flat = self.flat_elements(cands)
        order = np.lexsort(flat.T[::-1])
        return cands[order[0]]


def chain_map_group(P: ChainComplex, Q: ChainComplex) -> PairSystem:
    return PairSystem(P, Q)


# ---------------------------------------------------------------------------
# null homotopies


def _homotopy_from_vec(phi: ChainMap, Dsys: BlockSystem, vec) -> Homotopy:
    P, Q = phi.source, phi.target
    maps = {}
    for n in P.degrees:
        Qn1 = Q.term(n + 1)
        if not Dsys.has_var((n, 0)):
            continue
        images = [Qn1.elem(vec[Dsys.var_slice((n, i))]) for i in range(len(P.term(n).generators))]
        maps[n] = ModuleMap.from_images(P.term(n), Qn1, images)
    return Homotopy(phi, maps)


def _null_homotopy_solver(phi: ChainMap, ps: PairSystem) -> Homotopy | None:
    H, Dsys, rel = ps.homotopy_data
    target = ps.vec_of(phi)
    if not Dsys.nvars:
        return Homotopy(phi, {}) if not target.any() else None
    rows = [H]
    mods = list(ps.moduli)
    rhs = [target]
    if rel._row_moduli:
        rows.append(rel.matrix())
        mods.extend(rel._row_moduli)
        rhs.append(np.zeros(len(rel._row_moduli), dtype=np.int64))
    from .abelian import AffineSystem, solve_affine

    if not mods:
        return Homotopy(phi, {})
    sol = solve_affine(AffineSystem(AbHom(np.vstack(rows), Dsys.var_moduli, mods), np.concatenate(rhs)))
    if sol is None:
        return None
    return _homotopy_from_vec(phi, Dsys, sol.particular)


def _null_homotopy_oracle(phi: ChainMap, budget: int) -> Homotopy | None:
    """Enumerate every family of generator images D_n(g) in Q_{n+1} and test on tables."""
    P, Q = phi.source, phi.target
    slots = []  # (n, i)
    for n in P.degrees:
        if Q.term(n + 1).size > 1:
            for i in range(len(P.term(n).generators)):
                slots.append((n, i))
    sizes = [Q.term(n + 1).size for n, _ in slots]
    total = math.prod(sizes)
    if total > budget:
        raise BudgetExceeded(f"{total} candidate homotopies exceed the oracle budget {budget}")
    cand = decode(np.arange(total), sizes) if slots else np.zeros((1, 0), dtype=np.int64)
    col = {s: k for k, s in enumerate(slots)}
    ok = np.ones(total, dtype=bool)

    def apply(n, coeffs):
        # D_n applied to sum_i g_i * coeffs[i], for every candidate at once
        T = Q.term(n + 1)
        acc = np.zeros(total, dtype=np.int64)
        for i, c in enumerate(coeffs):
            if c and (n, i) in col:
                acc = T.add[acc, T.act[cand[:, col[(n, i)]], c]]
        return acc

    for n in P.degrees:
        Pn, Qn1 = P.term(n), Q.term(n + 1)
        if Qn1.size > 1:
            for rho in Pn.relations:
                ok &= apply(n, rho) == 0
        for j, g in enumerate(Pn.generators):
            up = Q.diff(n + 1).table[cand[:, col[(n, j)]]] if (n, j) in col else np.zeros(total, dtype=np.int64)
            dg = int(P.diff(n).table[g])
            down = apply(n - 1, P.term(n - 1).express(dg)) if P.term(n - 1).size > 1 else np.zeros(total, dtype=np.int64)
            ok &= Q.term(n).add[up, down] == int(phi[n].table[g])
    hits = np.flatnonzero(ok)
    if not len(hits):
        return None
    row = cand[hits[0]]
    maps = {}
    for n in P.degrees:
        if (n, 0) in col:
            images = [int(row[col[(n, i)]]) for i in range(len(P.term(n).generators))]
            maps[n] = ModuleMap.from_images(P.term(n), Q.term(n + 1), images)
    return Homotopy(phi, maps)


def null_homotopy(phi: ChainMap, mode: str = "solver", budget: int = config.ORACLE_BUDGET,
                  pair: PairSystem | None = None) -> Homotopy | None:
    """A verified null-homotopy of ``phi``, or None when none exists."""
    if mode == "solver":
        return _null_homotopy_solver(phi, pair or PairSystem(phi.source, phi.target))
    if mode == "oracle":
        return _null_homotopy_oracle(phi, budget)
    raise ValueError(f"unknown mode {mode!r}")


def induced_on_homology(phi: ChainMap) -> dict:
    """``H_n(phi)`` for every degree of the source."""
    HP, HQ = phi.source.homology, phi.target.homology
    out = {}
    for n in phi.source.degrees:
        HPn, HQn = HP.H[n], HQ.H[n] if n in HQ.H else None
        if HQn is None:
            tgt = zero_module(phi.source.ring)
            out[n] = ModuleMap.zero(HPn, tgt)
            continue
        ZP, ZQ = HP.Z[n], HQ.Z[n]
        lifts = ZP.members[HPn.reps]
        imgs = phi[n].table[lifts]
        zq = ZQ.index[imgs]
        if (zq < 0).any():
            raise ValueError(f"phi_{n} does not preserve cycles")
        out[n] = ModuleMap(HPn, HQn, HQn.proj[zq])
    return out


def is_homology_zero(phi: ChainMap) -> bool:
    return all(f.is_zero() for f in induced_on_homology(phi).values())


# ---------------------------------------------------------------------------
# homotopy classes and the natural map to homology


@dataclass
class HomotopyClasses:
    order: int
    target_order: int
    chain_order: int
    hzero_order: int
    null_order: int
    injective: bool
    surjective: bool
    kernel_witness: ChainMap | None = None
    cokernel_witness: dict | None = None

    @property
    def bijective(self) -> bool:
        return self.injective and self.surjective


def _homology_hom_orders(P: ChainComplex, Q: ChainComplex) -> dict:
    out = {}
    HP, HQ = P.homology, Q.homology
    for n in P.degrees:
        if n in HQ.H and HP.H[n].size > 1 and HQ.H[n].size > 1:
            out[n] = hom_group(HP.H[n], HQ.H[n])
    return out


def natural_map_target_order(P: ChainComplex, Q: ChainComplex) -> int:
    return math.prod(h.order for h in _homology_hom_orders(P, Q).values())


def homotopy_classes(P: ChainComplex, Q: ChainComplex, witnesses: bool = True) -> HomotopyClasses:
    ps = PairSystem(P, Q)
    homs = _homology_hom_orders(P, Q)
    target = math.prod(h.order for h in homs.values())
    chain, hz, null = ps.chain_order, ps.hzero_order, ps.null_order
    injective = hz == null
    surjective = chain // hz == target
    kw = cw = None
    if witnesses and not injective:
        kw = ps.chain_map(ps.canonical_witness())
    if witnesses and not surjective:
        # image of the natural map, in coordinates of the product of Hom groups
        blocks = list(homs.items())
        imgs = []
        for g in ps.chain_subgroup.gens:
            phi = ps.chain_map(g, check=False)
            ind = induced_on_homology(phi)
            imgs.append(np.concatenate([h.vec_of(ind[n]) for n, h in blocks]))
        moduli = sum((h.sub.moduli for _, h in blocks), ())
        image = Subgroup(moduli, imgs)
        offset = 0
        for n, h in blocks:
            width = len(h.sub.moduli)
            for g in h.sub.gens:
                v = np.zeros(len(moduli), dtype=np.int64)
                v[offset : offset + width] = g
                if not image.contains(v):
                    f = h.map_of(g)
                    cw = {"degree": n, "homology_map": [int(x) for x in f.table]}
                    break
            if cw:
                break
            offset += width
    return HomotopyClasses(chain // null, target, chain, hz, null, injective, surjective, kw, cw)


# ---------------------------------------------------------------------------
# splitting into spheres


class SplitError(ValueError):
    def __init__(self, message, degree, module_kind, module):
        super().__init__(message)
        self.degree = degree
        self.module_kind = module_kind
        self.module = module


@dataclass
class SplitResult:
    spheres: ChainComplex
    f: ChainMap  # spheres -> P
    g: ChainMap  # P -> spheres
    homotopy_fg: Homotopy  # f g - id_P
    homotopy_gf: Homotopy | None  # g f - id (g f = id, so zero)
    degreewise: dict = field(default_factory=dict)  # n -> isomorphism B_n + H_n + B_{n-1} -> P_n
    disks: dict = field(default_factory=dict)  # n -> B_{n-1} (summand D^n(B_{n-1}))


def _section(surj_src: FinModule, surj: ModuleMap, M: FinModule, into) -> ModuleMap | None:
    """Map ``s : M -> surj_src`` with ``surj o s = into`` (both into the same target)."""
    T = surj.target
    sysm = BlockSystem()
    for i in range(len(M.generators)):
        sysm.var(i, surj_src.factors)
    for rho in M.relations:
        eq = sysm.equation(surj_src.factors)
        for i in range(len(M.generators)):
            sysm.coef(eq, i, surj_src.act_mats[rho[i]])
    for i, g in enumerate(M.generators):
        eq = sysm.equation(T.factors)
        sysm.coef(eq, i, surj.matrix)
        sysm.rhs(eq, T.vec(int(into.table[g])))
    sol = sysm.solve()
    if sol is None:
        return None
    images = [surj_src.elem(sol.particular[sysm.var_slice(i)]) for i in range(len(M.generators))]
    return ModuleMap.from_images(M, surj_src, images)


def split_decomposition(P: ChainComplex) -> SplitResult:
    """Realise ``P ~ sum_n S^n(H_n P)`` when all ``B_n P`` and ``H_n P`` are projective."""
    R = P.ring
    HD = P.homology
    # homology first, so the error names the obstruction in the conclusion
    for kind, mods in (("homology", HD.H), ("boundaries", HD.B)):
        for n in P.degrees:
            M = mods.get(n)
            if M is not None and M.size > 1 and not is_projective(M).holds:
                raise SplitError(f"{kind} in degree {n} is not projective", n, kind, M)
    sections_t, sections_s = {}, {}
    for n in P.degrees:
        Z, H = HD.Z[n], HD.H[n]
        if H.size > 1:
            t = _section(Z, H.projection, H, ModuleMap.identity(H))
            if t is None:
                raise SplitError(f"no section of Z_{n} -> H_{n}", n, "homology", H)
            sections_t[n] = t
        Bm = HD.B[n - 1] if (n - 1) in HD.B else None
        if Bm is not None and Bm.size > 1:
            dn = restrict_image(P.diff(n), Bm)
            s = _section(P.term(n), dn, Bm, ModuleMap.identity(Bm))
            if s is None:
                raise SplitError(f"d_{n} does not split over B_{n - 1}", n, "boundaries", Bm)
            sections_s[n] = s
    spheres = ChainComplex(R, {n: HD.H[n] for n in P.degrees}, {}, name="sum of spheres")
    f_maps, g_maps = {}, {}
    for n in P.degrees:
        Pn, Z, H = P.term(n), HD.Z[n], HD.H[n]
        if H.size == 1:
            continue
        f_maps[n] = Z.inclusion.compose(sections_t[n])
        # p(x) = x - s(d x) lands in Z_n; then project to H_n
        dx = P.diff(n).table
        if n in sections_s:
            Bm = HD.B[n - 1]
            sdx = sections_s[n].table[Bm.index[dx]]
            px = Pn.add[np.arange(Pn.size), Pn.neg[sdx]]
        else:
            px = np.arange(Pn.size)
        g_maps[n] = ModuleMap(Pn, H, H.proj[Z.index[px]])
    f = ChainMap(spheres, P, f_maps)
    g = ChainMap(P, spheres, g_maps)
    gf = g.compose(f)
    idS = identity_map(spheres)
    h_gf = null_homotopy(gf - idS)
    fg_minus = f.compose(g) - identity_map(P)
    h_fg = null_homotopy(fg_minus)
    if h_fg is None or h_gf is None:
        raise AssertionError("split maps are not mutually inverse up to homotopy")
    degreewise = {}
    disks = {}
    for n in P.degrees:
        Pn, B, Z, H = P.term(n), HD.B[n], HD.Z[n], HD.H[n]
        Bm = HD.B.get(n - 1)
        parts = [B, H] + ([Bm] if Bm is not None else [])
        S = direct_sum(*parts)
        table = np.zeros(S.size, dtype=np.int64)
        tup = decode(np.arange(S.size), tuple(p.size for p in parts))
        table = B.members[tup[:, 0]]
        if H.size > 1:
            table = Pn.add[table, Z.members[sections_t[n].table[tup[:, 1]]]]
        if Bm is not None and n in sections_s:
            table = Pn.add[table, sections_s[n].table[tup[:, 2]]]
        iso = ModuleMap(S, Pn, table)
        if not (iso.is_injective() and iso.is_surjective()):
            raise AssertionError(f"degree {n} decomposition is not an isomorphism")
        degreewise[n] = iso
        if Bm is not None and Bm.size > 1:
            disks[n] = Bm
    return SplitResult(spheres, f, g, h_fg, h_gf, degreewise, disks)


# ---------------------------------------------------------------------------
# realising modules as homology


@dataclass
class Realization:
    complex: ChainComplex
    iso: ModuleMap  # H_1 P -> M


def realize_as_h1(F: Presentation, M_gens: Sequence[int], embedding: Sequence[Sequence[int]]) -> Realization:
    """Three-term free complex with ``H_1 = M`` for ``M <= F`` and ``F/M -> R^l``.

    ``M_gens`` are elements of the presented module F.  ``embedding`` gives,
    for each generator of F, its image in ``R^l`` (ring entries); the map it
    defines on F must have kernel exactly M, so that it induces an embedding
    of ``F/M``.
    """
    from .modules import submodule

    R = F.ring
    Fm = module_from_presentation(F)
    M = submodule(Fm, M_gens)
    rows = np.asarray(embedding, dtype=np.int64).reshape(F.k, -1)
    l = rows.shape[1]
    P0 = free_module(R, l)
    try:
        e = ModuleMap.from_images(Fm, P0, [free_element(R, r) for r in rows])
    except ValueError as exc:
        raise ValueError(f"embedding is not defined on F: {exc}") from None
    if not np.array_equal(e.table == 0, M.mask):
        raise ValueError("the embedding's kernel is not M, so F/M does not embed")
    P = free_complex(R, {0: l, 1: F.k, 2: F.m}, {1: rows.T, 2: F.D})
    H1, Z1 = P.homology.H[1], P.homology.Z[1]
    lifts = Z1.members[H1.reps]
    # P_1 = R^k projects onto F; cosets are indexed through Fm.proj
    iso = ModuleMap(H1, M, M.index[Fm.proj[lifts]])
    if not (iso.is_injective() and iso.is_surjective()):
        raise AssertionError("H_1 is not isomorphic to M")
    return Realization(P, iso)


def realize_cycles(P: ChainComplex, n: int) -> Realization:
    """The same construction for ``Z_n P <= P_n``, with ``P_n / Z_n P`` embedded by ``d_n``."""
    R = P.ring
    k = P.ranks.get(n)
    if not k:
        raise ValueError(f"degree {n} must carry a nonzero free term")
    l = P.ranks.get(n - 1) or 0
    Z = P.homology.Z[n]
    F = Presentation(R, k)
    D = np.asarray(P.matrices.get(n, np.zeros((l, k), dtype=np.int64))).reshape(l, k)
    gens = [int(Z.members[g]) for g in Z.generators]
    return realize_as_h1(F, gens, D.T)
