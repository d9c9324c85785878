"""Finite right modules as explicit tables, and the deciders built on them.

A module stores its addition table and the right action ``act[m, r] = m*r``.
Element ``0`` is the zero.  Coordinates come from the additive structure
(:class:`~ringlab.abelian.AbGroup`); every R-linear question is turned into
a linear system over those coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from . import config
from .abelian import AbGroup, AbHom, BlockSystem, Subgroup, decode, encode, group_structure, quotient_structure
from .config import BudgetExceeded
from .predicates import Verdict, ideal_generators, one_sided_ideals
from .rings import RingTable


class FinModule:
    """A finite right R-module (or left, when ``side == "left"``)."""

    def __init__(self, ring: RingTable, add, act, generators: Sequence[int] = (), provenance=None,
                 side: str = "right", check: bool = True, cap: int | None = None):
        add = np.array(add, dtype=np.int64)
        act = np.array(act, dtype=np.int64)
        n = len(add)
        cap = config.MODULE_CAP if cap is None else cap
        if n > cap:
            raise BudgetExceeded(f"module of size {n} exceeds the cap {cap}")
        if add.shape != (n, n) or act.shape != (n, ring.size):
            raise ValueError("table shapes do not match the ring")
        for t in (add, act):
            t.flags.writeable = False
        self.ring = ring
        self.size = n
        self.add = add
        self.act = act
        self.zero = 0
        self.side = side
        self.provenance = dict(provenance or {})
        self.generators = tuple(int(g) for g in generators if int(g) != 0)
        self.neg = np.argmax(add == 0, axis=1)
        if check:
            self._check()

    def __repr__(self):
        kind = self.provenance.get("kind", "module")
        return f"FinModule({kind}, size={self.size}, ngens={len(self.generators)})"

    def __len__(self):
        return self.size

    def _check(self):
        R, n = self.ring, self.size
        group_structure(self.add, 0, check=True)
        ar = np.arange(n)
        if not (self.act[:, R.one] == ar).all():
            raise ValueError("the ring identity does not act trivially")
        if not (self.act[:, 0] == 0).all():
            raise ValueError("m*0 != 0")
        # additivity in the module argument, for every ring element
        lhs = self.act[self.add[:, :, None], np.arange(R.size)[None, None, :]] if n * n * R.size <= 1 << 22 else None
        if lhs is not None:
            rhs = self.add[self.act[:, None, :], self.act[None, :, :]]
            if not (lhs == rhs).all():
                raise ValueError("action is not additive in the module")
        # additivity and associativity in the ring argument
        if self.side == "right":
            mixed = self.act[self.act[:, :, None], np.arange(R.size)[None, None, :]]
            want = self.act[:, R.mul]
        else:
            mixed = self.act[self.act[:, None, :], np.arange(R.size)[None, :, None]]
            want = self.act[:, R.mul.T]
        if not (mixed == want).all():
            raise ValueError("action is not associative")
        if not (self.add[self.act[:, :, None], self.act[:, None, :]] == self.act[:, R.add]).all():
            raise ValueError("action is not additive in the ring")
        if self.size > 1 and not closure(self, self.generators).all():
            raise ValueError("generators do not generate the module")

    # -- coordinates ---------------------------------------------------------

    @cached_property
    def group(self) -> AbGroup:
        return group_structure(self.add, 0, check=False)

    @property
    def factors(self) -> tuple[int, ...]:
        return self.group.factors

    @cached_property
    def act_mats(self) -> np.ndarray:
        """``act_mats[r]`` is the coordinate matrix of ``m -> m*r``."""
        G = self.group
        gens = np.array(G.gens, dtype=np.int64)
        imgs = G.to_vec[self.act[gens, :]]  # (ngens, |R|, c)
        return np.ascontiguousarray(np.transpose(imgs, (1, 2, 0)))

    def vec(self, x: int) -> np.ndarray:
        return self.group.to_vec[x]

    def elem(self, v) -> int:
        return self.group.elem(v)

    # -- generators, expressions and relations ------------------------------

    @cached_property
    def expressions(self) -> np.ndarray:
        """Row ``m`` holds ring elements ``r`` with ``m = sum_i g_i r_i``."""
        k = len(self.generators)
        R = self.ring
        if "free_rank" in self.provenance:
            return decode(np.arange(self.size), (R.size,) * k)
        expr = np.full((self.size, k), -1, dtype=np.int64)
        expr[0] = 0
        seen = np.zeros(self.size, dtype=bool)
        seen[0] = True
        frontier = np.array([0], dtype=np.int64)
        gens = np.array(self.generators, dtype=np.int64)
        multiples = self.act[gens]  # (k, |R|)
        while len(frontier):
            cand = self.add[frontier[:, None, None], multiples[None, :, :]]
            f_idx, g_idx, r_idx = np.nonzero(~seen[cand])
            if not len(f_idx):
                break
            targets = cand[f_idx, g_idx, r_idx]
            _, first = np.unique(targets, return_index=True)
            f_idx, g_idx, r_idx = f_idx[first], g_idx[first], r_idx[first]
            targets = targets[first]
            rows = expr[frontier[f_idx]].copy()
            rows[np.arange(len(rows)), g_idx] = R.add[rows[np.arange(len(rows)), g_idx], r_idx]
            expr[targets] = rows
            seen[targets] = True
            frontier = targets
        if not seen.all():
            raise ValueError("generators do not generate the module")
        return expr

    def express(self, x: int) -> tuple[int, ...]:
        return tuple(int(v) for v in self.expressions[x])

    def combine(self, coeffs: Sequence[int]) -> int:
        """The element ``sum_i g_i * coeffs[i]``."""
        out = 0
        for g, r in zip(self.generators, coeffs):
            out = int(self.add[out, self.act[g, r]])
        return out

    @cached_property
    def generator_matrix(self) -> np.ndarray:
        """Coordinate matrix of ``R^k -> M``, ``(r_i) -> sum g_i r_i``."""
        R = self.ring
        cols = []
        for g in self.generators:
            cols.append(self.group.to_vec[self.act[g, list(R.group.gens)]].T)
        if not cols:
            return np.zeros((len(self.factors), 0), dtype=np.int64)
        return np.hstack(cols).reshape(len(self.factors), -1)

    @cached_property
    def relations(self) -> np.ndarray:
        """Additive generators of ``ker(R^k -> M)``, rows of ring elements."""
        R, k = self.ring, len(self.generators)
        if "free_rank" in self.provenance or k == 0:
            return np.zeros((0, k), dtype=np.int64)
        hom = AbHom(self.generator_matrix, R.group.factors * k, self.factors)
        ker = hom.kernel()
        c = len(R.group.factors)
        rows = []
        for v in ker.gens:
            rows.append([int(R.group.elem(v[i * c : (i + 1) * c])) for i in range(k)])
        return np.array(rows, dtype=np.int64).reshape(-1, k)

    def elements_of(self, mask) -> np.ndarray:
        return np.flatnonzero(mask)


# ---------------------------------------------------------------------------
# closures and constructors


def closure(M: FinModule, seeds, base=None) -> np.ndarray:
    """Mask of the submodule generated by ``seeds`` (plus the submodule ``base``)."""
    mask = np.zeros(M.size, dtype=bool) if base is None else np.array(base, dtype=bool)
    mask[0] = True
    seeds = np.asarray(list(seeds), dtype=np.int64)
    if not len(seeds):
        return mask
    new = np.unique(M.act[seeds].ravel())
    frontier = new[~mask[new]]
    while len(frontier):
        mask[frontier] = True
        members = np.flatnonzero(mask)
        cand = np.unique(M.add[frontier[:, None], members[None, :]].ravel())
        frontier = cand[~mask[cand]]
    return mask


def greedy_generators(M: FinModule, mask) -> list[int]:
    """Smallest-index greedy generating set of the submodule ``mask``."""
    mask = np.asarray(mask, dtype=bool)
    span = np.zeros(M.size, dtype=bool)
    span[0] = True
    gens = []
    while True:
        rest = np.flatnonzero(mask & ~span)
        if not len(rest):
            return gens
        g = int(rest[0])
        gens.append(g)
        span = closure(M, [g], base=span)


_ZERO_CACHE: dict = {}
_FREE_CACHE: dict = {}


def zero_module(R: RingTable) -> FinModule:
    key = R.key
    if key not in _ZERO_CACHE:
        _ZERO_CACHE[key] = FinModule(R, [[0]], np.zeros((1, R.size)), (), {"kind": "zero", "free_rank": 0})
    return _ZERO_CACHE[key]


def free_module(R: RingTable, k: int, cap: int | None = None) -> FinModule:
    """``R^k`` with elements coded as mixed-radix tuples (first slot least significant)."""
    cap = config.MODULE_CAP if cap is None else cap
    if k < 0:
        raise ValueError("rank must be non-negative")
    if k == 0:
        return zero_module(R)
    n = R.size**k
    if n > cap:
        raise BudgetExceeded(f"free module of rank {k} has {n} elements (cap {cap})")
    key = (R.key, k)
    if key in _FREE_CACHE:
        return _FREE_CACHE[key]
    radix = (R.size,) * k
    tup = decode(np.arange(n), radix)
    add = encode(R.add[tup[:, None, :], tup[None, :, :]], radix)
    act = encode(R.mul[tup[:, None, :], np.arange(R.size)[None, :, None]], radix)
    gens = [R.size**i for i in range(k)]
    M = FinModule(R, add, act, gens, {"kind": "free", "free_rank": k}, check=False, cap=cap)
    _FREE_CACHE[key] = M
    return M


def free_element(R: RingTable, entries: Sequence[int]) -> int:
    return int(encode(np.asarray(entries), (R.size,) * len(entries)))


def direct_sum(*mods: FinModule) -> FinModule:
    """Direct sum; element codes are mixed radix with the first summand least significant."""
    if not mods:
        raise ValueError("need at least one summand")
    R = mods[0].ring
    sizes = tuple(M.size for M in mods)
    n = math.prod(sizes)
    if n > config.MODULE_CAP:
        raise BudgetExceeded(f"direct sum of size {n} exceeds the cap")
    tup = decode(np.arange(n), sizes)
    add = np.zeros((n, n), dtype=np.int64)
    act = np.zeros((n, R.size), dtype=np.int64)
    scale = 1
    gens = []
    for i, M in enumerate(mods):
        add += M.add[tup[:, None, i], tup[None, :, i]] * scale
        act += M.act[tup[:, i]] * scale
        gens += [g * scale for g in M.generators]
        scale *= M.size
    out = FinModule(R, add, act, gens, {"kind": "sum", "sizes": sizes}, check=False)
    out.summands = mods
    return out


def sum_injection(S: FinModule, i: int) -> "ModuleMap":
    sizes = S.provenance["sizes"]
    scale = math.prod(sizes[:i])
    M = S.summands[i]
    return ModuleMap(M, S, np.arange(M.size) * scale)


def sum_projection(S: FinModule, i: int) -> "ModuleMap":
    sizes = S.provenance["sizes"]
    tup = decode(np.arange(S.size), sizes)
    return ModuleMap(S, S.summands[i], tup[:, i])


class Submodule(FinModule):
    """A submodule, carried on its own dense indices, with its inclusion map."""

    def __init__(self, ambient: FinModule, mask, generators=None):
        mask = np.asarray(mask, dtype=bool)
        members = np.flatnonzero(mask)
        index = np.full(ambient.size, -1, dtype=np.int64)
        index[members] = np.arange(len(members))
        add = index[ambient.add[members[:, None], members[None, :]]]
        act = index[ambient.act[members]]
        if generators is None:
            generators = greedy_generators(ambient, mask)
        super().__init__(ambient.ring, add, act, [int(index[g]) for g in generators],
                         {"kind": "submodule"}, side=ambient.side, check=False)
        self.ambient = ambient
        self.members = members
        self.mask = mask
        self.index = index

    @cached_property
    def inclusion(self) -> "ModuleMap":
        return ModuleMap(self, self.ambient, self.members, check=False)


def submodule(M: FinModule, gens) -> Submodule:
    gens = [int(g) for g in gens]
    return Submodule(M, closure(M, gens), generators=[g for g in gens if g])


class Quotient(FinModule):
    """``M / S`` on coset indices (cosets ordered by their smallest member)."""

    def __init__(self, ambient: FinModule, mask):
        mask = np.asarray(mask, dtype=bool)
        sub = np.flatnonzero(mask)
        rep_of = ambient.add[:, sub].min(axis=1)
        reps = np.unique(rep_of)
        index = np.full(ambient.size, -1, dtype=np.int64)
        index[reps] = np.arange(len(reps))
        proj = index[rep_of]
        add = proj[ambient.add[reps[:, None], reps[None, :]]]
        act = proj[ambient.act[reps]]
        gens = []
        for g in ambient.generators:
            q = int(proj[g])
            if q and q not in gens:
                gens.append(q)
        super().__init__(ambient.ring, add, act, gens, {"kind": "quotient"}, side=ambient.side, check=False)
        self.ambient = ambient
        self.sub_mask = mask
        self.reps = reps
        self.proj = proj

    @cached_property
    def projection(self) -> "ModuleMap":
        return ModuleMap(self.ambient, self, self.proj, check=False)


def quotient(M: FinModule, sub) -> Quotient:
    mask = sub.mask if isinstance(sub, Submodule) else np.asarray(sub, dtype=bool)
    return Quotient(M, mask)


def sub_quotient(M: FinModule, spec) -> FinModule:
    """Submodule when ``spec`` is a list of generators, quotient when it is a submodule or mask."""
    if isinstance(spec, Submodule) or (isinstance(spec, np.ndarray) and spec.dtype == bool):
        return quotient(M, spec)
    return submodule(M, spec)


# ---------------------------------------------------------------------------
# maps


class ModuleMap:
    """An R-linear map given by its full value table."""

    def __init__(self, source: FinModule, target: FinModule, table, check: bool = True):
        table = np.asarray(table, dtype=np.int64).reshape(source.size)
        table.flags.writeable = False
        self.source = source
        self.target = target
        self.table = table
        if check:
            self.verify()

    def __repr__(self):
        return f"ModuleMap({self.source.size} -> {self.target.size})"

    def __call__(self, x):
        return self.table[x]

    def verify(self):
        S, T, f = self.source, self.target, self.table
        if f[0] != 0:
            raise ValueError("map does not send 0 to 0")
        bad = f[S.add] != T.add[f[:, None], f[None, :]]
        if bad.any():
            a, b = map(int, np.argwhere(bad)[0])
            raise ValueError(f"map is not additive at ({a}, {b})")
        bad = f[S.act] != T.act[f]
        if bad.any():
            m, r = map(int, np.argwhere(bad)[0])
            raise ValueError(f"map is not R-linear at (m={m}, r={r})")

    @classmethod
    def from_images(cls, source: FinModule, target: FinModule, images: Sequence[int], check: bool = True) -> "ModuleMap":
        """Extend generator images linearly; raises if that is not well defined."""
        images = np.asarray(images, dtype=np.int64).reshape(len(source.generators))
        expr = source.expressions
        table = np.zeros(source.size, dtype=np.int64)
        for i, img in enumerate(images):
            table = target.add[table, target.act[img, expr[:, i]]]
        return cls(source, target, table, check=check)

    @classmethod
    def zero(cls, source: FinModule, target: FinModule) -> "ModuleMap":
        return cls(source, target, np.zeros(source.size, dtype=np.int64), check=False)

    @classmethod
    def identity(cls, M: FinModule) -> "ModuleMap":
        return cls(M, M, np.arange(M.size), check=False)

    def images(self) -> tuple[int, ...]:
        return tuple(int(self.table[g]) for g in self.source.generators)

    def compose(self, other: "ModuleMap") -> "ModuleMap":
        """``self o other``."""
        return ModuleMap(other.source, self.target, self.table[other.table], check=False)

    def __add__(self, other: "ModuleMap") -> "ModuleMap":
        return ModuleMap(self.source, self.target, self.target.add[self.table, other.table], check=False)

    def __neg__(self) -> "ModuleMap":
        return ModuleMap(self.source, self.target, self.target.neg[self.table], check=False)

    def __sub__(self, other: "ModuleMap") -> "ModuleMap":
        return self + (-other)

    def __eq__(self, other):
        return isinstance(other, ModuleMap) and np.array_equal(self.table, other.table)

    def __hash__(self):
        return hash(self.table.tobytes())

    def is_zero(self) -> bool:
        return not self.table.any()

    def kernel(self) -> Submodule:
        return Submodule(self.source, self.table == 0)

    def image(self) -> Submodule:
        mask = np.zeros(self.target.size, dtype=bool)
        mask[self.table] = True
        return Submodule(self.target, mask)

    def is_injective(self) -> bool:
        return int((self.table == 0).sum()) == 1

    def is_surjective(self) -> bool:
        return len(np.unique(self.table)) == self.target.size

    @cached_property
    def matrix(self) -> np.ndarray:
        """Coordinate matrix (target coords x source coords)."""
        S, T = self.source, self.target
        gens = np.array(S.group.gens, dtype=np.int64)
        return T.group.to_vec[self.table[gens]].T.reshape(len(T.factors), len(S.factors))


def restrict_image(f: ModuleMap, sub: Submodule) -> ModuleMap:
    """Corestrict ``f`` to a submodule of its target containing its image."""
    idx = sub.index[f.table]
    if (idx < 0).any():
        raise ValueError("image is not contained in the submodule")
    return ModuleMap(f.source, sub, idx, check=False)


def induced_on_quotients(f: ModuleMap, src_q: Quotient, tgt_q: Quotient) -> ModuleMap:
    table = tgt_q.proj[f.table[src_q.reps]]
    # well defined iff f maps the source submodule into the target one
    if (tgt_q.proj[f.table[src_q.sub_mask]] != 0).any():
        raise ValueError("map does not descend to the quotients")
    return ModuleMap(src_q, tgt_q, table, check=False)


# ---------------------------------------------------------------------------
# presentations


@dataclass
class Presentation:
    """``R^k / D R^m``: the cokernel of ``x -> D x`` on column vectors (D is k x m).

    With ``side="left"`` it presents the left module ``R^k / {x D^T}``,
    i.e. relation ``j`` reads ``sum_i D[i, j] g_i = 0``.
    """

    ring: RingTable
    k: int
    D: np.ndarray = field(default_factory=lambda: np.zeros((0, 0), dtype=np.int64))
    side: str = "right"

    def __post_init__(self):
        D = np.asarray(self.D, dtype=np.int64)
        if D.size == 0:
            D = np.zeros((self.k, 0), dtype=np.int64)
        if D.ndim != 2 or D.shape[0] != self.k:
            raise ValueError(f"relation matrix must have {self.k} rows, got shape {D.shape}")
        if ((D < 0) | (D >= self.ring.size)).any():
            raise ValueError("relation entries must be ring element indices")
        self.D = D

    @property
    def m(self) -> int:
        return self.D.shape[1]

    def columns(self) -> list[int]:
        """Relation columns as elements of ``R^k``."""
        return [free_element(self.ring, self.D[:, j]) for j in range(self.m)]


def relation_submodule(p: Presentation) -> Submodule:
    F = free_module(p.ring, p.k)
    return submodule(F, p.columns())


def module_from_presentation(p: Presentation) -> Quotient:
    if p.side != "right":
        raise ValueError("module_from_presentation builds right modules; use left_module_from_presentation")
    F = free_module(p.ring, p.k)
    K = relation_submodule(p)
    Q = quotient(F, K.mask)
    Q.provenance.update({"kind": "presented", "presentation": p})
    return Q


def left_module_from_presentation(p: Presentation) -> FinModule:
    """Left module table (``act[n, r] = r*n``) of a left presentation."""
    R, k = p.ring, p.k
    n = R.size**k
    if n > config.MODULE_CAP:
        raise BudgetExceeded(f"left free module of rank {k} has {n} elements")
    radix = (R.size,) * k
    tup = decode(np.arange(n), radix)
    add = encode(R.add[tup[:, None, :], tup[None, :, :]], radix)
    act = encode(R.mul[np.arange(R.size)[None, :, None], tup[:, None, :]], radix)
    F = FinModule(R, add, act, [R.size**i for i in range(k)], {"kind": "free-left", "free_rank": k},
                  side="left", check=False)
    mask = closure(F, [free_element(R, p.D[:, j]) for j in range(p.m)])
    return Quotient(F, mask)


def cyclic_presentation(R: RingTable, ideal_gens: Sequence[int], side: str = "right") -> Presentation:
    """``R/I`` for the one-sided ideal generated by ``ideal_gens``."""
    gens = [int(g) for g in ideal_gens if int(g)]
    D = np.array([gens], dtype=np.int64).reshape(1, len(gens))
    return Presentation(R, 1, D, side=side)


# ---------------------------------------------------------------------------
# Hom


class HomGroup:
    """All R-maps ``M -> N``, coordinatised by generator images in ``N``."""

    def __init__(self, source: FinModule, target: FinModule, sub: Subgroup):
        self.source = source
        self.target = target
        self.sub = sub

    def __repr__(self):
        return f"HomGroup(order={self.order})"

    @property
    def order(self) -> int:
        return self.sub.order

    def structure(self) -> list[int]:
        return self.sub.structure()

    @property
    def block(self) -> int:
        return len(self.target.factors)

    def images_of(self, vec) -> list[int]:
        c = self.block
        vec = np.asarray(vec, dtype=np.int64)
        return [self.target.elem(vec[i * c : (i + 1) * c]) for i in range(len(self.source.generators))]

    def map_of(self, vec) -> ModuleMap:
        return ModuleMap.from_images(self.source, self.target, self.images_of(vec), check=False)

    def vec_of(self, f: ModuleMap) -> np.ndarray:
        return np.concatenate([self.target.vec(int(f.table[g])) for g in self.source.generators] or
                              [np.zeros(0, dtype=np.int64)])

    def maps(self, limit: int = config.ENUM_BUDGET) -> list[ModuleMap]:
        return [self.map_of(v) for v in self.sub.elements(limit)]


def hom_system(M: FinModule, N: FinModule) -> BlockSystem:
    sysm = BlockSystem()
    k = len(M.generators)
    for i in range(k):
        sysm.var(i, N.factors)
    for rho in M.relations:
        eq = sysm.equation(N.factors)
        for i in range(k):
            sysm.coef(eq, i, N.act_mats[rho[i]])
    return sysm


def hom_group(M: FinModule, N: FinModule) -> HomGroup:
    """``Hom_R(M, N)`` via the relation constraints on generator images."""
    if M.ring is not N.ring and M.ring.key != N.ring.key:
        raise ValueError("modules over different rings")
    return HomGroup(M, N, hom_system(M, N).kernel())


def hom_brute(M: FinModule, N: FinModule, budget: int = config.ORACLE_BUDGET) -> list[ModuleMap]:
    """Every R-map ``M -> N`` by scanning generator images and checking tables."""
    k = len(M.generators)
    total = N.size**k
    if total > budget:
        raise BudgetExceeded(f"{total} candidate generator images exceed the oracle budget {budget}")
    out = []
    for code in range(total):
        images = decode(np.array(code), (N.size,) * k) if k else np.zeros(0, dtype=np.int64)
        expr = M.expressions
        table = np.zeros(M.size, dtype=np.int64)
        for i, img in enumerate(images):
            table = N.add[table, N.act[img, expr[:, i]]]
        f = ModuleMap(M, N, table, check=False)
        try:
            f.verify()
        except ValueError:
            continue
        out.append(f)
    return out


# ---------------------------------------------------------------------------
# projectivity


def is_projective(M: FinModule) -> Verdict:
    """Decide whether ``R^k -> M`` (k = number of generators) splits.

    The witness is the section, given as the ``R^k`` coordinates (ring
    elements) of the image of each generator.
    """
    R = M.ring
    k = len(M.generators)
    if M.size == 1:
        return Verdict(True, [], "zero module")
    rc = R.group.factors
    sysm = BlockSystem()
    for i in range(k):
        for j in range(k):
            sysm.var((i, j), rc)
    # the section respects the relations of M
    for rho in M.relations:
        for j in range(k):
            eq = sysm.equation(rc)
            for i in range(k):
                sysm.coef(eq, (i, j), R.right_mats[rho[i]])
    # and composes with the projection to the identity
    c = len(rc)
    for i in range(k):
        eq = sysm.equation(M.factors)
        for j in range(k):
            sysm.coef(eq, (i, j), M.generator_matrix[:, j * c : (j + 1) * c])
        sysm.rhs(eq, M.vec(M.generators[i]))
    sol = sysm.solve()
    if sol is None:
        return Verdict(False, None, "the free cover does not split")
    section = []
    for i in range(k):
        section.append([int(R.group.elem(sol.particular[sysm.var_slice((i, j))])) for j in range(k)])
    return Verdict(True, section, f"split over a free module of rank {k}")


def section_map(M: FinModule, section) -> ModuleMap:
    F = free_module(M.ring, len(M.generators))
    return ModuleMap.from_images(M, F, [free_element(M.ring, row) for row in section])


# ---------------------------------------------------------------------------
# Ext^1


@dataclass
class Ext1Result:
    order: int
    structure: list[int]
    relations: Submodule
    homs: HomGroup
    image: Subgroup
    cocycles: list[np.ndarray]

    @property
    def is_zero(self) -> bool:
        return self.order == 1

    def is_trivial_class(self, vec) -> bool:
        return self.image.contains(vec)

    def cocycle_map(self, vec) -> ModuleMap:
        return self.homs.map_of(vec)


def ext1(F: Presentation, M: FinModule) -> Ext1Result:
    """``Ext^1(F, M) = Hom(K, M) / restrictions of Hom(R^k, M)``, K the relation module."""
    K = relation_submodule(F)
    homs = hom_group(K, M)
    R = F.ring
    # restriction: (m_1..m_k) -> images of K's generators, gen = sum_i e_i * a_i
    amb = K.ambient
    sysm = BlockSystem()
    for i in range(F.k):
        sysm.var(i, M.factors)
    gens_in_F = [int(K.members[g]) for g in K.generators]
    blocks = []
    for g in gens_in_F:
        coeffs = amb.express(g)
        eq = sysm.equation(M.factors)
        for i in range(F.k):
            sysm.coef(eq, i, M.act_mats[coeffs[i]])
        blocks.append(eq)
    restr = sysm.matrix()
    image = Subgroup(homs.sub.moduli, restr.T if restr.size else [])
    order = homs.order // image.order if homs.sub.moduli else 1
    structure = quotient_structure(homs.sub, image) if order > 1 else []
    cocycles = []
    if order > 1:
        span = Subgroup(homs.sub.moduli, image.gens)
        for g in homs.sub.gens:
            if not span.contains(g):
                cocycles.append(g.copy())
                span = Subgroup(homs.sub.moduli, np.vstack([span.gens, g[None, :]]))
    return Ext1Result(order, structure, K, homs, image, cocycles)


def ext1_brute(F: Presentation, M: FinModule, budget: int = config.ORACLE_BUDGET) -> int:
    """Order of Ext^1 by counting homs on K and which of them extend to ``R^k``."""
    K = relation_submodule(F)
    homs = hom_brute(K, M, budget)
    Fm = free_module(F.ring, F.k)
    restricted = set()
    for f in hom_brute(Fm, M, budget):
        restricted.add(f.table[K.members].tobytes())
    return len(homs) // len(restricted)


# ---------------------------------------------------------------------------
# FP-injectivity


@dataclass
class FpInjectivity:
    holds: bool
    witness: dict | None
    ideals_checked: int
    qualified: bool = False
    bounded: dict | None = None

    def __bool__(self):
        return self.holds


def right_ideal_presentations(R: RingTable, limit: int = 4096) -> list[Presentation]:
    out = []
    for ideal in one_sided_ideals(R, "right", limit):
        out.append(cyclic_presentation(R, ideal_generators(R, ideal, "right")))
    return out


def is_fp_injective(M: FinModule, ideal_limit: int = 4096, extra: Sequence[Presentation] = ()) -> FpInjectivity:
    """Baer test: every map from a right ideal into M extends to R.

    ``extra`` presentations are additionally checked through Ext^1 directly.
    """
    R = M.ring
    ideals = one_sided_ideals(R, "right", ideal_limit + 1)
    qualified = len(ideals) > ideal_limit
    ideals = ideals[:ideal_limit]
    for ideal in ideals:
        p = cyclic_presentation(R, ideal_generators(R, ideal, "right"))
        e = ext1(p, M)
        if not e.is_zero:
            f = e.cocycle_map(e.cocycles[0])
            members = [int(e.relations.members[x]) for x in range(e.relations.size)]
            witness = {
                "ideal": members,
                "map": {int(m): int(f.table[x]) for x, m in enumerate(members)},
                "ext_order": e.order,
            }
            return FpInjectivity(False, witness, len(ideals), qualified)
    bounded = None
    for p in extra:
        e = ext1(p, M)
        if not e.is_zero:
            bounded = {"presentation": p.D.tolist(), "ext_order": e.order}
            break
    return FpInjectivity(True, None, len(ideals), qualified, bounded)


def small_presentations(R: RingTable, max_gens: int = 2, limit: int = 4096) -> list[Presentation]:
    """Cyclic ``R/I`` for every right ideal, then ``R^j / vR`` for ``2 <= j <= max_gens``."""
    out = right_ideal_presentations(R, limit)
    for j in range(2, max_gens + 1):
        if R.size**j > config.MODULE_CAP:
            break
        for code in range(R.size**j):
            v = decode(np.array(code), (R.size,) * j)
            out.append(Presentation(R, j, v.reshape(j, 1)))
            if len(out) >= limit:
                return out
    return out


def fp_injective_bounded(M: FinModule, presentations: Sequence[Presentation]) -> Verdict:
    """Definition-faithful mode: Ext^1(F, M) = 0 for each listed presentation."""
    for p in presentations:
        e = ext1(p, M)
        if not e.is_zero:
            return Verdict(False, {"presentation": p.D.tolist(), "k": p.k, "ext_order": e.order},
                           "non-vanishing Ext^1")
    return Verdict(True, None, f"Ext^1 vanishes on {len(presentations)} presentations")


# ---------------------------------------------------------------------------
# tensor products and Tor_1


@dataclass
class TensorTor:
    tensor_order: int
    tensor_structure: list[int]
    tor_order: int
    tor_structure: list[int]


def _syzygies(p: Presentation) -> list[list[int]]:
    """Additive generators of ``{r in R^m : sum_j r_j D[i, j] = 0 for all i}``."""
    R = p.ring
    k, m = p.D.shape
    if m == 0:
        return []
    sysm = BlockSystem()
    for j in range(m):
        sysm.var(j, R.group.factors)
    for i in range(k):
        eq = sysm.equation(R.group.factors)
        for j in range(m):
            sysm.coef(eq, j, R.right_mats[p.D[i, j]])
    ker = sysm.kernel()
    c = len(R.group.factors)
    return [[int(R.group.elem(v[j * c : (j + 1) * c])) for j in range(m)] for v in ker.gens]


def tensor_tor1(M: FinModule, N: Presentation) -> TensorTor:
    """``M (x)_R N`` and ``Tor_1(M, N)`` for a left presentation ``N = R^k / R^m D^T``."""
    if M.side != "right":
        raise ValueError("first argument must be a right module")
    k, m = N.D.shape
    c = len(M.factors)
    # f: M^m -> M^k, (n_j) -> (sum_j n_j D_ij)_i
    f = np.zeros((k * c, m * c), dtype=np.int64)
    for i in range(k):
        for j in range(m):
            f[i * c : (i + 1) * c, j * c : (j + 1) * c] = M.act_mats[N.D[i, j]]
    src = M.factors * m
    tgt = M.factors * k
    hom = AbHom(f, src, tgt)
    img_f = hom.image()
    full = Subgroup(tgt, np.eye(len(tgt), dtype=np.int64))
    tensor_order = math.prod(tgt) // img_f.order if tgt else 1
    tensor_structure = quotient_structure(full, img_f) if tensor_order > 1 else []
    if not src:
        return TensorTor(tensor_order, tensor_structure, 1, [])
    ker_f = hom.kernel()
    gens = []
    for z in _syzygies(N):
        for n in M.group.gens:
            gens.append(np.concatenate([M.vec(int(M.act[n, z[j]])) for j in range(m)]))
    img_g = Subgroup(src, gens)
    tor_order = ker_f.order // img_g.order
    tor_structure = quotient_structure(ker_f, img_g) if tor_order > 1 else []
    return TensorTor(tensor_order, tensor_structure, tor_order, tor_structure)


def tor1_brute(M: FinModule, N: Presentation, budget: int = config.ORACLE_BUDGET) -> int:
    """Order of Tor_1 by counting the kernel of ``M^m -> M^k`` and the syzygy image."""
    R = M.ring
    k, m = N.D.shape
    if M.size**m > budget or R.size**m > budget:
        raise BudgetExceeded("Tor oracle exceeds its budget")
    tuples = decode(np.arange(M.size**m), (M.size,) * m)
    images = np.zeros((len(tuples), k), dtype=np.int64)
    for i in range(k):
        acc = np.zeros(len(tuples), dtype=np.int64)
        for j in range(m):
            acc = M.add[acc, M.act[tuples[:, j], N.D[i, j]]]
        images[:, i] = acc
    ker = int((images == 0).all(axis=1).sum()) if k else len(tuples)
    # syzygies by brute force, then the subgroup they generate in M^m
    rs = decode(np.arange(R.size**m), (R.size,) * m)
    ok = np.ones(len(rs), dtype=bool)
    for i in range(k):
        acc = np.zeros(len(rs), dtype=np.int64)
        for j in range(m):
            acc = R.add[acc, R.mul[rs[:, j], N.D[i, j]]]
        ok &= acc == 0
    radix = (M.size,) * m
    seen = {0}
    seeds = set()
    for z in rs[ok]:
        for n in range(M.size):
            seeds.add(int(encode(M.act[n, z], radix)))
    frontier = list(seeds - seen)
    seen |= seeds
    while frontier:
        nxt = []
        for a in frontier:
            va = decode(np.array(a), radix)
            for b in list(seen):
                vb = decode(np.array(b), radix)
                s = int(encode(M.add[va, vb], radix))
                if s not in seen:
                    seen.add(s)
                    nxt.append(s)
        frontier = nxt
    return ker // len(seen)


def tensor_brute(M: FinModule, N: FinModule) -> int:
    """Order of ``M (x) N`` from the free abelian group on pairs modulo bilinearity."""
    from .abelian import invariant_factors

    if N.side != "left":
        raise ValueError("second argument must be a left module")
    R = M.ring
    nM, nN = M.size, N.size
    idx = lambda a, b: a * nN + b  # noqa: E731
    ngens = nM * nN
    rels = []
    for a in range(nM):
        for a2 in range(nM):
            for b in range(nN):
                row = [0] * ngens
                row[idx(int(M.add[a, a2]), b)] += 1
                row[idx(a, b)] -= 1
                row[idx(a2, b)] -= 1
                rels.append(row)
    for a in range(nM):
        for b in range(nN):
            for b2 in range(nN):
                row = [0] * ngens
                row[idx(a, int(N.add[b, b2]))] += 1
                row[idx(a, b)] -= 1
                row[idx(a, b2)] -= 1
                rels.append(row)
            for r in range(R.size):
                row = [0] * ngens
                row[idx(int(M.act[a, r]), b)] += 1
                row[idx(a, int(N.act[b, r]))] -= 1
                rels.append(row)
    inv = invariant_factors(rels, ngens)
    if any(d == 0 for d in inv):
        raise ValueError("tensor product came out infinite")
    return math.prod(inv)


# ---------------------------------------------------------------------------
# flatness


def left_ideal_presentations(R: RingTable, limit: int = 4096) -> list[Presentation]:
    out = []
    for ideal in one_sided_ideals(R, "left", limit):
        out.append(cyclic_presentation(R, ideal_generators(R, ideal, "left"), side="left"))
    return out


def is_flat(M: FinModule, limit: int = 4096, cross_check: bool = False) -> Verdict:
    """Tor_1(M, R/J) = 0 for every left ideal J (finite ring: flat iff projective)."""
    for p in left_ideal_presentations(M.ring, limit):
        tt = tensor_tor1(M, p)
        if tt.tor_order != 1:
            v = Verdict(False, {"left_ideal_generators": p.D[0].tolist(), "tor_order": tt.tor_order},
                        "Tor_1 does not vanish")
            break
    else:
        v = Verdict(True, None, "Tor_1 vanishes on every cyclic left module")
    if cross_check:
        proj = is_projective(M)
        if proj.holds != v.holds:
            raise AssertionError(f"flatness ({v.holds}) disagrees with projectivity ({proj.holds})")
    return v
