"""Enumeration of small free complexes up to isomorphism.

A complex with free terms is determined by its ranks and differential
matrices.  Two such complexes are isomorphic exactly when the matrices are
related by ``D_n -> g_{n-1}^{-1} D_n g_n`` with ``g_n`` invertible, so each
orbit is represented by its lexicographically least matrix tuple.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .abelian import decode
from .complexes import ChainComplex, free_complex, sphere
from .config import BudgetExceeded
from .modules import module_from_presentation
from .predicates import ideal_generators, one_sided_ideals
from .rings import RingTable

CANDIDATE_BUDGET = 1 << 26
TUPLE_BUDGET = 1 << 22  # rows of d^2 = 0 tuples kept in memory


@dataclass(frozen=True)
class ComplexSpec:
    """Free complex in degrees ``lo..lo+len(ranks)-1``; ``mats[t]`` is ``d_{lo+t+1}`` row-major."""

    lo: int
    ranks: tuple[int, ...]
    mats: tuple[tuple[int, ...], ...]

    @property
    def hi(self) -> int:
        return self.lo + len(self.ranks) - 1

    @property
    def length(self) -> int:
        return len(self.ranks)

    @property
    def total_rank(self) -> int:
        return sum(self.ranks)

    @property
    def code(self) -> tuple[int, ...]:
        return tuple(itertools.chain.from_iterable(self.mats))

    def sort_key(self):
        return (self.length, self.total_rank, self.lo, self.ranks, self.code)

    def matrix(self, n: int) -> np.ndarray:
        t = n - self.lo - 1
        rows, cols = self.ranks[t], self.ranks[t + 1]
        return np.array(self.mats[t], dtype=np.int64).reshape(rows, cols)

    def build(self, R: RingTable) -> ChainComplex:
        ranks = {self.lo + t: r for t, r in enumerate(self.ranks)}
        mats = {n: self.matrix(n) for n in range(self.lo + 1, self.hi + 1)}
        return free_complex(R, ranks, mats, check=False)

    def describe(self) -> dict:
        return {
            "kind": "free",
            "degrees": [self.lo, self.hi],
            "ranks": list(self.ranks),
            "diffs": {str(self.lo + t + 1): self.matrix(self.lo + t + 1).tolist() for t in range(len(self.mats))},
        }


@dataclass
class SphereSpec:
    """``S^n(R/I)`` for a right ideal I (given by generators)."""

    n: int
    ideal: tuple[int, ...]
    size: int

    def sort_key(self):
        return (self.size, self.n, self.ideal)

    def build(self, R: RingTable) -> ChainComplex:
        from .modules import cyclic_presentation

        M = module_from_presentation(cyclic_presentation(R, self.ideal))
        return sphere(M, self.n)

    def describe(self) -> dict:
        return {"kind": "sphere", "degree": self.n, "module": "R/I", "ideal_generators": list(self.ideal),
                "size": self.size}


# ---------------------------------------------------------------------------
# ring matrix arithmetic on stacked entry arrays


def _matmul(R: RingTable, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Products of stacks ``A (..., a, b)`` and ``B (..., b, c)``."""
    a, b = A.shape[-2:]
    c = B.shape[-1]
    shape = np.broadcast_shapes(A.shape[:-2], B.shape[:-2]) + (a, c)
    out = np.zeros(shape, dtype=np.int64)
    for k in range(b):
        out = R.add[out, R.mul[A[..., :, k, None], B[..., None, k, :]]]
    return out


def _all_matrices(R: RingTable, rows: int, cols: int) -> np.ndarray:
    n = R.size ** (rows * cols)
    if n > CANDIDATE_BUDGET:
        raise BudgetExceeded(f"{n} matrices of shape {rows}x{cols}")
    # first entry most significant, so array order is lexicographic
    ent = decode(np.arange(n), (R.size,) * (rows * cols))[:, ::-1]
    return ent.reshape(n, rows, cols)


def _pattern_tuples(R: RingTable, ranks: tuple[int, ...]) -> np.ndarray:
    """All differential tuples with ``d^2 = 0`` as rows of concatenated entries."""
    shapes = [(ranks[t], ranks[t + 1]) for t in range(len(ranks) - 1)]
    if not shapes:
        return np.zeros((1, 0), dtype=np.int64)
    first = _all_matrices(R, *shapes[0])
    rows = first.reshape(len(first), -1)
    last = first
    for (a, b), (b2, c) in zip(shapes, shapes[1:]):
        nxt = _all_matrices(R, b2, c)
        keep_rows, keep_last = [], []
        # group the prefixes by their last matrix to test each product once
        codes = last.reshape(len(last), -1)
        uniq, inv = np.unique(codes, axis=0, return_inverse=True)
        inv = inv.reshape(-1)
        U = uniq.reshape(len(uniq), a, b)
        # U V = 0 iff every column of V lies in the right kernel of U
        cols = decode(np.arange(R.size**b), (R.size,) * b)
        in_ker = (_matmul(R, U[:, None], cols[None, :, :, None])[..., 0] == 0).all(axis=-1)
        col_codes = _codes(R, nxt.transpose(0, 2, 1).reshape(len(nxt) * c, b)[:, ::-1]).reshape(len(nxt), c)
        good_of = []
        chunk = max(1, (1 << 24) // max(1, len(nxt)))
        for s in range(0, len(uniq), chunk):
            ok = np.ones((min(chunk, len(uniq) - s), len(nxt)), dtype=bool)
            for j in range(c):
                ok &= in_ker[s : s + chunk, col_codes[:, j]]
            good_of += [np.flatnonzero(row) for row in ok]
        total = sum(len(good_of[u]) for u in inv)
        if total > TUPLE_BUDGET:
            raise BudgetExceeded(f"{total} differential tuples for ranks {ranks}")
        for p in range(len(rows)):
            good = good_of[inv[p]]
            if len(good):
                keep_rows.append(np.hstack([np.repeat(rows[p : p + 1], len(good), axis=0),
                                            nxt[good].reshape(len(good), -1)]))
                keep_last.append(nxt[good])
        if not keep_rows:
            return np.zeros((0, rows.shape[1] + b2 * c), dtype=np.int64)
        rows = np.vstack(keep_rows)
        last = np.concatenate(keep_last)
    return rows


def _unit_generators(R: RingTable) -> list[int]:
    """A small generating set of the unit group, chosen greedily in element order."""
    gens: list[int] = []
    reached = np.zeros(R.size, dtype=bool)
    reached[R.one] = True
    for u in np.flatnonzero(R.units):
        if reached[u]:
            continue
        gens.append(int(u))
        frontier = np.flatnonzero(reached)
        while len(frontier):
            prods = R.mul[np.ix_(np.flatnonzero(reached), gens)].reshape(-1)
            new = np.unique(prods[~reached[prods]])
            reached[new] = True
            frontier = new
    return gens


def _gl_generators(R: RingTable, r: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Pairs ``(g, g^{-1})`` generating ``GL_r(R)``: elementary, diagonal-unit and swap matrices."""
    out = []
    eye = np.zeros((r, r), dtype=np.int64)
    np.fill_diagonal(eye, R.one)
    for i in range(r):
        for j in range(r):
            if i == j:
                continue
            for a in R.group.gens:
                g, h = eye.copy(), eye.copy()
                g[i, j] = a
                h[i, j] = R.neg[a]
                out.append((g, h))
    units = _unit_generators(R)
    for i in range(r):
        for u in units:
            g, h = eye.copy(), eye.copy()
            g[i, i] = u
            h[i, i] = R.inverse[u]
            out.append((g, h))
    for i in range(r - 1):
        g = eye.copy()
        g[[i, i + 1]] = g[[i + 1, i]]
        out.append((g, g.copy()))
    return out


def _codes(R: RingTable, rows: np.ndarray) -> np.ndarray:
    width = rows.shape[1]
    if R.size**width >= 2**62:
        raise BudgetExceeded("differential codes do not fit in 64 bits")
    codes = np.zeros(len(rows), dtype=np.int64)
    for t in range(width):
        codes = codes * R.size + rows[:, t]
    return codes


def orbit_labels(R: RingTable, ranks: tuple[int, ...], rows: np.ndarray) -> np.ndarray:
    """For each row (sorted lexicographically), the index of the least row in its orbit."""
    n = len(rows)
    if n <= 1:
        return np.arange(n)
    shapes = [(ranks[t], ranks[t + 1]) for t in range(len(ranks) - 1)]
    offsets = np.cumsum([0] + [a * b for a, b in shapes])
    codes = _codes(R, rows)
    label = np.arange(n)
    images = []
    for deg, r in enumerate(ranks):
        if r == 0:
            continue
        for g, h in _gl_generators(R, r):
            new = rows.copy()
            # d_deg (ranks[deg-1] x r) -> d_deg g ; d_{deg+1} (r x ranks[deg+1]) -> g^{-1} d_{deg+1}
            if deg >= 1:
                a, b = shapes[deg - 1]
                s = slice(offsets[deg - 1], offsets[deg])
                new[:, s] = _matmul(R, rows[:, s].reshape(n, a, b), g[None]).reshape(n, -1)
            if deg < len(shapes):
                a, b = shapes[deg]
                s = slice(offsets[deg], offsets[deg + 1])
                new[:, s] = _matmul(R, h[None], rows[:, s].reshape(n, a, b)).reshape(n, -1)
            idx = np.searchsorted(codes, _codes(R, new))
            images.append(idx)
    changed = True
    while changed:
        changed = False
        for idx in images:
            m = np.minimum(label, label[idx])
            np.minimum.at(m, idx, m)
            if not np.array_equal(m, label):
                label = m
                changed = True
        label = label[label]
    return label


@dataclass
class Pool:
    ring: RingTable
    max_rank: int
    span: int
    complexes: list[ComplexSpec]
    indecomposable: list[bool]
    spheres: list[SphereSpec] = field(default_factory=list)
    _built: dict = field(default_factory=dict, repr=False)

    def build(self, spec) -> ChainComplex:
        key = id(spec)
        if key not in self._built:
            self._built[key] = spec.build(self.ring)
        return self._built[key]

    @cached_property
    def core(self) -> list[ComplexSpec]:
        """Indecomposable complexes (every pool complex is a sum of these)."""
        return [c for c, ind in zip(self.complexes, self.indecomposable) if ind]

    def targets(self, core: bool = True) -> list:
        return (self.core if core else self.complexes) + self.spheres


def _block_sum(R: RingTable, A: ComplexSpec, B: ComplexSpec, lo: int, length: int):
    """Ranks and entry row of ``A + B`` placed on degrees ``lo..lo+length-1``."""
    def ranks_of(C):
        return [C.ranks[d - C.lo] if C.lo <= d <= C.hi else 0 for d in range(lo, lo + length)]

    ra, rb = ranks_of(A), ranks_of(B)
    ranks = tuple(x + y for x, y in zip(ra, rb))
    row = []
    for t in range(length - 1):
        n = lo + t + 1
        M = np.zeros((ranks[t], ranks[t + 1]), dtype=np.int64)
        if A.lo < n <= A.hi:
            M[: ra[t], : ra[t + 1]] = A.matrix(n)
        if B.lo < n <= B.hi:
            M[ra[t] :, ra[t + 1] :] = B.matrix(n)
        row.extend(M.reshape(-1).tolist())
    return ranks, row


def enumerate_pool(R: RingTable, max_rank: int, span: int, sphere_max: int = 16) -> Pool:
    """All free complexes in degrees ``0..span-1`` (ranks <= max_rank) up to isomorphism.

    Ends of the support carry nonzero terms; inner terms may vanish.
    """
    specs: list[ComplexSpec] = []
    tables = {}
    for lo in range(span):
        for hi in range(lo, span):
            length = hi - lo + 1
            for ranks in itertools.product(range(max_rank + 1), repeat=length):
                if ranks[0] == 0 or ranks[-1] == 0:
                    continue
                rows = _pattern_tuples(R, ranks)
                codes = _codes(R, rows)
                order = np.argsort(codes, kind="stable")
                rows, codes = rows[order], codes[order]
                label = orbit_labels(R, ranks, rows)
                reps = np.unique(label)
                tables[(lo, ranks)] = (rows, codes, label)
                shapes = [(ranks[t], ranks[t + 1]) for t in range(length - 1)]
                for rep in reps:
                    flat = rows[rep].tolist()
                    mats, pos = [], 0
                    for a, b in shapes:
                        mats.append(tuple(flat[pos : pos + a * b]))
                        pos += a * b
                    specs.append(ComplexSpec(lo, ranks, tuple(mats)))
    specs.sort(key=ComplexSpec.sort_key)
    # mark direct sums of two smaller pool complexes as decomposable
    index = {(c.lo, c.ranks, c.code): i for i, c in enumerate(specs)}
    decomposable = [False] * len(specs)
    for i, A in enumerate(specs):
        for B in specs[i:]:
            lo, hi = min(A.lo, B.lo), max(A.hi, B.hi)
            ranks, row = _block_sum(R, A, B, lo, hi - lo + 1)
            if max(ranks) > max_rank:
                continue
            rows, codes, label = tables[(lo, ranks)]
            code = _codes(R, np.array([row], dtype=np.int64).reshape(1, -1))[0] if row else 0
            pos = int(np.searchsorted(codes, code)) if row else 0
            rep = rows[label[pos]]
            key = (lo, ranks, tuple(int(x) for x in rep))
            decomposable[index[key]] = True
    spheres = []
    for ideal in one_sided_ideals(R, "right"):
        size = R.size // len(ideal)
        if len(ideal) in (1, R.size) or size > sphere_max:
            continue
        gens = tuple(ideal_generators(R, ideal, "right"))
        for n in range(span):
            spheres.append(SphereSpec(n, gens, size))
    spheres.sort(key=SphereSpec.sort_key)
    return Pool(R, max_rank, span, specs, [not d for d in decomposable], spheres)


# ---------------------------------------------------------------------------
# random complexes for sampled searches


def random_complex(R: RingTable, rng: np.random.Generator, max_rank: int, span: int) -> ComplexSpec:
    lo = int(rng.integers(0, span))
    hi = int(rng.integers(lo, span))
    length = hi - lo + 1
    ranks = [int(rng.integers(1, max_rank + 1)) for _ in range(length)]
    mats = []
    prev = None
    for t in range(length - 1):
        a, b = ranks[t], ranks[t + 1]
        if prev is None:
            D = rng.integers(0, R.size, size=(a, b))
        else:
            # columns must lie in the right kernel of the previous differential
            cols = decode(np.arange(R.size**a), (R.size,) * a)
            ok = (_matmul(R, prev[None], cols[:, :, None])[..., 0] == 0).all(axis=1)
            good = cols[ok]
            D = good[rng.integers(0, len(good), size=b)].T
        mats.append(tuple(int(x) for x in np.asarray(D).reshape(-1)))
        prev = np.asarray(D).reshape(a, b)
    return ComplexSpec(lo, tuple(ranks), tuple(mats))
