"""Ring-level deciders: regularity, annihilators, radical, ideals and the
matrix flatness conditions.

All scans are exhaustive over the element tables and report the
lexicographically first witness in element-index order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import config
from .abelian import decode, encode
from .config import BudgetExceeded
from .rings import RingTable


@dataclass
class Verdict:
    holds: bool
    witness: object = None
    detail: dict = field(default_factory=dict)

    def __bool__(self):
        return self.holds


# ---------------------------------------------------------------------------
# regularity and annihilators


def is_vnr(R: RingTable) -> Verdict:
    """Decide von Neumann regularity: every x has y with x*y*x == x.

    On success the witness maps each x to the smallest such y; on failure it
    is the first non-regular x.
    """
    ar = np.arange(R.size)
    xyx = R.mul[R.mul, ar[:, None]]
    ok = xyx == ar[:, None]
    regular = ok.any(axis=1)
    if regular.all():
        return Verdict(True, {int(x): int(np.argmax(ok[x])) for x in ar})
    return Verdict(False, int(np.argmax(~regular)))


def annihilators(R: RingTable, side: str, S) -> np.ndarray:
    """Right annihilator ``{r : s*r = 0}`` or left annihilator ``{r : r*s = 0}``."""
    S = np.atleast_1d(np.asarray(S, dtype=np.int64))
    if S.size == 0:
        raise ValueError("annihilator of an empty set")
    if side in ("right", "r"):
        mask = (R.mul[S, :] == 0).all(axis=0)
    elif side in ("left", "l"):
        mask = (R.mul[:, S] == 0).all(axis=1)
    else:
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    return np.flatnonzero(mask)


def principal_ideal(R: RingTable, x: int, side: str) -> np.ndarray:
    """``xR`` (right) or ``Rx`` (left)."""
    row = R.mul[x, :] if side in ("right", "r") else R.mul[:, x]
    return np.unique(row)


def additive_closure(R: RingTable, elems) -> np.ndarray:
    cur = np.zeros(R.size, dtype=bool)
    cur[0] = True
    cur[np.asarray(elems, dtype=np.int64)] = True
    while True:
        members = np.flatnonzero(cur)
        new = np.zeros(R.size, dtype=bool)
        new[R.add[np.ix_(members, members)].ravel()] = True
        if (new == cur).all():
            return members
        cur = new | cur


def two_sided_ideal(R: RingTable, x: int) -> np.ndarray:
    rxs = R.mul[R.mul[:, x][:, None], np.arange(R.size)[None, :]]
    return additive_closure(R, np.unique(rxs))


# ---------------------------------------------------------------------------
# radical and the structural predicates


@dataclass
class PredicateReport:
    jacobson_radical: list[int]
    is_semisimple: bool
    is_local: bool
    is_reduced: bool
    is_simple: bool
    witnesses: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "jacobson_radical": self.jacobson_radical,
            "is_semisimple": self.is_semisimple,
            "is_local": self.is_local,
            "is_reduced": self.is_reduced,
            "is_simple": self.is_simple,
            "witnesses": self.witnesses,
        }


def jacobson_radical(R: RingTable) -> np.ndarray:
    one_minus = R.sub(R.one, R.mul)
    return np.flatnonzero(R.units[one_minus].all(axis=1))


def nilpotents(R: RingTable) -> np.ndarray:
    ar = np.arange(R.size)
    cur = ar.copy()
    nil = cur == 0
    for _ in range(R.size):
        cur = R.mul[cur, ar]
        nil |= cur == 0
    return np.flatnonzero(nil)


def ring_predicates(R: RingTable) -> PredicateReport:
    rad = jacobson_radical(R)
    w: dict = {}
    if len(rad) > 1:
        w["radical_element"] = int(rad[1])
    nonunits = np.flatnonzero(~R.units)
    sums = R.add[np.ix_(nonunits, nonunits)]
    bad = np.argwhere(R.units[sums])
    is_local = len(bad) == 0
    if not is_local:
        a, b = nonunits[bad[0][0]], nonunits[bad[0][1]]
        w["nonunit_sum"] = [int(a), int(b), int(R.add[a, b])]
    nil = nilpotents(R)
    is_reduced = len(nil) == 1
    if not is_reduced:
        w["nilpotent"] = int(nil[1])
    is_simple = True
    for x in range(1, R.size):
        ideal = two_sided_ideal(R, x)
        if len(ideal) < R.size:
            is_simple = False
            w["proper_ideal"] = {"generator": x, "elements": [int(v) for v in ideal]}
            break
    return PredicateReport(
        jacobson_radical=[int(v) for v in rad],
        is_semisimple=len(rad) == 1,
        is_local=is_local,
        is_reduced=is_reduced,
        is_simple=is_simple,
        witnesses=w,
    )


# ---------------------------------------------------------------------------
# one-sided ideals


def one_sided_ideals(R: RingTable, side: str = "right", limit: int = 4096) -> list[np.ndarray]:
    """All right (or left) ideals, sorted by (size, elements).

    Every ideal of a finite ring is a finite sum of principal ones, so the
    closure of the principal ideals under pairwise sums is complete.
    """
    seen: dict[bytes, np.ndarray] = {}

    def add_ideal(elems):
        mask = np.zeros(R.size, dtype=bool)
        mask[elems] = True
        key = np.packbits(mask).tobytes()
        if key not in seen:
            seen[key] = np.flatnonzero(mask)
            return seen[key]
        return None

    for x in range(R.size):
        add_ideal(principal_ideal(R, x, side))
    frontier = list(seen.values())
    while frontier:
        nxt = []
        current = list(seen.values())
        for I in frontier:
            for J in current:
                s = np.unique(R.add[np.ix_(I, J)])
                new = add_ideal(s)
                if new is not None:
                    nxt.append(new)
                    if len(seen) > limit:
                        raise BudgetExceeded(f"more than {limit} ideals")
        frontier = nxt
    return sorted(seen.values(), key=lambda I: (len(I), tuple(I)))


def ideal_generators(R: RingTable, ideal, side: str = "right") -> list[int]:
    """Greedy generating set (smallest indices first) of a one-sided ideal."""
    target = set(int(v) for v in ideal)
    gens: list[int] = []
    span = {0}
    for x in sorted(target):
        if x in span:
            continue
        gens.append(x)
        pieces = np.concatenate([principal_ideal(R, g, side) for g in gens])
        span = set(int(v) for v in additive_closure(R, pieces))
        if span == target:
            break
    return gens


# ---------------------------------------------------------------------------
# flatness conditions


def cyclic_flat_test(R: RingTable) -> Verdict:
    """Every principal right ideal is flat iff for all ``a*b == 0`` some x has
    ``a*x == 0`` and ``x*b == b``.  Witness: first failing ``(a, b)``."""
    for a in range(R.size):
        ann = np.flatnonzero(R.mul[a] == 0)
        ok = (R.mul[np.ix_(ann, ann)] == ann[None, :]).any(axis=0)
        if not ok.all():
            return Verdict(False, (a, int(ann[np.argmax(~ok)])))
    return Verdict(True)


def _matrix_entries(R: RingTable, rows: int, cols: int) -> np.ndarray:
    """All rows x cols matrices, lexicographic in row-major entries."""
    t = rows * cols
    codes = np.arange(R.size**t)
    ent = decode(codes, (R.size,) * t)[:, ::-1]  # first entry most significant
    return ent.reshape(-1, rows, cols)


def _code_of(R: RingTable, entries: np.ndarray) -> np.ndarray:
    flat = entries.reshape(entries.shape[:-2] + (-1,))
    t = flat.shape[-1]
    w = R.size ** np.arange(t - 1, -1, -1)
    return flat @ w


def matmul(R: RingTable, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Product of matrices of element indices (broadcasting over leading axes)."""
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    p, q = A.shape[-2:]
    q2, s = B.shape[-2:]
    if q != q2:
        raise ValueError("shape mismatch")
    lead = np.broadcast_shapes(A.shape[:-2], B.shape[:-2])
    out = np.zeros(lead + (p, s), dtype=np.int64)
    for r in range(p):
        for c in range(s):
            acc = np.zeros(lead, dtype=np.int64)
            for l in range(q):
                acc = R.add[acc, R.mul[A[..., r, l], B[..., l, c]]]
            out[..., r, c] = acc
    return out


def _product_codes(R: RingTable, EA: np.ndarray, EB: np.ndarray, chunk: int = 1 << 21) -> np.ndarray:
    """Codes of all products ``EA[i] @ EB[j]`` as an (nA, nB) array."""
    nA, nB = len(EA), len(EB)
    out = np.empty((nA, nB), dtype=np.int64)
    step = max(1, chunk // max(nB, 1))
    for i in range(0, nA, step):
        prod = matmul(R, EA[i : i + step, None], EB[None, :])
        out[i : i + step] = _code_of(R, prod)
    return out


def check_matrix_pair(R: RingTable, A, B) -> bool:
    """True when ``A B == 0`` implies some X with ``A X == 0`` and ``X B == B``."""
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    m = A.shape[0]
    if matmul(R, A, B).any():
        return True
    X = _matrix_entries(R, m, m)
    ax = matmul(R, A[None], X)
    xb = matmul(R, X, B[None])
    ok = (ax == 0).all(axis=(1, 2)) & (xb == B[None]).all(axis=(1, 2))
    return bool(ok.any())


def matrix_flat_test(
    R: RingTable,
    m: int,
    mode: str = "auto",
    samples: int = 2000,
    seed: int = 0,
    budget: int = config.EXHAUSTIVE_PAIR_BUDGET,
) -> Verdict:
    """For all m x m matrices with ``A B == 0`` find X with ``A X == 0``,
    ``X B == B``.

    Exhaustive when ``|R|^(2 m^2)`` is within budget, otherwise (or with
    ``mode="sampled"``) seeded sampling of A uniformly and B uniformly from
    the right annihilator of A; sampled verdicts are qualified in ``detail``.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    space = R.size ** (2 * m * m)
    if mode == "auto":
        mode = "exhaustive" if space <= budget else "sampled"
    if mode == "exhaustive":
        if space > budget:
            raise BudgetExceeded(f"{space} matrix pairs exceed budget {budget}")
        E = _matrix_entries(R, m, m)
        T = _product_codes(R, E, E)
        for a in range(len(E)):
            ann = np.flatnonzero(T[a] == 0)
            ok = (T[np.ix_(ann, ann)] == ann[None, :]).any(axis=0)
            if not ok.all():
                b = int(ann[np.argmax(~ok)])
                return Verdict(False, (E[a].tolist(), E[b].tolist()), {"mode": "exhaustive", "pairs": space})
        return Verdict(True, None, {"mode": "exhaustive", "pairs": space})
    if mode != "sampled":
        raise ValueError(f"unknown mode {mode!r}")
    rng = np.random.default_rng(seed)
    t = m * m
    allX = _matrix_entries(R, m, m) if R.size**t <= 1 << 20 else None
    if allX is None:
        raise BudgetExceeded("matrix space too large even for sampling")
    for _ in range(samples):
        A = rng.integers(0, R.size, size=(m, m))
        ax = matmul(R, A[None], allX)
        ann = allX[(ax == 0).all(axis=(1, 2))]
        B = ann[rng.integers(0, len(ann))]
        xb = matmul(R, ann, B[None])
        if not (xb == B[None]).all(axis=(1, 2)).any():
            return Verdict(False, (A.tolist(), B.tolist()), {"mode": "sampled", "samples": samples, "seed": seed})
    return Verdict(
        True,
        None,
        {"mode": "sampled", "samples": samples, "seed": seed, "qualifier": f"no counterexample found in {samples} samples"},
    )


def idempotent_matrices(R: RingTable, q: int) -> np.ndarray:
    E = _matrix_entries(R, q, q)
    sq = matmul(R, E, E)
    return E[(sq == E).all(axis=(1, 2))]


def _kills_columns(R: RingTable, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """``out[a, b]`` is True when ``A[a] @ B[b] == 0``, decided column by column."""
    q, s = B.shape[1], B.shape[2]
    vecs = decode(np.arange(R.size**q), (R.size,) * q)
    kills = (matmul(R, A, vecs.T[None]) == 0).all(axis=1)  # (nA, R^q)
    cols = encode(np.transpose(B, (0, 2, 1)), (R.size,) * q)  # (nB, s)
    out = np.ones((len(A), len(B)), dtype=bool)
    for j in range(s):
        out &= kills[:, cols[:, j]]
    return out


def weakly_semihereditary_test(R: RingTable, bound: int, budget: int = 4 * 10**7) -> Verdict:
    """For all p x q, q x s matrices (p, q, s <= bound) with ``A B == 0`` find
    an idempotent q x q matrix E with ``A E == A`` and ``E B == 0``."""
    if bound < 1:
        raise ValueError("bound must be >= 1")
    n = R.size
    for q in range(1, bound + 1):
        idem = idempotent_matrices(R, q)
        for p in range(1, bound + 1):
            for s in range(1, bound + 1):
                nA, nB = n ** (p * q), n ** (q * s)
                if nA * nB > budget:
                    raise BudgetExceeded(f"{nA * nB} pairs at shape ({p},{q},{s}) exceed budget {budget}")
                EA = _matrix_entries(R, p, q)
                EB = _matrix_entries(R, q, s)
                # S[a, e]: A E == A ; T[e, b]: E B == 0 ; zero[a, b]: A B == 0
                S = (_code_of(R, matmul(R, EA[:, None], idem[None, :])) == _code_of(R, EA)[:, None])
                T = _kills_columns(R, idem, EB)
                good = (S.astype(np.float32) @ T.astype(np.float32)) > 0  # BLAS; counts stay exact
                zero = _kills_columns(R, EA, EB)
                bad = np.argwhere(zero & ~good)
                if len(bad):
                    a, b = bad[0]
                    return Verdict(False, (EA[a].tolist(), EB[b].tolist()), {"shape": (p, q, s)})
    return Verdict(True, None, {"bound": bound})
