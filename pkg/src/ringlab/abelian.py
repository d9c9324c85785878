"""Exact linear algebra over finite abelian groups.

Groups are written additively as coordinate spaces ``Z/d_1 + ... + Z/d_n``.
Homomorphisms are integer matrices acting on coordinate column vectors.
Linear systems are solved modulo each prime power dividing the exponent
(Smith elimination over the local ring ``Z/p^k``) and recombined with the
Chinese remainder theorem.  A plain integer Smith normal form is kept
alongside for structure computations and as an independent route in tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import reduce
from typing import Callable, Iterable, Sequence

import numpy as np

# ---------------------------------------------------------------------------
# small number theory helpers


def _lcm(values: Iterable[int]) -> int:
    return reduce(lambda a, b: a * b // math.gcd(a, b), values, 1)


def factorize(n: int) -> list[tuple[int, int]]:
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            k = 0
            while n % p == 0:
                n //= p
                k += 1
            out.append((p, k))
        p += 1
    if n > 1:
        out.append((n, 1))
    return out


def prime_power(q: int) -> tuple[int, int] | None:
    """Return ``(p, k)`` with ``q == p**k`` or None."""
    if q < 2:
        return None
    f = factorize(q)
    return f[0] if len(f) == 1 else None


# ---------------------------------------------------------------------------
# integer Smith normal form


def _identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def snf(A: Sequence[Sequence[int]], max_bits: int | None = None):
    """Smith normal form of an integer matrix.

    Returns ``(U, S, V)`` as lists of lists with ``U @ A @ V == S``, ``S``
    diagonal with nonnegative entries ``s_1 | s_2 | ...`` and ``U``, ``V``
    unimodular.  ``max_bits`` bounds the size of intermediate entries;
    exceeding it raises OverflowError.
    """
    S = [[int(x) for x in row] for row in A]
    m = len(S)
    n = len(S[0]) if m else 0
    U = _identity(m)
    V = _identity(n)

    def check(row):
        if max_bits is not None:
            for x in row:
                if abs(x).bit_length() > max_bits:
                    raise OverflowError(f"SNF entry exceeds {max_bits} bits")

    def row_op(dst, src, q):
        S[dst] = [a - q * b for a, b in zip(S[dst], S[src])]
        U[dst] = [a - q * b for a, b in zip(U[dst], U[src])]
        check(S[dst])

    def col_op(dst, src, q):
        for row in S:
            row[dst] -= q * row[src]
        for row in V:
            row[dst] -= q * row[src]
        check([row[dst] for row in S])

    def swap_rows(i, j):
        S[i], S[j] = S[j], S[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in S:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    for t in range(min(m, n)):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if S[i][j] and (best is None or abs(S[i][j]) < abs(S[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            changed = False
            for i in range(t + 1, m):
                if S[i][t]:
                    row_op(i, t, S[i][t] // S[t][t])
                    if S[i][t]:
                        swap_rows(t, i)
                        changed = True
            for j in range(t + 1, n):
                if S[t][j]:
                    col_op(j, t, S[t][j] // S[t][t])
                    if S[t][j]:
                        swap_cols(t, j)
                        changed = True
            if changed:
                continue
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if S[i][j] % S[t][t]:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            # pull a non-divisible row into the pivot row and repeat
            S[t] = [a + b for a, b in zip(S[t], S[bad])]
            U[t] = [a + b for a, b in zip(U[t], U[bad])]
        if S[t][t] < 0:
            S[t] = [-a for a in S[t]]
            U[t] = [-a for a in U[t]]
    return U, S, V


def _det(M: list[list[int]]) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    n = len(M)
    if n == 0:
        return 1
    A = [row[:] for row in M]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            for i in range(k + 1, n):
                if A[i][k]:
                    A[k], A[i] = A[i], A[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def check_snf(A, U, S, V) -> bool:
    """Verify ``U A V == S``, unimodularity and the divisibility chain."""
    m = len(A)
    n = len(A[0]) if m else 0
    UA = [[sum(U[i][k] * A[k][j] for k in range(m)) for j in range(n)] for i in range(m)]
    UAV = [[sum(UA[i][k] * V[k][j] for k in range(n)) for j in range(n)] for i in range(m)]
    if UAV != S:
        return False
    if abs(_det(U)) != 1 or abs(_det(V)) != 1:
        return False
    diag = [S[i][i] for i in range(min(m, n))]
    for i in range(m):
        for j in range(n):
            if i != j and S[i][j]:
                return False
    for a, b in zip(diag, diag[1:]):
        if a == 0 and b != 0:
            return False
        if a and b % a:
            return False
    return True


def invariant_factors(relations: Sequence[Sequence[int]], ngens: int) -> list[int]:
    """Invariant factors (> 1) of ``Z^ngens / <relations>`` (relations as rows).

    Raises ValueError if the quotient is infinite.
    """
    if ngens == 0:
        return []
    if not relations:
        raise ValueError("quotient is infinite")
    cols = [list(r) for r in relations]
    mat = [[cols[j][i] for j in range(len(cols))] for i in range(ngens)]
    _, S, _ = snf(mat)
    diag = [S[i][i] if i < len(S[0]) else 0 for i in range(ngens)]
    if any(d == 0 for d in diag):
        raise ValueError("quotient is infinite")
    return [d for d in diag if d != 1]


# ---------------------------------------------------------------------------
# coordinate groups and homomorphisms


def _as_moduli(moduli: Iterable[int]) -> tuple[int, ...]:
    out = tuple(int(d) for d in moduli)
    if any(d < 1 for d in out):
        raise ValueError(f"moduli must be positive: {out}")
    return out


def encode(vectors: np.ndarray, moduli: Sequence[int]) -> np.ndarray:
    """Mixed-radix codes of coordinate vectors (first coordinate least significant)."""
    vectors = np.asarray(vectors, dtype=np.int64)
    codes = np.zeros(vectors.shape[:-1], dtype=np.int64)
    scale = 1
    for i, d in enumerate(moduli):
        codes += (vectors[..., i] % d) * scale
        scale *= d
    return codes


def decode(codes: np.ndarray, moduli: Sequence[int]) -> np.ndarray:
    codes = np.asarray(codes, dtype=np.int64)
    out = np.zeros(codes.shape + (len(moduli),), dtype=np.int64)
    rest = codes.copy()
    for i, d in enumerate(moduli):
        out[..., i] = rest % d
        rest //= d
    return out


@dataclass
class AbGroup:
    """A finite abelian group with invariant factors ``d_1 | d_2 | ...``.

    When built from a carrier (an addition table), ``gens`` lists carrier
    elements generating the cyclic factors, ``to_vec[x]`` is the coordinate
    vector of carrier element ``x`` and ``from_code`` maps mixed-radix codes
    back to carrier elements.
    """

    factors: tuple[int, ...]
    gens: tuple[int, ...] = ()
    to_vec: np.ndarray | None = field(default=None, repr=False)
    from_code: np.ndarray | None = field(default=None, repr=False)

    @property
    def order(self) -> int:
        return math.prod(self.factors)

    @property
    def rank(self) -> int:
        return len(self.factors)

    def vec(self, x: int) -> np.ndarray:
        return self.to_vec[x]

    def elem(self, v) -> int:
        return int(self.from_code[encode(np.asarray(v), self.factors)])

    def elems(self, vs: np.ndarray) -> np.ndarray:
        return self.from_code[encode(vs, self.factors)]


def _element_orders(add: np.ndarray, zero: int) -> np.ndarray:
    n = len(add)
    ar = np.arange(n)
    cur = ar.copy()
    order = np.ones(n, dtype=np.int64)
    done = cur == zero
    k = 1
    while not done.all():
        cur = add[cur, ar]
        k += 1
        newly = (cur == zero) & ~done
        order[newly] = k
        done |= newly
        if k > n:
            raise ValueError("addition table is not a group")
    return order


def group_structure(add, zero: int = 0, check: bool = True) -> AbGroup:
    """Decompose the finite abelian group given by an addition table.

    Generators are peeled greedily: at each step an element of maximal order
    modulo the span so far is chosen (smallest index on ties) and shifted by
    an element of the span so its order equals its order in the quotient.
    """
    add = np.asarray(add, dtype=np.int64)
    n = len(add)
    if add.shape != (n, n):
        raise ValueError("addition table must be square")
    if check:
        ar = np.arange(n)
        if not (np.sort(add, axis=1) == ar).all():
            raise ValueError("addition table rows are not permutations")
        if not (add[zero] == ar).all():
            raise ValueError(f"element {zero} is not an additive identity")
        if not (add == add.T).all():
            raise ValueError("addition table is not commutative")
        lhs = add[add[:, :, None], ar[None, None, :]] if n <= 128 else None
        if lhs is not None:
            rhs = add[ar[:, None, None], add[None, :, :]]
            if not (lhs == rhs).all():
                raise ValueError("addition table is not associative")
    order = _element_orders(add, zero)
    ar = np.arange(n)
    in_span = np.zeros(n, dtype=bool)
    in_span[zero] = True
    peeled: list[tuple[int, int]] = []
    while not in_span.all():
        # order of every element modulo the current span
        qord = np.zeros(n, dtype=np.int64)
        cur = ar.copy()
        k = 1
        pending = ~in_span[cur]
        qord[~pending] = 1
        while pending.any():
            cur = add[cur, ar]
            k += 1
            hit = pending & in_span[cur]
            qord[hit] = k
            pending &= ~hit
        t = int(qord.max())
        x = int(np.argmax(qord == t))
        span_elems = np.flatnonzero(in_span)
        cands = add[x, span_elems]
        ok = cands[order[cands] == t]
        g = int(ok.min())
        peeled.append((g, t))
        # span <- span + <g>
        new = in_span.copy()
        mult = zero
        for _ in range(t):
            mult = add[mult, g]
            new[add[mult, span_elems]] = True
        in_span = new
    peeled.reverse()
    gens = tuple(g for g, _ in peeled)
    factors = tuple(t for _, t in peeled)
    # coordinates of every element
    size = math.prod(factors)
    if size != n:
        raise ValueError("group decomposition failed")
    elems = np.full(1, zero, dtype=np.int64)
    for g, d in zip(gens, factors):
        multiples = [zero]
        for _ in range(d - 1):
            multiples.append(int(add[multiples[-1], g]))
        multiples = np.array(multiples, dtype=np.int64)
        # new code = old code + c * scale, with this coordinate more significant
        elems = add[elems[None, :], multiples[:, None]].reshape(-1)
    from_code = elems
    to_vec = np.zeros((n, len(factors)), dtype=np.int64)
    to_vec[from_code] = decode(np.arange(size), factors)
    if len(np.unique(from_code)) != n:
        raise ValueError("group decomposition failed")
    return AbGroup(factors=factors, gens=gens, to_vec=to_vec, from_code=from_code)


@dataclass
class AbHom:
    """Homomorphism ``Z/src -> Z/tgt`` given by an integer matrix (tgt x src)."""

    matrix: np.ndarray
    src: tuple[int, ...]
    tgt: tuple[int, ...]

    def __post_init__(self):
        self.src = _as_moduli(self.src)
        self.tgt = _as_moduli(self.tgt)
        self.matrix = np.asarray(self.matrix, dtype=np.int64).reshape(len(self.tgt), len(self.src))
        tg = np.array(self.tgt, dtype=np.int64)
        if len(self.tgt):
            self.matrix = self.matrix % tg[:, None]
            for j, d in enumerate(self.src):
                if ((d * self.matrix[:, j]) % tg).any():
                    raise ValueError(f"column {j} is not well defined modulo {d}")

    def __call__(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=np.int64)
        if not len(self.tgt):
            return np.zeros(0, dtype=np.int64)
        return (self.matrix @ v) % np.array(self.tgt, dtype=np.int64)

    def image(self) -> "Subgroup":
        return Subgroup(self.tgt, self.matrix.T)

    def kernel(self) -> "Subgroup":
        sol = solve_affine(AffineSystem(self, np.zeros(len(self.tgt), dtype=np.int64)))
        return sol.kernel


@dataclass
class AffineSystem:
    """The equation ``hom(x) == target`` in the target group."""

    hom: AbHom
    target: np.ndarray

    def __post_init__(self):
        self.target = np.asarray(self.target, dtype=np.int64).reshape(len(self.hom.tgt))


@dataclass
class AffineSolution:
    particular: np.ndarray
    kernel: "Subgroup"

    @property
    def count(self) -> int:
        return self.kernel.order


# ---------------------------------------------------------------------------
# elimination over Z/p^k


def _valuation_table(p: int, k: int) -> np.ndarray:
    q = p**k
    vt = np.zeros(q, dtype=np.int64)
    vt[0] = k
    for x in range(1, q):
        v = 0
        y = x
        while y % p == 0:
            y //= p
            v += 1
        vt[x] = v
    return vt


_VT_CACHE: dict[tuple[int, int], np.ndarray] = {}


def _local_smith(A: np.ndarray, p: int, k: int, rhs: np.ndarray | None = None):
    """Smith elimination of ``A`` over ``Z/p^k``.

    Returns ``(vals, V, rhs')`` where ``vals[i]`` is the valuation of the
    i-th diagonal pivot, ``V`` the accumulated column transform (``A V`` is
    row-equivalent to the diagonal form) and ``rhs'`` the right-hand sides
    after the same row operations.
    """
    q = p**k
    vt = _VT_CACHE.get((p, k))
    if vt is None:
        vt = _VT_CACHE[(p, k)] = _valuation_table(p, k)
    m, n = A.shape
    nr = 0 if rhs is None else rhs.shape[1]
    W = np.zeros((m, n + nr), dtype=np.int64)
    W[:, :n] = A % q
    if nr:
        W[:, n:] = rhs % q
    V = np.eye(n, dtype=np.int64)
    vals: list[int] = []
    r = 0
    while r < min(m, n):
        sub = vt[W[r:, r:n]]
        flat = int(np.argmin(sub))
        v = int(sub.flat[flat])
        if v >= k:
            break
        i, j = divmod(flat, n - r)
        i += r
        j += r
        if i != r:
            W[[r, i]] = W[[i, r]]
        if j != r:
            W[:, [r, j]] = W[:, [j, r]]
            V[:, [r, j]] = V[:, [j, r]]
        pv = p**v
        u = int(W[r, r]) // pv
        if u != 1:
            W[r] = (W[r] * pow(u, -1, q)) % q
        if r + 1 < m:
            f = W[r + 1 :, r] // pv
            nz = np.flatnonzero(f)
            if len(nz):
                rows = nz + r + 1
                W[rows] = (W[rows] - np.outer(f[nz], W[r])) % q
        if r + 1 < n:
            c = W[r, r + 1 : n] // pv
            nz = np.flatnonzero(c)
            if len(nz):
                cols = nz + r + 1
                V[:, cols] = (V[:, cols] - np.outer(V[:, r], c[nz])) % q
                W[r, cols] = 0
        vals.append(v)
        r += 1
    return vals, V, (W[:, n:] if nr else None)


def _solve_local(A: np.ndarray, t: np.ndarray | None, p: int, k: int):
    """Solve ``A x = t`` over ``Z/p^k``; returns (particular or None, kernel gens)."""
    q = p**k
    m, n = A.shape
    rhs = None if t is None else t.reshape(m, 1)
    vals, V, tt = _local_smith(A, p, k, rhs)
    rank = len(vals)
    gens = []
    for i, v in enumerate(vals):
        if v > 0:
            gens.append((V[:, i] * p ** (k - v)) % q)
    for i in range(rank, n):
        gens.append(V[:, i] % q)
    kernel = np.array(gens, dtype=np.int64).reshape(len(gens), n)
    if t is None:
        return None, kernel
    tt = tt[:, 0] % q
    if (tt[rank:] % q).any():
        return False, kernel
    w = np.zeros(n, dtype=np.int64)
    for i, v in enumerate(vals):
        pv = p**v
        if tt[i] % pv:
            return False, kernel
        w[i] = tt[i] // pv
    x = (V @ w) % q
    return x, kernel


def _crt_lift(N: int, q: int) -> int:
    """Multiplier ``e`` with ``e = 1 mod q`` and ``e = 0 mod N/q``."""
    rest = N // q
    if rest == 1:
        return 1
    return rest * pow(rest, -1, q) % N


def solve_affine(system: AffineSystem) -> AffineSolution | None:
    """Solve ``L(x) = t``; None when infeasible.

    The kernel is returned as a generating set of a subgroup of the source,
    so the solution set has exactly ``kernel.order`` elements.
    """
    hom = system.hom
    src, tgt = hom.src, hom.tgt
    n, m = len(src), len(tgt)
    if n == 0:
        ok = not (system.target % np.array(tgt, dtype=np.int64)).any() if m else True
        return AffineSolution(np.zeros(0, dtype=np.int64), Subgroup(src, [])) if ok else None
    N = _lcm(src + tgt)
    if N == 1:
        return AffineSolution(np.zeros(n, dtype=np.int64), Subgroup(src, []))
    # unknowns: x (source) then y (target lift); equation M x + E y = t
    A = np.zeros((m, n + m), dtype=np.int64)
    A[:, :n] = hom.matrix
    for j, e in enumerate(tgt):
        A[j, n + j] = e
    t = system.target
    x = np.zeros(n, dtype=np.int64)
    kernel_gens = []
    for p, k in factorize(N):
        q = p**k
        part, ker = _solve_local(A % q, t % q, p, k)
        if part is False:
            return None
        lift = _crt_lift(N, q)
        x = (x + part[:n] * lift) % N
        for g in ker:
            kernel_gens.append((g[:n] * lift) % N)
    sd = np.array(src, dtype=np.int64)
    return AffineSolution(x % sd, Subgroup(src, kernel_gens))


def kernel(matrix, src: Sequence[int], tgt: Sequence[int]) -> "Subgroup":
    return AbHom(matrix, tuple(src), tuple(tgt)).kernel()


# ---------------------------------------------------------------------------
# subgroups


class Subgroup:
    """Subgroup of ``Z/moduli`` generated by the rows of ``gens``."""

    def __init__(self, moduli: Sequence[int], gens):
        self.moduli = _as_moduli(moduli)
        n = len(self.moduli)
        if n == 0 or not len(gens):
            g = np.zeros((0, n), dtype=np.int64)
        else:
            g = np.asarray(gens, dtype=np.int64).reshape(-1, n)
        if n:
            g = g % np.array(self.moduli, dtype=np.int64)
            g = g[g.any(axis=1)]
        self.gens = g
        self._order: int | None = None

    def __repr__(self):
        return f"Subgroup(moduli={self.moduli}, ngens={len(self.gens)}, order={self.order})"

    @property
    def ambient_order(self) -> int:
        return math.prod(self.moduli)

    def _cokernel_order(self, extra=None) -> int:
        """Order of ``ambient / (self + extra)``."""
        n = len(self.moduli)
        if n == 0:
            return 1
        gens = self.gens if extra is None else np.vstack([self.gens, extra])
        N = _lcm(self.moduli)
        if N == 1:
            return 1
        C = np.zeros((n, len(gens) + n), dtype=np.int64)
        C[:, : len(gens)] = gens.T
        for i, d in enumerate(self.moduli):
            C[i, len(gens) + i] = d
        total = 1
        for p, k in factorize(N):
            q = p**k
            vals, _, _ = _local_smith(C % q, p, k)
            total *= p ** ((n - len(vals)) * k + sum(vals))
        return total

    @property
    def order(self) -> int:
        if self._order is None:
            self._order = self.ambient_order // self._cokernel_order()
        return self._order

    def contains(self, v) -> bool:
        return self._cokernel_order(np.asarray(v, dtype=np.int64).reshape(1, -1)) == self._cokernel_order()

    def contains_subgroup(self, other: "Subgroup") -> bool:
        if not len(other.gens):
            return True
        return self._cokernel_order(other.gens) == self._cokernel_order()

    def coefficients(self, v) -> np.ndarray | None:
        """Integer coefficients ``a`` with ``sum a_i gens_i == v``, or None."""
        r = len(self.gens)
        hom = AbHom(self.gens.T if r else np.zeros((len(self.moduli), 0)), (_lcm(self.moduli),) * r, self.moduli)
        sol = solve_affine(AffineSystem(hom, v))
        return None if sol is None else sol.particular

    def elements(self, limit: int = 2**16) -> np.ndarray:
        """All elements as rows, sorted by mixed-radix code."""
        if self.order > limit:
            raise ValueError(f"subgroup of order {self.order} exceeds enumeration limit {limit}")
        n = len(self.moduli)
        md = np.array(self.moduli, dtype=np.int64)
        codes = np.zeros(1, dtype=np.int64)
        vecs = np.zeros((1, n), dtype=np.int64)
        for g in self.gens:
            gord = _lcm(d // math.gcd(d, int(x)) for d, x in zip(self.moduli, g))
            mults = (np.arange(gord)[:, None] * g[None, :]) % md
            vecs = ((vecs[None, :, :] + mults[:, None, :]) % md).reshape(-1, n)
            codes, idx = np.unique(encode(vecs, self.moduli), return_index=True)
            vecs = vecs[idx]
        order = np.argsort(encode(vecs, self.moduli))
        return vecs[order]

    def structure(self) -> list[int]:
        """Invariant factors of this subgroup."""
        return quotient_structure(self, Subgroup(self.moduli, []))


def quotient_structure(big: Subgroup, small: Subgroup) -> list[int]:
    """Invariant factors (> 1) of ``big / small``; ``small`` must lie in ``big``."""
    r = len(big.gens)
    if r == 0:
        return []
    N = _lcm(big.moduli)
    s = len(small.gens)
    M = np.zeros((len(big.moduli), r + s), dtype=np.int64)
    M[:, :r] = big.gens.T
    if s:
        M[:, r:] = -small.gens.T
    ker = AbHom(M, (N,) * (r + s), big.moduli).kernel()
    rels = [list(map(int, g[:r])) for g in ker.gens]
    rels += [[N * int(i == j) for j in range(r)] for i in range(r)]
    return invariant_factors(rels, r)


def endo_matrix(func: Callable[[int], int], src: AbGroup, tgt: AbGroup | None = None) -> AbHom:
    """Matrix of an additive map between carriers, verified on every element."""
    tgt = src if tgt is None else tgt
    cols = [tgt.vec(func(int(g))) for g in src.gens]
    mat = np.array(cols, dtype=np.int64).T.reshape(len(tgt.factors), len(src.factors))
    hom = AbHom(mat, src.factors, tgt.factors)
    n = src.order
    images = np.array([tgt.vec(func(x)) for x in range(n)], dtype=np.int64).reshape(n, len(tgt.factors))
    predicted = (src.to_vec @ hom.matrix.T) % np.array(tgt.factors, dtype=np.int64) if tgt.factors else images
    if not (predicted == images).all():
        bad = int(np.flatnonzero((predicted != images).any(axis=1))[0])
        raise ValueError(f"map is not additive (disagrees at carrier element {bad})")
    return hom


def subgroup_order(sub: Subgroup) -> int:
    return sub.order


class BlockSystem:
    """Assemble a linear system from named unknown blocks and equation blocks.

    Unknown blocks and equation blocks are coordinate groups; coefficients are
    integer matrices added block by block.
    """

    def __init__(self):
        self._vars: dict = {}
        self._var_moduli: list[int] = []
        self._rows: list[tuple[int, tuple[int, ...]]] = []
        self._row_moduli: list[int] = []
        self._entries: list[tuple[int, int, np.ndarray]] = []
        self._rhs: list[tuple[int, np.ndarray]] = []

    def var(self, key, moduli: Sequence[int]) -> int:
        if key in self._vars:
            return self._vars[key][0]
        off = len(self._var_moduli)
        self._vars[key] = (off, tuple(moduli))
        self._var_moduli.extend(moduli)
        return off

    def has_var(self, key) -> bool:
        return key in self._vars

    def var_slice(self, key) -> slice:
        off, md = self._vars[key]
        return slice(off, off + len(md))

    @property
    def nvars(self) -> int:
        return len(self._var_moduli)

    @property
    def var_moduli(self) -> tuple[int, ...]:
        return tuple(self._var_moduli)

    def equation(self, moduli: Sequence[int]) -> int:
        off = len(self._row_moduli)
        self._rows.append((off, tuple(moduli)))
        self._row_moduli.extend(moduli)
        return len(self._rows) - 1

    def coef(self, eq: int, key, matrix) -> None:
        roff, rmd = self._rows[eq]
        coff, cmd = self._vars[key]
        matrix = np.asarray(matrix, dtype=np.int64).reshape(len(rmd), len(cmd))
        self._entries.append((roff, coff, matrix))

    def rhs(self, eq: int, vec) -> None:
        roff, rmd = self._rows[eq]
        self._rhs.append((roff, np.asarray(vec, dtype=np.int64).reshape(len(rmd))))

    def matrix(self) -> np.ndarray:
        M = np.zeros((len(self._row_moduli), len(self._var_moduli)), dtype=np.int64)
        for roff, coff, mat in self._entries:
            M[roff : roff + mat.shape[0], coff : coff + mat.shape[1]] += mat
        return M

    def target(self) -> np.ndarray:
        t = np.zeros(len(self._row_moduli), dtype=np.int64)
        for roff, vec in self._rhs:
            t[roff : roff + len(vec)] += vec
        return t

    def hom(self) -> AbHom:
        return AbHom(self.matrix(), self.var_moduli, tuple(self._row_moduli))

    def system(self) -> AffineSystem:
        return AffineSystem(self.hom(), self.target())

    def solve(self) -> AffineSolution | None:
        return solve_affine(self.system())

    def kernel(self) -> Subgroup:
        if not self._row_moduli:
            eye = np.eye(self.nvars, dtype=np.int64)
            return Subgroup(self.var_moduli, eye)
        return self.hom().kernel()
