"""Brute-force reference computations used to derive the frozen test values.

Nothing here calls the package's solvers: only ring tables are shared, and
everything else is plain enumeration over Python tuples.
"""

from __future__ import annotations

import itertools

import numpy as np


# ---------------------------------------------------------------------------
# independent ring arithmetic


def zmod_tables(n):
    add = [[(a + b) % n for b in range(n)] for a in range(n)]
    mul = [[(a * b) % n for b in range(n)] for a in range(n)]
    return add, mul


def mat2_gf2_products():
    """All 2x2 matrices over GF(2) with their products, as tuples (a, b, c, d)."""
    mats = list(itertools.product(range(2), repeat=4))

    def mm(x, y):
        a, b, c, d = x
        e, f, g, h = y
        return ((a * e + b * g) % 2, (a * f + b * h) % 2, (c * e + d * g) % 2, (c * f + d * h) % 2)

    return mats, mm


def is_regular_brute(add, mul):
    n = len(add)
    return all(any(mul[mul[x][y]][x] == x for y in range(n)) for x in range(n))


def radical_brute(add, mul, one=1):
    n = len(add)
    neg = [next(b for b in range(n) if add[a][b] == 0) for a in range(n)]
    units = {u for u in range(n) if any(mul[u][v] == one and mul[v][u] == one for v in range(n))}
    return sorted(x for x in range(n) if all(add[one][neg[mul[x][y]]] in units for y in range(n)))


# ---------------------------------------------------------------------------
# matrices over a table ring (numpy arrays only carry shapes; products are explicit loops)


def matvec(R, A, x):
    """A . x for a matrix of ring elements and a column tuple."""
    A = np.asarray(A, dtype=np.int64).reshape(len(A), len(x)) if len(x) else np.zeros((len(A), 0), dtype=np.int64)
    out = []
    for row in A:
        acc = 0
        for a, v in zip(row, x):
            acc = int(R.add[acc, R.mul[a, v]])
        out.append(acc)
    return tuple(out)


def matmul(R, A, B):
    r, k = A.shape
    k2, c = B.shape
    assert k == k2
    out = np.zeros((r, c), dtype=np.int64)
    for i in range(r):
        for j in range(c):
            acc = 0
            for t in range(k):
                acc = int(R.add[acc, R.mul[A[i, t], B[t, j]]])
            out[i, j] = acc
    return out


def matadd(R, A, B):
    return R.add[A, B]


def all_matrices(R, r, c):
    for entries in itertools.product(range(R.size), repeat=r * c):
        yield np.array(entries, dtype=np.int64).reshape(r, c)


# ---------------------------------------------------------------------------
# free complexes given as {degree: rank} and {degree: D_n (r_{n-1} x r_n)}


def _d(ranks, mats, n):
    a, b = ranks.get(n - 1, 0), ranks.get(n, 0)
    if n in mats and a and b:
        return np.asarray(mats[n], dtype=np.int64).reshape(a, b)
    return np.zeros((a, b), dtype=np.int64)


def vectors(R, k):
    return list(itertools.product(range(R.size), repeat=k))


def cycles(R, ranks, mats, n):
    D = _d(ranks, mats, n)
    return [x for x in vectors(R, ranks.get(n, 0)) if all(v == 0 for v in matvec(R, D, x))]


def boundaries(R, ranks, mats, n):
    D = _d(ranks, mats, n + 1)
    return {matvec(R, D, x) for x in vectors(R, ranks.get(n + 1, 0))}


def homology_orders(R, ranks, mats):
    return {n: len(cycles(R, ranks, mats, n)) // len(boundaries(R, ranks, mats, n)) for n in ranks}


def chain_map_census(R, P, Q):
    """Counts of (chain maps, H-zero maps, null-homotopic maps) between free complexes.

    ``P`` and ``Q`` are (ranks, mats) pairs; a map is a tuple of per-degree matrices.
    """
    (rp, mp), (rq, mq) = P, Q
    degs = sorted(n for n in rp if rq.get(n, 0) and rp[n])
    span = set(rp) | set(rq)
    span |= {n + 1 for n in span}

    def F_at(F, n):
        return F[n] if n in F else np.zeros((rq.get(n, 0), rp.get(n, 0)), dtype=np.int64)

    chain = hzero = 0
    for Fs in itertools.product(*[list(all_matrices(R, rq[n], rp[n])) for n in degs]):
        F = dict(zip(degs, Fs))
        if any(not np.array_equal(matmul(R, _d(rq, mq, n), F_at(F, n)), matmul(R, F_at(F, n - 1), _d(rp, mp, n)))
               for n in span):
            continue
        chain += 1
        if all(matvec(R, F[n], z) in boundaries(R, rq, mq, n) for n in degs for z in cycles(R, rp, mp, n)):
            hzero += 1
    null = set()
    hdegs = sorted(n for n in rp if rq.get(n + 1, 0) and rp[n])
    for Ds in itertools.product(*[list(all_matrices(R, rq[n + 1], rp[n])) for n in hdegs]):
        D = dict(zip(hdegs, Ds))

        def D_at(n):
            return D[n] if n in D else np.zeros((rq.get(n + 1, 0), rp.get(n, 0)), dtype=np.int64)

        key = tuple(tuple(matadd(R, matmul(R, _d(rq, mq, n + 1), D_at(n)), matmul(R, D_at(n - 1), _d(rp, mp, n)))
                          .reshape(-1).tolist()) for n in degs)
        null.add(key)
    return chain, hzero, len(null)


# ---------------------------------------------------------------------------
# modules over zmod(n) as abelian groups Z/m with x*r = x*r mod m


def hom_count_cyclic(n, a, b):
    """|Hom_{Z/n}(Z/a, Z/b)| by scanning images of 1."""
    return sum(1 for y in range(b) if (a * y) % b == 0)


def ext_count_cyclic(n, a, b):
    """|Ext^1_{Z/n}(Z/a, Z/b)| for a | n via Hom(aR, M) modulo restrictions of Hom(R, M).

    Homs aR -> Z/b are counted as all functions on aR that respect addition and
    the ring action; restrictions come from x -> x*y for y in Z/b.
    """
    I = sorted({(a * r) % n for r in range(n)})
    homs = set()
    for images in itertools.product(range(b), repeat=len(I)):
        f = dict(zip(I, images))
        if all(f[(x + y) % n] == (f[x] + f[y]) % b for x in I for y in I) and \
                all(f[(x * r) % n] == (f[x] * r) % b for x in I for r in range(n)):
            homs.add(tuple(images))
    # b | n, so x -> x*y is a well-defined map R -> Z/b for every y
    restricted = {tuple((x * y) % b for x in I) for y in range(b)}
    return len(homs) // len(restricted)


def tor_count_cyclic(n, a, b):
    """|Tor_1^{Z/n}(Z/a, Z/b)| for b*c = n via the periodic resolution R -c-> R -b-> R.

    Tensoring with M = Z/a gives M -c-> M -b-> M; count the middle homology.
    """
    c = n // b
    ker = sum(1 for x in range(a) if (x * b) % a == 0)
    im = len({(x * c) % a for x in range(a)})
    return ker // im



# ---------------------------------------------------------------------------
# isomorphism classes of complexes over a field


def field_complex_classes(max_rank, span):
    """Complexes of vector spaces in degrees 0..span-1 with nonzero ends, up to isomorphism.

    Such a complex is determined by its dimensions and the ranks of its
    differentials, subject to r_in + r_out <= dim at every term.
    """
    count = 0
    for lo in range(span):
        for hi in range(lo, span):
            length = hi - lo + 1
            for dims in itertools.product(range(max_rank + 1), repeat=length):
                if dims[0] == 0 or dims[-1] == 0:
                    continue
                for rks in itertools.product(range(max_rank + 1), repeat=length - 1):
                    ok = all(r <= min(dims[t], dims[t + 1]) for t, r in enumerate(rks))
                    for i in range(length):
                        r_in = rks[i - 1] if i > 0 else 0
                        r_out = rks[i] if i < length - 1 else 0
                        ok = ok and r_in + r_out <= dims[i]
                    count += ok
    return count


def rank_one_classes(add, mul, one, span):
    """Complexes of R-rank one in degrees 0..span-1 (inner terms nonzero) up to isomorphism.

    The differentials are scalars d_n and units act by d_n -> u^-1 d_n v.
    Orbits are counted by brute force over all unit tuples.
    """
    n = len(add)
    units = [u for u in range(n) if any(mul[u][v] == one and mul[v][u] == one for v in range(n))]
    inv = {u: next(v for v in range(n) if mul[u][v] == one) for u in units}
    total = 0
    for length in range(1, span + 1):
        tuples = [t for t in itertools.product(range(n), repeat=length - 1)
                  if all(mul[t[i]][t[i + 1]] == 0 for i in range(len(t) - 1))]
        seen = set()
        for t in tuples:
            if t in seen:
                continue
            total += span - length + 1
            for us in itertools.product(units, repeat=length):
                seen.add(tuple(mul[mul[inv[us[i]]][t[i]]][us[i + 1]] for i in range(len(t))))
    return total


# ---------------------------------------------------------------------------
# Ext^1 by counting extensions


def ext_count_extensions(n, a, b):
    """|Ext^1_{Z/n}(Z/a, Z/b)| as the number of extensions 0 -> Z/b -> E -> Z/a -> 0 up to equivalence.

    E is the set N x M with (x, m) + (y, m') = (x + y + f(m, m'), m + m') and
    (x, m) r = (x r + g(m, r), m r).  Every (f, g) making E a module is kept,
    and two are equivalent when (x, m) -> (x + h(m), m) carries one to the other.
    """
    A, B = range(a), range(b)
    elems = [(x, m) for m in A for x in B]

    def tables(f, g):
        add = {(p, q): ((p[0] + q[0] + f[p[1]][q[1]]) % b, (p[1] + q[1]) % a) for p in elems for q in elems}
        act = {(p, r): ((p[0] * r + g[p[1]][r]) % b, (p[1] * r) % a) for p in elems for r in range(n)}
        return add, act

    def is_module(add, act):
        zero = (0, 0)
        for p in elems:
            if add[zero, p] != p or act[p, 1] != p:
                return False
            if not any(add[p, q] == zero for q in elems):
                return False
            for q in elems:
                if add[p, q] != add[q, p]:
                    return False
                for s in elems:
                    if add[add[p, q], s] != add[p, add[q, s]]:
                        return False
                for r in range(n):
                    if act[add[p, q], r] != add[act[p, r], act[q, r]]:
                        return False
            for r in range(n):
                for t in range(n):
                    if act[p, (r + t) % n] != add[act[p, r], act[p, t]]:
                        return False
                    if act[p, (r * t) % n] != act[act[p, r], t]:
                        return False
        return True

    def key(f, g):
        return tuple(v for row in f for v in row) + tuple(v for row in g for v in row)

    valid = set()
    for fv in itertools.product(B, repeat=a * a):
        f = [fv[i * a:(i + 1) * a] for i in range(a)]
        if any(f[0][m] or f[m][0] for m in A):
            continue
        for gv in itertools.product(B, repeat=a * n):
            g = [gv[i * n:(i + 1) * n] for i in range(a)]
            if is_module(*tables(f, g)):
                valid.add(key(f, g))
    classes = set()
    for k in valid:
        f = [k[i * a:(i + 1) * a] for i in range(a)]
        g = [k[a * a + i * n: a * a + (i + 1) * n] for i in range(a)]
        orbit = []
        for h in itertools.product(B, repeat=a):
            f2 = [tuple((f[m][m2] + h[m] + h[m2] - h[(m + m2) % a]) % b for m2 in A) for m in A]
            g2 = [tuple((g[m][r] + h[m] * r - h[(m * r) % a]) % b for r in range(n)) for m in A]
            orbit.append(key(f2, g2))
        classes.add(min(orbit))
    return len(classes)
