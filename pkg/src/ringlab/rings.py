"""Finite rings as explicit addition and multiplication tables.

Elements are dense indices ``0..size-1`` with ``0`` the zero and ``1`` the
identity.  Every constructor first enumerates elements in a natural order
(mixed radix over the components, first component least significant) and
then moves the identity to index 1; the remaining elements keep their
natural order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import config
from .abelian import AbGroup, decode, group_structure, prime_power
from .config import BudgetExceeded
from .ringspec import GF, Mat, Nil, Prod, SpecAST, UT, ZMod, parse_ring_spec, spec_size, validate

# Fixed irreducible polynomials (coefficients, constant term first) so that
# gf(p^k) tables are reproducible.
IRREDUCIBLE = {
    (2, 2): (1, 1, 1),  # x^2 + x + 1
    (2, 3): (1, 1, 0, 1),  # x^3 + x + 1
    (2, 4): (1, 1, 0, 0, 1),  # x^4 + x + 1
    (3, 2): (1, 0, 1),  # x^2 + 1
}


class RingTable:
    """A finite ring given by its operation tables (immutable)."""

    def __init__(self, add, mul, spec: str = "", labels=None, zero: int = 0, one: int = 1):
        add = np.array(add, dtype=np.int64)
        mul = np.array(mul, dtype=np.int64)
        n = len(add)
        if add.shape != (n, n) or mul.shape != (n, n):
            raise ValueError("tables must be square and of equal size")
        if zero != 0 or (n > 1 and one != 1):
            raise ValueError("tables must use 0 for zero and 1 for one")
        for t in (add, mul):
            t.flags.writeable = False
        self.size = n
        self.add = add
        self.mul = mul
        self.zero = 0
        self.one = 1 if n > 1 else 0
        self.spec = spec
        self.labels = list(labels) if labels is not None else [str(i) for i in range(n)]
        neg = np.argmax(add == 0, axis=1)
        neg.flags.writeable = False
        self.neg = neg

    def __repr__(self):
        return f"RingTable({self.spec or '?'}, size={self.size})"

    def __len__(self):
        return self.size

    def label(self, x: int) -> str:
        return self.labels[x]

    def sub(self, a, b):
        return self.add[a, self.neg[b]]

    @cached_property
    def key(self) -> str:
        import hashlib

        h = hashlib.sha256()
        h.update(self.add.tobytes())
        h.update(self.mul.tobytes())
        return h.hexdigest()[:16]

    @cached_property
    def group(self) -> AbGroup:
        return group_structure(self.add, 0)

    @cached_property
    def units(self) -> np.ndarray:
        """Boolean mask of units (a one-sided inverse suffices in a finite ring)."""
        return (self.mul == self.one).any(axis=1)

    @cached_property
    def inverse(self) -> np.ndarray:
        inv = np.full(self.size, -1, dtype=np.int64)
        u = np.flatnonzero(self.units)
        inv[u] = np.argmax(self.mul[u] == self.one, axis=1)
        return inv

    @cached_property
    def right_mats(self) -> np.ndarray:
        """``right_mats[r]`` is the coordinate matrix of ``x -> x*r``."""
        G = self.group
        gens = np.array(G.gens, dtype=np.int64)
        imgs = G.to_vec[self.mul[gens, :]]  # (ngens, size, c)
        return np.ascontiguousarray(np.transpose(imgs, (1, 2, 0)))

    @cached_property
    def left_mats(self) -> np.ndarray:
        """``left_mats[r]`` is the coordinate matrix of ``x -> r*x``."""
        G = self.group
        gens = np.array(G.gens, dtype=np.int64)
        imgs = G.to_vec[self.mul[:, gens]]  # (size, ngens, c)
        return np.ascontiguousarray(np.transpose(imgs, (0, 2, 1)))

    def power(self, x: int, k: int) -> int:
        out = self.one
        for _ in range(k):
            out = int(self.mul[out, x])
        return out


# ---------------------------------------------------------------------------
# constructors


def _relabel(add_nat, mul_nat, one_code: int, labels_nat, spec: str) -> RingTable:
    n = len(add_nat)
    order = np.array([0, one_code] + [c for c in range(1, n) if c != one_code], dtype=np.int64) if n > 1 else np.zeros(1, dtype=np.int64)
    inv = np.empty(n, dtype=np.int64)
    inv[order] = np.arange(n)
    add = inv[add_nat[np.ix_(order, order)]]
    mul = inv[mul_nat[np.ix_(order, order)]]
    labels = [labels_nat[c] for c in order]
    return RingTable(add, mul, spec=spec, labels=labels)


def _zmod(n: int) -> RingTable:
    ar = np.arange(n)
    return RingTable(np.add.outer(ar, ar) % n, np.multiply.outer(ar, ar) % n, spec=f"zmod({n})", labels=[str(i) for i in range(n)])


def _poly_label(coeffs) -> str:
    terms = []
    for i in range(len(coeffs) - 1, -1, -1):
        c = int(coeffs[i])
        if not c:
            continue
        mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
        if i == 0:
            terms.append(str(c))
        else:
            terms.append(mono if c == 1 else f"{c}{mono}")
    return "+".join(terms) if terms else "0"


def _gf(q: int) -> RingTable:
    pk = prime_power(q)
    if pk is None:
        raise ValueError(f"gf({q}): {q} is not a prime power")
    p, k = pk
    if k == 1:
        t = _zmod(p)
        t.spec = f"gf({q})"
        return t
    poly = IRREDUCIBLE.get((p, k))
    if poly is None:
        raise ValueError(f"gf({q}) is not tabulated")
    coeffs = decode(np.arange(q), (p,) * k)
    add = np.zeros((q, q), dtype=np.int64)
    mul = np.zeros((q, q), dtype=np.int64)
    weights = p ** np.arange(k)
    for a in range(q):
        for b in range(q):
            add[a, b] = int(((coeffs[a] + coeffs[b]) % p) @ weights)
            prod = [0] * (2 * k - 1)
            for i in range(k):
                for j in range(k):
                    prod[i + j] += int(coeffs[a][i]) * int(coeffs[b][j])
            for d in range(2 * k - 2, k - 1, -1):
                c = prod[d] % p
                if c:
                    for i in range(k + 1):
                        prod[d - k + i] -= c * poly[i]
            mul[a, b] = int(np.array([x % p for x in prod[:k]]) @ weights)
    labels = [_poly_label(c) for c in coeffs]
    return RingTable(add, mul, spec=f"gf({q})", labels=labels)


def _pair_grid(N: int):
    I = np.repeat(np.arange(N), N)
    J = np.tile(np.arange(N), N)
    return I, J


def _matrix_ring(base: RingTable, m: int, positions: list[tuple[int, int]], spec: str) -> RingTable:
    b = base.size
    t = len(positions)
    N = b**t
    E = decode(np.arange(N), (b,) * t)  # (N, t)
    slot = {pos: s for s, pos in enumerate(positions)}
    weights = b ** np.arange(t)
    add_nat = np.zeros((N, N), dtype=np.int64)
    mul_nat = np.zeros((N, N), dtype=np.int64)
    for s in range(t):
        add_nat += base.add[E[:, None, s], E[None, :, s]] * weights[s]
    for (r, c), s in slot.items():
        acc = np.zeros((N, N), dtype=np.int64)
        for l in range(m):
            if (r, l) in slot and (l, c) in slot:
                acc = base.add[acc, base.mul[E[:, None, slot[(r, l)]], E[None, :, slot[(l, c)]]]]
        mul_nat += acc * weights[s]
    one_entries = np.array([base.one if r == c else 0 for (r, c) in positions], dtype=np.int64)
    one_code = int(one_entries @ weights)
    labels = []
    for code in range(N):
        rows = []
        for r in range(m):
            rows.append("[" + ",".join(base.label(int(E[code, slot[(r, c)]])) if (r, c) in slot else "0" for c in range(m)) + "]")
        labels.append("[" + ",".join(rows) + "]")
    return _relabel(add_nat, mul_nat, one_code, labels, spec)


def _product(factors: list[RingTable], spec: str) -> RingTable:
    sizes = [f.size for f in factors]
    N = math.prod(sizes)
    E = decode(np.arange(N), sizes)
    weights = np.cumprod([1] + sizes[:-1])
    add_nat = np.zeros((N, N), dtype=np.int64)
    mul_nat = np.zeros((N, N), dtype=np.int64)
    for s, f in enumerate(factors):
        add_nat += f.add[E[:, None, s], E[None, :, s]] * weights[s]
        mul_nat += f.mul[E[:, None, s], E[None, :, s]] * weights[s]
    one_code = int(np.array([f.one for f in factors]) @ weights)
    labels = ["(" + ",".join(f.label(int(E[c, s])) for s, f in enumerate(factors)) + ")" for c in range(N)]
    return _relabel(add_nat, mul_nat, one_code, labels, spec)


def _dual_numbers(base: RingTable, spec: str) -> RingTable:
    """``base[x]/(x^2)`` with elements ``a + b x`` coded as ``a + |base| * b``."""
    b = base.size
    N = b * b
    E = decode(np.arange(N), (b, b))
    A1, B1 = E[:, None, 0], E[:, None, 1]
    A2, B2 = E[None, :, 0], E[None, :, 1]
    add_nat = base.add[A1, A2] + b * base.add[B1, B2]
    # (a + b x)(c + d x) = ac + (ad + bc) x
    mul_nat = base.mul[A1, A2] + b * base.add[base.mul[A1, B2], base.mul[B1, A2]]
    labels = []
    for c in range(N):
        a, bb = base.label(int(E[c, 0])), base.label(int(E[c, 1]))
        if E[c, 1] == 0:
            labels.append(a)
        elif E[c, 0] == 0:
            labels.append(f"({bb})x")
        else:
            labels.append(f"{a}+({bb})x")
    return _relabel(add_nat, mul_nat, 1, labels, spec)


def build_ring(spec: SpecAST | str, max_elements: int | None = None) -> RingTable:
    """Build the table ring for a constructor expression (AST or text)."""
    if isinstance(spec, str):
        spec = parse_ring_spec(spec)
    validate(spec)
    cap = config.ring_cap() if max_elements is None else max_elements
    size = spec_size(spec)
    if size > cap:
        raise BudgetExceeded(f"{spec} has {size} elements, over the cap of {cap}")
    return _build(spec, cap)


def _build(spec: SpecAST, cap: int) -> RingTable:
    text = str(spec)
    if isinstance(spec, ZMod):
        return _zmod(spec.n)
    if isinstance(spec, GF):
        return _gf(spec.q)
    if isinstance(spec, Mat):
        base = _build(spec.base, cap)
        pos = [(r, c) for r in range(spec.m) for c in range(spec.m)]
        return _matrix_ring(base, spec.m, pos, text)
    if isinstance(spec, UT):
        base = _build(spec.base, cap)
        pos = [(r, c) for r in range(spec.m) for c in range(spec.m) if r <= c]
        return _matrix_ring(base, spec.m, pos, text)
    if isinstance(spec, Prod):
        return _product([_build(f, cap) for f in spec.factors], text)
    if isinstance(spec, Nil):
        return _dual_numbers(_build(spec.base, cap), text)
    raise TypeError(f"not a ring expression: {spec!r}")


# ---------------------------------------------------------------------------
# axioms


@dataclass
class AxiomReport:
    checks: dict[str, bool] = field(default_factory=dict)
    failures: dict[str, tuple] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())


def _first(mask) -> tuple | None:
    hits = np.argwhere(mask)
    return tuple(int(v) for v in hits[0]) if len(hits) else None


def verify_axioms(R: RingTable, max_elements: int = 256) -> AxiomReport:
    """Exhaustively check the ring axioms; failures carry the first witness."""
    n = R.size
    if n > max_elements:
        raise BudgetExceeded(f"exhaustive axiom check capped at {max_elements} elements")
    add, mul = R.add, R.mul
    ar = np.arange(n)
    rep = AxiomReport()

    def record(name, bad):
        w = _first(bad)
        rep.checks[name] = w is None
        if w is not None:
            rep.failures[name] = w

    record("add_closed", (add < 0) | (add >= n) | (mul < 0) | (mul >= n))
    record("add_identity", (add[0] != ar) | (add[:, 0] != ar))
    record("add_inverse", ~(add == 0).any(axis=1))
    record("add_commutative", add != add.T)
    a = ar[:, None, None]
    b = ar[None, :, None]
    c = ar[None, None, :]
    record("add_associative", add[add[a, b], c] != add[a, add[b, c]])
    record("mul_identity", (mul[R.one] != ar) | (mul[:, R.one] != ar))
    record("mul_associative", mul[mul[a, b], c] != mul[a, mul[b, c]])
    record("left_distributive", mul[a, add[b, c]] != add[mul[a, b], mul[a, c]])
    record("right_distributive", mul[add[a, b], c] != add[mul[a, c], mul[b, c]])
    return rep


# shipped corpus used by the acceptance suite and the CLI
CORPUS = (
    "zmod(2)", "zmod(3)", "zmod(4)", "zmod(5)", "zmod(6)", "zmod(7)", "zmod(8)",
    "zmod(9)", "zmod(10)", "zmod(11)", "zmod(12)",
    "gf(2)", "gf(3)", "gf(4)", "gf(5)", "gf(7)", "gf(8)", "gf(9)",
    "mat(2,gf(2))", "ut(2,gf(2))", "nil(gf(2))",
    "prod(zmod(2),zmod(3))", "prod(gf(2),gf(2))", "prod(gf(4),zmod(3))", "prod(zmod(4),gf(2))",
)
