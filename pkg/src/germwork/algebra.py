"""Exact semigroup algebras, convolution algebras, and the map KS -> KC(S).

Scalars are exact: ``Fraction`` for Q, ``int`` for Z and for Z/p (reduced
mod p).  An element is a sparse coefficient tuple over a basis, either the
elements of a semigroup or the arrows of a finite category; zero
coefficients are never stored.

For a finite ``S`` with local units the universal category has one arrow
``[t, (t*)↑]`` per element, and the indicator of ``ι(s)`` is
``Σ_{t <= s} δ_t``.  In a linear extension of ``<=`` the change of basis is
unitriangular, which is what makes F bijective over every ring.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

from .category import FiniteCategory, enumerate_slices, is_slice
from .core import UnarySemigroup, order_matrix
from .errors import (
    CategoryMismatch,
    GermworkError,
    NotASlice,
    NotGroupoid,
    RingMismatch,
    SchemaError,
    TooLarge,
)
from .germs import iota, universal_category
from .lattice import bits

DENSE_LIMIT = 64
INCLUSION_EXCLUSION_LIMIT = 12


# ---------------------------------------------------------------------------
# rings


def _is_prime(p):
    return p >= 2 and all(p % d for d in range(2, int(p**0.5) + 1))


@dataclass(frozen=True)
class Ring:
    """``kind`` is ``"q"``, ``"z"`` or ``"zp"`` (with ``p`` prime)."""

    kind: str
    p: int | None = None

    def __post_init__(self):
        if self.kind not in ("q", "z", "zp"):
            raise SchemaError(f"unknown ring {self.kind!r}")
        if self.kind == "zp" and not _is_prime(self.p or 0):
            raise SchemaError(f"Z/p needs a prime p, got {self.p}")
        if self.kind != "zp" and self.p is not None:
            raise SchemaError("only Z/p takes a modulus")

    @property
    def spec(self):
        return f"zp:{self.p}" if self.kind == "zp" else self.kind

    @property
    def name(self):
        return {"q": "Q", "z": "Z"}.get(self.kind, f"Z/{self.p}")

    @property
    def is_field(self):
        return self.kind != "z"

    def coerce(self, v):
        v = Fraction(v)
        if self.kind == "q":
            return v
        if self.kind == "z":
            if v.denominator != 1:
                raise RingMismatch(f"{v} is not an integer")
            return int(v)
        if v.denominator % self.p == 0:
            raise RingMismatch(f"{v} has no image in Z/{self.p}")
        return v.numerator * pow(v.denominator, -1, self.p) % self.p

    @property
    def zero(self):
        return self.coerce(0)

    @property
    def one(self):
        return self.coerce(1)

    def add(self, a, b):
        return (a + b) % self.p if self.kind == "zp" else a + b

    def mul(self, a, b):
        return (a * b) % self.p if self.kind == "zp" else a * b

    def neg(self, a):
        return (-a) % self.p if self.kind == "zp" else -a

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("zero has no inverse")
        if self.kind == "q":
            return 1 / a
        if self.kind == "z":
            if a not in (1, -1):
                raise RingMismatch(f"{a} is not a unit of Z")
            return a
        return pow(a, -1, self.p)

    def fmt(self, v):
        f = Fraction(v)
        return f"{f.numerator}/{f.denominator}"

    def parse(self, s):
        return self.coerce(Fraction(str(s)))


Q = Ring("q")
Z = Ring("z")


def parse_ring(spec: str):
    """``q``, ``z`` or ``zp:<p>``."""
    spec = spec.strip().lower()
    if spec in ("q", "z"):
        return Ring(spec)
    if spec.startswith("zp:"):
        try:
            return Ring("zp", int(spec[3:]))
        except ValueError:
            raise SchemaError(f"bad modulus in {spec!r}") from None
    raise SchemaError(f"unknown ring {spec!r}; use q, z or zp:<p>")


# ---------------------------------------------------------------------------
# elements


def _size(carrier):
    return carrier.size


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    """Sparse combination; ``coeffs`` is a sorted tuple of ``(index, nonzero)``."""

    basis: str
    carrier: object
    ring: Ring
    coeffs: tuple

    @classmethod
    def make(cls, basis, carrier, ring, mapping):
        n = _size(carrier)
        out = []
        for i, v in sorted(dict(mapping).items()):
            if not 0 <= i < n:
                raise GermworkError(f"basis index {i} out of range")
            v = ring.coerce(v)
            if v != 0:
                out.append((int(i), v))
        return cls(basis, carrier, ring, tuple(out))

    def as_dict(self):
        return dict(self.coeffs)

    def coeff(self, i):
        return self.as_dict().get(i, self.ring.zero)

    @property
    def support(self):
        return tuple(i for i, _ in self.coeffs)

    def _check(self, other):
        if self.ring != other.ring:
            raise RingMismatch(f"{self.ring.name} vs {other.ring.name}")
        if self.basis != other.basis or not (
            self.carrier is other.carrier or self.carrier == other.carrier
        ):
            err = CategoryMismatch if self.basis == "arrow" else GermworkError
            raise err("elements live over different bases")

    def __eq__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        self._check(other)
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.basis, self.ring, self.coeffs))

    def __add__(self, other):
        self._check(other)
        acc = self.as_dict()
        for i, v in other.coeffs:
            acc[i] = self.ring.add(acc.get(i, self.ring.zero), v)
        return AlgebraElement.make(self.basis, self.carrier, self.ring, acc)

    def __neg__(self):
        return self.scale(self.ring.neg(self.ring.one))

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = self.ring.coerce(c)
        return AlgebraElement.make(
            self.basis, self.carrier, self.ring, {i: self.ring.mul(c, v) for i, v in self.coeffs}
        )

    def dense(self):
        out = [self.ring.zero] * _size(self.carrier)
        for i, v in self.coeffs:
            out[i] = v
        return out

    def to_json(self):
        return {
            "basis": self.basis,
            "ring": self.ring.spec,
            "coeffs": {str(i): self.ring.fmt(v) for i, v in self.coeffs},
        }

    @classmethod
    def from_json(cls, doc, carrier):
        try:
            ring = parse_ring(doc["ring"])
            mapping = {int(k): ring.parse(v) for k, v in doc["coeffs"].items()}
            return cls.make(doc["basis"], carrier, ring, mapping)
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"bad algebra element: {exc}") from None


def semigroup_element(S: UnarySemigroup, mapping, ring=Q):
    return AlgebraElement.make("semigroup", S, ring, mapping)


def arrow_element(C: FiniteCategory, mapping, ring=Q):
    return AlgebraElement.make("arrow", C, ring, mapping)


def semigroup_product(a: AlgebraElement, b: AlgebraElement):
    """Bilinear extension of the multiplication table."""
    a._check(b)
    if a.basis != "semigroup":
        raise GermworkError("semigroup product needs semigroup-basis elements")
    S, R = a.carrier, a.ring
    acc = {}
    for s, c in a.coeffs:
        row = S.mul[s]
        for t, d in b.coeffs:
            st = row[t]
            acc[st] = R.add(acc.get(st, R.zero), R.mul(c, d))
    return AlgebraElement.make("semigroup", S, R, acc)


def convolution(f: AlgebraElement, g: AlgebraElement):
    """``(f*g)(x) = Σ_{uv=x} f(u) g(v)``."""
    f._check(g)
    if f.basis != "arrow":
        raise CategoryMismatch("convolution needs arrow-basis elements")
    C, R = f.carrier, f.ring
    comp = C.comp
    acc = {}
    for u, c in f.coeffs:
        for v, d in g.coeffs:
            x = comp.get((u, v))
            if x is not None:
                acc[x] = R.add(acc.get(x, R.zero), R.mul(c, d))
    return AlgebraElement.make("arrow", C, R, acc)


def indicator(C: FiniteCategory, U: int, ring=Q):
    """``χ_U`` for a slice U (a bitmask of arrows)."""
    if not is_slice(C, U):
        raise NotASlice("indicator needs a slice", tuple(bits(U)))
    return arrow_element(C, {x: 1 for x in bits(U)}, ring)


def delta(C: FiniteCategory, x: int, ring=Q):
    return arrow_element(C, {x: 1}, ring)


# ---------------------------------------------------------------------------
# exact linear algebra


def rank(rows, ring=Q):
    """Rank by Gaussian elimination; over Z the rank over Q is returned."""
    field = ring if ring.is_field else Q
    M = [[field.coerce(v) for v in r] for r in rows]
    if not M:
        return 0
    r = 0
    ncols = len(M[0])
    for c in range(ncols):
        piv = next((i for i in range(r, len(M)) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = field.inv(M[r][c])
        M[r] = [field.mul(inv, v) for v in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c] != 0:
                k = M[i][c]
                M[i] = [field.add(a, field.neg(field.mul(k, b))) for a, b in zip(M[i], M[r])]
        r += 1
        if r == len(M):
            break
    return r


def unitriangular_inverse(M, ring):
    """Inverse of a lower unitriangular matrix by forward substitution."""
    n = len(M)
    X = [[ring.zero] * n for _ in range(n)]
    for j in range(n):
        X[j][j] = ring.one
        for i in range(j + 1, n):
            acc = ring.zero
            for k in range(j, i):
                if M[i][k] != 0 and X[k][j] != 0:
                    acc = ring.add(acc, ring.mul(M[i][k], X[k][j]))
            X[i][j] = ring.neg(acc)
    return X


def matmul(A, B, ring):
    n, m, p = len(A), len(B), len(B[0]) if B else 0
    out = [[ring.zero] * p for _ in range(n)]
    for i in range(n):
        for k in range(m):
            a = A[i][k]
            if a == 0:
                continue
            for j in range(p):
                if B[k][j] != 0:
                    out[i][j] = ring.add(out[i][j], ring.mul(a, B[k][j]))
    return out


def matrix_to_json(M, ring):
    """Dense rows of "num/den" strings up to 64 rows, sparse triplets beyond."""
    if len(M) <= DENSE_LIMIT:
        return {"dense": [[ring.fmt(v) for v in row] for row in M]}
    return {
        "shape": [len(M), len(M[0]) if M else 0],
        "sparse": [[i, j, ring.fmt(v)] for i, row in enumerate(M) for j, v in enumerate(row) if v != 0],
    }


# ---------------------------------------------------------------------------
# KS -> KC(S)


def linear_extension(L):
    """Elements sorted by (number of elements below, index): a linear extension of L."""
    below = L.sum(axis=0)
    return sorted(range(L.shape[0]), key=lambda s: (int(below[s]), s))


@dataclass(frozen=True)
class FReport:
    ring: Ring
    dimension: int
    arrows: int
    order: tuple
    matrix: tuple
    multiplicative: bool
    failure: tuple | None
    unitriangular: bool
    expansion: bool
    inverse_verified: bool

    @property
    def ok(self):
        return (
            self.multiplicative
            and self.unitriangular
            and self.expansion
            and self.inverse_verified
            and self.dimension == self.arrows
        )


def F_map(S: UnarySemigroup, ring=Q, G=None):
    """``F(s) = χ_{ι(s)}`` for every s, as arrow elements of the universal category."""
    if G is None:
        G = universal_category(S)
    return G, [indicator(G.category, iota(G, s), ring) for s in range(S.size)]


def F_iso(S: UnarySemigroup, ring=Q, G=None):
    """Check that F extends to an algebra isomorphism KS -> KC(S)."""
    G, F = F_map(S, ring, G)
    n = S.size
    failure = None
    for s in range(n):
        for t in range(n):
            if convolution(F[s], F[t]) != F[S.mul[s][t]]:
                failure = (s, t)
                break
        if failure:
            break
    L = order_matrix(S)
    expansion = all(
        F[s] == arrow_element(G.category, {t: 1 for t in np.nonzero(L[:, s])[0]}, ring)
        for s in range(n)
    )
    order = linear_extension(L)
    M = [[F[s].coeff(t) for t in order] for s in order]
    unitri = True
    for i, s in enumerate(order):
        for j, t in enumerate(order):
            v = M[i][j]
            if i == j and v != ring.one:
                unitri = False
            if i != j and v != 0 and (j > i or not L[t, s]):
                unitri = False
    inv_ok = False
    if unitri:
        X = unitriangular_inverse(M, ring)
        ident = [[ring.one if i == j else ring.zero for j in range(n)] for i in range(n)]
        inv_ok = matmul(M, X, ring) == ident and matmul(X, M, ring) == ident
    return FReport(
        ring,
        n,
        G.size,
        tuple(order),
        tuple(tuple(r) for r in M),
        failure is None,
        failure,
        unitri,
        expansion,
        inv_ok,
    )


# ---------------------------------------------------------------------------
# groupoids: slices versus bislices


def _inclusion_exclusion(C, U, bis):
    """χ_U as Σ_k (-1)^{k-1} Σ_{|J|=k} χ_{∩J} over the maximal bislices inside U."""
    inside = [b for b in bis if b and not b & ~U]
    cover = [b for b in inside if not any(c != b and not b & ~c for c in inside)]
    if len(cover) > INCLUSION_EXCLUSION_LIMIT:
        raise TooLarge(f"{len(cover)} bislices in the cover")
    bis_set = set(bis)
    acc = {}
    for k in range(1, len(cover) + 1):
        sign = 1 if k % 2 else -1
        for J in combinations(cover, k):
            inter = J[0]
            for b in J[1:]:
                inter &= b
            if inter not in bis_set:
                raise GermworkError("intersection of bislices is not a bislice")
            for x in bits(inter):
                acc[x] = acc.get(x, 0) + sign
    return {x: v for x, v in acc.items() if v} == {x: 1 for x in bits(U)}


def groupoid_span_check(C: FiniteCategory, ring=Q):
    """True iff bislice indicators and slice indicators span the same module."""
    if not C.is_groupoid():
        raise NotGroupoid("category has a non-invertible arrow")
    slices = enumerate_slices(C)
    bis = enumerate_slices(C, bislices=True)
    for U in slices:
        if not _inclusion_exclusion(C, U, bis):
            raise GermworkError("inclusion-exclusion does not recover the slice", tuple(bits(U)))

    def row(U):
        return [1 if (U >> x) & 1 else 0 for x in range(C.size)]

    rs = rank([row(U) for U in slices], ring)
    rb = rank([row(U) for U in bis], ring)
    ra = rank([row(U) for U in slices + bis], ring)
    return rs == rb == ra
