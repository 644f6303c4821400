"""Small finite fields F_q (q = p^e <= 128) and dense exact matrices over them.

Elements are stored as integer indices ``c0 + c1*p + ... + c_{e-1}*p^(e-1)``
where ``(c0, ..., c_{e-1})`` are the coordinates in the power basis of the
fixed modulus.  For prime fields the index *is* the residue.  Matrices are
plain ``numpy`` int64 arrays of indices; every operation takes the field as
its first argument or is a method of :class:`GF`.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product

import numpy as np

from .errors import DimensionError, FieldMismatch, NoSolution

# (p, e) -> low-to-high coefficients of the monic modulus
MODULUS_TABLE = {
    (2, 2): (1, 1, 1),
    (2, 3): (1, 1, 0, 1),
    (3, 2): (1, 0, 1),
    (5, 2): (1, 1, 1),
    (3, 3): (1, 2, 0, 1),
    (7, 2): (3, 1, 1),
}


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def _poly_has_factor(coeffs, p):
    """Brute-force reducibility test for a monic polynomial over F_p."""
    deg = len(coeffs) - 1
    for d in range(1, deg // 2 + 1):
        for tail in product(range(p), repeat=d):
            divisor = list(tail) + [1]
            rem = list(coeffs)
            for shift in range(deg - d, -1, -1):
                c = rem[shift + d]
                if c:
                    for i, a in enumerate(divisor):
                        rem[shift + i] = (rem[shift + i] - c * a) % p
            if not any(rem[:d]):
                return True
    return False


def is_irreducible(coeffs, p) -> bool:
    return not _poly_has_factor(list(coeffs), p)


def default_modulus(p: int, e: int) -> tuple:
    if e == 1:
        return (0, 1)
    if (p, e) in MODULUS_TABLE:
        return MODULUS_TABLE[(p, e)]
    # first irreducible in lexicographic order of (c_{e-1}, ..., c_0)
    for tail in product(range(p), repeat=e):
        coeffs = tuple(reversed(tail)) + (1,)
        if coeffs[0] and is_irreducible(coeffs, p):
            return coeffs
    raise ValueError(f"no irreducible polynomial of degree {e} over F_{p}")


@dataclass(frozen=True)
class FieldSpec:
    p: int
    e: int = 1
    modulus: tuple = None

    def __post_init__(self):
        if not is_prime(self.p) or self.p > 97:
            raise ValueError(f"characteristic must be a prime <= 97, got {self.p}")
        if not 1 <= self.e <= 4:
            raise ValueError(f"extension degree must be in 1..4, got {self.e}")
        if self.p ** self.e > 128:
            raise ValueError(f"field order {self.p ** self.e} exceeds 128")
        if self.modulus is None:
            object.__setattr__(self, "modulus", default_modulus(self.p, self.e))
        elif tuple(self.modulus) != default_modulus(self.p, self.e):
            raise ValueError(f"modulus for F_{self.p}^{self.e} is fixed")

    @property
    def q(self) -> int:
        return self.p ** self.e


@dataclass(frozen=True)
class FieldElem:
    """A field element as its power-basis coordinates."""
    coeffs: tuple
    field: FieldSpec

    def __post_init__(self):
        if len(self.coeffs) != self.field.e or any(
                not 0 <= c < self.field.p for c in self.coeffs):
            raise ValueError(f"bad coordinates {self.coeffs} for F_{self.field.q}")

    @property
    def index(self) -> int:
        return get_field(self.field).from_coeffs(self.coeffs)


def field_mul(a: FieldElem, b: FieldElem, F: FieldSpec = None) -> FieldElem:
    F = F or a.field
    if a.field != F or b.field != F:
        raise FieldMismatch("field_mul on elements of different fields")
    k = get_field(F)
    return FieldElem(tuple(k.to_coeffs(int(k.mul[a.index, b.index]))), F)


class GF:
    """Arithmetic tables and dense linear algebra for one finite field."""

    def __init__(self, spec: FieldSpec):
        self.spec = spec
        self.p, self.e, self.q = spec.p, spec.e, spec.q
        self.prime = self.e == 1
        p, e, q = self.p, self.e, self.q
        self.digits = np.array(
            [[(i // p ** j) % p for j in range(e)] for i in range(q)], dtype=np.int64)
        self.place = np.array([p ** j for j in range(e)], dtype=np.int64)
        add = (self.digits[:, None, :] + self.digits[None, :, :]) % p
        self.add = add @ self.place
        sub = (self.digits[:, None, :] - self.digits[None, :, :]) % p
        self.sub = sub @ self.place
        self.neg = self.sub[0]
        mod = spec.modulus
        mul = np.zeros((q, q), dtype=np.int64)
        for a in range(q):
            for b in range(a, q):
                prod_ = [0] * (2 * e - 1)
                for i in range(e):
                    for j in range(e):
                        prod_[i + j] += self.digits[a, i] * self.digits[b, j]
                for k in range(2 * e - 2, e - 1, -1):
                    c = prod_[k] % p
                    if c:
                        for i in range(e):
                            prod_[k - e + i] -= c * mod[i]
                    prod_[k] = 0
                v = sum((prod_[i] % p) * p ** i for i in range(e))
                mul[a, b] = mul[b, a] = v
        self.mul = mul
        inv = np.zeros(q, dtype=np.int64)
        for a in range(1, q):
            inv[a] = int(np.nonzero(mul[a] == 1)[0][0])
        self.inv = inv
        # multiplicative generator for discrete logs
        for g in range(1, q):
            seen, x = set(), 1
            for _ in range(q - 1):
                seen.add(x)
                x = int(mul[x, g])
            if len(seen) == q - 1:
                self.primitive = g
                break
        self.log = np.zeros(q, dtype=np.int64)
        x = 1
        for k in range(q - 1):
            self.log[x] = k
            x = int(mul[x, self.primitive])

    def __repr__(self):
        return f"GF({self.q})"

    def __eq__(self, other):
        return isinstance(other, GF) and self.spec == other.spec

    def __hash__(self):
        return hash(self.spec)

    # ---- scalars -----------------------------------------------------
    def from_coeffs(self, coeffs) -> int:
        coeffs = [int(c) for c in coeffs]
        if len(coeffs) != self.e or any(not 0 <= c < self.p for c in coeffs):
            raise ValueError(f"bad coordinates {coeffs} for {self}")
        return int(np.dot(coeffs, self.place))

    def to_coeffs(self, a: int) -> list:
        return [int(c) for c in self.digits[int(a)]]

    def power(self, a: int, n: int) -> int:
        if a == 0:
            return 0 if n > 0 else 1
        k = (int(self.log[a]) * n) % (self.q - 1)
        r = 1
        for _ in range(k):
            r = int(self.mul[r, self.primitive])
        return r

    # ---- elementwise -------------------------------------------------
    def madd(self, A, B):
        if self.prime:
            return (A + B) % self.p
        return self.add[A, B]

    def msub(self, A, B):
        if self.prime:
            return (A - B) % self.p
        return self.sub[A, B]

    def mneg(self, A):
        if self.prime:
            return (-A) % self.p
        return self.neg[A]

    def scale(self, c: int, A):
        if self.prime:
            return (int(c) * A) % self.p
        return self.mul[int(c), A]

    def msum(self, mats):
        """Sum of an iterable of equally-shaped matrices."""
        it = iter(mats)
        acc = next(it).copy()
        for M in it:
            acc = self.madd(acc, M)
        return acc

    # ---- constructors ------------------------------------------------
    def zeros(self, r, c=None):
        return np.zeros((r, r if c is None else c), dtype=np.int64)

    def eye(self, n):
        return np.eye(n, dtype=np.int64)

    def random(self, rng, shape):
        return rng.integers(0, self.q, size=shape, dtype=np.int64)

    def asmatrix(self, rows):
        A = np.array(rows, dtype=np.int64)
        if A.size and (A.min() < 0 or A.max() >= self.q):
            raise ValueError(f"entries out of range for {self}")
        return A

    # ---- products ----------------------------------------------------
    def matmul(self, A, B):
        if A.shape[1] != B.shape[0]:
            raise DimensionError(f"cannot multiply {A.shape} by {B.shape}")
        if self.prime:
            return (A @ B) % self.p
        p, e = self.p, self.e
        Ad = self.digits[A]
        Bd = self.digits[B]
        planes = [np.zeros((A.shape[0], B.shape[1]), dtype=np.int64)
                  for _ in range(2 * e - 1)]
        for i in range(e):
            for j in range(e):
                planes[i + j] += Ad[..., i] @ Bd[..., j]
        mod = self.spec.modulus
        for k in range(2 * e - 2, e - 1, -1):
            c = planes[k] % p
            for i in range(e):
                planes[k - e + i] -= c * mod[i]
        out = np.zeros((A.shape[0], B.shape[1]), dtype=np.int64)
        for i in range(e):
            out += (planes[i] % p) * self.place[i]
        return out

    def mpow(self, A, n):
        R = self.eye(A.shape[0])
        base = A
        while n:
            if n & 1:
                R = self.matmul(R, base)
            base = self.matmul(base, base)
            n >>= 1
        return R

    def kron(self, A, B):
        ra, ca = A.shape
        rb, cb = B.shape
        if self.prime:
            K = (A[:, None, :, None] * B[None, :, None, :]) % self.p
        else:
            K = self.mul[A[:, None, :, None], B[None, :, None, :]]
        return K.reshape(ra * rb, ca * cb)

    # ---- elimination -------------------------------------------------
    def _reduce(self, R, ncols):
        """In-place reduced row echelon on the first ``ncols`` columns."""
        rows = R.shape[0]
        pivots = []
        r = 0
        for c in range(ncols):
            if r == rows:
                break
            nz = np.flatnonzero(R[r:, c])
            if nz.size == 0:
                continue
            i = r + nz[0]
            if i != r:
                R[[r, i]] = R[[i, r]]
            lead = int(R[r, c])
            if lead != 1:
                R[r, c:] = self.scale(int(self.inv[lead]), R[r, c:])
            col = R[:, c].copy()
            col[r] = 0
            hit = np.flatnonzero(col)
            if hit.size:
                piv = R[r, c:]
                if self.prime:
                    R[hit, c:] = (R[hit, c:] - col[hit, None] * piv[None, :]) % self.p
                else:
                    R[hit, c:] = self.sub[R[hit, c:],
                                          self.mul[col[hit, None], piv[None, :]]]
            pivots.append(c)
            r += 1
        return pivots

    def rref(self, M, transform=True):
        """Return ``(R, rank, pivots, T)`` with ``R = T @ M`` reduced."""
        M = np.asarray(M, dtype=np.int64)
        rows, cols = M.shape
        if transform:
            aug = np.concatenate([M, self.eye(rows)], axis=1)
            pivots = self._reduce(aug, cols)
            return aug[:, :cols], len(pivots), pivots, aug[:, cols:]
        R = M.copy()
        pivots = self._reduce(R, cols)
        return R, len(pivots), pivots, None

    def rank(self, M) -> int:
        M = np.asarray(M, dtype=np.int64)
        if M.size == 0:
            return 0
        if M.shape[0] > M.shape[1]:
            M = M.T
        return len(self._reduce(M.copy(), M.shape[1]))

    def kernel_basis(self, M, return_free=False):
        """Columns span ``{v : M v = 0}``; free coordinates form an identity block."""
        M = np.asarray(M, dtype=np.int64)
        rows, cols = M.shape
        R = M.copy()
        pivots = self._reduce(R, cols)
        pset = set(pivots)
        free = [c for c in range(cols) if c not in pset]
        K = self.zeros(cols, len(free))
        K[free, np.arange(len(free))] = 1
        if pivots and free:
            K[np.array(pivots)[:, None], np.arange(len(free))[None, :]] = \
                self.neg[R[:len(pivots)][:, free]]
        if return_free:
            return K, free
        return K

    def solve_right(self, A, B):
        """Some ``X`` with ``A @ X = B`` (free variables zero); raises NoSolution."""
        A = np.asarray(A, dtype=np.int64)
        B = np.asarray(B, dtype=np.int64)
        if B.ndim == 1:
            B = B[:, None]
        if A.shape[0] != B.shape[0]:
            raise DimensionError(f"row mismatch {A.shape} vs {B.shape}")
        n = A.shape[1]
        aug = np.concatenate([A, B], axis=1)
        pivots = self._reduce(aug, n)
        r = len(pivots)
        if np.any(aug[r:, n:]):
            raise NoSolution("inconsistent linear system")
        X = self.zeros(n, B.shape[1])
        for i, pc in enumerate(pivots):
            X[pc] = aug[i, n:]
        return X

    def inverse(self, A):
        A = np.asarray(A, dtype=np.int64)
        if A.shape[0] != A.shape[1]:
            raise DimensionError("inverse of a non-square matrix")
        n = A.shape[0]
        aug = np.concatenate([A, self.eye(n)], axis=1)
        pivots = self._reduce(aug, n)
        if len(pivots) < n:
            raise NoSolution("matrix is singular")
        return aug[:, n:].copy()

    def is_invertible(self, A) -> bool:
        return A.shape[0] == A.shape[1] and self.rank(A) == A.shape[0]

    def column_basis(self, M):
        """Indices of a maximal independent set of columns (leftmost first)."""
        R = np.asarray(M, dtype=np.int64).copy()
        return self._reduce(R, R.shape[1])

    def complement_coordinates(self, S):
        """Standard basis coordinates spanning a complement of colspace(S)."""
        d = S.shape[0]
        if S.shape[1] == 0:
            return list(range(d))
        R = S.T.copy()
        pivots = set(self._reduce(R, d))
        return [j for j in range(d) if j not in pivots]

    def left_inverse(self, B):
        """``L`` with ``L @ B = I`` for ``B`` of full column rank."""
        d, r = B.shape
        if r == 0:
            return self.zeros(0, d)
        rows = self.column_basis(B.T)
        if len(rows) < r:
            raise NoSolution("matrix does not have full column rank")
        L = self.zeros(r, d)
        L[:, rows] = self.inverse(B[rows])
        return L


@lru_cache(maxsize=None)
def _field(p, e):
    return GF(FieldSpec(p, e))


def get_field(spec) -> GF:
    if isinstance(spec, GF):
        return spec
    if isinstance(spec, FieldSpec):
        return _field(spec.p, spec.e)
    if isinstance(spec, int):
        return _field(spec, 1)
    p, e = spec
    return _field(p, e)


# functional aliases matching the operation names
def rref(F, M):
    return get_field(F).rref(M)


def solve_right(F, A, B):
    return get_field(F).solve_right(A, B)


def kernel_basis(F, M):
    return get_field(F).kernel_basis(M)


def kron(F, A, B):
    return get_field(F).kron(A, B)
