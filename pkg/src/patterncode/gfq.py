"""Alphabets and small finite fields.

Elements of GF(p^m) are the integers ``0..q-1``; the base-p digits of an
element are the coefficients of its polynomial representative (digit ``i``
is the coefficient of ``x**i``).  Extension fields use the fixed moduli in
:data:`MODULI` so serialized codes are bit-exact across runs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import DivisionByZero, FieldTooLarge, NotPrimePower

MAX_FIELD_ORDER = 64

# coefficient lists, lowest degree first
MODULI: dict[int, tuple[int, ...]] = {
    4: (1, 1, 1),  # x^2 + x + 1
    8: (1, 1, 0, 1),  # x^3 + x + 1
    9: (1, 0, 1),  # x^2 + 1
    16: (1, 1, 0, 0, 1),  # x^4 + x + 1
    25: (1, 1, 1),  # x^2 + x + 1
    27: (1, 2, 0, 1),  # x^3 + 2x + 1
    32: (1, 0, 1, 0, 0, 1),  # x^5 + x^2 + 1
    49: (3, 1, 1),  # x^2 + x + 3
    64: (1, 1, 0, 0, 0, 0, 1),  # x^6 + x + 1
}


def _factor_prime_power(x: int) -> tuple[int, int] | None:
    if x < 2:
        return None
    p = 2
    while p * p <= x:
        if x % p == 0:
            break
        p += 1
    else:
        return x, 1
    m = 0
    while x % p == 0:
        x //= p
        m += 1
    return (p, m) if x == 1 else None


def is_prime_power(x: int) -> bool:
    """True iff ``x = p**m`` for a prime ``p`` and ``m >= 1``."""
    return _factor_prime_power(int(x)) is not None


def pp_ceil(x: int) -> int:
    """Smallest prime power ``>= max(x, 2)``."""
    y = max(int(x), 2)
    while not is_prime_power(y):
        y += 1
    return y


@dataclass(frozen=True)
class Alphabet:
    """A bare symbol set ``{0..q-1}`` with no algebraic structure."""

    q: int

    def __post_init__(self):
        if self.q < 2:
            raise ValueError(f"alphabet size must be >= 2, got {self.q}")


@dataclass(frozen=True, eq=False)
class Field:
    """GF(q) given by lookup tables.  Immutable once built; use :func:`field_new`."""

    q: int
    p: int
    m: int
    modulus: tuple[int, ...] | None
    add_table: np.ndarray = field(repr=False)
    mul_table: np.ndarray = field(repr=False)
    neg_table: np.ndarray = field(repr=False)
    inv_table: np.ndarray = field(repr=False)

    def __eq__(self, other):
        return isinstance(other, Field) and other.q == self.q

    def __hash__(self):
        return hash(("Field", self.q))

    def _check(self, *xs):
        for x in xs:
            if not 0 <= x < self.q:
                raise ValueError(f"{x} is not an element of GF({self.q})")

    def add(self, a: int, b: int) -> int:
        self._check(a, b)
        return int(self.add_table[a, b])

    def sub(self, a: int, b: int) -> int:
        self._check(a, b)
        return int(self.add_table[a, self.neg_table[b]])

    def neg(self, a: int) -> int:
        self._check(a)
        return int(self.neg_table[a])

    def mul(self, a: int, b: int) -> int:
        self._check(a, b)
        return int(self.mul_table[a, b])

    def inv(self, a: int) -> int:
        self._check(a)
        if a == 0:
            raise DivisionByZero(f"0 has no inverse in GF({self.q})")
        return int(self.inv_table[a])

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        self._check(a)
        if e < 0:
            a, e = self.inv(a), -e
        result, base = 1, a
        while e:
            if e & 1:
                result = int(self.mul_table[result, base])
            base = int(self.mul_table[base, base])
            e >>= 1
        return result

    def arith(self, op: str, *operands: int) -> int:
        """Dispatch by name: ``add``, ``mul``, ``inv`` or ``pow``."""
        return getattr(self, op)(*operands)

    def to_json(self) -> dict:
        return {"q": self.q, "p": self.p, "m": self.m, "modulus": list(self.modulus) if self.modulus else None}


def _poly_tables(p: int, m: int, modulus: tuple[int, ...]) -> tuple[np.ndarray, np.ndarray]:
    q = p**m
    digits = np.array([[(x // p**i) % p for i in range(m)] for x in range(q)], dtype=np.int64)
    weights = p ** np.arange(m)
    add = ((digits[:, None, :] + digits[None, :, :]) % p) @ weights
    mul = np.zeros((q, q), dtype=np.int64)
    low = [-c % p for c in modulus[:m]]  # x^m == -(lower terms)
    for a in range(q):
        for b in range(a, q):
            prod = [0] * (2 * m - 1)
            for i, da in enumerate(digits[a]):
                if da:
                    for j, db in enumerate(digits[b]):
                        prod[i + j] = (prod[i + j] + da * db) % p
            for deg in range(2 * m - 2, m - 1, -1):
                c = prod[deg]
                if c:
                    prod[deg] = 0
                    for i, lc in enumerate(low):
                        prod[deg - m + i] = (prod[deg - m + i] + c * lc) % p
            mul[a, b] = mul[b, a] = sum(int(prod[i]) * p**i for i in range(m))
    return add, mul


@lru_cache(maxsize=None)
def field_new(q: int) -> Field:
    """Build (and cache) GF(q) for a prime power ``q <= 64``."""
    q = int(q)
    pm = _factor_prime_power(q)
    if pm is None:
        raise NotPrimePower(f"{q} is not a prime power")
    if q > MAX_FIELD_ORDER:
        raise FieldTooLarge(f"GF({q}) exceeds the supported maximum {MAX_FIELD_ORDER}")
    p, m = pm
    if m == 1:
        r = np.arange(q)
        add = (r[:, None] + r[None, :]) % q
        mul = (r[:, None] * r[None, :]) % q
        modulus = None
    else:
        modulus = MODULI[q]
        add, mul = _poly_tables(p, m, modulus)
    neg = np.argmin(add, axis=1)  # add[a, neg[a]] == 0 is the unique zero in the row
    inv = np.zeros(q, dtype=np.int64)
    for a in range(1, q):
        inv[a] = int(np.flatnonzero(mul[a] == 1)[0])
    tables = []
    for t in (add, mul, neg, inv):
        t = np.asarray(t, dtype=np.int64)
        t.setflags(write=False)
        tables.append(t)
    return Field(q, p, m, modulus, *tables)


def rank(f: Field, mat) -> int:
    """Rank of a matrix over ``f`` by Gaussian elimination."""
    a = np.array(mat, dtype=np.int64, copy=True)
    if a.size == 0:
        return 0
    rows, cols = a.shape
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if a[i, c]), None)
        if piv is None:
            continue
        a[[r, piv]] = a[[piv, r]]
        a[r] = f.mul_table[f.inv_table[a[r, c]], a[r]]
        for i in range(rows):
            if i != r and a[i, c]:
                a[i] = f.add_table[a[i], f.neg_table[f.mul_table[a[i, c], a[r]]]]
        r += 1
        if r == rows:
            break
    return r


def solve(f: Field, mat, rhs) -> np.ndarray:
    """Solve the square nonsingular system ``mat @ x = rhs`` over ``f``."""
    a = np.array(mat, dtype=np.int64)
    n = a.shape[0]
    aug = np.concatenate([a, np.asarray(rhs, dtype=np.int64).reshape(n, 1)], axis=1)
    for c in range(n):
        piv = next((i for i in range(c, n) if aug[i, c]), None)
        if piv is None:
            raise DivisionByZero("singular system")
        aug[[c, piv]] = aug[[piv, c]]
        aug[c] = f.mul_table[f.inv_table[aug[c, c]], aug[c]]
        for i in range(n):
            if i != c and aug[i, c]:
                aug[i] = f.add_table[aug[i], f.neg_table[f.mul_table[aug[i, c], aug[c]]]]
    return aug[:, n].copy()
