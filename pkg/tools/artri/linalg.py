"""
Exact linear algebra
====================
Exact scalars (sympy's QQ or GF(p)) and immutable dense matrices backed by
sympy DomainMatrix, with row reduction, kernels and linear solves. Everything
above this module builds one linear system at a time and hands it here.

Usage:
  from tools.artri.linalg import Field, Matrix, rref, kernel, solve, rank
  Q = Field.rationals()
  m = Matrix.from_rows(Q, [[1, 2], [2, 4]])
  rank(m)               # 1
  kernel(m)             # 2x1 matrix, column (-2, 1)
  solve(m, Matrix.from_rows(Q, [[1], [2]]))
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, List, Optional, Sequence, Tuple

from sympy import Rational, isprime
from sympy.polys.domains import GF, QQ
from sympy.polys.domains.domain import Domain
from sympy.polys.matrices import DomainMatrix

from . import config
from .errors import DimensionMismatchError, FieldMismatchError

logger = logging.getLogger("artri.linalg")


# ═══════════════════════════════════════════════════════════════
# Scalars
# ═══════════════════════════════════════════════════════════════

@lru_cache(maxsize=None)
def _domain(prime: int) -> Domain:
    return QQ if prime == 0 else GF(prime, symmetric=False)


@dataclass(frozen=True)
class Field:
    """The ground field: prime == 0 means the rationals."""

    prime: int = 0

    @classmethod
    def rationals(cls) -> "Field":
        return cls(0)

    @classmethod
    def gf(cls, p: int = 0) -> "Field":
        p = p or config.DEFAULT_PRIME
        if not isprime(p):
            raise ValueError(f"{p} is not prime")
        return cls(p)

    @classmethod
    def parse(cls, text: str) -> "Field":
        t = text.strip().lower()
        if t in ("rational", "rationals", "q", "qq"):
            return cls.rationals()
        if t.startswith("prime") or t.startswith("gf"):
            digits = "".join(ch for ch in t if ch.isdigit())
            return cls.gf(int(digits) if digits else 0)
        raise ValueError(f"unknown field {text!r}")

    @property
    def domain(self) -> Domain:
        return _domain(self.prime)

    @property
    def name(self) -> str:
        return "rational" if self.prime == 0 else f"prime:{self.prime}"

    @property
    def zero(self):
        return self.domain.zero

    @property
    def one(self):
        return self.domain.one

    def __call__(self, x):
        k = self.domain
        if k.of_type(x):
            return x
        if isinstance(x, int):
            return k(x)
        if isinstance(x, str):
            x = Rational(x.strip())
        if isinstance(x, Rational):
            return k(int(x.p)) / k(int(x.q))
        raise FieldMismatchError(f"{x!r} is not an element of {k}")

    def check(self, x) -> None:
        if not self.domain.of_type(x):
            raise FieldMismatchError(f"{x!r} is not an element of {self.domain}")

    def format(self, x) -> str:
        x = self(x)
        if self.prime:
            return str(int(x) % self.prime)
        num, den = QQ.numer(x), QQ.denom(x)
        return str(num) if den == 1 else f"{num}/{den}"

    def random(self, rng: random.Random, bound: int = 3):
        """Small random scalar; zero included."""
        return self(rng.randint(-bound, bound))

    def random_nonzero(self, rng: random.Random, bound: int = 3):
        while True:
            x = self.random(rng, bound)
            if x != 0:
                return x


# ═══════════════════════════════════════════════════════════════
# Matrices
# ═══════════════════════════════════════════════════════════════

class Matrix:
    """Immutable dense matrix over a Field, wrapping a DomainMatrix."""

    __slots__ = ("field", "nrows", "ncols", "_rows", "_dm")

    def __init__(self, field: Field, rows: Sequence[Sequence], nrows: Optional[int] = None,
                 ncols: Optional[int] = None):
        self.field = field
        self._rows: Tuple[tuple, ...] = tuple(tuple(field(x) for x in r) for r in rows)
        self.nrows = len(self._rows) if nrows is None else nrows
        if ncols is None:
            ncols = len(self._rows[0]) if self._rows else 0
        self.ncols = ncols
        if len(self._rows) != self.nrows or any(len(r) != self.ncols for r in self._rows):
            raise DimensionMismatchError("ragged matrix rows")
        self._dm: Optional[DomainMatrix] = None

    # -- sympy bridge ------------------------------------------------------
    @property
    def dm(self) -> DomainMatrix:
        if self._dm is None:
            self._dm = DomainMatrix([list(r) for r in self._rows], self.shape, self.field.domain)
        return self._dm

    @classmethod
    def from_domain_matrix(cls, field: Field, dm: DomainMatrix) -> "Matrix":
        if dm.domain != field.domain:
            raise FieldMismatchError(f"{dm.domain} matrix used over {field.domain}")
        nrows, ncols = dm.shape
        out = cls(field, dm.to_list(), nrows, ncols)
        out._dm = dm.to_dense()
        return out

    # -- constructors ---------------------------------------------------
    @classmethod
    def from_rows(cls, field: Field, rows: Sequence[Sequence], ncols: Optional[int] = None) -> "Matrix":
        return cls(field, rows, len(rows), ncols)

    @classmethod
    def zeros(cls, field: Field, nrows: int, ncols: int) -> "Matrix":
        z = field.zero
        return cls(field, [[z] * ncols for _ in range(nrows)], nrows, ncols)

    @classmethod
    def identity(cls, field: Field, n: int) -> "Matrix":
        return cls.from_domain_matrix(field, DomainMatrix.eye(n, field.domain))

    @classmethod
    def column(cls, field: Field, values: Sequence) -> "Matrix":
        return cls(field, [[v] for v in values], len(values), 1)

    @classmethod
    def from_columns(cls, field: Field, columns: Sequence[Sequence], nrows: int) -> "Matrix":
        return cls(field, [[c[i] for c in columns] for i in range(nrows)], nrows, len(columns))

    @classmethod
    def hstack(cls, field: Field, blocks: Sequence["Matrix"], nrows: int) -> "Matrix":
        for b in blocks:
            if b.nrows != nrows:
                raise DimensionMismatchError("hstack row mismatch")
        rows = [sum((b._rows[i] for b in blocks), ()) for i in range(nrows)]
        return cls(field, rows, nrows, sum(b.ncols for b in blocks))

    @classmethod
    def vstack(cls, field: Field, blocks: Sequence["Matrix"], ncols: int) -> "Matrix":
        for b in blocks:
            if b.ncols != ncols:
                raise DimensionMismatchError("vstack column mismatch")
        rows = [r for b in blocks for r in b._rows]
        return cls(field, rows, len(rows), ncols)

    # -- access ------------------------------------------------------------
    @property
    def shape(self) -> Tuple[int, int]:
        return self.nrows, self.ncols

    def __getitem__(self, ij):
        i, j = ij
        return self._rows[i][j]

    def rows(self) -> List[list]:
        return [list(r) for r in self._rows]

    def row(self, i: int) -> tuple:
        return self._rows[i]

    def col(self, j: int) -> tuple:
        return tuple(r[j] for r in self._rows)

    def columns(self) -> List[tuple]:
        return [self.col(j) for j in range(self.ncols)]

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "Matrix":
        return Matrix(self.field, [[self._rows[i][j] for j in cols] for i in rows], len(rows), len(cols))

    def transpose(self) -> "Matrix":
        return Matrix(self.field, [self.col(j) for j in range(self.ncols)], self.ncols, self.nrows)

    @property
    def T(self) -> "Matrix":
        return self.transpose()

    def is_zero(self) -> bool:
        return all(not x for r in self._rows for x in r)

    def _empty(self) -> bool:
        return self.nrows == 0 or self.ncols == 0

    # -- arithmetic ------------------------------------------------------
    def _same_field(self, other: "Matrix") -> None:
        if other.field != self.field:
            raise FieldMismatchError(f"{self.field.name} matrix mixed with {other.field.name}")

    def __add__(self, other: "Matrix") -> "Matrix":
        self._same_field(other)
        if self.shape != other.shape:
            raise DimensionMismatchError(f"add {self.shape} + {other.shape}")
        if self._empty():
            return self
        return Matrix.from_domain_matrix(self.field, self.dm + other.dm)

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + (-other)

    def __neg__(self) -> "Matrix":
        if self._empty():
            return self
        return Matrix.from_domain_matrix(self.field, -self.dm)

    def scale(self, c) -> "Matrix":
        if self._empty():
            return self
        return Matrix.from_domain_matrix(self.field, self.dm.scalarmul(self.field(c)))

    def __matmul__(self, other: "Matrix") -> "Matrix":
        self._same_field(other)
        if self.ncols != other.nrows:
            raise DimensionMismatchError(f"multiply {self.shape} @ {other.shape}")
        if self._empty() or other._empty():
            return Matrix.zeros(self.field, self.nrows, other.ncols)
        return Matrix.from_domain_matrix(self.field, self.dm.matmul(other.dm))

    def __eq__(self, other) -> bool:
        return (isinstance(other, Matrix) and self.field == other.field
                and self.shape == other.shape and self._rows == other._rows)

    def __hash__(self):
        return hash((self.field, self.shape, self._rows))

    def __repr__(self):
        body = "; ".join(" ".join(self.field.format(x) for x in r) for r in self._rows)
        return f"Matrix[{self.nrows}x{self.ncols}]({body})"

    # -- reductions (thin wrappers over the module functions) -------------
    def rref(self):
        return rref(self)

    def rank(self) -> int:
        return rank(self)

    def kernel(self) -> "Matrix":
        return kernel(self)

    def solve(self, b: "Matrix") -> Optional["Matrix"]:
        return solve(self, b)

    def inverse(self) -> Optional["Matrix"]:
        if self.nrows != self.ncols or rank(self) != self.nrows:
            return None
        if self._empty():
            return self
        return Matrix.from_domain_matrix(self.field, self.dm.inv())


# ═══════════════════════════════════════════════════════════════
# Row reduction
# ═══════════════════════════════════════════════════════════════

def _rref_dm(m: Matrix) -> Tuple[DomainMatrix, List[int]]:
    red, pivots = m.dm.rref()
    return red, list(pivots)


def rref(m: Matrix) -> Tuple[Matrix, List[int], int]:
    """Reduced row echelon form, pivot columns and rank."""
    if m._empty():
        return m, [], 0
    red, pivots = _rref_dm(m)
    return Matrix.from_domain_matrix(m.field, red), pivots, len(pivots)


def rank(m: Matrix) -> int:
    return rref(m)[2]


def kernel(m: Matrix) -> Matrix:
    """Columns form a basis of {x : m x = 0}, one per free column of the rref."""
    if m.ncols == 0:
        return Matrix.zeros(m.field, 0, 0)
    if m.nrows == 0:
        return Matrix.identity(m.field, m.ncols)
    red, pivots = _rref_dm(m)
    if len(pivots) == m.ncols:
        return Matrix.zeros(m.field, m.ncols, 0)
    basis = red.nullspace_from_rref(pivots)
    return Matrix.from_domain_matrix(m.field, basis.transpose())


def solve(m: Matrix, b: Matrix) -> Optional[Matrix]:
    """Some x with m x = b, or None if the system is inconsistent."""
    if m.nrows != b.nrows:
        raise DimensionMismatchError(f"solve: {m.nrows} equations vs right side with {b.nrows} rows")
    if m.field != b.field:
        raise FieldMismatchError("solve: matrix and right side over different fields")
    field = m.field
    n, k = m.ncols, b.ncols
    if m.nrows == 0 or k == 0:
        return Matrix.zeros(field, n, k)
    augmented = Matrix.hstack(field, [m, b], m.nrows)
    red, pivots = _rref_dm(augmented)
    if pivots and pivots[-1] >= n:
        return None
    rows = red.to_list()
    x = [[field.zero] * k for _ in range(n)]
    for r, pc in enumerate(pivots):
        x[pc] = rows[r][n:]
    return Matrix(field, x, n, k)


def solve_vector(m: Matrix, b: Sequence) -> Optional[List]:
    """Vector form of solve."""
    x = solve(m, Matrix.column(m.field, list(b)))
    return None if x is None else list(x.col(0))


def span_rank(field: Field, vectors: Iterable[Sequence], length: int) -> int:
    vs = [list(v) for v in vectors]
    if not vs:
        return 0
    return rank(Matrix(field, vs, len(vs), length))


def in_span(field: Field, vectors: Sequence[Sequence], target: Sequence) -> bool:
    if not vectors:
        return all(not x for x in target)
    m = Matrix.from_columns(field, vectors, len(target))
    return solve_vector(m, target) is not None


def is_invertible(m: Matrix) -> bool:
    return m.nrows == m.ncols and rank(m) == m.nrows
