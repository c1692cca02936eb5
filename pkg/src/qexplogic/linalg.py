"""Exact arithmetic over the Gaussian rationals Q(i).

Everything here is exact: scalars are pairs of :class:`fractions.Fraction`,
matrices are immutable tuples of scalars.  Projections onto rational
subspaces are built as ``B (B* B)^-1 B*`` which never leaves Q(i), so no
square roots are ever needed.
"""
from __future__ import annotations

import re
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

__all__ = [
    "GaussianRational",
    "QMatrix",
    "Projection",
    "DensityOperator",
    "LinalgError",
    "parse_scalar",
    "format_scalar",
    "project_onto_span",
    "proj_meet",
    "proj_join",
    "proj_leq",
    "commutes",
    "kron",
    "qubit_spin_projection",
    "PAULI",
]


class LinalgError(ValueError):
    """Raised when a matrix fails a structural invariant."""


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floats are not exact; pass a Fraction, int or string")
    return Fraction(x)


class GaussianRational:
    """A complex number with rational real and imaginary parts."""

    __slots__ = ("re", "im", "_hash")

    def __init__(self, re=0, im=0):
        if isinstance(re, GaussianRational):
            if im:
                raise TypeError("cannot combine a GaussianRational with an imaginary part")
            re, im = re.re, re.im
        elif isinstance(re, str):
            parsed = parse_scalar(re)
            re, im = parsed.re, parsed.im + _frac(im)
        self.re = _frac(re)
        self.im = _frac(im)
        self._hash = None

    @classmethod
    def coerce(cls, x) -> GaussianRational:
        return x if isinstance(x, GaussianRational) else cls(x)

    def __repr__(self):
        return f"GaussianRational({format_scalar(self)!r})"

    def __str__(self):
        return format_scalar(self)

    def __eq__(self, other):
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.re, self.im))
        return self._hash

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __add__(self, other):
        if isinstance(other, GaussianRational):
            return GaussianRational(self.re + other.re, self.im + other.im)
        if isinstance(other, (int, Fraction)):
            return GaussianRational(self.re + other, self.im)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        if isinstance(other, GaussianRational):
            return GaussianRational(self.re - other.re, self.im - other.im)
        if isinstance(other, (int, Fraction)):
            return GaussianRational(self.re - other, self.im)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, GaussianRational):
            a, b, c, d = self.re, self.im, other.re, other.im
            if not b and not d:
                return GaussianRational(a * c, 0)
            return GaussianRational(a * c - b * d, a * d + b * c)
        if isinstance(other, (int, Fraction)):
            return GaussianRational(self.re * other, self.im * other)
        return NotImplemented

    __rmul__ = __mul__

    def conjugate(self) -> GaussianRational:
        return GaussianRational(self.re, -self.im)

    def norm2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def inverse(self) -> GaussianRational:
        n = self.norm2()
        if not n:
            raise ZeroDivisionError("GaussianRational division by zero")
        return GaussianRational(self.re / n, -self.im / n)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return GaussianRational(self.re / other, self.im / other)
        return self * GaussianRational.coerce(other).inverse()

    def __rtruediv__(self, other):
        return GaussianRational.coerce(other) * self.inverse()

    def sort_key(self) -> tuple[Fraction, Fraction]:
        return (self.re, self.im)

    def as_rational(self) -> Fraction:
        if self.im:
            raise ValueError(f"{self} is not real")
        return self.re


ZERO = GaussianRational(0)
ONE = GaussianRational(1)

_RAT = r"-?\d+(?:/\d+)?"
_SCALAR_RE = re.compile(
    rf"^\s*(?:(?P<re>{_RAT})(?:\s*(?P<sign>[+-])\s*(?P<im>\d+(?:/\d+)?)?\s*i)?"
    rf"|(?P<pure>-?(?:\d+(?:/\d+)?)?)\s*i)\s*$"
)


def _parse_rat(text: str) -> Fraction:
    if "/" in text:
        num, den = text.split("/")
        if int(den) <= 0:
            raise ValueError(f"denominator must be positive in {text!r}")
        return Fraction(int(num), int(den))
    return Fraction(int(text))


def parse_scalar(text: str) -> GaussianRational:
    """Parse ``RAT`` or ``RAT (+|-) RAT i`` (also ``i``, ``-i``, ``3/4i``)."""
    if not isinstance(text, str):
        if isinstance(text, bool) or not isinstance(text, (int, Fraction)):
            raise ValueError(f"scalar must be a string, got {text!r}")
        return GaussianRational(text)
    m = _SCALAR_RE.match(text)
    if not m:
        raise ValueError(f"malformed scalar {text!r}")
    if m.group("re") is not None:
        re_part = _parse_rat(m.group("re"))
        if m.group("sign") is None:
            return GaussianRational(re_part)
        im_text = m.group("im") or "1"
        im_part = _parse_rat(im_text)
        return GaussianRational(re_part, im_part if m.group("sign") == "+" else -im_part)
    pure = m.group("pure")
    if pure in ("", "-"):
        pure += "1"
    return GaussianRational(0, _parse_rat(pure))


def _format_rat(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_scalar(z) -> str:
    """Canonical text: lowest terms, positive denominator, ``a+bi`` form."""
    z = GaussianRational.coerce(z)
    if not z.im:
        return _format_rat(z.re)
    sign = "+" if z.im > 0 else "-"
    return f"{_format_rat(z.re)}{sign}{_format_rat(abs(z.im))}i"


class QMatrix:
    """Immutable square matrix over Q(i)."""

    __slots__ = ("rows", "__dict__")

    def __init__(self, rows: Iterable[Iterable]):
        rows = tuple(tuple(GaussianRational.coerce(x) for x in r) for r in rows)
        n = len(rows)
        if n == 0 or any(len(r) != n for r in rows):
            raise LinalgError("QMatrix must be square and non-empty")
        self.rows = rows

    @classmethod
    def _raw(cls, rows):
        obj = object.__new__(cls)
        obj.rows = rows
        return obj

    @property
    def dim(self) -> int:
        return len(self.rows)

    @classmethod
    def identity(cls, n: int) -> QMatrix:
        return cls._raw(tuple(tuple(ONE if i == j else ZERO for j in range(n)) for i in range(n)))

    @classmethod
    def zero(cls, n: int) -> QMatrix:
        return cls._raw(tuple((ZERO,) * n for _ in range(n)))

    @classmethod
    def diag(cls, values: Sequence) -> QMatrix:
        n = len(values)
        return cls([[values[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def outer(cls, u: Sequence, v: Sequence | None = None) -> QMatrix:
        """``u v*`` for column vectors u, v (v defaults to u)."""
        u = [GaussianRational.coerce(x) for x in u]
        v = u if v is None else [GaussianRational.coerce(x) for x in v]
        return cls._raw(tuple(tuple(a * b.conjugate() for b in v) for a in u))

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        if not isinstance(other, QMatrix):
            return NotImplemented
        return self.rows == other.rows

    def __hash__(self):
        return self._hash

    @cached_property
    def _hash(self):
        return hash(self.rows)

    def __repr__(self):
        body = "; ".join(" ".join(format_scalar(x) for x in r) for r in self.rows)
        return f"{type(self).__name__}([{body}])"

    def to_strings(self) -> list[list[str]]:
        return [[format_scalar(x) for x in r] for r in self.rows]

    @cached_property
    def sort_key(self) -> tuple:
        """Canonical total order: dim, then entries row-major by (re, im)."""
        return (self.dim,) + tuple(x.sort_key() for r in self.rows for x in r)

    def _check_dim(self, other: QMatrix):
        if self.dim != other.dim:
            raise LinalgError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other: QMatrix) -> QMatrix:
        self._check_dim(other)
        return QMatrix._raw(tuple(tuple(a + b for a, b in zip(r, s))
                                  for r, s in zip(self.rows, other.rows)))

    def __sub__(self, other: QMatrix) -> QMatrix:
        self._check_dim(other)
        return QMatrix._raw(tuple(tuple(a - b for a, b in zip(r, s))
                                  for r, s in zip(self.rows, other.rows)))

    def __neg__(self) -> QMatrix:
        return QMatrix._raw(tuple(tuple(-a for a in r) for r in self.rows))

    def scale(self, c) -> QMatrix:
        c = GaussianRational.coerce(c)
        return QMatrix._raw(tuple(tuple(c * a for a in r) for r in self.rows))

    def __matmul__(self, other: QMatrix) -> QMatrix:
        self._check_dim(other)
        return _product(QMatrix._raw(self.rows), QMatrix._raw(other.rows))

    def _matmul(self, other: QMatrix) -> QMatrix:
        cols = list(zip(*other.rows))
        out = []
        for r in self.rows:
            row = []
            for col in cols:
                acc = ZERO
                for a, b in zip(r, col):
                    if a and b:
                        acc = acc + a * b
                row.append(acc)
            out.append(tuple(row))
        return QMatrix._raw(tuple(out))

    def adjoint(self) -> QMatrix:
        return QMatrix._raw(tuple(tuple(self.rows[j][i].conjugate() for j in range(self.dim))
                                  for i in range(self.dim)))

    def trace(self) -> GaussianRational:
        acc = ZERO
        for i in range(self.dim):
            acc = acc + self.rows[i][i]
        return acc

    def is_zero(self) -> bool:
        return not any(x for r in self.rows for x in r)

    def is_self_adjoint(self) -> bool:
        return self == self.adjoint()

    def is_projection(self) -> bool:
        return self.is_self_adjoint() and self @ self == self

    def rank(self) -> int:
        return len(_row_reduce([list(r) for r in self.rows])[1])

    def nullspace(self) -> list[list[GaussianRational]]:
        """Basis of {x : M x = 0}, exact."""
        n = self.dim
        rref, pivots = _row_reduce([list(r) for r in self.rows])
        free = [c for c in range(n) if c not in pivots]
        basis = []
        for f in free:
            v = [ZERO] * n
            v[f] = ONE
            for row_idx, pc in enumerate(pivots):
                v[pc] = -rref[row_idx][f]
            basis.append(v)
        return basis

    def minor_det(self, idx: Sequence[int]) -> GaussianRational:
        return _det([[self.rows[i][j] for j in idx] for i in idx])

    def as_projection(self) -> Projection:
        return Projection(self.rows)


@lru_cache(maxsize=1 << 16)
def _product(a: QMatrix, b: QMatrix) -> QMatrix:
    # closure and family tables multiply the same atom pairs many times over
    return a._matmul(b)


def _row_reduce(m: list[list[GaussianRational]]):
    """Reduced row echelon form in place; returns (rows, pivot columns)."""
    n_rows = len(m)
    n_cols = len(m[0]) if m else 0
    pivots: list[int] = []
    r = 0
    for c in range(n_cols):
        if r == n_rows:
            break
        piv = next((i for i in range(r, n_rows) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = m[r][c].inverse()
        m[r] = [x * inv for x in m[r]]
        for i in range(n_rows):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return m[:len(pivots)], pivots


def _det(m: list[list[GaussianRational]]) -> GaussianRational:
    m = [list(r) for r in m]
    n = len(m)
    det = ONE
    for c in range(n):
        piv = next((i for i in range(c, n) if m[i][c]), None)
        if piv is None:
            return ZERO
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det = det * m[c][c]
        inv = m[c][c].inverse()
        for i in range(c + 1, n):
            if m[i][c]:
                f = m[i][c] * inv
                m[i] = [a - f * b for a, b in zip(m[i], m[c])]
    return det


def _inverse(m: list[list[GaussianRational]]) -> list[list[GaussianRational]]:
    n = len(m)
    aug = [list(r) + [ONE if i == j else ZERO for j in range(n)] for i, r in enumerate(m)]
    rref, pivots = _row_reduce(aug)
    if pivots[:n] != list(range(n)):
        raise LinalgError("singular matrix")
    return [row[n:] for row in rref]


class Projection(QMatrix):
    """Self-adjoint idempotent matrix; checked on construction."""

    __slots__ = ()

    def __init__(self, rows):
        super().__init__(rows)
        if not QMatrix.is_projection(self):
            raise LinalgError(f"not a projection (P^2 != P or P* != P): {QMatrix.__repr__(self)}")

    @classmethod
    def of(cls, m: QMatrix) -> Projection:
        if isinstance(m, Projection):
            return m
        return cls(m.rows)

    @classmethod
    def _trusted(cls, m: QMatrix) -> Projection:
        return cls._raw(m.rows)

    @classmethod
    def identity(cls, n):
        return cls._raw(QMatrix.identity(n).rows)

    @classmethod
    def zero(cls, n):
        return cls._raw(QMatrix.zero(n).rows)

    def complement(self) -> Projection:
        return Projection._trusted(QMatrix.identity(self.dim) - self)


class DensityOperator(QMatrix):
    """Positive semidefinite, self-adjoint, trace-one matrix.

    Positivity is tested exactly via all principal minors (Sylvester's
    criterion for semidefiniteness), which is fine for dim <= 8.
    """

    __slots__ = ()

    def __init__(self, rows):
        super().__init__(rows)
        if not self.is_self_adjoint():
            raise LinalgError("density operator must be self-adjoint")
        if self.trace() != 1:
            raise LinalgError(f"density operator must have trace 1, got {self.trace()}")
        from itertools import combinations
        for k in range(1, self.dim + 1):
            for idx in combinations(range(self.dim), k):
                if self.minor_det(idx).re < 0:
                    raise LinalgError(f"density operator is not positive (principal minor {idx} < 0)")

    @classmethod
    def maximally_mixed(cls, n: int) -> DensityOperator:
        return cls(QMatrix.diag([Fraction(1, n)] * n).rows)

    @classmethod
    def pure(cls, vector: Sequence) -> DensityOperator:
        v = [GaussianRational.coerce(x) for x in vector]
        n2 = sum((x.norm2() for x in v), Fraction(0))
        return cls(QMatrix.outer(v).scale(Fraction(1) / n2).rows)

    def expectation(self, p: QMatrix) -> Fraction:
        """``Tr(rho P)``; real for self-adjoint P."""
        return (self @ p).trace().as_rational()

    def is_faithful(self) -> bool:
        return self.rank() == self.dim


def project_onto_span(vectors: Sequence[Sequence], dim: int | None = None) -> Projection:
    """Orthogonal projection onto the span of the given column vectors."""
    vecs = [[GaussianRational.coerce(x) for x in v] for v in vectors]
    if not vecs:
        if dim is None:
            raise ValueError("dim is required for an empty span")
        return Projection.zero(dim)
    n = len(vecs[0])
    if dim is not None and dim != n:
        raise LinalgError(f"vectors have length {n}, expected {dim}")
    # maximal independent subset: pivot rows of the row-reduced stack
    basis = []
    for v in vecs:
        trial = basis + [v]
        if len(_row_reduce([list(x) for x in trial])[1]) == len(trial):
            basis.append(v)
    if not basis:
        return Projection.zero(n)
    k = len(basis)
    # B is n x k; gram = B* B (k x k)
    gram = [[sum((basis[a][t].conjugate() * basis[b][t] for t in range(n)), ZERO)
             for b in range(k)] for a in range(k)]
    ginv = _inverse(gram)
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = ZERO
            for a in range(k):
                for b in range(k):
                    acc = acc + basis[a][i] * ginv[a][b] * basis[b][j].conjugate()
            row.append(acc)
        rows.append(row)
    return Projection(rows)


def proj_meet(p1: QMatrix, p2: QMatrix) -> Projection:
    """Projection onto range(p1) ∩ range(p2)."""
    one = QMatrix.identity(p1.dim)
    kernel = ((one - p1) + (one - p2)).nullspace()
    return project_onto_span(kernel, p1.dim)


def proj_join(p1: QMatrix, p2: QMatrix) -> Projection:
    """Projection onto range(p1) + range(p2), by De Morgan."""
    one = QMatrix.identity(p1.dim)
    return Projection._trusted(one - proj_meet(one - p1, one - p2))


def proj_leq(p1: QMatrix, p2: QMatrix) -> bool:
    return p1 @ p2 == p1


def commutes(a: QMatrix, b: QMatrix) -> bool:
    return a @ b == b @ a


def kron(a: QMatrix, b: QMatrix) -> QMatrix:
    n, m = a.dim, b.dim
    rows = []
    for i in range(n):
        for k in range(m):
            rows.append(tuple(a.rows[i][j] * b.rows[k][l] for j in range(n) for l in range(m)))
    out = QMatrix._raw(tuple(rows))
    if isinstance(a, Projection) and isinstance(b, Projection):
        return Projection._trusted(out)
    return out


PAULI = (
    QMatrix([[0, 1], [1, 0]]),
    QMatrix([[0, GaussianRational(0, -1)], [GaussianRational(0, 1), 0]]),
    QMatrix([[1, 0], [0, -1]]),
)


def qubit_spin_projection(n: Sequence, sign: int = 1) -> Projection:
    """``(1 + sign * n.sigma) / 2`` for a rational unit vector n."""
    n = [_frac(x) for x in n]
    if len(n) != 3 or sum(x * x for x in n) != 1:
        raise LinalgError(f"direction must be a rational unit 3-vector, got {n}")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    m = QMatrix.identity(2)
    for c, s in zip(n, PAULI):
        m = m + s.scale(c * sign)
    return Projection(m.scale(Fraction(1, 2)).rows)
