"""Abelian projection algebras as atomic decompositions, and finite closed
families of them.

A :class:`Context` stores the atoms of a commutative algebra in canonical
matrix order; every element of its Boolean lattice is a subset of atoms,
so lattice elements are handled as bitmasks over ``context.atoms``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from .linalg import Projection, QMatrix, commutes

__all__ = [
    "Context",
    "ContextFamily",
    "Observable",
    "ContextError",
    "make_context",
    "includes",
    "intersect",
    "lattice_elements",
    "smallest_above",
    "close_family",
    "spectral_event",
    "trivial_context",
    "masks_of",
]

MAX_LATTICE_ATOMS = 20


class ContextError(ValueError):
    pass


def _bits(mask: int):
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


def masks_of(mask: int) -> list[int]:
    return list(_bits(mask))


@dataclass(frozen=True)
class Context:
    """Atomic decomposition of an Abelian algebra: pairwise orthogonal
    nonzero projections summing to the identity."""

    atoms: tuple[Projection, ...]
    name: str | None = field(default=None, compare=False)

    def __post_init__(self):
        if not self.atoms:
            raise ContextError("a context needs at least one atom")
        atoms = tuple(sorted((Projection.of(a) for a in self.atoms), key=lambda a: a.sort_key))
        object.__setattr__(self, "atoms", atoms)
        n = atoms[0].dim
        total = QMatrix.zero(n)
        for i, a in enumerate(atoms):
            if a.dim != n:
                raise ContextError("atoms have different dimensions")
            if a.is_zero():
                raise ContextError("atoms must be nonzero")
            for b in atoms[i + 1:]:
                if not (a @ b).is_zero():
                    raise ContextError(f"atoms are not orthogonal: {a!r}, {b!r}")
            total = total + a
        if total != QMatrix.identity(n):
            raise ContextError("atoms do not sum to the identity")

    @property
    def dim(self) -> int:
        """Dimension of the ambient Hilbert space."""
        return self.atoms[0].dim

    @property
    def d(self) -> int:
        """Number of atoms (1 iff this is the trivial algebra)."""
        return len(self.atoms)

    @property
    def full_mask(self) -> int:
        return (1 << self.d) - 1

    @cached_property
    def sort_key(self) -> tuple:
        return (self.d,) + tuple(a.sort_key for a in self.atoms)

    def label(self) -> str:
        return self.name if self.name is not None else f"<d={self.d}>"

    def __repr__(self):
        return f"Context({self.label()})"

    def projection(self, mask: int) -> Projection:
        """Sum of the atoms selected by ``mask``."""
        if mask < 0 or mask > self.full_mask:
            raise ValueError(f"mask {mask} out of range for {self!r}")
        acc = QMatrix.zero(self.dim)
        for i in _bits(mask):
            acc = acc + self.atoms[i]
        return Projection._trusted(acc)

    def mask_of(self, p: QMatrix) -> int:
        """Inverse of :meth:`projection`; raises if ``p`` is not in L(self)."""
        mask = 0
        for i, a in enumerate(self.atoms):
            if not (a @ p).is_zero():
                mask |= 1 << i
        if self.projection(mask) != p:
            raise ContextError(f"{p!r} is not an element of L({self.label()})")
        return mask

    def contains(self, p: QMatrix) -> bool:
        try:
            self.mask_of(p)
        except ContextError:
            return False
        return True

    def commutes_with(self, other: Context) -> bool:
        return all(commutes(a, b) for a in self.atoms for b in other.atoms)


def trivial_context(dim: int, name: str | None = "C1") -> Context:
    return Context((Projection.identity(dim),), name=name)


def make_context(projections: Iterable[QMatrix], dim: int | None = None,
                 name: str | None = None) -> Context:
    """Atoms of the algebra generated by pairwise commuting projections."""
    projections = [Projection.of(p) for p in projections]
    if not projections:
        if dim is None:
            raise ValueError("dim is required for an empty generating set")
        return trivial_context(dim, name=name)
    n = projections[0].dim
    for i, p in enumerate(projections):
        for q in projections[i + 1:]:
            if not commutes(p, q):
                raise ContextError(f"non-commuting generators: {p!r}, {q!r}")
    one = QMatrix.identity(n)
    atoms: list[QMatrix] = [one]
    for p in projections:
        comp = one - p
        refined = []
        for a in atoms:
            for part in (a @ p, a @ comp):
                if not part.is_zero():
                    refined.append(part)
        atoms = refined
    return Context(tuple(Projection._trusted(a) for a in atoms), name=name)


def includes(a1: Context, a2: Context) -> bool:
    """True iff a1 ⊇ a2 as algebras: every atom of a2 is a sum of a1-atoms."""
    return all(a1.contains(r) for r in a2.atoms)


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def intersect(a1: Context, a2: Context, name: str | None = None) -> Context:
    """Atoms of a1 ∩ a2 via connected components of the overlap graph.

    Atom Q of a1 and atom R of a2 are joined when QR != 0; each component
    contributes the sum of its a1-atoms.
    """
    n1 = a1.d
    uf = _UnionFind(n1 + a2.d)
    for i, q in enumerate(a1.atoms):
        for j, r in enumerate(a2.atoms):
            if not (q @ r).is_zero():
                uf.union(i, n1 + j)
    groups: dict[int, QMatrix] = {}
    for i, q in enumerate(a1.atoms):
        root = uf.find(i)
        groups[root] = groups[root] + q if root in groups else q
    return Context(tuple(Projection._trusted(g) for g in groups.values()), name=name)


def lattice_elements(a: Context) -> list[Projection]:
    """All 2^d subset-sums of atoms in canonical matrix order."""
    if a.d > MAX_LATTICE_ATOMS:
        raise ContextError(f"context has {a.d} atoms; lattice enumeration is capped at {MAX_LATTICE_ATOMS}")
    return sorted((a.projection(m) for m in range(1 << a.d)), key=lambda p: p.sort_key)


def smallest_above(a: Context, r: QMatrix) -> Projection:
    """Least element of L(a) dominating r: the atoms Q with QR != 0."""
    acc = QMatrix.zero(a.dim)
    for q in a.atoms:
        if not (q @ r).is_zero():
            acc = acc + q
    return Projection._trusted(acc)


@dataclass(frozen=True)
class Observable:
    """A pre-diagonalised observable: eigenvalue-labelled atoms."""

    spectrum: tuple[tuple[Fraction, Projection], ...]

    def __post_init__(self):
        spectrum = tuple((Fraction(v), Projection.of(p)) for v, p in self.spectrum)
        values = [v for v, _ in spectrum]
        if len(set(values)) != len(values):
            raise ContextError("eigenvalues must be pairwise distinct")
        object.__setattr__(self, "spectrum", spectrum)
        self.context  # validates the atoms

    @cached_property
    def context(self) -> Context:
        return Context(tuple(p for _, p in self.spectrum))

    @classmethod
    def from_pairs(cls, pairs: Sequence[tuple]) -> Observable:
        return cls(tuple((Fraction(v), p) for v, p in pairs))


def spectral_event(obs: Observable, delta: Iterable) -> Projection:
    """Sum of atoms whose eigenvalue lies in delta (zero if none do)."""
    delta = {Fraction(x) for x in delta}
    dim = obs.spectrum[0][1].dim
    acc = QMatrix.zero(dim)
    for v, p in obs.spectrum:
        if v in delta:
            acc = acc + p
    return Projection._trusted(acc)


class ContextFamily:
    """A finite family of contexts closed under intersection and under the
    generated algebra of commuting pairs, always containing the trivial
    context.

    Index tables computed once at construction:

    - ``incl[i][j]``: contexts[i] ⊇ contexts[j]
    - ``refine[i][j]``: for incl[i][j], the contexts[i]-mask of each atom of contexts[j]
    - ``cap[i][j]``: index of contexts[i] ∩ contexts[j]
    - ``alg[i][j]``: index of the generated algebra, or None if they do not commute
    """

    def __init__(self, contexts: Iterable[Context]):
        unique: dict[Context, Context] = {}
        for c in contexts:
            unique.setdefault(c, c)
        ctxs = sorted(unique.values(), key=lambda c: c.sort_key)
        if not ctxs:
            raise ContextError("empty context family")
        self.dim = ctxs[0].dim
        if any(c.dim != self.dim for c in ctxs):
            raise ContextError("contexts live in different dimensions")
        trivial = trivial_context(self.dim)
        if ctxs[0] != trivial:
            raise ContextError("family must contain the trivial context C1")
        self.contexts: tuple[Context, ...] = tuple(ctxs)
        self.index: dict[Context, int] = {c: i for i, c in enumerate(ctxs)}
        n = len(ctxs)
        self.incl = [[False] * n for _ in range(n)]
        self.refine: list[list[tuple[int, ...] | None]] = [[None] * n for _ in range(n)]
        for i, a in enumerate(ctxs):
            for j, b in enumerate(ctxs):
                try:
                    masks = tuple(a.mask_of(r) for r in b.atoms)
                except ContextError:
                    continue
                self.incl[i][j] = True
                self.refine[i][j] = masks
        self.cap = [[0] * n for _ in range(n)]
        self.alg: list[list[int | None]] = [[None] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                c = intersect(ctxs[i], ctxs[j])
                if c not in self.index:
                    raise ContextError(f"family not closed: {ctxs[i].label()} ∩ {ctxs[j].label()} missing")
                self.cap[i][j] = self.cap[j][i] = self.index[c]
                if ctxs[i].commutes_with(ctxs[j]):
                    g = make_context(ctxs[i].atoms + ctxs[j].atoms)
                    if g not in self.index:
                        raise ContextError(
                            f"family not closed: algebra generated by {ctxs[i].label()}, {ctxs[j].label()} missing")
                    self.alg[i][j] = self.alg[j][i] = self.index[g]
        self.names = {c.label(): i for i, c in enumerate(ctxs)}

    def __len__(self):
        return len(self.contexts)

    def __iter__(self):
        return iter(self.contexts)

    def __repr__(self):
        return f"ContextFamily([{', '.join(c.label() for c in self.contexts)}])"

    def __eq__(self, other):
        return isinstance(other, ContextFamily) and self.contexts == other.contexts

    def __hash__(self):
        return hash(self.contexts)

    def lookup(self, key) -> int:
        """Index of a context given as Context, name or index."""
        if isinstance(key, int):
            return key
        if isinstance(key, Context):
            return self.index[key]
        return self.names[key]

    def context(self, key) -> Context:
        return self.contexts[self.lookup(key)]

    def translate(self, fine: int, coarse: int, mask: int) -> int:
        """Rewrite an element of L(coarse) as a mask over the atoms of ``fine``."""
        table = self.refine[fine][coarse]
        if table is None:
            raise ContextError(f"{self.contexts[fine].label()} does not include {self.contexts[coarse].label()}")
        out = 0
        for k in _bits(mask):
            out |= table[k]
        return out

    @cached_property
    def maximal(self) -> tuple[int, ...]:
        n = len(self)
        return tuple(i for i in range(n)
                     if not any(self.incl[j][i] and j != i for j in range(n)))


def close_family(seed: Iterable[Context], limit: int = 256) -> ContextFamily:
    """Least family containing the seed and C1, closed under ∩ and under the
    generated algebra of commuting pairs.  New contexts get derived names."""
    seed = list(seed)
    if not seed:
        raise ContextError("close_family needs at least one context")
    dim = seed[0].dim
    found: dict[Context, Context] = {}

    def add(c: Context, name: str | None):
        if c in found:
            return False
        if len(found) >= limit:
            raise ContextError(f"closure exceeds the configured bound of {limit} contexts")
        found[c] = Context(c.atoms, name=c.name if c.name is not None else name)
        return True

    add(trivial_context(dim), "C1")
    for k, c in enumerate(seed):
        if c.dim != dim:
            raise ContextError("seed contexts live in different dimensions")
        add(c, c.name or f"seed{k}")
    done: set = set()
    changed = True
    while changed:
        changed = False
        current = sorted(found.values(), key=lambda c: c.sort_key)
        for i, a in enumerate(current):
            for b in current[i + 1:]:
                if (a, b) in done:
                    continue
                done.add((a, b))
                if add(intersect(a, b), f"cap({a.label()},{b.label()})"):
                    changed = True
                if a.commutes_with(b):
                    g = make_context(a.atoms + b.atoms)
                    if add(g, f"alg({a.label()},{b.label()})"):
                        changed = True
    return ContextFamily(found.values())

