"""The lattice of experimental propositions over a finite context family.

An element is either bottom or a pair (context, nonzero element of the
context's Boolean lattice).  Order: (A1, P1) <= (A2, P2) iff A1 ⊇ A2 and
P1 <= P2.  The meet is only non-bottom for commuting contexts; the join
lives on the intersection algebra.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .contexts import Context, ContextError, ContextFamily
from .linalg import Projection, QMatrix

__all__ = [
    "SqmElement",
    "BOTTOM",
    "SLattice",
    "sqm_leq",
    "sqm_meet",
    "sqm_join",
    "distributivity_witness",
    "hasse_dot",
]


@dataclass(frozen=True)
class SqmElement:
    """``context is None`` encodes bottom.  ``mask`` selects atoms of the context."""

    context: Context | None
    mask: int = 0

    def __post_init__(self):
        if self.context is None:
            if self.mask:
                raise ValueError("bottom carries no projection")
        elif not 0 < self.mask <= self.context.full_mask:
            raise ContextError(f"mask {self.mask} is not a nonzero element of L({self.context.label()})")

    @classmethod
    def of(cls, context: Context, proj: QMatrix) -> SqmElement:
        """(context, proj); a zero projection is identified with bottom."""
        mask = context.mask_of(proj)
        return BOTTOM if mask == 0 else cls(context, mask)

    @property
    def is_bottom(self) -> bool:
        return self.context is None

    @property
    def proj(self) -> Projection:
        if self.context is None:
            raise ValueError("bottom has no projection")
        return self.context.projection(self.mask)

    def __str__(self):
        if self.context is None:
            return "⊥"
        return f"({self.context.label()},{self.mask:0{self.context.d}b})"


BOTTOM = SqmElement(None, 0)


def _check(family: ContextFamily, a: SqmElement) -> int:
    if a.context is None:
        return -1
    try:
        return family.index[a.context]
    except KeyError:
        raise ContextError(f"{a.context!r} is not in the family") from None


def sqm_leq(a: SqmElement, b: SqmElement, family: ContextFamily) -> bool:
    if a.is_bottom:
        return True
    if b.is_bottom:
        return False
    i, j = _check(family, a), _check(family, b)
    if not family.incl[i][j]:
        return False
    return family.translate(i, j, b.mask) & a.mask == a.mask


def sqm_meet(a: SqmElement, b: SqmElement, family: ContextFamily) -> SqmElement:
    if a.is_bottom or b.is_bottom:
        return BOTTOM
    i, j = _check(family, a), _check(family, b)
    g = family.alg[i][j]
    if g is None:
        return BOTTOM
    mask = family.translate(g, i, a.mask) & family.translate(g, j, b.mask)
    return SqmElement(family.contexts[g], mask) if mask else BOTTOM


def sqm_join(a: SqmElement, b: SqmElement, family: ContextFamily) -> SqmElement:
    if a.is_bottom:
        return b
    if b.is_bottom:
        return a
    i, j = _check(family, a), _check(family, b)
    k = family.cap[i][j]
    cap = family.contexts[k]
    mask = 0
    for t in range(cap.d):
        if family.translate(i, k, 1 << t) & a.mask or family.translate(j, k, 1 << t) & b.mask:
            mask |= 1 << t
    return SqmElement(cap, mask)


def _element_key(e: SqmElement):
    if e.context is None:
        return (0,)
    return (1, e.context.sort_key, -bin(e.mask).count("1"), e.proj.sort_key)


class SLattice:
    """All elements of S_QM over a family, with index-based order tables.

    Elements are ordered bottom first, then by context (canonical order),
    then within a context from the largest projection down.
    """

    def __init__(self, family: ContextFamily, limit: int = 5000):
        self.family = family
        size = 1 + sum((1 << c.d) - 1 for c in family.contexts)
        if size > limit:
            raise ContextError(f"S_QM has {size} elements, above the enumeration bound {limit}")
        elems = [BOTTOM]
        for c in family.contexts:
            elems.extend(SqmElement(c, m) for m in range(1, 1 << c.d))
        self.elements: list[SqmElement] = sorted(elems, key=_element_key)
        self.position = {e: k for k, e in enumerate(self.elements)}

    def __len__(self):
        return len(self.elements)

    def __iter__(self) -> Iterator[SqmElement]:
        return iter(self.elements)

    def leq(self, a, b):
        return sqm_leq(a, b, self.family)

    def meet(self, a, b):
        return sqm_meet(a, b, self.family)

    def join(self, a, b):
        return sqm_join(a, b, self.family)

    def order_matrix(self) -> list[list[bool]]:
        return [[self.leq(a, b) for b in self.elements] for a in self.elements]

    def top(self) -> SqmElement:
        return SqmElement(self.family.contexts[0], 1)

    def covers(self) -> list[tuple[int, int]]:
        """Covering pairs (i, j) with elements[i] < elements[j], by transitive reduction."""
        leq = self.order_matrix()
        n = len(self)
        out = []
        for i in range(n):
            ups = [j for j in range(n) if j != i and leq[i][j]]
            for j in ups:
                if not any(k != j and leq[k][j] for k in ups):
                    out.append((i, j))
        return out


def distributivity_witness(family: ContextFamily, limit: int = 400):
    """First (a, b, c) with a ∧ (b ∨ c) != (a ∧ b) ∨ (a ∧ c), or None.

    The search runs over joins b ∨ c (b before c in element order) and,
    innermost, over a; the triple is returned as (a, b, c).
    """
    lat = SLattice(family, limit=limit)
    els = lat.elements
    for bi, b in enumerate(els):
        for c in els[bi:]:
            bc = lat.join(b, c)
            for a in els:
                lhs = lat.meet(a, bc)
                rhs = lat.join(lat.meet(a, b), lat.meet(a, c))
                if lhs != rhs:
                    return a, b, c
    return None


def hasse_dot(family: ContextFamily, limit: int = 5000) -> str:
    lat = SLattice(family, limit=limit)
    lines = ["digraph S_QM {", "  rankdir=BT;", "  node [shape=box];"]
    for k, e in enumerate(lat.elements):
        lines.append(f'  n{k} [label="{e}"];')
    for i, j in lat.covers():
        lines.append(f"  n{i} -> n{j};")
    lines.append("}")
    return "\n".join(lines) + "\n"
