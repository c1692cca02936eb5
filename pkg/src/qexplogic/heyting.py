"""The distributive lattice of monotone context-indexed projection
assignments, with its Heyting implication and negation.

A :class:`Section` stores one atom-bitmask per context of the family (in
family order).  Monotone means: if A1 ⊆ A2 then S(A1) <= S(A2).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

from .contexts import ContextError, ContextFamily
from .linalg import Projection
from .slattice import SqmElement, SLattice, sqm_join

__all__ = [
    "Section",
    "top",
    "bottom",
    "lqm_meet",
    "lqm_join",
    "lqm_leq",
    "embed_i",
    "decompose",
    "implies",
    "implies_bruteforce",
    "negate",
    "negate_closed_form",
    "enumerate_sections",
    "count_sections",
    "lem_audit",
    "LemReport",
    "format_section",
]

DEFAULT_SECTION_LIMIT = 100_000


@dataclass(frozen=True)
class Section:
    family: ContextFamily
    masks: tuple[int, ...]

    def __post_init__(self):
        fam = self.family
        if len(self.masks) != len(fam):
            raise ValueError("one mask per context is required")
        for i, m in enumerate(self.masks):
            if not 0 <= m <= fam.contexts[i].full_mask:
                raise ContextError(f"mask {m} out of range for {fam.contexts[i].label()}")
        for fine in range(len(fam)):
            for coarse in range(len(fam)):
                if fine != coarse and fam.incl[fine][coarse]:
                    lifted = fam.translate(fine, coarse, self.masks[coarse])
                    if lifted & ~self.masks[fine]:
                        raise ContextError(
                            f"not monotone: value at {fam.contexts[coarse].label()} exceeds "
                            f"value at {fam.contexts[fine].label()}")

    def __getitem__(self, key) -> Projection:
        i = self.family.lookup(key)
        return self.family.contexts[i].projection(self.masks[i])

    def __le__(self, other: Section) -> bool:
        return lqm_leq(self, other)

    def __and__(self, other):
        return lqm_meet(self, other)

    def __or__(self, other):
        return lqm_join(self, other)

    def is_top(self) -> bool:
        return all(m == c.full_mask for m, c in zip(self.masks, self.family.contexts))

    def is_bottom(self) -> bool:
        return not any(self.masks)

    def __str__(self):
        return "{" + ", ".join(f"{c.label()}:{m:0{c.d}b}"
                               for c, m in zip(self.family.contexts, self.masks)) + "}"


def _unchecked(family, masks) -> Section:
    s = object.__new__(Section)
    object.__setattr__(s, "family", family)
    object.__setattr__(s, "masks", tuple(masks))
    return s


def top(family: ContextFamily) -> Section:
    return _unchecked(family, (c.full_mask for c in family.contexts))


def bottom(family: ContextFamily) -> Section:
    return _unchecked(family, (0,) * len(family))


def _same(s1: Section, s2: Section):
    if s1.family is not s2.family and s1.family != s2.family:
        raise ValueError("sections over different families")


def lqm_leq(s1: Section, s2: Section) -> bool:
    _same(s1, s2)
    return all(a & ~b == 0 for a, b in zip(s1.masks, s2.masks))


def lqm_meet(s1: Section, s2: Section) -> Section:
    _same(s1, s2)
    return _unchecked(s1.family, (a & b for a, b in zip(s1.masks, s2.masks)))


def lqm_join(s1: Section, s2: Section) -> Section:
    _same(s1, s2)
    return _unchecked(s1.family, (a | b for a, b in zip(s1.masks, s2.masks)))


def join_all(family: ContextFamily, sections: Iterable[Section]) -> Section:
    return reduce(lqm_join, sections, bottom(family))


def meet_all(family: ContextFamily, sections: Iterable[Section]) -> Section:
    return reduce(lqm_meet, sections, top(family))


def embed_i(a: SqmElement, family: ContextFamily) -> Section:
    """S(A') = P if A' ⊇ A, else 0."""
    if a.is_bottom:
        return bottom(family)
    j = family.index[a.context]
    return _unchecked(family, (family.translate(i, j, a.mask) if family.incl[i][j] else 0
                               for i in range(len(family))))


def decompose(s: Section) -> list[SqmElement]:
    """The experimental propositions (A, S(A)) with S(A) != 0; their
    embeddings join back to s."""
    return [SqmElement(c, m) for c, m in zip(s.family.contexts, s.masks) if m]


def implies(s1: Section, s2: Section) -> Section:
    """Relative pseudo-complement.

    At context A keep each atom q whose image q ∧ S1(A') stays below S2(A')
    for every A' ⊇ A in the family.
    """
    _same(s1, s2)
    fam = s1.family
    n = len(fam)
    out = []
    for i, ctx in enumerate(fam.contexts):
        keep = 0
        for t in range(ctx.d):
            ok = True
            for k in range(n):
                if fam.incl[k][i]:
                    q = fam.translate(k, i, 1 << t)
                    if q & s1.masks[k] & ~s2.masks[k]:
                        ok = False
                        break
            if ok:
                keep |= 1 << t
        out.append(keep)
    return _unchecked(fam, out)


def implies_bruteforce(s1: Section, s2: Section, sections: Sequence[Section]) -> Section:
    """Join of every enumerated S with S ∧ S1 <= S2 (the defining formula)."""
    fam = s1.family
    return join_all(fam, (s for s in sections if lqm_leq(lqm_meet(s, s1), s2)))


def negate(s: Section) -> Section:
    return implies(s, bottom(s.family))


def negate_closed_form(a: SqmElement, family: ContextFamily) -> Section:
    """¬i(A, P) as the join of i(A', P') over all (A', P') whose context does
    not commute with A or whose projection is orthogonal to P."""
    if a.is_bottom:
        return top(family)
    j = family.index[a.context]
    parts = []
    for i, ctx in enumerate(family.contexts):
        if family.alg[i][j] is None:
            parts.append(embed_i(SqmElement(ctx, ctx.full_mask), family))
            continue
        g = family.alg[i][j]
        p_in_g = family.translate(g, j, a.mask)
        # largest P' in L(A') with P' ∧ P = 0: atoms of A' disjoint from P inside Alg(A', A)
        keep = 0
        for t in range(ctx.d):
            if not family.translate(g, i, 1 << t) & p_in_g:
                keep |= 1 << t
        if keep:
            parts.append(embed_i(SqmElement(ctx, keep), family))
    return join_all(family, parts)


def count_sections(family: ContextFamily) -> int:
    """Number of monotone sections, by dynamic backtracking without storing them."""
    return sum(1 for _ in _iter_sections(family))


def _iter_sections(family: ContextFamily):
    n = len(family)
    # coarse contexts first so every constraint S(coarse) <= S(fine) is checked on assignment
    order = sorted(range(n), key=lambda i: (family.contexts[i].d, i))
    coarser = {i: [j for j in range(n) if j != i and family.incl[i][j]] for i in range(n)}
    masks = [0] * n

    def rec(pos):
        if pos == n:
            yield tuple(masks)
            return
        i = order[pos]
        need = 0
        for j in coarser[i]:
            need |= family.translate(i, j, masks[j])
        full = family.contexts[i].full_mask
        free = full & ~need
        sub = free
        while True:
            masks[i] = need | sub
            yield from rec(pos + 1)
            if sub == 0:
                break
            sub = (sub - 1) & free
        masks[i] = 0

    yield from rec(0)


def enumerate_sections(family: ContextFamily, limit: int = DEFAULT_SECTION_LIMIT) -> list[Section]:
    """All monotone sections, sorted by their mask tuples."""
    out = []
    for masks in _iter_sections(family):
        out.append(masks)
        if len(out) > limit:
            raise ContextError(f"more than {limit} sections; enumeration bound exceeded")
    out.sort()
    return [_unchecked(family, m) for m in out]


@dataclass
class LemReport:
    sections: int
    lem_holders: list[Section]
    top_or_negtop: list[Section]
    characterization_ok: bool
    top_iff_trivial_ok: bool

    @property
    def only_top_and_bottom(self) -> bool:
        return all(s.is_top() or s.is_bottom() for s in self.lem_holders)

    @property
    def ok(self) -> bool:
        return self.characterization_ok and self.top_iff_trivial_ok


def lem_audit(family: ContextFamily, limit: int = DEFAULT_SECTION_LIMIT) -> LemReport:
    secs = enumerate_sections(family, limit)
    t = top(family)
    holders, charac = [], []
    trivial_ok = True
    for s in secs:
        ns = negate(s)
        if lqm_join(s, ns) == t:
            holders.append(s)
        if s == t or ns == t:
            charac.append(s)
        # the trivial context sits at index 0
        if (s.masks[0] == 1) != s.is_top():
            trivial_ok = False
    return LemReport(len(secs), holders, charac, holders == charac, trivial_ok)


def format_section(s: Section, matrices: bool = False) -> str:
    lines = []
    for c, m in zip(s.family.contexts, s.masks):
        line = f"{c.label()}\t{m:0{c.d}b}"
        if matrices:
            rows = c.projection(m).to_strings()
            line += "\t" + "; ".join(" ".join(r) for r in rows)
        lines.append(line)
    return "\n".join(lines)


def s_join_embedding_gap(a: SqmElement, b: SqmElement, family: ContextFamily) -> tuple[Section, Section]:
    """(i(a) ∨ i(b), i(a ∨ b)) for comparing joins across the embedding."""
    return (lqm_join(embed_i(a, family), embed_i(b, family)),
            embed_i(sqm_join(a, b, family), family))


def all_elements(family: ContextFamily) -> list[SqmElement]:
    return SLattice(family).elements
