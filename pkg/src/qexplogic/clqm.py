"""Classical logic of exclusive measurement propositions.

The sample space is the list of exclusive atoms (A!, q): context A was
measured, nothing finer, with finest outcome q.  Events are subsets of it,
stored as bitmasks over :attr:`ExclusiveSpace.atoms`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator

from .contexts import Context, ContextFamily, Observable, spectral_event
from .heyting import Section, embed_i, enumerate_sections, lqm_join, negate
from .linalg import Projection
from .slattice import SLattice, SqmElement, sqm_join, sqm_leq, sqm_meet

__all__ = [
    "ExclusiveAtom",
    "StarAtom",
    "Event",
    "ExclusiveSpace",
    "exclusive_atoms",
    "c_map",
    "c_of_i",
    "m_bang_event",
    "lem_gap",
    "LemGap",
    "no_measurement_event",
    "NoMeasurement",
    "bruns_lakser_embed",
    "bruns_lakser_audit",
]


@dataclass(frozen=True)
class ExclusiveAtom:
    context: Context
    index: int

    @property
    def atom(self) -> Projection:
        return self.context.atoms[self.index]

    def __str__(self):
        return f"({self.context.label()}!,{1 << self.index:0{self.context.d}b})"


@dataclass(frozen=True)
class StarAtom:
    """Atom of a context that is maximal within the family."""

    context: Context
    index: int

    @property
    def atom(self) -> Projection:
        return self.context.atoms[self.index]

    def __str__(self):
        return f"({self.context.label()}*,{1 << self.index:0{self.context.d}b})"


@dataclass(frozen=True, order=True)
class Event:
    """A set of exclusive atoms, as a bitmask over a space of ``size`` atoms."""

    mask: int
    size: int = field(compare=True)

    def __post_init__(self):
        if self.mask < 0 or self.mask >> self.size:
            raise ValueError("event mask out of range")

    def _peer(self, other: Event):
        if self.size != other.size:
            raise ValueError("events over different spaces")

    def __and__(self, other: Event) -> Event:
        self._peer(other)
        return Event(self.mask & other.mask, self.size)

    def __or__(self, other: Event) -> Event:
        self._peer(other)
        return Event(self.mask | other.mask, self.size)

    def __sub__(self, other: Event) -> Event:
        self._peer(other)
        return Event(self.mask & ~other.mask, self.size)

    def complement(self) -> Event:
        return Event(((1 << self.size) - 1) & ~self.mask, self.size)

    def __contains__(self, k: int) -> bool:
        return bool(self.mask >> k & 1)

    def __iter__(self) -> Iterator[int]:
        m, k = self.mask, 0
        while m:
            if m & 1:
                yield k
            m >>= 1
            k += 1

    def __len__(self):
        return bin(self.mask).count("1")

    def __bool__(self):
        return bool(self.mask)

    def issubset(self, other: Event) -> bool:
        return self.mask & ~other.mask == 0

    def isdisjoint(self, other: Event) -> bool:
        return self.mask & other.mask == 0


class ExclusiveSpace:
    """The exclusive atoms of a family, in family order then atom order."""

    def __init__(self, family: ContextFamily):
        self.family = family
        self.atoms: tuple[ExclusiveAtom, ...] = tuple(
            ExclusiveAtom(c, k) for c in family.contexts for k in range(c.d))
        self.position = {a: n for n, a in enumerate(self.atoms)}
        self.offset = []
        n = 0
        for c in family.contexts:
            self.offset.append(n)
            n += c.d
        self.size = n
        self.context_of = tuple(family.index[a.context] for a in self.atoms)
        self.dim_of = tuple(a.context.d for a in self.atoms)

    def __len__(self):
        return self.size

    def event(self, members: Iterable) -> Event:
        mask = 0
        for m in members:
            if isinstance(m, ExclusiveAtom):
                m = self.position[m]
            elif isinstance(m, tuple):
                ctx, k = m
                m = self.offset[self.family.lookup(ctx)] + k
            mask |= 1 << m
        return Event(mask, self.size)

    def atom_event(self, context, index: int) -> Event:
        return self.event([(context, index)])

    @property
    def empty(self) -> Event:
        return Event(0, self.size)

    @property
    def full(self) -> Event:
        return Event((1 << self.size) - 1, self.size)

    def all_events(self) -> Iterator[Event]:
        for m in range(1 << self.size):
            yield Event(m, self.size)

    def restrict_to_context(self, i: int, mask: int) -> Event:
        """Exclusive atoms (A_i!, q) with q selected by mask."""
        return Event(mask << self.offset[i], self.size)

    def members_in_context(self, event: Event, i: int) -> int:
        """The atom mask of ``event`` restricted to context i."""
        return (event.mask >> self.offset[i]) & self.family.contexts[i].full_mask

    def describe(self, event: Event) -> list[tuple[str, int]]:
        """Sorted (context-name, atom-bitmask) pairs, one per context touched."""
        out = []
        for i, c in enumerate(self.family.contexts):
            m = self.members_in_context(event, i)
            if m:
                out.append((c.label(), m))
        return out

    def format(self, event: Event) -> str:
        parts = [f"({name}!,{m:0{self.family.context(name).d}b})" for name, m in self.describe(event)]
        return "{" + ", ".join(parts) + "}"

    def measured(self, key) -> Event:
        """F_A = c∘i(A, 1): some context containing A was measured."""
        j = self.family.lookup(key)
        ctx = self.family.contexts[j]
        return c_of_i(SqmElement(ctx, ctx.full_mask), self)

    def measured_exclusive(self, key) -> Event:
        """F!_A: exactly A was measured."""
        j = self.family.lookup(key)
        return self.restrict_to_context(j, self.family.contexts[j].full_mask)

    @cached_property
    def measurement_conditions(self) -> tuple[Event, ...]:
        return tuple(self.measured(i) for i in range(len(self.family)))


def exclusive_atoms(family: ContextFamily) -> list[ExclusiveAtom]:
    return list(ExclusiveSpace(family).atoms)


def c_map(s: Section, space: ExclusiveSpace) -> Event:
    """{(A!, q) : q <= S(A)}."""
    mask = 0
    for i, m in enumerate(s.masks):
        mask |= m << space.offset[i]
    return Event(mask, space.size)


def c_of_i(a: SqmElement, space: ExclusiveSpace) -> Event:
    return c_map(embed_i(a, space.family), space)


def m_bang_event(obs: Observable, delta: Iterable, space: ExclusiveSpace) -> Event:
    """{(A!, q) : q <= μ_A(Δ)} with A the context of the observable."""
    ctx = obs.context
    i = space.family.index[ctx]
    mask = ctx.mask_of(spectral_event(obs, delta))
    return space.restrict_to_context(i, mask)


@dataclass
class LemGap:
    element: SqmElement
    gap: Event
    described: Event
    alternative: Event

    @property
    def matches_described(self) -> bool:
        return self.gap == self.described

    @property
    def contains_described(self) -> bool:
        return self.described.issubset(self.gap)

    @property
    def extra(self) -> Event:
        return self.gap - self.described

    @property
    def matches_alternative(self) -> bool:
        return self.gap == self.alternative


def lem_gap(a: SqmElement, space: ExclusiveSpace) -> LemGap:
    """Complement of c(i(a) ∨ ¬i(a)), alongside two candidate descriptions:

    - ``described``: {(A'!, P') : A' ⊊ A, P' <= P}
    - ``alternative``: {(A'!, P') : A' commutes with A, A' ⊉ A, P' ∧ P != 0}
    """
    if a.is_bottom:
        raise ValueError("lem_gap needs a non-bottom element")
    fam = space.family
    s = embed_i(a, fam)
    gap = c_map(lqm_join(s, negate(s)), space).complement()
    j = fam.index[a.context]
    described = alternative = 0
    for n, ex in enumerate(space.atoms):
        i = space.context_of[n]
        bit = 1 << ex.index
        if fam.incl[j][i] and i != j and fam.translate(j, i, bit) & ~a.mask == 0:
            described |= 1 << n
        g = fam.alg[i][j]
        if g is not None and not fam.incl[i][j]:
            if fam.translate(g, i, bit) & fam.translate(g, j, a.mask):
                alternative |= 1 << n
    return LemGap(a, gap, Event(described, space.size), Event(alternative, space.size))


@dataclass
class NoMeasurement:
    event: Event
    in_image: bool | None
    sections_scanned: int


def no_measurement_event(space: ExclusiveSpace, scan_limit: int = 100_000) -> NoMeasurement:
    """{(C1!, 1)} and whether some section maps onto it under c.

    The image scan is exhaustive when the section count is within
    ``scan_limit``; otherwise ``in_image`` is None.
    """
    ev = space.atom_event(0, 0)
    try:
        secs = enumerate_sections(space.family, scan_limit)
    except ValueError:
        return NoMeasurement(ev, None, 0)
    hit = any(c_map(s, space) == ev for s in secs)
    return NoMeasurement(ev, hit, len(secs))


def star_atoms(family: ContextFamily) -> list[StarAtom]:
    return [StarAtom(family.contexts[i], k) for i in family.maximal
            for k in range(family.contexts[i].d)]


def bruns_lakser_embed(a: SqmElement, family: ContextFamily) -> frozenset[StarAtom]:
    """Star atoms below a in the S_QM order."""
    return frozenset(s for s in star_atoms(family)
                     if sqm_leq(SqmElement(s.context, 1 << s.index), a, family))


@dataclass
class BrunsLakserAudit:
    pairs: int
    meet_preserved: int
    join_preserved: int
    join_strict: list[tuple[SqmElement, SqmElement]]
    injective: bool

    @property
    def ok(self) -> bool:
        return self.meet_preserved == self.pairs


def bruns_lakser_audit(family: ContextFamily, limit: int = 5000) -> BrunsLakserAudit:
    """Compare meets/joins in S_QM against intersection/union of star-atom sets.

    Meets must map to intersections; joins map to supersets of unions and the
    pairs where the inclusion is strict are listed.
    """
    lat = SLattice(family, limit=limit)
    emb = {e: bruns_lakser_embed(e, family) for e in lat.elements}
    pairs = meet_ok = join_ok = 0
    strict = []
    for a in lat.elements:
        for b in lat.elements:
            pairs += 1
            if emb[sqm_meet(a, b, family)] == emb[a] & emb[b]:
                meet_ok += 1
            j = emb[sqm_join(a, b, family)]
            if j == emb[a] | emb[b]:
                join_ok += 1
            elif (emb[a] | emb[b]) < j:
                strict.append((a, b))
    injective = len(set(emb.values())) == len(emb)
    return BrunsLakserAudit(pairs, meet_ok, join_ok, strict, injective)
