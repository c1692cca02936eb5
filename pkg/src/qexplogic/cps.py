"""Rényi conditional probability spaces on the exclusive-atom space.

A :class:`ConditionalModel` is a set of conditions together with, for each
condition C, the point weights of the probability measure F -> P(F | C).
On a finite power set every finitely additive measure is such a weight
vector, so this is no loss of generality; it lets the multiplication axiom
be verified exactly on spaces far too large to enumerate (see
:func:`audit_axioms`).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Sequence

from .clqm import Event, ExclusiveSpace, c_of_i
from .contexts import ContextFamily
from .linalg import DensityOperator
from .slattice import SqmElement

__all__ = [
    "INF",
    "NotACondition",
    "ConditionalModel",
    "AxiomReport",
    "audit_axioms",
    "born_conditional",
    "born_cps",
    "dim_of_event",
    "MeasureFamily",
    "paper_delta_family",
    "stratified_family",
    "FamilyAudit",
    "audit_family",
    "extend_full",
    "stratum_mass",
    "NoncontextualityReport",
    "noncontextuality_check",
    "counterexample_models",
    "atom_traces",
]


class _Infinity:
    """Absorbing +∞ for [0, ∞]-valued measures."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __str__(self):
        return "inf"

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("inf")

    def __lt__(self, other):
        return False

    def __gt__(self, other):
        return other is not self

    def __le__(self, other):
        return other is self

    def __ge__(self, other):
        return True


INF = _Infinity()


def _finite_positive(v) -> bool:
    return v is not INF and v > 0


def _fmt(v) -> str:
    if v is INF:
        return "inf"
    v = Fraction(v)
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


class NotACondition(ValueError):
    pass


def atom_traces(rho: DensityOperator, space: ExclusiveSpace) -> tuple[Fraction, ...]:
    """Tr(rho q) for every exclusive atom (A!, q), in space order."""
    cache: dict = {}
    out = []
    for ex in space.atoms:
        q = ex.atom
        if q not in cache:
            cache[q] = rho.expectation(q)
        out.append(cache[q])
    return tuple(out)


class ConditionalModel:
    """Conditions plus point weights of P(. | C) for each condition C.

    ``conditions`` may be an explicit sequence of events, or None together
    with an ``accepts`` predicate, meaning every nonempty event accepted by
    the predicate.
    """

    def __init__(self, space: ExclusiveSpace, kernel: Callable[[Event], Sequence[Fraction]],
                 conditions: Sequence[Event] | None = None,
                 accepts: Callable[[Event], bool] | None = None, name: str = "model"):
        if conditions is None and accepts is None:
            raise ValueError("either conditions or accepts is required")
        self.space = space
        self.name = name
        self._kernel = kernel
        self._listed = None if conditions is None else tuple(dict.fromkeys(conditions))
        if self._listed is not None and any(not c for c in self._listed):
            raise ValueError("conditions must be nonempty")
        self._set = None if self._listed is None else set(self._listed)
        self._accepts = accepts
        self._weights: dict[Event, tuple[Fraction, ...]] = {}

    @property
    def family(self) -> ContextFamily:
        return self.space.family

    @property
    def is_listed(self) -> bool:
        return self._listed is not None

    def is_condition(self, c: Event) -> bool:
        if not c:
            return False
        if self._set is not None:
            return c in self._set
        return bool(self._accepts(c))

    def conditions(self, limit: int | None = None) -> Iterator[Event]:
        if self._listed is not None:
            yield from self._listed
            return
        if limit is not None and self.space.size > limit:
            raise ValueError(f"condition set is implicit over 2^{self.space.size} events; "
                             f"enumeration is capped at {limit} atoms")
        for c in self.space.all_events():
            if self.is_condition(c):
                yield c

    def weights(self, c: Event) -> tuple[Fraction, ...]:
        if not self.is_condition(c):
            raise NotACondition(f"{self.space.format(c)} is not a condition of {self.name}")
        w = self._weights.get(c)
        if w is None:
            w = tuple(Fraction(x) for x in self._kernel(c))
            if len(w) != self.space.size:
                raise ValueError("kernel returned the wrong number of weights")
            self._weights[c] = w
        return w

    def prob(self, f: Event, c: Event) -> Fraction:
        w = self.weights(c)
        return sum((w[k] for k in f), Fraction(0))

    def restricted(self, conditions: Iterable[Event], name: str | None = None) -> ConditionalModel:
        conds = tuple(conditions)
        for c in conds:
            if not self.is_condition(c):
                raise NotACondition(f"{self.space.format(c)} is not a condition of {self.name}")
        return ConditionalModel(self.space, self.weights, conditions=conds,
                                name=name or f"{self.name}|restricted")

    @classmethod
    def from_table(cls, space: ExclusiveSpace, table: dict[Event, Sequence[Fraction]],
                   name: str = "table") -> ConditionalModel:
        table = {c: tuple(Fraction(x) for x in w) for c, w in table.items()}
        return cls(space, table.__getitem__, conditions=list(table), name=name)


@dataclass
class AxiomReport:
    model: str
    method: str
    conditions: int = 0
    axiom1_checks: int = 0
    axiom2_checks: int = 0
    axiom1_failures: list = field(default_factory=list)
    axiom2_failures: list = field(default_factory=list)

    @property
    def axiom1(self) -> bool:
        return not self.axiom1_failures

    @property
    def axiom2(self) -> bool:
        return not self.axiom2_failures

    @property
    def ok(self) -> bool:
        return self.axiom1 and self.axiom2


MAX_STORED_FAILURES = 20


def _axiom1(model: ConditionalModel, conds: list[Event], report: AxiomReport, brute: bool):
    space = model.space
    for c in conds:
        w = model.weights(c)
        report.axiom1_checks += 1
        if any(x < 0 for x in w) or sum(w) != 1:
            report.axiom1_failures.append((c, "weights are not a probability vector"))
            continue
        if brute:
            for f in space.all_events():
                report.axiom1_checks += 1
                direct = model.prob(f, c)
                if direct != sum((w[k] for k in f), Fraction(0)) or not 0 <= direct <= 1:
                    if len(report.axiom1_failures) < MAX_STORED_FAILURES:
                        report.axiom1_failures.append((c, f))


def _axiom2_brute(model: ConditionalModel, conds: list[Event], report: AxiomReport):
    space = model.space
    events = list(space.all_events())
    for c in conds:
        for b in events:
            bc = b & c
            if not model.is_condition(bc):
                continue
            p_bc = model.prob(b, c)
            for a in events:
                report.axiom2_checks += 1
                lhs = model.prob(a & b, c)
                rhs = model.prob(a, bc) * p_bc
                if lhs != rhs and len(report.axiom2_failures) < MAX_STORED_FAILURES:
                    report.axiom2_failures.append((a, b, c, lhs, rhs))


def _axiom2_reduced(model: ConditionalModel, conds: list[Event], report: AxiomReport):
    # For fixed C and D = B ∩ C, write B = D ∪ E with E outside C.  Both sides
    # of P(A∩B|C) = P(A|D) P(B|C) are multilinear in the indicators of A and
    # E, with every monomial of degree exactly one in A and at most one in E.
    # Such a polynomial vanishes on the whole cube iff it vanishes at A a
    # singleton and E empty or a singleton.
    space = model.space
    n = space.size
    singles = [Event(1 << k, n) for k in range(n)]
    for c in conds:
        outside = [s for s in singles if s.isdisjoint(c)]
        for d in conds:
            if not d.issubset(c):
                continue
            for b in [d] + [d | e for e in outside]:
                p_bc = model.prob(b, c)
                for a in singles:
                    report.axiom2_checks += 1
                    lhs = model.prob(a & b, c)
                    rhs = model.prob(a, d) * p_bc
                    if lhs != rhs and len(report.axiom2_failures) < MAX_STORED_FAILURES:
                        report.axiom2_failures.append((a, b, c, lhs, rhs))


def audit_axioms(model: ConditionalModel, method: str = "auto", brute_limit: int = 6,
                 condition_limit: int = 16) -> AxiomReport:
    """Check both CPS axioms over every condition.

    ``brute`` enumerates every event for axiom 1 and every (A, B, C) triple
    for axiom 2.  ``reduced`` checks axiom 1 on the weight vectors and axiom 2
    on the exact multilinear reduction; it is equivalent to ``brute`` and
    scales to spaces with 2^25 events.  ``auto`` picks brute when the space
    has at most ``brute_limit`` atoms.
    """
    if method == "auto":
        method = "brute" if model.space.size <= brute_limit else "reduced"
    if method not in ("brute", "reduced"):
        raise ValueError(f"unknown method {method!r}")
    conds = list(model.conditions(limit=condition_limit))
    report = AxiomReport(model.name, method, conditions=len(conds))
    _axiom1(model, conds, report, brute=method == "brute")
    if method == "brute":
        _axiom2_brute(model, conds, report)
    else:
        _axiom2_reduced(model, conds, report)
    return report


def born_conditional(rho: DensityOperator, f: Event, context, space: ExclusiveSpace) -> Fraction:
    """Σ Tr(rho P) over the members (A!, P) of F whose context is exactly A."""
    i = space.family.lookup(context)
    ctx = space.family.contexts[i]
    total = Fraction(0)
    for n in f:
        if space.context_of[n] == i:
            total += rho.expectation(ctx.atoms[space.atoms[n].index])
    return total


def born_cps(rho: DensityOperator, space: ExclusiveSpace, exclusive: bool = False) -> ConditionalModel:
    """Born-rule CPS on the measurement conditions F_A (or F!_A if exclusive)."""
    traces = atom_traces(rho, space)
    by_condition: dict[Event, int] = {}
    for i in range(len(space.family)):
        c = space.measured_exclusive(i) if exclusive else space.measured(i)
        by_condition[c] = i

    def kernel(c: Event):
        i = by_condition[c]
        return tuple(traces[n] if space.context_of[n] == i else Fraction(0)
                     for n in range(space.size))

    return ConditionalModel(space, kernel, conditions=list(by_condition),
                            name="born!" if exclusive else "born")


def dim_of_event(f: Event, space: ExclusiveSpace) -> int:
    """Atom count of the coarsest context with a member in F."""
    if not f:
        raise ValueError("the dimension of the empty event is undefined")
    return min(space.dim_of[n] for n in f)


@dataclass
class MeasureFamily:
    """Indexed family of [0, ∞]-valued set functions on the exclusive space."""

    space: ExclusiveSpace
    indices: tuple[int, ...]
    measure: Callable[[int, Event], object]
    name: str = "family"

    def __call__(self, i: int, f: Event):
        if not f:
            return Fraction(0)
        return self.measure(i, f)


def _dimensions(space: ExclusiveSpace) -> tuple[int, ...]:
    return tuple(sorted({c.d for c in space.family.contexts}))


def paper_delta_family(rho: DensityOperator, space: ExclusiveSpace) -> MeasureFamily:
    """μ_i(F) = δ_{i,d(F)} Σ Tr(rho P) over the distinct matrices P having some
    member (A!, P) of F with d(A) = i."""
    def mu(i: int, f: Event):
        if dim_of_event(f, space) != i:
            return Fraction(0)
        seen = {}
        for n in f:
            if space.dim_of[n] == i:
                p = space.atoms[n].atom
                if p not in seen:
                    seen[p] = rho.expectation(p)
        return sum(seen.values(), Fraction(0))

    return MeasureFamily(space, _dimensions(space), mu, name="paper")


def stratified_family(rho: DensityOperator, space: ExclusiveSpace) -> MeasureFamily:
    """μ_i(F) = ∞ if F has a member coarser than i, else the member-sum of
    Tr(rho q) over members at dimension exactly i."""
    traces = atom_traces(rho, space)

    def mu(i: int, f: Event):
        total = Fraction(0)
        for n in f:
            d = space.dim_of[n]
            if d < i:
                return INF
            if d == i:
                total += traces[n]
        return total

    return MeasureFamily(space, _dimensions(space), mu, name="stratified")


@dataclass
class FamilyAudit:
    family: str
    is_measure: bool
    measure_failures: list
    measure_failure_count: int
    generates: bool
    generate_failures: list
    orders_passing: list[tuple[int, ...]]
    ascending: bool
    descending: bool
    literal_clause_orders: list[tuple[int, ...]]

    @property
    def ordered(self) -> bool:
        return bool(self.orders_passing)

    @property
    def ok(self) -> bool:
        return self.is_measure and self.generates and self.ordered


def audit_family(mf: MeasureFamily, model: ConditionalModel, atom_limit: int = 10) -> FamilyAudit:
    """Exhaustive audit of a measure family against a CPS.

    (a) each μ_i is finitely additive over disjoint pairs (∞ absorbing);
    (b) the family generates the model on every condition;
    (c) dimensional ordering, read as "0 < μ_i(F) < ∞ implies μ_j(F) = 0 for
        every later j", tested for every total order of the index set.  The
        literal clause without the positivity premise is reported separately.
    """
    space = mf.space
    n = space.size
    if n > atom_limit:
        raise ValueError(f"family audit enumerates 3^{n} event pairs; capped at {atom_limit} atoms")
    events = list(space.all_events())
    full = (1 << n) - 1
    values = {i: [mf(i, f) for f in events] for i in mf.indices}

    failures, count = [], 0
    for i in mf.indices:
        vi = values[i]
        if vi[0] != 0:
            failures.append((i, events[0], events[0], vi[0], Fraction(0)))
            count += 1
        for fm in range(1, 1 << n):
            rest = full & ~fm
            gm = rest
            while gm:
                if gm > fm:  # each unordered pair once
                    union = vi[fm | gm]
                    parts = vi[fm] + vi[gm]
                    if union != parts:
                        count += 1
                        failures.append((i, events[fm], events[gm], union, parts))
                gm = (gm - 1) & rest

    gen_failures = []
    for c in model.conditions(limit=atom_limit):
        good = [i for i in mf.indices if _finite_positive(values[i][c.mask])]
        if not good:
            gen_failures.append((c, None, None, "no index with 0 < μ_i(C) < ∞"))
            continue
        for i in good:
            denom = values[i][c.mask]
            for f in events:
                expected = model.prob(f, c)
                got = values[i][(f & c).mask]
                if got is INF or Fraction(got) / denom != expected:
                    gen_failures.append((c, i, f, f"P={_fmt(expected)} vs μ ratio {_fmt(got)}/{_fmt(denom)}"))
                    break

    def passes(order, literal):
        for f in range(1, 1 << n):
            for p, i in enumerate(order):
                v = values[i][f]
                trigger = (v is not INF) if literal else _finite_positive(v)
                if trigger and any(values[j][f] != 0 for j in order[p + 1:]):
                    return False
        return True

    perms = list(itertools.permutations(mf.indices))
    passing = [o for o in perms if passes(o, False)]
    literal = [o for o in perms if passes(o, True)]
    asc = tuple(sorted(mf.indices))
    return FamilyAudit(
        family=mf.name,
        is_measure=count == 0,
        measure_failures=failures,
        measure_failure_count=count,
        generates=not gen_failures,
        generate_failures=gen_failures,
        orders_passing=passing,
        ascending=asc in passing,
        descending=asc[::-1] in passing,
        literal_clause_orders=literal,
    )


def stratum_mass(c: Event, space: ExclusiveSpace, traces: Sequence[Fraction]) -> Fraction:
    """Σ Tr(rho q) over the members of C at its coarsest dimension d(C)."""
    d = dim_of_event(c, space)
    return sum((traces[n] for n in c if space.dim_of[n] == d), Fraction(0))


def extend_full(rho: DensityOperator, space: ExclusiveSpace) -> ConditionalModel:
    """Extension of the Born CPS to every nonempty event with positive
    coarsest-stratum mass: P(F | C) = m(F ∩ C at stratum d(C)) / m(C)."""
    traces = atom_traces(rho, space)

    def accepts(c: Event) -> bool:
        return stratum_mass(c, space, traces) > 0

    def kernel(c: Event):
        d = dim_of_event(c, space)
        m = stratum_mass(c, space, traces)
        return tuple(traces[n] / m if (c.mask >> n & 1 and space.dim_of[n] == d) else Fraction(0)
                     for n in range(space.size))

    return ConditionalModel(space, kernel, accepts=accepts, name="extend-full")


@dataclass
class NoncontextualityReport:
    reading: str
    eq24_checks: int = 0
    eq24_failures: list = field(default_factory=list)
    eq25_checks: int = 0
    eq25_failures: list = field(default_factory=list)
    values: dict = field(default_factory=dict)
    well_defined: bool = True
    normalized: bool = True
    additivity_checks: int = 0
    additivity_failures: list = field(default_factory=list)
    born_mismatches: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return (not self.eq24_failures and not self.eq25_failures and self.well_defined
                and self.normalized and not self.additivity_failures and not self.born_mismatches)


def noncontextuality_check(model: ConditionalModel, reading: str = "event",
                           rho: DensityOperator | None = None) -> NoncontextualityReport:
    """Context-independence of outcome probabilities.

    With ``reading="literal"`` the outcome of P in context A is the singleton
    {(A!, P)}; with ``reading="event"`` it is c∘i(A, P), i.e. "A (or something
    finer) was measured with outcome in P".  The extracted function on
    projections is then checked for normalisation and finite additivity, and
    against Tr(rho P) when rho is given.
    """
    if reading not in ("literal", "event"):
        raise ValueError("reading must be 'literal' or 'event'")
    space = model.space
    fam = space.family
    n = len(fam)
    rep = NoncontextualityReport(reading)
    measured = [space.measured(i) for i in range(n)]

    def outcome(i: int, mask: int) -> Event:
        if reading == "literal":
            return space.restrict_to_context(i, mask)
        return c_of_i(SqmElement(fam.contexts[i], mask), space)

    def p(i: int, mask: int, j: int) -> Fraction:
        return model.prob(outcome(i, mask), measured[j])

    def outcomes(i: int):
        # literal: atoms only; event: every nonzero element of L(A_i)
        d = fam.contexts[i].d
        return [1 << t for t in range(d)] if reading == "literal" else list(range(1, 1 << d))

    for i in range(n):
        finer = [j for j in range(n) if fam.incl[j][i]]
        for m in outcomes(i):
            ref = p(i, m, finer[0])
            for j in finer[1:]:
                rep.eq24_checks += 1
                got = p(i, m, j)
                if got != ref:
                    rep.eq24_failures.append((fam.contexts[i].label(), m, fam.contexts[finer[0]].label(),
                                              fam.contexts[j].label(), ref, got))

    for k in range(n):
        coarser = [i for i in range(n) if fam.incl[k][i]]
        shared: dict = {}
        for i in coarser:
            for m in outcomes(i):
                shared.setdefault(fam.contexts[i].projection(m), []).append((i, m))
        for where in shared.values():
            i0, m0 = where[0]
            ref = p(i0, m0, k)
            for i, m in where[1:]:
                rep.eq25_checks += 1
                got = p(i, m, k)
                if got != ref:
                    rep.eq25_failures.append((fam.contexts[k].label(), fam.contexts[i0].label(),
                                              fam.contexts[i].label(), ref, got))

    collected: dict = {}
    for i in range(n):
        ctx = fam.contexts[i]
        for m in outcomes(i):
            proj = ctx.projection(m)
            for j in range(n):
                if fam.incl[j][i]:
                    collected.setdefault(proj, set()).add(p(i, m, j))
    for proj, vals in collected.items():
        if len(vals) != 1:
            rep.well_defined = False
        rep.values[proj] = min(vals)
    one = fam.contexts[0].projection(1)
    rep.normalized = rep.values.get(one) == 1 and len(collected.get(one, ())) == 1

    projs = sorted(rep.values, key=lambda q: q.sort_key)
    for a_idx, p1 in enumerate(projs):
        for p2 in projs[a_idx + 1:]:
            if (p1 @ p2).is_zero():
                s = p1 + p2
                if s in rep.values:
                    rep.additivity_checks += 1
                    if rep.values[s] != rep.values[p1] + rep.values[p2]:
                        rep.additivity_failures.append((p1, p2, rep.values[p1], rep.values[p2], rep.values[s]))
    if rho is not None:
        for proj, v in rep.values.items():
            if v != rho.expectation(proj):
                rep.born_mismatches.append((proj, v, rho.expectation(proj)))
    return rep


def counterexample_models(space: ExclusiveSpace, atom: int | None = None) -> list[ConditionalModel]:
    """(1) the unconditional Dirac measure at (C1!, 1), conditioned only on
    events containing that atom; (2) the trivial full CPS concentrated on a
    fixed exclusive atom (default: the first atom of the first non-trivial
    context)."""
    n = space.size
    if atom is None:
        atom = 1 if n > 1 else 0

    def delta(k):
        return tuple(Fraction(1) if m == k else Fraction(0) for m in range(n))

    dirac = ConditionalModel(space, lambda c: delta(0), accepts=lambda c: 0 in c, name="dirac")
    trivial = ConditionalModel(space, lambda c: delta(atom), accepts=lambda c: True,
                               name=f"trivial@{space.atoms[atom]}")
    return [dirac, trivial]
