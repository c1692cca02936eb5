"""EPR-Bohm scenario on two qubits: extended conditions, parameter and
outcome independence, and the CHSH value, all exact.

Directions are rational unit vectors (Pythagorean triples), so the
maximal violation 2√2 is out of reach; the default fixture reaches 14/5.
"""
from __future__ import annotations

import copy
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .clqm import Event, ExclusiveSpace, c_of_i
from .contexts import Context, ContextFamily, close_family, make_context
from .cps import ConditionalModel, NotACondition, born_cps, extend_full
from .linalg import DensityOperator, Projection, QMatrix, kron, qubit_spin_projection
from .slattice import SLattice, SqmElement

__all__ = [
    "BellScenario",
    "singlet",
    "extended_conditions",
    "locality_audit",
    "LocalityReport",
    "chsh",
    "chsh_operator",
    "DEFAULT_DIRECTIONS",
]

DEFAULT_DIRECTIONS = (
    (0, 0, 1),
    (1, 0, 0),
    (Fraction(3, 5), 0, Fraction(4, 5)),
    (Fraction(-3, 5), 0, Fraction(4, 5)),
)


def singlet() -> DensityOperator:
    """(|01> - |10>)/√2 as a density matrix (entries stay rational)."""
    return DensityOperator.pure([0, 1, -1, 0])


@dataclass
class BellScenario:
    """Outcome projections ``alice[i][k]``, ``bob[j][l]`` on the 4-dim space
    (already tensored with the identity), a state, and the closed family."""

    alice: tuple[tuple[Projection, Projection], ...]
    bob: tuple[tuple[Projection, Projection], ...]
    state: DensityOperator
    family: ContextFamily = field(init=False)
    space: ExclusiveSpace = field(init=False)

    def __post_init__(self):
        for pair in self.alice + self.bob:
            if pair[0] + pair[1] != QMatrix.identity(self.state.dim):
                raise ValueError("each measurement needs two complementary outcome projections")
        self.family = close_family(self.alice_contexts + self.bob_contexts)
        self.space = ExclusiveSpace(self.family)

    @classmethod
    def from_directions(cls, a1, a2, b1, b2, state: DensityOperator | None = None) -> BellScenario:
        one = Projection.identity(2)
        alice = tuple((kron(qubit_spin_projection(n, 1), one), kron(qubit_spin_projection(n, -1), one))
                      for n in (a1, a2))
        bob = tuple((kron(one, qubit_spin_projection(n, 1)), kron(one, qubit_spin_projection(n, -1)))
                    for n in (b1, b2))
        return cls(alice, bob, singlet() if state is None else state)

    @classmethod
    def default(cls, state: DensityOperator | None = None) -> BellScenario:
        return cls.from_directions(*DEFAULT_DIRECTIONS, state=state)

    def with_state(self, state: DensityOperator) -> BellScenario:
        # the family and space depend only on the projections
        other = copy.copy(self)
        other.state = state
        return other

    @property
    def alice_contexts(self) -> list[Context]:
        return [Context(pair, name=f"A{i + 1}") for i, pair in enumerate(self.alice)]

    @property
    def bob_contexts(self) -> list[Context]:
        return [Context(pair, name=f"B{j + 1}") for j, pair in enumerate(self.bob)]

    def marginal(self, party: str, i: int) -> int:
        ctx = Context(self.alice[i] if party == "A" else self.bob[i])
        return self.family.index[ctx]

    def joint(self, i: int, j: int) -> int:
        return self.family.index[make_context(self.alice[i] + self.bob[j])]

    def outcome_atom(self, i: int, j: int, k: int, l: int) -> int:
        """Exclusive-atom index of outcome (k, l) in the joint context A_ij."""
        idx = self.joint(i, j)
        ctx = self.family.contexts[idx]
        q = self.alice[i][k] @ self.bob[j][l]
        return self.space.offset[idx] + ctx.mask_of(q).bit_length() - 1

    def element(self, ctx_index: int, proj: QMatrix) -> SqmElement:
        return SqmElement.of(self.family.contexts[ctx_index], proj)


def extended_conditions(family: ContextFamily, space: ExclusiveSpace | None = None) -> list[Event]:
    """F_(A,P) = c∘i(A, P) for every non-bottom element of S_QM."""
    space = space or ExclusiveSpace(family)
    return [c_of_i(e, space) for e in SLattice(family) if not e.is_bottom]


def chsh(scn: BellScenario, model: ConditionalModel | None = None) -> Fraction:
    """E11 + E12 + E21 - E22 from Born conditional probabilities on the
    joint contexts, E_ij = Σ (-1)^(k+l) P(outcome kl | F_{A_ij})."""
    model = model or born_cps(scn.state, scn.space)
    total = Fraction(0)
    for i in range(2):
        for j in range(2):
            cond = scn.space.measured(scn.joint(i, j))
            e = Fraction(0)
            for k in range(2):
                for l in range(2):
                    f = Event(1 << scn.outcome_atom(i, j, k, l), scn.space.size)
                    e += (-1) ** (k + l) * model.prob(f, cond)
            total += -e if (i, j) == (1, 1) else e
    return total


def chsh_operator(scn: BellScenario) -> QMatrix:
    obs_a = [p0 - p1 for p0, p1 in scn.alice]
    obs_b = [p0 - p1 for p0, p1 in scn.bob]
    return (obs_a[0] @ obs_b[0] + obs_a[0] @ obs_b[1]
            + obs_a[1] @ obs_b[0] - obs_a[1] @ obs_b[1])


@dataclass
class Equality:
    kind: str
    label: str
    lhs: Fraction | None
    rhs: Fraction | None
    vacuous: bool = False
    skipped: str | None = None

    @property
    def holds(self) -> bool | None:
        if self.skipped:
            return None
        return self.lhs == self.rhs


@dataclass
class LocalityReport:
    reading: str
    equalities: list[Equality]

    def of(self, kind: str) -> list[Equality]:
        return [e for e in self.equalities if e.kind == kind]

    @property
    def pi_holds(self) -> bool:
        return all(e.holds for e in self.of("PI") if e.holds is not None)

    @property
    def oi_holds(self) -> bool:
        return all(e.holds for e in self.of("OI") if e.holds is not None)

    @property
    def all_vacuous(self) -> bool:
        return all(e.vacuous for e in self.equalities)

    def first_failure(self, kind: str) -> Equality | None:
        return next((e for e in self.of(kind) if e.holds is False), None)


def locality_audit(scn: BellScenario, reading: str = "event",
                   model: ConditionalModel | None = None) -> LocalityReport:
    """PI and OI equalities evaluated with the full extension.

    ``literal``: the outcome event is the singleton {(A^X_i!, P^X_i0)}; it
    never meets the joint-context conditions, so both sides are 0 (flagged
    vacuous).  ``event``: the outcome event is c∘i(A^X_i, P^X_i0).
    PI has 4 instances (party, i); OI has 16 (party, i, j, k).
    """
    if reading not in ("literal", "event"):
        raise ValueError("reading must be 'literal' or 'event'")
    model = model or extend_full(scn.state, scn.space)
    space, fam = scn.space, scn.family

    def outcome(party: str, i: int) -> Event:
        idx = scn.marginal(party, i)
        proj = (scn.alice if party == "A" else scn.bob)[i][0]
        el = scn.element(idx, proj)
        if reading == "literal":
            return space.restrict_to_context(idx, el.mask)
        return c_of_i(el, space)

    def cond(joint: int, proj: QMatrix | None) -> Event:
        ctx = fam.contexts[joint]
        if proj is None:
            return c_of_i(SqmElement(ctx, ctx.full_mask), space)
        return c_of_i(SqmElement.of(ctx, proj), space)

    def compare(kind, label, ev, c1, c2):
        try:
            lhs, rhs = model.prob(ev, c1), model.prob(ev, c2)
        except NotACondition as exc:
            return Equality(kind, label, None, None, skipped=str(exc))
        vacuous = not (ev & c1) and not (ev & c2)
        return Equality(kind, label, lhs, rhs, vacuous=vacuous)

    eqs = []
    for i in range(2):
        ev = outcome("A", i)
        eqs.append(compare("PI", f"A{i + 1}: A{i + 1}B1 vs A{i + 1}B2", ev,
                           cond(scn.joint(i, 0), None), cond(scn.joint(i, 1), None)))
    for j in range(2):
        ev = outcome("B", j)
        eqs.append(compare("PI", f"B{j + 1}: A1B{j + 1} vs A2B{j + 1}", ev,
                           cond(scn.joint(0, j), None), cond(scn.joint(1, j), None)))
    for i in range(2):
        ev = outcome("A", i)
        for j in range(2):
            joint = scn.joint(i, j)
            for k in range(2):
                eqs.append(compare("OI", f"A{i + 1}=0 | A{i + 1}B{j + 1} vs B{j + 1}={k}", ev,
                                   cond(joint, None), cond(joint, scn.bob[j][k])))
    for j in range(2):
        ev = outcome("B", j)
        for i in range(2):
            joint = scn.joint(i, j)
            for k in range(2):
                eqs.append(compare("OI", f"B{j + 1}=0 | A{i + 1}B{j + 1} vs A{i + 1}={k}", ev,
                                   cond(joint, None), cond(joint, scn.alice[i][k])))
    return LocalityReport(reading, eqs)


def bell_from_contexts(alice: Sequence[Sequence[Projection]], bob: Sequence[Sequence[Projection]],
                       state: DensityOperator) -> BellScenario:
    return BellScenario(tuple(tuple(p) for p in alice), tuple(tuple(p) for p in bob), state)
