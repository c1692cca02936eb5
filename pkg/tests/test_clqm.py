from itertools import product

import pytest

from conftest import AX, AY, AZ, PZ_UP, fam
from qexplogic.bell import BellScenario
from qexplogic.clqm import (
    Event,
    ExclusiveSpace,
    bruns_lakser_audit,
    bruns_lakser_embed,
    c_map,
    c_of_i,
    exclusive_atoms,
    lem_gap,
    m_bang_event,
    no_measurement_event,
    star_atoms,
)
from qexplogic.contexts import Context, Observable, includes, trivial_context
from qexplogic.heyting import bottom, embed_i, enumerate_sections, lqm_join, lqm_meet, top
from qexplogic.linalg import Projection, proj_leq, project_onto_span
from qexplogic.slattice import SLattice, SqmElement

C1 = trivial_context(2)
ONE = Projection.identity(2)


def members(space, ev):
    return [(space.atoms[n].context, space.atoms[n].atom) for n in ev]


@pytest.mark.parametrize("ctxs, n", [((), 1), ((AZ, AX), 5), ((AZ, AX, AY), 7)])
def test_exclusive_atom_counts(ctxs, n):
    f = fam(*ctxs) if ctxs else fam(C1)
    assert len(exclusive_atoms(f)) == n


def test_bell_has_25_exclusive_atoms():
    assert BellScenario.default().space.size == 25


def test_event_algebra():
    a, b = Event(0b0110, 4), Event(0b0011, 4)
    assert (a & b).mask == 0b0010 and (a | b).mask == 0b0111 and (a - b).mask == 0b0100
    assert a.complement().complement() == a
    assert (a | b).complement() == a.complement() & b.complement()
    assert list(a) == [1, 2] and len(a) == 2 and 1 in a and 0 not in a
    with pytest.raises(ValueError):
        Event(16, 4)
    with pytest.raises(ValueError):
        a & Event(1, 5)


def test_c_map_examples(f_zx):
    space = ExclusiveSpace(f_zx)
    assert c_map(bottom(f_zx), space) == space.empty
    assert c_map(top(f_zx), space) == space.full
    z_up = SqmElement.of(AZ, PZ_UP)
    assert members(space, c_of_i(z_up, space)) == [(AZ, PZ_UP)]
    assert len(c_of_i(SqmElement(AZ, 3), space)) == 2


@pytest.mark.parametrize("ctxs", [(AZ,), (AZ, AX)])
def test_c_map_is_injective_homomorphism(ctxs):
    f = fam(*ctxs)
    space = ExclusiveSpace(f)
    secs = enumerate_sections(f)
    images = [c_map(s, space) for s in secs]
    assert len(set(images)) == len(secs)
    for (s1, e1), (s2, e2) in product(list(zip(secs, images)), repeat=2):
        assert c_map(lqm_meet(s1, s2), space) == e1 & e2
        assert c_map(lqm_join(s1, s2), space) == e1 | e2


@pytest.mark.parametrize("family", [fam(AZ, AX, AY), BellScenario.default().family], ids=["paulis", "bell"])
def test_c_of_i_is_the_down_set(family):
    # independent oracle: matrix inclusion test P' <= P plus algebra inclusion
    space = ExclusiveSpace(family)
    for a in SLattice(family).elements:
        if a.is_bottom:
            continue
        expected = {n for n, ex in enumerate(space.atoms)
                    if includes(ex.context, a.context) and proj_leq(ex.atom, a.proj)}
        assert set(c_of_i(a, space)) == expected


def test_m_bang_event(f_zx):
    space = ExclusiveSpace(f_zx)
    sz = Observable.from_pairs([(1, PZ_UP), (-1, PZ_UP.complement())])
    assert members(space, m_bang_event(sz, {1}, space)) == [(AZ, PZ_UP)]
    assert m_bang_event(sz, {7}, space) == space.empty
    assert len(m_bang_event(sz, {1, -1}, space)) == 2


def test_lem_gap_examples(f_zx):
    space = ExclusiveSpace(f_zx)
    g = lem_gap(SqmElement.of(AZ, PZ_UP), space)
    assert members(space, g.gap) == [(C1, ONE)]
    assert g.described == space.empty
    assert not g.matches_described and g.contains_described
    assert lem_gap(SqmElement(C1, 1), space).gap == space.empty


def test_lem_gap_three_level_chain():
    e = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    E = [project_onto_span([v]) for v in e]
    fine = Context(tuple(E), name="fine")
    coarse = Context((E[0], project_onto_span(e[1:])), name="coarse")
    f = fam(fine, coarse)
    space = ExclusiveSpace(f)
    g = lem_gap(SqmElement.of(fine, E[0]), space)
    got = members(space, g.gap)
    assert (coarse, E[0]) in got
    assert (trivial_context(3), Projection.identity(3)) in got
    assert g.contains_described
    assert members(space, g.extra) == [(trivial_context(3), Projection.identity(3))]


@pytest.mark.parametrize("family", [fam(AZ, AX, AY), BellScenario.default().family], ids=["paulis", "bell"])
def test_lem_gap_contains_described_set(family):
    space = ExclusiveSpace(family)
    for a in SLattice(family).elements:
        if not a.is_bottom:
            g = lem_gap(a, space)
            assert g.contains_described
            assert g.matches_alternative


def test_no_measurement_event(f_z, f_zx):
    for f, count in ((f_z, 5), (f_zx, 17)):
        space = ExclusiveSpace(f)
        rep = no_measurement_event(space)
        assert rep.event == space.atom_event(0, 0)
        assert rep.in_image is False and rep.sections_scanned == count
        assert len(rep.event.complement()) == space.size - 1


def test_bruns_lakser_examples(f_zx):
    assert bruns_lakser_embed(SqmElement(C1, 1), f_zx) == frozenset(star_atoms(f_zx))
    got = bruns_lakser_embed(SqmElement.of(AZ, PZ_UP), f_zx)
    assert [(s.context, s.atom) for s in got] == [(AZ, PZ_UP)]


def test_bruns_lakser_bell_marginal():
    b = BellScenario.default()
    a = b.element(b.marginal("A", 0), b.alice[0][0])
    got = {(s.context, s.atom) for s in bruns_lakser_embed(a, b.family)}
    expected = set()
    for j in range(2):
        joint = b.family.contexts[b.joint(0, j)]
        for k in range(2):
            expected.add((joint, b.alice[0][0] @ b.bob[j][k]))
    assert got == expected


def test_bruns_lakser_preserves_meets(f_zx):
    rep = bruns_lakser_audit(f_zx)
    assert rep.ok and rep.injective
    assert rep.pairs == 64
    # joins only map into supersets of unions
    assert rep.join_preserved + len(rep.join_strict) == rep.pairs


def test_space_formatting(f_zx):
    space = ExclusiveSpace(f_zx)
    ev = space.measured("z")
    assert space.format(ev) == "{(z!,11)}"
    assert space.describe(ev) == [("z", 3)]
    assert space.measured_exclusive("C1") == space.atom_event(0, 0)
    assert space.measured("C1") == space.full
