from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import AX, AY, AZ, PZ_UP, fam
from qexplogic.contexts import ContextError, trivial_context
from qexplogic.heyting import (
    Section,
    bottom,
    count_sections,
    decompose,
    embed_i,
    enumerate_sections,
    format_section,
    implies,
    implies_bruteforce,
    join_all,
    lem_audit,
    lqm_join,
    lqm_leq,
    lqm_meet,
    negate,
    negate_closed_form,
    s_join_embedding_gap,
    top,
)
from qexplogic.linalg import Projection
from qexplogic.slattice import BOTTOM, SLattice, SqmElement, sqm_join, sqm_leq, sqm_meet

C1 = trivial_context(2)
ONE = Projection.identity(2)


def sec(family, **masks):
    return Section(family, tuple(masks.get(c.label(), 0) for c in family.contexts))


def el(ctx, p):
    return SqmElement.of(ctx, p)


def test_section_rejects_non_monotone(f_zx):
    with pytest.raises(ContextError, match="not monotone"):
        sec(f_zx, C1=1)  # 1 at C1 forces 1 everywhere finer
    with pytest.raises(ContextError):
        sec(f_zx, z=4)


@pytest.mark.parametrize("ctxs, count", [((), 2), ((AZ,), 5), ((AZ, AX), 17)])
def test_section_counts(ctxs, count):
    f = fam(*ctxs) if ctxs else fam(C1)
    assert len(enumerate_sections(f)) == count == count_sections(f)


def test_enumeration_bound(f_zx):
    with pytest.raises(ContextError, match="bound"):
        enumerate_sections(f_zx, limit=10)


def test_pointwise_examples(f_zx):
    s = sec(f_zx, z=1)
    assert lqm_meet(top(f_zx), s) == s
    z_up, z_down = el(AZ, PZ_UP), el(AZ, PZ_UP.complement())
    assert lqm_join(embed_i(z_up, f_zx), embed_i(z_down, f_zx)) == embed_i(el(AZ, ONE), f_zx)
    j = lqm_join(embed_i(el(AZ, ONE), f_zx), embed_i(el(AX, ONE), f_zx))
    assert j == sec(f_zx, z=3, x=3)
    assert lqm_leq(j, embed_i(SqmElement(C1, 1), f_zx)) and j != top(f_zx)


def test_embedding_examples(f_zx):
    z_up = el(AZ, PZ_UP)
    assert embed_i(z_up, f_zx) == sec(f_zx, z=AZ.mask_of(PZ_UP))
    assert embed_i(SqmElement(C1, 1), f_zx) == top(f_zx)
    assert embed_i(BOTTOM, f_zx) == bottom(f_zx)


def test_embedding_laws(f_zxy):
    f = f_zxy
    els = SLattice(f).elements
    for a, b in product(els, repeat=2):
        ia, ib = embed_i(a, f), embed_i(b, f)
        assert sqm_leq(a, b, f) == lqm_leq(ia, ib)
        assert embed_i(sqm_meet(a, b, f), f) == lqm_meet(ia, ib)
        joined, image = s_join_embedding_gap(a, b, f)
        assert lqm_leq(joined, image)
        same = a.is_bottom or b.is_bottom or a.context == b.context
        if same:
            assert joined == image
        comparable = sqm_leq(a, b, f) or sqm_leq(b, a, f)
        assert (joined == image) == (same or comparable)


def test_join_embedding_equality_beyond_same_context(f_zx):
    # comparable elements in different contexts also embed their join exactly
    a, b = SqmElement(C1, 1), el(AZ, PZ_UP)
    joined, image = s_join_embedding_gap(a, b, f_zx)
    assert a.context != b.context and joined == image == top(f_zx)


def test_decompose_examples(f_zx):
    assert decompose(bottom(f_zx)) == []
    assert decompose(embed_i(el(AZ, PZ_UP), f_zx)) == [el(AZ, PZ_UP)]
    assert decompose(sec(f_zx, z=3, x=3)) == [el(AZ, ONE), el(AX, ONE)]


def test_decompose_rejoins(f_zx):
    for s in enumerate_sections(f_zx):
        assert join_all(f_zx, (embed_i(a, f_zx) for a in decompose(s))) == s


def test_implication_examples(f_zx):
    s1 = embed_i(el(AZ, PZ_UP), f_zx)
    expected = sec(f_zx, z=AZ.mask_of(PZ_UP.complement()), x=3)
    assert implies(s1, bottom(f_zx)) == expected
    for s in enumerate_sections(f_zx):
        assert implies(s, s) == top(f_zx)
        assert implies(top(f_zx), s) == s


def test_closed_form_implication_against_bruteforce(f_zx):
    secs = enumerate_sections(f_zx)
    for s1, s2 in product(secs, repeat=2):
        assert implies(s1, s2) == implies_bruteforce(s1, s2, secs)


def test_closed_form_implication_on_three_contexts(f_zxy):
    secs = enumerate_sections(f_zxy)
    assert len(secs) == 65
    sample = secs[::4]
    for s1, s2 in product(sample, repeat=2):
        assert implies(s1, s2) == implies_bruteforce(s1, s2, secs)


def test_negation_examples(f_zx):
    assert negate(bottom(f_zx)) == top(f_zx)
    assert negate(top(f_zx)) == bottom(f_zx)
    assert negate(embed_i(SqmElement(C1, 1), f_zx)) == bottom(f_zx)


@pytest.mark.parametrize("ctxs", [(AZ,), (AZ, AX), (AZ, AX, AY)])
def test_negation_matches_closed_form(ctxs):
    f = fam(*ctxs)
    for a in SLattice(f).elements:
        assert negate(embed_i(a, f)) == negate_closed_form(a, f)


@pytest.mark.parametrize("ctxs, expected", [((), 2), ((AZ,), 2), ((AZ, AX), 2)])
def test_lem_holds_only_at_top_and_bottom(ctxs, expected):
    f = fam(*ctxs) if ctxs else fam(C1)
    rep = lem_audit(f)
    assert rep.ok and rep.only_top_and_bottom
    assert len(rep.lem_holders) == expected
    assert {s.masks for s in rep.lem_holders} == {top(f).masks, bottom(f).masks}


def test_format_section(f_zx):
    text = format_section(embed_i(el(AZ, PZ_UP), f_zx), matrices=True)
    assert text.splitlines()[0] == "C1\t0\t0 0; 0 0"
    assert text.splitlines()[1].startswith("z\t10\t1 0; 0 0")


_ZXY = fam(AZ, AX, AY)
_SECS = enumerate_sections(_ZXY)
sections = st.sampled_from(_SECS)


@settings(max_examples=300, deadline=None)
@given(sections, sections, sections)
def test_distributive_and_heyting(a, b, c):
    assert lqm_meet(a, lqm_join(b, c)) == lqm_join(lqm_meet(a, b), lqm_meet(a, c))
    assert lqm_join(a, lqm_meet(b, c)) == lqm_meet(lqm_join(a, b), lqm_join(a, c))
    assert lqm_leq(lqm_meet(a, b), c) == lqm_leq(a, implies(b, c))


@settings(max_examples=100, deadline=None)
@given(sections)
def test_results_stay_monotone(a):
    # re-validating through the checked constructor
    Section(_ZXY, negate(a).masks)
    Section(_ZXY, implies(a, negate(a)).masks)
    assert lqm_meet(a, negate(a)) == bottom(_ZXY)
