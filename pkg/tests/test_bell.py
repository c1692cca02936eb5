from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qexplogic.bell import BellScenario, chsh, chsh_operator, extended_conditions, locality_audit, singlet
from qexplogic.clqm import c_of_i
from qexplogic.cps import born_cps
from qexplogic.linalg import DensityOperator, GaussianRational, Projection, kron, qubit_spin_projection
from qexplogic.slattice import SqmElement

F = Fraction


@pytest.fixture(scope="module")
def bell():
    return BellScenario.default()


def test_joints_are_generated_algebras(bell):
    for i in range(2):
        for j in range(2):
            ctx = bell.family.contexts[bell.joint(i, j)]
            assert ctx.d == 4
            assert set(ctx.atoms) == {bell.alice[i][k] @ bell.bob[j][l] for k in range(2) for l in range(2)}


def test_correlator_oracle(bell):
    # E(a, b) = -a.b for the singlet, computed here straight from traces
    m = born_cps(bell.state, bell.space)
    dirs_a = [(0, 0, 1), (1, 0, 0)]
    dirs_b = [(F(3, 5), 0, F(4, 5)), (F(-3, 5), 0, F(4, 5))]
    for i in range(2):
        for j in range(2):
            dot = sum(x * y for x, y in zip(dirs_a[i], dirs_b[j]))
            e = sum((-1) ** (k + l) * bell.state.expectation(bell.alice[i][k] @ bell.bob[j][l])
                    for k in range(2) for l in range(2))
            assert e == -dot
            c = bell.space.measured(bell.joint(i, j))
            for k in range(2):
                for l in range(2):
                    f = bell.space.event([bell.outcome_atom(i, j, k, l)])
                    same = 1 if k == l else -1
                    assert m.prob(f, c) == (1 - same * dot) / 4


def test_chsh_singlet(bell):
    s = chsh(bell)
    assert s == F(-14, 5) and abs(s) > 2
    assert s == (bell.state @ chsh_operator(bell)).trace()


def test_chsh_mixed(bell):
    assert chsh(bell.with_state(DensityOperator.maximally_mixed(4))) == 0


def test_chsh_product_state_respects_bound():
    up = qubit_spin_projection((0, 0, 1))
    z = (0, 0, 1)
    scn = BellScenario.from_directions(z, z, z, z, state=DensityOperator(kron(up, up).rows))
    assert abs(chsh(scn)) <= 2
    assert chsh(scn) == 2


small = st.fractions(min_value=-2, max_value=2, max_denominator=3)


@settings(max_examples=15, deadline=None)
@given(st.lists(st.tuples(small, small), min_size=4, max_size=4).filter(
    lambda v: any(a or b for a, b in v)))
def test_chsh_equals_operator_trace(vec):
    rho = DensityOperator.pure([GaussianRational(a, b) for a, b in vec])
    scn = BellScenario.default().with_state(rho)
    assert chsh(scn) == (rho @ chsh_operator(scn)).trace()


@settings(max_examples=10, deadline=None)
@given(st.lists(st.tuples(small, small), min_size=4, max_size=4).filter(
    lambda v: any(a or b for a, b in v)))
def test_parameter_independence_for_any_state(vec):
    rho = DensityOperator.pure([GaussianRational(a, b) for a, b in vec])
    rep = locality_audit(BellScenario.default().with_state(rho), "event")
    for e in rep.of("PI"):
        assert e.holds in (True, None)


def test_extended_conditions(bell):
    conds = extended_conditions(bell.family, bell.space)
    assert bell.space.full in conds
    assert bell.space.measured(bell.joint(0, 0)) in conds
    joint = bell.family.contexts[bell.joint(0, 0)]
    f = c_of_i(SqmElement.of(joint, bell.bob[0][0]), bell.space)
    assert len(f) == 2 and f in conds


def test_locality_event_reading(bell):
    rep = locality_audit(bell, "event")
    assert len(rep.of("PI")) == 4 and len(rep.of("OI")) == 16
    assert rep.pi_holds and all(e.lhs == e.rhs == F(1, 2) for e in rep.of("PI"))
    assert not rep.oi_holds
    first = rep.first_failure("OI")
    assert (first.lhs, first.rhs) == (F(1, 2), F(1, 10))


def test_locality_literal_reading_is_vacuous(bell):
    rep = locality_audit(bell, "literal")
    assert rep.all_vacuous and rep.pi_holds and rep.oi_holds
    assert all(e.lhs == e.rhs == 0 for e in rep.equalities)


def test_locality_mixed_state(bell):
    rep = locality_audit(bell.with_state(DensityOperator.maximally_mixed(4)), "event")
    assert rep.pi_holds and rep.oi_holds


def test_bad_reading_rejected(bell):
    with pytest.raises(ValueError):
        locality_audit(bell, "other")


def test_measurements_must_be_complementary():
    up = qubit_spin_projection((0, 0, 1))
    one = Projection.identity(2)
    p = kron(up, one)
    with pytest.raises(ValueError):
        BellScenario(((p, p), (p, p)), ((p, p), (p, p)), singlet())
