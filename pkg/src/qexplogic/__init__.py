"""Exact finite-dimensional models of contextual quantum logics.

The package is layered: :mod:`linalg` (exact Q(i) matrices), :mod:`contexts`
(Abelian algebras as atomic decompositions, closed families),
:mod:`slattice` (experimental propositions), :mod:`heyting` (the Heyting
algebra of monotone sections), :mod:`clqm` (Boolean logic of exclusive
atoms), :mod:`cps` (conditional probability spaces) and :mod:`bell`.
"""
from .bell import BellScenario, chsh, locality_audit, singlet
from .clqm import Event, ExclusiveSpace, c_map, c_of_i, lem_gap
from .contexts import Context, ContextError, ContextFamily, close_family, make_context
from .cps import INF, ConditionalModel, audit_axioms, born_cps, extend_full, noncontextuality_check
from .heyting import Section, embed_i, enumerate_sections, implies, lem_audit, negate
from .linalg import DensityOperator, GaussianRational, Projection, QMatrix, parse_scalar
from .scenario import Scenario, ScenarioError, emit_scenario, load_scenario, parse_scenario
from .slattice import BOTTOM, SLattice, SqmElement, distributivity_witness

__version__ = "0.1.0"

__all__ = [
    "BOTTOM", "BellScenario", "ConditionalModel", "Context", "ContextError", "ContextFamily",
    "DensityOperator", "Event", "ExclusiveSpace", "GaussianRational", "INF", "Projection",
    "QMatrix", "SLattice", "Scenario", "ScenarioError", "Section", "SqmElement",
    "audit_axioms", "born_cps", "c_map", "c_of_i", "chsh", "close_family",
    "distributivity_witness", "embed_i", "emit_scenario", "enumerate_sections",
    "extend_full", "implies", "lem_audit", "lem_gap", "load_scenario", "locality_audit",
    "make_context", "negate", "noncontextuality_check", "parse_scalar", "parse_scenario",
    "singlet",
]
