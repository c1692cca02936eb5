"""Command-line front end: ``qexplogic <group> [<action>] SCENARIO``.

Every command prints plain TSV-ish text in canonical order.  Exit status is
0 on success, 1 when an audit or invariant check fails (or a computation is
refused by an enumeration bound), and 2 for usage and parse errors.
"""
from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from typing import Callable

from . import bell as bellmod
from . import clqm, cps, heyting
from .contexts import ContextError
from .linalg import DensityOperator, format_scalar
from .scenario import Scenario, ScenarioError, parse_scenario
from .slattice import BOTTOM, SLattice, SqmElement, distributivity_witness, hasse_dot

OK, FAILED, USAGE = 0, 1, 2


class Refused(Exception):
    """A computation would exceed a configured enumeration bound."""


def fmt(x) -> str:
    if x is None:
        return "-"
    if x is cps.INF:
        return "inf"
    if isinstance(x, (int, Fraction)):
        x = Fraction(x)
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return format_scalar(x)


def verdict(ok: bool) -> str:
    return "PASS" if ok else "FAIL"


def matrix_text(m) -> str:
    return "[" + "; ".join(" ".join(r) for r in m.to_strings()) + "]"


class Out:
    def __init__(self):
        self.lines: list[str] = []

    def row(self, *cells):
        self.lines.append("\t".join(str(c) for c in cells))

    def text(self) -> str:
        return "\n".join(self.lines) + ("\n" if self.lines else "")


# -- element selection -------------------------------------------------------

def _parse_element(spec: str, family) -> SqmElement:
    """``NAME:BITS`` with BITS the atom mask as printed (rightmost = atom 0)."""
    if spec in ("bot", "⊥"):
        return BOTTOM
    name, sep, bits = spec.partition(":")
    if not sep:
        raise ScenarioError(f"element must look like NAME:BITS, got {spec!r}")
    try:
        ctx = family.context(name)
    except KeyError:
        raise ScenarioError(f"unknown context {name!r} (known: {', '.join(family.names)})") from None
    if len(bits) != ctx.d or set(bits) - {"0", "1"}:
        raise ScenarioError(f"{name} has {ctx.d} atoms; BITS must be {ctx.d} binary digits")
    try:
        return SqmElement(ctx, int(bits, 2))
    except ContextError as exc:
        raise ScenarioError(str(exc)) from None


def _elements(args, family) -> list[SqmElement]:
    if args.element:
        return [_parse_element(e, family) for e in args.element]
    return [e for e in _lattice(family, args.scenario).elements if not e.is_bottom]


def _lattice(family, scn: Scenario) -> SLattice:
    try:
        return SLattice(family, limit=scn.options.enumeration_limit)
    except ContextError as exc:
        raise Refused(str(exc)) from None


def _sections(family, scn: Scenario):
    try:
        return heyting.enumerate_sections(family, scn.options.enumeration_limit)
    except ContextError as exc:
        raise Refused(str(exc)) from None


# -- commands ----------------------------------------------------------------

def cmd_validate(args, out: Out) -> int:
    scn: Scenario = args.scenario
    fam = scn.family()
    out.row("scenario", "OK")
    out.row("dim", scn.dim)
    out.row("contexts_given", len(scn.contexts))
    out.row("contexts_closed", len(fam))
    out.row("state_faithful", "yes" if scn.state.is_faithful() else "no")
    out.row("bell", "none" if scn.bell is None else f"alice={','.join(scn.bell[0])} bob={','.join(scn.bell[1])}")
    return OK


def cmd_close(args, out: Out) -> int:
    scn: Scenario = args.scenario
    fam = scn.family()
    given = {c for c in scn.seed()}
    out.row("index", "name", "atoms", "origin", "includes")
    for i, c in enumerate(fam.contexts):
        below = [fam.contexts[j].label() for j in range(len(fam)) if j != i and fam.incl[i][j]]
        origin = "given" if c in given else ("trivial" if i == 0 else "closure")
        out.row(i, c.label(), c.d, origin, ",".join(below) or "-")
    if args.matrices:
        for c in fam.contexts:
            for k, a in enumerate(c.atoms):
                out.row("atom", c.label(), k, matrix_text(a))
    return OK


def cmd_slattice_stats(args, out: Out) -> int:
    scn: Scenario = args.scenario
    fam = scn.family()
    lat = _lattice(fam, scn)
    out.row("contexts", len(fam))
    out.row("elements", len(lat))
    out.row("covers", len(lat.covers()))
    try:
        w = distributivity_witness(fam, limit=scn.options.enumeration_limit)
    except ContextError as exc:
        raise Refused(str(exc)) from None
    if w is None:
        out.row("distributive", "yes")
        return OK
    a, b, c = w
    out.row("distributive", "no")
    out.row("witness", f"a={a}", f"b={b}", f"c={c}")
    out.row("lhs", lat.meet(a, lat.join(b, c)))
    out.row("rhs", lat.join(lat.meet(a, b), lat.meet(a, c)))
    return OK


def cmd_slattice_hasse(args, out: Out) -> int:
    scn: Scenario = args.scenario
    fam = scn.family()
    _lattice(fam, scn)
    out.lines.extend(hasse_dot(fam, limit=scn.options.enumeration_limit).rstrip("\n").split("\n"))
    return OK


def cmd_lqm_enumerate(args, out: Out) -> int:
    scn: Scenario = args.scenario
    fam = scn.family()
    secs = _sections(fam, scn)
    out.row("sections", len(secs))
    out.row("index", *(c.label() for c in fam.contexts))
    for k, s in enumerate(secs):
        out.row(k, *(f"{m:0{c.d}b}" for c, m in zip(fam.contexts, s.masks)))
    return OK


def cmd_lqm_lem_audit(args, out: Out) -> int:
    scn: Scenario = args.scenario
    fam = scn.family()
    try:
        rep = heyting.lem_audit(fam, scn.options.enumeration_limit)
    except ContextError as exc:
        raise Refused(str(exc)) from None
    out.row("sections", rep.sections)
    out.row("lem_holds_for", len(rep.lem_holders))
    for s in rep.lem_holders:
        tag = "top" if s.is_top() else ("bottom" if s.is_bottom() else "other")
        out.row("holder", tag, s)
    out.row("only_top_and_bottom", "yes" if rep.only_top_and_bottom else "no")
    out.row("holders_are_top_or_negation_top", verdict(rep.characterization_ok))
    out.row("trivial_context_decides_top", verdict(rep.top_iff_trivial_ok))
    return OK if rep.ok else FAILED


def cmd_lqm_neg(args, out: Out) -> int:
    scn: Scenario = args.scenario
    fam = scn.family()
    out.row("element", "negation", "closed_form", "agree")
    bad = 0
    for a in _elements(args, fam):
        neg = heyting.negate(heyting.embed_i(a, fam))
        closed = heyting.negate_closed_form(a, fam)
        bad += neg != closed
        out.row(a, neg, closed, "yes" if neg == closed else "NO")
    return OK if bad == 0 else FAILED


def cmd_clqm_atoms(args, out: Out) -> int:
    scn: Scenario = args.scenario
    space = clqm.ExclusiveSpace(scn.family())
    out.row("index", "atom", "context", "d", "projection")
    for n, ex in enumerate(space.atoms):
        out.row(n, ex, ex.context.label(), ex.context.d, matrix_text(ex.atom))
    return OK


def cmd_clqm_lem_gap(args, out: Out) -> int:
    scn: Scenario = args.scenario
    fam = scn.family()
    space = clqm.ExclusiveSpace(fam)
    out.row("element", "gap", "described", "equal", "contains", "commuting_overlap_equal")
    for a in _elements(args, fam):
        g = clqm.lem_gap(a, space)
        out.row(a, space.format(g.gap), space.format(g.described),
                "yes" if g.matches_described else "no",
                "yes" if g.contains_described else "no",
                "yes" if g.matches_alternative else "no")
    return OK


def cmd_clqm_no_measurement(args, out: Out) -> int:
    scn: Scenario = args.scenario
    space = clqm.ExclusiveSpace(scn.family())
    rep = clqm.no_measurement_event(space, scan_limit=scn.options.enumeration_limit)
    out.row("event", space.format(rep.event))
    if rep.in_image is None:
        raise Refused(f"image scan needs more than {scn.options.enumeration_limit} sections")
    out.row("sections_scanned", rep.sections_scanned)
    out.row("image_of_some_section", "yes" if rep.in_image else "no")
    return FAILED if rep.in_image else OK


def _state(args) -> DensityOperator:
    scn: Scenario = args.scenario
    if getattr(args, "maximally_mixed", False):
        return DensityOperator.maximally_mixed(scn.dim)
    return scn.state


def cmd_cps_born(args, out: Out) -> int:
    scn: Scenario = args.scenario
    space = clqm.ExclusiveSpace(scn.family())
    model = cps.born_cps(_state(args), space, exclusive=args.exclusive)
    fam = space.family
    out.row("condition", "atom", "probability")
    for i, c in enumerate(model.conditions()):
        w = model.weights(c)
        name = ("F!_" if args.exclusive else "F_") + fam.contexts[i].label()
        for n in c:
            out.row(name, space.atoms[n], fmt(w[n]))
    return OK


def _cell(x, space) -> str:
    if isinstance(x, clqm.Event):
        return space.format(x)
    return x if isinstance(x, str) else fmt(x)


def _audit_limit(space, atoms: int, what: str):
    if space.size > atoms:
        raise Refused(f"{what} enumerates every event of a {space.size}-atom space; "
                      f"the bound is {atoms} atoms")


def cmd_cps_audit(args, out: Out) -> int:
    scn: Scenario = args.scenario
    space = clqm.ExclusiveSpace(scn.family())
    rho = _state(args)
    model = cps.born_cps(rho, space)
    if args.family is None:
        rep = cps.audit_axioms(model)
        out.row("model", rep.model)
        out.row("method", rep.method)
        out.row("conditions", rep.conditions)
        out.row("axiom1", verdict(rep.axiom1), rep.axiom1_checks)
        out.row("axiom2", verdict(rep.axiom2), rep.axiom2_checks)
        for f in rep.axiom1_failures[:5] + rep.axiom2_failures[:5]:
            out.row("counterexample", *(_cell(x, space) for x in f))
        return OK if rep.ok else FAILED

    _audit_limit(space, 10, "the family audit")
    mf = (cps.paper_delta_family if args.family == "paper" else cps.stratified_family)(rho, space)
    rep = cps.audit_family(mf, model)
    out.row("family", rep.family)
    out.row("indices", ",".join(str(i) for i in mf.indices))
    out.row("is_measure", verdict(rep.is_measure), f"{rep.measure_failure_count} failures")
    for i, f, g, union, parts in rep.measure_failures[:args.show]:
        out.row("counterexample", f"mu_{i}", space.format(f), space.format(g),
                f"mu(F u G) = {fmt(union)}", f"mu(F) + mu(G) = {fmt(parts)}")
    out.row("generates", verdict(rep.generates))
    for c, i, f, note in rep.generate_failures[:args.show]:
        out.row("counterexample", space.format(c), "-" if i is None else f"mu_{i}",
                "-" if f is None else space.format(f), note)
    out.row("ordered_ascending", verdict(rep.ascending))
    out.row("ordered_descending", verdict(rep.descending))
    out.row("orders_passing", " ".join(",".join(map(str, o)) for o in rep.orders_passing) or "none")
    out.row("literal_clause_orders", " ".join(",".join(map(str, o)) for o in rep.literal_clause_orders) or "none")
    return OK if rep.ok else FAILED


def cmd_cps_extend_full(args, out: Out) -> int:
    scn: Scenario = args.scenario
    space = clqm.ExclusiveSpace(scn.family())
    rho = _state(args)
    full = cps.extend_full(rho, space)
    born = cps.born_cps(rho, space)
    measured = list(born.conditions())
    mismatches = sum(full.weights(c) != born.weights(c) for c in measured)
    out.row("agrees_with_born", verdict(mismatches == 0), f"{len(measured)} conditions")
    out.row("state_faithful", "yes" if rho.is_faithful() else "no")
    _audit_limit(space, 16, "the full-extension audit")
    conds = list(full.conditions(limit=16))
    nonempty = (1 << space.size) - 1
    out.row("conditions", len(conds), f"of {nonempty} nonempty events")
    out.row("full", "yes" if len(conds) == nonempty else "no")
    rep = cps.audit_axioms(full)
    out.row("method", rep.method)
    out.row("axiom1", verdict(rep.axiom1), rep.axiom1_checks)
    out.row("axiom2", verdict(rep.axiom2), rep.axiom2_checks)
    return OK if rep.ok and mismatches == 0 else FAILED


def cmd_cps_noncontext(args, out: Out) -> int:
    scn: Scenario = args.scenario
    space = clqm.ExclusiveSpace(scn.family())
    rho = _state(args)
    rep = cps.noncontextuality_check(cps.born_cps(rho, space), reading=args.reading, rho=rho)
    out.row("reading", rep.reading)
    out.row("same_outcome_across_finer_contexts", verdict(not rep.eq24_failures),
            f"{rep.eq24_checks} checks", f"{len(rep.eq24_failures)} failures")
    for f in rep.eq24_failures[:args.show]:
        out.row("counterexample", f"{f[0]}:{f[1]:b}", f"given {f[2]} {fmt(f[4])}", f"given {f[3]} {fmt(f[5])}")
    out.row("same_projection_across_coarser_contexts", verdict(not rep.eq25_failures),
            f"{rep.eq25_checks} checks", f"{len(rep.eq25_failures)} failures")
    out.row("well_defined", verdict(rep.well_defined))
    out.row("normalized", verdict(rep.normalized))
    out.row("additive", verdict(not rep.additivity_failures), f"{rep.additivity_checks} orthogonal pairs")
    out.row("equals_trace", verdict(not rep.born_mismatches), f"{len(rep.values)} projections")
    if args.values:
        out.row("projection", "probability")
        for p in sorted(rep.values, key=lambda q: q.sort_key):
            out.row(matrix_text(p), fmt(rep.values[p]))
    return OK if rep.ok else FAILED


def cmd_cps_counterexamples(args, out: Out) -> int:
    scn: Scenario = args.scenario
    space = clqm.ExclusiveSpace(scn.family())
    dirac, trivial = cps.counterexample_models(space)
    fam = space.family
    out.row("model", dirac.name)
    avoid = [fam.contexts[i].label() for i in range(len(fam))
             if not dirac.is_condition(space.measured(i))]
    out.row("measurement_conditions_undefined", ",".join(avoid) or "none")
    out.row("model", trivial.name)
    _audit_limit(space, 6, "the trivial-model audit")
    rep = cps.audit_axioms(trivial, method="brute")
    out.row("conditions", rep.conditions)
    out.row("axiom1", verdict(rep.axiom1), rep.axiom1_checks)
    out.row("axiom2", verdict(rep.axiom2), rep.axiom2_checks)
    return OK if rep.ok else FAILED


def _bell(args) -> bellmod.BellScenario:
    scn: Scenario = args.scenario
    if scn.bell is None:
        raise ScenarioError("this scenario has no bell section")
    return scn.bell_scenario(_state(args))


def cmd_bell_chsh(args, out: Out) -> int:
    b = _bell(args)
    model = cps.born_cps(b.state, b.space)
    s = bellmod.chsh(b, model)
    for i in range(2):
        for j in range(2):
            cond = b.space.measured(b.joint(i, j))
            e = Fraction(0)
            for k in range(2):
                for l in range(2):
                    ev = clqm.Event(1 << b.outcome_atom(i, j, k, l), b.space.size)
                    e += (-1) ** (k + l) * model.prob(ev, cond)
            out.row(f"E{i + 1}{j + 1}", fmt(e))
    trace = (b.state @ bellmod.chsh_operator(b)).trace()
    out.row("S", fmt(s))
    out.row("|S|", fmt(abs(s)))
    out.row("classical_bound", 2)
    out.row("violation", "yes" if abs(s) > 2 else "no")
    out.row("trace_check", fmt(trace), verdict(trace == s))
    return OK if trace == s else FAILED


def cmd_bell_locality(args, out: Out) -> int:
    b = _bell(args)
    rep = bellmod.locality_audit(b, args.reading)
    out.row("reading", rep.reading)
    out.row("kind", "equality", "lhs", "rhs", "status")
    for e in rep.equalities:
        if e.holds is None:
            status = "skipped: " + e.skipped
        elif e.vacuous:
            status = "vacuous"
        else:
            status = "holds" if e.holds else "FAILS"
        out.row(e.kind, e.label, fmt(e.lhs), fmt(e.rhs), status)
    out.row("PI", "holds" if rep.pi_holds else "fails")
    out.row("OI", "holds" if rep.oi_holds else "fails")
    out.row("all_vacuous", "yes" if rep.all_vacuous else "no")
    return OK if rep.pi_holds and rep.oi_holds else FAILED


# -- parser ------------------------------------------------------------------

def _add(sub, name: str, func: Callable, help: str, **kw) -> argparse.ArgumentParser:
    p = sub.add_parser(name, help=help, **kw)
    p.add_argument("scenario", help="scenario file (YAML), or - for stdin")
    p.set_defaults(func=func)
    return p


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qexplogic", description=__doc__.split("\n")[0])
    groups = ap.add_subparsers(dest="group", required=True, metavar="COMMAND")

    _add(groups, "validate", cmd_validate, "parse and check a scenario")
    p = _add(groups, "close", cmd_close, "list the closed context family")
    p.add_argument("--matrices", action="store_true", help="also print every atom")

    sl = groups.add_parser("slattice", help="the lattice of experimental propositions")
    s = sl.add_subparsers(dest="action", required=True)
    _add(s, "stats", cmd_slattice_stats, "element count and a distributivity witness")
    _add(s, "hasse", cmd_slattice_hasse, "Hasse diagram as DOT")

    lq = groups.add_parser("lqm", help="the Heyting algebra of monotone sections")
    s = lq.add_subparsers(dest="action", required=True)
    _add(s, "enumerate", cmd_lqm_enumerate, "all sections")
    _add(s, "lem-audit", cmd_lqm_lem_audit, "which sections satisfy excluded middle")
    p = _add(s, "neg", cmd_lqm_neg, "negation of embedded elements, checked against the closed form")
    p.add_argument("--element", action="append", metavar="NAME:BITS")

    cl = groups.add_parser("clqm", help="the Boolean logic of exclusive atoms")
    s = cl.add_subparsers(dest="action", required=True)
    _add(s, "atoms", cmd_clqm_atoms, "the exclusive atoms")
    p = _add(s, "lem-gap", cmd_clqm_lem_gap, "events missed by S or not S")
    p.add_argument("--element", action="append", metavar="NAME:BITS")
    _add(s, "no-measurement", cmd_clqm_no_measurement, "the no-measurement event")

    cp = groups.add_parser("cps", help="conditional probability spaces")
    s = cp.add_subparsers(dest="action", required=True)
    p = _add(s, "born", cmd_cps_born, "Born conditional probabilities (TSV)")
    p.add_argument("--exclusive", action="store_true", help="condition on exact-context events")
    p = _add(s, "audit", cmd_cps_audit, "axioms of the Born CPS, or a measure family")
    p.add_argument("--family", choices=("paper", "stratified"))
    p.add_argument("--show", type=int, default=3, help="counterexamples to print")
    _add(s, "extend-full", cmd_cps_extend_full, "the full extension and its axioms")
    p = _add(s, "noncontext", cmd_cps_noncontext, "context independence of Born probabilities")
    p.add_argument("--reading", choices=("event", "literal"), default="event")
    p.add_argument("--values", action="store_true", help="print the extracted probability of every projection")
    p.add_argument("--show", type=int, default=3)
    _add(s, "counterexamples", cmd_cps_counterexamples, "the Dirac and trivial models")
    for sp in s.choices.values():
        sp.add_argument("--maximally-mixed", action="store_true", help="replace the state by 1/dim")

    be = groups.add_parser("bell", help="the two-qubit Bell scenario")
    s = be.add_subparsers(dest="action", required=True)
    _add(s, "chsh", cmd_bell_chsh, "exact CHSH value")
    p = _add(s, "locality", cmd_bell_locality, "parameter and outcome independence")
    p.add_argument("--reading", choices=("literal", "event"), default="event")
    for sp in s.choices.values():
        sp.add_argument("--maximally-mixed", action="store_true", help="replace the state by 1/4")
    return ap


def _read(path: str) -> tuple[str, str]:
    if path == "-":
        return "<stdin>", sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return path, fh.read()


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    try:
        name, text = _read(args.scenario)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    out = Out()
    try:
        args.scenario = parse_scenario(text)
        code = args.func(args, out)
    except ScenarioError as exc:
        print(f"error: {name}: {exc}", file=sys.stderr)
        return USAGE
    except (Refused, ContextError) as exc:
        # whatever was computed before the bound was hit is still reported
        sys.stdout.write(out.text())
        print(f"refused: {exc}", file=sys.stderr)
        return FAILED
    sys.stdout.write(out.text())
    return code


if __name__ == "__main__":
    sys.exit(main())
