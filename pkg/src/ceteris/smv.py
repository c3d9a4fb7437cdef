"""SMV model emission and external model checker runs.

The emitted module follows the layout NuSMV users expect for flip models:
one state variable per preference variable, a ``g`` marker set on
improving transitions, frozen ``x_0`` copies pinning the start state and a
``chx`` input per variable selecting which variables may move.

NuSMV ``case`` blocks are first-match.  When two statements share a ``ch``
pattern, can fire in the same state, and would move variables differently,
the earlier one would mask the later.  Guards of such statements get an
extra ``sel=i`` conjunct over an input variable ``sel`` so every statement
keeps its own transitions.  Specs without such overlaps emit no ``sel``.
"""

from __future__ import annotations

import os
import re
import shutil
import subprocess
import tempfile
from dataclasses import dataclass, field
from typing import Sequence

from .errors import CheckerNotFound, CheckerParseFailure, VariableMismatch
from .model import Outcome, PreferenceSpec, PreferenceStatement, Query, QueryKind, id_key
from .semantics import Flip, is_improving_flip

SMV_KEYWORDS = frozenset("""
MODULE DEFINE MDEFINE CONSTANTS VAR IVAR FROZENVAR INIT TRANS INVAR SPEC CTLSPEC
LTLSPEC PSLSPEC COMPUTE NAME INVARSPEC FAIRNESS JUSTICE COMPASSION ISA ASSIGN
CONSTRAINT SIMPWFF CTLWFF LTLWFF PSLWFF COMPWFF IN MIN MAX MIRROR PRED PREDICATES
process array of boolean integer real word word1 bool signed unsigned extend
resize sizeof uwconst swconst EX AX EF AF EG AG E F O G H X Y Z A U S V T BU EBF
ABF EBG ABG case esac mod next init union in xor xnor self TRUE FALSE count abs
max min toint floor
""".split())
MARKERS = ("g", "g1", "g2", "start", "sel")

_INT_RE = re.compile(r"^-?[0-9]+$")


@dataclass(frozen=True)
class SmvDocument:
    """Module text plus the CTL specifications to check against it.

    ``names`` maps preference variables to SMV identifiers and ``values``
    maps (variable, value) pairs to SMV constants; both are the identity
    unless a clash forced a rename, in which case ``notes`` says so.
    """

    text: str
    specs: tuple[str, ...] = ()
    notes: tuple[str, ...] = ()
    names: dict = field(default_factory=dict, compare=False)
    values: dict = field(default_factory=dict, compare=False)

    def with_specs(self, specs: Sequence[str]) -> "SmvDocument":
        return SmvDocument(self.text, self.specs + tuple(specs), self.notes, self.names, self.values)

    def render(self) -> str:
        out = self.text
        if self.specs:
            out += "\n" + "\n".join(self.specs) + "\n"
        return out

    def decode(self, state: dict) -> dict:
        """Translate an SMV state (identifier -> constant) back to preference terms."""
        back = {v: k for k, v in self.names.items()}
        vback = {(var, smv): val for (var, val), smv in self.values.items()}
        out = {}
        for ident, const in state.items():
            if ident in back:
                var = back[ident]
                out[var] = vback.get((var, const), const)
        return out


class _Naming:
    def __init__(self, spec: PreferenceSpec):
        originals = set(spec.variable_names)
        used = set(SMV_KEYWORDS) | set(MARKERS)
        self.names: dict[str, str] = {}
        self.notes: list[str] = []
        for name in spec.variable_names:
            cand, k = name, 0
            while (cand in used or f"ch{cand}" in used | originals - {name}
                   or f"{cand}_0" in used | originals - {name}
                   or (cand != name and cand in originals)):
                k += 1
                cand = f"{name}_v" if k == 1 else f"{name}_v{k}"
            if cand != name:
                self.notes.append(f"variable {name} emitted as {cand}")
            self.names[name] = cand
            used |= {cand, f"ch{cand}", f"{cand}_0"}
        self.values: dict[tuple[str, str], str] = {}
        for var in spec.variables:
            for val in var.domain:
                smv = val
                if not _INT_RE.match(val):
                    k = 0
                    while smv in used:
                        k += 1
                        smv = f"{val}_c" if k == 1 else f"{val}_c{k}"
                    if smv != val:
                        self.notes.append(f"value {val} of {var.name} emitted as {smv}")
                self.values[(var.name, val)] = smv
            used |= {self.values[(var.name, v)] for v in var.domain if not _INT_RE.match(v)}

    def var(self, name: str) -> str:
        return self.names[name]

    def val(self, name: str, value: str) -> str:
        return self.values[(name, value)]

    def domain(self, spec: PreferenceSpec, name: str) -> str:
        return "{" + ",".join(self.val(name, v) for v in spec.variable(name).domain) + "}"


@dataclass(frozen=True)
class _Rule:
    """One guarded transition: a statement, possibly reversed, tagged with its marker."""

    st: PreferenceStatement
    marker: str

    @property
    def moves(self) -> frozenset:
        return frozenset({self.st.target}) | self.st.less_important

    def enabling(self) -> dict:
        out = dict(self.st.condition)
        out[self.st.target] = self.st.worse
        return out

    def effect(self):
        return (self.marker, self.st.target, self.st.better, self.st.less_important)


def _clash(r: _Rule, s: _Rule) -> bool:
    if r.moves != s.moves or r.effect() == s.effect():
        return False
    a, b = r.enabling(), s.enabling()
    return all(a[k] == b[k] for k in a.keys() & b.keys())


def _selectors(rules: list[_Rule]) -> tuple[dict[int, int], int]:
    """Assign ``sel`` values to rules inside ch-groups that contain a clash."""
    groups: dict[frozenset, list[int]] = {}
    for i, r in enumerate(rules):
        groups.setdefault(r.moves, []).append(i)
    sel: dict[int, int] = {}
    width = 0
    for members in groups.values():
        if any(_clash(rules[i], rules[j]) for i in members for j in members if i < j):
            for k, i in enumerate(members):
                sel[i] = k
            width = max(width, len(members))
    return sel, width


def _guard(spec: PreferenceSpec, nm: _Naming, rule: _Rule, sel: int | None) -> str:
    st = rule.st
    parts = [f"{nm.var(st.target)}={nm.val(st.target, st.worse)}"]
    parts += [f"{nm.var(n)}={nm.val(n, v)}" for n, v in st.condition]
    parts += [f"ch{nm.var(n)}={1 if n in rule.moves else 0}" for n in spec.variable_names]
    if sel is not None:
        parts.append(f"sel={sel}")
    return " & ".join(parts)


def _module(spec: PreferenceSpec, rules: list[_Rule], markers: Sequence[str]) -> SmvDocument:
    nm = _Naming(spec)
    sel, width = _selectors(rules)
    guards = [_guard(spec, nm, r, sel.get(i)) for i, r in enumerate(rules)]

    lines = ["MODULE main", "VAR"]
    for n in spec.variable_names:
        lines.append(f"  {nm.var(n)} : {nm.domain(spec, n)};")
    for m in markers:
        lines.append(f"  {m} : {{0,1}};")
    lines.append("FROZENVAR")
    for n in spec.variable_names:
        lines.append(f"  {nm.var(n)}_0 : {nm.domain(spec, n)};")
    lines.append("IVAR")
    for n in spec.variable_names:
        lines.append(f"  ch{nm.var(n)} : {{0,1}};")
    if width:
        lines.append(f"  sel : 0..{width - 1};")
    lines.append("DEFINE")
    start = " & ".join(f"{nm.var(n)}={nm.var(n)}_0" for n in spec.variable_names)
    lines.append(f"  start := {start};")
    lines.append("INIT start=TRUE;")
    lines.append("ASSIGN")
    for n in spec.variable_names:
        x = nm.var(n)
        lines.append(f"  next({x}) := case")
        for r, gd in zip(rules, guards):
            if r.st.target == n:
                lines.append(f"    {gd} : {nm.val(n, r.st.better)};")
        for r, gd in zip(rules, guards):
            if n in r.st.less_important:
                lines.append(f"    {gd} : {nm.domain(spec, n)};")
        lines.append(f"    TRUE : {x};")
        lines.append("  esac;")
    for m in markers:
        lines.append(f"  next({m}) := case")
        for r, gd in zip(rules, guards):
            if r.marker == m:
                lines.append(f"    {gd} : 1;")
        lines.append("    TRUE: 0;")
        lines.append("  esac;")
    notes = list(nm.notes)
    if width:
        notes.append(f"input sel added to separate {len(sel)} overlapping guards")
    return SmvDocument("\n".join(lines) + "\n", (), tuple(notes), dict(nm.names), dict(nm.values))


def _reverse(st: PreferenceStatement) -> PreferenceStatement:
    return PreferenceStatement(st.id, st.target, st.worse, st.better, st.condition, st.less_important)


def emit_smv(spec: PreferenceSpec) -> SmvDocument:
    """The Kripke model of ``spec``'s flips, marker ``g``."""
    return _module(spec, [_Rule(st, "g") for st in spec.check().statements], ("g",))


def emit_smv_combined(p1: PreferenceSpec, p2: PreferenceSpec) -> SmvDocument:
    """P1's flips (marker ``g1``) together with P2's flips reversed (marker ``g2``)."""
    if not p1.same_variables(p2):
        raise VariableMismatch(f"{p1.name} and {p2.name} declare different variables")
    rules = [_Rule(st, "g1") for st in p1.check().statements]
    rules += [_Rule(_reverse(st), "g2") for st in p2.check().statements]
    return _module(p1, rules, ("g1", "g2"))


def _phi(doc: SmvDocument, outcome: Outcome) -> str:
    names, values = doc.names or {}, doc.values or {}
    return "(" + " & ".join(
        f"{names.get(n, n)}={values.get((n, v), v)}" for n, v in outcome.items) + ")"


DOMINANCE_CTL = "SPEC {beta} -> EF {alpha}"
CONSISTENCY_CTL = "SPEC start -> !(EX (g=1 & EF start))"
SUBSUMPTION_CTL = "SPEC AX ( g1 -> EX E [ g2 U (start & g2) ] )"


def emit_ctl(query: Query, doc: SmvDocument | None = None) -> list[str]:
    """CTL specifications for ``query``.

    Dominance yields the formula followed by its negation, whose
    counterexample is the flip sequence.  Subsumption and equivalence
    formulas refer to a combined module.
    """
    if query.kind is QueryKind.DOMINANCE:
        doc = doc or SmvDocument("")
        body = DOMINANCE_CTL.format(beta=_phi(doc, query.worse), alpha=_phi(doc, query.better))
        return [body, f"SPEC !({body[len('SPEC '):]})"]
    if query.kind is QueryKind.CONSISTENCY:
        return [CONSISTENCY_CTL]
    return [SUBSUMPTION_CTL]


def emit_for_query(query: Query, specs: Sequence[PreferenceSpec]) -> list[SmvDocument]:
    """Documents ready to hand to a checker; equivalence needs one per direction."""
    if query.kind in (QueryKind.DOMINANCE, QueryKind.CONSISTENCY):
        doc = emit_smv(specs[0])
        return [doc.with_specs(emit_ctl(query, doc))]
    p1, p2 = specs
    docs = [emit_smv_combined(p1, p2)]
    if query.kind is QueryKind.EQUIVALENCE:
        docs.append(emit_smv_combined(p2, p1))
    return [d.with_specs(emit_ctl(query, d)) for d in docs]


@dataclass(frozen=True)
class CheckerVerdict:
    formula: str
    holds: bool
    trace: str = ""
    states: tuple = ()


_SPEC_LINE = re.compile(r"^-- specification (.*) is (true|false)\s*$")
_STATE_LINE = re.compile(r"^\s*->\s*State:\s*\S+\s*<-\s*$")
_INPUT_LINE = re.compile(r"^\s*->\s*Input:\s*\S+\s*<-\s*$")
_ASSIGN_LINE = re.compile(r"^\s*([A-Za-z_][\w.$#\[\]-]*)\s*=\s*(\S+)\s*$")


def _trace_states(trace: str) -> tuple:
    """Rebuild full states from a delta-encoded trace."""
    states = []
    current: dict = {}
    mode = None
    for line in trace.splitlines():
        if _STATE_LINE.match(line):
            if mode == "state":
                states.append(dict(current))
            mode = "state"
            continue
        if _INPUT_LINE.match(line):
            if mode == "state":
                states.append(dict(current))
            mode = "input"
            continue
        m = _ASSIGN_LINE.match(line)
        if m and mode == "state":
            current[m.group(1)] = m.group(2)
    if mode == "state":
        states.append(dict(current))
    return tuple(states)


def parse_checker_output(raw: str) -> list[CheckerVerdict]:
    verdicts: list[CheckerVerdict] = []
    pending = None
    trace: list[str] = []

    def close():
        if pending is not None:
            text = "\n".join(trace)
            verdicts.append(CheckerVerdict(pending[0], pending[1], text, _trace_states(text)))

    for line in raw.splitlines():
        m = _SPEC_LINE.match(line.strip())
        if m:
            close()
            pending = (m.group(1).strip(), m.group(2) == "true")
            trace = []
        elif pending is not None:
            trace.append(line)
    close()
    if not verdicts:
        raise CheckerParseFailure("no specification results found in checker output", raw)
    return verdicts


def run_external(doc: SmvDocument, checker: str, timeout: float | None = 600) -> list[CheckerVerdict]:
    """Write ``doc`` to a temporary file, run ``checker FILE`` and parse its verdicts."""
    exe = shutil.which(checker) or (checker if os.path.isfile(checker) and os.access(checker, os.X_OK) else None)
    if exe is None:
        raise CheckerNotFound(f"model checker {checker!r} not found or not executable")
    fd, path = tempfile.mkstemp(suffix=".smv", prefix="ceteris-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(doc.render())
        proc = subprocess.run([exe, path], capture_output=True, text=True, timeout=timeout)
    finally:
        os.unlink(path)
    raw = proc.stdout + ("\n" + proc.stderr if proc.stderr else "")
    try:
        return parse_checker_output(proc.stdout)
    except CheckerParseFailure:
        raise CheckerParseFailure(
            f"checker exited with status {proc.returncode} and no parsable verdicts", raw) from None


def trace_outcomes(doc: SmvDocument, spec: PreferenceSpec, verdict: CheckerVerdict) -> list[Outcome]:
    """Outcomes visited by a trace, with stuttering steps collapsed."""
    out: list[Outcome] = []
    for state in verdict.states:
        values = doc.decode(state)
        if set(values) != set(spec.variable_names):
            continue
        o = Outcome.of(spec, values)
        if not out or out[-1] != o:
            out.append(o)
    return out


def trace_flips(spec: PreferenceSpec, outcomes: Sequence[Outcome]) -> list[Flip]:
    """Label consecutive outcomes with their least licensing statement.

    Raises CheckerParseFailure if some step is not an improving flip.
    """
    flips = []
    for a, b in zip(outcomes, outcomes[1:]):
        ids = is_improving_flip(spec, a, b)
        if not ids:
            raise CheckerParseFailure(f"trace step {a} -> {b} is not an improving flip")
        flips.append(Flip(a, b, min(ids, key=id_key)))
    return flips
