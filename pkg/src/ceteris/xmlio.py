"""Reading and writing the XML dialects.

Specification files use the tag vocabulary below::

    <PREFERENCE-SPECIFICATION NAME="P1">
      <VARIABLE>
        <NAME>a</NAME>
        <DOMAIN-VALUE>0</DOMAIN-VALUE>
        <DOMAIN-VALUE>1</DOMAIN-VALUE>
      </VARIABLE>
      <PREFERENCE-STATEMENT>
        <STATEMENT-ID>p3</STATEMENT-ID>
        <VARIABLE>c</VARIABLE>
        <CONDITION>b=0</CONDITION>
        <PREFERENCE>0:1</PREFERENCE>
        <REGARDLESS-OF>a</REGARDLESS-OF>
      </PREFERENCE-STATEMENT>
    </PREFERENCE-SPECIFICATION>

Query and result documents are described in the README.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from .errors import (
    IncompleteOutcome,
    MalformedCondition,
    MalformedPreference,
    MalformedXml,
    UndefinedValue,
    UndefinedVariable,
    UnknownQueryKind,
)
from .model import (
    Outcome,
    PreferenceSpec,
    PreferenceStatement,
    Query,
    QueryKind,
    QueryResult,
    Variable,
)
from .proofs import Proof, ProofKind

SPEC_ROOT = "PREFERENCE-SPECIFICATION"
QUERY_ROOT = "PREFERENCE-QUERY"
RESULT_ROOT = "RESULT"


def _parse_xml(text: str | bytes) -> ET.Element:
    try:
        return ET.fromstring(text)
    except ET.ParseError as exc:
        raise MalformedXml(f"not well-formed XML: {exc}") from None


def _text(el: ET.Element) -> str:
    return (el.text or "").strip()


def _only(parent: ET.Element, tag: str, where: str) -> str:
    found = parent.findall(tag)
    if len(found) != 1:
        raise MalformedXml(f"{where}: expected exactly one <{tag}>, found {len(found)}")
    value = _text(found[0])
    if not value:
        raise MalformedXml(f"{where}: <{tag}> is empty")
    return value


def parse_variable(el: ET.Element) -> Variable:
    """One ``<VARIABLE>`` declaration with its ``<DOMAIN-VALUE>`` children."""
    name = _only(el, "NAME", "VARIABLE")
    values = [_text(d) for d in el.findall("DOMAIN-VALUE")]
    if any(not v for v in values):
        raise MalformedXml(f"variable {name!r}: empty <DOMAIN-VALUE>")
    return Variable(name, tuple(values))


def _split_pair(text: str, sep: str, error, what: str) -> tuple[str, str]:
    left, found, right = text.partition(sep)
    left, right = left.strip(), right.strip()
    if not found or not left or not right:
        raise error(f"{what} {text!r} is not of the form 'x{sep}y'")
    return left, right


def parse_assignment(text: str, where: str = "outcome") -> dict[str, str]:
    """Parse ``"a=0,b=1"`` into a mapping; the same grammar as CONDITION."""
    out: dict[str, str] = {}
    for part in text.split(","):
        if not part.strip():
            continue
        name, value = _split_pair(part, "=", MalformedCondition, where)
        if name in out:
            raise MalformedCondition(f"{where}: variable {name!r} assigned twice")
        out[name] = value
    return out


def _declared(variables: Mapping[str, Variable], name: str, value: str | None, where: str):
    if name not in variables:
        raise UndefinedVariable(name, where)
    if value is not None and value not in variables[name].domain:
        raise UndefinedValue(name, value, where)


def parse_statement(el: ET.Element, variables: Mapping[str, Variable]) -> list[PreferenceStatement]:
    """One ``<PREFERENCE-STATEMENT>``; several PREFERENCE children expand to ``id#k``."""
    sid = _only(el, "STATEMENT-ID", "PREFERENCE-STATEMENT")
    where = f"statement {sid}"
    target = _only(el, "VARIABLE", where)
    _declared(variables, target, None, where)

    cond = []
    for c in el.findall("CONDITION"):
        name, value = _split_pair(_text(c), "=", MalformedCondition, f"{where}: condition")
        _declared(variables, name, value, where)
        cond.append((name, value))

    omega = []
    for r in el.findall("REGARDLESS-OF"):
        name = _text(r)
        if not name:
            raise MalformedXml(f"{where}: empty <REGARDLESS-OF>")
        _declared(variables, name, None, where)
        omega.append(name)

    prefs = el.findall("PREFERENCE")
    if not prefs:
        raise MalformedPreference(f"{where}: no <PREFERENCE> element")
    out = []
    for k, p in enumerate(prefs, 1):
        better, worse = _split_pair(_text(p), ":", MalformedPreference, f"{where}: preference")
        _declared(variables, target, better, where)
        _declared(variables, target, worse, where)
        ident = sid if len(prefs) == 1 else f"{sid}#{k}"
        out.append(PreferenceStatement(ident, target, better, worse, tuple(cond), frozenset(omega)))
    return out


def parse_spec(text: str | bytes, default_name: str = "P") -> PreferenceSpec:
    """Parse a specification document and validate it.

    The specification is named by the root's NAME attribute, else ``default_name``.
    Raises an XmlError subclass for problems the parser detects itself and
    SpecError for anything further that validation rejects.
    """
    root = _parse_xml(text)
    if root.tag != SPEC_ROOT:
        raise MalformedXml(f"root element must be <{SPEC_ROOT}>, found <{root.tag}>")
    variables: dict[str, Variable] = {}
    order: list[Variable] = []
    statements: list[PreferenceStatement] = []
    for child in root:
        if child.tag == "VARIABLE":
            var = parse_variable(child)
            variables.setdefault(var.name, var)
            order.append(var)
        elif child.tag == "PREFERENCE-STATEMENT":
            statements.extend(parse_statement(child, variables))
        else:
            raise MalformedXml(f"unexpected element <{child.tag}> in <{SPEC_ROOT}>")
    spec_name = root.get("NAME") or default_name
    return PreferenceSpec(spec_name, tuple(order), tuple(statements)).check()


def load_spec(path: str | Path) -> PreferenceSpec:
    path = Path(path)
    return parse_spec(path.read_bytes(), default_name=path.stem)


def _pretty(root: ET.Element) -> str:
    ET.indent(root, space="  ")
    return '<?xml version="1.0" encoding="UTF-8"?>\n' + ET.tostring(root, encoding="unicode") + "\n"


def emit_spec(spec: PreferenceSpec) -> str:
    root = ET.Element(SPEC_ROOT, NAME=spec.name)
    for var in spec.variables:
        v = ET.SubElement(root, "VARIABLE")
        ET.SubElement(v, "NAME").text = var.name
        for val in var.domain:
            ET.SubElement(v, "DOMAIN-VALUE").text = val
    for st in spec.statements:
        s = ET.SubElement(root, "PREFERENCE-STATEMENT")
        ET.SubElement(s, "STATEMENT-ID").text = st.id
        ET.SubElement(s, "VARIABLE").text = st.target
        for n, v in st.condition:
            ET.SubElement(s, "CONDITION").text = f"{n}={v}"
        ET.SubElement(s, "PREFERENCE").text = f"{st.better}:{st.worse}"
        for n in sorted(st.less_important, key=spec.variable_names.index):
            ET.SubElement(s, "REGARDLESS-OF").text = n
    return _pretty(root)


@dataclass(frozen=True)
class QueryDocument:
    """A parsed query file; outcomes stay textual until bound to a spec."""

    kind: QueryKind
    spec_files: tuple[str, ...] = ()
    better: dict = field(default_factory=dict)
    worse: dict = field(default_factory=dict)

    def resolve(self, specs: Sequence[PreferenceSpec]) -> Query:
        refs = tuple(s.name for s in specs)
        if self.kind is not QueryKind.DOMINANCE:
            return Query(self.kind, refs)
        spec = specs[0]
        better = resolve_outcome(spec, self.better, "BETTER-OUTCOME")
        worse = resolve_outcome(spec, self.worse, "WORSE-OUTCOME")
        return Query(self.kind, refs, better, worse)


def resolve_outcome(spec: PreferenceSpec, values: Mapping[str, str], where: str = "outcome") -> Outcome:
    for name, value in values.items():
        if not spec.has_variable(name):
            raise UndefinedVariable(name, where)
        if value not in spec.variable(name).domain:
            raise UndefinedValue(name, value, where)
    missing = [n for n in spec.variable_names if n not in values]
    if missing:
        raise IncompleteOutcome(f"{where} does not assign {', '.join(missing)}")
    return Outcome.of(spec, values)


def parse_query(text: str | bytes, specs: Sequence[PreferenceSpec] | None = None):
    """Parse a query document.

    Returns a QueryDocument, or a bound Query when ``specs`` is supplied.
    """
    root = _parse_xml(text)
    if root.tag != QUERY_ROOT:
        raise MalformedXml(f"root element must be <{QUERY_ROOT}>, found <{root.tag}>")
    raw_kind = (root.get("KIND") or "").strip().upper()
    try:
        kind = QueryKind(raw_kind)
    except ValueError:
        raise UnknownQueryKind(f"unknown query kind {raw_kind!r}") from None
    files = tuple(_text(f) for f in root.findall("SPEC-FILE"))
    better: dict = {}
    worse: dict = {}
    if kind is QueryKind.DOMINANCE:
        better = parse_assignment(_only(root, "BETTER-OUTCOME", QUERY_ROOT), "BETTER-OUTCOME")
        worse = parse_assignment(_only(root, "WORSE-OUTCOME", QUERY_ROOT), "WORSE-OUTCOME")
    doc = QueryDocument(kind, files, better, worse)
    return doc if specs is None else doc.resolve(specs)


def emit_query(query: Query, spec_files: Sequence[str] = ()) -> str:
    root = ET.Element(QUERY_ROOT, KIND=query.kind.value)
    for f in spec_files:
        ET.SubElement(root, "SPEC-FILE").text = str(f)
    if query.kind is QueryKind.DOMINANCE:
        ET.SubElement(root, "BETTER-OUTCOME").text = str(query.better)
        ET.SubElement(root, "WORSE-OUTCOME").text = str(query.worse)
    return _pretty(root)


def _outcomes(parent: ET.Element, proof: Proof):
    first = proof.steps[0].source
    ET.SubElement(parent, "OUTCOME").text = str(first)
    for step in proof.steps:
        el = ET.SubElement(parent, "OUTCOME")
        el.set("STATEMENT-ID", step.statement_id)
        el.text = str(step.target)


def emit_result(result: QueryResult, query: Query, *, timing: bool = True,
                extra: Mapping[str, str] | None = None) -> str:
    """Serialise a result; identical inputs give identical bytes.

    Pass ``timing=False`` to omit ELAPSED when byte-stable output across
    reruns matters more than the measurement.
    """
    root = ET.Element(RESULT_ROOT)
    root.set("KIND", query.kind.value)
    root.set("ANSWER", "true" if result.answer else "false")
    root.set("ENGINE", result.engine.value)
    if timing:
        root.set("ELAPSED", f"{result.elapsed:.6f}")
    for k, v in (extra or {}).items():
        root.set(k, v)
    if query.kind is QueryKind.DOMINANCE:
        ET.SubElement(root, "BETTER-OUTCOME").text = str(query.better)
        ET.SubElement(root, "WORSE-OUTCOME").text = str(query.worse)
    proof = result.proof
    if proof is not None:
        if proof.kind is ProofKind.NON_SUBSUMPTION_FLIP:
            cf = ET.SubElement(root, "COUNTER-FLIP")
            if proof.direction is not None:
                cf.set("DIRECTION", proof.direction.value)
            (step,) = proof.steps
            cf.set("STATEMENT-ID", step.statement_id)
            ET.SubElement(cf, "OUTCOME").text = str(step.source)
            ET.SubElement(cf, "OUTCOME").text = str(step.target)
        else:
            el = ET.SubElement(root, "PROOF", KIND=proof.kind.value)
            _outcomes(el, proof)
    return _pretty(root)
