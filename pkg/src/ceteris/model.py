"""Data model shared by every part of the reasoner.

Variables, outcomes, preference statements and specifications are frozen
dataclasses: once built they are safe to share between threads and to use
as dictionary keys.
"""

from __future__ import annotations

import enum
import itertools
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

from .errors import OutcomeMismatch, SpecError

IDENT_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
# Domain values may also be plain integers ("0", "12") as in SMV enumerations.
VALUE_RE = re.compile(r"^(?:[A-Za-z_][A-Za-z0-9_]*|-?[0-9]+)$")


def id_key(sid: str):
    """Natural sort key for statement ids, so that s2 sorts before s10."""
    return tuple((0, int(t), "") if t.isdigit() else (1, 0, t) for t in re.findall(r"\d+|\D+", sid))


class Language(enum.Enum):
    CPNET = "CP-net"
    TCPNET = "TCP-net"
    CPTHEORY = "CP-theory"


class QueryKind(enum.Enum):
    DOMINANCE = "DOMINANCE"
    CONSISTENCY = "CONSISTENCY"
    SUBSUMPTION = "SUBSUMPTION"
    EQUIVALENCE = "EQUIVALENCE"


class Engine(enum.Enum):
    EXPLICIT = "explicit"
    SYMBOLIC = "symbolic"


@dataclass(frozen=True)
class Variable:
    name: str
    domain: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "domain", tuple(self.domain))

    def index(self, value: str) -> int:
        return self.domain.index(value)


@dataclass(frozen=True)
class Outcome:
    """A total assignment, stored as (name, value) pairs in declaration order."""

    items: tuple[tuple[str, str], ...]

    @classmethod
    def of(cls, spec: "PreferenceSpec", values: Mapping[str, str] | Iterable[str]) -> "Outcome":
        """Build an outcome over ``spec`` from a mapping or a value sequence.

        Raises OutcomeMismatch unless every declared variable gets exactly
        one value from its domain.
        """
        names = spec.variable_names
        if isinstance(values, Mapping):
            extra = set(values) - set(names)
            if extra:
                raise OutcomeMismatch(f"unknown variables {sorted(extra)}")
            missing = [n for n in names if n not in values]
            if missing:
                raise OutcomeMismatch(f"outcome is missing variables {missing}")
            vals = [str(values[n]) for n in names]
        else:
            vals = [str(v) for v in values]
            if len(vals) != len(names):
                raise OutcomeMismatch(
                    f"expected {len(names)} values, got {len(vals)}"
                )
        for var, val in zip(spec.variables, vals):
            if val not in var.domain:
                raise OutcomeMismatch(f"{val!r} is not a value of {var.name!r}")
        return cls(tuple(zip(names, vals)))

    def __getitem__(self, name: str) -> str:
        for n, v in self.items:
            if n == name:
                return v
        raise KeyError(name)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.items)

    @property
    def values(self) -> tuple[str, ...]:
        return tuple(v for _, v in self.items)

    def as_dict(self) -> dict[str, str]:
        return dict(self.items)

    def replace(self, **changes: str) -> "Outcome":
        return Outcome(tuple((n, changes.get(n, v)) for n, v in self.items))

    def sort_key(self) -> tuple[str, ...]:
        return self.values

    def __str__(self):
        return ",".join(f"{n}={v}" for n, v in self.items)


@dataclass(frozen=True)
class PreferenceStatement:
    """``condition: target=better > target=worse [less_important]``."""

    id: str
    target: str
    better: str
    worse: str
    condition: tuple[tuple[str, str], ...] = ()
    less_important: frozenset[str] = frozenset()

    def __post_init__(self):
        if isinstance(self.condition, Mapping):
            object.__setattr__(self, "condition", tuple(self.condition.items()))
        else:
            object.__setattr__(self, "condition", tuple(tuple(c) for c in self.condition))
        object.__setattr__(self, "less_important", frozenset(self.less_important))

    @property
    def condition_vars(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.condition)

    def __str__(self):
        cond = " & ".join(f"{n}={v}" for n, v in self.condition)
        head = f"{cond}: " if cond else ""
        tail = f" [{','.join(sorted(self.less_important))}]" if self.less_important else ""
        return f"{self.id}: {head}{self.target}={self.better} > {self.target}={self.worse}{tail}"


@dataclass(frozen=True)
class Violation:
    rule: str
    statement_id: str | None
    detail: str

    def __str__(self):
        where = f"statement {self.statement_id}: " if self.statement_id else ""
        return f"{self.rule}: {where}{self.detail}"


@dataclass(frozen=True)
class PreferenceSpec:
    name: str
    variables: tuple[Variable, ...]
    statements: tuple[PreferenceStatement, ...] = ()
    _index: dict = field(default=None, init=False, repr=False, compare=False, hash=False)
    _names: tuple = field(default=(), init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "statements", tuple(self.statements))
        object.__setattr__(self, "_index", {v.name: v for v in self.variables})
        object.__setattr__(self, "_names", tuple(v.name for v in self.variables))

    @property
    def variable_names(self) -> tuple[str, ...]:
        return self._names

    def variable(self, name: str) -> Variable:
        return self._index[name]

    def has_variable(self, name: str) -> bool:
        return name in self._index

    def statement(self, sid: str) -> PreferenceStatement:
        for s in self.statements:
            if s.id == sid:
                return s
        raise KeyError(sid)

    @property
    def outcome_count(self) -> int:
        n = 1
        for v in self.variables:
            n *= len(v.domain)
        return n

    def outcomes(self) -> Iterator[Outcome]:
        names = self.variable_names
        for vals in itertools.product(*(v.domain for v in self.variables)):
            yield Outcome(tuple(zip(names, vals)))

    def outcome(self, values=None, **kw) -> Outcome:
        return Outcome.of(self, values if values is not None else kw)

    def with_statements(self, statements, name=None) -> "PreferenceSpec":
        return PreferenceSpec(name or self.name, self.variables, tuple(statements))

    def without(self, *ids: str, name=None) -> "PreferenceSpec":
        drop = set(ids)
        return self.with_statements([s for s in self.statements if s.id not in drop], name)

    def same_variables(self, other: "PreferenceSpec") -> bool:
        return self.variables == other.variables

    def check(self) -> "PreferenceSpec":
        """Return self, or raise SpecError listing every violation."""
        problems = validate_spec(self)
        if problems:
            raise SpecError(problems)
        return self


@dataclass(frozen=True)
class Query:
    kind: QueryKind
    spec_refs: tuple[str, ...] = ()
    better: Outcome | None = None
    worse: Outcome | None = None

    def __post_init__(self):
        object.__setattr__(self, "spec_refs", tuple(self.spec_refs))
        if self.kind is QueryKind.DOMINANCE:
            if self.better is None or self.worse is None:
                raise ValueError("a dominance query needs two outcomes")
            if self.better.names != self.worse.names:
                raise ValueError("dominance outcomes range over different variables")


@dataclass(frozen=True)
class QueryResult:
    answer: bool
    engine: Engine
    proof: object | None = None
    elapsed: float = 0.0


def classify_language(spec: PreferenceSpec) -> Language:
    widest = max((len(s.less_important) for s in spec.statements), default=0)
    if widest == 0:
        return Language.CPNET
    if widest == 1:
        return Language.TCPNET
    return Language.CPTHEORY


def validate_spec(spec: PreferenceSpec) -> list[Violation]:
    """Check every structural rule; an empty list means the specification is usable."""
    out: list[Violation] = []
    seen: set[str] = set()
    for var in spec.variables:
        if not IDENT_RE.match(var.name):
            out.append(Violation("BadIdentifier", None, f"variable name {var.name!r}"))
        if var.name in seen:
            out.append(Violation("DuplicateVariable", None, f"variable {var.name!r} declared twice"))
        seen.add(var.name)
        if len(var.domain) < 2:
            out.append(Violation("SmallDomain", None, f"variable {var.name!r} needs at least two values"))
        if len(set(var.domain)) != len(var.domain):
            out.append(Violation("DuplicateValue", None, f"domain of {var.name!r} repeats a value"))
        for val in var.domain:
            if not VALUE_RE.match(val):
                out.append(Violation("BadIdentifier", None, f"value {val!r} of {var.name!r}"))

    ids: set[str] = set()
    for st in spec.statements:
        sid = st.id
        if sid in ids:
            out.append(Violation("DuplicateStatementId", sid, "statement id used twice"))
        ids.add(sid)

        def known(name):
            if spec.has_variable(name):
                return True
            out.append(Violation(
                "UndeclaredVariable", sid,
                f"variable {name} is not defined in the preference specification"))
            return False

        if known(st.target):
            dom = spec.variable(st.target).domain
            for val in (st.better, st.worse):
                if val not in dom:
                    out.append(Violation("UndefinedValue", sid, f"{val!r} is not a value of {st.target}"))
        if st.better == st.worse:
            out.append(Violation("DegeneratePreference", sid, f"better and worse are both {st.better!r}"))

        cvars = st.condition_vars
        if len(set(cvars)) != len(cvars):
            out.append(Violation("RepeatedCondition", sid, "a condition variable appears twice"))
        for name, val in st.condition:
            if known(name) and val not in spec.variable(name).domain:
                out.append(Violation("UndefinedValue", sid, f"{val!r} is not a value of {name}"))
        for name in sorted(st.less_important):
            known(name)

        if st.target in cvars:
            out.append(Violation("OverlappingGroups", sid, "target appears in its own condition"))
        if st.target in st.less_important:
            out.append(Violation("OverlappingGroups", sid, "target is less important than itself"))
        both = set(cvars) & st.less_important
        if both:
            out.append(Violation("OverlappingGroups", sid,
                                 f"{sorted(both)} both conditioned on and traded off"))
    return out


def make_spec(name: str, variables: Mapping[str, Iterable[str]], statements: Iterable) -> PreferenceSpec:
    """Convenience constructor used by tests and generators.

    ``statements`` are PreferenceStatement objects or tuples
    ``(id, target, better, worse[, condition[, less_important]])``.
    """
    vars_ = tuple(Variable(n, tuple(str(x) for x in d)) for n, d in variables.items())
    sts = []
    for s in statements:
        if isinstance(s, PreferenceStatement):
            sts.append(s)
            continue
        sid, target, better, worse, *rest = s
        cond = rest[0] if rest else ()
        omega = rest[1] if len(rest) > 1 else ()
        if isinstance(cond, Mapping):
            cond = tuple((k, str(v)) for k, v in cond.items())
        sts.append(PreferenceStatement(sid, target, str(better), str(worse), cond, frozenset(omega)))
    return PreferenceSpec(name, vars_, tuple(sts))
