"""Command line front end: batch queries, an interactive menu, and SMV export.

Exit status: 0 success, 1 external checker trouble, 2 parse or validation
error, 3 resource exhaustion, 4 engines (or the external checker) disagree.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import TextIO

from . import smv
from .bdd import DEFAULT_NODE_BUDGET
from .errors import (
    CeterisError,
    CheckerNotFound,
    CheckerParseFailure,
    NodeBudgetExceeded,
    OutcomeMismatch,
    SpecError,
    TooLarge,
    VariableMismatch,
    XmlError,
)
from .explicit import DEFAULT_NODE_LIMIT
from .model import Engine, PreferenceSpec, Query, QueryKind, QueryResult, classify_language
from .reasoner import run_query
from .xmlio import emit_result, load_spec, parse_assignment, parse_query, resolve_outcome

EXIT_OK = 0
EXIT_CHECKER = 1
EXIT_INPUT = 2
EXIT_RESOURCE = 3
EXIT_DIVERGENCE = 4

log = logging.getLogger("ceteris")


class Divergence(CeterisError):
    """Two engines gave different answers to the same query."""


@dataclass
class RunConfig:
    spec: str | None = None
    spec2: str | None = None
    query: str | None = None
    interactive: bool = False
    engine: str = "symbolic"
    out: str | None = None
    emit_smv: bool = False
    checker: str | None = None
    node_budget: int = DEFAULT_NODE_BUDGET
    node_limit: int = DEFAULT_NODE_LIMIT
    timing: bool = True


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="ceteris",
        description="Dominance, consistency, subsumption and equivalence for CP-nets, TCP-nets and CP-theories.",
    )
    p.add_argument("--spec", help="preference specification XML (P1)")
    p.add_argument("--spec2", help="second specification XML (P2) for subsumption and equivalence")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--query", help="query XML file")
    mode.add_argument("--interactive", action="store_true", help="menu-driven console session")
    p.add_argument("--engine", choices=["explicit", "symbolic", "both"], default="symbolic")
    p.add_argument("--out", help="write the result XML (or SMV text) here instead of stdout")
    p.add_argument("--emit-smv", action="store_true",
                   help="write the SMV model (plus CTL for --query) instead of answering")
    p.add_argument("--checker", help="external SMV model checker executable used to cross-check answers")
    p.add_argument("--node-budget", type=int, default=DEFAULT_NODE_BUDGET, help="BDD node cap")
    p.add_argument("--node-limit", type=int, default=DEFAULT_NODE_LIMIT,
                   help="largest outcome space the explicit engine will build")
    p.add_argument("--no-timing", dest="timing", action="store_false",
                   help="omit ELAPSED from result XML so reruns are byte-identical")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _config(ns: argparse.Namespace) -> RunConfig:
    return RunConfig(ns.spec, ns.spec2, ns.query, ns.interactive, ns.engine, ns.out,
                     ns.emit_smv, ns.checker, ns.node_budget, ns.node_limit, ns.timing)


def _write(config: RunConfig, text: str, path: str | None = None, stdout: TextIO | None = None):
    path = path or config.out
    if path:
        Path(path).write_text(text)
    else:
        (stdout or sys.stdout).write(text)


def _load_specs(config: RunConfig, doc=None) -> list[PreferenceSpec]:
    paths = [config.spec, config.spec2]
    if doc is not None and doc.spec_files:
        base = Path(config.query).parent
        for i, f in enumerate(doc.spec_files[:2]):
            if paths[i] is None:
                paths[i] = str(base / f)
    specs = [load_spec(p) for p in paths if p]
    if not specs:
        raise XmlError("no preference specification given (use --spec or SPEC-FILE)")
    return specs


def _needed(kind: QueryKind, specs: list[PreferenceSpec]) -> list[PreferenceSpec]:
    if kind in (QueryKind.SUBSUMPTION, QueryKind.EQUIVALENCE):
        if len(specs) < 2:
            raise XmlError(f"a {kind.value} query needs two specifications")
        if not specs[0].same_variables(specs[1]):
            raise VariableMismatch(f"{specs[0].name} and {specs[1].name} declare different variables")
        return specs[:2]
    return specs[:1]


def answer(query: Query, specs, config: RunConfig) -> tuple[QueryResult, dict]:
    """Run the configured engine(s); returns the result plus extra XML attributes."""
    kw = dict(node_budget=config.node_budget, node_limit=config.node_limit)
    if config.engine != "both":
        return run_query(query, specs, config.engine, **kw), {}
    ex = run_query(query, specs, Engine.EXPLICIT, **kw)
    sy = run_query(query, specs, Engine.SYMBOLIC, fallback=False, **kw)
    if ex.answer != sy.answer:
        raise Divergence(f"explicit engine answered {ex.answer}, symbolic engine answered {sy.answer}")
    return sy, {"CROSS-CHECK": "explicit"}


def external_answer(query: Query, specs, checker: str) -> bool:
    """The answer implied by running the emitted model(s) through ``checker``."""
    docs = smv.emit_for_query(query, specs)
    holds = []
    for doc in docs:
        verdicts = smv.run_external(doc, checker)
        holds.append(verdicts[0].holds)
        if query.kind is QueryKind.DOMINANCE and len(verdicts) > 1 and not verdicts[1].holds:
            # the counterexample to the negation must replay as improving flips
            flips = smv.trace_flips(specs[0], smv.trace_outcomes(doc, specs[0], verdicts[1]))
            log.info("checker trace: %d flips", len(flips))
    return all(holds)


def run_batch(config: RunConfig, stdout: TextIO | None = None) -> int:
    doc = parse_query(Path(config.query).read_bytes())
    specs = _needed(doc.kind, _load_specs(config, doc))
    query = doc.resolve(specs)
    result, extra = answer(query, specs, config)
    if config.checker:
        ext = external_answer(query, specs, config.checker)
        if ext != result.answer:
            raise Divergence(f"external checker answered {ext}, internal engine answered {result.answer}")
        extra["EXTERNAL-CHECK"] = "agree"
    _write(config, emit_result(result, query, timing=config.timing, extra=extra), stdout=stdout)
    return EXIT_OK


def emit_model_command(config: RunConfig, stdout: TextIO | None = None) -> int:
    if config.query:
        qdoc = parse_query(Path(config.query).read_bytes())
        specs = _needed(qdoc.kind, _load_specs(config, qdoc))
        docs = smv.emit_for_query(qdoc.resolve(specs), specs)
    else:
        specs = _load_specs(config)
        docs = [smv.emit_smv_combined(*specs[:2]) if len(specs) > 1 else smv.emit_smv(specs[0])]
    for note in (n for d in docs for n in d.notes):
        log.warning("%s", note)
    _write(config, docs[0].render(), stdout=stdout)
    if len(docs) > 1:
        if config.out:
            p = Path(config.out)
            _write(config, docs[1].render(), path=str(p.with_name(p.stem + ".reverse" + p.suffix)))
        else:
            (stdout or sys.stdout).write("-- reverse direction (P2 against P1)\n" + docs[1].render())
    return EXIT_OK


MENU_ONE = ["dominance", "consistency"]
MENU_TWO = MENU_ONE + ["subsumption", "equivalence"]


def _ask(prompt: str, stdin: TextIO, stdout: TextIO) -> str | None:
    stdout.write(prompt)
    stdout.flush()
    line = stdin.readline()
    if not line:
        return None
    return line.strip()


def _ask_outcome(label: str, spec: PreferenceSpec, stdin, stdout):
    while True:
        text = _ask(f"{label} outcome (var=value,...)> ", stdin, stdout)
        if text is None:
            return None
        try:
            return resolve_outcome(spec, parse_assignment(text, label), label)
        except (XmlError, OutcomeMismatch) as exc:
            stdout.write(f"  {exc}; try again\n")


def run_interactive(config: RunConfig, stdin: TextIO | None = None, stdout: TextIO | None = None) -> int:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    specs = _load_specs(config)
    if len(specs) > 1 and not specs[0].same_variables(specs[1]):
        raise VariableMismatch(f"{specs[0].name} and {specs[1].name} declare different variables")
    for s in specs:
        stdout.write(f"loaded {s.name}: {len(s.variables)} variables, {len(s.statements)} statements, "
                     f"{classify_language(s).value}\n")
    items = MENU_TWO if len(specs) > 1 else MENU_ONE
    while True:
        stdout.write("\n" + "\n".join(f"  {i}) {name}" for i, name in enumerate(items, 1)) + "\n  q) quit\n")
        choice = _ask("choice> ", stdin, stdout)
        if choice is None or choice.lower() in ("q", "quit", "exit"):
            return EXIT_OK
        if choice.isdigit() and 1 <= int(choice) <= len(items):
            choice = items[int(choice) - 1]
        if choice not in items:
            stdout.write(f"  unknown choice {choice!r}\n")
            continue
        kind = QueryKind(choice.upper())
        if kind is QueryKind.DOMINANCE:
            better = _ask_outcome("better", specs[0], stdin, stdout)
            worse = None if better is None else _ask_outcome("worse", specs[0], stdin, stdout)
            if worse is None:
                return EXIT_OK
            query = Query(kind, (specs[0].name,), better, worse)
            used = specs[:1]
        else:
            used = specs[:2] if kind in (QueryKind.SUBSUMPTION, QueryKind.EQUIVALENCE) else specs[:1]
            query = Query(kind, tuple(s.name for s in used))
        try:
            result, _ = answer(query, used, config)
        except (NodeBudgetExceeded, TooLarge) as exc:
            stdout.write(f"  resource limit: {exc}\n")
            continue
        stdout.write(f"{'true' if result.answer else 'false'}   [{result.engine.value}, {result.elapsed:.3f}s]\n")
        if result.proof is not None:
            stdout.write(result.proof.render() + "\n")


def main(argv=None, stdin: TextIO | None = None, stdout: TextIO | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING,
                        format="ceteris: %(message)s", stream=sys.stderr)
    config = _config(ns)
    if not (config.query or config.interactive or config.emit_smv):
        parser.error("one of --query, --interactive or --emit-smv is required")
    try:
        if config.emit_smv:
            return emit_model_command(config, stdout)
        if config.interactive:
            return run_interactive(config, stdin, stdout)
        return run_batch(config, stdout)
    except (XmlError, SpecError, OutcomeMismatch, VariableMismatch, OSError) as exc:
        print(f"ceteris: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NodeBudgetExceeded, TooLarge) as exc:
        print(f"ceteris: resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except Divergence as exc:
        print(f"ceteris: divergence: {exc}", file=sys.stderr)
        return EXIT_DIVERGENCE
    except (CheckerNotFound, CheckerParseFailure) as exc:
        print(f"ceteris: checker: {exc}", file=sys.stderr)
        return EXIT_CHECKER


if __name__ == "__main__":
    sys.exit(main())
