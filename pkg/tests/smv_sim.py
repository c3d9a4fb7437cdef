"""Tiny interpreter for the SMV subset the emitter produces.

It enumerates every state and input valuation, evaluates each ``next``
case block with first-match semantics and reports the transitions.  The
tests use it to check the emitted text against the flip semantics without
an external model checker.
"""

import itertools
import re

_DECL = re.compile(r"^\s*(\w+)\s*:\s*(\{[^}]*\}|\d+\.\.\d+)\s*;\s*$")
_NEXT = re.compile(r"^\s*next\((\w+)\)\s*:=\s*case\s*$")
_BRANCH = re.compile(r"^\s*(.+?)\s*:\s*(\{[^}]*\}|\w+)\s*;\s*$")


def _domain(text):
    if text.startswith("{"):
        return [v.strip() for v in text[1:-1].split(",")]
    lo, hi = text.split("..")
    return [str(i) for i in range(int(lo), int(hi) + 1)]


def parse(text):
    sections = {"VAR": {}, "FROZENVAR": {}, "IVAR": {}}
    cases = {}
    current = None
    block = None
    for line in text.splitlines():
        s = line.strip()
        if s in sections:
            current = s
            continue
        if s in ("DEFINE", "ASSIGN") or s.startswith("INIT") or s.startswith("MODULE"):
            current = None
            continue
        m = _NEXT.match(line)
        if m:
            block = []
            cases[m.group(1)] = block
            continue
        if s == "esac;":
            block = None
            continue
        if block is not None:
            b = _BRANCH.match(line)
            assert b, line
            block.append((b.group(1), b.group(2)))
            continue
        if current:
            d = _DECL.match(line)
            assert d, line
            sections[current][d.group(1)] = _domain(d.group(2))
    return sections, cases


def _holds(guard, env):
    if guard == "TRUE":
        return True
    for part in guard.split("&"):
        name, value = (p.strip() for p in part.split("="))
        if env[name] != value:
            return False
    return True


def transitions(text, state_vars):
    """Yield (state, next_state, markers) for every valuation; markers maps marker -> value."""
    sections, cases = parse(text)
    markers = [v for v in sections["VAR"] if v not in state_vars]
    inputs = sections["IVAR"]
    for vals in itertools.product(*(sections["VAR"][v] for v in state_vars)):
        state = dict(zip(state_vars, vals))
        for ivals in itertools.product(*inputs.values()):
            env = {**state, **dict(zip(inputs, ivals))}
            options = []
            for v in state_vars:
                for guard, value in cases[v]:
                    if _holds(guard, env):
                        if value.startswith("{"):
                            options.append(_domain(value))
                        else:
                            options.append([env[value]] if value in env else [value])
                        break
            marks = {}
            for mk in markers:
                for guard, value in cases[mk]:
                    if _holds(guard, env):
                        marks[mk] = value
                        break
            for nxt in itertools.product(*options):
                yield state, dict(zip(state_vars, nxt)), marks
