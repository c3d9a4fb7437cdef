"""Random specifications for property tests, benchmarks and the acceptance run."""

from __future__ import annotations

import random

from .model import Language, PreferenceSpec, PreferenceStatement, Variable

MAX_OMEGA = {Language.CPNET: 0, Language.TCPNET: 1, Language.CPTHEORY: 3}


def random_variables(rng: random.Random, n: int, domain_sizes=(2,)) -> tuple[Variable, ...]:
    return tuple(
        Variable(f"x{i}", tuple(str(v) for v in range(rng.choice(domain_sizes)))) for i in range(n)
    )


def random_statement(rng: random.Random, variables, sid: str, language: Language,
                     max_condition: int = 2) -> PreferenceStatement:
    target = rng.choice(variables)
    others = [v for v in variables if v is not target]
    rng.shuffle(others)
    k = rng.randint(0, min(max_condition, len(others)))
    cond = tuple((v.name, rng.choice(v.domain)) for v in others[:k])
    rest = others[k:]
    omega_max = min(MAX_OMEGA[language], len(rest))
    omega = frozenset(v.name for v in rest[:rng.randint(0, omega_max)])
    better, worse = rng.sample(target.domain, 2)
    cond = tuple(sorted(cond, key=lambda c: [v.name for v in variables].index(c[0])))
    return PreferenceStatement(sid, target.name, better, worse, cond, omega)


def random_spec(rng: random.Random, language: Language = Language.CPNET, *,
                variables=(3, 6), statements=(2, 12), domain_sizes=(2,),
                name: str | None = None) -> PreferenceSpec:
    """A valid spec of the given class; |Ω| per statement stays within the class bound."""
    n = rng.randint(*variables) if isinstance(variables, tuple) else variables
    m = rng.randint(*statements) if isinstance(statements, tuple) else statements
    vars_ = random_variables(rng, n, domain_sizes)
    sts = [random_statement(rng, vars_, f"s{i + 1}", language) for i in range(m)]
    return PreferenceSpec(name or f"rand{n}x{m}", vars_, tuple(sts))


def random_cpnet(rng: random.Random, n: int = 20, max_parents: int = 2,
                 per_variable=(1, 2)) -> PreferenceSpec:
    """Binary CP-net over an acyclic dependency graph.

    Each variable draws up to ``max_parents`` parents among earlier
    variables and gets 1 or 2 statements under distinct parent assignments.
    """
    vars_ = random_variables(rng, n)
    sts: list[PreferenceStatement] = []
    for i, var in enumerate(vars_):
        parents = rng.sample(vars_[:i], min(i, rng.randint(0, max_parents)))
        rows = [()]
        for p in parents:
            rows = [r + ((p.name, val),) for r in rows for val in p.domain]
        rng.shuffle(rows)
        for cond in rows[:rng.randint(*per_variable)]:
            better, worse = rng.sample(var.domain, 2)
            sts.append(PreferenceStatement(f"s{len(sts) + 1}", var.name, better, worse, cond))
    return PreferenceSpec(f"cpnet{n}", vars_, tuple(sts))


def random_outcome_values(rng: random.Random, spec: PreferenceSpec) -> tuple[str, ...]:
    return tuple(rng.choice(v.domain) for v in spec.variables)
