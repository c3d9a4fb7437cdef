"""Symbolic reasoning: fixpoints over a BDD-encoded flip relation.

Each preference variable with domain D gets ceil(log2 |D|) boolean bits.
Every bit appears on three rails (current, next, aux) whose BDD levels are
interleaved ``3j, 3j+1, 3j+2`` in declaration order.  The flip relation T
lives on (current, next); the aux rail is only used to compose relations
when computing a transitive closure.

No ``ch`` inputs, ``g`` marker or frozen start copies are needed here:
every pair in T is an improving flip, and the fixpoints quantify over all
states at once.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .bdd import DEFAULT_NODE_BUDGET, BddManager, Function
from .errors import InternalInconsistency, OutcomeMismatch, VariableMismatch
from .model import Outcome, PreferenceSpec, id_key
from .semantics import Flip

CUR, NXT, AUX = 0, 1, 2


class Encoding:
    """Bit layout shared by every model built over one variable set."""

    def __init__(self, spec: PreferenceSpec, node_budget: int = DEFAULT_NODE_BUDGET,
                 backend: str | None = None):
        self.variables = spec.variables
        self.names = spec.variable_names
        self.bits: dict[str, list[int]] = {}
        j = 0
        for var in self.variables:
            width = max(1, (len(var.domain) - 1).bit_length())
            self.bits[var.name] = list(range(j, j + width))
            j += width
        self.nbits = j
        self.manager = BddManager(3 * j, node_budget=node_budget, backend=backend)
        self.cur_levels = tuple(3 * b + CUR for b in range(j))
        self.next_levels = tuple(3 * b + NXT for b in range(j))
        self.aux_levels = tuple(3 * b + AUX for b in range(j))
        self.next_to_cur = {3 * b + NXT: 3 * b + CUR for b in range(j)}
        self.cur_to_next = {3 * b + CUR: 3 * b + NXT for b in range(j)}
        # shifts a (cur, next) relation onto (next, aux)
        self.shift_up = {**{3 * b + NXT: 3 * b + AUX for b in range(j)}, **self.cur_to_next}
        self.aux_to_next = {3 * b + AUX: 3 * b + NXT for b in range(j)}
        self._valid: dict[int, Function] = {}
        self._by_name = {v.name: v for v in self.variables}
        self._cubes: dict = {}
        self._states: dict = {}

    def compatible(self, spec: PreferenceSpec) -> bool:
        return spec.variables == self.variables

    @staticmethod
    def level(bit: int, rail: int) -> int:
        return 3 * bit + rail

    def _bit_values(self, name: str, value: str) -> list[bool]:
        var = self._by_name[name]
        idx = var.domain.index(value)
        width = len(self.bits[name])
        # most significant bit first
        return [bool((idx >> (width - 1 - t)) & 1) for t in range(width)]

    def literal_cube(self, name: str, value: str, rail: int) -> dict[int, bool]:
        key = (name, value, rail)
        cube = self._cubes.get(key)
        if cube is None:
            cube = {
                self.level(b, rail): bit
                for b, bit in zip(self.bits[name], self._bit_values(name, value))
            }
            self._cubes[key] = cube
        return cube

    def eq(self, name: str, value: str, rail: int) -> Function:
        return self.manager.cube(self.literal_cube(name, value, rail))

    def same(self, name: str, r1: int = CUR, r2: int = NXT) -> Function:
        m = self.manager
        acc = m.true
        for b in reversed(self.bits[name]):
            acc = m.apply("equiv", m.var(self.level(b, r1)), m.var(self.level(b, r2))) & acc
        return acc

    def valid_var(self, name: str, rail: int) -> Function:
        var = self._by_name[name]
        width = len(self.bits[name])
        if len(var.domain) == 1 << width:
            return self.manager.true
        return self.manager.disj(self.eq(name, val, rail) for val in var.domain)

    def valid(self, rail: int = CUR) -> Function:
        f = self._valid.get(rail)
        if f is None:
            f = self.manager.conj(self.valid_var(n, rail) for n in reversed(self.names))
            self._valid[rail] = f
        return f

    def state(self, outcome: Outcome, rail: int = CUR) -> Function:
        key = (outcome, rail)
        f = self._states.get(key)
        if f is not None:
            return f
        if outcome.names != self.names:
            raise OutcomeMismatch(f"outcome {outcome} does not fit variables {self.names}")
        lits: dict[int, bool] = {}
        for name, value in outcome.items:
            if value not in self._by_name[name].domain:
                raise OutcomeMismatch(f"{value!r} is not a value of {name!r}")
            lits.update(self.literal_cube(name, value, rail))
        f = self.manager.cube(lits)
        if len(self._states) < 1 << 16:
            self._states[key] = f
        return f

    def assignment(self, outcome: Outcome, rail: int = CUR) -> dict[int, bool]:
        lits: dict[int, bool] = {}
        for name, value in outcome.items:
            lits.update(self.literal_cube(name, value, rail))
        return lits

    def decode(self, assignment: dict[int, bool], rail: int = CUR) -> Outcome:
        items = []
        for var in self.variables:
            idx = 0
            for b in self.bits[var.name]:
                idx = (idx << 1) | int(assignment.get(self.level(b, rail), False))
            if idx >= len(var.domain):
                raise InternalInconsistency(f"bit pattern {idx} is not a value of {var.name}")
            items.append((var.name, var.domain[idx]))
        return Outcome(tuple(items))

    def states(self, f: Function, rail: int = CUR) -> list[Outcome]:
        """Every outcome in a state set (for tests and small sets only)."""
        levels = [self.level(b, rail) for b in range(self.nbits)]
        return sorted(
            (self.decode(a, rail) for a in self.manager.iter_sat(f, levels)),
            key=Outcome.sort_key,
        )


@dataclass
class SymbolicModel:
    spec: PreferenceSpec
    enc: Encoding
    relations: dict[str, Function]
    T: Function
    _layers: dict = field(default_factory=dict, repr=False)

    @property
    def manager(self) -> BddManager:
        return self.enc.manager

    @property
    def valid(self) -> Function:
        return self.enc.valid(CUR)

    def state(self, outcome: Outcome) -> Function:
        return self.enc.state(outcome)

    def edge_count(self) -> int:
        return self.manager.satcount(self.T, self.enc.cur_levels + self.enc.next_levels)

    def licensing(self, beta: Outcome, alpha: Outcome) -> list[str]:
        a = {**self.enc.assignment(beta, CUR), **self.enc.assignment(alpha, NXT)}
        return sorted((sid for sid, rel in self.relations.items() if self.manager.evaluate(rel, a)), key=id_key)


def statement_relation(enc: Encoding, spec: PreferenceSpec, st) -> Function:
    """Bit-level transcription of one statement's improving flips."""
    parts = [enc.eq(st.target, st.worse, CUR), enc.eq(st.target, st.better, NXT)]
    cond = dict(st.condition)
    for name in enc.names:
        if name == st.target:
            continue
        if name in cond:
            parts.append(enc.eq(name, cond[name], CUR))
            parts.append(enc.eq(name, cond[name], NXT))
        elif name in st.less_important:
            parts.append(enc.valid_var(name, CUR))
            parts.append(enc.valid_var(name, NXT))
        else:
            parts.append(enc.valid_var(name, CUR))
            parts.append(enc.same(name))
    # conjoin bottom-up: every part touches one variable's bits
    return enc.manager.conj(reversed(parts))


def encode_spec(spec: PreferenceSpec, enc: Encoding | None = None, *,
                node_budget: int = DEFAULT_NODE_BUDGET, backend: str | None = None) -> SymbolicModel:
    if enc is None:
        enc = Encoding(spec, node_budget=node_budget, backend=backend)
    elif not enc.compatible(spec):
        raise VariableMismatch(f"{spec.name!r} does not match the shared encoding")
    relations = {st.id: statement_relation(enc, spec, st) for st in spec.statements}
    T = enc.manager.disj(relations.values())
    return SymbolicModel(spec, enc, relations, T)


def post_image(model: SymbolicModel, S: Function) -> Function:
    """Outcomes reachable from S by exactly one improving flip."""
    enc = model.enc
    m = enc.manager
    img = m.and_exists(S, model.T, enc.cur_levels)
    return m.rename(img, enc.next_to_cur)


def pre_image(model: SymbolicModel, S: Function) -> Function:
    """Outcomes with an improving flip into S."""
    enc = model.enc
    m = enc.manager
    return m.and_exists(m.rename(S, enc.cur_to_next), model.T, enc.next_levels)


def _forward_layers(model: SymbolicModel, source: Function, goal: Function | None = None):
    """Breadth-first frontiers from ``source``; layer k holds outcomes first reached after k flips.

    Stops early once a frontier meets ``goal``.  Returns ``(layers, reached)``.
    """
    frontier = post_image(model, source)
    reach = frontier
    layers = [frontier]
    while not frontier.is_false:
        if goal is not None and not (frontier & goal).is_false:
            break
        frontier = post_image(model, frontier) - reach
        if frontier.is_false:
            break
        reach = reach | frontier
        layers.append(frontier)
    return layers, reach


def _check_pair(model: SymbolicModel, better: Outcome, worse: Outcome):
    if better.names != model.spec.variable_names or worse.names != model.spec.variable_names:
        raise OutcomeMismatch("dominance outcomes do not match the specification's variables")


def dominates_symbolic(spec_or_model, better: Outcome, worse: Outcome, *,
                       direction: str = "forward", **kw) -> bool:
    """``better`` is reachable from ``worse`` by one or more flips.

    ``direction="backward"`` runs the pre-image fixpoint from ``better``
    instead; both must agree.
    """
    model = _model(spec_or_model, **kw)
    _check_pair(model, better, worse)
    if better == worse:
        return False
    a, b = model.state(better), model.state(worse)
    if direction == "forward":
        layers, reach = _forward_layers(model, b, a)
        model._layers[worse] = layers
        return not (reach & a).is_false
    if direction == "backward":
        frontier = pre_image(model, a)
        reach = frontier
        while not frontier.is_false:
            if not (frontier & b).is_false:
                return True
            frontier = pre_image(model, frontier) - reach
            reach = reach | frontier
        return False
    raise ValueError(f"unknown direction {direction!r}")


def _pick_state(model: SymbolicModel, S: Function) -> Outcome:
    a = model.manager.pick(S, model.enc.cur_levels)
    if a is None:
        raise InternalInconsistency("asked to pick from an empty state set")
    return model.enc.decode(a)


def _flip(model: SymbolicModel, beta: Outcome, alpha: Outcome) -> Flip:
    ids = model.licensing(beta, alpha)
    if not ids:
        raise InternalInconsistency(f"no statement licenses {beta} -> {alpha}")
    return Flip(beta, alpha, ids[0])


def extract_witness(model: SymbolicModel, worse: Outcome, better: Outcome) -> list[Flip]:
    """A shortest flip sequence from ``worse`` to ``better`` (equal outcomes give a cycle)."""
    b = model.state(worse)
    a = model.state(better)
    layers = model._layers.get(worse) or []
    hit = next((k for k, L in enumerate(layers) if not (L & a).is_false), None)
    if hit is None:
        layers, _ = _forward_layers(model, b, a)
        hit = next((k for k, L in enumerate(layers) if not (L & a).is_false), None)
    if hit is None:
        raise InternalInconsistency(f"{better} is not reachable from {worse}")
    path = [better]
    cur = a
    for k in range(hit - 1, -1, -1):
        preds = pre_image(model, cur) & layers[k]
        if preds.is_false:
            raise InternalInconsistency("frontier walk lost the path")
        o = _pick_state(model, preds)
        path.append(o)
        cur = model.state(o)
    path.append(worse)
    if (pre_image(model, cur) & b).is_false:
        raise InternalInconsistency("first step of the witness is not a flip")
    path.reverse()
    return [_flip(model, u, v) for u, v in zip(path, path[1:])]


def cyclic_states(model: SymbolicModel) -> Function:
    """Greatest fixpoint of Z = pre(Z): outcomes with an infinite flip path."""
    Z = model.valid
    while True:
        nxt = Z & pre_image(model, Z)
        if nxt == Z:
            return Z
        Z = nxt


def consistent_symbolic(spec_or_model, **kw) -> bool:
    model = _model(spec_or_model, **kw)
    return cyclic_states(model).is_false


def find_cycle(model: SymbolicModel) -> list[Flip] | None:
    """A flip cycle, or None when the specification is consistent."""
    Z = cyclic_states(model)
    if Z.is_false:
        return None
    while not Z.is_false:
        s = _pick_state(model, Z)
        S = model.state(s)
        layers, reach = _forward_layers(model, S, S)
        if not (reach & S).is_false:
            model._layers[s] = layers
            return extract_witness(model, s, s)
        # s feeds into a cycle without lying on one; every cycle it
        # reaches lies inside ``reach``, which excludes s
        Z = reach & Z
        while True:
            nxt = Z & pre_image(model, Z)
            if nxt == Z:
                break
            Z = nxt
    raise InternalInconsistency("nonempty greatest fixpoint without a cycle")


def compose(enc: Encoding, R: Function, S: Function) -> Function:
    """Relational composition (R ; S) on the (cur, next) rails."""
    m = enc.manager
    S_up = m.rename(S, enc.shift_up)
    joined = m.and_exists(R, S_up, enc.next_levels)
    return m.rename(joined, enc.aux_to_next)


def transitive_closure(enc: Encoding, R: Function) -> Function:
    """R+ by iterative squaring: R_{k+1} = R_k | R_k;R_k."""
    while True:
        nxt = R | compose(enc, R, R)
        if nxt == R:
            return R
        R = nxt


def _pair_models(p1: PreferenceSpec, p2: PreferenceSpec, node_budget=DEFAULT_NODE_BUDGET, backend=None):
    if not p1.same_variables(p2):
        raise VariableMismatch(f"{p1.name!r} and {p2.name!r} declare different variables")
    enc = Encoding(p1, node_budget=node_budget, backend=backend)
    return encode_spec(p1, enc), encode_spec(p2, enc)


def subsumes_symbolic(p1, p2, *, node_budget: int = DEFAULT_NODE_BUDGET, backend: str | None = None,
                      models=None):
    """Is every flip of p1 a (possibly multi-step) preference of p2?

    Returns ``(answer, counter_flip)``.
    """
    m1, m2 = models or _pair_models(p1, p2, node_budget, backend)
    enc = m1.enc
    closure = transitive_closure(enc, m2.T)
    missing = m1.T - closure
    if missing.is_false:
        return True, None
    a = enc.manager.pick(missing, enc.cur_levels + enc.next_levels)
    beta, alpha = enc.decode(a, CUR), enc.decode(a, NXT)
    return False, _flip(m1, beta, alpha)


def equivalent_symbolic(p1, p2, *, node_budget: int = DEFAULT_NODE_BUDGET, backend: str | None = None):
    """Returns ``(answer, counter_flip, direction)``."""
    m1, m2 = _pair_models(p1, p2, node_budget, backend)
    ok, flip = subsumes_symbolic(p1, p2, models=(m1, m2))
    if not ok:
        return False, flip, "P1_NOT_IN_P2"
    ok, flip = subsumes_symbolic(p2, p1, models=(m2, m1))
    if not ok:
        return False, flip, "P2_NOT_IN_P1"
    return True, None, None


def _model(spec_or_model, node_budget: int = DEFAULT_NODE_BUDGET, backend: str | None = None) -> SymbolicModel:
    if isinstance(spec_or_model, SymbolicModel):
        return spec_or_model
    return encode_spec(spec_or_model, node_budget=node_budget, backend=backend)
