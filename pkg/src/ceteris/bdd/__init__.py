"""Reduced ordered binary decision diagrams.

The kernel is compiled with Cython when available; otherwise the pure-Python
kernel with the same interface is used.  Set ``CETERIS_PURE_PYTHON=1`` to
force the fallback, or pass ``backend="python"`` to :class:`BddManager`.
"""

from __future__ import annotations

import os

from ..errors import ManagerMismatch
from ._pykernel import Kernel as PyKernel

try:
    if os.environ.get("CETERIS_PURE_PYTHON"):
        raise ImportError("pure Python kernel requested")
    from ._ckernel import Kernel as CKernel
except ImportError:
    CKernel = None

DEFAULT_BACKEND = "cython" if CKernel is not None else "python"
DEFAULT_NODE_BUDGET = 10_000_000


def available_backends() -> list[str]:
    return ["cython", "python"] if CKernel is not None else ["python"]


class Function:
    """A boolean function owned by a :class:`BddManager`.

    Equality is node identity, which for reduced ordered diagrams is
    function equality.
    """

    __slots__ = ("manager", "node")

    def __init__(self, manager: "BddManager", node: int):
        self.manager = manager
        self.node = node

    def _other(self, other: "Function") -> int:
        if not isinstance(other, Function):
            raise TypeError(f"expected a Function, got {type(other).__name__}")
        if other.manager is not self.manager:
            raise ManagerMismatch("operands belong to different BDD managers")
        return other.node

    def __and__(self, other):
        return Function(self.manager, self.manager.kernel.and_(self.node, self._other(other)))

    def __or__(self, other):
        return Function(self.manager, self.manager.kernel.or_(self.node, self._other(other)))

    def __xor__(self, other):
        return Function(self.manager, self.manager.kernel.xor(self.node, self._other(other)))

    def __invert__(self):
        return Function(self.manager, self.manager.kernel.not_(self.node))

    def __sub__(self, other):
        return self & ~other

    def __eq__(self, other):
        return (
            isinstance(other, Function)
            and other.manager is self.manager
            and other.node == self.node
        )

    def __hash__(self):
        return hash((id(self.manager), self.node))

    @property
    def is_false(self) -> bool:
        return self.node == 0

    @property
    def is_true(self) -> bool:
        return self.node == 1

    def __bool__(self):
        raise TypeError("use .is_false / .is_true to test a BDD")

    def __repr__(self):
        return f"Function(node={self.node}, level={self.manager.kernel.level(self.node)})"


class BddManager:
    """Owns one kernel; every Function derived from it must stay in one thread."""

    def __init__(self, nvars: int, node_budget: int = DEFAULT_NODE_BUDGET, backend: str | None = None):
        backend = backend or DEFAULT_BACKEND
        if backend == "cython":
            if CKernel is None:
                raise RuntimeError("compiled BDD kernel is not built")
            self.kernel = CKernel(nvars, node_budget)
        elif backend == "python":
            self.kernel = PyKernel(nvars, node_budget)
        else:
            raise ValueError(f"unknown backend {backend!r}")
        self.backend = backend
        self.nvars = nvars
        self.true = Function(self, 1)
        self.false = Function(self, 0)

    def _node(self, f: Function) -> int:
        if not isinstance(f, Function):
            raise TypeError(f"expected a Function, got {type(f).__name__}")
        if f.manager is not self:
            raise ManagerMismatch("function belongs to a different BDD manager")
        return f.node

    def wrap(self, node: int) -> Function:
        return Function(self, node)

    def var(self, level: int) -> Function:
        return Function(self, self.kernel.ithvar(level))

    def nvar(self, level: int) -> Function:
        return ~self.var(level)

    def apply(self, op: str, *args: Function) -> Function:
        """``op`` is one of and, or, xor, not, ite, implies, equiv."""
        nodes = [self._node(a) for a in args]
        k = self.kernel
        if op == "not":
            (f,) = nodes
            return Function(self, k.not_(f))
        if op == "ite":
            f, g, h = nodes
            return Function(self, k.ite(f, g, h))
        if op in ("and", "or", "xor"):
            fn = {"and": k.and_, "or": k.or_, "xor": k.xor}[op]
            if not nodes:
                return self.true if op == "and" else self.false
            acc = nodes[0]
            for n in nodes[1:]:
                acc = fn(acc, n)
            return Function(self, acc)
        if op == "implies":
            f, g = nodes
            return Function(self, k.ite(f, g, 1))
        if op == "equiv":
            f, g = nodes
            return Function(self, k.not_(k.xor(f, g)))
        raise ValueError(f"unknown operator {op!r}")

    def conj(self, fs) -> Function:
        acc = 1
        for f in fs:
            acc = self.kernel.and_(acc, self._node(f))
            if acc == 0:
                break
        return Function(self, acc)

    def disj(self, fs) -> Function:
        acc = 0
        for f in fs:
            acc = self.kernel.or_(acc, self._node(f))
            if acc == 1:
                break
        return Function(self, acc)

    def exists(self, levels, f: Function) -> Function:
        return Function(self, self.kernel.exists(self._node(f), tuple(levels)))

    def forall(self, levels, f: Function) -> Function:
        return ~self.exists(levels, ~f)

    def and_exists(self, f: Function, g: Function, levels) -> Function:
        return Function(self, self.kernel.and_exists(self._node(f), self._node(g), tuple(levels)))

    def rename(self, f: Function, mapping: dict[int, int]) -> Function:
        return Function(self, self.kernel.rename(self._node(f), dict(mapping)))

    def cube(self, literals: dict[int, bool]) -> Function:
        acc = 1
        k = self.kernel
        for lv in sorted(literals, reverse=True):
            v = k.ithvar(lv)
            acc = k.and_(v if literals[lv] else k.not_(v), acc)
        return Function(self, acc)

    # -- inspection ---------------------------------------------------------

    @property
    def node_count(self) -> int:
        return self.kernel.size

    def support(self, f: Function) -> set[int]:
        k = self.kernel
        seen, out, stack = set(), set(), [self._node(f)]
        while stack:
            u = stack.pop()
            if u < 2 or u in seen:
                continue
            seen.add(u)
            out.add(k.level(u))
            stack.append(k.low(u))
            stack.append(k.high(u))
        return out

    def dag_size(self, f: Function) -> int:
        k = self.kernel
        seen, stack = set(), [self._node(f)]
        while stack:
            u = stack.pop()
            if u in seen:
                continue
            seen.add(u)
            if u >= 2:
                stack.append(k.low(u))
                stack.append(k.high(u))
        return len(seen)

    def satcount(self, f: Function, levels=None) -> int:
        """Number of satisfying assignments over ``levels`` (default: all variables).

        ``levels`` must contain the support of ``f``.
        """
        k = self.kernel
        n = self.nvars
        memo = {0: 0, 1: 1}

        def count(u):
            r = memo.get(u)
            if r is not None:
                return r
            v = k.level(u)
            lo, hi = k.low(u), k.high(u)
            r = count(lo) * (1 << (k.level(lo) - v - 1)) + count(hi) * (1 << (k.level(hi) - v - 1))
            memo[u] = r
            return r

        node = self._node(f)
        total = count(node) << k.level(node)
        if levels is None:
            return total
        levels = set(levels)
        missing = self.support(f) - levels
        if missing:
            raise ValueError(f"levels {sorted(missing)} are in the support but not counted")
        return total >> (n - len(levels))

    def pick(self, f: Function, levels=()) -> dict[int, bool] | None:
        """One satisfying assignment, preferring 0 branches; None if f is false.

        Levels listed in ``levels`` but not decided on the chosen path are
        set to False.
        """
        k = self.kernel
        u = self._node(f)
        if u == 0:
            return None
        out = {lv: False for lv in levels}
        while u >= 2:
            lo = k.low(u)
            if lo != 0:
                out[k.level(u)] = False
                u = lo
            else:
                out[k.level(u)] = True
                u = k.high(u)
        return out

    def evaluate(self, f: Function, assignment: dict[int, bool]) -> bool:
        k = self.kernel
        u = self._node(f)
        while u >= 2:
            u = k.high(u) if assignment.get(k.level(u), False) else k.low(u)
        return u == 1

    def iter_sat(self, f: Function, levels):
        """Yield every total assignment over ``levels`` satisfying f."""
        levels = sorted(levels)
        k = self.kernel

        def rec(u, i, acc):
            if u == 0:
                return
            if i == len(levels):
                if u == 1:
                    yield dict(acc)
                return
            lv = levels[i]
            if u >= 2 and k.level(u) < lv:
                raise ValueError(f"level {k.level(u)} is in the support but not enumerated")
            if u >= 2 and k.level(u) == lv:
                branches = ((False, k.low(u)), (True, k.high(u)))
            else:
                branches = ((False, u), (True, u))
            for val, child in branches:
                acc[lv] = val
                yield from rec(child, i + 1, acc)
            del acc[lv]

        yield from rec(self._node(f), 0, {})
