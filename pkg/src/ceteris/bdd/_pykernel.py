"""Pure-Python ROBDD kernel.

Nodes are integers indexing three parallel lists.  0 and 1 are the
constant functions; their level is ``nvars`` so that terminals sort below
every decision variable.  The compiled kernel in ``_ckernel`` implements
the same interface and must return identical node numbers for identical
call sequences.
"""

from ..errors import NodeBudgetExceeded

_AND, _OR, _XOR, _NOT, _ITE = 1, 2, 3, 4, 5
CACHE_LIMIT = 1 << 21


class Kernel:
    backend = "python"

    def __init__(self, nvars, node_budget=10_000_000):
        self.nvars = nvars
        self.node_budget = node_budget
        self._var = [nvars, nvars]
        self._lo = [0, 1]
        self._hi = [0, 1]
        self._unique = {}
        self._cache = {}

    # -- node access ------------------------------------------------------

    def level(self, f):
        return self._var[f]

    def low(self, f):
        return self._lo[f]

    def high(self, f):
        return self._hi[f]

    @property
    def size(self):
        return len(self._var)

    def clear_cache(self):
        self._cache.clear()

    def mk(self, v, lo, hi):
        if lo == hi:
            return lo
        key = (v, lo, hi)
        r = self._unique.get(key)
        if r is not None:
            return r
        r = len(self._var)
        if r >= self.node_budget:
            raise NodeBudgetExceeded(self.node_budget)
        self._var.append(v)
        self._lo.append(lo)
        self._hi.append(hi)
        self._unique[key] = r
        return r

    def ithvar(self, i):
        if not 0 <= i < self.nvars:
            raise IndexError(f"variable {i} out of range 0..{self.nvars - 1}")
        return self.mk(i, 0, 1)

    def _remember(self, key, r):
        cache = self._cache
        if len(cache) >= CACHE_LIMIT:
            cache.clear()
        cache[key] = r

    # -- boolean operators ------------------------------------------------

    def not_(self, f):
        if f < 2:
            return 1 - f
        key = (_NOT, f)
        r = self._cache.get(key)
        if r is not None:
            return r
        r = self.mk(self._var[f], self.not_(self._lo[f]), self.not_(self._hi[f]))
        self._remember(key, r)
        return r

    def and_(self, f, g):
        if f == 0 or g == 0:
            return 0
        if f == 1:
            return g
        if g == 1 or f == g:
            return f
        if f > g:
            f, g = g, f
        key = (_AND, f, g)
        r = self._cache.get(key)
        if r is not None:
            return r
        var = self._var
        vf, vg = var[f], var[g]
        if vf == vg:
            r = self.mk(vf, self.and_(self._lo[f], self._lo[g]), self.and_(self._hi[f], self._hi[g]))
        elif vf < vg:
            r = self.mk(vf, self.and_(self._lo[f], g), self.and_(self._hi[f], g))
        else:
            r = self.mk(vg, self.and_(f, self._lo[g]), self.and_(f, self._hi[g]))
        self._remember(key, r)
        return r

    def or_(self, f, g):
        if f == 1 or g == 1:
            return 1
        if f == 0:
            return g
        if g == 0 or f == g:
            return f
        if f > g:
            f, g = g, f
        key = (_OR, f, g)
        r = self._cache.get(key)
        if r is not None:
            return r
        var = self._var
        vf, vg = var[f], var[g]
        if vf == vg:
            r = self.mk(vf, self.or_(self._lo[f], self._lo[g]), self.or_(self._hi[f], self._hi[g]))
        elif vf < vg:
            r = self.mk(vf, self.or_(self._lo[f], g), self.or_(self._hi[f], g))
        else:
            r = self.mk(vg, self.or_(f, self._lo[g]), self.or_(f, self._hi[g]))
        self._remember(key, r)
        return r

    def xor(self, f, g):
        if f == g:
            return 0
        if f == 0:
            return g
        if g == 0:
            return f
        if f == 1:
            return self.not_(g)
        if g == 1:
            return self.not_(f)
        if f > g:
            f, g = g, f
        key = (_XOR, f, g)
        r = self._cache.get(key)
        if r is not None:
            return r
        var = self._var
        vf, vg = var[f], var[g]
        if vf == vg:
            r = self.mk(vf, self.xor(self._lo[f], self._lo[g]), self.xor(self._hi[f], self._hi[g]))
        elif vf < vg:
            r = self.mk(vf, self.xor(self._lo[f], g), self.xor(self._hi[f], g))
        else:
            r = self.mk(vg, self.xor(f, self._lo[g]), self.xor(f, self._hi[g]))
        self._remember(key, r)
        return r

    def ite(self, f, g, h):
        if f == 1:
            return g
        if f == 0:
            return h
        if g == h:
            return g
        if g == 1 and h == 0:
            return f
        if g == 0 and h == 1:
            return self.not_(f)
        if g == 1:
            return self.or_(f, h)
        if h == 0:
            return self.and_(f, g)
        key = (_ITE, f, g, h)
        r = self._cache.get(key)
        if r is not None:
            return r
        var = self._var
        v = min(var[f], var[g], var[h])
        f0, f1 = (self._lo[f], self._hi[f]) if var[f] == v else (f, f)
        g0, g1 = (self._lo[g], self._hi[g]) if var[g] == v else (g, g)
        h0, h1 = (self._lo[h], self._hi[h]) if var[h] == v else (h, h)
        r = self.mk(v, self.ite(f0, g0, h0), self.ite(f1, g1, h1))
        self._remember(key, r)
        return r

    # -- quantification and substitution ----------------------------------

    def exists(self, f, levels):
        qset = frozenset(levels)
        if not qset:
            return f
        last = max(qset)
        memo = {}
        var, lo, hi = self._var, self._lo, self._hi

        def rec(u):
            if u < 2 or var[u] > last:
                return u
            r = memo.get(u)
            if r is not None:
                return r
            v = var[u]
            if v in qset:
                r0 = rec(lo[u])
                r = 1 if r0 == 1 else self.or_(r0, rec(hi[u]))
            else:
                r = self.mk(v, rec(lo[u]), rec(hi[u]))
            memo[u] = r
            return r

        return rec(f)

    def and_exists(self, f, g, levels):
        """Relational product: exists ``levels`` . f & g, without building f & g."""
        qset = frozenset(levels)
        if not qset:
            return self.and_(f, g)
        last = max(qset)
        memo = {}
        var, lo, hi = self._var, self._lo, self._hi

        def ex(u):
            return self.exists(u, qset)

        def rec(a, b):
            if a == 0 or b == 0:
                return 0
            if a == 1 and b == 1:
                return 1
            if a > b:
                a, b = b, a
            va, vb = var[a], var[b]
            v = va if va < vb else vb
            if v > last:
                return self.and_(a, b)
            if a == 1 or a == b:
                return ex(b)
            key = (a, b)
            r = memo.get(key)
            if r is not None:
                return r
            a0, a1 = (lo[a], hi[a]) if va == v else (a, a)
            b0, b1 = (lo[b], hi[b]) if vb == v else (b, b)
            if v in qset:
                r0 = rec(a0, b0)
                r = 1 if r0 == 1 else self.or_(r0, rec(a1, b1))
            else:
                r = self.mk(v, rec(a0, b0), rec(a1, b1))
            memo[key] = r
            return r

        return rec(f, g)

    def rename(self, f, mapping):
        """Substitute variables by variables; ``mapping`` is {old_level: new_level}."""
        if not mapping:
            return f
        memo = {}
        var, lo, hi = self._var, self._lo, self._hi

        def rec(u):
            if u < 2:
                return u
            r = memo.get(u)
            if r is not None:
                return r
            v = var[u]
            nv = mapping.get(v, v)
            r = self.ite(self.ithvar(nv), rec(hi[u]), rec(lo[u]))
            memo[u] = r
            return r

        return rec(f)
