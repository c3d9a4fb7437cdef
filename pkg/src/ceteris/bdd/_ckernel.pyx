# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled ROBDD kernel.

Same interface and node numbering as ``_pykernel.Kernel``; node arrays,
the unique table and a lossy computed cache live in C memory.
"""

from libc.stdlib cimport malloc, realloc, free
from libc.string cimport memset
from libc.stdint cimport int32_t, uint32_t, uint64_t

from ..errors import NodeBudgetExceeded

cdef enum:
    OP_AND = 1
    OP_OR = 2
    OP_XOR = 3
    OP_NOT = 4
    OP_ITE = 5
    OP_EXISTS = 6
    OP_AE = 7
    OP_RENAME = 8

ctypedef struct Entry:
    int32_t op
    int32_t a
    int32_t b
    int32_t c
    int32_t r

cdef inline uint64_t _mix(uint64_t a, uint64_t b, uint64_t c, uint64_t d) nogil:
    cdef uint64_t h = a * 0x9E3779B97F4A7C15ULL
    h ^= b + 0xC2B2AE3D27D4EB4FULL + (h << 6) + (h >> 2)
    h ^= c * 0x165667B19E3779F9ULL + (h << 6) + (h >> 2)
    h ^= d * 0x27D4EB2F165667C5ULL + (h << 6) + (h >> 2)
    h ^= h >> 29
    return h


cdef class Kernel:
    cdef int32_t* _var
    cdef int32_t* _lo
    cdef int32_t* _hi
    cdef Py_ssize_t n
    cdef Py_ssize_t cap
    cdef int32_t* table
    cdef uint64_t tmask
    cdef Entry* cache
    cdef uint64_t cmask
    cdef readonly int nvars
    cdef public long long node_budget
    cdef char* qmask
    cdef int qlast
    cdef int32_t* rmap
    cdef dict _sets
    cdef list _set_masks
    cdef dict _maps
    cdef list _map_arrays

    backend = "cython"

    def __cinit__(self, int nvars, long long node_budget=10_000_000):
        self.nvars = nvars
        self.node_budget = node_budget
        self.cap = 1 << 12
        self._var = <int32_t*>malloc(self.cap * sizeof(int32_t))
        self._lo = <int32_t*>malloc(self.cap * sizeof(int32_t))
        self._hi = <int32_t*>malloc(self.cap * sizeof(int32_t))
        self.tmask = (1 << 13) - 1
        self.table = <int32_t*>malloc((self.tmask + 1) * sizeof(int32_t))
        self.cmask = (1 << 16) - 1
        self.cache = <Entry*>malloc((self.cmask + 1) * sizeof(Entry))
        if not (self._var and self._lo and self._hi and self.table and self.cache):
            raise MemoryError()
        memset(self.table, 0xFF, (self.tmask + 1) * sizeof(int32_t))
        memset(self.cache, 0, (self.cmask + 1) * sizeof(Entry))
        self._var[0] = nvars
        self._lo[0] = 0
        self._hi[0] = 0
        self._var[1] = nvars
        self._lo[1] = 1
        self._hi[1] = 1
        self.n = 2
        self._sets = {}
        self._set_masks = []
        self._maps = {}
        self._map_arrays = []

    def __dealloc__(self):
        free(self._var)
        free(self._lo)
        free(self._hi)
        free(self.table)
        free(self.cache)

    # -- node access ------------------------------------------------------

    def level(self, int f):
        return self._var[f]

    def low(self, int f):
        return self._lo[f]

    def high(self, int f):
        return self._hi[f]

    @property
    def size(self):
        return self.n

    def clear_cache(self):
        memset(self.cache, 0, (self.cmask + 1) * sizeof(Entry))

    cdef int _grow_nodes(self) except -1:
        cdef Py_ssize_t cap = self.cap * 2
        cdef int32_t* v = <int32_t*>realloc(self._var, cap * sizeof(int32_t))
        if not v:
            raise MemoryError()
        self._var = v
        v = <int32_t*>realloc(self._lo, cap * sizeof(int32_t))
        if not v:
            raise MemoryError()
        self._lo = v
        v = <int32_t*>realloc(self._hi, cap * sizeof(int32_t))
        if not v:
            raise MemoryError()
        self._hi = v
        self.cap = cap
        return 0

    cdef int _rehash(self) except -1:
        cdef uint64_t size = (self.tmask + 1) * 2
        cdef int32_t* t = <int32_t*>malloc(size * sizeof(int32_t))
        cdef Py_ssize_t i
        cdef uint64_t h
        if not t:
            raise MemoryError()
        memset(t, 0xFF, size * sizeof(int32_t))
        free(self.table)
        self.table = t
        self.tmask = size - 1
        for i in range(2, self.n):
            h = _mix(self._var[i], self._lo[i], self._hi[i], 0) & self.tmask
            while t[h] >= 0:
                h = (h + 1) & self.tmask
            t[h] = <int32_t>i
        # keep the computed cache roughly as large as the node table
        if self.cmask < (1 << 22) - 1 and (self.cmask + 1) < size:
            free(self.cache)
            self.cmask = (self.cmask + 1) * 4 - 1
            self.cache = <Entry*>malloc((self.cmask + 1) * sizeof(Entry))
            if not self.cache:
                raise MemoryError()
            memset(self.cache, 0, (self.cmask + 1) * sizeof(Entry))
        return 0

    cdef int _mk(self, int v, int lo, int hi) except -1:
        cdef uint64_t h
        cdef int32_t r
        if lo == hi:
            return lo
        h = _mix(v, lo, hi, 0) & self.tmask
        while True:
            r = self.table[h]
            if r < 0:
                break
            if self._var[r] == v and self._lo[r] == lo and self._hi[r] == hi:
                return r
            h = (h + 1) & self.tmask
        if self.n >= self.node_budget:
            raise NodeBudgetExceeded(self.node_budget)
        if self.n >= self.cap:
            self._grow_nodes()
        r = <int32_t>self.n
        self._var[r] = v
        self._lo[r] = lo
        self._hi[r] = hi
        self.n += 1
        self.table[h] = r
        if <uint64_t>self.n * 2 > self.tmask:
            self._rehash()
        return r

    cdef inline int _lookup(self, int op, int a, int b, int c):
        cdef Entry* e = &self.cache[_mix(op, a, b, c) & self.cmask]
        if e.op == op and e.a == a and e.b == b and e.c == c:
            return e.r
        return -1

    cdef inline void _store(self, int op, int a, int b, int c, int r):
        cdef Entry* e = &self.cache[_mix(op, a, b, c) & self.cmask]
        e.op = op
        e.a = a
        e.b = b
        e.c = c
        e.r = r

    def mk(self, int v, int lo, int hi):
        return self._mk(v, lo, hi)

    def ithvar(self, int i):
        if not 0 <= i < self.nvars:
            raise IndexError(f"variable {i} out of range 0..{self.nvars - 1}")
        return self._mk(i, 0, 1)

    # -- boolean operators ------------------------------------------------

    cdef int _not(self, int f) except -1:
        cdef int r, lo, hi
        if f < 2:
            return 1 - f
        r = self._lookup(OP_NOT, f, 0, 0)
        if r >= 0:
            return r
        lo = self._not(self._lo[f])
        hi = self._not(self._hi[f])
        r = self._mk(self._var[f], lo, hi)
        self._store(OP_NOT, f, 0, 0, r)
        return r

    cdef int _and(self, int f, int g) except -1:
        cdef int r, vf, vg, t, lo, hi
        if f == 0 or g == 0:
            return 0
        if f == 1:
            return g
        if g == 1 or f == g:
            return f
        if f > g:
            t = f; f = g; g = t
        r = self._lookup(OP_AND, f, g, 0)
        if r >= 0:
            return r
        vf = self._var[f]
        vg = self._var[g]
        if vf == vg:
            lo = self._and(self._lo[f], self._lo[g])
            hi = self._and(self._hi[f], self._hi[g])
            r = self._mk(vf, lo, hi)
        elif vf < vg:
            lo = self._and(self._lo[f], g)
            hi = self._and(self._hi[f], g)
            r = self._mk(vf, lo, hi)
        else:
            lo = self._and(f, self._lo[g])
            hi = self._and(f, self._hi[g])
            r = self._mk(vg, lo, hi)
        self._store(OP_AND, f, g, 0, r)
        return r

    cdef int _or(self, int f, int g) except -1:
        cdef int r, vf, vg, t, lo, hi
        if f == 1 or g == 1:
            return 1
        if f == 0:
            return g
        if g == 0 or f == g:
            return f
        if f > g:
            t = f; f = g; g = t
        r = self._lookup(OP_OR, f, g, 0)
        if r >= 0:
            return r
        vf = self._var[f]
        vg = self._var[g]
        if vf == vg:
            lo = self._or(self._lo[f], self._lo[g])
            hi = self._or(self._hi[f], self._hi[g])
            r = self._mk(vf, lo, hi)
        elif vf < vg:
            lo = self._or(self._lo[f], g)
            hi = self._or(self._hi[f], g)
            r = self._mk(vf, lo, hi)
        else:
            lo = self._or(f, self._lo[g])
            hi = self._or(f, self._hi[g])
            r = self._mk(vg, lo, hi)
        self._store(OP_OR, f, g, 0, r)
        return r

    cdef int _xor(self, int f, int g) except -1:
        cdef int r, vf, vg, t, lo, hi
        if f == g:
            return 0
        if f == 0:
            return g
        if g == 0:
            return f
        if f == 1:
            return self._not(g)
        if g == 1:
            return self._not(f)
        if f > g:
            t = f; f = g; g = t
        r = self._lookup(OP_XOR, f, g, 0)
        if r >= 0:
            return r
        vf = self._var[f]
        vg = self._var[g]
        if vf == vg:
            lo = self._xor(self._lo[f], self._lo[g])
            hi = self._xor(self._hi[f], self._hi[g])
            r = self._mk(vf, lo, hi)
        elif vf < vg:
            lo = self._xor(self._lo[f], g)
            hi = self._xor(self._hi[f], g)
            r = self._mk(vf, lo, hi)
        else:
            lo = self._xor(f, self._lo[g])
            hi = self._xor(f, self._hi[g])
            r = self._mk(vg, lo, hi)
        self._store(OP_XOR, f, g, 0, r)
        return r

    cdef int _ite(self, int f, int g, int h) except -1:
        cdef int r, v, f0, f1, g0, g1, h0, h1, lo, hi
        if f == 1:
            return g
        if f == 0:
            return h
        if g == h:
            return g
        if g == 1 and h == 0:
            return f
        if g == 0 and h == 1:
            return self._not(f)
        if g == 1:
            return self._or(f, h)
        if h == 0:
            return self._and(f, g)
        r = self._lookup(OP_ITE, f, g, h)
        if r >= 0:
            return r
        v = self._var[f]
        if self._var[g] < v:
            v = self._var[g]
        if self._var[h] < v:
            v = self._var[h]
        if self._var[f] == v:
            f0 = self._lo[f]; f1 = self._hi[f]
        else:
            f0 = f; f1 = f
        if self._var[g] == v:
            g0 = self._lo[g]; g1 = self._hi[g]
        else:
            g0 = g; g1 = g
        if self._var[h] == v:
            h0 = self._lo[h]; h1 = self._hi[h]
        else:
            h0 = h; h1 = h
        lo = self._ite(f0, g0, h0)
        hi = self._ite(f1, g1, h1)
        r = self._mk(v, lo, hi)
        self._store(OP_ITE, f, g, h, r)
        return r

    def not_(self, int f):
        return self._not(f)

    def and_(self, int f, int g):
        return self._and(f, g)

    def or_(self, int f, int g):
        return self._or(f, g)

    def xor(self, int f, int g):
        return self._xor(f, g)

    def ite(self, int f, int g, int h):
        return self._ite(f, g, h)

    # -- quantification and substitution ----------------------------------

    cdef int _select_set(self, levels) except -1:
        cdef bytes mask_bytes
        key = tuple(sorted(set(levels)))
        sid = self._sets.get(key)
        if sid is None:
            mask = bytearray(self.nvars + 1)
            for lv in key:
                mask[lv] = 1
            sid = len(self._set_masks) + 1
            self._sets[key] = sid
            self._set_masks.append((bytes(mask), max(key) if key else -1))
        mask_bytes, last = self._set_masks[sid - 1]
        self.qmask = <char*>mask_bytes
        self.qlast = last
        return sid

    cdef int _exists(self, int u, int sid) except -1:
        cdef int v, r, r0, r1
        if u < 2 or self._var[u] > self.qlast:
            return u
        r = self._lookup(OP_EXISTS, u, sid, 0)
        if r >= 0:
            return r
        v = self._var[u]
        if self.qmask[v]:
            r0 = self._exists(self._lo[u], sid)
            if r0 == 1:
                r = 1
            else:
                r1 = self._exists(self._hi[u], sid)
                r = self._or(r0, r1)
        else:
            r0 = self._exists(self._lo[u], sid)
            r1 = self._exists(self._hi[u], sid)
            r = self._mk(v, r0, r1)
        self._store(OP_EXISTS, u, sid, 0, r)
        return r

    cdef int _and_exists(self, int a, int b, int sid) except -1:
        cdef int va, vb, v, r, r0, r1, t, a0, a1, b0, b1
        if a == 0 or b == 0:
            return 0
        if a == 1 and b == 1:
            return 1
        if a > b:
            t = a; a = b; b = t
        va = self._var[a]
        vb = self._var[b]
        v = va if va < vb else vb
        if v > self.qlast:
            return self._and(a, b)
        if a == 1 or a == b:
            return self._exists(b, sid)
        r = self._lookup(OP_AE, a, b, sid)
        if r >= 0:
            return r
        if va == v:
            a0 = self._lo[a]; a1 = self._hi[a]
        else:
            a0 = a; a1 = a
        if vb == v:
            b0 = self._lo[b]; b1 = self._hi[b]
        else:
            b0 = b; b1 = b
        if self.qmask[v]:
            r0 = self._and_exists(a0, b0, sid)
            if r0 == 1:
                r = 1
            else:
                r1 = self._and_exists(a1, b1, sid)
                r = self._or(r0, r1)
        else:
            r0 = self._and_exists(a0, b0, sid)
            r1 = self._and_exists(a1, b1, sid)
            r = self._mk(v, r0, r1)
        self._store(OP_AE, a, b, sid, r)
        return r

    def exists(self, int f, levels):
        levels = tuple(levels)
        if not levels:
            return f
        sid = self._select_set(levels)
        return self._exists(f, sid)

    def and_exists(self, int f, int g, levels):
        levels = tuple(levels)
        if not levels:
            return self._and(f, g)
        sid = self._select_set(levels)
        return self._and_exists(f, g, sid)

    cdef int _rename(self, int u, int mid) except -1:
        cdef int r, lo, hi, x
        if u < 2:
            return u
        r = self._lookup(OP_RENAME, u, mid, 0)
        if r >= 0:
            return r
        x = self._mk(self.rmap[self._var[u]], 0, 1)
        hi = self._rename(self._hi[u], mid)
        lo = self._rename(self._lo[u], mid)
        r = self._ite(x, hi, lo)
        self._store(OP_RENAME, u, mid, 0, r)
        return r

    def rename(self, int f, mapping):
        cdef int i
        if not mapping:
            return f
        key = tuple(sorted(mapping.items()))
        mid = self._maps.get(key)
        if mid is None:
            arr = [i for i in range(self.nvars + 1)]
            for old, new in key:
                if not (0 <= old < self.nvars and 0 <= new < self.nvars):
                    raise IndexError("rename target out of range")
                arr[old] = new
            import array
            buf = array.array("i", arr)
            mid = len(self._map_arrays) + 1
            self._maps[key] = mid
            self._map_arrays.append(buf)
        buf = self._map_arrays[mid - 1]
        cdef int[:] view = buf
        self.rmap = <int32_t*>&view[0]
        return self._rename(f, mid)
