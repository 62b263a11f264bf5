# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels: heuristic evaluation and the three search loops.

Mirrors ``ctlsearch._pure`` operation for operation. Keep the two in
lock-step; any change to float expression order here must be repeated
there or the backend-equivalence tests will fail.
"""
from libc.math cimport cos, sin, fabs, floor, isfinite, M_PI, INFINITY
from libc.stdint cimport uint64_t, int64_t, UINT64_MAX
from libc.stdlib cimport malloc, free
from libcpp.vector cimport vector
from libcpp.unordered_map cimport unordered_map
from cython.operator cimport dereference as deref
from cpython.pycapsule cimport PyCapsule_GetPointer
from numpy.random cimport bitgen_t

import numpy as np

from ctlsearch._pure import BENCH_EPS, D_OBS_FLOOR, NonFiniteCost

# values match the module constants in _pure
cdef enum:
    STOP_RUNNING = 0
    STOP_BENCHMARK = 1
    STOP_MAX_CYCLES = 2
    STOP_EXHAUSTED = 3
    PATH_START = 0
    PATH_MOVE = 1
    PATH_RESTART = 2

cdef double _BENCH_EPS = BENCH_EPS
cdef double _D_OBS_FLOOR = D_OBS_FLOOR
# dense cost table up to this many configurations, hash map beyond
cdef int64_t DENSE_LIMIT = 1 << 25
cdef enum:
    MAX_SEGMENTS = 16


# --------------------------------------------------------------------------
# randomness

cdef inline uint64_t _splitmix64(uint64_t x) noexcept nogil:
    x = x + <uint64_t>0x9E3779B97F4A7C15
    x = (x ^ (x >> 30)) * <uint64_t>0xBF58476D1CE4E5B9
    x = (x ^ (x >> 27)) * <uint64_t>0x94D049BB133111EB
    return x ^ (x >> 31)


cdef inline uint64_t _bounded(bitgen_t* g, uint64_t m) noexcept nogil:
    cdef uint64_t rem = (UINT64_MAX % m + 1) % m
    cdef uint64_t r
    while True:
        r = g.next_uint64(g.state)
        if rem == 0 or r < <uint64_t>(0 - rem):
            return r % m


cdef inline int64_t _random_flat(bitgen_t* g, int n_dim, int64_t m) noexcept nogil:
    cdef int64_t flat = 0
    cdef int j
    for j in range(n_dim):
        flat = flat * m + <int64_t>_bounded(g, <uint64_t>m)
    return flat


cdef bitgen_t* _bitgen_ptr(object bit_generator) except NULL:
    capsule = bit_generator.capsule
    return <bitgen_t*>PyCapsule_GetPointer(capsule, "BitGenerator")


def splitmix64(uint64_t x):
    return _splitmix64(x)


def bounded(bit_generator, uint64_t m):
    cdef bitgen_t* g = _bitgen_ptr(bit_generator)
    with bit_generator.lock:
        return _bounded(g, m)


def random_flat(bit_generator, int n_dim, int64_t m):
    cdef bitgen_t* g = _bitgen_ptr(bit_generator)
    with bit_generator.lock:
        return _random_flat(g, n_dim, m)


# --------------------------------------------------------------------------
# noise and geometry

cdef inline double _lattice_gradient(int64_t i, uint64_t seed) noexcept nogil:
    cdef uint64_t h = _splitmix64(seed ^ _splitmix64(<uint64_t>i))
    return <double>(h >> 11) * (1.0 / 9007199254740992.0) * 2.0 - 1.0


cdef inline double _fade(double t) noexcept nogil:
    return t * t * t * (t * (t * 6.0 - 15.0) + 10.0)


cdef double _perlin1d(double x, double wavelength, uint64_t seed) noexcept nogil:
    cdef double u = x / wavelength
    cdef double fl = floor(u)
    cdef int64_t i0 = <int64_t>fl
    cdef double t = u - fl
    cdef double g0 = _lattice_gradient(i0, seed)
    cdef double g1 = _lattice_gradient(i0 + 1, seed)
    cdef double k = _fade(t)
    cdef double v = (1.0 - k) * (g0 * t) + k * (g1 * (t - 1.0))
    if v > 1.0:
        return 1.0
    if v < -1.0:
        return -1.0
    return v


def lattice_gradient(int64_t i, uint64_t seed):
    return _lattice_gradient(i, seed)


def perlin1d(double x, double wavelength, uint64_t seed):
    return _perlin1d(x, wavelength, seed)


cdef inline void _arc_sc(double x, double y, double theta, double sin_t, double cos_t,
                         double kappa, double ds, double* ox, double* oy) noexcept nogil:
    # sin(theta), cos(theta) supplied by the caller; 1 - cos(phi) = 2 sin^2(phi/2)
    # avoids cancellation at small curvature
    cdef double phi, sp, h, vc
    if fabs(kappa) >= 1e-9:
        phi = kappa * ds
        sp = sin(phi)
        h = sin(0.5 * phi)
        vc = 2.0 * h * h
        ox[0] = x + (cos_t * sp - sin_t * vc) / kappa
        oy[0] = y + (cos_t * vc + sin_t * sp) / kappa
    else:
        ox[0] = x + ds * cos_t
        oy[0] = y + ds * sin_t


cdef inline void _arc(double x, double y, double theta, double kappa, double ds,
                      double* ox, double* oy, double* oth) noexcept nogil:
    _arc_sc(x, y, theta, sin(theta), cos(theta), kappa, ds, ox, oy)
    oth[0] = theta + kappa * ds


def integrate_arc(double x, double y, double theta, double kappa, double ds):
    cdef double ox, oy, oth
    _arc(x, y, theta, kappa, ds, &ox, &oy, &oth)
    return ox, oy, oth


cdef struct CandGrid:
    double x0, y0, cell
    Py_ssize_t nx, ny
    const int64_t* offsets
    const int64_t* indices


cdef inline Py_ssize_t _nearest(const double* cx, const double* cy, Py_ssize_t n,
                                const CandGrid* grid, double px, double py) noexcept nogil:
    cdef Py_ssize_t i, bi = 0, lo = 0, hi = n, gi, gj, k
    cdef double dx, dy, d2, best = INFINITY, fx, fy
    cdef bint use_grid = False
    if grid != NULL and grid.nx > 0:
        fx = floor((px - grid.x0) / grid.cell)
        fy = floor((py - grid.y0) / grid.cell)
        if fx >= 0 and fy >= 0 and fx < grid.nx and fy < grid.ny:
            gi = <Py_ssize_t>fx
            gj = <Py_ssize_t>fy
            use_grid = True
    if use_grid:
        k = gi * grid.ny + gj
        use_grid = grid.offsets[k + 1] > grid.offsets[k]
    if use_grid:
        for k in range(grid.offsets[k], grid.offsets[k + 1]):
            i = grid.indices[k]
            dx = px - cx[i]
            dy = py - cy[i]
            d2 = dx * dx + dy * dy
            if d2 < best:
                best = d2
                bi = i
        return bi
    for i in range(n):
        dx = px - cx[i]
        dy = py - cy[i]
        d2 = dx * dx + dy * dy
        if d2 < best:
            best = d2
            bi = i
    return bi


cdef double _clearance(const double* cx, const double* cy, const double* ct,
                       const double* st, const double* w, Py_ssize_t n, double ds,
                       const CandGrid* grid, double px, double py) noexcept nogil:
    cdef Py_ssize_t i = _nearest(cx, cy, n, grid, px, py), j
    cdef double dx = px - cx[i]
    cdef double dy = py - cy[i]
    cdef double a = dx * ct[i] + dy * st[i]
    cdef double lat = ct[i] * dy - st[i] * dx
    if a > 0.0:
        j = i + 1
    elif a < 0.0:
        j = i - 1
    else:
        j = i
    if j < 0 or j >= n:
        return -1.0
    cdef double u = fabs(a) / ds
    if u > 1.0:
        u = 1.0
    cdef double wi = w[i] + (w[j] - w[i]) * u
    cdef double c = 0.5 * wi - fabs(lat)
    return c if c > 0.0 else 0.0


def clearance_raw(const double[::1] cx, const double[::1] cy, const double[::1] ct,
                  const double[::1] st, const double[::1] w, double ds, double px, double py):
    return _clearance(&cx[0], &cy[0], &ct[0], &st[0], &w[0], cx.shape[0], ds, NULL, px, py)


# --------------------------------------------------------------------------
# heuristics

cdef class Kernel:
    """Base for C-level heuristics; ``cost`` reads ``n_dim`` values."""

    cdef public int n_dim

    cdef double cost(self, const double* v) noexcept nogil:
        return 0.0

    def __call__(self, values):
        cdef double[::1] buf = np.ascontiguousarray(values, dtype=np.float64)
        if buf.shape[0] != self.n_dim:
            raise ValueError(f"expected {self.n_dim} values, got {buf.shape[0]}")
        return self.cost(&buf[0])


def synthetic_cost(center, double f, values):
    return SyntheticKernel(center, f)(values)


cdef class SyntheticKernel(Kernel):
    cdef double[::1] center
    cdef public double f

    def __init__(self, center, double f):
        self.center = np.array(center, dtype=np.float64)
        self.n_dim = self.center.shape[0]
        self.f = f

    cdef double cost(self, const double* v) noexcept nogil:
        cdef double total = 0.0, x
        cdef double f = self.f
        cdef int j
        for j in range(self.n_dim):
            x = self.center[j] - v[j]
            total += 0.05 * f * f * x * x - cos(2.0 * M_PI * f * x) + 1.0
        return total


cdef class RobotKernel(Kernel):
    cdef const double[::1] cx, cy, ct, st, w
    cdef double ds_world, sx, sy, sth, seg_len, ds_sim
    cdef int steps
    cdef const int64_t[::1] grid_offsets, grid_indices
    cdef CandGrid grid
    cdef bint has_grid

    def __init__(self, cx, cy, ct, st, w, double ds_world, start, int n_dim,
                 double seg_len, double ds_sim):
        self.cx = np.ascontiguousarray(cx, dtype=np.float64)
        self.cy = np.ascontiguousarray(cy, dtype=np.float64)
        self.ct = np.ascontiguousarray(ct, dtype=np.float64)
        self.st = np.ascontiguousarray(st, dtype=np.float64)
        self.w = np.ascontiguousarray(w, dtype=np.float64)
        self.ds_world = ds_world
        self.sx, self.sy, self.sth = [float(v) for v in start]
        self.n_dim = n_dim
        self.seg_len = seg_len
        self.ds_sim = ds_sim
        self.steps = <int>round(seg_len / ds_sim)
        if not 1 <= n_dim <= MAX_SEGMENTS:
            raise ValueError(f"robot plans support 1..{MAX_SEGMENTS} segments")
        self.has_grid = False

    def set_candidate_grid(self, double x0, double y0, double cell, Py_ssize_t nx, Py_ssize_t ny,
                           offsets, indices):
        """Accelerate nearest-sample queries; results are unchanged."""
        self.grid_offsets = np.ascontiguousarray(offsets, dtype=np.int64)
        self.grid_indices = np.ascontiguousarray(indices, dtype=np.int64)
        if self.grid_offsets.shape[0] != nx * ny + 1:
            raise ValueError("offsets length must be nx * ny + 1")
        if self.grid_indices.shape[0] == 0:
            raise ValueError("empty candidate grid")
        self.grid.x0 = x0
        self.grid.y0 = y0
        self.grid.cell = cell
        self.grid.nx = nx
        self.grid.ny = ny
        self.grid.offsets = &self.grid_offsets[0]
        self.grid.indices = &self.grid_indices[0]
        self.has_grid = True

    cdef double cost(self, const double* v) noexcept nogil:
        cdef int n_dim = self.n_dim, steps = self.steps
        cdef double ds_sim = self.ds_sim
        cdef double seg[3 * (MAX_SEGMENTS + 1)]
        cdef double seg_sin[MAX_SEGMENTS]
        cdef double seg_cos[MAX_SEGMENTS]
        cdef Py_ssize_t n = self.cx.shape[0]
        cdef int g, k, mstep, last = n_dim * steps
        cdef double x, y, th, c, dc, r, h
        cdef double dmin = INFINITY, best = INFINITY
        cdef double reward_span = 0.3 * n_dim
        cdef bint truncated = False
        cdef const CandGrid* gridp = &self.grid if self.has_grid else NULL
        seg[0] = self.sx
        seg[1] = self.sy
        seg[2] = self.sth
        for g in range(n_dim):
            seg_sin[g] = sin(seg[3 * g + 2])
            seg_cos[g] = cos(seg[3 * g + 2])
            _arc(seg[3 * g], seg[3 * g + 1], seg[3 * g + 2], v[g], steps * ds_sim,
                 &seg[3 * g + 3], &seg[3 * g + 4], &seg[3 * g + 5])
        for k in range(last + 1):
            if dmin <= _D_OBS_FLOOR:
                # clearance can no longer move the running minimum; the rest
                # of the cost curve falls with distance, so only the end matters
                r = 0.01 / _D_OBS_FLOOR
                h = (reward_span - last * ds_sim) + 0.1 * r * r
                if h < best:
                    best = h
                break
            if k == 0:
                x = self.sx
                y = self.sy
            else:
                g = (k - 1) // steps
                mstep = k - g * steps
                _arc_sc(seg[3 * g], seg[3 * g + 1], seg[3 * g + 2], seg_sin[g], seg_cos[g],
                        v[g], mstep * ds_sim, &x, &y)
            if truncated:
                c = 0.0
            else:
                c = _clearance(&self.cx[0], &self.cy[0], &self.ct[0], &self.st[0], &self.w[0],
                               n, self.ds_world, gridp, x, y)
                if c < 0.0:
                    truncated = True
                    c = 0.0
            if c < dmin:
                dmin = c
            dc = dmin if dmin > _D_OBS_FLOOR else _D_OBS_FLOOR
            r = 0.01 / dc
            h = (reward_span - k * ds_sim) + 0.1 * r * r
            if h < best:
                best = h
        return best


# --------------------------------------------------------------------------
# search loops

cdef class _Run:
    cdef Kernel kernel
    cdef int n_dim
    cdef int64_t scale, m, total, max_cycles, cycles, best_flat, draws
    cdef double threshold, best
    cdef int stop
    cdef bint record, dense, failed
    cdef double* table
    cdef unordered_map[int64_t, double] hashed
    cdef double* values
    cdef double* lo
    cdef double* hi
    cdef int64_t* strides
    cdef vector[int64_t] order, curve_cycles, restarts, path
    cdef vector[double] costs, curve_costs
    cdef vector[signed char] path_kind
    cdef double bad_cost
    cdef int64_t bad_flat

    def __cinit__(self, Kernel kernel, int n_dim, int n_div, lo, hi, double benchmark,
                  int64_t max_cycles, bint record):
        cdef int j
        cdef int64_t i
        self.table = NULL
        self.values = NULL
        self.lo = NULL
        self.hi = NULL
        self.strides = NULL
        if kernel.n_dim != n_dim:
            raise ValueError(f"kernel expects {kernel.n_dim} dims, space has {n_dim}")
        self.kernel = kernel
        self.n_dim = n_dim
        self.scale = (<int64_t>1) << n_div
        self.m = self.scale + 1
        self.total = 1
        for j in range(n_dim):
            self.total *= self.m
        self.threshold = benchmark + _BENCH_EPS
        self.max_cycles = max_cycles
        self.record = record
        self.cycles = 0
        self.draws = 0
        self.best = INFINITY
        self.best_flat = -1
        self.stop = STOP_RUNNING
        self.failed = False
        self.values = <double*>malloc(n_dim * sizeof(double))
        self.lo = <double*>malloc(n_dim * sizeof(double))
        self.hi = <double*>malloc(n_dim * sizeof(double))
        self.strides = <int64_t*>malloc(n_dim * sizeof(int64_t))
        if self.values == NULL or self.lo == NULL or self.hi == NULL or self.strides == NULL:
            raise MemoryError()
        for j in range(n_dim):
            self.lo[j] = float(lo[j])
            self.hi[j] = float(hi[j])
        self.strides[n_dim - 1] = 1
        for j in range(n_dim - 2, -1, -1):
            self.strides[j] = self.strides[j + 1] * self.m
        self.dense = self.total <= DENSE_LIMIT
        if self.dense:
            self.table = <double*>malloc(self.total * sizeof(double))
            if self.table == NULL:
                raise MemoryError()
            for i in range(self.total):
                self.table[i] = -INFINITY  # sentinel: costs are finite

    def __dealloc__(self):
        free(self.table)
        free(self.values)
        free(self.lo)
        free(self.hi)
        free(self.strides)

    cdef inline double lookup(self, int64_t flat, bint* found) noexcept nogil:
        cdef double c
        cdef unordered_map[int64_t, double].iterator it
        if self.dense:
            c = self.table[flat]
            found[0] = c != -INFINITY
            return c
        it = self.hashed.find(flat)
        if it == self.hashed.end():
            found[0] = False
            return 0.0
        found[0] = True
        return deref(it).second

    cdef double eval(self, int64_t flat) noexcept nogil:
        cdef bint found
        cdef double c = self.lookup(flat, &found)
        if found:
            return c
        cdef int64_t rest = flat, idx
        cdef int j
        for j in range(self.n_dim - 1, -1, -1):
            idx = rest % self.m
            rest = rest // self.m
            if idx == self.scale:
                self.values[j] = self.hi[j]
            else:
                self.values[j] = self.lo[j] + (self.hi[j] - self.lo[j]) * <double>idx / <double>self.scale
        c = self.kernel.cost(self.values)
        if not isfinite(c):
            self.failed = True
            self.bad_cost = c
            self.bad_flat = flat
            self.stop = -1
            return c
        if self.dense:
            self.table[flat] = c
        else:
            self.hashed[flat] = c
        self.cycles += 1
        if self.record:
            self.order.push_back(flat)
            self.costs.push_back(c)
        if c < self.best:
            self.best = c
            self.best_flat = flat
            self.curve_cycles.push_back(self.cycles)
            self.curve_costs.push_back(c)
        if c <= self.threshold:
            self.stop = STOP_BENCHMARK
        elif self.cycles >= self.max_cycles:
            self.stop = STOP_MAX_CYCLES
        elif self.cycles == self.total:
            self.stop = STOP_EXHAUSTED
        return c

    cdef inline void visit(self, int64_t flat, signed char kind) noexcept nogil:
        if self.record:
            self.path.push_back(flat)
            self.path_kind.push_back(kind)

    cdef object result(self):
        if self.failed:
            raise NonFiniteCost(f"heuristic returned {self.bad_cost} at flat index {self.bad_flat}")
        return {
            "cycles": int(self.cycles),
            "draws": int(self.draws),
            "best_cost": float(self.best),
            "best_flat": int(self.best_flat),
            "stop": int(self.stop),
            "order": np.asarray(<int64_t[:self.order.size()]>self.order.data(), dtype=np.int64).copy()
            if self.order.size() else np.empty(0, dtype=np.int64),
            "costs": np.asarray(<double[:self.costs.size()]>self.costs.data()).copy()
            if self.costs.size() else np.empty(0, dtype=np.float64),
            "curve_cycles": np.array(list(self.curve_cycles), dtype=np.int64),
            "curve_costs": np.array(list(self.curve_costs), dtype=np.float64),
            "restarts": np.array(list(self.restarts), dtype=np.int64),
            "path": np.array(list(self.path), dtype=np.int64),
            "path_kind": np.array(list(self.path_kind), dtype=np.int8),
        }


def rrhc(Kernel kernel, int n_dim, int n_div, lo, hi, double benchmark, int64_t max_cycles,
         bit_generator, int64_t start=-1, bint record=True):
    cdef _Run run = _Run(kernel, n_dim, n_div, lo, hi, benchmark, max_cycles, record)
    cdef bitgen_t* g = _bitgen_ptr(bit_generator)
    cdef int64_t cur, nb, best_nb, idx, stride
    cdef double cur_cost, best_nc, c
    cdef int j, sgn
    with bit_generator.lock:
        with nogil:
            if start >= 0:
                cur = start
            else:
                cur = _random_flat(g, n_dim, run.m)
                run.draws += 1
            run.visit(cur, PATH_START)
            cur_cost = run.eval(cur)
            while run.stop == STOP_RUNNING:
                best_nb = -1
                best_nc = INFINITY
                for j in range(n_dim):
                    stride = run.strides[j]
                    idx = (cur // stride) % run.m
                    for sgn in range(2):
                        if sgn == 0:
                            if idx == 0:
                                continue
                            nb = cur - stride
                        else:
                            if idx == run.m - 1:
                                continue
                            nb = cur + stride
                        c = run.eval(nb)
                        if run.stop != STOP_RUNNING:
                            break
                        if c < best_nc:
                            best_nc = c
                            best_nb = nb
                    if run.stop != STOP_RUNNING:
                        break
                if run.stop != STOP_RUNNING:
                    break
                if best_nc < cur_cost:
                    cur = best_nb
                    cur_cost = best_nc
                    run.visit(cur, PATH_MOVE)
                else:
                    if run.record:
                        run.restarts.push_back(cur)
                    cur = _random_flat(g, n_dim, run.m)
                    run.draws += 1
                    run.visit(cur, PATH_RESTART)
                    cur_cost = run.eval(cur)
    return run.result()


def grid(Kernel kernel, int n_dim, int n_div, lo, hi, double benchmark, int64_t max_cycles,
         bint record=True):
    cdef _Run run = _Run(kernel, n_dim, n_div, lo, hi, benchmark, max_cycles, record)
    cdef int level, j
    cdef int64_t step, per_dim, flat
    cdef bint coarse, done
    cdef int64_t* digits = <int64_t*>malloc(n_dim * sizeof(int64_t))
    if digits == NULL:
        raise MemoryError()
    try:
        with nogil:
            done = False
            for level in range(1, n_div + 1):
                if done:
                    break
                step = (<int64_t>1) << (n_div - level)
                per_dim = ((<int64_t>1) << level) + 1
                for j in range(n_dim):
                    digits[j] = 0
                while True:
                    coarse = level > 1
                    if coarse:
                        for j in range(n_dim):
                            if digits[j] % 2 != 0:
                                coarse = False
                                break
                    if not coarse:
                        flat = 0
                        for j in range(n_dim):
                            flat = flat * run.m + digits[j] * step
                        run.eval(flat)
                        if run.stop != STOP_RUNNING:
                            done = True
                            break
                    j = n_dim - 1
                    while j >= 0:
                        digits[j] += 1
                        if digits[j] < per_dim:
                            break
                        digits[j] = 0
                        j -= 1
                    if j < 0:
                        break
    finally:
        free(digits)
    return run.result()


def random_search(Kernel kernel, int n_dim, int n_div, lo, hi, double benchmark,
                  int64_t max_cycles, bit_generator, bint record=True):
    cdef _Run run = _Run(kernel, n_dim, n_div, lo, hi, benchmark, max_cycles, record)
    cdef bitgen_t* g = _bitgen_ptr(bit_generator)
    cdef int64_t flat
    with bit_generator.lock:
        with nogil:
            while run.stop == STOP_RUNNING:
                flat = _random_flat(g, n_dim, run.m)
                run.draws += 1
                run.eval(flat)
    return run.result()


def exhaustive(Kernel kernel, int n_dim, int n_div, lo, hi):
    cdef _Run run = _Run(kernel, n_dim, n_div, lo, hi, -INFINITY, 1, False)
    cdef int64_t flat, arg = -1, rest, idx
    cdef double best = INFINITY, c
    cdef int j
    cdef bint bad = False
    free(run.table)
    run.table = NULL
    with nogil:
        for flat in range(run.total):
            rest = flat
            for j in range(n_dim - 1, -1, -1):
                idx = rest % run.m
                rest = rest // run.m
                if idx == run.scale:
                    run.values[j] = run.hi[j]
                else:
                    run.values[j] = run.lo[j] + (run.hi[j] - run.lo[j]) * <double>idx / <double>run.scale
            c = kernel.cost(run.values)
            if not isfinite(c):
                bad = True
                arg = flat
                best = c
                break
            if c < best:
                best = c
                arg = flat
    if bad:
        raise NonFiniteCost(f"heuristic returned {best} at flat index {arg}")
    return best, arg
