"""Pure-Python kernels, used when the compiled core is unavailable.

Every routine here has a twin in ``_core.pyx``. The two are kept
operation-for-operation identical (same float expression order, same
PRNG consumption) so that sessions produced by either backend compare
equal; ``tests/test_backends.py`` enforces this.
"""
from __future__ import annotations

import math

import numpy as np

MASK64 = (1 << 64) - 1
BENCH_EPS = 1e-9
D_OBS_FLOOR = 1e-4

STOP_RUNNING = 0
STOP_BENCHMARK = 1
STOP_MAX_CYCLES = 2
STOP_EXHAUSTED = 3

PATH_START = 0
PATH_MOVE = 1
PATH_RESTART = 2


class NonFiniteCost(ArithmeticError):
    """Heuristic produced NaN or infinity."""


# --------------------------------------------------------------------------
# randomness


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def bounded(bitgen, m: int) -> int:
    """Unbiased integer in [0, m) by rejection on the raw 64-bit stream."""
    rem = (1 << 64) % m
    while True:
        r = bitgen.random_raw()
        if rem == 0 or r < (1 << 64) - rem:
            return r % m


def random_flat(bitgen, n_dim: int, m: int) -> int:
    flat = 0
    for _ in range(n_dim):
        flat = flat * m + bounded(bitgen, m)
    return flat


# --------------------------------------------------------------------------
# noise and geometry


def lattice_gradient(i: int, seed: int) -> float:
    h = splitmix64((seed & MASK64) ^ splitmix64(i & MASK64))
    return (h >> 11) * (1.0 / 9007199254740992.0) * 2.0 - 1.0


def fade(t: float) -> float:
    return t * t * t * (t * (t * 6.0 - 15.0) + 10.0)


def perlin1d(x: float, wavelength: float, seed: int) -> float:
    u = x / wavelength
    i0 = math.floor(u)
    t = u - i0
    g0 = lattice_gradient(i0, seed)
    g1 = lattice_gradient(i0 + 1, seed)
    k = fade(t)
    v = (1.0 - k) * (g0 * t) + k * (g1 * (t - 1.0))
    return min(1.0, max(-1.0, v))


def integrate_arc(x: float, y: float, theta: float, kappa: float, ds: float):
    th = theta + kappa * ds
    st = math.sin(theta)
    ct = math.cos(theta)
    if abs(kappa) >= 1e-9:
        # sin(th) - sin(theta) and cos(th) - cos(theta) rewritten without
        # cancellation: 1 - cos(phi) = 2 sin^2(phi/2)
        phi = kappa * ds
        sp = math.sin(phi)
        h = math.sin(0.5 * phi)
        vc = 2.0 * h * h
        return x + (ct * sp - st * vc) / kappa, y + (ct * vc + st * sp) / kappa, th
    return x + ds * ct, y + ds * st, th


def clearance_raw(cx, cy, ct, st, w, ds: float, px: float, py: float) -> float:
    """Corridor clearance at (px, py); -1.0 when beyond either end."""
    dx = px - cx
    dy = py - cy
    i = int(np.argmin(dx * dx + dy * dy))
    n = len(cx)
    ddx = px - float(cx[i])
    ddy = py - float(cy[i])
    a = ddx * float(ct[i]) + ddy * float(st[i])
    lat = float(ct[i]) * ddy - float(st[i]) * ddx
    if a > 0.0:
        j = i + 1
    elif a < 0.0:
        j = i - 1
    else:
        j = i
    if j < 0 or j >= n:
        return -1.0
    u = abs(a) / ds
    if u > 1.0:
        u = 1.0
    wi = float(w[i]) + (float(w[j]) - float(w[i])) * u
    c = 0.5 * wi - abs(lat)
    return c if c > 0.0 else 0.0


# --------------------------------------------------------------------------
# heuristics


def synthetic_cost(center, f: float, values) -> float:
    total = 0.0
    for j in range(len(center)):
        x = center[j] - values[j]
        total += 0.05 * f * f * x * x - math.cos(2.0 * math.pi * f * x) + 1.0
    return total


class SyntheticKernel:
    def __init__(self, center, f: float):
        self.center = [float(v) for v in center]
        self.f = float(f)
        self.n_dim = len(self.center)

    def __call__(self, values) -> float:
        return synthetic_cost(self.center, self.f, values)


class RobotKernel:
    """Eq.-style cost of a piecewise-arc rollout through a corridor."""

    def __init__(self, cx, cy, ct, st, w, ds_world, start, n_dim, seg_len, ds_sim):
        self.cx = np.ascontiguousarray(cx, dtype=np.float64)
        self.cy = np.ascontiguousarray(cy, dtype=np.float64)
        self.ct = np.ascontiguousarray(ct, dtype=np.float64)
        self.st = np.ascontiguousarray(st, dtype=np.float64)
        self.w = np.ascontiguousarray(w, dtype=np.float64)
        self.ds_world = float(ds_world)
        self.start = tuple(float(v) for v in start)
        self.n_dim = int(n_dim)
        self.seg_len = float(seg_len)
        self.ds_sim = float(ds_sim)
        self.steps = int(round(self.seg_len / self.ds_sim))

    def __call__(self, values) -> float:
        n_dim, steps, ds_sim = self.n_dim, self.steps, self.ds_sim
        seg = [self.start]
        for g in range(n_dim):
            x, y, th = seg[g]
            seg.append(integrate_arc(x, y, th, values[g], steps * ds_sim))
        reward_span = 0.3 * n_dim
        dmin = math.inf
        best = math.inf
        truncated = False
        last = n_dim * steps
        for k in range(last + 1):
            if dmin <= D_OBS_FLOOR:
                # clearance can no longer move the running minimum; the rest
                # of the cost curve falls with distance, so only the end matters
                r = 0.01 / D_OBS_FLOOR
                h = (reward_span - last * ds_sim) + 0.1 * r * r
                if h < best:
                    best = h
                break
            if k == 0:
                x, y = self.start[0], self.start[1]
            else:
                g = (k - 1) // steps
                mstep = k - g * steps
                sx, sy, sth = seg[g]
                x, y, _ = integrate_arc(sx, sy, sth, values[g], mstep * ds_sim)
            if truncated:
                c = 0.0
            else:
                c = clearance_raw(self.cx, self.cy, self.ct, self.st, self.w, self.ds_world, x, y)
                if c < 0.0:
                    truncated = True
                    c = 0.0
            if c < dmin:
                dmin = c
            dc = dmin if dmin > D_OBS_FLOOR else D_OBS_FLOOR
            r = 0.01 / dc
            h = (reward_span - k * ds_sim) + 0.1 * r * r
            if h < best:
                best = h
        return best


# --------------------------------------------------------------------------
# search loops


class _Run:
    def __init__(self, kernel, n_dim, n_div, lo, hi, benchmark, max_cycles, record):
        self.kernel = kernel
        self.n_dim = n_dim
        self.scale = 1 << n_div
        self.m = self.scale + 1
        self.total = self.m**n_dim
        self.lo = [float(v) for v in lo]
        self.hi = [float(v) for v in hi]
        self.threshold = benchmark + BENCH_EPS
        self.max_cycles = max_cycles
        self.record = record
        self.cache: dict[int, float] = {}
        self.order: list[int] = []
        self.costs: list[float] = []
        self.curve_cycles: list[int] = []
        self.curve_costs: list[float] = []
        self.best = math.inf
        self.best_flat = -1
        self.stop = STOP_RUNNING
        self.draws = 0
        self.restarts: list[int] = []
        self.path: list[int] = []
        self.path_kind: list[int] = []
        self.strides = [self.m ** (n_dim - 1 - j) for j in range(n_dim)]

    def values(self, flat: int) -> list[float]:
        out = [0.0] * self.n_dim
        for j in range(self.n_dim - 1, -1, -1):
            idx = flat % self.m
            flat //= self.m
            if idx == self.scale:
                out[j] = self.hi[j]
            else:
                out[j] = self.lo[j] + (self.hi[j] - self.lo[j]) * idx / self.scale
        return out

    def eval(self, flat: int) -> float:
        c = self.cache.get(flat)
        if c is not None:
            return c
        c = float(self.kernel(self.values(flat)))
        if not math.isfinite(c):
            raise NonFiniteCost(f"heuristic returned {c} at flat index {flat}")
        self.cache[flat] = c
        if self.record:
            self.order.append(flat)
            self.costs.append(c)
        cycles = len(self.cache)
        if c < self.best:
            self.best = c
            self.best_flat = flat
            self.curve_cycles.append(cycles)
            self.curve_costs.append(c)
        if c <= self.threshold:
            self.stop = STOP_BENCHMARK
        elif cycles >= self.max_cycles:
            self.stop = STOP_MAX_CYCLES
        elif cycles == self.total:
            self.stop = STOP_EXHAUSTED
        return c

    def neighbors(self, flat: int) -> list[int]:
        out = []
        for stride in self.strides:
            idx = (flat // stride) % self.m
            if idx > 0:
                out.append(flat - stride)
            if idx < self.m - 1:
                out.append(flat + stride)
        return out

    def visit(self, flat: int, kind: int) -> None:
        if self.record:
            self.path.append(flat)
            self.path_kind.append(kind)

    def result(self) -> dict:
        return {
            "cycles": len(self.cache),
            "draws": self.draws,
            "best_cost": self.best,
            "best_flat": self.best_flat,
            "stop": self.stop,
            "order": np.asarray(self.order, dtype=np.int64),
            "costs": np.asarray(self.costs, dtype=np.float64),
            "curve_cycles": np.asarray(self.curve_cycles, dtype=np.int64),
            "curve_costs": np.asarray(self.curve_costs, dtype=np.float64),
            "restarts": np.asarray(self.restarts, dtype=np.int64),
            "path": np.asarray(self.path, dtype=np.int64),
            "path_kind": np.asarray(self.path_kind, dtype=np.int8),
        }


def rrhc(kernel, n_dim, n_div, lo, hi, benchmark, max_cycles, bitgen, start=-1, record=True):
    run = _Run(kernel, n_dim, n_div, lo, hi, benchmark, max_cycles, record)
    if start >= 0:
        cur = start
    else:
        cur = random_flat(bitgen, n_dim, run.m)
        run.draws += 1
    run.visit(cur, PATH_START)
    cur_cost = run.eval(cur)
    while run.stop == STOP_RUNNING:
        best_nb = -1
        best_nc = math.inf
        for nb in run.neighbors(cur):
            c = run.eval(nb)
            if run.stop != STOP_RUNNING:
                break
            if c < best_nc:
                best_nc = c
                best_nb = nb
        if run.stop != STOP_RUNNING:
            break
        if best_nc < cur_cost:
            cur = best_nb
            cur_cost = best_nc
            run.visit(cur, PATH_MOVE)
        else:
            run.restarts.append(cur)
            cur = random_flat(bitgen, n_dim, run.m)
            run.draws += 1
            run.visit(cur, PATH_RESTART)
            cur_cost = run.eval(cur)
    return run.result()


def grid(kernel, n_dim, n_div, lo, hi, benchmark, max_cycles, record=True):
    run = _Run(kernel, n_dim, n_div, lo, hi, benchmark, max_cycles, record)
    for level in range(1, n_div + 1):
        step = 1 << (n_div - level)
        per_dim = (1 << level) + 1
        digits = [0] * n_dim
        while True:
            coarse = level > 1 and all(d % 2 == 0 for d in digits)
            if not coarse:
                flat = 0
                for d in digits:
                    flat = flat * run.m + d * step
                run.eval(flat)
                if run.stop != STOP_RUNNING:
                    return run.result()
            j = n_dim - 1
            while j >= 0:
                digits[j] += 1
                if digits[j] < per_dim:
                    break
                digits[j] = 0
                j -= 1
            if j < 0:
                break
    return run.result()


def random_search(kernel, n_dim, n_div, lo, hi, benchmark, max_cycles, bitgen, record=True):
    run = _Run(kernel, n_dim, n_div, lo, hi, benchmark, max_cycles, record)
    while run.stop == STOP_RUNNING:
        flat = random_flat(bitgen, n_dim, run.m)
        run.draws += 1
        run.eval(flat)
    return run.result()


def exhaustive(kernel, n_dim, n_div, lo, hi):
    """(min cost, first flat index attaining it) over the whole grid."""
    run = _Run(kernel, n_dim, n_div, lo, hi, -math.inf, math.inf, False)
    best = math.inf
    arg = -1
    for flat in range(run.total):
        c = float(kernel(run.values(flat)))
        if not math.isfinite(c):
            raise NonFiniteCost(f"heuristic returned {c} at flat index {flat}")
        if c < best:
            best = c
            arg = flat
    return best, arg
