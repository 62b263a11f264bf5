"""Perlin-noise corridor worlds.

A world is a centerline sampled every ``ds`` metres (pose plus curvature)
and a width profile. Curvature and width are two independent 1-D
gradient-noise channels of the same seed. Walls are derived data: the
centerline offset by half the width along the local normal.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ctlsearch import _backend

MAX_CURVATURE = 2.1  # rad/m, robot turning limit
DS_WORLD = 0.01
FILE_VERSION = 1
_MAGIC = "ctlsearch-world"
_COLUMNS = ("s", "x", "y", "theta", "kappa", "w")


class OutOfExtentError(ValueError):
    """Query point projects beyond either end of the corridor."""


class WorldFormatError(ValueError):
    pass


class UnsupportedVersionError(WorldFormatError):
    pass


@dataclass(frozen=True)
class WorldParams:
    kind: str
    length: float = 3.0
    w_min: float = 0.05
    w_max: float = 0.15
    constriction_length: float = 0.05
    curvature_wavelength: float = 0.5
    ds: float = DS_WORLD

    def __post_init__(self):
        if not 0 < self.w_min <= self.w_max:
            raise ValueError(f"need 0 < w_min <= w_max, got {self.w_min}, {self.w_max}")
        for name in ("length", "constriction_length", "curvature_wavelength", "ds"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    @classmethod
    def preset(cls, kind: str) -> "WorldParams":
        if kind == "wide":
            return cls("wide", w_min=0.05, w_max=0.15, constriction_length=0.05)
        if kind == "thin":
            return cls("thin", w_min=0.01, w_max=0.15, constriction_length=0.15)
        raise ValueError(f"unknown world kind {kind!r} (expected wide or thin)")


def perlin1d(x: float, wavelength: float, seed: int) -> float:
    """1-D gradient noise: zero at multiples of ``wavelength``, quintic fade between."""
    if not wavelength > 0:
        raise ValueError("wavelength must be positive")
    return _backend.impl.perlin1d(float(x), float(wavelength), int(seed) & ((1 << 64) - 1))


def _q(v: float) -> float:
    # snap to the file's 9-decimal grid so save/load round-trips bit-exactly
    return float(f"{v:.9f}")


@dataclass(frozen=True, eq=False)
class CorridorWorld:
    s: np.ndarray
    x: np.ndarray
    y: np.ndarray
    theta: np.ndarray
    kappa: np.ndarray
    w: np.ndarray
    params: WorldParams
    seed: int
    _tangent: tuple[np.ndarray, np.ndarray] = field(init=False, repr=False)

    def __post_init__(self):
        arrays = {}
        for name in _COLUMNS:
            arr = np.ascontiguousarray(getattr(self, name), dtype=np.float64)
            arr.setflags(write=False)
            arrays[name] = arr
            object.__setattr__(self, name, arr)
        n = len(self.s)
        if n < 2 or any(len(a) != n for a in arrays.values()):
            raise ValueError("world sample arrays must share a length >= 2")
        if np.any(self.w <= 0):
            raise ValueError("corridor width must be positive everywhere")
        ct, st = np.cos(self.theta), np.sin(self.theta)
        object.__setattr__(self, "_tangent", (ct, st))

    def __eq__(self, other):
        if not isinstance(other, CorridorWorld):
            return NotImplemented
        return (
            self.params == other.params
            and self.seed == other.seed
            and all(np.array_equal(getattr(self, c), getattr(other, c)) for c in _COLUMNS)
        )

    __hash__ = None  # type: ignore[assignment]

    @property
    def n_samples(self) -> int:
        return len(self.s)

    @property
    def ds(self) -> float:
        return self.params.ds

    @property
    def walls(self) -> tuple[np.ndarray, np.ndarray]:
        """(left, right) polylines as (n, 2) arrays."""
        nx, ny = -np.sin(self.theta), np.cos(self.theta)
        half = 0.5 * self.w
        left = np.column_stack([self.x + half * nx, self.y + half * ny])
        right = np.column_stack([self.x - half * nx, self.y - half * ny])
        return left, right

    def kernel_arrays(self):
        ct, st = self._tangent
        return self.x, self.y, ct, st, self.w, self.ds

    def candidate_grid(self, cell: float = 0.01, margin: float = 0.1):
        """Per-cell lists of the samples that can be nearest to a point in the cell.

        Only cells within ``margin`` of the centerline get a list; every other
        cell is empty, which tells the kernel to fall back to a full scan.
        Returns ``(x0, y0, cell, nx, ny, offsets, indices)`` in CSR layout;
        lists are ascending so a scan reproduces brute-force tie-breaking.
        """
        x0 = float(self.x.min()) - margin - cell
        y0 = float(self.y.min()) - margin - cell
        nx = int(math.ceil((float(self.x.max()) + margin + cell - x0) / cell))
        ny = int(math.ceil((float(self.y.max()) + margin + cell - y0) / cell))
        active = np.zeros((nx, ny), dtype=bool)
        for px, py in zip(self.x, self.y):
            i0 = max(int((px - margin - x0) / cell), 0)
            j0 = max(int((py - margin - y0) / cell), 0)
            i1 = min(int((px + margin - x0) / cell) + 1, nx - 1)
            j1 = min(int((py + margin - y0) / cell) + 1, ny - 1)
            active[i0 : i1 + 1, j0 : j1 + 1] = True
        cells = np.flatnonzero(active)
        gx = (x0 + (cells // ny) * cell)[:, None]
        gy = (y0 + (cells % ny) * cell)[:, None]
        sx, sy = self.x[None, :], self.y[None, :]
        # distance bounds between each cell rectangle and each sample
        ox = np.maximum(np.maximum(gx - sx, sx - (gx + cell)), 0.0)
        oy = np.maximum(np.maximum(gy - sy, sy - (gy + cell)), 0.0)
        near = np.sqrt(ox * ox + oy * oy)
        fx = np.maximum(np.abs(sx - gx), np.abs(sx - (gx + cell)))
        fy = np.maximum(np.abs(sy - gy), np.abs(sy - (gy + cell)))
        far = np.sqrt(fx * fx + fy * fy).min(axis=1, keepdims=True)
        mask = near <= far + 1e-9
        counts = np.zeros(nx * ny, dtype=np.int64)
        counts[cells] = mask.sum(axis=1)
        offsets = np.zeros(nx * ny + 1, dtype=np.int64)
        np.cumsum(counts, out=offsets[1:])
        indices = np.nonzero(mask)[1].astype(np.int64)
        return x0, y0, cell, nx, ny, offsets, indices

    def sample_index(self, s: float) -> int:
        i = int(round(s / self.ds))
        if not 0 <= i < self.n_samples:
            raise OutOfExtentError(f"s={s} outside [0, {self.s[-1]}]")
        return i

    @classmethod
    def straight(cls, length: float, width: float, ds: float = DS_WORLD) -> "CorridorWorld":
        """Straight corridor along +x with constant width (test fixture)."""
        n = int(round(length / ds)) + 1
        s = np.arange(n) * ds
        zeros = np.zeros(n)
        params = WorldParams("straight", length=length, w_min=width, w_max=width, ds=ds)
        return cls(s, s.copy(), zeros, zeros, zeros, np.full(n, width), params, 0)


def generate_world(params: WorldParams, seed: int) -> CorridorWorld:
    seed = int(seed) & ((1 << 64) - 1)
    impl = _backend.impl
    n = int(round(params.length / params.ds)) + 1
    s = np.empty(n)
    x = np.empty(n)
    y = np.empty(n)
    th = np.empty(n)
    kap = np.empty(n)
    w = np.empty(n)
    px = py = pth = 0.0
    span = params.w_max - params.w_min
    for k in range(n):
        sk = k * params.ds
        kappa = MAX_CURVATURE * impl.perlin1d(sk, params.curvature_wavelength, seed)
        width = params.w_min + span * (impl.perlin1d(sk, params.constriction_length, seed ^ 1) + 1.0) / 2.0
        s[k], x[k], y[k], th[k], kap[k], w[k] = _q(sk), _q(px), _q(py), _q(pth), _q(kappa), _q(width)
        # piecewise-constant curvature over [s_k, s_k+1]
        px, py, pth = impl.integrate_arc(px, py, pth, kappa, params.ds)
    return CorridorWorld(s, x, y, th, kap, w, params, seed)


def clearance(world: CorridorWorld, p) -> float:
    """Distance from point ``p`` to the nearer wall; 0 at or outside a wall."""
    px, py = float(p[0]), float(p[1])
    c = _backend.impl.clearance_raw(*world.kernel_arrays(), px, py)
    if c < 0:
        raise OutOfExtentError(f"point ({px}, {py}) lies beyond the corridor ends")
    return c


def save_world(world: CorridorWorld, path) -> None:
    p = world.params
    lines = [
        _MAGIC,
        f"version {FILE_VERSION}",
        f"kind {p.kind}",
        f"length {p.length:.9f}",
        f"ds {p.ds:.9f}",
        f"w_min {p.w_min:.9f}",
        f"w_max {p.w_max:.9f}",
        f"constriction_length {p.constriction_length:.9f}",
        f"curvature_wavelength {p.curvature_wavelength:.9f}",
        f"seed {world.seed}",
        f"samples {world.n_samples}",
        " ".join(_COLUMNS),
    ]
    cols = [getattr(world, c) for c in _COLUMNS]
    for row in zip(*cols):
        lines.append(" ".join(f"{v:.9f}" for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


_HEADER = [
    ("kind", str),
    ("length", float),
    ("ds", float),
    ("w_min", float),
    ("w_max", float),
    ("constriction_length", float),
    ("curvature_wavelength", float),
    ("seed", int),
    ("samples", int),
]


def load_world(path) -> CorridorWorld:
    lines = Path(path).read_text().splitlines()

    def line(no: int) -> str:
        if no >= len(lines):
            raise WorldFormatError(f"{path}: line {no + 1}: unexpected end of file")
        return lines[no]

    if line(0).strip() != _MAGIC:
        raise WorldFormatError(f"{path}: line 1: not a world file")
    key, _, val = line(1).partition(" ")
    if key != "version":
        raise WorldFormatError(f"{path}: line 2: field version: missing")
    try:
        version = int(val)
    except ValueError:
        raise WorldFormatError(f"{path}: line 2: field version: not an integer: {val!r}") from None
    if version != FILE_VERSION:
        raise UnsupportedVersionError(f"{path}: unsupported world file version {version}")

    head = {}
    for k, (name, conv) in enumerate(_HEADER):
        no = 2 + k
        key, _, val = line(no).partition(" ")
        if key != name:
            raise WorldFormatError(f"{path}: line {no + 1}: expected field {name}, found {key!r}")
        try:
            head[name] = conv(val)
        except ValueError:
            raise WorldFormatError(f"{path}: line {no + 1}: field {name}: bad value {val!r}") from None

    col_line = 2 + len(_HEADER)
    if tuple(line(col_line).split()) != _COLUMNS:
        raise WorldFormatError(f"{path}: line {col_line + 1}: expected columns {' '.join(_COLUMNS)}")
    n = head["samples"]
    data = np.empty((n, len(_COLUMNS)))
    for r in range(n):
        no = col_line + 1 + r
        parts = line(no).split()
        if len(parts) != len(_COLUMNS):
            raise WorldFormatError(f"{path}: line {no + 1}: expected {len(_COLUMNS)} fields, got {len(parts)}")
        for c, tok in enumerate(parts):
            try:
                data[r, c] = float(tok)
            except ValueError:
                raise WorldFormatError(f"{path}: line {no + 1}: field {_COLUMNS[c]}: bad value {tok!r}") from None
            if not math.isfinite(data[r, c]):
                raise WorldFormatError(f"{path}: line {no + 1}: field {_COLUMNS[c]}: not finite")
    if any(l.strip() for l in lines[col_line + 1 + n :]):
        raise WorldFormatError(f"{path}: line {col_line + 2 + n}: trailing data after {n} samples")
    params = WorldParams(
        head["kind"],
        length=head["length"],
        w_min=head["w_min"],
        w_max=head["w_max"],
        constriction_length=head["constriction_length"],
        curvature_wavelength=head["curvature_wavelength"],
        ds=head["ds"],
    )
    try:
        return CorridorWorld(*(data[:, c] for c in range(len(_COLUMNS))), params, head["seed"])
    except ValueError as exc:
        raise WorldFormatError(f"{path}: {exc}") from None
