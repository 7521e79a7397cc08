"""Parameter scans over twin-beam families with boundary extraction.

A scan walks a one- to three-dimensional grid over twin-beam parameters
(pair mean, per-mode noise means, beam-splitter transmissivity, detection
efficiency), evaluates a set of targets on every grid cell, and, for
two-dimensional scans, traces the zero contours that separate non-classical
from classical cells.

The heavy lifting is vectorized: every grid cell is one lane of a batched
generating-function expansion, so a 200 x 200 grid with several criteria
amounts to a handful of array operations rather than forty thousand Python
calls.  Threads merely split the flattened grid into contiguous slabs; each
slab writes to a disjoint slice of the preallocated result arrays, which
keeps results byte-identical no matter how many workers run.

Cells whose evaluation degenerates (non-finite results) are recorded in the
error list and marked with verdict -1; they never abort the scan.

Boundary tracing uses marching squares on the sign of a per-target
indicator, with every crossing edge refined by bisection against the exact
evaluator, so reported boundary vertices satisfy the criterion to solver
precision rather than to grid resolution.  Grid values that are exactly
zero count as non-classical for the contour topology.
"""
from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .criteria import RELATIVE_TOL, CriterionId
from .errors import ConfigError
from .moments import _fact, _q_coeff_array
from .quantifiers import ZERO_TOL
from .series import BivariateSeries
from .states import _bs_transform_arrays, _symplectic_pair

__all__ = [
    "AXIS_NAMES",
    "AxisSpec",
    "TargetSpec",
    "ScanSpec",
    "ScanResult",
    "run_scan",
    "write_csv",
    "write_boundaries_json",
]

AXIS_NAMES = ("bp", "bs", "bi", "t", "eta")
NOISE_MODES = ("independent", "balanced", "unbalanced")
THREADS_ENV = "TWINBEAM_THREADS"

_RANGES = {
    "bp": (0.0, math.inf),
    "bs": (0.0, math.inf),
    "bi": (0.0, math.inf),
    "t": (0.0, 1.0),
    "eta": (0.0, 1.0),
    "phi": (-math.inf, math.inf),
}

BISECTION_MAX_ITER = 60
BISECTION_REL_TOL = 1e-9


def _check_range(name: str, value: float):
    lo, hi = _RANGES[name]
    if not np.isfinite(value) and name != "phi":
        raise ConfigError(f"{name} must be finite, got {value}")
    if not lo <= value <= hi:
        raise ConfigError(f"{name} must lie in [{lo}, {hi}], got {value}")


@dataclass(frozen=True)
class AxisSpec:
    """One scanned coordinate: a named parameter with a sampled range."""

    name: str
    start: float
    stop: float
    count: int
    scale: str = "linear"

    def __post_init__(self):
        if self.name not in AXIS_NAMES:
            raise ConfigError(
                f"unknown axis {self.name!r}; expected one of "
                f"{', '.join(AXIS_NAMES)}")
        start = float(self.start)
        stop = float(self.stop)
        count = int(self.count)
        object.__setattr__(self, "start", start)
        object.__setattr__(self, "stop", stop)
        object.__setattr__(self, "count", count)
        if self.scale not in ("linear", "log"):
            raise ConfigError(f"scale must be linear or log, got {self.scale!r}")
        if count < 1:
            raise ConfigError(f"axis {self.name} needs count >= 1, got {count}")
        if not (np.isfinite(start) and np.isfinite(stop)):
            raise ConfigError(f"axis {self.name} bounds must be finite")
        if start > stop:
            raise ConfigError(
                f"axis {self.name} bounds must be ordered, got "
                f"[{start}, {stop}]")
        if self.scale == "log" and start <= 0.0:
            raise ConfigError(
                f"axis {self.name} uses log spacing, so its start must be "
                f"positive, got {start}")
        _check_range(self.name, start)
        _check_range(self.name, stop)

    def values(self) -> np.ndarray:
        if self.count == 1:
            return np.array([self.start])
        if self.scale == "log":
            return np.geomspace(self.start, self.stop, self.count)
        return np.linspace(self.start, self.stop, self.count)


@dataclass(frozen=True)
class TargetSpec:
    """One scanned quantity: a criterion, the negativity, or a local
    quantifier."""

    kind: str
    criterion: CriterionId | None = None
    mode: int = 1

    def __post_init__(self):
        if self.kind not in ("criterion", "negativity", "local"):
            raise ConfigError(f"unknown target kind {self.kind!r}")
        if self.kind == "criterion" and self.criterion is None:
            raise ConfigError("criterion targets need a criterion id")
        if self.mode not in (1, 2):
            raise ConfigError(f"mode must be 1 or 2, got {self.mode!r}")

    def label(self) -> str:
        if self.kind == "criterion":
            return self.criterion.label()
        if self.kind == "negativity":
            return "negativity"
        return f"i_ncl:{self.mode}"

    @classmethod
    def parse(cls, text: str) -> "TargetSpec":
        text = text.strip()
        if text == "negativity":
            return cls("negativity")
        if text.startswith("i_ncl"):
            parts = text.split(":")
            if len(parts) != 2 or parts[1] not in ("1", "2"):
                raise ConfigError(
                    f"local targets are written i_ncl:1 or i_ncl:2, "
                    f"got {text!r}")
            return cls("local", mode=int(parts[1]))
        try:
            return cls("criterion", criterion=CriterionId.parse(text))
        except Exception as exc:
            raise ConfigError(f"cannot parse target {text!r}: {exc}") from None


@dataclass(frozen=True)
class ScanSpec:
    """Complete description of one scan: axes, fixed parameters, targets,
    and how per-mode noise is coupled."""

    axes: tuple
    targets: tuple
    fixed: dict = field(default_factory=dict)
    noise_mode: str = "independent"
    threads: int | None = None

    def __post_init__(self):
        axes = tuple(self.axes)
        targets = tuple(self.targets)
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "targets", targets)
        object.__setattr__(self, "fixed", dict(self.fixed))
        if not 1 <= len(axes) <= 3:
            raise ConfigError(
                f"a scan needs between one and three axes, got {len(axes)}")
        names = [a.name for a in axes]
        if len(set(names)) != len(names):
            raise ConfigError(f"axis names must be unique, got {names}")
        if not targets:
            raise ConfigError("a scan needs at least one target")
        if self.noise_mode not in NOISE_MODES:
            raise ConfigError(
                f"noise_mode must be one of {', '.join(NOISE_MODES)}, "
                f"got {self.noise_mode!r}")
        for key, value in self.fixed.items():
            if key not in _RANGES:
                raise ConfigError(f"unknown fixed parameter {key!r}")
            if key in names:
                raise ConfigError(
                    f"{key!r} cannot be both an axis and a fixed parameter")
            value = float(value)
            _check_range(key, value)
            self.fixed[key] = value
        if self.noise_mode in ("balanced", "unbalanced"):
            if "bi" in names or "bi" in self.fixed:
                raise ConfigError(
                    f"{self.noise_mode} noise derives bi, so it cannot be "
                    "set explicitly")
        if "bp" not in names and "bp" not in self.fixed:
            raise ConfigError("bp must be given as an axis or fixed value")
        if self.threads is not None:
            threads = int(self.threads)
            if threads < 1:
                raise ConfigError(f"threads must be >= 1, got {threads}")
            object.__setattr__(self, "threads", threads)

    def resolve_threads(self) -> int:
        if self.threads is not None:
            return self.threads
        env = os.environ.get(THREADS_ENV, "").strip()
        if env:
            try:
                value = int(env)
            except ValueError:
                raise ConfigError(
                    f"{THREADS_ENV} must be an integer, got {env!r}") from None
            if value >= 1:
                return value
        return min(os.cpu_count() or 1, 8)


# -- evaluation pipeline ----------------------------------------------------

class _Pipeline:
    """Maps grid coordinates to state parameters and target values."""

    def __init__(self, spec: ScanSpec):
        self.spec = spec
        self.axis_names = [a.name for a in spec.axes]
        present = set(self.axis_names) | set(spec.fixed)
        self.has_bs = "t" in present
        self.has_eta = "eta" in present
        self.targets = spec.targets
        self._analyze()

    def _analyze(self):
        self.w_orders = None
        self.p_orders = None
        self.marg_w = {}
        self.marg_p = {}
        self.need_negativity = False
        for tgt in self.targets:
            if tgt.kind == "negativity":
                self.need_negativity = True
                continue
            if tgt.kind == "local":
                continue
            cid = tgt.criterion
            if cid.family in ("E_W", "M_W"):
                o1, o2 = (cid.k1 + 2, cid.k2 + 2) if cid.family == "E_W" else (2, 2)
                cur = self.w_orders or (0, 0)
                self.w_orders = (max(cur[0], o1), max(cur[1], o2))
            elif cid.family in ("E_p", "M_p"):
                o1, o2 = (cid.k1 + 2, cid.k2 + 2) if cid.family == "E_p" else (2, 2)
                cur = self.p_orders or (0, 0)
                self.p_orders = (max(cur[0], o1), max(cur[1], o2))
            elif cid.family == "R_W":
                depth = max(cid.k1 + 1, cid.k2)
                self.marg_w[cid.mode] = max(self.marg_w.get(cid.mode, 0), depth)
            elif cid.family == "R_p":
                depth = max(cid.k1 + 1, cid.k2)
                self.marg_p[cid.mode] = max(self.marg_p.get(cid.mode, 0), depth)

    def state_params(self, coords: dict):
        """Coordinate arrays (broadcastable) to the six state parameters."""
        full = {"bs": 0.0, "bi": 0.0, "phi": 0.0}
        full.update(self.spec.fixed)
        full.update(coords)
        if self.spec.noise_mode == "balanced":
            full["bi"] = full["bs"]
        elif self.spec.noise_mode == "unbalanced":
            full["bi"] = 0.0
        bp = np.asarray(full["bp"], dtype=float)
        bs = np.asarray(full["bs"], dtype=float)
        bi = np.asarray(full["bi"], dtype=float)
        b1 = bp + bs
        b2 = bp + bi
        zeros = np.zeros(np.broadcast_shapes(b1.shape, b2.shape))
        c1 = zeros.astype(complex)
        c2 = zeros.astype(complex)
        d12 = 1j * np.sqrt(bp * (bp + 1.0)) + zeros.astype(complex)
        dbar12 = zeros.astype(complex)
        if self.has_bs:
            b1, b2, c1, c2, d12, dbar12 = _bs_transform_arrays(
                b1, b2, c1, c2, d12, dbar12, full["t"], full["phi"])
        if self.has_eta:
            eta = np.asarray(full["eta"], dtype=float)
            b1, b2 = eta * b1, eta * b2
            c1, c2 = eta * c1, eta * c2
            d12, dbar12 = eta * d12, eta * dbar12
        return b1, b2, c1, c2, d12, dbar12

    def evaluate(self, coords: dict):
        """Per-target (value, verdict, indicator) float64/int8 arrays."""
        params = self.state_params(coords)
        b1, b2, c1, c2, d12, dbar12 = params
        coeffs = _q_coeff_array(*params)

        table_w = table_p = None
        if self.w_orders is not None:
            o1, o2 = self.w_orders
            s = BivariateSeries(coeffs).rsqrt(order1=o1, order2=o2).coeffs
            table_w = self._scaled(s, o1, o2, modified=False)
        if self.p_orders is not None:
            o1, o2 = self.p_orders
            with np.errstate(all="ignore"):
                s = (BivariateSeries(coeffs).rebased(1.0, 1.0)
                     .rsqrt(order1=o1, order2=o2).coeffs)
                table_p = self._scaled(s, o1, o2, modified=True)
        marg_w = {m: self._marginal(coeffs, m, d, about_one=False)
                  for m, d in self.marg_w.items()}
        marg_p = {m: self._marginal(coeffs, m, d, about_one=True)
                  for m, d in self.marg_p.items()}

        out = []
        for tgt in self.targets:
            if tgt.kind == "negativity":
                nu, _ = _symplectic_pair(b1, b2, c1, c2, d12, dbar12,
                                         partial_transpose=True)
                nu = np.asarray(nu, dtype=np.longdouble)
                safe = np.maximum(nu, np.longdouble(1e-300))
                value = np.asarray(
                    np.maximum((1.0 - 2.0 * safe) / (4.0 * safe), 0.0),
                    dtype=float)
                verdict = (value > ZERO_TOL).astype(np.int8)
                indicator = np.asarray(nu, dtype=float) - 0.5
            elif tgt.kind == "local":
                c = c1 if tgt.mode == 1 else c2
                b = b1 if tgt.mode == 1 else b2
                value = np.abs(c) ** 2 - np.asarray(b, dtype=float) ** 2
                verdict = (value > ZERO_TOL).astype(np.int8)
                indicator = -value
            else:
                value, scale = self._criterion_value(
                    tgt.criterion, table_w, table_p, marg_w, marg_p)
                verdict = (value < -RELATIVE_TOL * scale).astype(np.int8)
                indicator = value
            out.append((np.asarray(value, dtype=float), verdict,
                        np.asarray(indicator, dtype=float)))
        return out

    @staticmethod
    def _scaled(s: np.ndarray, o1: int, o2: int, modified: bool) -> np.ndarray:
        signs = np.outer((-1.0) ** np.arange(o1 + 1),
                         (-1.0) ** np.arange(o2 + 1))
        facts = np.outer([_fact(i) for i in range(o1 + 1)],
                         [_fact(j) for j in range(o2 + 1)])
        grid = (signs * facts).reshape((o1 + 1, o2 + 1)
                                       + (1,) * (s.ndim - 2))
        table = grid * s
        if modified:
            with np.errstate(all="ignore"):
                table = table / s[0, 0]
        return table

    @staticmethod
    def _marginal(coeffs: np.ndarray, mode: int, depth: int,
                  about_one: bool) -> np.ndarray:
        if mode == 1:
            a, b = coeffs[1, 0], coeffs[2, 0]
        else:
            a, b = coeffs[0, 1], coeffs[0, 2]
        one = np.ones_like(np.asarray(a, dtype=float))
        if about_one:
            rows = [one + a + b, a + 2.0 * b, b]
            point = (1.0, 0.0)
        else:
            rows = [one, a, b]
            point = (0.0, 0.0)
        q = np.stack([np.asarray(r, dtype=float)[None, ...] for r in rows])
        with np.errstate(all="ignore"):
            s = BivariateSeries(q, point=point).rsqrt(order1=depth,
                                                      order2=0).coeffs[:, 0]
        signs = ((-1.0) ** np.arange(depth + 1)).reshape(
            (depth + 1,) + (1,) * (s.ndim - 1))
        facts = np.array([_fact(n) for n in range(depth + 1)]).reshape(
            (depth + 1,) + (1,) * (s.ndim - 1))
        moments = signs * s
        if about_one:
            with np.errstate(all="ignore"):
                moments = moments / moments[0]
        return facts * moments

    @staticmethod
    def _criterion_value(cid: CriterionId, table_w, table_p, marg_w, marg_p):
        if cid.family in ("E_W", "E_p"):
            table = table_w if cid.family == "E_W" else table_p
            a = table[cid.k1 + 2, cid.k2]
            b = table[cid.k1, cid.k2 + 2]
            c = table[cid.k1 + 1, cid.k2 + 1]
            return a + b - 2.0 * c, np.maximum(
                np.maximum(np.abs(a), np.abs(b)), 2.0 * np.abs(c))
        if cid.family in ("M_W", "M_p"):
            table = table_w if cid.family == "M_W" else table_p
            a, b, c = table[2, 0], table[0, 2], table[1, 1]
            return a * b - c * c, np.maximum(np.abs(a * b), c * c)
        marg = marg_w if cid.family == "R_W" else marg_p
        m = marg[cid.mode]
        a = m[cid.k1 + 1] * m[cid.k2 - 1]
        b = m[cid.k1] * m[cid.k2]
        return a - b, np.maximum(np.abs(a), np.abs(b))


# -- results ----------------------------------------------------------------

@dataclass(frozen=True)
class ScanResult:
    """Grid values, verdicts, refined boundaries, and per-cell errors.

    values[label] has the grid shape; verdicts use 1 for non-classical
    (entangled / locally non-classical for quantifier targets), 0 for
    classical, -1 for cells whose evaluation failed.  boundaries[label]
    holds, for two-dimensional scans, a list of polylines as (k, 2) arrays
    in axis coordinates.
    """

    spec: ScanSpec
    axis_values: tuple
    values: dict
    verdicts: dict
    boundaries: dict
    errors: list

    @property
    def shape(self) -> tuple:
        return tuple(len(v) for v in self.axis_values)


def run_scan(spec: ScanSpec) -> ScanResult:
    """Evaluate every target on the full grid, then trace boundaries.

    Deterministic: identical specs give byte-identical CSV and JSON output
    regardless of thread count.
    """
    pipeline = _Pipeline(spec)
    axis_values = tuple(a.values() for a in spec.axes)
    shape = tuple(len(v) for v in axis_values)
    mesh = np.meshgrid(*axis_values, indexing="ij") if shape else ()
    flats = {a.name: m.reshape(-1) for a, m in zip(spec.axes, mesh)}
    n = int(np.prod(shape))

    labels = [t.label() for t in spec.targets]
    values = {lab: np.full(n, np.nan) for lab in labels}
    verdicts = {lab: np.full(n, -1, dtype=np.int8) for lab in labels}
    indicators = {lab: np.full(n, np.nan) for lab in labels}

    threads = spec.resolve_threads()
    n_chunks = max(1, min(n, threads * 4))
    bounds = np.linspace(0, n, n_chunks + 1).astype(int)
    slices = [slice(lo, hi) for lo, hi in zip(bounds[:-1], bounds[1:])
              if hi > lo]

    chunk_errors = [[] for _ in slices]

    def work(idx: int):
        sl = slices[idx]
        coords = {name: arr[sl] for name, arr in flats.items()}
        try:
            results = pipeline.evaluate(coords)
        except Exception as exc:  # record, never abort the scan
            for lab in labels:
                chunk_errors[idx].append(
                    {"target": lab, "start": int(sl.start),
                     "stop": int(sl.stop), "message": str(exc)})
            return
        for lab, (val, ver, ind) in zip(labels, results):
            values[lab][sl] = val
            verdicts[lab][sl] = np.where(np.isfinite(val), ver, -1)
            indicators[lab][sl] = ind

    if threads > 1 and len(slices) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, range(len(slices))))
    else:
        for idx in range(len(slices)):
            work(idx)

    errors = []
    for bucket in chunk_errors:
        errors.extend(bucket)
    for lab in labels:
        bad = np.nonzero(~np.isfinite(values[lab]))[0]
        for flat_index in bad:
            index = np.unravel_index(flat_index, shape)
            errors.append({
                "target": lab,
                "index": [int(i) for i in index],
                "params": {name: float(arr[flat_index])
                           for name, arr in flats.items()},
                "message": "evaluation produced a non-finite value",
            })

    values = {lab: arr.reshape(shape) for lab, arr in values.items()}
    verdicts = {lab: arr.reshape(shape) for lab, arr in verdicts.items()}
    indicators = {lab: arr.reshape(shape) for lab, arr in indicators.items()}

    boundaries = {}
    if len(shape) == 2:
        for tgt, lab in zip(spec.targets, labels):
            boundaries[lab] = _trace_boundaries(
                pipeline, tgt, spec.axes, axis_values, indicators[lab])
    return ScanResult(spec=spec, axis_values=axis_values, values=values,
                      verdicts=verdicts, boundaries=boundaries, errors=errors)


# -- boundary tracing -------------------------------------------------------

_SEGMENTS = {
    1: [("l", "b")], 2: [("b", "r")], 3: [("l", "r")], 4: [("r", "t")],
    6: [("b", "t")], 7: [("l", "t")], 8: [("l", "t")], 9: [("b", "t")],
    11: [("r", "t")], 12: [("l", "r")], 13: [("b", "r")], 14: [("l", "b")],
}


def _cell_segments(case: int, center_nonclassical: bool):
    if case in (0, 15):
        return []
    if case == 5:
        if center_nonclassical:
            return [("b", "r"), ("l", "t")]
        return [("l", "b"), ("r", "t")]
    if case == 10:
        if center_nonclassical:
            return [("l", "b"), ("r", "t")]
        return [("b", "r"), ("l", "t")]
    return _SEGMENTS[case]


def _edge_key(side: str, i: int, j: int):
    if side == "b":
        return ("h", i, j)
    if side == "t":
        return ("h", i, j + 1)
    if side == "l":
        return ("v", i, j)
    return ("v", i + 1, j)


def _trace_boundaries(pipeline: _Pipeline, target: TargetSpec, axes,
                      axis_values, grid: np.ndarray) -> list:
    """Marching squares over the indicator sign with bisected edges."""
    xs, ys = axis_values
    if len(xs) < 2 or len(ys) < 2:
        return []
    finite = np.isfinite(grid)
    sign = grid <= 0.0  # ties count as non-classical

    crossing_h = {}
    crossing_v = {}
    for (store, axis) in ((crossing_h, 0), (crossing_v, 1)):
        if axis == 0:
            ok = finite[:-1, :] & finite[1:, :]
            change = sign[:-1, :] != sign[1:, :]
        else:
            ok = finite[:, :-1] & finite[:, 1:]
            change = sign[:, :-1] != sign[:, 1:]
        for i, j in zip(*np.nonzero(ok & change)):
            store[(int(i), int(j))] = None

    _refine_edges(pipeline, target, axes, axis_values, grid,
                  crossing_h, axis=0)
    _refine_edges(pipeline, target, axes, axis_values, grid,
                  crossing_v, axis=1)

    segments = []
    for i in range(len(xs) - 1):
        for j in range(len(ys) - 1):
            corners = (grid[i, j], grid[i + 1, j],
                       grid[i + 1, j + 1], grid[i, j + 1])
            if not all(np.isfinite(v) for v in corners):
                continue
            case = ((corners[0] <= 0.0) * 1 + (corners[1] <= 0.0) * 2
                    + (corners[2] <= 0.0) * 4 + (corners[3] <= 0.0) * 8)
            center = float(np.mean(corners)) <= 0.0
            for side_a, side_b in _cell_segments(case, center):
                key_a = _edge_key(side_a, i, j)
                key_b = _edge_key(side_b, i, j)
                segments.append((key_a, key_b))

    points = {}
    for key in set(k for seg in segments for k in seg):
        kind, i, j = key
        store = crossing_h if kind == "h" else crossing_v
        pt = store.get((i, j))
        if pt is not None:
            points[key] = pt
    segments = [s for s in segments if s[0] in points and s[1] in points]
    return _chain_segments(segments, points)


def _refine_edges(pipeline, target, axes, axis_values, grid, store, axis):
    """Bisect the varying coordinate of every crossing edge, batched."""
    if not store:
        return
    xs, ys = axis_values
    keys = sorted(store)
    idx = np.array(keys, dtype=int)
    i, j = idx[:, 0], idx[:, 1]
    if axis == 0:
        lo, hi = xs[i], xs[i + 1]
        other = ys[j]
        f_lo = grid[i, j]
        vary, fixed_name = axes[0], axes[1].name
    else:
        lo, hi = ys[j], ys[j + 1]
        other = xs[i]
        f_lo = grid[i, j]
        vary, fixed_name = axes[1], axes[0].name
    lo = lo.astype(float).copy()
    hi = hi.astype(float).copy()
    lo_sign = f_lo <= 0.0
    log_spacing = vary.scale == "log"

    sub = _Pipeline(ScanSpec(axes=pipeline.spec.axes, targets=(target,),
                             fixed=pipeline.spec.fixed,
                             noise_mode=pipeline.spec.noise_mode,
                             threads=1))

    for _ in range(BISECTION_MAX_ITER):
        mid = np.sqrt(lo * hi) if log_spacing else 0.5 * (lo + hi)
        coords = {vary.name: mid, fixed_name: other}
        f_mid = sub.evaluate(coords)[0][2]
        mid_sign = np.where(np.isfinite(f_mid), f_mid <= 0.0, lo_sign)
        take_lo = mid_sign == lo_sign
        lo = np.where(take_lo, mid, lo)
        hi = np.where(take_lo, hi, mid)
        span = hi - lo
        scale = np.maximum(np.abs(lo), np.abs(hi))
        if np.all(span <= BISECTION_REL_TOL * np.maximum(scale, 1e-30)):
            break
    final = np.sqrt(lo * hi) if log_spacing else 0.5 * (lo + hi)
    for n, key in enumerate(keys):
        if axis == 0:
            store[key] = (float(final[n]), float(other[n]))
        else:
            store[key] = (float(other[n]), float(final[n]))


def _chain_segments(segments, points) -> list:
    """Join refined edge points into polylines, endpoints first."""
    if not segments:
        return []
    adjacency = {}
    for a, b in segments:
        adjacency.setdefault(a, []).append(b)
        adjacency.setdefault(b, []).append(a)
    for key in adjacency:
        adjacency[key] = sorted(set(adjacency[key]))
    visited_edges = set()
    polylines = []

    def walk(start):
        path = [start]
        current = start
        while True:
            next_key = None
            for cand in adjacency[current]:
                edge = tuple(sorted((current, cand)))
                if edge not in visited_edges:
                    visited_edges.add(edge)
                    next_key = cand
                    break
            if next_key is None:
                return path
            path.append(next_key)
            current = next_key

    endpoints = sorted(k for k, nbrs in adjacency.items() if len(nbrs) == 1)
    for key in endpoints:
        if all(tuple(sorted((key, nbr))) in visited_edges
               for nbr in adjacency[key]):
            continue
        path = walk(key)
        if len(path) >= 2:
            polylines.append(np.array([points[k] for k in path]))
    for key in sorted(adjacency):
        if all(tuple(sorted((key, nbr))) in visited_edges
               for nbr in adjacency[key]):
            continue
        path = walk(key)
        if len(path) >= 2:
            path.append(path[0])  # close the loop
            polylines.append(np.array([points[k] for k in path]))
    return polylines


# -- writers ----------------------------------------------------------------

def _fmt(value: float) -> str:
    if np.isnan(value):
        return "nan"
    return format(float(value), ".12g")


def write_csv(result: ScanResult, stream):
    """Grid values and verdicts as CSV, one row per cell in C order."""
    labels = [t.label() for t in result.spec.targets]
    header = [a.name for a in result.spec.axes]
    for lab in labels:
        header.append(lab)
        header.append(f"{lab}:nonclassical")
    stream.write(",".join(header) + "\n")
    shape = result.shape
    coords = np.meshgrid(*result.axis_values, indexing="ij")
    flat_coords = [c.reshape(-1) for c in coords]
    flat_values = {lab: result.values[lab].reshape(-1) for lab in labels}
    flat_verdicts = {lab: result.verdicts[lab].reshape(-1) for lab in labels}
    for row in range(int(np.prod(shape))):
        cells = [_fmt(c[row]) for c in flat_coords]
        for lab in labels:
            cells.append(_fmt(flat_values[lab][row]))
            cells.append(str(int(flat_verdicts[lab][row])))
        stream.write(",".join(cells) + "\n")


def write_boundaries_json(result: ScanResult, stream):
    """Axes, refined boundary polylines, and error records as JSON."""
    payload = {
        "axes": [
            {"name": a.name, "scale": a.scale,
             "values": [float(v) for v in vals]}
            for a, vals in zip(result.spec.axes, result.axis_values)
        ],
        "noise_mode": result.spec.noise_mode,
        "fixed": {k: float(v) for k, v in sorted(result.spec.fixed.items())},
        "targets": [t.label() for t in result.spec.targets],
        "boundaries": {
            lab: [[[float(x), float(y)] for x, y in line] for line in lines]
            for lab, lines in sorted(result.boundaries.items())
        },
        "errors": result.errors,
    }
    json.dump(payload, stream, sort_keys=True, separators=(",", ":"))
    stream.write("\n")
