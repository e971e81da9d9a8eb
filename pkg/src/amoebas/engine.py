"""Amoeba membership, rasterization, complement components, area, boundary
tracing and coamoeba sampling.

Membership is decided by counting fiber roots below the queried log-level in
*both* coordinate directions: on the complement both counts are constant in
the sampled angle, and the pair (z-count + min z-exponent, w-count + min
w-exponent) is the component's order index.  Any angle where a root crosses
the level, or where counts disagree between angles, certifies an amoeba
point; roots that merely approach the level mark the cell Uncertain.

The raster is organized so one column (or row) shares its fiber solves:
roots of a fiber at fixed log|z| do not depend on the queried log|w|, so a
single ring of fibers classifies a whole column of cells.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BoundaryTraceError,
    DomainError,
    LiftFailureError,
    MembershipUncertainError,
    OrdInjectivityError,
    RasterInconsistencyError,
)
from .newton import Cone2, dual_cone, newton_polygon
from .poly import LaurentPoly2
from .roots import log_moduli, solve_fiber_batch

# log-unit half-width of the near-level band; see default_band for the
# rationale on point queries versus area rasters
AREA_BAND = 1e-3
DEFAULT_MEMBERSHIP_NTHETA = 256
DEFAULT_AREA_NTHETA = 512

STATE_AMOEBA = 0
STATE_UNCERTAIN = 1
STATE_COMPLEMENT = 2
STATE_NAMES = {STATE_AMOEBA: "amoeba", STATE_UNCERTAIN: "uncertain", STATE_COMPLEMENT: "complement"}


def default_band(n_theta: int) -> float:
    """Band for single-point membership: wide enough to dominate the angular
    discretization of the root trajectories."""
    return max(2.0 * math.pi / n_theta, 1e-3)


def resolve_threads(threads: int | None = None) -> int:
    """Worker count: explicit argument wins, else AMOEBA_THREADS (0 = auto)."""
    if threads is None:
        raw = os.environ.get("AMOEBA_THREADS", "0")
        try:
            threads = int(raw)
        except ValueError:
            threads = 0
    if threads == 0:
        threads = os.cpu_count() or 1
    return max(1, threads)


@dataclass(frozen=True)
class GridWindow:
    """A log-space viewport divided into nx * ny cells."""

    x0: float
    x1: float
    y0: float
    y1: float
    nx: int
    ny: int

    def __post_init__(self):
        if not (self.x0 < self.x1 and self.y0 < self.y1):
            raise DomainError("window must have x0 < x1 and y0 < y1")
        if self.nx < 2 or self.ny < 2:
            raise DomainError("window needs nx, ny >= 2")

    @property
    def dx(self) -> float:
        return (self.x1 - self.x0) / self.nx

    @property
    def dy(self) -> float:
        return (self.y1 - self.y0) / self.ny

    @property
    def cell_area(self) -> float:
        return self.dx * self.dy

    def x_centers(self) -> np.ndarray:
        return self.x0 + (np.arange(self.nx) + 0.5) * self.dx

    def y_centers(self) -> np.ndarray:
        return self.y0 + (np.arange(self.ny) + 0.5) * self.dy


# ---------------------------------------------------------------------------
# fiber machinery
# ---------------------------------------------------------------------------


class FiberSolver:
    """Vectorized fibers of a fixed polynomial: for base values v the
    coefficient rows of w -> P(v, w) (valuation cleared into ``shift``) and
    their roots."""

    def __init__(self, p: LaurentPoly2):
        w_exps = sorted({a2 for _, a2 in p.support()})
        self.shift = w_exps[0]
        ncoef = w_exps[-1] - w_exps[0] + 1
        z_exps = sorted({a1 for a1, _ in p.support()})
        self.z_exps = np.array(z_exps, dtype=np.int64)
        self.matrix = np.zeros((len(z_exps), ncoef), dtype=np.complex128)
        zindex = {e: i for i, e in enumerate(z_exps)}
        for (a1, a2), c in p.terms.items():
            self.matrix[zindex[a1], a2 - self.shift] += c
        self.degree = ncoef - 1

    def coeff_rows(self, base: np.ndarray) -> np.ndarray:
        powers = base[:, None] ** self.z_exps[None, :]
        return powers @ self.matrix

    def roots_at(self, base: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return solve_fiber_batch(self.coeff_rows(base))


@dataclass
class AxisScan:
    """Per-level root-count summary over one ring of fibers."""

    count: np.ndarray  # (n,) int: roots below level - band at the reference angle
    const: np.ndarray  # (n,) bool: count identical across valid angles
    band_hit: np.ndarray  # (n,) bool: some root within band of the level
    near: np.ndarray  # (n,) bool: some root within 3*band, or an invalid angle
    counts_all: np.ndarray | None = None  # (n, n_theta) when requested


def scan_levels(
    solver: FiberSolver,
    fixed: float,
    thetas: np.ndarray,
    levels: np.ndarray,
    band: float,
    keep_counts: bool = False,
) -> AxisScan:
    """Classify many log-levels against one ring of fibers at log-coordinate
    ``fixed``.  Degenerate or unconverged fibers are retried at an angle
    perturbed by band/7; if still bad they only force ``near``."""
    base = np.exp(fixed + 1j * thetas)
    roots, ok = solver.roots_at(base)
    if not ok.all():
        bad = ~ok
        base2 = np.exp(fixed + 1j * (thetas[bad] + band / 7.0))
        roots2, ok2 = solver.roots_at(base2)
        roots[bad] = roots2
        ok[bad] = ok2
    levels = np.atleast_1d(np.asarray(levels, dtype=float))
    n = len(levels)
    if not ok.any():
        return AxisScan(
            count=np.zeros(n, dtype=np.int64),
            const=np.ones(n, dtype=bool),
            band_hit=np.zeros(n, dtype=bool),
            near=np.ones(n, dtype=bool),
        )
    lm = log_moduli(roots)  # (T, d)
    d = lm[None, :, :] - levels[:, None, None]  # (n, T, d)
    with np.errstate(invalid="ignore"):
        counts = (d < -band).sum(axis=2)
        absd = np.abs(d)
        band_t = (absd < band).any(axis=2)
        near_t = (absd < 3.0 * band).any(axis=2)
    ref = int(np.argmax(ok))
    count0 = counts[:, ref]
    const = (counts[:, ok] == count0[:, None]).all(axis=1)
    band_hit = band_t[:, ok].any(axis=1)
    near = near_t[:, ok].any(axis=1)
    if not ok.all():
        near = near | True  # an unresolved angle taints the whole ring
    return AxisScan(count0, const, band_hit, near, counts if keep_counts else None)


# ---------------------------------------------------------------------------
# membership
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MembershipEvidence:
    w_counts: np.ndarray
    z_counts: np.ndarray
    w_band_hit: bool
    z_band_hit: bool
    w_near: bool
    z_near: bool


@dataclass(frozen=True)
class MembershipResult:
    state: str  # "amoeba" | "complement" | "uncertain"
    ord: tuple[int, int] | None
    evidence: MembershipEvidence


def membership(
    p: LaurentPoly2,
    x: float,
    y: float,
    n_theta: int = DEFAULT_MEMBERSHIP_NTHETA,
    band: float | None = None,
) -> MembershipResult:
    """Classify one log-space point by two-axis fiber root counting."""
    if n_theta < 8:
        raise DomainError("n_theta must be >= 8")
    if band is None:
        band = default_band(n_theta)
    if band <= 0:
        raise DomainError("band must be > 0")
    thetas = 2.0 * np.pi * np.arange(n_theta) / n_theta
    sw = FiberSolver(p)
    sz = FiberSolver(p.transpose())
    w_scan = scan_levels(sw, x, thetas, np.array([y]), band, keep_counts=True)
    z_scan = scan_levels(sz, y, thetas, np.array([x]), band, keep_counts=True)
    return _combine_point(p, w_scan, z_scan)


def _combine_point(p: LaurentPoly2, w_scan: AxisScan, z_scan: AxisScan) -> MembershipResult:
    ev = MembershipEvidence(
        w_counts=None if w_scan.counts_all is None else w_scan.counts_all[0],
        z_counts=None if z_scan.counts_all is None else z_scan.counts_all[0],
        w_band_hit=bool(w_scan.band_hit[0]),
        z_band_hit=bool(z_scan.band_hit[0]),
        w_near=bool(w_scan.near[0]),
        z_near=bool(z_scan.near[0]),
    )
    if ev.w_band_hit or ev.z_band_hit or not (w_scan.const[0] and z_scan.const[0]):
        return MembershipResult("amoeba", None, ev)
    if ev.w_near or ev.z_near:
        return MembershipResult("uncertain", None, ev)
    o = (int(z_scan.count[0]) + p.min_z_exp, int(w_scan.count[0]) + p.min_w_exp)
    return MembershipResult("complement", o, ev)


# ---------------------------------------------------------------------------
# rasterization
# ---------------------------------------------------------------------------


@dataclass
class AmoebaRaster:
    """Cell states over a window; arrays are indexed [ix, iy]."""

    poly: LaurentPoly2
    window: GridWindow
    state: np.ndarray  # uint8
    ord1: np.ndarray  # int16, valid where state == complement
    ord2: np.ndarray
    n_theta: int
    band: float
    labels: np.ndarray | None = None  # int32, -1 off the complement
    components: list["ComponentInfo"] | None = None


def _scan_chunk(args):
    (matrix, z_exps, shift, fixed_vals, thetas, levels, band) = args
    solver = FiberSolver.__new__(FiberSolver)
    solver.matrix = matrix
    solver.z_exps = z_exps
    solver.shift = shift
    solver.degree = matrix.shape[1] - 1
    out = []
    for fx in fixed_vals:
        s = scan_levels(solver, fx, thetas, levels, band)
        out.append((s.count.astype(np.int32), s.const, s.band_hit, s.near))
    return out


def _run_pass(solver, fixed_vals, thetas, levels, band, threads):
    n = len(fixed_vals)
    count = np.empty((n, len(levels)), dtype=np.int32)
    const = np.empty((n, len(levels)), dtype=bool)
    bandh = np.empty_like(const)
    near = np.empty_like(const)

    def fill(i0, results):
        for k, (c, co, bh, ne) in enumerate(results):
            count[i0 + k] = c
            const[i0 + k] = co
            bandh[i0 + k] = bh
            near[i0 + k] = ne

    if threads <= 1 or n < 8:
        fill(0, _scan_chunk((solver.matrix, solver.z_exps, solver.shift, fixed_vals, thetas, levels, band)))
        return count, const, bandh, near
    chunk = max(1, math.ceil(n / (threads * 4)))
    jobs = []
    with ProcessPoolExecutor(max_workers=threads) as pool:
        for i0 in range(0, n, chunk):
            args = (
                solver.matrix,
                solver.z_exps,
                solver.shift,
                fixed_vals[i0 : i0 + chunk],
                thetas,
                levels,
                band,
            )
            jobs.append((i0, pool.submit(_scan_chunk, args)))
        for i0, fut in jobs:
            fill(i0, fut.result())
    return count, const, bandh, near


def rasterize(
    p: LaurentPoly2,
    window: GridWindow,
    n_theta: int = DEFAULT_AREA_NTHETA,
    band: float = AREA_BAND,
    threads: int | None = None,
) -> AmoebaRaster:
    """Membership state per cell center.  Deterministic for fixed parameters
    regardless of worker count: cells are independent and are assembled in
    index order."""
    if n_theta < 8:
        raise DomainError("n_theta must be >= 8")
    if band <= 0:
        raise DomainError("band must be > 0")
    threads = resolve_threads(threads)
    thetas = 2.0 * np.pi * np.arange(n_theta) / n_theta
    xs = window.x_centers()
    ys = window.y_centers()
    sw = FiberSolver(p)
    sz = FiberSolver(p.transpose())
    wcount, wconst, wband, wnear = _run_pass(sw, xs, thetas, ys, band, threads)
    zcount_t, zconst_t, zband_t, znear_t = _run_pass(sz, ys, thetas, xs, band, threads)
    zcount = zcount_t.T
    zconst = zconst_t.T
    zband = zband_t.T
    znear = znear_t.T

    amoeba = wband | zband | ~wconst | ~zconst
    uncertain = ~amoeba & (wnear | znear)
    state = np.full((window.nx, window.ny), STATE_COMPLEMENT, dtype=np.uint8)
    state[uncertain] = STATE_UNCERTAIN
    state[amoeba] = STATE_AMOEBA
    ord1 = (zcount + p.min_z_exp).astype(np.int16)
    ord2 = (wcount + p.min_w_exp).astype(np.int16)
    return AmoebaRaster(p, window, state, ord1, ord2, n_theta, band)


def raster_agreement(a: AmoebaRaster, b: AmoebaRaster) -> float:
    """Fraction of cells with identical state (and order index where both
    are complement)."""
    if a.state.shape != b.state.shape:
        raise ValueError("rasters must share a grid shape")
    same = a.state == b.state
    comp = same & (a.state == STATE_COMPLEMENT)
    same = same & (~comp | ((a.ord1 == b.ord1) & (a.ord2 == b.ord2)))
    return float(same.mean())


# ---------------------------------------------------------------------------
# components
# ---------------------------------------------------------------------------


@dataclass
class ComponentInfo:
    id: int
    ord: tuple[int, int]
    seed: tuple[float, float]
    bounded: bool
    cone: Cone2
    ncells: int
    touches_edge: bool


def _label_runs(raster: AmoebaRaster) -> np.ndarray:
    """Run-based two-scan 4-connected labeling of complement cells, grouped
    by equal order index.  Returns an int32 label grid (-1 elsewhere)."""
    nx, ny = raster.state.shape
    comp = raster.state == STATE_COMPLEMENT
    key = np.where(
        comp,
        (raster.ord1.astype(np.int64) + 32768) * 65536 + raster.ord2.astype(np.int64) + 32768,
        -1,
    )
    labels = np.full((nx, ny), -1, dtype=np.int32)
    parent: list[int] = []

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a: int, b: int) -> None:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    prev_runs: list[tuple[int, int, int, int]] = []  # (start, end, key, label)
    for ix in range(nx):
        col = key[ix]
        runs: list[tuple[int, int, int, int]] = []
        iy = 0
        while iy < ny:
            k = col[iy]
            if k < 0:
                iy += 1
                continue
            j = iy + 1
            while j < ny and col[j] == k:
                j += 1
            lab = len(parent)
            parent.append(lab)
            runs.append((iy, j, int(k), lab))
            labels[ix, iy:j] = lab
            iy = j
        # union with overlapping same-key runs of the previous column
        a = b = 0
        while a < len(runs) and b < len(prev_runs):
            s0, e0, k0, l0 = runs[a]
            s1, e1, k1, l1 = prev_runs[b]
            if s0 < e1 and s1 < e0 and k0 == k1:
                union(l0, l1)
            if e0 <= e1:
                a += 1
            else:
                b += 1
        prev_runs = runs
    if parent:
        roots = np.array([find(i) for i in range(len(parent))], dtype=np.int32)
        order = {}
        remap = np.empty(len(parent), dtype=np.int32)
        for i, r in enumerate(roots):
            if r not in order:
                order[r] = len(order)
            remap[i] = order[r]
        mask = labels >= 0
        labels[mask] = remap[labels[mask]]
    return labels


def _l1_distance_to_outside(region_mask: np.ndarray) -> np.ndarray:
    """Exact L1 distance from each True cell to the nearest False cell or
    window edge, by a two-pass chamfer sweep."""
    nx, ny = region_mask.shape
    big = nx + ny + 2
    d = np.where(region_mask, big, 0).astype(np.int32)
    # cells on the window edge are one step from the outside
    for ix in range(nx):
        row = d[ix]
        if ix > 0:
            row = np.minimum(row, d[ix - 1] + 1)
        else:
            row = np.minimum(row, 1)
        # left-to-right: min over k<=j of row[k] + (j-k)
        idx = np.arange(ny)
        row = np.minimum.accumulate(row - idx) + idx
        row = np.minimum(row, idx + 1)  # distance to the iy=0 edge
        d[ix] = row
    for ix in range(nx - 1, -1, -1):
        row = d[ix]
        if ix < nx - 1:
            row = np.minimum(row, d[ix + 1] + 1)
        else:
            row = np.minimum(row, 1)
        idx = np.arange(ny)
        rev = row[::-1]
        rev = np.minimum.accumulate(rev - idx) + idx
        row = rev[::-1]
        row = np.minimum(row, (ny - idx))
        d[ix] = row
    return d


def find_components(raster: AmoebaRaster) -> list[ComponentInfo]:
    """Connected complement regions with their order indices, seeds and
    recession cones.  Injectivity of the order map across regions is
    asserted; a violation signals a raster too coarse for this curve."""
    labels = _label_runs(raster)
    raster.labels = labels
    nlab = int(labels.max()) + 1 if labels.size and labels.max() >= 0 else 0
    comps: list[ComponentInfo] = []
    if nlab == 0:
        raster.components = comps
        return comps
    polygon = newton_polygon(raster.poly)
    nx, ny = labels.shape
    xs = raster.window.x_centers()
    ys = raster.window.y_centers()
    seen_ords: dict[tuple[int, int], int] = {}
    flat_labels = labels.ravel()
    for lab in range(nlab):
        mask = labels == lab
        ncells = int(mask.sum())
        sel = np.flatnonzero(flat_labels == lab)
        cells_ix = sel // ny
        cells_iy = sel % ny
        o = (int(raster.ord1[cells_ix[0], cells_iy[0]]), int(raster.ord2[cells_ix[0], cells_iy[0]]))
        same = (raster.ord1[mask] == o[0]) & (raster.ord2[mask] == o[1])
        if not same.all():
            raise RasterInconsistencyError(
                f"region {lab} carries more than one order index"
            )
        if o in seen_ords:
            raise OrdInjectivityError(
                f"order index {o} appears in two disjoint regions "
                f"({seen_ords[o]} and {lab}); raster too coarse"
            )
        seen_ords[o] = lab
        # deepest cell (max L1 distance to anything outside this region),
        # lexicographic tie-break via argmax on the flat index order
        dist = _l1_distance_to_outside(mask)
        dvals = dist.ravel()[sel]
        best = sel[int(np.argmax(dvals))]
        seed = (float(xs[best // ny]), float(ys[best % ny]))
        touches = bool(
            (cells_ix == 0).any()
            or (cells_ix == nx - 1).any()
            or (cells_iy == 0).any()
            or (cells_iy == ny - 1).any()
        )
        cone = dual_cone(polygon, o)
        bounded = (not touches) and cone.kind == "zero"
        comps.append(ComponentInfo(lab, o, seed, bounded, cone, ncells, touches))
    raster.components = comps
    return comps


# ---------------------------------------------------------------------------
# area
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AreaEstimate:
    estimate: float
    half_width: float
    truncated: bool


def amoeba_area(raster: AmoebaRaster) -> AreaEstimate:
    """Cell-count area: amoeba cells plus half of the uncertain ones; the
    error bar counts the other uncertain half and the amoeba cells adjacent
    to a non-amoeba cell (one boundary ring of discretization slack)."""
    st = raster.state
    amo = st == STATE_AMOEBA
    unc = st == STATE_UNCERTAIN
    ca = raster.window.cell_area
    inner_not = np.zeros_like(amo)
    inner_not[1:, :] |= ~amo[:-1, :]
    inner_not[:-1, :] |= ~amo[1:, :]
    inner_not[:, 1:] |= ~amo[:, :-1]
    inner_not[:, :-1] |= ~amo[:, 1:]
    inner_not[0, :] = True
    inner_not[-1, :] = True
    inner_not[:, 0] = True
    inner_not[:, -1] = True
    perimeter = amo & inner_not
    estimate = ca * (amo.sum() + 0.5 * unc.sum())
    half_width = ca * (0.5 * unc.sum() + perimeter.sum())
    ring = np.zeros_like(amo)
    ring[0, :] = ring[-1, :] = True
    ring[:, 0] = ring[:, -1] = True
    truncated = bool((st[ring] != STATE_COMPLEMENT).any())
    return AreaEstimate(float(estimate), float(half_width), truncated)


# ---------------------------------------------------------------------------
# boundary tracing and lifting
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LiftedPoint:
    """A point of the curve sitting over (x, y) up to the residual gap."""

    x: float
    y: float
    arg_z: float
    arg_w: float
    z: complex
    w: complex
    gap: float  # |log-modulus mismatch| in the solved fiber


def _track_root(solver: FiberSolver, fixed: float, theta: float, prev_root: complex) -> complex:
    base = np.exp(np.array([fixed + 1j * theta]))
    roots, ok = solver.roots_at(base)
    cand = roots[0][np.isfinite(roots[0]) & (roots[0] != 0)]
    if len(cand) == 0 or not ok[0]:
        return prev_root
    return cand[np.argmin(np.abs(cand - prev_root))]


def _apex_gap(solver: FiberSolver, fixed: float, level: float, thetas: np.ndarray, refine: bool = True):
    """Minimum |log-modulus - level| over the fiber ring, optionally
    sharpened by a golden-section refinement of the winning angle (the
    coarse ring alone floors out at the angular discretization)."""
    base = np.exp(fixed + 1j * thetas)
    roots, ok = solver.roots_at(base)
    lm = log_moduli(roots)
    gaps = np.abs(lm - level)
    gaps[~np.isfinite(gaps)] = np.inf
    if not np.isfinite(gaps).any():
        return np.inf, 0.0, complex(np.nan)
    it, jr = np.unravel_index(np.argmin(gaps), gaps.shape)
    theta = float(thetas[it])
    root = roots[it, jr]
    if not refine:
        return float(gaps[it, jr]), theta, complex(root)
    dth = float(thetas[1] - thetas[0]) if len(thetas) > 1 else 0.1

    def f(th: float, prev: complex):
        r = _track_root(solver, fixed, th, prev)
        return abs(math.log(abs(r)) - level), r

    a, b = theta - dth, theta + dth
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    e = a + invphi * (b - a)
    fc, rc = f(c, root)
    fe, re_ = f(e, root)
    for _ in range(24):
        if fc < fe:
            b, e, fe = e, c, fc
            c = b - invphi * (b - a)
            fc, rc = f(c, rc)
        else:
            a, c, fc = c, e, fe
            e = a + invphi * (b - a)
            fe, re_ = f(e, re_)
    if fc < fe:
        return fc, c, rc
    return fe, e, re_


def curve_gap(
    p: LaurentPoly2,
    x: float,
    y: float,
    n_theta: int = 512,
    solvers: tuple[FiberSolver, FiberSolver] | None = None,
    refine: bool = True,
) -> tuple[float, LiftedPoint]:
    """Distance-like gap to the amoeba at (x, y): the smallest refined
    |log-modulus - level| over both fiber directions, with the witnessing
    curve point."""
    sw, sz = solvers if solvers is not None else (FiberSolver(p), FiberSolver(p.transpose()))
    thetas = 2.0 * np.pi * np.arange(n_theta) / n_theta
    gw, thw, rw = _apex_gap(sw, x, y, thetas, refine)
    gz, thz, rz = _apex_gap(sz, y, x, thetas, refine)
    if gw <= gz:
        z = np.exp(x + 1j * thw)
        w = rw
        gap = gw
    else:
        w = np.exp(y + 1j * thz)
        z = rz
        gap = gz
    lp = LiftedPoint(
        x,
        y,
        float(np.angle(z)),
        float(np.angle(w)),
        complex(z),
        complex(w),
        float(gap),
    )
    return gap, lp


def lift_point(
    p: LaurentPoly2,
    x: float,
    y: float,
    n_theta: int = 512,
    band: float | None = None,
    solvers=None,
) -> LiftedPoint:
    """Lift a near-boundary log point to the curve: the fiber solution whose
    log-modulus is closest to the requested level; it must land within
    3x band."""
    if band is None:
        band = default_band(n_theta)
    gap, lp = curve_gap(p, x, y, n_theta=n_theta, solvers=solvers)
    if not (gap < 3.0 * band):
        raise LiftFailureError(
            f"no fiber solution within {3 * band:.2e} of the level (gap {gap:.2e})"
        )
    return lp


def _cone_arc(cone: Cone2) -> tuple[float, float]:
    """Angular interval [alpha, alpha+span] of the cone (span 0 for a ray)."""
    if cone.kind in ("zero", "plane"):
        return 0.0, 2.0 * math.pi if cone.kind == "plane" else 0.0
    g = cone.generators
    a1 = math.atan2(g[0][1], g[0][0])
    if cone.kind == "ray":
        return a1, 0.0
    a2 = math.atan2(g[-1][1], g[-1][0])
    span = (a2 - a1) % (2.0 * math.pi)
    return a1, span


def _gap_positive(gap: float) -> bool:
    return gap > 1e-8


def boundary_point_on_ray(
    p: LaurentPoly2,
    comp: ComponentInfo,
    origin: tuple[float, float],
    direction: tuple[float, float],
    max_t: float,
    pos_tol: float,
    n_theta: int = 256,
    solvers=None,
    coarse: float = 0.25,
) -> tuple[float, float]:
    """First crossing of the component boundary along origin + t*direction,
    located to pos_tol by bisecting the refined fiber gap."""
    if solvers is None:
        solvers = (FiberSolver(p), FiberSolver(p.transpose()))
    ux, uy = direction
    norm = math.hypot(ux, uy)
    ux, uy = ux / norm, uy / norm

    def gap_at(t: float, refine: bool) -> float:
        g, _ = curve_gap(
            p, origin[0] + t * ux, origin[1] + t * uy, n_theta, solvers, refine
        )
        return g

    # coarse phase: the unrefined ring gap overestimates the true gap by at
    # most the angular discretization floor, so brackets found here are
    # re-validated before the refined bisection
    if not _gap_positive(gap_at(0.0, False)):
        raise BoundaryTraceError("ray origin is not strictly inside the component")
    t_lo, t_hi = 0.0, None
    t = coarse
    while t <= max_t:
        if not _gap_positive(gap_at(t, False)):
            t_hi = t
            break
        t_lo = t
        t = t * 1.5 + coarse
    if t_hi is None:
        raise BoundaryTraceError("ray never exits the component inside the search range")
    switch = max(0.05, 4.0 * pos_tol)
    while t_hi - t_lo > switch:
        mid = 0.5 * (t_lo + t_hi)
        if _gap_positive(gap_at(mid, False)):
            t_lo = mid
        else:
            t_hi = mid
    for _ in range(8):
        if t_lo == 0.0 or _gap_positive(gap_at(t_lo, True)):
            break
        t_lo = max(0.0, t_lo - switch)
    while t_hi - t_lo > pos_tol:
        mid = 0.5 * (t_lo + t_hi)
        if _gap_positive(gap_at(mid, True)):
            t_lo = mid
        else:
            t_hi = mid
    t_star = 0.5 * (t_lo + t_hi)
    return (origin[0] + t_star * ux, origin[1] + t_star * uy)


def trace_boundary(
    p: LaurentPoly2,
    comp: ComponentInfo,
    n_points: int,
    pos_tol: float = 1e-4,
    window: GridWindow | None = None,
    n_theta: int = 256,
    solvers=None,
) -> list[tuple[float, float]]:
    """Points on the component boundary, found by bisecting along rays from
    the seed.  Bounded components use a full fan; unbounded ones fan over
    the complement of the recession cone (rays inside the cone never exit).
    Rays that fail to exit within the window are skipped."""
    if solvers is None:
        solvers = (FiberSolver(p), FiberSolver(p.transpose()))
    if comp.cone.kind == "plane":
        raise BoundaryTraceError("component has no boundary (full-plane cone)")
    if window is not None:
        max_t = math.hypot(window.x1 - window.x0, window.y1 - window.y0)
    else:
        max_t = 24.0
    if comp.bounded or comp.cone.kind == "zero":
        dirs = [2.0 * math.pi * (k + 0.5) / n_points for k in range(n_points)]
    else:
        a1, span = _cone_arc(comp.cone)
        free = 2.0 * math.pi - span
        margin = min(0.15, 0.25 * free)
        start = a1 + span + margin
        width = free - 2.0 * margin
        dirs = [start + width * (k + 0.5) / n_points for k in range(n_points)]
    pts = []
    for ang in dirs:
        try:
            pts.append(
                boundary_point_on_ray(
                    p,
                    comp,
                    comp.seed,
                    (math.cos(ang), math.sin(ang)),
                    max_t,
                    pos_tol,
                    n_theta,
                    solvers,
                )
            )
        except BoundaryTraceError:
            continue
    if not pts:
        raise BoundaryTraceError("no ray exited the component")
    return pts


# ---------------------------------------------------------------------------
# coamoeba
# ---------------------------------------------------------------------------


@dataclass
class CoamoebaRaster:
    resolution: int
    hits: np.ndarray  # (res, res) int64, [i_arg_z, i_arg_w], torus wrap


def _arg_bin(angles: np.ndarray, res: int) -> np.ndarray:
    return (np.floor((angles + np.pi) / (2.0 * np.pi) * res).astype(np.int64)) % res


def coamoeba_raster(
    p: LaurentPoly2,
    resolution: int = 512,
    x_samples: np.ndarray | None = None,
    n_theta: int = 512,
) -> CoamoebaRaster:
    """Histogram of curve-point argument pairs.  Both fiber directions are
    sampled so curves parallel to a coordinate line are not missed."""
    if x_samples is None:
        x_samples = np.linspace(-8.0, 8.0, 161)
    hits = np.zeros((resolution, resolution), dtype=np.int64)
    thetas = 2.0 * np.pi * np.arange(n_theta) / n_theta
    wrapped = np.angle(np.exp(1j * thetas))
    for solver, transposed in ((FiberSolver(p), False), (FiberSolver(p.transpose()), True)):
        if solver.degree == 0:
            continue
        for fx in x_samples:
            base = np.exp(fx + 1j * thetas)
            roots, ok = solver.roots_at(base)
            finite = np.isfinite(roots) & (roots != 0) & ok[:, None]
            if not finite.any():
                continue
            ti, _ = np.nonzero(finite)
            root_args = np.angle(roots[finite]).astype(float)
            a_fixed = _arg_bin(wrapped[ti], resolution)
            a_root = _arg_bin(root_args, resolution)
            if transposed:
                np.add.at(hits, (a_root, a_fixed), 1)
            else:
                np.add.at(hits, (a_fixed, a_root), 1)
    return CoamoebaRaster(resolution, hits)


# ---------------------------------------------------------------------------
# deep-point helpers
# ---------------------------------------------------------------------------


def require_complement(
    p: LaurentPoly2,
    x: float,
    y: float,
    n_theta: int = DEFAULT_MEMBERSHIP_NTHETA,
    band: float | None = None,
) -> tuple[int, int]:
    """Membership that must come back complement; raises otherwise."""
    m = membership(p, x, y, n_theta=n_theta, band=band)
    if m.state != "complement":
        raise MembershipUncertainError(f"point ({x}, {y}) classified {m.state}")
    return m.ord
