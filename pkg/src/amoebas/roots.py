"""Simultaneous-iteration root finding for fiber polynomials.

Every fiber computation in the package funnels through this kernel, so it
is written batch-first: a whole ring of fibers (one per sampled angle) is
iterated as one numpy array.  Initialization is deterministic — roots start
on a Cauchy-bound annulus, spread by a fixed golden-angle spiral — so
repeated runs are bit-identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import RootConvergenceError
from .poly import UniPoly

DEFAULT_RESIDUAL_TOL = 1e-12
DEFAULT_MAX_ITER = 200
CLUSTER_RADIUS = 1e-6
# relative threshold below which leading/trailing fiber coefficients are
# dropped; the dropped roots sit beyond any log-window of interest
TRIM_REL = 1e-13

_GOLDEN_STEP = math.pi * (3.0 - math.sqrt(5.0))


@dataclass(frozen=True)
class RootSet:
    """All roots (with multiplicity) of a cleared univariate polynomial."""

    roots: np.ndarray
    max_residual: float

    def __len__(self) -> int:
        return len(self.roots)


def _horner_batch(coeffs: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Evaluate row polynomials at row points: coeffs (B, n+1) ascending,
    x (B, m) -> (B, m)."""
    acc = np.broadcast_to(coeffs[:, -1:], x.shape).copy()
    for k in range(coeffs.shape[1] - 2, -1, -1):
        acc = acc * x + coeffs[:, k : k + 1]
    return acc


def _initial_guesses(coeffs: np.ndarray) -> np.ndarray:
    """Deterministic start points on a geometric annulus between the Cauchy
    lower and upper root bounds, phased by a golden-angle spiral."""
    n = coeffs.shape[1] - 1
    a = np.abs(coeffs)
    lead = a[:, -1]
    tail = a[:, 0]
    r_hi = 1.0 + np.max(a[:, :-1], axis=1) / lead
    r_lo = tail / (tail + np.max(a[:, 1:], axis=1))
    r_lo = np.clip(r_lo, 1e-150, None)
    t = (np.arange(n) + 0.5) / n
    radius = r_lo[:, None] ** (1.0 - t)[None, :] * r_hi[:, None] ** t[None, :]
    angles = 2.0 * np.pi * np.arange(n) / n + _GOLDEN_STEP * np.arange(n) + 0.5
    return radius * np.exp(1j * angles)[None, :]


def aberth_batch(
    coeffs: np.ndarray,
    max_iter: int = DEFAULT_MAX_ITER,
    step_tol: float = 1e-14,
) -> np.ndarray:
    """Find all roots of each row polynomial (ascending coefficients, same
    degree per row, nonzero leading column).  Returns (B, degree) roots.

    Simultaneous corrections with the Ehrlich/Aberth denominator, followed
    by two Newton polish sweeps.
    """
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    if coeffs.ndim != 2 or coeffs.shape[1] < 2:
        raise ValueError("need a (B, degree+1) coefficient array with degree >= 1")
    scale = np.max(np.abs(coeffs), axis=1, keepdims=True)
    c = coeffs / scale
    n = c.shape[1] - 1
    if n == 1:
        return (-c[:, 0] / c[:, 1])[:, None]
    dcoef = c[:, 1:] * np.arange(1, n + 1)
    x = _initial_guesses(c)
    tiny = 1e-290
    for _ in range(max_iter):
        p = _horner_batch(c, x)
        dp = _horner_batch(dcoef, x)
        dp = np.where(dp == 0, tiny, dp)
        newton = p / dp
        diff = x[:, :, None] - x[:, None, :]
        np.einsum("bii->bi", diff)[:] = np.inf
        s = (1.0 / diff).sum(axis=2)
        denom = 1.0 - newton * s
        denom = np.where(denom == 0, tiny, denom)
        corr = newton / denom
        x = x - corr
        if np.all(np.abs(corr) <= step_tol * (1.0 + np.abs(x))):
            break
    for _ in range(2):
        p = _horner_batch(c, x)
        dp = _horner_batch(dcoef, x)
        bad = np.abs(dp) < tiny
        step = np.where(bad, 0.0, p / np.where(bad, 1.0, dp))
        x = x - step
    return x


def scaled_residuals(coeffs: np.ndarray, roots: np.ndarray) -> np.ndarray:
    """Backward-error style residual |p(r)| / sum_k |c_k| |r|^k per root."""
    p = np.abs(_horner_batch(coeffs, roots))
    acc = np.broadcast_to(np.abs(coeffs[:, -1:]), roots.shape).copy()
    ar = np.abs(roots)
    for k in range(coeffs.shape[1] - 2, -1, -1):
        acc = acc * ar + np.abs(coeffs[:, k : k + 1])
    return p / np.maximum(acc, 1e-300)


def _cluster_sizes(roots: np.ndarray) -> np.ndarray:
    """For each root, the size of its CLUSTER_RADIUS-linked group."""
    n = len(roots)
    sizes = np.ones(n, dtype=int)
    if n < 2:
        return sizes
    d = (np.abs(roots[:, None] - roots[None, :]) < CLUSTER_RADIUS).astype(np.uint8)
    # transitive closure by repeated squaring of the adjacency (n is small)
    reach = d
    for _ in range(int(math.ceil(math.log2(max(n, 2))))):
        reach = np.minimum(reach + (reach @ reach > 0), 1).astype(np.uint8)
    return reach.sum(axis=1)


def find_roots(
    u: UniPoly,
    residual_tol: float = DEFAULT_RESIDUAL_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> RootSet:
    """All complex roots of ``u`` (ignoring the Laurent shift).

    Exact zero roots are split off when the constant term is 0.  Root
    clusters of radius below ``CLUSTER_RADIUS`` are treated as multiple
    roots and accepted at the relaxed tolerance ``residual_tol**(1/m)``
    (backward error scales with the m-th power of the root perturbation,
    so this is the honest attainable accuracy).
    """
    coeffs = np.asarray(u.coeffs, dtype=np.complex128)
    if len(coeffs) < 2:
        raise ValueError("degree must be >= 1")
    nzero = 0
    while nzero < len(coeffs) - 1 and coeffs[nzero] == 0:
        nzero += 1
    work = coeffs[nzero:]
    if len(work) < 2:
        roots = np.zeros(nzero, dtype=np.complex128)
        return RootSet(roots, 0.0)
    x = aberth_batch(work[None, :], max_iter=max_iter)
    res = scaled_residuals(work[None, :], x)[0]
    x = x[0]
    order = np.lexsort((np.angle(x), np.abs(x)))
    x = x[order]
    res = res[order]
    sizes = _cluster_sizes(x)
    allowed = residual_tol ** (1.0 / sizes)
    if np.any(res > allowed):
        worst = float(res.max())
        raise RootConvergenceError(
            f"residual {worst:.3e} above tolerance after {max_iter} iterations",
            best_roots=np.concatenate([np.zeros(nzero, dtype=np.complex128), x]),
            best_residual=worst,
        )
    roots = np.concatenate([np.zeros(nzero, dtype=np.complex128), x])
    return RootSet(roots, float(res.max()) if len(res) else 0.0)


def roots_below_modulus(rs: RootSet, r: float, band: float) -> tuple[int, bool]:
    """Count roots with |root| < r*exp(-band) and flag any root whose
    log-modulus is within ``band`` of log r."""
    if r <= 0 or band <= 0:
        raise ValueError("need r > 0 and band > 0")
    if len(rs.roots) == 0:
        return 0, False
    mods = np.abs(rs.roots)
    count = int(np.sum(mods < r * math.exp(-band)))
    with np.errstate(divide="ignore"):
        logmods = np.log(mods)
    on_band = bool(np.any(np.abs(logmods - math.log(r)) < band))
    return count, on_band


# ---------------------------------------------------------------------------
# fiber batches with per-row degree trimming
# ---------------------------------------------------------------------------


def solve_fiber_batch(coeffs: np.ndarray, trim_rel: float = TRIM_REL):
    """Solve a batch of fiber polynomials with per-row significance trimming.

    coeffs: (B, n+1) ascending.  Rows may have negligible leading or trailing
    coefficients (the corresponding roots escape to infinity or collapse to
    zero); those slots are padded with ``inf`` and ``0`` respectively so that
    log-modulus comparisons remain meaningful.

    Returns (roots (B, n) complex, ok (B,) bool); ``ok`` is False where the
    whole row is negligible (degenerate fiber) or the residual check failed.
    """
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    nb, ncol = coeffs.shape
    n = ncol - 1
    roots = np.full((nb, n), np.inf, dtype=np.complex128)
    ok = np.ones(nb, dtype=bool)
    a = np.abs(coeffs)
    scale = a.max(axis=1)
    degenerate = scale <= 0
    ok[degenerate] = False
    if n == 0:
        return roots, ok
    sig = a > (trim_rel * np.maximum(scale, 1e-300))[:, None]
    sig[degenerate] = False
    first = np.argmax(sig, axis=1)
    last = ncol - 1 - np.argmax(sig[:, ::-1], axis=1)
    first[degenerate] = 0
    last[degenerate] = 0
    groups: dict[tuple[int, int], list[int]] = {}
    for i in range(nb):
        if degenerate[i]:
            continue
        groups.setdefault((int(first[i]), int(last[i])), []).append(i)
    for (lo, hi), idx in groups.items():
        idx = np.asarray(idx)
        # lo exact/negligible-zero roots at 0, hi..n slots stay at inf
        roots[idx, :lo] = 0.0
        deg = hi - lo
        if deg == 0:
            continue
        sub = coeffs[idx][:, lo : hi + 1]
        x = aberth_batch(sub)
        res = scaled_residuals(sub, x)
        bad = res.max(axis=1) > 1e-6  # far looser than the polish target;
        # only flags genuinely unconverged fibers
        ok[idx[bad]] = False
        roots[idx, lo : lo + deg] = x
    return roots, ok


def log_moduli(roots: np.ndarray) -> np.ndarray:
    """Log-modulus per root; 0 maps to -inf and inf padding stays +inf."""
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.log(np.abs(roots))
    out = np.where(np.isnan(out), np.inf, out)
    return out
