"""Turtle tracing and the stochastic ink model.

A symbol string becomes an ordered list of unit segments (the trajectory),
which is centered and rescaled into the unit frame and then rasterized into
a grid of per-pixel black probabilities.  Observed binary images are scored
against that grid under an independent Bernoulli model.

Orientation convention follows the turtle semantics of the rewriting
language: ``-`` turns left (counterclockwise), ``+`` turns right
(clockwise), and y increases upward.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.ndimage import correlate1d
from scipy.optimize import minimize_scalar

from .errors import DimensionMismatch, EmptyTrajectory, InsufficientData
from .lsystem import FORWARD_SYMBOLS

#: Default image resolution (square grid).
RESOLUTION = 200

#: Fraction of the frame spanned by the trajectory bounding box.
FRAME_FILL = 0.9

_GEOM_EPS = 1e-9


@dataclass(frozen=True)
class Trajectory:
    """Ordered turtle segments with per-segment provenance.

    ``segments`` has shape (n, 2, 2): segment i runs from segments[i, 0]
    to segments[i, 1].  ``source_index`` maps each segment back to the
    position of its forward symbol in the source string.
    """

    segments: np.ndarray
    source_index: np.ndarray

    def __len__(self) -> int:
        return len(self.segments)

    @property
    def points(self) -> np.ndarray:
        return self.segments.reshape(-1, 2)

    def bounds(self) -> tuple[float, float, float, float]:
        """(xmin, ymin, xmax, ymax) over all endpoints."""
        pts = self.points
        if len(pts) == 0:
            raise EmptyTrajectory("trajectory has no segments")
        lo = pts.min(axis=0)
        hi = pts.max(axis=0)
        return lo[0], lo[1], hi[0], hi[1]


def trace(s: str, angle_deg: float) -> Trajectory:
    """Trace a symbol string with unit steps.

    The turtle starts heading rightward; F and G advance one unit and emit
    a segment, turns rotate the heading, separators are ignored.  The
    result is translated so the bottom-leftmost endpoint sits at origin.
    """
    x, y = 0.0, 0.0
    heading = 0.0
    segs = []
    src = []
    for i, c in enumerate(s):
        if c in FORWARD_SYMBOLS:
            rad = math.radians(heading)
            nx, ny = x + math.cos(rad), y + math.sin(rad)
            segs.append(((x, y), (nx, ny)))
            src.append(i)
            x, y = nx, ny
        elif c == "-":
            heading += angle_deg
        elif c == "+":
            heading -= angle_deg
        elif c == " ":
            pass
        else:
            raise ValueError(f"illegal symbol {c!r}")
    segments = np.array(segs, dtype=float).reshape(-1, 2, 2)
    source_index = np.array(src, dtype=int)
    if len(segments):
        pts = segments.reshape(-1, 2)
        # bottom-leftmost: minimal y, ties broken by minimal x
        ymin = pts[:, 1].min()
        at_bottom = pts[np.abs(pts[:, 1] - ymin) <= _GEOM_EPS]
        origin = np.array([at_bottom[:, 0].min(), ymin])
        segments = segments - origin
    return Trajectory(segments, source_index)


def net_pose(rule: str, angle_deg: float) -> tuple[float, float, float]:
    """(dx, dy, net heading in degrees) after tracing ``rule`` from origin."""
    x, y = 0.0, 0.0
    heading = 0.0
    for c in rule:
        if c in FORWARD_SYMBOLS:
            rad = math.radians(heading)
            x += math.cos(rad)
            y += math.sin(rad)
        elif c == "-":
            heading += angle_deg
        elif c == "+":
            heading -= angle_deg
    return x, y, heading


def rule_preserves_shape(rule: str, angle_deg: float, tol: float = 1e-6) -> bool:
    """True when the rule's net displacement is strictly positive along the
    initial heading and its net rotation is zero mod 360 degrees."""
    dx, dy, heading = net_pose(rule, angle_deg)
    turn_ok = abs((heading + 180.0) % 360.0 - 180.0) <= tol
    return turn_ok and dx > tol and abs(dy) <= tol


def extends_above_baseline(t: Trajectory, tol: float = 1e-6) -> bool:
    """True when the trajectory rises above the horizontal line through its
    starting point (the baseline path)."""
    if len(t) == 0:
        return False
    y0 = t.segments[0, 0, 1]
    return bool(t.points[:, 1].max() > y0 + tol)


def _cross(ox, oy, ax, ay, bx, by):
    return (ax - ox) * (by - oy) - (ay - oy) * (bx - ox)


def self_intersects(t: Trajectory, tol: float = _GEOM_EPS) -> bool:
    """Exact pairwise check that the path never crosses itself.

    Non-adjacent segment pairs may not share any point.  Adjacent segments
    (which always share one endpoint) fail only when the second retraces
    the first (collinear, opposite direction).
    """
    n = len(t)
    if n < 2:
        return False
    a = t.segments[:, 0]  # starts (n, 2)
    b = t.segments[:, 1]  # ends (n, 2)

    # adjacent pairs: retrace means directions collinear and opposed
    d = b - a
    cross_adj = d[:-1, 0] * d[1:, 1] - d[:-1, 1] * d[1:, 0]
    dot_adj = (d[:-1] * d[1:]).sum(axis=1)
    if np.any((np.abs(cross_adj) <= tol) & (dot_adj < -tol)):
        return True

    if n < 3:
        return False
    i, j = np.triu_indices(n, k=2)
    ai, bi, aj, bj = a[i], b[i], a[j], b[j]

    d1 = _cross(aj[:, 0], aj[:, 1], bj[:, 0], bj[:, 1], ai[:, 0], ai[:, 1])
    d2 = _cross(aj[:, 0], aj[:, 1], bj[:, 0], bj[:, 1], bi[:, 0], bi[:, 1])
    d3 = _cross(ai[:, 0], ai[:, 1], bi[:, 0], bi[:, 1], aj[:, 0], aj[:, 1])
    d4 = _cross(ai[:, 0], ai[:, 1], bi[:, 0], bi[:, 1], bj[:, 0], bj[:, 1])

    proper = (
        ((d1 > tol) & (d2 < -tol) | (d1 < -tol) & (d2 > tol))
        & ((d3 > tol) & (d4 < -tol) | (d3 < -tol) & (d4 > tol))
    )
    if np.any(proper):
        return True

    # touching / collinear cases: an endpoint of one lying on the other
    def on_segment(p, q, r):
        # r collinear-with and within the box of segment pq
        collin = np.abs(_cross(p[:, 0], p[:, 1], q[:, 0], q[:, 1], r[:, 0], r[:, 1])) <= tol
        lo = np.minimum(p, q) - tol
        hi = np.maximum(p, q) + tol
        inside = np.all((r >= lo) & (r <= hi), axis=1)
        return collin & inside

    touch = (
        on_segment(aj, bj, ai)
        | on_segment(aj, bj, bi)
        | on_segment(ai, bi, aj)
        | on_segment(ai, bi, bj)
    )
    return bool(np.any(touch))


def normalize(t: Trajectory, frame_fill: float = FRAME_FILL) -> Trajectory:
    """Scale and center a trajectory into the unit frame.

    The bounding box is scaled uniformly so its width equals ``frame_fill``
    and centered at (0.5, 0.5).  Zero-width trajectories are scaled by
    height instead; a single point is centered unscaled.
    """
    if len(t) == 0:
        raise EmptyTrajectory("cannot normalize an empty trajectory")
    xmin, ymin, xmax, ymax = t.bounds()
    width = xmax - xmin
    height = ymax - ymin
    if width > _GEOM_EPS:
        scale = frame_fill / width
    elif height > _GEOM_EPS:
        scale = frame_fill / height
    else:
        scale = 1.0
    center = np.array([(xmin + xmax) / 2.0, (ymin + ymax) / 2.0])
    segments = (t.segments - center) * scale + 0.5
    return Trajectory(segments, t.source_index)


def binomial_kernel(halfwidth: int) -> np.ndarray:
    """Normalized 1D binomial stencil of size 2*halfwidth + 1."""
    k = np.array([1.0])
    for _ in range(2 * halfwidth):
        k = np.convolve(k, [0.5, 0.5])
    return k


@dataclass(frozen=True)
class InkParams:
    """Parameters of the ink model.

    ``ink_per_unit_length`` is deposited per pixel of arc length, spread
    bilinearly over the four nearest pixel centers; the blur kernel is a
    separable normalized stencil; ``noise_floor`` keeps every pixel
    probability strictly inside (0, 1).
    """

    ink_per_unit_length: float = 2.0
    blur_halfwidth: int = 1
    noise_floor: float = 1e-4

    def __post_init__(self):
        if not 0.0 < self.noise_floor < 0.5:
            raise ValueError("noise_floor must lie in (0, 0.5)")
        if self.ink_per_unit_length <= 0:
            raise ValueError("ink_per_unit_length must be positive")
        if self.blur_halfwidth < 0:
            raise ValueError("blur_halfwidth must be nonnegative")

    @property
    def blur_kernel(self) -> np.ndarray:
        """The full separable 2D stencil (sums to 1)."""
        k = binomial_kernel(self.blur_halfwidth)
        return np.outer(k, k)


def rasterize(t: Trajectory | None, params: InkParams,
              resolution: int = RESOLUTION) -> np.ndarray:
    """Deposit ink along a normalized trajectory onto a pixel grid.

    Points are sampled at two per pixel of arc length; each deposits onto
    its four nearest pixel centers with bilinear weights.  The ink field is
    blurred, clamped to [0, 1] and remapped into
    [noise_floor, 1 - noise_floor].  Row 0 is the top of the image.
    """
    H = W = resolution
    eps = params.noise_floor
    if t is None or len(t) == 0:
        return np.full((H, W), eps)

    starts = t.segments[:, 0] * resolution
    ends = t.segments[:, 1] * resolution
    lengths = np.linalg.norm(ends - starts, axis=1)
    counts = np.maximum(2, np.ceil(2.0 * lengths).astype(int) + 1)
    total = int(counts.sum())

    seg_idx = np.repeat(np.arange(len(t)), counts)
    offsets = np.concatenate(([0], np.cumsum(counts)[:-1]))
    local = np.arange(total) - offsets[seg_idx]
    frac = local / (counts[seg_idx] - 1)
    pts = starts[seg_idx] + frac[:, None] * (ends - starts)[seg_idx]
    weights = params.ink_per_unit_length * lengths[seg_idx] / counts[seg_idx]

    gx = pts[:, 0] - 0.5
    gy = pts[:, 1] - 0.5
    x0 = np.floor(gx).astype(int)
    y0 = np.floor(gy).astype(int)
    fx = gx - x0
    fy = gy - y0

    acc = np.zeros(H * W)
    for dx, dy in ((0, 0), (1, 0), (0, 1), (1, 1)):
        xs = x0 + dx
        ys = y0 + dy
        wgt = weights * (fx if dx else 1 - fx) * (fy if dy else 1 - fy)
        ok = (xs >= 0) & (xs < W) & (ys >= 0) & (ys < H)
        flat = ys[ok] * W + xs[ok]
        acc += np.bincount(flat, weights=wgt[ok], minlength=H * W)
    field = acc.reshape(H, W)

    if params.blur_halfwidth > 0:
        k = binomial_kernel(params.blur_halfwidth)
        field = correlate1d(field, k, axis=0, mode="constant")
        field = correlate1d(field, k, axis=1, mode="constant")

    np.clip(field, 0.0, 1.0, out=field)
    mean = eps + (1.0 - 2.0 * eps) * field
    return mean[::-1]  # y-up to row-0-at-top


def render_mean(s: str, angle_deg: float, params: InkParams,
                resolution: int = RESOLUTION) -> np.ndarray:
    """trace -> normalize -> rasterize in one call.

    Results are memoized process-wide (rendering dominates chain runtime
    and hypotheses recur constantly across chains); the returned array is
    read-only so cache entries cannot be corrupted by callers.
    """
    return _render_mean_cached(s, angle_deg, params, resolution)


@lru_cache(maxsize=8192)
def _render_mean_cached(s: str, angle_deg: float, params: InkParams,
                        resolution: int) -> np.ndarray:
    t = trace(s, angle_deg)
    if len(t) == 0:
        out = np.full((resolution, resolution), params.noise_floor)
    else:
        out = rasterize(normalize(t), params, resolution)
    out.setflags(write=False)
    return out


def render_binary(s: str, angle_deg: float, params: InkParams,
                  resolution: int = RESOLUTION) -> np.ndarray:
    """Deterministic binary render: the mean image thresholded at 0.5."""
    return render_mean(s, angle_deg, params, resolution) >= 0.5


def sample_image(mean: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Draw each pixel independently Bernoulli(mean[pixel])."""
    return rng.random(mean.shape) < mean


def log_likelihood(image: np.ndarray, mean: np.ndarray) -> float:
    """Bernoulli log-probability of a binary image under a mean image."""
    if image.shape != mean.shape:
        raise DimensionMismatch(f"image {image.shape} vs mean {mean.shape}")
    image = image.astype(bool)
    return float(np.sum(np.log(np.where(image, mean, 1.0 - mean))))


def random_scribbles(n: int, rng: np.random.Generator, n_symbols: int = 30,
                     angles=(30.0, 45.0, 60.0, 90.0)) -> list[Trajectory]:
    """Random turtle walks used as an ink-model calibration corpus."""
    out = []
    alphabet = np.array(list("FG+-"))
    while len(out) < n:
        s = "".join(rng.choice(alphabet, size=n_symbols))
        angle = float(rng.choice(np.asarray(angles)))
        t = trace(s, angle)
        if len(t) == 0:
            continue
        out.append(normalize(t))
    return out


def _corpus_loglik(trajectories, images, params, resolution):
    total = 0.0
    for t, img in zip(trajectories, images):
        total += log_likelihood(img, rasterize(t, params, resolution))
    return total


def fit_ink_params(reference_renders, halfwidths=(0, 1, 2, 3),
                   n_sweeps: int = 3, min_pairs: int = 50) -> tuple[InkParams, float]:
    """Maximum-likelihood ink parameters from (trajectory, binary image) pairs.

    Coordinate-wise search: bounded scalar optimization over ink and noise
    floor, exhaustive over the discrete blur halfwidth.  Returns the best
    parameters and the achieved total log-likelihood.
    """
    pairs = list(reference_renders)
    if len(pairs) < min_pairs:
        raise InsufficientData(f"need at least {min_pairs} pairs, got {len(pairs)}")
    trajectories = [normalize(t) for t, _ in pairs]
    images = [np.asarray(img, dtype=bool) for _, img in pairs]
    resolution = images[0].shape[0]
    for img in images:
        if img.shape != (resolution, resolution):
            raise DimensionMismatch("calibration images must share one resolution")

    ink, hw, eps = 2.0, 1, 1e-4

    def objective(i, h, e):
        return _corpus_loglik(trajectories, images, InkParams(i, h, e), resolution)

    for _ in range(n_sweeps):
        hw = max(halfwidths, key=lambda h: objective(ink, h, eps))
        r = minimize_scalar(lambda v: -objective(math.exp(v), hw, eps),
                            bounds=(math.log(0.05), math.log(20.0)), method="bounded",
                            options={"xatol": 1e-4})
        ink = math.exp(r.x)
        r = minimize_scalar(lambda v: -objective(ink, hw, math.exp(v)),
                            bounds=(math.log(1e-7), math.log(0.45)), method="bounded",
                            options={"xatol": 1e-4})
        eps = math.exp(r.x)

    best = InkParams(ink, hw, eps)
    return best, objective(ink, hw, eps)
