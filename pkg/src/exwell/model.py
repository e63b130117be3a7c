"""Spatial grid, double-well potential family and two-body interaction kernel.

Natural units hbar = m = 1 throughout; energies and lengths are
dimensionless.  All values are immutable after construction and safe to
share across workers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import GridMismatchError


@dataclass(frozen=True)
class Grid:
    """Uniform 1D mesh. Inner product convention: <f|g> = h * sum_i f_i g_i."""

    x_min: float
    x_max: float
    n: int
    h: float = field(init=False)

    def __post_init__(self):
        if self.n < 3:
            raise ValueError(f"grid needs at least 3 points, got n={self.n}")
        if not self.x_max > self.x_min:
            raise ValueError(f"invalid extent: x_max={self.x_max} <= x_min={self.x_min}")
        object.__setattr__(self, "h", (self.x_max - self.x_min) / (self.n - 1))

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n)

    def inner(self, f: np.ndarray, g: np.ndarray) -> float:
        return float(self.h * np.dot(f, g))

    def norm(self, f: np.ndarray) -> float:
        return float(np.sqrt(self.h) * np.linalg.norm(f))

    def index_of(self, x: float) -> int:
        """Index of the grid point nearest to x."""
        return int(round((x - self.x_min) / self.h))


def build_grid(x_min: float, x_max: float, n: int) -> Grid:
    return Grid(x_min=x_min, x_max=x_max, n=int(n))


_SHAPES = ("square", "gaussian")


@dataclass(frozen=True)
class DoubleWellSpec:
    """Two attractive wells on a flat zero-energy barrier baseline.

    Square wells have value -depth inside [center +- width/2]; gaussian
    wells are -depth * exp(-(x-center)^2 / (2 (width/2)^2)).  Contributions
    of the two wells add.  depth = 0 switches a well off (used for
    single-well and particle-in-box limits).
    """

    shape: str
    center_a: float
    center_b: float
    depth_a: float
    depth_b: float
    width_a: float
    width_b: float

    def __post_init__(self):
        if self.shape not in _SHAPES:
            raise ValueError(f"unknown well shape {self.shape!r}, expected one of {_SHAPES}")
        if self.depth_a < 0 or self.depth_b < 0:
            raise ValueError("well depths must be >= 0")
        if self.width_a <= 0 or self.width_b <= 0:
            raise ValueError("well widths must be > 0")
        if self.depth_a < self.depth_b and self.depth_a > 0:
            # single-well limits (one depth zero) are exempt from the ordering
            raise ValueError("asymmetric configuration must have depth_a >= depth_b")
        if abs(self.center_a - self.center_b) <= 0.5 * (self.width_a + self.width_b):
            raise ValueError("wells overlap: |center_a - center_b| must exceed (width_a + width_b)/2")

    @property
    def separation(self) -> float:
        return abs(self.center_b - self.center_a)

    def barrier_midpoint(self) -> float:
        return 0.5 * (self.center_a + self.center_b)


def symmetric_wells(shape: str, separation: float, depth: float, width: float,
                    depth_b: float | None = None) -> DoubleWellSpec:
    """Wells of a common width mirrored about the origin at +-separation/2."""
    return DoubleWellSpec(
        shape=shape,
        center_a=-0.5 * separation,
        center_b=+0.5 * separation,
        depth_a=depth,
        depth_b=depth if depth_b is None else depth_b,
        width_a=width,
        width_b=width,
    )


def _single_well(shape: str, x: np.ndarray, center: float, depth: float, width: float) -> np.ndarray:
    if depth == 0.0:
        return np.zeros_like(x)
    if shape == "square":
        inside = np.abs(x - center) <= 0.5 * width
        return np.where(inside, -depth, 0.0)
    sigma = 0.5 * width
    return -depth * np.exp(-((x - center) ** 2) / (2.0 * sigma**2))


def sample_potential(spec: DoubleWellSpec, grid: Grid) -> np.ndarray:
    """Sample the double-well potential on the grid.

    Requires every active well to sit inside the box with a margin of at
    least 5*max(width) between its outer edge and the wall, so the box
    walls do not distort the bound states.
    """
    margin = 5.0 * max(spec.width_a, spec.width_b)
    for center, depth, width in ((spec.center_a, spec.depth_a, spec.width_a),
                                 (spec.center_b, spec.depth_b, spec.width_b)):
        if depth == 0.0:
            continue
        if center - 0.5 * width - grid.x_min < margin or grid.x_max - (center + 0.5 * width) < margin:
            raise ValueError(
                f"well at {center} (width {width}) too close to box "
                f"[{grid.x_min}, {grid.x_max}]; need margin >= {margin}")
    x = grid.x
    return (_single_well(spec.shape, x, spec.center_a, spec.depth_a, spec.width_a)
            + _single_well(spec.shape, x, spec.center_b, spec.depth_b, spec.width_b))


@dataclass(frozen=True)
class InteractionKernel:
    """Softened two-body interaction V(x, x') = lam / sqrt((x-x')^2 + s^2).

    lam > 0 is repulsion, lam < 0 attraction; the softening length s > 0
    keeps the kernel bounded by |lam|/s on the diagonal while preserving
    the lam/|x-x'| long-range behavior.
    """

    lam: float
    s: float = 1.0

    def __post_init__(self):
        if self.s <= 0:
            raise ValueError("softening length s must be > 0")


def kernel_value(kernel: InteractionKernel, x: float, xp: float) -> float:
    return kernel.lam / np.sqrt((x - xp) ** 2 + kernel.s**2)


def kernel_matrix(kernel: InteractionKernel, grid: Grid) -> np.ndarray:
    """Dense n x n kernel matrix V_ij = V(x_i, x_j). Used on small grids."""
    x = grid.x
    return kernel.lam / np.sqrt((x[:, None] - x[None, :]) ** 2 + kernel.s**2)


def kernel_apply(kernel: InteractionKernel, grid: Grid, f: np.ndarray,
                 chunk: int = 1024) -> np.ndarray:
    """Integral transform g(x) = h * sum_x' V(x, x') f(x'), chunked by rows
    so the n x n kernel is never materialized on large grids."""
    if f.shape != (grid.n,):
        raise GridMismatchError(f"vector of length {f.shape} does not match grid n={grid.n}")
    x = grid.x
    out = np.empty_like(f, dtype=float)
    s2 = kernel.s**2
    for lo in range(0, grid.n, chunk):
        hi = min(lo + chunk, grid.n)
        block = kernel.lam / np.sqrt((x[lo:hi, None] - x[None, :]) ** 2 + s2)
        out[lo:hi] = block @ f
    return grid.h * out
