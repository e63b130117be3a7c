"""Single-particle physics of the double well.

Spectra, localized orbitals, tunneling amplitudes from doublet splittings,
semiclassical barrier exponents, and the direct perturbative mixing
amplitude t/(E_a - E_b).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import RegimeError
from .eigen import EigenPair, LinearOperator, hamiltonian_operator, lowest_eigenpairs
from .model import DoubleWellSpec, Grid, sample_potential


@dataclass
class Orbital:
    """Real normalized wavefunction on a grid, with its energy."""

    grid: Grid
    values: np.ndarray
    energy: float
    label: str = ""

    @property
    def rms_radius(self) -> float:
        x = self.grid.x
        mean = self.grid.inner(self.values, x * self.values)
        var = self.grid.inner(self.values, (x - mean) ** 2 * self.values)
        return float(np.sqrt(max(var, 0.0)))

    def position_mean(self) -> float:
        return self.grid.inner(self.values, self.grid.x * self.values)


def make_orbital(grid: Grid, values: np.ndarray, energy: float = 0.0,
                 label: str = "") -> Orbital:
    """Normalize raw samples into an Orbital under the grid inner product."""
    v = np.asarray(values, dtype=float)
    nrm = grid.norm(v)
    if nrm == 0.0:
        raise ValueError("cannot normalize a zero vector")
    return Orbital(grid=grid, values=v / nrm, energy=float(energy), label=label)


@dataclass
class LocalizedPair:
    """Orthogonal well-centered orbitals with energies and tunneling amplitude.

    t = -<psi_a|H|psi_b> with phases fixed so t >= 0; in the symmetric case
    this is half the doublet splitting.
    """

    psi_a: Orbital
    psi_b: Orbital
    E_a: float
    E_b: float
    t: float


def solve_wells(spec: DoubleWellSpec, grid: Grid, k: int,
                tol: float = 1e-8) -> list[EigenPair]:
    """The k lowest eigenpairs of the sampled double-well Hamiltonian."""
    op = hamiltonian_operator(grid, sample_potential(spec, grid))
    pairs = lowest_eigenpairs(op, k, tol=tol)
    unbound = [p.energy for p in pairs if p.energy >= 0.0]
    if unbound and (spec.depth_a > 0 or spec.depth_b > 0):
        warnings.warn(f"{len(unbound)} of {k} requested states are unbound on this box",
                      stacklevel=2)
    return pairs


def _sign_reference_index(grid: Grid, spec: DoubleWellSpec, center: float) -> int:
    # quarter width toward the outer (barrier-averted) side: well defined for
    # both nodeless and single-node orbitals, and mirror-consistent
    width = spec.width_a if center == spec.center_a else spec.width_b
    outward = -1.0 if center <= spec.barrier_midpoint() else 1.0
    return grid.index_of(center + outward * 0.25 * width)


def localize_doublet(op: LinearOperator, grid: Grid, spec: DoubleWellSpec,
                     doublet: tuple[EigenPair, EigenPair],
                     next_energy: float | None = None,
                     label_level: int = 1) -> LocalizedPair:
    """Rotate a well-doublet into position-localized orbitals.

    Diagonalizes the position operator restricted to span{psi+, psi-}
    (Foster-Boys in 2D), labels the members by well, fixes signs, and
    extracts E_a, E_b and t from the Hamiltonian in the rotated basis.
    """
    lo, hi = sorted(doublet, key=lambda p: p.energy)
    split = hi.energy - lo.energy
    if next_energy is not None and (next_energy - hi.energy) < 10.0 * split:
        raise RegimeError(
            f"not a doublet: gap to next level {next_energy - hi.energy:.3e} "
            f"< 10 x splitting {split:.3e}")

    x = grid.x
    V = np.column_stack([lo.vector, hi.vector])   # unit-l2 columns
    Xsub = V.T @ (x[:, None] * V)
    pos, rot = np.linalg.eigh(0.5 * (Xsub + Xsub.T))
    loc = V @ rot                      # columns ordered by <x> ascending

    left_first = spec.center_a <= spec.center_b
    col_a, col_b = (0, 1) if left_first else (1, 0)
    va, vb = loc[:, col_a].copy(), loc[:, col_b].copy()

    for v, center in ((va, spec.center_a), (vb, spec.center_b)):
        idx = _sign_reference_index(grid, spec, center)
        ref = v[idx] if abs(v[idx]) > 1e-12 else v[np.argmax(np.abs(v))]
        if ref < 0:
            v *= -1.0

    Ha, Hb = op.matvec(va), op.matvec(vb)
    E_a, E_b = float(np.dot(va, Ha)), float(np.dot(vb, Hb))
    t = -float(np.dot(va, Hb))
    if t < 0:  # pair-phase escape hatch; never taken for standard doublets
        vb *= -1.0
        t = -t

    scale = 1.0 / np.sqrt(grid.h)
    lvl = str(label_level)
    return LocalizedPair(
        psi_a=Orbital(grid, va * scale, E_a, label=lvl + "a"),
        psi_b=Orbital(grid, vb * scale, E_b, label=lvl + "b"),
        E_a=E_a, E_b=E_b, t=float(t),
    )


def localized_levels(spec: DoubleWellSpec, grid: Grid, levels: int = 1,
                     tol: float = 1e-8,
                     enforce_gap: bool = True) -> tuple[list[LocalizedPair], list[EigenPair]]:
    """Solve the double well and localize the lowest `levels` doublets.

    Returns (pairs by level, raw eigenpairs); eigenpair 2*levels is solved
    as well so the doublet gap condition can be checked.
    """
    k = 2 * levels + 1
    eig = solve_wells(spec, grid, k, tol=tol)
    op = hamiltonian_operator(grid, sample_potential(spec, grid))
    out = []
    for lev in range(1, levels + 1):
        nxt = eig[2 * lev].energy if enforce_gap else None
        out.append(localize_doublet(op, grid, spec,
                                    (eig[2 * lev - 2], eig[2 * lev - 1]),
                                    next_energy=nxt, label_level=lev))
    return out, eig


def potential_function(spec: DoubleWellSpec, x: np.ndarray) -> np.ndarray:
    """The double-well potential as a continuous function (no grid)."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    for center, depth, width in ((spec.center_a, spec.depth_a, spec.width_a),
                                 (spec.center_b, spec.depth_b, spec.width_b)):
        if depth == 0.0:
            continue
        if spec.shape == "square":
            out = out - np.where(np.abs(x - center) <= 0.5 * width, depth, 0.0)
        else:
            sigma = 0.5 * width
            out = out - depth * np.exp(-((x - center) ** 2) / (2 * sigma**2))
    return out


def _bisect_sign_change(f, a: float, b: float, xtol: float = 1e-8) -> float:
    fa, fb = f(a), f(b)
    while b - a > xtol:
        m = 0.5 * (a + b)
        fm = f(m)
        if fm == 0.0:
            return m
        if (fa < 0) != (fm < 0):
            b, fb = m, fm
        else:
            a, fa = m, fm
    return 0.5 * (a + b)


def _simpson(y: np.ndarray, dx: float) -> float:
    # y sampled at an odd number of points
    return float(dx / 3.0 * (y[0] + y[-1] + 4.0 * y[1:-1:2].sum() + 2.0 * y[2:-1:2].sum()))


def wkb_exponent(spec: DoubleWellSpec, energy: float, n_quad: int = 4001,
                 probe_points: int = 8001) -> float:
    """Barrier action integral of sqrt(2 (U - E)) between the classical
    turning points that bracket the inter-well barrier.

    Turning points are located by bisection to 1e-8; each half of the
    integral is evaluated with Simpson's rule after the substitution
    x = x_t + u^2 that removes the square-root endpoint singularity.
    """
    lo, hi = min(spec.center_a, spec.center_b), max(spec.center_a, spec.center_b)
    probe = np.linspace(lo, hi, probe_points)
    u = potential_function(spec, probe)
    barrier_top = float(u.max())
    if energy > barrier_top:
        raise RegimeError(f"no barrier: E={energy} above barrier top {barrier_top}")
    if energy == barrier_top:
        return 0.0

    f = u - energy
    sign = np.sign(f)
    sign[sign == 0] = 1.0
    changes = np.flatnonzero(sign[:-1] * sign[1:] < 0)
    if changes.size != 2:
        raise RegimeError(
            f"turning-point ambiguity: {changes.size} sign changes of U - E "
            "between the well centers, expected exactly 2")

    def g(xx):
        return float(potential_function(spec, np.array([xx]))[0] - energy)

    x1 = _bisect_sign_change(g, probe[changes[0]], probe[changes[0] + 1])
    x2 = _bisect_sign_change(g, probe[changes[1]], probe[changes[1] + 1])
    xm = 0.5 * (x1 + x2)

    m = n_quad if n_quad % 2 == 1 else n_quad + 1
    total = 0.0
    for x_t, s in ((x1, +1.0), (x2, -1.0)):
        umax = np.sqrt(abs(xm - x_t))
        uu = np.linspace(0.0, umax, m)
        xx = x_t + s * uu**2
        integrand = 2.0 * uu * np.sqrt(2.0 * np.clip(potential_function(spec, xx) - energy, 0.0, None))
        total += _simpson(integrand, umax / (m - 1))
    return total


def perturbative_mixing_direct(pair: LocalizedPair) -> float:
    """First-order admixture amplitude t/(E_a - E_b) of psi_b into the
    orbital that continues from psi_a. Valid only for t << |E_a - E_b|."""
    if pair.t == 0.0:
        return 0.0
    detuning = abs(pair.E_a - pair.E_b)
    if pair.t > 0.1 * detuning:
        raise RegimeError(
            f"non-perturbative: t={pair.t:.3e} exceeds 0.1 x |E_a - E_b| = {0.1 * detuning:.3e}")
    return pair.t / (pair.E_a - pair.E_b)
