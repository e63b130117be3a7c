"""Exact diagonalization of two interacting particles on the grid.

The pair Hamiltonian H = h(x1) + h(x2) + V(x1, x2) acts on a
permutation-sector-reduced basis: ordered pairs i < j with sqrt(2)
weights for the antisymmetric sector, i <= j for the symmetric one.
Sector purity is exact by construction.  The one-body reduced density
matrix and its natural orbitals turn pair eigenstates into the
occupation observables the perturbative modules predict.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ComputationError, RegimeError
from .eigen import LinearOperator, lowest_eigenpairs
from .exchange import coulomb_matrix_element
from .model import DoubleWellSpec, Grid, InteractionKernel, kernel_matrix, sample_potential
from .single_particle import LocalizedPair, Orbital, localized_levels

MAX_POINTS = 512


class IdentificationError(ComputationError):
    """No eigenstate / natural orbital matches the requested configuration."""


@dataclass
class TwoBodySpace:
    """Index bookkeeping for one permutation sector on one grid."""

    grid: Grid
    sector: str                  # "antisymmetric" | "symmetric"
    iu: np.ndarray               # row indices of the reduced basis
    ju: np.ndarray               # column indices (iu < ju, or <= for symmetric)

    @property
    def dimension(self) -> int:
        return self.iu.size

    def expand(self, u: np.ndarray) -> np.ndarray:
        """Reduced coefficients -> full (n, n) wavefunction matrix."""
        n = self.grid.n
        psi = np.zeros((n, n))
        if self.sector == "antisymmetric":
            vals = u / np.sqrt(2.0)
            psi[self.iu, self.ju] = vals
            psi[self.ju, self.iu] = -vals
        else:
            diag = self.iu == self.ju
            vals = np.where(diag, u, u / np.sqrt(2.0))
            psi[self.iu, self.ju] = vals
            psi[self.ju, self.iu] = vals
        return psi

    def reduce(self, psi: np.ndarray) -> np.ndarray:
        if self.sector == "antisymmetric":
            return np.sqrt(2.0) * psi[self.iu, self.ju]
        diag = self.iu == self.ju
        return np.where(diag, psi[self.iu, self.ju], np.sqrt(2.0) * psi[self.iu, self.ju])

    def pair_state(self, f: np.ndarray, g: np.ndarray) -> np.ndarray:
        """Reduced unit vector for the normalized (anti)symmetrized product
        of two orthonormal one-particle orbitals (function values)."""
        h = self.grid.h
        outer = np.outer(f, g) * h   # function normalization -> unit l2 pair
        if self.sector == "antisymmetric":
            psi = (outer - outer.T) / np.sqrt(2.0)
        else:
            psi = outer if np.allclose(f, g) else (outer + outer.T) / np.sqrt(2.0)
        return self.reduce(psi)

    def mirror_permutation(self) -> np.ndarray:
        """Index permutation realizing (x1, x2) -> (-x1, -x2) on the reduced
        basis; valid on the endpoint-symmetric grid."""
        n = self.grid.n
        lookup = -np.ones((n, n), dtype=np.int64)
        lookup[self.iu, self.ju] = np.arange(self.dimension)
        ri, rj = n - 1 - self.iu, n - 1 - self.ju
        lo, hi = np.minimum(ri, rj), np.maximum(ri, rj)
        perm = lookup[lo, hi]
        if np.any(perm < 0):
            raise ValueError("mirror permutation undefined for this basis")
        return perm


def two_body_space(grid: Grid, sector: str) -> TwoBodySpace:
    if sector not in ("antisymmetric", "symmetric"):
        raise ValueError(f"unknown sector {sector!r}")
    n = grid.n
    if sector == "antisymmetric":
        iu, ju = np.triu_indices(n, k=1)
    else:
        iu, ju = np.triu_indices(n, k=0)
    return TwoBodySpace(grid=grid, sector=sector, iu=iu, ju=ju)


@dataclass
class TwoBodyState:
    space: TwoBodySpace
    coefficients: np.ndarray     # unit l2 in the reduced basis
    energy: float

    @property
    def sector(self) -> str:
        return self.space.sector


def build_two_body(grid: Grid, potential: np.ndarray, kernel: InteractionKernel,
                   sector: str, parity: str | None = None) -> tuple[LinearOperator, TwoBodySpace]:
    """Sector-reduced pair Hamiltonian as a matrix-free operator.

    parity = "even" / "odd" attaches the mirror-inversion projector as the
    operator's symmetry projector (only meaningful for mirror-symmetric
    potentials); it is what resolves exponentially small doublet
    splittings of mirror-paired configurations.
    """
    if grid.n > MAX_POINTS:
        raise ValueError(f"two-body grid too large: n={grid.n} > {MAX_POINTS}")
    space = two_body_space(grid, sector)
    pot = np.asarray(potential, dtype=float)
    vmat = kernel_matrix(kernel, grid) if kernel.lam != 0.0 else None
    diag_full = pot[:, None] + pot[None, :]
    if vmat is not None:
        diag_full = diag_full + vmat
    h2 = 2.0 * grid.h**2

    def apply(u: np.ndarray) -> np.ndarray:
        psi = space.expand(u)
        out = diag_full * psi + (2.0 / h2) * 2.0 * psi
        out[:-1, :] -= psi[1:, :] / h2
        out[1:, :] -= psi[:-1, :] / h2
        out[:, :-1] -= psi[:, 1:] / h2
        out[:, 1:] -= psi[:, :-1] / h2
        return space.reduce(out)

    projector = None
    if parity is not None:
        if parity not in ("even", "odd"):
            raise ValueError(f"unknown parity {parity!r}")
        perm = space.mirror_permutation()
        # reduced-basis inversion: every ordered pair flips order under the
        # mirror, which costs a global sign in the antisymmetric sector
        sigma = -1.0 if sector == "antisymmetric" else 1.0
        sgn = sigma * (1.0 if parity == "even" else -1.0)

        def projector(u: np.ndarray) -> np.ndarray:
            return 0.5 * (u + sgn * u[perm])

    op = LinearOperator(dimension=space.dimension, apply=apply,
                        symmetry_projector=projector)
    return op, space


def solve_two_body(grid: Grid, potential: np.ndarray, kernel: InteractionKernel,
                   sector: str, k: int, parity: str | None = None,
                   tol: float = 1e-8) -> list[TwoBodyState]:
    op, space = build_two_body(grid, potential, kernel, sector, parity=parity)
    pairs = lowest_eigenpairs(op, k, tol=tol)
    return [TwoBodyState(space=space, coefficients=p.vector, energy=p.energy)
            for p in pairs]


@dataclass
class ReducedDensity:
    grid: Grid
    matrix: np.ndarray               # rho(x, x'), trace(rho) * h = 2
    natural_occupations: np.ndarray  # descending
    natural_orbitals: list           # Orbital, function-normalized


def one_body_rdm(state: TwoBodyState) -> ReducedDensity:
    """rho(x, x') = 2 h sum_{x2} Psi(x, x2) Psi(x', x2) and its eigenpairs."""
    grid = state.space.grid
    psi = state.space.expand(state.coefficients)   # unit-l2 matrix; function values are psi/h
    rho = (2.0 / grid.h) * (psi @ psi.T)
    occ, vec = np.linalg.eigh(grid.h * rho)
    order = np.argsort(occ)[::-1]
    occ = occ[order]
    vec = vec[:, order]
    scale = 1.0 / np.sqrt(grid.h)
    orbitals = [Orbital(grid, vec[:, i] * scale, energy=0.0, label=f"no{i}")
                for i in range(vec.shape[1])]
    return ReducedDensity(grid=grid, matrix=rho, natural_occupations=occ,
                          natural_orbitals=orbitals)


def _disambiguate_naturals(rdm: ReducedDensity, pair1: LocalizedPair,
                           degeneracy_tol: float = 1e-9) -> list[Orbital]:
    """Rotate natural orbitals inside occupation-degenerate groups so each
    group member has a definite relation to the localized doublet.

    Degenerate occupations leave the eigenvectors of rho arbitrary within
    the group (exactly so for a non-interacting Slater pair); rotating to
    diagonalize the doublet marker |a><a| + 1/2 |b><b| makes the selection
    below deterministic without changing the density matrix's spectrum.
    """
    grid = rdm.grid
    occ = rdm.natural_occupations
    orbitals = [o.values.copy() for o in rdm.natural_orbitals]
    a, b = pair1.psi_a.values, pair1.psi_b.values

    def marker(u, v):
        return grid.inner(u, a) * grid.inner(v, a) + 0.5 * grid.inner(u, b) * grid.inner(v, b)

    i = 0
    nkeep = min(len(orbitals), 16)      # only the occupied end matters
    while i < nkeep:
        j = i + 1
        while j < nkeep and abs(occ[j] - occ[i]) <= degeneracy_tol * max(1.0, occ[i]):
            j += 1
        if j - i > 1:
            group = orbitals[i:j]
            m = np.array([[marker(u, v) for v in group] for u in group])
            _, rot = np.linalg.eigh(0.5 * (m + m.T))
            rotated = [sum(rot[r, c] * group[r] for r in range(len(group)))
                       for c in range(len(group))]
            orbitals[i:j] = rotated
        i = j
    return [Orbital(grid, v, 0.0, label=f"no{i}") for i, v in enumerate(orbitals)]


def well_b_occupation(state: TwoBodyState, pair1: LocalizedPair,
                      spec: DoubleWellSpec, min_weight: float = 0.9) -> float:
    """Probability weight of the doublet natural orbital beyond the barrier
    midpoint: the exact-diagonalization stand-in for |B_t1 + B_G1|^2.

    Selects, among natural orbitals with >= min_weight of their norm in
    span{psi_a, psi_b}, the one with the largest overlap with psi_a (the
    orbital continuing from the deeper well's ground state).
    """
    grid = state.space.grid
    rdm = one_body_rdm(state)
    orbitals = _disambiguate_naturals(rdm, pair1)
    a, b = pair1.psi_a.values, pair1.psi_b.values

    best = None
    best_overlap = 0.0
    for orb in orbitals[:16]:
        wa = grid.inner(orb.values, a)
        wb = grid.inner(orb.values, b)
        if wa**2 + wb**2 < min_weight:
            continue
        if abs(wa) > best_overlap:
            best_overlap = abs(wa)
            best = orb
    if best is None:
        raise IdentificationError(
            f"no natural orbital has weight >= {min_weight} in the ground doublet subspace")
    mid = spec.barrier_midpoint()
    region = grid.x > mid
    return float(grid.h * np.sum(best.values[region] ** 2))


@dataclass
class StrongCouplingResult:
    t_eff: float
    Q: float
    t2: float
    G: float
    predicted: float      # t2^2 |G| / Q^2
    weights: tuple        # config weights of the identified even/odd states


def _config_weight(space: TwoBodySpace, state_vec: np.ndarray, cfg: np.ndarray) -> float:
    return float(np.dot(cfg, state_vec) ** 2 / np.dot(cfg, cfg))


def strong_coupling_amplitude(grid: Grid, spec: DoubleWellSpec,
                              kernel: InteractionKernel, k: int = 8,
                              tol: float = 1e-9,
                              min_weight: float = 0.8) -> StrongCouplingResult:
    """Effective doubly-occupied-configuration mixing in the repulsion-
    dominated regime, against the three-step estimate t2^2 |G| / Q^2.

    The two eigenstates dominated by psi_1a psi_2a +- psi_1b psi_2b are
    found one per mirror-parity sector, so their exponentially small
    splitting is the difference of two independently converged
    eigenvalues rather than a near-degenerate pair in one solve.
    """
    if not (spec.depth_a == spec.depth_b and spec.width_a == spec.width_b
            and abs(spec.center_a + spec.center_b) < 1e-12):
        raise RegimeError("strong-coupling extraction requires mirror-symmetric wells")

    pairs, _ = localized_levels(spec, grid, levels=2)
    p1, p2 = pairs
    q_aa = coulomb_matrix_element(p1.psi_a, p1.psi_a, p2.psi_a, p2.psi_a, kernel).value
    q_ab = coulomb_matrix_element(p1.psi_a, p1.psi_a, p2.psi_b, p2.psi_b, kernel).value
    Q = q_aa - q_ab
    G = coulomb_matrix_element(p1.psi_b, p2.psi_b, p2.psi_a, p1.psi_a, kernel).value
    t2 = p2.t
    if Q < 10.0 * max(t2, abs(G)):
        raise RegimeError(
            f"not in the repulsion-dominated regime: Q={Q:.3e} < 10 x max(t2, |G|)")

    pot = sample_potential(spec, grid)
    energies = {}
    weights = {}
    for parity, sign in (("even", +1.0), ("odd", -1.0)):
        states = solve_two_body(grid, pot, kernel, "antisymmetric", k,
                                parity=parity, tol=tol)
        cfg = (states[0].space.pair_state(p1.psi_a.values, p2.psi_a.values)
               + sign * states[0].space.pair_state(p1.psi_b.values, p2.psi_b.values))
        found = None
        for st in states:
            w = _config_weight(st.space, st.coefficients, cfg)
            if w >= min_weight:
                found = (st.energy, w)
                break
        if found is None:
            raise IdentificationError(
                f"no {parity}-parity eigenstate has weight >= {min_weight} on the "
                "doubly-occupied configuration pair")
        energies[parity], weights[parity] = found

    t_eff = 0.5 * abs(energies["even"] - energies["odd"])
    predicted = t2**2 * abs(G) / Q**2
    return StrongCouplingResult(t_eff=float(t_eff), Q=float(Q), t2=float(t2),
                                G=float(G), predicted=float(predicted),
                                weights=(weights["even"], weights["odd"]))


def find_state_by_config(states: list[TwoBodyState], configs: list[np.ndarray],
                         threshold: float = 0.5) -> tuple[TwoBodyState, float]:
    """The eigenstate carrying the most weight on the given reduced-basis
    configuration vectors; its combined weight must reach threshold."""
    best, best_w = None, -1.0
    for st in states:
        w = sum(_config_weight(st.space, st.coefficients, c) for c in configs)
        if w > best_w:
            best, best_w = st, w
    if best is None or best_w < threshold:
        raise IdentificationError(
            f"no eigenstate reaches configuration weight {threshold} (best {best_w:.3f})")
    return best, float(best_w)
