"""Linear-response solve of the mean-field equation with a frozen spectator.

The spectator orbital psi_2 stays fixed; the ground orbital's correction
delta_psi solves (E_a - H) delta_psi = K with psi_a deflated, where K is
the non-local exchange source built from psi_2.  Projecting the corrected
orbital on psi_b gives the exchange-mediated transfer amplitude, to be
compared with the two-level estimate G / (E_a - E_b).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import RegimeError
from .eigen import LinearOperator, hamiltonian_operator, lowest_eigenpairs, shifted_solve
from .exchange import coulomb_matrix_element, exchange_source
from .model import DoubleWellSpec, Grid, InteractionKernel, sample_potential
from .single_particle import LocalizedPair, Orbital, potential_function


@dataclass
class HFMixResult:
    delta_psi: np.ndarray          # correction to psi_a (function values, not normalized)
    B_G1_projected: float          # <psi_b | psi_a + delta_psi>
    B_G1_perturbative: float       # G / (E_a - E_b)
    G: float
    residual: float                # relative solve residual


def solve_hf_mixing(op: LinearOperator, pair1: LocalizedPair, psi2: Orbital,
                    kernel: InteractionKernel, tol: float = 1e-8) -> HFMixResult:
    """Exchange-mediated admixture of psi_b into the ground orbital.

    Solves (E_a - H) delta_psi = P_perp K, the sign convention under which
    the projected amplitude reproduces the spectral sum
    sum_k <psi_b|phi_k><phi_k|K> / (E_a - E_k) and matches the two-level
    formula G / (E_a - E_b).
    """
    grid = pair1.psi_a.grid
    K = exchange_source([psi2], pair1.psi_a, kernel)
    G = coulomb_matrix_element(psi2, pair1.psi_a, pair1.psi_b, psi2, kernel).value
    detuning = abs(pair1.E_a - pair1.E_b)
    if abs(G) > 0.1 * detuning:
        raise RegimeError(
            f"non-perturbative: |G|={abs(G):.3e} exceeds 0.1 x |E_a - E_b| = {0.1 * detuning:.3e}")

    defl = pair1.psi_a.values * np.sqrt(grid.h)   # unit-l2 deflation vector
    if np.all(K.values == 0.0):
        delta = np.zeros(grid.n)
        res = 0.0
    else:
        # (E - H) x = rhs  <=>  (H - E) x = -rhs
        delta = shifted_solve(op, pair1.E_a, -K.values, deflate=[defl], tol=tol)
        rhs = K.values - defl * np.dot(defl, K.values)
        res_vec = (pair1.E_a * delta - op.matvec(delta)) - rhs
        res_vec -= defl * np.dot(defl, res_vec)
        res = float(np.linalg.norm(res_vec) / np.linalg.norm(rhs))

    projected = grid.inner(pair1.psi_b.values, pair1.psi_a.values + delta)
    pert = G / (pair1.E_a - pair1.E_b)
    return HFMixResult(delta_psi=delta, B_G1_projected=float(projected),
                       B_G1_perturbative=float(pert), G=float(G), residual=res)


def tail_profile(grid: Grid, spec: DoubleWellSpec, pair1: LocalizedPair,
                 delta_psi: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
    """(x, |psi_1(x)|) in the inter-well region, from 5 rms radii past well
    a's inner edge up to well b's outer edge.

    Without a correction vector this is the bare localized orbital; with
    one it is |psi_a + delta_psi|, whose far tail inherits the spectator's
    slow decay.
    """
    r1 = pair1.psi_a.rms_radius
    left = min(spec.center_a, spec.center_b)
    right = max(spec.center_a, spec.center_b)
    w_left = spec.width_a if spec.center_a <= spec.center_b else spec.width_b
    w_right = spec.width_b if spec.center_a <= spec.center_b else spec.width_a
    x_lo = left + 0.5 * w_left + 5.0 * r1
    x_hi = right + 0.5 * w_right
    mask = (grid.x >= x_lo) & (grid.x <= x_hi)
    if not np.any(mask):
        raise RegimeError("tail region is empty: box too small for 5 rms radii past the well edge")
    vals = pair1.psi_a.values if delta_psi is None else pair1.psi_a.values + delta_psi
    return grid.x[mask], np.abs(vals[mask])


@dataclass
class EscapeResult:
    p_bare: float            # sum over band levels of (t_m / (E_a - E_m))^2
    p_exchange: float        # same with the exchange channel added to t_m
    enhancement: float
    n_levels: int
    table: list              # per-level (E_m, t_m, G_m)


def wide_b_escape(grid: Grid, spec: DoubleWellSpec, kernel: InteractionKernel,
                  bandwidth: float, min_levels: int = 20,
                  spectator_level: int = 2) -> EscapeResult:
    """Leakage of the well-a ground orbital into a wide well b.

    Well b is stretched until its levels form a quasi-continuum; transfer
    amplitudes into every band level within |E - E_a| <= bandwidth are
    summed as probabilities, once with the bare tunneling coupling only
    and once including the exchange-mediated coupling.  The localized
    basis comes from the isolated wells (no doublet structure exists
    against a band, so the rotation construction does not apply here).
    """
    if spec.width_b < 20.0 * spec.width_a:
        raise RegimeError("wide-b geometry requires width_b >= 20 x width_a")

    iso_a = DoubleWellSpec(shape=spec.shape, center_a=spec.center_a,
                           center_b=spec.center_b, depth_a=spec.depth_a,
                           depth_b=0.0, width_a=spec.width_a, width_b=spec.width_b)
    iso_b = DoubleWellSpec(shape=spec.shape, center_a=spec.center_a,
                           center_b=spec.center_b, depth_a=0.0,
                           depth_b=spec.depth_b, width_a=spec.width_a, width_b=spec.width_b)

    op_a = hamiltonian_operator(grid, sample_potential(iso_a, grid))
    pairs_a = lowest_eigenpairs(op_a, max(2, spectator_level))
    scale = 1.0 / np.sqrt(grid.h)
    chi_a = Orbital(grid, pairs_a[0].vector * scale, pairs_a[0].energy, "1a")
    chi_spec = pairs_a[spectator_level - 1]
    if chi_spec.energy >= 0.0:
        raise RegimeError(f"spectator level {spectator_level} of well a is unbound")
    chi_2a = Orbital(grid, chi_spec.vector * scale, chi_spec.energy, f"{spectator_level}a")

    # count the b-band: bound levels of the isolated wide well
    nb_guess = int(spec.width_b * np.sqrt(2.0 * spec.depth_b) / np.pi) + 8
    op_b = hamiltonian_operator(grid, sample_potential(iso_b, grid))
    pairs_b = lowest_eigenpairs(op_b, min(nb_guess, grid.n - 2))
    band = [p for p in pairs_b if p.energy < 0.0]
    if len(band) < min_levels:
        raise RegimeError(
            f"insufficient levels: well b holds {len(band)} bound states, need >= {min_levels}")

    # bare tunneling coupling: transfer integral of well-a's potential
    u_a = potential_function(iso_a, grid.x)
    K = exchange_source([chi_2a], chi_a, kernel)

    E_a = chi_a.energy
    p_bare = 0.0
    p_exch = 0.0
    table = []
    used = 0
    for p in band:
        E_m = p.energy
        if abs(E_m - E_a) > bandwidth:
            continue
        chi_m = p.vector * scale
        t_m = grid.inner(chi_m, u_a * chi_a.values)
        g_m = grid.inner(chi_m, K.values)
        denom = E_a - E_m
        p_bare += (t_m / denom) ** 2
        p_exch += ((t_m + g_m) / denom) ** 2
        table.append((float(E_m), float(t_m), float(g_m)))
        used += 1
    if used == 0:
        raise RegimeError("no b-band levels inside the requested bandwidth")
    enh = p_exch / p_bare if p_bare > 0 else np.inf
    return EscapeResult(p_bare=float(p_bare), p_exchange=float(p_exch),
                        enhancement=float(enh), n_levels=used, table=table)
