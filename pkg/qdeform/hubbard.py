"""
f-deformed Hubbard model on small chains and rings.

    H = -t Σ_{σ,<x,y>} f̄(N_x) f̄(N_y + 1) c†_{xσ} c_{yσ}
        + Σ_x U_x (N_{x↑} - 1/2)(N_{x↓} - 1/2)

with N_x = N_{x↑} + N_{x↓}. The bond sum runs over both orientations of every
nearest-neighbour pair. Basis states are bit masks over 2L spin orbitals in
site-major, spin-minor order (orbital 2x + σ, σ = 0 up, 1 down); the
Jordan-Wigner sign of c_j is (-1)^(occupied orbitals below j).

The hopping is assembled as C†_{xσ} C_{yσ} with C = c f̄(N); this equals the
literal form above by the shift identity c g(N) = g(N + 1) c. The (N - 1/2)
Coulomb convention differs from U n↑ n↓ by a one-body shift of U/2 per
electron and a constant.
"""

from __future__ import annotations

import io
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from itertools import combinations
from typing import Optional, Sequence, Union

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from qdeform.deform_core import DeformationSpec, Statistics
from qdeform.errors import DimensionTooLarge, IncompatibleStatistics, NonPositive, NotHermitian, SectorEmpty

logger = logging.getLogger(__name__)

MAX_SECTOR_DIM = 1_000_000
MAX_DENSE_DIM = 6_000
HERMITICITY_TOL = 1e-12


class Geometry(str, Enum):
    OPEN = "open"
    RING = "ring"


Sector = tuple[int, int]


@dataclass(frozen=True)
class LatticeSpec:
    """
    Hubbard lattice: L sites, hopping t, on-site U (uniform or per site),
    fermionic deformation f̄ over occupancies {0, 1, 2} and an optional
    (N↑, N↓) sector.
    """

    sites: int
    t: float = 1.0
    U: Union[float, tuple[float, ...]] = 0.0
    deformation: DeformationSpec = field(default_factory=lambda: DeformationSpec.q_fermion(0.0))
    geometry: Geometry = Geometry.OPEN
    sector: Optional[Sector] = None

    def __post_init__(self):
        if self.sites < 2:
            raise ValueError(f"sites must be >= 2, got {self.sites}")
        object.__setattr__(self, "geometry", Geometry(self.geometry))
        if self.deformation.statistics is not Statistics.FERMION:
            raise IncompatibleStatistics("Hubbard deformation must be fermionic (q-fermion or fermionic custom table)")
        if self.deformation.max_occupation < 2:
            raise ValueError("fermionic deformation must be defined on occupancies 0, 1, 2")
        if np.any(np.asarray(self.deformation.f_squared(np.arange(3))) <= 0.0):
            raise NonPositive("f_bar must be positive on occupancies 0, 1, 2")
        if not np.isscalar(self.U):
            values = tuple(float(u) for u in self.U)
            if len(values) != self.sites:
                raise ValueError(f"per-site U needs {self.sites} values, got {len(values)}")
            object.__setattr__(self, "U", values)
        if self.sector is not None:
            object.__setattr__(self, "sector", (int(self.sector[0]), int(self.sector[1])))

    @classmethod
    def with_q(cls, sites: int, q: float, **kwargs) -> "LatticeSpec":
        if not q > 0.0:
            raise ValueError(f"q must be positive, got {q}")
        return cls(sites=sites, deformation=DeformationSpec.q_fermion(math.log(q)), **kwargs)

    @cached_property
    def f_bar(self) -> np.ndarray:
        return np.sqrt(np.asarray(self.deformation.f_squared(np.arange(3)), dtype=float))

    @cached_property
    def U_sites(self) -> np.ndarray:
        return np.full(self.sites, float(self.U)) if np.isscalar(self.U) else np.asarray(self.U, dtype=float)

    @property
    def bonds(self) -> list[tuple[int, int]]:
        """Unordered nearest-neighbour pairs; a 2-site ring keeps a single bond."""
        pairs = [(x, x + 1) for x in range(self.sites - 1)]
        if self.geometry is Geometry.RING and self.sites > 2:
            pairs.append((self.sites - 1, 0))
        return pairs

    @property
    def ordered_bonds(self) -> list[tuple[int, int]]:
        return [b for x, y in self.bonds for b in ((x, y), (y, x))]


def sectors(sites: int) -> list[Sector]:
    return [(n_up, n_dn) for n_up in range(sites + 1) for n_dn in range(sites + 1)]


def sector_dimension(sites: int, sector: Sector) -> int:
    n_up, n_dn = sector
    if not (0 <= n_up <= sites and 0 <= n_dn <= sites):
        return 0
    return math.comb(sites, n_up) * math.comb(sites, n_dn)


def sector_states(sites: int, sector: Optional[Sector]) -> np.ndarray:
    """Sorted bit-mask basis of a sector (or of the whole Fock space for None)."""
    if sector is None:
        return np.arange(1 << (2 * sites), dtype=np.int64)
    n_up, n_dn = sector
    if sector_dimension(sites, sector) == 0:
        raise SectorEmpty(f"sector (N_up={n_up}, N_dn={n_dn}) is empty on {sites} sites")
    ups = [sum(1 << (2 * x) for x in c) for c in combinations(range(sites), n_up)]
    dns = [sum(1 << (2 * x + 1) for x in c) for c in combinations(range(sites), n_dn)]
    return np.array(sorted(u | d for u in ups for d in dns), dtype=np.int64)


def site_occupation(state: int, x: int) -> int:
    return ((state >> (2 * x)) & 1) + ((state >> (2 * x + 1)) & 1)


def _hop(state: int, to_orb: int, from_orb: int) -> Optional[tuple[int, int]]:
    """c†_{to} c_{from} on a bit-mask state: (new state, sign) or None."""
    if not (state >> from_orb) & 1:
        return None
    sign = -1 if (state & ((1 << from_orb) - 1)).bit_count() & 1 else 1
    mid = state ^ (1 << from_orb)
    if (mid >> to_orb) & 1:
        return None
    if (mid & ((1 << to_orb) - 1)).bit_count() & 1:
        sign = -sign
    return mid | (1 << to_orb), sign


def c_form_hopping_element(spec: LatticeSpec, state: int, x: int, y: int, spin: int) -> Optional[tuple[int, float]]:
    """-t C†_{xσ} C_{yσ} |state> with C = c f̄(N): f̄(N_y) on the input, f̄(N_x) on the output."""
    hopped = _hop(state, 2 * x + spin, 2 * y + spin)
    if hopped is None:
        return None
    new, sign = hopped
    f_bar = spec.f_bar
    return new, -spec.t * sign * f_bar[site_occupation(new, x)] * f_bar[site_occupation(state, y)]


def literal_hopping_element(spec: LatticeSpec, state: int, x: int, y: int, spin: int) -> Optional[tuple[int, float]]:
    """-t f̄(N_x) f̄(N_y + 1) c†_{xσ} c_{yσ} |state>, occupancy factors read after the hop."""
    hopped = _hop(state, 2 * x + spin, 2 * y + spin)
    if hopped is None:
        return None
    new, sign = hopped
    f_bar = spec.f_bar
    return new, -spec.t * sign * f_bar[site_occupation(new, x)] * f_bar[site_occupation(new, y) + 1]


def coulomb_energy(spec: LatticeSpec, state: int) -> float:
    U = spec.U_sites
    total = 0.0
    for x in range(spec.sites):
        n_up = (state >> (2 * x)) & 1
        n_dn = (state >> (2 * x + 1)) & 1
        total += U[x] * (n_up - 0.5) * (n_dn - 0.5)
    return total


@dataclass(frozen=True, eq=False)
class HubbardHamiltonian:
    matrix: sp.csr_matrix
    basis: np.ndarray
    sector: Optional[Sector]
    spec: LatticeSpec

    @property
    def dimension(self) -> int:
        return int(self.basis.size)


def build_deformed_hubbard(spec: LatticeSpec, sector: Optional[Sector] = None) -> HubbardHamiltonian:
    """
    Sector-restricted deformed Hubbard Hamiltonian as a CSR matrix.

    Args:
        spec (LatticeSpec): Lattice description.
        sector (tuple, optional): Overrides spec.sector; None with spec.sector
            None builds the full Fock space.

    Raises:
        SectorEmpty: If the sector has no states.
        DimensionTooLarge: If the sector exceeds MAX_SECTOR_DIM states.
    """
    sector = sector if sector is not None else spec.sector
    dim = (1 << (2 * spec.sites)) if sector is None else sector_dimension(spec.sites, sector)
    if sector is not None and dim == 0:
        raise SectorEmpty(f"sector {sector} is empty on {spec.sites} sites")
    if dim > MAX_SECTOR_DIM:
        raise DimensionTooLarge(f"sector dimension {dim} exceeds {MAX_SECTOR_DIM}")
    basis = sector_states(spec.sites, sector)
    index = {int(s): i for i, s in enumerate(basis)}
    rows, cols, vals = [], [], []
    for j, s in enumerate(basis):
        s = int(s)
        rows.append(j)
        cols.append(j)
        vals.append(coulomb_energy(spec, s))
        for x, y in spec.ordered_bonds:
            for spin in (0, 1):
                element = c_form_hopping_element(spec, s, x, y, spin)
                if element is None:
                    continue
                new, amp = element
                rows.append(index[new])
                cols.append(j)
                vals.append(amp)
    matrix = sp.csr_matrix((vals, (rows, cols)), shape=(dim, dim), dtype=float)
    logger.debug("Assembled Hubbard H: L=%d sector=%s dim=%d nnz=%d", spec.sites, sector, dim, matrix.nnz)
    return HubbardHamiltonian(matrix=matrix, basis=basis, sector=sector, spec=spec)


@dataclass(frozen=True)
class SpectrumResult:
    eigenvalues: np.ndarray
    sectors: tuple
    ground_energy: float
    hermiticity_residual: float
    per_sector: dict = field(default_factory=dict)

    def to_columns(self) -> str:
        buf = io.StringIO()
        buf.write("# n_up n_dn eigenvalue\n")
        for sector, values in self.per_sector.items():
            label = ("full", "full") if sector is None else sector
            for value in values:
                buf.write(f"{label[0]} {label[1]} {value:.12e}\n")
        return buf.getvalue()


def hermiticity_residual(matrix) -> float:
    diff = matrix - matrix.conj().T
    if sp.issparse(diff):
        return float(abs(diff).max()) if diff.nnz else 0.0
    return float(np.max(np.abs(diff))) if diff.size else 0.0


def diagonalize(H: Union[HubbardHamiltonian, np.ndarray, sp.spmatrix]) -> SpectrumResult:
    """
    Full real spectrum of a Hermitian matrix by dense eigensolve.

    Raises:
        NotHermitian: If |H - H†|_max exceeds HERMITICITY_TOL.
        DimensionTooLarge: If the matrix exceeds MAX_DENSE_DIM.
    """
    sector = H.sector if isinstance(H, HubbardHamiltonian) else None
    matrix = H.matrix if isinstance(H, HubbardHamiltonian) else H
    if matrix.shape[0] > MAX_DENSE_DIM:
        raise DimensionTooLarge(f"dense diagonalization limited to {MAX_DENSE_DIM} states, got {matrix.shape[0]}")
    residual = hermiticity_residual(matrix)
    if residual > HERMITICITY_TOL:
        raise NotHermitian(f"|H - H^dagger|_max = {residual:.3e}")
    dense = matrix.toarray() if sp.issparse(matrix) else np.asarray(matrix)
    eigenvalues = scipy.linalg.eigvalsh(dense)
    return SpectrumResult(
        eigenvalues=eigenvalues,
        sectors=(sector,),
        ground_energy=float(eigenvalues[0]),
        hermiticity_residual=residual,
        per_sector={sector: eigenvalues},
    )


def spectrum_all_sectors(spec: LatticeSpec, sector_list: Optional[Sequence[Sector]] = None, workers: int = 1) -> SpectrumResult:
    """Diagonalize every requested sector (all non-empty ones by default) and merge."""
    wanted = list(sector_list) if sector_list is not None else sectors(spec.sites)

    def solve(sector):
        return diagonalize(build_deformed_hubbard(spec, sector))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(solve, wanted))
    else:
        results = [solve(s) for s in wanted]
    per_sector = {s: r.eigenvalues for s, r in zip(wanted, results)}
    eigenvalues = np.sort(np.concatenate([r.eigenvalues for r in results]))
    return SpectrumResult(
        eigenvalues=eigenvalues,
        sectors=tuple(wanted),
        ground_energy=float(eigenvalues[0]),
        hermiticity_residual=max(r.hermiticity_residual for r in results),
        per_sector=per_sector,
    )


def hopping_amplitude_table(spec: LatticeSpec) -> np.ndarray:
    """
    Effective hopping amplitudes t f̄(n_x) f̄(n_y).

    Axis 0 is the occupancy of the destination site after the hop, axis 1
    the occupancy of the source site before the hop (= n_y after + 1). The
    reverse hop reads the transposed entry, so Hermiticity of H makes this
    table symmetric.
    """
    f_bar = spec.f_bar
    return spec.t * np.outer(f_bar, f_bar)
