"""
Charged boson field with a charge-dependent deformation.

Each discrete mode k carries two species, + (charge +1) and - (charge -1),
truncated at `cutoff` quanta. With Q = Σ_k (N+(k) - N-(k)) the deformed
operators are

    A±(k) = a±(k) f(k, Q),   f²(k, q) = (k² + M²(q)) / (k² + m0²),

and H = Σ_k k0 (A+†A+ + A-†A-) with k0 = sqrt(k² + m0²). H is diagonal in the
occupation basis with E = Σ_k (k² + M²(q)) / k0 · (n+(k) + n-(k)).

Slots are ordered (+, k0), (-, k0), (+, k1), (-, k1), ... with slot 0 the most
significant tensor factor. Operators are scipy.sparse CSR matrices.
"""

from __future__ import annotations

import io
import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Mapping, Optional, Sequence, Union

import numpy as np
import scipy.sparse as sp

from qdeform.errors import (
    DimensionTooLarge,
    DimensionTooSmall,
    DomainError,
    NegativeMassSquared,
    SingularCoefficient,
)
from qdeform.fock_algebra import IDENTITY_TOL, ResidualReport, embed_operator, ladder, residual_report

logger = logging.getLogger(__name__)

MAX_FIELD_DIM = 1_000_000
ENERGY_TOL = 1e-12
SPECIES = ("+", "-")
MASS_PRESETS = ("constant", "quadratic", "abs")


@dataclass(frozen=True)
class MassSquared:
    """
    M²(q) as polynomial coefficients (increasing powers) or a table over q_min, q_min + 1, ...

    Table lookups outside the tabulated range give nan.
    """

    coefficients: tuple[float, ...] = ()
    table: tuple[float, ...] = ()
    q_min: int = 0

    def __post_init__(self):
        if bool(self.coefficients) == bool(self.table):
            raise ValueError("MassSquared needs exactly one of coefficients or table")
        object.__setattr__(self, "coefficients", tuple(float(c) for c in self.coefficients))
        object.__setattr__(self, "table", tuple(float(v) for v in self.table))

    @classmethod
    def polynomial(cls, *coefficients: float) -> "MassSquared":
        return cls(coefficients=coefficients)

    @classmethod
    def constant(cls, value: float) -> "MassSquared":
        return cls(coefficients=(value,))

    @classmethod
    def from_table(cls, values: Mapping[int, float]) -> "MassSquared":
        charges = sorted(values)
        if charges != list(range(charges[0], charges[-1] + 1)):
            raise ValueError("M² table must cover a contiguous charge range")
        return cls(table=tuple(values[q] for q in charges), q_min=charges[0])

    @classmethod
    def tabulate(cls, func: Callable[[int], float], q_min: int, q_max: int) -> "MassSquared":
        return cls.from_table({q: func(q) for q in range(q_min, q_max + 1)})

    @classmethod
    def preset(cls, name: str, m0: float, window: tuple[int, int]) -> "MassSquared":
        """Named choices: constant m0², quadratic m0² + q², abs m0²(1 + |q|)."""
        m0sq = m0 * m0
        if name == "constant":
            return cls.constant(m0sq)
        if name == "quadratic":
            return cls.polynomial(m0sq, 0.0, 1.0)
        if name == "abs":
            return cls.tabulate(lambda q: m0sq * (1 + abs(q)), *window)
        raise ValueError(f"Unknown M² preset {name!r}; expected one of {MASS_PRESETS}")

    def __call__(self, q):
        q = np.asarray(q)
        if self.coefficients:
            return np.polynomial.polynomial.polyval(q.astype(float), self.coefficients)
        values = np.asarray(self.table)
        idx = q.astype(int) - self.q_min
        inside = (idx >= 0) & (idx < values.size)
        out = np.full(q.shape, np.nan)
        out[inside] = values[idx[inside]]
        return out

    def to_dict(self) -> dict:
        if self.coefficients:
            return {"coefficients": list(self.coefficients)}
        return {"q_min": self.q_min, "table": list(self.table)}


@dataclass(frozen=True)
class FieldConfig:
    modes: tuple[float, ...]
    m0: float
    mass_squared: MassSquared
    cutoff: int = 4
    interior_margin: int = 1

    def __post_init__(self):
        object.__setattr__(self, "modes", tuple(float(k) for k in self.modes))
        if not self.modes:
            raise ValueError("FieldConfig needs at least one mode")
        if any(k < 0 or not math.isfinite(k) for k in self.modes):
            raise ValueError(f"mode momenta must be finite and >= 0, got {self.modes}")
        if not self.m0 > 0:
            raise ValueError(f"m0 must be > 0, got {self.m0}")
        if self.cutoff < 1:
            raise ValueError(f"cutoff must be >= 1, got {self.cutoff}")
        if not 0 <= self.interior_margin <= self.cutoff:
            raise ValueError(f"interior_margin must lie in [0, cutoff], got {self.interior_margin}")
        if self.dimension > MAX_FIELD_DIM:
            raise DimensionTooLarge(f"field dimension {self.dimension} exceeds {MAX_FIELD_DIM}")
        lo, hi = self.charge_window
        charges = np.arange(lo, hi + 1)
        m2 = self.mass_squared(charges)
        if np.any(~np.isfinite(m2)):
            raise DomainError(f"M² is not defined on the whole reachable charge window [{lo}, {hi}]")
        if np.any(m2 < 0):
            bad = charges[m2 < 0].tolist()
            raise NegativeMassSquared(f"M²(q) < 0 for reachable charges {bad}")

    @property
    def slots(self) -> int:
        return 2 * len(self.modes)

    @property
    def dims(self) -> tuple[int, ...]:
        return (self.cutoff + 1,) * self.slots

    @property
    def dimension(self) -> int:
        return (self.cutoff + 1) ** self.slots

    @property
    def charge_window(self) -> tuple[int, int]:
        reach = self.cutoff * len(self.modes)
        return -reach, reach

    @property
    def k0(self) -> np.ndarray:
        k = np.asarray(self.modes)
        return np.sqrt(k * k + self.m0**2)

    def to_dict(self) -> dict:
        return {
            "modes": list(self.modes),
            "m0": self.m0,
            "mass_squared": self.mass_squared.to_dict(),
            "cutoff": self.cutoff,
            "interior_margin": self.interior_margin,
        }


def f_squared_field(k: float, q, cfg: FieldConfig):
    """f²(k, q) = (k² + M²(q)) / (k² + m0²)."""
    return (k * k + cfg.mass_squared(q)) / (k * k + cfg.m0**2)


def effective_dispersion(k: float, q, cfg: FieldConfig):
    """Energy (k² + M²(q)) / sqrt(k² + m0²) of one quantum of mode k at charge q."""
    return (k * k + cfg.mass_squared(q)) / math.sqrt(k * k + cfg.m0**2)


def state_energy(cfg: FieldConfig, occupations: Sequence[int]) -> float:
    """Closed-form E of one occupation state given in slot order."""
    occ = np.asarray(occupations, dtype=int)
    n_plus, n_minus = occ[0::2], occ[1::2]
    q = int(n_plus.sum() - n_minus.sum())
    return float(sum(effective_dispersion(k, q, cfg) * (p + m) for k, p, m in zip(cfg.modes, n_plus, n_minus)))


Slot = tuple[str, int]


@dataclass(frozen=True, eq=False)
class FieldOperators:
    cfg: FieldConfig
    occupations: np.ndarray
    charge: np.ndarray
    a: dict = field(repr=False)
    A: dict = field(repr=False)
    f_diag: dict = field(repr=False)

    @property
    def dimension(self) -> int:
        return self.cfg.dimension

    @cached_property
    def charge_matrix(self) -> sp.csr_matrix:
        return sp.diags(self.charge.astype(complex), format="csr")

    def slot(self, species: str, mode: int) -> int:
        if species not in SPECIES or not 0 <= mode < len(self.cfg.modes):
            raise ValueError(f"unknown slot ({species!r}, {mode})")
        return 2 * mode + SPECIES.index(species)

    def adag(self, species: str, mode: int) -> sp.csr_matrix:
        return self.a[(species, mode)].conj().T.tocsr()

    def A_dag(self, species: str, mode: int) -> sp.csr_matrix:
        return self.A[(species, mode)].conj().T.tocsr()

    def number(self, species: str, mode: int) -> np.ndarray:
        return self.occupations[:, self.slot(species, mode)]

    def interior_mask(self, margin: Optional[int] = None) -> np.ndarray:
        """States at least `margin` quanta below the cutoff in every slot."""
        margin = self.cfg.interior_margin if margin is None else margin
        return np.all(self.occupations <= self.cfg.cutoff - margin, axis=1)

    def index(self, occupations: Sequence[int]) -> int:
        occ = tuple(int(n) for n in occupations)
        if len(occ) != self.cfg.slots or any(not 0 <= n <= self.cfg.cutoff for n in occ):
            raise DomainError(f"occupations {occ} are outside the truncated space")
        return int(np.ravel_multi_index(occ, self.cfg.dims))


def build_field(cfg: FieldConfig) -> FieldOperators:
    """
    Assemble a±(k), Q and the deformed A±(k) = a±(k) f(k, Q).

    A f(Q) factor on the right scales the columns of a by f evaluated on the
    charge of each basis state.
    """
    dims = cfg.dims
    occupations = np.stack(np.unravel_index(np.arange(cfg.dimension), dims), axis=1)
    charge = occupations[:, 0::2].sum(axis=1) - occupations[:, 1::2].sum(axis=1)
    local = ladder(cfg.cutoff + 1)
    a, A, f_diag = {}, {}, {}
    for mode, k in enumerate(cfg.modes):
        f_diag[mode] = np.sqrt(f_squared_field(k, charge, cfg))
        scale = sp.diags(f_diag[mode].astype(complex), format="csr")
        for s, species in enumerate(SPECIES):
            op = embed_operator(local, 2 * mode + s, dims, sparse=True)
            a[(species, mode)] = op
            A[(species, mode)] = (op @ scale).tocsr()
    logger.debug("Built field: %d modes, cutoff %d, dimension %d", len(cfg.modes), cfg.cutoff, cfg.dimension)
    return FieldOperators(cfg=cfg, occupations=occupations, charge=charge, a=a, A=A, f_diag=f_diag)


def require_interior(ops: FieldOperators, margin: Optional[int] = None) -> np.ndarray:
    """Interior mask for `margin`; raises DimensionTooSmall when it is empty."""
    mask = ops.interior_mask(margin)
    if not mask.any():
        raise DimensionTooSmall("field interior is empty; raise the cutoff or lower the margin")
    return mask


def check_charge_relations(ops: FieldOperators, margin: Optional[int] = None) -> list[ResidualReport]:
    """[Q, a+†] = a+†, [Q, a-†] = -a-† and [Q, A+†] = A+† per mode."""
    Q = ops.charge_matrix
    mask = require_interior(ops, margin)
    reports = []
    for mode in range(len(ops.cfg.modes)):
        for species, sign in (("+", 1.0), ("-", -1.0)):
            for name, op in (("a", ops.adag(species, mode)), ("A", ops.A_dag(species, mode))):
                comm = Q @ op - op @ Q
                rhs = sign * op
                reports.append(
                    residual_report(f"[Q, {name}{species}^dag(k{mode})] = {'+' if sign > 0 else '-'}{name}{species}^dag",
                                    comm - rhs, [comm, rhs], mask, tolerance=ENERGY_TOL)
                )
    return reports


@dataclass(frozen=True, eq=False)
class FieldHamiltonian:
    matrix: sp.csr_matrix
    closed_form: np.ndarray
    charge: np.ndarray
    offdiagonal_norm: float
    max_deviation: float
    scale: float
    tolerance: float = ENERGY_TOL

    @property
    def passed(self) -> bool:
        return self.offdiagonal_norm <= self.tolerance * self.scale and self.max_deviation <= self.tolerance * self.scale

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.sort(self.matrix.diagonal().real)

    def to_columns(self) -> str:
        buf = io.StringIO()
        data = np.column_stack([np.arange(self.closed_form.size), self.charge, self.closed_form, self.matrix.diagonal().real])
        np.savetxt(buf, data, fmt=["%d", "%d", "%.15e", "%.15e"], header="state charge E_closed E_matrix")
        return buf.getvalue()


def hamiltonian(ops: FieldOperators) -> FieldHamiltonian:
    """H = Σ_k k0 (A+†A+ + A-†A-) with the closed-form diagonal alongside."""
    cfg = ops.cfg
    H = sp.csr_matrix((cfg.dimension, cfg.dimension), dtype=complex)
    closed = np.zeros(cfg.dimension)
    for mode, (k, k0) in enumerate(zip(cfg.modes, cfg.k0)):
        quanta = ops.number("+", mode) + ops.number("-", mode)
        closed += effective_dispersion(k, ops.charge, cfg) * quanta
        for species in SPECIES:
            A = ops.A[(species, mode)]
            H = H + k0 * (A.conj().T @ A)
    H = H.tocsr()
    diag = H.diagonal()
    off = H - sp.diags(diag, format="csr")
    off_norm = float(np.abs(off.data).max()) if off.nnz else 0.0
    deviation = float(np.max(np.abs(diag - closed)))
    scale = max(1.0, float(np.max(np.abs(closed))))
    return FieldHamiltonian(H, closed, ops.charge, off_norm, deviation, scale)


@dataclass(frozen=True)
class ExcitationEnergy:
    closed_form: float
    matrix: float
    charge_before: int
    charge_after: int
    quantum_energy: float


def excitation_energy(ops: FieldOperators, occupations: Sequence[int], mode: int, species: str,
                      H: Optional[FieldHamiltonian] = None) -> ExcitationEnergy:
    """
    Cost of adding one (species, mode) quantum to an occupation state.

    `quantum_energy` is the dispersion (k² + M²(q')) / k0 at the new charge q';
    the remainder of the cost re-prices the quanta already present.
    """
    H = H or hamiltonian(ops)
    before = np.asarray(occupations, dtype=int)
    after = before.copy()
    after[ops.slot(species, mode)] += 1
    i, j = ops.index(before), ops.index(after)
    diag = H.matrix.diagonal().real
    q_after = int(ops.charge[j])
    return ExcitationEnergy(
        closed_form=state_energy(ops.cfg, after) - state_energy(ops.cfg, before),
        matrix=float(diag[j] - diag[i]),
        charge_before=int(ops.charge[i]),
        charge_after=q_after,
        quantum_energy=float(effective_dispersion(ops.cfg.modes[mode], q_after, ops.cfg)),
    )


def _coefficient(num: np.ndarray, den: np.ndarray) -> sp.csr_matrix:
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = num / den
    ratio[~np.isfinite(ratio)] = 0.0
    return sp.diags(ratio.astype(complex), format="csr")


def verify_deformed_relations(ops: FieldOperators, k: int, k_prime: int, margin: Optional[int] = None) -> list[ResidualReport]:
    """
    The four deformed field relations between modes k and k'.

        A±(k) A±†(k') - C±(Q) A±†(k') A±(k) = f²(k, Q ± 1) δ_kk'
        A+(k) A-†(k') - C2(Q) A-†(k') A+(k) = 0
        A-(k) A+†(k') - C3(Q) A+†(k') A-(k) = 0

    The charge-diagonal coefficients multiply the second term from the left:
    C± = f(k,Q±1) f(k',Q±1) / (f(k,Q) f(k',Q)),
    C2 = f(k,Q+1) f(k',Q+1) / (f(k,Q+2) f(k',Q)),
    C3 = f(k,Q-1) f(k',Q-1) / (f(k,Q-2) f(k',Q)).
    Coefficients that fall outside the charge window are set to zero; they
    only multiply rows outside the interior.

    Raises:
        SingularCoefficient: If f(k, q) or f(k', q) vanishes on a reachable charge.
        DimensionTooSmall: If no state lies `margin` levels below the cutoff.
    """
    cfg = ops.cfg
    lo, hi = cfg.charge_window
    window = np.arange(lo, hi + 1)
    kk, kp = cfg.modes[k], cfg.modes[k_prime]
    for idx, mom in ((k, kk), (k_prime, kp)):
        if np.any(f_squared_field(mom, window, cfg) <= 0.0):
            raise SingularCoefficient(f"f(k{idx}, q) vanishes on the reachable charge window")

    def f(mom, shift):
        values = np.sqrt(f_squared_field(mom, ops.charge + shift, cfg))
        outside = (ops.charge + shift < lo) | (ops.charge + shift > hi)
        values[outside] = np.nan
        return values

    mask = require_interior(ops, margin)
    delta = 1.0 if k == k_prime else 0.0
    reports = []

    def relation(name, left, right_dag, second_left_dag, second_right, coeff, rhs_diag):
        first = left @ right_dag
        second = coeff @ (second_left_dag @ second_right)
        rhs = sp.diags(rhs_diag.astype(complex), format="csr")
        reports.append(residual_report(name, first - second - rhs, [first, second, rhs], mask, tolerance=IDENTITY_TOL))

    A_p, A_m = ops.A[("+", k)], ops.A[("-", k)]
    Ad_p, Ad_m = ops.A_dag("+", k_prime), ops.A_dag("-", k_prime)
    tag = f"k{k},k{k_prime}"
    for species, shift, A, Ad in (("+", 1, A_p, Ad_p), ("-", -1, A_m, Ad_m)):
        coeff = _coefficient(f(kk, shift) * f(kp, shift), f(kk, 0) * f(kp, 0))
        rhs = delta * np.nan_to_num(f(kk, shift) ** 2)
        relation(f"[{tag}] A{species} A{species}^dag - C A{species}^dag A{species} = f^2(k,Q{shift:+d}) delta",
                 A, Ad, Ad, A, coeff, rhs)
    zero = np.zeros(cfg.dimension)
    relation(f"[{tag}] A+ A-^dag - C A-^dag A+ = 0", A_p, Ad_m, Ad_m, A_p,
             _coefficient(f(kk, 1) * f(kp, 1), f(kk, 2) * f(kp, 0)), zero)
    relation(f"[{tag}] A- A+^dag - C A+^dag A- = 0", A_m, Ad_p, Ad_p, A_m,
             _coefficient(f(kk, -1) * f(kp, -1), f(kk, -2) * f(kp, 0)), zero)
    return reports


def verify_all_mode_pairs(ops: FieldOperators, margin: Optional[int] = None) -> list[ResidualReport]:
    n = len(ops.cfg.modes)
    return [r for k in range(n) for kp in range(n) for r in verify_deformed_relations(ops, k, kp, margin)]
