"""
Truncated Fock-space matrices for boson and fermion modes.

Builds a, a†, N per mode (Jordan-Wigner strings for fermions), deformed
operators A = a f(N), A† = f(N) a†, and residual reports for the single-mode
relations and the SU_q(2) Jordan-Schwinger map. All identities that involve
a a† fail on the top level of a truncation, so every check is evaluated on an
interior subspace that drops the top `margin` levels of each boson mode.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Optional, Sequence, Union

import numpy as np
import scipy.sparse as sp

from qdeform.deform_core import (
    DeformationKind,
    DeformationSpec,
    LeptonFitResult,
    Statistics,
    sinh_ratio,
)
from qdeform.errors import DimensionTooSmall, DomainError, IncompatibleStatistics

logger = logging.getLogger(__name__)

IDENTITY_TOL = 1e-10
SPECTRUM_TOL = 1e-10
PARITY = np.diag([1.0, -1.0])

Coefficients = Union[Sequence[float], Callable[[int], float], np.ndarray]


def ladder(d: int) -> np.ndarray:
    """Single-mode annihilator with a[n-1, n] = sqrt(n) on d levels."""
    return np.diag(np.sqrt(np.arange(1, d, dtype=float)), k=1).astype(complex)


def embed_operator(op, position: int, dims: Sequence[int], parity_positions: Sequence[int] = (), sparse: bool = False):
    """
    Place a single-mode operator at `position` of a tensor product.

    Mode 0 is the most significant factor. Modes listed in `parity_positions`
    receive the fermion parity diag(1, -1) instead of the identity (the
    Jordan-Wigner string).

    Args:
        op: Local operator on dims[position] levels.
        position (int): Mode index.
        dims (Sequence[int]): Local dimension per mode.
        parity_positions (Sequence[int]): Modes carrying the parity string.
        sparse (bool): Return a scipy.sparse CSR matrix instead of a dense array.

    Returns:
        Dense ndarray or CSR matrix of size prod(dims).
    """
    kron = sp.kron if sparse else np.kron
    eye = (lambda n: sp.identity(n, format="csr")) if sparse else np.eye
    parity = sp.csr_matrix(PARITY) if sparse else PARITY
    local = sp.csr_matrix(op) if sparse else op
    out = None
    for i, d in enumerate(dims):
        if i == position:
            factor = local
        elif i in parity_positions:
            factor = parity
        else:
            factor = eye(d)
        out = factor if out is None else kron(out, factor)
    return out.tocsr() if sparse else out


@dataclass(frozen=True)
class Mode:
    statistics: Statistics
    label: str
    cutoff: int


@dataclass(frozen=True, eq=False)
class FockRep:
    """
    Matrices a_i, a†_i, N_i for every mode on the full tensor-product space.

    a†_i is the conjugate transpose of a_i bit for bit. N_i is built as an
    exact integer diagonal; a†_i a_i reproduces it up to sqrt rounding.
    """

    modes: tuple[Mode, ...]
    annihilators: tuple[np.ndarray, ...]
    creators: tuple[np.ndarray, ...]
    numbers: tuple[np.ndarray, ...]
    interior_margin: int = 1

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(m.cutoff for m in self.modes)

    @property
    def dimension(self) -> int:
        return int(np.prod(self.dims))

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(m.label for m in self.modes)

    @cached_property
    def occupations(self) -> np.ndarray:
        """(dimension, n_modes) integer occupation table in basis order."""
        grids = np.indices(self.dims).reshape(len(self.dims), -1)
        return grids.T.copy()

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise ValueError(f"Unknown mode label {label!r} (modes: {self.labels})") from None

    def a(self, label: str) -> np.ndarray:
        return self.annihilators[self.index(label)]

    def adag(self, label: str) -> np.ndarray:
        return self.creators[self.index(label)]

    def number(self, label: str) -> np.ndarray:
        return self.numbers[self.index(label)]

    @property
    def total_number(self) -> np.ndarray:
        return sum(self.numbers)

    def interior_mask(self, margin: Optional[int] = None) -> np.ndarray:
        """Basis states whose boson occupations stay `margin` levels below each cutoff."""
        margin = self.interior_margin if margin is None else margin
        mask = np.ones(self.dimension, dtype=bool)
        for i, mode in enumerate(self.modes):
            if mode.statistics is Statistics.BOSON:
                mask &= self.occupations[:, i] <= mode.cutoff - 1 - margin
        return mask


def build_rep(modes: Sequence[Mode], interior_margin: int = 1) -> FockRep:
    """Assemble a FockRep for an arbitrary list of boson/fermion modes."""
    modes = tuple(modes)
    dims = [m.cutoff for m in modes]
    annihilators, creators, numbers = [], [], []
    for i, mode in enumerate(modes):
        if mode.statistics is Statistics.FERMION and mode.cutoff != 2:
            raise ValueError(f"fermion mode {mode.label!r} must have 2 levels")
        string = [j for j in range(i) if modes[j].statistics is Statistics.FERMION] \
            if mode.statistics is Statistics.FERMION else []
        a = embed_operator(ladder(mode.cutoff), i, dims, string)
        annihilators.append(a)
        creators.append(a.conj().T)
        numbers.append(embed_operator(np.diag(np.arange(mode.cutoff, dtype=float)), i, dims).astype(complex))
    logger.debug("Built Fock representation: modes=%s dimension=%d", [m.label for m in modes], int(np.prod(dims)))
    return FockRep(modes, tuple(annihilators), tuple(creators), tuple(numbers), interior_margin)


def build_boson_rep(d: int, interior_margin: int = 1) -> FockRep:
    """
    Single boson mode truncated to d levels.

    Raises:
        DimensionTooSmall: If d < 2.
    """
    return build_boson_modes(1, d, interior_margin=interior_margin)


def build_boson_modes(count: int, d: int, labels: Optional[Sequence[str]] = None, interior_margin: int = 1) -> FockRep:
    if d < 2:
        raise DimensionTooSmall(f"boson cutoff d must be >= 2, got {d}")
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    labels = list(labels) if labels else (["a"] if count == 1 else [f"a{i + 1}" for i in range(count)])
    return build_rep([Mode(Statistics.BOSON, lab, d) for lab in labels], interior_margin)


def build_fermion_modes(count: int, labels: Optional[Sequence[str]] = None) -> FockRep:
    """Jordan-Wigner fermions on 2**count states; {c_i, c†_j} = δ_ij exactly."""
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    labels = list(labels) if labels else (["c"] if count == 1 else [f"c{i + 1}" for i in range(count)])
    return build_rep([Mode(Statistics.FERMION, lab, 2) for lab in labels], interior_margin=0)


@dataclass(frozen=True, eq=False)
class DeformedOperators:
    A: np.ndarray
    A_dag: np.ndarray
    f_diag: np.ndarray
    label: str
    rep: FockRep
    spec: DeformationSpec

    @property
    def statistics(self) -> Statistics:
        return self.rep.modes[self.rep.index(self.label)].statistics

    @property
    def number(self) -> np.ndarray:
        return self.rep.number(self.label)

    @property
    def occupation(self) -> np.ndarray:
        return self.rep.occupations[:, self.rep.index(self.label)]


def deform(rep: FockRep, spec: DeformationSpec, mode: Optional[str] = None) -> DeformedOperators:
    """
    A = a f(N), A† = f(N) a† for one mode of `rep`.

    f(N) is diagonal in the occupation basis, so the products reduce to column
    (row) scaling. A† is taken as the conjugate transpose of A, which equals
    f(N) a† entry for entry.

    Raises:
        IncompatibleStatistics: If the deformation is fermionic and the mode bosonic, or vice versa.
    """
    label = mode if mode is not None else rep.labels[0]
    idx = rep.index(label)
    statistics = rep.modes[idx].statistics
    if spec.statistics is not statistics:
        raise IncompatibleStatistics(
            f"{spec.kind.value} deformation is {spec.statistics.value}ic, mode {label!r} is {statistics.value}ic"
        )
    occ = rep.occupations[:, idx]
    if occ.max() > spec.max_occupation:
        raise DomainError(f"deformation tabulated up to n={spec.max_occupation}, mode {label!r} reaches {occ.max()}")
    f_diag = np.sqrt(np.asarray(spec.f_squared(occ), dtype=float))
    A = rep.annihilators[idx] * f_diag[np.newaxis, :]
    return DeformedOperators(A=A, A_dag=A.conj().T, f_diag=f_diag, label=label, rep=rep, spec=spec)


@dataclass(frozen=True)
class ResidualReport:
    identity: str
    max_abs_residual: float
    relative_residual: float
    scale: float
    interior_dimension: int
    tolerance: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            "identity": self.identity,
            "max_abs_residual": self.max_abs_residual,
            "relative_residual": self.relative_residual,
            "scale": self.scale,
            "interior_dimension": self.interior_dimension,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


def _restrict(matrix, mask: np.ndarray) -> np.ndarray:
    if sp.issparse(matrix):
        idx = np.flatnonzero(mask)
        return matrix[idx][:, idx].toarray()
    return matrix[np.ix_(mask, mask)]


def residual_report(identity: str, residual, terms: Sequence, mask: np.ndarray, tolerance: float = IDENTITY_TOL) -> ResidualReport:
    """
    Judge `residual` on the interior `mask` relative to the size of its terms.

    The scale is the largest absolute interior entry among `terms`, floored at
    1, so deformed matrices with entries near e^30 are compared at matching
    precision.
    """
    interior = int(mask.sum())
    if interior < 1:
        raise DimensionTooSmall(f"interior subspace for {identity!r} is empty; raise the cutoff or lower the margin")
    sub = _restrict(residual, mask)
    max_abs = float(np.abs(sub).max()) if sub.size else 0.0
    scale = max([1.0] + [float(np.abs(_restrict(t, mask)).max()) for t in terms])
    rel = max_abs / scale
    return ResidualReport(identity, max_abs, rel, scale, interior, tolerance, bool(rel < tolerance))


def _diag_values(values: Coefficients, occ: np.ndarray, mask: np.ndarray, name: str) -> np.ndarray:
    """Evaluate g(n)/h(n) on every basis state's occupation."""
    if callable(values):
        return np.array([values(int(n)) for n in occ], dtype=complex)
    table = np.asarray(values, dtype=float)
    needed = int(occ[mask].max()) if mask.any() else 0
    if table.size <= needed:
        raise ValueError(f"{name} must be defined up to n={needed}, got {table.size} values")
    out = np.zeros(occ.shape, dtype=complex)
    inside = occ < table.size
    out[inside] = table[occ[inside]]
    return out


def relation_residual_matrix(ops: DeformedOperators, g: Coefficients, h: Coefficients, margin: Optional[int] = None):
    """
    Residual matrix of A A† - g(N) A† A - h(N) (bosons) or C C† + ḡ(N) C† C - h̄(N) (fermions).

    Returns:
        tuple: (residual, terms, mask)
    """
    mask = ops.rep.interior_mask(margin)
    occ = ops.occupation
    g_diag = _diag_values(g, occ, mask, "g")
    h_diag = _diag_values(h, occ, mask, "h")
    AAd = ops.A @ ops.A_dag
    AdA = ops.A_dag @ ops.A
    sign = 1.0 if ops.statistics is Statistics.FERMION else -1.0
    second = sign * g_diag[:, np.newaxis] * AdA
    H = np.diag(h_diag)
    return AAd + second - H, [AAd, second, H], mask


def check_qboson_relation(ops: DeformedOperators, lam: float, margin: Optional[int] = None) -> ResidualReport:
    """A A† - q⁻¹ A† A - q^N on the interior (top level dropped by default)."""
    q = np.exp(lam)
    if ops.statistics is not Statistics.BOSON:
        raise IncompatibleStatistics("q-boson relation needs a bosonic mode")
    residual, terms, mask = relation_residual_matrix(ops, lambda n: 1.0 / q, lambda n: q ** n, margin)
    return residual_report("qboson: A A+ - q^-1 A+ A = q^N", residual, terms, mask)


def check_general_relation(ops: DeformedOperators, g: Coefficients, h: Coefficients, margin: Optional[int] = None) -> ResidualReport:
    residual, terms, mask = relation_residual_matrix(ops, g, h, margin)
    name = "general: C C+ + g(N) C+ C = h(N)" if ops.statistics is Statistics.FERMION else "general: A A+ - g(N) A+ A = h(N)"
    return residual_report(name, residual, terms, mask)


def check_bracket_relation(ops: DeformedOperators, lam: float, margin: int = 0) -> ResidualReport:
    """Supplementary q-oscillator relation A†A = [N]_q."""
    mask = ops.rep.interior_mask(margin)
    AdA = ops.A_dag @ ops.A
    bracket = np.diag(np.asarray(sinh_ratio(ops.occupation, lam), dtype=complex))
    return residual_report("bracket: A+ A = [N]_q", AdA - bracket, [AdA, bracket], mask)


def check_number_relations(rep: FockRep, ops: Sequence[DeformedOperators], margin: Optional[int] = None) -> list[ResidualReport]:
    """[N_i, A†_j] = δ_ij A†_i and [N_i, A_j] = -δ_ij A_i for every pair of deformed modes."""
    mask = rep.interior_mask(margin)
    reports = []
    for i, label in enumerate(rep.labels):
        N = rep.numbers[i]
        for op in ops:
            same = op.label == label
            comm_dag = N @ op.A_dag - op.A_dag @ N
            comm = N @ op.A - op.A @ N
            rhs_dag = op.A_dag if same else np.zeros_like(op.A_dag)
            rhs = -op.A if same else np.zeros_like(op.A)
            reports.append(residual_report(f"[N_{label}, A+_{op.label}]", comm_dag - rhs_dag, [comm_dag, rhs_dag], mask))
            reports.append(residual_report(f"[N_{label}, A_{op.label}]", comm - rhs, [comm, rhs], mask))
    return reports


@dataclass(frozen=True)
class DeformedSpectrum:
    levels: np.ndarray
    closed_form: np.ndarray
    matrix_eigenvalues: np.ndarray
    max_deviation: float
    tolerance: float
    passed: bool

    @property
    def level_spacings(self) -> np.ndarray:
        return np.diff(self.closed_form)


def deformed_spectrum(spec: DeformationSpec, n_max: int, margin: int = 4) -> DeformedSpectrum:
    """
    Eigenvalues n f²(n) of H = A†A, cross-checked against the matrix A†A.

    The matrix lives on n_max + 1 + margin levels (fewer when a table is
    shorter); its interior block over levels 0..n_max is diagonalized and
    matched to the closed form in sorted order.
    """
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    if spec.statistics is not Statistics.BOSON:
        raise IncompatibleStatistics("deformed_spectrum is defined for boson deformations")
    margin = int(min(margin, spec.max_occupation - n_max))
    if margin < 0:
        raise DomainError(f"deformation tabulated up to n={spec.max_occupation} < n_max={n_max}")
    levels = np.arange(n_max + 1)
    closed = np.asarray(spec.spectrum(levels), dtype=float)
    rep = build_boson_rep(n_max + 1 + margin, interior_margin=margin)
    ops = deform(rep, spec)
    H = ops.A_dag @ ops.A
    block = H[: n_max + 1, : n_max + 1]
    eig = np.linalg.eigvalsh(block)
    deviation = float(np.max(np.abs(np.sort(closed) - eig)))
    scale = max(1.0, float(np.max(np.abs(eig))))
    return DeformedSpectrum(levels, closed, eig, deviation, SPECTRUM_TOL, bool(deviation <= SPECTRUM_TOL * scale))


def check_jordan_schwinger(statistics: Statistics, spec: DeformationSpec, d: int = 12, margin: int = 2) -> list[ResidualReport]:
    """
    SU_q(2) generators from two deformed modes.

    S+ = A1† A2, S- = A2† A1, S3 = (N1 - N2)/2; checks [S3, S±] = ±S± and
    [S+, S-] = [2 S3]_q with [x]_q = (q^x - q^-x)/(q - q^-1) applied to the
    diagonal of S3.
    """
    if spec.kind not in (DeformationKind.QBOSON, DeformationKind.QFERMION):
        raise ValueError("Jordan-Schwinger check needs a q-deformation (q-boson or q-fermion)")
    statistics = Statistics(statistics)
    if statistics is Statistics.BOSON:
        rep = build_boson_modes(2, d, interior_margin=margin)
    else:
        rep = build_fermion_modes(2)
    first, second = (deform(rep, spec, label) for label in rep.labels)
    s_plus = first.A_dag @ second.A
    s_minus = second.A_dag @ first.A
    s3_diag = 0.5 * (first.occupation - second.occupation)
    S3 = np.diag(s3_diag.astype(complex))
    bracket = np.diag(np.asarray(sinh_ratio(2.0 * s3_diag, spec.lam), dtype=complex))
    mask = rep.interior_mask()

    raise_comm = S3 @ s_plus - s_plus @ S3
    lower_comm = S3 @ s_minus - s_minus @ S3
    pm_comm = s_plus @ s_minus - s_minus @ s_plus
    tag = statistics.value
    return [
        residual_report(f"{tag} JS: [S3, S+] = S+", raise_comm - s_plus, [raise_comm, s_plus], mask),
        residual_report(f"{tag} JS: [S3, S-] = -S-", lower_comm + s_minus, [lower_comm, s_minus], mask),
        residual_report(f"{tag} JS: [S+, S-] = [2 S3]_q", pm_comm - bracket, [pm_comm, bracket], mask),
    ]


def lepton_hamiltonian_spectrum(fit: LeptonFitResult, n_max: int, margin: int = 2) -> np.ndarray:
    """Lowest n_max + 1 eigenvalues of k A†A + m_e on a q-boson Fock space."""
    rep = build_boson_rep(n_max + 1 + margin, interior_margin=margin)
    ops = deform(rep, DeformationSpec.q_boson(fit.lam))
    H = fit.k * (ops.A_dag @ ops.A) + fit.m_e * np.eye(rep.dimension)
    return np.linalg.eigvalsh(H[: n_max + 1, : n_max + 1])
