"""
Scalar layer of the deformed oscillator algebras.

Deformation functions f²(n), the (g, h) -> f consistency solvers for bosons
and fermions, and the closed-form lepton-spectrum fit. Everything here is a
pure function of its arguments.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Callable, Sequence, Union

import numpy as np

from qdeform.errors import DomainError, NonPositive

logger = logging.getLogger(__name__)

# Tolerance policy
REL_TOL = 1e-12
CONSISTENCY_TOL = 1e-9

# CODATA/PDG lepton masses (MeV), used as CLI defaults
ELECTRON_MASS_MEV = 0.511
MUON_MASS_MEV = 105.658
TAU_MASS_MEV = 1776.86

TableLike = Union[Sequence[float], Callable[[int], float], np.ndarray]


class Statistics(str, Enum):
    BOSON = "boson"
    FERMION = "fermion"


class DeformationKind(str, Enum):
    QBOSON = "qboson"
    QFERMION = "qfermion"
    CUSTOM = "custom"
    FROM_GH = "from_gh"


def sinh_ratio(x, lam: float):
    """
    Evaluate sinh(λx)/sinh(λ) without intermediate overflow.

    The ratio is even in λ and odd in x, equals x at λ = 0, and coincides with
    the q-bracket [x]_q for q = e^λ. The exponentials are factored as
    e^{|λ|(|x|-1)} (1 - e^{-2|λ||x|}) / (1 - e^{-2|λ|}) so the result only
    overflows when the ratio itself does.

    Args:
        x (float or array): Argument (integer occupations or real amplitudes).
        lam (float): Deformation parameter λ = ln q.

    Returns:
        float or np.ndarray: sinh(λx)/sinh(λ), same shape as x.
    """
    arr = np.asarray(x, dtype=float)
    a = abs(float(lam))
    if a == 0.0:
        out = arr.copy()
    else:
        mag = np.abs(arr)
        with np.errstate(over="ignore"):
            out = np.sign(arr) * np.exp(a * (mag - 1.0)) * np.expm1(-2.0 * a * mag) / math.expm1(-2.0 * a)
    return float(out) if out.ndim == 0 else out


def q_bracket(n, lam: float):
    """[n]_q = (q^n - q^-n)/(q - q^-1) with q = e^λ."""
    return sinh_ratio(n, lam)


def f_squared_boson(n, lam: float):
    """
    q-boson deformation function f²(n) = sinh(λn)/(n sinh λ).

    At n = 0 the analytic limit λ/sinh λ is returned; operator action never
    reads that slot, but the classical flow needs f² to be smooth at u = 0.

    Example:
        >>> f_squared_boson(2, 1.0)  # cosh(1)
        1.5430806348152437
    """
    arr = np.asarray(n, dtype=float)
    a = abs(float(lam))
    limit = 1.0 if a == 0.0 else a / math.sinh(a)
    safe = np.where(arr == 0.0, 1.0, arr)
    out = np.where(arr == 0.0, limit, np.asarray(sinh_ratio(safe, lam)) / safe)
    return float(out) if out.ndim == 0 else out


def f_bar_fermion(n, lam: float):
    """Fermionic q-deformation f̄(n) = q^{(n-1)/2}; needed at n = 0, 1, 2."""
    arr = np.asarray(n, dtype=float)
    out = np.exp(0.5 * float(lam) * (arr - 1.0))
    return float(out) if out.ndim == 0 else out


def _tabulate(values: TableLike, length: int, name: str) -> np.ndarray:
    """Turn a sequence or a callable of n into a float array of given length."""
    if callable(values):
        return np.array([float(values(n)) for n in range(length)], dtype=float)
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1 or arr.size < length:
        raise ValueError(f"{name} must define at least {length} values, got {arr.size}")
    return arr[:length].copy()


def solve_f_from_gh_boson(g: TableLike, h: TableLike, n_max: int) -> np.ndarray:
    """
    Solve f²(n+1)(n+1) = h(n) + g(n) f²(n) n upward from f²(1) = h(0).

    Args:
        g (sequence or callable): g(n) for 0 <= n < n_max.
        h (sequence or callable): h(n) for 0 <= n < n_max.
        n_max (int): Largest occupation for which f² is returned.

    Returns:
        np.ndarray: f²(n) for n = 0..n_max. The n = 0 slot holds the
        convention value 1; deformed operators never read it.

    Raises:
        NonPositive: If some f²(n), n >= 1, is <= 0.
    """
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    g_tab = _tabulate(g, n_max, "g")
    h_tab = _tabulate(h, n_max, "h")
    f2 = np.empty(n_max + 1, dtype=float)
    f2[0] = 1.0
    f2[1] = h_tab[0]
    for n in range(1, n_max):
        f2[n + 1] = (h_tab[n] + g_tab[n] * f2[n] * n) / (n + 1)
    bad = np.flatnonzero(~(f2[1:] > 0.0))
    if bad.size:
        n_bad = int(bad[0]) + 1
        raise NonPositive(f"f^2({n_bad}) = {f2[n_bad]!r} is not positive")
    logger.debug("Solved boson f^2 table up to n=%d", n_max)
    return f2


def recursion_residuals(f2: np.ndarray, g: TableLike, h: TableLike) -> np.ndarray:
    """Residuals f²(n+1)(n+1) - g(n) f²(n) n - h(n) for n = 0..len(f2)-2."""
    n_max = len(f2) - 1
    g_tab = _tabulate(g, n_max, "g")
    h_tab = _tabulate(h, n_max, "h")
    n = np.arange(n_max, dtype=float)
    return f2[1:] * (n + 1.0) - g_tab * f2[:-1] * n - h_tab


def solve_f_from_gh_fermion(g_bar: TableLike, h_bar: TableLike) -> tuple[float, bool]:
    """
    Solve the fermionic consistency relation at N = 0 and N = 1.

    The N = 0 instance gives f̄²(1) = h̄(0). At N = 1 the f̄²(2) coefficient
    (1 - N) vanishes, so ḡ(1) f̄²(1) = h̄(1) is a pure constraint.

    Returns:
        tuple[float, bool]: (f̄²(1), consistent)

    Raises:
        NonPositive: If h̄(0) <= 0.
    """
    g_tab = _tabulate(g_bar, 2, "g_bar")
    h_tab = _tabulate(h_bar, 2, "h_bar")
    f2_one = float(h_tab[0])
    if not f2_one > 0.0:
        raise NonPositive(f"f_bar^2(1) = h_bar(0) = {f2_one!r} is not positive")
    lhs = g_tab[1] * f2_one
    consistent = abs(lhs - h_tab[1]) <= CONSISTENCY_TOL * max(1.0, abs(h_tab[1]))
    return f2_one, bool(consistent)


@dataclass(frozen=True)
class DeformationSpec:
    """
    A deformation of the canonical boson or fermion algebra.

    Use the constructors q_boson, q_fermion, custom and from_gh instead of
    building instances by hand.
    """

    kind: DeformationKind
    lam: float = 0.0
    table: tuple[float, ...] = ()
    g: tuple[float, ...] = ()
    h: tuple[float, ...] = ()
    n_max: int = 0
    fermionic: bool = False

    def __post_init__(self):
        if not math.isfinite(self.lam):
            raise ValueError(f"lambda must be finite, got {self.lam!r}")
        if self.kind is DeformationKind.CUSTOM:
            tab = np.asarray(self.table, dtype=float)
            if tab.size < 2:
                raise ValueError("custom f^2 table needs entries for n = 0 and n >= 1")
            if not np.all(np.isfinite(tab)):
                raise ValueError("custom f^2 table has non-finite entries")
            if np.any(tab[1:] <= 0.0):
                raise NonPositive("custom f^2 table must be positive for n >= 1")
        elif self.kind is DeformationKind.FROM_GH:
            if self.n_max < 1:
                raise ValueError(f"n_max must be >= 1, got {self.n_max}")
            if len(self.g) < self.n_max or len(self.h) < self.n_max:
                raise ValueError(f"g and h must be defined for n < {self.n_max}")
            # solve eagerly so NonPositive surfaces at construction
            _ = self.gh_table

    @classmethod
    def q_boson(cls, lam: float) -> "DeformationSpec":
        return cls(DeformationKind.QBOSON, lam=float(lam))

    @classmethod
    def q_fermion(cls, lam: float) -> "DeformationSpec":
        return cls(DeformationKind.QFERMION, lam=float(lam))

    @classmethod
    def custom(cls, table: Sequence[float], fermionic: bool = False) -> "DeformationSpec":
        """Custom f² (or f̄² when fermionic) table indexed by occupation n >= 0."""
        return cls(DeformationKind.CUSTOM, table=tuple(float(v) for v in table), fermionic=fermionic)

    @classmethod
    def from_gh(cls, g: TableLike, h: TableLike, n_max: int) -> "DeformationSpec":
        g_tab = _tabulate(g, n_max, "g")
        h_tab = _tabulate(h, n_max, "h")
        return cls(DeformationKind.FROM_GH, g=tuple(g_tab), h=tuple(h_tab), n_max=int(n_max))

    @property
    def q(self) -> float:
        return math.exp(self.lam)

    @property
    def statistics(self) -> Statistics:
        if self.kind is DeformationKind.QFERMION or (self.kind is DeformationKind.CUSTOM and self.fermionic):
            return Statistics.FERMION
        return Statistics.BOSON

    @property
    def max_occupation(self) -> float:
        """Largest occupation the deformation is defined at (inf for closed forms)."""
        if self.kind is DeformationKind.CUSTOM:
            return len(self.table) - 1
        if self.kind is DeformationKind.FROM_GH:
            return self.n_max
        return math.inf

    @cached_property
    def gh_table(self) -> np.ndarray:
        return solve_f_from_gh_boson(self.g, self.h, self.n_max)

    def f_squared(self, n):
        """f²(n) (or f̄²(n) for fermionic kinds) evaluated elementwise."""
        if self.kind is DeformationKind.QBOSON:
            return f_squared_boson(n, self.lam)
        if self.kind is DeformationKind.QFERMION:
            fb = f_bar_fermion(n, self.lam)
            return fb * fb
        tab = np.asarray(self.table, dtype=float) if self.kind is DeformationKind.CUSTOM else self.gh_table
        arr = np.asarray(n)
        idx = arr.astype(int)
        if np.any(idx != arr) or np.any(idx < 0) or np.any(idx >= tab.size):
            raise DomainError(f"{self.kind.value} deformation is tabulated for integer 0 <= n <= {tab.size - 1}")
        out = tab[idx]
        return float(out) if np.ndim(out) == 0 else out

    def f(self, n):
        return np.sqrt(self.f_squared(n))

    def spectrum(self, n):
        """Eigenvalues n f²(n) of A†A; exact q-bracket for the q-boson."""
        if self.kind is DeformationKind.QBOSON:
            return q_bracket(n, self.lam)
        arr = np.asarray(n, dtype=float)
        out = arr * np.asarray(self.f_squared(n), dtype=float)
        return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class LeptonFitResult:
    k: float
    lam: float
    m_e: float
    masses: tuple[float, ...] = field(default_factory=tuple)

    def mass(self, n) -> float:
        return lepton_mass(n, self.k, self.lam, self.m_e)

    @property
    def level_spacings(self) -> tuple[float, ...]:
        return tuple(float(d) for d in np.diff(self.masses))


def lepton_mass(n, k: float, lam: float, m_e: float):
    """m_n = k sinh(λn)/sinh λ + m_e."""
    out = k * np.asarray(sinh_ratio(n, lam)) + m_e
    return float(out) if out.ndim == 0 else out


def lepton_fit(
    m_e: float = ELECTRON_MASS_MEV,
    m_mu: float = MUON_MASS_MEV,
    m_tau: float = TAU_MASS_MEV,
    n_max: int = 3,
) -> LeptonFitResult:
    """
    Fit m_n = k sinh(λn)/sinh λ + m_e exactly to (m_e, m_μ, m_τ).

    k = m_μ - m_e from n = 1, and m_2 = 2k cosh λ + m_e gives
    λ = arccosh((m_τ - m_e)/(2k)).

    Args:
        m_e (float): Electron mass (MeV), the n = 0 level.
        m_mu (float): Muon mass (MeV), the n = 1 level.
        m_tau (float): Tau mass (MeV), the n = 2 level.
        n_max (int): Highest level to tabulate.

    Returns:
        LeptonFitResult: k, λ and masses m_0..m_{n_max}.

    Raises:
        DomainError: If the masses are not increasing or the arccosh argument is <= 1.

    Example:
        >>> fit = lepton_fit(0.511, 105.658, 1776.86)
        >>> round(fit.lam, 2)
        2.82
    """
    if not (m_e < m_mu < m_tau):
        raise DomainError(f"masses must satisfy m_e < m_mu < m_tau, got ({m_e}, {m_mu}, {m_tau})")
    if n_max < 0:
        raise ValueError(f"n_max must be >= 0, got {n_max}")
    k = m_mu - m_e
    arg = (m_tau - m_e) / (2.0 * k)
    if not arg > 1.0:
        raise DomainError(f"arccosh argument (m_tau - m_e)/(2k) = {arg!r} must exceed 1")
    lam = math.acosh(arg)
    masses = np.asarray(k * sinh_ratio(np.arange(n_max + 1), lam) + m_e, dtype=float)
    masses[0] = m_e
    if n_max >= 1:
        masses[1] = k + m_e
    logger.debug("Lepton fit: k=%.6g MeV, lambda=%.6g", k, lam)
    return LeptonFitResult(k=k, lam=lam, m_e=m_e, masses=tuple(float(m) for m in masses))
