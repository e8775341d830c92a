"""
Deformed white noise and Brownian motion by the Paley-Wiener construction.

    η(t) = Σ_{|n|<=M} Z_n exp(i ω_n t),   ω_n = sinh(λn)/sinh λ,
    Z_n = (X_n + i Y_n)/2,   X(t) = ∫_0^t η(s) ds.

The covariance E[η(t) η̄(s)] = ½ Σ exp(i ω_n (t - s)) is a generalized
function; every statement about it is tested by pairing with a smooth test
function ξ, with ξ̂(ω) = ∫ ξ(t) exp(iωt) dt, which gives the convergent
quadratic form Q(ξ) = ½ Σ |ξ̂(ω_n)|².

Two conventions are offered. COMPLEX_HERMITIAN draws independent complex Z_n
for every n. REAL_CONJUGATE_PAIRED sets Z_{-n} = conj(Z_n) and a real Z_0 of
variance ½, which makes η real and E[η(t) η(s)] equal to the same sum.
"""

from __future__ import annotations

import io
import logging
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate

from qdeform.deform_core import sinh_ratio
from qdeform.errors import CutoffWarning, IllConditionedFit

logger = logging.getLogger(__name__)

CUTOFF_TAIL_TOL = 1e-10
QUAD_TOL = 1e-12
MIN_MC_SAMPLES = 100
MAX_FIT_CONDITION = 1e8


class Convention(str, Enum):
    COMPLEX_HERMITIAN = "complex"
    REAL_CONJUGATE_PAIRED = "real"


def deformed_frequency(n, lam: float):
    """ω_n = n f²(n) = sinh(λn)/sinh λ; odd in n, ω_0 = 0, ω_n = n at λ = 0."""
    return sinh_ratio(n, lam)


@dataclass(frozen=True)
class NoiseConfig:
    lam: float
    mode_cutoff: int = 32
    samples: int = 10_000
    seed: int = 0
    time_grid: tuple[float, ...] = (0.0, 0.5, 1.0, 1.5, 2.0)
    convention: Convention = Convention.COMPLEX_HERMITIAN
    chunk_size: int = 2_000
    workers: int = 1

    def __post_init__(self):
        if self.mode_cutoff < 1:
            raise ValueError(f"mode_cutoff must be >= 1, got {self.mode_cutoff}")
        if self.samples < 1:
            raise ValueError(f"samples must be >= 1, got {self.samples}")
        if self.chunk_size < 1 or self.workers < 1:
            raise ValueError("chunk_size and workers must be >= 1")
        grid = tuple(float(t) for t in self.time_grid)
        if len(grid) < 1 or any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("time_grid must be non-empty and strictly increasing")
        object.__setattr__(self, "time_grid", grid)
        object.__setattr__(self, "convention", Convention(self.convention))
        if not math.isfinite(deformed_frequency(self.mode_cutoff, self.lam)):
            raise ValueError(f"omega at mode cutoff {self.mode_cutoff} overflows for lambda={self.lam}")

    @property
    def modes(self) -> np.ndarray:
        return np.arange(-self.mode_cutoff, self.mode_cutoff + 1)

    @property
    def frequencies(self) -> np.ndarray:
        return np.asarray(deformed_frequency(self.modes, self.lam), dtype=float)


@dataclass(frozen=True, eq=False)
class TestFunction:
    """
    Smooth test function ξ with its Fourier transform ξ̂(ω) = ∫ ξ(t) e^{iωt} dt.

    `norm_sq` is ‖ξ‖² and `deriv_norm_sq` is ‖ξ'‖²; both enter the small-λ
    structure fit.
    """

    __test__ = False  # not a pytest class

    name: str
    func: Callable
    support: tuple[float, float]
    hat_func: Callable
    norm_sq: float
    deriv_norm_sq: float

    def __call__(self, t):
        return self.func(t)

    def hat(self, omega) -> np.ndarray:
        omega = np.asarray(omega, dtype=float)
        out = np.zeros(omega.shape, dtype=complex)
        finite = np.isfinite(omega)
        out[finite] = self.hat_func(omega[finite])
        return out

    @classmethod
    def gaussian(cls, width: float = 1.0) -> "TestFunction":
        """ξ(t) = exp(-t²/s²); ξ̂(ω) = s √π exp(-ω² s²/4)."""
        s = float(width)
        return cls(
            name=f"gaussian(s={s:g})",
            func=lambda t: np.exp(-np.square(t) / s**2),
            support=(-math.pi, math.pi),
            hat_func=lambda w: s * math.sqrt(math.pi) * np.exp(-np.square(w) * s**2 / 4.0),
            norm_sq=s * math.sqrt(math.pi / 2.0),
            deriv_norm_sq=math.sqrt(math.pi / 2.0) / s,
        )

    @classmethod
    def raised_cosine(cls, half_width: float = 2.0) -> "TestFunction":
        """ξ(t) = (1 + cos(πt/w))/2 on |t| <= w < π, zero outside."""
        w = float(half_width)
        if not 0.0 < w < math.pi:
            raise ValueError(f"half_width must lie in (0, pi), got {w}")
        a = math.pi / w

        def func(t):
            t = np.asarray(t, dtype=float)
            return np.where(np.abs(t) <= w, 0.5 * (1.0 + np.cos(a * t)), 0.0)

        def hat_func(omega):
            return w * np.sinc(omega * w / math.pi) + 0.5 * w * (
                np.sinc((omega + a) * w / math.pi) + np.sinc((omega - a) * w / math.pi)
            )

        return cls(
            name=f"raised_cosine(w={w:g})",
            func=func,
            support=(-w, w),
            hat_func=hat_func,
            norm_sq=0.75 * w,
            deriv_norm_sq=math.pi**2 / (4.0 * w),
        )

    @classmethod
    def zero(cls) -> "TestFunction":
        return cls("zero", lambda t: np.zeros_like(np.asarray(t, dtype=float)), (-1.0, 1.0),
                   lambda w: np.zeros_like(w), 0.0, 0.0)

    @classmethod
    def from_callable(cls, func: Callable[[float], float], support: tuple[float, float], name: str = "custom",
                      derivative: Optional[Callable[[float], float]] = None) -> "TestFunction":
        """
        Test function given as a real callable on a bounded support.

        ξ̂ and the norms are computed with scipy.integrate.quad; without an
        explicit derivative, ξ' is a central difference.
        """
        lo, hi = map(float, support)
        if not hi - lo < 2.0 * math.pi:
            raise ValueError(f"support length must be < 2 pi, got {hi - lo}")
        step = 1e-5 * (hi - lo)
        deriv = derivative or (lambda t: (func(t + step) - func(t - step)) / (2.0 * step))

        def hat_func(omega):
            out = []
            for w in np.atleast_1d(omega):
                re = integrate.quad(func, lo, hi, weight="cos", wvar=w, epsabs=QUAD_TOL, limit=200)[0]
                im = integrate.quad(func, lo, hi, weight="sin", wvar=w, epsabs=QUAD_TOL, limit=200)[0]
                out.append(re + 1j * im)
            return np.asarray(out)

        norm_sq = integrate.quad(lambda t: func(t) ** 2, lo, hi, epsabs=QUAD_TOL, limit=200)[0]
        deriv_norm_sq = integrate.quad(lambda t: deriv(t) ** 2, lo, hi, epsabs=QUAD_TOL, limit=200)[0]
        return cls(name, func, (lo, hi), hat_func, norm_sq, deriv_norm_sq)

    @classmethod
    def from_samples(cls, t: Sequence[float], values: Sequence[float], name: str = "sampled") -> "TestFunction":
        """Test function given as dense samples; trapezoidal quadrature throughout."""
        t = np.asarray(t, dtype=float)
        v = np.asarray(values, dtype=float)

        def hat_func(omega):
            return integrate.trapezoid(v[np.newaxis, :] * np.exp(1j * np.outer(omega, t)), t, axis=1)

        return cls(
            name=name,
            func=lambda s: np.interp(s, t, v, left=0.0, right=0.0),
            support=(float(t[0]), float(t[-1])),
            hat_func=hat_func,
            norm_sq=float(integrate.trapezoid(v * v, t)),
            deriv_norm_sq=float(integrate.trapezoid(np.gradient(v, t) ** 2, t)),
        )


def spectral_quadratic_form(xi: TestFunction, lam: float, M: int) -> float:
    """
    Q(ξ) = ½ Σ_{|n|<=M} |ξ̂(ω_n)|², the exact second moment E|<η, ξ>|².

    Emits CutoffWarning when the |n| = M term exceeds CUTOFF_TAIL_TOL of the total.
    """
    n = np.arange(-M, M + 1)
    weights = np.abs(xi.hat(deformed_frequency(n, lam))) ** 2
    total = 0.5 * float(weights.sum())
    tail = 0.5 * float(max(weights[0], weights[-1]))
    if total > 0.0 and tail > CUTOFF_TAIL_TOL * total:
        warnings.warn(
            f"{xi.name}: tail term at |n|={M} is {tail / total:.2e} of Q (lambda={lam}); raise the mode cutoff",
            CutoffWarning,
            stacklevel=2,
        )
    return total


def characteristic_functional(xi: TestFunction, lam: float, M: int,
                              convention: Convention = Convention.REAL_CONJUGATE_PAIRED) -> float:
    """
    E[exp(i <η, ξ>)] for real ξ.

    The paired process has a real Gaussian pairing of variance Q, hence
    exp(-Q/2). Under COMPLEX_HERMITIAN the real part of the circular complex
    pairing is used, with variance Q/2 and functional exp(-Q/4).
    """
    Q = spectral_quadratic_form(xi, lam, M)
    return math.exp(-0.5 * Q) if Convention(convention) is Convention.REAL_CONJUGATE_PAIRED else math.exp(-0.25 * Q)


def _draw_chunk(seed_seq: np.random.SeedSequence, count: int, M: int, convention: Convention) -> np.ndarray:
    rng = np.random.default_rng(seed_seq)
    normals = rng.standard_normal((count, 2, 2 * M + 1))
    Z = 0.5 * (normals[:, 0, :] + 1j * normals[:, 1, :])
    if convention is Convention.REAL_CONJUGATE_PAIRED:
        Z[:, :M] = np.conj(Z[:, : M : -1])
        Z[:, M] = normals[:, 0, M] / math.sqrt(2.0)
    return Z


def draw_coefficients(cfg: NoiseConfig, samples: Optional[int] = None) -> np.ndarray:
    """
    (samples, 2M + 1) array of Z_n, column n + M.

    Samples are drawn in chunks from sub-seeds spawned deterministically from
    cfg.seed and concatenated in chunk order, so the result does not depend on
    cfg.workers.
    """
    total = cfg.samples if samples is None else samples
    counts = [min(cfg.chunk_size, total - start) for start in range(0, total, cfg.chunk_size)]
    children = np.random.SeedSequence(cfg.seed).spawn(len(counts))
    jobs = [(child, count, cfg.mode_cutoff, cfg.convention) for child, count in zip(children, counts)]
    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            chunks = list(pool.map(lambda job: _draw_chunk(*job), jobs))
    else:
        chunks = [_draw_chunk(*job) for job in jobs]
    logger.debug("Drew %d coefficient vectors (M=%d, seed=%d, %d chunks)", total, cfg.mode_cutoff, cfg.seed, len(chunks))
    return np.concatenate(chunks, axis=0)


def _mode_sums(Z: np.ndarray, phases: np.ndarray, M: int, convention: Convention) -> np.ndarray:
    """Σ_n Z_n phases[n, :]; exactly real for the paired convention."""
    if convention is Convention.REAL_CONJUGATE_PAIRED:
        positive = Z[:, M + 1:] @ phases[M + 1:, :]
        return (Z[:, M:M + 1].real * phases[M:M + 1, :].real + 2.0 * positive.real).astype(complex)
    return Z @ phases


def path_arrays(cfg: NoiseConfig, Z: Optional[np.ndarray] = None) -> tuple[np.ndarray, np.ndarray]:
    """η and X on cfg.time_grid for every sample: two (samples, T) complex arrays."""
    Z = draw_coefficients(cfg) if Z is None else Z
    t = np.asarray(cfg.time_grid)
    omega = cfg.frequencies
    M = cfg.mode_cutoff
    waves = np.exp(1j * np.outer(omega, t))
    integrals = np.empty_like(waves)
    nonzero = omega != 0.0
    integrals[nonzero] = (waves[nonzero] - 1.0) / (1j * omega[nonzero, np.newaxis])
    integrals[~nonzero] = t[np.newaxis, :]
    eta = _mode_sums(Z, waves, M, cfg.convention)
    X = _mode_sums(Z, integrals, M, cfg.convention)
    return eta, X


@dataclass(frozen=True, eq=False)
class PathSample:
    t: np.ndarray
    eta: np.ndarray
    X: np.ndarray
    seed: int
    index: int

    def to_columns(self) -> str:
        buf = io.StringIO()
        data = np.column_stack([self.t, self.eta.real, self.eta.imag, self.X.real, self.X.imag])
        np.savetxt(buf, data, fmt="%.12e", header=f"seed={self.seed} sample={self.index}\nt Re_eta Im_eta Re_X Im_X")
        return buf.getvalue()


def sample_paths(cfg: NoiseConfig) -> list[PathSample]:
    """Sample cfg.samples paths of η and X on cfg.time_grid (same seed, same paths)."""
    eta, X = path_arrays(cfg)
    t = np.asarray(cfg.time_grid)
    return [PathSample(t=t, eta=eta[i], X=X[i], seed=cfg.seed, index=i) for i in range(cfg.samples)]


@dataclass(frozen=True)
class MonteCarloEstimate:
    estimate: float
    standard_error: float
    samples: int
    standard_error_defined: bool = True

    def within(self, exact: float, n_sigma: float = 3.0) -> bool:
        if not self.standard_error_defined:
            return False
        return abs(self.estimate - exact) <= n_sigma * self.standard_error


def _estimate(values: np.ndarray) -> MonteCarloEstimate:
    values = np.asarray(values)
    count = values.shape[0]
    mean = values.mean(axis=0)
    if count < 2:
        return MonteCarloEstimate(mean, float("nan"), count, standard_error_defined=False)
    se = values.std(axis=0, ddof=1) / math.sqrt(count)
    return MonteCarloEstimate(mean, se, count)


def _pairings(xi: TestFunction, cfg: NoiseConfig, Z: Optional[np.ndarray] = None) -> np.ndarray:
    """<η, ξ> = Σ_n Z_n ξ̂(ω_n) per sample, in spectral form."""
    if cfg.samples < MIN_MC_SAMPLES:
        logger.warning("Only %d Monte Carlo samples (recommended >= %d)", cfg.samples, MIN_MC_SAMPLES)
    Z = draw_coefficients(cfg) if Z is None else Z
    return Z @ xi.hat(cfg.frequencies)


def mc_quadratic_form(xi: TestFunction, cfg: NoiseConfig) -> MonteCarloEstimate:
    """Sample mean of |<η, ξ>|² with its standard error (undefined for one sample)."""
    est = _estimate(np.abs(_pairings(xi, cfg)) ** 2)
    return MonteCarloEstimate(float(est.estimate), float(est.standard_error), est.samples, est.standard_error_defined)


def mc_characteristic_functional(xi: TestFunction, cfg: NoiseConfig) -> MonteCarloEstimate:
    """Monte Carlo E[cos(Re <η, ξ>)], the real part of the characteristic functional."""
    est = _estimate(np.cos(_pairings(xi, cfg).real))
    return MonteCarloEstimate(float(est.estimate), float(est.standard_error), est.samples, est.standard_error_defined)


def covariance_spectral(lags, lam: float, M: int) -> np.ndarray:
    """E[η(t) η̄(s)] = ½ Σ exp(i ω_n (t - s)) at the given lags t - s."""
    omega = np.asarray(deformed_frequency(np.arange(-M, M + 1), lam), dtype=float)
    lags = np.atleast_1d(np.asarray(lags, dtype=float))
    return 0.5 * np.exp(1j * np.outer(lags, omega)).sum(axis=1)


def mc_covariance(cfg: NoiseConfig, pairs: Sequence[tuple[int, int]]) -> list[tuple[MonteCarloEstimate, MonteCarloEstimate]]:
    """
    Monte Carlo E[η(t_i) η̄(t_j)] for grid index pairs (i, j).

    Returns one (real part, imaginary part) estimate pair per index pair.
    """
    eta, _ = path_arrays(cfg)
    out = []
    for i, j in pairs:
        product = eta[:, i] * np.conj(eta[:, j])
        re, im = _estimate(product.real), _estimate(product.imag)
        out.append((
            MonteCarloEstimate(float(re.estimate), float(re.standard_error), re.samples, re.standard_error_defined),
            MonteCarloEstimate(float(im.estimate), float(im.standard_error), im.samples, im.standard_error_defined),
        ))
    return out


def mc_mean(cfg: NoiseConfig) -> tuple[np.ndarray, float]:
    """Sample mean of η on the grid and the 4σ CLT bound 4 sqrt((2M + 1)/(2S))."""
    eta, _ = path_arrays(cfg)
    bound = 4.0 * math.sqrt((2 * cfg.mode_cutoff + 1) / (2.0 * cfg.samples))
    return eta.mean(axis=0), bound


def brownian_variance_exact(t, lam: float, M: int) -> np.ndarray:
    """E|X(t)|² = ½ [t² + Σ_{n≠0} 4 sin²(ω_n t/2)/ω_n²]."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    n = np.arange(1, M + 1)
    omega = np.asarray(deformed_frequency(n, lam), dtype=float)
    terms = 4.0 * np.sin(0.5 * np.outer(t, omega)) ** 2 / omega**2
    return 0.5 * (t**2 + 2.0 * terms.sum(axis=1))


def mc_brownian_variance(cfg: NoiseConfig) -> list[MonteCarloEstimate]:
    _, X = path_arrays(cfg)
    est = _estimate(np.abs(X) ** 2)
    se = np.atleast_1d(est.standard_error) if est.standard_error_defined else np.full(len(cfg.time_grid), np.nan)
    return [
        MonteCarloEstimate(float(m), float(s), est.samples, est.standard_error_defined)
        for m, s in zip(np.atleast_1d(est.estimate), se)
    ]


@dataclass(frozen=True)
class SmallLambdaFit:
    """
    Q(ξ; λ) = c0(λ) ‖ξ‖² + c2(λ) ‖ξ'‖² fitted over a family of test functions.

    A δ(t) covariance contributes ‖ξ‖², a δ''(t) covariance -‖ξ'‖². Expanding
    the spectral sum to order λ² gives c0 = π(1 + λ²/6) and c2 = -πλ²/2,
    reported as `leading_order`.
    """

    lams: tuple[float, ...]
    c0: tuple[float, ...]
    c2: tuple[float, ...]
    c0_zero: float
    c2_zero: float
    slope_c2: float
    slope_c0: float
    sign_consistent: bool
    leading_order: dict = field(default_factory=dict)


def small_lambda_structure(family: Sequence[TestFunction], lams: Sequence[float], M: int = 128) -> SmallLambdaFit:
    """
    Fit the order-λ² structure of the deformed covariance.

    Raises:
        IllConditionedFit: If the family does not separate ‖ξ‖² from ‖ξ'‖².
    """
    lams = tuple(float(lam) for lam in lams)
    if len(lams) < 2 or any(not 0.0 < lam <= 0.2 for lam in lams):
        raise ValueError("lambda grid needs >= 2 values in (0, 0.2]")
    design = np.array([[xi.norm_sq, xi.deriv_norm_sq] for xi in family], dtype=float)
    if design.shape[0] < 2 or np.linalg.matrix_rank(design) < 2 or np.linalg.cond(design) > MAX_FIT_CONDITION:
        raise IllConditionedFit("test-function family must span distinct |xi|^2 / |xi'|^2 ratios")

    def fit(lam):
        Q = np.array([spectral_quadratic_form(xi, lam, M) for xi in family])
        coeffs, *_ = np.linalg.lstsq(design, Q, rcond=None)
        return float(coeffs[0]), float(coeffs[1])

    c0_zero, c2_zero = fit(0.0)
    pairs = [fit(lam) for lam in lams]
    c0 = tuple(p[0] for p in pairs)
    c2 = tuple(p[1] for p in pairs)
    log_lam = np.log(lams)
    slope_c2 = float(np.polyfit(log_lam, np.log(np.abs(c2)), 1)[0])
    slope_c0 = float(np.polyfit(log_lam, np.log(np.abs(np.array(c0) - c0_zero)), 1)[0])
    signs = np.sign(c2)
    logger.debug("Small-lambda fit: c0=%s c2=%s slope_c2=%.4f", c0, c2, slope_c2)
    return SmallLambdaFit(
        lams=lams,
        c0=c0,
        c2=c2,
        c0_zero=c0_zero,
        c2_zero=c2_zero,
        slope_c2=slope_c2,
        slope_c0=slope_c0,
        sign_consistent=bool(np.all(signs == signs[0]) and signs[0] != 0),
        leading_order={
            "c0": [math.pi * (1.0 + lam**2 / 6.0) for lam in lams],
            "c2": [-math.pi * lam**2 / 2.0 for lam in lams],
        },
    )


def default_family() -> list[TestFunction]:
    return [
        TestFunction.gaussian(1.0),
        TestFunction.raised_cosine(2.0),
        TestFunction.raised_cosine(2.5),
        TestFunction.raised_cosine(3.0),
    ]
