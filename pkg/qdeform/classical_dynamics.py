"""
Classical deformed oscillator.

H(q, p) = u f²(u) with u = (q² + p² - 1)/2, so H depends on phase space only
through u. Hamilton's equations are q' = Ω(u) p, p' = -Ω(u) q with
Ω(u) = d(u f²(u))/du = f²(u) + u f²'(u): a rotation whose rate depends on the
amplitude. u is conserved, hence so is Ω along a trajectory.

Ω is parametrized by the actual initial point (q(0), p(0)); this is the
amplitude law with the 1/Ω factors of the usual (q0, p0/Ω) initial-data
convention substituted out.
"""

from __future__ import annotations

import io
import logging
import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable, Optional

import numpy as np
from scipy.interpolate import CubicSpline

from qdeform.deform_core import DeformationKind, DeformationSpec, Statistics, sinh_ratio
from qdeform.errors import IncompatibleStatistics, InsufficientData, NonFiniteState

logger = logging.getLogger(__name__)

FREQUENCY_TOL = 1e-4
SPLINE_FREQUENCY_TOL = 1e-3
FREQUENCY_GRID_LAMBDAS = (0.1, 0.5, 1.0)
FREQUENCY_GRID_U0S = (-0.4, 0.0, 0.5, 1.0, 2.0, 3.0)
MIDPOINT_TOL = 1e-15
MIDPOINT_MAX_ITER = 100


class Integrator(str, Enum):
    RK4 = "rk4"
    MIDPOINT = "midpoint"


@dataclass(frozen=True)
class OscState:
    q: float
    p: float

    def __post_init__(self):
        if not (math.isfinite(self.q) and math.isfinite(self.p)):
            raise NonFiniteState(f"state ({self.q!r}, {self.p!r}) is not finite")

    @property
    def u(self) -> float:
        return 0.5 * (self.q * self.q + self.p * self.p - 1.0)

    @classmethod
    def from_u(cls, u0: float) -> "OscState":
        """Point on the q axis with the given u0 (needs u0 >= -1/2)."""
        if u0 < -0.5:
            raise ValueError(f"u0 must be >= -0.5, got {u0}")
        return cls(math.sqrt(2.0 * u0 + 1.0), 0.0)


@dataclass(frozen=True)
class TrajectoryConfig:
    dt: float = 1e-3
    steps: int = 10_000
    integrator: Integrator = Integrator.RK4

    def __post_init__(self):
        if not math.isfinite(self.dt) or self.dt == 0.0:
            raise ValueError(f"dt must be finite and nonzero, got {self.dt!r}")
        if self.steps < 1:
            raise ValueError(f"steps must be >= 1, got {self.steps}")
        object.__setattr__(self, "integrator", Integrator(self.integrator))

    def reversed(self) -> "TrajectoryConfig":
        return replace(self, dt=-self.dt)


class FrequencyLaw:
    """
    Energy u f²(u) and rotation rate Ω(u) for a boson deformation.

    The q-boson uses the closed forms sinh(λu)/sinh λ and λ cosh(λu)/sinh λ.
    Tabulated deformations interpolate the spectrum n f²(n) with a cubic
    spline and differentiate it.
    """

    def __init__(self, spec: DeformationSpec):
        if spec.statistics is not Statistics.BOSON:
            raise IncompatibleStatistics("classical dynamics needs a boson deformation")
        self.spec = spec
        self.analytic = spec.kind is DeformationKind.QBOSON
        if self.analytic:
            lam = spec.lam
            self._lam = lam
            self._c = 1.0 if lam == 0.0 else lam / math.sinh(lam)
        else:
            n = np.arange(int(spec.max_occupation) + 1)
            if n.size < 3:
                raise ValueError("tabulated deformation needs at least 3 levels for interpolation")
            self._spline = CubicSpline(n, np.asarray(spec.spectrum(n), dtype=float))
            self._dspline = self._spline.derivative()

    def energy(self, u):
        if self.analytic:
            return sinh_ratio(u, self._lam)
        return self._spline(u)

    def omega(self, u: float) -> float:
        if self.analytic:
            return self._c * math.cosh(self._lam * u)
        return float(self._dspline(u))


@dataclass(frozen=True, eq=False)
class Trajectory:
    t: np.ndarray
    q: np.ndarray
    p: np.ndarray
    H: np.ndarray
    u: np.ndarray

    @property
    def final_state(self) -> OscState:
        return OscState(float(self.q[-1]), float(self.p[-1]))

    def to_columns(self) -> str:
        buf = io.StringIO()
        np.savetxt(buf, np.column_stack([self.t, self.q, self.p, self.H, self.u]), fmt="%.12e", header="t q p H u")
        return buf.getvalue()


def _rk4(law: FrequencyLaw, q: float, p: float, dt: float):
    def rhs(q, p):
        w = law.omega(0.5 * (q * q + p * p - 1.0))
        return w * p, -w * q

    k1q, k1p = rhs(q, p)
    k2q, k2p = rhs(q + 0.5 * dt * k1q, p + 0.5 * dt * k1p)
    k3q, k3p = rhs(q + 0.5 * dt * k2q, p + 0.5 * dt * k2p)
    k4q, k4p = rhs(q + dt * k3q, p + dt * k3p)
    return (
        q + dt / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q),
        p + dt / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p),
    )


def _midpoint(law: FrequencyLaw, q: float, p: float, dt: float):
    # fixed-point iteration of z1 = z0 + dt F((z0 + z1)/2)
    q1, p1 = q, p
    for _ in range(MIDPOINT_MAX_ITER):
        qm, pm = 0.5 * (q + q1), 0.5 * (p + p1)
        w = law.omega(0.5 * (qm * qm + pm * pm - 1.0))
        qn, pn = q + dt * w * pm, p - dt * w * qm
        done = abs(qn - q1) + abs(pn - p1) <= MIDPOINT_TOL * (1.0 + abs(qn) + abs(pn))
        q1, p1 = qn, pn
        if done:
            break
    return q1, p1


def integrate(spec: DeformationSpec, start: OscState, cfg: TrajectoryConfig) -> Trajectory:
    """
    Integrate Hamilton's equations of u f²(u) for cfg.steps fixed steps.

    Raises:
        NonFiniteState: On overflow.
    """
    law = FrequencyLaw(spec)
    step = _rk4 if cfg.integrator is Integrator.RK4 else _midpoint
    q = np.empty(cfg.steps + 1)
    p = np.empty(cfg.steps + 1)
    q[0], p[0] = start.q, start.p
    qi, pi = start.q, start.p
    try:
        for i in range(1, cfg.steps + 1):
            qi, pi = step(law, qi, pi, cfg.dt)
            q[i], p[i] = qi, pi
    except OverflowError as e:
        raise NonFiniteState(f"overflow at step {i}: {e}") from e
    if not (np.all(np.isfinite(q)) and np.all(np.isfinite(p))):
        raise NonFiniteState("trajectory left the finite range")
    t = cfg.dt * np.arange(cfg.steps + 1)
    u = 0.5 * (q * q + p * p - 1.0)
    H = np.asarray(law.energy(u), dtype=float)
    logger.debug("Integrated %d %s steps, dt=%g", cfg.steps, cfg.integrator.value, cfg.dt)
    return Trajectory(t=t, q=q, p=p, H=H, u=u)


def measure_frequency(trajectory: Trajectory) -> float:
    """
    Angular frequency from the accumulated phase winding of (q, p).

    The flow turns clockwise, so the winding is minus the unwrapped change of
    atan2(p, q). Works for any radius.

    Raises:
        InsufficientData: If the trajectory winds less than two full turns.
    """
    radius = np.hypot(trajectory.q, trajectory.p)
    if trajectory.t.size < 2 or np.any(radius == 0.0):
        raise InsufficientData("trajectory touches the origin or has fewer than two samples")
    phase = np.unwrap(np.arctan2(trajectory.p, trajectory.q))
    winding = -(phase[-1] - phase[0])
    if abs(winding) < 4.0 * math.pi:
        raise InsufficientData(f"winding {abs(winding):.3f} rad is below two full periods")
    return float(winding / (trajectory.t[-1] - trajectory.t[0]))


def predicted_frequency(spec: DeformationSpec, start: OscState) -> float:
    """Ω = f²(u0) + u0 f²'(u0); λ cosh(λ u0)/sinh λ for the q-boson."""
    return FrequencyLaw(spec).omega(start.u)


@dataclass(frozen=True)
class FrequencyResult:
    omega_measured: float
    omega_predicted: float
    u0: float
    energy_drift: float
    lam: Optional[float] = None

    @property
    def relative_error(self) -> float:
        return abs(self.omega_measured - self.omega_predicted) / abs(self.omega_predicted)


def periods_config(spec: DeformationSpec, start: OscState, dt: float = 1e-3, periods: float = 2.5,
                   integrator: Integrator = Integrator.RK4) -> TrajectoryConfig:
    """Trajectory config long enough to cover `periods` predicted periods."""
    omega = predicted_frequency(spec, start)
    steps = int(math.ceil(periods * 2.0 * math.pi / abs(omega) / abs(dt)))
    return TrajectoryConfig(dt=dt, steps=steps, integrator=integrator)


def energy_drift(trajectory: Trajectory) -> float:
    """max |H(t) - H(0)| relative to max(|H(0)|, 1)."""
    h0 = trajectory.H[0]
    return float(np.max(np.abs(trajectory.H - h0)) / max(abs(h0), 1.0))


def frequency_check(spec: DeformationSpec, start: OscState, cfg: Optional[TrajectoryConfig] = None) -> tuple[FrequencyResult, Trajectory]:
    cfg = cfg or periods_config(spec, start)
    trajectory = integrate(spec, start, cfg)
    result = FrequencyResult(
        omega_measured=measure_frequency(trajectory),
        omega_predicted=predicted_frequency(spec, start),
        u0=start.u,
        energy_drift=energy_drift(trajectory),
        lam=spec.lam if spec.kind is DeformationKind.QBOSON else None,
    )
    return result, trajectory


def frequency_scan(lams: Iterable[float], u0s: Iterable[float], dt: float = 1e-3, periods: float = 2.5) -> list[FrequencyResult]:
    """Measured vs predicted Ω over a (λ, u0) grid of q-boson oscillators."""
    results = []
    for lam in lams:
        spec = DeformationSpec.q_boson(lam)
        for u0 in u0s:
            start = OscState.from_u(u0)
            result, _ = frequency_check(spec, start, periods_config(spec, start, dt, periods))
            logger.debug("lambda=%g u0=%g: measured=%.10f predicted=%.10f", lam, u0, result.omega_measured, result.omega_predicted)
            results.append(result)
    return results
