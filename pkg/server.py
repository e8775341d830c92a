from typing import List, Optional

from fastmcp import FastMCP

from qdeform.report import run_with_metadata
from qdeform.runners import run_hopping_table, run_spectrum, run_subcommand

mcp = FastMCP("Deformed Oscillator MCP Server")


# Algebra
@mcp.tool()
def check_algebra(
    which: str = 'qboson',
    lam: float = 0.5,
    dim: int = 32,
    margin: int = 1,
    gh: str = 'linear',
    force_f_identity: bool = False
) -> dict:
    """
    [qdeform] Verify a deformed commutation relation on a truncated Fock space
    Args:
        which (str): qboson, general, jordan-schwinger-boson or jordan-schwinger-fermion
        lam (float): Deformation parameter, q = e^lam
        dim (int): Levels per boson mode
        margin (int): Top levels excluded from the checks
        gh (str): (g, h) preset for which=general (linear or damped)
        force_f_identity (bool): Negative control with f = 1 (must fail for lam != 0)
    Returns:
        dict: report with residuals per identity
    """
    variables = {
        'which': which,
        'lam': lam,
        'dim': dim,
        'margin': margin,
        'gh': gh,
        'force_f_identity': force_f_identity,
    }
    return run_subcommand('algebra', variables)


@mcp.tool()
def get_deformed_spectrum(lam: float = 0.5, n_max: int = 10) -> dict:
    """
    [qdeform] Spectrum [n]_q of the q-boson Hamiltonian A+A
    Args:
        lam (float): Deformation parameter
        n_max (int): Highest level
    Returns:
        dict: closed-form levels, matrix eigenvalues and level spacings
    """
    return run_with_metadata('spectrum', run_spectrum, {'kind': 'qboson', 'lam': lam, 'n_max': n_max})


@mcp.tool()
def get_lepton_fit(
    m_e: float = 0.511,
    m_mu: float = 105.658,
    m_tau: float = 1776.86,
    n_max: int = 3
) -> dict:
    """
    [qdeform] Fit m_n = k sinh(lam n)/sinh(lam) + m_e to the charged lepton masses
    Args:
        m_e (float): Electron mass in MeV
        m_mu (float): Muon mass in MeV
        m_tau (float): Tau mass in MeV
        n_max (int): Highest level to predict
    Returns:
        dict: k, lam and the mass table
    Note:
        Masses must be strictly increasing.
    """
    variables = {'m_e': m_e, 'm_mu': m_mu, 'm_tau': m_tau, 'n_max': n_max}
    return run_subcommand('leptons', variables)


# Classical dynamics
@mcp.tool()
def get_classical_frequency(
    lam: float = 0.5,
    q0: float = 2.0,
    p0: float = 0.0,
    dt: float = 1e-3,
    periods: float = 2.5,
    integrator: str = 'rk4',
    scan: bool = False
) -> dict:
    """
    [qdeform] Measured vs predicted frequency of the classical deformed oscillator
    Args:
        lam (float): Deformation parameter
        q0 (float): Initial coordinate
        p0 (float): Initial momentum
        dt (float): Time step
        periods (float): Predicted periods to integrate
        integrator (str): rk4 or midpoint
        scan (bool): Check the frequency law on the default (lambda, u0) grid instead
    Returns:
        dict: omega_measured, omega_predicted, energy drift (or the grid rows)
    """
    variables = {'lam': lam, 'q0': q0, 'p0': p0, 'dt': dt, 'periods': periods, 'integrator': integrator,
                 'scan': scan}
    return run_subcommand('classical', variables)


# Hubbard model
@mcp.tool()
def get_hubbard_spectrum(
    sites: int = 2,
    q: float = 1.0,
    t: float = 1.0,
    U: float = 4.0,
    sector: Optional[List[int]] = None,
    geometry: str = 'open'
) -> dict:
    """
    [qdeform] Exact spectrum of the deformed Hubbard model
    Args:
        sites (int): Number of sites
        q (float): Deformation parameter (q = 1 is the ordinary Hubbard model)
        t (float): Hopping energy
        U (float): On-site energy
        sector (list, optional): [N_up, N_dn]; all sectors when omitted
        geometry (str): open or ring
    Returns:
        dict: eigenvalues, ground energy, Hermiticity residual
    """
    variables = {'sites': sites, 'q': q, 't': t, 'U': U, 'sector': sector, 'geometry': geometry}
    return run_subcommand('hubbard', variables)


@mcp.tool()
def get_hopping_table(q: float = 1.0, t: float = 1.0) -> dict:
    """
    [qdeform] Occupancy-dependent hopping amplitudes t f(n_x) f(n_y)
    Args:
        q (float): Deformation parameter
        t (float): Hopping energy
    Returns:
        dict: 3x3 table indexed by (destination occupancy after, source occupancy before)
    """
    return run_with_metadata('hopping-table', run_hopping_table, {'q': q, 't': t})


# Noise
@mcp.tool()
def get_noise_statistics(
    seed: int,
    lam: float = 0.3,
    samples: int = 10000,
    mode_cutoff: int = 64,
    xi: str = 'gaussian',
    convention: str = 'complex',
    fit: bool = False
) -> dict:
    """
    [qdeform] Monte Carlo statistics of deformed white noise vs spectral sums
    Args:
        seed (int): Random seed
        lam (float): Deformation parameter
        samples (int): Monte Carlo samples
        mode_cutoff (int): Mode cutoff M
        xi (str): gaussian or raised-cosine test function
        convention (str): complex or real
        fit (bool): Add the small-lambda structure fit
    Returns:
        dict: quadratic form, mean, Brownian variance and characteristic functional
    """
    variables = {
        'seed': seed,
        'lam': lam,
        'samples': samples,
        'mode_cutoff': mode_cutoff,
        'xi': xi,
        'convention': convention,
        'fit': fit,
    }
    return run_subcommand('noise', variables)


# Relativistic field
@mcp.tool()
def get_field_spectrum(
    modes: Optional[List[float]] = None,
    m0: float = 1.0,
    mass: str = 'quadratic',
    cutoff: int = 5,
    margin: int = 2
) -> dict:
    """
    [qdeform] Charge-dependent deformed field: spectrum and deformed relations
    Args:
        modes (list, optional): Mode momenta k (default [0.0])
        m0 (float): Rest mass
        mass (str): M^2(q) preset: constant, quadratic or abs
        cutoff (int): Occupation cutoff per mode and species
        margin (int): Interior margin
    Returns:
        dict: energy levels and residual reports
    """
    variables = {'modes': modes or [0.0], 'm0': m0, 'mass': mass, 'cutoff': cutoff, 'margin': margin}
    return run_subcommand('field', variables)


@mcp.tool()
def run_acceptance() -> dict:
    """
    [qdeform] Run the full acceptance suite
    Returns:
        dict: one pass/fail check per criterion
    """
    return run_subcommand('verify-all', {})


if __name__ == "__main__":
    mcp.run()
