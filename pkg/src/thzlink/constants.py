"""Physical constants (CODATA 2018, exact SI where defined)."""

from dataclasses import dataclass


@dataclass(frozen=True)
class PhysicalConstants:
    """Fixed constants used throughout the absorption and channel models.

    T_STP is the standard temperature entering the line-summation prefactor;
    it is not a tunable parameter and is pinned to 273.15 K.
    """

    c0: float = 299_792_458.0        # speed of light in vacuum [m/s]
    k_b: float = 1.380649e-23        # Boltzmann constant [J/K]
    h: float = 6.62607015e-34        # Planck constant [J s]
    r_gas: float = 8.314462618       # molar gas constant [J/(mol K)]
    n_a: float = 6.02214076e23       # Avogadro constant [1/mol]
    t_stp: float = 273.15            # standard temperature [K]


CONSTANTS = PhysicalConstants()

C0 = CONSTANTS.c0
K_B = CONSTANTS.k_b
PLANCK_H = CONSTANTS.h
R_GAS = CONSTANTS.r_gas
N_A = CONSTANTS.n_a
T_STP = CONSTANTS.t_stp
