"""CODATA 2018 constants, SI units."""

from dataclasses import dataclass


@dataclass(frozen=True)
class PhysicalConstants:
    hbar: float = 1.054571817e-34  # J s
    k_B: float = 1.380649e-23  # J/K
    c: float = 299792458.0  # m/s
    e_charge: float = 1.602176634e-19  # C
    m_e: float = 9.1093837015e-31  # kg
    eps_0: float = 8.8541878128e-12  # F/m
    N_A: float = 6.02214076e23  # 1/mol


CODATA2018 = PhysicalConstants()

HBAR = CODATA2018.hbar
K_B = CODATA2018.k_B
C = CODATA2018.c
EPS_0 = CODATA2018.eps_0
