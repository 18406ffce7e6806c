"""thzlink: link-level simulation of terahertz ultra-massive-MIMO systems.

Modules
-------
spectro    line-list ingestion, molecular absorption, absorption noise
geometry   AoSA geometry, steering vectors, antenna gains, spacing rules
channel    LoS / clustered-NLoS / IRS channel synthesis and impairments
phy        hybrid precoding, rate evaluation, quantization, NOMA
modem      constellations, spatial/index modulation, pulses, ML detection
sensing    absorption-based gas-concentration estimation
cli        scenario runner producing CSV result tables
"""

__version__ = "0.1.0"
