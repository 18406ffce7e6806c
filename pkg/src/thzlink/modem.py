"""Constellations, spatial/index-modulation bit maps, pulses, ML detection.

Spatial-modulation bit fields are ordered [subarray | element | symbol]
and read little-endian within each field.  The generalized index-modulation
counter computes binomials exactly in wide integers and takes the floor of
their base-2 logarithm, the standard convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ThzLinkError


@dataclass(frozen=True)
class Constellation:
    """Unit-average-energy constellation with Gray bit labels.

    points[i] is the symbol whose bit label (little-endian integer) is i.
    """

    points: np.ndarray
    name: str = ""

    def __post_init__(self):
        points = np.asarray(self.points, dtype=complex)
        if points.ndim != 1 or points.size < 2:
            raise ValueError("constellation needs at least two points")
        if abs(np.mean(np.abs(points) ** 2) - 1.0) > 1e-12:
            raise ValueError("constellation must have unit average energy")
        object.__setattr__(self, "points", points)

    @property
    def order(self) -> int:
        return self.points.size

    @property
    def bits_per_symbol(self) -> int:
        return self.order.bit_length() - 1

    def nearest_index(self, value) -> int:
        return int(np.argmin(np.abs(self.points - value)))


def _gray_levels(bits: int) -> np.ndarray:
    """PAM levels indexed by Gray-decoded bit label."""
    m = 1 << bits
    levels = np.zeros(m)
    for label in range(m):
        gray = label ^ (label >> 1)
        levels[label] = 2 * gray - (m - 1)
    return levels


def square_qam(order: int) -> Constellation:
    """Square Gray-labeled QAM (order a power of 4) or BPSK for order 2."""
    if order == 2:
        return Constellation(points=np.array([-1.0 + 0j, 1.0 + 0j]), name="BPSK")
    n_bits = order.bit_length() - 1
    if order & (order - 1) or n_bits % 2:
        raise ValueError("square QAM requires the order to be a power of 4")
    half = n_bits // 2
    levels = _gray_levels(half)
    points = np.empty(order, dtype=complex)
    for label in range(order):
        i_label = label & ((1 << half) - 1)
        q_label = label >> half
        points[label] = levels[i_label] + 1j * levels[q_label]
    energy = np.mean(np.abs(points) ** 2)
    return Constellation(points=points / np.sqrt(energy), name=f"{order}-QAM")


@dataclass(frozen=True)
class IMConfig:
    """Spatial / generalized index-modulation resource counts."""

    m_t: int
    n_t: int
    q: int
    constellation: Constellation
    total_bands: int = None        # F: available narrow frequency bands
    active_bands: int = None       # F_bar: bands driven simultaneously
    total_antennas: int = None     # S: selectable antennas
    active_antennas: int = None

    def __post_init__(self):
        if min(self.m_t, self.n_t, self.q) < 1:
            raise ValueError("antenna counts must be >= 1")
        for total, active, name in (
            (self.total_bands, self.active_bands, "bands"),
            (self.total_antennas, self.active_antennas, "antennas"),
        ):
            if (total is None) != (active is None):
                raise ValueError(f"specify both total and active {name}")


def _require_power_of_two(value: int, name: str) -> int:
    if value < 1 or value & (value - 1):
        raise ThzLinkError(f"{name} = {value} is not a power of two")
    return value.bit_length() - 1


def sm_bit_count(cfg: IMConfig) -> int:
    """Bits per channel use: log2(Mt Nt) + log2(Q^2) + log2 |X|."""
    return (
        _require_power_of_two(cfg.m_t * cfg.n_t, "Mt*Nt")
        + _require_power_of_two(cfg.q * cfg.q, "Q^2")
        + _require_power_of_two(cfg.constellation.order, "|X|")
    )


def _floor_log2_comb(n: int, k: int) -> int:
    if k > n or k < 0:
        raise ThzLinkError(f"binomial arguments invalid: C({n}, {k})")
    return math.comb(n, k).bit_length() - 1


def gim_bit_count(cfg: IMConfig, swap_antenna_args: bool = False) -> int:
    """Generalized index-modulation bits per channel use.

    floor(log2 C(total_bands, active_bands)) + floor(log2 C(total_antennas,
    active_antennas)) + log2 |X|.  swap_antenna_args exposes the alternative
    reading with the antenna binomial's arguments reversed.
    """
    if cfg.total_bands is None or cfg.total_antennas is None:
        raise ValueError("generalized IM needs band and antenna counts")
    bits = _floor_log2_comb(cfg.total_bands, cfg.active_bands)
    if swap_antenna_args:
        bits += _floor_log2_comb(cfg.active_antennas, cfg.total_antennas)
    else:
        bits += _floor_log2_comb(cfg.total_antennas, cfg.active_antennas)
    return bits + _require_power_of_two(cfg.constellation.order, "|X|")


def unrank_combination(index: int, n: int, k: int) -> tuple:
    """index -> k-subset of range(n) in lexicographic order.

    Combinatorial number system; generalized index modulation maps only the
    first 2^floor(log2 C(n, k)) indices, leaving the remaining codewords
    unused.
    """
    total = math.comb(n, k)
    if not 0 <= index < total:
        raise ThzLinkError(f"combination index {index} out of range [0, {total})")
    chosen = []
    start = 0
    for slot in range(k):
        for candidate in range(start, n):
            block = math.comb(n - candidate - 1, k - slot - 1)
            if index < block:
                chosen.append(candidate)
                start = candidate + 1
                break
            index -= block
    return tuple(chosen)


def rank_combination(combo, n: int) -> int:
    """Inverse of unrank_combination."""
    combo = tuple(combo)
    k = len(combo)
    if any(b <= a for a, b in zip(combo, combo[1:])) or (
        combo and not 0 <= combo[0] <= combo[-1] < n
    ):
        raise ThzLinkError(f"not a sorted subset of range({n}): {combo}")
    index = 0
    prev = -1
    for slot, value in enumerate(combo):
        for skipped in range(prev + 1, value):
            index += math.comb(n - skipped - 1, k - slot - 1)
        prev = value
    return index


def _bits_to_int(bits) -> int:
    # little-endian: bit i carries weight 2^i
    return int(sum(int(b) << i for i, b in enumerate(bits)))


def _int_to_bits(value: int, width: int) -> list:
    return [(value >> i) & 1 for i in range(width)]


def sm_map(bits, cfg: IMConfig):
    """Split a bit string into (subarray index, element index, symbol).

    The string length must equal sm_bit_count(cfg); fields are ordered
    [subarray | element | symbol] and little-endian within each field.
    """
    n_sa_bits = _require_power_of_two(cfg.m_t * cfg.n_t, "Mt*Nt")
    n_ae_bits = _require_power_of_two(cfg.q * cfg.q, "Q^2")
    n_sym_bits = _require_power_of_two(cfg.constellation.order, "|X|")
    bits = [int(b) for b in bits]
    if len(bits) != n_sa_bits + n_ae_bits + n_sym_bits:
        raise ThzLinkError(
            f"expected {n_sa_bits + n_ae_bits + n_sym_bits} bits, got {len(bits)}"
        )
    if any(b not in (0, 1) for b in bits):
        raise ThzLinkError("bit values must be 0 or 1")
    sa_index = _bits_to_int(bits[:n_sa_bits])
    ae_index = _bits_to_int(bits[n_sa_bits : n_sa_bits + n_ae_bits])
    sym_index = _bits_to_int(bits[n_sa_bits + n_ae_bits :])
    return sa_index, ae_index, complex(cfg.constellation.points[sym_index])


def sm_demap(triple, cfg: IMConfig) -> list:
    """Invert sm_map exactly (symbol resolved to the nearest point)."""
    n_sa_bits = _require_power_of_two(cfg.m_t * cfg.n_t, "Mt*Nt")
    n_ae_bits = _require_power_of_two(cfg.q * cfg.q, "Q^2")
    n_sym_bits = _require_power_of_two(cfg.constellation.order, "|X|")
    sa_index, ae_index, symbol = triple
    if not 0 <= sa_index < cfg.m_t * cfg.n_t:
        raise ThzLinkError(f"subarray index {sa_index} out of range")
    if not 0 <= ae_index < cfg.q * cfg.q:
        raise ThzLinkError(f"element index {ae_index} out of range")
    sym_index = cfg.constellation.nearest_index(symbol)
    return (
        _int_to_bits(sa_index, n_sa_bits)
        + _int_to_bits(ae_index, n_ae_bits)
        + _int_to_bits(sym_index, n_sym_bits)
    )


@dataclass(frozen=True)
class PulseSpec:
    """Time-domain pulse: 'gaussian' or 'raised-cosine'."""

    kind: str
    amplitude: float = 1.0
    center: float = 0.0        # b [s], gaussian only
    spread: float = None       # T_p [s], gaussian only
    slot: float = None         # T [s]
    rolloff: float = None      # alpha in [0, 1), raised cosine only

    def __post_init__(self):
        if self.kind == "gaussian":
            if self.spread is None or self.slot is None:
                raise ValueError("gaussian pulse needs spread and slot")
            if not 0 < self.spread < self.slot:
                raise ValueError("gaussian pulse requires 0 < T_p < T")
        elif self.kind == "raised-cosine":
            if self.slot is None or self.rolloff is None:
                raise ValueError("raised cosine needs slot and rolloff")
            if not 0.0 <= self.rolloff < 1.0:
                raise ValueError("rolloff must lie in [0, 1)")
        else:
            raise ValueError(f"unknown pulse kind '{self.kind}'")


def gaussian_pulse(t, spec: PulseSpec):
    """p(t) = a exp(-(t - b)^2 / (2 T_p^2))."""
    if spec.kind != "gaussian":
        raise ValueError("spec is not a gaussian pulse")
    t = np.asarray(t, dtype=float)
    out = spec.amplitude * np.exp(-((t - spec.center) ** 2) / (2 * spec.spread**2))
    return float(out) if np.ndim(t) == 0 else out


def raised_cosine_pulse(t, spec: PulseSpec):
    """q(t) = sinc(t/T) cos(pi a t / T) / (1 - (2 a t / T)^2).

    The removable singularities at t = +-T/(2a) evaluate to the analytic
    limit (pi / 4) sinc(1 / (2a)); sinc is the normalized sin(pi x)/(pi x).
    """
    if spec.kind != "raised-cosine":
        raise ValueError("spec is not a raised-cosine pulse")
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    tn = t_arr / spec.slot
    denom = 1.0 - (2.0 * spec.rolloff * tn) ** 2
    out = np.empty_like(t_arr)
    singular = np.abs(denom) < 1e-10
    regular = ~singular
    out[regular] = (
        np.sinc(tn[regular]) * np.cos(np.pi * spec.rolloff * tn[regular])
        / denom[regular]
    )
    if singular.any():
        if spec.rolloff == 0.0:
            raise ValueError("zero rolloff cannot reach the singular point")
        out[singular] = (np.pi / 4.0) * np.sinc(1.0 / (2.0 * spec.rolloff))
    out *= spec.amplitude
    return float(out[0]) if np.ndim(t) == 0 else out


MAX_ML_CANDIDATES = 1 << 20


def ml_detect(y, h, candidates):
    """Exhaustive maximum-likelihood detection over an explicit lattice.

    Returns (best_index, best_candidate) minimizing ||y - H x||^2; exact
    ties resolve to the lowest lattice index.  The lattice must enumerate at
    most 2^20 candidates.
    """
    candidates = np.asarray(candidates, dtype=complex)
    if candidates.ndim != 2:
        raise ThzLinkError("candidates must be a (n_candidates, n_tx) array")
    if candidates.shape[0] > MAX_ML_CANDIDATES:
        raise ThzLinkError(
            f"lattice of {candidates.shape[0]} candidates exceeds "
            f"{MAX_ML_CANDIDATES}"
        )
    h = np.asarray(h, dtype=complex)
    y = np.asarray(y, dtype=complex)
    residuals = y[None, :] - candidates @ h.T
    metrics = np.sum(np.abs(residuals) ** 2, axis=1)
    best = int(np.argmin(metrics))
    return best, candidates[best]


def qam_lattice(constellation: Constellation, n_tx: int) -> np.ndarray:
    """All symbol vectors of length n_tx over the constellation, label order."""
    order = constellation.order
    if order**n_tx > MAX_ML_CANDIDATES:
        raise ThzLinkError("lattice too large to enumerate")
    grids = np.meshgrid(*([constellation.points] * n_tx), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=-1)
