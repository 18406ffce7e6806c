"""Precoding stacks and rate evaluation.

Covers digital zero-forcing, the dynamic-AoSA hybrid factorization
(per-block unit-modulus analog precoder behind a switch mask, digital
water-filled stage), coarse precoder-output quantization, and power-domain
NOMA superposition.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import RankDeficiencyError, ThzLinkError

LN2 = np.log(2.0)


def full_mask(n_sa: int) -> np.ndarray:
    """Every RF chain switched to every subarray."""
    return np.ones((n_sa, n_sa), dtype=bool)


def fixed_mask(n_sa: int) -> np.ndarray:
    """Classic AoSA wiring: chain i drives subarray i only."""
    return np.eye(n_sa, dtype=bool)


def single_chain_mask(n_sa: int, chain: int = 0) -> np.ndarray:
    """All subarrays on one chain; the remaining chains are idle."""
    mask = np.zeros((n_sa, n_sa), dtype=bool)
    mask[:, chain] = True
    return mask


@dataclass(frozen=True)
class PrecoderSet:
    """Analog/digital precoders and combiners with their connection mask."""

    p_a: np.ndarray           # (n_sa q^2, n_sa) analog precoder
    p_d: np.ndarray           # (n_sa, n_s) digital precoder
    c_a: np.ndarray = None    # receive-side mirrors (optional)
    c_d: np.ndarray = None
    mask: np.ndarray = None   # (n_sa, n_chain) boolean

    def effective(self) -> np.ndarray:
        return self.p_a @ self.p_d


def zf_precoder(h, power: float, rcond: float = 1e-10) -> np.ndarray:
    """Zero-forcing (right pseudo-inverse) precoder scaled to a power budget.

    H @ W is proportional to the identity on the selected streams; raises
    RankDeficiencyError naming the smallest singular value when H is not
    full row rank at the rcond threshold.
    """
    h = np.asarray(h, dtype=complex)
    s = np.linalg.svd(h, compute_uv=False)
    if s[-1] <= rcond * s[0]:
        raise RankDeficiencyError(float(s[-1]))
    w = h.conj().T @ np.linalg.inv(h @ h.conj().T)
    scale = np.sqrt(power / np.sum(np.abs(w) ** 2))
    return scale * w


def water_fill(gains, total_power: float, tol: float = 1e-10) -> np.ndarray:
    """Water-filling power allocation by bisection on the water level.

    gains are the per-channel SNR slopes g_i (rate log2(1 + g_i p_i));
    returns powers summing to total_power (zeros where the level is below
    1/g_i).
    """
    g = np.asarray(gains, dtype=float)
    powers = np.zeros_like(g)
    active = g > 0
    if total_power <= 0 or not active.any():
        return powers
    inv = 1.0 / g[active]
    lo = float(inv.min())
    hi = float(inv.max() + total_power)
    while hi - lo > tol * max(1.0, hi):
        mu = 0.5 * (lo + hi)
        if np.sum(np.maximum(mu - inv, 0.0)) > total_power:
            hi = mu
        else:
            lo = mu
    mu = 0.5 * (lo + hi)
    alloc = np.maximum(mu - inv, 0.0)
    excess = total_power - alloc.sum()
    if excess > 0 and (alloc > 0).any():  # distribute bisection slack
        alloc[alloc > 0] += excess / np.count_nonzero(alloc > 0)
    powers[active] = alloc
    return powers


def build_analog_precoder(h, mask, q: int) -> np.ndarray:
    """Per-block analog stage: matched phases to singular vectors.

    Entries within a connected (subarray, chain) block are unit modulus
    scaled by 1 / (q sqrt(n_j)) with n_j the number of subarrays on chain j,
    so every active column has unit norm; entries outside the mask are 0.
    A chain matches the phases of the dominant right singular vector of its
    connected column block; chains sharing an identical connectivity pattern
    cycle through successive singular vectors, otherwise their columns would
    coincide and the effective channel would collapse to rank one.
    """
    h = np.asarray(h, dtype=complex)
    mask = np.asarray(mask, dtype=bool)
    n_sa, n_chain = mask.shape
    block = q * q
    if h.shape[1] != n_sa * block:
        raise ThzLinkError(
            f"channel has {h.shape[1]} columns, mask expects {n_sa * block}"
        )
    p_a = np.zeros((n_sa * block, n_chain), dtype=complex)
    pattern_count = {}
    for j in range(n_chain):
        connected = np.flatnonzero(mask[:, j])
        if connected.size == 0:
            continue
        pattern = tuple(connected)
        rank_pick = pattern_count.get(pattern, 0)
        pattern_count[pattern] = rank_pick + 1
        cols = np.concatenate(
            [np.arange(s * block, (s + 1) * block) for s in connected]
        )
        sub = h[:, cols]
        _, _, vh = np.linalg.svd(sub, full_matrices=False)
        phases = np.angle(vh[min(rank_pick, vh.shape[0] - 1)].conj())
        p_a[cols, j] = np.exp(1j * phases) / (q * np.sqrt(connected.size))
    return p_a


def build_digital_precoder(h, p_a, power, noise_var, n_s) -> np.ndarray:
    """Water-filled digital stage on the effective channel.

    The effective channel is H restricted to the analog stage's range:
    powers are water-filled along the singular modes of H Q with Q an
    orthonormal basis of col(P_A), and the resulting precoder is pulled
    back through P_A.  The product then satisfies ||P_A P_D||_F^2 = N_s
    whenever any power flows.
    """
    h = np.asarray(h, dtype=complex)
    q_basis, r = np.linalg.qr(p_a)
    diag = np.abs(np.diag(r))
    keep = diag > 1e-12 * max(1.0, diag.max())
    q_basis = q_basis[:, keep]
    p_d = np.zeros((p_a.shape[1], n_s), dtype=complex)
    if q_basis.shape[1] == 0:
        return p_d
    h_eff = h @ q_basis
    _, s, vh = np.linalg.svd(h_eff, full_matrices=False)
    n_modes = min(n_s, s.size)
    a = power / (n_s * noise_var)
    powers = water_fill(a * s[:n_modes] ** 2, float(n_s))
    g = q_basis @ (vh.conj().T[:, :n_modes] * np.sqrt(powers))
    sol, *_ = np.linalg.lstsq(p_a, g, rcond=None)
    p_d[:, :n_modes] = sol
    return p_d


def daosa_rate(h, p_a, p_d, power, noise_var, n_s, mask=None, q=None):
    """Achievable rate log2 |I + (p / (N_s sigma^2)) H P P^H H^H| [b/s/Hz].

    The determinant is evaluated at the N_s x N_s size via
    |I + A B| = |I + B A|.  When mask and q are given, entries of P_A
    outside the switch mask must be exactly zero.
    """
    h = np.asarray(h, dtype=complex)
    p_a = np.asarray(p_a, dtype=complex)
    p_d = np.asarray(p_d, dtype=complex)
    if power < 0 or noise_var <= 0:
        raise ValueError("power must be >= 0 and noise variance > 0")
    if mask is not None:
        if q is None:
            raise ValueError("mask validation needs the per-subarray size q")
        expanded = np.repeat(np.asarray(mask, dtype=bool), q * q, axis=0)
        if np.any(np.abs(p_a[~expanded]) > 1e-12):
            raise ThzLinkError("analog precoder violates the connection mask")
    g = h @ p_a @ p_d
    m = np.eye(g.shape[1], dtype=complex) + (power / (n_s * noise_var)) * (
        g.conj().T @ g
    )
    sign, logdet = np.linalg.slogdet(m)
    if not np.isfinite(logdet) or sign.real <= 0:
        raise ThzLinkError("rate determinant is not finite and positive")
    return max(float(logdet / LN2), 0.0)


def build_combiners(h, mask, q: int, n_s: int):
    """Receive-side mirror of the two-stage construction.

    Applies the analog/digital heuristic to the reversed link H^H (receive
    subarrays behind the same switch-mask shape), so C_A carries the
    per-block unit-modulus structure and C_D selects n_s streams.
    """
    h = np.asarray(h, dtype=complex)
    c_a = build_analog_precoder(h.conj().T, mask, q)
    h_eff = c_a.conj().T @ h
    u, _, _ = np.linalg.svd(h_eff, full_matrices=True)
    c_d = u[:, :n_s]
    return c_a, c_d


def daosa_switch_search(h, masks, power, noise_var, n_s, q: int,
                        rx_mask=None):
    """Best switch mask under the two-stage heuristic precoders.

    Evaluates every candidate mask (analog: per-block matched phases;
    digital: water-filling on the effective channel), returning
    (best_index, PrecoderSet, rate).  Ties resolve to the lowest mask index.
    rx_mask (receive subarrays x chains) shapes the mirrored combiners;
    by default the receive side is fully connected.
    """
    if len(masks) == 0:
        raise ValueError("candidate mask set is empty")
    h = np.asarray(h, dtype=complex)
    best = None
    for idx, mask in enumerate(masks):
        p_a = build_analog_precoder(h, mask, q)
        p_d = build_digital_precoder(h, p_a, power, noise_var, n_s)
        rate = daosa_rate(h, p_a, p_d, power, noise_var, n_s)
        if best is None or rate > best[4] + 1e-12:
            best = (idx, mask, p_a, p_d, rate)
    idx, mask, p_a, p_d, rate = best
    n_rx_sa = h.shape[0] // (q * q)
    rx = full_mask(n_rx_sa) if rx_mask is None else np.asarray(rx_mask)
    c_a, c_d = build_combiners(h, rx, q, n_s)
    pset = PrecoderSet(p_a=p_a, p_d=p_d, c_a=c_a, c_d=c_d, mask=np.asarray(mask))
    return idx, pset, rate


def quantize_phases(p_a, bits: int) -> np.ndarray:
    """Snap analog-precoder phases to a 2^bits uniform grid.

    Models digitally controlled phase shifters; magnitudes (and the zero
    pattern of the switch mask) are preserved.  Phase shifters are
    infinite-resolution by default, so this is opt-in.
    """
    if bits < 1:
        raise ValueError("need at least one phase bit")
    p_a = np.asarray(p_a, dtype=complex)
    n_levels = 1 << bits
    step = 2 * np.pi / n_levels
    snapped = np.round(np.angle(p_a) / step) * step
    return np.where(p_a == 0, 0, np.abs(p_a) * np.exp(1j * snapped))


@dataclass(frozen=True)
class QuantizerSpec:
    """Finite precoder-output alphabet: labels applied to I and Q parts."""

    labels: tuple

    def __post_init__(self):
        labels = tuple(float(l) for l in self.labels)
        if len(labels) < 2:
            raise ValueError("need at least two quantization labels")
        if any(b <= a for a, b in zip(labels, labels[1:])):
            raise ValueError("labels must be strictly increasing")
        object.__setattr__(self, "labels", labels)


def quantize_precoder_output(x, spec: QuantizerSpec) -> np.ndarray:
    """Map each component's I/Q parts to the nearest label (ties go low)."""
    labels = np.asarray(spec.labels)
    midpoints = (labels[:-1] + labels[1:]) / 2.0
    x = np.asarray(x, dtype=complex)

    def snap(v):
        return labels[np.searchsorted(midpoints, v, side="left")]

    return snap(x.real) + 1j * snap(x.imag)


@dataclass(frozen=True)
class NomaConfig:
    """Power-domain superposition layout: dims nonincreasing, powers rising."""

    stream_dims: tuple
    powers: tuple
    power_budget: float = None

    def __post_init__(self):
        dims = tuple(int(s) for s in self.stream_dims)
        powers = tuple(float(p) for p in self.powers)
        if len(dims) != len(powers) or not dims:
            raise ValueError("stream_dims and powers must align and be nonempty")
        if any(b > a for a, b in zip(dims, dims[1:])):
            raise ValueError("stream dimensions must be nonincreasing")
        if any(b <= a for a, b in zip(powers, powers[1:])):
            raise ValueError("powers must increase with the stream index")
        if self.power_budget is not None:
            if sum(p * s for p, s in zip(powers, dims)) > self.power_budget + 1e-12:
                raise ValueError("per-stream powers exceed the total budget")
        object.__setattr__(self, "stream_dims", dims)
        object.__setattr__(self, "powers", powers)


def noma_superpose(streams, h):
    """Compose y0 = sum_i H_i x_i for power-multiplexed streams.

    streams is a list of (x_i, p_i, S_i) with S_i nonincreasing and
    S_1 equal to the number of transmit subarrays; H_i is the submatrix of
    the last S_i columns.  Symbols are expected pre-scaled so that
    E[|x|^2] = p_i per entry (unit-energy constellation times sqrt(p_i)).
    Returns (y0, [H_i]).
    """
    h = np.asarray(h, dtype=complex)
    n_tx = h.shape[1]
    dims = [s for _, _, s in streams]
    if not dims or dims[0] != n_tx:
        raise ThzLinkError("first stream must span all transmit subarrays")
    if any(b > a for a, b in zip(dims, dims[1:])):
        raise ThzLinkError("stream dimensions must be nonincreasing")
    y0 = np.zeros(h.shape[0], dtype=complex)
    submatrices = []
    for x_i, _, s_i in streams:
        x_i = np.asarray(x_i, dtype=complex)
        if x_i.shape[0] != s_i:
            raise ThzLinkError(
                f"stream of dim {s_i} got symbol vector of length {x_i.shape[0]}"
            )
        h_i = h[:, n_tx - s_i :]
        submatrices.append(h_i)
        y0 = y0 + h_i @ x_i
    return y0, submatrices


def two_user_noma_model(h1, h2, x1, x2, noise):
    """Two-user downlink superposition: each user receives both streams.

    y1 = H1 x1 + H1 x2 + n1 and y2 = H2 x1 + H2 x2 + n2; noise is the pair
    (n1, n2) of receiver noise vectors.
    """
    h1 = np.asarray(h1, dtype=complex)
    h2 = np.asarray(h2, dtype=complex)
    x1 = np.asarray(x1, dtype=complex)
    x2 = np.asarray(x2, dtype=complex)
    n1, n2 = noise
    if x1.shape != x2.shape or h1.shape[1] != x1.shape[0] or h2.shape[1] != x1.shape[0]:
        raise ThzLinkError("stream/channel dimensions do not agree")
    y1 = h1 @ x1 + h1 @ x2 + np.asarray(n1, dtype=complex)
    y2 = h2 @ x1 + h2 @ x2 + np.asarray(n2, dtype=complex)
    return y1, y2
