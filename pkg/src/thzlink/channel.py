"""Channel synthesis: LoS, clustered NLoS, impairments, misalignment, IRS.

Subarray-level entries follow the spherical-wave-at-SA / plane-wave-at-AE
split: distances and angles are exact 3D quantities between subarray
centroids, while each subarray applies an ideal plane-wave steering vector.
All randomized synthesis is a deterministic function of (inputs, seed).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constants import C0
from .errors import ChannelError
from .geometry import (
    UNIT_GAIN,
    ArrayConfig,
    GainModel,
    antenna_gain,
    direction_vector,
    facing_rotation,
)
from .spectro.absorption import absorption_coefficient_exact
from .spectro.linelist import LineDatabase, Medium

CHANNEL_KINDS = ("LoS", "NLoS", "cascade")


@dataclass(frozen=True)
class ChannelMatrix:
    """Complex channel with frequency/distance metadata."""

    entries: np.ndarray
    frequency: float
    distance: float
    kind: str

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=complex)
        if not np.all(np.isfinite(entries)):
            raise ChannelError("channel entries must be finite")
        if self.kind not in CHANNEL_KINDS:
            raise ChannelError(f"kind must be one of {CHANNEL_KINDS}")
        object.__setattr__(self, "entries", entries)

    @property
    def shape(self):
        return self.entries.shape

    def condition_number(self) -> float:
        s = np.linalg.svd(self.entries, compute_uv=False)
        return float(s[0] / s[-1]) if s[-1] > 0 else np.inf


def los_path_gain(f, d, medium: Medium, db: LineDatabase, k_abs=None):
    """LoS path gain: spreading_loss * absorption_loss * propagation phase.

    alpha = c0 / (4 pi f d) * exp(-K(f) d / 2) * exp(-j 2 pi f d / c0).
    k_abs short-circuits the absorption evaluation when K(f) is already
    known (vectorized callers).
    """
    if np.any(np.asarray(d) <= 0):
        raise ChannelError("distance must be > 0")
    if k_abs is None:
        k_abs = absorption_coefficient_exact(f, medium, db)
    spreading = C0 / (4 * np.pi * f * np.asarray(d))
    return spreading * np.exp(-0.5 * k_abs * np.asarray(d)) * np.exp(
        -2j * np.pi * f * np.asarray(d) / C0
    )


def _check_facing(tx: ArrayConfig, rx: ArrayConfig):
    """Both boresights must point into the half space of the other array."""
    t0, r0 = np.asarray(tx.origin), np.asarray(rx.origin)
    sep = r0 - t0
    if np.linalg.norm(sep) == 0:
        raise ChannelError("arrays share the same origin")
    tx_fwd = tx.rotation[:, 0] @ sep
    rx_fwd = rx.rotation[:, 0] @ (-sep)
    if tx_fwd <= 0 or rx_fwd <= 0:
        raise ChannelError(
            "arrays do not face each other; pass override_facing=True to force"
        )


def _pair_inner(cfg: ArrayConfig, hit_angles, weight_angles, k_wave):
    """Inner product between the plane-wave response and the analog weights.

    Both vectors share the element grid, so the product reduces to the mean
    of exp(j k offsets . (u_hit - u_weight)).
    """
    if weight_angles is None or hit_angles == weight_angles:
        return 1.0 + 0.0j
    offsets = cfg.ae_offsets_local()
    du = direction_vector(*hit_angles) - direction_vector(*weight_angles)
    return np.mean(np.exp(1j * k_wave * (offsets @ du)))


def los_channel(
    tx: ArrayConfig,
    rx: ArrayConfig,
    medium: Medium,
    db: LineDatabase,
    tx_gain: GainModel = UNIT_GAIN,
    rx_gain: GainModel = UNIT_GAIN,
    frequency=None,
    beamforming="matched",
    level="sa",
    override_facing=False,
) -> ChannelMatrix:
    """LoS channel between two AoSAs.

    Each (rx SA, tx SA) pair uses its exact centroid distance and angles;
    entry = (b_r^H a_r) G_r alpha G_t (a_t^H b_t).  beamforming 'matched'
    points the analog weights at the pair's own angles (entry reduces to
    G_r G_t alpha); 'center' designs per-SA weights toward the opposing
    array's origin.  level 'sa' returns the (MrNr x MtNt) matrix; 'ae'
    expands each pair into its rank-one AE-level block.
    """
    if beamforming not in ("matched", "center"):
        raise ChannelError(f"unknown beamforming mode '{beamforming}'")
    if not override_facing:
        _check_facing(tx, rx)
    f = tx.carrier_frequency if frequency is None else frequency
    k_abs = float(absorption_coefficient_exact(f, medium, db))
    k_wave = 2 * np.pi * f / C0

    tx_centers = np.array([tx.sa_center_world(s) for s in tx.sa_indices()])
    rx_centers = np.array([rx.sa_center_world(s) for s in rx.sa_indices()])
    n_t, n_r = len(tx_centers), len(rx_centers)

    if level == "sa":
        h = np.zeros((n_r, n_t), dtype=complex)
    elif level == "ae":
        h = np.zeros((n_r * rx.q**2, n_t * tx.q**2), dtype=complex)
    else:
        raise ChannelError(f"unknown level '{level}'")

    tx_weight_angles = rx_weight_angles = None
    if beamforming == "center":
        tx_weight_angles = [
            _local_angles(tx, c, np.asarray(rx.origin)) for c in tx_centers
        ]
        rx_weight_angles = [
            _local_angles(rx, c, np.asarray(tx.origin)) for c in rx_centers
        ]

    for i in range(n_r):
        for j in range(n_t):
            sep = rx_centers[i] - tx_centers[j]
            d = np.linalg.norm(sep)
            if d == 0:
                raise ChannelError(f"rx SA {i} and tx SA {j} overlap (d = 0)")
            aod = _local_angles(tx, tx_centers[j], rx_centers[i])
            aoa = _local_angles(rx, rx_centers[i], tx_centers[j])
            alpha = los_path_gain(f, d, medium, db, k_abs=k_abs)
            g_t = antenna_gain(tx_gain, *aod)
            g_r = antenna_gain(rx_gain, *aoa)
            if level == "sa":
                s_t = _pair_inner(
                    tx,
                    aod,
                    tx_weight_angles[j] if tx_weight_angles else None,
                    k_wave,
                )
                s_r = _pair_inner(
                    rx,
                    aoa,
                    rx_weight_angles[i] if rx_weight_angles else None,
                    k_wave,
                )
                h[i, j] = np.conj(s_r) * g_r * alpha * g_t * s_t
            else:
                a_t = np.exp(
                    1j * k_wave * (tx.ae_offsets_local() @ direction_vector(*aod))
                ) / tx.q
                a_r = np.exp(
                    1j * k_wave * (rx.ae_offsets_local() @ direction_vector(*aoa))
                ) / rx.q
                block = g_r * alpha * g_t * np.outer(a_r, np.conj(a_t))
                h[
                    i * rx.q**2 : (i + 1) * rx.q**2,
                    j * tx.q**2 : (j + 1) * tx.q**2,
                ] = block

    d_center = float(
        np.linalg.norm(np.asarray(rx.origin) - np.asarray(tx.origin))
    )
    return ChannelMatrix(entries=h, frequency=f, distance=d_center, kind="LoS")


def _local_angles(cfg: ArrayConfig, from_point, to_point):
    v = cfg.rotation.T @ (np.asarray(to_point) - np.asarray(from_point))
    r = np.linalg.norm(v)
    theta = np.arccos(np.clip(v[2] / r, -1.0, 1.0))
    phi = np.arctan2(v[1], v[0])
    return float(phi), float(theta)


@dataclass(frozen=True)
class MultipathProfile:
    """Saleh-Valenzuela cluster/ray statistics.

    Arrival times are cumulative exponentials (cluster_rate, ray_rate in
    1/s); ray angle offsets follow a zero-mean two-component Gaussian
    mixture.  Cluster angles are uniform over the configured ranges.
    """

    n_clusters: int
    rays_per_cluster: object       # int, or one count per cluster
    cluster_decay: float           # Gamma [s]
    ray_decay: float               # gamma [s]
    cluster_rate: float = 2e8      # [1/s]
    ray_rate: float = 2e9          # [1/s]
    mixture_weights: tuple = (0.7, 0.3)
    mixture_sigmas: tuple = (0.03, 0.12)   # [rad]
    azimuth_range: tuple = (-np.pi / 3, np.pi / 3)
    elevation_range: tuple = (np.pi / 3, 2 * np.pi / 3)
    seed: int = 0

    def __post_init__(self):
        if self.n_clusters < 0:
            raise ValueError("cluster count must be >= 0")
        if isinstance(self.rays_per_cluster, int):
            counts = (self.rays_per_cluster,) * self.n_clusters
        else:
            counts = tuple(int(r) for r in self.rays_per_cluster)
            if len(counts) != self.n_clusters:
                raise ValueError("need one ray count per cluster")
        if any(r < 0 for r in counts):
            raise ValueError("ray counts must be >= 0")
        object.__setattr__(self, "rays_per_cluster", counts)
        if self.cluster_decay <= 0 or self.ray_decay <= 0:
            raise ValueError("decay constants must be > 0")
        if abs(sum(self.mixture_weights) - 1.0) > 1e-9:
            raise ValueError("mixture weights must sum to 1")

    def ray_count(self, cluster: int) -> int:
        return self.rays_per_cluster[cluster]


def _mixture_offset(rng, profile, size):
    comp = rng.random(size) < profile.mixture_weights[0]
    sigma = np.where(comp, profile.mixture_sigmas[0], profile.mixture_sigmas[1])
    return rng.standard_normal(size) * sigma


def sv_nlos_channel(
    tx: ArrayConfig,
    rx: ArrayConfig,
    medium: Medium,
    db: LineDatabase,
    profile: MultipathProfile,
    tx_gain: GainModel = UNIT_GAIN,
    rx_gain: GainModel = UNIT_GAIN,
    frequency=None,
) -> ChannelMatrix:
    """Clustered multipath channel (double sum over clusters and rays).

    Ray gains are complex Gaussian with mean power
    (c0 / 4 pi f d)^2 e^{-K d} e^{-tau_v / Gamma} e^{-tau_ray / gamma}
    evaluated at the array-center distance d; subarray phases apply the
    plane-wave array response at the ray angles.  Deterministic per seed.
    """
    f = tx.carrier_frequency if frequency is None else frequency
    rng = np.random.default_rng(profile.seed)
    n_t, n_r = tx.n_sa, rx.n_sa
    h = np.zeros((n_r, n_t), dtype=complex)
    d = float(np.linalg.norm(np.asarray(rx.origin) - np.asarray(tx.origin)))
    if profile.n_clusters == 0:
        return ChannelMatrix(entries=h, frequency=f, distance=d, kind="NLoS")

    k_abs = float(absorption_coefficient_exact(f, medium, db))
    k_wave = 2 * np.pi * f / C0
    base_power = (C0 / (4 * np.pi * f * d)) ** 2 * np.exp(-k_abs * d)
    tx_centers = np.array([tx.sa_center_local(s) for s in tx.sa_indices()])
    rx_centers = np.array([rx.sa_center_local(s) for s in rx.sa_indices()])

    tau_c = 0.0
    for v in range(profile.n_clusters):
        if v > 0:
            tau_c += rng.exponential(1.0 / profile.cluster_rate)
        caz_t = rng.uniform(*profile.azimuth_range)
        cel_t = rng.uniform(*profile.elevation_range)
        caz_r = rng.uniform(*profile.azimuth_range)
        cel_r = rng.uniform(*profile.elevation_range)
        tau_r = 0.0
        for u in range(profile.ray_count(v)):
            if u > 0:
                tau_r += rng.exponential(1.0 / profile.ray_rate)
            daz_t, del_t, daz_r, del_r = _mixture_offset(rng, profile, 4)
            aod = (caz_t + daz_t, cel_t + del_t)
            aoa = (caz_r + daz_r, cel_r + del_r)
            mean_power = (
                base_power
                * np.exp(-tau_c / profile.cluster_decay)
                * np.exp(-tau_r / profile.ray_decay)
            )
            alpha = np.sqrt(mean_power / 2) * (
                rng.standard_normal() + 1j * rng.standard_normal()
            )
            g_t = antenna_gain(tx_gain, *aod)
            g_r = antenna_gain(rx_gain, *aoa)
            if g_t == 0.0 and g_r == 0.0:
                continue
            e_t = np.exp(1j * k_wave * (tx_centers @ direction_vector(*aod)))
            e_r = np.exp(1j * k_wave * (rx_centers @ direction_vector(*aoa)))
            h += alpha * g_r * g_t * np.outer(np.conj(e_r), e_t)

    return ChannelMatrix(entries=h, frequency=f, distance=d, kind="NLoS")


@dataclass(frozen=True)
class MisalignmentConfig:
    """Gaussian-profile pointing loss h_ma = A0 exp(-2 r^2 / w_eq^2).

    The radial offset r is either fixed (radial_offset) or Rayleigh
    distributed with scale offset_sigma; alpha_mu = (alpha, mu) switches on
    the stochastic path-gain factor h_st (unit mean square), which
    otherwise defaults to 1.
    """

    a0: float
    w_eq: float                # equivalent beamwidth [m]
    radial_offset: float = None
    offset_sigma: float = None
    alpha_mu: tuple = None
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.a0 <= 1:
            raise ValueError("A0 must be in (0, 1]")
        if self.w_eq <= 0:
            raise ValueError("w_eq must be > 0")
        if self.radial_offset is not None and self.radial_offset < 0:
            raise ValueError("radial offset must be >= 0")
        if self.radial_offset is None and self.offset_sigma is None:
            raise ValueError("provide radial_offset or offset_sigma")


def misalignment_factor(cfg: MisalignmentConfig, d, rng=None) -> float:
    """Collected-power fraction in (0, A0] for the configured offset."""
    if cfg.radial_offset is not None:
        r = cfg.radial_offset
    else:
        rng = np.random.default_rng(cfg.seed) if rng is None else rng
        r = cfg.offset_sigma * np.sqrt(-2.0 * np.log(rng.random()))
    return float(cfg.a0 * np.exp(-2.0 * r**2 / cfg.w_eq**2))


def sample_alpha_mu(alpha, mu, rng, size=None):
    """alpha-mu fading amplitude samples normalized to unit mean square."""
    y = rng.gamma(shape=mu, scale=1.0 / mu, size=size)
    x = y ** (1.0 / alpha)
    from scipy.special import gamma as gamma_fn

    mean_sq = gamma_fn(mu + 2.0 / alpha) / (gamma_fn(mu) * mu ** (2.0 / alpha))
    return x / np.sqrt(mean_sq)


def effective_channel(
    cm: ChannelMatrix, cfg: MisalignmentConfig, rng=None
) -> ChannelMatrix:
    """h_eff = h * h_ma * h_st applied to every entry."""
    rng = np.random.default_rng(cfg.seed) if rng is None else rng
    h_ma = misalignment_factor(cfg, cm.distance, rng=rng)
    h_st = 1.0
    if cfg.alpha_mu is not None:
        h_st = float(sample_alpha_mu(*cfg.alpha_mu, rng=rng))
    return ChannelMatrix(
        entries=cm.entries * (h_ma * h_st),
        frequency=cm.frequency,
        distance=cm.distance,
        kind=cm.kind,
    )


@dataclass(frozen=True)
class ImpairmentConfig:
    """Transceiver distortion-noise coefficients (Gaussian model)."""

    eta_t: float
    eta_r: float
    avg_power: float           # p_dot [W]
    seed: int = 0

    def __post_init__(self):
        if self.eta_t < 0 or self.eta_r < 0:
            raise ValueError("impairment coefficients must be >= 0")
        if self.avg_power <= 0:
            raise ValueError("average power must be > 0")


def _cn(rng, var, size):
    scale = np.sqrt(np.asarray(var) / 2.0)
    return scale * (rng.standard_normal(size) + 1j * rng.standard_normal(size))


def apply_impairments(h, x, cfg: ImpairmentConfig, noise_var, rng=None):
    """y = H (x + n_t) + n_f + n with Gaussian distortion terms.

    n_t has per-entry variance eta_t^2 p_dot; n_f has per-entry variance
    eta_r^2 p_dot |h|^2 where |h|^2 is the mean energy of the matching
    receive row (matrix generalization of the scalar model); n is AWGN of
    variance noise_var.  Deterministic for a fixed seed.
    """
    h = h.entries if isinstance(h, ChannelMatrix) else np.asarray(h, dtype=complex)
    x = np.asarray(x, dtype=complex)
    if x.shape[0] != h.shape[1]:
        raise ChannelError(
            f"symbol vector length {x.shape[0]} does not match {h.shape[1]} columns"
        )
    rng = np.random.default_rng(cfg.seed) if rng is None else rng
    n_t = _cn(rng, cfg.eta_t**2 * cfg.avg_power, h.shape[1])
    row_energy = np.mean(np.abs(h) ** 2, axis=1)
    n_f = _cn(rng, cfg.eta_r**2 * cfg.avg_power * row_energy, h.shape[0])
    n = _cn(rng, noise_var, h.shape[0])
    return h @ (x + n_t) + n_f + n


@dataclass(frozen=True)
class IRSConfig:
    """Passive reflecting surface: per-element gain beta and phase Omega."""

    m_i: int
    n_i: int
    element_spacing: float     # Delta_2 [m]
    position: tuple
    gains: np.ndarray = None       # beta in [0, 1], scalar or (M_i N_i,)
    phases: np.ndarray = None      # Omega [rad]
    orientation: tuple = None
    binary: bool = False

    def __post_init__(self):
        if self.m_i < 1 or self.n_i < 1:
            raise ValueError("IRS grid dimensions must be >= 1")
        n_el = self.m_i * self.n_i
        gains = np.ones(n_el) if self.gains is None else np.broadcast_to(
            np.asarray(self.gains, dtype=float), (n_el,)
        ).copy()
        phases = np.zeros(n_el) if self.phases is None else np.broadcast_to(
            np.asarray(self.phases, dtype=float), (n_el,)
        ).copy()
        if np.any(gains < 0) or np.any(gains > 1):
            raise ValueError("element gains must lie in [0, 1]")
        if self.binary and not np.all(np.isin(gains, (0.0, 1.0))):
            raise ValueError("binary mode requires element gains in {0, 1}")
        object.__setattr__(self, "gains", gains)
        object.__setattr__(self, "phases", phases)

    @property
    def n_elements(self) -> int:
        return self.m_i * self.n_i

    def reflection_matrix(self) -> np.ndarray:
        return np.diag(self.gains * np.exp(1j * self.phases))

    def as_array_config(self, frequency) -> ArrayConfig:
        orientation = self.orientation
        return ArrayConfig(
            m=self.m_i,
            n=self.n_i,
            q=1,
            sa_spacing=self.element_spacing,
            ae_spacing=C0 / frequency / 2,
            carrier_frequency=frequency,
            origin=self.position,
            orientation=orientation,
        )


def irs_cascade(
    tx: ArrayConfig,
    irs: IRSConfig,
    rx: ArrayConfig,
    medium: Medium,
    db: LineDatabase,
    tx_gain: GainModel = UNIT_GAIN,
    rx_gain: GainModel = UNIT_GAIN,
    frequency=None,
    override_facing=False,
) -> ChannelMatrix:
    """Cascaded channel H_IR Phi H_TI through a reflecting surface.

    Both segments reuse the LoS synthesis (exact per-pair geometry), so the
    closed-form segment approximations are superseded by exact phases.  An
    IRS without explicit orientation is turned to face the midpoint between
    the two arrays.
    """
    f = tx.carrier_frequency if frequency is None else frequency
    irs_cfg = irs
    if irs.orientation is None:
        midpoint = (np.asarray(tx.origin) + np.asarray(rx.origin)) / 2.0
        rot = facing_rotation(np.asarray(irs.position), midpoint)
        irs_cfg = IRSConfig(
            m_i=irs.m_i,
            n_i=irs.n_i,
            element_spacing=irs.element_spacing,
            position=irs.position,
            gains=irs.gains,
            phases=irs.phases,
            orientation=tuple(map(tuple, rot)),
            binary=irs.binary,
        )
    plane = irs_cfg.as_array_config(f)
    h_ti = los_channel(
        tx,
        plane,
        medium,
        db,
        tx_gain=tx_gain,
        rx_gain=UNIT_GAIN,
        frequency=f,
        override_facing=override_facing,
    )
    h_ir = los_channel(
        plane,
        rx,
        medium,
        db,
        tx_gain=UNIT_GAIN,
        rx_gain=rx_gain,
        frequency=f,
        override_facing=override_facing,
    )
    cascade = h_ir.entries @ irs_cfg.reflection_matrix() @ h_ti.entries
    return ChannelMatrix(
        entries=cascade,
        frequency=f,
        distance=h_ti.distance + h_ir.distance,
        kind="cascade",
    )
