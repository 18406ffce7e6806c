"""Array-of-subarrays geometry, steering vectors, gains, and spacing rules.

Coordinate convention: an array lies in its local y-z plane with boresight
along local +x.  Azimuth phi is measured in the x-y plane from +x, elevation
theta from the local +z axis, so a direction unit vector is
(cos phi sin theta, sin phi sin theta, cos theta) and boresight is
(phi, theta) = (0, pi/2).  Subarray (m, n) indices are 1-based, m along
local y and n along local z; antenna elements within a subarray follow the
same pattern on the finer delta grid.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .constants import C0
from .errors import GeometryError, GratingLobeWarning


def direction_vector(phi, theta):
    """Unit vector for azimuth phi and elevation theta [rad]."""
    return np.array(
        [np.cos(phi) * np.sin(theta), np.sin(phi) * np.sin(theta), np.cos(theta)]
    )


def facing_rotation(origin, target, roll_reference=(0.0, 0.0, 1.0)):
    """Rotation matrix whose local +x (boresight) points from origin to target.

    Columns are the local axes expressed in world coordinates; local z stays
    as close to roll_reference as orthogonality allows.
    """
    origin = np.asarray(origin, dtype=float)
    x = np.asarray(target, dtype=float) - origin
    norm = np.linalg.norm(x)
    if norm == 0:
        raise GeometryError("cannot orient an array toward its own origin")
    x = x / norm
    ref = np.asarray(roll_reference, dtype=float)
    z = ref - np.dot(ref, x) * x
    zn = np.linalg.norm(z)
    if zn < 1e-12:
        ref = np.array([0.0, 1.0, 0.0])
        z = ref - np.dot(ref, x) * x
        zn = np.linalg.norm(z)
    z = z / zn
    y = np.cross(z, x)
    return np.column_stack([x, y, z])


@dataclass(frozen=True)
class ArrayConfig:
    """AoSA geometry: M x N subarrays of Q x Q elements each."""

    m: int
    n: int
    q: int
    sa_spacing: float          # Delta [m]
    ae_spacing: float          # delta [m]
    carrier_frequency: float   # [Hz]
    origin: tuple = (0.0, 0.0, 0.0)
    orientation: tuple = None  # 3x3 rotation, columns = local axes in world

    def __post_init__(self):
        if min(self.m, self.n, self.q) < 1:
            raise GeometryError("M, N, Q must all be >= 1")
        if self.sa_spacing <= 0 or self.ae_spacing <= 0:
            raise GeometryError("spacings must be > 0")
        if self.carrier_frequency <= 0:
            raise GeometryError("carrier frequency must be > 0")
        if self.orientation is None:
            object.__setattr__(self, "orientation", tuple(map(tuple, np.eye(3))))
        else:
            rot = np.asarray(self.orientation, dtype=float)
            if rot.shape != (3, 3) or not np.allclose(rot @ rot.T, np.eye(3), atol=1e-9):
                raise GeometryError("orientation must be a 3x3 rotation matrix")
            object.__setattr__(self, "orientation", tuple(map(tuple, rot)))
        object.__setattr__(self, "origin", tuple(float(v) for v in self.origin))
        if self.ae_spacing > self.wavelength / 2 + 1e-15:
            warnings.warn(
                f"AE spacing {self.ae_spacing:.4g} m exceeds lambda/2 = "
                f"{self.wavelength / 2:.4g} m; grating lobes will arise",
                GratingLobeWarning,
                stacklevel=2,
            )

    @property
    def wavelength(self) -> float:
        return C0 / self.carrier_frequency

    @property
    def n_sa(self) -> int:
        return self.m * self.n

    @property
    def rotation(self) -> np.ndarray:
        return np.asarray(self.orientation, dtype=float)

    @property
    def aperture(self) -> float:
        """Largest physical extent of the array [m]."""
        dy = (self.m - 1) * self.sa_spacing + (self.q - 1) * self.ae_spacing
        dz = (self.n - 1) * self.sa_spacing + (self.q - 1) * self.ae_spacing
        return float(np.hypot(dy, dz))

    def sa_indices(self):
        """All (m, n) pairs in row-major flat order."""
        return [(mi, ni) for mi in range(1, self.m + 1) for ni in range(1, self.n + 1)]

    def sa_flat_index(self, sa_index) -> int:
        mi, ni = self._check_sa(sa_index)
        return (mi - 1) * self.n + (ni - 1)

    def _check_sa(self, sa_index):
        mi, ni = sa_index
        if not (1 <= mi <= self.m and 1 <= ni <= self.n):
            raise GeometryError(
                f"subarray index {sa_index} out of range for {self.m}x{self.n} grid"
            )
        return mi, ni

    def sa_center_local(self, sa_index) -> np.ndarray:
        """Subarray centroid in the local frame (x = 0 plane)."""
        mi, ni = self._check_sa(sa_index)
        return np.array(
            [
                0.0,
                (mi - (self.m + 1) / 2) * self.sa_spacing,
                (ni - (self.n + 1) / 2) * self.sa_spacing,
            ]
        )

    def sa_center_world(self, sa_index) -> np.ndarray:
        return np.asarray(self.origin) + self.rotation @ self.sa_center_local(sa_index)

    def ae_offsets_local(self) -> np.ndarray:
        """(Q^2, 3) element offsets from a subarray centroid, local frame."""
        idx = np.arange(1, self.q + 1) - (self.q + 1) / 2
        py, pz = np.meshgrid(idx, idx, indexing="ij")
        out = np.zeros((self.q * self.q, 3))
        out[:, 1] = py.ravel() * self.ae_spacing
        out[:, 2] = pz.ravel() * self.ae_spacing
        return out

    def world_angles_to(self, point) -> tuple:
        """(azimuth, elevation) of a world-frame point seen from the array."""
        v = self.rotation.T @ (np.asarray(point, dtype=float) - np.asarray(self.origin))
        r = np.linalg.norm(v)
        if r == 0:
            raise GeometryError("target coincides with array origin")
        theta = np.arccos(np.clip(v[2] / r, -1.0, 1.0))
        phi = np.arctan2(v[1], v[0])
        return float(phi), float(theta)


def ae_positions(cfg: ArrayConfig, sa_index) -> np.ndarray:
    """World coordinates of the Q^2 elements of one subarray, (Q^2, 3)."""
    center = cfg.sa_center_local(sa_index)
    local = center + cfg.ae_offsets_local()
    return np.asarray(cfg.origin) + local @ cfg.rotation.T


@dataclass(frozen=True)
class SteeringVector:
    """Unit-norm per-subarray steering/beamforming vector."""

    values: np.ndarray          # (Q^2,) complex, each entry magnitude 1/Q
    azimuth: float
    elevation: float

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=complex))


def _phase_projection(cfg: ArrayConfig, sa_index, phi, theta) -> np.ndarray:
    offsets = cfg.sa_center_local(sa_index) + cfg.ae_offsets_local()
    return offsets @ direction_vector(phi, theta)


def steering_vector(cfg: ArrayConfig, sa_index, phi, theta, frequency=None):
    """Ideal subarray steering vector: entries exp(j Phi_pq) / Q.

    Phi_pq = (2 pi / lambda) (psi_x cos phi sin theta + psi_y sin phi
    sin theta + psi_z cos theta) with psi the element coordinates in the
    local frame.  Norm is exactly 1.
    """
    f = cfg.carrier_frequency if frequency is None else frequency
    proj = _phase_projection(cfg, sa_index, phi, theta)
    values = np.exp(2j * np.pi * f / C0 * proj) / cfg.q
    return SteeringVector(values=values, azimuth=phi, elevation=theta)


def beamforming_vector(cfg: ArrayConfig, sa_index, phi_hat, theta_hat, frequency=None):
    """Analog per-subarray weights; same construction at the target angles."""
    return steering_vector(cfg, sa_index, phi_hat, theta_hat, frequency=frequency)


def beam_split_phase(phase_at_fc, f_k, f_c):
    """Phase of a subcarrier under beam split: Phi(f_k) = (f_k / f_c) Phi(f_c)."""
    if f_c <= 0:
        raise ValueError("center frequency must be > 0")
    return (f_k / f_c) * np.asarray(phase_at_fc)


def equivalent_array_gain(
    cfg: ArrayConfig,
    true_angles,
    target_angles,
    frequency=None,
    weight_frequency=None,
):
    """Subarray-level equivalent array response.

    (1 / sqrt(M N)) * sum over subarrays of exp(j (2 pi / lambda)
    (P(phi, theta) - P_hat(phi_hat, theta_hat))), with P the projection of
    each subarray's reference point (its centroid) onto the direction
    vector.  weight_frequency evaluates the target phases at a different
    frequency than the channel (beam-split studies); default is matched.
    Magnitude is bounded by sqrt(M N), attained when all phases agree.
    """
    f = cfg.carrier_frequency if frequency is None else frequency
    f_w = f if weight_frequency is None else weight_frequency
    u_true = direction_vector(*true_angles)
    u_tgt = direction_vector(*target_angles)
    centers = np.array([cfg.sa_center_local(s) for s in cfg.sa_indices()])
    phases = 2 * np.pi / C0 * (f * centers @ u_true - f_w * centers @ u_tgt)
    return np.sum(np.exp(1j * phases)) / np.sqrt(cfg.n_sa)


@dataclass(frozen=True)
class GainModel:
    """Antenna gain: ideal sector, HPBW approximation, or fixed.

    mode 'sector': amplitude sqrt(G0) inside the configured bounds, 0 outside.
    mode 'approximate': G0 = 4 pi / (hpbw_az * hpbw_el), sector spanning the
    half-power beamwidths around boresight (phi = 0, theta = pi / 2).
    mode 'fixed': sqrt(G0) at every angle.
    """

    mode: str = "fixed"
    g0: float = 1.0
    phi_bounds: tuple = (-np.pi, np.pi)
    theta_bounds: tuple = (0.0, np.pi)
    hpbw_az: float = None
    hpbw_el: float = None

    def __post_init__(self):
        if self.mode not in ("sector", "approximate", "fixed"):
            raise ValueError(f"unknown gain mode '{self.mode}'")
        if self.mode == "approximate":
            if not (self.hpbw_az and self.hpbw_el):
                raise ValueError("approximate mode needs hpbw_az and hpbw_el")
            g0 = 4 * np.pi / (self.hpbw_az * self.hpbw_el)
            object.__setattr__(self, "g0", g0)
            object.__setattr__(
                self, "phi_bounds", (-self.hpbw_az / 2, self.hpbw_az / 2)
            )
            object.__setattr__(
                self,
                "theta_bounds",
                (np.pi / 2 - self.hpbw_el / 2, np.pi / 2 + self.hpbw_el / 2),
            )
        if self.g0 <= 0:
            raise ValueError("G0 must be > 0")
        if not (
            self.phi_bounds[0] <= self.phi_bounds[1]
            and self.theta_bounds[0] <= self.theta_bounds[1]
        ):
            raise ValueError("sector bounds must be well ordered")

    def peak_gain_dbi(self) -> float:
        return 10 * np.log10(self.g0)


UNIT_GAIN = GainModel(mode="fixed", g0=1.0)


def antenna_gain(model: GainModel, phi, theta) -> float:
    """Linear amplitude gain at (phi, theta): sqrt(G0) in sector, else 0."""
    if model.mode == "fixed":
        return float(np.sqrt(model.g0))
    in_sector = (
        model.phi_bounds[0] <= phi <= model.phi_bounds[1]
        and model.theta_bounds[0] <= theta <= model.theta_bounds[1]
    )
    return float(np.sqrt(model.g0)) if in_sector else 0.0


def rayleigh_distance(m, n, delta_r, delta_t, wavelength) -> float:
    """d_Ray = max(M, N) * Delta_r * Delta_t / lambda."""
    if min(m, n) < 1 or min(delta_r, delta_t, wavelength) <= 0:
        raise ValueError("all arguments must be positive")
    return max(m, n) * delta_r * delta_t / wavelength


def optimal_sa_spacing(z, distance, wavelength, m) -> float:
    """Eigenchannel-orthogonalizing spacing Delta_opt = sqrt(z D lambda / M)."""
    if int(z) != z or z <= 0 or z % 2 == 0:
        raise ValueError("z must be an odd positive integer")
    if distance <= 0 or wavelength <= 0 or m < 1:
        raise ValueError("distance, wavelength, M must be positive")
    return float(np.sqrt(z * distance * wavelength / m))


def fresnel_region(d, aperture, wavelength) -> str:
    """Classify a range: 'near-reactive', 'fresnel', or 'far-field'.

    Fresnel region is 0.62 sqrt(D^3 / lambda) <= d < 2 D^2 / lambda; the
    lower boundary belongs to the Fresnel region, the upper to the far field.
    """
    if d <= 0 or aperture <= 0 or wavelength <= 0:
        raise ValueError("all arguments must be positive")
    lower = 0.62 * np.sqrt(aperture**3 / wavelength)
    upper = 2 * aperture**2 / wavelength
    if d >= upper:
        return "far-field"
    if d >= lower:
        return "fresnel"
    return "near-reactive"
