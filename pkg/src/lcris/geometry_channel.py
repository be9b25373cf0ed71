"""Array geometry, steering vectors, and Rician geometry channels.

Conventions (fixed and relied on by the tests):

* A UPA lies in the local y-z plane of its frame; the boresight is local +x.
  The local frame is built from the boresight with global +z as the up
  reference (global +x when the boresight is near-vertical).
* ``AngleTuple = (elevation, azimuth)`` in radians measured in that frame:
  boresight is (0, 0), elevation is arcsin of the local-z component, azimuth
  is atan2(local-y, local-x).
* Steering entry for element (p, q), p along y and q along z, is
  ``exp(j*2*pi*spacing*(p*sin(az)*cos(el) + q*sin(el)))``; elements are
  flattened row-major with ``n = p*n_z + q``.
* Randomness comes from numpy's ``default_rng`` (PCG64).  Draw order inside a
  channel matrix: one standard-normal block for the real parts, then one for
  the imaginary parts.  ``build_scenario_channels`` draws the BS-RIS matrix
  first, then per user the RIS-user and BS-user vectors, so a seed pins the
  whole ChannelSet bit-for-bit.
"""

import csv
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import GeometryError


class AngleTuple(NamedTuple):
    elevation: float  # rad
    azimuth: float    # rad


@dataclass(frozen=True)
class ArraySpec:
    """Uniform planar array: n_y x n_z elements, spacing in wavelengths."""

    n_y: int = 1
    n_z: int = 1
    spacing_wavelengths: float = 0.5
    position: tuple = (0.0, 0.0, 0.0)   # m, global frame
    orientation: tuple = (1.0, 0.0, 0.0)  # boresight direction, global frame

    def __post_init__(self):
        if self.n_y < 1 or self.n_z < 1:
            raise ValueError("array needs at least one element per axis")
        if not self.spacing_wavelengths > 0.0:
            raise ValueError("element spacing must be positive")
        pos = tuple(float(x) for x in self.position)
        ori = np.asarray(self.orientation, dtype=float)
        if len(pos) != 3 or ori.shape != (3,):
            raise ValueError("position/orientation must be 3-vectors")
        norm = np.linalg.norm(ori)
        if norm == 0.0 or not np.all(np.isfinite(ori)):
            raise GeometryError("orientation must be a nonzero finite vector")
        # skip the division for already-unit input so normalization is
        # idempotent and specs survive a dump/parse round trip bit-exactly
        if abs(norm - 1.0) > 1e-12:
            ori = ori / norm
        object.__setattr__(self, "position", pos)
        object.__setattr__(self, "orientation", tuple(float(x) for x in ori))

    @property
    def size(self):
        return self.n_y * self.n_z


@dataclass(frozen=True)
class LinkParams:
    """Large-scale statistics of one link."""

    k_factor: float          # Rician K (linear); 0 = Rayleigh, inf = pure LOS
    pathloss_exponent: float
    ref_gain_db: float = -61.0
    ref_distance_m: float = 1.0

    def __post_init__(self):
        if self.k_factor < 0.0:
            raise ValueError("k_factor must be >= 0")
        if self.pathloss_exponent < 0.0:
            raise ValueError("pathloss_exponent must be >= 0")
        if not self.ref_distance_m > 0.0:
            raise ValueError("ref_distance_m must be positive")


@dataclass(frozen=True)
class ChannelSet:
    """All channels of one scenario draw, plus the geometry they came from."""

    h_direct: np.ndarray    # (K, N_t): BS-user k vector, h^H enters the link
    H_bs_ris: np.ndarray    # (N, N_t)
    h_ris_user: np.ndarray  # (K, N)
    bs_aod: AngleTuple      # departure at BS toward RIS
    ris_aoa: AngleTuple     # arrival at RIS from BS
    ris_aod: tuple          # per user: departure at RIS toward user
    bs_array: ArraySpec
    ris_array: ArraySpec

    def __post_init__(self):
        k, n_t = self.h_direct.shape
        n = self.ris_array.size
        if self.H_bs_ris.shape != (n, self.bs_array.size) or n_t != self.bs_array.size:
            raise ValueError("channel dimensions inconsistent with array specs")
        if self.h_ris_user.shape != (k, n) or len(self.ris_aod) != k:
            raise ValueError("per-user channel dimensions inconsistent")
        for arr in (self.h_direct, self.H_bs_ris, self.h_ris_user):
            if not np.all(np.isfinite(arr.view(float))):
                raise ValueError("channels must be finite")

    @property
    def n_users(self):
        return self.h_direct.shape[0]


def _local_frame(orientation):
    x = np.asarray(orientation, dtype=float)
    norm = np.linalg.norm(x)
    if norm == 0.0:
        raise GeometryError("zero-length boresight")
    x = x / norm
    up = np.array([0.0, 0.0, 1.0])
    if abs(x @ up) > 1.0 - 1e-9:  # boresight (anti)parallel to global z
        up = np.array([1.0, 0.0, 0.0])
    z = up - (up @ x) * x
    z = z / np.linalg.norm(z)
    y = np.cross(z, x)
    return x, y, z


def angles_between(from_pos, to_pos, orientation):
    """(elevation, azimuth) of to_pos as seen from from_pos along a boresight."""
    d = np.asarray(to_pos, dtype=float) - np.asarray(from_pos, dtype=float)
    dist = np.linalg.norm(d)
    if dist == 0.0:
        raise GeometryError("coincident endpoints have no direction")
    d = d / dist
    x, y, z = _local_frame(orientation)
    elevation = np.arcsin(np.clip(d @ z, -1.0, 1.0))
    azimuth = np.arctan2(d @ y, d @ x)
    return AngleTuple(float(elevation), float(azimuth))


def position_from_angles(origin, orientation, angles, range_m):
    """Inverse of angles_between: the point at (elevation, azimuth, range)."""
    if not range_m > 0.0:
        raise GeometryError("range must be positive")
    x, y, z = _local_frame(orientation)
    el, az = angles
    d = np.cos(el) * np.cos(az) * x + np.cos(el) * np.sin(az) * y + np.sin(el) * z
    return np.asarray(origin, dtype=float) + range_m * d


def steering_vector(array, angles):
    """Unit-modulus UPA steering vector, flattened with n = p*n_z + q."""
    el, az = angles
    p = np.arange(array.n_y)[:, np.newaxis]
    q = np.arange(array.n_z)[np.newaxis, :]
    phase = 2.0 * np.pi * array.spacing_wavelengths * (
        p * np.sin(az) * np.cos(el) + q * np.sin(el))
    return np.exp(1j * phase).reshape(array.size)


def pathloss_gain(link, distance_m):
    """Linear power gain ref_gain * (d/d0)^(-eta)."""
    if not distance_m > 0.0:
        raise ValueError("distance must be positive")
    return 10.0 ** (link.ref_gain_db / 10.0) \
        * (distance_m / link.ref_distance_m) ** (-link.pathloss_exponent)


def rician_channel(rng_seed, link, tx_array, rx_array, aod, aoa, distance_m):
    """One (N_rx, N_tx) Rician draw with a geometric LOS component.

    H = sqrt(Kf/(Kf+1)) * sqrt(g) * a_rx a_tx^H + sqrt(1/(Kf+1)) * H_nlos,
    with per-entry nLOS variance g (so E||H||_F^2 = N_rx*N_tx*g for any Kf).
    Kf = inf short-circuits to the exact LOS matrix with no random draw.
    """
    rng = np.random.default_rng(rng_seed)
    g = pathloss_gain(link, distance_m)
    a_rx = steering_vector(rx_array, aoa)
    a_tx = steering_vector(tx_array, aod)
    h_los = np.sqrt(g) * np.outer(a_rx, a_tx.conj())
    if np.isinf(link.k_factor):
        return h_los
    shape = (rx_array.size, tx_array.size)
    h_nlos = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) \
        * np.sqrt(g / 2.0)
    kf = link.k_factor
    return np.sqrt(kf / (kf + 1.0)) * h_los + np.sqrt(1.0 / (kf + 1.0)) * h_nlos


def build_scenario_channels(config, rng_seed):
    """Draw every channel of a scenario from one seed.

    Users sit at ``user_range_m`` from the RIS along the configured
    (elevation, azimuth) directions in the RIS frame.  The direct BS-user
    vectors are scaled by the blockage factor (0 = fully blocked).
    """
    rng = np.random.default_rng(rng_seed)
    bs, ris = config.bs_array, config.ris_array
    bs_pos = np.asarray(bs.position)
    ris_pos = np.asarray(ris.position)

    bs_aod = angles_between(bs_pos, ris_pos, bs.orientation)
    ris_aoa = angles_between(ris_pos, bs_pos, ris.orientation)
    h_t = rician_channel(rng, config.links["bs_ris"], bs, ris, bs_aod, ris_aoa,
                         float(np.linalg.norm(ris_pos - bs_pos)))

    h_r, h_d, ris_aod = [], [], []
    for el_deg, az_deg in config.user_directions_deg:
        direction = AngleTuple(np.deg2rad(el_deg), np.deg2rad(az_deg))
        user_pos = position_from_angles(ris_pos, ris.orientation, direction,
                                        config.user_range_m)
        user = ArraySpec(1, 1, ris.spacing_wavelengths, tuple(user_pos))
        aod_k = angles_between(ris_pos, user_pos, ris.orientation)
        ris_aod.append(aod_k)
        g_ru = rician_channel(rng, config.links["ris_ue"], ris, user, aod_k,
                              AngleTuple(0.0, 0.0), config.user_range_m)
        h_r.append(g_ru[0].conj())  # column vector h with h^H = the 1 x N row
        bs_ue_aod = angles_between(bs_pos, user_pos, bs.orientation)
        g_du = rician_channel(rng, config.links["bs_ue"], bs, user, bs_ue_aod,
                              AngleTuple(0.0, 0.0),
                              float(np.linalg.norm(user_pos - bs_pos)))
        h_d.append(config.blockage * g_du[0].conj())

    return ChannelSet(
        h_direct=np.array(h_d),
        H_bs_ris=h_t,
        h_ris_user=np.array(h_r),
        bs_aod=bs_aod,
        ris_aoa=ris_aoa,
        ris_aod=tuple(ris_aod),
        bs_array=bs,
        ris_array=ris,
    )


def channels_to_csv(channels, path):
    """Dump a ChannelSet to CSV: channel,user,row,col,re,im (user -1 = n/a)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["channel", "user", "row", "col", "re", "im"])
        for i, j in np.ndindex(channels.H_bs_ris.shape):
            v = channels.H_bs_ris[i, j]
            writer.writerow(["H_bs_ris", -1, i, j, repr(v.real), repr(v.imag)])
        for name, block in (("h_direct", channels.h_direct),
                            ("h_ris_user", channels.h_ris_user)):
            for k, j in np.ndindex(block.shape):
                v = block[k, j]
                writer.writerow([name, k, 0, j, repr(v.real), repr(v.imag)])
