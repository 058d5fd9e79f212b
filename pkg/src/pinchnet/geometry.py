"""Spatial model: cluster PPP, waveguides, preset antenna locations, users.

The typical cluster sits at the origin with its waveguide on the x-axis.
Interfering cluster centers form a PPP of intensity lam truncated to a disc
of radius R_sim; each interfering cluster carries its own uniformly
oriented waveguide and an independently sampled served user, which fixes
the activated preset antenna.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import InvalidParameterError

__all__ = [
    "SystemParams",
    "NetworkRealization",
    "default_params",
    "sample_ppp_disc",
    "ppp_disc_radii",
    "preset_locations",
    "preset_offsets",
    "nearest_preset",
    "nearest_preset_offset",
    "sample_cluster_user",
    "voronoi_cell_bounds",
    "antenna_user_distance",
    "sample_realization",
]

_PPP_CHUNK = 128  # exponential arrivals drawn this many at a time


@dataclass(frozen=True)
class SystemParams:
    """Physical and protocol parameters of the network.

    lam       cluster-center intensity (1/m^2)
    R         cluster radius (m)
    L         waveguide length (m)
    Np        number of preset antenna locations (odd)
    H         waveguide height above the user plane (m)
    beta      blockage density (1/m); P(LoS at range d) = exp(-beta d)
    alpha_L   LoS path-loss exponent
    alpha_N   NLoS path-loss exponent
    N_L, N_N  Nakagami shape integers for LoS / NLoS fading
    f_c       carrier frequency (Hz)
    sigma2    noise power (W)
    P         transmit power (W)
    Rbar      target rate (bits per channel use)
    Ku        users per cluster (>= 1; only one is served per block)
    """

    lam: float = 1e-6
    R: float = 20.0
    L: float = 10.0
    Np: int = 11
    H: float = 3.0
    beta: float = 0.01
    alpha_L: float = 2.0
    alpha_N: float = 3.0
    N_L: int = 3
    N_N: int = 2
    f_c: float = 28e9
    sigma2: float = 10 ** (-12.4)  # -94 dBm: -174 dBm/Hz over 100 MHz
    P: float = 0.1                 # 20 dBm
    Rbar: float = 1.0
    Ku: int = 1

    def __post_init__(self):
        if not isinstance(self.Np, (int, np.integer)) or self.Np < 1 or self.Np % 2 == 0:
            raise InvalidParameterError(f"Np must be an odd positive integer, got {self.Np!r}")
        if not self.lam >= 0:
            raise InvalidParameterError(f"lam must be >= 0, got {self.lam!r}")
        if not (self.R > 0 and self.L > 0 and self.H > 0):
            raise InvalidParameterError("R, L and H must be positive")
        if not self.L / 2 < self.R:
            raise InvalidParameterError(
                f"waveguide must fit in the cluster: L/2 = {self.L / 2} >= R = {self.R}")
        if not self.alpha_L >= 2:
            raise InvalidParameterError(f"alpha_L must be >= 2, got {self.alpha_L!r}")
        if not self.alpha_N >= self.alpha_L:
            raise InvalidParameterError("alpha_N must be >= alpha_L")
        for name in ("N_L", "N_N"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or v < 1:
                raise InvalidParameterError(f"{name} must be a positive integer, got {v!r}")
        if not (self.f_c > 0 and self.sigma2 > 0 and self.P > 0):
            raise InvalidParameterError("f_c, sigma2 and P must be positive")
        if not self.Rbar >= 0:
            raise InvalidParameterError(f"Rbar must be >= 0, got {self.Rbar!r}")
        if not isinstance(self.Ku, (int, np.integer)) or self.Ku < 1:
            raise InvalidParameterError(f"Ku must be an integer >= 1, got {self.Ku!r}")

    def with_(self, **kw) -> "SystemParams":
        """Copy with selected fields replaced."""
        return replace(self, **kw)


def default_params(**overrides) -> SystemParams:
    """Baseline parameter set (28 GHz, -94 dBm noise, 20 m clusters)."""
    return SystemParams(**overrides)


@dataclass
class NetworkRealization:
    """One sampled network snapshot around the typical cluster."""

    typical_user: np.ndarray           # (2,)
    typical_antenna: np.ndarray        # (2,), on [-L/2, L/2] x {0}
    interferer_antennas: np.ndarray    # (M, 2)


# -------------------- point process sampling --------------------

def ppp_disc_radii(lam: float, R_sim: float, rng: np.random.Generator) -> np.ndarray:
    """Ascending radii of a PPP of intensity lam on a disc of radius R_sim.

    Sorted squared radii of a disc PPP are the arrival times of a unit-rate
    Poisson process scaled by 1/(lam pi), so radii are generated from
    cumulative exponential increments drawn in fixed-size chunks.  With a
    fixed stream this nests: a larger R_sim reproduces every point of a
    smaller one and appends farther points.
    """
    if lam < 0:
        raise InvalidParameterError(f"lam must be >= 0, got {lam!r}")
    if not R_sim > 0:
        raise InvalidParameterError(f"R_sim must be positive, got {R_sim!r}")
    if lam == 0.0:
        return np.empty(0)
    limit = lam * math.pi * R_sim * R_sim
    chunks = []
    total = 0.0
    while True:
        c = rng.standard_exponential(_PPP_CHUNK)
        c[0] += total
        np.cumsum(c, out=c)
        total = c[-1]
        chunks.append(c)
        if total > limit:
            break
    arrivals = np.concatenate(chunks) if len(chunks) > 1 else chunks[0]
    arrivals = arrivals[arrivals <= limit]
    return np.sqrt(arrivals / (lam * math.pi))


def sample_ppp_disc(lam: float, R_sim: float, rng: np.random.Generator) -> np.ndarray:
    """Sample a PPP on the disc of radius R_sim; returns an (M, 2) array."""
    radii = ppp_disc_radii(lam, R_sim, rng)
    m = radii.size
    if m == 0:
        return np.empty((0, 2))
    ang = 2.0 * np.pi * rng.random(m)
    return np.column_stack((radii * np.cos(ang), radii * np.sin(ang)))


def sample_cluster_user(center, R: float, rng: np.random.Generator) -> np.ndarray:
    """Uniform point on the disc of radius R about center (sqrt transform)."""
    if not R > 0:
        raise InvalidParameterError(f"R must be positive, got {R!r}")
    r = R * math.sqrt(rng.random())
    a = 2.0 * math.pi * rng.random()
    return np.asarray(center, dtype=np.float64) + np.array([r * math.cos(a), r * math.sin(a)])


# -------------------- preset geometry --------------------

def preset_offsets(L: float, Np: int) -> np.ndarray:
    """Signed offsets of the Np presets along the waveguide axis.

    Offset of preset n (n = 1..Np) is (L/(Np-1)) (n - (Np+1)/2);
    a single preset sits at the center.
    """
    if Np % 2 == 0 or Np < 1:
        raise InvalidParameterError(f"Np must be an odd positive integer, got {Np!r}")
    if Np == 1:
        return np.zeros(1)
    n = np.arange(1, Np + 1, dtype=np.float64)
    return (L / (Np - 1)) * (n - (Np + 1) / 2.0)


def preset_locations(center, theta: float, L: float, Np: int) -> np.ndarray:
    """Planar coordinates of the Np preset locations on one waveguide."""
    offs = preset_offsets(L, Np)
    direction = np.array([math.cos(theta), math.sin(theta)])
    return np.asarray(center, dtype=np.float64) + offs[:, None] * direction[None, :]


def nearest_preset(user, presets) -> int:
    """Index of the preset closest to the user; ties go to the lowest index."""
    pts = np.asarray(presets, dtype=np.float64)
    if pts.size == 0:
        raise InvalidParameterError("presets must be non-empty")
    d2 = np.sum((pts - np.asarray(user, dtype=np.float64)) ** 2, axis=1)
    return int(np.argmin(d2))  # argmin returns the first minimum


def nearest_preset_offset(proj, L: float, Np: int):
    """Axis offset of the preset nearest to an axial coordinate proj.

    Closed form of the nearest-preset rule for points projected onto the
    waveguide axis; vectorized over proj.  Exact midpoint ties resolve to
    the lower-index (more negative) preset, matching nearest_preset.
    """
    if Np % 2 == 0 or Np < 1:
        raise InvalidParameterError(f"Np must be an odd positive integer, got {Np!r}")
    proj = np.asarray(proj, dtype=np.float64)
    if Np == 1:
        return np.zeros_like(proj)
    delta = L / (Np - 1)
    half = (Np - 1) // 2
    idx = np.clip(np.ceil(proj / delta - 0.5), -half, half)
    return idx * delta


# -------------------- Voronoi partition --------------------

def voronoi_cell_bounds(n: int, Np: int, L: float, R: float) -> tuple[float, float]:
    """x-interval (A_L, A_U) of the n-th preset's cell on the typical tile.

    Cells are indexed n = 1..Np left to right; boundary cells extend to
    -R / +R and interior boundaries are midpoints between adjacent presets.
    Requires Np >= 3 (the single-preset case has no partition).
    """
    if Np < 3 or Np % 2 == 0:
        raise InvalidParameterError(f"Np must be an odd integer >= 3, got {Np!r}")
    if not (isinstance(n, (int, np.integer)) and 1 <= n <= Np):
        raise InvalidParameterError(f"cell index n={n!r} out of range 1..{Np}")
    delta = L / (Np - 1)
    a_lo = -R if n == 1 else delta * (n - Np / 2.0 - 1.0)
    a_hi = R if n == Np else delta * (n - Np / 2.0)
    return float(a_lo), float(a_hi)


def antenna_user_distance(user, antenna, H: float) -> float:
    """3-D separation between a ground user and an antenna at height H."""
    du = np.asarray(user, dtype=np.float64) - np.asarray(antenna, dtype=np.float64)
    return math.sqrt(float(du @ du) + H * H)


# -------------------- full realization --------------------

def sample_realization(params: SystemParams, simcfg,
                       rng: np.random.Generator) -> NetworkRealization:
    """Sample the typical cluster and all interfering antennas.

    The typical cluster center is pinned at the origin (Slivnyak: it is not
    counted among the interferers) with its waveguide on the x-axis.  Every
    interfering cluster gets an independent orientation uniform on [0, pi),
    an independent served user uniform on its disc, and activates the
    preset nearest to that user.
    """
    R_sim = float(simcfg.R_sim)
    user = sample_cluster_user((0.0, 0.0), params.R, rng)
    ax = float(nearest_preset_offset(user[0], params.L, params.Np))
    typical_antenna = np.array([ax, 0.0])

    centers = sample_ppp_disc(params.lam, R_sim, rng)
    m = centers.shape[0]
    if m == 0:
        return NetworkRealization(user, typical_antenna, np.empty((0, 2)))

    theta = np.pi * rng.random(m)
    r_u = params.R * np.sqrt(rng.random(m))
    a_u = 2.0 * np.pi * rng.random(m)
    off_x = r_u * np.cos(a_u)
    off_y = r_u * np.sin(a_u)
    cos_t = np.cos(theta)
    sin_t = np.sin(theta)
    proj = off_x * cos_t + off_y * sin_t
    axial = nearest_preset_offset(proj, params.L, params.Np)
    antennas = centers + np.column_stack((axial * cos_t, axial * sin_t))
    return NetworkRealization(user, typical_antenna, antennas)
