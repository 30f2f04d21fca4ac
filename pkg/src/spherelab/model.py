"""Constellations, the i.i.d. Rayleigh MIMO channel, and QR reduction to
the upper-triangular detection problem.

Symbols live on an exact integer grid scaled to unit average energy, so
pairwise squared difference norms are exact rationals ``q / denominator``.
The analytic engine keys its dynamic program on these integers; floating
keys would fragment its state space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "CLASS_ZERO",
    "CLASS_REAL",
    "CLASS_IMAG",
    "CLASS_GENERAL",
    "Constellation",
    "ProfileEntry",
    "DifferenceProfile",
    "SystemConfig",
    "DecodeProblem",
    "make_constellation",
    "difference_profile",
    "make_rng",
    "child_rng",
    "sigma2_from_snr_db",
    "snr_db_from_sigma2",
    "sample_channel",
    "qr_reduce",
    "build_problem",
    "realize_batch",
]

# component classes of a pairwise symbol difference
CLASS_ZERO = "zero"
CLASS_REAL = "real"  # purely real, nonzero
CLASS_IMAG = "imag"  # purely imaginary, nonzero
CLASS_GENERAL = "general"  # nonzero real and imaginary part


@dataclass(frozen=True, eq=False)
class Constellation:
    """Finite complex symbol alphabet with unit average energy.

    ``points = (grid_re + 1j*grid_im) / sqrt(energy_scale)`` where the grid
    coordinates are integers, so squared point differences are exact
    multiples of ``1/energy_scale``.
    """

    label: str
    points: np.ndarray
    grid: np.ndarray
    energy_scale: int

    @property
    def size(self) -> int:
        return self.points.size

    def min_sq_distance(self) -> float:
        """Smallest nonzero squared distance between two symbols."""
        d = self.points[:, None] - self.points[None, :]
        sq = np.abs(d) ** 2
        return float(sq[sq > 1e-12].min())


def _square_grid(levels) -> np.ndarray:
    # ascending (re, im) order keeps symbol indexing deterministic
    pts = [(a, b) for a in levels for b in levels]
    return np.array(pts, dtype=np.int64)


_GRIDS = {
    "bpsk": (np.array([[-1, 0], [1, 0]], dtype=np.int64), 1),
    "4qam": (_square_grid((-1, 1)), 2),
    "16qam": (_square_grid((-3, -1, 1, 3)), 10),
}


def make_constellation(label: str) -> Constellation:
    """Build a named unit-energy constellation (``bpsk``, ``4qam``, ``16qam``)."""
    key = label.lower()
    if key not in _GRIDS:
        raise ValueError(f"unknown constellation {label!r}; supported: {sorted(_GRIDS)}")
    grid, scale = _GRIDS[key]
    points = (grid[:, 0] + 1j * grid[:, 1]) / math.sqrt(scale)
    c = Constellation(label=key, points=points, grid=grid, energy_scale=scale)
    _validate_constellation(c)
    return c


def _validate_constellation(c: Constellation) -> None:
    if c.points.size == 0:
        raise ValueError("constellation is empty")
    if abs(c.points.mean()) > 1e-12:
        raise ValueError("constellation is not zero mean")
    if abs(np.mean(np.abs(c.points) ** 2) - 1.0) > 1e-12:
        raise ValueError("constellation does not have unit average energy")
    if len({(a, b) for a, b in c.grid.tolist()}) != c.size:
        raise ValueError("constellation points are not distinct")


@dataclass(frozen=True)
class ProfileEntry:
    """One class of ordered pairwise symbol differences.

    ``sq_norm / denominator`` (denominator held by the profile) is the exact
    squared magnitude, ``weight`` the number of ordered pairs producing it.
    """

    sq_norm: int
    weight: int
    component_class: str


@dataclass(frozen=True, eq=False)
class DifferenceProfile:
    """Multiset of ordered pairwise symbol differences, grouped by
    (exact squared norm, component class)."""

    entries: tuple
    denominator: int
    alphabet_size: int

    @property
    def sq_norms(self) -> np.ndarray:
        return np.array([e.sq_norm for e in self.entries], dtype=np.int64)

    @property
    def weights(self) -> np.ndarray:
        return np.array([e.weight for e in self.entries], dtype=np.int64)

    @property
    def classes(self) -> tuple:
        return tuple(e.component_class for e in self.entries)

    @property
    def max_sq_distance(self) -> float:
        """Largest squared pairwise distance in the scalar constellation."""
        return int(self.sq_norms.max()) / self.denominator


def _component_class(dre: int, dim: int) -> str:
    if dre == 0 and dim == 0:
        return CLASS_ZERO
    if dim == 0:
        return CLASS_REAL
    if dre == 0:
        return CLASS_IMAG
    return CLASS_GENERAL


def difference_profile(c: Constellation) -> DifferenceProfile:
    """Group all ``size**2`` ordered symbol differences by exact squared
    norm and component class."""
    grid = c.grid
    counts: dict = {}
    for a in grid:
        for b in grid:
            dre = int(a[0] - b[0])
            dim = int(a[1] - b[1])
            key = (dre * dre + dim * dim, _component_class(dre, dim))
            counts[key] = counts.get(key, 0) + 1
    # reduce int/energy_scale to the smallest common denominator
    g = c.energy_scale
    for (sq, _cls) in counts:
        g = math.gcd(g, sq)
    g = max(g, 1)
    entries = tuple(
        ProfileEntry(sq_norm=sq // g, weight=w, component_class=cls)
        for (sq, cls), w in sorted(counts.items())
    )
    return DifferenceProfile(
        entries=entries, denominator=c.energy_scale // g, alphabet_size=c.size
    )


# ---------------------------------------------------------------------------
# random streams
# ---------------------------------------------------------------------------


def make_rng(seed: int) -> np.random.Generator:
    """Root random stream; a fixed seed reproduces realizations bit-exactly."""
    return np.random.default_rng(seed)


def child_rng(seed: int, *path: int) -> np.random.Generator:
    """Independent child stream keyed by ``(seed, *path)``.

    Trial runners derive one stream per (grid point, block) so that results
    do not depend on scheduling or worker count.
    """
    return np.random.default_rng([int(seed), *map(int, path)])


# ---------------------------------------------------------------------------
# system configuration and channel
# ---------------------------------------------------------------------------


def sigma2_from_snr_db(snr_db: float) -> float:
    """Noise variance for a given SNR in dB (``rho = 1/sigma^2``)."""
    return 10.0 ** (-float(snr_db) / 10.0)


def snr_db_from_sigma2(sigma2: float) -> float:
    return -10.0 * math.log10(sigma2)


@dataclass(frozen=True, eq=False)
class SystemConfig:
    """MIMO system: M transmit / N receive antennas, noise variance, alphabet."""

    M: int
    N: int
    sigma2: float
    constellation: Constellation

    def __post_init__(self):
        if not (self.N >= self.M >= 1):
            raise ValueError(f"need N >= M >= 1, got M={self.M}, N={self.N}")
        if not self.sigma2 > 0:
            raise ValueError("sigma2 must be positive")

    @property
    def L(self) -> int:
        return self.N - self.M

    @property
    def snr_db(self) -> float:
        return snr_db_from_sigma2(self.sigma2)


def sample_channel(cfg: SystemConfig, rng: np.random.Generator) -> np.ndarray:
    """One N x M channel with i.i.d. circularly symmetric complex Gaussian
    entries of variance 1/M."""
    std = math.sqrt(1.0 / (2.0 * cfg.M))
    return std * (
        rng.standard_normal((cfg.N, cfg.M)) + 1j * rng.standard_normal((cfg.N, cfg.M))
    )


def qr_reduce(H: np.ndarray):
    """QR decomposition with real nonnegative diagonal of R.

    Accepts a single ``(N, M)`` matrix or a stack ``(..., N, M)``.  Returns
    the complete ``Q`` (``(..., N, N)``) and the ``M x M`` upper-triangular
    ``R`` whose diagonal has been rotated real and nonnegative; the rotation
    is absorbed into the corresponding columns of ``Q``.
    """
    Q, Rfull = np.linalg.qr(H, mode="complete")
    M = H.shape[-1]
    R = Rfull[..., :M, :]
    diag = np.diagonal(R, axis1=-2, axis2=-1)
    mag = np.abs(diag)
    phase = np.where(mag > 0, diag / np.where(mag > 0, mag, 1.0), 1.0)
    R = R * np.conj(phase)[..., :, None]
    Q = Q.copy()
    Q[..., :, :M] *= phase[..., None, :]
    return Q, R


@dataclass(frozen=True, eq=False)
class DecodeProblem:
    """Upper-triangular detection problem ``y = [R; 0] d' + n``.

    ``truth``/``truth_index`` keep the transmitted vector for scoring; they
    are never consulted by the decoders.
    """

    R: np.ndarray
    y: np.ndarray
    M: int
    N: int
    sigma2: float
    constellation: Constellation
    truth: np.ndarray
    truth_index: np.ndarray

    def __post_init__(self):
        if self.R.shape != (self.M, self.M):
            raise ValueError("R must be M x M")
        if self.y.shape != (self.N,):
            raise ValueError("y must have length N")
        low = np.tril(self.R, -1)
        if np.abs(low).max(initial=0.0) > 1e-12 * max(1.0, np.abs(self.R).max()):
            raise ValueError("R is not upper triangular")

    @property
    def L(self) -> int:
        return self.N - self.M


def _symbol_indices(c: Constellation, d: np.ndarray) -> np.ndarray:
    idx = np.empty(d.shape, dtype=np.int64)
    for i, v in enumerate(np.asarray(d)):
        matches = np.flatnonzero(np.abs(c.points - v) < 1e-9)
        if matches.size != 1:
            raise ValueError(f"symbol {v} is not a constellation point")
        idx[i] = matches[0]
    return idx


def build_problem(
    H: np.ndarray,
    d_true: np.ndarray,
    cfg: SystemConfig,
    rng: np.random.Generator,
    noise: np.ndarray | None = None,
) -> DecodeProblem:
    """Reduce one channel/data/noise realization to a DecodeProblem.

    The receive vector is ``r = H d_true + w`` with ``w`` i.i.d. complex
    Gaussian of variance ``sigma2`` (drawn from ``rng`` unless ``noise`` is
    supplied), and ``y = Q^H r``.
    """
    H = np.asarray(H, dtype=np.complex128)
    if H.shape != (cfg.N, cfg.M):
        raise ValueError(f"channel must be {cfg.N} x {cfg.M}, got {H.shape}")
    d_true = np.asarray(d_true, dtype=np.complex128)
    if d_true.shape != (cfg.M,):
        raise ValueError("d_true must have length M")
    idx = _symbol_indices(cfg.constellation, d_true)
    if noise is None:
        std = math.sqrt(cfg.sigma2 / 2.0)
        noise = std * (
            rng.standard_normal(cfg.N) + 1j * rng.standard_normal(cfg.N)
        )
    else:
        noise = np.asarray(noise, dtype=np.complex128)
        if noise.shape != (cfg.N,):
            raise ValueError("noise must have length N")
    Q, R = qr_reduce(H)
    y = Q.conj().T @ (H @ d_true + noise)
    return DecodeProblem(
        R=R,
        y=y,
        M=cfg.M,
        N=cfg.N,
        sigma2=cfg.sigma2,
        constellation=cfg.constellation,
        truth=d_true,
        truth_index=idx,
    )


def realize_batch(cfg: SystemConfig, rng: np.random.Generator, count: int):
    """Draw ``count`` independent (channel, data, noise) realizations and
    reduce them.

    Returns ``(R, y, d_index)`` with shapes ``(count, M, M)``,
    ``(count, N)`` and ``(count, M)``.  Draw order is fixed (channel, data,
    noise) so a given stream reproduces the same realizations bit-exactly.
    """
    M, N = cfg.M, cfg.N
    cstd = math.sqrt(1.0 / (2.0 * M))
    H = cstd * (
        rng.standard_normal((count, N, M)) + 1j * rng.standard_normal((count, N, M))
    )
    d_index = rng.integers(0, cfg.constellation.size, size=(count, M))
    nstd = math.sqrt(cfg.sigma2 / 2.0)
    w = nstd * (rng.standard_normal((count, N)) + 1j * rng.standard_normal((count, N)))
    Q, R = qr_reduce(H)
    d = cfg.constellation.points[d_index]
    r = np.einsum("tnm,tm->tn", H, d) + w
    y = np.einsum("tnm,tn->tm", np.conj(Q), r)
    return R, y, d_index
