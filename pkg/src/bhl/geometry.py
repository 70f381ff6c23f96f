"""Hyperbolic geometry of the unit disc: automorphisms, metric, discs, lattices.

The disc automorphism phi_z(zeta) = (z - zeta) / (1 - conj(z) zeta) swaps z
and 0 and is an involution.  The Bergman (hyperbolic) distance used
throughout is

    beta(z, zeta) = (1/2) log((1 + |phi_z(zeta)|) / (1 - |phi_z(zeta)|))
                  = atanh |phi_z(zeta)|.

A Bergman disc D(z, r) = {beta(z, .) < r} is a Euclidean disc; its center
and radius follow from the membership inequality |phi_z(zeta)| < tanh r.

Lattices are produced by a deterministic ring construction: ring k sits at
hyperbolic radius k*r/2 (Euclidean radius tanh(k*r/2)), with angular spacing
targeting adjacent-point distance 0.8*r inside [r/2, r].  Separation >= r/2
between rings is automatic because radial distances differ by r/2.
Generated lattices are checked by brute force in :func:`validate_lattice`.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError, ResourceLimitError

POINT_CAP = 200_000
RING_TARGET = 0.8  # target adjacent spacing as a multiple of r


def mobius(z, zeta):
    """phi_z(zeta) = (z - zeta) / (1 - conj(z) zeta), vectorized."""
    z = np.asarray(z, dtype=complex)
    zeta = np.asarray(zeta, dtype=complex)
    out = (z - zeta) / (1.0 - np.conj(z) * zeta)
    if out.ndim == 0:
        return complex(out)
    return out

def bergman_distance(z, zeta):
    """beta(z, zeta) = atanh |phi_z(zeta)|."""
    rho = np.abs(mobius(z, zeta))
    rho = np.minimum(rho, 1.0 - 1e-300)
    out = np.arctanh(rho)
    if np.ndim(out) == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class BergmanDisc:
    """Euclidean description of D(z, r) together with the defining data."""

    center: complex
    radius: float  # hyperbolic radius
    euclid_center: complex
    euclid_radius: float

    def contains(self, zeta) -> np.ndarray | bool:
        """Membership via the pseudo-hyperbolic inequality |phi_z(zeta)| < tanh r."""
        t = math.tanh(self.radius)
        val = np.abs(mobius(self.center, zeta)) < t
        if np.ndim(val) == 0:
            return bool(val)
        return val

    def contains_euclid(self, zeta) -> np.ndarray | bool:
        val = np.abs(np.asarray(zeta, dtype=complex) - self.euclid_center) \
            < self.euclid_radius
        if np.ndim(val) == 0:
            return bool(val)
        return val


def bergman_disc(z: complex, r: float) -> BergmanDisc:
    """Euclidean center/radius of the Bergman disc D(z, r)."""
    if not r > 0:
        raise DomainError("disc radius must be positive")
    z = complex(z)
    if abs(z) >= 1:
        raise DomainError("disc center must lie inside the unit disc")
    t = math.tanh(r)
    t2 = t * t
    denom = 1.0 - t2 * abs(z) ** 2
    center = (1.0 - t2) * z / denom
    radius = (1.0 - abs(z) ** 2) * t / denom
    return BergmanDisc(z, float(r), center, radius)


# ---- lattices --------------------------------------------------------------


@dataclass
class Lattice:
    """Point family with designed separation r and truncation radius r_max."""

    separation_r: float
    points: np.ndarray
    r_max: float

    def __len__(self):
        return len(self.points)

    def truncated(self, r_max: float | None = None) -> np.ndarray:
        if r_max is None:
            r_max = self.r_max
        return self.points[np.abs(self.points) <= r_max]

    def to_csv(self, path: str) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["re", "im"])
            for p in self.points:
                writer.writerow([repr(float(p.real)), repr(float(p.imag))])

    @classmethod
    def from_csv(cls, path: str, separation_r: float, r_max: float) -> "Lattice":
        pts = []
        try:
            with open(path, newline="") as fh:
                for row in csv.reader(fh):
                    if not row or row[0].strip().lower() == "re":
                        continue
                    pts.append(complex(float(row[0]), float(row[1])))
        except OSError as exc:
            raise ConfigError(f"cannot read lattice {path!r}: {exc}") from exc
        except (ValueError, IndexError) as exc:
            raise ConfigError(f"bad row in lattice {path!r}: {exc}") from exc
        return cls(separation_r, np.asarray(pts, dtype=complex), r_max)


def _ring_beta(rho: float, dtheta: float) -> float:
    return bergman_distance(rho, rho * np.exp(1j * dtheta))

def _angle_for(rho: float, target: float) -> float | None:
    """Smallest angle whose same-ring chord reaches `target` in beta, or None."""
    if _ring_beta(rho, math.pi) < target:
        return None
    lo, hi = 0.0, math.pi
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if _ring_beta(rho, mid) < target:
            lo = mid
        else:
            hi = mid
    return hi

def _ring_count(rho: float, r: float) -> int:
    dt_target = _angle_for(rho, RING_TARGET * r)
    dt_sep = _angle_for(rho, 0.5 * r)
    if dt_sep is None:
        return 1  # even antipodal points would violate separation
    m_max = max(1, math.floor(2.0 * math.pi / dt_sep))
    if dt_target is None:
        m = 2
    else:
        m = math.ceil(2.0 * math.pi / dt_target)
    dt_cover = _angle_for(rho, r)
    if dt_cover is not None:
        m = max(m, math.ceil(2.0 * math.pi / dt_cover))
    return min(m, m_max)


def generate_lattice(r: float, r_max: float, point_cap: int = POINT_CAP) -> Lattice:
    """Deterministic ring lattice with separation r and coverage up to r_max."""
    if not 0 < r <= 2.0:
        raise DomainError("lattice separation r must lie in (0, 2]")
    if not 0 < r_max < 1:
        raise DomainError("lattice truncation r_max must lie in (0, 1)")
    points = [0.0 + 0.0j]
    k = 1
    while math.tanh((k - 1) * r / 2.0) <= r_max:
        rho = math.tanh(k * r / 2.0)
        m = _ring_count(rho, r)
        offset = math.pi / m if (k % 2) else 0.0
        ring = rho * np.exp(1j * (2.0 * math.pi * np.arange(m) / m + offset))
        points.extend(ring.tolist())
        if len(points) > point_cap:
            raise ResourceLimitError(
                f"lattice point count {len(points)} exceeds cap {point_cap}")
        k += 1
    return Lattice(r, np.asarray(points, dtype=complex), r_max)


@dataclass
class LatticeValidation:
    separated: bool
    covering: bool
    max_overlap: int
    min_separation: float

    def to_dict(self):
        return {"separated": self.separated, "covering": self.covering,
                "max_overlap": self.max_overlap,
                "min_separation": self.min_separation}


def _pairwise_min_beta(points: np.ndarray, block: int = 512) -> float:
    n = len(points)
    if n < 2:
        return math.inf
    best = math.inf
    conj = np.conj(points)
    for start in range(0, n, block):
        chunk = points[start:start + block]
        num = np.abs(chunk[:, None] - points[None, :])
        den = np.abs(1.0 - np.conj(chunk)[:, None] * points[None, :])
        rho = num / den
        # mask the diagonal of this block
        idx = np.arange(start, min(start + block, n))
        rho[np.arange(len(chunk)), idx] = 1.0
        best = min(best, float(np.min(rho)))
    del conj
    return float(np.arctanh(min(best, 1.0 - 1e-300)))


def _probe_points(r_max: float, probe_count: int, seed: int) -> np.ndarray:
    n_random = probe_count // 2
    rng = np.random.default_rng(seed)
    radii = r_max * np.sqrt(rng.random(n_random))
    angles = 2.0 * math.pi * rng.random(n_random)
    random_part = radii * np.exp(1j * angles)
    n_grid = probe_count - n_random
    rows = max(2, n_grid // 8)
    rr = np.linspace(0.0, r_max, rows)
    aa = 2.0 * math.pi * np.arange(8) / 8.0
    grid_part = (rr[:, None] * np.exp(1j * aa)[None, :]).ravel()[:n_grid]
    return np.concatenate([random_part, grid_part])


def validate_lattice(points, r: float, r_max: float,
                     probe_count: int = 2000, seed: int = 0) -> LatticeValidation:
    """Brute-force separation, covering, and overlap checks.

    Separation demands min pairwise beta >= r/2; covering demands every
    probe with |z| <= r_max lies inside some D(a_j, r); max_overlap is the
    largest number of lattice discs containing a single probe.
    """
    if isinstance(points, Lattice):
        points = points.points
    points = np.asarray(points, dtype=complex)
    if probe_count < 1000:
        raise ConfigError("probe_count must be at least 1000")
    min_sep = _pairwise_min_beta(points)
    separated = bool(min_sep >= r / 2.0 - 1e-12)

    probes = _probe_points(r_max, probe_count, seed)
    t = math.tanh(r)
    covered = True
    max_overlap = 0
    block = 1024
    for start in range(0, len(probes), block):
        chunk = probes[start:start + block]
        num = np.abs(chunk[:, None] - points[None, :])
        den = np.abs(1.0 - np.conj(chunk)[:, None] * points[None, :])
        inside = (num / den) < t
        counts = inside.sum(axis=1)
        covered = covered and bool(np.all(counts > 0))
        max_overlap = max(max_overlap, int(np.max(counts)))
    return LatticeValidation(separated, covered, max_overlap, min_sep)
