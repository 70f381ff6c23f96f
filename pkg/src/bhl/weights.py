"""Radial weights on the unit disc.

A radial weight is a nonnegative integrable function omega(r) on [0, 1)
whose tail mass int_r^1 omega(s) ds stays positive for every r < 1.  Three
families are provided:

* ``standard``  : (eta + 1) (1 - r^2)^eta, eta > -1, with exact Beta-form
  moments and tails,
* ``logpow``    : (1 - r)^alpha * log(e / (1 - r))^beta, alpha > -1,
* ``table``     : monotone-cubic interpolation of sampled values.

Each weight owns a memoized moment table mu_x = int_0^1 s^x omega(s) ds.
Doubling-type class membership is decided by :func:`classify` on a geometric
radius grid using ratio-profile plateau tests.
"""

from __future__ import annotations

import csv
import math
import os
import threading
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, interpolate, special

from .errors import ConfigError, DomainError, NumericalError

QUAD_REL_TOL = 1e-10
PLATEAU_FACTOR = 1.05
DCHECK_SCAN = (2.0, 4.0, 8.0, 16.0)
CACHE_ENV_VAR = "BHL_CACHE_DIR"


def _as_array(r):
    a = np.asarray(r, dtype=float)
    if a.size and (np.any(a < 0.0) or np.any(a >= 1.0)):
        raise DomainError("radius must lie in [0, 1)")
    return a


class RadialWeight:
    """A radial weight on [0, 1) with positive tail mass.

    Instances are immutable in intent; the only mutable state is the
    synchronized moment cache.
    """

    def __init__(self, kind: str, *, eta: float | None = None,
                 alpha: float | None = None, beta: float | None = None,
                 grid: np.ndarray | None = None,
                 values: np.ndarray | None = None,
                 normalization: float = 1.0, source: str | None = None):
        if normalization <= 0 or not math.isfinite(normalization):
            raise ConfigError("normalization must be a positive finite real")
        self.kind = kind
        self.normalization = float(normalization)
        self.eta = self.alpha = self.beta = None
        self._source = source
        if kind == "standard":
            if eta is None or eta <= -1 or not math.isfinite(eta):
                raise ConfigError("standard weight needs eta > -1")
            self.eta = float(eta)
        elif kind == "logpow":
            if alpha is None or alpha <= -1 or not math.isfinite(alpha):
                raise ConfigError("logpow weight needs alpha > -1")
            if beta is None or not math.isfinite(beta):
                raise ConfigError("logpow weight needs a finite beta")
            self.alpha = float(alpha)
            self.beta = float(beta)
        elif kind == "table":
            self._init_table(grid, values)
        else:
            raise ConfigError(f"unknown weight kind {kind!r}")
        self._moments = MomentTable(self)
        mass = self.tail_mass(0.0)
        if not (mass > 0 and math.isfinite(mass)):
            raise ConfigError("weight must have positive finite mass")
        if not self.tail_mass(0.999) > 0:
            raise ConfigError("weight tail mass vanishes before r = 1")

    # ---- constructors -------------------------------------------------

    @classmethod
    def standard(cls, eta: float, normalization: float = 1.0) -> "RadialWeight":
        return cls("standard", eta=eta, normalization=normalization)

    @classmethod
    def log_power(cls, alpha: float, beta: float,
                  normalization: float = 1.0) -> "RadialWeight":
        return cls("logpow", alpha=alpha, beta=beta, normalization=normalization)

    @classmethod
    def from_table(cls, grid, values, normalization: float = 1.0,
                   source: str | None = None) -> "RadialWeight":
        return cls("table", grid=np.asarray(grid, dtype=float),
                   values=np.asarray(values, dtype=float),
                   normalization=normalization, source=source)

    @classmethod
    def from_csv(cls, path: str) -> "RadialWeight":
        rows = []
        try:
            with open(path, newline="") as fh:
                reader = csv.reader(fh)
                for row in reader:
                    if not row or row[0].strip().lower() in ("r", "radius"):
                        continue
                    rows.append((float(row[0]), float(row[1])))
        except OSError as exc:
            raise ConfigError(f"cannot read weight table {path!r}: {exc}") from exc
        except (ValueError, IndexError) as exc:
            raise ConfigError(f"bad row in weight table {path!r}: {exc}") from exc
        if not rows:
            raise ConfigError(f"weight table {path!r} is empty")
        grid, values = zip(*rows)
        return cls.from_table(grid, values, source=os.path.basename(path))

    @classmethod
    def parse(cls, spec: str) -> "RadialWeight":
        """Parse the grammar ``standard:eta=<real>``, ``logpow:alpha=<real>,beta=<real>``, ``table:<path>``."""
        if not isinstance(spec, str) or ":" not in spec:
            raise ConfigError(f"weight spec {spec!r}: expected kind:params")
        kind, _, rest = spec.partition(":")
        kind = kind.strip().lower()
        if kind == "table":
            return cls.from_csv(rest.strip())
        params = {}
        for part in rest.split(","):
            if "=" not in part:
                raise ConfigError(f"weight spec {spec!r}: bad parameter {part!r}")
            key, _, val = part.partition("=")
            try:
                params[key.strip()] = float(val)
            except ValueError as exc:
                raise ConfigError(f"weight spec {spec!r}: {key.strip()}={val!r} is not a real") from exc
        if kind == "standard":
            if set(params) != {"eta"}:
                raise ConfigError(f"weight spec {spec!r}: standard takes exactly eta=<real>")
            return cls.standard(params["eta"])
        if kind == "logpow":
            if set(params) != {"alpha", "beta"}:
                raise ConfigError(f"weight spec {spec!r}: logpow takes alpha=<real>,beta=<real>")
            return cls.log_power(params["alpha"], params["beta"])
        raise ConfigError(f"weight spec {spec!r}: unknown kind {kind!r}")

    def _init_table(self, grid, values):
        if grid is None or values is None or len(grid) != len(values):
            raise ConfigError("table weight needs matching radius and value arrays")
        if len(grid) < 4:
            raise ConfigError("table weight needs at least 4 samples")
        if np.any(np.diff(grid) <= 0):
            raise ConfigError("table radii must be strictly increasing")
        if grid[0] < 0 or grid[-1] >= 1:
            raise ConfigError("table radii must lie in [0, 1)")
        if grid[-1] < 0.999:
            raise ConfigError("table weight requires samples up to r >= 0.999")
        if np.any(values < 0) or not np.all(np.isfinite(values)):
            raise ConfigError("table values must be finite and nonnegative")
        self._grid = np.array(grid, dtype=float)
        self._values = np.array(values, dtype=float)
        self._pchip = interpolate.PchipInterpolator(self._grid, self._values)
        self._pchip_anti = self._pchip.antiderivative()

    # ---- identity ------------------------------------------------------

    def label(self) -> str:
        if self.kind == "standard":
            return f"standard:eta={self.eta:g}"
        if self.kind == "logpow":
            return f"logpow:alpha={self.alpha:g},beta={self.beta:g}"
        return f"table:{self._source or 'inline'}"

    def cache_slug(self) -> str:
        base = self.label().replace(":", "_").replace(",", "_").replace("=", "-")
        base = base.replace("/", "_").replace(".", "p").replace("+", "")
        if self.kind == "table":
            digest = hash((tuple(self._grid), tuple(self._values))) & 0xFFFFFFFF
            base = f"{base}_{digest:08x}"
        return base

    def __repr__(self):
        return f"RadialWeight({self.label()})"

    # ---- evaluation ----------------------------------------------------

    def density(self, r):
        """omega(r), vectorized; raises DomainError outside [0, 1)."""
        a = _as_array(r)
        if self.kind == "standard":
            out = self.normalization * (self.eta + 1.0) * (1.0 - a * a) ** self.eta
        elif self.kind == "logpow":
            one_minus = 1.0 - a
            out = self.normalization * one_minus ** self.alpha \
                * (1.0 - np.log1p(-a)) ** self.beta
        else:
            clamped = np.clip(a, self._grid[0], self._grid[-1])
            out = self.normalization * self._pchip(clamped)
            out = np.maximum(out, 0.0)
        if np.isscalar(r):
            return float(out)
        return out

    __call__ = density

    def tail_mass(self, r):
        """int_r^1 omega(s) ds; closed form where available, quadrature otherwise."""
        a = _as_array(r)
        if self.kind == "standard":
            e = self.eta
            full = 0.5 * np.exp(special.betaln(e + 1.0, 0.5))
            out = self.normalization * (e + 1.0) * full \
                * special.betainc(e + 1.0, 0.5, 1.0 - a * a)
        elif self.kind == "logpow" and self.beta == 0.0:
            out = self.normalization * (1.0 - a) ** (self.alpha + 1.0) / (self.alpha + 1.0)
        elif self.kind == "logpow":
            out = self._logpow_tail(a)
        elif self.kind == "table":
            out = self._table_tail(a)
        else:
            out = self._quad_tail(a)
        if np.isscalar(r):
            return float(out)
        return out

    def _table_tail(self, a):
        g0, g1 = self._grid[0], self._grid[-1]
        v0 = self.normalization * self._values[0]
        v1 = self.normalization * self._values[-1]
        anti = lambda x: self.normalization * self._pchip_anti(x)
        total_mid = anti(g1) - anti(np.clip(a, g0, g1))
        below = np.maximum(g0 - a, 0.0) * v0
        above = np.where(a <= g1, (1.0 - g1) * v1, (1.0 - a) * v1)
        return below + total_mid + above

    def _quad_tail(self, a):
        flat = np.atleast_1d(a).ravel()
        out = np.empty_like(flat)
        for i, r in enumerate(flat):
            out[i] = _quad_integral(lambda s: self.density(s), r, 1.0)
        return out.reshape(np.shape(a))

    def _logpow_tail(self, a):
        # substituting s = 1 - u^2 leaves u^(2 alpha + 1) (1 - 2 log u)^beta,
        # which QAGS resolves where the raw (1-s)^alpha endpoint does not
        al, be, c = self.alpha, self.beta, self.normalization

        def fn(u):
            return 2.0 * c * u ** (2.0 * al + 1.0) * (1.0 - 2.0 * np.log(u)) ** be

        flat = np.atleast_1d(np.asarray(a, dtype=float)).ravel()
        out = np.empty_like(flat)
        for i, r in enumerate(flat):
            hi = math.sqrt(max(1.0 - r, 0.0))
            out[i] = _quad_integral(fn, 0.0, hi) if hi > 0.0 else 0.0
        return out.reshape(np.shape(a))

    # ---- moments ---------------------------------------------------------

    def moment(self, x: float) -> float:
        """mu_x = int_0^1 s^x omega(s) ds, memoized."""
        return self._moments.value(x)

    def moments_odd(self, count: int) -> np.ndarray:
        """Array of mu_{2n+1} for n = 0 .. count-1."""
        return self._moments.values(2.0 * np.arange(count) + 1.0)

    def moment_int_table(self, max_index: int) -> np.ndarray:
        """Array of mu_k for integer k = 0 .. max_index (inclusive)."""
        return self._moments.values(np.arange(max_index + 1, dtype=float))

    def _moment_raw(self, x: float) -> float:
        if x <= -1:
            raise DomainError("moment exponent must exceed -1")
        if self.kind == "standard":
            e = self.eta
            return self.normalization * (e + 1.0) / 2.0 \
                * math.exp(special.betaln((x + 1.0) / 2.0, e + 1.0))
        if self.kind == "logpow" and self.beta == 0.0:
            return self.normalization * math.exp(special.betaln(x + 1.0, self.alpha + 1.0))
        if self.kind == "logpow":
            al, be, c = self.alpha, self.beta, self.normalization

            def fn(u):
                return 2.0 * c * (1.0 - u * u) ** x * u ** (2.0 * al + 1.0) \
                    * (1.0 - 2.0 * math.log(u)) ** be

            return _quad_integral(fn, 0.0, 1.0)
        points = None
        if self.kind == "table":
            points = [self._grid[0], self._grid[-1]]
        return _quad_integral(lambda s: s ** x * self.density(s), 0.0, 1.0,
                              points=points)

    def disc_mass(self, z: complex, r: float, rule=None) -> float:
        """Weighted area of the Bergman disc D(z, r) under normalized dA."""
        from . import quadrature

        val = quadrature.integrate_bergman_disc(
            lambda zeta: self.density(np.abs(zeta)), z, r, rule)
        return float(val.real)


def _quad_integral(fn, lo, hi, points=None) -> float:
    val, err = integrate.quad(fn, lo, hi, epsabs=0.0, epsrel=1e-12,
                              limit=400, points=points)
    if not math.isfinite(val):
        raise NumericalError("weight quadrature produced a non-finite value")
    if abs(val) > 0 and err / abs(val) > QUAD_REL_TOL:
        raise NumericalError(
            f"weight quadrature reached relative error {err / abs(val):.2e}, "
            f"tolerance {QUAD_REL_TOL:.1e}")
    return val


class MomentTable:
    """Synchronized memo table of moments, keyed by exact exponent bits."""

    def __init__(self, weight: RadialWeight):
        self._weight = weight
        self._lock = threading.Lock()
        self._cache: dict[str, float] = {}

    def value(self, x: float) -> float:
        key = float(x).hex()
        with self._lock:
            hit = self._cache.get(key)
        if hit is not None:
            return hit
        val = self._weight._moment_raw(float(x))
        with self._lock:
            self._cache[key] = val
        return val

    def values(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        if self._weight.kind == "standard":
            # vectorized Beta closed form; still record in the cache
            e = self._weight.eta
            out = self._weight.normalization * (e + 1.0) / 2.0 \
                * np.exp(special.betaln((xs + 1.0) / 2.0, e + 1.0))
            with self._lock:
                for x, v in zip(xs.ravel(), np.asarray(out).ravel()):
                    self._cache.setdefault(float(x).hex(), float(v))
            return out
        if self._weight.kind == "logpow" and self._weight.beta == 0.0:
            out = self._weight.normalization \
                * np.exp(special.betaln(xs + 1.0, self._weight.alpha + 1.0))
            return out
        return np.array([self.value(x) for x in xs.ravel()],
                        dtype=float).reshape(xs.shape)

    def load_csv(self, path: str) -> int:
        """Merge exponent,value rows from a cache file; returns rows read."""
        count = 0
        with open(path, newline="") as fh:
            for row in csv.reader(fh):
                if not row or row[0] == "exponent":
                    continue
                key = float(row[0]).hex()
                with self._lock:
                    self._cache.setdefault(key, float(row[1]))
                count += 1
        return count

    def save_csv(self, path: str) -> int:
        with self._lock:
            items = sorted((float.fromhex(k), v) for k, v in self._cache.items())
        tmp = path + ".tmp"
        with open(tmp, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["exponent", "value"])
            for x, v in items:
                writer.writerow([repr(x), repr(v)])
        os.replace(tmp, path)
        return len(items)


def cache_path_for(weight: RadialWeight, directory: str | None = None) -> str | None:
    """Moment-cache file path under `directory` or $BHL_CACHE_DIR, if set."""
    directory = directory or os.environ.get(CACHE_ENV_VAR)
    if not directory:
        return None
    return os.path.join(directory, f"moments-{weight.cache_slug()}.csv")


def load_moment_cache(weight: RadialWeight, directory: str | None = None) -> int:
    path = cache_path_for(weight, directory)
    if path and os.path.exists(path):
        return weight._moments.load_csv(path)
    return 0


def save_moment_cache(weight: RadialWeight, directory: str | None = None) -> int:
    path = cache_path_for(weight, directory)
    if not path:
        return 0
    os.makedirs(os.path.dirname(path), exist_ok=True)
    return weight._moments.save_csv(path)


# ---- classification ------------------------------------------------------


@dataclass
class DoublingWitness:
    holds: bool
    witness_C: float

    def to_dict(self):
        return {"holds": self.holds, "witness_C": self.witness_C}


@dataclass
class ReverseDoublingWitness:
    holds: bool
    witness_K: float
    witness_C: float

    def to_dict(self):
        return {"holds": self.holds, "witness_K": self.witness_K,
                "witness_C": self.witness_C}


@dataclass
class RegularWitness:
    holds: bool
    ratio_min: float
    ratio_max: float

    def to_dict(self):
        return {"holds": self.holds, "ratio_min": self.ratio_min,
                "ratio_max": self.ratio_max}


@dataclass
class WeightClassReport:
    dhat: DoublingWitness
    dcheck: ReverseDoublingWitness
    regular: RegularWitness
    grid_max_r: float
    profiles: dict = field(default_factory=dict, repr=False)

    @property
    def in_d(self) -> bool:
        return self.dhat.holds and self.dcheck.holds

    def to_dict(self):
        return {
            "dhat": self.dhat.to_dict(),
            "dcheck": self.dcheck.to_dict(),
            "regular": self.regular.to_dict(),
            "grid_max_r": self.grid_max_r,
        }


def default_grid(n: int = 256) -> np.ndarray:
    """Geometric radius grid r_k = 1 - 2^(-k/16)."""
    k = np.arange(n, dtype=float)
    return 1.0 - 2.0 ** (-k / 16.0)


def plateau(values: np.ndarray, factor: float = PLATEAU_FACTOR) -> bool:
    """True when the last quartile does not exceed `factor` times the third-quartile value."""
    values = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(values)):
        return False
    q3 = (3 * len(values)) // 4
    ref = values[q3]
    if not ref > 0:
        return False
    return bool(np.max(values[q3:]) <= factor * ref)


def classify(weight: RadialWeight, grid: np.ndarray | None = None) -> WeightClassReport:
    """Decide doubling-class membership on a radius grid with plateau tests."""
    if grid is None:
        grid = default_grid()
    grid = np.asarray(grid, dtype=float)
    if len(grid) < 16:
        raise ConfigError("classification grid too coarse (< 16 points)")
    if np.any(np.diff(grid) <= 0) or grid[0] < 0 or grid[-1] >= 1:
        raise ConfigError("classification grid must be strictly increasing inside [0, 1)")

    tail = weight.tail_mass(grid)
    profiles: dict[str, np.ndarray] = {"grid": grid}

    with np.errstate(divide="ignore", invalid="ignore"):
        dhat_ratio = tail / weight.tail_mass((1.0 + grid) / 2.0)
    profiles["dhat_ratio"] = dhat_ratio
    dhat = DoublingWitness(plateau(dhat_ratio), float(np.max(dhat_ratio)))

    dcheck = ReverseDoublingWitness(False, math.nan, math.nan)
    for K in DCHECK_SCAN:
        inner = tail - weight.tail_mass(1.0 - (1.0 - grid) / K)
        if np.any(inner <= 0):
            continue
        ratio = tail / inner
        if plateau(ratio):
            dcheck = ReverseDoublingWitness(True, K, float(np.max(ratio)))
            profiles["dcheck_ratio"] = ratio
            break
    if "dcheck_ratio" not in profiles:
        inner = tail - weight.tail_mass(1.0 - (1.0 - grid) / DCHECK_SCAN[-1])
        with np.errstate(divide="ignore", invalid="ignore"):
            profiles["dcheck_ratio"] = np.where(inner > 0, tail / inner, np.inf)

    with np.errstate(divide="ignore", invalid="ignore"):
        reg_ratio = tail / (weight.density(grid) * (1.0 - grid))
    profiles["regular_ratio"] = reg_ratio
    finite = np.all(np.isfinite(reg_ratio)) and np.all(reg_ratio > 0)
    reg_holds = bool(finite and plateau(reg_ratio) and plateau(1.0 / reg_ratio))
    regular = RegularWitness(reg_holds,
                             float(np.min(reg_ratio)) if finite else math.nan,
                             float(np.max(reg_ratio)) if finite else math.nan)

    return WeightClassReport(dhat, dcheck, regular, float(grid[-1]), profiles)


def local_smoothness_constant(weight: RadialWeight, s: float,
                              grid: np.ndarray | None = None,
                              samples: int = 32) -> float:
    """sup of max(omega(t)/omega(r), omega(r)/omega(t)) for t in [r, r + s(1-r)]."""
    if grid is None:
        grid = default_grid(128)
    worst = 1.0
    for r in grid:
        ts = r + np.linspace(0.0, s, samples) * (1.0 - r)
        ts = ts[ts < 1.0]
        base = weight.density(r)
        vals = weight.density(ts)
        if base <= 0 or np.any(vals <= 0):
            return math.inf
        ratio = np.maximum(vals / base, base / vals)
        worst = max(worst, float(np.max(ratio)))
    return worst
