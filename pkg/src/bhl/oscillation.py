"""Berezin transforms and mean-oscillation functionals.

The Berezin transform used here is taken against the normalized power
kernel k_{omega,z} with exponent eta + 2,

    B(f)(z) = int f |k_{omega,z}|^2 omega dA,

and the global mean oscillation is MO(f)(z) = sqrt(B(|f|^2)(z) - |B(f)(z)|^2).
The local variant averages over the hyperbolic disc D(z, r) with respect to
omega dA and takes the same variance form.

Quadrature is always recentered: integrands are pulled back through the disc
automorphism phi_z, which maps the rule's nodes on the unit disc onto the
region of interest and keeps the transformed integrand smooth uniformly in z.
For |K_z|^2 the pullback is explicit,

    |K_z(phi_z(u))|^2 dA = |1 - conj(z) u|^(2 eta) (1 - |z|^2)^(-2 eta - 2) dA(u),

so nothing singular is ever sampled.  A pure power-series route
(berezin_series) provides an independent second pipeline for cross-checks.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ConvergenceError, DomainError, NumericalError
from .kernels import (N_MAX, binomial_log_coefficients,
                      normalized_kernel_norm_sq_many)
from .quadrature import (DiscRule, InvariantIntegral, disc_rule,
                         integrate_invariant_values, invariant_nodes)
from .symbols import SymbolPoly, multiply
from .weights import RadialWeight

VARIANCE_TOL = 1e-10   # negative variance beyond this (relative) is an error
SERIES_BLOCK = 256
PAIR_BLOCK = 256
DEFAULT_CHUNK_BUDGET = 2_000_000  # complex entries per (chunk x nodes) slab


@dataclass(frozen=True)
class MOVariant:
    """Which oscillation functional: kind 'global' (param = eta) or
    'local' (param = hyperbolic radius)."""

    kind: str
    param: float

    def __post_init__(self):
        if self.kind == "global":
            if not self.param > -1.0:
                raise ConfigError("global MO needs eta > -1")
        elif self.kind == "local":
            if not self.param > 0.0:
                raise ConfigError("local MO needs a positive radius")
        else:
            raise ConfigError(f"unknown MO variant kind {self.kind!r}")

    @classmethod
    def global_(cls, eta: float) -> "MOVariant":
        return cls("global", float(eta))

    @classmethod
    def local(cls, r: float) -> "MOVariant":
        return cls("local", float(r))

    def label(self) -> str:
        if self.kind == "global":
            return f"global:eta={self.param:g}"
        return f"local:r={self.param:g}"


def _variance(m2: np.ndarray, m1: np.ndarray) -> np.ndarray:
    """sqrt(m2 - |m1|^2) with a guarded clip against quadrature round-off."""
    var = np.real(m2) - np.abs(m1) ** 2
    tol = VARIANCE_TOL * np.maximum(1.0, np.abs(np.real(m2)))
    bad = var < -tol
    if np.any(bad):
        worst = float(np.min(var))
        raise NumericalError(f"negative oscillation variance {worst:.3e}")
    return np.sqrt(np.clip(var, 0.0, None))


# ---- recentered quadrature kernels -----------------------------------------


def _chunked(count: int, nodes: int) -> int:
    return max(1, DEFAULT_CHUNK_BUDGET // max(nodes, 1))


def berezin_weights(z: np.ndarray, weight: RadialWeight, eta: float,
                    rule: DiscRule, norms_sq: np.ndarray):
    """Recentered Berezin quadrature: returns (zeta, rho) with
    B(f)(z_k) = sum_m f(zeta[k, m]) rho[k, m] and sum_m rho[k, m] = 1.

    The u-integrand carries omega(|phi_z(u)|) ~ (1 - |u|)^a near the rim, so
    the radial rule always uses the rim map regardless of what was passed in.
    """
    z = np.asarray(z, dtype=complex)
    rule = rule.rim()
    u = rule.nodes()[None, :]
    base = rule.weights()[None, :]
    zc = z[:, None]
    one = 1.0 - np.conj(zc) * u
    zeta = (zc - u) / one
    roz = 1.0 - np.abs(zc) ** 2
    geom = np.abs(one) ** (2.0 * eta) * roz ** (-2.0 * eta - 2.0)
    rho = weight.density(np.abs(zeta)) * geom * base / norms_sq[:, None]
    return zeta, rho


def _kernel_norms(z: np.ndarray, weight: RadialWeight, eta: float) -> np.ndarray:
    return normalized_kernel_norm_sq_many(weight, eta,
                                          np.abs(np.asarray(z, dtype=complex)) ** 2)


def bergman_disc_weights(z: np.ndarray, weight: RadialWeight, r: float,
                         rule: DiscRule):
    """Nodes and omega-weighted quadrature weights on the hyperbolic discs
    D(z_k, r); returns (zeta, rho) with omega(D(z_k, r)) = sum_m rho[k, m]."""
    z = np.asarray(z, dtype=complex)
    t = math.tanh(r)
    u = t * rule.nodes()[None, :]
    base = (t * t) * rule.weights()[None, :]
    zc = z[:, None]
    one = 1.0 - np.conj(zc) * u
    zeta = (zc - u) / one
    jac = ((1.0 - np.abs(zc) ** 2) / np.abs(one) ** 2) ** 2
    rho = weight.density(np.abs(zeta)) * jac * base
    return zeta, rho


# ---- scalar transforms ------------------------------------------------------


def berezin(f, weight: RadialWeight, eta: float, z: complex,
            rule: DiscRule | None = None) -> complex:
    """Berezin transform B(f)(z) by recentered quadrature; f is any callable
    on complex arrays (SymbolPoly instances qualify)."""
    rule = rule or disc_rule()
    za = np.array([z], dtype=complex)
    zeta, rho = berezin_weights(za, weight, eta, rule, _kernel_norms(za, weight, eta))
    return complex(np.sum(f(zeta[0]) * rho[0]))


def mo_global(f, weight: RadialWeight, eta: float, z: complex,
              rule: DiscRule | None = None) -> float:
    """MO(f)(z) = sqrt(B(|f|^2) - |B f|^2), the defining variance form."""
    rule = rule or disc_rule()
    za = np.array([z], dtype=complex)
    zeta, rho = berezin_weights(za, weight, eta, rule, _kernel_norms(za, weight, eta))
    fv = f(zeta[0])
    m1 = np.sum(fv * rho[0])
    m2 = np.sum(np.abs(fv) ** 2 * rho[0])
    return float(_variance(np.array([m2]), np.array([m1]))[0])


def mo_global_deviation(f, weight: RadialWeight, eta: float, z: complex,
                        rule: DiscRule | None = None) -> float:
    """Same quantity through the deviation norm ||(f - B f(z)) k_z||."""
    rule = rule or disc_rule()
    za = np.array([z], dtype=complex)
    zeta, rho = berezin_weights(za, weight, eta, rule, _kernel_norms(za, weight, eta))
    fv = f(zeta[0])
    center = np.sum(fv * rho[0])
    dev = np.sum(np.abs(fv - center) ** 2 * rho[0])
    return math.sqrt(max(float(np.real(dev)), 0.0))


def _pair_sum(values: np.ndarray, rho: np.ndarray) -> float:
    """sum_{i,j} |v_i - v_j|^2 rho_i rho_j, blocked to bound memory."""
    total = 0.0
    m = len(values)
    for lo in range(0, m, PAIR_BLOCK):
        hi = min(lo + PAIR_BLOCK, m)
        diff = np.abs(values[lo:hi, None] - values[None, :]) ** 2
        total += float(np.real(np.sum(rho[lo:hi, None] * rho[None, :] * diff)))
    return total


def mo_global_pairs(f, weight: RadialWeight, eta: float, z: complex,
                    rule: DiscRule | None = None) -> float:
    """Same quantity through the symmetric double integral
    (1/2) iint |f(u) - f(v)|^2 |k_z(u)|^2 |k_z(v)|^2 omega(u) omega(v)."""
    rule = rule or DiscRule(32, 64)
    za = np.array([z], dtype=complex)
    zeta, rho = berezin_weights(za, weight, eta, rule, _kernel_norms(za, weight, eta))
    fv = f(zeta[0])
    return math.sqrt(max(0.5 * _pair_sum(fv, np.real(rho[0])), 0.0))


def disc_average(f, weight: RadialWeight, r: float, z: complex,
                 rule: DiscRule | None = None) -> complex:
    """Mean of f over D(z, r) against omega dA."""
    rule = rule or disc_rule()
    za = np.array([z], dtype=complex)
    zeta, rho = bergman_disc_weights(za, weight, r, rule)
    mass = np.sum(rho[0])
    return complex(np.sum(f(zeta[0]) * rho[0]) / mass)


def mo_local(f, weight: RadialWeight, r: float, z: complex,
             rule: DiscRule | None = None) -> float:
    """Local oscillation: variance of f over D(z, r) against omega dA."""
    rule = rule or disc_rule()
    za = np.array([z], dtype=complex)
    zeta, rho = bergman_disc_weights(za, weight, r, rule)
    mass = np.sum(np.real(rho[0]))
    fv = f(zeta[0])
    m1 = np.sum(fv * np.real(rho[0])) / mass
    m2 = np.sum(np.abs(fv) ** 2 * np.real(rho[0])) / mass
    return float(_variance(np.array([m2]), np.array([m1]))[0])


def mo_local_pairs(f, weight: RadialWeight, r: float, z: complex,
                   rule: DiscRule | None = None) -> float:
    """Local oscillation through the pairwise form
    (1/(2 omega(D)^2)) iint_D |f(u) - f(v)|^2 omega(u) omega(v)."""
    rule = rule or DiscRule(32, 64)
    za = np.array([z], dtype=complex)
    zeta, rho = bergman_disc_weights(za, weight, r, rule)
    rr = np.real(rho[0])
    mass = float(np.sum(rr))
    fv = f(zeta[0])
    return math.sqrt(max(_pair_sum(fv, rr) / (2.0 * mass * mass), 0.0))


# ---- series route (independent of disc quadrature) --------------------------


def _series_term_sum(weight: RadialWeight, eta: float, a: int, b: int,
                     abs_z: float, tol: float) -> float:
    """sum_m d_m d_{m+a-b} |z|^(2m + a - b) 2 mu_{2(a+m)+1} in log space."""
    delta = a - b
    m0 = max(0, -delta)
    if abs_z == 0.0:
        if delta != 0:
            return 0.0
        return 2.0 * weight.moment(2 * a + 1)
    log_t = math.log(abs_z)
    total = 0.0
    start = m0
    while start < N_MAX:
        stop = min(start + SERIES_BLOCK, N_MAX)
        m = np.arange(start, stop)
        ld = binomial_log_coefficients(eta + 2.0, stop + delta if delta > 0 else stop)
        lmu = np.log(2.0 * weight.moments_odd(a + stop + 1)[a + m])
        terms = np.exp(ld[m] + ld[m + delta] + (2 * m + delta) * log_t + lmu)
        total += float(np.sum(terms))
        tmax = float(terms[-1])
        ratios = terms[1:] / np.maximum(terms[:-1], 1e-300)
        q = float(np.max(ratios)) if len(ratios) else 0.0
        scale = max(abs(total), 1e-300)
        if q < 1.0:
            bound = tmax * q / (1.0 - q)
            if bound < tol * scale and tmax < tol * scale:
                return total
        start = stop
    raise ConvergenceError(f"Berezin series did not settle within {N_MAX} terms",
                           achieved=total)


def berezin_series(f: SymbolPoly, weight: RadialWeight, eta: float,
                   z: complex, tol: float = 1e-12) -> complex:
    """Berezin transform of a symbol polynomial by termwise power series."""
    if not isinstance(f, SymbolPoly):
        raise DomainError("the series route needs a SymbolPoly symbol")
    z = complex(z)
    abs_z = abs(z)
    if abs_z >= 1.0:
        raise DomainError("Berezin transform needs |z| < 1")
    norm_sq = float(normalized_kernel_norm_sq_many(
        weight, eta, np.array([abs_z ** 2]))[0])
    phase = z / abs_z if abs_z > 0 else 1.0
    out = 0.0 + 0.0j
    for (a, b), c in f.terms().items():
        s = _series_term_sum(weight, eta, a, b, abs_z, tol)
        out += c * (phase ** (a - b)) * s
    return out / norm_sq


def mo_global_series(f: SymbolPoly, weight: RadialWeight, eta: float,
                     z: complex, tol: float = 1e-12) -> float:
    """Global MO through the series route: B(|f|^2) - |B(f)|^2 termwise."""
    ff = multiply(f, f.conjugate(), None)
    m2 = berezin_series(ff, weight, eta, z, tol)
    m1 = berezin_series(f, weight, eta, z, tol)
    return float(_variance(np.array([m2]), np.array([m1]))[0])


# ---- vectorized profiles -----------------------------------------------------


def oscillation_profiles(symbols, weight: RadialWeight, variant: MOVariant,
                         points, rule: DiscRule | None = None,
                         norms_sq: np.ndarray | None = None) -> np.ndarray:
    """MO values for several symbols on shared sample points.

    Returns an array of shape (len(symbols), len(points)).  The recentered
    geometry and the weight density are computed once per chunk and reused
    across symbols, which is what makes sweeping a symbol family affordable.
    """
    points = np.asarray(points, dtype=complex)
    rule = rule or disc_rule()
    if np.any(np.abs(points) >= 1.0):
        raise DomainError("oscillation profiles need sample points inside the disc")
    nmodes = rule.radial_count * rule.angular_count
    chunk = _chunked(len(points), nmodes)
    out = np.empty((len(symbols), len(points)), dtype=float)
    if variant.kind == "global" and norms_sq is None:
        norms_sq = _kernel_norms(points, weight, variant.param)
    for lo in range(0, len(points), chunk):
        hi = min(lo + chunk, len(points))
        zs = points[lo:hi]
        if variant.kind == "global":
            zeta, rho = berezin_weights(zs, weight, variant.param, rule,
                                        norms_sq[lo:hi])
            mass = None
        else:
            zeta, rho = bergman_disc_weights(zs, weight, variant.param, rule)
            mass = np.sum(np.real(rho), axis=1)
        for si, f in enumerate(symbols):
            fv = f(zeta)
            m1 = np.sum(fv * rho, axis=1)
            m2 = np.sum(np.abs(fv) ** 2 * np.real(rho), axis=1)
            if mass is not None:
                m1 = m1 / mass
                m2 = m2 / mass
            out[si, lo:hi] = _variance(m2, m1)
    return out


def oscillation_profile(f, weight: RadialWeight, variant: MOVariant, points,
                        rule: DiscRule | None = None,
                        norms_sq: np.ndarray | None = None) -> np.ndarray:
    return oscillation_profiles([f], weight, variant, points, rule, norms_sq)[0]


# ---- lattice sums and invariant integrals ------------------------------------


@dataclass
class LatticeNorm:
    p: float
    power_sum: float
    norm: float
    count: int


def lattice_norm_from_values(values: np.ndarray, p: float) -> LatticeNorm:
    if not p > 0:
        raise DomainError("lattice norm exponent p must be positive")
    values = np.asarray(values, dtype=float)
    power = float(np.sum(values ** p))
    return LatticeNorm(p, power, power ** (1.0 / p), len(values))


def oscillation_lattice_norm(f, weight: RadialWeight, variant: MOVariant,
                             p: float, lattice, r_max: float | None = None,
                             rule: DiscRule | None = None) -> LatticeNorm:
    """l^p norm of MO(f) sampled on a lattice, truncated to |a| <= r_max."""
    from .geometry import Lattice

    points = lattice.truncated(r_max) if isinstance(lattice, Lattice) \
        else np.asarray(lattice, dtype=complex)
    values = oscillation_profile(f, weight, variant, points, rule)
    return lattice_norm_from_values(values, p)


def integral_from_profile(values: np.ndarray, p: float, quad_weights: np.ndarray,
                          shell_idx: np.ndarray, r_max: float,
                          shells: int = 8) -> InvariantIntegral:
    return integrate_invariant_values(np.asarray(values, dtype=float) ** p,
                                      quad_weights, shell_idx, r_max, shells)


def oscillation_integral(f, weight: RadialWeight, variant: MOVariant, p: float,
                         r_max: float, profile_rule: DiscRule | None = None,
                         inner_rule: DiscRule | None = None) -> InvariantIntegral:
    """int_{|z| < r_max} MO(f)(z)^p dlambda(z) with the shell-growth tail flag."""
    if not p > 0:
        raise DomainError("integral exponent p must be positive")
    nodes, wts, shell_idx = invariant_nodes(r_max, profile_rule)
    values = oscillation_profile(f, weight, variant, nodes, inner_rule)
    return integral_from_profile(values, p, wts, shell_idx, r_max)


# ---- bundled profile artifact -------------------------------------------------


@dataclass
class MOProfile:
    """A sampled oscillation profile plus per-exponent summaries, ready to
    write as CSV (points and values) with a JSON sidecar (metadata)."""

    weight: str
    symbol: str
    variant: str
    points: np.ndarray
    values: np.ndarray
    p_norms: dict

    def to_csv(self, path):
        lines = ["re,im,value"]
        for z, v in zip(self.points, self.values):
            lines.append(f"{z.real!r},{z.imag!r},{v!r}")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")

    def to_json(self, path):
        payload = {
            "weight": self.weight,
            "symbol": self.symbol,
            "variant": self.variant,
            "count": int(len(self.points)),
            "p_norms": {str(k): v for k, v in sorted(self.p_norms.items())},
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
