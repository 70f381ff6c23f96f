"""Reproducing kernels of weighted Bergman spaces.

The kernel of A^2_omega is the power series

    B_z(zeta) = sum_n (conj(z) zeta)^n / (2 mu_{2n+1}),

summed adaptively: a block is accepted once the current term is below the
tolerance relative to the partial sum AND the geometric tail bound (from the
observed coefficient-ratio envelope) is below tolerance.  Evaluation is
restricted to |conj(z) zeta| <= 0.9999.

For standard weights the series has the closed form (1 - conj(z) zeta)^-(eta+2),
used as an oracle in tests, never as the implementation.

Power kernels K^eta_z(zeta) = (1 - conj(z) zeta)^-eta supply the normalized
kernels k_{omega,z} = K^{eta+2}_z / ||K^{eta+2}_z||_{A^2_omega}; their norms are
positive-term series summed in log space, with binomial coefficients generated
by the recurrence d_{n+1} = d_n (n + eta + 2)/(n + 1), switched to log form
above n = 1000.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError, NumericalError
from .weights import RadialWeight

N_MAX = 20_000
X_DOMAIN = 0.9999
BLOCK = 64
LOG_SWITCH = 1000


class KernelSeries:
    """Adaptive evaluator for the moment power series of one weight."""

    def __init__(self, weight: RadialWeight, n_max: int = N_MAX):
        self.weight = weight
        self.n_max = n_max
        self._coeffs = np.empty(0)

    def coefficients(self, count: int) -> np.ndarray:
        """c_n = 1 / (2 mu_{2n+1}) for n < count."""
        if count > len(self._coeffs):
            grown = max(count, 2 * len(self._coeffs), 256)
            mu = self.weight.moments_odd(grown)
            if np.any(mu <= 0) or not np.all(np.isfinite(mu)):
                raise NumericalError("moment sequence must be positive and finite")
            self._coeffs = 1.0 / (2.0 * mu)
        return self._coeffs[:count]

    def eval(self, x, tol: float = 1e-10) -> tuple[np.ndarray, float]:
        """Kernel series at the products x = conj(z) zeta; returns (values, tail bound)."""
        x = np.asarray(x, dtype=complex)
        xmax = float(np.max(np.abs(x))) if x.size else 0.0
        if xmax > X_DOMAIN:
            raise DomainError(f"|conj(z) zeta| = {xmax:.6f} exceeds {X_DOMAIN}")
        sums = np.zeros_like(x)
        power = np.ones_like(x)
        n = 0
        tmax = 0.0
        while n < self.n_max:
            hi = min(n + BLOCK, self.n_max)
            c = self.coefficients(hi + 1)
            for k in range(n, hi):
                sums = sums + c[k] * power
                power = power * x
            n = hi
            tmax = c[n - 1] * xmax ** (n - 1)
            ratios = c[n - BLOCK + 1:n + 1] / c[n - BLOCK:n]
            q = xmax * float(np.max(ratios)) * (1.0 + 1e-12)
            if q < 1.0:
                bound = tmax * q / (1.0 - q)
                scale = max(1.0, float(np.min(np.abs(sums))))
                if bound < tol * scale and tmax < tol * scale:
                    return sums, bound
        raise ConvergenceError(
            f"kernel series did not converge within {self.n_max} terms "
            f"(last term {tmax:.2e})", achieved=tmax)


_series_cache: dict[int, KernelSeries] = {}


def _series(weight: RadialWeight) -> KernelSeries:
    key = id(weight)
    if key not in _series_cache:
        _series_cache[key] = KernelSeries(weight)
    return _series_cache[key]


def kernel_value(weight: RadialWeight, z: complex, zeta: complex,
                 tol: float = 1e-10) -> complex:
    """B_z(zeta) for the weight's Bergman space."""
    vals, _ = _series(weight).eval(np.asarray([np.conj(z) * zeta]), tol)
    return complex(vals[0])


def kernel_values(weight: RadialWeight, x, tol: float = 1e-10) -> np.ndarray:
    """Vectorized kernel series at precomputed products x = conj(z) zeta."""
    vals, _ = _series(weight).eval(x, tol)
    return vals


def kernel_norm_sq(weight: RadialWeight, z: complex, tol: float = 1e-10) -> float:
    """||B_z||^2 = B_z(z), real and positive."""
    vals, _ = _series(weight).eval(np.asarray([abs(z) ** 2 + 0.0j]), tol)
    return float(vals[0].real)


def kernel_outer(weight: RadialWeight, u: np.ndarray, zeta: np.ndarray,
                 tol: float = 1e-10) -> np.ndarray:
    """Matrix B_{u_i}(zeta_j), evaluated as a rank-N product of power matrices."""
    u = np.asarray(u, dtype=complex)
    zeta = np.asarray(zeta, dtype=complex)
    xmax = float(np.max(np.abs(u)) * np.max(np.abs(zeta)))
    if xmax > X_DOMAIN:
        raise DomainError(f"|u| |zeta| = {xmax:.6f} exceeds {X_DOMAIN}")
    series = _series(weight)
    n_terms = _terms_needed(series, xmax, tol)
    c = series.coefficients(n_terms)
    root = np.sqrt(c)
    a = _power_matrix(np.conj(u), n_terms) * root[None, :]
    b = _power_matrix(zeta, n_terms) * root[None, :]
    return a @ b.T


def _terms_needed(series: KernelSeries, xmax: float, tol: float) -> int:
    if xmax == 0.0:
        return 1
    n = BLOCK
    while n < series.n_max:
        c = series.coefficients(n + 1)
        ratios = c[1:n + 1] / c[:n]
        q = xmax * float(np.max(ratios[n // 2:])) * (1.0 + 1e-12)
        t = c[n - 1] * xmax ** (n - 1)
        if q < 1.0 and t * q / (1.0 - q) < tol and t < tol:
            return n
        n += BLOCK
    raise ConvergenceError(f"kernel series needs more than {series.n_max} terms")


def _power_matrix(v: np.ndarray, count: int) -> np.ndarray:
    out = np.empty((len(v), count), dtype=complex)
    out[:, 0] = 1.0
    if count > 1:
        out[:, 1:] = np.cumprod(
            np.broadcast_to(v[:, None], (len(v), count - 1)), axis=1)
    return out


# ---- power kernels ---------------------------------------------------------


def standard_kernel(eta: float, z, zeta):
    """K^eta_z(zeta) = (1 - conj(z) zeta)^(-eta), principal branch."""
    base = 1.0 - np.conj(np.asarray(z, dtype=complex)) * np.asarray(zeta, dtype=complex)
    out = np.power(base, -eta)
    if np.ndim(out) == 0:
        return complex(out)
    return out


def binomial_log_coefficients(order: float, count: int) -> np.ndarray:
    """log d_n for (1-x)^(-order) = sum d_n x^n, stable hybrid recurrence."""
    if order <= 0:
        raise DomainError("binomial order must be positive")
    count = int(count)
    n_lin = min(count, LOG_SWITCH + 1)
    d = np.empty(n_lin)
    d[0] = 1.0
    for n in range(n_lin - 1):
        d[n + 1] = d[n] * (n + order) / (n + 1.0)
    logs = np.log(d)
    if count > n_lin:
        n = np.arange(n_lin - 1, count - 1, dtype=float)
        steps = np.log((n + order) / (n + 1.0))
        logs = np.concatenate([logs, logs[-1] + np.cumsum(steps)])
    return logs


def normalized_kernel_norm_sq_many(weight: RadialWeight, eta: float, abs_sq,
                                   tol: float = 1e-12,
                                   n_max: int = N_MAX) -> np.ndarray:
    """||K^{eta+2}_z||^2_{A^2_omega} for an array of |z|^2 values.

    Positive-term series sum_n d_n^2 |z|^{2n} (2 mu_{2n+1}) summed in log
    space; raises DomainError advising a larger eta when it will not converge
    within the term cap.
    """
    t = np.atleast_1d(np.asarray(abs_sq, dtype=float))
    if np.any(t < 0) or np.any(t >= 1.0):
        raise DomainError("|z|^2 must lie in [0, 1)")
    logt = np.log(np.maximum(t, 1e-300))
    tmax = float(np.max(t))
    logtmax = math.log(max(tmax, 1e-300))
    sums = np.zeros_like(t)
    n = 0
    while n < n_max:
        hi = min(n + 4 * BLOCK, n_max)
        ld = binomial_log_coefficients(eta + 2.0, hi + 1)
        mu = weight.moments_odd(hi + 1)
        la = 2.0 * ld + np.log(2.0 * mu)
        idx = np.arange(n, hi, dtype=float)
        block = np.exp(la[n:hi][None, :] + logt[:, None] * idx[None, :])
        sums = sums + np.sum(block, axis=1)
        n = hi
        last = math.exp(la[n - 1] + logtmax * (n - 1))
        q = math.exp(la[n] - la[n - 1] + logtmax) * (1.0 + 1e-12)
        if q < 1.0:
            bound = last * q / (1.0 - q)
            scale = max(1.0, float(np.min(sums)))
            if bound < tol * scale and last < tol * scale:
                return sums if np.ndim(abs_sq) else sums
    raise DomainError(
        "normalized-kernel norm series did not converge; increase eta")


def normalized_kernel_norm(weight: RadialWeight, eta: float, z: complex,
                           tol: float = 1e-12) -> float:
    """||K^{eta+2}_z||_{A^2_omega}."""
    val = normalized_kernel_norm_sq_many(weight, eta, np.asarray([abs(z) ** 2]), tol)
    return float(math.sqrt(val[0]))


def normalized_kernel(weight: RadialWeight, eta: float, z: complex, zeta,
                      tol: float = 1e-12):
    """k_{omega,z}(zeta) = K^{eta+2}_z(zeta) / ||K^{eta+2}_z||_{A^2_omega}."""
    return standard_kernel(eta + 2.0, z, zeta) / normalized_kernel_norm(weight, eta, z, tol)


def normalized_kernel_coefficients(weight: RadialWeight, eta: float, z: complex,
                                   tol: float = 1e-8,
                                   n_max: int = N_MAX) -> np.ndarray:
    """Coefficients a_n with k_{omega,z}(zeta) ~ sum a_n zeta^n, truncated so the
    dropped tail has relative A^2_omega-norm below tol."""
    z = complex(z)
    t = abs(z) ** 2
    if t == 0.0:
        mu1 = weight.moment(1)
        return np.asarray([1.0 / math.sqrt(2.0 * mu1)], dtype=complex)
    logt = math.log(t)
    total = float(normalized_kernel_norm_sq_many(weight, eta, np.asarray([t]))[0])
    n = BLOCK
    while n < n_max:
        ld = binomial_log_coefficients(eta + 2.0, n + 1)
        mu = weight.moments_odd(n + 1)
        la = 2.0 * ld + np.log(2.0 * mu)
        last = math.exp(la[n - 1] + logt * (n - 1))
        q = math.exp(la[n] - la[n - 1] + logt) * (1.0 + 1e-12)
        if q < 1.0 and last * q / (1.0 - q) < (tol * tol) * total:
            break
        n += BLOCK
    else:
        raise ConvergenceError("normalized-kernel truncation did not converge")
    phase = np.conj(z) / abs(z)
    idx = np.arange(n, dtype=float)
    mags = np.exp(ld[:n] + idx * math.log(abs(z)))
    if not np.all(np.isfinite(mags)):
        raise NumericalError("normalized-kernel coefficients overflowed")
    return mags * phase ** idx / math.sqrt(total)


# ---- norm asymptotics ------------------------------------------------------


@dataclass
class NormBracket:
    """Pairwise ratio brackets between ||B_z||^2, 1/omega(D(z,r)), and 1/(tail(z)(1-|z|))."""

    r: float
    kernel_vs_disc: tuple[float, float]
    kernel_vs_tail: tuple[float, float]
    disc_vs_tail: tuple[float, float]

    def to_dict(self):
        return {"r": self.r,
                "kernel_vs_disc": list(self.kernel_vs_disc),
                "kernel_vs_tail": list(self.kernel_vs_tail),
                "disc_vs_tail": list(self.disc_vs_tail)}

    @property
    def finite(self) -> bool:
        vals = [*self.kernel_vs_disc, *self.kernel_vs_tail, *self.disc_vs_tail]
        return all(math.isfinite(v) and v > 0 for v in vals)


def kernel_norm_bracket(weight: RadialWeight, r: float,
                        radii: np.ndarray | None = None,
                        rule=None) -> NormBracket:
    """Measured comparability bracket over a radial grid up to |z| = 0.99."""
    from . import quadrature

    if radii is None:
        radii = np.linspace(0.0, 0.99, 34)
    radii = np.asarray(radii, dtype=float)
    a, _ = _series(weight).eval(radii.astype(complex) ** 2, 1e-10)
    a = a.real
    b = np.array([1.0 / weight.disc_mass(x, r, rule) for x in radii])
    c = 1.0 / (weight.tail_mass(radii) * (1.0 - radii))

    def bracket(p, q):
        ratio = p / q
        return (float(np.min(ratio)), float(np.max(ratio)))

    return NormBracket(r, bracket(a, b), bracket(a, c), bracket(b, c))
