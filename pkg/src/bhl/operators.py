"""Bergman projection, Hankel operators, and Schatten-class diagnostics.

Everything here is exact moment arithmetic: the projection acts on mixed
monomials by

    P(z^p conj(z)^q) = (mu_{2p+1} / mu_{2(p-q)+1}) z^{p-q},   p >= q,

and zero when p < q, so Hankel images of polynomials are polynomials and
Gram matrices are assembled without quadrature.  The Gram of H_f on the
orthonormal basis e_i = z^i / sqrt(2 mu_{2i+1}) is

    G_ij = <f e_i, f e_j> - <P(f e_i), P(f e_j)>,

a positive semidefinite matrix whose eigenvalues are the squared singular
values of the truncated operator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericalError, ConvergenceError
from .kernels import binomial_log_coefficients, normalized_kernel_norm_sq_many
from .symbols import SymbolPoly, inner_product, multiply
from .weights import RadialWeight

EIG_CLIP = 1e-9          # relative PSD violation tolerated and clipped
DIVERGENCE_MARGIN = 0.05  # slope margin in the S_p divergence rule
CAPTURE_TOL = 1e-6        # synthesis columns must capture 1 - this of their norm


def basis_norms(weight: RadialWeight, count: int) -> np.ndarray:
    """||z^n||_{A^2_omega} = sqrt(2 mu_{2n+1}) for n < count."""
    return np.sqrt(2.0 * weight.moments_odd(count))


@dataclass
class OrthonormalBasis:
    """The monomial orthonormal basis e_n = z^n / sqrt(2 mu_{2n+1})."""

    weight: RadialWeight
    size: int

    def __post_init__(self):
        self.norms = basis_norms(self.weight, self.size)

    def function(self, n: int) -> SymbolPoly:
        if not 0 <= n < self.size:
            raise DomainError(f"basis index {n} outside [0, {self.size})")
        return SymbolPoly.monomial(n, 0, 1.0 / self.norms[n])


def bergman_project(f: SymbolPoly, weight: RadialWeight) -> SymbolPoly:
    """Orthogonal projection of a symbol polynomial onto the analytic part."""
    terms = f.terms()
    if not terms:
        return SymbolPoly({})
    mu = weight.moment_int_table(2 * max(p for (p, _) in terms) + 1)
    out: dict[tuple[int, int], complex] = {}
    for (p, q), c in terms.items():
        if p < q:
            continue
        key = (p - q, 0)
        out[key] = out.get(key, 0.0) + c * mu[2 * p + 1] / mu[2 * (p - q) + 1]
    return SymbolPoly(out)


def hankel(f: SymbolPoly, g: SymbolPoly, weight: RadialWeight,
           max_degree: int | None = 256) -> SymbolPoly:
    """H_f g = (I - P)(f g) for analytic g."""
    if not g.is_analytic:
        raise DomainError("Hankel operators act on analytic arguments")
    fg = multiply(f, g, max_degree)
    return fg - bergman_project(fg, weight)


def commutator(f: SymbolPoly, g: SymbolPoly, weight: RadialWeight,
               max_degree: int | None = 256) -> SymbolPoly:
    """[M_f, P] g = f P(g) - P(f g) for any symbol-polynomial g."""
    return multiply(f, bergman_project(g, weight), max_degree) \
        - bergman_project(multiply(f, g, max_degree), weight)


# ---- Gram matrices ---------------------------------------------------------


@dataclass
class HankelGram:
    symbol: SymbolPoly
    weight_label: str
    size: int
    matrix: np.ndarray


def hankel_gram(f: SymbolPoly, weight: RadialWeight, size: int) -> HankelGram:
    """Gram matrix of H_f on the first `size` orthonormal basis functions."""
    if size < 1:
        raise DomainError("gram size must be positive")
    terms = list(f.terms().items())
    if not terms:
        return HankelGram(f, weight.label(), size,
                          np.zeros((size, size), dtype=complex))
    max_m = max(m for (m, _), _ in terms)
    max_n = max(n for (_, n), _ in terms)
    mu = weight.moment_int_table(2 * (size + max_m + max_n) + 3)
    b = basis_norms(weight, size)
    i = np.arange(size)
    gram = np.zeros((size, size), dtype=complex)
    for (m1, n1), c1 in terms:
        for (m2, n2), c2 in terms:
            shift = (m1 - n1) - (m2 - n2)
            j = i + shift
            ok = (j >= 0) & (j < size)
            ii, jj = i[ok], j[ok]
            if len(ii) == 0:
                continue
            raw = 2.0 * mu[m1 + n1 + m2 + n2 + ii + jj + 1]
            # projection parts P(f e_i) = sum_t c_t rho_{t,i} z^{m_t + i - n_t}
            a1 = m1 + ii - n1
            a2 = m2 + jj - n2
            rho1 = np.where(a1 >= 0, mu[2 * (m1 + ii) + 1] / mu[2 * np.maximum(a1, 0) + 1], 0.0)
            rho2 = np.where(a2 >= 0, mu[2 * (m2 + jj) + 1] / mu[2 * np.maximum(a2, 0) + 1], 0.0)
            proj = np.where(a1 == a2, rho1 * rho2 * 2.0 * mu[2 * np.maximum(a1, 0) + 1], 0.0)
            gram[ii, jj] += c1 * np.conj(c2) * (raw - proj) / (b[ii] * b[jj])
    herm_gap = float(np.max(np.abs(gram - gram.conj().T)))
    if herm_gap > 1e-12 * max(1.0, float(np.max(np.abs(gram)))):
        raise NumericalError(f"Gram assembly lost Hermitian symmetry by {herm_gap:.2e}")
    gram = 0.5 * (gram + gram.conj().T)
    eigs = np.linalg.eigvalsh(gram)
    scale = max(float(np.max(np.abs(eigs))), 1e-300)
    if eigs[0] < -EIG_CLIP * scale:
        raise NumericalError(
            f"Gram matrix indefinite: min eigenvalue {eigs[0]:.3e} "
            f"below -{EIG_CLIP:g} * norm")
    return HankelGram(f, weight.label(), size, gram)


def singular_values(gram: HankelGram | np.ndarray) -> np.ndarray:
    """Singular values (descending) from a PSD Gram matrix, small negatives clipped."""
    matrix = gram.matrix if isinstance(gram, HankelGram) else np.asarray(gram)
    eigs = np.linalg.eigvalsh(matrix)
    scale = max(float(np.max(np.abs(eigs))), 1e-300)
    if eigs[0] < -EIG_CLIP * scale:
        raise NumericalError("PSD violation beyond the clip tolerance")
    eigs = np.clip(eigs, 0.0, None)
    return np.sqrt(eigs)[::-1]


@dataclass
class SchattenReport:
    p: float
    size: int
    singular_values: np.ndarray
    power_sum: float
    norm: float
    tail_slope: float

    @property
    def divergent(self) -> bool:
        return slope_divergent(self.tail_slope, self.p)

    def to_dict(self):
        return {"p": self.p, "size": self.size, "norm": self.norm,
                "power_sum": self.power_sum, "tail_slope": self.tail_slope,
                "divergent": self.divergent}


def tail_slope(values: np.ndarray) -> float:
    """Log-log slope of s_n against n over the last third of the sequence."""
    values = np.asarray(values, dtype=float)
    k = len(values)
    lo = max(1, (2 * k) // 3)
    seg = values[lo:]
    n = np.arange(lo, k, dtype=float) + 1.0
    keep = seg > 0
    if np.sum(keep) < 3:
        return math.nan
    return float(np.polyfit(np.log(n[keep]), np.log(seg[keep]), 1)[0])


def slope_divergent(slope: float, p: float) -> bool:
    """Truncated S_p sums are flagged divergent when the decay slope is at or
    above -1/p (with a margin toward the divergent side, so the boundary
    decay s_n ~ n^(-1/p) is reported as divergent rather than summed)."""
    if math.isnan(slope):
        return False
    return slope >= -1.0 / p - DIVERGENCE_MARGIN


def schatten_norm(gram: HankelGram | np.ndarray, p: float) -> SchattenReport:
    """S_p report of the truncated operator represented by a Gram matrix."""
    if not p > 0:
        raise DomainError("Schatten exponent p must be positive")
    s = singular_values(gram)
    power = float(np.sum(s ** p))
    size = len(s)
    return SchattenReport(p, size, s, power, power ** (1.0 / p), tail_slope(s))


# ---- synthesis operator ----------------------------------------------------


@dataclass
class SynthesisResult:
    matrix: np.ndarray
    operator_norm: float
    capture_min: float


def synthesis_matrix(weight: RadialWeight, eta: float, points,
                     size: int) -> SynthesisResult:
    """Coefficient matrix of e_j -> k_{omega,a_j} on the monomial basis.

    Column j holds the basis coefficients of the normalized kernel at a_j,
    truncated to `size`; each column must capture 1 - 1e-6 of its norm.
    """
    from .geometry import Lattice

    if isinstance(points, Lattice):
        points = points.points
    points = np.asarray(points, dtype=complex)
    b = basis_norms(weight, size)
    ld = binomial_log_coefficients(eta + 2.0, size)
    norms_sq = normalized_kernel_norm_sq_many(
        weight, eta, np.abs(points) ** 2)
    n = np.arange(size, dtype=float)
    cols = np.empty((size, len(points)), dtype=complex)
    capture_min = 1.0
    for j, a in enumerate(points):
        aa = abs(a)
        if aa == 0.0:
            col = np.zeros(size, dtype=complex)
            col[0] = b[0]
        else:
            mags = np.exp(ld + n * math.log(aa)) * b
            phase = (np.conj(a) / aa) ** n
            col = mags * phase
        norm_full = math.sqrt(float(norms_sq[j]))
        capture = float(np.linalg.norm(col)) / norm_full
        capture_min = min(capture_min, capture)
        if capture < 1.0 - CAPTURE_TOL:
            raise ConvergenceError(
                f"synthesis column {j} captures only {capture:.8f} of its "
                f"norm; increase the basis size (currently {size})")
        cols[:, j] = col / norm_full
    op_norm = float(np.linalg.norm(cols, 2))
    return SynthesisResult(cols, op_norm, capture_min)


# ---- mixed orthonormal bases (for operator-identity checks) ----------------


def mixed_monomials(count: int) -> list[tuple[int, int]]:
    """First `count` exponent pairs ordered by total degree, then conj-degree."""
    out = []
    total = 0
    while len(out) < count:
        for n in range(total + 1):
            out.append((total - n, n))
            if len(out) == count:
                break
        total += 1
    return out


def mixed_orthonormal_basis(weight: RadialWeight, count: int) -> list[SymbolPoly]:
    """Orthonormal basis of the mixed-polynomial span of the first monomials.

    Monomials are orthogonal across classes d = m - n; within a class the
    moment Gram matrix is Cholesky-factored to orthonormalize.
    """
    monos = mixed_monomials(count)
    classes: dict[int, list[tuple[int, int]]] = {}
    for (m, n) in monos:
        classes.setdefault(m - n, []).append((m, n))
    basis: dict[tuple[int, int], SymbolPoly] = {}
    max_idx = 2 * max(m + n for m, n in monos) + 1
    mu = weight.moment_int_table(max_idx)
    for d, members in classes.items():
        sums = np.array([m + n for m, n in members])
        gram = 2.0 * mu[sums[:, None] + sums[None, :] + 1]
        chol = np.linalg.cholesky(gram)
        combo = np.linalg.inv(chol).T  # columns give orthonormal combinations
        for j, key in enumerate(members):
            terms = {members[a]: combo[a, j] for a in range(j + 1)}
            basis[key] = SymbolPoly(terms)
    return [basis[key] for key in monos]


def operator_matrix(apply_op, basis: list[SymbolPoly],
                    weight: RadialWeight) -> np.ndarray:
    """Matrix M[b, a] = <Op u_a, u_b> on an orthonormal basis."""
    images = [apply_op(u) for u in basis]
    out = np.empty((len(basis), len(basis)), dtype=complex)
    for a, img in enumerate(images):
        for bidx, u in enumerate(basis):
            out[bidx, a] = inner_product(img, u, weight)
    return out
