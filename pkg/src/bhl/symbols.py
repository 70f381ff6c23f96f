"""Polynomial symbols in z and conj(z), with exact weighted inner products.

For a radial weight, int_D z^p conj(z)^q omega dA vanishes unless p = q, in
which case it equals 2 mu_{2p+1}.  Inner products between symbol polynomials
therefore reduce to moment lookups grouped by the degree difference m - n.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError, DomainError, ResourceLimitError
from .weights import RadialWeight

MUL_DEGREE_CAP = 256


class SymbolPoly:
    """Finite linear combination of monomials z^m conj(z)^n."""

    __slots__ = ("_terms",)

    def __init__(self, terms: dict[tuple[int, int], complex] | None = None):
        clean: dict[tuple[int, int], complex] = {}
        for (m, n), c in (terms or {}).items():
            if m < 0 or n < 0 or int(m) != m or int(n) != n:
                raise DomainError("monomial exponents must be nonnegative integers")
            c = complex(c)
            if c != 0:
                clean[(int(m), int(n))] = clean.get((int(m), int(n)), 0.0) + c
        self._terms = {k: v for k, v in clean.items() if v != 0}

    @classmethod
    def monomial(cls, m: int, n: int, coeff: complex = 1.0) -> "SymbolPoly":
        return cls({(m, n): coeff})

    def terms(self):
        return dict(self._terms)

    @property
    def deg_z(self) -> int:
        return max((m for m, _ in self._terms), default=0)

    @property
    def deg_zbar(self) -> int:
        return max((n for _, n in self._terms), default=0)

    @property
    def is_analytic(self) -> bool:
        return all(n == 0 for _, n in self._terms)

    @property
    def is_zero(self) -> bool:
        return not self._terms

    def __add__(self, other):
        if isinstance(other, (int, float, complex)):
            other = SymbolPoly({(0, 0): other})
        out = dict(self._terms)
        for k, v in other._terms.items():
            out[k] = out.get(k, 0.0) + v
        return SymbolPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return SymbolPoly({k: -v for k, v in self._terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, float, complex)):
            other = SymbolPoly({(0, 0): other})
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, float, complex)):
            return SymbolPoly({k: v * other for k, v in self._terms.items()})
        return multiply(self, other)

    __rmul__ = __mul__

    def conjugate(self) -> "SymbolPoly":
        return SymbolPoly({(n, m): np.conj(c) for (m, n), c in self._terms.items()})

    def rotate(self, theta: float) -> "SymbolPoly":
        """The symbol f(e^{i theta} z)."""
        return SymbolPoly({(m, n): c * np.exp(1j * theta * (m - n))
                           for (m, n), c in self._terms.items()})

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros_like(z)
        zb = np.conj(z)
        for (m, n), c in self._terms.items():
            out = out + c * z ** m * zb ** n
        if out.ndim == 0:
            return complex(out)
        return out

    def __eq__(self, other):
        return isinstance(other, SymbolPoly) and self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __repr__(self):
        if not self._terms:
            return "SymbolPoly(0)"
        bits = []
        for (m, n), c in sorted(self._terms.items()):
            mono = "".join(p for p, e in (("z^%d" % m, m), ("zbar^%d" % n, n)) if e)
            bits.append(f"({c:g})*{mono or '1'}")
        return "SymbolPoly(" + " + ".join(bits) + ")"


def multiply(f: SymbolPoly, g: SymbolPoly,
             max_degree: int | None = MUL_DEGREE_CAP) -> SymbolPoly:
    """Product of two symbols; degree-capped unless max_degree is None."""
    out: dict[tuple[int, int], complex] = {}
    for (m1, n1), c1 in f._terms.items():
        for (m2, n2), c2 in g._terms.items():
            m, n = m1 + m2, n1 + n2
            if max_degree is not None and (m > max_degree or n > max_degree):
                raise ResourceLimitError(
                    f"product degree ({m},{n}) exceeds cap {max_degree}")
            key = (m, n)
            out[key] = out.get(key, 0.0) + c1 * c2
    return SymbolPoly(out)


def monomial_integral(weight: RadialWeight, p: int, q: int) -> float:
    """int_D z^p conj(z)^q omega dA = 2 mu_{2p+1} when p = q, else 0."""
    if p < 0 or q < 0:
        raise DomainError("monomial exponents must be nonnegative")
    if p != q:
        return 0.0
    return 2.0 * weight.moment(2 * p + 1)


def _grouped(poly: SymbolPoly):
    groups: dict[int, tuple[list[int], list[complex]]] = {}
    for (m, n), c in poly._terms.items():
        sums, coeffs = groups.setdefault(m - n, ([], []))
        sums.append(m + n)
        coeffs.append(c)
    return groups


def inner_product(f: SymbolPoly, g: SymbolPoly, weight: RadialWeight) -> complex:
    """<f, g> in L^2(omega dA), exact via moment lookups."""
    gf, gg = _grouped(f), _grouped(g)
    common = set(gf) & set(gg)
    if not common:
        return 0.0 + 0.0j
    max_idx = 0
    for d in common:
        max_idx = max(max_idx, max(gf[d][0]) + max(gg[d][0]) + 1)
    table = weight.moment_int_table(max_idx)
    total = 0.0 + 0.0j
    for d in common:
        s1 = np.asarray(gf[d][0]); c1 = np.asarray(gf[d][1], dtype=complex)
        s2 = np.asarray(gg[d][0]); c2 = np.asarray(gg[d][1], dtype=complex)
        mu = table[s1[:, None] + s2[None, :] + 1]
        total += 2.0 * np.sum(c1[:, None] * np.conj(c2)[None, :] * mu)
    return complex(total)


def norm_sq(f: SymbolPoly, weight: RadialWeight) -> float:
    val = inner_product(f, f, weight)
    return float(val.real)


# ---- built-in family and grammar ------------------------------------------

Z = SymbolPoly.monomial(1, 0)
ZBAR = SymbolPoly.monomial(0, 1)

BUILTIN: dict[str, SymbolPoly] = {
    "zbar": ZBAR,
    "zbar2": SymbolPoly.monomial(0, 2),
    "absz2": SymbolPoly.monomial(1, 1),
    "rez": SymbolPoly({(1, 0): 0.5, (0, 1): 0.5}),
    "zbar_plus_zbar2": SymbolPoly({(0, 1): 1.0, (0, 2): 1.0}),
}

# the four names accepted by the CLI symbol grammar
SHORTHANDS = ("zbar", "zbar2", "absz2", "rez")


def parse_symbol(text: str) -> SymbolPoly:
    """Parse a symbol: a shorthand name or a flat comma list of m,n,re,im quadruples."""
    name = text.strip().lower()
    if name in SHORTHANDS:
        return BUILTIN[name]
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if not parts or len(parts) % 4:
        raise ConfigError(
            f"symbol {text!r}: expected a shorthand {SHORTHANDS} "
            "or m,n,re,im quadruples")
    terms: dict[tuple[int, int], complex] = {}
    for i in range(0, len(parts), 4):
        try:
            m, n = int(parts[i]), int(parts[i + 1])
            re, im = float(parts[i + 2]), float(parts[i + 3])
        except ValueError as exc:
            raise ConfigError(f"symbol {text!r}: bad quadruple "
                              f"{parts[i:i + 4]}") from exc
        if m < 0 or n < 0:
            raise ConfigError(f"symbol {text!r}: exponents must be nonnegative")
        key = (m, n)
        terms[key] = terms.get(key, 0.0) + complex(re, im)
    return SymbolPoly(terms)


def symbol_name(f: SymbolPoly) -> str:
    """Stable display name: a shorthand when it matches, else the quadruple list."""
    for name, poly in BUILTIN.items():
        if poly == f:
            return name
    bits = []
    for (m, n), c in sorted(f.terms().items()):
        bits.extend([str(m), str(n), repr(c.real), repr(c.imag)])
    return ",".join(bits)
