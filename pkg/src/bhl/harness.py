"""Experiment runner: equivalence sweeps and inequality suites.

run_equivalence computes, per (weight, symbol, p) cell, three quantities that
the underlying theory ties together: the truncated Schatten power sum
||H_f||_{S_p}^p + ||H_fbar||_{S_p}^p, the invariant integral of the global
oscillation MO^p, and the lattice power sum of the local oscillation.  Each
comes with a divergence verdict (finite limits cannot be computed exactly, so
trends stand in: singular-value tail slope on the operator side, growth
between two truncation radii on the integral sides).  Ratios are reported
only for cells where all three verdicts are convergent.

run_lemma_suite checks the supporting inequalities on a grid: the weighted
kernel integral bound, the reverse estimate through the reproducing kernel
double integral, the sharp Hankel-vs-oscillation bound (constant exactly 1),
and the lattice-sum vs integral comparability for the local oscillation.
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields

import numpy as np

from .errors import BHLError, ConfigError
from .geometry import Lattice, generate_lattice
from .kernels import kernel_outer, normalized_kernel_coefficients, \
    normalized_kernel_norm_sq_many
from .operators import hankel, hankel_gram, singular_values, slope_divergent, \
    tail_slope
from .oscillation import MOVariant, integral_from_profile, mo_local, \
    mo_global_series, oscillation_profiles
from .quadrature import DiscRule, invariant_nodes
from .symbols import SymbolPoly, inner_product, parse_symbol
from .weights import RadialWeight, classify

GROWTH_THRESHOLD = 0.25  # relative growth across truncation radii -> divergent
TINY = 1e-12
BOUNDED_FACTOR = 1.25    # ratio profiles may not outgrow their bulk by more

DEFAULT_WEIGHTS = ("standard:eta=0", "standard:eta=1", "logpow:alpha=-0.5,beta=0")
DEFAULT_SYMBOLS = ("zbar", "zbar2", "absz2", "rez")

CSV_COLUMNS = ("weight", "symbol", "p", "schatten_sum", "schatten_flag",
               "mo_global", "mo_global_flag", "mo_local_sum", "mo_local_flag",
               "ratio_gl", "ratio_gs", "ratio_ls")


# ---- configuration -----------------------------------------------------------


@dataclass
class ExperimentConfig:
    weights: list = field(default_factory=lambda: list(DEFAULT_WEIGHTS))
    symbols: list = field(default_factory=lambda: list(DEFAULT_SYMBOLS))
    p_values: list = field(default_factory=lambda: [1.0, 2.0, 4.0])
    etas: list = field(default_factory=lambda: [4.0])
    local_radii: list = field(default_factory=lambda: [math.atanh(0.5)])
    gram_size: int = 128
    lattice_r: float = 0.5
    lattice_r_max: float = 0.995
    flags_r_max: list = field(default_factory=lambda: [0.98, 0.995])
    rule_radial: int = 128
    rule_angular: int = 256
    profile_radial: int = 48
    profile_angular: int = 64
    inner_radial: int = 48
    inner_angular: int = 96
    pairs_radial: int = 32
    pairs_angular: int = 64
    lemma5_radial: int = 24
    lemma5_angular: int = 48
    lemma_radii: int = 10
    lemma_angles: int = 5
    lemma_max_abs: float = 0.95
    weight1_c: list = field(default_factory=lambda: [0.0, 1.0])
    lemma5_r: float = 0.25
    lemma5_count: int = 16
    output_dir: str | None = None
    figures: bool = True
    seed: int = 0
    workers: int = 1

    # JSON layout: nested groups keep the file readable; the dataclass is flat.
    _GROUPS = {
        "lattice": {"r": "lattice_r", "r_max": "lattice_r_max"},
        "quadrature": {
            "radial": "rule_radial", "angular": "rule_angular",
            "profile_radial": "profile_radial", "profile_angular": "profile_angular",
            "inner_radial": "inner_radial", "inner_angular": "inner_angular",
            "pairs_radial": "pairs_radial", "pairs_angular": "pairs_angular",
            "lemma5_radial": "lemma5_radial", "lemma5_angular": "lemma5_angular",
        },
        "lemmas": {
            "radii": "lemma_radii", "angles": "lemma_angles",
            "max_abs": "lemma_max_abs", "weight1_c": "weight1_c",
            "lemma5_r": "lemma5_r", "lemma5_count": "lemma5_count",
        },
    }
    _SCALARS = {
        "weights": "weights", "symbols": "symbols", "p": "p_values",
        "etas": "etas", "local_radii": "local_radii", "gram_size": "gram_size",
        "flags_r_max": "flags_r_max", "output_dir": "output_dir",
        "figures": "figures", "seed": "seed", "workers": "workers",
    }

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ConfigError("config root must be a JSON object")
        cfg = cls()
        for key, value in data.items():
            if key in cls._GROUPS:
                if not isinstance(value, dict):
                    raise ConfigError(f"config field {key!r} must be an object")
                for sub, subval in value.items():
                    attr = cls._GROUPS[key].get(sub)
                    if attr is None:
                        raise ConfigError(f"unknown config key {key}.{sub}")
                    setattr(cfg, attr, subval)
            elif key in cls._SCALARS:
                setattr(cfg, cls._SCALARS[key], value)
            else:
                raise ConfigError(f"unknown config key {key}")
        cfg.validate()
        return cfg

    @classmethod
    def from_json(cls, path: str) -> "ExperimentConfig":
        try:
            with open(path, "r", encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        out = {}
        for f in fields(self):
            val = getattr(self, f.name)
            out[f.name] = list(val) if isinstance(val, (list, tuple)) else val
        return out

    def validate(self) -> None:
        def _numbers(name, values, low=None):
            if not isinstance(values, (list, tuple)) or not values:
                raise ConfigError(f"{name} must be a non-empty list")
            out = []
            for i, v in enumerate(values):
                if not isinstance(v, (int, float)) or isinstance(v, bool):
                    raise ConfigError(f"{name}[{i}] must be a number")
                if low is not None and not v > low:
                    raise ConfigError(f"{name}[{i}] must exceed {low}")
                out.append(float(v))
            return out

        for i, spec in enumerate(list(self.weights)):
            try:
                RadialWeight.parse(spec)
            except BHLError as exc:
                raise ConfigError(f"weights[{i}]: {exc}") from exc
        for i, spec in enumerate(list(self.symbols)):
            try:
                parse_symbol(spec)
            except BHLError as exc:
                raise ConfigError(f"symbols[{i}]: {exc}") from exc
        self.p_values = _numbers("p", self.p_values, low=0.0)
        self.etas = _numbers("etas", self.etas, low=-1.0)
        self.local_radii = _numbers("local_radii", self.local_radii, low=0.0)
        self.flags_r_max = _numbers("flags_r_max", self.flags_r_max, low=0.0)
        if len(self.flags_r_max) < 2 or any(r >= 1.0 for r in self.flags_r_max) \
                or sorted(self.flags_r_max) != self.flags_r_max:
            raise ConfigError("flags_r_max must be an ascending list inside (0, 1)")
        if not isinstance(self.gram_size, int) or not 2 <= self.gram_size <= 512:
            raise ConfigError("gram_size must be an integer in [2, 512]")
        if not 0 < self.lattice_r <= 5.0:
            raise ConfigError("lattice.r must lie in (0, 5]")
        if not 0 < self.lattice_r_max < 1.0:
            raise ConfigError("lattice.r_max must lie in (0, 1)")
        for name in ("rule_radial", "profile_radial", "inner_radial",
                     "pairs_radial", "lemma5_radial"):
            if not isinstance(getattr(self, name), int) or getattr(self, name) < 2:
                raise ConfigError(f"quadrature.{name} must be an integer >= 2")
        for name in ("rule_angular", "profile_angular", "inner_angular",
                     "pairs_angular", "lemma5_angular"):
            if not isinstance(getattr(self, name), int) or getattr(self, name) < 4:
                raise ConfigError(f"quadrature.{name} must be an integer >= 4")
        if not isinstance(self.lemma_radii, int) or self.lemma_radii < 2:
            raise ConfigError("lemmas.radii must be an integer >= 2")
        if not isinstance(self.lemma_angles, int) or self.lemma_angles < 1:
            raise ConfigError("lemmas.angles must be an integer >= 1")
        if not 0 < self.lemma_max_abs < 1.0:
            raise ConfigError("lemmas.max_abs must lie in (0, 1)")
        self.weight1_c = [float(c) for c in self.weight1_c]
        if any(c < 0 for c in self.weight1_c):
            raise ConfigError("lemmas.weight1_c entries must be >= 0")
        if not self.lemma5_r > 0:
            raise ConfigError("lemmas.lemma5_r must be positive")
        if not isinstance(self.lemma5_count, int) or self.lemma5_count < 1:
            raise ConfigError("lemmas.lemma5_count must be a positive integer")
        if not isinstance(self.workers, int) or self.workers < 1:
            raise ConfigError("workers must be a positive integer")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ConfigError("seed must be a non-negative integer")

    def weight_objects(self) -> list:
        return [RadialWeight.parse(s) for s in self.weights]

    def symbol_objects(self) -> list:
        return [(s, parse_symbol(s)) for s in self.symbols]

    def main_rule(self) -> DiscRule:
        return DiscRule(self.rule_radial, self.rule_angular)

    def profile_rule(self) -> DiscRule:
        return DiscRule(self.profile_radial, self.profile_angular)

    def inner_rule(self) -> DiscRule:
        return DiscRule(self.inner_radial, self.inner_angular)

    def pairs_rule(self) -> DiscRule:
        return DiscRule(self.pairs_radial, self.pairs_angular)

    def lemma5_rule(self) -> DiscRule:
        return DiscRule(self.lemma5_radial, self.lemma5_angular)


# ---- equivalence experiment ---------------------------------------------------


def growth_divergent(v_small: float, v_large: float) -> bool:
    """Divergence verdict from values at two truncation radii."""
    if abs(v_small) <= TINY:
        return abs(v_large) > TINY
    return (v_large - v_small) / abs(v_small) > GROWTH_THRESHOLD


def _flag(divergent: bool) -> str:
    return "divergent" if divergent else "convergent"


@dataclass
class EquivalenceRow:
    weight: str
    symbol: str
    p: float
    schatten_sum: float
    schatten_flag: str
    mo_global: float
    mo_global_flag: str
    mo_local_sum: float
    mo_local_flag: str
    ratio_gl: float | None
    ratio_gs: float | None
    ratio_ls: float | None

    @property
    def flags(self):
        return (self.schatten_flag, self.mo_global_flag, self.mo_local_flag)

    @property
    def verdicts_agree(self) -> bool:
        return len(set(self.flags)) == 1

    def to_dict(self) -> dict:
        return {
            "weight": self.weight, "symbol": self.symbol, "p": self.p,
            "schatten_sum": self.schatten_sum, "schatten_flag": self.schatten_flag,
            "mo_global": self.mo_global, "mo_global_flag": self.mo_global_flag,
            "mo_local_sum": self.mo_local_sum, "mo_local_flag": self.mo_local_flag,
            "ratio_gl": self.ratio_gl, "ratio_gs": self.ratio_gs,
            "ratio_ls": self.ratio_ls,
        }


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


@dataclass
class EquivalenceReport:
    rows: list
    meta: dict
    errors: list
    partial: bool
    config: dict
    runtime: float

    @property
    def verdicts_agree(self) -> bool:
        return all(row.verdicts_agree for row in self.rows)

    def ratio_bracket(self):
        ratios = [r for row in self.rows
                  for r in (row.ratio_gl, row.ratio_gs, row.ratio_ls)
                  if r is not None]
        if not ratios:
            return None
        return (min(ratios), max(ratios))

    def to_csv(self, path: str | None = None) -> str:
        lines = [",".join(CSV_COLUMNS)]
        for row in self.rows:
            d = row.to_dict()
            lines.append(",".join(_csv_cell(d[c]) for c in CSV_COLUMNS))
        text = "\n".join(lines) + "\n"
        if path is not None:
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(text)
        return text

    def to_json(self, path: str | None = None) -> dict:
        bracket = self.ratio_bracket()
        payload = {
            "config": self.config,
            "rows": [row.to_dict() for row in self.rows],
            "meta": self.meta,
            "errors": self.errors,
            "partial": self.partial,
            "verdicts_agree": self.verdicts_agree,
            "ratio_bracket": list(bracket) if bracket else None,
            "runtime_seconds": self.runtime,
        }
        if path is not None:
            with open(path, "w", encoding="utf-8") as fh:
                json.dump(payload, fh, indent=2, sort_keys=True)
                fh.write("\n")
        return payload


def _equivalence_weight_cell(config: ExperimentConfig, weight: RadialWeight,
                             symbols, lattice: Lattice, node_sets: dict):
    t0 = time.perf_counter()
    eta = config.etas[0]
    local_r = config.local_radii[0]
    inner = config.inner_rule()
    rms = [config.flags_r_max[0], config.flags_r_max[-1]]
    fns = [poly for _, poly in symbols]

    report = classify(weight)
    meta = {"classification": report.to_dict(), "cells": {}}

    glob_profiles = {}
    for rm in rms:
        nodes, _, _ = node_sets[rm]
        norms = normalized_kernel_norm_sq_many(weight, eta, np.abs(nodes) ** 2)
        glob_profiles[rm] = oscillation_profiles(
            fns, weight, MOVariant.global_(eta), nodes, inner, norms_sq=norms)
    loc_lattice = oscillation_profiles(
        fns, weight, MOVariant.local(local_r), lattice.points, inner)
    lattice_abs = np.abs(lattice.points)

    rows = []
    for si, (name, f) in enumerate(symbols):
        s_f = singular_values(hankel_gram(f, weight, config.gram_size))
        s_fb = singular_values(hankel_gram(f.conjugate(), weight,
                                           config.gram_size))
        slope_f = tail_slope(s_f)
        slope_fb = tail_slope(s_fb)
        cell_meta = {"tail_slope": slope_f, "tail_slope_conj": slope_fb,
                     "mo_global": {}, "mo_local_sum": {}}
        for p in config.p_values:
            schatten_sum = float(np.sum(s_f ** p) + np.sum(s_fb ** p))
            s_div = slope_divergent(slope_f, p) or slope_divergent(slope_fb, p)
            gvals = {}
            for rm in rms:
                _, wts, shell_idx = node_sets[rm]
                gvals[rm] = integral_from_profile(
                    glob_profiles[rm][si], p, wts, shell_idx, rm).value
            g_div = growth_divergent(gvals[rms[0]], gvals[rms[-1]])
            lvals = {rm: float(np.sum(loc_lattice[si][lattice_abs <= rm] ** p))
                     for rm in rms}
            l_div = growth_divergent(lvals[rms[0]], lvals[rms[-1]])
            cell_meta["mo_global"][repr(p)] = gvals[rms[-1]]
            cell_meta["mo_local_sum"][repr(p)] = lvals[rms[-1]]
            ratios = (None, None, None)
            if not (s_div or g_div or l_div):
                g, l, s = gvals[rms[-1]], lvals[rms[-1]], schatten_sum
                if min(g, l, s) > TINY:
                    ratios = (g / l, g / s, l / s)
            rows.append(EquivalenceRow(
                weight=weight.label(), symbol=name, p=p,
                schatten_sum=schatten_sum, schatten_flag=_flag(s_div),
                mo_global=gvals[rms[-1]], mo_global_flag=_flag(g_div),
                mo_local_sum=lvals[rms[-1]], mo_local_flag=_flag(l_div),
                ratio_gl=ratios[0], ratio_gs=ratios[1], ratio_ls=ratios[2]))
        meta["cells"][name] = cell_meta
    meta["runtime_seconds"] = time.perf_counter() - t0
    return rows, meta


def run_equivalence(config: ExperimentConfig) -> EquivalenceReport:
    config.validate()
    t0 = time.perf_counter()
    weights = config.weight_objects()
    symbols = config.symbol_objects()
    lattice = generate_lattice(config.lattice_r, config.lattice_r_max)
    rms = [config.flags_r_max[0], config.flags_r_max[-1]]
    node_sets = {rm: invariant_nodes(rm, config.profile_rule()) for rm in rms}

    results: dict[int, tuple] = {}
    errors: dict[int, dict] = {}

    def run_cell(wi: int):
        return _equivalence_weight_cell(config, weights[wi], symbols,
                                        lattice, node_sets)

    indices = range(len(weights))
    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            futures = {wi: pool.submit(run_cell, wi) for wi in indices}
            for wi, fut in futures.items():
                try:
                    results[wi] = fut.result()
                except BHLError as exc:
                    errors[wi] = {"weight": weights[wi].label(),
                                  "error": type(exc).__name__,
                                  "message": str(exc)}
    else:
        for wi in indices:
            try:
                results[wi] = run_cell(wi)
            except BHLError as exc:
                errors[wi] = {"weight": weights[wi].label(),
                              "error": type(exc).__name__,
                              "message": str(exc)}

    rows = []
    meta = {"weights": {}, "lattice_count": len(lattice),
            "lattice_r": config.lattice_r, "eta": config.etas[0],
            "local_r": config.local_radii[0]}
    for wi in indices:
        if wi in results:
            wrows, wmeta = results[wi]
            rows.extend(wrows)
            meta["weights"][weights[wi].label()] = wmeta
    return EquivalenceReport(
        rows=rows, meta=meta, errors=[errors[k] for k in sorted(errors)],
        partial=bool(errors), config=config.to_dict(),
        runtime=time.perf_counter() - t0)


# ---- lemma suite ---------------------------------------------------------------


def lemma_grid(config: ExperimentConfig) -> np.ndarray:
    radii = np.linspace(0.05, config.lemma_max_abs, config.lemma_radii)
    angles = 2.0 * np.pi * np.arange(config.lemma_angles) / config.lemma_angles
    return (radii[:, None] * np.exp(1j * angles)[None, :]).ravel()


def weight1_profile(weight: RadialWeight, eta: float, c: float,
                    radii: np.ndarray, rule: DiscRule):
    """Ratio LHS/RHS of the weighted kernel integral bound along real radii.

    LHS(z) = int |1 - conj(z) zeta|^(-eta) beta(z, zeta)^c omega dA(zeta),
    recentered so the integrand stays bounded; RHS(z) is the tail mass over
    (1 - |z|)^(eta - 1).  The recentered integrand carries the same rim
    factor omega(|phi_z(u)|) as the Berezin average, so the rule uses the
    rim map.
    """
    rule = rule.rim()
    u = rule.nodes()
    base = rule.weights()
    beta_pow = np.arctanh(np.abs(u)) ** c if c != 0 else np.ones_like(base)
    lhs = np.empty(len(radii))
    for i, r in enumerate(radii):
        one = 1.0 - r * u
        zeta_abs = np.abs((r - u) / one)
        integrand = np.abs(one) ** (eta - 4.0) * (1.0 - r * r) ** (2.0 - eta) \
            * beta_pow * weight.density(zeta_abs)
        lhs[i] = float(np.real(np.sum(integrand * base)))
    rhs = np.array([weight.tail_mass(r) * (1.0 - r) ** (1.0 - eta)
                    for r in radii])
    return lhs, rhs


def _lemma5_cells(weight: RadialWeight, symbols, r: float, z: complex,
                  rule: DiscRule, mo_rule: DiscRule):
    """Per symbol: LHS = MO_local(f)(z)^2 and RHS = the double integral of
    the inner deviation against the weight's own reproducing kernel over
    D(z, r), both by quadrature.  The kernel matrix depends only on (weight,
    z), so all symbols share it."""
    from .oscillation import bergman_disc_weights

    za = np.array([z], dtype=complex)
    zeta, rho = bergman_disc_weights(za, weight, r, rule)
    zeta, rho = zeta[0], np.real(rho[0])
    mass = float(np.sum(rho))
    kernel = kernel_outer(weight, zeta, zeta)
    kernel_mass = kernel @ rho
    out = []
    for f in symbols:
        fv = f(zeta)
        inner = fv * kernel_mass - kernel @ (fv * rho)
        rhs = float(np.sum(np.abs(inner) ** 2 * rho) / mass)
        lhs = mo_local(f, weight, r, z, mo_rule) ** 2
        out.append((lhs, rhs))
    return out


def _lemma3_cell(weight: RadialWeight, eta: float, f: SymbolPoly,
                 kernel_poly: SymbolPoly, z: complex):
    h = hankel(f, kernel_poly, weight, max_degree=None)
    lhs = math.sqrt(max(float(np.real(inner_product(h, h, weight))), 0.0))
    rhs = mo_global_series(f, weight, eta, z)
    return lhs, rhs


def _bounded(ratios: np.ndarray) -> bool:
    """True when the tail of a ratio profile does not outgrow its bulk."""
    ratios = np.asarray(ratios, dtype=float)
    k = max(1, len(ratios) // 4)
    head = float(np.max(ratios[:-k])) if len(ratios) > k else float(ratios[0])
    return float(np.max(ratios[-k:])) <= BOUNDED_FACTOR * max(head, TINY)


@dataclass
class LemmaSuiteReport:
    weight1: list
    lemma3: list
    lemma5: list
    aim1: list
    tightness: dict
    config: dict
    runtime: float

    def max_ratios(self) -> dict:
        out = {}
        for section in ("weight1", "lemma3", "lemma5"):
            entries = getattr(self, section)
            vals = [e["max_ratio"] for e in entries if e.get("max_ratio") is not None]
            out[section] = max(vals) if vals else None
        return out

    def to_csv(self, path: str | None = None) -> str:
        lines = ["section,weight,case,z_re,z_im,lhs,rhs,ratio"]

        def add(section, weight, case, z, lhs, rhs, ratio):
            lines.append(",".join([
                section, weight, case, repr(float(z.real)), repr(float(z.imag)),
                _csv_cell(float(lhs)), _csv_cell(float(rhs)),
                _csv_cell(None if ratio is None else float(ratio))]))

        for e in self.weight1:
            for r, lhs, rhs, ratio in zip(e["radii"], e["lhs"], e["rhs"], e["ratio"]):
                add("weight1", e["weight"], f"c={e['c']:g},eta={e['eta']:g}",
                    complex(r), lhs, rhs, ratio)
        for e in self.lemma3:
            for z, lhs, rhs, ratio in e["rows"]:
                add("lemma3", e["weight"], e["symbol"], z, lhs, rhs, ratio)
        for e in self.lemma5:
            for z, lhs, rhs, ratio in e["rows"]:
                add("lemma5", e["weight"], e["symbol"], z, lhs, rhs, ratio)
        for e in self.aim1:
            add("aim1", e["weight"], f"{e['symbol']},p={e['p']:g}", 0j,
                e["lattice_sum"], e["integral"], e["ratio"])
        text = "\n".join(lines) + "\n"
        if path is not None:
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(text)
        return text

    def to_json(self, path: str | None = None) -> dict:
        def strip(entries, drop):
            out = []
            for e in entries:
                d = {k: v for k, v in e.items() if k not in drop}
                out.append(d)
            return out

        payload = {
            "config": self.config,
            "weight1": [
                {**{k: v for k, v in e.items() if k not in ("radii", "lhs", "rhs", "ratio")},
                 "radii": [float(x) for x in e["radii"]],
                 "ratio": [float(x) for x in e["ratio"]]}
                for e in self.weight1],
            "lemma3": strip(self.lemma3, drop=("rows",)),
            "lemma5": strip(self.lemma5, drop=("rows",)),
            "aim1": self.aim1,
            "tightness": self.tightness,
            "max_ratios": self.max_ratios(),
            "runtime_seconds": self.runtime,
        }
        if path is not None:
            with open(path, "w", encoding="utf-8") as fh:
                json.dump(payload, fh, indent=2, sort_keys=True)
                fh.write("\n")
        return payload


def run_lemma_suite(config: ExperimentConfig) -> LemmaSuiteReport:
    config.validate()
    t0 = time.perf_counter()
    weights = config.weight_objects()
    symbols = config.symbol_objects()
    eta = config.etas[0]
    grid = lemma_grid(config)
    radii = np.linspace(0.05, config.lemma_max_abs, config.lemma_radii)

    weight1_entries = []
    for w in weights:
        for e in config.etas:
            for c in config.weight1_c:
                lhs, rhs = weight1_profile(w, e, c, radii, config.main_rule())
                ratio = lhs / rhs
                weight1_entries.append({
                    "weight": w.label(), "c": c, "eta": e,
                    "radii": radii, "lhs": lhs, "rhs": rhs, "ratio": ratio,
                    "max_ratio": float(np.max(ratio)),
                    "bounded": _bounded(ratio)})

    lemma3_entries = []
    tightness = {}
    for w in weights:
        kernels = {}
        for z in grid:
            coeffs = normalized_kernel_coefficients(w, eta, complex(z))
            kernels[z] = SymbolPoly({(n, 0): cf for n, cf in enumerate(coeffs)})
        for name, f in symbols:
            rows = []
            for z in grid:
                lhs, rhs = _lemma3_cell(w, eta, f, kernels[z], complex(z))
                rows.append((complex(z), lhs, rhs,
                             lhs / rhs if rhs > TINY else None))
            ratios = [r for (_, _, _, r) in rows if r is not None]
            lemma3_entries.append({
                "weight": w.label(), "symbol": name, "rows": rows,
                "max_ratio": max(ratios) if ratios else None})
    w0 = weights[0]
    k0 = SymbolPoly({(n, 0): cf for n, cf in
                     enumerate(normalized_kernel_coefficients(w0, eta, 0.0))})
    f0 = parse_symbol("zbar")
    lhs0, rhs0 = _lemma3_cell(w0, eta, f0, k0, 0.0)
    tightness = {"weight": w0.label(), "symbol": "zbar", "z": 0.0,
                 "lhs": lhs0, "rhs": rhs0, "ratio": lhs0 / rhs0}

    lemma5_entries = []
    pts = grid[:: max(1, len(grid) // config.lemma5_count)]
    for w in weights:
        per_symbol = {name: [] for name, _ in symbols}
        for z in pts:
            cells = _lemma5_cells(w, [f for _, f in symbols], config.lemma5_r,
                                  complex(z), config.lemma5_rule(),
                                  config.inner_rule())
            for (name, _), (lhs, rhs) in zip(symbols, cells):
                per_symbol[name].append(
                    (complex(z), lhs, rhs, lhs / rhs if rhs > TINY else None))
        for name, _ in symbols:
            rows = per_symbol[name]
            ordered = sorted(rows, key=lambda row: abs(row[0]))
            ratios = [r for (_, _, _, r) in ordered if r is not None]
            lemma5_entries.append({
                "weight": w.label(), "symbol": name, "rows": rows,
                "max_ratio": max(ratios) if ratios else None,
                "bounded": _bounded(np.array(ratios)) if ratios else True})

    aim1_entries = []
    local_r = config.local_radii[0]
    lattice = generate_lattice(config.lattice_r, config.lattice_r_max)
    rms = [config.flags_r_max[0], config.flags_r_max[-1]]
    node_sets = {rm: invariant_nodes(rm, config.profile_rule()) for rm in rms}
    fns = [poly for _, poly in symbols]
    for w in weights:
        lat_prof = oscillation_profiles(fns, w, MOVariant.local(local_r),
                                        lattice.points, config.inner_rule())
        node_prof = {rm: oscillation_profiles(
            fns, w, MOVariant.local(local_r), node_sets[rm][0],
            config.inner_rule()) for rm in rms}
        lattice_abs = np.abs(lattice.points)
        for si, (name, _) in enumerate(symbols):
            for p in config.p_values:
                sums = {rm: float(np.sum(lat_prof[si][lattice_abs <= rm] ** p))
                        for rm in rms}
                ints = {}
                for rm in rms:
                    _, wts, shell_idx = node_sets[rm]
                    ints[rm] = integral_from_profile(
                        node_prof[rm][si], p, wts, shell_idx, rm).value
                s_div = growth_divergent(sums[rms[0]], sums[rms[-1]])
                i_div = growth_divergent(ints[rms[0]], ints[rms[-1]])
                ratio = None
                if not (s_div or i_div) and ints[rms[-1]] > TINY:
                    ratio = sums[rms[-1]] / ints[rms[-1]]
                aim1_entries.append({
                    "weight": w.label(), "symbol": name, "p": p,
                    "lattice_sum": sums[rms[-1]], "integral": ints[rms[-1]],
                    "lattice_flag": _flag(s_div), "integral_flag": _flag(i_div),
                    "ratio": ratio})

    return LemmaSuiteReport(
        weight1=weight1_entries, lemma3=lemma3_entries, lemma5=lemma5_entries,
        aim1=aim1_entries, tightness=tightness, config=config.to_dict(),
        runtime=time.perf_counter() - t0)
