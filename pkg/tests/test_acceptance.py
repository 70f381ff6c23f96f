"""Acceptance gate: ten numbered criteria, one test each.

Every test states its tolerance inline and prints the measured quantities, so
a verbose run reads as a pass/fail checklist.  Criterion 9's ratio-bracket
clause is checked exactly as stated; see the printed diagnostics when it
fails: the pinned lattice construction oversamples near the rim, which pushes
the global-to-local ratio of one radial symbol below the stated floor.  The
other three clauses of criterion 9 hold.
"""

import math

import numpy as np
import pytest

from bhl.geometry import generate_lattice, validate_lattice
from bhl.harness import ExperimentConfig, run_equivalence, run_lemma_suite
from bhl.kernels import kernel_norm_bracket, kernel_value, kernel_values, \
    standard_kernel
from bhl.operators import (OrthonormalBasis, bergman_project, commutator,
                           hankel, hankel_gram, mixed_orthonormal_basis,
                           operator_matrix, singular_values)
from bhl.oscillation import (MOVariant, mo_global, mo_global_deviation,
                             mo_global_pairs, mo_local, mo_local_pairs,
                             oscillation_integral)
from bhl.quadrature import disc_rule
from bhl.symbols import ZBAR, multiply, norm_sq
from bhl.weights import RadialWeight, classify
from conftest import disc_points

R_HALF = math.atanh(0.5)


def test_criterion_01_kernel_series_matches_closed_form():
    """Series kernel vs (1 - conj(z) zeta)^(-(eta+2)), eta in {0, 1}:
    relative error < 1e-8 over 1000 random pairs with |conj(z) zeta| <= 0.9."""
    rng = np.random.default_rng(101)
    worst = 0.0
    for eta in (0.0, 1.0):
        w = RadialWeight.standard(eta)
        z = 0.949 * np.sqrt(rng.random(3000)) * np.exp(2j * np.pi * rng.random(3000))
        zeta = 0.949 * np.sqrt(rng.random(3000)) * np.exp(2j * np.pi * rng.random(3000))
        x = np.conj(z) * zeta
        keep = np.abs(x) <= 0.9
        z, zeta, x = z[keep][:1000], zeta[keep][:1000], x[keep][:1000]
        assert len(x) == 1000
        series = kernel_values(w, x)
        closed = standard_kernel(eta + 2.0, z, zeta)
        rel = np.max(np.abs(series - closed) / np.abs(closed))
        worst = max(worst, float(rel))
        print(f"eta={eta:g}: max relative error {rel:.3e} over 1000 pairs")
    assert worst < 1e-8


def test_criterion_02_reproducing_property(st0, st1):
    """Quadrature route: <z^m, B_zeta> = zeta^m within 1e-8 for m <= 10,
    |zeta| <= 0.9, both test weights."""
    rule = disc_rule(96, 192)
    nodes, weights = rule.nodes(), rule.weights()
    pts = disc_points(5, r_max=0.9, seed=102)
    worst = 0.0
    for w in (st0, st1):
        dens = w.density(np.abs(nodes))
        for zeta in pts:
            zeta = complex(zeta)
            kvals = np.array([kernel_value(w, zeta, nd) for nd in nodes])
            for m in range(11):
                got = np.sum(nodes ** m * np.conj(kvals) * dens * weights)
                worst = max(worst, abs(got - zeta ** m))
    print(f"max |<z^m, B_zeta> - zeta^m| = {worst:.3e} "
          f"(2 weights x 5 points x m<=10)")
    assert worst < 1e-8


def test_criterion_03_hankel_singular_values_exact(st0):
    """f = zbar, N = 64: s_n = 1/sqrt((n+1)(n+2)) within 1e-10 and the
    squared Schatten-2 power sum telescopes to 1 - 1/65 within 1e-10."""
    s = singular_values(hankel_gram(ZBAR, st0, 64))
    n = np.arange(64, dtype=float)
    closed = 1.0 / np.sqrt((n + 1.0) * (n + 2.0))
    gap = float(np.max(np.abs(np.sort(s)[::-1] - closed)))
    power = float(np.sum(s ** 2))
    print(f"max |s_n - closed| = {gap:.3e}, "
          f"power sum = {power!r} vs {1.0 - 1.0 / 65.0!r}")
    assert gap < 1e-10
    assert abs(power - (1.0 - 1.0 / 65.0)) < 1e-10


def test_criterion_04_pythagoras_and_commutator(st0, st1, family):
    """||f e_n||^2 = ||P(f e_n)||^2 + ||H_f e_n||^2 for n <= 16 in moment
    arithmetic; [M_f, P] = H_f P - (H_fbar P)* entrywise within 1e-10, N=32."""
    for w in (st0, st1):
        basis = OrthonormalBasis(w, 17)
        for f in family:
            for n in range(17):
                g = basis.function(n)
                fg = multiply(f, g)
                total = norm_sq(fg, w)
                parts = norm_sq(bergman_project(fg, w), w) \
                    + norm_sq(hankel(f, g, w), w)
                assert parts == pytest.approx(total, rel=1e-12)
    print("pythagoras: 2 weights x 4 symbols x 17 basis functions, rel 1e-12")

    worst = 0.0
    for w in (st0, st1):
        basis = mixed_orthonormal_basis(w, 32)

        def hf_proj(symbol, w=w):
            def apply(u):
                return hankel(symbol, bergman_project(u, w), w)
            return apply

        for f in family:
            lhs = operator_matrix(lambda u, f=f, w=w: commutator(f, u, w),
                                  basis, w)
            m1 = operator_matrix(hf_proj(f), basis, w)
            m2 = operator_matrix(hf_proj(f.conjugate()), basis, w)
            worst = max(worst, float(np.max(np.abs(lhs - (m1 - m2.conj().T)))))
    print(f"commutator identity: max entrywise gap {worst:.3e} at N=32")
    assert worst < 1e-10


def test_criterion_05_projection_bound_sharp():
    """||H_f k|| <= MO(f)(z) (1 + 1e-4) on a 50-point grid, eta 4, both test
    weights and all four symbols; equality within 1e-6 at (zbar, 0, eta=0...)."""
    cfg = ExperimentConfig(weights=["standard:eta=0", "standard:eta=1"],
                           figures=False)
    report = run_lemma_suite(cfg)
    assert len(report.lemma3) == 8
    for entry in report.lemma3:
        assert len(entry["rows"]) == 50
        assert entry["max_ratio"] <= 1.0 + 1e-4, \
            (entry["weight"], entry["symbol"], entry["max_ratio"])
    tight = report.tightness
    print(f"max lemma3 ratio {report.max_ratios()['lemma3']!r}, "
          f"tightness ratio {tight['ratio']!r} at ({tight['symbol']}, z=0)")
    assert tight["ratio"] == pytest.approx(1.0, abs=1e-6)


def test_criterion_06_mo_representations_agree(st0, family):
    """Variance, deviation, and pairwise forms of the global MO agree within
    1e-6; disc-average and pairwise forms of the local MO agree within 1e-6;
    20 random points per pairing."""
    pts = disc_points(20, r_max=0.9, seed=106)
    worst_g = worst_l = 0.0
    for f in family:
        for z in pts:
            z = complex(z)
            a = mo_global(f, st0, 4.0, z)
            worst_g = max(worst_g,
                          abs(mo_global_deviation(f, st0, 4.0, z) - a),
                          abs(mo_global_pairs(f, st0, 4.0, z) - a))
            b = mo_local(f, st0, R_HALF, z)
            worst_l = max(worst_l, abs(mo_local_pairs(f, st0, R_HALF, z) - b))
    print(f"global representations: max gap {worst_g:.3e}; "
          f"local representations: max gap {worst_l:.3e}")
    assert worst_g < 1e-6
    assert worst_l < 1e-6


def test_criterion_07_closed_form_mo_values(st0):
    """MO_r(zbar)(0) = tanh(r)/sqrt(2) within 1e-8 for t in {.25, .5, .75};
    the invariant integral of MO^2 extrapolates to (t^2/2)/(1-t^2) within 2%."""
    rule = disc_rule(48, 64)
    for t in (0.25, 0.5, 0.75):
        r = math.atanh(t)
        got = mo_local(ZBAR, st0, r, 0.0)
        assert got == pytest.approx(t / math.sqrt(2.0), abs=1e-8)

        xs, vals = [], []
        for R in (0.98, 0.995):
            res = oscillation_integral(ZBAR, st0, MOVariant.local(r), 2.0, R,
                                       profile_rule=rule, inner_rule=rule)
            xs.append(1.0 - R * R)
            vals.append(res.value)
        # linear extrapolation in x = 1 - R^2 towards the full-disc value x=0
        extr = vals[1] + (vals[0] - vals[1]) * (0.0 - xs[1]) / (xs[0] - xs[1])
        target = (t * t / 2.0) / (1.0 - t * t)
        rel = (extr - target) / target
        print(f"t={t:g}: MO(0) ok, integral extrapolates to {extr!r} "
              f"vs {target!r} (rel {rel:+.2e})")
        assert abs(rel) < 0.02


def test_criterion_08_weight_classification(st0, st1, logpow):
    """standard(eta) regular for eta in {0, 0.5, 1, 2}; the standard(1)
    regularity ratio bracket sits inside [0.49, 0.68]; kernel-norm
    comparability brackets are finite for both test weights."""
    for eta in (0.0, 0.5, 1.0, 2.0):
        report = classify(RadialWeight.standard(eta))
        assert report.regular.holds, eta
    ratio = classify(st1).regular
    print(f"standard(1) regular ratio bracket "
          f"[{ratio.ratio_min!r}, {ratio.ratio_max!r}]")
    assert 0.49 <= ratio.ratio_min <= ratio.ratio_max <= 0.68
    for w in (st0, st1):
        bracket = kernel_norm_bracket(w, R_HALF)
        print(f"{w.label()}: kernel/disc/tail brackets {bracket.to_dict()}")
        assert bracket.finite


def test_criterion_09_equivalence_shadow(st0):
    """Default family sweep: the three divergence verdicts agree cellwise;
    (zbar, standard(0), p=2) Schatten-to-local-integral ratio in [3, 12];
    (zbar, p=1) divergent everywhere; convergent-cell ratios in [1e-2, 1e2]."""
    cfg = ExperimentConfig(workers=2, figures=False)
    report = run_equivalence(cfg)
    assert not report.partial, report.errors

    disagreeing = [(r.weight, r.symbol, r.p, r.flags)
                   for r in report.rows if not r.verdicts_agree]
    print(f"cells: {len(report.rows)}, disagreeing verdicts: {disagreeing}")
    assert not disagreeing

    zbar_p2 = [r for r in report.rows
               if r.symbol == "zbar" and r.weight == "standard:eta=0"
               and r.p == 2.0][0]
    integral = oscillation_integral(ZBAR, st0, MOVariant.local(R_HALF), 2.0,
                                    cfg.flags_r_max[-1],
                                    profile_rule=cfg.profile_rule(),
                                    inner_rule=cfg.inner_rule()).value
    ratio = zbar_p2.schatten_sum / integral
    print(f"(zbar, standard(0), p=2): schatten {zbar_p2.schatten_sum!r} / "
          f"local integral {integral!r} = {ratio!r}")
    assert 3.0 <= ratio <= 12.0

    p1 = [r for r in report.rows if r.symbol == "zbar" and r.p == 1.0]
    assert len(p1) == 3
    assert all(r.flags == ("divergent",) * 3 for r in p1)

    lo, hi = report.ratio_bracket()
    offenders = [(r.weight, r.symbol, r.p, name, val)
                 for r in report.rows
                 for name, val in (("ratio_gl", r.ratio_gl),
                                   ("ratio_gs", r.ratio_gs),
                                   ("ratio_ls", r.ratio_ls))
                 if val is not None and not 1e-2 <= val <= 1e2]
    print(f"convergent-cell ratio bracket [{lo!r}, {hi!r}]")
    for weight, symbol, p, name, val in offenders:
        print(f"  outside [1e-2, 1e2]: ({weight}, {symbol}, p={p:g}) "
              f"{name} = {val!r}")
    assert 1e-2 <= lo and hi <= 1e2, \
        f"ratio bracket [{lo}, {hi}] exceeds [1e-2, 1e2]"


def test_criterion_10_lattice_validation():
    """Ring lattices at R_max = 0.99 pass brute-force separation and covering
    for r in {0.25, 0.5, 1.0}, with covering multiplicity at most 64."""
    for r in (0.25, 0.5, 1.0):
        lattice = generate_lattice(r, 0.99)
        v = validate_lattice(lattice.points, r, 0.99)
        print(f"r={r:g}: {len(lattice)} points, separated={v.separated}, "
              f"covering={v.covering}, max overlap M(r)={v.max_overlap}")
        assert v.separated
        assert v.covering
        assert v.max_overlap <= 64
