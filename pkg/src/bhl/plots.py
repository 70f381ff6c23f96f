"""Figure rendering for reports.  All savers draw to files through the Agg
backend so they work headless; matplotlib is imported lazily so the numeric
paths never pay for it."""

from __future__ import annotations

import numpy as np


def _pyplot():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def save_classify_figure(weight, report, path) -> str:
    """Density and tail mass of a weight, annotated with its classes."""
    plt = _pyplot()
    r = np.linspace(0.0, 0.999, 600)
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.6), constrained_layout=True)
    ax1.plot(r, weight.density(r))
    ax1.set_xlabel("r")
    ax1.set_ylabel("omega(r)")
    ax1.set_title(weight.label())
    tail = weight.tail_mass(r)
    ax2.loglog(1.0 - r, tail)
    ax2.set_xlabel("1 - r")
    ax2.set_ylabel("tail mass")
    ax2.invert_xaxis()
    flags = ", ".join(k for k, v in (("upper-doubling", report.dhat.holds),
                                     ("reverse-doubling", report.dcheck.holds),
                                     ("two-sided", report.in_d),
                                     ("regular", report.regular.holds)) if v)
    ax2.set_title(f"classes: {flags or 'none'}")
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return str(path)


def save_schatten_figure(report, path) -> str:
    """Singular value decay on log-log axes with the fitted tail slope."""
    plt = _pyplot()
    s = np.asarray(report.singular_values)
    n = np.arange(1, len(s) + 1, dtype=float)
    fig, ax = plt.subplots(figsize=(5.5, 4), constrained_layout=True)
    pos = s > 0
    ax.loglog(n[pos], s[pos], ".", ms=4, label="singular values")
    slope = report.tail_slope
    if np.isfinite(slope) and np.any(pos):
        lo = max(1, 2 * int(np.sum(pos)) // 3)
        nn = n[pos][lo - 1:]
        anchor = s[pos][lo - 1]
        ax.loglog(nn, anchor * (nn / nn[0]) ** slope, "-",
                  label=f"tail slope {slope:.3f}")
    verdict = "divergent" if report.divergent else "convergent"
    ax.set_title(f"p = {report.p:g}, norm = {report.norm:.6g} ({verdict})")
    ax.set_xlabel("n")
    ax.set_ylabel("s_n")
    ax.legend()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return str(path)


def save_profile_figure(profile, path) -> str:
    """Scatter of an oscillation profile over the disc, colored by value."""
    plt = _pyplot()
    pts = np.asarray(profile.points)
    fig, ax = plt.subplots(figsize=(5.5, 5), constrained_layout=True)
    sc = ax.scatter(pts.real, pts.imag, c=np.asarray(profile.values),
                    s=8, cmap="viridis")
    fig.colorbar(sc, ax=ax, label="MO")
    th = np.linspace(0, 2 * np.pi, 200)
    ax.plot(np.cos(th), np.sin(th), "k-", lw=0.8)
    ax.set_aspect("equal")
    ax.set_title(f"{profile.symbol}, {profile.weight}, {profile.variant}")
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return str(path)


def save_lattice_figure(lattice, path) -> str:
    plt = _pyplot()
    pts = np.asarray(lattice.points)
    fig, ax = plt.subplots(figsize=(5.5, 5), constrained_layout=True)
    ax.plot(pts.real, pts.imag, ".", ms=2)
    th = np.linspace(0, 2 * np.pi, 200)
    ax.plot(np.cos(th), np.sin(th), "k-", lw=0.8)
    ax.set_aspect("equal")
    ax.set_title(f"r = {lattice.separation_r:g}, {len(lattice)} points")
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return str(path)


def save_equivalence_figure(report, path) -> str:
    """One panel per exponent p: the three comparable quantities per cell on a
    log scale, with divergent-flagged cells drawn hollow."""
    plt = _pyplot()
    p_values = sorted({row.p for row in report.rows})
    fig, axes = plt.subplots(len(p_values), 1,
                             figsize=(8, 2.8 * len(p_values)),
                             constrained_layout=True, squeeze=False)
    series = (("schatten_sum", "schatten_flag", "o", "Schatten sum"),
              ("mo_global", "mo_global_flag", "s", "global MO integral"),
              ("mo_local_sum", "mo_local_flag", "^", "local MO lattice sum"))
    for ax, p in zip(axes[:, 0], p_values):
        rows = [r for r in report.rows if r.p == p]
        labels = [f"{r.weight}\n{r.symbol}" for r in rows]
        x = np.arange(len(rows))
        for attr, flag_attr, marker, name in series:
            vals = np.array([getattr(r, attr) for r in rows], dtype=float)
            flagged = np.array([getattr(r, flag_attr) == "divergent"
                                for r in rows])
            ok = vals > 0
            ax.semilogy(x[ok & ~flagged], vals[ok & ~flagged], marker,
                        label=name, ms=6)
            if np.any(ok & flagged):
                ax.semilogy(x[ok & flagged], vals[ok & flagged], marker,
                            mfc="none", ms=6, color=ax.lines[-1].get_color()
                            if ax.lines else None)
        ax.set_xticks(x)
        ax.set_xticklabels(labels, fontsize=7)
        ax.set_title(f"p = {p:g} (hollow markers: flagged divergent)")
        ax.legend(fontsize=7)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return str(path)


def save_lemma_figure(suite, path) -> str:
    """Ratio summaries for the four inequality sections."""
    plt = _pyplot()
    fig, axes = plt.subplots(2, 2, figsize=(10, 7), constrained_layout=True)

    ax = axes[0, 0]
    for e in suite.weight1:
        ax.plot(e["radii"], e["ratio"],
                label=f"{e['weight']} c={e['c']:g}", lw=1)
    ax.set_xlabel("|z|")
    ax.set_ylabel("LHS / RHS")
    ax.set_title("kernel integral bound")
    ax.legend(fontsize=6)

    ax = axes[0, 1]
    names = [f"{e['weight']}\n{e['symbol']}" for e in suite.lemma3]
    vals = [e["max_ratio"] or 0.0 for e in suite.lemma3]
    ax.bar(range(len(vals)), vals)
    ax.axhline(1.0, color="k", lw=0.8, ls="--")
    ax.set_xticks(range(len(vals)))
    ax.set_xticklabels(names, fontsize=6)
    ax.set_title("Hankel vs oscillation, constant 1")

    ax = axes[1, 0]
    for e in suite.lemma5:
        zs = [abs(z) for (z, _, _, rr) in e["rows"] if rr is not None]
        rs = [rr for (_, _, _, rr) in e["rows"] if rr is not None]
        order = np.argsort(zs)
        ax.plot(np.asarray(zs)[order], np.asarray(rs)[order], ".-", lw=0.8,
                ms=3, label=f"{e['weight']} {e['symbol']}")
    ax.set_xlabel("|z|")
    ax.set_ylabel("LHS / RHS")
    ax.set_title("reverse kernel double integral (fixed-r constant)")
    ax.legend(fontsize=5)

    ax = axes[1, 1]
    cells = [e for e in suite.aim1 if e["ratio"] is not None]
    names = [f"{e['weight']}\n{e['symbol']} p={e['p']:g}" for e in cells]
    ax.bar(range(len(cells)), [e["ratio"] for e in cells])
    ax.set_xticks(range(len(cells)))
    ax.set_xticklabels(names, fontsize=5)
    ax.set_title("lattice sum / invariant integral")

    fig.savefig(path, dpi=150)
    plt.close(fig)
    return str(path)
