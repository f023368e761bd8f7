"""Independent reference computations shared by the unit and acceptance tests."""

import math

import numpy as np

from slopesearch import Material, SliceSet


def bisect_root(g, lo, hi, tol=1e-13, max_iter=400):
    """Plain bisection; ``g(lo)`` and ``g(hi)`` must differ in sign."""
    g_lo = g(lo)
    if g_lo * g(hi) > 0:
        raise ValueError("root not bracketed")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        g_mid = g(mid)
        if g_mid == 0 or hi - lo < tol * mid:
            return mid
        if (g_mid < 0) == (g_lo < 0):
            lo, g_lo = mid, g_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def rhs_direct(slices, F):
    """Right-hand side written slice by slice from the textbook form."""
    num = 0.0
    den = 0.0
    for b, a, w, c, tp in zip(slices.width, slices.alpha, slices.weight, slices.c, slices.tan_phi):
        m_alpha = math.cos(a) * (1.0 + math.tan(a) * tp / F)
        num += (c * b + w * tp) / m_alpha
        den += w * math.sin(a)
    return num / den


def pole(slices):
    """Largest trial factor at which some slice denominator vanishes (0 if none)."""
    worst = 0.0
    for a, tp in zip(slices.alpha, slices.tan_phi):
        if a < 0 and tp > 0:
            worst = max(worst, -math.sin(a) * tp / math.cos(a))
    return worst


def bisection_F(slices, lo=0.05, hi=50.0):
    """Root of ``F - rhs(F)``; the lower bracket moves above any pole."""
    lo = max(lo, pole(slices) * (1 + 1e-9) + 1e-12)
    return bisect_root(lambda F: F - rhs_direct(slices, F), lo, hi)


def random_slice_set(rng, phi_zero=False):
    """Random slices with a positive driving sum."""
    while True:
        n = int(rng.integers(3, 31))
        alpha = np.sort(rng.uniform(math.radians(-25), math.radians(65), n))
        weight = rng.uniform(5.0, 200.0, n)
        if np.sum(weight * np.sin(alpha)) > 0:
            break
    width = np.full(n, rng.uniform(0.2, 2.0))
    c = rng.uniform(0.0, 20.0)
    phi = 0.0 if phi_zero else rng.uniform(0.0, 40.0)
    if phi_zero and c == 0.0:
        c = 1.0
    mat = Material.from_degrees(c, phi, 18.0)
    return SliceSet(
        x_mid=np.arange(n, dtype=float),
        width=width,
        height=weight / (18.0 * width),
        alpha=alpha,
        weight=weight,
        c=np.full(n, mat.c),
        tan_phi=np.full(n, mat.tan_phi),
        materials=(mat,) * n,
    )


def dense_grid_minimum(slope, n_xin=30, n_xout=30, n_delta=60, n=25):
    """Exhaustive grid over the search box; ``delta`` spans each pair's own range."""
    from slopesearch import SlipParams, delta_min, evaluate_params
    from slopesearch.search import search_box
    from slopesearch.slip_geometry import DegenerateChordError

    (a, b), (c, d) = search_box(slope)
    best = math.inf
    for x_in in np.linspace(a, b, n_xin):
        for x_out in np.linspace(c, d, n_xout):
            try:
                d_min = delta_min(slope, x_in, x_out)
            except DegenerateChordError:
                continue
            if d_min >= math.pi / 2:
                continue
            for t in np.linspace(0.0, 1.0, n_delta):
                r = evaluate_params(slope, SlipParams(x_in, x_out, d_min + t * (math.pi / 2 - d_min)), n)
                if r.ok and r.F < best:
                    best = r.F
    return best
