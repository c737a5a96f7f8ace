"""Shared test fixtures and independent oracles.

The oracles here deliberately avoid the package's fast paths: the crossing
oracle integrates the boundary characteristics as Eulerian ODEs with RK4,
and the Riemann-sum oracle is brute-force midpoint summation.
"""

import numpy as np

from richwave import Family, PiecewiseProfile, RichSystem


def bi_tworamp_profile():
    """Equal-tails two-bump Born-Infeld data with a wide small-gap interior."""
    x = [-1.0, -0.7, -0.35, 0.45, 0.7, 1.0]
    mu = [1.0, 0.3, 0.14, 0.1, 0.75, 1.0]
    lam = [-1.0, -1.0, -0.02, -0.04, -0.45, -1.0]
    return PiecewiseProfile(x, np.column_stack([mu, lam]))


def bi_simple_wave_profile():
    x = [-1.0, -0.5, 0.0, 0.5, 1.0]
    mu = [1.0, 1.0, 1.5, 1.0, 1.0]
    lam = [-1.0] * 5
    return PiecewiseProfile(x, np.column_stack([mu, lam]))


def bi_mixing_ramps_profile():
    """Unequal-tails data: both invariants step between distinct side states."""
    x = [-1.0, -0.4, 0.2, 1.0]
    mu = [1.2, 1.2, 1.0, 1.0]
    lam = [-1.2, -0.8, -0.8, -0.8]
    return PiecewiseProfile(x, np.column_stack([mu, lam]))


def abi_middle_profile():
    x = [-1.0, -0.5, 0.0, 0.5, 1.0]
    vals = np.array(
        [
            [1.0, 0.0, -1.0],
            [1.0, 0.0, -1.0],
            [1.3, 0.5, -0.7],
            [1.0, 0.0, -1.0],
            [1.0, 0.0, -1.0],
        ]
    )
    return PiecewiseProfile(x, vals)


def three_speed_system():
    """Rich system with speeds (-1, 0.5, 2): affine 1/N and M/N.

    With 1/N = b0 + b.w and M/N = g0 + g.w, linear degeneracy of every
    family forces g_i = -speed_i * b_i; any such pair gives a valid catalog
    entry.  Unlike the Born-Infeld models, the middle family here has a
    nonzero speed with a strictly faster family above it.
    """
    speeds = np.array([-1.0, 0.5, 2.0])
    b0 = 1.0
    b = np.array([0.10, 0.15, -0.08])
    g0 = 0.3
    g = -speeds * b

    def inv_density(w):
        return b0 + np.sum(w * b, axis=-1)

    def density(w):
        return 1.0 / inv_density(w)

    def flux(w):
        return (g0 + np.sum(w * g, axis=-1)) * density(w)

    def admissible(w):
        return inv_density(w) > 0.05

    return RichSystem(
        "three-speed-demo",
        (Family(-1.0, (0,)), Family(0.5, (1,)), Family(2.0, (2,))),
        density,
        flux,
        admissible,
        admissibility_note="1/N > 0.05",
    )


def bi_with_passenger(a=1.0):
    """Born-Infeld with a multiplicity-2 slow family: w = (mu, p, lam).

    The passenger p is carried by the slow family alongside mu; the
    eigenvalues stay the Born-Infeld ones (lam and mu), so the system keeps
    constant multiplicity (2, 1) and the closed-form coordinate map.
    """
    from richwave import BIStructure

    def density(w):
        return 2.0 * a / (w[..., 0] - w[..., 2])

    def flux(w):
        return a * (w[..., 0] + w[..., 2]) / (w[..., 0] - w[..., 2])

    def admissible(w):
        return w[..., 0] > w[..., 2]

    return RichSystem(
        "bi-with-passenger(a=%g)" % a,
        (Family(-a, (0, 1)), Family(+a, (2,))),
        density,
        flux,
        admissible,
        admissibility_note="mu > lam",
        bi_structure=BIStructure(a=a, mu=0, lam=2),
    )


def bi_passenger_profile():
    x = [-1.0, -0.5, 0.0, 0.5, 1.0]
    vals = np.array(
        [
            [1.1, 0.0, -1.0],
            [1.1, 0.4, -1.0],
            [1.4, 0.4, -0.8],
            [1.1, 0.0, -0.8],
            [1.1, 0.0, -0.8],
        ]
    )
    return PiecewiseProfile(x, vals)


def separable_two_speed_system():
    """Rich system with nonlinear separable reciprocal density.

    1/N = g1(w1) + g2(w2) with quadratic g_i bounded below by 0.2, and
    M/N = -sum speed_i G_i(w_i) with G_i the primitives: every such pair is
    linearly degenerate and rich by construction, and admissibility holds on
    the whole state space, so large-amplitude data can defeat the shape
    map's derivative floor without tripping the solver's admissibility
    checks.
    """
    speeds = (-1.0, 1.0)

    def g1(v):
        return 0.2 + 0.5 * v * v

    def g2(v):
        return 0.2 + 0.1 * v * v

    def big_g1(v):
        return 0.2 * v + 0.5 * v**3 / 3.0

    def big_g2(v):
        return 0.2 * v + 0.1 * v**3 / 3.0

    def inv_density(w):
        return g1(w[..., 0]) + g2(w[..., 1])

    def density(w):
        return 1.0 / inv_density(w)

    def flux(w):
        u = -speeds[0] * big_g1(w[..., 0]) - speeds[1] * big_g2(w[..., 1])
        return u * density(w)

    def admissible(w):
        return np.full(np.asarray(w).shape[:-1], True)

    return RichSystem(
        "separable-two-speed",
        (Family(speeds[0], (0,)), Family(speeds[1], (1,))),
        density,
        flux,
        admissible,
        admissibility_note="none (globally admissible)",
    )


def bump_profile_2(amp0, amp1):
    x = [-1.0, -0.5, 0.0, 0.5, 1.0]
    vals = np.array(
        [
            [0.0, 0.0],
            [amp0, 0.0],
            [0.0, amp1],
            [0.0, 0.0],
            [0.0, 0.0],
        ]
    )
    return PiecewiseProfile(x, vals)


def three_speed_profile():
    x = [-1.0, -0.5, 0.0, 0.5, 1.0]
    vals = np.array(
        [
            [0.0, 0.0, 0.0],
            [0.4, 0.0, -0.3],
            [0.0, 0.5, 0.2],
            [-0.3, 0.0, 0.0],
            [0.0, 0.0, 0.0],
        ]
    )
    return PiecewiseProfile(x, vals)


def random_bi_states(rng, count, a=1.0):
    mu = rng.uniform(-3.0, 3.0, size=count)
    gap = rng.uniform(0.1, 5.0, size=count)
    return np.column_stack([mu, mu - gap])


def random_abi_states(rng, count, a=1.0):
    mu = rng.uniform(-3.0, 3.0, size=count)
    gap = rng.uniform(0.1, 5.0, size=count)
    q = rng.uniform(-2.0, 2.0, size=count)
    return np.column_stack([mu, q, mu - gap])


def riemann_l1(f, lo, hi, n=1_000_000):
    """Midpoint-rule L1 mass of f on [lo, hi]: the brute-force norm oracle."""
    xs = lo + (np.arange(n) + 0.5) * (hi - lo) / n
    return float(np.sum(np.abs(f(xs))) * (hi - lo) / n)


def rk4_crossing_time(sol, p, q, dt=0.02, max_steps=500_000):
    """Crossing time of family p's right and family q's left boundary curves.

    Integrates dX/dt = lambda(w(t, X)) for both characteristics with fixed-step
    RK4 (solution values from the engine, nothing from the closed-form
    crossing formula), then refines the bracketed crossing with a secant
    iteration on re-integration from the last pre-crossing state.
    """
    sysm = sol.system
    L = sol.initial.half_width
    cp = sysm.families[p].components[0]
    cq = sysm.families[q].components[0]

    def rhs(t, xs):
        w = sol.evaluate(t, np.asarray(xs))
        return np.array(
            [float(sysm.eigenvalue(cp, w[0])), float(sysm.eigenvalue(cq, w[1]))]
        )

    def rk4(t, xs, h, substeps=1):
        h = h / substeps
        for _ in range(substeps):
            k1 = rhs(t, xs)
            k2 = rhs(t + 0.5 * h, xs + 0.5 * h * k1)
            k3 = rhs(t + 0.5 * h, xs + 0.5 * h * k2)
            k4 = rhs(t + h, xs + h * k3)
            xs = xs + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            t += h
        return xs

    t = 0.0
    xs = np.array([L, -L])  # (X_p^+, X_q^-)
    gap = 2.0 * L
    for _ in range(max_steps):
        t0, xs0 = t, xs
        xs = rk4(t, xs, dt)
        t += dt
        gap = xs[0] - xs[1]
        if gap <= 0.0:
            break
    else:
        raise AssertionError("boundary curves never crossed")

    def gap_at(tau):
        ys = rk4(t0, xs0, tau - t0, substeps=8)
        return ys[0] - ys[1]

    lo_t, hi_t = t0, t
    g_lo = xs0[0] - xs0[1]
    g_hi = gap
    for _ in range(80):
        tau = hi_t - g_hi * (hi_t - lo_t) / (g_hi - g_lo)
        tau = min(max(tau, lo_t), hi_t)
        g = gap_at(tau)
        if abs(g) < 1e-13:
            return tau
        if g > 0.0:
            lo_t, g_lo = tau, g
        else:
            hi_t, g_hi = tau, g
        if hi_t - lo_t < 1e-13 * max(1.0, hi_t):
            break
    return 0.5 * (lo_t + hi_t)
