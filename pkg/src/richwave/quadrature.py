"""Adaptive Simpson quadrature with pre-splitting at known kinks.

Every integral in the package funnels through :func:`integrate`.  Integrands
are piecewise smooth with kink locations known to the caller (profile
breakpoints and their coordinate images), so the interval is split there
first and each panel converges at Simpson's full order.
"""

import numpy as np

MAX_DEPTH = 40


class QuadratureError(RuntimeError):
    """Adaptive refinement hit the depth limit before reaching the tolerance.

    Carries the worst offending subinterval as ``interval = (lo, hi)``.
    """

    def __init__(self, message, interval=None):
        super().__init__(message)
        self.interval = interval


def _feval(f, x):
    out = np.asarray(f(x), dtype=float)
    if out.shape != x.shape:
        out = np.broadcast_to(out, x.shape)
    return out


def integrate(f, a, b, kinks=(), tol=1e-10):
    """Integral of ``f`` over ``[a, b]`` to absolute accuracy ``tol``.

    ``f`` is called with 1-D numpy arrays of points and must return values of
    the same shape (scalars broadcast).  ``kinks`` lists points where ``f``
    loses smoothness; those inside ``(a, b)`` become panel boundaries.
    ``a > b`` integrates with the usual sign flip.

    Raises :class:`QuadratureError` if any panel still fails its error budget
    after ``MAX_DEPTH`` bisection levels.
    """
    a = float(a)
    b = float(b)
    if a == b:
        return 0.0
    sign = 1.0
    if b < a:
        a, b = b, a
        sign = -1.0

    span = b - a
    edges = [a]
    for k in sorted({float(k) for k in kinks}):
        if a < k < b and k - edges[-1] > 1e-14 * span:
            edges.append(k)
    if b - edges[-1] <= 1e-14 * span and len(edges) > 1:
        edges.pop()
    edges.append(b)
    edges = np.asarray(edges)

    lo = edges[:-1].copy()
    hi = edges[1:].copy()
    mid = 0.5 * (lo + hi)
    flo = _feval(f, lo)
    fmid = _feval(f, mid)
    fhi = _feval(f, hi)
    simp = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi)
    budget = tol * (hi - lo) / span

    total = 0.0
    for depth in range(MAX_DEPTH + 1):
        m1 = 0.5 * (lo + mid)
        m2 = 0.5 * (mid + hi)
        fm1 = _feval(f, m1)
        fm2 = _feval(f, m2)
        left = (mid - lo) / 6.0 * (flo + 4.0 * fm1 + fmid)
        right = (hi - mid) / 6.0 * (fmid + 4.0 * fm2 + fhi)
        err = left + right - simp
        done = np.abs(err) <= 15.0 * budget
        # Richardson-corrected value on accepted panels.
        total += float(np.sum((left + right + err / 15.0)[done]))
        if done.all():
            return sign * total
        if depth == MAX_DEPTH:
            worst = int(np.argmax(np.where(done, -np.inf, np.abs(err))))
            raise QuadratureError(
                "adaptive Simpson: depth %d exceeded with panel error %.3e"
                % (MAX_DEPTH, abs(err[worst])),
                interval=(float(lo[worst]), float(hi[worst])),
            )
        keep = ~done
        lo, mid0, hi0 = lo[keep], mid[keep], hi[keep]
        flo, fmid0, fhi0 = flo[keep], fmid[keep], fhi[keep]
        lo = np.concatenate([lo, mid0])
        hi = np.concatenate([mid0, hi0])
        mid = np.concatenate([m1[keep], m2[keep]])
        flo = np.concatenate([flo, fmid0])
        fhi = np.concatenate([fmid0, fhi0])
        fmid = np.concatenate([fm1[keep], fm2[keep]])
        simp = np.concatenate([left[keep], right[keep]])
        budget = np.concatenate([budget[keep] / 2.0, budget[keep] / 2.0])
    raise AssertionError("unreachable")


def refine_sign_changes(f, edges, samples=9, iters=52):
    """Roots of ``f`` between consecutive ``edges``, located by bisection.

    Used to turn the sign changes of a difference of solutions into extra
    kinks so that ``integrate`` sees a smooth ``|f|`` on every panel.  Only
    sign changes visible at ``samples`` probe points per panel are found,
    which is all the piecewise-monotone integrands here need.  All detected
    brackets bisect together, one vectorized ``f`` call per iteration.
    """
    edges = np.asarray(edges, dtype=float)
    if len(edges) < 2:
        return []
    xs = np.concatenate(
        [np.linspace(edges[k], edges[k + 1], samples) for k in range(len(edges) - 1)]
    )
    vals = _feval(f, xs)
    # Drop bracket candidates that straddle a panel edge (duplicated points).
    sgn = np.sign(vals)
    flip = np.nonzero((sgn[:-1] * sgn[1:] < 0) & (np.diff(xs) > 0))[0]
    if flip.size == 0:
        return []
    lo = xs[flip].copy()
    hi = xs[flip + 1].copy()
    vlo = vals[flip].copy()
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        vm = _feval(f, mid)
        left = vlo * vm <= 0.0
        hi = np.where(left, mid, hi)
        vlo = np.where(left, vlo, vm)
        lo = np.where(left, lo, mid)
    return list(0.5 * (lo + hi))
