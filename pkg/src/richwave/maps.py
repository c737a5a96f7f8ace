"""Strictly increasing scalar maps with affine tails and guarded inversion."""

import numpy as np

MAX_INVERT_ITERS = 200


class InversionError(RuntimeError):
    """Inversion failed to meet its residual tolerance within the iteration cap.

    Usually means the stated derivative bounds are violated (the map is not
    actually monotone, or the target value sits in a jump).
    """


class MonotoneMap:
    """Strictly increasing map, exact affine outside ``[x_lo, x_hi]``.

    ``forward`` is a vectorized callable trusted on the core interval;
    outside it the map continues as ``F(edge) + slope * (x - edge)``.
    ``d_min``/``d_max`` bound the derivative on the core (0 < d_min <= d_max)
    and ``deriv``, when given, accelerates inversion with Newton steps.
    Instances are immutable; inversion solves ``|F(x) - y| <= tol``.
    """

    def __init__(self, forward, x_lo, x_hi, d_min, d_max,
                 left_slope=None, right_slope=None, deriv=None, tol=1e-12):
        if not (0.0 < d_min <= d_max):
            raise ValueError("need 0 < d_min <= d_max, got [%g, %g]" % (d_min, d_max))
        if not x_lo < x_hi:
            raise ValueError("core interval is empty")
        self._forward = forward
        self.x_lo = float(x_lo)
        self.x_hi = float(x_hi)
        self.d_min = float(d_min)
        self.d_max = float(d_max)
        self.left_slope = float(d_min if left_slope is None else left_slope)
        self.right_slope = float(d_min if right_slope is None else right_slope)
        if self.left_slope <= 0.0 or self.right_slope <= 0.0:
            raise ValueError("tail slopes must be positive")
        self._deriv = deriv
        self.tol = float(tol)
        self.f_lo = float(np.asarray(forward(np.array([self.x_lo])))[0])
        self.f_hi = float(np.asarray(forward(np.array([self.x_hi])))[0])
        if not self.f_lo < self.f_hi:
            raise ValueError("forward map is not increasing across the core")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        xv = np.atleast_1d(x).astype(float)
        out = np.empty_like(xv)
        left = xv < self.x_lo
        right = xv > self.x_hi
        inner = ~(left | right)
        if left.any():
            out[left] = self.f_lo + self.left_slope * (xv[left] - self.x_lo)
        if right.any():
            out[right] = self.f_hi + self.right_slope * (xv[right] - self.x_hi)
        if inner.any():
            out[inner] = np.asarray(self._forward(xv[inner]), dtype=float)
        return float(out[0]) if scalar else out

    def invert(self, y):
        """x with |F(x) - y| <= tol; exact affine formula outside the core."""
        y = np.asarray(y, dtype=float)
        scalar = y.ndim == 0
        yv = np.atleast_1d(y).astype(float)
        out = np.empty_like(yv)
        below = yv < self.f_lo
        above = yv > self.f_hi
        if below.any():
            out[below] = self.x_lo + (yv[below] - self.f_lo) / self.left_slope
        if above.any():
            out[above] = self.x_hi + (yv[above] - self.f_hi) / self.right_slope
        inner = ~(below | above)
        if inner.any():
            out[inner] = self._invert_core(yv[inner])
        return float(out[0]) if scalar else out

    def _invert_core(self, y):
        lo = np.full(y.shape, self.x_lo)
        hi = np.full(y.shape, self.x_hi)
        # Secant initial guess through the core endpoints.
        x = self.x_lo + (y - self.f_lo) * (self.x_hi - self.x_lo) / (self.f_hi - self.f_lo)
        x = np.clip(x, lo, hi)
        done = np.zeros(y.shape, dtype=bool)
        r = np.empty_like(y)
        # When the bracket has shrunk to machine width, a residual at the
        # forward map's own noise floor is accepted: the answer is as good
        # as the map can represent.  Genuinely unreachable targets (residual
        # far above noise) still fail below.
        eps = np.finfo(float).eps
        noise_tol = np.maximum(self.tol, 1024.0 * eps * (np.abs(y) + 1.0))
        for _ in range(MAX_INVERT_ITERS):
            act = ~done
            r[act] = np.asarray(self._forward(x[act]), dtype=float) - y[act]
            done |= np.abs(r) <= self.tol
            collapsed = (hi - lo) <= 4.0 * eps * np.maximum(1.0, np.abs(x))
            done |= collapsed & (np.abs(r) <= noise_tol)
            if done.all():
                return x
            act = ~done
            pos = act & (r > 0.0)
            neg = act & (r <= 0.0)
            hi[pos] = np.minimum(hi[pos], x[pos])
            lo[neg] = np.maximum(lo[neg], x[neg])
            if self._deriv is not None:
                d = np.asarray(self._deriv(x[act]), dtype=float)
                step = np.where(d > 0.0, r[act] / np.where(d > 0.0, d, 1.0), np.nan)
                cand = x[act] - step
                bad = ~np.isfinite(cand) | (cand <= lo[act]) | (cand >= hi[act])
                cand[bad] = 0.5 * (lo[act] + hi[act])[bad]
                x[act] = cand
            else:
                x[act] = 0.5 * (lo[act] + hi[act])
        raise InversionError(
            "inversion stalled: worst residual %.3e after %d iterations "
            "(tol %.1e); derivative bounds are suspect"
            % (float(np.max(np.abs(r[~done]))), MAX_INVERT_ITERS, self.tol)
        )
