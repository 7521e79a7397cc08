"""Truncated bivariate Taylor-series (jet) arithmetic.

The moment engine differentiates a generating function to high order.  The
differentiation is carried out exactly (to rounding) by propagating truncated
Taylor coefficients through the algebraic operations that build the function,
rather than by symbolic algebra or finite differences.  The only nontrivial
operation needed is the reciprocal square root, which satisfies the linear
recurrence obtained from 2*Q*S' = -Q'*S for S = Q**-1/2.

Coefficient tables may carry trailing batch axes, so a whole parameter grid
can be pushed through the same recurrence at once; invalid batch lanes (a
nonpositive constant term) yield NaN coefficients instead of raising.
"""
from __future__ import annotations

from math import comb

import numpy as np
from scipy.signal import lfilter

from .errors import EvaluationError

__all__ = ["BivariateSeries"]


class BivariateSeries:
    """Coefficients c[i, j] of (x - x0)**i * (y - y0)**j up to fixed orders.

    The first two axes of ``coeffs`` index the powers of the two variables;
    any remaining axes are batch axes shared by all coefficients.
    """

    __slots__ = ("coeffs", "point")

    def __init__(self, coeffs, point=(0.0, 0.0)):
        arr = np.asarray(coeffs, dtype=float)
        if arr.ndim < 2:
            raise ValueError("coefficient table must be at least 2-D")
        self.coeffs = arr
        self.point = (float(point[0]), float(point[1]))

    @property
    def order1(self) -> int:
        return self.coeffs.shape[0] - 1

    @property
    def order2(self) -> int:
        return self.coeffs.shape[1] - 1

    @property
    def batch_shape(self) -> tuple:
        return self.coeffs.shape[2:]

    def __repr__(self):
        return (f"BivariateSeries(orders=({self.order1},{self.order2}), "
                f"point={self.point}, batch={self.batch_shape})")

    # -- basic ring operations ------------------------------------------

    def padded(self, order1: int, order2: int) -> "BivariateSeries":
        """Zero-extend the coefficient table to at least the given orders.

        Only meaningful when the stored coefficients describe an exact
        polynomial (the higher coefficients really are zero), as is the case
        for the quartic generating polynomial.
        """
        o1 = max(order1, self.order1)
        o2 = max(order2, self.order2)
        if (o1, o2) == (self.order1, self.order2):
            return self
        shape = (o1 + 1, o2 + 1) + self.batch_shape
        out = np.zeros(shape, dtype=float)
        out[: self.order1 + 1, : self.order2 + 1] = self.coeffs
        return BivariateSeries(out, self.point)

    def _check_point(self, other: "BivariateSeries"):
        if self.point != other.point:
            raise ValueError(
                f"expansion points differ: {self.point} vs {other.point}")

    def __add__(self, other):
        if isinstance(other, BivariateSeries):
            self._check_point(other)
            o1 = max(self.order1, other.order1)
            o2 = max(self.order2, other.order2)
            a = self.padded(o1, o2).coeffs
            b = other.padded(o1, o2).coeffs
            return BivariateSeries(a + b, self.point)
        out = self.coeffs.copy()
        out[0, 0] = out[0, 0] + other
        return BivariateSeries(out, self.point)

    __radd__ = __add__

    def __neg__(self):
        return BivariateSeries(-self.coeffs, self.point)

    def __sub__(self, other):
        if isinstance(other, BivariateSeries):
            return self.__add__(other.__neg__())
        return self.__add__(-other)

    def __rsub__(self, other):
        return self.__neg__().__add__(other)

    def __mul__(self, other):
        if not isinstance(other, BivariateSeries):
            return BivariateSeries(self.coeffs * other, self.point)
        self._check_point(other)
        o1 = max(self.order1, other.order1)
        o2 = max(self.order2, other.order2)
        a = self.padded(o1, o2)
        b = other.padded(o1, o2)
        # iterate over the sparser factor; each term is a shifted slice add
        if (a.order1 + 1) * (a.order2 + 1) > (b.order1 + 1) * (b.order2 + 1):
            a, b = b, a
        batch = np.broadcast_shapes(a.batch_shape, b.batch_shape)
        out = np.zeros((o1 + 1, o2 + 1) + batch, dtype=float)
        ac, bc = a.coeffs, b.coeffs
        for i in range(o1 + 1):
            for j in range(o2 + 1):
                cij = ac[i, j]
                if np.all(cij == 0.0):
                    continue
                out[i:, j:] += cij * bc[: o1 + 1 - i, : o2 + 1 - j]
        return BivariateSeries(out, self.point)

    __rmul__ = __mul__

    # -- analytic operations --------------------------------------------

    def rebased(self, x0: float, y0: float) -> "BivariateSeries":
        """Re-expand about a new point.

        Exact only when the coefficients describe an exact polynomial; used
        to move the generating quartic from the origin to the detection
        point before extracting photon-number statistics.
        """
        dx = x0 - self.point[0]
        dy = y0 - self.point[1]
        c = self.coeffs
        o1, o2 = self.order1, self.order2
        out = np.zeros_like(c)
        for a in range(o1 + 1):
            for b in range(o2 + 1):
                acc = 0.0
                for i in range(a, o1 + 1):
                    wi = comb(i, a) * dx ** (i - a)
                    for j in range(b, o2 + 1):
                        acc = acc + wi * comb(j, b) * dy ** (j - b) * c[i, j]
                out[a, b] = acc
        return BivariateSeries(out, (x0, y0))

    def eval(self, x, y):
        """Evaluate the truncated polynomial by Horner recursion."""
        dx = np.asarray(x, dtype=float) - self.point[0]
        dy = np.asarray(y, dtype=float) - self.point[1]
        c = self.coeffs
        res = 0.0
        for i in range(self.order1, -1, -1):
            row = 0.0
            for j in range(self.order2, -1, -1):
                row = row * dy + c[i, j]
            res = res * dx + row
        return res

    def rsqrt(self, order1: int | None = None,
              order2: int | None = None) -> "BivariateSeries":
        """Reciprocal square root S = self**(-1/2) as a truncated series.

        The target orders may exceed the polynomial degree of ``self`` (the
        higher coefficients are taken as zero).  For batched coefficients,
        lanes whose constant term is not positive come back as NaN.
        """
        o1 = self.order1 if order1 is None else int(order1)
        o2 = self.order2 if order2 is None else int(order2)
        q = self.coeffs
        dq1 = min(self.order1, o1)
        dq2 = min(self.order2, o2)
        batch = self.batch_shape
        scalar = (len(batch) == 0)

        q00 = q[0, 0]
        if scalar:
            if not np.isfinite(q00) or q00 <= 0.0:
                raise EvaluationError(
                    "generating polynomial is not positive at the expansion "
                    f"point (constant term {q00!r})")
            inv_q00 = 1.0 / q00
            s00 = 1.0 / np.sqrt(q00)
        else:
            valid = np.isfinite(q00) & (q00 > 0.0)
            with np.errstate(divide="ignore", invalid="ignore"):
                inv_q00 = np.where(valid, 1.0 / np.where(valid, q00, 1.0),
                                   np.nan)
                s00 = np.where(valid, 1.0 / np.sqrt(np.where(valid, q00, 1.0)),
                               np.nan)

        s = np.zeros((o1 + 1, o2 + 1) + batch, dtype=float)
        s[0, 0] = s00

        # first row: within-row recurrence with order-dependent weights
        for j in range(1, o2 + 1):
            acc = 0.0
            for b in range(1, min(j, dq2) + 1):
                acc = acc + (2 * j - b) * q[0, b] * s[0, j - b]
            s[0, j] = -acc * inv_q00 / (2 * j)

        # remaining rows: cross-row terms feed a constant-coefficient
        # within-row recurrence of depth dq2
        taps = [q[0, b] * inv_q00 for b in range(1, dq2 + 1)]
        for i in range(1, o1 + 1):
            base = np.zeros((o2 + 1,) + batch, dtype=float)
            for a in range(1, min(i, dq1) + 1):
                w = 2 * i - a
                for b in range(dq2 + 1):
                    qab = q[a, b]
                    if scalar and qab == 0.0:
                        continue
                    base[b:] += (w * qab) * s[i - a, : o2 + 1 - b]
            base *= -inv_q00 / (2 * i)
            if not taps:
                s[i] = base
            elif scalar:
                den = np.concatenate(([1.0], taps))
                s[i] = lfilter([1.0], den, base, axis=0)
            else:
                row = s[i]
                for j in range(o2 + 1):
                    acc = base[j]
                    for b, c in enumerate(taps, start=1):
                        if b > j:
                            break
                        acc = acc - c * row[j - b]
                    row[j] = acc
        return BivariateSeries(s, self.point)
