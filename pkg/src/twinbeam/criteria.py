"""Non-classicality criteria built from moments and photon-number counts.

Six families are implemented.  The E and M families probe inter-mode
correlations: E combines three moments of total order k1 + k2 + 2 into a
discriminant whose negativity certifies a non-classical field, and M is the
corresponding second-order determinant.  The R family probes a single mode
through ratios of neighbouring moments.  Each family exists in two variants:
W uses normally ordered intensity moments, p uses factorial-scaled photon
number probabilities, which stay finite for strong fields and are directly
accessible from photocounting records.

A criterion certifies non-classicality only when its value is negative
beyond a relative tolerance tied to the size of its constituent terms, so
rounding noise around zero never produces a verdict.

Closed forms for the noiseless twin beam and for its balanced and
unbalanced beam-splitter outputs are provided for cross-checking, together
with the noise boundaries of the single-mode R criterion at indices (2, 2)
and the twin-beam entanglement thresholds.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import OrderLimitError, ParameterError
from .moments import (DEFAULT_MAX_ORDER, _marginal_q_series, _SIGNS, _fact,
                      modified_pnd_table, moment_table)
from .states import TwoModeGaussianState

__all__ = [
    "FAMILIES",
    "CriterionId",
    "CriterionResult",
    "eval_E_W",
    "eval_E_p",
    "eval_M_W",
    "eval_M_p",
    "eval_R_W",
    "eval_R_p",
    "evaluate",
    "default_catalog",
    "closed_form_noiseless",
    "closed_form_bs_output",
    "boundary_R22p",
    "boundary_noise_balanced_R22p",
    "entanglement_boundary_twin_beam",
]

FAMILIES = ("E_W", "E_p", "M_W", "M_p", "R_W", "R_p")

RELATIVE_TOL = 1e-12

_SQRT33 = math.sqrt(33.0)


@dataclass(frozen=True)
class CriterionId:
    """Identifier of one criterion: family, indices, and for the single-mode
    R family which mode is probed.  For R the indices are (k, l) with
    l >= 1."""

    family: str
    k1: int = 0
    k2: int = 0
    mode: int = 1

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ParameterError(
                f"unknown criterion family {self.family!r}; "
                f"expected one of {', '.join(FAMILIES)}")
        for name in ("k1", "k2"):
            value = getattr(self, name)
            iv = int(value)
            if iv != value or iv < 0:
                raise ParameterError(
                    f"{name} must be a non-negative integer, got {value!r}")
            object.__setattr__(self, name, iv)
        mode = int(self.mode)
        if mode not in (1, 2):
            raise ParameterError(f"mode must be 1 or 2, got {self.mode!r}")
        object.__setattr__(self, "mode", mode)
        if self.family in ("R_W", "R_p") and self.k2 < 1:
            raise ParameterError(
                "the R family needs l >= 1 in its index pair (k, l)")

    def label(self) -> str:
        if self.family in ("M_W", "M_p"):
            return self.family
        if self.family in ("R_W", "R_p"):
            return f"{self.family}:{self.k1}:{self.k2}:{self.mode}"
        return f"{self.family}:{self.k1}:{self.k2}"

    def __str__(self) -> str:
        return self.label()

    @classmethod
    def parse(cls, text: str) -> "CriterionId":
        parts = text.strip().split(":")
        family = parts[0]
        if family not in FAMILIES:
            raise ParameterError(
                f"unknown criterion family {family!r} in {text!r}")
        try:
            numbers = [int(p) for p in parts[1:]]
        except ValueError:
            raise ParameterError(
                f"criterion indices in {text!r} must be integers") from None
        if family in ("M_W", "M_p"):
            if numbers:
                raise ParameterError(
                    f"the M families take no indices, got {text!r}")
            return cls(family)
        if family in ("R_W", "R_p"):
            if len(numbers) == 2:
                k, l = numbers
                return cls(family, k, l)
            if len(numbers) == 3:
                k, l, mode = numbers
                return cls(family, k, l, mode)
            raise ParameterError(
                f"the R families need k:l or k:l:mode, got {text!r}")
        if len(numbers) != 2:
            raise ParameterError(
                f"the E families need exactly k1:k2, got {text!r}")
        return cls(family, numbers[0], numbers[1])


@dataclass(frozen=True)
class CriterionResult:
    """Evaluated criterion: signed value, the verdict, the tolerance that
    guarded it, and the largest derivative order that entered."""

    id: CriterionId
    value: float
    nonclassical: bool
    tol: float
    max_order_used: int


def _finish(cid: CriterionId, value: float, scale: float,
            order: int) -> CriterionResult:
    tol = RELATIVE_TOL * scale
    return CriterionResult(id=cid, value=float(value),
                           nonclassical=bool(value < -tol),
                           tol=float(tol), max_order_used=int(order))


def _gate(order: int, max_order: int | None):
    limit = DEFAULT_MAX_ORDER if max_order is None else int(max_order)
    if order > limit:
        raise OrderLimitError(
            f"criterion needs derivative order {order}, above the configured "
            f"maximum {limit}")
    return limit


def _e_value(table: np.ndarray, k1: int, k2: int):
    a = table[k1 + 2, k2]
    b = table[k1, k2 + 2]
    c = table[k1 + 1, k2 + 1]
    value = a + b - 2.0 * c
    scale = max(abs(a), abs(b), 2.0 * abs(c))
    return value, scale


def eval_E_W(state: TwoModeGaussianState, k1: int, k2: int,
             *, max_order: int | None = None) -> CriterionResult:
    """Inter-mode moment criterion on <W1**i W2**j> at indices (k1, k2)."""
    cid = CriterionId("E_W", k1, k2)
    _gate(cid.k1 + cid.k2 + 2, max_order)
    table = moment_table(state, cid.k1 + 2, cid.k2 + 2,
                         max_order=cid.k1 + cid.k2 + 4)
    value, scale = _e_value(table, cid.k1, cid.k2)
    return _finish(cid, value, scale, cid.k1 + cid.k2 + 2)


def eval_E_p(state: TwoModeGaussianState, k1: int, k2: int,
             *, max_order: int | None = None) -> CriterionResult:
    """Inter-mode criterion on factorial-scaled photon-number counts."""
    cid = CriterionId("E_p", k1, k2)
    _gate(cid.k1 + cid.k2 + 2, max_order)
    table = modified_pnd_table(state, cid.k1 + 2, cid.k2 + 2)
    value, scale = _e_value(table, cid.k1, cid.k2)
    return _finish(cid, value, scale, cid.k1 + cid.k2 + 2)


def eval_M_W(state: TwoModeGaussianState,
             *, max_order: int | None = None) -> CriterionResult:
    cid = CriterionId("M_W")
    _gate(2, max_order)
    table = moment_table(state, 2, 2, max_order=4)
    a, b, c = table[2, 0], table[0, 2], table[1, 1]
    value = a * b - c * c
    scale = max(abs(a * b), c * c)
    return _finish(cid, value, scale, 2)


def eval_M_p(state: TwoModeGaussianState,
             *, max_order: int | None = None) -> CriterionResult:
    cid = CriterionId("M_p")
    _gate(2, max_order)
    table = modified_pnd_table(state, 2, 2)
    a, b, c = table[2, 0], table[0, 2], table[1, 1]
    value = a * b - c * c
    scale = max(abs(a * b), c * c)
    return _finish(cid, value, scale, 2)


def _marginal_moments(state: TwoModeGaussianState, mode: int,
                      order: int) -> np.ndarray:
    series = _marginal_q_series(state, mode, about_one=False, order=order)
    signs = _SIGNS[np.arange(order + 1) % 2]
    facts = np.array([_fact(n) for n in range(order + 1)])
    return signs * facts * series.coeffs[:, 0]


def _marginal_modified(state: TwoModeGaussianState, mode: int,
                       order: int) -> np.ndarray:
    series = _marginal_q_series(state, mode, about_one=True, order=order)
    signs = _SIGNS[np.arange(order + 1) % 2]
    facts = np.array([_fact(n) for n in range(order + 1)])
    p = signs * series.coeffs[:, 0]
    return facts * (p / p[0])


def _r_value(m: np.ndarray, k: int, l: int):
    a = m[k + 1] * m[l - 1]
    b = m[k] * m[l]
    return a - b, max(abs(a), abs(b))


def eval_R_W(state: TwoModeGaussianState, mode: int, k: int, l: int,
             *, max_order: int | None = None) -> CriterionResult:
    """Single-mode moment-ratio criterion on mode 1 or 2 at indices (k, l)."""
    cid = CriterionId("R_W", k, l, mode)
    depth = max(cid.k1 + 1, cid.k2)
    _gate(depth, max_order)
    m = _marginal_moments(state, cid.mode, depth)
    value, scale = _r_value(m, cid.k1, cid.k2)
    return _finish(cid, value, scale, depth)


def eval_R_p(state: TwoModeGaussianState, mode: int, k: int, l: int,
             *, max_order: int | None = None) -> CriterionResult:
    """Single-mode ratio criterion on factorial-scaled marginal counts."""
    cid = CriterionId("R_p", k, l, mode)
    depth = max(cid.k1 + 1, cid.k2)
    _gate(depth, max_order)
    m = _marginal_modified(state, cid.mode, depth)
    value, scale = _r_value(m, cid.k1, cid.k2)
    return _finish(cid, value, scale, depth)


def evaluate(state: TwoModeGaussianState, cid: CriterionId,
             *, max_order: int | None = None) -> CriterionResult:
    """Evaluate any criterion by its identifier."""
    if not isinstance(cid, CriterionId):
        cid = CriterionId.parse(str(cid))
    if cid.family == "E_W":
        return eval_E_W(state, cid.k1, cid.k2, max_order=max_order)
    if cid.family == "E_p":
        return eval_E_p(state, cid.k1, cid.k2, max_order=max_order)
    if cid.family == "M_W":
        return eval_M_W(state, max_order=max_order)
    if cid.family == "M_p":
        return eval_M_p(state, max_order=max_order)
    if cid.family == "R_W":
        return eval_R_W(state, cid.mode, cid.k1, cid.k2, max_order=max_order)
    return eval_R_p(state, cid.mode, cid.k1, cid.k2, max_order=max_order)


def default_catalog() -> tuple:
    """The studied criterion set: E over all index pairs up to (2,2), the
    moment-matrix determinants, and the ratio family on both marginals at
    (2,2), (4,4) and (6,6)."""
    ids = []
    for family in ("E_W", "E_p"):
        for k1 in (0, 1, 2):
            for k2 in (0, 1, 2):
                ids.append(CriterionId(family, k1, k2))
    ids.append(CriterionId("M_W"))
    ids.append(CriterionId("M_p"))
    for family in ("R_W", "R_p"):
        for k in (2, 4, 6):
            for mode in (1, 2):
                ids.append(CriterionId(family, k, k, mode))
    return tuple(ids)


# -- closed forms for the noiseless twin beam -------------------------------

def _check_bp(bp: float) -> float:
    bp = float(bp)
    if not np.isfinite(bp) or bp < 0.0:
        raise ParameterError(f"bp must be non-negative and finite, got {bp}")
    return bp


def closed_form_noiseless(cid: CriterionId, bp: float) -> float:
    """Reference value of a criterion on the noiseless twin beam.

    Covers the E and M families at the index pairs with compact closed
    forms; other identifiers raise ParameterError.
    """
    b = _check_bp(bp)
    if not isinstance(cid, CriterionId):
        cid = CriterionId.parse(str(cid))
    key = (min(cid.k1, cid.k2), max(cid.k1, cid.k2))
    r = b / (b + 1.0)
    if cid.family == "E_W":
        forms = {
            (0, 0): -2.0 * b,
            (0, 1): -4.0 * b * b,
            (0, 2): -12.0 * b ** 3 + 4.0 * b * b,
            (1, 1): -12.0 * b ** 3 - 8.0 * b * b,
            (2, 2): -240.0 * b ** 5 - 288.0 * b ** 4 - 72.0 * b ** 3,
        }
        if key in forms:
            return forms[key]
    elif cid.family == "E_p":
        forms = {
            (0, 0): -2.0 * r,
            (0, 1): 0.0,
            (0, 2): 4.0 * r * r,
            (1, 1): -8.0 * r * r,
            (2, 2): -72.0 * r ** 3,
        }
        if key in forms:
            return forms[key]
    elif cid.family == "M_W":
        return -4.0 * b ** 3 - b * b
    elif cid.family == "M_p":
        return -r * r
    raise ParameterError(
        f"no closed form is available for {cid.label()} on the noiseless "
        "twin beam")


def closed_form_bs_output(cid: CriterionId, bp: float, t: float) -> float:
    """Reference value of a photon-number criterion after the two modes of a
    noiseless twin beam interfere on a beam splitter of transmissivity t.

    The dependence on the splitting enters only through w = t (1 - t).
    """
    b = _check_bp(bp)
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise ParameterError(f"transmissivity must lie in [0, 1], got {t}")
    if not isinstance(cid, CriterionId):
        cid = CriterionId.parse(str(cid))
    w = t * (1.0 - t)
    r = b / (b + 1.0)
    if cid.family == "M_p":
        return -(1.0 - 8.0 * w) * r * r
    if cid.family != "E_p":
        raise ParameterError(
            f"no beam-splitter closed form is available for {cid.label()}")
    key = (min(cid.k1, cid.k2), max(cid.k1, cid.k2))
    forms = {
        (0, 0): -(1.0 - 8.0 * w) * 2.0 * r,
        (1, 1): -(72.0 * w * w - 21.0 * w + 1.0) * 8.0 * r * r,
        (2, 2): -(-800.0 * w ** 3 + 340.0 * w * w - 40.0 * w + 1.0)
                * 72.0 * r ** 3,
        (0, 2): (144.0 * w * w - 30.0 * w + 1.0) * 4.0 * r * r,
    }
    if key not in forms:
        raise ParameterError(
            f"no beam-splitter closed form is available for {cid.label()}")
    return forms[key]


# -- boundaries -------------------------------------------------------------

def boundary_R22p(t: float) -> float | None:
    """Pair mean at which the single-mode ratio criterion at indices (2, 2)
    changes sign on the beam-splitter output of a noiseless twin beam.

    Returns None when no finite boundary exists; at t = 1/2 the criterion
    stays negative for every pair mean, so the non-classical region is
    unbounded there.
    """
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise ParameterError(f"transmissivity must lie in [0, 1], got {t}")
    w = t * (1.0 - t)
    denom = (2.0 * t - 1.0) ** 2
    if denom < 1e-30:
        return None
    rad = 4.0 * w * (4.0 * w - (7.0 - _SQRT33)) + 1.0
    if rad < 0.0:
        return None
    return (4.0 * w - 1.0 + math.sqrt(rad)) / (2.0 * denom)


def boundary_noise_balanced_R22p(bp: float, t: float) -> float:
    """Balanced noise mean per mode at which the single-mode ratio criterion
    at indices (2, 2) on the beam-splitter output loses its negativity.

    A non-positive return means the criterion is already non-negative
    without added noise.
    """
    b = _check_bp(bp)
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise ParameterError(f"transmissivity must lie in [0, 1], got {t}")
    w = t * (1.0 - t)
    s = b * (b + 1.0)
    inner = 16.0 * w * s + 4.0 * math.sqrt((_SQRT33 - 5.0) * w * s) + 1.0
    return 0.5 * (math.sqrt(inner) - 2.0 * b - 1.0)


def entanglement_boundary_twin_beam(bp: float, balanced: bool) -> float:
    """Noise mean at which a noisy twin beam stops being entangled.

    For balanced noise (equal means in both modes) the threshold is
    sqrt(bp (bp + 1)) - bp per mode.  With noise in one mode only, the
    threshold is 1 independently of the pair mean.  A beam with no pairs is
    never entangled, so bp = 0 returns 0.
    """
    b = _check_bp(bp)
    if b == 0.0:
        return 0.0
    if balanced:
        return math.sqrt(b * (b + 1.0)) - b
    return 1.0
