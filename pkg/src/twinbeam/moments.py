"""Intensity moments and photon-number statistics of two-mode Gaussian states.

Everything measurable here descends from one object: the generating function
of the state's photocount statistics, which for a two-mode Gaussian state is
the inverse square root of a polynomial Q(l1, l2) that is quadratic in each
auxiliary variable.  Expanding Q**(-1/2) about the origin yields normally
ordered intensity moments; expanding about (1, 1) yields the joint photon
number distribution.  The expansion itself lives in the series module; this
module builds Q from the state parameters and packages the coefficients as
moments, probabilities, and their factorial-scaled variants.

Marginal quantities use the exact single-mode reduction of Q rather than
summing the joint distribution, so marginal tails can be bounded without
ever forming a large two-dimensional table.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EvaluationError, OrderLimitError, ParameterError, TruncationError
from .series import BivariateSeries
from .states import TwinBeamParams, TwoModeGaussianState

__all__ = [
    "DEFAULT_MAX_ORDER",
    "KMatrix",
    "PhotonNumberDistribution",
    "build_k_matrix",
    "q_polynomial",
    "intensity_moment",
    "moment_table",
    "pnd_element",
    "pnd_table",
    "modified_pnd_element",
    "modified_pnd_table",
    "marginal_pnd",
    "marginal_modified_pnd",
    "photon_number_distribution",
    "twin_beam_pnd_closed_form",
]

DEFAULT_MAX_ORDER = 12

_SIGNS = np.array([1.0, -1.0])


def _fact(n: int) -> float:
    try:
        return float(math.factorial(n))
    except OverflowError:
        return math.inf


def _sign_grid(o1: int, o2: int) -> np.ndarray:
    s1 = _SIGNS[np.arange(o1 + 1) % 2]
    s2 = _SIGNS[np.arange(o2 + 1) % 2]
    return np.outer(s1, s2)


def _fact_grid(o1: int, o2: int) -> np.ndarray:
    f1 = np.array([_fact(i) for i in range(o1 + 1)])
    f2 = np.array([_fact(j) for j in range(o2 + 1)])
    return np.outer(f1, f2)


# -- the Q polynomial ------------------------------------------------------

def _k_entries(b1, b2, c1, c2, d12, dbar12):
    """Coefficients of Q(l1, l2) from raw state parameters (array friendly).

    Returns (k12, k13, k14, k22, k24, k33, k34, k44); the constant term is 1
    and the remaining entries of the symmetric layout vanish.
    """
    b1 = np.asarray(b1, dtype=float)
    b2 = np.asarray(b2, dtype=float)
    c1 = np.asarray(c1, dtype=complex)
    c2 = np.asarray(c2, dtype=complex)
    d = np.asarray(d12, dtype=complex)
    e = np.asarray(dbar12, dtype=complex)

    ad2 = np.abs(d) ** 2
    ae2 = np.abs(e) ** 2
    ac1 = np.abs(c1) ** 2
    ac2 = np.abs(c2) ** 2
    cross = ad2 + ae2
    # mixed third- and fourth-order invariants
    g1 = np.real(c1 * e * np.conj(d))
    g2 = np.real(c2 * np.conj(e) * np.conj(d))
    h1 = np.real(c1 * c2 * np.conj(d) ** 2)
    h2 = np.real(c1 * np.conj(c2) * e ** 2)

    k12 = 2.0 * b1
    k13 = 2.0 * b2
    k14 = 4.0 * b1 * b2 - 2.0 * ad2 - 2.0 * ae2
    k22 = b1 * b1 - ac1
    k24 = (2.0 * b1 * b1 * b2 - 2.0 * b1 * cross
           - 2.0 * b2 * ac1 - 4.0 * g1)
    k33 = b2 * b2 - ac2
    k34 = (2.0 * b1 * b2 * b2 - 2.0 * b2 * cross
           - 2.0 * b1 * ac2 - 4.0 * g2)
    k44 = (b1 * b1 * b2 * b2 + ad2 * ad2 + ae2 * ae2 + ac1 * ac2
           - b1 * b1 * ac2 - b2 * b2 * ac1
           - 2.0 * b1 * b2 * cross - 2.0 * ad2 * ae2
           - 4.0 * b1 * g2 - 4.0 * b2 * g1 - 2.0 * h1 - 2.0 * h2)
    return k12, k13, k14, k22, k24, k33, k34, k44


def _q_coeff_array(b1, b2, c1, c2, d12, dbar12) -> np.ndarray:
    k12, k13, k14, k22, k24, k33, k34, k44 = _k_entries(
        b1, b2, c1, c2, d12, dbar12)
    batch = np.broadcast(np.asarray(b1, dtype=float),
                         np.asarray(b2, dtype=float),
                         np.asarray(d12)).shape
    coeffs = np.zeros((3, 3) + batch, dtype=float)
    coeffs[0, 0] = 1.0
    coeffs[0, 1] = k13
    coeffs[0, 2] = k33
    coeffs[1, 0] = k12
    coeffs[1, 1] = k14
    coeffs[1, 2] = k34
    coeffs[2, 0] = k22
    coeffs[2, 1] = k24
    coeffs[2, 2] = k44
    return coeffs


@dataclass(frozen=True)
class KMatrix:
    """Non-trivial coefficients of Q(l1, l2); the constant term is 1."""

    k12: float
    k13: float
    k14: float
    k22: float
    k24: float
    k33: float
    k34: float
    k44: float

    def coefficient_grid(self) -> np.ndarray:
        """(3, 3) array with entry [i, j] multiplying l1**i * l2**j."""
        return np.array([
            [1.0, self.k13, self.k33],
            [self.k12, self.k14, self.k34],
            [self.k22, self.k24, self.k44],
        ])

    def q_value(self, l1: float, l2: float) -> float:
        grid = self.coefficient_grid()
        powers1 = np.array([1.0, l1, l1 * l1])
        powers2 = np.array([1.0, l2, l2 * l2])
        return float(powers1 @ grid @ powers2)


def build_k_matrix(state: TwoModeGaussianState) -> KMatrix:
    """Q-polynomial coefficients of the state."""
    k = _k_entries(*state.params())
    return KMatrix(*(float(v) for v in k))


def q_polynomial(state: TwoModeGaussianState) -> BivariateSeries:
    """Q as an exact bivariate polynomial about the origin."""
    return BivariateSeries(_q_coeff_array(*state.params()), point=(0.0, 0.0))


def _marginal_q_series(state: TwoModeGaussianState, mode: int, about_one: bool,
                       order: int) -> BivariateSeries:
    """Single-mode reduction of Q, as a series in that mode's variable.

    Setting the other mode's variable to zero removes it exactly, leaving a
    quadratic 1 + a*l + b*l**2.  The second series axis is kept with order
    zero so the shared expansion code applies unchanged.
    """
    km = build_k_matrix(state)
    if mode == 1:
        a, b = km.k12, km.k22
    elif mode == 2:
        a, b = km.k13, km.k33
    else:
        raise ParameterError(f"mode must be 1 or 2, got {mode!r}")
    if about_one:
        coeffs = np.array([[1.0 + a + b], [a + 2.0 * b], [b]])
        point = (1.0, 0.0)
    else:
        coeffs = np.array([[1.0], [a], [b]])
        point = (0.0, 0.0)
    series = BivariateSeries(coeffs, point=point)
    return series.rsqrt(order1=order, order2=0)


def _check_order(total: int, max_order: int):
    if total > max_order:
        raise OrderLimitError(
            f"requested derivative order {total} exceeds the configured "
            f"maximum {max_order}; raise max_order explicitly if intended")


def _check_index(name: str, value) -> int:
    iv = int(value)
    if iv != value or iv < 0:
        raise ParameterError(f"{name} must be a non-negative integer, "
                             f"got {value!r}")
    return iv


# -- intensity moments -----------------------------------------------------

def moment_table(state: TwoModeGaussianState, order1: int, order2: int,
                 *, max_order: int | None = None) -> np.ndarray:
    """Table of normally ordered intensity moments <W1**i W2**j>.

    Entry [i, j] covers all i <= order1, j <= order2.  The guard applies to
    the largest requested total order i + j = order1 + order2.
    """
    o1 = _check_index("order1", order1)
    o2 = _check_index("order2", order2)
    _check_order(o1 + o2, DEFAULT_MAX_ORDER if max_order is None else max_order)
    series = q_polynomial(state).rsqrt(order1=o1, order2=o2)
    return _sign_grid(o1, o2) * _fact_grid(o1, o2) * series.coeffs


def intensity_moment(state: TwoModeGaussianState, k1: int, k2: int,
                     *, max_order: int | None = None) -> float:
    """Normally ordered intensity moment <W1**k1 W2**k2>."""
    k1 = _check_index("k1", k1)
    k2 = _check_index("k2", k2)
    _check_order(k1 + k2, DEFAULT_MAX_ORDER if max_order is None else max_order)
    series = q_polynomial(state).rsqrt(order1=k1, order2=k2)
    return float((-1.0) ** (k1 + k2) * _fact(k1) * _fact(k2)
                 * series.coeffs[k1, k2])


def marginal_intensity_moment(state: TwoModeGaussianState, mode: int, k: int,
                              *, max_order: int | None = None) -> float:
    """Single-mode moment <Wj**k>, computed from the exact marginal."""
    k = _check_index("k", k)
    _check_order(k, DEFAULT_MAX_ORDER if max_order is None else max_order)
    series = _marginal_q_series(state, mode, about_one=False, order=k)
    return float((-1.0) ** k * _fact(k) * series.coeffs[k, 0])


# -- photon-number distribution --------------------------------------------

def _pnd_series(state: TwoModeGaussianState, o1: int, o2: int) -> BivariateSeries:
    q = q_polynomial(state).rebased(1.0, 1.0)
    if q.coeffs[(0, 0)] <= 0.0:
        raise EvaluationError(
            "generating polynomial is not positive at the photon-number "
            "expansion point; state parameters are outside the physical range")
    return q.rsqrt(order1=o1, order2=o2)


def pnd_table(state: TwoModeGaussianState, n_max1: int, n_max2: int) -> np.ndarray:
    """Joint photon-number probabilities p(n1, n2) for n1 <= n_max1,
    n2 <= n_max2.  Rounding-level negatives deep in the tail are clamped."""
    o1 = _check_index("n_max1", n_max1)
    o2 = _check_index("n_max2", n_max2)
    series = _pnd_series(state, o1, o2)
    p = _sign_grid(o1, o2) * series.coeffs
    bad = p < -1e-12
    if np.any(bad):
        raise EvaluationError(
            "photon-number expansion produced a significantly negative "
            "probability; the requested size exceeds the stable range")
    return np.where(p < 0.0, 0.0, p)


def pnd_element(state: TwoModeGaussianState, n1: int, n2: int,
                *, max_order: int | None = None) -> float:
    """Joint photon-number probability p(n1, n2)."""
    n1 = _check_index("n1", n1)
    n2 = _check_index("n2", n2)
    _check_order(n1 + n2, DEFAULT_MAX_ORDER if max_order is None else max_order)
    series = _pnd_series(state, n1, n2)
    value = float((-1.0) ** (n1 + n2) * series.coeffs[n1, n2])
    return max(value, 0.0) if value > -1e-12 else value


def modified_pnd_table(state: TwoModeGaussianState, n_max1: int,
                       n_max2: int) -> np.ndarray:
    """Table of factorial-scaled probabilities n1! n2! p(n1, n2) / p(0, 0)."""
    o1 = _check_index("n_max1", n_max1)
    o2 = _check_index("n_max2", n_max2)
    series = _pnd_series(state, o1, o2)
    p = _sign_grid(o1, o2) * series.coeffs
    return _fact_grid(o1, o2) * (p / p[0, 0])


def modified_pnd_element(state: TwoModeGaussianState, n1: int, n2: int,
                         *, max_order: int | None = None) -> float:
    """Factorial-scaled joint probability n1! n2! p(n1, n2) / p(0, 0)."""
    n1 = _check_index("n1", n1)
    n2 = _check_index("n2", n2)
    _check_order(n1 + n2, DEFAULT_MAX_ORDER if max_order is None else max_order)
    series = _pnd_series(state, n1, n2)
    p = float((-1.0) ** (n1 + n2) * series.coeffs[n1, n2])
    return _fact(n1) * _fact(n2) * p / float(series.coeffs[0, 0])


def marginal_pnd_table(state: TwoModeGaussianState, mode: int,
                       n_max: int) -> np.ndarray:
    """Marginal probabilities p_mode(n) for n <= n_max, from the exact
    single-mode reduction (no joint table is formed)."""
    n_max = _check_index("n_max", n_max)
    series = _marginal_q_series(state, mode, about_one=True, order=n_max)
    p = _SIGNS[np.arange(n_max + 1) % 2] * series.coeffs[:, 0]
    return np.where((p < 0.0) & (p > -1e-12), 0.0, p)


def marginal_pnd(state: TwoModeGaussianState, mode: int, n: int,
                 *, max_order: int | None = None) -> float:
    """Marginal photon-number probability of one mode."""
    n = _check_index("n", n)
    _check_order(n, DEFAULT_MAX_ORDER if max_order is None else max_order)
    return float(marginal_pnd_table(state, mode, n)[n])


def marginal_modified_pnd_table(state: TwoModeGaussianState, mode: int,
                                n_max: int) -> np.ndarray:
    n_max = _check_index("n_max", n_max)
    series = _marginal_q_series(state, mode, about_one=True, order=n_max)
    p = _SIGNS[np.arange(n_max + 1) % 2] * series.coeffs[:, 0]
    facts = np.array([_fact(n) for n in range(n_max + 1)])
    return facts * (p / p[0])


def marginal_modified_pnd(state: TwoModeGaussianState, mode: int, n: int,
                          *, max_order: int | None = None) -> float:
    """Factorial-scaled marginal probability n! p_mode(n) / p_mode(0)."""
    n = _check_index("n", n)
    _check_order(n, DEFAULT_MAX_ORDER if max_order is None else max_order)
    return float(marginal_modified_pnd_table(state, mode, n)[n])


@dataclass(frozen=True)
class PhotonNumberDistribution:
    """Joint photon-number probabilities on a finite grid plus the mass the
    grid does not cover."""

    n_max1: int
    n_max2: int
    p: np.ndarray
    tail_mass: float

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        if p.ndim != 2:
            raise ParameterError("probability table must be two-dimensional")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "n_max1", int(self.n_max1))
        object.__setattr__(self, "n_max2", int(self.n_max2))
        if p.shape != (self.n_max1 + 1, self.n_max2 + 1):
            raise ParameterError(
                f"table shape {p.shape} does not match photon-number cutoffs "
                f"({self.n_max1}, {self.n_max2})")
        object.__setattr__(self, "tail_mass", float(self.tail_mass))

    @classmethod
    def from_table(cls, p: np.ndarray,
                   tail_mass: float | None = None) -> "PhotonNumberDistribution":
        p = np.asarray(p, dtype=float)
        if tail_mass is None:
            tail_mass = 1.0 - float(p.sum())
        return cls(p.shape[0] - 1, p.shape[1] - 1, p, tail_mass)

    def marginal(self, mode: int) -> np.ndarray:
        if mode == 1:
            return self.p.sum(axis=1)
        if mode == 2:
            return self.p.sum(axis=0)
        raise ParameterError(f"mode must be 1 or 2, got {mode!r}")

    def total_mass(self) -> float:
        return float(self.p.sum())


def _marginal_tail(state: TwoModeGaussianState, mode: int, n_max: int) -> float:
    covered = float(marginal_pnd_table(state, mode, n_max).sum())
    return max(0.0, 1.0 - covered)


def photon_number_distribution(state: TwoModeGaussianState,
                               *, tail_tol: float = 1e-10,
                               n_start: int = 16,
                               n_cap: int = 4096) -> PhotonNumberDistribution:
    """Joint photon-number distribution truncated so that the neglected mass
    is below tail_tol.

    The cutoff is chosen per mode by doubling until the exact marginal tails
    together drop below the tolerance; only then is the joint table built.
    The union bound tail(n1_max, n2_max) <= tail_1 + tail_2 makes the
    reported tail_mass trustworthy without summing anything infinite.
    """
    if not 0.0 < tail_tol < 1.0:
        raise ParameterError(f"tail_tol must lie in (0, 1), got {tail_tol}")
    cutoffs = []
    for mode in (1, 2):
        n = max(4, int(n_start))
        while _marginal_tail(state, mode, n) > tail_tol / 2.0:
            n *= 2
            if n > n_cap:
                raise TruncationError(
                    f"mode {mode} needs more than {n_cap} photon-number "
                    f"terms to reach tail tolerance {tail_tol}")
        cutoffs.append(n)
    n1, n2 = cutoffs
    p = pnd_table(state, n1, n2)
    return PhotonNumberDistribution(n1, n2, p, 1.0 - float(p.sum()))


# -- closed form for the noisy twin beam -----------------------------------

def twin_beam_pnd_closed_form(params, n1: int, n2: int) -> float:
    """Joint photon-number probability of a noisy twin beam via its finite
    sum form; switches to log-domain accumulation for large indices."""
    if isinstance(params, TwinBeamParams):
        p = params
    else:
        p = TwinBeamParams(float(params))
    n1 = _check_index("n1", n1)
    n2 = _check_index("n2", n2)

    bt1 = 1.0 + p.bp + p.bs
    bt2 = 1.0 + p.bp + p.bi
    pair = p.bp * (p.bp + 1.0)
    kt = bt1 * bt2 - pair
    x1 = (kt - bt1) / kt  # pairs with the exponent in n2
    x2 = (kt - bt2) / kt  # pairs with the exponent in n1
    xm = pair / (kt * kt)
    m_top = min(n1, n2)

    if max(n1, n2) <= 50:
        total = 0.0
        for m in range(m_top + 1):
            total += (math.comb(n1, m) * math.comb(n2, m)
                      * x1 ** (n2 - m) * x2 ** (n1 - m) * xm ** m)
        return total / kt

    # log-domain: all factors are non-negative, so terms add monotonically
    terms = []
    for m in range(m_top + 1):
        lt = (_lcomb(n1, m) + _lcomb(n2, m))
        ok = True
        for base, expo in ((x1, n2 - m), (x2, n1 - m), (xm, m)):
            if expo == 0:
                continue
            if base <= 0.0:
                ok = False
                break
            lt += expo * math.log(base)
        if ok:
            terms.append(lt)
    if not terms:
        return 0.0
    peak = max(terms)
    if peak == -math.inf:
        return 0.0
    acc = sum(math.exp(lt - peak) for lt in terms)
    return math.exp(peak - math.log(kt)) * acc


def _lcomb(n: int, k: int) -> float:
    return (math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1))
