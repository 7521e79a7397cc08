"""Fock-space reference path for photon-number statistics.

The moments engine reaches the joint photon-number distribution through the
generating-function expansion.  This module provides the slow but
structurally independent alternative: exact beam-splitter coefficients in
the Fock basis, a distribution-level beam-splitter transform built from
them, Bernoulli detection loss applied directly to count probabilities, and
factorial moments summed straight off a finite table.  Agreement between
the two paths is the strongest end-to-end check the package has, because
they share no code beyond the state parametrization.

The beam splitter conserves total photon number, so its Fock coefficients
block into shells of fixed n1 + n2, and each shell gives a column-stochastic
probability matrix.  Phases drop out of these squared coefficients, which is
why the transform here needs only the transmissivity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple

import numpy as np
from scipy.stats import binom

from .errors import EvaluationError, ParameterError
from .moments import PhotonNumberDistribution

__all__ = [
    "BsCoefficientTable",
    "get_bs_table",
    "bs_transform_pnd",
    "bernoulli_downsample",
    "FactorialMomentEstimate",
    "factorial_moment_from_pnd",
]

DEFAULT_CUTOFF = 32


@lru_cache(maxsize=None)
def _shell_generator(s: int) -> tuple:
    """Eigendecomposition of the number-conserving mixing generator.

    On the shell of s total photons the splitter acts as exp(theta * K)
    with K the tridiagonal antisymmetric matrix K[k+1, k] = sqrt((k+1)(s-k)).
    The decomposition of the Hermitian matrix iK depends only on s, so it is
    shared across transmissivities.
    """
    k = np.arange(s, dtype=float)
    w = np.sqrt((k + 1.0) * (s - k))
    herm = np.zeros((s + 1, s + 1), dtype=complex)
    herm[np.arange(1, s + 1), np.arange(s)] = 1j * w
    herm[np.arange(s), np.arange(1, s + 1)] = -1j * w
    mu, vec = np.linalg.eigh(herm)
    return mu, vec


def _shell_matrix(t: float, s: int) -> np.ndarray:
    """Probability matrix of one photon-number shell.

    Entry [n1_out, n1_in] is the probability that an input Fock state
    (n1_in, s - n1_in) leaves the splitter as (n1_out, s - n1_out).  The
    amplitude matrix is the exponential of the mixing generator, evaluated
    through its eigendecomposition; unlike the direct interference sum this
    stays well conditioned at shells of hundreds of photons.
    """
    theta = math.atan2(math.sqrt(1.0 - t), math.sqrt(t))
    mu, vec = _shell_generator(s)
    amps = ((vec * np.exp(-1j * theta * mu)) @ vec.conj().T).real
    return amps ** 2


def _check_shell(probs: np.ndarray, s: int) -> np.ndarray:
    """Validate column-stochasticity of one shell's probability matrix."""
    sums = probs.sum(axis=0)
    worst = float(np.max(np.abs(sums - 1.0)))
    if worst > 1e-12 * (1.0 + s):
        raise EvaluationError(
            f"beam-splitter shell {s} lost unitarity "
            f"(worst column mass error {worst:.3e})")
    return probs


@dataclass
class BsCoefficientTable:
    """Cached beam-splitter probability coefficients up to a shell cutoff."""

    t: float
    cutoff: int = DEFAULT_CUTOFF
    _shells: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        t = float(self.t)
        if not 0.0 <= t <= 1.0:
            raise ParameterError(f"transmissivity must lie in [0, 1], got {t}")
        self.t = t
        self.cutoff = int(self.cutoff)
        if self.cutoff < 0:
            raise ParameterError("cutoff must be non-negative")

    def shell(self, s: int) -> np.ndarray:
        if s < 0 or s > self.cutoff:
            raise ParameterError(
                f"shell {s} outside the tabulated range 0..{self.cutoff}")
        cached = self._shells.get(s)
        if cached is None:
            cached = _check_shell(_shell_matrix(self.t, s), s)
            self._shells[s] = cached
        return cached

    def coefficient(self, n1_out: int, n2_out: int, n1_in: int,
                    n2_in: int) -> float:
        """Transition probability between Fock states; zero across shells."""
        if min(n1_out, n2_out, n1_in, n2_in) < 0:
            raise ParameterError("photon numbers must be non-negative")
        s = n1_in + n2_in
        if n1_out + n2_out != s:
            return 0.0
        return float(self.shell(s)[n1_out, n1_in])


@lru_cache(maxsize=8)
def get_bs_table(t: float, cutoff: int = DEFAULT_CUTOFF) -> BsCoefficientTable:
    return BsCoefficientTable(t, cutoff)


def bs_transform_pnd(pnd: PhotonNumberDistribution,
                     t: float) -> PhotonNumberDistribution:
    """Joint photon-number distribution after the beam splitter, computed
    shell by shell in the Fock basis.

    Each shell is mapped by a stochastic matrix, so the covered mass is
    conserved exactly; the result is rescaled to the input's total mass to
    absorb rounding, and the truncation tail carries over unchanged.
    """
    s_max = pnd.n_max1 + pnd.n_max2
    table = BsCoefficientTable(t, cutoff=s_max)
    out = np.zeros((s_max + 1, s_max + 1))
    for s in range(s_max + 1):
        lo = max(0, s - pnd.n_max2)
        hi = min(pnd.n_max1, s)
        if lo > hi:
            continue
        n1_in = np.arange(lo, hi + 1)
        shell_probs = pnd.p[n1_in, s - n1_in]
        if not np.any(shell_probs):
            continue
        moved = table.shell(s)[:, n1_in] @ shell_probs
        n1_out = np.arange(s + 1)
        out[n1_out, s - n1_out] += moved
    total_in = pnd.total_mass()
    total_out = float(out.sum())
    if total_out > 0.0:
        out *= total_in / total_out
    return PhotonNumberDistribution(s_max, s_max, out, pnd.tail_mass)


def _loss_matrix(n_max: int, eta: float) -> np.ndarray:
    """Entry [m, n]: probability that n photons yield m detections."""
    m_grid, n_grid = np.meshgrid(np.arange(n_max + 1), np.arange(n_max + 1),
                                 indexing="ij")
    return binom.pmf(m_grid, n_grid, eta)


def bernoulli_downsample(pnd: PhotonNumberDistribution, eta1: float,
                         eta2: float | None = None) -> PhotonNumberDistribution:
    """Detection loss applied directly to the count probabilities.

    Every photon survives independently with probability eta; the stored
    tail mass is kept as a (now conservative) bound, since loss can only
    move probability toward smaller counts.
    """
    e1 = float(eta1)
    e2 = e1 if eta2 is None else float(eta2)
    for name, value in (("eta1", e1), ("eta2", e2)):
        if not 0.0 <= value <= 1.0:
            raise ParameterError(f"{name} must lie in [0, 1], got {value}")
    t1 = _loss_matrix(pnd.n_max1, e1)
    t2 = _loss_matrix(pnd.n_max2, e2)
    out = t1 @ pnd.p @ t2.T
    return PhotonNumberDistribution(pnd.n_max1, pnd.n_max2, out,
                                    pnd.tail_mass)


class FactorialMomentEstimate(NamedTuple):
    value: float
    error_bound: float


def factorial_moment_from_pnd(pnd: PhotonNumberDistribution, k1: int,
                              k2: int) -> FactorialMomentEstimate:
    """Factorial moment <n1 (n1-1).. (n1-k1+1) n2 .. (n2-k2+1)> summed over
    the stored table.

    The error bound charges the whole truncation tail at photon numbers
    twice the cutoffs, plus a rounding allowance for the table-sized dot
    product.  The tail term is floored at a few machine epsilons because a
    strongly over-resolved table can report a survival of exactly zero even
    though the true tail is merely below what double precision resolves.
    The combination is a heuristic rather than a guarantee, but it holds
    with room to spare for the geometrically decaying tails these
    distributions have once the cutoff satisfies the tail tolerance.
    """
    k1 = int(k1)
    k2 = int(k2)
    if k1 < 0 or k2 < 0:
        raise ParameterError("factorial-moment orders must be non-negative")
    f1 = np.array([math.perm(n, k1) if n >= k1 else 0
                   for n in range(pnd.n_max1 + 1)], dtype=float)
    f2 = np.array([math.perm(n, k2) if n >= k2 else 0
                   for n in range(pnd.n_max2 + 1)], dtype=float)
    value = float(f1 @ pnd.p @ f2)
    eps = float(np.finfo(float).eps)
    tail = max(pnd.tail_mass, 4.0 * eps)
    rounding = (pnd.n_max1 + 1) * (pnd.n_max2 + 1) * eps * abs(value)
    bound = (tail * math.perm(2 * pnd.n_max1 + k1, k1)
             * math.perm(2 * pnd.n_max2 + k2, k2) + rounding)
    return FactorialMomentEstimate(value, float(bound))
