"""Two-mode Gaussian states in the normal-ordered parametrization.

A zero-mean two-mode Gaussian field is fixed by six second moments: the mean
photon numbers of the two modes, one intra-mode variance per mode, and two
inter-mode correlations (a photon-pair one and a photon-transfer one).  This
module holds that data model plus the physical maps acting on it: twin-beam
construction, the beam splitter, and detection loss.

Physicality is checked through the symmetric-ordered quadrature covariance
matrix: both symplectic eigenvalues must sit at or above the vacuum level
1/2.  The same machinery, applied after a partial transpose, feeds the
entanglement quantifier in the quantifiers module.  The symplectic algebra
runs in extended precision because the smaller eigenvalue of a strongly
entangled state emerges from cancellation between covariance entries that
are many orders of magnitude larger.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, PhysicalityError

__all__ = [
    "TwinBeamParams",
    "BeamSplitterParams",
    "TwoModeGaussianState",
    "CovarianceMatrixN",
    "twin_beam",
    "beam_splitter",
    "attenuate",
    "covariance_n",
    "bs_unitary",
    "quadrature_covariance",
    "symplectic_eigenvalues",
    "is_physical_params",
]

PHYSICALITY_TOL = 1e-9


def _require_finite(name, value):
    if not np.isfinite(value):
        raise ParameterError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class TwinBeamParams:
    """Mean photon-pair number plus per-mode thermal noise means."""

    bp: float
    bs: float = 0.0
    bi: float = 0.0

    def __post_init__(self):
        for name in ("bp", "bs", "bi"):
            value = float(getattr(self, name))
            _require_finite(name, value)
            if value < 0.0:
                raise ParameterError(f"{name} must be non-negative, got {value}")
            object.__setattr__(self, name, value)


@dataclass(frozen=True)
class BeamSplitterParams:
    """Intensity transmissivity and phase; reflectance is 1 - t."""

    t: float
    phi: float = 0.0

    def __post_init__(self):
        t = float(self.t)
        phi = float(self.phi)
        _require_finite("t", t)
        _require_finite("phi", phi)
        if not 0.0 <= t <= 1.0:
            raise ParameterError(f"transmissivity must lie in [0, 1], got {t}")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "phi", phi)

    @property
    def r(self) -> float:
        return 1.0 - self.t


# -- symplectic invariants (extended precision, batch friendly) ----------

def _covariance_invariants(b1, b2, c1, c2, d12, dbar12):
    """det of the two single-mode blocks, the correlation block, and the
    full symmetric-ordered quadrature covariance (vacuum level 1/2).

    All arithmetic in numpy extended precision; inputs may be arrays.
    """
    ld = np.longdouble
    b1 = np.asarray(b1, dtype=ld)
    b2 = np.asarray(b2, dtype=ld)
    c1r = np.asarray(np.real(c1), dtype=ld)
    c1i = np.asarray(np.imag(c1), dtype=ld)
    c2r = np.asarray(np.real(c2), dtype=ld)
    c2i = np.asarray(np.imag(c2), dtype=ld)
    dr = np.asarray(np.real(d12), dtype=ld)
    di = np.asarray(np.imag(d12), dtype=ld)
    er = np.asarray(np.real(dbar12), dtype=ld)
    ei = np.asarray(np.imag(dbar12), dtype=ld)

    half = ld("0.5")
    a00 = b1 + half + c1r
    a01 = c1i
    a11 = b1 + half - c1r
    b00 = b2 + half + c2r
    b01 = c2i
    b11 = b2 + half - c2r
    c00 = dr - er
    c01 = di - ei
    c10 = di + ei
    c11 = -dr - er

    det_a = a00 * a11 - a01 * a01
    det_b = b00 * b11 - b01 * b01
    det_c = c00 * c11 - c01 * c10  # equals |dbar12|^2 - |d12|^2

    # det(sigma) via the Schur complement of the first mode's block
    with np.errstate(divide="ignore", invalid="ignore"):
        t00 = a11 * c00 - a01 * c10
        t01 = a11 * c01 - a01 * c11
        t10 = -a01 * c00 + a00 * c10
        t11 = -a01 * c01 + a00 * c11
        n00 = (c00 * t00 + c10 * t10) / det_a
        n01 = (c00 * t01 + c10 * t11) / det_a
        n10 = (c01 * t00 + c11 * t10) / det_a
        n11 = (c01 * t01 + c11 * t11) / det_a
        m00 = b00 - n00
        m01 = b01 - n01
        m10 = b01 - n10
        m11 = b11 - n11
        det_sigma = det_a * (m00 * m11 - m01 * m10)
    return det_a, det_b, det_c, det_sigma


def _symplectic_pair(b1, b2, c1, c2, d12, dbar12, partial_transpose=False):
    """Smaller and larger symplectic eigenvalue, extended precision.

    The smaller one is computed through the product form
    nu_minus**2 = det(sigma) / nu_plus**2 so that no subtractive
    cancellation of the large invariants occurs.
    """
    det_a, det_b, det_c, det_sigma = _covariance_invariants(
        b1, b2, c1, c2, d12, dbar12)
    if partial_transpose:
        det_c = -det_c
    delta = det_a + det_b + 2.0 * det_c
    disc = delta * delta - 4.0 * det_sigma
    disc = np.maximum(disc, np.longdouble(0.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        nu_p2 = (delta + np.sqrt(disc)) / 2.0
        nu_m2 = np.where(nu_p2 > 0.0, det_sigma / np.where(nu_p2 > 0.0,
                                                           nu_p2, 1.0), 0.0)
        nu_m2 = np.where(np.isfinite(nu_m2), nu_m2, 0.0)
        nu_m2 = np.maximum(nu_m2, np.longdouble(0.0))
        nu_p2 = np.maximum(nu_p2, np.longdouble(0.0))
        return np.sqrt(nu_m2), np.sqrt(nu_p2)


def _physicality_margin(det_a, det_b, tol):
    """Effective slack below the vacuum level 1/2.

    For a state at the physical edge the two symplectic eigenvalues
    coincide, so their splitting comes from the square root of a vanishing
    discriminant and rounding noise of size eps * det blows up to
    sqrt(eps * det).  The tolerance therefore cannot be a constant: it gets
    a floor that grows with the covariance magnitude, otherwise strongly
    squeezed pure states would be rejected as unphysical.
    """
    magnitude = np.maximum(np.maximum(det_a, det_b), np.longdouble(1.0))
    floor = 16.0 * np.sqrt(np.longdouble(2.3e-16) * magnitude)
    return np.maximum(np.longdouble(tol), floor)


def is_physical_params(b1, b2, c1, c2, d12, dbar12,
                       tol: float = PHYSICALITY_TOL):
    """Uncertainty-relation check on raw parameters; array friendly."""
    det_a, det_b, _, _ = _covariance_invariants(b1, b2, c1, c2, d12, dbar12)
    nu_m, _ = _symplectic_pair(b1, b2, c1, c2, d12, dbar12)
    margin = _physicality_margin(det_a, det_b, tol)
    ok = ((np.asarray(b1) >= -tol) & (np.asarray(b2) >= -tol)
          & (det_a > 0.0) & (det_b > 0.0)
          & (nu_m >= np.longdouble(0.5) - margin))
    if ok.ndim == 0:
        return bool(ok)
    return np.asarray(ok, dtype=bool)


@dataclass(frozen=True)
class TwoModeGaussianState:
    """Normal-ordered second moments of a zero-mean two-mode Gaussian state.

    b1, b2 are mean photon numbers; c1, c2 the intra-mode variances; d12 the
    anomalous (photon-pair) inter-mode correlation and dbar12 the normal
    (photon-transfer) one.  Construction rejects parameter sets that violate
    the uncertainty relation.
    """

    b1: float
    b2: float
    c1: complex = 0.0
    c2: complex = 0.0
    d12: complex = 0.0
    dbar12: complex = 0.0

    def __post_init__(self):
        b1 = float(self.b1)
        b2 = float(self.b2)
        _require_finite("b1", b1)
        _require_finite("b2", b2)
        if b1 < 0.0 or b2 < 0.0:
            raise ParameterError(
                f"mean photon numbers must be non-negative, got ({b1}, {b2})")
        object.__setattr__(self, "b1", b1)
        object.__setattr__(self, "b2", b2)
        for name in ("c1", "c2", "d12", "dbar12"):
            value = complex(getattr(self, name))
            if not (np.isfinite(value.real) and np.isfinite(value.imag)):
                raise ParameterError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)
        if not is_physical_params(b1, b2, self.c1, self.c2,
                                  self.d12, self.dbar12):
            nu_m, _ = _symplectic_pair(b1, b2, self.c1, self.c2,
                                       self.d12, self.dbar12)
            raise PhysicalityError(
                "parameters violate the uncertainty relation "
                f"(smaller symplectic eigenvalue {float(nu_m):.6g} < 1/2)")

    def is_physical(self, tol: float = PHYSICALITY_TOL) -> bool:
        return is_physical_params(self.b1, self.b2, self.c1, self.c2,
                                  self.d12, self.dbar12, tol)

    def params(self) -> tuple:
        return (self.b1, self.b2, self.c1, self.c2, self.d12, self.dbar12)


def symplectic_eigenvalues(state: TwoModeGaussianState,
                           partial_transpose: bool = False):
    """(smaller, larger) symplectic eigenvalue of the quadrature covariance."""
    nu_m, nu_p = _symplectic_pair(state.b1, state.b2, state.c1, state.c2,
                                  state.d12, state.dbar12,
                                  partial_transpose=partial_transpose)
    return float(nu_m), float(nu_p)


# -- normal-ordered covariance matrix ------------------------------------

def _an_matrix(b1, b2, c1, c2, d12, dbar12):
    """4x4 normal-ordered covariance in the (a1, a1+, a2, a2+) pairing.

    Batch friendly: scalar inputs give a (4, 4) complex matrix, array inputs
    a (..., 4, 4) stack.
    """
    b1 = np.asarray(b1, dtype=complex)
    shape = b1.shape
    out = np.zeros(shape + (4, 4), dtype=complex)
    b2 = np.asarray(b2, dtype=complex)
    c1 = np.asarray(c1, dtype=complex)
    c2 = np.asarray(c2, dtype=complex)
    d = np.asarray(d12, dtype=complex)
    e = np.asarray(dbar12, dtype=complex)
    out[..., 0, 0] = -b1
    out[..., 0, 1] = c1
    out[..., 0, 2] = np.conj(e)
    out[..., 0, 3] = d
    out[..., 1, 0] = np.conj(c1)
    out[..., 1, 1] = -b1
    out[..., 1, 2] = np.conj(d)
    out[..., 1, 3] = e
    out[..., 2, 0] = e
    out[..., 2, 1] = d
    out[..., 2, 2] = -b2
    out[..., 2, 3] = c2
    out[..., 3, 0] = np.conj(d)
    out[..., 3, 1] = np.conj(e)
    out[..., 3, 2] = np.conj(c2)
    out[..., 3, 3] = -b2
    return out


def _params_from_an(matrix):
    """Inverse of _an_matrix; clamps rounding-level negative photon numbers."""
    b1 = -np.real(matrix[..., 0, 0])
    b2 = -np.real(matrix[..., 2, 2])
    tiny = 1e-9 * (1.0 + np.abs(b1) + np.abs(b2))
    b1 = np.where((b1 < 0.0) & (b1 > -tiny), 0.0, b1)
    b2 = np.where((b2 < 0.0) & (b2 > -tiny), 0.0, b2)
    return (b1, b2, matrix[..., 0, 1], matrix[..., 2, 3],
            matrix[..., 0, 3], matrix[..., 1, 3])


@dataclass(frozen=True)
class CovarianceMatrixN:
    """Normal-ordered 4x4 covariance matrix with its fixed block pattern."""

    entries: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=complex)
        if m.shape != (4, 4):
            raise ParameterError(f"expected a 4x4 matrix, got shape {m.shape}")
        object.__setattr__(self, "entries", m)
        self.validate()

    def validate(self, tol: float = 1e-9):
        m = self.entries
        scale = max(1.0, float(np.max(np.abs(m))))
        if np.max(np.abs(m - m.conj().T)) > tol * scale:
            raise ParameterError("covariance matrix is not Hermitian")
        pattern_pairs = [
            ((0, 0), (1, 1)),  # both equal -b1
            ((2, 2), (3, 3)),  # both equal -b2
            ((0, 2), (3, 1)),  # both equal conj(dbar12)
            ((0, 3), (2, 1)),  # both equal d12
        ]
        for (i, j), (k, l) in pattern_pairs:
            if abs(m[i, j] - m[k, l]) > tol * scale:
                raise ParameterError(
                    f"covariance entries ({i},{j}) and ({k},{l}) must match")
        if abs(np.imag(m[0, 0])) > tol * scale or np.real(m[0, 0]) > tol * scale:
            raise ParameterError("diagonal must hold -b1 <= 0")
        if abs(np.imag(m[2, 2])) > tol * scale or np.real(m[2, 2]) > tol * scale:
            raise ParameterError("diagonal must hold -b2 <= 0")

    @classmethod
    def from_state(cls, state: TwoModeGaussianState) -> "CovarianceMatrixN":
        return cls(_an_matrix(*state.params()))

    def to_state(self) -> TwoModeGaussianState:
        return TwoModeGaussianState(*_params_from_an(self.entries))


def covariance_n(state: TwoModeGaussianState) -> CovarianceMatrixN:
    """Normal-ordered covariance matrix of the state."""
    return CovarianceMatrixN.from_state(state)


def quadrature_covariance(state: TwoModeGaussianState) -> np.ndarray:
    """Symmetric-ordered covariance in (x1, p1, x2, p2) order, vacuum 1/2."""
    b1, b2, c1, c2, d, e = state.params()
    sig = np.zeros((4, 4), dtype=float)
    sig[0, 0] = b1 + c1.real + 0.5
    sig[1, 1] = b1 - c1.real + 0.5
    sig[0, 1] = sig[1, 0] = c1.imag
    sig[2, 2] = b2 + c2.real + 0.5
    sig[3, 3] = b2 - c2.real + 0.5
    sig[2, 3] = sig[3, 2] = c2.imag
    sig[0, 2] = sig[2, 0] = d.real - e.real
    sig[0, 3] = sig[3, 0] = d.imag - e.imag
    sig[1, 2] = sig[2, 1] = d.imag + e.imag
    sig[1, 3] = sig[3, 1] = -d.real - e.real
    return sig


# -- physical maps --------------------------------------------------------

def twin_beam(params, bs: float = 0.0, bi: float = 0.0) -> TwoModeGaussianState:
    """Noisy twin beam: photon pairs plus independent thermal noise.

    Accepts either a TwinBeamParams or a bare pair mean with optional noise
    means.
    """
    if isinstance(params, TwinBeamParams):
        p = params
    else:
        p = TwinBeamParams(float(params), float(bs), float(bi))
    d12 = 1j * np.sqrt(p.bp * (p.bp + 1.0))
    return TwoModeGaussianState(b1=p.bp + p.bs, b2=p.bp + p.bi,
                                c1=0.0, c2=0.0, d12=complex(d12), dbar12=0.0)


def bs_unitary(t, phi=0.0) -> np.ndarray:
    """Mode-transformation matrix of a beam splitter in the field pairing
    (a1, a1+, a2, a2+); batch friendly in t and phi."""
    t = np.asarray(t, dtype=float)
    phi = np.asarray(phi, dtype=float)
    if np.any(t < 0.0) or np.any(t > 1.0):
        raise ParameterError("transmissivity must lie in [0, 1]")
    rt = np.sqrt(t)
    rr = np.sqrt(1.0 - t)
    ph = np.exp(1j * phi)
    shape = np.broadcast_shapes(t.shape, phi.shape)
    u = np.zeros(shape + (4, 4), dtype=complex)
    u[..., 0, 0] = rt
    u[..., 0, 2] = -rr * ph
    u[..., 1, 1] = rt
    u[..., 1, 3] = -rr * np.conj(ph)
    u[..., 2, 0] = rr * np.conj(ph)
    u[..., 2, 2] = rt
    u[..., 3, 1] = rr * ph
    u[..., 3, 3] = rt
    return u


def _bs_transform_arrays(b1, b2, c1, c2, d12, dbar12, t, phi=0.0):
    """Beam-splitter congruence on raw parameter arrays."""
    a = _an_matrix(b1, b2, c1, c2, d12, dbar12)
    u = bs_unitary(t, phi)
    out = np.einsum("...ji,...jk,...kl->...il", np.conj(u), a, u,
                    optimize=True)
    return _params_from_an(out)


def beam_splitter(state: TwoModeGaussianState, bs,
                  phi: float = 0.0) -> TwoModeGaussianState:
    """State after mixing the two modes on a beam splitter.

    ``bs`` is a BeamSplitterParams or a bare transmissivity.  Mean photon
    numbers of the output are stored as magnitudes (non-negative).
    """
    if isinstance(bs, BeamSplitterParams):
        p = bs
    else:
        p = BeamSplitterParams(float(bs), float(phi))
    b1, b2, c1, c2, d12, dbar12 = _bs_transform_arrays(
        *state.params(), p.t, p.phi)
    return TwoModeGaussianState(float(b1), float(b2), complex(c1),
                                complex(c2), complex(d12), complex(dbar12))


def attenuate(state: TwoModeGaussianState, eta1: float,
              eta2: float | None = None) -> TwoModeGaussianState:
    """Detection loss: independent attenuation of the two modes.

    Normally-ordered moments scale as eta per photon, so the map is a plain
    rescaling of the parameters.
    """
    e1 = float(eta1)
    e2 = e1 if eta2 is None else float(eta2)
    for name, value in (("eta1", e1), ("eta2", e2)):
        _require_finite(name, value)
        if not 0.0 <= value <= 1.0:
            raise ParameterError(f"{name} must lie in [0, 1], got {value}")
    cross = np.sqrt(e1 * e2)
    return TwoModeGaussianState(
        b1=e1 * state.b1, b2=e2 * state.b2,
        c1=e1 * state.c1, c2=e2 * state.c2,
        d12=cross * state.d12, dbar12=cross * state.dbar12)
