"""Tests for the moment/PND engine and its generating-function core."""

import math

import numpy as np
import pytest

from conftest import random_physical_state
from twinbeam import moments, states
from twinbeam.errors import OrderLimitError, TruncationError


def _characteristic_quadrature(state, lam1, lam2, nodes=48):
    """Antinormal generating function by direct Gaussian integration.

    Evaluates the two-complex-dimensional integral of the normally
    ordered characteristic function against the exponential weights
    with tensor-product Gauss-Hermite quadrature.  Shares nothing with
    the series engine: the integrand is assembled from the raw state
    parameters.
    """
    x, w = np.polynomial.hermite.hermgauss(nodes)
    s1, s2 = np.sqrt(lam1), np.sqrt(lam2)
    y, u, v = np.meshgrid(x, x, x, indexing="ij")
    wyuv = np.einsum("i,j,k->ijk", w, w, w)
    beta2 = s2 * (u + 1j * v)
    beta2c = np.conj(beta2)
    mode2 = -state.b2 * (beta2.real**2 + beta2.imag**2) + (
        state.c2 * beta2c**2
    ).real
    total = 0.0
    for xi, wi in zip(x, w):
        beta1 = s1 * (xi + 1j * y)
        beta1c = np.conj(beta1)
        exponent = (
            -state.b1 * (beta1.real**2 + beta1.imag**2)
            + (state.c1 * beta1c**2).real
            + mode2
            + 2.0 * (state.d12 * beta1c * beta2c + state.dbar12 * beta1 * beta2c).real
        )
        total += wi * float(np.sum(wyuv * np.exp(exponent)))
    return total / np.pi**2


def test_k_matrix_of_unit_twin_beam():
    km = moments.build_k_matrix(states.twin_beam(1.0))
    assert km.k12 == pytest.approx(2.0, rel=1e-12)
    assert km.k13 == pytest.approx(2.0, rel=1e-12)
    assert km.k14 == pytest.approx(0.0, abs=1e-12)
    assert km.k22 == pytest.approx(1.0, rel=1e-12)
    assert km.k33 == pytest.approx(1.0, rel=1e-12)
    assert km.k24 == pytest.approx(-2.0, rel=1e-12)
    assert km.k34 == pytest.approx(-2.0, rel=1e-12)
    assert km.k44 == pytest.approx(1.0, rel=1e-12)


def test_q_value_normalization():
    rng = np.random.default_rng(2)
    for _ in range(4):
        km = moments.build_k_matrix(random_physical_state(rng))
        assert km.q_value(0.0, 0.0) == pytest.approx(1.0, rel=1e-13)


def test_q_value_against_quadrature_balanced_split():
    """Mandated cross-check on the balanced splitter output at unit pump."""
    st = states.beam_splitter(states.twin_beam(1.0), 0.5)
    km = moments.build_k_matrix(st)
    rng = np.random.default_rng(20260819)
    for _ in range(5):
        l1, l2 = rng.uniform(0.6, 1.2, size=2)
        q_direct = 1.0 / _characteristic_quadrature(st, l1, l2) ** 2
        assert km.q_value(l1, l2) == pytest.approx(q_direct, rel=1e-10)


def test_q_value_against_quadrature_noisy_unbalanced_split():
    """The same integral on a state with every coupling term active."""
    st = states.beam_splitter(states.twin_beam(1.0, bs=0.3, bi=0.1), 0.7)
    assert abs(st.dbar12) > 0.05  # the discriminating cross term is live
    km = moments.build_k_matrix(st)
    rng = np.random.default_rng(77)
    for _ in range(3):
        l1, l2 = rng.uniform(0.6, 1.2, size=2)
        q_direct = 1.0 / _characteristic_quadrature(st, l1, l2) ** 2
        assert km.q_value(l1, l2) == pytest.approx(q_direct, rel=1e-10)


@pytest.mark.parametrize("seed", range(4))
def test_pnd_sum_reproduces_generating_function(seed):
    """Partial sums of the PND evaluate the generating function."""
    rng = np.random.default_rng(300 + seed)
    st = random_physical_state(rng, max_pump=1.5)
    km = moments.build_k_matrix(st)
    pnd = moments.photon_number_distribution(st, tail_tol=1e-14)
    n1 = np.arange(pnd.n_max1 + 1)
    n2 = np.arange(pnd.n_max2 + 1)
    for _ in range(3):
        q1, q2 = rng.uniform(0.2, 0.9, size=2)
        partial = float(q1**n1 @ pnd.p @ q2**n2)
        exact = km.q_value(1.0 - q1, 1.0 - q2) ** -0.5
        assert partial == pytest.approx(exact, rel=1e-11, abs=1e-13)


@pytest.mark.parametrize("seed", range(3))
def test_moments_match_falling_factorial_sums(seed):
    """Intensity moments equal factorial moments of the distribution."""
    rng = np.random.default_rng(40 + seed)
    st = random_physical_state(rng, max_pump=1.0)
    pnd = moments.photon_number_distribution(st, tail_tol=1e-13)
    n1 = np.arange(pnd.n_max1 + 1, dtype=float)
    n2 = np.arange(pnd.n_max2 + 1, dtype=float)
    table = moments.moment_table(st, 3, 3)
    for k1 in range(4):
        for k2 in range(4):
            w1 = np.ones_like(n1)
            for j in range(k1):
                w1 *= n1 - j
            w2 = np.ones_like(n2)
            for j in range(k2):
                w2 *= n2 - j
            direct = float(w1 @ pnd.p @ w2)
            assert table[k1, k2] == pytest.approx(direct, rel=1e-9, abs=1e-12)


def test_first_moments_in_closed_form():
    st = states.twin_beam(0.8, bs=0.4, bi=0.15)
    mt = moments.moment_table(st, 2, 2)
    assert mt[0, 0] == pytest.approx(1.0, rel=1e-13)
    assert mt[1, 0] == pytest.approx(st.b1, rel=1e-12)
    assert mt[0, 1] == pytest.approx(st.b2, rel=1e-12)
    assert mt[1, 1] == pytest.approx(
        st.b1 * st.b2 + abs(st.d12) ** 2 + abs(st.dbar12) ** 2, rel=1e-12
    )
    assert mt[2, 0] == pytest.approx(2.0 * st.b1**2 + abs(st.c1) ** 2, rel=1e-12)


def test_intensity_moment_matches_table():
    rng = np.random.default_rng(8)
    st = random_physical_state(rng)
    mt = moments.moment_table(st, 3, 2)
    for k1 in range(4):
        for k2 in range(3):
            assert moments.intensity_moment(st, k1, k2) == pytest.approx(
                mt[k1, k2], rel=1e-13
            )


def test_marginal_moments_match_joint():
    rng = np.random.default_rng(13)
    st = random_physical_state(rng)
    mt = moments.moment_table(st, 4, 4)
    for k in range(5):
        assert moments.marginal_intensity_moment(st, 1, k) == pytest.approx(
            mt[k, 0], rel=1e-12
        )
        assert moments.marginal_intensity_moment(st, 2, k) == pytest.approx(
            mt[0, k], rel=1e-12
        )


@pytest.mark.parametrize(
    "params",
    [states.TwinBeamParams(0.5), states.TwinBeamParams(0.8, 0.4, 0.15)],
    ids=["noiseless", "noisy"],
)
def test_pnd_elements_match_closed_form(params):
    st = states.twin_beam(params)
    for n1 in range(7):
        for n2 in range(7):
            got = moments.pnd_element(st, n1, n2)
            want = moments.twin_beam_pnd_closed_form(params, n1, n2)
            if want == 0.0:
                # an exactly vanishing element evaluates to rounding residue
                assert abs(got) < 1e-15
            else:
                assert got == pytest.approx(want, rel=1e-12)


def test_noiseless_diagonal_is_geometric():
    bp = 0.5
    st = states.twin_beam(bp)
    for n in range(7):
        expected = bp**n / (1.0 + bp) ** (n + 1)
        assert moments.pnd_element(st, n, n) == pytest.approx(expected, rel=1e-12)


def test_deep_tail_uses_log_domain():
    """Far-tail probabilities keep relative accuracy at 1e-27 scale."""
    params = states.TwinBeamParams(0.8, 0.4, 0.15)
    st = states.twin_beam(params)
    got = moments.pnd_element(st, 60, 3, max_order=65)
    want = moments.twin_beam_pnd_closed_form(params, 60, 3)
    assert want < 1e-25
    assert got == pytest.approx(want, rel=1e-10)


def test_pnd_table_matches_elements():
    rng = np.random.default_rng(21)
    st = random_physical_state(rng)
    table = moments.pnd_table(st, 5, 4)
    assert table.shape == (6, 5)
    for n1 in (0, 2, 5):
        for n2 in (0, 3, 4):
            assert table[n1, n2] == pytest.approx(
                moments.pnd_element(st, n1, n2), rel=1e-13, abs=1e-300
            )


def test_modified_elements_follow_definition():
    st = states.twin_beam(0.8, bs=0.4, bi=0.15)
    p00 = moments.pnd_element(st, 0, 0)
    for n1, n2 in [(0, 0), (1, 1), (2, 1), (0, 3)]:
        expected = (
            math.factorial(n1) * math.factorial(n2)
            * moments.pnd_element(st, n1, n2) / p00
        )
        assert moments.modified_pnd_element(st, n1, n2) == pytest.approx(
            expected, rel=1e-12
        )
    table = moments.modified_pnd_table(st, 3, 3)
    assert table[0, 0] == pytest.approx(1.0, rel=1e-13)
    assert table[2, 1] == pytest.approx(
        moments.modified_pnd_element(st, 2, 1), rel=1e-13
    )


def test_marginal_pnd_matches_joint_sum():
    rng = np.random.default_rng(33)
    st = random_physical_state(rng, max_pump=1.0)
    pnd = moments.photon_number_distribution(st, tail_tol=1e-14)
    marg = pnd.marginal(1)
    for n in range(6):
        assert moments.marginal_pnd(st, 1, n) == pytest.approx(
            float(marg[n]), rel=1e-10, abs=1e-14
        )


def test_marginal_modified_pnd_consistency():
    st = states.twin_beam(0.8, bs=0.4, bi=0.15)
    p0 = moments.marginal_pnd(st, 2, 0)
    for n in range(5):
        expected = math.factorial(n) * moments.marginal_pnd(st, 2, n) / p0
        assert moments.marginal_modified_pnd(st, 2, n) == pytest.approx(
            expected, rel=1e-11
        )
    table = moments.marginal_modified_pnd_table(st, 2, 4)
    assert table[3] == pytest.approx(
        moments.marginal_modified_pnd(st, 2, 3), rel=1e-12
    )


@pytest.mark.parametrize("tail_tol", [1e-8, 1e-12])
def test_adaptive_pnd_reaches_requested_tail(tail_tol):
    rng = np.random.default_rng(55)
    st = random_physical_state(rng)
    pnd = moments.photon_number_distribution(st, tail_tol=tail_tol)
    assert -1e-15 <= pnd.tail_mass <= tail_tol
    assert pnd.total_mass() + pnd.tail_mass == pytest.approx(1.0, abs=1e-12)
    assert np.all(pnd.p >= -1e-15)


def test_adaptive_pnd_respects_cap():
    with pytest.raises(TruncationError):
        moments.photon_number_distribution(states.twin_beam(50.0), n_cap=32)


def test_order_limit_is_enforced():
    st = states.twin_beam(1.0)
    with pytest.raises(OrderLimitError):
        moments.pnd_element(st, 7, 7)
    with pytest.raises(OrderLimitError):
        moments.moment_table(st, 7, 7)
    # explicitly raising the order unlocks the computation
    assert moments.pnd_element(st, 7, 7, max_order=16) == pytest.approx(
        0.5**8, rel=1e-12
    )


def test_q_polynomial_evaluates_like_k_matrix():
    rng = np.random.default_rng(71)
    st = random_physical_state(rng)
    km = moments.build_k_matrix(st)
    poly = moments.q_polynomial(st)
    for _ in range(5):
        l1, l2 = rng.uniform(0.0, 1.5, size=2)
        assert poly.eval(l1, l2) == pytest.approx(km.q_value(l1, l2), rel=1e-12)
