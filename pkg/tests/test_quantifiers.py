"""Tests for the entanglement and local non-classicality quantifiers."""

import math
from fractions import Fraction

import numpy as np
import pytest

from twinbeam import quantifiers, states


def _noise_boundary_by_bisection(bp, balanced, iterations=60):
    """Noise level where the twin beam stops being entangled."""
    lo, hi = 0.0, 4.0 * (bp + 1.0)
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        st = states.twin_beam(bp, bs=mid, bi=mid if balanced else 0.0)
        if quantifiers.negativity(st) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def test_negativity_closed_form_on_moderate_pumps():
    """Noiseless value over six decades of pump strength."""
    for bp in np.logspace(-3.0, math.log10(400.0), 30):
        want = math.sqrt(bp * (bp + 1.0)) + bp
        got = quantifiers.negativity(states.twin_beam(float(bp)))
        assert got == pytest.approx(want, rel=1e-10)


def test_negativity_is_exact_for_the_stored_state():
    """At very strong pumping the result matches rational arithmetic.

    The stored correlation parameter is itself a rounded double, which
    shifts the state's true negativity by ~3e-10 relative at bp = 1e3;
    the implementation must sit on the exact value of the state it was
    given, not drift further.
    """
    bp = 1e3
    st = states.twin_beam(bp)
    b = Fraction(bp)
    di = Fraction(abs(st.d12))
    n_true = (di - b) / (2 * b + 1 - 2 * di)
    got = Fraction(quantifiers.negativity(st))
    assert float(abs(got - n_true) / n_true) < 1e-12
    # the float reference formula genuinely differs from the stored
    # state's exact negativity at this pump level
    ref = math.sqrt(bp * (bp + 1.0)) + bp
    assert float(abs(n_true - Fraction(ref)) / n_true) > 1e-10


def test_negativity_clips_to_zero_for_separable_states():
    st = states.twin_beam(1.0, bs=2.0, bi=2.0)
    assert quantifiers.negativity(st) == 0.0


@pytest.mark.parametrize("bp", [0.1, 1.0, 10.0])
def test_balanced_noise_entanglement_boundary(bp):
    want = math.sqrt(bp * (bp + 1.0)) - bp
    found = _noise_boundary_by_bisection(bp, balanced=True)
    assert found == pytest.approx(want, abs=1e-8)


@pytest.mark.parametrize("bp", [0.1, 1.0, 10.0])
def test_unbalanced_noise_entanglement_boundary(bp):
    """With noise in one arm only, entanglement survives up to unit
    mean noise photon number regardless of the pump."""
    found = _noise_boundary_by_bisection(bp, balanced=False)
    assert found == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("bp", [0.1, 1.0, 10.0])
def test_balanced_splitter_separates_the_modes(bp):
    tb = states.twin_beam(bp)
    assert quantifiers.negativity(states.beam_splitter(tb, 0.5)) <= 1e-10
    for t in (0.5 - 2e-3, 0.5 + 2e-3):
        assert quantifiers.negativity(states.beam_splitter(tb, t)) > 1e-10


def test_quantifiers_respect_mode_exchange():
    st = states.attenuate(
        states.beam_splitter(
            states.twin_beam(0.9, bs=0.1, bi=0.04), 0.85, phi=0.7
        ),
        0.95,
        0.9,
    )
    swapped = states.TwoModeGaussianState(
        st.b2, st.b1, st.c2, st.c1, st.d12, np.conj(st.dbar12)
    )
    assert quantifiers.negativity(st) > 0.1  # the fixture is entangled
    assert quantifiers.negativity(swapped) == pytest.approx(
        quantifiers.negativity(st), rel=1e-12
    )
    assert quantifiers.local_quantifier(swapped, 2) == pytest.approx(
        quantifiers.local_quantifier(st, 1), rel=1e-12
    )
    assert quantifiers.local_quantifier(swapped, 1) == pytest.approx(
        quantifiers.local_quantifier(st, 2), rel=1e-12
    )


@pytest.mark.parametrize("bp", [0.5, 1.0, 2.0])
def test_local_quantifier_reference_values(bp):
    """Thermal marginals sit below zero; the balanced splitter output
    carries single-mode squeezing worth exactly the pump strength."""
    tb = states.twin_beam(bp)
    out = states.beam_splitter(tb, 0.5)
    for mode in (1, 2):
        assert quantifiers.local_quantifier(tb, mode) == pytest.approx(
            -(bp**2), rel=1e-12
        )
        assert quantifiers.local_quantifier(out, mode) == pytest.approx(
            bp, rel=1e-11
        )


def test_classification_of_the_twin_beam():
    rep = quantifiers.classify(states.twin_beam(1.0))
    assert rep.entangled
    assert rep.locally_nonclassical == (False, False)
    assert rep.negativity == pytest.approx(math.sqrt(2.0) + 1.0, rel=1e-10)
    assert rep.i_ncl_1 == pytest.approx(-1.0, rel=1e-12)


def test_classification_of_the_balanced_output():
    rep = quantifiers.classify(states.beam_splitter(states.twin_beam(1.0), 0.5))
    assert not rep.entangled
    assert rep.locally_nonclassical == (True, True)
    assert rep.i_ncl_1 == pytest.approx(1.0, rel=1e-10)
    assert rep.i_ncl_2 == pytest.approx(1.0, rel=1e-10)


def test_classification_verdicts_follow_the_tolerance():
    out = states.beam_splitter(states.twin_beam(1.0), 0.5)
    strict = quantifiers.classify(out, tol=2.0)
    assert strict.locally_nonclassical == (False, False)
    assert not strict.entangled


def test_vacuum_is_classical_everywhere():
    rep = quantifiers.classify(states.twin_beam(0.0))
    assert not rep.entangled
    assert rep.locally_nonclassical == (False, False)
    assert rep.negativity == 0.0


def test_loss_never_creates_entanglement():
    rng = np.random.default_rng(4)
    for _ in range(5):
        bp = rng.uniform(0.2, 3.0)
        st = states.twin_beam(bp, bs=rng.uniform(0, 0.2), bi=rng.uniform(0, 0.2))
        full = quantifiers.negativity(st)
        lossy = quantifiers.negativity(states.attenuate(st, 0.7, 0.6))
        assert lossy <= full + 1e-12
