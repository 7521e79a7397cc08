"""Shared helpers for the test suite."""

import numpy as np

from twinbeam import states


def random_physical_state(rng, max_pump=3.0):
    """Draw a random physical two-mode Gaussian state.

    Composes the three generators exposed by the package: a noisy twin
    beam, a beam splitter with random transmissivity and phase, and
    unbalanced detection losses.  Every state reachable this way is
    physical by construction.
    """
    tb = states.twin_beam(
        rng.uniform(0.05, max_pump),
        bs=rng.uniform(0.0, 1.0),
        bi=rng.uniform(0.0, 1.0),
    )
    out = states.beam_splitter(
        tb, rng.uniform(0.0, 1.0), phi=rng.uniform(-np.pi, np.pi)
    )
    return states.attenuate(out, rng.uniform(0.3, 1.0), rng.uniform(0.3, 1.0))
