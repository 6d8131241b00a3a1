# SPDX-License-Identifier: GPL-3.0+

import os
import unittest

import numpy as np

from floq import LatticeSpec, even_site_losses, validate


FREQUENCY = 20.0


def chain(n_sites, losses=(), left_ratio=0.0, right_ratio=0.0, frequency=FREQUENCY):
    """Validated chain with v = 1 and the given even-site losses and drives."""
    return validate(
        LatticeSpec(
            n_sites,
            1.0,
            left_ratio * frequency,
            right_ratio * frequency,
            frequency,
            even_site_losses(n_sites, losses),
        )
    )


def undriven(n_sites, losses=()):
    return validate(LatticeSpec(n_sites, loss=even_site_losses(n_sites, losses)))


# Single-end drive at A1/omega = 1: A1 = 20, A2 = 0, omega = 20, v = 1, alpha_2 = 1.
CASE_I = chain(3, (1.0,), left_ratio=1.0)


def count_maxima(values):
    values = np.asarray(values)
    inner = values[1:-1]
    return int(np.sum((inner > values[:-2]) & (inner > values[2:])))


class TestCase(unittest.TestCase):
    def assertAllClose(self, actual, expected, atol=1e-12, rtol=0.0, msg=None):
        actual = np.asarray(actual)
        expected = np.asarray(expected)
        if not np.allclose(actual, expected, rtol=rtol, atol=atol):
            worst = float(np.max(np.abs(actual - expected)))
            standard = f"max deviation {worst:.3g} exceeds atol={atol:g}"
            self.fail(self._formatMessage(msg, standard))


class LongRunTestCase(TestCase):
    def setUp(self):
        # Full-resolution sweeps and lifetime studies take tens of seconds
        # each, so they only run when asked for.
        try:
            run_tests = int(os.environ["FLOQ_RUN_LONG_TESTS"]) != 0
        except (KeyError, ValueError):
            run_tests = False
        if not run_tests:
            self.skipTest("long test (run with env FLOQ_RUN_LONG_TESTS=1)")
