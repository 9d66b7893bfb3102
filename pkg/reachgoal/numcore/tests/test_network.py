# ############################################################################### #
# Reachability Goals : unsupervised goal-conditioned agent
#
# SPDX - License - Identifier: GPL-3.0-or-later
# ############################################################################### #
"""
Tests for the flat-parameter networks and their gradients
"""
from unittest import TestCase

import numpy as np
import numpy.testing as npt
from parameterized import parameterized

from reachgoal.exceptions import NonFiniteLossError
from reachgoal.numcore.gradcheck import GRADCHECK_TOLERANCE, check_gradient
from reachgoal.numcore.losses import mean_bce_loss, mean_squared_loss
from reachgoal.numcore.network import NetParams, NetSpec, net_forward, net_gradient, net_init


def random_batch(spec: NetSpec, size: int, rng: np.random.Generator, binary: bool = False):
    inputs = rng.normal(size=(size, spec.input_size))
    if binary:
        targets = rng.integers(0, 2, size=(size, spec.output_size)).astype(float)
    else:
        targets = rng.normal(size=(size, spec.output_size))
    return inputs, targets


class TestNetSpec(TestCase):
    """
    Test NetSpec validation
    """

    @parameterized.expand([((3, ), ), ((3, 0, 1), ), ((), )])
    def test_invalid_layouts(self, sizes):
        """
        Test: ValueError is raised
        When: fewer than two layers or a non-positive size is given
        """
        with self.assertRaises(ValueError):
            NetSpec(sizes)

    def test_parameter_count(self):
        """
        Test: Weights and biases of every layer are counted
        When: a 3 -> 4 -> 2 network is described
        """
        self.assertEqual(NetSpec((3, 4, 2)).num_params, 3 * 4 + 4 + 4 * 2 + 2)


class TestNetInit(TestCase):
    """
    Test net_init
    """

    def test_same_seed_same_params(self):
        """
        Test: Parameters are identical
        When: the same seed is used twice
        """
        spec = NetSpec((5, 64, 64, 16))
        self.assertEqual(net_init(spec, 4), net_init(spec, 4))
        self.assertNotEqual(net_init(spec, 4), net_init(spec, 5))

    def test_biases_zero_and_weights_in_bounds(self):
        """
        Test: Biases are zero and every weight lies inside the Glorot bound
        When: a 100 -> 100 layer is initialised (10^4 weights)
        """
        params = net_init(NetSpec((100, 100)), 0)
        ((weights, bias), ) = list(params.layers())
        bound = np.sqrt(6.0 / 200)
        npt.assert_array_equal(bias, 0.0)
        self.assertLessEqual(np.max(np.abs(weights)), bound)
        # the sample should spread over most of the range
        self.assertGreater(np.max(np.abs(weights)), 0.95 * bound)


class TestNetForward(TestCase):
    """
    Test net_forward
    """

    def test_zero_weights_output_bias(self):
        """
        Test: The output equals the output bias
        When: every weight is zero
        """
        params = NetParams(NetSpec((3, 4, 2)), np.zeros(NetSpec((3, 4, 2)).num_params))
        *_, (_, output_bias) = list(params.layers())
        output_bias[...] = [0.25, -1.5]
        npt.assert_array_equal(net_forward(params, [1.0, 2.0, 3.0]), [0.25, -1.5])

    def test_single_linear_layer(self):
        """
        Test: A one-layer network computes x W + b
        When: weights and bias are set explicitly
        """
        params = NetParams(NetSpec((2, 2)), np.zeros(6))
        ((weights, bias), ) = list(params.layers())
        weights[...] = [[1.0, 2.0], [3.0, 4.0]]
        bias[...] = [0.5, -0.5]
        npt.assert_allclose(net_forward(params, [1.0, -1.0]), [-1.5, -2.5])

    def test_batch_matches_rows(self):
        """
        Test: Batched evaluation equals row-by-row evaluation
        When: random inputs in [-10, 10] are used
        """
        params = net_init(NetSpec((4, 8, 3)), 1)
        inputs = np.random.default_rng(2).uniform(-10, 10, size=(20, 4))
        outputs = net_forward(params, inputs)
        self.assertTrue(np.all(np.isfinite(outputs)))
        for row, output in zip(inputs, outputs):
            npt.assert_allclose(net_forward(params, row), output)

    def test_length_mismatch(self):
        """
        Test: ValueError is raised
        When: the input has the wrong length
        """
        with self.assertRaises(ValueError):
            net_forward(net_init(NetSpec((4, 3)), 0), np.zeros(5))


class TestNetGradient(TestCase):
    """
    Test net_gradient against central finite differences
    """

    @parameterized.expand([(seed, ) for seed in range(5)])
    def test_squared_loss_gradient(self, seed):
        """
        Test: The analytic gradient matches finite differences within the tolerance
        When: random small networks are trained on a squared loss
        """
        rng = np.random.default_rng(seed)
        spec = NetSpec((3, 5, 4, 2))
        params = net_init(spec, rng)
        batch = random_batch(spec, 7, rng)
        error = check_gradient(lambda flat: net_gradient(params.with_flat(flat), mean_squared_loss, batch),
                               params.flat)
        self.assertLess(error, GRADCHECK_TOLERANCE)

    @parameterized.expand([(seed, ) for seed in range(5)])
    def test_bce_gradient(self, seed):
        """
        Test: The analytic gradient matches finite differences within the tolerance
        When: random small networks are trained on binary cross-entropy
        """
        rng = np.random.default_rng(100 + seed)
        spec = NetSpec((4, 6, 1))
        params = net_init(spec, rng)
        batch = random_batch(spec, 9, rng, binary=True)
        error = check_gradient(lambda flat: net_gradient(params.with_flat(flat), mean_bce_loss, batch), params.flat)
        self.assertLess(error, GRADCHECK_TOLERANCE)

    def test_symmetric_residuals_cancel_on_output_bias(self):
        """
        Test: The output bias gradient is zero
        When: all weights are zero and the targets are +1 and -1
        """
        spec = NetSpec((2, 3, 1))
        params = NetParams(spec, np.zeros(spec.num_params))
        batch = (np.array([[1.0, 2.0], [-1.0, -2.0]]), np.array([[1.0], [-1.0]]))
        _, grad = net_gradient(params, mean_squared_loss, batch)
        *_, (_, bias_grad) = list(params.with_flat(grad).layers())
        npt.assert_array_equal(bias_grad, 0.0)

    def test_constant_loss_zero_gradient(self):
        """
        Test: The gradient is the zero vector
        When: the loss does not depend on the outputs
        """
        spec = NetSpec((3, 4, 2))
        params = net_init(spec, 0)
        batch = random_batch(spec, 5, np.random.default_rng(0))
        loss, grad = net_gradient(params, lambda outputs, _: (1.0, np.zeros_like(outputs)), batch)
        self.assertEqual(loss, 1.0)
        npt.assert_array_equal(grad, 0.0)

    def test_non_finite_loss_raises(self):
        """
        Test: NonFiniteLossError is raised
        When: the loss function returns NaN
        """
        spec = NetSpec((3, 2))
        params = net_init(spec, 0)
        batch = random_batch(spec, 2, np.random.default_rng(0))
        with self.assertRaises(NonFiniteLossError):
            net_gradient(params, lambda outputs, _: (float("nan"), np.zeros_like(outputs)), batch)
