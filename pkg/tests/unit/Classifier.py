# ==================================================================================================================== #
#   pyMultimodalRNN                                                                                                    #
#   Multimodal recurrent sequence classification with hand-derived gradients                                           #
# ==================================================================================================================== #
# Authors:                                                                                                             #
#   pyMultimodalRNN contributors                                                                                       #
#                                                                                                                      #
# License:                                                                                                             #
# ==================================================================================================================== #
# Copyright 2024-2026 pyMultimodalRNN contributors                                                                     #
#                                                                                                                      #
# Licensed under the Apache License, Version 2.0 (the "License");                                                      #
# you may not use this file except in compliance with the License.                                                     #
# You may obtain a copy of the License at                                                                              #
#                                                                                                                      #
#   http://www.apache.org/licenses/LICENSE-2.0                                                                         #
#                                                                                                                      #
# Unless required by applicable law or agreed to in writing, software                                                  #
# distributed under the License is distributed on an "AS IS" BASIS,                                                    #
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.                                             #
# See the License for the specific language governing permissions and                                                  #
# limitations under the License.                                                                                       #
#                                                                                                                      #
# SPDX-License-Identifier: Apache-2.0                                                                                  #
# ==================================================================================================================== #
#
"""Unit tests for the scoring head and the loss."""
from math     import log
from unittest import TestCase

import numpy as np
from numpy.testing import assert_allclose, assert_array_equal

from pyMultimodalRNN.Exception  import ShapeError, NumericError, ParameterError, ConsistencyError
from pyMultimodalRNN.Numeric    import CreateGenerator, InitScheme, Sigmoid
from pyMultimodalRNN.Parameter  import ParameterStore
from pyMultimodalRNN.Classifier import CreateLabelSet, LabelVector, HeadParameters, PredictLogits, PredictScores, HeadBackward
from pyMultimodalRNN.Classifier import BCELoss, BCELossGradient, TotalLoss


if __name__ == "__main__":  # pragma: no cover
	print("ERROR: you called a testcase declaration file as an executable module.")
	print("Use: 'python -m unitest <testcase module>'")
	exit(1)


class Labels(TestCase):
	def test_Create(self) -> None:
		self.assertEqual(frozenset({0, 3}), CreateLabelSet([3, 0], 4))
		self.assertEqual(frozenset(), CreateLabelSet([], 4))

	def test_Duplicates(self) -> None:
		with self.assertRaises(ParameterError):
			CreateLabelSet([1, 1], 4)

	def test_OutOfRange(self) -> None:
		with self.assertRaises(ParameterError):
			CreateLabelSet([4], 4)
		with self.assertRaises(ParameterError):
			CreateLabelSet([-1], 4)

	def test_EmptyForbidden(self) -> None:
		with self.assertRaises(ParameterError):
			CreateLabelSet([], 4, allowEmpty=False)

	def test_Vector(self) -> None:
		assert_array_equal(np.array([1.0, 0.0, 0.0, 1.0]), LabelVector(frozenset({0, 3}), 4))


class Head(TestCase):
	def test_ZeroWeightsScoreOneHalf(self) -> None:
		store = ParameterStore()
		params = HeadParameters.Create(store, 3, 5, InitScheme.GlorotNormal(), 1)
		store["head.W"][...] = 0.0

		assert_array_equal(np.full(3, 0.5), PredictScores(CreateGenerator(2).standard_normal(5), params))

	def test_ScoresInOpenInterval(self) -> None:
		params = HeadParameters.Create(ParameterStore(), 4, 6, InitScheme.GlorotNormal(), 1)

		scores = PredictScores(CreateGenerator(2).standard_normal((10, 6)), params)

		self.assertEqual((10, 4), scores.shape)
		self.assertTrue(np.all((scores > 0.0) & (scores < 1.0)))

	def test_WidthMismatch(self) -> None:
		params = HeadParameters.Create(ParameterStore(), 3, 5, InitScheme.GlorotNormal(), 1)

		with self.assertRaises(ShapeError) as context:
			PredictScores(np.ones(4), params)

		self.assertEqual("predict_scores", context.exception.Operation)

	def test_NoClasses(self) -> None:
		with self.assertRaises(ParameterError):
			HeadParameters.Create(ParameterStore(), 0, 5, InitScheme.GlorotNormal(), 1)

	def test_Validate(self) -> None:
		store = ParameterStore()
		params = HeadParameters.Create(store, 3, 5, InitScheme.GlorotNormal(), 1)

		params.Validate(3, 5)
		with self.assertRaises(ConsistencyError):
			params.Validate(3, 6)

	def test_Backward(self) -> None:
		store = ParameterStore()
		params = HeadParameters.Create(store, 3, 4, InitScheme.GlorotNormal(), 1)
		generator = CreateGenerator(2)
		representation = generator.standard_normal((5, 4))
		gradLogits = generator.standard_normal((5, 3))

		gradRepresentation = HeadBackward(representation, gradLogits, params)

		assert_allclose(gradRepresentation, gradLogits @ params.W, rtol=0, atol=1e-12)
		assert_allclose(store.Gradient("head.W"), gradLogits.T @ representation, rtol=0, atol=1e-12)
		assert_allclose(store.Gradient("head.b"), gradLogits.sum(axis=0), rtol=0, atol=1e-12)

	def test_AccumulateAddsIntoStore(self) -> None:
		store = ParameterStore()
		params = HeadParameters.Create(store, 2, 3, InitScheme.GlorotNormal(), 1)
		store.ZeroGradients()

		params.Accumulate("W", np.ones((2, 3)))
		params.Accumulate("W", np.ones((2, 3)))
		params.Accumulate("b", np.array([1.0, -1.0]))

		assert_array_equal(np.full((2, 3), 2.0), store.Gradient("head.W"))
		assert_array_equal(np.array([1.0, -1.0]), store.Gradient("head.b"))
		with self.assertRaises(ConsistencyError):
			params.Accumulate("b", np.ones(3))


class Loss(TestCase):
	def test_OneHalfScores(self) -> None:
		loss = BCELoss(np.full(4, 0.5), np.array([1.0, 0.0, 1.0, 0.0]))

		self.assertAlmostEqual(log(2.0), float(loss), places=12)

	def test_PerfectScoresAreClamped(self) -> None:
		loss = BCELoss(np.array([1.0, 0.0]), np.array([1.0, 0.0]))

		self.assertTrue(np.isfinite(loss))
		self.assertLess(float(loss), 1e-11)

	def test_WrongScoresStayFinite(self) -> None:
		loss = BCELoss(np.array([0.0, 1.0]), np.array([1.0, 0.0]))

		self.assertTrue(np.isfinite(loss))
		self.assertAlmostEqual(-log(1e-12), float(loss), places=6)

	def test_NaNScores(self) -> None:
		with self.assertRaises(NumericError) as context:
			BCELoss(np.array([np.nan, 0.5]), np.array([1.0, 0.0]))

		self.assertEqual("scores", context.exception.TensorName)

	def test_PerRow(self) -> None:
		scores = np.array([[0.5, 0.5], [0.9, 0.2]])
		truth = np.array([[1.0, 0.0], [1.0, 0.0]])

		loss = BCELoss(scores, truth)

		self.assertEqual((2, ), loss.shape)
		assert_allclose(loss[1], -(log(0.9) + log(0.8)) / 2.0, rtol=0, atol=1e-12)

	def test_LogitGradient(self) -> None:
		logits = CreateGenerator(3).standard_normal(5)
		truth = np.array([1.0, 0.0, 0.0, 1.0, 0.0])
		step = 1e-6

		numeric = np.zeros(5)
		for index in range(5):
			plus, minus = logits.copy(), logits.copy()
			plus[index] += step
			minus[index] -= step
			numeric[index] = (float(BCELoss(Sigmoid(plus), truth)) - float(BCELoss(Sigmoid(minus), truth))) / (2.0 * step)

		assert_allclose(BCELossGradient(Sigmoid(logits), truth), numeric, rtol=1e-6, atol=1e-9)

	def test_Total(self) -> None:
		self.assertAlmostEqual(0.7, TotalLoss(0.5, 2.0, 0.1), places=12)
		self.assertEqual(0.5, TotalLoss(0.5, 2.0, 0.0))

	def test_LogitsAreAffine(self) -> None:
		store = ParameterStore()
		params = HeadParameters.Create(store, 2, 2, InitScheme.GlorotNormal(), 1)
		store["head.W"][...] = [[1.0, 0.0], [0.0, 2.0]]
		store["head.b"][...] = [0.5, -0.5]

		assert_array_equal(np.array([1.5, 3.5]), PredictLogits(np.array([1.0, 2.0]), params))
