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
"""Unit tests for frame embedding, attention pooling and last-state pooling."""
from math     import exp, tanh
from typing   import Callable
from unittest import TestCase

import numpy as np
from numpy.testing import assert_allclose, assert_array_equal

from pyMultimodalRNN.Exception import ShapeError, EmptySequenceError, ConsistencyError
from pyMultimodalRNN.Numeric   import CreateGenerator
from pyMultimodalRNN.Parameter import ParameterStore
from pyMultimodalRNN.Attention import AttentionParameters, EmbedFrames, EmbedFramesBackward, AttentionPool, AttentionPoolBackward
from pyMultimodalRNN.Attention import LastStatePool, PoolLastStates, PoolLastStatesBackward


if __name__ == "__main__":  # pragma: no cover
	print("ERROR: you called a testcase declaration file as an executable module.")
	print("Use: 'python -m unitest <testcase module>'")
	exit(1)


def _NumericGradient(loss: Callable[[], float], array: np.ndarray, step: float = 1e-6) -> np.ndarray:
	gradient = np.zeros_like(array)
	for index in np.ndindex(array.shape):
		original = array[index]
		array[index] = original + step
		plus = loss()
		array[index] = original - step
		minus = loss()
		array[index] = original
		gradient[index] = (plus - minus) / (2.0 * step)

	return gradient


class Parameters(TestCase):
	def test_Create(self) -> None:
		store = ParameterStore()
		params = AttentionParameters.Create(store, 6, 4, 1)

		self.assertFalse(params.HasEmbedding)
		self.assertEqual((4, 6), params.Ww.shape)
		assert_array_equal(np.zeros(4), params.Bw)
		self.assertTrue(np.any(params.Uw))
		params.Validate(6)

	def test_CreateWithEmbedding(self) -> None:
		store = ParameterStore()
		params = AttentionParameters.Create(store, 6, 4, 1, rawDim=5, embedDim=3)

		self.assertTrue(params.HasEmbedding)
		self.assertEqual((3, 5), params.We.shape)

	def test_ValidateWidth(self) -> None:
		params = AttentionParameters.Create(ParameterStore(), 6, 4, 1)

		with self.assertRaises(ConsistencyError):
			params.Validate(5)

	def test_ValidateMissing(self) -> None:
		with self.assertRaises(ConsistencyError):
			AttentionParameters(ParameterStore()).Validate(6)


class Pooling(TestCase):
	def test_IdenticalRows(self) -> None:
		params = AttentionParameters.Create(ParameterStore(), 3, 4, 1)
		row = np.array([0.5, -1.0, 2.0])

		summary, alphas, _ = AttentionPool(np.tile(row, (5, 1)), params)

		assert_allclose(alphas, np.full(5, 0.2), rtol=0, atol=1e-12)
		assert_allclose(summary, row, rtol=0, atol=1e-12)

	def test_SingleFrame(self) -> None:
		params = AttentionParameters.Create(ParameterStore(), 3, 4, 1)
		hidden = np.array([[0.1, 0.2, 0.3]])

		summary, alphas, _ = AttentionPool(hidden, params)

		assert_array_equal(np.array([1.0]), alphas)
		assert_allclose(summary, hidden[0], rtol=0, atol=1e-15)

	def test_ArgmaxInvariantUnderScaling(self) -> None:
		store = ParameterStore()
		params = AttentionParameters.Create(store, 4, 3, 2)
		hidden = CreateGenerator(6).standard_normal((7, 4))
		context = store["attention.u_w"].copy()

		_, alphas, _ = AttentionPool(hidden, params)
		for scale in (0.5, 2.0, 10.0):
			store["attention.u_w"][...] = scale * context
			_, scaled, _ = AttentionPool(hidden, params)

			with self.subTest(scale=scale):
				self.assertEqual(int(np.argmax(alphas)), int(np.argmax(scaled)))
				assert_array_equal(np.argsort(alphas), np.argsort(scaled))

	def test_ChainOracle(self) -> None:
		store = ParameterStore()
		params = AttentionParameters.Create(store, 2, 2, 3)
		store["attention.b_w"][...] = [0.1, -0.2]
		hidden = CreateGenerator(4).standard_normal((3, 2))

		summary, alphas, _ = AttentionPool(hidden, params)

		Ww, bw, uw = params.Ww, params.Bw, params.Uw
		scores = []
		for t in range(3):
			u = [tanh(sum(float(Ww[a, k]) * float(hidden[t, k]) for k in range(2)) + float(bw[a])) for a in range(2)]
			scores.append(sum(u[a] * float(uw[a]) for a in range(2)))
		total = sum(exp(score) for score in scores)
		expectedAlphas = [exp(score) / total for score in scores]
		expectedSummary = [sum(expectedAlphas[t] * float(hidden[t, k]) for t in range(3)) for k in range(2)]

		assert_allclose(alphas, expectedAlphas, rtol=0, atol=1e-12)
		assert_allclose(summary, expectedSummary, rtol=0, atol=1e-12)

	def test_WeightsSumToOne(self) -> None:
		params = AttentionParameters.Create(ParameterStore(), 4, 3, 1)

		_, alphas, _ = AttentionPool(CreateGenerator(2).standard_normal((6, 7, 4)), params)

		self.assertEqual((6, 7), alphas.shape)
		self.assertTrue(np.all(alphas >= 0.0))
		assert_allclose(np.sum(alphas, axis=-1), np.ones(6), rtol=0, atol=1e-12)

	def test_Empty(self) -> None:
		params = AttentionParameters.Create(ParameterStore(), 3, 4, 1)

		with self.assertRaises(EmptySequenceError):
			AttentionPool(np.zeros((0, 3)), params)

	def test_WidthMismatch(self) -> None:
		params = AttentionParameters.Create(ParameterStore(), 3, 4, 1)

		with self.assertRaises(ShapeError) as context:
			AttentionPool(np.zeros((2, 4)), params)

		self.assertEqual("attention_pool", context.exception.Operation)

	def test_Backward(self) -> None:
		store = ParameterStore()
		params = AttentionParameters.Create(store, 3, 2, 5)
		generator = CreateGenerator(6)
		store["attention.b_w"][...] = generator.standard_normal(2)
		hidden = generator.standard_normal((2, 4, 3))
		weight = generator.standard_normal((2, 3))

		def loss() -> float:
			return float(np.sum(weight * AttentionPool(hidden, params)[0]))

		store.ZeroGradients()
		_, _, tape = AttentionPool(hidden, params)
		gradHidden = AttentionPoolBackward(tape, weight, params)

		assert_allclose(gradHidden, _NumericGradient(loss, hidden), rtol=1e-6, atol=1e-8)
		for name, value in store:
			assert_allclose(store.Gradient(name), _NumericGradient(loss, value), rtol=1e-6, atol=1e-8, err_msg=name)


class Embedding(TestCase):
	def test_Projection(self) -> None:
		assert_array_equal(np.array([[3.0, 7.0]]), EmbedFrames(np.array([[1.0, 1.0]]), np.array([[1.0, 2.0], [3.0, 4.0]])))

	def test_WidthMismatch(self) -> None:
		with self.assertRaises(ShapeError):
			EmbedFrames(np.ones((2, 3)), np.ones((2, 4)))

	def test_Backward(self) -> None:
		store = ParameterStore()
		params = AttentionParameters.Create(store, 3, 2, 1, rawDim=4, embedDim=3)
		generator = CreateGenerator(2)
		raw = generator.standard_normal((5, 4))
		weight = generator.standard_normal((5, 3))

		def loss() -> float:
			return float(np.sum(weight * EmbedFrames(raw, params.We)))

		store.ZeroGradients()
		gradRaw = EmbedFramesBackward(raw, weight, params)

		assert_allclose(gradRaw, _NumericGradient(loss, raw), rtol=1e-6, atol=1e-8)
		assert_allclose(store.Gradient("attention.W_e"), _NumericGradient(loss, params.We), rtol=1e-6, atol=1e-8)


class LastState(TestCase):
	def test_Concatenation(self) -> None:
		assert_array_equal(np.array([1.0, 2.0]), LastStatePool(np.array([1.0]), np.array([2.0])))

	def test_Mismatch(self) -> None:
		with self.assertRaises(ShapeError):
			LastStatePool(np.ones(2), np.ones(3))

	def test_Bidirectional(self) -> None:
		hidden = np.arange(12.0).reshape(3, 4)

		assert_array_equal(np.array([8.0, 9.0, 2.0, 3.0]), PoolLastStates(hidden, True))

	def test_Unidirectional(self) -> None:
		hidden = np.arange(12.0).reshape(3, 4)

		assert_array_equal(hidden[2], PoolLastStates(hidden, False))

	def test_Empty(self) -> None:
		with self.assertRaises(EmptySequenceError):
			PoolLastStates(np.zeros((0, 4)), True)

	def test_BackwardScatter(self) -> None:
		grad = PoolLastStatesBackward((3, 4), np.array([1.0, 2.0, 3.0, 4.0]), True)

		expected = np.zeros((3, 4))
		expected[2, :2] = [1.0, 2.0]
		expected[0, 2:] = [3.0, 4.0]
		assert_array_equal(expected, grad)
