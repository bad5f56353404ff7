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
"""Unit tests for modality fusion."""
from typing   import Callable
from unittest import TestCase

import numpy as np
from numpy.testing import assert_allclose, assert_array_equal

from pyMultimodalRNN.Exception import ShapeError, ModeError, ParameterError, ConsistencyError
from pyMultimodalRNN.Numeric   import CreateGenerator, InitScheme
from pyMultimodalRNN.Parameter import ParameterStore
from pyMultimodalRNN.Fusion    import FusionMode, FusionConfig, FusionParameters, Fuse, FuseBackward, AlignLossGradient


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


class Configuration(TestCase):
	def test_Parse(self) -> None:
		self.assertIs(FusionMode.Concat, FusionMode.Parse("concat"))
		self.assertIs(FusionMode.SharedSpace, FusionMode.Parse("shared"))
		self.assertIs(FusionMode.SharedSpace, FusionMode.Parse("shared_space"))
		self.assertIs(FusionMode.Projection, FusionMode.Parse("Project"))

	def test_ParseUnknown(self) -> None:
		with self.assertRaises(ParameterError):
			FusionMode.Parse("sum")

	def test_OutputDim(self) -> None:
		self.assertEqual(20, FusionConfig("concat").OutputDim(16, 4))
		self.assertEqual(8, FusionConfig("shared", sharedDim=8).OutputDim(16, 4))
		self.assertEqual(16, FusionConfig("project", sharedDim=8).OutputDim(16, 4))

	def test_Invalid(self) -> None:
		with self.assertRaises(ParameterError):
			FusionConfig(sharedDim=0)
		with self.assertRaises(ParameterError):
			FusionConfig(lambdaAlign=-0.1)

	def test_Str(self) -> None:
		self.assertEqual("concat", str(FusionConfig()))
		self.assertEqual("shared(8)", str(FusionConfig("shared", sharedDim=8)))
		self.assertEqual("project", str(FusionMode.Projection))


class Forward(TestCase):
	def test_Concat(self) -> None:
		config = FusionConfig("concat")
		params = FusionParameters.Create(ParameterStore(), config, 2, 1, 1)

		fused, align = Fuse(np.array([1.0, 2.0]), np.array([3.0]), config, params)

		assert_array_equal(np.array([1.0, 2.0, 3.0]), fused)
		self.assertEqual(0.0, float(align))

	def test_SharedWithZeroParameters(self) -> None:
		config = FusionConfig("shared", sharedDim=3)
		store = ParameterStore()
		params = FusionParameters.Create(store, config, 2, 2, 1)
		store["fusion.W"][...] = 0.0

		fused, _ = Fuse(np.ones(2), np.ones(2), config, params)

		assert_array_equal(np.zeros(3), fused)

	def test_ProjectionAligned(self) -> None:
		config = FusionConfig("project", sharedDim=3)
		store = ParameterStore()
		params = FusionParameters.Create(store, config, 2, 2, 1)
		store["fusion.W_g"][...] = store["fusion.W_f"]
		frames = CreateGenerator(2).standard_normal((4, 2))

		fused, align = Fuse(frames, frames, config, params)

		self.assertEqual((4, 6), fused.shape)
		assert_array_equal(np.zeros(4), align)

	def test_ProjectionAlignmentLoss(self) -> None:
		config = FusionConfig("project", sharedDim=1)
		store = ParameterStore()
		params = FusionParameters.Create(store, config, 1, 1, 1)
		store["fusion.W_f"][...] = 2.0
		store["fusion.W_g"][...] = 1.0

		fused, align = Fuse(np.array([1.0]), np.array([0.5]), config, params)

		assert_array_equal(np.array([2.0, 0.5]), fused)
		self.assertEqual(2.25, float(align))

	def test_RowsAreIndependent(self) -> None:
		config = FusionConfig("shared", sharedDim=3)
		params = FusionParameters.Create(ParameterStore(), config, 2, 2, 1, InitScheme.GlorotNormal())
		generator = CreateGenerator(3)
		visual, audio = generator.standard_normal((5, 2)), generator.standard_normal((5, 2))

		fused, _ = Fuse(visual, audio, config, params)
		for row in range(5):
			assert_allclose(fused[row], Fuse(visual[row], audio[row], config, params)[0], rtol=0, atol=1e-12)

	def test_VisualWidthMismatch(self) -> None:
		config = FusionConfig()
		params = FusionParameters.Create(ParameterStore(), config, 2, 1, 1)

		with self.assertRaises(ShapeError) as context:
			Fuse(np.ones(3), np.ones(1), config, params)

		self.assertEqual("visual", context.exception.LeftName)

	def test_FrameCountMismatch(self) -> None:
		config = FusionConfig()
		params = FusionParameters.Create(ParameterStore(), config, 2, 1, 1)

		with self.assertRaises(ShapeError):
			Fuse(np.ones((3, 2)), np.ones((4, 1)), config, params)


class Backward(TestCase):
	def test_AllModes(self) -> None:
		for mode in FusionMode:
			with self.subTest(mode=str(mode)):
				config = FusionConfig(mode, sharedDim=3)
				store = ParameterStore()
				params = FusionParameters.Create(store, config, 4, 2, 1, InitScheme.Normal(0.0, 0.5))
				generator = CreateGenerator(2)
				visual, audio = generator.standard_normal((3, 4)), generator.standard_normal((3, 2))
				weight = generator.standard_normal((3, config.OutputDim(4, 2)))
				alignWeight = generator.standard_normal(3)

				def loss() -> float:
					fused, align = Fuse(visual, audio, config, params)
					return float(np.sum(weight * fused) + np.sum(alignWeight * align))

				store.ZeroGradients()
				gradVisual, gradAudio = FuseBackward(visual, audio, weight, alignWeight, config, params)

				assert_allclose(gradVisual, _NumericGradient(loss, visual), rtol=1e-6, atol=1e-8)
				assert_allclose(gradAudio, _NumericGradient(loss, audio), rtol=1e-6, atol=1e-8)
				for name, value in store:
					assert_allclose(store.Gradient(name), _NumericGradient(loss, value), rtol=1e-6, atol=1e-8, err_msg=name)


class Alignment(TestCase):
	def test_Gradient(self) -> None:
		config = FusionConfig("project", sharedDim=3)
		params = FusionParameters.Create(ParameterStore(), config, 4, 2, 1, InitScheme.Normal(0.0, 0.5))
		generator = CreateGenerator(2)
		visual, audio = generator.standard_normal((5, 4)), generator.standard_normal((5, 2))

		def loss() -> float:
			return float(np.sum(Fuse(visual, audio, config, params)[1]))

		gradients = AlignLossGradient(visual, audio, config, params)

		for symbol in ("W_f", "b_f", "W_g", "b_g"):
			assert_allclose(gradients[symbol], _NumericGradient(loss, params[symbol]), rtol=1e-6, atol=1e-8, err_msg=symbol)
		assert_allclose(gradients["visual"], _NumericGradient(loss, visual), rtol=1e-6, atol=1e-8)
		assert_allclose(gradients["audio"], _NumericGradient(loss, audio), rtol=1e-6, atol=1e-8)

	def test_NotAccumulated(self) -> None:
		config = FusionConfig("project", sharedDim=3)
		store = ParameterStore()
		params = FusionParameters.Create(store, config, 2, 2, 1)

		AlignLossGradient(np.ones(2), np.zeros(2), config, params)

		self.assertEqual(0.0, store.GradientNorm())

	def test_WrongMode(self) -> None:
		for mode in ("concat", "shared"):
			config = FusionConfig(mode)
			params = FusionParameters.Create(ParameterStore(), config, 2, 2, 1)

			with self.assertRaises(ModeError) as context:
				AlignLossGradient(np.ones(2), np.ones(2), config, params)

			self.assertEqual("project", context.exception.Expected)
			self.assertEqual(mode, context.exception.Actual)


class Validation(TestCase):
	def test_Matching(self) -> None:
		config = FusionConfig("project", sharedDim=3)
		store = ParameterStore()
		FusionParameters.Create(store, config, 2, 2, 1)

		FusionParameters(store, 2, 2).Validate(config)

	def test_ModeMismatch(self) -> None:
		store = ParameterStore()
		FusionParameters.Create(store, FusionConfig("shared"), 2, 2, 1)

		with self.assertRaises(ConsistencyError):
			FusionParameters(store, 2, 2).Validate(FusionConfig("project"))

	def test_ShapeMismatch(self) -> None:
		store = ParameterStore()
		FusionParameters.Create(store, FusionConfig("shared", sharedDim=4), 2, 2, 1)

		with self.assertRaises(ConsistencyError):
			FusionParameters(store, 2, 2).Validate(FusionConfig("shared", sharedDim=5))
