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
"""Unit tests for Adam, the learning-rate schedule, gradient assembly and the training loop."""
from typing   import List
from unittest import TestCase

import numpy as np
from numpy.testing import assert_allclose, assert_array_equal

from pyMultimodalRNN.Exception  import ConsistencyError, ParameterError, TrainingAbortedError
from pyMultimodalRNN.Numeric    import CreateGenerator, Sigmoid
from pyMultimodalRNN.Parameter  import ParameterStore
from pyMultimodalRNN.Encoder    import EncoderConfig
from pyMultimodalRNN.Fusion     import FusionConfig
from pyMultimodalRNN.Classifier import LabelVector
from pyMultimodalRNN            import ModelConfig, MultimodalModel
from pyMultimodalRNN.Dataset    import DatasetSpec, FrameExample, GenerateSynthetic
from pyMultimodalRNN.Training   import AdamHyperParameters, AdamState, AdamStep, LearningRateSchedule, TrainingConfig
from pyMultimodalRNN.Training   import ComputeLoss, ComputeGradients, ClipGlobalNorm, FiniteDifferenceCheck, EpochRecord, Train


if __name__ == "__main__":  # pragma: no cover
	print("ERROR: you called a testcase declaration file as an executable module.")
	print("Use: 'python -m unitest <testcase module>'")
	exit(1)


def _Examples(numVideos: int = 6, seed: int = 1) -> List[FrameExample]:
	spec = DatasetSpec(numVideos=numVideos, numClasses=4, numFrames=5, visualDim=3, audioDim=2, labelsPerVideo=1.5, seed=seed, testFraction=0.0)
	return GenerateSynthetic(spec).Examples


def _Variants() -> List[ModelConfig]:
	return [
		ModelConfig("video", 3, 2, 4, fusion=FusionConfig("concat")),
		ModelConfig("video", 3, 2, 4, fusion=FusionConfig("project", sharedDim=2, lambdaAlign=0.5)),
		ModelConfig("frame", 3, 2, 4, EncoderConfig("gru", 3, 2, True), FusionConfig("concat"), attention=True, embedDim=4),
		ModelConfig("frame", 3, 2, 4, EncoderConfig("lstm", 3, 1, True), FusionConfig("shared", sharedDim=3), attention=False),
		ModelConfig("frame", 3, 2, 4, EncoderConfig("lstm", 2, 2, False), FusionConfig("project", sharedDim=2, lambdaAlign=0.1), attention=True),
		ModelConfig("frame", 3, 2, 4, EncoderConfig("gru", 2, 1, False), FusionConfig("shared", sharedDim=3), attention=False),
	]


class Adam(TestCase):
	def test_ZeroGradientKeepsParameters(self) -> None:
		parameters = {"w": np.array([1.0, -2.0, 3.0])}
		state = AdamState.Create(parameters)

		AdamStep(parameters, {"w": np.zeros(3)}, state, AdamHyperParameters(), 0.01)

		assert_array_equal(np.array([1.0, -2.0, 3.0]), parameters["w"])
		self.assertEqual(1, state.T)

	def test_FirstStepMagnitude(self) -> None:
		parameters = {"w": np.zeros(3)}
		state = AdamState.Create(parameters)

		AdamStep(parameters, {"w": np.array([0.5, -2.0, 3.0])}, state, AdamHyperParameters(), 0.01)

		assert_allclose(parameters["w"], [-0.01, 0.01, -0.01], rtol=1e-6)

	def test_ConstantGradientTrajectory(self) -> None:
		gradient = np.array([0.5, -2.0])
		parameters = {"w": np.array([1.0, 1.0])}
		state = AdamState.Create(parameters)
		hyper = AdamHyperParameters()

		for _ in range(100):
			AdamStep(parameters, {"w": gradient}, state, hyper, 0.001)

		expected = 1.0 - 100 * 0.001 * gradient / (np.abs(gradient) + hyper.Epsilon)
		assert_allclose(parameters["w"], expected, rtol=1e-9)
		self.assertEqual(100, state.T)

	def test_NameMismatch(self) -> None:
		parameters = {"w": np.zeros(2)}
		state = AdamState.Create(parameters)

		with self.assertRaises(ConsistencyError):
			AdamStep(parameters, {"v": np.zeros(2)}, state, AdamHyperParameters(), 0.01)

	def test_ShapeMismatch(self) -> None:
		parameters = {"w": np.zeros(2)}
		state = AdamState.Create(parameters)

		with self.assertRaises(ConsistencyError):
			AdamStep(parameters, {"w": np.zeros(3)}, state, AdamHyperParameters(), 0.01)

	def test_InvalidHyperParameters(self) -> None:
		for arguments in ({"alpha": 0.0}, {"mu": 1.0}, {"v": -0.1}, {"epsilon": 0.0}):
			with self.subTest(**arguments):
				with self.assertRaises(ParameterError):
					AdamHyperParameters(**arguments)

	def test_DictRoundtrip(self) -> None:
		hyper = AdamHyperParameters(0.01, 0.8, 0.99, 1e-7)

		self.assertEqual(hyper.ToDict(), AdamHyperParameters.FromDict(hyper.ToDict()).ToDict())


class Schedule(TestCase):
	def test_Decay(self) -> None:
		schedule = LearningRateSchedule(0.01, 0.95, 1000)

		self.assertEqual(0.01, schedule.LearningRateAtStep(0))
		self.assertEqual(0.01, schedule.LearningRateAtStep(999))
		self.assertAlmostEqual(0.01 * 0.95, schedule.LearningRateAtStep(1000), places=15)
		self.assertAlmostEqual(0.01 * 0.95 ** 3, schedule.LearningRateAtStep(3000), places=15)

	def test_Monotone(self) -> None:
		schedule = LearningRateSchedule(0.01, 0.9, 7, lateDecaySteps=3, switchStep=20)
		rates = [schedule.LearningRateAtStep(step) for step in range(100)]

		self.assertTrue(all(later <= earlier for earlier, later in zip(rates, rates[1:])))

	def test_LateInterval(self) -> None:
		schedule = LearningRateSchedule(0.01, 0.95, 1000, lateDecaySteps=500, switchStep=2000)

		self.assertEqual(2, schedule.CompletedIntervals(2000))
		self.assertEqual(3, schedule.CompletedIntervals(2500))
		self.assertEqual(4, schedule.CompletedIntervals(3200))

	def test_NegativeStep(self) -> None:
		with self.assertRaises(ParameterError):
			LearningRateSchedule().LearningRateAtStep(-1)

	def test_Invalid(self) -> None:
		with self.assertRaises(ParameterError):
			LearningRateSchedule(decayFactor=1.5)
		with self.assertRaises(ParameterError):
			LearningRateSchedule(decaySteps=0)

	def test_ConstantWithoutSchedule(self) -> None:
		config = TrainingConfig(adam=AdamHyperParameters(alpha=0.003), schedule=None)

		self.assertEqual(0.003, config.LearningRate(5000))

	def test_ConfigDictRoundtrip(self) -> None:
		config = TrainingConfig(epochs=3, batchSize=4, seed=9, schedule=LearningRateSchedule(0.02, 0.9, 10, 5, 30), clipNorm=5.0)

		self.assertEqual(config.ToDict(), TrainingConfig.FromDict(config.ToDict()).ToDict())


class Gradients(TestCase):
	def test_EmptyBatch(self) -> None:
		model = MultimodalModel.Create(_Variants()[0], 1)

		with self.assertRaises(ParameterError):
			ComputeGradients(model, [])

	def test_LossMatchesComputeLoss(self) -> None:
		model = MultimodalModel.Create(_Variants()[2], 1)
		examples = _Examples()

		self.assertAlmostEqual(ComputeLoss(model, examples), ComputeGradients(model, examples), places=12)

	def test_ZeroesBuffers(self) -> None:
		model = MultimodalModel.Create(_Variants()[0], 1)
		examples = _Examples()

		ComputeGradients(model, examples)
		first = {name: gradient.copy() for name, gradient in model.Store.Gradients.items()}
		ComputeGradients(model, examples)

		for name, gradient in model.Store.Gradients.items():
			assert_array_equal(first[name], gradient)

	def test_LogisticRegressionGradient(self) -> None:
		model = MultimodalModel.Create(_Variants()[0], 2)
		examples = _Examples()

		ComputeGradients(model, examples)

		inputs = np.stack([np.concatenate((example.MeanVisual, example.MeanAudio)) for example in examples])
		truth = np.stack([LabelVector(example.Labels, 4) for example in examples])
		residual = (Sigmoid(inputs @ model.Head.W.T + model.Head.B) - truth) / 4 / len(examples)
		assert_allclose(model.Store.Gradient("head.W"), residual.T @ inputs, rtol=1e-12, atol=1e-15)
		assert_allclose(model.Store.Gradient("head.b"), residual.sum(axis=0), rtol=1e-12, atol=1e-15)

	def test_FiniteDifferences(self) -> None:
		examples = _Examples()
		for config in _Variants():
			with self.subTest(model=str(config)):
				model = MultimodalModel.Create(config, 3)

				errors = FiniteDifferenceCheck(model, examples, samples=30, seed=4)

				self.assertIn("head", errors)
				for group, error in errors.items():
					self.assertLessEqual(error, 1e-4, group)

	def test_MixedLengths(self) -> None:
		examples = _Examples(4)
		generator = CreateGenerator(5)
		examples.append(FrameExample("short", [1], generator.standard_normal((3, 3)), generator.standard_normal((3, 2))))
		model = MultimodalModel.Create(_Variants()[3], 3)

		errors = FiniteDifferenceCheck(model, examples, samples=20, seed=4)

		self.assertLessEqual(max(errors.values()), 1e-4)

	def test_CorruptedGradientDetected(self) -> None:
		model = MultimodalModel.Create(_Variants()[2], 3)
		examples = _Examples()
		ComputeGradients(model, examples)
		doubled = {name: 2.0 * gradient for name, gradient in model.Store.Gradients.items()}

		errors = FiniteDifferenceCheck(model, examples, samples=30, seed=4, analytic=doubled)

		self.assertAlmostEqual(1.0, errors["head"], delta=1e-3)

	def test_ParametersRestored(self) -> None:
		model = MultimodalModel.Create(_Variants()[2], 3)
		before = model.Store.Copy()

		FiniteDifferenceCheck(model, _Examples(), samples=10)

		for name, value in model.Store:
			assert_array_equal(before[name], value)


class Clipping(TestCase):
	def test_Clip(self) -> None:
		store = ParameterStore()
		store.AddVector("head.b", 2)
		store.Accumulate("head.b", np.array([3.0, 4.0]))

		self.assertEqual(5.0, ClipGlobalNorm(store, 1.0))
		assert_allclose(store.Gradient("head.b"), [0.6, 0.8], rtol=0, atol=1e-15)

	def test_BelowLimit(self) -> None:
		store = ParameterStore()
		store.AddVector("head.b", 2)
		store.Accumulate("head.b", np.array([3.0, 4.0]))

		ClipGlobalNorm(store, 10.0)
		assert_array_equal(np.array([3.0, 4.0]), store.Gradient("head.b"))


class Training(TestCase):
	def test_ZeroEpochs(self) -> None:
		model = MultimodalModel.Create(_Variants()[2], 1)
		before = model.Store.Copy()

		log, state = Train(model, _Examples(), TrainingConfig(epochs=0))

		self.assertEqual(0, len(log))
		self.assertEqual(0, state.T)
		for name, value in model.Store:
			assert_array_equal(before[name], value)

	def test_Deterministic(self) -> None:
		config = TrainingConfig(epochs=2, batchSize=4, seed=3)
		examples = _Examples()

		first = MultimodalModel.Create(_Variants()[5], 7)
		second = MultimodalModel.Create(_Variants()[5], 7)
		firstLog, _ = Train(first, examples, config)
		secondLog, _ = Train(second, examples, config)

		self.assertEqual(firstLog.MeanLosses, secondLog.MeanLosses)
		for name, value in first.Store:
			assert_array_equal(value, second.Store[name])

	def test_StepCounter(self) -> None:
		model = MultimodalModel.Create(_Variants()[0], 1)

		log, state = Train(model, _Examples(), TrainingConfig(epochs=3, batchSize=4))

		self.assertEqual(6, state.T)
		self.assertEqual([2, 4, 6], [record.Steps for record in log])

	def test_LossDecreases(self) -> None:
		model = MultimodalModel.Create(_Variants()[0], 1)
		config = TrainingConfig(epochs=20, batchSize=6, adam=AdamHyperParameters(alpha=0.05), schedule=None)

		log, _ = Train(model, _Examples(), config)

		self.assertLess(log.MeanLosses[-1], log.MeanLosses[0])

	def test_ValidationGAP(self) -> None:
		model = MultimodalModel.Create(_Variants()[0], 1)
		examples = _Examples(8)

		log, _ = Train(model, examples[:6], TrainingConfig(epochs=2), validation=examples[6:])

		for gap in log.ValidationGAPs:
			self.assertIsNotNone(gap)
			self.assertGreaterEqual(gap, 0.0)
			self.assertLessEqual(gap, 1.0)

	def test_NonFiniteLossAborts(self) -> None:
		model = MultimodalModel.Create(_Variants()[0], 1)
		model.Store["head.b"][0] = np.nan

		with self.assertRaises(TrainingAbortedError) as context:
			Train(model, _Examples(), TrainingConfig(epochs=1))

		self.assertEqual(0, context.exception.Step)
		self.assertIsNone(context.exception.Checkpoint)
		self.assertEqual("loss", context.exception.TensorName)

	def test_EmptyTrainingSet(self) -> None:
		with self.assertRaises(ParameterError):
			Train(MultimodalModel.Create(_Variants()[0], 1), [], TrainingConfig())

	def test_EpochRecord(self) -> None:
		record = EpochRecord(2, 0.5, None, 0.01, 10, 1.25)

		self.assertEqual("epoch 2: loss 0.500000, GAP n/a, lr 1.000e-02, steps 10, 1.2s", str(record))
		self.assertEqual(0.5, record.ToDict()["mean_loss"])
