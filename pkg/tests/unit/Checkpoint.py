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
"""Unit tests for checkpoint files and model configurations."""
from json     import dumps, loads
from pathlib  import Path
from tempfile import TemporaryDirectory
from unittest import TestCase

import numpy as np
from numpy.testing import assert_array_equal

from pyMultimodalRNN.Exception  import CheckpointError, ConsistencyError, FormatVersionError, ParameterError
from pyMultimodalRNN.Encoder    import EncoderConfig
from pyMultimodalRNN.Fusion     import FusionConfig
from pyMultimodalRNN            import ModelKind, ModelConfig, MultimodalModel
from pyMultimodalRNN.Dataset    import DatasetSpec, GenerateSynthetic
from pyMultimodalRNN.Checkpoint import SaveCheckpoint, LoadCheckpoint
from pyMultimodalRNN.Training   import AdamState, TrainingConfig, Train


if __name__ == "__main__":  # pragma: no cover
	print("ERROR: you called a testcase declaration file as an executable module.")
	print("Use: 'python -m unitest <testcase module>'")
	exit(1)


def _Config() -> ModelConfig:
	return ModelConfig("frame", 3, 2, 4, EncoderConfig("lstm", 3, 2, True), FusionConfig("project", sharedDim=2, lambdaAlign=0.2), attention=True)


class Configuration(TestCase):
	def test_Defaults(self) -> None:
		config = ModelConfig()

		self.assertIs(ModelKind.FrameLevel, config.ModelKind)
		self.assertEqual(20, config.FusedDim)
		self.assertEqual(20, config.EmbedDim)
		self.assertEqual(32, config.AttentionDim)
		self.assertEqual(32, config.RepresentationDim)

	def test_VideoLevel(self) -> None:
		config = ModelConfig("video", 16, 4, 10, fusion=FusionConfig("shared", sharedDim=8))

		self.assertEqual(8, config.RepresentationDim)

	def test_ModelKindParse(self) -> None:
		self.assertIs(ModelKind.VideoLevel, ModelKind.Parse("video"))
		self.assertIs(ModelKind.FrameLevel, ModelKind.Parse("frame-level"))
		self.assertEqual("frame", str(ModelKind.FrameLevel))
		with self.assertRaises(ParameterError):
			ModelKind.Parse("clip")

	def test_Invalid(self) -> None:
		with self.assertRaises(ParameterError):
			ModelConfig(numClasses=0)
		with self.assertRaises(ParameterError):
			ModelConfig(embedDim=0)

	def test_DictRoundtrip(self) -> None:
		config = _Config()

		self.assertEqual(config.ToDict(), ModelConfig.FromDict(config.ToDict()).ToDict())

	def test_DictMissingKey(self) -> None:
		values = _Config().ToDict()
		del values["hidden"]

		with self.assertRaises(ConsistencyError):
			ModelConfig.FromDict(values)


class Models(TestCase):
	def test_CreateDeterministic(self) -> None:
		first = MultimodalModel.Create(_Config(), 5)
		second = MultimodalModel.Create(_Config(), 5)

		self.assertEqual(first.Store.Names, second.Store.Names)
		for name, value in first.Store:
			assert_array_equal(value, second.Store[name])

	def test_VideoLevelHasNoEncoder(self) -> None:
		model = MultimodalModel.Create(ModelConfig("video", 3, 2, 4), 1)

		self.assertIsNone(model.Encoder)
		self.assertIsNone(model.Attention)
		self.assertEqual(["head.W", "head.b"], model.Store.Names)

	def test_FromStoreMismatch(self) -> None:
		model = MultimodalModel.Create(_Config(), 5)
		other = ModelConfig("frame", 3, 2, 4, EncoderConfig("gru", 3, 2, True), FusionConfig("project", sharedDim=2), attention=True)

		with self.assertRaises(ConsistencyError):
			MultimodalModel.FromStore(other, model.Store)

	def test_ScoreShape(self) -> None:
		examples = GenerateSynthetic(DatasetSpec(numVideos=4, numClasses=4, numFrames=5, visualDim=3, audioDim=2, seed=1)).Examples
		model = MultimodalModel.Create(_Config(), 5)

		scores = model.Score(examples)

		self.assertEqual((4, 4), scores.shape)
		self.assertEqual(np.float64, scores.dtype)
		self.assertTrue(np.all((scores > 0.0) & (scores < 1.0)))


class Files(TestCase):
	def test_Roundtrip(self) -> None:
		examples = GenerateSynthetic(DatasetSpec(numVideos=4, numClasses=4, numFrames=5, visualDim=3, audioDim=2, seed=1)).Examples
		model = MultimodalModel.Create(_Config(), 5)
		config = TrainingConfig(epochs=1, batchSize=2)
		_, state = Train(model, examples, config)

		with TemporaryDirectory() as directory:
			path = SaveCheckpoint(Path(directory) / "model.ckpt", model, state, config.ToDict(), epoch=1)
			checkpoint = LoadCheckpoint(path)

		self.assertEqual(2, checkpoint.Step)
		self.assertEqual(1, checkpoint.Epoch)
		self.assertEqual(config.ToDict(), checkpoint.TrainingConfig)
		self.assertEqual(model.Config.ToDict(), checkpoint.Model.Config.ToDict())
		self.assertEqual(model.Store.Names, checkpoint.Model.Store.Names)
		for name, value in model.Store:
			assert_array_equal(value, checkpoint.Model.Store[name])
			assert_array_equal(state.M[name], checkpoint.AdamM[name])
			assert_array_equal(state.N[name], checkpoint.AdamN[name])
		assert_array_equal(model.Score(examples), checkpoint.Model.Score(examples))

		restored = AdamState.FromCheckpoint(checkpoint)
		self.assertEqual(2, restored.T)

	def test_WithoutOptimizerState(self) -> None:
		model = MultimodalModel.Create(ModelConfig("video", 3, 2, 4), 1)

		with TemporaryDirectory() as directory:
			checkpoint = LoadCheckpoint(SaveCheckpoint(Path(directory) / "model.ckpt", model))

		self.assertIsNone(checkpoint.AdamM)
		self.assertEqual(0, AdamState.FromCheckpoint(checkpoint).T)

	def test_WrittenDuringTraining(self) -> None:
		examples = GenerateSynthetic(DatasetSpec(numVideos=4, numClasses=4, numFrames=5, visualDim=3, audioDim=2, seed=1)).Examples
		model = MultimodalModel.Create(ModelConfig("video", 3, 2, 4), 1)

		with TemporaryDirectory() as directory:
			path = Path(directory) / "model.ckpt"
			_, state = Train(model, examples, TrainingConfig(epochs=2, batchSize=4, checkpointPath=path))
			checkpoint = LoadCheckpoint(path)

		self.assertEqual(2, checkpoint.Epoch)
		self.assertEqual(state.T, checkpoint.Step)

	def test_VersionMismatch(self) -> None:
		model = MultimodalModel.Create(ModelConfig("video", 3, 2, 4), 1)

		with TemporaryDirectory() as directory:
			path = SaveCheckpoint(Path(directory) / "model.ckpt", model)
			with np.load(path) as archive:
				arrays = {name: archive[name] for name in archive.files}
			meta = loads(str(arrays["meta"]))
			meta["version"] = 99
			arrays["meta"] = np.array(dumps(meta))
			with path.open("wb") as file:
				np.savez(file, **arrays)

			with self.assertRaises(FormatVersionError) as context:
				LoadCheckpoint(path)

		self.assertEqual(99, context.exception.Found)

	def test_NotACheckpoint(self) -> None:
		with TemporaryDirectory() as directory:
			path = Path(directory) / "model.ckpt"
			path.write_text("no archive", encoding="utf-8")

			with self.assertRaises(CheckpointError):
				LoadCheckpoint(path)

	def test_MissingTensor(self) -> None:
		model = MultimodalModel.Create(ModelConfig("video", 3, 2, 4), 1)

		with TemporaryDirectory() as directory:
			path = SaveCheckpoint(Path(directory) / "model.ckpt", model)
			with np.load(path) as archive:
				arrays = {name: archive[name] for name in archive.files if name != "param/head.b"}
			with path.open("wb") as file:
				np.savez(file, **arrays)

			with self.assertRaises(CheckpointError):
				LoadCheckpoint(path)
