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
"""
Combination of the visual and the audio stream.

Three strategies are supported:

``concat``
  ``x = [visual; audio]``
``shared``
  ``x = tanh(W·[visual; audio] + b)``, one affine map into a joint representation space.
``project``
  ``x = [f(visual); g(audio)]`` with affine maps ``f``, ``g`` into spaces of the same dimension. The alignment
  loss ``‖f(visual) - g(audio)‖²`` pulls both projections together.

Fusion is applied to every frame independently (frame-level models) or to the per-video mean vectors (video-level
models).
"""
from enum   import unique, Enum
from typing import Dict, Tuple, Union

import numpy as np

from pyTooling.Decorators  import export, readonly
from pyTooling.MetaClasses import ExtendedType

from pyMultimodalRNN.Exception import ShapeError, ModeError, ParameterError, ConsistencyError
from pyMultimodalRNN.Numeric   import Affine, Tanh, WeightGradient, BiasGradient, InitScheme, SeedLike, CreateGenerator
from pyMultimodalRNN.Parameter import ParameterStore


@export
@unique
class FusionMode(Enum):
	"""Modality fusion strategies."""

	Concat =      0  #: Direct concatenation.
	SharedSpace = 1  #: Joint affine + tanh map of the concatenation.
	Projection =  2  #: Per-modality projection with L2 alignment loss.

	__ALIASES__: Dict[str, int] = {
		"concat":       0,
		"shared":       1,
		"shared_space": 1,
		"shared-space": 1,
		"project":      2,
		"projection":   2,
	}

	@classmethod
	def Parse(cls, value: Union[str, "FusionMode"]) -> "FusionMode":
		"""
		Parses a fusion mode from a CLI or config string.

		:param value: ``concat``, ``shared`` or ``project`` (and a few spelling variants).
		:returns:     Fusion mode.
		:raises ParameterError: If the string is unknown.
		"""
		if isinstance(value, cls):
			return value

		try:
			return cls(cls.__ALIASES__[str(value).lower()])
		except KeyError:
			raise ParameterError(f"Value '{value!s}' cannot be parsed to member of {cls.__name__}.")

	def __str__(self) -> str:
		return ("concat", "shared", "project")[self.value]


@export
class FusionConfig(metaclass=ExtendedType, slots=True):
	"""Selected fusion strategy and its dimensions."""

	_mode:        FusionMode
	_sharedDim:   int
	_lambdaAlign: float

	def __init__(self, mode: Union[FusionMode, str] = FusionMode.Concat, sharedDim: int = 16, lambdaAlign: float = 0.1) -> None:
		"""
		Initializes a fusion configuration.

		:param mode:        Fusion strategy.
		:param sharedDim:   Output width of ``shared`` and width of each projection in ``project``.
		:param lambdaAlign: Weight of the alignment loss in the training objective.
		:raises ParameterError: If ``sharedDim < 1`` or ``lambdaAlign < 0``.
		"""
		if sharedDim < 1:
			raise ParameterError(f"Shared dimension must be at least 1, got {sharedDim}.")
		if lambdaAlign < 0.0:
			raise ParameterError(f"Alignment weight must be non-negative, got {lambdaAlign}.")

		self._mode = FusionMode.Parse(mode)
		self._sharedDim = sharedDim
		self._lambdaAlign = float(lambdaAlign)

	@readonly
	def Mode(self) -> FusionMode:
		return self._mode

	@readonly
	def SharedDim(self) -> int:
		return self._sharedDim

	@readonly
	def LambdaAlign(self) -> float:
		return self._lambdaAlign

	def OutputDim(self, visualDim: int, audioDim: int) -> int:
		"""
		Returns the width of a fused vector.

		:param visualDim: Width of the visual features.
		:param audioDim:  Width of the audio features.
		:returns:         Fused width.
		"""
		if self._mode is FusionMode.Concat:
			return visualDim + audioDim
		elif self._mode is FusionMode.SharedSpace:
			return self._sharedDim
		else:
			return 2 * self._sharedDim

	def __str__(self) -> str:
		if self._mode is FusionMode.Concat:
			return "concat"
		elif self._mode is FusionMode.SharedSpace:
			return f"shared({self._sharedDim})"
		else:
			return f"project({self._sharedDim}, λ={self._lambdaAlign})"


@export
class FusionParameters(metaclass=ExtendedType, slots=True):
	"""
	Named view onto the fusion tensors.

	``shared`` uses ``fusion.W`` and ``fusion.b``; ``project`` uses ``fusion.W_f``, ``fusion.b_f``, ``fusion.W_g`` and
	``fusion.b_g``; ``concat`` has no parameters.
	"""

	_store:     ParameterStore
	_visualDim: int
	_audioDim:  int

	def __init__(self, store: ParameterStore, visualDim: int, audioDim: int) -> None:
		self._store = store
		self._visualDim = visualDim
		self._audioDim = audioDim

	@classmethod
	def Create(cls, store: ParameterStore, config: FusionConfig, visualDim: int, audioDim: int, seed: SeedLike, scheme: InitScheme = InitScheme.Normal(0.0, 0.01)) -> "FusionParameters":
		"""
		Registers the tensors required by ``config.Mode``.

		:param store:     Target parameter store.
		:param config:    Fusion configuration.
		:param visualDim: Width of the visual features.
		:param audioDim:  Width of the audio features.
		:param seed:      Seed or generator.
		:param scheme:    Initialization scheme of the matrices, biases start at zero.
		:returns:         Parameter view.
		"""
		generator = CreateGenerator(seed)
		if config.Mode is FusionMode.SharedSpace:
			store.AddMatrix("fusion.W", config.SharedDim, visualDim + audioDim, scheme, generator)
			store.AddVector("fusion.b", config.SharedDim)
		elif config.Mode is FusionMode.Projection:
			store.AddMatrix("fusion.W_f", config.SharedDim, visualDim, scheme, generator)
			store.AddVector("fusion.b_f", config.SharedDim)
			store.AddMatrix("fusion.W_g", config.SharedDim, audioDim, scheme, generator)
			store.AddVector("fusion.b_g", config.SharedDim)

		return cls(store, visualDim, audioDim)

	@readonly
	def Store(self) -> ParameterStore:
		return self._store

	@readonly
	def VisualDim(self) -> int:
		return self._visualDim

	@readonly
	def AudioDim(self) -> int:
		return self._audioDim

	def __getitem__(self, symbol: str) -> np.ndarray:
		return self._store[f"fusion.{symbol}"]

	def Accumulate(self, symbol: str, gradient: np.ndarray) -> None:
		self._store.Accumulate(f"fusion.{symbol}", gradient)

	def Validate(self, config: FusionConfig) -> None:
		"""
		Checks, that the store holds exactly the tensors ``config`` requires.

		:param config: Fusion configuration.
		:raises ConsistencyError: If tensors are missing, superfluous or have unexpected shapes.
		"""
		expected: Dict[str, Tuple[int, ...]] = {}
		if config.Mode is FusionMode.SharedSpace:
			expected = {"W": (config.SharedDim, self._visualDim + self._audioDim), "b": (config.SharedDim, )}
		elif config.Mode is FusionMode.Projection:
			expected = {
				"W_f": (config.SharedDim, self._visualDim), "b_f": (config.SharedDim, ),
				"W_g": (config.SharedDim, self._audioDim),  "b_g": (config.SharedDim, )
			}

		present = {name[len("fusion."):] for name in self._store.Names if name.startswith("fusion.")}
		if present != set(expected):
			raise ConsistencyError(f"Fusion mode '{config.Mode!s}' requires tensors {sorted(expected)}, store has {sorted(present)}.")
		for symbol, shape in expected.items():
			if self[symbol].shape != shape:
				raise ConsistencyError(f"Parameter 'fusion.{symbol}' has shape {self[symbol].shape}, expected {shape}.")


def _CheckModalities(visual: np.ndarray, audio: np.ndarray, params: FusionParameters) -> None:
	if visual.shape[-1] != params.VisualDim:
		raise ShapeError("fuse", "visual", visual.shape, "schema.visual_dim", (params.VisualDim, ))
	if audio.shape[-1] != params.AudioDim:
		raise ShapeError("fuse", "audio", audio.shape, "schema.audio_dim", (params.AudioDim, ))
	if visual.shape[:-1] != audio.shape[:-1]:
		raise ShapeError("fuse", "visual", visual.shape, "audio", audio.shape)


@export
def Fuse(visual: np.ndarray, audio: np.ndarray, config: FusionConfig, params: FusionParameters) -> Tuple[np.ndarray, np.ndarray]:
	"""
	Fuses visual and audio vectors (a single pair, or rows with arbitrary leading shape).

	:param visual: Visual features ``(..., D_v)``.
	:param audio:  Audio features ``(..., D_a)``.
	:param config: Fusion configuration.
	:param params: Fusion parameters.
	:returns:      Fused vectors ``(..., OutputDim)`` and the alignment loss per row ``(...)``; zero unless ``project``.
	:raises ShapeError: If a modality doesn't match the schema.
	"""
	_CheckModalities(visual, audio, params)

	if config.Mode is FusionMode.Concat:
		return np.concatenate((visual, audio), axis=-1), np.zeros(visual.shape[:-1])
	elif config.Mode is FusionMode.SharedSpace:
		joint = np.concatenate((visual, audio), axis=-1)
		return Tanh(Affine(joint, params["W"], params["b"])), np.zeros(visual.shape[:-1])
	else:
		projectedVisual = Affine(visual, params["W_f"], params["b_f"])
		projectedAudio = Affine(audio, params["W_g"], params["b_g"])
		difference = projectedVisual - projectedAudio
		return np.concatenate((projectedVisual, projectedAudio), axis=-1), np.sum(difference * difference, axis=-1)


@export
def FuseBackward(visual: np.ndarray, audio: np.ndarray, gradFused: np.ndarray, gradAlign: np.ndarray, config: FusionConfig, params: FusionParameters) -> Tuple[np.ndarray, np.ndarray]:
	"""
	Back-propagates through :func:`Fuse` and accumulates the fusion parameter gradients.

	:param visual:    Visual features that were fused.
	:param audio:     Audio features that were fused.
	:param gradFused: Gradient w.r.t. the fused vectors.
	:param gradAlign: Gradient w.r.t. the per-row alignment loss (ignored unless ``project``).
	:param config:    Fusion configuration.
	:param params:    Fusion parameters.
	:returns:         Gradients w.r.t. ``visual`` and ``audio``.
	"""
	visualDim = params.VisualDim
	if config.Mode is FusionMode.Concat:
		return gradFused[..., :visualDim], gradFused[..., visualDim:]
	elif config.Mode is FusionMode.SharedSpace:
		joint = np.concatenate((visual, audio), axis=-1)
		fused = Tanh(Affine(joint, params["W"], params["b"]))
		gradPre = gradFused * (1.0 - fused * fused)
		params.Accumulate("W", WeightGradient(gradPre, joint))
		params.Accumulate("b", BiasGradient(gradPre))
		gradJoint = gradPre @ params["W"]
		return gradJoint[..., :visualDim], gradJoint[..., visualDim:]

	shared = config.SharedDim
	difference = Affine(visual, params["W_f"], params["b_f"]) - Affine(audio, params["W_g"], params["b_g"])
	alignTerm = 2.0 * np.asarray(gradAlign)[..., np.newaxis] * difference
	gradVisualProjection = gradFused[..., :shared] + alignTerm
	gradAudioProjection = gradFused[..., shared:] - alignTerm

	params.Accumulate("W_f", WeightGradient(gradVisualProjection, visual))
	params.Accumulate("b_f", BiasGradient(gradVisualProjection))
	params.Accumulate("W_g", WeightGradient(gradAudioProjection, audio))
	params.Accumulate("b_g", BiasGradient(gradAudioProjection))

	return gradVisualProjection @ params["W_f"], gradAudioProjection @ params["W_g"]


@export
def AlignLossGradient(visual: np.ndarray, audio: np.ndarray, config: FusionConfig, params: FusionParameters) -> Dict[str, np.ndarray]:
	"""
	Returns the gradient of ``‖f(visual) - g(audio)‖²`` (summed over rows) w.r.t. all projection tensors and inputs.

	The gradients are returned, not accumulated.

	:param visual: Visual features ``(..., D_v)``.
	:param audio:  Audio features ``(..., D_a)``.
	:param config: Fusion configuration; its mode must be ``project``.
	:param params: Fusion parameters.
	:returns:      Dictionary with keys ``W_f``, ``b_f``, ``W_g``, ``b_g``, ``visual`` and ``audio``.
	:raises ModeError: If the fusion mode isn't ``project``.
	"""
	if config.Mode is not FusionMode.Projection:
		raise ModeError("align_loss_gradient", str(FusionMode.Projection), str(config.Mode))

	_CheckModalities(visual, audio, params)

	difference = Affine(visual, params["W_f"], params["b_f"]) - Affine(audio, params["W_g"], params["b_g"])
	gradVisualProjection = 2.0 * difference
	gradAudioProjection = -2.0 * difference

	return {
		"W_f":    WeightGradient(gradVisualProjection, visual),
		"b_f":    BiasGradient(gradVisualProjection),
		"W_g":    WeightGradient(gradAudioProjection, audio),
		"b_g":    BiasGradient(gradAudioProjection),
		"visual": gradVisualProjection @ params["W_f"],
		"audio":  gradAudioProjection @ params["W_g"],
	}
