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
**Multimodal recurrent sequence classification with hand-derived gradients.**

This package classifies videos, given as sequences of per-frame visual and audio feature vectors, into multiple
labels. A model fuses both modalities, encodes the frame sequence with stacked (bidirectional) LSTM or GRU layers,
summarizes it by attention or by the final states and scores every class with an independent sigmoid. The
video-level logistic-regression baseline scores the fused per-video mean vectors directly.

All gradients are derived by hand (no automatic differentiation) and can be audited with the finite-difference
checker in :mod:`pyMultimodalRNN.Training`.

.. admonition:: Copyright Information

   :copyright: Copyright 2024-2026 pyMultimodalRNN contributors
   :license: Apache License, Version 2.0
"""
__author__ =    "pyMultimodalRNN contributors"
__email__ =     "pymultimodalrnn@users.noreply.github.com"
__copyright__ = "2024-2026, pyMultimodalRNN contributors"
__license__ =   "Apache License, Version 2.0"
__version__ =   "0.4.0"


from enum   import unique, Enum
from typing import Any, Dict, Iterable, List, Tuple, Union, Optional as Nullable

import numpy as np

from pyTooling.Decorators  import export, readonly
from pyTooling.MetaClasses import ExtendedType

from pyMultimodalRNN.Exception import ParameterError, ConsistencyError
from pyMultimodalRNN.Numeric   import InitScheme, CreateGenerator, Sigmoid
from pyMultimodalRNN.Parameter import ParameterStore
from pyMultimodalRNN.Encoder   import EncoderConfig, StackedEncoder, StackTape, TruncateFrames, DEFAULT_MAX_FRAMES
from pyMultimodalRNN.Attention import AttentionParameters, AttentionTape, EmbedFrames, EmbedFramesBackward, AttentionPool, AttentionPoolBackward
from pyMultimodalRNN.Attention import PoolLastStates, PoolLastStatesBackward
from pyMultimodalRNN.Fusion    import FusionConfig, FusionParameters, Fuse, FuseBackward
from pyMultimodalRNN.Classifier import HeadParameters, PredictLogits, HeadBackward


@export
@unique
class ModelKind(Enum):
	"""Which features a model consumes."""

	VideoLevel = 0  #: Fused per-video mean vectors straight into the head (logistic regression for ``concat``).
	FrameLevel = 1  #: Fused frame sequences through encoder and pooling into the head.

	@classmethod
	def Parse(cls, value: Union[str, "ModelKind"]) -> "ModelKind":
		"""
		Parses a model kind from ``video``/``frame`` (or the member names).

		:param value: String to parse.
		:returns:     Model kind.
		:raises ParameterError: If the string is unknown.
		"""
		if isinstance(value, cls):
			return value

		normalized = str(value).lower().replace("-", "").replace("_", "")
		if normalized in ("video", "videolevel"):
			return cls.VideoLevel
		elif normalized in ("frame", "framelevel"):
			return cls.FrameLevel

		raise ParameterError(f"Value '{value!s}' cannot be parsed to member of {cls.__name__}.")

	def __str__(self) -> str:
		return ("video", "frame")[self.value]


@export
class ModelConfig(metaclass=ExtendedType, slots=True):
	"""
	Complete architecture description of a :class:`MultimodalModel`.

	The configuration is stored inside checkpoints (see :meth:`ToDict`), so a model can be re-created from it.
	"""

	_modelKind:    ModelKind
	_visualDim:    int
	_audioDim:     int
	_numClasses:   int
	_encoder:      EncoderConfig
	_fusion:       FusionConfig
	_attention:    bool
	_embedDim:     Nullable[int]
	_attentionDim: Nullable[int]
	_maxFrames:    int

	def __init__(
		self,
		modelKind: Union[ModelKind, str] = ModelKind.FrameLevel,
		visualDim: int = 16,
		audioDim: int = 4,
		numClasses: int = 10,
		encoder: Nullable[EncoderConfig] = None,
		fusion: Nullable[FusionConfig] = None,
		attention: bool = True,
		embedDim: Nullable[int] = None,
		attentionDim: Nullable[int] = None,
		maxFrames: int = DEFAULT_MAX_FRAMES
	) -> None:
		"""
		Initializes a model configuration.

		:param modelKind:    Video-level or frame-level model.
		:param visualDim:    Width ``D_v`` of the visual features.
		:param audioDim:     Width ``D_a`` of the audio features.
		:param numClasses:   Number of classes ``C``.
		:param encoder:      Encoder architecture (frame-level only), default: 2-layer bi-GRU, ``H = 16``.
		:param fusion:       Fusion configuration, default: ``concat``.
		:param attention:    Attention pooling with frame embedding (frame-level only); otherwise last-state pooling.
		:param embedDim:     Width of the embedded frames, default: width of the fused frames.
		:param attentionDim: Width of ``u_t``, default: width of the encoded frames.
		:param maxFrames:    Longer sequences are truncated.
		:raises ParameterError: If a dimension isn't positive.
		"""
		for name, value in (("visualDim", visualDim), ("audioDim", audioDim), ("numClasses", numClasses), ("maxFrames", maxFrames)):
			if value < 1:
				raise ParameterError(f"Model parameter '{name}' must be at least 1, got {value}.")
		for name, optional in (("embedDim", embedDim), ("attentionDim", attentionDim)):
			if optional is not None and optional < 1:
				raise ParameterError(f"Model parameter '{name}' must be at least 1, got {optional}.")

		self._modelKind = ModelKind.Parse(modelKind)
		self._visualDim = visualDim
		self._audioDim = audioDim
		self._numClasses = numClasses
		self._encoder = encoder if encoder is not None else EncoderConfig()
		self._fusion = fusion if fusion is not None else FusionConfig()
		self._attention = attention
		self._embedDim = embedDim
		self._attentionDim = attentionDim
		self._maxFrames = maxFrames

	@readonly
	def ModelKind(self) -> ModelKind:
		return self._modelKind

	@readonly
	def VisualDim(self) -> int:
		return self._visualDim

	@readonly
	def AudioDim(self) -> int:
		return self._audioDim

	@readonly
	def NumClasses(self) -> int:
		return self._numClasses

	@readonly
	def Encoder(self) -> EncoderConfig:
		return self._encoder

	@readonly
	def Fusion(self) -> FusionConfig:
		return self._fusion

	@readonly
	def Attention(self) -> bool:
		return self._attention

	@readonly
	def MaxFrames(self) -> int:
		return self._maxFrames

	@readonly
	def FusedDim(self) -> int:
		return self._fusion.OutputDim(self._visualDim, self._audioDim)

	@readonly
	def EmbedDim(self) -> int:
		return self._embedDim if self._embedDim is not None else self.FusedDim

	@readonly
	def EncoderInputDim(self) -> int:
		return self.EmbedDim if self._attention else self.FusedDim

	@readonly
	def AttentionDim(self) -> int:
		return self._attentionDim if self._attentionDim is not None else self._encoder.OutputDim

	@readonly
	def RepresentationDim(self) -> int:
		"""
		Read-only property returning the width of the vector fed into the classification head.

		:returns: Fused width for video-level models, encoded width for frame-level models.
		"""
		if self._modelKind is ModelKind.VideoLevel:
			return self.FusedDim

		return self._encoder.OutputDim

	def ToDict(self) -> Dict[str, Any]:
		"""
		Converts the configuration into JSON-compatible values.

		:returns: Dictionary accepted by :meth:`FromDict`.
		"""
		return {
			"model_kind":    str(self._modelKind),
			"visual_dim":    self._visualDim,
			"audio_dim":     self._audioDim,
			"num_classes":   self._numClasses,
			"cell":          str(self._encoder.CellKind),
			"hidden":        self._encoder.HiddenDim,
			"layers":        self._encoder.NumLayers,
			"bidirectional": self._encoder.Bidirectional,
			"fusion":        str(self._fusion.Mode),
			"shared_dim":    self._fusion.SharedDim,
			"lambda_align":  self._fusion.LambdaAlign,
			"attention":     self._attention,
			"embed_dim":     self._embedDim,
			"attention_dim": self._attentionDim,
			"max_frames":    self._maxFrames,
		}

	@classmethod
	def FromDict(cls, values: Dict[str, Any]) -> "ModelConfig":
		"""
		Re-creates a configuration written by :meth:`ToDict`.

		:param values: Dictionary of configuration values.
		:returns:      Model configuration.
		:raises ConsistencyError: If a key is missing.
		"""
		try:
			return cls(
				modelKind=values["model_kind"],
				visualDim=int(values["visual_dim"]),
				audioDim=int(values["audio_dim"]),
				numClasses=int(values["num_classes"]),
				encoder=EncoderConfig(values["cell"], int(values["hidden"]), int(values["layers"]), bool(values["bidirectional"])),
				fusion=FusionConfig(values["fusion"], int(values["shared_dim"]), float(values["lambda_align"])),
				attention=bool(values["attention"]),
				embedDim=values["embed_dim"],
				attentionDim=values["attention_dim"],
				maxFrames=int(values["max_frames"])
			)
		except KeyError as ex:
			raise ConsistencyError(f"Model configuration lacks key '{ex.args[0]}'.") from ex

	def __str__(self) -> str:
		if self._modelKind is ModelKind.VideoLevel:
			return f"video-level, {self._fusion!s}, C={self._numClasses}"

		return f"frame-level {self._encoder!s}, {self._fusion!s}, {'attention' if self._attention else 'last-state'}, C={self._numClasses}"


@export
class ForwardTape(metaclass=ExtendedType, slots=True):
	"""Everything a forward pass over one batch of equally long sequences caches for the backward pass."""

	visual:         np.ndarray
	audio:          np.ndarray
	fused:          np.ndarray
	encoded:        Nullable[np.ndarray]
	stackTape:      Nullable[StackTape]
	attentionTape:  Nullable[AttentionTape]
	representation: np.ndarray
	logits:         np.ndarray
	alignLoss:      np.ndarray

	def __init__(self, visual: np.ndarray, audio: np.ndarray) -> None:
		self.visual = visual
		self.audio = audio
		self.encoded = None
		self.stackTape = None
		self.attentionTape = None

	@readonly
	def Scores(self) -> np.ndarray:
		return Sigmoid(self.logits)


@export
class MultimodalModel(metaclass=ExtendedType, slots=True):
	"""
	A multimodal multi-label classifier: fusion → (embedding → encoder → pooling) → sigmoid head.

	All parameters live in one :class:`~pyMultimodalRNN.Parameter.ParameterStore` and are named
	``fusion.*``, ``attention.*``, ``encoder.layer<ℓ>.<direction>.*`` and ``head.*``.
	"""

	_config:    ModelConfig
	_store:     ParameterStore
	_fusion:    FusionParameters
	_encoder:   Nullable[StackedEncoder]
	_attention: Nullable[AttentionParameters]
	_head:      HeadParameters

	def __init__(self, config: ModelConfig, store: ParameterStore, fusion: FusionParameters, encoder: Nullable[StackedEncoder], attention: Nullable[AttentionParameters], head: HeadParameters) -> None:
		self._config = config
		self._store = store
		self._fusion = fusion
		self._encoder = encoder
		self._attention = attention
		self._head = head

	@classmethod
	def Create(cls, config: ModelConfig, seed: int) -> "MultimodalModel":
		"""
		Creates a freshly initialized model.

		Fusion matrices are drawn from ``normal(0, 0.01)``; cell, attention and head matrices are glorot-normal; all
		biases start at zero. Tensors are drawn in the order fusion, attention, encoder, head from one generator.

		:param config: Model architecture.
		:param seed:   Seed of the initialization.
		:returns:      New model.
		"""
		generator = CreateGenerator(seed)
		store = ParameterStore()
		glorot = InitScheme.GlorotNormal()

		fusion = FusionParameters.Create(store, config.Fusion, config.VisualDim, config.AudioDim, generator)
		encoder = None
		attention = None
		if config.ModelKind is ModelKind.FrameLevel:
			if config.Attention:
				attention = AttentionParameters.Create(store, config.Encoder.OutputDim, config.AttentionDim, generator, rawDim=config.FusedDim, embedDim=config.EmbedDim)
			encoder = StackedEncoder.Create(config.Encoder, config.EncoderInputDim, store, glorot, generator)
		head = HeadParameters.Create(store, config.NumClasses, config.RepresentationDim, glorot, generator)

		return cls(config, store, fusion, encoder, attention, head)

	@classmethod
	def FromStore(cls, config: ModelConfig, store: ParameterStore) -> "MultimodalModel":
		"""
		Creates a model over existing parameters (e.g. loaded from a checkpoint).

		:param config: Model architecture.
		:param store:  Parameter store.
		:returns:      Model.
		:raises ConsistencyError: If the store doesn't match ``config``.
		"""
		fusion = FusionParameters(store, config.VisualDim, config.AudioDim)
		fusion.Validate(config.Fusion)
		encoder = None
		attention = None
		if config.ModelKind is ModelKind.FrameLevel:
			if config.Attention:
				attention = AttentionParameters(store)
				attention.Validate(config.Encoder.OutputDim)
				if not attention.HasEmbedding or attention.We.shape != (config.EmbedDim, config.FusedDim):
					raise ConsistencyError(f"Frame embedding 'attention.W_e' doesn't match {config.EmbedDim} × {config.FusedDim}.")
			encoder = StackedEncoder.Attach(config.Encoder, config.EncoderInputDim, store)
		head = HeadParameters(store)
		head.Validate(config.NumClasses, config.RepresentationDim)

		return cls(config, store, fusion, encoder, attention, head)

	@readonly
	def Config(self) -> ModelConfig:
		return self._config

	@readonly
	def Store(self) -> ParameterStore:
		return self._store

	@readonly
	def Fusion(self) -> FusionParameters:
		return self._fusion

	@readonly
	def Encoder(self) -> Nullable[StackedEncoder]:
		return self._encoder

	@readonly
	def Attention(self) -> Nullable[AttentionParameters]:
		return self._attention

	@readonly
	def Head(self) -> HeadParameters:
		return self._head

	def Inputs(self, example: Any) -> Tuple[np.ndarray, np.ndarray]:
		"""
		Selects the model inputs of one example.

		:param example: Object with ``Visual``/``Audio`` frame matrices and ``MeanVisual``/``MeanAudio`` vectors.
		:returns:       Mean vectors for video-level models, (possibly truncated) frame matrices otherwise.
		"""
		if self._config.ModelKind is ModelKind.VideoLevel:
			return example.MeanVisual, example.MeanAudio

		maxFrames = self._config.MaxFrames
		return TruncateFrames(example.Visual, maxFrames), TruncateFrames(example.Audio, maxFrames)

	def GroupBatch(self, examples: List[Any]) -> List[Tuple[List[int], np.ndarray, np.ndarray]]:
		"""
		Groups examples of equal sequence length so each group can be computed as one stacked array.

		Groups are ordered by first appearance, items keep their order inside a group.

		:param examples: Examples of one minibatch.
		:returns:        List of (example indices, stacked visual inputs, stacked audio inputs).
		"""
		groups: Dict[Tuple[int, ...], Tuple[List[int], List[np.ndarray], List[np.ndarray]]] = {}
		for index, example in enumerate(examples):
			visual, audio = self.Inputs(example)
			key = visual.shape
			if key not in groups:
				groups[key] = ([], [], [])
			indices, visuals, audios = groups[key]
			indices.append(index)
			visuals.append(visual)
			audios.append(audio)

		return [(indices, np.stack(visuals), np.stack(audios)) for indices, visuals, audios in groups.values()]

	def Forward(self, visual: np.ndarray, audio: np.ndarray) -> ForwardTape:
		"""
		Computes logits for one item or a stack of equally shaped items.

		:param visual: ``(T, D_v)``/``(B, T, D_v)`` frames, or ``(D_v,)``/``(B, D_v)`` means for video-level models.
		:param audio:  Matching audio inputs.
		:returns:      Forward tape holding logits, per-item alignment loss and all intermediates.
		"""
		config = self._config
		tape = ForwardTape(visual, audio)
		tape.fused, alignLoss = Fuse(visual, audio, config.Fusion, self._fusion)

		if config.ModelKind is ModelKind.VideoLevel:
			tape.alignLoss = alignLoss
			tape.representation = tape.fused
		else:
			tape.alignLoss = np.sum(alignLoss, axis=-1)
			encoderInput = EmbedFrames(tape.fused, self._attention.We) if self._attention is not None else tape.fused
			tape.encoded, tape.stackTape = self._encoder.Encode(encoderInput)
			if self._attention is not None:
				tape.representation, _, tape.attentionTape = AttentionPool(tape.encoded, self._attention)
			else:
				tape.representation = PoolLastStates(tape.encoded, config.Encoder.Bidirectional)

		tape.logits = PredictLogits(tape.representation, self._head)
		return tape

	def Backward(self, tape: ForwardTape, gradLogits: np.ndarray, gradAlign: np.ndarray) -> None:
		"""
		Accumulates the gradients of all parameters.

		:param tape:       Tape of the forward pass.
		:param gradLogits: Gradient w.r.t. the logits.
		:param gradAlign:  Gradient w.r.t. the per-item alignment loss.
		"""
		config = self._config
		gradRepresentation = HeadBackward(tape.representation, gradLogits, self._head)

		if config.ModelKind is ModelKind.VideoLevel:
			FuseBackward(tape.visual, tape.audio, gradRepresentation, gradAlign, config.Fusion, self._fusion)
			return

		if self._attention is not None:
			gradEncoded = AttentionPoolBackward(tape.attentionTape, gradRepresentation, self._attention)
		else:
			gradEncoded = PoolLastStatesBackward(tape.encoded.shape, gradRepresentation, config.Encoder.Bidirectional)

		gradEncoderInput = self._encoder.Backward(tape.stackTape, gradEncoded)
		if self._attention is not None:
			gradFused = EmbedFramesBackward(tape.fused, gradEncoderInput, self._attention)
		else:
			gradFused = gradEncoderInput

		gradAlignFrames = np.broadcast_to(np.asarray(gradAlign)[..., np.newaxis], tape.fused.shape[:-1])
		FuseBackward(tape.visual, tape.audio, gradFused, gradAlignFrames, config.Fusion, self._fusion)

	def Score(self, examples: Iterable[Any]) -> np.ndarray:
		"""
		Returns the class scores of all examples.

		:param examples: Examples to score.
		:returns:        Scores ``(len(examples), C)`` in input order.
		"""
		examples = list(examples)
		scores = np.empty((len(examples), self._config.NumClasses))
		for indices, visual, audio in self.GroupBatch(examples):
			scores[indices] = self.Forward(visual, audio).Scores

		return scores

	def __str__(self) -> str:
		return f"MultimodalModel: {self._config!s}, {self._store.Size} parameters"
