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
Unrolling of recurrent cells over frame sequences.

A sequence is a ``T × D`` matrix (one row per frame) or a batch ``B × T × D`` of equally long sequences. A
direction pass always starts from all-zero states. Outputs of the backward direction are re-aligned to the original
frame order, so row ``t`` of every output belongs to frame ``t``.
"""
from enum     import unique, Enum
from logging  import getLogger
from typing   import List, Tuple, Union, Optional as Nullable
from warnings import warn

import numpy as np

from pyTooling.Decorators  import export, readonly
from pyTooling.MetaClasses import ExtendedType

from pyMultimodalRNN.Exception import EmptySequenceError, ConsistencyError, ParameterError, ShapeError, FrameTruncationWarning
from pyMultimodalRNN.Numeric   import InitScheme, SeedLike, CreateGenerator
from pyMultimodalRNN.Parameter import ParameterStore
from pyMultimodalRNN.Cell      import CellKind, CellStepTape, RecurrentCell, CreateCell, AttachCell


__all__ = ["DEFAULT_MAX_FRAMES"]

DEFAULT_MAX_FRAMES = 300  #: Default maximum number of frames per sequence.

_logger = getLogger(__name__)


@export
@unique
class SequenceDirection(Enum):
	"""Traversal order of a sequence."""

	Forward =  0  #: Frames ``0 … T-1``.
	Backward = 1  #: Frames ``T-1 … 0``.

	def __str__(self) -> str:
		return ("forward", "backward")[self.value]


@export
class EncoderConfig(metaclass=ExtendedType, slots=True):
	"""Architecture of a (stacked, optionally bidirectional) recurrent encoder."""

	_cellKind:      CellKind
	_hiddenDim:     int
	_numLayers:     int
	_bidirectional: bool

	def __init__(self, cellKind: Union[CellKind, str] = CellKind.GRU, hiddenDim: int = 16, numLayers: int = 2, bidirectional: bool = True) -> None:
		"""
		Initializes an encoder configuration.

		:param cellKind:      Recurrent cell type.
		:param hiddenDim:     Hidden state size per direction.
		:param numLayers:     Number of stacked layers.
		:param bidirectional: Each layer runs a forward and a backward pass.
		:raises ParameterError: If ``hiddenDim`` or ``numLayers`` is smaller than 1.
		"""
		if hiddenDim < 1:
			raise ParameterError(f"Hidden dimension must be at least 1, got {hiddenDim}.")
		if numLayers < 1:
			raise ParameterError(f"Number of layers must be at least 1, got {numLayers}.")

		self._cellKind = CellKind.Parse(cellKind)
		self._hiddenDim = hiddenDim
		self._numLayers = numLayers
		self._bidirectional = bidirectional

	@readonly
	def CellKind(self) -> CellKind:
		return self._cellKind

	@readonly
	def HiddenDim(self) -> int:
		return self._hiddenDim

	@readonly
	def NumLayers(self) -> int:
		return self._numLayers

	@readonly
	def Bidirectional(self) -> bool:
		return self._bidirectional

	@readonly
	def OutputDim(self) -> int:
		"""
		Read-only property returning the width of an encoded frame (``2·H`` if bidirectional, else ``H``).

		:returns: Output dimension.
		"""
		return self._hiddenDim * (2 if self._bidirectional else 1)

	def __str__(self) -> str:
		return f"{self._numLayers}-layer {'bi-' if self._bidirectional else ''}{self._cellKind!s}, H={self._hiddenDim}"


@export
class DirectionTape(metaclass=ExtendedType, slots=True):
	"""Step tapes of one direction pass, stored in processing order."""

	_cell:      RecurrentCell
	_direction: SequenceDirection
	_steps:     List[CellStepTape]
	_order:     List[int]

	def __init__(self, cell: RecurrentCell, direction: SequenceDirection, steps: List[CellStepTape], order: List[int]) -> None:
		self._cell = cell
		self._direction = direction
		self._steps = steps
		self._order = order

	@readonly
	def Cell(self) -> RecurrentCell:
		return self._cell

	@readonly
	def Direction(self) -> SequenceDirection:
		return self._direction

	@readonly
	def Steps(self) -> List[CellStepTape]:
		return self._steps

	@readonly
	def Order(self) -> List[int]:
		"""
		Read-only property returning the frame index processed at each step.

		:returns: Frame indices in processing order.
		"""
		return self._order


@export
def TruncateFrames(frames: np.ndarray, maxFrames: int) -> np.ndarray:
	"""
	Caps a sequence at ``maxFrames`` frames, issuing a :class:`FrameTruncationWarning` if frames are dropped.

	:param frames:    Sequence ``(..., T, D)``.
	:param maxFrames: Maximum number of frames to keep.
	:returns:         The sequence or its first ``maxFrames`` frames.
	"""
	length = frames.shape[-2]
	if length <= maxFrames:
		return frames

	_logger.warning(f"Sequence with {length} frames truncated to {maxFrames} frames.")
	warn(f"Sequence with {length} frames truncated to {maxFrames} frames.", FrameTruncationWarning, stacklevel=2)
	return frames[..., :maxFrames, :]


@export
def RunDirection(frames: np.ndarray, cell: RecurrentCell, direction: SequenceDirection) -> Tuple[np.ndarray, DirectionTape]:
	"""
	Unrolls ``cell`` over all frames in the given traversal order.

	:param frames:    Sequence ``(T, D)`` or batch ``(B, T, D)``.
	:param cell:      Recurrent cell.
	:param direction: Traversal order.
	:returns:         Hidden states ``(..., T, H)`` in original frame order, and the tape.
	:raises EmptySequenceError: If ``T`` is zero.
	"""
	if frames.ndim < 2 or frames.shape[-2] == 0:
		raise EmptySequenceError("run_direction")

	length = frames.shape[-2]
	order = list(range(length)) if direction is SequenceDirection.Forward else list(range(length - 1, -1, -1))

	h, c = cell.InitialState(frames.shape[:-2])
	outputs = np.empty(frames.shape[:-2] + (length, cell.HiddenDim))
	steps: List[CellStepTape] = []
	for t in order:
		h, c, tape = cell.Step(frames[..., t, :], h, c)
		outputs[..., t, :] = h
		steps.append(tape)

	return outputs, DirectionTape(cell, direction, steps, order)


@export
def RunDirectionBackward(tape: DirectionTape, gradOutputs: np.ndarray) -> np.ndarray:
	"""
	Back-propagates through time for one direction pass.

	:param tape:        Tape returned by :func:`RunDirection`.
	:param gradOutputs: Gradient w.r.t. the outputs ``(..., T, H)``.
	:returns:           Gradient w.r.t. the input frames ``(..., T, D)``.
	"""
	cell = tape.Cell
	gradFrames = np.empty(gradOutputs.shape[:-1] + (cell.InputDim, ))
	gradH = np.zeros(gradOutputs.shape[:-2] + (cell.HiddenDim, ))
	gradC = np.zeros_like(gradH) if cell.Kind is CellKind.LSTM else None

	for t, stepTape in zip(reversed(tape.Order), reversed(tape.Steps)):
		gradX, gradH, gradC = cell.Backward(stepTape, gradH + gradOutputs[..., t, :], gradC)
		gradFrames[..., t, :] = gradX

	return gradFrames


@export
class StackTape(metaclass=ExtendedType, slots=True):
	"""Direction tapes of all layers of a stacked encoder."""

	_layers: List[Tuple[DirectionTape, Nullable[DirectionTape]]]

	def __init__(self) -> None:
		self._layers = []

	@readonly
	def Layers(self) -> List[Tuple[DirectionTape, Nullable[DirectionTape]]]:
		return self._layers


@export
class StackedEncoder(metaclass=ExtendedType, slots=True):
	"""
	A stack of recurrent layers; each layer consists of a forward pass and, if bidirectional, a backward pass.

	Layer 1 consumes the input frames, every further layer consumes the concatenated ``[forward, backward]`` outputs of
	the layer below. Parameters are named ``encoder.layer<ℓ>.<direction>.<symbol>``.
	"""

	_config:   EncoderConfig
	_inputDim: int
	_layers:   List[Tuple[RecurrentCell, Nullable[RecurrentCell]]]

	def __init__(self, config: EncoderConfig, inputDim: int, layers: List[Tuple[RecurrentCell, Nullable[RecurrentCell]]]) -> None:
		self._config = config
		self._inputDim = inputDim
		self._layers = layers

	@staticmethod
	def LayerInputDim(config: EncoderConfig, inputDim: int, layer: int) -> int:
		return inputDim if layer == 1 else config.OutputDim

	@classmethod
	def Create(cls, config: EncoderConfig, inputDim: int, store: ParameterStore, scheme: InitScheme, seed: SeedLike) -> "StackedEncoder":
		"""
		Registers the parameters of all layers and returns the encoder.

		:param config:   Encoder architecture.
		:param inputDim: Width of the input frames.
		:param store:    Target parameter store.
		:param scheme:   Initialization scheme of all cell matrices.
		:param seed:     Seed or generator.
		:returns:        New encoder.
		"""
		generator = CreateGenerator(seed)
		layers: List[Tuple[RecurrentCell, Nullable[RecurrentCell]]] = []
		for layer in range(1, config.NumLayers + 1):
			layerInput = cls.LayerInputDim(config, inputDim, layer)
			forward = CreateCell(config.CellKind, store, f"encoder.layer{layer}.forward", layerInput, config.HiddenDim, scheme, generator)
			backward = None
			if config.Bidirectional:
				backward = CreateCell(config.CellKind, store, f"encoder.layer{layer}.backward", layerInput, config.HiddenDim, scheme, generator)
			layers.append((forward, backward))

		return cls(config, inputDim, layers)

	@classmethod
	def Attach(cls, config: EncoderConfig, inputDim: int, store: ParameterStore) -> "StackedEncoder":
		"""
		Returns an encoder over parameters that already exist in ``store``.

		:param config:   Encoder architecture.
		:param inputDim: Width of the input frames.
		:param store:    Parameter store.
		:returns:        Encoder.
		:raises ConsistencyError: If the store doesn't match ``config``.
		"""
		layers: List[Tuple[RecurrentCell, Nullable[RecurrentCell]]] = []
		for layer in range(1, config.NumLayers + 1):
			layerInput = cls.LayerInputDim(config, inputDim, layer)
			forward = AttachCell(config.CellKind, store, f"encoder.layer{layer}.forward", layerInput, config.HiddenDim)
			backward = None
			if config.Bidirectional:
				backward = AttachCell(config.CellKind, store, f"encoder.layer{layer}.backward", layerInput, config.HiddenDim)
			elif f"encoder.layer{layer}.backward.{'W_xi' if config.CellKind is CellKind.LSTM else 'W_r'}" in store:
				raise ConsistencyError(f"Unidirectional configuration, but store contains backward parameters for layer {layer}.")
			layers.append((forward, backward))

		if f"encoder.layer{config.NumLayers + 1}.forward.{'W_xi' if config.CellKind is CellKind.LSTM else 'W_r'}" in store:
			raise ConsistencyError(f"Store contains more than {config.NumLayers} encoder layers.")

		return cls(config, inputDim, layers)

	@readonly
	def Config(self) -> EncoderConfig:
		return self._config

	@readonly
	def InputDim(self) -> int:
		return self._inputDim

	@readonly
	def Layers(self) -> List[Tuple[RecurrentCell, Nullable[RecurrentCell]]]:
		return self._layers

	def Encode(self, frames: np.ndarray) -> Tuple[np.ndarray, StackTape]:
		"""
		Encodes a sequence (or a batch of equally long sequences).

		:param frames: Input ``(..., T, inputDim)``.
		:returns:      Top layer outputs ``(..., T, OutputDim)`` and the stack tape.
		:raises ShapeError:         If the frame width doesn't match the encoder.
		:raises EmptySequenceError: If ``T`` is zero.
		"""
		if frames.shape[-1] != self._inputDim:
			raise ShapeError("encode_bidirectional_stack", "frames", frames.shape, "encoder.input_dim", (self._inputDim, ))

		stackTape = StackTape()
		layerInput = frames
		for forwardCell, backwardCell in self._layers:
			forwardOut, forwardTape = RunDirection(layerInput, forwardCell, SequenceDirection.Forward)
			if backwardCell is None:
				layerInput = forwardOut
				stackTape._layers.append((forwardTape, None))
			else:
				backwardOut, backwardTape = RunDirection(layerInput, backwardCell, SequenceDirection.Backward)
				layerInput = np.concatenate((forwardOut, backwardOut), axis=-1)
				stackTape._layers.append((forwardTape, backwardTape))

		return layerInput, stackTape

	def Backward(self, stackTape: StackTape, gradOutputs: np.ndarray) -> np.ndarray:
		"""
		Back-propagates through all layers.

		:param stackTape:   Tape returned by :meth:`Encode`.
		:param gradOutputs: Gradient w.r.t. the top layer outputs.
		:returns:           Gradient w.r.t. the input frames.
		"""
		hidden = self._config.HiddenDim
		grad = gradOutputs
		for forwardTape, backwardTape in reversed(stackTape.Layers):
			if backwardTape is None:
				grad = RunDirectionBackward(forwardTape, grad)
			else:
				grad = RunDirectionBackward(forwardTape, grad[..., :hidden]) + RunDirectionBackward(backwardTape, grad[..., hidden:])

		return grad


@export
def EncodeBidirectionalStack(frames: np.ndarray, config: EncoderConfig, store: ParameterStore) -> Tuple[np.ndarray, StackTape]:
	"""
	Encodes ``frames`` with the stacked encoder described by ``config``, whose parameters live in ``store``.

	:param frames: Input ``(..., T, D)``.
	:param config: Encoder architecture.
	:param store:  Parameter store holding ``encoder.*`` tensors.
	:returns:      Top layer outputs and the stack tape.
	:raises ConsistencyError: If ``config`` and ``store`` don't match.
	"""
	return StackedEncoder.Attach(config, frames.shape[-1], store).Encode(frames)
