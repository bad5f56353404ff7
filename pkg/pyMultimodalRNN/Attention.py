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
Frame embedding and attention-weighted summarization of encoded sequences.

.. code-block:: text

   x_t = W_e·w_t                              frame embedding
   u_t = tanh(W_w·h_t + b_w)                  one-layer MLP
   α_t = exp(u_tᵀu_w) / Σ_τ exp(u_τᵀu_w)      attention weights
   s   = Σ_t α_t·h_t                          weighted average of hidden states

Without attention, :func:`LastStatePool` concatenates the final forward state and the final backward state.
"""
from typing import Tuple, Optional as Nullable

import numpy as np

from pyTooling.Decorators  import export, readonly
from pyTooling.MetaClasses import ExtendedType

from pyMultimodalRNN.Exception import ShapeError, EmptySequenceError, ConsistencyError
from pyMultimodalRNN.Numeric   import Affine, Tanh, Softmax, WeightGradient, BiasGradient, InitScheme, SeedLike, CreateGenerator, InitParams
from pyMultimodalRNN.Parameter import ParameterStore


@export
class AttentionParameters(metaclass=ExtendedType, slots=True):
	"""
	Named view onto the attention tensors ``attention.W_e``, ``attention.W_w``, ``attention.b_w`` and ``attention.u_w``.

	``W_e`` is optional; it exists only when frames are embedded before encoding.
	"""

	_store:     ParameterStore
	_prefix:    str

	def __init__(self, store: ParameterStore, prefix: str = "attention") -> None:
		self._store = store
		self._prefix = prefix

	@classmethod
	def Create(cls, store: ParameterStore, hiddenDim: int, attentionDim: int, seed: SeedLike, rawDim: Nullable[int] = None, embedDim: Nullable[int] = None, prefix: str = "attention") -> "AttentionParameters":
		"""
		Registers glorot-normal initialized attention matrices and the context vector; ``b_w`` starts at zero.

		:param store:        Target parameter store.
		:param hiddenDim:    Width ``d`` of the encoded frames.
		:param attentionDim: Width of ``u_t``.
		:param seed:         Seed or generator.
		:param rawDim:       Width of the raw frames; registers ``W_e`` if given.
		:param embedDim:     Width of the embedded frames (default: ``rawDim``).
		:param prefix:       Parameter name prefix.
		:returns:            Parameter view.
		"""
		generator = CreateGenerator(seed)
		scheme = InitScheme.GlorotNormal()
		if rawDim is not None:
			store.AddMatrix(f"{prefix}.W_e", embedDim if embedDim is not None else rawDim, rawDim, scheme, generator)
		store.AddMatrix(f"{prefix}.W_w", attentionDim, hiddenDim, scheme, generator)
		store.AddVector(f"{prefix}.b_w", attentionDim)

		context = InitParams(attentionDim, 1, scheme, generator)[:, 0]
		while not np.any(context):
			context = InitParams(attentionDim, 1, scheme, generator)[:, 0]
		store.Add(f"{prefix}.u_w", context)

		return cls(store, prefix)

	@readonly
	def Store(self) -> ParameterStore:
		return self._store

	@readonly
	def HasEmbedding(self) -> bool:
		return f"{self._prefix}.W_e" in self._store

	@readonly
	def We(self) -> np.ndarray:
		return self._store[f"{self._prefix}.W_e"]

	@readonly
	def Ww(self) -> np.ndarray:
		return self._store[f"{self._prefix}.W_w"]

	@readonly
	def Bw(self) -> np.ndarray:
		return self._store[f"{self._prefix}.b_w"]

	@readonly
	def Uw(self) -> np.ndarray:
		return self._store[f"{self._prefix}.u_w"]

	def Accumulate(self, symbol: str, gradient: np.ndarray) -> None:
		self._store.Accumulate(f"{self._prefix}.{symbol}", gradient)

	def Validate(self, hiddenDim: int) -> None:
		"""
		Checks the attention tensors against the encoded frame width.

		:param hiddenDim: Width of the encoded frames.
		:raises ConsistencyError: If tensors are missing or inconsistent.
		"""
		for symbol in ("W_w", "b_w", "u_w"):
			if f"{self._prefix}.{symbol}" not in self._store:
				raise ConsistencyError(f"Parameter '{self._prefix}.{symbol}' is missing.")

		attentionDim = self.Ww.shape[0]
		if self.Ww.shape != (attentionDim, hiddenDim) or self.Bw.shape != (attentionDim, ) or self.Uw.shape != (attentionDim, ):
			raise ConsistencyError(f"Attention tensors {self.Ww.shape}, {self.Bw.shape}, {self.Uw.shape} don't match encoded width {hiddenDim}.")


@export
class AttentionTape(metaclass=ExtendedType, slots=True):
	"""Cached values of one attention pooling."""

	_hidden: np.ndarray
	_u:      np.ndarray
	_alphas: np.ndarray

	def __init__(self, hidden: np.ndarray, u: np.ndarray, alphas: np.ndarray) -> None:
		self._hidden = hidden
		self._u = u
		self._alphas = alphas

	@readonly
	def Hidden(self) -> np.ndarray:
		return self._hidden

	@readonly
	def U(self) -> np.ndarray:
		return self._u

	@readonly
	def Alphas(self) -> np.ndarray:
		return self._alphas


@export
def EmbedFrames(raw: np.ndarray, We: np.ndarray) -> np.ndarray:
	"""
	Projects every frame with the embedding matrix (no bias).

	:param raw: Frames ``(..., T, rawDim)``.
	:param We:  Embedding matrix ``(embedDim, rawDim)``.
	:returns:   Embedded frames ``(..., T, embedDim)``.
	:raises ShapeError: If ``W_e`` doesn't match the frame width.
	"""
	if raw.shape[-1] != We.shape[1]:
		raise ShapeError("embed_frames", "raw", raw.shape, "W_e", We.shape)

	return Affine(raw, We)


@export
def EmbedFramesBackward(raw: np.ndarray, gradEmbedded: np.ndarray, params: AttentionParameters) -> np.ndarray:
	"""
	Accumulates the gradient of ``W_e`` and returns the gradient w.r.t. the raw frames.

	:param raw:          Frames that were embedded.
	:param gradEmbedded: Gradient w.r.t. the embedded frames.
	:param params:       Attention parameters.
	:returns:            Gradient w.r.t. ``raw``.
	"""
	params.Accumulate("W_e", WeightGradient(gradEmbedded, raw))
	return gradEmbedded @ params.We


@export
def AttentionPool(hidden: np.ndarray, params: AttentionParameters) -> Tuple[np.ndarray, np.ndarray, AttentionTape]:
	"""
	Summarizes encoded frames as an attention-weighted average.

	:param hidden: Encoded frames ``(T, d)`` or ``(B, T, d)``.
	:param params: Attention parameters.
	:returns:      Summary ``s`` ``(..., d)``, weights ``α`` ``(..., T)`` and the tape.
	:raises EmptySequenceError: If ``T`` is zero.
	:raises ShapeError:         If ``W_w`` doesn't match ``d``.
	"""
	if hidden.ndim < 2 or hidden.shape[-2] == 0:
		raise EmptySequenceError("attention_pool")
	if hidden.shape[-1] != params.Ww.shape[1]:
		raise ShapeError("attention_pool", "H", hidden.shape, "W_w", params.Ww.shape)

	u = Tanh(Affine(hidden, params.Ww, params.Bw))
	alphas = Softmax(u @ params.Uw, axis=-1)
	summary = np.sum(alphas[..., :, np.newaxis] * hidden, axis=-2)

	return summary, alphas, AttentionTape(hidden, u, alphas)


@export
def AttentionPoolBackward(tape: AttentionTape, gradSummary: np.ndarray, params: AttentionParameters) -> np.ndarray:
	"""
	Back-propagates through the attention pooling.

	:param tape:        Tape returned by :func:`AttentionPool`.
	:param gradSummary: Gradient w.r.t. ``s``.
	:param params:      Attention parameters; gradients of ``W_w``, ``b_w``, ``u_w`` are added to their store.
	:returns:           Gradient w.r.t. the encoded frames.
	"""
	hidden, u, alphas = tape.Hidden, tape.U, tape.Alphas

	gradHidden = alphas[..., :, np.newaxis] * gradSummary[..., np.newaxis, :]
	gradAlphas = np.sum(hidden * gradSummary[..., np.newaxis, :], axis=-1)
	gradScores = alphas * (gradAlphas - np.sum(alphas * gradAlphas, axis=-1, keepdims=True))
	gradU = gradScores[..., np.newaxis] * params.Uw
	gradPre = gradU * (1.0 - u * u)

	params.Accumulate("u_w", WeightGradient(gradScores[..., np.newaxis], u)[0])
	params.Accumulate("W_w", WeightGradient(gradPre, hidden))
	params.Accumulate("b_w", BiasGradient(gradPre))

	return gradHidden + gradPre @ params.Ww


@export
def LastStatePool(forwardLast: np.ndarray, backwardFirst: np.ndarray) -> np.ndarray:
	"""
	Concatenates the final forward state (frame ``T-1``) and the final backward state (frame ``0``).

	:param forwardLast:   Forward state after the last frame, ``(..., H)``.
	:param backwardFirst: Backward state after consuming frame 0, ``(..., H)``.
	:returns:             Concatenation ``(..., 2H)``.
	:raises ShapeError: If both states differ in length.
	"""
	if forwardLast.shape != backwardFirst.shape:
		raise ShapeError("laststate_pool", "forward", forwardLast.shape, "backward", backwardFirst.shape)

	return np.concatenate((forwardLast, backwardFirst), axis=-1)


@export
def PoolLastStates(hidden: np.ndarray, bidirectional: bool) -> np.ndarray:
	"""
	Applies :func:`LastStatePool` to an encoder output.

	:param hidden:        Encoded frames ``(..., T, d)``; for bidirectional encoders ``d = 2H`` as ``[forward, backward]``.
	:param bidirectional: Whether ``hidden`` holds both directions.
	:returns:             Pooled representation ``(..., d)``.
	"""
	if hidden.ndim < 2 or hidden.shape[-2] == 0:
		raise EmptySequenceError("laststate_pool")

	if not bidirectional:
		return hidden[..., -1, :]

	half = hidden.shape[-1] // 2
	return LastStatePool(hidden[..., -1, :half], hidden[..., 0, half:])


@export
def PoolLastStatesBackward(hiddenShape: Tuple[int, ...], gradPooled: np.ndarray, bidirectional: bool) -> np.ndarray:
	"""
	Scatters the gradient of :func:`PoolLastStates` back onto the encoded frames.

	:param hiddenShape:   Shape of the encoded frames.
	:param gradPooled:    Gradient w.r.t. the pooled representation.
	:param bidirectional: Whether the encoder output holds both directions.
	:returns:             Gradient w.r.t. the encoded frames.
	"""
	grad = np.zeros(hiddenShape)
	if not bidirectional:
		grad[..., -1, :] = gradPooled
	else:
		half = hiddenShape[-1] // 2
		grad[..., -1, :half] = gradPooled[..., :half]
		grad[..., 0, half:] = gradPooled[..., half:]

	return grad
