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
Multi-label scoring head and the training objective.

Every class is an independent binary decision: ``scores = σ(W_head·rep + b_head)``. The loss is the per-class binary
cross-entropy averaged over classes, plus the weighted alignment loss of projection fusion.
"""
from typing import FrozenSet, Iterable

import numpy as np

from pyTooling.Decorators  import export, readonly
from pyTooling.MetaClasses import ExtendedType

from pyMultimodalRNN.Exception import ShapeError, NumericError, ParameterError, ConsistencyError
from pyMultimodalRNN.Numeric   import Affine, Sigmoid, WeightGradient, BiasGradient, InitScheme, SeedLike
from pyMultimodalRNN.Parameter import ParameterStore


__all__ = ["LabelSet", "SCORE_CLAMP"]

LabelSet = FrozenSet[int]  #: Set of class ids in ``[0, num_classes)``.
SCORE_CLAMP = 1e-12        #: Scores are clamped to ``[SCORE_CLAMP, 1 - SCORE_CLAMP]`` inside the loss.


@export
def CreateLabelSet(labels: Iterable[int], numClasses: int, allowEmpty: bool = True) -> LabelSet:
	"""
	Validates class ids and returns them as a label set.

	:param labels:     Class ids.
	:param numClasses: Number of classes.
	:param allowEmpty: Whether an empty set is acceptable (prediction inputs) or not (training examples).
	:returns:          Frozen set of class ids.
	:raises ParameterError: On duplicates, out-of-range ids or a forbidden empty set.
	"""
	labelList = [int(label) for label in labels]
	labelSet = frozenset(labelList)
	if len(labelSet) != len(labelList):
		raise ParameterError(f"Label list {labelList} contains duplicates.")
	for label in labelSet:
		if not 0 <= label < numClasses:
			raise ParameterError(f"Label {label} is outside [0, {numClasses}).")
	if not labelSet and not allowEmpty:
		raise ParameterError("Training examples need at least one label.")

	return labelSet


@export
def LabelVector(truth: LabelSet, numClasses: int) -> np.ndarray:
	"""
	Returns the multi-hot encoding of a label set.

	:param truth:      Label set.
	:param numClasses: Number of classes.
	:returns:          Vector ``y`` with ``y[c] = 1`` iff ``c`` in ``truth``.
	"""
	y = np.zeros(numClasses)
	y[list(truth)] = 1.0
	return y


@export
class HeadParameters(metaclass=ExtendedType, slots=True):
	"""Named view onto ``head.W`` (``num_classes × rep_dim``) and ``head.b`` (``num_classes``)."""

	_store: ParameterStore

	def __init__(self, store: ParameterStore) -> None:
		self._store = store

	@classmethod
	def Create(cls, store: ParameterStore, numClasses: int, representationDim: int, scheme: InitScheme, seed: SeedLike) -> "HeadParameters":
		if numClasses < 1:
			raise ParameterError(f"Number of classes must be at least 1, got {numClasses}.")

		store.AddMatrix("head.W", numClasses, representationDim, scheme, seed)
		store.AddVector("head.b", numClasses)
		return cls(store)

	@readonly
	def W(self) -> np.ndarray:
		return self._store["head.W"]

	@readonly
	def B(self) -> np.ndarray:
		return self._store["head.b"]

	@readonly
	def NumClasses(self) -> int:
		return self.W.shape[0]

	@readonly
	def RepresentationDim(self) -> int:
		return self.W.shape[1]

	def Accumulate(self, symbol: str, gradient: np.ndarray) -> None:
		self._store.Accumulate(f"head.{symbol}", gradient)

	def Validate(self, numClasses: int, representationDim: int) -> None:
		if self.W.shape != (numClasses, representationDim) or self.B.shape != (numClasses, ):
			raise ConsistencyError(f"Head tensors {self.W.shape}, {self.B.shape} don't match {numClasses} classes over width {representationDim}.")


@export
def PredictLogits(representation: np.ndarray, params: HeadParameters) -> np.ndarray:
	if representation.shape[-1] != params.RepresentationDim:
		raise ShapeError("predict_scores", "rep", representation.shape, "W_head", params.W.shape)

	return Affine(representation, params.W, params.B)


@export
def PredictScores(representation: np.ndarray, params: HeadParameters) -> np.ndarray:
	"""
	Scores every class with an independent sigmoid.

	:param representation: Pooled representation ``(..., rep_dim)``.
	:param params:         Head parameters.
	:returns:              Scores in (0, 1), ``(..., num_classes)``.
	:raises ShapeError: If the representation width doesn't match the head.
	"""
	return Sigmoid(PredictLogits(representation, params))


@export
def HeadBackward(representation: np.ndarray, gradLogits: np.ndarray, params: HeadParameters) -> np.ndarray:
	"""
	Accumulates head gradients and returns the gradient w.r.t. the representation.

	:param representation: Representation fed to the head.
	:param gradLogits:     Gradient w.r.t. the logits.
	:param params:         Head parameters.
	:returns:              Gradient w.r.t. ``representation``.
	"""
	params.Accumulate("W", WeightGradient(gradLogits, representation))
	params.Accumulate("b", BiasGradient(gradLogits))
	return gradLogits @ params.W


def _ClampedScores(scores: np.ndarray) -> np.ndarray:
	clamped = np.clip(scores, SCORE_CLAMP, 1.0 - SCORE_CLAMP)
	if not np.all((clamped > 0.0) & (clamped < 1.0)):
		raise NumericError("scores", f"Scores outside (0, 1) after clamping: {scores}")

	return clamped


@export
def BCELoss(scores: np.ndarray, truth: np.ndarray) -> np.ndarray:
	"""
	Binary cross-entropy averaged over classes.

	:param scores: Scores ``(..., C)``.
	:param truth:  Multi-hot targets ``(..., C)`` (see :func:`LabelVector`).
	:returns:      Loss per row ``(...)``.
	:raises NumericError: If a score is NaN (it stays outside (0, 1) after clamping).
	"""
	clamped = _ClampedScores(scores)
	return -np.mean(truth * np.log(clamped) + (1.0 - truth) * np.log(1.0 - clamped), axis=-1)


@export
def BCELossGradient(scores: np.ndarray, truth: np.ndarray) -> np.ndarray:
	"""
	Gradient of :func:`BCELoss` w.r.t. the logits, i.e. ``(scores - truth) / C``.

	:param scores: Scores ``(..., C)``.
	:param truth:  Multi-hot targets ``(..., C)``.
	:returns:      Gradient w.r.t. the logits.
	"""
	return (scores - truth) / scores.shape[-1]


@export
def TotalLoss(bce: float, alignLoss: float, lambdaAlign: float) -> float:
	"""
	Combines classification loss and alignment loss: ``bce + λ·align``.

	:param bce:         Classification loss.
	:param alignLoss:   Alignment loss.
	:param lambdaAlign: Alignment weight.
	:returns:           Training objective.
	"""
	return bce + lambdaAlign * alignLoss

