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
Ranking evaluation (global average precision at ``k``) and the GAP-weighted ensemble of several models.

GAP pools the top-``k`` predictions of every video, sorts them globally by confidence and sums ``p(i)·Δr(i)``, where
``p(i)`` is the precision of the first ``i`` predictions and ``Δr(i)`` is ``1/P`` for a correct prediction (``P`` is the
number of ground-truth pairs) and 0 otherwise.
"""
from json    import dump
from logging import getLogger
from math    import isfinite
from pathlib import Path
from typing  import Any, Dict, Iterable, Iterator, List, Mapping, NamedTuple, Sequence, Tuple, Optional as Nullable

import numpy as np

from pyTooling.Decorators  import export, readonly
from pyTooling.MetaClasses import ExtendedType

from pyMultimodalRNN.Exception  import ParameterError, InputError, DegenerateWeightsError
from pyMultimodalRNN.Classifier import LabelSet


__all__ = ["DEFAULT_TOP_K"]

DEFAULT_TOP_K = 20  #: Number of predictions retained per video.

_logger = getLogger(__name__)

Prediction = Tuple[int, float]


def _Ranked(pairs: Iterable[Prediction], k: Nullable[int]) -> List[Prediction]:
	ranked = sorted(pairs, key=lambda pair: (-pair[1], pair[0]))
	return ranked if k is None else ranked[:k]


@export
class PredictionSet(metaclass=ExtendedType, slots=True):
	"""
	Per video id, a list of ``(class id, confidence)`` pairs.

	Class ids are unique per video and confidences are finite. Pairs are kept in the order they were given.
	"""

	_predictions: Dict[str, List[Prediction]]

	def __init__(self, predictions: Nullable[Mapping[str, Iterable[Prediction]]] = None) -> None:
		self._predictions = {}
		if predictions is not None:
			for videoID, pairs in predictions.items():
				self.Add(videoID, pairs)

	def Add(self, videoID: str, pairs: Iterable[Prediction]) -> None:
		"""
		Adds the predictions of one video.

		:param videoID: Video id.
		:param pairs:   ``(class id, confidence)`` pairs.
		:raises InputError: If the video exists already, a class id repeats or a confidence isn't finite.
		"""
		if videoID in self._predictions:
			raise InputError(f"Predictions for video '{videoID}' given twice.", (videoID, ))

		checked = [(int(classID), float(confidence)) for classID, confidence in pairs]
		classIDs = [classID for classID, _ in checked]
		if len(set(classIDs)) != len(classIDs):
			raise InputError(f"Predictions for video '{videoID}' repeat a class id: {classIDs}", (videoID, ))
		for classID, confidence in checked:
			if not isfinite(confidence):
				raise InputError(f"Prediction for class {classID} of video '{videoID}' has confidence {confidence}.", (videoID, ))

		self._predictions[videoID] = checked

	@readonly
	def VideoIDs(self) -> List[str]:
		return list(self._predictions)

	def TopK(self, k: Nullable[int]) -> "PredictionSet":
		"""
		Returns the ``k`` most confident predictions per video (ties: ascending class id), ordered by descending confidence.

		:param k: Number of predictions to keep; ``None`` keeps all.
		:returns: New prediction set.
		"""
		return PredictionSet({videoID: _Ranked(pairs, k) for videoID, pairs in self._predictions.items()})

	def __getitem__(self, videoID: str) -> List[Prediction]:
		return self._predictions[videoID]

	def __contains__(self, videoID: str) -> bool:
		return videoID in self._predictions

	def __iter__(self) -> Iterator[Tuple[str, List[Prediction]]]:
		return iter(self._predictions.items())

	def __len__(self) -> int:
		return len(self._predictions)

	def __str__(self) -> str:
		return f"PredictionSet: {len(self._predictions)} videos"


@export
class GroundTruth(metaclass=ExtendedType, slots=True):
	"""Per video id, the set of true class ids."""

	_labels: Dict[str, LabelSet]

	def __init__(self, labels: Mapping[str, Iterable[int]]) -> None:
		self._labels = {videoID: frozenset(int(label) for label in classIDs) for videoID, classIDs in labels.items()}

	@classmethod
	def FromExamples(cls, examples: Iterable[Any]) -> "GroundTruth":
		"""
		Collects the labels of dataset examples.

		:param examples: Objects with ``VideoID`` and ``Labels``.
		:returns:        Ground truth.
		"""
		return cls({example.VideoID: example.Labels for example in examples})

	@readonly
	def Positives(self) -> int:
		"""
		Read-only property returning the number of ground-truth ``(video, label)`` pairs.

		:returns: Number of pairs ``P``.
		"""
		return sum(len(labels) for labels in self._labels.values())

	def __getitem__(self, videoID: str) -> LabelSet:
		return self._labels[videoID]

	def __contains__(self, videoID: str) -> bool:
		return videoID in self._labels

	def __len__(self) -> int:
		return len(self._labels)


@export
class LedgerEntry(NamedTuple):
	"""One retained prediction in global ranking order."""

	Confidence: float
	Correct:    bool
	VideoID:    str
	ClassID:    int


@export
def GapFromLedger(ledger: Sequence[LedgerEntry], positives: int) -> float:
	"""
	Sums ``p(i)·Δr(i)`` over a globally sorted ledger.

	:param ledger:    Retained predictions in ranking order.
	:param positives: Number of ground-truth pairs ``P``.
	:returns:         Global average precision; 0 if ``P`` is zero.
	"""
	if positives == 0:
		return 0.0

	gap = 0.0
	hits = 0
	for rank, entry in enumerate(ledger, start=1):
		if entry.Correct:
			hits += 1
			gap += (hits / rank) / positives

	return gap


@export
class GapReport(metaclass=ExtendedType, slots=True):
	"""Result of :func:`GapAtK`: the score, the number of retained predictions and the ranking ledger."""

	_gap:       float
	_k:         Nullable[int]
	_positives: int
	_ledger:    List[LedgerEntry]

	def __init__(self, gap: float, k: Nullable[int], positives: int, ledger: List[LedgerEntry]) -> None:
		self._gap = gap
		self._k = k
		self._positives = positives
		self._ledger = ledger

	@readonly
	def GAP(self) -> float:
		return self._gap

	@readonly
	def K(self) -> Nullable[int]:
		return self._k

	@readonly
	def N(self) -> int:
		return len(self._ledger)

	@readonly
	def Positives(self) -> int:
		return self._positives

	@readonly
	def Ledger(self) -> List[LedgerEntry]:
		return self._ledger

	def Recompute(self) -> float:
		return GapFromLedger(self._ledger, self._positives)

	def ToDict(self) -> Dict[str, Any]:
		return {
			"gap":       self._gap,
			"k":         self._k,
			"n":         self.N,
			"positives": self._positives,
			"ledger":    [[entry.Confidence, entry.Correct, entry.VideoID, entry.ClassID] for entry in self._ledger],
		}

	def __str__(self) -> str:
		return f"GAP@{self._k if self._k is not None else 'all'} = {self._gap:.6f} ({self.N} predictions, {self._positives} positives)"


@export
def GapAtK(predictions: PredictionSet, truth: GroundTruth, k: Nullable[int] = DEFAULT_TOP_K) -> GapReport:
	"""
	Computes the global average precision of the top-``k`` predictions per video.

	Each video keeps ``min(k, available)`` predictions (ties: ascending class id). The pooled predictions are sorted by
	descending confidence, ties by ascending video id, then class id.

	:param predictions: Predictions per video.
	:param truth:       Ground truth; must contain every predicted video.
	:param k:           Predictions kept per video; ``None`` keeps all.
	:returns:           GAP report.
	:raises ParameterError: If ``k < 1``.
	:raises InputError:     If a predicted video is missing in ``truth``.
	"""
	if k is not None and k < 1:
		raise ParameterError(f"GAP needs k >= 1, got {k}.")

	unknown = tuple(videoID for videoID in predictions.VideoIDs if videoID not in truth)
	if unknown:
		ex = InputError(f"{len(unknown)} predicted videos are missing in the ground truth.", unknown)
		ex.add_note(f"First unknown video id: '{unknown[0]}'")
		raise ex

	ledger: List[LedgerEntry] = []
	for videoID, pairs in predictions:
		labels = truth[videoID]
		for classID, confidence in _Ranked(pairs, k):
			ledger.append(LedgerEntry(confidence, classID in labels, videoID, classID))

	ledger.sort(key=lambda entry: (-entry.Confidence, entry.VideoID, entry.ClassID))
	positives = truth.Positives
	return GapReport(GapFromLedger(ledger, positives), k, positives, ledger)


@export
def EnsembleWeights(modelGaps: Sequence[float]) -> np.ndarray:
	"""
	Normalizes model scores into convex weights ``α_i = GAP_i / Σ GAP_j``.

	:param modelGaps: GAP of every model.
	:returns:         Weights summing to 1.
	:raises ParameterError:         If no model is given or a GAP is negative.
	:raises DegenerateWeightsError: If all GAPs are zero.
	"""
	gaps = np.asarray(modelGaps, dtype=np.float64)
	if gaps.size == 0:
		raise ParameterError("An ensemble needs at least one model.")
	if np.any(gaps < 0.0) or not np.all(np.isfinite(gaps)):
		raise ParameterError(f"Ensemble GAPs must be finite and non-negative, got {list(modelGaps)}.")

	total = float(np.sum(gaps))
	if total == 0.0:
		raise DegenerateWeightsError("All ensemble member GAPs are zero; weights are undefined.")

	return gaps / total


@export
def EnsembleCombine(modelPredictions: Sequence[PredictionSet], modelGaps: Sequence[float], k: Nullable[int] = DEFAULT_TOP_K) -> PredictionSet:
	"""
	Combines several models' predictions, weighting each model by its share of the summed GAP.

	A class missing in a model's list contributes 0 to that video's combined score.

	:param modelPredictions: Predictions of every model.
	:param modelGaps:        GAP of every model.
	:param k:                Combined predictions kept per video; ``None`` keeps all.
	:returns:                Top-``k`` classes per video by combined score.
	:raises ParameterError:         If the counts of prediction sets and GAPs differ.
	:raises DegenerateWeightsError: If all GAPs are zero.
	:raises InputError:             If the prediction sets cover different videos.
	"""
	if len(modelPredictions) != len(modelGaps):
		raise ParameterError(f"Got {len(modelPredictions)} prediction sets but {len(modelGaps)} GAPs.")

	weights = EnsembleWeights(modelGaps)

	videoIDs = modelPredictions[0].VideoIDs
	reference = set(videoIDs)
	for index, predictions in enumerate(modelPredictions[1:], start=1):
		other = set(predictions.VideoIDs)
		if other != reference:
			mismatch = tuple(sorted(reference ^ other))
			ex = InputError(f"Prediction set {index} covers different videos than prediction set 0.", mismatch)
			ex.add_note(f"{len(mismatch)} videos appear in only one of both sets.")
			raise ex

	combined = PredictionSet()
	for videoID in videoIDs:
		scores: Dict[int, float] = {}
		for weight, predictions in zip(weights, modelPredictions):
			for classID, confidence in predictions[videoID]:
				scores[classID] = scores.get(classID, 0.0) + float(weight) * confidence
		combined.Add(videoID, _Ranked(scores.items(), k))

	_logger.info(f"Combined {len(modelPredictions)} models with weights {[round(float(w), 6) for w in weights]} over {len(videoIDs)} videos.")
	return combined


@export
def Predict(model: Any, examples: Sequence[Any], k: Nullable[int] = DEFAULT_TOP_K) -> PredictionSet:
	"""
	Scores examples with a model and keeps the ``k`` best classes per video.

	:param model:    Object with ``Score(examples) -> (N, C) scores``, e.g. :class:`~pyMultimodalRNN.MultimodalModel`.
	:param examples: Examples with a ``VideoID``.
	:param k:        Predictions kept per video; ``None`` keeps all.
	:returns:        Prediction set in example order.
	"""
	predictions = PredictionSet()
	if len(examples) == 0:
		return predictions

	scores = model.Score(examples)
	for example, row in zip(examples, scores):
		predictions.Add(example.VideoID, _Ranked(enumerate(row.tolist()), k))

	return predictions


@export
def WriteGapReport(report: GapReport, path: Path) -> None:
	"""
	Writes a GAP report as JSON.

	:param report: GAP report.
	:param path:   Target file.
	"""
	with path.open("w", encoding="utf-8") as file:
		dump(report.ToDict(), file, indent=2)
		file.write("\n")

	_logger.info(f"Wrote GAP report with {report.N} ledger entries to '{path}'.")
