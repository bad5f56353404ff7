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
Dataset schema, the planted-signal synthetic corpus, dataset files and the prediction CSV.

A record mirrors a video-level plus frame-level feature record: ``video_id``, ``labels``, per-frame ``rgb`` and
``audio`` features and their per-video means ``mean_rgb`` and ``mean_audio``. Every record also names its ``split``.

Two file formats share this schema:

* JSON-lines text (default): a header line, then one record per line.
* Binary (``.bin`` suffix): magic bytes, a length-prefixed JSON header, then per record a length-prefixed JSON meta
  record followed by the raw little-endian float64 arrays ``rgb``, ``audio``, ``mean_rgb``, ``mean_audio``.
"""
from enum    import unique, Enum
from json    import dumps, loads, JSONDecodeError
from logging import getLogger
from pathlib import Path
from struct  import pack, unpack, error as StructError
from typing  import Any, BinaryIO, Dict, Iterable, Iterator, List, Set, Union, Optional as Nullable

import numpy as np

from pyTooling.Decorators  import export, readonly
from pyTooling.MetaClasses import ExtendedType

from pyMultimodalRNN.Exception  import ParameterError, DatasetParseError, DatasetValidationError, FormatVersionError
from pyMultimodalRNN.Numeric    import CreateGenerator
from pyMultimodalRNN.Classifier import LabelSet
from pyMultimodalRNN.Evaluation import PredictionSet


__all__ = ["DATASET_FORMAT", "DATASET_VERSION", "BINARY_MAGIC", "MEAN_TOLERANCE", "PREDICTION_HEADER"]

DATASET_FORMAT = "pyMultimodalRNN-dataset"   #: Format name in every dataset header.
DATASET_VERSION = 1                           #: Loaders reject other versions.
BINARY_MAGIC = b"MMRNNDS\x00"                 #: First bytes of a binary dataset file.
MEAN_TOLERANCE = 1e-9                         #: Allowed deviation of stored means from the column means of the frames.
PREDICTION_HEADER = "VideoId,LabelConfidencePairs"

_logger = getLogger(__name__)


@export
@unique
class DatasetSplit(Enum):
	"""Partition a record belongs to."""

	Train = 0  #: Used for training.
	Test =  1  #: Used for validation, evaluation and prediction.

	@classmethod
	def Parse(cls, value: Union[str, "DatasetSplit"]) -> "DatasetSplit":
		if isinstance(value, cls):
			return value

		try:
			return {"train": cls.Train, "test": cls.Test}[str(value).lower()]
		except KeyError:
			raise ParameterError(f"Value '{value!s}' cannot be parsed to member of {cls.__name__}.")

	def __str__(self) -> str:
		return ("train", "test")[self.value]


@export
class FrameExample(metaclass=ExtendedType, slots=True):
	"""
	One video: id, label set, per-frame visual and audio features and their per-video means.

	If no means are given, they are computed as the column means of the frame matrices.
	"""

	_videoID:    str
	_labels:     LabelSet
	_visual:     np.ndarray
	_audio:      np.ndarray
	_meanVisual: np.ndarray
	_meanAudio:  np.ndarray
	_split:      DatasetSplit

	def __init__(
		self,
		videoID: str,
		labels: Iterable[int],
		visual: np.ndarray,
		audio: np.ndarray,
		meanVisual: Nullable[np.ndarray] = None,
		meanAudio: Nullable[np.ndarray] = None,
		split: DatasetSplit = DatasetSplit.Train
	) -> None:
		self._videoID = videoID
		self._labels = frozenset(int(label) for label in labels)
		self._visual = np.asarray(visual, dtype=np.float64)
		self._audio = np.asarray(audio, dtype=np.float64)
		self._meanVisual = np.mean(self._visual, axis=0) if meanVisual is None else np.asarray(meanVisual, dtype=np.float64)
		self._meanAudio = np.mean(self._audio, axis=0) if meanAudio is None else np.asarray(meanAudio, dtype=np.float64)
		self._split = split

	@readonly
	def VideoID(self) -> str:
		return self._videoID

	@readonly
	def Labels(self) -> LabelSet:
		return self._labels

	@readonly
	def Visual(self) -> np.ndarray:
		return self._visual

	@readonly
	def Audio(self) -> np.ndarray:
		return self._audio

	@readonly
	def MeanVisual(self) -> np.ndarray:
		return self._meanVisual

	@readonly
	def MeanAudio(self) -> np.ndarray:
		return self._meanAudio

	@readonly
	def Split(self) -> DatasetSplit:
		return self._split

	@readonly
	def NumFrames(self) -> int:
		return self._visual.shape[0]

	def Validate(self, recordIndex: int, numClasses: int, maxFrames: int, visualDim: int, audioDim: int) -> None:
		"""
		Checks the record against the dataset header.

		:param recordIndex: Index of the record (for error messages).
		:param numClasses:  Number of classes ``C``.
		:param maxFrames:   Maximum number of frames ``T``.
		:param visualDim:   Visual width ``D_v``.
		:param audioDim:    Audio width ``D_a``.
		:raises DatasetValidationError: On any violation.
		"""
		def fail(reason: str) -> None:
			raise DatasetValidationError(recordIndex, self._videoID, reason)

		if self._visual.ndim != 2 or self._visual.shape[1] != visualDim:
			fail(f"visual frames have shape {self._visual.shape}, expected (T, {visualDim}).")
		if self._audio.ndim != 2 or self._audio.shape[1] != audioDim:
			fail(f"audio frames have shape {self._audio.shape}, expected (T, {audioDim}).")
		if self._visual.shape[0] != self._audio.shape[0]:
			fail(f"{self._visual.shape[0]} visual frames but {self._audio.shape[0]} audio frames.")
		if not 1 <= self._visual.shape[0] <= maxFrames:
			fail(f"{self._visual.shape[0]} frames, expected 1 to {maxFrames}.")
		if self._meanVisual.shape != (visualDim, ) or self._meanAudio.shape != (audioDim, ):
			fail(f"mean vectors have shapes {self._meanVisual.shape} and {self._meanAudio.shape}.")
		if not self._labels or any(not 0 <= label < numClasses for label in self._labels):
			fail(f"labels {sorted(self._labels)} aren't a non-empty subset of [0, {numClasses}).")
		if not (np.all(np.isfinite(self._visual)) and np.all(np.isfinite(self._audio))):
			fail("frames contain non-finite values.")

		deviation = max(
			float(np.max(np.abs(np.mean(self._visual, axis=0) - self._meanVisual))),
			float(np.max(np.abs(np.mean(self._audio, axis=0) - self._meanAudio)))
		)
		if not deviation <= MEAN_TOLERANCE:
			fail(f"mean vectors deviate from the frame means by {deviation:.3e}.")

	def __eq__(self, other: Any) -> bool:
		if not isinstance(other, FrameExample):
			return NotImplemented

		return (
			self._videoID == other._videoID and self._labels == other._labels and self._split is other._split and
			np.array_equal(self._visual, other._visual) and np.array_equal(self._audio, other._audio) and
			np.array_equal(self._meanVisual, other._meanVisual) and np.array_equal(self._meanAudio, other._meanAudio)
		)

	__hash__ = None  # type: ignore[assignment]

	def __str__(self) -> str:
		return f"FrameExample '{self._videoID}': {self.NumFrames} frames, labels {sorted(self._labels)}"


@export
class DatasetSpec(metaclass=ExtendedType, slots=True):
	"""Parameters of a synthetic planted-signal corpus."""

	_numVideos:      int
	_numClasses:     int
	_numFrames:      int
	_visualDim:      int
	_audioDim:       int
	_labelsPerVideo: float
	_seed:           int
	_signalStrength: float
	_testFraction:   float

	def __init__(
		self,
		numVideos: int = 2500,
		numClasses: int = 10,
		numFrames: int = 20,
		visualDim: int = 16,
		audioDim: int = 4,
		labelsPerVideo: float = 2.0,
		seed: int = 0,
		signalStrength: float = 3.0,
		testFraction: float = 0.2
	) -> None:
		"""
		Initializes a corpus description; the default is 2000 training and 500 test videos.

		:raises ParameterError: If a count isn't positive, ``labelsPerVideo`` isn't in ``[1, C]`` or ``T < 2``.
		"""
		for name, value in (("numVideos", numVideos), ("numClasses", numClasses), ("visualDim", visualDim), ("audioDim", audioDim)):
			if value < 1:
				raise ParameterError(f"Dataset parameter '{name}' must be at least 1, got {value}.")
		if numFrames < 2:
			raise ParameterError(f"Planted signals need at least 2 frames, got {numFrames}.")
		if labelsPerVideo > numClasses:
			raise ParameterError(f"Cannot average {labelsPerVideo} labels per video with only {numClasses} classes.")
		if labelsPerVideo < 1.0 or (numClasses == 1 and labelsPerVideo != 1.0):
			raise ParameterError(f"Mean labels per video must be in [1, {numClasses}], got {labelsPerVideo}.")
		if signalStrength < 0.0:
			raise ParameterError(f"Signal strength must not be negative, got {signalStrength}.")
		if not 0.0 <= testFraction < 1.0:
			raise ParameterError(f"Test fraction must be in [0, 1), got {testFraction}.")

		self._numVideos = numVideos
		self._numClasses = numClasses
		self._numFrames = numFrames
		self._visualDim = visualDim
		self._audioDim = audioDim
		self._labelsPerVideo = labelsPerVideo
		self._seed = seed
		self._signalStrength = signalStrength
		self._testFraction = testFraction

	@readonly
	def NumVideos(self) -> int:
		return self._numVideos

	@readonly
	def NumClasses(self) -> int:
		return self._numClasses

	@readonly
	def NumFrames(self) -> int:
		return self._numFrames

	@readonly
	def VisualDim(self) -> int:
		return self._visualDim

	@readonly
	def AudioDim(self) -> int:
		return self._audioDim

	@readonly
	def LabelsPerVideo(self) -> float:
		return self._labelsPerVideo

	@readonly
	def Seed(self) -> int:
		return self._seed

	@readonly
	def SignalStrength(self) -> float:
		return self._signalStrength

	@readonly
	def NumTest(self) -> int:
		return int(round(self._numVideos * self._testFraction))


@export
class Dataset(metaclass=ExtendedType, slots=True):
	"""A dataset header (``C``, ``T``, ``D_v``, ``D_a``) plus its records in file order."""

	_numClasses: int
	_numFrames:  int
	_visualDim:  int
	_audioDim:   int
	_examples:   List[FrameExample]

	def __init__(self, numClasses: int, numFrames: int, visualDim: int, audioDim: int, examples: Iterable[FrameExample] = ()) -> None:
		self._numClasses = numClasses
		self._numFrames = numFrames
		self._visualDim = visualDim
		self._audioDim = audioDim
		self._examples = list(examples)

	@readonly
	def NumClasses(self) -> int:
		return self._numClasses

	@readonly
	def NumFrames(self) -> int:
		"""
		Read-only property returning the maximum number of frames of a record.

		:returns: ``T`` as stored in the header.
		"""
		return self._numFrames

	@readonly
	def VisualDim(self) -> int:
		return self._visualDim

	@readonly
	def AudioDim(self) -> int:
		return self._audioDim

	@readonly
	def Examples(self) -> List[FrameExample]:
		return self._examples

	@readonly
	def Train(self) -> List[FrameExample]:
		return self.Split(DatasetSplit.Train)

	@readonly
	def Test(self) -> List[FrameExample]:
		return self.Split(DatasetSplit.Test)

	def Split(self, split: DatasetSplit) -> List[FrameExample]:
		return [example for example in self._examples if example.Split is split]

	def Validate(self) -> None:
		"""
		Validates all records against the header.

		:raises DatasetValidationError: On the first invalid record or a repeated video id.
		"""
		seen: Set[str] = set()
		for index, example in enumerate(self._examples):
			example.Validate(index, self._numClasses, self._numFrames, self._visualDim, self._audioDim)
			if example.VideoID in seen:
				raise DatasetValidationError(index, example.VideoID, "duplicate video id")
			seen.add(example.VideoID)

	def HeaderDict(self) -> Dict[str, Any]:
		return {
			"format":      DATASET_FORMAT,
			"version":     DATASET_VERSION,
			"num_classes": self._numClasses,
			"num_frames":  self._numFrames,
			"visual_dim":  self._visualDim,
			"audio_dim":   self._audioDim,
			"num_videos":  len(self._examples),
		}

	def __getitem__(self, index: int) -> FrameExample:
		return self._examples[index]

	def __iter__(self) -> Iterator[FrameExample]:
		return iter(self._examples)

	def __len__(self) -> int:
		return len(self._examples)

	def __str__(self) -> str:
		return f"Dataset: {len(self._examples)} videos, C={self._numClasses}, T={self._numFrames}, D_v={self._visualDim}, D_a={self._audioDim}"


def _SignalPositions(numClasses: int, numFrames: int, generator: np.random.Generator) -> np.ndarray:
	if numFrames >= 2 * numClasses:
		slots = generator.permutation(numFrames)[:2 * numClasses].reshape(numClasses, 2)
	else:
		slots = np.stack([generator.choice(numFrames, size=2, replace=False) for _ in range(numClasses)])

	return np.sort(slots, axis=1)


@export
def GenerateSynthetic(spec: DatasetSpec) -> Dataset:
	"""
	Generates a planted-signal corpus whose labels are encoded in the frame order only.

	Every class ``c`` owns a unit pattern ``p_c`` over the concatenated visual and audio features and two frame positions
	``a_c < b_c``. On top of standard normal noise, every video adds ``+S·p_c`` at ``a_c`` and ``-S·p_c`` at ``b_c`` if it
	carries label ``c``, and the reverse order otherwise. Mean vectors therefore don't depend on the labels.

	The number of labels per video is ``1 + Binomial(C-1, (m-1)/(C-1))`` for ``m`` mean labels, the labels themselves are
	drawn uniformly without replacement. The last ``NumTest`` videos form the test split.

	:param spec: Corpus description.
	:returns:    Dataset; identical for identical specs.
	"""
	generator = CreateGenerator(spec.Seed)
	numClasses, numFrames = spec.NumClasses, spec.NumFrames
	visualDim = spec.VisualDim
	width = visualDim + spec.AudioDim

	patterns = generator.standard_normal((numClasses, width))
	patterns /= np.linalg.norm(patterns, axis=1, keepdims=True)
	positions = _SignalPositions(numClasses, numFrames, generator)
	extraProbability = (spec.LabelsPerVideo - 1.0) / (numClasses - 1) if numClasses > 1 else 0.0
	firstTest = spec.NumVideos - spec.NumTest

	examples = []
	for index in range(spec.NumVideos):
		count = 1 + int(generator.binomial(numClasses - 1, extraProbability)) if numClasses > 1 else 1
		labels = generator.choice(numClasses, size=count, replace=False)
		signs = -np.ones(numClasses)
		signs[labels] = 1.0

		frames = generator.standard_normal((numFrames, width))
		for classID in range(numClasses):
			signal = (spec.SignalStrength * signs[classID]) * patterns[classID]
			frames[positions[classID, 0]] += signal
			frames[positions[classID, 1]] -= signal

		split = DatasetSplit.Test if index >= firstTest else DatasetSplit.Train
		examples.append(FrameExample(f"video{index:06d}", labels.tolist(), frames[:, :visualDim], frames[:, visualDim:], split=split))

	dataset = Dataset(numClasses, numFrames, visualDim, spec.AudioDim, examples)
	_logger.info(f"Generated {dataset!s} ({len(dataset) - spec.NumTest} train, {spec.NumTest} test, seed {spec.Seed}).")
	return dataset


def _RecordMeta(example: FrameExample) -> Dict[str, Any]:
	return {"video_id": example.VideoID, "split": str(example.Split), "labels": sorted(example.Labels)}


def _IsBinary(path: Path) -> bool:
	return path.suffix.lower() == ".bin"


def _CheckHeader(path: Path, header: Any) -> Dataset:
	if not isinstance(header, dict) or header.get("format") != DATASET_FORMAT:
		raise DatasetParseError(path, -1, "format", f"Header doesn't declare format '{DATASET_FORMAT}'.")
	if header.get("version") != DATASET_VERSION:
		raise FormatVersionError(path, header.get("version"), DATASET_VERSION)

	try:
		return Dataset(int(header["num_classes"]), int(header["num_frames"]), int(header["visual_dim"]), int(header["audio_dim"]))
	except (KeyError, TypeError, ValueError) as ex:
		raise DatasetParseError(path, -1, ex.args[0] if isinstance(ex, KeyError) else "header", "Incomplete dataset header.") from ex


def _Field(path: Path, index: int, record: Dict[str, Any], name: str) -> Any:
	try:
		return record[name]
	except KeyError:
		raise DatasetParseError(path, index, name, "Field is missing.")


def _Matrix(path: Path, index: int, record: Dict[str, Any], name: str, ndim: int) -> np.ndarray:
	try:
		array = np.array(_Field(path, index, record, name), dtype=np.float64)
	except (TypeError, ValueError) as ex:
		raise DatasetParseError(path, index, name, "Not a numeric array.") from ex
	if array.ndim != ndim:
		raise DatasetParseError(path, index, name, f"Expected {ndim} dimensions, got {array.ndim}.")

	return array


def _TextRecord(path: Path, index: int, line: str) -> FrameExample:
	try:
		record = loads(line)
	except JSONDecodeError as ex:
		raise DatasetParseError(path, index, "record", f"Malformed JSON: {ex.msg}.") from ex
	if not isinstance(record, dict):
		raise DatasetParseError(path, index, "record", "Record isn't a JSON object.")

	meta = _RecordFields(path, index, record)
	return FrameExample(
		meta["video_id"],
		meta["labels"],
		_Matrix(path, index, record, "rgb", 2),
		_Matrix(path, index, record, "audio", 2),
		_Matrix(path, index, record, "mean_rgb", 1),
		_Matrix(path, index, record, "mean_audio", 1),
		meta["split"]
	)


def _RecordFields(path: Path, index: int, record: Dict[str, Any]) -> Dict[str, Any]:
	videoID = _Field(path, index, record, "video_id")
	if not isinstance(videoID, str):
		raise DatasetParseError(path, index, "video_id", "Not a string.")
	labels = _Field(path, index, record, "labels")
	if not isinstance(labels, list) or not all(isinstance(label, int) and not isinstance(label, bool) for label in labels):
		raise DatasetParseError(path, index, "labels", "Not a list of integers.")
	if len(set(labels)) != len(labels):
		raise DatasetParseError(path, index, "labels", f"Repeated labels in {labels}.")
	try:
		split = DatasetSplit.Parse(_Field(path, index, record, "split"))
	except ParameterError as ex:
		raise DatasetParseError(path, index, "split", str(ex)) from ex

	return {"video_id": videoID, "labels": labels, "split": split}


def _WriteText(dataset: Dataset, path: Path) -> None:
	with path.open("w", encoding="utf-8") as file:
		file.write(dumps(dataset.HeaderDict()) + "\n")
		for example in dataset:
			record = _RecordMeta(example)
			record["rgb"] = example.Visual.tolist()
			record["audio"] = example.Audio.tolist()
			record["mean_rgb"] = example.MeanVisual.tolist()
			record["mean_audio"] = example.MeanAudio.tolist()
			file.write(dumps(record) + "\n")


def _ReadText(path: Path) -> Dataset:
	with path.open("r", encoding="utf-8") as file:
		headerLine = file.readline()
		try:
			header = loads(headerLine)
		except JSONDecodeError as ex:
			raise DatasetParseError(path, -1, "header", f"Malformed JSON: {ex.msg}.") from ex

		dataset = _CheckHeader(path, header)
		for index, line in enumerate(file):
			if line.strip() == "":
				continue
			dataset.Examples.append(_TextRecord(path, index, line))

	expected = header.get("num_videos")
	if expected is not None and len(dataset) != expected:
		raise DatasetParseError(path, len(dataset), "record", f"File ends after {len(dataset)} of {expected} records.")

	return dataset


def _WriteChunk(file: BinaryIO, payload: bytes) -> None:
	file.write(pack("<I", len(payload)))
	file.write(payload)


def _ReadExact(file: BinaryIO, size: int, path: Path, index: int, fieldName: str) -> bytes:
	data = file.read(size)
	if len(data) != size:
		raise DatasetParseError(path, index, fieldName, f"File ends after {len(data)} of {size} bytes.")

	return data


def _WriteBinary(dataset: Dataset, path: Path) -> None:
	with path.open("wb") as file:
		file.write(BINARY_MAGIC)
		_WriteChunk(file, dumps(dataset.HeaderDict()).encode("utf-8"))
		for example in dataset:
			meta = _RecordMeta(example)
			meta["frames"] = example.NumFrames
			_WriteChunk(file, dumps(meta).encode("utf-8"))
			for array in (example.Visual, example.Audio, example.MeanVisual, example.MeanAudio):
				file.write(np.ascontiguousarray(array, dtype="<f8").tobytes())


def _ReadBinary(path: Path) -> Dataset:
	with path.open("rb") as file:
		if file.read(len(BINARY_MAGIC)) != BINARY_MAGIC:
			raise DatasetParseError(path, -1, "magic", "Not a binary dataset file.")

		try:
			(length, ) = unpack("<I", _ReadExact(file, 4, path, -1, "header"))
			header = loads(_ReadExact(file, length, path, -1, "header").decode("utf-8"))
		except (StructError, JSONDecodeError, UnicodeDecodeError) as ex:
			raise DatasetParseError(path, -1, "header", "Malformed binary header.") from ex

		dataset = _CheckHeader(path, header)
		visualDim, audioDim = dataset.VisualDim, dataset.AudioDim
		for index in range(int(header.get("num_videos", 0))):
			try:
				(length, ) = unpack("<I", _ReadExact(file, 4, path, index, "record"))
				record = loads(_ReadExact(file, length, path, index, "record").decode("utf-8"))
			except (JSONDecodeError, UnicodeDecodeError) as ex:
				raise DatasetParseError(path, index, "record", "Malformed record meta data.") from ex
			if not isinstance(record, dict):
				raise DatasetParseError(path, index, "record", "Record isn't a JSON object.")

			meta = _RecordFields(path, index, record)
			frames = _Field(path, index, record, "frames")
			if not isinstance(frames, int) or frames < 0:
				raise DatasetParseError(path, index, "frames", "Not a frame count.")

			arrays = []
			for fieldName, shape in (("rgb", (frames, visualDim)), ("audio", (frames, audioDim)), ("mean_rgb", (visualDim, )), ("mean_audio", (audioDim, ))):
				size = int(np.prod(shape)) * 8
				arrays.append(np.frombuffer(_ReadExact(file, size, path, index, fieldName), dtype="<f8").reshape(shape).astype(np.float64))

			dataset.Examples.append(FrameExample(meta["video_id"], meta["labels"], *arrays, split=meta["split"]))

	return dataset


@export
def WriteDataset(dataset: Dataset, path: Path) -> None:
	"""
	Writes a dataset; the ``.bin`` suffix selects the binary format, anything else JSON-lines.

	:param dataset: Dataset to write.
	:param path:    Target file.
	"""
	if _IsBinary(path):
		_WriteBinary(dataset, path)
	else:
		_WriteText(dataset, path)

	_logger.info(f"Wrote {len(dataset)} records to '{path}'.")


@export
def LoadDataset(path: Path) -> Dataset:
	"""
	Reads and validates a dataset written by :func:`WriteDataset`.

	:param path: Dataset file.
	:returns:    Dataset with records in file order.
	:raises DatasetParseError:      If a record is malformed or the file is truncated.
	:raises DatasetValidationError: If a record violates the header or the mean-vector invariant.
	:raises FormatVersionError:     If the file has another format version.
	"""
	dataset = _ReadBinary(path) if _IsBinary(path) else _ReadText(path)
	dataset.Validate()

	_logger.info(f"Loaded {dataset!s} from '{path}'.")
	return dataset


@export
def WritePredictions(predictions: PredictionSet, path: Path) -> None:
	"""
	Writes predictions as CSV: ``VideoId,LabelConfidencePairs`` with rows ``<id>,<label> <conf> <label> <conf> ...``.

	Pairs are ordered by descending confidence (ties: ascending label) and confidences have 6 decimal places.

	:param predictions: Predictions to write.
	:param path:        Target file.
	"""
	with path.open("w", encoding="utf-8") as file:
		file.write(PREDICTION_HEADER + "\n")
		for videoID, pairs in predictions.TopK(None):
			file.write(f"{videoID}," + " ".join(f"{label} {confidence:.6f}" for label, confidence in pairs) + "\n")

	_logger.info(f"Wrote predictions for {len(predictions)} videos to '{path}'.")


@export
def ReadPredictions(path: Path) -> PredictionSet:
	"""
	Reads a prediction CSV written by :func:`WritePredictions`.

	:param path: Prediction file.
	:returns:    Prediction set in file order.
	:raises DatasetParseError: If the header or a row is malformed (row indices start at 0 after the header).
	"""
	predictions = PredictionSet()
	with path.open("r", encoding="utf-8") as file:
		if file.readline().strip() != PREDICTION_HEADER:
			raise DatasetParseError(path, -1, "header", f"Expected '{PREDICTION_HEADER}'.")

		for index, line in enumerate(file):
			line = line.rstrip("\r\n")
			if line == "":
				continue
			videoID, separator, field = line.rpartition(",")
			if separator == "" or videoID == "":
				raise DatasetParseError(path, index, "VideoId", "Row has no video id.")

			tokens = field.split()
			if len(tokens) % 2 != 0:
				raise DatasetParseError(path, index, "LabelConfidencePairs", "Odd number of tokens.")
			try:
				pairs = [(int(tokens[i]), float(tokens[i + 1])) for i in range(0, len(tokens), 2)]
			except ValueError as ex:
				raise DatasetParseError(path, index, "LabelConfidencePairs", str(ex)) from ex

			predictions.Add(videoID, pairs)

	_logger.info(f"Read predictions for {len(predictions)} videos from '{path}'.")
	return predictions
