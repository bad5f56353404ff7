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
The module ``Exception`` contains all structured errors and warnings raised by pyMultimodalRNN.

Besides a default error message in english, each exception object carries one or multiple references to the
exception's context, accessible via read-only properties.
"""
from pathlib import Path
from sys     import version_info
from typing  import List, Tuple, Optional as Nullable

from pyTooling.Decorators import export, readonly


@export
class MultimodalRNNException(Exception):
	"""Base-class for all exceptions (errors) raised by pyMultimodalRNN."""

	# WORKAROUND: for Python <3.11
	# Implementing a dummy method for Python versions before
	__notes__: List[str]
	if version_info < (3, 11):  # pragma: no cover
		def add_note(self, message: str) -> None:
			try:
				self.__notes__.append(message)
			except AttributeError:
				self.__notes__ = [message]


@export
class ShapeError(MultimodalRNNException):
	"""
	This exception is raised, when two operands of an operation have incompatible shapes.

	Message: :pycode:`f"Shape mismatch in {operation}: {leftName} {leftShape} vs. {rightName} {rightShape}."`
	"""

	_operation:  str
	_leftName:   str
	_leftShape:  Tuple[int, ...]
	_rightName:  str
	_rightShape: Tuple[int, ...]

	def __init__(self, operation: str, leftName: str, leftShape: Tuple[int, ...], rightName: str, rightShape: Tuple[int, ...]) -> None:
		"""
		Initializes the exception message based on both operands.

		:param operation:  Name of the operation that detected the mismatch.
		:param leftName:   Name of the first operand.
		:param leftShape:  Shape of the first operand.
		:param rightName:  Name of the second operand.
		:param rightShape: Shape of the second operand.
		"""
		super().__init__(f"Shape mismatch in {operation}: {leftName} {tuple(leftShape)} vs. {rightName} {tuple(rightShape)}.")
		self._operation = operation
		self._leftName = leftName
		self._leftShape = tuple(leftShape)
		self._rightName = rightName
		self._rightShape = tuple(rightShape)

	@readonly
	def Operation(self) -> str:
		return self._operation

	@readonly
	def LeftName(self) -> str:
		return self._leftName

	@readonly
	def LeftShape(self) -> Tuple[int, ...]:
		return self._leftShape

	@readonly
	def RightName(self) -> str:
		return self._rightName

	@readonly
	def RightShape(self) -> Tuple[int, ...]:
		return self._rightShape


@export
class EmptySequenceError(MultimodalRNNException):
	"""
	This exception is raised, when a sequence with zero timesteps is passed to a sequence operation.

	Message: :pycode:`f"Operation '{operation}' requires at least one timestep."`
	"""

	_operation: str

	def __init__(self, operation: str) -> None:
		super().__init__(f"Operation '{operation}' requires at least one timestep.")
		self._operation = operation

	@readonly
	def Operation(self) -> str:
		return self._operation


@export
class ConsistencyError(MultimodalRNNException):
	"""This exception is raised, when configuration, parameters, tapes or optimizer state don't belong together."""


@export
class ModeError(MultimodalRNNException):
	"""
	This exception is raised, when an operation is called for a fusion mode it isn't defined for.

	Message: :pycode:`f"Operation '{operation}' requires fusion mode '{expected}', but mode is '{actual}'."`
	"""

	_expected: str
	_actual:   str

	def __init__(self, operation: str, expected: str, actual: str) -> None:
		super().__init__(f"Operation '{operation}' requires fusion mode '{expected}', but mode is '{actual}'.")
		self._expected = expected
		self._actual = actual

	@readonly
	def Expected(self) -> str:
		return self._expected

	@readonly
	def Actual(self) -> str:
		return self._actual


@export
class ParameterError(MultimodalRNNException):
	"""This exception is raised, when a scalar parameter (count, rate, dimension, ...) is out of its valid range."""


@export
class NumericError(MultimodalRNNException):
	"""
	This exception is raised, when a tensor contains non-finite values (NaN or Inf).

	Message: :pycode:`f"Non-finite values in tensor '{tensorName}'."`
	"""

	_tensorName: str

	def __init__(self, tensorName: str, message: Nullable[str] = None) -> None:
		"""
		Initializes the exception message based on the name of the first non-finite tensor.

		:param tensorName: Name of the offending tensor.
		:param message:    Optional message replacing the default message.
		"""
		super().__init__(message if message is not None else f"Non-finite values in tensor '{tensorName}'.")
		self._tensorName = tensorName

	@readonly
	def TensorName(self) -> str:
		return self._tensorName


@export
class DegenerateWeightsError(MultimodalRNNException):
	"""This exception is raised, when ensemble weights can't be normalized, because all model GAP values are zero."""


@export
class InputError(MultimodalRNNException):
	"""
	This exception is raised, when prediction sets, ground truth or datasets refer to unknown or mismatching videos.

	Message: :pycode:`f"{message}"`
	"""

	_videoIDs: Tuple[str, ...]

	def __init__(self, message: str, videoIDs: Tuple[str, ...] = ()) -> None:
		super().__init__(message)
		self._videoIDs = tuple(videoIDs)

	@readonly
	def VideoIDs(self) -> Tuple[str, ...]:
		"""
		Read-only property to access the video ids causing the error (:attr:`_videoIDs`).

		:returns: Tuple of offending video ids.
		"""
		return self._videoIDs


@export
class DatasetParseError(MultimodalRNNException):
	"""
	This exception is raised, when a record in a dataset file can't be parsed.

	Message: :pycode:`f"Record {recordIndex} in '{path}': cannot parse field '{fieldName}'."`
	"""

	_path:        Path
	_recordIndex: int
	_fieldName:   str

	def __init__(self, path: Path, recordIndex: int, fieldName: str, reason: Nullable[str] = None) -> None:
		"""
		Initializes the exception message based on the failing record.

		:param path:        Dataset file.
		:param recordIndex: Zero-based index of the failing record (the header isn't counted).
		:param fieldName:   Name of the field that couldn't be read.
		:param reason:      Optional detail appended to the message.
		"""
		message = f"Record {recordIndex} in '{path}': cannot parse field '{fieldName}'."
		if reason is not None:
			message = f"{message} {reason}"
		super().__init__(message)
		self._path = path
		self._recordIndex = recordIndex
		self._fieldName = fieldName

	@readonly
	def Path(self) -> Path:
		return self._path

	@readonly
	def RecordIndex(self) -> int:
		return self._recordIndex

	@readonly
	def FieldName(self) -> str:
		return self._fieldName


@export
class DatasetValidationError(MultimodalRNNException):
	"""
	This exception is raised, when a well-formed record violates the dataset schema (dimensions, mean vectors, labels).

	Message: :pycode:`f"Record {recordIndex} ('{videoID}'): {reason}"`
	"""

	_recordIndex: int
	_videoID:     str

	def __init__(self, recordIndex: int, videoID: str, reason: str) -> None:
		super().__init__(f"Record {recordIndex} ('{videoID}'): {reason}")
		self._recordIndex = recordIndex
		self._videoID = videoID

	@readonly
	def RecordIndex(self) -> int:
		return self._recordIndex

	@readonly
	def VideoID(self) -> str:
		return self._videoID


@export
class FormatVersionError(MultimodalRNNException):
	"""
	This exception is raised, when a dataset or checkpoint file was written by an incompatible format version.

	Message: :pycode:`f"File '{path}' has format version {found}, but version {expected} is required."`
	"""

	_found:    int
	_expected: int

	def __init__(self, path: Path, found: int, expected: int) -> None:
		super().__init__(f"File '{path}' has format version {found}, but version {expected} is required.")
		self._found = found
		self._expected = expected

	@readonly
	def Found(self) -> int:
		return self._found

	@readonly
	def Expected(self) -> int:
		return self._expected


@export
class CheckpointError(MultimodalRNNException):
	"""This exception is raised, when a checkpoint file is incomplete or doesn't match the model it's loaded into."""


@export
class TrainingAbortedError(NumericError):
	"""
	This exception is raised, when training produces a non-finite loss.

	Message: :pycode:`f"Training aborted at step {step}: non-finite loss. Last good checkpoint: {checkpoint}"`
	"""

	_step:       int
	_checkpoint: Nullable[Path]

	def __init__(self, step: int, checkpoint: Nullable[Path]) -> None:
		"""
		Initializes the exception message based on the failing step and the last written checkpoint.

		:param step:       Optimizer step at which the loss became non-finite.
		:param checkpoint: Last checkpoint written before the failure, if any.
		"""
		super().__init__("loss", f"Training aborted at step {step}: non-finite loss. Last good checkpoint: {checkpoint}")
		self._step = step
		self._checkpoint = checkpoint

	@readonly
	def Step(self) -> int:
		return self._step

	@readonly
	def Checkpoint(self) -> Nullable[Path]:
		"""
		Read-only property to access the last good checkpoint (:attr:`_checkpoint`).

		:returns: Path of the last checkpoint written before the failure, or ``None``.
		"""
		return self._checkpoint


@export
class FrameTruncationWarning(UserWarning):
	"""This warning is issued, when a frame sequence is longer than the configured maximum and gets truncated."""
