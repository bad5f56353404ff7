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
Dense real-valued arithmetic underlying every other module.

All functions accept a single vector (shape ``(n,)``) or a batch of row vectors (shape ``(B, ..., n)``). Weight
matrices are stored as ``(rows, cols)`` = ``(out, in)``, so ``Affine`` computes ``W·x + b`` for every row ``x``.
Computations are carried out in ``float64``.
"""
from enum   import unique, Enum
from math   import sqrt
from typing import Union, Optional as Nullable

import numpy as np
from numpy.random import Generator

from pyTooling.Decorators  import export, readonly
from pyTooling.MetaClasses import ExtendedType

from pyMultimodalRNN.Exception import ShapeError, EmptySequenceError, ParameterError, NumericError


__all__ = ["DTYPE", "SeedLike"]


DTYPE = np.float64                   #: Precision of all parameters and activations.
SeedLike = Union[int, Generator]     #: Either an explicit seed or an already seeded generator.


@export
@unique
class ActivationKind(Enum):
	"""Element-wise activation functions used by the gates and candidate states."""

	Sigmoid = 0  #: Logistic sigmoid, range (0, 1).
	Tanh =    1  #: Hyperbolic tangent, range (-1, 1).

	def __str__(self) -> str:
		return ("sigmoid", "tanh")[self.value]

	@classmethod
	def Parse(cls, value: Union[str, "ActivationKind"]) -> "ActivationKind":
		"""
		Parses an activation from its name (case insensitive).

		:param value: ``"sigmoid"`` or ``"tanh"``.
		:returns:     Activation kind.
		:raises ParameterError: If the name is unknown.
		"""
		if isinstance(value, cls):
			return value

		for member in cls:
			if str(member) == str(value).lower():
				return member

		raise ParameterError(f"Value '{value!s}' cannot be parsed to member of {cls.__name__}.")


@export
@unique
class InitKind(Enum):
	"""Random initialization families."""

	Normal =       0  #: Normal distribution with given mean and standard deviation.
	GlorotNormal = 1  #: Zero-mean normal distribution with standard deviation ``sqrt(2 / (rows + cols))``.

	def __str__(self) -> str:
		return ("normal", "glorot-normal")[self.value]

	@classmethod
	def Parse(cls, value: Union[str, "InitKind"]) -> "InitKind":
		if isinstance(value, cls):
			return value

		name = str(value).lower().replace("_", "-")
		for member in cls:
			if str(member) == name:
				return member

		raise ParameterError(f"Value '{value!s}' cannot be parsed to member of {cls.__name__}.")


@export
class InitScheme(metaclass=ExtendedType, slots=True):
	"""Describes how a weight matrix is drawn by :func:`InitParams`."""

	_kind:   InitKind
	_mean:   float
	_stddev: float

	def __init__(self, kind: InitKind, mean: float = 0.0, stddev: float = 0.01) -> None:
		"""
		Initializes an initialization scheme.

		:param kind:   Initialization family.
		:param mean:   Mean for :attr:`InitKind.Normal`.
		:param stddev: Standard deviation for :attr:`InitKind.Normal`.
		:raises ParameterError: If ``stddev`` isn't positive.
		"""
		if kind is InitKind.Normal and not stddev > 0.0:
			raise ParameterError(f"Standard deviation of a normal initializer must be positive, got {stddev}.")

		self._kind = kind
		self._mean = mean
		self._stddev = stddev

	@classmethod
	def Normal(cls, mean: float = 0.0, stddev: float = 0.01) -> "InitScheme":
		return cls(InitKind.Normal, mean, stddev)

	@classmethod
	def GlorotNormal(cls) -> "InitScheme":
		return cls(InitKind.GlorotNormal)

	@readonly
	def Kind(self) -> InitKind:
		return self._kind

	@readonly
	def Mean(self) -> float:
		return self._mean

	def StandardDeviation(self, rows: int, cols: int) -> float:
		"""
		Returns the standard deviation used for a ``rows × cols`` matrix.

		:param rows: Number of rows (fan-out).
		:param cols: Number of columns (fan-in).
		:returns:    Standard deviation of the normal distribution.
		"""
		if self._kind is InitKind.GlorotNormal:
			return sqrt(2.0 / (rows + cols))

		return self._stddev

	def __str__(self) -> str:
		if self._kind is InitKind.Normal:
			return f"normal({self._mean}, {self._stddev})"

		return str(self._kind)


@export
def CreateGenerator(seed: SeedLike) -> Generator:
	"""
	Returns a PCG64 generator for an integer seed, or the given generator unchanged.

	:param seed: Seed or generator.
	:returns:    Seeded generator.
	"""
	if isinstance(seed, Generator):
		return seed

	return np.random.Generator(np.random.PCG64(seed))


@export
def Affine(x: np.ndarray, W: np.ndarray, b: Nullable[np.ndarray] = None) -> np.ndarray:
	"""
	Computes ``W·x + b`` for a vector ``x`` or for every row of a batch ``x``.

	:param x: Input vector ``(cols,)`` or batch ``(..., cols)``.
	:param W: Weight matrix ``(rows, cols)``.
	:param b: Optional bias ``(rows,)``.
	:returns: Output ``(rows,)`` or ``(..., rows)``.
	:raises ShapeError: If the dimensions of ``x``, ``W`` and ``b`` don't match.
	"""
	if W.ndim != 2 or x.shape[-1] != W.shape[1]:
		raise ShapeError("affine", "x", x.shape, "W", W.shape)
	if b is not None and b.shape != (W.shape[0],):
		raise ShapeError("affine", "W", W.shape, "b", b.shape)

	result = x @ W.T
	if b is not None:
		result = result + b

	return result


@export
def Sigmoid(v: np.ndarray) -> np.ndarray:
	# exp is only evaluated on non-positive arguments
	e = np.exp(-np.abs(v))
	return np.where(v >= 0.0, 1.0 / (1.0 + e), e / (1.0 + e))


@export
def Tanh(v: np.ndarray) -> np.ndarray:
	return np.tanh(v)


@export
def Activate(v: np.ndarray, kind: ActivationKind) -> np.ndarray:
	"""
	Applies an element-wise activation function.

	:param v:    Input values.
	:param kind: Activation function.
	:returns:    Activated values of the same shape.
	"""
	if kind is ActivationKind.Sigmoid:
		return Sigmoid(v)
	elif kind is ActivationKind.Tanh:
		return Tanh(v)
	else:  # pragma: no cover
		raise ParameterError(f"Unknown activation '{kind}'.")


@export
def Softmax(v: np.ndarray, axis: int = -1) -> np.ndarray:
	"""
	Computes a shift-stable softmax along ``axis``.

	:param v:    Input scores.
	:param axis: Axis to normalize.
	:returns:    Probability vector(s) of the same shape.
	:raises EmptySequenceError: If the normalized axis has length zero.
	"""
	if v.ndim == 0 or v.shape[axis] == 0:
		raise EmptySequenceError("softmax")

	shifted = v - np.max(v, axis=axis, keepdims=True)
	e = np.exp(shifted)
	return e / np.sum(e, axis=axis, keepdims=True)


@export
def InitParams(rows: int, cols: int, scheme: InitScheme, seed: SeedLike) -> np.ndarray:
	"""
	Draws a ``rows × cols`` weight matrix.

	The result is deterministic for a fixed integer seed. When a generator is passed, it advances.

	:param rows:   Number of rows.
	:param cols:   Number of columns.
	:param scheme: Initialization scheme.
	:param seed:   Seed or generator.
	:returns:      New weight matrix.
	:raises ShapeError: If a dimension isn't positive.
	"""
	if rows < 1 or cols < 1:
		raise ShapeError("init_params", "rows", (rows, ), "cols", (cols, ))

	generator = CreateGenerator(seed)
	return generator.normal(scheme.Mean, scheme.StandardDeviation(rows, cols), size=(rows, cols)).astype(DTYPE)


@export
def WeightGradient(delta: np.ndarray, inputs: np.ndarray) -> np.ndarray:
	"""
	Returns ``Σ delta ⊗ inputs`` over all leading (batch/time) axes, i.e. the gradient of ``Affine`` w.r.t. ``W``.

	:param delta:  Gradient w.r.t. the affine output, ``(..., rows)``.
	:param inputs: Affine input, ``(..., cols)``.
	:returns:      Gradient ``(rows, cols)``.
	"""
	if delta.ndim == 1:
		return np.outer(delta, inputs)

	return delta.reshape(-1, delta.shape[-1]).T @ inputs.reshape(-1, inputs.shape[-1])


@export
def BiasGradient(delta: np.ndarray) -> np.ndarray:
	"""Returns the gradient of ``Affine`` w.r.t. ``b``: ``delta`` summed over all leading axes."""
	if delta.ndim == 1:
		return delta.copy()

	return delta.reshape(-1, delta.shape[-1]).sum(axis=0)


@export
def CheckFinite(name: str, value: np.ndarray) -> None:
	"""
	Raises a :exc:`NumericError` naming ``name``, if ``value`` contains NaN or Inf.

	:param name:  Name of the tensor used in the error message.
	:param value: Tensor to check.
	"""
	if not np.all(np.isfinite(value)):
		raise NumericError(name)
