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
Named parameter tensors with paired gradient buffers.

A :class:`ParameterStore` owns every weight matrix and bias vector of a model. Components (cells, attention, fusion,
head) don't own arrays themselves, they keep a reference to the store and a name prefix.
"""
from typing import Dict, Iterator, List, Tuple, Optional as Nullable

import numpy as np

from pyTooling.Decorators  import export, readonly
from pyTooling.MetaClasses import ExtendedType

from pyMultimodalRNN.Exception import ConsistencyError, NumericError
from pyMultimodalRNN.Numeric   import DTYPE, InitScheme, InitParams, SeedLike, CreateGenerator


@export
class ParameterStore(metaclass=ExtendedType, slots=True):
	"""
	An ordered collection of named parameters and their gradients.

	Insertion order is preserved and defines the iteration order used by the optimizer, checkpoints and the
	finite-difference checker, so all of them are deterministic.
	"""

	_parameters: Dict[str, np.ndarray]  #: Parameter tensors by name.
	_gradients:  Dict[str, np.ndarray]  #: Gradient buffers by name, same shapes as the parameters.

	def __init__(self) -> None:
		self._parameters = {}
		self._gradients = {}

	@readonly
	def Names(self) -> List[str]:
		"""
		Read-only property returning all parameter names in registration order.

		:returns: List of parameter names.
		"""
		return list(self._parameters.keys())

	@readonly
	def Parameters(self) -> Dict[str, np.ndarray]:
		return self._parameters

	@readonly
	def Gradients(self) -> Dict[str, np.ndarray]:
		return self._gradients

	@readonly
	def Size(self) -> int:
		"""
		Read-only property returning the total number of scalar parameters.

		:returns: Number of scalars over all tensors.
		"""
		return sum(p.size for p in self._parameters.values())

	def Add(self, name: str, value: np.ndarray) -> np.ndarray:
		"""
		Registers a new parameter tensor and allocates a zeroed gradient buffer for it.

		:param name:  Unique parameter name.
		:param value: Initial value (copied, converted to float64).
		:returns:     The stored tensor.
		:raises ConsistencyError: If the name is already registered.
		"""
		if name in self._parameters:
			raise ConsistencyError(f"Parameter '{name}' is already registered.")

		array = np.array(value, dtype=DTYPE, copy=True)
		self._parameters[name] = array
		self._gradients[name] = np.zeros_like(array)
		return array

	def AddMatrix(self, name: str, rows: int, cols: int, scheme: InitScheme, seed: SeedLike) -> np.ndarray:
		return self.Add(name, InitParams(rows, cols, scheme, seed))

	def AddVector(self, name: str, length: int, scheme: Nullable[InitScheme] = None, seed: Nullable[SeedLike] = None) -> np.ndarray:
		"""
		Registers a vector parameter, zero-initialized unless a scheme is given.

		:param name:   Unique parameter name.
		:param length: Vector length.
		:param scheme: Optional random initialization scheme (drawn as a ``length × 1`` matrix).
		:param seed:   Seed or generator, required with ``scheme``.
		:returns:      The stored vector.
		"""
		if scheme is None:
			return self.Add(name, np.zeros(length, dtype=DTYPE))

		return self.Add(name, InitParams(length, 1, scheme, CreateGenerator(seed if seed is not None else 0))[:, 0])

	def __getitem__(self, name: str) -> np.ndarray:
		try:
			return self._parameters[name]
		except KeyError:
			ex = ConsistencyError(f"Parameter '{name}' isn't registered.")
			ex.add_note(f"Known parameters: {', '.join(self._parameters)}")
			raise ex

	def __contains__(self, name: str) -> bool:
		return name in self._parameters

	def __iter__(self) -> Iterator[Tuple[str, np.ndarray]]:
		return iter(self._parameters.items())

	def __len__(self) -> int:
		return len(self._parameters)

	def Gradient(self, name: str) -> np.ndarray:
		return self._gradients[name]

	def Accumulate(self, name: str, gradient: np.ndarray) -> None:
		"""
		Adds ``gradient`` to the gradient buffer of parameter ``name``.

		:param name:     Parameter name.
		:param gradient: Gradient contribution, same shape as the parameter.
		:raises ConsistencyError: If shapes don't match.
		"""
		buffer = self._gradients[name]
		if buffer.shape != gradient.shape:
			raise ConsistencyError(f"Gradient for '{name}' has shape {gradient.shape}, expected {buffer.shape}.")

		buffer += gradient

	def ZeroGradients(self) -> None:
		for buffer in self._gradients.values():
			buffer.fill(0.0)

	def Assign(self, name: str, value: np.ndarray) -> None:
		"""
		Overwrites a parameter in place (keeps array identity).

		:param name:  Parameter name.
		:param value: New value with identical shape.
		:raises ConsistencyError: If shapes don't match.
		"""
		target = self[name]
		if target.shape != np.shape(value):
			raise ConsistencyError(f"Cannot assign shape {np.shape(value)} to parameter '{name}' of shape {target.shape}.")

		target[...] = value

	def GroupNames(self) -> Dict[str, List[str]]:
		"""
		Groups parameter names by their first name component (``fusion``, ``encoder``, ``attention``, ``head``).

		:returns: Dictionary from group name to parameter names.
		"""
		groups: Dict[str, List[str]] = {}
		for name in self._parameters:
			groups.setdefault(name.split(".", 1)[0], []).append(name)

		return groups

	def GradientNorm(self) -> float:
		return float(np.sqrt(sum(float(np.sum(g * g)) for g in self._gradients.values())))

	def CheckFinite(self) -> None:
		"""
		Checks all gradients and parameters for NaN/Inf.

		:raises NumericError: Naming the first non-finite tensor in registration order.
		"""
		for name in self._parameters:
			if not np.all(np.isfinite(self._gradients[name])):
				raise NumericError(f"grad({name})")
			if not np.all(np.isfinite(self._parameters[name])):
				raise NumericError(name)

	def Copy(self) -> "ParameterStore":
		"""
		Returns a deep copy including gradient buffers.

		:returns: Independent parameter store.
		"""
		store = ParameterStore()
		for name, value in self._parameters.items():
			store._parameters[name] = value.copy()
			store._gradients[name] = self._gradients[name].copy()

		return store

	def __repr__(self) -> str:
		return f"ParameterStore: {len(self._parameters)} tensors, {self.Size} scalars"
