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
Versioned checkpoint container.

A checkpoint is a numpy ``.npz`` archive holding a JSON meta record (format version, model configuration, training
configuration, optimizer step and epoch) plus every named parameter and both Adam moment tensors:

.. code-block:: text

   meta              JSON string
   param/<name>      parameter tensor
   adam.m/<name>     first moment
   adam.n/<name>     second raw moment

Arrays are stored as raw float64, so a write/read roundtrip is bit-exact.
"""
from json    import dumps, loads
from logging import getLogger
from pathlib import Path
from typing  import Any, Dict, Optional as Nullable

import numpy as np

from pyTooling.Decorators  import export, readonly
from pyTooling.MetaClasses import ExtendedType

from pyMultimodalRNN.Exception import CheckpointError, ConsistencyError, FormatVersionError
from pyMultimodalRNN.Parameter import ParameterStore
from pyMultimodalRNN           import ModelConfig, MultimodalModel


__all__ = ["CHECKPOINT_FORMAT", "CHECKPOINT_VERSION"]

CHECKPOINT_FORMAT = "pyMultimodalRNN-checkpoint"  #: Format name stored in the meta record.
CHECKPOINT_VERSION = 1                             #: Format version; loaders reject other versions.

_logger = getLogger(__name__)


@export
class Checkpoint(metaclass=ExtendedType, slots=True):
	"""
	Contents of a checkpoint file.

	Adam moments are plain dictionaries keyed by parameter name; they are ``None`` if the checkpoint was written
	without optimizer state.
	"""

	_model:          MultimodalModel
	_step:           int
	_epoch:          int
	_adamM:          Nullable[Dict[str, np.ndarray]]
	_adamN:          Nullable[Dict[str, np.ndarray]]
	_trainingConfig: Nullable[Dict[str, Any]]

	def __init__(
		self,
		model: MultimodalModel,
		step: int = 0,
		epoch: int = 0,
		adamM: Nullable[Dict[str, np.ndarray]] = None,
		adamN: Nullable[Dict[str, np.ndarray]] = None,
		trainingConfig: Nullable[Dict[str, Any]] = None
	) -> None:
		self._model = model
		self._step = step
		self._epoch = epoch
		self._adamM = adamM
		self._adamN = adamN
		self._trainingConfig = trainingConfig

	@readonly
	def Model(self) -> MultimodalModel:
		return self._model

	@readonly
	def Step(self) -> int:
		return self._step

	@readonly
	def Epoch(self) -> int:
		return self._epoch

	@readonly
	def AdamM(self) -> Nullable[Dict[str, np.ndarray]]:
		return self._adamM

	@readonly
	def AdamN(self) -> Nullable[Dict[str, np.ndarray]]:
		return self._adamN

	@readonly
	def TrainingConfig(self) -> Nullable[Dict[str, Any]]:
		return self._trainingConfig


@export
def SaveCheckpoint(path: Path, model: MultimodalModel, adamState: Any = None, trainingConfig: Nullable[Dict[str, Any]] = None, epoch: int = 0) -> Path:
	"""
	Writes model parameters and (optionally) the optimizer state.

	:param path:           Target file; written as is, no suffix is appended.
	:param model:          Model to store.
	:param adamState:      Object with ``M``, ``N`` (dictionaries by parameter name) and ``T`` (step counter), or ``None``.
	:param trainingConfig: Training configuration as dictionary, or ``None``.
	:param epoch:          Number of completed epochs.
	:returns:              The written path.
	"""
	meta = {
		"format":   CHECKPOINT_FORMAT,
		"version":  CHECKPOINT_VERSION,
		"model":    model.Config.ToDict(),
		"training": trainingConfig,
		"step":     adamState.T if adamState is not None else 0,
		"epoch":    epoch,
		"adam":     adamState is not None,
		"names":    model.Store.Names,
	}

	arrays: Dict[str, np.ndarray] = {"meta": np.array(dumps(meta))}
	for name, value in model.Store:
		arrays[f"param/{name}"] = value
		if adamState is not None:
			arrays[f"adam.m/{name}"] = adamState.M[name]
			arrays[f"adam.n/{name}"] = adamState.N[name]

	with path.open("wb") as file:
		np.savez(file, **arrays)

	_logger.info(f"Wrote checkpoint '{path}' (step {meta['step']}, epoch {epoch}, {model.Store.Size} parameters).")
	return path


@export
def LoadCheckpoint(path: Path) -> Checkpoint:
	"""
	Reads a checkpoint written by :func:`SaveCheckpoint` and re-creates the model.

	:param path: Checkpoint file.
	:returns:    Checkpoint contents.
	:raises CheckpointError:    If the file isn't a checkpoint or misses tensors.
	:raises FormatVersionError: If the format version differs.
	"""
	try:
		archive = np.load(path, allow_pickle=False)
	except (OSError, ValueError) as ex:
		raise CheckpointError(f"Cannot read checkpoint '{path}'.") from ex

	with archive:
		if "meta" not in archive.files:
			raise CheckpointError(f"File '{path}' has no checkpoint meta record.")

		meta = loads(str(archive["meta"]))
		if meta.get("format") != CHECKPOINT_FORMAT:
			raise CheckpointError(f"File '{path}' has format '{meta.get('format')}', expected '{CHECKPOINT_FORMAT}'.")
		if meta.get("version") != CHECKPOINT_VERSION:
			raise FormatVersionError(path, meta.get("version"), CHECKPOINT_VERSION)

		store = ParameterStore()
		adamM: Nullable[Dict[str, np.ndarray]] = {} if meta["adam"] else None
		adamN: Nullable[Dict[str, np.ndarray]] = {} if meta["adam"] else None
		for name in meta["names"]:
			try:
				store.Add(name, archive[f"param/{name}"])
				if adamM is not None and adamN is not None:
					adamM[name] = archive[f"adam.m/{name}"]
					adamN[name] = archive[f"adam.n/{name}"]
			except KeyError as ex:
				raise CheckpointError(f"Checkpoint '{path}' lacks tensors of parameter '{name}'.") from ex

	try:
		config = ModelConfig.FromDict(meta["model"])
		model = MultimodalModel.FromStore(config, store)
	except ConsistencyError as ex:
		newEx = CheckpointError(f"Checkpoint '{path}' doesn't match its own model configuration.")
		newEx.add_note(str(ex))
		raise newEx from ex

	_logger.info(f"Loaded checkpoint '{path}' ({config!s}, step {meta['step']}).")
	return Checkpoint(model, meta["step"], meta["epoch"], adamM, adamN, meta["training"])
