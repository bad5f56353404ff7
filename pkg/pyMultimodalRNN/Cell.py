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
Single-timestep forward and backward computations of the recurrent cells.

Two cells are provided:

* a peephole LSTM, whose input, forget and output gates additionally read the cell state through full square
  matrices ``W_ci``, ``W_cf`` and ``W_co``, and
* a GRU over the concatenated input ``[h_{t-1}, x_t]`` without bias terms.

Every forward step returns a :class:`CellStepTape`, which caches all intermediate values needed by the exact
backward step. Parameter gradients are accumulated (added) into the :class:`~pyMultimodalRNN.Parameter.ParameterStore`.
"""
from enum   import unique, Enum
from typing import Dict, Tuple, Union, Optional as Nullable

import numpy as np

from pyTooling.Decorators  import export, readonly
from pyTooling.MetaClasses import ExtendedType

from pyMultimodalRNN.Exception import ShapeError, ConsistencyError, ParameterError
from pyMultimodalRNN.Numeric   import Sigmoid, Tanh, Affine, WeightGradient, BiasGradient, InitScheme, SeedLike, CreateGenerator
from pyMultimodalRNN.Parameter import ParameterStore


@export
@unique
class CellKind(Enum):
	"""Recurrent cell types."""

	LSTM = 0  #: Peephole long short-term memory.
	GRU =  1  #: Gated recurrent unit.

	@classmethod
	def Parse(cls, value: Union[str, "CellKind"]) -> "CellKind":
		"""
		Parses a cell kind from its name (case insensitive).

		:param value: ``"lstm"`` or ``"gru"``.
		:returns:     Cell kind.
		:raises ParameterError: If the name is unknown.
		"""
		if isinstance(value, cls):
			return value

		try:
			return cls[str(value).upper()]
		except KeyError:
			raise ParameterError(f"Value '{value!s}' cannot be parsed to member of {cls.__name__}.")

	def __str__(self) -> str:
		return self.name.lower()


class CellParameters(metaclass=ExtendedType, slots=True):
	"""Base-class of a named view onto the tensors of one cell inside a :class:`ParameterStore`."""

	_store:     ParameterStore
	_prefix:    str
	_inputDim:  int
	_hiddenDim: int

	def __init__(self, store: ParameterStore, prefix: str, inputDim: int, hiddenDim: int) -> None:
		if inputDim < 1 or hiddenDim < 1:
			raise ParameterError(f"Cell '{prefix}' needs positive dimensions, got input={inputDim}, hidden={hiddenDim}.")

		self._store = store
		self._prefix = prefix
		self._inputDim = inputDim
		self._hiddenDim = hiddenDim

	@readonly
	def Store(self) -> ParameterStore:
		return self._store

	@readonly
	def Prefix(self) -> str:
		return self._prefix

	@readonly
	def InputDim(self) -> int:
		return self._inputDim

	@readonly
	def HiddenDim(self) -> int:
		return self._hiddenDim

	def _Get(self, symbol: str) -> np.ndarray:
		return self._store[f"{self._prefix}.{symbol}"]

	def _Accumulate(self, symbol: str, gradient: np.ndarray) -> None:
		self._store.Accumulate(f"{self._prefix}.{symbol}", gradient)

	def ExpectedShapes(self) -> Dict[str, Tuple[int, ...]]:
		"""Returns the required tensor shapes by symbol."""
		raise NotImplementedError()

	def Validate(self) -> None:
		"""
		Checks, that all tensors of this cell exist in the store with the expected shapes.

		:raises ConsistencyError: If a tensor is missing or has a wrong shape.
		"""
		for symbol, shape in self.ExpectedShapes().items():
			name = f"{self._prefix}.{symbol}"
			if name not in self._store:
				raise ConsistencyError(f"Parameter '{name}' is missing.")
			if self._store[name].shape != shape:
				raise ConsistencyError(f"Parameter '{name}' has shape {self._store[name].shape}, expected {shape}.")

	def _CheckInputs(self, operation: str, x: np.ndarray, hPrev: np.ndarray) -> None:
		if x.shape[-1] != self._inputDim:
			raise ShapeError(operation, "x_t", x.shape, f"{self._prefix}.input_dim", (self._inputDim, ))
		if hPrev.shape[-1] != self._hiddenDim:
			raise ShapeError(operation, "h_prev", hPrev.shape, f"{self._prefix}.hidden_dim", (self._hiddenDim, ))
		if x.shape[:-1] != hPrev.shape[:-1]:
			raise ShapeError(operation, "x_t", x.shape, "h_prev", hPrev.shape)


@export
class LSTMParameters(CellParameters):
	"""
	Parameters of a peephole LSTM cell.

	``W_x*`` are ``hidden × input``, ``W_h*`` and the peephole matrices ``W_c*`` are ``hidden × hidden``, biases have
	length ``hidden``. The forget gate has its own recurrent matrix ``W_hf``.
	"""

	INPUT_MATRICES =     ("W_xi", "W_xf", "W_xc", "W_xo")
	RECURRENT_MATRICES = ("W_hi", "W_hf", "W_hc", "W_ho")
	PEEPHOLE_MATRICES =  ("W_ci", "W_cf", "W_co")
	BIASES =             ("b_i", "b_f", "b_c", "b_o")

	@classmethod
	def Create(cls, store: ParameterStore, prefix: str, inputDim: int, hiddenDim: int, scheme: InitScheme, seed: SeedLike) -> "LSTMParameters":
		"""
		Registers and initializes all LSTM tensors in ``store``.

		:param store:     Target parameter store.
		:param prefix:    Name prefix, e.g. ``encoder.layer1.forward``.
		:param inputDim:  Input dimension.
		:param hiddenDim: Hidden (and cell) state dimension.
		:param scheme:    Initialization scheme of all matrices; biases start at zero.
		:param seed:      Seed or generator.
		:returns:         Parameter view.
		"""
		generator = CreateGenerator(seed)
		for symbol in cls.INPUT_MATRICES:
			store.AddMatrix(f"{prefix}.{symbol}", hiddenDim, inputDim, scheme, generator)
		for symbol in cls.RECURRENT_MATRICES + cls.PEEPHOLE_MATRICES:
			store.AddMatrix(f"{prefix}.{symbol}", hiddenDim, hiddenDim, scheme, generator)
		for symbol in cls.BIASES:
			store.AddVector(f"{prefix}.{symbol}", hiddenDim)

		return cls(store, prefix, inputDim, hiddenDim)

	def ExpectedShapes(self) -> Dict[str, Tuple[int, ...]]:
		shapes: Dict[str, Tuple[int, ...]] = {symbol: (self._hiddenDim, self._inputDim) for symbol in self.INPUT_MATRICES}
		shapes.update({symbol: (self._hiddenDim, self._hiddenDim) for symbol in self.RECURRENT_MATRICES + self.PEEPHOLE_MATRICES})
		shapes.update({symbol: (self._hiddenDim, ) for symbol in self.BIASES})
		return shapes

	@readonly
	def Wxi(self) -> np.ndarray:
		return self._Get("W_xi")

	@readonly
	def Whi(self) -> np.ndarray:
		return self._Get("W_hi")

	@readonly
	def Wci(self) -> np.ndarray:
		return self._Get("W_ci")

	@readonly
	def Wxf(self) -> np.ndarray:
		return self._Get("W_xf")

	@readonly
	def Whf(self) -> np.ndarray:
		return self._Get("W_hf")

	@readonly
	def Wcf(self) -> np.ndarray:
		return self._Get("W_cf")

	@readonly
	def Wxc(self) -> np.ndarray:
		return self._Get("W_xc")

	@readonly
	def Whc(self) -> np.ndarray:
		return self._Get("W_hc")

	@readonly
	def Wxo(self) -> np.ndarray:
		return self._Get("W_xo")

	@readonly
	def Who(self) -> np.ndarray:
		return self._Get("W_ho")

	@readonly
	def Wco(self) -> np.ndarray:
		return self._Get("W_co")

	@readonly
	def Bi(self) -> np.ndarray:
		return self._Get("b_i")

	@readonly
	def Bf(self) -> np.ndarray:
		return self._Get("b_f")

	@readonly
	def Bc(self) -> np.ndarray:
		return self._Get("b_c")

	@readonly
	def Bo(self) -> np.ndarray:
		return self._Get("b_o")


@export
class GRUParameters(CellParameters):
	"""
	Parameters of a GRU cell.

	``W_r``, ``W_z`` and ``W_hhat`` are ``hidden × (hidden + input)`` and act on ``[h_{t-1}, x_t]``. The readout
	matrix ``W_o`` is optional and only registered, if ``outputDim`` is given.
	"""

	GATE_MATRICES = ("W_r", "W_z", "W_hhat")

	@classmethod
	def Create(cls, store: ParameterStore, prefix: str, inputDim: int, hiddenDim: int, scheme: InitScheme, seed: SeedLike, outputDim: Nullable[int] = None) -> "GRUParameters":
		generator = CreateGenerator(seed)
		for symbol in cls.GATE_MATRICES:
			store.AddMatrix(f"{prefix}.{symbol}", hiddenDim, hiddenDim + inputDim, scheme, generator)
		if outputDim is not None:
			store.AddMatrix(f"{prefix}.W_o", outputDim, hiddenDim, scheme, generator)

		return cls(store, prefix, inputDim, hiddenDim)

	def ExpectedShapes(self) -> Dict[str, Tuple[int, ...]]:
		return {symbol: (self._hiddenDim, self._hiddenDim + self._inputDim) for symbol in self.GATE_MATRICES}

	@readonly
	def Wr(self) -> np.ndarray:
		return self._Get("W_r")

	@readonly
	def Wz(self) -> np.ndarray:
		return self._Get("W_z")

	@readonly
	def Whhat(self) -> np.ndarray:
		return self._Get("W_hhat")

	@readonly
	def HasReadout(self) -> bool:
		return f"{self._prefix}.W_o" in self._store

	@readonly
	def Wo(self) -> np.ndarray:
		return self._Get("W_o")


@export
class CellStepTape(metaclass=ExtendedType, slots=True):
	"""Cached inputs, pre-activations and gate values of one forward step, sufficient for the exact backward step."""

	_kind:   CellKind
	_owner:  str
	_values: Dict[str, np.ndarray]

	def __init__(self, kind: CellKind, owner: str, values: Dict[str, np.ndarray]) -> None:
		self._kind = kind
		self._owner = owner
		self._values = values

	@readonly
	def Kind(self) -> CellKind:
		return self._kind

	@readonly
	def Owner(self) -> str:
		"""
		Read-only property returning the parameter prefix of the cell that recorded this tape.

		:returns: Parameter name prefix.
		"""
		return self._owner

	def __getitem__(self, key: str) -> np.ndarray:
		return self._values[key]

	def Replay(self, params: CellParameters) -> Tuple[np.ndarray, Nullable[np.ndarray]]:
		"""
		Re-runs the forward step on the cached inputs.

		:param params: Parameters of the owning cell.
		:returns:      Tuple of ``h_t`` and ``c_t`` (``None`` for GRU).
		"""
		self.Check(params)
		if self._kind is CellKind.LSTM:
			h, c, _ = LSTMStep(self._values["x"], self._values["h_prev"], self._values["c_prev"], params)
			return h, c

		h, _ = GRUStep(self._values["x"], self._values["h_prev"], params)
		return h, None

	def Check(self, params: CellParameters) -> None:
		"""
		Verifies, that this tape was recorded by the given cell parameters.

		:param params: Parameters of the cell that is going to consume this tape.
		:raises ConsistencyError: If the tape belongs to another cell or cell type.
		"""
		expected = CellKind.LSTM if isinstance(params, LSTMParameters) else CellKind.GRU
		if self._kind is not expected or self._owner != params.Prefix:
			raise ConsistencyError(f"Tape recorded by {self._kind!s} cell '{self._owner}' can't be used with {expected!s} cell '{params.Prefix}'.")


@export
def LSTMStep(x: np.ndarray, hPrev: np.ndarray, cPrev: np.ndarray, params: LSTMParameters) -> Tuple[np.ndarray, np.ndarray, CellStepTape]:
	"""
	Computes one peephole LSTM step.

	.. code-block:: text

	   i_t = σ(W_xi·x_t + W_hi·h_{t-1} + W_ci·c_{t-1} + b_i)
	   f_t = σ(W_xf·x_t + W_hf·h_{t-1} + W_cf·c_{t-1} + b_f)
	   c_t = f_t ⊙ c_{t-1} + i_t ⊙ tanh(W_xc·x_t + W_hc·h_{t-1} + b_c)
	   o_t = σ(W_xo·x_t + W_ho·h_{t-1} + W_co·c_t + b_o)
	   h_t = o_t ⊙ tanh(c_t)

	:param x:      Input ``(input,)`` or ``(B, input)``.
	:param hPrev:  Previous hidden state.
	:param cPrev:  Previous cell state.
	:param params: Cell parameters.
	:returns:      Tuple of ``h_t``, ``c_t`` and the step tape.
	:raises ShapeError: If dimensions don't match ``params``.
	"""
	params._CheckInputs("lstm_step", x, hPrev)
	if cPrev.shape != hPrev.shape:
		raise ShapeError("lstm_step", "c_prev", cPrev.shape, "h_prev", hPrev.shape)

	i = Sigmoid(Affine(x, params.Wxi, params.Bi) + Affine(hPrev, params.Whi) + Affine(cPrev, params.Wci))
	f = Sigmoid(Affine(x, params.Wxf, params.Bf) + Affine(hPrev, params.Whf) + Affine(cPrev, params.Wcf))
	g = Tanh(Affine(x, params.Wxc, params.Bc) + Affine(hPrev, params.Whc))
	c = f * cPrev + i * g
	o = Sigmoid(Affine(x, params.Wxo, params.Bo) + Affine(hPrev, params.Who) + Affine(c, params.Wco))
	tanhC = Tanh(c)
	h = o * tanhC

	tape = CellStepTape(CellKind.LSTM, params.Prefix, {
		"x": x, "h_prev": hPrev, "c_prev": cPrev,
		"i": i, "f": f, "g": g, "o": o, "c": c, "tanh_c": tanhC
	})
	return h, c, tape


@export
def LSTMBackward(tape: CellStepTape, gradH: np.ndarray, gradC: np.ndarray, params: LSTMParameters) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
	"""
	Back-propagates through one LSTM step.

	:param tape:   Tape of the matching forward step.
	:param gradH:  Gradient w.r.t. ``h_t``.
	:param gradC:  Gradient w.r.t. ``c_t`` flowing back from the next step.
	:param params: Cell parameters; gradients are added to their store.
	:returns:      Tuple of gradients w.r.t. ``x_t``, ``h_{t-1}`` and ``c_{t-1}``.
	:raises ConsistencyError: If the tape wasn't recorded by ``params``.
	"""
	tape.Check(params)
	x, hPrev, cPrev = tape["x"], tape["h_prev"], tape["c_prev"]
	i, f, g, o, c, tanhC = tape["i"], tape["f"], tape["g"], tape["o"], tape["c"], tape["tanh_c"]

	dao = gradH * tanhC * o * (1.0 - o)
	dc = gradC + gradH * o * (1.0 - tanhC * tanhC) + dao @ params.Wco
	dai = dc * g * i * (1.0 - i)
	daf = dc * cPrev * f * (1.0 - f)
	dac = dc * i * (1.0 - g * g)

	gradCPrev = dc * f + dai @ params.Wci + daf @ params.Wcf
	gradHPrev = dai @ params.Whi + daf @ params.Whf + dac @ params.Whc + dao @ params.Who
	gradX = dai @ params.Wxi + daf @ params.Wxf + dac @ params.Wxc + dao @ params.Wxo

	for gate, delta in (("i", dai), ("f", daf), ("c", dac), ("o", dao)):
		params._Accumulate(f"W_x{gate}", WeightGradient(delta, x))
		params._Accumulate(f"W_h{gate}", WeightGradient(delta, hPrev))
		params._Accumulate(f"b_{gate}", BiasGradient(delta))
	params._Accumulate("W_ci", WeightGradient(dai, cPrev))
	params._Accumulate("W_cf", WeightGradient(daf, cPrev))
	params._Accumulate("W_co", WeightGradient(dao, c))

	return gradX, gradHPrev, gradCPrev


@export
def GRUStep(x: np.ndarray, hPrev: np.ndarray, params: GRUParameters) -> Tuple[np.ndarray, CellStepTape]:
	"""
	Computes one GRU step.

	.. code-block:: text

	   r_t    = σ(W_r·[h_{t-1}, x_t])
	   z_t    = σ(W_z·[h_{t-1}, x_t])
	   ĥ_t    = tanh(W_hhat·[r_t ⊙ h_{t-1}, x_t])
	   h_t    = (1 - z_t) ⊙ h_{t-1} + z_t ⊙ ĥ_t

	:param x:      Input ``(input,)`` or ``(B, input)``.
	:param hPrev:  Previous hidden state.
	:param params: Cell parameters.
	:returns:      Tuple of ``h_t`` and the step tape.
	:raises ShapeError: If dimensions don't match ``params``.
	"""
	params._CheckInputs("gru_step", x, hPrev)

	hx = np.concatenate((hPrev, x), axis=-1)
	r = Sigmoid(Affine(hx, params.Wr))
	z = Sigmoid(Affine(hx, params.Wz))
	rhx = np.concatenate((r * hPrev, x), axis=-1)
	hHat = Tanh(Affine(rhx, params.Whhat))
	h = (1.0 - z) * hPrev + z * hHat

	tape = CellStepTape(CellKind.GRU, params.Prefix, {
		"x": x, "h_prev": hPrev, "hx": hx, "rhx": rhx,
		"r": r, "z": z, "h_hat": hHat
	})
	return h, tape


@export
def GRUBackward(tape: CellStepTape, gradH: np.ndarray, params: GRUParameters) -> Tuple[np.ndarray, np.ndarray]:
	"""
	Back-propagates through one GRU step.

	:param tape:   Tape of the matching forward step.
	:param gradH:  Gradient w.r.t. ``h_t``.
	:param params: Cell parameters; gradients are added to their store.
	:returns:      Tuple of gradients w.r.t. ``x_t`` and ``h_{t-1}``.
	:raises ConsistencyError: If the tape wasn't recorded by ``params``.
	"""
	tape.Check(params)
	hPrev, hx, rhx = tape["h_prev"], tape["hx"], tape["rhx"]
	r, z, hHat = tape["r"], tape["z"], tape["h_hat"]
	hidden = params.HiddenDim

	daHat = gradH * z * (1.0 - hHat * hHat)
	daz = gradH * (hHat - hPrev) * z * (1.0 - z)
	dRhx = daHat @ params.Whhat
	dRh = dRhx[..., :hidden]
	dar = dRh * hPrev * r * (1.0 - r)
	dHx = daz @ params.Wz + dar @ params.Wr

	gradHPrev = gradH * (1.0 - z) + dRh * r + dHx[..., :hidden]
	gradX = dRhx[..., hidden:] + dHx[..., hidden:]

	params._Accumulate("W_hhat", WeightGradient(daHat, rhx))
	params._Accumulate("W_z", WeightGradient(daz, hx))
	params._Accumulate("W_r", WeightGradient(dar, hx))

	return gradX, gradHPrev


@export
def GRUReadout(h: np.ndarray, Wo: np.ndarray) -> np.ndarray:
	"""
	Computes the GRU output ``y_t = σ(W_o·h_t)``.

	:param h:  Hidden state ``(hidden,)`` or ``(B, hidden)``.
	:param Wo: Readout matrix ``(output, hidden)``.
	:returns:  Output in (0, 1).
	:raises ShapeError: If ``W_o`` doesn't match ``h``.
	"""
	return Sigmoid(Affine(h, Wo))


@export
class RecurrentCell(metaclass=ExtendedType, slots=True):
	"""
	Uniform interface over both cell types as used by the sequence encoder.

	The GRU has no cell state; its ``c`` values are passed through as ``None``.
	"""

	_parameters: CellParameters

	def __init__(self, parameters: CellParameters) -> None:
		self._parameters = parameters

	@readonly
	def Parameters(self) -> CellParameters:
		return self._parameters

	@readonly
	def Kind(self) -> CellKind:
		return CellKind.LSTM if isinstance(self._parameters, LSTMParameters) else CellKind.GRU

	@readonly
	def HiddenDim(self) -> int:
		return self._parameters.HiddenDim

	@readonly
	def InputDim(self) -> int:
		return self._parameters.InputDim

	def InitialState(self, batchShape: Tuple[int, ...]) -> Tuple[np.ndarray, Nullable[np.ndarray]]:
		"""
		Returns the all-zero initial hidden (and cell) state.

		:param batchShape: Leading shape, ``()`` for a single sequence.
		:returns:          Tuple of ``h_0`` and ``c_0`` (``None`` for GRU).
		"""
		h0 = np.zeros(batchShape + (self.HiddenDim, ))
		return h0, (h0.copy() if self.Kind is CellKind.LSTM else None)

	def Step(self, x: np.ndarray, h: np.ndarray, c: Nullable[np.ndarray]) -> Tuple[np.ndarray, Nullable[np.ndarray], CellStepTape]:
		if isinstance(self._parameters, LSTMParameters):
			return LSTMStep(x, h, c, self._parameters)

		hNext, tape = GRUStep(x, h, self._parameters)
		return hNext, None, tape

	def Backward(self, tape: CellStepTape, gradH: np.ndarray, gradC: Nullable[np.ndarray]) -> Tuple[np.ndarray, np.ndarray, Nullable[np.ndarray]]:
		if isinstance(self._parameters, LSTMParameters):
			return LSTMBackward(tape, gradH, gradC if gradC is not None else np.zeros_like(gradH), self._parameters)

		gradX, gradHPrev = GRUBackward(tape, gradH, self._parameters)
		return gradX, gradHPrev, None


@export
def CreateCell(kind: CellKind, store: ParameterStore, prefix: str, inputDim: int, hiddenDim: int, scheme: InitScheme, seed: SeedLike) -> RecurrentCell:
	"""
	Registers the parameters of a new cell and returns its uniform interface.

	:param kind:      Cell type.
	:param store:     Target parameter store.
	:param prefix:    Parameter name prefix.
	:param inputDim:  Input dimension.
	:param hiddenDim: Hidden dimension.
	:param scheme:    Initialization scheme.
	:param seed:      Seed or generator.
	:returns:         Cell interface.
	"""
	if kind is CellKind.LSTM:
		return RecurrentCell(LSTMParameters.Create(store, prefix, inputDim, hiddenDim, scheme, seed))

	return RecurrentCell(GRUParameters.Create(store, prefix, inputDim, hiddenDim, scheme, seed))


@export
def AttachCell(kind: CellKind, store: ParameterStore, prefix: str, inputDim: int, hiddenDim: int) -> RecurrentCell:
	"""
	Returns the interface of a cell, whose parameters already exist in ``store``.

	:param kind:      Cell type.
	:param store:     Parameter store holding the cell's tensors.
	:param prefix:    Parameter name prefix.
	:param inputDim:  Expected input dimension.
	:param hiddenDim: Expected hidden dimension.
	:returns:         Cell interface.
	:raises ConsistencyError: If tensors are missing or have unexpected shapes.
	"""
	parameters: CellParameters
	if kind is CellKind.LSTM:
		parameters = LSTMParameters(store, prefix, inputDim, hiddenDim)
	else:
		parameters = GRUParameters(store, prefix, inputDim, hiddenDim)

	parameters.Validate()
	return RecurrentCell(parameters)
