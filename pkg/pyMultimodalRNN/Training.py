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
Adam optimization, the step-wise learning-rate decay, full-model gradient assembly and the finite-difference audit.

Adam keeps per-parameter moment estimates ``m`` and ``n`` and a shared step counter ``t``:

.. code-block:: text

   m ← μ·m + (1-μ)·g          n ← v·n + (1-v)·g²
   m̂ = m / (1-μᵗ)             n̂ = n / (1-vᵗ)
   θ ← θ - lr · m̂ / (√n̂ + ε)
"""
from logging import getLogger
from pathlib import Path
from time    import perf_counter
from typing  import Any, Dict, Iterator, List, Sequence, Tuple, Optional as Nullable

import numpy as np

from pyTooling.Decorators  import export, readonly
from pyTooling.MetaClasses import ExtendedType

from pyMultimodalRNN.Exception  import ParameterError, ConsistencyError, NumericError, TrainingAbortedError
from pyMultimodalRNN.Numeric    import SeedLike, CreateGenerator
from pyMultimodalRNN.Parameter  import ParameterStore
from pyMultimodalRNN.Fusion     import FusionMode
from pyMultimodalRNN.Classifier import LabelVector, BCELoss, BCELossGradient
from pyMultimodalRNN.Evaluation import DEFAULT_TOP_K, GapAtK, GroundTruth, Predict
from pyMultimodalRNN.Checkpoint import Checkpoint, SaveCheckpoint
from pyMultimodalRNN            import MultimodalModel


__all__ = ["DEFAULT_BATCH_SIZE", "RELATIVE_ERROR_FLOOR"]

DEFAULT_BATCH_SIZE = 32       #: Examples per minibatch.
RELATIVE_ERROR_FLOOR = 1e-4   #: Lower bound of the denominator in finite-difference relative errors.

_logger = getLogger(__name__)


@export
class AdamHyperParameters(metaclass=ExtendedType, slots=True):
	"""Step size ``α``, moment decay rates ``μ`` and ``v`` and the stabilizer ``ε`` of Adam."""

	_alpha:   float
	_mu:      float
	_v:       float
	_epsilon: float

	def __init__(self, alpha: float = 0.001, mu: float = 0.9, v: float = 0.999, epsilon: float = 1e-8) -> None:
		"""
		Initializes Adam hyper-parameters, defaulting to ``α = 0.001``, ``μ = 0.9``, ``v = 0.999``, ``ε = 1e-8``.

		:raises ParameterError: If a value is out of range.
		"""
		if not alpha > 0.0:
			raise ParameterError(f"Adam step size must be positive, got {alpha}.")
		if not 0.0 <= mu < 1.0:
			raise ParameterError(f"Adam first-moment decay must be in [0, 1), got {mu}.")
		if not 0.0 <= v < 1.0:
			raise ParameterError(f"Adam second-moment decay must be in [0, 1), got {v}.")
		if not epsilon > 0.0:
			raise ParameterError(f"Adam epsilon must be positive, got {epsilon}.")

		self._alpha = alpha
		self._mu = mu
		self._v = v
		self._epsilon = epsilon

	@readonly
	def Alpha(self) -> float:
		return self._alpha

	@readonly
	def Mu(self) -> float:
		return self._mu

	@readonly
	def V(self) -> float:
		return self._v

	@readonly
	def Epsilon(self) -> float:
		return self._epsilon

	def ToDict(self) -> Dict[str, float]:
		return {"alpha": self._alpha, "mu": self._mu, "v": self._v, "epsilon": self._epsilon}

	@classmethod
	def FromDict(cls, values: Dict[str, float]) -> "AdamHyperParameters":
		return cls(values["alpha"], values["mu"], values["v"], values["epsilon"])


@export
class AdamState(metaclass=ExtendedType, slots=True):
	"""Per-parameter first moment ``m`` and second raw moment ``n`` plus the number of completed steps ``t``."""

	_m: Dict[str, np.ndarray]
	_n: Dict[str, np.ndarray]
	_t: int

	def __init__(self, m: Dict[str, np.ndarray], n: Dict[str, np.ndarray], t: int = 0) -> None:
		if m.keys() != n.keys():
			raise ConsistencyError("Adam moments cover different parameters.")
		if t < 0:
			raise ParameterError(f"Adam step counter must not be negative, got {t}.")

		self._m = m
		self._n = n
		self._t = t

	@classmethod
	def Create(cls, parameters: Dict[str, np.ndarray]) -> "AdamState":
		"""
		Returns zero moments for every parameter (``t = 0``).

		:param parameters: Parameters by name.
		:returns:          Fresh optimizer state.
		"""
		return cls(
			{name: np.zeros_like(value) for name, value in parameters.items()},
			{name: np.zeros_like(value) for name, value in parameters.items()}
		)

	@classmethod
	def FromCheckpoint(cls, checkpoint: Checkpoint) -> "AdamState":
		"""
		Restores the optimizer state stored in a checkpoint, or a fresh state if none was stored.

		:param checkpoint: Loaded checkpoint.
		:returns:          Optimizer state.
		"""
		if checkpoint.AdamM is None or checkpoint.AdamN is None:
			return cls.Create(checkpoint.Model.Store.Parameters)

		return cls(dict(checkpoint.AdamM), dict(checkpoint.AdamN), checkpoint.Step)

	@readonly
	def M(self) -> Dict[str, np.ndarray]:
		return self._m

	@readonly
	def N(self) -> Dict[str, np.ndarray]:
		return self._n

	@readonly
	def T(self) -> int:
		return self._t


@export
def AdamStep(parameters: Dict[str, np.ndarray], gradients: Dict[str, np.ndarray], state: AdamState, hyper: AdamHyperParameters, learningRate: float) -> int:
	"""
	Applies one bias-corrected Adam update to all parameters in place.

	:param parameters:   Parameters by name (updated in place).
	:param gradients:    Gradients by name.
	:param state:        Optimizer state (updated in place).
	:param hyper:        Hyper-parameters; ``α`` is not used, the step size is ``learningRate``.
	:param learningRate: Step size of this update.
	:returns:            The new step counter.
	:raises ConsistencyError: If parameter names or shapes don't align.
	"""
	if parameters.keys() != state._m.keys() or parameters.keys() != gradients.keys():
		raise ConsistencyError("Parameters, gradients and Adam moments cover different names.")
	for name, value in parameters.items():
		if value.shape != gradients[name].shape or value.shape != state._m[name].shape:
			ex = ConsistencyError(f"Shape mismatch for parameter '{name}' in Adam step.")
			ex.add_note(f"parameter {value.shape}, gradient {gradients[name].shape}, moment {state._m[name].shape}")
			raise ex

	state._t += 1
	mu, v, epsilon = hyper.Mu, hyper.V, hyper.Epsilon
	firstCorrection = 1.0 - mu ** state._t
	secondCorrection = 1.0 - v ** state._t

	for name, value in parameters.items():
		gradient = gradients[name]
		m = state._m[name]
		n = state._n[name]
		m *= mu
		m += (1.0 - mu) * gradient
		n *= v
		n += (1.0 - v) * gradient * gradient
		value -= learningRate * (m / firstCorrection) / (np.sqrt(n / secondCorrection) + epsilon)

	return state._t


@export
class LearningRateSchedule(metaclass=ExtendedType, slots=True):
	"""
	Step-wise exponential decay: the learning rate is multiplied by ``decayFactor`` after every completed interval.

	The interval is ``decaySteps`` up to ``switchStep`` and ``lateDecaySteps`` afterwards.
	"""

	_baseLR:         float
	_decayFactor:    float
	_decaySteps:     int
	_lateDecaySteps: int
	_switchStep:     Nullable[int]

	def __init__(self, baseLR: float = 0.01, decayFactor: float = 0.95, decaySteps: int = 1000, lateDecaySteps: Nullable[int] = None, switchStep: Nullable[int] = None) -> None:
		"""
		Initializes a schedule.

		:param baseLR:         Initial learning rate.
		:param decayFactor:    Factor in (0, 1] applied per completed interval.
		:param decaySteps:     Interval length before ``switchStep``.
		:param lateDecaySteps: Interval length after ``switchStep`` (default: ``decaySteps``).
		:param switchStep:     Step at which the interval length changes; ``None`` never switches.
		:raises ParameterError: If a value is out of range.
		"""
		if not baseLR > 0.0:
			raise ParameterError(f"Base learning rate must be positive, got {baseLR}.")
		if not 0.0 < decayFactor <= 1.0:
			raise ParameterError(f"Decay factor must be in (0, 1], got {decayFactor}.")
		lateDecaySteps = decaySteps if lateDecaySteps is None else lateDecaySteps
		if decaySteps < 1 or lateDecaySteps < 1:
			raise ParameterError(f"Decay intervals must be at least 1 step, got {decaySteps} and {lateDecaySteps}.")
		if switchStep is not None and switchStep < 0:
			raise ParameterError(f"Switch step must not be negative, got {switchStep}.")

		self._baseLR = baseLR
		self._decayFactor = decayFactor
		self._decaySteps = decaySteps
		self._lateDecaySteps = lateDecaySteps
		self._switchStep = switchStep

	@readonly
	def BaseLR(self) -> float:
		return self._baseLR

	@readonly
	def DecayFactor(self) -> float:
		return self._decayFactor

	@readonly
	def DecaySteps(self) -> int:
		return self._decaySteps

	@readonly
	def LateDecaySteps(self) -> int:
		return self._lateDecaySteps

	@readonly
	def SwitchStep(self) -> Nullable[int]:
		return self._switchStep

	def CompletedIntervals(self, step: int) -> int:
		if step < 0:
			raise ParameterError(f"Step must not be negative, got {step}.")

		if self._switchStep is None or step <= self._switchStep:
			return step // self._decaySteps

		return self._switchStep // self._decaySteps + (step - self._switchStep) // self._lateDecaySteps

	def LearningRateAtStep(self, step: int) -> float:
		"""
		Returns ``baseLR · decayFactor^intervals`` for the number of intervals completed before ``step``.

		:param step: Number of completed optimizer steps.
		:returns:    Learning rate.
		"""
		return self._baseLR * self._decayFactor ** self.CompletedIntervals(step)

	def ToDict(self) -> Dict[str, Any]:
		return {
			"base_lr":          self._baseLR,
			"decay_factor":     self._decayFactor,
			"decay_steps":      self._decaySteps,
			"late_decay_steps": self._lateDecaySteps,
			"switch_step":      self._switchStep,
		}

	@classmethod
	def FromDict(cls, values: Dict[str, Any]) -> "LearningRateSchedule":
		return cls(values["base_lr"], values["decay_factor"], values["decay_steps"], values["late_decay_steps"], values["switch_step"])


@export
class TrainingConfig(metaclass=ExtendedType, slots=True):
	"""Everything :func:`Train` needs besides the model and the data."""

	_epochs:         int
	_batchSize:      int
	_seed:           int
	_adam:           AdamHyperParameters
	_schedule:       Nullable[LearningRateSchedule]
	_clipNorm:       Nullable[float]
	_checkpointPath: Nullable[Path]
	_topK:           int

	def __init__(
		self,
		epochs: int = 30,
		batchSize: int = DEFAULT_BATCH_SIZE,
		seed: int = 0,
		adam: Nullable[AdamHyperParameters] = None,
		schedule: Nullable[LearningRateSchedule] = LearningRateSchedule(),
		clipNorm: Nullable[float] = None,
		checkpointPath: Nullable[Path] = None,
		topK: int = DEFAULT_TOP_K
	) -> None:
		"""
		Initializes a training configuration.

		:param epochs:         Number of passes over the training data.
		:param batchSize:      Examples per minibatch.
		:param seed:           Seed of the shuffling.
		:param adam:           Adam hyper-parameters.
		:param schedule:       Learning-rate schedule; with ``None``, Adam's ``α`` is used as constant learning rate.
		:param clipNorm:       Global gradient norm limit; ``None`` disables clipping.
		:param checkpointPath: Checkpoint written after every epoch; ``None`` disables checkpoints.
		:param topK:           ``k`` of the validation GAP.
		:raises ParameterError: If a value is out of range.
		"""
		if epochs < 0:
			raise ParameterError(f"Number of epochs must not be negative, got {epochs}.")
		if batchSize < 1:
			raise ParameterError(f"Batch size must be at least 1, got {batchSize}.")
		if clipNorm is not None and not clipNorm > 0.0:
			raise ParameterError(f"Clip norm must be positive, got {clipNorm}.")
		if topK < 1:
			raise ParameterError(f"Validation top-k must be at least 1, got {topK}.")

		self._epochs = epochs
		self._batchSize = batchSize
		self._seed = seed
		self._adam = adam if adam is not None else AdamHyperParameters()
		self._schedule = schedule
		self._clipNorm = clipNorm
		self._checkpointPath = checkpointPath
		self._topK = topK

	@readonly
	def Epochs(self) -> int:
		return self._epochs

	@readonly
	def BatchSize(self) -> int:
		return self._batchSize

	@readonly
	def Seed(self) -> int:
		return self._seed

	@readonly
	def Adam(self) -> AdamHyperParameters:
		return self._adam

	@readonly
	def Schedule(self) -> Nullable[LearningRateSchedule]:
		return self._schedule

	@readonly
	def ClipNorm(self) -> Nullable[float]:
		return self._clipNorm

	@readonly
	def CheckpointPath(self) -> Nullable[Path]:
		return self._checkpointPath

	@readonly
	def TopK(self) -> int:
		return self._topK

	def LearningRate(self, step: int) -> float:
		"""
		Returns the learning rate of the optimizer step following ``step`` completed steps.

		:param step: Number of completed optimizer steps.
		:returns:    Scheduled learning rate, or Adam's ``α`` without a schedule.
		"""
		if self._schedule is None:
			return self._adam.Alpha

		return self._schedule.LearningRateAtStep(step)

	def ToDict(self) -> Dict[str, Any]:
		return {
			"epochs":     self._epochs,
			"batch_size": self._batchSize,
			"seed":       self._seed,
			"adam":       self._adam.ToDict(),
			"schedule":   self._schedule.ToDict() if self._schedule is not None else None,
			"clip_norm":  self._clipNorm,
			"checkpoint": str(self._checkpointPath) if self._checkpointPath is not None else None,
			"top_k":      self._topK,
		}

	@classmethod
	def FromDict(cls, values: Dict[str, Any]) -> "TrainingConfig":
		schedule = values["schedule"]
		checkpoint = values["checkpoint"]
		return cls(
			epochs=values["epochs"],
			batchSize=values["batch_size"],
			seed=values["seed"],
			adam=AdamHyperParameters.FromDict(values["adam"]),
			schedule=LearningRateSchedule.FromDict(schedule) if schedule is not None else None,
			clipNorm=values["clip_norm"],
			checkpointPath=Path(checkpoint) if checkpoint is not None else None,
			topK=values["top_k"]
		)


def _LossWeight(model: MultimodalModel) -> float:
	fusion = model.Config.Fusion
	return fusion.LambdaAlign if fusion.Mode is FusionMode.Projection else 0.0


def _Truth(examples: Sequence[Any], indices: List[int], numClasses: int) -> np.ndarray:
	return np.stack([LabelVector(examples[index].Labels, numClasses) for index in indices])


@export
def ComputeLoss(model: MultimodalModel, examples: Sequence[Any]) -> float:
	"""
	Returns the batch-mean training objective without touching the gradient buffers.

	The loss of one item is the class-mean binary cross-entropy plus ``λ`` times the alignment loss summed over frames.

	:param model:    Model.
	:param examples: Minibatch.
	:returns:        Mean loss.
	"""
	lambdaAlign = _LossWeight(model)
	total = 0.0
	for indices, visual, audio in model.GroupBatch(list(examples)):
		tape = model.Forward(visual, audio)
		bce = BCELoss(tape.Scores, _Truth(examples, indices, model.Config.NumClasses))
		total += float(np.sum(bce + lambdaAlign * tape.alignLoss))

	return total / len(examples)


@export
def ComputeGradients(model: MultimodalModel, examples: Sequence[Any]) -> float:
	"""
	Fills the gradient buffers with the gradient of the batch-mean training objective (see :func:`ComputeLoss`).

	Examples of equal length are computed together; the buffers are zeroed first.

	:param model:    Model.
	:param examples: Minibatch, at least one example.
	:returns:        Mean loss.
	:raises ParameterError: If the minibatch is empty.
	:raises NumericError:   Naming the loss or the first non-finite gradient or parameter.
	"""
	if len(examples) == 0:
		raise ParameterError("Cannot compute gradients of an empty minibatch.")

	store = model.Store
	store.ZeroGradients()

	batchSize = len(examples)
	lambdaAlign = _LossWeight(model)
	total = 0.0
	for indices, visual, audio in model.GroupBatch(list(examples)):
		tape = model.Forward(visual, audio)
		scores = tape.Scores
		truth = _Truth(examples, indices, model.Config.NumClasses)
		total += float(np.sum(BCELoss(scores, truth) + lambdaAlign * tape.alignLoss))

		gradAlign = np.full(len(indices), lambdaAlign / batchSize)
		model.Backward(tape, BCELossGradient(scores, truth) / batchSize, gradAlign)

	loss = total / batchSize
	if not np.isfinite(loss):
		raise NumericError("loss", f"Non-finite loss {loss} in a minibatch of {batchSize} examples.")
	store.CheckFinite()

	return loss


@export
def ClipGlobalNorm(store: ParameterStore, maxNorm: float) -> float:
	"""
	Rescales all gradients in place so their joint L2 norm doesn't exceed ``maxNorm``.

	:param store:   Parameter store.
	:param maxNorm: Norm limit.
	:returns:       Norm before clipping.
	"""
	norm = store.GradientNorm()
	if norm > maxNorm:
		scale = maxNorm / norm
		for gradient in store.Gradients.values():
			gradient *= scale

	return norm


@export
def FiniteDifferenceCheck(
	model: MultimodalModel,
	examples: Sequence[Any],
	step: float = 1e-6,
	samples: int = 100,
	seed: SeedLike = 0,
	analytic: Nullable[Dict[str, np.ndarray]] = None
) -> Dict[str, float]:
	"""
	Compares analytic gradients with central differences ``(L(θ+δ) - L(θ-δ)) / 2δ``.

	Per parameter group (first name component), up to ``samples`` coordinates are drawn without replacement; groups
	with fewer coordinates are checked completely. The relative error of a coordinate is
	``|analytic - numeric| / max(|numeric|, 1e-4)``.

	:param model:    Model; parameters are restored after every perturbation.
	:param examples: Minibatch the loss is evaluated on.
	:param step:     Perturbation ``δ``.
	:param samples:  Coordinates per group.
	:param seed:     Seed of the coordinate sampling.
	:param analytic: Gradients to audit; default: computed with :func:`ComputeGradients`.
	:returns:        Worst relative error per parameter group.
	"""
	store = model.Store
	if analytic is None:
		ComputeGradients(model, examples)
		analytic = {name: gradient.copy() for name, gradient in store.Gradients.items()}

	generator = CreateGenerator(seed)
	errors: Dict[str, float] = {}
	for group, names in store.GroupNames().items():
		coordinates = [(name, index) for name in names for index in range(store[name].size)]
		if len(coordinates) > samples:
			picked = generator.choice(len(coordinates), size=samples, replace=False)
			coordinates = [coordinates[i] for i in sorted(picked.tolist())]

		worst = 0.0
		for name, index in coordinates:
			parameter = store[name]
			position = np.unravel_index(index, parameter.shape)
			original = parameter[position]

			parameter[position] = original + step
			lossPlus = ComputeLoss(model, examples)
			parameter[position] = original - step
			lossMinus = ComputeLoss(model, examples)
			parameter[position] = original

			numeric = (lossPlus - lossMinus) / (2.0 * step)
			error = abs(float(analytic[name][position]) - numeric) / max(abs(numeric), RELATIVE_ERROR_FLOOR)
			worst = max(worst, error)

		errors[group] = worst
		_logger.debug(f"Gradient check of group '{group}': {len(coordinates)} coordinates, worst relative error {worst:.3e}.")

	return errors


@export
class EpochRecord(metaclass=ExtendedType, slots=True):
	"""Summary of one training epoch."""

	_epoch:         int
	_meanLoss:      float
	_validationGAP: Nullable[float]
	_learningRate:  float
	_steps:         int
	_seconds:       float

	def __init__(self, epoch: int, meanLoss: float, validationGAP: Nullable[float], learningRate: float, steps: int, seconds: float) -> None:
		self._epoch = epoch
		self._meanLoss = meanLoss
		self._validationGAP = validationGAP
		self._learningRate = learningRate
		self._steps = steps
		self._seconds = seconds

	@readonly
	def Epoch(self) -> int:
		return self._epoch

	@readonly
	def MeanLoss(self) -> float:
		return self._meanLoss

	@readonly
	def ValidationGAP(self) -> Nullable[float]:
		return self._validationGAP

	@readonly
	def LearningRate(self) -> float:
		return self._learningRate

	@readonly
	def Steps(self) -> int:
		"""
		Read-only property returning the optimizer step counter at the end of the epoch.

		:returns: Number of completed optimizer steps.
		"""
		return self._steps

	@readonly
	def Seconds(self) -> float:
		return self._seconds

	def ToDict(self) -> Dict[str, Any]:
		return {
			"epoch":          self._epoch,
			"mean_loss":      self._meanLoss,
			"validation_gap": self._validationGAP,
			"learning_rate":  self._learningRate,
			"steps":          self._steps,
			"seconds":        self._seconds,
		}

	def __str__(self) -> str:
		gap = f"{self._validationGAP:.6f}" if self._validationGAP is not None else "n/a"
		return f"epoch {self._epoch}: loss {self._meanLoss:.6f}, GAP {gap}, lr {self._learningRate:.3e}, steps {self._steps}, {self._seconds:.1f}s"


@export
class TrainingLog(metaclass=ExtendedType, slots=True):
	"""Per-epoch records of a training run."""

	_records: List[EpochRecord]

	def __init__(self) -> None:
		self._records = []

	def Append(self, record: EpochRecord) -> None:
		self._records.append(record)

	@readonly
	def Records(self) -> List[EpochRecord]:
		return self._records

	@readonly
	def MeanLosses(self) -> List[float]:
		return [record.MeanLoss for record in self._records]

	@readonly
	def ValidationGAPs(self) -> List[Nullable[float]]:
		return [record.ValidationGAP for record in self._records]

	def __iter__(self) -> Iterator[EpochRecord]:
		return iter(self._records)

	def __len__(self) -> int:
		return len(self._records)


@export
def Train(
	model: MultimodalModel,
	examples: Sequence[Any],
	config: TrainingConfig,
	validation: Sequence[Any] = (),
	state: Nullable[AdamState] = None
) -> Tuple[TrainingLog, AdamState]:
	"""
	Trains a model with minibatch Adam.

	Every epoch shuffles the examples with a generator seeded from ``config.Seed``, so identical inputs produce
	identical loss logs. After every epoch, the validation GAP is computed (if validation examples are given) and a
	checkpoint is written (if a path is configured).

	:param model:      Model to train in place.
	:param examples:   Training examples.
	:param config:     Training configuration.
	:param validation: Validation examples.
	:param state:      Optimizer state to resume from; default: fresh state.
	:returns:          The training log and the final optimizer state.
	:raises ParameterError:       If there are no training examples.
	:raises TrainingAbortedError: If the loss becomes non-finite.
	"""
	if len(examples) == 0:
		raise ParameterError("Training needs at least one example.")

	store = model.Store
	state = state if state is not None else AdamState.Create(store.Parameters)
	generator = CreateGenerator(config.Seed)
	truth = GroundTruth.FromExamples(validation) if len(validation) > 0 else None
	log = TrainingLog()
	lastCheckpoint: Nullable[Path] = None

	_logger.info(f"Training {model!s} on {len(examples)} examples for {config.Epochs} epochs (batch {config.BatchSize}).")
	for epoch in range(1, config.Epochs + 1):
		started = perf_counter()
		order = generator.permutation(len(examples))
		totalLoss = 0.0
		learningRate = config.LearningRate(state.T)

		for start in range(0, len(examples), config.BatchSize):
			batch = [examples[index] for index in order[start:start + config.BatchSize]]
			try:
				loss = ComputeGradients(model, batch)
			except NumericError as ex:
				newEx = TrainingAbortedError(state.T, lastCheckpoint)
				newEx.add_note(str(ex))
				raise newEx from ex

			if config.ClipNorm is not None:
				ClipGlobalNorm(store, config.ClipNorm)

			learningRate = config.LearningRate(state.T)
			AdamStep(store.Parameters, store.Gradients, state, config.Adam, learningRate)
			totalLoss += loss * len(batch)
			_logger.debug(f"epoch {epoch}, step {state.T}: loss {loss:.6f}, lr {learningRate:.3e}")

		validationGAP = None
		if truth is not None:
			validationGAP = GapAtK(Predict(model, validation, config.TopK), truth, config.TopK).GAP

		record = EpochRecord(epoch, totalLoss / len(examples), validationGAP, learningRate, state.T, perf_counter() - started)
		log.Append(record)
		_logger.info(str(record))

		if config.CheckpointPath is not None:
			lastCheckpoint = SaveCheckpoint(config.CheckpointPath, model, state, config.ToDict(), epoch)

	return log, state
