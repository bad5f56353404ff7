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
Command line interface: ``generate``, ``train``, ``evaluate``, ``predict``, ``ensemble`` and ``gradcheck``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.
"""
from argparse import ArgumentParser, ArgumentTypeError, Namespace
from logging  import basicConfig, getLogger
from pathlib  import Path
from sys      import stderr
from typing   import Callable, Dict, List, NoReturn, Optional as Nullable

from pyMultimodalRNN            import __version__, ModelKind, ModelConfig, MultimodalModel
from pyMultimodalRNN.Exception  import MultimodalRNNException, ParameterError, ModeError, ShapeError, ConsistencyError, NumericError
from pyMultimodalRNN.Exception  import DatasetParseError, DatasetValidationError, FormatVersionError, InputError, CheckpointError, DegenerateWeightsError
from pyMultimodalRNN.Cell       import CellKind
from pyMultimodalRNN.Encoder    import EncoderConfig, DEFAULT_MAX_FRAMES
from pyMultimodalRNN.Fusion     import FusionMode, FusionConfig
from pyMultimodalRNN.Training   import AdamHyperParameters, LearningRateSchedule, TrainingConfig, Train, FiniteDifferenceCheck, DEFAULT_BATCH_SIZE
from pyMultimodalRNN.Checkpoint import SaveCheckpoint, LoadCheckpoint
from pyMultimodalRNN.Evaluation import DEFAULT_TOP_K, GapAtK, GroundTruth, Predict, EnsembleCombine, WriteGapReport
from pyMultimodalRNN.Dataset    import DatasetSpec, Dataset, FrameExample, GenerateSynthetic, WriteDataset, LoadDataset, WritePredictions, ReadPredictions


EXIT_SUCCESS = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3

_logger = getLogger(__name__)


class _Parser(ArgumentParser):
	def error(self, message: str) -> NoReturn:
		self.print_usage(stderr)
		self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _Boolean(value: str) -> bool:
	normalized = value.lower()
	if normalized in ("true", "yes", "on", "1"):
		return True
	elif normalized in ("false", "no", "off", "0"):
		return False

	raise ArgumentTypeError(f"expected true or false, got '{value}'")


def _AddArchitectureArguments(parser: ArgumentParser) -> None:
	parser.add_argument("--model-kind", choices=[str(kind) for kind in ModelKind], default=str(ModelKind.FrameLevel))
	parser.add_argument("--cell", choices=[str(kind) for kind in CellKind], default=str(CellKind.GRU))
	parser.add_argument("--bidirectional", type=_Boolean, default=True, metavar="{true|false}")
	parser.add_argument("--layers", type=int, default=2)
	parser.add_argument("--hidden", type=int, default=16)
	parser.add_argument("--fusion", choices=[str(mode) for mode in FusionMode], default=str(FusionMode.Concat))
	parser.add_argument("--shared-dim", type=int, default=16)
	parser.add_argument("--lambda-align", type=float, default=0.1)
	parser.add_argument("--attention", type=_Boolean, default=True, metavar="{true|false}")
	parser.add_argument("--max-frames", type=int, default=DEFAULT_MAX_FRAMES)


def CreateParser() -> ArgumentParser:
	"""
	Creates the argument parser with all subcommands.

	:returns: Argument parser; usage errors exit with code 1.
	"""
	parser = _Parser(prog="pyMultimodalRNN", description="Multimodal recurrent sequence classification.")
	parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
	parser.add_argument("--log-level", default="info", choices=["debug", "info", "warning", "error"])
	commands = parser.add_subparsers(dest="command", required=True)

	generate = commands.add_parser("generate", help="Generate a planted-signal dataset.")
	generate.add_argument("--out", type=Path, required=True)
	generate.add_argument("--videos", type=int, default=2500)
	generate.add_argument("--classes", type=int, default=10)
	generate.add_argument("--frames", type=int, default=20)
	generate.add_argument("--dv", type=int, default=16)
	generate.add_argument("--da", type=int, default=4)
	generate.add_argument("--labels-per-video", type=float, default=2.0)
	generate.add_argument("--signal", type=float, default=3.0)
	generate.add_argument("--test-fraction", type=float, default=0.2)
	generate.add_argument("--seed", type=int, default=0)

	train = commands.add_parser("train", help="Train a model on the train split, validate on the test split.")
	train.add_argument("--data", type=Path, required=True)
	_AddArchitectureArguments(train)
	train.add_argument("--lr", type=float, default=0.01)
	train.add_argument("--decay", type=float, default=0.95)
	train.add_argument("--decay-steps", type=int, default=1000)
	train.add_argument("--late-decay-steps", type=int, default=None)
	train.add_argument("--switch-step", type=int, default=None)
	train.add_argument("--clip-norm", type=float, default=None)
	train.add_argument("--batch", type=int, default=DEFAULT_BATCH_SIZE)
	train.add_argument("--epochs", type=int, default=30)
	train.add_argument("--k", type=int, default=DEFAULT_TOP_K)
	train.add_argument("--seed", type=int, default=0)
	train.add_argument("--checkpoint", type=Path, required=True)

	evaluate = commands.add_parser("evaluate", help="Print the GAP of a checkpoint on the test split.")
	evaluate.add_argument("--data", type=Path, required=True)
	evaluate.add_argument("--checkpoint", type=Path, required=True)
	evaluate.add_argument("--k", type=int, default=DEFAULT_TOP_K)
	evaluate.add_argument("--report", type=Path, default=None)

	predict = commands.add_parser("predict", help="Write top-k predictions of the test split as CSV.")
	predict.add_argument("--data", type=Path, required=True)
	predict.add_argument("--checkpoint", type=Path, required=True)
	predict.add_argument("--k", type=int, default=DEFAULT_TOP_K)
	predict.add_argument("--out", type=Path, required=True)

	ensemble = commands.add_parser("ensemble", help="Combine prediction files weighted by their GAP.")
	ensemble.add_argument("--preds", type=Path, nargs="+", required=True)
	ensemble.add_argument("--gaps", type=float, nargs="+", required=True)
	ensemble.add_argument("--k", type=int, default=DEFAULT_TOP_K)
	ensemble.add_argument("--out", type=Path, required=True)

	gradcheck = commands.add_parser("gradcheck", help="Audit analytic gradients with finite differences.")
	_AddArchitectureArguments(gradcheck)
	gradcheck.add_argument("--data", type=Path, default=None, help="Dataset to draw the batch from (default: a small synthetic one).")
	gradcheck.add_argument("--videos", type=int, default=4)
	gradcheck.add_argument("--classes", type=int, default=5)
	gradcheck.add_argument("--frames", type=int, default=6)
	gradcheck.add_argument("--dv", type=int, default=6)
	gradcheck.add_argument("--da", type=int, default=3)
	gradcheck.add_argument("--step", type=float, default=1e-6)
	gradcheck.add_argument("--samples", type=int, default=100)
	gradcheck.add_argument("--tolerance", type=float, default=1e-4)
	gradcheck.add_argument("--seed", type=int, default=0)

	return parser


def _ModelConfig(args: Namespace, numClasses: int, visualDim: int, audioDim: int) -> ModelConfig:
	return ModelConfig(
		modelKind=args.model_kind,
		visualDim=visualDim,
		audioDim=audioDim,
		numClasses=numClasses,
		encoder=EncoderConfig(args.cell, args.hidden, args.layers, args.bidirectional),
		fusion=FusionConfig(args.fusion, args.shared_dim, args.lambda_align),
		attention=args.attention,
		maxFrames=args.max_frames
	)


def _EvaluationExamples(dataset: Dataset) -> List[FrameExample]:
	examples = dataset.Test
	if len(examples) == 0:
		_logger.warning("Dataset has no test split; using all records.")
		examples = dataset.Examples

	return examples


def _CheckCompatible(model: MultimodalModel, dataset: Dataset) -> None:
	config = model.Config
	if (config.NumClasses, config.VisualDim, config.AudioDim) != (dataset.NumClasses, dataset.VisualDim, dataset.AudioDim):
		raise InputError(
			f"Checkpoint expects C={config.NumClasses}, D_v={config.VisualDim}, D_a={config.AudioDim}, "
			f"dataset has C={dataset.NumClasses}, D_v={dataset.VisualDim}, D_a={dataset.AudioDim}."
		)


def HandleGenerate(args: Namespace) -> int:
	spec = DatasetSpec(args.videos, args.classes, args.frames, args.dv, args.da, args.labels_per_video, args.seed, args.signal, args.test_fraction)
	WriteDataset(GenerateSynthetic(spec), args.out)
	return EXIT_SUCCESS


def HandleTrain(args: Namespace) -> int:
	dataset = LoadDataset(args.data)
	model = MultimodalModel.Create(_ModelConfig(args, dataset.NumClasses, dataset.VisualDim, dataset.AudioDim), args.seed)
	schedule = LearningRateSchedule(args.lr, args.decay, args.decay_steps, args.late_decay_steps, args.switch_step)
	config = TrainingConfig(args.epochs, args.batch, args.seed, AdamHyperParameters(), schedule, args.clip_norm, args.checkpoint, args.k)

	log, state = Train(model, dataset.Train, config, dataset.Test)
	SaveCheckpoint(args.checkpoint, model, state, config.ToDict(), len(log))

	for record in log:
		print(record)
	return EXIT_SUCCESS


def HandleEvaluate(args: Namespace) -> int:
	model = LoadCheckpoint(args.checkpoint).Model
	dataset = LoadDataset(args.data)
	_CheckCompatible(model, dataset)

	examples = _EvaluationExamples(dataset)
	report = GapAtK(Predict(model, examples, args.k), GroundTruth.FromExamples(examples), args.k)
	if args.report is not None:
		WriteGapReport(report, args.report)

	print(f"GAP@{args.k}: {report.GAP:.6f}")
	return EXIT_SUCCESS


def HandlePredict(args: Namespace) -> int:
	model = LoadCheckpoint(args.checkpoint).Model
	dataset = LoadDataset(args.data)
	_CheckCompatible(model, dataset)

	WritePredictions(Predict(model, _EvaluationExamples(dataset), args.k), args.out)
	return EXIT_SUCCESS


def HandleEnsemble(args: Namespace) -> int:
	predictions = [ReadPredictions(path) for path in args.preds]
	WritePredictions(EnsembleCombine(predictions, args.gaps, args.k), args.out)
	return EXIT_SUCCESS


def HandleGradcheck(args: Namespace) -> int:
	if args.data is not None:
		dataset = LoadDataset(args.data)
		examples = dataset.Examples[:args.videos]
	else:
		labelsPerVideo = min(2.0, float(args.classes))
		dataset = GenerateSynthetic(DatasetSpec(args.videos, args.classes, args.frames, args.dv, args.da, labelsPerVideo, args.seed, testFraction=0.0))
		examples = dataset.Examples

	model = MultimodalModel.Create(_ModelConfig(args, dataset.NumClasses, dataset.VisualDim, dataset.AudioDim), args.seed)
	errors = FiniteDifferenceCheck(model, examples, args.step, args.samples, args.seed)

	worst = max(errors.values())
	for group, error in errors.items():
		print(f"{group:<10} {error:.3e}")
	print(f"max relative error {worst:.3e} (tolerance {args.tolerance:.1e})")

	if worst > args.tolerance:
		_logger.error(f"Gradient check failed: {worst:.3e} > {args.tolerance:.1e}")
		return EXIT_NUMERIC
	return EXIT_SUCCESS


_HANDLERS: Dict[str, Callable[[Namespace], int]] = {
	"generate":  HandleGenerate,
	"train":     HandleTrain,
	"evaluate":  HandleEvaluate,
	"predict":   HandlePredict,
	"ensemble":  HandleEnsemble,
	"gradcheck": HandleGradcheck,
}


def ExitCode(ex: BaseException) -> int:
	"""
	Maps an exception to the process exit code.

	:param ex: Raised exception.
	:returns:  1 for usage errors, 2 for data errors, 3 for numeric failures.
	"""
	if isinstance(ex, NumericError):
		return EXIT_NUMERIC
	elif isinstance(ex, (DatasetParseError, DatasetValidationError, FormatVersionError, InputError, CheckpointError, DegenerateWeightsError, OSError)):
		return EXIT_DATA
	elif isinstance(ex, (ParameterError, ModeError, ShapeError, ConsistencyError)):
		return EXIT_USAGE

	return EXIT_DATA


def main(argv: Nullable[List[str]] = None) -> int:
	"""
	Entry point of the ``pyMultimodalRNN`` console script.

	:param argv: Arguments without the program name (default: ``sys.argv[1:]``).
	:returns:    Exit code.
	"""
	args = CreateParser().parse_args(argv)
	basicConfig(level=args.log_level.upper(), format="%(asctime)s %(levelname)-7s %(name)s: %(message)s")

	try:
		return _HANDLERS[args.command](args)
	except (MultimodalRNNException, OSError) as ex:
		print(f"{ex.__class__.__name__}: {ex}", file=stderr)
		for note in getattr(ex, "__notes__", []):
			print(f"  {note}", file=stderr)
		return ExitCode(ex)
