import os
from argparse import ArgumentParser, Namespace

from src.cli.base_command import BaseCommand
from src.corpus.corpus import load_corpus
from src.pipeline.checkpoint import save_checkpoint
from src.pipeline.trainer import evaluate, train
from src.utils.json import dumps_json, save_json

CHECKPOINT_NAME = "model.smck"


class TrainCommand(BaseCommand):
    """
    Trains a model and writes the checkpoint, the JSON-lines training log,
    the resolved config and the test metrics into one output directory.
    """

    def add_arguments(self, parser: ArgumentParser) -> None:
        parser.add_argument("corpus", help="Corpus file.")
        self.add_run_config_arguments(parser)
        parser.add_argument("--epochs", type=int, help="Override the maximum number of epochs.")
        parser.add_argument("--out", help="Output directory.")

    def run(self, args: Namespace) -> int:
        config = self.load_config(args, epochs=args.epochs)
        corpus = load_corpus(args.corpus)
        out_dir = args.out or os.path.join(self.settings.runs_dir, f"train_{config.seed}")
        os.makedirs(out_dir, exist_ok=True)
        save_json(os.path.join(out_dir, "config.json"), config.to_dict())

        result = train(corpus, config, log_path=os.path.join(out_dir, self.settings.run_log_name),
                       dump_dir=out_dir)
        checkpoint = os.path.join(out_dir, CHECKPOINT_NAME)
        save_checkpoint(checkpoint, result.params)

        summary = {
            "checkpoint": checkpoint,
            "best_epoch": result.best_epoch,
            "best_val_w_f1": result.best_val_f1,
            "stopped_early": result.stopped_early,
            "n_params": result.params.count(),
        }
        test_set = corpus.split("test")
        if test_set:
            metrics = evaluate(test_set, result.params, corpus.n_classes)
            save_json(os.path.join(out_dir, "test_metrics.json"), metrics.to_dict())
            summary["test_w_f1"] = metrics.weighted_f1
            summary["test_w_acc"] = metrics.weighted_acc
        print(dumps_json(summary))
        return 0
