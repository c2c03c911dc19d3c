from argparse import ArgumentParser, Namespace
from typing import Dict, List

import numpy as np

from src.cli.base_command import ABLATION_CHOICES, BaseCommand
from src.config.run_config import RunConfig
from src.corpus.corpus import load_corpus
from src.pipeline.model import ablate
from src.pipeline.trainer import evaluate, train
from src.stats.result_table import ResultTable

COLUMNS = ("variant", "seed", "test_w_f1", "test_w_acc", "flipped_acc", "best_epoch")
DEFAULT_VARIANTS = ("full", "cl", "fgn", "high")


def variant_config(config: RunConfig, variant: str, seed: int) -> RunConfig:
    base = config.with_overrides(seed=seed)
    return base if variant == "full" else ablate(base, variant)


class AblationCommand(BaseCommand):
    """
    Trains the full model and each ablated variant over several seeds and
    reports test W-F1 and the accuracy on flipped utterances.
    """

    def add_arguments(self, parser: ArgumentParser) -> None:
        parser.add_argument("corpus", help="Corpus file.")
        self.add_run_config_arguments(parser)
        parser.add_argument("--variants", nargs="+", choices=("full",) + ABLATION_CHOICES,
                            default=list(DEFAULT_VARIANTS))
        parser.add_argument("--seeds", nargs="+", type=int, help="Seeds (default: config seed and the next two).")
        parser.add_argument("--epochs", type=int, help="Override the maximum number of epochs.")
        parser.add_argument("--out", help="CSV file.")

    def run(self, args: Namespace) -> int:
        config = self.load_config(args, epochs=args.epochs)
        corpus = load_corpus(args.corpus)
        test_set = corpus.split("test") or corpus.conversations
        seeds = args.seeds or [config.seed, config.seed + 1, config.seed + 2]

        table = ResultTable(COLUMNS, self.table_meta(config, variants=list(args.variants), seeds=seeds))
        scores: Dict[str, List[float]] = {}
        for variant in args.variants:
            for seed in seeds:
                result = train(corpus, variant_config(config, variant, seed), run_name=f"{variant}-{seed}")
                metrics = evaluate(test_set, result.params, corpus.n_classes)
                table.add(variant=variant, seed=seed, test_w_f1=metrics.weighted_f1,
                          test_w_acc=metrics.weighted_acc, flipped_acc=metrics.masked_acc,
                          best_epoch=result.best_epoch)
                scores.setdefault(variant, []).append(metrics.weighted_f1)
        for variant, values in scores.items():
            self.system_logger.info(f"{variant}: mean test W-F1 {np.mean(values):.4f} over {len(values)} seeds")
        print(table.write(args.out), end="")
        return 0
