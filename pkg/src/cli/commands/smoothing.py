from argparse import ArgumentParser, Namespace

from src.cli.base_command import BaseCommand
from src.corpus.corpus import load_corpus
from src.pipeline.smoothing import depth_sweep
from src.stats.result_table import ResultTable

COLUMNS = ("stack", "depth", "mean_cosine", "n_conversations")


class SmoothingCommand(BaseCommand):
    """Over-smoothing depth sweep for the Fourier stacks and the spatial baseline."""

    def add_arguments(self, parser: ArgumentParser) -> None:
        parser.add_argument("corpus", help="Corpus file.")
        self.add_run_config_arguments(parser)
        parser.add_argument("--depths", nargs="+", type=int, default=[2, 4, 8])
        parser.add_argument("--epochs", type=int, default=0,
                            help="Train each model this many epochs first (0 measures fresh models).")
        parser.add_argument("--out", help="CSV file.")

    def run(self, args: Namespace) -> int:
        config = self.load_config(args)
        corpus = load_corpus(args.corpus)
        rows = depth_sweep(corpus, config, depths=args.depths, epochs=args.epochs)
        table = ResultTable(COLUMNS, self.table_meta(config, depths=list(args.depths), sweep_epochs=args.epochs))
        for row in rows:
            table.add(stack=row.stack, depth=row.depth, mean_cosine=row.mean_cosine,
                      n_conversations=row.n_conversations)
        print(table.write(args.out), end="")
        return 0
