from argparse import ArgumentParser, Namespace

import numpy as np

from src.cli.base_command import BaseCommand
from src.corpus.corpus import load_corpus
from src.errors import InvalidInput
from src.graph.builder import edge_counts
from src.graph.filters import filter_eigenvalues
from src.pipeline.checkpoint import load_checkpoint
from src.pipeline.model import forward
from src.pipeline.params import init_params
from src.spectral.operator import filter_response
from src.stats.result_table import ResultTable

COLUMNS = ("conversation", "band", "index", "eigenvalue", "response_re", "response_im", "response_abs")


class SpectrumCommand(BaseCommand):
    """
    Dumps the filter eigenvalues and per-band frequency responses of a
    conversation's interaction graph as CSV.

    The graph is built from encoded features, so a model is needed: a
    checkpoint when given, otherwise a fresh model from the config seed.
    """

    def add_arguments(self, parser: ArgumentParser) -> None:
        parser.add_argument("corpus", help="Corpus file.")
        self.add_run_config_arguments(parser)
        parser.add_argument("--checkpoint", help="Use this model instead of a fresh one.")
        parser.add_argument("--conversation", type=int, default=0, help="Conversation index in the corpus.")
        parser.add_argument("--out", help="CSV file.")

    def run(self, args: Namespace) -> int:
        corpus = load_corpus(args.corpus)
        if args.checkpoint:
            params = load_checkpoint(args.checkpoint)
        else:
            config = self.load_config(args)
            params = init_params(config, corpus.dims, corpus.n_speakers, corpus.n_classes)
        if not 0 <= args.conversation < len(corpus.conversations):
            raise InvalidInput(f"conversation index {args.conversation} out of range "
                               f"[0, {len(corpus.conversations)})")
        conv = corpus.conversations[args.conversation]
        result = forward(conv, params)
        same, cross = edge_counts(result.graph)
        self.system_logger.info(f"conversation '{conv.id}': {result.graph.n_nodes} nodes, "
                                f"{same} same-modal and {cross} cross-modal edges")

        table = ResultTable(COLUMNS, self.table_meta(params.config, conversation_id=conv.id,
                                                     checkpoint=args.checkpoint or ""))
        eigenvalues = dict(zip(("low", "high"), filter_eigenvalues(result.filters)))
        for band in ("low", "high"):
            response = filter_response(result.filters.band(band))
            for i in range(response.shape[0]):
                table.add(conversation=conv.id, band=band, index=i,
                          eigenvalue=float(eigenvalues[band][i]),
                          response_re=float(response[i].real), response_im=float(response[i].imag),
                          response_abs=float(np.abs(response[i])))
        print(table.write(args.out), end="")
        return 0
