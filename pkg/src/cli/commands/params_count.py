from argparse import ArgumentParser, Namespace

from src.cli.base_command import BaseCommand
from src.corpus.corpus import load_corpus
from src.errors import InvalidConfig
from src.pipeline.params import init_params
from src.utils.json import dumps_json


class ParamsCountCommand(BaseCommand):
    """Prints the number of trainable scalars, in total and per component."""

    def add_arguments(self, parser: ArgumentParser) -> None:
        self.add_run_config_arguments(parser)
        parser.add_argument("--corpus", help="Take dims, speakers and classes from this corpus.")
        parser.add_argument("--dims", nargs=3, type=int, metavar=("T", "A", "V"), help="Feature dims.")
        parser.add_argument("--speakers", type=int, default=2)
        parser.add_argument("--classes", type=int, default=6)

    def run(self, args: Namespace) -> int:
        config = self.load_config(args)
        if args.corpus:
            corpus = load_corpus(args.corpus)
            dims, speakers, classes = corpus.dims, corpus.n_speakers, corpus.n_classes
        elif args.dims:
            dims, speakers, classes = tuple(args.dims), args.speakers, args.classes
        else:
            raise InvalidConfig("params-count needs --corpus or --dims")
        params = init_params(config, dims, speakers, classes)
        groups = {}
        for name, tensor in params.items():
            group = name.split(".")[0]
            groups[group] = groups.get(group, 0) + int(tensor.size)
        print(dumps_json({"total": params.count(), "groups": groups}))
        return 0
