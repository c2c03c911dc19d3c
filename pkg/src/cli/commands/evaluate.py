from argparse import ArgumentParser, Namespace

from src.cli.base_command import BaseCommand
from src.corpus.corpus import load_corpus, remap_speakers
from src.errors import InvalidInput
from src.pipeline.checkpoint import load_checkpoint
from src.pipeline.trainer import evaluate
from src.utils.json import dumps_json, save_json


class EvalCommand(BaseCommand):
    """Scores a checkpoint on one split; prints a table and the JSON report."""

    def add_arguments(self, parser: ArgumentParser) -> None:
        parser.add_argument("corpus", help="Corpus file.")
        parser.add_argument("checkpoint", help="Checkpoint written by `train`.")
        parser.add_argument("--split", choices=("train", "val", "test", "all"), default="test")
        parser.add_argument("--out", help="Write the JSON report here as well.")

    def run(self, args: Namespace) -> int:
        corpus = load_corpus(args.corpus)
        params = load_checkpoint(args.checkpoint)
        if tuple(corpus.dims) != tuple(params.dims) or corpus.n_classes != params.n_classes:
            raise InvalidInput(f"corpus dims {corpus.dims}/{corpus.n_classes} classes do not match "
                               f"checkpoint {params.dims}/{params.n_classes}")
        if params.speaker_names:
            corpus = remap_speakers(corpus, params.speaker_names)
        elif corpus.n_speakers > params.n_speakers:
            raise InvalidInput(f"corpus has {corpus.n_speakers} speakers, checkpoint knows {params.n_speakers}")
        conversations = corpus.conversations if args.split == "all" else corpus.split(args.split)
        report = evaluate(conversations, params, corpus.n_classes)
        payload = {"split": args.split, "config": params.config.to_dict(), **report.to_dict()}
        if args.out:
            save_json(args.out, payload)
        print(report.table())
        print(dumps_json(payload))
        return 0
