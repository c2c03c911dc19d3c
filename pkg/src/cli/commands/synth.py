import os
from argparse import ArgumentParser, Namespace

from src.cli.base_command import BaseCommand
from src.corpus.corpus import write_corpus
from src.corpus.synthetic import generate_synthetic, load_synth_spec
from src.utils.json import save_json


class SynthCommand(BaseCommand):
    """Generates a synthetic corpus and writes it with its spec alongside."""

    def add_arguments(self, parser: ArgumentParser) -> None:
        parser.add_argument("--spec", help="Synthetic corpus spec (JSON or YAML).")
        parser.add_argument("--seed", type=int, help="Override the spec seed.")
        parser.add_argument("--flip-rate", type=float, dest="flip_rate", help="Override the flip rate.")
        parser.add_argument("--noise-sigma", type=float, dest="noise_sigma", help="Override the feature noise.")
        parser.add_argument("--out", help="Corpus file to write.")

    def run(self, args: Namespace) -> int:
        spec = load_synth_spec(args.spec or self.settings.default_synth_spec, seed=args.seed,
                               flip_rate=args.flip_rate, noise_sigma=args.noise_sigma)
        out = args.out or os.path.join(self.settings.runs_dir, f"synth_{spec.seed}.json")
        corpus = generate_synthetic(spec)
        write_corpus(corpus, out)
        save_json(f"{os.path.splitext(out)[0]}.spec.json", spec.model_dump(mode="json"))
        print(out)
        return 0
