import os
from argparse import ArgumentParser, Namespace

from src.cli.base_command import BaseCommand
from src.spectral.benchmark import DEFAULT_SIZES, MAX_DENSE_N, run_bench
from src.stats.result_table import ResultTable
from src.utils.json import save_json

COLUMNS = ("n", "d", "spatial_seconds", "spectral_seconds", "residual", "check")


class BenchCommand(BaseCommand):
    """
    Times dense L X W against dft -> fgo_apply -> idft on random circulant
    operators, after checking both agree.
    """

    def add_arguments(self, parser: ArgumentParser) -> None:
        parser.add_argument("--n", nargs="+", type=int, default=list(DEFAULT_SIZES), help="Node counts.")
        parser.add_argument("--d", type=int, default=8, help="Feature width.")
        parser.add_argument("--repeats", type=int, default=5, help="Timed repeats per size (best kept).")
        parser.add_argument("--max-dense-n", type=int, default=MAX_DENSE_N,
                            help="Largest n the dense operator is formed and timed at.")
        parser.add_argument("--seed", type=int, default=0)
        parser.add_argument("--out", help="CSV file; a .summary.json with the slopes is written next to it.")

    def run(self, args: Namespace) -> int:
        report = run_bench(args.n, d=args.d, repeats=args.repeats, seed=args.seed, max_dense_n=args.max_dense_n)
        table = ResultTable(COLUMNS, self.table_meta(sizes=list(args.n), d=args.d, repeats=args.repeats,
                                                     max_dense_n=args.max_dense_n, seed=args.seed))
        table.extend(report.as_table())
        print(table.write(args.out), end="")
        self.system_logger.info(f"log-log slope: spatial {report.spatial_slope:.3f}, "
                                f"spectral {report.spectral_slope:.3f} "
                                f"({report.spectral_slope_common:.3f} over the dense sizes)")
        if args.out:
            save_json(f"{os.path.splitext(args.out)[0]}.summary.json", {
                "sizes": [r.n for r in report.rows],
                "dense_sizes": [r.n for r in report.rows if r.dense],
                "d": args.d,
                "repeats": args.repeats,
                "spatial_slope": report.spatial_slope,
                "spectral_slope": report.spectral_slope,
                "spectral_slope_common": report.spectral_slope_common,
                "frequency_scales_better": report.frequency_scales_better,
                "max_residual": max(r.residual for r in report.rows),
            })
        return 0
