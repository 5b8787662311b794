from bench.charts import PlotKind, emit_plot
from bench.tables import CsvFormatError, read_csv
from mimo_lab.commands import LabCommand


class Command(LabCommand):
    help = "Draw BER or detection time against SNR from a sweep CSV as a standalone SVG."

    def add_arguments(self, parser):
        parser.add_argument("--in", dest="source", required=True, help="sweep CSV (required)")
        parser.add_argument(
            "--kind",
            choices=PlotKind.to_list(),
            default=PlotKind.BER.value,
            help="what to draw on the y axis (default: %(default)s)",
        )
        parser.add_argument("--out", required=True, help="SVG file to write (required)")

    def handle(self, *args, **options):
        try:
            records = read_csv(options["source"])
        except CsvFormatError as error:
            raise self.fail(error)
        except OSError as error:
            raise self.fail(f"cannot read {options['source']}: {error}")
        if not records:
            raise self.fail(f"{options['source']} holds no records")

        try:
            emit_plot(records, options["kind"], options["out"])
        except OSError as error:
            raise self.fail(f"cannot write {options['out']}: {error}")
