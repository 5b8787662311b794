from bench.tables import CsvFormatError, read_csv, report
from mimo_lab.commands import LabCommand


class Command(LabCommand):
    help = "Print a sweep CSV as a table of BER per detector and SNR with detection time per frame."

    def add_arguments(self, parser):
        parser.add_argument("--in", dest="source", required=True, help="sweep CSV (required)")

    def handle(self, *args, **options):
        try:
            records = read_csv(options["source"])
        except CsvFormatError as error:
            raise self.fail(error)
        except OSError as error:
            raise self.fail(f"cannot read {options['source']}: {error}")
        self.stdout.write(report(records))
