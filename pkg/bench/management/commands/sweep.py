import logging

from django.conf import settings
from tqdm import tqdm

from bench.charts import PlotKind, emit_plot
from bench.serializers import SweepOptionsSerializer
from bench.sweep import DetectorResolutionError, ParamStore, SweepConfig, SweepError, SweepRunner
from bench.tables import emit_csv
from mimo_lab.commands import LabCommand, comma_separated
from sysmodel import SystemConfig

logger = logging.getLogger(__name__)


class Command(LabCommand):
    help = "Run a BER/SER sweep over detectors and SNR points and write the records as CSV."

    def add_arguments(self, parser):
        defaults = settings.MIMO_DEFAULTS
        parser.add_argument(
            "--nt",
            type=int,
            default=defaults["nt"],
            help="transmit antennas (default: %(default)s)",
        )
        parser.add_argument(
            "--nr",
            type=int,
            default=defaults["nr"],
            help="receive antennas (default: %(default)s)",
        )
        parser.add_argument(
            "--mod-order",
            type=int,
            default=defaults["mod_order"],
            help="constellation size M (default: %(default)s)",
        )
        parser.add_argument(
            "--detectors",
            type=comma_separated(str),
            default=defaults["detectors"],
            help="comma-separated zf, mmse, zf-sic, mmse-sic, ml or dpst:<params.json> "
            "(default: %(default)s)",
        )
        parser.add_argument(
            "--snr",
            type=comma_separated(float),
            default=defaults["snr_set"],
            help="SNR points in dB, comma-separated (default: %(default)s)",
        )
        parser.add_argument(
            "--frames",
            type=int,
            default=defaults["frames"],
            help="channel realizations per detector and SNR (default: %(default)s)",
        )
        parser.add_argument(
            "--seed",
            type=int,
            default=defaults["seed"],
            help="random seed (default: %(default)s)",
        )
        parser.add_argument(
            "--workers",
            type=int,
            default=settings.MIMO_WORKERS,
            help="cells evaluated in parallel (default: %(default)s)",
        )
        parser.add_argument(
            "--noise-free",
            action="store_true",
            help="transmit without noise (default: %(default)s)",
        )
        parser.add_argument(
            "--no-timing",
            action="store_false",
            dest="timing",
            help="write 0 as detection time so repeated runs give identical files "
            "(default: timing on)",
        )
        parser.add_argument(
            "--out",
            required=True,
            help="CSV file for the records (required)",
        )
        parser.add_argument(
            "--plot-ber",
            help="also draw BER against SNR into this SVG file (default: %(default)s)",
        )
        parser.add_argument(
            "--plot-time",
            help="also draw detection time against SNR into this SVG file (default: %(default)s)",
        )

    def handle(self, *args, **options):
        data = self.validate_options(SweepOptionsSerializer, options)
        cfg = SweepConfig(
            system=SystemConfig(nt=data["nt"], nr=data["nr"], mod_order=data["mod_order"]),
            snr_list_db=data["snr"],
            detectors=data["detectors"],
            frames=data["frames"],
            seed=data["seed"],
            noise_free=data["noise_free"],
            timing=data["timing"],
            workers=data["workers"],
        )
        try:
            runner = SweepRunner(cfg, ParamStore())
        except DetectorResolutionError as error:
            raise self.fail(error)

        progress = tqdm(
            total=len(runner.cells()),
            desc="sweep",
            unit="cell",
            disable=options["verbosity"] < 1,
        )
        try:
            records = runner.run(on_record=lambda record: progress.update())
        except SweepError as error:
            raise self.fail(error)
        finally:
            progress.close()

        outputs = [(emit_csv, (records, data["out"]))]
        if data.get("plot_ber"):
            outputs.append((emit_plot, (records, PlotKind.BER, data["plot_ber"])))
        if data.get("plot_time"):
            outputs.append((emit_plot, (records, PlotKind.TIME, data["plot_time"])))
        for write, arguments in outputs:
            try:
                write(*arguments)
            except OSError as error:
                raise self.fail(f"cannot write {arguments[-1]}: {error}")

        self.stdout.write(f"wrote {len(records)} records to {data['out']}")
