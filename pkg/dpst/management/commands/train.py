from django.conf import settings
from tqdm import tqdm

from dpst.network import LossMode
from dpst.params import save_params
from dpst.serializers import TrainOptionsSerializer
from dpst.training import DpstTrainer, TrainConfig, TrainingDivergedError
from mimo_lab.commands import LabCommand, comma_separated
from sysmodel import Rng, SystemConfig, make_constellation


class Command(LabCommand):
    help = "Train a DPST detector on Rayleigh minibatches and write its parameters as JSON."

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
            "--layers",
            type=int,
            required=True,
            help="number of unfolded layers T (required)",
        )
        parser.add_argument(
            "--p",
            type=float,
            default=defaults["p"],
            help="shrinkage acts on layers t >= p*T (default: %(default)s)",
        )
        parser.add_argument(
            "--batch",
            type=int,
            default=defaults["batch"],
            help="minibatch size (default: %(default)s)",
        )
        parser.add_argument(
            "--steps",
            type=int,
            default=defaults["steps"],
            help="optimizer steps (default: %(default)s)",
        )
        parser.add_argument(
            "--lr",
            type=float,
            default=defaults["lr"],
            help="Adam learning rate (default: %(default)s)",
        )
        parser.add_argument(
            "--snr-set",
            type=comma_separated(float),
            default=defaults["snr_set"],
            help="training SNRs in dB, comma-separated (default: %(default)s)",
        )
        parser.add_argument(
            "--loss",
            choices=LossMode.to_list(),
            default=defaults["loss"],
            help="training loss (default: %(default)s)",
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
            help="threads sharing each minibatch (default: %(default)s)",
        )
        parser.add_argument(
            "--log-every",
            type=int,
            default=defaults["log_every"],
            help="log interval in steps (default: %(default)s)",
        )
        parser.add_argument(
            "--out",
            required=True,
            help="where to write the parameter file (required)",
        )

    def handle(self, *args, **options):
        data = self.validate_options(TrainOptionsSerializer, options)
        shape = SystemConfig(nt=data["nt"], nr=data["nr"], mod_order=data["mod_order"])
        cfg = TrainConfig(
            layers=data["layers"],
            p=data["p"],
            batch_size=data["batch"],
            steps=data["steps"],
            snr_set_db=tuple(data["snr_set"]),
            learning_rate=data["lr"],
            seed=data["seed"],
            loss_mode=data["loss"],
            workers=data["workers"],
            log_every=data["log_every"],
        )
        trainer = DpstTrainer(cfg, shape, make_constellation(shape.mod_order), Rng(cfg.seed))

        progress = tqdm(
            total=cfg.steps,
            desc=f"DPST T={cfg.layers}",
            disable=options["verbosity"] < 1,
        )
        try:
            for _, loss in trainer.steps():
                progress.update()
                progress.set_postfix(loss=f"{loss:.4g}", refresh=False)
        except TrainingDivergedError as error:
            raise self.fail(error)
        finally:
            progress.close()

        try:
            save_params(trainer.params, data["out"])
        except OSError as error:
            raise self.fail(f"cannot write {data['out']}: {error}")
        self.stdout.write(f"final mean loss: {trainer.history[-1][1]:.6g}")
