import csv
import hashlib
import os
import re
import tempfile
from collections import defaultdict
from dataclasses import replace
from io import StringIO
from unittest import mock

import numpy as np
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, tag

from bench.charts import PlotKind, emit_plot
from bench.records import CSV_FIELDS, BerRecord
from bench.sweep import (
    BatchDetector,
    DetectorResolutionError,
    ParamStore,
    ShapeMismatchError,
    SweepConfig,
    SweepError,
    cell_seed,
    run_sweep,
    splitmix64,
)
from bench.tables import CsvFormatError, emit_csv, read_csv, report
from detectors import detect_zf
from dpst.network import detect_dpst
from dpst.params import init_params, save_params
from dpst.training import DpstTrainer, TrainConfig
from sysmodel import Rng, SystemConfig, make_constellation

SYSTEM = SystemConfig(nt=4, nr=8, mod_order=4)
ALL_DETECTORS = ("zf", "mmse", "zf-sic", "mmse-sic", "ml")


def record(detector="zf", snr_db=10.0, bit_errors=3, total_bits=800, wall_time_ms=1.5, frames=100):
    return BerRecord.from_counts(
        detector=detector,
        snr_db=snr_db,
        frames=frames,
        bit_errors=bit_errors,
        total_bits=total_bits,
        symbol_errors=bit_errors,
        total_symbols=total_bits // 2,
        wall_time_ms=wall_time_ms,
    )


def counts(records):
    return [(r.detector, r.snr_db, r.bit_errors, r.symbol_errors, r.total_bits) for r in records]


class TemporaryDirectoryMixin:
    def setUp(self):
        super().setUp()
        self.directory = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.directory.cleanup()
        super().tearDown()

    def path(self, name):
        return os.path.join(self.directory.name, name)


class CellSeedTest(SimpleTestCase):
    def test_splitmix_reference_value(self):
        self.assertEqual(splitmix64(0), 0xE220A8397B1DCDAF)

    def test_base_seed_is_xored(self):
        self.assertEqual(cell_seed(0, 3) ^ cell_seed(12345, 3), 12345)

    def test_distinct_snr_indices(self):
        seeds = {cell_seed(0, index) for index in range(100)}
        self.assertEqual(len(seeds), 100)

    def test_negative_seed_stays_in_range(self):
        self.assertLess(cell_seed(-1, 0), 1 << 64)


class SweepConfigTest(SimpleTestCase):
    def test_rejects_zero_frames(self):
        with self.assertRaises(ValueError):
            SweepConfig(system=SYSTEM, snr_list_db=[0.0], detectors=["zf"], frames=0)

    def test_rejects_empty_snr_list(self):
        with self.assertRaises(ValueError):
            SweepConfig(system=SYSTEM, snr_list_db=[], detectors=["zf"], frames=1)


class RunSweepTest(TemporaryDirectoryMixin, SimpleTestCase):
    def sweep(self, **overrides):
        fields = dict(system=SYSTEM, snr_list_db=(0.0, 10.0), detectors=("zf",), frames=20, seed=0)
        fields.update(overrides)
        return SweepConfig(**fields)

    def test_noise_free_zero_forcing_is_exact(self):
        records = run_sweep(self.sweep(frames=100, noise_free=True))
        self.assertTrue(all(r.ber == 0.0 and r.ser == 0.0 for r in records))

    def test_noise_free_every_detector_is_exact(self):
        records = run_sweep(self.sweep(detectors=ALL_DETECTORS, snr_list_db=(5.0,), noise_free=True))
        self.assertEqual([r.bit_errors for r in records], [0] * len(ALL_DETECTORS))

    def test_one_record_per_cell_detector_major(self):
        records = run_sweep(self.sweep(detectors=("zf", "mmse", "ml"), snr_list_db=(0.0, 5.0, 10.0)))
        self.assertEqual(
            [(r.detector, r.snr_db) for r in records],
            [(d, s) for d in ("zf", "mmse", "ml") for s in (0.0, 5.0, 10.0)],
        )

    def test_bit_accounting(self):
        system = SystemConfig(nt=3, nr=4, mod_order=16)
        records = run_sweep(self.sweep(system=system, detectors=("mmse",), frames=7))
        for r in records:
            self.assertEqual(r.total_bits, 7 * 3 * 4)
            self.assertEqual(r.ber, r.bit_errors / r.total_bits)
            self.assertGreaterEqual(r.wall_time_ms, 0)

    def test_detectors_share_realizations(self):
        seen = defaultdict(list)

        def recording(name):
            def detect(realization, constellation):
                digest = hashlib.sha256(
                    realization.H.tobytes() + realization.y.tobytes() + realization.bits.tobytes()
                ).hexdigest()
                seen[(name, realization.noise_var)].append(digest)
                return detect_zf(realization.H, realization.y, constellation)

            return detect

        cfg = self.sweep(detectors=("seen-a", "seen-b"), snr_list_db=(0.0, 20.0), workers=2)
        run_sweep(cfg, extra_detectors={"seen-a": recording("a"), "seen-b": recording("b")})
        noise_levels = {noise_var for _, noise_var in seen}
        self.assertEqual(len(noise_levels), 2)
        for noise_var in noise_levels:
            self.assertEqual(seen[("a", noise_var)], seen[("b", noise_var)])
            self.assertEqual(len(seen[("a", noise_var)]), 20)

    def test_repeatable_across_worker_counts(self):
        cfg = self.sweep(detectors=("zf", "mmse-sic"), snr_list_db=(0.0, 5.0, 10.0))
        single = run_sweep(cfg)
        again = run_sweep(cfg)
        pooled = run_sweep(replace(cfg, workers=4))
        self.assertEqual(counts(single), counts(again))
        self.assertEqual(counts(single), counts(pooled))

    def test_timing_can_be_switched_off(self):
        records = run_sweep(self.sweep(timing=False))
        self.assertEqual([r.wall_time_ms for r in records], [0.0, 0.0])

    def test_detector_failure_names_the_cell(self):
        def broken(realization, constellation):
            raise np.linalg.LinAlgError("boom")

        with self.assertRaises(SweepError) as raised:
            run_sweep(self.sweep(detectors=("broken",)), extra_detectors={"broken": broken})
        self.assertEqual(raised.exception.detector, "broken")
        self.assertEqual(raised.exception.snr_db, 0.0)
        self.assertIn("boom", str(raised.exception))

    def test_unknown_detector(self):
        with self.assertRaises(DetectorResolutionError):
            run_sweep(self.sweep(detectors=("lmmse",)))

    def test_missing_params_file_names_the_path(self):
        path = self.path("missing.json")
        with self.assertRaises(DetectorResolutionError) as raised:
            run_sweep(self.sweep(detectors=(f"dpst:{path}",)))
        self.assertIn(path, str(raised.exception))

    def test_params_shape_mismatch(self):
        path = self.path("t5.json")
        save_params(init_params(5, 0.5, nt=2, nr=8, mod_order=4), path)
        with self.assertRaises(ShapeMismatchError):
            run_sweep(self.sweep(detectors=(f"dpst:{path}",)))

    def test_dpst_detector(self):
        path = self.path("t30.json")
        save_params(init_params(30, 0.5, nt=4, nr=8, mod_order=4), path)
        store = ParamStore()
        records = run_sweep(self.sweep(detectors=(f"dpst:{path}", "zf")), paramstore=store)
        self.assertEqual(len(records), 4)
        self.assertEqual(records[0].detector, f"dpst:{path}")
        self.assertIs(store.load(path), store.load(path))

    def test_batched_dpst_counts_match_per_frame_detection(self):
        path = self.path("t12.json")
        params = init_params(12, 0.5, nt=4, nr=8, mod_order=4)
        save_params(params, path)
        per_frame = {"dpst-frame": lambda r, c: detect_dpst(r.H, r.y, params, c)}
        cfg = self.sweep(detectors=(f"dpst:{path}", "dpst-frame"), frames=45)
        # blocks of 16 leave a partial last block
        with mock.patch("bench.sweep.BATCH_BLOCK", 16):
            records = run_sweep(cfg, extra_detectors=per_frame)
        batched, single = records[:2], records[2:]
        self.assertGreater(sum(r.bit_errors for r in single), 0)
        for ours, reference in zip(batched, single):
            self.assertEqual(
                (ours.bit_errors, ours.symbol_errors, ours.total_bits),
                (reference.bit_errors, reference.symbol_errors, reference.total_bits),
            )

    def test_batch_detector_failure_names_the_cell(self):
        def broken(H, y, constellation):
            raise np.linalg.LinAlgError("stack failed")

        cfg = self.sweep(detectors=("broken",), snr_list_db=(10.0,))
        with self.assertRaises(SweepError) as raised:
            run_sweep(cfg, extra_detectors={"broken": BatchDetector(broken)})
        self.assertEqual((raised.exception.detector, raised.exception.snr_db), ("broken", 10.0))
        self.assertIn("stack failed", str(raised.exception))

    def test_undecodable_params_file(self):
        path = self.path("latin1.json")
        with open(path, "wb") as handle:
            handle.write(b'{"version": 1, "note": "\xff"}')
        with self.assertRaises(DetectorResolutionError) as raised:
            run_sweep(self.sweep(detectors=(f"dpst:{path}",)))
        self.assertIn("UTF-8", str(raised.exception))


class CsvTest(TemporaryDirectoryMixin, SimpleTestCase):
    def rows(self, path):
        with open(path, newline="") as handle:
            return list(csv.reader(handle))

    def test_empty_records_write_header_only(self):
        path = self.path("empty.csv")
        emit_csv([], path)
        with open(path) as handle:
            self.assertEqual(handle.read(), ",".join(CSV_FIELDS) + "\n")
        self.assertEqual(read_csv(path), [])

    def test_record_round_trip(self):
        path = self.path("one.csv")
        original = record(bit_errors=1, total_bits=3, wall_time_ms=0.1 + 0.2)
        emit_csv([original], path)
        self.assertEqual(read_csv(path), [original])

    def test_every_row_has_nine_columns(self):
        path = self.path("many.csv")
        emit_csv([record(snr_db=s, detector=d) for d in ("zf", "ml") for s in (0.0, 5.0)], path)
        rows = self.rows(path)
        self.assertEqual(len(rows), 5)
        self.assertTrue(all(len(row) == 9 for row in rows))

    def test_reals_carry_seventeen_digits(self):
        path = self.path("digits.csv")
        emit_csv([record(bit_errors=1, total_bits=3)], path)
        self.assertEqual(self.rows(path)[1][5], "0.33333333333333331")

    def test_short_row_cites_its_line(self):
        path = self.path("short.csv")
        emit_csv([record(), record(snr_db=20.0)], path)
        rows = self.rows(path)
        rows[2] = rows[2][:8]
        with open(path, "w", newline="") as handle:
            csv.writer(handle, lineterminator="\n").writerows(rows)
        with self.assertRaises(CsvFormatError) as raised:
            read_csv(path)
        self.assertEqual(raised.exception.line, 3)
        self.assertIn("line 3", str(raised.exception))

    def test_wrong_header(self):
        path = self.path("header.csv")
        with open(path, "w") as handle:
            handle.write("detector,snr\n")
        with self.assertRaises(CsvFormatError) as raised:
            read_csv(path)
        self.assertEqual(raised.exception.line, 1)

    def test_inconsistent_ber(self):
        path = self.path("ber.csv")
        emit_csv([record(bit_errors=4, total_bits=800)], path)
        rows = self.rows(path)
        rows[1][5] = "0.5"
        with open(path, "w", newline="") as handle:
            csv.writer(handle, lineterminator="\n").writerows(rows)
        with self.assertRaises(CsvFormatError) as raised:
            read_csv(path)
        self.assertIn("ber", str(raised.exception))

    def test_undecodable_bytes_cite_their_line(self):
        path = self.path("binary.csv")
        with open(path, "wb") as handle:
            handle.write((",".join(CSV_FIELDS) + "\n").encode())
            handle.write(b"\xff\xfe\x00garbage\n")
        with self.assertRaises(CsvFormatError) as raised:
            read_csv(path)
        self.assertEqual(raised.exception.line, 2)
        self.assertIn("UTF-8", str(raised.exception))

    def test_nul_character_is_a_format_error(self):
        path = self.path("nul.csv")
        emit_csv([record()], path)
        with open(path, "rb") as handle:
            data = handle.read()
        with open(path, "wb") as handle:
            handle.write(data.replace(b"\nzf,", b"\nz\x00f,"))
        with self.assertRaises(CsvFormatError) as raised:
            read_csv(path)
        self.assertEqual(raised.exception.line, 2)


class ReportTest(SimpleTestCase):
    def test_no_records(self):
        self.assertEqual(report([]), "no records")

    def test_detectors_by_snr(self):
        records = [record(detector=d, snr_db=s) for d in ("zf", "ml") for s in (0.0, 10.0, 20.0)]
        lines = report(records).splitlines()
        self.assertEqual(len(lines), 3)
        self.assertTrue(lines[0].startswith("detector"))
        self.assertIn("ms/frame", lines[0])
        for line, detector in zip(lines[1:], ("zf", "ml")):
            cells = line.split()
            self.assertEqual(cells[0], detector)
            self.assertEqual(len(cells[1:]), 4)

    def test_zero_ber_uses_floor_marker(self):
        table = report([record(bit_errors=0), record(snr_db=20.0, bit_errors=8)])
        self.assertIn("<1e-7", table)
        self.assertIn("1.000e-02", table)

    def test_time_per_frame(self):
        table = report([record(wall_time_ms=30.0, frames=100), record(snr_db=20.0, wall_time_ms=10.0, frames=100)])
        self.assertTrue(table.splitlines()[1].endswith("0.2000"))

    def test_deterministic(self):
        records = [record(detector=d, snr_db=s) for d in ("mmse", "zf") for s in (5.0, 0.0)]
        self.assertEqual(report(records), report(list(records)))


class PlotTest(TemporaryDirectoryMixin, SimpleTestCase):
    def render(self, records, kind):
        path = self.path("chart.svg")
        emit_plot(records, kind, path)
        with open(path) as handle:
            return handle.read()

    def polylines(self, svg):
        return re.findall(r'<polyline[^>]*points="([^"]*)"', svg)

    def test_single_detector_single_polyline(self):
        svg = self.render([record(snr_db=0.0), record(snr_db=10.0)], PlotKind.BER)
        self.assertTrue(svg.startswith("<?xml"))
        self.assertEqual(svg.count("<polyline"), 1)

    def test_decreasing_ber_moves_down_the_canvas(self):
        records = [
            record(snr_db=s, bit_errors=e, total_bits=1000)
            for s, e in ((0.0, 100), (10.0, 10), (20.0, 1))
        ]
        (points,) = self.polylines(self.render(records, "ber"))
        ys = [float(pair.split(",")[1]) for pair in points.split()]
        xs = [float(pair.split(",")[0]) for pair in points.split()]
        self.assertEqual(xs, sorted(xs))
        self.assertTrue(all(a < b for a, b in zip(ys, ys[1:])))

    def test_time_legend_per_detector(self):
        records = [record(detector=d, snr_db=s) for d in ("zf", "mmse", "ml") for s in (0.0, 5.0)]
        svg = self.render(records, PlotKind.TIME)
        self.assertEqual(svg.count('class="legend-entry"'), 3)
        self.assertEqual(svg.count("<polyline"), 3)

    def test_zero_ber_is_marked(self):
        svg = self.render([record(bit_errors=0), record(snr_db=0.0, bit_errors=50)], PlotKind.BER)
        self.assertEqual(svg.count('class="floor-marker"'), 1)

    def test_no_records(self):
        with self.assertRaises(ValueError):
            emit_plot([], PlotKind.BER, self.path("empty.svg"))


class CommandTest(TemporaryDirectoryMixin, SimpleTestCase):
    def call(self, name, **options):
        stdout = StringIO()
        call_command(name, verbosity=0, stdout=stdout, **options)
        return stdout.getvalue()

    def test_default_sweep_covers_the_grid(self):
        out = self.path("grid.csv")
        self.call("sweep", out=out, frames=2, workers=2)
        records = read_csv(out)
        self.assertEqual(len(records), 30)
        self.assertEqual(list(dict.fromkeys(r.detector for r in records)), list(ALL_DETECTORS))

    def test_small_ml_sweep(self):
        out = self.path("ml.csv")
        output = self.call("sweep", out=out, detectors=["ml"], frames=10)
        self.assertIn("wrote 6 records", output)

    def test_missing_params_file_is_a_runtime_error(self):
        with self.assertRaises(CommandError) as raised:
            self.call("sweep", out=self.path("x.csv"), detectors=["dpst:missing.json"], frames=1)
        self.assertEqual(raised.exception.returncode, 2)
        self.assertIn("missing.json", str(raised.exception))

    def test_unknown_detector_is_a_usage_error(self):
        with self.assertRaises(CommandError) as raised:
            self.call("sweep", out=self.path("x.csv"), detectors=["zf", "qr"], frames=1)
        self.assertEqual(raised.exception.returncode, 1)
        self.assertIn("--detectors", str(raised.exception))

    def test_sweep_without_timing_is_byte_identical(self):
        first, second = self.path("a.csv"), self.path("b.csv")
        options = dict(detectors=["zf", "mmse"], snr=[0.0, 10.0], frames=5, seed=9, timing=False)
        self.call("sweep", out=first, workers=1, **options)
        self.call("sweep", out=second, workers=3, **options)
        with open(first, "rb") as a, open(second, "rb") as b:
            self.assertEqual(a.read(), b.read())

    def test_sweep_writes_plots(self):
        ber_svg, time_svg = self.path("ber.svg"), self.path("time.svg")
        self.call(
            "sweep",
            out=self.path("s.csv"),
            detectors=["zf", "mmse"],
            snr=[0.0, 10.0],
            frames=3,
            plot_ber=ber_svg,
            plot_time=time_svg,
        )
        for path in (ber_svg, time_svg):
            with open(path) as handle:
                self.assertEqual(handle.read().count("<polyline"), 2)

    def test_report_of_header_only_csv(self):
        path = self.path("empty.csv")
        emit_csv([], path)
        self.assertEqual(self.call("report", source=path).strip(), "no records")

    def test_sweep_then_report(self):
        path = self.path("s.csv")
        self.call("sweep", out=path, detectors=["zf", "ml"], snr=[0.0, 5.0, 10.0], frames=4)
        lines = self.call("report", source=path).strip().splitlines()
        self.assertEqual(len(lines), 3)
        self.assertTrue(lines[2].startswith("ml"))

    def test_report_cites_bad_row(self):
        path = self.path("bad.csv")
        with open(path, "w") as handle:
            handle.write(",".join(CSV_FIELDS) + "\n")
            handle.write("zf,0,1,0,8,0,0,0\n")
        with self.assertRaises(CommandError) as raised:
            self.call("report", source=path)
        self.assertEqual(raised.exception.returncode, 2)
        self.assertIn("line 2", str(raised.exception))

    def test_report_of_binary_file_is_a_runtime_error(self):
        path = self.path("binary.csv")
        with open(path, "wb") as handle:
            handle.write(b"\xff" * 32)
        with self.assertRaises(CommandError) as raised:
            self.call("report", source=path)
        self.assertEqual(raised.exception.returncode, 2)
        self.assertIn("line 1", str(raised.exception))

    def test_undecodable_params_file_is_a_runtime_error(self):
        path = self.path("binary.json")
        with open(path, "wb") as handle:
            handle.write(b"\xff\xfe")
        with self.assertRaises(CommandError) as raised:
            self.call("sweep", out=self.path("x.csv"), detectors=[f"dpst:{path}"], frames=1)
        self.assertEqual(raised.exception.returncode, 2)

    def test_report_of_missing_file(self):
        with self.assertRaises(CommandError) as raised:
            self.call("report", source=self.path("nope.csv"))
        self.assertEqual(raised.exception.returncode, 2)

    def test_plot_command(self):
        source, out = self.path("s.csv"), self.path("t.svg")
        emit_csv([record(detector=d, snr_db=s) for d in ("zf", "ml") for s in (0.0, 5.0)], source)
        self.call("plot", source=source, kind="time", out=out)
        with open(out) as handle:
            self.assertEqual(handle.read().count('class="legend-entry"'), 2)

    def test_plot_of_header_only_csv(self):
        source = self.path("empty.csv")
        emit_csv([], source)
        with self.assertRaises(CommandError) as raised:
            self.call("plot", source=source, out=self.path("t.svg"))
        self.assertEqual(raised.exception.returncode, 2)

    def test_sweep_help_lists_defaults(self):
        from bench.management.commands.sweep import Command

        help_text = Command().create_parser("manage.py", "sweep").format_help()
        for flag in ("--detectors", "--snr", "--frames", "--seed", "--out", "--plot-ber", "--plot-time"):
            self.assertIn(flag, help_text)
        self.assertIn("10000", help_text)
        self.assertIn("mmse-sic", help_text)


@tag("slow")
class AcceptanceTest(TemporaryDirectoryMixin, SimpleTestCase):
    def ber(self, records):
        return {r.detector: r.ber for r in records}

    def test_detector_ordering_at_10_db(self):
        cfg = SweepConfig(
            system=SYSTEM,
            snr_list_db=(10.0,),
            detectors=("ml", "mmse-sic", "mmse", "zf"),
            frames=10_000,
            workers=4,
        )
        ber = self.ber(run_sweep(cfg))
        self.assertLessEqual(ber["ml"], ber["mmse-sic"])
        self.assertLessEqual(ber["mmse-sic"], ber["mmse"])
        self.assertLessEqual(ber["mmse"], ber["zf"])

    def test_ber_falls_with_snr(self):
        cfg = SweepConfig(
            system=SYSTEM,
            snr_list_db=(0.0, 25.0),
            detectors=("zf", "mmse", "zf-sic", "mmse-sic", "ml"),
            frames=10_000,
            workers=4,
        )
        records = run_sweep(cfg)
        for low, high in zip(records[::2], records[1::2]):
            self.assertLess(high.ber, low.ber)

    def test_ml_beats_zf_at_25_db(self):
        cfg = SweepConfig(system=SYSTEM, snr_list_db=(25.0,), detectors=("ml", "zf"), frames=10_000)
        ber = self.ber(run_sweep(cfg))
        self.assertLessEqual(ber["ml"], ber["zf"])

    def test_detection_time_ordering(self):
        path = self.path("t20.json")
        save_params(init_params(20, 0.5, 4, 8, 4), path)
        dpst = f"dpst:{path}"
        cfg = SweepConfig(system=SYSTEM, snr_list_db=(10.0,), detectors=("ml", dpst, "mmse"), frames=1000)
        time = {r.detector: r.wall_time_ms for r in run_sweep(cfg)}
        self.assertGreaterEqual(time["ml"], 5 * time[dpst])
        self.assertLessEqual(time[dpst], 50 * time["mmse"])

    def test_trained_dpst_against_linear_and_ml(self):
        path = self.path("t100.json")
        trainer = DpstTrainer(TrainConfig(layers=100, workers=4), SYSTEM, make_constellation(4), Rng(0))
        save_params(trainer.run(), path)
        dpst = f"dpst:{path}"

        cfg = SweepConfig(
            system=SYSTEM, snr_list_db=(15.0, 20.0, 25.0), detectors=(dpst, "mmse"), frames=10_000, workers=4
        )
        records = run_sweep(cfg)
        for ours, mmse in zip(records[:3], records[3:]):
            self.assertLessEqual(ours.ber, mmse.ber)

        cfg = SweepConfig(system=SYSTEM, snr_list_db=(20.0,), detectors=(dpst, "ml"), frames=100_000, workers=4)
        ber = self.ber(run_sweep(cfg))
        self.assertLessEqual(ber[dpst], 10 * ber["ml"])
