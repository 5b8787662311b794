import csv
import io
import logging
from pathlib import Path
from typing import Iterable, Iterator, List, Sequence, Tuple

from .records import CSV_FIELDS, BerRecord
from .serializers import BerRecordSerializer

logger = logging.getLogger(__name__)

BER_FLOOR_LABEL = "<1e-7"


class CsvFormatError(ValueError):
    def __init__(self, line: int, message: str, path=None):
        self.line = line
        self.path = path
        prefix = f"{path}: " if path is not None else ""
        super().__init__(f"{prefix}line {line}: {message}")


def _real(value: float) -> str:
    return "%.17g" % value


def emit_csv(records: Iterable[BerRecord], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(CSV_FIELDS)
        for record in records:
            writer.writerow(
                [
                    record.detector,
                    _real(record.snr_db),
                    record.frames,
                    record.bit_errors,
                    record.total_bits,
                    _real(record.ber),
                    record.symbol_errors,
                    _real(record.ser),
                    _real(record.wall_time_ms),
                ]
            )


def _describe(errors) -> str:
    return "; ".join(
        f"{field}: {' '.join(str(message) for message in messages)}"
        for field, messages in errors.items()
    )


def _decode(data: bytes, path) -> str:
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as error:
        line = data[: error.start].count(b"\n") + 1
        raise CsvFormatError(line, f"not UTF-8 text at byte {error.start}", path) from error


def _rows(text: str, path) -> Iterator[Tuple[int, List[str]]]:
    reader = csv.reader(io.StringIO(text, newline=""))
    while True:
        try:
            row = next(reader)
        except StopIteration:
            return
        except csv.Error as error:
            raise CsvFormatError(reader.line_num, str(error), path) from error
        yield reader.line_num, row


def read_csv(path) -> List[BerRecord]:
    rows = _rows(_decode(Path(path).read_bytes(), path), path)
    _, header = next(rows, (1, None))
    if header is None:
        raise CsvFormatError(1, "empty file, expected a header", path)
    if tuple(header) != CSV_FIELDS:
        raise CsvFormatError(1, f"expected header {','.join(CSV_FIELDS)}", path)

    records = []
    for line, row in rows:
        if len(row) != len(CSV_FIELDS):
            raise CsvFormatError(
                line, f"expected {len(CSV_FIELDS)} columns, got {len(row)}", path
            )
        serializer = BerRecordSerializer(data=dict(zip(CSV_FIELDS, row)))
        if not serializer.is_valid():
            raise CsvFormatError(line, _describe(serializer.errors), path)
        records.append(serializer.save())
    logger.debug("read %d records from %s", len(records), path)
    return records


def _ber_cell(ber: float) -> str:
    return BER_FLOOR_LABEL if ber == 0 else f"{ber:.3e}"


def _align(rows: Sequence[Sequence[str]]) -> str:
    widths = [max(len(row[column]) for row in rows) for column in range(len(rows[0]))]
    lines = []
    for row in rows:
        cells = [row[0].ljust(widths[0])]
        cells += [cell.rjust(width) for cell, width in zip(row[1:], widths[1:])]
        lines.append("  ".join(cells).rstrip())
    return "\n".join(lines)


def report(records: Sequence[BerRecord]) -> str:
    """Detectors by SNR: one BER column per SNR, then mean ms per frame."""
    if not records:
        return "no records"

    detectors = list(dict.fromkeys(record.detector for record in records))
    snrs = list(dict.fromkeys(record.snr_db for record in records))
    cells = {(record.detector, record.snr_db): record for record in records}

    rows = [["detector"] + [f"{snr:g} dB" for snr in snrs] + ["ms/frame"]]
    for detector in detectors:
        row = [detector]
        for snr in snrs:
            record = cells.get((detector, snr))
            row.append(_ber_cell(record.ber) if record else "-")
        own = [record for record in records if record.detector == detector]
        per_frame = sum(r.wall_time_ms for r in own) / sum(r.frames for r in own)
        row.append(f"{per_frame:.4f}")
        rows.append(row)
    return _align(rows)
