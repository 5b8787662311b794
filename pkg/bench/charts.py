"""Standalone SVG line charts of sweep records."""
import logging
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import List, Sequence, Tuple

from django.template.loader import render_to_string

from .records import BerRecord

logger = logging.getLogger(__name__)

BER_FLOOR = 1e-7
PALETTE = (
    "#1f77b4",
    "#d62728",
    "#2ca02c",
    "#ff7f0e",
    "#9467bd",
    "#8c564b",
    "#e377c2",
    "#17becf",
)

WIDTH, HEIGHT = 720, 440
LEFT, RIGHT, TOP, BOTTOM = 72, 190, 28, 56


class PlotKind(Enum):
    BER = "ber"
    TIME = "time"

    @classmethod
    def to_list(cls) -> list:
        return [kind.value for kind in cls]


@dataclass
class Series:
    label: str
    color: str
    points: List[Tuple[float, float]]
    floored: List[Tuple[float, float]]
    legend_y: int


@dataclass
class Tick:
    position: float
    label: str
    label_position: float


class Frame:
    """Maps data coordinates into the plot rectangle; SVG y grows downwards."""

    def __init__(self, x_range: Tuple[float, float], y_range: Tuple[float, float]):
        self.x_min, self.x_max = x_range
        self.y_min, self.y_max = y_range
        self.left, self.top = LEFT, TOP
        self.right, self.bottom = WIDTH - RIGHT, HEIGHT - BOTTOM

    def x(self, value: float) -> float:
        span = self.x_max - self.x_min
        return self.left + (value - self.x_min) / span * (self.right - self.left)

    def y(self, value: float) -> float:
        span = self.y_max - self.y_min
        return self.top + (self.y_max - value) / span * (self.bottom - self.top)


def _padded(low: float, high: float) -> Tuple[float, float]:
    if low == high:
        return low - 1, high + 1
    return low, high


def _ber_value(ber: float) -> float:
    return math.log10(max(ber, BER_FLOOR))


def _time_ticks(y_max: float) -> List[float]:
    step = y_max / 5
    return [step * index for index in range(6)]


def emit_plot(records: Sequence[BerRecord], kind, path) -> None:
    kind = PlotKind(kind)
    if not records:
        raise ValueError("no records to plot")

    if kind is PlotKind.BER:
        values = [_ber_value(record.ber) for record in records]
        y_range = (math.floor(min(values)), math.ceil(max(values)))
        if y_range[0] == y_range[1]:
            y_range = (y_range[0] - 1, y_range[1])
    else:
        values = [record.wall_time_ms for record in records]
        y_range = (0.0, max(values) * 1.1 or 1.0)
    snrs = [record.snr_db for record in records]
    frame = Frame(_padded(min(snrs), max(snrs)), y_range)

    series = []
    detectors = list(dict.fromkeys(record.detector for record in records))
    for position, detector in enumerate(detectors):
        own = sorted(
            (
                (record.snr_db, value, record.ber == 0)
                for record, value in zip(records, values)
                if record.detector == detector
            ),
            key=lambda item: item[0],
        )
        points = [(frame.x(snr), frame.y(value)) for snr, value, _ in own]
        floored = [
            point for point, (_, _, at_floor) in zip(points, own)
            if at_floor and kind is PlotKind.BER
        ]
        series.append(
            Series(
                label=detector,
                color=PALETTE[position % len(PALETTE)],
                points=points,
                floored=floored,
                legend_y=TOP + 12 + 22 * position,
            )
        )

    if kind is PlotKind.BER:
        y_ticks = [
            Tick(frame.y(exponent), f"1e{exponent}", frame.y(exponent) + 4)
            for exponent in range(int(y_range[0]), int(y_range[1]) + 1)
        ]
    else:
        y_ticks = [
            Tick(frame.y(value), f"{value:.3g}", frame.y(value) + 4)
            for value in _time_ticks(y_range[1])
        ]
    x_ticks = [
        Tick(frame.x(snr), f"{snr:g}", frame.bottom + 18) for snr in dict.fromkeys(sorted(snrs))
    ]

    svg = render_to_string(
        "bench/chart.svg",
        {
            "width": WIDTH,
            "height": HEIGHT,
            "frame": frame,
            "series": series,
            "x_ticks": x_ticks,
            "y_ticks": y_ticks,
            "y_label": "BER" if kind is PlotKind.BER else "detection time (ms)",
            "has_floor": any(s.floored for s in series),
            "floor_label": f"BER = 0, drawn at {BER_FLOOR:g}",
            "legend_x": WIDTH - RIGHT + 16,
        },
    )
    Path(path).write_text(svg, encoding="utf-8")
    logger.debug("wrote %s chart of %d detectors to %s", kind.value, len(series), path)
