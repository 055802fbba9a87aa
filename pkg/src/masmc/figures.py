"""Closed-form adversary probabilities and the figure data series.

``emit_series("FIG2", ...)`` sweeps the fragment count ``r`` (the curve
captioned as packet loss, although the surrounding analysis calls the same
quantity the probability of hacking a party's data); ``"FIG3"`` sweeps the
decision-maker count ``m``. Both pair the closed form with a Monte Carlo
estimate from :mod:`masmc.threat_lab`.

CSV layout: UTF-8, LF line endings, header ``x,p_closed,p_mc,stderr``,
probabilities printed with 17 significant digits so that parsing the text
back yields the exact same floats.
"""

from __future__ import annotations

import csv
import io
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError
from .threat_lab import AdversaryConfig, Experiment, mc_estimate

SERIES_LABELS = {"FIG2": "p_fragment_capture", "FIG3": "p_corrupt_dm"}
CSV_HEADER = ("x", "p_closed", "p_mc", "stderr")


def _check_count(name: str, value: int) -> None:
    if int(value) != value or value < 1:
        raise DomainError(f"{name} must be an integer >= 1, got {value}")


def eq1_p_fragment(r: int) -> float:
    _check_count("r", r)
    return 1 / r


def eq2_p_dm(m: int) -> float:
    _check_count("m", m)
    return 1 / m


def eq3_p_wrong_agent(m: int, p: int) -> float:
    _check_count("m", m)
    _check_count("p", p)
    # exact rational arithmetic, rounded once: m == 1 or p == 1 gives exactly 1.0
    return float(Fraction(1, m) + Fraction(1, p) - Fraction(1, m * p))


@dataclass(frozen=True)
class SeriesPoint:
    x: int
    p_closed: float
    p_mc: float
    stderr: float

    def passes(self, z: float = 3.0) -> bool:
        return abs(self.p_mc - self.p_closed) <= z * self.stderr


@dataclass(frozen=True)
class TablePoint:
    m: int
    p: int
    p_closed: float
    p_mc: float
    stderr: float

    def passes(self, z: float = 3.0) -> bool:
        return abs(self.p_mc - self.p_closed) <= z * self.stderr


def fmt_prob(x: float) -> str:
    return format(x, "#.17g")


def emit_series(
    which: str, xs: Iterable[int], trials: int = 100_000, seed: int = 0
) -> tuple[list[SeriesPoint], str]:
    which = which.upper()
    if which not in SERIES_LABELS:
        raise DomainError(f"unknown series {which!r}; expected FIG2 or FIG3")
    xs = list(xs)
    if not xs:
        raise DomainError("empty parameter range")
    points = []
    for x in xs:
        if which == "FIG2":
            closed = eq1_p_fragment(x)
            cfg = AdversaryConfig(Experiment.FRAGMENT_CAPTURE, trials, seed, r=x)
        else:
            closed = eq2_p_dm(x)
            cfg = AdversaryConfig(Experiment.CORRUPT_DM, trials, seed, m=x)
        est = mc_estimate(cfg)
        points.append(SeriesPoint(x, closed, est.p_hat, est.stderr))
    return points, series_to_csv(points)


def eq3_table(
    ms: Sequence[int], ps: Sequence[int], trials: int = 100_000, seed: int = 0
) -> list[TablePoint]:
    if not ms or not ps:
        raise DomainError("empty parameter range")
    rows = []
    for p in ps:
        for m in ms:
            closed = eq3_p_wrong_agent(m, p)
            est = mc_estimate(AdversaryConfig(Experiment.WRONG_AGENT, trials, seed, m=m, p=p))
            rows.append(TablePoint(m, p, closed, est.p_hat, est.stderr))
    return rows


def _write(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt_prob(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def series_to_csv(points: Sequence[SeriesPoint]) -> str:
    return _write(CSV_HEADER, ((pt.x, pt.p_closed, pt.p_mc, pt.stderr) for pt in points))


def table_to_csv(rows: Sequence[TablePoint]) -> str:
    return _write(
        ("m", "p", "p_closed", "p_mc", "stderr"),
        ((t.m, t.p, t.p_closed, t.p_mc, t.stderr) for t in rows),
    )


def parse_series_csv(text: str) -> list[SeriesPoint]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if tuple(header or ()) != CSV_HEADER:
        raise DomainError(f"unexpected CSV header {header!r}")
    return [SeriesPoint(int(x), float(a), float(b), float(c)) for x, a, b, c in reader]
