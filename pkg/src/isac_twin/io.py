"""CSV/JSON writers and readers for episode logs and sweep tables.

Floats are written with repr (shortest round-trip form), so reading a file
back reproduces the in-memory values bit for bit.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import fields
from pathlib import Path
from typing import Union

import numpy as np

from .sim import EpisodeLog, ExperimentResult, QiRecord, TradeoffRow

PathLike = Union[str, Path]

EPISODE_COLUMNS = ("episode", "mode", "seed") + tuple(
    f.name for f in fields(QiRecord))


def _format(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return "nan" if math.isnan(value) else repr(value)
    return str(value)


def write_episodes_csv(path: PathLike, logs: list[EpisodeLog]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(EPISODE_COLUMNS)
        for episode, log in enumerate(logs):
            for rec in log.records:
                row = [episode, log.mode, log.seed]
                row += [getattr(rec, f.name) for f in fields(QiRecord)]
                writer.writerow(_format(v) for v in row)


def read_episodes_csv(path: PathLike) -> list[EpisodeLog]:
    """Rebuild episode logs (records only; hashes are not stored in the CSV)."""
    field_types = {f.name: f.type for f in fields(QiRecord)}
    logs: dict[int, EpisodeLog] = {}
    with open(path, "r", newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != EPISODE_COLUMNS:
            raise ValueError("unexpected episode CSV header")
        for row in reader:
            episode = int(row[0])
            mode, seed = row[1], int(row[2])
            kwargs = {}
            for name, text in zip(EPISODE_COLUMNS[3:], row[3:]):
                t = field_types[name]
                if t in ("bool", bool):
                    kwargs[name] = text == "1"
                elif t in ("int", int):
                    kwargs[name] = int(text)
                elif t in ("float", float):
                    kwargs[name] = float(text)
                else:
                    kwargs[name] = text
            if episode not in logs:
                logs[episode] = EpisodeLog("", mode, seed, False, 0, [])
            logs[episode].records.append(QiRecord(**kwargs))
    out = []
    for episode in sorted(logs):
        log = logs[episode]
        last = log.records[-1]
        log.success = last.goal
        log.qis_to_goal = last.t + 1 if last.goal else len(log.records)
        out.append(log)
    return out


def write_tradeoff_csv(path: PathLike, rows: list[TradeoffRow]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(("range_m", "n_s", "n_c", "certainty_db", "rate"))
        for row in rows:
            writer.writerow((_format(row.range_m), row.n_s, row.n_c,
                             _format(row.certainty_db), _format(row.rate)))


def read_tradeoff_csv(path: PathLike) -> list[TradeoffRow]:
    rows = []
    with open(path, "r", newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        next(reader)
        for r in reader:
            rows.append(TradeoffRow(float(r[0]), int(r[1]), int(r[2]),
                                    float(r[3]), float(r[4])))
    return rows


def write_cdf_csv(path: PathLike, result: ExperimentResult, which: str) -> None:
    """One CDF table over all modes; ``which`` is "rate" or "qi"."""
    if which not in ("rate", "qi"):
        raise ValueError("which must be 'rate' or 'qi'")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(("mode", "value", "cdf"))
        for mode in result.episodes_per_mode:
            x, f = (result.rate_cdf(mode) if which == "rate"
                    else result.qi_cdf(mode))
            for value, frac in zip(x, f):
                writer.writerow((mode, _format(float(value)),
                                 _format(float(frac))))


def write_summary_json(path: PathLike, summary: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_summary_json(path: PathLike) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)
