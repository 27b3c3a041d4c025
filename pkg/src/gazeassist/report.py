"""Aggregate trial batches into the standard report layout.

Per (task, assistance) condition: Laplace success rate with its
adjusted-Wald interval, geometric-mean completion time of successful
trials with its interval, and the arithmetic-mean attempt count with its
interval. Emitted as JSON for machines and a Markdown table for humans.
"""

from __future__ import annotations

import json
from typing import Iterable

from . import stats
from .sim import TrialRecord

REPORT_SCHEMA = "report/1"


def condition_label(config: dict) -> str:
    mode = config["mode"]
    suffix = "+intent" if mode["intent_adjusted"] else ""
    return f"{config['task']}/{mode['kind']}{suffix}"


def summarize_records(records: Iterable[TrialRecord], level: float = 0.95) -> dict:
    """Group records by condition and compute the three criteria."""
    records = list(records)
    if not records:
        raise ValueError("no trials to report")
    groups: dict[str, list[TrialRecord]] = {}
    for rec in records:
        groups.setdefault(condition_label(rec.config), []).append(rec)
    conditions = []
    for label in sorted(groups):
        recs = groups[label]
        n = len(recs)
        successes = sum(1 for r in recs if r.outcome == "success")
        prop = stats.proportion_estimate(successes, n, level)
        entry: dict = {
            "condition": label,
            "trials": n,
            "successes": successes,
            "success_rate": {
                "point": prop.point,
                "ci_low": prop.ci_low,
                "ci_high": prop.ci_high,
            },
        }
        times = [r.completion_time for r in recs if r.outcome == "success"]
        if len(times) >= 2:
            ts = stats.geo_mean_ci(times, level)
            entry["completion_time"] = {
                "geo_mean": ts.geo_mean,
                "ci_low": ts.ci_low,
                "ci_high": ts.ci_high,
            }
        elif times:
            entry["completion_time"] = {
                "geo_mean": times[0],
                "ci_low": None,
                "ci_high": None,
                "warning": "single successful trial, no interval",
            }
        attempts = [float(r.attempts) for r in recs]
        if len(attempts) >= 2:
            ms = stats.mean_ci(attempts, level)
            entry["attempts"] = {"mean": ms.mean, "ci_low": ms.ci_low, "ci_high": ms.ci_high}
        else:
            entry["attempts"] = {
                "mean": attempts[0],
                "ci_low": None,
                "ci_high": None,
                "warning": "single trial, no interval",
            }
        conditions.append(entry)
    return {"schema": REPORT_SCHEMA, "level": level, "conditions": conditions}


def _fmt(value, digits=3) -> str:
    if value is None:
        return "-"
    return f"{value:.{digits}f}"


def report_to_markdown(report: dict) -> str:
    lines = [
        "| condition | n | success (Laplace) | success 95% CI | time geo-mean [s] | time 95% CI | attempts | attempts 95% CI |",
        "|---|---|---|---|---|---|---|---|",
    ]
    for cond in report["conditions"]:
        sr = cond["success_rate"]
        tm = cond.get("completion_time")
        at = cond["attempts"]
        lines.append(
            "| {cond} | {n} | {pt} | [{lo}, {hi}] | {gm} | [{tlo}, {thi}] | {am} | [{alo}, {ahi}] |".format(
                cond=cond["condition"],
                n=cond["trials"],
                pt=_fmt(sr["point"]),
                lo=_fmt(sr["ci_low"]),
                hi=_fmt(sr["ci_high"]),
                gm=_fmt(tm["geo_mean"]) if tm else "-",
                tlo=_fmt(tm["ci_low"]) if tm else "-",
                thi=_fmt(tm["ci_high"]) if tm else "-",
                am=_fmt(at["mean"], 2),
                alo=_fmt(at["ci_low"], 2),
                ahi=_fmt(at["ci_high"], 2),
            )
        )
    return "\n".join(lines) + "\n"


def failure_table_to_markdown(table: stats.FailureTable) -> str:
    tasks = sorted(table.column_means)
    header = "| set | " + " | ".join(f"{t} failure %" for t in tasks) + " |"
    lines = [header, "|---|" + "---|" * len(tasks)]
    for set_id in sorted(table.rates):
        cells = " | ".join(_fmt(table.rates[set_id].get(t), 1) for t in tasks)
        lines.append(f"| {set_id} | {cells} |")
    lines.append(
        "| mean | " + " | ".join(_fmt(table.column_means[t], 2) for t in tasks) + " |"
    )
    for t in tasks:
        sets = ", ".join(str(s) for s in table.minima[t])
        lines.append(f"\nminimum failure rate for {t}: set(s) {sets}")
    return "\n".join(lines) + "\n"


def failure_table_to_dict(table: stats.FailureTable) -> dict:
    return {
        "schema": REPORT_SCHEMA,
        "rates": {str(k): v for k, v in sorted(table.rates.items())},
        "column_means": table.column_means,
        "column_means_rounded": {t: round(v) for t, v in table.column_means.items()},
        "minima": table.minima,
    }


def write_report(report: dict, json_path, md_path) -> None:
    with open(json_path, "w") as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")
    with open(md_path, "w") as fh:
        fh.write(report_to_markdown(report))
