"""Artifact input/output: trajectory stores, summaries, reports.

Trajectory stores travel as long-format CSV ``paper_id,eta,seed,t,k,K``
with one row per (paper, year).  Every artifact written here embeds the
fully-resolved configuration and master seed as '#'-prefixed provenance
lines (CSV) or a ``config`` object (JSON), so any output can be reproduced
from itself.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .simulate import EnsembleResult, EnsembleSummary, summarize


class IngestError(ValueError):
    """Malformed or inconsistent trajectory data; message carries file/line."""


def provenance_lines(config: dict) -> list[str]:
    return [f"# {key}={config[key]}" for key in sorted(config)]


def read_provenance(path: str | Path) -> dict:
    """Parse '#'-prefixed key=value lines from the head of an artifact."""
    out = {}
    with open(path) as fh:
        for line in fh:
            if not line.startswith("#"):
                break
            body = line[1:].strip()
            if "=" in body:
                key, _, val = body.partition("=")
                out[key.strip()] = val.strip()
    return out


def write_trajectories(result: EnsembleResult, path: str | Path,
                       config: dict | None = None) -> None:
    with open(path, "w", newline="") as fh:
        for line in provenance_lines(config or {}):
            fh.write(line + "\n")
        writer = csv.writer(fh)
        writer.writerow(["paper_id", "eta", "seed", "t", "k", "K"])
        K = result.K
        for i in range(result.n_papers):
            eta = repr(float(result.etas[i]))
            seed = int(result.seeds[i])
            for t in range(1, result.horizon + 1):
                writer.writerow([i, eta, seed, t, int(result.k[i, t - 1]), int(K[i, t - 1])])


def ingest_trajectories(path: str | Path) -> EnsembleResult:
    """Stream-parse and validate a long-format trajectory CSV.

    Rejected with file/line context: duplicate (paper_id, t), negative
    counts, and K inconsistent with the running sum of k.  Rows may arrive
    in any order; papers are normalized to contiguous year-sorted blocks.
    """
    path = Path(path)
    papers: dict[int, dict] = {}
    with open(path) as fh:
        lineno = 0
        reader = csv.reader(fh)
        header = None
        for row in reader:
            lineno += 1
            if row and row[0].startswith("#"):
                continue
            header = row
            break
        if header is None or [h.strip() for h in header] != ["paper_id", "eta", "seed", "t", "k", "K"]:
            raise IngestError(f"{path}:{lineno}: expected header "
                              f"'paper_id,eta,seed,t,k,K', got {header}")
        for row in reader:
            lineno += 1
            if not row or row[0].startswith("#"):
                continue
            if len(row) != 6:
                raise IngestError(f"{path}:{lineno}: expected 6 columns, got {len(row)}")
            try:
                pid = int(row[0])
                eta = float(row[1])
                seed = int(row[2]) if row[2].strip() else 0
                t = int(row[3])
                kv = int(row[4])
                Kv = int(row[5])
            except ValueError as exc:
                raise IngestError(f"{path}:{lineno}: malformed row {row!r}") from exc
            if t < 1:
                raise IngestError(f"{path}:{lineno}: year must be >= 1, got {t}")
            if kv < 0:
                raise IngestError(f"{path}:{lineno}: negative count for paper {pid} at t={t}")
            rec = papers.setdefault(pid, {"eta": eta, "seed": seed, "rows": {}})
            if t in rec["rows"]:
                raise IngestError(f"{path}:{lineno}: duplicate (paper_id={pid}, t={t})")
            rec["rows"][t] = (kv, Kv, lineno)

    if not papers:
        raise IngestError(f"{path}: no trajectory rows found")
    horizons = {max(rec["rows"]) for rec in papers.values()}
    if len(horizons) != 1:
        raise IngestError(f"{path}: papers disagree on horizon ({sorted(horizons)})")
    horizon = horizons.pop()

    pids = sorted(papers)
    n = len(pids)
    k = np.zeros((n, horizon), dtype=np.int64)
    etas = np.zeros(n)
    seeds = np.zeros(n, dtype=np.int64)
    for i, pid in enumerate(pids):
        rec = papers[pid]
        if sorted(rec["rows"]) != list(range(1, horizon + 1)):
            raise IngestError(f"{path}: paper {pid} does not cover years 1..{horizon}")
        running = 0
        for t in range(1, horizon + 1):
            kv, Kv, lineno = rec["rows"][t]
            running += kv
            if Kv != running:
                raise IngestError(f"{path}:{lineno}: paper {pid} has K={Kv} at t={t}, "
                                  f"but running sum of k is {running}")
            k[i, t - 1] = kv
        etas[i] = rec["eta"]
        seeds[i] = rec["seed"]

    summary = summarize(k, [horizon], master_seed=0, params_dict={})
    return EnsembleResult(etas=etas, seeds=seeds, k=k, summary=summary)


def write_summary(summary: EnsembleSummary, path: str | Path,
                  config: dict | None = None) -> None:
    """Summary JSON: snapshot histograms, uncited series, mean rates,
    resolved parameters.  UTF-8, stable key order."""
    payload = {
        "config": {k: config[k] for k in sorted(config)} if config else {},
        "master_seed": summary.master_seed,
        "n_papers": summary.n_papers,
        "params": summary.params,
        "snapshot_years": summary.snapshot_years,
        "histograms": {str(y): summary.histograms[y].tolist() for y in summary.snapshot_years},
        "uncited_fraction": summary.uncited_fraction.tolist(),
        "mean_rate": summary.mean_rate.tolist(),
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_metric_csvs(result: EnsembleResult, out_dir: str | Path,
                      config: dict | None = None) -> None:
    """One CSV per metric family: binned next-year rates (with Fano),
    per-bin autocorrelation, uncited-fraction series, and the cumulative
    citation distribution at the final year."""
    from . import metrics

    out_dir = Path(out_dir)
    prov = provenance_lines(config or {})

    def open_csv(name, header):
        fh = open(out_dir / name, "w", newline="")
        for line in prov:
            fh.write(line + "\n")
        writer = csv.writer(fh)
        writer.writerow(header)
        return fh, writer

    stats = metrics.binned_rate_stats(result)
    fano = stats.fano()
    fh, writer = open_csv("binned_rates.csv",
                          ["t", "k_mean", "mean", "var", "population", "fano"])
    with fh:
        for i in range(len(stats.mean)):
            writer.writerow([int(stats.year[i]), repr(float(stats.k_mean[i])),
                             repr(float(stats.mean[i])), repr(float(stats.var[i])),
                             int(stats.population[i]),
                             "" if np.isnan(fano[i]) else repr(float(fano[i]))])

    fh, writer = open_csv("autocorrelation.csv", ["t", "k_mean", "c"])
    with fh:
        for t in range(2, result.horizon + 1):
            k_means, cs = metrics.pearson_autocorrelation(result, t)
            for km, c in zip(k_means, cs):
                writer.writerow([t, repr(float(km)), repr(float(c))])

    fh, writer = open_csv("uncited.csv", ["t", "fraction"])
    with fh:
        for t, frac in enumerate(metrics.uncited_fraction(result), start=1):
            writer.writerow([t, repr(float(frac))])

    hist = metrics.citation_distribution(result, result.horizon)
    fh, writer = open_csv("citation_distribution.csv", ["k", "n_papers_with_K_ge_k"])
    with fh:
        for kk, count in enumerate(hist):
            writer.writerow([kk, int(count)])


def write_report(report: dict, path: str | Path, config: dict | None = None) -> None:
    payload = dict(report)
    if config:
        payload["config"] = {k: config[k] for k in sorted(config)}
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=_json_fallback)
        fh.write("\n")


def _json_fallback(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj)}")
