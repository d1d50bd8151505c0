"""Human-readable text view of a report bundle.

Built only from the machine-readable files in the bundle directory, so it
can be re-rendered at any time (``lingshift report``).
"""

from __future__ import annotations

import csv
from pathlib import Path


def _rows(path: Path) -> list[dict[str, str]]:
    if not path.exists():
        return []
    with path.open(newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def format_table(header: list[str], rows: list[list[str]]) -> str:
    widths = [max(len(str(x)) for x in col) for col in zip(header, *rows)] if rows else [len(h) for h in header]
    line = "+" + "+".join("-" * (w + 2) for w in widths) + "+"
    out = [line, "| " + " | ".join(h.ljust(w) for h, w in zip(header, widths)) + " |", line]
    for r in rows:
        out.append("| " + " | ".join(str(x).ljust(w) for x, w in zip(r, widths)) + " |")
    out.append(line)
    return "\n".join(out)


def _pct(value: str) -> str:
    return f"{100 * float(value):.2f}%"


def _p(value: str) -> str:
    return f"{float(value):.3g}"


def render_bundle(out: str | Path) -> str:
    out = Path(out)
    parts: list[str] = []

    hhi = {r["country"]: r["value"] for r in _rows(out / "hhi_choropleth.csv")}
    tops: dict[str, list[str]] = {}
    for r in _rows(out / "top_languages.csv"):
        tops.setdefault(r["country"], []).append(f"{r['language']} {_pct(r['share'])}")
    if hhi:
        rows = [[c, f"{float(hhi[c]):.3f}", *(tops.get(c, []) + [""] * 5)[:5]] for c in sorted(hhi)]
        parts.append("Language distributions (pooled over the full period)\n"
                     + format_table(["country", "HHI", "L1", "L2", "L3", "L4", "L5"], rows))

    stab = [r for r in _rows(out / "stability.csv") if r["level"] == "region"]
    if stab:
        parts.append("Regional volume-share stability (first vs second half)\n" + format_table(
            ["region", "p", "class"], [[r["unit"], _p(r["p"]), r["class"]] for r in stab]))

    shift = _rows(out / "shift.csv")
    if shift:
        n_sig = sum(r["class"] != "not_significant" for r in shift)
        parts.append(f"Treatment vs baseline HHI ({n_sig} of {len(shift)} countries significant)\n"
                     + format_table(
                         ["country", "p", "class", "direction", "HHI baseline", "HHI treatment"],
                         [[r["country"], _p(r["p"]), r["class"], r["direction"],
                           f"{float(r['hhi_baseline']):.3f}", f"{float(r['hhi_treatment']):.3f}"]
                          for r in shift]))

    attribution = _rows(out / "attribution.csv")
    if attribution:
        parts.append("Per-language shares in significant countries\n" + format_table(
            ["country", "language", "normal", "covid", "p"],
            [[r["country"], r["language"], _pct(r["normal_share"]), _pct(r["covid_share"]), _p(r["p"])]
             for r in attribution]))

    did = _rows(out / "did.csv")
    if did:
        summary = (out / "did_summary.txt").read_text(encoding="utf-8").strip() \
            if (out / "did_summary.txt").exists() else ""
        parts.append("Difference-in-differences\n" + format_table(
            ["country", "p baseline", "p covid", "class"],
            [[r["country"], _p(r["p_baseline"]), _p(r["p_covid"]), r["class"]] for r in did])
            + f"\n{summary}")

    if (out / "bias.txt").exists():
        parts.append("Volume vs demographics\n" + (out / "bias.txt").read_text(encoding="utf-8").rstrip())

    failures = _rows(out / "failures.csv")
    if failures:
        parts.append(f"{len(failures)} per-country steps skipped; see failures.csv")

    return "\n\n".join(parts) + "\n"
