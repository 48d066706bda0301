"""Self-contained HTML reports.

One file, no external assets: styles are inlined and every chart is drawn
as native SVG (bars, lines, overlaid histograms), so the report can be
archived or attached to a CI run as-is.
"""

from __future__ import annotations

import html
import json
import math

from tabcheck.framework import (
    CheckStatus,
    DisplayItem,
    DisplayKind,
    SuiteResult,
    check_outcome,
)
from tabcheck.report import build_document

_STYLE = """
body { font-family: -apple-system, 'Segoe UI', Roboto, Helvetica, Arial, sans-serif;
       margin: 2em auto; max-width: 960px; color: #1c2733; padding: 0 1em; }
h1 { font-size: 1.5em; } h2 { font-size: 1.15em; margin-top: 1.8em; }
table { border-collapse: collapse; margin: 0.6em 0; font-size: 0.9em; }
th, td { border: 1px solid #cfd8dc; padding: 0.3em 0.7em; text-align: left; }
th { background: #eceff1; }
.badge { display: inline-block; padding: 0.1em 0.6em; border-radius: 0.8em;
         color: #fff; font-size: 0.8em; vertical-align: middle; }
.badge.passed { background: #2e7d32; } .badge.failed { background: #c62828; }
.badge.warned { background: #ef6c00; } .badge.skipped { background: #616161; }
.badge.errored { background: #6a1b9a; }
.cond-pass { color: #2e7d32; } .cond-fail { color: #c62828; font-weight: 600; }
.cond-warning { color: #ef6c00; }
.summary span { margin-right: 1em; }
.meta { color: #546e7a; font-size: 0.85em; }
.message { color: #546e7a; font-style: italic; }
pre.value { background: #f5f7f8; padding: 0.6em; overflow-x: auto; font-size: 0.8em; }
svg { margin: 0.4em 0; }
"""

_SERIES_COLORS = ["#1565c0", "#e65100", "#2e7d32", "#6a1b9a", "#00838f", "#c62828"]


def _esc(value) -> str:
    return html.escape(str(value), quote=True)


def _fmt_cell(value) -> str:
    if isinstance(value, bool) or value is None:
        return _esc(value)
    if isinstance(value, float):
        return _esc(f"{value:.6g}")
    return _esc(value)


def _svg_frame(width: int, height: int, body: str, title: str) -> str:
    return (
        f'<figure><figcaption>{_esc(title)}</figcaption>'
        f'<svg width="{width}" height="{height}" viewBox="0 0 {width} {height}" role="img">{body}</svg></figure>'
    )


def _axis(x0: int, y0: int, x1: int, y1: int) -> str:
    return (
        f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="#78909c"/>'
        f'<line x1="{x0}" y1="{y1}" x2="{x1}" y2="{y1}" stroke="#78909c"/>'
    )


def _y_ticks(x0: int, y_top: int, y_bottom: int, v_max: float) -> str:
    parts = []
    for frac in (0.0, 0.5, 1.0):
        y = y_bottom - frac * (y_bottom - y_top)
        parts.append(f'<line x1="{x0 - 3}" y1="{y:.1f}" x2="{x0}" y2="{y:.1f}" stroke="#78909c"/>')
        parts.append(
            f'<text x="{x0 - 6}" y="{y + 3:.1f}" font-size="9" text-anchor="end" fill="#546e7a">'
            f"{frac * v_max:.3g}</text>"
        )
    return "".join(parts)


def _legend(names, x: int, y: int) -> str:
    parts = []
    for i, name in enumerate(names):
        color = _SERIES_COLORS[i % len(_SERIES_COLORS)]
        parts.append(f'<rect x="{x + i * 110}" y="{y}" width="9" height="9" fill="{color}" fill-opacity="0.7"/>')
        parts.append(
            f'<text x="{x + i * 110 + 13}" y="{y + 8}" font-size="10" fill="#37474f">{_esc(name)}</text>'
        )
    return "".join(parts)


def _bar_chart(labels, series, title: str, overlay: bool) -> str:
    width, height = 640, 240
    left, right, top, bottom = 48, 12, 26, 56
    plot_w, plot_h = width - left - right, height - top - bottom
    v_max = max((max(s["values"]) for s in series if s["values"]), default=0.0)
    v_max = v_max if v_max > 0 else 1.0
    n = max(len(labels), 1)
    slot = plot_w / n
    body = [_axis(left, top, width - right, height - bottom), _y_ticks(left, top, height - bottom, v_max)]
    for si, s in enumerate(series):
        color = _SERIES_COLORS[si % len(_SERIES_COLORS)]
        if overlay:
            bar_w, offset = slot * 0.7, slot * 0.15
        else:
            bar_w = slot * 0.8 / len(series)
            offset = slot * 0.1 + si * bar_w
        for i, v in enumerate(s["values"]):
            h = 0.0 if v_max == 0 else (v / v_max) * plot_h
            x = left + i * slot + offset
            y = height - bottom - h
            body.append(
                f'<rect x="{x:.1f}" y="{y:.1f}" width="{bar_w:.1f}" height="{h:.1f}" '
                f'fill="{color}" fill-opacity="{0.55 if overlay else 0.85}"/>'
            )
    for i, label in enumerate(labels):
        x = left + (i + 0.5) * slot
        shown = str(label) if len(str(label)) <= 14 else str(label)[:13] + "…"
        body.append(
            f'<text x="{x:.1f}" y="{height - bottom + 12}" font-size="9" text-anchor="end" '
            f'transform="rotate(-30 {x:.1f} {height - bottom + 12})" fill="#546e7a">{_esc(shown)}</text>'
        )
    body.append(_legend([s.get("name", f"series {i}") for i, s in enumerate(series)], left, 4))
    return _svg_frame(width, height, "".join(body), title)


def _line_chart(series, title: str) -> str:
    width, height = 640, 260
    left, right, top, bottom = 48, 12, 26, 34
    plot_w, plot_h = width - left - right, height - top - bottom
    xs = [x for s in series for x in s["x"]]
    ys = [y for s in series for y in s["y"]]
    if not xs:
        return _svg_frame(width, height, _axis(left, top, width - right, height - bottom), title)
    x_min, x_max = min(xs), max(xs)
    y_min, y_max = min(min(ys), 0.0), max(max(ys), 1e-12)
    x_span = (x_max - x_min) or 1.0
    y_span = (y_max - y_min) or 1.0
    body = [_axis(left, top, width - right, height - bottom), _y_ticks(left, top, height - bottom, y_max)]
    for si, s in enumerate(series):
        color = _SERIES_COLORS[si % len(_SERIES_COLORS)]
        points = " ".join(
            f"{left + (x - x_min) / x_span * plot_w:.1f},{height - bottom - (y - y_min) / y_span * plot_h:.1f}"
            for x, y in zip(s["x"], s["y"])
        )
        if points:
            body.append(f'<polyline points="{points}" fill="none" stroke="{color}" stroke-width="1.6"/>')
            for x, y in zip(s["x"], s["y"]):
                cx = left + (x - x_min) / x_span * plot_w
                cy = height - bottom - (y - y_min) / y_span * plot_h
                body.append(f'<circle cx="{cx:.1f}" cy="{cy:.1f}" r="2.4" fill="{color}"/>')
    for frac in (0.0, 0.5, 1.0):
        x = left + frac * plot_w
        body.append(
            f'<text x="{x:.1f}" y="{height - bottom + 14}" font-size="9" text-anchor="middle" fill="#546e7a">'
            f"{x_min + frac * x_span:.3g}</text>"
        )
    body.append(_legend([s.get("name", f"series {i}") for i, s in enumerate(series)], left, 4))
    return _svg_frame(width, height, "".join(body), title)


def _table_html(payload: dict) -> str:
    head = "".join(f"<th>{_esc(c)}</th>" for c in payload["columns"])
    rows = "".join(
        "<tr>" + "".join(f"<td>{_fmt_cell(c)}</td>" for c in row) + "</tr>" for row in payload["rows"]
    )
    caption = f"<caption>{_esc(payload['title'])}</caption>" if payload.get("title") else ""
    return f"<table>{caption}<thead><tr>{head}</tr></thead><tbody>{rows}</tbody></table>"


def _display_html(item: DisplayItem) -> str:
    payload = item.payload
    if item.kind is DisplayKind.TABLE:
        return _table_html(payload)
    if item.kind is DisplayKind.TEXT:
        return f"<p>{_esc(payload['text'])}</p>"
    if item.kind is DisplayKind.BAR_SERIES:
        return _bar_chart(payload["labels"], payload["series"], payload.get("title", ""), overlay=False)
    if item.kind is DisplayKind.HISTOGRAM_PAIR:
        title = payload.get("title", "")
        note = payload.get("note", "")
        full = f"{title} — {note}" if note else title
        return _bar_chart(payload["labels"], payload["series"], full, overlay=True)
    if item.kind is DisplayKind.LINE_SERIES:
        return _line_chart(payload["series"], payload.get("title", ""))
    return ""


def _sanitize_for_json(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _sanitize_for_json(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize_for_json(v) for v in obj]
    return obj


def render_html(result: SuiteResult) -> bytes:
    doc = build_document(result)
    parts = [
        "<!DOCTYPE html>",
        '<html lang="en"><head><meta charset="utf-8">',
        f"<title>{_esc(result.suite_name)} report</title>",
        f"<style>{_STYLE}</style></head><body>",
        f"<h1>Suite report: {_esc(result.suite_name)}</h1>",
        '<p class="meta">',
        f"engine {_esc(doc['engine_version'])} · seed {result.meta.seed} · ",
        f"started {_esc(result.meta.started_at)} · finished {_esc(result.meta.finished_at)}</p>",
    ]
    for split, meta in doc["meta"]["datasets"].items():
        note = f" · {meta['sampling_note']}" if meta.get("sampling_note") else ""
        parts.append(
            f'<p class="meta">{_esc(split)}: {_esc(meta["source"])} · {meta["rows"]} rows · '
            f"task {_esc(meta['task'])} · sha256 {_esc(meta['digest'])}{note}</p>"
        )
    summary = doc["summary"]
    parts.append('<p class="summary">')
    for key in ("passed", "failed", "warned", "skipped", "errored"):
        parts.append(f'<span><span class="badge {key}">{key}</span> {summary[key]}</span>')
    parts.append("</p>")

    for entry, record in zip(result.entries, doc["checks"]):
        outcome = check_outcome(entry.result, entry.condition_results)
        parts.append(f'<h2>{_esc(record["check_id"])} <span class="badge {outcome}">{outcome}</span>'
                     f' <small class="meta">({_esc(record["category"])})</small></h2>')
        if record["message"]:
            parts.append(f'<p class="message">{_esc(record["message"])}</p>')
        if record["conditions"]:
            rows = "".join(
                f'<tr><td>{_esc(c["name"])}</td>'
                f'<td class="cond-{c["status"]}">{_esc(c["status"])}</td>'
                f'<td>{_esc(c["details"])}</td></tr>'
                for c in record["conditions"]
            )
            parts.append(
                "<table><thead><tr><th>condition</th><th>status</th><th>details</th></tr></thead>"
                f"<tbody>{rows}</tbody></table>"
            )
        if entry.result.status is CheckStatus.RAN and record["value"] is not None:
            rendered = json.dumps(_sanitize_for_json(record["value"]), indent=2, ensure_ascii=False)
            if len(rendered) > 4000:
                rendered = rendered[:4000] + "\n..."
            parts.append(f'<pre class="value">{_esc(rendered)}</pre>')
        for item in entry.result.displays:
            parts.append(_display_html(item))
    parts.append("</body></html>")
    return "".join(parts).encode("utf-8")
