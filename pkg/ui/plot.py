"""Plot artifacts: a tidy coordinates CSV and a single SVG scatter.

Tidy CSV columns: node_id, node_type, group, dim_1..dim_K.
Legislators are drawn as filled circles colored by group, bills as small grey
crosses. Output is plain text and byte-stable for a given input.
"""
from pathlib import Path
from typing import Dict, List, Optional
from xml.sax.saxutils import escape
import pandas as pd
from core.errors import ContractViolation
from core.schema import VoteMatrix

PALETTE = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
    "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f",
]
SIZE = 480
MARGIN = 40

def tidy_table(aligned: pd.DataFrame, data: Optional[VoteMatrix] = None, label_key: Optional[str] = None) -> pd.DataFrame:
    """Aligned coordinates with a group column (legislator label, 'bill' for bills)."""
    dims = [c for c in aligned.columns if c.startswith("dim_")]
    if not dims:
        raise ContractViolation("aligned table has no dim_ columns")
    table = aligned[["node_id", "node_type"] + dims].copy()
    group = ["bill" if t == "bill" else "all" for t in table["node_type"]]
    if label_key:
        if data is None or not data.labels or label_key not in data.labels:
            raise ContractViolation(f"no '{label_key}' labels to color by")
        by_id = dict(zip(data.legislator_ids, data.labels[label_key]))
        group = [
            "bill" if t == "bill" else str(by_id.get(i, "unlabelled"))
            for i, t in zip(table["node_id"], table["node_type"])
        ]
    table.insert(2, "group", group)
    return table

def _scale(values: pd.Series):
    lo, hi = float(values.min()), float(values.max())
    span = hi - lo if hi > lo else 1.0
    return lambda v: MARGIN + (v - lo) / span * (SIZE - 2 * MARGIN)

def scatter_svg(table: pd.DataFrame, x: str = "dim_1", y: str = "dim_2", title: str = "") -> str:
    if x not in table.columns:
        raise ContractViolation(f"no column {x} to plot")
    if y not in table.columns:
        # one-dimensional fits are drawn on a flat line
        table = table.assign(**{y: 0.0})
    sx, sy = _scale(table[x]), _scale(table[y])
    groups = [g for g in dict.fromkeys(table["group"]) if g != "bill"]
    colors: Dict[str, str] = {g: PALETTE[i % len(PALETTE)] for i, g in enumerate(groups)}

    out: List[str] = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">',
        f'<rect width="{SIZE}" height="{SIZE}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{SIZE / 2:.1f}" y="20" text-anchor="middle" font-size="14">{escape(title)}</text>')
    for row in table.itertuples(index=False):
        px, py = sx(getattr(row, x)), SIZE - sy(getattr(row, y))
        node = escape(str(row.node_id))
        if row.group == "bill":
            out.append(
                f'<path d="M{px - 2:.2f},{py - 2:.2f}L{px + 2:.2f},{py + 2:.2f}M{px - 2:.2f},{py + 2:.2f}L{px + 2:.2f},{py - 2:.2f}" '
                f'stroke="#999999" stroke-width="1"><title>{node}</title></path>'
            )
        else:
            out.append(
                f'<circle cx="{px:.2f}" cy="{py:.2f}" r="3.5" fill="{colors[row.group]}" fill-opacity="0.8">'
                f'<title>{node} ({escape(str(row.group))})</title></circle>'
            )
    for i, g in enumerate(groups):
        out.append(f'<circle cx="{SIZE - 90}" cy="{30 + 16 * i}" r="4" fill="{colors[g]}"/>')
        out.append(f'<text x="{SIZE - 80}" y="{34 + 16 * i}" font-size="11">{escape(str(g))}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"

def write_plot_data(
    aligned: pd.DataFrame,
    out_svg,
    data: Optional[VoteMatrix] = None,
    label_key: Optional[str] = None,
    title: str = "",
):
    """Writes <out>.svg and the tidy <out>.csv next to it; returns both paths."""
    out_svg = Path(out_svg)
    out_svg.parent.mkdir(parents=True, exist_ok=True)
    table = tidy_table(aligned, data, label_key)
    out_csv = out_svg.with_suffix(".csv")
    table.to_csv(out_csv, index=False, float_format="%.17g", lineterminator="\n")
    out_svg.write_text(scatter_svg(table, title=title))
    return out_svg, out_csv
