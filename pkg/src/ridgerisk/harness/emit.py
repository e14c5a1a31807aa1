"""CSV and vector-plot emission with round-trip float formatting.

Floats are written with 17 significant digits so parsing a file recovers the
exact binary values; metadata rides in ``#``-prefixed comment lines before
the header.  Plots are self-contained static vector files (SVG or PDF by
extension) with one series per multiplier and argmin markers.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .checks import CheckReport
from .runner import FigureRow, FigureTable

CSV_COLUMNS = (
    "setting,multiplier,tau,mse_out,mse_out_se,mse_in,mse_in_se,"
    "norm_out,norm_in,is_argmin_out,is_argmin_in"
)
CHECK_CSV_COLUMNS = "suite,measured,tolerance,status"
APPROX_CSV_COLUMNS = (
    "tau,alpha,mse_out,mse_out_se,mse_in,mse_in_se,"
    "mse_out_hat,mse_in_hat,rel_err_out,rel_err_in"
)


def format_float(x: float) -> str:
    return format(float(x), ".17g")


def emit_csv(table: FigureTable, path: str) -> None:
    """Write a figure table; empty tables produce a header-only file."""
    try:
        with open(path, "w", newline="") as fh:
            for key in sorted(table.metadata):
                fh.write(f"# {key} = {table.metadata[key]}\n")
            fh.write(CSV_COLUMNS + "\n")
            for row in table.rows:
                fh.write(
                    ",".join(
                        (
                            row.setting,
                            format_float(row.multiplier),
                            format_float(row.tau),
                            format_float(row.mse_out),
                            format_float(row.mse_out_se),
                            format_float(row.mse_in),
                            format_float(row.mse_in_se),
                            format_float(row.norm_out),
                            format_float(row.norm_in),
                            str(int(row.is_argmin_out)),
                            str(int(row.is_argmin_in)),
                        )
                    )
                    + "\n"
                )
    except OSError as exc:
        raise OSError(f"failed to write CSV to {path!r}: {exc}") from exc


def parse_csv(path: str) -> FigureTable:
    """Read back a figure table emitted by :func:`emit_csv`."""
    rows: list[FigureRow] = []
    metadata: dict[str, str] = {}
    with open(path) as fh:
        lines = [line.rstrip("\n") for line in fh]
    body: list[str] = []
    for line in lines:
        if line.startswith("#"):
            key, _, value = line[1:].partition("=")
            metadata[key.strip()] = value.strip()
        elif line:
            body.append(line)
    if not body or body[0] != CSV_COLUMNS:
        raise ValueError(f"{path!r} does not carry the expected CSV header")
    for line in body[1:]:
        parts = line.split(",")
        rows.append(
            FigureRow(
                setting=parts[0],
                multiplier=float(parts[1]),
                tau=float(parts[2]),
                mse_out=float(parts[3]),
                mse_out_se=float(parts[4]),
                mse_in=float(parts[5]),
                mse_in_se=float(parts[6]),
                norm_out=float(parts[7]),
                norm_in=float(parts[8]),
                is_argmin_out=bool(int(parts[9])),
                is_argmin_in=bool(int(parts[10])),
            )
        )
    return FigureTable(rows=rows, metadata=metadata)


def build_figure(table: FigureTable):
    """Log-log risk curves, one series per multiplier, argmin markers."""
    fig, axes = plt.subplots(1, 2, figsize=(10, 4))
    for ax, field, marker_field, label in (
        (axes[0], "mse_out", "is_argmin_out", "out-sample MSE"),
        (axes[1], "mse_in", "is_argmin_in", "in-sample MSE"),
    ):
        for multiplier in table.multipliers():
            rows = [r for r in table.rows if r.multiplier == multiplier]
            taus = [r.tau for r in rows]
            vals = [getattr(r, field) for r in rows]
            ax.plot(taus, vals, label=f"multiplier {multiplier:g}")
            marks = [r for r in rows if getattr(r, marker_field)]
            ax.plot(
                [r.tau for r in marks],
                [getattr(r, field) for r in marks],
                "kv",
                markersize=7,
            )
        ax.set_xscale("log")
        ax.set_yscale("log")
        ax.set_xlabel("ridge level")
        ax.set_ylabel(label)
        ax.legend(fontsize=8)
    fig.tight_layout()
    return fig


def emit_plot(table: FigureTable, path: str) -> None:
    fig = build_figure(table)
    try:
        with plt.rc_context({"svg.hashsalt": "ridgerisk"}):
            fig.savefig(path, metadata=_plot_metadata(path))
    except OSError as exc:
        raise OSError(f"failed to write plot to {path!r}: {exc}") from exc
    finally:
        plt.close(fig)


def _plot_metadata(path: str) -> dict | None:
    # Strip volatile timestamps so repeated runs emit identical bytes.
    if path.endswith(".svg"):
        return {"Date": None}
    if path.endswith(".pdf"):
        return {"CreationDate": None}
    return None


def emit_approx_csv(rows, metadata: dict[str, str], path: str) -> None:
    """Per-tau comparison of exact risks against the approximation formulas."""
    try:
        with open(path, "w", newline="") as fh:
            for key in sorted(metadata):
                fh.write(f"# {key} = {metadata[key]}\n")
            fh.write(APPROX_CSV_COLUMNS + "\n")
            for row in rows:
                rel_out = abs(row.mse_out - row.mse_out_hat) / row.mse_out_hat
                rel_in = abs(row.mse_in - row.mse_in_hat) / row.mse_in_hat
                fh.write(
                    ",".join(
                        format_float(v)
                        for v in (
                            row.tau,
                            row.alpha,
                            row.mse_out,
                            row.mse_out_se,
                            row.mse_in,
                            row.mse_in_se,
                            row.mse_out_hat,
                            row.mse_in_hat,
                            rel_out,
                            rel_in,
                        )
                    )
                    + "\n"
                )
    except OSError as exc:
        raise OSError(f"failed to write approx CSV to {path!r}: {exc}") from exc


def emit_check_csv(report: CheckReport, path: str) -> None:
    try:
        with open(path, "w", newline="") as fh:
            fh.write(f"# seed = {report.seed}\n")
            fh.write(CHECK_CSV_COLUMNS + "\n")
            for result in report.results:
                status = "pass" if result.passed else "fail"
                fh.write(
                    f"{result.suite},{format_float(result.measured)},"
                    f"{format_float(result.tolerance)},{status}\n"
                )
    except OSError as exc:
        raise OSError(f"failed to write check report to {path!r}: {exc}") from exc
