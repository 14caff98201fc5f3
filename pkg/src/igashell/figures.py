"""Deterministic PNG rendering of benchmark curves (Agg backend).

Figures are a presentation companion to the CSV outputs: every plot is
drawn from the same arrays that the CSV writer serializes, with fixed
figure geometry and stripped metadata so repeated runs produce identical
bytes on one machine.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

_FIGSIZE = (5.0, 3.75)
_DPI = 130
_METADATA = {"Software": None}


def _new_axes(xlabel, ylabel, title):
    fig, ax = plt.subplots(figsize=_FIGSIZE, dpi=_DPI)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    return fig, ax


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, metadata=_METADATA)
    plt.close(fig)


def render_curve(result, path):
    """One response curve: control on x, response on y."""
    sc = result.scenario
    fig, ax = _new_axes(result.control_label, result.response_label,
                        f"{sc.name} [{result.pipeline_label}]")
    ax.plot(result.control, result.response, marker="o", markersize=3)
    _save(fig, path)


def render_comparison(results, path):
    """Overlay the same scenario under several pipelines."""
    first = results[0]
    fig, ax = _new_axes(first.control_label, first.response_label,
                        first.scenario.name)
    for result in results:
        ax.plot(result.control, result.response, marker="o", markersize=3,
                label=result.pipeline_label)
    ax.legend()
    _save(fig, path)


def render_sweep(axis_label, rows, path, title):
    """Error magnitude against the sweep axis (log-scaled error)."""
    fig, ax = _new_axes(axis_label, "max relative deviation", title)
    xs = [row[0] for row in rows]
    ys = [row[1] for row in rows]
    ax.plot(xs, ys, marker="s", markersize=4)
    if min(ys) > 0.0:
        ax.set_yscale("log")
    _save(fig, path)
