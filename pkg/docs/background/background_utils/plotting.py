#!/usr/bin/env python3

import matplotlib.pyplot as plt
import numpy as np


def plot_fields(fields: dict, windows: dict = None, suptitle: str = None):
    """Show periodic fields side by side with a shared colorbar per panel.

    - `fields` maps a panel title to a 2D array.

    - `windows` optionally maps a panel title to its `(vmin, vmax)`.
    """
    windows = windows or {}
    fig, axes = plt.subplots(1, len(fields), figsize=(4 * len(fields), 3.6))
    axes = np.atleast_1d(axes)
    for ax, (title, f) in zip(axes, fields.items()):
        vmin, vmax = windows.get(title, (None, None))
        im = ax.imshow(np.asarray(f), cmap="gray", vmin=vmin, vmax=vmax, origin="upper")
        ax.set_title(title)
        ax.set_xticks([])
        ax.set_yticks([])
        fig.colorbar(im, ax=ax, fraction=0.046)
    if suptitle:
        fig.suptitle(suptitle)
    fig.tight_layout()
    return fig


def plot_reports(reports, keys=("sup_u", "total_mass"), bounds=("sup_bound", "mass_bound")):
    """Plot monitored quantities of a run against their bounds."""
    steps = [r.step for r in reports]
    fig, axes = plt.subplots(1, len(keys), figsize=(4.5 * len(keys), 3.2))
    for ax, key, bound in zip(np.atleast_1d(axes), keys, bounds):
        ax.plot(steps, [getattr(r, key) for r in reports], "o-", label=key)
        ax.plot(steps, [getattr(r, bound) for r in reports], "k--", label=bound)
        ax.set_xlabel("step")
        ax.legend()
    fig.tight_layout()
    return fig
