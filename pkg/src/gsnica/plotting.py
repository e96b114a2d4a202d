"""Figures written to files (no interactive display)."""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

# fixed ids and no timestamps so repeated runs give identical SVG bytes
_RC = {
    "svg.hashsalt": "gsnica",
    "svg.fonttype": "none",
    "path.simplify": False,
    "font.size": 10,
}


def _save(fig, path):
    # format follows the extension; SVG output drops its timestamp
    svg = str(path).lower().endswith(".svg")
    fig.savefig(path, metadata={"Date": None} if svg else None)
    plt.close(fig)


def plot_trace(trace, path):
    """Line chart of ``ln l`` and gradient inf-norm against iteration.

    ``trace`` is an ``(k, 3)`` array of ``(iteration, ln l, grad norm)``.
    The two polylines carry the SVG ids ``log_l`` and ``grad_norm``. The
    file format follows the extension of ``path``.
    """
    trace = np.asarray(trace, dtype=np.float64)
    if trace.ndim != 2 or trace.shape[0] == 0 or trace.shape[1] != 3:
        raise ValueError("trace must be a non-empty (k, 3) array")
    it, logl, gnorm = trace.T
    with plt.rc_context(_RC):
        fig, (ax1, ax2) = plt.subplots(2, 1, sharex=True, figsize=(6, 5))
        ax1.plot(it, logl, marker="o", markersize=3, color="C0", gid="log_l")
        ax1.set_ylabel("ln l")
        ax2.plot(it, gnorm, marker="o", markersize=3, color="C3", gid="grad_norm")
        if np.all(gnorm > 0):
            ax2.set_yscale("log")
        ax2.set_ylabel("|grad|_inf")
        ax2.set_xlabel("iteration")
        fig.tight_layout()
        _save(fig, path)


def plot_sources(reference, recovered, path, max_points=2000):
    """Scatter of recovered signal ``j`` against reference signal ``j``, one panel each."""
    reference = np.atleast_2d(np.asarray(reference, dtype=np.float64))
    recovered = np.atleast_2d(np.asarray(recovered, dtype=np.float64))
    d = reference.shape[1]
    step = max(1, reference.shape[0] // max_points)
    with plt.rc_context(_RC):
        fig, axes = plt.subplots(1, d, figsize=(3 * d, 3), squeeze=False)
        for j, ax in enumerate(axes[0]):
            ax.plot(reference[::step, j], recovered[::step, j], ".", markersize=1)
            ax.set_xlabel(f"reference {j + 1}")
            ax.set_ylabel(f"recovered {j + 1}")
        fig.tight_layout()
        _save(fig, path)
