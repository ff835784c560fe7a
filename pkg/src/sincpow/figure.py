"""The curve family f_r, r = base**k, as a delimited table and a rendered plot."""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import core
from .verify import shared_terms

DEFAULT_K = (1, 2, 4, 8, 16, 32, 64, 128, 256)


@dataclass(frozen=True)
class FigureSpec:
    k_values: tuple = DEFAULT_K
    base: float = 1.02
    n_points: int = 1001
    fmt: str = "csv"

    def __post_init__(self):
        object.__setattr__(self, "k_values", tuple(int(k) for k in self.k_values))
        if not self.base > 1:
            raise ValueError("base must be > 1")
        if not self.k_values or any(k < 1 for k in self.k_values):
            raise ValueError("k_values must be nonempty positive integers")
        if any(b <= a for a, b in zip(self.k_values, self.k_values[1:])):
            raise ValueError("k_values must be strictly increasing")
        if self.n_points < 2:
            raise ValueError("n_points must be >= 2")
        if self.fmt not in ("csv", "svg"):
            raise ValueError(f"unknown format {self.fmt!r}")

    @property
    def exponents(self) -> list[float]:
        return [self.base**k for k in self.k_values]


@dataclass
class FigureTable:
    x: np.ndarray
    k_values: tuple
    r_values: list
    values: np.ndarray  # shape (n_points, n_curves)
    errors: np.ndarray
    terms: list = field(default_factory=list)


def figure_table(spec: FigureSpec, eval_tol: float = 1e-8) -> FigureTable:
    xs = np.linspace(0.0, 1.0, spec.n_points)
    vals = np.empty((xs.size, len(spec.k_values)))
    errs = np.empty_like(vals)
    terms = []
    for c, r in enumerate(spec.exponents):
        N = shared_terms(r, xs, eval_tol)
        vals[:, c], errs[:, c] = core.f_r_grid(xs, r, N)
        terms.append(N)
    return FigureTable(xs, spec.k_values, spec.exponents, vals, errs, terms)


def to_csv(table: FigureTable) -> str:
    buf = io.StringIO()
    buf.write(",".join(["x"] + [f"f_r(k={k})" for k in table.k_values]) + "\n")
    for x, row in zip(table.x, table.values):
        buf.write(",".join(f"{v:.16e}" for v in (x, *row)) + "\n")
    return buf.getvalue()


def write_csv(table: FigureTable, path) -> Path:
    path = Path(path)
    with open(path, "w", newline="\n") as fh:
        fh.write(to_csv(table))
    return path


def render(table: FigureTable, path, base: float = 1.02) -> Path:
    """Plot the family on linear [0, 1] x [0, 1] axes; format follows the suffix."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    path = Path(path)
    with plt.rc_context({"svg.hashsalt": "sincpow", "font.size": 9}):
        fig, ax = plt.subplots(figsize=(5.0, 3.6))
        cmap = plt.get_cmap("viridis")
        n = len(table.k_values)
        for c, (k, r) in enumerate(zip(table.k_values, table.r_values)):
            ax.plot(table.x, table.values[:, c], lw=1.0, color=cmap(c / max(1, n - 1)),
                    label=f"k={k} (r={r:.4g})")
        ax.set_xlim(0, 1)
        ax.set_ylim(0, 1.02)
        ax.set_xlabel("x")
        ax.set_ylabel(r"$f_r(x)$")
        ax.set_title(rf"$f_r$, $r={base:g}^k$")
        ax.legend(fontsize=6, loc="lower center", ncol=3, frameon=False)
        fig.tight_layout()
        meta = {"Date": None} if path.suffix.lower() == ".svg" else None
        fig.savefig(path, metadata=meta)
        plt.close(fig)
    return path
