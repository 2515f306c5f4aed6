"""Stock configurations, one per reproducible figure or table."""

from __future__ import annotations

from ..errors import UnknownExperiment
from .config import ExperimentConfig, ikp_centers, parse_config

FREE = {"kind": "free"}
KP = {"kind": "kronig_penney", "V0": 1.0, "delta": 3.0, "Nel": 5}
IKP = {
    "kind": "impurity_kronig_penney",
    "V0": 1.0,
    "delta": 3.0,
    "Nel": 10,
    "centers": ikp_centers(10),
    "impurity_site": 5,
    "impurity_factor": 8.0,
}
CPW_GRID = {"L": 100.0, "n": 512}
CPW = {"w": 5.0, "levels": 6, "mu": 5.0}

STOCK = {
    "fig2": {
        "experiment": "closed-form",
        "grid": {"L": 50.0, "n": 1024},
        "potential": FREE,
        "solver": {"N": 1, "mu": [0.5, 1.0, 2.0, 4.0]},
    },
    "fig3": {
        "experiment": "cm-gallery",
        "grid": {"L": 50.0, "n": 128},
        "potentials": [FREE, KP],
        "solver": {"N": 5, "mu": [30.0, 50.0, 500.0]},
    },
    "fig4": {
        "experiment": "eigen-gallery",
        "grid": {"L": 50.0, "n": 128},
        "potentials": [FREE, KP],
        "solver": {"N": 5},
    },
    "fig8": {
        "experiment": "completeness",
        "grid": {"L": 50.0, "n": 128},
        "potentials": [FREE, KP],
        "solver": {"N": 50, "M": 50, "N_list": [50, 60, 128], "mu": [10.0]},
    },
    "fig9": {
        "experiment": "completeness",
        "grid": {"L": 50.0, "n": 128},
        "potentials": [FREE, KP],
        "solver": {"N": 50, "M": 50, "mu": [10.0, 30.0, 100.0]},
    },
    "energy": {
        "experiment": "energy-convergence",
        "grid": {"L": 50.0, "n": 128},
        "potential": FREE,
        "solver": {
            "N": 5,
            "mu": [320.0, 640.0, 1280.0, 2560.0, 5120.0],
            "continuation": True,
            "mu_start": 160.0,
            "lambda_pen": 0.5,
            "r_pen": 2.0,
            "tol_split": 1e-10,
            "max_iter": 40000,
        },
    },
    "fig6": {"experiment": "bcpw-gallery", "grid": CPW_GRID, "cpw": CPW},
    "fig7": {"experiment": "spectral-weight", "grid": CPW_GRID, "cpw": CPW},
    "table1": {"experiment": "table1", "grid": CPW_GRID, "potential": IKP, "cpw": CPW},
    "fig10": {"experiment": "table1", "grid": CPW_GRID, "potential": IKP, "cpw": CPW},
    "fig11": {"experiment": "ikp-eigenvalues", "grid": CPW_GRID, "potential": IKP, "cpw": CPW},
    "fig12": {"experiment": "transform", "grid": CPW_GRID, "potential": IKP, "cpw": CPW},
    "fig13": {"experiment": "transform", "grid": CPW_GRID, "potential": IKP, "cpw": CPW},
}


def stock_config(figure: str, **overrides) -> ExperimentConfig:
    """Stock config for ``figure`` with optional top-level overrides (``None`` values ignored)."""
    if figure not in STOCK:
        raise UnknownExperiment(f"no stock config for {figure!r}; known: {sorted(STOCK)}")
    data = dict(STOCK[figure], figure=figure)
    data.update({k: v for k, v in overrides.items() if v is not None})
    return parse_config(data)
