"""Experiment configuration.

Configs are JSON documents validated by pydantic; unknown keys are rejected
so a typo cannot silently fall back to a default.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import List, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from ..cmsolver import SolveOptions
from ..cpwbuilder import BcpwOptions
from ..errors import ConfigInvalid
from ..lattice import PotentialSpec, build_grid, load_tabulated

SCHEMA_VERSION = 1


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class GridConfig(_Strict):
    L: float = 50.0
    n: int = 128

    def build(self):
        return build_grid(self.L, self.n)


class PotentialConfig(_Strict):
    kind: Literal["free", "kronig_penney", "impurity_kronig_penney", "tabulated"] = "free"
    V0: float = 1.0
    delta: float = 3.0
    Nel: int = 5
    centers: Optional[List[float]] = None
    impurity_site: Optional[int] = None
    impurity_factor: float = 2.0
    samples_path: Optional[str] = None

    def build(self) -> PotentialSpec:
        if self.kind == "tabulated":
            if self.samples_path is None:
                raise ConfigInvalid("tabulated potential needs samples_path")
            return load_tabulated(self.samples_path)
        return PotentialSpec(
            kind=self.kind,
            V0=self.V0,
            delta=self.delta,
            Nel=self.Nel,
            centers=None if self.centers is None else tuple(self.centers),
            impurity_site=self.impurity_site,
            impurity_factor=self.impurity_factor,
        )


class SolverConfig(_Strict):
    N: int = 5
    M: Optional[int] = None
    mu: List[float] = Field(default_factory=lambda: [30.0])
    N_list: Optional[List[int]] = None
    stencil: Literal["fd", "spectral"] = "fd"
    max_iter: int = 20000
    tol_split: float = 1e-6
    tol_obj: float = 1e-9
    ortho: Literal["full", "banded"] = "full"
    band: int = 1
    inner: Literal["direct", "gauss_seidel", "cg"] = "direct"
    lambda_pen: Optional[float] = None
    r_pen: Optional[float] = None
    # energy study: solve once at mu_start from a random start, then follow the mu list
    continuation: bool = False
    mu_start: Optional[float] = None

    @field_validator("mu")
    @classmethod
    def _positive_mu(cls, v):
        if not v or any(m <= 0 for m in v):
            raise ValueError("mu values must be positive and at least one is required")
        return v

    def options(self, seed: int) -> SolveOptions:
        return SolveOptions(
            max_iter=self.max_iter,
            tol_split=self.tol_split,
            tol_obj=self.tol_obj,
            seed=seed,
            ortho=self.ortho,
            band=self.band,
            inner=self.inner,
            lambda_pen=self.lambda_pen,
            r_pen=self.r_pen,
        )


class CpwConfig(_Strict):
    w: float = 5.0
    levels: int = 6
    mu: float = 5.0
    lambda_scale: float = 100.0
    max_iter: int = 3000
    tol: float = 1e-8
    K: List[int] = Field(default_factory=lambda: [20, 30, 40, 50, 60, 70])
    states: int = 4
    window: Optional[List[int]] = None  # [start, length] in node indices

    def options(self) -> BcpwOptions:
        return BcpwOptions(max_iter=self.max_iter, tol=self.tol, lambda_scale=self.lambda_scale)


class ExperimentConfig(_Strict):
    schema_version: int = SCHEMA_VERSION
    experiment: str
    figure: Optional[str] = None
    seed: int = 0
    grid: GridConfig = Field(default_factory=GridConfig)
    potential: PotentialConfig = Field(default_factory=PotentialConfig)
    # optional list of models to run side by side (overrides ``potential``)
    potentials: Optional[List[PotentialConfig]] = None
    solver: SolverConfig = Field(default_factory=SolverConfig)
    cpw: CpwConfig = Field(default_factory=CpwConfig)
    output_dir: str = "out"
    format: Literal["csv", "json"] = "csv"
    workers: int = 1

    @field_validator("seed")
    @classmethod
    def _seed_range(cls, v):
        if not 0 <= v < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        return v

    @model_validator(mode="after")
    def _check(self):
        if self.schema_version != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema_version {self.schema_version}")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")
        return self

    def models(self) -> List[PotentialConfig]:
        return list(self.potentials) if self.potentials else [self.potential]

    def with_overrides(self, **kw) -> "ExperimentConfig":
        data = self.model_dump()
        data.update({k: v for k, v in kw.items() if v is not None})
        return parse_config(data)


def parse_config(data) -> ExperimentConfig:
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigInvalid(str(exc)) from exc


def load_config(path) -> ExperimentConfig:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigInvalid(f"{path}: {exc}") from exc
    return parse_config(data)


def dump_config(cfg: ExperimentConfig) -> str:
    return json.dumps(cfg.model_dump(), indent=2, sort_keys=True) + "\n"


def ikp_centers(Nel: int = 10, spacing: float = 10.0) -> List[float]:
    """Well positions offset by half a spacing from the grid origin."""
    return [float(c) for c in spacing * np.arange(1, Nel + 1) - spacing / 2]
