"""Run configuration for the command-line frontend.

A :class:`RunConfig` holds every flag of a command. It can be loaded from a
YAML mapping with ``RunConfig.from_yaml(path)``; flags given on the command
line override the file.
"""

from __future__ import annotations

import os
from pathlib import Path

import yaml
from pydantic import BaseModel, Field, model_validator

from discrete_annealing.models import (
    CommandName,
    HorizonRule,
    ModelKind,
    OutputFormat,
    RunMode,
)

OUTPUT_DIR_ENV = "DISCRETE_ANNEALING_OUTPUT_DIR"


class RunConfig(BaseModel):
    """Validated parameters of one CLI command."""

    command: CommandName = CommandName.ACTION
    model: ModelKind = ModelKind.ISING
    n: int = Field(default=4, ge=1)
    q: int = Field(default=2, ge=2)
    beta: float = Field(default=1.0, ge=0.0)
    eps: float = Field(default=0.3, gt=0.0, lt=1.0)
    grid: int = Field(default=201, ge=3)
    seed: int = Field(default=0, ge=0, lt=2**64)
    replicates: int = Field(default=1, ge=1)
    mode: RunMode = RunMode.EXACT
    horizon: float | None = Field(default=None, ge=0.0)
    layers: int | None = Field(default=None, ge=1)
    max_jumps: int | None = Field(default=None, ge=0)
    horizon_rule: HorizonRule = HorizonRule.ACTION
    output: Path | None = None
    format: OutputFormat = OutputFormat.JSON
    suite: str | None = None

    @model_validator(mode="after")
    def model_preconditions(self) -> RunConfig:
        if self.model == ModelKind.ISING and self.q != 2:
            raise ValueError("The Ising model has q = 2")
        if self.model == ModelKind.POTTS and self.n < self.q:
            raise ValueError(f"Potts runs need n >= q, got n={self.n}, q={self.q}")
        if self.command == CommandName.VERIFY and not self.suite:
            raise ValueError("verify needs a suite name")
        return self

    @classmethod
    def from_yaml(cls, path: str | Path, **overrides: object) -> RunConfig:
        """Load a run configuration from YAML; ``overrides`` take precedence.

        Raises:
            FileNotFoundError: If the file does not exist.
            ValueError: If the YAML is not a mapping.
        """
        path = Path(path)
        if not path.exists():
            raise FileNotFoundError(f"Run configuration not found: {path}")
        with open(path) as f:
            data = yaml.safe_load(f) or {}
        if not isinstance(data, dict):
            raise ValueError(f"Expected a YAML mapping, got {type(data).__name__}")
        data.update({k: v for k, v in overrides.items() if v is not None})
        return cls.model_validate(data)

    def to_yaml(self, path: str | Path) -> None:
        with open(Path(path), "w") as f:
            yaml.dump(self.model_dump(mode="json"), f, default_flow_style=False, sort_keys=False)

    def default_name(self) -> str:
        tag = self.suite if self.command == CommandName.VERIFY else self.model.value
        return f"{self.command.value}-{tag}-n{self.n}.{self.format.value}"

    def resolve_output(self) -> Path | None:
        """Explicit output path, else a file under $DISCRETE_ANNEALING_OUTPUT_DIR, else stdout."""
        if self.output is not None:
            return self.output
        directory = os.environ.get(OUTPUT_DIR_ENV)
        if directory:
            return Path(directory) / self.default_name()
        return None
