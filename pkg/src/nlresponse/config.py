"""Experiment configuration (YAML), strictly validated.

Frequencies are cm^-1 and times fs throughout the file; conversion to
internal units happens once, in :func:`build_system`.  Level labels in the
file are 1-based.  Unknown keys anywhere are an error.

Example::

    system:
      levels_cm: [10000.0]
      dipoles: [1.0]
      rotating_frame_cm: 10000.0
      pathway: {i: 1, j: 1}
    bath:
      model: obo
      lambda_cm: 100.0
      tau_corr_fs: 100.0
      temperature_k: 300.0
    grids:
      tau: {step_fs: 2.0, count: 251}
      t: {step_fs: 2.0, count: 251}
      T_fs: [0.0, 100.0, 500.0]
    run:
      rk_step_fs: 1.0
      window: cos2
"""
import hashlib
import json
from pathlib import Path
from typing import List, Literal, Optional

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .bath import CorrelationMatrix, ObOLineBroadening, ObOParams, g_from_egcf, load_egcf_csv
from .cumulant import PathwaySpec, SystemSpec, uniform_axis
from .errors import ConfigError


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class PathwayBlock(_Strict):
    i: int = Field(1, ge=1)
    j: int = Field(1, ge=1)


class SystemBlock(_Strict):
    levels_cm: List[float] = Field(min_length=1)
    dipoles: List[float] = Field(min_length=1)
    rotating_frame_cm: float = 0.0
    pathway: PathwayBlock = PathwayBlock()

    @model_validator(mode="after")
    def _lengths(self):
        if len(self.levels_cm) != len(self.dipoles):
            raise ValueError("levels_cm and dipoles differ in length")
        if any(d < 0 for d in self.dipoles):
            raise ValueError("dipoles must be non-negative")
        m = len(self.levels_cm)
        if self.pathway.i > m or self.pathway.j > m:
            raise ValueError(f"pathway levels must lie in 1..{m}")
        return self


class BathBlock(_Strict):
    model: Literal["obo", "tabulated"]
    lambda_cm: Optional[float] = Field(None, ge=0)
    tau_corr_fs: Optional[float] = Field(None, gt=0)
    temperature_k: Optional[float] = Field(None, gt=0)
    path: Optional[str] = None
    units: Optional[Literal["rad2/fs2", "cm-2"]] = None
    quadrature_step_fs: Optional[float] = Field(None, gt=0)
    correlation: Optional[List[List[float]]] = None

    @model_validator(mode="after")
    def _model_fields(self):
        obo = ("lambda_cm", "tau_corr_fs", "temperature_k")
        if self.model == "obo":
            missing = [k for k in obo if getattr(self, k) is None]
            if missing:
                raise ValueError(f"obo bath requires {missing}")
            if self.path is not None:
                raise ValueError("'path' only applies to the tabulated model")
        else:
            if self.path is None:
                raise ValueError("tabulated bath requires 'path'")
            given = [k for k in obo if getattr(self, k) is not None]
            if given:
                raise ValueError(f"{given} only apply to the obo model")
        return self


class AxisBlock(_Strict):
    step_fs: float = Field(gt=0)
    count: int = Field(ge=1)


class GridsBlock(_Strict):
    tau: AxisBlock
    t: AxisBlock
    T_fs: List[float] = Field(default_factory=lambda: [0.0], min_length=1)

    @model_validator(mode="after")
    def _nonneg(self):
        if any(T < 0 for T in self.T_fs):
            raise ValueError("waiting times must be non-negative")
        return self


class RunBlock(_Strict):
    rk_step_fs: float = Field(1.0, gt=0)
    window: Literal["none", "cos2"] = "cos2"
    pad_factor: int = Field(8, ge=2)
    spectrum_part: Literal["abs", "real"] = "abs"
    crop_cm: Optional[float] = Field(1000.0, gt=0)
    output_dir: str = "out"
    formats: List[Literal["csv", "pgm", "json"]] = Field(default_factory=lambda: ["csv", "pgm", "json"])
    provenances: List[Literal["exact", "rdm", "propagated"]] = Field(default_factory=lambda: ["exact", "rdm"])
    identity_samples: int = Field(10000, ge=1)
    seed: int = 0


class ExperimentConfig(_Strict):
    system: SystemBlock
    bath: BathBlock
    grids: GridsBlock
    run: RunBlock = RunBlock()

    @model_validator(mode="after")
    def _correlation_shape(self):
        c = self.bath.correlation
        m = len(self.system.levels_cm)
        if c is not None and (len(c) != m or any(len(row) != m for row in c)):
            raise ValueError(f"bath.correlation must be {m}x{m}")
        return self

    def canonical(self):
        """Effective config as plain data with defaults filled in."""
        return self.model_dump(mode="json")

    def digest(self):
        blob = json.dumps(self.canonical(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    def dump_yaml(self):
        return yaml.safe_dump(self.canonical(), sort_keys=True)


def _format_errors(exc):
    lines = []
    for err in exc.errors():
        loc = ".".join(str(p) for p in err["loc"]) or "<root>"
        lines.append(f"{loc}: {err['msg']}")
    return "; ".join(lines)


def parse_config(data, base_dir=None):
    """Validate a mapping; relative table paths are resolved against ``base_dir``."""
    if not isinstance(data, dict):
        raise ConfigError("config must be a mapping at top level")
    try:
        cfg = ExperimentConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(_format_errors(exc)) from None
    if cfg.bath.path is not None and base_dir is not None:
        p = Path(cfg.bath.path)
        if not p.is_absolute():
            cfg.bath.path = str((Path(base_dir) / p).resolve())
    return cfg


def load_config(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" (line {mark.line + 1}, column {mark.column + 1})" if mark else ""
        raise ConfigError(f"{path}: YAML syntax error{where}") from None
    return parse_config(data, base_dir=path.parent)


def build_system(cfg):
    """SystemSpec and PathwaySpec (0-based) for a validated config."""
    b = cfg.bath
    m = len(cfg.system.levels_cm)
    if b.model == "obo":
        base = ObOLineBroadening(ObOParams(b.lambda_cm, b.tau_corr_fs, b.temperature_k))
    else:
        egcf = load_egcf_csv(b.path, units=b.units)
        grid = None
        if b.quadrature_step_fs is not None:
            n = int(egcf.times[-1] / b.quadrature_step_fs + 1e-9) + 1
            grid = uniform_axis(b.quadrature_step_fs, n)
        base = g_from_egcf(egcf, grid)
    try:
        corr = CorrelationMatrix(base, m, b.correlation)
    except ValueError as exc:
        raise ConfigError(f"bath.correlation: {exc}") from None
    sys = SystemSpec.from_wavenumbers(
        cfg.system.levels_cm, cfg.system.dipoles, corr, cfg.system.rotating_frame_cm
    )
    pw = PathwaySpec(cfg.system.pathway.i - 1, cfg.system.pathway.j - 1)
    return sys, pw


def axes(cfg):
    g = cfg.grids
    return uniform_axis(g.tau.step_fs, g.tau.count), uniform_axis(g.t.step_fs, g.t.count)
