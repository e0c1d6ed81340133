import argparse
import json
import os
import sys
from typing import Any, Literal, NoReturn, Optional, Union

import yaml
from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, Field, model_validator

from annulus_conformal.config import RELEVANT_KEYS, get_global_conf
from annulus_conformal.core.composite import HoleTarget
from annulus_conformal.core.outer_map import (
    HypotrochoidSpec,
    LaurentMap,
    PolygonSpec,
    hypotrochoid_map,
    normalize_map,
    schwarz_christoffel_map,
    straight_edge_m,
)
from annulus_conformal.utils.curve_types import GapReference, OutputFormat, ShapeKind

COMMANDS = ("solve", "curve", "table1", "grid", "benchmarks")

# flag name (also the key accepted in --config files) -> RunConfig field
FLAG_FIELDS = {
    "shape": "shape",
    "n": "n",
    "m": "m",
    "nsides": "n_sides",
    "terms": "terms",
    "rotated": "rotated",
    "C": "C",
    "rout": "r_out",
    "a": "a",
    "R": "R",
    "d": "d",
    "h": "h",
    "gap_from": "gap_from",
    "format": "format",
    "output": "output",
    "samples": "samples",
    "precision": "precision",
    "rings": "rings",
    "rays": "rays",
}


class UsageError(Exception):
    """Bad command-line input; the CLI exits with status 1."""


class CliArgumentParser(argparse.ArgumentParser):
    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


class RunConfig(BaseModel):
    """One run of the command line, resolved from flags and an optional config file."""

    model_config = ConfigDict(extra="forbid")

    shape: ShapeKind = ShapeKind.HYPOTROCHOID
    n: Optional[int] = Field(default=None, ge=1)
    m: Optional[Union[Literal["auto"], float]] = None
    n_sides: Optional[int] = None
    terms: Optional[int] = Field(default=None, ge=1)
    rotated: bool = False

    C: Optional[float] = Field(default=None, gt=0.0)
    r_out: Optional[float] = Field(default=None, gt=0.0)
    a: Optional[float] = Field(default=None, gt=0.0)

    R: float = Field(gt=0.0)
    d: Optional[float] = Field(default=None, ge=0.0)
    h: Optional[float] = None
    gap_from: GapReference = GapReference.CURVE

    format: OutputFormat = OutputFormat.CSV
    output: Optional[str] = None
    samples: int = Field(default_factory=lambda: get_global_conf().get_output_samples(), ge=3)
    precision: int = Field(default_factory=lambda: get_global_conf().get_output_precision(), ge=1, le=17)
    rings: int = Field(default=16, ge=2)
    rays: int = Field(default=72, ge=3)

    @model_validator(mode="after")
    def _consistent(self) -> "RunConfig":
        normalizations = [k for k in ("C", "r_out", "a") if getattr(self, k) is not None]
        if len(normalizations) != 1:
            raise ValueError(f"exactly one of --C, --rout, --a is required, got {normalizations or 'none'}")
        if (self.d is None) == (self.h is None):
            raise ValueError("exactly one of --d or --h is required")
        if self.shape is ShapeKind.HYPOTROCHOID and (self.n is None or self.m is None):
            raise ValueError("hypotrochoid needs --n and --m")
        if self.shape is ShapeKind.POLYGON and self.n_sides is None:
            raise ValueError("polygon needs --nsides")
        return self

    @property
    def m_value(self) -> float:
        assert self.n is not None and self.m is not None
        return straight_edge_m(self.n) if self.m == "auto" else float(self.m)

    @property
    def reference_length(self) -> float:
        """The normalization value; with --gap-from norm the gap d is measured from it."""
        value = next(v for v in (self.C, self.r_out, self.a) if v is not None)
        return float(value)

    @property
    def order(self) -> int:
        return self.n if self.shape is ShapeKind.HYPOTROCHOID else self.n_sides  # type: ignore[return-value]

    @property
    def m_or_terms(self) -> float:
        if self.shape is ShapeKind.HYPOTROCHOID:
            return self.m_value
        return self.resolved_terms

    @property
    def resolved_terms(self) -> int:
        return self.terms if self.terms is not None else get_global_conf().get_sc_default_terms()


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=str, default=None, help="key=value, .yaml/.yml or .json file with flag values.")
    common.add_argument("--log-level", type=str, default=None, help="Logger level, e.g. debug or info.")
    common.add_argument("--output", type=str, default=None, help="Output file; stdout when omitted.")
    common.add_argument("--precision", type=int, default=None, help="Significant digits in written values.")
    return common


def _shape_parser() -> argparse.ArgumentParser:
    shape = argparse.ArgumentParser(add_help=False)
    shape.add_argument("--shape", choices=[s.value for s in ShapeKind], default=None, help="Outer hole family.")
    shape.add_argument("--n", type=int, default=None, help="Hypotrochoid order n.")
    shape.add_argument("--m", type=str, default=None, help="Hypotrochoid parameter m, or 'auto' for 1/n^2.")
    shape.add_argument("--nsides", type=int, default=None, help="Number of polygon sides.")
    shape.add_argument("--terms", type=int, default=None, help="Schwarz-Christoffel series terms.")
    shape.add_argument("--rotated", action=argparse.BooleanOptionalAction, default=None, help="Rotated polygon orientation.")
    shape.add_argument("--C", type=float, default=None, help="Normalize by the scale factor C.")
    shape.add_argument("--rout", type=float, default=None, help="Normalize by the outer radius C(1 + sum|c_n|).")
    shape.add_argument("--a", type=float, default=None, help="Normalize by the boundary point F(1).")
    shape.add_argument("--R", type=float, default=None, help="Radius of the circular hole.")
    shape.add_argument("--d", type=float, default=None, help="Axial gap between the curve and the hole rim.")
    shape.add_argument("--h", type=float, default=None, help="Centre of the circular hole.")
    shape.add_argument(
        "--gap-from",
        dest="gap_from",
        choices=[g.value for g in GapReference],
        default=None,
        help="Measure --d from the curve point Re F(1) (default) or from the normalization value.",
    )
    return shape


def build_parser() -> CliArgumentParser:
    parser = CliArgumentParser(
        prog="annulus-conformal",
        description="Composite conformal maps of an annulus onto a plane with a symmetric hole and a nearly circular hole.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    common, shape = _common_parser(), _shape_parser()

    sub.add_parser("solve", parents=[common, shape], help="Solve the map parameters and print a JSON report.")

    curve = sub.add_parser("curve", parents=[common, shape], help="Sample the outer curve, the hole and its reference circle.")
    curve.add_argument("--format", choices=[f.value for f in OutputFormat], default=None)
    curve.add_argument("--samples", type=int, default=None)

    sub.add_parser("table1", parents=[common], help="Discrepancy table over hole radius and gap.")

    grid = sub.add_parser("grid", parents=[common, shape], help="Image of a polar grid of the annulus.")
    grid.add_argument("--rings", type=int, default=None)
    grid.add_argument("--rays", type=int, default=None)

    sub.add_parser("benchmarks", parents=[common], help="Reported hole configurations and their discrepancies.")
    return parser


# ---------------------------------------------------------------------------
# Config files
# ---------------------------------------------------------------------------


def load_config_file(path: str) -> dict[str, Any]:
    """
    Read a flat mapping of flag names to values.

    Args:
        path (str): ``.yaml``/``.yml`` and ``.json`` are parsed as such; anything else as key=value lines.

    Returns:
        dict[str, Any]: keys as written in the file, leading dashes stripped.
    """
    if not os.path.isfile(path):
        raise UsageError(f"config file not found: {path}")
    extension = os.path.splitext(path)[1].lower()
    try:
        with open(path, "r", encoding="utf-8") as f:
            if extension in (".yaml", ".yml"):
                loaded = yaml.safe_load(f) or {}
            elif extension == ".json":
                loaded = json.load(f)
            else:
                loaded = dotenv_values(stream=f)
    except (OSError, yaml.YAMLError) as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    if not isinstance(loaded, dict):
        raise UsageError(f"config file {path} must hold a flat mapping")
    return {str(k).lstrip("-"): v for k, v in loaded.items() if v is not None}


def split_settings(values: dict[str, Any]) -> tuple[dict[str, Any], dict[str, Any]]:
    """Separate run flags from global settings such as COARSE_SAMPLES."""
    flags, settings = {}, {}
    for key, value in values.items():
        if key in FLAG_FIELDS:
            flags[key] = value
        elif key in RELEVANT_KEYS:
            settings[key] = str(value)
        else:
            raise UsageError(f"unknown config key {key!r}")
    return flags, settings


def resolve_run_config(args: argparse.Namespace, file_values: dict[str, Any]) -> RunConfig:
    """Merge config-file values with flags (flags win) into a RunConfig."""
    merged: dict[str, Any] = {FLAG_FIELDS[k]: v for k, v in file_values.items()}
    for flag, field in FLAG_FIELDS.items():
        value = getattr(args, flag, None)
        if value is not None:
            merged[field] = value
    if isinstance(merged.get("m"), str) and merged["m"].strip().lower() == "auto":
        merged["m"] = "auto"
    return RunConfig.model_validate(merged)


# ---------------------------------------------------------------------------
# Map construction
# ---------------------------------------------------------------------------


def build_outer_map(config: RunConfig) -> LaurentMap:
    if config.shape is ShapeKind.HYPOTROCHOID:
        assert config.n is not None
        base = hypotrochoid_map(HypotrochoidSpec(n=config.n, m=config.m_value))
    else:
        assert config.n_sides is not None
        base = schwarz_christoffel_map(PolygonSpec(n_sides=config.n_sides, terms=config.resolved_terms, rotated=config.rotated))
    return normalize_map(base, C=config.C, r_out=config.r_out, a=config.a)


def build_target(config: RunConfig) -> HoleTarget:
    """Hole centre from --h, or from --d measured per --gap-from."""
    if config.h is not None:
        return HoleTarget(R=config.R, h=config.h)
    reference = config.reference_length if config.gap_from is GapReference.NORM else None
    return HoleTarget(R=config.R, d=config.d, reference=reference)
