"""Runtime settings.

All tolerances, node counts and schedules used by the numerical routines live
in one flat dataclass so that reports can state exactly what they ran with.
Settings load from an optional ``key = value`` text file; the ``SSLAB_CONFIG``
environment variable points at a file that overrides the defaults for the CLI.
"""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass

from .errors import ParseError


@dataclass
class Settings:
    # circle quadrature (residues, periods, contour limits)
    circle_nodes: int = 512
    circle_max_nodes: int = 8192
    residue_rel_tol: float = 1e-9
    # radius schedules for contour limits
    schedule_base_finite: float = 0.5
    schedule_base_infinite: float = 4.0
    schedule_steps: int = 21
    contour_rel_tol: float = 1e-6
    # path integration
    quad_target: float = 1e-9
    quad_max_depth: int = 14
    clearance: float = 1e-3
    # locus scanning
    locus_grid_n: int = 256
    locus_dedup: float = 1e-8
    locus_residual_tol: float = 1e-10
    locus_newton_steps: int = 60
    curve_min_points: int = 8
    # winding numbers
    winding_nodes: int = 1024
    winding_tol: float = 1e-6
    # area integration
    area_theta_nodes: int = 128
    area_rho_nodes: int = 12
    area_max_shells: int = 48
    area_abs_floor: float = 1e-9
    # meshing
    mesh_res: int = 48
    mesh_margin: float = 0.06
    intersection_merge: float = 1e-6
    intersection_residual: float = 1e-8
    # completeness probe
    ray_halvings: int = 40
    # shared rng seed for anything randomised
    rng_seed: int = 20240811


def _coerce(field_type: type, raw: str):
    raw = raw.strip()
    if field_type is int:
        return int(raw)
    if field_type is float:
        return float(raw)
    raise ParseError(f"unsupported settings field type {field_type!r}")


def load_settings(path: str | None = None) -> Settings:
    """Build Settings from defaults plus an optional key=value file.

    When ``path`` is None the SSLAB_CONFIG environment variable is consulted.
    Unknown keys raise ParseError (catching typos beats silent defaults).
    """
    if path is None:
        path = os.environ.get("SSLAB_CONFIG")
    settings = Settings()
    if not path:
        return settings
    fields = {f.name: f.type for f in dataclasses.fields(Settings)}
    types = {"int": int, "float": float, int: int, float: float}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParseError(f"{path}:{lineno}: expected key = value")
            key, _, raw = line.partition("=")
            key = key.strip()
            if key not in fields:
                raise ParseError(f"{path}:{lineno}: unknown setting {key!r}")
            ftype = types[fields[key]]
            setattr(settings, key, _coerce(ftype, raw))
    return settings


DEFAULT = Settings()
