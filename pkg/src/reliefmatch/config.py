"""Per-event configuration: every tunable constant of the pipeline lives
in one TOML file (thresholds, bounding box, file paths, method choice).
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib as _toml
else:
    import tomli as _toml

from .geo import BoundingBox

__all__ = ["EventConfig", "load_config", "save_config"]

PATH_ROLES = (
    "lexicon_dir",
    "gazetteer",
    "gazetteer_cache",
    "vectors_local",
    "vectors_crisis",
    "vectors_general",
    "vectors_paraphrase",
    "annotated",
    "judgments",
)


@dataclass
class EventConfig:
    event_name: str = "event"
    bounding_box: BoundingBox = field(
        default_factory=lambda: BoundingBox(26.35, 30.45, 80.06, 88.2)
    )
    geo_threshold_km: float = 100.0
    dedup_threshold: float = 0.8
    similarity_threshold: float = 0.8
    jw_threshold: float = 0.75
    dependency_distance_max: int = 4
    quantity_window: int = 3
    k: int = 5
    resource_weight: float = 0.5
    proximity_weight: float = 0.5
    method: str = "P2b"
    paths: dict[str, str] = field(default_factory=dict)
    # live geocoding endpoints; empty templates disable the live backend
    gazetteer_coarse_url: str = ""
    gazetteer_fine_url: str = ""
    gazetteer_min_interval_s: float = 1.0

    def __post_init__(self):
        for name in ("dedup_threshold", "similarity_threshold", "jw_threshold"):
            v = getattr(self, name)
            if not 0.0 < v <= 1.0:
                raise ValueError(f"{name} must lie in (0, 1], got {v}")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.dependency_distance_max < 1 or self.quantity_window < 1:
            raise ValueError("window sizes must be >= 1")
        if abs(self.resource_weight + self.proximity_weight - 1.0) > 1e-9:
            raise ValueError("resource and proximity weights must sum to 1")
        if self.geo_threshold_km <= 0:
            raise ValueError("geo_threshold_km must be positive")
        unknown = set(self.paths) - set(PATH_ROLES)
        if unknown:
            raise ValueError(f"unknown path roles: {sorted(unknown)}")

    def path(self, role: str, base: Path | None = None) -> Path | None:
        raw = self.paths.get(role, "")
        if not raw:
            return None
        p = Path(raw)
        if base is not None and not p.is_absolute():
            p = base / p
        return p


def load_config(path) -> EventConfig:
    path = Path(path)
    with open(path, "rb") as fh:
        data = _toml.load(fh)
    event = data.get("event", {})
    box = data.get("bounding_box", {})
    thresholds = data.get("thresholds", {})
    matching = data.get("matching", {})
    gazetteer = data.get("gazetteer", {})
    paths = {k: str(v) for k, v in data.get("paths", {}).items() if str(v)}
    return EventConfig(
        event_name=event.get("name", path.stem),
        geo_threshold_km=float(event.get("geo_threshold_km", 100.0)),
        bounding_box=BoundingBox(
            float(box.get("min_lat", 26.35)),
            float(box.get("max_lat", 30.45)),
            float(box.get("min_lon", 80.06)),
            float(box.get("max_lon", 88.2)),
        ),
        dedup_threshold=float(thresholds.get("dedup", 0.8)),
        similarity_threshold=float(thresholds.get("similarity", 0.8)),
        jw_threshold=float(thresholds.get("jaro_winkler", 0.75)),
        dependency_distance_max=int(thresholds.get("dependency_distance_max", 4)),
        quantity_window=int(thresholds.get("quantity_window", 3)),
        k=int(matching.get("k", 5)),
        resource_weight=float(matching.get("resource_weight", 0.5)),
        proximity_weight=float(matching.get("proximity_weight", 0.5)),
        method=str(matching.get("method", "P2b")),
        paths=paths,
        gazetteer_coarse_url=str(gazetteer.get("coarse_url", "")),
        gazetteer_fine_url=str(gazetteer.get("fine_url", "")),
        gazetteer_min_interval_s=float(gazetteer.get("min_interval_s", 1.0)),
    )


def _toml_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, float)):
        return repr(v)
    return '"' + str(v).replace("\\", "\\\\").replace('"', '\\"') + '"'


def save_config(cfg: EventConfig, path) -> None:
    """Serialize a config back to TOML (round-trips through load_config)."""
    box = cfg.bounding_box
    lines = [
        "[event]",
        f"name = {_toml_value(cfg.event_name)}",
        f"geo_threshold_km = {_toml_value(cfg.geo_threshold_km)}",
        "",
        "[bounding_box]",
        f"min_lat = {_toml_value(box.min_lat)}",
        f"max_lat = {_toml_value(box.max_lat)}",
        f"min_lon = {_toml_value(box.min_lon)}",
        f"max_lon = {_toml_value(box.max_lon)}",
        "",
        "[thresholds]",
        f"dedup = {_toml_value(cfg.dedup_threshold)}",
        f"similarity = {_toml_value(cfg.similarity_threshold)}",
        f"jaro_winkler = {_toml_value(cfg.jw_threshold)}",
        f"dependency_distance_max = {_toml_value(cfg.dependency_distance_max)}",
        f"quantity_window = {_toml_value(cfg.quantity_window)}",
        "",
        "[matching]",
        f"k = {_toml_value(cfg.k)}",
        f"method = {_toml_value(cfg.method)}",
        f"resource_weight = {_toml_value(cfg.resource_weight)}",
        f"proximity_weight = {_toml_value(cfg.proximity_weight)}",
        "",
        "[gazetteer]",
        f"coarse_url = {_toml_value(cfg.gazetteer_coarse_url)}",
        f"fine_url = {_toml_value(cfg.gazetteer_fine_url)}",
        f"min_interval_s = {_toml_value(cfg.gazetteer_min_interval_s)}",
        "",
        "[paths]",
    ]
    for role in PATH_ROLES:
        if role in cfg.paths:
            lines.append(f"{role} = {_toml_value(cfg.paths[role])}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
