"""Suite configuration and its validation."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields
from typing import Optional, Tuple

from ..errors import ConfigInvalid
from ..expectation import DEFAULT_PRODUCT_CAP


@dataclass(frozen=True)
class SuiteConfig:
    """Parameters of a verification run.

    ``max_base_atoms``, ``properties`` and ``workers`` extend the core
    fields: the first bounds the base carrier size, the second restricts the
    run to a subset of property ids (``None`` runs all of them), the third
    enables process-level parallelism without changing the report.
    """

    seed: int = 42
    trials: int = 100
    max_base_blocks: int = 4
    max_coins: int = 12
    p_range: Tuple[float, float] = (0.05, 0.95)
    tol: float = 1e-9
    t_grid_size: int = 16
    max_base_atoms: int = 8
    properties: Optional[Tuple[str, ...]] = None
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "p_range", tuple(float(x) for x in self.p_range))
        if self.properties is not None:
            object.__setattr__(self, "properties", tuple(self.properties))
        self.validate()

    def validate(self) -> None:
        def need(cond, msg):
            if not cond:
                raise ConfigInvalid(msg)

        for name in ("seed", "trials", "max_base_blocks", "max_coins", "t_grid_size",
                     "max_base_atoms", "workers"):
            val = getattr(self, name)
            need(isinstance(val, int) and not isinstance(val, bool), f"{name} must be an integer")
        need(0 <= self.seed < 2**64, "seed must be a 64-bit unsigned integer")
        need(self.trials >= 0, "trials must be >= 0")
        need(self.max_base_blocks >= 1, "max_base_blocks must be >= 1")
        need(self.max_base_atoms >= 1, "max_base_atoms must be >= 1")
        need(self.max_coins >= 1, "max_coins must be >= 1")
        need(self.t_grid_size >= 1, "t_grid_size must be >= 1")
        need(self.workers >= 1, "workers must be >= 1")
        lo, hi = self.p_range if len(self.p_range) == 2 else (None, None)
        need(lo is not None and 0.0 < lo <= hi < 1.0, "p_range must satisfy 0 < lo <= hi < 1")
        need(isinstance(self.tol, (int, float)) and self.tol >= 0, "tol must be >= 0")
        need(
            self.max_base_atoms * (1 << self.max_coins) <= DEFAULT_PRODUCT_CAP,
            "max_base_atoms * 2^max_coins exceeds the product-space cap of 2^22",
        )
        if self.properties is not None:
            from .properties import PROPERTIES

            unknown = [p for p in self.properties if p not in PROPERTIES]
            need(not unknown, f"unknown property ids: {unknown}")

    @classmethod
    def from_dict(cls, data: dict) -> "SuiteConfig":
        if not isinstance(data, dict):
            raise ConfigInvalid("config must be a JSON object")
        known = {f.name for f in fields(cls)}
        extra = set(data) - known
        if extra:
            raise ConfigInvalid(f"unknown config fields: {sorted(extra)}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigInvalid(str(exc)) from exc

    @classmethod
    def from_json(cls, path) -> "SuiteConfig":
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigInvalid(f"cannot read config {path}: {exc}") from exc
        return cls.from_dict(data)

    def replace(self, **changes) -> "SuiteConfig":
        data = asdict(self)
        data.update(changes)
        return SuiteConfig(**data)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["p_range"] = list(self.p_range)
        if self.properties is not None:
            d["properties"] = list(self.properties)
        return d
