"""Machine-readable run reports.

A report is a flat JSON document with a fixed field set; histories nest
as lists under ``metrics``.  Serialization is lossless for floats
(shortest round-trip decimals), so a rerun with the logged seed can be
compared metric-for-metric against the logged values.
"""

import json
import math

from . import __version__

__all__ = ["RunReport"]

_FIELDS = ("command", "parameters", "metrics", "seed", "library_version")


def _check_finite(value, where):
    if isinstance(value, bool):
        return
    if isinstance(value, (int, float)):
        if not math.isfinite(value):
            raise ValueError(f"metric {where} is not finite: {value!r}")
    elif isinstance(value, (list, tuple)):
        for k, item in enumerate(value):
            _check_finite(item, f"{where}[{k}]")
    elif isinstance(value, dict):
        for key, item in value.items():
            _check_finite(item, f"{where}.{key}")
    elif not isinstance(value, (str, type(None))):
        raise ValueError(f"metric {where} has unsupported type {type(value).__name__}")


class RunReport:
    """One experiment run: command, parameters, metrics, seed, version."""

    def __init__(self, command, parameters, metrics, seed, library_version=None):
        _check_finite(metrics, "metrics")
        self.command = str(command)
        self.parameters = dict(parameters)
        self.metrics = dict(metrics)
        self.seed = int(seed)
        self.library_version = (
            __version__ if library_version is None else str(library_version)
        )

    def as_dict(self):
        return {
            "command": self.command,
            "parameters": self.parameters,
            "metrics": self.metrics,
            "seed": self.seed,
            "library_version": self.library_version,
        }

    def to_json(self):
        return json.dumps(self.as_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text):
        data = json.loads(text)
        missing = [f for f in _FIELDS if f not in data]
        if missing:
            raise ValueError(f"report is missing fields: {missing}")
        return cls(
            command=data["command"],
            parameters=data["parameters"],
            metrics=data["metrics"],
            seed=data["seed"],
            library_version=data["library_version"],
        )

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json() + "\n")

    @classmethod
    def load(cls, path):
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_json(fh.read())

    def __eq__(self, other):
        if not isinstance(other, RunReport):
            return NotImplemented
        return self.as_dict() == other.as_dict()

    def __repr__(self):
        return f"RunReport(command={self.command!r}, metrics={sorted(self.metrics)})"
