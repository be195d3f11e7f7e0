"""Model description files.

A model file is a JSON document; complex numbers are always [re, im] pairs:

    {
      "dim": 2, "factors": 2, "tol": 1e-10,
      "observables": [{"name": "sz", "matrix": [[[1, 0], [0, 0]], [[0, 0], [-1, 0]]]}],
      "composite": {"name": "A", "factors": ["sz", "sz"]},
      "vectors": [{"name": "l1", "coords": [[1, 0], [0, 0]]}],
      "suites": ["identification", "spectral"],
      "expressions": [{"expr": "<l1|l1>", "expected": [1, 0]}]
    }

Observables are dim x dim (one factor) or dim**factors square (whole tensor
space). Vectors have length dim or dim**factors. Without a "composite" entry
the factor observables are used in order when there are exactly `factors` of
them, otherwise the first one is repeated on every factor.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any, Union

import numpy as np
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    StrictFloat,
    StrictInt,
    ValidationError,
    field_validator,
    model_validator,
)

from .config import DEFAULT_TOL, ModelConfig
from .errors import BraketError, ConfigError
from .evaluator import Bindings, is_reserved
from .hilbert import HilbertVector
from .observable import CompositeObservable, FactorObservable, TensorOperator, compose_observable
from .tensor import TensorVector

log = logging.getLogger(__name__)

# JSON numbers only: strings and booleans are rejected
Real = Union[StrictInt, StrictFloat]
Pair = tuple[Real, Real]


class NamedMatrix(BaseModel):
    name: str
    matrix: list[list[Pair]]


class NamedVector(BaseModel):
    name: str
    coords: list[Pair]


class CompositeSpec(BaseModel):
    name: str = "A"
    factors: list[str] | None = None


class ExpressionCase(BaseModel):
    expr: str
    expected: Pair | None = None


class ModelFile(BaseModel):
    model_config = ConfigDict(extra="forbid")

    dim: int = Field(ge=1)
    factors: int = Field(ge=1)
    tol: float | None = Field(default=None, gt=0)
    observables: list[NamedMatrix] = []
    vectors: list[NamedVector] = []
    composite: CompositeSpec | None = None
    suites: list[str] = []
    expressions: list[ExpressionCase] = []

    @field_validator("expressions", mode="before")
    @classmethod
    def _bare_strings(cls, value: Any) -> Any:
        if isinstance(value, list):
            return [{"expr": item} if isinstance(item, str) else item for item in value]
        return value

    @model_validator(mode="after")
    def _unique_names(self) -> ModelFile:
        names = [m.name for m in self.observables] + [v.name for v in self.vectors]
        if self.composite is not None:
            names.append(self.composite.name)
        seen: set[str] = set()
        for name in names:
            if name in seen:
                raise ValueError(f"duplicate name {name!r}")
            if is_reserved(name):
                raise ValueError(f"{name!r} is a reserved builtin name")
            seen.add(name)
        return self


@dataclass(frozen=True)
class LoadedModel:
    """A validated model file with its values built."""
    spec: ModelFile
    config: ModelConfig
    observables: dict[str, Union[FactorObservable, TensorOperator]]
    composite: CompositeObservable | None
    composite_name: str
    vectors: dict[str, Union[HilbertVector, TensorVector]]
    source: str = "<model>"

    @property
    def bindings(self) -> Bindings:
        values: dict[str, Any] = {**self.observables, **self.vectors}
        if self.composite is not None:
            values[self.composite_name] = self.composite
        return Bindings(values, composite=self.composite)


def _complex_array(rows) -> np.ndarray:
    arr = np.asarray(rows, dtype=np.float64)
    return arr[..., 0] + 1j * arr[..., 1]


def _build_observable(entry: NamedMatrix, config: ModelConfig) -> FactorObservable | TensorOperator:
    what = f"observable {entry.name!r}"
    if not entry.matrix or any(len(row) != len(entry.matrix) for row in entry.matrix):
        raise ConfigError(f"{what} is not a square matrix")
    matrix = _complex_array(entry.matrix)
    size = matrix.shape[0]
    if size == config.dim:
        return FactorObservable.from_matrix(matrix, tol=config.tol, name=what)
    if size == config.dense_dim:
        return TensorOperator.from_matrix(matrix, config.dim, config.factors, tol=config.tol, name=what)
    raise ConfigError(
        f"{what} is {size}x{size}; expected {config.dim}x{config.dim} or "
        f"{config.dense_dim}x{config.dense_dim}"
    )


def _build_vector(entry: NamedVector, config: ModelConfig) -> HilbertVector | TensorVector:
    coords = _complex_array(entry.coords) if entry.coords else np.zeros(0, dtype=np.complex128)
    if len(coords) == config.dim:
        return HilbertVector(coords)
    if len(coords) == config.dense_dim:
        return TensorVector.from_dense(coords, config.dim, config.factors)
    raise ConfigError(
        f"vector {entry.name!r} has {len(coords)} coordinates; expected {config.dim} or {config.dense_dim}"
    )


def _build_composite(spec: ModelFile, config: ModelConfig,
                     observables: dict[str, FactorObservable | TensorOperator]) -> CompositeObservable | None:
    factor_ops = {name: op for name, op in observables.items() if isinstance(op, FactorObservable)}
    if spec.composite is not None and spec.composite.factors is not None:
        names = spec.composite.factors
        if len(names) != config.factors:
            raise ConfigError(f"composite lists {len(names)} factor observables for a {config.factors}-factor model")
        for name in names:
            if name not in factor_ops:
                raise ConfigError(f"composite factor {name!r} is not a {config.dim}x{config.dim} observable")
    elif not factor_ops:
        return None
    elif len(factor_ops) == config.factors:
        names = list(factor_ops)
    else:
        first = next(iter(factor_ops))
        names = [first] * config.factors
    log.debug("composite observable from factors %s", names)
    return compose_observable([factor_ops[name] for name in names], tol=config.tol)


def build_model(spec: ModelFile, source: str = "<model>") -> LoadedModel:
    """Build observables, the composite observable and vectors from a validated file."""
    try:
        config = ModelConfig(dim=spec.dim, factors=spec.factors, tol=spec.tol or DEFAULT_TOL)
        observables = {entry.name: _build_observable(entry, config) for entry in spec.observables}
        vectors = {entry.name: _build_vector(entry, config) for entry in spec.vectors}
        composite = _build_composite(spec, config, observables)
    except BraketError as exc:
        raise ConfigError(f"{source}: {exc}") from exc
    composite_name = spec.composite.name if spec.composite is not None else "A"
    if composite is not None:
        for kind, names in (("an observable", observables), ("a vector", vectors)):
            if composite_name in names:
                raise ConfigError(f"{source}: composite name {composite_name!r} clashes with {kind}")
    return LoadedModel(spec, config, observables, composite, composite_name, vectors, source)


def parse_model(data: Any, source: str = "<model>") -> LoadedModel:
    try:
        spec = ModelFile.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(f"{source}: invalid model file\n{exc}") from exc
    return build_model(spec, source)


def load_model_file(path: str | Path) -> LoadedModel:
    """Load and validate a JSON model description.

    Raises ConfigError for unreadable files, malformed JSON, schema violations
    and non-Hermitian observables (the message names the observable).
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read model file {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON: {exc}") from exc
    model = parse_model(data, str(path))
    log.debug("loaded %s: dim=%d factors=%d", path, model.config.dim, model.config.factors)
    return model


def bundled_model(name: str = "two_qubit") -> LoadedModel:
    """Load a model shipped in braket_rhs/data."""
    resource = resources.files("braket_rhs") / "data" / f"{name}.json"
    if not resource.is_file():
        raise ConfigError(f"no bundled model named {name!r}")
    data = json.loads(resource.read_text(encoding="utf-8"))
    return parse_model(data, f"{name}.json")
