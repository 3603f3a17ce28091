"""Chest radiograph report labeling: annotations, scoring and the HANSO model."""

__version__ = "0.1.0"

from .annotation import (
    AnnotatedDocument,
    DocumentLabels,
    Entity,
    EntityType,
    LabelClass,
    Relation,
    Span,
    append_marker,
    parse_standoff,
    serialize_standoff,
    validate,
)
from .model import Hanso, HansoConfig
from .train import TrainConfig, train

__all__ = [
    "AnnotatedDocument",
    "DocumentLabels",
    "Entity",
    "EntityType",
    "Hanso",
    "HansoConfig",
    "LabelClass",
    "Relation",
    "Span",
    "TrainConfig",
    "append_marker",
    "parse_standoff",
    "serialize_standoff",
    "train",
    "validate",
]
