"""Local structured output predictors trained with unlabeled data."""

from ._core import (
    ContractViolation,
    CapacityError,
    Dataset,
    DimensionError,
    Error,
    FoldResult,
    InvalidOutputError,
    LocalModel,
    NumericError,
    OutputSpace,
    ParseError,
    Results,
    SequenceSpace,
    Taxonomy,
    TrainReport,
    ValidationError,
    feature_dimension,
    fit,
    generate_synthetic,
    impute,
    joint_feature,
    load_dataset,
    load_model,
    loss,
    loss_augmented_argmax,
    predict,
    run_experiment,
    save_dataset,
)

__version__ = "0.1.0"
