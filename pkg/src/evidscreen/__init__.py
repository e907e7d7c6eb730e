"""Classifier-guided prioritization for title/abstract screening."""

from .classifier import (
    ClassifierModel,
    F1Report,
    Prediction,
    TrainConfig,
    TrainingSet,
    evaluate_f1,
    oversample,
    predict,
    priority_score,
    split_train_val,
    train,
    uncertainty,
)
from .corpus import (
    Corpus,
    DEFAULT_FILTERS,
    Document,
    ScreeningText,
    SentenceFilter,
    ingest,
    merge_title_abstract,
    preprocess,
)
from .engine import (
    LabelRecord,
    Phase,
    Project,
    ProjectConfig,
    rank_similarity,
    should_stop_screening,
    should_stop_training,
)
from .metrics import (
    HeIrCurve,
    ScreeningStats,
    build_curve,
    effort_saved,
    he_at_target,
    hours_saved,
    human_effort,
    inclusion_rate,
)
from .sampling import SamplingStrategy, sample

__version__ = "0.1.0"
