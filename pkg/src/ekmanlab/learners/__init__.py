"""From-scratch classifiers over sparse TF-IDF features."""

from .base import (
    DimensionError,
    LearnerError,
    TrainedLearner,
    as_csr,
    softmax,
    stratified_kfold,
)
from .boosting import GBTConfig, GBTModel, gbt_fit
from .forest import ForestConfig, ForestModel, forest_fit
from .logistic import (
    LogRegConfig,
    LogRegModel,
    logreg_fit,
    logreg_gradient,
    logreg_objective,
)
from .naive_bayes import NaiveBayesModel, NBConfig, nb_fit
from .svm import SVMConfig, SVMModel, platt_fit, svm_calibrate, svm_fit
from .tree import TreeConfig, TreeModel, tree_fit

__all__ = [
    "DimensionError",
    "LearnerError",
    "TrainedLearner",
    "as_csr",
    "softmax",
    "stratified_kfold",
    "GBTConfig",
    "GBTModel",
    "gbt_fit",
    "ForestConfig",
    "ForestModel",
    "forest_fit",
    "LogRegConfig",
    "LogRegModel",
    "logreg_fit",
    "logreg_gradient",
    "logreg_objective",
    "NBConfig",
    "NaiveBayesModel",
    "nb_fit",
    "SVMConfig",
    "SVMModel",
    "platt_fit",
    "svm_calibrate",
    "svm_fit",
    "TreeConfig",
    "TreeModel",
    "tree_fit",
    "predict_proba",
    "predict",
]


def predict_proba(model: TrainedLearner, x):
    """Kind-dispatched probability distribution for one input."""
    import numpy as np

    return np.asarray(model.predict_proba(x))[0]


def predict(model: TrainedLearner, x) -> int:
    """Argmax label with lowest-index tie-break."""
    import numpy as np

    return int(np.argmax(predict_proba(model, x)))
