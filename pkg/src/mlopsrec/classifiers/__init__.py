from .base import TrainingMatrix, hamming, threshold_readout
from .forest import RandomForestModel, fit_forest
from .knn import KnnModel, fit_knn
from .persist import ModelFormatError, dumps_model, load_model, loads_model, save_model
from .tree import DecisionTreeModel, fit_tree, gini


def predict_tree(model: DecisionTreeModel, vector):
    return model.predict(vector)


def predict_forest(model: RandomForestModel, vector):
    return model.predict(vector)


def predict_knn(model: KnnModel, vector):
    return model.predict(vector)


__all__ = [
    "DecisionTreeModel", "KnnModel", "ModelFormatError", "RandomForestModel", "TrainingMatrix",
    "dumps_model", "fit_forest", "fit_knn", "fit_tree", "gini", "hamming", "load_model", "loads_model",
    "predict_forest", "predict_knn", "predict_tree", "save_model", "threshold_readout",
]
