from matrep.evaluation.cluster import spectral_cluster, spectral_cluster_affinity, stratified_subsample
from matrep.evaluation.knn import knn_classify, train_test_split
from matrep.evaluation.metrics import (
    ContingencyTable,
    ari,
    cluster_report,
    f1_scores,
    mutual_info,
    nmi,
    pearson,
    purity,
)
from matrep.evaluation.sts import StsPair, load_sts, sts_evaluate

__all__ = [
    "ContingencyTable",
    "StsPair",
    "ari",
    "cluster_report",
    "f1_scores",
    "knn_classify",
    "load_sts",
    "mutual_info",
    "nmi",
    "pearson",
    "purity",
    "spectral_cluster",
    "spectral_cluster_affinity",
    "stratified_subsample",
    "sts_evaluate",
    "train_test_split",
]
