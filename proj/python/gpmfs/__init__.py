"""Global + personalized multi-label feature selection."""

from ._gpmfs import (
    ArgumentError,
    Dataset,
    FeatureSelection,
    FoldAssignment,
    HyperParams,
    IoError,
    NumericError,
    ParseError,
    PipelineResult,
    SolverState,
    StandardizationParams,
    ValidationError,
    __version__,
    apply_standardizer,
    average_precision,
    average_ranks,
    bonferroni_dunn_cd,
    compute_metrics,
    cross_validate,
    fit_standardizer,
    friedman_statistic,
    hamming_loss,
    kfold_split,
    knn_affinity,
    laplacian,
    macro_f1,
    micro_f1,
    mlknn_predict,
    one_error,
    parse_arff,
    parse_csv,
    parse_label_xml,
    pearson_matrix,
    personalized_features,
    rank_global,
    rank_table,
    run_pipeline,
    select_features,
    select_rows,
    solve,
    to_arff,
    to_csv,
    two_stage_knn_predict,
)


def load_arff(path, xml=None, label_count=None):
    """Load an ARFF dataset, naming labels via a Mulan XML file or a trailing
    attribute count (exactly one of the two)."""
    if (xml is None) == (label_count is None):
        raise ValueError("provide exactly one of xml or label_count")
    with open(path, "r", encoding="utf-8") as handle:
        text = handle.read()
    if xml is not None:
        with open(xml, "r", encoding="utf-8") as handle:
            labels = parse_label_xml(handle.read())
        return parse_arff(text, labels)
    return parse_arff(text, label_count)


def load_csv(path, label_count):
    """Load a CSV dataset whose trailing label_count columns are labels."""
    with open(path, "r", encoding="utf-8") as handle:
        return parse_csv(handle.read(), label_count)
