"""Sparse PCA via ADMM, tensor-mode image reduction, and recognition benchmarks."""

from .admm import (
    AdmmParams,
    CenteredData,
    SparsePcaModel,
    auto_rho,
    center,
    deflate,
    extract_component,
    fit,
    soft_threshold,
    transform,
    x_update,
    y_update,
    z_update,
)
from .baselines import PcaModel, pca_fit, pca_transform
from .classifiers import (
    KrrModel,
    KrrParams,
    LabeledFeatures,
    krr_fit,
    krr_predict,
    krr_predict_batch,
    median_sigma,
    nn_classify,
    nn_classify_batch,
    rbf_kernel,
)
from .data import (
    Dataset,
    load_csv_dataset,
    load_csv_matrix,
    load_pgm_dir,
    save_csv_dataset,
    save_csv_matrix,
    save_pgm_dir,
    synth_blobs,
)
from .errors import (
    BadPixelCount,
    DegenerateComponent,
    InconsistentDimensions,
    MaxIterExceeded,
    MissingLabel,
    ModelFormatError,
    NonContiguousLabels,
    NotPositiveDefinite,
    ParseError,
    PgmFormatError,
    RankWarning,
    ShapeMismatch,
    SolveFailure,
    TenspcaError,
)
from .experiment import (
    ClassifierSpec,
    CsvSource,
    ExperimentConfig,
    ResultRow,
    SynthSource,
    VariantSpec,
    config_from_dict,
    config_from_json,
    format_results_tsv,
    run_experiment,
    write_results_tsv,
)
from .metrics import EvalReport, evaluate
from .model_io import load_model, save_model
from .pipeline import (
    TensorPcaConfig,
    apply_mode,
    per_person_mode3,
    reduce_mode,
    tensor_sparse_pca,
    tensor_sparse_pca_train_test,
)
from .tensor import (
    check_partition,
    flatten_image,
    merge_mode3,
    refold,
    slice_mode3,
    unfold,
)

__version__ = "0.1.0"
