"""Decision support for turbine brakepad maintenance.

Ships a portable boosted-tree risk model, exact per-prediction feature
contributions, similar-case retrieval, per-feature analyses, deployment KPI
tracking, and a REST service plus CLI that tie them together.
"""

__version__ = "0.1.0"

from .trees import (  # noqa: F401
    TreeEnsemble,
    TreeNode,
    gain_totals,
    load_model,
    load_model_file,
    predict_margin,
    predict_proba,
    save_model,
    save_model_file,
)
from .training import TrainParams, train_reference  # noqa: F401
from .shapley import ContributionSet, compare_rows, local_contributions, shapley_oracle  # noqa: F401
from .features import (  # noqa: F401
    FeatureCatalog,
    NamedContributions,
    TransformSpec,
    display_value,
    load_catalog_csv,
    load_transform_spec,
    to_interpretable,
    validate_catalog,
)
from .store import Dataset, EntityRow, ingest  # noqa: F401
from .synthetic import SyntheticParams, generate_synthetic  # noqa: F401
from .neighbors import DistanceConfig, Neighbor, nearest_neighbors  # noqa: F401
from .analysis import (  # noqa: F401
    BoxStats,
    ImportanceTable,
    feature_distribution,
    feature_scatter,
    global_importance,
)
from .kpi import (  # noqa: F401
    Alert,
    Decision,
    EventLog,
    KpiReport,
    Outcome,
    Window,
    baseline_report,
    kpi_alert_followup_rate,
    kpi_failures_vs_investigations,
    kpi_total_downtime,
    record_event,
)
from .config import AppConfig, load_config, load_runtime  # noqa: F401
