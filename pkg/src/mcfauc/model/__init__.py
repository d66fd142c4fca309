from .cohort import (
    AnalysisConfig,
    CenteredCovariates,
    Cohort,
    EventData,
    SubjectRecord,
    center_covariates,
    risk_set_count,
)
from .ingest import ingest_cohort, write_cohort

__all__ = [
    "AnalysisConfig",
    "CenteredCovariates",
    "Cohort",
    "EventData",
    "SubjectRecord",
    "center_covariates",
    "risk_set_count",
    "ingest_cohort",
    "write_cohort",
]
