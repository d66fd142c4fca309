from .generators import (
    DeathCensor,
    gen_baseline,
    gen_death_censor,
    gen_recurrent,
    gen_recurrent_gap,
    gen_recurrent_inversion,
    gen_rmst_baseline,
    gen_rmst_case,
)
from .randomization import StratumKey, simple_randomize, spb_randomize, stratify
from .scenario import ScenarioSpec, load_scenario, simulate_trial
from .study import (
    ReplicateRecord,
    SummaryCell,
    SummaryTable,
    power_curve,
    run_replicate,
    run_study,
    summarize,
    tables_to_frame,
)

__all__ = [
    "DeathCensor",
    "ReplicateRecord",
    "ScenarioSpec",
    "StratumKey",
    "SummaryCell",
    "SummaryTable",
    "gen_baseline",
    "gen_death_censor",
    "gen_recurrent",
    "gen_recurrent_gap",
    "gen_recurrent_inversion",
    "gen_rmst_baseline",
    "gen_rmst_case",
    "load_scenario",
    "power_curve",
    "run_replicate",
    "run_study",
    "simple_randomize",
    "simulate_trial",
    "spb_randomize",
    "stratify",
    "summarize",
    "tables_to_frame",
]
