"""Probabilistic assignment with equal treatment of equals under general constraints."""
from .core import (
    AssumptionViolation,
    AuditReport,
    Problem,
    ProblemError,
    RankTable,
    audit_assumption1,
    audit_assumption2,
    partition_by_preference,
    require_assumptions,
)
from .efficiency import (
    EfficiencyReport,
    efficiency_report,
    is_ee,
    is_oe,
    is_re,
    pareto_efficient,
    rank_value,
    solve_re,
)
from .ete import Mode, check_ete, derived_set, ete_reassign, lemma1_marginal
from .feasibility import (
    INELIGIBLE,
    Cap,
    EnumerationBudgetExceeded,
    ExplicitSet,
    LinearCaps,
    PureAssignment,
    UnitDemandSimpleCapacity,
    check_general_upper_bounds,
    check_per_object_upper_bounds,
    enumerate_assignments,
    is_feasible,
    transform_min_quota,
)
from .lottery import Dominance, Lottery, Marginal, fosd, marginal, marginals, upper_cdf
from .mechanisms import (
    NotConsecutiveEquals,
    PriorityList,
    check_consecutive_equals,
    make_consecutive_equals,
    run_pipeline,
    serial_dictatorship,
)
from .strategy import (
    ManipulationFinding,
    ReportProfile,
    TableRule,
    find_manipulation,
    group_order,
    mechanism_f,
)

__version__ = "0.1.0"
