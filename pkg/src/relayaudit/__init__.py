"""Byzantine attack detection toolkit for a two-relay network with no
clean reference: channel simulation, destination-side decision statistics
and non-manipulability auditing."""

from .attacks import (
    AlternatingAttack,
    AttackSpec,
    FixedPermutation,
    Identity,
    IidAttack,
    MarkovJammer,
    PermutationShift,
    apply_attack,
    jammer_stationary_check,
    stationarity_diagnostic,
)
from .core import (
    Alphabet,
    ObservationChannel,
    Pmf,
    StochasticMatrix,
    expected_output_pmf,
    joint_pmf_from_product,
    kron,
    pair_index,
    pair_pack,
    pair_unpack,
    unpair_index,
)
from .detect import (
    AttackTypeEstimate,
    Decision,
    DetectionVerdict,
    classify,
    decision_statistic,
    estimate_attack_types,
)
from .empirics import (
    ConditionalType,
    conditional_type,
    count,
    empirical_pmf,
    factorization_gap,
    joint_conditional_type,
)
from .manipulability import (
    Inconclusive,
    Manipulable,
    ManipulabilityVerdict,
    NonManipulable,
    SolverError,
    build_certificate_lp,
    check,
    search_witness,
    solve_lp,
    verify_witness,
)
from .runner import (
    ScenarioConfig,
    TrialRecord,
    empirical_cdf,
    ks_two_sample,
    run_scenario,
)
from .simulate import NetworkSpec, NetworkTrace, RngStream, run_network, sample_iid, sample_through

__all__ = [name for name in dir() if not name.startswith("_")]
