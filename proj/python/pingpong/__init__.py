from ._core import (
    CoherenceBreak,
    ControlMode,
    Eavesdropper,
    StateVector,
    analytic_pdet,
    bob_decode,
    cpbs,
    dense_encode,
    empirical_pdet,
    initial_state,
    make_attack,
    make_control,
    reduced_density,
    run_experiments,
    run_session,
    trace_distance,
    wilson_interval,
)

__all__ = [
    "CoherenceBreak",
    "ControlMode",
    "Eavesdropper",
    "StateVector",
    "analytic_pdet",
    "bob_decode",
    "cpbs",
    "dense_encode",
    "empirical_pdet",
    "initial_state",
    "make_attack",
    "make_control",
    "reduced_density",
    "run_experiments",
    "run_session",
    "trace_distance",
    "wilson_interval",
]
