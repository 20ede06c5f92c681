from .estimators import (
    DEFAULT_MAX_EVENTS,
    DEFAULT_MAX_EVENTS_AT_ZERO,
    BusyPeriodOutcome,
    BusyPeriodSamples,
    CensoringWarning,
    Outcome,
    SimConfig,
    SimEstimate,
    WalkStepProbs,
    catastrophe_race,
    degenerate_sampler,
    embedded_step_probs,
    estimate_lt_mc,
    estimate_lt_time_domain,
    exponential_sampler,
    sample_busy_period,
    sample_busy_periods,
)
