"""Python surface of the curriculum pipeline.

Everything is implemented in the C++ extension; this package re-exports
the bound names.
"""

from ddcur._core import (
    BinSpec,
    Cell,
    ConfigError,
    DdfModel,
    DistancePair,
    Episode,
    EnvSpec,
    ExperimentConfig,
    GoalEnv,
    GoalGenConfig,
    GoalSample,
    GoalSource,
    GridNavEnv,
    HerConfig,
    IoError,
    Method,
    MetricsRow,
    PointReachEnv,
    QAgent,
    QAgentConfig,
    ReplayBuffer,
    Rng,
    RunMetrics,
    RunResult,
    Transition,
    bin_of,
    build_pair_dataset,
    evaluate,
    exact_bin_accuracy,
    generate_goal,
    goal_distance,
    load_config_file,
    load_ddf_file,
    make_bin_spec,
    parse_config,
    predict_bin,
    run_training,
    save_ddf_file,
    serialize_config,
    sparse_reward,
    steps_to_sustained_threshold,
    steps_to_threshold,
    train_ddf,
    write_run_files,
)

__all__ = [name for name in dir() if not name.startswith("_")]
