"""Cell-free multigroup multicast max-min beamforming simulator."""

from ._core import (
    AlgoParams,
    CampaignSpec,
    ConfigError,
    DomainError,
    ScenarioConfig,
    cdf,
    load_config,
    pathloss_db,
    percentile,
    preset,
    run_campaign,
    run_trial,
    wrap_distance,
    __version__,
)

__all__ = [
    "AlgoParams",
    "CampaignSpec",
    "ConfigError",
    "DomainError",
    "ScenarioConfig",
    "cdf",
    "load_config",
    "pathloss_db",
    "percentile",
    "preset",
    "run_campaign",
    "run_trial",
    "wrap_distance",
    "__version__",
]
