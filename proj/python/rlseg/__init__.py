"""Recurrent level-set segmentation engine."""

from _rlseg import (  # noqa: F401
    EnergyWeights,
    EvolutionConfig,
    Model,
    RlsegError,
    chan_vese_segment,
    dice,
    dirac,
    edt,
    generate_phantom,
    hausdorff95,
    heaviside,
    initialize_phi,
    load_model,
    segment,
    sensitivity,
    specificity,
    to_levelset,
)

__all__ = [
    "EnergyWeights", "EvolutionConfig", "Model", "RlsegError",
    "chan_vese_segment", "dice", "dirac", "edt", "generate_phantom",
    "hausdorff95", "heaviside", "initialize_phi", "load_model", "segment",
    "sensitivity", "specificity", "to_levelset",
]
