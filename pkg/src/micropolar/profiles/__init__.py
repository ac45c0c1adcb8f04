from .burgers import BurgersProfile, burgers_deriv, burgers_derivs, burgers_eval, burgers_gaps
from .selfsimilar import BVPError, SelfSimilarProfile, diffusion_coefficient, fit_tail_decay, solve_selfsimilar
from .waves import (
    CompositeWave,
    ContactWave,
    ProfileField,
    ProfileValues,
    RarefactionWave,
    build_composite,
    composite,
    contact_wave,
    smooth_rarefaction,
)

__all__ = [
    "BVPError",
    "BurgersProfile",
    "CompositeWave",
    "ContactWave",
    "ProfileField",
    "ProfileValues",
    "RarefactionWave",
    "SelfSimilarProfile",
    "build_composite",
    "burgers_deriv",
    "burgers_derivs",
    "burgers_eval",
    "burgers_gaps",
    "composite",
    "contact_wave",
    "diffusion_coefficient",
    "fit_tail_decay",
    "smooth_rarefaction",
    "solve_selfsimilar",
]
