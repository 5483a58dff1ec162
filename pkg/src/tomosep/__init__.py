"""Positive-map calculus, unitary spin tomograms and a tomographic separability test."""

from .channels import (
    ChannelReport,
    KrausMap,
    MomentMap,
    build_moment_map,
    compose,
    contraction_kappa,
    decohered_mixture,
    depolarizing,
    entanglement_breaking,
    kraus_apply,
    kraus_superop,
    moment_determinant,
    phase_damping,
    purify,
    random_unitary_mix,
)
from .config import Tolerances, get_tolerances, tolerances
from .linmap import (
    DensityMatrix,
    Superoperator,
    action_superop,
    eig_hermitian,
    haar_unitary,
    hs_distance,
    real_embed,
    real_unembed,
    sqrt_distance,
    unvec,
    vec,
)
from .separability import (
    SubsystemMapEnsemble,
    WitnessResult,
    ensemble_superop,
    generalized_werner,
    multipartite_depolarize,
    partial_transpose,
    peres_test,
    qutrit_pair,
    werner_state,
    witness_F,
    witness_scan,
    x_state_check,
)
from .tomography import (
    SpinDirection,
    Tomogram,
    basic_symbols,
    positivity_test,
    reconstruct,
    spin_tomogram,
    tomographic_purity,
    unitary_tomogram,
)

__version__ = "0.1.0"

__all__ = [
    "Tolerances",
    "get_tolerances",
    "tolerances",
    "ChannelReport",
    "DensityMatrix",
    "KrausMap",
    "MomentMap",
    "SpinDirection",
    "SubsystemMapEnsemble",
    "Superoperator",
    "Tomogram",
    "WitnessResult",
    "action_superop",
    "basic_symbols",
    "build_moment_map",
    "compose",
    "contraction_kappa",
    "decohered_mixture",
    "depolarizing",
    "eig_hermitian",
    "ensemble_superop",
    "entanglement_breaking",
    "generalized_werner",
    "haar_unitary",
    "hs_distance",
    "kraus_apply",
    "kraus_superop",
    "moment_determinant",
    "multipartite_depolarize",
    "partial_transpose",
    "peres_test",
    "phase_damping",
    "positivity_test",
    "purify",
    "qutrit_pair",
    "random_unitary_mix",
    "real_embed",
    "real_unembed",
    "reconstruct",
    "spin_tomogram",
    "sqrt_distance",
    "tomographic_purity",
    "unitary_tomogram",
    "unvec",
    "vec",
    "werner_state",
    "witness_F",
    "witness_scan",
    "x_state_check",
]
