"""Exact Nijenhuis and Haantjes torsions of (1,1)-tensor fields.

Everything is computed over exact rational functions: there is no floating
point anywhere in the core.  Submodules, bottom-up:

- :mod:`~haantjes.exprcore`: charts, rational functions, the expression grammar
- :mod:`~haantjes.geom`: vector fields, forms, tensors, Lie brackets and derivatives
- :mod:`~haantjes.torsion`: Nijenhuis, Haantjes and higher torsions
- :mod:`~haantjes.structures`: Magri-Lenard complexes, Poisson pairs, diagonalizability
- :mod:`~haantjes.wdvv`: WDVV equations and their Magri-Lenard complexes
- :mod:`~haantjes.chains`: symplectic-Haantjes structures and Stackel systems
"""
from .exprcore import Chart, RationalFn, eval_at, is_zero, parse_expr, partial
from .geom import (
    Bivector,
    OneForm,
    Tensor11,
    Tensor12,
    TwoForm,
    VectorField,
    d0,
    d1,
    lie_bracket,
    lie_derivative,
    potential_of_closed,
    rational_potential,
)
from .torsion import (
    BracketSpace,
    concomitant,
    haantjes,
    higher_haantjes,
    higher_nijenhuis,
    nijenhuis,
    torsion_of,
)
from .structures import (
    MLComplexSpec,
    PoissonPair,
    bihamiltonian_complex,
    compatible,
    diag_torsion_formula,
    diagnose_diagonalizability,
    is_poisson,
    verify_magri_lenard,
)
from .wdvv import WDVVProblem, hessian, ml_to_wdvv, wdvv_check, wdvv_to_ml
from .chains import (
    StackelSpec,
    SymplecticHaantjesSpec,
    canonical_poisson,
    cotangent_chart,
    lenard_haantjes_chain,
    stackel_build,
    verify_sympl_haantjes,
)
from .bundle import GeometryBundle, load_bundle

__all__ = [
    "Chart",
    "RationalFn",
    "eval_at",
    "is_zero",
    "parse_expr",
    "partial",
    "Bivector",
    "OneForm",
    "Tensor11",
    "Tensor12",
    "TwoForm",
    "VectorField",
    "d0",
    "d1",
    "lie_bracket",
    "lie_derivative",
    "potential_of_closed",
    "rational_potential",
    "BracketSpace",
    "concomitant",
    "haantjes",
    "higher_haantjes",
    "higher_nijenhuis",
    "nijenhuis",
    "torsion_of",
    "MLComplexSpec",
    "PoissonPair",
    "bihamiltonian_complex",
    "compatible",
    "diag_torsion_formula",
    "diagnose_diagonalizability",
    "is_poisson",
    "verify_magri_lenard",
    "WDVVProblem",
    "hessian",
    "ml_to_wdvv",
    "wdvv_check",
    "wdvv_to_ml",
    "StackelSpec",
    "SymplecticHaantjesSpec",
    "canonical_poisson",
    "cotangent_chart",
    "lenard_haantjes_chain",
    "stackel_build",
    "verify_sympl_haantjes",
    "GeometryBundle",
    "load_bundle",
]

__version__ = "0.1.0"
