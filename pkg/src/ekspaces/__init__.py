"""Eschenburg-Kruggel spaces: enumeration, exact and arbitrary-precision
invariants, and oriented homeomorphism / diffeomorphism classification."""

from .exact import CoprimalityTable, coprime, ext_gcd, mod_inverse, sym_poly, sym_residue
from .invariants import (
    IntegerInvariants,
    integer_invariants,
    invariant_p1,
    invariant_r,
    invariant_s,
    linking_form,
)
from .kreck_stolz import (
    KSResult,
    LensSpace,
    ModOneReal,
    PrecisionConfig,
    ks_invariants,
    ks_q,
    ks_w,
    lens_s1,
    lens_s2,
    make_lens,
)
from .params import (
    ConditionCWitness,
    DifferenceMatrix,
    ParamPair,
    SymmetryElement,
    apply_symmetry,
    canonical_form,
    condition_c,
    difference_matrix,
    is_admissible,
    is_free,
    make_params,
    normalize_for_kruggel,
)
from .rationals import RationalInvariant, cf_convergents, rationalize
from .search import SearchBox, enumerate_box, growth_counts

__version__ = "0.1.0"
