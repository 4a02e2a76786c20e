"""Exact fixed-precision laboratory for p-adic integer dynamics.

Arithmetic and carry-free digit operations on Z/p**K, tower-compatible
function tables with three equivalent invertibility criteria, the four
parametric automorphism families with an independent enumeration oracle,
and position-wise cipher models with a homomorphic-evaluation demo.
"""

from .core import (
    ContextMismatch,
    PadicInt,
    PrimeContext,
    UnitDecomposition,
    exp_p,
    inverse_unit,
    is_prime,
    ln_p,
    padic_from_json,
    pow_unit,
    teichmuller,
    unit_decompose,
)
from .lipschitz import (
    CompatibilityViolation,
    CriterionReport,
    LipschitzFn,
    SubfunctionTable,
    VdpSeries,
    compose,
    coordinate_subfunctions,
    fn_from_json,
    fn_to_json,
    is_bijective_mod,
    iter_all_lipschitz,
    preserves_measure_coord,
    preserves_measure_vdp,
    random_lipschitz,
    random_measure_preserving,
    series_from_json,
    vdp_inverse,
    vdp_transform,
)
from .automorph import (
    AND,
    AddSpec,
    AndSpec,
    AutSpec,
    CustomOp,
    GReport,
    HomReport,
    MulSpec,
    Operation,
    PLUS,
    TIMES,
    XOR,
    XorSpec,
    analyze_custom_op,
    aut_spec_from_json,
    aut_spec_to_json,
    compose_mul,
    is_automorphism,
    is_homomorphism,
    operation_by_name,
    realize,
)
from .oracle import (
    BudgetExceeded,
    EnumerationResult,
    OPERATION_PAIRS,
    PairReport,
    SetComparison,
    TrivialPairsReport,
    compare_with_family,
    enumerate_automorphisms,
    family_size,
    family_specs,
    family_tables,
    verify_trivial_pairs,
)
from .cipher import (
    CipherKey,
    HomomorphicDemo,
    KeystreamKey,
    Leaf,
    Node,
    SubstitutionKey,
    SubstitutionStreamKey,
    Word,
    decrypt,
    encrypt,
    eval_formula,
    formula_ops,
    formula_to_json,
    homomorphic_eval,
    key_from_json,
    model_fn,
    parse_formula,
    tau,
    tau_inverse,
    word_from_json,
    word_op,
)

__version__ = "0.1.0"
