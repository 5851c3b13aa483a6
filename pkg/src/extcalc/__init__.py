"""extcalc: a workbench for extensions of finite algebraic structures.

Submodules group the functionality; the names re-exported here are the
stable entry points.

* terms / varieties   presentations, witnesses, the built-in algebra zoo
* algebra             finite algebras, homomorphisms, limits/colimits
* ses                 short exact sequences, retracts, pullbacks
* canonical           canonical forms and equivalence of one-step extensions
* enumext             enumeration of one-step extension classes
* longexact           length-n exact sequences and splicing
* resolution / syzygy exact-sequence reduction and the resolution oracle
* threebythree        3x3 diagrams, decomposition, double syzygies
* schreier            Schreier extensions of monoids
* io / cli            JSON formats and the batch command line
"""

from .algebra import (
    FiniteAlgebra,
    Homomorphism,
    cokernel,
    compose,
    congruence_closure,
    identity_hom,
    kernel,
    make_algebra,
    make_hom,
    normal_image_factorization,
    product,
    pullback,
    quotient,
    subalgebra,
    trivial_algebra,
)
from .canonical import CanonicalForm, are_equivalent, canonical_form
from .enumext import count_extension_tables, enumerate_ext1
from .errors import (
    ArityError,
    EndpointMismatchError,
    ExtcalcError,
    LimitExceededError,
    NotExactError,
    NotNormalError,
    ParseError,
    UnsupportedVarietyError,
    ValidationError,
    WitnessError,
)
from .limits import Limits, default_limits, parse_limits
from .longexact import (
    ExactSequence,
    sequence_from_ses,
    splice,
    validate_exact_sequence,
)
from .resolution import Resolution, build_resolution, ext_via_resolution, yoneda_class_of
from .schreier import (
    SchreierData,
    all_schreier_data,
    are_equivalent_schreier,
    canonical_form_schreier,
    check_sp_characterisation,
    enumerate_schreier,
    fiber_candidates,
    is_schreier,
    normalized_schreier_tables,
    schreier_data,
    schreier_retract,
)
from .ses import (
    RetractPair,
    Section,
    ShortExactSeq,
    is_central,
    pullback_ses,
    retract_maps,
    sections_of,
    split_ses,
    transport_ses,
    validate_ses,
)
from .syzygy import ClassifyResult, Syzygy, classify_extn, pullback_reduce, syzygy
from .terms import (
    SemiAbelianWitness,
    Signature,
    Term,
    VarietyPresentation,
    tapp,
    tvar,
    verify_witness,
)
from .threebythree import (
    ThreeByThree,
    decompose_3x3,
    double_syzygy,
    is_regular_pushout,
    make_3x3,
    reconstruct_3x3,
    reduce_2ext,
    validate_3x3,
)
from .varieties import (
    abelian_variety,
    group_variety,
    loop_variety,
    module_variety,
    monoid_variety,
    named_algebra,
    variety_by_name,
)

__version__ = "0.1.0"
