"""Consistent-histories engine: Born-rule probabilities for families of
quantum histories, consistency checks, and microscopic causes of
measurement outcomes."""

from .causes import (
    DEFAULT_THRESHOLD,
    CausalVerdict,
    Classification,
    Event,
    classify_cause,
    compare_intervention,
    conditional_probability,
    event,
    event_probability,
    find_causes,
    find_common_causes,
)
from .errors import (
    CHError,
    IncompletePDI,
    InconsistentFamily,
    MeaninglessConjunction,
    NonOrthogonal,
    NotAProjector,
    NotInFramework,
    ParseError,
    UndefinedConditional,
)
from .histories import (
    HistoryFamily,
    born_probability,
    chain_operator,
    check_consistency,
    decoherence_functional,
)
from .numerics import DEFAULT_EPS, Tolerance
from .projectors import (
    PDI,
    Framework,
    Projector,
    commutes,
    conjunction,
    framework_contains,
    generate_framework,
    incompatible,
    is_projector,
    projector_from_ket,
    validate_pdi,
)

__version__ = "0.1.0"
