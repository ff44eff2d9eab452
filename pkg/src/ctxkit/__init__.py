"""Contextuality analysis over finite measurement scenarios."""

from .contextuality import (
    ContextualityReport,
    contextuality_report,
    extend_section,
    global_sections,
    global_sections_bruteforce,
    is_logically_contextual,
    is_strongly_contextual,
)
from .errors import (
    CtxkitError,
    DegenerateBundleError,
    FormulaError,
    FragmentError,
    ModelError,
    ParseError,
    ResourceLimitError,
    ScenarioError,
)
from .examples import Example, example, example_names
from .inchworm import (
    DerivationTrace,
    EntailmentResult,
    FilterModel,
    InteriorResult,
    filtmm,
    inchworm_entails,
    is_filter_model,
    is_saturated,
    mm,
    ns_interior,
    spiral_demo,
    validate_trace,
)
from .logic import (
    Signature,
    Theory,
    denote,
    format_formula,
    free_vars,
    global_entails,
    in_fragment,
    parse_formula,
    satisfies,
    signature_for,
)
from .model import (
    BundleModel,
    PresheafModel,
    Section,
    empty_model,
    from_bundle,
    full_model,
    full_product,
    is_no_signalling,
    is_sheaf,
    is_subpresheaf,
    model_from_facet_sections,
    restrict_section,
    section_set_at,
    to_bundle,
)
from .scenario import (
    Domain,
    SimplicialComplex,
    complex_from_facets,
)
from .scenariofile import ScenarioFile, parse_scenario, render_scenario
from .xor_avn import (
    AvnCertificate,
    XorEquation,
    avn_certificate,
    extract_xor,
    global_consistency,
)

__version__ = "0.1.0"
