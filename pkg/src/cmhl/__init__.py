"""High-precision toolkit for CM abelian varieties with complex multiplication by
abelian CM fields: Dirichlet characters and L-values, CM types, the two height
routes, equivariant torsion on complex tori and integer relation detection."""

__version__ = "0.1.0"

from .arith import DEFAULT_CONTEXT, PrecisionContext
from .characters import DirichletCharacter, GroupFunction, SubfieldDescriptor, characters, unit_group
from .cmtypes import CMType, pairing, standard_type, validate_type
from .errors import CMHLError
from .heights import compare_routes, height_character_route, height_system_route
from .lfunctions import dirichlet_l, l_derivative_at_0
from .relation import logspan_member, pslq, rational_recover
from .torsion import TorsionInstance, torsion_closed_form, torsion_spectral_oracle

__all__ = [
    "CMHLError",
    "CMType",
    "DEFAULT_CONTEXT",
    "DirichletCharacter",
    "GroupFunction",
    "PrecisionContext",
    "SubfieldDescriptor",
    "TorsionInstance",
    "characters",
    "compare_routes",
    "dirichlet_l",
    "height_character_route",
    "height_system_route",
    "l_derivative_at_0",
    "logspan_member",
    "pairing",
    "pslq",
    "rational_recover",
    "standard_type",
    "torsion_closed_form",
    "torsion_spectral_oracle",
    "unit_group",
    "validate_type",
]
