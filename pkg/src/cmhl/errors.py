"""Exception hierarchy.

Every error carries a machine-readable ``kind`` used by the CLI.
"""


class CMHLError(Exception):
    kind = "error"


class DomainError(CMHLError, ValueError):
    kind = "domain"


class PoleError(DomainError):
    kind = "pole"


class InvalidModulus(DomainError):
    kind = "invalid_modulus"


class GroupMismatch(CMHLError, ValueError):
    kind = "group_mismatch"


class NotACMType(DomainError):
    kind = "not_a_cm_type"


class NotCMField(DomainError):
    kind = "not_cm_field"


class UnsupportedCharacter(DomainError):
    kind = "unsupported_character"


class SingularSystem(CMHLError, ArithmeticError):
    kind = "singular_system"


class ZeroCharacterPairing(SingularSystem):
    kind = "zero_character_pairing"


class PrecisionTooLow(CMHLError, ValueError):
    kind = "precision_too_low"


class CalibrationFailed(CMHLError, RuntimeError):
    kind = "calibration_failed"
