"""Shared errors and size guards for the quandle toolkit."""
import dataclasses
import enum
import logging
import os

logger = logging.getLogger(__name__)

GUARD_ENV = "QUANDLE_GUARD"


class Reason(enum.Enum):
    """Why a recognition or representation attempt came out negative."""

    OK = "OK"
    NOT_SEMIREGULAR = "NotSemiregular"
    NOT_ABELIAN = "NotAbelian"
    NOT_TINY = "NotTiny"
    UNBALANCED = "Unbalanced"
    CAP_EXCEEDED = "CapExceeded"
    NOT_LATIN = "NotLatin"
    NOT_MEDIAL = "NotMedial"
    INVALID = "Invalid"


class QuandleError(Exception):
    pass


class ConfigError(QuandleError):
    pass


class GuardExceeded(QuandleError):
    def __init__(self, guard, limit, value):
        self.guard = guard
        self.limit = limit
        self.value = value
        super().__init__(f"{guard} guard exceeded: {value} > {limit} (raise it with {GUARD_ENV}={guard}=...)")


class DegreeMismatch(QuandleError, ValueError):
    pass


class CapExceeded(QuandleError):
    def __init__(self, cap, size):
        self.cap = cap
        self.size = size
        super().__init__(f"closure grew past the cap of {cap} elements")


class NotAdmitted(QuandleError):
    def __init__(self, element):
        self.element = element
        super().__init__("closure element rejected by admission check")


class NonAbelianGroup(QuandleError):
    pass


class GroupMapError(QuandleError, ValueError):
    pass


class QuandleAxiomError(QuandleError):
    def __init__(self, violations):
        self.violations = list(violations)
        head = "; ".join(str(v) for v in self.violations[:3])
        more = f" (+{len(self.violations) - 3} more)" if len(self.violations) > 3 else ""
        super().__init__(f"not a quandle: {head}{more}")


class MeshAxiomError(QuandleError):
    def __init__(self, axiom, message):
        self.axiom = axiom
        super().__init__(f"{axiom} violated: {message}")


class NotRepresentable(QuandleError):
    def __init__(self, reason, witness=None):
        self.reason = reason
        self.witness = witness
        super().__init__(f"no semiregular extension representation: {reason.value}")


class NotQuasiAffine(NotRepresentable):
    pass


class DecomposableExtension(QuandleError, ValueError):
    pass


class PreconditionError(QuandleError, ValueError):
    pass


class QuandleFileError(QuandleError):
    def __init__(self, message, line=None):
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{message}")


class InputError(QuandleError, ValueError):
    """Bad command-line arguments or an unreadable input path."""


@dataclasses.dataclass(frozen=True)
class Guards:
    """Size limits for the exhaustive parts of the toolkit."""

    enumerate_order: int = 32
    brute_enumerate_order: int = 6
    oracle_order: int = 8
    automorphism_order: int = 256
    max_automorphisms: int = 200_000

    @classmethod
    def from_env(cls, environ=None):
        environ = os.environ if environ is None else environ
        raw = environ.get(GUARD_ENV, "").strip()
        if not raw:
            return cls()
        return cls.parse(raw)

    @classmethod
    def parse(cls, raw):
        names = {f.name for f in dataclasses.fields(cls)}
        overrides = {}
        for item in raw.split(","):
            item = item.strip()
            if not item:
                continue
            if "=" in item:
                name, _, value = item.partition("=")
                name = name.strip()
            else:
                name, value = "enumerate_order", item
            if name not in names:
                raise ConfigError(f"unknown guard {name!r} in {GUARD_ENV}")
            try:
                overrides[name] = int(value)
            except ValueError:
                raise ConfigError(f"guard {name} needs an integer, got {value!r}")
            if overrides[name] < 0:
                raise ConfigError(f"guard {name} must be non-negative")
        logger.debug("guards from %s: %s", GUARD_ENV, overrides)
        return cls(**overrides)

    def check(self, name, value):
        limit = getattr(self, name)
        if value > limit:
            raise GuardExceeded(name, limit, value)


def resolve_guards(guards=None):
    return Guards.from_env() if guards is None else guards
