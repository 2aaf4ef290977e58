"""Exception hierarchy.

Every error carries an ``exit_code`` used by the command-line front end:
1 for a mathematical failure, 2 for bad input, 3 for a resource cap.
"""
from __future__ import annotations


class KmatrixError(Exception):
    exit_code = 1

    def to_json(self) -> dict:
        out = {"error": type(self).__name__, "message": str(self), "exit_code": self.exit_code}
        for key in ("condition", "witness", "position", "violations", "endpoints"):
            val = getattr(self, key, None)
            if val is not None:
                out[key] = _plain(val)
        return out


def _plain(x):
    """Make numpy scalars and arrays JSON friendly."""
    if hasattr(x, "tolist"):
        return x.tolist()
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    return x


class MathFailure(KmatrixError):
    exit_code = 1


class InputError(KmatrixError):
    exit_code = 2


class ResourceError(KmatrixError):
    exit_code = 3


# ring validation --------------------------------------------------------
class AssociativityViolation(InputError):
    def __init__(self, i: int, j: int, k: int):
        super().__init__(f"(g{i} g{j}) g{k} != g{i} (g{j} g{k})")
        self.witness = (i, j, k)


class IdentityViolation(InputError):
    def __init__(self, i: int):
        super().__init__(f"identity law fails on generator g{i}")
        self.witness = (i,)


class OrderInconsistency(InputError):
    def __init__(self, i: int, j: int):
        super().__init__(f"product g{i} g{j} does not respect the additive orders")
        self.witness = (i, j)


class ShapeError(InputError):
    pass


class NotTwoSided(InputError):
    pass


class ParentMismatch(InputError):
    pass


class RingMismatch(InputError):
    pass


class NotAHomomorphism(InputError):
    pass


class NotIdempotent(InputError):
    pass


class ActionMismatch(InputError):
    pass


class ConditionsNotVerified(MathFailure):
    def __init__(self, violations):
        self.violations = list(violations)
        first = self.violations[0] if self.violations else {}
        super().__init__(f"pattern conditions fail: {first}")


class NotLinearlyExtended(InputError):
    pass


class NotPullback(MathFailure):
    pass


class NotMilnor(InputError):
    pass


class ChainBroken(InputError):
    def __init__(self, i: int):
        super().__init__(f"chain containment fails at position {i}")
        self.position = i


class HypothesisFailed(MathFailure):
    def __init__(self, condition: str, witness=None):
        super().__init__(condition if witness is None else f"{condition} (witness {witness})")
        self.condition = condition
        self.witness = witness


class UnknownRule(InputError):
    pass


class HypothesisSchemaMismatch(InputError):
    pass


class ModeConflict(InputError):
    pass


class ParseError(InputError):
    pass


class UnresolvedReference(InputError):
    pass


class SizeCapExceeded(ResourceError):
    def __init__(self, size: int, cap: int):
        super().__init__(f"size {size} exceeds cap {cap}")
        self.size = size
        self.cap = cap
