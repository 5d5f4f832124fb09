"""Exception hierarchy.

Every numerical failure raised by the package derives from
:class:`HalfInverseError`. The pipeline stamps ``step`` with the stage of the
half-inverse algorithm (1-5) at which the failure surfaced.
"""


class HalfInverseError(Exception):
    step = None

    def __str__(self):
        msg = super().__str__()
        if self.step is not None:
            return f"[step {self.step}] {msg}"
        return msg


class NonFiniteState(HalfInverseError):
    pass


class GridTooCoarse(HalfInverseError):
    pass


class WronskianMismatch(HalfInverseError):
    pass


class BracketFailure(HalfInverseError):
    def __init__(self, index, msg=""):
        self.index = index
        super().__init__(f"no eigenvalue bracket for index {index}" + (f": {msg}" if msg else ""))


class TooShort(HalfInverseError):
    pass


class NearZeroDenominator(HalfInverseError):
    pass


class IllConditioned(HalfInverseError):
    pass


class PoleProximity(HalfInverseError):
    pass


class NonPositiveNorming(HalfInverseError):
    pass


class SingularGLSystem(HalfInverseError):
    pass


class DenominatorUnderflow(HalfInverseError):
    pass
