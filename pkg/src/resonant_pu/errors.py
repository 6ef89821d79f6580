"""Exception types raised across the package."""


class ResonantPUError(ValueError):
    """Base class for invalid-input errors."""


class DegenerateGap(ResonantPUError):
    """nu2 - Omega (or nu2 + Omega) is too close to zero."""


class InvalidSector(ResonantPUError):
    """Sector label outside {+1, -1}."""


class ComplexBranch(ResonantPUError):
    pass


class SingularSigma(ResonantPUError):
    pass


class ComplexFrequency(ResonantPUError):
    pass


class SingularMap(ResonantPUError):
    pass


class LabelMismatch(ResonantPUError):
    """Operators or states tagged with different variable pairs were combined."""


class GaussianMismatch(ResonantPUError):
    pass


class ChainDepthExceeded(ResonantPUError):
    pass


class ForbiddenRay(ResonantPUError):
    """c1 = -sqrt(2) c2, where the combined Hamiltonian coefficients blow up."""


class DegenerateEigenvalues(ResonantPUError):
    pass


class NonNormalizable(ResonantPUError):
    pass
