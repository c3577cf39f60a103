"""Exception hierarchy for gpt-spectra."""


class GPTSpectraError(Exception):
    """Base class for every error raised by the package."""


class ConfigError(GPTSpectraError, ValueError):
    """Invalid run configuration or model specification."""


class DimensionMismatch(GPTSpectraError, ValueError):
    """Vectors or maps of incompatible dimension were combined."""


class OutOfRange(GPTSpectraError, ValueError):
    """A pairing fell outside [0, 1] by more than the clamp tolerance."""


class LPNumericalFailure(GPTSpectraError, RuntimeError):
    """The LP solver did not converge."""


class NotAState(GPTSpectraError, ValueError):
    """A vector failed the cone membership oracle."""


class InvalidAxis(GPTSpectraError, ValueError):
    """A planar model was given non-positive or non-convex parameters."""


class DegenerateInput(GPTSpectraError, ValueError):
    """Polytope vertices are not full-dimensional."""

    def __init__(self, message: str, affine_hull=None, facets=None):
        super().__init__(message)
        self.affine_hull = affine_hull
        self.facets = facets


class SingularInnerProduct(GPTSpectraError, ValueError):
    """The supplied inner-product matrix is singular."""


class NotInCone(GPTSpectraError, ValueError):
    """The input is not an element of the cone."""


class DecompositionUnavailable(GPTSpectraError, ValueError):
    """No decomposition into perfectly distinguishable pure states exists."""


class AsymmetricFunction(GPTSpectraError, ValueError):
    """A functional changed value under a permutation of its argument."""


class EnumerationBudgetExceeded(GPTSpectraError, RuntimeError):
    """An enumeration exceeded its configured budget."""


class NegativeEntry(GPTSpectraError, ValueError):
    """A matrix entry is negative beyond tolerance."""


class NotFineGrained(GPTSpectraError, ValueError):
    """An effect is not proportional to an atomic effect."""


class NotProjective(GPTSpectraError, ValueError):
    """No filter exists for the requested face."""


class NotAtomic(GPTSpectraError, ValueError):
    """The effect is not atomic."""


class NotPure(GPTSpectraError, ValueError):
    """The state is not pure."""


class LatticeTooLarge(GPTSpectraError, RuntimeError):
    """The face lattice is too large (or not enumerable) for this model."""


class NotABasis(GPTSpectraError, ValueError):
    """The atomic effects supplied do not form a basis of the dual space."""


class ModelUnsupported(GPTSpectraError, ValueError):
    """The model does not implement the requested primitive."""


class GridOutOfBounds(GPTSpectraError, ValueError):
    """A Riemann grid does not bracket [-||a||, ||a||]."""


class FiltersIncomplete(GPTSpectraError, ValueError):
    """Filter units do not add up to the order unit."""


class NoReversibleMap(GPTSpectraError, ValueError):
    """The model's reversible group does not connect the requested states."""
