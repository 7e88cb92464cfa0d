"""Exception types raised across the geoblur package."""


class GeoblurError(Exception):
    """Base class for all geoblur errors."""


class UnsupportedFormat(GeoblurError):
    """Input bytes do not start with a recognized PNG/JPEG/TIFF signature."""


class CorruptStream(GeoblurError):
    """The decoder rejected the byte stream."""


class ZeroDimension(GeoblurError):
    """An image with a zero width or height was produced or requested."""


class NonFiniteValue(GeoblurError):
    """A float plane contains NaN or infinity where finite values are required."""


class ExtentTooLarge(GeoblurError):
    """Blur extent exceeds what the image dimensions or the blur kind allow."""


class ImageTooSmall(GeoblurError):
    """Image is smaller than the chosen gradient stencil requires."""


class ConvergenceFailure(GeoblurError):
    """Singular value iteration exceeded its iteration cap."""


class ZeroSpectrum(GeoblurError):
    """All singular values are zero; blur degree is undefined."""


class ZeroImage(GeoblurError):
    """Spectrum of an all-zero image; clear estimate is undefined."""


class EmptyTrainingSet(GeoblurError):
    """Fewer than two feature rows were supplied for scaler fitting."""


class SingleClassTraining(GeoblurError):
    """Training data does not contain both a clear and a blurry example."""


class NonFiniteLoss(GeoblurError):
    """Training produced a NaN/Inf loss or weight."""


class ParamMismatch(GeoblurError):
    """Feature extraction parameters differ between a model and the data."""


class PathNotFound(GeoblurError):
    """An input path given to the corpus scanner does not exist."""


class DegenerateFeatureWarning(UserWarning):
    """A feature had zero variance; its std was forced to 1 for scaling."""
