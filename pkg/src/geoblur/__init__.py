"""geoblur: no-reference blur features and batch triage for survey imagery.

Three per-image sharpness features (gradient clear coefficient, SVD blur
degree, FFT clear estimate), synthetic shift/spin blur generation, threshold
and linear-SVM classification, and a deterministic batch CLI.
"""

__version__ = "0.1.0"

from .blur import BlurKind, BlurSpec, shift_blur, spin_blur, synth_corpus
from .classify import (
    ExtractionParams,
    FeatureVector,
    LinearModel,
    ThresholdRule,
    fit_scaler,
    parse_rule,
    predict,
    threshold_classify,
    train_linear_svm,
)
from .fft import Spectrum, clear_estimate, fft2_shifted_magnitude, spectrum_log_view
from .gradient import (
    GradientField,
    GradientHistograms,
    clear_coefficient,
    gradient_field,
    gradient_histograms,
)
from .image import (
    FloatPlane,
    GrayImage,
    decode_to_gray,
    downscale,
    encode_png,
    from_float,
    to_float,
)
from .svd import (
    SingularSpectrum,
    blur_degree,
    lowrank_plane,
    lowrank_reconstruct,
    singular_values,
)

__all__ = [
    "__version__",
    "BlurKind",
    "BlurSpec",
    "ExtractionParams",
    "FeatureVector",
    "FloatPlane",
    "GradientField",
    "GradientHistograms",
    "GrayImage",
    "LinearModel",
    "SingularSpectrum",
    "Spectrum",
    "ThresholdRule",
    "blur_degree",
    "clear_coefficient",
    "clear_estimate",
    "decode_to_gray",
    "downscale",
    "encode_png",
    "fft2_shifted_magnitude",
    "fit_scaler",
    "from_float",
    "gradient_field",
    "gradient_histograms",
    "lowrank_plane",
    "lowrank_reconstruct",
    "parse_rule",
    "predict",
    "shift_blur",
    "singular_values",
    "spectrum_log_view",
    "spin_blur",
    "synth_corpus",
    "threshold_classify",
    "to_float",
    "train_linear_svm",
]
