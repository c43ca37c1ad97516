from .config import WaveletPipelineConfig
from .filters import WaveletBasis, daubechies_scaling_filter, get_basis
from .pipeline import ThresholdReport, denoise, quantify
from .threshold import RuleAssignment, noise_sigma, shrink, threshold_level
from .transform import WaveletCoeffs, dwt, idwt
