"""Sound zone control with parametric array loudspeaker (PAL) arrays.

Transfer tensors come from the quasilinear (virtual-source) model of
audio demodulation; drives are optimised for bright/dark acoustic
contrast and compared with a conventional loudspeaker (EDL) array.
"""

__version__ = "0.1.0"

from .acc import ContrastResult, acc_edl, acc_pal, acoustic_contrast, build_g_matrices
from .eigen import EigenPairResult, max_generalized_eigenpair
from .field import (
    GridPatch,
    QuadratureGrid,
    SourcePair,
    TransferTensor,
    UltrasoundFieldTable,
    assemble_edl_vector,
    assemble_pal_tensor,
    audio_pressure,
    render_field,
    ultrasound_field,
    virtual_source_density,
)
from .model import (
    ArrayGeometry,
    ConfigError,
    ExperimentConfig,
    FrequencyPlan,
    MediumParams,
    PerturbationSpec,
    QuadratureSpec,
    Zone,
    absorption_coefficient,
    load_config,
    validate_config,
)
from .robustness import RobustnessSummary, perturb_tensor, run_robustness_sweep
from .special import bessel_j0, bessel_y0, hankel1_0
