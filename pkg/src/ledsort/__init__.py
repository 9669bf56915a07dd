"""ledsort: colorimetry, LED bin screens and selection-line simulation."""

from .binning import (
    REJECT,
    Bin,
    BinAssignment,
    BinScreen,
    Diagnostic,
    LuminanceClass,
    NonRectangularBin,
    OutOfGamutDomain,
    build_grid_screen,
    classify,
    refine_screen,
    uniformity_report,
    validate_screen,
)
from .cmf import CmfTable, Observer, cmf_table, load_cmf_table
from .colorimetry import (
    ChromaticityXY,
    EmptyOverlap,
    Tristimulus,
    ZeroTristimulus,
    chromaticity,
    luminous_value,
    tristimulus,
)
from .ellipses import (
    MacAdamEllipse,
    in_ellipse,
    load_ellipses,
    macadam_1942_ellipses,
    macadam_steps,
    nearest_ellipse,
)
from .instrument import (
    DirectInstrumentModel,
    LedModel,
    LedSample,
    LotVariation,
    SpectralInstrumentModel,
    make_batch,
    measure_direct,
    measure_spectral,
    synth_spectrum,
)
from .linesim import (
    Carousel,
    Compartment,
    ConfigError,
    Fixed,
    InfiniteRate,
    LedRecord,
    Mode,
    ModeConfig,
    NeverBreaksEven,
    Normal,
    Recommendation,
    SortEngine,
    SortReport,
    StationTimings,
    Uniform,
    automated_config,
    breakeven,
    capacity,
    carousel_for_screen,
    default_automated_timings,
    default_manual_timings,
    manual_config,
    run,
)
from .spectra import InvalidSpd, SpectralPowerDistribution, monochromatic_line

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
