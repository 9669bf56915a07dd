import numpy as np
import pytest

from ledsort import (
    LedModel,
    build_grid_screen,
    chromaticity,
    synth_spectrum,
    tristimulus,
)


def noiseless_chromaticity(model: LedModel):
    """True chromaticity of a lot model with variation switched off."""
    bare = LedModel(model.peak_wavelength_nm, model.fwhm_nm, model.peak_power)
    spd = synth_spectrum(bare, np.random.default_rng(0))
    return chromaticity(tristimulus(spd))


def screen_around(model: LedModel, nx: int = 3, ny: int = 3, cell: float = 0.005):
    """Grid screen centred on the model's true chromaticity."""
    xy = noiseless_chromaticity(model)
    return build_grid_screen(xy.x - nx * cell / 2, xy.y - ny * cell / 2, cell, cell, nx, ny)


@pytest.fixture
def green_led() -> LedModel:
    # Broad-band green: chromaticity ~(0.258, 0.438), far enough from the
    # locus that a centred grid screen stays inside the gamut.
    return LedModel(520.0, 120.0)


@pytest.fixture
def centered_screen(green_led):
    return screen_around(green_led)
