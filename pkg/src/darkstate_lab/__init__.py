"""Dark states of two dissipatively coupled anharmonic oscillators: spectra, perturbation theory, dynamics."""

__version__ = "0.1.0"
