"""Three-body recombination and Efimov physics in a three-state 6Li Fermi gas."""

__version__ = "0.1.0"

from .dynamics import DecayModel, DecaySeries, evolve_numeric, number_analytic, synthesize
from .efimov import (
    UNIVERSAL,
    EfimovParams,
    UniversalConstants,
    binding_energy_at_unitarity,
    resonance_scattering_length,
    scaling_factors,
    trimer_width,
)
from .fitting import FitResult, chi_squared, fit_decay, fit_efimov
from .physconst import DEFAULT, PhysicalConstants, Quantity, convert
from .recombination import (
    effective_a,
    l3_equal_a,
    l3_max,
    l3_model_curve,
    l3_unitarized,
    scan_resonance_fields,
    threshold_temperature,
)
from .scattering import (
    ScatteringTable,
    ScatteringTriple,
    classify_universality,
    load_table,
    sample_table,
    scattering_at,
    vdw_length,
)
from .trapgas import (
    GasState,
    TrapConfig,
    density_squared_average,
    fermi_temperature,
    mean_frequency,
    peak_density,
    trap_frequencies,
)
