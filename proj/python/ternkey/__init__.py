"""BCH-polar fuzzy extractor for ternary ReRAM PUFs."""

from ._ternkey import (
    BchCode,
    CellMeasurementSet,
    DataError,
    EnrollmentRecord,
    FuzzyExtractor,
    IntegrityError,
    PolarCodeSpec,
    RegenResult,
    TernaryProfile,
    ber_sweep_csv,
    bhattacharyya_parameters,
    classify_cells,
    construct_frozen_set,
    decoder_compare_csv,
    extract_response,
    failure_mc_csv,
    flip_bits,
    polar_decode,
    polar_transform,
    read_measurement_csv,
    reference_response,
    render_svg,
    simulate_cells,
    wilson_upper_95,
    write_measurement_csv,
)

__all__ = [name for name in dir() if not name.startswith("_")]
