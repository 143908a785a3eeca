"""Time-reversal MAC simulator for underwater acoustic networks."""

from ._trmac import (
    Cir,
    ConfigError,
    InvalidArgument,
    LinkId,
    NodePosition,
    ParseError,
    PhyConfig,
    Scenario,
    composite_response,
    correlation_sequence,
    cross_correlation,
    eta_threshold,
    generate_cir,
    load_arrivals,
    load_scenario,
    norm,
    normalized_cross_correlation,
    p_ili,
    p_isi,
    p_sig,
    parse_scenario,
    preset,
    preset_names,
    run,
    sinr_atrsts,
    sinr_sdt,
    tr_waveform,
)

__all__ = [name for name in dir() if not name.startswith("_")]
