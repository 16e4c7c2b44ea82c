from types import ModuleType

from kkspectra.scenarios import (
    casimir_table,
    collapse_sequence,
    cover_random,
    delta_v_bump,
    gauge_invariance,
    h0_table,
    holonomy_continuity,
    landau_k3,
    mosco_circle,
    quotient_submetry,
    ricci_crosscheck,
    voltage_c6,
)

# catalog order is the order of `--list` and of a full run
SCENARIOS: dict[str, ModuleType] = {
    m.NAME: m
    for m in (
        voltage_c6,
        cover_random,
        landau_k3,
        h0_table,
        ricci_crosscheck,
        collapse_sequence,
        holonomy_continuity,
        delta_v_bump,
        quotient_submetry,
        mosco_circle,
        casimir_table,
        gauge_invariance,
    )
}
