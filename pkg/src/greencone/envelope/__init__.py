from .envelope import (
    Envelope,
    build_envelope,
    catalog_regime,
    default_I1,
    envelope_closed_form,
    envelope_numeric,
    minus_two_pi_switch,
    minus_two_pi_switch_closed_form,
    normalized,
)

__all__ = [
    "Envelope",
    "build_envelope",
    "catalog_regime",
    "default_I1",
    "envelope_closed_form",
    "envelope_numeric",
    "minus_two_pi_switch",
    "minus_two_pi_switch_closed_form",
    "normalized",
]
