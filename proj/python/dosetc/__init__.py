"""Event-triggered control under denial-of-service.

Certification of observer/controller gain sets, admissible attack
generation, guaranteed minimum inter-event times and closed-loop
simulation, backed by the C++ core.
"""

from dosetc._core import (
    ConfigError,
    certify,
    delta_min,
    generate_attack,
    simulate,
    synthesize_gains,
)

__all__ = [
    "ConfigError",
    "certify",
    "delta_min",
    "generate_attack",
    "simulate",
    "synthesize_gains",
]
