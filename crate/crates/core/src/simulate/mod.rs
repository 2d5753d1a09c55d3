//! Synthetic data: archetype agents and the AAI-3 to AAI-5 progression.

mod archetype;
mod progression;

pub use archetype::{
    archetype_battery, simulate_archetype, simulate_archetypes, Archetype, ArchetypeSpec, SimulatedArchetype, ARCHETYPE_FAMILIES,
    PERSISTENCE_LAGS,
};
pub use progression::{
    rate_escape_hit, simulate_progression, ProgressionPoint, ProgressionResult, ProgressionSpec, ProgressionStatus, RateEscape,
};
