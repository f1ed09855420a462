//! Rooftop PV sampling and hourly energy profiles.

pub mod engine;
pub mod geometry;
pub mod samples;

pub use engine::{
    generate_profiles, hourly_energy, household_day, read_daily, read_hourly, time_invariant_set, write_daily,
    write_hourly, write_time_invariant, DailyRow, EnergyProfile, HourlyRow, Period, ProfileSet, Selection,
};
pub use geometry::{declination, tilt_factor, tilted_radiation, Azimuth, DegradationTable};
pub use samples::{sample_time_invariant, BuildingType, DecayParams, OrientationTable, PvConfig, TimeInvariantSamples};
