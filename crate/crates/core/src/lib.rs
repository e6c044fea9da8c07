//! Reduced-order wind turbine simulator with a fuzzy multi-region controller.
//!
//! The library models a variable-speed, collective-pitch turbine with four
//! states (rotor speed, blade pitch, tower fore-aft deflection and velocity)
//! and closes the loop with two gain-scheduled controllers: a generator-torque
//! law for partial load and a pitch law for full load. A fuzzy coupling
//! filter blends both laws into one dual-output controller so that region
//! transitions are bumpless. A disturbance observer reconstructs the rotor
//! effective wind speed used for scheduling and reference generation.
//!
//! The `windloop` binary exposes scenario simulation, batch runs, metrics
//! extraction and controller export on top of this crate.

pub mod aero;
pub mod blending;
pub mod config;
pub mod controller_file;
pub mod controllers;
pub mod error;
pub mod fuzzy;
pub mod log;
pub mod observer;
pub mod sim;
pub mod synthesis;
pub mod turbine;
pub mod wind;

pub use error::{Error, Result};
