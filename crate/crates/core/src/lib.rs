//! Friction-aware potential energy map analysis for two-phalanx
//! tendon-pulley underactuated graspers.
//!
//! The library models a symmetric two-finger grasper closing on a disk. For
//! every object position it determines the static-equilibrium finger
//! configuration under Coulomb friction, the actuation work stored in the
//! system, and whether the contact wrenches can balance the object. On top
//! of those maps it classifies object trajectories (ejection, stable, caged),
//! scores designs for caging, evaluates a manipulation metric over families
//! of designs and actuation commands, and runs design-space sweeps.
//!
//! All numeric code is generic over the scalar type through [`scalar::Real`];
//! `f64` aliases for the main domain types are exported at the crate root.

pub mod caging;
pub mod contact_solver;
pub mod energy_map;
pub mod equilibrium;
pub mod error;
pub mod geom;
pub mod hull;
pub mod kinematics;
pub mod least_squares;
pub mod manipulation;
pub mod plot;
pub mod scalar;
pub mod sweep;

pub use error::GraspError;
pub use scalar::Real;

/// `f64` aliases for the domain types used by the sweep and CLI layers.
pub type GrasperDesign = kinematics::GrasperDesign<f64>;
pub type ObjectSpec = kinematics::ObjectSpec<f64>;
pub type PalmPoint = geom::Vec2<f64>;
pub type FingerConfig = kinematics::FingerConfig<f64>;
pub type ContactPoint = kinematics::ContactPoint<f64>;
pub type ActuationCommand = contact_solver::ActuationCommand<f64>;
pub type FingerSolution = contact_solver::FingerSolution<f64>;
pub type SolveOutcome = contact_solver::SolveOutcome<f64>;
pub type Wrench = equilibrium::Wrench<f64>;
pub type WrenchSet = equilibrium::WrenchSet<f64>;
pub type GridSpec = energy_map::GridSpec<f64>;
pub type EnergyMap = energy_map::EnergyMap<f64>;
pub type Trajectory = caging::Trajectory<f64>;
pub type CagingScore = caging::CagingScore<f64>;
pub type GrasperFamily = manipulation::GrasperFamily<f64>;
pub type PointHull = manipulation::PointHull<f64>;
