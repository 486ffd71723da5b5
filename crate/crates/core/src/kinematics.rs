//! Grasper and object types, finger forward kinematics, and the vector-loop
//! closure residuals for disk contact on the proximal and distal links.
//!
//! Palm frame: origin midway between the finger bases, left base at
//! `(-w/2, 0)`, right base at `(+w/2, 0)`, `+y` pointing into the grasp
//! region. The fingers are mirror images across the y-axis. `theta1 = 0` is
//! fully open (proximal link pointing outward along the palm line),
//! `theta1 = pi` points inward, and `theta2 > 0` curls the distal link
//! toward the palm. All internal computations are carried out for a
//! canonical right finger and mirrored for the left, which makes the mirror
//! symmetry of every operation exact.

use serde::{Deserialize, Serialize};

use crate::error::GraspError;
use crate::geom::Vec2;
use crate::scalar::{c, Real};

pub const LOOP_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn mirrored(self) -> Self {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// Geometric and transmission parameters of one symmetric two-finger grasper.
///
/// Lengths are dimensionless design units, angles radians. The joint springs
/// `k_spring_1`/`k_spring_2` are carried for documentation only: they resolve
/// the free-space closing order (proximal before distal) but contribute zero
/// torque and zero energy everywhere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrasperDesign<T> {
    pub l1: T,
    pub l2: T,
    pub r1: T,
    pub r2: T,
    pub w: T,
    pub k_spring_1: T,
    pub k_spring_2: T,
    /// Closed interval of the proximal joint angle.
    pub theta1_limits: (T, T),
    /// Closed interval of the distal joint angle.
    pub theta2_limits: (T, T),
}

impl<T: Real> GrasperDesign<T> {
    /// Builds a design with the default joint limits `[0, pi]` and
    /// `[-5 deg, 90 deg]`.
    pub fn new(l1: T, l2: T, r1: T, r2: T, w: T) -> Result<Self, GraspError> {
        let design = Self {
            l1,
            l2,
            r1,
            r2,
            w,
            k_spring_1: T::zero(),
            k_spring_2: T::zero(),
            theta1_limits: (T::zero(), T::pi()),
            theta2_limits: (-c::<T>(5.0) * T::pi() / c(180.0), T::pi() / c(2.0)),
        };
        design.validate()?;
        Ok(design)
    }

    pub fn validate(&self) -> Result<(), GraspError> {
        if !(self.l1 > T::zero() && self.l2 > T::zero()) {
            return Err(GraspError::InvalidDesign("link lengths must be positive".into()));
        }
        if !(self.r1 > T::zero() && self.r2 > T::zero()) {
            return Err(GraspError::InvalidDesign("pulley radii must be positive".into()));
        }
        if self.w < T::zero() {
            return Err(GraspError::InvalidDesign("palm width must be non-negative".into()));
        }
        if self.r1 == self.r2 {
            // A unit transmission ratio puts the distal equilibrium contact
            // at infinity; such designs are excluded from the search space.
            return Err(GraspError::InvalidDesign("r1 must differ from r2".into()));
        }
        if !(self.theta1_limits.0 <= self.theta1_limits.1
            && self.theta2_limits.0 <= self.theta2_limits.1)
        {
            return Err(GraspError::InvalidDesign("joint limits must be ordered".into()));
        }
        Ok(())
    }

    /// Distal-to-proximal pulley ratio `R = r2 / r1`.
    pub fn transmission_ratio(&self) -> T {
        self.r2 / self.r1
    }

    pub fn base(&self, side: Side) -> Vec2<T> {
        let half = self.w / c(2.0);
        match side {
            Side::Left => Vec2::new(-half, T::zero()),
            Side::Right => Vec2::new(half, T::zero()),
        }
    }

    /// Joint angles of the fully open pre-grasp pose (lower limits).
    pub fn rest_pose(&self) -> (T, T) {
        (self.theta1_limits.0, self.theta2_limits.0)
    }

    /// Joint angles of the fully closed pose (upper limits).
    pub fn closed_pose(&self) -> (T, T) {
        (self.theta1_limits.1, self.theta2_limits.1)
    }

    /// Upper bound on the base-to-object-center distance of any contact.
    pub fn reach(&self, object_radius: T) -> T {
        self.l1 + self.l2 + object_radius
    }

    pub fn clamp_theta1(&self, t: T) -> T {
        t.max(self.theta1_limits.0).min(self.theta1_limits.1)
    }

    pub fn clamp_theta2(&self, t: T) -> T {
        t.max(self.theta2_limits.0).min(self.theta2_limits.1)
    }

    pub fn theta1_in_limits(&self, t: T, tol: T) -> bool {
        t >= self.theta1_limits.0 - tol && t <= self.theta1_limits.1 + tol
    }

    pub fn theta2_in_limits(&self, t: T, tol: T) -> bool {
        t >= self.theta2_limits.0 - tol && t <= self.theta2_limits.1 + tol
    }
}

/// A disk object: radius and static friction coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectSpec<T> {
    pub r: T,
    pub mu_s: T,
}

impl<T: Real> ObjectSpec<T> {
    pub fn new(r: T, mu_s: T) -> Result<Self, GraspError> {
        if !(r > T::zero()) {
            return Err(GraspError::InvalidObject("radius must be positive".into()));
        }
        if mu_s < T::zero() {
            return Err(GraspError::InvalidObject("mu_s must be non-negative".into()));
        }
        Ok(Self { r, mu_s })
    }
}

/// Which links of a finger touch the object.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ContactMode {
    TwoPhalanx,
    ProximalOnly,
    DistalOnly,
    Free,
}

/// Joint angles and contact locations of one finger.
///
/// `k1`/`k2` are distances along the proximal/distal link to the contact
/// point, zero when the link is contact-free.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FingerConfig<T> {
    pub side: Side,
    pub theta1: T,
    pub theta2: T,
    pub k1: T,
    pub k2: T,
    pub mode: ContactMode,
}

impl<T: Real> FingerConfig<T> {
    pub fn free(side: Side, theta1: T, theta2: T) -> Self {
        Self {
            side,
            theta1,
            theta2,
            k1: T::zero(),
            k2: T::zero(),
            mode: ContactMode::Free,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ContactLink {
    Proximal,
    Distal,
}

/// One link-object contact: position on the disk boundary, unit normal
/// pointing from the link through the disk center, and its tangent
/// (90 degrees counterclockwise from the normal).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContactPoint<T> {
    pub position: Vec2<T>,
    pub normal: Vec2<T>,
    pub tangent: Vec2<T>,
    pub link: ContactLink,
    pub side: Side,
}

/// Maps the palm-frame object center into the canonical right-finger frame.
#[inline]
pub fn canonical_point<T: Real>(p: Vec2<T>, side: Side) -> Vec2<T> {
    match side {
        Side::Left => p.mirror_x(),
        Side::Right => p,
    }
}

/// Maps a canonical right-finger point back into the palm frame.
#[inline]
pub fn from_canonical<T: Real>(p: Vec2<T>, side: Side) -> Vec2<T> {
    canonical_point(p, side)
}

/// Base, second joint, and fingertip positions in the palm frame.
pub fn finger_chain<T: Real>(
    design: &GrasperDesign<T>,
    config: &FingerConfig<T>,
) -> (Vec2<T>, Vec2<T>, Vec2<T>) {
    let base = Vec2::new(design.w / c(2.0), T::zero());
    let joint2 = base + Vec2::unit(config.theta1).scale(design.l1);
    let tip = joint2 + Vec2::unit(config.theta1 + config.theta2).scale(design.l2);
    match config.side {
        Side::Right => (base, joint2, tip),
        Side::Left => (base.mirror_x(), joint2.mirror_x(), tip.mirror_x()),
    }
}

/// Object center implied by proximal contact at `k1` (canonical frame).
#[inline]
pub fn proximal_closure_point<T: Real>(
    design: &GrasperDesign<T>,
    object: &ObjectSpec<T>,
    theta1: T,
    k1: T,
) -> Vec2<T> {
    let base = Vec2::new(design.w / c(2.0), T::zero());
    base + Vec2::new(k1, object.r).rotated(theta1)
}

/// Object center implied by distal contact at `k2` (canonical frame).
#[inline]
pub fn distal_closure_point<T: Real>(
    design: &GrasperDesign<T>,
    object: &ObjectSpec<T>,
    theta1: T,
    theta2: T,
    k2: T,
) -> Vec2<T> {
    let base = Vec2::new(design.w / c(2.0), T::zero());
    base + Vec2::new(design.l1, T::zero()).rotated(theta1)
        + Vec2::new(k2, object.r).rotated(theta1 + theta2)
}

/// Residual of the proximal vector loop: zero iff the disk rests on the
/// proximal link at distance `k1` from the base.
pub fn proximal_loop_residual<T: Real>(
    design: &GrasperDesign<T>,
    object: &ObjectSpec<T>,
    p: Vec2<T>,
    theta1: T,
    k1: T,
    side: Side,
) -> Vec2<T> {
    let pc = canonical_point(p, side);
    let res = pc - proximal_closure_point(design, object, theta1, k1);
    from_canonical(res, side)
}

/// Residual of the distal vector loop.
pub fn distal_loop_residual<T: Real>(
    design: &GrasperDesign<T>,
    object: &ObjectSpec<T>,
    p: Vec2<T>,
    theta1: T,
    theta2: T,
    k2: T,
    side: Side,
) -> Vec2<T> {
    let pc = canonical_point(p, side);
    let res = pc - distal_closure_point(design, object, theta1, theta2, k2);
    from_canonical(res, side)
}

fn contact_at<T: Real>(
    design: &GrasperDesign<T>,
    theta1: T,
    theta2: T,
    link: ContactLink,
    k: T,
    side: Side,
) -> ContactPoint<T> {
    let base = Vec2::new(design.w / c(2.0), T::zero());
    let (pos, normal) = match link {
        ContactLink::Proximal => (
            base + Vec2::new(k, T::zero()).rotated(theta1),
            Vec2::unit(theta1).perp(),
        ),
        ContactLink::Distal => (
            base + Vec2::new(design.l1, T::zero()).rotated(theta1)
                + Vec2::new(k, T::zero()).rotated(theta1 + theta2),
            Vec2::unit(theta1 + theta2).perp(),
        ),
    };
    match side {
        Side::Right => ContactPoint {
            position: pos,
            normal,
            tangent: normal.perp(),
            link,
            side,
        },
        Side::Left => {
            let n = normal.mirror_x();
            ContactPoint {
                position: pos.mirror_x(),
                normal: n,
                tangent: n.perp(),
                link,
                side,
            }
        }
    }
}

/// Materializes the contact points of a solved configuration.
///
/// Fails with `InconsistentConfig` when the mode's vector-loop residuals
/// exceed the solver tolerance.
pub fn contact_from_config<T: Real>(
    design: &GrasperDesign<T>,
    object: &ObjectSpec<T>,
    p: Vec2<T>,
    config: &FingerConfig<T>,
) -> Result<Vec<ContactPoint<T>>, GraspError> {
    let tol = c::<T>(LOOP_TOLERANCE) * (T::one() + p.norm());
    let mut contacts = Vec::new();
    let proximal = matches!(config.mode, ContactMode::TwoPhalanx | ContactMode::ProximalOnly);
    let distal = matches!(config.mode, ContactMode::TwoPhalanx | ContactMode::DistalOnly);
    if proximal {
        let res = proximal_loop_residual(design, object, p, config.theta1, config.k1, config.side);
        if res.norm() > tol {
            return Err(GraspError::InconsistentConfig(format!(
                "proximal loop residual {:e}",
                res.norm().to_f64().unwrap_or(f64::NAN)
            )));
        }
        contacts.push(contact_at(
            design,
            config.theta1,
            config.theta2,
            ContactLink::Proximal,
            config.k1,
            config.side,
        ));
    }
    if distal {
        let res = distal_loop_residual(
            design,
            object,
            p,
            config.theta1,
            config.theta2,
            config.k2,
            config.side,
        );
        if res.norm() > tol {
            return Err(GraspError::InconsistentConfig(format!(
                "distal loop residual {:e}",
                res.norm().to_f64().unwrap_or(f64::NAN)
            )));
        }
        contacts.push(contact_at(
            design,
            config.theta1,
            config.theta2,
            ContactLink::Distal,
            config.k2,
            config.side,
        ));
    }
    Ok(contacts)
}
