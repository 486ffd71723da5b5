//! Static-equilibrium finger configuration under Coulomb friction.
//!
//! For a fixed object position the solver first attempts a two-phalanx
//! closure of both vector loops (multi-start damped Gauss-Newton), then
//! classifies the sign of the proximal contact force over the admissible
//! friction range. A strictly negative proximal force means the distal
//! contact slides toward the fingertip, so the solver falls back to the
//! distal-only branch where the proximal moment balance (`f1 = 0`) is
//! imposed jointly with the distal loop. Objects touchable only by the
//! proximal link drive the distal joint to its limit.

use serde::{Deserialize, Serialize};

use crate::error::GraspError;
use crate::geom::{closest_segment_param, point_segment_distance, Vec2};
use crate::kinematics::{
    canonical_point, contact_from_config, distal_closure_point, proximal_closure_point,
    ContactLink, ContactMode, ContactPoint, FingerConfig, GrasperDesign, ObjectSpec, Side,
};
use crate::least_squares::gauss_newton;
use crate::scalar::{c, Real};

/// Number of evenly spaced proximal-angle seeds for the multi-start solves.
const THETA1_SEEDS: usize = 16;
/// Contact locations closer to a joint than this are treated as degenerate.
const K_EPS: f64 = 1e-9;

/// Tendon forces applied to the two fingers. Joint torques are derived,
/// never stored: `T1 = f * r1`, `T2 = f * r2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActuationCommand<T> {
    pub f_left: T,
    pub f_right: T,
}

impl<T: Real> ActuationCommand<T> {
    pub fn new(f_left: T, f_right: T) -> Result<Self, GraspError> {
        if !(f_left > T::zero() && f_right > T::zero()) {
            return Err(GraspError::InvalidConfig(
                "tendon forces must be positive".into(),
            ));
        }
        Ok(Self { f_left, f_right })
    }

    pub fn symmetric(f: T) -> Self {
        Self {
            f_left: f,
            f_right: f,
        }
    }

    pub fn force(&self, side: Side) -> T {
        match side {
            Side::Left => self.f_left,
            Side::Right => self.f_right,
        }
    }
}

/// Sign classification of the proximal contact force over `|mu| <= mu_s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ForceCase {
    StrictlyPositive,
    StrictlyNegative,
    Sticking,
    NotApplicable,
}

/// Result of evaluating the proximal force over the friction interval.
#[derive(Debug, Clone, Copy)]
pub struct ProximalForceAnalysis<T> {
    pub case: ForceCase,
    /// Distal contact normal force, `f_a * r2 / k2`.
    pub f2: T,
    /// Proximal force at the two friction endpoints.
    pub f1_min: T,
    pub f1_max: T,
    /// The unique friction value with `f1 = 0`, present in the sticking case.
    pub mu_star: Option<T>,
}

/// Equilibrium joint angles, contacts, and contact forces for one finger.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FingerSolution<T> {
    pub config: FingerConfig<T>,
    pub contacts: Vec<ContactPoint<T>>,
    /// Normal force magnitude per contact, aligned with `contacts`.
    pub normal_forces: Vec<T>,
    /// Friction value at the distal contact realizing equilibrium;
    /// meaningful only in the sticking case.
    pub mu_solved: T,
    pub case: ForceCase,
    /// Per-contact flag, aligned with `contacts`: true when the normal force
    /// is transmitted from the tendon through a smooth link-surface contact.
    /// False for blocked-closing reactions (joint pinned at a limit, disk on
    /// the fingertip corner), whose synthetic normal-only force is sustained
    /// by a limit reaction or a nonsmooth corner normal.
    pub transmitted: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SolveOutcome<T> {
    Reached(FingerSolution<T>),
    Unreachable,
}

impl<T> SolveOutcome<T> {
    pub fn reached(&self) -> Option<&FingerSolution<T>> {
        match self {
            SolveOutcome::Reached(s) => Some(s),
            SolveOutcome::Unreachable => None,
        }
    }
}

fn theta1_seeds<T: Real>(design: &GrasperDesign<T>) -> impl Iterator<Item = T> + '_ {
    let (lo, hi) = design.theta1_limits;
    let span = hi - lo;
    (0..THETA1_SEEDS).map(move |i| lo + span * c::<T>(i as f64 / (THETA1_SEEDS - 1) as f64))
}

/// Joint two-phalanx closure: both vector loops solved simultaneously.
///
/// Returns `(theta1, theta2, k1, k2)` for the feasible closure with the
/// smallest proximal angle (the first configuration reached while closing),
/// or `None` when no closure exists.
pub fn solve_two_phalanx<T: Real>(
    design: &GrasperDesign<T>,
    object: &ObjectSpec<T>,
    p: Vec2<T>,
    side: Side,
) -> Option<(T, T, T, T)> {
    let pc = canonical_point(p, side);
    let base = design.base(Side::Right);
    if (pc - base).norm() > design.reach(object.r) {
        return None;
    }
    let lo = [
        design.theta1_limits.0,
        design.theta2_limits.0,
        T::zero(),
        T::zero(),
    ];
    let hi = [
        design.theta1_limits.1,
        design.theta2_limits.1,
        design.l1,
        design.l2,
    ];
    let eval = |x: &[T; 4]| {
        let (t1, t2, k1, k2) = (x[0], x[1], x[2], x[3]);
        let rp = pc - proximal_closure_point(design, object, t1, k1);
        let rd = pc - distal_closure_point(design, object, t1, t2, k2);
        // Derivatives of the closure points; residual rows get the sign flip.
        let dp_t1 = Vec2::new(k1, object.r).rotated(t1).perp();
        let dp_k1 = Vec2::unit(t1);
        let arm2 = Vec2::new(k2, object.r).rotated(t1 + t2);
        let dd_t1 = Vec2::new(design.l1, T::zero()).rotated(t1).perp() + arm2.perp();
        let dd_t2 = arm2.perp();
        let dd_k2 = Vec2::unit(t1 + t2);
        (
            [rp.x, rp.y, rd.x, rd.y],
            [
                [-dp_t1.x, T::zero(), -dp_k1.x, T::zero()],
                [-dp_t1.y, T::zero(), -dp_k1.y, T::zero()],
                [-dd_t1.x, -dd_t2.x, T::zero(), -dd_k2.x],
                [-dd_t1.y, -dd_t2.y, T::zero(), -dd_k2.y],
            ],
        )
    };
    let mut best: Option<[T; 4]> = None;
    for t1_seed in theta1_seeds(design) {
        let seed = [
            t1_seed,
            design.clamp_theta2(T::zero()),
            design.l1 / c(2.0),
            design.l2 / c(2.0),
        ];
        let fit = gauss_newton(seed, lo, hi, eval);
        if fit.is_success() && best.map_or(true, |b| fit.x[0] < b[0]) {
            best = Some(fit.x);
        }
    }
    best.map(|x| (x[0], x[1], x[2], x[3]))
}

/// Proximal vector loop alone, by construction: the disk center fixes the
/// proximal angle and contact location in closed form.
fn solve_proximal_loop<T: Real>(
    design: &GrasperDesign<T>,
    object: &ObjectSpec<T>,
    pc: Vec2<T>,
) -> Option<(T, T)> {
    let v = pc - design.base(Side::Right);
    let d2 = v.dot(v);
    let r2 = object.r * object.r;
    if d2 <= r2 {
        return None;
    }
    let k1 = (d2 - r2).sqrt();
    if k1 > design.l1 {
        return None;
    }
    let theta1 = v.y.atan2(v.x) - object.r.atan2(k1);
    let tol = c(1e-12);
    if !design.theta1_in_limits(theta1, tol) {
        return None;
    }
    Some((design.clamp_theta1(theta1), k1))
}

/// Distal equilibrium contact location from the proximal moment balance:
/// `k2 = R/(1-R) * l1 * (cos(theta2) - mu * sin(theta2))`.
pub fn distal_equilibrium_k2<T: Real>(design: &GrasperDesign<T>, theta2: T, mu: T) -> T {
    let ratio = design.transmission_ratio();
    ratio / (T::one() - ratio) * design.l1 * (theta2.cos() - mu * theta2.sin())
}

/// Distal contact normal force, `f2 = f_a * r2 / k2`.
pub fn distal_normal_force<T: Real>(design: &GrasperDesign<T>, f_a: T, k2: T) -> T {
    f_a * design.r2 / k2
}

/// Proximal contact normal force for a friction value `mu` at the distal
/// contact.
pub fn proximal_normal_force<T: Real>(
    design: &GrasperDesign<T>,
    f_a: T,
    theta2: T,
    k1: T,
    k2: T,
    mu: T,
) -> T {
    let f2 = distal_normal_force(design, f_a, k2);
    (f_a * design.r1 - (design.l1 * theta2.cos() + k2) * f2 + design.l1 * theta2.sin() * mu * f2)
        / k1
}

/// Classifies the sign of the proximal contact force over `|mu| <= mu_s`.
///
/// The force is affine in `mu`, so the endpoints decide: strictly positive
/// if the minimum is positive, strictly negative if the maximum is negative,
/// sticking when the zero crossing lies strictly inside the friction cone.
/// A crossing exactly at `|mu| = mu_s` counts as sliding (reconfiguration).
pub fn proximal_force_case<T: Real>(
    design: &GrasperDesign<T>,
    object: &ObjectSpec<T>,
    theta2: T,
    k1: T,
    k2: T,
    f_a: T,
) -> Result<ProximalForceAnalysis<T>, GraspError> {
    if k1 < c(K_EPS) || k2 < c(K_EPS) {
        return Err(GraspError::DegenerateContact(
            "contact at a joint (k1 or k2 is zero)".into(),
        ));
    }
    let f2 = distal_normal_force(design, f_a, k2);
    let at = |mu: T| proximal_normal_force(design, f_a, theta2, k1, k2, mu);
    let lo = at(-object.mu_s);
    let hi = at(object.mu_s);
    let (f1_min, f1_max) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let slope = design.l1 * theta2.sin() * f2 / k1;
    let (case, mu_star) = if f1_min > T::zero() {
        (ForceCase::StrictlyPositive, None)
    } else if f1_max < T::zero() {
        (ForceCase::StrictlyNegative, None)
    } else if slope != T::zero() {
        let mu = -at(T::zero()) / slope;
        if mu.abs() < object.mu_s {
            (ForceCase::Sticking, Some(mu))
        } else {
            (ForceCase::StrictlyNegative, None)
        }
    } else {
        // f1 constant in mu and touching zero: no strict sticking value.
        (ForceCase::StrictlyNegative, None)
    };
    Ok(ProximalForceAnalysis {
        case,
        f2,
        f1_min,
        f1_max,
        mu_star,
    })
}

/// Distal-only equilibrium: solves the distal vector loop jointly with the
/// proximal moment balance at the friction-cone boundary `mu = mu_s` (the
/// contact arrives here by sliding toward the fingertip, so the friction
/// value is pinned at the cone edge).
///
/// Returns `(theta1, theta2, k2, mu_s)`; `None` when the equilibrium
/// contact would lie beyond the fingertip (the object escapes past the
/// tip) or no closure exists.
pub fn solve_distal_equilibrium<T: Real>(
    design: &GrasperDesign<T>,
    object: &ObjectSpec<T>,
    p: Vec2<T>,
    side: Side,
    _f_a: T,
) -> Option<(T, T, T, T)> {
    let pc = canonical_point(p, side);
    let base = design.base(Side::Right);
    if (pc - base).norm() > design.reach(object.r) {
        return None;
    }
    let mu = object.mu_s;
    let ratio = design.transmission_ratio();
    let gain = ratio / (T::one() - ratio) * design.l1;
    let lo = [design.theta1_limits.0, design.theta2_limits.0, T::zero()];
    let hi = [design.theta1_limits.1, design.theta2_limits.1, design.l2];
    let eval = |x: &[T; 3]| {
        let (t1, t2, k2) = (x[0], x[1], x[2]);
        let rd = pc - distal_closure_point(design, object, t1, t2, k2);
        let re = k2 - gain * (t2.cos() - mu * t2.sin());
        let arm2 = Vec2::new(k2, object.r).rotated(t1 + t2);
        let dd_t1 = Vec2::new(design.l1, T::zero()).rotated(t1).perp() + arm2.perp();
        let dd_t2 = arm2.perp();
        let dd_k2 = Vec2::unit(t1 + t2);
        let de_t2 = gain * (t2.sin() + mu * t2.cos());
        (
            [rd.x, rd.y, re],
            [
                [-dd_t1.x, -dd_t2.x, -dd_k2.x],
                [-dd_t1.y, -dd_t2.y, -dd_k2.y],
                [T::zero(), de_t2, T::one()],
            ],
        )
    };
    let mut best: Option<[T; 3]> = None;
    for t1_seed in theta1_seeds(design) {
        let k2_seed = distal_equilibrium_k2(design, T::zero(), mu)
            .max(T::zero())
            .min(design.l2);
        let seed = [t1_seed, design.clamp_theta2(T::zero()), k2_seed];
        let fit = gauss_newton(seed, lo, hi, eval);
        if fit.is_success() && fit.x[2] > c(K_EPS) && best.map_or(true, |b| fit.x[0] < b[0]) {
            best = Some(fit.x);
        }
    }
    best.map(|x| (x[0], x[1], x[2], mu))
}

fn two_phalanx_solution<T: Real>(
    design: &GrasperDesign<T>,
    object: &ObjectSpec<T>,
    p: Vec2<T>,
    side: Side,
    f_a: T,
    sol: (T, T, T, T),
    analysis: ProximalForceAnalysis<T>,
) -> Result<FingerSolution<T>, GraspError> {
    let (theta1, theta2, k1, k2) = sol;
    let config = FingerConfig {
        side,
        theta1,
        theta2,
        k1,
        k2,
        mode: ContactMode::TwoPhalanx,
    };
    let contacts = contact_from_config(design, object, p, &config)?;
    // Sticking pins the friction value; the strictly positive case leaves it
    // free, so the stored point value uses mu = 0 (the wrench set exposes
    // the full cone regardless).
    let mu = analysis.mu_star.unwrap_or(T::zero());
    let f1 = proximal_normal_force(design, f_a, theta2, k1, k2, mu).max(T::zero());
    Ok(FingerSolution {
        config,
        normal_forces: vec![f1, analysis.f2],
        contacts,
        mu_solved: mu,
        case: analysis.case,
        transmitted: vec![true, true],
    })
}

fn distal_solution<T: Real>(
    design: &GrasperDesign<T>,
    object: &ObjectSpec<T>,
    p: Vec2<T>,
    side: Side,
    f_a: T,
    sol: (T, T, T, T),
) -> Result<FingerSolution<T>, GraspError> {
    let (theta1, theta2, k2, mu) = sol;
    let config = FingerConfig {
        side,
        theta1,
        theta2,
        k1: T::zero(),
        k2,
        mode: ContactMode::DistalOnly,
    };
    let contacts = contact_from_config(design, object, p, &config)?;
    let case = if mu.abs() < object.mu_s {
        ForceCase::Sticking
    } else {
        // Frictionless or cone-boundary equilibrium; not a strict sticking
        // contact per the case analysis.
        ForceCase::NotApplicable
    };
    Ok(FingerSolution {
        config,
        normal_forces: vec![distal_normal_force(design, f_a, k2)],
        contacts,
        mu_solved: mu,
        case,
        transmitted: vec![true],
    })
}

/// Proximal-only branch: the object rests on the proximal link and the
/// unobstructed distal link closes to its upper joint limit. When closing
/// the distal link is blocked by the object before the limit, the fingertip
/// corner rests on the disk and contributes a distal force at `k2 = l2`.
fn proximal_only_solution<T: Real>(
    design: &GrasperDesign<T>,
    object: &ObjectSpec<T>,
    p: Vec2<T>,
    side: Side,
    f_a: T,
    theta1: T,
    k1: T,
) -> Option<FingerSolution<T>> {
    let pc = canonical_point(p, side);
    let base = design.base(Side::Right);
    let joint2 = base + Vec2::unit(theta1).scale(design.l1);
    let clearance = |t2: T| {
        let tip = joint2 + Vec2::unit(theta1 + t2).scale(design.l2);
        point_segment_distance(pc, joint2, tip) - object.r
    };
    let (t2_lo, t2_hi) = design.theta2_limits;
    let tol = c::<T>(1e-9) * (T::one() + pc.norm());
    let theta2;
    let tip_touches;
    if clearance(t2_hi) >= -tol {
        theta2 = t2_hi;
        tip_touches = clearance(t2_hi) <= tol;
    } else if clearance(t2_lo) > tol {
        // Distal link blocked before its limit: bisect for the touching angle.
        let mut lo_a = t2_lo;
        let mut hi_a = t2_hi;
        for _ in 0..100 {
            let mid = (lo_a + hi_a) / c(2.0);
            if clearance(mid) > T::zero() {
                lo_a = mid;
            } else {
                hi_a = mid;
            }
        }
        theta2 = lo_a;
        tip_touches = true;
    } else {
        // The distal link already overlaps the object at its rest angle;
        // no consistent proximal-only configuration.
        return None;
    }

    if k1 < c(K_EPS) {
        return None;
    }
    let f1 = f_a * design.r1 / k1;
    let mut config = FingerConfig {
        side,
        theta1,
        theta2,
        k1,
        k2: T::zero(),
        mode: ContactMode::ProximalOnly,
    };
    let mut contacts =
        contact_from_config(design, object, p, &config).ok()?;
    let mut normal_forces = vec![f1];
    let mut transmitted = vec![true];
    if tip_touches {
        let tip = joint2 + Vec2::unit(theta1 + theta2).scale(design.l2);
        let foot = closest_segment_param(pc, joint2, tip);
        let contact_pos = joint2 + (tip - joint2).scale(foot);
        if let Some(normal) = (pc - contact_pos).normalized() {
            config.k2 = design.l2;
            config.mode = ContactMode::TwoPhalanx;
            let (pos, n) = match side {
                Side::Right => (contact_pos, normal),
                Side::Left => (contact_pos.mirror_x(), normal.mirror_x()),
            };
            contacts.push(ContactPoint {
                position: pos,
                normal: n,
                tangent: n.perp(),
                link: ContactLink::Distal,
                side,
            });
            normal_forces.push(distal_normal_force(design, f_a, design.l2));
            // The distal link is blocked by the disk before its limit; the
            // corner reaction carries the distal tendon moment.
            transmitted.push(false);
        }
    }
    Some(FingerSolution {
        config,
        contacts,
        normal_forces,
        mu_solved: T::zero(),
        case: ForceCase::NotApplicable,
        transmitted,
    })
}

/// Joint-space moment arms of a unit contact force applied at the fingertip
/// corner: `b_i = d(tip)/d(theta_i) . n_hat` with the normal pointing from
/// the tip to the disk center (canonical frame).
fn corner_moment_arms<T: Real>(
    design: &GrasperDesign<T>,
    pc: Vec2<T>,
    theta1: T,
    theta2: T,
) -> (Vec2<T>, T, T, T) {
    let base = design.base(Side::Right);
    let joint2 = base + Vec2::unit(theta1).scale(design.l1);
    let tip = joint2 + Vec2::unit(theta1 + theta2).scale(design.l2);
    let gap = (pc - tip).norm();
    let n_hat = if gap > T::zero() {
        (pc - tip).scale(T::one() / gap)
    } else {
        Vec2::zero()
    };
    let b1 = (tip - base).perp().dot(n_hat);
    let b2 = (tip - joint2).perp().dot(n_hat);
    (tip, b1, b2, gap)
}

/// Equilibrium with the disk resting on the fingertip corner: the contact
/// normal is radial from the tip, and its force must balance both joint
/// torques. Arises when the sliding distal contact reaches the end of the
/// link before the moment balance is met.
pub fn solve_tip_corner_equilibrium<T: Real>(
    design: &GrasperDesign<T>,
    object: &ObjectSpec<T>,
    p: Vec2<T>,
    side: Side,
) -> Option<(T, T)> {
    let pc = canonical_point(p, side);
    let lo = [design.theta1_limits.0, design.theta2_limits.0];
    let hi = [design.theta1_limits.1, design.theta2_limits.1];
    let res = |x: &[T; 2]| -> [T; 2] {
        let (_, b1, b2, gap) = corner_moment_arms(design, pc, x[0], x[1]);
        [gap - object.r, design.r1 * b2 - design.r2 * b1]
    };
    let eval = |x: &[T; 2]| {
        let r0 = res(x);
        // Central-difference Jacobian; the corner geometry is smooth.
        let h = c::<T>(1e-6);
        let mut jac = [[T::zero(); 2]; 2];
        for col in 0..2 {
            let mut xp = *x;
            let mut xm = *x;
            xp[col] = xp[col] + h;
            xm[col] = xm[col] - h;
            let (rp, rm) = (res(&xp), res(&xm));
            for row in 0..2 {
                jac[row][col] = (rp[row] - rm[row]) / (h * c(2.0));
            }
        }
        (r0, jac)
    };
    let mut best: Option<[T; 2]> = None;
    for t1_seed in theta1_seeds(design) {
        for &t2_seed in &[T::zero(), c(0.7), c(1.4)] {
            let seed = [t1_seed, design.clamp_theta2(t2_seed)];
            let fit = gauss_newton(seed, lo, hi, eval);
            if !fit.is_success() {
                continue;
            }
            let (_, b1, b2, _) = corner_moment_arms(design, pc, fit.x[0], fit.x[1]);
            // Positive moment arms give a positive contact force.
            if b1 > c(K_EPS) && b2 > c(K_EPS) && best.map_or(true, |b| fit.x[0] < b[0]) {
                best = Some(fit.x);
            }
        }
    }
    best.map(|x| (x[0], x[1]))
}

fn tip_corner_solution<T: Real>(
    design: &GrasperDesign<T>,
    object: &ObjectSpec<T>,
    p: Vec2<T>,
    side: Side,
    f_a: T,
    theta1: T,
    theta2: T,
) -> Option<FingerSolution<T>> {
    let pc = canonical_point(p, side);
    let (tip, b1, _, gap) = corner_moment_arms(design, pc, theta1, theta2);
    if (gap - object.r).abs() > c::<T>(crate::kinematics::LOOP_TOLERANCE) * (T::one() + pc.norm())
        || b1 < c(K_EPS)
    {
        return None;
    }
    let normal = (pc - tip).normalized()?;
    let force = f_a * design.r1 / b1;
    if !(force > T::zero()) {
        return None;
    }
    let (pos, n) = match side {
        Side::Right => (tip, normal),
        Side::Left => (tip.mirror_x(), normal.mirror_x()),
    };
    Some(FingerSolution {
        config: FingerConfig {
            side,
            theta1,
            theta2,
            k1: T::zero(),
            k2: design.l2,
            mode: ContactMode::DistalOnly,
        },
        contacts: vec![ContactPoint {
            position: pos,
            normal: n,
            tangent: n.perp(),
            link: ContactLink::Distal,
            side,
        }],
        normal_forces: vec![force],
        mu_solved: T::zero(),
        case: ForceCase::NotApplicable,
        transmitted: vec![false],
    })
}

/// Joint held at a limit while the other closes onto the distal contact.
#[derive(Clone, Copy)]
enum PinnedJoint {
    Theta1Lo,
    Theta1Hi,
    Theta2Lo,
    Theta2Hi,
}

/// Distal contact reached with one joint pinned at a limit. The free
/// joint's moment balance sets the contact force; the pinned joint rests
/// there only if the contact moment and limit reaction have consistent
/// signs. The finger rests at the first contact found as the free joint
/// closes.
fn limit_wedged_distal_solution<T: Real>(
    design: &GrasperDesign<T>,
    object: &ObjectSpec<T>,
    p: Vec2<T>,
    side: Side,
    f_a: T,
    pinned: PinnedJoint,
) -> Option<FingerSolution<T>> {
    let pc = canonical_point(p, side);
    let base = design.base(Side::Right);
    let pose = |t: T| match pinned {
        PinnedJoint::Theta1Lo => (design.theta1_limits.0, t),
        PinnedJoint::Theta1Hi => (design.theta1_limits.1, t),
        PinnedJoint::Theta2Lo => (t, design.theta2_limits.0),
        PinnedJoint::Theta2Hi => (t, design.theta2_limits.1),
    };
    let clearance = |t: T| {
        let (t1, t2) = pose(t);
        let joint2 = base + Vec2::unit(t1).scale(design.l1);
        let tip = joint2 + Vec2::unit(t1 + t2).scale(design.l2);
        point_segment_distance(pc, joint2, tip) - object.r
    };
    let (lo, hi) = match pinned {
        PinnedJoint::Theta1Lo | PinnedJoint::Theta1Hi => design.theta2_limits,
        PinnedJoint::Theta2Lo | PinnedJoint::Theta2Hi => design.theta1_limits,
    };
    if clearance(lo) <= T::zero() {
        // Already overlapping before the free joint starts closing.
        return None;
    }
    // First contact while the free joint closes; the march advances by
    // clearance / lever (no distal-link point moves faster than that per
    // radian), so a contact cannot be skipped.
    let lever = match pinned {
        PinnedJoint::Theta1Lo | PinnedJoint::Theta1Hi => design.l2,
        PinnedJoint::Theta2Lo | PinnedJoint::Theta2Hi => design.l1 + design.l2,
    };
    let min_step = c::<T>(1e-3);
    let mut hit = None;
    let mut t = lo;
    while t < hi {
        let step = (clearance(t) / lever).max(min_step);
        let next = (t + step).min(hi);
        if clearance(next) < T::zero() {
            hit = Some((t, next));
            break;
        }
        t = next;
    }
    let (mut a, mut b) = hit?;
    for _ in 0..90 {
        let mid = (a + b) / c(2.0);
        if clearance(mid) > T::zero() {
            a = mid;
        } else {
            b = mid;
        }
    }
    let (theta1, theta2) = pose(a);
    let joint2 = base + Vec2::unit(theta1).scale(design.l1);
    let tip = joint2 + Vec2::unit(theta1 + theta2).scale(design.l2);
    let u = closest_segment_param(pc, joint2, tip);
    if u <= c(1e-9) {
        return None;
    }
    let (k2, contact_pos) = if u < T::one() - c(1e-9) {
        let k2 = u * design.l2;
        if k2 < c(K_EPS) {
            return None;
        }
        (k2, joint2 + (tip - joint2).scale(u))
    } else {
        // Contact at the very fingertip corner.
        (design.l2, tip)
    };
    let normal = (pc - contact_pos).normalized()?;
    let b1 = (contact_pos - base).perp().dot(normal);
    let b2 = (contact_pos - joint2).perp().dot(normal);
    let slack = c::<T>(1e-9);
    // The free joint's balance sets the force; the pinned joint's limit
    // reaction must carry the leftover moment with the right sign: toward
    // closing at a lower limit, toward opening at an upper limit.
    let force = match pinned {
        PinnedJoint::Theta1Lo | PinnedJoint::Theta1Hi => {
            if b2 < c(K_EPS) {
                return None;
            }
            let f = f_a * design.r2 / b2;
            let ok = match pinned {
                PinnedJoint::Theta1Lo => f * b1 >= f_a * design.r1 - slack,
                _ => f * b1 <= f_a * design.r1 + slack,
            };
            if !ok {
                return None;
            }
            f
        }
        PinnedJoint::Theta2Lo | PinnedJoint::Theta2Hi => {
            if b1 < c(K_EPS) {
                return None;
            }
            let f = f_a * design.r1 / b1;
            let ok = match pinned {
                PinnedJoint::Theta2Lo => f * b2 >= f_a * design.r2 - slack,
                _ => f * b2 <= f_a * design.r2 + slack,
            };
            if !ok {
                return None;
            }
            f
        }
    };
    let (pos, n) = match side {
        Side::Right => (contact_pos, normal),
        Side::Left => (contact_pos.mirror_x(), normal.mirror_x()),
    };
    Some(FingerSolution {
        config: FingerConfig {
            side,
            theta1,
            theta2,
            k1: T::zero(),
            k2,
            mode: ContactMode::DistalOnly,
        },
        contacts: vec![ContactPoint {
            position: pos,
            normal: n,
            tangent: n.perp(),
            link: ContactLink::Distal,
            side,
        }],
        normal_forces: vec![force],
        mu_solved: T::zero(),
        case: ForceCase::NotApplicable,
        transmitted: vec![false],
    })
}

/// Signed clearance of the pose: smallest link-to-disk-center distance
/// minus the disk radius (negative when penetrating).
fn pose_clearance<T: Real>(
    design: &GrasperDesign<T>,
    object: &ObjectSpec<T>,
    pc: Vec2<T>,
    theta1: T,
    theta2: T,
) -> T {
    let base = design.base(Side::Right);
    let joint2 = base + Vec2::unit(theta1).scale(design.l1);
    let tip = joint2 + Vec2::unit(theta1 + theta2).scale(design.l2);
    point_segment_distance(pc, base, joint2)
        .min(point_segment_distance(pc, joint2, tip))
        - object.r
}

/// True iff the pose keeps both links clear of the disk, with a small
/// slack so exact contacts count as clear.
fn penetration_free<T: Real>(
    design: &GrasperDesign<T>,
    object: &ObjectSpec<T>,
    pc: Vec2<T>,
    theta1: T,
    theta2: T,
) -> bool {
    let slack = c::<T>(1e-6) * (T::one() + object.r);
    pose_clearance(design, object, pc, theta1, theta2) >= -slack
}

/// True iff the disk does not penetrate the fully open (rest-pose) grasper.
/// Objects are placed with the grasper open, so a placement overlapping the
/// rest pose is physically impossible and excluded from maps.
pub fn placement_valid<T: Real>(
    design: &GrasperDesign<T>,
    object: &ObjectSpec<T>,
    p: Vec2<T>,
) -> bool {
    [Side::Left, Side::Right].iter().all(|&side| {
        let pc = canonical_point(p, side);
        penetration_free(
            design,
            object,
            pc,
            design.theta1_limits.0,
            design.theta2_limits.0,
        )
    })
}

/// Tendon travel accumulated closing from the rest pose to `config`,
/// per unit actuation force.
fn closing_work<T: Real>(design: &GrasperDesign<T>, config: &FingerConfig<T>) -> T {
    design.r1 * (config.theta1 - design.theta1_limits.0)
        + design.r2 * (config.theta2 - design.theta2_limits.0)
}

/// Minimum clearance (both links) over a staircase closing path: one joint
/// sweeps its full range first, then the other. `distal_first` selects the
/// joint order.
fn closing_path_clear<T: Real>(
    design: &GrasperDesign<T>,
    object: &ObjectSpec<T>,
    pc: Vec2<T>,
    distal_first: bool,
) -> bool {
    let (lo1, hi1) = design.theta1_limits;
    let (lo2, hi2) = design.theta2_limits;
    let min_step = c::<T>(1e-3);
    let slack = c::<T>(1e-6) * (T::one() + object.r);
    let leg = |fixed_first: bool| -> bool {
        let sweeping_theta2 = fixed_first == distal_first;
        let (lo, hi) = if sweeping_theta2 {
            design.theta2_limits
        } else {
            design.theta1_limits
        };
        // No link point moves faster than `lever` per radian of the
        // sweeping joint, so an advance of clearance / lever cannot skip
        // a contact.
        let lever = if sweeping_theta2 {
            design.l2
        } else {
            design.l1 + design.l2
        };
        let mut t = lo;
        loop {
            let (t1, t2) = match (distal_first, fixed_first) {
                (false, true) => (t, lo2),
                (false, false) => (hi1, t),
                (true, true) => (lo1, t),
                (true, false) => (t, hi2),
            };
            let clearance = pose_clearance(design, object, pc, t1, t2);
            if clearance < -slack {
                return false;
            }
            if t >= hi {
                return true;
            }
            let step = (clearance / lever).max(min_step);
            t = (t + step).min(hi);
        }
    };
    leg(true) && leg(false)
}

/// Algorithm-1 configuration solve for one finger at one object position:
/// enumerate the candidate resting equilibria and keep the one reached
/// deepest into the close (maximum tendon travel), after ruling out the
/// finger sweeping past the disk entirely.
pub fn finger_configuration<T: Real>(
    design: &GrasperDesign<T>,
    object: &ObjectSpec<T>,
    p: Vec2<T>,
    f_a: T,
    side: Side,
) -> SolveOutcome<T> {
    let pc = canonical_point(p, side);
    let base = design.base(Side::Right);
    if (pc - base).norm() > design.reach(object.r) {
        return SolveOutcome::Unreachable;
    }
    if (pc - base).norm() < object.r {
        // The disk covers this finger's base; every pose penetrates.
        return SolveOutcome::Unreachable;
    }
    // A finger that can sweep fully closed without touching the disk never
    // rests on it.
    if closing_path_clear(design, object, pc, false)
        || closing_path_clear(design, object, pc, true)
    {
        return SolveOutcome::Unreachable;
    }

    let clean =
        |s: &FingerSolution<T>| penetration_free(design, object, pc, s.config.theta1, s.config.theta2);
    let mut best: Option<FingerSolution<T>> = None;
    let mut consider = |s: FingerSolution<T>| {
        let w = closing_work(design, &s.config);
        if best
            .as_ref()
            .map_or(true, |b| w > closing_work(design, &b.config))
        {
            best = Some(s);
        }
    };

    // Two-phalanx contact, kept only when the proximal force case lets the
    // finger rest there.
    if let Some(sol) = solve_two_phalanx(design, object, p, side) {
        if let Ok(analysis) = proximal_force_case(design, object, sol.1, sol.2, sol.3, f_a) {
            match analysis.case {
                ForceCase::StrictlyPositive | ForceCase::Sticking => {
                    if let Ok(s) =
                        two_phalanx_solution(design, object, p, side, f_a, sol, analysis)
                    {
                        if clean(&s) {
                            consider(s);
                        }
                    }
                }
                // Otherwise the distal contact slides toward the tip; the
                // sliding branches below pick up the resting pose.
                _ => {}
            }
        }
    }

    // Proximal contact with the distal link closing fully.
    if let Some((theta1, k1)) = solve_proximal_loop(design, object, pc) {
        if let Some(s) = proximal_only_solution(design, object, p, side, f_a, theta1, k1) {
            if clean(&s) {
                consider(s);
            }
        }
    }

    // Sliding distal contact resting where the proximal moment vanishes.
    if let Some(d) = solve_distal_equilibrium(design, object, p, side, f_a) {
        if let Ok(s) = distal_solution(design, object, p, side, f_a, d) {
            if clean(&s) {
                consider(s);
            }
        }
    }

    // Disk resting on the fingertip corner.
    if let Some((t1, t2)) = solve_tip_corner_equilibrium(design, object, p, side) {
        if let Some(s) = tip_corner_solution(design, object, p, side, f_a, t1, t2) {
            if clean(&s) {
                consider(s);
            }
        }
    }

    // Distal contact with one joint wedged at its upper limit.
    for pinned in [
        PinnedJoint::Theta1Lo,
        PinnedJoint::Theta1Hi,
        PinnedJoint::Theta2Lo,
        PinnedJoint::Theta2Hi,
    ] {
        if let Some(s) = limit_wedged_distal_solution(design, object, p, side, f_a, pinned) {
            if clean(&s) {
                consider(s);
            }
        }
    }

    match best {
        Some(s) => SolveOutcome::Reached(s),
        None => SolveOutcome::Unreachable,
    }
}
