//! Planar contact wrenches and the object static-equilibrium test.
//!
//! Each contact contributes the two edge wrenches of its friction cone; the
//! object is in equilibrium iff the null wrench lies in the convex hull of
//! all edge wrenches. Moments are scaled by the object radius so the three
//! wrench components share force units and hull geometry is meaningful.

use serde::{Deserialize, Serialize};

use crate::contact_solver::{FingerSolution, SolveOutcome};
use crate::geom::Vec2;
use crate::hull::origin_in_convex_hull;
use crate::kinematics::{ContactPoint, ObjectSpec};
use crate::scalar::{c, Real};

/// A planar wrench on the object: net force and radius-scaled moment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Wrench<T> {
    pub fx: T,
    pub fy: T,
    /// Moment about the object center divided by the object radius.
    pub tau_scaled: T,
}

impl<T: Real> Wrench<T> {
    pub fn as_array(&self) -> [T; 3] {
        [self.fx, self.fy, self.tau_scaled]
    }

    pub fn norm(&self) -> T {
        (self.fx * self.fx + self.fy * self.fy + self.tau_scaled * self.tau_scaled).sqrt()
    }

    pub fn scaled(&self, s: T) -> Self {
        Self {
            fx: self.fx * s,
            fy: self.fy * s,
            tau_scaled: self.tau_scaled * s,
        }
    }
}

/// Which edge of the friction cone a wrench came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConeEdge {
    Plus,
    Minus,
}

/// A collection of contact wrenches with per-wrench provenance
/// (contact index within the originating solution, cone edge sign).
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct WrenchSet<T> {
    pub wrenches: Vec<Wrench<T>>,
    pub provenance: Vec<(usize, ConeEdge)>,
}

impl<T: Real> WrenchSet<T> {
    pub fn push(&mut self, w: Wrench<T>, contact: usize, edge: ConeEdge) {
        self.wrenches.push(w);
        self.provenance.push((contact, edge));
    }

    pub fn extend(&mut self, other: &WrenchSet<T>) {
        let base = self.wrenches.len();
        self.wrenches.extend_from_slice(&other.wrenches);
        self.provenance
            .extend(other.provenance.iter().map(|&(i, e)| (base + i, e)));
    }

    pub fn points(&self) -> Vec<[T; 3]> {
        self.wrenches.iter().map(|w| w.as_array()).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.wrenches.is_empty()
    }

    pub fn len(&self) -> usize {
        self.wrenches.len()
    }
}

/// The two friction-cone edge wrenches of one contact.
///
/// Force `f_n (n ± mu_s t) / sqrt(1 + mu_s^2)` at the contact position; the
/// moment is taken about the object center `p` and divided by the radius.
/// With `mu_s = 0` both edges coincide with the pure normal wrench.
pub fn cone_edge_wrenches<T: Real>(
    contact: &ContactPoint<T>,
    f_n: T,
    mu_s: T,
    object: &ObjectSpec<T>,
    p: Vec2<T>,
) -> (Wrench<T>, Wrench<T>) {
    let scale = f_n / (T::one() + mu_s * mu_s).sqrt();
    let arm = contact.position - p;
    let edge = |sign: T| {
        let dir = contact.normal + contact.tangent.scale(sign * mu_s);
        let force = dir.scale(scale);
        Wrench {
            fx: force.x,
            fy: force.y,
            tau_scaled: arm.cross(force) / object.r,
        }
    };
    (edge(T::one()), edge(-T::one()))
}

/// Edge wrenches of every contact of a solved finger, in contact order.
pub fn solution_wrenches<T: Real>(
    solution: &FingerSolution<T>,
    object: &ObjectSpec<T>,
    p: Vec2<T>,
) -> WrenchSet<T> {
    let mut set = WrenchSet::default();
    for (i, contact) in solution.contacts.iter().enumerate() {
        let f_n = solution.normal_forces[i];
        let (plus, minus) = cone_edge_wrenches(contact, f_n, object.mu_s, object, p);
        set.push(plus, i, ConeEdge::Plus);
        set.push(minus, i, ConeEdge::Minus);
    }
    set
}

/// Like [`solution_wrenches`], but keeps only tendon-transmitted contacts;
/// blocked-closing limit and corner reactions are excluded.
pub fn transmitted_wrenches<T: Real>(
    solution: &FingerSolution<T>,
    object: &ObjectSpec<T>,
    p: Vec2<T>,
) -> WrenchSet<T> {
    let mut set = WrenchSet::default();
    for (i, contact) in solution.contacts.iter().enumerate() {
        if !solution.transmitted[i] {
            continue;
        }
        let f_n = solution.normal_forces[i];
        let (plus, minus) = cone_edge_wrenches(contact, f_n, object.mu_s, object, p);
        set.push(plus, i, ConeEdge::Plus);
        set.push(minus, i, ConeEdge::Minus);
    }
    set
}

/// True iff the null wrench lies in the convex hull of `ws.wrenches`.
///
/// Degenerate (lower-dimensional) hulls need no special treatment: the
/// origin interior to a segment or polygon counts as contained.
pub fn null_wrench_contained<T: Real>(ws: &WrenchSet<T>) -> bool {
    if ws.is_empty() {
        return false;
    }
    origin_in_convex_hull(&ws.points())
}

/// Counts the distinct force-space directions among the nonzero wrenches.
fn distinct_directions<T: Real>(ws: &WrenchSet<T>) -> usize {
    let mut dirs: Vec<[T; 3]> = Vec::new();
    let tol = c::<T>(1e-9);
    for w in &ws.wrenches {
        let n = w.norm();
        if n <= T::zero() {
            continue;
        }
        let d = [w.fx / n, w.fy / n, w.tau_scaled / n];
        let seen = dirs.iter().any(|e| {
            (e[0] - d[0]).abs() < tol && (e[1] - d[1]).abs() < tol && (e[2] - d[2]).abs() < tol
        });
        if !seen {
            dirs.push(d);
        }
    }
    dirs.len()
}

/// Object static equilibrium at position `p` given both finger outcomes.
///
/// Collects the cone-edge wrenches of every contact of every reached finger
/// and tests null-wrench containment. A single wrench direction can never
/// balance, so fewer than two distinct directions is an immediate `false`.
pub fn object_equilibrium<T: Real>(
    left: &SolveOutcome<T>,
    right: &SolveOutcome<T>,
    object: &ObjectSpec<T>,
    p: Vec2<T>,
) -> bool {
    let mut set = WrenchSet::default();
    for outcome in [left, right] {
        if let Some(sol) = outcome.reached() {
            set.extend(&solution_wrenches(sol, object, p));
        }
    }
    if distinct_directions(&set) < 2 {
        return false;
    }
    null_wrench_contained(&set)
}
