//! System potential energy and the energy map over an object-position grid.
//!
//! The energy is the negative work done by the tendons on the joints from
//! the rest pose, so `V <= 0` everywhere and objects drift toward lower
//! values. A finger that cannot touch the object closes to its joint limits
//! and still contributes the corresponding work. The module also carries a
//! frictionless direct-minimization oracle used by the test suites.

use rayon::prelude::*;
use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::contact_solver::{
    finger_configuration, placement_valid, ActuationCommand, FingerSolution, SolveOutcome,
};
use crate::equilibrium::object_equilibrium;
use crate::error::GraspError;
use crate::geom::{point_segment_distance, Vec2};
use crate::kinematics::{canonical_point, ContactMode, GrasperDesign, ObjectSpec, Side};
use crate::scalar::{c, Real};

/// Rest joint angles the actuation work is measured from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RestPose<T> {
    pub theta1_rest: T,
    pub theta2_rest: T,
}

impl<T: Real> RestPose<T> {
    pub fn of(design: &GrasperDesign<T>) -> Self {
        let (theta1_rest, theta2_rest) = design.rest_pose();
        Self {
            theta1_rest,
            theta2_rest,
        }
    }
}

/// A rectangular lattice of object positions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec<T> {
    pub x0: T,
    pub y0: T,
    pub dx: T,
    pub dy: T,
    pub nx: usize,
    pub ny: usize,
}

impl<T: Real> GridSpec<T> {
    /// Symmetric grid covering the full reachable set with square cells.
    pub fn default_for(design: &GrasperDesign<T>, object: &ObjectSpec<T>) -> Self {
        Self::with_resolution(design, object, c(0.05))
    }

    /// Like [`GridSpec::default_for`] with a custom cell size.
    ///
    /// The x range is symmetric about the centerline (so mirror symmetry
    /// holds exactly on grid nodes) and y covers `(0, w/2 + l1 + l2 + r]`.
    pub fn with_resolution(design: &GrasperDesign<T>, object: &ObjectSpec<T>, d: T) -> Self {
        let extent = design.w / c(2.0) + design.reach(object.r);
        let half = (extent / d).floor().to_f64().unwrap_or(0.0) as usize;
        Self {
            x0: -d * c(half as f64),
            y0: d,
            dx: d,
            dy: d,
            nx: 2 * half + 1,
            // A cell size beyond the reach still yields one valid row.
            ny: ((extent / d).floor().to_f64().unwrap_or(0.0) as usize).max(1),
        }
    }

    pub fn validate(&self) -> Result<(), GraspError> {
        if !(self.dx > T::zero() && self.dy > T::zero()) {
            return Err(GraspError::InvalidConfig("grid steps must be positive".into()));
        }
        if !(self.y0 > T::zero()) {
            return Err(GraspError::InvalidConfig("grid must lie above the palm (y > 0)".into()));
        }
        if self.nx == 0 || self.ny == 0 {
            return Err(GraspError::InvalidConfig("grid must be non-empty".into()));
        }
        Ok(())
    }

    #[inline]
    pub fn point(&self, ix: usize, iy: usize) -> Vec2<T> {
        Vec2::new(
            self.x0 + self.dx * c(ix as f64),
            self.y0 + self.dy * c(iy as f64),
        )
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn x_max(&self) -> T {
        self.x0 + self.dx * c((self.nx - 1) as f64)
    }

    pub fn y_max(&self) -> T {
        self.y0 + self.dy * c((self.ny - 1) as f64)
    }
}

/// Per-grid-point record. `mode_*` is `Free` both for a touch-free finger at
/// a reachable point and for unreachable points (disambiguated by
/// `reachable`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cell<T> {
    pub reachable: bool,
    pub v: Option<T>,
    pub equilibrium: bool,
    pub mode_left: ContactMode,
    pub mode_right: ContactMode,
}

impl<T> Cell<T> {
    fn unreachable() -> Self {
        Self {
            reachable: false,
            v: None,
            equilibrium: false,
            mode_left: ContactMode::Free,
            mode_right: ContactMode::Free,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyMap<T> {
    pub design: GrasperDesign<T>,
    pub object: ObjectSpec<T>,
    pub command: ActuationCommand<T>,
    pub grid: GridSpec<T>,
    /// Row-major, `iy * nx + ix`.
    pub cells: Vec<Cell<T>>,
}

impl<T: Real> EnergyMap<T> {
    #[inline]
    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.grid.nx + ix
    }

    #[inline]
    pub fn cell(&self, ix: usize, iy: usize) -> &Cell<T> {
        &self.cells[self.index(ix, iy)]
    }

    pub fn reachable_count(&self) -> usize {
        self.cells.iter().filter(|c| c.reachable).count()
    }

    pub fn equilibrium_count(&self) -> usize {
        self.cells.iter().filter(|c| c.equilibrium).count()
    }

    /// Errors when no grid point is reachable.
    pub fn require_reachable(&self) -> Result<(), GraspError> {
        if self.reachable_count() == 0 {
            Err(GraspError::EmptyReachableSet)
        } else {
            Ok(())
        }
    }

    /// CSV export: one row per grid point.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y,reachable,V,equilibrium,mode_left,mode_right\n");
        let mode = |m: ContactMode| match m {
            ContactMode::TwoPhalanx => "two_phalanx",
            ContactMode::ProximalOnly => "proximal_only",
            ContactMode::DistalOnly => "distal_only",
            ContactMode::Free => "free",
        };
        for iy in 0..self.grid.ny {
            for ix in 0..self.grid.nx {
                let p = self.grid.point(ix, iy);
                let cell = self.cell(ix, iy);
                let v = cell
                    .v
                    .map(|v| format!("{}", v.to_f64().unwrap_or(f64::NAN)))
                    .unwrap_or_default();
                out.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    p.x.to_f64().unwrap_or(f64::NAN),
                    p.y.to_f64().unwrap_or(f64::NAN),
                    cell.reachable,
                    v,
                    cell.equilibrium,
                    mode(cell.mode_left),
                    mode(cell.mode_right),
                ));
            }
        }
        out
    }
}

impl<T: Real + Serialize + DeserializeOwned> EnergyMap<T> {
    /// Full JSON container; round-trips losslessly.
    pub fn to_json(&self) -> Result<String, GraspError> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self, GraspError> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Work done by one tendon from the rest pose, per unit force.
fn side_work<T: Real>(design: &GrasperDesign<T>, rest: &RestPose<T>, theta1: T, theta2: T) -> T {
    design.r1 * (theta1 - rest.theta1_rest) + design.r2 * (theta2 - rest.theta2_rest)
}

/// System potential energy: negative actuation work summed over both
/// fingers. An unreached finger (`None`) closes to its joint limits.
pub fn system_energy<T: Real>(
    design: &GrasperDesign<T>,
    left: Option<&FingerSolution<T>>,
    right: Option<&FingerSolution<T>>,
    command: &ActuationCommand<T>,
) -> T {
    let rest = RestPose::of(design);
    let mut v = T::zero();
    for (side, sol) in [(Side::Left, left), (Side::Right, right)] {
        let (theta1, theta2) = match sol {
            Some(s) => (s.config.theta1, s.config.theta2),
            None => design.closed_pose(),
        };
        v = v - command.force(side) * side_work(design, &rest, theta1, theta2);
    }
    v
}

fn outcome_solution<T>(outcome: &SolveOutcome<T>) -> Option<&FingerSolution<T>> {
    outcome.reached()
}

/// Builds the energy map: per grid point, both finger configurations, the
/// system energy where reachable, and the object-equilibrium flag.
/// Cells are independent and evaluated in parallel; the result does not
/// depend on scheduling.
pub fn build_energy_map<T: Real>(
    design: &GrasperDesign<T>,
    object: &ObjectSpec<T>,
    command: &ActuationCommand<T>,
    grid: GridSpec<T>,
) -> Result<EnergyMap<T>, GraspError> {
    design.validate()?;
    grid.validate()?;
    let cells: Vec<Cell<T>> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let ix = i % grid.nx;
            let iy = i / grid.nx;
            let p = grid.point(ix, iy);
            if !placement_valid(design, object, p) {
                return Cell::unreachable();
            }
            let left = finger_configuration(design, object, p, command.force(Side::Left), Side::Left);
            let right =
                finger_configuration(design, object, p, command.force(Side::Right), Side::Right);
            let ls = outcome_solution(&left);
            let rs = outcome_solution(&right);
            if ls.is_none() && rs.is_none() {
                return Cell::unreachable();
            }
            let v = system_energy(design, ls, rs, command);
            Cell {
                reachable: true,
                v: Some(v),
                equilibrium: object_equilibrium(&left, &right, object, p),
                mode_left: ls.map_or(ContactMode::Free, |s| s.config.mode),
                mode_right: rs.map_or(ContactMode::Free, |s| s.config.mode),
            }
        })
        .collect();
    Ok(EnergyMap {
        design: *design,
        object: *object,
        command: *command,
        grid,
        cells,
    })
}

/// Feasibility of a finger pose against the disk: neither link penetrates.
fn pose_feasible<T: Real>(
    design: &GrasperDesign<T>,
    object: &ObjectSpec<T>,
    pc: Vec2<T>,
    theta1: T,
    theta2: T,
    slack: T,
) -> bool {
    let base = design.base(Side::Right);
    let joint2 = base + Vec2::unit(theta1).scale(design.l1);
    let tip = joint2 + Vec2::unit(theta1 + theta2).scale(design.l2);
    point_segment_distance(pc, base, joint2) >= object.r - slack
        && point_segment_distance(pc, joint2, tip) >= object.r - slack
}

/// Maximum tendon work for one finger under non-penetration, restricted to
/// poses connected to the rest pose (the finger cannot pass through the
/// disk). Returns the work per unit force and whether the disk limited the
/// closing at all.
fn side_max_work<T: Real>(
    design: &GrasperDesign<T>,
    object: &ObjectSpec<T>,
    pc: Vec2<T>,
) -> (T, bool) {
    let rest = RestPose::of(design);
    let (lo1, hi1) = design.theta1_limits;
    let (lo2, hi2) = design.theta2_limits;
    let slack = c::<T>(1e-12);

    // Fast path: if the fully closed pose is feasible and so is the whole
    // straight-line closing path, the disk never interferes. Checked on a
    // fine 1-D sweep.
    let closed_ok = pose_feasible(design, object, pc, hi1, hi2, slack);

    // Dense feasibility lattice + flood fill from the rest cell.
    let n1 = 180usize;
    let n2 = 96usize;
    let t1 = |i: usize| lo1 + (hi1 - lo1) * c::<T>(i as f64) / c((n1 - 1) as f64);
    let t2 = |j: usize| lo2 + (hi2 - lo2) * c::<T>(j as f64) / c((n2 - 1) as f64);
    let mut feasible = vec![false; n1 * n2];
    for i in 0..n1 {
        for j in 0..n2 {
            feasible[j * n1 + i] = pose_feasible(design, object, pc, t1(i), t2(j), slack);
        }
    }
    let mut reached = vec![false; n1 * n2];
    let mut stack = Vec::new();
    if feasible[0] {
        reached[0] = true;
        stack.push((0usize, 0usize));
    } else {
        // Rest pose blocked: the disk overlaps the open grasper. Fall back
        // to the full feasible set.
        reached.copy_from_slice(&feasible);
    }
    while let Some((i, j)) = stack.pop() {
        let mut visit = |i: usize, j: usize| {
            let k = j * n1 + i;
            if feasible[k] && !reached[k] {
                reached[k] = true;
                stack.push((i, j));
            }
        };
        if i > 0 {
            visit(i - 1, j);
        }
        if i + 1 < n1 {
            visit(i + 1, j);
        }
        if j > 0 {
            visit(i, j - 1);
        }
        if j + 1 < n2 {
            visit(i, j + 1);
        }
    }

    // The work is increasing in theta2, so at the optimum theta2 sits at
    // its largest locally feasible value; the problem reduces to a 1-D
    // maximization over theta1.
    let theta2_max = |t1: T, start: T| -> Option<T> {
        // Largest feasible theta2 reachable from `start` at fixed theta1.
        let mut t2 = start.max(lo2).min(hi2);
        let mut tries = 0;
        while !pose_feasible(design, object, pc, t1, t2, slack) {
            t2 = t2 - c(1e-3);
            tries += 1;
            if t2 < lo2 || tries > 2000 {
                return None;
            }
        }
        let step = c::<T>(1e-3);
        loop {
            let next = (t2 + step).min(hi2);
            if next == t2 {
                return Some(t2);
            }
            if pose_feasible(design, object, pc, t1, next, slack) {
                t2 = next;
            } else {
                // Bisect the boundary crossing.
                let mut f = t2;
                let mut i = next;
                for _ in 0..80 {
                    let m = (f + i) / c(2.0);
                    if pose_feasible(design, object, pc, t1, m, slack) {
                        f = m;
                    } else {
                        i = m;
                    }
                }
                return Some(f);
            }
        }
    };

    // Per lattice column: refine upward from the top of the connected
    // component and keep the best column.
    let mut best: Option<(T, T, T)> = None; // (work, t1, t2_start)
    for i in 0..n1 {
        let Some(jtop) = (0..n2).rev().find(|&j| reached[j * n1 + i]) else {
            continue;
        };
        if let Some(t2m) = theta2_max(t1(i), t2(jtop)) {
            let w = side_work(design, &rest, t1(i), t2m);
            if best.map_or(true, |b| w > b.0) {
                best = Some((w, t1(i), t2(jtop)));
            }
        }
    }
    let Some((mut cur, a1, a2)) = best else {
        // Nothing feasible at all (should not happen for y > 0 grids).
        return (side_work(design, &rest, lo1, lo2), false);
    };

    // Golden-section over theta1 in a bracket around the best column.
    let score = |t1: T| -> T {
        match theta2_max(t1, a2) {
            Some(t2) => side_work(design, &rest, t1, t2),
            None => -T::infinity(),
        }
    };
    let bracket = (hi1 - lo1) / c((n1 - 1) as f64) * c(1.5);
    let (mut ga, mut gb) = ((a1 - bracket).max(lo1), (a1 + bracket).min(hi1));
    let inv_phi = c::<T>(0.618_033_988_749_894_8);
    let mut x1 = gb - (gb - ga) * inv_phi;
    let mut x2 = ga + (gb - ga) * inv_phi;
    let mut f1 = score(x1);
    let mut f2 = score(x2);
    for _ in 0..90 {
        if f1 < f2 {
            ga = x1;
            x1 = x2;
            f1 = f2;
            x2 = ga + (gb - ga) * inv_phi;
            f2 = score(x2);
        } else {
            gb = x2;
            x2 = x1;
            f2 = f1;
            x1 = gb - (gb - ga) * inv_phi;
            f1 = score(x1);
        }
    }
    for t1_cand in [x1, x2, a1] {
        if let Some(t2_cand) = theta2_max(t1_cand, a2) {
            let w = side_work(design, &rest, t1_cand, t2_cand);
            if w > cur && pose_feasible(design, object, pc, t1_cand, t2_cand, slack) {
                cur = w;
            }
        }
    }

    let blocked = !closed_ok || cur < side_work(design, &rest, hi1, hi2) - c(1e-9);
    (cur, blocked)
}

/// Direct frictionless minimization of the system energy: each finger
/// independently maximizes its tendon work subject to non-penetration.
/// Errors with `OutsideReachable` when the disk limits neither finger.
pub fn frictionless_energy_oracle<T: Real>(
    design: &GrasperDesign<T>,
    object: &ObjectSpec<T>,
    p: Vec2<T>,
    command: &ActuationCommand<T>,
) -> Result<T, GraspError> {
    if !placement_valid(design, object, p) {
        return Err(GraspError::OutsideReachable);
    }
    let mut v = T::zero();
    let mut any_blocked = false;
    for side in [Side::Left, Side::Right] {
        let pc = canonical_point(p, side);
        let (work, blocked) = side_max_work(design, object, pc);
        any_blocked |= blocked;
        v = v - command.force(side) * work;
    }
    if any_blocked {
        Ok(v)
    } else {
        Err(GraspError::OutsideReachable)
    }
}
