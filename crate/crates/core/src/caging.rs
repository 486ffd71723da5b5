//! Gradient-descent trajectory classification and caging scores.
//!
//! Each reachable grid point of an energy map seeds a unit-speed descent
//! along the interpolated energy gradient (fourth-order Runge-Kutta). The
//! terminal point is classified as an ejection, a stable rest (tip
//! prehension), or a cage: a stable rest whose escape opening is smaller
//! than the object and whose center lies inside the link-palm polygon. The
//! map score sums `1 - L_open / 2r` over caged terminals.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::contact_solver::{
    finger_configuration, placement_valid, ActuationCommand, SolveOutcome,
};
use crate::energy_map::EnergyMap;
use crate::equilibrium::object_equilibrium;
use crate::error::GraspError;
use crate::geom::{point_segment_distance, segments_intersect, Vec2};
use crate::kinematics::{finger_chain, FingerConfig, GrasperDesign, ObjectSpec, Side};
use crate::scalar::{c, Real};

/// Gradient norm below which a non-equilibrium trajectory counts as stalled.
const STALL_GRADIENT: f64 = 1e-9;
/// Hard cap on integration steps.
const MAX_STEPS: usize = 10_000;

/// Terminal classification of a descent trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    Ejection,
    Stable,
    Caged,
}

/// One descent trajectory from a grid start point to its terminal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory<T> {
    pub points: Vec<Vec2<T>>,
    pub terminal: Vec2<T>,
    pub outcome: Outcome,
    /// Escape opening at the terminal; absent for ejections.
    pub l_open_at_terminal: Option<T>,
    pub steps: usize,
}

/// Aggregate caging score of one map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CagingScore<T> {
    pub lambda: T,
    pub n_caged: usize,
    pub n_tip: usize,
    pub n_ejected: usize,
}

impl<T: Real> CagingScore<T> {
    /// Total number of scored trajectories (one per reachable grid point).
    pub fn total_points(&self) -> usize {
        self.n_caged + self.n_tip + self.n_ejected
    }

    /// Grid-resolution-independent score `lambda / total_points` in [0, 1].
    pub fn normalized(&self) -> T {
        let n = self.total_points();
        if n == 0 {
            T::zero()
        } else {
            self.lambda / c(n as f64)
        }
    }
}

fn slope<T: Real>(a: Option<T>, b: Option<T>) -> Option<T> {
    match (a, b) {
        (Some(a), Some(b)) => Some(b - a),
        _ => None,
    }
}

/// Bilinear energy and gradient at a continuous palm point.
///
/// Cells with all four corners reachable use the exact bilinear surface;
/// cells touching the unreachable fringe fall back to the nearest reachable
/// corner value and one-sided difference slopes.
pub fn interpolated_energy_and_gradient<T: Real>(
    map: &EnergyMap<T>,
    p: Vec2<T>,
) -> Result<(T, Vec2<T>), GraspError> {
    let g = &map.grid;
    if g.nx < 2 || g.ny < 2 {
        return Err(GraspError::OutsideReachable);
    }
    if p.x < g.x0 || p.x > g.x_max() || p.y < g.y0 || p.y > g.y_max() {
        return Err(GraspError::OutsideReachable);
    }
    let fx_abs = (p.x - g.x0) / g.dx;
    let fy_abs = (p.y - g.y0) / g.dy;
    let ix = (fx_abs.floor().to_usize().unwrap_or(0)).min(g.nx - 2);
    let iy = (fy_abs.floor().to_usize().unwrap_or(0)).min(g.ny - 2);
    let fx = fx_abs - c(ix as f64);
    let fy = fy_abs - c(iy as f64);
    let v00 = map.cell(ix, iy).v;
    let v10 = map.cell(ix + 1, iy).v;
    let v01 = map.cell(ix, iy + 1).v;
    let v11 = map.cell(ix + 1, iy + 1).v;
    if let (Some(v00), Some(v10), Some(v01), Some(v11)) = (v00, v10, v01, v11) {
        let one = T::one();
        let v = (one - fx) * (one - fy) * v00
            + fx * (one - fy) * v10
            + (one - fx) * fy * v01
            + fx * fy * v11;
        let gx = ((one - fy) * (v10 - v00) + fy * (v11 - v01)) / g.dx;
        let gy = ((one - fx) * (v01 - v00) + fx * (v11 - v10)) / g.dy;
        return Ok((v, Vec2::new(gx, gy)));
    }
    // Fringe cell: nearest reachable corner value, one-sided slopes.
    let one = T::one();
    let corners = [
        (v00, fx * fx + fy * fy),
        (v10, (one - fx) * (one - fx) + fy * fy),
        (v01, fx * fx + (one - fy) * (one - fy)),
        (v11, (one - fx) * (one - fx) + (one - fy) * (one - fy)),
    ];
    let mut value: Option<(T, T)> = None;
    for (v, d2) in corners {
        if let Some(v) = v {
            if value.map_or(true, |(_, best)| d2 < best) {
                value = Some((v, d2));
            }
        }
    }
    let Some((v, _)) = value else {
        return Err(GraspError::OutsideReachable);
    };
    let half = c::<T>(0.5);
    let pick = |near: Option<T>, far: Option<T>| near.or(far).unwrap_or_else(T::zero);
    let (x_lo, x_hi) = (slope(v00, v10), slope(v01, v11));
    let gx = if fy <= half {
        pick(x_lo, x_hi)
    } else {
        pick(x_hi, x_lo)
    } / g.dx;
    let (y_lo, y_hi) = (slope(v00, v01), slope(v10, v11));
    let gy = if fx <= half {
        pick(y_lo, y_hi)
    } else {
        pick(y_hi, y_lo)
    } / g.dy;
    Ok((v, Vec2::new(gx, gy)))
}

/// Escape opening between the two finger chains: the smallest of the
/// tip-to-opposite-chain distances and the tip-to-tip distance; zero when
/// the chains cross.
pub fn l_open<T: Real>(
    design: &GrasperDesign<T>,
    left: &FingerConfig<T>,
    right: &FingerConfig<T>,
) -> T {
    let (lb, lj2, ltip) = finger_chain(design, left);
    let (rb, rj2, rtip) = finger_chain(design, right);
    let crossed = [(lb, lj2), (lj2, ltip)].iter().any(|&(a, b)| {
        [(rb, rj2), (rj2, rtip)]
            .iter()
            .any(|&(cx, d)| segments_intersect(a, b, cx, d))
    });
    if crossed {
        return T::zero();
    }
    let chain_dist = |p: Vec2<T>, b: Vec2<T>, j2: Vec2<T>, tip: Vec2<T>| {
        point_segment_distance(p, b, j2).min(point_segment_distance(p, j2, tip))
    };
    chain_dist(ltip, rb, rj2, rtip)
        .min(chain_dist(rtip, lb, lj2, ltip))
        .min((ltip - rtip).norm())
}

fn link_palm_polygon<T: Real>(
    design: &GrasperDesign<T>,
    left: &FingerConfig<T>,
    right: &FingerConfig<T>,
) -> [Vec2<T>; 6] {
    let (lb, lj2, ltip) = finger_chain(design, left);
    let (rb, rj2, rtip) = finger_chain(design, right);
    [lb, lj2, ltip, rtip, rj2, rb]
}

fn polygon_self_intersects<T: Real>(poly: &[Vec2<T>; 6]) -> bool {
    let n = poly.len();
    for i in 0..n {
        for j in i + 1..n {
            // Skip adjacent edges (shared vertex).
            if j == i + 1 || (i == 0 && j == n - 1) {
                continue;
            }
            if segments_intersect(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n]) {
                return true;
            }
        }
    }
    false
}

fn winding_contains<T: Real>(poly: &[Vec2<T>; 6], p: Vec2<T>) -> bool {
    let mut wn = 0i32;
    for i in 0..poly.len() {
        let a = poly[i];
        let b = poly[(i + 1) % poly.len()];
        if a.y <= p.y {
            if b.y > p.y && (b - a).cross(p - a) > T::zero() {
                wn += 1;
            }
        } else if b.y <= p.y && (b - a).cross(p - a) < T::zero() {
            wn -= 1;
        }
    }
    wn != 0
}

/// True iff `p` lies inside (or on the boundary of) the closed polygon
/// formed by the two finger chains and the palm edge between the bases.
pub fn contained<T: Real>(
    design: &GrasperDesign<T>,
    left: &FingerConfig<T>,
    right: &FingerConfig<T>,
    p: Vec2<T>,
) -> bool {
    let poly = link_palm_polygon(design, left, right);
    let eps = c::<T>(1e-9);
    for i in 0..poly.len() {
        if point_segment_distance(p, poly[i], poly[(i + 1) % poly.len()]) < eps {
            return true;
        }
    }
    if polygon_self_intersects(&poly) {
        // Crossed chains: the even-odd rule is ambiguous, use winding.
        return winding_contains(&poly, p);
    }
    let mut inside = false;
    for i in 0..poly.len() {
        let a = poly[i];
        let b = poly[(i + 1) % poly.len()];
        if (a.y > p.y) != (b.y > p.y) {
            let t = (p.y - a.y) / (b.y - a.y);
            if a.x + t * (b.x - a.x) > p.x {
                inside = !inside;
            }
        }
    }
    inside
}

/// Resting configuration of one finger at `p`: the solved equilibrium, or
/// the fully closed pose when the finger never rests on the disk.
fn resting_config<T: Real>(outcome: &SolveOutcome<T>, design: &GrasperDesign<T>, side: Side) -> FingerConfig<T> {
    match outcome.reached() {
        Some(s) => s.config.clone(),
        None => {
            let (t1, t2) = design.closed_pose();
            FingerConfig::free(side, t1, t2)
        }
    }
}

fn classify_full<T: Real>(
    design: &GrasperDesign<T>,
    object: &ObjectSpec<T>,
    command: &ActuationCommand<T>,
    p: Vec2<T>,
) -> (Outcome, Option<T>) {
    if !placement_valid(design, object, p) {
        return (Outcome::Ejection, None);
    }
    let left = finger_configuration(design, object, p, command.force(Side::Left), Side::Left);
    let right = finger_configuration(design, object, p, command.force(Side::Right), Side::Right);
    if !object_equilibrium(&left, &right, object, p) {
        return (Outcome::Ejection, None);
    }
    let lc = resting_config(&left, design, Side::Left);
    let rc = resting_config(&right, design, Side::Right);
    let opening = l_open(design, &lc, &rc);
    let caged = opening < c::<T>(2.0) * object.r && contained(design, &lc, &rc, p);
    (
        if caged { Outcome::Caged } else { Outcome::Stable },
        Some(opening),
    )
}

/// Terminal outcome at a fixed point: ejection when no resting equilibrium
/// exists there, stable when it does, caged when the escape opening is
/// smaller than the disk and the center is contained.
pub fn classify_endpoint<T: Real>(
    design: &GrasperDesign<T>,
    object: &ObjectSpec<T>,
    command: &ActuationCommand<T>,
    p: Vec2<T>,
) -> Outcome {
    classify_full(design, object, command, p).0
}

/// Grid cell containing `p`, if inside the grid bounds.
fn containing_cell<T: Real>(map: &EnergyMap<T>, p: Vec2<T>) -> Option<(usize, usize)> {
    let g = &map.grid;
    if g.nx < 2 || g.ny < 2 || p.x < g.x0 || p.x > g.x_max() || p.y < g.y0 || p.y > g.y_max() {
        return None;
    }
    let ix = ((p.x - g.x0) / g.dx)
        .floor()
        .to_usize()
        .unwrap_or(0)
        .min(g.nx - 2);
    let iy = ((p.y - g.y0) / g.dy)
        .floor()
        .to_usize()
        .unwrap_or(0)
        .min(g.ny - 2);
    Some((ix, iy))
}

/// True when a corner node of the cell is flagged as an equilibrium; gates
/// the expensive continuous-point equilibrium confirmation.
fn near_equilibrium_cell<T: Real>(map: &EnergyMap<T>, cell: (usize, usize)) -> bool {
    let (ix, iy) = cell;
    [(0, 0), (1, 0), (0, 1), (1, 1)]
        .iter()
        .any(|&(dx, dy)| map.cell(ix + dx, iy + dy).equilibrium)
}

/// Unit-speed steepest-descent trajectory from `p0` to its terminal.
///
/// Fourth-order Runge-Kutta with step `0.5 * dx`; steps that would raise
/// the interpolated energy are halved until they descend. Termination:
/// confirmed object equilibrium (stable/caged), exit from the reachable
/// set (ejection), vanishing gradient or exhausted step budget (stalled,
/// scored as ejection).
pub fn follow_gradient<T: Real>(map: &EnergyMap<T>, p0: Vec2<T>) -> Trajectory<T> {
    let design = &map.design;
    let object = &map.object;
    let command = &map.command;
    let h0 = c::<T>(0.5) * map.grid.dx;
    let mut points = vec![p0];
    let mut p = p0;

    let dir = |q: Vec2<T>| -> Result<Option<Vec2<T>>, GraspError> {
        let (_, g) = interpolated_energy_and_gradient(map, q)?;
        let n = g.norm();
        if n < c(STALL_GRADIENT) {
            return Ok(None);
        }
        Ok(Some(g.scale(-T::one() / n)))
    };

    let eject = |points: Vec<Vec2<T>>, terminal: Vec2<T>| Trajectory {
        steps: points.len() - 1,
        points,
        terminal,
        outcome: Outcome::Ejection,
        l_open_at_terminal: None,
    };

    // Cells whose continuous-point equilibrium confirmation already failed;
    // skipped on revisits so boundary-hugging paths stay cheap.
    let mut ruled_out: std::collections::HashSet<(usize, usize)> = Default::default();
    let mut flat_steps = 0usize;
    for _ in 0..MAX_STEPS {
        if let Some(cell) = containing_cell(map, p) {
            if near_equilibrium_cell(map, cell) && !ruled_out.contains(&cell) {
                let (outcome, opening) = classify_full(design, object, command, p);
                if outcome != Outcome::Ejection {
                    return Trajectory {
                        steps: points.len() - 1,
                        points,
                        terminal: p,
                        outcome,
                        l_open_at_terminal: opening,
                    };
                }
                ruled_out.insert(cell);
            }
        }
        let (v_here, _) = match interpolated_energy_and_gradient(map, p) {
            Ok(x) => x,
            Err(_) => return eject(points, p),
        };
        let k1 = match dir(p) {
            Ok(Some(d)) => d,
            Ok(None) => return eject(points, p),
            Err(_) => return eject(points, p),
        };
        // Halve the step until the energy does not increase.
        let mut h = h0;
        let mut accepted = None;
        for _ in 0..45 {
            let half = h / c(2.0);
            let sub = |q: Vec2<T>| dir(q).ok().flatten();
            let step = (|| {
                let k2 = sub(p + k1.scale(half))?;
                let k3 = sub(p + k2.scale(half))?;
                let k4 = sub(p + k3.scale(h))?;
                Some(p + (k1 + k2.scale(c(2.0)) + k3.scale(c(2.0)) + k4).scale(h / c(6.0)))
            })();
            let Some(next) = step else {
                // A sub-evaluation left the reachable set: take the Euler
                // exit step and classify as ejection.
                let exit = p + k1.scale(h);
                points.push(exit);
                return eject(points, exit);
            };
            match interpolated_energy_and_gradient(map, next) {
                Ok((v_next, _)) if v_next <= v_here + c(1e-12) => {
                    accepted = Some((next, v_next));
                    break;
                }
                Ok(_) => h = half,
                Err(_) => {
                    points.push(next);
                    return eject(points, next);
                }
            }
        }
        let Some((next, v_next)) = accepted else {
            // No descending step exists: stalled.
            return eject(points, p);
        };
        // Stall detection: a trail of steps with no measurable descent
        // means the path is trapped at an interpolation kink.
        if v_here - v_next < c::<T>(1e-14) * (T::one() + v_here.abs()) {
            flat_steps += 1;
            if flat_steps > 25 {
                return eject(points, next);
            }
        } else {
            flat_steps = 0;
        }
        points.push(next);
        p = next;
    }
    eject(points, p)
}

/// Descent trajectories from every reachable grid point, in row-major grid
/// order.
pub fn map_trajectories<T: Real>(map: &EnergyMap<T>) -> Vec<Trajectory<T>> {
    let starts: Vec<Vec2<T>> = (0..map.grid.ny)
        .flat_map(|iy| (0..map.grid.nx).map(move |ix| (ix, iy)))
        .filter(|&(ix, iy)| map.cell(ix, iy).reachable)
        .map(|(ix, iy)| map.grid.point(ix, iy))
        .collect();
    starts
        .into_par_iter()
        .map(|p| follow_gradient(map, p))
        .collect()
}

/// Caging score over a set of trajectories: caged terminals contribute
/// `1 - L_open / 2r`, everything else zero.
pub fn score_trajectories<T: Real>(
    object: &ObjectSpec<T>,
    trajectories: &[Trajectory<T>],
) -> CagingScore<T> {
    let mut score = CagingScore {
        lambda: T::zero(),
        n_caged: 0,
        n_tip: 0,
        n_ejected: 0,
    };
    for t in trajectories {
        match t.outcome {
            Outcome::Caged => {
                score.n_caged += 1;
                let opening = t.l_open_at_terminal.unwrap_or_else(T::zero);
                score.lambda = score.lambda + (T::one() - opening / (c::<T>(2.0) * object.r));
            }
            Outcome::Stable => score.n_tip += 1,
            Outcome::Ejection => score.n_ejected += 1,
        }
    }
    score
}

/// Score a full map: descend from every reachable grid point and sum the
/// caged contributions.
pub fn caging_score<T: Real>(map: &EnergyMap<T>) -> CagingScore<T> {
    score_trajectories(&map.object, &map_trajectories(map))
}

#[derive(Serialize)]
struct TrajectoryLine<'a, T> {
    start: &'a Vec2<T>,
    terminal: &'a Vec2<T>,
    outcome: Outcome,
    l_open: Option<T>,
    steps: usize,
}

/// Writes trajectories as JSON lines: start, terminal, outcome, L_open,
/// steps — one object per line.
pub fn write_trajectories<T: Real + Serialize, W: Write>(
    out: &mut W,
    trajectories: &[Trajectory<T>],
) -> Result<(), GraspError> {
    for t in trajectories {
        let line = TrajectoryLine {
            start: &t.points[0],
            terminal: &t.terminal,
            outcome: t.outcome,
            l_open: t.l_open_at_terminal,
            steps: t.steps,
        };
        serde_json::to_writer(&mut *out, &line)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy_map::{build_energy_map, Cell, GridSpec};
    use crate::kinematics::ContactMode;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn design() -> GrasperDesign<f64> {
        GrasperDesign::new(2.0, 1.6, 0.2, 0.14, 2.0).unwrap()
    }

    /// Map whose V is a given analytic field over a fully reachable grid.
    fn synthetic_map(f: impl Fn(f64, f64) -> f64, grid: GridSpec<f64>) -> EnergyMap<f64> {
        let d = design();
        let o = ObjectSpec::new(0.4, 0.0).unwrap();
        let cells = (0..grid.ny)
            .flat_map(|iy| (0..grid.nx).map(move |ix| (ix, iy)))
            .map(|(ix, iy)| {
                let p = grid.point(ix, iy);
                Cell {
                    reachable: true,
                    v: Some(f(p.x, p.y)),
                    equilibrium: false,
                    mode_left: ContactMode::Free,
                    mode_right: ContactMode::Free,
                }
            })
            .collect();
        EnergyMap {
            design: d,
            object: o,
            command: ActuationCommand::symmetric(1.0),
            grid,
            cells,
        }
    }

    fn unit_grid(n: usize) -> GridSpec<f64> {
        GridSpec {
            x0: -1.0,
            y0: 0.5,
            dx: 2.0 / (n - 1) as f64,
            dy: 2.0 / (n - 1) as f64,
            nx: n,
            ny: n,
        }
    }

    #[test]
    fn interpolation_exact_at_nodes_and_on_linear_fields() {
        let grid = unit_grid(11);
        let map = synthetic_map(|x, y| 3.0 * x - 2.0 * y + 0.25, grid);
        for iy in 0..grid.ny {
            for ix in 0..grid.nx {
                let p = grid.point(ix, iy);
                let (v, g) = interpolated_energy_and_gradient(&map, p).unwrap();
                assert!((v - (3.0 * p.x - 2.0 * p.y + 0.25)).abs() < 1e-12);
                assert!((g.x - 3.0).abs() < 1e-9 && (g.y + 2.0).abs() < 1e-9);
            }
        }
        // Interior non-node points are exact too on a linear field.
        let (v, g) = interpolated_energy_and_gradient(&map, Vec2::new(0.13, 1.71)).unwrap();
        assert!((v - (3.0 * 0.13 - 2.0 * 1.71 + 0.25)).abs() < 1e-12);
        assert!((g.x - 3.0).abs() < 1e-9 && (g.y + 2.0).abs() < 1e-9);
    }

    #[test]
    fn interpolated_gradient_tracks_smooth_field() {
        let grid = unit_grid(101);
        let f = |x: f64, y: f64| (2.0 * x).sin() * (1.5 * y).cos();
        let map = synthetic_map(f, grid);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let p = Vec2::new(rng.gen_range(-0.9..0.9), rng.gen_range(0.6..2.3));
            let (v, g) = interpolated_energy_and_gradient(&map, p).unwrap();
            let gx = 2.0 * (2.0 * p.x).cos() * (1.5 * p.y).cos();
            let gy = -1.5 * (2.0 * p.x).sin() * (1.5 * p.y).sin();
            assert!((v - f(p.x, p.y)).abs() < 5e-4);
            assert!((g.x - gx).abs() < 5.0 * grid.dx, "gx {} vs {}", g.x, gx);
            assert!((g.y - gy).abs() < 5.0 * grid.dy);
        }
    }

    #[test]
    fn unreachable_cell_interpolation_errors() {
        let grid = unit_grid(5);
        let mut map = synthetic_map(|_, _| 1.0, grid);
        for cell in &mut map.cells {
            *cell = Cell {
                reachable: false,
                v: None,
                equilibrium: false,
                mode_left: ContactMode::Free,
                mode_right: ContactMode::Free,
            };
        }
        assert!(matches!(
            interpolated_energy_and_gradient(&map, Vec2::new(0.0, 1.5)),
            Err(GraspError::OutsideReachable)
        ));
        // Outside the grid bounds as well.
        let map = synthetic_map(|_, _| 1.0, grid);
        assert!(interpolated_energy_and_gradient(&map, Vec2::new(5.0, 1.0)).is_err());
    }

    #[test]
    fn descent_on_synthetic_bowl_reaches_minimum() {
        let grid = unit_grid(81);
        let (cx, cy) = (0.2, 1.4);
        let map = synthetic_map(|x, y| (x - cx).powi(2) + (y - cy).powi(2), grid);
        let t = follow_gradient(&map, Vec2::new(-0.8, 2.2));
        // No physical equilibrium on a synthetic map: the trajectory stalls
        // at the bowl bottom and is scored as an ejection.
        assert_eq!(t.outcome, Outcome::Ejection);
        assert!((t.terminal - Vec2::new(cx, cy)).norm() < 3.0 * grid.dx);
        for w in t.points.windows(2) {
            let (v0, _) = interpolated_energy_and_gradient(&map, w[0]).unwrap();
            let (v1, _) = interpolated_energy_and_gradient(&map, w[1]).unwrap();
            assert!(v1 <= v0 + 1e-9, "descent violated: {v0} -> {v1}");
        }
    }

    #[test]
    fn outward_slope_ejects_off_grid() {
        let grid = unit_grid(41);
        let map = synthetic_map(|x, _| -x, grid);
        let t = follow_gradient(&map, Vec2::new(0.5, 1.5));
        assert_eq!(t.outcome, Outcome::Ejection);
        assert!(t.terminal.x > 0.95);
    }

    #[test]
    fn l_open_matches_examples_and_sampling_oracle() {
        let d = design();
        // Symmetric pinch with tips nearly touching.
        let lc = FingerConfig::free(Side::Left, 1.2, 1.1);
        let rc = FingerConfig::free(Side::Right, 1.2, 1.1);
        let (_, _, ltip) = finger_chain(&d, &lc);
        let (_, _, rtip) = finger_chain(&d, &rc);
        let gap = (ltip - rtip).norm();
        let exact = l_open(&d, &lc, &rc);
        assert!(exact <= gap + 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..120 {
            let lc = FingerConfig::free(
                Side::Left,
                rng.gen_range(0.0..std::f64::consts::PI),
                rng.gen_range(-0.087..1.57),
            );
            let rc = FingerConfig::free(
                Side::Right,
                rng.gen_range(0.0..std::f64::consts::PI),
                rng.gen_range(-0.087..1.57),
            );
            let exact = l_open(&d, &lc, &rc);
            // Dense sampling of the chains as the oracle.
            let (lb, lj2, ltip) = finger_chain(&d, &lc);
            let (rb, rj2, rtip) = finger_chain(&d, &rc);
            let sample = |a: Vec2<f64>, b: Vec2<f64>, k: usize| -> Vec<Vec2<f64>> {
                (0..=k)
                    .map(|i| a + (b - a).scale(i as f64 / k as f64))
                    .collect()
            };
            let mut right_chain = sample(rb, rj2, 2000);
            right_chain.extend(sample(rj2, rtip, 2000));
            let mut left_chain = sample(lb, lj2, 2000);
            left_chain.extend(sample(lj2, ltip, 2000));
            let crossed = [(lb, lj2), (lj2, ltip)].iter().any(|&(a, b)| {
                [(rb, rj2), (rj2, rtip)]
                    .iter()
                    .any(|&(cc, dd)| segments_intersect(a, b, cc, dd))
            });
            let oracle = if crossed {
                0.0
            } else {
                let d1 = right_chain
                    .iter()
                    .map(|&q| (ltip - q).norm())
                    .fold(f64::MAX, f64::min);
                let d2 = left_chain
                    .iter()
                    .map(|&q| (rtip - q).norm())
                    .fold(f64::MAX, f64::min);
                d1.min(d2).min((ltip - rtip).norm())
            };
            assert!(
                (exact - oracle).abs() < 1e-3,
                "l_open {exact} vs sampled {oracle}"
            );
        }
    }

    #[test]
    fn crossed_chains_have_zero_opening() {
        let d = design();
        // Strongly curled fingers cross on a narrow palm.
        let dn = GrasperDesign::new(2.0, 1.6, 0.2, 0.14, 0.4).unwrap();
        let lc = FingerConfig::free(Side::Left, 1.57, 1.4);
        let rc = FingerConfig::free(Side::Right, 1.57, 1.4);
        assert_eq!(l_open(&dn, &lc, &rc), 0.0);
        // Wide open fingers do not cross.
        let lo = FingerConfig::free(Side::Left, 0.1, 0.0);
        let ro = FingerConfig::free(Side::Right, 0.1, 0.0);
        assert!(l_open(&d, &lo, &ro) > 0.0);
    }

    #[test]
    fn containment_basics_and_winding_agreement() {
        let d = design();
        let lc = FingerConfig::free(Side::Left, 1.1, 0.8);
        let rc = FingerConfig::free(Side::Right, 1.1, 0.8);
        assert!(!contained(&d, &lc, &rc, Vec2::new(0.0, -0.5)));
        assert!(contained(&d, &lc, &rc, Vec2::new(0.0, 1.0)));

        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let mut checked = 0;
        for _ in 0..10_000 {
            let lc = FingerConfig::free(
                Side::Left,
                rng.gen_range(0.0..std::f64::consts::PI),
                rng.gen_range(-0.087..1.57),
            );
            let rc = FingerConfig::free(
                Side::Right,
                rng.gen_range(0.0..std::f64::consts::PI),
                rng.gen_range(-0.087..1.57),
            );
            let p = Vec2::new(rng.gen_range(-3.0..3.0), rng.gen_range(-1.0..4.0));
            let poly = link_palm_polygon(&d, &lc, &rc);
            if polygon_self_intersects(&poly) {
                continue;
            }
            // Skip points too close to the boundary for a crisp verdict.
            if (0..6).any(|i| point_segment_distance(p, poly[i], poly[(i + 1) % 6]) < 1e-6) {
                continue;
            }
            assert_eq!(
                contained(&d, &lc, &rc, p),
                winding_contains(&poly, p),
                "disagreement at {p:?}"
            );
            checked += 1;
        }
        assert!(checked > 5_000);
    }

    #[test]
    fn real_map_scoring_is_consistent() {
        let d = design();
        let o = ObjectSpec::new(0.6, 0.5).unwrap();
        let cmd = ActuationCommand::symmetric(1.0);
        let grid = GridSpec::with_resolution(&d, &o, 0.2);
        let map = build_energy_map(&d, &o, &cmd, grid).unwrap();
        let trajectories = map_trajectories(&map);
        assert_eq!(trajectories.len(), map.reachable_count());
        let score = score_trajectories(&map.object, &trajectories);
        assert_eq!(
            score.n_caged + score.n_tip + score.n_ejected,
            map.reachable_count()
        );
        assert!(score.lambda >= 0.0);
        assert!(score.lambda <= score.n_caged as f64 + 1e-12);
        // A palm-width disk on this design deep in the grasp ends caged.
        assert!(score.n_caged > 0, "expected caged outcomes");
        for t in &trajectories {
            if t.outcome == Outcome::Caged {
                let l = t.l_open_at_terminal.unwrap();
                assert!(l < 2.0 * o.r);
                // Re-assert the caged conditions independently at the
                // terminal.
                let left =
                    finger_configuration(&d, &o, t.terminal, cmd.f_left, Side::Left);
                let right =
                    finger_configuration(&d, &o, t.terminal, cmd.f_right, Side::Right);
                assert!(object_equilibrium(&left, &right, &o, t.terminal));
                let lc = resting_config(&left, &d, Side::Left);
                let rcfg = resting_config(&right, &d, Side::Right);
                assert!(contained(&d, &lc, &rcfg, t.terminal));
            }
            // Descent property along the whole trajectory.
            let mut prev = f64::MAX;
            for q in &t.points {
                if let Ok((v, _)) = interpolated_energy_and_gradient(&map, *q) {
                    assert!(v <= prev + 1e-9);
                    prev = v;
                }
            }
        }
    }

    #[test]
    fn equilibrium_start_terminates_immediately() {
        let d = design();
        let o = ObjectSpec::new(0.6, 0.5).unwrap();
        let cmd = ActuationCommand::symmetric(1.0);
        let grid = GridSpec::with_resolution(&d, &o, 0.2);
        let map = build_energy_map(&d, &o, &cmd, grid).unwrap();
        let eq = (0..grid.ny)
            .flat_map(|iy| (0..grid.nx).map(move |ix| (ix, iy)))
            .find(|&(ix, iy)| map.cell(ix, iy).equilibrium)
            .expect("map should have equilibrium cells");
        let p = grid.point(eq.0, eq.1);
        let t = follow_gradient(&map, p);
        assert_eq!(t.steps, 0);
        assert!(matches!(t.outcome, Outcome::Stable | Outcome::Caged));
        assert_eq!(t.terminal, p);
    }

    #[test]
    fn trajectory_jsonl_round_trips() {
        let grid = unit_grid(21);
        let map = synthetic_map(|x, y| x * x + (y - 1.5).powi(2), grid);
        let trajectories = vec![
            follow_gradient(&map, Vec2::new(-0.7, 2.1)),
            follow_gradient(&map, Vec2::new(0.9, 0.6)),
        ];
        let mut buf = Vec::new();
        write_trajectories(&mut buf, &trajectories).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        for (line, t) in lines.iter().zip(&trajectories) {
            let v: serde_json::Value = serde_json::from_str(line).unwrap();
            assert_eq!(v["steps"].as_u64().unwrap() as usize, t.steps);
            assert_eq!(v["terminal"]["x"].as_f64().unwrap(), t.terminal.x);
        }
    }

    #[test]
    fn scoring_example_arithmetic() {
        let o = ObjectSpec::new(0.4, 0.0).unwrap();
        let t: Trajectory<f64> = Trajectory {
            points: vec![Vec2::new(0.0, 1.0)],
            terminal: Vec2::new(0.0, 1.0),
            outcome: Outcome::Caged,
            l_open_at_terminal: Some(0.3),
            steps: 0,
        };
        let s = score_trajectories(&o, &[t]);
        assert!((s.lambda - 0.625).abs() < 1e-12);
        assert_eq!(s.n_caged, 1);
    }
}
