//! Manipulation capability of a variable grasper: per-point hulls of
//! caging-score-scaled contact wrenches over a family of designs and
//! actuation commands, and the summed inscribed-radius metric.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::contact_solver::{finger_configuration, placement_valid, ActuationCommand};
use crate::energy_map::GridSpec;
use crate::equilibrium::{transmitted_wrenches, Wrench, WrenchSet};
use crate::error::GraspError;
use crate::geom::Vec2;
use crate::hull::{inscribed_radius, origin_in_convex_hull};
use crate::kinematics::{GrasperDesign, ObjectSpec, Side};
use crate::scalar::{c, Real};

/// A variable grasper: the geometries it can realize and the actuation
/// commands available to each of them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrasperFamily<T> {
    pub designs: Vec<GrasperDesign<T>>,
    pub commands: Vec<ActuationCommand<T>>,
    pub label: String,
}

impl<T: Real> GrasperFamily<T> {
    pub fn new(
        designs: Vec<GrasperDesign<T>>,
        commands: Vec<ActuationCommand<T>>,
        label: impl Into<String>,
    ) -> Result<Self, GraspError> {
        if designs.is_empty() || commands.is_empty() {
            return Err(GraspError::InvalidConfig(
                "a grasper family needs at least one design and one command".into(),
            ));
        }
        Ok(Self {
            designs,
            commands,
            label: label.into(),
        })
    }

    pub fn pair_count(&self) -> usize {
        self.designs.len() * self.commands.len()
    }
}

fn same_geometry<T: Real>(a: &GrasperDesign<T>, b: &GrasperDesign<T>) -> bool {
    a.l1 == b.l1 && a.l2 == b.l2 && a.r1 == b.r1 && a.r2 == b.r2 && a.w == b.w
}

/// Variable-palm family: each base design crossed with the palm-width grid,
/// driven by every force split `(f, alpha - f)` on the `force_step` lattice.
pub fn scenario_a_family<T: Real>(
    base_designs: &[GrasperDesign<T>],
    w_grid: &[T],
    alpha: T,
    force_step: T,
) -> Result<GrasperFamily<T>, GraspError> {
    let mut designs: Vec<GrasperDesign<T>> = Vec::new();
    for base in base_designs {
        for &w in w_grid {
            let d = GrasperDesign::new(base.l1, base.l2, base.r1, base.r2, w)?;
            if !designs.iter().any(|e| same_geometry(e, &d)) {
                designs.push(d);
            }
        }
    }
    let splits = (alpha / force_step).to_f64().map(|x| x.round()).unwrap_or(0.0) as usize;
    let mut commands = Vec::new();
    for i in 1..splits {
        let f = force_step * c(i as f64);
        commands.push(ActuationCommand::new(f, alpha - f)?);
    }
    GrasperFamily::new(designs, commands, "scenario-a")
}

/// Fully variable geometry driven by a single symmetric unit command.
pub fn scenario_b_family<T: Real>(
    designs: Vec<GrasperDesign<T>>,
) -> Result<GrasperFamily<T>, GraspError> {
    GrasperFamily::new(designs, vec![ActuationCommand::symmetric(T::one())], "scenario-b")
}

/// Convex hull of the scaled contact wrenches achievable at one point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointHull<T> {
    /// Scaled wrenches of every motion-imparting (design, command) pair.
    pub vertices: Vec<Wrench<T>>,
    /// Origin-centered inscribed-sphere radius; 0 unless the origin is
    /// strictly inside the full-dimensional hull.
    pub radius: T,
    /// (design index, command index) pairs whose wrenches were included.
    pub contributing: Vec<(usize, usize)>,
}

/// Cone-edge wrenches of both fingers under `command`, scaled by the
/// normalized caging score; empty when neither finger reaches the object.
pub fn command_wrench_set<T: Real>(
    design: &GrasperDesign<T>,
    object: &ObjectSpec<T>,
    p: Vec2<T>,
    command: &ActuationCommand<T>,
    lambda_hat: T,
) -> WrenchSet<T> {
    let mut set = WrenchSet::default();
    if !placement_valid(design, object, p) {
        return set;
    }
    for (side, f) in [(Side::Left, command.f_left), (Side::Right, command.f_right)] {
        let outcome = finger_configuration(design, object, p, f, side);
        if let Some(sol) = outcome.reached() {
            // Blocked limit/corner reactions impart no controllable wrench.
            let ws = transmitted_wrenches(sol, object, p);
            let scaled = WrenchSet {
                wrenches: ws.wrenches.iter().map(|w| w.scaled(lambda_hat)).collect(),
                provenance: ws.provenance.clone(),
            };
            set.extend(&scaled);
        }
    }
    set
}

/// Aggregate wrench hull at `p` over every (design, command) pair of the
/// family whose own wrench set does not already balance the object there.
///
/// Finger configurations are independent of the tendon-force magnitude and
/// wrenches are linear in it, so each design is solved once per side at unit
/// force and per-command sets are obtained by scaling.
pub fn point_hull<T: Real>(
    family: &GrasperFamily<T>,
    object: &ObjectSpec<T>,
    p: Vec2<T>,
    lambda_hats: &[T],
) -> PointHull<T> {
    assert_eq!(lambda_hats.len(), family.designs.len());
    let mut vertices: Vec<Wrench<T>> = Vec::new();
    let mut contributing = Vec::new();
    for (j, design) in family.designs.iter().enumerate() {
        let lh = lambda_hats[j];
        if !(lh > T::zero()) || !placement_valid(design, object, p) {
            continue;
        }
        // Full reaction sets (including blocked limit/corner reactions)
        // decide the equilibrium filter; only tendon-transmitted wrenches
        // enter the aggregate, since blocked reactions are not controllable.
        let unit = |side| {
            finger_configuration(design, object, p, T::one(), side)
                .reached()
                .map(|sol| (solution_wrenches(sol, object, p), transmitted_wrenches(sol, object, p)))
        };
        let left = unit(Side::Left);
        let right = unit(Side::Right);
        if left.is_none() && right.is_none() {
            continue;
        }
        for (i, cmd) in family.commands.iter().enumerate() {
            let mut full: Vec<Wrench<T>> = Vec::new();
            let mut set: Vec<Wrench<T>> = Vec::new();
            for (side_ws, f) in [(&left, cmd.f_left), (&right, cmd.f_right)] {
                if let Some((all, tx)) = side_ws {
                    full.extend(all.wrenches.iter().map(|w| w.scaled(f * lh)));
                    set.extend(tx.wrenches.iter().map(|w| w.scaled(f * lh)));
                }
            }
            let points: Vec<[T; 3]> = full.iter().map(|w| w.as_array()).collect();
            if set.is_empty() || origin_in_convex_hull(&points) {
                // The pair holds the object in equilibrium: it cannot impart
                // motion, so it is excluded from the aggregate.
                continue;
            }
            vertices.extend(set);
            contributing.push((j, i));
        }
    }
    let points: Vec<[T; 3]> = vertices.iter().map(|w| w.as_array()).collect();
    let radius = inscribed_radius(&points);
    PointHull {
        vertices,
        radius,
        contributing,
    }
}

/// Per-grid-point hull radii of a family against one object.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyEvaluation<T> {
    /// Sum of point-hull radii over the grid.
    pub metric: T,
    /// Row-major radii, one per grid point.
    pub point_radii: Vec<T>,
    /// (design, command) pairs contributing to a hull with positive radius.
    pub contributing: BTreeSet<(usize, usize)>,
}

/// Evaluates every grid point in parallel; summation is in grid order, so
/// the result is deterministic for a given parallelism-independent input.
pub fn evaluate_family<T: Real>(
    family: &GrasperFamily<T>,
    object: &ObjectSpec<T>,
    grid: &GridSpec<T>,
    lambda_hats: &[T],
) -> FamilyEvaluation<T> {
    let per_point: Vec<(T, Vec<(usize, usize)>)> = (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            let p = grid.point(idx % grid.nx, idx / grid.nx);
            let hull = point_hull(family, object, p, lambda_hats);
            let pairs = if hull.radius > T::zero() {
                hull.contributing
            } else {
                Vec::new()
            };
            (hull.radius, pairs)
        })
        .collect();
    let mut metric = T::zero();
    let mut point_radii = Vec::with_capacity(per_point.len());
    let mut contributing = BTreeSet::new();
    for (r, pairs) in per_point {
        metric += r;
        point_radii.push(r);
        contributing.extend(pairs);
    }
    FamilyEvaluation {
        metric,
        point_radii,
        contributing,
    }
}

/// Summed point-hull radius over the grid.
pub fn manipulation_metric<T: Real>(
    family: &GrasperFamily<T>,
    object: &ObjectSpec<T>,
    grid: &GridSpec<T>,
    lambda_hats: &[T],
) -> T {
    evaluate_family(family, object, grid, lambda_hats).metric
}

/// Fraction of each design parameter's family-wide span exercised by the
/// contributing designs; 0 when the family spans a single value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParameterRanges<T> {
    pub l1: T,
    pub l2: T,
    pub r1: T,
    pub r2: T,
    pub w: T,
}

pub fn parameter_range_report<T: Real>(
    family: &GrasperFamily<T>,
    contributing: &BTreeSet<(usize, usize)>,
) -> ParameterRanges<T> {
    let used: Vec<&GrasperDesign<T>> = contributing
        .iter()
        .map(|&(j, _)| &family.designs[j])
        .collect();
    let range = |get: fn(&GrasperDesign<T>) -> T| {
        let span = |designs: &mut dyn Iterator<Item = &GrasperDesign<T>>| {
            designs.fold(None::<(T, T)>, |acc, d| {
                let v = get(d);
                Some(match acc {
                    None => (v, v),
                    Some((lo, hi)) => (lo.min(v), hi.max(v)),
                })
            })
        };
        let (glo, ghi) = span(&mut family.designs.iter()).unwrap();
        match span(&mut used.iter().copied()) {
            Some((ulo, uhi)) if ghi > glo => (uhi - ulo) / (ghi - glo),
            _ => T::zero(),
        }
    };
    ParameterRanges {
        l1: range(|d| d.l1),
        l2: range(|d| d.l2),
        r1: range(|d| d.r1),
        r2: range(|d| d.r2),
        w: range(|d| d.w),
    }
}

/// Serializable summary of one family/object evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport<T> {
    pub scenario: String,
    pub object: ObjectSpec<T>,
    pub metric: T,
    pub points_evaluated: usize,
    pub nonzero_radius_points: usize,
    pub max_radius: T,
    pub parameter_ranges: ParameterRanges<T>,
}

pub fn metric_report<T: Real>(
    family: &GrasperFamily<T>,
    object: &ObjectSpec<T>,
    grid: &GridSpec<T>,
    lambda_hats: &[T],
) -> MetricReport<T> {
    let eval = evaluate_family(family, object, grid, lambda_hats);
    let nonzero = eval.point_radii.iter().filter(|&&r| r > T::zero()).count();
    let max_radius = eval
        .point_radii
        .iter()
        .fold(T::zero(), |a, &b| a.max(b));
    MetricReport {
        scenario: family.label.clone(),
        object: *object,
        metric: eval.metric,
        points_evaluated: grid.len(),
        nonzero_radius_points: nonzero,
        max_radius,
        parameter_ranges: parameter_range_report(family, &eval.contributing),
    }
}

/// Scenario A versus Scenario B for one object of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioComparison<T> {
    pub object_index: usize,
    pub object: ObjectSpec<T>,
    pub scenario_a: MetricReport<T>,
    pub scenario_b: MetricReport<T>,
}

fn design_key<T: Real>(d: &GrasperDesign<T>) -> [i64; 5] {
    let q = |v: T| (v.to_f64().unwrap_or(0.0) * 1e6).round() as i64;
    [q(d.l1), q(d.l2), q(d.r1), q(d.r2), q(d.w)]
}

/// Grid shared by a family for one object: the default grid of the design
/// with the largest footprint, so every member's reachable set fits.
pub fn family_grid<T: Real>(
    family: &GrasperFamily<T>,
    object: &ObjectSpec<T>,
    resolution: T,
) -> GridSpec<T> {
    let widest = family
        .designs
        .iter()
        .max_by(|a, b| {
            let extent = |d: &GrasperDesign<T>| d.w / c(2.0) + d.reach(object.r);
            extent(a)
                .partial_cmp(&extent(b))
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .expect("non-empty family");
    GridSpec::with_resolution(widest, object, resolution)
}

/// Builds both scenario families from sweep results and evaluates the
/// manipulation metric for each object (or the selected subset).
///
/// Scenario A uses the `top_k` best caging designs per object as bases,
/// crossed with the sweep's palm-width grid; Scenario B uses every sweep
/// design under the single symmetric command. Caging scores are normalized
/// per design from the stored records; designs without a stored score
/// (quarantined pairs) score zero.
pub fn compare_scenarios<T>(
    result: &crate::sweep::SweepResult<T>,
    config: &crate::sweep::SweepConfig<T>,
    top_k: usize,
    alpha: T,
    force_step: T,
    object_filter: Option<&[usize]>,
) -> Result<Vec<ScenarioComparison<T>>, GraspError>
where
    T: Real + Serialize,
{
    let index_of: std::collections::HashMap<[i64; 5], usize> = result
        .designs
        .iter()
        .enumerate()
        .map(|(i, d)| (design_key(d), i))
        .collect();
    let mut comparisons = Vec::new();
    for (oi, object) in result.objects.iter().enumerate() {
        if let Some(keep) = object_filter {
            if !keep.contains(&oi) {
                continue;
            }
        }
        let lambda_hat_of = |design: &GrasperDesign<T>| {
            index_of
                .get(&design_key(design))
                .and_then(|&di| result.record(di, oi))
                .and_then(|rec| rec.score.as_ref())
                .map(|s| s.normalized())
                .unwrap_or_else(T::zero)
        };

        let ranking = result
            .rankings
            .iter()
            .find(|r| r.object_index == oi)
            .ok_or_else(|| GraspError::InvalidConfig(format!("no ranking for object {oi}")))?;
        let bases: Vec<GrasperDesign<T>> = ranking
            .ranked_designs
            .iter()
            .take(top_k)
            .map(|&di| result.designs[di].clone())
            .collect();
        let family_a = scenario_a_family(&bases, &config.w.values(), alpha, force_step)?;
        let family_b = scenario_b_family(result.designs.clone())?;

        let evaluate = |family: &GrasperFamily<T>| {
            let lambda_hats: Vec<T> = family.designs.iter().map(lambda_hat_of).collect();
            let grid = family_grid(family, object, config.map_resolution);
            metric_report(family, object, &grid, &lambda_hats)
        };
        comparisons.push(ScenarioComparison {
            object_index: oi,
            object: *object,
            scenario_a: evaluate(&family_a),
            scenario_b: evaluate(&family_b),
        });
    }
    Ok(comparisons)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::null_wrench_contained;

    fn base_design() -> GrasperDesign<f64> {
        GrasperDesign::new(2.0, 1.6, 0.2, 0.14, 2.0).unwrap()
    }

    fn small_grid() -> GridSpec<f64> {
        GridSpec {
            x0: -0.6,
            y0: 0.6,
            dx: 0.6,
            dy: 0.5,
            nx: 3,
            ny: 3,
        }
    }

    #[test]
    fn scenario_a_counts() {
        let family = scenario_a_family(
            &[base_design()],
            &[0.4, 0.72, 1.04, 1.36, 1.68, 2.0],
            2.0,
            0.2,
        )
        .unwrap();
        assert_eq!(family.designs.len(), 6);
        assert_eq!(family.commands.len(), 9);
        assert_eq!(family.pair_count(), 54);
        for cmd in &family.commands {
            assert!((cmd.f_left + cmd.f_right - 2.0).abs() < 1e-12);
            assert!(cmd.f_left >= 0.2 - 1e-12 && cmd.f_left <= 1.8 + 1e-12);
        }
        // Duplicate palm widths collapse.
        let dup = scenario_a_family(&[base_design()], &[2.0, 2.0], 2.0, 0.5).unwrap();
        assert_eq!(dup.designs.len(), 1);
    }

    #[test]
    fn scenario_b_is_single_symmetric_command() {
        let family = scenario_b_family(vec![base_design()]).unwrap();
        assert_eq!(family.commands.len(), 1);
        assert_eq!(family.commands[0].f_left, family.commands[0].f_right);
        assert!(scenario_b_family::<f64>(vec![]).is_err());
    }

    #[test]
    fn zero_scale_gives_zero_wrenches() {
        let object = ObjectSpec::new(0.6, 0.5).unwrap();
        let cmd = ActuationCommand::symmetric(1.0);
        let ws = command_wrench_set(&base_design(), &object, Vec2::new(0.0, 1.0), &cmd, 0.0);
        assert!(!ws.is_empty());
        assert!(ws.wrenches.iter().all(|w| w.norm() == 0.0));
    }

    #[test]
    fn symmetric_grasp_wrench_set_mirrors() {
        let object = ObjectSpec::new(0.6, 0.5).unwrap();
        let cmd = ActuationCommand::symmetric(1.0);
        let ws = command_wrench_set(&base_design(), &object, Vec2::new(0.0, 1.0), &cmd, 1.0);
        assert!(ws.len() >= 4);
        for w in &ws.wrenches {
            let mirrored = ws.wrenches.iter().any(|m| {
                (m.fx + w.fx).abs() < 1e-9
                    && (m.fy - w.fy).abs() < 1e-9
                    && (m.tau_scaled + w.tau_scaled).abs() < 1e-9
            });
            assert!(mirrored, "no x-mirror partner for {w:?}");
        }
    }

    #[test]
    fn wrenches_scale_linearly_with_total_force() {
        let object = ObjectSpec::new(0.6, 0.5).unwrap();
        let p = Vec2::new(0.3, 1.1);
        let a = command_wrench_set(
            &base_design(),
            &object,
            p,
            &ActuationCommand::new(0.7, 1.3).unwrap(),
            1.0,
        );
        let b = command_wrench_set(
            &base_design(),
            &object,
            p,
            &ActuationCommand::new(1.4, 2.6).unwrap(),
            1.0,
        );
        assert_eq!(a.len(), b.len());
        assert!(!a.is_empty());
        for (wa, wb) in a.wrenches.iter().zip(&b.wrenches) {
            assert!((wb.fx - 2.0 * wa.fx).abs() < 1e-9 * (1.0 + wa.norm()));
            assert!((wb.fy - 2.0 * wa.fy).abs() < 1e-9 * (1.0 + wa.norm()));
            assert!((wb.tau_scaled - 2.0 * wa.tau_scaled).abs() < 1e-9 * (1.0 + wa.norm()));
        }
    }

    #[test]
    fn point_hull_matches_direct_command_sets() {
        // The unit-force solve + scaling shortcut must reproduce the
        // straightforward per-command wrench sets.
        let object = ObjectSpec::new(0.6, 0.3).unwrap();
        let p = Vec2::new(-0.4, 1.2);
        let family = scenario_a_family(&[base_design()], &[2.0], 2.0, 0.5).unwrap();
        let lh = vec![0.8];
        let hull = point_hull(&family, &object, p, &lh);
        let mut expected: Vec<Wrench<f64>> = Vec::new();
        for &(j, i) in &hull.contributing {
            let ws = command_wrench_set(
                &family.designs[j],
                &object,
                p,
                &family.commands[i],
                lh[j],
            );
            expected.extend(ws.wrenches);
        }
        assert_eq!(hull.vertices.len(), expected.len());
        for (a, b) in hull.vertices.iter().zip(&expected) {
            assert!((a.fx - b.fx).abs() < 1e-9);
            assert!((a.fy - b.fy).abs() < 1e-9);
            assert!((a.tau_scaled - b.tau_scaled).abs() < 1e-9);
        }
    }

    #[test]
    fn equilibrium_pairs_are_filtered_out() {
        // A symmetric command grasping on the centerline balances the
        // object, so a single-command symmetric family contributes nothing.
        let object = ObjectSpec::new(0.6, 0.5).unwrap();
        let family = scenario_b_family(vec![base_design()]).unwrap();
        let hull = point_hull(&family, &object, Vec2::new(0.0, 1.0), &[1.0]);
        assert!(hull.contributing.is_empty());
        assert!(hull.vertices.is_empty());
        assert_eq!(hull.radius, 0.0);
    }

    #[test]
    fn contributing_pairs_are_never_in_equilibrium() {
        let object = ObjectSpec::new(0.6, 0.1).unwrap();
        let family = scenario_a_family(&[base_design()], &[1.6, 2.0], 2.0, 0.2).unwrap();
        let lh = vec![0.5, 0.9];
        for &p in &[Vec2::new(0.0, 1.0), Vec2::new(0.5, 1.3), Vec2::new(-1.0, 0.9)] {
            let hull = point_hull(&family, &object, p, &lh);
            for &(j, i) in &hull.contributing {
                let ws = command_wrench_set(
                    &family.designs[j],
                    &object,
                    p,
                    &family.commands[i],
                    lh[j],
                );
                assert!(!null_wrench_contained(&ws), "equilibrium pair ({j},{i}) kept at {p:?}");
            }
        }
    }

    #[test]
    fn variable_palm_yields_positive_radius() {
        // A single geometry only pushes the object one way, but different
        // palm widths produce opposing contact wrenches whose union
        // surrounds the origin.
        let object = ObjectSpec::new(0.6, 0.1).unwrap();
        let family = scenario_a_family(&[base_design()], &[0.4, 1.2, 2.0], 2.0, 0.4).unwrap();
        let lh = vec![1.0; family.designs.len()];
        let hull = point_hull(&family, &object, Vec2::new(-0.5, 0.8), &lh);
        assert!(!hull.contributing.is_empty());
        assert!(hull.radius > 0.0, "radius {} not positive", hull.radius);
        assert!(origin_in_convex_hull(
            &hull.vertices.iter().map(|w| w.as_array()).collect::<Vec<_>>()
        ));
        // Hull radii inherit the left/right symmetry of the grasper.
        let mirror = point_hull(&family, &object, Vec2::new(0.5, 0.8), &lh);
        assert!((hull.radius - mirror.radius).abs() < 1e-9);
        // A single-width subfamily cannot surround the origin there.
        let narrow = scenario_a_family(&[base_design()], &[2.0], 2.0, 0.4).unwrap();
        let single = point_hull(&narrow, &object, Vec2::new(-0.5, 0.8), &[1.0]);
        assert_eq!(single.radius, 0.0);
    }

    #[test]
    fn metric_zero_when_all_scores_are_zero() {
        let object = ObjectSpec::new(0.6, 0.1).unwrap();
        let family = scenario_a_family(&[base_design()], &[2.0], 2.0, 0.5).unwrap();
        assert_eq!(
            manipulation_metric(&family, &object, &small_grid(), &[0.0]),
            0.0
        );
    }

    #[test]
    fn zero_score_designs_change_nothing() {
        let object = ObjectSpec::new(0.6, 0.1).unwrap();
        let two = scenario_a_family(&[base_design()], &[1.2, 2.0], 2.0, 0.5).unwrap();
        let one = GrasperFamily::new(
            vec![two.designs[1].clone()],
            two.commands.clone(),
            "sub",
        )
        .unwrap();
        let p = Vec2::new(0.2, 1.1);
        let with_dead = point_hull(&two, &object, p, &[0.0, 0.7]);
        let without = point_hull(&one, &object, p, &[0.7]);
        assert!((with_dead.radius - without.radius).abs() < 1e-9);
        assert_eq!(with_dead.vertices.len(), without.vertices.len());
    }

    #[test]
    fn metric_grows_with_family() {
        let object = ObjectSpec::new(0.6, 0.1).unwrap();
        let small = scenario_a_family(&[base_design()], &[2.0], 2.0, 0.5).unwrap();
        let mut large = small.clone();
        large.commands.push(ActuationCommand::new(0.2, 1.8).unwrap());
        large.commands.push(ActuationCommand::new(1.8, 0.2).unwrap());
        let grid = small_grid();
        let m_small = manipulation_metric(&small, &object, &grid, &[1.0]);
        let m_large = manipulation_metric(&large, &object, &grid, &[1.0]);
        assert!(m_large >= m_small - 1e-9, "{m_large} < {m_small}");
    }

    #[test]
    fn metric_is_order_invariant() {
        let object = ObjectSpec::new(0.6, 0.1).unwrap();
        let family = scenario_a_family(&[base_design()], &[1.6, 2.0], 2.0, 0.4).unwrap();
        let lh = [0.6, 1.0];
        let mut reversed = family.clone();
        reversed.designs.reverse();
        reversed.commands.reverse();
        let lh_rev = [1.0, 0.6];
        let grid = small_grid();
        let a = manipulation_metric(&family, &object, &grid, &lh);
        let b = manipulation_metric(&reversed, &object, &grid, &lh_rev);
        assert!((a - b).abs() < 1e-9, "{a} vs {b}");
    }

    #[test]
    fn parameter_ranges_follow_contributors() {
        let designs = vec![
            GrasperDesign::new(1.2, 0.8, 0.08, 0.06, 0.4).unwrap(),
            GrasperDesign::new(1.6, 1.2, 0.12, 0.10, 1.2).unwrap(),
            GrasperDesign::new(2.0, 1.6, 0.16, 0.14, 2.0).unwrap(),
        ];
        let family: GrasperFamily<f64> = GrasperFamily::new(
            designs,
            vec![ActuationCommand::symmetric(1.0)],
            "test",
        )
        .unwrap();
        let single: BTreeSet<_> = [(1usize, 0usize)].into_iter().collect();
        let r = parameter_range_report(&family, &single);
        assert_eq!((r.l1, r.l2, r.r1, r.r2, r.w), (0.0, 0.0, 0.0, 0.0, 0.0));
        let all: BTreeSet<_> = (0..3).map(|j| (j, 0)).collect();
        let r = parameter_range_report(&family, &all);
        for v in [r.l1, r.l2, r.r1, r.r2, r.w] {
            assert!((v - 1.0).abs() < 1e-12);
        }
        let pair: BTreeSet<_> = [(0usize, 0usize), (1, 0)].into_iter().collect();
        let r = parameter_range_report(&family, &pair);
        for v in [r.l1, r.l2, r.r1, r.r2, r.w] {
            assert!((0.0..=1.0).contains(&v));
        }
        assert!((r.l1 - 0.5).abs() < 1e-12);
        assert!((r.w - 0.5).abs() < 1e-12);
    }

    #[test]
    fn scenario_comparison_from_smoke_sweep() {
        let tmp = tempfile::TempDir::new().unwrap();
        let mut config = crate::sweep::SweepConfig::smoke();
        config.output_dir = tmp.path().join("store").to_string_lossy().into_owned();
        let result = crate::sweep::run_sweep(&config).unwrap();
        config.map_resolution = 0.5; // coarse evaluation grid keeps this fast
        let comparisons =
            compare_scenarios(&result, &config, 1, 2.0, 0.5, None).unwrap();
        assert_eq!(comparisons.len(), result.objects.len());
        for cmp in &comparisons {
            assert_eq!(cmp.scenario_a.scenario, "scenario-a");
            assert_eq!(cmp.scenario_b.scenario, "scenario-b");
            assert!(cmp.scenario_a.points_evaluated > 0);
            assert!(cmp.scenario_a.metric >= 0.0);
            assert!(cmp.scenario_b.metric >= 0.0);
            let json = serde_json::to_string(cmp).unwrap();
            let back: ScenarioComparison<f64> = serde_json::from_str(&json).unwrap();
            assert_eq!(&back, cmp);
        }
        // Filtering selects a subset.
        let only = compare_scenarios(&result, &config, 1, 2.0, 0.5, Some(&[0])).unwrap();
        assert_eq!(only.len(), 1);
        assert_eq!(only[0].object_index, 0);
    }

    #[test]
    fn report_summarizes_evaluation() {
        let object = ObjectSpec::new(0.6, 0.1).unwrap();
        let family = scenario_a_family(&[base_design()], &[2.0], 2.0, 0.4).unwrap();
        let grid = small_grid();
        let report = metric_report(&family, &object, &grid, &[1.0]);
        assert_eq!(report.points_evaluated, grid.len());
        assert!(report.metric >= 0.0);
        assert!(report.max_radius >= 0.0);
        assert!(report.nonzero_radius_points <= report.points_evaluated);
        let json = serde_json::to_string(&report).unwrap();
        let back: MetricReport<f64> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
    }
}
