use grasp_maps::caging::caging_score;
use grasp_maps::contact_solver::finger_configuration;
use grasp_maps::energy_map::build_energy_map;
use grasp_maps::manipulation::{evaluate_family, family_grid, point_hull, scenario_b_family};
use grasp_maps::kinematics::Side;
use grasp_maps::sweep::{enumerate_designs, enumerate_objects, SweepConfig};
use grasp_maps::GridSpec;

fn main() {
    let config = SweepConfig::<f64>::desk();
    let designs = enumerate_designs(&config).unwrap();
    let objects = enumerate_objects(&config).unwrap();
    for oi in [6usize, 7] {
        let object = objects[oi];
        let mut lambda_hats = Vec::new();
        for d in &designs {
            let grid = GridSpec::with_resolution(d, &object, config.map_resolution);
            let map = build_energy_map(d, &object, &config.command, grid).unwrap();
            lambda_hats.push(caging_score(&map).normalized());
        }
        let family = scenario_b_family(designs.clone()).unwrap();
        let grid = family_grid(&family, &object, config.map_resolution);
        let eval = evaluate_family(&family, &object, &grid, &lambda_hats);
        let mut pos: Vec<(f64, usize)> = eval
            .point_radii
            .iter()
            .enumerate()
            .filter(|(_, &r)| r > 0.0)
            .map(|(i, &r)| (r, i))
            .collect();
        pos.sort_by(|a, b| b.0.total_cmp(&a.0));
        println!(
            "obj {oi} (r={}, mu={:.1}): metric {} over {} positive points (grid {}x{})",
            object.r,
            object.mu_s,
            eval.metric,
            pos.len(),
            grid.nx,
            grid.ny
        );
        for (r, idx) in pos.iter().take(4) {
            let p = grid.point(idx % grid.nx, idx / grid.nx);
            println!("  radius {r:.5} at ({:.2}, {:.2})", p.x, p.y);
        }
        let mut mixed_points = 0usize;
        for &(_, idx) in &pos {
            let p = grid.point(idx % grid.nx, idx / grid.nx);
            let hull = point_hull(&family, &object, p, &lambda_hats);
            let any_unblocked = hull.contributing.iter().any(|&(j, _)| {
                let d = &family.designs[j];
                [Side::Left, Side::Right].iter().any(|&s| {
                    finger_configuration(d, &object, p, 1.0, s)
                        .reached()
                        .map(|sol| sol.transmitted.iter().any(|&t| t))
                        .unwrap_or(false)
                })
            });
            if any_unblocked {
                mixed_points += 1;
            }
        }
        println!("  points with a non-blocked contributor: {mixed_points}/{}", pos.len());
        if let Some(&(_, idx)) = pos.first() {
            let p = grid.point(idx % grid.nx, idx / grid.nx);
            let hull = point_hull(&family, &object, p, &lambda_hats);
            println!("  worst point: {} contributing pairs", hull.contributing.len());
            for &(j, _) in hull.contributing.iter().take(12) {
                let d = &family.designs[j];
                let mode = |side| {
                    finger_configuration(d, &object, p, 1.0, side)
                        .reached()
                        .map(|s| format!("{:?}/{:?}/tx={:?}", s.config.mode, s.case, s.transmitted))
                        .unwrap_or_else(|| "-".into())
                };
                println!(
                    "    design {j} l1={} l2={} r1={} r2={} w={} lh={:.4}: L {} | R {}",
                    d.l1,
                    d.l2,
                    d.r1,
                    d.r2,
                    d.w,
                    lambda_hats[j],
                    mode(Side::Left),
                    mode(Side::Right)
                );
            }
        }
    }
}
