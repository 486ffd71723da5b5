use std::time::Instant;

use grasp_maps::caging::{interpolated_energy_and_gradient, map_trajectories, score_trajectories};
use grasp_maps::energy_map::build_energy_map;
use grasp_maps::manipulation::compare_scenarios;
use grasp_maps::sweep::{
    enumerate_designs, enumerate_objects, rank_designs, ObjectRanking, PairRecord, SweepConfig,
    SweepResult,
};
use grasp_maps::GridSpec;

fn main() {
    let start = Instant::now();
    let config = SweepConfig::<f64>::desk();
    let designs = enumerate_designs(&config).unwrap();
    let objects = enumerate_objects(&config).unwrap();
    println!("designs {} objects {}", designs.len(), objects.len());
    let mut records = Vec::new();
    let mut worst_rise = 0.0f64;
    for (di, design) in designs.iter().enumerate() {
        for (oi, object) in objects.iter().enumerate() {
            let grid = GridSpec::with_resolution(design, object, config.map_resolution);
            let map = build_energy_map(design, object, &config.command, grid).unwrap();
            let trajs = map_trajectories(&map);
            for t in &trajs {
                let mut prev: Option<f64> = None;
                for p in &t.points {
                    if let Ok((v, _)) = interpolated_energy_and_gradient(&map, *p) {
                        if let Some(pv) = prev {
                            worst_rise = worst_rise.max(v - pv);
                        }
                        prev = Some(v);
                    }
                }
            }
            let score = score_trajectories(object, &trajs);
            records.push(PairRecord {
                design_index: di,
                object_index: oi,
                design: design.clone(),
                object: *object,
                score: Some(score),
                error: None,
                map_path: None,
            });
        }
        if di % 8 == 7 {
            eprintln!("design {di} done at {:.0}s", start.elapsed().as_secs_f64());
        }
    }
    let sweep_elapsed = start.elapsed().as_secs_f64();
    println!("sweep pass: {sweep_elapsed:.0}s, worst descent rise {worst_rise:.2e}");
    let rankings: Vec<ObjectRanking<f64>> = objects
        .iter()
        .enumerate()
        .map(|(oi, o)| ObjectRanking {
            object_index: oi,
            object: *o,
            ranked_designs: rank_designs(&records, oi),
        })
        .collect();
    for r in &rankings {
        let bi = r.ranked_designs[0];
        let d = &designs[bi];
        let lam = records
            .iter()
            .find(|p| p.design_index == bi && p.object_index == r.object_index)
            .and_then(|p| p.score.as_ref())
            .map(|s| s.lambda)
            .unwrap();
        println!(
            "obj {} (r={}, mu={:.1}): best l1={} l2={} r1={} r2={} R={:.3} w={} lambda={:.2}",
            r.object_index, r.object.r, r.object.mu_s, d.l1, d.l2, d.r1, d.r2,
            d.r2 / d.r1, d.w, lam
        );
    }
    for oi in 0..objects.len() {
        let tips: usize = records
            .iter()
            .filter(|p| p.object_index == oi)
            .filter_map(|p| p.score.as_ref())
            .map(|s| s.n_tip)
            .sum();
        println!("obj {oi} tip total {tips}");
    }
    let result = SweepResult {
        config_hash: config.hash().unwrap(),
        designs,
        objects,
        records,
        rankings,
    };
    let manip_start = Instant::now();
    let comparisons = compare_scenarios(&result, &config, 5, 2.0, 0.2, Some(&[6, 7])).unwrap();
    for c in &comparisons {
        println!(
            "obj {} (r={}, mu={:.1}): metric A={} B={}",
            c.object_index, c.object.r, c.object.mu_s, c.scenario_a.metric, c.scenario_b.metric
        );
    }
    println!(
        "manip: {:.0}s, total {:.0}s",
        manip_start.elapsed().as_secs_f64(),
        start.elapsed().as_secs_f64()
    );
}
