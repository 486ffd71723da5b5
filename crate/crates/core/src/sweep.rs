//! Design-space sweep: enumerate the design/object grids, build and score a
//! map per (design, object) pair in parallel, rank designs, and persist the
//! results in a resumable store.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::caging::{caging_score, CagingScore};
use crate::contact_solver::ActuationCommand;
use crate::energy_map::{build_energy_map, GridSpec};
use crate::error::GraspError;
use crate::kinematics::{GrasperDesign, ObjectSpec};
use crate::scalar::{c, Real};

/// Inclusive arithmetic progression `lo, lo + step, ..., hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridRange<T> {
    pub lo: T,
    pub hi: T,
    pub step: T,
}

impl<T: Real> GridRange<T> {
    pub fn new(lo: T, hi: T, step: T) -> Self {
        Self { lo, hi, step }
    }

    pub fn single(v: T) -> Self {
        Self {
            lo: v,
            hi: v,
            step: T::one(),
        }
    }

    pub fn validate(&self) -> Result<(), GraspError> {
        if !(self.step > T::zero()) {
            return Err(GraspError::InvalidConfig("grid step must be positive".into()));
        }
        if !(self.hi >= self.lo) {
            return Err(GraspError::InvalidConfig("grid bounds must be ordered".into()));
        }
        Ok(())
    }

    pub fn count(&self) -> usize {
        ((self.hi - self.lo) / self.step)
            .to_f64()
            .map(|x| x.round())
            .unwrap_or(0.0) as usize
            + 1
    }

    pub fn values(&self) -> Vec<T> {
        (0..self.count())
            .map(|i| self.lo + self.step * c(i as f64))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalePreset {
    Paper,
    Desk,
    Smoke,
}

/// Full description of one sweep; serialized canonically into the store so
/// results carry their provenance and resumes can be checked.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig<T> {
    pub preset: ScalePreset,
    pub l1: GridRange<T>,
    pub l2: GridRange<T>,
    pub r1: GridRange<T>,
    pub r2: GridRange<T>,
    pub w: GridRange<T>,
    pub object_r: GridRange<T>,
    pub object_mu: GridRange<T>,
    pub map_resolution: T,
    pub command: ActuationCommand<T>,
    /// Worker threads; 0 uses the process-wide default.
    pub parallelism: usize,
    pub save_maps: bool,
    pub output_dir: String,
}

impl SweepConfig<f64> {
    /// Full published parameter grid.
    pub fn paper() -> Self {
        Self {
            preset: ScalePreset::Paper,
            l1: GridRange::new(0.4, 2.0, 0.2),
            l2: GridRange::new(0.4, 1.6, 0.4),
            r1: GridRange::new(0.04, 0.20, 0.04),
            r2: GridRange::new(0.02, 0.18, 0.04),
            w: GridRange::new(0.0, 2.0, 0.4),
            object_r: GridRange::new(0.4, 1.6, 0.4),
            object_mu: GridRange::new(0.1, 1.0, 0.3),
            map_resolution: 0.05,
            command: ActuationCommand::symmetric(1.0),
            parallelism: 0,
            save_maps: false,
            output_dir: "out/sweep-paper".into(),
        }
    }

    /// Strided sub-grid that finishes in minutes on a desktop.
    pub fn desk() -> Self {
        Self {
            preset: ScalePreset::Desk,
            l1: GridRange::new(1.2, 2.0, 0.8),
            l2: GridRange::new(0.8, 1.6, 0.8),
            r1: GridRange::new(0.12, 0.16, 0.04),
            r2: GridRange::new(0.02, 0.06, 0.04),
            w: GridRange::new(0.4, 2.0, 0.8),
            object_r: GridRange::new(0.4, 1.6, 1.2),
            object_mu: GridRange::new(0.1, 1.0, 0.3),
            map_resolution: 0.25,
            command: ActuationCommand::symmetric(1.0),
            parallelism: 0,
            save_maps: false,
            output_dir: "out/sweep-desk".into(),
        }
    }

    /// Minimal end-to-end exercise for CI.
    pub fn smoke() -> Self {
        Self {
            preset: ScalePreset::Smoke,
            l1: GridRange::single(1.2),
            l2: GridRange::single(0.8),
            r1: GridRange::new(0.08, 0.16, 0.08),
            r2: GridRange::single(0.06),
            w: GridRange::single(1.2),
            object_r: GridRange::single(0.4),
            object_mu: GridRange::single(0.5),
            map_resolution: 0.25,
            command: ActuationCommand::symmetric(1.0),
            parallelism: 0,
            save_maps: false,
            output_dir: "out/sweep-smoke".into(),
        }
    }
}

impl<T: Real + Serialize> SweepConfig<T> {
    pub fn validate(&self) -> Result<(), GraspError> {
        for g in [
            &self.l1,
            &self.l2,
            &self.r1,
            &self.r2,
            &self.w,
            &self.object_r,
            &self.object_mu,
        ] {
            g.validate()?;
        }
        if !(self.map_resolution > T::zero()) {
            return Err(GraspError::InvalidConfig("map resolution must be positive".into()));
        }
        if self.output_dir.is_empty() {
            return Err(GraspError::InvalidConfig("output directory must be set".into()));
        }
        Ok(())
    }

    /// Canonical serialization; field order is fixed by the struct.
    pub fn canonical_json(&self) -> Result<String, GraspError> {
        Ok(serde_json::to_string(self)?)
    }

    /// FNV-1a hash of the canonical serialization, stable across platforms.
    pub fn hash(&self) -> Result<String, GraspError> {
        let json = self.canonical_json()?;
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in json.as_bytes() {
            h ^= *b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        Ok(format!("{h:016x}"))
    }
}

/// Lexicographic enumeration over (l1, l2, r1, r2, w) with r1 = r2 removed.
pub fn enumerate_designs<T: Real + Serialize>(
    config: &SweepConfig<T>,
) -> Result<Vec<GrasperDesign<T>>, GraspError> {
    config.validate()?;
    let tol = c::<T>(1e-9);
    let mut designs = Vec::new();
    for &l1 in &config.l1.values() {
        for &l2 in &config.l2.values() {
            for &r1 in &config.r1.values() {
                for &r2 in &config.r2.values() {
                    if (r1 - r2).abs() < tol {
                        continue;
                    }
                    for &w in &config.w.values() {
                        designs.push(GrasperDesign::new(l1, l2, r1, r2, w)?);
                    }
                }
            }
        }
    }
    Ok(designs)
}

/// Lexicographic enumeration over (r, mu_s).
pub fn enumerate_objects<T: Real + Serialize>(
    config: &SweepConfig<T>,
) -> Result<Vec<ObjectSpec<T>>, GraspError> {
    config.validate()?;
    let mut objects = Vec::new();
    for &r in &config.object_r.values() {
        for &mu in &config.object_mu.values() {
            objects.push(ObjectSpec::new(r, mu)?);
        }
    }
    Ok(objects)
}

/// Result of one (design, object) pair; a failed pair carries its
/// diagnostic instead of a score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairRecord<T> {
    pub design_index: usize,
    pub object_index: usize,
    pub design: GrasperDesign<T>,
    pub object: ObjectSpec<T>,
    pub score: Option<CagingScore<T>>,
    pub error: Option<String>,
    pub map_path: Option<String>,
}

/// Ranking of all designs for one object, best first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectRanking<T> {
    pub object_index: usize,
    pub object: ObjectSpec<T>,
    pub ranked_designs: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingsFile<T> {
    pub config_hash: String,
    pub code_version: String,
    pub rankings: Vec<ObjectRanking<T>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult<T> {
    pub config_hash: String,
    pub designs: Vec<GrasperDesign<T>>,
    pub objects: Vec<ObjectSpec<T>>,
    pub records: Vec<PairRecord<T>>,
    pub rankings: Vec<ObjectRanking<T>>,
}

impl<T: Real> SweepResult<T> {
    pub fn quarantined(&self) -> usize {
        self.records.iter().filter(|r| r.error.is_some()).count()
    }

    pub fn record(&self, design_index: usize, object_index: usize) -> Option<&PairRecord<T>> {
        self.records
            .iter()
            .find(|r| r.design_index == design_index && r.object_index == object_index)
    }
}

fn design_tuple<T: Real>(d: &GrasperDesign<T>) -> [T; 5] {
    [d.l1, d.l2, d.r1, d.r2, d.w]
}

/// Designs for one object ordered by descending caging score, ties broken
/// by ascending lexicographic design tuple. Quarantined pairs rank last.
pub fn rank_designs<T: Real>(records: &[PairRecord<T>], object_index: usize) -> Vec<usize> {
    let mut rows: Vec<(&PairRecord<T>, T)> = records
        .iter()
        .filter(|r| r.object_index == object_index)
        .map(|r| {
            let lambda = r
                .score
                .as_ref()
                .map(|s| s.lambda)
                .unwrap_or(-T::infinity());
            (r, lambda)
        })
        .collect();
    rows.sort_by(|(ra, la), (rb, lb)| {
        lb.partial_cmp(la)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| {
                let ta = design_tuple(&ra.design);
                let tb = design_tuple(&rb.design);
                ta.partial_cmp(&tb).unwrap_or(std::cmp::Ordering::Equal)
            })
    });
    rows.into_iter().map(|(r, _)| r.design_index).collect()
}

/// Scatter-ready (design, n_caged, n_tip) rows for one object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CageTipRow<T> {
    pub object_index: usize,
    pub object: ObjectSpec<T>,
    pub design_index: usize,
    pub n_caged: usize,
    pub n_tip: usize,
}

/// Per-design endpoint counts for the extreme (corner) objects of the
/// sweep: smallest/largest radius crossed with smallest/largest friction.
pub fn cage_vs_tip_table<T: Real>(result: &SweepResult<T>) -> Vec<CageTipRow<T>> {
    let fold = |f: fn(T, T) -> T| {
        result
            .objects
            .iter()
            .map(|o| o.r)
            .fold(None::<T>, |acc, v| Some(acc.map_or(v, |a| f(a, v))))
    };
    let mfold = |f: fn(T, T) -> T| {
        result
            .objects
            .iter()
            .map(|o| o.mu_s)
            .fold(None::<T>, |acc, v| Some(acc.map_or(v, |a| f(a, v))))
    };
    let (Some(r_lo), Some(r_hi), Some(m_lo), Some(m_hi)) =
        (fold(T::min), fold(T::max), mfold(T::min), mfold(T::max))
    else {
        return Vec::new();
    };
    let tol = c::<T>(1e-9);
    let corner = |o: &ObjectSpec<T>| {
        ((o.r - r_lo).abs() < tol || (o.r - r_hi).abs() < tol)
            && ((o.mu_s - m_lo).abs() < tol || (o.mu_s - m_hi).abs() < tol)
    };
    let mut rows = Vec::new();
    for rec in &result.records {
        if let (true, Some(score)) = (corner(&rec.object), rec.score.as_ref()) {
            rows.push(CageTipRow {
                object_index: rec.object_index,
                object: rec.object,
                design_index: rec.design_index,
                n_caged: score.n_caged,
                n_tip: score.n_tip,
            });
        }
    }
    rows
}

fn pair_key(r: &serde_json::Value) -> Option<(usize, usize)> {
    Some((
        r.get("design_index")?.as_u64()? as usize,
        r.get("object_index")?.as_u64()? as usize,
    ))
}

fn compute_pair<T: Real + Serialize>(
    config: &SweepConfig<T>,
    design_index: usize,
    design: &GrasperDesign<T>,
    object_index: usize,
    object: &ObjectSpec<T>,
    store: &Path,
) -> PairRecord<T> {
    let work = || -> Result<(CagingScore<T>, Option<String>), GraspError> {
        let grid = GridSpec::with_resolution(design, object, config.map_resolution);
        let map = build_energy_map(design, object, &config.command, grid)?;
        let score = caging_score(&map);
        let map_path = if config.save_maps {
            let rel = format!("maps/design{design_index:05}_object{object_index:03}.csv");
            fs::write(store.join(&rel), map.to_csv())
                .map_err(GraspError::from)?;
            Some(rel)
        } else {
            None
        };
        Ok((score, map_path))
    };
    let outcome = catch_unwind(AssertUnwindSafe(work));
    let (score, error, map_path) = match outcome {
        Ok(Ok((score, map_path))) => (Some(score), None, map_path),
        Ok(Err(e)) => (None, Some(e.to_string()), None),
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "worker panicked".into());
            (None, Some(msg), None)
        }
    };
    PairRecord {
        design_index,
        object_index,
        design: design.clone(),
        object: *object,
        score,
        error,
        map_path,
    }
}

/// Runs (or resumes) the sweep described by `config`.
///
/// The store directory receives `config.json`, an append-only
/// `results.partial.jsonl` progress log, and on completion the sorted
/// `results.jsonl` plus `rankings.json`. Completed pairs found in the
/// progress log are not recomputed; the final files are byte-identical
/// regardless of parallelism or interruption history.
pub fn run_sweep<T>(config: &SweepConfig<T>) -> Result<SweepResult<T>, GraspError>
where
    T: Real + Serialize + for<'de> Deserialize<'de>,
{
    config.validate()?;
    let store = PathBuf::from(&config.output_dir);
    fs::create_dir_all(&store)?;
    if config.save_maps {
        fs::create_dir_all(store.join("maps"))?;
    }

    let canonical = config.canonical_json()?;
    let config_path = store.join("config.json");
    if config_path.exists() {
        let existing = fs::read_to_string(&config_path)?;
        if existing != canonical {
            return Err(GraspError::InvalidConfig(format!(
                "output directory {} holds a different sweep configuration",
                store.display()
            )));
        }
    } else {
        fs::write(&config_path, &canonical)?;
    }

    let designs = enumerate_designs(config)?;
    let objects = enumerate_objects(config)?;

    // Resume: collect completed pairs from the progress log.
    let partial_path = store.join("results.partial.jsonl");
    let mut done: HashMap<(usize, usize), PairRecord<T>> = HashMap::new();
    if partial_path.exists() {
        for line in fs::read_to_string(&partial_path)?.lines() {
            let Ok(value) = serde_json::from_str::<serde_json::Value>(line) else {
                continue; // torn tail line from an interrupted run
            };
            let Some(key) = pair_key(&value) else { continue };
            if let Ok(rec) = serde_json::from_value::<PairRecord<T>>(value) {
                done.insert(key, rec);
            }
        }
    }

    let pending: Vec<(usize, usize)> = (0..designs.len())
        .flat_map(|di| (0..objects.len()).map(move |oi| (di, oi)))
        .filter(|key| !done.contains_key(key))
        .collect();

    let log = Mutex::new(
        fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(&partial_path)?,
    );
    let run = || -> Result<Vec<PairRecord<T>>, GraspError> {
        pending
            .par_iter()
            .map(|&(di, oi)| {
                let rec = compute_pair(config, di, &designs[di], oi, &objects[oi], &store);
                let line = serde_json::to_string(&rec)?;
                {
                    let mut f = log.lock().unwrap();
                    writeln!(f, "{line}")?;
                    f.flush()?;
                }
                Ok(rec)
            })
            .collect()
    };
    let fresh = if config.parallelism > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.parallelism)
            .build()
            .map_err(|e| GraspError::InvalidConfig(e.to_string()))?;
        pool.install(run)?
    } else {
        run()?
    };

    let mut records: Vec<PairRecord<T>> = done.into_values().chain(fresh).collect();
    records.sort_by_key(|r| (r.design_index, r.object_index));

    let mut out = String::new();
    for rec in &records {
        out.push_str(&serde_json::to_string(rec)?);
        out.push('\n');
    }
    fs::write(store.join("results.jsonl"), out)?;

    let config_hash = config.hash()?;
    let rankings: Vec<ObjectRanking<T>> = objects
        .iter()
        .enumerate()
        .map(|(oi, object)| ObjectRanking {
            object_index: oi,
            object: *object,
            ranked_designs: rank_designs(&records, oi),
        })
        .collect();
    let rankings_file = RankingsFile {
        config_hash: config_hash.clone(),
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        rankings: rankings.clone(),
    };
    fs::write(
        store.join("rankings.json"),
        serde_json::to_string_pretty(&rankings_file)?,
    )?;

    Ok(SweepResult {
        config_hash,
        designs,
        objects,
        records,
        rankings,
    })
}

/// Reopens a completed sweep store: parses `config.json` and
/// `results.jsonl`, re-enumerates the grids, and rebuilds the rankings.
pub fn load_store<T>(dir: &Path) -> Result<(SweepConfig<T>, SweepResult<T>), GraspError>
where
    T: Real + Serialize + for<'de> Deserialize<'de>,
{
    let config: SweepConfig<T> =
        serde_json::from_str(&fs::read_to_string(dir.join("config.json"))?)?;
    let designs = enumerate_designs(&config)?;
    let objects = enumerate_objects(&config)?;
    let mut records: Vec<PairRecord<T>> = Vec::new();
    for line in fs::read_to_string(dir.join("results.jsonl"))?.lines() {
        records.push(serde_json::from_str(line)?);
    }
    if records.len() != designs.len() * objects.len() {
        return Err(GraspError::InvalidConfig(format!(
            "store {} is incomplete: {} of {} records",
            dir.display(),
            records.len(),
            designs.len() * objects.len()
        )));
    }
    let rankings: Vec<ObjectRanking<T>> = objects
        .iter()
        .enumerate()
        .map(|(oi, object)| ObjectRanking {
            object_index: oi,
            object: *object,
            ranked_designs: rank_designs(&records, oi),
        })
        .collect();
    Ok((
        config.clone(),
        SweepResult {
            config_hash: config.hash()?,
            designs,
            objects,
            records,
            rankings,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::TempDir;

    #[test]
    fn grid_range_values() {
        let g = GridRange::<f64>::new(0.4, 1.6, 0.4);
        assert_eq!(g.count(), 4);
        let vals = g.values();
        for (v, want) in vals.iter().zip([0.4, 0.8, 1.2, 1.6]) {
            assert!((v - want).abs() < 1e-12);
        }
        assert_eq!(GridRange::single(2.0).values(), vec![2.0]);
        assert!(GridRange::new(1.0, 0.5, 0.1).validate().is_err());
        assert!(GridRange::new(0.5, 1.0, 0.0).validate().is_err());
    }

    #[test]
    fn paper_preset_counts() {
        let config = SweepConfig::paper();
        let designs = enumerate_designs(&config).unwrap();
        let objects = enumerate_objects(&config).unwrap();
        assert_eq!(designs.len(), 5400);
        assert_eq!(objects.len(), 16);
        assert_eq!(designs.len() * objects.len(), 86_400);
        // The pulley grids are disjoint, so the r1 = r2 filter removes
        // nothing: the raw product already counts 5,400.
        assert_eq!(9 * 4 * 5 * 5 * 6, 5400);
    }

    #[test]
    fn design_enumeration_is_lexicographic() {
        let designs = enumerate_designs(&SweepConfig::paper()).unwrap();
        for pair in designs.windows(2) {
            let a = design_tuple(&pair[0]);
            let b = design_tuple(&pair[1]);
            assert!(a < b, "{a:?} !< {b:?}");
        }
    }

    #[test]
    fn r1_equals_r2_designs_are_skipped() {
        let mut config = SweepConfig::paper();
        config.r1 = GridRange::new(0.05, 0.15, 0.05);
        config.r2 = GridRange::new(0.05, 0.15, 0.05);
        let designs = enumerate_designs(&config).unwrap();
        // 3x3 pulley grid loses its 3 diagonal entries.
        assert_eq!(designs.len(), 9 * 4 * 6 * 6);
        assert!(designs.iter().all(|d| d.r1 != d.r2));
    }

    #[test]
    fn preset_sizes_fit_their_budgets() {
        let desk = SweepConfig::desk();
        let nd = enumerate_designs(&desk).unwrap().len();
        let no = enumerate_objects(&desk).unwrap().len();
        assert!(nd * no <= 400, "desk preset too large: {}", nd * no);
        let smoke = SweepConfig::smoke();
        let pairs = enumerate_designs(&smoke).unwrap().len()
            * enumerate_objects(&smoke).unwrap().len();
        assert!(pairs <= 4, "smoke preset too large: {pairs}");
    }

    #[test]
    fn config_hash_tracks_content() {
        let a = SweepConfig::smoke();
        let mut b = a.clone();
        assert_eq!(a.hash().unwrap(), b.hash().unwrap());
        b.map_resolution = 0.3;
        assert_ne!(a.hash().unwrap(), b.hash().unwrap());
    }

    #[test]
    fn rank_designs_orders_by_score_then_tuple() {
        let d = |l1: f64| GrasperDesign::new(l1, 0.8, 0.08, 0.06, 1.2).unwrap();
        let rec = |di: usize, l1: f64, lambda: f64| PairRecord {
            design_index: di,
            object_index: 0,
            design: d(l1),
            object: ObjectSpec::new(0.4, 0.5).unwrap(),
            score: Some(CagingScore {
                lambda,
                n_caged: 0,
                n_tip: 0,
                n_ejected: 0,
            }),
            error: None,
            map_path: None,
        };
        // Unique maximum wins; zero ties fall back to the design tuple.
        let records = vec![rec(0, 1.6, 0.0), rec(1, 1.2, 2.5), rec(2, 1.4, 0.0)];
        assert_eq!(rank_designs(&records, 0), vec![1, 2, 0]);
        let zeros = vec![rec(0, 1.6, 0.0), rec(1, 1.2, 0.0), rec(2, 1.4, 0.0)];
        assert_eq!(rank_designs(&zeros, 0), vec![1, 2, 0]);
    }

    fn smoke_into(dir: &Path, parallelism: usize) -> SweepResult<f64> {
        let mut config = SweepConfig::smoke();
        config.parallelism = parallelism;
        config.output_dir = dir.to_string_lossy().into_owned();
        run_sweep(&config).unwrap()
    }

    #[test]
    fn smoke_sweep_runs_resumes_and_is_deterministic() {
        let tmp = TempDir::new().unwrap();
        let a_dir = tmp.path().join("a");
        let result = smoke_into(&a_dir, 1);
        assert_eq!(
            result.records.len(),
            result.designs.len() * result.objects.len()
        );
        assert_eq!(result.quarantined(), 0);
        for rec in &result.records {
            let s = rec.score.as_ref().unwrap();
            assert!(s.lambda >= 0.0);
        }
        assert!(a_dir.join("config.json").exists());
        assert!(a_dir.join("rankings.json").exists());
        let first = fs::read(a_dir.join("results.jsonl")).unwrap();

        // Resume over a complete store recomputes nothing and rewrites the
        // same bytes.
        let resumed = smoke_into(&a_dir, 1);
        assert_eq!(resumed.records, result.records);
        assert_eq!(fs::read(a_dir.join("results.jsonl")).unwrap(), first);

        // A different parallelism degree in a fresh store matches byte for
        // byte.
        let b_dir = tmp.path().join("b");
        smoke_into(&b_dir, 2);
        assert_eq!(fs::read(b_dir.join("results.jsonl")).unwrap(), first);

        // Round-trip of the persisted records.
        let text = String::from_utf8(first).unwrap();
        let parsed: Vec<PairRecord<f64>> = text
            .lines()
            .map(|l| serde_json::from_str(l).unwrap())
            .collect();
        assert_eq!(parsed, result.records);

        // Reopening the store reproduces the in-memory result.
        let (_, loaded) = load_store::<f64>(&a_dir).unwrap();
        assert_eq!(loaded.records, result.records);
        assert_eq!(loaded.rankings, result.rankings);
        assert_eq!(loaded.config_hash, result.config_hash);
    }

    #[test]
    fn resume_skips_completed_pairs() {
        let tmp = TempDir::new().unwrap();
        let dir = tmp.path().join("store");
        let full = smoke_into(&dir, 1);
        // Truncate the progress log to one record plus a torn line; the
        // resumed run must recompute only the missing pairs and agree.
        let partial = dir.join("results.partial.jsonl");
        let lines: Vec<String> = fs::read_to_string(&partial)
            .unwrap()
            .lines()
            .map(String::from)
            .collect();
        fs::write(&partial, format!("{}\n{{\"torn\":", lines[0])).unwrap();
        fs::remove_file(dir.join("results.jsonl")).unwrap();
        let resumed = smoke_into(&dir, 1);
        assert_eq!(resumed.records, full.records);
    }

    #[test]
    fn mismatched_store_is_rejected() {
        let tmp = TempDir::new().unwrap();
        let dir = tmp.path().join("store");
        smoke_into(&dir, 1);
        let mut other = SweepConfig::smoke();
        other.map_resolution = 0.3;
        other.output_dir = dir.to_string_lossy().into_owned();
        assert!(matches!(
            run_sweep(&other),
            Err(GraspError::InvalidConfig(_))
        ));
    }

    #[test]
    fn cage_vs_tip_rows_cover_corner_objects() {
        let tmp = TempDir::new().unwrap();
        let dir = tmp.path().join("store");
        let mut config = SweepConfig::smoke();
        config.object_mu = GridRange::new(0.2, 0.8, 0.6);
        config.output_dir = dir.to_string_lossy().into_owned();
        let result = run_sweep(&config).unwrap();
        let rows = cage_vs_tip_table(&result);
        // Every (design, corner object) pair appears once; counts are
        // consistent with the stored scores.
        assert_eq!(rows.len(), result.designs.len() * result.objects.len());
        for row in &rows {
            let rec = result.record(row.design_index, row.object_index).unwrap();
            let score = rec.score.as_ref().unwrap();
            assert_eq!(row.n_caged, score.n_caged);
            assert_eq!(row.n_tip, score.n_tip);
            assert_eq!(
                score.total_points(),
                score.n_caged + score.n_tip + score.n_ejected
            );
        }
    }

    #[test]
    fn save_maps_writes_csv_artifacts() {
        let tmp = TempDir::new().unwrap();
        let dir = tmp.path().join("store");
        let mut config = SweepConfig::smoke();
        config.r1 = GridRange::single(0.16);
        config.save_maps = true;
        config.output_dir = dir.to_string_lossy().into_owned();
        let result = run_sweep(&config).unwrap();
        for rec in &result.records {
            let rel = rec.map_path.as_ref().unwrap();
            let csv = fs::read_to_string(dir.join(rel)).unwrap();
            assert!(csv.starts_with("x,y,"));
        }
    }
}
