//! Experiment harness: epidemic cycle time series, total damage against base
//! damage, and total damage against the damage growth rate.

pub mod config;
pub mod output;

use std::path::Path;

pub use config::{linear_grid, log_grid, DamageGrid, ExperimentConfig, GraphGrid, OneOrMany, ParamsGrid};

use crate::damage::{DamageKind, DamageModel};
use crate::dynamics::ModelParams;
use crate::engine::{Engine, EnsembleConfig, EnsembleSummary};
use crate::error::{Error, Result};
use crate::graph::{Family, GraphSpec};
use crate::metrics::SweepPoint;

/// Largest constant-damage total damage of one (family, degree, theta) curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reference {
    pub max_dn: f64,
    pub argmax_d: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub family: Family,
    pub n: usize,
    pub mean_degree: f64,
    pub params: ModelParams,
    pub kind: DamageKind,
    pub d0: f64,
    pub base_seed: u64,
    pub point: SweepPoint,
    pub truncated: usize,
    pub reference: Option<Reference>,
}

impl SweepRow {
    fn matches(&self, family: Family, mean_degree: f64, theta: f64) -> bool {
        self.family == family && self.mean_degree == mean_degree && self.params.theta == theta
    }
}

/// Called after each finished grid point with (done, total, row).
pub type Progress<'a> = &'a dyn Fn(usize, usize, &SweepRow);

fn ensemble_config(cfg: &ExperimentConfig, family: Family, k: f64, theta: f64, damage: DamageModel) -> EnsembleConfig {
    EnsembleConfig {
        graph: GraphSpec::new(family, cfg.graph.n, k, 0),
        fixed_graph: cfg.graph.fixed_graph,
        params: cfg.params.at_theta(theta),
        damage,
        realizations: cfg.realizations,
        base_seed: cfg.base_seed,
        max_steps: cfg.max_steps,
    }
}

fn single<T: Copy>(values: Vec<T>, what: &str) -> Result<T> {
    match values.as_slice() {
        [x] => Ok(*x),
        _ => Err(Error::Invalid(format!(
            "a cycle experiment needs exactly one {what}, got {}",
            values.len()
        ))),
    }
}

/// Damage model of a single-point config: the first `d` for constant damage,
/// the first `epsilon` otherwise.
pub fn cycle_damage(cfg: &ExperimentConfig) -> Result<DamageModel> {
    let kind = single(cfg.kinds(), "damage kind")?;
    let x = match kind {
        DamageKind::Constant => single(cfg.damage.d.as_ref().map_or_else(|| vec![0.3], OneOrMany::to_vec), "d")?,
        _ => single(cfg.damage.epsilon_values(), "epsilon")?,
    };
    Ok(cfg.damage.model(kind, x))
}

/// Ensemble for the single parameter point described by `cfg`.
pub fn run_cycle(engine: &Engine, cfg: &ExperimentConfig) -> Result<EnsembleSummary> {
    cfg.validate()?;
    let family = single(cfg.families(), "graph family")?;
    let k = single(cfg.mean_degrees(), "mean degree")?;
    let theta = single(cfg.thetas(), "theta")?;
    engine.run_ensemble(&ensemble_config(cfg, family, k, theta, cycle_damage(cfg)?))
}

/// Writes `t, mean_Su, mean_Sa, mean_Iu, mean_Ia, mean_Ha` rows.
pub fn run_cycle_experiment(engine: &Engine, cfg: &ExperimentConfig, out: Option<&Path>) -> Result<EnsembleSummary> {
    let summary = run_cycle(engine, cfg)?;
    output::write_cycle(out, cfg, &summary)?;
    Ok(summary)
}

fn sweep(
    engine: &Engine,
    cfg: &ExperimentConfig,
    kinds: &[DamageKind],
    xs: &[f64],
    progress: Option<Progress>,
) -> Result<Vec<SweepRow>> {
    let mut grid = Vec::new();
    for family in cfg.families() {
        for k in cfg.mean_degrees() {
            for theta in cfg.thetas() {
                for &kind in kinds {
                    for &x in xs {
                        grid.push((family, k, theta, kind, x));
                    }
                }
            }
        }
    }
    let total = grid.len();
    let mut rows = Vec::with_capacity(total);
    for (done, (family, k, theta, kind, x)) in grid.into_iter().enumerate() {
        let ens = ensemble_config(cfg, family, k, theta, cfg.damage.model(kind, x));
        let s = engine.run_ensemble(&ens)?;
        let row = SweepRow {
            family,
            n: cfg.graph.n,
            mean_degree: k,
            params: ens.params,
            kind,
            d0: cfg.damage.d0,
            base_seed: cfg.base_seed,
            point: SweepPoint {
                x,
                mean_dn: s.mean_dn,
                std_dn: s.std_dn,
                mean_ever_infected_fraction: s.mean_ever_infected_fraction,
                realizations: s.realizations,
            },
            truncated: s.truncated,
            reference: None,
        };
        if let Some(report) = progress {
            report(done + 1, total, &row);
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Total damage against constant base damage `d`, one row per
/// (family, mean degree, theta, d). Every point uses the same base seed.
pub fn run_damage_sweep(engine: &Engine, cfg: &ExperimentConfig, progress: Option<Progress>) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    if cfg.kinds() != [DamageKind::Constant] {
        return Err(Error::Invalid("a damage sweep needs damage.kind = \"constant\"".into()));
    }
    sweep(engine, cfg, &[DamageKind::Constant], &cfg.damage.d_values(), progress)
}

/// Maximum of each (family, mean degree, theta) curve of a damage sweep.
pub fn reference_maxima(rows: &[SweepRow]) -> Vec<(Family, f64, f64, Reference)> {
    let mut out: Vec<(Family, f64, f64, Reference)> = Vec::new();
    for row in rows {
        let key = (row.family, row.mean_degree, row.params.theta);
        match out.iter_mut().find(|(f, k, th, _)| (*f, *k, *th) == key) {
            // first occurrence wins ties
            Some((_, _, _, r)) if row.point.mean_dn > r.max_dn => {
                *r = Reference {
                    max_dn: row.point.mean_dn,
                    argmax_d: row.point.x,
                }
            }
            Some(_) => {}
            None => out.push((
                key.0,
                key.1,
                key.2,
                Reference {
                    max_dn: row.point.mean_dn,
                    argmax_d: row.point.x,
                },
            )),
        }
    }
    out
}

/// Total damage against the growth rate `epsilon` for each logistic or
/// mutating kind in the config. With `damage.reference` set, the matching
/// constant-damage sweep over the `d` grid is run too and its maximum is
/// attached to every row.
pub fn run_epsilon_sweep(engine: &Engine, cfg: &ExperimentConfig, progress: Option<Progress>) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    let kinds = cfg.kinds();
    if kinds.is_empty() || kinds.contains(&DamageKind::Constant) {
        return Err(Error::Invalid(
            "an epsilon sweep needs damage.kind from {logistic, mutating}".into(),
        ));
    }
    let mut rows = sweep(engine, cfg, &kinds, &cfg.damage.epsilon_values(), progress)?;
    if cfg.damage.reference {
        let constant = sweep(engine, cfg, &[DamageKind::Constant], &cfg.damage.d_values(), progress)?;
        let maxima = reference_maxima(&constant);
        for row in &mut rows {
            row.reference = maxima
                .iter()
                .find(|(f, k, th, _)| row.matches(*f, *k, *th))
                .map(|(_, _, _, r)| *r);
        }
    }
    Ok(rows)
}

pub fn write_damage_sweep(cfg: &ExperimentConfig, rows: &[SweepRow], out: Option<&Path>) -> Result<()> {
    output::write_sweep(out, cfg, "sweep-d", rows)
}

pub fn write_epsilon_sweep(cfg: &ExperimentConfig, rows: &[SweepRow], out: Option<&Path>) -> Result<()> {
    output::write_sweep(out, cfg, "sweep-eps", rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(kind: DamageKind) -> ExperimentConfig {
        let mut cfg = ExperimentConfig {
            name: "t".into(),
            realizations: 3,
            base_seed: 5,
            ..ExperimentConfig::default()
        };
        cfg.graph.n = 120;
        cfg.graph.mean_degree = OneOrMany::One(6.0);
        cfg.damage.kind = OneOrMany::One(kind);
        cfg
    }

    #[test]
    fn sub_threshold_points_equal_d() {
        let mut cfg = small(DamageKind::Constant);
        cfg.damage.d = Some(vec![0.05, 0.1, 0.15].into());
        let rows = run_damage_sweep(&Engine::new(Some(1)).unwrap(), &cfg, None).unwrap();
        assert_eq!(rows.len(), 3);
        for r in &rows {
            assert_eq!(r.point.mean_dn, r.point.x);
            assert_eq!(r.point.std_dn, 0.0);
        }
    }

    #[test]
    fn cycle_needs_single_point() {
        let mut cfg = small(DamageKind::Constant);
        cfg.params.theta = OneOrMany::Many(vec![0.2, 0.4]);
        assert!(run_cycle(&Engine::new(Some(1)).unwrap(), &cfg).is_err());
    }

    #[test]
    fn epsilon_sweep_attaches_reference() {
        let mut cfg = small(DamageKind::Logistic);
        cfg.damage.epsilon = Some(OneOrMany::One(0.1));
        cfg.damage.d = Some(vec![0.1, 0.5, 1.0].into());
        let rows = run_epsilon_sweep(&Engine::new(Some(1)).unwrap(), &cfg, None).unwrap();
        assert_eq!(rows.len(), 1);
        let r = rows[0].reference.unwrap();
        assert!(r.max_dn >= 0.1);
    }

    #[test]
    fn sweep_kind_checks() {
        let e = Engine::new(Some(1)).unwrap();
        assert!(run_damage_sweep(&e, &small(DamageKind::Logistic), None).is_err());
        assert!(run_epsilon_sweep(&e, &small(DamageKind::Constant), None).is_err());
    }
}
