//! Synthetic panels, estimator-recovery experiments and leave-one-region-out influence.
//!
//! The data-generating process lives on growth rates:
//!
//! ```text
//! q ~ q_law,  p = true_a + true_b·q + sigma·ε,  ε ~ N(0, 1),  e = q − p
//! ```
//!
//! and is integrated into level series (base 100) so that the log-difference
//! transform of [`crate::dataset`] recovers the draws.
//!
//! Randomness comes from ChaCha8 seeded with `seed`. Stream 0 feeds [`generate`];
//! replication `r` of an experiment uses stream `r + 1`, so replications are
//! independent of scheduling and reproducible on any platform.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal, Uniform};
use rayon::prelude::*;

use crate::dataset::{growth_rates, pool, GrowthSeries, Merge, PanelObservation};
use crate::error::{Error, Result};
use crate::regress::t_critical;
use crate::verdoorn::{economies_of_scale, estimate, ScaleVerdict, Specification};

const BASE_LEVEL: f64 = 100.0;

/// Distribution of output growth q.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QLaw {
    Uniform { low: f64, high: f64 },
    Normal { mean: f64, sd: f64 },
}

impl QLaw {
    fn validate(&self) -> Result<()> {
        match *self {
            QLaw::Uniform { low, high } if low.is_finite() && high.is_finite() && low < high => Ok(()),
            QLaw::Normal { mean, sd } if mean.is_finite() && sd.is_finite() && sd > 0.0 => Ok(()),
            _ => Err(Error::Config(format!("invalid q_law {self}"))),
        }
    }
}

impl fmt::Display for QLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QLaw::Uniform { low, high } => write!(f, "uniform({low},{high})"),
            QLaw::Normal { mean, sd } => write!(f, "normal({mean},{sd})"),
        }
    }
}

impl FromStr for QLaw {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::Config(format!(
                "cannot parse q_law '{s}'; expected uniform(low,high) or normal(mean,sd)"
            ))
        };
        let s = s.trim();
        let (name, args) = s.split_once('(').ok_or_else(bad)?;
        let args = args.strip_suffix(')').ok_or_else(bad)?;
        let (first, second) = args.split_once(',').ok_or_else(bad)?;
        let first: f64 = first.trim().parse().map_err(|_| bad())?;
        let second: f64 = second.trim().parse().map_err(|_| bad())?;
        let law = match name.trim() {
            "uniform" => QLaw::Uniform {
                low: first,
                high: second,
            },
            "normal" => QLaw::Normal {
                mean: first,
                sd: second,
            },
            _ => return Err(bad()),
        };
        law.validate()?;
        Ok(law)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DgpConfig {
    pub true_b: f64,
    pub true_a: f64,
    pub sigma: f64,
    pub q_law: QLaw,
    pub regions: usize,
    pub transitions: usize,
    pub seed: u64,
    /// Sector ids; every sector follows the same process with its own draws.
    pub sectors: Vec<String>,
    /// Year of the base level; transitions end in start_year + 1 ..= start_year + transitions.
    pub start_year: i32,
}

impl Default for DgpConfig {
    fn default() -> Self {
        DgpConfig {
            true_b: 0.45,
            true_a: 0.0,
            sigma: 0.01,
            q_law: QLaw::Uniform { low: 0.0, high: 0.1 },
            regions: 5,
            transitions: 8,
            seed: 1,
            sectors: vec!["synthetic".to_string()],
            start_year: 1986,
        }
    }
}

impl DgpConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(Error::Config(format!(
                "sigma must be finite and >= 0, got {}",
                self.sigma
            )));
        }
        if !self.true_a.is_finite() || !self.true_b.is_finite() {
            return Err(Error::Config("true_a and true_b must be finite".into()));
        }
        if self.regions < 1 || self.transitions < 1 {
            return Err(Error::Config("regions and transitions must be >= 1".into()));
        }
        if self.sectors.is_empty() || self.sectors.iter().any(|s| s.trim().is_empty()) {
            return Err(Error::Config("sectors must be a non-empty list of names".into()));
        }
        self.q_law.validate()
    }

    /// Number of growth observations one sector contributes.
    pub fn observations_per_sector(&self) -> usize {
        self.regions * self.transitions
    }

    /// Parse the flat `key = value` format; `#` starts a comment.
    /// Keys are the field names; absent keys keep their defaults.
    pub fn from_kv(text: &str) -> Result<Self> {
        let mut cfg = DgpConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let line_no = i as u64 + 1;
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(line_no, format!("expected key = value, got '{line}'")))?;
            let (key, value) = (key.trim(), value.trim());
            let num = |v: &str| -> Result<f64> {
                v.parse()
                    .map_err(|_| Error::parse(line_no, format!("{key}: not a number '{v}'")))
            };
            let int = |v: &str| -> Result<u64> {
                v.parse()
                    .map_err(|_| Error::parse(line_no, format!("{key}: not an integer '{v}'")))
            };
            match key {
                "true_b" => cfg.true_b = num(value)?,
                "true_a" => cfg.true_a = num(value)?,
                "sigma" => cfg.sigma = num(value)?,
                "q_law" => cfg.q_law = value.parse()?,
                "regions" => cfg.regions = int(value)? as usize,
                "transitions" => cfg.transitions = int(value)? as usize,
                "seed" => cfg.seed = int(value)?,
                "sectors" => cfg.sectors = value.split(',').map(|s| s.trim().to_string()).collect(),
                "start_year" => {
                    cfg.start_year = value
                        .parse()
                        .map_err(|_| Error::parse(line_no, format!("start_year: not an integer '{value}'")))?
                }
                other => return Err(Error::parse(line_no, format!("unknown key '{other}'"))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_kv(&self) -> String {
        format!(
            "true_b = {}\ntrue_a = {}\nsigma = {}\nq_law = {}\nregions = {}\ntransitions = {}\nseed = {}\nsectors = {}\nstart_year = {}\n",
            self.true_b,
            self.true_a,
            self.sigma,
            self.q_law,
            self.regions,
            self.transitions,
            self.seed,
            self.sectors.join(","),
            self.start_year
        )
    }
}

pub fn region_name(index: usize) -> String {
    format!("R{:02}", index + 1)
}

/// Draw a level panel from the process. Deterministic in `config`.
pub fn generate(config: &DgpConfig) -> Result<Vec<PanelObservation>> {
    config.validate()?;
    Ok(generate_stream(config, 0))
}

fn generate_stream(config: &DgpConfig, stream: u64) -> Vec<PanelObservation> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(stream);

    let q_sampler = QSampler::new(config.q_law);
    let mut panel = Vec::with_capacity(config.sectors.len() * config.regions * (config.transitions + 1));
    for sector in &config.sectors {
        for r in 0..config.regions {
            let region = region_name(r);
            let mut push = |year: i32, cum_q: f64, cum_e: f64| {
                panel.push(PanelObservation {
                    region: region.clone(),
                    sector: sector.clone(),
                    year,
                    output: BASE_LEVEL * cum_q.exp(),
                    employment: BASE_LEVEL * cum_e.exp(),
                });
            };
            let (mut cum_q, mut cum_e) = (0.0, 0.0);
            push(config.start_year, cum_q, cum_e);
            for t in 1..=config.transitions {
                let q = q_sampler.sample(&mut rng);
                let eps: f64 = StandardNormal.sample(&mut rng);
                let p = config.true_a + config.true_b * q + config.sigma * eps;
                cum_q += q;
                cum_e += q - p;
                push(config.start_year + t as i32, cum_q, cum_e);
            }
        }
    }
    panel
}

enum QSampler {
    Uniform(Uniform<f64>),
    Normal(Normal<f64>),
}

impl QSampler {
    fn new(law: QLaw) -> Self {
        match law {
            QLaw::Uniform { low, high } => {
                QSampler::Uniform(Uniform::new(low, high).expect("validated uniform bounds"))
            }
            QLaw::Normal { mean, sd } => QSampler::Normal(Normal::new(mean, sd).expect("validated normal sd")),
        }
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        match self {
            QSampler::Uniform(d) => d.sample(rng),
            QSampler::Normal(d) => d.sample(rng),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecoverySummary {
    pub replications: usize,
    /// Observations per replication.
    pub n: usize,
    pub mean_b: f64,
    pub sd_b: f64,
    /// Monte Carlo standard error of `mean_b`: sd_b / sqrt(replications).
    pub mc_se: f64,
    /// Share of replications whose 95% interval b̂ ± t·se covers true_b.
    pub coverage_95: f64,
}

pub const MIN_REPLICATIONS: usize = 100;

/// Repeat generate → growth → pool → Verdoorn fit and summarise the slope estimates.
pub fn recovery_experiment(config: &DgpConfig, replications: usize) -> Result<RecoverySummary> {
    config.validate()?;
    if replications < MIN_REPLICATIONS {
        return Err(Error::Config(format!(
            "need at least {MIN_REPLICATIONS} replications, got {replications}"
        )));
    }
    let n = config.observations_per_sector() * config.sectors.len();
    if n < 3 {
        return Err(Error::Config(format!("each replication has only {n} observations")));
    }
    let t_crit = t_critical(0.05, n - 2);

    let draws: Vec<(f64, f64)> = (0..replications as u64)
        .into_par_iter()
        .map(|r| {
            let series = replicate_series(config, r + 1)?;
            let fit = estimate(&series, Specification::Verdoorn)?.fit;
            Ok((fit.slope, fit.se_slope))
        })
        .collect::<Result<_>>()?;

    let reps = replications as f64;
    let mean_b = draws.iter().map(|d| d.0).sum::<f64>() / reps;
    let var_b = draws.iter().map(|d| (d.0 - mean_b).powi(2)).sum::<f64>() / (reps - 1.0);
    let sd_b = var_b.sqrt();
    let covered = draws
        .iter()
        .filter(|(b, se)| (b - config.true_b).abs() <= t_crit * se)
        .count();

    Ok(RecoverySummary {
        replications,
        n,
        mean_b,
        sd_b,
        mc_se: sd_b / reps.sqrt(),
        coverage_95: covered as f64 / reps,
    })
}

fn replicate_series(config: &DgpConfig, stream: u64) -> Result<GrowthSeries> {
    let panel = generate_stream(config, stream);
    let growth = growth_rates(&panel)?;
    pool(&growth, &Default::default(), Merge::Merged)
}

pub const SUMMARY_HEADER: [&str; 15] = [
    "label",
    "true_a",
    "true_b",
    "sigma",
    "q_law",
    "regions",
    "transitions",
    "sectors",
    "seed",
    "replications",
    "n",
    "mean_b",
    "sd_b",
    "mc_se",
    "coverage_95",
];

/// One delimited row per experiment.
pub fn write_summaries<W: Write>(rows: &[(String, DgpConfig, RecoverySummary)], delimiter: u8, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().delimiter(delimiter).from_writer(out);
    w.write_record(SUMMARY_HEADER)?;
    for (label, cfg, s) in rows {
        w.write_record([
            label.clone(),
            cfg.true_a.to_string(),
            cfg.true_b.to_string(),
            cfg.sigma.to_string(),
            cfg.q_law.to_string(),
            cfg.regions.to_string(),
            cfg.transitions.to_string(),
            cfg.sectors.len().to_string(),
            cfg.seed.to_string(),
            s.replications.to_string(),
            s.n.to_string(),
            s.mean_b.to_string(),
            s.sd_b.to_string(),
            s.mc_se.to_string(),
            s.coverage_95.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct InfluenceRecord {
    pub left_out: String,
    /// Observations dropped with the region.
    pub removed: usize,
    pub b_without: f64,
    /// b_full − b_without
    pub delta_b: f64,
    pub ee_without: ScaleVerdict,
}

/// Refit the Verdoorn equation once per left-out region; most influential first.
pub fn influence(series: &GrowthSeries) -> Result<Vec<InfluenceRecord>> {
    let regions = series.regions();
    if regions.len() < 3 {
        return Err(Error::InsufficientUnits {
            needed: 3,
            found: regions.len(),
        });
    }
    let b_full = estimate(series, Specification::Verdoorn)?.fit.slope;

    let mut records = regions
        .iter()
        .map(|&region| {
            let reduced = series.without_region(region);
            let b_without = estimate(&reduced, Specification::Verdoorn)?.fit.slope;
            Ok(InfluenceRecord {
                left_out: region.to_string(),
                removed: series.len() - reduced.len(),
                b_without,
                delta_b: b_full - b_without,
                ee_without: economies_of_scale(b_without),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    records.sort_by(|a, b| {
        b.delta_b
            .abs()
            .total_cmp(&a.delta_b.abs())
            .then_with(|| a.left_out.cmp(&b.left_out))
    });
    Ok(records)
}

pub fn write_influence<W: Write>(records: &[InfluenceRecord], delimiter: u8, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().delimiter(delimiter).from_writer(out);
    w.write_record(["left_out", "removed", "b_without", "delta_b", "ee_value", "ee_label"])?;
    for r in records {
        w.write_record([
            r.left_out.clone(),
            r.removed.to_string(),
            r.b_without.to_string(),
            r.delta_b.to_string(),
            r.ee_without.value.to_string(),
            r.ee_without.label.as_str().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q_law_parsing() {
        assert_eq!(
            "uniform(0, 0.1)".parse::<QLaw>().unwrap(),
            QLaw::Uniform { low: 0.0, high: 0.1 }
        );
        assert_eq!(
            "normal(0.03,0.02)".parse::<QLaw>().unwrap(),
            QLaw::Normal { mean: 0.03, sd: 0.02 }
        );
        assert!("uniform(1,0)".parse::<QLaw>().is_err());
        assert!("gamma(1,2)".parse::<QLaw>().is_err());
        assert!("normal(0,-1)".parse::<QLaw>().is_err());
    }

    #[test]
    fn kv_round_trip() {
        let cfg = DgpConfig {
            true_b: 0.9,
            sigma: 0.02,
            q_law: QLaw::Normal { mean: 0.03, sd: 0.02 },
            regions: 28,
            transitions: 4,
            seed: 77,
            sectors: vec!["agriculture".into(), "industry".into()],
            start_year: 1995,
            ..Default::default()
        };
        assert_eq!(DgpConfig::from_kv(&cfg.to_kv()).unwrap(), cfg);
    }

    #[test]
    fn kv_errors() {
        assert!(matches!(
            DgpConfig::from_kv("bogus = 1"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            DgpConfig::from_kv("# c\nsigma 0.1"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(DgpConfig::from_kv("sigma = -0.1"), Err(Error::Config(_))));
        let cfg = DgpConfig::from_kv("seed = 9  # trailing\n\n").unwrap();
        assert_eq!(cfg.seed, 9);
    }

    #[test]
    fn levels_are_positive_and_based_at_100() {
        let cfg = DgpConfig {
            true_b: -2.0,
            sigma: 0.5,
            ..Default::default()
        };
        let panel = generate(&cfg).unwrap();
        assert_eq!(panel.len(), 5 * 9);
        assert!(panel.iter().all(|o| o.output > 0.0 && o.employment > 0.0));
        assert!(panel
            .iter()
            .filter(|o| o.year == 1986)
            .all(|o| o.output == 100.0 && o.employment == 100.0));
    }

    #[test]
    fn streams_differ() {
        let cfg = DgpConfig::default();
        assert_ne!(generate_stream(&cfg, 0), generate_stream(&cfg, 1));
        assert_eq!(generate_stream(&cfg, 3), generate_stream(&cfg, 3));
    }

    #[test]
    fn experiment_needs_enough_replications() {
        assert!(matches!(
            recovery_experiment(&DgpConfig::default(), 99),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn influence_needs_three_regions() {
        let cfg = DgpConfig {
            regions: 2,
            ..Default::default()
        };
        let growth = growth_rates(&generate(&cfg).unwrap()).unwrap();
        let series = pool(&growth, &Default::default(), Merge::PerSector).unwrap();
        assert!(matches!(
            influence(&series),
            Err(Error::InsufficientUnits { needed: 3, found: 2 })
        ));
    }
}
