//! Monte-Carlo coverage campaigns: per-trial input generation, fault-plan
//! construction, protected-pipeline execution, and detection accounting.
//!
//! Trials are independent and carry their own derived seeds, so sharding
//! across worker threads cannot change any count; aggregation is a plain
//! sum. A trial lands in exactly one bucket:
//!
//! * cancelled: the faulty output equals the clean output (this includes
//!   plans that drew no events), so no output-based check could see it;
//! * detected: the output is corrupted and the checksum flagged;
//! * missed: the output is corrupted and the checksum stayed silent.
//!
//! The headline ratio divides detected by (samples - cancelled); the
//! whole-sample ratio is reported alongside.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::detect_kyber::{protected_kyber_ntt, KyberCodingParams};
use crate::detect_nwc::{preprocess_reso_check, protected_nwc_pointwise, CodingParams};
use crate::error::{Error, Result};
use crate::fault::{
    build_fault_plan_burst, build_fault_plan_normal, splitmix64, CorruptionModel, FaultPlan,
};
use crate::kyber::{kyber_ntt, KyberPoly, KYBER_BUTTERFLIES};
use crate::ntt::{ntt_forward, pointwise_mul, pre_process};
use crate::zq::{NttDomainParams, PolyZq};

/// Which protected pipeline a campaign drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scheme {
    /// Negacyclic component-wise product with shift-combine coding.
    #[serde(rename = "nwc-mult")]
    NwcPointwise,
    /// Pre-scaling multiplier array under recomputation with shifted operands.
    #[serde(rename = "nwc-pre")]
    NwcPreprocess,
    /// Seven-stage transform with lane coding and the sum checksum.
    #[serde(rename = "kyber")]
    KyberNtt,
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Scheme::NwcPointwise => "nwc-mult",
            Scheme::NwcPreprocess => "nwc-pre",
            Scheme::KyberNtt => "kyber",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Normal,
    Burst,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Normal => "normal",
            Mode::Burst => "burst",
        })
    }
}

/// Named domain parameter sets selectable from the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ParamSet {
    /// n=256, q=7681, omega=3844, psi=62 - the negacyclic campaign domain.
    #[serde(rename = "round1")]
    Round1,
    /// n=256, q=3329, omega=17 - the seven-stage transform domain.
    #[serde(rename = "kyber")]
    Kyber,
}

impl std::fmt::Display for ParamSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ParamSet::Round1 => "round1",
            ParamSet::Kyber => "kyber",
        })
    }
}

impl ParamSet {
    pub fn domain(&self) -> NttDomainParams {
        match self {
            ParamSet::Round1 => NttDomainParams::round1(),
            ParamSet::Kyber => NttDomainParams::kyber_field(),
        }
    }
}

fn default_samples() -> usize {
    100_000
}

fn default_seed() -> u64 {
    42
}

/// A full campaign description; also the on-disk JSON config format.
/// Command-line flags override any field.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub scheme: Scheme,
    #[serde(default = "CampaignConfig::default_mode")]
    pub mode: Mode,
    /// Normal mode: requested mean fault counts. Burst mode: row labels.
    #[serde(default)]
    pub fault_counts: Vec<usize>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Defaults to the scheme's natural domain.
    #[serde(default)]
    pub params: Option<ParamSet>,
    /// Coding scalars; None picks the first valid pair for the scheme.
    #[serde(default)]
    pub alpha: Option<u32>,
    #[serde(default)]
    pub beta: Option<u32>,
    #[serde(default)]
    pub corruption: CorruptionModel,
    /// Extend the nwc-mult site universe with the n component-wise
    /// multiplier slots (off by default: butterflies only).
    #[serde(default)]
    pub include_pointwise: bool,
    /// Output format for the emitted report (CLI flag wins; csv when unset).
    #[serde(default)]
    pub format: Option<crate::report::ReportFormat>,
    /// Output path for the emitted report (stdout when unset).
    #[serde(default)]
    pub out: Option<std::path::PathBuf>,
}

impl CampaignConfig {
    fn default_mode() -> Mode {
        Mode::Normal
    }

    pub fn new(scheme: Scheme) -> Self {
        Self {
            scheme,
            mode: Mode::Normal,
            fault_counts: Vec::new(),
            samples: default_samples(),
            seed: default_seed(),
            params: None,
            alpha: None,
            beta: None,
            corruption: CorruptionModel::Additive,
            include_pointwise: false,
            format: None,
            out: None,
        }
    }

    /// The standard row ladders: 1,2,4,8,16 in normal mode, 2..6 in burst.
    pub fn standard_fault_counts(mode: Mode) -> Vec<usize> {
        match mode {
            Mode::Normal => vec![1, 2, 4, 8, 16],
            Mode::Burst => vec![2, 3, 4, 5, 6],
        }
    }

    pub fn effective_params(&self) -> ParamSet {
        self.params.unwrap_or(match self.scheme {
            Scheme::KyberNtt => ParamSet::Kyber,
            _ => ParamSet::Round1,
        })
    }

    pub fn effective_fault_counts(&self) -> Vec<usize> {
        if self.fault_counts.is_empty() {
            Self::standard_fault_counts(self.mode)
        } else {
            self.fault_counts.clone()
        }
    }

    /// Site-universe size for one trial of this campaign.
    pub fn total_sites(&self) -> usize {
        match self.scheme {
            Scheme::KyberNtt => KYBER_BUTTERFLIES,
            Scheme::NwcPreprocess => self.effective_params().domain().n,
            Scheme::NwcPointwise => {
                let d = self.effective_params().domain();
                2 * d.butterfly_count() + if self.include_pointwise { d.n } else { 0 }
            }
        }
    }

    /// Field-level validation; collects every problem before failing.
    pub fn validate(&self) -> Result<()> {
        let mut issues = Vec::new();
        if self.samples == 0 {
            issues.push("samples: must be at least 1".to_string());
        }
        let counts = self.effective_fault_counts();
        if counts.is_empty() {
            issues.push("fault_counts: must be nonempty".to_string());
        }
        let params = self.effective_params();
        match (self.scheme, params) {
            (Scheme::KyberNtt, ParamSet::Kyber) => {}
            (Scheme::KyberNtt, other) => {
                issues.push(format!("params: scheme kyber requires params kyber, got {other}"));
            }
            (_, ParamSet::Round1) => {}
            (s, other) => {
                issues.push(format!(
                    "params: scheme {s} needs a 2n-th root of unity, {other} has none"
                ));
            }
        }
        let sites = if issues.is_empty() { self.total_sites() } else { 0 };
        if self.mode == Mode::Normal && issues.is_empty() {
            for &f in &counts {
                if f > sites {
                    issues.push(format!("fault_counts: {f} exceeds the {sites} fault sites"));
                }
            }
        }
        if self.mode == Mode::Burst {
            for &f in &counts {
                if f == 0 {
                    issues.push("fault_counts: burst labels must be at least 1".to_string());
                }
            }
        }
        if issues.is_empty() {
            if let Err(e) = self.build_coding() {
                issues.push(format!("alpha/beta: {e}"));
            }
        }
        if issues.is_empty() {
            Ok(())
        } else {
            Err(Error::ConfigError(issues))
        }
    }

    fn build_coding(&self) -> Result<SchemeCoding> {
        match self.scheme {
            Scheme::KyberNtt => {
                let coding = match (self.alpha, self.beta) {
                    (Some(a), Some(b)) => KyberCodingParams::new(a, b)?,
                    (None, None) => KyberCodingParams::default_pair(),
                    (a, b) => {
                        KyberCodingParams::new(a.unwrap_or(1), b.unwrap_or(1))?
                    }
                };
                Ok(SchemeCoding::Kyber(coding))
            }
            Scheme::NwcPointwise => {
                let domain = self.effective_params().domain();
                let coding = match (self.alpha, self.beta) {
                    (Some(a), Some(b)) => CodingParams::new(a, b, &domain)?,
                    (None, None) => CodingParams::first_valid(&domain),
                    (a, b) => CodingParams::new(a.unwrap_or(1), b.unwrap_or(1), &domain)?,
                };
                Ok(SchemeCoding::Nwc(coding))
            }
            // the shifted-operand check has no coding scalars
            Scheme::NwcPreprocess => Ok(SchemeCoding::None),
        }
    }
}

enum SchemeCoding {
    Nwc(CodingParams),
    Kyber(KyberCodingParams),
    None,
}

/// One fault-count row of a campaign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageRow {
    pub scheme: Scheme,
    pub mode: Mode,
    pub corruption: CorruptionModel,
    pub fault_count: usize,
    pub samples: usize,
    pub detected: usize,
    pub missed: usize,
    pub cancelled: usize,
    /// samples - cancelled: trials whose output was actually corrupted.
    pub effective: usize,
    /// detected / effective, the headline detection ratio.
    pub ratio: f64,
    /// detected / samples.
    pub ratio_all_samples: f64,
    /// Mean number of corrupted sites per trial.
    pub mean_injected_faults: f64,
    pub seed: u64,
}

/// Campaign-level constants recorded for exact replay.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub params: ParamSet,
    pub n: usize,
    pub q: u32,
    pub omega: u32,
    pub psi: Option<u32>,
    pub alpha: Option<u32>,
    pub beta: Option<u32>,
    pub corruption: CorruptionModel,
    pub include_pointwise: bool,
    pub samples: usize,
    pub seed: u64,
    pub version: String,
}

/// Detection statistics for a campaign, one row per fault count. The
/// emitted forms contain no timing, so replays are byte-identical; wall
/// time lives only in the transient `wall_ms`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub environment: Environment,
    pub rows: Vec<CoverageRow>,
    #[serde(skip)]
    pub wall_ms: u128,
}

impl CoverageReport {
    /// Concatenates rows of reports that share a seed and sample count;
    /// used to lay sensitivity sweeps side by side.
    pub fn merged(mut reports: Vec<CoverageReport>) -> Option<CoverageReport> {
        let mut base = reports.drain(..1).next()?;
        for r in reports {
            base.rows.extend(r.rows);
            base.wall_ms += r.wall_ms;
        }
        Some(base)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TrialOutcome {
    Detected,
    Missed,
    Cancelled,
}

/// Derives the per-trial RNG. The stream depends only on (campaign seed,
/// scheme, mode, fault count, trial index), never on sharding, so serial
/// and parallel runs agree exactly and a single row can be replayed alone.
fn trial_rng(seed: u64, scheme: Scheme, mode: Mode, fault_count: usize, trial: usize) -> ChaCha8Rng {
    let scheme_id = match scheme {
        Scheme::NwcPointwise => 1u64,
        Scheme::NwcPreprocess => 2,
        Scheme::KyberNtt => 3,
    };
    let mode_id = match mode {
        Mode::Normal => 1u64,
        Mode::Burst => 2,
    };
    let lane = splitmix64(seed ^ splitmix64(scheme_id << 8 | mode_id) ^ (fault_count as u64));
    ChaCha8Rng::seed_from_u64(splitmix64(lane ^ trial as u64))
}

fn build_plan(
    cfg: &CampaignConfig,
    fault_count: usize,
    sites: usize,
    q: u32,
    rng: &mut ChaCha8Rng,
) -> Result<FaultPlan> {
    let plan_seed = rng.gen::<u64>();
    match cfg.mode {
        Mode::Normal => build_fault_plan_normal(fault_count, sites, plan_seed, q, cfg.corruption),
        Mode::Burst => build_fault_plan_burst(sites, fault_count, plan_seed, q, cfg.corruption),
    }
}

/// Runs every row of the campaign and aggregates the detection statistics.
pub fn run_campaign(cfg: &CampaignConfig) -> Result<CoverageReport> {
    cfg.validate()?;
    let start = std::time::Instant::now();
    let domain = cfg.effective_params().domain();
    let coding = cfg.build_coding()?;
    let sites = cfg.total_sites();
    let q = domain.q;

    let mut rows = Vec::new();
    for &fault_count in &cfg.effective_fault_counts() {
        let (detected, missed, cancelled, injected) = (0..cfg.samples)
            .into_par_iter()
            .map(|trial| {
                let mut rng = trial_rng(cfg.seed, cfg.scheme, cfg.mode, fault_count, trial);
                let (outcome, injected) = match (&coding, cfg.scheme) {
                    (SchemeCoding::Nwc(c), Scheme::NwcPointwise) => {
                        nwc_trial(cfg, c, &domain, fault_count, sites, q, &mut rng)
                    }
                    (SchemeCoding::None, Scheme::NwcPreprocess) => {
                        preprocess_trial(cfg, &domain, fault_count, sites, q, &mut rng)
                    }
                    (SchemeCoding::Kyber(c), Scheme::KyberNtt) => {
                        kyber_trial(cfg, c, fault_count, sites, q, &mut rng)
                    }
                    _ => unreachable!("coding/scheme pairing fixed by build_coding"),
                };
                let mut buckets = (0usize, 0usize, 0usize, injected as u64);
                match outcome {
                    TrialOutcome::Detected => buckets.0 = 1,
                    TrialOutcome::Missed => buckets.1 = 1,
                    TrialOutcome::Cancelled => buckets.2 = 1,
                }
                buckets
            })
            .reduce(
                || (0, 0, 0, 0),
                |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2, a.3 + b.3),
            );
        let effective = cfg.samples - cancelled;
        rows.push(CoverageRow {
            scheme: cfg.scheme,
            mode: cfg.mode,
            corruption: cfg.corruption,
            fault_count,
            samples: cfg.samples,
            detected,
            missed,
            cancelled,
            effective,
            ratio: if effective > 0 { detected as f64 / effective as f64 } else { 0.0 },
            ratio_all_samples: detected as f64 / cfg.samples as f64,
            mean_injected_faults: injected as f64 / cfg.samples as f64,
            seed: cfg.seed,
        });
    }

    let (alpha, beta) = match &coding {
        SchemeCoding::Nwc(c) => (Some(c.alpha), Some(c.beta)),
        SchemeCoding::Kyber(c) => (Some(c.alpha), Some(c.beta)),
        SchemeCoding::None => (None, None),
    };
    Ok(CoverageReport {
        environment: Environment {
            params: cfg.effective_params(),
            n: domain.n,
            q: domain.q,
            omega: domain.omega,
            psi: domain.psi,
            alpha,
            beta,
            corruption: cfg.corruption,
            include_pointwise: cfg.include_pointwise,
            samples: cfg.samples,
            seed: cfg.seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
        },
        rows,
        wall_ms: start.elapsed().as_millis(),
    })
}

fn classify(corrupted: bool, flagged: bool) -> TrialOutcome {
    match (corrupted, flagged) {
        (false, _) => TrialOutcome::Cancelled,
        (true, true) => TrialOutcome::Detected,
        (true, false) => TrialOutcome::Missed,
    }
}

fn nwc_trial(
    cfg: &CampaignConfig,
    coding: &CodingParams,
    domain: &NttDomainParams,
    fault_count: usize,
    sites: usize,
    q: u32,
    rng: &mut ChaCha8Rng,
) -> (TrialOutcome, usize) {
    let f = PolyZq::uniform(rng, domain.n, q);
    let g = PolyZq::uniform(rng, domain.n, q);
    let plan = build_plan(cfg, fault_count, sites, q, rng).expect("validated config");
    let injected = plan.actual_faults();

    // the fault-free protected output equals the plain product exactly
    let clean = pointwise_mul(
        &ntt_forward(&pre_process(&f, domain).expect("psi present"), domain).expect("sized"),
        &ntt_forward(&pre_process(&g, domain).expect("psi present"), domain).expect("sized"),
        q,
    )
    .expect("matching orderings");
    let (out, verdict) =
        protected_nwc_pointwise(&f, &g, domain, coding, Some(&plan)).expect("validated plan");
    (classify(out.values != clean.values, verdict.flagged), injected)
}

fn preprocess_trial(
    cfg: &CampaignConfig,
    domain: &NttDomainParams,
    fault_count: usize,
    sites: usize,
    q: u32,
    rng: &mut ChaCha8Rng,
) -> (TrialOutcome, usize) {
    let f = PolyZq::uniform(rng, domain.n, q);
    let plan = build_plan(cfg, fault_count, sites, q, rng).expect("validated config");
    let injected = plan.actual_faults();
    let clean = pre_process(&f, domain).expect("psi present");
    let (out, verdict) = preprocess_reso_check(&f, domain, Some(&plan)).expect("validated plan");
    (classify(out != clean, verdict.flagged), injected)
}

fn kyber_trial(
    cfg: &CampaignConfig,
    coding: &KyberCodingParams,
    fault_count: usize,
    sites: usize,
    q: u32,
    rng: &mut ChaCha8Rng,
) -> (TrialOutcome, usize) {
    let f = KyberPoly::uniform(rng);
    let plan = build_plan(cfg, fault_count, sites, q, rng).expect("validated config");
    let injected = plan.actual_faults();
    let clean = kyber_ntt(&f);
    let (out, verdict) = protected_kyber_ntt(&f, coding, Some(&plan)).expect("validated plan");
    (classify(out != clean, verdict.flagged), injected)
}
