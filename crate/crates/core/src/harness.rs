//! Seeded Monte Carlo engine: per-trial estimation and downlink evaluation,
//! the snapshot protocol for sample correlations, figure sweeps and CSV
//! output.
//!
//! Trial `i` draws from ChaCha8 seeded with the master seed on stream `i`,
//! so results do not depend on scheduling or thread count. Every sweep
//! point reuses the same trial streams.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::array_channel::{
    sample_channel_draw, steering_matrix, synthesize_with, ChannelDraw, CompositeSet, SteeringMatrix,
};
use crate::error::{Error, Result};
use crate::estimators::{
    eigendecompose_signal_subspace, lmmse_improved, lmmse_naive, lse, mle, mmse, mmse_smi, mmse_subspace,
    DataCorrelation, DisturbanceModel,
};
use crate::linalg::{hermitize, CMat, CVec, CompensatedSum};
use crate::metrics::{
    bmse_lse_closed_form, bmse_mle_closed_form, bmse_mmse_closed_form, matched_filter_precoder,
    sinr_and_secrecy,
};
use crate::scenario::{
    db_to_linear, make_dft_pilots, EveErrorModel, EveKnowledge, Experiment, FigurePreset, ScenarioConfig,
    SweepPoint,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EstimatorTag {
    Lse,
    Mle,
    Mmse,
    MmseSmi,
    MmseSub,
    LmmseNaive,
    LmmseImproved,
}

impl EstimatorTag {
    pub const ALL: [EstimatorTag; 7] = [
        EstimatorTag::Lse,
        EstimatorTag::Mle,
        EstimatorTag::Mmse,
        EstimatorTag::MmseSmi,
        EstimatorTag::MmseSub,
        EstimatorTag::LmmseNaive,
        EstimatorTag::LmmseImproved,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EstimatorTag::Lse => "lse",
            EstimatorTag::Mle => "mle",
            EstimatorTag::Mmse => "mmse",
            EstimatorTag::MmseSmi => "mmse-smi",
            EstimatorTag::MmseSub => "mmse-sub",
            EstimatorTag::LmmseNaive => "lmmse-naive",
            EstimatorTag::LmmseImproved => "lmmse-improved",
        }
    }

    /// Whether the estimator consumes a sampled data correlation.
    pub fn needs_snapshots(self) -> bool {
        matches!(self, EstimatorTag::MmseSmi | EstimatorTag::MmseSub)
    }

    pub fn has_closed_form(self) -> bool {
        matches!(self, EstimatorTag::Lse | EstimatorTag::Mle | EstimatorTag::Mmse)
    }
}

impl fmt::Display for EstimatorTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EstimatorTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EstimatorTag::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown estimator '{s}'")))
    }
}

/// Parses a comma-separated estimator list, dropping duplicates.
pub fn parse_estimator_list(s: &str) -> Result<Vec<EstimatorTag>> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let t: EstimatorTag = part.parse()?;
        if !out.contains(&t) {
            out.push(t);
        }
    }
    if out.is_empty() {
        return Err(Error::Config("empty estimator list".into()));
    }
    Ok(out)
}

/// Estimators plotted for each figure preset.
pub fn default_estimators(preset: FigurePreset) -> Vec<EstimatorTag> {
    use EstimatorTag::*;
    match preset {
        FigurePreset::Fig3 | FigurePreset::Fig8 | FigurePreset::Fig9 => {
            vec![Lse, Mle, Mmse, LmmseNaive, LmmseImproved]
        }
        FigurePreset::Fig4 => vec![Lse, Mle, Mmse],
        FigurePreset::Fig5 => vec![Mmse, MmseSmi, MmseSub],
        FigurePreset::Fig10 => vec![Mmse, LmmseNaive, LmmseImproved],
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialPlan {
    pub master_seed: u64,
    pub trials: usize,
    pub estimators: Vec<EstimatorTag>,
    /// Snapshot count when the sweep itself does not fix one.
    pub q_snapshots: Option<usize>,
    /// Downlink SNR in dB; `None` ties it to the target Bob's uplink SNR.
    pub snr_dl_db: Option<f64>,
    /// Also run every estimator with all spoofers silent, on the same draws.
    pub passive_baseline: bool,
    /// Worker threads; `None` uses the rayon default.
    pub threads: Option<usize>,
}

impl TrialPlan {
    pub fn new(master_seed: u64, trials: usize, estimators: Vec<EstimatorTag>) -> Self {
        Self {
            master_seed,
            trials,
            estimators,
            q_snapshots: None,
            snr_dl_db: None,
            passive_baseline: false,
            threads: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("at least one trial is required".into()));
        }
        if self.estimators.is_empty() {
            return Err(Error::Config("no estimators selected".into()));
        }
        if self.q_snapshots == Some(0) {
            return Err(Error::Config("snapshot count must be at least 1".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::Config("thread count must be at least 1".into()));
        }
        Ok(())
    }

    fn needs_snapshots(&self) -> bool {
        self.estimators.iter().any(|t| t.needs_snapshots())
    }

    fn snapshots_for(&self, point: &SweepPoint) -> Result<Option<usize>> {
        if !self.needs_snapshots() {
            return Ok(None);
        }
        match point.q_snapshots.or(self.q_snapshots) {
            Some(0) | None => Err(Error::Config(
                "sample-correlation estimators need a snapshot count".into(),
            )),
            Some(q) => Ok(Some(q)),
        }
    }
}

/// RNG for trial `trial_index` of a run seeded with `master_seed`.
pub fn trial_rng(master_seed: u64, trial_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial_index);
    rng
}

/// Outcome of one estimator in one trial. Errors and rates refer to user 1.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialMetrics {
    /// Estimates for every user.
    pub estimates: Vec<CVec>,
    pub squared_error: f64,
    pub normalized_squared_error: f64,
    pub rate_bob: f64,
    pub rate_eve: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorOutcome {
    pub tag: EstimatorTag,
    pub passive: bool,
    pub result: std::result::Result<TrialMetrics, Error>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial_index: u64,
    pub outcomes: Vec<EstimatorOutcome>,
}

/// Everything an estimator may legitimately consume for one user.
#[derive(Debug, Clone)]
pub struct UserInputs<'a> {
    pub y: &'a CVec,
    pub k_b: &'a CMat,
    /// True spoofing matrix; only the genie-aided MLE/MMSE read it.
    pub k_e: &'a CMat,
    pub knowledge: &'a EveKnowledge,
    pub sample_correlation: Option<&'a DataCorrelation>,
    /// Signal-subspace dimension for the subspace estimator.
    pub signal_dim: usize,
}

/// Runs one estimator on one user.
pub fn estimate(tag: EstimatorTag, input: &UserInputs<'_>, config: &ScenarioConfig) -> Result<CVec> {
    let nv = config.noise_variance;
    let sample = || {
        input
            .sample_correlation
            .ok_or_else(|| Error::Config("no sample correlation supplied".into()))
    };
    match tag {
        EstimatorTag::Lse => lse(input.y, input.k_b),
        EstimatorTag::Mle => mle(input.y, input.k_b, &DisturbanceModel::from_spoofing(input.k_e, nv)?),
        EstimatorTag::Mmse => {
            let d = DisturbanceModel::from_spoofing(input.k_e, nv)?;
            mmse(input.y, input.k_b, &DataCorrelation::exact(input.k_b, &d))
        }
        EstimatorTag::MmseSmi => mmse_smi(input.y, input.k_b, sample()?),
        EstimatorTag::MmseSub => {
            let dec = eigendecompose_signal_subspace(sample()?, input.signal_dim)?;
            mmse_subspace(input.y, input.k_b, &dec)
        }
        EstimatorTag::LmmseNaive => lmmse_naive(input.y, input.k_b, input.knowledge, nv, &config.array),
        EstimatorTag::LmmseImproved => {
            lmmse_improved(input.y, input.k_b, input.knowledge, nv, &config.array)
        }
    }
}

fn signal_dim(config: &ScenarioConfig, user: usize) -> usize {
    let l_e = if config.eves[user].power > 0.0 {
        config.eves[user].paths()
    } else {
        0
    };
    (config.bobs[user].paths() + l_e).min(config.array.n_antennas)
}

fn correlate_all(composites: &CompositeSet, config: &ScenarioConfig, pilots: &[CVec], draw: &ChannelDraw) -> Result<Vec<CVec>> {
    let y = synthesize_with(composites, config, pilots, draw)?;
    Ok(pilots.iter().map(|p| &y * p.conjugate()).collect())
}

/// Sample correlations for each scenario in `configs` and each user,
/// from `q` shared fresh draws (one per coherence interval).
fn sample_correlations<R: Rng + ?Sized>(
    configs: &[(&ScenarioConfig, &CompositeSet)],
    pilots: &[CVec],
    q: usize,
    rng: &mut R,
) -> Result<Vec<Vec<DataCorrelation>>> {
    if q == 0 {
        return Err(Error::EmptyInput("no snapshots"));
    }
    let base = configs[0].0;
    let n = base.array.n_antennas;
    let m = base.users();
    let one = Complex64::new(1.0, 0.0);
    let mut acc = vec![vec![CMat::zeros(n, n); m]; configs.len()];
    for _ in 0..q {
        let draw = sample_channel_draw(base, rng);
        for (c, (cfg, comp)) in configs.iter().enumerate() {
            for (u, y) in correlate_all(comp, cfg, pilots, &draw)?.into_iter().enumerate() {
                acc[c][u].ger(one, &y, &y.conjugate(), one);
            }
        }
    }
    let inv_q = Complex64::new(1.0 / q as f64, 0.0);
    acc.into_iter()
        .map(|per_user| {
            per_user
                .into_iter()
                .map(|s| DataCorrelation::new(hermitize(&(s * inv_q))))
                .collect()
        })
        .collect()
}

/// `S_yy = (1/q) sum y y^H` for `target_user`, each `y` correlated from an
/// independent channel draw with the same pilot used for estimation.
pub fn estimate_syy_protocol<R: Rng + ?Sized>(
    config: &ScenarioConfig,
    pilots: &[CVec],
    target_user: usize,
    q: usize,
    rng: &mut R,
) -> Result<DataCorrelation> {
    if target_user >= config.users() {
        return Err(Error::Dimension(format!("no user {target_user}")));
    }
    let comp = CompositeSet::new(config);
    let mut all = sample_correlations(&[(config, &comp)], pilots, q, rng)?;
    Ok(all.remove(0).swap_remove(target_user))
}

fn passive_knowledge(k: &EveKnowledge) -> EveKnowledge {
    EveKnowledge {
        power_estimate: 0.0,
        ..k.clone()
    }
}

struct Prepared<'a> {
    config: &'a ScenarioConfig,
    composites: CompositeSet,
    bob_steering: Vec<SteeringMatrix>,
    eve_steering: Vec<SteeringMatrix>,
}

impl<'a> Prepared<'a> {
    fn new(config: &'a ScenarioConfig) -> Self {
        Self {
            config,
            composites: CompositeSet::new(config),
            bob_steering: config.bobs.iter().map(|b| steering_matrix(b, &config.array)).collect(),
            eve_steering: config.eves.iter().map(|e| steering_matrix(e, &config.array)).collect(),
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn evaluate(
    prep: &Prepared<'_>,
    tags: &[EstimatorTag],
    passive: bool,
    pilots: &[CVec],
    draw: &ChannelDraw,
    knowledge: &[EveKnowledge],
    samples: Option<&[DataCorrelation]>,
    snr_dl: f64,
    out: &mut Vec<EstimatorOutcome>,
) -> Result<()> {
    let cfg = prep.config;
    let ys = correlate_all(&prep.composites, cfg, pilots, draw)?;
    for &tag in tags {
        let result = (|| {
            let estimates = (0..cfg.users())
                .map(|u| {
                    let input = UserInputs {
                        y: &ys[u],
                        k_b: &prep.composites.bobs[u],
                        k_e: &prep.composites.eves[u],
                        knowledge: &knowledge[u],
                        sample_correlation: samples.map(|s| &s[u]),
                        signal_dim: signal_dim(cfg, u),
                    };
                    estimate(tag, &input, cfg)
                })
                .collect::<Result<Vec<_>>>()?;
            let truth = &draw.bob_gains[0];
            let squared_error = (&estimates[0] - truth).norm_squared();
            let precoder = matched_filter_precoder(&estimates, &prep.bob_steering)?;
            let q = sinr_and_secrecy(draw, &precoder, &prep.bob_steering, &prep.eve_steering, snr_dl)?;
            Ok(TrialMetrics {
                squared_error,
                normalized_squared_error: squared_error / truth.norm_squared(),
                rate_bob: q[0].rate_bob,
                rate_eve: q[0].rate_eve,
                estimates,
            })
        })();
        out.push(EstimatorOutcome { tag, passive, result });
    }
    Ok(())
}

fn snr_dl(plan: &TrialPlan, config: &ScenarioConfig) -> f64 {
    plan.snr_dl_db.map(db_to_linear).unwrap_or_else(|| config.snr_b(0))
}

struct PointContext<'a> {
    point: &'a SweepPoint,
    attack: Prepared<'a>,
    passive: Option<Prepared<'a>>,
    pilots: Vec<CVec>,
    q: Option<usize>,
}

fn point_context<'a>(point: &'a SweepPoint, plan: &TrialPlan, passive_cfg: Option<&'a ScenarioConfig>) -> Result<PointContext<'a>> {
    plan.validate()?;
    let cfg = &point.scenario;
    Ok(PointContext {
        point,
        attack: Prepared::new(cfg),
        passive: passive_cfg.map(Prepared::new),
        pilots: make_dft_pilots(cfg.pilot_length, cfg.users())?,
        q: plan.snapshots_for(point)?,
    })
}

fn run_trial_in(ctx: &PointContext<'_>, plan: &TrialPlan, eve_model: &EveErrorModel, trial_index: u64) -> Result<TrialRecord> {
    let cfg = &ctx.point.scenario;
    let mut rng = trial_rng(plan.master_seed, trial_index);
    let draw = sample_channel_draw(cfg, &mut rng);
    let knowledge: Vec<EveKnowledge> = cfg.eves.iter().map(|e| eve_model.sample_knowledge(e, &mut rng)).collect();
    let samples = match ctx.q {
        Some(q) => {
            let mut set = vec![(ctx.attack.config, &ctx.attack.composites)];
            if let Some(p) = &ctx.passive {
                set.push((p.config, &p.composites));
            }
            Some(sample_correlations(&set, &ctx.pilots, q, &mut rng)?)
        }
        None => None,
    };
    let mut outcomes = Vec::with_capacity(plan.estimators.len() * 2);
    let s = samples.as_ref().map(|s| s[0].as_slice());
    evaluate(&ctx.attack, &plan.estimators, false, &ctx.pilots, &draw, &knowledge, s, snr_dl(plan, cfg), &mut outcomes)?;
    if let Some(p) = &ctx.passive {
        let know: Vec<EveKnowledge> = knowledge.iter().map(passive_knowledge).collect();
        let s = samples.as_ref().map(|s| s[1].as_slice());
        evaluate(p, &plan.estimators, true, &ctx.pilots, &draw, &know, s, snr_dl(plan, p.config), &mut outcomes)?;
    }
    Ok(TrialRecord {
        trial_index,
        outcomes,
    })
}

/// One Monte Carlo trial at a sweep point: a channel draw, Alice's view of
/// every Eve, optional snapshot correlations, then every selected estimator
/// for every user with the matched-filter downlink built from its estimates.
/// Estimator failures are recorded in the outcome rather than returned.
pub fn run_trial(point: &SweepPoint, plan: &TrialPlan, trial_index: u64) -> Result<TrialRecord> {
    let passive = plan.passive_baseline.then(|| point.scenario.clone().passive());
    let ctx = point_context(point, plan, passive.as_ref())?;
    run_trial_in(&ctx, plan, &point.eve_model, trial_index)
}

/// One CSV row: the averages for one estimator at one sweep value.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub sweep_var: String,
    pub sweep_value: f64,
    /// Estimator name, with `-passive` appended for baseline rows.
    pub estimator: String,
    pub nbmse: f64,
    pub bmse: f64,
    pub closed_form_bmse: Option<f64>,
    /// `max(rate_bob - rate_eve, 0)` of the ergodic (trial-averaged) rates.
    pub secrecy_rate: f64,
    pub rate_bob: f64,
    pub rate_eve: f64,
    pub trials: usize,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn row(&self, estimator: &str, sweep_value: f64) -> Option<&SweepRow> {
        self.rows
            .iter()
            .find(|r| r.estimator == estimator && r.sweep_value == sweep_value)
    }

    /// Rows of one estimator in sweep order.
    pub fn series(&self, estimator: &str) -> Vec<&SweepRow> {
        self.rows.iter().filter(|r| r.estimator == estimator).collect()
    }
}

fn closed_form(tag: EstimatorTag, cfg: &ScenarioConfig) -> Option<f64> {
    let report = match tag {
        EstimatorTag::Lse => bmse_lse_closed_form(
            &steering_matrix(&cfg.bobs[0], &cfg.array),
            &steering_matrix(&cfg.eves[0], &cfg.array),
            cfg.snr_b(0),
            cfg.ssr(0),
        ),
        EstimatorTag::Mle | EstimatorTag::Mmse => {
            let comp = CompositeSet::new(cfg);
            DisturbanceModel::from_spoofing(&comp.eves[0], cfg.noise_variance).and_then(|d| {
                if tag == EstimatorTag::Mle {
                    bmse_mle_closed_form(&comp.bobs[0], &d)
                } else {
                    bmse_mmse_closed_form(&comp.bobs[0], &d)
                }
            })
        }
        _ => return None,
    };
    report.ok().map(|r| r.closed_form)
}

fn aggregate(
    records: &[TrialRecord],
    slot: usize,
    tag: EstimatorTag,
    passive: bool,
    point: &SweepPoint,
    sweep_var: &str,
    cfg: &ScenarioConfig,
) -> SweepRow {
    let mut nb = CompensatedSum::default();
    let mut b = CompensatedSum::default();
    let mut rb = CompensatedSum::default();
    let mut re = CompensatedSum::default();
    let mut ok = 0usize;
    for rec in records {
        if let Ok(m) = &rec.outcomes[slot].result {
            nb.add(m.normalized_squared_error);
            b.add(m.squared_error);
            rb.add(m.rate_bob);
            re.add(m.rate_eve);
            ok += 1;
        }
    }
    let mean = |s: CompensatedSum| if ok == 0 { f64::NAN } else { s.value() / ok as f64 };
    let (rate_bob, rate_eve) = (mean(rb), mean(re));
    let secrecy_rate = if ok == 0 { f64::NAN } else { (rate_bob - rate_eve).max(0.0) };
    let estimator = if passive {
        format!("{}-passive", tag.name())
    } else {
        tag.name().to_string()
    };
    SweepRow {
        sweep_var: sweep_var.to_string(),
        sweep_value: point.value,
        estimator,
        nbmse: mean(nb),
        bmse: mean(b),
        closed_form_bmse: closed_form(tag, cfg),
        secrecy_rate,
        rate_bob,
        rate_eve,
        trials: ok,
        failures: records.len() - ok,
    }
}

fn run_point(ctx: &PointContext<'_>, plan: &TrialPlan, sweep_var: &str) -> Result<Vec<SweepRow>> {
    let point = ctx.point;
    let records = (0..plan.trials as u64)
        .into_par_iter()
        .map(|i| run_trial_in(ctx, plan, &point.eve_model, i))
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    let n_tags = plan.estimators.len();
    for (slot, &tag) in plan.estimators.iter().enumerate() {
        rows.push(aggregate(&records, slot, tag, false, point, sweep_var, &point.scenario));
    }
    if let Some(p) = &ctx.passive {
        for (j, &tag) in plan.estimators.iter().enumerate() {
            rows.push(aggregate(&records, n_tags + j, tag, true, point, sweep_var, p.config));
        }
    }
    Ok(rows)
}

/// Runs every trial at every grid point and averages per estimator.
pub fn run_sweep(experiment: &Experiment, plan: &TrialPlan) -> Result<SweepResult> {
    experiment.validate()?;
    plan.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(plan.threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let var = experiment.sweep.variable.name();
    let mut rows = Vec::new();
    for point in experiment.points()? {
        let passive = plan.passive_baseline.then(|| point.scenario.clone().passive());
        let ctx = point_context(&point, plan, passive.as_ref())?;
        rows.extend(pool.install(|| run_point(&ctx, plan, var))?);
    }
    Ok(SweepResult { rows })
}

pub const CSV_HEADER: [&str; 11] = [
    "sweep_var",
    "sweep_value",
    "estimator",
    "nbmse",
    "bmse",
    "closed_form_bmse",
    "secrecy_rate",
    "rate_bob",
    "rate_eve",
    "trials",
    "failures",
];

pub fn write_csv<W: Write>(result: &SweepResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in &result.rows {
        w.write_record([
            r.sweep_var.clone(),
            r.sweep_value.to_string(),
            r.estimator.clone(),
            r.nbmse.to_string(),
            r.bmse.to_string(),
            r.closed_form_bmse.map(|v| v.to_string()).unwrap_or_default(),
            r.secrecy_rate.to_string(),
            r.rate_bob.to_string(),
            r.rate_eve.to_string(),
            r.trials.to_string(),
            r.failures.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_csv(result: &SweepResult, path: impl AsRef<Path>) -> Result<()> {
    write_csv(result, std::fs::File::create(path)?)
}

/// Gnuplot script drawing NBMSE and secrecy rate against the sweep variable
/// for each estimator in `csv_path`.
pub fn plot_script(result: &SweepResult, csv_path: &str) -> String {
    let mut names: Vec<&str> = Vec::new();
    for r in &result.rows {
        if !names.contains(&r.estimator.as_str()) {
            names.push(&r.estimator);
        }
    }
    let var = result.rows.first().map(|r| r.sweep_var.as_str()).unwrap_or("sweep_value");
    let stem = csv_path.strip_suffix(".csv").unwrap_or(csv_path);
    let curves = |col: usize| {
        names
            .iter()
            .map(|n| {
                format!(
                    "  '{csv_path}' using 2:(strcol(3) eq \"{n}\" ? ${col} : 1/0) with linespoints title \"{n}\""
                )
            })
            .collect::<Vec<_>>()
            .join(", \\\n")
    };
    format!(
        "set datafile separator ','\n\
         set key autotitle columnhead\n\
         set terminal pngcairo size 900,600\n\
         set grid\n\
         set xlabel '{var}'\n\
         \n\
         set output '{stem}_nbmse.png'\n\
         set logscale y\n\
         set ylabel 'NBMSE'\n\
         plot \\\n{}\n\
         \n\
         set output '{stem}_secrecy.png'\n\
         unset logscale y\n\
         set ylabel 'secrecy rate (bit/s/Hz, unnormalized)'\n\
         plot \\\n{}\n",
        curves(4),
        curves(7)
    )
}
