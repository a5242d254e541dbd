//! Monte Carlo oracle: surplus paths, ruin, record jumps and injections.
//!
//! Paths of `Y_t = −ct + S_t + σB_t` are simulated for the exponential-claims
//! models. Ruin happens at `τ_x = inf{t : Y_t > x}`; afterwards every jump that
//! takes `Y` above its running supremum is a record, and the injection paid
//! there is the increase of `Y` since the previous record.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, StandardNormal};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::model::{ModelError, ModelSpec};
use crate::premium::{Contract, PremiumQuery};

/// Paths per accumulation chunk. Chunks are merged in index order, so the
/// result does not depend on the execution mode.
const CHUNK: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    pub n_paths: usize,
    /// Paths stop at `T = −ln(horizon_eps)/q`, where `e^{−qT} = horizon_eps`.
    pub horizon_eps: f64,
    /// Euler step for the Brownian part; unused when σ = 0.
    pub dt: f64,
    pub seed: u64,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            n_paths: 200_000,
            horizon_eps: 1e-4,
            dt: 1e-3,
            seed: 42,
        }
    }
}

impl McConfig {
    pub fn new(n_paths: usize, seed: u64) -> Self {
        McConfig {
            n_paths,
            seed,
            ..McConfig::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_paths == 0 {
            return Err(Error::InvalidQuery("n_paths must be at least 1".into()));
        }
        if !(self.horizon_eps > 0.0 && self.horizon_eps < 1.0) {
            return Err(Error::InvalidQuery(format!(
                "horizon_eps must lie in (0, 1), got {}",
                self.horizon_eps
            )));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidQuery(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        Ok(())
    }

    /// Simulation horizon for discount rate `q`.
    pub fn horizon(&self, q: f64) -> f64 {
        -self.horizon_eps.ln() / q
    }
}

/// One simulated trajectory.
///
/// `injections[i]` is paid at `record_times[i]`. The first entry is the
/// deficit at ruin, `Y_{τ_x} − x`, which is 0 when ruin happens by a diffusion
/// crossing; all later injections are positive.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PathOutcome {
    pub record_times: Vec<f64>,
    pub injections: Vec<f64>,
    pub ruined: bool,
}

impl PathOutcome {
    pub fn ruin_time(&self) -> Option<f64> {
        self.record_times.first().copied()
    }

    /// Deficit at ruin.
    pub fn overshoot(&self) -> Option<f64> {
        self.injections.first().copied()
    }

    fn record(&mut self, t: f64, injection: f64) {
        self.ruined = true;
        self.record_times.push(t);
        self.injections.push(injection);
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    /// Sample standard deviation over `sqrt(n_paths)`; `None` for one path.
    pub stderr: Option<f64>,
    pub n_paths: usize,
}

impl McEstimate {
    /// `(mean − reference) / stderr`.
    pub fn z_score(&self, reference: f64) -> Option<f64> {
        self.stderr.map(|se| (self.mean - reference) / se)
    }
}

/// Path functionals that can be estimated jointly on the same paths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Functional {
    /// `Σ e^{−qτ⁽ⁿ⁾} r(C)` for the contract's payout function `r`.
    Premium(Contract),
    /// `e^{−qτ_x} 1{τ_x ≤ T}`.
    Kappa,
    /// `e^{−qτ_x} (Y_{τ_x} − x) 1{Y_{τ_x} − x ≥ m}`.
    Varphi { m: f64 },
    /// `1{τ_x ≤ T}`.
    Ruined,
}

impl Functional {
    pub fn evaluate(&self, path: &PathOutcome, q: f64) -> f64 {
        match *self {
            Functional::Premium(Contract::ExtremeLoss { m }) => path
                .record_times
                .iter()
                .zip(&path.injections)
                .filter(|(_, &c)| c >= m)
                .map(|(&t, &c)| (-q * t).exp() * c)
                .sum(),
            Functional::Premium(Contract::Proportional { a }) => {
                a * Functional::Premium(Contract::ExtremeLoss { m: 0.0 }).evaluate(path, q)
            }
            Functional::Kappa => path.ruin_time().map_or(0.0, |t| (-q * t).exp()),
            Functional::Varphi { m } => match (path.ruin_time(), path.overshoot()) {
                (Some(t), Some(c)) if c >= m => (-q * t).exp() * c,
                _ => 0.0,
            },
            Functional::Ruined => {
                if path.ruined {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct ClaimsModel {
    lambda: f64,
    mu: f64,
    sigma: f64,
    c: f64,
}

impl ClaimsModel {
    fn from_model(model: &ModelSpec) -> Result<Self> {
        match *model {
            ModelSpec::ClassicalExp { lambda, mu, c } => Ok(ClaimsModel {
                lambda,
                mu,
                sigma: 0.0,
                c,
            }),
            ModelSpec::PerturbedExp {
                lambda,
                mu,
                sigma,
                c,
            } => Ok(ClaimsModel {
                lambda,
                mu,
                sigma,
                c,
            }),
            ModelSpec::StableSN { .. } => Err(ModelError::NotApplicable {
                op: "path simulation",
                kind: model.kind(),
            }
            .into()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum StopRule {
    Horizon,
    /// Also stop at ruin, or once `Y` falls `depth` below `x`.
    FirstPassage {
        depth: f64,
    },
}

fn path_rng(seed: u64, path_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path_index);
    rng
}

fn run_path(
    p: &ClaimsModel,
    x: f64,
    horizon: f64,
    dt: f64,
    rng: &mut ChaCha8Rng,
    stop: StopRule,
) -> PathOutcome {
    let clock = Exp::new(p.lambda).expect("positive intensity");
    let claims = Exp::new(p.mu).expect("positive claim rate");
    let mut out = PathOutcome::default();
    let mut t = 0.0;
    let mut y = 0.0;
    // Y at the last record, and the running supremum since ruin.
    let mut level = x;
    let mut sup = x;
    let mut next_jump: f64 = clock.sample(rng);
    loop {
        let end = next_jump.min(horizon);
        if p.sigma == 0.0 {
            y -= p.c * (end - t);
            t = end;
        } else {
            while t < end {
                let h = if end - t <= dt { end - t } else { dt };
                let z: f64 = StandardNormal.sample(rng);
                y += -p.c * h + p.sigma * h.sqrt() * z;
                t = if h == end - t { end } else { t + h };
                if !out.ruined {
                    if y > x {
                        // Creeping ruin: the grid overshoot is discretisation error.
                        y = x;
                        out.record(t, 0.0);
                        if matches!(stop, StopRule::FirstPassage { .. }) {
                            return out;
                        }
                    }
                } else if y > sup {
                    sup = y;
                }
            }
        }
        if let StopRule::FirstPassage { depth } = stop {
            if y < x - depth {
                return out;
            }
        }
        if next_jump > horizon {
            return out;
        }
        y += claims.sample(rng);
        if !out.ruined {
            if y > x {
                out.record(t, y - x);
                level = y;
                sup = y;
                if matches!(stop, StopRule::FirstPassage { .. }) {
                    return out;
                }
            }
        } else if y > sup {
            out.record(t, y - level);
            level = y;
            sup = y;
        }
        next_jump = t + clock.sample(rng);
    }
}

/// Simulates path number `path_index` up to the horizon for rate `q`.
///
/// The random stream depends only on `(cfg.seed, path_index)`.
pub fn simulate_path(
    model: &ModelSpec,
    q: f64,
    x: f64,
    cfg: &McConfig,
    path_index: u64,
) -> Result<PathOutcome> {
    cfg.validate()?;
    let p = ClaimsModel::from_model(model)?;
    check_inputs(q, x)?;
    let mut rng = path_rng(cfg.seed, path_index);
    Ok(run_path(
        &p,
        x,
        cfg.horizon(q),
        cfg.dt,
        &mut rng,
        StopRule::Horizon,
    ))
}

fn check_inputs(q: f64, x: f64) -> Result<()> {
    if !(q > 0.0) || !q.is_finite() {
        return Err(Error::InvalidQuery(format!(
            "discount rate q must be positive, got {q}"
        )));
    }
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::InvalidQuery(format!(
            "initial surplus x must be nonnegative, got {x}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, Default)]
struct Welford {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    fn push(&mut self, v: f64) {
        self.n += 1;
        let d = v - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (v - self.mean);
    }

    fn merge(&mut self, other: &Welford) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        self.mean += d * other.n as f64 / n as f64;
        self.m2 += other.m2 + d * d * (self.n as f64 * other.n as f64 / n as f64);
        self.n = n;
    }

    fn estimate(&self) -> McEstimate {
        let n = self.n as usize;
        let stderr = (n >= 2).then(|| (self.m2 / (n as f64 - 1.0)).sqrt() / (n as f64).sqrt());
        McEstimate {
            mean: self.mean,
            stderr,
            n_paths: n,
        }
    }
}

fn accumulate<F>(n_paths: usize, n_stats: usize, exec: Execution, path_values: F) -> Vec<McEstimate>
where
    F: Fn(u64, &mut [f64]) + Sync + Send,
{
    let n_chunks = n_paths.div_ceil(CHUNK);
    let chunks = exec.map_range(n_chunks, |k| {
        let mut stats = vec![Welford::default(); n_stats];
        let mut values = vec![0.0; n_stats];
        let start = k * CHUNK;
        for i in start..(start + CHUNK).min(n_paths) {
            path_values(i as u64, &mut values);
            for (s, &v) in stats.iter_mut().zip(&values) {
                s.push(v);
            }
        }
        stats
    });
    let mut total = vec![Welford::default(); n_stats];
    for chunk in &chunks {
        for (t, c) in total.iter_mut().zip(chunk) {
            t.merge(c);
        }
    }
    total.iter().map(Welford::estimate).collect()
}

/// Estimates several functionals on one common set of paths.
pub fn estimate_functionals(
    model: &ModelSpec,
    q: f64,
    x: f64,
    functionals: &[Functional],
    cfg: &McConfig,
    exec: Execution,
) -> Result<Vec<McEstimate>> {
    cfg.validate()?;
    check_inputs(q, x)?;
    let p = ClaimsModel::from_model(model)?;
    let horizon = cfg.horizon(q);
    Ok(accumulate(
        cfg.n_paths,
        functionals.len(),
        exec,
        |i, values| {
            let mut rng = path_rng(cfg.seed, i);
            let path = run_path(&p, x, horizon, cfg.dt, &mut rng, StopRule::Horizon);
            for (v, f) in values.iter_mut().zip(functionals) {
                *v = f.evaluate(&path, q);
            }
        },
    ))
}

fn single(
    model: &ModelSpec,
    q: f64,
    x: f64,
    functional: Functional,
    cfg: &McConfig,
    exec: Execution,
) -> Result<McEstimate> {
    Ok(estimate_functionals(model, q, x, &[functional], cfg, exec)?[0])
}

/// Monte Carlo estimate of the premium `E[Σ e^{−qτ⁽ⁿ⁾} r(C)]`.
pub fn estimate_premium_mc(
    model: &ModelSpec,
    query: &PremiumQuery,
    cfg: &McConfig,
    exec: Execution,
) -> Result<McEstimate> {
    single(
        model,
        query.q,
        query.x,
        Functional::Premium(query.contract),
        cfg,
        exec,
    )
}

/// Monte Carlo estimate of `E[e^{−qτ_x}; τ_x < ∞]`.
pub fn estimate_kappa_mc(
    model: &ModelSpec,
    q: f64,
    x: f64,
    cfg: &McConfig,
    exec: Execution,
) -> Result<McEstimate> {
    single(model, q, x, Functional::Kappa, cfg, exec)
}

/// Monte Carlo estimate of `E[e^{−qτ_x} (Y_{τ_x} − x) 1{Y_{τ_x} − x ≥ m}; τ_x < ∞]`.
pub fn estimate_varphi_mc(
    model: &ModelSpec,
    q: f64,
    x: f64,
    m: f64,
    cfg: &McConfig,
    exec: Execution,
) -> Result<McEstimate> {
    single(model, q, x, Functional::Varphi { m }, cfg, exec)
}

/// Estimates the infinite-horizon ruin probability from surplus `x`.
///
/// A path is abandoned without ruin once `Y` drops far enough below `x` that
/// the Lundberg bound `e^{−R d}`, with adjustment coefficient `R = −Θ(0)`,
/// is below 1e−12, or when `max_time` is reached.
pub fn estimate_ruin_probability(
    model: &ModelSpec,
    x: f64,
    max_time: f64,
    cfg: &McConfig,
    exec: Execution,
) -> Result<McEstimate> {
    cfg.validate()?;
    let p = ClaimsModel::from_model(model)?;
    let r = -model.theta_root(0.0)?;
    let depth = -(1e-12_f64).ln() / r;
    Ok(accumulate(cfg.n_paths, 1, exec, |i, values| {
        let mut rng = path_rng(cfg.seed, i);
        let path = run_path(
            &p,
            x,
            max_time,
            cfg.dt,
            &mut rng,
            StopRule::FirstPassage { depth },
        );
        values[0] = if path.ruined { 1.0 } else { 0.0 };
    })[0])
}

/// Classical ruin probability `(1/(1+θ)) e^{−(μ − λ/c) x}` for exponential
/// claims without diffusion.
pub fn classical_ruin_probability(lambda: f64, mu: f64, c: f64, x: f64) -> f64 {
    lambda / (c * mu) * (-(mu - lambda / c) * x).exp()
}
