//! Experiment harness: seeded instance generation for the three spectral
//! dispositions, configuration-driven sweeps over perturbation strengths,
//! and reproduction of the closed-form reference examples.
//!
//! Reproducibility: the generator is ChaCha8 keyed by the configured seed,
//! with one independent substream per trial (`set_stream(trial + 1)`), so
//! identical configurations produce bit-identical instances and CSV output
//! on every platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decomp::DecompError;
use crate::krein::{self, KreinError, KreinReport, RealityVerdict};
use crate::linalg::{
    general_eig, multiset_match_distance, spectral_norm, CMatrix, Complex64, LinalgError,
};
use crate::riccati::{self, BlockOperator, RiccatiError};
use crate::sylvester::{Disposition, SylvesterError};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
    #[error("mismatch with closed form: {0}")]
    MismatchWithClosedForm(String),
    #[error(transparent)]
    Krein(#[from] KreinError),
    #[error(transparent)]
    Riccati(#[from] RiccatiError),
    #[error(transparent)]
    Sylvester(#[from] SylvesterError),
    #[error(transparent)]
    Decomp(#[from] DecompError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Optional tolerance overrides for the solvers driven by the harness.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct Tolerances {
    /// Riccati fixed-point tolerance (default 1e-12).
    pub solver_tol: Option<f64>,
    /// Riccati iteration cap (default 10000).
    pub max_iter: Option<usize>,
}

impl Tolerances {
    pub fn solver_tol(&self) -> f64 {
        self.solver_tol.unwrap_or(riccati::DEFAULT_TOL)
    }

    pub fn max_iter(&self) -> usize {
        self.max_iter.unwrap_or(riccati::DEFAULT_MAX_ITER)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Report,
    Csv,
}

/// One sweep configuration: which disposition pattern to generate, at what
/// sizes and spectral distance, over which perturbation norms, how often.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub disposition: Disposition,
    pub sizes: (usize, usize),
    pub d: f64,
    /// Target values of ‖V‖ (absolute).
    pub v_norm_grid: Vec<f64>,
    pub trials: usize,
    /// `C = -B†` (J-self-adjoint) when true; independent C otherwise.
    #[serde(default = "default_true")]
    pub j_selfadjoint: bool,
    #[serde(default)]
    pub tolerances: Tolerances,
}

fn default_true() -> bool {
    true
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.trials == 0 {
            return Err(HarnessError::ConfigInvalid("trials must be at least 1".into()));
        }
        if self.d.is_nan() || self.d <= 0.0 {
            return Err(HarnessError::ConfigInvalid("d must be positive".into()));
        }
        let (n0, n1) = self.sizes;
        if n0 == 0 || n1 == 0 {
            return Err(HarnessError::ConfigInvalid("sizes must be positive".into()));
        }
        if self.disposition == Disposition::Generic && (n0 < 2 || n1 < 2) {
            return Err(HarnessError::ConfigInvalid(
                "the generic disposition needs both blocks of size ≥ 2 (a single point always \
                 sits in a gap of the other set)"
                    .into(),
            ));
        }
        if self.v_norm_grid.iter().any(|v| *v < 0.0 || !v.is_finite()) {
            return Err(HarnessError::ConfigInvalid("grid values must be nonnegative".into()));
        }
        Ok(())
    }
}

/// One sweep cell. Columns are fixed; cells that are undefined outside the
/// guaranteed regime carry NaN rather than being dropped.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRow {
    pub seed: u64,
    pub trial: usize,
    pub disposition: Disposition,
    pub n0: usize,
    pub n1: usize,
    pub d: f64,
    pub delta: f64,
    pub v_norm: f64,
    pub v_over_delta: f64,
    pub hypothesis_ok: bool,
    pub max_imag: f64,
    pub spectrum_real: bool,
    pub theta_max: f64,
    pub theta_bound: f64,
    pub enclosure_margin: f64,
    pub enclosure_r: f64,
    pub gamma: f64,
    pub pass: bool,
    pub note: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    /// False when any cell inside the guaranteed regime failed an
    /// assertion.
    pub all_guaranteed_pass: bool,
}

fn rng_for(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64 + 1);
    rng
}

fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller on the open unit square.
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(standard_normal(rng), standard_normal(rng))
    })
}

/// Spectra matching the requested disposition with the minimal cross
/// distance pinned exactly at `d`.
fn generate_spectra(
    config: &ExperimentConfig,
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<f64>, Vec<f64>), HarnessError> {
    let (n0, n1) = config.sizes;
    let d = config.d;
    match config.disposition {
        Disposition::Subordinated => {
            // σ0 below, capped at -d/2; σ1 above, pinned at d/2.
            let mut s0 = vec![-d / 2.0];
            for _ in 1..n0 {
                s0.push(-d / 2.0 - 2.0 * d * rng.gen::<f64>());
            }
            s0.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let mut s1 = vec![d / 2.0];
            for _ in 1..n1 {
                s1.push(d / 2.0 + 2.0 * d * rng.gen::<f64>());
            }
            s1.sort_by(|a, b| a.partial_cmp(b).unwrap());
            Ok((s0, s1))
        }
        Disposition::AnnularGap => {
            // σ0 inside [-a, a], σ1 split below -(a+d) and above a+d with
            // the inner edges pinned.
            let a = if n0 == 1 { 0.0 } else { 0.75 * d };
            let mut s0 = vec![a];
            for _ in 1..n0 {
                s0.push(a - 2.0 * a * rng.gen::<f64>());
            }
            s0.sort_by(|x, y| x.partial_cmp(y).unwrap());
            let n_left = n1 / 2;
            let n_right = n1 - n_left;
            let mut s1 = Vec::with_capacity(n1);
            if n_left > 0 {
                s1.push(-(a + d));
                for _ in 1..n_left {
                    s1.push(-(a + d) - 2.0 * d * rng.gen::<f64>());
                }
            }
            let mut right = vec![a + d];
            for _ in 1..n_right {
                right.push(a + d + 2.0 * d * rng.gen::<f64>());
            }
            s1.extend(right);
            s1.sort_by(|x, y| x.partial_cmp(y).unwrap());
            Ok((s0, s1))
        }
        Disposition::Generic => {
            // Alternating ladder starting with σ0; the first cross gap is
            // exactly d, later gaps are d(1 + u). Both sets straddle each
            // other, so neither subordination nor a gap disposition holds.
            let mut s0 = Vec::with_capacity(n0);
            let mut s1 = Vec::with_capacity(n1);
            let mut pos = 0.0f64;
            let mut take0 = true;
            let mut first_gap = true;
            while s0.len() < n0 || s1.len() < n1 {
                if take0 && s0.len() < n0 {
                    s0.push(pos);
                } else {
                    s1.push(pos);
                }
                take0 = if s0.len() < n0 && s1.len() < n1 { !take0 } else { s0.len() < n0 };
                let gap = if first_gap { d } else { d * (1.0 + rng.gen::<f64>()) };
                first_gap = false;
                pos += gap;
            }
            // Center the ladder for cosmetic symmetry.
            let shift = pos / 2.0;
            for v in s0.iter_mut().chain(s1.iter_mut()) {
                *v -= shift;
            }
            Ok((s0, s1))
        }
    }
}

/// Generate the trial's block operator at the first grid norm (or 0 for an
/// empty grid). `generate_instance_scaled` picks the norm explicitly.
pub fn generate_instance(
    config: &ExperimentConfig,
    trial: usize,
) -> Result<BlockOperator, HarnessError> {
    let v = config.v_norm_grid.first().copied().unwrap_or(0.0);
    generate_instance_scaled(config, trial, v)
}

/// Deterministic instance for (seed, trial): Hermitian diagonal entries
/// with the configured disposition at distance exactly `d`, and a complex
/// Gaussian `B` rescaled so that `‖V‖` hits the target.
pub fn generate_instance_scaled(
    config: &ExperimentConfig,
    trial: usize,
    v_norm: f64,
) -> Result<BlockOperator, HarnessError> {
    config.validate()?;
    if v_norm < 0.0 || !v_norm.is_finite() {
        return Err(HarnessError::ConfigInvalid("v_norm must be nonnegative".into()));
    }
    let mut rng = rng_for(config.seed, trial);
    let (s0, s1) = generate_spectra(config, &mut rng)?;
    let a0 = CMatrix::from_real_diag(&s0);
    let a1 = CMatrix::from_real_diag(&s1);
    let (n0, n1) = config.sizes;

    let raw = gaussian_matrix(&mut rng, n0, n1);
    let raw_norm = spectral_norm(&raw);
    let b = if v_norm == 0.0 || raw_norm == 0.0 {
        CMatrix::zeros(n0, n1)
    } else {
        raw.scale_re(v_norm / raw_norm)
    };
    let c = if config.j_selfadjoint {
        b.adjoint().scale_re(-1.0)
    } else {
        let raw_c = gaussian_matrix(&mut rng, n1, n0);
        let nc = spectral_norm(&raw_c);
        if v_norm == 0.0 || nc == 0.0 {
            CMatrix::zeros(n1, n0)
        } else {
            raw_c.scale_re(v_norm / nc)
        }
    };
    Ok(BlockOperator::new(a0, a1, b, c)?)
}

/// Run the full grid: one pipeline run per (trial, grid point), rows in
/// deterministic order. Assertion failures inside the guaranteed regime
/// mark the row failed and flip `all_guaranteed_pass`; cells outside the
/// regime are informational.
pub fn run_sweep(config: &ExperimentConfig) -> Result<SweepTable, HarnessError> {
    config.validate()?;
    if config.v_norm_grid.is_empty() {
        return Err(HarnessError::ConfigInvalid("v_norm_grid must be nonempty".into()));
    }
    let mut rows = Vec::with_capacity(config.trials * config.v_norm_grid.len());
    let mut all_pass = true;
    for trial in 0..config.trials {
        for &v in &config.v_norm_grid {
            let row = run_cell(config, trial, v)?;
            if row.hypothesis_ok && !row.pass {
                all_pass = false;
            }
            rows.push(row);
        }
    }
    Ok(SweepTable { rows, all_guaranteed_pass: all_pass })
}

fn run_cell(config: &ExperimentConfig, trial: usize, v: f64) -> Result<SweepRow, HarnessError> {
    let op = generate_instance_scaled(config, trial, v)?;
    let (n0, n1) = config.sizes;
    let base = |delta: f64| SweepRow {
        seed: config.seed,
        trial,
        disposition: config.disposition,
        n0,
        n1,
        d: config.d,
        delta,
        v_norm: op.v_norm(),
        v_over_delta: if delta > 0.0 { op.v_norm() / delta } else { f64::NAN },
        hypothesis_ok: false,
        max_imag: f64::NAN,
        spectrum_real: false,
        theta_max: f64::NAN,
        theta_bound: f64::NAN,
        enclosure_margin: f64::NAN,
        enclosure_r: f64::NAN,
        gamma: f64::NAN,
        pass: true,
        note: String::new(),
    };

    if !config.j_selfadjoint {
        // No reality guarantee without the J-structure; report diagnostics.
        let verdict = krein::reality_and_diagonalizability(&op.assemble())?;
        let mut row = base(f64::NAN);
        row.max_imag = verdict.max_imag;
        row.spectrum_real = verdict.spectrum_real;
        row.note = "diagnostic (no J-structure)".into();
        return Ok(row);
    }

    match krein::verify_tpi(&op) {
        Ok(report) => {
            let mut row = base(report.delta);
            row.hypothesis_ok = report.hypothesis_ok;
            row.max_imag = report.max_imag;
            row.spectrum_real = report.spectrum_real;
            row.theta_max = report
                .theta0_max
                .unwrap_or(f64::NAN)
                .max(report.theta1_max.unwrap_or(f64::NAN));
            row.theta_bound = report.theta_bound.unwrap_or(f64::NAN);
            row.enclosure_margin = report.enclosure_margin.unwrap_or(f64::NAN);
            row.enclosure_r = report.enclosure_r.unwrap_or(f64::NAN);
            row.gamma = report.gamma.unwrap_or(f64::NAN);
            if !report.hypothesis_ok {
                row.note = "informational (outside guaranteed regime)".into();
            }
            Ok(row)
        }
        Err(KreinError::AssertionFailure { check, observed, allowed }) => {
            let mut row = base(f64::NAN);
            row.hypothesis_ok = true;
            row.pass = false;
            row.note = format!("{check}: observed {observed:.6e}, allowed {allowed:.6e}");
            Ok(row)
        }
        Err(e) => Err(e.into()),
    }
}

/// CSV rendering with the full fixed column set; floats use 17 significant
/// digits with '.' decimal separator.
pub fn sweep_to_csv(table: &SweepTable) -> String {
    let mut out = String::from(
        "seed,trial,disposition,n0,n1,d,delta,v_norm,v_over_delta,hypothesis_ok,max_imag,\
         spectrum_real,theta_max,theta_bound,enclosure_margin,enclosure_r,gamma,pass,note\n",
    );
    for r in &table.rows {
        let disposition = match r.disposition {
            Disposition::Generic => "generic",
            Disposition::Subordinated => "subordinated",
            Disposition::AnnularGap => "annular_gap",
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.seed,
            r.trial,
            disposition,
            r.n0,
            r.n1,
            fmt17(r.d),
            fmt17(r.delta),
            fmt17(r.v_norm),
            fmt17(r.v_over_delta),
            r.hypothesis_ok,
            fmt17(r.max_imag),
            r.spectrum_real,
            fmt17(r.theta_max),
            fmt17(r.theta_bound),
            fmt17(r.enclosure_margin),
            fmt17(r.enclosure_r),
            fmt17(r.gamma),
            r.pass,
            r.note
        ));
    }
    out
}

fn fmt17(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else {
        format!("{x:.16e}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReproduceId {
    Ex1,
    Ex2,
    Exns,
}

/// Parameters of the reference examples; `c` defaults to `b`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ReproduceParams {
    pub d: f64,
    pub b: f64,
    pub c: Option<f64>,
}

impl ReproduceParams {
    pub fn defaults_for(id: ReproduceId) -> Self {
        match id {
            ReproduceId::Ex1 => Self { d: 1.0, b: 0.4, c: Some(0.4) },
            ReproduceId::Ex2 => Self { d: 2.0, b: 0.9, c: Some(0.9) },
            ReproduceId::Exns => Self { d: 2.0, b: 2.0, c: None },
        }
    }

    fn c(&self) -> f64 {
        self.c.unwrap_or(self.b)
    }
}

/// Outcome of a reference-example reproduction: the computed quantities
/// next to their closed forms, plus the pipeline report where applicable.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReproduceReport {
    pub id: ReproduceId,
    pub d: f64,
    pub b: f64,
    pub c: f64,
    pub k_norm: Option<f64>,
    pub k_norm_closed_form: Option<f64>,
    pub eigenvalues: Vec<Complex64>,
    pub eigenvalues_closed_form: Vec<Complex64>,
    pub eigenvalue_deviation: f64,
    pub reality: Option<RealityVerdict>,
    pub krein: Option<KreinReport>,
}

/// Rebuild a reference example from its parameters, run the pipeline, and
/// check the computed solution, eigenvalues and angles against the closed
/// forms. Deviations beyond 1e-10 (1e-9 for eigenvalues of the
/// non-diagonalizable case) are mismatches.
pub fn reproduce(
    id: ReproduceId,
    params: ReproduceParams,
    tol: &Tolerances,
) -> Result<ReproduceReport, HarnessError> {
    match id {
        ReproduceId::Ex1 => reproduce_ex1(params, tol),
        ReproduceId::Ex2 => reproduce_ex2(params, tol),
        ReproduceId::Exns => reproduce_exns(params),
    }
}

fn reproduce_ex1(params: ReproduceParams, tol: &Tolerances) -> Result<ReproduceReport, HarnessError> {
    let (d, b, c) = (params.d, params.b, params.c());
    let op = BlockOperator::new(
        CMatrix::from_real_diag(&[-d / 2.0]),
        CMatrix::from_real_diag(&[d / 2.0]),
        CMatrix::from_real_rows(&[&[b]]),
        CMatrix::from_real_rows(&[&[-c]]),
    )?;
    let delta = d; // subordinated disposition
    let sol = riccati::solve_fixed_point(&op, delta, tol.solver_tol(), tol.max_iter())?;
    let roots = riccati::scalar_closed_form(d, b, c)?;
    if (sol.norm - roots.k1).abs() > 1e-10 {
        return Err(HarnessError::MismatchWithClosedForm(format!(
            "‖K‖ = {:.15} vs closed form {:.15}",
            sol.norm, roots.k1
        )));
    }

    let lam = (d * d / 4.0 - b * c).sqrt();
    let closed = vec![Complex64::new(-lam, 0.0), Complex64::new(lam, 0.0)];
    let eig = general_eig(&op.assemble())?;
    let deviation = multiset_match_distance(&eig.eigenvalues, &closed);
    if deviation > 1e-10 {
        return Err(HarnessError::MismatchWithClosedForm(format!(
            "spec(L) deviates from ±√(d²/4-bc) by {deviation:.3e}"
        )));
    }

    let krein_report =
        if (b - c).abs() <= 1e-14 * b.abs().max(1.0) { Some(krein::verify_tpi(&op)?) } else { None };
    Ok(ReproduceReport {
        id: ReproduceId::Ex1,
        d,
        b,
        c,
        k_norm: Some(sol.norm),
        k_norm_closed_form: Some(roots.k1),
        eigenvalues: eig.eigenvalues,
        eigenvalues_closed_form: closed,
        eigenvalue_deviation: deviation,
        reality: None,
        krein: krein_report,
    })
}

fn reproduce_ex2(params: ReproduceParams, tol: &Tolerances) -> Result<ReproduceReport, HarnessError> {
    let (d, b, c) = (params.d, params.b, params.c());
    let op = BlockOperator::new(
        CMatrix::from_real_diag(&[0.0]),
        CMatrix::from_real_diag(&[-d, d]),
        CMatrix::from_real_rows(&[&[0.0, b]]),
        CMatrix::from_real_rows(&[&[0.0], &[-c]]),
    )?;
    let delta = d; // σ0 = {0} sits in the finite gap of σ1 = {-d, d}
    let sol = riccati::solve_fixed_point(&op, delta, tol.solver_tol(), tol.max_iter())?;
    let roots = riccati::scalar_closed_form(d, b, c)?;

    // K = (0, k₊)ᵀ with k₊ the small root; component check plus norm.
    if sol.k[(0, 0)].norm() > 1e-10 {
        return Err(HarnessError::MismatchWithClosedForm(format!(
            "K component k₋ = {:.3e} should vanish",
            sol.k[(0, 0)].norm()
        )));
    }
    if (sol.k[(1, 0)].norm() - roots.k1).abs() > 1e-10 {
        return Err(HarnessError::MismatchWithClosedForm(format!(
            "|k₊| = {:.15} vs closed form {:.15}",
            sol.k[(1, 0)].norm(),
            roots.k1
        )));
    }
    // ‖K⁽¹⁾‖ equals the a priori bound with equality (sharpness).
    let bound = riccati::norm_bound(b, c, delta)?.value;
    if (sol.norm - bound).abs() > 1e-10 {
        return Err(HarnessError::MismatchWithClosedForm(format!(
            "‖K‖ = {:.15} vs norm bound {:.15}",
            sol.norm, bound
        )));
    }

    let eig = general_eig(&op.assemble())?;
    let krein_report =
        if (b - c).abs() <= 1e-14 * b.abs().max(1.0) { Some(krein::verify_tpi(&op)?) } else { None };
    Ok(ReproduceReport {
        id: ReproduceId::Ex2,
        d,
        b,
        c,
        k_norm: Some(sol.norm),
        k_norm_closed_form: Some(roots.k1),
        eigenvalues: eig.eigenvalues,
        eigenvalues_closed_form: vec![],
        eigenvalue_deviation: 0.0,
        reality: None,
        krein: krein_report,
    })
}

fn reproduce_exns(params: ReproduceParams) -> Result<ReproduceReport, HarnessError> {
    let (d, b) = (params.d, params.b);
    let l = CMatrix::from_real_rows(&[&[-d / 2.0, b], &[-b, d / 2.0]]);
    let verdict = krein::reality_and_diagonalizability(&l)?;
    let eig = general_eig(&l)?;

    let disc = b * b - d * d / 4.0;
    let closed: Vec<Complex64> = if disc > 0.0 {
        let im = disc.sqrt();
        vec![Complex64::new(0.0, -im), Complex64::new(0.0, im)]
    } else {
        let re = (-disc).sqrt();
        vec![Complex64::new(-re, 0.0), Complex64::new(re, 0.0)]
    };
    let deviation = multiset_match_distance(&eig.eigenvalues, &closed);
    if deviation > 1e-9 {
        return Err(HarnessError::MismatchWithClosedForm(format!(
            "spec(L) deviates from the closed form by {deviation:.3e}"
        )));
    }

    // Regime checks: complex pair above d/2, Jordan chain at d/2,
    // diagonalizable below.
    let boundary = (b - d / 2.0).abs() <= 1e-12 * d;
    if disc > 0.0 && verdict.spectrum_real {
        return Err(HarnessError::MismatchWithClosedForm(
            "expected complex spectrum above the threshold".into(),
        ));
    }
    if disc <= 0.0 && !verdict.spectrum_real {
        return Err(HarnessError::MismatchWithClosedForm(
            "expected real spectrum at or below the threshold".into(),
        ));
    }
    if boundary && verdict.diagonalizable {
        return Err(HarnessError::MismatchWithClosedForm(
            "expected a nontrivial Jordan chain at b = d/2".into(),
        ));
    }
    if !boundary && disc < 0.0 && !verdict.diagonalizable {
        return Err(HarnessError::MismatchWithClosedForm(
            "expected a diagonalizable matrix below the threshold".into(),
        ));
    }

    Ok(ReproduceReport {
        id: ReproduceId::Exns,
        d,
        b,
        c: b,
        k_norm: None,
        k_norm_closed_form: None,
        eigenvalues: eig.eigenvalues,
        eigenvalues_closed_form: closed,
        eigenvalue_deviation: deviation,
        reality: Some(verdict),
        krein: None,
    })
}
