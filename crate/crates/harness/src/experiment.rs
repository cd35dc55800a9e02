//! Benchmark protocols: the undersampling sweep and the radio imaging demo.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use sara_core::dictionary::{
    db1_to_db8, dirac_and_db1_to_db8, frames_to_string, parse_frames, Frame,
};
use sara_core::measurement::{apply_noise, dirty_image, scaled_measurement_count};
use sara_core::sara::{sara_reconstruct, sigma_alpha, DEFAULT_N_MAX};
use sara_core::seed::derive_seed;
use sara_core::solver::noise_bound_epsilon;
use sara_core::wavelets::{Daubechies, DEFAULT_LEVELS};
use sara_core::{
    Complex64, FourierMask, FourierMaskConfig, Image, MeasurementOperator, NoiseModel, SaraConfig,
    SaraDictionary, SaraTrace, SolverConfig, SpreadSpectrum, SpreadSpectrumConfig,
};

use crate::assets::{downsample, load_image};
use crate::config::KeyValues;
use crate::mask_io::write_mask;
use crate::pgm::{log_scale, write_pgm, Depth};
use crate::{snr_db, HarnessError};

/// Measurement count of the full-size radio experiment, on a 256x256 grid.
pub const RADIO_REFERENCE_M: usize = 9413;
pub const RADIO_REFERENCE_SIDE: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    /// Zero-filled inverse FFT of the measurements; Fourier masks only.
    Dirty,
    Bp,
    BpDb8,
    RwBpDb8,
    Bpsa,
    Sara,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::Dirty,
        Algorithm::Bp,
        Algorithm::BpDb8,
        Algorithm::RwBpDb8,
        Algorithm::Bpsa,
        Algorithm::Sara,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Dirty => "dirty",
            Algorithm::Bp => "BP",
            Algorithm::BpDb8 => "BPDb8",
            Algorithm::RwBpDb8 => "RW-BPDb8",
            Algorithm::Bpsa => "BPSA",
            Algorithm::Sara => "SARA",
        }
    }

    fn reweighted(self) -> bool {
        matches!(self, Algorithm::RwBpDb8 | Algorithm::Sara)
    }

    fn frames(self, sara_dict: &[Frame]) -> Vec<Frame> {
        match self {
            Algorithm::Dirty => Vec::new(),
            Algorithm::Bp => vec![Frame::Dirac],
            Algorithm::BpDb8 | Algorithm::RwBpDb8 => vec![Frame::Daubechies(Daubechies::Db8)],
            Algorithm::Bpsa | Algorithm::Sara => sara_dict.to_vec(),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown algorithm `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OperatorSpec {
    SpreadSpectrum,
    FourierMask {
        n_ellipses: usize,
        /// Defaults to twice the image side.
        points_per_arc: Option<usize>,
    },
}

impl OperatorSpec {
    pub fn fourier_mask() -> Self {
        OperatorSpec::FourierMask {
            n_ellipses: 24,
            points_per_arc: None,
        }
    }

    /// Mask generator settings, `None` for spread spectrum.
    pub fn mask_config(&self, seed: u64, side: usize, m: usize) -> Option<FourierMaskConfig> {
        match *self {
            OperatorSpec::SpreadSpectrum => None,
            OperatorSpec::FourierMask {
                n_ellipses,
                points_per_arc,
            } => {
                let mut cfg = FourierMaskConfig::new(seed, side, m);
                cfg.n_ellipses = n_ellipses;
                if let Some(p) = points_per_arc {
                    cfg.points_per_arc = p;
                }
                Some(cfg)
            }
        }
    }

    pub fn build(
        &self,
        seed: u64,
        rows: usize,
        cols: usize,
        m: usize,
    ) -> Result<Box<dyn MeasurementOperator>, HarnessError> {
        match self.mask_config(seed, rows, m) {
            None => Ok(Box::new(SpreadSpectrum::new(
                SpreadSpectrumConfig { seed, m },
                rows,
                cols,
            )?)),
            Some(_) if rows != cols => Err(HarnessError::Config(
                "the Fourier mask needs a square image".into(),
            )),
            Some(cfg) => Ok(Box::new(FourierMask::new(cfg)?)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    /// PGM path or `builtin:<name>`.
    pub image: String,
    /// Block-average the image down to this side first.
    pub image_side: Option<usize>,
    pub operator: OperatorSpec,
    /// Undersampling ratios `M/N` of the sweep.
    pub ratios: Vec<f64>,
    /// Radio demo measurement count; defaults to the reference count scaled by area.
    pub measurements: Option<usize>,
    /// Input SNR in dB; infinity disables noise.
    pub input_snr_db: f64,
    pub algorithms: Vec<Algorithm>,
    pub trials: usize,
    pub seed: u64,
    pub output_dir: Option<PathBuf>,
    /// Dictionary used by BPSA and SARA.
    pub dict: Vec<Frame>,
    pub levels: usize,
    pub n_max: usize,
    pub max_iters: usize,
    pub rel_tol: f64,
    /// Primal over dual step size of the solver.
    pub step_ratio: f64,
    /// Dynamic range of the log renderings.
    pub decades: f64,
    pub write_images: bool,
}

impl ExperimentSpec {
    /// Desk-scale spread spectrum sweep.
    pub fn sweep_default() -> Self {
        Self {
            image: "builtin:natural64".into(),
            image_side: None,
            operator: OperatorSpec::SpreadSpectrum,
            ratios: vec![0.2, 0.4, 0.6],
            measurements: None,
            input_snr_db: 30.0,
            algorithms: vec![
                Algorithm::BpDb8,
                Algorithm::RwBpDb8,
                Algorithm::Bpsa,
                Algorithm::Sara,
            ],
            trials: 5,
            seed: 1,
            output_dir: None,
            dict: db1_to_db8(),
            levels: DEFAULT_LEVELS,
            n_max: DEFAULT_N_MAX,
            max_iters: SolverConfig::default().max_iters,
            rel_tol: SolverConfig::default().rel_tol,
            step_ratio: SolverConfig::default().step_ratio,
            decades: 3.0,
            write_images: true,
        }
    }

    /// Desk-scale radio demo.
    pub fn radio_default() -> Self {
        Self {
            image: "builtin:galaxy64".into(),
            operator: OperatorSpec::fourier_mask(),
            ratios: Vec::new(),
            algorithms: vec![
                Algorithm::Dirty,
                Algorithm::Bp,
                Algorithm::BpDb8,
                Algorithm::Sara,
            ],
            trials: 3,
            dict: dirac_and_db1_to_db8(),
            ..Self::sweep_default()
        }
    }

    pub const KEYS: &'static [&'static str] = &[
        "image",
        "image_side",
        "operator",
        "ratios",
        "measurements",
        "isnr",
        "algos",
        "trials",
        "seed",
        "out",
        "dict",
        "levels",
        "nmax",
        "max_iters",
        "rel_tol",
        "step_ratio",
        "n_ellipses",
        "points_per_arc",
        "decades",
        "write_images",
    ];

    /// Applies `key = value` settings on top of `self`.
    pub fn apply(mut self, kv: &KeyValues) -> Result<Self, HarnessError> {
        if let Some(bad) = kv.keys().find(|k| !Self::KEYS.contains(k)) {
            return Err(HarnessError::Config(format!("unknown key `{bad}`")));
        }
        if let Some(v) = kv.get("image") {
            self.image = v.to_string();
        }
        if let Some(v) = kv.parse_value("image_side")? {
            self.image_side = Some(v);
        }
        match kv.get("operator") {
            None => {}
            Some("spread_spectrum") => self.operator = OperatorSpec::SpreadSpectrum,
            Some("fourier_mask") => {
                if !matches!(self.operator, OperatorSpec::FourierMask { .. }) {
                    self.operator = OperatorSpec::fourier_mask();
                }
            }
            Some(other) => {
                return Err(HarnessError::Config(format!(
                    "operator `{other}`: expected spread_spectrum or fourier_mask"
                )))
            }
        }
        if let OperatorSpec::FourierMask {
            n_ellipses,
            points_per_arc,
        } = &mut self.operator
        {
            if let Some(v) = kv.parse_value("n_ellipses")? {
                *n_ellipses = v;
            }
            if let Some(v) = kv.parse_value("points_per_arc")? {
                *points_per_arc = Some(v);
            }
        }
        if let Some(v) = kv.parse_list("ratios")? {
            self.ratios = v;
        }
        if let Some(v) = kv.parse_value("measurements")? {
            self.measurements = Some(v);
        }
        if let Some(v) = kv.parse_value("isnr")? {
            self.input_snr_db = v;
        }
        if let Some(v) = kv.parse_list("algos")? {
            self.algorithms = v;
        }
        if let Some(v) = kv.parse_value("trials")? {
            self.trials = v;
        }
        if let Some(v) = kv.parse_value("seed")? {
            self.seed = v;
        }
        if let Some(v) = kv.get("out") {
            self.output_dir = Some(PathBuf::from(v));
        }
        if let Some(v) = kv.get("dict") {
            self.dict = parse_frames(v)?;
        }
        if let Some(v) = kv.parse_value("levels")? {
            self.levels = v;
        }
        if let Some(v) = kv.parse_value("nmax")? {
            self.n_max = v;
        }
        if let Some(v) = kv.parse_value("max_iters")? {
            self.max_iters = v;
        }
        if let Some(v) = kv.parse_value("rel_tol")? {
            self.rel_tol = v;
        }
        if let Some(v) = kv.parse_value("step_ratio")? {
            self.step_ratio = v;
        }
        if let Some(v) = kv.parse_value("decades")? {
            self.decades = v;
        }
        if let Some(v) = kv.parse_value("write_images")? {
            self.write_images = v;
        }
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: String| Err(HarnessError::Config(msg));
        if let Some(r) = self.ratios.iter().find(|&&r| !(r > 0.0 && r <= 1.0)) {
            return bad(format!("ratio {r} outside (0, 1]"));
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.algorithms.is_empty() {
            return bad("no algorithms selected".into());
        }
        if self.input_snr_db.is_nan() {
            return bad("input SNR is NaN".into());
        }
        if self.n_max == 0 || self.max_iters == 0 {
            return bad("nmax and max_iters must be at least 1".into());
        }
        if !(self.decades > 0.0) {
            return bad("decades must be positive".into());
        }
        if self.dict.is_empty() {
            return bad("empty dictionary".into());
        }
        Ok(())
    }

    pub fn load_reference(&self) -> Result<Image, HarnessError> {
        let img = load_image(&self.image)?;
        let img = match self.image_side {
            Some(side) => downsample(&img, side)?,
            None => img,
        };
        let (r, c) = img.shape();
        if !r.is_power_of_two() || !c.is_power_of_two() {
            return Err(HarnessError::Config(format!(
                "image is {r}x{c}, sides must be dyadic"
            )));
        }
        Ok(img)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub algorithm: Algorithm,
    pub ratio: f64,
    pub trial: usize,
    /// `+inf` on exact recovery, NaN for a failed cell.
    pub snr_db: f64,
    pub wall_time_s: f64,
    pub solver_iters: usize,
    pub converged: bool,
}

/// One reconstruction with everything written alongside its row.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub row: ResultRow,
    pub ratio_index: usize,
    pub estimate: Option<Image>,
    pub error: Option<Image>,
    pub trace: Option<SaraTrace>,
}

struct Cell {
    ratio_index: usize,
    trial: usize,
    ratio: f64,
    m: usize,
}

/// Seed of a `(ratio, trial)` cell; the operator and the noise draw from
/// children `0` and `1` of it.
pub fn cell_seed(master: u64, ratio_index: usize, trial: usize) -> u64 {
    derive_seed(master, &[ratio_index as u64, trial as u64])
}

fn solver_config(spec: &ExperimentSpec) -> SolverConfig {
    SolverConfig {
        positivity: true,
        max_iters: spec.max_iters,
        rel_tol: spec.rel_tol,
        step_ratio: spec.step_ratio,
        ..SolverConfig::default()
    }
}

fn run_cell(
    spec: &ExperimentSpec,
    reference: &Image,
    cell: &Cell,
) -> Result<Vec<RunOutput>, HarnessError> {
    let (rows, cols) = reference.shape();
    let seed = cell_seed(spec.seed, cell.ratio_index, cell.trial);
    let phi = spec
        .operator
        .build(derive_seed(seed, &[0]), rows, cols, cell.m)?;
    let y0 = phi.forward(reference.as_slice())?;
    let noise = NoiseModel {
        input_snr_db: spec.input_snr_db,
        seed: derive_seed(seed, &[1]),
    };
    let (y, sigma_n) = apply_noise(&y0, &noise)?;
    let epsilon = noise_bound_epsilon(sigma_n, phi.m());

    let mut out = Vec::with_capacity(spec.algorithms.len());
    for &alg in &spec.algorithms {
        let start = Instant::now();
        let attempt = reconstruct(spec, alg, phi.as_ref(), &y, epsilon, sigma_n, (rows, cols));
        let wall_time_s = start.elapsed().as_secs_f64();
        let mut row = ResultRow {
            algorithm: alg,
            ratio: cell.ratio,
            trial: cell.trial,
            snr_db: f64::NAN,
            wall_time_s,
            solver_iters: 0,
            converged: false,
        };
        let mut run = RunOutput {
            row: row.clone(),
            ratio_index: cell.ratio_index,
            estimate: None,
            error: None,
            trace: None,
        };
        match attempt {
            Ok((estimate, trace)) => {
                row.snr_db = snr_db(reference, &estimate)?;
                match &trace {
                    Some(t) => {
                        row.solver_iters = t.total_inner_iters();
                        row.converged = t.all_converged();
                    }
                    None => row.converged = true,
                }
                run.error = Some(reference.abs_diff(&estimate)?);
                run.estimate = Some(estimate);
                run.trace = trace;
                run.row = row;
            }
            Err(e) => log::error!(
                "{alg} ratio={} trial={} failed: {e}",
                cell.ratio,
                cell.trial
            ),
        }
        log::info!(
            "{alg} ratio={} trial={} snr={:.2} dB iters={} time={:.1}s",
            cell.ratio,
            cell.trial,
            run.row.snr_db,
            run.row.solver_iters,
            run.row.wall_time_s
        );
        out.push(run);
    }
    Ok(out)
}

fn reconstruct(
    spec: &ExperimentSpec,
    alg: Algorithm,
    phi: &dyn MeasurementOperator,
    y: &[Complex64],
    epsilon: f64,
    sigma_n: f64,
    (rows, cols): (usize, usize),
) -> Result<(Image, Option<SaraTrace>), HarnessError> {
    if alg == Algorithm::Dirty {
        return Ok((dirty_image(phi, y)?, None));
    }
    let dict = SaraDictionary::new(alg.frames(&spec.dict), rows, cols, spec.levels)?;
    let mut cfg = SaraConfig::new(epsilon, sigma_alpha(phi.m(), dict.n_coeffs(), sigma_n));
    cfg.n_max = if alg.reweighted() { spec.n_max } else { 1 };
    cfg.solver = solver_config(spec);
    let (x, trace) = sara_reconstruct(y, phi, &dict, &cfg)?;
    Ok((x, Some(trace)))
}

fn measurement_count(ratio: f64, n: usize) -> usize {
    ((ratio * n as f64).round() as usize).clamp(1, n)
}

fn run_cells(
    spec: &ExperimentSpec,
    reference: &Image,
    cells: Vec<Cell>,
) -> Result<Vec<RunOutput>, HarnessError> {
    let per_cell: Vec<Result<Vec<RunOutput>, HarnessError>> = cells
        .par_iter()
        .map(|cell| run_cell(spec, reference, cell))
        .collect();
    let mut runs = Vec::new();
    for r in per_cell {
        runs.extend(r?);
    }
    Ok(runs)
}

/// [`run_experiment`] keeping the reconstructions, error images and traces.
pub fn run_experiment_detailed(spec: &ExperimentSpec) -> Result<Vec<RunOutput>, HarnessError> {
    spec.validate()?;
    if spec.ratios.is_empty() {
        return Err(HarnessError::Config("no undersampling ratios".into()));
    }
    let reference = spec.load_reference()?;
    let n = reference.len();
    let cells = spec
        .ratios
        .iter()
        .enumerate()
        .flat_map(|(ratio_index, &ratio)| {
            (0..spec.trials).map(move |trial| Cell {
                ratio_index,
                trial,
                ratio,
                m: measurement_count(ratio, n),
            })
        })
        .collect();
    let runs = run_cells(spec, &reference, cells)?;
    if let Some(dir) = &spec.output_dir {
        fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
        write_results_csv(&dir.join("results.csv"), &rows_of(&runs))?;
        if spec.write_images {
            for run in &runs {
                let stem = format!(
                    "{}_r{}_t{}",
                    run.row.algorithm, run.ratio_index, run.row.trial
                );
                write_run_files(dir, &stem, &reference, run, None)?;
            }
        }
    }
    Ok(runs)
}

/// For every ratio, trial and algorithm: measure with per-cell seeds, add
/// noise, reconstruct and score. Failed cells are kept with
/// `converged = false` and a NaN SNR.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<ResultRow>, HarnessError> {
    Ok(rows_of(&run_experiment_detailed(spec)?))
}

/// Radio imaging demo on a Fourier mask, one cell per seed. The measurement
/// count is `measurements` or the reference count scaled by image area.
pub fn run_radio_demo(spec: &ExperimentSpec) -> Result<Vec<RunOutput>, HarnessError> {
    spec.validate()?;
    if !matches!(spec.operator, OperatorSpec::FourierMask { .. }) {
        return Err(HarnessError::Config(
            "the radio demo needs operator = fourier_mask".into(),
        ));
    }
    if !spec.dict.contains(&Frame::Dirac) {
        log::warn!(
            "radio dictionary {} has no Dirac frame",
            frames_to_string(&spec.dict)
        );
    }
    let reference = spec.load_reference()?;
    let (rows, cols) = reference.shape();
    if rows != cols {
        return Err(HarnessError::Config(
            "the radio demo needs a square image".into(),
        ));
    }
    let m = spec
        .measurements
        .unwrap_or_else(|| scaled_measurement_count(RADIO_REFERENCE_M, RADIO_REFERENCE_SIDE, rows));
    let ratio = m as f64 / reference.len() as f64;
    let cells = (0..spec.trials)
        .map(|trial| Cell {
            ratio_index: 0,
            trial,
            ratio,
            m,
        })
        .collect();
    let runs = run_cells(spec, &reference, cells)?;
    if let Some(dir) = &spec.output_dir {
        fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
        write_results_csv(&dir.join("results.csv"), &rows_of(&runs))?;
        if spec.write_images {
            write_pgm(
                &dir.join("original.pgm"),
                &reference,
                0.0,
                reference.max(),
                Depth::Sixteen,
            )?;
            let original_log = log_scale(&reference, spec.decades);
            write_pgm(
                &dir.join("original_log.pgm"),
                &original_log,
                0.0,
                1.0,
                Depth::Eight,
            )?;
            for trial in 0..spec.trials {
                let seed = derive_seed(cell_seed(spec.seed, 0, trial), &[0]);
                if let Some(cfg) = spec.operator.mask_config(seed, rows, m) {
                    let mask = FourierMask::new(cfg)?;
                    write_mask(&dir.join(format!("mask_s{trial}.txt")), &mask.cells())?;
                    write_pgm(
                        &dir.join(format!("mask_s{trial}.pgm")),
                        &mask_image(&mask),
                        0.0,
                        1.0,
                        Depth::Eight,
                    )?;
                }
            }
            for run in &runs {
                let stem = format!("{}_s{}", run.row.algorithm, run.row.trial);
                write_run_files(dir, &stem, &reference, run, Some(spec.decades))?;
            }
        }
    }
    Ok(runs)
}

/// Sampled frequencies as a binary image with the zero frequency centred.
pub fn mask_image(mask: &FourierMask) -> Image {
    let (rows, cols) = mask.shape();
    let mut img = Image::zeros(rows, cols);
    for (r, c) in mask.cells() {
        let (rr, cc) = ((r + rows / 2) % rows, (c + cols / 2) % cols);
        img.as_mut_slice()[rr * cols + cc] = 1.0;
    }
    img
}

fn write_run_files(
    dir: &Path,
    stem: &str,
    reference: &Image,
    run: &RunOutput,
    log_decades: Option<f64>,
) -> Result<(), HarnessError> {
    let peak = reference.max();
    if let Some(est) = &run.estimate {
        write_pgm(
            &dir.join(format!("{stem}.pgm")),
            est,
            0.0,
            peak,
            Depth::Sixteen,
        )?;
        // the dirty image is only shown on a linear scale
        if let Some(decades) = log_decades.filter(|_| run.row.algorithm != Algorithm::Dirty) {
            write_pgm(
                &dir.join(format!("{stem}_log.pgm")),
                &log_scale(est, decades),
                0.0,
                1.0,
                Depth::Eight,
            )?;
        }
    }
    if let Some(err) = &run.error {
        write_pgm(
            &dir.join(format!("{stem}_err.pgm")),
            err,
            0.0,
            peak,
            Depth::Sixteen,
        )?;
    }
    if let Some(trace) = &run.trace {
        write_trace_csv(&dir.join(format!("{stem}_trace.csv")), trace)?;
    }
    Ok(())
}

pub fn rows_of(runs: &[RunOutput]) -> Vec<ResultRow> {
    runs.iter().map(|r| r.row.clone()).collect()
}

pub const RESULTS_HEADER: [&str; 7] = [
    "algorithm",
    "ratio",
    "trial",
    "snr_db",
    "wall_time_s",
    "solver_iters",
    "converged",
];

pub fn write_results_csv(path: &Path, rows: &[ResultRow]) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(RESULTS_HEADER)?;
    for r in rows {
        w.write_record([
            r.algorithm.name().to_string(),
            r.ratio.to_string(),
            r.trial.to_string(),
            r.snr_db.to_string(),
            format!("{:.3}", r.wall_time_s),
            r.solver_iters.to_string(),
            r.converged.to_string(),
        ])?;
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}

pub fn write_trace_csv(path: &Path, trace: &SaraTrace) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["t", "gamma", "rho", "objective", "inner_iters"])?;
    for r in &trace.records {
        w.write_record([
            r.t.to_string(),
            r.gamma.to_string(),
            r.rho.to_string(),
            r.objective.to_string(),
            r.inner_iters.to_string(),
        ])?;
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}

/// Mean SNR per `(algorithm, ratio)` in first-seen order, skipping failed cells.
pub fn mean_snr(rows: &[ResultRow]) -> Vec<(Algorithm, f64, f64)> {
    let mut acc: Vec<(Algorithm, f64, f64, usize)> = Vec::new();
    for r in rows.iter().filter(|r| !r.snr_db.is_nan()) {
        match acc
            .iter_mut()
            .find(|(a, ratio, ..)| *a == r.algorithm && *ratio == r.ratio)
        {
            Some(e) => {
                e.2 += r.snr_db;
                e.3 += 1;
            }
            None => acc.push((r.algorithm, r.ratio, r.snr_db, 1)),
        }
    }
    acc.into_iter()
        .map(|(a, ratio, s, k)| (a, ratio, s / k as f64))
        .collect()
}
