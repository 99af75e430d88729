//! Flat key-value configuration with dotted section prefixes.
//!
//! One `key = value` pair per line, `#` starts a comment, unknown keys are
//! rejected. The metadata file written next to each run uses the same
//! format with every default resolved, so it can be fed back through
//! `run --config` to reproduce the run exactly.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use num_complex::Complex64;

use crate::CliError;

/// Which table the run produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    G2VsTime,
    Wigner,
    WlnVsTime,
    ScanAlpha,
    CatalyticSet,
    Squeezing,
    Dissipative,
    Multicavity,
}

impl Experiment {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "g2-vs-time" => Some(Self::G2VsTime),
            "wigner" => Some(Self::Wigner),
            "wln-vs-time" => Some(Self::WlnVsTime),
            "scan-alpha" => Some(Self::ScanAlpha),
            "catalytic-set" => Some(Self::CatalyticSet),
            "squeezing" => Some(Self::Squeezing),
            "dissipative" => Some(Self::Dissipative),
            "multicavity" => Some(Self::Multicavity),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::G2VsTime => "g2-vs-time",
            Self::Wigner => "wigner",
            Self::WlnVsTime => "wln-vs-time",
            Self::ScanAlpha => "scan-alpha",
            Self::CatalyticSet => "catalytic-set",
            Self::Squeezing => "squeezing",
            Self::Dissipative => "dissipative",
            Self::Multicavity => "multicavity",
        }
    }

    /// CSV file the experiment writes.
    pub fn csv_name(&self) -> &'static str {
        match self {
            Self::G2VsTime => "g2_vs_t.csv",
            Self::Wigner => "wigner.csv",
            Self::WlnVsTime => "wln_vs_t.csv",
            Self::ScanAlpha => "scan_alpha.csv",
            Self::CatalyticSet => "catalytic_set.csv",
            Self::Squeezing => "squeezing.csv",
            Self::Dissipative => "dissipative.csv",
            Self::Multicavity => "multicavity.csv",
        }
    }
}

/// Optional per-run phase-space grid override; unset fields fall back to
/// the default grid for the configured amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GridOverride {
    pub points: Option<usize>,
    pub half_width: Option<f64>,
}

/// Experiment-specific parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum ExperimentSpec {
    G2VsTime { windows: Vec<(f64, f64)>, resolve_steps: usize, target_g2: f64, scan_points: usize },
    Wigner { tau: f64, grid: GridOverride },
    WlnVsTime { tau: f64, scan_points: usize, grid: GridOverride },
    ScanAlpha { alpha_grid: Vec<f64>, gtau_bound: f64, tau_steps: usize },
    CatalyticSet { n_samples: usize, gtau_bound: f64 },
    Squeezing { windows: Vec<(f64, f64)>, resolve_steps: usize, scan_points: usize },
    Dissipative {
        kappa: f64,
        gamma: f64,
        n_th: f64,
        tau_start: f64,
        tau_stop: f64,
        tau_count: usize,
        grid: GridOverride,
    },
    Multicavity { tau: f64, n_cavities: usize, max_joint_dim: usize },
}

/// Fully parsed and validated run description.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub omega: f64,
    pub g: f64,
    pub n_trunc: usize,
    /// Coherent amplitude of the initial cavity state (unused by scan-alpha,
    /// which carries its own amplitude grid).
    pub alpha: Complex64,
    pub tail_tol: f64,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub spec: ExperimentSpec,
}

struct KeyBag {
    values: BTreeMap<String, String>,
}

impl KeyBag {
    fn parse(text: &str) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected `key = value`", lineno + 1)))?;
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if key.is_empty() || value.is_empty() {
                return Err(CliError::Config(format!("line {}: empty key or value", lineno + 1)));
            }
            if values.insert(key.clone(), value).is_some() {
                return Err(CliError::Config(format!("duplicate key `{key}`")));
            }
        }
        Ok(Self { values })
    }

    fn take(&mut self, key: &str) -> Option<String> {
        self.values.remove(key)
    }

    fn require(&mut self, key: &str) -> Result<String, CliError> {
        self.take(key)
            .ok_or_else(|| CliError::Config(format!("missing required key `{key}`")))
    }

    fn require_f64(&mut self, key: &str) -> Result<f64, CliError> {
        parse_f64(key, &self.require(key)?)
    }

    fn take_f64(&mut self, key: &str) -> Result<Option<f64>, CliError> {
        self.take(key).map(|v| parse_f64(key, &v)).transpose()
    }

    fn require_usize(&mut self, key: &str) -> Result<usize, CliError> {
        let raw = self.require(key)?;
        raw.parse::<usize>()
            .map_err(|_| CliError::Config(format!("key `{key}`: `{raw}` is not a non-negative integer")))
    }

    fn take_usize(&mut self, key: &str) -> Result<Option<usize>, CliError> {
        self.take(key)
            .map(|raw| {
                raw.parse::<usize>().map_err(|_| {
                    CliError::Config(format!("key `{key}`: `{raw}` is not a non-negative integer"))
                })
            })
            .transpose()
    }

    fn finish(self) -> Result<(), CliError> {
        if let Some((key, _)) = self.values.into_iter().next() {
            return Err(CliError::Config(format!("unknown key `{key}`")));
        }
        Ok(())
    }
}

fn parse_f64(key: &str, raw: &str) -> Result<f64, CliError> {
    raw.parse::<f64>()
        .map_err(|_| CliError::Config(format!("key `{key}`: `{raw}` is not a number")))
}

fn parse_windows(key: &str, raw: &str) -> Result<Vec<(f64, f64)>, CliError> {
    let mut windows = Vec::new();
    for part in raw.split(',') {
        let (lo, hi) = part
            .split_once(':')
            .ok_or_else(|| CliError::Config(format!("key `{key}`: window `{part}` is not `lo:hi`")))?;
        let lo = parse_f64(key, lo.trim())?;
        let hi = parse_f64(key, hi.trim())?;
        if !(hi > lo) {
            return Err(CliError::Config(format!("key `{key}`: window `{part}` is empty")));
        }
        windows.push((lo, hi));
    }
    if windows.is_empty() {
        return Err(CliError::Config(format!("key `{key}`: no windows given")));
    }
    Ok(windows)
}

fn parse_f64_list(key: &str, raw: &str) -> Result<Vec<f64>, CliError> {
    let list = raw
        .split(',')
        .map(|p| parse_f64(key, p.trim()))
        .collect::<Result<Vec<f64>, CliError>>()?;
    if list.is_empty() {
        return Err(CliError::Config(format!("key `{key}`: empty list")));
    }
    Ok(list)
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut bag = KeyBag::parse(text)?;
        let experiment_raw = bag.require("experiment")?;
        let experiment = Experiment::parse(&experiment_raw)
            .ok_or_else(|| CliError::Config(format!("unknown experiment `{experiment_raw}`")))?;
        let omega = bag.require_f64("params.omega")?;
        let g = bag.require_f64("params.g")?;
        let n_trunc = bag.require_usize("params.n_trunc")?;
        let tail_tol = bag.take_f64("tail_tol")?.unwrap_or(1e-12);
        let seed = bag
            .take("seed")
            .map(|raw| {
                raw.parse::<u64>()
                    .map_err(|_| CliError::Config(format!("key `seed`: `{raw}` is not an integer")))
            })
            .transpose()?
            .unwrap_or(0);
        let output_dir = PathBuf::from(bag.take("output_dir").unwrap_or_else(|| "out".into()));

        let alpha = if experiment == Experiment::ScanAlpha {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(bag.require_f64("alpha.re")?, bag.take_f64("alpha.im")?.unwrap_or(0.0))
        };

        let grid_override = |bag: &mut KeyBag| -> Result<GridOverride, CliError> {
            Ok(GridOverride {
                points: bag.take_usize("grid.points")?,
                half_width: bag.take_f64("grid.half_width")?,
            })
        };

        let spec = match experiment {
            Experiment::G2VsTime => ExperimentSpec::G2VsTime {
                windows: parse_windows("tau.resolve_windows", &bag.require("tau.resolve_windows")?)?,
                resolve_steps: bag.require_usize("tau.resolve_steps")?,
                target_g2: bag.require_f64("tau.target_g2")?,
                scan_points: bag.require_usize("scan.points")?,
            },
            Experiment::Wigner => ExperimentSpec::Wigner {
                tau: bag.require_f64("tau")?,
                grid: grid_override(&mut bag)?,
            },
            Experiment::WlnVsTime => ExperimentSpec::WlnVsTime {
                tau: bag.require_f64("tau")?,
                scan_points: bag.require_usize("scan.points")?,
                grid: grid_override(&mut bag)?,
            },
            Experiment::ScanAlpha => ExperimentSpec::ScanAlpha {
                alpha_grid: parse_f64_list("alpha_grid", &bag.require("alpha_grid")?)?,
                gtau_bound: bag.require_f64("gtau_bound")?,
                tau_steps: bag.require_usize("tau.steps")?,
            },
            Experiment::CatalyticSet => ExperimentSpec::CatalyticSet {
                n_samples: bag.require_usize("n_samples")?,
                gtau_bound: bag.require_f64("gtau_bound")?,
            },
            Experiment::Squeezing => ExperimentSpec::Squeezing {
                windows: parse_windows("tau.resolve_windows", &bag.require("tau.resolve_windows")?)?,
                resolve_steps: bag.require_usize("tau.resolve_steps")?,
                scan_points: bag.require_usize("scan.points")?,
            },
            Experiment::Dissipative => ExperimentSpec::Dissipative {
                kappa: bag.require_f64("diss.kappa")?,
                gamma: bag.require_f64("diss.gamma")?,
                n_th: bag.require_f64("diss.n_th")?,
                tau_start: bag.require_f64("tau_grid.start")?,
                tau_stop: bag.require_f64("tau_grid.stop")?,
                tau_count: bag.require_usize("tau_grid.count")?,
                grid: grid_override(&mut bag)?,
            },
            Experiment::Multicavity => ExperimentSpec::Multicavity {
                tau: bag.require_f64("tau")?,
                n_cavities: bag.require_usize("n_cavities")?,
                max_joint_dim: bag.take_usize("max_joint_dim")?.unwrap_or(4096),
            },
        };
        bag.finish()?;

        let config = Self { experiment, omega, g, n_trunc, alpha, tail_tol, seed, output_dir, spec };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), CliError> {
        let reject = |msg: &str| Err(CliError::Config(msg.to_string()));
        match &self.spec {
            ExperimentSpec::G2VsTime { resolve_steps, scan_points, .. } => {
                if *resolve_steps < 1 || *scan_points < 2 {
                    return reject("g2-vs-time needs tau.resolve_steps >= 1 and scan.points >= 2");
                }
            }
            ExperimentSpec::Wigner { tau, .. } => {
                if !(*tau >= 0.0) {
                    return reject("tau must be >= 0");
                }
            }
            ExperimentSpec::WlnVsTime { tau, scan_points, .. } => {
                if !(*tau > 0.0) || *scan_points < 2 {
                    return reject("wln-vs-time needs tau > 0 and scan.points >= 2");
                }
            }
            ExperimentSpec::ScanAlpha { gtau_bound, tau_steps, .. } => {
                if !(*gtau_bound > 0.0) || *tau_steps < 1 {
                    return reject("scan-alpha needs gtau_bound > 0 and tau.steps >= 1");
                }
            }
            ExperimentSpec::CatalyticSet { n_samples, gtau_bound } => {
                if *n_samples < 1 || !(*gtau_bound > 0.0) {
                    return reject("catalytic-set needs n_samples >= 1 and gtau_bound > 0");
                }
            }
            ExperimentSpec::Squeezing { resolve_steps, scan_points, .. } => {
                if *resolve_steps < 1 || *scan_points < 2 {
                    return reject("squeezing needs tau.resolve_steps >= 1 and scan.points >= 2");
                }
            }
            ExperimentSpec::Dissipative { tau_count, tau_start, tau_stop, .. } => {
                if *tau_count == 0 {
                    return reject("dissipative needs a non-empty tau grid");
                }
                if !(*tau_stop >= *tau_start) || !(*tau_start >= 0.0) {
                    return reject("dissipative needs 0 <= tau_grid.start <= tau_grid.stop");
                }
            }
            ExperimentSpec::Multicavity { n_cavities, .. } => {
                if *n_cavities < 1 {
                    return reject("multicavity needs n_cavities >= 1");
                }
            }
        }
        Ok(())
    }

    /// Render the fully-resolved configuration in the same flat format;
    /// parsing this text reproduces `self` exactly.
    pub fn to_config_string(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "experiment = {}", self.experiment.name());
        let _ = writeln!(s, "params.omega = {}", fmt_f64(self.omega));
        let _ = writeln!(s, "params.g = {}", fmt_f64(self.g));
        let _ = writeln!(s, "params.n_trunc = {}", self.n_trunc);
        if self.experiment != Experiment::ScanAlpha {
            let _ = writeln!(s, "alpha.re = {}", fmt_f64(self.alpha.re));
            let _ = writeln!(s, "alpha.im = {}", fmt_f64(self.alpha.im));
        }
        let _ = writeln!(s, "tail_tol = {}", fmt_f64(self.tail_tol));
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "output_dir = {}", self.output_dir.display());
        match &self.spec {
            ExperimentSpec::G2VsTime { windows, resolve_steps, target_g2, scan_points } => {
                let _ = writeln!(s, "tau.resolve_windows = {}", fmt_windows(windows));
                let _ = writeln!(s, "tau.resolve_steps = {resolve_steps}");
                let _ = writeln!(s, "tau.target_g2 = {}", fmt_f64(*target_g2));
                let _ = writeln!(s, "scan.points = {scan_points}");
            }
            ExperimentSpec::Wigner { tau, grid } => {
                let _ = writeln!(s, "tau = {}", fmt_f64(*tau));
                fmt_grid(&mut s, grid);
            }
            ExperimentSpec::WlnVsTime { tau, scan_points, grid } => {
                let _ = writeln!(s, "tau = {}", fmt_f64(*tau));
                let _ = writeln!(s, "scan.points = {scan_points}");
                fmt_grid(&mut s, grid);
            }
            ExperimentSpec::ScanAlpha { alpha_grid, gtau_bound, tau_steps } => {
                let list: Vec<String> = alpha_grid.iter().map(|a| fmt_f64(*a)).collect();
                let _ = writeln!(s, "alpha_grid = {}", list.join(","));
                let _ = writeln!(s, "gtau_bound = {}", fmt_f64(*gtau_bound));
                let _ = writeln!(s, "tau.steps = {tau_steps}");
            }
            ExperimentSpec::CatalyticSet { n_samples, gtau_bound } => {
                let _ = writeln!(s, "n_samples = {n_samples}");
                let _ = writeln!(s, "gtau_bound = {}", fmt_f64(*gtau_bound));
            }
            ExperimentSpec::Squeezing { windows, resolve_steps, scan_points } => {
                let _ = writeln!(s, "tau.resolve_windows = {}", fmt_windows(windows));
                let _ = writeln!(s, "tau.resolve_steps = {resolve_steps}");
                let _ = writeln!(s, "scan.points = {scan_points}");
            }
            ExperimentSpec::Dissipative { kappa, gamma, n_th, tau_start, tau_stop, tau_count, grid } => {
                let _ = writeln!(s, "diss.kappa = {}", fmt_f64(*kappa));
                let _ = writeln!(s, "diss.gamma = {}", fmt_f64(*gamma));
                let _ = writeln!(s, "diss.n_th = {}", fmt_f64(*n_th));
                let _ = writeln!(s, "tau_grid.start = {}", fmt_f64(*tau_start));
                let _ = writeln!(s, "tau_grid.stop = {}", fmt_f64(*tau_stop));
                let _ = writeln!(s, "tau_grid.count = {tau_count}");
                fmt_grid(&mut s, grid);
            }
            ExperimentSpec::Multicavity { tau, n_cavities, max_joint_dim } => {
                let _ = writeln!(s, "tau = {}", fmt_f64(*tau));
                let _ = writeln!(s, "n_cavities = {n_cavities}");
                let _ = writeln!(s, "max_joint_dim = {max_joint_dim}");
            }
        }
        s
    }
}

fn fmt_windows(windows: &[(f64, f64)]) -> String {
    let parts: Vec<String> = windows
        .iter()
        .map(|(lo, hi)| format!("{}:{}", fmt_f64(*lo), fmt_f64(*hi)))
        .collect();
    parts.join(",")
}

fn fmt_grid(s: &mut String, grid: &GridOverride) {
    if let Some(points) = grid.points {
        let _ = writeln!(s, "grid.points = {points}");
    }
    if let Some(half_width) = grid.half_width {
        let _ = writeln!(s, "grid.half_width = {}", fmt_f64(half_width));
    }
}

/// 17 significant digits: enough to round-trip any f64 exactly.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}
