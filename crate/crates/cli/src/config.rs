//! Run configuration: defaults, a flat `key = value` file, then flags.
//!
//! File schema (UTF-8, one `key = value` per line, `#` starts a comment):
//!
//! | key             | type                    | default               |
//! |-----------------|-------------------------|-----------------------|
//! | `r`             | float > 0               | 1                     |
//! | `resolution`    | half, default, double   | default               |
//! | `n_theta`       | even int >= 8           | from `resolution`     |
//! | `n_tau`         | int >= 18               | from `resolution`     |
//! | `delta`         | float > 0               | 0.15 pi r / 2         |
//! | `eps0`          | float > 0               | 0.01                  |
//! | `eps_levels`    | int >= 1                | 4                     |
//! | `basis_size`    | int >= 1                | 12                    |
//! | `fock_modes`    | int >= 3                | 6                     |
//! | `max_particles` | int >= 3                | 4                     |
//! | `gauge_lambda`  | float                   | 0.01                  |
//! | `alphas`        | comma-separated floats  | 1e-2,1e-3,1e-4        |
//! | `convention`    | series, paper           | series                |
//! | `kappa`         | derived, paper          | derived               |
//! | `out`           | path                    | ds2-out               |
//! | `seed`          | u64                     | 7                     |
//! | `lambda_min`    | float                   | -0.99                 |
//! | `lambda_max`    | float                   | 3                     |
//! | `lambda_points` | int >= 2                | 400                   |
//! | `alpha`         | float in (0, 1), or `massless` | massless       |

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::PathBuf;

use ds2_core::checks::SuiteConfig;
use ds2_core::current::KappaConvention;
use ds2_core::kernels::{EpsLadder, KernelConvention};
use ds2_core::testfn::{GridSpec, Resolution};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub r: f64,
    pub resolution: Resolution,
    pub n_theta: usize,
    pub n_tau: usize,
    pub delta: f64,
    pub eps0: f64,
    pub eps_levels: usize,
    pub basis_size: usize,
    pub fock_modes: usize,
    pub max_particles: usize,
    pub gauge_lambda: f64,
    pub alphas: Vec<f64>,
    pub convention: KernelConvention,
    pub kappa: KappaConvention,
    pub out: PathBuf,
    pub seed: u64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub lambda_points: usize,
    /// `None` scans the massless kernel.
    pub alpha: Option<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let (n_theta, n_tau) = Resolution::Default.dims();
        Self {
            r: 1.0,
            resolution: Resolution::Default,
            n_theta,
            n_tau,
            delta: 0.15 * PI / 2.0,
            eps0: 1e-2,
            eps_levels: 4,
            basis_size: 12,
            fock_modes: 6,
            max_particles: 4,
            gauge_lambda: 0.01,
            alphas: vec![1e-2, 1e-3, 1e-4],
            convention: KernelConvention::SeriesLimit,
            kappa: KappaConvention::Derived,
            out: PathBuf::from("ds2-out"),
            seed: 7,
            lambda_min: -0.99,
            lambda_max: 3.0,
            lambda_points: 400,
            alpha: None,
        }
    }
}

/// Raw `key -> value` pairs in the order of precedence they were applied.
pub type Overrides = BTreeMap<String, String>;

pub fn parse_file(text: &str) -> Result<Overrides, String> {
    let mut out = Overrides::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| format!("line {}: expected key = value", i + 1))?;
        let k = k.trim().to_string();
        if out.insert(k.clone(), v.trim().to_string()).is_some() {
            return Err(format!("line {}: duplicate key '{k}'", i + 1));
        }
    }
    Ok(out)
}

fn num<T: std::str::FromStr>(k: &str, v: &str) -> Result<T, String> {
    v.parse().map_err(|_| format!("{k}: cannot parse '{v}'"))
}

impl RunConfig {
    /// Applies overrides in order; grid dimensions from `resolution` are
    /// applied before explicit `n_theta` / `n_tau`, and `delta` scales with `r`
    /// unless given.
    pub fn build(layers: &[Overrides]) -> Result<Self, String> {
        let mut merged = Overrides::new();
        for l in layers {
            merged.extend(l.clone());
        }
        let mut c = RunConfig::default();
        if let Some(v) = merged.get("r") {
            c.r = num("r", v)?;
        }
        c.delta = 0.15 * PI * c.r / 2.0;
        if let Some(v) = merged.get("resolution") {
            c.resolution = v.parse().map_err(|e| format!("resolution: {e}"))?;
            (c.n_theta, c.n_tau) = c.resolution.dims();
        }
        for (k, v) in &merged {
            match k.as_str() {
                "r" | "resolution" => {}
                "n_theta" => c.n_theta = num(k, v)?,
                "n_tau" => c.n_tau = num(k, v)?,
                "delta" => c.delta = num(k, v)?,
                "eps0" => c.eps0 = num(k, v)?,
                "eps_levels" => c.eps_levels = num(k, v)?,
                "basis_size" => c.basis_size = num(k, v)?,
                "fock_modes" => c.fock_modes = num(k, v)?,
                "max_particles" => c.max_particles = num(k, v)?,
                "gauge_lambda" => c.gauge_lambda = num(k, v)?,
                "alphas" => c.alphas = v.split(',').map(|s| num(k, s.trim())).collect::<Result<_, _>>()?,
                "convention" => c.convention = v.parse().map_err(|e| format!("convention: {e}"))?,
                "kappa" => c.kappa = v.parse().map_err(|e| format!("kappa: {e}"))?,
                "out" => c.out = PathBuf::from(v),
                "seed" => c.seed = num(k, v)?,
                "lambda_min" => c.lambda_min = num(k, v)?,
                "lambda_max" => c.lambda_max = num(k, v)?,
                "lambda_points" => c.lambda_points = num(k, v)?,
                "alpha" => c.alpha = if v == "massless" { None } else { Some(num(k, v)?) },
                other => return Err(format!("unknown config key '{other}'")),
            }
        }
        c.validate()?;
        Ok(c)
    }

    fn validate(&self) -> Result<(), String> {
        self.grid()?;
        if self.basis_size == 0 || self.fock_modes < 3 || self.max_particles < 3 {
            return Err("basis_size >= 1, fock_modes >= 3 and max_particles >= 3 are required".into());
        }
        if self.alphas.len() < 2 || self.alphas.iter().any(|a| !(*a > 0.0 && *a < 1.0)) {
            return Err("alphas: need at least two values in (0, 1)".into());
        }
        if !self.gauge_lambda.is_finite() {
            return Err("gauge_lambda must be finite".into());
        }
        self.ladder()?;
        Ok(())
    }

    /// Kernel-scan range; checked only by the `kernel` command.
    pub fn lambda_grid(&self) -> Result<Vec<f64>, String> {
        if !(self.lambda_min > -1.0 && self.lambda_min < self.lambda_max && self.lambda_max.is_finite()) {
            return Err(format!(
                "lambda range [{}, {}] must be increasing and lie above the cut at -1",
                self.lambda_min, self.lambda_max
            ));
        }
        if self.lambda_points < 2 {
            return Err("lambda_points must be at least 2".into());
        }
        if let Some(a) = self.alpha {
            if !(a > 0.0 && a < 1.0) {
                return Err(format!("alpha must lie in (0, 1), got {a}"));
            }
        }
        let n = self.lambda_points - 1;
        Ok((0..=n).map(|k| self.lambda_min + (self.lambda_max - self.lambda_min) * k as f64 / n as f64).collect())
    }

    pub fn grid(&self) -> Result<GridSpec, String> {
        let half = (0.8 * PI * self.r / 2.0).min(PI * self.r / 2.0 - self.delta);
        GridSpec::new(self.r, self.n_theta, self.n_tau, -half, half, self.delta).map_err(|e| e.to_string())
    }

    pub fn ladder(&self) -> Result<EpsLadder, String> {
        EpsLadder::dyadic(self.eps0, self.eps_levels).map_err(|e| e.to_string())
    }

    pub fn suite(&self) -> Result<SuiteConfig, String> {
        let mut s = SuiteConfig::new(self.grid()?);
        s.conv = self.convention;
        s.kappa = self.kappa;
        s.seed = self.seed;
        s.ladder = self.ladder()?;
        s.basis_size = self.basis_size;
        s.fock_modes = self.fock_modes;
        s.max_particles = self.max_particles;
        s.gauge_lambda = self.gauge_lambda;
        s.alphas = self.alphas.clone();
        Ok(s)
    }

    /// `key=value` lines for CSV headers, in a fixed order.
    pub fn header_lines(&self) -> Vec<String> {
        let v = serde_json::to_value(self).expect("config serializes");
        let obj = v.as_object().expect("config is an object");
        let mut keys: Vec<&String> = obj.keys().collect();
        keys.sort();
        keys.into_iter().map(|k| format!("{k}={}", obj[k])).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        let c = RunConfig::build(&[]).unwrap();
        assert_eq!(c, RunConfig::default());
        assert_eq!(c.grid().unwrap(), GridSpec::standard(1.0, Resolution::Default).unwrap());
    }

    #[test]
    fn file_parsing_and_precedence() {
        let file = parse_file("# comment\nr = 2\nresolution = half\nn_tau=80 # trailing\nkappa = paper\n").unwrap();
        let mut flags = Overrides::new();
        flags.insert("kappa".into(), "derived".into());
        let c = RunConfig::build(&[file, flags]).unwrap();
        assert_eq!((c.r, c.n_theta, c.n_tau), (2.0, 48, 80));
        assert_eq!(c.kappa, KappaConvention::Derived);
        assert!((c.delta - 0.15 * PI).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_file("r 2").is_err());
        assert!(parse_file("r = 1\nr = 2").is_err());
        let bad = |k: &str, v: &str| {
            let mut o = Overrides::new();
            o.insert(k.into(), v.into());
            RunConfig::build(&[o])
        };
        assert!(bad("bogus", "1").is_err());
        assert!(bad("r", "-1").is_err());
        assert!(bad("n_theta", "7").is_err());
        assert!(bad("alphas", "0.1").is_err());
        assert!(bad("convention", "other").is_err());
        assert!(bad("delta", "2").is_err());
    }

    #[test]
    fn lambda_grid_bounds() {
        let mut c = RunConfig::default();
        let g = c.lambda_grid().unwrap();
        assert_eq!(g.len(), 400);
        assert_eq!((g[0], g[399]), (-0.99, 3.0));
        c.lambda_min = -1.0;
        assert!(c.lambda_grid().is_err());
        c.lambda_min = 4.0;
        assert!(c.lambda_grid().is_err());
    }
}
