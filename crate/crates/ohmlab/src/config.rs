//! Run configuration: JSON parsing, defaults, validation and hashing.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::lattice::{make_box, sample_potential, Distribution, FieldProfile, LatticeBox, Potential};

fn cfg_err(field: &str, msg: impl Into<String>) -> Error {
    Error::Config { field: field.into(), msg: msg.into() }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FieldConfig {
    pub t0: f64,
    pub t1: f64,
    pub amplitude: f64,
    pub carrier: f64,
    /// Unit direction; defaults to e_1.
    pub w: Option<Vec<f64>>,
}

impl Default for FieldConfig {
    fn default() -> Self {
        FieldConfig { t0: 0.0, t1: 2.0, amplitude: 1.0, carrier: 2.0, w: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    /// Kernel grid: `xi_points` samples on [0, xi_t_max].
    pub xi_t_max: f64,
    pub xi_points: usize,
    pub hilbert_nodes: usize,
    /// Cosine/sine modes and window length of the AC field space used by
    /// the duality checks.
    pub ac_modes: usize,
    pub ac_window: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { xi_t_max: 20.0, xi_points: 200, hilbert_nodes: 4096, ac_modes: 6, ac_window: 12.0 }
    }
}

fn default_etas() -> Vec<f64> {
    vec![1e-1, 1e-2, 1e-3]
}

fn default_t_after() -> f64 {
    1.0
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub d: usize,
    pub l: usize,
    #[serde(rename = "L")]
    pub radius: usize,
    pub beta: f64,
    pub lambda: f64,
    pub seed: u64,
    /// Disorder realizations for sweeps; empty means just `seed`.
    #[serde(default)]
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub distribution: Distribution,
    #[serde(default)]
    pub field: FieldConfig,
    #[serde(default = "default_etas")]
    pub etas: Vec<f64>,
    /// Defaults to (t1 - t0) / 2000.
    #[serde(default)]
    pub dt: Option<f64>,
    /// Runs end at t1 + t_after.
    #[serde(default = "default_t_after")]
    pub t_after: f64,
    /// Sites kept between the field support and the box edge; defaults to
    /// ceil(4 (t1 - t0)).
    #[serde(default)]
    pub buffer: Option<usize>,
    #[serde(default)]
    pub grids: GridConfig,
    #[serde(default = "default_output")]
    pub output: PathBuf,
}

impl RunConfig {
    /// Minimal config with every optional field at its default.
    pub fn minimal(d: usize, l: usize, radius: usize, beta: f64, lambda: f64, seed: u64) -> Result<Self> {
        let v = serde_json::json!({ "d": d, "l": l, "L": radius, "beta": beta, "lambda": lambda, "seed": seed });
        from_json_value(v)
    }

    fn resolve(mut self) -> Self {
        let width = self.field.t1 - self.field.t0;
        if self.dt.is_none() {
            self.dt = Some(width / 2000.0);
        }
        if self.buffer.is_none() && width.is_finite() && width > 0.0 {
            self.buffer = Some((4.0 * width).ceil() as usize);
        }
        if self.field.w.is_none() && self.d > 0 {
            let mut w = vec![0.0; self.d];
            w[0] = 1.0;
            self.field.w = Some(w);
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.d) {
            return Err(cfg_err("d", format!("dimension {} not in 1..=3", self.d)));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(cfg_err("beta", format!("{} must be positive", self.beta)));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(cfg_err("lambda", format!("{} must be non-negative", self.lambda)));
        }
        let f = &self.field;
        if !(f.t1 > f.t0) || !f.t0.is_finite() || !f.t1.is_finite() {
            return Err(cfg_err("field.t1", format!("pulse window [{}, {}] is empty", f.t0, f.t1)));
        }
        let w = self.direction();
        if w.len() != self.d {
            return Err(cfg_err("field.w", format!("{} components for d = {}", w.len(), self.d)));
        }
        let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(cfg_err("field.w", format!("norm {norm} is not 1")));
        }
        let buffer = self.buffer.unwrap_or(0);
        if self.radius < self.l + buffer {
            return Err(cfg_err("L", format!("L = {} is smaller than l + buffer = {}", self.radius, self.l + buffer)));
        }
        make_box(self.d, self.radius).map_err(|e| cfg_err("L", e.to_string()))?;
        if self.etas.is_empty() || self.etas.iter().any(|e| !(*e > 0.0)) {
            return Err(cfg_err("etas", "need at least one positive coupling"));
        }
        let dt = self.dt();
        if !(dt > 0.0) || dt > f.t1 - f.t0 {
            return Err(cfg_err("dt", format!("{dt} must lie in (0, t1 - t0]")));
        }
        if !(self.t_after >= 0.0) {
            return Err(cfg_err("t_after", "must be non-negative"));
        }
        let g = &self.grids;
        if !(g.xi_t_max > 0.0) || g.xi_points < 2 {
            return Err(cfg_err("grids.xi_points", "kernel grid needs a positive range and two points"));
        }
        if g.hilbert_nodes < 16 {
            return Err(cfg_err("grids.hilbert_nodes", "need at least 16 nodes"));
        }
        if g.ac_modes == 0 {
            return Err(cfg_err("grids.ac_modes", "need at least one mode"));
        }
        if !(g.ac_window > 0.0) {
            return Err(cfg_err("grids.ac_window", "must be positive"));
        }
        Ok(())
    }

    pub fn direction(&self) -> Vec<f64> {
        self.field.w.clone().unwrap_or_default()
    }

    pub fn dt(&self) -> f64 {
        self.dt.unwrap_or((self.field.t1 - self.field.t0) / 2000.0)
    }

    pub fn t_end(&self) -> f64 {
        self.field.t1 + self.t_after
    }

    pub fn seeds(&self) -> Vec<u64> {
        if self.seeds.is_empty() {
            vec![self.seed]
        } else {
            self.seeds.clone()
        }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        RunConfig { seed, seeds: vec![], ..self.clone() }
    }

    pub fn lattice_box(&self) -> Result<LatticeBox> {
        make_box(self.d, self.radius).map_err(|e| cfg_err("L", e.to_string()))
    }

    pub fn potential(&self, bx: &LatticeBox) -> Potential {
        sample_potential(bx, self.seed, self.distribution)
    }

    pub fn field_profile(&self) -> Result<FieldProfile> {
        let f = &self.field;
        FieldProfile::new(f.t0, f.t1, f.amplitude, f.carrier, self.direction(), self.l as f64)
    }

    /// Kernel sample times 0, h, ..., xi_t_max.
    pub fn xi_times(&self) -> Vec<f64> {
        let n = self.grids.xi_points;
        (0..n).map(|i| self.grids.xi_t_max * i as f64 / (n - 1) as f64).collect()
    }

    /// SHA-256 of the canonical JSON form, hex encoded.
    /// SHA-256 of the canonical JSON, ignoring where results are written.
    pub fn hash(&self) -> String {
        let mut v = serde_json::to_value(self).expect("config serializes");
        if let Some(m) = v.as_object_mut() {
            m.remove("output");
        }
        let text = v.to_string();
        let digest = Sha256::digest(text.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

pub fn from_json_value(v: serde_json::Value) -> Result<RunConfig> {
    let cfg: RunConfig = serde_json::from_value(v)?;
    let cfg = cfg.resolve();
    cfg.validate()?;
    Ok(cfg)
}

pub fn from_json_str(text: &str) -> Result<RunConfig> {
    from_json_value(serde_json::from_str(text)?)
}

pub fn parse_config(path: &Path) -> Result<RunConfig> {
    from_json_str(&std::fs::read_to_string(path)?)
}
