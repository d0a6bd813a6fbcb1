//! Boxes in Z^d, random potentials, tight-binding Hamiltonians with Peierls
//! phases, and the smooth pulse used to drive them.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::GaussLegendre;

pub type CMat = DMatrix<Complex64>;
pub type RMat = DMatrix<f64>;

pub const DEFAULT_MAX_SITES: usize = 4096;
pub const PEIERLS_ORDER: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeBox {
    pub d: usize,
    pub radius: usize,
    side: usize,
    n: usize,
}

impl LatticeBox {
    pub fn n_sites(&self) -> usize {
        self.n
    }

    pub fn index(&self, x: &[i64]) -> Option<usize> {
        if x.len() != self.d {
            return None;
        }
        let r = self.radius as i64;
        let mut idx = 0usize;
        for &c in x {
            if c < -r || c > r {
                return None;
            }
            idx = idx * self.side + (c + r) as usize;
        }
        Some(idx)
    }

    pub fn site(&self, mut i: usize) -> Vec<i64> {
        let r = self.radius as i64;
        let mut x = vec![0i64; self.d];
        for j in (0..self.d).rev() {
            x[j] = (i % self.side) as i64 - r;
            i /= self.side;
        }
        x
    }

    /// Neighbour of site i shifted by `step` along axis k, if it is in the box.
    pub fn shift(&self, i: usize, k: usize, step: i64) -> Option<usize> {
        let mut x = self.site(i);
        x[k] += step;
        self.index(&x)
    }

    /// Indices of the sites with max-norm at most l.
    pub fn ball(&self, l: usize) -> Vec<usize> {
        (0..self.n)
            .filter(|&i| self.site(i).iter().all(|c| c.unsigned_abs() as usize <= l))
            .collect()
    }

    /// Unordered nearest-neighbour bonds (x, x + e_k) inside the box.
    pub fn bonds(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for k in 0..self.d {
                if let Some(j) = self.shift(i, k, 1) {
                    out.push((i, j, k));
                }
            }
        }
        out
    }
}

pub fn make_box(d: usize, radius: usize) -> Result<LatticeBox> {
    make_box_with_limit(d, radius, DEFAULT_MAX_SITES)
}

pub fn make_box_with_limit(d: usize, radius: usize, limit: usize) -> Result<LatticeBox> {
    if d == 0 {
        return Err(Error::Domain("dimension must be at least 1".into()));
    }
    let side = 2 * radius + 1;
    let n = (0..d).try_fold(1usize, |acc, _| acc.checked_mul(side));
    match n {
        Some(n) if n <= limit => Ok(LatticeBox { d, radius, side, n }),
        Some(n) => Err(Error::Size { requested: n, limit }),
        None => Err(Error::Size { requested: usize::MAX, limit }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Distribution {
    #[default]
    Uniform,
    Binary,
    Zero,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    pub values: Vec<f64>,
    pub seed: u64,
    pub dist: Distribution,
}

pub fn sample_potential(bx: &LatticeBox, seed: u64, dist: Distribution) -> Potential {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..bx.n_sites())
        .map(|_| match dist {
            Distribution::Uniform => rng.gen_range(-1.0..=1.0),
            Distribution::Binary => {
                if rng.gen_bool(0.5) {
                    1.0
                } else {
                    -1.0
                }
            }
            Distribution::Zero => 0.0,
        })
        .collect();
    Potential { values, seed, dist }
}

pub fn build_hamiltonian(bx: &LatticeBox, pot: &Potential, lambda: f64) -> Result<CMat> {
    let n = bx.n_sites();
    if pot.values.len() != n {
        return Err(Error::Dimension(format!(
            "potential has {} values for {} sites",
            pot.values.len(),
            n
        )));
    }
    let mut h = CMat::zeros(n, n);
    for i in 0..n {
        h[(i, i)] = Complex64::new(2.0 * bx.d as f64 + lambda * pot.values[i], 0.0);
    }
    for (i, j, _) in bx.bonds() {
        h[(i, j)] = Complex64::new(-1.0, 0.0);
        h[(j, i)] = Complex64::new(-1.0, 0.0);
    }
    Ok(h)
}

/// Pulse A(t) = a * exp(-1/(1-s^2)) * sin(carrier * t), s the rescaled time in
/// (-1, 1), times a direction w, restricted in space to prod_j [-l, l+1).
///
/// The half-open region makes the coupled bonds exactly {(x, x+e_k) : x in
/// Lambda_l}, the same bonds summed in the current observables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldProfile {
    pub t0: f64,
    pub t1: f64,
    pub amplitude: f64,
    pub carrier: f64,
    pub w: Vec<f64>,
    pub support: f64,
}

impl FieldProfile {
    pub fn new(t0: f64, t1: f64, amplitude: f64, carrier: f64, w: Vec<f64>, support: f64) -> Result<Self> {
        if !(t1 > t0) {
            return Err(Error::Domain(format!("empty pulse window [{t0}, {t1}]")));
        }
        let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::Domain(format!("direction w has norm {norm}")));
        }
        Ok(FieldProfile { t0, t1, amplitude, carrier, w, support })
    }

    fn bump(&self, t: f64) -> Option<(f64, f64)> {
        if t <= self.t0 || t >= self.t1 {
            return None;
        }
        let width = self.t1 - self.t0;
        let s = (2.0 * t - self.t0 - self.t1) / width;
        let q = 1.0 - s * s;
        let g = (-1.0 / q).exp();
        let dg = g * (-2.0 * s / (q * q)) * (2.0 / width);
        Some((g, dg))
    }

    /// Scalar vector potential A(t).
    pub fn potential(&self, t: f64) -> f64 {
        match self.bump(t) {
            Some((g, _)) => self.amplitude * g * (self.carrier * t).sin(),
            None => 0.0,
        }
    }

    /// Electric field E(t) = -dA/dt.
    pub fn efield(&self, t: f64) -> f64 {
        match self.bump(t) {
            Some((g, dg)) => {
                let (s, c) = (self.carrier * t).sin_cos();
                -self.amplitude * (dg * s + g * self.carrier * c)
            }
            None => 0.0,
        }
    }

    pub fn spatial(&self, x: &[f64]) -> f64 {
        let l = self.support;
        if x.iter().all(|&c| c >= -l && c < l + 1.0) {
            1.0
        } else {
            0.0
        }
    }

    /// Fourier transform of E: integral of E(s) exp(-i nu s) ds.
    pub fn efield_fourier(&self, nu: f64, gl: &GaussLegendre, panels: usize) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (s, w) in gl.composite_nodes(self.t0, self.t1, panels) {
            acc += w * self.efield(s) * Complex64::from_polar(1.0, -nu * s);
        }
        acc
    }
}

fn segment_integral<F: Fn(&[f64]) -> f64>(x1: &[i64], x2: &[i64], f: F, gl: &GaussLegendre) -> f64 {
    let mut p = vec![0.0; x1.len()];
    gl.integrate(0.0, 1.0, |a| {
        for j in 0..x1.len() {
            p[j] = a * x2[j] as f64 + (1.0 - a) * x1[j] as f64;
        }
        f(&p)
    })
}

fn check_neighbors(x1: &[i64], x2: &[i64]) -> Result<()> {
    let dist: i64 = x1.iter().zip(x2).map(|(a, b)| (a - b).abs()).sum();
    if x1.len() != x2.len() || dist != 1 {
        return Err(Error::Domain(format!("{x1:?} and {x2:?} are not nearest neighbours")));
    }
    Ok(())
}

fn dot_dir(w: &[f64], x1: &[i64], x2: &[i64]) -> f64 {
    w.iter().zip(x1.iter().zip(x2)).map(|(w, (a, b))| w * (b - a) as f64).sum()
}

/// Line integral of eta * E_l(t, .) along the bond from x1 to x2.
pub fn integrated_field(field: &FieldProfile, eta: f64, t: f64, x1: &[i64], x2: &[i64]) -> Result<f64> {
    check_neighbors(x1, x2)?;
    let gl = GaussLegendre::new(PEIERLS_ORDER);
    let proj = dot_dir(&field.w, x1, x2);
    let e = field.efield(t);
    if e == 0.0 || proj == 0.0 {
        return Ok(0.0);
    }
    Ok(eta * e * proj * segment_integral(x1, x2, |p| field.spatial(p), &gl))
}

/// Bonds touched by the field, with the static line-integral factor c such
/// that the Peierls phase of entry (u, v) is exp(i eta A(t) c).
#[derive(Debug, Clone)]
pub struct PeierlsCoupling {
    pub links: Vec<(usize, usize, f64)>,
}

impl PeierlsCoupling {
    pub fn new(bx: &LatticeBox, field: &FieldProfile) -> Result<Self> {
        if field.w.len() != bx.d {
            return Err(Error::Dimension(format!("w has {} components in d = {}", field.w.len(), bx.d)));
        }
        let gl = GaussLegendre::new(PEIERLS_ORDER);
        let mut links = Vec::new();
        for (u, v, _) in bx.bonds() {
            let (xu, xv) = (bx.site(u), bx.site(v));
            let proj = dot_dir(&field.w, &xu, &xv);
            if proj == 0.0 {
                continue;
            }
            let c = proj * segment_integral(&xu, &xv, |p| field.spatial(p), &gl);
            if c != 0.0 {
                links.push((u, v, c));
            }
        }
        Ok(PeierlsCoupling { links })
    }
}

/// Static Hamiltonian h plus the machinery to dress it with Peierls phases.
#[derive(Debug, Clone)]
pub struct MagneticHamiltonian {
    pub h: CMat,
    pub coupling: PeierlsCoupling,
    pub field: FieldProfile,
}

impl MagneticHamiltonian {
    pub fn new(bx: &LatticeBox, pot: &Potential, lambda: f64, field: &FieldProfile) -> Result<Self> {
        Ok(MagneticHamiltonian {
            h: build_hamiltonian(bx, pot, lambda)?,
            coupling: PeierlsCoupling::new(bx, field)?,
            field: field.clone(),
        })
    }

    pub fn phase_angle(&self, eta: f64, t: f64) -> f64 {
        eta * self.field.potential(t)
    }

    /// H(t) - h, i.e. the one-particle potential-energy coefficient.
    pub fn perturbation(&self, eta: f64, t: f64) -> CMat {
        let n = self.h.nrows();
        let mut w = CMat::zeros(n, n);
        let a = self.phase_angle(eta, t);
        if a == 0.0 {
            return w;
        }
        for &(u, v, c) in &self.coupling.links {
            let z = Complex64::from_polar(1.0, a * c) - 1.0;
            w[(u, v)] = z * self.h[(u, v)];
            w[(v, u)] = z.conj() * self.h[(v, u)];
        }
        w
    }

    pub fn at(&self, eta: f64, t: f64) -> CMat {
        &self.h + self.perturbation(eta, t)
    }

    /// Time derivative of H(t), from dA/dt = -E.
    pub fn time_derivative(&self, eta: f64, t: f64) -> CMat {
        let n = self.h.nrows();
        let mut w = CMat::zeros(n, n);
        let a = self.phase_angle(eta, t);
        let da = -eta * self.field.efield(t);
        if da == 0.0 {
            return w;
        }
        for &(u, v, c) in &self.coupling.links {
            let z = Complex64::new(0.0, da * c) * Complex64::from_polar(1.0, a * c);
            w[(u, v)] = z * self.h[(u, v)];
            w[(v, u)] = z.conj() * self.h[(v, u)];
        }
        w
    }
}

pub fn build_magnetic_hamiltonian(
    bx: &LatticeBox,
    pot: &Potential,
    lambda: f64,
    field: &FieldProfile,
    eta: f64,
    t: f64,
) -> Result<CMat> {
    Ok(MagneticHamiltonian::new(bx, pot, lambda, field)?.at(eta, t))
}

pub fn hermiticity_defect(m: &CMat) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}
