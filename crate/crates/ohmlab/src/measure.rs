//! Atomic conductivity measures: construction, moments, static admittance,
//! Cesaro means and reconstruction from the current viscosity.

use nalgebra::SymmetricEigen;

use crate::error::{Error, Result};
use crate::lattice::{LatticeBox, RMat};
use crate::spectral::{expectation_product, pair_kernel, DensityMatrix, EigenSystem, QuadraticObservable};
use crate::transport::{current_operator, eigen_currents, KernelMeta, TransportKernel};

pub const CLUSTER_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub nu: f64,
    pub weight: RMat,
}

/// Finite sum of weighted Dirac masses, sorted by frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralMeasure {
    pub dim: usize,
    pub atoms: Vec<Atom>,
}

impl SpectralMeasure {
    pub fn empty(dim: usize) -> Self {
        SpectralMeasure { dim, atoms: Vec::new() }
    }

    pub fn total(&self) -> RMat {
        self.atoms.iter().fold(RMat::zeros(self.dim, self.dim), |acc, a| acc + &a.weight)
    }

    pub fn zero_atom(&self) -> RMat {
        self.atoms
            .iter()
            .filter(|a| a.nu == 0.0)
            .fold(RMat::zeros(self.dim, self.dim), |acc, a| acc + &a.weight)
    }

    /// mu(R \ {0}).
    pub fn off_zero(&self) -> RMat {
        self.total() - self.zero_atom()
    }

    /// Smallest non-zero |nu|, if any.
    pub fn min_gap(&self) -> Option<f64> {
        self.atoms.iter().filter(|a| a.nu != 0.0).map(|a| a.nu.abs()).min_by(f64::total_cmp)
    }

    /// Scalar measure <w, mu w> as (nu, weight) pairs.
    pub fn project(&self, w: &[f64]) -> Vec<(f64, f64)> {
        self.atoms
            .iter()
            .map(|a| {
                let mut s = 0.0;
                for k in 0..self.dim {
                    for q in 0..self.dim {
                        s += w[k] * a.weight[(k, q)] * w[q];
                    }
                }
                (a.nu, s)
            })
            .collect()
    }
}

/// mu_p: atoms at E_m - E_n with weights |Lambda_l|^{-1} Re(conj(I_k)_mn (I_q)_mn) K_mn.
/// Positive frequencies are clustered and mirrored, so the +-nu symmetry is exact.
pub fn build_measure(es: &EigenSystem, beta: f64, bx: &LatticeBox, l: usize) -> Result<SpectralMeasure> {
    let d = bx.d;
    let cur = eigen_currents(es, bx, l)?;
    let vol = bx.ball(l).len() as f64;
    let n = es.dim();
    let e = &es.values;
    let diameter = (e[n - 1] - e[0]).max(f64::MIN_POSITIVE);
    let tol = CLUSTER_TOL * diameter;
    let mut zero = RMat::zeros(d, d);
    let mut positive: Vec<(f64, RMat)> = Vec::new();
    for m in 0..n {
        for j in 0..n {
            let nu = e[m] - e[j];
            if nu < -tol {
                continue;
            }
            let kern = pair_kernel(e[m], e[j], beta) / vol;
            let w = RMat::from_fn(d, d, |k, q| (cur[k][(m, j)].conj() * cur[q][(m, j)]).re * kern);
            if nu <= tol {
                zero += w;
            } else {
                positive.push((nu, w));
            }
        }
    }
    positive.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut clusters: Vec<(f64, f64, RMat)> = Vec::new(); // (anchor, weighted nu sum, weight)
    for (nu, w) in positive {
        match clusters.last_mut() {
            Some((anchor, _, acc)) if nu - *anchor <= tol => {
                *acc += w;
            }
            _ => clusters.push((nu, nu, w)),
        }
    }
    let mut atoms = Vec::with_capacity(2 * clusters.len() + 1);
    for (nu, _, w) in clusters.iter().rev() {
        atoms.push(Atom { nu: -nu, weight: w.clone() });
    }
    if zero.amax() > 0.0 || !clusters.is_empty() {
        atoms.push(Atom { nu: 0.0, weight: zero });
    }
    for (nu, _, w) in clusters {
        atoms.push(Atom { nu, weight: w });
    }
    if bx.ball(l).is_empty() {
        return Ok(SpectralMeasure::empty(d));
    }
    Ok(SpectralMeasure { dim: d, atoms })
}

/// Xi(t) = int (cos(t nu) - 1) mu(d nu).
pub fn eval_xi_from_measure(mu: &SpectralMeasure, times: &[f64], meta: KernelMeta) -> TransportKernel {
    let values = crate::par_map(times, |&t| {
        mu.atoms.iter().fold(RMat::zeros(mu.dim, mu.dim), |acc, a| acc + &a.weight * ((t * a.nu).cos() - 1.0))
    });
    TransportKernel { times: times.to_vec(), values, meta }
}

fn op_norm(m: &RMat) -> f64 {
    let sym = (m + m.transpose()) * 0.5;
    SymmetricEigen::new(sym).eigenvalues.iter().fold(0.0f64, |a, v| a.max(v.abs()))
}

/// (sum ||M_j||, sum |nu_j| ||M_j||).
pub fn moment_norms(mu: &SpectralMeasure) -> (f64, f64) {
    mu.atoms.iter().fold((0.0, 0.0), |(m0, m1), a| {
        let n = op_norm(&a.weight);
        (m0 + n, m1 + a.nu.abs() * n)
    })
}

/// The three first-moment bounds, right-hand sides evaluated from the
/// equilibrium second moments of the current sums and their generators.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentBounds {
    pub mass: f64,
    pub first_moment: f64,
    pub mass_bound: f64,
    pub first_moment_bound: f64,
    pub first_moment_generator_bound: f64,
    pub beta: f64,
}

impl MomentBounds {
    /// Slack of each inequality (non-negative when it holds).
    pub fn slacks(&self) -> [f64; 3] {
        [
            self.mass_bound - self.mass,
            self.first_moment_bound - self.first_moment,
            self.first_moment_generator_bound - self.first_moment,
        ]
    }

    /// Mass bound with the Duhamel product rescaled by 1/beta.
    pub fn normalized_mass_slack(&self) -> f64 {
        self.mass_bound - self.mass / self.beta
    }
}

pub fn moment_bounds(mu: &SpectralMeasure, d_sym: &DensityMatrix, h: &nalgebra::DMatrix<num_complex::Complex64>, bx: &LatticeBox, l: usize) -> Result<MomentBounds> {
    let (mass, first_moment) = moment_norms(mu);
    let vol = bx.ball(l).len() as f64;
    let mut sq = 0.0;
    let mut gen = 0.0;
    for k in 0..bx.d {
        let cur = current_operator(bx, k, l)?.centred(d_sym)?;
        let omega_i2 = expectation_product(d_sym, &cur, &cur)?.re;
        let di: QuadraticObservable = cur.generator(h);
        let omega_di2 = expectation_product(d_sym, &di, &di)?.re;
        sq += omega_i2;
        gen += omega_i2.max(0.0).sqrt() * omega_di2.max(0.0).sqrt();
    }
    Ok(MomentBounds {
        mass,
        first_moment,
        mass_bound: sq / vol,
        first_moment_bound: 2.0 * sq / vol,
        first_moment_generator_bound: 2.0 * gen / vol,
        beta: d_sym.beta,
    })
}

/// mu_Lambda = mu_p + (Xi_d - mu_p(R)) delta_0.
pub fn full_conductivity_measure(mu_p: &SpectralMeasure, xi_d: &RMat) -> SpectralMeasure {
    let extra = xi_d - mu_p.total();
    let mut atoms = mu_p.atoms.clone();
    match atoms.iter_mut().find(|a| a.nu == 0.0) {
        Some(a) => a.weight += extra,
        None => {
            let pos = atoms.iter().position(|a| a.nu > 0.0).unwrap_or(atoms.len());
            atoms.insert(pos, Atom { nu: 0.0, weight: extra });
        }
    }
    SpectralMeasure { dim: mu_p.dim, atoms }
}

/// Static admittance at regularization eps, reported with the sign that makes
/// its eps -> 0 limit equal to mu_p(R \ {0}):
/// -Xi_d L[V](eps) = sum_nu nu^2 / (nu^2 + eps^2) M_nu.
pub fn static_admittance(mu: &SpectralMeasure, eps: f64) -> Result<RMat> {
    if !(eps > 0.0) {
        return Err(Error::Domain(format!("eps = {eps} must be positive")));
    }
    Ok(mu.atoms.iter().fold(RMat::zeros(mu.dim, mu.dim), |acc, a| {
        let nu2 = a.nu * a.nu;
        acc + &a.weight * (nu2 / (nu2 + eps * eps))
    }))
}

/// eps -> 0 limit of `static_admittance`, taken on the atoms directly.
pub fn static_admittance_limit(mu: &SpectralMeasure) -> RMat {
    mu.off_zero()
}

/// Quadrature variant: -Xi_d int_0^T e^{-eps s} V(s) ds on the kernel grid.
pub fn static_admittance_quadrature(xi_d: &RMat, visc: &TransportKernel, eps: f64) -> Result<RMat> {
    if !(eps > 0.0) {
        return Err(Error::Domain(format!("eps = {eps} must be positive")));
    }
    let h = visc.step()?;
    let d = visc.dim();
    let w = crate::quad::simpson_weights(visc.times.len() - 1, h);
    let mut acc = RMat::zeros(d, d);
    for ((t, v), wi) in visc.times.iter().zip(&visc.values).zip(w) {
        acc += v * ((-eps * (t - visc.times[0])).exp() * wi);
    }
    Ok(-(xi_d * acc))
}

/// Three-point Richardson extrapolation for a sequence eps, eps/2, eps/4 of a
/// quantity with an expansion a + b eps + c eps^2.
pub fn richardson3(v: [f64; 3]) -> f64 {
    let r1 = 2.0 * v[1] - v[0];
    let r2 = 2.0 * v[2] - v[1];
    (4.0 * r2 - r1) / 3.0
}

/// (1/T) int_0^T Xi_p(s) ds by the trapezoid rule on the kernel grid.
pub fn cesaro_mean(xi_p: &TransportKernel, t_max: f64) -> Result<RMat> {
    let h = xi_p.step()?;
    let last = *xi_p.times.last().unwrap();
    if t_max > last + 1e-9 * h || t_max <= xi_p.times[0] {
        return Err(Error::Domain(format!("T = {t_max} not covered by the grid ending at {last}")));
    }
    let d = xi_p.dim();
    let m = ((t_max - xi_p.times[0]) / h).round() as usize;
    let mut acc = RMat::zeros(d, d);
    for i in 0..=m {
        let w = if i == 0 || i == m { 0.5 * h } else { h };
        acc += &xi_p.values[i] * w;
    }
    Ok(acc / (m as f64 * h))
}

/// Exact Cesaro mean from the atoms: sum_nu (sin(nu T) / (nu T) - 1) M_nu.
pub fn cesaro_mean_atoms(mu: &SpectralMeasure, t_max: f64) -> RMat {
    mu.atoms.iter().fold(RMat::zeros(mu.dim, mu.dim), |acc, a| {
        let x = a.nu * t_max;
        let sinc = if x == 0.0 { 1.0 } else { x.sin() / x };
        acc + &a.weight * (sinc - 1.0)
    })
}

/// Smeared pairing int E(nu) <w, mu_p(d nu) w> rebuilt from the viscosity:
/// (1/pi) int d nu int_0^inf ds (eps cos(nu s) - nu sin(nu s)) e^{-eps s}
/// / (nu^2 + eps^2) E(nu) <w, Xi_d V(s) w>, extrapolated to eps = 0.
///
/// E is supported on `support`; the s-integral runs over the viscosity grid,
/// which must be long enough for e^{-eps s} to decay.
pub fn reconstruct_from_viscosity<F: Fn(f64) -> f64 + Sync>(
    xi_d: &RMat,
    visc: &TransportKernel,
    w: &[f64],
    e_hat: F,
    support: (f64, f64),
    eps_seq: [f64; 3],
    nu_nodes: usize,
) -> Result<f64> {
    if e_hat(0.0) != 0.0 {
        return Err(Error::Domain("test function must vanish at zero frequency".into()));
    }
    let h = visc.step()?;
    let d = visc.dim();
    let proj: Vec<f64> = visc
        .values
        .iter()
        .map(|v| {
            let m = xi_d * v;
            let mut s = 0.0;
            for k in 0..d {
                for q in 0..d {
                    s += w[k] * m[(k, q)] * w[q];
                }
            }
            s
        })
        .collect();
    let sw = crate::quad::simpson_weights(proj.len() - 1, h);
    let gl = crate::quad::GaussLegendre::new(8);
    let panels = nu_nodes.div_ceil(8).max(1);
    let nus = gl.composite_nodes(support.0, support.1, panels);
    let mut vals = [0.0; 3];
    for (slot, &eps) in vals.iter_mut().zip(&eps_seq) {
        let inner: Vec<f64> = crate::par_map(&nus, |&(nu, wn)| {
            let en = e_hat(nu);
            if en == 0.0 {
                return 0.0;
            }
            let mut acc = 0.0;
            for (i, (&p, &wi)) in proj.iter().zip(&sw).enumerate() {
                let s = visc.times[i] - visc.times[0];
                let (sn, cs) = (nu * s).sin_cos();
                acc += wi * p * (eps * cs - nu * sn) * (-eps * s).exp();
            }
            wn * en * acc / (nu * nu + eps * eps)
        });
        *slot = inner.iter().sum::<f64>() / std::f64::consts::PI;
    }
    Ok(richardson3(vals))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Nontriviality {
    pub nontrivial: bool,
    pub trace_off_zero: f64,
    pub generator_norms: Vec<f64>,
}

/// tr mu_p(R \ {0}) > threshold, with the Frobenius norms of delta(I_{k,l}).
pub fn nontriviality_check(mu: &SpectralMeasure, h: &nalgebra::DMatrix<num_complex::Complex64>, bx: &LatticeBox, l: usize, threshold: f64) -> Result<Nontriviality> {
    let trace_off_zero = mu.off_zero().trace();
    let generator_norms = (0..bx.d)
        .map(|k| Ok(current_operator(bx, k, l)?.generator(h).coef.norm()))
        .collect::<Result<Vec<f64>>>()?;
    Ok(Nontriviality { nontrivial: !mu.atoms.is_empty() && trace_off_zero > threshold, trace_off_zero, generator_norms })
}
