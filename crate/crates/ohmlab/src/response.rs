//! Linear response: conductivity kernels, time-domain and Fourier-space Ohm
//! currents, the Hilbert transform, and the heat form with its resistivity.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{FieldProfile, RMat};
use crate::measure::SpectralMeasure;
use crate::quad::{simpson_weights, GaussLegendre};
use crate::transport::TransportKernel;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Sigma(t) on a symmetric grid: causal part and its (anti)symmetrizations.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaKernel {
    pub times: Vec<f64>,
    pub causal: Vec<RMat>,
    pub plus: Vec<RMat>,
    pub minus: Vec<RMat>,
}

/// Sigma(t) = 0 for t < 0 and Xi_d + Xi_p(t) for t >= 0, on the grid
/// -T..T mirrored from the non-negative grid of `xi_p`.
pub fn sigma_kernel(xi_p: &TransportKernel, xi_d: &RMat) -> Result<SigmaKernel> {
    xi_p.step()?;
    if xi_p.times[0] != 0.0 {
        return Err(Error::Domain("paramagnetic kernel grid must start at t = 0".into()));
    }
    if xi_d.nrows() != xi_p.dim() {
        return Err(Error::Dimension(format!("Xi_d is {}x{}, kernel has d = {}", xi_d.nrows(), xi_d.ncols(), xi_p.dim())));
    }
    let m = xi_p.times.len();
    let d = xi_p.dim();
    let mut out = SigmaKernel { times: vec![], causal: vec![], plus: vec![], minus: vec![] };
    for j in 0..(2 * m - 1) {
        let (idx, sign) = if j + 1 < m { (m - 1 - j, -1.0) } else { (j + 1 - m, 1.0) };
        let t = sign * xi_p.times[idx];
        let full = xi_d + &xi_p.values[idx];
        out.times.push(t);
        out.plus.push(full.clone());
        if t < 0.0 {
            out.causal.push(RMat::zeros(d, d));
            out.minus.push(-full);
        } else if t == 0.0 {
            out.causal.push(full);
            out.minus.push(RMat::zeros(d, d));
        } else {
            out.causal.push(full.clone());
            out.minus.push(full);
        }
    }
    Ok(out)
}

/// (J_p, J_d, J_p + J_d) at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearCurrents {
    pub jp: Vec<f64>,
    pub jd: Vec<f64>,
    pub total: Vec<f64>,
}

fn mat_vec(m: &RMat, w: &[f64]) -> Vec<f64> {
    (0..m.nrows()).map(|k| (0..m.ncols()).map(|q| m[(k, q)] * w[q]).sum()).collect()
}

/// Convolutions J_p(t) = int_{t0}^t Xi_p(t - s) w E(s) ds (Simpson on the
/// kernel grid) and J_d(t) = Xi_d w int_{t0}^t E, for a generic field given
/// with its running integral.
pub fn linear_currents_with(
    xi_p: &TransportKernel,
    xi_d: &RMat,
    w: &[f64],
    efield: &(dyn Fn(f64) -> f64 + Sync),
    efield_integral: &(dyn Fn(f64) -> f64 + Sync),
    t0: f64,
    times: &[f64],
) -> Result<Vec<LinearCurrents>> {
    let h = xi_p.step()?;
    let d = xi_p.dim();
    if w.len() != d || xi_d.nrows() != d {
        return Err(Error::Dimension(format!("direction has {} components, kernel d = {d}", w.len())));
    }
    let xw: Vec<Vec<f64>> = xi_p.values.iter().map(|m| mat_vec(m, w)).collect();
    let dw = mat_vec(xi_d, w);
    crate::par_map(times, |&t| {
        let mut jp = vec![0.0; d];
        if t > t0 {
            let steps = (t - t0) / h;
            let m = steps.round() as usize;
            if (steps - m as f64).abs() > 1e-6 {
                return Err(Error::Domain(format!("t - t0 = {} is not a multiple of the kernel step {h}", t - t0)));
            }
            if m >= xi_p.times.len() {
                return Err(Error::Domain(format!("kernel grid ends before lag {}", t - t0)));
            }
            let wts = simpson_weights(m, h);
            for (j, wt) in wts.iter().enumerate() {
                let e = efield(t0 + j as f64 * h);
                if e == 0.0 {
                    continue;
                }
                for k in 0..d {
                    jp[k] += wt * xw[m - j][k] * e;
                }
            }
        }
        let ie = if t > t0 { efield_integral(t) } else { 0.0 };
        let jd: Vec<f64> = dw.iter().map(|v| v * ie).collect();
        let total = jp.iter().zip(&jd).map(|(a, b)| a + b).collect();
        Ok(LinearCurrents { jp, jd, total })
    })
    .into_iter()
    .collect()
}

pub fn linear_currents_series(xi_p: &TransportKernel, xi_d: &RMat, field: &FieldProfile, times: &[f64]) -> Result<Vec<LinearCurrents>> {
    let e = |t: f64| field.efield(t);
    let ie = |t: f64| -field.potential(t);
    linear_currents_with(xi_p, xi_d, &field.w, &e, &ie, field.t0, times)
}

pub fn linear_currents(xi_p: &TransportKernel, xi_d: &RMat, field: &FieldProfile, t: f64) -> Result<LinearCurrents> {
    Ok(linear_currents_series(xi_p, xi_d, field, &[t])?.remove(0))
}

/// Work done by the field on the out-of-phase current,
/// int <E_t w, (1/2) int Sigma_-(t - s) w E_s ds> dt, by tensor Gauss
/// quadrature over the pulse window. Sigma(|u|) is the cosine transform of
/// the full measure. Returns (work, scale) with scale the same integral
/// taken in absolute value.
pub fn out_of_phase_work(mu_full: &SpectralMeasure, field: &FieldProfile, panels: usize) -> (f64, f64) {
    let gl = GaussLegendre::new(16);
    let nodes = gl.composite_nodes(field.t0, field.t1, panels.max(1));
    let proj = mu_full.project(&field.w);
    let sigma = |u: f64| proj.iter().map(|&(nu, m)| m * (nu * u).cos()).sum::<f64>();
    let es: Vec<f64> = nodes.iter().map(|&(t, _)| field.efield(t)).collect();
    let mut work = 0.0;
    let mut scale = 0.0;
    for (i, &(t, wt)) in nodes.iter().enumerate() {
        for (j, &(s, ws)) in nodes.iter().enumerate() {
            let u = t - s;
            let minus = if u > 0.0 { sigma(u) } else if u < 0.0 { -sigma(-u) } else { 0.0 };
            let v = 0.5 * wt * ws * es[i] * es[j] * minus;
            work += v;
            scale += v.abs();
        }
    }
    (work, scale)
}

fn check_symmetric_grid(grid: &[f64]) -> Result<f64> {
    let n = grid.len();
    if n < 8 {
        return Err(Error::Domain("Hilbert grid needs at least 8 nodes".into()));
    }
    let h = (grid[n - 1] - grid[0]) / (n - 1) as f64;
    let span = grid[n - 1] - grid[0];
    for (j, &v) in grid.iter().enumerate() {
        if (v - (grid[0] + j as f64 * h)).abs() > 1e-9 * span {
            return Err(Error::Domain("Hilbert grid is not uniform".into()));
        }
    }
    if (grid[0] + grid[n - 1]).abs() > 1e-9 * span {
        return Err(Error::Domain("Hilbert grid is not symmetric".into()));
    }
    Ok(h)
}

/// H(f)(nu) = -(1/pi) PV int f(nu - x) / x dx on a uniform symmetric grid, by
/// the odd-offset rule H(f)_j = -(2h/pi) sum_{k - j odd} f_k / (nu_j - nu_k).
pub fn hilbert_transform(grid: &[f64], f: &[Complex64]) -> Result<Vec<Complex64>> {
    check_symmetric_grid(grid)?;
    if f.len() != grid.len() {
        return Err(Error::Dimension(format!("{} samples on {} nodes", f.len(), grid.len())));
    }
    let n = grid.len();
    let c = -2.0 / std::f64::consts::PI;
    let idx: Vec<usize> = (0..n).collect();
    Ok(crate::par_map(&idx, |&j| {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut k = if j % 2 == 0 { 1 } else { 0 };
        while k < n {
            // h / (nu_j - nu_k) = 1 / (j - k)
            acc += f[k] / (j as f64 - k as f64);
            k += 2;
        }
        acc * c
    })
    )
}

/// 8-point Lagrange interpolation on a uniform grid.
pub fn interpolate(grid: &[f64], f: &[Complex64], x: f64) -> Complex64 {
    let n = grid.len();
    let h = grid[1] - grid[0];
    let pos = (x - grid[0]) / h;
    let start = (pos.floor() as i64 - 3).clamp(0, n as i64 - 8) as usize;
    let mut acc = Complex64::new(0.0, 0.0);
    for i in start..start + 8 {
        let mut li = 1.0;
        for j in start..start + 8 {
            if j != i {
                li *= (pos - j as f64) / (i as f64 - j as f64);
            }
        }
        acc += f[i] * li;
    }
    acc
}

/// Fourier transform of E as a reusable quadrature.
pub struct FieldSpectrum<'a> {
    field: &'a FieldProfile,
    nodes: Vec<(f64, f64)>,
    values: Vec<f64>,
}

impl<'a> FieldSpectrum<'a> {
    pub fn new(field: &'a FieldProfile, max_freq: f64) -> Self {
        let gl = GaussLegendre::new(16);
        let width = field.t1 - field.t0;
        let panels = ((width * (max_freq.abs() + field.carrier + 8.0) / 6.0).ceil() as usize).max(8);
        let nodes = gl.composite_nodes(field.t0, field.t1, panels);
        let values = nodes.iter().map(|&(s, _)| field.efield(s)).collect();
        FieldSpectrum { field, nodes, values }
    }

    /// int E(s) exp(-i nu s) ds.
    pub fn at(&self, nu: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (&(s, w), &e) in self.nodes.iter().zip(&self.values) {
            if e != 0.0 {
                acc += w * e * Complex64::from_polar(1.0, -nu * s);
            }
        }
        acc
    }

    /// int E(s) exp(-i nu (t - s)) ds = exp(-i nu t) conj(E^(nu)).
    pub fn shifted(&self, nu: f64, t: f64) -> Complex64 {
        Complex64::from_polar(1.0, -nu * t) * self.at(nu).conj()
    }

    pub fn field(&self) -> &FieldProfile {
        self.field
    }
}

/// Smallest R >= 1.5 D (D the largest atom frequency) at which the field
/// spectrum has fallen below 1e-9 of its peak.
pub fn hilbert_range(mu: &SpectralMeasure, field: &FieldProfile) -> f64 {
    let diameter = mu.atoms.iter().fold(0.0f64, |a, at| a.max(at.nu.abs())).max(1.0);
    let probe = FieldSpectrum::new(field, 4096.0);
    let peak = (0..200).map(|i| probe.at(field.carrier * i as f64 / 100.0).norm()).fold(0.0, f64::max);
    let mut r = 1.5 * diameter;
    while r < 4096.0 {
        let tail = [0.9 * r, r, 1.1 * r].iter().map(|&v| probe.at(v).norm()).fold(0.0, f64::max);
        if tail <= 1e-9 * peak {
            break;
        }
        r *= 1.25;
    }
    r
}

pub fn symmetric_grid(r: f64, n: usize) -> Vec<f64> {
    (0..n).map(|j| -r + 2.0 * r * j as f64 / (n - 1) as f64).collect()
}

/// Ohm current from the measure with the Hilbert transform on a fixed grid.
fn fourier_current_on(mu: &SpectralMeasure, spec: &FieldSpectrum, t: f64, r: f64, n: usize) -> Result<Vec<f64>> {
    let grid = symmetric_grid(r, n);
    let g: Vec<Complex64> = crate::par_map(&grid, |&nu| spec.shifted(nu, t));
    let hg = hilbert_transform(&grid, &g)?;
    let w = &spec.field().w;
    let d = mu.dim;
    let mut acc = vec![Complex64::new(0.0, 0.0); d];
    for a in &mu.atoms {
        let mw = mat_vec(&a.weight, w);
        let gv = spec.shifted(a.nu, t);
        let hv = interpolate(&grid, &hg, a.nu);
        for k in 0..d {
            acc[k] += 0.5 * mw[k] * gv + 0.5 * I * mw[k] * hv;
        }
    }
    Ok(acc.iter().map(|v| v.re).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct FourierCurrent {
    pub current: Vec<f64>,
    pub grid_tolerance: f64,
    pub range: f64,
    pub nodes: usize,
}

/// (1/2) int E^(t) mu(d nu) w + (i/2) int H(E^(t)) mu(d nu) w for the full
/// conductivity measure, with E^(t)(nu) = int E_s exp(-i nu (t - s)) ds.
/// The grid tolerance compares against doubled resolution and doubled range.
pub fn fourier_ohm_current(mu_full: &SpectralMeasure, field: &FieldProfile, t: f64, nodes: usize) -> Result<FourierCurrent> {
    if field.w.len() != mu_full.dim {
        return Err(Error::Dimension("field direction does not match the measure".into()));
    }
    let r = hilbert_range(mu_full, field);
    let spec = FieldSpectrum::new(field, 2.0 * r);
    let base = fourier_current_on(mu_full, &spec, t, r, nodes)?;
    let fine = fourier_current_on(mu_full, &spec, t, r, 2 * nodes)?;
    let wide = fourier_current_on(mu_full, &spec, t, 2.0 * r, 2 * nodes)?;
    let tol = base
        .iter()
        .zip(&fine)
        .zip(&wide)
        .map(|((b, f), w)| (b - f).abs().max((b - w).abs()))
        .fold(0.0, f64::max);
    Ok(FourierCurrent { current: base, grid_tolerance: tol, range: r, nodes })
}

/// Kramers-Kronig residuals for the functionals mu_par(f) = int f <w, mu w>
/// and mu_perp(f) = int H(f) <w, mu w> on grid samples f:
/// (|mu_par(H f) - mu_perp(f)|, |mu_perp(H f) + mu_par(f)|), relative to
/// max|f| times the total variation of the projected measure.
pub fn kramers_kronig_residuals(mu: &SpectralMeasure, w: &[f64], grid: &[f64], f: &[Complex64]) -> Result<(f64, f64)> {
    let hf = hilbert_transform(grid, f)?;
    let hhf = hilbert_transform(grid, &hf)?;
    let proj = mu.project(w);
    let pair = |s: &[Complex64]| proj.iter().map(|&(nu, m)| m * interpolate(grid, s, nu)).sum::<Complex64>();
    let scale = proj.iter().map(|p| p.1.abs()).sum::<f64>() * f.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let scale = if scale > 0.0 { scale } else { 1.0 };
    let par_h = pair(&hf);
    let perp = pair(&hf);
    let perp_h = pair(&hhf);
    let par = pair(f);
    Ok(((par_h - perp).norm() / scale, (perp_h + par).norm() / scale))
}

/// max over the central half of the grid of |H(H f) + f| / max|f|.
pub fn hilbert_involution_defect(grid: &[f64], f: &[Complex64]) -> Result<f64> {
    let hhf = hilbert_transform(grid, &hilbert_transform(grid, f)?)?;
    let r = grid[grid.len() - 1];
    let peak = f.iter().map(|v| v.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    Ok(grid
        .iter()
        .enumerate()
        .filter(|(_, v)| v.abs() <= 0.5 * r)
        .map(|(j, _)| (hhf[j] + f[j]).norm())
        .fold(0.0, f64::max)
        / peak)
}

/// Finite cosine/sine basis on a window; every element integrates to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ACFieldSpace {
    pub start: f64,
    pub end: f64,
    pub modes: usize,
}

impl ACFieldSpace {
    pub fn new(start: f64, end: f64, modes: usize) -> Result<Self> {
        if !(end > start) || modes == 0 {
            return Err(Error::Domain("AC field space needs a non-empty window and at least one mode".into()));
        }
        Ok(ACFieldSpace { start, end, modes })
    }

    /// Number of basis functions (a cosine and a sine per mode).
    pub fn dim(&self) -> usize {
        2 * self.modes
    }

    fn omega(&self, j: usize) -> f64 {
        2.0 * std::f64::consts::PI * (j / 2 + 1) as f64 / (self.end - self.start)
    }

    pub fn basis(&self, j: usize, t: f64) -> f64 {
        if t < self.start || t >= self.end {
            return 0.0;
        }
        let x = self.omega(j) * (t - self.start);
        if j.is_multiple_of(2) {
            x.cos()
        } else {
            x.sin()
        }
    }

    pub fn synthesize(&self, c: &[f64], t: f64) -> f64 {
        c.iter().enumerate().map(|(j, cj)| cj * self.basis(j, t)).sum()
    }

    /// Closed-form Fourier transform int e_j(t) exp(-i nu t) dt.
    pub fn basis_fourier(&self, j: usize, nu: f64) -> Complex64 {
        let width = self.end - self.start;
        let om = self.omega(j);
        // int_0^T exp(i k u) du = T exp(i k T / 2) sinc(k T / 2)
        let q = |k: f64| {
            let x = 0.5 * k * width;
            let sinc = if x.abs() < 1e-4 { 1.0 - x * x / 6.0 } else { x.sin() / x };
            Complex64::from_polar(width * sinc, x)
        };
        let (p, m) = (q(om - nu), q(-om - nu));
        let local = if j.is_multiple_of(2) { 0.5 * (p + m) } else { (p - m) / (2.0 * I) };
        Complex64::from_polar(1.0, -nu * self.start) * local
    }

    pub fn fourier(&self, c: &[f64], nu: f64) -> Complex64 {
        c.iter().enumerate().map(|(j, cj)| *cj * self.basis_fourier(j, nu)).sum()
    }
}

/// Heat form Q(E) = (1/2) int |E^(nu)|^2 <w, mu_p(d nu) w> on an AC space.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticFormQ {
    pub matrix: DMatrix<f64>,
    pub w: Vec<f64>,
    pub space: ACFieldSpace,
}

pub fn heat_form(mu_p: &SpectralMeasure, w: &[f64], space: &ACFieldSpace) -> Result<QuadraticFormQ> {
    if w.len() != mu_p.dim {
        return Err(Error::Dimension("direction does not match the measure".into()));
    }
    let m = space.dim();
    let proj = mu_p.project(w);
    let rows: Vec<Vec<Complex64>> = crate::par_map(&proj, |&(nu, _)| (0..m).map(|j| space.basis_fourier(j, nu)).collect());
    let mut g = DMatrix::zeros(m, m);
    for ((_, weight), e) in proj.iter().zip(&rows) {
        for i in 0..m {
            for j in i..m {
                let v = 0.5 * weight * (e[i] * e[j].conj()).re;
                g[(i, j)] += v;
                if i != j {
                    g[(j, i)] += v;
                }
            }
        }
    }
    Ok(QuadraticFormQ { matrix: g, w: w.to_vec(), space: space.clone() })
}

impl QuadraticFormQ {
    pub fn value(&self, c: &[f64]) -> f64 {
        let v = DVector::from_column_slice(c);
        v.dot(&(&self.matrix * &v))
    }

    pub fn seminorm(&self, c: &[f64]) -> f64 {
        self.value(c).max(0.0).sqrt()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        SymmetricEigen::new(self.matrix.clone()).eigenvalues.min()
    }
}

/// Time-domain form (1/2) int int <w, Xi_p(t - s) w> E_t E_s dt ds, with Xi_p
/// the cosine transform of the measure, by tensor Gauss quadrature.
pub fn heat_form_time_domain(mu_p: &SpectralMeasure, space: &ACFieldSpace, w: &[f64], c: &[f64], panels: usize) -> f64 {
    let gl = GaussLegendre::new(16);
    let nodes = gl.composite_nodes(space.start, space.end, panels);
    let proj = mu_p.project(w);
    let xi = |u: f64| proj.iter().map(|&(nu, m)| m * ((nu * u).cos() - 1.0)).sum::<f64>();
    let e: Vec<f64> = nodes.iter().map(|&(t, _)| space.synthesize(c, t)).collect();
    let idx: Vec<usize> = (0..nodes.len()).collect();
    let rows: Vec<f64> = crate::par_map(&idx, |&i| {
        let (t, wt) = nodes[i];
        nodes.iter().zip(&e).map(|(&(s, ws), es)| wt * ws * e[i] * es * xi(t - s)).sum::<f64>()
    });
    0.5 * rows.iter().sum::<f64>()
}

/// Current functional J_E with <J_E, E~> = c~^T G c.
pub fn conductivity_map(q: &QuadraticFormQ, c: &[f64]) -> Vec<f64> {
    (&q.matrix * DVector::from_column_slice(c)).as_slice().to_vec()
}

#[derive(Debug, Clone, PartialEq)]
pub enum Resistivity {
    Field { coefficients: Vec<f64>, dual_value: f64 },
    OutsideDomain { residual: f64 },
}

/// Pseudo-inverse of the heat form on its range.
#[derive(Debug, Clone)]
pub struct Resistor {
    pinv: DMatrix<f64>,
    range: DMatrix<f64>,
}

pub const PINV_THRESHOLD: f64 = 1e-9;

impl Resistor {
    pub fn new(q: &QuadraticFormQ) -> Self {
        let m = q.matrix.nrows();
        let eig = SymmetricEigen::new(q.matrix.clone());
        let top = eig.eigenvalues.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let mut pinv = DMatrix::zeros(m, m);
        let mut range = DMatrix::zeros(m, m);
        for (k, &lam) in eig.eigenvalues.iter().enumerate() {
            if top > 0.0 && lam > PINV_THRESHOLD * top {
                let v = eig.eigenvectors.column(k);
                pinv += (v * v.transpose()) / lam;
                range += v * v.transpose();
            }
        }
        Resistor { pinv, range }
    }

    /// rho(J), or the outside-domain signal when J leaves range(Q) by more
    /// than the threshold (relative to |J|).
    pub fn resistivity(&self, j: &[f64]) -> Resistivity {
        let jv = DVector::from_column_slice(j);
        let norm = jv.norm();
        let residual = (&jv - &self.range * &jv).norm();
        if residual > PINV_THRESHOLD * norm.max(f64::MIN_POSITIVE) && residual > 0.0 {
            return Resistivity::OutsideDomain { residual };
        }
        let rho = &self.pinv * &jv;
        Resistivity::Field { dual_value: jv.dot(&rho), coefficients: rho.as_slice().to_vec() }
    }

    /// (J1, J2)* = J1^T G^+ J2; Q*(J) on the diagonal.
    pub fn dual_bilinear(&self, j1: &[f64], j2: &[f64]) -> f64 {
        DVector::from_column_slice(j1).dot(&(&self.pinv * DVector::from_column_slice(j2)))
    }

    pub fn dual_form(&self, j: &[f64]) -> f64 {
        self.dual_bilinear(j, j)
    }
}

pub fn resistivity_map(q: &QuadraticFormQ, j: &[f64]) -> Resistivity {
    Resistor::new(q).resistivity(j)
}
