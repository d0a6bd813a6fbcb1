//! Current and adjacency observables, paramagnetic and diamagnetic transport
//! coefficients, and the current viscosity.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{CMat, LatticeBox, Potential, RMat};
use crate::quad::GaussLegendre;
use crate::spectral::{duhamel_time_correlation, expectation_quadratic, pair_kernel, DensityMatrix, EigenSystem, QuadraticObservable};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct KernelMeta {
    pub beta: f64,
    pub lambda: f64,
    pub l: usize,
    pub seed: u64,
}

/// d x d matrices sampled on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportKernel {
    pub times: Vec<f64>,
    pub values: Vec<RMat>,
    pub meta: KernelMeta,
}

impl TransportKernel {
    pub fn dim(&self) -> usize {
        self.values.first().map_or(0, |m| m.nrows())
    }

    pub fn step(&self) -> Result<f64> {
        if self.times.len() < 2 {
            return Err(Error::Domain("kernel needs at least two samples".into()));
        }
        let h = self.times[1] - self.times[0];
        let uniform = self
            .times
            .windows(2)
            .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.abs().max(1e-300));
        if !uniform || h <= 0.0 {
            return Err(Error::Domain("time grid is not uniform and increasing".into()));
        }
        Ok(h)
    }
}

/// Bond sample: sigma(x, y, t) on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct BondCoefficient {
    pub x: (usize, usize),
    pub y: (usize, usize),
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

/// I_x = i(a*_{x2} a_{x1} - a*_{x1} a_{x2}) for the bond x = (x1, x2).
pub fn bond_current(n: usize, x1: usize, x2: usize) -> QuadraticObservable {
    let mut b = CMat::zeros(n, n);
    add_current(&mut b, x1, x2, 1.0);
    QuadraticObservable::new(b)
}

/// P_x = -a*_{x2} a_{x1} - a*_{x1} a_{x2}.
pub fn bond_adjacency(n: usize, x1: usize, x2: usize) -> QuadraticObservable {
    let mut b = CMat::zeros(n, n);
    add_adjacency(&mut b, x1, x2, 1.0);
    QuadraticObservable::new(b)
}

fn add_current(b: &mut CMat, x1: usize, x2: usize, s: f64) {
    b[(x2, x1)] += Complex64::new(0.0, s);
    b[(x1, x2)] += Complex64::new(0.0, -s);
}

fn add_adjacency(b: &mut CMat, x1: usize, x2: usize, s: f64) {
    b[(x2, x1)] -= Complex64::new(s, 0.0);
    b[(x1, x2)] -= Complex64::new(s, 0.0);
}

fn check_radius(bx: &LatticeBox, k: usize, l: usize) -> Result<()> {
    if k >= bx.d {
        return Err(Error::Domain(format!("direction {k} in dimension {}", bx.d)));
    }
    if l >= bx.radius {
        return Err(Error::Domain(format!(
            "averaging radius {l} does not fit strictly inside the box of radius {}",
            bx.radius
        )));
    }
    Ok(())
}

/// Oriented bonds (x + e_k, x), x in Lambda_l.
pub fn averaging_bonds(bx: &LatticeBox, k: usize, l: usize) -> Result<Vec<(usize, usize)>> {
    check_radius(bx, k, l)?;
    Ok(bx
        .ball(l)
        .into_iter()
        .map(|x| (bx.shift(x, k, 1).expect("ball lies strictly inside the box"), x))
        .collect())
}

/// Current sum I_{k,l} = sum_{x in Lambda_l} I_{(x+e_k, x)}.
pub fn current_operator(bx: &LatticeBox, k: usize, l: usize) -> Result<QuadraticObservable> {
    let mut b = CMat::zeros(bx.n_sites(), bx.n_sites());
    for (x1, x2) in averaging_bonds(bx, k, l)? {
        add_current(&mut b, x1, x2, 1.0);
    }
    Ok(QuadraticObservable::new(b))
}

/// Adjacency sum P_{k,l} = sum_{x in Lambda_l} P_{(x+e_k, x)}.
pub fn adjacency_operator(bx: &LatticeBox, k: usize, l: usize) -> Result<QuadraticObservable> {
    let mut b = CMat::zeros(bx.n_sites(), bx.n_sites());
    for (x1, x2) in averaging_bonds(bx, k, l)? {
        add_adjacency(&mut b, x1, x2, 1.0);
    }
    Ok(QuadraticObservable::new(b))
}

/// sigma_p(x, y, t) = int_0^t omega(i[I_y, tau_s(I_x)]) ds
///                  = (I_y, tau_t(I_x))_~ - (I_y, I_x)_~.
pub fn sigma_para(es: &EigenSystem, beta: f64, x: (usize, usize), y: (usize, usize), times: &[f64]) -> Result<BondCoefficient> {
    let n = es.dim();
    let ix = bond_current(n, x.0, x.1);
    let iy = bond_current(n, y.0, y.1);
    let mut all = vec![0.0];
    all.extend_from_slice(times);
    let c = duhamel_time_correlation(es, beta, &iy, &ix, &all)?;
    let values = c[1..].iter().map(|v| (v - c[0]).re).collect();
    Ok(BondCoefficient { x, y, times: times.to_vec(), values })
}

/// sigma_d(x) = omega(P_x).
pub fn sigma_dia(d: &DensityMatrix, x: (usize, usize)) -> Result<f64> {
    let p = bond_adjacency(d.matrix.nrows(), x.0, x.1);
    Ok(expectation_quadratic(d, &p)?.re)
}

/// Eigenbasis current matrices for every direction.
pub fn eigen_currents(es: &EigenSystem, bx: &LatticeBox, l: usize) -> Result<Vec<CMat>> {
    (0..bx.d).map(|k| Ok(es.to_eigenbasis(&current_operator(bx, k, l)?.coef))).collect()
}

/// Xi_p(t)_{kq} = |Lambda_l|^{-1} [(I_k, tau_t I_q)_~ - (I_k, I_q)_~],
/// evaluated with the closed-form Kubo-Mori kernel.
pub fn xi_para(es: &EigenSystem, beta: f64, bx: &LatticeBox, l: usize, times: &[f64], meta: KernelMeta) -> Result<TransportKernel> {
    let d = bx.d;
    let vol = bx.ball(l).len() as f64;
    let cur = eigen_currents(es, bx, l)?;
    let n = es.dim();
    // pair list (nu, weights per (k, q))
    let mut pairs: Vec<(f64, Vec<Complex64>)> = Vec::with_capacity(n * n);
    for m in 0..n {
        for j in 0..n {
            let kern = pair_kernel(es.values[m], es.values[j], beta) / vol;
            let mut w = Vec::with_capacity(d * d);
            for k in 0..d {
                for q in 0..d {
                    w.push(cur[k][(m, j)].conj() * cur[q][(m, j)] * kern);
                }
            }
            pairs.push((es.values[m] - es.values[j], w));
        }
    }
    let values = crate::par_map(times, |&t| {
        let mut acc = vec![Complex64::new(0.0, 0.0); d * d];
        for (nu, w) in &pairs {
            let ph = Complex64::from_polar(1.0, t * nu) - 1.0;
            for (a, wi) in acc.iter_mut().zip(w) {
                *a += wi * ph;
            }
        }
        RMat::from_fn(d, d, |k, q| acc[k * d + q].re)
    });
    Ok(TransportKernel { times: times.to_vec(), values, meta })
}

/// Same kernel through the Green-Kubo commutator integral
/// |Lambda_l|^{-1} int_0^t omega(i[I_k, tau_s(I_q)]) ds, by composite
/// Gauss-Legendre in s. Shares only the eigen-decomposition with `xi_para`.
pub fn xi_para_commutator(es: &EigenSystem, d_sym: &DensityMatrix, bx: &LatticeBox, l: usize, times: &[f64], meta: KernelMeta) -> Result<TransportKernel> {
    let dim = bx.d;
    let vol = bx.ball(l).len() as f64;
    let ops: Vec<CMat> = (0..dim).map(|k| Ok(current_operator(bx, k, l)?.coef)).collect::<Result<_>>()?;
    let dm = &d_sym.matrix;
    let integrand = |s: f64| -> RMat {
        let evolved: Vec<CMat> = ops.iter().map(|b| es.evolve(b, s)).collect();
        RMat::from_fn(dim, dim, |k, q| {
            let comm = &ops[k] * &evolved[q] - &evolved[q] * &ops[k];
            let mut tr = Complex64::new(0.0, 0.0);
            for i in 0..comm.nrows() {
                for j in 0..comm.ncols() {
                    tr += comm[(i, j)] * dm[(j, i)];
                }
            }
            (Complex64::new(0.0, 1.0) * tr).re / vol
        })
    };
    let gl = GaussLegendre::new(16);
    let mut out = Vec::with_capacity(times.len());
    let mut acc = RMat::zeros(dim, dim);
    let mut last = 0.0;
    for &t in times {
        if t < last {
            return Err(Error::Domain("commutator route needs increasing non-negative times".into()));
        }
        let panels = ((t - last) / 0.25).ceil().max(1.0) as usize;
        if t > last {
            for (s, w) in gl.composite_nodes(last, t, panels) {
                acc += integrand(s) * w;
            }
        }
        last = t;
        out.push(acc.clone());
    }
    Ok(TransportKernel { times: times.to_vec(), values: out, meta })
}

/// Xi_d = diag((2/|Lambda_l|) sum_x Re <e_{x+e_k}, d e_x>) = -diag(omega(P_{k,l})) / |Lambda_l|.
///
/// This is the sign for which the diamagnetic current responds as
/// Xi_d w int E under the Peierls coupling of `MagneticHamiltonian`.
pub fn xi_dia(d_sym: &DensityMatrix, bx: &LatticeBox, l: usize) -> Result<RMat> {
    let vol = bx.ball(l).len() as f64;
    let mut m = RMat::zeros(bx.d, bx.d);
    for k in 0..bx.d {
        m[(k, k)] = -expectation_quadratic(d_sym, &adjacency_operator(bx, k, l)?)?.re / vol;
    }
    Ok(m)
}

/// Mean equilibrium current |Lambda_l|^{-1} omega(I_{k,l}) without the
/// fluctuation subtraction; vanishes whenever the symbol is real.
pub fn thermal_current(d_sym: &DensityMatrix, bx: &LatticeBox, l: usize) -> Result<Vec<f64>> {
    let vol = bx.ball(l).len() as f64;
    (0..bx.d)
        .map(|k| Ok(expectation_quadratic(d_sym, &current_operator(bx, k, l)?)?.re / vol))
        .collect()
}

/// Fourth-order derivative on a uniform grid (one-sided at the ends).
pub fn derivative(y: &[f64], h: f64) -> Vec<f64> {
    let n = y.len();
    let mut out = vec![0.0; n];
    if n < 5 {
        for i in 0..n {
            let (a, b) = (i.saturating_sub(1), (i + 1).min(n - 1));
            out[i] = if b > a { (y[b] - y[a]) / ((b - a) as f64 * h) } else { 0.0 };
        }
        return out;
    }
    for i in 0..n {
        out[i] = if i >= 2 && i + 2 < n {
            (y[i - 2] - 8.0 * y[i - 1] + 8.0 * y[i + 1] - y[i + 2]) / (12.0 * h)
        } else if i < 2 {
            let s = &y[i..i + 5];
            (-25.0 * s[0] + 48.0 * s[1] - 36.0 * s[2] + 16.0 * s[3] - 3.0 * s[4]) / (12.0 * h)
        } else {
            let s = &y[i - 4..=i];
            (25.0 * s[4] - 48.0 * s[3] + 36.0 * s[2] - 16.0 * s[1] + 3.0 * s[0]) / (12.0 * h)
        };
    }
    out
}

/// V(t) = Xi_d^{-1} dXi_p/dt.
pub fn viscosity(xi_p: &TransportKernel, xi_d: &RMat) -> Result<TransportKernel> {
    let h = xi_p.step()?;
    let d = xi_p.dim();
    for k in 0..d {
        if xi_d[(k, k)].abs() <= 1e-10 {
            return Err(Error::Singular(format!("Xi_d[{k}][{k}] = {:e}", xi_d[(k, k)])));
        }
    }
    let mut values = vec![RMat::zeros(d, d); xi_p.times.len()];
    for k in 0..d {
        for q in 0..d {
            let series: Vec<f64> = xi_p.values.iter().map(|m| m[(k, q)]).collect();
            for (i, v) in derivative(&series, h).into_iter().enumerate() {
                values[i][(k, q)] = v / xi_d[(k, k)];
            }
        }
    }
    Ok(TransportKernel { times: xi_p.times.clone(), values, meta: xi_p.meta })
}

/// Explicit pieces (A, B) with delta(I_{k,l}) = lambda A + B, where, writing
/// chi_z(x) = 1[x - z in L, x not in L] - 1[x in L, x - z not in L] for L = Lambda_l,
///   A = sum_{x in L} (V(x) - V(x + e_k)) P(x, x + e_k)
///   B = -sum_{z != +-e_k} chi_z(x) P(x, x + e_k - z) + sum_x chi_{e_k}(x) (2 n_x + P(x + e_k, x - e_k)).
pub fn generator_expansion(bx: &LatticeBox, pot: &Potential, k: usize, l: usize) -> Result<(QuadraticObservable, QuadraticObservable)> {
    check_radius(bx, k, l)?;
    let n = bx.n_sites();
    let r = l as i64;
    let in_ball = |x: &[i64]| x.iter().all(|c| c.abs() <= r);
    let in_shifted = |x: &[i64], z: &[i64]| x.iter().zip(z).all(|(c, s)| (c - s).abs() <= r);
    let mut a = CMat::zeros(n, n);
    for x in bx.ball(l) {
        let y = bx.shift(x, k, 1).unwrap();
        add_adjacency(&mut a, x, y, pot.values[x] - pot.values[y]);
    }
    let mut b = CMat::zeros(n, n);
    let mut ek = vec![0i64; bx.d];
    ek[k] = 1;
    for i in 0..n {
        let x = bx.site(i);
        for j in 0..bx.d {
            for s in [-1i64, 1] {
                if j == k {
                    continue;
                }
                let mut z = vec![0i64; bx.d];
                z[j] = s;
                let ind = f64::from(in_shifted(&x, &z) && !in_ball(&x)) - f64::from(in_ball(&x) && !in_shifted(&x, &z));
                if ind == 0.0 {
                    continue;
                }
                let y: Vec<i64> = x.iter().zip(ek.iter().zip(&z)).map(|(c, (e, s))| c + e - s).collect();
                let jy = bx.index(&y).ok_or_else(|| Error::Domain("generator stencil leaves the box".into()))?;
                add_adjacency(&mut b, i, jy, -ind);
            }
        }
        let ind = f64::from(in_shifted(&x, &ek) && !in_ball(&x)) - f64::from(in_ball(&x) && !in_shifted(&x, &ek));
        if ind != 0.0 {
            b[(i, i)] += Complex64::new(2.0 * ind, 0.0);
            let up = bx.shift(i, k, 1);
            let down = bx.shift(i, k, -1);
            match (up, down) {
                (Some(u), Some(dn)) => add_adjacency(&mut b, u, dn, ind),
                _ => return Err(Error::Domain("generator stencil leaves the box".into())),
            }
        }
    }
    Ok((QuadraticObservable::new(a), QuadraticObservable::new(b)))
}
