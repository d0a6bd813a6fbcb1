//! Eigen-decomposition, Fermi symbols, complex-time correlations and the
//! Duhamel (Kubo-Mori) inner product for quadratic observables.
//!
//! A quadratic observable is sum_{uv} b_uv a_u^* a_v + c. In the quasi-free
//! state with symbol d, omega(a_u^* a_v) = d_vu.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{hermiticity_defect, CMat, RMat};

#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub values: Vec<f64>,
    pub vectors: CMat,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Phi f(E) Phi^dagger.
    pub fn function<F: Fn(f64) -> Complex64>(&self, f: F) -> CMat {
        let fv: Vec<Complex64> = self.values.iter().map(|&e| f(e)).collect();
        let mut left = self.vectors.clone();
        for (j, mut col) in left.column_iter_mut().enumerate() {
            col *= fv[j];
        }
        left * self.vectors.adjoint()
    }

    /// Coefficient matrix in the eigenbasis: Phi^dagger b Phi.
    pub fn to_eigenbasis(&self, b: &CMat) -> CMat {
        self.vectors.adjoint() * b * &self.vectors
    }

    /// Heisenberg evolution of a coefficient matrix, e^{itH} b e^{-itH}.
    pub fn evolve(&self, b: &CMat, t: f64) -> CMat {
        let u = self.function(|e| Complex64::from_polar(1.0, e * t));
        &u * b * u.adjoint()
    }
}

pub fn eigendecompose(h: &CMat) -> Result<EigenSystem> {
    let n = h.nrows();
    if h.ncols() != n {
        return Err(Error::Dimension("matrix is not square".into()));
    }
    let scale = h.iter().fold(1.0f64, |m, z| m.max(z.norm()));
    let defect = hermiticity_defect(h);
    if defect > 1e-12 * scale {
        return Err(Error::NotHermitian(defect));
    }
    let real = h.iter().all(|z| z.im == 0.0);
    let (vals, vecs): (Vec<f64>, CMat) = if real {
        let m = DMatrix::from_fn(n, n, |i, j| h[(i, j)].re);
        let se = SymmetricEigen::new(m);
        (se.eigenvalues.iter().copied().collect(), se.eigenvectors.map(|x| Complex64::new(x, 0.0)))
    } else {
        let se = SymmetricEigen::new(h.clone());
        (se.eigenvalues.iter().copied().collect(), se.eigenvectors)
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
    let values = order.iter().map(|&i| vals[i]).collect();
    let vectors = CMat::from_fn(n, n, |i, j| vecs[(i, order[j])]);
    Ok(EigenSystem { values, vectors })
}

pub fn fermi(e: f64, beta: f64) -> f64 {
    let x = beta * e;
    if x > 0.0 {
        let q = (-x).exp();
        q / (1.0 + q)
    } else {
        1.0 / (1.0 + x.exp())
    }
}

/// F_alpha(e) = e^{alpha e} / (1 + e^{beta e}), 0 <= alpha <= beta.
pub fn fermi_alpha(e: f64, beta: f64, alpha: f64) -> f64 {
    let x = beta * e;
    if x > 0.0 {
        ((alpha - beta) * e).exp() / (1.0 + (-x).exp())
    } else {
        (alpha * e).exp() / (1.0 + x.exp())
    }
}

pub fn occupations(es: &EigenSystem, beta: f64) -> Vec<f64> {
    es.values.iter().map(|&e| fermi(e, beta)).collect()
}

#[derive(Debug, Clone)]
pub struct DensityMatrix {
    pub matrix: CMat,
    pub beta: f64,
}

pub fn fermi_symbol(es: &EigenSystem, beta: f64) -> DensityMatrix {
    DensityMatrix { matrix: es.function(|e| Complex64::new(fermi(e, beta), 0.0)), beta }
}

/// C_{t + i alpha}(x) = <e_{x2}, e^{-itH} F_alpha(H) e_{x1}>.
pub fn complex_time_correlation(es: &EigenSystem, beta: f64, t: f64, alpha: f64, x: (usize, usize)) -> Result<Complex64> {
    if !(0.0..=beta).contains(&alpha) {
        return Err(Error::Domain(format!("alpha = {alpha} outside [0, {beta}]")));
    }
    let (x1, x2) = x;
    let mut acc = Complex64::new(0.0, 0.0);
    for (m, &e) in es.values.iter().enumerate() {
        let phi = es.vectors.column(m);
        acc += Complex64::from_polar(fermi_alpha(e, beta, alpha), -t * e) * phi[x2] * phi[x1].conj();
    }
    Ok(acc)
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticObservable {
    pub coef: CMat,
    pub offset: Complex64,
}

impl QuadraticObservable {
    pub fn new(coef: CMat) -> Self {
        QuadraticObservable { coef, offset: Complex64::new(0.0, 0.0) }
    }

    pub fn dim(&self) -> usize {
        self.coef.nrows()
    }

    pub fn adjoint(&self) -> Self {
        QuadraticObservable { coef: self.coef.adjoint(), offset: self.offset.conj() }
    }

    /// The same observable minus its expectation in `d`.
    pub fn centred(&self, d: &DensityMatrix) -> Result<Self> {
        let m = expectation_quadratic(d, &self.coef_only())?;
        Ok(QuadraticObservable { coef: self.coef.clone(), offset: -m })
    }

    fn coef_only(&self) -> Self {
        QuadraticObservable::new(self.coef.clone())
    }

    /// Generator delta(B) = i[H, B], realized on coefficients.
    pub fn generator(&self, h: &CMat) -> Self {
        let c = (h * &self.coef - &self.coef * h) * Complex64::new(0.0, 1.0);
        QuadraticObservable::new(c)
    }
}

fn check_dims(n: usize, m: usize) -> Result<()> {
    if n != m {
        return Err(Error::Dimension(format!("{n} vs {m}")));
    }
    Ok(())
}

fn trace_product(a: &CMat, b: &CMat) -> Complex64 {
    let n = a.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// omega(B) = Tr(b d) + c.
pub fn expectation_quadratic(d: &DensityMatrix, b: &QuadraticObservable) -> Result<Complex64> {
    check_dims(d.matrix.nrows(), b.dim())?;
    Ok(trace_product(&b.coef, &d.matrix) + b.offset)
}

/// omega(A B) for quadratic A, B via Wick's rule.
pub fn expectation_product(d: &DensityMatrix, a: &QuadraticObservable, b: &QuadraticObservable) -> Result<Complex64> {
    check_dims(d.matrix.nrows(), a.dim())?;
    check_dims(a.dim(), b.dim())?;
    let n = a.dim();
    let dm = &d.matrix;
    let one_minus = CMat::identity(n, n) - dm;
    let ta = trace_product(&a.coef, dm);
    let tb = trace_product(&b.coef, dm);
    let connected = trace_product(&(&a.coef * one_minus * &b.coef), dm);
    Ok(ta * tb + connected + a.offset * tb + b.offset * ta + a.offset * b.offset)
}

/// Kubo-Mori kernel K_mn = (f_m - f_n) / (E_n - E_m), with the limit
/// beta f (1 - f) on degenerate pairs.
pub fn duhamel_kernel(es: &EigenSystem, beta: f64) -> RMat {
    let n = es.dim();
    let e = &es.values;
    RMat::from_fn(n, n, |m, k| pair_kernel(e[m], e[k], beta))
}

pub fn pair_kernel(em: f64, en: f64, beta: f64) -> f64 {
    // K = (1 - f_m) f_n (1 - e^{-beta (E_m - E_n)}) / (E_m - E_n); symmetric,
    // evaluate with the non-negative gap to stay clear of overflow
    let (hi, lo) = if em >= en { (em, en) } else { (en, em) };
    let gap = hi - lo;
    let weight = fermi(-hi, beta) * fermi(lo, beta);
    if gap * beta < 1e-12 {
        weight * beta
    } else {
        weight * (-(-beta * gap).exp_m1()) / gap
    }
}

/// (A, B)_~ = int_0^beta omega(A^* tau_{i alpha}(B)) d alpha, closed form.
pub fn duhamel_inner_product(es: &EigenSystem, beta: f64, a: &QuadraticObservable, b: &QuadraticObservable) -> Result<Complex64> {
    check_dims(es.dim(), a.dim())?;
    check_dims(a.dim(), b.dim())?;
    let f = occupations(es, beta);
    let ae = es.to_eigenbasis(&a.coef);
    let be = es.to_eigenbasis(&b.coef);
    let n = es.dim();
    let mut wa = a.offset;
    let mut wb = b.offset;
    for m in 0..n {
        wa += ae[(m, m)] * f[m];
        wb += be[(m, m)] * f[m];
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for m in 0..n {
        for k in 0..n {
            acc += ae[(m, k)].conj() * be[(m, k)] * pair_kernel(es.values[m], es.values[k], beta);
        }
    }
    Ok(beta * wa.conj() * wb + acc)
}

/// (A, tau_t(B))_~ for a list of times, sharing the eigenbasis transforms.
pub fn duhamel_time_correlation(es: &EigenSystem, beta: f64, a: &QuadraticObservable, b: &QuadraticObservable, times: &[f64]) -> Result<Vec<Complex64>> {
    check_dims(es.dim(), a.dim())?;
    check_dims(a.dim(), b.dim())?;
    let f = occupations(es, beta);
    let ae = es.to_eigenbasis(&a.coef);
    let be = es.to_eigenbasis(&b.coef);
    let n = es.dim();
    let (mut wa, mut wb) = (a.offset, b.offset);
    for m in 0..n {
        wa += ae[(m, m)] * f[m];
        wb += be[(m, m)] * f[m];
    }
    let disconnected = beta * wa.conj() * wb;
    let mut terms = Vec::with_capacity(n * n);
    for m in 0..n {
        for k in 0..n {
            let w = ae[(m, k)].conj() * be[(m, k)] * pair_kernel(es.values[m], es.values[k], beta);
            terms.push((es.values[m] - es.values[k], w));
        }
    }
    Ok(times
        .iter()
        .map(|&t| {
            let s: Complex64 = terms.iter().map(|&(nu, w)| w * Complex64::from_polar(1.0, t * nu)).sum();
            disconnected + s
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn two_site() -> CMat {
        CMat::from_row_slice(2, 2, &[c(2.0), c(-1.0), c(-1.0), c(2.0)])
    }

    fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> CMat {
        let a = CMat::from_fn(n, n, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        (&a + a.adjoint()) * c(0.5)
    }

    // dense oracle: exp via nalgebra's Pade routine, independent of the eigensolver
    fn expm(m: &CMat) -> CMat {
        m.clone().exp()
    }

    #[test]
    fn eigen_examples() {
        let es = eigendecompose(&CMat::from_element(1, 1, c(2.0))).unwrap();
        assert_eq!(es.values, vec![2.0]);
        assert!((es.vectors[(0, 0)].norm() - 1.0).abs() < 1e-15);

        let es = eigendecompose(&two_site()).unwrap();
        assert!((es.values[0] - 1.0).abs() < 1e-14 && (es.values[1] - 3.0).abs() < 1e-14);
        let r = 0.5f64.sqrt();
        assert!((es.vectors[(0, 0)].norm() - r).abs() < 1e-14);
        assert!((es.vectors[(0, 0)] - es.vectors[(1, 0)]).norm() < 1e-14);
        assert!((es.vectors[(0, 1)] + es.vectors[(1, 1)]).norm() < 1e-14);

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = random_hermitian(8, &mut rng);
        let es = eigendecompose(&h).unwrap();
        let gram = es.vectors.adjoint() * &es.vectors;
        assert!((gram - CMat::identity(8, 8)).camax() < 1e-12);
        let rec = es.function(c);
        assert!((rec - &h).camax() < 1e-10 * h.camax().max(1.0));
        assert!(es.values.windows(2).all(|w| w[0] <= w[1]));

        let mut bad = h.clone();
        bad[(0, 1)] += c(1e-3);
        assert!(matches!(eigendecompose(&bad), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn fermi_symbol_examples() {
        let es = eigendecompose(&two_site()).unwrap();
        let d = fermi_symbol(&es, 1e-8);
        assert!((&d.matrix - CMat::identity(2, 2) * c(0.5)).camax() < 1e-7);

        let es1 = eigendecompose(&CMat::from_element(1, 1, c(2.0))).unwrap();
        let d1 = fermi_symbol(&es1, 1.0);
        assert!((d1.matrix[(0, 0)].re - 1.0 / (1.0 + 2f64.exp())).abs() < 1e-15);

        let d = fermi_symbol(&es, 1.0);
        let oracle = (CMat::identity(2, 2) + expm(&two_site())).try_inverse().unwrap();
        assert!((&d.matrix - &oracle).camax() < 1e-13);
        let expect = (fermi(1.0, 1.0) - fermi(3.0, 1.0)) / 2.0;
        assert!((d.matrix[(0, 1)].re - expect).abs() < 1e-14);

        // extreme energies stay finite
        assert_eq!(fermi(1e4, 1.0), 0.0);
        assert_eq!(fermi(-1e4, 1.0), 1.0);
        assert!(fermi_alpha(800.0, 1.0, 1.0).is_finite());
    }

    #[test]
    fn complex_time_correlation_examples() {
        let h = two_site();
        let es = eigendecompose(&h).unwrap();
        let beta = 1.0;
        let d = fermi_symbol(&es, beta);
        let v = complex_time_correlation(&es, beta, 0.0, 0.0, (0, 1)).unwrap();
        assert!((v - d.matrix[(1, 0)]).norm() < 1e-14);
        let v = complex_time_correlation(&es, beta, 0.0, beta, (1, 1)).unwrap();
        assert!((v - (c(1.0) - d.matrix[(1, 1)])).norm() < 1e-14);
        // e^{-itH} e^{alpha H} (1 + e^{beta H})^{-1}
        let (t, alpha) = (0.3, 0.4);
        let ui = expm(&(&h * Complex64::new(0.0, -t)));
        let fa = expm(&(&h * c(alpha))) * (CMat::identity(2, 2) + expm(&(&h * c(beta)))).try_inverse().unwrap();
        let oracle = ui * fa;
        for x1 in 0..2 {
            for x2 in 0..2 {
                let v = complex_time_correlation(&es, beta, t, alpha, (x1, x2)).unwrap();
                assert!((v - oracle[(x2, x1)]).norm() < 1e-12);
            }
        }
        assert!(complex_time_correlation(&es, beta, 0.0, 1.5, (0, 0)).is_err());
    }

    #[test]
    fn complex_time_correlation_random_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let h = random_hermitian(12, &mut rng);
        let es = eigendecompose(&h).unwrap();
        let beta = 1.7;
        let (t, alpha) = (0.9, 0.6);
        let n = 12;
        let oracle = expm(&(&h * Complex64::new(0.0, -t)))
            * expm(&(&h * c(alpha)))
            * (CMat::identity(n, n) + expm(&(&h * c(beta)))).try_inverse().unwrap();
        for x1 in 0..n {
            for x2 in 0..n {
                let v = complex_time_correlation(&es, beta, t, alpha, (x1, x2)).unwrap();
                assert!((v - oracle[(x2, x1)]).norm() < 1e-10);
            }
        }
    }

    fn bond_current(n: usize, x1: usize, x2: usize) -> QuadraticObservable {
        // I = i (a*_{x2} a_{x1} - a*_{x1} a_{x2})
        let mut b = CMat::zeros(n, n);
        b[(x2, x1)] = Complex64::new(0.0, 1.0);
        b[(x1, x2)] = Complex64::new(0.0, -1.0);
        QuadraticObservable::new(b)
    }

    // alpha quadrature of omega(A^* tau_{i alpha}(B)) from dense exponentials
    fn duhamel_oracle(h: &CMat, beta: f64, a: &QuadraticObservable, b: &QuadraticObservable) -> Complex64 {
        let n = h.nrows();
        let d = DensityMatrix {
            matrix: (CMat::identity(n, n) + expm(&(h * c(beta)))).try_inverse().unwrap(),
            beta,
        };
        let gl = crate::quad::GaussLegendre::new(64);
        let mut acc = Complex64::new(0.0, 0.0);
        for (alpha, w) in gl.on(0.0, beta) {
            let bt = QuadraticObservable {
                coef: expm(&(h * c(-alpha))) * &b.coef * expm(&(h * c(alpha))),
                offset: b.offset,
            };
            acc += expectation_product(&d, &a.adjoint(), &bt).unwrap() * w;
        }
        acc
    }

    #[test]
    fn duhamel_matches_quadrature() {
        let h = two_site();
        let es = eigendecompose(&h).unwrap();
        let cur = bond_current(2, 1, 0);
        let v = duhamel_inner_product(&es, 1.0, &cur, &cur).unwrap();
        let o = duhamel_oracle(&h, 1.0, &cur, &cur);
        assert!((v - o).norm() < 1e-8, "{v} vs {o}");

        let zero = QuadraticObservable::new(CMat::zeros(2, 2));
        assert_eq!(duhamel_inner_product(&es, 1.0, &zero, &zero).unwrap(), c(0.0));

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = random_hermitian(6, &mut rng);
        let es = eigendecompose(&h).unwrap();
        let a = QuadraticObservable {
            coef: CMat::from_fn(6, 6, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))),
            offset: Complex64::new(0.3, -0.2),
        };
        let b = QuadraticObservable { coef: random_hermitian(6, &mut rng), offset: c(0.1) };
        let v = duhamel_inner_product(&es, 2.3, &a, &b).unwrap();
        let o = duhamel_oracle(&h, 2.3, &a, &b);
        assert!((v - o).norm() < 1e-9, "{v} vs {o}");
    }

    #[test]
    fn duhamel_is_positive_and_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let h = random_hermitian(7, &mut rng);
        let es = eigendecompose(&h).unwrap();
        for _ in 0..10 {
            let a = QuadraticObservable::new(random_hermitian(7, &mut rng));
            let b = QuadraticObservable::new(random_hermitian(7, &mut rng));
            let aa = duhamel_inner_product(&es, 0.8, &a, &a).unwrap();
            assert!(aa.re >= 0.0 && aa.im.abs() < 1e-12);
            let ab = duhamel_inner_product(&es, 0.8, &a, &b).unwrap();
            let ba = duhamel_inner_product(&es, 0.8, &b, &a).unwrap();
            assert!((ab - ba.conj()).norm() < 1e-12);
        }
    }

    #[test]
    fn expectation_examples() {
        let h = two_site();
        let es = eigendecompose(&h).unwrap();
        let d = fermi_symbol(&es, 1.3);
        let f = occupations(&es, 1.3);
        let mut num = CMat::zeros(2, 2);
        num[(0, 0)] = c(1.0);
        let v = expectation_quadratic(&d, &QuadraticObservable::new(num)).unwrap();
        let oracle: f64 = (0..2).map(|m| f[m] * es.vectors[(0, m)].norm_sqr()).sum();
        assert!((v.re - oracle).abs() < 1e-14);

        let cur = bond_current(2, 1, 0);
        assert!(expectation_quadratic(&d, &cur).unwrap().norm() < 1e-15);

        let b = QuadraticObservable::new(d.matrix.adjoint());
        let v = expectation_quadratic(&d, &b).unwrap();
        assert!(v.re >= 0.0 && v.im.abs() < 1e-15);
        assert!(expectation_quadratic(&d, &QuadraticObservable::new(CMat::zeros(3, 3))).is_err());
    }

    #[test]
    fn wick_product_matches_second_quantization() {
        // 2 modes -> 4-dim Fock space built from Jordan-Wigner matrices
        let h = CMat::from_row_slice(2, 2, &[c(0.3), Complex64::new(0.2, 0.4), Complex64::new(0.2, -0.4), c(-0.5)]);
        let es = eigendecompose(&h).unwrap();
        let beta = 1.1;
        let d = fermi_symbol(&es, beta);
        let a1 = CMat::from_row_slice(4, 4, &[
            c(0.0), c(1.0), c(0.0), c(0.0),
            c(0.0), c(0.0), c(0.0), c(0.0),
            c(0.0), c(0.0), c(0.0), c(1.0),
            c(0.0), c(0.0), c(0.0), c(0.0),
        ]);
        let z = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0), c(-1.0), c(1.0), c(-1.0)]));
        let a2 = {
            let s = CMat::from_row_slice(4, 4, &[
                c(0.0), c(0.0), c(1.0), c(0.0),
                c(0.0), c(0.0), c(0.0), c(1.0),
                c(0.0), c(0.0), c(0.0), c(0.0),
                c(0.0), c(0.0), c(0.0), c(0.0),
            ]);
            s * z
        };
        let ops = [a1, a2];
        let dgamma = |b: &CMat| {
            let mut m = CMat::zeros(4, 4);
            for u in 0..2 {
                for v in 0..2 {
                    m += ops[u].adjoint() * &ops[v] * b[(u, v)];
                }
            }
            m
        };
        let big_h = dgamma(&h);
        let rho = expm(&(&big_h * c(-beta)));
        let z_part = rho.trace();
        let rho = rho / z_part;
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = QuadraticObservable {
            coef: CMat::from_fn(2, 2, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))),
            offset: c(0.25),
        };
        let b = QuadraticObservable::new(random_hermitian(2, &mut rng));
        let fock = |q: &QuadraticObservable| dgamma(&q.coef) + CMat::identity(4, 4) * q.offset;
        let exact = (&rho * fock(&a) * fock(&b)).trace();
        let wick = expectation_product(&d, &a, &b).unwrap();
        assert!((exact - wick).norm() < 1e-12, "{exact} vs {wick}");
        let one = (&rho * fock(&a)).trace();
        assert!((one - expectation_quadratic(&d, &a).unwrap()).norm() < 1e-12);
    }

    #[test]
    fn kernel_limits() {
        let k = pair_kernel(0.5, 0.5, 2.0);
        let f = fermi(0.5, 2.0);
        assert!((k - 2.0 * f * (1.0 - f)).abs() < 1e-15);
        let (a, b) = (0.3, 0.3 + 1e-9);
        let direct = (fermi(a, 2.0) - fermi(b, 2.0)) / (b - a);
        assert!((pair_kernel(a, b, 2.0) - direct).abs() < 1e-6);
        assert!((pair_kernel(1.0, -2.0, 3.0) - (fermi(1.0, 3.0) - fermi(-2.0, 3.0)) / (-3.0)).abs() < 1e-15);
        assert!(pair_kernel(500.0, -500.0, 10.0).is_finite());
    }
}
