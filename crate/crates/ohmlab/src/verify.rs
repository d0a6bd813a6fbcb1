//! Identity checks shared by the `verify` stage and the test suite. Each
//! check returns a residual, the tolerance it is held to, and the verdict.

use std::collections::BTreeMap;

use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::{evolve_propagator, DriveRun};
use crate::error::Result;
use crate::lattice::{build_hamiltonian, make_box, sample_potential, CMat, Distribution, FieldProfile, LatticeBox, MagneticHamiltonian, Potential, RMat};
use crate::measure::{
    build_measure, cesaro_mean_atoms, eval_xi_from_measure, full_conductivity_measure, moment_bounds, nontriviality_check, static_admittance,
    SpectralMeasure,
};
use crate::response::{
    conductivity_map, fourier_ohm_current, heat_form, hilbert_involution_defect, hilbert_range, linear_currents, symmetric_grid, ACFieldSpace,
    FieldSpectrum, QuadraticFormQ, Resistivity, Resistor,
};
use crate::spectral::{
    duhamel_inner_product, duhamel_time_correlation, eigendecompose, expectation_product, expectation_quadratic, fermi_symbol, DensityMatrix,
    EigenSystem, QuadraticObservable,
};
use crate::transport::{current_operator, xi_dia, xi_para, xi_para_commutator, KernelMeta};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    /// Passes when residual <= tolerance.
    pub fn at_most(residual: f64, tolerance: f64) -> Self {
        Check { residual, tolerance, pass: residual <= tolerance }
    }

    /// Passes when value > threshold (the residual slot holds the value).
    pub fn above(value: f64, threshold: f64) -> Self {
        Check { residual: value, tolerance: threshold, pass: value > threshold }
    }

    /// Passes when lo <= value <= hi; tolerance records the half-width.
    pub fn within(value: f64, lo: f64, hi: f64) -> Self {
        Check { residual: value, tolerance: 0.5 * (hi - lo), pass: value >= lo && value <= hi }
    }

    /// Worst of several checks of the same identity.
    pub fn worst(checks: impl IntoIterator<Item = Check>) -> Self {
        let mut out = Check { residual: 0.0, tolerance: f64::INFINITY, pass: true };
        for c in checks {
            out.residual = out.residual.max(c.residual);
            out.tolerance = out.tolerance.min(c.tolerance);
            out.pass &= c.pass;
        }
        out
    }
}

pub type Report = BTreeMap<String, Check>;

/// One disordered equilibrium instance and its spectral data.
#[derive(Debug, Clone)]
pub struct Instance {
    pub bx: LatticeBox,
    pub pot: Potential,
    pub lambda: f64,
    pub beta: f64,
    pub l: usize,
    pub h: CMat,
    pub es: EigenSystem,
    pub dsym: DensityMatrix,
}

impl Instance {
    pub fn new(bx: LatticeBox, pot: Potential, lambda: f64, beta: f64, l: usize) -> Result<Self> {
        let h = build_hamiltonian(&bx, &pot, lambda)?;
        let es = eigendecompose(&h)?;
        let dsym = fermi_symbol(&es, beta);
        Ok(Instance { bx, pot, lambda, beta, l, h, es, dsym })
    }

    pub fn sample(d: usize, radius: usize, l: usize, beta: f64, lambda: f64, seed: u64) -> Result<Self> {
        let bx = make_box(d, radius)?;
        let pot = sample_potential(&bx, seed, Distribution::Uniform);
        Self::new(bx, pot, lambda, beta, l)
    }

    pub fn meta(&self) -> KernelMeta {
        KernelMeta { beta: self.beta, lambda: self.lambda, l: self.l, seed: self.pot.seed }
    }

    pub fn measure(&self) -> Result<SpectralMeasure> {
        build_measure(&self.es, self.beta, &self.bx, self.l)
    }

    pub fn xi_dia(&self) -> Result<RMat> {
        xi_dia(&self.dsym, &self.bx, self.l)
    }

    pub fn volume(&self) -> f64 {
        self.bx.ball(self.l).len() as f64
    }
}

fn max_abs_diff(a: &[RMat], b: &[RMat]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).amax()).fold(0.0, f64::max)
}

/// Duhamel-difference kernel against the Green-Kubo commutator integral.
pub fn green_kubo(inst: &Instance, times: &[f64]) -> Result<Check> {
    let a = xi_para(&inst.es, inst.beta, &inst.bx, inst.l, times, inst.meta())?;
    let b = xi_para_commutator(&inst.es, &inst.dsym, &inst.bx, inst.l, times, inst.meta())?;
    Ok(Check::at_most(max_abs_diff(&a.values, &b.values), 1e-8))
}

/// Cosine reconstruction, atom positivity, +-nu symmetry, total mass.
pub fn measure_identities(inst: &Instance, mu: &SpectralMeasure, times: &[f64]) -> Result<[Check; 4]> {
    let direct = xi_para(&inst.es, inst.beta, &inst.bx, inst.l, times, inst.meta())?;
    let rebuilt = eval_xi_from_measure(mu, times, inst.meta());
    let cosine = Check::at_most(max_abs_diff(&direct.values, &rebuilt.values), 1e-8);
    let min_eig = mu
        .atoms
        .iter()
        .map(|a| SymmetricEigen::new(a.weight.clone()).eigenvalues.min())
        .fold(f64::INFINITY, f64::min);
    let psd = Check::at_most((-min_eig).max(0.0), 1e-10);
    let asym = mu
        .atoms
        .iter()
        .map(|a| match mu.atoms.iter().find(|b| b.nu == -a.nu) {
            Some(b) => (&a.weight - &b.weight).amax(),
            None => f64::INFINITY,
        })
        .fold(0.0, f64::max);
    let symmetry = Check::at_most(asym, 0.0);
    let vol = inst.volume();
    let total = mu.total();
    let mut mass = 0.0f64;
    for k in 0..inst.bx.d {
        for q in 0..inst.bx.d {
            let ik = current_operator(&inst.bx, k, inst.l)?;
            let iq = current_operator(&inst.bx, q, inst.l)?;
            let v = duhamel_inner_product(&inst.es, inst.beta, &ik, &iq)?.re / vol;
            mass = mass.max((v - total[(k, q)]).abs());
        }
    }
    Ok([cosine, psd, symmetry, Check::at_most(mass, 1e-9)])
}

/// The three moment bounds as stated, plus the mass bound with the
/// Duhamel product divided by beta.
pub fn moment_checks(inst: &Instance, mu: &SpectralMeasure) -> Result<([Check; 3], Check)> {
    let b = moment_bounds(mu, &inst.dsym, &inst.h, &inst.bx, inst.l)?;
    let s = b.slacks();
    let lit = s.map(|v| Check::at_most((-v).max(0.0), 1e-10));
    Ok((lit, Check::at_most((-b.normalized_mass_slack()).max(0.0), 1e-10)))
}

pub fn nontriviality(inst: &Instance, mu: &SpectralMeasure) -> Result<Check> {
    let r = nontriviality_check(mu, &inst.h, &inst.bx, inst.l, 1e-6)?;
    Ok(Check::above(r.trace_off_zero, 1e-6))
}

/// Xi_p(0) = 0, evenness, symmetry and negative semidefiniteness.
pub fn xi_structure(inst: &Instance, times: &[f64]) -> Result<[Check; 4]> {
    let mut both: Vec<f64> = times.to_vec();
    both.extend(times.iter().map(|t| -t));
    let k = xi_para(&inst.es, inst.beta, &inst.bx, inst.l, &both, inst.meta())?;
    let n = times.len();
    let zero = times
        .iter()
        .zip(&k.values)
        .filter(|(t, _)| **t == 0.0)
        .map(|(_, m)| m.amax())
        .fold(0.0, f64::max);
    let even = max_abs_diff(&k.values[..n], &k.values[n..]);
    let sym = k.values.iter().map(|m| (m - m.transpose()).amax()).fold(0.0, f64::max);
    let top = k
        .values
        .iter()
        .map(|m| SymmetricEigen::new((m + m.transpose()) * 0.5).eigenvalues.max())
        .fold(f64::NEG_INFINITY, f64::max);
    Ok([
        Check::at_most(zero, 0.0),
        Check::at_most(even, 1e-10),
        Check::at_most(sym, 1e-10),
        Check::at_most(top.max(0.0), 1e-10),
    ])
}

/// Largest excursion of a diagonal entry of Xi_d outside [-2, 2].
pub fn xi_dia_range(inst: &Instance) -> Result<Check> {
    let xd = inst.xi_dia()?;
    let worst = (0..xd.nrows()).map(|k| (xd[(k, k)].abs() - 2.0).max(0.0)).fold(0.0, f64::max);
    Ok(Check::at_most(worst, 1e-12))
}

/// Laplace-limit admittance against mu_p(R\0), and the Cesaro mean at
/// T = 100 / (smallest gap) against its bound.
pub fn admittance_and_cesaro(mu: &SpectralMeasure) -> Result<[Check; 2]> {
    let target = mu.off_zero();
    let Some(gap) = mu.min_gap() else {
        let a = static_admittance(mu, 1.0)?;
        return Ok([Check::at_most((a - &target).amax(), 1e-9), Check::at_most(0.0, 0.0)]);
    };
    let eps = 1e-6 * gap;
    let adm = static_admittance(mu, eps)?;
    let laplace = Check::at_most((adm - &target).amax(), 1e-9);
    let t = 100.0 / gap;
    let ces = cesaro_mean_atoms(mu, t);
    let mass = crate::measure::moment_norms(mu).0;
    let cesaro = Check::at_most((ces + &target).amax(), mass / (t * gap));
    Ok([laplace, cesaro])
}

/// Unitarity of U_{t1,t0} and the self-convergence order of the midpoint
/// scheme from steps dt, dt/2 against a dt/16 reference.
pub fn propagator_checks(mh: &MagneticHamiltonian, eta: f64, dt: f64) -> Result<[Check; 2]> {
    let (t0, t1) = (mh.field.t0, mh.field.t1);
    let runs: Vec<f64> = vec![dt, 0.5 * dt, dt / 16.0];
    let us: Vec<Result<_>> = crate::par_map(&runs, |&h| evolve_propagator(mh, eta, t0, t1, h));
    let us = us.into_iter().collect::<Result<Vec<_>>>()?;
    let unit = us.iter().map(|u| u.unitarity_defect()).fold(0.0, f64::max);
    let e1 = (&us[0].matrix - &us[2].matrix).camax();
    let e2 = (&us[1].matrix - &us[2].matrix).camax();
    // the reference carries 1/256 of the coarse error
    let order = ((e1 - e2 / 256.0) / (e2 - e2 / 256.0)).log2();
    Ok([Check::at_most(unit, 1e-9), Check::within(order, 1.8, 2.2)])
}

/// First law, heat positivity and vanishing potential energy after t1.
pub fn ledger_checks(run: &DriveRun, dt: f64, t1: f64) -> [Check; 3] {
    let l = &run.ledger;
    let span = l.times.last().copied().unwrap_or(0.0) - l.times.first().copied().unwrap_or(0.0);
    let first = l.first_law_residuals().0;
    let min_s = l.s.iter().copied().fold(f64::INFINITY, f64::min);
    let p_after = l.times.iter().zip(&l.p).filter(|(t, _)| **t >= t1).map(|(_, p)| p.abs()).fold(0.0, f64::max);
    [Check::at_most(first, 10.0 * dt * dt * span), Check::at_most((-min_s).max(0.0), 1e-10), Check::at_most(p_after, 1e-10)]
}

fn random_hermitian(n: usize, rng: &mut ChaCha8Rng, real: bool) -> CMat {
    let mut m = CMat::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let re = rng.gen_range(-1.0..1.0);
            let im = if real || i == j { 0.0 } else { rng.gen_range(-1.0..1.0) };
            m[(i, j)] = Complex64::new(re, im);
            m[(j, i)] = Complex64::new(re, -im);
        }
    }
    m
}

fn random_observable(n: usize, rng: &mut ChaCha8Rng, real: bool) -> QuadraticObservable {
    let mut b = QuadraticObservable::new(random_hermitian(n, rng, real));
    b.offset = Complex64::new(rng.gen_range(-1.0..1.0), 0.0);
    b
}

/// Duhamel identities on `count` random self-adjoint quadratic observables:
/// [auto-correlation bound with the beta factor, commutator identity,
/// stationarity, time-reversal symmetry], plus the auto-correlation bound
/// without the beta factor.
pub fn duhamel_checks(inst: &Instance, count: usize, seed: u64) -> Result<([Check; 4], Check)> {
    let n = inst.es.dim();
    let beta = inst.beta;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut auto, mut auto_lit, mut comm, mut stat, mut rev) = (vec![], vec![], vec![], vec![], vec![]);
    let i = Complex64::new(0.0, 1.0);
    for _ in 0..count {
        let b1 = random_observable(n, &mut rng, false);
        let b2 = random_observable(n, &mut rng, false);
        let bb = duhamel_inner_product(&inst.es, beta, &b1, &b1)?.re;
        let sq = expectation_product(&inst.dsym, &b1, &b1)?.re;
        let scale = 1.0 + sq.abs() * beta.max(1.0);
        auto.push(Check::at_most(((bb - beta * sq) / scale).max(0.0), 1e-10));
        auto_lit.push(Check::at_most(((bb - sq) / scale).max(0.0), 1e-10));

        let lhs = -i * duhamel_inner_product(&inst.es, beta, &b1, &b2.generator(&inst.h))?;
        let c = &b1.coef.adjoint();
        let commutator = QuadraticObservable::new(c * &b2.coef - &b2.coef * c);
        let rhs = expectation_quadratic(&inst.dsym, &commutator)?;
        comm.push(Check::at_most((lhs - rhs).norm() / (1.0 + rhs.norm()), 1e-10));

        let s = duhamel_inner_product(&inst.es, beta, &b1, &b1.generator(&inst.h))?;
        stat.push(Check::at_most(s.norm() / (1.0 + bb.abs()), 1e-10));

        let r1 = random_observable(n, &mut rng, true);
        let r2 = random_observable(n, &mut rng, true);
        let t = rng.gen_range(0.1..3.0);
        let f12 = duhamel_time_correlation(&inst.es, beta, &r1, &r2, &[t, -t])?;
        let f21 = duhamel_time_correlation(&inst.es, beta, &r2, &r1, &[t])?;
        let scale = 1.0 + f12[0].norm();
        let worst = f12[0].im.abs().max((f12[0] - f12[1]).norm()).max((f12[0] - f21[0]).norm());
        rev.push(Check::at_most(worst / scale, 1e-10));
    }
    Ok(([Check::worst(auto), Check::worst(comm), Check::worst(stat), Check::worst(rev)], Check::worst(auto_lit)))
}

/// Duality on an AC field space: [sigma(rho(J)) = J, Q*(J) = <J, rho(J)> =
/// Q(rho(J)), linearity of rho], on `count` random currents in range(Q).
pub fn duality_checks(q: &QuadraticFormQ, count: usize, seed: u64) -> [Check; 3] {
    let res = Resistor::new(q);
    let m = q.matrix.nrows();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut round, mut joule, mut lin) = (vec![], vec![], vec![]);
    let rho = |j: &[f64]| match res.resistivity(j) {
        Resistivity::Field { coefficients, .. } => coefficients,
        Resistivity::OutsideDomain { .. } => vec![f64::NAN; m],
    };
    for _ in 0..count {
        let c1: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let c2: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let j1 = conductivity_map(q, &c1);
        let j2 = conductivity_map(q, &c2);
        let r1 = rho(&j1);
        let back = conductivity_map(q, &r1);
        round.push(Check::at_most(back.iter().zip(&j1).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max), 1e-9));
        let pairing: f64 = j1.iter().zip(&r1).map(|(a, b)| a * b).sum();
        let qs = res.dual_form(&j1);
        joule.push(Check::at_most((qs - pairing).abs().max((pairing - q.value(&r1)).abs()), 1e-9));
        let (a, b) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let mix: Vec<f64> = j1.iter().zip(&j2).map(|(x, y)| a * x + b * y).collect();
        let r2 = rho(&j2);
        let rm = rho(&mix);
        let dev = (0..m).map(|k| (rm[k] - a * r1[k] - b * r2[k]).abs()).fold(0.0, f64::max);
        lin.push(Check::at_most(dev, 1e-10));
    }
    [Check::worst(round), Check::worst(joule), Check::worst(lin)]
}

/// H o H = -1 on the shifted field spectrum, and the Fourier-route current
/// against the time-domain convolution at time t.
pub fn hilbert_checks(mu_p: &SpectralMeasure, xi_d: &RMat, field: &FieldProfile, t: f64, nodes: usize) -> Result<[Check; 2]> {
    let full = full_conductivity_measure(mu_p, xi_d);
    let r = hilbert_range(&full, field);
    let grid = symmetric_grid(r, nodes);
    let spec = FieldSpectrum::new(field, r);
    let g: Vec<Complex64> = crate::par_map(&grid, |&nu| spec.shifted(nu, t));
    let inv = Check::at_most(hilbert_involution_defect(&grid, &g)?, 0.05);
    let fr = fourier_ohm_current(&full, field, t, nodes)?;
    let steps = (t - field.t0) / 0.0025;
    let m = steps.ceil().max(1.0) as usize;
    let h = (t - field.t0) / m as f64;
    let lags: Vec<f64> = (0..=m).map(|i| i as f64 * h).collect();
    let kernel = eval_xi_from_measure(mu_p, &lags, KernelMeta::default());
    let td = linear_currents(&kernel, xi_d, field, t)?;
    let diff = td.total.iter().zip(&fr.current).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok([inv, Check::at_most(diff, fr.grid_tolerance.max(1e-6))])
}

/// Heat form on `modes` cosine/sine pairs over [t0, t0 + window].
pub fn heat_form_for(mu_p: &SpectralMeasure, field: &FieldProfile, modes: usize, window: f64) -> Result<QuadraticFormQ> {
    heat_form(mu_p, &field.w, &ACFieldSpace::new(field.t0, field.t0 + window, modes)?)
}
