//! Stage orchestration, result bundles, CSV/JSON export and ensemble sweeps.

use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::dynamics::{drive, ohm_joule_scaling_check, EnergyLedger, ScalingReport, ScalingSetup};
use crate::error::{Error, Result};
use crate::lattice::{MagneticHamiltonian, RMat};
use crate::measure::{eval_xi_from_measure, Atom, SpectralMeasure};
use crate::response::linear_currents_series;
use crate::spectral::expectation_quadratic;
use crate::transport::{thermal_current, xi_para, TransportKernel};
use crate::verify::{self, Check, Instance, Report};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Equilibrium,
    Transport,
    Measure,
    Drive,
    Joule,
    Verify,
}

pub const ALL_STAGES: [Stage; 6] = [Stage::Equilibrium, Stage::Transport, Stage::Measure, Stage::Drive, Stage::Joule, Stage::Verify];

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Equilibrium => "equilibrium",
            Stage::Transport => "transport",
            Stage::Measure => "measure",
            Stage::Drive => "drive",
            Stage::Joule => "joule",
            Stage::Verify => "verify",
        }
    }

    /// Direct prerequisites.
    pub fn requires(self) -> &'static [Stage] {
        match self {
            Stage::Equilibrium => &[],
            Stage::Transport | Stage::Measure | Stage::Verify => &[Stage::Equilibrium],
            Stage::Drive => &[Stage::Equilibrium, Stage::Measure],
            Stage::Joule => &[Stage::Drive, Stage::Measure],
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Stage {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ALL_STAGES
            .iter()
            .copied()
            .find(|st| st.name() == s.trim())
            .ok_or_else(|| Error::Config { field: "stages".into(), msg: format!("unknown stage `{s}`") })
    }
}

pub fn parse_stages(list: &str) -> Result<Vec<Stage>> {
    list.split(',').filter(|s| !s.trim().is_empty()).map(Stage::from_str).collect()
}

/// Requested stages plus everything they depend on, in pipeline order.
pub fn close_stages(requested: &[Stage]) -> Vec<Stage> {
    let mut set: Vec<Stage> = requested.to_vec();
    let mut i = 0;
    while i < set.len() {
        for dep in set[i].requires() {
            if !set.contains(dep) {
                set.push(*dep);
            }
        }
        i += 1;
    }
    set.sort();
    set.dedup();
    set
}

/// Every stage's prerequisites must be in the list itself.
pub fn check_stages(stages: &[Stage]) -> Result<()> {
    for st in stages {
        for dep in st.requires() {
            if !stages.contains(dep) {
                return Err(Error::Stage { stage: st.name().into(), missing: dep.name().into() });
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumSummary {
    pub n_sites: usize,
    pub averaging_sites: usize,
    pub energy_min: f64,
    pub energy_max: f64,
    pub particle_number: f64,
    pub internal_energy: f64,
    pub thermal_current: Vec<f64>,
    pub xi_dia: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriveSeries {
    pub eta: f64,
    pub times: Vec<f64>,
    pub jp: Vec<Vec<f64>>,
    pub jd: Vec<Vec<f64>>,
    /// eta times the linear-response total current
    pub jlin: Vec<Vec<f64>>,
    pub ledger: EnergyLedger,
    pub continuity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelTable {
    pub times: Vec<f64>,
    pub values: Vec<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureTable {
    pub dim: usize,
    pub nu: Vec<f64>,
    pub weights: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultBundle {
    pub config_hash: String,
    pub version: String,
    pub seed: u64,
    pub stages: Vec<Stage>,
    pub equilibrium: Option<EquilibriumSummary>,
    pub xi_para: Option<KernelTable>,
    pub measure: Option<MeasureTable>,
    pub drives: Vec<DriveSeries>,
    pub scaling: Option<ScalingReport>,
    pub verify: Option<Report>,
}

fn mat_rows(m: &RMat) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

fn rows_mat(rows: &[Vec<f64>], d: usize) -> RMat {
    RMat::from_fn(d, d, |i, j| rows[i][j])
}

impl KernelTable {
    pub fn from_kernel(k: &TransportKernel) -> Self {
        KernelTable { times: k.times.clone(), values: k.values.iter().map(mat_rows).collect() }
    }
}

impl MeasureTable {
    pub fn from_measure(mu: &SpectralMeasure) -> Self {
        MeasureTable {
            dim: mu.dim,
            nu: mu.atoms.iter().map(|a| a.nu).collect(),
            weights: mu.atoms.iter().map(|a| a.weight.iter().copied().collect::<Vec<f64>>()).collect(),
        }
    }

    pub fn to_measure(&self) -> SpectralMeasure {
        let d = self.dim;
        SpectralMeasure {
            dim: d,
            atoms: self
                .nu
                .iter()
                .zip(&self.weights)
                .map(|(&nu, w)| Atom { nu, weight: RMat::from_fn(d, d, |i, j| w[i * d + j]) })
                .collect(),
        }
    }
}

/// Runs the stages (strictly validated) on the config's first seed.
pub fn run_pipeline(cfg: &RunConfig, stages: &[Stage]) -> Result<ResultBundle> {
    check_stages(stages)?;
    cfg.validate()?;
    let mut stages = stages.to_vec();
    stages.sort();
    stages.dedup();
    let has = |s: Stage| stages.contains(&s);
    let bx = cfg.lattice_box()?;
    let pot = cfg.potential(&bx);
    let inst = Instance::new(bx, pot, cfg.lambda, cfg.beta, cfg.l)?;
    let field = cfg.field_profile()?;
    let mut bundle = ResultBundle {
        config_hash: cfg.hash(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed: cfg.seed,
        stages: stages.clone(),
        equilibrium: None,
        xi_para: None,
        measure: None,
        drives: vec![],
        scaling: None,
        verify: None,
    };
    let xd = inst.xi_dia()?;
    if has(Stage::Equilibrium) {
        let n = inst.es.dim();
        let number = inst.dsym.matrix.diagonal().iter().map(|z| z.re).sum();
        let energy = expectation_quadratic(&inst.dsym, &crate::spectral::QuadraticObservable::new(inst.h.clone()))?.re;
        bundle.equilibrium = Some(EquilibriumSummary {
            n_sites: n,
            averaging_sites: inst.volume() as usize,
            energy_min: inst.es.values[0],
            energy_max: inst.es.values[n - 1],
            particle_number: number,
            internal_energy: energy,
            thermal_current: thermal_current(&inst.dsym, &inst.bx, inst.l)?,
            xi_dia: mat_rows(&xd),
        });
    }
    if has(Stage::Transport) {
        let k = xi_para(&inst.es, inst.beta, &inst.bx, inst.l, &cfg.xi_times(), inst.meta())?;
        bundle.xi_para = Some(KernelTable::from_kernel(&k));
    }
    let mu = if has(Stage::Measure) { Some(inst.measure()?) } else { None };
    if let Some(mu) = &mu {
        bundle.measure = Some(MeasureTable::from_measure(mu));
    }
    if has(Stage::Drive) {
        let mu = mu.as_ref().expect("drive requires measure");
        let mh = MagneticHamiltonian::new(&inst.bx, &inst.pot, inst.lambda, &field)?;
        let runs: Vec<Result<DriveSeries>> = crate::par_map(&cfg.etas, |&eta| {
            let run = drive(&mh, &inst.bx, inst.beta, eta, inst.l, cfg.t_end(), cfg.dt())?;
            let h = if run.times.len() > 1 { run.times[1] - run.times[0] } else { cfg.dt() };
            let lags: Vec<f64> = (0..run.times.len()).map(|i| i as f64 * h).collect();
            let kernel = eval_xi_from_measure(mu, &lags, inst.meta());
            let lin = linear_currents_series(&kernel, &xd, &field, &run.times)?;
            Ok(DriveSeries {
                eta,
                jlin: lin.iter().map(|c| c.total.iter().map(|v| eta * v).collect()).collect(),
                times: run.times,
                jp: run.jp,
                jd: run.jd,
                ledger: run.ledger,
                continuity: run.continuity,
            })
        });
        bundle.drives = runs.into_iter().collect::<Result<_>>()?;
    }
    if has(Stage::Joule) {
        let setup = ScalingSetup {
            bx: inst.bx.clone(),
            pot: inst.pot.clone(),
            lambda: inst.lambda,
            beta: inst.beta,
            l: inst.l,
            field: field.clone(),
            t_end: cfg.t_end(),
            dt: cfg.dt(),
        };
        bundle.scaling = Some(ohm_joule_scaling_check(&setup, &cfg.etas)?);
    }
    if has(Stage::Verify) {
        bundle.verify = Some(verify_suite(cfg, &inst)?);
    }
    Ok(bundle)
}

/// The full identity suite on one instance.
pub fn verify_suite(cfg: &RunConfig, inst: &Instance) -> Result<Report> {
    let mut r = Report::new();
    let mut put = |name: &str, c: Check| {
        r.insert(name.to_string(), c);
    };
    let times = cfg.xi_times();
    let mu = inst.measure()?;
    let xd = inst.xi_dia()?;
    let field = cfg.field_profile()?;
    put("green_kubo", verify::green_kubo(inst, &times)?);
    let [cos, psd, sym, mass] = verify::measure_identities(inst, &mu, &times)?;
    put("measure_cosine_reconstruction", cos);
    put("measure_atoms_psd", psd);
    put("measure_symmetry", sym);
    put("measure_total_mass", mass);
    let ([_, first, first_gen], mass_beta) = verify::moment_checks(inst, &mu)?;
    put("moment_mass_beta_weighted", mass_beta);
    put("moment_first", first);
    put("moment_first_generator", first_gen);
    if inst.es.dim() > 1 {
        put("measure_nontrivial", verify::nontriviality(inst, &mu)?);
    }
    let [z, even, msym, nsd] = verify::xi_structure(inst, &times)?;
    put("xi_para_zero", z);
    put("xi_para_even", even);
    put("xi_para_symmetric", msym);
    put("xi_para_nsd", nsd);
    put("xi_dia_range", verify::xi_dia_range(inst)?);
    let [lap, ces] = verify::admittance_and_cesaro(&mu)?;
    put("static_admittance", lap);
    put("cesaro_mean", ces);
    let mh = MagneticHamiltonian::new(&inst.bx, &inst.pot, inst.lambda, &field)?;
    let eta = cfg.etas[0];
    let coarse = (field.t1 - field.t0) / 100.0;
    let [unit, order] = verify::propagator_checks(&mh, eta, coarse)?;
    put("propagator_unitarity", unit);
    put("propagator_order", order);
    let run = drive(&mh, &inst.bx, inst.beta, eta, inst.l, cfg.t_end(), cfg.dt())?;
    let [first_law, passive, off] = verify::ledger_checks(&run, cfg.dt(), field.t1);
    put("first_law", first_law);
    put("heat_positive", passive);
    put("potential_energy_after_pulse", off);
    let ([auto, comm, stat, rev], _) = verify::duhamel_checks(inst, 20, cfg.seed)?;
    put("duhamel_auto_correlation_beta_weighted", auto);
    put("duhamel_commutator", comm);
    put("duhamel_stationarity", stat);
    put("duhamel_time_reversal", rev);
    let q = verify::heat_form_for(&mu, &field, cfg.grids.ac_modes, cfg.grids.ac_window)?;
    let [round, joule, lin] = verify::duality_checks(&q, 10, cfg.seed);
    put("duality_round_trip", round);
    put("duality_joule_identity", joule);
    put("duality_linearity", lin);
    let [inv, route] = verify::hilbert_checks(&mu, &xd, &field, field.t1, cfg.grids.hilbert_nodes)?;
    put("hilbert_involution", inv);
    put("fourier_route", route);
    Ok(r)
}

pub fn all_pass(r: &Report) -> bool {
    r.values().all(|c| c.pass)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

fn hash_line(hash: &str) -> String {
    format!("# config_hash={hash}\n")
}

fn csv_writer(path: &Path, hash: &str) -> Result<csv::Writer<File>> {
    let mut f = File::create(path)?;
    f.write_all(hash_line(hash).as_bytes())?;
    Ok(csv::Writer::from_writer(f))
}

fn num(v: f64) -> String {
    // shortest representation that parses back to the same bits
    format!("{v:?}")
}

/// Writes the bundle; returns the files written.
pub fn export(bundle: &ResultBundle, dir: &Path, format: Format) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut out = Vec::new();
    if format == Format::Json {
        let p = dir.join("bundle.json");
        std::fs::write(&p, serde_json::to_string_pretty(bundle)?)?;
        return Ok(vec![p]);
    }
    let hash = &bundle.config_hash;
    if let Some(k) = &bundle.xi_para {
        let p = dir.join("xi_para.csv");
        let mut w = csv_writer(&p, hash)?;
        w.write_record(["t", "k", "q", "value"])?;
        for (t, m) in k.times.iter().zip(&k.values) {
            for (i, row) in m.iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    w.write_record([num(*t), (i + 1).to_string(), (j + 1).to_string(), num(*v)])?;
                }
            }
        }
        w.flush()?;
        out.push(p);
    }
    if let Some(m) = &bundle.measure {
        let p = dir.join("measure_atoms.csv");
        let mut w = csv_writer(&p, hash)?;
        let mut head = vec!["nu".to_string()];
        for i in 1..=m.dim {
            for j in 1..=m.dim {
                head.push(format!("M_{i}{j}"));
            }
        }
        w.write_record(&head)?;
        for (nu, wt) in m.nu.iter().zip(&m.weights) {
            let mut rec = vec![num(*nu)];
            rec.extend(wt.iter().map(|v| num(*v)));
            w.write_record(&rec)?;
        }
        w.flush()?;
        out.push(p);
        let side = dir.join("measure.json");
        std::fs::write(&side, serde_json::to_string_pretty(&serde_json::json!({ "config_hash": hash, "measure": m }))?)?;
        out.push(side);
    }
    if !bundle.drives.is_empty() {
        let d = bundle.drives[0].jp.first().map_or(0, |v| v.len());
        let p = dir.join("currents.csv");
        let mut w = csv_writer(&p, hash)?;
        let mut head = vec!["t".to_string(), "eta".to_string()];
        for pre in ["Jp", "Jd", "Jlin"] {
            head.extend((1..=d).map(|k| format!("{pre}_{k}")));
        }
        w.write_record(&head)?;
        for s in &bundle.drives {
            for i in 0..s.times.len() {
                let mut rec = vec![num(s.times[i]), num(s.eta)];
                for col in [&s.jp[i], &s.jd[i], &s.jlin[i]] {
                    rec.extend(col.iter().map(|v| num(*v)));
                }
                w.write_record(&rec)?;
            }
        }
        w.flush()?;
        out.push(p);
        let p = dir.join("energies.csv");
        let mut w = csv_writer(&p, hash)?;
        w.write_record(["t", "eta", "S", "P", "Ip", "Id", "work"])?;
        for s in &bundle.drives {
            let l = &s.ledger;
            for i in 0..l.times.len() {
                w.write_record([l.times[i], s.eta, l.s[i], l.p[i], l.ip[i], l.id[i], l.work[i]].map(num))?;
            }
        }
        w.flush()?;
        out.push(p);
    }
    if let Some(r) = &bundle.verify {
        let p = dir.join("verify_report.json");
        std::fs::write(&p, serde_json::to_string_pretty(r)?)?;
        out.push(p);
    }
    let p = dir.join("summary.json");
    let summary = serde_json::json!({
        "config_hash": hash,
        "version": bundle.version,
        "seed": bundle.seed,
        "stages": bundle.stages,
        "equilibrium": bundle.equilibrium,
        "scaling": bundle.scaling,
    });
    std::fs::write(&p, serde_json::to_string_pretty(&summary)?)?;
    out.push(p);
    Ok(out)
}

/// Reads a CSV written by `export`: (config hash, header, numeric rows).
pub fn read_table(path: &Path) -> Result<(String, Vec<String>, Vec<Vec<f64>>)> {
    let mut reader = BufReader::new(File::open(path)?);
    let mut first = String::new();
    reader.read_line(&mut first)?;
    let hash = first
        .trim()
        .strip_prefix("# config_hash=")
        .ok_or_else(|| Error::Domain(format!("{} lacks the config hash line", path.display())))?
        .to_string();
    let mut rdr = csv::Reader::from_reader(reader);
    let header = rdr.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|f| f.parse::<f64>().map_err(|e| Error::Domain(format!("bad number `{f}`: {e}"))))
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok((hash, header, rows))
}

pub fn read_xi_para(path: &Path) -> Result<KernelTable> {
    let (_, _, rows) = read_table(path)?;
    let d = rows.iter().map(|r| r[1] as usize).max().unwrap_or(0);
    let mut out = KernelTable { times: vec![], values: vec![] };
    for chunk in rows.chunks(d * d) {
        out.times.push(chunk[0][0]);
        let mut m = vec![vec![0.0; d]; d];
        for r in chunk {
            m[r[1] as usize - 1][r[2] as usize - 1] = r[3];
        }
        out.values.push(m);
    }
    Ok(out)
}

pub fn read_measure(path: &Path) -> Result<MeasureTable> {
    let (_, header, rows) = read_table(path)?;
    let dim = ((header.len() - 1) as f64).sqrt().round() as usize;
    Ok(MeasureTable { dim, nu: rows.iter().map(|r| r[0]).collect(), weights: rows.iter().map(|r| r[1..].to_vec()).collect() })
}

pub fn read_ledger(path: &Path) -> Result<Vec<(f64, EnergyLedger)>> {
    let (_, _, rows) = read_table(path)?;
    let mut out: Vec<(f64, EnergyLedger)> = Vec::new();
    for r in rows {
        if out.last().is_none_or(|(eta, _)| *eta != r[1]) {
            out.push((r[1], EnergyLedger::default()));
        }
        let l = &mut out.last_mut().unwrap().1;
        l.times.push(r[0]);
        l.s.push(r[2]);
        l.p.push(r[3]);
        l.ip.push(r[4]);
        l.id.push(r[5]);
        l.work.push(r[6]);
    }
    Ok(out)
}

pub fn read_bundle(path: &Path) -> Result<ResultBundle> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

/// Rebuilds the matrix kernel of a table.
pub fn kernel_from_table(t: &KernelTable) -> TransportKernel {
    let d = t.values.first().map_or(0, |m| m.len());
    TransportKernel {
        times: t.times.clone(),
        values: t.values.iter().map(|m| rows_mat(m, d)).collect(),
        meta: Default::default(),
    }
}

/// One bundle per seed, each with its own potential; runs in parallel and
/// returns them in seed order.
pub fn sweep(cfg: &RunConfig, stages: &[Stage]) -> Result<Vec<ResultBundle>> {
    let seeds = cfg.seeds();
    crate::par_map(&seeds, |&s| run_pipeline(&cfg.with_seed(s), stages)).into_iter().collect()
}

/// Exports a sweep into one sub-directory per seed.
pub fn export_sweep(bundles: &[ResultBundle], dir: &Path, format: Format) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for b in bundles {
        out.extend(export(b, &dir.join(format!("seed_{}", b.seed)), format)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> RunConfig {
        crate::config::from_json_str(
            r#"{"d":1,"l":1,"L":3,"beta":1,"lambda":1,"seed":2,"buffer":2,"etas":[0.2,0.1,0.05],
                "field":{"t1":1},"dt":0.01,"t_after":0.5,"grids":{"xi_points":40,"xi_t_max":4,"ac_modes":3}}"#,
        )
        .unwrap()
    }

    #[test]
    fn stage_parsing_and_closure() {
        assert_eq!(parse_stages("equilibrium, drive").unwrap(), vec![Stage::Equilibrium, Stage::Drive]);
        assert!(parse_stages("equilibrium,bogus").is_err());
        assert_eq!(close_stages(&[Stage::Joule]), vec![Stage::Equilibrium, Stage::Measure, Stage::Drive, Stage::Joule]);
        assert!(matches!(check_stages(&[Stage::Joule]), Err(Error::Stage { .. })));
        assert!(check_stages(&close_stages(&[Stage::Verify])).is_ok());
        assert_eq!(Stage::Drive.to_string(), "drive");
    }

    #[test]
    fn equilibrium_only() {
        let b = run_pipeline(&small(), &[Stage::Equilibrium]).unwrap();
        let e = b.equilibrium.unwrap();
        assert_eq!(e.n_sites, 7);
        assert!(e.thermal_current.iter().all(|v| v.abs() < 1e-14));
        assert!(b.xi_para.is_none() && b.measure.is_none() && b.drives.is_empty());
        assert!(matches!(run_pipeline(&small(), &[Stage::Joule]), Err(Error::Stage { .. })));
    }

    #[test]
    fn export_round_trip_and_determinism() {
        let cfg = small();
        let stages = [Stage::Equilibrium, Stage::Transport, Stage::Measure, Stage::Drive];
        let b = run_pipeline(&cfg, &stages).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let files = export(&b, dir.path(), Format::Csv).unwrap();
        assert!(files.iter().any(|p| p.ends_with("energies.csv")));
        for f in files.iter().filter(|p| p.extension().is_some_and(|e| e == "csv")) {
            let (hash, _, _) = read_table(f).unwrap();
            assert_eq!(hash, b.config_hash);
        }
        let k = read_xi_para(&dir.path().join("xi_para.csv")).unwrap();
        assert_eq!(&k, b.xi_para.as_ref().unwrap());
        let m = read_measure(&dir.path().join("measure_atoms.csv")).unwrap();
        assert_eq!(&m, b.measure.as_ref().unwrap());
        assert_eq!(m.to_measure(), MeasureTable::from_measure(&m.to_measure()).to_measure());
        let led = read_ledger(&dir.path().join("energies.csv")).unwrap();
        assert_eq!(led.len(), 3);
        assert_eq!(led[1].1, b.drives[1].ledger);
        let (_, header, _) = read_table(&dir.path().join("energies.csv")).unwrap();
        assert_eq!(header, ["t", "eta", "S", "P", "Ip", "Id", "work"]);
        let (_, header, _) = read_table(&dir.path().join("currents.csv")).unwrap();
        assert_eq!(header, ["t", "eta", "Jp_1", "Jd_1", "Jlin_1"]);

        let again = run_pipeline(&cfg, &stages).unwrap();
        let dir2 = tempfile::tempdir().unwrap();
        export(&again, dir2.path(), Format::Csv).unwrap();
        for name in ["xi_para.csv", "measure_atoms.csv", "currents.csv", "energies.csv"] {
            assert_eq!(std::fs::read(dir.path().join(name)).unwrap(), std::fs::read(dir2.path().join(name)).unwrap(), "{name}");
        }

        let jdir = tempfile::tempdir().unwrap();
        let p = export(&b, jdir.path(), Format::Json).unwrap();
        assert_eq!(read_bundle(&p[0]).unwrap(), b);
    }

    #[test]
    fn empty_measure_exports_header_only() {
        let b = ResultBundle {
            config_hash: "abc".into(),
            version: "0".into(),
            seed: 0,
            stages: vec![Stage::Measure],
            equilibrium: None,
            xi_para: None,
            measure: Some(MeasureTable::from_measure(&SpectralMeasure::empty(2))),
            drives: vec![],
            scaling: None,
            verify: None,
        };
        let dir = tempfile::tempdir().unwrap();
        export(&b, dir.path(), Format::Csv).unwrap();
        let (hash, header, rows) = read_table(&dir.path().join("measure_atoms.csv")).unwrap();
        assert_eq!(hash, "abc");
        assert_eq!(header, ["nu", "M_11", "M_12", "M_21", "M_22"]);
        assert!(rows.is_empty());
    }

    #[test]
    fn verify_small_reference_passes() {
        let b = run_pipeline(&small(), &close_stages(&[Stage::Verify])).unwrap();
        let r = b.verify.unwrap();
        let failed: Vec<_> = r.iter().filter(|(_, c)| !c.pass).collect();
        assert!(failed.is_empty(), "{failed:?}");
        assert!(r.len() >= 30);
    }

    #[test]
    fn sweep_gives_independent_realizations() {
        let mut cfg = small();
        cfg.seeds = vec![5, 6];
        let bs = sweep(&cfg, &[Stage::Equilibrium]).unwrap();
        assert_eq!(bs.iter().map(|b| b.seed).collect::<Vec<_>>(), vec![5, 6]);
        assert_ne!(bs[0].equilibrium, bs[1].equilibrium);
        assert_ne!(bs[0].config_hash, bs[1].config_hash);
        let solo = run_pipeline(&cfg.with_seed(6), &[Stage::Equilibrium]).unwrap();
        assert_eq!(solo, bs[1]);
    }
}
