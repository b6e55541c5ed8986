//! Subcommand implementations. Each returns the exit code on success paths
//! that are not errors (a failed check is exit 1, not an `Err`).

use std::path::{Path, PathBuf};
use std::str::FromStr;

use harmonic_core::density::DensityModel;
use harmonic_core::eigen::{c_function_table, solve_phi};
use harmonic_core::oracle::{jacobi_c, jacobi_phi, JacobiParams};
use harmonic_core::{Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::cache::{sha256_hex, write_atomic, Cache};
use crate::config::{CachePolicy, RunConfig};
use crate::suites::{self, KunzeSteinOptions, Suite};
use crate::table::Table;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Smallest radius used for the hypothesis check; the G-decay fit needs room.
const CHECK_R_MIN: f64 = 40.0;

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Numeric { .. } | Error::Singularity(_) | Error::Degenerate(_) => 2,
        _ => 1,
    }
}

/// Where outputs go and how the cache behaves, after command-line overrides.
#[derive(Debug, Clone)]
pub struct Output {
    pub dir: PathBuf,
    pub cache: CachePolicy,
}

impl Output {
    pub fn resolve(cfg: &RunConfig, out: Option<&Path>, cache: Option<CachePolicy>) -> Self {
        let dir = match (out, &cfg.out_dir) {
            (Some(d), _) => d.to_path_buf(),
            (None, Some(d)) => cfg.base_dir.join(d),
            (None, None) => PathBuf::from("."),
        };
        Output { dir, cache: cache.unwrap_or(cfg.cache) }
    }

    fn write(&self, name: &str, table: &Table) -> Result<PathBuf> {
        let path = self.dir.join(name);
        write_atomic(&path, table.to_csv()?.as_bytes())
            .map_err(|e| Error::Validation(format!("cannot write {}: {e}", path.display())))?;
        Ok(path)
    }
}

fn stamp(table: &mut Table, cfg: &RunConfig, model: &DensityModel, kind: &str) -> Result<()> {
    table.push_meta("artifact", kind);
    table.push_meta("version", VERSION);
    table.push_meta("model", model.label());
    table.push_meta("config-hash", sha256_hex(&[&cfg.closure()?]));
    Ok(())
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}

pub fn check_model(cfg: &RunConfig, out: &Output) -> Result<i32> {
    let model = cfg.build_model()?;
    let r_max = cfg.r_max.max(CHECK_R_MIN);
    let rep = model.check_hypotheses(r_max, cfg.tol)?;
    let mut t = Table::new(&["check", "value"]);
    stamp(&mut t, cfg, &model, "check-model")?;
    t.push_meta("r-max", format!("{r_max:e}"));
    for (i, d) in rep.details.iter().enumerate() {
        t.push_meta(&format!("detail-{i}"), d.replace(['\n', '\r'], " "));
    }
    for (name, ok) in [
        ("h1", rep.h1ok),
        ("h2", rep.h2ok),
        ("h3", rep.h3ok),
        ("h4", rep.h4ok),
        ("alpha_half_excluded", rep.alpha_half_excluded),
        ("all_pass", rep.all_pass()),
    ] {
        t.push_row(vec![name.into(), ok.into()])?;
    }
    t.push_row(vec!["alpha".into(), model.alpha().into()])?;
    t.push_row(vec!["rho".into(), model.rho().into()])?;
    t.push_row(vec!["g_tail_constant".into(), rep.g_tail_constant.into()])?;
    t.push_row(vec!["g_tail_slope".into(), rep.g_tail_slope.into()])?;
    t.push_row(vec!["g_decay_rate".into(), rep.g_decay_rate.into()])?;
    out.write("check_model.csv", &t)?;
    if !rep.alpha_half_excluded {
        eprintln!("alpha = {} hits the excluded value |alpha| = 1/2", model.alpha());
    }
    Ok(if rep.all_pass() { 0 } else { 1 })
}

fn require_hypotheses(cfg: &RunConfig, model: &DensityModel) -> Result<()> {
    let rep = model.check_hypotheses(cfg.r_max.max(CHECK_R_MIN), cfg.tol)?;
    if rep.hypotheses_hold() {
        Ok(())
    } else {
        Err(Error::Validation(format!("model {} fails its hypotheses: {}", model.label(), rep.details.join("; "))))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableKind {
    Phi,
    C,
    PlancherelDensity,
}

impl FromStr for TableKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "phi" => Ok(TableKind::Phi),
            "c" => Ok(TableKind::C),
            "plancherel-density" => Ok(TableKind::PlancherelDensity),
            other => Err(format!("unknown table {other:?} (expected phi, c or plancherel-density)")),
        }
    }
}

impl TableKind {
    pub fn name(self) -> &'static str {
        match self {
            TableKind::Phi => "phi",
            TableKind::C => "c",
            TableKind::PlancherelDensity => "plancherel-density",
        }
    }
}

fn phi_table(cfg: &RunConfig, model: &DensityModel) -> Result<Table> {
    let lambdas = linspace(0.0, cfg.lambda_max, cfg.lambda_points);
    let rs = linspace(0.0, cfg.r_max, cfg.r_points);
    let solved = lambdas
        .par_iter()
        .map(|&l| solve_phi(model, Complex64::new(l, 0.0), &rs, cfg.tol))
        .collect::<Result<Vec<_>>>()?;
    let mut t = Table::new(&["lambda", "r", "phi_re", "phi_im", "dphi_re", "dphi_im"]);
    stamp(&mut t, cfg, model, "phi")?;
    let achieved = solved.iter().map(|s| s.achieved).fold(0.0, f64::max);
    t.push_meta("achieved-tol", format!("{achieved:e}"));
    for (l, s) in lambdas.iter().zip(&solved) {
        for ((r, p), d) in rs.iter().zip(&s.phi).zip(&s.phi_prime) {
            t.push_row(vec![(*l).into(), (*r).into(), p.re.into(), p.im.into(), d.re.into(), d.im.into()])?;
        }
    }
    Ok(t)
}

fn c_table(cfg: &RunConfig, model: &DensityModel) -> Result<Table> {
    let lambdas = positive_lambdas(cfg);
    let tab = c_function_table(model, &lambdas, cfg.tol)?;
    let mut t = Table::new(&["lambda", "c_re", "c_im", "c_abs_inv_sq"]);
    stamp(&mut t, cfg, model, "c")?;
    t.push_meta("error-bound", format!("{:e}", tab.error_bound));
    for ((l, c), d) in lambdas.iter().zip(&tab.c_values).zip(&tab.c_abs_inv_sq) {
        t.push_row(vec![(*l).into(), c.re.into(), c.im.into(), (*d).into()])?;
    }
    Ok(t)
}

/// |c|⁻² on a logarithmic grid wide enough for both growth regimes.
fn plancherel_density_table(cfg: &RunConfig, model: &DensityModel) -> Result<Table> {
    let (lo, hi) = (1e-3f64, cfg.lambda_max.max(40.0));
    let n = cfg.lambda_points;
    let lambdas: Vec<f64> = (0..n).map(|k| lo * (hi / lo).powf(k as f64 / (n - 1) as f64)).collect();
    let tab = c_function_table(model, &lambdas, cfg.tol)?;
    let mut t = Table::new(&["lambda", "c_abs_inv_sq", "c_abs_inv"]);
    stamp(&mut t, cfg, model, "plancherel-density")?;
    t.push_meta("error-bound", format!("{:e}", tab.error_bound));
    t.push_meta("expected-slope-small", "1");
    t.push_meta("expected-slope-large", format!("{}", model.alpha() + 0.5));
    if let Some(fit) = &tab.fit {
        t.push_meta("slope-small", format!("{:.16e}", fit.slope_small));
        t.push_meta("slope-large", format!("{:.16e}", fit.slope_large));
        t.push_meta("constant-small", format!("{:.16e} {:.16e}", fit.constant_small.0, fit.constant_small.1));
        t.push_meta("constant-large", format!("{:.16e} {:.16e}", fit.constant_large.0, fit.constant_large.1));
    }
    for (l, d) in lambdas.iter().zip(&tab.c_abs_inv_sq) {
        t.push_row(vec![(*l).into(), (*d).into(), d.sqrt().into()])?;
    }
    Ok(t)
}

/// Writes `<what>.csv`, reusing a cached copy when the configuration closure
/// matches byte for byte.
pub fn tables(cfg: &RunConfig, what: TableKind, out: &Output) -> Result<PathBuf> {
    let key = sha256_hex(&["tables", VERSION, what.name(), &cfg.closure()?]);
    let cache = Cache::new(out.dir.join(".cache"), out.cache);
    let name = format!("{}.csv", what.name());
    let bytes = match cache.get(&key) {
        Some(b) => b,
        None => {
            let model = cfg.build_model()?;
            require_hypotheses(cfg, &model)?;
            let t = match what {
                TableKind::Phi => phi_table(cfg, &model)?,
                TableKind::C => c_table(cfg, &model)?,
                TableKind::PlancherelDensity => plancherel_density_table(cfg, &model)?,
            };
            let b = t.to_csv()?.into_bytes();
            cache.put(&key, &b).map_err(|e| Error::Validation(format!("cache write failed: {e}")))?;
            b
        }
    };
    let path = out.dir.join(name);
    write_atomic(&path, &bytes).map_err(|e| Error::Validation(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

pub fn verify(cfg: &RunConfig, suite: Suite, ks: &KunzeSteinOptions, out: &Output) -> Result<i32> {
    let model = cfg.build_model()?;
    require_hypotheses(cfg, &model)?;
    let rows = suites::run(cfg, &model, suite, ks)?;
    let mut t = Table::new(&["name", "lhs", "rhs", "abs_err", "rel_err", "tol", "pass"]);
    stamp(&mut t, cfg, &model, "verify")?;
    t.push_meta("suite", suite.name());
    let mut failed = 0;
    for r in &rows {
        if !r.pass {
            failed += 1;
            eprintln!("FAIL {}: rel_err {:e} > tol {:e}", r.name, r.rel_err, r.tol);
        }
        t.push_row(vec![
            r.name.replace(',', ";").as_str().into(),
            r.lhs.into(),
            r.rhs.into(),
            r.abs_err.into(),
            r.rel_err.into(),
            r.tol.into(),
            r.pass.into(),
        ])?;
    }
    out.write(&format!("verify_{}.csv", suite.name()), &t)?;
    eprintln!("{} of {} rows pass", rows.len() - failed, rows.len());
    Ok(if failed == 0 { 0 } else { 1 })
}

/// λ_k = λmax·k/N, k = 1..N.
fn positive_lambdas(cfg: &RunConfig) -> Vec<f64> {
    let n = cfg.lambda_points;
    (1..=n).map(|k| cfg.lambda_max * k as f64 / n as f64).collect()
}

/// Closed-form Jacobi values on the configured grids, for external comparison.
/// λ = 0 is left out: it is the logarithmic case of the connection formula.
pub fn oracle_dump(cfg: &RunConfig, out: &Output) -> Result<()> {
    let model = cfg.build_model()?;
    let params = JacobiParams::for_model(&model)?;
    let lambdas = positive_lambdas(cfg);
    let rs = linspace(0.0, cfg.r_max, cfg.r_points);
    let mut phi = Table::new(&["lambda", "r", "phi_re", "phi_im"]);
    stamp(&mut phi, cfg, &model, "oracle-phi")?;
    for &l in &lambdas {
        for &r in &rs {
            let v = jacobi_phi(&params, Complex64::new(l, 0.0), r / params.variable_scale)?;
            phi.push_row(vec![l.into(), r.into(), v.re.into(), v.im.into()])?;
        }
    }
    out.write("oracle_phi.csv", &phi)?;
    let mut c = Table::new(&["lambda", "c_re", "c_im", "c_abs_inv_sq"]);
    stamp(&mut c, cfg, &model, "oracle-c")?;
    for &l in &lambdas {
        let v = jacobi_c(&params, Complex64::new(l, 0.0))?;
        c.push_row(vec![l.into(), v.re.into(), v.im.into(), v.norm_sqr().recip().into()])?;
    }
    out.write("oracle_c.csv", &c)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Validation("x".into())), 1);
        assert_eq!(exit_code(&Error::Parse { line: 1, msg: "x".into() }), 1);
        assert_eq!(exit_code(&Error::Capability("x".into())), 1);
        assert_eq!(exit_code(&Error::Singularity("x".into())), 2);
    }

    #[test]
    fn table_kinds() {
        for k in [TableKind::Phi, TableKind::C, TableKind::PlancherelDensity] {
            assert_eq!(k.name().parse::<TableKind>().unwrap(), k);
        }
        assert!("psi".parse::<TableKind>().is_err());
    }
}
