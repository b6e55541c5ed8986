//! Run configuration: the model keys plus numeric knobs, one `key = value`
//! per line.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use harmonic_core::density::io::{parse_key_values, Entry, ModelSpec, MODEL_KEYS};
use harmonic_core::density::DensityModel;
use harmonic_core::{Error, Result};

pub const KNOB_KEYS: [&str; 10] = [
    "r-max",
    "lambda-max",
    "tol",
    "r-points",
    "lambda-points",
    "quad-order",
    "seed",
    "verify-tol",
    "out",
    "cache",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CachePolicy {
    ReadWrite,
    ReadOnly,
    Off,
}

impl FromStr for CachePolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "read-write" => Ok(CachePolicy::ReadWrite),
            "read-only" => Ok(CachePolicy::ReadOnly),
            "off" => Ok(CachePolicy::Off),
            other => Err(format!("unknown cache mode {other:?} (expected read-write, read-only or off)")),
        }
    }
}

impl fmt::Display for CachePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CachePolicy::ReadWrite => "read-write",
            CachePolicy::ReadOnly => "read-only",
            CachePolicy::Off => "off",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: ModelSpec,
    /// Directory that relative paths (the terms file) resolve against.
    pub base_dir: PathBuf,
    pub r_max: f64,
    pub lambda_max: f64,
    /// Solver tolerance.
    pub tol: f64,
    pub r_points: usize,
    pub lambda_points: usize,
    pub quad_order: usize,
    pub seed: u64,
    /// Tightens every verification tolerance when set.
    pub verify_tol: Option<f64>,
    pub out_dir: Option<PathBuf>,
    pub cache: CachePolicy,
}

fn parse_err(e: &Entry, msg: String) -> Error {
    Error::Parse { line: e.line, msg }
}

fn positive_f64(e: &Entry) -> Result<f64> {
    match e.value.parse::<f64>() {
        Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
        _ => Err(parse_err(e, format!("{} must be a positive finite number, got {:?}", e.key, e.value))),
    }
}

fn positive_usize(e: &Entry) -> Result<usize> {
    match e.value.parse::<usize>() {
        Ok(v) if v > 0 => Ok(v),
        _ => Err(parse_err(e, format!("{} must be a positive integer, got {:?}", e.key, e.value))),
    }
}

impl RunConfig {
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let entries = parse_key_values(text)?;
        for e in &entries {
            if !MODEL_KEYS.contains(&e.key.as_str()) && !KNOB_KEYS.contains(&e.key.as_str()) {
                return Err(parse_err(e, format!("unknown key {:?}", e.key)));
            }
        }
        let model = ModelSpec::from_entries(&entries)?;
        let mut cfg = RunConfig {
            model,
            base_dir: base_dir.to_path_buf(),
            r_max: 10.0,
            lambda_max: 20.0,
            tol: 1e-10,
            r_points: 101,
            lambda_points: 101,
            quad_order: 64,
            seed: 1,
            verify_tol: None,
            out_dir: None,
            cache: CachePolicy::ReadWrite,
        };
        for e in &entries {
            match e.key.as_str() {
                "r-max" => cfg.r_max = positive_f64(e)?,
                "lambda-max" => cfg.lambda_max = positive_f64(e)?,
                "tol" => {
                    let t = positive_f64(e)?;
                    if !(1e-14..=1e-4).contains(&t) {
                        return Err(parse_err(e, format!("tol must lie in [1e-14, 1e-4], got {t}")));
                    }
                    cfg.tol = t;
                }
                "r-points" => cfg.r_points = positive_usize(e)?,
                "lambda-points" => cfg.lambda_points = positive_usize(e)?,
                "quad-order" => cfg.quad_order = positive_usize(e)?,
                "seed" => {
                    cfg.seed = e
                        .value
                        .parse()
                        .map_err(|_| parse_err(e, format!("seed must be an unsigned integer, got {:?}", e.value)))?
                }
                "verify-tol" => cfg.verify_tol = Some(positive_f64(e)?),
                "out" => {
                    if e.value.is_empty() {
                        return Err(parse_err(e, "out must be a path".into()));
                    }
                    cfg.out_dir = Some(PathBuf::from(&e.value));
                }
                "cache" => cfg.cache = e.value.parse().map_err(|m| parse_err(e, m))?,
                _ => {}
            }
        }
        if cfg.r_points < 2 || cfg.lambda_points < 2 {
            return Err(Error::Validation("r-points and lambda-points must be at least 2".into()));
        }
        if cfg.quad_order < 8 {
            return Err(Error::Validation(format!("quad-order must be at least 8, got {}", cfg.quad_order)));
        }
        Ok(cfg)
    }

    /// Config text that parses back to `self` (given the same base directory).
    pub fn to_text(&self) -> String {
        let mut entries = match &self.model {
            ModelSpec::Hyperbolic { n } => vec![("model", "hyperbolic".to_string()), ("n", n.to_string())],
            ModelSpec::DamekRicci { p, q } => {
                vec![("model", "damekricci".to_string()), ("p", p.to_string()), ("q", q.to_string())]
            }
            ModelSpec::ExpPolynomial { n, terms_file } => vec![
                ("model", "exppoly".to_string()),
                ("n", n.to_string()),
                ("terms-file", terms_file.clone()),
            ],
        };
        entries.extend([
            ("r-max", format!("{:e}", self.r_max)),
            ("lambda-max", format!("{:e}", self.lambda_max)),
            ("tol", format!("{:e}", self.tol)),
            ("r-points", self.r_points.to_string()),
            ("lambda-points", self.lambda_points.to_string()),
            ("quad-order", self.quad_order.to_string()),
            ("seed", self.seed.to_string()),
            ("cache", self.cache.to_string()),
        ]);
        if let Some(v) = self.verify_tol {
            entries.push(("verify-tol", format!("{v:e}")));
        }
        if let Some(d) = &self.out_dir {
            entries.push(("out", d.to_string_lossy().into_owned()));
        }
        entries.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Validation(format!("cannot read config {}: {e}", path.display())))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, &base)
    }

    fn read_terms(&self, file: &str) -> Result<String> {
        let path = self.base_dir.join(file);
        std::fs::read_to_string(&path)
            .map_err(|e| Error::Validation(format!("cannot read terms file {}: {e}", path.display())))
    }

    pub fn build_model(&self) -> Result<DensityModel> {
        self.model.build(|f| self.read_terms(f))
    }

    /// Canonical text of everything that influences numerical output; the
    /// terms file enters by content, not by name.
    pub fn closure(&self) -> Result<String> {
        let model = match &self.model {
            ModelSpec::Hyperbolic { n } => format!("model=hyperbolic;n={n}"),
            ModelSpec::DamekRicci { p, q } => format!("model=damekricci;p={p};q={q}"),
            ModelSpec::ExpPolynomial { n, terms_file } => {
                format!("model=exppoly;n={n};terms={}", self.read_terms(terms_file)?)
            }
        };
        Ok(format!(
            "{model}\nr-max={:e}\nlambda-max={:e}\ntol={:e}\nr-points={}\nlambda-points={}\nquad-order={}\nseed={}\nverify-tol={}\n",
            self.r_max,
            self.lambda_max,
            self.tol,
            self.r_points,
            self.lambda_points,
            self.quad_order,
            self.seed,
            self.verify_tol.map_or("none".to_string(), |v| format!("{v:e}")),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<RunConfig> {
        RunConfig::parse(s, Path::new("."))
    }

    #[test]
    fn defaults_and_overrides() {
        let c = parse("model = hyperbolic\nn = 2\ntol = 1e-9\nseed = 7\ncache = off\n").unwrap();
        assert_eq!(c.model, ModelSpec::Hyperbolic { n: 2 });
        assert_eq!(c.tol, 1e-9);
        assert_eq!(c.seed, 7);
        assert_eq!(c.cache, CachePolicy::Off);
        assert_eq!(c.r_points, 101);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(parse("model = hyperbolic\nn = 2\nbogus = 1\n"), Err(Error::Parse { line: 3, .. })));
        assert!(parse("model = hyperbolic\nn = 2\ntol = 1e-16\n").is_err());
        assert!(parse("model = hyperbolic\nn = 2\nr-max = -1\n").is_err());
        assert!(parse("model = hyperbolic\nn = 2\nr-points = 1\n").is_err());
        assert!(parse("model = hyperbolic\nn = 2\ncache = sometimes\n").is_err());
        assert!(parse("n = 2\n").is_err());
    }

    #[test]
    fn closure_tracks_every_knob() {
        let base = parse("model = hyperbolic\nn = 2\n").unwrap();
        for extra in ["r-max = 11", "lambda-max = 21", "tol = 1e-9", "r-points = 5", "lambda-points = 5", "quad-order = 9", "seed = 2", "verify-tol = 1e-3"] {
            let other = parse(&format!("model = hyperbolic\nn = 2\n{extra}\n")).unwrap();
            assert_ne!(base.closure().unwrap(), other.closure().unwrap(), "{extra}");
        }
        let same = parse("model = hyperbolic\nn = 2\ncache = off\nout = x\n").unwrap();
        assert_eq!(base.closure().unwrap(), same.closure().unwrap());
    }

    #[test]
    fn text_round_trip() {
        let c = parse("model = damekricci\np = 2\nq = 1\ntol = 3e-11\nverify-tol = 1e-7\nout = res\ncache = read-only\n").unwrap();
        assert_eq!(parse(&c.to_text()).unwrap(), c);
    }
}
