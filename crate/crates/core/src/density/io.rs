//! Text formats for model definitions: `key = value` configs and term CSVs.

use crate::error::{Error, Result};

use super::{DensityModel, ExpPolyTerm};

/// A `key = value` entry with its 1-based line number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub line: usize,
    pub key: String,
    pub value: String,
}

/// Splits config text into entries. Blank lines and lines starting with `#`
/// are skipped; duplicate keys are rejected.
pub fn parse_key_values(text: &str) -> Result<Vec<Entry>> {
    let mut out: Vec<Entry> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let Some((k, v)) = body.split_once('=') else {
            return Err(Error::Parse { line, msg: format!("expected key=value, got {body:?}") });
        };
        let (key, value) = (k.trim(), v.trim());
        if key.is_empty() {
            return Err(Error::Parse { line, msg: "empty key".into() });
        }
        if out.iter().any(|e| e.key == key) {
            return Err(Error::Parse { line, msg: format!("duplicate key {key:?}") });
        }
        out.push(Entry { line, key: key.to_string(), value: value.to_string() });
    }
    Ok(out)
}

/// Inverse of [`parse_key_values`] up to line numbers, comments and spacing.
pub fn write_key_values(entries: &[Entry]) -> String {
    entries.iter().map(|e| format!("{} = {}\n", e.key, e.value)).collect()
}

/// Model selection as written in a config file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelSpec {
    Hyperbolic { n: u32 },
    DamekRicci { p: u32, q: u32 },
    ExpPolynomial { n: u32, terms_file: String },
}

pub const MODEL_KEYS: [&str; 5] = ["model", "n", "p", "q", "terms-file"];

impl ModelSpec {
    /// Reads the model keys from `entries`, ignoring all other keys.
    pub fn from_entries(entries: &[Entry]) -> Result<Self> {
        let get = |key: &str| entries.iter().find(|e| e.key == key);
        let int = |key: &str| -> Result<Option<u32>> {
            get(key)
                .map(|e| {
                    e.value.parse::<u32>().map_err(|_| Error::Parse {
                        line: e.line,
                        msg: format!("{key} must be a non-negative integer, got {:?}", e.value),
                    })
                })
                .transpose()
        };
        let require = |key: &str, v: Option<u32>, model: &str| {
            v.ok_or_else(|| Error::Validation(format!("model {model} requires key {key}")))
        };
        let model = get("model").ok_or_else(|| Error::Validation("missing key model".into()))?;
        let (n, p, q) = (int("n")?, int("p")?, int("q")?);
        let reject = |keys: &[&str], model: &str| -> Result<()> {
            for k in keys {
                if let Some(e) = get(k) {
                    return Err(Error::Parse {
                        line: e.line,
                        msg: format!("key {k} is not used by model {model}"),
                    });
                }
            }
            Ok(())
        };
        match model.value.as_str() {
            "hyperbolic" => {
                reject(&["p", "q", "terms-file"], "hyperbolic")?;
                Ok(ModelSpec::Hyperbolic { n: require("n", n, "hyperbolic")? })
            }
            "damekricci" => {
                reject(&["n", "terms-file"], "damekricci")?;
                Ok(ModelSpec::DamekRicci {
                    p: require("p", p, "damekricci")?,
                    q: require("q", q, "damekricci")?,
                })
            }
            "exppoly" => {
                reject(&["p", "q"], "exppoly")?;
                let terms_file = get("terms-file")
                    .ok_or_else(|| Error::Validation("model exppoly requires key terms-file".into()))?
                    .value
                    .clone();
                Ok(ModelSpec::ExpPolynomial { n: require("n", n, "exppoly")?, terms_file })
            }
            other => Err(Error::Parse {
                line: model.line,
                msg: format!("unknown model {other:?} (expected hyperbolic, damekricci or exppoly)"),
            }),
        }
    }

    /// Builds the model; `load_terms` supplies the CSV text for exppoly models.
    pub fn build<F>(&self, load_terms: F) -> Result<DensityModel>
    where
        F: FnOnce(&str) -> Result<String>,
    {
        match self {
            ModelSpec::Hyperbolic { n } => DensityModel::hyperbolic(*n),
            ModelSpec::DamekRicci { p, q } => DensityModel::damek_ricci(*p, *q),
            ModelSpec::ExpPolynomial { n, terms_file } => {
                let text = load_terms(terms_file)?;
                DensityModel::exp_polynomial(parse_terms_csv(&text)?, *n)
            }
        }
    }
}

/// Parses `exp_rate,osc_rate,poly_cos,poly_sin` rows. Polynomial fields hold
/// `;`-separated coefficients, constant term first; an empty field is zero.
/// A header row and `#` comment lines are allowed.
pub fn parse_terms_csv(text: &str) -> Result<Vec<ExpPolyTerm>> {
    let mut terms = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = body.split(',').map(str::trim).collect();
        if fields.len() != 4 {
            return Err(Error::Parse { line, msg: format!("expected 4 fields, got {}", fields.len()) });
        }
        if terms.is_empty() && fields[0] == "exp_rate" {
            if fields != ["exp_rate", "osc_rate", "poly_cos", "poly_sin"] {
                return Err(Error::Parse { line, msg: "unexpected header".into() });
            }
            continue;
        }
        let num = |s: &str, what: &str| -> Result<f64> {
            let v: f64 = s
                .parse()
                .map_err(|_| Error::Parse { line, msg: format!("{what}: not a number: {s:?}") })?;
            if !v.is_finite() {
                return Err(Error::Parse { line, msg: format!("{what}: non-finite value") });
            }
            Ok(v)
        };
        let poly = |s: &str, what: &str| -> Result<Vec<f64>> {
            if s.is_empty() {
                return Ok(Vec::new());
            }
            s.split(';').map(|c| num(c.trim(), what)).collect()
        };
        terms.push(ExpPolyTerm {
            exp_rate: num(fields[0], "exp_rate")?,
            osc_rate: num(fields[1], "osc_rate")?,
            poly_cos: poly(fields[2], "poly_cos")?,
            poly_sin: poly(fields[3], "poly_sin")?,
        });
    }
    if terms.is_empty() {
        return Err(Error::Parse { line: 0, msg: "no terms".into() });
    }
    Ok(terms)
}

/// Writes terms in the format read by [`parse_terms_csv`]; numbers use the
/// shortest representation that reads back exactly.
pub fn write_terms_csv(terms: &[ExpPolyTerm]) -> String {
    let poly = |c: &[f64]| c.iter().map(|v| format!("{v:e}")).collect::<Vec<_>>().join(";");
    let mut out = String::from("exp_rate,osc_rate,poly_cos,poly_sin\n");
    for t in terms {
        out.push_str(&format!("{:e},{:e},{},{}\n", t.exp_rate, t.osc_rate, poly(&t.poly_cos), poly(&t.poly_sin)));
    }
    out
}
