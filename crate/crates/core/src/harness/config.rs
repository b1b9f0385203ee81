//! Flat `key = value` configuration with `[section]` headers. Keys are
//! addressed as `section.key`; command-line overrides use the same form.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Raw key/value pairs, ordered so that echoes are deterministic.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawConfig {
    pub entries: BTreeMap<String, String>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        let mut section = String::new();
        for (i, raw) in text.lines().enumerate() {
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            let at = format!("line {}", i + 1);
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| Error::validation(&at, "unterminated section header"))?
                    .trim();
                if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.') {
                    return Err(Error::validation(&at, format!("bad section name `{name}`")));
                }
                section = name.to_string();
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::validation(&at, "expected `key = value`"))?;
            let k = k.trim();
            if k.is_empty() {
                return Err(Error::validation(&at, "empty key"));
            }
            let key = if section.is_empty() { k.to_string() } else { format!("{section}.{k}") };
            if entries.insert(key.clone(), v.trim().to_string()).is_some() {
                return Err(Error::validation(key, "set twice"));
            }
        }
        Ok(RawConfig { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::validation("--config", format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Applies a `section.key=value` override.
    pub fn set(&mut self, assignment: &str) -> Result<()> {
        let (k, v) = assignment
            .split_once('=')
            .ok_or_else(|| Error::validation("--set", format!("`{assignment}` is not key=value")))?;
        let k = k.trim();
        if k.is_empty() {
            return Err(Error::validation("--set", "empty key"));
        }
        self.entries.insert(k.to_string(), v.trim().to_string());
        Ok(())
    }
}

fn strip_comment(line: &str) -> &str {
    let cut = line.find(['#', ';']).unwrap_or(line.len());
    &line[..cut]
}

/// Typed access that records which keys were consumed, so leftovers can be
/// reported as unknown.
struct Reader<'a> {
    raw: &'a RawConfig,
    used: std::cell::RefCell<std::collections::BTreeSet<String>>,
}

impl<'a> Reader<'a> {
    fn new(raw: &'a RawConfig) -> Self {
        Reader {
            raw,
            used: Default::default(),
        }
    }

    fn get(&self, key: &str) -> Option<&'a str> {
        self.used.borrow_mut().insert(key.to_string());
        self.raw.entries.get(key).map(|s| s.as_str())
    }

    fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => parse_f64(key, v),
        }
    }

    fn opt_f64(&self, key: &str) -> Result<Option<f64>> {
        self.get(key).map(|v| parse_f64(key, v)).transpose()
    }

    fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| Error::validation(key, format!("`{v}` is not a non-negative integer"))),
        }
    }

    fn bool_or(&self, key: &str, default: bool) -> Result<bool> {
        match self.get(key) {
            None => Ok(default),
            Some("true") | Some("yes") | Some("1") => Ok(true),
            Some("false") | Some("no") | Some("0") => Ok(false),
            Some(v) => Err(Error::validation(key, format!("`{v}` is not a boolean"))),
        }
    }

    fn list_f64(&self, key: &str) -> Result<Option<Vec<f64>>> {
        self.get(key)
            .map(|v| split_list(v).map(|x| parse_f64(key, x)).collect())
            .transpose()
    }

    fn list_usize_or(&self, key: &str, default: &[usize]) -> Result<Vec<usize>> {
        match self.get(key) {
            None => Ok(default.to_vec()),
            Some(v) => split_list(v)
                .map(|x| {
                    x.parse()
                        .map_err(|_| Error::validation(key, format!("`{x}` is not a mode index")))
                })
                .collect(),
        }
    }

    fn string_or(&self, key: &str, default: &str) -> String {
        self.get(key).unwrap_or(default).to_string()
    }

    fn unknown(&self) -> Option<String> {
        let used = self.used.borrow();
        self.raw.entries.keys().find(|k| !used.contains(*k)).cloned()
    }
}

fn split_list(v: &str) -> impl Iterator<Item = &str> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty())
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    let x: f64 = v
        .parse()
        .map_err(|_| Error::validation(key, format!("`{v}` is not a number")))?;
    if !x.is_finite() {
        return Err(Error::validation(key, "must be finite"));
    }
    Ok(x)
}

fn require(cond: bool, key: &str, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::validation(key, msg))
    }
}

/// How μ is chosen: an absolute value or a multiple of the threshold μ*.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum MuChoice {
    Absolute(f64),
    OfThreshold(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumConfig {
    pub modes: Vec<usize>,
    /// Left edge of the search rectangle is `-depth`.
    pub depth: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BifurcationConfig {
    pub n_max: usize,
    pub star_n_max: usize,
    pub rel_tol: f64,
    /// Optional sweep; each list defaults to the single configured value.
    pub sweep_beta: Vec<f64>,
    pub sweep_sigma: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolveConfig {
    pub modes: Vec<usize>,
    pub m: i64,
    pub cells: usize,
    pub dt: f64,
    pub horizon: f64,
    pub fit_window: f64,
    pub rho0: f64,
    pub laplace_check: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecenterConfig {
    pub cells: usize,
    /// Translation the degree-one data is built from.
    pub translation: [f64; 3],
    /// Amplitude of an extra non-translational m = 0 nutrient bump.
    pub bump: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub cells: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OutputFormat {
    Csv,
    Json,
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub beta: f64,
    pub sigma_tilde: f64,
    pub mu: MuChoice,
    pub spectrum: SpectrumConfig,
    pub bifurcation: BifurcationConfig,
    pub evolve: EvolveConfig,
    pub recenter: RecenterConfig,
    pub verify: VerifyConfig,
    pub out_dir: PathBuf,
    pub cache_dir: Option<PathBuf>,
    pub format: OutputFormat,
    /// Resolved key/value echo of the input.
    pub echo: BTreeMap<String, String>,
}

impl RunConfig {
    /// Builds and validates a configuration; `out_dir` comes from the
    /// command line.
    pub fn from_raw(raw: &RawConfig, out_dir: &Path) -> Result<Self> {
        let r = Reader::new(raw);
        let beta = r.f64_or("params.beta", 1.0)?;
        let sigma_tilde = r.f64_or("params.sigma_tilde", 0.5)?;
        require(beta > 0.0, "params.beta", "must be positive")?;
        require(sigma_tilde > 0.0 && sigma_tilde < 1.0, "params.sigma_tilde", "must lie in (0, 1)")?;
        let mu = match (r.opt_f64("params.mu")?, r.opt_f64("params.mu_over_mu_star")?) {
            (Some(_), Some(_)) => {
                return Err(Error::validation("params.mu", "give either mu or mu_over_mu_star, not both"))
            }
            (Some(m), None) => {
                require(m > 0.0, "params.mu", "must be positive")?;
                MuChoice::Absolute(m)
            }
            (None, Some(f)) => {
                require(f > 0.0, "params.mu_over_mu_star", "must be positive")?;
                MuChoice::OfThreshold(f)
            }
            (None, None) => MuChoice::Absolute(1.0),
        };

        let spectrum = SpectrumConfig {
            modes: r.list_usize_or("spectrum.modes", &[0, 1, 2, 3, 4, 5])?,
            depth: r.f64_or("spectrum.depth", 20.0)?,
        };
        require(!spectrum.modes.is_empty(), "spectrum.modes", "must not be empty")?;
        require(spectrum.modes.iter().all(|&n| n <= 200), "spectrum.modes", "mode index above 200")?;
        require(spectrum.depth > 0.0, "spectrum.depth", "must be positive")?;

        let bifurcation = BifurcationConfig {
            n_max: r.usize_or("bifurcation.n_max", 10)?,
            star_n_max: r.usize_or("bifurcation.star_n_max", 16)?,
            rel_tol: r.f64_or("bifurcation.rel_tol", 1e-8)?,
            sweep_beta: r.list_f64("bifurcation.sweep_beta")?.unwrap_or_else(|| vec![beta]),
            sweep_sigma: r.list_f64("bifurcation.sweep_sigma")?.unwrap_or_else(|| vec![sigma_tilde]),
        };
        require(
            (2..=60).contains(&bifurcation.n_max),
            "bifurcation.n_max",
            "must lie in 2..=60",
        )?;
        require(
            (8..=60).contains(&bifurcation.star_n_max),
            "bifurcation.star_n_max",
            "must lie in 8..=60",
        )?;
        require(
            bifurcation.rel_tol > 0.0 && bifurcation.rel_tol < 1e-2,
            "bifurcation.rel_tol",
            "must lie in (0, 1e-2)",
        )?;
        require(
            !bifurcation.sweep_beta.is_empty() && bifurcation.sweep_beta.iter().all(|&b| b > 0.0),
            "bifurcation.sweep_beta",
            "must be a non-empty list of positive values",
        )?;
        require(
            !bifurcation.sweep_sigma.is_empty() && bifurcation.sweep_sigma.iter().all(|&s| s > 0.0 && s < 1.0),
            "bifurcation.sweep_sigma",
            "must be a non-empty list of values in (0, 1)",
        )?;

        let evolve = EvolveConfig {
            modes: r.list_usize_or("evolve.modes", &[2])?,
            m: r.f64_or("evolve.m", 0.0)? as i64,
            cells: r.usize_or("evolve.cells", 512)?,
            dt: r.f64_or("evolve.dt", 1e-3)?,
            horizon: r.f64_or("evolve.horizon", 10.0)?,
            fit_window: r.f64_or("evolve.fit_window", 0.5)?,
            rho0: r.f64_or("evolve.rho0", 1.0)?,
            laplace_check: r.bool_or("evolve.laplace_check", true)?,
        };
        require(!evolve.modes.is_empty(), "evolve.modes", "must not be empty")?;
        require(
            evolve.modes.iter().all(|&n| n <= 100 && (evolve.m.unsigned_abs() as usize) <= n),
            "evolve.modes",
            "each mode must satisfy |m| <= n <= 100",
        )?;
        require((64..=1 << 16).contains(&evolve.cells), "evolve.cells", "must lie in 64..=65536")?;
        require(evolve.dt > 0.0 && evolve.dt <= 0.1, "evolve.dt", "must lie in (0, 0.1]")?;
        require(
            evolve.horizon > evolve.dt && evolve.horizon <= 100.0,
            "evolve.horizon",
            "must lie in (dt, 100]",
        )?;
        require(
            evolve.fit_window > 0.0 && evolve.fit_window <= 1.0,
            "evolve.fit_window",
            "must lie in (0, 1]",
        )?;

        let translation = match r.list_f64("recenter.translation")? {
            None => [0.1, -0.2, 0.3],
            Some(v) if v.len() == 3 => [v[0], v[1], v[2]],
            Some(_) => return Err(Error::validation("recenter.translation", "needs three components")),
        };
        let recenter = RecenterConfig {
            cells: r.usize_or("recenter.cells", 2048)?,
            translation,
            bump: r.f64_or("recenter.bump", 0.0)?,
        };
        require((64..=1 << 16).contains(&recenter.cells), "recenter.cells", "must lie in 64..=65536")?;

        let verify = VerifyConfig {
            cells: r.usize_or("verify.cells", 512)?,
        };
        require((64..=1 << 16).contains(&verify.cells), "verify.cells", "must lie in 64..=65536")?;

        let format = match r.string_or("output.format", "both").as_str() {
            "csv" => OutputFormat::Csv,
            "json" => OutputFormat::Json,
            "both" => OutputFormat::Both,
            other => return Err(Error::validation("output.format", format!("`{other}` is not csv, json or both"))),
        };
        let cache_dir = r.get("output.cache_dir").map(PathBuf::from);

        if let Some(k) = r.unknown() {
            return Err(Error::validation(k, "unknown key"));
        }
        Ok(RunConfig {
            beta,
            sigma_tilde,
            mu,
            spectrum,
            bifurcation,
            evolve,
            recenter,
            verify,
            out_dir: out_dir.to_path_buf(),
            cache_dir,
            format,
            echo: raw.entries.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_and_comments() {
        let raw = RawConfig::parse("# top\n[params]\nbeta = 2 ; inline\n[evolve.extra]\nx=1\n").unwrap();
        assert_eq!(raw.entries["params.beta"], "2");
        assert_eq!(raw.entries["evolve.extra.x"], "1");
    }

    #[test]
    fn duplicate_key_is_rejected() {
        let e = RawConfig::parse("[a]\nx=1\nx=2\n").unwrap_err();
        assert!(e.is_validation());
    }

    #[test]
    fn override_and_unknown_key() {
        let mut raw = RawConfig::parse("[params]\nbeta=1\n").unwrap();
        raw.set("params.sigma_tilde=0.3").unwrap();
        let c = RunConfig::from_raw(&raw, Path::new("out")).unwrap();
        assert_eq!(c.sigma_tilde, 0.3);
        raw.set("params.bogus=1").unwrap();
        match RunConfig::from_raw(&raw, Path::new("out")) {
            Err(Error::Validation { path, .. }) => assert_eq!(path, "params.bogus"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn empty_mode_list_is_invalid() {
        let raw = RawConfig::parse("[evolve]\nmodes =\n").unwrap();
        match RunConfig::from_raw(&raw, Path::new("out")) {
            Err(Error::Validation { path, .. }) => assert_eq!(path, "evolve.modes"),
            other => panic!("{other:?}"),
        }
    }
}
