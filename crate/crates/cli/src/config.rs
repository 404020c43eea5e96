//! Run configuration: flat `key=value` text with `#` comments, overridden by
//! command-line flags.

use std::collections::BTreeMap;
use std::path::PathBuf;

use maxwell_dg::convergence::TestCase;
use maxwell_dg::reference::MAX_ORDER;
use maxwell_dg::{BoundaryTag, FluxScheme};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("bad value for `{key}`: {reason}")]
    BadValue { key: String, reason: String },
    #[error("missing required key `{0}`")]
    MissingRequired(String),
}

fn bad(key: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::BadValue {
        key: key.to_string(),
        reason: reason.into(),
    }
}

/// Every accepted key, in documentation order.
pub const KEYS: &[&str] = &[
    "case",
    "scheme",
    "alpha_e",
    "alpha_h",
    "eta",
    "tau",
    "k",
    "omega",
    "nu",
    "incident",
    "mesh",
    "n",
    "refinements",
    "h",
    "seed",
    "boundary",
    "mesh_files",
    "protocol",
    "solver",
    "tol",
    "restart",
    "max_iter",
    "output",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeKind {
    Centered,
    Upwind,
    Penalized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshKind {
    /// `n × n` cells, two triangles each.
    Square,
    /// `n × n` cells, four triangles each.
    CrissCross,
    /// Jittered unit square of nominal size `h`.
    Jittered,
    /// Graded `[-1,1]²` of maximal spacing `h`.
    Graded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Protocol {
    Uniform,
    Independent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    Direct,
    Gmres,
}

/// Boundary data on absorbing faces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Incident {
    /// Trace of the exact solution of the case.
    Exact,
    /// Homogeneous data.
    Zero,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub case: Option<TestCase>,
    pub scheme: Option<SchemeKind>,
    pub alpha_e: Option<f64>,
    pub alpha_h: Option<f64>,
    pub eta: Option<f64>,
    pub tau: Option<f64>,
    /// Polynomial orders; `solve` needs exactly one.
    pub orders: Vec<usize>,
    pub omega: f64,
    pub nu: f64,
    pub incident: Incident,
    pub mesh: Option<MeshKind>,
    pub n: Option<usize>,
    pub refinements: Option<usize>,
    /// Mesh sizes, for generated jittered or graded meshes.
    pub h: Vec<f64>,
    pub seed: u64,
    pub boundary: BoundaryTag,
    pub mesh_files: Vec<PathBuf>,
    pub protocol: Option<Protocol>,
    pub solver: SolverKind,
    pub tol: f64,
    pub restart: usize,
    pub max_iter: usize,
    pub output: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            case: None,
            scheme: None,
            alpha_e: None,
            alpha_h: None,
            eta: None,
            tau: None,
            orders: Vec::new(),
            omega: std::f64::consts::TAU,
            nu: 0.0,
            incident: Incident::Exact,
            mesh: None,
            n: None,
            refinements: None,
            h: Vec::new(),
            seed: 1,
            boundary: BoundaryTag::Absorbing,
            mesh_files: Vec::new(),
            protocol: None,
            solver: SolverKind::Direct,
            tol: 1e-10,
            restart: 50,
            max_iter: 5000,
            output: PathBuf::from("."),
        }
    }
}

impl RunConfig {
    pub fn case(&self) -> Result<TestCase, ConfigError> {
        self.case.ok_or_else(|| ConfigError::MissingRequired("case".into()))
    }

    /// The flux with unspecified coefficients set to 1.
    pub fn flux_scheme(&self) -> Result<FluxScheme<f64>, ConfigError> {
        let kind = self.scheme.ok_or_else(|| ConfigError::MissingRequired("scheme".into()))?;
        Ok(match kind {
            SchemeKind::Centered => FluxScheme::Centered,
            SchemeKind::Upwind => FluxScheme::Upwind {
                alpha_e: self.alpha_e.unwrap_or(1.0),
                alpha_h: self.alpha_h.unwrap_or(1.0),
                eta: self.eta.unwrap_or(1.0),
            },
            SchemeKind::Penalized => FluxScheme::PenalizedE {
                tau: self.tau.unwrap_or(1.0),
                eta: self.eta.unwrap_or(1.0),
            },
        })
    }

    /// The single order of a `solve` run.
    pub fn single_order(&self) -> Result<usize, ConfigError> {
        match self.orders[..] {
            [k] => Ok(k),
            [] => Err(ConfigError::MissingRequired("k".into())),
            _ => Err(bad("k", "a single order is needed here")),
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, ConfigError> {
    v.parse().map_err(|_| bad(key, format!("cannot parse `{v}`")))
}

fn parse_list<T: std::str::FromStr>(key: &str, v: &str) -> Result<Vec<T>, ConfigError> {
    v.split(',').map(|s| parse_num(key, s.trim())).collect()
}

fn nonnegative(key: &str, v: &str) -> Result<f64, ConfigError> {
    let x: f64 = parse_num(key, v)?;
    if x >= 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(bad(key, "must be a finite number >= 0"))
    }
}

fn positive(key: &str, v: &str) -> Result<f64, ConfigError> {
    let x: f64 = parse_num(key, v)?;
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(bad(key, "must be a finite number > 0"))
    }
}

fn choice<T: Copy>(key: &str, v: &str, options: &[(&str, T)]) -> Result<T, ConfigError> {
    options.iter().find(|(name, _)| *name == v).map(|&(_, t)| t).ok_or_else(|| {
        let names: Vec<&str> = options.iter().map(|(n, _)| *n).collect();
        bad(key, format!("expected one of {}", names.join(", ")))
    })
}

/// Reads `key=value` lines. Later occurrences win.
pub fn parse_text(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut out = BTreeMap::new();
    for raw in text.lines() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| bad(line, "expected `key=value`"))?;
        let (k, v) = (k.trim(), v.trim());
        if !KEYS.contains(&k) {
            return Err(ConfigError::UnknownKey(k.to_string()));
        }
        out.insert(k.to_string(), v.to_string());
    }
    Ok(out)
}

/// Builds a configuration from file text and flag overrides.
pub fn parse_config(text: &str, overrides: &[(String, String)]) -> Result<RunConfig, ConfigError> {
    let mut map = parse_text(text)?;
    for (k, v) in overrides {
        if !KEYS.contains(&k.as_str()) {
            return Err(ConfigError::UnknownKey(k.clone()));
        }
        map.insert(k.clone(), v.clone());
    }
    let mut c = RunConfig::default();
    for (k, v) in &map {
        let key = k.as_str();
        let v = v.as_str();
        match key {
            "case" => {
                c.case = Some(choice(key, v, &[("plane_wave", TestCase::PlaneWave), ("sine_cavity", TestCase::SineCavity)])?)
            }
            "scheme" => {
                c.scheme = Some(choice(
                    key,
                    v,
                    &[
                        ("centered", SchemeKind::Centered),
                        ("upwind", SchemeKind::Upwind),
                        ("penalized", SchemeKind::Penalized),
                    ],
                )?)
            }
            "alpha_e" => c.alpha_e = Some(nonnegative(key, v)?),
            "alpha_h" => c.alpha_h = Some(nonnegative(key, v)?),
            "eta" => c.eta = Some(nonnegative(key, v)?),
            "tau" => c.tau = Some(nonnegative(key, v)?),
            "k" => {
                c.orders = parse_list(key, v)?;
                if let Some(k) = c.orders.iter().find(|&&k| k > MAX_ORDER) {
                    return Err(bad(key, format!("order {k} unsupported (supported orders 0..{MAX_ORDER})")));
                }
            }
            "omega" => c.omega = positive(key, v)?,
            "nu" => c.nu = nonnegative(key, v)?,
            "incident" => c.incident = choice(key, v, &[("exact", Incident::Exact), ("zero", Incident::Zero)])?,
            "mesh" => {
                c.mesh = Some(choice(
                    key,
                    v,
                    &[
                        ("square", MeshKind::Square),
                        ("criss_cross", MeshKind::CrissCross),
                        ("jittered", MeshKind::Jittered),
                        ("graded", MeshKind::Graded),
                    ],
                )?)
            }
            "n" => {
                let n: usize = parse_num(key, v)?;
                if n == 0 {
                    return Err(bad(key, "must be at least 1"));
                }
                c.n = Some(n);
            }
            "refinements" => c.refinements = Some(parse_num(key, v)?),
            "h" => {
                c.h = parse_list(key, v)?;
                if c.h.iter().any(|&x: &f64| !(x > 0.0 && x.is_finite())) {
                    return Err(bad(key, "sizes must be > 0"));
                }
            }
            "seed" => c.seed = parse_num(key, v)?,
            "boundary" => {
                c.boundary = choice(key, v, &[("absorbing", BoundaryTag::Absorbing), ("metallic", BoundaryTag::Metallic)])?
            }
            "mesh_files" => c.mesh_files = v.split(',').map(|s| PathBuf::from(s.trim())).collect(),
            "protocol" => {
                c.protocol = Some(choice(
                    key,
                    v,
                    &[("uniform", Protocol::Uniform), ("independent", Protocol::Independent)],
                )?)
            }
            "solver" => c.solver = choice(key, v, &[("direct", SolverKind::Direct), ("gmres", SolverKind::Gmres)])?,
            "tol" => {
                c.tol = positive(key, v)?;
                if c.tol >= 1.0 {
                    return Err(bad(key, "must be < 1"));
                }
            }
            "restart" => {
                c.restart = parse_num(key, v)?;
                if c.restart == 0 {
                    return Err(bad(key, "must be at least 1"));
                }
            }
            "max_iter" => c.max_iter = parse_num(key, v)?,
            "output" => c.output = PathBuf::from(v),
            _ => return Err(ConfigError::UnknownKey(k.clone())),
        }
    }
    // coefficients that the chosen scheme would silently ignore
    let unused: &[(&str, bool)] = match c.scheme {
        Some(SchemeKind::Centered) => &[("alpha_e", true), ("alpha_h", true), ("eta", true), ("tau", true)],
        Some(SchemeKind::Upwind) => &[("tau", true)],
        Some(SchemeKind::Penalized) => &[("alpha_e", true), ("alpha_h", true)],
        None => &[],
    };
    for (key, _) in unused {
        if map.contains_key(*key) {
            return Err(bad(key, format!("not used by the {} scheme", map["scheme"])));
        }
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ov(pairs: &[(&str, &str)]) -> Vec<(String, String)> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn defaults_follow_the_reference_settings() {
        let c = parse_config("", &ov(&[("case", "plane_wave"), ("scheme", "centered"), ("k", "1")])).unwrap();
        assert_eq!(c.omega, std::f64::consts::TAU);
        assert_eq!(c.nu, 0.0);
        assert_eq!(c.flux_scheme().unwrap(), FluxScheme::Centered);
        let c = parse_config("scheme=upwind", &[]).unwrap();
        assert_eq!(c.flux_scheme().unwrap(), FluxScheme::upwind());
        let c = parse_config("scheme=penalized", &[]).unwrap();
        assert_eq!(c.flux_scheme().unwrap(), FluxScheme::penalized());
    }

    #[test]
    fn order_out_of_range_is_bad_value() {
        assert!(matches!(parse_config("k=5", &[]), Err(ConfigError::BadValue { key, .. }) if key == "k"));
        assert_eq!(parse_config("k=0,1,2,3", &[]).unwrap().orders, vec![0, 1, 2, 3]);
    }

    #[test]
    fn typos_are_unknown_keys() {
        assert_eq!(parse_config("schme=upwind", &[]), Err(ConfigError::UnknownKey("schme".into())));
        assert_eq!(parse_config("", &ov(&[("omgea", "1")])), Err(ConfigError::UnknownKey("omgea".into())));
    }

    #[test]
    fn flags_override_file_and_comments_are_ignored() {
        let text = "# run\ncase = sine_cavity  # trailing\n\nscheme=upwind\nalpha_e=0.5\nnu=0.1\n";
        let c = parse_config(text, &ov(&[("nu", "1")])).unwrap();
        assert_eq!(c.case, Some(TestCase::SineCavity));
        assert_eq!(c.nu, 1.0);
        assert_eq!(
            c.flux_scheme().unwrap(),
            FluxScheme::Upwind { alpha_e: 0.5, alpha_h: 1.0, eta: 1.0 }
        );
    }

    #[test]
    fn bad_values_and_missing_keys() {
        for text in ["nu=-1", "omega=0", "scheme=fancy", "n=0", "h=0.1,-2", "tol=2", "case", "seed=x"] {
            assert!(matches!(parse_config(text, &[]), Err(ConfigError::BadValue { .. })), "{text}");
        }
        assert!(matches!(parse_config("scheme=centered\ntau=1", &[]), Err(ConfigError::BadValue { .. })));
        let c = parse_config("", &[]).unwrap();
        assert_eq!(c.case(), Err(ConfigError::MissingRequired("case".into())));
        assert_eq!(c.flux_scheme(), Err(ConfigError::MissingRequired("scheme".into())));
        assert_eq!(c.single_order(), Err(ConfigError::MissingRequired("k".into())));
        assert!(parse_config("k=1,2", &[]).unwrap().single_order().is_err());
    }

    #[test]
    fn every_key_is_accepted() {
        // each documented key parses with some valid value
        let samples = [
            "case=plane_wave", "scheme=upwind", "alpha_e=1", "alpha_h=1", "eta=1", "tau=0", "k=2", "omega=3",
            "nu=0", "incident=zero", "mesh=graded", "n=3", "refinements=2", "h=0.1", "seed=4", "boundary=metallic",
            "mesh_files=a.txt,b.txt", "protocol=independent", "solver=gmres", "tol=1e-8", "restart=30",
            "max_iter=100", "output=out",
        ];
        assert_eq!(samples.len(), KEYS.len());
        for s in samples {
            let text = if s.starts_with("tau") { format!("scheme=penalized\n{s}") } else { s.to_string() };
            assert!(parse_config(&text, &[]).is_ok(), "{s}");
        }
    }
}
