//! Line-oriented configuration files: `key = value` entries grouped under
//! bracketed section headers, `#` comments. Unknown keys are rejected with a
//! suggestion; all errors are collected (with line numbers) rather than
//! stopping at the first.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::constitutive::{AbarSpec, ConstitutiveSet, EosFamily, LambdaFamily, TransportFamily};
use crate::shell::ShellData;
use crate::solver::{GridKind, Scheme, Thresholds};
use crate::state::ConstantState;
use crate::table::{Extrapolation, MonotoneTable};

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    /// 1-based line number; 0 for file-level problems.
    pub line: usize,
    pub message: String,
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.line == 0 {
            write!(out, "{}", self.message)
        } else {
            write!(out, "line {}: {}", self.line, self.message)
        }
    }
}

#[derive(Debug, Clone)]
pub struct EosConfig {
    pub family: String,
    pub gamma_ad: f64,
    pub m: f64,
    pub c_rho: f64,
    pub c_n: f64,
    pub offset: f64,
    pub path: Option<PathBuf>,
    pub p0: f64,
    pub p1: f64,
}

#[derive(Debug, Clone)]
pub struct TransportConfig {
    pub zeta: String,
    pub zeta_value: f64,
    pub zeta_coeff: f64,
    pub zeta_n_exp: f64,
    pub zeta_decay: f64,
    pub zeta_rho_amp: f64,
    pub zeta_rho_scale: f64,
    pub zeta_path: Option<PathBuf>,
    pub tau0: String,
    pub tau0_value: f64,
    pub tau0_coeff: f64,
    pub tau0_n_exp: f64,
    pub tau0_decay: f64,
    pub tau0_path: Option<PathBuf>,
    pub tau0_floor: f64,
    pub lambda: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct BackgroundConfig {
    pub rho_bar: f64,
    pub n_bar: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct DataConfig {
    pub r0: f64,
    pub ell: f64,
    pub sigma: f64,
    /// Negative means the documented default ell/10.
    pub smooth_w: f64,
    pub standoff: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct GridConfig {
    pub radial: bool,
    pub n_cells: usize,
    pub length: f64,
    pub cfl: f64,
    pub dissipation: f64,
    pub t_max: f64,
    pub out_interval: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct ThresholdConfig {
    pub grad_ratio: f64,
    pub physical_margin: f64,
    pub wec_margin: f64,
    pub pi_margin: f64,
    pub value_max: f64,
    pub leak_tol: f64,
    pub support_tol: f64,
    pub qbound_tol: f64,
}

#[derive(Debug, Clone)]
pub struct OutputConfig {
    pub directory: PathBuf,
    pub snapshot_every: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct CertifyConfig {
    pub mu_margin: f64,
    pub admissibility_margin: f64,
    pub abar_rho_lo: f64,
    pub abar_rho_hi: f64,
    pub abar_rho_samples: usize,
    pub abar_safety: f64,
    pub abar_tol: f64,
    pub sigma_lo: f64,
    pub sigma_hi: f64,
}

#[derive(Debug, Clone)]
pub struct FlowlineConfig {
    pub pi0: f64,
    pub tau_max: f64,
    pub tol: f64,
    pub theta: String,
    pub theta_amp: f64,
    pub theta_omega: f64,
    pub theta_phase: f64,
    pub n_floor_rel: f64,
    pub eps: f64,
    /// Anchor density for the transport solution; 0 = use n_bar.
    pub n0: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct RiemannConfig {
    pub rho_lo: f64,
    pub rho_hi: f64,
    pub rho_samples: usize,
    pub u_lo: f64,
    pub u_hi: f64,
    pub u_samples: usize,
    pub pi_lo: f64,
    pub pi_hi: f64,
    pub pi_samples: usize,
}

/// Fully validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub eos: EosConfig,
    pub transport: TransportConfig,
    pub background: BackgroundConfig,
    pub data: DataConfig,
    pub grid: GridConfig,
    pub thresholds: ThresholdConfig,
    pub output: OutputConfig,
    pub certify: CertifyConfig,
    pub flowline: FlowlineConfig,
    pub riemann: RiemannConfig,
}

impl RunConfig {
    pub fn smooth_w(&self) -> f64 {
        if self.data.smooth_w < 0.0 {
            self.data.ell / 10.0
        } else {
            self.data.smooth_w
        }
    }

    pub fn constitutive_set(&self) -> Result<ConstitutiveSet, Vec<ConfigError>> {
        let mut errs = Vec::new();
        let eos = match self.eos.family.as_str() {
            "ideal_gas" => EosFamily::IdealGas { gamma_ad: self.eos.gamma_ad, m: self.eos.m },
            "linear" => EosFamily::Linear {
                c_rho: self.eos.c_rho,
                c_n: self.eos.c_n,
                offset: self.eos.offset,
            },
            "table" => match &self.eos.path {
                Some(p) => match load_table(p, Extrapolation::Linear) {
                    Ok(t) => EosFamily::TableRho(t),
                    Err(e) => {
                        errs.push(ConfigError { line: 0, message: format!("[eos] path: {e}") });
                        EosFamily::IdealGas { gamma_ad: 4.0 / 3.0, m: 1.0 }
                    }
                },
                None => {
                    errs.push(ConfigError {
                        line: 0,
                        message: "[eos] family = table requires path".to_string(),
                    });
                    EosFamily::IdealGas { gamma_ad: 4.0 / 3.0, m: 1.0 }
                }
            },
            other => {
                errs.push(ConfigError {
                    line: 0,
                    message: format!("[eos] unknown family '{other}' (ideal_gas, linear, table)"),
                });
                EosFamily::IdealGas { gamma_ad: 4.0 / 3.0, m: 1.0 }
            }
        };
        let zeta = transport_family(
            "zeta",
            &self.transport.zeta,
            self.transport.zeta_value,
            self.transport.zeta_coeff,
            self.transport.zeta_n_exp,
            self.transport.zeta_decay,
            self.transport.zeta_rho_amp,
            self.transport.zeta_rho_scale,
            self.transport.zeta_path.as_deref(),
            &mut errs,
        );
        let tau0 = transport_family(
            "tau0",
            &self.transport.tau0,
            self.transport.tau0_value,
            self.transport.tau0_coeff,
            self.transport.tau0_n_exp,
            self.transport.tau0_decay,
            0.0,
            1.0,
            self.transport.tau0_path.as_deref(),
            &mut errs,
        );
        if !errs.is_empty() {
            return Err(errs);
        }
        let lambda = if self.transport.lambda == 0.0 {
            LambdaFamily::Zero
        } else {
            LambdaFamily::Constant(self.transport.lambda)
        };
        let mut set = ConstitutiveSet {
            eos,
            zeta,
            tau0,
            lambda,
            p0: self.eos.p0,
            p1: self.eos.p1,
            tau0_floor: self.transport.tau0_floor,
        };
        set.raise_pressure_floor();
        Ok(set)
    }

    pub fn shell_data(&self, set: &ConstitutiveSet) -> Result<ShellData, String> {
        let bg = ConstantState::new(self.background.rho_bar, self.background.n_bar, set)
            .map_err(|e| e.to_string())?;
        ShellData::new(self.data.r0, self.data.ell, self.data.sigma, self.smooth_w(), bg)
            .and_then(|d| d.with_standoff(self.data.standoff))
            .map_err(|e| e.to_string())
    }

    pub fn grid(&self) -> crate::solver::Grid1d {
        let kind = if self.grid.radial { GridKind::Radial } else { GridKind::Planar };
        crate::solver::Grid1d::new(kind, self.grid.n_cells, self.grid.length)
    }

    pub fn scheme(&self) -> Scheme {
        Scheme { cfl: self.grid.cfl, dissipation: self.grid.dissipation, freeze_pi: false }
    }

    pub fn solver_thresholds(&self) -> Thresholds {
        Thresholds {
            grad_ratio: self.thresholds.grad_ratio,
            physical_margin: self.thresholds.physical_margin,
            wec_margin: self.thresholds.wec_margin,
            pi_margin: self.thresholds.pi_margin,
            value_max: self.thresholds.value_max,
        }
    }

    pub fn abar_spec(&self) -> AbarSpec {
        AbarSpec {
            rho_interval: (self.certify.abar_rho_lo, self.certify.abar_rho_hi),
            rho_samples: self.certify.abar_rho_samples,
            tol: self.certify.abar_tol,
            safety: self.certify.abar_safety,
        }
    }

    pub fn certify_spec(&self) -> crate::certifier::CertifySpec {
        crate::certifier::CertifySpec {
            abar: self.abar_spec(),
            mu_margin: self.certify.mu_margin,
            admissibility_margin: self.certify.admissibility_margin,
            profile_samples: 1024,
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn transport_family(
    what: &str,
    family: &str,
    value: f64,
    coeff: f64,
    n_exp: f64,
    decay: f64,
    rho_amp: f64,
    rho_scale: f64,
    path: Option<&Path>,
    errs: &mut Vec<ConfigError>,
) -> TransportFamily {
    match family {
        "zero" => TransportFamily::Zero,
        "constant" => TransportFamily::Constant(value),
        "power_exp" => TransportFamily::PowerExp { coeff, n_exp, decay, rho_amp, rho_scale },
        "table" => match path {
            Some(p) => match load_table(p, Extrapolation::Zero) {
                Ok(t) => TransportFamily::TableN(t),
                Err(e) => {
                    errs.push(ConfigError {
                        line: 0,
                        message: format!("[transport] {what}_path: {e}"),
                    });
                    TransportFamily::Zero
                }
            },
            None => {
                errs.push(ConfigError {
                    line: 0,
                    message: format!("[transport] {what} = table requires {what}_path"),
                });
                TransportFamily::Zero
            }
        },
        other => {
            errs.push(ConfigError {
                line: 0,
                message: format!(
                    "[transport] unknown {what} family '{other}' (zero, constant, power_exp, table)"
                ),
            });
            TransportFamily::Zero
        }
    }
}

fn load_table(path: &Path, extrapolation: Extrapolation) -> Result<MonotoneTable, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    MonotoneTable::parse(&text, extrapolation).map_err(|e| format!("{}: {e}", path.display()))
}

// ---------------------------------------------------------------------------
// Parsing.

struct RawEntry {
    line: usize,
    value: String,
    used: std::cell::Cell<bool>,
}

struct Sections {
    entries: BTreeMap<(String, String), RawEntry>,
    seen_sections: Vec<String>,
}

const KNOWN_KEYS: &[(&str, &[&str])] = &[
    ("eos", &["family", "gamma_ad", "m", "c_rho", "c_n", "offset", "path", "p0", "p1"]),
    (
        "transport",
        &[
            "zeta",
            "zeta_value",
            "zeta_coeff",
            "zeta_n_exp",
            "zeta_decay",
            "zeta_rho_amp",
            "zeta_rho_scale",
            "zeta_path",
            "tau0",
            "tau0_value",
            "tau0_coeff",
            "tau0_n_exp",
            "tau0_decay",
            "tau0_path",
            "tau0_floor",
            "lambda",
        ],
    ),
    ("background", &["rho_bar", "n_bar"]),
    ("data", &["r0", "ell", "sigma", "smooth_w", "standoff"]),
    ("grid", &["mode", "n_cells", "length", "cfl", "dissipation", "t_max", "out_interval"]),
    (
        "thresholds",
        &[
            "grad_ratio",
            "physical_margin",
            "wec_margin",
            "pi_margin",
            "value_max",
            "leak_tol",
            "support_tol",
            "qbound_tol",
        ],
    ),
    ("output", &["directory", "snapshot_every"]),
    (
        "certify",
        &[
            "mu_margin",
            "admissibility_margin",
            "abar_rho_lo",
            "abar_rho_hi",
            "abar_rho_samples",
            "abar_safety",
            "abar_tol",
            "sigma_lo",
            "sigma_hi",
        ],
    ),
    (
        "flowline",
        &[
            "pi0",
            "tau_max",
            "tol",
            "theta",
            "theta_amp",
            "theta_omega",
            "theta_phase",
            "n_floor_rel",
            "eps",
            "n0",
        ],
    ),
    (
        "riemann",
        &[
            "rho_lo", "rho_hi", "rho_samples", "u_lo", "u_hi", "u_samples", "pi_lo", "pi_hi",
            "pi_samples",
        ],
    ),
];

fn levenshtein(a: &str, b: &str) -> usize {
    let (a, b): (Vec<char>, Vec<char>) = (a.chars().collect(), b.chars().collect());
    let mut row: Vec<usize> = (0..=b.len()).collect();
    for (i, ca) in a.iter().enumerate() {
        let mut prev = row[0];
        row[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let cur = row[j + 1];
            row[j + 1] = (prev + usize::from(ca != cb)).min(row[j] + 1).min(cur + 1);
            prev = cur;
        }
    }
    row[b.len()]
}

fn suggest(section: &str, key: &str) -> Option<&'static str> {
    let keys = KNOWN_KEYS.iter().find(|(s, _)| *s == section)?.1;
    keys.iter()
        .map(|k| (levenshtein(key, k), *k))
        .filter(|(d, _)| *d <= 2)
        .min_by_key(|(d, _)| *d)
        .map(|(_, k)| k)
}

fn tokenize(text: &str, errors: &mut Vec<ConfigError>) -> Sections {
    let mut entries = BTreeMap::new();
    let mut seen_sections = Vec::new();
    let mut section = String::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            section = name.trim().to_string();
            if !KNOWN_KEYS.iter().any(|(s, _)| *s == section) {
                errors.push(ConfigError {
                    line: line_no,
                    message: format!("unknown section [{section}]"),
                });
            }
            seen_sections.push(section.clone());
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            errors.push(ConfigError {
                line: line_no,
                message: "expected 'key = value' or '[section]'".to_string(),
            });
            continue;
        };
        if section.is_empty() {
            errors.push(ConfigError {
                line: line_no,
                message: "entry before any [section] header".to_string(),
            });
            continue;
        }
        let key = key.trim().to_string();
        let known = KNOWN_KEYS
            .iter()
            .find(|(s, _)| *s == section)
            .map(|(_, ks)| ks.contains(&key.as_str()))
            .unwrap_or(false);
        if !known && KNOWN_KEYS.iter().any(|(s, _)| *s == section) {
            let hint = match suggest(&section, &key) {
                Some(s) => format!(" (did you mean '{s}'?)"),
                None => String::new(),
            };
            errors.push(ConfigError {
                line: line_no,
                message: format!("unknown key '{key}' in [{section}]{hint}"),
            });
            continue;
        }
        let prev = entries.insert(
            (section.clone(), key.clone()),
            RawEntry {
                line: line_no,
                value: value.trim().to_string(),
                used: std::cell::Cell::new(false),
            },
        );
        if prev.is_some() {
            errors.push(ConfigError {
                line: line_no,
                message: format!("duplicate key '{key}' in [{section}]"),
            });
        }
    }
    Sections { entries, seen_sections }
}

impl Sections {
    fn get(&self, section: &str, key: &str) -> Option<&RawEntry> {
        let e = self.entries.get(&(section.to_string(), key.to_string()));
        if let Some(e) = e {
            e.used.set(true);
        }
        e
    }

    fn f64_or(
        &self,
        section: &str,
        key: &str,
        default: f64,
        errors: &mut Vec<ConfigError>,
    ) -> f64 {
        match self.get(section, key) {
            None => default,
            Some(e) => match e.value.parse() {
                Ok(v) => v,
                Err(_) => {
                    errors.push(ConfigError {
                        line: e.line,
                        message: format!("[{section}] {key}: cannot parse '{}' as number", e.value),
                    });
                    default
                }
            },
        }
    }

    fn usize_or(
        &self,
        section: &str,
        key: &str,
        default: usize,
        errors: &mut Vec<ConfigError>,
    ) -> usize {
        match self.get(section, key) {
            None => default,
            Some(e) => match e.value.parse() {
                Ok(v) => v,
                Err(_) => {
                    errors.push(ConfigError {
                        line: e.line,
                        message: format!("[{section}] {key}: cannot parse '{}' as integer", e.value),
                    });
                    default
                }
            },
        }
    }

    fn string_or(&self, section: &str, key: &str, default: &str) -> String {
        self.get(section, key).map(|e| e.value.clone()).unwrap_or_else(|| default.to_string())
    }

    fn path(&self, section: &str, key: &str, base: &Path) -> Option<PathBuf> {
        self.get(section, key).map(|e| {
            let p = PathBuf::from(&e.value);
            if p.is_absolute() {
                p
            } else {
                base.join(p)
            }
        })
    }

    fn line_of(&self, section: &str, key: &str) -> usize {
        self.entries.get(&(section.to_string(), key.to_string())).map(|e| e.line).unwrap_or(0)
    }
}

/// Parses and validates a configuration file. On failure every problem is
/// reported, each with its line number.
pub fn parse_config(path: &Path) -> Result<RunConfig, Vec<ConfigError>> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        vec![ConfigError { line: 0, message: format!("cannot read {}: {e}", path.display()) }]
    })?;
    parse_config_str(&text, path.parent().unwrap_or(Path::new(".")))
}

pub fn parse_config_str(text: &str, base_dir: &Path) -> Result<RunConfig, Vec<ConfigError>> {
    let mut errors = Vec::new();
    let s = tokenize(text, &mut errors);
    for required in ["eos", "background"] {
        if !s.seen_sections.iter().any(|x| x == required) {
            errors.push(ConfigError {
                line: 0,
                message: format!("missing required section [{required}]"),
            });
        }
    }

    let eos = EosConfig {
        family: s.string_or("eos", "family", "ideal_gas"),
        gamma_ad: s.f64_or("eos", "gamma_ad", 4.0 / 3.0, &mut errors),
        m: s.f64_or("eos", "m", 1.0, &mut errors),
        c_rho: s.f64_or("eos", "c_rho", 1.0 / 3.0, &mut errors),
        c_n: s.f64_or("eos", "c_n", 0.0, &mut errors),
        offset: s.f64_or("eos", "offset", 0.0, &mut errors),
        path: s.path("eos", "path", base_dir),
        p0: s.f64_or("eos", "p0", 0.0, &mut errors),
        p1: s.f64_or("eos", "p1", 0.0, &mut errors),
    };
    let transport = TransportConfig {
        zeta: s.string_or("transport", "zeta", "zero"),
        zeta_value: s.f64_or("transport", "zeta_value", 0.0, &mut errors),
        zeta_coeff: s.f64_or("transport", "zeta_coeff", 1.0, &mut errors),
        zeta_n_exp: s.f64_or("transport", "zeta_n_exp", 1.0, &mut errors),
        zeta_decay: s.f64_or("transport", "zeta_decay", 1.0, &mut errors),
        zeta_rho_amp: s.f64_or("transport", "zeta_rho_amp", 0.0, &mut errors),
        zeta_rho_scale: s.f64_or("transport", "zeta_rho_scale", 1.0, &mut errors),
        zeta_path: s.path("transport", "zeta_path", base_dir),
        tau0: s.string_or("transport", "tau0", "constant"),
        tau0_value: s.f64_or("transport", "tau0_value", 1.0, &mut errors),
        tau0_coeff: s.f64_or("transport", "tau0_coeff", 1.0, &mut errors),
        tau0_n_exp: s.f64_or("transport", "tau0_n_exp", 0.0, &mut errors),
        tau0_decay: s.f64_or("transport", "tau0_decay", 0.0, &mut errors),
        tau0_path: s.path("transport", "tau0_path", base_dir),
        tau0_floor: s.f64_or("transport", "tau0_floor", 1.0, &mut errors),
        lambda: s.f64_or("transport", "lambda", 0.0, &mut errors),
    };
    let background = BackgroundConfig {
        rho_bar: s.f64_or("background", "rho_bar", 1.0, &mut errors),
        n_bar: s.f64_or("background", "n_bar", 0.5, &mut errors),
    };
    let data = DataConfig {
        r0: s.f64_or("data", "r0", 1.0, &mut errors),
        ell: s.f64_or("data", "ell", 0.1, &mut errors),
        sigma: s.f64_or("data", "sigma", 1.0, &mut errors),
        smooth_w: s.f64_or("data", "smooth_w", -1.0, &mut errors),
        standoff: s.f64_or("data", "standoff", 0.0, &mut errors),
    };
    let mode = s.string_or("grid", "mode", "radial");
    if mode != "radial" && mode != "planar" {
        errors.push(ConfigError {
            line: s.line_of("grid", "mode"),
            message: format!("[grid] mode must be 'radial' or 'planar', got '{mode}'"),
        });
    }
    let grid = GridConfig {
        radial: mode != "planar",
        n_cells: s.usize_or("grid", "n_cells", 2000, &mut errors),
        length: s.f64_or("grid", "length", 2.0, &mut errors),
        cfl: s.f64_or("grid", "cfl", 0.4, &mut errors),
        dissipation: s.f64_or("grid", "dissipation", 0.5, &mut errors),
        t_max: s.f64_or("grid", "t_max", 0.1, &mut errors),
        out_interval: s.f64_or("grid", "out_interval", 5e-4, &mut errors),
    };
    let thresholds = ThresholdConfig {
        grad_ratio: s.f64_or("thresholds", "grad_ratio", 1e3, &mut errors),
        physical_margin: s.f64_or("thresholds", "physical_margin", 1e-6, &mut errors),
        wec_margin: s.f64_or("thresholds", "wec_margin", 1e-6, &mut errors),
        pi_margin: s.f64_or("thresholds", "pi_margin", 1e-6, &mut errors),
        value_max: s.f64_or("thresholds", "value_max", 1e6, &mut errors),
        leak_tol: s.f64_or("thresholds", "leak_tol", 1e-6, &mut errors),
        support_tol: s.f64_or("thresholds", "support_tol", 1e-6, &mut errors),
        qbound_tol: s.f64_or("thresholds", "qbound_tol", 1e-6, &mut errors),
    };
    let output = OutputConfig {
        directory: s
            .path("output", "directory", base_dir)
            .unwrap_or_else(|| base_dir.join("out")),
        snapshot_every: s.usize_or("output", "snapshot_every", 0, &mut errors),
    };
    let certify = CertifyConfig {
        mu_margin: s.f64_or("certify", "mu_margin", 0.05, &mut errors),
        admissibility_margin: s.f64_or("certify", "admissibility_margin", 1e-10, &mut errors),
        abar_rho_lo: s.f64_or("certify", "abar_rho_lo", -10.0 * background.rho_bar, &mut errors),
        abar_rho_hi: s.f64_or("certify", "abar_rho_hi", 10.0 * background.rho_bar, &mut errors),
        abar_rho_samples: s.usize_or("certify", "abar_rho_samples", 33, &mut errors),
        abar_safety: s.f64_or("certify", "abar_safety", 0.0, &mut errors),
        abar_tol: s.f64_or("certify", "abar_tol", 1e-8, &mut errors),
        sigma_lo: s.f64_or("certify", "sigma_lo", 1.0, &mut errors),
        sigma_hi: s.f64_or("certify", "sigma_hi", 2f64.powi(20), &mut errors),
    };
    let theta = s.string_or("flowline", "theta", "sinusoid");
    if theta != "constant" && theta != "sinusoid" {
        errors.push(ConfigError {
            line: s.line_of("flowline", "theta"),
            message: format!("[flowline] theta must be 'constant' or 'sinusoid', got '{theta}'"),
        });
    }
    let flowline = FlowlineConfig {
        pi0: s.f64_or("flowline", "pi0", 0.0, &mut errors),
        tau_max: s.f64_or("flowline", "tau_max", 2.0, &mut errors),
        tol: s.f64_or("flowline", "tol", 1e-9, &mut errors),
        theta,
        theta_amp: s.f64_or("flowline", "theta_amp", 0.3, &mut errors),
        theta_omega: s.f64_or("flowline", "theta_omega", 2.0, &mut errors),
        theta_phase: s.f64_or("flowline", "theta_phase", 0.0, &mut errors),
        n_floor_rel: s.f64_or("flowline", "n_floor_rel", 1e-12, &mut errors),
        eps: s.f64_or("flowline", "eps", 1e-3, &mut errors),
        n0: s.f64_or("flowline", "n0", 0.0, &mut errors),
    };
    let riemann = RiemannConfig {
        rho_lo: s.f64_or("riemann", "rho_lo", 0.5 * background.rho_bar, &mut errors),
        rho_hi: s.f64_or("riemann", "rho_hi", 3.0 * background.rho_bar, &mut errors),
        rho_samples: s.usize_or("riemann", "rho_samples", 5, &mut errors),
        u_lo: s.f64_or("riemann", "u_lo", -2.0, &mut errors),
        u_hi: s.f64_or("riemann", "u_hi", 2.0, &mut errors),
        u_samples: s.usize_or("riemann", "u_samples", 5, &mut errors),
        pi_lo: s.f64_or("riemann", "pi_lo", -0.2, &mut errors),
        pi_hi: s.f64_or("riemann", "pi_hi", 0.4, &mut errors),
        pi_samples: s.usize_or("riemann", "pi_samples", 5, &mut errors),
    };

    // Range checks, each naming the offending key.
    let mut range = |cond: bool, section: &str, key: &str, why: &str| {
        if cond {
            errors.push(ConfigError {
                line: s.line_of(section, key),
                message: format!("[{section}] {key}: {why}"),
            });
        }
    };
    range(eos.family == "ideal_gas" && eos.gamma_ad <= 1.0, "eos", "gamma_ad", "must exceed 1");
    range(eos.family == "ideal_gas" && eos.m < 0.0, "eos", "m", "must be nonnegative");
    range(eos.p0 < 0.0, "eos", "p0", "must be nonnegative");
    range(eos.p1 < 0.0, "eos", "p1", "must be nonnegative");
    range(transport.tau0_floor <= 0.0, "transport", "tau0_floor", "must be positive");
    range(transport.lambda < 0.0, "transport", "lambda", "must be nonnegative");
    range(background.rho_bar <= 0.0, "background", "rho_bar", "must be positive");
    range(background.n_bar <= 0.0, "background", "n_bar", "must be positive");
    range(data.r0 <= 0.0, "data", "r0", "must be positive");
    range(data.ell <= 0.0 || data.ell >= data.r0, "data", "ell", "needs 0 < ell < r0");
    range(data.sigma < 0.0, "data", "sigma", "must be nonnegative");
    range(
        data.smooth_w >= 0.0 && data.smooth_w >= 0.5 * data.ell,
        "data",
        "smooth_w",
        "needs smooth_w < ell/2",
    );
    range(data.standoff < 0.0, "data", "standoff", "must be nonnegative");
    range(grid.n_cells < 8 || !grid.n_cells.is_multiple_of(2), "grid", "n_cells", "needs an even count >= 8");
    range(grid.length <= 0.0, "grid", "length", "must be positive");
    range(grid.cfl <= 0.0 || grid.cfl > 1.0, "grid", "cfl", "needs 0 < cfl <= 1");
    range(grid.dissipation < 0.0, "grid", "dissipation", "must be nonnegative");
    range(grid.t_max <= 0.0, "grid", "t_max", "must be positive");
    range(grid.out_interval <= 0.0, "grid", "out_interval", "must be positive");
    range(certify.sigma_lo <= 0.0, "certify", "sigma_lo", "must be positive");
    range(certify.sigma_hi <= certify.sigma_lo, "certify", "sigma_hi", "must exceed sigma_lo");
    range(flowline.tau_max <= 0.0, "flowline", "tau_max", "must be positive");
    range(flowline.eps <= 0.0, "flowline", "eps", "must be positive");

    if errors.is_empty() {
        Ok(RunConfig {
            eos,
            transport,
            background,
            data,
            grid,
            thresholds,
            output,
            certify,
            flowline,
            riemann,
        })
    } else {
        Err(errors)
    }
}
