//! Line-oriented `key = value` run configuration.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::path::PathBuf;

use super::presets::{Preset, DEFAULT_SLICE_LOCATIONS, DEFAULT_SNAPSHOT_TIMES};
use crate::error::{Error, Result};
use crate::fields::MaxwellFlux;
use crate::integrators::{default_cfl, DtPolicy, SchemeConfig, SchemeId};
use crate::mesh::{build_mesh, Mesh1D2V};
use crate::solvers::NewtonConfig;
use crate::vlasov::VlasovFlux;

/// Velocity half-width for physics runs.
pub const PHYSICS_VELOCITY_BOX: f64 = 1.5;
/// Velocity half-width for reversal accuracy studies.
pub const ACCURACY_VELOCITY_BOX: f64 = 1.2;

const KEYS: [&str; 19] = [
    "preset",
    "scheme",
    "k",
    "nx",
    "nv",
    "nv1",
    "nv2",
    "v1c",
    "v2c",
    "dt",
    "cfl",
    "t_final",
    "vlasov_flux",
    "maxwell_flux",
    "eps_tol",
    "out_dir",
    "cadence",
    "snapshot_times",
    "slice_locations",
];

/// Validated description of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub preset: Preset,
    pub scheme: SchemeConfig,
    pub k: usize,
    pub nx: usize,
    pub nv1: usize,
    pub nv2: usize,
    /// Velocity half-widths; `None` selects the default for the kind of run.
    pub v1c: Option<f64>,
    pub v2c: Option<f64>,
    pub t_final: f64,
    pub cadence: usize,
    pub out_dir: PathBuf,
    pub snapshot_times: Vec<f64>,
    pub slice_locations: Vec<f64>,
}

impl RunManifest {
    /// Manifest with defaults for everything but the preset and scheme.
    pub fn new(preset: Preset, scheme: SchemeId) -> RunManifest {
        let k = 2;
        let dt = if scheme.is_explicit_in_f() {
            DtPolicy::Cfl(default_cfl(k))
        } else {
            DtPolicy::Fixed(0.1)
        };
        RunManifest {
            preset,
            scheme: SchemeConfig::new(scheme, dt),
            k,
            nx: 32,
            nv1: 32,
            nv2: 32,
            v1c: None,
            v2c: None,
            t_final: 125.0,
            cadence: 1,
            out_dir: PathBuf::from("output"),
            snapshot_times: DEFAULT_SNAPSHOT_TIMES.to_vec(),
            slice_locations: DEFAULT_SLICE_LOCATIONS.to_vec(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.scheme.validate()?;
        if self.k == 0 || self.nx == 0 || self.nv1 == 0 || self.nv2 == 0 {
            return Err(Error::InvalidArgument("k and cell counts must be >= 1".into()));
        }
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return Err(Error::InvalidArgument("t_final must be >= 0".into()));
        }
        if self.cadence == 0 {
            return Err(Error::InvalidArgument("cadence must be >= 1".into()));
        }
        for v in [self.v1c, self.v2c].into_iter().flatten() {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument("velocity box must be positive".into()));
            }
        }
        self.preset.params().validate()
    }

    /// Mesh for this manifest with cell counts overridden by `cells` and the
    /// velocity box defaulting to `default_box`.
    pub fn mesh_with(&self, cells: (usize, usize, usize), default_box: f64) -> Result<Mesh1D2V> {
        let l = self.preset.params().length();
        build_mesh(
            cells.0,
            cells.1,
            cells.2,
            l,
            self.v1c.unwrap_or(default_box),
            self.v2c.unwrap_or(default_box),
            self.k,
        )
    }

    /// Mesh for a physics run.
    pub fn mesh(&self) -> Result<Mesh1D2V> {
        self.mesh_with((self.nx, self.nv1, self.nv2), PHYSICS_VELOCITY_BOX)
    }
}

/// Parses and validates a configuration. Errors name the offending line.
pub fn parse_config(text: &str) -> Result<RunManifest> {
    let mut entries: HashMap<&str, (usize, &str)> = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(cfg_err(line_no, format!("expected `key = value`, found `{line}`")));
        };
        let (key, value) = (key.trim(), value.trim());
        if !KEYS.contains(&key) {
            return Err(cfg_err(line_no, format!("unknown key `{key}`")));
        }
        if value.is_empty() {
            return Err(cfg_err(line_no, format!("missing value for `{key}`")));
        }
        if let Some((prev, _)) = entries.insert(key, (line_no, value)) {
            return Err(cfg_err(line_no, format!("duplicate key `{key}` (first set on line {prev})")));
        }
    }
    let p = Parsed { entries };
    let (preset_line, preset) = p.required("preset", |v| {
        Preset::parse(v).ok_or_else(|| format!("unknown preset `{v}`"))
    })?;
    let (scheme_line, scheme) = p.required("scheme", |v| {
        SchemeId::parse(v).ok_or_else(|| format!("unknown scheme `{v}`"))
    })?;
    let mut m = RunManifest::new(preset, scheme);
    if let Some(k) = p.get("k", parse_count)? {
        m.k = k;
    }
    if let Some(nx) = p.get("nx", parse_count)? {
        m.nx = nx;
    }
    if let Some(nv) = p.get("nv", parse_count)? {
        m.nv1 = nv;
        m.nv2 = nv;
    }
    if let Some(n) = p.get("nv1", parse_count)? {
        m.nv1 = n;
    }
    if let Some(n) = p.get("nv2", parse_count)? {
        m.nv2 = n;
    }
    m.v1c = p.get("v1c", parse_positive)?;
    m.v2c = p.get("v2c", parse_positive)?;
    let dt = p.get("dt", parse_positive)?;
    let cfl = p.get("cfl", parse_positive)?;
    m.scheme.dt = match (dt, cfl) {
        (Some(_), Some(_)) => {
            return Err(cfg_err(p.line("cfl"), "set either dt or cfl, not both".into()));
        }
        (Some(dt), None) => DtPolicy::Fixed(dt),
        (None, Some(c)) if scheme.is_explicit_in_f() => DtPolicy::Cfl(c),
        (None, _) if !scheme.is_explicit_in_f() => {
            let line = p.entries.get("cfl").map_or(scheme_line, |e| e.0);
            return Err(cfg_err(line, "fixed dt required for implicit schemes".into()));
        }
        (None, c) => DtPolicy::Cfl(c.unwrap_or(default_cfl(m.k))),
    };
    if let Some(t) = p.get("t_final", parse_nonnegative)? {
        m.t_final = t;
    }
    if let Some(f) = p.get("vlasov_flux", |v| {
        VlasovFlux::parse(v).ok_or_else(|| format!("vlasov_flux must be upwind or central, found `{v}`"))
    })? {
        m.scheme.vlasov_flux = f;
    }
    if let Some(f) = p.get("maxwell_flux", |v| {
        MaxwellFlux::parse(v).ok_or_else(|| format!("maxwell_flux must be central, alt_ep_bm or alt_em_bp, found `{v}`"))
    })? {
        m.scheme.maxwell_flux = f;
    }
    if let Some(tol) = p.get("eps_tol", parse_positive)? {
        m.scheme.newton = NewtonConfig::with_tol(tol);
    }
    if let Some(dir) = p.get("out_dir", |v| Ok::<_, String>(PathBuf::from(v)))? {
        m.out_dir = dir;
    }
    if let Some(c) = p.get("cadence", parse_count)? {
        m.cadence = c;
    }
    if let Some(t) = p.get("snapshot_times", |v| parse_list(v, parse_nonnegative))? {
        m.snapshot_times = t;
    }
    if let Some(x) = p.get("slice_locations", |v| parse_list(v, parse_nonnegative))? {
        m.slice_locations = x;
    }
    let l = preset.params().length();
    if let Some(x) = m.slice_locations.iter().find(|x| **x > l) {
        return Err(cfg_err(
            p.line("slice_locations"),
            format!("slice location {x} lies outside [0, {l}]"),
        ));
    }
    m.validate().map_err(|e| cfg_err(preset_line, e.to_string()))?;
    Ok(m)
}

struct Parsed<'a> {
    entries: HashMap<&'a str, (usize, &'a str)>,
}

impl Parsed<'_> {
    fn line(&self, key: &str) -> usize {
        self.entries.get(key).map_or(0, |e| e.0)
    }

    fn get<T>(&self, key: &str, parse: impl Fn(&str) -> std::result::Result<T, String>) -> Result<Option<T>> {
        match self.entries.get(key) {
            None => Ok(None),
            Some(&(line, v)) => parse(v)
                .map(Some)
                .map_err(|msg| cfg_err(line, format!("{key}: {msg}"))),
        }
    }

    fn required<T>(&self, key: &str, parse: impl Fn(&str) -> std::result::Result<T, String>) -> Result<(usize, T)> {
        match self.get(key, parse)? {
            Some(v) => Ok((self.line(key), v)),
            None => Err(cfg_err(0, format!("missing required key `{key}`"))),
        }
    }
}

fn cfg_err(line: usize, message: String) -> Error {
    Error::Config { line, message }
}

fn parse_count(v: &str) -> std::result::Result<usize, String> {
    match v.parse::<usize>() {
        Ok(n) if n >= 1 => Ok(n),
        _ => Err(format!("expected a positive integer, found `{v}`")),
    }
}

/// Real number with an optional `pi` factor, as in `4.9375pi`.
fn parse_real(v: &str) -> std::result::Result<f64, String> {
    let (num, scale) = match v.strip_suffix("pi") {
        Some(rest) if rest.trim().is_empty() => ("1", PI),
        Some(rest) => (rest.trim().trim_end_matches('*').trim(), PI),
        None => (v, 1.0),
    };
    match num.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x * scale),
        _ => Err(format!("expected a real number, found `{v}`")),
    }
}

fn parse_positive(v: &str) -> std::result::Result<f64, String> {
    let x = parse_real(v)?;
    if x > 0.0 {
        Ok(x)
    } else {
        Err(format!("must be positive, found `{v}`"))
    }
}

fn parse_nonnegative(v: &str) -> std::result::Result<f64, String> {
    let x = parse_real(v)?;
    if x >= 0.0 {
        Ok(x)
    } else {
        Err(format!("must be non-negative, found `{v}`"))
    }
}

fn parse_list<T>(v: &str, item: impl Fn(&str) -> std::result::Result<T, String>) -> std::result::Result<Vec<T>, String> {
    v.split(',').map(|s| item(s.trim())).collect()
}
