//! `key=value` run configuration.
//!
//! Pairs are separated by whitespace or newlines, `#` starts a comment and
//! `[run]` / `[output]` headers group keys. Keys outside any section may come
//! from either group.
//!
//! ```text
//! case=sod scheme=IG6MP
//! [run]
//! cfl=0.2
//! grid=400x80        # or a preset name such as coarse
//! [output]
//! dir=out/sod snapshot_every=0.05 format=ascii
//! ```

use std::path::PathBuf;
use std::str::FromStr;

use crate::cases::{make_case, CaseSpec, DEFAULT_CFL};
use crate::error::{Error, Result};
use crate::gradients::GradientScheme;
use crate::reconstruction::ReconScheme;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SnapshotFormat {
    Ascii,
    Binary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub case: String,
    pub scheme: ReconScheme,
    /// Gradient scheme of the vorticity diagnostics; defaults to the scheme's own.
    pub gradient: Option<GradientScheme>,
    pub grid: Option<[usize; 3]>,
    pub cfl: f64,
    pub t_final: Option<f64>,
    pub characteristic: bool,
    pub threads: usize,
    pub output: PathBuf,
    /// Time between snapshots; the initial and final states are always written.
    pub snapshot_every: Option<f64>,
    pub format: SnapshotFormat,
    pub diagnostics: bool,
    pub diagnostics_every: usize,
}

impl RunConfig {
    pub fn new(case: &str, scheme: ReconScheme) -> Self {
        Self {
            case: case.to_string(),
            scheme,
            gradient: None,
            grid: None,
            cfl: DEFAULT_CFL,
            t_final: None,
            characteristic: false,
            threads: 0,
            output: PathBuf::from("out").join(case),
            snapshot_every: None,
            format: SnapshotFormat::Ascii,
            diagnostics: true,
            diagnostics_every: 1,
        }
    }

    pub fn case_spec(&self) -> Result<CaseSpec> {
        make_case(&self.case)
    }

    pub fn diagnostic_gradient(&self) -> GradientScheme {
        self.gradient.or(self.scheme.gradient_scheme()).unwrap_or(GradientScheme::Cd4)
    }

    /// Echo of the effective settings as `key=value` text, parseable again.
    pub fn to_text(&self) -> String {
        let mut s = format!("case={} scheme={} cfl={:?}", self.case, self.scheme, self.cfl);
        if let Some(g) = self.gradient {
            s += &format!(" gradient={g}");
        }
        if let Some(n) = self.grid {
            s += &format!(" grid={}x{}x{}", n[0], n[1], n[2]);
        }
        if let Some(t) = self.t_final {
            s += &format!(" t_final={t:?}");
        }
        s += &format!(
            " characteristic={} threads={} dir={} format={} diagnostics={} diagnostics_every={}",
            self.characteristic,
            self.threads,
            self.output.display(),
            match self.format {
                SnapshotFormat::Ascii => "ascii",
                SnapshotFormat::Binary => "binary",
            },
            self.diagnostics,
            self.diagnostics_every
        );
        if let Some(e) = self.snapshot_every {
            s += &format!(" snapshot_every={e:?}");
        }
        s
    }
}

const RUN_KEYS: [&str; 8] = ["case", "scheme", "gradient", "grid", "cfl", "t_final", "characteristic", "threads"];
const OUTPUT_KEYS: [&str; 5] = ["dir", "snapshot_every", "format", "diagnostics", "diagnostics_every"];

fn parse_value<T: FromStr>(line: usize, key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::Parse { line, message: format!("invalid value '{v}' for {key}") })
}

fn parse_bool(line: usize, key: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(Error::Parse { line, message: format!("invalid boolean '{v}' for {key}") }),
    }
}

fn parse_grid(line: usize, v: &str, case: &CaseSpec) -> Result<[usize; 3]> {
    if let Some(n) = case.preset(v) {
        return Ok(n);
    }
    let parts: Vec<&str> = v.split(['x', 'X', ',']).collect();
    let mut n = [1usize; 3];
    let active: Vec<usize> = (0..3).filter(|&a| case.n[a] > 1).collect();
    if parts.len() == 1 && active.len() > 1 {
        // a single count refines the default aspect ratio
        let m: usize = parse_value(line, "grid", parts[0])?;
        return Ok(case.grid_cells(m));
    }
    if parts.len() > 3 {
        return Err(Error::Parse { line, message: format!("grid '{v}' has more than three sizes") });
    }
    for (a, p) in parts.iter().enumerate() {
        n[a] = parse_value(line, "grid", p)?;
    }
    if (0..3).any(|a| (n[a] > 1) != (case.n[a] > 1)) {
        return Err(Error::Parse {
            line,
            message: format!("grid '{v}' does not match the {}D case {}", active.len(), case.name),
        });
    }
    Ok(n)
}

/// Parses configuration text, applies defaults and validates against the case registry.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut pairs: Vec<(usize, String, String)> = Vec::new();
    let mut section: Option<String> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| Error::Parse { line, message: format!("malformed section header '{content}'") })?;
            match name.trim() {
                "run" | "output" => section = Some(name.trim().to_string()),
                other => return Err(Error::Parse { line, message: format!("unknown section '{other}'") }),
            }
            continue;
        }
        for token in content.split_whitespace() {
            let (k, v) = token
                .split_once('=')
                .ok_or_else(|| Error::Parse { line, message: format!("expected key=value, found '{token}'") })?;
            let allowed = match section.as_deref() {
                Some("run") => RUN_KEYS.contains(&k),
                Some("output") => OUTPUT_KEYS.contains(&k),
                _ => RUN_KEYS.contains(&k) || OUTPUT_KEYS.contains(&k),
            };
            if !allowed {
                let place = section.as_deref().map(|s| format!(" in section [{s}]")).unwrap_or_default();
                return Err(Error::Parse { line, message: format!("unknown key '{k}'{place}") });
            }
            if pairs.iter().any(|(_, pk, _)| pk == k) {
                return Err(Error::Parse { line, message: format!("duplicate key '{k}'") });
            }
            pairs.push((line, k.to_string(), v.to_string()));
        }
    }
    let get = |k: &str| pairs.iter().find(|(_, pk, _)| pk == k).map(|(l, _, v)| (*l, v.as_str()));
    let (case_line, case_name) = get("case").ok_or_else(|| Error::Parse {
        line: text.lines().count().max(1),
        message: "missing required key 'case'".into(),
    })?;
    let case = make_case(case_name).map_err(|e| Error::Parse { line: case_line, message: e.to_string() })?;
    let scheme = match get("scheme") {
        Some((line, v)) => v.parse::<ReconScheme>().map_err(|e| Error::Parse { line, message: e.to_string() })?,
        None => ReconScheme::Ig6Mp,
    };
    let mut cfg = RunConfig::new(case.name, scheme);
    for (line, k, v) in &pairs {
        let (line, v) = (*line, v.as_str());
        match k.as_str() {
            "case" | "scheme" => {}
            "gradient" => {
                cfg.gradient = Some(v.parse().map_err(|e: Error| Error::Parse { line, message: e.to_string() })?)
            }
            "grid" => cfg.grid = Some(parse_grid(line, v, &case)?),
            "cfl" => {
                let c: f64 = parse_value(line, k, v)?;
                if !(c > 0.0 && c.is_finite()) {
                    return Err(Error::Parse { line, message: format!("cfl must be positive, got {v}") });
                }
                cfg.cfl = c;
            }
            "t_final" => {
                let t: f64 = parse_value(line, k, v)?;
                if !(t > 0.0 && t.is_finite()) {
                    return Err(Error::Parse { line, message: format!("t_final must be positive, got {v}") });
                }
                cfg.t_final = Some(t);
            }
            "characteristic" => cfg.characteristic = parse_bool(line, k, v)?,
            "threads" => cfg.threads = parse_value(line, k, v)?,
            "dir" => cfg.output = PathBuf::from(v),
            "snapshot_every" => {
                let t: f64 = parse_value(line, k, v)?;
                if !(t > 0.0 && t.is_finite()) {
                    return Err(Error::Parse { line, message: format!("snapshot_every must be positive, got {v}") });
                }
                cfg.snapshot_every = Some(t);
            }
            "format" => {
                cfg.format = match v {
                    "ascii" => SnapshotFormat::Ascii,
                    "binary" => SnapshotFormat::Binary,
                    _ => return Err(Error::Parse { line, message: format!("unknown format '{v}' (ascii or binary)") }),
                }
            }
            "diagnostics" => cfg.diagnostics = parse_bool(line, k, v)?,
            "diagnostics_every" => {
                cfg.diagnostics_every = parse_value(line, k, v)?;
                if cfg.diagnostics_every == 0 {
                    return Err(Error::Parse { line, message: "diagnostics_every must be at least 1".into() });
                }
            }
            _ => unreachable!("key set checked above"),
        }
    }
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config("case=sod scheme=IG6MP").unwrap();
        assert_eq!(c.case, "sod");
        assert_eq!(c.scheme, ReconScheme::Ig6Mp);
        assert_eq!(c.cfl, 0.2);
        assert_eq!(c.grid, None);
        assert_eq!(c.output, PathBuf::from("out/sod"));
        assert!(c.diagnostics);
    }

    #[test]
    fn cfl_override() {
        assert_eq!(parse_config("case=sod\ncfl=0.9").unwrap().cfl, 0.9);
    }

    #[test]
    fn unknown_scheme_is_rejected() {
        let e = parse_config("case=sod scheme=WENO7").unwrap_err();
        assert!(e.to_string().contains("unknown scheme"), "{e}");
        assert!(matches!(e, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = parse_config("case=sod\n# note\n\ncolour=red").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 4, .. }), "{e}");
        let e = parse_config("case=sod\n[output]\ncfl=0.3").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }), "{e}");
        let e = parse_config("case=nothing").unwrap_err();
        assert!(e.to_string().contains("unknown case"));
        assert!(parse_config("scheme=IG4").is_err());
        assert!(parse_config("case=sod cfl=-1").is_err());
        assert!(parse_config("case=sod cfl").is_err());
    }

    #[test]
    fn sections_and_grids() {
        let text =
            "# dmr\n[run]\ncase=dmr scheme=IG4MP grid=coarse\n[output]\ndir=/tmp/x format=binary snapshot_every=0.05\n";
        let c = parse_config(text).unwrap();
        assert_eq!(c.grid, Some([384, 128, 1]));
        assert_eq!(c.format, SnapshotFormat::Binary);
        assert_eq!(c.snapshot_every, Some(0.05));
        assert_eq!(parse_config("case=shock_entropy_2d grid=200x40").unwrap().grid, Some([200, 40, 1]));
        assert_eq!(parse_config("case=dmr grid=64").unwrap().grid, Some([192, 64, 1]));
        assert!(parse_config("case=sod grid=10x10").is_err());
    }

    #[test]
    fn echo_roundtrips() {
        let c =
            parse_config("case=rayleigh_taylor scheme=IG6MP grid=coarse gradient=CD6 t_final=0.5 snapshot_every=0.1")
                .unwrap();
        assert_eq!(parse_config(&c.to_text()).unwrap(), c);
    }
}
