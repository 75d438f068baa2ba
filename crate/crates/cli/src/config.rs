//! Run configuration: built-in defaults, overridden by a flat `key = value`
//! file, overridden by command-line flags.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::PathBuf;

use abmol::params::{validate, BathParams, DeviceParams, DEFAULT_CUTOFF};
use abmol::QuadratureSpec;

use crate::table::num;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.min];
        }
        let h = (self.max - self.min) / (self.n - 1) as f64;
        (0..self.n)
            .map(|k| if k + 1 == self.n { self.max } else { self.min + h * k as f64 })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub device: DeviceParams,
    pub bath: BathParams,
    pub quad: QuadratureSpec,
    pub time: Grid,
    pub flux: Grid,
    pub omega: Grid,
    pub oracle_modes: usize,
    pub oracle_bandwidth: f64,
    pub fuzz_draws: usize,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub seed: u64,
    pub full_linewidth: bool,
}

/// Every recognised key, in the order echoed into output metadata.
pub const KEYS: &[&str] = &[
    "e1",
    "e2",
    "gamma-l",
    "gamma-r",
    "phi",
    "bias",
    "temperature",
    "cutoff",
    "tail",
    "abs-tol",
    "rel-tol",
    "max-panels",
    "t-max",
    "n-t",
    "phi-min",
    "phi-max",
    "n-phi",
    "w-min",
    "w-max",
    "n-w",
    "oracle-modes",
    "oracle-bandwidth",
    "fuzz-draws",
    "format",
    "seed",
];

fn default_value(key: &str) -> String {
    let q = QuadratureSpec::default();
    match key {
        "e1" | "e2" => "0",
        "gamma-l" => "0.95",
        "gamma-r" => "0.05",
        "phi" => "-pi/2",
        "bias" => "6",
        "temperature" => "0.05",
        "cutoff" => return DEFAULT_CUTOFF.to_string(),
        "tail" => "false",
        "abs-tol" => return q.abs_tol.to_string(),
        "rel-tol" => return q.rel_tol.to_string(),
        "max-panels" => return q.max_panels.to_string(),
        "t-max" => "6",
        "n-t" => "61",
        "phi-min" => "-2pi",
        "phi-max" => "2pi",
        "n-phi" => "33",
        "w-min" => "-5",
        "w-max" => "5",
        "n-w" => "101",
        "oracle-modes" => "400",
        "oracle-bandwidth" => "20",
        "fuzz-draws" => "200",
        "format" => "csv",
        "seed" => "0",
        _ => unreachable!("unknown key {key}"),
    }
    .to_string()
}

/// Parses a flat `key = value` file. Blank lines and `#` comments are
/// ignored; underscores in keys are accepted for dashes.
pub fn parse_file(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key = value", lineno + 1)))?;
        let key = k.trim().replace('_', "-");
        if key != "out" && !KEYS.contains(&key.as_str()) {
            return Err(CliError::Usage(format!("config line {}: unknown key '{}'", lineno + 1, k.trim())));
        }
        map.insert(key, v.trim().to_string());
    }
    Ok(map)
}

/// Reals, optionally written as multiples of pi: `1.5`, `pi`, `-pi/2`, `3pi/4`, `0.5*pi`.
pub fn parse_real(s: &str) -> Option<f64> {
    let s = s.trim();
    if let Ok(x) = s.parse::<f64>() {
        return Some(x);
    }
    let (head, den) = match s.split_once('/') {
        Some((h, d)) => (h.trim(), d.trim().parse::<f64>().ok()?),
        None => (s, 1.0),
    };
    let coef = head.strip_suffix("pi")?.trim().trim_end_matches('*').trim();
    let c = match coef {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().ok()?,
    };
    Some(c * PI / den)
}

struct Resolver {
    values: BTreeMap<String, String>,
}

impl Resolver {
    fn raw(&self, key: &str) -> String {
        self.values.get(key).cloned().unwrap_or_else(|| default_value(key))
    }

    fn real(&self, key: &str) -> Result<f64, CliError> {
        let raw = self.raw(key);
        parse_real(&raw).ok_or_else(|| CliError::Usage(format!("--{key}: cannot parse '{raw}' as a number")))
    }

    fn count(&self, key: &str) -> Result<usize, CliError> {
        let raw = self.raw(key);
        raw.trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("--{key}: cannot parse '{raw}' as a non-negative integer")))
    }

    fn flag(&self, key: &str) -> Result<bool, CliError> {
        match self.raw(key).trim() {
            "true" | "1" | "yes" => Ok(true),
            "false" | "0" | "no" => Ok(false),
            other => Err(CliError::Usage(format!("--{key}: expected true or false, got '{other}'"))),
        }
    }
}

impl RunConfig {
    /// `cli` holds only the flags actually given; `file` the config-file entries.
    pub fn resolve(
        cli: BTreeMap<String, String>,
        file: BTreeMap<String, String>,
        full_linewidth: bool,
    ) -> Result<Self, CliError> {
        let mut values = file;
        values.extend(cli);
        let r = Resolver { values };
        let device = DeviceParams::new(
            r.real("e1")?,
            r.real("e2")?,
            r.real("gamma-l")?,
            r.real("gamma-r")?,
            r.real("phi")?,
        );
        let bath = BathParams::symmetric(r.real("bias")?, r.real("temperature")?).with_cutoff(r.real("cutoff")?);
        let report = validate(&device, &bath);
        if !report.is_ok() {
            return Err(CliError::Usage(format!("invalid parameters: {report}")));
        }
        let quad = QuadratureSpec {
            abs_tol: r.real("abs-tol")?,
            rel_tol: r.real("rel-tol")?,
            max_panels: r.count("max-panels")?,
            tail_correction: r.flag("tail")?,
        };
        if !(quad.abs_tol > 0.0 && quad.rel_tol > 0.0) || quad.max_panels == 0 {
            return Err(CliError::Usage("tolerances and panel budget must be positive".into()));
        }
        let time = Grid {
            min: 0.0,
            max: r.real("t-max")?,
            n: r.count("n-t")?,
        };
        if !(time.max > 0.0) {
            return Err(CliError::Usage("--t-max must be positive".into()));
        }
        let flux = Grid {
            min: r.real("phi-min")?,
            max: r.real("phi-max")?,
            n: r.count("n-phi")?,
        };
        let omega = Grid {
            min: r.real("w-min")?,
            max: r.real("w-max")?,
            n: r.count("n-w")?,
        };
        for (name, g) in [("n-t", time), ("n-phi", flux), ("n-w", omega)] {
            if g.n == 0 {
                return Err(CliError::Usage(format!("--{name} must be at least 1")));
            }
            if !(g.min.is_finite() && g.max.is_finite()) {
                return Err(CliError::Usage(format!("grid for --{name} must be finite")));
            }
        }
        let oracle_modes = r.count("oracle-modes")?;
        let oracle_bandwidth = r.real("oracle-bandwidth")?;
        if oracle_modes < 2 || !(oracle_bandwidth > 0.0) {
            return Err(CliError::Usage("oracle needs at least 2 modes and a positive bandwidth".into()));
        }
        let format = match r.raw("format").trim() {
            "csv" => Format::Csv,
            "json" => Format::Json,
            other => return Err(CliError::Usage(format!("--format: expected csv or json, got '{other}'"))),
        };
        let seed = r
            .raw("seed")
            .trim()
            .parse()
            .map_err(|_| CliError::Usage("--seed must be a non-negative integer".into()))?;
        Ok(Self {
            device,
            bath,
            quad,
            time,
            flux,
            omega,
            oracle_modes,
            oracle_bandwidth,
            fuzz_draws: r.count("fuzz-draws")?,
            out: r.values.get("out").map(PathBuf::from),
            format,
            seed,
            full_linewidth,
        })
    }

    /// Resolved values for every key, for the metadata block.
    pub fn echo(&self) -> Vec<(String, String)> {
        let d = &self.device;
        let b = &self.bath;
        let q = &self.quad;
        let vals: Vec<String> = vec![
            num(d.e1),
            num(d.e2),
            num(d.gamma_l),
            num(d.gamma_r),
            num(d.phi),
            num(b.bias()),
            num(b.temperature),
            num(b.cutoff),
            q.tail_correction.to_string(),
            num(q.abs_tol),
            num(q.rel_tol),
            q.max_panels.to_string(),
            num(self.time.max),
            self.time.n.to_string(),
            num(self.flux.min),
            num(self.flux.max),
            self.flux.n.to_string(),
            num(self.omega.min),
            num(self.omega.max),
            self.omega.n.to_string(),
            self.oracle_modes.to_string(),
            self.oracle_bandwidth.to_string(),
            self.fuzz_draws.to_string(),
            match self.format {
                Format::Csv => "csv".into(),
                Format::Json => "json".into(),
            },
            self.seed.to_string(),
        ];
        let mut out: Vec<(String, String)> = KEYS.iter().map(|k| k.to_string()).zip(vals).collect();
        if self.full_linewidth {
            out.push(("debug-full-linewidth".into(), "true".into()));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn pi_expressions() {
        assert_eq!(parse_real("1.5"), Some(1.5));
        assert_eq!(parse_real("pi"), Some(PI));
        assert_eq!(parse_real("-pi/2"), Some(-PI / 2.0));
        assert_eq!(parse_real("3pi/4"), Some(3.0 * PI / 4.0));
        assert_eq!(parse_real("0.5*pi"), Some(0.5 * PI));
        assert_eq!(parse_real("-2pi"), Some(-2.0 * PI));
        assert_eq!(parse_real("2 pi"), Some(2.0 * PI));
        assert_eq!(parse_real("x"), None);
        assert_eq!(parse_real("pi/0.5x"), None);
    }

    #[test]
    fn defaults_are_the_canonical_point() {
        let c = RunConfig::resolve(BTreeMap::new(), BTreeMap::new(), false).unwrap();
        assert_eq!(c.device.delta_gamma(), 0.95 - 0.05);
        assert_eq!(c.device.phi, -PI / 2.0);
        assert_eq!(c.bath.bias(), 6.0);
        assert_eq!(c.bath.temperature, 0.05);
        assert_eq!(c.flux.points().len(), 33);
        assert_eq!(c.flux.points()[0], -2.0 * PI);
        assert_eq!(c.flux.points()[32], 2.0 * PI);
        assert_eq!(c.flux.points()[16], 0.0);
        assert_eq!(c.time.points()[60], 6.0);
        assert!(!c.quad.tail_correction);
    }

    #[test]
    fn precedence_cli_over_file_over_defaults() {
        let file = parse_file("# comment\nbias = 2\ngamma_l = 0.5 # trailing\ntemperature=0\n").unwrap();
        let cli = map(&[("bias", "4")]);
        let c = RunConfig::resolve(cli, file, false).unwrap();
        assert_eq!(c.bath.bias(), 4.0);
        assert_eq!(c.device.gamma_l, 0.5);
        assert_eq!(c.bath.temperature, 0.0);
        assert_eq!(c.device.gamma_r, 0.05);
    }

    #[test]
    fn bad_inputs_are_usage_errors() {
        assert!(matches!(parse_file("bogus = 1"), Err(CliError::Usage(_))));
        assert!(matches!(parse_file("no equals sign"), Err(CliError::Usage(_))));
        for (k, v) in [
            ("gamma-l", "0"),
            ("format", "xml"),
            ("n-t", "0"),
            ("t-max", "-1"),
            ("bias", "abc"),
            ("cutoff", "1"),
            ("oracle-modes", "1"),
        ] {
            let mut cli = map(&[(k, v)]);
            if k == "gamma-l" {
                cli.insert("gamma-r".into(), "0".into());
            }
            assert!(matches!(RunConfig::resolve(cli, BTreeMap::new(), false), Err(CliError::Usage(_))), "{k}={v}");
        }
    }

    #[test]
    fn echo_covers_every_key() {
        let c = RunConfig::resolve(BTreeMap::new(), BTreeMap::new(), false).unwrap();
        let echo = c.echo();
        assert_eq!(echo.len(), KEYS.len());
        assert_eq!(echo[4], ("phi".to_string(), num(-PI / 2.0)));
    }
}
