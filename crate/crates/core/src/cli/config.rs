//! Run configuration: defaults, then a flat `key = value` file, then flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::modes::{DataPair, Family, InitialDataSpec};
use crate::util::grid;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Special,
    Lemmas,
    Decay,
    Profile,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Special => "special",
            Command::Lemmas => "lemmas",
            Command::Decay => "decay",
            Command::Profile => "profile",
        }
    }

    fn defaults(self) -> Vec<(&'static str, &'static str)> {
        let mut d = vec![
            ("dim", "1,2,3"),
            ("log_grid", "true"),
            ("seed", "20240601"),
            ("u0_family", "zero"),
            ("u0_amplitude", "1"),
            ("u0_width", "1"),
            ("u1_family", "gaussian"),
            ("u1_amplitude", "1"),
            ("u1_width", "1"),
            ("split", "1"),
        ];
        d.extend(match self {
            Command::Special => vec![
                ("t_min", "100"),
                ("t_max", "1000000"),
                ("t_points", "5"),
                ("tol", "1e-10"),
                ("p_values", "0,0.5,1,2,3,5,7"),
                ("band_ratio", "1.2"),
            ],
            Command::Lemmas => vec![
                ("t_min", "100"),
                ("t_max", "10000"),
                ("t_points", "3"),
                ("tol", "1e-10"),
                ("samples", "1000"),
            ],
            Command::Decay => vec![
                ("t_min", "100"),
                ("t_max", "100000"),
                ("t_points", "20"),
                ("tol", "1e-10"),
                ("slope_tol", "0.05"),
                ("band_tol", "0.25"),
            ],
            Command::Profile => vec![
                ("t_min", "100"),
                ("t_max", "10000"),
                ("t_points", "9"),
                ("tol", "1e-10"),
                ("band_ratio", "3"),
                ("data_multiple", "1"),
            ],
        });
        d
    }
}

/// Raw settings in precedence order; later layers override earlier ones.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Layers {
    pub file: Option<PathBuf>,
    pub overrides: Vec<(String, String)>,
}

/// Parse a flat `key = value` document. `#` starts a comment.
pub fn parse_config_text(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(Error::Config {
                field: format!("line {}", i + 1),
                message: format!("expected `key = value`, found `{line}`"),
            });
        };
        out.push((k.trim().replace('-', "_"), v.trim().to_string()));
    }
    Ok(out)
}

fn read_file(path: &Path) -> Result<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config {
        field: "config".into(),
        message: format!("{}: {e}", path.display()),
    })?;
    parse_config_text(&text)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub dims: Vec<u32>,
    pub t_grid: Vec<f64>,
    pub tol: f64,
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub split: f64,
    pub p_values: Vec<f64>,
    pub band_ratio: f64,
    pub slope_tol: f64,
    pub band_tol: f64,
    pub data_multiple: f64,
    pub samples: usize,
    resolved: BTreeMap<String, String>,
    data: [(Family, f64, f64); 2],
}

fn bad(field: &str, message: impl Into<String>) -> Error {
    Error::Config {
        field: field.to_string(),
        message: message.into(),
    }
}

fn get<'a>(m: &'a BTreeMap<String, String>, key: &str) -> Option<&'a str> {
    m.get(key).map(String::as_str)
}

fn real(m: &BTreeMap<String, String>, key: &str) -> Result<f64> {
    let raw = get(m, key).ok_or_else(|| bad(key, "missing value"))?;
    let v: f64 = raw.parse().map_err(|_| bad(key, format!("`{raw}` is not a number")))?;
    if !v.is_finite() {
        return Err(bad(key, "must be finite"));
    }
    Ok(v)
}

fn positive(m: &BTreeMap<String, String>, key: &str) -> Result<f64> {
    let v = real(m, key)?;
    if v <= 0.0 {
        return Err(bad(key, format!("must be positive, got {v}")));
    }
    Ok(v)
}

fn integer<T: std::str::FromStr>(m: &BTreeMap<String, String>, key: &str) -> Result<T> {
    let raw = get(m, key).ok_or_else(|| bad(key, "missing value"))?;
    raw.parse()
        .map_err(|_| bad(key, format!("`{raw}` is not a valid integer")))
}

fn list<T: std::str::FromStr>(m: &BTreeMap<String, String>, key: &str) -> Result<Vec<T>> {
    let raw = get(m, key).ok_or_else(|| bad(key, "missing value"))?;
    let v = raw
        .split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| bad(key, format!("`{s}` is not valid in `{raw}`")))
        })
        .collect::<Result<Vec<T>>>()?;
    if v.is_empty() {
        return Err(bad(key, "list is empty"));
    }
    Ok(v)
}

impl RunConfig {
    /// Merge defaults, the optional config file and flag overrides, then validate.
    pub fn resolve(command: Command, layers: &Layers) -> Result<Self> {
        let mut m: BTreeMap<String, String> = command
            .defaults()
            .into_iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect();
        let mut entries = match &layers.file {
            Some(path) => read_file(path)?,
            None => Vec::new(),
        };
        entries.extend(layers.overrides.iter().cloned());
        for (k, v) in entries {
            if k != "out" && !m.contains_key(&k) {
                return Err(bad(&k, format!("unknown key for `{}`", command.name())));
            }
            m.insert(k, v);
        }
        Self::from_map(command, m)
    }

    fn from_map(command: Command, m: BTreeMap<String, String>) -> Result<Self> {
        let dims: Vec<u32> = list(&m, "dim")?;
        if let Some(&d) = dims.iter().find(|&&d| d == 0 || d > 16) {
            return Err(bad("dim", format!("dimension {d} outside 1..=16")));
        }
        let t_min = positive(&m, "t_min")?;
        let t_max = positive(&m, "t_max")?;
        if t_min >= t_max {
            return Err(bad("t_min", format!("t_min = {t_min} must be below t_max = {t_max}")));
        }
        let t_points: usize = integer(&m, "t_points")?;
        if t_points < 2 {
            return Err(bad(
                "t_points",
                format!("a t-grid needs at least two points, got {t_points}"),
            ));
        }
        let log_grid = match get(&m, "log_grid") {
            Some("true" | "1" | "yes") => true,
            Some("false" | "0" | "no") => false,
            Some(other) => return Err(bad("log_grid", format!("`{other}` is not a boolean"))),
            None => true,
        };
        let t_grid = grid(t_min, t_max, t_points, log_grid).map_err(|e| bad("t_points", e.to_string()))?;
        let tol = real(&m, "tol")?;
        if tol < 0.0 {
            return Err(bad("tol", "must be >= 0"));
        }
        let mut data = [(Family::Zero, 0.0, 1.0); 2];
        for (i, slot) in data.iter_mut().enumerate() {
            let fam_key = format!("u{i}_family");
            let family: Family = get(&m, &fam_key)
                .unwrap_or("zero")
                .parse()
                .map_err(|e: Error| bad(&fam_key, e.to_string()))?;
            *slot = (
                family,
                real(&m, &format!("u{i}_amplitude"))?,
                positive(&m, &format!("u{i}_width"))?,
            );
        }
        let opt = |key: &str, default: f64| -> Result<f64> {
            if m.contains_key(key) {
                positive(&m, key)
            } else {
                Ok(default)
            }
        };
        Ok(Self {
            command,
            dims,
            t_grid,
            tol,
            out: get(&m, "out").filter(|s| !s.is_empty()).map(PathBuf::from),
            seed: integer(&m, "seed")?,
            split: positive(&m, "split")?,
            p_values: if m.contains_key("p_values") {
                list(&m, "p_values")?
            } else {
                Vec::new()
            },
            band_ratio: opt("band_ratio", 1.0)?,
            slope_tol: opt("slope_tol", 0.05)?,
            band_tol: opt("band_tol", 0.25)?,
            data_multiple: opt("data_multiple", 1.0)?,
            samples: if m.contains_key("samples") {
                integer(&m, "samples")?
            } else {
                0
            },
            resolved: m,
            data,
        })
    }

    /// Data pair in dimension `n`.
    pub fn data(&self, n: u32) -> Result<DataPair> {
        let build = |i: usize| -> Result<InitialDataSpec> {
            let (family, amplitude, width) = self.data[i];
            match family {
                Family::Zero => InitialDataSpec::zero(n),
                Family::Gaussian => InitialDataSpec::gaussian(amplitude, width, n),
            }
        };
        DataPair::new(build(0)?, build(1)?)
    }

    /// SHA-256 of the resolved settings (excluding the output path), as hex.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.command.name().as_bytes());
        for (k, v) in self.resolved.iter().filter(|(k, _)| k.as_str() != "out") {
            h.update(b"\n");
            h.update(k.as_bytes());
            h.update(b"=");
            h.update(v.as_bytes());
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn over(pairs: &[(&str, &str)]) -> Layers {
        Layers {
            file: None,
            overrides: pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
        }
    }

    #[test]
    fn defaults_resolve() {
        let c = RunConfig::resolve(Command::Decay, &Layers::default()).unwrap();
        assert_eq!(c.dims, vec![1, 2, 3]);
        assert_eq!(c.t_grid.len(), 20);
        assert_eq!(c.t_grid[0], 100.0);
    }

    #[test]
    fn single_point_grid_names_the_field() {
        let err = RunConfig::resolve(Command::Profile, &over(&[("t_points", "1")])).unwrap_err();
        assert!(
            matches!(err, Error::Config { ref field, .. } if field == "t_points"),
            "{err}"
        );
    }

    #[test]
    fn unknown_keys_and_bad_values() {
        assert!(RunConfig::resolve(Command::Special, &over(&[("bogus", "1")])).is_err());
        let err = RunConfig::resolve(Command::Special, &over(&[("u1_width", "-1")])).unwrap_err();
        assert!(matches!(err, Error::Config { ref field, .. } if field == "u1_width"));
        let err = RunConfig::resolve(Command::Special, &over(&[("u0_family", "bump")])).unwrap_err();
        assert!(matches!(err, Error::Config { ref field, .. } if field == "u0_family"));
    }

    #[test]
    fn file_then_flags() {
        let parsed = parse_config_text("# comment\nt-points = 4\n dim=2 # trailing\n").unwrap();
        assert_eq!(
            parsed,
            vec![("t_points".into(), "4".into()), ("dim".into(), "2".into())]
        );
        assert!(parse_config_text("no equals sign").is_err());
        let dir = std::env::temp_dir().join(format!("logdamp-config-{}", std::process::id()));
        std::fs::write(&dir, "t_points = 4\ndim = 2\n").unwrap();
        let layers = Layers {
            file: Some(dir.clone()),
            overrides: vec![("dim".into(), "3".into())],
        };
        let c = RunConfig::resolve(Command::Decay, &layers).unwrap();
        std::fs::remove_file(&dir).ok();
        assert_eq!(c.t_grid.len(), 4);
        assert_eq!(c.dims, vec![3]);
    }

    #[test]
    fn hash_ignores_output_path_only() {
        let a = RunConfig::resolve(Command::Decay, &over(&[("out", "x.csv")])).unwrap();
        let b = RunConfig::resolve(Command::Decay, &Layers::default()).unwrap();
        let c = RunConfig::resolve(Command::Decay, &over(&[("seed", "7")])).unwrap();
        assert_eq!(a.hash(), b.hash());
        assert_ne!(b.hash(), c.hash());
    }
}
