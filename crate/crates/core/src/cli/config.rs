use crate::field::rational::format_rational;
use crate::field::{parse_rational, Radius};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

/// Where a bad value came from and what is wrong with it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigError {
    pub origin: String,
    pub key: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}: {}", self.origin, self.key, self.message)
    }
}

impl std::error::Error for ConfigError {}

/// Everything a command needs, after merging the config file and the flags.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub p: Vec<u64>,
    pub a: Vec<String>,
    pub b: Vec<String>,
    pub c: Vec<String>,
    pub d: Vec<String>,
    pub x0: Option<String>,
    pub steps: usize,
    pub backend: String,
    pub precision: u32,
    pub radii: Vec<i64>,
    pub samples: usize,
    pub seed: u64,
    pub format: Format,
    pub depth: usize,
    pub threshold_exp: i64,
    pub size_ceiling: u64,
    pub corrupt_step: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            p: Vec::new(),
            a: Vec::new(),
            b: Vec::new(),
            c: Vec::new(),
            d: Vec::new(),
            x0: None,
            steps: 50,
            backend: "exact".into(),
            precision: 40,
            radii: vec![-1, -2],
            samples: 20,
            seed: 0,
            format: Format::Json,
            depth: 50,
            threshold_exp: 60,
            size_ceiling: 16_384,
            corrupt_step: None,
        }
    }
}

const KEYS: [&str; 17] = [
    "p", "a", "b", "c", "d", "x0", "steps", "backend", "precision", "radii", "samples", "seed", "format", "depth", "threshold-exp", "size-ceiling",
    "corrupt-step",
];

/// Radius exponent as printed by the CLI: `-inf` for zero, `inf` for infinity.
pub fn render_exponent(r: &Radius) -> String {
    match r {
        Radius::Zero => "-inf".into(),
        Radius::Infinity => "inf".into(),
        Radius::Finite(e) => format_rational(e),
    }
}

pub fn parse_exponent(s: &str) -> Option<Radius> {
    match s.trim() {
        "-inf" => Some(Radius::Zero),
        "inf" => Some(Radius::Infinity),
        t => parse_rational(t).ok().map(Radius::Finite),
    }
}

fn list(v: &str) -> Vec<String> {
    v.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()
}

impl RunConfig {
    fn set(&mut self, key: &str, value: &str, origin: &str, allow_lists: bool) -> Result<(), ConfigError> {
        let err = |m: String| ConfigError { origin: origin.to_string(), key: key.to_string(), message: m };
        fn num<T: std::str::FromStr>(v: &str) -> Option<T> {
            v.trim().parse().ok()
        }
        let many = |v: &str| -> Result<Vec<String>, ConfigError> {
            let items = list(v);
            if items.is_empty() {
                return Err(err("empty value".into()));
            }
            if items.len() > 1 && !allow_lists {
                return Err(err("lists are only accepted by sweep".into()));
            }
            for it in &items {
                parse_rational(it).map_err(|e| err(e.to_string()))?;
            }
            Ok(items)
        };
        match key {
            "p" => {
                let items = list(value);
                if items.len() > 1 && !allow_lists {
                    return Err(err("lists are only accepted by sweep".into()));
                }
                self.p = items
                    .iter()
                    .map(|s| num::<u64>(s).filter(|p| crate::field::Prime::new(*p).is_ok()).ok_or_else(|| err(format!("`{s}` is not a prime"))))
                    .collect::<Result<_, _>>()?;
                if self.p.is_empty() {
                    return Err(err("empty value".into()));
                }
            }
            "a" => self.a = many(value)?,
            "b" => self.b = many(value)?,
            "c" => self.c = many(value)?,
            "d" => self.d = many(value)?,
            "x0" => self.x0 = Some(value.trim().to_string()),
            "steps" => self.steps = num(value).ok_or_else(|| err(format!("expected a non-negative integer, got `{value}`")))?,
            "backend" => {
                let v = value.trim();
                if !matches!(v, "exact" | "trunc" | "truncated" | "anchored") {
                    return Err(err(format!("expected exact, trunc or anchored, got `{v}`")));
                }
                self.backend = v.to_string();
            }
            "precision" => {
                self.precision = num(value).filter(|n: &u32| *n > 0).ok_or_else(|| err(format!("expected a positive integer, got `{value}`")))?
            }
            "radii" => {
                self.radii = list(value)
                    .iter()
                    .map(|s| num::<i64>(s).ok_or_else(|| err(format!("`{s}` is not an integer exponent"))))
                    .collect::<Result<_, _>>()?
            }
            "samples" => self.samples = num(value).ok_or_else(|| err(format!("expected a non-negative integer, got `{value}`")))?,
            "seed" => self.seed = num(value).ok_or_else(|| err(format!("expected an unsigned integer, got `{value}`")))?,
            "format" => {
                self.format = match value.trim() {
                    "json" => Format::Json,
                    "csv" => Format::Csv,
                    v => return Err(err(format!("expected json or csv, got `{v}`"))),
                }
            }
            "depth" => self.depth = num(value).ok_or_else(|| err(format!("expected a non-negative integer, got `{value}`")))?,
            "threshold-exp" | "threshold_exp" => {
                self.threshold_exp = num(value).filter(|n: &i64| *n > 0).ok_or_else(|| err(format!("expected a positive integer, got `{value}`")))?
            }
            "size-ceiling" => {
                self.size_ceiling = num(value).filter(|n: &u64| *n > 0).ok_or_else(|| err(format!("expected a positive bit count, got `{value}`")))?
            }
            "corrupt-step" => self.corrupt_step = Some(num(value).ok_or_else(|| err(format!("expected a step index, got `{value}`")))?),
            _ => return Err(err("unknown key".into())),
        }
        Ok(())
    }

    /// Merges a `key = value` file (lines may hold `#` comments) with flag
    /// pairs; flags override the file.
    pub fn build(file: Option<&str>, flags: &[(&str, String)], allow_lists: bool) -> Result<RunConfig, ConfigError> {
        let mut cfg = RunConfig::default();
        if let Some(text) = file {
            for (no, line) in text.lines().enumerate() {
                let origin = format!("config line {}", no + 1);
                let line = line.split('#').next().unwrap_or("").trim();
                if line.is_empty() {
                    continue;
                }
                let Some((k, v)) = line.split_once('=') else {
                    return Err(ConfigError { origin, key: line.to_string(), message: "expected `key = value`".into() });
                };
                let k = k.trim();
                if !KEYS.contains(&k) && k != "threshold_exp" {
                    return Err(ConfigError { origin, key: k.to_string(), message: "unknown key".into() });
                }
                cfg.set(k, v, &origin, allow_lists)?;
            }
        }
        for (k, v) in flags {
            cfg.set(k, v, &format!("--{k}"), allow_lists)?;
        }
        Ok(cfg)
    }

    /// The map parameters when each has exactly one value.
    pub fn single_params(&self) -> Result<(u64, &str, &str, &str, &str), ConfigError> {
        let missing = |k: &str| ConfigError { origin: "parameters".into(), key: k.into(), message: "missing".into() };
        fn first(v: &[String]) -> Option<&str> {
            v.first().map(|s| s.as_str())
        }
        let one = |v, k: &str| first(v).ok_or_else(|| missing(k));
        let p = *self.p.first().ok_or_else(|| missing("p"))?;
        Ok((p, one(&self.a, "a")?, one(&self.b, "b")?, one(&self.c, "c")?, one(&self.d, "d")?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_flags() {
        let file = "p = 3\na = 0\nb = 2 # repeller\nc = 1\nd = 1\nsteps = 7\n";
        let cfg = RunConfig::build(Some(file), &[("steps", "9".into())], false).unwrap();
        assert_eq!(cfg.steps, 9);
        assert_eq!(cfg.single_params().unwrap(), (3, "0", "2", "1", "1"));
        assert_eq!(cfg.seed, 0);
        assert_eq!(cfg.precision, 40);
    }

    #[test]
    fn precise_errors() {
        let e = RunConfig::build(Some("p = 3\nsteps = many\n"), &[], false).unwrap_err();
        assert_eq!(e.origin, "config line 2");
        assert_eq!(e.key, "steps");
        let e = RunConfig::build(None, &[("p", "4".into())], false).unwrap_err();
        assert_eq!(e.origin, "--p");
        let e = RunConfig::build(None, &[("b", "1,2".into())], false).unwrap_err();
        assert!(e.message.contains("sweep"));
        assert!(RunConfig::build(None, &[("b", "-2,-1,1,2".into())], true).is_ok());
        let e = RunConfig::build(Some("colour = red"), &[], false).unwrap_err();
        assert_eq!(e.message, "unknown key");
    }

    #[test]
    fn exponents_round_trip() {
        for r in [Radius::Zero, Radius::Infinity, Radius::exp(-3), Radius::exp_ratio(1, 2), Radius::one()] {
            assert_eq!(parse_exponent(&render_exponent(&r)), Some(r));
        }
    }
}
