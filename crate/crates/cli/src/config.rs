//! Flat `key = value` instance configuration.

use std::fmt;
use std::path::PathBuf;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InstanceConfig {
    pub curve: [i64; 5],
    pub conductor: u64,
    pub d_k: i64,
    pub p: u64,
    pub l: Vec<u64>,
    pub n_max: u32,
    pub mu_search_bound: u64,
    pub precision: u32,
    pub cache_dir: Option<PathBuf>,
    pub format: Format,
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid config: {}", self.0)
    }
}

impl Default for InstanceConfig {
    fn default() -> Self {
        InstanceConfig {
            curve: [0, -1, 1, -10, -20],
            conductor: 11,
            d_k: -67,
            p: 3,
            l: vec![5, 7],
            n_max: 2,
            mu_search_bound: 100,
            precision: 10,
            cache_dir: None,
            format: Format::Csv,
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, ConfigError> {
    v.parse()
        .map_err(|_| ConfigError(format!("`{key}`: cannot parse `{v}`")))
}

fn parse_list<T: std::str::FromStr>(key: &str, v: &str) -> Result<Vec<T>, ConfigError> {
    v.split(',').map(|x| parse_num(key, x.trim())).collect()
}

impl InstanceConfig {
    /// Unknown keys and malformed lines are errors; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut c = InstanceConfig::default();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| ConfigError(format!("line {}: expected key = value", no + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            match k {
                "curve" => {
                    let a: Vec<i64> = parse_list(k, v)?;
                    c.curve = a
                        .try_into()
                        .map_err(|_| ConfigError("`curve` needs five coefficients".into()))?;
                }
                "conductor" => c.conductor = parse_num(k, v)?,
                "d_k" => c.d_k = parse_num(k, v)?,
                "p" => c.p = parse_num(k, v)?,
                "l" => c.l = parse_list(k, v)?,
                "n_max" => c.n_max = parse_num(k, v)?,
                "mu_search_bound" => c.mu_search_bound = parse_num(k, v)?,
                "precision" => c.precision = parse_num(k, v)?,
                "cache_dir" => c.cache_dir = Some(PathBuf::from(v)),
                "format" => {
                    c.format = match v {
                        "csv" => Format::Csv,
                        "json" => Format::Json,
                        _ => return Err(ConfigError(format!("`format`: expected csv or json, got `{v}`"))),
                    }
                }
                _ => return Err(ConfigError(format!("unknown key `{k}`"))),
            }
        }
        c.check()?;
        Ok(c)
    }

    fn check(&self) -> Result<(), ConfigError> {
        if self.conductor == 0 || self.p < 3 || self.l.is_empty() || self.precision == 0 {
            return Err(ConfigError("conductor, p ≥ 3, l and precision must be set".into()));
        }
        if self.d_k >= 0 {
            return Err(ConfigError("d_K must be negative".into()));
        }
        if self.n_max == 0 {
            return Err(ConfigError("n_max must be at least 1".into()));
        }
        Ok(())
    }

    /// Canonical text form, used for cache keys.
    pub fn canonical(&self) -> String {
        let a = self.curve.map(|x| x.to_string()).join(",");
        let l: Vec<String> = self.l.iter().map(|x| x.to_string()).collect();
        format!(
            "curve={a}\nconductor={}\nd_k={}\np={}\nl={}\nn_max={}\nmu_search_bound={}\nprecision={}\n",
            self.conductor,
            self.d_k,
            self.p,
            l.join(","),
            self.n_max,
            self.mu_search_bound,
            self.precision
        )
    }
}
