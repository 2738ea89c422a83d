//! `key = value` configuration files and flag/file/default precedence.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::error::CliError;

/// Parsed configuration file. Keys are flag names without the leading
/// dashes, e.g. `epsilon-scale = 0.1`.
#[derive(Clone, Debug, Default)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

impl Settings {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::MissingInput(format!("config file {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Blank lines and `#` comments are ignored; values may be quoted.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(CliError::Usage(format!("config line {}: expected key = value", lineno + 1)));
            };
            let key = k.trim().trim_start_matches("--").replace('_', "-");
            let value = v.trim().trim_matches('"').to_string();
            if key.is_empty() {
                return Err(CliError::Usage(format!("config line {}: empty key", lineno + 1)));
            }
            if values.insert(key.clone(), value).is_some() {
                return Err(CliError::Usage(format!("config key {key:?} given twice")));
            }
        }
        Ok(Self { values })
    }

    /// Rejects keys the current subcommand does not know.
    pub fn check_keys(&self, allowed: &[&str]) -> Result<(), CliError> {
        for key in self.values.keys() {
            if key != "threads" && !allowed.contains(&key.as_str()) {
                return Err(CliError::Usage(format!("unknown config key {key:?}")));
            }
        }
        Ok(())
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        self.values
            .get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|e| CliError::Usage(format!("config key {key:?}: {e}")))
            })
            .transpose()
    }

    pub fn flag(&self, key: &str) -> Result<bool, CliError> {
        Ok(self.get::<bool>(key)?.unwrap_or(false))
    }
}

/// Flag if given, else the file value, else nothing.
pub fn layered<T: FromStr>(flag: Option<T>, settings: &Settings, key: &str) -> Result<Option<T>, CliError>
where
    T::Err: std::fmt::Display,
{
    match flag {
        Some(v) => Ok(Some(v)),
        None => settings.get(key),
    }
}

/// Flag if given, else the file value, else `default`.
pub fn resolve<T: FromStr>(flag: Option<T>, settings: &Settings, key: &str, default: T) -> Result<T, CliError>
where
    T::Err: std::fmt::Display,
{
    Ok(layered(flag, settings, key)?.unwrap_or(default))
}

/// Comma-separated list parsing shared by flags and file values.
#[derive(Clone, Debug, PartialEq)]
pub struct List<T>(pub Vec<T>);

impl<T: FromStr> FromStr for List<T>
where
    T::Err: std::fmt::Display,
{
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.split(',')
            .map(str::trim)
            .filter(|p| !p.is_empty())
            .map(|p| p.parse::<T>().map_err(|e| format!("{p:?}: {e}")))
            .collect::<Result<Vec<_>, _>>()
            .map(List)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_quotes_and_underscores() {
        let s = Settings::parse("# run\nmethod = \"dm\"\nepsilon_scale=0.2 # inline\n\n").unwrap();
        assert_eq!(s.get::<String>("method").unwrap().as_deref(), Some("dm"));
        assert_eq!(s.get::<f64>("epsilon-scale").unwrap(), Some(0.2));
        assert!(s.check_keys(&["method", "epsilon-scale"]).is_ok());
        assert!(s.check_keys(&["method"]).is_err());
    }

    #[test]
    fn precedence_is_flag_then_file_then_default() {
        let s = Settings::parse("seed = 3").unwrap();
        assert_eq!(resolve(Some(9u64), &s, "seed", 0).unwrap(), 9);
        assert_eq!(resolve(None, &s, "seed", 0u64).unwrap(), 3);
        assert_eq!(resolve(None, &s, "n", 5usize).unwrap(), 5);
    }

    #[test]
    fn malformed_lines_are_usage_errors() {
        assert!(matches!(Settings::parse("novalue"), Err(CliError::Usage(_))));
        assert!(matches!(Settings::parse("a = 1\na = 2"), Err(CliError::Usage(_))));
        let s = Settings::parse("n = lots").unwrap();
        assert!(matches!(s.get::<usize>("n"), Err(CliError::Usage(_))));
    }

    #[test]
    fn lists_split_on_commas() {
        let l: List<usize> = "10, 20,40".parse().unwrap();
        assert_eq!(l.0, vec![10, 20, 40]);
        assert!("1,x".parse::<List<usize>>().is_err());
    }
}
