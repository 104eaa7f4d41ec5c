//! Optional TOML configuration. Keys may sit at the top level or in a table
//! named after the subcommand; the subcommand table wins, and flags win over both.
//!
//! ```toml
//! seed = 7
//!
//! [train]
//! lr = 0.25
//! max_iter = 500
//! ```

use std::path::Path;

use serde::de::DeserializeOwned;

use crate::CliError;

/// Environment variable supplying the default seed.
pub const SEED_ENV: &str = "RHETREL_SEED";
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Default)]
pub struct Config {
    table: toml::Table,
}

impl Config {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path).map_err(|e| crate::manifest::io_error(path, e))?;
        let table = text.parse::<toml::Table>().map_err(|e| CliError::Input {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Ok(Self { table })
    }

    fn lookup<T: DeserializeOwned>(&self, section: &str, key: &str) -> Result<Option<T>, CliError> {
        let value = self
            .table
            .get(section)
            .and_then(|s| s.as_table())
            .and_then(|s| s.get(key))
            .or_else(|| self.table.get(key));
        value
            .map(|v| {
                v.clone()
                    .try_into()
                    .map_err(|e| CliError::Usage(format!("config key `{key}`: {e}")))
            })
            .transpose()
    }

    /// Flag, then config, then `default`.
    pub fn resolve<T: DeserializeOwned>(
        &self,
        flag: Option<T>,
        section: &str,
        key: &str,
        default: T,
    ) -> Result<T, CliError> {
        match flag {
            Some(v) => Ok(v),
            None => Ok(self.lookup(section, key)?.unwrap_or(default)),
        }
    }

    /// Flag, then config, then `$RHETREL_SEED`, then 42.
    pub fn seed(&self, flag: Option<u64>, section: &str) -> Result<u64, CliError> {
        if let Some(seed) = flag {
            return Ok(seed);
        }
        if let Some(seed) = self.lookup(section, "seed")? {
            return Ok(seed);
        }
        match std::env::var(SEED_ENV) {
            Ok(s) => s
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("{SEED_ENV}=`{s}` is not an unsigned integer"))),
            Err(_) => Ok(DEFAULT_SEED),
        }
    }
}
