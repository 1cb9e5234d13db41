//! One module per subcommand. Each parses its config, computes, and hands
//! back named output files plus pass/fail verdicts; [`run`] does the
//! caching and writing.

pub mod dims;
pub mod explicit;
pub mod heat;
pub mod poles;
pub mod render;
pub mod tube;

use crate::cache::Cache;
use crate::config::parse;
use crate::io::{atomic_write, create_dir};
use crate::manifest::{config_hash, sha256_hex, FileEntry, Manifest, TOOL, VERSION};
use crate::{config_err, Result};
use serde_json::Value;
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Dims,
    Poles,
    Tube,
    Heat,
    Explicit,
    Render,
}

impl Command {
    pub const ALL: [Command; 6] = [Command::Dims, Command::Poles, Command::Tube, Command::Heat, Command::Explicit, Command::Render];

    pub fn name(self) -> &'static str {
        match self {
            Command::Dims => "dims",
            Command::Poles => "poles",
            Command::Tube => "tube",
            Command::Heat => "heat",
            Command::Explicit => "explicit",
            Command::Render => "render",
        }
    }
}

impl FromStr for Command {
    type Err = crate::CliError;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL.into_iter().find(|c| c.name() == s).map_or_else(|| config_err(format!("unknown command `{s}`")), Ok)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutFile {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl OutFile {
    pub fn new(name: &str, bytes: impl Into<Vec<u8>>) -> Self {
        OutFile { name: name.to_string(), bytes: bytes.into() }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Output {
    pub files: Vec<OutFile>,
    pub verdicts: BTreeMap<String, bool>,
    pub summary: Value,
}

impl Output {
    pub fn file(&mut self, name: &str, bytes: impl Into<Vec<u8>>) {
        self.files.push(OutFile::new(name, bytes));
    }

    pub fn verdict(&mut self, name: &str, pass: bool) {
        self.verdicts.insert(name.to_string(), pass);
    }
}

/// Validate `config` for `cmd` and compute. Returns the canonical config
/// (defaults filled in) with the outputs.
pub fn execute(cmd: Command, config: Value) -> Result<(Value, Output)> {
    fn go<C>(config: Value, f: fn(&C) -> Result<Output>) -> Result<(Value, Output)>
    where
        C: serde::de::DeserializeOwned + serde::Serialize,
    {
        let c: C = parse(config)?;
        let canonical = serde_json::to_value(&c)?;
        Ok((canonical, f(&c)?))
    }
    match cmd {
        Command::Dims => go(config, dims::run),
        Command::Poles => go(config, poles::run),
        Command::Tube => go(config, tube::run),
        Command::Heat => go(config, heat::run),
        Command::Explicit => go(config, explicit::run),
        Command::Render => go(config, render::run),
    }
}

/// Canonical config and its hash without computing anything.
pub fn canonical(cmd: Command, config: Value) -> Result<(Value, String)> {
    fn canon<C: serde::de::DeserializeOwned + serde::Serialize>(v: Value) -> Result<Value> {
        Ok(serde_json::to_value(parse::<C>(v)?)?)
    }
    let v = match cmd {
        Command::Dims => canon::<dims::DimsConfig>(config)?,
        Command::Poles => canon::<poles::PolesConfig>(config)?,
        Command::Tube => canon::<tube::TubeConfig>(config)?,
        Command::Heat => canon::<heat::HeatConfig>(config)?,
        Command::Explicit => canon::<explicit::ExplicitConfig>(config)?,
        Command::Render => canon::<render::RenderConfig>(config)?,
    };
    let h = config_hash(cmd.name(), &v);
    Ok((v, h))
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Defaults to `out/<command>-<hash prefix>`.
    pub out_dir: Option<PathBuf>,
    pub cache: Option<Cache>,
    pub input_hashes: BTreeMap<String, String>,
}

/// Compute (or fetch from the cache) and write outputs plus
/// `manifest.json` into the output directory.
pub fn run(cmd: Command, config: Value, opts: &RunOptions) -> Result<(Manifest, PathBuf)> {
    let (canon, key) = canonical(cmd, config.clone())?;
    let out_dir = opts.out_dir.clone().unwrap_or_else(|| PathBuf::from("out").join(format!("{}-{}", cmd.name(), &key[..12])));
    let cached = match &opts.cache {
        Some(c) => c.load(&key)?,
        None => None,
    };
    let (manifest, files) = match cached {
        Some((mut m, files)) => {
            m.from_cache = true;
            m.input_hashes = opts.input_hashes.clone();
            (m, files)
        }
        None => {
            let start = Instant::now();
            let (canon2, out) = execute(cmd, canon.clone())?;
            debug_assert_eq!(canon, canon2);
            let m = Manifest {
                tool: TOOL.into(),
                version: VERSION.into(),
                command: cmd.name().into(),
                config_hash: key.clone(),
                config: canon,
                input_hashes: opts.input_hashes.clone(),
                files: out.files.iter().map(|f| FileEntry { name: f.name.clone(), sha256: sha256_hex(&f.bytes), bytes: f.bytes.len() as u64 }).collect(),
                timing_seconds: start.elapsed().as_secs_f64(),
                verdicts: out.verdicts,
                summary: out.summary,
                from_cache: false,
            };
            if let Some(c) = &opts.cache {
                c.store(&m, &out.files)?;
            }
            (m, out.files)
        }
    };
    create_dir(&out_dir)?;
    for f in &files {
        atomic_write(&out_dir.join(&f.name), &f.bytes)?;
    }
    atomic_write(&out_dir.join("manifest.json"), &serde_json::to_vec_pretty(&manifest)?)?;
    Ok((manifest, out_dir))
}
