//! Splices `--config` file entries into argv ahead of the user's own flags,
//! so that later command-line occurrences override them.

use std::ffi::OsString;

use anyhow::{bail, Context, Result};
use clap::CommandFactory;
use lexred_core::pipeline::parse_key_values;

use crate::args::Cli;

fn config_path(args: &[OsString]) -> Option<OsString> {
    let mut it = args.iter();
    let mut found = None;
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            found = it.next().cloned();
        } else if let Some(v) = s.strip_prefix("--config=") {
            found = Some(v.into());
        }
    }
    found
}

/// Returns argv with config entries inserted right after the subcommand.
/// One file can serve several subcommands: keys belonging only to other
/// subcommands are skipped, keys no subcommand knows are a usage error.
pub fn expand(argv: Vec<OsString>) -> Result<Vec<OsString>> {
    let command = Cli::command();
    let Some(pos) = argv
        .iter()
        .skip(1)
        .position(|a| command.find_subcommand(a).is_some())
        .map(|p| p + 1)
    else {
        return Ok(argv);
    };
    let Some(path) = config_path(&argv[pos + 1..]) else {
        return Ok(argv);
    };
    let text = std::fs::read_to_string(&path).with_context(|| format!("reading config {path:?}"))?;
    let sub = command.find_subcommand(&argv[pos]).unwrap();
    let known: Vec<&str> = sub.get_arguments().filter_map(|a| a.get_long()).collect();

    let mut injected = Vec::new();
    for (key, value) in parse_key_values(&text)? {
        let flag = key.replace('_', "-");
        if flag == "config" {
            bail!("config files cannot include other config files");
        }
        if !known.contains(&flag.as_str()) {
            let elsewhere = command
                .get_subcommands()
                .any(|c| c.get_arguments().any(|a| a.get_long() == Some(flag.as_str())));
            if elsewhere {
                continue;
            }
            bail!("unknown config key {key:?}");
        }
        injected.push(OsString::from(format!("--{flag}")));
        injected.push(OsString::from(value));
    }
    let mut out = argv[..=pos].to_vec();
    out.extend(injected);
    out.extend_from_slice(&argv[pos + 1..]);
    Ok(out)
}
