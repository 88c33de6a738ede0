//! The `sgo` command line, callable in-process through [`run_cli`].

pub mod args;
pub mod commands;
pub mod output;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::Parser;
use serde_json::json;
use sgo_core::config::RunConfig;

use args::{Cli, Command, Source};
use output::{sha256_hex, write_run, Manifest};

const EXIT_IO: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

struct Failure {
    kind: String,
    message: String,
    code: u8,
}

impl From<sgo_core::Error> for Failure {
    fn from(e: sgo_core::Error) -> Self {
        let code = if e.is_numerical() { EXIT_NUMERICAL } else { EXIT_CONFIG };
        Failure {
            kind: e.kind().into(),
            message: e.to_string(),
            code,
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure {
            kind: "io".into(),
            message: e.to_string(),
            code: EXIT_IO,
        }
    }
}

fn config_error(message: String) -> Failure {
    Failure {
        kind: "config".into(),
        message,
        code: EXIT_CONFIG,
    }
}

/// Exit code and the text destined for stdout and stderr.
pub struct Invocation {
    pub code: u8,
    pub stdout: String,
    pub stderr: String,
}

/// Runs one command line (`argv[0]` is the program name).
pub fn run_cli<I, T>(argv: I) -> Invocation
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Invocation {
                    code: EXIT_CONFIG,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Invocation {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    let outcome = match cli.threads {
        Some(0) => Err(config_error("--threads must be positive".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| config_error(e.to_string()))
            .and_then(|pool| pool.install(|| run(&cli))),
        None => run(&cli),
    };
    match outcome {
        Ok(summary) => Invocation {
            code: 0,
            stdout: summary,
            stderr: String::new(),
        },
        Err(f) => {
            let body = json!({ "error": f.kind, "message": f.message, "exit_code": f.code });
            Invocation {
                code: f.code,
                stdout: String::new(),
                stderr: format!("{}\n", pretty(&body)),
            }
        }
    }
}

fn pretty(value: &serde_json::Value) -> String {
    serde_json::to_string_pretty(value).unwrap_or_default()
}

fn run(cli: &Cli) -> Result<String, Failure> {
    if let Command::Replay(a) = &cli.command {
        return replay(cli, &a.manifest);
    }
    let source = cli.command.source().cloned().unwrap_or_default();
    let mut config = load_sources(&source)?;
    let mut inputs = BTreeMap::new();
    if let Command::Card(a) = &cli.command {
        if let Some(path) = &a.input {
            set_card_input(&mut config, path)?;
        }
        if let Some(input) = config.card.as_ref().and_then(|c| c.input.clone()) {
            let path = canonical(Path::new(&input))?;
            let bytes =
                std::fs::read(&path).map_err(|e| config_error(format!("cannot read {}: {e}", path.display())))?;
            let shown = path.to_string_lossy().into_owned();
            inputs.insert(shown.clone(), sha256_hex(&bytes));
            set_card_input(&mut config, Path::new(&shown))?;
        }
    }
    if let Some(path) = &source.config {
        let bytes = std::fs::read(path).map_err(|e| config_error(format!("cannot read {}: {e}", path.display())))?;
        inputs.insert(canonical(path)?.to_string_lossy().into_owned(), sha256_hex(&bytes));
    }
    config.validate()?;
    let config = config.resolved()?;
    let result = commands::execute(&cli.command, &config)?;
    let manifest = Manifest::new(&cli.command, &config, inputs, &result);
    finish(cli, &manifest, &result)
}

fn finish(cli: &Cli, manifest: &Manifest, result: &output::JobResult) -> Result<String, Failure> {
    let root = output::output_root(cli.out_root.as_deref());
    let dir = write_run(&root, cli.run_dir.as_deref(), manifest.job.name(), manifest, result)?;
    let summary = json!({
        "subcommand": manifest.job.name(),
        "run_dir": dir,
        "outputs": manifest.outputs.keys().collect::<Vec<_>>(),
        "summary": result.summary,
    });
    Ok(format!("{}\n", pretty(&summary)))
}

fn canonical(path: &Path) -> Result<PathBuf, Failure> {
    path.canonicalize()
        .map_err(|e| config_error(format!("cannot resolve {}: {e}", path.display())))
}

fn set_card_input(config: &mut RunConfig, path: &Path) -> Result<(), Failure> {
    let card = config
        .card
        .as_mut()
        .ok_or_else(|| config_error("a [card] section is required".into()))?;
    card.input = Some(path.to_string_lossy().into_owned());
    Ok(())
}

fn load_sources(source: &Source) -> Result<RunConfig, Failure> {
    let mut config = RunConfig::default();
    for name in &source.profiles {
        config = config.overlay(RunConfig::profile(name)?);
    }
    if let Some(path) = &source.config {
        config = config.overlay(RunConfig::load(path)?);
    }
    Ok(config)
}

fn replay(cli: &Cli, path: &Path) -> Result<String, Failure> {
    let text =
        std::fs::read_to_string(path).map_err(|e| config_error(format!("cannot read {}: {e}", path.display())))?;
    let recorded: Manifest =
        serde_json::from_str(&text).map_err(|e| config_error(format!("{}: invalid manifest: {e}", path.display())))?;
    for (input, hash) in &recorded.inputs {
        let bytes = std::fs::read(input).map_err(|e| config_error(format!("cannot read input {input}: {e}")))?;
        if &sha256_hex(&bytes) != hash {
            return Err(config_error(format!("input {input} changed since the recorded run")));
        }
    }
    recorded.config.validate()?;
    let result = commands::execute(&recorded.job, &recorded.config)?;
    let manifest = Manifest::new(&recorded.job, &recorded.config, recorded.inputs.clone(), &result);
    let differing: Vec<&String> = recorded
        .outputs
        .iter()
        .filter(|(name, hash)| manifest.outputs.get(*name) != Some(*hash))
        .map(|(name, _)| name)
        .chain(manifest.outputs.keys().filter(|n| !recorded.outputs.contains_key(*n)))
        .collect();
    if !differing.is_empty() {
        return Err(Failure {
            kind: "replay_mismatch".into(),
            message: format!("outputs differ from the recorded run: {differing:?}"),
            code: EXIT_NUMERICAL,
        });
    }
    finish(cli, &manifest, &result)
}
