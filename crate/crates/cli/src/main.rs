// SPDX-License-Identifier: Apache-2.0

//! `thresh`: validate, compile, bundle, convert, merge and serve annotation
//! typologies.
//!
//! Exit codes: 0 on success, 1 when inputs fail validation, 2 on usage
//! errors such as a missing file.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "thresh", version, about = "Annotation typology toolkit")]
struct Cli {
    /// Print diagnostics to stdout as a JSON array instead of text on stderr.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a template and, optionally, instance and annotation files.
    Validate {
        #[arg(short, long)]
        template: PathBuf,
        #[arg(short, long)]
        data: Option<PathBuf>,
        #[arg(short, long = "annotations")]
        annotations: Vec<PathBuf>,
    },
    /// Compile a template and instances into the interface description.
    Compile {
        #[command(flatten)]
        inputs: Inputs,
        /// One file per pane; merged collections contribute every annotator.
        #[arg(short, long = "annotations")]
        annotations: Vec<PathBuf>,
        /// UI language; defaults to the template's `config.language`.
        #[arg(long)]
        locale: Option<String>,
        /// Pane count, overriding `config.adjudication`.
        #[arg(long)]
        panes: Option<usize>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Pack template, instances and annotations into one hashed file.
    Bundle {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(short, long)]
        annotations: Option<PathBuf>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Verify a bundle and write its parts into a directory.
    Unbundle {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Convert annotations between registered formats.
    Convert {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(short, long)]
        template: PathBuf,
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// List registered annotation formats and what they can carry.
    Formats,
    /// Merge annotation files into one collection keyed by annotator.
    Merge {
        #[arg(short, long)]
        template: PathBuf,
        /// Instance file; sets entry order and checks instance ids.
        #[arg(short, long)]
        data: Option<PathBuf>,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Run the HTTP server.
    Serve {
        /// YAML configuration; falls back to $THRESH_CONFIG, then defaults.
        #[arg(short, long)]
        config: Option<PathBuf>,
        #[arg(long)]
        port: Option<u16>,
    },
}

#[derive(Debug, Args)]
struct Inputs {
    #[arg(short, long)]
    template: PathBuf,
    #[arg(short, long)]
    data: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env()
                .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new("warn")),
        )
        .with_writer(std::io::stderr)
        .init();

    let mut out = commands::Report::new(cli.json);
    let result = match cli.command {
        Command::Validate {
            template,
            data,
            annotations,
        } => commands::validate(&mut out, &template, data.as_deref(), &annotations),
        Command::Compile {
            inputs,
            annotations,
            locale,
            panes,
            output,
        } => commands::compile(
            &mut out,
            &inputs.template,
            &inputs.data,
            &annotations,
            locale,
            panes,
            &output,
        ),
        Command::Bundle {
            inputs,
            annotations,
            output,
        } => commands::bundle(
            &mut out,
            &inputs.template,
            &inputs.data,
            annotations.as_deref(),
            &output,
        ),
        Command::Unbundle { input, output } => commands::unbundle(&mut out, &input, &output),
        Command::Convert {
            from,
            to,
            template,
            input,
            output,
        } => commands::convert(&mut out, &from, &to, &template, &input, &output),
        Command::Formats => commands::formats(&mut out),
        Command::Merge {
            template,
            data,
            output,
            files,
        } => commands::merge(&mut out, &template, data.as_deref(), &files, &output),
        Command::Serve { config, port } => commands::serve(&mut out, config.as_deref(), port),
    };
    out.finish(result)
}
