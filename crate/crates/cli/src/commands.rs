// SPDX-License-Identifier: Apache-2.0

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context as _;
use serde::Serialize;
use thresh_core::compile::{self, CompileOptions};
use thresh_core::convert::{ConvertFailure, ConverterRegistry};
use thresh_core::data::{
    check_annotation_set, check_instance_bounds, merge_annotations, parse_annotation_sets,
    parse_instances, serialize_collection, DataError, Instance,
};
use thresh_core::diagnostic::codes;
use thresh_core::typology::{parse_template, Typology};
use thresh_core::Diagnostic;
use thresh_server::ServerConfig;

pub enum Failure {
    /// Bad invocation or unreadable input. Exit 2.
    Usage(String),
    /// Inputs were read but did not validate; diagnostics were recorded. Exit 1.
    Invalid,
    /// Anything else, such as a failed write. Exit 1.
    Error(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Error(e)
    }
}

type Outcome = Result<(), Failure>;

#[derive(Serialize)]
struct Located {
    file: String,
    #[serde(flatten)]
    diag: Diagnostic,
}

/// Collects diagnostics from every input and prints them once at the end.
pub struct Report {
    json: bool,
    /// Set by commands that write their own JSON to stdout.
    owns_stdout: bool,
    items: Vec<Located>,
}

impl Report {
    pub fn new(json: bool) -> Self {
        Self {
            json,
            owns_stdout: false,
            items: Vec::new(),
        }
    }

    fn add(&mut self, file: &Path, diags: impl IntoIterator<Item = Diagnostic>) -> bool {
        let mut failed = false;
        for diag in diags {
            failed |= diag.is_error();
            self.items.push(Located {
                file: file.display().to_string(),
                diag,
            });
        }
        failed
    }

    pub fn finish(self, result: Outcome) -> ExitCode {
        if self.json && !self.owns_stdout {
            let text = serde_json::to_string_pretty(&self.items).expect("diagnostics serialize");
            println!("{text}");
        } else {
            for item in &self.items {
                eprintln!("{}: {}", item.file, item.diag);
            }
        }
        match result {
            Ok(()) => ExitCode::SUCCESS,
            Err(Failure::Invalid) => ExitCode::from(1),
            Err(Failure::Error(e)) => {
                eprintln!("error: {e:#}");
                ExitCode::from(1)
            }
            Err(Failure::Usage(msg)) => {
                eprintln!("error: {msg}");
                ExitCode::from(2)
            }
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Outcome {
    std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn load_template(out: &mut Report, path: &Path) -> Result<Typology, Failure> {
    match parse_template(&read(path)?) {
        Ok(parsed) => {
            out.add(path, parsed.warnings);
            Ok(parsed.typology)
        }
        Err(e) => {
            out.add(path, e.diagnostics());
            Err(Failure::Invalid)
        }
    }
}

fn load_instances(out: &mut Report, path: &Path, t: &Typology) -> Result<Vec<Instance>, Failure> {
    parse_instances(&read(path)?, &t.config).map_err(|e| {
        out.add(path, e.diagnostics());
        Failure::Invalid
    })
}

pub fn validate(
    out: &mut Report,
    template: &Path,
    data: Option<&Path>,
    annotations: &[PathBuf],
) -> Outcome {
    let t = load_template(out, template)?;
    let mut failed = false;
    let instances = match data {
        Some(path) => match parse_instances(&read(path)?, &t.config) {
            Ok(insts) => {
                failed |= out.add(path, check_instance_bounds(&t, &insts));
                Some(insts)
            }
            Err(e) => {
                out.add(path, e.diagnostics());
                return Err(Failure::Invalid);
            }
        },
        None => None,
    };
    for path in annotations {
        match parse_annotation_sets(&read(path)?) {
            Ok(sets) => {
                for set in &sets {
                    failed |= out.add(path, check_annotation_set(set, &t, instances.as_deref()));
                }
            }
            Err(e) => failed |= out.add(path, e.diagnostics()),
        }
    }
    if failed {
        return Err(Failure::Invalid);
    }
    Ok(())
}

pub fn compile(
    out: &mut Report,
    template: &Path,
    data: &Path,
    annotations: &[PathBuf],
    locale: Option<String>,
    panes: Option<usize>,
    output: &Path,
) -> Outcome {
    let t = load_template(out, template)?;
    let instances = load_instances(out, data, &t)?;
    let mut sets = Vec::new();
    let mut failed = false;
    for path in annotations {
        match parse_annotation_sets(&read(path)?) {
            Ok(parsed) => {
                for set in parsed {
                    failed |= out.add(path, check_annotation_set(&set, &t, Some(&instances)));
                    sets.push(set);
                }
            }
            Err(e) => failed |= out.add(path, e.diagnostics()),
        }
    }
    if failed {
        return Err(Failure::Invalid);
    }
    let opts = CompileOptions {
        locale,
        annotations: sets,
        panes,
    };
    let ir = compile::compile(&t, &instances, &opts).map_err(|e| {
        out.add(template, e.diagnostics());
        Failure::Invalid
    })?;
    write(output, ir.to_json())
}

pub fn bundle(
    out: &mut Report,
    template: &Path,
    data: &Path,
    annotations: Option<&Path>,
    output: &Path,
) -> Outcome {
    let t = read(template)?;
    let d = read(data)?;
    let a = annotations.map(read).transpose()?;
    let bytes = compile::bundle(&t, &d, a.as_deref()).map_err(|e| {
        // Attribute the diagnostics to the part that produced them.
        let file = match &e {
            compile::BundleError::Template(_) => template,
            compile::BundleError::Data(_)
                if a.is_some()
                    && parse_template(&t)
                        .is_ok_and(|p| parse_instances(&d, &p.typology.config).is_ok()) =>
            {
                annotations.unwrap_or(data)
            }
            _ => data,
        };
        out.add(file, e.diagnostics());
        Failure::Invalid
    })?;
    write(output, bytes)
}

pub fn unbundle(out: &mut Report, input: &Path, output: &Path) -> Outcome {
    let bytes = std::fs::read(input)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", input.display())))?;
    let b = compile::unbundle(&bytes).map_err(|e| {
        out.add(input, e.diagnostics());
        Failure::Invalid
    })?;
    std::fs::create_dir_all(output).with_context(|| format!("creating {}", output.display()))?;
    write(&output.join("template.yml"), &b.template)?;
    write(&output.join("instances.json"), &b.instances)?;
    if let Some(a) = &b.annotations {
        write(&output.join("annotations.json"), a)?;
    }
    Ok(())
}

pub fn convert(
    out: &mut Report,
    from: &str,
    to: &str,
    template: &Path,
    input: &Path,
    output: &Path,
) -> Outcome {
    let t = load_template(out, template)?;
    let text = read(input)?;
    match ConverterRegistry::with_builtins().convert(from, to, &text, &t) {
        Ok(converted) => write(output, converted),
        Err(ConvertFailure::Registry(e)) => Err(Failure::Usage(e.to_string())),
        Err(ConvertFailure::Convert(e)) => {
            out.add(input, e.diagnostics());
            Err(Failure::Invalid)
        }
    }
}

pub fn formats(out: &mut Report) -> Outcome {
    let list = ConverterRegistry::with_builtins().list();
    if out.json {
        out.owns_stdout = true;
        println!(
            "{}",
            serde_json::to_string_pretty(&list).expect("descriptors serialize")
        );
        return Ok(());
    }
    for d in list {
        let caps: Vec<String> = d.capabilities.iter().map(ToString::to_string).collect();
        let lossless = if d.lossless { "lossless" } else { "lossy" };
        println!("{:<14} {:<8} {}", d.format_name, lossless, caps.join(", "));
    }
    Ok(())
}

pub fn merge(
    out: &mut Report,
    template: &Path,
    data: Option<&Path>,
    files: &[PathBuf],
    output: &Path,
) -> Outcome {
    let t = load_template(out, template)?;
    let instances = data.map(|d| load_instances(out, d, &t)).transpose()?;
    let texts = files
        .iter()
        .map(|f| read(f))
        .collect::<Result<Vec<_>, _>>()?;
    let refs: Vec<&str> = texts.iter().map(String::as_str).collect();
    match merge_annotations(&refs, &t, instances.as_deref()) {
        Ok((collection, diags)) => {
            // Conflicting entries are left out of the output, which is still
            // written so the rest of the merge is usable.
            let count = |code: &str| diags.iter().filter(|d| d.code == code).count();
            let summary = format!(
                "merged {} annotator(s) from {} file(s): {} duplicate(s) collapsed, {} conflict(s) dropped",
                collection.sets.len(),
                files.len(),
                count(codes::DUP_ENTRY),
                count(codes::CONFLICT),
            );
            let failed = out.add(output, diags);
            write(output, serialize_collection(&collection))?;
            eprintln!("{summary}");
            if failed {
                Err(Failure::Invalid)
            } else {
                Ok(())
            }
        }
        Err(DataError::InFile { index, source }) => {
            out.add(&files[index], source.diagnostics());
            Err(Failure::Invalid)
        }
        Err(e) => {
            out.add(output, e.diagnostics());
            Err(Failure::Invalid)
        }
    }
}

pub fn serve(out: &mut Report, config: Option<&Path>, port: Option<u16>) -> Outcome {
    out.owns_stdout = true;
    let mut cfg = ServerConfig::resolve(config).map_err(|e| Failure::Usage(e.to_string()))?;
    if let Some(p) = port {
        cfg.bind.set_port(p);
    }
    let rt = tokio::runtime::Runtime::new().context("starting async runtime")?;
    rt.block_on(thresh_server::serve(
        cfg,
        |addr| {
            println!("listening on http://{addr}");
            let _ = std::io::stdout().flush();
        },
        shutdown_signal(),
    ))
    .context("server failed")?;
    Ok(())
}

async fn shutdown_signal() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let term = async {
        match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            Ok(mut s) => {
                s.recv().await;
            }
            Err(_) => std::future::pending::<()>().await,
        }
    };
    #[cfg(not(unix))]
    let term = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {}
        _ = term => {}
    }
}
