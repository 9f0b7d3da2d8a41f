// SPDX-License-Identifier: Apache-2.0

//! Single-file `.thresh.json` packages of template, data and (optionally)
//! annotations, with SHA-256 content hashes.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::canonical::{sha256_hex, to_canonical_string};
use crate::data::{parse_annotations, parse_instances, DataError};
use crate::diagnostic::{codes, Diagnostic};
use crate::typology::{parse_template, TemplateError};

pub const BUNDLE_VERSION: &str = "1.0";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bundle {
    pub template: String,
    pub instances: String,
    pub annotations: Option<String>,
}

#[derive(Debug, Clone, Error)]
pub enum BundleError {
    #[error("manifest hash mismatch for `{0}`")]
    ManifestMismatch(String),
    #[error("malformed bundle: {0}")]
    Format(String),
    #[error("bundled template is invalid: {0}")]
    Template(#[from] TemplateError),
    #[error("bundled data is invalid: {0}")]
    Data(#[from] DataError),
}

impl BundleError {
    pub fn diagnostics(&self) -> Vec<Diagnostic> {
        match self {
            BundleError::ManifestMismatch(part) => {
                vec![Diagnostic::error(
                    codes::MANIFEST_MISMATCH,
                    format!("manifest.{part}"),
                    self.to_string(),
                )]
            }
            BundleError::Format(m) => vec![Diagnostic::error(codes::BUNDLE_FORMAT, "", m.clone())],
            BundleError::Template(e) => e.diagnostics(),
            BundleError::Data(e) => e.diagnostics(),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Manifest {
    version: String,
    template: String,
    instances: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    annotations: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BundleFile {
    manifest: Manifest,
    template: String,
    instances: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    annotations: Option<String>,
}

/// Validate the three parts with their own parsers and package them.
pub fn bundle(
    template: &str,
    instances: &str,
    annotations: Option<&str>,
) -> Result<Vec<u8>, BundleError> {
    let parsed = parse_template(template)?;
    let insts = parse_instances(instances, &parsed.typology.config)?;
    if let Some(a) = annotations {
        parse_annotations(a, &parsed.typology, &insts)?;
    }
    let file = BundleFile {
        manifest: Manifest {
            version: BUNDLE_VERSION.to_string(),
            template: sha256_hex(template.as_bytes()),
            instances: sha256_hex(instances.as_bytes()),
            annotations: annotations.map(|a| sha256_hex(a.as_bytes())),
        },
        template: template.to_string(),
        instances: instances.to_string(),
        annotations: annotations.map(str::to_string),
    };
    let mut out = to_canonical_string(&file).into_bytes();
    out.push(b'\n');
    Ok(out)
}

/// Unpack a bundle, verifying every manifest hash.
pub fn unbundle(bytes: &[u8]) -> Result<Bundle, BundleError> {
    let text =
        std::str::from_utf8(bytes).map_err(|e| BundleError::Format(format!("not UTF-8: {e}")))?;
    let file: BundleFile =
        serde_json::from_str(text).map_err(|e| BundleError::Format(e.to_string()))?;
    if file.manifest.version != BUNDLE_VERSION {
        return Err(BundleError::Format(format!(
            "unsupported bundle version `{}`",
            file.manifest.version
        )));
    }
    let check = |part: &str, content: &str, want: &str| {
        if sha256_hex(content.as_bytes()) == want {
            Ok(())
        } else {
            Err(BundleError::ManifestMismatch(part.to_string()))
        }
    };
    check("template", &file.template, &file.manifest.template)?;
    check("instances", &file.instances, &file.manifest.instances)?;
    match (&file.annotations, &file.manifest.annotations) {
        (Some(a), Some(h)) => check("annotations", a, h)?,
        (None, None) => {}
        _ => return Err(BundleError::ManifestMismatch("annotations".into())),
    }
    Ok(Bundle {
        template: file.template,
        instances: file.instances,
        annotations: file.annotations,
    })
}
