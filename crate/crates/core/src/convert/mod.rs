// SPDX-License-Identifier: Apache-2.0

//! Adapters between external annotation formats and the unified format.
//!
//! Each converter declares which features it can carry. Input or output
//! that needs a feature outside that set fails with
//! [`ConvertError::Capability`] instead of silently dropping data.

mod offset_label;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{
    check_annotation_set, parse_annotation_document, serialize_annotations, AnnotationSet, Edit,
};
use crate::diagnostic::{codes, has_errors, Diagnostic};
use crate::typology::Typology;

pub use offset_label::OffsetLabel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Capability {
    MultiSpan,
    Composite,
    SourceSide,
    Questions,
    Textbox,
}

impl fmt::Display for Capability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Capability::MultiSpan => "multi_span",
            Capability::Composite => "composite",
            Capability::SourceSide => "source_side",
            Capability::Questions => "questions",
            Capability::Textbox => "textbox",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConverterDescriptor {
    pub format_name: String,
    pub capabilities: BTreeSet<Capability>,
    pub lossless: bool,
}

/// One unsupported feature found in one instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CapabilityViolation {
    pub feature: Capability,
    pub instance_id: String,
}

#[derive(Debug, Clone, Error)]
pub enum ConvertError {
    #[error("malformed external document: {0}")]
    ExternalFormat(String),
    #[error("unsupported features: {}", list_violations(.0))]
    Capability(Vec<CapabilityViolation>),
    #[error("converted annotations do not validate: {}", crate::typology::summarize_diagnostics(.0))]
    Invalid(Vec<Diagnostic>),
}

impl ConvertError {
    pub fn features(&self) -> BTreeSet<Capability> {
        match self {
            ConvertError::Capability(v) => v.iter().map(|x| x.feature).collect(),
            _ => BTreeSet::new(),
        }
    }

    pub fn diagnostics(&self) -> Vec<Diagnostic> {
        match self {
            ConvertError::ExternalFormat(m) => {
                vec![Diagnostic::error(codes::EXTERNAL_FORMAT, "", m.clone())]
            }
            ConvertError::Capability(v) => v
                .iter()
                .map(|x| {
                    Diagnostic::error(
                        codes::CAPABILITY,
                        format!("instances[{}]", x.instance_id),
                        format!("the target format cannot represent {}", x.feature),
                    )
                })
                .collect(),
            ConvertError::Invalid(d) => d.clone(),
        }
    }
}

fn list_violations(v: &[CapabilityViolation]) -> String {
    v.iter()
        .map(|x| format!("{} (instance {})", x.feature, x.instance_id))
        .collect::<Vec<_>>()
        .join(", ")
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegistryError {
    #[error("a converter named `{0}` is already registered")]
    Duplicate(String),
    #[error("no converter named `{0}`")]
    Unknown(String),
}

pub trait Converter: Send + Sync {
    fn descriptor(&self) -> ConverterDescriptor;

    fn to_unified(&self, external: &str, t: &Typology) -> Result<AnnotationSet, ConvertError>;

    /// Serializes `a` into this format. Fails with `Capability` when `a`
    /// uses a feature the format cannot carry.
    #[allow(clippy::wrong_self_convention)]
    fn from_unified(&self, a: &AnnotationSet) -> Result<String, ConvertError>;
}

/// Features an annotation set uses, each with the first instance using it.
pub fn features_used(a: &AnnotationSet) -> Vec<CapabilityViolation> {
    fn visit(e: &Edit, out: &mut BTreeSet<Capability>) {
        if !e.children.is_empty() {
            out.insert(Capability::Composite);
        }
        if e.source.len() + e.target.len() > 1 {
            out.insert(Capability::MultiSpan);
        }
        if !e.source.is_empty() {
            out.insert(Capability::SourceSide);
        }
        if !e.answers.is_empty() {
            out.insert(Capability::Questions);
        }
        if e.answers
            .iter()
            .any(|a| matches!(a.value, crate::data::AnswerValue::Text(_)))
        {
            out.insert(Capability::Textbox);
        }
        for c in &e.children {
            visit(c, out);
        }
    }
    let mut found = Vec::new();
    let mut reported = BTreeSet::new();
    for entry in &a.instances {
        let mut here = BTreeSet::new();
        for e in &entry.edits {
            visit(e, &mut here);
        }
        for f in here {
            if reported.insert(f) {
                found.push(CapabilityViolation {
                    feature: f,
                    instance_id: entry.id.clone(),
                });
            }
        }
    }
    found
}

/// Reject `a` if it uses features the descriptor does not declare.
pub fn check_capabilities(d: &ConverterDescriptor, a: &AnnotationSet) -> Result<(), ConvertError> {
    let bad: Vec<CapabilityViolation> = features_used(a)
        .into_iter()
        .filter(|v| !d.capabilities.contains(&v.feature))
        .collect();
    if bad.is_empty() {
        Ok(())
    } else {
        Err(ConvertError::Capability(bad))
    }
}

pub(crate) fn validate_converted(
    set: AnnotationSet,
    t: &Typology,
) -> Result<AnnotationSet, ConvertError> {
    let diags = check_annotation_set(&set, t, None);
    if has_errors(&diags) {
        return Err(ConvertError::Invalid(
            diags.into_iter().filter(Diagnostic::is_error).collect(),
        ));
    }
    Ok(set)
}

/// The unified format itself, registered so every conversion can go
/// through the same registry.
#[derive(Debug, Default)]
pub struct Unified;

impl Converter for Unified {
    fn descriptor(&self) -> ConverterDescriptor {
        ConverterDescriptor {
            format_name: "unified".into(),
            capabilities: [
                Capability::MultiSpan,
                Capability::Composite,
                Capability::SourceSide,
                Capability::Questions,
                Capability::Textbox,
            ]
            .into_iter()
            .collect(),
            lossless: true,
        }
    }

    fn to_unified(&self, external: &str, t: &Typology) -> Result<AnnotationSet, ConvertError> {
        let set = parse_annotation_document(external)
            .map_err(|e| ConvertError::ExternalFormat(e.to_string()))?;
        validate_converted(set, t)
    }

    fn from_unified(&self, a: &AnnotationSet) -> Result<String, ConvertError> {
        Ok(serialize_annotations(a))
    }
}

pub struct ConverterRegistry {
    converters: Vec<Box<dyn Converter>>,
}

impl fmt::Debug for ConverterRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries(self.converters.iter().map(|c| c.descriptor().format_name))
            .finish()
    }
}

impl Default for ConverterRegistry {
    fn default() -> Self {
        Self::with_builtins()
    }
}

impl ConverterRegistry {
    pub fn empty() -> Self {
        Self {
            converters: Vec::new(),
        }
    }

    /// Registry holding `unified` and `offset-label`, in that order.
    pub fn with_builtins() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(Unified))
            .expect("builtin names are distinct");
        r.register(Box::new(OffsetLabel))
            .expect("builtin names are distinct");
        r
    }

    pub fn register(&mut self, converter: Box<dyn Converter>) -> Result<(), RegistryError> {
        let name = converter.descriptor().format_name;
        if self.get(&name).is_ok() {
            return Err(RegistryError::Duplicate(name));
        }
        self.converters.push(converter);
        Ok(())
    }

    pub fn get(&self, format_name: &str) -> Result<&dyn Converter, RegistryError> {
        self.converters
            .iter()
            .find(|c| c.descriptor().format_name == format_name)
            .map(|c| c.as_ref())
            .ok_or_else(|| RegistryError::Unknown(format_name.to_string()))
    }

    /// Descriptors in registration order.
    pub fn list(&self) -> Vec<ConverterDescriptor> {
        self.converters.iter().map(|c| c.descriptor()).collect()
    }

    /// Convert between any two registered formats through the unified model.
    pub fn convert(
        &self,
        from: &str,
        to: &str,
        input: &str,
        t: &Typology,
    ) -> Result<String, ConvertFailure> {
        let src = self.get(from).map_err(ConvertFailure::Registry)?;
        let dst = self.get(to).map_err(ConvertFailure::Registry)?;
        let set = src.to_unified(input, t).map_err(ConvertFailure::Convert)?;
        dst.from_unified(&set).map_err(ConvertFailure::Convert)
    }
}

#[derive(Debug, Clone, Error)]
pub enum ConvertFailure {
    #[error(transparent)]
    Registry(RegistryError),
    #[error(transparent)]
    Convert(ConvertError),
}

/// Descriptors of the bundled converters.
pub fn list_converters() -> Vec<ConverterDescriptor> {
    ConverterRegistry::with_builtins().list()
}
