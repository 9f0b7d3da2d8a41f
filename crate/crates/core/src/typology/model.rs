// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Span boundary granularity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    Char,
    #[default]
    Whitespace,
    Subword,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Full,
    SelectionOnly,
    AnnotationOnly,
}

impl Mode {
    pub fn has_questions(self) -> bool {
        self != Mode::SelectionOnly
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstructionsDisplay {
    #[default]
    Modal,
    Prepend,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Display {
    #[default]
    Inline,
    SideBySide,
}

/// Which text a category's spans live on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SideRule {
    Source,
    #[default]
    Target,
    Both,
}

impl SideRule {
    pub fn allows_source(self) -> bool {
        matches!(self, SideRule::Source | SideRule::Both)
    }

    pub fn allows_target(self) -> bool {
        matches!(self, SideRule::Target | SideRule::Both)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Selection {
    #[default]
    SingleSpan,
    MultiSpan,
    Composite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuestionKind {
    Binary,
    Scale3,
    Scale5,
    Textbox,
}

impl QuestionKind {
    /// Number of options; zero for free text.
    pub fn arity(self) -> usize {
        match self {
            QuestionKind::Binary => 2,
            QuestionKind::Scale3 => 3,
            QuestionKind::Scale5 => 5,
            QuestionKind::Textbox => 0,
        }
    }
}

macro_rules! keyword_enum {
    ($ty:ty { $($variant:ident => $kw:literal),+ $(,)? }) => {
        impl $ty {
            pub const KEYWORDS: &'static [&'static str] = &[$($kw),+];

            pub fn as_str(self) -> &'static str {
                match self { $(Self::$variant => $kw),+ }
            }
        }

        impl FromStr for $ty {
            type Err = ();

            fn from_str(s: &str) -> Result<Self, ()> {
                match s { $($kw => Ok(Self::$variant),)+ _ => Err(()) }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }
    };
}

keyword_enum!(Boundary { Char => "char", Whitespace => "whitespace", Subword => "subword" });
keyword_enum!(Mode { Full => "full", SelectionOnly => "selection_only", AnnotationOnly => "annotation_only" });
keyword_enum!(InstructionsDisplay { Modal => "modal", Prepend => "prepend" });
keyword_enum!(Display { Inline => "inline", SideBySide => "side_by_side" });
keyword_enum!(SideRule { Source => "source", Target => "target", Both => "both" });
keyword_enum!(Selection { SingleSpan => "single_span", MultiSpan => "multi_span", Composite => "composite" });
keyword_enum!(QuestionKind { Binary => "binary", Scale3 => "scale3", Scale5 => "scale5", Textbox => "textbox" });

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TemplateConfig {
    pub boundary: Boundary,
    pub mode: Mode,
    pub adjudication: u8,
    pub language: String,
    pub instructions: Option<String>,
    pub instructions_display: InstructionsDisplay,
    pub display: Display,
    pub citation: Option<String>,
    pub paper_link: Option<String>,
    pub demo_data_link: Option<String>,
}

impl Default for TemplateConfig {
    fn default() -> Self {
        Self {
            boundary: Boundary::default(),
            mode: Mode::default(),
            adjudication: 1,
            language: "en".to_string(),
            instructions: None,
            instructions_display: InstructionsDisplay::default(),
            display: Display::default(),
            citation: None,
            paper_link: None,
            demo_data_link: None,
        }
    }
}

/// Followup edges out of a question.
///
/// Choice questions branch on the selected option index; a textbox may
/// carry one unconditional list, written under the `any` key.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Followups {
    pub by_option: BTreeMap<usize, Vec<QuestionNode>>,
    pub any: Vec<QuestionNode>,
}

impl Followups {
    pub fn is_empty(&self) -> bool {
        self.any.is_empty() && self.by_option.values().all(Vec::is_empty)
    }

    /// All child nodes in a stable order (option-keyed lists ascending, then `any`).
    pub fn iter(&self) -> impl Iterator<Item = &QuestionNode> {
        self.by_option.values().flatten().chain(self.any.iter())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuestionNode {
    pub id: String,
    pub kind: QuestionKind,
    pub prompt: String,
    pub options: Vec<String>,
    /// Only meaningful for textboxes: an empty answer is accepted.
    pub optional: bool,
    pub followups: Followups,
}

impl QuestionNode {
    pub fn new(id: &str, kind: QuestionKind, prompt: &str, options: &[&str]) -> Self {
        Self {
            id: id.to_string(),
            kind,
            prompt: prompt.to_string(),
            options: options.iter().map(|s| s.to_string()).collect(),
            optional: false,
            followups: Followups::default(),
        }
    }

    pub fn with_followup(mut self, option: usize, node: QuestionNode) -> Self {
        self.followups
            .by_option
            .entry(option)
            .or_default()
            .push(node);
        self
    }

    /// Nodes triggered by answering this question with `option`
    /// (`None` for a textbox answer).
    pub fn triggered(&self, option: Option<usize>) -> &[QuestionNode] {
        match option {
            Some(i) => self.followups.by_option.get(&i).map_or(&[], Vec::as_slice),
            None => &self.followups.any,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditCategory {
    pub name: String,
    pub label: String,
    pub color: String,
    pub side: SideRule,
    pub selection: Selection,
    pub children: Vec<EditCategory>,
    pub questions: Vec<QuestionNode>,
}

impl EditCategory {
    pub fn new(name: &str, label: &str, color: &str, side: SideRule, selection: Selection) -> Self {
        Self {
            name: name.to_string(),
            label: label.to_string(),
            color: color.to_string(),
            side,
            selection,
            children: Vec::new(),
            questions: Vec::new(),
        }
    }

    pub fn with_question(mut self, q: QuestionNode) -> Self {
        self.questions.push(q);
        self
    }

    pub fn with_child(mut self, c: EditCategory) -> Self {
        self.children.push(c);
        self
    }

    /// Pre-order walk over every question node of this category.
    pub fn walk_questions(&self) -> Vec<(&QuestionNode, Option<&QuestionNode>)> {
        fn go<'a>(
            node: &'a QuestionNode,
            parent: Option<&'a QuestionNode>,
            out: &mut Vec<(&'a QuestionNode, Option<&'a QuestionNode>)>,
        ) {
            out.push((node, parent));
            for child in node.followups.iter() {
                go(child, Some(node), out);
            }
        }
        let mut out = Vec::new();
        for q in &self.questions {
            go(q, None, &mut out);
        }
        out
    }

    pub fn find_question(&self, id: &str) -> Option<&QuestionNode> {
        self.walk_questions()
            .into_iter()
            .map(|(q, _)| q)
            .find(|q| q.id == id)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LocalePack {
    pub locale: String,
    pub strings: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Typology {
    pub name: String,
    pub config: TemplateConfig,
    pub categories: Vec<EditCategory>,
    /// Template-level string overrides keyed by locale code.
    pub localization: BTreeMap<String, LocalePack>,
}

impl Typology {
    pub fn new(name: &str, categories: Vec<EditCategory>) -> Self {
        Self {
            name: name.to_string(),
            config: TemplateConfig::default(),
            categories,
            localization: BTreeMap::new(),
        }
    }

    /// Every category in pre-order, composites before their children.
    pub fn flatten(&self) -> Vec<&EditCategory> {
        fn go<'a>(cats: &'a [EditCategory], out: &mut Vec<&'a EditCategory>) {
            for c in cats {
                out.push(c);
                go(&c.children, out);
            }
        }
        let mut out = Vec::new();
        go(&self.categories, &mut out);
        out
    }

    pub fn category(&self, name: &str) -> Option<&EditCategory> {
        self.flatten().into_iter().find(|c| c.name == name)
    }

    /// Leaf categories (those without children).
    pub fn leaf_count(&self) -> usize {
        self.flatten()
            .iter()
            .filter(|c| c.children.is_empty())
            .count()
    }

    /// Length of the longest category chain (a flat list has depth 1).
    pub fn category_depth(&self) -> usize {
        fn go(cats: &[EditCategory]) -> usize {
            cats.iter().map(|c| 1 + go(&c.children)).max().unwrap_or(0)
        }
        go(&self.categories)
    }

    /// Whether any category can select source spans.
    pub fn source_selectable(&self) -> bool {
        self.flatten().iter().any(|c| c.side.allows_source())
    }

    pub fn target_selectable(&self) -> bool {
        self.flatten().iter().any(|c| c.side.allows_target())
    }

    /// Keys a template's localization packs may override besides the
    /// built-in UI strings: labels, prompts and option labels.
    pub fn label_keys(&self) -> BTreeMap<String, String> {
        let mut keys = BTreeMap::new();
        for cat in self.flatten() {
            keys.insert(format!("edit.{}.label", cat.name), cat.label.clone());
            for (q, _) in cat.walk_questions() {
                keys.insert(
                    format!("question.{}.{}.prompt", cat.name, q.id),
                    q.prompt.clone(),
                );
                for (i, opt) in q.options.iter().enumerate() {
                    keys.insert(
                        format!("question.{}.{}.option.{}", cat.name, q.id, i),
                        opt.clone(),
                    );
                }
            }
        }
        keys
    }
}
