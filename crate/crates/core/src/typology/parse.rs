// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;

use serde_yaml::{Mapping, Value};

use super::model::*;
use super::validate::validate_typology;
use super::TemplateError;
use crate::diagnostic::{codes, has_errors, Diagnostic};

/// A successfully parsed template plus any non-fatal warnings.
#[derive(Debug, Clone)]
pub struct ParsedTemplate {
    pub typology: Typology,
    pub warnings: Vec<Diagnostic>,
}

const TOP_KEYS: &[&str] = &["name", "config", "edits", "localization"];
const CONFIG_KEYS: &[&str] = &[
    "boundary",
    "mode",
    "adjudication",
    "language",
    "instructions",
    "instructions_display",
    "display",
    "citation",
    "paper_link",
    "demo_data_link",
];
const EDIT_KEYS: &[&str] = &[
    "name",
    "label",
    "color",
    "side",
    "selection",
    "children",
    "questions",
];
const QUESTION_KEYS: &[&str] = &["id", "kind", "prompt", "options", "optional", "followups"];

/// Fallback colors for categories that do not set one, by pre-order index.
const PALETTE: &[&str] = &[
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#ff9da7",
    "#9c755f", "#bab0ac",
];

pub fn parse_template(yaml_text: &str) -> Result<ParsedTemplate, TemplateError> {
    let root: Value = serde_yaml::from_str(yaml_text).map_err(|e| {
        let (line, column) = e.location().map_or((0, 0), |l| (l.line(), l.column()));
        TemplateError::YamlSyntax {
            line,
            column,
            message: e.to_string(),
        }
    })?;

    let mut p = Parser {
        diags: Vec::new(),
        colour_index: 0,
    };
    let typology = p.typology(&root);
    let mut diags = p.diags;
    if !has_errors(&diags) {
        diags.extend(validate_typology(&typology));
    }
    if has_errors(&diags) {
        return Err(TemplateError::Schema(
            diags.into_iter().filter(Diagnostic::is_error).collect(),
        ));
    }
    Ok(ParsedTemplate {
        typology,
        warnings: diags,
    })
}

struct Parser {
    diags: Vec<Diagnostic>,
    colour_index: usize,
}

fn kind_name(v: &Value) -> &'static str {
    match v {
        Value::Null => "null",
        Value::Bool(_) => "boolean",
        Value::Number(_) => "number",
        Value::String(_) => "string",
        Value::Sequence(_) => "list",
        Value::Mapping(_) => "mapping",
        Value::Tagged(_) => "tagged value",
    }
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

impl Parser {
    fn err(&mut self, code: &str, path: impl Into<String>, msg: impl Into<String>) {
        self.diags.push(Diagnostic::error(code, path, msg));
    }

    fn mapping<'v>(&mut self, v: &'v Value, path: &str) -> Option<&'v Mapping> {
        match v {
            Value::Mapping(m) => Some(m),
            other => {
                let what = if path.is_empty() { "document" } else { path };
                self.err(
                    codes::WRONG_KIND,
                    path,
                    format!("{what} must be a mapping, found {}", kind_name(other)),
                );
                None
            }
        }
    }

    fn check_keys(&mut self, m: &Mapping, path: &str, allowed: &[&str]) {
        for k in m.keys() {
            match k.as_str() {
                Some(s) if allowed.contains(&s) => {}
                Some(s) => self.diags.push(Diagnostic::warning(
                    codes::UNKNOWN_KEY,
                    join(path, s),
                    format!("unknown key `{s}` ignored"),
                )),
                None => self.err(codes::WRONG_KIND, path, "mapping keys must be strings"),
            }
        }
    }

    fn string(&mut self, m: &Mapping, key: &str, path: &str) -> Option<String> {
        match m.get(key) {
            None | Some(Value::Null) => None,
            Some(Value::String(s)) => Some(s.clone()),
            // Numbers and booleans used as labels are common in hand-written YAML.
            Some(Value::Number(n)) => Some(n.to_string()),
            Some(Value::Bool(b)) => Some(b.to_string()),
            Some(other) => {
                self.err(
                    codes::WRONG_KIND,
                    join(path, key),
                    format!("`{key}` must be a string, found {}", kind_name(other)),
                );
                None
            }
        }
    }

    fn required_string(&mut self, m: &Mapping, key: &str, path: &str) -> String {
        if m.get(key).is_none() {
            self.err(
                codes::MISSING_KEY,
                join(path, key),
                format!("missing required key `{key}`"),
            );
        }
        self.string(m, key, path).unwrap_or_default()
    }

    fn keyword<T: std::str::FromStr + Copy>(
        &mut self,
        m: &Mapping,
        key: &str,
        path: &str,
        allowed: &[&str],
        default: T,
    ) -> T {
        match self.string(m, key, path) {
            None => default,
            Some(s) => s.parse().unwrap_or_else(|_| {
                self.err(
                    codes::BAD_VALUE,
                    join(path, key),
                    format!("`{s}` is not one of {}", allowed.join(", ")),
                );
                default
            }),
        }
    }

    fn sequence<'v>(&mut self, m: &'v Mapping, key: &str, path: &str) -> &'v [Value] {
        match m.get(key) {
            None | Some(Value::Null) => &[],
            Some(Value::Sequence(s)) => s,
            Some(other) => {
                self.err(
                    codes::WRONG_KIND,
                    join(path, key),
                    format!("`{key}` must be a list, found {}", kind_name(other)),
                );
                &[]
            }
        }
    }

    fn typology(&mut self, root: &Value) -> Typology {
        let mut t = Typology::new("", Vec::new());
        let Some(m) = self.mapping(root, "") else {
            return t;
        };
        self.check_keys(m, "", TOP_KEYS);

        t.name = self.required_string(m, "name", "");
        if let Some(cfg) = m.get("config") {
            if let Some(cm) = self.mapping(cfg, "config") {
                t.config = self.config(cm);
            }
        }
        match m.get("edits") {
            None => self.err(
                codes::MISSING_KEY,
                "edits",
                "missing required key `edits` (the category list)",
            ),
            Some(_) => {
                let items = self.sequence(m, "edits", "");
                t.categories = items
                    .iter()
                    .enumerate()
                    .filter_map(|(i, v)| self.category(v, &format!("edits[{i}]")))
                    .collect();
            }
        }
        if let Some(loc) = m.get("localization") {
            if let Some(lm) = self.mapping(loc, "localization") {
                t.localization = self.localization(lm);
            }
        }
        t
    }

    fn config(&mut self, m: &Mapping) -> TemplateConfig {
        let p = "config";
        self.check_keys(m, p, CONFIG_KEYS);
        let d = TemplateConfig::default();
        let adjudication = match m.get("adjudication") {
            None | Some(Value::Null) => d.adjudication,
            Some(Value::Number(n)) => match n.as_u64().and_then(|v| u8::try_from(v).ok()) {
                Some(v) => v,
                None => {
                    self.err(
                        codes::ADJUDICATION,
                        "config.adjudication",
                        format!("adjudication must be 1, 2 or 3, found {n}"),
                    );
                    d.adjudication
                }
            },
            Some(other) => {
                self.err(
                    codes::WRONG_KIND,
                    "config.adjudication",
                    format!(
                        "`adjudication` must be an integer, found {}",
                        kind_name(other)
                    ),
                );
                d.adjudication
            }
        };
        TemplateConfig {
            boundary: self.keyword(m, "boundary", p, Boundary::KEYWORDS, d.boundary),
            mode: self.keyword(m, "mode", p, Mode::KEYWORDS, d.mode),
            adjudication,
            language: self.string(m, "language", p).unwrap_or(d.language),
            instructions: self.string(m, "instructions", p),
            instructions_display: self.keyword(
                m,
                "instructions_display",
                p,
                InstructionsDisplay::KEYWORDS,
                d.instructions_display,
            ),
            display: self.keyword(m, "display", p, Display::KEYWORDS, d.display),
            citation: self.string(m, "citation", p),
            paper_link: self.string(m, "paper_link", p),
            demo_data_link: self.string(m, "demo_data_link", p),
        }
    }

    fn category(&mut self, v: &Value, path: &str) -> Option<EditCategory> {
        let m = self.mapping(v, path)?;
        self.check_keys(m, path, EDIT_KEYS);
        let name = self.required_string(m, "name", path);
        let label = self
            .string(m, "label", path)
            .unwrap_or_else(|| name.clone());
        let color = self
            .string(m, "color", path)
            .unwrap_or_else(|| PALETTE[self.colour_index % PALETTE.len()].to_string());
        self.colour_index += 1;
        let side = self.keyword(m, "side", path, SideRule::KEYWORDS, SideRule::default());
        let selection = self.keyword(
            m,
            "selection",
            path,
            Selection::KEYWORDS,
            Selection::default(),
        );
        let children = self
            .sequence(m, "children", path)
            .iter()
            .enumerate()
            .filter_map(|(i, c)| self.category(c, &format!("{path}.children[{i}]")))
            .collect();
        let questions = self.question_list(m.get("questions"), &join(path, "questions"));
        Some(EditCategory {
            name,
            label,
            color,
            side,
            selection,
            children,
            questions,
        })
    }

    fn question_list(&mut self, v: Option<&Value>, path: &str) -> Vec<QuestionNode> {
        match v {
            None | Some(Value::Null) => Vec::new(),
            Some(Value::Sequence(items)) => items
                .iter()
                .enumerate()
                .filter_map(|(i, q)| self.question(q, &format!("{path}[{i}]")))
                .collect(),
            Some(other) => {
                self.err(
                    codes::WRONG_KIND,
                    path,
                    format!("question list must be a list, found {}", kind_name(other)),
                );
                Vec::new()
            }
        }
    }

    fn question(&mut self, v: &Value, path: &str) -> Option<QuestionNode> {
        let m = self.mapping(v, path)?;
        self.check_keys(m, path, QUESTION_KEYS);
        let id = self.required_string(m, "id", path);
        let kind = match self.string(m, "kind", path) {
            None => {
                self.err(
                    codes::MISSING_KEY,
                    join(path, "kind"),
                    "missing required key `kind`",
                );
                QuestionKind::Textbox
            }
            Some(s) => s.parse().unwrap_or_else(|_| {
                self.err(
                    codes::BAD_VALUE,
                    join(path, "kind"),
                    format!("`{s}` is not one of {}", QuestionKind::KEYWORDS.join(", ")),
                );
                QuestionKind::Textbox
            }),
        };
        let prompt = self.required_string(m, "prompt", path);
        let options_path = join(path, "options");
        let options = self
            .sequence(m, "options", path)
            .iter()
            .enumerate()
            .map(|(i, o)| match o {
                Value::String(s) => s.clone(),
                Value::Number(n) => n.to_string(),
                Value::Bool(b) => b.to_string(),
                other => {
                    self.err(
                        codes::WRONG_KIND,
                        format!("{options_path}[{i}]"),
                        format!("option label must be a string, found {}", kind_name(other)),
                    );
                    String::new()
                }
            })
            .collect();
        let optional = match m.get("optional") {
            None | Some(Value::Null) => false,
            Some(Value::Bool(b)) => *b,
            Some(other) => {
                self.err(
                    codes::WRONG_KIND,
                    join(path, "optional"),
                    format!("`optional` must be a boolean, found {}", kind_name(other)),
                );
                false
            }
        };
        let followups = match m.get("followups") {
            None | Some(Value::Null) => Followups::default(),
            Some(f) => self.followups(f, &join(path, "followups")),
        };
        Some(QuestionNode {
            id,
            kind,
            prompt,
            options,
            optional,
            followups,
        })
    }

    fn followups(&mut self, v: &Value, path: &str) -> Followups {
        let mut out = Followups::default();
        let Some(m) = self.mapping(v, path) else {
            return out;
        };
        for (k, list) in m {
            let key = match k {
                Value::Number(n) => n.to_string(),
                Value::String(s) => s.clone(),
                other => {
                    self.err(
                        codes::FOLLOWUP_KEY,
                        path,
                        format!(
                            "followup key must be an option index or `any`, found {}",
                            kind_name(other)
                        ),
                    );
                    continue;
                }
            };
            let sub = format!("{path}.{key}");
            if key == "any" {
                out.any = self.question_list(Some(list), &sub);
            } else if let Ok(idx) = key.parse::<usize>() {
                let nodes = self.question_list(Some(list), &sub);
                out.by_option.insert(idx, nodes);
            } else {
                self.err(
                    codes::FOLLOWUP_KEY,
                    sub,
                    format!("followup key `{key}` must be an option index or `any`"),
                );
            }
        }
        out
    }

    fn localization(&mut self, m: &Mapping) -> BTreeMap<String, LocalePack> {
        let mut out = BTreeMap::new();
        for (k, v) in m {
            let Some(locale) = k.as_str() else {
                self.err(
                    codes::WRONG_KIND,
                    "localization",
                    "locale codes must be strings",
                );
                continue;
            };
            let path = format!("localization.{locale}");
            let Some(strings) = self.mapping(v, &path) else {
                continue;
            };
            let mut pack = LocalePack {
                locale: locale.to_string(),
                strings: BTreeMap::new(),
            };
            for (sk, sv) in strings {
                match (sk.as_str(), sv.as_str()) {
                    (Some(key), Some(val)) => {
                        pack.strings.insert(key.to_string(), val.to_string());
                    }
                    _ => self.err(
                        codes::WRONG_KIND,
                        path.clone(),
                        "localization entries must map string keys to strings",
                    ),
                }
            }
            out.insert(locale.to_string(), pack);
        }
        out
    }
}
