// SPDX-License-Identifier: Apache-2.0

//! Markdown instructions to a neutral block tree.
//!
//! Raw HTML never passes through: HTML blocks become [`Block::Literal`] and
//! inline HTML becomes plain text, so a renderer that treats every string as
//! text cannot be made to inject markup. Link targets with schemes other
//! than http, https and mailto are blanked.

use std::iter::Peekable;

use pulldown_cmark::{CodeBlockKind, Event, HeadingLevel, Parser, Tag};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Block {
    Heading {
        level: u8,
        content: Vec<Inline>,
    },
    Paragraph {
        content: Vec<Inline>,
    },
    List {
        ordered: bool,
        start: Option<u64>,
        items: Vec<Vec<Block>>,
    },
    CodeBlock {
        language: Option<String>,
        code: String,
    },
    Quote {
        blocks: Vec<Block>,
    },
    Rule,
    /// Source text shown verbatim, e.g. an HTML block.
    Literal {
        text: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Inline {
    Text {
        text: String,
    },
    Emphasis {
        content: Vec<Inline>,
    },
    Strong {
        content: Vec<Inline>,
    },
    Code {
        code: String,
    },
    Link {
        href: String,
        title: String,
        content: Vec<Inline>,
    },
    Image {
        src: String,
        alt: String,
        title: String,
    },
    SoftBreak,
    LineBreak,
}

pub fn render_instructions(markdown: &str) -> Vec<Block> {
    let mut events = Parser::new(markdown).peekable();
    flow(&mut events)
}

type Events<'a> = Peekable<Parser<'a>>;

fn is_inline_event(e: &Event<'_>) -> bool {
    matches!(
        e,
        Event::Text(_)
            | Event::Code(_)
            | Event::InlineHtml(_)
            | Event::SoftBreak
            | Event::HardBreak
            | Event::FootnoteReference(_)
            | Event::TaskListMarker(_)
            | Event::InlineMath(_)
            | Event::DisplayMath(_)
            | Event::Start(
                Tag::Emphasis
                    | Tag::Strong
                    | Tag::Strikethrough
                    | Tag::Link { .. }
                    | Tag::Image { .. }
            )
    )
}

/// Blocks up to (not including) the next unmatched `End`.
fn flow(ev: &mut Events<'_>) -> Vec<Block> {
    let mut out = Vec::new();
    loop {
        match ev.peek() {
            None | Some(Event::End(_)) => return out,
            Some(e) if is_inline_event(e) => {
                // tight list items hold inline content without a paragraph
                let content = inlines(ev, true);
                out.push(Block::Paragraph { content });
                continue;
            }
            _ => {}
        }
        match ev.next().expect("peeked") {
            Event::Start(Tag::Paragraph) => {
                let content = inlines(ev, false);
                ev.next();
                out.push(Block::Paragraph { content });
            }
            Event::Start(Tag::Heading { level, .. }) => {
                let content = inlines(ev, false);
                ev.next();
                out.push(Block::Heading {
                    level: heading_level(level),
                    content,
                });
            }
            Event::Start(Tag::BlockQuote(_)) => {
                let blocks = flow(ev);
                ev.next();
                out.push(Block::Quote { blocks });
            }
            Event::Start(Tag::CodeBlock(kind)) => {
                let language = match kind {
                    CodeBlockKind::Fenced(info) => info
                        .split_whitespace()
                        .next()
                        .filter(|s| !s.is_empty())
                        .map(str::to_string),
                    CodeBlockKind::Indented => None,
                };
                let code = raw_text(ev);
                out.push(Block::CodeBlock { language, code });
            }
            Event::Start(Tag::HtmlBlock) => {
                let text = raw_text(ev);
                out.push(Block::Literal {
                    text: text.trim_end_matches('\n').to_string(),
                });
            }
            Event::Html(h) => out.push(Block::Literal {
                text: h.trim_end_matches('\n').to_string(),
            }),
            Event::Start(Tag::List(start)) => {
                let mut items = Vec::new();
                while let Some(Event::Start(Tag::Item)) = ev.peek() {
                    ev.next();
                    items.push(flow(ev));
                    ev.next();
                }
                ev.next();
                out.push(Block::List {
                    ordered: start.is_some(),
                    start,
                    items,
                });
            }
            Event::Rule => out.push(Block::Rule),
            Event::Start(_) => {
                // containers outside the supported subset keep their content
                out.extend(flow(ev));
                ev.next();
            }
            _ => {}
        }
    }
}

/// Concatenated text up to and including the matching `End`.
fn raw_text(ev: &mut Events<'_>) -> String {
    let mut s = String::new();
    let mut depth = 0usize;
    for e in ev.by_ref() {
        match e {
            Event::Start(_) => depth += 1,
            Event::End(_) if depth == 0 => break,
            Event::End(_) => depth -= 1,
            Event::Text(t) | Event::Html(t) | Event::InlineHtml(t) | Event::Code(t) => {
                s.push_str(&t)
            }
            Event::SoftBreak | Event::HardBreak => s.push('\n'),
            _ => {}
        }
    }
    s
}

fn heading_level(l: HeadingLevel) -> u8 {
    match l {
        HeadingLevel::H1 => 1,
        HeadingLevel::H2 => 2,
        HeadingLevel::H3 => 3,
        HeadingLevel::H4 => 4,
        HeadingLevel::H5 => 5,
        HeadingLevel::H6 => 6,
    }
}

fn push_text(out: &mut Vec<Inline>, text: &str) {
    if let Some(Inline::Text { text: prev }) = out.last_mut() {
        prev.push_str(text);
    } else {
        out.push(Inline::Text {
            text: text.to_string(),
        });
    }
}

fn safe_href(url: &str) -> String {
    let lower = url.trim().to_ascii_lowercase();
    let scheme_end = lower.find(':');
    let first_sep = lower.find(['/', '?', '#']);
    let has_scheme = match (scheme_end, first_sep) {
        (Some(c), Some(s)) => c < s,
        (Some(_), None) => true,
        _ => false,
    };
    if !has_scheme
        || lower.starts_with("http:")
        || lower.starts_with("https:")
        || lower.starts_with("mailto:")
    {
        url.to_string()
    } else {
        String::new()
    }
}

fn plain(content: &[Inline]) -> String {
    let mut s = String::new();
    for i in content {
        match i {
            Inline::Text { text } => s.push_str(text),
            Inline::Code { code } => s.push_str(code),
            Inline::Emphasis { content }
            | Inline::Strong { content }
            | Inline::Link { content, .. } => s.push_str(&plain(content)),
            Inline::Image { alt, .. } => s.push_str(alt),
            Inline::SoftBreak | Inline::LineBreak => s.push(' '),
        }
    }
    s
}

/// Inline content up to the next unmatched `End`. With `stop_at_block`, also
/// stops before the first block-level event (tight list items).
fn inlines(ev: &mut Events<'_>, stop_at_block: bool) -> Vec<Inline> {
    let mut out = Vec::new();
    loop {
        match ev.peek() {
            None | Some(Event::End(_)) => return out,
            Some(e) if stop_at_block && !is_inline_event(e) => return out,
            _ => {}
        }
        match ev.next().expect("peeked") {
            Event::Text(t) => push_text(&mut out, &t),
            Event::InlineHtml(h) | Event::Html(h) => push_text(&mut out, &h),
            Event::Code(c) => out.push(Inline::Code {
                code: c.to_string(),
            }),
            Event::SoftBreak => out.push(Inline::SoftBreak),
            Event::HardBreak => out.push(Inline::LineBreak),
            Event::Start(Tag::Emphasis) => {
                let content = inlines(ev, false);
                ev.next();
                out.push(Inline::Emphasis { content });
            }
            Event::Start(Tag::Strong) => {
                let content = inlines(ev, false);
                ev.next();
                out.push(Inline::Strong { content });
            }
            Event::Start(Tag::Link {
                dest_url, title, ..
            }) => {
                let content = inlines(ev, false);
                ev.next();
                out.push(Inline::Link {
                    href: safe_href(&dest_url),
                    title: title.to_string(),
                    content,
                });
            }
            Event::Start(Tag::Image {
                dest_url, title, ..
            }) => {
                let content = inlines(ev, false);
                ev.next();
                out.push(Inline::Image {
                    src: safe_href(&dest_url),
                    alt: plain(&content),
                    title: title.to_string(),
                });
            }
            Event::Start(_) => {
                for i in inlines(ev, false) {
                    match i {
                        Inline::Text { text } => push_text(&mut out, &text),
                        other => out.push(other),
                    }
                }
                ev.next();
            }
            Event::TaskListMarker(done) => push_text(&mut out, if done { "[x] " } else { "[ ] " }),
            Event::FootnoteReference(r) => push_text(&mut out, &format!("[^{r}]")),
            Event::InlineMath(m) | Event::DisplayMath(m) => out.push(Inline::Code {
                code: m.to_string(),
            }),
            _ => {}
        }
    }
}
