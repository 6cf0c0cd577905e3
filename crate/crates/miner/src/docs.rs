//! Doc comments: `///`, `//!` and `#[doc = "..."]` reduced to paragraphs.

use codecarta_core::model::DocSpan;
use codecarta_core::DocComment;
use pulldown_cmark::{Event, Parser, Tag, TagEnd};
use syn::{AttrStyle, Attribute, Expr, Lit, Meta};

/// Outer doc comment of a declaration, absent when there is none.
pub fn extract_doc_comment(attrs: &[Attribute]) -> Option<DocComment> {
    doc_from_attrs(attrs, false)
}

/// Inner (`//!`) doc comment of a file or inline module.
pub fn extract_inner_doc(attrs: &[Attribute]) -> Option<DocComment> {
    doc_from_attrs(attrs, true)
}

fn doc_from_attrs(attrs: &[Attribute], inner: bool) -> Option<DocComment> {
    let mut lines = Vec::new();
    for attr in attrs {
        if matches!(attr.style, AttrStyle::Inner(_)) != inner || !attr.path().is_ident("doc") {
            continue;
        }
        let Meta::NameValue(nv) = &attr.meta else { continue };
        let Expr::Lit(lit) = &nv.value else { continue };
        let Lit::Str(s) = &lit.lit else { continue };
        let value = s.value();
        if value.contains('\n') {
            // block comment: drop the leading `*` decoration of each line
            for line in value.lines() {
                let t = line.trim_start();
                let t = t.strip_prefix('*').unwrap_or(t);
                lines.push(t.strip_prefix(' ').unwrap_or(t).to_string());
            }
        } else {
            lines.push(value.strip_prefix(' ').unwrap_or(&value).to_string());
        }
    }
    if lines.is_empty() {
        return None;
    }
    doc_from_markdown(&lines.join("\n"))
}

/// Strips markdown to paragraphs of text and inline code. Code blocks become a
/// paragraph holding one code span. Returns `None` for blank input.
pub fn doc_from_markdown(text: &str) -> Option<DocComment> {
    let mut paragraphs: Vec<Vec<DocSpan>> = Vec::new();
    let mut current: Vec<DocSpan> = Vec::new();
    let mut in_code_block = false;
    let mut block = String::new();

    fn push_text(current: &mut Vec<DocSpan>, s: &str) {
        if let Some(DocSpan::Text(last)) = current.last_mut() {
            last.push_str(s);
        } else {
            current.push(DocSpan::Text(s.to_string()));
        }
    }
    fn flush(paragraphs: &mut Vec<Vec<DocSpan>>, current: &mut Vec<DocSpan>) {
        if let Some(DocSpan::Text(t)) = current.last_mut() {
            let trimmed = t.trim_end().len();
            t.truncate(trimmed);
        }
        current.retain(|s| !matches!(s, DocSpan::Text(t) if t.is_empty()));
        if !current.is_empty() {
            paragraphs.push(std::mem::take(current));
        }
    }

    for event in Parser::new(text) {
        match event {
            Event::Start(Tag::CodeBlock(_)) => {
                flush(&mut paragraphs, &mut current);
                in_code_block = true;
                block.clear();
            }
            Event::End(TagEnd::CodeBlock) => {
                in_code_block = false;
                let code = block.trim_end().to_string();
                if !code.is_empty() {
                    paragraphs.push(vec![DocSpan::Code(code)]);
                }
            }
            Event::Text(t) if in_code_block => block.push_str(&t),
            Event::Text(t) => push_text(&mut current, &t),
            Event::Code(c) => current.push(DocSpan::Code(c.to_string())),
            Event::SoftBreak | Event::HardBreak => push_text(&mut current, " "),
            Event::Start(Tag::Paragraph | Tag::Heading { .. } | Tag::Item) => flush(&mut paragraphs, &mut current),
            Event::End(TagEnd::Paragraph | TagEnd::Heading(_) | TagEnd::Item) => {
                flush(&mut paragraphs, &mut current)
            }
            _ => {}
        }
    }
    flush(&mut paragraphs, &mut current);
    (!paragraphs.is_empty()).then_some(DocComment { paragraphs })
}
