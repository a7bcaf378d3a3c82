//! Owned XML element tree retained for write-back.

use quick_xml::events::Event;
use quick_xml::Reader;
use serde::{Deserialize, Serialize};

use super::SvgError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Element(Element),
    Text(String),
    CData(String),
    Comment(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Element {
    /// Qualified name as written (`svg`, `xlink:href` style prefixes kept).
    pub name: String,
    pub attrs: Vec<(String, String)>,
    pub children: Vec<Node>,
}

impl Element {
    pub fn new(name: impl Into<String>) -> Self {
        Element {
            name: name.into(),
            attrs: Vec::new(),
            children: Vec::new(),
        }
    }

    pub fn with_attr(mut self, name: impl Into<String>, value: impl Into<String>) -> Self {
        self.set_attr(name, value);
        self
    }

    pub fn with_child(mut self, child: Element) -> Self {
        self.children.push(Node::Element(child));
        self
    }

    pub fn with_text(mut self, text: impl Into<String>) -> Self {
        self.children.push(Node::Text(text.into()));
        self
    }

    /// Local name with any namespace prefix stripped.
    pub fn local_name(&self) -> &str {
        self.name.rsplit(':').next().unwrap_or(&self.name)
    }

    pub fn attr(&self, name: &str) -> Option<&str> {
        self.attrs
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, v)| v.as_str())
    }

    pub fn set_attr(&mut self, name: impl Into<String>, value: impl Into<String>) {
        let name = name.into();
        let value = value.into();
        match self.attrs.iter_mut().find(|(k, _)| *k == name) {
            Some(slot) => slot.1 = value,
            None => self.attrs.push((name, value)),
        }
    }

    pub fn remove_attr(&mut self, name: &str) {
        self.attrs.retain(|(k, _)| k != name);
    }

    /// `href` or `xlink:href`.
    pub fn href(&self) -> Option<&str> {
        self.attr("href").or_else(|| self.attr("xlink:href"))
    }

    pub fn classes(&self) -> Vec<String> {
        self.attr("class")
            .map(|c| c.split_whitespace().map(str::to_string).collect())
            .unwrap_or_default()
    }

    /// Concatenated descendant text.
    pub fn text_content(&self) -> String {
        let mut out = String::new();
        collect_text(self, &mut out);
        out
    }

    pub fn child_elements(&self) -> impl Iterator<Item = &Element> {
        self.children.iter().filter_map(|n| match n {
            Node::Element(e) => Some(e),
            _ => None,
        })
    }
}

fn collect_text(e: &Element, out: &mut String) {
    for c in &e.children {
        match c {
            Node::Text(t) | Node::CData(t) => out.push_str(t),
            Node::Element(child) => collect_text(child, out),
            Node::Comment(_) => {}
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct XmlDocument {
    /// Declarations, doctype, and comments before the root, verbatim.
    pub prolog: Vec<String>,
    pub root: Element,
}

impl XmlDocument {
    pub fn parse(src: &str) -> Result<XmlDocument, SvgError> {
        let mut reader = Reader::from_str(src);
        reader.config_mut().trim_text(false);
        let mut prolog = Vec::new();
        let mut stack: Vec<Element> = Vec::new();
        let mut root: Option<Element> = None;
        let malformed = |offset: u64, message: String| SvgError::MalformedXml {
            offset: offset as usize,
            message,
        };
        loop {
            let offset = reader.buffer_position();
            let ev = reader
                .read_event()
                .map_err(|e| malformed(reader.error_position(), e.to_string()))?;
            match ev {
                Event::Start(e) | Event::Empty(e) if root.is_some() => {
                    let _ = e;
                    return Err(malformed(offset, "content after the root element".into()));
                }
                Event::Start(e) => {
                    stack.push(element_from(&e, offset)?);
                }
                Event::Empty(e) => {
                    let el = element_from(&e, offset)?;
                    match stack.last_mut() {
                        Some(parent) => parent.children.push(Node::Element(el)),
                        None => root = Some(el),
                    }
                }
                Event::End(_) => {
                    let el = stack
                        .pop()
                        .ok_or_else(|| malformed(offset, "unexpected closing tag".into()))?;
                    match stack.last_mut() {
                        Some(parent) => parent.children.push(Node::Element(el)),
                        None => root = Some(el),
                    }
                }
                Event::Text(t) => {
                    let raw = String::from_utf8_lossy(t.as_ref()).into_owned();
                    let text = t.unescape().map(|c| c.into_owned()).unwrap_or(raw);
                    match stack.last_mut() {
                        Some(parent) => parent.children.push(Node::Text(text)),
                        None if text.trim().is_empty() => {}
                        None => return Err(malformed(offset, "text outside the root element".into())),
                    }
                }
                Event::CData(c) => {
                    let text = String::from_utf8_lossy(&c.into_inner()).into_owned();
                    if let Some(parent) = stack.last_mut() {
                        parent.children.push(Node::CData(text));
                    }
                }
                Event::Comment(c) => {
                    let text = String::from_utf8_lossy(c.as_ref()).into_owned();
                    match stack.last_mut() {
                        Some(parent) => parent.children.push(Node::Comment(text)),
                        None if root.is_none() => prolog.push(format!("<!--{text}-->")),
                        None => {}
                    }
                }
                Event::Decl(d) => {
                    prolog.push(format!("<?{}?>", String::from_utf8_lossy(d.as_ref())));
                }
                Event::PI(p) => {
                    if root.is_none() && stack.is_empty() {
                        prolog.push(format!("<?{}?>", String::from_utf8_lossy(p.as_ref())));
                    }
                }
                Event::DocType(d) => {
                    prolog.push(format!("<!DOCTYPE {}>", String::from_utf8_lossy(d.as_ref())));
                }
                Event::Eof => break,
            }
        }
        if !stack.is_empty() {
            return Err(malformed(src.len() as u64, format!("unclosed element <{}>", stack.last().map(|e| e.name.as_str()).unwrap_or(""))));
        }
        let root = root.ok_or_else(|| malformed(0, "no root element".into()))?;
        Ok(XmlDocument { prolog, root })
    }

    pub fn to_string(&self) -> String {
        let mut out = String::new();
        for p in &self.prolog {
            out.push_str(p);
            out.push('\n');
        }
        write_element(&self.root, &mut out);
        out.push('\n');
        out
    }
}

fn element_from(e: &quick_xml::events::BytesStart<'_>, offset: u64) -> Result<Element, SvgError> {
    let name = String::from_utf8_lossy(e.name().as_ref()).into_owned();
    let mut el = Element::new(name);
    for attr in e.attributes() {
        let attr = attr.map_err(|err| SvgError::MalformedXml {
            offset: offset as usize,
            message: err.to_string(),
        })?;
        let key = String::from_utf8_lossy(attr.key.as_ref()).into_owned();
        let value = match attr.unescape_value() {
            Ok(v) => v.into_owned(),
            Err(_) => String::from_utf8_lossy(&attr.value).into_owned(),
        };
        el.attrs.push((key, value));
    }
    Ok(el)
}

pub(crate) fn escape_attr(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

pub(crate) fn escape_text(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub(crate) fn write_element(e: &Element, out: &mut String) {
    out.push('<');
    out.push_str(&e.name);
    for (k, v) in &e.attrs {
        out.push(' ');
        out.push_str(k);
        out.push_str("=\"");
        out.push_str(&escape_attr(v));
        out.push('"');
    }
    if e.children.is_empty() {
        out.push_str("/>");
        return;
    }
    out.push('>');
    for c in &e.children {
        match c {
            Node::Element(child) => write_element(child, out),
            Node::Text(t) => out.push_str(&escape_text(t)),
            Node::CData(t) => {
                out.push_str("<![CDATA[");
                out.push_str(t);
                out.push_str("]]>");
            }
            Node::Comment(t) => {
                out.push_str("<!--");
                out.push_str(t);
                out.push_str("-->");
            }
        }
    }
    out.push_str("</");
    out.push_str(&e.name);
    out.push('>');
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_structure() {
        let src = r##"<?xml version="1.0"?><svg xmlns="http://www.w3.org/2000/svg" xmlns:xlink="http://www.w3.org/1999/xlink" width="10" height="10"><g><use xlink:href="#a"/><text>a &amp; b</text></g></svg>"##;
        let doc = XmlDocument::parse(src).unwrap();
        let again = XmlDocument::parse(&doc.to_string()).unwrap();
        assert_eq!(doc, again);
        let g = doc.root.child_elements().next().unwrap();
        let text = g.child_elements().nth(1).unwrap();
        assert_eq!(text.text_content(), "a & b");
        assert_eq!(g.child_elements().next().unwrap().href(), Some("#a"));
    }

    #[test]
    fn reports_offset_for_mismatched_tags() {
        let err = XmlDocument::parse("<svg><g></svg>").unwrap_err();
        match err {
            SvgError::MalformedXml { offset, .. } => assert!(offset > 0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_unclosed() {
        assert!(XmlDocument::parse("<svg><g>").is_err());
        assert!(XmlDocument::parse("").is_err());
    }
}
