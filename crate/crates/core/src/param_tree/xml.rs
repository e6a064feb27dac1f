//! Canonical XML form of parameter trees.
//!
//! One element per node, attributes inline in declaration order, two-space
//! indentation per depth, documentation as leading `_doc_` / `_doc_<name>`
//! child elements, and exactly one trailing newline.

use super::{infer_value, is_identifier, render_literal, ParamError, ParamNode, DOC_TAG};

fn escape_into(out: &mut String, text: &str) {
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\n' => out.push_str("&#10;"),
            '\r' => out.push_str("&#13;"),
            '\t' => out.push_str("&#9;"),
            c => out.push(c),
        }
    }
}

pub fn to_xml_text(root: &ParamNode) -> String {
    let mut out = String::new();
    write_node(&mut out, root, 0);
    out
}

fn write_node(out: &mut String, node: &ParamNode, depth: usize) {
    let indent = "  ".repeat(depth);
    out.push_str(&indent);
    out.push('<');
    out.push_str(&node.tag);
    for attrib in &node.attribs {
        out.push(' ');
        out.push_str(&attrib.name);
        out.push_str("=\"");
        escape_into(out, &render_literal(&attrib.value));
        out.push('"');
    }
    let has_attrib_docs = node.attribs.iter().any(|a| a.doc.is_some());
    if node.doc.is_none() && !has_attrib_docs && node.children.is_empty() {
        out.push_str("/>\n");
        return;
    }
    out.push_str(">\n");
    let inner = "  ".repeat(depth + 1);
    let mut doc_element = |tag: &str, text: &str| {
        out.push_str(&inner);
        out.push('<');
        out.push_str(tag);
        out.push('>');
        escape_into(out, text);
        out.push_str("</");
        out.push_str(tag);
        out.push_str(">\n");
    };
    if let Some(doc) = &node.doc {
        doc_element(DOC_TAG, doc);
    }
    for attrib in &node.attribs {
        if let Some(doc) = &attrib.doc {
            doc_element(&format!("{DOC_TAG}{}", attrib.name), doc);
        }
    }
    for child in &node.children {
        write_node(out, child, depth + 1);
    }
    out.push_str(&indent);
    out.push_str("</");
    out.push_str(&node.tag);
    out.push_str(">\n");
}

/// Parses XML text back into a tree.
///
/// Accepts the canonical form plus an optional XML declaration, comments,
/// arbitrary inter-element whitespace and single-quoted attribute values.
pub fn parse_xml_text(text: &str) -> Result<ParamNode, ParamError> {
    let mut parser = Parser {
        src: text,
        pos: 0,
        line: 1,
        col: 1,
    };
    parser.eat("\u{feff}");
    parser.skip_misc()?;
    if parser.eat("<?xml") {
        parser.skip_until("?>")?;
        parser.skip_misc()?;
    }
    if parser.peek().is_none() {
        return Err(parser.error("expected root element"));
    }
    let root = parser.element()?;
    parser.skip_misc()?;
    if parser.peek().is_some() {
        return Err(parser.error("content after root element"));
    }
    Ok(root)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    col: usize,
}

struct Mark {
    line: usize,
    col: usize,
}

impl<'a> Parser<'a> {
    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn eat(&mut self, lit: &str) -> bool {
        if self.rest().starts_with(lit) {
            for _ in lit.chars() {
                self.bump();
            }
            true
        } else {
            false
        }
    }

    fn mark(&self) -> Mark {
        Mark {
            line: self.line,
            col: self.col,
        }
    }

    fn error(&self, message: &str) -> ParamError {
        self.error_at(&self.mark(), message)
    }

    fn error_at(&self, mark: &Mark, message: &str) -> ParamError {
        ParamError::XmlSyntax {
            line: mark.line,
            col: mark.col,
            message: message.to_string(),
        }
    }

    fn expect(&mut self, lit: &str) -> Result<(), ParamError> {
        if self.eat(lit) {
            Ok(())
        } else {
            Err(self.error(&format!("expected {lit:?}")))
        }
    }

    fn skip_until(&mut self, end: &str) -> Result<(), ParamError> {
        while !self.eat(end) {
            if self.bump().is_none() {
                return Err(self.error(&format!("unterminated construct, expected {end:?}")));
            }
        }
        Ok(())
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_ascii_whitespace()) {
            self.bump();
        }
    }

    fn skip_misc(&mut self) -> Result<(), ParamError> {
        loop {
            self.skip_ws();
            if self.eat("<!--") {
                self.skip_until("-->")?;
            } else {
                return Ok(());
            }
        }
    }

    fn name(&mut self) -> Result<&'a str, ParamError> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_alphanumeric() || matches!(c, '_' | '-' | '.' | ':')) {
            self.bump();
        }
        if self.pos == start {
            return Err(self.error("expected a name"));
        }
        Ok(&self.src[start..self.pos])
    }

    fn identifier(&mut self) -> Result<&'a str, ParamError> {
        let name = self.name()?;
        if is_identifier(name) {
            Ok(name)
        } else {
            Err(ParamError::InvalidIdentifier(name.to_string()))
        }
    }

    fn entity(&mut self, out: &mut String) -> Result<(), ParamError> {
        let mark = self.mark();
        self.expect("&")?;
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c != ';' && !c.is_whitespace() && c != '<') {
            self.bump();
        }
        let body = &self.src[start..self.pos];
        if !self.eat(";") {
            return Err(self.error_at(&mark, "unterminated entity reference"));
        }
        let decoded = match body {
            "amp" => Some('&'),
            "lt" => Some('<'),
            "gt" => Some('>'),
            "quot" => Some('"'),
            "apos" => Some('\''),
            _ => body
                .strip_prefix("#x")
                .map(|hex| u32::from_str_radix(hex, 16))
                .or_else(|| body.strip_prefix('#').map(str::parse::<u32>))
                .and_then(Result::ok)
                .and_then(char::from_u32),
        };
        match decoded {
            Some(c) => {
                out.push(c);
                Ok(())
            }
            None => Err(self.error_at(&mark, &format!("unknown entity &{body};"))),
        }
    }

    fn attr_value(&mut self) -> Result<String, ParamError> {
        let quote = match self.peek() {
            Some(q @ ('"' | '\'')) => q,
            _ => return Err(self.error("expected quoted attribute value")),
        };
        self.bump();
        let mut out = String::new();
        loop {
            match self.peek() {
                None => return Err(self.error("unterminated attribute value")),
                Some(c) if c == quote => {
                    self.bump();
                    return Ok(out);
                }
                Some('<') => return Err(self.error("'<' in attribute value")),
                Some('&') => self.entity(&mut out)?,
                Some(c) => {
                    out.push(c);
                    self.bump();
                }
            }
        }
    }

    /// Text content of a documentation element, up to its end tag.
    fn doc_text(&mut self, tag: &str) -> Result<String, ParamError> {
        let mut out = String::new();
        loop {
            match self.peek() {
                None => return Err(self.error(&format!("missing </{tag}>"))),
                Some('<') => {
                    self.expect("</")?;
                    let close = self.name()?;
                    if close != tag {
                        return Err(self.error(&format!("expected </{tag}>, found </{close}>")));
                    }
                    self.skip_ws();
                    self.expect(">")?;
                    return Ok(out);
                }
                Some('&') => self.entity(&mut out)?,
                Some(c) => {
                    out.push(c);
                    self.bump();
                }
            }
        }
    }

    fn element(&mut self) -> Result<ParamNode, ParamError> {
        self.expect("<")?;
        let tag = self.identifier()?;
        let mut node = ParamNode::new(tag)?;
        loop {
            let had_ws = matches!(self.peek(), Some(c) if c.is_ascii_whitespace());
            self.skip_ws();
            if self.eat("/>") {
                return Ok(node);
            }
            if self.eat(">") {
                break;
            }
            if !had_ws {
                return Err(self.error("expected whitespace, '>' or '/>'"));
            }
            let name = self.identifier()?;
            self.skip_ws();
            self.expect("=")?;
            self.skip_ws();
            let raw = self.attr_value()?;
            if node.attribs.iter().any(|a| a.name == name) {
                return Err(ParamError::DuplicateName(name.to_string()));
            }
            node.declare_attrib(name, infer_value(&raw)?, None)?;
        }

        loop {
            self.skip_misc()?;
            let mark = self.mark();
            match self.peek() {
                None => return Err(self.error(&format!("missing </{}>", node.tag))),
                Some('<') if self.rest().starts_with("</") => {
                    self.bump();
                    self.bump();
                    let close = self.name()?;
                    if close != node.tag {
                        return Err(self.error_at(
                            &mark,
                            &format!("expected </{}>, found </{close}>", node.tag),
                        ));
                    }
                    self.skip_ws();
                    self.expect(">")?;
                    return Ok(node);
                }
                Some('<') => {
                    if self.rest()[1..].starts_with(DOC_TAG) {
                        self.doc_element(&mut node, &mark)?;
                    } else {
                        let child = self.element()?;
                        node.add_child(child)?;
                    }
                }
                Some(_) => return Err(self.error("unexpected text content")),
            }
        }
    }

    fn doc_element(&mut self, node: &mut ParamNode, mark: &Mark) -> Result<(), ParamError> {
        self.expect("<")?;
        let tag = self.identifier()?;
        self.skip_ws();
        let text = if self.eat("/>") {
            String::new()
        } else {
            self.expect(">")?;
            self.doc_text(tag)?
        };
        let target = &tag[DOC_TAG.len()..];
        if target.is_empty() {
            if node.doc.is_some() {
                return Err(ParamError::DuplicateName(tag.to_string()));
            }
            node.doc = Some(text);
            return Ok(());
        }
        match node.attribs.iter_mut().find(|a| a.name == target) {
            Some(attrib) if attrib.doc.is_some() => Err(ParamError::DuplicateName(tag.to_string())),
            Some(attrib) => {
                attrib.doc = Some(text);
                Ok(())
            }
            None => Err(self.error_at(mark, &format!("documentation for undeclared attribute {target:?}"))),
        }
    }
}
