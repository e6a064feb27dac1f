//! Mechanical Matlab to "not yet Python" rewriting.
//!
//! The lexer is lossless (token texts concatenate back to the input) and
//! the rules only touch code tokens, so strings and comments survive
//! untouched apart from the comment marker. The output is meant for a
//! human to finish; places that need attention are marked in the text
//! (`# mat2py: ...`) or in the report.

use std::collections::HashSet;
use std::fmt::{self, Write};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Ident,
    Number,
    MString,
    Comment,
    /// `...` and the ignored rest of its line.
    Continuation,
    Op,
    Punct,
    Newline,
    Whitespace,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    /// 1-based.
    pub line: usize,
    /// 1-based, in characters.
    pub col: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Mat2PyError {
    #[error("unterminated string starting at line {line}, column {col}")]
    UnterminatedString { line: usize, col: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RewriteRule {
    pub id: &'static str,
    pub description: &'static str,
}

pub const RULES: [RewriteRule; 9] = [
    RewriteRule { id: "R1", description: "comment marker % becomes # (leading %% becomes # %%)" },
    RewriteRule { id: "R2", description: "continuation ... becomes a trailing backslash" },
    RewriteRule { id: "R3", description: "block headers get a colon, for/function headers are rewritten, standalone end lines are deleted" },
    RewriteRule { id: "R4", description: "operators ~= && || .* ./ .^ ^ become != and or * / ** **" },
    RewriteRule { id: "R5", description: "transpose ' and .' become .T" },
    RewriteRule { id: "R6", description: "trailing ; is removed" },
    RewriteRule { id: "R7", description: "disp, length, zeros, ones and linspace calls are renamed" },
    RewriteRule { id: "R8", description: "strings pass through unchanged" },
    RewriteRule { id: "R9", description: "all other tokens pass through unchanged" },
];

/// Report id for notes that do not change the text.
pub const NOTE: &str = "NOTE";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleApplication {
    pub rule: &'static str,
    pub line: usize,
    pub before: String,
    pub after: String,
    pub note: Option<&'static str>,
}

impl fmt::Display for RuleApplication {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {} `{}` -> `{}`", self.line, self.rule, self.before, self.after)?;
        if let Some(note) = self.note {
            write!(f, " ({note})")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Conversion {
    pub text: String,
    pub report: Vec<RuleApplication>,
}

impl Conversion {
    pub fn render_report(&self) -> String {
        self.report.iter().map(|r| format!("{r}\n")).collect()
    }
}

const MULTI_OPS: [&str; 10] = [".*", "./", ".\\", ".^", ".'", "==", "~=", "<=", ">=", "&&"];

struct Lexer {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    col: usize,
    tokens: Vec<Token>,
}

impl Lexer {
    fn peek(&self, ahead: usize) -> Option<char> {
        self.chars.get(self.pos + ahead).copied()
    }

    fn emit(&mut self, kind: TokenKind, len: usize) {
        let text: String = self.chars[self.pos..self.pos + len].iter().collect();
        self.tokens.push(Token {
            kind,
            text,
            line: self.line,
            col: self.col,
        });
        self.pos += len;
        if kind == TokenKind::Newline {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += len;
        }
    }

    fn run_while(&self, from: usize, pred: impl Fn(char) -> bool) -> usize {
        let mut end = from;
        while self.chars.get(end).is_some_and(|&c| pred(c)) {
            end += 1;
        }
        end
    }

    fn until_eol(&self) -> usize {
        self.run_while(self.pos, |c| c != '\n' && c != '\r') - self.pos
    }

    /// A quote is a transpose right after a value.
    fn quote_is_transpose(&self) -> bool {
        let Some(prev) = self.tokens.last() else {
            return false;
        };
        match prev.kind {
            TokenKind::Ident | TokenKind::Number | TokenKind::MString => true,
            TokenKind::Punct => matches!(prev.text.as_str(), ")" | "]" | "}"),
            TokenKind::Op => prev.text == "'" || prev.text == ".'",
            _ => false,
        }
    }

    fn string(&mut self, quote: char) -> Result<(), Mat2PyError> {
        let mut end = self.pos + 1;
        loop {
            match self.chars.get(end) {
                None | Some('\n') | Some('\r') => {
                    return Err(Mat2PyError::UnterminatedString {
                        line: self.line,
                        col: self.col,
                    })
                }
                Some(&c) if c == quote => {
                    if self.chars.get(end + 1) == Some(&quote) {
                        end += 2;
                    } else {
                        end += 1;
                        break;
                    }
                }
                Some(_) => end += 1,
            }
        }
        self.emit(TokenKind::MString, end - self.pos);
        Ok(())
    }

    fn number_len(&self) -> usize {
        let digits = |from| self.run_while(from, |c| c.is_ascii_digit());
        let mut end = digits(self.pos);
        if self.chars.get(end) == Some(&'.') {
            // `3.*x` is `3 .* x`, `1.'` is a transpose.
            if !matches!(self.chars.get(end + 1), Some('*' | '/' | '\\' | '^' | '\'')) {
                end = digits(end + 1);
            }
        }
        if matches!(self.chars.get(end), Some('e' | 'E' | 'd' | 'D')) {
            let mut exp = end + 1;
            if matches!(self.chars.get(exp), Some('+' | '-')) {
                exp += 1;
            }
            if self.chars.get(exp).is_some_and(char::is_ascii_digit) {
                end = digits(exp);
            }
        }
        if matches!(self.chars.get(end), Some('i' | 'j'))
            && !self.chars.get(end + 1).is_some_and(|c| c.is_alphanumeric() || *c == '_')
        {
            end += 1;
        }
        end - self.pos
    }

    fn run(mut self) -> Result<Vec<Token>, Mat2PyError> {
        while let Some(c) = self.peek(0) {
            match c {
                '\r' if self.peek(1) == Some('\n') => self.emit(TokenKind::Newline, 2),
                '\n' | '\r' => self.emit(TokenKind::Newline, 1),
                ' ' | '\t' => {
                    let len = self.run_while(self.pos, |c| c == ' ' || c == '\t') - self.pos;
                    self.emit(TokenKind::Whitespace, len);
                }
                '%' => {
                    let len = self.until_eol();
                    self.emit(TokenKind::Comment, len);
                }
                '.' if self.peek(1) == Some('.') && self.peek(2) == Some('.') => {
                    let len = self.until_eol();
                    self.emit(TokenKind::Continuation, len);
                }
                '\'' if self.quote_is_transpose() => self.emit(TokenKind::Op, 1),
                '\'' | '"' => self.string(c)?,
                c if c.is_ascii_digit() => {
                    let len = self.number_len();
                    self.emit(TokenKind::Number, len);
                }
                '.' if self.peek(1).is_some_and(|c| c.is_ascii_digit()) => {
                    let len = self.number_len();
                    self.emit(TokenKind::Number, len);
                }
                c if c.is_ascii_alphabetic() || c == '_' => {
                    let len = self.run_while(self.pos, |c| c.is_ascii_alphanumeric() || c == '_') - self.pos;
                    self.emit(TokenKind::Ident, len);
                }
                '(' | ')' | '[' | ']' | '{' | '}' | ',' | ';' => self.emit(TokenKind::Punct, 1),
                _ => {
                    let two: String = self.chars[self.pos..(self.pos + 2).min(self.chars.len())].iter().collect();
                    if MULTI_OPS.contains(&two.as_str()) || two == "||" {
                        self.emit(TokenKind::Op, 2);
                    } else if "+-*/\\^<>&|~=:@!.".contains(c) {
                        self.emit(TokenKind::Op, 1);
                    } else {
                        self.emit(TokenKind::Punct, 1);
                    }
                }
            }
        }
        Ok(self.tokens)
    }
}

pub fn tokenize(source: &str) -> Result<Vec<Token>, Mat2PyError> {
    Lexer {
        chars: source.chars().collect(),
        pos: 0,
        line: 1,
        col: 1,
        tokens: Vec::new(),
    }
    .run()
}

pub fn convert(source: &str) -> Result<String, Mat2PyError> {
    Ok(convert_report(source)?.text)
}

pub fn convert_report(source: &str) -> Result<Conversion, Mat2PyError> {
    let tokens = tokenize(source)?;
    let mut converter = Converter {
        out: String::new(),
        report: Vec::new(),
        known_arrays: HashSet::new(),
    };
    let mut start = 0;
    for (i, tok) in tokens.iter().enumerate() {
        if tok.kind == TokenKind::Newline && !continued(&tokens[start..i]) {
            converter.line(&tokens[start..=i]);
            start = i + 1;
        }
    }
    if start < tokens.len() {
        converter.line(&tokens[start..]);
    }
    Ok(Conversion {
        text: converter.out,
        report: converter.report,
    })
}

/// True when the physical line ending here carries a continuation.
fn continued(tokens: &[Token]) -> bool {
    tokens
        .iter()
        .rev()
        .find(|t| t.kind != TokenKind::Whitespace)
        .is_some_and(|t| t.kind == TokenKind::Continuation)
}

const ARRAY_CONSTRUCTORS: [&str; 3] = ["zeros", "ones", "linspace"];

fn call_rename(name: &str) -> Option<&'static str> {
    Some(match name {
        "disp" => "print",
        "length" => "len",
        "zeros" => "np.zeros",
        "ones" => "np.ones",
        "linspace" => "np.linspace",
        _ => return None,
    })
}

fn operator_rewrite(op: &str) -> Option<(&'static str, &'static str)> {
    Some(match op {
        "~=" => ("R4", "!="),
        "&&" => ("R4", "and"),
        "||" => ("R4", "or"),
        ".*" => ("R4", "*"),
        "./" => ("R4", "/"),
        ".^" | "^" => ("R4", "**"),
        "'" | ".'" => ("R5", ".T"),
        _ => return None,
    })
}

fn convert_comment(text: &str) -> String {
    match text.strip_prefix("%%") {
        Some(rest) => format!("# %%{rest}"),
        None => format!("#{}", &text[1..]),
    }
}

fn is_sig(t: &Token) -> bool {
    !matches!(t.kind, TokenKind::Whitespace | TokenKind::Newline)
}

fn is(t: &Token, kind: TokenKind, text: &str) -> bool {
    t.kind == kind && t.text == text
}

/// Index just past the bracket closing the one at `open`, if any.
fn matching_close(tokens: &[&Token], open: usize) -> Option<usize> {
    let mut depth = 0usize;
    for (i, t) in tokens.iter().enumerate().skip(open) {
        if t.kind != TokenKind::Punct {
            continue;
        }
        match t.text.as_str() {
            "(" | "[" | "{" => depth += 1,
            ")" | "]" | "}" => {
                depth = depth.saturating_sub(1);
                if depth == 0 {
                    return Some(i);
                }
            }
            _ => {}
        }
    }
    None
}

struct Converter {
    out: String,
    report: Vec<RuleApplication>,
    known_arrays: HashSet<String>,
}

impl Converter {
    fn record(&mut self, rule: &'static str, line: usize, before: &str, after: &str, note: Option<&'static str>) {
        self.report.push(RuleApplication {
            rule,
            line,
            before: before.to_string(),
            after: after.to_string(),
            note,
        });
    }

    /// One logical line, including its final newline token if any.
    fn line(&mut self, tokens: &[Token]) {
        let (body, newline) = match tokens.split_last() {
            Some((last, body)) if last.kind == TokenKind::Newline => (body, last.text.as_str()),
            _ => (tokens, ""),
        };
        let last_sig = body.iter().rposition(is_sig);
        let (code, comment) = match last_sig {
            Some(i) if body[i].kind == TokenKind::Comment => (&body[..i], Some(&body[i])),
            _ => (body, None),
        };
        let sig: Vec<&Token> = code.iter().filter(|t| is_sig(t)).collect();

        let converted_comment = comment.map(|c| {
            let text = convert_comment(&c.text);
            self.record("R1", c.line, &c.text, &text, None);
            text
        });

        if sig.is_empty() {
            for t in code {
                self.out.push_str(&t.text);
            }
            if let Some(c) = &converted_comment {
                self.out.push_str(c);
            }
            self.out.push_str(newline);
            return;
        }

        let indent = match code.first() {
            Some(t) if t.kind == TokenKind::Whitespace => t.text.as_str(),
            _ => "",
        };

        let standalone_end = is(sig[0], TokenKind::Ident, "end")
            && (sig.len() == 1 || (sig.len() == 2 && matches!(sig[1].text.as_str(), ";" | ",")));
        if standalone_end {
            self.record("R3", sig[0].line, "end", "", Some("standalone end deleted"));
            if let Some(c) = &converted_comment {
                let _ = write!(self.out, "{indent}{c}{newline}");
            }
            return;
        }

        let mut pieces = self.map_tokens(code);
        let mut trim = converted_comment.is_some();

        // R6
        let last = code.iter().rposition(is_sig).expect("non-empty");
        if is(&code[last], TokenKind::Punct, ";") {
            pieces[last].clear();
            self.record("R6", code[last].line, ";", "", None);
            trim = true;
        }

        let mut text = match self.block_header(code, &pieces, indent) {
            Some(header) => header,
            None => join(code, &pieces),
        };
        if trim {
            text.truncate(text.trim_end_matches([' ', '\t']).len());
        }

        self.note_array_definition(&sig);

        self.out.push_str(&text);
        if let Some(c) = &converted_comment {
            let _ = write!(self.out, "  {c}");
        }
        self.out.push_str(newline);
    }

    /// Token-level rules; one output piece per token.
    fn map_tokens(&mut self, code: &[Token]) -> Vec<String> {
        let mut pieces = Vec::with_capacity(code.len());
        for (i, t) in code.iter().enumerate() {
            let prev = i.checked_sub(1).map(|p| &code[p]);
            let next = code.get(i + 1);
            let piece = match t.kind {
                TokenKind::Ident => {
                    let is_call = next.is_some_and(|n| is(n, TokenKind::Punct, "("));
                    let is_field = prev.is_some_and(|p| is(p, TokenKind::Op, "."));
                    if is_call && !is_field && self.known_arrays.contains(&t.text) {
                        self.record(NOTE, t.line, &format!("{}(", t.text), &format!("{}(", t.text), Some("1-based index kept"));
                    }
                    match call_rename(&t.text) {
                        Some(new) if is_call && !is_field => {
                            self.record("R7", t.line, &t.text, new, None);
                            new.to_string()
                        }
                        _ => t.text.clone(),
                    }
                }
                TokenKind::Op => match operator_rewrite(&t.text) {
                    Some((rule, new)) => {
                        let mut piece = new.to_string();
                        if new == "and" || new == "or" {
                            if prev.is_some_and(|p| p.kind != TokenKind::Whitespace) {
                                piece.insert(0, ' ');
                            }
                            if next.is_some_and(|n| n.kind != TokenKind::Whitespace) {
                                piece.push(' ');
                            }
                        }
                        self.record(rule, t.line, &t.text, new, None);
                        piece
                    }
                    None => t.text.clone(),
                },
                TokenKind::Continuation => {
                    let rest = t.text[3..].trim();
                    let piece = match rest {
                        "" => " \\".to_string(),
                        r if r.starts_with('%') => format!(" \\  {}", convert_comment(r)),
                        r => format!(" \\  # {r}"),
                    };
                    self.record("R2", t.line, &t.text, piece.trim_start(), None);
                    piece
                }
                _ => t.text.clone(),
            };
            pieces.push(piece);
        }
        pieces
    }

    /// R3 rewrites of if/while/elseif/else/for/function lines.
    fn block_header(&mut self, code: &[Token], pieces: &[String], indent: &str) -> Option<String> {
        let sig: Vec<usize> = (0..code.len()).filter(|&i| is_sig(&code[i])).collect();
        let first = &code[sig[0]];
        if first.kind != TokenKind::Ident {
            return None;
        }
        let before = join(code, &code.iter().map(|t| t.text.clone()).collect::<Vec<_>>());
        let before = before.trim();
        let header = match first.text.as_str() {
            "if" | "while" | "elseif" => {
                let mut p = pieces.to_vec();
                if first.text == "elseif" {
                    p[sig[0]] = "elif".into();
                }
                let mut text = join(code, &p);
                text.truncate(text.trim_end_matches([' ', '\t']).len());
                text.push(':');
                text
            }
            "else" => {
                let mut p = pieces.to_vec();
                p[sig[0]] = "else:".into();
                join(code, &p)
            }
            "for" => return self.for_header(code, pieces, &sig, indent, before),
            "function" => return self.function_header(code, pieces, &sig, indent, before),
            _ => return None,
        };
        self.record("R3", first.line, before, header.trim(), None);
        Some(header)
    }

    fn for_header(
        &mut self,
        code: &[Token],
        pieces: &[String],
        sig: &[usize],
        indent: &str,
        before: &str,
    ) -> Option<String> {
        let toks: Vec<&Token> = sig.iter().map(|&i| &code[i]).collect();
        let mut lo = 1;
        let mut hi = sig.len();
        if toks.get(1).is_some_and(|t| is(t, TokenKind::Punct, "(")) && matching_close(&toks, 1) == Some(hi - 1) {
            lo = 2;
            hi -= 1;
        }
        if hi < lo + 3 || toks[lo].kind != TokenKind::Ident || !is(toks[lo + 1], TokenKind::Op, "=") {
            return None;
        }
        let var = &toks[lo].text;
        // Expression pieces between `=` and the end, split on top-level colons.
        let (from, to) = (sig[lo + 1] + 1, sig[hi - 1] + 1);
        let mut parts = vec![String::new()];
        let mut depth = 0i32;
        for i in from..to {
            let t = &code[i];
            if t.kind == TokenKind::Punct {
                match t.text.as_str() {
                    "(" | "[" | "{" => depth += 1,
                    ")" | "]" | "}" => depth -= 1,
                    _ => {}
                }
            }
            if depth == 0 && is(t, TokenKind::Op, ":") {
                parts.push(String::new());
            } else {
                push_piece(parts.last_mut().expect("non-empty"), code, i, &pieces[i]);
            }
        }
        let parts: Vec<&str> = parts.iter().map(|p| p.trim()).collect();
        if parts.iter().any(|p| p.is_empty()) {
            return None;
        }
        let (iter, note) = match parts.as_slice() {
            [a, b] => (format!("range({a}, {b} + 1)"), None),
            [a, step, c] => (format!("range({a}, {c} + 1, {step})"), Some("stride loop")),
            [expr] => (expr.to_string(), None),
            _ => return None,
        };
        let header = format!("{indent}for {var} in {iter}:");
        self.record("R3", code[sig[0]].line, before, header.trim(), note);
        Some(header)
    }

    fn function_header(
        &mut self,
        code: &[Token],
        pieces: &[String],
        sig: &[usize],
        indent: &str,
        before: &str,
    ) -> Option<String> {
        let toks: Vec<&Token> = sig.iter().map(|&i| &code[i]).collect();
        let paren = toks.iter().position(|t| is(t, TokenKind::Punct, "(")).unwrap_or(toks.len());
        let (outputs, name_at) = match toks[..paren].iter().position(|t| is(t, TokenKind::Op, "=")) {
            Some(eq) => {
                let outs: Vec<&str> = toks[1..eq]
                    .iter()
                    .filter(|t| t.kind == TokenKind::Ident)
                    .map(|t| t.text.as_str())
                    .collect();
                (outs, eq + 1)
            }
            None => (Vec::new(), 1),
        };
        let name = toks.get(name_at).filter(|t| t.kind == TokenKind::Ident)?;
        let params = if paren == name_at + 1 && paren < toks.len() {
            let close = matching_close(&toks, paren)?;
            if close + 1 != toks.len() {
                return None;
            }
            let mut text = String::new();
            for (i, piece) in pieces.iter().enumerate().take(sig[close]).skip(sig[paren] + 1) {
                push_piece(&mut text, code, i, piece);
            }
            text.trim().to_string()
        } else if name_at + 1 == toks.len() {
            String::new()
        } else {
            return None;
        };
        let mut header = format!("{indent}def {}({params}):", name.text);
        if !outputs.is_empty() {
            let _ = write!(header, "  # mat2py: returns {}", outputs.join(", "));
        }
        self.record("R3", code[sig[0]].line, before, header.trim(), None);
        Some(header)
    }

    /// `name = zeros(...)`, `ones`, `linspace` or `[...]` marks an array.
    fn note_array_definition(&mut self, sig: &[&Token]) {
        if sig.len() < 3 || sig[0].kind != TokenKind::Ident || !is(sig[1], TokenKind::Op, "=") {
            return;
        }
        let rhs = sig[2];
        let is_array = is(rhs, TokenKind::Punct, "[")
            || (rhs.kind == TokenKind::Ident
                && ARRAY_CONSTRUCTORS.contains(&rhs.text.as_str())
                && sig.get(3).is_some_and(|t| is(t, TokenKind::Punct, "(")));
        if is_array {
            self.known_arrays.insert(sig[0].text.clone());
        } else {
            self.known_arrays.remove(&sig[0].text);
        }
    }
}

/// Appends a piece; avoids gluing a `.` to a following `*` and trims the
/// space before an inserted continuation backslash.
fn push_piece(out: &mut String, code: &[Token], i: usize, piece: &str) {
    if code[i].kind == TokenKind::Continuation {
        out.truncate(out.trim_end_matches([' ', '\t']).len());
    } else if out.ends_with('.') && piece.starts_with('*') {
        out.push(' ');
    }
    out.push_str(piece);
}

fn join(code: &[Token], pieces: &[String]) -> String {
    let mut out = String::new();
    for (i, piece) in pieces.iter().enumerate() {
        push_piece(&mut out, code, i, piece);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<(TokenKind, String)> {
        tokenize(src).unwrap().into_iter().map(|t| (t.kind, t.text)).collect()
    }

    #[test]
    fn transpose_versus_string() {
        use TokenKind::*;
        assert_eq!(
            kinds("x' % t"),
            [(Ident, "x".into()), (Op, "'".into()), (Whitespace, " ".into()), (Comment, "% t".into())]
        );
        assert_eq!(kinds("s = 'a%b'")[4], (MString, "'a%b'".into()));
        assert!(!kinds("s = 'a%b'").iter().any(|(k, _)| *k == Comment));
        assert_eq!(kinds("a(1)'")[4], (Op, "'".into()));
        assert_eq!(kinds("[a 'b']")[3], (MString, "'b'".into()));
        assert_eq!(kinds("'it''s'"), [(MString, "'it''s'".into())]);
    }

    #[test]
    fn unterminated() {
        assert_eq!(tokenize("y = 'abc"), Err(Mat2PyError::UnterminatedString { line: 1, col: 5 }));
        assert_eq!(
            tokenize("a\ny = \"x\nz"),
            Err(Mat2PyError::UnterminatedString { line: 2, col: 5 })
        );
    }

    #[test]
    fn numbers_and_ops() {
        use TokenKind::*;
        assert_eq!(kinds("3.*x")[..2], [(Number, "3".into()), (Op, ".*".into())]);
        assert_eq!(kinds("1.5e-3i")[0], (Number, "1.5e-3i".into()));
        assert_eq!(kinds(".5")[0], (Number, ".5".into()));
        assert_eq!(kinds("a ... note\nb")[2], (Continuation, "... note".into()));
    }

    #[test]
    fn positions() {
        let toks = tokenize("a\r\n  b").unwrap();
        assert_eq!((toks[3].line, toks[3].col), (2, 3));
    }

    #[test]
    fn documented_examples() {
        assert_eq!(convert("x = 3; % init").unwrap(), "x = 3  # init");
        assert_eq!(convert("for k = 1:n\n").unwrap(), "for k in range(1, n + 1):\n");
        assert_eq!(convert("if a ~= b && c\n").unwrap(), "if a != b and c:\n");
    }

    #[test]
    fn report_examples() {
        let r = convert_report("x = 3;").unwrap();
        assert_eq!(r.text, "x = 3");
        assert_eq!(r.report.iter().map(|a| (a.rule, a.line)).collect::<Vec<_>>(), [("R6", 1)]);
        let r = convert_report("% a\n%% b\n").unwrap();
        assert_eq!(r.text, "# a\n# %% b\n");
        assert_eq!(r.report.iter().map(|a| (a.rule, a.line)).collect::<Vec<_>>(), [("R1", 1), ("R1", 2)]);
        let r = convert_report("").unwrap();
        assert_eq!((r.text.as_str(), r.report.len()), ("", 0));
    }

    #[test]
    fn headers() {
        assert_eq!(
            convert("function [a, b] = f(x, y)\n").unwrap(),
            "def f(x, y):  # mat2py: returns a, b\n"
        );
        assert_eq!(convert("function g\n").unwrap(), "def g():\n");
        assert_eq!(convert("for i = 1:2:n\n").unwrap(), "for i in range(1, n + 1, 2):\n");
        assert_eq!(convert("for v = vals\n").unwrap(), "for v in vals:\n");
        assert_eq!(convert("elseif x\nelse\n").unwrap(), "elif x:\nelse:\n");
        assert_eq!(convert("  end % done\nend\n").unwrap(), "  # done\n");
    }

    #[test]
    fn strings_untouched() {
        assert_eq!(convert("s = 'a ~= b && c';").unwrap(), "s = 'a ~= b && c'");
        assert_eq!(convert("disp(x')").unwrap(), "print(x.T)");
        assert_eq!(convert("y = a..^2").unwrap(), "y = a. **2");
    }

    #[test]
    fn array_index_notes() {
        let r = convert_report("a = zeros(3);\nb = a(1);\nc.a(2)\n").unwrap();
        let notes: Vec<_> = r.report.iter().filter(|a| a.rule == NOTE).map(|a| a.line).collect();
        assert_eq!(notes, [2]);
    }
}
