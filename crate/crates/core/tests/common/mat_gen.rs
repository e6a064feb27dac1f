//! Token soups for the Matlab converter.

use proptest::prelude::*;

/// Code text of a converted file: strings and `#` comments blanked out.
pub fn code_only(text: &str) -> String {
    let mut out = String::new();
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '#' => {
                while chars.peek().is_some_and(|&c| c != '\n' && c != '\r') {
                    chars.next();
                }
                out.push(' ');
            }
            '\'' | '"' => {
                while let Some(d) = chars.next() {
                    if d == c {
                        if chars.peek() == Some(&c) {
                            chars.next();
                        } else {
                            break;
                        }
                    }
                }
                out.push(' ');
            }
            c => out.push(c),
        }
    }
    out
}

pub const VOCAB: &[&str] = &[
    "a", "b1", "x", "3", "2.5", "(", ")", "[", "]", ";", ",", "'s%t'", "\"q&&r\"", "% c ~= d", "~=", "&&", "||", ".*",
    "./", ".^", "^", "'", ".'", "=", "==", ":", "...", "\n", "end", "if", "for", "while", "else", "elseif",
    "function", "disp", "length", "zeros", ".", "%% x",
];

pub fn soup() -> impl Strategy<Value = String> {
    prop::collection::vec((prop::sample::select(VOCAB), prop::sample::select(&["", " ", "  "][..])), 0..30)
        .prop_map(|parts| parts.into_iter().map(|(t, s)| format!("{t}{s}")).collect())
}
