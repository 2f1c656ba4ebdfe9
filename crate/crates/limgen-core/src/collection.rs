//! Collections of languages and their line-oriented text format.
//!
//! A collection is either an explicit list of named symbolic languages, or
//! the intensional column family: every nonempty union of whole columns,
//! kept as a rule rather than as stored languages.
//!
//! File format (UTF-8, `#` starts a comment, blank lines ignored):
//!
//! ```text
//! collection <name>
//! family explicit | family columns
//! language <name>
//! blocks <c> <c> ...
//! add (<c>,<k>) ...      # optional
//! remove (<c>,<k>) ...   # optional
//! end
//! ```
//!
//! Serialization emits every list in ascending order with single spaces and
//! no trailing spaces, so `parse(serialize(c)) == c`.

use std::fmt::Write as _;

use crate::error::Error;
use crate::lang::SymbolicLanguage;
use crate::universe::Element;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedLanguage {
    pub name: String,
    pub language: SymbolicLanguage,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Collection {
    Explicit {
        name: String,
        languages: Vec<NamedLanguage>,
    },
    /// All nonempty unions of columns.
    ColumnFamily { name: String },
}

impl Collection {
    /// An explicit collection; rejects empty lists, duplicate names, and two
    /// names denoting the same set (canonical forms are compared).
    pub fn explicit(
        name: impl Into<String>,
        languages: Vec<NamedLanguage>,
    ) -> Result<Collection, Error> {
        if languages.is_empty() {
            return Err(Error::EmptyCollection);
        }
        for (i, a) in languages.iter().enumerate() {
            for b in &languages[i + 1..] {
                if a.name == b.name {
                    return Err(Error::DuplicateName(a.name.clone()));
                }
                if a.language == b.language {
                    return Err(Error::DuplicateDenotation(a.name.clone(), b.name.clone()));
                }
            }
        }
        Ok(Collection::Explicit {
            name: name.into(),
            languages,
        })
    }

    pub fn column_family(name: impl Into<String>) -> Collection {
        Collection::ColumnFamily { name: name.into() }
    }

    pub fn name(&self) -> &str {
        match self {
            Collection::Explicit { name, .. } => name,
            Collection::ColumnFamily { name } => name,
        }
    }

    pub fn is_column_family(&self) -> bool {
        matches!(self, Collection::ColumnFamily { .. })
    }

    pub fn explicit_languages(&self) -> Option<&[NamedLanguage]> {
        match self {
            Collection::Explicit { languages, .. } => Some(languages),
            Collection::ColumnFamily { .. } => None,
        }
    }

    pub fn language(&self, name: &str) -> Option<&NamedLanguage> {
        self.explicit_languages()?
            .iter()
            .find(|nl| nl.name == name)
    }

    pub fn parse(text: &str) -> Result<Collection, Error> {
        Parser::new(text).run()
    }

    pub fn serialize(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "collection {}", self.name());
        match self {
            Collection::ColumnFamily { .. } => {
                out.push_str("family columns\n");
            }
            Collection::Explicit { languages, .. } => {
                out.push_str("family explicit\n");
                for nl in languages {
                    let _ = writeln!(out, "language {}", nl.name);
                    out.push_str("blocks");
                    for c in nl.language.blocks() {
                        let _ = write!(out, " {c}");
                    }
                    out.push('\n');
                    if !nl.language.adds().is_empty() {
                        out.push_str("add");
                        for e in nl.language.adds() {
                            let _ = write!(out, " {e}");
                        }
                        out.push('\n');
                    }
                    if !nl.language.removes().is_empty() {
                        out.push_str("remove");
                        for e in nl.language.removes() {
                            let _ = write!(out, " {e}");
                        }
                        out.push('\n');
                    }
                    out.push_str("end\n");
                }
            }
        }
        out
    }
}

struct Parser<'a> {
    lines: Vec<(usize, &'a str)>,
    pos: usize,
}

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Parser<'a> {
        let lines = text
            .lines()
            .enumerate()
            .map(|(i, raw)| {
                let no_comment = match raw.find('#') {
                    Some(at) => &raw[..at],
                    None => raw,
                };
                (i + 1, no_comment.trim())
            })
            .filter(|(_, line)| !line.is_empty())
            .collect();
        Parser { lines, pos: 0 }
    }

    fn next_line(&mut self) -> Option<(usize, &'a str)> {
        let item = self.lines.get(self.pos).copied();
        self.pos += 1;
        item
    }

    fn peek(&self) -> Option<(usize, &'a str)> {
        self.lines.get(self.pos).copied()
    }

    fn last_line_number(&self) -> usize {
        self.lines.last().map_or(0, |(n, _)| *n)
    }

    fn run(mut self) -> Result<Collection, Error> {
        let (line, header) = self
            .next_line()
            .ok_or_else(|| err(0, "empty collection file"))?;
        let name = header
            .strip_prefix("collection ")
            .map(str::trim)
            .filter(|n| !n.is_empty() && !n.contains(char::is_whitespace))
            .ok_or_else(|| err(line, "expected `collection <name>`"))?;

        let (line, family) = self
            .next_line()
            .ok_or_else(|| err(line, "expected `family explicit` or `family columns`"))?;
        match family {
            "family columns" => {
                if let Some((extra, _)) = self.peek() {
                    return Err(err(extra, "column family takes no language bodies"));
                }
                Ok(Collection::column_family(name))
            }
            "family explicit" => {
                let mut languages = Vec::new();
                while self.peek().is_some() {
                    languages.push(self.language_body()?);
                }
                if languages.is_empty() {
                    return Err(err(line, "explicit family needs at least one language"));
                }
                Collection::explicit(name, languages).map_err(|e| match e {
                    Error::DuplicateName(n) => {
                        err(self.last_line_number(), format!("duplicate language name: {n}"))
                    }
                    Error::DuplicateDenotation(a, b) => err(
                        self.last_line_number(),
                        format!("languages {a} and {b} denote the same set"),
                    ),
                    other => other,
                })
            }
            _ => Err(err(line, "expected `family explicit` or `family columns`")),
        }
    }

    fn language_body(&mut self) -> Result<NamedLanguage, Error> {
        let (line, lang_line) = self.next_line().expect("caller checked peek");
        let name = lang_line
            .strip_prefix("language ")
            .map(str::trim)
            .filter(|n| !n.is_empty() && !n.contains(char::is_whitespace))
            .ok_or_else(|| err(line, "expected `language <name>`"))?;

        let (line, blocks_line) = self
            .next_line()
            .ok_or_else(|| err(line, "expected `blocks <c> ...`"))?;
        let blocks_body = blocks_line
            .strip_prefix("blocks")
            .ok_or_else(|| err(line, "expected `blocks <c> ...`"))?;
        let mut blocks = Vec::new();
        for tok in blocks_body.split_whitespace() {
            let c: u32 = tok
                .parse()
                .map_err(|_| err(line, format!("bad column index: {tok}")))?;
            blocks.push(c);
        }
        if blocks.is_empty() {
            return Err(err(line, "finite language not permitted: blocks is empty"));
        }

        let mut adds = Vec::new();
        let mut removes = Vec::new();
        let mut saw_add = false;
        let mut saw_remove = false;
        loop {
            let (line, body) = self
                .next_line()
                .ok_or_else(|| err(self.last_line_number(), "expected `end`"))?;
            if body == "end" {
                let language = SymbolicLanguage::new(blocks, adds, removes)
                    .map_err(|_| err(line, "finite language not permitted"))?;
                return Ok(NamedLanguage {
                    name: name.to_string(),
                    language,
                });
            } else if let Some(rest) = body.strip_prefix("add ") {
                if saw_add {
                    return Err(err(line, "repeated `add` line"));
                }
                saw_add = true;
                adds = parse_elements(line, rest)?;
            } else if let Some(rest) = body.strip_prefix("remove ") {
                if saw_remove {
                    return Err(err(line, "repeated `remove` line"));
                }
                saw_remove = true;
                removes = parse_elements(line, rest)?;
            } else {
                return Err(err(line, format!("unexpected line: {body}")));
            }
        }
    }
}

fn parse_elements(line: usize, body: &str) -> Result<Vec<Element>, Error> {
    let mut out = Vec::new();
    for tok in body.split_whitespace() {
        let e: Element = tok
            .parse()
            .map_err(|_| err(line, format!("bad element: {tok}")))?;
        out.push(e);
    }
    Ok(out)
}

/// Parses a flag-style element list such as `"(0,2) (1,0)"`.
pub fn parse_element_list(text: &str) -> Result<Vec<Element>, Error> {
    text.split_whitespace().map(|tok| tok.parse()).collect()
}
