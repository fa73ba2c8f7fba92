//! Plain-text word lists.
//!
//! Format: `#` starts a comment (full line or trailing), blank lines are
//! skipped, the first content line is a `group: <spec>` header naming the
//! presentation, and every later line is one word, optionally preceded by a
//! whitespace-separated coefficient token for weighted lists:
//!
//! ```text
//! # Kesten walk operator on the free group of rank 2
//! group: Z,Z
//! a
//! A
//! 1/2 b
//! ```
//!
//! Coefficient tokens are kept as raw strings here; weighted consumers parse
//! them into their own scalar type.

use super::{GroupPresentation, ReducedWord, WordError};

/// One line of a word list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordListEntry {
    pub word: ReducedWord,
    /// Raw coefficient token, absent for plain lists.
    pub coefficient: Option<String>,
}

/// A parsed word list: the header presentation plus one entry per line.
#[derive(Debug, Clone)]
pub struct WordList {
    pub presentation: GroupPresentation,
    pub entries: Vec<WordListEntry>,
}

impl WordList {
    /// The bare words, in file order.
    pub fn words(&self) -> Vec<ReducedWord> {
        self.entries.iter().map(|e| e.word.clone()).collect()
    }

    pub fn has_coefficients(&self) -> bool {
        self.entries.iter().any(|e| e.coefficient.is_some())
    }
}

/// Splits a leading coefficient token off a word line.
///
/// A first whitespace-separated field counts as a coefficient when it could
/// never be word syntax: it contains a digit, or is a bare imaginary unit.
/// Word syntax is letters and whitespace only, so the rule is unambiguous.
fn split_coefficient(line: &str) -> (Option<String>, &str) {
    if let Some((first, rest)) = line.split_once(char::is_whitespace) {
        let looks_numeric =
            first.contains(|c: char| c.is_ascii_digit()) || matches!(first, "i" | "-i" | "+i");
        if looks_numeric {
            return (Some(first.to_string()), rest.trim());
        }
    }
    (None, line)
}

/// Parses word-list text. The word section may be empty only in the sense
/// that an all-comment file is rejected as [`WordError::EmptyWordList`].
pub fn parse_word_list(text: &str) -> Result<WordList, WordError> {
    let mut presentation: Option<GroupPresentation> = None;
    let mut entries = Vec::new();
    for raw_line in text.lines() {
        let line = match raw_line.split_once('#') {
            Some((before, _)) => before,
            None => raw_line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        match &presentation {
            None => {
                let spec = line
                    .strip_prefix("group:")
                    .ok_or(WordError::MissingGroupHeader)?
                    .trim();
                presentation = Some(GroupPresentation::parse(spec)?);
            }
            Some(pres) => {
                let (coefficient, word_text) = split_coefficient(line);
                let word = pres.parse_word_token(word_text)?;
                entries.push(WordListEntry { word, coefficient });
            }
        }
    }
    let presentation = presentation.ok_or(WordError::EmptyWordList)?;
    if entries.is_empty() {
        return Err(WordError::EmptyWordSet);
    }
    Ok(WordList { presentation, entries })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_plain_list() {
        let text = "\
# walk generators
group: Z,Z

a   # forward
A
b
B
";
        let list = parse_word_list(text).unwrap();
        assert_eq!(list.presentation.spec_string(), "Z,Z");
        assert_eq!(list.entries.len(), 4);
        assert!(!list.has_coefficients());
        assert_eq!(list.presentation.render(&list.entries[1].word), "A");
    }

    #[test]
    fn parses_coefficients_and_identity_lines() {
        let text = "group: Z\n1/2 a\n-1 A\n1\ni aa\n";
        let list = parse_word_list(text).unwrap();
        assert_eq!(list.entries[0].coefficient.as_deref(), Some("1/2"));
        assert_eq!(list.entries[1].coefficient.as_deref(), Some("-1"));
        assert!(list.entries[2].word.is_identity());
        assert_eq!(list.entries[2].coefficient, None);
        assert_eq!(list.entries[3].coefficient.as_deref(), Some("i"));
        assert!(list.has_coefficients());
    }

    #[test]
    fn words_with_spaces_are_not_coefficients() {
        let text = "group: Z,Z\na b a\n";
        let list = parse_word_list(text).unwrap();
        assert_eq!(list.presentation.render(&list.entries[0].word), "aba");
    }

    #[test]
    fn header_and_error_handling() {
        assert!(matches!(parse_word_list(""), Err(WordError::EmptyWordList)));
        assert!(matches!(parse_word_list("# only comments\n"), Err(WordError::EmptyWordList)));
        assert!(matches!(parse_word_list("a\nb\n"), Err(WordError::MissingGroupHeader)));
        assert!(matches!(parse_word_list("group: Z\n"), Err(WordError::EmptyWordSet)));
        assert!(parse_word_list("group: Q\na\n").is_err());
        assert!(parse_word_list("group: Z\nx\n").is_err());
    }
}
