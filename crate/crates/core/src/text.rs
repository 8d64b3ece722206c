//! Tokenization and the transcript types shared by every other module.
//!
//! Tokens are whitespace-delimited words with leading and trailing
//! punctuation split off into one token per mark. Punctuation tokens are
//! never labeled and never counted. A word may keep trailing hyphens
//! (`wa-`), which is the truncation marker for abandoned words.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unsupported language code {0:?} (expected one of: en, hi)")]
pub struct UnsupportedLanguage(pub String);

/// One of the two supported utterance languages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LanguageTag {
    En,
    Hi,
}

impl LanguageTag {
    pub const ALL: [LanguageTag; 2] = [LanguageTag::En, LanguageTag::Hi];

    pub fn code(self) -> &'static str {
        match self {
            LanguageTag::En => "en",
            LanguageTag::Hi => "hi",
        }
    }
}

impl fmt::Display for LanguageTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for LanguageTag {
    type Err = UnsupportedLanguage;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "en" => Ok(LanguageTag::En),
            "hi" => Ok(LanguageTag::Hi),
            other => Err(UnsupportedLanguage(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub text: String,
    pub index: usize,
    /// `false` for split-off punctuation marks.
    #[serde(rename = "word")]
    pub is_word: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub tokens: Vec<Token>,
    pub lang: LanguageTag,
    pub raw_text: String,
}

impl Transcript {
    /// Builds a transcript whose tokens are all words, bypassing punctuation
    /// splitting. Used for pre-tokenized corpora.
    pub fn from_words<S: AsRef<str>>(words: &[S], lang: LanguageTag) -> Self {
        let tokens = words
            .iter()
            .enumerate()
            .map(|(index, w)| Token { text: w.as_ref().to_string(), index, is_word: true })
            .collect::<Vec<_>>();
        let raw_text = words.iter().map(|w| w.as_ref()).collect::<Vec<_>>().join(" ");
        Transcript { tokens, lang, raw_text }
    }

    pub fn words(&self) -> impl Iterator<Item = &Token> + '_ {
        self.tokens.iter().filter(|t| t.is_word)
    }

    pub fn word_count(&self) -> usize {
        self.words().count()
    }

    pub fn word_texts(&self) -> Vec<&str> {
        self.words().map(|t| t.text.as_str()).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

const EXTRA_PUNCTUATION: &[char] = &[
    '\u{0964}', // devanagari danda
    '\u{0965}', // double danda
    '\u{2018}', '\u{2019}', '\u{201C}', '\u{201D}', '\u{00AB}', '\u{00BB}', '\u{2026}', '\u{2013}',
    '\u{2014}', '\u{00BF}', '\u{00A1}', '\u{3001}', '\u{3002}', '\u{FF0C}', '\u{FF01}', '\u{FF1F}',
];

/// Characters split off the edges of whitespace-delimited runs.
pub fn is_punctuation(c: char) -> bool {
    c.is_ascii_punctuation() || EXTRA_PUNCTUATION.contains(&c)
}

/// Splits `text` into word and punctuation tokens. Total over all input.
pub fn tokenize(text: &str, lang: LanguageTag) -> Transcript {
    let mut tokens = Vec::new();
    let push = |text: &str, is_word: bool, tokens: &mut Vec<Token>| {
        let index = tokens.len();
        tokens.push(Token { text: text.to_string(), index, is_word });
    };

    for run in text.split_whitespace() {
        let Some(core_start) = run.find(|c: char| !is_punctuation(c)) else {
            for (i, c) in run.char_indices() {
                push(&run[i..i + c.len_utf8()], false, &mut tokens);
            }
            continue;
        };
        let last = run.char_indices().rev().find(|&(_, c)| !is_punctuation(c)).unwrap();
        let mut core_end = last.0 + last.1.len_utf8();
        // trailing hyphens stay on the word as a truncation marker
        core_end += run[core_end..].chars().take_while(|&c| c == '-').count();

        for (i, c) in run[..core_start].char_indices() {
            push(&run[i..i + c.len_utf8()], false, &mut tokens);
        }
        push(&run[core_start..core_end], true, &mut tokens);
        for (i, c) in run[core_end..].char_indices() {
            let at = core_end + i;
            push(&run[at..at + c.len_utf8()], false, &mut tokens);
        }
    }

    Transcript { tokens, lang, raw_text: text.to_string() }
}

/// Joins words with single spaces and attaches punctuation to whatever
/// precedes it.
pub fn detokenize(transcript: &Transcript) -> String {
    join_tokens(transcript.tokens.iter().map(|t| (t.text.as_str(), t.is_word)))
}

pub(crate) fn join_tokens<'a>(tokens: impl Iterator<Item = (&'a str, bool)>) -> String {
    let mut out = String::new();
    let mut prev_word = false;
    for (text, is_word) in tokens {
        if !out.is_empty() {
            // a hyphen glued onto a word would be re-read as a truncation marker
            let glue = !is_word && !(prev_word && text.starts_with('-'));
            if !glue {
                out.push(' ');
            }
        }
        out.push_str(text);
        prev_word = is_word;
    }
    out
}
