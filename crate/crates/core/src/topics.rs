//! Speaking prompts in the style of language exams, one bank per
//! deployment, one JSON object per line.

use std::collections::HashSet;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::text::LanguageTag;

const BUILTIN_BANK: &str = include_str!("../data/prompts.jsonl");

#[derive(Debug, Error)]
pub enum TopicError {
    #[error("cannot read prompt bank {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: duplicate prompt id {id:?}")]
    DuplicateId { line: usize, id: String },
    #[error("no prompts for language {0}")]
    NoPrompts(LanguageTag),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prompt {
    pub id: String,
    pub lang: LanguageTag,
    pub category: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptBank {
    prompts: Vec<Prompt>,
}

impl PromptBank {
    /// Parses JSONL and checks that ids are unique and that every language
    /// in `langs` has at least one prompt. Blank lines are skipped.
    pub fn parse(body: &str, langs: &[LanguageTag]) -> Result<Self, TopicError> {
        let mut prompts: Vec<Prompt> = Vec::new();
        let mut ids = HashSet::new();
        for (i, line) in body.lines().enumerate() {
            let line_no = i + 1;
            if line.trim().is_empty() {
                continue;
            }
            let prompt: Prompt = serde_json::from_str(line)
                .map_err(|e| TopicError::Parse { line: line_no, message: e.to_string() })?;
            if prompt.id.trim().is_empty() || prompt.text.trim().is_empty() {
                return Err(TopicError::Parse { line: line_no, message: "empty id or text".into() });
            }
            if !ids.insert(prompt.id.clone()) {
                return Err(TopicError::DuplicateId { line: line_no, id: prompt.id });
            }
            prompts.push(prompt);
        }
        if let Some(&lang) = langs.iter().find(|&&l| !prompts.iter().any(|p| p.lang == l)) {
            return Err(TopicError::NoPrompts(lang));
        }
        Ok(PromptBank { prompts })
    }

    /// The bank shipped with the crate.
    pub fn builtin() -> Self {
        PromptBank::parse(BUILTIN_BANK, &LanguageTag::ALL).expect("shipped prompt bank is valid")
    }

    pub fn prompts(&self) -> &[Prompt] {
        &self.prompts
    }

    pub fn len(&self) -> usize {
        self.prompts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prompts.is_empty()
    }

    pub fn for_language(&self, lang: LanguageTag) -> impl Iterator<Item = &Prompt> + '_ {
        self.prompts.iter().filter(move |p| p.lang == lang)
    }
}

pub fn load_bank(path: &Path, langs: &[LanguageTag]) -> Result<PromptBank, TopicError> {
    let body = std::fs::read_to_string(path)
        .map_err(|source| TopicError::Io { path: path.display().to_string(), source })?;
    PromptBank::parse(&body, langs)
}

/// Uniform choice among the bank's prompts for `lang`. A seed makes the
/// choice repeatable; without one the thread RNG is used.
pub fn random_prompt(bank: &PromptBank, lang: LanguageTag, seed: Option<u64>) -> Result<&Prompt, TopicError> {
    let candidates: Vec<&Prompt> = bank.for_language(lang).collect();
    if candidates.is_empty() {
        return Err(TopicError::NoPrompts(lang));
    }
    let index = match seed {
        Some(s) => ChaCha8Rng::seed_from_u64(s).random_range(0..candidates.len()),
        None => rand::rng().random_range(0..candidates.len()),
    };
    Ok(candidates[index])
}
