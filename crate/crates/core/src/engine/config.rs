use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::text::LanguageTag;

pub const DEFAULT_MAX_REPEAT_NGRAM: usize = 5;
pub const DEFAULT_FALSE_START_WINDOW: usize = 5;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("no lexicon configured for language {0}")]
    UnsupportedLanguage(LanguageTag),
    #[error("{list} lexicon for {lang} is empty")]
    EmptyLexicon { lang: LanguageTag, list: &'static str },
    #[error("{path}:{line}: {reason}")]
    InvalidEntry { path: String, line: usize, reason: String },
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Lexicons for a single language.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LanguageLexicon {
    fillers: BTreeSet<String>,
    ambiguous_fillers: BTreeSet<String>,
    /// Each term split into lowercase words, longest first.
    editing_terms: Vec<Vec<String>>,
}

impl LanguageLexicon {
    pub fn new(
        lang: LanguageTag,
        fillers: impl IntoIterator<Item = String>,
        editing_terms: impl IntoIterator<Item = String>,
    ) -> Result<Self, ConfigError> {
        let fillers: BTreeSet<String> = fillers.into_iter().map(|f| normalize_entry(&f)).collect();
        if fillers.is_empty() {
            return Err(ConfigError::EmptyLexicon { lang, list: "filler" });
        }
        if let Some(bad) = fillers.iter().find(|f| f.contains(' ') || f.is_empty()) {
            return Err(ConfigError::InvalidParameter(format!(
                "filler {bad:?} must be a single word"
            )));
        }
        let mut terms: Vec<Vec<String>> = editing_terms
            .into_iter()
            .map(|t| normalize_entry(&t).split(' ').map(str::to_string).collect::<Vec<_>>())
            .filter(|t| t.iter().all(|w| !w.is_empty()))
            .collect();
        if terms.is_empty() {
            return Err(ConfigError::EmptyLexicon { lang, list: "editing-term" });
        }
        terms.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        terms.dedup();
        Ok(LanguageLexicon { fillers, ambiguous_fillers: BTreeSet::new(), editing_terms: terms })
    }

    pub fn fillers(&self) -> &BTreeSet<String> {
        &self.fillers
    }

    pub fn editing_terms(&self) -> &[Vec<String>] {
        &self.editing_terms
    }

    pub fn is_filler(&self, lowered: &str) -> bool {
        self.fillers.contains(lowered)
    }

    fn enable_ambiguous(&mut self) {
        let extra = std::mem::take(&mut self.ambiguous_fillers);
        self.fillers.extend(extra);
    }
}

/// Rule parameters for the detectors. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DetectorConfig {
    lexicons: BTreeMap<LanguageTag, LanguageLexicon>,
    max_repeat_ngram: usize,
    false_start_window: usize,
}

struct Builtin {
    lang: LanguageTag,
    fillers: &'static str,
    editing_terms: &'static str,
    ambiguous: &'static str,
}

const BUILTIN: [Builtin; 2] = [
    Builtin {
        lang: LanguageTag::En,
        fillers: include_str!("../../data/lexicons/en/fillers.txt"),
        editing_terms: include_str!("../../data/lexicons/en/editing_terms.txt"),
        ambiguous: include_str!("../../data/lexicons/en/ambiguous_fillers.txt"),
    },
    Builtin {
        lang: LanguageTag::Hi,
        fillers: include_str!("../../data/lexicons/hi/fillers.txt"),
        editing_terms: include_str!("../../data/lexicons/hi/editing_terms.txt"),
        ambiguous: include_str!("../../data/lexicons/hi/ambiguous_fillers.txt"),
    },
];

impl Default for DetectorConfig {
    fn default() -> Self {
        let lexicons = BUILTIN
            .iter()
            .map(|b| {
                let mut lex = LanguageLexicon::new(
                    b.lang,
                    parse_list(b.fillers),
                    parse_list(b.editing_terms),
                )
                .expect("builtin lexicon is valid");
                lex.ambiguous_fillers = parse_list(b.ambiguous).collect();
                (b.lang, lex)
            })
            .collect();
        DetectorConfig {
            lexicons,
            max_repeat_ngram: DEFAULT_MAX_REPEAT_NGRAM,
            false_start_window: DEFAULT_FALSE_START_WINDOW,
        }
    }
}

impl DetectorConfig {
    /// An empty config with default numeric parameters; add languages with
    /// [`DetectorConfig::with_lexicon`].
    pub fn empty() -> Self {
        DetectorConfig {
            lexicons: BTreeMap::new(),
            max_repeat_ngram: DEFAULT_MAX_REPEAT_NGRAM,
            false_start_window: DEFAULT_FALSE_START_WINDOW,
        }
    }

    /// Loads `<dir>/<lang>/fillers.txt` and `<dir>/<lang>/editing_terms.txt`
    /// for every supported language whose subdirectory exists.
    /// `ambiguous_fillers.txt` is read when present but stays disabled.
    pub fn load_dir(dir: &Path) -> Result<Self, ConfigError> {
        let mut cfg = DetectorConfig::empty();
        for lang in LanguageTag::ALL {
            let lang_dir = dir.join(lang.code());
            if !lang_dir.is_dir() {
                continue;
            }
            let fillers = read_list(&lang_dir.join("fillers.txt"))?;
            let terms = read_list(&lang_dir.join("editing_terms.txt"))?;
            let mut lex = LanguageLexicon::new(lang, fillers, terms)?;
            let ambiguous = lang_dir.join("ambiguous_fillers.txt");
            if ambiguous.is_file() {
                lex.ambiguous_fillers = read_list(&ambiguous)?.into_iter().collect();
            }
            cfg.lexicons.insert(lang, lex);
        }
        if cfg.lexicons.is_empty() {
            return Err(ConfigError::InvalidParameter(format!(
                "no language lexicons found under {}",
                dir.display()
            )));
        }
        Ok(cfg)
    }

    pub fn with_lexicon(mut self, lang: LanguageTag, lexicon: LanguageLexicon) -> Self {
        self.lexicons.insert(lang, lexicon);
        self
    }

    /// Drops every language not in `langs`.
    pub fn retain_languages(mut self, langs: &[LanguageTag]) -> Self {
        self.lexicons.retain(|lang, _| langs.contains(lang));
        self
    }

    /// Adds the context-dependent fillers ("like", "well", ...) to every
    /// language's filler set.
    pub fn with_ambiguous_fillers(mut self) -> Self {
        for lex in self.lexicons.values_mut() {
            lex.enable_ambiguous();
        }
        self
    }

    pub fn with_max_repeat_ngram(mut self, n: usize) -> Result<Self, ConfigError> {
        if n == 0 {
            return Err(ConfigError::InvalidParameter("max_repeat_ngram must be >= 1".into()));
        }
        self.max_repeat_ngram = n;
        Ok(self)
    }

    pub fn with_false_start_window(mut self, n: usize) -> Result<Self, ConfigError> {
        if n == 0 {
            return Err(ConfigError::InvalidParameter("false_start_window must be >= 1".into()));
        }
        self.false_start_window = n;
        Ok(self)
    }

    pub fn lexicon(&self, lang: LanguageTag) -> Result<&LanguageLexicon, ConfigError> {
        self.lexicons.get(&lang).ok_or(ConfigError::UnsupportedLanguage(lang))
    }

    pub fn languages(&self) -> impl Iterator<Item = LanguageTag> + '_ {
        self.lexicons.keys().copied()
    }

    pub fn max_repeat_ngram(&self) -> usize {
        self.max_repeat_ngram
    }

    pub fn false_start_window(&self) -> usize {
        self.false_start_window
    }
}

fn normalize_entry(entry: &str) -> String {
    entry.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
}

/// Parses a lexicon file body: one entry per line, `#` starts a comment.
pub fn parse_list(body: &str) -> impl Iterator<Item = String> + '_ {
    body.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(normalize_entry)
}

pub fn read_list(path: &Path) -> Result<Vec<String>, ConfigError> {
    let body = fs::read_to_string(path)
        .map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
    Ok(parse_list(&body).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_cover_both_languages() {
        let cfg = DetectorConfig::default();
        assert_eq!(cfg.languages().collect::<Vec<_>>(), [LanguageTag::En, LanguageTag::Hi]);
        let en = cfg.lexicon(LanguageTag::En).unwrap();
        for f in ["um", "uh", "uhh", "er", "erm", "hmm", "mhm", "huh"] {
            assert!(en.is_filler(f), "{f}");
        }
        assert!(!en.is_filler("like"));
        assert!(!en.is_filler("well"));
        assert_eq!(en.editing_terms()[0], ["i", "mean"].map(String::from));
        assert_eq!(cfg.max_repeat_ngram(), 5);
        assert_eq!(cfg.false_start_window(), 5);
    }

    #[test]
    fn ambiguous_fillers_are_opt_in() {
        let cfg = DetectorConfig::default().with_ambiguous_fillers();
        let en = cfg.lexicon(LanguageTag::En).unwrap();
        assert!(en.is_filler("like"));
        assert!(en.is_filler("well"));
    }

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let entries: Vec<_> = parse_list("# header\n\nUm  # trailing\n  No   Wait \n").collect();
        assert_eq!(entries, ["um", "no wait"]);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(DetectorConfig::default().with_max_repeat_ngram(0).is_err());
        assert!(DetectorConfig::default().with_false_start_window(0).is_err());
        assert!(LanguageLexicon::new(LanguageTag::En, vec![], vec!["sorry".into()]).is_err());
        assert!(LanguageLexicon::new(LanguageTag::En, vec!["um".into()], vec![]).is_err());
        assert!(
            LanguageLexicon::new(LanguageTag::En, vec!["you know".into()], vec!["x".into()])
                .is_err()
        );
    }

    #[test]
    fn missing_language_is_a_config_error() {
        let en = DetectorConfig::default().lexicon(LanguageTag::En).unwrap().clone();
        let cfg = DetectorConfig::empty().with_lexicon(LanguageTag::En, en);
        assert!(matches!(
            cfg.lexicon(LanguageTag::Hi),
            Err(ConfigError::UnsupportedLanguage(LanguageTag::Hi))
        ));
    }

    #[test]
    fn load_dir_reads_shipped_files() {
        let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/lexicons");
        assert_eq!(DetectorConfig::load_dir(&dir).unwrap(), DetectorConfig::default());
    }
}
