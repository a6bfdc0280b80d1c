use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::path::Path;

use super::{population_variance, SignalError};

/// Word-frequency reference distribution; frequencies are positive and sum to 1.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ReferenceDictionary {
    freqs: BTreeMap<String, f64>,
}

impl ReferenceDictionary {
    /// Validates positivity and normalizes. A total off by more than 1e-6 is
    /// logged before renormalizing.
    pub fn new(freqs: BTreeMap<String, f64>) -> Result<Self, SignalError> {
        if let Some((w, f)) = freqs.iter().find(|(_, f)| !(f.is_finite() && **f > 0.0)) {
            return Err(SignalError::InvalidLexicon(format!(
                "reference frequency for {w:?} must be positive, got {f}"
            )));
        }
        let total: f64 = freqs.values().sum();
        if freqs.is_empty() {
            return Ok(Self::default());
        }
        if (total - 1.0).abs() > 1e-6 {
            log::warn!("reference dictionary sums to {total}, renormalizing");
        }
        Ok(ReferenceDictionary {
            freqs: freqs.into_iter().map(|(w, f)| (w, f / total)).collect(),
        })
    }

    /// Reads `word,relative_frequency` rows.
    pub fn from_csv(path: &Path) -> Result<Self, SignalError> {
        let file =
            std::fs::File::open(path).map_err(|e| SignalError::InvalidLexicon(format!("{}: {e}", path.display())))?;
        Self::from_reader(file)
    }

    pub fn from_reader<R: std::io::Read>(reader: R) -> Result<Self, SignalError> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let bad = |m: String| SignalError::InvalidLexicon(m);
        let headers = rdr.headers().map_err(|e| bad(e.to_string()))?.clone();
        if headers.iter().ne(["word", "relative_frequency"]) {
            return Err(bad("expected header word,relative_frequency".into()));
        }
        let mut freqs = BTreeMap::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| bad(e.to_string()))?;
            let row = rec.position().map_or(0, |p| p.line());
            let f: f64 = rec[1]
                .parse()
                .map_err(|_| bad(format!("row {row}: bad frequency {:?}", &rec[1])))?;
            *freqs.entry(rec[0].to_lowercase()).or_insert(0.0) += f;
        }
        Self::new(freqs)
    }

    pub fn get(&self, word: &str) -> Option<f64> {
        self.freqs.get(word).copied()
    }

    pub fn is_empty(&self) -> bool {
        self.freqs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.freqs.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.freqs.iter().map(|(w, f)| (w.as_str(), *f))
    }
}

/// Sentiment word lists plus the reference dictionary for language deviation.
#[derive(Clone, Debug, Default)]
pub struct LexiconConfig {
    pub positive: HashSet<String>,
    pub negative: HashSet<String>,
    pub reference: ReferenceDictionary,
}

impl LexiconConfig {
    pub fn new(
        positive: HashSet<String>,
        negative: HashSet<String>,
        reference: ReferenceDictionary,
    ) -> Result<Self, SignalError> {
        let positive: HashSet<String> = positive.into_iter().map(|w| w.to_lowercase()).collect();
        let negative: HashSet<String> = negative.into_iter().map(|w| w.to_lowercase()).collect();
        let mut overlap: Vec<_> = positive.intersection(&negative).collect();
        if !overlap.is_empty() {
            overlap.sort();
            return Err(SignalError::InvalidLexicon(format!(
                "words in both positive and negative lists: {overlap:?}"
            )));
        }
        Ok(LexiconConfig {
            positive,
            negative,
            reference,
        })
    }

    /// Loads `positive.txt` / `negative.txt` style lists (one word per line)
    /// and an optional reference CSV.
    pub fn load(
        positive: Option<&Path>,
        negative: Option<&Path>,
        reference: Option<&Path>,
    ) -> Result<Self, SignalError> {
        let words = |p: Option<&Path>| -> Result<HashSet<String>, SignalError> {
            let Some(p) = p else { return Ok(HashSet::new()) };
            let text =
                std::fs::read_to_string(p).map_err(|e| SignalError::InvalidLexicon(format!("{}: {e}", p.display())))?;
            Ok(text
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .map(str::to_lowercase)
                .collect())
        };
        let reference = match reference {
            Some(p) => ReferenceDictionary::from_csv(p)?,
            None => ReferenceDictionary::default(),
        };
        Self::new(words(positive)?, words(negative)?, reference)
    }

    pub fn has_sentiment(&self) -> bool {
        !(self.positive.is_empty() && self.negative.is_empty())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Emotionality {
    /// Share of tokens found in either sentiment list.
    pub emotionality: f64,
    /// `(pos - neg) / (pos + neg)`, 0 when no emotional tokens.
    pub sentiment: f64,
}

pub fn message_emotionality<S: AsRef<str>>(tokens: &[S], lexicon: &LexiconConfig) -> Result<Emotionality, SignalError> {
    if tokens.is_empty() {
        return Err(SignalError::EmptyMessage);
    }
    let (mut pos, mut neg) = (0usize, 0usize);
    for t in tokens {
        let t = t.as_ref();
        if lexicon.positive.contains(t) {
            pos += 1;
        } else if lexicon.negative.contains(t) {
            neg += 1;
        }
    }
    let hits = pos + neg;
    Ok(Emotionality {
        emotionality: hits as f64 / tokens.len() as f64,
        sentiment: if hits == 0 {
            0.0
        } else {
            (pos as f64 - neg as f64) / hits as f64
        },
    })
}

/// Population standard deviation of per-message emotionality; empty
/// messages are skipped.
pub fn honest_sentiment<'a, S: AsRef<str> + 'a>(
    messages: impl IntoIterator<Item = &'a [S]>,
    lexicon: &LexiconConfig,
) -> Result<f64, SignalError> {
    let values: Vec<f64> = messages
        .into_iter()
        .filter_map(|m| message_emotionality(m, lexicon).ok())
        .map(|e| e.emotionality)
        .collect();
    if values.len() < 2 {
        return Err(SignalError::InsufficientMessages { found: values.len() });
    }
    Ok(population_variance(&values).sqrt())
}

/// Base-2 Jensen-Shannon divergence of two distributions given as
/// word-probability pairs. Words absent from one side have probability 0 there.
pub fn jensen_shannon<'a>(
    p: impl Fn(&str) -> f64,
    q: impl Fn(&str) -> f64,
    support: impl IntoIterator<Item = &'a str>,
) -> f64 {
    let mut sum = 0.0;
    for w in support {
        let (pw, qw) = (p(w), q(w));
        let m = 0.5 * (pw + qw);
        if pw > 0.0 {
            sum += 0.5 * pw * (pw / m).log2();
        }
        if qw > 0.0 {
            sum += 0.5 * qw * (qw / m).log2();
        }
    }
    sum.clamp(0.0, 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LanguageDeviation {
    /// JSD between the unit's unigram distribution and the reference, in `[0, 1]`.
    pub divergence: f64,
    /// Share of token occurrences missing from the reference.
    pub oov_rate: f64,
}

pub fn innovative_language<'a>(
    tokens: impl IntoIterator<Item = &'a str>,
    reference: &ReferenceDictionary,
) -> Result<LanguageDeviation, SignalError> {
    let mut counts: BTreeMap<&str, u64> = BTreeMap::new();
    let mut total = 0u64;
    for t in tokens {
        *counts.entry(t).or_default() += 1;
        total += 1;
    }
    if total == 0 {
        return Err(SignalError::NoContent);
    }
    let oov: u64 = counts
        .iter()
        .filter(|(w, _)| reference.get(w).is_none())
        .map(|(_, c)| c)
        .sum();
    let support: BTreeSet<&str> = counts.keys().copied().chain(reference.iter().map(|(w, _)| w)).collect();
    let divergence = jensen_shannon(
        |w| counts.get(w).map_or(0.0, |&c| c as f64 / total as f64),
        |w| reference.get(w).unwrap_or(0.0),
        support,
    );
    Ok(LanguageDeviation {
        divergence,
        oov_rate: oov as f64 / total as f64,
    })
}
