//! Devanagari label → IAST romanization and document rendering.
//!
//! Consonants map to their inherent-`a` forms (`क` → `ka`); dependent vowel
//! signs replace the inherent vowel, the halant suppresses it, and
//! anusvara/visarga/candrabindu append their marks. Modifiers that arrive
//! unrecognized render as `_`; unknown core labels render as `□`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::{Error, Result};

/// Devanagari label → IAST mapping plus the composition rules.
#[derive(Debug, Clone)]
pub struct TranslitTable {
    entries: BTreeMap<String, String>,
}

/// `(devanagari, iast)` defaults: vowels, signs, dependent vowel signs,
/// consonants and the irreducible conjunct forms.
/// Vocalic vowels carry the standard IAST diacritics (ṛ ṝ ḷ ḹ); anusvara
/// and visarga compose with the dotted forms (ṃ ḥ).
const DEFAULT_ENTRIES: &[(&str, &str)] = &[
    // Independent vowels.
    ("अ", "a"),
    ("आ", "ā"),
    ("इ", "i"),
    ("ई", "ī"),
    ("उ", "u"),
    ("ऊ", "ū"),
    ("ऋ", "ṛ"),
    ("ॠ", "ṝ"),
    ("ऌ", "ḷ"),
    ("ॡ", "ḹ"),
    ("ए", "e"),
    ("ऐ", "ai"),
    ("ओ", "o"),
    ("औ", "au"),
    ("अं", "aṃ"),
    ("अः", "aḥ"),
    // Combining signs.
    ("ं", "ṃ"),
    ("ः", "ḥ"),
    ("ँ", "m̐"),
    ("्", ""),
    // Dependent vowel signs.
    ("ा", "ā"),
    ("ि", "i"),
    ("ी", "ī"),
    ("ु", "u"),
    ("ू", "ū"),
    ("ृ", "ṛ"),
    ("ॄ", "ṝ"),
    ("े", "e"),
    ("ै", "ai"),
    ("ो", "o"),
    ("ौ", "au"),
    // Consonants.
    ("क", "ka"),
    ("ख", "kha"),
    ("ग", "ga"),
    ("घ", "gha"),
    ("ङ", "ṅa"),
    ("च", "ca"),
    ("छ", "cha"),
    ("ज", "ja"),
    ("झ", "jha"),
    ("ञ", "ña"),
    ("ट", "ṭa"),
    ("ठ", "ṭha"),
    ("ड", "ḍa"),
    ("ढ", "ḍha"),
    ("ण", "ṇa"),
    ("त", "ta"),
    ("थ", "tha"),
    ("द", "da"),
    ("ध", "dha"),
    ("न", "na"),
    ("प", "pa"),
    ("फ", "pha"),
    ("ब", "ba"),
    ("भ", "bha"),
    ("म", "ma"),
    ("य", "ya"),
    ("र", "ra"),
    ("ल", "la"),
    ("व", "va"),
    ("श", "śa"),
    ("ष", "ṣa"),
    ("स", "sa"),
    ("ह", "ha"),
    // Fused conjunct forms that segment as a single core character.
    ("क्ष", "kṣa"),
    ("त्र", "tra"),
    ("ज्ञ", "jña"),
    ("श्र", "śra"),
    ("त्त", "tta"),
    ("द्ध", "ddha"),
    ("क्र", "kra"),
];

impl Default for TranslitTable {
    fn default() -> Self {
        let entries = DEFAULT_ENTRIES
            .iter()
            .map(|&(d, r)| (d.to_string(), r.to_string()))
            .collect();
        Self { entries }
    }
}

impl TranslitTable {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn lookup(&self, label: &str) -> Option<&str> {
        self.entries.get(label).map(String::as_str)
    }

    /// Labels mapping to the given roman form.
    pub fn reverse_lookup(&self, roman: &str) -> Vec<&str> {
        self.entries
            .iter()
            .filter(|(_, r)| r.as_str() == roman)
            .map(|(d, _)| d.as_str())
            .collect()
    }

    pub fn insert(&mut self, label: impl Into<String>, roman: impl Into<String>) {
        self.entries.insert(label.into(), roman.into());
    }

    /// Serializes as `devanagari<TAB>iast` lines.
    pub fn to_text(&self) -> String {
        let mut out = String::from(
            "# Devanagari -> IAST transliteration table.\n\
             # Vocalic vowels use the standard IAST diacritics (r̥-series as ṛ ṝ ḷ ḹ);\n\
             # anusvara and visarga compose with the dotted forms ṃ and ḥ.\n",
        );
        for (d, r) in &self.entries {
            let _ = writeln!(out, "{d}\t{r}");
        }
        out
    }

    /// Parses the table format: one `devanagari<TAB>iast` entry per line,
    /// `#` comments, UTF-8.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            // The roman side may legitimately be empty (halant), so the
            // separator tab must survive; only line endings are trimmed.
            let (d, r) = line.trim_end_matches(['\r', '\n']).split_once('\t').ok_or_else(|| {
                Error::parse(
                    "transliteration table",
                    format!("line {}: expected devanagari<TAB>iast", i + 1),
                )
            })?;
            entries.insert(d.trim().to_string(), r.trim().to_string());
        }
        Ok(Self { entries })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }
}

/// How sure the pipeline is about one emitted token.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Confidence {
    FirstChoice,
    /// The emitted label was not the nearest-neighbour first choice
    /// (a disambiguation pass relabeled it).
    Alternate,
    /// At least one attached modifier was not recognized.
    UnrecognizedModifier,
}

/// One recognized core glyph with its attached modifiers, as handed to the
/// transliterator. A `None` modifier is one the classifier could not name.
#[derive(Debug, Clone)]
pub struct RecognizedGlyph {
    pub label: String,
    pub modifiers: Vec<Option<String>>,
    pub not_first_choice: bool,
    pub alternates: Vec<String>,
}

impl RecognizedGlyph {
    pub fn plain(label: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            modifiers: Vec::new(),
            not_first_choice: false,
            alternates: Vec::new(),
        }
    }
}

/// One romanized output token.
#[derive(Debug, Clone)]
pub struct OutputToken {
    pub label: String,
    pub roman: String,
    pub confidence: Confidence,
    pub alternates: Vec<String>,
    /// Filled for unknown labels.
    pub diagnostic: Option<String>,
}

/// Kinds of Devanagari modifier codepoints, for composition.
enum ModifierKind {
    VowelSign,
    Halant,
    AppendingSign,
}

fn modifier_kind(label: &str) -> Option<ModifierKind> {
    let c = label.chars().next()?;
    match c {
        '\u{093E}'..='\u{094C}' => Some(ModifierKind::VowelSign),
        '\u{094D}' => Some(ModifierKind::Halant),
        '\u{0901}' | '\u{0902}' | '\u{0903}' => Some(ModifierKind::AppendingSign),
        _ => None,
    }
}

/// Maps recognized glyphs to roman tokens, composing attached modifiers:
/// vowel signs replace the inherent `a`, the halant suppresses it, anusvara
/// and visarga append their marks, and unrecognized modifiers append `_`.
pub fn transliterate(glyphs: &[RecognizedGlyph], table: &TranslitTable) -> Vec<OutputToken> {
    glyphs
        .iter()
        .map(|g| {
            let Some(base) = table.lookup(&g.label) else {
                return OutputToken {
                    label: g.label.clone(),
                    roman: "□".to_string(),
                    confidence: Confidence::FirstChoice,
                    alternates: g.alternates.clone(),
                    diagnostic: Some(format!("no table entry for {:?}", g.label)),
                };
            };
            let mut roman = base.to_string();
            let mut confidence = if g.not_first_choice {
                Confidence::Alternate
            } else {
                Confidence::FirstChoice
            };
            for modifier in &g.modifiers {
                match modifier {
                    Some(label) => match (modifier_kind(label), table.lookup(label)) {
                        (Some(ModifierKind::VowelSign), Some(vowel)) => {
                            if let Some(stripped) = roman.strip_suffix('a') {
                                roman = stripped.to_string();
                            }
                            roman.push_str(vowel);
                        }
                        (Some(ModifierKind::Halant), _) => {
                            if let Some(stripped) = roman.strip_suffix('a') {
                                roman = stripped.to_string();
                            }
                        }
                        (Some(ModifierKind::AppendingSign), Some(mark)) => {
                            roman.push_str(mark);
                        }
                        _ => {
                            roman.push('_');
                            confidence = Confidence::UnrecognizedModifier;
                        }
                    },
                    None => {
                        roman.push('_');
                        confidence = Confidence::UnrecognizedModifier;
                    }
                }
            }
            OutputToken {
                label: g.label.clone(),
                roman,
                confidence,
                alternates: g.alternates.clone(),
                diagnostic: None,
            }
        })
        .collect()
}

/// Joins tokens into the output document: words separated by single spaces,
/// lines by single newlines.
pub fn render_document(lines: &[Vec<Vec<OutputToken>>]) -> String {
    let rendered: Vec<String> = lines
        .iter()
        .map(|words| {
            words
                .iter()
                .map(|tokens| tokens.iter().map(|t| t.roman.as_str()).collect::<String>())
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect();
    let mut out = rendered.join("\n");
    if !out.is_empty() {
        out.push('\n');
    }
    out
}

/// Machine-readable companion to [`render_document`]: one line per token
/// that was not a clean first choice, plus unknown-label diagnostics.
pub fn sidecar_report(lines: &[Vec<Vec<OutputToken>>]) -> String {
    let mut out = String::new();
    let mut index = 0usize;
    for (li, words) in lines.iter().enumerate() {
        for (wi, tokens) in words.iter().enumerate() {
            for t in tokens {
                match t.confidence {
                    Confidence::FirstChoice if t.diagnostic.is_none() => {}
                    _ => {
                        let kind = match t.confidence {
                            Confidence::FirstChoice => "unknown-label",
                            Confidence::Alternate => "not-first-choice",
                            Confidence::UnrecognizedModifier => "unrecognized-modifier",
                        };
                        let _ = write!(
                            out,
                            "token {index} line {li} word {wi} kind {kind} label {} roman {}",
                            t.label, t.roman
                        );
                        if !t.alternates.is_empty() {
                            let _ = write!(out, " alternates {}", t.alternates.join(","));
                        }
                        if let Some(d) = &t.diagnostic {
                            let _ = write!(out, " note {d}");
                        }
                        out.push('\n');
                    }
                }
                index += 1;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spot_checks_from_the_standard_table() {
        let table = TranslitTable::default();
        assert_eq!(table.lookup("क"), Some("ka"));
        assert_eq!(table.lookup("अ"), Some("a"));
        assert_eq!(table.lookup("ऊ"), Some("ū"));
        assert!(table.len() >= 46);
    }

    #[test]
    fn consonants_carry_the_inherent_vowel() {
        let table = TranslitTable::default();
        for c in '\u{0915}'..='\u{0939}' {
            let label = c.to_string();
            if let Some(roman) = table.lookup(&label) {
                assert!(roman.ends_with('a'), "{label} -> {roman}");
            }
        }
    }

    #[test]
    fn reverse_lookup_contains_original() {
        let table = TranslitTable::default();
        for c in '\u{0915}'..='\u{0939}' {
            let label = c.to_string();
            if let Some(roman) = table.lookup(&label) {
                assert!(table.reverse_lookup(roman).contains(&label.as_str()));
            }
        }
    }

    #[test]
    fn table_values_are_nfc() {
        // All diacritic letters in the table are precomposed; the only
        // combining mark allowed is the candrabindu over m, which has no
        // precomposed form.
        let table = TranslitTable::default();
        for (d, _) in DEFAULT_ENTRIES {
            let roman = table.lookup(d).unwrap();
            let chars: Vec<char> = roman.chars().collect();
            for (i, &c) in chars.iter().enumerate() {
                let combining = ('\u{0300}'..='\u{036F}').contains(&c);
                if combining {
                    assert_eq!(c, '\u{0310}', "unexpected combining mark in {roman:?}");
                    assert_eq!(chars.get(i - 1), Some(&'m'));
                }
            }
        }
    }

    #[test]
    fn vowel_sign_replaces_inherent_a() {
        let table = TranslitTable::default();
        let glyphs = vec![
            RecognizedGlyph {
                label: "श".into(),
                modifiers: vec![Some("ो".into())],
                not_first_choice: false,
                alternates: vec![],
            },
            RecognizedGlyph {
                label: "भ".into(),
                modifiers: vec![Some("ा".into())],
                not_first_choice: false,
                alternates: vec![],
            },
        ];
        let tokens = transliterate(&glyphs, &table);
        let word: String = tokens.iter().map(|t| t.roman.as_str()).collect();
        assert_eq!(word, "śobhā");
    }

    #[test]
    fn halant_suppresses_inherent_a() {
        let table = TranslitTable::default();
        let glyphs = vec![RecognizedGlyph {
            label: "क".into(),
            modifiers: vec![Some("्".into())],
            not_first_choice: false,
            alternates: vec![],
        }];
        assert_eq!(transliterate(&glyphs, &table)[0].roman, "k");
    }

    #[test]
    fn anusvara_and_visarga_append() {
        let table = TranslitTable::default();
        let glyphs = vec![
            RecognizedGlyph {
                label: "क".into(),
                modifiers: vec![Some("ं".into())],
                not_first_choice: false,
                alternates: vec![],
            },
            RecognizedGlyph {
                label: "क".into(),
                modifiers: vec![Some("ः".into())],
                not_first_choice: false,
                alternates: vec![],
            },
        ];
        let tokens = transliterate(&glyphs, &table);
        assert_eq!(tokens[0].roman, "kaṃ");
        assert_eq!(tokens[1].roman, "kaḥ");
    }

    #[test]
    fn unrecognized_modifier_renders_underscore() {
        let table = TranslitTable::default();
        let glyphs = vec![RecognizedGlyph {
            label: "क".into(),
            modifiers: vec![None],
            not_first_choice: false,
            alternates: vec![],
        }];
        let tokens = transliterate(&glyphs, &table);
        assert_eq!(tokens[0].roman, "ka_");
        assert_eq!(tokens[0].confidence, Confidence::UnrecognizedModifier);
    }

    #[test]
    fn unknown_label_renders_box_with_diagnostic() {
        let table = TranslitTable::default();
        let glyphs = vec![RecognizedGlyph::plain("X")];
        let tokens = transliterate(&glyphs, &table);
        assert_eq!(tokens[0].roman, "□");
        assert!(tokens[0].diagnostic.is_some());
    }

    #[test]
    fn render_joins_words_and_lines() {
        let table = TranslitTable::default();
        let ka = transliterate(&[RecognizedGlyph::plain("क")], &table);
        let ga = transliterate(&[RecognizedGlyph::plain("ग")], &table);
        let lines = vec![vec![ka.clone(), ga.clone()], vec![ka.clone()]];
        assert_eq!(render_document(&lines), "ka ga\nka\n");
        assert_eq!(render_document(&[]), "");
    }

    #[test]
    fn sidecar_reports_flagged_tokens_only() {
        let table = TranslitTable::default();
        let mut glyphs = vec![RecognizedGlyph::plain("क")];
        glyphs.push(RecognizedGlyph {
            label: "ग".into(),
            modifiers: vec![],
            not_first_choice: true,
            alternates: vec!["घ".into()],
        });
        let tokens = transliterate(&glyphs, &table);
        let lines = vec![vec![tokens]];
        let report = sidecar_report(&lines);
        assert_eq!(report.lines().count(), 1);
        assert!(report.contains("not-first-choice"));
        assert!(report.contains("alternates घ"));
    }

    #[test]
    fn table_roundtrips_through_text() {
        let table = TranslitTable::default();
        let text = table.to_text();
        let loaded = TranslitTable::from_text(&text).unwrap();
        assert_eq!(loaded.to_text(), text);
        assert_eq!(loaded.lookup("क्ष"), Some("kṣa"));
    }
}
