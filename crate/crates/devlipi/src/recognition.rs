//! Two-phase nearest-neighbour glyph classification and rule-based
//! disambiguation against a template library.
//!
//! Phase 1 ranks library templates by Euclidean distance between 13-zone
//! count vectors and keeps a shortlist; phase 2 picks the shortlist member
//! nearest in the 16-moment space. Two rule-driven passes then correct the
//! systematic confusions: character pairs that differ only in the header
//! region (told apart by component count) and consonant+rakar composites
//! (told apart by skeleton endpoint count). Modifiers are classified by a
//! decision table over endpoint features rather than nearest neighbour.

use std::fmt::Write as _;
use std::path::Path;

use crate::features::{
    endpoint_features, moment_vector, normalize_image, zone_counts, EndpointFeatures,
    MomentVector, RegionVector, ZoneLayout, ZONE_COUNT,
};
use crate::raster::{cc_label, read_pbm, BinaryImage, Connectivity};
use crate::{Error, Result};

/// Strip class a template was ingested from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GlyphClass {
    Core,
    Ascender,
    Descender,
}

impl GlyphClass {
    pub fn as_str(self) -> &'static str {
        match self {
            GlyphClass::Core => "core",
            GlyphClass::Ascender => "ascender",
            GlyphClass::Descender => "descender",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        match s {
            "core" => Ok(GlyphClass::Core),
            "ascender" => Ok(GlyphClass::Ascender),
            "descender" => Ok(GlyphClass::Descender),
            other => Err(Error::parse("library", format!("unknown class {other:?}"))),
        }
    }
}

/// One labeled glyph with its precomputed features.
#[derive(Debug, Clone)]
pub struct GlyphTemplate {
    /// Devanagari codepoint sequence.
    pub label: String,
    pub class: GlyphClass,
    pub s_reg: RegionVector,
    pub s_mom: MomentVector,
    /// Component count of the bare (header-free) glyph.
    pub cc_count_no_header: usize,
    /// Skeleton endpoint count of the bare glyph.
    pub endpoint_count: usize,
}

/// Characters that differ only in the header region, told apart by the
/// component count of the header-stripped glyph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionGroup {
    /// `(label, expected component count)` per member.
    pub members: Vec<(String, usize)>,
}

/// Consonant+rakar composite detection rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RakarRule {
    pub base: String,
    pub composite: String,
    /// Composite assumed at this many skeleton endpoints or more.
    pub endpoint_threshold: usize,
}

/// One wildcard-able constraint row of a modifier rule: `(left, right, top,
/// bottom)` neighbour sums of one endpoint, `None` matching anything.
pub type EndpointPattern = [Option<u8>; 4];

/// Decision-table row for modifier classification; the first matching rule
/// wins.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModifierRule {
    pub label: String,
    /// Required component count, if any.
    pub cc_count: Option<usize>,
    /// Required endpoint count, if any.
    pub endpoint_count: Option<usize>,
    /// Constraints applied positionally to the endpoints in raster order.
    pub endpoints: Vec<EndpointPattern>,
}

impl ModifierRule {
    fn matches(&self, feat: &EndpointFeatures) -> bool {
        if let Some(cc) = self.cc_count {
            if feat.cc_count != cc {
                return false;
            }
        }
        if let Some(n) = self.endpoint_count {
            if feat.endpoint_count() != n {
                return false;
            }
        }
        if self.endpoints.len() > feat.endpoints.len() {
            return false;
        }
        for (pattern, ep) in self.endpoints.iter().zip(&feat.endpoints) {
            let actual = [ep.left, ep.right, ep.top, ep.bottom];
            for (want, got) in pattern.iter().zip(actual) {
                if let Some(w) = want {
                    if *w != got {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Immutable labeled template set plus the layout, normalization side and
/// disambiguation rules that everything was computed with.
#[derive(Debug, Clone)]
pub struct TemplateLibrary {
    pub templates: Vec<GlyphTemplate>,
    pub zone_layout: ZoneLayout,
    pub side: usize,
    pub confusion_groups: Vec<ConfusionGroup>,
    pub rakar_rules: Vec<RakarRule>,
    pub modifier_rules: Vec<ModifierRule>,
}

/// How a recognition result was (re)labeled after the two-phase match.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Disambiguation {
    None,
    HeaderCc,
    Rakar,
}

/// Outcome of classifying one glyph.
#[derive(Debug, Clone)]
pub struct Recognition {
    pub label: String,
    pub d_reg: f64,
    pub d_mom: f64,
    /// Remaining shortlist labels in moment-distance order.
    pub alternates: Vec<String>,
    pub disambiguation: Disambiguation,
    /// Set when a disambiguation pass could not decide.
    pub unresolved: bool,
}

/// A phase-1 shortlist entry.
#[derive(Debug, Clone, Copy)]
pub struct RankedTemplate<'a> {
    pub template: &'a GlyphTemplate,
    pub d_reg: f64,
}

fn d_reg(a: &RegionVector, b: &RegionVector) -> f64 {
    a.0.iter()
        .zip(&b.0)
        .map(|(&x, &y)| (x as f64 - y as f64).powi(2))
        .sum::<f64>()
        .sqrt()
}

fn d_mom(a: &MomentVector, b: &MomentVector) -> f64 {
    a.0.iter()
        .zip(&b.0)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Phase 1: templates sorted ascending by zone-count distance, ties kept in
/// library order; the best `k` are returned.
pub fn rank_phase1<'a>(
    x: &RegionVector,
    lib: &'a TemplateLibrary,
    k: usize,
) -> Result<Vec<RankedTemplate<'a>>> {
    if lib.templates.is_empty() {
        return Err(Error::EmptyLibrary);
    }
    let mut ranked: Vec<RankedTemplate<'a>> = lib
        .templates
        .iter()
        .map(|t| RankedTemplate {
            template: t,
            d_reg: d_reg(&t.s_reg, x),
        })
        .collect();
    ranked.sort_by(|a, b| a.d_reg.partial_cmp(&b.d_reg).unwrap());
    ranked.truncate(k.max(1));
    Ok(ranked)
}

/// Phase 2: the shortlist member nearest in moment space wins; the rest are
/// reported as alternates in moment-distance order.
pub fn classify_phase2(x: &MomentVector, shortlist: &[RankedTemplate<'_>]) -> Recognition {
    assert!(!shortlist.is_empty(), "shortlist must be non-empty");
    let mut scored: Vec<(f64, &RankedTemplate)> = shortlist
        .iter()
        .map(|r| (d_mom(&r.template.s_mom, x), r))
        .collect();
    scored.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let (best_d, best) = scored[0];
    Recognition {
        label: best.template.label.clone(),
        d_reg: best.d_reg,
        d_mom: best_d,
        alternates: scored[1..]
            .iter()
            .map(|(_, r)| r.template.label.clone())
            .collect(),
        disambiguation: Disambiguation::None,
        unresolved: false,
    }
}

/// Header-similarity pass: when the label belongs to a confusion group, the
/// component count of the header-stripped glyph selects the group member.
/// Without a matching count the label is kept and flagged unresolved.
pub fn disambiguate_header_pair(
    mut rec: Recognition,
    glyph: &BinaryImage,
    lib: &TemplateLibrary,
) -> Recognition {
    let group = lib
        .confusion_groups
        .iter()
        .find(|g| g.members.iter().any(|(l, _)| *l == rec.label));
    let Some(group) = group else {
        return rec;
    };
    let cc = cc_label(glyph, Connectivity::Eight).len();
    match group.members.iter().find(|(_, want)| *want == cc) {
        Some((label, _)) => {
            if *label != rec.label {
                rec.label = label.clone();
            }
            rec.disambiguation = Disambiguation::HeaderCc;
        }
        None => rec.unresolved = true,
    }
    rec
}

/// Rakar pass: when the label has a rakar rule and the glyph's skeleton has
/// at least the rule's endpoint count, the composite label replaces it.
pub fn disambiguate_rakar(
    mut rec: Recognition,
    glyph: &BinaryImage,
    lib: &TemplateLibrary,
) -> Recognition {
    let Some(rule) = lib.rakar_rules.iter().find(|r| r.base == rec.label) else {
        return rec;
    };
    let Ok(feat) = endpoint_features(glyph) else {
        return rec;
    };
    if feat.endpoint_count() >= rule.endpoint_threshold {
        rec.label = rule.composite.clone();
        rec.disambiguation = Disambiguation::Rakar;
    }
    rec
}

/// Classifies a modifier strip glyph by its endpoint feature table; the
/// first matching rule wins.
pub fn classify_modifier(feat: &EndpointFeatures, lib: &TemplateLibrary) -> Result<String> {
    lib.modifier_rules
        .iter()
        .find(|rule| rule.matches(feat))
        .map(|rule| rule.label.clone())
        .ok_or(Error::UnrecognizedModifier)
}

/// Computes the template features of one bare glyph image.
pub fn template_from_image(
    label: &str,
    class: GlyphClass,
    img: &BinaryImage,
    layout: &ZoneLayout,
    side: usize,
) -> Result<GlyphTemplate> {
    if label.is_empty() {
        return Err(Error::BadLabel("empty label".into()));
    }
    let normalized = normalize_image(img, side)?;
    if (normalized.height(), normalized.width()) != layout.canvas() {
        return Err(Error::DimensionMismatch(format!(
            "normalization side {side} does not match layout canvas {:?}",
            layout.canvas()
        )));
    }
    let s_reg = zone_counts(&normalized, layout)?;
    let s_mom = moment_vector(&normalized);
    let cc_count_no_header = cc_label(img, Connectivity::Eight).len();
    let endpoint_count = endpoint_features(img)
        .map(|f| f.endpoint_count())
        .unwrap_or(0);
    Ok(GlyphTemplate {
        label: label.to_string(),
        class,
        s_reg,
        s_mom,
        cc_count_no_header,
        endpoint_count,
    })
}

/// Ingests a labeled glyph directory into a library.
///
/// Expected contents: one PBM per glyph, a `labels.tsv` with
/// `filename<TAB>label<TAB>class` rows, a `zones.txt` zone layout, and an
/// optional `rules.txt` carrying `side`, `confusion`, `rakar` and `modrule`
/// directives (the same syntax the manifest uses).
pub fn ingest_templates(dir: impl AsRef<Path>) -> Result<TemplateLibrary> {
    let dir = dir.as_ref();
    let zone_layout = ZoneLayout::load(dir.join("zones.txt"))?;
    let labels_text = std::fs::read_to_string(dir.join("labels.tsv"))?;

    let mut side = 32usize;
    let mut confusion_groups = Vec::new();
    let mut rakar_rules = Vec::new();
    let mut modifier_rules = Vec::new();
    let rules_path = dir.join("rules.txt");
    if rules_path.exists() {
        let text = std::fs::read_to_string(&rules_path)?;
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            parse_rule_line(
                line,
                &mut side,
                &mut confusion_groups,
                &mut rakar_rules,
                &mut modifier_rules,
            )?;
        }
    }

    let mut templates = Vec::new();
    for (i, line) in labels_text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(Error::parse(
                "labels.tsv",
                format!("line {}: expected filename<TAB>label<TAB>class", i + 1),
            ));
        }
        let img = read_pbm(dir.join(fields[0]))?;
        let class = GlyphClass::parse(fields[2])?;
        templates.push(template_from_image(
            fields[1],
            class,
            &img,
            &zone_layout,
            side,
        )?);
    }
    if templates.is_empty() {
        return Err(Error::EmptyLibrary);
    }

    Ok(TemplateLibrary {
        templates,
        zone_layout,
        side,
        confusion_groups,
        rakar_rules,
        modifier_rules,
    })
}

impl TemplateLibrary {
    pub fn find(&self, label: &str) -> Option<&GlyphTemplate> {
        self.templates.iter().find(|t| t.label == label)
    }

    /// Serializes the library manifest (versioned, deterministic).
    pub fn to_text(&self) -> String {
        let mut out = String::from("devlipi-library v1\n");
        let _ = writeln!(out, "side {}", self.side);
        out.push_str(&self.zone_layout.to_text());
        for t in &self.templates {
            let reg = t
                .s_reg
                .0
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(" ");
            let mom = t
                .s_mom
                .0
                .iter()
                .map(|v| format!("{v:?}"))
                .collect::<Vec<_>>()
                .join(" ");
            let _ = writeln!(
                out,
                "template\t{}\t{}\t{}\t{}\t{}\t{}",
                t.label,
                t.class.as_str(),
                t.cc_count_no_header,
                t.endpoint_count,
                reg,
                mom
            );
        }
        for g in &self.confusion_groups {
            let members = g
                .members
                .iter()
                .map(|(l, cc)| format!("{l}:{cc}"))
                .collect::<Vec<_>>()
                .join(",");
            let _ = writeln!(out, "confusion\t{members}");
        }
        for r in &self.rakar_rules {
            let _ = writeln!(
                out,
                "rakar\t{}\t{}\t{}",
                r.base, r.composite, r.endpoint_threshold
            );
        }
        for m in &self.modifier_rules {
            let _ = writeln!(out, "{}", modrule_to_text(m));
        }
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    /// Parses a saved manifest, validating the header and the invariants
    /// (zone layout tiling, feature vector arity, rule label references).
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next() {
            Some("devlipi-library v1") => {}
            _ => return Err(Error::parse("library", "missing or bad version header")),
        }
        let mut side = 32usize;
        let mut layout_lines = String::new();
        let mut templates = Vec::new();
        let mut confusion_groups = Vec::new();
        let mut rakar_rules = Vec::new();
        let mut modifier_rules = Vec::new();
        for line in lines {
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            if trimmed.starts_with("canvas") || trimmed.starts_with("zone") {
                layout_lines.push_str(trimmed);
                layout_lines.push('\n');
                continue;
            }
            if let Some(rest) = trimmed.strip_prefix("template\t") {
                templates.push(parse_template_line(rest)?);
                continue;
            }
            parse_rule_line(
                trimmed,
                &mut side,
                &mut confusion_groups,
                &mut rakar_rules,
                &mut modifier_rules,
            )?;
        }
        let zone_layout = ZoneLayout::from_text(&layout_lines)?;
        if templates.is_empty() {
            return Err(Error::EmptyLibrary);
        }
        let lib = TemplateLibrary {
            templates,
            zone_layout,
            side,
            confusion_groups,
            rakar_rules,
            modifier_rules,
        };
        for g in &lib.confusion_groups {
            for (label, _) in &g.members {
                if lib.find(label).is_none() {
                    return Err(Error::parse(
                        "library",
                        format!("confusion rule references unknown label {label:?}"),
                    ));
                }
            }
        }
        for r in &lib.rakar_rules {
            if lib.find(&r.base).is_none() {
                return Err(Error::parse(
                    "library",
                    format!("rakar rule references unknown label {:?}", r.base),
                ));
            }
        }
        Ok(lib)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }
}

fn parse_template_line(rest: &str) -> Result<GlyphTemplate> {
    let fields: Vec<&str> = rest.split('\t').collect();
    if fields.len() != 6 {
        return Err(Error::parse("library", "template line needs 6 fields"));
    }
    let label = fields[0].to_string();
    if label.is_empty() {
        return Err(Error::BadLabel("empty label in manifest".into()));
    }
    let class = GlyphClass::parse(fields[1])?;
    let cc: usize = fields[2]
        .parse()
        .map_err(|_| Error::parse("library", "bad component count"))?;
    let endpoints: usize = fields[3]
        .parse()
        .map_err(|_| Error::parse("library", "bad endpoint count"))?;
    let reg: Vec<u32> = fields[4]
        .split_whitespace()
        .map(|s| {
            s.parse()
                .map_err(|_| Error::parse("library", "bad zone count"))
        })
        .collect::<Result<_>>()?;
    if reg.len() != ZONE_COUNT {
        return Err(Error::parse("library", "zone vector arity"));
    }
    let mom: Vec<f64> = fields[5]
        .split_whitespace()
        .map(|s| s.parse().map_err(|_| Error::parse("library", "bad moment")))
        .collect::<Result<_>>()?;
    if mom.len() != 16 {
        return Err(Error::parse("library", "moment vector arity"));
    }
    let mut s_reg = [0u32; ZONE_COUNT];
    s_reg.copy_from_slice(&reg);
    let mut s_mom = [0f64; 16];
    s_mom.copy_from_slice(&mom);
    Ok(GlyphTemplate {
        label,
        class,
        s_reg: RegionVector(s_reg),
        s_mom: MomentVector(s_mom),
        cc_count_no_header: cc,
        endpoint_count: endpoints,
    })
}

fn parse_rule_line(
    line: &str,
    side: &mut usize,
    confusion: &mut Vec<ConfusionGroup>,
    rakar: &mut Vec<RakarRule>,
    modifiers: &mut Vec<ModifierRule>,
) -> Result<()> {
    if let Some(rest) = line.strip_prefix("side ") {
        *side = rest
            .trim()
            .parse()
            .map_err(|_| Error::parse("library", "bad side"))?;
        return Ok(());
    }
    if let Some(rest) = line.strip_prefix("confusion\t") {
        let mut members = Vec::new();
        for part in rest.split(',') {
            let (label, cc) = part
                .rsplit_once(':')
                .ok_or_else(|| Error::parse("library", "confusion member needs label:cc"))?;
            members.push((
                label.to_string(),
                cc.parse()
                    .map_err(|_| Error::parse("library", "bad confusion cc"))?,
            ));
        }
        if members.len() < 2 {
            return Err(Error::parse("library", "confusion group needs 2+ members"));
        }
        confusion.push(ConfusionGroup { members });
        return Ok(());
    }
    if let Some(rest) = line.strip_prefix("rakar\t") {
        let fields: Vec<&str> = rest.split('\t').collect();
        if fields.len() != 3 {
            return Err(Error::parse("library", "rakar rule needs 3 fields"));
        }
        rakar.push(RakarRule {
            base: fields[0].to_string(),
            composite: fields[1].to_string(),
            endpoint_threshold: fields[2]
                .parse()
                .map_err(|_| Error::parse("library", "bad rakar threshold"))?,
        });
        return Ok(());
    }
    if let Some(rest) = line.strip_prefix("modrule\t") {
        modifiers.push(parse_modrule(rest)?);
        return Ok(());
    }
    Err(Error::parse(
        "library",
        format!("unknown directive {line:?}"),
    ))
}

fn modrule_to_text(m: &ModifierRule) -> String {
    let opt = |v: Option<usize>| v.map_or("*".to_string(), |x| x.to_string());
    let mut out = format!(
        "modrule\t{}\t{}\t{}",
        m.label,
        opt(m.cc_count),
        opt(m.endpoint_count)
    );
    for ep in &m.endpoints {
        let cells = ep
            .iter()
            .map(|c| c.map_or("*".to_string(), |v| v.to_string()))
            .collect::<Vec<_>>()
            .join(",");
        out.push('\t');
        out.push_str(&cells);
    }
    out
}

fn parse_modrule(rest: &str) -> Result<ModifierRule> {
    let fields: Vec<&str> = rest.split('\t').collect();
    if fields.len() < 3 {
        return Err(Error::parse(
            "library",
            "modrule needs label, cc, endpoints",
        ));
    }
    let opt = |s: &str| -> Result<Option<usize>> {
        if s == "*" {
            Ok(None)
        } else {
            s.parse()
                .map(Some)
                .map_err(|_| Error::parse("library", "bad modrule count"))
        }
    };
    let mut endpoints = Vec::new();
    for ep in &fields[3..] {
        let cells: Vec<&str> = ep.split(',').collect();
        if cells.len() != 4 {
            return Err(Error::parse("library", "modrule endpoint needs 4 cells"));
        }
        let mut pattern: EndpointPattern = [None; 4];
        for (slot, cell) in pattern.iter_mut().zip(cells) {
            if cell != "*" {
                *slot = Some(
                    cell.parse()
                        .map_err(|_| Error::parse("library", "bad modrule cell"))?,
                );
            }
        }
        endpoints.push(pattern);
    }
    Ok(ModifierRule {
        label: fields[0].to_string(),
        cc_count: opt(fields[1])?,
        endpoint_count: opt(fields[2])?,
        endpoints,
    })
}
