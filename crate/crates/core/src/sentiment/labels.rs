//! The ten emotion categories and the fixed-order label vector.
//!
//! Every serialized vector, CSV column set, and weight table in the project
//! uses one label order, declared here once. Each category has two accepted
//! spellings: the display name used in reports (`Annoyed`) and the source
//! dataset's original name (`anger`); the bridge between them ships as a
//! data file so a renamed upstream category is a data edit, not a code edit.

use serde::de::Error as _;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

/// Number of emotion categories.
pub const LABEL_COUNT: usize = 10;

/// One of the ten emotion categories, in the fixed serialization order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EmotionLabel {
    Optimistic,
    Thankful,
    Empathetic,
    Pessimistic,
    Anxious,
    Sad,
    Annoyed,
    Denial,
    Official,
    Joking,
}

impl EmotionLabel {
    /// All labels in serialization order (index 0 through 9).
    pub const ALL: [EmotionLabel; LABEL_COUNT] = [
        EmotionLabel::Optimistic,
        EmotionLabel::Thankful,
        EmotionLabel::Empathetic,
        EmotionLabel::Pessimistic,
        EmotionLabel::Anxious,
        EmotionLabel::Sad,
        EmotionLabel::Annoyed,
        EmotionLabel::Denial,
        EmotionLabel::Official,
        EmotionLabel::Joking,
    ];

    /// This label's position in the fixed order.
    pub fn index(self) -> usize {
        self as usize
    }

    /// The label at position `index`, if in range.
    pub fn from_index(index: usize) -> Option<EmotionLabel> {
        EmotionLabel::ALL.get(index).copied()
    }

    /// Capitalized display name used in reports (`Annoyed`).
    pub fn display_name(self) -> &'static str {
        match self {
            EmotionLabel::Optimistic => "Optimistic",
            EmotionLabel::Thankful => "Thankful",
            EmotionLabel::Empathetic => "Empathetic",
            EmotionLabel::Pessimistic => "Pessimistic",
            EmotionLabel::Anxious => "Anxious",
            EmotionLabel::Sad => "Sad",
            EmotionLabel::Annoyed => "Annoyed",
            EmotionLabel::Denial => "Denial",
            EmotionLabel::Official => "Official",
            EmotionLabel::Joking => "Joking",
        }
    }

    /// Lowercase key used in CSV headers and config files.
    pub fn key(self) -> &'static str {
        match self {
            EmotionLabel::Optimistic => "optimistic",
            EmotionLabel::Thankful => "thankful",
            EmotionLabel::Empathetic => "empathetic",
            EmotionLabel::Pessimistic => "pessimistic",
            EmotionLabel::Anxious => "anxious",
            EmotionLabel::Sad => "sad",
            EmotionLabel::Annoyed => "annoyed",
            EmotionLabel::Denial => "denial",
            EmotionLabel::Official => "official",
            EmotionLabel::Joking => "joking",
        }
    }
}

/// Source-dataset name -> lowercase key aliases, loaded once from the
/// shipped bridge file.
fn alias_map() -> &'static BTreeMap<String, String> {
    static MAP: OnceLock<BTreeMap<String, String>> = OnceLock::new();
    MAP.get_or_init(|| {
        serde_json::from_str(include_str!("../../../../data/label_names.json"))
            .expect("label name bridge is valid JSON")
    })
}

impl FromStr for EmotionLabel {
    type Err = String;

    /// Accepts the lowercase key, the display name, or a source-dataset
    /// alias, case-insensitively.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_lowercase();
        for label in EmotionLabel::ALL {
            if label.key() == lower {
                return Ok(label);
            }
        }
        if let Some(key) = alias_map().get(&lower) {
            for label in EmotionLabel::ALL {
                if label.key() == key {
                    return Ok(label);
                }
            }
        }
        Err(format!("{s:?} is not an emotion label"))
    }
}

impl fmt::Display for EmotionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.display_name())
    }
}

/// A subset of the ten labels, in fixed order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct LabelVector {
    bits: [bool; LABEL_COUNT],
}

impl LabelVector {
    /// The empty set (rendered `N/A`).
    pub fn empty() -> LabelVector {
        LabelVector::default()
    }

    /// Builds a vector from booleans in label order.
    pub fn from_bits(bits: [bool; LABEL_COUNT]) -> LabelVector {
        LabelVector { bits }
    }

    /// Builds a vector with exactly these labels set.
    pub fn from_labels(labels: &[EmotionLabel]) -> LabelVector {
        let mut v = LabelVector::empty();
        for &label in labels {
            v.set(label, true);
        }
        v
    }

    pub fn get(&self, label: EmotionLabel) -> bool {
        self.bits[label.index()]
    }

    pub fn set(&mut self, label: EmotionLabel, value: bool) {
        self.bits[label.index()] = value;
    }

    /// The raw booleans in label order.
    pub fn bits(&self) -> [bool; LABEL_COUNT] {
        self.bits
    }

    /// Labels that are set, in fixed order.
    pub fn iter_set(&self) -> impl Iterator<Item = EmotionLabel> + '_ {
        EmotionLabel::ALL
            .iter()
            .copied()
            .filter(move |l| self.bits[l.index()])
    }

    /// Number of set labels.
    pub fn count(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.count() == 0
    }

    pub fn intersection_size(&self, other: &LabelVector) -> usize {
        (0..LABEL_COUNT)
            .filter(|&i| self.bits[i] && other.bits[i])
            .count()
    }

    pub fn union_size(&self, other: &LabelVector) -> usize {
        (0..LABEL_COUNT)
            .filter(|&i| self.bits[i] || other.bits[i])
            .count()
    }

    /// 0/1 integers in label order, the on-disk form.
    pub fn to_ints(&self) -> [u8; LABEL_COUNT] {
        let mut out = [0u8; LABEL_COUNT];
        for (i, &b) in self.bits.iter().enumerate() {
            out[i] = u8::from(b);
        }
        out
    }

    /// Parses 0/1 integers in label order.
    pub fn from_ints(ints: &[u8]) -> Result<LabelVector, String> {
        if ints.len() != LABEL_COUNT {
            return Err(format!("expected {LABEL_COUNT} labels, got {}", ints.len()));
        }
        let mut bits = [false; LABEL_COUNT];
        for (i, &v) in ints.iter().enumerate() {
            bits[i] = match v {
                0 => false,
                1 => true,
                other => return Err(format!("label value {other} is not 0 or 1")),
            };
        }
        Ok(LabelVector { bits })
    }

    /// Report rendering: comma-joined display names, or `N/A` when empty.
    pub fn render(&self) -> String {
        if self.is_empty() {
            "N/A".to_string()
        } else {
            self.iter_set()
                .map(|l| l.display_name())
                .collect::<Vec<_>>()
                .join(", ")
        }
    }
}

impl fmt::Display for LabelVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl Serialize for LabelVector {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_ints().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for LabelVector {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let ints = Vec::<u8>::deserialize(deserializer)?;
        LabelVector::from_ints(&ints).map_err(D::Error::custom)
    }
}
