use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Width of every region feature vector at published scale.
pub const VISION_DIM: usize = 512;

/// Sentiment classes, in score-vector order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Positive = 0,
    Negative = 1,
    Neutral = 2,
}

impl Label {
    pub const ALL: [Label; 3] = [Label::Positive, Label::Negative, Label::Neutral];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Label> {
        Self::ALL.get(i).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Label::Positive => "positive",
            Label::Negative => "negative",
            Label::Neutral => "neutral",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Global,
    Face,
    Item,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub role: Role,
    pub vec: Vec<f64>,
}

/// The 20 fashion attribute classes; the declaration order is the slot
/// order of attribute encodings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AttributeClass {
    Category,
    TopCategory,
    Subcategory,
    Layers,
    Style,
    Cut,
    Color,
    Pattern,
    Age,
    Material,
    Length,
    Neckline,
    Gender,
    Sleeves,
    Gemstones,
    Fit,
    Hood,
    Height,
    Embellishment,
    Type,
}

impl AttributeClass {
    pub const COUNT: usize = 20;

    pub const ALL: [AttributeClass; 20] = [
        AttributeClass::Category,
        AttributeClass::TopCategory,
        AttributeClass::Subcategory,
        AttributeClass::Layers,
        AttributeClass::Style,
        AttributeClass::Cut,
        AttributeClass::Color,
        AttributeClass::Pattern,
        AttributeClass::Age,
        AttributeClass::Material,
        AttributeClass::Length,
        AttributeClass::Neckline,
        AttributeClass::Gender,
        AttributeClass::Sleeves,
        AttributeClass::Gemstones,
        AttributeClass::Fit,
        AttributeClass::Hood,
        AttributeClass::Height,
        AttributeClass::Embellishment,
        AttributeClass::Type,
    ];

    pub fn slot(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            AttributeClass::Category => "Category",
            AttributeClass::TopCategory => "Top Category",
            AttributeClass::Subcategory => "Subcategory",
            AttributeClass::Layers => "Layers",
            AttributeClass::Style => "Style",
            AttributeClass::Cut => "Cut",
            AttributeClass::Color => "Color",
            AttributeClass::Pattern => "Pattern",
            AttributeClass::Age => "Age",
            AttributeClass::Material => "Material",
            AttributeClass::Length => "Length",
            AttributeClass::Neckline => "Neckline",
            AttributeClass::Gender => "Gender",
            AttributeClass::Sleeves => "Sleeves",
            AttributeClass::Gemstones => "Gemstones",
            AttributeClass::Fit => "Fit",
            AttributeClass::Hood => "Hood",
            AttributeClass::Height => "Height",
            AttributeClass::Embellishment => "Embellishment",
            AttributeClass::Type => "Type",
        }
    }
}

impl fmt::Display for AttributeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Case-insensitive; spaces, `_` and `-` are ignored, so `top_category`
/// and `Top Category` both parse.
impl FromStr for AttributeClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = |s: &str| -> String {
            s.chars()
                .filter(|c| !matches!(c, ' ' | '_' | '-'))
                .flat_map(char::to_lowercase)
                .collect()
        };
        let wanted = key(s);
        Self::ALL
            .into_iter()
            .find(|c| key(c.name()) == wanted)
            .ok_or_else(|| format!("unknown attribute class `{s}`"))
    }
}

impl Serialize for AttributeClass {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for AttributeClass {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Attribute {
    pub class: AttributeClass,
    pub value: String,
    pub confidence: f64,
}

impl Attribute {
    pub fn new(class: AttributeClass, value: impl Into<String>, confidence: f64) -> Self {
        Self {
            class,
            value: value.into(),
            confidence,
        }
    }
}

/// One post: text, precomputed region features and fashion attributes.
#[derive(Debug, Clone, PartialEq)]
pub struct PostRecord {
    pub id: String,
    pub raw_text: String,
    /// Output of [`clean_text`](super::clean_text) on `raw_text`.
    pub tokens: Vec<String>,
    pub regions: Vec<Region>,
    pub attributes: Vec<Attribute>,
    pub label: Option<Label>,
    /// Upstream person-detector verdict, when available.
    pub has_person: Option<bool>,
}

impl PostRecord {
    pub fn global_region(&self) -> Option<&Region> {
        self.regions.iter().find(|r| r.role == Role::Global)
    }
}
