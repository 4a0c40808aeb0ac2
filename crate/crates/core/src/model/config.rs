use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

/// Layer widths and depths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub text_dim: usize,
    pub vision_dim: usize,
    pub va_hidden: usize,
    pub vt_dim: usize,
    pub ta_heads: usize,
    pub vt_heads: usize,
    pub ta_blocks: usize,
    pub vt_blocks: usize,
    pub vt_head_blocks: usize,
    pub ffn_mult: usize,
    pub ln_eps: f64,
}

impl ModelConfig {
    /// Widths of the published model.
    pub fn published() -> Self {
        Self {
            text_dim: 900,
            vision_dim: 512,
            va_hidden: 2048,
            vt_dim: 512,
            ta_heads: 3,
            vt_heads: 4,
            ta_blocks: 3,
            vt_blocks: 2,
            vt_head_blocks: 1,
            ffn_mult: 2,
            ln_eps: 1e-5,
        }
    }

    /// Same depths and head counts at widths a laptop trains in seconds.
    pub fn desk() -> Self {
        Self {
            text_dim: 48,
            vision_dim: 32,
            va_hidden: 64,
            vt_dim: 32,
            ..Self::published()
        }
    }

    /// Smallest widths that keep every head count valid; used for
    /// exhaustive finite-difference checks.
    pub fn tiny() -> Self {
        Self {
            text_dim: 6,
            vision_dim: 4,
            va_hidden: 5,
            vt_dim: 4,
            ..Self::published()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(CoreError::Config(m));
        if self.text_dim == 0 || self.text_dim % 3 != 0 {
            return bad(format!("text_dim {} must be a positive multiple of 3", self.text_dim));
        }
        if self.text_dim % self.ta_heads != 0 {
            return bad(format!("{} heads do not divide text_dim {}", self.ta_heads, self.text_dim));
        }
        if self.vt_dim % self.vt_heads != 0 {
            return bad(format!("{} heads do not divide vt_dim {}", self.vt_heads, self.vt_dim));
        }
        if [self.vision_dim, self.va_hidden, self.vt_dim, self.ta_blocks, self.ffn_mult].contains(&0) {
            return bad("widths, ffn_mult and ta_blocks must be positive".into());
        }
        Ok(())
    }
}

/// The fusion model or one of the comparison baselines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Full,
    Early,
    Late,
    TextOnly,
    ImageOnly,
    AttrOnly,
}

impl ModelKind {
    pub const ALL: [ModelKind; 6] = [
        ModelKind::Full,
        ModelKind::Early,
        ModelKind::Late,
        ModelKind::TextOnly,
        ModelKind::ImageOnly,
        ModelKind::AttrOnly,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Full => "full",
            ModelKind::Early => "early",
            ModelKind::Late => "late",
            ModelKind::TextOnly => "text-only",
            ModelKind::ImageOnly => "image-only",
            ModelKind::AttrOnly => "attr-only",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown model kind `{s}`"))
    }
}

/// The three branches of the full model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Va,
    Ta,
    Vt,
}

impl Branch {
    pub const ALL: [Branch; 3] = [Branch::Va, Branch::Ta, Branch::Vt];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Branch::Va => "va",
            Branch::Ta => "ta",
            Branch::Vt => "vt",
        }
    }
}

impl FromStr for Branch {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| format!("unknown branch `{s}` (expected va, ta or vt)"))
    }
}

/// Which branches take part in the fused score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchSet {
    pub va: bool,
    pub ta: bool,
    pub vt: bool,
}

impl Default for BranchSet {
    fn default() -> Self {
        Self::all()
    }
}

impl BranchSet {
    pub fn all() -> Self {
        Self {
            va: true,
            ta: true,
            vt: true,
        }
    }

    pub fn only(branch: Branch) -> Self {
        let mut s = Self {
            va: false,
            ta: false,
            vt: false,
        };
        s.set(branch, true);
        s
    }

    pub fn without(branches: &[Branch]) -> Self {
        let mut s = Self::all();
        for &b in branches {
            s.set(b, false);
        }
        s
    }

    pub fn contains(&self, b: Branch) -> bool {
        self.mask()[b.index()]
    }

    pub fn set(&mut self, b: Branch, on: bool) {
        match b {
            Branch::Va => self.va = on,
            Branch::Ta => self.ta = on,
            Branch::Vt => self.vt = on,
        }
    }

    pub fn mask(&self) -> [bool; 3] {
        [self.va, self.ta, self.vt]
    }

    pub fn validate(&self) -> Result<()> {
        if self.mask().iter().any(|&m| m) {
            Ok(())
        } else {
            Err(CoreError::Config("all branches disabled".into()))
        }
    }
}
