//! Optical mode identities: polarization plus orbital angular momentum.
//!
//! A [`ModeRegister`] fixes the phase-space ordering of a state. Mode `k`
//! owns the quadrature pair at rows `2k` (X) and `2k + 1` (Y).

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Polarization {
    H,
    V,
    L,
    R,
}

impl Polarization {
    pub fn is_circular(self) -> bool {
        matches!(self, Polarization::L | Polarization::R)
    }

    pub fn is_linear(self) -> bool {
        !self.is_circular()
    }
}

impl fmt::Display for Polarization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Polarization::H => "H",
            Polarization::V => "V",
            Polarization::L => "L",
            Polarization::R => "R",
        };
        f.write_str(s)
    }
}

impl FromStr for Polarization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "H" | "h" => Ok(Polarization::H),
            "V" | "v" => Ok(Polarization::V),
            "L" | "l" => Ok(Polarization::L),
            "R" | "r" => Ok(Polarization::R),
            other => Err(Error::InvalidParameter(format!(
                "unknown polarization {other:?} (expected H, V, L or R)"
            ))),
        }
    }
}

/// One optical mode: polarization, OAM order and a short name.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModeLabel {
    pub tag: String,
    pub polarization: Polarization,
    pub oam: i32,
}

impl ModeLabel {
    pub fn new(tag: impl Into<String>, polarization: Polarization, oam: i32) -> Self {
        Self {
            tag: tag.into(),
            polarization,
            oam,
        }
    }

    pub fn with_tag(&self, tag: impl Into<String>) -> Self {
        Self {
            tag: tag.into(),
            ..self.clone()
        }
    }

    pub fn with_polarization(&self, polarization: Polarization) -> Self {
        Self {
            polarization,
            ..self.clone()
        }
    }
}

impl fmt::Display for ModeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{},{}]", self.tag, self.polarization, self.oam)
    }
}

/// Parses `tag:P:m`, e.g. `a:H:0` or `b~:L:-1`.
impl FromStr for ModeLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let [tag, pol, oam] = parts.as_slice() else {
            return Err(Error::InvalidParameter(format!(
                "mode spec {s:?} must look like tag:P:m"
            )));
        };
        if tag.is_empty() {
            return Err(Error::InvalidParameter(format!(
                "empty tag in mode spec {s:?}"
            )));
        }
        let oam = oam
            .trim()
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("bad OAM order in mode spec {s:?}")))?;
        Ok(ModeLabel::new(*tag, pol.parse()?, oam))
    }
}

/// Ordered, duplicate-free list of modes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModeRegister {
    modes: Vec<ModeLabel>,
}

impl ModeRegister {
    pub fn new(modes: Vec<ModeLabel>) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::EmptyRegister);
        }
        let mut seen = HashSet::with_capacity(modes.len());
        for m in &modes {
            if !seen.insert(m) {
                return Err(Error::DuplicateLabel(m.to_string()));
            }
        }
        Ok(Self { modes })
    }

    /// The two OPO output modes `a[H,0]`, `b[V,0]`.
    pub fn opo_pair() -> Self {
        Self {
            modes: vec![
                ModeLabel::new("a", Polarization::H, 0),
                ModeLabel::new("b", Polarization::V, 0),
            ],
        }
    }

    /// `n` anonymous H-polarized modes tagged `m0, m1, …`.
    pub fn anonymous(n: usize) -> Result<Self> {
        Self::new(
            (0..n)
                .map(|k| ModeLabel::new(format!("m{k}"), Polarization::H, 0))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn modes(&self) -> &[ModeLabel] {
        &self.modes
    }

    pub fn get(&self, index: usize) -> Option<&ModeLabel> {
        self.modes.get(index)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, ModeLabel> {
        self.modes.iter()
    }

    pub fn tags(&self) -> Vec<String> {
        self.modes.iter().map(|m| m.tag.clone()).collect()
    }

    pub fn position_of_tag(&self, tag: &str) -> Option<usize> {
        self.modes.iter().position(|m| m.tag == tag)
    }

    pub fn into_modes(self) -> Vec<ModeLabel> {
        self.modes
    }
}

impl fmt::Display for ModeRegister {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, m) in self.modes.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{m}")?;
        }
        Ok(())
    }
}

impl<'a> IntoIterator for &'a ModeRegister {
    type Item = &'a ModeLabel;
    type IntoIter = std::slice::Iter<'a, ModeLabel>;

    fn into_iter(self) -> Self::IntoIter {
        self.modes.iter()
    }
}
