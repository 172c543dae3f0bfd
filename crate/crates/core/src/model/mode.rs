use std::fmt;
use std::ops::{Index, IndexMut};
use std::str::FromStr;

/// A transport mode on the simulated segment.
///
/// `Rer` is the main (train) mode; every other variant is an alternative
/// that users may shift to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModeId {
    Rer,
    Metro,
    Bus,
    Taxi,
    Bike,
    Walk,
}

impl ModeId {
    /// All modes in the fixed order used for draws and output columns.
    pub const ALL: [ModeId; 6] = [
        ModeId::Rer,
        ModeId::Metro,
        ModeId::Bus,
        ModeId::Taxi,
        ModeId::Bike,
        ModeId::Walk,
    ];

    /// Alternative modes, in the order used by the categorical draw.
    pub const ALTERNATIVES: [ModeId; 5] = [
        ModeId::Metro,
        ModeId::Bus,
        ModeId::Taxi,
        ModeId::Bike,
        ModeId::Walk,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn is_main(self) -> bool {
        self == ModeId::Rer
    }

    pub fn name(self) -> &'static str {
        match self {
            ModeId::Rer => "rer",
            ModeId::Metro => "metro",
            ModeId::Bus => "bus",
            ModeId::Taxi => "taxi",
            ModeId::Bike => "bike",
            ModeId::Walk => "walk",
        }
    }
}

impl fmt::Display for ModeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown mode `{0}`")]
pub struct UnknownMode(pub String);

impl FromStr for ModeId {
    type Err = UnknownMode;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ModeId::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| UnknownMode(s.to_string()))
    }
}

/// A total map from [`ModeId`] to `T`. Every mode always has an entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct ModeTable<T>([T; 6]);

impl<T> ModeTable<T> {
    pub fn from_fn(mut f: impl FnMut(ModeId) -> T) -> Self {
        ModeTable(ModeId::ALL.map(&mut f))
    }

    pub fn iter(&self) -> impl Iterator<Item = (ModeId, &T)> {
        ModeId::ALL.into_iter().zip(self.0.iter())
    }

    pub fn alternatives(&self) -> impl Iterator<Item = (ModeId, &T)> {
        self.iter().skip(1)
    }

    pub fn map<U>(&self, mut f: impl FnMut(ModeId, &T) -> U) -> ModeTable<U> {
        ModeTable::from_fn(|m| f(m, &self[m]))
    }
}

impl<T> Index<ModeId> for ModeTable<T> {
    type Output = T;

    fn index(&self, mode: ModeId) -> &T {
        &self.0[mode.index()]
    }
}

impl<T> IndexMut<ModeId> for ModeTable<T> {
    fn index_mut(&mut self, mode: ModeId) -> &mut T {
        &mut self.0[mode.index()]
    }
}
