//! Adversary structures over a player set `P = {1, .., m}` and the
//! Q2 / dual / Q2* / self-duality predicates.
//!
//! Subsets are bitmasks: bit `i - 1` set means player `i` is in the subset.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest player set accepted by the predicates.
pub const MAX_PLAYERS: usize = 20;
/// Largest player set for which the dual is materialised.
pub const MAX_DUAL_PLAYERS: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdversaryStructure {
    players: usize,
    sets: BTreeSet<u32>,
}

impl AdversaryStructure {
    /// Builds a structure from subsets of 1-based player indices. Downward
    /// closure is not required here; predicates that need it check it.
    pub fn new<I, S>(players: usize, subsets: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[usize]>,
    {
        check_players(players, MAX_PLAYERS)?;
        let mut sets = BTreeSet::new();
        for subset in subsets {
            let mut mask = 0u32;
            for &i in subset.as_ref() {
                if i == 0 || i > players {
                    return Err(Error::InvalidParams(format!("player {i} is outside 1..={players}")));
                }
                mask |= 1 << (i - 1);
            }
            sets.insert(mask);
        }
        Ok(Self { players, sets })
    }

    pub fn from_masks(players: usize, masks: impl IntoIterator<Item = u32>) -> Result<Self> {
        check_players(players, MAX_PLAYERS)?;
        let full = full_mask(players);
        let sets: BTreeSet<u32> = masks.into_iter().collect();
        if sets.iter().any(|&m| m & !full != 0) {
            return Err(Error::InvalidParams("subset mentions players outside P".into()));
        }
        Ok(Self { players, sets })
    }

    /// All subsets of size at most `t`.
    pub fn threshold(players: usize, t: usize) -> Result<Self> {
        check_players(players, MAX_PLAYERS)?;
        if t >= players {
            return Err(Error::InvalidParams(format!("threshold {t} must be below the player count {players}")));
        }
        let sets = (0..=full_mask(players)).filter(|m| m.count_ones() as usize <= t).collect();
        Ok(Self { players, sets })
    }

    pub fn players(&self) -> usize {
        self.players
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn contains_mask(&self, mask: u32) -> bool {
        self.sets.contains(&mask)
    }

    pub fn masks(&self) -> impl Iterator<Item = u32> + '_ {
        self.sets.iter().copied()
    }

    fn full(&self) -> u32 {
        full_mask(self.players)
    }

    pub fn is_downward_closed(&self) -> bool {
        self.sets.iter().all(|&b| {
            (0..self.players).filter(|i| b & (1 << i) != 0).all(|i| self.sets.contains(&(b & !(1 << i))))
        })
    }

    fn require_closed(&self) -> Result<()> {
        if self.is_downward_closed() {
            Ok(())
        } else {
            Err(Error::NotDownwardClosed)
        }
    }

    /// No member whose complement is also a member.
    pub fn is_q2(&self) -> Result<bool> {
        self.require_closed()?;
        let full = self.full();
        Ok(self.sets.iter().all(|&b| !self.sets.contains(&(full & !b))))
    }

    /// `A* = { B subset of P : P \ B not in A }`.
    pub fn dual(&self) -> Result<Self> {
        self.require_closed()?;
        check_players(self.players, MAX_DUAL_PLAYERS)?;
        let full = self.full();
        let sets = (0..=full).filter(|&b| !self.sets.contains(&(full & !b))).collect();
        Ok(Self { players: self.players, sets })
    }

    /// Whether the dual is Q2. Decided without materialising the dual: the
    /// dual has a complementary pair `{B, P \ B}` iff neither `B` nor
    /// `P \ B` lies in `A`.
    pub fn is_q2_star(&self) -> Result<bool> {
        self.require_closed()?;
        let full = self.full();
        Ok((0..=full).all(|b| self.sets.contains(&b) || self.sets.contains(&(full & !b))))
    }

    /// Q2 and Q2* together.
    pub fn is_self_dual(&self) -> Result<bool> {
        Ok(self.is_q2()? && self.is_q2_star()?)
    }

    /// Subsets as sorted 1-based index lists, ordered by size then
    /// lexicographically.
    pub fn to_subsets(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = self
            .sets
            .iter()
            .map(|&m| (0..self.players).filter(|i| m & (1 << i) != 0).map(|i| i + 1).collect())
            .collect();
        out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        out
    }

    pub fn from_json(players: usize, json: &str) -> Result<Self> {
        let subsets: Vec<Vec<usize>> = serde_json::from_str(json)?;
        Self::new(players, subsets)
    }
}

impl Serialize for AdversaryStructure {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_subsets().serialize(s)
    }
}

/// Predicate report in the shape printed by the command line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredicateReport {
    pub players: usize,
    pub downward_closed: bool,
    pub q2: Option<bool>,
    pub q2_star: Option<bool>,
    pub self_dual: Option<bool>,
    pub dual: Option<Vec<Vec<usize>>>,
}

impl AdversaryStructure {
    /// Evaluates every predicate; entries that presuppose downward closure
    /// are `None` when it fails, and `dual` is `None` past the dual bound.
    pub fn report(&self) -> PredicateReport {
        let closed = self.is_downward_closed();
        PredicateReport {
            players: self.players,
            downward_closed: closed,
            q2: self.is_q2().ok(),
            q2_star: self.is_q2_star().ok(),
            self_dual: self.is_self_dual().ok(),
            dual: self.dual().ok().map(|d| d.to_subsets()),
        }
    }
}

fn full_mask(players: usize) -> u32 {
    if players == 0 {
        0
    } else {
        u32::MAX >> (32 - players)
    }
}

fn check_players(players: usize, max: usize) -> Result<()> {
    if players > max {
        Err(Error::TooManyPlayers { players, max })
    } else {
        Ok(())
    }
}
