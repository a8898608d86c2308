use std::fmt;

use serde::{Deserialize, Serialize};

/// A set of users (or receivers) stored as a bit mask; bit `k` is user `k`.
///
/// Users are zero-based internally and displayed one-based, so the mask
/// `0b011` renders as `{1,2}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct UserSet(pub u64);

impl UserSet {
    pub const EMPTY: UserSet = UserSet(0);

    pub fn full(users: usize) -> Self {
        if users >= 64 {
            UserSet(u64::MAX)
        } else {
            UserSet((1u64 << users) - 1)
        }
    }

    pub fn singleton(user: usize) -> Self {
        UserSet(1u64 << user)
    }

    #[inline]
    pub fn bits(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn contains(self, user: usize) -> bool {
        user < 64 && (self.0 >> user) & 1 == 1
    }

    #[inline]
    pub fn with(self, user: usize) -> Self {
        UserSet(self.0 | (1u64 << user))
    }

    #[inline]
    pub fn without(self, user: usize) -> Self {
        UserSet(self.0 & !(1u64 << user))
    }

    #[inline]
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn intersects(self, other: UserSet) -> bool {
        self.0 & other.0 != 0
    }

    pub fn intersection(self, other: UserSet) -> UserSet {
        UserSet(self.0 & other.0)
    }

    pub fn union(self, other: UserSet) -> UserSet {
        UserSet(self.0 | other.0)
    }

    /// Members in increasing order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let k = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(k)
        })
    }
}

impl FromIterator<usize> for UserSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        iter.into_iter().fold(UserSet::EMPTY, UserSet::with)
    }
}

impl fmt::Display for UserSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, k) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", k + 1)?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for UserSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Size-`size` subsets of `{0, .., universe-1}` in lexicographic order of
/// their sorted member lists: `{0,1,2}, {0,1,3}, .., {0,2,3}, ..`.
pub struct LexSubsets {
    universe: usize,
    members: Vec<usize>,
    done: bool,
}

impl LexSubsets {
    pub fn new(universe: usize, size: usize) -> Self {
        Self {
            universe,
            members: (0..size).collect(),
            done: size > universe,
        }
    }
}

impl Iterator for LexSubsets {
    type Item = UserSet;

    fn next(&mut self) -> Option<UserSet> {
        if self.done {
            return None;
        }
        let current = self.members.iter().copied().collect();
        let size = self.members.len();
        // advance: bump the rightmost member that still has room
        let mut i = size;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.members[i] < self.universe - size + i {
                self.members[i] += 1;
                for j in i + 1..size {
                    self.members[j] = self.members[j - 1] + 1;
                }
                break;
            }
        }
        Some(current)
    }
}

/// All nonempty subsets in delivery order: size descending, lexicographic
/// within a size.
pub fn delivery_order(universe: usize) -> impl Iterator<Item = UserSet> {
    (1..=universe).rev().flat_map(move |s| LexSubsets::new(universe, s))
}
