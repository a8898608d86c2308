use crate::bits::BitString;

/// The bit indices of one file held by one cache, kept as a dense bitmap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CachedSet {
    map: BitString,
    count: usize,
}

impl CachedSet {
    pub fn empty(file_bits: usize) -> Self {
        Self {
            map: BitString::zeros(file_bits),
            count: 0,
        }
    }

    pub fn from_map(map: BitString) -> Self {
        let count = map.count_ones();
        Self { map, count }
    }

    #[inline]
    pub fn contains(&self, bit: usize) -> bool {
        self.map.get(bit)
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    /// Cached indices in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.map.iter_ones()
    }

    pub fn to_vec(&self) -> Vec<u32> {
        self.iter().map(|b| b as u32).collect()
    }

    pub fn as_map(&self) -> &BitString {
        &self.map
    }

    /// Indices not in the set, in increasing order.
    pub fn missing(&self) -> Vec<u32> {
        (0..self.map.len())
            .filter(|&b| !self.map.get(b))
            .map(|b| b as u32)
            .collect()
    }
}

/// Outcome of the placement phase: which bits of which file every cache holds.
///
/// Also records the public per-cache seeds, from which anyone can re-derive
/// the same index sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CacheContents {
    num_files: usize,
    file_bits: usize,
    seeds: Vec<u64>,
    sets: Vec<CachedSet>,
}

impl CacheContents {
    pub(crate) fn from_parts(
        num_files: usize,
        file_bits: usize,
        seeds: Vec<u64>,
        sets: Vec<CachedSet>,
    ) -> Self {
        debug_assert_eq!(sets.len(), seeds.len() * num_files);
        Self {
            num_files,
            file_bits,
            seeds,
            sets,
        }
    }

    pub fn num_users(&self) -> usize {
        self.seeds.len()
    }

    pub fn num_files(&self) -> usize {
        self.num_files
    }

    pub fn file_bits(&self) -> usize {
        self.file_bits
    }

    /// Public placement seed of each cache.
    pub fn seeds(&self) -> &[u64] {
        &self.seeds
    }

    #[inline]
    pub fn set(&self, user: usize, file: usize) -> &CachedSet {
        &self.sets[user * self.num_files + file]
    }

    #[inline]
    pub fn holds(&self, user: usize, file: usize, bit: usize) -> bool {
        self.set(user, file).contains(bit)
    }

    pub fn user_total_bits(&self, user: usize) -> usize {
        (0..self.num_files).map(|n| self.set(user, n).len()).sum()
    }

    /// Keeps only the listed caches, renumbered in the given order.
    pub fn select_users(&self, users: &[usize]) -> CacheContents {
        let seeds = users.iter().map(|&k| self.seeds[k]).collect();
        let sets = users
            .iter()
            .flat_map(|&k| (0..self.num_files).map(move |n| self.set(k, n).clone()))
            .collect();
        CacheContents::from_parts(self.num_files, self.file_bits, seeds, sets)
    }
}
