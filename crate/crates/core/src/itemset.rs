use core::fmt;

/// Largest number of items a single instance may carry.
pub const MAX_ITEMS: usize = 63;

/// A set of item indices in `0..MAX_ITEMS`, stored as a bitmask (item `i` is bit `i`).
#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(into = "alloc::vec::Vec<usize>", try_from = "alloc::vec::Vec<usize>"))]
pub struct ItemSet(u64);

impl ItemSet {
    pub const EMPTY: ItemSet = ItemSet(0);

    #[inline]
    pub const fn from_bits(bits: u64) -> Self {
        ItemSet(bits)
    }

    #[inline]
    pub const fn bits(self) -> u64 {
        self.0
    }

    /// All items `0..m`.
    #[inline]
    pub const fn full(m: usize) -> Self {
        debug_assert!(m <= MAX_ITEMS);
        ItemSet((1u64 << m) - 1)
    }

    #[inline]
    pub const fn singleton(e: usize) -> Self {
        debug_assert!(e < MAX_ITEMS);
        ItemSet(1u64 << e)
    }

    #[inline]
    pub const fn contains(self, e: usize) -> bool {
        e < 64 && self.0 >> e & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, e: usize) {
        self.0 |= 1u64 << e;
    }

    #[inline]
    pub fn remove(&mut self, e: usize) {
        self.0 &= !(1u64 << e);
    }

    /// `self + e`
    #[inline]
    #[must_use]
    pub const fn with(self, e: usize) -> Self {
        ItemSet(self.0 | 1u64 << e)
    }

    /// `self - e`
    #[inline]
    #[must_use]
    pub const fn without(self, e: usize) -> Self {
        ItemSet(self.0 & !(1u64 << e))
    }

    #[inline]
    #[must_use]
    pub const fn union(self, other: ItemSet) -> Self {
        ItemSet(self.0 | other.0)
    }

    #[inline]
    #[must_use]
    pub const fn intersection(self, other: ItemSet) -> Self {
        ItemSet(self.0 & other.0)
    }

    #[inline]
    #[must_use]
    pub const fn difference(self, other: ItemSet) -> Self {
        ItemSet(self.0 & !other.0)
    }

    #[inline]
    pub const fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    #[inline]
    pub const fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub const fn is_subset(self, other: ItemSet) -> bool {
        self.0 & !other.0 == 0
    }

    #[inline]
    pub const fn is_disjoint(self, other: ItemSet) -> bool {
        self.0 & other.0 == 0
    }

    /// Lowest item in the set.
    #[inline]
    pub const fn first(self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            Some(self.0.trailing_zeros() as usize)
        }
    }

    /// One past the highest item, i.e. the smallest `m` with `self ⊆ full(m)`.
    #[inline]
    pub const fn bound(self) -> usize {
        64 - self.0.leading_zeros() as usize
    }

    /// Items in increasing order.
    #[inline]
    pub fn iter(self) -> Iter {
        Iter(self.0)
    }

    /// Every subset of `self`, in increasing bitmask order.
    pub fn subsets(self) -> Subsets {
        Subsets { mask: self.0, next: Some(0) }
    }
}

impl fmt::Debug for ItemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<usize> for ItemSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = ItemSet::EMPTY;
        for e in iter {
            s.insert(e);
        }
        s
    }
}

impl<const N: usize> From<[usize; N]> for ItemSet {
    fn from(items: [usize; N]) -> Self {
        items.into_iter().collect()
    }
}

impl IntoIterator for ItemSet {
    type Item = usize;
    type IntoIter = Iter;

    fn into_iter(self) -> Iter {
        self.iter()
    }
}

#[cfg(feature = "serde")]
impl From<ItemSet> for alloc::vec::Vec<usize> {
    fn from(s: ItemSet) -> Self {
        s.iter().collect()
    }
}

#[cfg(feature = "serde")]
impl TryFrom<alloc::vec::Vec<usize>> for ItemSet {
    type Error = alloc::string::String;

    fn try_from(items: alloc::vec::Vec<usize>) -> Result<Self, Self::Error> {
        match items.iter().find(|&&e| e >= MAX_ITEMS) {
            Some(e) => Err(alloc::format!("item {e} exceeds the {MAX_ITEMS}-item limit")),
            None => Ok(items.into_iter().collect()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Iter(u64);

impl Iterator for Iter {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let e = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(e)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Iter {}

/// Submask enumeration: `(sub - mask) & mask` steps through all submasks in increasing order.
#[derive(Clone, Debug)]
pub struct Subsets {
    mask: u64,
    next: Option<u64>,
}

impl Iterator for Subsets {
    type Item = ItemSet;

    fn next(&mut self) -> Option<ItemSet> {
        let cur = self.next?;
        let step = cur.wrapping_sub(self.mask) & self.mask;
        self.next = if step == 0 { None } else { Some(step) };
        Some(ItemSet(cur))
    }
}
