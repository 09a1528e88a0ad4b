//! Fixed-capacity bitset used for edge membership and search candidate sets.

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Bitset {
    bits: usize,
    words: Vec<u64>,
}

impl Bitset {
    pub fn new(bits: usize) -> Bitset {
        Bitset {
            bits,
            words: vec![0; bits.div_ceil(64)],
        }
    }

    pub fn capacity(&self) -> usize {
        self.bits
    }

    pub fn insert(&mut self, i: usize) {
        debug_assert!(i < self.bits);
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn remove(&mut self, i: usize) {
        debug_assert!(i < self.bits);
        self.words[i / 64] &= !(1 << (i % 64));
    }

    pub fn contains(&self, i: usize) -> bool {
        debug_assert!(i < self.bits);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_subset_of(&self, other: &Bitset) -> bool {
        debug_assert_eq!(self.bits, other.bits);
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn intersect_with(&mut self, other: &Bitset) {
        debug_assert_eq!(self.bits, other.bits);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn union_with(&mut self, other: &Bitset) {
        debug_assert_eq!(self.bits, other.bits);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn subtract(&mut self, other: &Bitset) {
        debug_assert_eq!(self.bits, other.bits);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    /// Number of elements in self that are not in other.
    pub fn count_minus(&self, other: &Bitset) -> usize {
        debug_assert_eq!(self.bits, other.bits);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & !b).count_ones() as usize)
            .sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * 64 + b)
                }
            })
        })
    }

    /// Lowest set bit, if any.
    pub fn first(&self) -> Option<usize> {
        self.iter().next()
    }
}

impl FromIterator<usize> for Bitset {
    /// Collect indices into a bitset sized to the largest index + 1.
    /// Mostly a test convenience; prefer `new` + `insert` with a known capacity.
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Bitset {
        let items: Vec<usize> = iter.into_iter().collect();
        let bits = items.iter().max().map_or(0, |&m| m + 1);
        let mut s = Bitset::new(bits);
        for i in items {
            s.insert(i);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_set_operations() {
        let mut a = Bitset::new(130);
        a.insert(0);
        a.insert(64);
        a.insert(129);
        assert_eq!(a.count(), 3);
        assert!(a.contains(64));
        assert!(!a.contains(63));
        let mut b = Bitset::new(130);
        b.insert(64);
        assert!(b.is_subset_of(&a));
        assert!(!a.is_subset_of(&b));
        a.subtract(&b);
        assert_eq!(a.iter().collect::<Vec<_>>(), vec![0, 129]);
        assert_eq!(a.first(), Some(0));
    }

    #[test]
    fn count_minus_matches_subtract() {
        let a: Bitset = [1usize, 5, 9, 70].into_iter().collect();
        let mut b = Bitset::new(a.capacity());
        b.insert(5);
        b.insert(70);
        assert_eq!(a.count_minus(&b), 2);
    }
}
