//! Fixed-length packed bitsets used for adjacency rows and vertex subsets.

const WORD: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Bitset {
    words: Vec<u64>,
    len: usize,
}

impl Bitset {
    pub fn new(len: usize) -> Self {
        Bitset {
            words: vec![0; len.div_ceil(WORD)],
            len,
        }
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(len: usize, indices: I) -> Self {
        let mut set = Bitset::new(len);
        for i in indices {
            set.insert(i);
        }
        set
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Mask of valid bits in the final word.
    pub fn tail_mask(&self) -> u64 {
        match self.len % WORD {
            0 => u64::MAX,
            r => (1u64 << r) - 1,
        }
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / WORD] |= 1 << (i % WORD);
    }

    #[inline]
    pub fn remove(&mut self, i: usize) {
        self.words[i / WORD] &= !(1 << (i % WORD));
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        i < self.len && self.words[i / WORD] >> (i % WORD) & 1 == 1
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// `|self ∩ other|` without materializing the intersection.
    pub fn intersection_count(&self, other: &Bitset) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let bit = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(wi * WORD + bit)
            })
        })
    }

    /// Cyclic shift: bit `j` of the result is bit `(j - k) mod len` of `self`.
    pub fn rotate_up(&self, k: usize) -> Bitset {
        let n = self.len;
        if n == 0 {
            return self.clone();
        }
        let k = k % n;
        // Two back-to-back copies; the result is the window starting at n - k.
        let doubled = Bitset::from_indices(2 * n, self.iter_ones().flat_map(|i| [i, i + n]));
        let mut out = Bitset::new(n);
        let offset = n - k;
        for (wi, slot) in out.words.iter_mut().enumerate() {
            *slot = doubled.word_at(offset + wi * WORD);
        }
        let mask = out.tail_mask();
        if let Some(last) = out.words.last_mut() {
            *last &= mask;
        }
        out
    }

    /// 64 bits starting at bit position `pos`; bits past the end read as zero.
    fn word_at(&self, pos: usize) -> u64 {
        let (wi, shift) = (pos / WORD, pos % WORD);
        let lo = self.words.get(wi).copied().unwrap_or(0);
        if shift == 0 {
            return lo;
        }
        let hi = self.words.get(wi + 1).copied().unwrap_or(0);
        (lo >> shift) | (hi << (WORD - shift))
    }
}
