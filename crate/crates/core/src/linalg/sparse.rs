use std::cmp::Ordering;

use super::scalar::Scalar;

/// A sparse vector: `(index, coefficient)` pairs, strictly increasing in
/// index, no stored zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SparseVec {
    entries: Vec<(usize, Scalar)>,
}

impl SparseVec {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn unit(index: usize, one: Scalar) -> Self {
        SparseVec {
            entries: vec![(index, one)],
        }
    }

    /// Builds from unsorted pairs, summing duplicates and dropping zeros.
    pub fn from_pairs(mut pairs: Vec<(usize, Scalar)>) -> Self {
        pairs.sort_by_key(|(i, _)| *i);
        let mut entries: Vec<(usize, Scalar)> = Vec::with_capacity(pairs.len());
        for (i, c) in pairs {
            match entries.last_mut() {
                Some((j, acc)) if *j == i => *acc += &c,
                _ => entries.push((i, c)),
            }
        }
        entries.retain(|(_, c)| !c.is_zero());
        SparseVec { entries }
    }

    /// Builds from pairs already sorted by strictly increasing index.
    pub fn from_sorted(entries: Vec<(usize, Scalar)>) -> Self {
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        let entries = entries.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        SparseVec { entries }
    }

    pub fn from_dense(values: &[Scalar]) -> Self {
        SparseVec {
            entries: values
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| (i, c.clone()))
                .collect(),
        }
    }

    pub fn to_dense(&self, len: usize, zero: &Scalar) -> Vec<Scalar> {
        let mut out = vec![zero.clone(); len];
        for (i, c) in &self.entries {
            out[*i] = c.clone();
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[(usize, Scalar)] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<(usize, Scalar)> {
        self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Scalar)> + '_ {
        self.entries.iter().map(|(i, c)| (*i, c))
    }

    pub fn leading(&self) -> Option<(usize, &Scalar)> {
        self.entries.first().map(|(i, c)| (*i, c))
    }

    pub fn get(&self, index: usize) -> Option<&Scalar> {
        self.entries
            .binary_search_by_key(&index, |(i, _)| *i)
            .ok()
            .map(|k| &self.entries[k].1)
    }

    pub fn scale(&self, c: &Scalar) -> SparseVec {
        if c.is_zero() {
            return SparseVec::new();
        }
        SparseVec {
            entries: self.entries.iter().map(|(i, x)| (*i, x * c)).collect(),
        }
    }

    pub fn neg(&self) -> SparseVec {
        SparseVec {
            entries: self.entries.iter().map(|(i, x)| (*i, -x)).collect(),
        }
    }

    /// Reindexes every entry; `f` must be strictly monotone for the result to
    /// stay sorted, otherwise use [`SparseVec::map_indices_unsorted`].
    pub fn map_indices(&self, f: impl Fn(usize) -> usize) -> SparseVec {
        SparseVec {
            entries: self.entries.iter().map(|(i, c)| (f(*i), c.clone())).collect(),
        }
    }

    pub fn map_indices_unsorted(&self, f: impl Fn(usize) -> usize) -> SparseVec {
        SparseVec::from_pairs(self.entries.iter().map(|(i, c)| (f(*i), c.clone())).collect())
    }

    pub fn shift(&self, offset: usize) -> SparseVec {
        self.map_indices(|i| i + offset)
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, c: &Scalar, other: &SparseVec) -> SparseVec {
        if c.is_zero() || other.is_zero() {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut a, mut b) = (self.entries.iter().peekable(), other.entries.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (Some((i, x)), Some((j, y))) => match i.cmp(j) {
                    Ordering::Less => {
                        out.push((*i, x.clone()));
                        a.next();
                    }
                    Ordering::Greater => {
                        out.push((*j, c * y));
                        b.next();
                    }
                    Ordering::Equal => {
                        let mut s = x.clone();
                        s.add_mul(c, y);
                        if !s.is_zero() {
                            out.push((*i, s));
                        }
                        a.next();
                        b.next();
                    }
                },
                (Some((i, x)), None) => {
                    out.push((*i, x.clone()));
                    a.next();
                }
                (None, Some((j, y))) => {
                    out.push((*j, c * y));
                    b.next();
                }
                (None, None) => break,
            }
        }
        SparseVec { entries: out }
    }

    pub fn add(&self, other: &SparseVec) -> SparseVec {
        match other.entries.first() {
            None => self.clone(),
            Some((_, c)) => {
                let one = c.field().one();
                self.add_scaled(&one, other)
            }
        }
    }

    pub fn sub(&self, other: &SparseVec) -> SparseVec {
        match other.entries.first() {
            None => self.clone(),
            Some((_, c)) => {
                let minus_one = -&c.field().one();
                self.add_scaled(&minus_one, other)
            }
        }
    }

    pub fn dot(&self, other: &SparseVec) -> Option<Scalar> {
        let mut acc: Option<Scalar> = None;
        let (mut a, mut b) = (self.entries.iter().peekable(), other.entries.iter().peekable());
        while let (Some((i, x)), Some((j, y))) = (a.peek(), b.peek()) {
            match i.cmp(j) {
                Ordering::Less => {
                    a.next();
                }
                Ordering::Greater => {
                    b.next();
                }
                Ordering::Equal => {
                    let p = x * y;
                    acc = Some(match acc {
                        Some(s) => &s + &p,
                        None => p,
                    });
                    a.next();
                    b.next();
                }
            }
        }
        acc
    }

    /// Kronecker product with index `i * other_len + j`.
    pub fn kron(&self, other: &SparseVec, other_len: usize) -> SparseVec {
        let mut out = Vec::with_capacity(self.nnz() * other.nnz());
        for (i, x) in &self.entries {
            for (j, y) in &other.entries {
                out.push((i * other_len + j, x * y));
            }
        }
        SparseVec { entries: out }
    }

    pub fn truncate_below(&self, bound: usize) -> SparseVec {
        SparseVec {
            entries: self.entries.iter().filter(|(i, _)| *i < bound).cloned().collect(),
        }
    }
}

/// Accumulates `Σ c_k v_k` without re-merging after every term.
#[derive(Default)]
pub struct Accumulator {
    pairs: Vec<(usize, Scalar)>,
}

impl Accumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, index: usize, c: Scalar) {
        if !c.is_zero() {
            self.pairs.push((index, c));
        }
    }

    pub fn add_scaled(&mut self, c: &Scalar, v: &SparseVec) {
        if c.is_zero() {
            return;
        }
        if c.is_one() {
            self.pairs.extend(v.entries.iter().cloned());
        } else {
            self.pairs.extend(v.entries.iter().map(|(i, x)| (*i, x * c)));
        }
    }

    pub fn add_scaled_shifted(&mut self, c: &Scalar, v: &SparseVec, offset: usize) {
        if c.is_zero() {
            return;
        }
        self.pairs
            .extend(v.entries.iter().map(|(i, x)| (*i + offset, x * c)));
    }

    pub fn finish(self) -> SparseVec {
        SparseVec::from_pairs(self.pairs)
    }
}
