use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::linalg::{FieldSpec, Scalar};

/// A word in the generators, stored as generator indices.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(pub Vec<u16>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letter(g: usize) -> Self {
        Word(vec![g as u16])
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn letters(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().map(|&g| g as usize)
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// Position of this word among all words of its length, in increasing
    /// degree-lexicographic order (first letter most significant).
    pub fn index(&self, ngens: usize) -> usize {
        self.0.iter().fold(0, |acc, &g| acc * ngens + g as usize)
    }

    pub fn from_index(mut index: usize, degree: usize, ngens: usize) -> Word {
        let mut letters = vec![0u16; degree];
        for slot in letters.iter_mut().rev() {
            *slot = (index % ngens) as u16;
            index /= ngens;
        }
        Word(letters)
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> impl fmt::Display + 'a {
        WordDisplay { word: self, names }
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

struct WordDisplay<'a> {
    word: &'a Word,
    names: &'a [String],
}

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.0.is_empty() {
            return write!(f, "1");
        }
        for (k, g) in self.word.letters().enumerate() {
            if k > 0 {
                write!(f, "*")?;
            }
            write!(f, "{}", self.names[g])?;
        }
        Ok(())
    }
}

/// A noncommutative polynomial: a finite sum of scalar multiples of words.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NCPoly {
    field: FieldSpec,
    terms: BTreeMap<Word, Scalar>,
}

impl NCPoly {
    pub fn zero(field: FieldSpec) -> Self {
        NCPoly {
            field,
            terms: BTreeMap::new(),
        }
    }

    pub fn word(field: FieldSpec, w: Word) -> Self {
        let mut p = NCPoly::zero(field);
        p.add_term(w, field.one());
        p
    }

    pub fn from_terms(field: FieldSpec, terms: impl IntoIterator<Item = (Word, Scalar)>) -> Self {
        let mut p = NCPoly::zero(field);
        for (w, c) in terms {
            p.add_term(w, c);
        }
        p
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn add_term(&mut self, w: Word, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&w) {
            Some(acc) => {
                *acc += &c;
                if acc.is_zero() {
                    self.terms.remove(&w);
                }
            }
            None => {
                self.terms.insert(w, c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in increasing degree-lexicographic order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Word, &Scalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The common degree of all terms, if the polynomial is homogeneous and
    /// nonzero.
    pub fn homogeneous_degree(&self) -> Option<usize> {
        let mut degs = self.terms.keys().map(Word::degree);
        let d = degs.next()?;
        degs.all(|e| e == d).then_some(d)
    }

    pub fn add(&self, other: &NCPoly) -> NCPoly {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> NCPoly {
        NCPoly::from_terms(self.field, self.terms.iter().map(|(w, x)| (w.clone(), x * c)))
    }

    pub fn neg(&self) -> NCPoly {
        self.scale(&-&self.field.one())
    }

    pub fn sub(&self, other: &NCPoly) -> NCPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &NCPoly) -> NCPoly {
        let mut out = NCPoly::zero(self.field);
        for (u, a) in &self.terms {
            for (v, b) in &other.terms {
                out.add_term(u.concat(v), a * b);
            }
        }
        out
    }

    /// Applies an algebra map of the free algebra given by images of letters.
    pub fn substitute(&self, images: &[NCPoly]) -> NCPoly {
        let mut out = NCPoly::zero(self.field);
        for (w, c) in &self.terms {
            let mut prod = NCPoly::word(self.field, Word::empty());
            for g in w.letters() {
                prod = prod.mul(&images[g]);
            }
            out = out.add(&prod.scale(c));
        }
        out
    }

    /// Renames letters through `map` (old index -> new index).
    pub fn relabel(&self, map: &[usize]) -> NCPoly {
        NCPoly::from_terms(
            self.field,
            self.terms
                .iter()
                .map(|(w, c)| (Word(w.letters().map(|g| map[g] as u16).collect()), c.clone())),
        )
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> impl fmt::Display + 'a {
        PolyDisplay { poly: self, names }
    }
}

struct PolyDisplay<'a> {
    poly: &'a NCPoly,
    names: &'a [String],
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        // Leading (largest) term first.
        for (k, (w, c)) in self.poly.terms.iter().rev().enumerate() {
            let negative = c.is_negative();
            let abs = if negative { -c } else { c.clone() };
            match (k, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let word = w.display(self.names).to_string();
            if w.degree() == 0 {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{word}")?;
            } else {
                write!(f, "{abs}*{word}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deglex_order() {
        let a = Word(vec![1]);
        let b = Word(vec![0, 0]);
        let c = Word(vec![0, 1]);
        assert!(a < b && b < c);
        assert_eq!(c.index(2), 1);
        assert_eq!(Word::from_index(5, 3, 2), Word(vec![1, 0, 1]));
    }

    #[test]
    fn display_signs() {
        let q = FieldSpec::Rationals;
        let names = vec!["x".to_string(), "y".to_string()];
        let p = NCPoly::from_terms(
            q,
            [
                (Word(vec![0, 1]), q.int(1)),
                (Word(vec![1, 0]), q.int(-2)),
            ],
        );
        assert_eq!(p.display(&names).to_string(), "-2*y*x + x*y");
    }
}
