//! Finite-dimensional graded pieces of `A = T(V)/I` up to a degree bound.
//!
//! The degree-`d` piece of the ideal is the span of all `u·r·v` in the word
//! basis of `V^{⊗d}`. Word columns are laid out greatest word first, so the
//! pivots of the reduced echelon form are the deglex-leading words of the
//! ideal and the remaining ("normal") words form the basis of `A_d`.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{Accumulator, Echelon, FieldSpec, Scalar, SparseVec};
use crate::presentation::{NCPoly, Presentation, Word};

/// Default cap on `dim V^{⊗d}`.
pub const DEFAULT_WORD_CAP: usize = 200_000;

#[derive(Clone, Debug)]
struct Piece {
    /// Word indices of the normal words, ascending.
    normal_words: Vec<usize>,
    /// Normal form of every word of this degree, over the normal basis.
    nf: Vec<SparseVec>,
}

#[derive(Clone, Debug)]
pub struct GradedModel {
    presentation: Presentation,
    max_degree: usize,
    ngens: usize,
    pieces: Vec<Piece>,
    ideal_dims: Vec<usize>,
}

/// A homogeneous element of `A`: coordinates over the normal basis of
/// `A_degree`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Element {
    pub degree: usize,
    pub coords: SparseVec,
}

impl Element {
    pub fn zero(degree: usize) -> Self {
        Element {
            degree,
            coords: SparseVec::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_zero()
    }
}

impl GradedModel {
    pub fn build(p: &Presentation, max_degree: usize) -> Result<Self> {
        Self::build_with_cap(p, max_degree, DEFAULT_WORD_CAP)
    }

    pub fn build_with_cap(p: &Presentation, max_degree: usize, cap: usize) -> Result<Self> {
        let n = p.ngens();
        let mut pieces = Vec::with_capacity(max_degree + 1);
        let mut ideal_dims = Vec::with_capacity(max_degree + 1);
        for d in 0..=max_degree {
            let nwords = word_count(n, d)
                .filter(|&w| w <= cap)
                .ok_or_else(|| {
                    Error::ResourceCap(format!(
                        "{n} generators in degree {d} exceed the cap of {cap} words"
                    ))
                })?;
            let (piece, ideal_dim) = build_piece(p, d, nwords);
            pieces.push(piece);
            ideal_dims.push(ideal_dim);
        }
        Ok(GradedModel {
            presentation: p.clone(),
            max_degree,
            ngens: n,
            pieces,
            ideal_dims,
        })
    }

    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    pub fn field(&self) -> FieldSpec {
        self.presentation.field
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn ngens(&self) -> usize {
        self.ngens
    }

    pub fn names(&self) -> &[String] {
        &self.presentation.generators
    }

    /// `dim A_d`; zero beyond the window.
    pub fn dim(&self, d: usize) -> usize {
        self.pieces.get(d).map_or(0, |p| p.normal_words.len())
    }

    pub fn ideal_dim(&self, d: usize) -> usize {
        self.ideal_dims[d]
    }

    /// `(dim A_0, …, dim A_D)`.
    pub fn hilbert_function(&self) -> Vec<usize> {
        (0..=self.max_degree).map(|d| self.dim(d)).collect()
    }

    fn check_degree(&self, d: usize) -> Result<()> {
        if d > self.max_degree {
            return Err(Error::Bounds {
                degree: d,
                max: self.max_degree,
            });
        }
        Ok(())
    }

    /// The `pos`-th normal word of degree `d`.
    pub fn normal_word(&self, d: usize, pos: usize) -> Word {
        Word::from_index(self.pieces[d].normal_words[pos], d, self.ngens)
    }

    pub fn normal_word_index(&self, d: usize, pos: usize) -> usize {
        self.pieces[d].normal_words[pos]
    }

    /// Normal form of the word with the given index in degree `d`.
    pub fn nf_index(&self, d: usize, word_index: usize) -> &SparseVec {
        &self.pieces[d].nf[word_index]
    }

    pub fn nf_word(&self, w: &Word) -> Result<&SparseVec> {
        self.check_degree(w.degree())?;
        Ok(self.nf_index(w.degree(), w.index(self.ngens)))
    }

    /// Product of two normal basis elements, over the normal basis of
    /// `A_{da+db}`. Requires `da + db <= D`.
    pub fn mul_basis(&self, da: usize, pa: usize, db: usize, pb: usize) -> &SparseVec {
        let wa = self.pieces[da].normal_words[pa];
        let wb = self.pieces[db].normal_words[pb];
        let idx = wa * self.ngens.pow(db as u32) + wb;
        &self.pieces[da + db].nf[idx]
    }

    /// Left multiplication of a degree-`d` coordinate vector by the
    /// generator `g`.
    pub fn left_mul_gen(&self, g: usize, d: usize, v: &SparseVec) -> SparseVec {
        let shift = self.ngens.pow(d as u32);
        let mut acc = Accumulator::new();
        for (pos, c) in v.iter() {
            let idx = g * shift + self.pieces[d].normal_words[pos];
            acc.add_scaled(c, &self.pieces[d + 1].nf[idx]);
        }
        acc.finish()
    }

    /// Coordinates of `a · b` for coordinate vectors in degrees `da`, `db`.
    pub fn mul_coords(&self, da: usize, a: &SparseVec, db: usize, b: &SparseVec) -> SparseVec {
        let mut acc = Accumulator::new();
        for (pa, x) in a.iter() {
            for (pb, y) in b.iter() {
                acc.add_scaled(&(x * y), self.mul_basis(da, pa, db, pb));
            }
        }
        acc.finish()
    }

    pub fn normal_form(&self, q: &NCPoly) -> Result<Element> {
        if q.is_zero() {
            return Ok(Element::zero(0));
        }
        let d = q
            .homogeneous_degree()
            .ok_or_else(|| Error::Contract("normal form of an inhomogeneous polynomial".into()))?;
        self.check_degree(d)?;
        let mut acc = Accumulator::new();
        for (w, c) in q.terms() {
            acc.add_scaled(c, self.nf_index(d, w.index(self.ngens)));
        }
        Ok(Element {
            degree: d,
            coords: acc.finish(),
        })
    }

    pub fn multiply(&self, a: &Element, b: &Element) -> Result<Element> {
        self.check_degree(a.degree + b.degree)?;
        Ok(Element {
            degree: a.degree + b.degree,
            coords: self.mul_coords(a.degree, &a.coords, b.degree, &b.coords),
        })
    }

    pub fn one(&self) -> Element {
        Element {
            degree: 0,
            coords: SparseVec::unit(0, self.field().one()),
        }
    }

    pub fn generator(&self, g: usize) -> Element {
        Element {
            degree: 1,
            coords: self.nf_index(1, g).clone(),
        }
    }

    /// The element as a polynomial in normal words.
    pub fn to_poly(&self, e: &Element) -> NCPoly {
        NCPoly::from_terms(
            self.field(),
            e.coords
                .iter()
                .map(|(pos, c)| (self.normal_word(e.degree, pos), c.clone())),
        )
    }

    pub fn display_coords(&self, degree: usize, coords: &SparseVec) -> String {
        let e = Element {
            degree,
            coords: coords.clone(),
        };
        self.to_poly(&e).display(self.names()).to_string()
    }

    pub fn display<'a>(&'a self, e: &'a Element) -> impl fmt::Display + 'a {
        ElementDisplay { model: self, e }
    }
}

struct ElementDisplay<'a> {
    model: &'a GradedModel,
    e: &'a Element,
}

impl fmt::Display for ElementDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.model.to_poly(self.e).display(self.model.names()))
    }
}

fn word_count(n: usize, d: usize) -> Option<usize> {
    n.checked_pow(d as u32)
}

fn build_piece(p: &Presentation, d: usize, nwords: usize) -> (Piece, usize) {
    let field = p.field;
    let n = p.ngens();
    let col = |w: usize| nwords - 1 - w;
    let mut ech = Echelon::new(nwords);
    for r in &p.relations {
        let len = r.homogeneous_degree().expect("validated relation");
        if len > d {
            continue;
        }
        let terms: Vec<(usize, Scalar)> = r.terms().map(|(w, c)| (w.index(n), c.clone())).collect();
        for a in 0..=d - len {
            let b = d - len - a;
            let (nu, nv) = (n.pow(a as u32), n.pow(b as u32));
            let scale_r = nv;
            let scale_u = n.pow((len + b) as u32);
            for u in 0..nu {
                for v in 0..nv {
                    let row = SparseVec::from_pairs(
                        terms
                            .iter()
                            .map(|(w, c)| (col(u * scale_u + w * scale_r + v), c.clone()))
                            .collect(),
                    );
                    ech.insert(row);
                }
            }
        }
    }
    let rref = ech.into_rref();
    let ideal_dim = rref.rank();
    let mut is_pivot = vec![false; nwords];
    for &c in &rref.pivots {
        is_pivot[nwords - 1 - c] = true;
    }
    let normal_words: Vec<usize> = (0..nwords).filter(|&w| !is_pivot[w]).collect();
    let mut pos_of = vec![usize::MAX; nwords];
    for (k, &w) in normal_words.iter().enumerate() {
        pos_of[w] = k;
    }
    let one = field.one();
    let mut nf: Vec<SparseVec> = (0..nwords)
        .map(|w| {
            if is_pivot[w] {
                SparseVec::new()
            } else {
                SparseVec::unit(pos_of[w], one.clone())
            }
        })
        .collect();
    for (row, &c) in rref.rows.iter().zip(&rref.pivots) {
        let w = nwords - 1 - c;
        nf[w] = SparseVec::from_pairs(
            row.iter()
                .skip(1)
                .map(|(c2, x)| (pos_of[nwords - 1 - c2], -x))
                .collect(),
        );
    }
    (Piece { normal_words, nf }, ideal_dim)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::parse_presentation;

    fn model(text: &str, d: usize) -> GradedModel {
        GradedModel::build(&parse_presentation(text).unwrap(), d).unwrap()
    }

    fn poly(m: &GradedModel, text: &str) -> NCPoly {
        let p = parse_presentation(&format!(
            "field {}\ngens {}\nrel {text}",
            m.field(),
            m.names().join(" ")
        ))
        .unwrap();
        p.relations[0].clone()
    }

    #[test]
    fn example_one_dimensions() {
        let m = model("field Q\ngens x y\nrel x*x*y\nrel y*y*x", 4);
        assert_eq!(m.hilbert_function(), vec![1, 2, 4, 6, 8]);
    }

    #[test]
    fn free_algebra_dimensions() {
        let m = model("field Q\ngens x y", 3);
        assert_eq!(m.hilbert_function(), vec![1, 2, 4, 8]);
    }

    #[test]
    fn example_two_dimensions() {
        let m = model("field Q\ngens w x y u\nrel y*u\nrel u*x - x*u\nrel u*w", 2);
        assert_eq!(m.hilbert_function(), vec![1, 4, 13]);
    }

    #[test]
    fn polynomial_ring_dimensions() {
        let m = model("field Q\ngens x y\nrel x*y - y*x", 4);
        assert_eq!(m.hilbert_function(), vec![1, 2, 3, 4, 5]);
    }

    #[test]
    fn normal_forms_in_example_one() {
        let m = model("field Q\ngens x y\nrel x*x*y\nrel y*y*x", 4);
        // x*x*y is a relation
        let r = m.normal_form(&poly(&m, "x*x*y")).unwrap();
        assert!(r.is_zero());
        // x*y*x is itself normal
        let e = m.normal_form(&poly(&m, "x*y*x")).unwrap();
        assert_eq!(m.display(&e).to_string(), "x*y*x");
        let x = m.generator(0);
        let y = m.generator(1);
        let xy = m.multiply(&x, &y).unwrap();
        assert!(m.multiply(&x, &xy).unwrap().is_zero());
        assert_eq!(m.multiply(&m.one(), &xy).unwrap(), xy);
    }

    #[test]
    fn commutator_vanishes_in_example_two() {
        let m = model("field Q\ngens w x y u\nrel y*u\nrel u*x - x*u\nrel u*w", 3);
        let (x, u) = (m.generator(1), m.generator(3));
        let ux = m.multiply(&u, &x).unwrap();
        let xu = m.multiply(&x, &u).unwrap();
        assert_eq!(ux, xu);
    }

    #[test]
    fn degree_overflow_is_an_error() {
        let m = model("field Q\ngens x y", 2);
        let x = m.generator(0);
        let xx = m.multiply(&x, &x).unwrap();
        assert!(matches!(m.multiply(&xx, &x), Err(Error::Bounds { .. })));
    }

    #[test]
    fn cap_is_enforced() {
        let p = parse_presentation("field Q\ngens a b c").unwrap();
        assert!(matches!(
            GradedModel::build_with_cap(&p, 5, 100),
            Err(Error::ResourceCap(_))
        ));
    }
}
