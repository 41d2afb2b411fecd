//! Algebra presentations `A = T(V)/I` and Ore data `(σ, δ)`.
//!
//! File format (line oriented, `#` starts a comment):
//!
//! ```text
//! field Q            # or: field F 7
//! gens x y
//! rel x*x*y
//! rel y*y*x - 2*x*y*x
//! ```
//!
//! Ore files hold `sigma <gen> -> <linear combination>` and
//! `delta <gen> -> <degree-2 polynomial>` lines. Missing lines default to
//! `σ(g) = g` and `δ(g) = 0`.

mod parse;
mod poly;

use std::fmt;

pub use parse::{parse_ore, parse_polynomial, parse_presentation};
pub use poly::{NCPoly, Word};

use crate::error::{Error, Result};
use crate::linalg::{FieldSpec, Matrix};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub field: FieldSpec,
    pub generators: Vec<String>,
    pub relations: Vec<NCPoly>,
}

impl Presentation {
    pub fn new(field: FieldSpec, generators: Vec<String>, relations: Vec<NCPoly>) -> Result<Self> {
        for (k, g) in generators.iter().enumerate() {
            if generators[..k].contains(g) {
                return Err(Error::Presentation(format!("duplicate generator '{g}'")));
            }
        }
        if generators.len() > u16::MAX as usize {
            return Err(Error::Presentation("too many generators".into()));
        }
        for (k, r) in relations.iter().enumerate() {
            if r.field() != field {
                return Err(Error::Presentation(format!("relation {} is over the wrong field", k + 1)));
            }
            match r.homogeneous_degree() {
                Some(d) if d >= 2 => {}
                Some(d) => {
                    return Err(Error::Presentation(format!(
                        "relation {} has degree {d} (must be at least 2)",
                        k + 1
                    )))
                }
                None if r.is_zero() => {
                    return Err(Error::Presentation(format!("relation {} is zero", k + 1)))
                }
                None => {
                    return Err(Error::Presentation(format!(
                        "relation {} is inhomogeneous",
                        k + 1
                    )))
                }
            }
            if r.terms().any(|(w, _)| w.letters().any(|g| g >= generators.len())) {
                return Err(Error::Presentation(format!(
                    "relation {} uses an unknown generator",
                    k + 1
                )));
            }
        }
        Ok(Presentation {
            field,
            generators,
            relations,
        })
    }

    pub fn ngens(&self) -> usize {
        self.generators.len()
    }

    pub fn max_relation_degree(&self) -> usize {
        self.relations
            .iter()
            .filter_map(NCPoly::homogeneous_degree)
            .max()
            .unwrap_or(0)
    }

    /// All relations have degree 2.
    pub fn is_quadratic(&self) -> bool {
        self.relations.iter().all(|r| r.homogeneous_degree() == Some(2))
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g == name)
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "field {}", self.field)?;
        writeln!(f, "gens {}", self.generators.join(" "))?;
        for r in &self.relations {
            writeln!(f, "rel {}", r.display(&self.generators))?;
        }
        Ok(())
    }
}

/// A graded automorphism on generators and a degree-one σ-derivation given
/// on generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OreSpec {
    /// Row `g` holds the coefficients of `σ(g)` in the generators.
    pub sigma: Matrix,
    /// `δ(g)` for every generator, homogeneous of degree 2 or zero.
    pub delta: Vec<NCPoly>,
}

impl OreSpec {
    pub fn new(p: &Presentation, sigma: Matrix, delta: Vec<NCPoly>) -> Result<Self> {
        let n = p.ngens();
        if sigma.nrows() != n || sigma.ncols() != n || delta.len() != n {
            return Err(Error::Ore("shape does not match the generator count".into()));
        }
        if sigma.rank() != n {
            return Err(Error::Ore("sigma is singular on the generators".into()));
        }
        for (g, d) in delta.iter().enumerate() {
            if !d.is_zero() && d.homogeneous_degree() != Some(2) {
                return Err(Error::Ore(format!(
                    "delta({}) is not homogeneous of degree 2",
                    p.generators[g]
                )));
            }
        }
        Ok(OreSpec { sigma, delta })
    }

    /// `σ = id`, `δ = 0`.
    pub fn trivial(p: &Presentation) -> Self {
        let n = p.ngens();
        OreSpec {
            sigma: Matrix::identity(p.field, n),
            delta: vec![NCPoly::zero(p.field); n],
        }
    }

    /// `σ(g)` as a degree-1 polynomial.
    pub fn sigma_image(&self, g: usize) -> NCPoly {
        let field = self.sigma.field();
        NCPoly::from_terms(
            field,
            (0..self.sigma.ncols()).map(|k| (Word::letter(k), self.sigma[(g, k)].clone())),
        )
    }

    pub fn to_text(&self, p: &Presentation) -> String {
        let mut out = String::new();
        let names = &p.generators;
        for g in 0..p.ngens() {
            out.push_str(&format!("sigma {} -> {}\n", names[g], self.sigma_image(g).display(names)));
        }
        for (g, d) in self.delta.iter().enumerate() {
            out.push_str(&format!("delta {} -> {}\n", names[g], d.display(names)));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_presentation() -> impl Strategy<Value = Presentation> {
        let q = FieldSpec::Rationals;
        (1usize..4).prop_flat_map(move |n| {
            let rel = (2usize..4).prop_flat_map(move |d| {
                prop::collection::vec((prop::collection::vec(0..n as u16, d..=d), -3i64..4), 1..4)
            });
            prop::collection::vec(rel, 0..4).prop_map(move |rels| {
                let names = ["a", "b", "c"][..n].iter().map(|s| s.to_string()).collect();
                let rels = rels
                    .into_iter()
                    .map(|terms| NCPoly::from_terms(q, terms.into_iter().map(|(w, c)| (Word(w), q.int(c)))))
                    .filter(|r| !r.is_zero())
                    .collect();
                Presentation::new(q, names, rels).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(p in arb_presentation()) {
            let text = p.to_string();
            let back = parse_presentation(&text).unwrap();
            prop_assert_eq!(back, p);
        }

        #[test]
        fn whitespace_and_comments_are_irrelevant(p in arb_presentation()) {
            let noisy: String = p
                .to_string()
                .lines()
                .map(|l| format!("   {}   # trailing note\n# full-line comment\n\n", l.replace(' ', "  ")))
                .collect();
            prop_assert_eq!(parse_presentation(&noisy).unwrap(), p);
        }
    }

    #[test]
    fn ore_round_trip() {
        let p = parse_presentation("field Q\ngens x y\nrel x*x*y\nrel y*y*x\n").unwrap();
        let o = parse_ore("sigma x -> y\nsigma y -> x\ndelta x -> x*y\ndelta y -> y*x\n", &p).unwrap();
        assert_eq!(parse_ore(&o.to_text(&p), &p).unwrap(), o);
    }
}
