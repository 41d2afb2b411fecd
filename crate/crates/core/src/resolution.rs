//! Truncated minimal free resolutions of the trivial module and Betti tables.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::algebra::GradedModel;
use crate::error::{Error, Result};
use crate::linalg::{left_kernel, rank_of, Echelon, SparseVec};
use crate::module::{FreeMap, FreeModule};

/// `A ⊗ V_I → … → A ⊗ V_1 → A → k`, complete in internal degrees `<= D`.
#[derive(Clone, Debug)]
pub struct Resolution {
    model: Arc<GradedModel>,
    max_hdeg: usize,
    max_deg: usize,
    /// `modules[i]` is `A ⊗ V_i`.
    modules: Vec<FreeModule>,
    /// `maps[i - 1]` is the differential `A ⊗ V_i → A ⊗ V_{i-1}`.
    maps: Vec<FreeMap>,
}

pub fn minimal_resolution(model: Arc<GradedModel>, max_hdeg: usize, max_deg: usize) -> Result<Resolution> {
    if max_deg > model.max_degree() {
        return Err(Error::Bounds {
            degree: max_deg,
            max: model.max_degree(),
        });
    }
    let m = &*model;
    let one = m.field().one();
    let mut modules = vec![FreeModule::new(vec![0], m)];
    let mut maps: Vec<FreeMap> = Vec::new();
    // Dimension of the kernel of the previous differential, by degree. For
    // the augmentation this is A_+.
    let mut kernel_dims: Vec<usize> = (0..=max_deg).map(|j| if j == 0 { 0 } else { m.dim(j) }).collect();

    for i in 1..=max_hdeg {
        let src = modules.last().expect("nonempty");
        let mut gens = Vec::new();
        let mut rows = Vec::new();
        let mut previous: Vec<SparseVec> = Vec::new();
        for (j, &kdim) in kernel_dims.iter().enumerate() {
            let mut ech = Echelon::new(src.dim(j));
            if j > 0 && kdim > 0 {
                let products: Vec<SparseVec> = previous
                    .par_iter()
                    .flat_map_iter(|v| (0..m.ngens()).map(move |x| src.left_mul_gen(m, x, j - 1, v)))
                    .collect();
                for p in products {
                    if ech.rank() == kdim {
                        break;
                    }
                    ech.insert(p);
                }
            }
            if ech.rank() < kdim {
                let kernel = match maps.last() {
                    None => (0..m.dim(j)).map(|p| SparseVec::unit(p, one.clone())).collect(),
                    Some(d) => left_kernel(&d.basis_images(m, j), d.target.dim(j), &one),
                };
                for v in kernel {
                    if ech.insert(v.clone()) {
                        gens.push(j);
                        rows.push(v);
                    }
                }
            }
            if ech.rank() != kdim {
                return Err(Error::Consistency(format!(
                    "kernel in homological degree {}, internal degree {j} has dimension {} (expected {kdim})",
                    i - 1,
                    ech.rank()
                )));
            }
            previous = ech.rows().to_vec();
        }
        let module = FreeModule::new(gens, m);
        kernel_dims = (0..=max_deg).map(|j| module.dim(j) - kernel_dims[j]).collect();
        maps.push(FreeMap::new(module.clone(), src.clone(), rows));
        modules.push(module);
    }
    Ok(Resolution {
        model,
        max_hdeg,
        max_deg,
        modules,
        maps,
    })
}

impl Resolution {
    /// A complex given by explicit generator degrees and differential rows
    /// (`rows[i - 1][e]` is the image of generator `e` of `V_i`). Nothing is
    /// assumed; use the `check_*` methods.
    pub fn from_parts(
        model: Arc<GradedModel>,
        max_deg: usize,
        gen_degrees: Vec<Vec<usize>>,
        rows: Vec<Vec<SparseVec>>,
    ) -> Result<Self> {
        if max_deg > model.max_degree() {
            return Err(Error::Bounds {
                degree: max_deg,
                max: model.max_degree(),
            });
        }
        if gen_degrees.len() != rows.len() + 1 {
            return Err(Error::Contract("one differential per homological degree expected".into()));
        }
        let modules: Vec<FreeModule> = gen_degrees
            .into_iter()
            .map(|g| FreeModule::new(g, &model))
            .collect();
        let mut maps = Vec::with_capacity(rows.len());
        for (k, r) in rows.into_iter().enumerate() {
            if r.len() != modules[k + 1].rank() {
                return Err(Error::Contract(format!(
                    "differential {} has {} rows for {} generators",
                    k + 1,
                    r.len(),
                    modules[k + 1].rank()
                )));
            }
            for (e, row) in r.iter().enumerate() {
                let d = modules[k + 1].gen_degree(e);
                if row.entries().last().is_some_and(|(c, _)| *c >= modules[k].dim(d)) {
                    return Err(Error::Contract(format!(
                        "row {e} of differential {} does not fit its degree",
                        k + 1
                    )));
                }
            }
            maps.push(FreeMap::new(modules[k + 1].clone(), modules[k].clone(), r));
        }
        Ok(Resolution {
            model,
            max_hdeg: maps.len(),
            max_deg,
            modules,
            maps,
        })
    }

    pub fn model(&self) -> &Arc<GradedModel> {
        &self.model
    }

    pub fn max_hdeg(&self) -> usize {
        self.max_hdeg
    }

    pub fn max_deg(&self) -> usize {
        self.max_deg
    }

    pub fn module(&self, i: usize) -> &FreeModule {
        &self.modules[i]
    }

    /// Internal degrees of the generators of `V_i`.
    pub fn generator_degrees(&self, i: usize) -> &[usize] {
        self.modules[i].gen_degrees()
    }

    /// The differential `A ⊗ V_i → A ⊗ V_{i-1}`, `1 <= i <= I`.
    pub fn differential(&self, i: usize) -> &FreeMap {
        &self.maps[i - 1]
    }

    pub fn betti_table(&self) -> BettiTable {
        let mut dims = vec![vec![0; self.max_deg + 1]; self.max_hdeg + 1];
        for (i, module) in self.modules.iter().enumerate() {
            for &j in module.gen_degrees() {
                dims[i][j] += 1;
            }
        }
        BettiTable::new(self.max_hdeg, self.max_deg, dims)
    }

    /// Every differential entry lies in `A_+`.
    pub fn check_minimal(&self) -> Result<()> {
        for (k, d) in self.maps.iter().enumerate() {
            if let Some((e, g, c)) = d.constant_entries().into_iter().next() {
                return Err(Error::Consistency(format!(
                    "differential {} has constant entry {c} at ({e}, {g})",
                    k + 1
                )));
            }
        }
        Ok(())
    }

    /// `∂_{i-1} ∘ ∂_i = 0` on generators.
    pub fn check_complex(&self) -> Result<()> {
        for i in 2..=self.max_hdeg {
            let (d, prev) = (&self.maps[i - 1], &self.maps[i - 2]);
            for (e, row) in d.rows.iter().enumerate() {
                let j = d.source.gen_degree(e);
                if !prev.apply(&self.model, j, row).is_zero() {
                    return Err(Error::Consistency(format!(
                        "composite of differentials {i} and {} is nonzero on generator {e}",
                        i - 1
                    )));
                }
            }
        }
        Ok(())
    }

    /// Rank of `∂_i` in internal degree `j` (`∂_0` is the augmentation).
    pub fn rank(&self, i: usize, j: usize) -> usize {
        if i == 0 {
            return usize::from(j == 0);
        }
        let d = &self.maps[i - 1];
        rank_of(d.basis_images(&self.model, j), d.target.dim(j))
    }

    /// Exactness at `A ⊗ V_i` for `0 <= i < I` in every degree `j <= D`,
    /// recomputed from explicit ranks.
    pub fn check_exact(&self) -> Result<()> {
        for i in 0..self.max_hdeg {
            for j in 0..=self.max_deg {
                let kernel = self.modules[i].dim(j) - self.rank(i, j);
                let image = self.rank(i + 1, j);
                if kernel != image {
                    return Err(Error::Consistency(format!(
                        "not exact at ({i}, {j}): kernel {kernel}, image {image}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Bigraded dimensions `dim V_{i,j}` for `i <= I`, `j <= D`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BettiTable {
    max_hdeg: usize,
    max_deg: usize,
    dims: Vec<Vec<usize>>,
}

/// Status of a Betti table cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Cell {
    Exact(usize),
    OutsideWindow,
}

impl BettiTable {
    pub fn new(max_hdeg: usize, max_deg: usize, dims: Vec<Vec<usize>>) -> Self {
        assert_eq!(dims.len(), max_hdeg + 1);
        assert!(dims.iter().all(|r| r.len() == max_deg + 1));
        BettiTable {
            max_hdeg,
            max_deg,
            dims,
        }
    }

    pub fn window(&self) -> (usize, usize) {
        (self.max_hdeg, self.max_deg)
    }

    pub fn cell(&self, i: usize, j: usize) -> Cell {
        if i <= self.max_hdeg && j <= self.max_deg {
            Cell::Exact(self.dims[i][j])
        } else {
            Cell::OutsideWindow
        }
    }

    /// The dimension inside the window; panics outside it.
    pub fn get(&self, i: usize, j: usize) -> usize {
        match self.cell(i, j) {
            Cell::Exact(n) => n,
            Cell::OutsideWindow => panic!("cell ({i}, {j}) is outside the window"),
        }
    }

    /// Nonzero cells `((i, j), dim)` in lexicographic order.
    pub fn nonzero(&self) -> Vec<((usize, usize), usize)> {
        let mut out = Vec::new();
        for (i, row) in self.dims.iter().enumerate() {
            for (j, &n) in row.iter().enumerate() {
                if n > 0 {
                    out.push(((i, j), n));
                }
            }
        }
        out
    }

    /// Restriction to a smaller window.
    pub fn restrict(&self, max_hdeg: usize, max_deg: usize) -> BettiTable {
        assert!(max_hdeg <= self.max_hdeg && max_deg <= self.max_deg);
        BettiTable::new(
            max_hdeg,
            max_deg,
            self.dims[..=max_hdeg].iter().map(|r| r[..=max_deg].to_vec()).collect(),
        )
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema": "yoneda.betti/1",
            "window": [self.max_hdeg, self.max_deg],
            "cells": "exact",
            "dims": self.dims,
            "nonzero": self
                .nonzero()
                .into_iter()
                .map(|((i, j), n)| json!({"i": i, "j": j, "dim": n}))
                .collect::<Vec<_>>(),
        })
    }
}

impl fmt::Display for BettiTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "window: homological degree <= {}, internal degree <= {} (all cells exact)",
            self.max_hdeg, self.max_deg
        )?;
        write!(f, "  i\\j")?;
        for j in 0..=self.max_deg {
            write!(f, "{j:>5}")?;
        }
        writeln!(f)?;
        for (i, row) in self.dims.iter().enumerate() {
            write!(f, "{i:>5}")?;
            for &n in row {
                if n == 0 {
                    write!(f, "{:>5}", ".")?;
                } else {
                    write!(f, "{n:>5}")?;
                }
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// A truncation-aware verdict: failures are definitive, passes hold only in
/// the examined window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    PassesUpTo { window: (usize, usize) },
    Fails { window: (usize, usize), bidegree: (usize, usize), witness: Option<Witness> },
}

/// A cycle in the bar complex, as `(coefficient, tensor factors)` terms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub terms: Vec<(String, Vec<String>)>,
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::PassesUpTo { .. })
    }

    pub fn window(&self) -> (usize, usize) {
        match self {
            Verdict::PassesUpTo { window } | Verdict::Fails { window, .. } => *window,
        }
    }

    pub fn failure(&self) -> Option<(usize, usize)> {
        match self {
            Verdict::PassesUpTo { .. } => None,
            Verdict::Fails { bidegree, .. } => Some(*bidegree),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Verdict::PassesUpTo { window } => json!({
                "status": "pass",
                "window": [window.0, window.1],
            }),
            Verdict::Fails {
                window,
                bidegree,
                witness,
            } => json!({
                "status": "fail",
                "window": [window.0, window.1],
                "witness": {
                    "bidegree": [bidegree.0, bidegree.1],
                    "cycle": witness.as_ref().map(|w| {
                        w.terms
                            .iter()
                            .map(|(c, fs)| json!({"coefficient": c, "factors": fs}))
                            .collect::<Vec<_>>()
                    }),
                },
            }),
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::PassesUpTo { window } => {
                write!(f, "PASSES up to (I, D) = ({}, {})", window.0, window.1)
            }
            Verdict::Fails {
                window,
                bidegree,
                witness,
            } => {
                write!(
                    f,
                    "FAILS at ({}, {}) [window ({}, {})]",
                    bidegree.0, bidegree.1, window.0, window.1
                )?;
                if let Some(w) = witness {
                    write!(f, "\n  witness cycle:")?;
                    for (c, fs) in &w.terms {
                        write!(f, "\n    {c} * {}", fs.join(" | "))?;
                    }
                }
                Ok(())
            }
        }
    }
}

/// Least `(i, j)` (lexicographically) with `i != j` and a nonzero cell.
pub fn koszul_verdict(b: &BettiTable) -> Verdict {
    match b.nonzero().into_iter().find(|((i, j), _)| i != j) {
        Some((bidegree, _)) => Verdict::Fails {
            window: b.window(),
            bidegree,
            witness: None,
        },
        None => Verdict::PassesUpTo { window: b.window() },
    }
}

/// Checks `(Σ_{i,j} (-1)^i dim V_{i,j} t^j) · h(t) = 1` through degree `D`.
/// Requires a resolution complete through degree `D`, i.e. `I >= D`.
pub fn euler_check(b: &BettiTable, h: &[usize]) -> Result<bool> {
    let (max_hdeg, max_deg) = b.window();
    if max_hdeg < max_deg {
        return Err(Error::Precondition(format!(
            "Euler identity through degree {max_deg} needs homological degrees up to {max_deg}, have {max_hdeg}"
        )));
    }
    euler_check_through(b, h, max_deg)
}

/// The Euler identity through degree `n`, which only involves cells with
/// `i <= j <= n`; requires `n <= min(I, D)`.
pub fn euler_check_through(b: &BettiTable, h: &[usize], n: usize) -> Result<bool> {
    let (max_hdeg, max_deg) = b.window();
    if n > max_hdeg || n > max_deg || h.len() <= n {
        return Err(Error::Precondition(format!(
            "Euler identity through degree {n} is outside window ({max_hdeg}, {max_deg}) or Hilbert data of length {}",
            h.len()
        )));
    }
    for deg in 0..=n {
        let mut sum: i64 = 0;
        for i in 0..=deg {
            for j in i..=deg {
                let term = (b.get(i, j) * h[deg - j]) as i64;
                sum += if i % 2 == 0 { term } else { -term };
            }
        }
        if sum != i64::from(deg == 0) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::parse_presentation;

    fn resolve(text: &str, i: usize, d: usize) -> Resolution {
        let m = GradedModel::build(&parse_presentation(text).unwrap(), d).unwrap();
        minimal_resolution(Arc::new(m), i, d).unwrap()
    }

    const EX1: &str = "field Q\ngens x y\nrel x*x*y\nrel y*y*x";
    const EX2: &str = "field Q\ngens w x y u\nrel y*u\nrel u*x - x*u\nrel u*w";
    const COMM: &str = "field Q\ngens x y\nrel x*y - y*x";

    #[test]
    fn example_one_generator_degrees() {
        let r = resolve(EX1, 4, 8);
        assert_eq!(r.generator_degrees(1), &[1, 1]);
        assert_eq!(r.generator_degrees(2), &[3, 3]);
        assert_eq!(r.generator_degrees(3), &[5, 5]);
        assert_eq!(r.generator_degrees(4), &[7, 7]);
        r.check_minimal().unwrap();
        r.check_complex().unwrap();
        r.check_exact().unwrap();
        let b = r.betti_table();
        assert_eq!(b.get(2, 3), 2);
        assert_eq!(b.get(3, 5), 2);
        assert_eq!(koszul_verdict(&b).failure(), Some((2, 3)));
    }

    #[test]
    fn free_algebra_on_one_generator() {
        let r = resolve("field Q\ngens x", 3, 4);
        assert_eq!(r.generator_degrees(1), &[1]);
        assert!(r.generator_degrees(2).is_empty());
        assert!(r.generator_degrees(3).is_empty());
    }

    #[test]
    fn example_two_generator_degrees() {
        let r = resolve(EX2, 3, 6);
        assert_eq!(r.generator_degrees(1), &[1, 1, 1, 1]);
        assert_eq!(r.generator_degrees(2), &[2, 2, 2]);
        assert_eq!(r.generator_degrees(3), &[3, 4, 5, 6]);
        assert_eq!(koszul_verdict(&r.betti_table()).failure(), Some((3, 4)));
        r.check_complex().unwrap();
        r.check_minimal().unwrap();
    }

    #[test]
    fn polynomial_ring_is_koszul_in_window() {
        let r = resolve(COMM, 4, 4);
        let b = r.betti_table();
        assert_eq!(b.nonzero(), vec![((0, 0), 1), ((1, 1), 2), ((2, 2), 1)]);
        assert!(koszul_verdict(&b).is_pass());
        assert!(euler_check(&b, &r.model().hilbert_function()).unwrap());
    }

    #[test]
    fn euler_identity_and_precondition() {
        let r = resolve(EX1, 4, 8);
        let b = r.betti_table();
        let h = r.model().hilbert_function();
        assert!(matches!(euler_check(&b, &h), Err(Error::Precondition(_))));
        assert!(euler_check_through(&b, &h, 4).unwrap());
        let full = resolve(EX1, 8, 8);
        assert!(euler_check(&full.betti_table(), &full.model().hilbert_function()).unwrap());
    }

    #[test]
    fn euler_detects_a_wrong_table() {
        let r = resolve(COMM, 3, 3);
        let mut dims = r.betti_table().dims.clone();
        dims[2][2] = 2;
        let bad = BettiTable::new(3, 3, dims);
        assert!(!euler_check(&bad, &r.model().hilbert_function()).unwrap());
    }

    #[test]
    fn free_algebra_euler() {
        let r = resolve("field Q\ngens a b c", 3, 3);
        assert!(euler_check(&r.betti_table(), &r.model().hilbert_function()).unwrap());
    }
}
