//! Ore extensions `B = A[z; σ, δ]`, the complexes `P = B ⊗ V(-1)` and
//! `Q = B ⊗ V` built from a resolution of `A`, the chain map `f: P → Q`, and
//! its mapping cone, which resolves the trivial `B`-module.
//!
//! With row vectors and right action, `∂_P = M` and `∂_Q = -M` (images of
//! the resolution matrices of `A` in `B`), so a chain map satisfies
//! `f_n · M_n + M_n · f_{n-1} = 0`. The cone on `W_n = V_n ⊕ V_{n-1}(-1)` has
//! differential `[[M_n, 0], [f_{n-1}, M_{n-1}]]`.

use std::sync::Arc;

use serde::Serialize;

use crate::algebra::GradedModel;
use crate::error::{Error, Result};
use crate::linalg::{rank_of, solve_left, Accumulator, Matrix, SparseVec};
use crate::module::{FreeMap, FreeModule};
use crate::presentation::{NCPoly, OreSpec, Presentation, Word};
use crate::resolution::{BettiTable, Resolution};

/// Ore data checked against the ideal, with `σ` and `δ` tabulated on the
/// normal bases of `A_d`.
#[derive(Clone, Debug)]
pub struct CheckedOre {
    spec: OreSpec,
    sigma_inverse: Matrix,
    /// `sigma[d][p]`: `σ` of the `p`-th normal word of degree `d`.
    sigma: Vec<Vec<SparseVec>>,
    /// `delta[d][p]`: `δ` of the `p`-th normal word of degree `d`, in degree
    /// `d + 1`; tabulated for `d < D`.
    delta: Vec<Vec<SparseVec>>,
}

/// `σ(r)` for a polynomial, with `σ` given on letters.
fn apply_sigma(r: &NCPoly, images: &[NCPoly]) -> NCPoly {
    r.substitute(images)
}

/// The σ-derivation extension `δ(l_1 … l_d) = Σ_k l_1 … l_{k-1} δ(l_k)
/// σ(l_{k+1}) … σ(l_d)` on the free algebra.
fn apply_delta(r: &NCPoly, sigma: &[NCPoly], delta: &[NCPoly]) -> NCPoly {
    let field = r.field();
    let mut out = NCPoly::zero(field);
    for (w, c) in r.terms() {
        let letters: Vec<usize> = w.letters().collect();
        for k in 0..letters.len() {
            let mut term = NCPoly::word(field, Word(w.0[..k].to_vec()));
            term = term.mul(&delta[letters[k]]);
            for &l in &letters[k + 1..] {
                term = term.mul(&sigma[l]);
            }
            out = out.add(&term.scale(c));
        }
    }
    out
}

pub fn validate_ore(spec: &OreSpec, model: &GradedModel) -> Result<CheckedOre> {
    let p = model.presentation();
    let n = p.ngens();
    let field = p.field;
    if spec.sigma.nrows() != n || spec.delta.len() != n || spec.sigma.field() != field {
        return Err(Error::Ore("Ore data does not match the presentation".into()));
    }
    let sigma_inverse = spec
        .sigma
        .inverse()
        .ok_or_else(|| Error::Ore("sigma is singular on the generators".into()))?;
    let letters = |m: &Matrix| -> Vec<NCPoly> {
        (0..n)
            .map(|g| NCPoly::from_terms(field, (0..n).map(|k| (Word::letter(k), m[(g, k)].clone()))))
            .collect()
    };
    let sig = letters(&spec.sigma);
    let sig_inv = letters(&sigma_inverse);
    let names = &p.generators;
    // δ of a relation lives one degree up; widen the model if needed.
    let wide;
    let checker = if p.max_relation_degree() + 1 > model.max_degree() {
        wide = GradedModel::build(p, p.max_relation_degree() + 1)?;
        &wide
    } else {
        model
    };
    for (k, r) in p.relations.iter().enumerate() {
        let label = format!("relation {} ({})", k + 1, r.display(names));
        for (what, images) in [("sigma", &sig), ("sigma^-1", &sig_inv)] {
            let image = checker.normal_form(&apply_sigma(r, images))?;
            if !image.is_zero() {
                return Err(Error::Ore(format!(
                    "{what} does not preserve the ideal: {label} maps to {}",
                    checker.display(&image)
                )));
            }
        }
        let d = checker.normal_form(&apply_delta(r, &sig, &spec.delta))?;
        if !d.is_zero() {
            return Err(Error::Ore(format!(
                "delta is not well defined: {label} maps to {}",
                checker.display(&d)
            )));
        }
    }
    let (sigma, delta) = tabulate(spec, model)?;
    Ok(CheckedOre {
        spec: spec.clone(),
        sigma_inverse,
        sigma,
        delta,
    })
}

type Tables = (Vec<Vec<SparseVec>>, Vec<Vec<SparseVec>>);

/// `σ(g w') = σ(g) σ(w')` and `δ(g w') = δ(g) σ(w') + g δ(w')` over normal
/// words (suffixes of normal words are normal).
fn tabulate(spec: &OreSpec, model: &GradedModel) -> Result<Tables> {
    let n = model.ngens();
    let one = model.field().one();
    let max = model.max_degree();
    let delta_gen: Vec<SparseVec> = spec
        .delta
        .iter()
        .map(|d| {
            if d.is_zero() {
                Ok(SparseVec::new())
            } else {
                model.normal_form(d).map(|e| e.coords)
            }
        })
        .collect::<Result<_>>()?;
    let mut sigma = vec![vec![SparseVec::unit(0, one.clone())]];
    let mut delta = vec![vec![SparseVec::new()]];
    for d in 1..=max {
        let shift = n.pow(d as u32 - 1);
        let mut srow = Vec::with_capacity(model.dim(d));
        let mut drow = Vec::with_capacity(model.dim(d));
        for pos in 0..model.dim(d) {
            let w = model.normal_word_index(d, pos);
            let g = w / shift;
            let rest = model.nf_index(d - 1, w % shift);
            let rpos = rest.leading().expect("suffix of a normal word is normal").0;
            let s_rest = &sigma[d - 1][rpos];
            let mut acc = Accumulator::new();
            for k in 0..n {
                let c = &spec.sigma[(g, k)];
                if !c.is_zero() {
                    acc.add_scaled(c, &model.left_mul_gen(k, d - 1, s_rest));
                }
            }
            srow.push(acc.finish());
            if d < max {
                let mut acc = Accumulator::new();
                acc.add_scaled(&one, &model.mul_coords(2, &delta_gen[g], d - 1, s_rest));
                acc.add_scaled(&one, &model.left_mul_gen(g, d, &delta[d - 1][rpos]));
                drow.push(acc.finish());
            }
        }
        sigma.push(srow);
        if d < max {
            delta.push(drow);
        }
    }
    Ok((sigma, delta))
}

impl CheckedOre {
    pub fn spec(&self) -> &OreSpec {
        &self.spec
    }

    pub fn sigma_inverse(&self) -> &Matrix {
        &self.sigma_inverse
    }

    /// `σ` on `A_d` applied to a coordinate vector.
    pub fn sigma(&self, d: usize, v: &SparseVec) -> SparseVec {
        let mut acc = Accumulator::new();
        for (p, c) in v.iter() {
            acc.add_scaled(c, &self.sigma[d][p]);
        }
        acc.finish()
    }

    /// `δ: A_d → A_{d+1}` applied to a coordinate vector.
    pub fn delta(&self, d: usize, v: &SparseVec) -> SparseVec {
        let mut acc = Accumulator::new();
        for (p, c) in v.iter() {
            acc.add_scaled(c, &self.delta[d][p]);
        }
        acc.finish()
    }
}

/// Name for the adjoined variable: `z`, or `z1`, `z2`, … if taken.
fn fresh_name(p: &Presentation) -> String {
    if p.generator_index("z").is_none() {
        return "z".into();
    }
    (1..)
        .map(|k| format!("z{k}"))
        .find(|n| p.generator_index(n).is_none())
        .expect("unbounded supply of names")
}

/// Presentation of `B`: the generators of `A` followed by `z`, and the
/// relations of `A` together with `g z - z σ(g) - δ(g)` for each generator.
pub fn extend_presentation(p: &Presentation, o: &CheckedOre) -> Presentation {
    let field = p.field;
    let n = p.ngens();
    let z = n as u16;
    let mut gens = p.generators.clone();
    gens.push(fresh_name(p));
    let mut rels = p.relations.clone();
    for g in 0..n {
        let mut r = NCPoly::word(field, Word(vec![g as u16, z]));
        for k in 0..n {
            r.add_term(Word(vec![z, k as u16]), -&o.spec.sigma[(g, k)]);
        }
        r = r.sub(&o.spec.delta[g]);
        rels.push(r);
    }
    Presentation::new(field, gens, rels).expect("extension of a valid presentation")
}

/// `A` and `B = A[z; σ, δ]` side by side, with the decomposition
/// `B_d = ⊕_n z^n A_{d-n}` cross-checked against the quotient model of `B`.
#[derive(Clone, Debug)]
pub struct OreModel {
    base: Arc<GradedModel>,
    ext: Arc<GradedModel>,
    ore: CheckedOre,
    /// `iota[d][p]`: the `p`-th normal word of `A_d` in `B_d`.
    iota: Vec<Vec<SparseVec>>,
    /// `zbasis[d]`: images of `z^n w` (`n` ascending, then `w`) in `B_d`.
    zbasis: Vec<Vec<SparseVec>>,
}

pub fn build_ore_model(base: Arc<GradedModel>, ore: CheckedOre, max_deg: usize) -> Result<OreModel> {
    build_ore_model_with_cap(base, ore, max_deg, crate::algebra::DEFAULT_WORD_CAP)
}

pub fn build_ore_model_with_cap(
    base: Arc<GradedModel>,
    ore: CheckedOre,
    max_deg: usize,
    cap: usize,
) -> Result<OreModel> {
    if max_deg > base.max_degree() {
        return Err(Error::Bounds {
            degree: max_deg,
            max: base.max_degree(),
        });
    }
    let bp = extend_presentation(base.presentation(), &ore);
    let ext = Arc::new(GradedModel::build_with_cap(&bp, max_deg, cap)?);
    let nb = ext.ngens();
    let z = (nb - 1) as u16;
    let word_in_b = |d: usize, p: usize| base.normal_word(d, p);
    let iota: Vec<Vec<SparseVec>> = (0..=max_deg)
        .map(|d| (0..base.dim(d)).map(|p| ext.nf_index(d, word_in_b(d, p).index(nb)).clone()).collect())
        .collect();
    let mut zbasis = Vec::with_capacity(max_deg + 1);
    for d in 0..=max_deg {
        let mut images = Vec::new();
        for n in 0..=d {
            for p in 0..base.dim(d - n) {
                let mut letters = vec![z; n];
                letters.extend(word_in_b(d - n, p).0);
                images.push(ext.nf_index(d, Word(letters).index(nb)).clone());
            }
        }
        let expected: usize = (0..=d).map(|k| base.dim(k)).sum();
        let rank = rank_of(images.iter().cloned(), ext.dim(d));
        if images.len() != expected || rank != expected || ext.dim(d) != expected {
            return Err(Error::Consistency(format!(
                "degree {d}: dim B_d = {}, z-basis rank {rank}, expected {expected}",
                ext.dim(d)
            )));
        }
        zbasis.push(images);
    }
    let om = OreModel {
        base,
        ext,
        ore,
        iota,
        zbasis,
    };
    om.check_rewriting()?;
    Ok(om)
}

impl OreModel {
    pub fn base(&self) -> &Arc<GradedModel> {
        &self.base
    }

    pub fn ext(&self) -> &Arc<GradedModel> {
        &self.ext
    }

    pub fn ore(&self) -> &CheckedOre {
        &self.ore
    }

    pub fn max_deg(&self) -> usize {
        self.ext.max_degree()
    }

    /// Index of `z` among the generators of `B`.
    pub fn z(&self) -> usize {
        self.ext.ngens() - 1
    }

    /// The inclusion `A_d → B_d` on coordinates.
    pub fn iota(&self, d: usize, v: &SparseVec) -> SparseVec {
        let mut acc = Accumulator::new();
        for (p, c) in v.iter() {
            acc.add_scaled(c, &self.iota[d][p]);
        }
        acc.finish()
    }

    /// Images of `z^n w` in `B_d`, `n` ascending then `w` in normal order.
    pub fn zbasis(&self, d: usize) -> &[SparseVec] {
        &self.zbasis[d]
    }

    /// `a z = z σ(a) + δ(a)` on every normal word `a` with `deg a < D`.
    pub fn check_rewriting(&self) -> Result<()> {
        let b = &*self.ext;
        let nb = b.ngens();
        let z = self.z();
        for d in 0..self.max_deg() {
            for p in 0..self.base.dim(d) {
                let mut letters = self.base.normal_word(d, p).0;
                letters.push(z as u16);
                let lhs = b.nf_index(d + 1, Word(letters).index(nb));
                let unit = SparseVec::unit(p, b.field().one());
                let sigma = self.iota(d, &self.ore.sigma(d, &unit));
                let zs = b.left_mul_gen(z, d, &sigma);
                let rhs = zs.add(&self.iota(d + 1, &self.ore.delta(d, &unit)));
                if *lhs != rhs {
                    return Err(Error::Consistency(format!(
                        "a z != z sigma(a) + delta(a) for a = {}",
                        self.base.normal_word(d, p).display(self.base.names())
                    )));
                }
            }
        }
        Ok(())
    }
}

/// The complexes `P_i = B ⊗ V_i(-1)` and `Q_i = B ⊗ V_i` for a resolution
/// `A ⊗ V` of the trivial `A`-module.
#[derive(Clone, Debug)]
pub struct OreComplexes {
    ext: Arc<GradedModel>,
    max_hdeg: usize,
    max_deg: usize,
    q_modules: Vec<FreeModule>,
    p_modules: Vec<FreeModule>,
    /// `m[i - 1]`: `M_i` mapped into `B`, as a map `Q_i → Q_{i-1}`.
    m: Vec<FreeMap>,
}

pub fn build_p_q(r: &Resolution, om: &OreModel) -> Result<OreComplexes> {
    let (max_hdeg, max_deg) = (r.max_hdeg(), r.max_deg());
    if max_deg != om.max_deg() || r.model().presentation() != om.base().presentation() {
        return Err(Error::Contract(format!(
            "resolution window D = {max_deg} does not match the Ore model (D = {})",
            om.max_deg()
        )));
    }
    let b = &*om.ext;
    let a = &**r.model();
    let q_modules: Vec<FreeModule> = (0..=max_hdeg)
        .map(|i| FreeModule::new(r.generator_degrees(i).to_vec(), b))
        .collect();
    let p_modules: Vec<FreeModule> = (0..=max_hdeg)
        .map(|i| {
            let shifted = r.generator_degrees(i).iter().map(|d| d + 1).collect();
            FreeModule::new(shifted, b)
        })
        .collect();
    let mut m = Vec::with_capacity(max_hdeg);
    for i in 1..=max_hdeg {
        let d = r.differential(i);
        let rows = d
            .rows
            .iter()
            .enumerate()
            .map(|(e, row)| {
                let de = d.source.gen_degree(e);
                let parts: Vec<(usize, SparseVec)> = d
                    .target
                    .split(de, row)
                    .into_iter()
                    .map(|(g, c)| (g, om.iota(de - d.target.gen_degree(g), &c)))
                    .collect();
                q_modules[i - 1].join(de, &parts)
            })
            .collect();
        m.push(FreeMap::new(q_modules[i].clone(), q_modules[i - 1].clone(), rows));
    }
    let _ = a;
    Ok(OreComplexes {
        ext: om.ext.clone(),
        max_hdeg,
        max_deg,
        q_modules,
        p_modules,
        m,
    })
}

/// One cell of the homology check on `P` or `Q`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomologyCell {
    pub complex: &'static str,
    pub hdeg: i64,
    pub deg: usize,
    pub expected: usize,
    pub actual: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct HomologyReport {
    pub window: (usize, usize),
    pub cells: Vec<HomologyCell>,
}

impl HomologyReport {
    pub fn failures(&self) -> Vec<&HomologyCell> {
        self.cells.iter().filter(|c| c.expected != c.actual).collect()
    }

    pub fn passed(&self) -> bool {
        self.failures().is_empty()
    }
}

impl OreComplexes {
    pub fn ext(&self) -> &Arc<GradedModel> {
        &self.ext
    }

    pub fn max_hdeg(&self) -> usize {
        self.max_hdeg
    }

    pub fn max_deg(&self) -> usize {
        self.max_deg
    }

    pub fn q_module(&self, i: usize) -> &FreeModule {
        &self.q_modules[i]
    }

    pub fn p_module(&self, i: usize) -> &FreeModule {
        &self.p_modules[i]
    }

    /// `M_i` over `B` (unsigned), `Q_i → Q_{i-1}`.
    pub fn m(&self, i: usize) -> &FreeMap {
        &self.m[i - 1]
    }

    /// `∂_{i,Q} = -M_i`.
    pub fn q_differential(&self, i: usize) -> FreeMap {
        let m = self.m(i);
        FreeMap::new(m.source.clone(), m.target.clone(), m.rows.iter().map(SparseVec::neg).collect())
    }

    /// `∂_{i,P} = M_i` between the shifted modules.
    pub fn p_differential(&self, i: usize) -> FreeMap {
        FreeMap::new(
            self.p_modules[i].clone(),
            self.p_modules[i - 1].clone(),
            self.m(i).rows.clone(),
        )
    }

    /// Rank of `M_i` on `Q` in degree `j`.
    fn rank_q(&self, i: usize, j: usize) -> usize {
        if i == 0 || i > self.max_hdeg {
            return 0;
        }
        let m = self.m(i);
        rank_of(m.basis_images(&self.ext, j), m.target.dim(j))
    }

    /// Homology check in the window: `H_i(P) = H_i(Q) = 0` for
    /// `1 <= i < I`, `H_0(P)_j = k` for `1 <= j <= D`, `H_0(Q)_j = k` for
    /// `j >= 1` and `0` for `j = 0`, and the augmentation onto `k`.
    pub fn homology_check(&self) -> HomologyReport {
        let mut cells = Vec::new();
        let dmax = self.max_deg;
        let ranks: Vec<Vec<usize>> = (0..=self.max_hdeg)
            .map(|i| (0..=dmax).map(|j| self.rank_q(i, j)).collect())
            .collect();
        let rank = |i: usize, j: usize| ranks.get(i).map_or(0, |r| r[j]);
        // Q, with the augmentation in degree -1.
        cells.push(HomologyCell {
            complex: "Q",
            hdeg: -1,
            deg: 0,
            expected: 0,
            actual: 1 - usize::from(self.q_modules[0].dim(0) > 0),
        });
        for j in 0..=dmax {
            let aug = usize::from(j == 0);
            cells.push(HomologyCell {
                complex: "Q",
                hdeg: 0,
                deg: j,
                expected: usize::from(j >= 1),
                actual: self.q_modules[0].dim(j) - aug - rank(1, j),
            });
        }
        for i in 1..self.max_hdeg {
            for j in 0..=dmax {
                cells.push(HomologyCell {
                    complex: "Q",
                    hdeg: i as i64,
                    deg: j,
                    expected: 0,
                    actual: self.q_modules[i].dim(j) - rank(i, j) - rank(i + 1, j),
                });
            }
        }
        // P: the same maps one degree up, no augmentation.
        for j in 0..=dmax {
            let (dim, r) = if j == 0 {
                (0, 0)
            } else {
                (self.p_modules[0].dim(j), rank(1, j - 1))
            };
            cells.push(HomologyCell {
                complex: "P",
                hdeg: 0,
                deg: j,
                expected: usize::from(j >= 1),
                actual: dim - r,
            });
        }
        for i in 1..self.max_hdeg {
            for j in 0..=dmax {
                let actual = if j == 0 {
                    self.p_modules[i].dim(0)
                } else {
                    self.p_modules[i].dim(j) - rank(i, j - 1) - rank(i + 1, j - 1)
                };
                cells.push(HomologyCell {
                    complex: "P",
                    hdeg: i as i64,
                    deg: j,
                    expected: 0,
                    actual,
                });
            }
        }
        HomologyReport {
            window: (self.max_hdeg, self.max_deg),
            cells,
        }
    }

    /// `P_n` restricted to generators whose shifted degree is inside the
    /// window, i.e. the part on which `f_n` can be defined.
    pub fn p_window(&self, n: usize) -> FreeModule {
        let degs = self.p_modules[n]
            .gen_degrees()
            .iter()
            .copied()
            .filter(|&d| d <= self.max_deg)
            .collect();
        FreeModule::new(degs, &self.ext)
    }
}

/// The chain map `f: P → Q`, `f_n: P_n → Q_n` for `n <= I`, defined on the
/// generators of `P_n` that lie in the window.
#[derive(Clone, Debug)]
pub struct ChainMap {
    pub maps: Vec<FreeMap>,
}

impl ChainMap {
    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn f(&self, n: usize) -> &FreeMap {
        &self.maps[n]
    }
}

/// Builds `f` degree by degree: `f_0(1) = z`, `f_1(e) = -z ⊗ σ(a_e) -
/// δ̃(a_e)` where `a_e` is the image of `e` under `M_1` and `δ̃` the
/// pivot-zeroed lift of `δ` through `A_1 ⊗ V_1 → A_2`, and for `n >= 2` the
/// pivot-zeroed solution of `f_n(e) · M_n = -f_{n-1}(e · M_n)`.
pub fn construct_chain_map(c: &OreComplexes, om: &OreModel) -> Result<ChainMap> {
    let b = &*om.ext;
    let a = &*om.base;
    let one = b.field().one();
    let mut maps = Vec::new();
    // f_0
    let p0 = c.p_window(0);
    let z = b.generator(om.z()).coords;
    maps.push(FreeMap::new(p0, c.q_modules[0].clone(), vec![z.clone()]));
    if c.max_hdeg == 0 {
        return Ok(ChainMap { maps });
    }
    // f_1
    let m1 = c.m(1);
    let p1 = c.p_window(1);
    if c.q_modules[1].gen_degrees().iter().any(|&d| d != 1) {
        return Err(Error::Precondition("V_1 must sit in degree 1".into()));
    }
    let a_rows: Vec<SparseVec> = (0..c.q_modules[1].rank())
        .map(|e| {
            // M_1 entries are the images of A_1 in B_1, which are the same
            // letters; read them back on A's side.
            let v = m1.entry(e, 0);
            SparseVec::from_pairs(v.iter().map(|(k, x)| (k, x.clone())).collect())
        })
        .collect();
    let n1 = a_rows.len();
    if rank_of(a_rows.iter().cloned(), a.dim(1)) != a.dim(1) || n1 != a.dim(1) {
        return Err(Error::Precondition("M_1 must be a basis of A_1".into()));
    }
    // Multiplication A_1 ⊗ V_1 → A_2: basis (p, e) ↦ x_p · a_e.
    let mult: Vec<SparseVec> = (0..a.dim(1))
        .flat_map(|p| {
            a_rows
                .iter()
                .map(move |ae| a.mul_coords(1, &SparseVec::unit(p, a.field().one()), 1, ae))
        })
        .collect();
    let sigma_targets: Vec<SparseVec> = a_rows
        .iter()
        .map(|ae| om.ore.sigma(1, ae))
        .collect();
    let delta_targets: Vec<SparseVec> = a_rows.iter().map(|ae| om.ore.delta(1, ae)).collect();
    let sigma_coords = solve_left(&a_rows, a.dim(1), &sigma_targets);
    let lifts = solve_left(&mult, a.dim(2), &delta_targets);
    let mut rows1 = Vec::with_capacity(n1);
    for e in 0..n1 {
        let s = sigma_coords[e]
            .as_ref()
            .ok_or_else(|| Error::Consistency("sigma(A_1) is not spanned by M_1".into()))?;
        let lift = lifts[e]
            .as_ref()
            .ok_or_else(|| Error::Consistency("delta does not lift through A_1 ⊗ V_1".into()))?;
        let mut parts: Vec<(usize, SparseVec)> = Vec::new();
        for k in 0..n1 {
            let mut acc = Accumulator::new();
            if let Some(sk) = s.get(k) {
                acc.add_scaled(&-sk, &z);
            }
            // δ̃ has coordinates (p, k) ↦ x_p ⊗ e_k.
            for p in 0..a.dim(1) {
                if let Some(c) = lift.get(p * n1 + k) {
                    acc.add_scaled(&-c, &om.iota(1, &SparseVec::unit(p, one.clone())));
                }
            }
            parts.push((k, acc.finish()));
        }
        rows1.push(c.q_modules[1].join(2, &parts));
    }
    maps.push(FreeMap::new(p1, c.q_modules[1].clone(), rows1));
    // f_n, n >= 2
    for n in 2..=c.max_hdeg {
        let pn = c.p_window(n);
        let mn = c.m(n);
        let prev = &maps[n - 1];
        let mut rows = vec![SparseVec::new(); pn.rank()];
        let mut by_degree: Vec<Vec<usize>> = vec![Vec::new(); c.max_deg + 1];
        for e in 0..pn.rank() {
            by_degree[pn.gen_degree(e)].push(e);
        }
        for (j, gens) in by_degree.iter().enumerate() {
            if gens.is_empty() {
                continue;
            }
            let images = mn.basis_images(b, j);
            let targets: Vec<SparseVec> = gens
                .iter()
                .map(|&e| prev.apply(b, j, &mn.rows[e]).neg())
                .collect();
            let sols = solve_left(&images, mn.target.dim(j), &targets);
            for (&e, s) in gens.iter().zip(sols) {
                rows[e] = s.ok_or_else(|| {
                    Error::Consistency(format!(
                        "lift of f_{n} on generator {e} (degree {j}) is inconsistent"
                    ))
                })?;
            }
        }
        maps.push(FreeMap::new(pn, c.q_modules[n].clone(), rows));
    }
    Ok(ChainMap { maps })
}

/// Outcome of [`verify_chain_map`]: the first failing square, if any.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainMapCheck {
    pub ok: bool,
    pub failure: Option<String>,
}

/// Checks `f_0(1) = z` and `f_n · M_n + M_n · f_{n-1} = 0` on every
/// generator in the window.
pub fn verify_chain_map(f: &ChainMap, c: &OreComplexes, om: &OreModel) -> Result<ChainMapCheck> {
    let b = &*c.ext;
    let fail = |msg: String| {
        Ok(ChainMapCheck {
            ok: false,
            failure: Some(msg),
        })
    };
    if f.is_empty() || f.len() > c.max_hdeg + 1 {
        return Err(Error::Contract(format!(
            "chain map has {} components for a complex of length {}",
            f.len(),
            c.max_hdeg
        )));
    }
    for (n, fm) in f.maps.iter().enumerate() {
        let pw = c.p_window(n);
        if fm.source.gen_degrees() != pw.gen_degrees() || fm.target.gen_degrees() != c.q_modules[n].gen_degrees() {
            return Err(Error::Contract(format!("f_{n} does not match the shapes of P_{n} and Q_{n}")));
        }
    }
    let z = b.generator(om.z()).coords;
    if f.maps[0].rows.first() != Some(&z) {
        return fail("anchor violated: f_0(1) != z".into());
    }
    for n in 1..f.len() {
        let (fn_, prev, mn) = (&f.maps[n], &f.maps[n - 1], c.m(n));
        for e in 0..fn_.source.rank() {
            let j = fn_.source.gen_degree(e);
            let lhs = mn.apply(b, j, &fn_.rows[e]);
            let rhs = prev.apply(b, j, &mn.rows[e]);
            let sum = lhs.add(&rhs);
            if !sum.is_zero() {
                let parts: Vec<String> = c.q_modules[n - 1]
                    .split(j, &sum)
                    .into_iter()
                    .map(|(g, v)| format!("column {g}: {}", b.display_coords(j - c.q_modules[n - 1].gen_degree(g), &v)))
                    .collect();
                return fail(format!(
                    "square {n} fails on row {e}: f_{n} M_{n} + M_{n} f_{} = [{}]",
                    n - 1,
                    parts.join(", ")
                ));
            }
        }
    }
    Ok(ChainMapCheck {
        ok: true,
        failure: None,
    })
}

/// The mapping cone as a complex of free `B`-modules `B ⊗ W_n`, `W_n = V_n ⊕
/// V_{n-1}(-1)`, for `n <= I`.
pub fn mapping_cone(f: &ChainMap, c: &OreComplexes) -> Result<Resolution> {
    if f.len() < c.max_hdeg {
        return Err(Error::Contract(format!(
            "cone up to degree {} needs f_0..f_{}",
            c.max_hdeg,
            c.max_hdeg - 1
        )));
    }
    let b = &c.ext;
    let mut gen_degrees: Vec<Vec<usize>> = Vec::new();
    for n in 0..=c.max_hdeg {
        let mut g = c.q_modules[n].gen_degrees().to_vec();
        if n >= 1 {
            g.extend(c.p_window(n - 1).gen_degrees());
        }
        gen_degrees.push(g);
    }
    let mut rows = Vec::new();
    for n in 1..=c.max_hdeg {
        let target = FreeModule::new(gen_degrees[n - 1].clone(), b);
        let q_prev = c.q_modules[n - 1].rank();
        let mut r = Vec::new();
        let mn = c.m(n);
        for (e, row) in mn.rows.iter().enumerate() {
            let j = mn.source.gen_degree(e);
            let parts = c.q_modules[n - 1].split(j, row);
            r.push(target.join(j, &parts));
        }
        let fm = &f.maps[n - 1];
        for (e, frow) in fm.rows.iter().enumerate() {
            let j = fm.source.gen_degree(e);
            let mut parts = c.q_modules[n - 1].split(j, frow);
            if n >= 2 {
                let m_prev = c.m(n - 1);
                let p_prev = c.p_window(n - 2);
                let shifted = p_prev.split(j, &m_prev.rows[e]);
                parts.extend(shifted.into_iter().map(|(g, v)| (q_prev + g, v)));
            }
            r.push(target.join(j, &parts));
        }
        rows.push(r);
    }
    Resolution::from_parts(b.clone(), c.max_deg, gen_degrees, rows)
}

/// A constant entry of some `f_n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConstantEntry {
    pub hdeg: usize,
    pub row: usize,
    pub col: usize,
    pub constant: String,
}

/// Entries of `f` with a nonzero degree-0 part; empty iff the cone is
/// minimal in the window.
pub fn minimality_report(f: &ChainMap) -> Vec<ConstantEntry> {
    let mut out = Vec::new();
    for (n, fm) in f.maps.iter().enumerate() {
        for (row, col, c) in fm.constant_entries() {
            out.push(ConstantEntry {
                hdeg: n,
                row,
                col,
                constant: c.to_string(),
            });
        }
    }
    out
}

/// Generator counts of the cone by `(n, j)`.
pub fn cone_generator_table(cone: &Resolution) -> BettiTable {
    cone.betti_table()
}
