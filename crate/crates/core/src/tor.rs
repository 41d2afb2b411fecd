//! `Tor^A(k, k)` through the reduced bar complex, its comultiplication, and
//! the 𝒦₂ test.
//!
//! The bar differential is `∂(a_1 ⊗ … ⊗ a_i) = Σ_k (-1)^{k+1} a_1 ⊗ … ⊗
//! a_k a_{k+1} ⊗ … ⊗ a_i` (`k` counted from 1). Classes in `H_p ⊗ H_q` are
//! read off with chain-level projections `π: bar_p → H_p` that kill
//! boundaries and a fixed complement of the cycles; `π ⊗ π` is then a
//! quasi-isomorphism of the tensor complex onto `H ⊗ H`, so the image of a
//! cycle does not depend on its representative.

use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::GradedModel;
use crate::error::{Error, Result};
use crate::linalg::{left_kernel, rank_of, Accumulator, Echelon, Scalar, SparseVec};
use crate::presentation::{parse_polynomial, Word};
use crate::resolution::{BettiTable, Verdict, Witness};

/// Basis of `⊕ A_{d_1} ⊗ … ⊗ A_{d_i}` over compositions `d` of `j` with
/// positive parts.
#[derive(Clone, Debug)]
pub struct BarSlice {
    hdeg: usize,
    deg: usize,
    comps: Vec<Vec<usize>>,
    offsets: Vec<usize>,
    strides: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
    dim: usize,
}

fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 1..=total.saturating_sub(parts - 1) {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

impl BarSlice {
    pub fn new(model: &GradedModel, hdeg: usize, deg: usize) -> Result<Self> {
        if deg > model.max_degree() {
            return Err(Error::Bounds {
                degree: deg,
                max: model.max_degree(),
            });
        }
        let mut comps = Vec::new();
        let mut offsets = Vec::new();
        let mut strides = Vec::new();
        let mut index = HashMap::new();
        let mut dim = 0;
        for c in compositions(deg, hdeg) {
            let size: usize = c.iter().map(|&d| model.dim(d)).product();
            if size == 0 {
                continue;
            }
            let mut s = vec![1; c.len()];
            for k in (0..c.len().saturating_sub(1)).rev() {
                s[k] = s[k + 1] * model.dim(c[k + 1]);
            }
            index.insert(c.clone(), comps.len());
            comps.push(c);
            offsets.push(dim);
            strides.push(s);
            dim += size;
        }
        Ok(BarSlice {
            hdeg,
            deg,
            comps,
            offsets,
            strides,
            index,
            dim,
        })
    }

    pub fn hdeg(&self) -> usize {
        self.hdeg
    }

    pub fn deg(&self) -> usize {
        self.deg
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Composition and normal-basis positions of a basis element.
    pub fn decode(&self, idx: usize) -> (&[usize], Vec<usize>) {
        let b = self.offsets.partition_point(|&o| o <= idx) - 1;
        let mut rest = idx - self.offsets[b];
        let pos = self.strides[b]
            .iter()
            .map(|&s| {
                let p = rest / s;
                rest %= s;
                p
            })
            .collect();
        (&self.comps[b], pos)
    }

    /// Index of a basis element, if its composition is present.
    pub fn encode(&self, comp: &[usize], pos: &[usize]) -> Option<usize> {
        let b = *self.index.get(comp)?;
        Some(self.offsets[b] + pos.iter().zip(&self.strides[b]).map(|(p, s)| p * s).sum::<usize>())
    }

    /// Image of one basis element under `∂`, in the `(hdeg - 1, deg)` slice.
    fn boundary_of(&self, model: &GradedModel, target: &BarSlice, idx: usize) -> SparseVec {
        let (comp, pos) = self.decode(idx);
        let one = model.field().one();
        let mut acc = Accumulator::new();
        for k in 0..comp.len().saturating_sub(1) {
            let prod = model.mul_basis(comp[k], pos[k], comp[k + 1], pos[k + 1]);
            if prod.is_zero() {
                continue;
            }
            let mut tcomp = comp.to_vec();
            tcomp[k] += tcomp.remove(k + 1);
            let mut tpos = pos.clone();
            tpos.remove(k + 1);
            let sign = if k % 2 == 0 { one.clone() } else { -&one };
            for (q, c) in prod.iter() {
                tpos[k] = q;
                let t = target.encode(&tcomp, &tpos).expect("product lands in a present block");
                acc.push(t, &sign * c);
            }
        }
        acc.finish()
    }

    /// Rows of the differential into the `(hdeg - 1, deg)` slice.
    pub fn differential(&self, model: &GradedModel, target: &BarSlice) -> Vec<SparseVec> {
        assert!(target.hdeg + 1 == self.hdeg && target.deg == self.deg);
        (0..self.dim)
            .into_par_iter()
            .map(|idx| self.boundary_of(model, target, idx))
            .collect()
    }

    /// The tensor factors of a basis element as normal-word strings.
    pub fn factors(&self, model: &GradedModel, idx: usize) -> Vec<String> {
        let (comp, pos) = self.decode(idx);
        comp.iter()
            .zip(&pos)
            .map(|(&d, &p)| model.normal_word(d, p).display(model.names()).to_string())
            .collect()
    }
}

/// `bar_slice` with the differential assembled.
pub fn bar_slice(model: &GradedModel, i: usize, j: usize) -> Result<(BarSlice, Vec<SparseVec>)> {
    let slice = BarSlice::new(model, i, j)?;
    let rows = if i == 0 {
        vec![SparseVec::new(); slice.dim()]
    } else {
        let target = BarSlice::new(model, i - 1, j)?;
        slice.differential(model, &target)
    };
    Ok((slice, rows))
}

fn check_window(model: &GradedModel, max_deg: usize) -> Result<()> {
    if max_deg > model.max_degree() {
        return Err(Error::Bounds {
            degree: max_deg,
            max: model.max_degree(),
        });
    }
    Ok(())
}

/// `dim Tor_{i,j}` for `i <= I`, `j <= D` from ranks of bar differentials.
pub fn tor_dims(model: &GradedModel, max_hdeg: usize, max_deg: usize) -> Result<BettiTable> {
    check_window(model, max_deg)?;
    let cells: Vec<(usize, usize)> = (0..=max_deg)
        .flat_map(|j| (0..=(max_hdeg + 1).min(j.max(1))).map(move |i| (i, j)))
        .collect();
    let results: Vec<((usize, usize), (usize, usize))> = cells
        .par_iter()
        .map(|&(i, j)| {
            let slice = BarSlice::new(model, i, j)?;
            let rank = if i >= 2 {
                let target = BarSlice::new(model, i - 1, j)?;
                rank_of(slice.differential(model, &target), target.dim())
            } else {
                0
            };
            Ok(((i, j), (slice.dim(), rank)))
        })
        .collect::<Result<_>>()?;
    let info: HashMap<(usize, usize), (usize, usize)> = results.into_iter().collect();
    let get = |i: usize, j: usize| info.get(&(i, j)).copied().unwrap_or((0, 0));
    let mut dims = vec![vec![0; max_deg + 1]; max_hdeg + 1];
    for (i, row) in dims.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            let (dim, rank) = get(i, j);
            *cell = dim - rank - get(i + 1, j).1;
        }
    }
    Ok(BettiTable::new(max_hdeg, max_deg, dims))
}

/// A homology basis of one slice together with the projection `π`.
#[derive(Debug)]
pub struct Homology {
    slice: BarSlice,
    reps: Vec<SparseVec>,
    projector: Echelon,
}

impl Homology {
    pub fn compute(model: &GradedModel, i: usize, j: usize) -> Result<Self> {
        let (slice, rows) = bar_slice(model, i, j)?;
        let one = model.field().one();
        let cycles = if i == 0 {
            (0..slice.dim()).map(|k| SparseVec::unit(k, one.clone())).collect()
        } else {
            let target_dim = BarSlice::new(model, i - 1, j)?.dim();
            left_kernel(&rows, target_dim, &one)
        };
        let above = BarSlice::new(model, i + 1, j)?;
        let boundaries = above.differential(model, &slice);
        let mut projector = Echelon::with_tags(slice.dim());
        for b in boundaries {
            if projector.rank() == slice.dim() {
                break;
            }
            let _ = projector.insert_tagged(b, SparseVec::new());
        }
        let mut reps = Vec::new();
        for z in cycles {
            let tag = SparseVec::unit(reps.len(), one.clone());
            if projector.insert_tagged(z.clone(), tag).is_ok() {
                reps.push(z);
            }
        }
        for c in 0..slice.dim() {
            if projector.rank() == slice.dim() {
                break;
            }
            if !projector.is_pivot(c) {
                let _ = projector.insert_tagged(SparseVec::unit(c, one.clone()), SparseVec::new());
            }
        }
        Ok(Homology {
            slice,
            reps,
            projector,
        })
    }

    pub fn slice(&self) -> &BarSlice {
        &self.slice
    }

    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    /// Cycle representatives of the chosen homology basis.
    pub fn reps(&self) -> &[SparseVec] {
        &self.reps
    }

    /// `π(v)`: coordinates over the homology basis. For a cycle this is its
    /// class.
    pub fn project(&self, v: &SparseVec) -> SparseVec {
        let (residual, combo) = self.projector.reduce(v);
        debug_assert!(residual.is_zero());
        combo
    }
}

/// A bar cycle standing for a Tor class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorClass {
    pub bidegree: (usize, usize),
    pub representative: SparseVec,
}

/// One `(p, q)` component of `Δ`, split by the internal degrees of the
/// factors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaPart {
    pub p: usize,
    pub q: usize,
    pub left_deg: usize,
    pub right_deg: usize,
    /// Coordinates over `H_{p, left_deg} ⊗ H_{q, right_deg}`, indexed
    /// `α · dim H_right + β`.
    pub coords: SparseVec,
}

/// Caches homology bases of one algebra.
pub struct TorCoalgebra {
    model: Arc<GradedModel>,
    homology: HashMap<(usize, usize), Arc<Homology>>,
}

impl TorCoalgebra {
    pub fn new(model: Arc<GradedModel>) -> Self {
        TorCoalgebra {
            model,
            homology: HashMap::new(),
        }
    }

    pub fn model(&self) -> &Arc<GradedModel> {
        &self.model
    }

    pub fn homology(&mut self, i: usize, j: usize) -> Result<Arc<Homology>> {
        if let Some(h) = self.homology.get(&(i, j)) {
            return Ok(h.clone());
        }
        let h = Arc::new(Homology::compute(&self.model, i, j)?);
        self.homology.insert((i, j), h.clone());
        Ok(h)
    }

    /// Basis of `Tor_{i,j}` as classes.
    pub fn classes(&mut self, i: usize, j: usize) -> Result<Vec<TorClass>> {
        let h = self.homology(i, j)?;
        Ok(h.reps()
            .iter()
            .map(|r| TorClass {
                bidegree: (i, j),
                representative: r.clone(),
            })
            .collect())
    }

    /// The element `a_1 ⊗ … ⊗ a_i` of the bar complex.
    pub fn pure_tensor(&self, factors: &[crate::algebra::Element]) -> Result<TorClass> {
        let m = &self.model;
        let comp: Vec<usize> = factors.iter().map(|e| e.degree).collect();
        if comp.contains(&0) {
            return Err(Error::Contract("bar factors must lie in A_+".into()));
        }
        let j = comp.iter().sum();
        let slice = BarSlice::new(m, comp.len(), j)?;
        let mut terms: Vec<(Vec<usize>, Scalar)> = vec![(Vec::new(), m.field().one())];
        for e in factors {
            let mut next = Vec::new();
            for (pos, c) in &terms {
                for (p, x) in e.coords.iter() {
                    let mut pos = pos.clone();
                    pos.push(p);
                    next.push((pos, c * x));
                }
            }
            terms = next;
        }
        let mut acc = Accumulator::new();
        for (pos, c) in terms {
            if let Some(idx) = slice.encode(&comp, &pos) {
                acc.push(idx, c);
            }
        }
        Ok(TorClass {
            bidegree: (comp.len(), j),
            representative: acc.finish(),
        })
    }

    pub fn is_cycle(&self, c: &TorClass) -> Result<bool> {
        let (i, j) = c.bidegree;
        if i == 0 {
            return Ok(true);
        }
        let slice = BarSlice::new(&self.model, i, j)?;
        let target = BarSlice::new(&self.model, i - 1, j)?;
        let mut acc = Accumulator::new();
        for (idx, x) in c.representative.iter() {
            acc.add_scaled(x, &slice.boundary_of(&self.model, &target, idx));
        }
        Ok(acc.finish().is_zero())
    }

    /// Coordinates of the class of a cycle.
    pub fn class_coords(&mut self, c: &TorClass) -> Result<SparseVec> {
        let h = self.homology(c.bidegree.0, c.bidegree.1)?;
        Ok(h.project(&c.representative))
    }

    /// The `(p, q)` component of `Δ(c)`, `p + q = n`, `p, q >= 1`.
    pub fn delta_component(&mut self, c: &TorClass, p: usize) -> Result<Vec<DeltaPart>> {
        let (n, j) = c.bidegree;
        if p == 0 || p >= n {
            return Err(Error::Contract(format!("cannot split degree {n} at {p}")));
        }
        let q = n - p;
        let slice = BarSlice::new(&self.model, n, j)?;
        let mut parts = Vec::new();
        for left_deg in p..=j.saturating_sub(q) {
            let right_deg = j - left_deg;
            let hl = self.homology(p, left_deg)?;
            if hl.dim() == 0 {
                continue;
            }
            let hr = self.homology(q, right_deg)?;
            if hr.dim() == 0 {
                continue;
            }
            let mut left_cache: HashMap<usize, SparseVec> = HashMap::new();
            let mut right_cache: HashMap<usize, SparseVec> = HashMap::new();
            let mut acc = Accumulator::new();
            for (idx, x) in c.representative.iter() {
                let (comp, pos) = slice.decode(idx);
                if comp[..p].iter().sum::<usize>() != left_deg {
                    continue;
                }
                let li = hl.slice().encode(&comp[..p], &pos[..p]).expect("present block");
                let ri = hr.slice().encode(&comp[p..], &pos[p..]).expect("present block");
                let one = self.model.field().one();
                let l = left_cache
                    .entry(li)
                    .or_insert_with(|| hl.project(&SparseVec::unit(li, one.clone())))
                    .clone();
                let r = right_cache
                    .entry(ri)
                    .or_insert_with(|| hr.project(&SparseVec::unit(ri, one)))
                    .clone();
                if l.is_zero() || r.is_zero() {
                    continue;
                }
                acc.add_scaled(x, &l.kron(&r, hr.dim()));
            }
            parts.push(DeltaPart {
                p,
                q,
                left_deg,
                right_deg,
                coords: acc.finish(),
            });
        }
        Ok(parts)
    }

    /// `Δ(c)` in `Tr_2 ⊗ Tr_{n-2} ⊕ Tr_1 ⊗ Tr_{n-1}`.
    pub fn comultiplication_delta(&mut self, c: &TorClass) -> Result<(Vec<DeltaPart>, Vec<DeltaPart>)> {
        let n = c.bidegree.0;
        if n < 3 {
            return Err(Error::Contract(format!(
                "comultiplication needs homological degree at least 3, got {n}"
            )));
        }
        Ok((self.delta_component(c, 2)?, self.delta_component(c, 1)?))
    }

    /// Rebuilds a bar element from its printed form.
    pub fn witness_class(&self, bidegree: (usize, usize), w: &Witness) -> Result<TorClass> {
        let m = &self.model;
        let (i, j) = bidegree;
        let mut acc = Accumulator::new();
        for (coef, factors) in &w.terms {
            let c = m
                .field()
                .parse_scalar(coef)
                .ok_or_else(|| Error::Contract(format!("bad witness coefficient '{coef}'")))?;
            let elems = factors
                .iter()
                .map(|f| m.normal_form(&parse_polynomial(f, m.field(), m.names())?))
                .collect::<Result<Vec<_>>>()?;
            let t = self.pure_tensor(&elems)?;
            if t.bidegree != bidegree {
                return Err(Error::Contract(format!(
                    "witness term {} is not in bidegree ({i}, {j})",
                    factors.join(" | ")
                )));
            }
            acc.add_scaled(&c, &t.representative);
        }
        Ok(TorClass {
            bidegree,
            representative: acc.finish(),
        })
    }

    pub fn witness(&self, c: &TorClass) -> Result<Witness> {
        let slice = BarSlice::new(&self.model, c.bidegree.0, c.bidegree.1)?;
        Ok(Witness {
            terms: c
                .representative
                .iter()
                .map(|(idx, x)| (x.to_string(), slice.factors(&self.model, idx)))
                .collect(),
        })
    }
}

fn flatten(parts: &[DeltaPart], sizes: &[usize], one: &Scalar, offset: &mut usize, acc: &mut Accumulator) {
    for (part, &size) in parts.iter().zip(sizes) {
        acc.add_scaled_shifted(one, &part.coords, *offset);
        *offset += size;
    }
}

impl DeltaPart {
    pub fn is_zero(&self) -> bool {
        self.coords.is_zero()
    }
}

/// Injectivity of `Δ` on `Tr_{n,j}` for `3 <= n <= I`, `j <= D`; the first
/// failure (lexicographic in `(n, j)`) carries a kernel cycle.
pub fn k2_verdict(model: Arc<GradedModel>, max_hdeg: usize, max_deg: usize) -> Result<Verdict> {
    check_window(&model, max_deg)?;
    let dims = tor_dims(&model, max_hdeg, max_deg)?;
    k2_verdict_with_dims(model, &dims)
}

/// [`k2_verdict`] with the Tor dimensions supplied, e.g. from a minimal
/// resolution; only cells with nonzero Tor are examined in the bar complex.
pub fn k2_verdict_with_dims(model: Arc<GradedModel>, dims: &BettiTable) -> Result<Verdict> {
    let (max_hdeg, max_deg) = dims.window();
    check_window(&model, max_deg)?;
    let mut tor = TorCoalgebra::new(model);
    for n in 3..=max_hdeg {
        for j in n..=max_deg {
            if dims.get(n, j) == 0 {
                continue;
            }
            if let Some(c) = delta_kernel(&mut tor, n, j)? {
                return Ok(Verdict::Fails {
                    window: (max_hdeg, max_deg),
                    bidegree: (n, j),
                    witness: Some(tor.witness(&c)?),
                });
            }
        }
    }
    Ok(Verdict::PassesUpTo {
        window: (max_hdeg, max_deg),
    })
}

/// Re-verifies a `k2` failure certificate from scratch: the witness must be
/// a cycle, its class nonzero, and `Δ` of the class zero.
pub fn recheck_k2_witness(model: Arc<GradedModel>, bidegree: (usize, usize), w: &Witness) -> Result<bool> {
    let mut tor = TorCoalgebra::new(model);
    let c = tor.witness_class(bidegree, w)?;
    if bidegree.0 < 3 || !tor.is_cycle(&c)? || tor.class_coords(&c)?.is_zero() {
        return Ok(false);
    }
    let (two, ones) = tor.comultiplication_delta(&c)?;
    Ok(two.iter().chain(&ones).all(DeltaPart::is_zero))
}

/// Re-verifies `Tor_{i,j} != 0` directly in the bar complex.
pub fn recheck_tor_nonzero(model: &GradedModel, bidegree: (usize, usize)) -> Result<bool> {
    Ok(Homology::compute(model, bidegree.0, bidegree.1)?.dim() > 0)
}

/// A nonzero class in `ker Δ ⊆ Tr_{n,j}`, if there is one.
pub fn delta_kernel(tor: &mut TorCoalgebra, n: usize, j: usize) -> Result<Option<TorClass>> {
    let classes = tor.classes(n, j)?;
    if classes.is_empty() {
        return Ok(None);
    }
    let one = tor.model().field().one();
    let mut images = Vec::with_capacity(classes.len());
    let mut width = 0;
    for c in &classes {
        let (two, ones) = tor.comultiplication_delta(c)?;
        let mut sizes = Vec::new();
        for part in two.iter().chain(&ones) {
            let hl = tor.homology(part.p, part.left_deg)?.dim();
            let hr = tor.homology(part.q, part.right_deg)?.dim();
            sizes.push(hl * hr);
        }
        let mut acc = Accumulator::new();
        let mut offset = 0;
        flatten(&two, &sizes[..two.len()], &one, &mut offset, &mut acc);
        flatten(&ones, &sizes[two.len()..], &one, &mut offset, &mut acc);
        width = offset;
        images.push(acc.finish());
    }
    let kernel = left_kernel(&images, width, &one);
    Ok(kernel.first().map(|k| {
        let mut acc = Accumulator::new();
        for (a, x) in k.iter() {
            acc.add_scaled(x, &classes[a].representative);
        }
        TorClass {
            bidegree: (n, j),
            representative: acc.finish(),
        }
    }))
}

/// One cell of the map `Tor^A → Tor^B` induced by an inclusion.
#[derive(Clone, Debug, Serialize)]
pub struct InducedCell {
    pub i: usize,
    pub j: usize,
    pub dim_source: usize,
    pub dim_target: usize,
    pub rank: usize,
    pub injective: bool,
    /// Images of the source homology basis over the target homology basis,
    /// as `(index, coefficient)` lists.
    #[serde(skip)]
    pub matrix: Vec<SparseVec>,
}

/// The map on `H_{i,j}` for `i ∈ {1, 2}`, `j <= D`, induced by sending the
/// generators of `a` to the generators of `b` listed in `embedding`.
pub fn tor_induced_map(
    a: &GradedModel,
    b: &GradedModel,
    embedding: &[usize],
    max_deg: usize,
) -> Result<Vec<InducedCell>> {
    check_window(a, max_deg)?;
    check_window(b, max_deg)?;
    if embedding.len() != a.ngens() || embedding.iter().any(|&g| g >= b.ngens()) {
        return Err(Error::Contract("embedding does not list a target for every generator".into()));
    }
    let map: Vec<usize> = embedding.to_vec();
    for (k, r) in a.presentation().relations.iter().enumerate() {
        let image = r.relabel(&map);
        let in_window = image.homogeneous_degree().is_some_and(|d| d <= max_deg);
        if in_window && !b.normal_form(&image)?.is_zero() {
            return Err(Error::Contract(format!(
                "embedding invalid: relation {} ({}) is nonzero in the target",
                k + 1,
                r.display(a.names())
            )));
        }
    }
    // ι on normal bases, degree by degree.
    let iota: Vec<Vec<SparseVec>> = (0..=max_deg)
        .map(|d| {
            (0..a.dim(d))
                .map(|p| {
                    let w = a.normal_word(d, p);
                    let w = Word(w.letters().map(|g| map[g] as u16).collect());
                    b.nf_word(&w).cloned()
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let one = a.field().one();
    let mut out = Vec::new();
    for i in 1..=2 {
        for j in i..=max_deg {
            let ha = Homology::compute(a, i, j)?;
            let hb = Homology::compute(b, i, j)?;
            let matrix: Vec<SparseVec> = ha
                .reps()
                .iter()
                .map(|rep| {
                    let mut acc = Accumulator::new();
                    for (idx, x) in rep.iter() {
                        let (comp, pos) = ha.slice().decode(idx);
                        let mut terms: Vec<(Vec<usize>, Scalar)> = vec![(Vec::new(), one.clone())];
                        for (&d, &p) in comp.iter().zip(&pos) {
                            let mut next = Vec::new();
                            for (tp, c) in &terms {
                                for (q, y) in iota[d][p].iter() {
                                    let mut tp = tp.clone();
                                    tp.push(q);
                                    next.push((tp, c * y));
                                }
                            }
                            terms = next;
                        }
                        for (tp, c) in terms {
                            let t = hb.slice().encode(comp, &tp).expect("present block");
                            acc.push(t, x * &c);
                        }
                    }
                    hb.project(&acc.finish())
                })
                .collect();
            let rank = rank_of(matrix.iter().cloned(), hb.dim());
            out.push(InducedCell {
                i,
                j,
                dim_source: ha.dim(),
                dim_target: hb.dim(),
                rank,
                injective: rank == ha.dim(),
                matrix,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::parse_presentation;
    use crate::resolution::minimal_resolution;

    fn model(text: &str, d: usize) -> Arc<GradedModel> {
        Arc::new(GradedModel::build(&parse_presentation(text).unwrap(), d).unwrap())
    }

    const EX1: &str = "field Q\ngens x y\nrel x*x*y\nrel y*y*x";
    const COMM: &str = "field Q\ngens x y\nrel x*y - y*x";
    const CUBE: &str = "field Q\ngens x\nrel x*x*x";

    fn elem(m: &GradedModel, w: &[u16]) -> crate::algebra::Element {
        let p = crate::presentation::NCPoly::word(m.field(), Word(w.to_vec()));
        m.normal_form(&p).unwrap()
    }

    #[test]
    fn compositions_are_ordered() {
        assert_eq!(compositions(3, 2), vec![vec![1, 2], vec![2, 1]]);
        assert_eq!(compositions(2, 3), Vec::<Vec<usize>>::new());
        assert_eq!(compositions(0, 0), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn free_algebra_slice() {
        let m = model("field Q\ngens x y", 3);
        let (s, rows) = bar_slice(&m, 2, 2).unwrap();
        assert_eq!(s.dim(), 4);
        assert_eq!(rank_of(rows, 4), 4);
    }

    #[test]
    fn single_factor_slices_have_zero_differential() {
        let m = model(EX1, 4);
        for j in 1..=4 {
            let (_, rows) = bar_slice(&m, 1, j).unwrap();
            assert!(rows.iter().all(SparseVec::is_zero));
        }
    }

    #[test]
    fn polynomial_ring_slice() {
        let m = model(COMM, 3);
        let (s, rows) = bar_slice(&m, 2, 2).unwrap();
        assert_eq!(s.dim(), 4);
        assert_eq!(rank_of(rows, 3), 3);
    }

    #[test]
    fn boundary_of_boundary_vanishes() {
        let m = model(EX1, 6);
        for j in 3..=6 {
            for i in 3..=j {
                let (s, rows) = bar_slice(&m, i, j).unwrap();
                let mid = BarSlice::new(&m, i - 1, j).unwrap();
                let low = BarSlice::new(&m, i - 2, j).unwrap();
                for r in rows {
                    let mut acc = Accumulator::new();
                    for (idx, x) in r.iter() {
                        acc.add_scaled(x, &mid.boundary_of(&m, &low, idx));
                    }
                    assert!(acc.finish().is_zero(), "∂∂ ≠ 0 on slice ({i}, {j})");
                }
                let _ = s;
            }
        }
    }

    #[test]
    fn example_one_tor_dims() {
        let m = model(EX1, 6);
        let t = tor_dims(&m, 3, 6).unwrap();
        assert_eq!(t.nonzero(), vec![((0, 0), 1), ((1, 1), 2), ((2, 3), 2), ((3, 5), 2)]);
    }

    #[test]
    fn tor_agrees_with_resolution() {
        for text in [EX1, COMM, CUBE, "field F 3\ngens a b\nrel a*b + b*a\nrel a*a*b"] {
            let m = model(text, 6);
            let r = minimal_resolution(m.clone(), 4, 6).unwrap();
            assert_eq!(tor_dims(&m, 4, 6).unwrap(), r.betti_table(), "{text}");
        }
    }

    #[test]
    fn example_one_witness_is_annihilated() {
        let m = model(EX1, 5);
        let mut tor = TorCoalgebra::new(m.clone());
        let c = tor
            .pure_tensor(&[elem(&m, &[1, 1]), elem(&m, &[0, 0]), elem(&m, &[1])])
            .unwrap();
        assert_eq!(c.bidegree, (3, 5));
        assert!(tor.is_cycle(&c).unwrap());
        assert!(!tor.class_coords(&c).unwrap().is_zero());
        let (two, one) = tor.comultiplication_delta(&c).unwrap();
        assert!(two.iter().chain(&one).all(DeltaPart::is_zero));
    }

    #[test]
    fn example_one_fails_k2_at_three_five() {
        let v = k2_verdict(model(EX1, 6), 4, 6).unwrap();
        assert_eq!(v.failure(), Some((3, 5)));
        let Verdict::Fails { witness: Some(w), bidegree, .. } = &v else {
            panic!("expected a witness")
        };
        assert!(recheck_k2_witness(model(EX1, 6), *bidegree, w).unwrap());
        let mut forged = w.clone();
        forged.terms.push(("1".into(), vec!["x".into(), "x".into(), "x*y*x".into()]));
        assert!(!recheck_k2_witness(model(EX1, 6), *bidegree, &forged).unwrap());
        assert!(recheck_tor_nonzero(&model(EX1, 6), (3, 5)).unwrap());
        assert!(!recheck_tor_nonzero(&model(EX1, 6), (3, 4)).unwrap());
    }

    #[test]
    fn k2_from_resolution_dims_matches() {
        let m = model(EX1, 6);
        let r = crate::resolution::minimal_resolution(m.clone(), 4, 6).unwrap();
        assert_eq!(k2_verdict_with_dims(m.clone(), &r.betti_table()).unwrap(), k2_verdict(m, 4, 6).unwrap());
    }

    #[test]
    fn truncated_polynomial_ring_comultiplication() {
        let m = model(CUBE, 5);
        let mut tor = TorCoalgebra::new(m.clone());
        let c = tor
            .pure_tensor(&[elem(&m, &[0]), elem(&m, &[0, 0]), elem(&m, &[0])])
            .unwrap();
        assert!(tor.is_cycle(&c).unwrap());
        let one = tor.delta_component(&c, 1).unwrap();
        assert!(one.iter().any(|p| !p.is_zero()));
        assert!(k2_verdict(m, 5, 5).unwrap().is_pass());
    }

    #[test]
    fn free_algebra_passes() {
        assert!(k2_verdict(model("field Q\ngens x y", 4), 4, 4).unwrap().is_pass());
    }

    #[test]
    fn inclusion_into_itself_is_injective() {
        let m = model(EX1, 5);
        let cells = tor_induced_map(&m, &m, &[0, 1], 5).unwrap();
        assert!(cells.iter().all(|c| c.injective));
        assert_eq!(cells.iter().find(|c| (c.i, c.j) == (2, 3)).unwrap().dim_source, 2);
    }

    #[test]
    fn bad_embedding_is_rejected() {
        let a = model(EX1, 4);
        let b = model("field Q\ngens x y", 4);
        assert!(matches!(tor_induced_map(&a, &b, &[0, 1], 4), Err(Error::Contract(_))));
    }
}
