//! Graded free left modules `A ⊗ V` and maps between them.
//!
//! An element of degree `j` is a row vector: the concatenation, over the
//! generators `e` with `deg e <= j`, of coordinates in `A_{j - deg e}`. A map
//! is given by the images of the generators and acts by right
//! multiplication, `(a_e) ↦ Σ_e a_e · row_e`.

use serde::Serialize;

use crate::algebra::GradedModel;
use crate::linalg::{Accumulator, Scalar, SparseVec};

#[derive(Clone, Debug)]
struct Block {
    gen: usize,
    offset: usize,
    len: usize,
}

#[derive(Clone, Debug)]
struct Layout {
    blocks: Vec<Block>,
    /// Block index of every generator, if present in this degree.
    block_of: Vec<Option<usize>>,
    dim: usize,
}

#[derive(Clone, Debug)]
pub struct FreeModule {
    gen_degrees: Vec<usize>,
    layouts: Vec<Layout>,
}

impl FreeModule {
    /// Free module with the given generator degrees, laid out up to the
    /// model's degree bound.
    pub fn new(gen_degrees: Vec<usize>, model: &GradedModel) -> Self {
        let layouts = (0..=model.max_degree())
            .map(|j| {
                let mut blocks = Vec::new();
                let mut block_of = vec![None; gen_degrees.len()];
                let mut dim = 0;
                for (g, &dg) in gen_degrees.iter().enumerate() {
                    if dg > j {
                        continue;
                    }
                    let len = model.dim(j - dg);
                    block_of[g] = Some(blocks.len());
                    blocks.push(Block {
                        gen: g,
                        offset: dim,
                        len,
                    });
                    dim += len;
                }
                Layout {
                    blocks,
                    block_of,
                    dim,
                }
            })
            .collect();
        FreeModule {
            gen_degrees,
            layouts,
        }
    }

    pub fn rank(&self) -> usize {
        self.gen_degrees.len()
    }

    pub fn gen_degrees(&self) -> &[usize] {
        &self.gen_degrees
    }

    pub fn gen_degree(&self, g: usize) -> usize {
        self.gen_degrees[g]
    }

    pub fn max_degree(&self) -> usize {
        self.layouts.len() - 1
    }

    /// Dimension of the degree-`j` piece; zero beyond the layout.
    pub fn dim(&self, j: usize) -> usize {
        self.layouts.get(j).map_or(0, |l| l.dim)
    }

    /// Offset of generator `g`'s block in degree `j`.
    pub fn offset(&self, j: usize, g: usize) -> Option<usize> {
        let l = &self.layouts[j];
        l.block_of[g].map(|b| l.blocks[b].offset)
    }

    /// The basis vector `w · e_g` of degree `deg g + deg w`, where `w` is the
    /// `pos`-th normal word.
    pub fn basis_vector(&self, g: usize, pos: usize, word_degree: usize, one: Scalar) -> SparseVec {
        let j = self.gen_degrees[g] + word_degree;
        SparseVec::unit(self.offset(j, g).expect("generator present") + pos, one)
    }

    /// Splits a degree-`j` coordinate vector into `(generator, coordinates in
    /// A_{j - deg g})` pieces, skipping zero pieces.
    pub fn split(&self, j: usize, v: &SparseVec) -> Vec<(usize, SparseVec)> {
        let l = &self.layouts[j];
        let mut out: Vec<(usize, SparseVec)> = Vec::new();
        let mut current: Option<(usize, Vec<(usize, Scalar)>)> = None;
        let mut b = 0;
        for (c, x) in v.iter() {
            while c >= l.blocks[b].offset + l.blocks[b].len {
                b += 1;
            }
            let block = &l.blocks[b];
            match &mut current {
                Some((g, entries)) if *g == block.gen => entries.push((c - block.offset, x.clone())),
                _ => {
                    if let Some((g, entries)) = current.take() {
                        out.push((g, SparseVec::from_sorted(entries)));
                    }
                    current = Some((block.gen, vec![(c - block.offset, x.clone())]));
                }
            }
        }
        if let Some((g, entries)) = current {
            out.push((g, SparseVec::from_sorted(entries)));
        }
        out
    }

    /// Assembles a degree-`j` vector from per-generator coordinates.
    pub fn join(&self, j: usize, parts: &[(usize, SparseVec)]) -> SparseVec {
        let mut acc = Accumulator::new();
        for (g, v) in parts {
            let off = self.offset(j, *g).expect("generator present");
            for (c, x) in v.iter() {
                acc.push(off + c, x.clone());
            }
        }
        acc.finish()
    }

    /// Left multiplication of a degree-`j` element by the generator `x` of
    /// the algebra; requires `j + 1 <= D`.
    pub fn left_mul_gen(&self, model: &GradedModel, x: usize, j: usize, v: &SparseVec) -> SparseVec {
        let parts: Vec<(usize, SparseVec)> = self
            .split(j, v)
            .into_iter()
            .map(|(g, c)| (g, model.left_mul_gen(x, j - self.gen_degrees[g], &c)))
            .collect();
        self.join(j + 1, &parts)
    }

    /// Left multiplication of a degree-`j` element by the `pos`-th normal
    /// word of degree `d`.
    pub fn left_mul_basis(
        &self,
        model: &GradedModel,
        d: usize,
        pos: usize,
        j: usize,
        v: &SparseVec,
    ) -> SparseVec {
        let parts: Vec<(usize, SparseVec)> = self
            .split(j, v)
            .into_iter()
            .map(|(g, c)| {
                let dc = j - self.gen_degrees[g];
                let mut acc = Accumulator::new();
                for (q, x) in c.iter() {
                    acc.add_scaled(x, model.mul_basis(d, pos, dc, q));
                }
                (g, acc.finish())
            })
            .collect();
        self.join(j + d, &parts)
    }
}

/// A degree-preserving map of free modules given by generator images.
#[derive(Clone, Debug)]
pub struct FreeMap {
    pub source: FreeModule,
    pub target: FreeModule,
    /// `rows[e]` is the image of source generator `e`, an element of the
    /// target in degree `deg e`.
    pub rows: Vec<SparseVec>,
}

impl FreeMap {
    pub fn new(source: FreeModule, target: FreeModule, rows: Vec<SparseVec>) -> Self {
        assert_eq!(source.rank(), rows.len());
        FreeMap {
            source,
            target,
            rows,
        }
    }

    /// Entry `(e, g)`: coordinates in `A_{deg e - deg g}`.
    pub fn entry(&self, e: usize, g: usize) -> SparseVec {
        let de = self.source.gen_degree(e);
        let dg = self.target.gen_degree(g);
        if dg > de {
            return SparseVec::new();
        }
        self.target
            .split(de, &self.rows[e])
            .into_iter()
            .find(|(h, _)| *h == g)
            .map_or_else(SparseVec::new, |(_, v)| v)
    }

    /// Image of `w · e` where `w` is the `pos`-th normal word of degree `d`.
    pub fn apply_basis(&self, model: &GradedModel, e: usize, d: usize, pos: usize) -> SparseVec {
        let de = self.source.gen_degree(e);
        self.target.left_mul_basis(model, d, pos, de, &self.rows[e])
    }

    /// Images of the whole degree-`j` basis of the source, in order.
    pub fn basis_images(&self, model: &GradedModel, j: usize) -> Vec<SparseVec> {
        let mut out = Vec::with_capacity(self.source.dim(j));
        for (e, &de) in self.source.gen_degrees().iter().enumerate() {
            if de > j {
                continue;
            }
            for pos in 0..model.dim(j - de) {
                out.push(self.apply_basis(model, e, j - de, pos));
            }
        }
        out
    }

    /// Image of a degree-`j` source element.
    pub fn apply(&self, model: &GradedModel, j: usize, v: &SparseVec) -> SparseVec {
        let mut acc = Accumulator::new();
        for (e, c) in self.source.split(j, v) {
            let d = j - self.source.gen_degree(e);
            for (pos, x) in c.iter() {
                acc.add_scaled(x, &self.apply_basis(model, e, d, pos));
            }
        }
        acc.finish()
    }

    /// Positions `(e, g)` whose entry has a nonzero degree-0 part, with the
    /// constant.
    pub fn constant_entries(&self) -> Vec<(usize, usize, Scalar)> {
        let mut out = Vec::new();
        for e in 0..self.source.rank() {
            for g in 0..self.target.rank() {
                if self.source.gen_degree(e) != self.target.gen_degree(g) {
                    continue;
                }
                if let Some(c) = self.entry(e, g).get(0) {
                    out.push((e, g, c.clone()));
                }
            }
        }
        out
    }

    /// Entries as polynomial strings in the normal words of the model.
    pub fn display_rows(&self, model: &GradedModel) -> Vec<Vec<String>> {
        (0..self.source.rank())
            .map(|e| {
                (0..self.target.rank())
                    .map(|g| {
                        let de = self.source.gen_degree(e);
                        let dg = self.target.gen_degree(g);
                        if dg > de {
                            return "0".to_string();
                        }
                        model.display_coords(de - dg, &self.entry(e, g))
                    })
                    .collect()
            })
            .collect()
    }
}

/// Shape of a matrix over the algebra with degree tags.
#[derive(Clone, Debug, Serialize)]
pub struct MatrixReport {
    pub source_degrees: Vec<usize>,
    pub target_degrees: Vec<usize>,
    pub rows: Vec<Vec<String>>,
}

impl MatrixReport {
    pub fn of(map: &FreeMap, model: &GradedModel) -> Self {
        MatrixReport {
            source_degrees: map.source.gen_degrees().to_vec(),
            target_degrees: map.target.gen_degrees().to_vec(),
            rows: map.display_rows(model),
        }
    }
}
