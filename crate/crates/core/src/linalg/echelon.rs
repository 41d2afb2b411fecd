//! Sparse row echelon forms.
//!
//! Pivots are the first nonzero column of a row. [`Echelon`] is incremental:
//! inserted rows are only reduced until their leading column is new, which is
//! enough to decide independence. [`Echelon::into_rref`] back-substitutes to
//! the unique reduced form.

use super::scalar::Scalar;
use super::sparse::SparseVec;

const NONE: u32 = u32::MAX;

/// Incremental echelon basis of a subspace of `k^ncols`, optionally tracking
/// for every row which combination of inserted vectors ("tags") produced it.
#[derive(Clone, Debug)]
pub struct Echelon {
    ncols: usize,
    rows: Vec<SparseVec>,
    tags: Option<Vec<SparseVec>>,
    pivot_row: Vec<u32>,
}

impl Echelon {
    pub fn new(ncols: usize) -> Self {
        Echelon {
            ncols,
            rows: Vec::new(),
            tags: None,
            pivot_row: vec![NONE; ncols],
        }
    }

    pub fn with_tags(ncols: usize) -> Self {
        Echelon {
            tags: Some(Vec::new()),
            ..Echelon::new(ncols)
        }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[SparseVec] {
        &self.rows
    }

    pub fn is_pivot(&self, col: usize) -> bool {
        self.pivot_row[col] != NONE
    }

    /// Inserts `v`; returns whether it enlarged the span.
    pub fn insert(&mut self, v: SparseVec) -> bool {
        self.insert_tagged(v, SparseVec::new()).is_ok()
    }

    /// Inserts `v` carrying `tag`. On dependence returns the tag combination
    /// that sums (together with `tag`) to zero, i.e. a linear relation.
    pub fn insert_tagged(&mut self, mut v: SparseVec, mut tag: SparseVec) -> Result<usize, SparseVec> {
        loop {
            let (col, lead) = match v.leading() {
                None => return Err(tag),
                Some((c, a)) => (c, a.clone()),
            };
            let r = self.pivot_row[col];
            if r == NONE {
                let inv = lead.inv();
                if !inv.is_one() {
                    v = v.scale(&inv);
                    tag = tag.scale(&inv);
                }
                let idx = self.rows.len();
                self.pivot_row[col] = idx as u32;
                self.rows.push(v);
                if let Some(tags) = &mut self.tags {
                    tags.push(tag);
                }
                return Ok(idx);
            }
            let neg = -&lead;
            v = v.add_scaled(&neg, &self.rows[r as usize]);
            if let Some(tags) = &self.tags {
                tag = tag.add_scaled(&neg, &tags[r as usize]);
            }
        }
    }

    /// Eliminates every pivot column from `v`. Returns the residual (supported
    /// off the pivot columns) and, when tags are tracked, `Σ a_r tag_r` where
    /// `v = residual + Σ a_r row_r`.
    pub fn reduce(&self, v: &SparseVec) -> (SparseVec, SparseVec) {
        let mut v = v.clone();
        let mut combo = SparseVec::new();
        let mut k = 0;
        while k < v.nnz() {
            let (col, a) = {
                let (c, a) = &v.entries()[k];
                (*c, a.clone())
            };
            let r = self.pivot_row[col];
            if r == NONE {
                k += 1;
                continue;
            }
            if let Some(tags) = &self.tags {
                combo = combo.add_scaled(&a, &tags[r as usize]);
            }
            v = v.add_scaled(&-&a, &self.rows[r as usize]);
        }
        (v, combo)
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).0.is_zero()
    }

    /// Finishes into the reduced row echelon form, rows sorted by pivot.
    pub fn into_rref(self) -> Rref {
        let Echelon {
            ncols,
            mut rows,
            tags,
            pivot_row,
        } = self;
        let mut tags = tags;
        let mut order: Vec<usize> = (0..rows.len()).collect();
        order.sort_by_key(|&r| std::cmp::Reverse(rows[r].leading().map(|(c, _)| c)));
        // Descending pivot order: every pivot met while scanning a row belongs
        // to a row that is already fully reduced.
        for &r in &order {
            let mut k = 1;
            loop {
                let (col, a) = match rows[r].entries().get(k) {
                    None => break,
                    Some((c, a)) => (*c, a.clone()),
                };
                let s = pivot_row[col];
                if s == NONE {
                    k += 1;
                    continue;
                }
                let s = s as usize;
                let neg = -&a;
                let next = rows[r].add_scaled(&neg, &rows[s]);
                rows[r] = next;
                if let Some(t) = &mut tags {
                    let next = t[r].add_scaled(&neg, &t[s]);
                    t[r] = next;
                }
            }
        }
        let mut order: Vec<usize> = (0..rows.len()).collect();
        order.sort_by_key(|&r| rows[r].leading().map(|(c, _)| c));
        let pivots = order
            .iter()
            .map(|&r| rows[r].leading().expect("nonzero row").0)
            .collect();
        let mut taken: Vec<Option<SparseVec>> = rows.into_iter().map(Some).collect();
        let sorted_rows = order.iter().map(|&r| taken[r].take().unwrap()).collect();
        let sorted_tags = tags.map(|t| {
            let mut t: Vec<Option<SparseVec>> = t.into_iter().map(Some).collect();
            order.iter().map(|&r| t[r].take().unwrap()).collect()
        });
        Rref {
            ncols,
            rows: sorted_rows,
            pivots,
            tags: sorted_tags,
        }
    }
}

/// A reduced row echelon form.
#[derive(Clone, Debug)]
pub struct Rref {
    pub ncols: usize,
    pub rows: Vec<SparseVec>,
    pub pivots: Vec<usize>,
    pub tags: Option<Vec<SparseVec>>,
}

impl Rref {
    pub fn of_rows(ncols: usize, rows: impl IntoIterator<Item = SparseVec>) -> Rref {
        let mut e = Echelon::new(ncols);
        for r in rows {
            e.insert(r);
        }
        e.into_rref()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Columns that carry no pivot, ascending.
    pub fn free_columns(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.ncols];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.ncols).filter(|&c| !is_pivot[c]).collect()
    }

    /// Canonical null-space basis of the row space: one vector per free
    /// column `f`, equal to `e_f - Σ_r R[r][f] e_{pivot(r)}`.
    pub fn kernel_basis(&self, one: &Scalar) -> Vec<SparseVec> {
        self.kernel_basis_below(self.ncols, one)
    }

    /// Kernel basis restricted to the first `ncols` columns (the remaining
    /// columns are augmented data and are ignored).
    pub fn kernel_basis_below(&self, ncols: usize, one: &Scalar) -> Vec<SparseVec> {
        let mut parts: Vec<Vec<(usize, Scalar)>> = vec![Vec::new(); ncols];
        let mut is_pivot = vec![false; ncols];
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if p >= ncols {
                continue;
            }
            is_pivot[p] = true;
            for (c, x) in row.iter().skip(1) {
                if c < ncols {
                    parts[c].push((p, -x));
                }
            }
        }
        (0..ncols)
            .filter(|&f| !is_pivot[f])
            .map(|f| {
                let mut pairs = std::mem::take(&mut parts[f]);
                pairs.push((f, one.clone()));
                SparseVec::from_pairs(pairs)
            })
            .collect()
    }
}

/// Transposes a row-major sparse matrix with `ncols` columns.
pub fn transpose(rows: &[SparseVec], ncols: usize) -> Vec<SparseVec> {
    let mut cols: Vec<Vec<(usize, Scalar)>> = vec![Vec::new(); ncols];
    for (r, row) in rows.iter().enumerate() {
        for (c, x) in row.iter() {
            cols[c].push((r, x.clone()));
        }
    }
    cols.into_iter().map(SparseVec::from_sorted).collect()
}

/// Basis of `{x : x · M = 0}` where `M` has the given rows (images of the
/// source basis) in a target of dimension `target_dim`. Canonical: read off
/// the rref of `Mᵀ`.
pub fn left_kernel(images: &[SparseVec], target_dim: usize, one: &Scalar) -> Vec<SparseVec> {
    let mt = transpose(images, target_dim);
    Rref::of_rows(images.len(), mt).kernel_basis(one)
}

/// Rank of the span of `rows`.
pub fn rank_of(rows: impl IntoIterator<Item = SparseVec>, ncols: usize) -> usize {
    let mut e = Echelon::new(ncols);
    for r in rows {
        e.insert(r);
    }
    e.rank()
}

/// Solves `x · M = t_k` for each target vector, where `M` has the given rows.
/// Returns the solution whose coordinates off the pivot columns of `rref(Mᵀ)`
/// are zero, or `None` for inconsistent right-hand sides.
pub fn solve_left(
    images: &[SparseVec],
    target_dim: usize,
    targets: &[SparseVec],
) -> Vec<Option<SparseVec>> {
    let nsrc = images.len();
    let mut mt = transpose(images, target_dim);
    for (k, t) in targets.iter().enumerate() {
        for (c, x) in t.iter() {
            assert!(c < target_dim, "right-hand side exceeds target dimension");
            let row = std::mem::take(&mut mt[c]);
            let mut entries = row.into_entries();
            entries.push((nsrc + k, x.clone()));
            mt[c] = SparseVec::from_sorted(entries);
        }
    }
    let rref = Rref::of_rows(nsrc + targets.len(), mt);
    solutions_from_rref(&rref, nsrc, targets.len())
}

fn solutions_from_rref(rref: &Rref, nsrc: usize, nrhs: usize) -> Vec<Option<SparseVec>> {
    let mut consistent = vec![true; nrhs];
    let mut sols: Vec<Vec<(usize, Scalar)>> = vec![Vec::new(); nrhs];
    for (row, &p) in rref.rows.iter().zip(&rref.pivots) {
        if p >= nsrc {
            for (c, _) in row.iter() {
                consistent[c - nsrc] = false;
            }
            continue;
        }
        for (c, x) in row.iter() {
            if c >= nsrc {
                sols[c - nsrc].push((p, x.clone()));
            }
        }
    }
    sols.into_iter()
        .zip(consistent)
        .map(|(s, ok)| ok.then(|| SparseVec::from_pairs(s)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::FieldSpec;

    fn v(q: FieldSpec, xs: &[i64]) -> SparseVec {
        SparseVec::from_dense(&xs.iter().map(|&x| q.int(x)).collect::<Vec<_>>())
    }

    #[test]
    fn tagged_dependency_is_a_relation() {
        let q = FieldSpec::Rationals;
        let mut e = Echelon::with_tags(3);
        let a = v(q, &[1, 2, 0]);
        let b = v(q, &[0, 1, 1]);
        let c = v(q, &[2, 5, 1]);
        assert!(e.insert_tagged(a, SparseVec::unit(0, q.one())).is_ok());
        assert!(e.insert_tagged(b, SparseVec::unit(1, q.one())).is_ok());
        let rel = e.insert_tagged(c, SparseVec::unit(2, q.one())).unwrap_err();
        // c - 2a - b = 0
        assert_eq!(rel, v(q, &[-2, -1, 1]));
    }

    #[test]
    fn rref_is_fully_reduced() {
        let q = FieldSpec::Rationals;
        let r = Rref::of_rows(3, vec![v(q, &[0, 1, 1]), v(q, &[1, 1, 0])]);
        assert_eq!(r.pivots, vec![0, 1]);
        assert_eq!(r.rows[0], v(q, &[1, 0, -1]));
        assert_eq!(r.rows[1], v(q, &[0, 1, 1]));
    }

    #[test]
    fn left_kernel_and_solve() {
        let q = FieldSpec::Rationals;
        // images of three source vectors in k^2
        let images = vec![v(q, &[1, 0]), v(q, &[0, 1]), v(q, &[1, 1])];
        let k = left_kernel(&images, 2, &q.one());
        assert_eq!(k, vec![v(q, &[-1, -1, 1])]);
        let s = solve_left(&images, 2, &[v(q, &[2, 3])]);
        assert_eq!(s[0].as_ref().unwrap(), &v(q, &[2, 3, 0]));
        let images = vec![v(q, &[1, 1])];
        let s = solve_left(&images, 2, &[v(q, &[1, 0]), v(q, &[3, 3])]);
        assert!(s[0].is_none());
        assert_eq!(s[1].as_ref().unwrap(), &v(q, &[3]));
    }
}
