//! Seeded random Ore extensions of small algebras and the per-instance
//! consistency checks run on them.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::GradedModel;
use crate::error::Result;
use crate::linalg::{FieldSpec, Matrix, Scalar};
use crate::ore::{
    build_ore_model, build_p_q, construct_chain_map, mapping_cone, validate_ore, verify_chain_map,
};
use crate::presentation::{NCPoly, OreSpec, Presentation, Word};
use crate::resolution::{minimal_resolution, BettiTable, Verdict};
use crate::tor::{k2_verdict_with_dims, tor_dims, tor_induced_map};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FuzzConfig {
    pub max_gens: usize,
    pub max_rels: usize,
    pub max_rel_deg: usize,
    pub max_hdeg: usize,
    pub max_deg: usize,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig {
            max_gens: 3,
            max_rels: 3,
            max_rel_deg: 3,
            max_hdeg: 4,
            max_deg: 5,
        }
    }
}

#[derive(Clone, Debug)]
pub struct FuzzInstance {
    pub seed: u64,
    pub index: u64,
    pub presentation: Presentation,
    pub ore: OreSpec,
}

impl FuzzInstance {
    pub fn ore_text(&self) -> String {
        self.ore.to_text(&self.presentation)
    }
}

const NAMES: [&str; 3] = ["x", "y", "w"];

fn random_relation(rng: &mut ChaCha8Rng, field: FieldSpec, ngens: usize, max_deg: usize) -> NCPoly {
    loop {
        let deg = rng.gen_range(2..=max_deg);
        let nterms = rng.gen_range(1..=3);
        let terms = (0..nterms).map(|_| {
            let w = Word((0..deg).map(|_| rng.gen_range(0..ngens) as u16).collect());
            let c = *[1, -1, 2].choose(rng).expect("nonempty");
            (w, field.int(c))
        });
        let terms: Vec<_> = terms.collect();
        let r = NCPoly::from_terms(field, terms);
        if !r.is_zero() {
            return r;
        }
    }
}

fn random_sigma(rng: &mut ChaCha8Rng, field: FieldSpec, n: usize) -> Matrix {
    let mut m = Matrix::zeros(field, n, n);
    match rng.gen_range(0..4) {
        0 => return Matrix::identity(field, n),
        1 => {
            let c = field.int(*[2, -1].choose(rng).expect("nonempty"));
            for g in 0..n {
                m[(g, g)] = c.clone();
            }
        }
        2 => {
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(rng);
            for (g, &k) in perm.iter().enumerate() {
                m[(g, k)] = field.one();
            }
        }
        _ => {
            for g in 0..n {
                m[(g, g)] = field.int(*[1, -1, 2].choose(rng).expect("nonempty"));
            }
        }
    }
    m
}

/// Instance `index` of the stream seeded by `seed`. `σ` is drawn from
/// identity, scalar, permutation and diagonal maps and replaced by the
/// identity if it does not preserve the ideal; `δ` is zero or the inner
/// σ-derivation `a ↦ a t - t σ(a)` for a random `t ∈ V`.
pub fn generate(seed: u64, index: u64, cfg: &FuzzConfig) -> Result<FuzzInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let field = FieldSpec::Rationals;
    let ngens = rng.gen_range(1..=cfg.max_gens.clamp(1, NAMES.len()));
    let nrels = rng.gen_range(0..=cfg.max_rels);
    let rels = (0..nrels)
        .map(|_| random_relation(&mut rng, field, ngens, cfg.max_rel_deg.max(2)))
        .collect();
    let names = NAMES[..ngens].iter().map(|s| s.to_string()).collect();
    let p = Presentation::new(field, names, rels)?;
    let check = GradedModel::build(&p, p.max_relation_degree().max(1) + 1)?;
    let sigma = random_sigma(&mut rng, field, ngens);
    let t: Vec<Scalar> = (0..ngens)
        .map(|_| field.int(rng.gen_range(-1..=1)))
        .collect();
    let use_delta = rng.gen_bool(0.5);
    let build = |sigma: Matrix| -> Result<OreSpec> {
        let tpoly = NCPoly::from_terms(field, t.iter().enumerate().map(|(k, c)| (Word::letter(k), c.clone())));
        let delta = (0..ngens)
            .map(|g| {
                if !use_delta {
                    return NCPoly::zero(field);
                }
                let a = NCPoly::word(field, Word::letter(g));
                let sa = NCPoly::from_terms(field, (0..ngens).map(|k| (Word::letter(k), sigma[(g, k)].clone())));
                a.mul(&tpoly).sub(&tpoly.mul(&sa))
            })
            .collect();
        OreSpec::new(&p, sigma, delta)
    };
    let mut ore = build(sigma)?;
    if validate_ore(&ore, &check).is_err() {
        ore = build(Matrix::identity(field, ngens))?;
    }
    Ok(FuzzInstance {
        seed,
        index,
        presentation: p,
        ore,
    })
}

/// Results of every check on one instance.
#[derive(Clone, Debug, Serialize)]
pub struct InstanceReport {
    pub seed: u64,
    pub index: u64,
    pub presentation: String,
    pub ore: String,
    pub window: (usize, usize),
    pub hilbert_a: Vec<usize>,
    pub hilbert_b: Vec<usize>,
    #[serde(skip)]
    pub betti_a: BettiTable,
    #[serde(skip)]
    pub betti_b: BettiTable,
    #[serde(skip)]
    pub cone_table: BettiTable,
    /// `dim B_d = Σ_{k <= d} dim A_k`.
    pub hilbert_identity: bool,
    pub homology_pq: bool,
    pub chain_map: bool,
    /// Cone exact in the window with `H_0 = k`.
    pub cone_exact: bool,
    /// `Betti^B <= Betti^A(i, j) + Betti^A(i - 1, j - 1)` cellwise.
    pub cone_bound: bool,
    /// Equality in the cone bound; checked only when `A` passes `k2`.
    pub betti_sum: Option<bool>,
    #[serde(skip)]
    pub k2_a: Verdict,
    #[serde(skip)]
    pub k2_b: Verdict,
    /// Both pass or both fail in the shared window.
    pub consistent: bool,
    /// Bar-complex Tor equals the resolution's Betti table, for A and B.
    pub crosscheck: Option<bool>,
    /// `Tor^A_{i,j} → Tor^B_{i,j}` injective for `i ∈ {1, 2}`.
    pub induced_injective: Option<bool>,
}

impl InstanceReport {
    /// Every performed check passed.
    pub fn ok(&self) -> bool {
        self.hilbert_identity
            && self.homology_pq
            && self.chain_map
            && self.cone_exact
            && self.cone_bound
            && self.betti_sum != Some(false)
            && self.consistent
            && self.crosscheck != Some(false)
            && self.induced_injective != Some(false)
    }
}

/// Runs the pipeline on an instance: models of `A` and `B`, minimal
/// resolutions, `P`, `Q`, `f`, the cone, and `k2` verdicts for both. With
/// `bar_checks`, also compares bar-complex Tor with the resolutions and
/// checks injectivity of `Tor^A → Tor^B` in degrees 1 and 2.
pub fn check_instance(inst: &FuzzInstance, cfg: &FuzzConfig, bar_checks: bool) -> Result<InstanceReport> {
    let (max_hdeg, max_deg) = (cfg.max_hdeg, cfg.max_deg);
    let p = &inst.presentation;
    let a = Arc::new(GradedModel::build(p, max_deg)?);
    let ore = validate_ore(&inst.ore, &a)?;
    let om = build_ore_model(a.clone(), ore, max_deg)?;
    let b = om.ext().clone();
    let hilbert_a = a.hilbert_function();
    let hilbert_b = b.hilbert_function();
    let hilbert_identity = hilbert_b
        .iter()
        .enumerate()
        .all(|(d, &x)| x == hilbert_a[..=d].iter().sum::<usize>());
    let ra = minimal_resolution(a.clone(), max_hdeg, max_deg)?;
    let rb = minimal_resolution(b.clone(), max_hdeg, max_deg)?;
    let betti_a = ra.betti_table();
    let betti_b = rb.betti_table();
    let c = build_p_q(&ra, &om)?;
    let homology_pq = c.homology_check().passed();
    let f = construct_chain_map(&c, &om)?;
    let chain_map = verify_chain_map(&f, &c, &om)?.ok;
    let cone = mapping_cone(&f, &c)?;
    let cone_exact = cone.check_complex().is_ok() && cone.check_exact().is_ok();
    let cone_table = cone.betti_table();
    let cells = || (0..=max_hdeg).flat_map(|i| (0..=max_deg).map(move |j| (i, j)));
    let sum = |i: usize, j: usize| {
        betti_a.get(i, j) + if i >= 1 && j >= 1 { betti_a.get(i - 1, j - 1) } else { 0 }
    };
    let cone_bound = cells().all(|(i, j)| betti_b.get(i, j) <= cone_table.get(i, j) && cone_table.get(i, j) == sum(i, j));
    let k2_a = k2_verdict_with_dims(a.clone(), &betti_a)?;
    let k2_b = k2_verdict_with_dims(b.clone(), &betti_b)?;
    let betti_sum = k2_a
        .is_pass()
        .then(|| cells().all(|(i, j)| betti_b.get(i, j) == sum(i, j)));
    let consistent = k2_a.is_pass() == k2_b.is_pass();
    let (crosscheck, induced_injective) = if bar_checks {
        let cross = tor_dims(&a, max_hdeg, max_deg)? == betti_a && tor_dims(&b, max_hdeg, max_deg)? == betti_b;
        let embedding: Vec<usize> = (0..p.ngens()).collect();
        let induced = tor_induced_map(&a, &b, &embedding, max_deg)?;
        (Some(cross), Some(induced.iter().all(|cell| cell.injective)))
    } else {
        (None, None)
    };
    Ok(InstanceReport {
        seed: inst.seed,
        index: inst.index,
        presentation: p.to_string(),
        ore: inst.ore_text(),
        window: (max_hdeg, max_deg),
        hilbert_a,
        hilbert_b,
        betti_a,
        betti_b,
        cone_table,
        hilbert_identity,
        homology_pq,
        chain_map,
        cone_exact,
        cone_bound,
        betti_sum,
        k2_a,
        k2_b,
        consistent,
        crosscheck,
        induced_injective,
    })
}

/// Regenerates an instance from its seed and index and checks it again.
pub fn recheck(seed: u64, index: u64, cfg: &FuzzConfig, bar_checks: bool) -> Result<InstanceReport> {
    let inst = generate(seed, index, cfg)?;
    check_instance(&inst, cfg, bar_checks)
}

/// A human-readable certificate for a failed instance.
pub fn certificate(r: &InstanceReport) -> String {
    let mut out = format!(
        "instance {} of seed {} [window ({}, {})]\n{}{}",
        r.index, r.seed, r.window.0, r.window.1, r.presentation, r.ore
    );
    out.push_str(&format!("k2(A): {}\nk2(B): {}\n", r.k2_a, r.k2_b));
    out.push_str(&format!("Betti(A):\n{}Betti(B):\n{}", r.betti_a, r.betti_b));
    let flags = [
        ("hilbert identity", r.hilbert_identity),
        ("P/Q homology", r.homology_pq),
        ("chain map", r.chain_map),
        ("cone exact", r.cone_exact),
        ("cone bound", r.cone_bound),
        ("Betti sum", r.betti_sum != Some(false)),
        ("k2 consistency", r.consistent),
        ("bar crosscheck", r.crosscheck != Some(false)),
        ("induced injective", r.induced_injective != Some(false)),
    ];
    for (name, ok) in flags {
        if !ok {
            out.push_str(&format!("failed: {name}\n"));
        }
    }
    out
}
