//! JSON chain-map fixtures: a presentation, Ore data, a resolution of `A`
//! and a chain map `f`, all with polynomial entries and degree tags.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::GradedModel;
use crate::error::{Error, Result};
use crate::linalg::SparseVec;
use crate::module::{FreeMap, FreeModule};
use crate::ore::{
    build_ore_model, build_p_q, validate_ore, ChainMap, OreComplexes, OreModel,
};
use crate::presentation::{parse_ore, parse_polynomial, parse_presentation};
use crate::resolution::Resolution;

pub const CHAINMAP_SCHEMA: &str = "yoneda.chainmap/1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixSpec {
    pub hdeg: usize,
    pub source_degrees: Vec<usize>,
    pub target_degrees: Vec<usize>,
    pub rows: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainMapFixture {
    pub schema: String,
    pub name: String,
    pub presentation: String,
    pub ore: String,
    pub max_deg: usize,
    /// `M_1 … M_I` of a resolution of `A`.
    pub resolution: Vec<MatrixSpec>,
    /// `f_0 … f_n` over `B`.
    pub chain_map: Vec<MatrixSpec>,
}

/// Everything a fixture describes, built and cross-linked.
#[derive(Debug)]
pub struct LoadedFixture {
    pub resolution: Resolution,
    pub ore_model: OreModel,
    pub complexes: OreComplexes,
    pub chain_map: ChainMap,
}

fn matrix(spec: &MatrixSpec, model: &GradedModel, source: &FreeModule, target: &FreeModule) -> Result<FreeMap> {
    let ctx = |msg: String| Error::Fixture(format!("matrix in homological degree {}: {msg}", spec.hdeg));
    if spec.source_degrees != source.gen_degrees() || spec.target_degrees != target.gen_degrees() {
        return Err(ctx(format!(
            "degree tags {:?} -> {:?} do not match {:?} -> {:?}",
            spec.source_degrees,
            spec.target_degrees,
            source.gen_degrees(),
            target.gen_degrees()
        )));
    }
    if spec.rows.len() != source.rank() || spec.rows.iter().any(|r| r.len() != target.rank()) {
        return Err(ctx(format!("expected a {} x {} matrix", source.rank(), target.rank())));
    }
    let mut rows = Vec::with_capacity(source.rank());
    for (e, row) in spec.rows.iter().enumerate() {
        let de = source.gen_degree(e);
        let mut parts: Vec<(usize, SparseVec)> = Vec::new();
        for (g, text) in row.iter().enumerate() {
            let poly = parse_polynomial(text, model.field(), model.names())
                .map_err(|err| ctx(format!("entry ({e}, {g}): {err}")))?;
            if poly.is_zero() {
                continue;
            }
            let dg = target.gen_degree(g);
            if poly.homogeneous_degree() != de.checked_sub(dg) {
                return Err(ctx(format!(
                    "entry ({e}, {g}) = {text} is not homogeneous of degree {}",
                    de as i64 - dg as i64
                )));
            }
            parts.push((g, model.normal_form(&poly)?.coords));
        }
        rows.push(target.join(de, &parts));
    }
    Ok(FreeMap::new(source.clone(), target.clone(), rows))
}

impl ChainMapFixture {
    pub fn from_json(text: &str) -> Result<Self> {
        let f: ChainMapFixture = serde_json::from_str(text).map_err(|e| Error::Fixture(e.to_string()))?;
        if f.schema != CHAINMAP_SCHEMA {
            return Err(Error::Fixture(format!("unknown schema '{}'", f.schema)));
        }
        Ok(f)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("fixture serializes")
    }

    /// Builds `A`, `B`, the resolution, `P`, `Q` and the chain map.
    pub fn load(&self) -> Result<LoadedFixture> {
        let p = parse_presentation(&self.presentation)?;
        let a = Arc::new(GradedModel::build(&p, self.max_deg)?);
        let ore = validate_ore(&parse_ore(&self.ore, &p)?, &a)?;
        let om = build_ore_model(a.clone(), ore, self.max_deg)?;
        let mut gen_degrees = vec![vec![0]];
        for (k, m) in self.resolution.iter().enumerate() {
            if m.hdeg != k + 1 {
                return Err(Error::Fixture(format!("resolution matrix {} has hdeg {}", k + 1, m.hdeg)));
            }
            gen_degrees.push(m.source_degrees.clone());
        }
        let modules: Vec<FreeModule> = gen_degrees.iter().map(|g| FreeModule::new(g.clone(), &a)).collect();
        let mut rows = Vec::new();
        for (k, m) in self.resolution.iter().enumerate() {
            rows.push(matrix(m, &a, &modules[k + 1], &modules[k])?.rows);
        }
        let resolution = Resolution::from_parts(a, self.max_deg, gen_degrees, rows)?;
        let complexes = build_p_q(&resolution, &om)?;
        if self.chain_map.is_empty() || self.chain_map.len() > complexes.max_hdeg() + 1 {
            return Err(Error::Fixture(format!(
                "chain map needs between 1 and {} components",
                complexes.max_hdeg() + 1
            )));
        }
        let mut maps = Vec::new();
        for (n, m) in self.chain_map.iter().enumerate() {
            if m.hdeg != n {
                return Err(Error::Fixture(format!("chain map component {n} has hdeg {}", m.hdeg)));
            }
            maps.push(matrix(m, om.ext(), &complexes.p_window(n), complexes.q_module(n))?);
        }
        Ok(LoadedFixture {
            resolution,
            ore_model: om,
            complexes,
            chain_map: ChainMap { maps },
        })
    }

    /// Fixture for a computed resolution and chain map.
    pub fn from_computed(name: &str, ore: &str, r: &Resolution, om: &OreModel, f: &ChainMap) -> Self {
        let spec = |hdeg: usize, map: &FreeMap, model: &GradedModel| MatrixSpec {
            hdeg,
            source_degrees: map.source.gen_degrees().to_vec(),
            target_degrees: map.target.gen_degrees().to_vec(),
            rows: map.display_rows(model),
        };
        ChainMapFixture {
            schema: CHAINMAP_SCHEMA.into(),
            name: name.into(),
            presentation: r.model().presentation().to_string(),
            ore: ore.into(),
            max_deg: r.max_deg(),
            resolution: (1..=r.max_hdeg()).map(|i| spec(i, r.differential(i), r.model())).collect(),
            chain_map: f.maps.iter().enumerate().map(|(n, m)| spec(n, m, om.ext())).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ore::{construct_chain_map, verify_chain_map};
    use crate::resolution::minimal_resolution;

    #[test]
    fn computed_fixture_round_trips() {
        let p = parse_presentation("field Q\ngens x y\nrel x*x*y\nrel y*y*x").unwrap();
        let ore = "sigma x -> y\nsigma y -> x\ndelta x -> x*y\ndelta y -> y*x";
        let a = Arc::new(GradedModel::build(&p, 6).unwrap());
        let o = validate_ore(&parse_ore(ore, &p).unwrap(), &a).unwrap();
        let om = build_ore_model(a.clone(), o, 6).unwrap();
        let r = minimal_resolution(a, 3, 6).unwrap();
        let c = build_p_q(&r, &om).unwrap();
        let f = construct_chain_map(&c, &om).unwrap();
        let fx = ChainMapFixture::from_computed("ex1", ore, &r, &om, &f);
        let back = ChainMapFixture::from_json(&fx.to_json()).unwrap();
        assert_eq!(back, fx);
        let loaded = back.load().unwrap();
        assert_eq!(loaded.chain_map.maps.len(), 4);
        for (x, y) in loaded.chain_map.maps.iter().zip(&f.maps) {
            assert_eq!(x.rows, y.rows);
        }
        assert!(verify_chain_map(&loaded.chain_map, &loaded.complexes, &loaded.ore_model).unwrap().ok);
    }

    #[test]
    fn wrong_schema_is_rejected() {
        let err = ChainMapFixture::from_json(r#"{"schema":"other","name":"","presentation":"","ore":"","max_deg":1,"resolution":[],"chain_map":[]}"#)
            .unwrap_err();
        assert!(err.to_string().contains("unknown schema"));
    }
}
