//! Polyhedral ordering cones `C` together with generators of the dual `C^+`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{cone_extreme_rays, GeometryTolerances};
use crate::norm::Norm;
use crate::vecops::{dot, linf_dist, normalized, rank};

const DUALITY_TOL: f64 = 1e-9;

/// A solid, pointed polyhedral cone with unit-length generators for both the
/// cone and its dual.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderingCone {
    primal: Vec<Vec<f64>>,
    dual: Vec<Vec<f64>>,
}

/// Generators of `{w | w·g ≥ 0 for all g}`, unit ℓ2 length.
pub fn dual_cone(generators: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let q = generators
        .first()
        .map(Vec::len)
        .ok_or_else(|| Error::InvalidCone("no generators".into()))?;
    if generators.iter().any(|g| g.len() != q) {
        return Err(Error::DimensionMismatch("cone generators of mixed dimension".into()));
    }
    let rows = unit_generators(generators)?;
    if rank(&rows, 1e-9) < q {
        return Err(Error::NotSolid);
    }
    let rays = cone_extreme_rays(&rows, GeometryTolerances::default())?;
    if rank(&rays, 1e-9) < q {
        return Err(Error::NotPointed);
    }
    Ok(rays)
}

fn unit_generators(gens: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(gens.len());
    for g in gens {
        let u = normalized(g).ok_or_else(|| Error::InvalidCone("zero generator".into()))?;
        if !out.iter().any(|o| linf_dist(o, &u) <= 1e-12) {
            out.push(u);
        }
    }
    Ok(out)
}

impl OrderingCone {
    /// Cone generated by `primal`; the dual side is computed.
    pub fn from_primal(primal: Vec<Vec<f64>>) -> Result<Self> {
        let dual = dual_cone(&primal)?;
        let cone = Self {
            primal: unit_generators(&primal)?,
            dual,
        };
        cone.validate()?;
        Ok(cone)
    }

    /// Cone whose dual is generated by `dual`.
    pub fn from_dual(dual: Vec<Vec<f64>>) -> Result<Self> {
        let primal = dual_cone(&dual)?;
        let cone = Self {
            primal,
            dual: unit_generators(&dual)?,
        };
        cone.validate()?;
        Ok(cone)
    }

    /// Both sides given explicitly; only the consistency checks run.
    pub fn from_parts(primal: Vec<Vec<f64>>, dual: Vec<Vec<f64>>) -> Result<Self> {
        let cone = Self {
            primal: unit_generators(&primal)?,
            dual: unit_generators(&dual)?,
        };
        cone.validate()?;
        Ok(cone)
    }

    pub fn orthant(q: usize) -> Self {
        let e: Vec<Vec<f64>> = (0..q)
            .map(|i| (0..q).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        Self {
            primal: e.clone(),
            dual: e,
        }
    }

    /// Built-in cones: `orthant` (any `q`), `C1`/`C2` (`q = 2`), `C3`/`C4` (`q = 3`).
    pub fn builtin(name: &str, q: usize) -> Result<Self> {
        let (gens, need_q): (Vec<Vec<f64>>, usize) = match name {
            "orthant" => return Ok(Self::orthant(q)),
            "C1" => (vec![vec![1.0, 2.0], vec![2.0, 1.0]], 2),
            "C2" => (vec![vec![2.0, -1.0], vec![-1.0, 2.0]], 2),
            "C3" => (
                vec![
                    vec![4.0, 2.0, 2.0],
                    vec![2.0, 4.0, 2.0],
                    vec![4.0, 0.0, 2.0],
                    vec![1.0, 0.0, 2.0],
                    vec![0.0, 1.0, 2.0],
                    vec![0.0, 4.0, 2.0],
                ],
                3,
            ),
            "C4" => (
                vec![
                    vec![-1.0, -1.0, 3.0],
                    vec![2.0, 2.0, -1.0],
                    vec![1.0, 0.0, 0.0],
                    vec![0.0, -1.0, 2.0],
                    vec![-1.0, 0.0, 2.0],
                    vec![0.0, 1.0, 0.0],
                ],
                3,
            ),
            other => return Err(Error::UnknownName(other.to_string())),
        };
        if need_q != q {
            return Err(Error::DimensionMismatch(format!(
                "cone {name} lives in R^{need_q}, problem has q = {q}"
            )));
        }
        Self::from_primal(gens)
    }

    fn validate(&self) -> Result<()> {
        let q = self.dim();
        if self.primal.iter().chain(&self.dual).any(|g| g.len() != q) {
            return Err(Error::DimensionMismatch("cone generators of mixed dimension".into()));
        }
        if self.dual.len() < q || rank(&self.dual, 1e-9) < q {
            return Err(Error::NotPointed);
        }
        if rank(&self.primal, 1e-9) < q {
            return Err(Error::NotSolid);
        }
        for g in &self.primal {
            for w in &self.dual {
                if dot(g, w) < -DUALITY_TOL {
                    return Err(Error::InvalidCone(
                        "primal and dual generators are not mutually dual".into(),
                    ));
                }
            }
        }
        let interior = self.interior_point();
        if self.dual.iter().any(|w| dot(w, &interior) <= 1e-12) {
            return Err(Error::NotSolid);
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.primal.first().or(self.dual.first()).map_or(0, Vec::len)
    }

    pub fn primal_generators(&self) -> &[Vec<f64>] {
        &self.primal
    }

    pub fn dual_generators(&self) -> &[Vec<f64>] {
        &self.dual
    }

    /// `y` lies in `C` up to `tol` in every dual generator direction.
    pub fn contains(&self, y: &[f64], tol: f64) -> bool {
        self.dual.iter().all(|w| dot(w, y) >= -tol)
    }

    /// `y1 ≤_C y2`, i.e. `y2 − y1 ∈ C`.
    pub fn leq(&self, y1: &[f64], y2: &[f64], tol: f64) -> bool {
        self.dual
            .iter()
            .all(|w| w.iter().zip(y2.iter().zip(y1)).map(|(wi, (a, b))| wi * (a - b)).sum::<f64>() >= -tol)
    }

    /// `w` lies in `C^+` up to `tol`.
    pub fn dual_contains(&self, w: &[f64], tol: f64) -> bool {
        self.primal.iter().all(|g| dot(g, w) >= -tol)
    }

    /// Sum of the primal generators; an interior point of a solid cone.
    pub fn interior_point(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.dim()];
        for g in &self.primal {
            for (ci, gi) in c.iter_mut().zip(g) {
                *ci += gi;
            }
        }
        c
    }

    /// Sum of the dual generators normalized in the dual norm of `norm`.
    pub fn reference_direction(&self, norm: Norm) -> Vec<f64> {
        let mut w = vec![0.0; self.dim()];
        for g in &self.dual {
            for (wi, gi) in w.iter_mut().zip(g) {
                *wi += gi;
            }
        }
        let n = norm.dual().eval(&w);
        w.iter().map(|x| x / n).collect()
    }
}

/// Cone file contents: either side may be omitted.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ConeSpec {
    Name(String),
    Generators {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        primal: Option<Vec<Vec<f64>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dual: Option<Vec<Vec<f64>>>,
    },
}

impl ConeSpec {
    pub fn resolve(&self, q: usize) -> Result<OrderingCone> {
        match self {
            ConeSpec::Name(name) => OrderingCone::builtin(name, q),
            ConeSpec::Generators { primal, dual } => {
                let cone = match (primal, dual) {
                    (Some(p), Some(d)) => OrderingCone::from_parts(p.clone(), d.clone())?,
                    (Some(p), None) => OrderingCone::from_primal(p.clone())?,
                    (None, Some(d)) => OrderingCone::from_dual(d.clone())?,
                    (None, None) => {
                        return Err(Error::InvalidCone("cone needs primal or dual generators".into()))
                    }
                };
                if cone.dim() != q {
                    return Err(Error::DimensionMismatch(format!(
                        "cone dimension {} but q = {q}",
                        cone.dim()
                    )));
                }
                Ok(cone)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Every generator of `a` is a nonnegative combination of `b`'s, checked
    /// through the dual description of `b`.
    fn generates_same_cone(a: &[Vec<f64>], b: &[Vec<f64>]) -> bool {
        let da = dual_cone(a).unwrap();
        let db = dual_cone(b).unwrap();
        a.iter().all(|g| db.iter().all(|w| dot(w, g) >= -1e-9))
            && b.iter().all(|g| da.iter().all(|w| dot(w, g) >= -1e-9))
    }

    #[test]
    fn orthant_is_self_dual() {
        let e = OrderingCone::orthant(3);
        let d = dual_cone(e.primal_generators()).unwrap();
        assert!(generates_same_cone(&d, e.primal_generators()));
    }

    #[test]
    fn c1_dual_is_c2() {
        let c1 = OrderingCone::builtin("C1", 2).unwrap();
        let c2 = OrderingCone::builtin("C2", 2).unwrap();
        assert!(generates_same_cone(c1.dual_generators(), c2.primal_generators()));
        assert!(generates_same_cone(c2.dual_generators(), c1.primal_generators()));
    }

    #[test]
    fn c3_dual_is_c4() {
        let c3 = OrderingCone::builtin("C3", 3).unwrap();
        let c4 = OrderingCone::builtin("C4", 3).unwrap();
        assert_eq!(c3.dual_generators().len(), 6);
        assert!(generates_same_cone(c3.dual_generators(), c4.primal_generators()));
        assert!(generates_same_cone(c4.dual_generators(), c3.primal_generators()));
    }

    #[test]
    fn duality_involution() {
        for name in ["C1", "C2"] {
            let c = OrderingCone::builtin(name, 2).unwrap();
            let back = dual_cone(&dual_cone(c.primal_generators()).unwrap()).unwrap();
            assert!(generates_same_cone(&back, c.primal_generators()));
        }
        let c = OrderingCone::builtin("C3", 3).unwrap();
        let back = dual_cone(&dual_cone(c.primal_generators()).unwrap()).unwrap();
        assert!(generates_same_cone(&back, c.primal_generators()));
    }

    #[test]
    fn leq_examples() {
        let o = OrderingCone::orthant(2);
        assert!(o.leq(&[0.0, 0.0], &[1.0, 1.0], 0.0));
        assert!(!o.leq(&[1.0, 1.0], &[0.0, 0.0], 0.0));
        let c1 = OrderingCone::builtin("C1", 2).unwrap();
        assert!(!c1.leq(&[0.0, 0.0], &[1.0, 0.0], 1e-12));
        assert!(c1.leq(&[0.3, -2.0], &[0.3, -2.0], 0.0));
    }

    #[test]
    fn reference_directions() {
        let o3 = OrderingCone::orthant(3);
        let w = o3.reference_direction(Norm::L2);
        for x in &w {
            assert!((x - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        }
        let o2 = OrderingCone::orthant(2);
        assert_eq!(o2.reference_direction(Norm::LInf), vec![0.5, 0.5]);
        let c2 = OrderingCone::builtin("C2", 2).unwrap();
        let w = c2.reference_direction(Norm::L2);
        let s = 1.0 / 2f64.sqrt();
        assert!((w[0] - s).abs() < 1e-12 && (w[1] - s).abs() < 1e-12, "{w:?}");
    }

    #[test]
    fn reference_direction_is_interior_of_dual() {
        for (name, q) in [("C1", 2), ("C2", 2), ("C3", 3), ("C4", 3), ("orthant", 4)] {
            let c = OrderingCone::builtin(name, q).unwrap();
            for norm in Norm::ALL {
                let w = c.reference_direction(norm);
                let min = c
                    .primal_generators()
                    .iter()
                    .map(|g| dot(&w, g))
                    .fold(f64::INFINITY, f64::min);
                assert!(min > 0.0, "{name} {norm}");
            }
        }
    }

    #[test]
    fn invalid_cones_are_rejected() {
        assert!(matches!(
            dual_cone(&[vec![1.0, 0.0]]),
            Err(Error::NotSolid)
        ));
        // Half-plane: contains a line, so the dual is a single ray.
        assert!(matches!(
            dual_cone(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]]),
            Err(Error::NotPointed)
        ));
        assert!(OrderingCone::builtin("C1", 3).is_err());
        assert!(matches!(OrderingCone::builtin("C9", 2), Err(Error::UnknownName(_))));
    }

    #[test]
    fn cone_spec_json() {
        let spec: ConeSpec = serde_json::from_str(r#"{"primal": [[1,2],[2,1]]}"#).unwrap();
        let c = spec.resolve(2).unwrap();
        assert_eq!(c.dual_generators().len(), 2);
        let spec: ConeSpec = serde_json::from_str(r#""orthant""#).unwrap();
        assert_eq!(spec.resolve(4).unwrap().dim(), 4);
        let spec: ConeSpec = serde_json::from_str(r#"{"dual": [[1,0],[0,1]]}"#).unwrap();
        assert_eq!(spec.resolve(2).unwrap().primal_generators().len(), 2);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn orthant_order_is_componentwise(a in prop::collection::vec(-5.0f64..5.0, 3),
                                              b in prop::collection::vec(-5.0f64..5.0, 3)) {
                let o = OrderingCone::orthant(3);
                let componentwise = a.iter().zip(&b).all(|(x, y)| x <= y);
                prop_assert_eq!(o.leq(&a, &b, 0.0), componentwise);
            }
        }
    }
}
