//! Polyhedral calculus: halfspace/generator representations kept in sync by
//! the double description method.
//!
//! A polyhedron `{y | a_i·y ≥ b_i}` is handled through its homogenization
//! `{(y, t) | a_i·y − b_i t ≥ 0, t ≥ 0}` in `R^{q+1}`. Extreme rays with
//! `t > 0` are vertices (scaled to `t = 1`), those with `t = 0` are recession
//! directions (scaled to unit length). Both the from-scratch enumeration and
//! the incremental cut run the same double description step.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vecops::{dot, linf_dist, norm2, normalized, rank};

/// Default slack tolerance for feasibility and incidence.
pub const TOL_FEAS: f64 = 1e-7;
/// Default ℓ∞ radius under which two generators are merged.
pub const TOL_VERTEX: f64 = 1e-8;

/// Index used in incidence sets for the face at infinity (`t ≥ 0`).
const ROW_INF: usize = usize::MAX;
const RANK_TOL: f64 = 1e-9;

/// `{y | normal·y ≥ offset}` with a unit-length normal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Halfspace {
    normal: Vec<f64>,
    offset: f64,
}

impl Halfspace {
    /// Builds the halfspace `normal·y ≥ offset`, rescaling so that the normal
    /// has unit ℓ2 length.
    pub fn new(normal: Vec<f64>, offset: f64) -> Result<Self> {
        let n = norm2(&normal);
        if !(n > 1e-12) || !offset.is_finite() {
            return Err(Error::InvalidHalfspace(format!(
                "normal norm {n:.3e}, offset {offset}"
            )));
        }
        Ok(Self {
            normal: normal.iter().map(|x| x / n).collect(),
            offset: offset / n,
        })
    }

    pub fn normal(&self) -> &[f64] {
        &self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn dim(&self) -> usize {
        self.normal.len()
    }

    /// `normal·y − offset`; nonnegative inside the halfspace.
    pub fn slack(&self, y: &[f64]) -> f64 {
        dot(&self.normal, y) - self.offset
    }

    fn homogenized(&self) -> Vec<f64> {
        let mut row = self.normal.clone();
        row.push(-self.offset);
        row
    }
}

/// Vertices plus recession directions.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct VRep {
    pub vertices: Vec<Vec<f64>>,
    pub rays: Vec<Vec<f64>>,
}

/// Tolerances used by the double description step.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeometryTolerances {
    pub feas: f64,
    pub vertex: f64,
}

impl Default for GeometryTolerances {
    fn default() -> Self {
        Self {
            feas: TOL_FEAS,
            vertex: TOL_VERTEX,
        }
    }
}

/// A pointed polyhedron in both representations, with generator incidence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polyhedron {
    dim: usize,
    halfspaces: Vec<Halfspace>,
    vrep: VRep,
    vertex_incidence: Vec<Vec<usize>>,
    ray_incidence: Vec<Vec<usize>>,
    #[serde(skip, default)]
    tol: GeometryTolerances,
}

/// Result of [`Polyhedron::add_halfspace`].
#[derive(Clone, Debug)]
pub struct Cut {
    pub polyhedron: Polyhedron,
    /// True when no generator violated the new halfspace; the polyhedron is
    /// then returned unchanged and the halfspace is not stored.
    pub redundant: bool,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    /// Homogenized polyhedron: last coordinate is `t`.
    Affine,
    /// Plain polyhedral cone `{x | Rx ≥ 0}`.
    Conic,
}

#[derive(Clone, Debug)]
struct Generator {
    coords: Vec<f64>,
    /// Sorted indices of tight rows (ROW_INF last when present).
    tight: Vec<usize>,
}

struct Engine<'a> {
    mode: Mode,
    rows: &'a [Vec<f64>],
    dim: usize,
    tol: GeometryTolerances,
}

impl<'a> Engine<'a> {
    fn row(&self, i: usize) -> std::borrow::Cow<'_, [f64]> {
        if i == ROW_INF {
            let mut e = vec![0.0; self.dim];
            e[self.dim - 1] = 1.0;
            std::borrow::Cow::Owned(e)
        } else {
            std::borrow::Cow::Borrowed(&self.rows[i])
        }
    }

    /// Rescales a raw generator: vertices to `t = 1`, rays/cone generators to
    /// unit length. Returns `None` for numerically null vectors.
    fn normalize(&self, mut g: Vec<f64>) -> Option<Vec<f64>> {
        match self.mode {
            Mode::Conic => normalized(&g),
            Mode::Affine => {
                let d = self.dim;
                let t = g[d - 1];
                let spatial = norm2(&g[..d - 1]);
                if t > 1e-12 * spatial.max(1.0) && t > 1e-300 {
                    for x in g.iter_mut() {
                        *x /= t;
                    }
                    g[d - 1] = 1.0;
                    Some(g)
                } else {
                    g[d - 1] = 0.0;
                    normalized(&g)
                }
            }
        }
    }

    fn is_ray(&self, g: &[f64]) -> bool {
        self.mode == Mode::Affine && g[self.dim - 1] == 0.0
    }

    /// Rows (among `active`) on which `g` is tight.
    fn tight_rows(&self, g: &[f64], active: &[usize]) -> Vec<usize> {
        let mut t: Vec<usize> = active
            .iter()
            .copied()
            .filter(|&i| dot(&self.rows[i], g).abs() <= self.tol.feas)
            .collect();
        if self.is_ray(g) {
            t.push(ROW_INF);
        }
        t
    }

    /// Initial simplicial cone from `dim` linearly independent rows.
    /// Returns the generators and the rows not yet processed.
    fn initial(&self, order: &[usize]) -> Result<(Vec<Generator>, Vec<usize>)> {
        let d = self.dim;
        let mut basis: Vec<usize> = Vec::with_capacity(d);
        let mut basis_rows: Vec<Vec<f64>> = Vec::with_capacity(d);
        if self.mode == Mode::Affine {
            basis.push(ROW_INF);
            basis_rows.push(self.row(ROW_INF).into_owned());
        }
        let mut rest = Vec::new();
        for &i in order {
            if basis.len() < d {
                basis_rows.push(self.rows[i].clone());
                if rank(&basis_rows, RANK_TOL) == basis_rows.len() {
                    basis.push(i);
                    continue;
                }
                basis_rows.pop();
            }
            rest.push(i);
        }
        if basis.len() < d {
            return Err(match self.mode {
                Mode::Affine => Error::Lineality(d - 1),
                Mode::Conic => Error::NotSolid,
            });
        }
        let m = DMatrix::from_fn(d, d, |r, c| basis_rows[r][c]);
        let inv = m
            .try_inverse()
            .ok_or_else(|| Error::Numerical("singular initial basis".into()))?;
        let processed: Vec<usize> = basis.iter().copied().filter(|&i| i != ROW_INF).collect();
        let mut gens = Vec::with_capacity(d);
        for k in 0..d {
            let raw: Vec<f64> = inv.column(k).iter().copied().collect();
            let Some(coords) = self.normalize(raw) else {
                return Err(Error::Numerical("null initial generator".into()));
            };
            let mut tight = self.tight_rows(&coords, &processed);
            tight.sort_unstable();
            gens.push(Generator { coords, tight });
        }
        Ok((gens, rest))
    }

    /// Algebraic adjacency test: two extreme rays are adjacent iff the rows
    /// tight on both have rank `dim − 2`.
    fn adjacent(&self, common: &[usize]) -> bool {
        if common.len() + 2 < self.dim {
            return false;
        }
        let rows: Vec<Vec<f64>> = common.iter().map(|&i| self.row(i).into_owned()).collect();
        rank(&rows, RANK_TOL) + 2 >= self.dim
    }

    /// One double description step. Returns `None` when the row is redundant
    /// (no generator strictly violates it).
    fn step(&self, gens: &[Generator], row_idx: usize) -> Option<Vec<Generator>> {
        let row = &self.rows[row_idx];
        let slacks: Vec<f64> = gens.iter().map(|g| dot(row, &g.coords)).collect();
        let tol = self.tol.feas;
        if slacks.iter().all(|&s| s >= -tol) {
            return None;
        }
        let mut out: Vec<Generator> = Vec::with_capacity(gens.len() + 4);
        let mut zero_idx = Vec::new();
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for (i, &s) in slacks.iter().enumerate() {
            if s > tol {
                pos.push(i);
            } else if s < -tol {
                neg.push(i);
            } else {
                zero_idx.push(i);
            }
        }
        for &i in &pos {
            out.push(gens[i].clone());
        }
        let zero_start = out.len();
        for &i in &zero_idx {
            let mut g = gens[i].clone();
            insert_sorted(&mut g.tight, row_idx);
            out.push(g);
        }
        for &n in &neg {
            for &p in &pos {
                let common = intersect_sorted(&gens[p].tight, &gens[n].tight);
                if !self.adjacent(&common) {
                    continue;
                }
                let (sp, sn) = (slacks[p], slacks[n]);
                let raw: Vec<f64> = gens[n]
                    .coords
                    .iter()
                    .zip(&gens[p].coords)
                    .map(|(a, b)| sp * a - sn * b)
                    .collect();
                let Some(coords) = self.normalize(raw) else { continue };
                let mut tight = common;
                insert_sorted(&mut tight, row_idx);
                let cand = Generator { coords, tight };
                // Merge with a coincident zero-slack or already created generator.
                if let Some(k) = (zero_start..out.len())
                    .find(|&k| self.same_point(&out[k].coords, &cand.coords))
                {
                    let merged = union_sorted(&out[k].tight, &cand.tight);
                    out[k].tight = merged;
                    continue;
                }
                out.push(cand);
            }
        }
        Some(out)
    }

    fn same_point(&self, a: &[f64], b: &[f64]) -> bool {
        self.is_ray(a) == self.is_ray(b) && linf_dist(a, b) <= self.tol.vertex
    }
}

fn insert_sorted(v: &mut Vec<usize>, x: usize) {
    if let Err(pos) = v.binary_search(&x) {
        v.insert(pos, x);
    }
}

fn intersect_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

fn union_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = a.iter().chain(b).copied().collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Extreme rays of the pointed cone `{x | r·x ≥ 0 for every row r}`.
///
/// Fails with [`Error::NotSolid`] when the rows do not span the space (the
/// cone then contains a line).
pub fn cone_extreme_rays(rows: &[Vec<f64>], tol: GeometryTolerances) -> Result<Vec<Vec<f64>>> {
    let dim = rows.first().map(|r| r.len()).ok_or(Error::NotSolid)?;
    let engine = Engine {
        mode: Mode::Conic,
        rows,
        dim,
        tol,
    };
    let order: Vec<usize> = (0..rows.len()).collect();
    let (mut gens, rest) = engine.initial(&order)?;
    for i in rest {
        if let Some(next) = engine.step(&gens, i) {
            gens = next;
        }
        if gens.is_empty() {
            return Ok(Vec::new());
        }
    }
    Ok(gens.into_iter().map(|g| g.coords).collect())
}

impl Polyhedron {
    /// Vertex enumeration of `⋂ halfspaces` by the double description method.
    pub fn from_halfspaces(halfspaces: Vec<Halfspace>) -> Result<Self> {
        Self::from_halfspaces_with(halfspaces, GeometryTolerances::default())
    }

    pub fn from_halfspaces_with(halfspaces: Vec<Halfspace>, tol: GeometryTolerances) -> Result<Self> {
        let dim = halfspaces
            .first()
            .map(Halfspace::dim)
            .ok_or_else(|| Error::InvalidHalfspace("empty halfspace list".into()))?;
        if halfspaces.iter().any(|h| h.dim() != dim) {
            return Err(Error::DimensionMismatch("halfspaces of mixed dimension".into()));
        }
        let rows: Vec<Vec<f64>> = halfspaces.iter().map(Halfspace::homogenized).collect();
        let engine = Engine {
            mode: Mode::Affine,
            rows: &rows,
            dim: dim + 1,
            tol,
        };
        let order: Vec<usize> = (0..rows.len()).collect();
        let (mut gens, rest) = engine.initial(&order)?;
        for i in rest {
            if let Some(next) = engine.step(&gens, i) {
                gens = next;
            } else {
                for g in gens.iter_mut() {
                    if dot(&rows[i], &g.coords).abs() <= tol.feas {
                        insert_sorted(&mut g.tight, i);
                    }
                }
            }
        }
        Self::assemble(dim, halfspaces, gens, tol)
    }

    fn assemble(
        dim: usize,
        halfspaces: Vec<Halfspace>,
        gens: Vec<Generator>,
        tol: GeometryTolerances,
    ) -> Result<Self> {
        let mut vrep = VRep::default();
        let mut vertex_incidence = Vec::new();
        let mut ray_incidence = Vec::new();
        for g in gens {
            let tight: Vec<usize> = g.tight.into_iter().filter(|&i| i != ROW_INF).collect();
            let point = g.coords[..dim].to_vec();
            if g.coords[dim] == 0.0 {
                vrep.rays.push(point);
                ray_incidence.push(tight);
            } else {
                vrep.vertices.push(point);
                vertex_incidence.push(tight);
            }
        }
        if vrep.vertices.is_empty() {
            return Err(Error::Empty);
        }
        Ok(Self {
            dim,
            halfspaces,
            vrep,
            vertex_incidence,
            ray_incidence,
            tol,
        })
    }

    fn generators(&self) -> Vec<Generator> {
        let mut gens = Vec::with_capacity(self.vrep.vertices.len() + self.vrep.rays.len());
        for (v, inc) in self.vrep.vertices.iter().zip(&self.vertex_incidence) {
            let mut coords = v.clone();
            coords.push(1.0);
            gens.push(Generator {
                coords,
                tight: inc.clone(),
            });
        }
        for (r, inc) in self.vrep.rays.iter().zip(&self.ray_incidence) {
            let mut coords = r.clone();
            coords.push(0.0);
            let mut tight = inc.clone();
            tight.push(ROW_INF);
            gens.push(Generator { coords, tight });
        }
        gens
    }

    /// Intersects with one more halfspace using a single incremental double
    /// description step.
    pub fn add_halfspace(&self, h: Halfspace) -> Result<Cut> {
        if h.dim() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "halfspace of dimension {} cut into polyhedron of dimension {}",
                h.dim(),
                self.dim
            )));
        }
        let mut rows: Vec<Vec<f64>> = self.halfspaces.iter().map(Halfspace::homogenized).collect();
        rows.push(h.homogenized());
        let engine = Engine {
            mode: Mode::Affine,
            rows: &rows,
            dim: self.dim + 1,
            tol: self.tol,
        };
        let idx = rows.len() - 1;
        let Some(gens) = engine.step(&self.generators(), idx) else {
            return Ok(Cut {
                polyhedron: self.clone(),
                redundant: true,
            });
        };
        let mut halfspaces = self.halfspaces.clone();
        halfspaces.push(h);
        let polyhedron = Self::assemble(self.dim, halfspaces, gens, self.tol)?;
        Ok(Cut {
            polyhedron,
            redundant: false,
        })
    }

    /// True iff every halfspace slack at `y` is at least `−tol`.
    pub fn contains(&self, y: &[f64], tol: f64) -> bool {
        self.halfspaces.iter().all(|h| h.slack(y) >= -tol)
    }

    /// Generators of the recession cone.
    pub fn recession_rays(&self) -> &[Vec<f64>] {
        &self.vrep.rays
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn halfspaces(&self) -> &[Halfspace] {
        &self.halfspaces
    }

    pub fn vrep(&self) -> &VRep {
        &self.vrep
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vrep.vertices
    }

    pub fn vertex_incidence(&self) -> &[Vec<usize>] {
        &self.vertex_incidence
    }

    pub fn ray_incidence(&self) -> &[Vec<usize>] {
        &self.ray_incidence
    }

    pub fn tolerances(&self) -> GeometryTolerances {
        self.tol
    }

    /// Text dump: `H:` rows `a1 … aq b` meaning `a·y ≥ b`, then `V:` and `R:`.
    pub fn to_dump(&self) -> String {
        write_dump(Some(&self.halfspaces), &self.vrep)
    }
}

fn fmt_num(x: f64) -> String {
    format!("{x:.15e}")
}

fn write_row(out: &mut String, row: impl IntoIterator<Item = f64>) {
    let cells: Vec<String> = row.into_iter().map(fmt_num).collect();
    let _ = writeln!(out, "{}", cells.join(" "));
}

/// Serializes an H-rep (optional) and a V-rep in the dump format.
pub fn write_dump(halfspaces: Option<&[Halfspace]>, vrep: &VRep) -> String {
    let mut out = String::new();
    if let Some(hs) = halfspaces {
        out.push_str("H:\n");
        for h in hs {
            write_row(&mut out, h.normal.iter().copied().chain([h.offset]));
        }
    }
    out.push_str("V:\n");
    for v in &vrep.vertices {
        write_row(&mut out, v.iter().copied());
    }
    out.push_str("R:\n");
    for r in &vrep.rays {
        write_row(&mut out, r.iter().copied());
    }
    out
}

/// Contents of a parsed dump.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Dump {
    pub halfspaces: Vec<Halfspace>,
    pub vrep: VRep,
}

pub fn parse_dump(text: &str) -> Result<Dump> {
    #[derive(PartialEq)]
    enum Section {
        None,
        H,
        V,
        R,
    }
    let mut section = Section::None;
    let mut dump = Dump::default();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match line {
            "H:" => section = Section::H,
            "V:" => section = Section::V,
            "R:" => section = Section::R,
            _ => {
                let nums: Vec<f64> = line
                    .split_whitespace()
                    .map(|t| t.parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
                match section {
                    Section::None => {
                        return Err(Error::Parse(format!("line {}: row outside a section", lineno + 1)))
                    }
                    Section::H => {
                        let (b, a) = nums
                            .split_last()
                            .ok_or_else(|| Error::Parse(format!("line {}: empty row", lineno + 1)))?;
                        dump.halfspaces.push(Halfspace::new(a.to_vec(), *b)?);
                    }
                    Section::V => dump.vrep.vertices.push(nums),
                    Section::R => dump.vrep.rays.push(nums),
                }
            }
        }
    }
    Ok(dump)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn orthant(q: usize) -> Vec<Halfspace> {
        (0..q)
            .map(|i| {
                let mut e = vec![0.0; q];
                e[i] = 1.0;
                Halfspace::new(e, 0.0).unwrap()
            })
            .collect()
    }

    fn contains_point(set: &[Vec<f64>], p: &[f64], tol: f64) -> bool {
        set.iter().any(|x| linf_dist(x, p) <= tol)
    }

    #[test]
    fn halfspace_is_normalized() {
        let h = Halfspace::new(vec![3.0, 4.0], 10.0).unwrap();
        assert!((norm2(h.normal()) - 1.0).abs() < 1e-15);
        assert!((h.offset() - 2.0).abs() < 1e-15);
        assert!(Halfspace::new(vec![0.0, 1e-14], 1.0).is_err());
    }

    #[test]
    fn orthant_has_origin_and_axis_rays() {
        let p = Polyhedron::from_halfspaces(orthant(3)).unwrap();
        assert_eq!(p.vertices(), &[vec![0.0, 0.0, 0.0]]);
        assert_eq!(p.recession_rays().len(), 3);
        for i in 0..3 {
            let mut e = vec![0.0; 3];
            e[i] = 1.0;
            assert!(contains_point(p.recession_rays(), &e, 1e-12));
        }
        assert_eq!(p.vertex_incidence()[0], vec![0, 1, 2]);
    }

    #[test]
    fn cut_of_three_dimensional_orthant() {
        let mut hs = orthant(3);
        hs.push(Halfspace::new(vec![1.0, 1.0, 0.1], 0.68).unwrap());
        let p = Polyhedron::from_halfspaces(hs).unwrap();
        assert_eq!(p.vertices().len(), 3);
        for v in [[0.68, 0.0, 0.0], [0.0, 0.68, 0.0], [0.0, 0.0, 6.8]] {
            assert!(contains_point(p.vertices(), &v, 1e-9), "{v:?}");
        }
        assert_eq!(p.recession_rays().len(), 3);

        let inc = Polyhedron::from_halfspaces(orthant(3))
            .unwrap()
            .add_halfspace(Halfspace::new(vec![1.0, 1.0, 0.1], 0.68).unwrap())
            .unwrap();
        assert!(!inc.redundant);
        for v in [[0.68, 0.0, 0.0], [0.0, 0.68, 0.0], [0.0, 0.0, 6.8]] {
            assert!(contains_point(inc.polyhedron.vertices(), &v, 1e-9));
        }
        assert!(inc.polyhedron.contains(&[0.2947, 0.2947, 0.9295], 1e-3));
    }

    #[test]
    fn unit_square_has_four_vertices_no_rays() {
        let hs = vec![
            Halfspace::new(vec![1.0, 0.0], 0.0).unwrap(),
            Halfspace::new(vec![0.0, 1.0], 0.0).unwrap(),
            Halfspace::new(vec![-1.0, 0.0], -1.0).unwrap(),
            Halfspace::new(vec![0.0, -1.0], -1.0).unwrap(),
        ];
        let p = Polyhedron::from_halfspaces(hs).unwrap();
        assert_eq!(p.vertices().len(), 4);
        assert!(p.recession_rays().is_empty());
        for v in [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]] {
            assert!(contains_point(p.vertices(), &v, 1e-12));
        }
    }

    #[test]
    fn first_cut_of_planar_orthant() {
        let c = 2.0 - 2.0_f64.sqrt();
        let p = Polyhedron::from_halfspaces(orthant(2)).unwrap();
        let cut = p
            .add_halfspace(Halfspace::new(vec![1.0, 1.0], c).unwrap())
            .unwrap();
        let v = cut.polyhedron.vertices();
        assert_eq!(v.len(), 2);
        assert!(contains_point(v, &[c, 0.0], 1e-12));
        assert!(contains_point(v, &[0.0, c], 1e-12));
        assert_eq!(cut.polyhedron.recession_rays().len(), 2);
        // The cut offset in unit-normal form is 0.41421.
        assert!((cut.polyhedron.halfspaces()[2].offset() - (2.0_f64.sqrt() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn redundant_cut_returns_input() {
        let p = Polyhedron::from_halfspaces(orthant(2)).unwrap();
        let cut = p
            .add_halfspace(Halfspace::new(vec![1.0, 1.0], -1.0).unwrap())
            .unwrap();
        assert!(cut.redundant);
        assert_eq!(cut.polyhedron, p);
    }

    #[test]
    fn degenerate_cut_through_vertex_keeps_it() {
        let p = Polyhedron::from_halfspaces(orthant(2)).unwrap();
        let cut = p
            .add_halfspace(Halfspace::new(vec![1.0, -1.0], 0.0).unwrap())
            .unwrap();
        assert!(!cut.redundant);
        let poly = cut.polyhedron;
        assert_eq!(poly.vertices(), &[vec![0.0, 0.0]]);
        assert_eq!(poly.vertex_incidence()[0], vec![0, 1, 2]);
        assert_eq!(poly.recession_rays().len(), 2);
    }

    #[test]
    fn empty_and_lineality_errors() {
        let hs = vec![
            Halfspace::new(vec![1.0], 1.0).unwrap(),
            Halfspace::new(vec![-1.0], 1.0).unwrap(),
        ];
        assert!(matches!(Polyhedron::from_halfspaces(hs), Err(Error::Empty)));
        let line = vec![Halfspace::new(vec![1.0, 0.0], 0.0).unwrap()];
        assert!(matches!(Polyhedron::from_halfspaces(line), Err(Error::Lineality(2))));
        let p = Polyhedron::from_halfspaces(orthant(2)).unwrap();
        let cut = p.add_halfspace(Halfspace::new(vec![-1.0, -1.0], 1.0).unwrap());
        assert!(matches!(cut, Err(Error::Empty)));
    }

    #[test]
    fn contains_checks_slack() {
        let p = Polyhedron::from_halfspaces(orthant(2)).unwrap();
        assert!(p.contains(&[0.0, 0.0], 1e-9));
        assert!(!p.contains(&[-1.0, 0.0], 1e-9));
    }

    #[test]
    fn dump_round_trip() {
        let mut hs = orthant(3);
        hs.push(Halfspace::new(vec![1.0, 1.0, 0.1], 0.68).unwrap());
        let p = Polyhedron::from_halfspaces(hs).unwrap();
        let text = p.to_dump();
        assert!(text.starts_with("H:\n"));
        let dump = parse_dump(&text).unwrap();
        assert_eq!(dump.halfspaces.len(), 4);
        assert_eq!(dump.vrep.vertices.len(), 3);
        for (a, b) in dump.vrep.vertices.iter().zip(p.vertices()) {
            assert!(linf_dist(a, b) < 1e-14);
        }
        let rebuilt = Polyhedron::from_halfspaces(dump.halfspaces).unwrap();
        assert_eq!(rebuilt.vertices().len(), 3);
        assert!(parse_dump("1 2 3\n").is_err());
    }

    #[test]
    fn cone_rays_of_c1_dual() {
        let rows = vec![vec![1.0, 2.0], vec![2.0, 1.0]];
        let rays = cone_extreme_rays(&rows, GeometryTolerances::default()).unwrap();
        assert_eq!(rays.len(), 2);
        let a = normalized(&[2.0, -1.0]).unwrap();
        let b = normalized(&[-1.0, 2.0]).unwrap();
        assert!(contains_point(&rays, &a, 1e-12));
        assert!(contains_point(&rays, &b, 1e-12));
    }
}
