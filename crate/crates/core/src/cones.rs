//! Block-structured cones `K`: membership, projection, distance, polar tests and the
//! inner product on `Y`.
//!
//! Symmetric-matrix blocks are stored packed: lower triangle, row by row, with off-diagonal
//! entries multiplied by √2 so that the trace inner product is the plain dot product.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::spectral::sym_eig;

pub const DEFAULT_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ConeBlock {
    /// `ℝ_−^n`
    NegativeOrthant(usize),
    /// `{0_n}`
    Zero(usize),
    /// `{(y⁰, ȳ) : y⁰ ≥ ‖ȳ‖}` of total dimension `n ≥ 2`.
    SecondOrder(usize),
    /// Negative semidefinite `n × n` matrices.
    NegSemidefinite(usize),
}

impl ConeBlock {
    /// Number of packed coordinates.
    pub fn ambient_dim(self) -> usize {
        match self {
            ConeBlock::NegativeOrthant(n) | ConeBlock::Zero(n) | ConeBlock::SecondOrder(n) => n,
            ConeBlock::NegSemidefinite(n) => n * (n + 1) / 2,
        }
    }

    pub fn validate(self) -> Result<()> {
        match self {
            ConeBlock::NegativeOrthant(0) | ConeBlock::Zero(0) | ConeBlock::NegSemidefinite(0) => {
                Err(Error::InvalidCone(format!("{self} has zero size")))
            }
            ConeBlock::SecondOrder(n) if n < 2 => Err(Error::InvalidCone(format!("{self}: dimension must be ≥ 2"))),
            _ => Ok(()),
        }
    }

    pub fn kind_name(self) -> &'static str {
        match self {
            ConeBlock::NegativeOrthant(_) => "orthant",
            ConeBlock::Zero(_) => "zero",
            ConeBlock::SecondOrder(_) => "soc",
            ConeBlock::NegSemidefinite(_) => "nsd",
        }
    }

    pub fn size(self) -> usize {
        match self {
            ConeBlock::NegativeOrthant(n)
            | ConeBlock::Zero(n)
            | ConeBlock::SecondOrder(n)
            | ConeBlock::NegSemidefinite(n) => n,
        }
    }

    pub fn is_polyhedral(self) -> bool {
        matches!(self, ConeBlock::NegativeOrthant(_) | ConeBlock::Zero(_))
    }

    /// Projection of one block's packed coordinates.
    pub fn project(self, v: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; v.len()];
        self.project_into(v, &mut out)?;
        Ok(out)
    }

    fn project_into(self, v: &[f64], out: &mut [f64]) -> Result<()> {
        match self {
            ConeBlock::NegativeOrthant(_) => {
                for (o, x) in out.iter_mut().zip(v) {
                    *o = x.min(0.0);
                }
            }
            ConeBlock::Zero(_) => out.fill(0.0),
            ConeBlock::SecondOrder(_) => project_soc(v, out),
            ConeBlock::NegSemidefinite(n) => {
                let m = unpack_sym(n, v);
                let eig = sym_eig(&m)?;
                let p = eig.map(|r| r.min(0.0));
                out.copy_from_slice(&pack_sym(&p));
            }
        }
        Ok(())
    }

    pub fn contains(self, v: &[f64], tol: f64) -> Result<bool> {
        Ok(match self {
            ConeBlock::NegativeOrthant(_) => v.iter().all(|&x| x <= tol),
            ConeBlock::Zero(_) => v.iter().all(|&x| x.abs() <= tol),
            ConeBlock::SecondOrder(_) => norm(&v[1..]) - v[0] <= tol,
            ConeBlock::NegSemidefinite(n) => sym_eig(&unpack_sym(n, v))?.eigenvalues[0] <= tol,
        })
    }

    pub fn polar_contains(self, w: &[f64], tol: f64) -> Result<bool> {
        Ok(match self {
            ConeBlock::NegativeOrthant(_) => w.iter().all(|&x| x >= -tol),
            ConeBlock::Zero(_) => true,
            ConeBlock::SecondOrder(_) => norm(&w[1..]) + w[0] <= tol,
            ConeBlock::NegSemidefinite(n) => *sym_eig(&unpack_sym(n, w))?.eigenvalues.last().unwrap() >= -tol,
        })
    }
}

impl fmt::Display for ConeBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.kind_name(), self.size())
    }
}

/// Euclidean projection onto `Q = {y⁰ ≥ ‖ȳ‖}`; the apex case returns zero.
fn project_soc(v: &[f64], out: &mut [f64]) {
    let nb = norm(&v[1..]);
    let t = v[0];
    if nb <= t {
        out.copy_from_slice(v);
    } else if nb <= -t {
        out.fill(0.0);
    } else {
        let a = 0.5 * (t + nb);
        out[0] = a;
        for (o, x) in out[1..].iter_mut().zip(&v[1..]) {
            *o = a * x / nb;
        }
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Index of entry `(i, j)`, `j ≤ i`, in the packed lower triangle.
pub fn packed_index(i: usize, j: usize) -> usize {
    debug_assert!(j <= i);
    i * (i + 1) / 2 + j
}

/// Packs a symmetric matrix (lower triangle, √2-scaled off-diagonals).
pub fn pack_sym(m: &DMatrix<f64>) -> Vec<f64> {
    let n = m.nrows();
    let mut out = vec![0.0; n * (n + 1) / 2];
    for i in 0..n {
        for j in 0..=i {
            out[packed_index(i, j)] = if i == j {
                m[(i, i)]
            } else {
                0.5 * (m[(i, j)] + m[(j, i)]) * std::f64::consts::SQRT_2
            };
        }
    }
    out
}

pub fn unpack_sym(n: usize, v: &[f64]) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let x = v[packed_index(i, j)];
            if i == j {
                m[(i, i)] = x;
            } else {
                let y = x / std::f64::consts::SQRT_2;
                m[(i, j)] = y;
                m[(j, i)] = y;
            }
        }
    }
    m
}

/// Element of `Y` (or `Y*`): flat packed storage split into blocks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockVector {
    #[serde(with = "crate::ext::serde_vec_f64")]
    data: Vec<f64>,
    sizes: Vec<usize>,
}

impl BlockVector {
    pub fn new(blocks: Vec<Vec<f64>>) -> BlockVector {
        let sizes = blocks.iter().map(Vec::len).collect();
        BlockVector { data: blocks.concat(), sizes }
    }

    pub fn from_flat(sizes: Vec<usize>, data: Vec<f64>) -> Result<BlockVector> {
        if sizes.iter().sum::<usize>() != data.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} entries for block sizes {:?}",
                data.len(),
                sizes
            )));
        }
        Ok(BlockVector { data, sizes })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn num_blocks(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    fn offset(&self, b: usize) -> usize {
        self.sizes[..b].iter().sum()
    }

    pub fn block(&self, b: usize) -> &[f64] {
        let o = self.offset(b);
        &self.data[o..o + self.sizes[b]]
    }

    pub fn block_mut(&mut self, b: usize) -> &mut [f64] {
        let o = self.offset(b);
        let n = self.sizes[b];
        &mut self.data[o..o + n]
    }

    pub fn blocks(&self) -> impl Iterator<Item = &[f64]> {
        let mut o = 0;
        self.sizes.iter().map(move |&n| {
            let s = &self.data[o..o + n];
            o += n;
            s
        })
    }

    pub fn zeros_like(&self) -> BlockVector {
        BlockVector { data: vec![0.0; self.data.len()], sizes: self.sizes.clone() }
    }

    pub fn scaled(&self, a: f64) -> BlockVector {
        BlockVector { data: self.data.iter().map(|x| a * x).collect(), sizes: self.sizes.clone() }
    }

    /// `self + a·other`.
    pub fn axpy(&self, a: f64, other: &BlockVector) -> Result<BlockVector> {
        check_same(self, other)?;
        Ok(BlockVector {
            data: self.data.iter().zip(&other.data).map(|(x, y)| x + a * y).collect(),
            sizes: self.sizes.clone(),
        })
    }

    pub fn norm(&self) -> f64 {
        norm(&self.data)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }
}

fn check_same(v: &BlockVector, w: &BlockVector) -> Result<()> {
    if v.sizes != w.sizes {
        return Err(Error::ShapeMismatch(format!("block sizes {:?} vs {:?}", v.sizes, w.sizes)));
    }
    Ok(())
}

/// `⟨v, w⟩`: blockwise dot products (trace inner product on matrix blocks).
pub fn inner(v: &BlockVector, w: &BlockVector) -> Result<f64> {
    check_same(v, w)?;
    Ok(v.data.iter().zip(&w.data).map(|(a, b)| a * b).sum())
}

/// Product cone `K = K₁ × … × K_m`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ConeSpec {
    blocks: Vec<ConeBlock>,
}

impl ConeSpec {
    pub fn new(blocks: Vec<ConeBlock>) -> Result<ConeSpec> {
        for b in &blocks {
            b.validate()?;
        }
        Ok(ConeSpec { blocks })
    }

    /// The cone of the unconstrained case (`Y = {0}`).
    pub fn empty() -> ConeSpec {
        ConeSpec { blocks: vec![] }
    }

    pub fn blocks(&self) -> &[ConeBlock] {
        &self.blocks
    }

    pub fn dim(&self) -> usize {
        self.blocks.iter().map(|b| b.ambient_dim()).sum()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.ambient_dim()).collect()
    }

    pub fn is_polyhedral(&self) -> bool {
        self.blocks.iter().all(|b| b.is_polyhedral())
    }

    /// Number of scalar inequality coordinates (orthant entries).
    pub fn orthant_dim(&self) -> usize {
        self.blocks
            .iter()
            .map(|b| if let ConeBlock::NegativeOrthant(n) = b { *n } else { 0 })
            .sum()
    }

    pub fn zeros(&self) -> BlockVector {
        BlockVector { data: vec![0.0; self.dim()], sizes: self.sizes() }
    }

    pub fn vector(&self, data: Vec<f64>) -> Result<BlockVector> {
        BlockVector::from_flat(self.sizes(), data)
    }

    pub fn check_shape(&self, v: &BlockVector) -> Result<()> {
        if v.sizes != self.sizes() {
            return Err(Error::ShapeMismatch(format!(
                "vector blocks {:?} do not match cone {} (sizes {:?})",
                v.sizes,
                self,
                self.sizes()
            )));
        }
        Ok(())
    }

    pub fn contains(&self, v: &BlockVector, tol: f64) -> Result<bool> {
        self.check_shape(v)?;
        for (b, blk) in self.blocks.iter().zip(v.blocks()) {
            if !b.contains(blk, tol)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn project(&self, v: &BlockVector) -> Result<BlockVector> {
        self.check_shape(v)?;
        let mut out = v.zeros_like();
        let mut o = 0;
        for b in &self.blocks {
            let n = b.ambient_dim();
            b.project_into(&v.data[o..o + n], &mut out.data[o..o + n])?;
            o += n;
        }
        Ok(out)
    }

    /// Projection onto the polar cone `K°` (Moreau: `v − Π_K(v)`).
    pub fn project_polar(&self, v: &BlockVector) -> Result<BlockVector> {
        let p = self.project(v)?;
        v.axpy(-1.0, &p)
    }

    pub fn distance(&self, v: &BlockVector) -> Result<f64> {
        let p = self.project(v)?;
        Ok(v.axpy(-1.0, &p)?.norm())
    }

    /// Distance from `w` to the polar cone `K*`.
    pub fn polar_distance(&self, w: &BlockVector) -> Result<f64> {
        let p = self.project_polar(w)?;
        Ok(w.axpy(-1.0, &p)?.norm())
    }

    pub fn polar_contains(&self, w: &BlockVector, tol: f64) -> Result<bool> {
        self.check_shape(w)?;
        for (b, blk) in self.blocks.iter().zip(w.blocks()) {
            if !b.polar_contains(blk, tol)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl fmt::Display for ConeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.blocks.iter().map(|b| b.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for ConeSpec {
    type Err = Error;

    /// Parses `"orthant:2,soc:3,nsd:2,zero:1"`; the empty string is the empty cone.
    fn from_str(s: &str) -> Result<ConeSpec> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(ConeSpec::empty());
        }
        let mut blocks = Vec::new();
        for part in s.split(',') {
            let (kind, n) = part
                .trim()
                .split_once(':')
                .ok_or_else(|| Error::InvalidCone(format!("expected kind:size, got '{part}'")))?;
            let n: usize = n.trim().parse().map_err(|_| Error::InvalidCone(format!("bad size in '{part}'")))?;
            blocks.push(match kind.trim() {
                "orthant" => ConeBlock::NegativeOrthant(n),
                "zero" => ConeBlock::Zero(n),
                "soc" => ConeBlock::SecondOrder(n),
                "nsd" => ConeBlock::NegSemidefinite(n),
                other => return Err(Error::InvalidCone(format!("unknown block kind '{other}'"))),
            });
        }
        ConeSpec::new(blocks)
    }
}

impl Serialize for ConeSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ConeSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cone(s: &str) -> ConeSpec {
        s.parse().unwrap()
    }

    #[test]
    fn orthant_boundary_is_member() {
        let k = cone("orthant:2");
        assert!(k.contains(&k.vector(vec![-1.0, 0.0]).unwrap(), 0.0).unwrap());
    }

    #[test]
    fn soc_rejects_tail_heavy_vector() {
        let k = cone("soc:2");
        assert!(!k.contains(&k.vector(vec![0.0, 2.0]).unwrap(), 0.0).unwrap());
    }

    #[test]
    fn nsd_diagonal_member() {
        let k = cone("nsd:2");
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![-1.0, -3.0]));
        assert!(k.contains(&k.vector(pack_sym(&m)).unwrap(), 0.0).unwrap());
    }

    #[test]
    fn projections_of_examples() {
        let k = cone("orthant:2");
        let p = k.project(&k.vector(vec![1.5, -2.0]).unwrap()).unwrap();
        assert_eq!(p.as_slice(), &[0.0, -2.0]);

        let k = cone("soc:2");
        let v = k.vector(vec![0.0, 2.0]).unwrap();
        let p = k.project(&v).unwrap();
        assert_relative_eq!(p.as_slice()[0], 1.0);
        assert_relative_eq!(p.as_slice()[1], 1.0);
        assert_relative_eq!(k.distance(&v).unwrap(), 2f64.sqrt(), epsilon = 1e-15);

        let k = cone("nsd:2");
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, -2.0]));
        let p = k.project(&k.vector(pack_sym(&m)).unwrap()).unwrap();
        let pm = unpack_sym(2, p.as_slice());
        assert_relative_eq!(pm[(0, 0)], 0.0, epsilon = 1e-14);
        assert_relative_eq!(pm[(1, 1)], -2.0, epsilon = 1e-14);
    }

    #[test]
    fn soc_apex_tie_returns_zero() {
        let k = cone("soc:3");
        let p = k.project(&k.vector(vec![-5.0, 3.0, 4.0]).unwrap()).unwrap();
        assert_eq!(p.as_slice(), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn polar_membership_examples() {
        let k = cone("orthant:2");
        assert!(k.polar_contains(&k.vector(vec![2.0, 0.0]).unwrap(), 0.0).unwrap());
        let k = cone("soc:2");
        assert!(k.polar_contains(&k.vector(vec![-3.0, 1.0]).unwrap(), 0.0).unwrap());
        let k = cone("nsd:2");
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, -0.5]));
        assert!(!k.polar_contains(&k.vector(pack_sym(&m)).unwrap(), 0.0).unwrap());
        let k = cone("zero:3");
        assert!(k.polar_contains(&k.vector(vec![-9.0, 1.0, 4.0]).unwrap(), 0.0).unwrap());
    }

    #[test]
    fn packed_inner_product_is_trace() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, 2.0]);
        let b = DMatrix::from_row_slice(2, 2, &[3.0, -1.0, -1.0, 4.0]);
        let k = cone("nsd:2");
        let va = k.vector(pack_sym(&a)).unwrap();
        let vb = k.vector(pack_sym(&b)).unwrap();
        assert_relative_eq!(inner(&va, &vb).unwrap(), (&a * &b).trace(), epsilon = 1e-14);
        let da = k.vector(pack_sym(&DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 2.0])))).unwrap();
        let db = k.vector(pack_sym(&DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, 4.0])))).unwrap();
        assert_relative_eq!(inner(&da, &db).unwrap(), 11.0);
        assert_eq!(inner(&da, &k.zeros()).unwrap(), 0.0);
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let k = cone("orthant:2");
        let v = BlockVector::new(vec![vec![1.0, 2.0, 3.0]]);
        assert!(matches!(k.contains(&v, 0.0), Err(Error::ShapeMismatch(_))));
        let w = BlockVector::new(vec![vec![1.0]]);
        assert!(matches!(inner(&v, &w), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn parse_and_display_round_trip() {
        let k = cone("orthant:2,soc:3,nsd:2,zero:1");
        assert_eq!(k.to_string(), "orthant:2,soc:3,nsd:2,zero:1");
        assert_eq!(k.dim(), 2 + 3 + 3 + 1);
        assert!("soc:1".parse::<ConeSpec>().is_err());
        assert!("cube:2".parse::<ConeSpec>().is_err());
        assert_eq!(cone("").dim(), 0);
    }

    #[test]
    fn pack_unpack_round_trip() {
        let m = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 3.0, 2.0, 4.0, 5.0, 3.0, 5.0, 6.0]);
        assert_eq!(unpack_sym(3, &pack_sym(&m)), m);
    }
}
