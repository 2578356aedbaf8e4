//! Partitioned l∞ analysis: block norms, strict block diagonal dominance and
//! the block Gersgorin sets of a Hessian with `m` 2×2 blocks followed by
//! `n` 1×1 blocks.

use serde::{Deserialize, Serialize};

use crate::energy::PartitionedHessian;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockPartition {
    sizes: Vec<usize>,
    offsets: Vec<usize>,
}

impl BlockPartition {
    pub fn new(sizes: &[usize]) -> Result<Self> {
        if sizes.is_empty() || sizes.contains(&0) {
            return Err(Error::InvalidArgument("block sizes must be positive and nonempty".into()));
        }
        let mut offsets = Vec::with_capacity(sizes.len() + 1);
        let mut acc = 0;
        for s in sizes {
            offsets.push(acc);
            acc += s;
        }
        offsets.push(acc);
        Ok(BlockPartition { sizes: sizes.to_vec(), offsets })
    }

    /// `m` twos then `n` ones.
    pub fn for_hessian(m: usize, n: usize) -> Self {
        let mut s = vec![2; m];
        s.extend(std::iter::repeat(1).take(n));
        Self::new(&s).expect("nonempty Hessian partition")
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn len(&self) -> usize {
        self.sizes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sizes.is_empty()
    }

    pub fn dim(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn range(&self, i: usize) -> std::ops::Range<usize> {
        self.offsets[i]..self.offsets[i + 1]
    }

    /// Submatrix `A_IJ`.
    pub fn block<T: Real>(&self, a: &Matrix<T>, i: usize, j: usize) -> Matrix<T> {
        let (ri, rj) = (self.range(i), self.range(j));
        Matrix::from_fn(ri.len(), rj.len(), |r, c| a[(ri.start + r, rj.start + c)].clone())
    }

    fn check<T: Real>(&self, a: &Matrix<T>) -> Result<()> {
        if a.is_square() && a.rows() == self.dim() {
            Ok(())
        } else {
            Err(Error::PartitionMismatch { dim: a.rows() })
        }
    }
}

fn inf_norm<T: Real>(a: &Matrix<T>) -> T {
    (0..a.rows())
        .map(|r| a.row(r).iter().fold(T::zero(), |s, x| s + x.abs()))
        .fold(T::zero(), |m, v| m.max_of(v))
}

/// `(I, J) ↦ ‖A_IJ‖_∞`.
pub fn block_norms<T: Real>(a: &Matrix<T>, part: &BlockPartition) -> Result<Matrix<T>> {
    part.check(a)?;
    let nb = part.len();
    Ok(Matrix::from_fn(nb, nb, |i, j| inf_norm(&part.block(a, i, j))))
}

/// `(‖B⁻¹‖_∞)⁻¹`. Trace-zero symmetric 2×2 blocks `[[a, b], [b, −a]]` use
/// the closed form `(a² + b²)/(|a| + |b|)`.
pub fn inv_block_norm_reciprocal<T: Real>(b: &Matrix<T>) -> Result<T> {
    let singular = Err(Error::SingularBlock { block: 0 });
    match (b.rows(), b.cols()) {
        (1, 1) => {
            let v = b[(0, 0)].abs();
            if v.is_zero() {
                singular
            } else {
                Ok(v)
            }
        }
        (2, 2) if b[(0, 1)] == b[(1, 0)] && b[(0, 0)] == -b[(1, 1)].clone() => {
            let (a, c) = (b[(0, 0)].clone(), b[(0, 1)].clone());
            let num = a.clone() * a.clone() + c.clone() * c.clone();
            if num.is_zero() {
                singular
            } else {
                Ok(num / (a.abs() + c.abs()))
            }
        }
        _ => match b.inverse() {
            Some(inv) => Ok(T::one() / inf_norm(&inv)),
            None => singular,
        },
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dominance {
    pub dominant: bool,
    /// `‖A_II⁻¹‖⁻¹ − Σ_{J≠I} ‖A_IJ‖` per block row; a singular diagonal
    /// block counts as `‖A_II⁻¹‖⁻¹ = 0`.
    pub margins: Vec<f64>,
    pub singular_blocks: Vec<usize>,
}

impl Dominance {
    pub fn min_margin(&self) -> f64 {
        self.margins.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

pub fn is_strictly_block_diagonally_dominant(a: &Matrix<f64>, part: &BlockPartition) -> Result<Dominance> {
    let norms = block_norms(a, part)?;
    let nb = part.len();
    let mut margins = Vec::with_capacity(nb);
    let mut singular_blocks = Vec::new();
    for i in 0..nb {
        let diag = match inv_block_norm_reciprocal(&part.block(a, i, i)) {
            Ok(v) => v,
            Err(_) => {
                singular_blocks.push(i);
                0.0
            }
        };
        let off: f64 = (0..nb).filter(|&j| j != i).map(|j| norms[(i, j)]).sum();
        margins.push(diag - off);
    }
    Ok(Dominance { dominant: margins.iter().all(|&v| v > 0.0), margins, singular_blocks })
}

/// Closed real interval, serialized as `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval(pub f64, pub f64);

impl Interval {
    pub fn contains(&self, x: f64, slack: f64) -> bool {
        x >= self.0 - slack && x <= self.1 + slack
    }

    pub fn magnitude(&self) -> f64 {
        self.0.abs().max(self.1.abs())
    }
}

/// The real part of the block Gersgorin set of `Ĥ`, with eigenvalue
/// containment once [`localization_report`] has filled it in.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GersgorinReport {
    pub dominant: bool,
    pub margins: Vec<f64>,
    #[serde(rename = "G_r")]
    pub g_r: Vec<Interval>,
    #[serde(rename = "G_e")]
    pub g_e: Vec<Vec<Interval>>,
    pub eigenvalues: Vec<f64>,
    /// Block index (exceptional blocks first) of a component containing each
    /// eigenvalue, `None` if no component does.
    pub containment: Vec<Option<usize>>,
    #[serde(rename = "U")]
    pub u: Vec<f64>,
    #[serde(rename = "V")]
    pub v: Vec<f64>,
    #[serde(rename = "R")]
    pub r: Vec<f64>,
    /// Row sums `R_i` of the regular 1×1 blocks.
    pub r_regular: Vec<f64>,
    pub slack: f64,
}

impl GersgorinReport {
    pub fn all_contained(&self) -> bool {
        !self.eigenvalues.is_empty() && self.containment.iter().all(Option::is_some)
    }

    /// `G_r ⊂ (−∞, 0)`.
    pub fn g_r_negative(&self) -> bool {
        self.g_r.iter().all(|iv| iv.1 < 0.0)
    }

    pub fn max_abs_g_r(&self) -> f64 {
        self.g_r.iter().map(Interval::magnitude).fold(0.0, f64::max)
    }

    /// Mean of the band radii `U_k`, the common edge of each block's inner
    /// and outer bands.
    pub fn g_e_band(&self) -> f64 {
        if self.u.is_empty() {
            0.0
        } else {
            self.u.iter().sum::<f64>() / self.u.len() as f64
        }
    }

    pub fn min_abs_eigenvalue(&self) -> f64 {
        self.eigenvalues.iter().map(|e| e.abs()).fold(f64::INFINITY, f64::min)
    }
}

/// `G_r` and `G_e` of `Ĥ`. For a 2×2 block `[[a, b], [b, −a]]` with
/// off-block row sum `R`, `U² = a² + b²` and `V = |a| + |b|`, the set
/// `{x : |x² − U²| ≤ R(|x| + V)}` is the union of an outer band
/// `U ≤ |x| ≤ R/2 + √(R²/4 + U² + RV)` and an inner band
/// `√(max(R²/4 + U² − RV, 0)) − R/2 ≤ |x| ≤ U`.
pub fn gersgorin_sets(h: &PartitionedHessian) -> Result<GersgorinReport> {
    let part = h.partition();
    let a = &h.entries;
    let scale = a.max_abs().max(1.0);
    for k in 0..h.m {
        let i = 2 * k;
        if (a[(i, i)] + a[(i + 1, i + 1)]).abs() > 1e-12 * scale || (a[(i, i + 1)] - a[(i + 1, i)]).abs() > 1e-12 * scale {
            return Err(Error::BlockShapeMismatch);
        }
    }
    let norms = block_norms(a, &part)?;
    let nb = part.len();
    let off = |i: usize| -> f64 { (0..nb).filter(|&j| j != i).map(|j| norms[(i, j)]).sum() };
    let dom = is_strictly_block_diagonally_dominant(a, &part)?;

    let mut g_e = Vec::with_capacity(h.m);
    let (mut us, mut vs, mut rs) = (Vec::new(), Vec::new(), Vec::new());
    for k in 0..h.m {
        let i = 2 * k;
        let (p, q) = (a[(i, i)], a[(i, i + 1)]);
        let u = (p * p + q * q).sqrt();
        let v = p.abs() + q.abs();
        let r = off(k);
        let outer_hi = r / 2.0 + (r * r / 4.0 + u * u + r * v).sqrt();
        let inner_lo = ((r * r / 4.0 + u * u - r * v).max(0.0).sqrt() - r / 2.0).max(0.0);
        // The bands meet at |x| = U, so each block contributes two
        // mirrored intervals, or one when the inner band reaches 0.
        let bands = if inner_lo > 0.0 {
            vec![Interval(-outer_hi, -inner_lo), Interval(inner_lo, outer_hi)]
        } else {
            vec![Interval(-outer_hi, outer_hi)]
        };
        g_e.push(bands);
        us.push(u);
        vs.push(v);
        rs.push(r);
    }
    let mut g_r = Vec::with_capacity(h.n);
    let mut r_regular = Vec::with_capacity(h.n);
    for i in 0..h.n {
        let d = a[(2 * h.m + i, 2 * h.m + i)];
        let r = off(h.m + i);
        g_r.push(Interval(d - r, d + r));
        r_regular.push(r);
    }
    Ok(GersgorinReport {
        dominant: dom.dominant,
        margins: dom.margins,
        g_r,
        g_e,
        eigenvalues: Vec::new(),
        containment: Vec::new(),
        u: us,
        v: vs,
        r: rs,
        r_regular,
        slack: 1e-10 * scale,
    })
}

/// [`gersgorin_sets`] plus eigenvalues of `Ĥ` and, for each, a containing
/// component (checked with an absolute slack of `10⁻¹⁰ max|ĥ_ij|`).
pub fn localization_report(h: &PartitionedHessian) -> Result<GersgorinReport> {
    let mut rep = gersgorin_sets(h)?;
    rep.eigenvalues = h.eigenvalues()?;
    let slack = rep.slack;
    rep.containment = rep
        .eigenvalues
        .iter()
        .map(|&x| {
            if let Some(k) = rep.g_e.iter().position(|b| b.iter().any(|iv| iv.contains(x, slack))) {
                return Some(k);
            }
            rep.g_r.iter().position(|iv| iv.contains(x, slack)).map(|i| h.m + i)
        })
        .collect();
    Ok(rep)
}
