//! Magnus embedding `x_i -> 1 + X_i` of the free nilpotent group of class `k`
//! into the free associative ring over Z truncated above degree `k`.
//!
//! The embedding is faithful on `F/F_{k+1}`, which makes it a second,
//! independent model of the group. Normal forms are recovered weight by
//! weight: the lowest nonconstant homogeneous part of an element congruent to
//! 1 is an integer combination of the Lie polynomials of the basic
//! commutators of that weight, and peeling those powers off advances to the
//! next weight.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::basiccomm::{enumerate_basic, BasicError, BasicSequence};
use crate::valuation::binom_signed;

/// Largest series (number of words of length <= k) a model may use.
pub const MAX_MODEL_DIM: usize = 1 << 21;

pub type Series = Vec<BigInt>;

struct Solver {
    /// Positions of pivot words inside the degree block.
    pivots: Vec<usize>,
    /// `e_b = sum_p block[pivot_p] * num[p][b] / den`.
    num: Vec<Vec<BigInt>>,
    den: BigInt,
}

pub struct MagnusModel {
    n: usize,
    k: usize,
    /// `offsets[d]` is the first slot of degree `d`; `offsets[k+1]` is the dimension.
    offsets: Vec<usize>,
    /// `n^d`.
    block: Vec<usize>,
    basis: Arc<BasicSequence>,
    /// `upow[b][m-1] = (M(c_b) - 1)^m` for `1 <= m <= k / wt(c_b)`.
    upow: Vec<Vec<Series>>,
    solvers: Vec<Option<Solver>>,
}

impl std::fmt::Debug for MagnusModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "MagnusModel(n={}, k={}, dim={})", self.n, self.k, self.dim())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error(transparent)]
    Basic(#[from] BasicError),
    #[error("exact model for {n} letters and class {k} needs {dim} coefficients; limit is {MAX_MODEL_DIM}")]
    TooLarge { n: usize, k: usize, dim: usize },
}

fn model_dim(n: usize, k: usize) -> Option<usize> {
    let mut total = 0usize;
    let mut b = 1usize;
    for _ in 0..=k {
        total = total.checked_add(b)?;
        b = b.checked_mul(n)?;
    }
    Some(total)
}

/// Fails if a model on `n` letters of class `k` would exceed the size limit.
pub fn check_dim(n: usize, k: usize) -> Result<(), ModelError> {
    match model_dim(n, k) {
        Some(d) if d <= MAX_MODEL_DIM => Ok(()),
        d => Err(ModelError::TooLarge { n, k, dim: d.unwrap_or(usize::MAX) }),
    }
}

/// Shared, lazily built model for `n` letters and class `k`.
pub fn model(n: usize, k: usize) -> Result<Arc<MagnusModel>, ModelError> {
    static MODELS: OnceLock<RwLock<HashMap<(usize, usize), Arc<MagnusModel>>>> = OnceLock::new();
    let cache = MODELS.get_or_init(Default::default);
    if let Some(m) = cache.read().expect("model cache poisoned").get(&(n, k)) {
        return Ok(m.clone());
    }
    let built = Arc::new(MagnusModel::build(n, k)?);
    // Racing builders produce identical models; keep whichever landed first.
    let mut w = cache.write().expect("model cache poisoned");
    Ok(w.entry((n, k)).or_insert(built).clone())
}

impl MagnusModel {
    fn build(n: usize, k: usize) -> Result<MagnusModel, ModelError> {
        check_dim(n, k)?;
        let dim = model_dim(n, k).expect("checked");
        let basis = Arc::new(enumerate_basic(n, k)?);
        let mut offsets = Vec::with_capacity(k + 2);
        let mut block = Vec::with_capacity(k + 1);
        let mut acc = 0;
        let mut b = 1;
        for _ in 0..=k {
            offsets.push(acc);
            block.push(b);
            acc += b;
            b *= n;
        }
        offsets.push(acc);
        debug_assert_eq!(acc, dim);

        let mut model = MagnusModel { n, k, offsets, block, basis: basis.clone(), upow: Vec::new(), solvers: Vec::new() };

        // Images of the basic commutators, built from their two parts.
        let mut images: Vec<Series> = Vec::with_capacity(basis.len());
        for idx in 0..basis.len() {
            let img = match basis.parts(idx) {
                None => {
                    let mut s = model.one();
                    s[model.offsets[1] + idx] = BigInt::one();
                    s
                }
                Some((x, y)) => {
                    let (a, b) = (&images[x], &images[y]);
                    let ai = model.inverse(a);
                    let bi = model.inverse(b);
                    model.mul(&model.mul(&ai, &bi), &model.mul(a, b))
                }
            };
            images.push(img);
        }
        let mut upow = Vec::with_capacity(basis.len());
        for (idx, img) in images.into_iter().enumerate() {
            let mut u = img;
            u[0] = BigInt::zero();
            let top = k / basis.weight(idx);
            let mut pows = vec![u.clone()];
            for _ in 1..top {
                let next = model.mul(pows.last().expect("nonempty"), &u);
                pows.push(next);
            }
            upow.push(pows);
        }
        model.upow = upow;

        let mut solvers = vec![None];
        for w in 1..=k {
            solvers.push(model.build_solver(w));
        }
        model.solvers = solvers;
        Ok(model)
    }

    fn build_solver(&self, w: usize) -> Option<Solver> {
        let range = self.basis.weight_range(w);
        if range.is_empty() {
            return None;
        }
        let off = self.offsets[w];
        let width = self.block[w];
        let rows: Vec<Vec<BigRational>> = range
            .clone()
            .map(|b| {
                self.upow[b][0][off..off + width]
                    .iter()
                    .map(|c| BigRational::from_integer(c.clone()))
                    .collect()
            })
            .collect();

        // Row-reduce a copy to find independent columns.
        let mut m = rows.clone();
        let nrows = m.len();
        let mut pivots = Vec::with_capacity(nrows);
        let mut row = 0;
        for col in 0..width {
            if row == nrows {
                break;
            }
            let Some(pr) = (row..nrows).find(|&r| !m[r][col].is_zero()) else { continue };
            m.swap(row, pr);
            let pv = m[row][col].clone();
            for c in col..width {
                let v = &m[row][c] / &pv;
                m[row][c] = v;
            }
            for r in 0..nrows {
                if r != row && !m[r][col].is_zero() {
                    let f = m[r][col].clone();
                    for c in col..width {
                        let v = &m[row][c] * &f;
                        m[r][c] -= v;
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        assert_eq!(pivots.len(), nrows, "Lie polynomials of basic commutators must be independent");

        // Invert the square submatrix S[b][p] = rows[b][pivots[p]]; we need
        // e = d * S^{-1} with d the pivot coordinates (a row vector).
        let size = nrows;
        let mut a: Vec<Vec<BigRational>> = (0..size)
            .map(|b| {
                let mut r: Vec<BigRational> = pivots.iter().map(|&p| rows[b][p].clone()).collect();
                r.extend((0..size).map(|j| if j == b { BigRational::one() } else { BigRational::zero() }));
                r
            })
            .collect();
        for col in 0..size {
            let pr = (col..size).find(|&r| !a[r][col].is_zero()).expect("invertible");
            a.swap(col, pr);
            let pv = a[col][col].clone();
            for c in 0..2 * size {
                let v = &a[col][c] / &pv;
                a[col][c] = v;
            }
            for r in 0..size {
                if r != col && !a[r][col].is_zero() {
                    let f = a[r][col].clone();
                    for c in 0..2 * size {
                        let v = &a[col][c] * &f;
                        a[r][c] -= v;
                    }
                }
            }
        }
        // inv[b][p] = S^{-1}[b][p]; e_p' = sum_b d_b inv[b][p'].
        let inv: Vec<Vec<BigRational>> = a.into_iter().map(|r| r[size..].to_vec()).collect();
        let mut den = BigInt::one();
        for r in &inv {
            for v in r {
                den = den.lcm(v.denom());
            }
        }
        let num = inv
            .iter()
            .map(|r| r.iter().map(|v| v.numer() * (&den / v.denom())).collect())
            .collect();
        Some(Solver { pivots, num, den })
    }

    pub fn letters(&self) -> usize {
        self.n
    }

    pub fn class(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.offsets[self.k + 1]
    }

    pub fn basis(&self) -> &Arc<BasicSequence> {
        &self.basis
    }

    pub fn one(&self) -> Series {
        let mut s = vec![BigInt::zero(); self.dim()];
        s[0] = BigInt::one();
        s
    }

    /// Truncated product.
    pub fn mul(&self, a: &Series, b: &Series) -> Series {
        let mut c = vec![BigInt::zero(); self.dim()];
        for da in 0..=self.k {
            let oa = self.offsets[da];
            for ia in 0..self.block[da] {
                let x = &a[oa + ia];
                if x.is_zero() {
                    continue;
                }
                for db in 0..=self.k - da {
                    let ob = self.offsets[db];
                    let base = self.offsets[da + db] + ia * self.block[db];
                    for ib in 0..self.block[db] {
                        let y = &b[ob + ib];
                        if !y.is_zero() {
                            c[base + ib] += x * y;
                        }
                    }
                }
            }
        }
        c
    }

    /// Inverse of a series with constant term 1.
    pub fn inverse(&self, a: &Series) -> Series {
        debug_assert!(a[0].is_one());
        let mut u = a.clone();
        u[0] = BigInt::zero();
        let neg: Series = u.iter().map(|c| -c).collect();
        // 1 - u + u^2 - ... , evaluated Horner-style.
        let mut acc = self.one();
        for _ in 0..self.k {
            let mut next = self.mul(&neg, &acc);
            next[0] += 1;
            acc = next;
        }
        acc
    }

    /// `M(c_b)^e`, via the binomial series in `M(c_b) - 1`.
    pub fn power(&self, b: usize, e: &BigInt) -> Series {
        let mut s = self.one();
        if e.is_zero() {
            return s;
        }
        for (m, up) in self.upow[b].iter().enumerate() {
            let c = binom_signed(e, m as u64 + 1);
            if c.is_zero() {
                continue;
            }
            for (dst, src) in s.iter_mut().zip(up) {
                if !src.is_zero() {
                    *dst += &c * src;
                }
            }
        }
        s
    }

    /// Image of the normal form `prod c_b^{exps[b]}`.
    pub fn from_exponents(&self, exps: &[BigInt]) -> Series {
        let mut s = self.one();
        for (b, e) in exps.iter().enumerate() {
            if !e.is_zero() {
                s = self.mul(&s, &self.power(b, e));
            }
        }
        s
    }

    /// Normal-form exponents of a group element given by its image.
    pub fn to_exponents(&self, mut a: Series) -> Vec<BigInt> {
        let mut exps = vec![BigInt::zero(); self.basis.len()];
        for w in 1..=self.k {
            let Some(solver) = &self.solvers[w] else { continue };
            let off = self.offsets[w];
            let range = self.basis.weight_range(w);
            for (slot, b) in range.clone().enumerate() {
                let mut acc = BigInt::zero();
                for (p, &col) in solver.pivots.iter().enumerate() {
                    let d = &a[off + col];
                    if !d.is_zero() {
                        acc += d * &solver.num[p][slot];
                    }
                }
                let (q, rem) = acc.div_rem(&solver.den);
                assert!(rem.is_zero(), "image is not a group element: non-integral exponent");
                exps[b] = q;
            }
            if w == self.k {
                break;
            }
            for b in range {
                if !exps[b].is_zero() {
                    a = self.mul(&self.power(b, &-&exps[b]), &a);
                }
            }
        }
        exps
    }

    /// Whether `a` is exactly the image of the normal form `exps`.
    pub fn represents(&self, a: &Series, exps: &[BigInt]) -> bool {
        &self.from_exponents(exps) == a
    }

    /// Debug helper: maximal absolute coefficient.
    pub fn height(a: &Series) -> BigInt {
        a.iter().map(|c| c.abs()).max().unwrap_or_default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn commutator_image_is_lie_bracket_to_leading_order() {
        let m = model(2, 2).unwrap();
        // Words of degree 2 in order 11, 12, 21, 22.
        let u = &m.upow[2][0];
        let deg2: Vec<BigInt> = u[3..7].to_vec();
        // [x2,x1] -> X2 X1 - X1 X2.
        assert_eq!(deg2, vec![bi(0), bi(-1), bi(1), bi(0)]);
    }

    #[test]
    fn round_trip_exponents() {
        let m = model(2, 4).unwrap();
        let exps: Vec<BigInt> = [3, -2, 5, 0, -7, 1, 2, -4].iter().map(|&v| bi(v)).collect();
        assert_eq!(m.basis().len(), exps.len());
        let s = m.from_exponents(&exps);
        assert_eq!(m.to_exponents(s), exps);
    }

    #[test]
    fn inverse_and_powers() {
        let m = model(3, 3).unwrap();
        for b in 0..m.basis().len() {
            let p = m.power(b, &bi(5));
            let q = m.power(b, &bi(-5));
            assert_eq!(m.mul(&p, &q), m.one());
            assert_eq!(m.inverse(&p), q);
        }
    }

    #[test]
    fn generators_swap() {
        // x2 x1 = x1 x2 [x2,x1]
        let m = model(2, 2).unwrap();
        let prod = m.mul(&m.power(1, &bi(1)), &m.power(0, &bi(1)));
        assert_eq!(m.to_exponents(prod), vec![bi(1), bi(1), bi(1)]);
    }

    #[test]
    fn size_limit() {
        assert!(matches!(MagnusModel::build(10, 10), Err(ModelError::TooLarge { .. })));
    }
}
