//! Share polynomials `F_A = C_A + S_A` and `F_B = C_B + S_B` with matrix
//! coefficients.
//!
//! The coded part carries the data blocks at the PolyDot exponents; the
//! secret part carries `z` uniformly random blocks at the exponents chosen in
//! [`crate::powersets`]. Each secret coefficient remembers which random
//! matrix it came from so the privacy auditor can inspect the mask layout.

use std::collections::BTreeMap;

use rand_chacha::rand_core::RngCore;

use crate::blockmatrix::BlockMatrix;
use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldModulus};
use crate::matrix::Matrix;
use crate::powersets::{p_sa, p_sb, ExponentSet, SchemeParams};
use crate::rng::{stream, Role};

/// How the random masks of the secret part are drawn.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum MaskPolicy {
    /// One fresh uniform matrix per secret exponent.
    #[default]
    Fresh,
    /// Test hook: the second secret exponent reuses the first mask. This is
    /// a deliberately broken share builder used to exercise the auditor.
    ReuseFirst,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SharePolynomial {
    coeffs: BTreeMap<u64, Matrix>,
    coded_support: ExponentSet,
    secret_support: ExponentSet,
    // mask index per secret exponent, aligned with `secret_support`
    masks: Vec<usize>,
    block_shape: (usize, usize),
}

impl SharePolynomial {
    /// Assembles a polynomial from coded terms and masked terms
    /// `(exponent, coefficient, mask index)`.
    pub fn new(
        block_shape: (usize, usize),
        coded: Vec<(u64, Matrix)>,
        secret: Vec<(u64, Matrix, usize)>,
    ) -> Result<Self> {
        let mut coeffs = BTreeMap::new();
        let coded_support: ExponentSet = coded.iter().map(|(e, _)| *e).collect();
        let mut secret = secret;
        secret.sort_by_key(|(e, _, _)| *e);
        let secret_support: ExponentSet = secret.iter().map(|(e, _, _)| *e).collect();
        if coded_support.len() != coded.len()
            || secret_support.len() != secret.len()
            || !coded_support.is_disjoint(&secret_support)
        {
            return Err(Error::InvalidParams(
                "share exponents must be distinct".into(),
            ));
        }
        let mut masks = Vec::with_capacity(secret.len());
        for (e, m, k) in secret {
            masks.push(k);
            coeffs.insert(e, m);
        }
        for (e, m) in coded {
            coeffs.insert(e, m);
        }
        if let Some(bad) = coeffs.values().find(|m| m.shape() != block_shape) {
            return Err(Error::ShapeMismatch {
                expected: block_shape,
                actual: bad.shape(),
            });
        }
        Ok(Self {
            coeffs,
            coded_support,
            secret_support,
            masks,
            block_shape,
        })
    }

    pub fn support(&self) -> ExponentSet {
        self.coeffs.keys().copied().collect()
    }

    pub fn coded_support(&self) -> &ExponentSet {
        &self.coded_support
    }

    pub fn secret_support(&self) -> &ExponentSet {
        &self.secret_support
    }

    pub fn coefficient(&self, e: u64) -> Option<&Matrix> {
        self.coeffs.get(&e)
    }

    pub fn coefficients(&self) -> impl Iterator<Item = (u64, &Matrix)> {
        self.coeffs.iter().map(|(e, m)| (*e, m))
    }

    pub fn block_shape(&self) -> (usize, usize) {
        self.block_shape
    }

    /// `(exponent, mask index)` for every secret term.
    pub fn mask_layout(&self) -> Vec<(u64, usize)> {
        self.secret_support
            .iter()
            .zip(self.masks.iter().copied())
            .collect()
    }

    pub fn evaluate(&self, q: &FieldModulus, x: FieldElement) -> Matrix {
        let mut acc = Matrix::zeros(self.block_shape.0, self.block_shape.1);
        for (&e, c) in &self.coeffs {
            acc.add_scaled(q, c, q.pow(x, e))
                .expect("coefficients share the block shape");
        }
        acc
    }
}

/// `P(x)` as a single block-shaped matrix.
pub fn evaluate_share(q: &FieldModulus, p: &SharePolynomial, x: FieldElement) -> Matrix {
    p.evaluate(q, x)
}

/// Full sparse product `lhs(x) * rhs(x)` with matrix coefficients.
pub fn multiply(
    q: &FieldModulus,
    lhs: &SharePolynomial,
    rhs: &SharePolynomial,
) -> Result<BTreeMap<u64, Matrix>> {
    let mut out: BTreeMap<u64, Matrix> = BTreeMap::new();
    for (ea, a) in lhs.coefficients() {
        for (eb, b) in rhs.coefficients() {
            let prod = a.mul(q, b)?;
            match out.get_mut(&(ea + eb)) {
                Some(acc) => acc.add_scaled(q, &prod, FieldElement::ONE)?,
                None => {
                    out.insert(ea + eb, prod);
                }
            }
        }
    }
    Ok(out)
}

fn draw_masks<R: RngCore>(
    q: &FieldModulus,
    exponents: &ExponentSet,
    shape: (usize, usize),
    policy: MaskPolicy,
    rng: &mut R,
) -> Vec<(u64, Matrix, usize)> {
    let fresh: Vec<Matrix> = (0..exponents.len())
        .map(|_| Matrix::random(q, shape.0, shape.1, rng))
        .collect();
    exponents
        .iter()
        .enumerate()
        .map(|(k, e)| {
            let src = match policy {
                MaskPolicy::ReuseFirst if k == 1 => 0,
                _ => k,
            };
            (e, fresh[src].clone(), src)
        })
        .collect()
}

fn expect_grid(b: &BlockMatrix, grid: (usize, usize)) -> Result<()> {
    if b.grid() != grid {
        return Err(Error::ShapeMismatch {
            expected: grid,
            actual: b.grid(),
        });
    }
    Ok(())
}

/// Source 1's share: `A^T_{i,j}` at `i + t j`, masks at `p_sa(params)`.
/// `a_t` is the `t x s` block grid of `A^T`.
pub fn build_fa(
    q: &FieldModulus,
    a_t: &BlockMatrix,
    params: &SchemeParams,
    seed: u64,
    policy: MaskPolicy,
) -> Result<SharePolynomial> {
    let (s, t) = (params.s() as usize, params.t() as usize);
    expect_grid(a_t, (t, s))?;
    let shape = a_t.block_shape();
    let coded = (0..t)
        .flat_map(|i| (0..s).map(move |j| (i, j)))
        .map(|(i, j)| ((i + t * j) as u64, a_t.block(i, j).clone()))
        .collect();
    let mut rng = stream(seed, Role::SourceA);
    let secret = draw_masks(q, &p_sa(params), shape, policy, &mut rng);
    SharePolynomial::new(shape, coded, secret)
}

/// Source 2's share: `B_{k,l}` at `t(s-1-k) + theta' l`, masks at
/// `p_sb(params)`. `b` is the `s x t` block grid of `B`.
pub fn build_fb(
    q: &FieldModulus,
    b: &BlockMatrix,
    params: &SchemeParams,
    seed: u64,
    policy: MaskPolicy,
) -> Result<SharePolynomial> {
    let (s, t) = (params.s(), params.t());
    expect_grid(b, (s as usize, t as usize))?;
    let shape = b.block_shape();
    let th = params.theta();
    let coded = (0..s)
        .flat_map(|k| (0..t).map(move |l| (k, l)))
        .map(|(k, l)| {
            (
                t * (s - 1 - k) + th * l,
                b.block(k as usize, l as usize).clone(),
            )
        })
        .collect();
    let mut rng = stream(seed, Role::SourceB);
    let secret = draw_masks(q, &p_sb(params), shape, policy, &mut rng);
    SharePolynomial::new(shape, coded, secret)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blockmatrix::{partition, transpose_blockwise};
    use crate::powersets::{important_power_grid, sumset, support_h};
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn set(v: &[u64]) -> ExponentSet {
        v.iter().copied().collect()
    }

    fn shares(
        q: &FieldModulus,
        m: usize,
        params: &SchemeParams,
        seed: u64,
    ) -> (Matrix, Matrix, SharePolynomial, SharePolynomial) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed ^ 0xabcdef);
        let a = Matrix::random(q, m, m, &mut rng);
        let b = Matrix::random(q, m, m, &mut rng);
        let (s, t) = (params.s() as usize, params.t() as usize);
        let at = transpose_blockwise(&partition(&a, s, t).unwrap());
        let bb = partition(&b, s, t).unwrap();
        let fa = build_fa(q, &at, params, seed, MaskPolicy::Fresh).unwrap();
        let fb = build_fb(q, &bb, params, seed, MaskPolicy::Fresh).unwrap();
        (a, b, fa, fb)
    }

    #[test]
    fn example_one_layout() {
        let q = FieldModulus::new(101).unwrap();
        let params = SchemeParams::new(2, 1, 2).unwrap();
        let (a, b, fa, fb) = shares(&q, 2, &params, 1);
        assert_eq!(fa.support(), set(&[0, 1, 2, 3]));
        assert_eq!(fa.coded_support(), &set(&[0, 1]));
        assert_eq!(fa.secret_support(), &set(&[2, 3]));
        assert_eq!(fb.support(), set(&[0, 1, 2, 3]));
        assert_eq!(fb.secret_support(), &set(&[2, 3]));
        // A = [A1; A2] row-wise, so A^T = [A1^T A2^T]; A1^T sits at x^0
        let a1t = partition(&a, 2, 1).unwrap().block(0, 0).transpose();
        assert_eq!(fa.coefficient(0), Some(&a1t));
        // B1 sits at x^1, B2 at x^0
        let bp = partition(&b, 2, 1).unwrap();
        assert_eq!(fb.coefficient(1), Some(bp.block(0, 0)));
        assert_eq!(fb.coefficient(0), Some(bp.block(1, 0)));
    }

    #[test]
    fn two_by_two_layout() {
        let q = FieldModulus::new(101).unwrap();
        let params = SchemeParams::new(2, 2, 2).unwrap();
        let (a, b, fa, fb) = shares(&q, 4, &params, 2);
        let at = transpose_blockwise(&partition(&a, 2, 2).unwrap());
        for (e, (i, j)) in [(0, (0, 0)), (1, (1, 0)), (2, (0, 1)), (3, (1, 1))] {
            assert_eq!(fa.coefficient(e), Some(at.block(i, j)));
        }
        assert_eq!(fa.secret_support(), &set(&[4, 5]));
        let bb = partition(&b, 2, 2).unwrap();
        for (e, (k, l)) in [(2, (0, 0)), (0, (1, 0)), (8, (0, 1)), (6, (1, 1))] {
            assert_eq!(fb.coefficient(e), Some(bb.block(k, l)));
        }
        assert_eq!(fb.secret_support(), &set(&[10, 11]));
    }

    #[test]
    fn low_branch_of_fb() {
        let q = FieldModulus::new(101).unwrap();
        let params = SchemeParams::new(5, 2, 2).unwrap();
        let (_, _, _, fb) = shares(&q, 10, &params, 3);
        assert_eq!(fb.secret_support(), &set(&[10, 11]));
    }

    #[test]
    fn masks_are_seed_reproducible() {
        let q = FieldModulus::mersenne61();
        let params = SchemeParams::new(2, 2, 3).unwrap();
        let (_, _, fa1, fb1) = shares(&q, 4, &params, 5);
        let (_, _, fa2, fb2) = shares(&q, 4, &params, 5);
        assert_eq!(fa1, fa2);
        assert_eq!(fb1, fb2);
        let (_, _, fa3, _) = shares(&q, 4, &params, 6);
        let e = fa1.secret_support().iter().next().unwrap();
        assert_ne!(fa1.coefficient(e), fa3.coefficient(e));
    }

    #[test]
    fn shape_checks() {
        let q = FieldModulus::new(101).unwrap();
        let params = SchemeParams::new(2, 1, 1).unwrap();
        // F_A wants a 1 x 2 grid of A^T blocks, F_B a 2 x 1 grid of B blocks
        let wide = partition(&Matrix::identity(2), 1, 2).unwrap();
        let tall = partition(&Matrix::identity(2), 2, 1).unwrap();
        assert!(matches!(
            build_fa(&q, &tall, &params, 0, MaskPolicy::Fresh),
            Err(Error::ShapeMismatch { .. })
        ));
        assert!(matches!(
            build_fb(&q, &wide, &params, 0, MaskPolicy::Fresh),
            Err(Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn evaluation_basics() {
        let q = FieldModulus::new(101).unwrap();
        let c = Matrix::from_u64_rows(&q, &[vec![3, 4]]).unwrap();
        let p = SharePolynomial::new((1, 2), vec![(0, c.clone())], vec![]).unwrap();
        assert_eq!(evaluate_share(&q, &p, q.element(17)), c);

        let params = SchemeParams::new(2, 1, 2).unwrap();
        let (_, _, fa, _) = shares(&q, 2, &params, 9);
        let (r, c) = fa.block_shape();
        let mut sum = Matrix::zeros(r, c);
        for (_, m) in fa.coefficients() {
            sum = sum.add(&q, m).unwrap();
        }
        assert_eq!(fa.evaluate(&q, FieldElement::ONE), sum);

        let k = q.element(7);
        let x = q.element(5);
        let scaled = SharePolynomial::new(
            fa.block_shape(),
            fa.coefficients()
                .map(|(e, m)| (e, m.scale(&q, k)))
                .collect(),
            vec![],
        )
        .unwrap();
        assert_eq!(scaled.evaluate(&q, x), fa.evaluate(&q, x).scale(&q, k));
    }

    #[test]
    fn reused_mask_is_visible_in_layout() {
        let q = FieldModulus::new(101).unwrap();
        let params = SchemeParams::new(2, 2, 3).unwrap();
        let at = transpose_blockwise(&partition(&Matrix::identity(4), 2, 2).unwrap());
        let fa = build_fa(&q, &at, &params, 0, MaskPolicy::ReuseFirst).unwrap();
        let layout = fa.mask_layout();
        assert_eq!(layout[0].1, layout[1].1);
        assert_eq!(fa.coefficient(layout[0].0), fa.coefficient(layout[1].0));
    }

    #[test]
    fn product_holds_output_blocks_at_important_powers() {
        let q = FieldModulus::new(101).unwrap();
        for (m, s, t, z) in [
            (2, 2, 1, 2),
            (4, 2, 2, 2),
            (6, 3, 2, 4),
            (4, 2, 2, 5),
            (6, 2, 3, 1),
            (4, 1, 2, 3),
            (10, 5, 2, 4),
        ] {
            let params = SchemeParams::new(s, t, z).unwrap();
            let (a, b, fa, fb) = shares(&q, m, &params, 21);
            let prod = multiply(&q, &fa, &fb).unwrap();
            let support: ExponentSet = prod.keys().copied().collect();
            assert_eq!(sumset(&fa.support(), &fb.support()), support_h(&params));
            assert_eq!(support, support_h(&params), "{params}");
            let y = partition(&a.transpose().mul(&q, &b).unwrap(), t as usize, t as usize).unwrap();
            for (i, l, e) in important_power_grid(&params) {
                assert_eq!(
                    &prod[&e],
                    y.block(i as usize, l as usize),
                    "{params} block ({i},{l})"
                );
            }
        }
    }

    // Counting nonzero coefficients of a random product gives the same
    // number as the symbolic support, i.e. no accidental cancellation.
    #[test]
    fn random_products_have_full_support() {
        let q = FieldModulus::mersenne61();
        for (s, t, z) in [(2, 2, 2), (3, 2, 5), (2, 3, 7), (1, 3, 2), (4, 2, 3)] {
            let params = SchemeParams::new(s, t, z).unwrap();
            let m = (s * t) as usize;
            let (_, _, fa, fb) = shares(&q, m, &params, 77);
            let nonzero = multiply(&q, &fa, &fb)
                .unwrap()
                .values()
                .filter(|c| !c.is_zero())
                .count();
            assert_eq!(nonzero, support_h(&params).len(), "{params}");
        }
    }
}
