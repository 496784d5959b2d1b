//! The algebra L_{n,q} of q-polynomials Σ a_i x^{q^i} over F_{q^n}:
//! evaluation, composition mod x^{q^n} - x, matrix representation over F_q
//! and rank/kernel.

use crate::error::{Error, Result};
use crate::fields::{FieldContext, FieldElement};
use crate::linalg::{self, Decomposer};

/// A q-polynomial with exactly n coefficients (q-degree < n), stored as
/// raw level-n encodings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearizedPoly {
    coeffs: Vec<u64>,
}

impl LinearizedPoly {
    pub fn new(ctx: &FieldContext, coeffs: Vec<u64>) -> Result<LinearizedPoly> {
        if coeffs.len() != ctx.n() {
            return Err(Error::InvalidParameter(format!(
                "expected {} coefficients, got {}",
                ctx.n(),
                coeffs.len()
            )));
        }
        for &c in &coeffs {
            if c >= ctx.size() {
                return Err(Error::InvalidParameter(format!("encoding {c} out of range")));
            }
        }
        Ok(LinearizedPoly { coeffs })
    }

    pub fn zero(ctx: &FieldContext) -> LinearizedPoly {
        LinearizedPoly { coeffs: vec![0; ctx.n()] }
    }

    /// The identity map x.
    pub fn identity(ctx: &FieldContext) -> LinearizedPoly {
        let mut coeffs = vec![0; ctx.n()];
        coeffs[0] = 1;
        LinearizedPoly { coeffs }
    }

    /// a · x^{q^i}
    pub fn monomial(ctx: &FieldContext, a: u64, i: usize) -> LinearizedPoly {
        let mut coeffs = vec![0; ctx.n()];
        coeffs[i % ctx.n()] = a;
        LinearizedPoly { coeffs }
    }

    /// τ_λ = λx
    pub fn scalar(ctx: &FieldContext, lambda: u64) -> LinearizedPoly {
        Self::monomial(ctx, lambda, 0)
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub(crate) fn eval_raw(&self, ctx: &FieldContext, x: u64) -> u64 {
        let mut acc = 0u64;
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a != 0 {
                acc = ctx.add_raw(acc, ctx.mul_raw(a, ctx.frob_raw(x, i)));
            }
        }
        acc
    }

    pub fn evaluate(&self, ctx: &FieldContext, x: FieldElement) -> FieldElement {
        ctx.element(self.eval_raw(ctx, x.encoding())).expect("closed")
    }

    pub fn add(&self, ctx: &FieldContext, other: &LinearizedPoly) -> LinearizedPoly {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| ctx.add_raw(a, b))
            .collect();
        LinearizedPoly { coeffs }
    }

    pub fn sub(&self, ctx: &FieldContext, other: &LinearizedPoly) -> LinearizedPoly {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| ctx.sub_raw(a, b))
            .collect();
        LinearizedPoly { coeffs }
    }

    /// λ·f, i.e. τ_λ ∘ f.
    pub fn scale(&self, ctx: &FieldContext, lambda: u64) -> LinearizedPoly {
        let coeffs = self.coeffs.iter().map(|&a| ctx.mul_raw(lambda, a)).collect();
        LinearizedPoly { coeffs }
    }

    /// f ∘ g mod x^{q^n} - x: c_k = Σ_{i+j ≡ k (n)} f_i · g_j^{q^i}.
    pub fn compose(&self, ctx: &FieldContext, g: &LinearizedPoly) -> LinearizedPoly {
        let n = ctx.n();
        let mut coeffs = vec![0u64; n];
        for (i, &fi) in self.coeffs.iter().enumerate() {
            if fi == 0 {
                continue;
            }
            for (j, &gj) in g.coeffs.iter().enumerate() {
                if gj == 0 {
                    continue;
                }
                let k = (i + j) % n;
                let term = ctx.mul_raw(fi, ctx.frob_raw(gj, i));
                coeffs[k] = ctx.add_raw(coeffs[k], term);
            }
        }
        LinearizedPoly { coeffs }
    }

    /// Applies the automorphism x ↦ (x^{p^i})^{q^j} to every coefficient.
    pub fn apply_automorphism(&self, ctx: &FieldContext, i: usize, j: usize) -> LinearizedPoly {
        let t = i + ctx.e() * j;
        let coeffs = self.coeffs.iter().map(|&a| ctx.frob_p_raw(a, t)).collect();
        LinearizedPoly { coeffs }
    }

    /// Matrix of the induced F_q-linear map in the given basis: column j
    /// holds the coordinates of f(basis_j).
    pub fn dickson_matrix(&self, ctx: &FieldContext, basis: &FqBasis) -> Result<FqMatrix> {
        let n = ctx.n();
        if basis.len() != n {
            return Err(Error::InvalidParameter("basis must have n elements".into()));
        }
        let mut entries = vec![0u64; n * n];
        for j in 0..n {
            let img = self.eval_raw(ctx, basis.element(j));
            let coords = basis.decompose(ctx, img);
            for i in 0..n {
                entries[i * n + j] = coords[i];
            }
        }
        Ok(FqMatrix { dim: n, entries })
    }

    /// Rank and kernel dimension over F_q, in the default normal basis.
    pub fn rank_kernel(&self, ctx: &FieldContext) -> Result<(usize, usize)> {
        let basis = FqBasis::normal(ctx)?;
        self.rank_kernel_in(ctx, &basis)
    }

    pub fn rank_kernel_in(&self, ctx: &FieldContext, basis: &FqBasis) -> Result<(usize, usize)> {
        let m = self.dickson_matrix(ctx, basis)?;
        let r = m.rank(ctx);
        Ok((r, ctx.n() - r))
    }
}

/// An F_q-basis of a level-m subfield, with precomputed coordinate
/// extraction (F_p-linear solve against the spanning set {w^a · b_i}).
pub struct FqBasis {
    m: usize,
    elements: Vec<u64>,
    /// F_p-basis 1, w, ..., w^{e-1} of F_q.
    w_powers: Vec<u64>,
    dec: Decomposer,
    /// fast path: e = 1 and elements are the θ-power basis, so that
    /// coordinates are exactly the p-adic digits.
    digits_fast: bool,
}

impl FqBasis {
    /// Basis from explicit level-m elements (must be F_q-independent).
    pub fn new(ctx: &FieldContext, elements: Vec<u64>, m: usize) -> Result<FqBasis> {
        if ctx.n() % m != 0 {
            return Err(Error::NotADivisor(m, ctx.n()));
        }
        if elements.len() != m {
            return Err(Error::InvalidParameter(format!(
                "level-{m} basis needs {m} elements"
            )));
        }
        let e = ctx.e();
        let deg = e * ctx.n();
        let w_powers = Self::fq_fp_basis(ctx)?;
        let dim = e * m;
        // columns indexed (i, a) -> i*e + a holding digits of w^a * b_i
        let mut mat = vec![0u64; deg * dim];
        for (i, &b) in elements.iter().enumerate() {
            for (a, &w) in w_powers.iter().enumerate() {
                let col = i * e + a;
                let d = ctx.digits(ctx.mul_raw(w, b));
                for (r, &dr) in d.iter().enumerate() {
                    mat[r * dim + col] = dr;
                }
            }
        }
        let dec = Decomposer::new(ctx, &mat, deg, dim).ok_or(Error::DependentBasis)?;
        let digits_fast = e == 1
            && m == ctx.n()
            && elements
                .iter()
                .enumerate()
                .all(|(i, &b)| b == ctx.p().pow(i as u32));
        Ok(FqBasis { m, elements, w_powers, dec, digits_fast })
    }

    /// The θ-power basis 1, θ, ..., θ^{n-1} of F_{q^n} over F_q.
    pub fn polynomial(ctx: &FieldContext) -> Result<FqBasis> {
        let n = ctx.n();
        let elements: Vec<u64> = (0..n).map(|i| ctx.pow_raw(ctx.p(), i as u128)).collect();
        Self::new(ctx, elements, n)
    }

    /// The normal basis ξ, ξ^q, ..., ξ^{q^{m-1}} for the first normal
    /// element of F_{q^m}.
    pub fn normal_at(ctx: &FieldContext, m: usize) -> Result<FqBasis> {
        let (xi, _) = ctx.find_normal_element(m)?;
        Self::from_normal_element(ctx, xi.encoding(), m)
    }

    pub fn normal(ctx: &FieldContext) -> Result<FqBasis> {
        Self::normal_at(ctx, ctx.n())
    }

    pub fn from_normal_element(ctx: &FieldContext, xi: u64, m: usize) -> Result<FqBasis> {
        let elements: Vec<u64> = (0..m).map(|i| ctx.frob_raw(xi, i)).collect();
        Self::new(ctx, elements, m)
    }

    fn fq_fp_basis(ctx: &FieldContext) -> Result<Vec<u64>> {
        let e = ctx.e();
        if e == 1 {
            return Ok(vec![1]);
        }
        let deg = e * ctx.n();
        for enc in ctx.subfield_elements(1)? {
            if enc < 2 {
                continue;
            }
            let powers: Vec<u64> = (0..e).map(|a| ctx.pow_raw(enc, a as u128)).collect();
            let mut mat = vec![0u64; deg * e];
            for (a, &w) in powers.iter().enumerate() {
                let d = ctx.digits(w);
                for (r, &dr) in d.iter().enumerate() {
                    mat[r * e + a] = dr;
                }
            }
            if Decomposer::new(ctx, &mat, deg, e).is_some() {
                return Ok(powers);
            }
        }
        Err(Error::DependentBasis)
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    pub fn element(&self, i: usize) -> u64 {
        self.elements[i]
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    /// Coordinates of x (which must lie in the F_q-span) as m raw F_q
    /// encodings.
    pub fn decompose(&self, ctx: &FieldContext, x: u64) -> Vec<u64> {
        let mut out = vec![0u64; self.m];
        self.decompose_into(ctx, x, &mut out);
        out
    }

    /// Like `decompose`, writing into a caller-provided buffer.
    pub fn decompose_into(&self, ctx: &FieldContext, mut x: u64, out: &mut [u64]) {
        debug_assert_eq!(out.len(), self.m);
        if self.digits_fast {
            let p = ctx.p();
            for o in out.iter_mut() {
                *o = x % p;
                x /= p;
            }
            return;
        }
        self.decompose_slow(ctx, x, out);
    }

    fn decompose_slow(&self, ctx: &FieldContext, x: u64, out: &mut [u64]) {
        let e = ctx.e();
        let c = self.dec.solve(ctx, &ctx.digits(x));
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = 0u64;
            for (a, &w) in self.w_powers.iter().enumerate() {
                let coeff = c[i * e + a];
                if coeff != 0 {
                    acc = ctx.add_raw(acc, ctx.mul_raw(coeff, w));
                }
            }
            *o = acc;
        }
    }

    /// Σ coords_i · b_i.
    pub fn combine(&self, ctx: &FieldContext, coords: &[u64]) -> u64 {
        let mut acc = 0u64;
        for (i, &c) in coords.iter().enumerate() {
            if c != 0 {
                acc = ctx.add_raw(acc, ctx.mul_raw(c, self.elements[i]));
            }
        }
        acc
    }
}

/// n×n matrix over F_q (raw level-1 encodings, row-major).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FqMatrix {
    pub dim: usize,
    pub entries: Vec<u64>,
}

impl FqMatrix {
    pub fn identity(n: usize) -> FqMatrix {
        let mut entries = vec![0u64; n * n];
        for i in 0..n {
            entries[i * n + i] = 1;
        }
        FqMatrix { dim: n, entries }
    }

    pub fn rank(&self, ctx: &FieldContext) -> usize {
        let mut buf = self.entries.clone();
        linalg::rank(ctx, &mut buf, self.dim, self.dim)
    }

    pub fn mul(&self, ctx: &FieldContext, other: &FqMatrix) -> FqMatrix {
        let n = self.dim;
        let mut entries = vec![0u64; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k];
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    let b = other.entries[k * n + j];
                    if b != 0 {
                        entries[i * n + j] = ctx.add_raw(entries[i * n + j], ctx.mul_raw(a, b));
                    }
                }
            }
        }
        FqMatrix { dim: n, entries }
    }

    pub fn add(&self, ctx: &FieldContext, other: &FqMatrix) -> FqMatrix {
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| ctx.add_raw(a, b))
            .collect();
        FqMatrix { dim: self.dim, entries }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx8() -> FieldContext {
        FieldContext::build_tower(3, 1, 8).unwrap()
    }

    #[test]
    fn identity_evaluates_to_argument() {
        let ctx = ctx8();
        let f = LinearizedPoly::identity(&ctx);
        for x in [0u64, 1, 17, 6000] {
            assert_eq!(f.eval_raw(&ctx, x), x);
        }
    }

    #[test]
    fn evaluation_is_fq_linear() {
        let ctx = ctx8();
        let f = LinearizedPoly::new(&ctx, vec![5, 1, 0, 7, 0, 2, 0, 0]).unwrap();
        let (u, v) = (123u64, 4567u64);
        assert_eq!(
            f.eval_raw(&ctx, ctx.add_raw(u, v)),
            ctx.add_raw(f.eval_raw(&ctx, u), f.eval_raw(&ctx, v))
        );
        for lam in 0..3u64 {
            assert_eq!(
                f.eval_raw(&ctx, ctx.mul_raw(lam, u)),
                ctx.mul_raw(lam, f.eval_raw(&ctx, u))
            );
        }
    }

    #[test]
    fn delta_s_evaluation_matches_power_sum() {
        // f_{delta,1} = x^q + delta x^{q^5} in L_{8,3}
        let ctx = ctx8();
        let delta = 91u64;
        let mut coeffs = vec![0u64; 8];
        coeffs[1] = 1;
        coeffs[5] = delta;
        let f = LinearizedPoly::new(&ctx, coeffs).unwrap();
        let x = 777u64;
        let expect = ctx.add_raw(
            ctx.pow_raw(x, 3),
            ctx.mul_raw(delta, ctx.pow_raw(x, 3u128.pow(5))),
        );
        assert_eq!(f.eval_raw(&ctx, x), expect);
    }

    #[test]
    fn compose_identity_and_evaluation_homomorphism() {
        let ctx = ctx8();
        let id = LinearizedPoly::identity(&ctx);
        let f = LinearizedPoly::new(&ctx, vec![2, 0, 11, 0, 0, 3, 0, 1]).unwrap();
        let g = LinearizedPoly::new(&ctx, vec![0, 9, 0, 0, 4, 0, 0, 5]).unwrap();
        assert_eq!(f.compose(&ctx, &id), f);
        assert_eq!(id.compose(&ctx, &f), f);
        let fg = f.compose(&ctx, &g);
        for x in [1u64, 55, 640, 6560] {
            assert_eq!(fg.eval_raw(&ctx, x), f.eval_raw(&ctx, g.eval_raw(&ctx, x)));
        }
    }

    #[test]
    fn from1toanys_identity() {
        // compose(tau_delta, f_{1/delta,1}) = f_{delta,5} for n = 8
        let ctx = ctx8();
        let delta = 123u64;
        let dinv = ctx.inv_raw(delta).unwrap();
        let mut c = vec![0u64; 8];
        c[1] = 1;
        c[5] = dinv;
        let f_inv_1 = LinearizedPoly::new(&ctx, c).unwrap();
        let tau = LinearizedPoly::scalar(&ctx, delta);
        let lhs = tau.compose(&ctx, &f_inv_1);
        let mut c5 = vec![0u64; 8];
        c5[5] = 1;
        c5[1] = delta;
        // f_{delta,5} = x^{q^5} + delta x^{q^{4+5 mod 8}} = x^{q^5} + delta x^{q^1}
        let f_d5 = LinearizedPoly::new(&ctx, c5).unwrap();
        assert_eq!(lhs, f_d5.scale(&ctx, 1));
    }

    #[test]
    fn dickson_matrix_of_frobenius_in_f9() {
        let ctx = FieldContext::build_tower(3, 1, 2).unwrap();
        // basis {1, t}: f = x^q = x^3 maps 1 -> 1, t -> -t
        let basis = FqBasis::new(&ctx, vec![1, 3], 2).unwrap();
        let f = LinearizedPoly::monomial(&ctx, 1, 1);
        let m = f.dickson_matrix(&ctx, &basis).unwrap();
        assert_eq!(m.entries, vec![1, 0, 0, 2]);
        let id = LinearizedPoly::identity(&ctx);
        assert_eq!(id.dickson_matrix(&ctx, &basis).unwrap(), FqMatrix::identity(2));
    }

    #[test]
    fn dickson_is_algebra_homomorphism() {
        let ctx = ctx8();
        let basis = FqBasis::normal(&ctx).unwrap();
        let f = LinearizedPoly::new(&ctx, vec![2, 0, 11, 0, 0, 3, 0, 1]).unwrap();
        let g = LinearizedPoly::new(&ctx, vec![0, 9, 0, 0, 4, 0, 0, 5]).unwrap();
        let mf = f.dickson_matrix(&ctx, &basis).unwrap();
        let mg = g.dickson_matrix(&ctx, &basis).unwrap();
        let mfg = f.compose(&ctx, &g).dickson_matrix(&ctx, &basis).unwrap();
        assert_eq!(mfg, mf.mul(&ctx, &mg));
        let msum = f.add(&ctx, &g).dickson_matrix(&ctx, &basis).unwrap();
        assert_eq!(msum, mf.add(&ctx, &mg));
    }

    #[test]
    fn rank_nullity_and_known_kernels() {
        let ctx = ctx8();
        let id = LinearizedPoly::identity(&ctx);
        assert_eq!(id.rank_kernel(&ctx).unwrap(), (8, 0));
        // x^q - x has kernel F_q
        let mut c = vec![0u64; 8];
        c[0] = ctx.neg_raw(1);
        c[1] = 1;
        let f = LinearizedPoly::new(&ctx, c).unwrap();
        assert_eq!(f.rank_kernel(&ctx).unwrap(), (7, 1));
    }

    #[test]
    fn rank_is_basis_independent() {
        let ctx = ctx8();
        let poly_basis = FqBasis::polynomial(&ctx).unwrap();
        let normal_basis = FqBasis::normal(&ctx).unwrap();
        let f = LinearizedPoly::new(&ctx, vec![4, 1, 0, 0, 9, 0, 2, 0]).unwrap();
        assert_eq!(
            f.rank_kernel_in(&ctx, &poly_basis).unwrap(),
            f.rank_kernel_in(&ctx, &normal_basis).unwrap()
        );
    }

    #[test]
    fn kernel_dim_matches_brute_force_image() {
        let ctx = ctx8();
        let mut c = vec![0u64; 8];
        // f_{delta,1} with N(delta) = 1: kernel dimension 4
        let delta = ctx
            .subfield_elements(8)
            .unwrap()
            .into_iter()
            .find(|&d| d != 0 && ctx.norm_raw(d, 4) == 1 && d != 0)
            .unwrap();
        c[1] = 1;
        c[5] = delta;
        let f = LinearizedPoly::new(&ctx, c).unwrap();
        let (rank, ker) = f.rank_kernel(&ctx).unwrap();
        assert_eq!(ker, 4);
        // exhaustive kernel count agrees: 3^4 roots
        let roots = (0..ctx.size()).filter(|&x| f.eval_raw(&ctx, x) == 0).count();
        assert_eq!(roots, 3usize.pow(rank as u32 * 0 + 4));
    }

    #[test]
    fn automorphism_application() {
        let ctx = ctx8();
        let f = LinearizedPoly::new(&ctx, vec![2, 0, 11, 0, 0, 3, 0, 1]).unwrap();
        assert_eq!(f.apply_automorphism(&ctx, 0, 0), f);
        let mut g = f.clone();
        for _ in 0..8 {
            g = g.apply_automorphism(&ctx, 0, 1);
        }
        assert_eq!(g, f);
        let h = f.apply_automorphism(&ctx, 0, 3);
        for (a, b) in f.coeffs().iter().zip(h.coeffs()) {
            assert_eq!(ctx.frob_raw(*a, 3), *b);
        }
    }
}
